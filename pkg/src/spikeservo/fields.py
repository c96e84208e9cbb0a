"""Selective and memory neural fields with peak analysis.

The selective field is an 80x80 winner-take-all field: a purely excitatory
Gaussian recurrent kernel plus a single intermediary reset neuron that sums
every field spike and, once at least ten arrive within its integration
window, inhibits the whole field. This replaces the quadratically expensive
all-to-all inhibitory kernel while keeping the same selection dynamics: a
small peak forms before global inhibition starts and then starves all
weaker activity.

The memory field uses a mexican-hat kernel strong enough that peaks persist
once formed, receives excitation from the selective field, and projects
inhibition back one-to-one, masking already-visited locations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .connections import (KernelDescriptor, KernelKind, KernelProjection,
                          MatrixProjection, all_to_one, expand_kernel,
                          one_to_all, one_to_one)
from .network import Network
from .neurons import NeuronModel, NeuronParams, Population

FIELD_SHAPE = (80, 80)


@dataclass
class SelectiveDnfParams:
    shape: tuple[int, int] = FIELD_SHAPE
    du: int = 809
    dv: int = 2047
    vth: float = 30.0
    amp_exc: float = 6.0
    width_exc: tuple[float, float] = (12.0, 12.0)
    amp_inh: float = 0.0
    width_inh: tuple[float, float] = (1.0, 1.0)
    cutoff_radius: int = 0                  # 0 -> 3x the largest width
    inhibitor_du: int = 4095
    inhibitor_dv: int = 3300
    inhibitor_vth: float = 10.0
    w_field_to_inhibitor: float = 1.0
    w_inhibitor_to_field: float = -10.0


@dataclass
class MemoryDnfParams:
    shape: tuple[int, int] = FIELD_SHAPE
    du: int = 2000
    dv: int = 2000
    vth: float = 30.0
    amp_exc: float = 13.0
    width_exc: tuple[float, float] = (10.0, 10.0)
    amp_inh: float = -10.0
    width_inh: tuple[float, float] = (12.0, 12.0)
    cutoff_radius: int = 0
    w_selective_to_memory: float = 8.0
    w_memory_to_selective: float = -5.0


@dataclass
class SelectiveDnf:
    field: Population
    inhibitor: Population
    recurrent: KernelProjection
    to_inhibitor: MatrixProjection
    from_inhibitor: MatrixProjection
    params: SelectiveDnfParams = field(default_factory=SelectiveDnfParams)


@dataclass
class MemoryDnf:
    field: Population
    recurrent: KernelProjection
    from_selective: MatrixProjection
    to_selective: MatrixProjection
    params: MemoryDnfParams = field(default_factory=MemoryDnfParams)


@dataclass(frozen=True)
class Peak:
    centroid: tuple[float, float]   # (row, col)
    size: int                       # active neurons in the component


@dataclass
class PeakSummary:
    peaks: list[Peak]

    def __len__(self) -> int:
        return len(self.peaks)

    def largest(self) -> Peak | None:
        return max(self.peaks, key=lambda p: p.size, default=None)


def build_selective_dnf(net: Network, params: SelectiveDnfParams | None = None,
                        prefix: str = "selective") -> SelectiveDnf:
    """Register the selective field and its intermediary inhibitor.

    The inhibitor threshold is ten times the per-spike current it receives
    from the field, so a ten-neuron peak can begin forming before global
    inhibition starts.
    """
    p = params or SelectiveDnfParams()
    fld = net.add_population(Population(
        prefix, p.shape, NeuronModel.LIF,
        NeuronParams(du=p.du, dv=p.dv, vth=p.vth)))
    inhibitor = net.add_population(Population(
        f"{prefix}_inhibitor", 1, NeuronModel.LIF_RESET,
        NeuronParams(du=p.inhibitor_du, dv=p.inhibitor_dv, vth=p.inhibitor_vth)))
    desc = KernelDescriptor(
        KernelKind.GAUSSIAN_SELECTIVE, amp_exc=p.amp_exc, width_exc=p.width_exc,
        amp_inh=p.amp_inh, width_inh=p.width_inh, cutoff_radius=p.cutoff_radius)
    recurrent = net.add_projection(expand_kernel(desc, p.shape, field=prefix))
    to_inh = net.add_projection(all_to_one(
        prefix, inhibitor.name, p.w_field_to_inhibitor, fld.size))
    from_inh = net.add_projection(one_to_all(
        inhibitor.name, prefix, p.w_inhibitor_to_field, fld.size))
    return SelectiveDnf(fld, inhibitor, recurrent, to_inh, from_inh, p)


def build_memory_dnf(net: Network, selective: SelectiveDnf,
                     params: MemoryDnfParams | None = None,
                     prefix: str = "memory") -> MemoryDnf:
    """Register the memory field and its coupling loop with the selective one."""
    p = params or MemoryDnfParams()
    if tuple(p.shape) != tuple(selective.field.shape):
        raise ValueError("memory field shape must match the selective field")
    fld = net.add_population(Population(
        prefix, p.shape, NeuronModel.LIF,
        NeuronParams(du=p.du, dv=p.dv, vth=p.vth)))
    desc = KernelDescriptor(
        KernelKind.MEXICAN_HAT_MULTIPEAK, amp_exc=p.amp_exc, width_exc=p.width_exc,
        amp_inh=p.amp_inh, width_inh=p.width_inh, cutoff_radius=p.cutoff_radius)
    recurrent = net.add_projection(expand_kernel(desc, p.shape, field=prefix))
    from_sel = net.add_projection(one_to_one(
        selective.field.name, prefix, p.w_selective_to_memory, fld.size))
    to_sel = net.add_projection(one_to_one(
        prefix, selective.field.name, p.w_memory_to_selective, fld.size))
    return MemoryDnf(fld, recurrent, from_sel, to_sel, p)


def connect_stimulus(net: Network, source: str, dnf: SelectiveDnf,
                     weight: float = 8.0) -> MatrixProjection:
    """One-to-one injection of stimulus spikes into the selective field."""
    src = net.populations[source]
    if src.size != dnf.field.size:
        raise ValueError("stimulus population must match the field size")
    return net.add_projection(one_to_one(source, dnf.field.name, weight, src.size))


def summarize_peaks(active: np.ndarray, min_size: int = 1) -> PeakSummary:
    """Connected components (8-connectivity) of an active-neuron mask.

    `active` is a 2-D boolean mask, typically the union of a field's spikes
    over a few recent steps (see Network.spike_union).
    """
    active = np.asarray(active, dtype=bool)
    if active.ndim != 2:
        raise ValueError("peak analysis requires a 2-D activity mask")
    labels, n = ndimage.label(active, structure=np.ones((3, 3), dtype=int))
    peaks = []
    for idx in range(1, n + 1):
        component = labels == idx
        size = int(component.sum())
        if size < min_size:
            continue
        r, c = ndimage.center_of_mass(component)
        peaks.append(Peak(centroid=(float(r), float(c)), size=size))
    peaks.sort(key=lambda p: -p.size)
    return PeakSummary(peaks)


def field_peaks(net: Network, population: str, window: int = 5,
                min_size: int = 1) -> PeakSummary:
    """Peaks of a field population over its last `window` steps of spikes."""
    pop = net.populations[population]
    union = net.spike_union(population, window).reshape(pop.shape)
    return summarize_peaks(union, min_size=min_size)
