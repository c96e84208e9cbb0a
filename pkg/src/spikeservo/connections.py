"""Weighted projections carrying spikes from one population into another.

A projection turns the source population's boolean spike vector (delayed by
``delay`` steps, always >= 1) into input current on the target. Two storage
strategies are used:

* MatrixProjection -- an explicit scipy.sparse matrix, for everything small
  or irregular (one-to-one maps, broadcasts, conv/pool/dense layers).
* KernelProjection -- a recurrent distance kernel on a 2-D field, applied by
  2-D convolution. Materializing these as matrices would cost tens of
  millions of synapses per field, so the kernel patch is kept implicit;
  ``materialize()`` expands it for small fields in tests.

Synaptic-operation accounting is exact in both cases: one synop per nonzero
weight whose source neuron spiked.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import sparse
from scipy.signal import oaconvolve


class KernelKind(Enum):
    GAUSSIAN_SELECTIVE = "gaussian_selective"
    MEXICAN_HAT_MULTIPEAK = "mexican_hat_multipeak"


@dataclass(frozen=True)
class KernelDescriptor:
    """Distance-kernel parameters for a recurrent field interaction.

    Widths are standard deviations in neuron-index units, one per axis
    (rows, cols). The kernel value at index offset (dr, dc) is

        amp_exc * exp(-(dr^2/(2*sx_e^2) + dc^2/(2*sy_e^2)))
      + amp_inh * exp(-(dr^2/(2*sx_i^2) + dc^2/(2*sy_i^2)))

    truncated to zero where the Euclidean offset exceeds cutoff_radius.
    """

    kind: KernelKind
    amp_exc: float
    width_exc: tuple[float, float]
    amp_inh: float = 0.0
    width_inh: tuple[float, float] = (1.0, 1.0)
    cutoff_radius: int = 0

    def __post_init__(self) -> None:
        if min(self.width_exc) <= 0 or min(self.width_inh) <= 0:
            raise ValueError("kernel widths must be positive")
        if self.kind is KernelKind.MEXICAN_HAT_MULTIPEAK:
            if not (self.amp_inh < 0 <= self.amp_exc):
                raise ValueError("mexican-hat kernel requires amp_inh < 0 <= amp_exc")
        if self.cutoff_radius and self.cutoff_radius < max(*self.width_exc, *self.width_inh):
            raise ValueError("cutoff_radius must be at least the largest width")

    def effective_cutoff(self) -> int:
        """Configured cutoff, or 3x the largest width when unset."""
        if self.cutoff_radius:
            return int(self.cutoff_radius)
        return int(np.ceil(3.0 * max(*self.width_exc, *self.width_inh)))


def kernel_patch(desc: KernelDescriptor) -> np.ndarray:
    """Expand a descriptor to its (2R+1, 2R+1) weight patch, R the cutoff."""
    r = desc.effective_cutoff()
    dr = np.arange(-r, r + 1)[:, None].astype(float)
    dc = np.arange(-r, r + 1)[None, :].astype(float)
    sxe, sye = desc.width_exc
    sxi, syi = desc.width_inh
    patch = desc.amp_exc * np.exp(-(dr ** 2 / (2 * sxe ** 2) + dc ** 2 / (2 * sye ** 2)))
    if desc.amp_inh != 0.0:
        patch = patch + desc.amp_inh * np.exp(
            -(dr ** 2 / (2 * sxi ** 2) + dc ** 2 / (2 * syi ** 2)))
    patch[dr ** 2 + dc ** 2 > r ** 2] = 0.0
    return patch


class Projection:
    """Base class: delayed source spikes -> target input current."""

    def __init__(self, source: str, target: str, delay: int = 1):
        if delay < 1:
            raise ValueError(f"projection delay must be >= 1, got {delay}")
        self.source = source
        self.target = target
        self.delay = delay

    def propagate(self, spikes: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def synops_for(self, spikes: np.ndarray) -> int:
        """Number of nonzero weights fanning out from the spiking sources."""
        raise NotImplementedError


class MatrixProjection(Projection):
    """Projection backed by an explicit (n_target, n_source) sparse matrix."""

    def __init__(self, source: str, target: str, weights, delay: int = 1):
        super().__init__(source, target, delay)
        w = sparse.csr_matrix(weights, dtype=float)
        if not np.all(np.isfinite(w.data)):
            raise ValueError(f"{source}->{target}: non-finite weights")
        self.weights = w
        # per-source fanout = nonzeros per column
        self._fanout = np.asarray(w.getnnz(axis=0), dtype=np.int64)

    @property
    def n_source(self) -> int:
        return self.weights.shape[1]

    @property
    def n_target(self) -> int:
        return self.weights.shape[0]

    def propagate(self, spikes: np.ndarray) -> np.ndarray:
        return self.weights @ spikes.astype(float)

    def synops_for(self, spikes: np.ndarray) -> int:
        return int(self._fanout[spikes].sum())

    def dense(self) -> np.ndarray:
        return self.weights.toarray()


class KernelProjection(Projection):
    """Recurrent distance-kernel projection on a 2-D field, applied by
    convolution (the patch is symmetric, so convolution equals correlation).
    Edges are truncated: no wraparound, self-connections included."""

    def __init__(self, field: str, field_shape: tuple[int, int],
                 desc: KernelDescriptor, delay: int = 1):
        super().__init__(field, field, delay)
        self.field_shape = tuple(field_shape)
        if len(self.field_shape) != 2 or min(self.field_shape) <= 0:
            raise ValueError(f"kernel projection needs a positive 2-D field, got {field_shape}")
        self.descriptor = desc
        self.patch = kernel_patch(desc)
        # in-field fanout per source position, for exact synop accounting
        support = (self.patch != 0.0).astype(float)
        fan = oaconvolve(np.ones(self.field_shape), support, mode="same")
        self._fanout = np.rint(fan).astype(np.int64).ravel()

    def propagate(self, spikes: np.ndarray) -> np.ndarray:
        grid = spikes.reshape(self.field_shape).astype(float)
        return oaconvolve(grid, self.patch, mode="same").ravel()

    def synops_for(self, spikes: np.ndarray) -> int:
        return int(self._fanout[spikes].sum())

    def materialize(self) -> np.ndarray:
        """Dense (n, n) weight matrix; only sensible for small fields."""
        rows, cols = self.field_shape
        n = rows * cols
        r = (self.patch.shape[0] - 1) // 2
        w = np.zeros((n, n))
        for sr in range(rows):
            for sc in range(cols):
                src = sr * cols + sc
                r0, r1 = max(0, sr - r), min(rows, sr + r + 1)
                c0, c1 = max(0, sc - r), min(cols, sc + r + 1)
                block = self.patch[r0 - sr + r:r1 - sr + r, c0 - sc + r:c1 - sc + r]
                tgt = (np.arange(r0, r1)[:, None] * cols + np.arange(c0, c1)[None, :]).ravel()
                w[tgt, src] = block.ravel()
        return w


def expand_kernel(desc: KernelDescriptor, field_shape: tuple[int, int],
                  field: str = "field", delay: int = 1) -> KernelProjection:
    """Build the recurrent projection a kernel descriptor defines on a field."""
    return KernelProjection(field, field_shape, desc, delay=delay)


def one_to_one(source: str, target: str, weight: float, n: int,
               delay: int = 1) -> MatrixProjection:
    return MatrixProjection(source, target, sparse.eye(n) * weight, delay=delay)


def all_to_one(source: str, target: str, weight: float, n_source: int,
               delay: int = 1) -> MatrixProjection:
    """Fan-in: every source neuron drives a single-neuron target."""
    return MatrixProjection(source, target,
                            np.full((1, n_source), weight), delay=delay)


def one_to_all(source: str, target: str, weight: float, n_target: int,
               delay: int = 1) -> MatrixProjection:
    """Broadcast: a single-neuron source drives every target neuron."""
    return MatrixProjection(source, target,
                            np.full((n_target, 1), weight), delay=delay)


def from_triplets(source: str, target: str, n_target: int, n_source: int,
                  triplets, delay: int = 1) -> MatrixProjection:
    """Build from (src_index, dst_index, weight) triplets."""
    trip = list(triplets)
    if trip:
        src, dst, w = zip(*trip)
        src = np.asarray(src, dtype=int)
        dst = np.asarray(dst, dtype=int)
        if src.min(initial=0) < 0 or src.max(initial=0) >= n_source:
            raise ValueError(f"{source}->{target}: source index out of range")
        if dst.min(initial=0) < 0 or dst.max(initial=0) >= n_target:
            raise ValueError(f"{source}->{target}: target index out of range")
        mat = sparse.coo_matrix((np.asarray(w, dtype=float), (dst, src)),
                                shape=(n_target, n_source))
    else:
        mat = sparse.coo_matrix((n_target, n_source))
    return MatrixProjection(source, target, mat, delay=delay)
