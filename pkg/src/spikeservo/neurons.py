"""Discrete-time leaky integrate-and-fire neuron populations.

All populations in the simulator share one update rule, evaluated once per
global timestep on vectorized state:

    u(t) = u(t-1) * (1 - du/4096) + a_in
    v(t) = v(t-1) * (1 - dv/4096) + u(t) + b
    spike iff v(t) >= vth, after which v is reset to zero

The decay terms du and dv are 12-bit codes (0 = no decay, 4096 = full decay),
matching the convention of neuromorphic fixed-point hardware. The reset acts
within the same step: a spiking neuron stores v = 0 and re-integrates from
zero on the next step, so a tonically biased neuron can fire every step.

Model variants:

* LIF          -- the plain rule above.
* LIF_RESET    -- voltage is forced to zero at the end of every step whether
                  or not the neuron fired; the membrane acts as a one-step
                  coincidence detector over its input current.
* LIF_REFRACTORY -- after a spike the voltage is clamped to zero for
                  `refractory_delay` steps and the neuron cannot fire.
                  Current continues to integrate during the hold; bias does
                  not accumulate into the clamped voltage.
* GRADED_RELAY -- LIF_RESET dynamics, but the spike carries a magnitude:
                  the pre-reset voltage divided by the threshold. Used by
                  the selective field's intermediary inhibitor, which must
                  relay how much total activity it summed, not merely that
                  it crossed threshold.
* SOURCE       -- spikes are staged externally (event input, user input);
                  membrane state is unused.

Populations emit spike *values*: 0/1 floats for the binary models, graded
magnitudes for GRADED_RELAY. Downstream weights multiply these values.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

DECAY_SCALE = 4096

# Synaptic weights and thresholds are expressed here in plain weight units.
# Bias codes (mantissa, exponent) follow the fixed-point convention in which
# weights and thresholds carry an implicit 2^6 hardware scale that plain
# float arithmetic does not, so the effective bias is mant * 2^(exp - 6).
# Example: mant=1, exp=7 gives an effective bias of 2 against thresholds
# quoted in weight units.
BIAS_EXP_SHIFT = 6


class NeuronModel(Enum):
    LIF = "lif"
    LIF_RESET = "lif_reset"
    LIF_REFRACTORY = "lif_refractory"
    GRADED_RELAY = "graded_relay"
    SOURCE = "source"


@dataclass(frozen=True)
class NeuronParams:
    """Shared parameters for every neuron of a population."""

    du: int = 4095
    dv: int = 4095
    vth: float = 1.0
    bias_mant: int = 0
    bias_exp: int = 0
    refractory_delay: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.du <= DECAY_SCALE:
            raise ValueError(f"du must be in [0, {DECAY_SCALE}], got {self.du}")
        if not 0 <= self.dv <= DECAY_SCALE:
            raise ValueError(f"dv must be in [0, {DECAY_SCALE}], got {self.dv}")
        if not self.vth > 0:
            raise ValueError(f"vth must be positive, got {self.vth}")
        if self.refractory_delay < 0:
            raise ValueError("refractory_delay must be >= 0")

    @property
    def bias(self) -> float:
        """Effective bias in weight units (see BIAS_EXP_SHIFT)."""
        return self.bias_mant * 2.0 ** (self.bias_exp - BIAS_EXP_SHIFT)

    @property
    def u_keep(self) -> float:
        return 1.0 - self.du / DECAY_SCALE

    @property
    def v_keep(self) -> float:
        return 1.0 - self.dv / DECAY_SCALE


def _normalize_shape(shape) -> tuple[int, ...]:
    if isinstance(shape, int):
        if shape <= 0:
            raise ValueError(f"population size must be positive, got {shape}")
        return (shape,)
    shape = tuple(int(s) for s in shape)
    if len(shape) not in (1, 2) or any(s <= 0 for s in shape):
        raise ValueError(f"population shape must be a positive int or pair, got {shape}")
    return shape


class Population:
    """A group of neurons sharing one model variant and one parameter set.

    State vectors are flat float64/int arrays of length ``size``; 2-D
    populations use row-major flattening of their (rows, cols) shape.
    """

    def __init__(self, name: str, shape, model: NeuronModel,
                 params: NeuronParams | None = None):
        self.name = name
        self.shape = _normalize_shape(shape)
        self.size = int(np.prod(self.shape))
        self.model = model
        self.params = params if params is not None else NeuronParams()
        if model is NeuronModel.LIF_REFRACTORY and self.params.refractory_delay == 0:
            raise ValueError(f"{name}: LIF_REFRACTORY requires refractory_delay > 0")
        self.u = np.zeros(self.size)
        self.v = np.zeros(self.size)
        self.refrac_remaining = np.zeros(self.size, dtype=np.int32)
        self.last_spikes = np.zeros(self.size, dtype=bool)
        self._staged = np.zeros(self.size, dtype=bool)

    def __repr__(self) -> str:
        return f"Population({self.name!r}, shape={self.shape}, model={self.model.value})"

    def reset(self) -> None:
        """Zero all state: u, v, refractory counters, and spike flags."""
        self.u[:] = 0.0
        self.v[:] = 0.0
        self.refrac_remaining[:] = 0
        self.last_spikes[:] = False
        self._staged[:] = False

    def stage_spikes(self, spikes) -> None:
        """Set the spike pattern a SOURCE population emits on its next step."""
        if self.model is not NeuronModel.SOURCE:
            raise ValueError(f"{self.name}: stage_spikes is only valid for SOURCE populations")
        spikes = np.asarray(spikes, dtype=bool).ravel()
        if spikes.shape != (self.size,):
            raise ValueError(
                f"{self.name}: staged spikes have length {spikes.size}, expected {self.size}")
        self._staged[:] = spikes

    def step(self, a_in) -> np.ndarray:
        """Advance one timestep with input current `a_in`; return spike vector."""
        a_in = np.asarray(a_in, dtype=float).ravel()
        if a_in.shape != (self.size,):
            raise ValueError(
                f"{self.name}: input current has length {a_in.size}, expected {self.size}")

        if self.model is NeuronModel.SOURCE:
            spikes = self._staged.copy()
            self._staged[:] = False
            self.last_spikes = spikes
            return spikes

        if not np.all(np.isfinite(a_in)):
            raise FloatingPointError(f"{self.name}: non-finite input current")

        p = self.params
        self.u *= p.u_keep
        self.u += a_in

        if self.model is NeuronModel.LIF_REFRACTORY:
            held = self.refrac_remaining > 0
            self.v *= p.v_keep
            self.v += self.u
            self.v += p.bias
            self.v[held] = 0.0
            spikes = self.v >= p.vth
            spikes &= ~held
            self.v[spikes] = 0.0
            self.refrac_remaining[held] -= 1
            self.refrac_remaining[spikes] = p.refractory_delay
        else:
            self.v *= p.v_keep
            self.v += self.u
            self.v += p.bias
            spikes = self.v >= p.vth
            self.v[spikes] = 0.0
            if self.model is NeuronModel.LIF_RESET:
                self.v[:] = 0.0

        if not np.all(np.isfinite(self.v)):
            raise FloatingPointError(f"{self.name}: non-finite voltage state")

        self.last_spikes = spikes
        return spikes

    def spikes_2d(self) -> np.ndarray:
        """Last spike vector reshaped to the population's 2-D layout."""
        if len(self.shape) != 2:
            raise ValueError(f"{self.name} is not a 2-D population")
        return self.last_spikes.reshape(self.shape)
