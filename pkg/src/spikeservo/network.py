"""Network graph and deterministic stepped scheduler.

One global timestep runs three phases behind a barrier:

1. propagate -- every projection delivers its delayed source spikes as
   input current on its target (plus any externally injected current);
2. step      -- every population advances once on its accumulated current;
3. record    -- probes capture spikes/voltages, counters update, t += 1.

Population and projection order is the insertion order, so two networks
assembled identically and fed identical spikes produce bit-identical
histories regardless of host parallelism.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from .connections import Projection
from .neurons import Population


class SpikeProbe:
    """Records the indices of spiking neurons of one population per step."""

    def __init__(self, population: str):
        self.population = population
        self.times: list[int] = []
        self.records: list[np.ndarray] = []

    def record(self, t: int, spikes: np.ndarray) -> None:
        self.times.append(t)
        self.records.append(np.flatnonzero(spikes).astype(np.int32))

    def total_spikes(self) -> int:
        return int(sum(len(r) for r in self.records))


class VoltageProbe:
    """Snapshots a population's voltage vector every `every` steps."""

    def __init__(self, population: str, every: int = 1):
        self.population = population
        self.every = max(1, int(every))
        self.times: list[int] = []
        self.records: list[np.ndarray] = []

    def record(self, t: int, v: np.ndarray) -> None:
        if t % self.every == 0:
            self.times.append(t)
            self.records.append(v.copy())


class Network:
    """Directed graph of populations and projections with a step scheduler."""

    def __init__(self):
        self.populations: dict[str, Population] = {}
        self.projections: list[Projection] = []
        self.spike_probes: dict[str, SpikeProbe] = {}
        self.voltage_probes: dict[str, VoltageProbe] = {}
        self.t = 0
        self.spike_count = 0
        self.synop_count = 0
        self._history: dict[str, deque[np.ndarray]] = {}
        self._injected: dict[str, np.ndarray] = {}

    # -- construction ------------------------------------------------------

    def add_population(self, pop: Population) -> Population:
        if pop.name in self.populations:
            raise ValueError(f"duplicate population id {pop.name!r}")
        self.populations[pop.name] = pop
        self._history[pop.name] = deque([np.zeros(pop.size, dtype=bool)], maxlen=1)
        return pop

    def add_projection(self, proj: Projection) -> Projection:
        for end in (proj.source, proj.target):
            if end not in self.populations:
                raise KeyError(f"projection references unknown population {end!r}")
        self.projections.append(proj)
        hist = self._history[proj.source]
        if proj.delay > hist.maxlen:
            grown = deque(hist, maxlen=proj.delay)
            while len(grown) < proj.delay:
                grown.appendleft(np.zeros(self.populations[proj.source].size, dtype=bool))
            self._history[proj.source] = grown
        return proj

    def attach_spike_probe(self, population: str) -> SpikeProbe:
        if population not in self.populations:
            raise KeyError(f"unknown population {population!r}")
        probe = self.spike_probes.setdefault(population, SpikeProbe(population))
        return probe

    def attach_voltage_probe(self, population: str, every: int = 1) -> VoltageProbe:
        if population not in self.populations:
            raise KeyError(f"unknown population {population!r}")
        probe = VoltageProbe(population, every)
        self.voltage_probes[population] = probe
        return probe

    # -- stepping ----------------------------------------------------------

    def inject_current(self, population: str, current) -> None:
        """Add external current to a population on the next step only."""
        pop = self.populations[population]
        current = np.asarray(current, dtype=float).ravel()
        if current.shape != (pop.size,):
            raise ValueError(
                f"injected current for {population!r} has length {current.size}, "
                f"expected {pop.size}")
        if population in self._injected:
            self._injected[population] = self._injected[population] + current
        else:
            self._injected[population] = current.copy()

    def delayed_spikes(self, population: str, delay: int) -> np.ndarray:
        """Spikes the population emitted `delay` steps ago (zeros before t=0)."""
        hist = self._history[population]
        if delay > len(hist):
            return np.zeros(self.populations[population].size, dtype=bool)
        return hist[-delay]

    def propagate(self) -> dict[str, np.ndarray]:
        """Accumulate input currents for every population without stepping."""
        currents = {name: np.zeros(pop.size) for name, pop in self.populations.items()}
        for proj in self.projections:
            spikes = self.delayed_spikes(proj.source, proj.delay)
            if spikes.any():
                currents[proj.target] += proj.propagate(spikes)
        for name, extra in self._injected.items():
            currents[name] += extra
        return currents

    def step(self) -> dict[str, np.ndarray]:
        """Run one global timestep; returns this step's spike vectors."""
        currents = {name: np.zeros(pop.size) for name, pop in self.populations.items()}
        for proj in self.projections:
            spikes = self.delayed_spikes(proj.source, proj.delay)
            if spikes.any():
                currents[proj.target] += proj.propagate(spikes)
                self.synop_count += proj.synops_for(spikes)
        for name, extra in self._injected.items():
            currents[name] += extra
        self._injected.clear()

        out: dict[str, np.ndarray] = {}
        for name, pop in self.populations.items():
            spikes = pop.step(currents[name])
            self._history[name].append(spikes)
            self.spike_count += int(spikes.sum())
            out[name] = spikes

        for name, probe in self.spike_probes.items():
            probe.record(self.t, out[name])
        for name, probe in self.voltage_probes.items():
            probe.record(self.t, self.populations[name].v)

        self.t += 1
        return out

    def run(self, n_steps: int) -> None:
        for _ in range(n_steps):
            self.step()

    # -- analysis helpers --------------------------------------------------

    def spike_union(self, population: str, window: int) -> np.ndarray:
        """Boolean union of the population's spikes over the last `window` steps."""
        pop = self.populations[population]
        hist = self._history[population]
        union = np.zeros(pop.size, dtype=bool)
        for rec in list(hist)[-window:]:
            union |= rec
        return union

    def total_neurons(self) -> int:
        return sum(pop.size for pop in self.populations.values())

    def reset(self) -> None:
        """Reset all population state, histories, clocks and counters."""
        for name, pop in self.populations.items():
            pop.reset()
            hist = self._history[name]
            maxlen = hist.maxlen
            hist.clear()
            for _ in range(maxlen):
                hist.append(np.zeros(pop.size, dtype=bool))
        self._injected.clear()
        self.t = 0
        self.spike_count = 0
        self.synop_count = 0
