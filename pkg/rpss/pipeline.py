"""
QPP-RNG pipeline: modular reduction of cycle observables, byte assembly
and per-cycle feedback reseeding of the engine rng.

The primary output is n_p mod R; t mod R is exposed as a probe. After every
cycle the pipeline seed is mixed with that cycle's raw tick total and the
engine rng restarts from the result, closing the feedback loop.
"""
import logging
from dataclasses import dataclass

import numpy as np

from rpss.engine import SortingEngine
from rpss.exceptions import ConfigurationError
from rpss.models import BYTE_ASSEMBLY_BITS, OutputSource, PipelineState
from rpss.rng import WORD_MASK, Pcg64Rng
from rpss.timers import PerfCounterTimer, SimulatedTimer

logger = logging.getLogger(__name__)

GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MIX_MULTIPLIER_1 = 0xBF58476D1CE4E5B9
MIX_MULTIPLIER_2 = 0x94D049BB133111EB


def reduce(sample, modulus):
    """(n_p mod R, t_ticks mod R)"""
    if modulus < 2:
        raise ConfigurationError(f"modulus must be >= 2, got {modulus}")
    return sample.n_p % modulus, sample.t_ticks % modulus


def _check_bits(bits):
    if bits not in BYTE_ASSEMBLY_BITS:
        raise ConfigurationError(f"bits must be one of {BYTE_ASSEMBLY_BITS}, got {bits}")


def assemble_bytes(residues, bits):
    """
    Pack 8/bits residues per byte, first residue in the high bits.

    A trailing incomplete group is dropped.
    """
    _check_bits(bits)
    per_byte = 8 // bits
    values = np.asarray(residues, dtype=np.int64)
    if values.size and (values.min() < 0 or values.max() >= 1 << bits):
        raise ConfigurationError(f"residues must lie in [0, {1 << bits})")
    usable = values.size - values.size % per_byte
    groups = values[:usable].reshape(-1, per_byte)
    shifts = bits * np.arange(per_byte - 1, -1, -1)
    packed = np.sum(groups << shifts, axis=1)
    return packed.astype(np.uint8).tobytes()


def disassemble_bytes(data, bits):
    """Split each byte back into 8/bits residues, high bits first."""
    _check_bits(bits)
    per_byte = 8 // bits
    values = np.frombuffer(bytes(data), dtype=np.uint8).astype(np.int64)
    shifts = bits * np.arange(per_byte - 1, -1, -1)
    mask = (1 << bits) - 1
    return ((values[:, None] >> shifts) & mask).reshape(-1).tolist()


def reseed(seed, eta):
    """
    s_{k+1} = h(s_k, eta_k): 64-bit multiply-xorshift finalizer of
    s_k ^ (eta_k * golden gamma). Zero maps to zero.
    """
    z = (seed ^ (eta * GOLDEN_GAMMA)) & WORD_MASK
    z = ((z ^ (z >> 30)) * MIX_MULTIPLIER_1) & WORD_MASK
    z = ((z ^ (z >> 27)) * MIX_MULTIPLIER_2) & WORD_MASK
    return z ^ (z >> 31)


@dataclass(frozen=True)
class ProbeResult:
    """Both residue streams of a probe run plus the mean per-trial tick."""
    n_residues: tuple
    t_residues: tuple
    mean_trial_ticks: float

    def as_dict(self):
        return {
            'cycles': len(self.n_residues),
            'mean_trial_ticks': self.mean_trial_ticks,
        }


class QppRng:
    """
    One generator stream: a PipelineState driving a SortingEngine.

    Deterministic in simulated mode given (s_0, engine seed, timer seed).
    """

    def __init__(self, state, engine):
        if state.cfg != engine.cfg:
            raise ConfigurationError("pipeline and engine configurations differ")
        self.state = state
        self.engine = engine

    @property
    def cfg(self):
        return self.state.cfg

    def next_cycle(self):
        """Run one cycle; return (sample, n residue, t residue)."""
        sample = self.engine.run_cycle()
        n_residue, t_residue = reduce(sample, self.cfg.modulus)
        if self.state.reseed_enabled:
            self.state.seed = reseed(self.state.seed, sample.t_ticks)
            self.engine.rng.reseed(self.state.seed)
        self.state.cycle_index += 1
        return sample, n_residue, t_residue

    def residues(self, count):
        """count residues of the selected observable."""
        out = []
        elapsed = self.state.source_select is OutputSource.ELAPSED
        for _ in range(count):
            _, n_residue, t_residue = self.next_cycle()
            out.append(t_residue if elapsed else n_residue)
        return out

    def generate(self, byte_count):
        bits = self.cfg.output_bits
        if bits is None:
            raise ConfigurationError("byte output needs output_bits with modulus 2^bits")
        if byte_count < 0:
            raise ConfigurationError(f"byte_count must be >= 0, got {byte_count}")
        start_cycle = self.state.cycle_index
        data = assemble_bytes(self.residues(byte_count * (8 // bits)), bits)
        logger.info(
            f"Generated {len(data)} bytes from {self.state.cycle_index - start_cycle} cycles "
            f"(source {self.state.source_select.value}, reseed {self.state.reseed_enabled})"
        )
        return data

    def switch_jitter(self, model):
        """Swap the simulated jitter law mid-stream."""
        timer = self.engine.timer
        if not isinstance(timer, SimulatedTimer):
            raise ConfigurationError("jitter can only be switched on a simulated timer")
        logger.info(f"Switching jitter law at cycle {self.state.cycle_index}: mean {model.mean:.4f}")
        timer.set_model(model)

    def probe(self, cycles):
        """Both residue streams side by side for perturbation studies."""
        n_residues = []
        t_residues = []
        total_ticks = 0
        total_trials = 0
        for _ in range(cycles):
            sample, n_residue, t_residue = self.next_cycle()
            n_residues.append(n_residue)
            t_residues.append(t_residue)
            total_ticks += sample.t_ticks
            total_trials += sample.n_p
        mean = total_ticks / total_trials if total_trials else 0.0
        return ProbeResult(tuple(n_residues), tuple(t_residues), mean)


def generate(state, engine, byte_count):
    return QppRng(state, engine).generate(byte_count)


def build_simulated(cfg, jitter, engine_seed, timer_seed, pipeline_seed,
                    reseed_enabled=True, source=OutputSource.PERMUTATIONS):
    engine = SortingEngine(cfg, Pcg64Rng(engine_seed), SimulatedTimer(jitter, timer_seed))
    state = PipelineState(
        seed=pipeline_seed,
        cfg=cfg,
        source_select=source,
        reseed_enabled=reseed_enabled,
    )
    return QppRng(state, engine)


def build_real(cfg, engine_seed, pipeline_seed, reseed_enabled=True,
               source=OutputSource.PERMUTATIONS):
    engine = SortingEngine(cfg, Pcg64Rng(engine_seed), PerfCounterTimer())
    state = PipelineState(
        seed=pipeline_seed,
        cfg=cfg,
        source_select=source,
        reseed_enabled=reseed_enabled,
    )
    return QppRng(state, engine)
