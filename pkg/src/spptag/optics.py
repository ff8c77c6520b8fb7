"""Signal-arm optics chain: waveform imprinting, sample, split, detection.

Photon loss is modeled as Bernoulli thinning of event streams; nothing here
evolves amplitudes.  The electro-optic modulator acts on the arrival time of
a signal photon relative to its herald: survival probability is the squared
amplitude transmission m(t_rel)^2.  Detectors add efficiency thinning, dark
counts, Gaussian timestamp jitter, and a non-paralyzable dead time.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import DomainError
from .model import PS_PER_NS, BiphotonAmplitude, RngSpec, Shape, TimeTagStream, as_generator, evaluate_density
from .source import PairEvents, PairKind, SourceConfig, generate_pairs, poisson_times

log = logging.getLogger(__name__)


class SignalEvents:
    """Signal-arm photons with their herald (gate trigger) references."""

    def __init__(self, times_ps, herald_ps, kind):
        self.times_ps = np.ascontiguousarray(times_ps, dtype=np.int64)
        self.herald_ps = np.ascontiguousarray(herald_ps, dtype=np.int64)
        self.kind = np.ascontiguousarray(kind, dtype=np.uint8)
        if not (self.times_ps.shape == self.herald_ps.shape == self.kind.shape):
            raise ValueError("column length mismatch")

    @classmethod
    def from_pairs(cls, events: PairEvents) -> "SignalEvents":
        mask = ((events.kind == PairKind.TRUE_PAIR)
                | (events.kind == PairKind.MULTIPAIR_EXTRA)
                | (events.kind == PairKind.BACKGROUND_SIGNAL))
        return cls(events.signal_ps[mask], events.idler_ps[mask], events.kind[mask])

    def t_rel_ns(self) -> np.ndarray:
        """Arrival time relative to the gate trigger [ns]."""
        return (self.times_ps - self.herald_ps) / PS_PER_NS

    def select(self, mask) -> "SignalEvents":
        return SignalEvents(self.times_ps[mask], self.herald_ps[mask], self.kind[mask])

    def __len__(self):
        return int(self.times_ps.size)

    def __eq__(self, other):
        return (isinstance(other, SignalEvents)
                and np.array_equal(self.times_ps, other.times_ps)
                and np.array_equal(self.herald_ps, other.herald_ps)
                and np.array_equal(self.kind, other.kind))


class ModulationKind(enum.Enum):
    IDENTITY = "identity"
    HEAVISIDE = "heaviside"
    GAUSSIAN = "gaussian"
    TABULATED = "tabulated"


class ModulationFunction:
    """Amplitude transmission m(t_rel) programmed on the modulator.

    identity   m = 1 everywhere (modulator removed)
    heaviside  m = 1 for t_rel >= edge, else 0
    gaussian   reshape the source wavepacket toward a Gaussian target; the
               actual drive is derived against the source amplitude when the
               modulation is applied
    tabulated  explicit samples on a time grid, held at the nearer edge value
               outside the grid
    """

    def __init__(self, kind: ModulationKind, edge_ns: float = 0.0,
                 target_fwhm_ns: float = 0.0, target_center_ns: float = 0.0,
                 grid_ns=None, values=None, clipped_mass: float = 0.0):
        self.kind = kind
        self.edge_ns = float(edge_ns)
        self.target_fwhm_ns = float(target_fwhm_ns)
        self.target_center_ns = float(target_center_ns)
        self.grid_ns = None if grid_ns is None else np.asarray(grid_ns, dtype=float)
        self.values = None if values is None else np.asarray(values, dtype=float)
        self.clipped_mass = float(clipped_mass)
        if kind is ModulationKind.GAUSSIAN and target_fwhm_ns <= 0:
            raise ValueError("gaussian modulation needs a positive target fwhm")
        if kind is ModulationKind.TABULATED:
            if self.grid_ns is None or self.values is None:
                raise ValueError("tabulated modulation needs grid and values")
            if self.grid_ns.shape != self.values.shape or self.grid_ns.ndim != 1:
                raise ValueError("grid and values must be 1-d arrays of equal length")
            if self.grid_ns.size < 2 or np.any(np.diff(self.grid_ns) <= 0):
                raise ValueError("grid must be strictly increasing with >= 2 points")
            if np.any(self.values < 0) or np.any(self.values > 1):
                raise ValueError("tabulated amplitudes must lie in [0, 1]")

    @classmethod
    def identity(cls) -> "ModulationFunction":
        return cls(ModulationKind.IDENTITY)

    @classmethod
    def heaviside(cls, edge_ns: float) -> "ModulationFunction":
        return cls(ModulationKind.HEAVISIDE, edge_ns=edge_ns)

    @classmethod
    def gaussian_target(cls, fwhm_ns: float, center_ns: float = 0.0) -> "ModulationFunction":
        return cls(ModulationKind.GAUSSIAN, target_fwhm_ns=fwhm_ns,
                   target_center_ns=center_ns)

    @classmethod
    def tabulated(cls, grid_ns, values, clipped_mass: float = 0.0) -> "ModulationFunction":
        return cls(ModulationKind.TABULATED, grid_ns=grid_ns, values=values,
                   clipped_mass=clipped_mass)

    def amplitude(self, t_rel_ns) -> np.ndarray:
        """Transmission amplitude in [0, 1] at herald-relative times [ns]."""
        t = np.asarray(t_rel_ns, dtype=float)
        if self.kind is ModulationKind.IDENTITY:
            return np.ones_like(t)
        if self.kind is ModulationKind.HEAVISIDE:
            return (t >= self.edge_ns).astype(float)
        if self.kind is ModulationKind.TABULATED:
            return np.interp(t, self.grid_ns, self.values)
        raise ValueError("gaussian modulation must be resolved against a "
                         "source amplitude before evaluation")

    def __eq__(self, other):
        if not isinstance(other, ModulationFunction):
            return NotImplemented
        if self.kind is not other.kind:
            return False
        same_grid = ((self.grid_ns is None and other.grid_ns is None)
                     or (self.grid_ns is not None and other.grid_ns is not None
                         and np.array_equal(self.grid_ns, other.grid_ns)
                         and np.array_equal(self.values, other.values)))
        return (same_grid
                and self.edge_ns == other.edge_ns
                and self.target_fwhm_ns == other.target_fwhm_ns
                and self.target_center_ns == other.target_center_ns)

    def __repr__(self):
        return f"ModulationFunction({self.kind.value})"


def derive_modulation_for_target(input_amp: BiphotonAmplitude,
                                 target_amp: BiphotonAmplitude,
                                 grid_ns) -> ModulationFunction:
    """Drive that reshapes the input delay density toward a target density.

    The pointwise amplitude is sqrt(target / (M * input)) with M the maximum
    density ratio on the grid, so the drive peaks at exactly 1 and the
    surviving fraction is 1/M.  Target mass sitting where the input density
    vanishes cannot be produced by attenuation and is reported as
    clipped_mass on the returned function.
    """
    grid = np.asarray(grid_ns, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing with >= 2 points")
    f_in = evaluate_density(input_amp, grid)
    f_target = evaluate_density(target_amp, grid)
    reachable = f_in > 0.0
    if not reachable.any():
        raise ValueError("input density vanishes on the whole grid")
    ratio = np.zeros_like(f_target)
    ratio[reachable] = f_target[reachable] / f_in[reachable]
    m_max = ratio.max()
    if m_max <= 0.0:
        raise ValueError("target density vanishes on the whole grid")
    values = np.sqrt(ratio / m_max)
    clipped = float(np.trapezoid(np.where(reachable, 0.0, f_target), grid))
    if clipped > 1e-6:
        log.warning("target waveform has %.3g unreachable mass", clipped)
    return ModulationFunction.tabulated(grid, np.clip(values, 0.0, 1.0),
                                        clipped_mass=clipped)


def resolve_modulation(modulation: ModulationFunction,
                       source_amp: BiphotonAmplitude) -> ModulationFunction:
    """Replace a gaussian-target modulation by its derived tabulated drive."""
    if modulation.kind is not ModulationKind.GAUSSIAN:
        return modulation
    target = BiphotonAmplitude(Shape.GAUSSIAN, modulation.target_fwhm_ns,
                               offset_ns=modulation.target_center_ns)
    span = 6.0 * max(source_amp.fwhm_ns, modulation.target_fwhm_ns)
    lo = min(source_amp.offset_ns, modulation.target_center_ns) - span
    hi = max(source_amp.offset_ns, modulation.target_center_ns) + span
    grid = np.arange(lo, hi + 0.05, 0.1)
    return derive_modulation_for_target(source_amp, target, grid)


def apply_modulation(events: SignalEvents, modulation: ModulationFunction,
                     rng: RngSpec | np.random.Generator,
                     source_amp: BiphotonAmplitude | None = None) -> SignalEvents:
    """Bernoulli-thin signal photons with probability m(t_rel)^2.

    Identity passes the stream through untouched without consuming random
    numbers.  A gaussian-target modulation requires source_amp to derive the
    actual drive.
    """
    if modulation.kind is ModulationKind.IDENTITY:
        return events
    if modulation.kind is ModulationKind.GAUSSIAN:
        if source_amp is None:
            raise ValueError("gaussian modulation needs the source amplitude")
        modulation = resolve_modulation(modulation, source_amp)
    gen = as_generator(rng)
    t_rel = events.t_rel_ns()
    if modulation.kind is ModulationKind.TABULATED:
        outside = ((t_rel < modulation.grid_ns[0]) | (t_rel > modulation.grid_ns[-1]))
        n_out = int(np.count_nonzero(outside))
        if n_out:
            log.warning("%d events outside the modulation grid held at edge values", n_out)
    p = modulation.amplitude(t_rel) ** 2
    keep = gen.random(len(events)) < p
    return events.select(keep)


@dataclass(frozen=True)
class SampleConfig:
    """Photon-plasmon-photon conversion element in the signal arm.

    spectrum               transmission spectrum of the structure, used to
                           check the photon wavelength sits in a characterized
                           region (None skips the check)
    photon_wavelength_nm   carrier wavelength of the signal photons
    overall_conversion     end-to-end survival probability at the carrier
    background_suppression extra factor applied to broadband background only
    """

    photon_wavelength_nm: float
    overall_conversion: float
    background_suppression: float = 1.0
    spectrum: object | None = None

    def __post_init__(self):
        if self.photon_wavelength_nm <= 0:
            raise ValueError("wavelength must be positive")
        if not 0.0 <= self.overall_conversion <= 1.0:
            raise ValueError("overall_conversion must lie in [0, 1]")
        if not 0.0 <= self.background_suppression <= 1.0:
            raise ValueError("background_suppression must lie in [0, 1]")


def apply_sample(events: SignalEvents, sample: SampleConfig,
                 rng: RngSpec | np.random.Generator) -> SignalEvents:
    """Thin the stream through the sample.

    Pair photons survive with overall_conversion; broadband background gets
    an extra background_suppression factor (narrower spectral acceptance).
    """
    if sample.spectrum is not None:
        wl = sample.spectrum.wavelength_nm
        if not (wl[0] <= sample.photon_wavelength_nm <= wl[-1]):
            raise DomainError(
                f"photon wavelength {sample.photon_wavelength_nm} nm outside "
                f"the characterized spectrum [{wl[0]}, {wl[-1]}] nm")
    gen = as_generator(rng)
    p = np.full(len(events), sample.overall_conversion)
    bg = events.kind == PairKind.BACKGROUND_SIGNAL
    p[bg] *= sample.background_suppression
    keep = gen.random(len(events)) < p
    return events.select(keep)


def beamsplit(events: SignalEvents, ratio: float,
              rng: RngSpec | np.random.Generator) -> tuple[SignalEvents, SignalEvents]:
    """Split a stream on a beamsplitter; ratio is the probability of arm A."""
    if not 0.0 <= ratio <= 1.0:
        raise ValueError("split ratio must lie in [0, 1]")
    gen = as_generator(rng)
    to_a = gen.random(len(events)) < ratio
    return events.select(to_a), events.select(~to_a)


@dataclass(frozen=True)
class DetectorConfig:
    """Single-photon detector response."""

    efficiency: float = 0.5
    dark_rate: float = 100.0          # [1/s]
    jitter_sigma_ps: float = 350.0
    dead_time_ps: int = 50_000

    def __post_init__(self):
        if not 0.0 <= self.efficiency <= 1.0:
            raise ValueError("efficiency must lie in [0, 1]")
        if self.dark_rate < 0 or self.jitter_sigma_ps < 0 or self.dead_time_ps < 0:
            raise ValueError("detector parameters must be nonnegative")


def detect(times_ps: np.ndarray, detector: DetectorConfig, channel: int,
           duration_ps: int, rng: RngSpec | np.random.Generator) -> TimeTagStream:
    """Turn photon arrival times into detector tags on one channel.

    Acceptance and jitter variates are drawn for every input photon, so
    raising the efficiency with the same stream keeps every previously kept
    photon (coupled draws); dead time then acts on the surviving physical
    order.  Dark counts are Poisson on [0, duration] and share the dead time.
    """
    gen = as_generator(rng)
    times = np.asarray(times_ps, dtype=np.int64)
    if times.size and np.any(np.diff(times) < 0):
        raise ValueError("input photon times must be sorted")
    u_accept = gen.random(times.size)
    u_jitter = gen.random(times.size)
    kept = times[u_accept < detector.efficiency]
    jitter = u_jitter[u_accept < detector.efficiency]
    darks = poisson_times(detector.dark_rate, 0, duration_ps, gen)
    physical = np.concatenate([kept, darks])
    order = np.argsort(physical, kind="stable")
    physical = physical[order]
    jitter_u = np.concatenate([jitter, np.full(darks.size, 0.5)])[order]
    alive = _dead_time_filter_mask(physical, detector.dead_time_ps)
    physical = physical[alive]
    jitter_u = jitter_u[alive]
    if detector.jitter_sigma_ps > 0:
        u = np.clip(jitter_u, 1e-15, 1.0 - 1e-15)
        shift = np.rint(detector.jitter_sigma_ps * special.ndtri(u)).astype(np.int64)
        physical = physical + shift
    inside = (physical >= 0) & (physical <= duration_ps)
    reported = np.sort(physical[inside])
    return TimeTagStream(reported, np.full(reported.size, channel, dtype=np.uint8),
                         duration_ps)


def _dead_time_filter_mask(times: np.ndarray, dead_ps: int) -> np.ndarray:
    """Boolean keep mask version of the dead-time filter."""
    if dead_ps <= 0 or times.size <= 1:
        return np.ones(times.size, dtype=bool)
    gaps = np.diff(times)
    keep = np.empty(times.size, dtype=bool)
    keep[0] = True
    keep[1:] = gaps >= dead_ps
    if keep.all():
        return keep
    contested = np.flatnonzero(~keep)
    runs = np.split(contested, np.flatnonzero(np.diff(contested) > 1) + 1)
    for run in runs:
        last = times[run[0] - 1]
        for i in run:
            if times[i] - last >= dead_ps:
                keep[i] = True
                last = times[i]
    return keep


@dataclass(frozen=True)
class ExperimentConfig:
    """Full physical chain: source, modulator, sample, split, three detectors.

    Detector 0 watches the idler (herald) arm; detectors 1 and 2 watch the
    two beamsplitter outputs of the signal arm.
    """

    source: SourceConfig
    modulation: ModulationFunction = field(default_factory=ModulationFunction.identity)
    sample: SampleConfig = SampleConfig(795.0, 1.0, 1.0)
    detectors: tuple[DetectorConfig, DetectorConfig, DetectorConfig] = (
        DetectorConfig(efficiency=1.0, dark_rate=0.0),
        DetectorConfig(),
        DetectorConfig(),
    )
    split_ratio: float = 0.5


def run_experiment(config: ExperimentConfig, duration_ps: int, rng: RngSpec,
                   segments: int = 1) -> TimeTagStream:
    """Simulate the whole bench and return the merged three-channel stream.

    Stages draw from fixed child streams of rng (generation, modulation,
    sample, beamsplitter, one per detector), so any stage's draws are
    unaffected by parameter changes upstream that keep event counts fixed.
    """
    pairs = generate_pairs(config.source, duration_ps, rng.child(0), segments=segments)
    signal = SignalEvents.from_pairs(pairs)
    signal = apply_modulation(signal, config.modulation, rng.child(1),
                              source_amp=config.source.amplitude)
    signal = apply_sample(signal, config.sample, rng.child(2))
    arm_a, arm_b = beamsplit(signal, config.split_ratio, rng.child(3))
    herald_times = pairs.idler_arm_times()
    s0 = detect(herald_times, config.detectors[0], 0, duration_ps, rng.child(4))
    s1 = detect(np.sort(arm_a.times_ps), config.detectors[1], 1, duration_ps, rng.child(5))
    s2 = detect(np.sort(arm_b.times_ps), config.detectors[2], 2, duration_ps, rng.child(6))
    return TimeTagStream.from_channel_times(
        {0: s0.times_ps, 1: s1.times_ps, 2: s2.times_ps}, duration_ps)
