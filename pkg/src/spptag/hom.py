"""Two-photon interference of independently delayed wavepackets.

Coincidence probability behind a balanced beamsplitter for two photons with
real amplitude psi (the square root of the delay density), relative arm
delay delta, and carrier detuning Delta:

    P_c(Delta, delta) = 1/2 * (1 - Re I / N)
    I = integral psi(tau + delta) psi(delta - tau) cos(Delta tau) dtau
    N = integral psi(tau)^2 dtau

Everything is evaluated by adaptive quadrature, split at the kinks of the
amplitude so the integrator only ever sees smooth pieces; oscillatory
integrands use the cosine-weighted rule.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .errors import FitError
from .model import BiphotonAmplitude, Shape, evaluate_density

TWO_PI_MHZ_TO_RAD_PER_NS = 2.0 * np.pi * 1e-3


def _psi(amp: BiphotonAmplitude, t):
    return np.sqrt(evaluate_density(amp, t))


def _kinks(amp: BiphotonAmplitude, delay_ns: float) -> list[float]:
    """Points where the product psi(tau+d) psi(d-tau) is not smooth."""
    if amp.shape is Shape.GAUSSIAN:
        return []
    o = amp.offset_ns
    return sorted({o - delay_ns, delay_ns - o})


def _support(amp: BiphotonAmplitude, delay_ns: float) -> tuple[float, float] | None:
    """Interval where the product can be nonzero; None when it vanishes."""
    span = 30.0 * amp.fwhm_ns + abs(delay_ns - amp.offset_ns)
    lo, hi = -span, span
    if amp.shape is Shape.EXPONENTIAL_DECAY:
        # psi(tau+d) needs tau >= o-d, psi(d-tau) needs tau <= d-o
        lo = amp.offset_ns - delay_ns
        hi = delay_ns - amp.offset_ns
        if hi <= lo:
            return None
    return lo, hi


def hom_coincidence(amp: BiphotonAmplitude, detuning_mhz: float,
                    delay_ns: float = 0.0) -> float:
    """Coincidence probability P_c for one detuning and arm delay.

    detuning_mhz may be inf, giving the distinguishable-photon value 1/2.
    """
    if np.isinf(detuning_mhz):
        return 0.5
    omega = detuning_mhz * TWO_PI_MHZ_TO_RAD_PER_NS
    support = _support(amp, delay_ns)
    if support is None:
        return 0.5
    lo, hi = support
    pieces = [lo] + [k for k in _kinks(amp, delay_ns) if lo < k < hi] + [hi]

    def product(t):
        return _psi(amp, t + delay_ns) * _psi(amp, delay_ns - t)

    num = 0.0
    for a, b in zip(pieces[:-1], pieces[1:]):
        if omega == 0.0:
            val, _ = integrate.quad(product, a, b, limit=200,
                                    epsabs=1e-11, epsrel=1e-10)
        else:
            val, _ = integrate.quad(product, a, b, weight="cos", wvar=omega,
                                    limit=200, epsabs=1e-11)
        num += val

    if amp.shape is Shape.EXPONENTIAL_DECAY:
        n_lo, n_hi = amp.offset_ns, amp.offset_ns + 30.0 * amp.fwhm_ns
        points = None
    else:
        n_lo, n_hi = (amp.offset_ns - 30.0 * amp.fwhm_ns,
                      amp.offset_ns + 30.0 * amp.fwhm_ns)
        points = [amp.offset_ns]
    den, _ = integrate.quad(lambda t: evaluate_density(amp, t), n_lo, n_hi,
                            points=points, limit=200, epsabs=1e-11, epsrel=1e-10)
    return 0.5 * (1.0 - num / den)


def hom_visibility(amp: BiphotonAmplitude, delay_ns: float = 0.0) -> float:
    """Dip visibility V = 1 - 2 P_c(0, delay)."""
    return 1.0 - 2.0 * hom_coincidence(amp, 0.0, delay_ns)


@dataclass
class HomCurve:
    """Coincidence probability versus carrier detuning at fixed arm delay."""

    detunings_mhz: np.ndarray
    coincidence: np.ndarray
    delay_ns: float


def hom_curve(amp: BiphotonAmplitude, detunings_mhz,
              delay_ns: float = 0.0) -> HomCurve:
    det = np.asarray(detunings_mhz, dtype=float)
    pc = np.array([hom_coincidence(amp, d, delay_ns) for d in det])
    return HomCurve(det, pc, float(delay_ns))


def hom_similarity(a: HomCurve, b: HomCurve) -> float:
    """Cosine similarity of two coincidence curves on one detuning grid."""
    if a.detunings_mhz.shape != b.detunings_mhz.shape or \
            not np.allclose(a.detunings_mhz, b.detunings_mhz):
        raise ValueError("curves live on different detuning grids")
    norm = np.linalg.norm(a.coincidence) * np.linalg.norm(b.coincidence)
    if norm == 0:
        raise ValueError("cosine similarity undefined for a zero curve")
    return float(np.dot(a.coincidence, b.coincidence) / norm)


def fit_coherence_time(delays_ns, visibilities, shape: Shape,
                       errors=None, initial_fwhm_ns: float | None = None
                       ) -> tuple[float, float]:
    """Least-squares FWHM from measured visibility-versus-delay points.

    Returns (fwhm_ns, standard error).  The model is hom_visibility for the
    given shape with the density centered at zero delay.
    """
    delays = np.asarray(delays_ns, dtype=float)
    vis = np.asarray(visibilities, dtype=float)
    if delays.size != vis.size or delays.size < 2:
        raise FitError("need at least two visibility points")
    if initial_fwhm_ns is None:
        initial_fwhm_ns = max(2.0 * float(np.mean(np.abs(delays))), 1.0)

    def model(d, fwhm):
        amp = BiphotonAmplitude(shape, fwhm)
        return np.array([hom_visibility(amp, x) for x in np.atleast_1d(d)])

    try:
        popt, pcov = optimize.curve_fit(
            model, delays, vis, p0=[initial_fwhm_ns], sigma=errors,
            absolute_sigma=errors is not None, maxfev=200)
    except (RuntimeError, ValueError) as exc:
        raise FitError(f"coherence-time fit failed: {exc}") from exc
    fwhm = float(popt[0])
    err = float(np.sqrt(pcov[0, 0])) if np.isfinite(pcov[0, 0]) else np.inf
    if fwhm <= 0:
        raise FitError("fit converged to a nonpositive width")
    return fwhm, err
