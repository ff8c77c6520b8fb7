"""Transmission spectra of subwavelength hole arrays in metal films.

Three ingredients:

* direct (non-resonant) transmission of a single small hole and of a square
  array of them, in the small-hole limit,
* surface-plasmon grating resonances of the array for either interface,
* a Fano lineshape that superposes the resonant channel on the direct one.
"""
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
import scipy.optimize

from . import _gold
from .errors import DomainError, FitError

EPSILON_AIR = 1.0
EPSILON_GLASS = 2.25

_INTERFACES = {"air": EPSILON_AIR, "glass": EPSILON_GLASS}


@dataclass(frozen=True)
class PermittivityTable:
    """Tabulated complex metal permittivity vs wavelength [nm], ascending."""

    wavelength_nm: np.ndarray
    epsilon: np.ndarray

    def __post_init__(self):
        wl = np.asarray(self.wavelength_nm, dtype=float)
        eps = np.asarray(self.epsilon, dtype=complex)
        if wl.ndim != 1 or wl.size < 2 or eps.shape != wl.shape:
            raise ValueError("need matching 1-d wavelength and epsilon arrays")
        if not np.all(np.diff(wl) > 0):
            raise ValueError("wavelengths must be strictly increasing")
        object.__setattr__(self, "wavelength_nm", wl)
        object.__setattr__(self, "epsilon", eps)

    @classmethod
    def gold(cls) -> "PermittivityTable":
        return cls(_gold.GOLD_WAVELENGTH_NM.copy(), _gold.GOLD_EPSILON.copy())

    def permittivity(self, wavelength_nm):
        wl = np.asarray(wavelength_nm, dtype=float)
        lo, hi = self.wavelength_nm[0], self.wavelength_nm[-1]
        if np.any(wl < lo) or np.any(wl > hi):
            raise DomainError(
                f"wavelength outside tabulated range [{lo:.1f}, {hi:.1f}] nm"
            )
        # interpolate the permittivity itself, not (n, k)
        re = np.interp(wl, self.wavelength_nm, self.epsilon.real)
        im = np.interp(wl, self.wavelength_nm, self.epsilon.imag)
        out = re + 1j * im
        return complex(out) if np.isscalar(wavelength_nm) else out


_GOLD_TABLE: Optional[PermittivityTable] = None


def gold_permittivity(wavelength_nm):
    """Complex permittivity of evaporated gold at the given wavelength [nm]."""
    global _GOLD_TABLE
    if _GOLD_TABLE is None:
        _GOLD_TABLE = PermittivityTable.gold()
    return _GOLD_TABLE.permittivity(wavelength_nm)


@dataclass(frozen=True)
class ArrayGeometry:
    """Square hole array: pitch and hole diameter set the optics.

    Film thickness and sidewall taper are fabrication descriptors carried for
    bookkeeping; the small-hole formulas below do not use them.
    """

    pitch_nm: float = 430.0
    hole_diameter_nm: float = 200.0
    film_thickness_nm: float = 100.0
    taper_angle_deg: float = 17.0

    def __post_init__(self):
        if not 0 < self.hole_diameter_nm < self.pitch_nm:
            raise ValueError("need 0 < hole diameter < pitch")
        if self.film_thickness_nm <= 0:
            raise ValueError("film thickness must be positive")
        if not 0 <= self.taper_angle_deg < 45:
            raise ValueError("taper angle out of range [0, 45)")

    @property
    def hole_radius_nm(self) -> float:
        return 0.5 * self.hole_diameter_nm

    @property
    def open_area_fraction(self) -> float:
        return np.pi * self.hole_radius_nm**2 / self.pitch_nm**2


def bethe_hole_transmittance(geometry: ArrayGeometry, wavelength_nm) -> Union[float, np.ndarray]:
    """Transmittance of one subwavelength hole, normalized to the hole area.

    Small circular aperture in a thin perfect screen: (64/27 pi^2) (k r)^4.
    """
    wl = np.asarray(wavelength_nm, dtype=float)
    if np.any(wl <= 0):
        raise ValueError("wavelength must be positive")
    kr = 2 * np.pi * geometry.hole_radius_nm / wl
    t = 64.0 / (27.0 * np.pi**2) * kr**4
    return float(t) if np.isscalar(wavelength_nm) else t


def bethe_transmittance(geometry: ArrayGeometry, wavelength_nm) -> Union[float, np.ndarray]:
    """Direct transmittance of the hole array, normalized to the unit cell.

    Per-hole Bethe transmittance scaled by the open area fraction; this is
    the non-resonant baseline under the plasmonic peaks.
    """
    return bethe_hole_transmittance(geometry, wavelength_nm) * geometry.open_area_fraction


def spp_effective_index(wavelength_nm, interface: Union[str, float] = "glass",
                        table: Optional[PermittivityTable] = None):
    """Real part of the bound-mode index at a metal/dielectric interface."""
    eps_d = _INTERFACES[interface] if isinstance(interface, str) else float(interface)
    if table is None:
        eps_m = gold_permittivity(wavelength_nm)
    else:
        eps_m = table.permittivity(wavelength_nm)
    n_eff = np.sqrt(eps_m * eps_d / (eps_m + eps_d))
    out = np.real(n_eff)
    return float(out) if np.isscalar(wavelength_nm) else out


def _resonance_wavelength_for_index(geometry: ArrayGeometry, n_eff: float,
                                    order: tuple, theta_deg: float,
                                    polarization: str) -> float:
    """Momentum matching on a square lattice for a fixed mode index.

    k_spp^2 = (k0 sin(theta) ex + i G)^2 + (k0 sin(theta) ey + j G)^2 with
    G = 2 pi / pitch; solved for the positive k0 root.
    """
    i, j = order
    s = np.sin(np.radians(theta_deg))
    if polarization == "tm":
        ex, ey = 1.0, 0.0
    elif polarization == "te":
        ex, ey = 0.0, 1.0
    else:
        raise ValueError("polarization must be 'tm' or 'te'")
    m = i * ex + j * ey
    nsq = n_eff**2 - s**2
    if nsq <= 0:
        raise DomainError("mode index below the in-plane momentum")
    root = np.sqrt(s**2 * m**2 + nsq * (i**2 + j**2))
    denom = s * m + root
    if denom <= 0:
        raise DomainError(f"no propagating ({i},{j}) resonance at this angle")
    return geometry.pitch_nm * nsq / denom


def spp_resonance_wavelength(geometry: ArrayGeometry, order: tuple = (1, 0),
                             interface: Union[str, float] = "glass",
                             theta_deg: float = 0.0, polarization: str = "tm",
                             table: Optional[PermittivityTable] = None,
                             max_iter: int = 200) -> float:
    """Self-consistent grating-coupling resonance wavelength [nm].

    The mode index depends on wavelength through the metal permittivity, so
    the momentum-matching condition is iterated (damped fixed point) until
    the wavelength reproduces itself to 1e-10 relative.
    """
    i, j = order
    if (i, j) == (0, 0):
        raise ValueError("order (0,0) is the directly transmitted beam")
    if table is None:
        table = PermittivityTable.gold()
    eps_d = _INTERFACES[interface] if isinstance(interface, str) else float(interface)

    # start from a lossless-metal guess slightly above the light line
    wl = geometry.pitch_nm * (np.sqrt(eps_d) + 0.05) / np.hypot(i, j)
    wl = float(np.clip(wl, table.wavelength_nm[0], table.wavelength_nm[-1]))
    for _ in range(max_iter):
        n_eff = spp_effective_index(wl, eps_d, table)
        target = _resonance_wavelength_for_index(geometry, n_eff, order,
                                                 theta_deg, polarization)
        nxt = 0.5 * wl + 0.5 * target
        if not table.wavelength_nm[0] <= nxt <= table.wavelength_nm[-1]:
            raise DomainError(
                f"({i},{j}) resonance iterates outside the permittivity table"
            )
        if abs(nxt - wl) <= 1e-10 * wl:
            wl = nxt
            break
        wl = nxt
    n_eff = spp_effective_index(wl, eps_d, table)
    target = _resonance_wavelength_for_index(geometry, n_eff, order,
                                             theta_deg, polarization)
    if abs(target - wl) > 1e-6 * wl:
        raise FitError(f"resonance iteration did not converge for order ({i},{j})")
    return wl


def spp_resonance_wavelengths(geometry: ArrayGeometry,
                              orders: Sequence[tuple] = ((1, 0), (1, 1)),
                              interface: Union[str, float] = "glass",
                              theta_deg: float = 0.0, polarization: str = "tm",
                              table: Optional[PermittivityTable] = None) -> np.ndarray:
    """Resonance wavelengths for several grating orders, one per order."""
    return np.array([
        spp_resonance_wavelength(geometry, order, interface, theta_deg,
                                 polarization, table)
        for order in orders
    ])


@dataclass(frozen=True, eq=False)
class TransmissionSpectrum:
    """Sampled array transmittance split into resonant and direct channels."""

    wavelength_nm: np.ndarray
    total: np.ndarray
    resonant: np.ndarray
    direct: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, TransmissionSpectrum):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, f), getattr(other, f))
            for f in ("wavelength_nm", "total", "resonant", "direct")
        )

    def __post_init__(self):
        wl = np.asarray(self.wavelength_nm, dtype=float)
        if wl.ndim != 1 or wl.size < 2 or not np.all(np.diff(wl) > 0):
            raise ValueError("need a strictly increasing 1-d wavelength grid")
        for name in ("total", "resonant", "direct"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != wl.shape:
                raise ValueError(f"{name} must match the wavelength grid")
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "wavelength_nm", wl)

    def transmittance_at(self, wavelength_nm):
        wl = np.asarray(wavelength_nm, dtype=float)
        lo, hi = self.wavelength_nm[0], self.wavelength_nm[-1]
        if np.any(wl < lo) or np.any(wl > hi):
            raise DomainError(f"wavelength outside spectrum [{lo:.1f}, {hi:.1f}] nm")
        out = np.interp(wl, self.wavelength_nm, self.total)
        return float(out) if np.isscalar(wavelength_nm) else out


@dataclass(frozen=True)
class FanoParameters:
    """Fano resonance riding on the direct hole-array background.

    resonance_nm is the bare resonance position, fwhm_nm its width, q the
    asymmetry, and peak_transmittance the total transmittance attained at
    the lineshape maximum (resonance_nm + fwhm_nm / (2 q)).
    """

    resonance_nm: float = 806.0
    fwhm_nm: float = 96.0
    q: float = 20.0
    peak_transmittance: float = 0.36

    def __post_init__(self):
        if self.fwhm_nm <= 0:
            raise ValueError("fwhm must be positive")
        if self.q <= 0:
            raise ValueError("q must be positive")
        if not 0 < self.peak_transmittance <= 1:
            raise ValueError("peak transmittance must lie in (0, 1]")

    @property
    def peak_wavelength_nm(self) -> float:
        return self.resonance_nm + 0.5 * self.fwhm_nm / self.q


def _fano_channels(geometry: ArrayGeometry, wl: np.ndarray,
                   params: FanoParameters, strict: bool = True):
    direct = np.asarray(bethe_transmittance(geometry, wl), dtype=float)
    half = 0.5 * params.fwhm_nm
    peak_direct = bethe_transmittance(geometry, params.peak_wavelength_nm)
    amplitude = (params.peak_transmittance - peak_direct) / (1.0 + params.q**2)
    if strict and amplitude < 0:
        raise ValueError("peak transmittance below the direct background")
    x = wl - params.resonance_nm
    resonant = amplitude * (params.q * half + x) ** 2 / (half**2 + x**2)
    total = resonant + direct
    if strict and np.any(total > 1 + 1e-9):
        raise ValueError("parameters give transmittance above unity")
    return total, resonant, direct


def fano_transmittance(geometry: ArrayGeometry, wavelength_nm,
                       params: FanoParameters = FanoParameters()):
    """Total array transmittance at the given wavelength(s), no grid."""
    wl = np.atleast_1d(np.asarray(wavelength_nm, dtype=float))
    total, _, _ = _fano_channels(geometry, wl, params)
    return float(total[0]) if np.isscalar(wavelength_nm) else total


def fano_spectrum(geometry: ArrayGeometry, wavelength_nm,
                  params: FanoParameters = FanoParameters()) -> TransmissionSpectrum:
    """Array transmission spectrum: Fano resonance plus direct term.

    The resonant channel is A (q G/2 + x)^2 / ((G/2)^2 + x^2) with
    x = wl - resonance and G the FWHM; A is fixed so the total at the
    lineshape maximum (resonance + G / (2 q)) equals params.peak_transmittance.
    """
    wl = np.asarray(wavelength_nm, dtype=float)
    if wl.ndim != 1:
        wl = np.atleast_1d(wl)
    total, resonant, direct = _fano_channels(geometry, wl, params)
    return TransmissionSpectrum(wl, total, resonant, direct)


@dataclass(frozen=True)
class FanoFit:
    params: FanoParameters
    stderr: np.ndarray  # (resonance, fwhm, q, peak) one-sigma errors
    residual_rms: float


def fit_fano(wavelength_nm, transmittance, geometry: ArrayGeometry,
             initial: Optional[FanoParameters] = None) -> FanoFit:
    """Least-squares Fano fit of a measured array transmission spectrum."""
    wl = np.asarray(wavelength_nm, dtype=float)
    t = np.asarray(transmittance, dtype=float)
    if wl.ndim != 1 or wl.shape != t.shape or wl.size < 5:
        raise FitError("need matching 1-d arrays with at least 5 samples")
    if initial is None:
        i_max = int(np.argmax(t))
        span = wl[-1] - wl[0]
        initial = FanoParameters(
            resonance_nm=float(wl[i_max]),
            fwhm_nm=max(span / 4.0, 1.0),
            q=10.0,
            peak_transmittance=float(np.clip(t[i_max], 1e-3, 1.0)),
        )

    def model(x, resonance, fwhm, q, peak):
        p = FanoParameters(resonance, fwhm, q, peak)
        total, _, _ = _fano_channels(geometry, np.asarray(x, dtype=float), p,
                                     strict=False)
        return total

    p0 = [initial.resonance_nm, initial.fwhm_nm, initial.q,
          initial.peak_transmittance]
    lo = [wl[0] - (wl[-1] - wl[0]), 1e-3, 0.05, 1e-6]
    hi = [wl[-1] + (wl[-1] - wl[0]), 10 * (wl[-1] - wl[0]), 1e4, 1.0]
    try:
        popt, pcov = scipy.optimize.curve_fit(
            model, wl, t, p0=p0, bounds=(lo, hi), maxfev=20000)
    except (RuntimeError, ValueError) as exc:
        raise FitError(f"Fano fit failed: {exc}") from exc
    params = FanoParameters(*[float(v) for v in popt])
    stderr = np.sqrt(np.clip(np.diag(pcov), 0, None))
    resid = model(wl, *popt) - t
    return FanoFit(params, stderr, float(np.sqrt(np.mean(resid**2))))
