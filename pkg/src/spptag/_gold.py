"""Room-temperature optical constants of evaporated gold films.

Classic reflectivity/transmissivity tabulation (Johnson and Christy, Phys.
Rev. B 6, 4370 (1972)), energies 0.64-6.6 eV, i.e. wavelengths from about
1937 nm down to 188 nm.  Stored as (photon energy eV, n, k); permittivity
follows as (n + i k)^2.
"""
import numpy as np

# (eV, n, k)
_JC_GOLD = (
    (0.64, 0.92, 13.78),
    (0.77, 0.56, 11.21),
    (0.89, 0.43, 9.519),
    (1.02, 0.35, 8.145),
    (1.14, 0.27, 7.150),
    (1.26, 0.22, 6.350),
    (1.39, 0.17, 5.663),
    (1.51, 0.16, 5.083),
    (1.64, 0.14, 4.542),
    (1.76, 0.13, 4.103),
    (1.89, 0.14, 3.697),
    (2.01, 0.21, 3.272),
    (2.14, 0.29, 2.863),
    (2.26, 0.43, 2.455),
    (2.38, 0.62, 2.081),
    (2.51, 1.04, 1.833),
    (2.63, 1.31, 1.849),
    (2.76, 1.38, 1.914),
    (2.88, 1.45, 1.948),
    (3.00, 1.46, 1.958),
    (3.12, 1.47, 1.952),
    (3.25, 1.46, 1.933),
    (3.37, 1.48, 1.895),
    (3.50, 1.50, 1.866),
    (3.62, 1.48, 1.871),
    (3.74, 1.48, 1.883),
    (3.87, 1.54, 1.898),
    (3.99, 1.53, 1.893),
    (4.12, 1.53, 1.889),
    (4.24, 1.49, 1.878),
    (4.36, 1.47, 1.869),
    (4.49, 1.43, 1.847),
    (4.61, 1.38, 1.803),
    (4.74, 1.35, 1.749),
    (4.86, 1.33, 1.688),
    (4.98, 1.33, 1.631),
    (5.11, 1.32, 1.577),
    (5.23, 1.32, 1.536),
    (5.36, 1.30, 1.497),
    (5.48, 1.31, 1.460),
    (5.60, 1.30, 1.427),
    (5.73, 1.30, 1.387),
    (5.85, 1.30, 1.350),
    (5.98, 1.30, 1.304),
    (6.10, 1.33, 1.277),
    (6.22, 1.33, 1.251),
    (6.35, 1.34, 1.226),
    (6.47, 1.32, 1.203),
    (6.60, 1.28, 1.188),
)

EV_NM = 1239.84193  # photon energy-wavelength product [eV nm]

_ev = np.array([row[0] for row in _JC_GOLD])
_n = np.array([row[1] for row in _JC_GOLD])
_k = np.array([row[2] for row in _JC_GOLD])

# ascending in wavelength
_order = np.argsort(EV_NM / _ev)
GOLD_WAVELENGTH_NM = (EV_NM / _ev)[_order]
GOLD_EPSILON = ((_n + 1j * _k) ** 2)[_order]
