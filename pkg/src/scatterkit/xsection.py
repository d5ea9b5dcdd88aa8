"""Differential and total cross sections at finite distance and asymptotically.

The finite-distance differential cross section is built from the scattered
probability current through a sphere of radius r,

    dsigma/dOmega = (j_r^sc / j^in) [1 + (j_theta^sc / j_r^sc)^2] r^(n-1),

whose leading contribution keeps only the radial current,

    dsigma/dOmega = r^(n-1) (1/k) Im(psi_sc* d/dr psi_sc),

and is identically equal to a double sum over partial-wave coefficients
weighted by Wronskians of the two Hankel kinds.  The conventional r -> inf
amplitude f(theta) and total cross section are provided for comparison.

Incident current normalisation is j^in = k (unit-amplitude plane wave,
hbar = m = 1).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .errors import (
    ConsistencyError,
    DegenerateCurrentError,
    DomainError,
    WrongDimensionError,
)
from .partialwave import (
    PhaseShiftSet,
    ScatterConfig,
    a_l,
    angular_table,
    mode_coefficient,
)
from .specfun import Order

__all__ = [
    "CrossSectionSample",
    "AsymptoticAmplitude",
    "wronskian_radial",
    "dsigma_leading",
    "dsigma_double_sum",
    "dsigma_full",
    "dsigma_from_cos_gamma",
    "one_d_summary",
    "two_d_dsigma",
    "f_theta_asymptotic",
    "sigma_total_asymptotic",
    "sigma_total_mode_terms",
    "angular_measure_integral",
]


@dataclass(frozen=True)
class CrossSectionSample:
    """Current-resolved differential cross section at one observation point.

    gamma is the tilt of the scattered current away from the radial
    direction, tan(gamma) = j_theta^sc / j_r^sc.
    """

    r: float
    theta: float
    dsigma_domega: float
    jr_sc: float
    jtheta_sc: float
    gamma: float


@dataclass(frozen=True)
class AsymptoticAmplitude:
    """Large-distance scattering amplitude f(theta) (scale length^((n-1)/2))."""

    theta: float
    f: complex


# --------------------------------------------------------------------------
# scattered-field building blocks
# --------------------------------------------------------------------------


def _scattered_coefficients(config: ScatterConfig, shifts: PhaseShiftSet) -> np.ndarray:
    # C_l (e^{2i delta_l} - 1) for l = 0..L; multiplies h1_nu(kr)/r^s ang_l
    n, k = config.n, config.k
    return np.array(
        [
            mode_coefficient(n, k, l) * (shifts.phase_factor(l) - 1.0)
            for l in range(shifts.lmax + 1)
        ]
    )


def _hankel_h1_with_derivative(
    n: int, lmax: int, k: float, r: float
) -> tuple[np.ndarray, np.ndarray]:
    # h1_l(kr) and d/dr h1_l(kr) for l = 0..lmax, via h'(z) = (nu/z) h - h_{nu+1}
    z = k * r
    _, h1 = specfun.hankel_basis(n, lmax + 1, z)
    nus = np.arange(lmax + 1) + (n - 3) / 2.0
    dh1 = k * ((nus / z) * h1[:-1] - h1[1:])
    return h1[:-1], dh1


def _scattered_point(
    config: ScatterConfig, shifts: PhaseShiftSet, r: float, theta: float
) -> tuple[complex, complex, complex]:
    """(psi_sc, d/dr psi_sc, d/dtheta psi_sc) at one point.

    The theta derivative uses d/dx C_l^lam = 2 lam C_{l-1}^{lam+1} in n >= 3
    and -l sin(l theta) in n = 2; it is not defined for n = 1.
    """
    if not r > 0:
        raise DomainError(f"radius must be > 0, got r={r}")
    n, k = config.n, config.k
    lmax = shifts.lmax
    s = (n - 3) / 2.0
    rs = r**s
    sc = _scattered_coefficients(config, shifts)
    h1, dh1 = _hankel_h1_with_derivative(n, lmax, k, r)

    ang = angular_table(n, lmax, np.float64(theta))
    if n == 1:
        dang = None
    elif n == 2:
        ls = np.arange(lmax + 1)
        dang = -ls * np.sin(ls * theta)
    else:
        lam = n / 2.0 - 1.0
        x = math.cos(theta)
        dang = np.zeros(lmax + 1)
        if lmax >= 1:
            upper = specfun.gegenbauer_table(lmax - 1, lam + 1.0, np.float64(x))
            dang[1:] = -math.sin(theta) * 2.0 * lam * upper

    psi = 0.0 + 0.0j
    dpsi_r = 0.0 + 0.0j
    dpsi_t = 0.0 + 0.0j
    for l in range(lmax + 1):
        radial = h1[l] / rs
        dradial = dh1[l] / rs - s * h1[l] / (rs * r)
        psi += sc[l] * radial * ang[l]
        dpsi_r += sc[l] * dradial * ang[l]
        if dang is not None:
            dpsi_t += sc[l] * radial * dang[l]
    return psi, dpsi_r, (dpsi_t if dang is not None else complex("nan"))


# --------------------------------------------------------------------------
# Wronskian machinery
# --------------------------------------------------------------------------


def wronskian_radial(config: ScatterConfig, l: int, lp: int, r: float) -> complex:
    """W_r[h2_nu(kr)/r^s, h1_nu'(kr)/r^s] with s = (n-3)/2, analytic derivatives.

    For l = lp the combination r^(n-1) W_r is the r-independent constant
    2i/k; unequal orders give genuinely r-dependent values.
    """
    if not r > 0:
        raise DomainError(f"radius must be > 0, got r={r}")
    n, k = config.n, config.k
    lmax = max(l, lp)
    z = k * r
    s = (n - 3) / 2.0
    rs = r**s
    h2, h1 = specfun.hankel_basis(n, lmax + 1, z)
    nus = np.arange(lmax + 2) + (n - 3) / 2.0

    def scaled(h, idx):
        return h[idx] / rs

    def dscaled(h, idx):
        dh = k * ((nus[idx] / z) * h[idx] - h[idx + 1])
        return dh / rs - s * h[idx] / (rs * r)

    return scaled(h2, l) * dscaled(h1, lp) - scaled(h1, lp) * dscaled(h2, l)


def dsigma_double_sum(
    config: ScatterConfig, shifts: PhaseShiftSet, r: float, theta: float
) -> float:
    """dsigma/dOmega as the Wronskian-weighted double sum over modes:

        r^(n-1)/(2ik) sum_{l,l'} a_l*(theta) a_l'(theta) W_r[...].

    The sum is real up to rounding; an imaginary residual above 1e-12 of the
    magnitude raises instead of being silently discarded.
    """
    n, k = config.n, config.k
    lmax = shifts.lmax
    avals = np.array([a_l(config, shifts, l, theta) for l in range(lmax + 1)])
    acc = 0.0 + 0.0j
    for l in range(lmax + 1):
        if avals[l] == 0.0:
            continue
        for lp in range(lmax + 1):
            if avals[lp] == 0.0:
                continue
            acc += (
                np.conj(avals[l])
                * avals[lp]
                * wronskian_radial(config, l, lp, r)
            )
    acc *= r ** (n - 1) / (2j * k)
    if abs(acc.imag) > 1e-12 * max(abs(acc), 1e-280):
        raise ConsistencyError(
            f"double-sum cross section has imaginary residual {acc.imag}"
        )
    return acc.real


# --------------------------------------------------------------------------
# current-based cross sections
# --------------------------------------------------------------------------


def dsigma_leading(
    config: ScatterConfig, shifts: PhaseShiftSet, r: float, theta: float
) -> float:
    """Leading (radial-current) differential cross section at finite distance,

        dsigma/dOmega = r^(n-1) (1/k) Im(psi_sc* d/dr psi_sc).
    """
    psi, dpsi_r, _ = _scattered_point(config, shifts, r, theta)
    return r ** (config.n - 1) / config.k * float(np.imag(np.conj(psi) * dpsi_r))


def dsigma_full(
    config: ScatterConfig,
    shifts: PhaseShiftSet,
    r: float,
    theta: float,
    degenerate_ok: bool = False,
) -> CrossSectionSample:
    """Full current-based differential cross section with the tilt angle.

    Requires 0 < theta < pi (the angular derivative is not modelled at the
    forward/backward axis).  When the radial scattered current is below the
    underflow guard the tilt is undefined: raises, or returns a zero sample
    with gamma = nan when degenerate_ok is set.
    """
    if config.n < 2:
        raise WrongDimensionError("current tilt needs a continuous angle; n >= 2")
    if not 0.0 < theta < math.pi:
        raise DomainError(f"theta must lie strictly inside (0, pi), got {theta}")
    n, k = config.n, config.k
    psi, dpsi_r, dpsi_t = _scattered_point(config, shifts, r, theta)
    jr = float(np.imag(np.conj(psi) * dpsi_r))
    jt = float(np.imag(np.conj(psi) * dpsi_t)) / r
    guard = config.series.underflow_guard
    if abs(jr) <= guard:
        if degenerate_ok:
            return CrossSectionSample(r, theta, 0.0, jr, jt, float("nan"))
        raise DegenerateCurrentError(
            f"radial scattered current {jr} below guard at r={r}, theta={theta}"
        )
    gamma = math.atan2(jt, jr)
    dsig = (jr / k) * (1.0 + (jt / jr) ** 2) * r ** (n - 1)
    return CrossSectionSample(r, theta, dsig, jr, jt, gamma)


def dsigma_from_cos_gamma(config: ScatterConfig, sample: CrossSectionSample) -> float:
    """The sqrt(jr^2 + jt^2)/(j^in cos gamma) form of the same cross section.

    Algebraically identical to the bracketed form stored in the sample,
    since cos gamma = j_r/|j^sc|; kept so both write-ups can be inspected.
    """
    jmag = math.hypot(sample.jr_sc, sample.jtheta_sc)
    return jmag / (config.k * math.cos(sample.gamma)) * sample.r ** (config.n - 1)


def one_d_summary(shifts: PhaseShiftSet) -> dict[str, float]:
    """One-dimensional cross sections and transmitted/reflected fractions.

    Only delta_0 and delta_1 enter (higher angular functions vanish at the
    two admissible directions):

        sigma(0)  = sin^2 d0 + sin^2 d1 + 2 cos(d0-d1) sin d0 sin d1
        sigma(pi) = sin^2 d0 + sin^2 d1 - 2 cos(d0-d1) sin d0 sin d1
        T = sigma(0) / (sigma(0)+sigma(pi)),  R = 1 - T.

    T and R are undefined when both shifts vanish mod pi.
    """
    if not shifts.is_elastic:
        raise DomainError("one-dimensional formulas assume real phase shifts")
    d0 = shifts.delta_at(0).real
    d1 = shifts.delta_at(1).real
    s0, s1 = math.sin(d0), math.sin(d1)
    cross = 2.0 * math.cos(d0 - d1) * s0 * s1
    sigma0 = s0 * s0 + s1 * s1 + cross
    sigmapi = s0 * s0 + s1 * s1 - cross
    denom = s0 * s0 + s1 * s1
    if denom == 0.0:
        raise DomainError("T, R undefined: sin^2 d0 + sin^2 d1 = 0")
    t = 0.5 + 0.5 * cross / denom
    return {"sigma0": sigma0, "sigmapi": sigmapi, "T": t, "R": 1.0 - t}


def two_d_dsigma(
    config: ScatterConfig, shifts: PhaseShiftSet, r: float, theta: float
) -> float:
    """Planar differential cross section (per unit angle, times r scale):

        (kr/2pi) sum_{l,l'} Deg(l) Deg(l') (-i)^l i^l'
                 (e^{-2id_l}-1)(e^{2id_l'}-1) cos(l th) cos(l' th)
                 (1/2ik) W_r[sqrt(r) h2_{l-1/2}(kr), sqrt(r) h1_{l'-1/2}(kr)].
    """
    if config.n != 2:
        raise WrongDimensionError(f"planar cross section needs n=2, got {config.n}")
    if not shifts.is_elastic:
        raise DomainError("planar closed form assumes real phase shifts")
    k = config.k
    lmax = shifts.lmax
    acc = 0.0 + 0.0j
    wcache = {}
    for l in range(lmax + 1):
        fl = np.conj(shifts.phase_factor(l)) - 1.0
        if fl == 0.0:
            continue
        for lp in range(lmax + 1):
            flp = shifts.phase_factor(lp) - 1.0
            if flp == 0.0:
                continue
            if (l, lp) not in wcache:
                wcache[(l, lp)] = wronskian_radial(config, l, lp, r)
            deg = (1 if l == 0 else 2) * (1 if lp == 0 else 2)
            acc += (
                deg
                * (-1j) ** l
                * 1j**lp
                * fl
                * flp
                * math.cos(l * theta)
                * math.cos(lp * theta)
                * wcache[(l, lp)]
                / (2j * k)
            )
    acc *= k * r / (2.0 * math.pi)
    if abs(acc.imag) > 1e-12 * max(abs(acc), 1e-280):
        raise ConsistencyError(
            f"planar cross section has imaginary residual {acc.imag}"
        )
    return acc.real


# --------------------------------------------------------------------------
# large-distance asymptotics
# --------------------------------------------------------------------------


def f_theta_asymptotic(
    config: ScatterConfig, shifts: PhaseShiftSet, theta: float
) -> AsymptoticAmplitude:
    """Conventional r -> inf scattering amplitude

        f(theta) = sum_l a_l(theta) (-i)^(l+(n-1)/2) / k,

    obtained by replacing each outgoing wave with its asymptotic phase.
    """
    if config.n < 2:
        raise WrongDimensionError("asymptotic amplitude defined for n >= 2")
    k = config.k
    acc = 0.0 + 0.0j
    for l in range(shifts.lmax + 1):
        av = a_l(config, shifts, l, theta)
        if av == 0.0:
            continue
        acc += av * cmath.exp(-0.5j * math.pi * (l + (config.n - 1) / 2.0))
    return AsymptoticAmplitude(theta=float(theta), f=acc / k)


def sigma_total_mode_terms(config: ScatterConfig, shifts: PhaseShiftSet) -> np.ndarray:
    """Per-mode contributions to the asymptotic total cross section.

    n >= 3:  [4 pi^((n-1)/2) / Gamma((n-1)/2)] k^(1-n) (2l+n-2) (l+1)_(n-3) sin^2 d_l
    n = 2:   (4/k) Deg(l) sin^2 d_l  (the removable-singularity limit).
    """
    if config.n < 2:
        raise WrongDimensionError("total cross section defined for n >= 2")
    if not shifts.is_elastic:
        raise DomainError("total cross-section formula assumes real phase shifts")
    n, k = config.n, config.k
    sins = np.array([math.sin(d.real) ** 2 for d in shifts.delta])
    if n == 2:
        degs = np.array([1 if l == 0 else 2 for l in range(shifts.lmax + 1)])
        return 4.0 / k * degs * sins
    pref = (
        4.0
        * math.pi ** ((n - 1) / 2.0)
        / cmath.exp(specfun.gamma_ln((n - 1) / 2.0)).real
        * k ** (1 - n)
    )
    weights = np.array(
        [
            (2 * l + n - 2) * specfun.pochhammer(l + 1.0, n - 3)
            for l in range(shifts.lmax + 1)
        ]
    )
    return pref * weights * sins


def sigma_total_asymptotic(config: ScatterConfig, shifts: PhaseShiftSet) -> float:
    """Asymptotic total cross section (sum of sigma_total_mode_terms)."""
    return float(np.sum(sigma_total_mode_terms(config, shifts)))


def angular_measure_integral(
    config: ScatterConfig, fn, lmax: int, nodes: int | None = None
) -> float:
    """integral of fn(theta) over the unit-sphere measure:

        Omega_(n-2) * int_0^pi fn(theta) sin^(n-2)(theta) dtheta.

    Odd n: Gauss-Legendre in x = cos(theta) (the weight is a polynomial, so
    the rule is exact for band-limited integrands).  Even n: Gauss-Legendre
    in theta itself; the half-integer weight would spoil algebraic
    convergence in x, while in theta the integrand is analytic.
    Default node count 4*lmax + 20.
    """
    n = config.n
    if n < 2:
        raise WrongDimensionError("angular integral defined for n >= 2")
    if nodes is None:
        nodes = 4 * lmax + 20
    omega = 2.0 * math.pi ** ((n - 1) / 2.0) / cmath.exp(
        specfun.gamma_ln((n - 1) / 2.0)
    ).real
    if n % 2 == 1:
        x, w = np.polynomial.legendre.leggauss(nodes)
        vals = np.array([fn(float(t)) for t in np.arccos(x)])
        weight = (1.0 - x * x) ** ((n - 3) // 2)
        return float(omega * np.sum(w * vals * weight))
    t, w = np.polynomial.legendre.leggauss(nodes)
    theta = 0.5 * math.pi * (t + 1.0)
    vals = np.array([fn(float(th)) for th in theta])
    return float(omega * 0.5 * math.pi * np.sum(w * vals * np.sin(theta) ** (n - 2)))
