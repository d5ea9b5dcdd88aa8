"""Phase shifts from model potentials.

The radial equation in n spatial dimensions,

    [d^2/dr^2 + (n-1)/r d/dr + k^2 - l(l+n-2)/r^2 - V(r)] R_l(r) = 0,

has the exact free solution C_l h^(2)_nu(kr)/r^s + D_l h^(1)_nu(kr)/r^s
with nu = l + (n-3)/2, s = (n-3)/2, and e^{2i delta_l} = D_l/C_l defines
the phase shift.  Three solvers produce delta_l:

* hard_sphere_shift   -- R_l(a) = 0 on a hard hypersphere of radius a;
* square_well_shift   -- log-derivative matching of the interior
                         j_nu(qr)/r^s (or i_nu(kappa r)/r^s when the
                         interior is evanescent) at the well edge;
* ode_shift           -- outward integration of a tabulated short-range
                         potential and a 2x2 solve for (C_l, D_l) against
                         the free solution in the force-free region.

The ODE route substitutes u = R r^((n-1)/2), which removes the first
derivative and leaves

    u'' + [k^2 - V(r) - (nu_t^2 - 1/4)/r^2] u = 0,   nu_t = l + (n-2)/2,

where nu_t^2 - 1/4 = l(l+n-2) + (n-1)(n-3)/4 is the effective centrifugal
constant of the original equation.  Integration uses the fixed-step Numerov
recurrence (fourth-order global accuracy) with periodic renormalisation so
deep classically-forbidden regions cannot overflow.

delta is reported as the principal value arg(D/C)/2 in (-pi/2, pi/2];
e^{2i delta} fixes delta only mod pi, so k-sweeps can be made continuous
with unwrap_shifts.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import iv

from . import specfun
from .errors import DomainError, MatchingError
from .partialwave import ScatterConfig
from .specfun import Order

__all__ = [
    "PotentialModel",
    "MatchResult",
    "hard_sphere_shift",
    "square_well_shift",
    "ode_shift",
    "solve_potential_shifts",
    "unwrap_shifts",
    "potential_from_json",
    "potential_to_json",
]

_KINDS = ("hard_hypersphere", "square_well", "tabulated")


@dataclass(frozen=True)
class PotentialModel:
    """Model potential: hard hypersphere, square well, or tabulated V(r).

    a is the radius (for tabulated potentials, the cutoff beyond which V
    vanishes).  V0 is the well depth in 1/length^2 units (hbar = m = 1);
    negative is attractive.  Tabulated potentials are linearly interpolated
    between samples and are zero at and beyond the last sample.
    """

    kind: str
    a: float
    V0: float = 0.0
    r_table: tuple[float, ...] | None = None
    v_table: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise DomainError(f"kind must be one of {_KINDS}, got {self.kind!r}")
        if not self.a > 0:
            raise DomainError(f"radius must be > 0, got a={self.a}")
        if self.kind == "tabulated":
            if self.r_table is None or self.v_table is None:
                raise DomainError("tabulated potential needs r_table and v_table")
            r = np.asarray(self.r_table, dtype=float)
            v = np.asarray(self.v_table, dtype=float)
            if r.size != v.size or r.size < 2:
                raise DomainError("tables must have equal length >= 2")
            if np.any(np.diff(r) <= 0):
                raise DomainError("r_table must be strictly increasing")
            if v[-1] != 0.0:
                raise DomainError("short range required: last V sample must be 0")

    @classmethod
    def hard_sphere(cls, a: float) -> "PotentialModel":
        return cls(kind="hard_hypersphere", a=a)

    @classmethod
    def square_well(cls, a: float, V0: float) -> "PotentialModel":
        return cls(kind="square_well", a=a, V0=V0)

    @classmethod
    def tabulated(cls, r, v) -> "PotentialModel":
        r = tuple(float(x) for x in r)
        v = tuple(float(x) for x in v)
        return cls(kind="tabulated", a=r[-1], r_table=r, v_table=v)

    def evaluate(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.kind == "square_well":
            return np.where(r < self.a, self.V0, 0.0)
        if self.kind == "tabulated":
            return np.interp(r, self.r_table, self.v_table, left=self.v_table[0], right=0.0)
        raise DomainError("hard hypersphere has no finite V(r); use hard_sphere_shift")


@dataclass(frozen=True)
class MatchResult:
    """Phase shift for one partial wave plus a dimensionless match residual.

    For the closed-form solvers the residual is ||D/C| - 1|; for the ODE
    solver it is the relative mismatch between the fitted free solution and
    the integrated one at a validation radius away from the match point.
    """

    l: int
    delta: float
    c_over_d_residual: float


def unwrap_shifts(deltas) -> np.ndarray:
    """Continuity-unwrap a sweep of principal-branch shifts (period pi)."""
    return np.unwrap(np.asarray(deltas, dtype=float), period=math.pi)


# --------------------------------------------------------------------------
# closed-form solvers
# --------------------------------------------------------------------------


def hard_sphere_shift(config: ScatterConfig, a: float, l: int) -> MatchResult:
    """Hard hypersphere of radius a: R_l(a) = 0.

    C h^(2)_nu(ka) + D h^(1)_nu(ka) = 0 gives e^{2i delta} = -h2(ka)/h1(ka);
    the ratio of conjugates is exactly unimodular on the real axis.
    """
    if not a > 0:
        raise DomainError(f"radius must be > 0, got a={a}")
    order = Order(l, config.n)
    z = config.k * a
    h1 = specfun.spherical_hankel(1, order, z, config.series)
    h2 = specfun.spherical_hankel(2, order, z, config.series)
    ratio = -h2 / h1
    delta = 0.5 * float(np.angle(ratio))
    return MatchResult(l=l, delta=delta, c_over_d_residual=abs(abs(ratio) - 1.0))


def _interior_logderivative(order: Order, q2: float, a: float, series) -> tuple[float, float]:
    """(value, d/dr value) of the regular interior radial factor at r = a.

    Propagating interior (q^2 > 0): j_nu(q r); evanescent (q^2 < 0):
    the modified function i_nu(kappa r) = sqrt(pi/2z) I_{nu+1/2}(kappa r),
    which is the regular solution under k^2 - V < 0.
    """
    if q2 > 0.0:
        q = math.sqrt(q2)
        f = specfun.spherical_bessel_j(order, q * a, series)
        f_up = specfun.spherical_bessel_j(Order(order.l + 1, order.n), q * a, series)
        fp = q * ((order.nu / (q * a)) * f - f_up)
        return f, fp
    kappa = math.sqrt(-q2)
    z = kappa * a

    def mod_i(o: Order) -> float:
        if o.two_nu == -2:
            return math.cosh(z) / z
        return math.sqrt(math.pi / (2.0 * z)) * float(iv(o.bessel_order, z))

    f = mod_i(order)
    f_up = mod_i(Order(order.l + 1, order.n))
    # i'_nu(z) = i_{nu-1} - (nu+1)/z i_nu = (nu/z) i_nu + i_{nu+1}
    fp = kappa * ((order.nu / z) * f + f_up)
    return f, fp


def square_well_shift(
    config: ScatterConfig, a: float, V0: float, l: int
) -> MatchResult:
    """Spherical square well/barrier of radius a and depth V0.

    Continuity of R_l and R_l' at r = a (the common r^-s factor cancels in
    the logarithmic derivative) fixes, with f the interior radial factor
    and f' its r-derivative at the edge,

        e^{2i delta} = -(f' h2 - f h2') / (f' h1 - f h1'),

    all Hankel values and derivatives taken at ka.  Numerator and
    denominator are conjugate for a real potential, so |e^{2i delta}| = 1.
    """
    if not a > 0:
        raise DomainError(f"radius must be > 0, got a={a}")
    n, k = config.n, config.k
    q2 = k * k - V0
    if q2 == 0.0:
        raise DomainError("k^2 = V0 exactly is not supported; perturb V0")
    order = Order(l, n)
    f, fp = _interior_logderivative(order, q2, a, config.series)
    z = k * a
    h1 = specfun.spherical_hankel(1, order, z, config.series)
    h2 = specfun.spherical_hankel(2, order, z, config.series)
    h1_up = specfun.spherical_hankel(1, Order(l + 1, n), z, config.series)
    h2_up = specfun.spherical_hankel(2, Order(l + 1, n), z, config.series)
    dh1 = k * ((order.nu / z) * h1 - h1_up)
    dh2 = k * ((order.nu / z) * h2 - h2_up)
    ratio = -(fp * h2 - f * dh2) / (fp * h1 - f * dh1)
    delta = 0.5 * float(np.angle(ratio))
    return MatchResult(l=l, delta=delta, c_over_d_residual=abs(abs(ratio) - 1.0))


# --------------------------------------------------------------------------
# ODE solver
# --------------------------------------------------------------------------


def _numerov(r: np.ndarray, q_arr: np.ndarray, p: float, b2: float) -> np.ndarray:
    """Propagate u'' = Q u outward on the uniform grid r with u ~ r^p (1 + b2 r^2).

    Renormalises periodically; only the overall scale is lost, which the
    coefficient fit does not need.
    """
    h2 = (r[1] - r[0]) ** 2
    c = h2 / 12.0
    u = np.empty_like(r)
    u[0] = r[0] ** p * (1.0 + b2 * r[0] ** 2)
    u[1] = r[1] ** p * (1.0 + b2 * r[1] ** 2)
    for i in range(1, r.size - 1):
        u[i + 1] = (
            (2.0 + 10.0 * c * q_arr[i]) * u[i] - (1.0 - c * q_arr[i - 1]) * u[i - 1]
        ) / (1.0 - c * q_arr[i + 1])
        if abs(u[i + 1]) > 1e250:
            u[: i + 2] *= 1e-250
    return u


def ode_shift(
    config: ScatterConfig,
    potential: PotentialModel,
    l: int,
    r_match: float | None = None,
) -> MatchResult:
    """Phase shift of a tabulated short-range potential by direct integration.

    Integrates the substituted equation u'' = [c/r^2 + V - k^2] u,
    c = l(l+n-2) + (n-1)(n-3)/4, from a regular start u ~ r^(l+(n-1)/2)
    out to r_match > r_cut, then solves the 2x2 system

        [h2/r^s, h1/r^s; (h2/r^s)', (h1/r^s)'] (C, D) = (R, R')

    for the coefficients; delta = arg(D/C)/2.  The residual is checked at a
    second, independent radius in the free region and must stay below 1e-6.

    Step size: min(1/(20 k), a/200, half the finest table spacing) -- the
    last term so that steep tabulated features (ramps approximating jumps)
    are actually resolved by the grid.
    """
    if potential.kind != "tabulated":
        raise DomainError("ode_shift integrates tabulated potentials; use the "
                          "closed-form solvers for ideal wells and hard spheres")
    n, k = config.n, config.k
    a = potential.a
    if r_match is None:
        r_match = 1.3 * a
    if not r_match > a:
        raise DomainError(f"r_match must exceed the potential range {a}")
    if k * r_match < l:
        warnings.warn(
            f"matching at k*r={k * r_match:.3g} < l={l} is classically forbidden; "
            "expect reduced accuracy",
            stacklevel=2,
        )

    dr_table = float(np.min(np.diff(np.asarray(potential.r_table))))
    h = min(1.0 / (20.0 * k), a / 200.0, dr_table / 2.0)
    r_end = r_match + 6.0 * h
    npts = int(math.ceil(r_end / h)) + 1
    r = h * np.arange(1, npts + 1)
    v = potential.evaluate(r)

    # centrifugal constant of the substituted equation, c = nu_t^2 - 1/4
    cent = l * (l + n - 2) + (n - 1) * (n - 3) / 4.0
    q_arr = cent / (r * r) + v - k * k
    p = l + (n - 1) / 2.0
    b2 = (float(v[0]) - k * k) / (4.0 * p + 2.0)  # next order of the regular series
    u = _numerov(r, q_arr, p, b2)

    def coefficients_at(idx: int) -> tuple[complex, complex, float, float]:
        rm = r[idx]
        du = (u[idx - 2] - 8.0 * u[idx - 1] + 8.0 * u[idx + 1] - u[idx + 2]) / (12.0 * h)
        s = (n - 3) / 2.0
        e = (n - 1) / 2.0
        big_r = u[idx] / rm**e
        big_rp = du / rm**e - e * u[idx] / rm ** (e + 1.0)
        z = k * rm
        order = Order(l, n)
        h1 = specfun.spherical_hankel(1, order, z, config.series)
        h2 = specfun.spherical_hankel(2, order, z, config.series)
        h1_up = specfun.spherical_hankel(1, Order(l + 1, n), z, config.series)
        h2_up = specfun.spherical_hankel(2, Order(l + 1, n), z, config.series)
        dh1 = k * ((order.nu / z) * h1 - h1_up)
        dh2 = k * ((order.nu / z) * h2 - h2_up)
        u2, u1 = h2 / rm**s, h1 / rm**s
        du2 = dh2 / rm**s - s * h2 / rm ** (s + 1.0)
        du1 = dh1 / rm**s - s * h1 / rm ** (s + 1.0)
        mat = np.array([[u2, u1], [du2, du1]], dtype=complex)
        cvec = np.linalg.solve(mat, np.array([big_r, big_rp], dtype=complex))
        return cvec[0], cvec[1], big_r, rm

    idx_match = int(np.searchsorted(r, r_match))
    idx_match = min(max(idx_match, 2), r.size - 3)
    c_coef, d_coef, _, rm = coefficients_at(idx_match)

    # validate at an independent free-region radius
    idx_val = int(np.searchsorted(r, a + 0.6 * (rm - a)))
    idx_val = min(max(idx_val, 2), r.size - 3)
    s = (n - 3) / 2.0
    rv = r[idx_val]
    order = Order(l, n)
    h1v = specfun.spherical_hankel(1, order, k * rv, config.series)
    h2v = specfun.spherical_hankel(2, order, k * rv, config.series)
    model = (c_coef * h2v + d_coef * h1v) / rv**s
    actual = u[idx_val] / rv ** ((n - 1) / 2.0)
    scale = max(abs(actual), abs(model), 1e-280)
    residual = abs(model - actual) / scale
    if residual > 1e-6:
        raise MatchingError(
            f"free-region residual {residual:.3e} at l={l}; refine the table "
            "or move r_match outward"
        )
    delta = 0.5 * float(np.angle(d_coef / c_coef))
    return MatchResult(l=l, delta=delta, c_over_d_residual=residual)


def solve_potential_shifts(
    config: ScatterConfig, potential: PotentialModel, lmax: int
) -> list[MatchResult]:
    """delta_l for l = 0..lmax with the solver matching the potential kind."""
    if potential.kind == "hard_hypersphere":
        return [hard_sphere_shift(config, potential.a, l) for l in range(lmax + 1)]
    if potential.kind == "square_well":
        return [
            square_well_shift(config, potential.a, potential.V0, l)
            for l in range(lmax + 1)
        ]
    return [ode_shift(config, potential, l) for l in range(lmax + 1)]


# --------------------------------------------------------------------------
# JSON schema for potentials
# --------------------------------------------------------------------------


def potential_from_json(text: str) -> PotentialModel:
    """Parse {"kind": "...", "a": ..., "V0": ...} or {"kind": "tabulated",
    "r": [...], "V": [...]}."""
    payload = json.loads(text)
    try:
        kind = payload["kind"]
        if kind == "tabulated":
            return PotentialModel.tabulated(payload["r"], payload["V"])
        if kind == "square_well":
            return PotentialModel.square_well(float(payload["a"]), float(payload["V0"]))
        if kind == "hard_hypersphere":
            return PotentialModel.hard_sphere(float(payload["a"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed potential document: {exc}") from exc
    raise DomainError(f"unknown potential kind {payload.get('kind')!r}")


def potential_to_json(potential: PotentialModel) -> str:
    if potential.kind == "tabulated":
        payload = {
            "kind": "tabulated",
            "r": list(potential.r_table),
            "V": list(potential.v_table),
        }
    elif potential.kind == "square_well":
        payload = {"kind": "square_well", "a": potential.a, "V0": potential.V0}
    else:
        payload = {"kind": "hard_hypersphere", "a": potential.a}
    return json.dumps(payload, indent=2) + "\n"
