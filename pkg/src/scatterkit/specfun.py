"""Special-function kernels for finite-distance scattering fields.

Radial solutions of the free equation in n spatial dimensions are spherical
Hankel functions of order nu = l + (n-3)/2: integer nu in odd dimension,
half-integer nu in even dimension.  Two independent evaluation routes are
kept side by side:

* route A rewrites h_nu^(1,2)(z) as a unimodular phase times the function

      calY_nu(z) = (2/z)^(nu+1) * U(nu+1, 2(nu+1), 2/z),

  which collapses to the Bessel polynomial y_nu(z) for integer nu and is an
  infinite logarithmic series for half-integer nu;

* route B goes through ordinary Bessel functions J, Y of order nu + 1/2.

The two routes are compared against each other in the test suite; production
field assembly uses route B, which is fast and uniformly accurate.

All functions here are pure and safe for concurrent use.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np
from scipy.special import jv, yv

from .errors import (
    ConsistencyError,
    DomainError,
    OverflowGuardError,
    PoleError,
    TruncationError,
)

__all__ = [
    "SeriesControl",
    "DEFAULT_SERIES",
    "Order",
    "gamma_ln",
    "reciprocal_gamma",
    "digamma",
    "pochhammer",
    "gegenbauer",
    "gegenbauer_table",
    "bessel_polynomial",
    "bessel_polynomial_coefficients",
    "tricomi_u_integer_b",
    "calY",
    "caly_from_hankel",
    "spherical_hankel",
    "spherical_bessel_j",
    "hankel_basis",
    "spherical_jn_basis",
]

_EPS = float(np.finfo(float).eps)

# Largest |z| at which the logarithmic U series is summed in float64.  The
# series cancels internally and against the finite 1/z^k part, with measured
# worst-case error growth ~ |z|^a on the usage domain; beyond this the same
# series is re-summed in extended precision with a digit budget scaled to
# |z| and a.
_F64_SERIES_LIMIT = 0.5


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for the infinite series kernels.

    rel_tol is a relative tolerance on the partial sum, max_terms the hard
    term budget, underflow_guard an absolute floor below which terms count
    as converged regardless of the partial sum.
    """

    rel_tol: float = 1e-12
    max_terms: int = 500
    underflow_guard: float = 1e-300

    def __post_init__(self) -> None:
        if not self.rel_tol > 0 or self.rel_tol < 100 * _EPS:
            raise DomainError(
                f"rel_tol must satisfy 100*eps <= rel_tol, got {self.rel_tol}"
            )
        if self.max_terms < 16:
            raise DomainError(f"max_terms must be >= 16, got {self.max_terms}")
        if not self.underflow_guard > 0:
            raise DomainError("underflow_guard must be positive")


DEFAULT_SERIES = SeriesControl()


@dataclass(frozen=True)
class Order:
    """Radial order nu = l + (n-3)/2 for partial wave l in dimension n.

    2*nu = 2l + n - 3 is held as an exact integer so the odd/even dimension
    dispatch (integer vs half-integer nu) never relies on float parity.
    """

    l: int
    n: int

    def __post_init__(self) -> None:
        if self.l < 0:
            raise DomainError(f"partial-wave index must be >= 0, got l={self.l}")
        if self.n < 1:
            raise DomainError(f"dimension must be >= 1, got n={self.n}")

    @property
    def two_nu(self) -> int:
        return 2 * self.l + self.n - 3

    @property
    def nu(self) -> float:
        return 0.5 * self.two_nu

    @property
    def bessel_order(self) -> float:
        """Order nu + 1/2 of the ordinary Bessel functions (route B)."""
        return 0.5 * (self.two_nu + 1)

    @property
    def is_polynomial(self) -> bool:
        """True when nu is an integer, i.e. in odd spatial dimension."""
        return self.two_nu % 2 == 0


# --------------------------------------------------------------------------
# gamma, digamma, Pochhammer
# --------------------------------------------------------------------------

_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-06,
    1.5056327351493116e-07,
)


def gamma_ln(x: complex) -> complex:
    """log Gamma(x) via a 9-term Lanczos sum, reflection for Re x < 1/2.

    exp(gamma_ln(x)) equals Gamma(x); the imaginary part is not normalised
    to a particular branch.
    """
    x = complex(x)
    if x.imag == 0.0 and x.real <= 0.0 and x.real == round(x.real):
        raise PoleError(f"Gamma pole at x={x.real}")
    if x.real < 0.5:
        # Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return cmath.log(math.pi / cmath.sin(math.pi * x)) - gamma_ln(1.0 - x)
    x -= 1.0
    acc = complex(_LANCZOS[0])
    for i in range(1, len(_LANCZOS)):
        acc += _LANCZOS[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    return (
        0.5 * math.log(2.0 * math.pi)
        + (x + 0.5) * cmath.log(t)
        - t
        + cmath.log(acc)
    )


def reciprocal_gamma(x: float) -> float:
    """1/Gamma(x) for real x, exactly 0 at the poles x = 0, -1, -2, ..."""
    if x <= 0.0 and x == round(x):
        return 0.0
    return cmath.exp(-gamma_ln(x)).real


def digamma(x: float) -> float:
    """psi(x) by upward recurrence into x >= 10 plus the Bernoulli tail.

    Negative non-integer arguments go through the reflection
    psi(1-x) - psi(x) = pi cot(pi x).
    """
    x = float(x)
    if x <= 0.0 and x == round(x):
        raise PoleError(f"digamma pole at x={x}")
    if x < 0.0:
        return digamma(1.0 - x) - math.pi / math.tan(math.pi * x)
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    # psi(x) ~ ln x - 1/(2x) - sum_k B_2k / (2k x^2k)
    inv2 = 1.0 / (x * x)
    tail = 0.0
    p = inv2
    for c in (
        -1.0 / 12.0,
        1.0 / 120.0,
        -1.0 / 252.0,
        1.0 / 240.0,
        -1.0 / 132.0,
        691.0 / 32760.0,
        -1.0 / 12.0,
    ):
        tail += c * p
        p *= inv2
    return acc + math.log(x) - 0.5 / x + tail


def pochhammer(alpha: float, m: int) -> float:
    """Rising factorial (alpha)_m = alpha (alpha+1) ... (alpha+m-1).

    Computed as a plain product so zero factors (negative integer alpha)
    come out exactly zero instead of tripping Gamma poles.
    """
    if m < 0:
        raise DomainError(f"pochhammer count must be >= 0, got m={m}")
    out = 1.0
    for i in range(m):
        out *= alpha + i
    return out


# --------------------------------------------------------------------------
# Gegenbauer polynomials
# --------------------------------------------------------------------------


def gegenbauer_table(lmax: int, lam: float, x: np.ndarray) -> np.ndarray:
    """C_l^lam(x) for l = 0..lmax by the three-term recurrence, vectorised in x.

    Valid for lam != 0; the planar lam = 0 case is handled by callers with
    the cos(l*theta) closed form.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((lmax + 1,) + x.shape, dtype=float)
    out[0] = 1.0
    if lmax >= 1:
        out[1] = 2.0 * lam * x
    for l in range(2, lmax + 1):
        out[l] = (2.0 * (l + lam - 1.0) * x * out[l - 1] - (l + 2.0 * lam - 2.0) * out[l - 2]) / l
    return out


def gegenbauer(l: int, lam: float, x: float) -> float:
    """Gegenbauer polynomial C_l^lam(x) on [-1, 1].

    lam = 1/2 gives the Legendre polynomial.  lam = 0 (planar problems) is
    rejected: that limit is handled at the amplitude level with cos(l*theta)
    and a degeneracy weight.  lam = -1/2 (the one-dimensional angular basis)
    is only defined here at x = +-1, where the generating function
    (1 - 2xt + t^2)^(1/2) = |1 -+ t| terminates.
    """
    if l < 0:
        raise DomainError(f"degree must be >= 0, got l={l}")
    if abs(x) > 1.0:
        raise DomainError(f"argument must lie in [-1, 1], got x={x}")
    if lam == 0.0:
        raise DomainError("lam=0 is the planar case; use the cos(l*theta) form")
    if lam == -0.5:
        if x == 1.0:
            return 1.0 if l == 0 else (-1.0 if l == 1 else 0.0)
        if x == -1.0:
            return 1.0 if l <= 1 else 0.0
        raise DomainError("lam=-1/2 is supported only at x=+-1 (forward/backward)")
    return float(gegenbauer_table(l, lam, np.float64(x))[l])


# --------------------------------------------------------------------------
# Bessel polynomials and the Tricomi function with integer second parameter
# --------------------------------------------------------------------------


def bessel_polynomial_coefficients(nu: int) -> list[int]:
    """Exact integer coefficients c_j = (nu+j)!/(j!(nu-j)!) of y_nu(z) in (z/2)^j."""
    if nu < 0:
        raise DomainError(f"polynomial degree must be >= 0, got nu={nu}")
    coeffs = [1]
    c = 1
    for j in range(nu):
        c = c * (nu + j + 1) * (nu - j) // (j + 1)
        coeffs.append(c)
    return coeffs


def bessel_polynomial(nu: int, z: complex) -> complex:
    """Bessel polynomial y_nu(z) = sum_j (nu+j)!/(j!(nu-j)!) (z/2)^j, Horner form.

    nu = -1 is admitted with the standard convention y_{-1} = 1.
    """
    if nu == -1:
        return 1.0 + 0.0j
    coeffs = bessel_polynomial_coefficients(nu)
    w = complex(z) / 2.0
    acc = complex(coeffs[-1])
    for c in reversed(coeffs[:-1]):
        acc = acc * w + c
    return acc


def _u_negative_integer_a(p: int, m: int, z: complex) -> complex:
    # U(-p, m+1, z) is the degree-p polynomial (-1)^p p! L_p^(m)(z).
    acc = 0.0 + 0.0j
    for k in range(p + 1):
        acc += math.comb(p, k) * pochhammer(m + 1 + k, p - k) * (-z) ** k
    return (-1.0) ** p * acc


def _u_log_series_f64(a: float, m: int, z: complex, control: SeriesControl) -> complex:
    out = 0.0 + 0.0j
    zinv = 1.0 / z
    fin = 0.0 + 0.0j
    for k in range(1, m + 1):
        fin += (
            math.factorial(k - 1)
            * pochhammer(1.0 - a + k, m - k)
            / math.factorial(m - k)
        ) * zinv**k
    out += fin * reciprocal_gamma(a)

    rg = reciprocal_gamma(a - m)
    if rg != 0.0:
        pref = ((-1.0) ** (m + 1) / math.factorial(m)) * rg
        logz = cmath.log(z)
        term_c = 1.0 + 0.0j  # (a)_k / ((m+1)_k k!) z^k, updated in place
        d_a = digamma(a)
        d_1 = digamma(1.0)
        d_m = digamma(m + 1.0)
        consecutive_small = 0
        for k in range(control.max_terms):
            term = pref * term_c * (logz + d_a - d_1 - d_m)
            out += term
            # convergence is judged against the full value (finite part
            # included): the two parts cancel, so the series' own partial
            # sum is the wrong yardstick
            if abs(term) <= max(control.rel_tol * abs(out), control.underflow_guard):
                consecutive_small += 1
                if consecutive_small >= 3:
                    break
            else:
                consecutive_small = 0
            term_c *= z * (a + k) / ((m + 1 + k) * (k + 1))
            d_a += 1.0 / (a + k)
            d_1 += 1.0 / (1.0 + k)
            d_m += 1.0 / (m + 1.0 + k)
        else:
            raise TruncationError(
                f"U(a={a}, b={m + 1}, z={z}): series not converged in "
                f"{control.max_terms} terms"
            )
    return out


def _u_log_series_mp(a: float, m: int, z: complex, control: SeriesControl) -> complex:
    # Same series as above, summed with enough guard digits to absorb the
    # cancellation before rounding back to complex128: the terms peak near
    # e^|z| while the sum is O(|z|^-a).
    dps = 30 + int(0.45 * abs(z)) + int(abs(a) * math.log10(abs(z) + 2.0))
    with mp.workdps(dps):
        za = mp.mpc(z)
        aa = mp.mpf(a)
        out = mp.mpc(0)
        fin = mp.mpc(0)
        zinv = 1 / za
        for k in range(1, m + 1):
            fin += (
                mp.factorial(k - 1)
                * mp.rf(1 - aa + k, m - k)
                / mp.factorial(m - k)
            ) * zinv**k
        out += fin / mp.gamma(aa)

        am = aa - m
        if not (am <= 0 and am == mp.floor(am)):
            pref = mp.mpf((-1) ** (m + 1)) / (mp.factorial(m) * mp.gamma(am))
            logz = mp.log(za)
            term_c = mp.mpc(1)
            d_a = mp.digamma(aa)
            d_1 = mp.digamma(1)
            d_m = mp.digamma(m + 1)
            consecutive_small = 0
            for k in range(control.max_terms):
                term = pref * term_c * (logz + d_a - d_1 - d_m)
                out += term
                if abs(term) <= max(control.rel_tol * abs(out), control.underflow_guard):
                    consecutive_small += 1
                    if consecutive_small >= 3:
                        break
                else:
                    consecutive_small = 0
                term_c *= za * (aa + k) / ((m + 1 + k) * (k + 1))
                d_a += 1 / (aa + k)
                d_1 += mp.mpf(1) / (1 + k)
                d_m += mp.mpf(1) / (m + 1 + k)
            else:
                raise TruncationError(
                    f"U(a={a}, b={m + 1}, z={z}): series not converged in "
                    f"{control.max_terms} terms"
                )
        return complex(out)


def tricomi_u_integer_b(
    a: float, m: int, z: complex, control: SeriesControl = DEFAULT_SERIES
) -> complex:
    """Tricomi confluent hypergeometric U(a, m+1, z) for integer m >= 0.

    Uses the logarithmic expansion

        U(a, m+1, z) = (-1)^(m+1)/(m! Gamma(a-m))
                       * sum_k (a)_k/((m+1)_k k!) z^k
                         [ln z + psi(a+k) - psi(1+k) - psi(m+k+1)]
                     + (1/Gamma(a)) sum_{k=1}^m (k-1)! (1-a+k)_{m-k}/(m-k)! z^-k.

    When a - m is a non-positive integer the 1/Gamma(a-m) factor kills the
    logarithmic series and only the finite sum survives; that is exactly the
    odd-dimension reduction to the Bessel polynomial.  Matches the asymptotic
    behaviour U ~ z^-a for large |z|.
    """
    if m < 0:
        raise DomainError(f"second parameter m must be >= 0, got {m}")
    if z == 0:
        raise DomainError("U(a, m+1, z) requires z != 0")
    a = float(a)
    z = complex(z)
    if a == 0.0:
        return 1.0 + 0.0j
    if a < 0.0 and a == round(a):
        return _u_negative_integer_a(int(-a), m, z)
    if abs(z) <= _F64_SERIES_LIMIT:
        return _u_log_series_f64(a, m, z, control)
    return _u_log_series_mp(a, m, z, control)


# --------------------------------------------------------------------------
# calY and the spherical Hankel functions
# --------------------------------------------------------------------------


def calY(order: Order, z: complex, control: SeriesControl = DEFAULT_SERIES) -> complex:
    """calY_nu(z) = (2/z)^(nu+1) U(nu+1, 2(nu+1), 2/z) at nu = l + (n-3)/2.

    Integer nu (odd dimension) collapses to the Bessel polynomial y_nu(z);
    half-integer nu (even dimension) goes through the logarithmic U series.
    calY_nu(z) -> 1 as z -> 0, which is the large-distance limit of the
    radial phase/modulus corrections.
    """
    if z == 0:
        raise DomainError("calY requires z != 0")
    tn = order.two_nu
    if tn == -2:
        return 1.0 + 0.0j  # y_{-1} is identically 1
    if tn % 2 == 0:
        return bessel_polynomial(tn // 2, z)
    nu = 0.5 * tn
    w = 2.0 / complex(z)
    return w ** (nu + 1.0) * tricomi_u_integer_b(nu + 1.0, tn + 1, w, control)


def caly_from_hankel(order: Order, z: float) -> complex:
    """calY_nu(-1/(iz)) recovered by inverting the outgoing Hankel rewrite.

    h_nu^(1)(z) = e^{i(z - nu pi/2)} (1/(iz)) calY_nu(-1/(iz)), so the value
    follows from the ordinary-Bessel route; this is the cross-validation
    partner of calY (route A) at standard precision.
    """
    h1 = spherical_hankel(1, order, z)
    nu = order.nu
    return 1j * z * h1 * cmath.exp(-1j * (z - nu * math.pi / 2.0))


def spherical_hankel(
    kind: int,
    order: Order,
    z: float,
    control: SeriesControl = DEFAULT_SERIES,
    method: str = "bessel",
) -> complex:
    """Spherical Hankel function h_nu^(kind)(z), nu = l + (n-3)/2, real z > 0.

    method="bessel" (route B) uses sqrt(pi/2z) (J_{nu+1/2} +- i Y_{nu+1/2});
    method="caly" (route A) uses the phase-times-calY rewrite.  For nu = -1
    (n=1, l=0) the closed forms h^{(1,2)}_{-1}(z) = e^{+-iz}/z are used
    directly; downward recurrences from nu=0 are unstable there.
    """
    if kind not in (1, 2):
        raise DomainError(f"kind must be 1 or 2, got {kind}")
    if not z > 0:
        raise DomainError(f"argument must be real and > 0, got z={z}")
    sign = 1.0 if kind == 1 else -1.0
    if order.two_nu == -2:
        return cmath.exp(sign * 1j * z) / z
    if method == "bessel":
        o = order.bessel_order
        val = math.sqrt(math.pi / (2.0 * z)) * complex(jv(o, z), sign * yv(o, z))
        if not (math.isfinite(val.real) and math.isfinite(val.imag)):
            raise OverflowGuardError(
                f"h_nu^{kind} overflow at nu={order.nu}, z={z}"
            )
        return val
    if method == "caly":
        nu = order.nu
        phase = cmath.exp(sign * 1j * (z - nu * math.pi / 2.0))
        y = calY(order, sign * 1j / z, control)
        return sign * phase * y / (1j * z)
    raise DomainError(f"unknown method {method!r}")


def spherical_bessel_j(
    order: Order, z: float, control: SeriesControl = DEFAULT_SERIES
) -> float:
    """j_nu(z) as the half-sum of the two Hankel kinds.

    The imaginary parts cancel; a residual above rel_tol signals a broken
    conjugation between the two kinds and raises.
    """
    h1 = spherical_hankel(1, order, z, control)
    h2 = spherical_hankel(2, order, z, control)
    j = 0.5 * (h1 + h2)
    if abs(j.imag) > control.rel_tol * max(abs(j), 1e-280):
        raise ConsistencyError(
            f"imaginary residual {j.imag} in j_nu at nu={order.nu}, z={z}"
        )
    return j.real


# --------------------------------------------------------------------------
# Vectorised radial bases for field assembly
# --------------------------------------------------------------------------


def hankel_basis(n: int, lmax: int, z: float) -> tuple[np.ndarray, np.ndarray]:
    """(h^(2), h^(1)) at orders nu_l = l + (n-3)/2 for l = 0..lmax (route B).

    Returns two complex arrays of length lmax+1.
    """
    if not z > 0:
        raise DomainError(f"argument must be real and > 0, got z={z}")
    orders = np.arange(lmax + 1) + (n - 2) / 2.0  # nu_l + 1/2
    pref = math.sqrt(math.pi / (2.0 * z))
    jj = jv(orders, z)
    yy = yv(orders, z)
    h1 = pref * (jj + 1j * yy)
    h2 = pref * (jj - 1j * yy)
    if n == 1:
        # l = 0 has nu = -1; pin the closed form used by the scalar route
        h1 = h1.copy()
        h2 = h2.copy()
        h1[0] = cmath.exp(1j * z) / z
        h2[0] = cmath.exp(-1j * z) / z
    if not (np.all(np.isfinite(h1.view(float))) and np.all(np.isfinite(h2.view(float)))):
        raise OverflowGuardError(f"Hankel overflow for lmax={lmax}, n={n}, z={z}")
    return h2, h1


def spherical_jn_basis(n: int, lmax: int, z: float) -> np.ndarray:
    """j_nu at orders nu_l = l + (n-3)/2 for l = 0..lmax, real array."""
    if not z > 0:
        raise DomainError(f"argument must be real and > 0, got z={z}")
    orders = np.arange(lmax + 1) + (n - 2) / 2.0
    out = math.sqrt(math.pi / (2.0 * z)) * jv(orders, z)
    if n == 1:
        out = out.copy()
        out[0] = math.cos(z) / z  # j_{-1}
    if not np.all(np.isfinite(out)):
        raise OverflowGuardError(f"j_nu overflow for lmax={lmax}, n={n}, z={z}")
    return out
