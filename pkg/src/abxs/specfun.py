"""Scalar special-function kernel in IEEE double precision.

Provides the gamma family (log-gamma, digamma, rising factorial, regularized
incomplete gammas), Kummer's 1F1, the Gauss 2F1 and its derivative with
respect to the first parameter, the bivariate confluent Appell function Phi2,
and a real-argument Meijer G evaluator.

All series share one stopping rule: stop once three consecutive terms fall
below ``rel_tol`` times the magnitude of the partial sum (guards against a
premature stop on sign-alternating series). Alternating series that would
lose precision to cancellation are accumulated in compensated double-double
arithmetic; no arbitrary-precision library is used anywhere.

The Meijer G evaluator sums the residue (Slater) expansion when the
contributing poles are simple and the sum is well conditioned, and falls back
to numerical Mellin-Barnes contour integration on a vertical line otherwise.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np


class ConvergenceError(ArithmeticError):
    """A series or contour quadrature failed to stabilize within its budget."""


class PrecisionWarning(UserWarning):
    """A degraded evaluation path had to be taken (e.g. pole collision)."""


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for the infinite series in this module."""

    rel_tol: float = 1e-14
    max_terms: int = 10000

    def __post_init__(self) -> None:
        if not (self.rel_tol > 0.0):
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.max_terms < 1:
            raise ValueError(f"max_terms must be >= 1, got {self.max_terms}")


DEFAULT_CONTROL = SeriesControl()

# Stop once this many consecutive terms are below rel_tol * |partial sum|.
_STOP_STREAK = 3

_LN_SQRT_2PI = 0.9189385332046727418
_EULER_GAMMA = 0.5772156649015328606


# ---------------------------------------------------------------------------
# compensated (double-double) arithmetic
#
# A value is a (hi, lo) pair with hi + lo exact to ~32 significant digits.
# Used only where series terms alternate in sign and the plain double sum
# would cancel away the answer.
# ---------------------------------------------------------------------------


def _two_sum(a: float, b: float):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a: float):
    t = 134217729.0 * a  # 2**27 + 1
    hi = t - (t - a)
    return hi, a - hi


def _two_prod(a: float, b: float):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _dd_add(x, y):
    s, e = _two_sum(x[0], y[0])
    e += x[1] + y[1]
    return _two_sum(s, e)


def _dd_mul(x, y):
    p, e = _two_prod(x[0], y[0])
    e += x[0] * y[1] + x[1] * y[0]
    return _two_sum(p, e)


def _dd_div(x, y):
    q1 = x[0] / y[0]
    r = _dd_add(x, _dd_mul(y, (-q1, 0.0)))
    q2 = r[0] / y[0]
    r = _dd_add(r, _dd_mul(y, (-q2, 0.0)))
    q3 = r[0] / y[0]
    s, e = _two_sum(q1, q2)
    return _two_sum(s, e + q3)


# ---------------------------------------------------------------------------
# gamma family
# ---------------------------------------------------------------------------


def lgamma(x: float) -> float:
    """Natural log of Gamma(x) for x > 0."""
    if not x > 0.0:
        raise ValueError(f"lgamma requires x > 0, got {x}")
    return math.lgamma(x)


def _is_nonpositive_integer(x: float, tol: float = 1e-9) -> bool:
    r = round(x)
    return r <= 0 and abs(x - r) <= tol


def _signed_loggamma(x: float):
    """(log|Gamma(x)|, sign of Gamma(x)) for any non-pole real x."""
    if x > 0.0:
        return math.lgamma(x), 1.0
    if _is_nonpositive_integer(x, tol=0.0):
        raise ValueError(f"Gamma pole at x = {x}")
    sign = 1.0 if math.floor(x) % 2 == 0 else -1.0
    return math.lgamma(x), sign


# Asymptotic expansion coefficients B_2n / (2n) for psi(x) ~ ln x - 1/(2x) - sum c_n / x^2n.
_DIGAMMA_ASYMP = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)


def digamma(x: float) -> float:
    """psi(x) for x > 0, via upward recurrence plus the asymptotic series."""
    if not x > 0.0:
        raise ValueError(f"digamma requires x > 0, got {x}")
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    tail = 0.0
    power = inv2
    for c in _DIGAMMA_ASYMP:
        tail += c * power
        power *= inv2
    return acc + math.log(x) - 0.5 / x - tail


def pochhammer(a: float, k: int) -> float:
    """Rising factorial (a)_k = a (a+1) ... (a+k-1), with (a)_0 = 1."""
    if k < 0:
        raise ValueError(f"pochhammer requires k >= 0, got {k}")
    out = 1.0
    for i in range(k):
        out *= a + i
    return out


def reg_lower_inc_gamma(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x).

    Power series for x < a + 1, continued fraction for the complement
    otherwise (the CEPHES igam/igamc scheme), both scaled through lgamma.
    """
    if not a > 0.0:
        raise ValueError(f"reg_lower_inc_gamma requires a > 0, got {a}")
    if x < 0.0:
        raise ValueError(f"reg_lower_inc_gamma requires x >= 0, got {x}")
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        return _igam_series(a, x)
    return 1.0 - _igamc_cf(a, x)


def reg_upper_inc_gamma(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).

    Evaluates whichever of the series/continued-fraction pair is naturally
    small, so neither tail is computed by cancellation.
    """
    if not a > 0.0:
        raise ValueError(f"reg_upper_inc_gamma requires a > 0, got {a}")
    if x < 0.0:
        raise ValueError(f"reg_upper_inc_gamma requires x >= 0, got {x}")
    if x == 0.0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _igam_series(a, x)
    return _igamc_cf(a, x)


def _log_prefactor(a: float, x: float) -> float:
    return a * math.log(x) - x - math.lgamma(a)

def _igam_series(a: float, x: float) -> float:
    ax = _log_prefactor(a, x)
    if ax < -745.0:
        return 1.0 if x > a else 0.0
    r = a
    c = 1.0
    total = 1.0
    while c > total * 1e-17:
        r += 1.0
        c *= x / r
        total += c
    return math.exp(ax) * total / a


def _igamc_cf(a: float, x: float) -> float:
    ax = _log_prefactor(a, x)
    if ax < -745.0:
        return 0.0 if x > a else 1.0
    big = 4.503599627370496e15
    biginv = 2.22044604925031308085e-16
    y = 1.0 - a
    z = x + y + 1.0
    c = 0.0
    p3, q3 = 1.0, x
    p2, q2 = x + 1.0, z * x
    ans = p2 / q2
    while True:
        c += 1.0
        y += 1.0
        z += 2.0
        yc = y * c
        p = p2 * z - p3 * yc
        q = q2 * z - q3 * yc
        if q != 0.0:
            nxt = p / q
            err = abs((ans - nxt) / nxt)
            ans = nxt
        else:
            err = 1.0
        p3, p2 = p2, p
        q3, q2 = q2, q
        if abs(p) > big:
            p3 *= biginv
            p2 *= biginv
            q3 *= biginv
            q2 *= biginv
        if err <= 1e-17:
            break
    return math.exp(ax) * ans


# ---------------------------------------------------------------------------
# hypergeometric series
# ---------------------------------------------------------------------------


def _hyp_series_dd(num, den, x: float, control: SeriesControl):
    """Double-double variant of :func:`_hyp_series`; returns ((hi, lo), max_mag).

    Parameters may be floats or (hi, lo) pairs; pairs keep exactly-known
    sums like c + k free of a rounding that outer cancellation would amplify.
    """
    num = [p if isinstance(p, tuple) else (p, 0.0) for p in num]
    den = [p if isinstance(p, tuple) else (p, 0.0) for p in den]
    for d in den:
        if _is_nonpositive_integer(d[0] + d[1]):
            raise ValueError(f"series denominator parameter is a nonpositive integer: {d}")
    term = (1.0, 0.0)
    total = (1.0, 0.0)
    max_mag = 1.0
    streak = 0
    for k in range(control.max_terms):
        for u in num:
            term = _dd_mul(term, _dd_add(u, (float(k), 0.0)))
        term = _dd_mul(term, (x, 0.0))
        for d in den:
            term = _dd_div(term, _dd_add(d, (float(k), 0.0)))
        term = _dd_div(term, (float(k + 1), 0.0))
        total = _dd_add(total, term)
        mag = abs(term[0])
        max_mag = max(max_mag, mag)
        if mag <= control.rel_tol * max(abs(total[0]), 1e-300):
            streak += 1
            if streak >= _STOP_STREAK:
                return total, max_mag
        else:
            streak = 0
    raise ConvergenceError("hypergeometric series exhausted max_terms")


def _hyp_series(num, den, x: float, control: SeriesControl, compensated: bool):
    """sum_k prod(num)_k / prod(den)_k * x^k / k! with the shared stopping rule.

    Returns (value, max_abs_term). ``den`` entries must avoid nonpositive
    integers. Compensated mode keeps terms and sum in double-double precision
    so alternating series survive cancellation up to ~1e18 amplification.
    """
    if compensated:
        total, max_mag = _hyp_series_dd(num, den, x, control)
        return total[0] + total[1], max_mag
    for d in den:
        if _is_nonpositive_integer(d):
            raise ValueError(f"series denominator parameter is a nonpositive integer: {d}")
    term = 1.0
    total = 1.0
    max_mag = 1.0
    streak = 0
    for k in range(control.max_terms):
        for u in num:
            term *= u + k
        term *= x
        for d in den:
            term /= d + k
        term /= k + 1.0
        total += term
        mag = abs(term)
        max_mag = max(max_mag, mag)
        if not math.isfinite(total):
            raise OverflowError("hypergeometric series overflowed")
        if mag <= control.rel_tol * max(abs(total), 1e-300):
            streak += 1
            if streak >= _STOP_STREAK:
                return total, max_mag
        else:
            streak = 0
    raise ConvergenceError("hypergeometric series exhausted max_terms")


def kummer_1f1(a: float, b: float, x: float, control: SeriesControl = DEFAULT_CONTROL) -> float:
    """Kummer's confluent hypergeometric 1F1(a; b; x) for real arguments, b > 0.

    Nonnegative x is summed directly (terms are single-signed for a >= 0, so
    the sum is stable up to the exp overflow boundary). Negative x is routed
    through the Kummer transformation 1F1(a;b;x) = e^x 1F1(b-a;b;-x), which
    replaces an exponentially cancelling alternating series with a stable one.
    """
    if not b > 0.0:
        raise ValueError(f"kummer_1f1 requires b > 0, got {b}")
    if x == 0.0:
        return 1.0
    if x > 0.0:
        if x > 709.0:
            raise OverflowError(
                f"kummer_1f1 argument {x} exceeds the exp overflow boundary; "
                "use a log-scaled path"
            )
        value, _ = _hyp_series((a,), (b,), x, control, compensated=a < 0.0)
        return value
    if x < -745.0:
        return 0.0  # e^x underflows; the transformed series stays O(x^-a)
    value, _ = _hyp_series((b - a,), (b,), -x, control, compensated=(b - a) < 0.0)
    return math.exp(x) * value


def _kummer_transformed(a: float, b: float, x: float,
                        control: SeriesControl = DEFAULT_CONTROL) -> float:
    """1F1 via e^x 1F1(b-a; b; -x) with compensated summation.

    Cross-check twin for :func:`kummer_1f1` on moderate positive x, where the
    transformed series alternates and cancels by ~e^x. Compensated arithmetic
    keeps that affordable up to x ~ 60.
    """
    if not b > 0.0:
        raise ValueError(f"_kummer_transformed requires b > 0, got {b}")
    value, _ = _hyp_series((b - a,), (b,), -x, control, compensated=True)
    return math.exp(x) * value


def _gauss_2f1_series(a: float, b: float, c: float, z: float,
                      control: SeriesControl = DEFAULT_CONTROL) -> float:
    value, _ = _hyp_series((a, b), (c,), z, control, compensated=z < 0.0)
    return value


def gauss_2f1(a: float, b: float, c: float, z: float,
              control: SeriesControl = DEFAULT_CONTROL) -> float:
    """Gauss hypergeometric 2F1(a, b; c; z) for real z < 1, c > 0.

    Direct series on [0, 1); the Pfaff transformation maps z < 0 into [0, 1),
    choosing whichever of the two Pfaff variants keeps the new numerator
    parameters nonnegative when possible.
    """
    if not c > 0.0:
        raise ValueError(f"gauss_2f1 requires c > 0, got {c}")
    if z >= 1.0:
        raise ValueError(f"gauss_2f1 requires z < 1, got {z}")
    if z == 0.0:
        return 1.0
    if z < 0.0:
        w = z / (z - 1.0)  # in (0, 1)
        if c - b >= 0.0 or a >= 0.0:
            return (1.0 - z) ** (-a) * _gauss_2f1_series(a, c - b, c, w, control)
        return (1.0 - z) ** (-b) * _gauss_2f1_series(c - a, b, c, w, control)
    return _gauss_2f1_series(a, b, c, z, control)


def gauss_2f1_da(a: float, b: float, c: float, z: float,
                 control: SeriesControl = DEFAULT_CONTROL) -> float:
    """d/da 2F1(a, b; c; z) for |z| < 1.

    Series sum_{n>=1} [(a)_n (b)_n / ((c)_n n!)] (psi(a+n) - psi(a)) z^n; the
    digamma difference is accumulated as the harmonic increment sum 1/(a+i).
    """
    if not c > 0.0:
        raise ValueError(f"gauss_2f1_da requires c > 0, got {c}")
    if not abs(z) < 1.0:
        raise ValueError(f"gauss_2f1_da requires |z| < 1, got {z}")
    if z == 0.0:
        return 0.0
    coeff = 1.0  # (a)_n (b)_n z^n / ((c)_n n!)
    harmonic = 0.0  # psi(a+n) - psi(a)
    total = 0.0
    max_mag = 0.0
    streak = 0
    for n in range(control.max_terms):
        coeff *= (a + n) * (b + n) * z / ((c + n) * (n + 1.0))
        harmonic += 1.0 / (a + n)
        term = coeff * harmonic
        total += term
        max_mag = max(max_mag, abs(term))
        if abs(term) <= control.rel_tol * max(abs(total), 1e-300):
            streak += 1
            if streak >= _STOP_STREAK:
                return total
        else:
            streak = 0
    raise ConvergenceError("gauss_2f1_da series exhausted max_terms")


def appell_phi2(b1: float, b2: float, c: float, x: float, y: float,
                control: SeriesControl = DEFAULT_CONTROL) -> float:
    """Confluent Appell Phi2(b1, b2; c; x, y).

    Evaluated through the single-series expansion in 1F1 kernels,

        Phi2 = sum_k [(b2)_k y^k / ((c)_k k!)] 1F1(b1; c + k; x),

    which is validated against the normative double series in the test suite.
    The outer sum is compensated so alternating-sign arguments keep accuracy.
    """
    if not c > 0.0:
        raise ValueError(f"appell_phi2 requires c > 0, got {c}")
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError("appell_phi2 requires finite x, y")
    if y == 0.0:
        return kummer_1f1(b1, c, x, control)
    if y < 0.0:
        return _phi2_alternating(b1, b2, c, x, y, control)
    weight = 1.0  # (b2)_k y^k / ((c)_k k!)
    total = 0.0
    streak = 0
    for k in range(control.max_terms):
        term = weight * kummer_1f1(b1, c + k, x, control)
        total += term
        if abs(term) <= control.rel_tol * max(abs(total), 1e-300) and k >= 1:
            streak += 1
            if streak >= _STOP_STREAK:
                return total
        else:
            streak = 0
        weight *= (b2 + k) * y / ((c + k) * (k + 1.0))
    raise ConvergenceError("appell_phi2 series exhausted max_terms")


def _phi2_alternating(b1: float, b2: float, c: float, x: float, y: float,
                      control: SeriesControl) -> float:
    """Phi2 for y < 0: the outer series alternates and cancels by ~e^|y|.

    Everything (weights, inner 1F1 kernels, accumulation) stays in
    double-double precision; for x < 0 the inner kernels are Kummer-flipped
    with the common e^x factor pulled out so no float-level noise gets
    amplified by the cancellation.
    """
    flip = x < 0.0
    # Inner kernels are huge against the cancelled total, so their truncation
    # error must sit near the double-double floor, not at control.rel_tol.
    tight = SeriesControl(rel_tol=1e-30, max_terms=max(control.max_terms, 20000))
    weight = (1.0, 0.0)
    total = (0.0, 0.0)
    streak = 0
    for k in range(control.max_terms):
        ck = _two_sum(c, float(k))  # c + k without a rounding
        if flip:
            num = _dd_add(ck, (-b1, 0.0))
            inner, _ = _hyp_series_dd((num,), (ck,), -x, tight)
        else:
            inner, _ = _hyp_series_dd((b1,), (ck,), x, tight)
        term = _dd_mul(weight, inner)
        total = _dd_add(total, term)
        if abs(term[0]) <= tight.rel_tol * max(abs(total[0]), 1e-300) and k >= 1:
            streak += 1
            if streak >= _STOP_STREAK:
                value = total[0] + total[1]
                return value * math.exp(x) if flip else value
        else:
            streak = 0
        weight = _dd_mul(weight, _two_sum(b2, float(k)))
        weight = _dd_mul(weight, (y, 0.0))
        weight = _dd_div(weight, _two_sum(c, float(k)))
        weight = _dd_div(weight, (float(k + 1), 0.0))
    raise ConvergenceError("appell_phi2 series exhausted max_terms")


def _log_1f1_large_x(a: float, b: float, x: float, terms: int = 12) -> float:
    """log 1F1(a; b; x) from the large-x asymptotic expansion (x >> 1).

    1F1 ~ Gamma(b)/Gamma(a) e^x x^(a-b) sum_k (b-a)_k (1-a)_k / (k! x^k).
    Serves callers whose arguments exceed the exp overflow boundary.
    """
    s = 1.0
    term = 1.0
    for k in range(terms):
        term *= (b - a + k) * (1.0 - a + k) / ((k + 1.0) * x)
        s += term
        if abs(term) < 1e-16 * abs(s):
            break
    return math.lgamma(b) - math.lgamma(a) + x + (a - b) * math.log(x) + math.log(s)


# ---------------------------------------------------------------------------
# Meijer G
#
# Convention: G^{m,n}_{p,q}(z | a; b) is the Mellin-Barnes integral of
#
#   Phi(s) = prod_{j<=m} Gamma(b_j - s) prod_{j<=n} Gamma(1 - a_j + s)
#          / [prod_{j>m} Gamma(1 - b_j + s) prod_{j>n} Gamma(a_j - s)] * z^s
#
# along a vertical line separating the ascending pole ladders s = b_j + l
# (j <= m) from the descending ladders s = a_j - 1 - l (j <= n).
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MeijerGSpec:
    """Order indices and parameter lists of a Meijer G function.

    ``m`` counts the lower parameters whose gamma factors contribute the
    ascending pole ladders picked up by the residue series; ``n`` counts the
    contributing upper parameters.
    """

    m: int
    n: int
    a_params: tuple
    b_params: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "a_params", tuple(float(v) for v in self.a_params))
        object.__setattr__(self, "b_params", tuple(float(v) for v in self.b_params))
        if not (0 <= self.m <= len(self.b_params)):
            raise ValueError(f"need 0 <= m <= len(b_params), got m={self.m}")
        if not (0 <= self.n <= len(self.a_params)):
            raise ValueError(f"need 0 <= n <= len(a_params), got n={self.n}")
        for v in self.a_params + self.b_params:
            if not math.isfinite(v):
                raise ValueError("Meijer G parameters must be finite")


class _SlaterUnstable(Exception):
    """Residue series rejected (cancellation, overflow, or degenerate params)."""


# Cancellation budgets: max acceptable ratio of largest magnitude seen to the
# final magnitude. Plain doubles keep ~16 digits, double-double ~32.
_PLAIN_CANCEL = 1e4
_DD_CANCEL = 1e18
_CROSS_TERM_CANCEL = 3e3


def meijer_g(spec: MeijerGSpec, z: float, control: SeriesControl = DEFAULT_CONTROL) -> float:
    """Evaluate G^{m,n}_{p,q}(z | a; b) for real parameters and z > 0.

    Residue (Slater) series when every contributing pole is simple and the
    sum is well conditioned; otherwise numerical Mellin-Barnes contour
    integration. Pole collisions (contributing lower parameters differing by
    an integer) force the contour and emit a :class:`PrecisionWarning`.
    """
    if not (z > 0.0 and math.isfinite(z)):
        raise ValueError(f"meijer_g requires finite z > 0, got {z}")
    p = len(spec.a_params)
    q = len(spec.b_params)
    if p > q or (p == q and z > 1.0):
        flipped = MeijerGSpec(
            m=spec.n,
            n=spec.m,
            a_params=tuple(1.0 - b for b in spec.b_params),
            b_params=tuple(1.0 - a for a in spec.a_params),
        )
        return meijer_g(flipped, 1.0 / z, control)
    if spec.m == 0:
        raise ConvergenceError("meijer_g needs at least one contributing lower parameter")
    if p == q and z == 1.0:
        return _meijer_contour(spec, z, control)
    if _has_pole_collision(spec):
        warnings.warn(
            "Meijer G pole collision: falling back to Mellin-Barnes contour",
            PrecisionWarning,
            stacklevel=2,
        )
        return _meijer_contour(spec, z, control)
    try:
        return _meijer_slater(spec, z, control)
    except _SlaterUnstable:
        return _meijer_contour(spec, z, control)


def _has_pole_collision(spec: MeijerGSpec, tol: float = 1e-9) -> bool:
    bs = spec.b_params[: spec.m]
    for i in range(len(bs)):
        for j in range(i + 1, len(bs)):
            d = bs[i] - bs[j]
            if abs(d - round(d)) <= tol:
                return True
    return False


def _meijer_slater(spec: MeijerGSpec, z: float, control: SeriesControl) -> float:
    a, b = spec.a_params, spec.b_params
    m, n = spec.m, spec.n
    p, q = len(a), len(b)
    lnz = math.log(z)
    sign_w = 1.0 if (p - m - n) % 2 == 0 else -1.0
    w = sign_w * z

    values = []
    noise_floor = 0.0  # absolute scale at which each term's accuracy bottoms out
    for h in range(m):
        bh = b[h]
        logmag = bh * lnz
        sign = 1.0
        for j in range(m):
            if j == h:
                continue
            lg, sg = _signed_loggamma(b[j] - bh)
            logmag += lg
            sign *= sg
        degenerate = False
        for j in range(n):
            arg = 1.0 + bh - a[j]
            if _is_nonpositive_integer(arg):
                raise _SlaterUnstable  # numerator pole: expansion degenerates
            lg, sg = _signed_loggamma(arg)
            logmag += lg
            sign *= sg
        for j in range(m, q):
            arg = 1.0 + bh - b[j]
            if _is_nonpositive_integer(arg):
                degenerate = True  # denominator pole kills this residue
                break
            lg, sg = _signed_loggamma(arg)
            logmag -= lg
            sign *= sg
        if not degenerate:
            for j in range(n, p):
                arg = a[j] - bh
                if _is_nonpositive_integer(arg):
                    degenerate = True
                    break
                lg, sg = _signed_loggamma(arg)
                logmag -= lg
                sign *= sg
        if degenerate:
            values.append(0.0)
            continue
        if logmag > 700.0:
            raise _SlaterUnstable
        num = tuple(1.0 + bh - aj for aj in a)
        den = tuple(1.0 + bh - b[j] for j in range(q) if j != h)
        try:
            series, max_term = _hyp_series(num, den, w, control, compensated=False)
        except (ConvergenceError, OverflowError, ValueError):
            raise _SlaterUnstable
        scale = math.exp(logmag)
        if max_term > _PLAIN_CANCEL * max(abs(series), 1e-300):
            if max_term > _DD_CANCEL * max(abs(series), 1e-300):
                raise _SlaterUnstable
            try:
                series, max_term = _hyp_series(num, den, w, control, compensated=True)
            except (ConvergenceError, OverflowError, ValueError):
                raise _SlaterUnstable
            noise_floor = max(noise_floor, scale * max_term * 1e-30)
        else:
            noise_floor = max(noise_floor, scale * max_term * 1e-15)
        values.append(sign * scale * series)

    total = math.fsum(values)
    peak = max((abs(v) for v in values), default=0.0)
    if total == 0.0 and peak > 0.0:
        raise _SlaterUnstable
    if peak > _CROSS_TERM_CANCEL * abs(total) or noise_floor > 1e-9 * abs(total):
        raise _SlaterUnstable
    return total


# Lanczos g=7, n=9 coefficients (Godfrey); ~1e-13 relative over the half-plane.
_LANCZOS_G = 7.0
_LANCZOS_C = np.array(
    [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ]
)


def _logsin(v: np.ndarray) -> np.ndarray:
    """A branch of log(sin(v)), stable for large |Im v|; exp() recovers sin."""
    out = np.empty_like(v)
    pos = v.imag >= 0.0
    vp = v[pos]
    out[pos] = -1j * vp + np.log((np.exp(2j * vp) - 1.0) / 2j)
    vn = v[~pos]
    out[~pos] = 1j * vn + np.log((1.0 - np.exp(-2j * vn)) / 2j)
    return out


def _clgamma(w: np.ndarray) -> np.ndarray:
    """A branch of log Gamma over complex arrays; exp() recovers Gamma."""
    w = np.asarray(w, dtype=complex)
    out = np.empty_like(w)
    refl = w.real < 0.5
    if refl.any():
        out[refl] = math.log(math.pi) - _logsin(np.pi * w[refl]) - _clgamma_core(1.0 - w[refl])
    if (~refl).any():
        out[~refl] = _clgamma_core(w[~refl])
    return out


def _clgamma_core(w: np.ndarray) -> np.ndarray:
    zz = w - 1.0
    x = np.full_like(zz, _LANCZOS_C[0])
    for i in range(1, len(_LANCZOS_C)):
        x += _LANCZOS_C[i] / (zz + i)
    t = zz + _LANCZOS_G + 0.5
    return _LN_SQRT_2PI + (zz + 0.5) * np.log(t) - t + np.log(x)


def _meijer_contour(spec: MeijerGSpec, z: float, control: SeriesControl) -> float:
    """G via trapezoidal Mellin-Barnes quadrature on a vertical line."""
    a, b = spec.a_params, spec.b_params
    m, n = spec.m, spec.n
    p, q = len(a), len(b)
    decay = m + n - 0.5 * (p + q)
    if decay <= 1e-12:
        raise ConvergenceError("Mellin-Barnes integrand does not decay for these orders")
    right_min = min(b[:m])
    if n > 0:
        left_max = max(a[:n]) - 1.0
        if left_max >= right_min - 1e-12:
            raise ConvergenceError("no vertical line separates the Meijer G pole ladders")
        sigma = 0.5 * (left_max + right_min)
    else:
        sigma = right_min - 0.5
    lnz = math.log(z)

    def log_integrand(t: np.ndarray) -> np.ndarray:
        s = sigma + 1j * t
        tot = np.zeros_like(s)
        for bj in b[:m]:
            tot += _clgamma(bj - s)
        for aj in a[:n]:
            tot += _clgamma(1.0 - aj + s)
        for bj in b[m:]:
            tot -= _clgamma(1.0 - bj + s)
        for aj in a[n:]:
            tot -= _clgamma(aj - s)
        return tot + s * lnz

    # Truncation point: march outward until the integrand is ~1e-20 of its peak.
    t_max = max(8.0, (50.0 + abs(lnz)) / (math.pi * decay))
    grid = np.linspace(0.0, t_max, 129)
    logf = log_integrand(grid)
    peak = logf.real.max()
    while logf.real[-1] - peak > -46.0:
        t_max *= 1.5
        if t_max > 2e4:
            raise ConvergenceError("Mellin-Barnes truncation point not found")
        grid = np.linspace(0.0, t_max, 129)
        logf = log_integrand(grid)
        peak = max(peak, logf.real.max())

    h = 0.25
    prev = None
    value = None
    for _ in range(9):
        t = np.arange(0.0, t_max + h, h)
        lf = log_integrand(t)
        vals = np.exp(lf - peak)
        weights = np.real(vals)
        integral = h * (0.5 * weights[0] + weights[1:].sum())
        if prev is not None and abs(integral - prev) <= 1e-12 * max(abs(integral), 1e-280):
            value = integral
            break
        prev = integral
        h *= 0.5
    if value is None:
        if prev is not None and abs(integral - prev) <= 1e-9 * max(abs(integral), 1e-280):
            value = integral
        else:
            raise ConvergenceError("Mellin-Barnes quadrature failed to stabilize")
    if value == 0.0:
        return 0.0
    log_out = peak + math.log(abs(value) / math.pi)
    if log_out > 709.0:
        raise OverflowError("Meijer G value overflows double precision")
    return math.copysign(math.exp(log_out), value)
