"""The alpha-Beaulieu-Xie shadowed fading model.

Channel parameters, derived constants, exact and asymptotic SNR statistics
(pdf / cdf / ccdf), envelope moments, and the baseline (alpha = 2)
Beaulieu-Xie shadowed envelope density used by the reduction tests.

All quantities are in linear units; dB conversion happens at the CLI
boundary only. Everything here is scalar, pure and thread-safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from . import specfun
from .specfun import DEFAULT_CONTROL, SeriesControl


@dataclass(frozen=True)
class ChannelParams:
    """The six model parameters.

    m_x: overall fading severity (> 0, no half-integer floor)
    m_y: line-of-sight shadowing severity (> 0)
    omega_x: scattered (NLoS) power, linear (> 0)
    omega_y: specular (LoS) power, linear (>= 0)
    alpha: propagation nonlinearity exponent (> 0)
    gamma_bar: average SNR, linear (> 0)
    """

    m_x: float
    m_y: float
    omega_x: float
    omega_y: float
    alpha: float
    gamma_bar: float

    def __post_init__(self) -> None:
        validate(self)


def validate(params: ChannelParams) -> ChannelParams:
    """Check the parameter invariants; returns the params unchanged."""
    for name in ("m_x", "m_y", "omega_x", "alpha", "gamma_bar"):
        v = getattr(params, name)
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
            raise ValueError(f"{name} must be a positive finite number, got {v!r}")
    oy = params.omega_y
    if not (isinstance(oy, (int, float)) and math.isfinite(oy) and oy >= 0):
        raise ValueError(f"omega_y must be finite and >= 0, got {oy!r}")
    return params


def rationalize_alpha(alpha: float, tol: float = 1e-9, max_q: int = 32):
    """Smallest-denominator (p, q) with |p/q - alpha/2| <= tol and gcd(p,q)=1.

    Raises ValueError when no denominator up to ``max_q`` fits: such an alpha
    is too irrational for the Meijer-G route and callers fall back to
    quadrature.
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    x = alpha / 2.0
    for q in range(1, max_q + 1):
        p = round(x * q)
        if p >= 1 and abs(p / q - x) <= tol:
            g = math.gcd(p, q)
            return p // g, q // g
    raise ValueError(
        f"alpha/2 = {x} has no rational approximation within {tol} "
        f"for denominators up to {max_q}"
    )


def beta_bar(params: ChannelParams) -> float:
    """LoS power fraction m_x*omega_y / (m_y*omega_x + m_x*omega_y), in [0, 1)."""
    num = params.m_x * params.omega_y
    return num / (params.m_y * params.omega_x + num)


def c_alpha(params: ChannelParams) -> float:
    """Normalization constant of the SNR distribution (forces E{gamma} = gamma_bar)."""
    return derived_constants(params).c_alpha


def mho_alpha(params: ChannelParams) -> float:
    """Mean square of the normalized alpha-root envelope (documented intermediate)."""
    return derived_constants(params).mho_alpha


@dataclass(frozen=True)
class DerivedConstants:
    """Per-parameter-set constants shared by the statistics and metrics.

    ``p``/``q`` are the reduced numerator/denominator of alpha/2, or None when
    alpha/2 has no small rational approximation (quadrature-only regime).
    """

    c_alpha: float
    beta_bar: float
    mho_alpha: float
    p: int | None
    q: int | None


@lru_cache(maxsize=256)
def derived_constants(params: ChannelParams) -> DerivedConstants:
    bb = beta_bar(params)
    two_over_alpha = 2.0 / params.alpha
    if params.omega_y == 0.0:
        hyp = 1.0
    else:
        z = -params.m_x * params.omega_y / (params.m_y * params.omega_x)
        hyp = specfun.gauss_2f1(params.m_y, -two_over_alpha, params.m_x, z)
    log_c = (math.lgamma(params.m_x) - math.lgamma(params.m_x + two_over_alpha)
             - math.log(hyp)) / two_over_alpha
    c = math.exp(log_c)
    # Mean square of the alpha-root envelope after power normalization; the
    # normalized envelope has unit mean-square by construction.
    mho = (params.omega_x
           / (params.m_x * c * (params.omega_x + params.omega_y))) ** two_over_alpha
    try:
        p, q = rationalize_alpha(params.alpha)
    except ValueError:
        p, q = None, None
    return DerivedConstants(c_alpha=c, beta_bar=bb, mho_alpha=mho, p=p, q=q)


def envelope_moment(params: ChannelParams, k: float) -> float:
    """k-th raw moment of the (unnormalized) envelope, E{R^k}."""
    if not k > 0:
        raise ValueError(f"moment order must be positive, got {k}")
    if params.omega_y == 0.0:
        hyp = 1.0
    else:
        z = -params.m_x * params.omega_y / (params.m_y * params.omega_x)
        hyp = specfun.gauss_2f1(params.m_y, -k / 2.0, params.m_x, z)
    log_ratio = math.lgamma(params.m_x + k / 2.0) - math.lgamma(params.m_x)
    return hyp * math.exp(log_ratio) * (params.omega_x / params.m_x) ** (k / 2.0)


def _log_1f1(a: float, b: float, x: float, control: SeriesControl) -> float:
    """log 1F1(a; b; x) for x >= 0, switching to the asymptotic form late."""
    if x > 650.0:
        return specfun._log_1f1_large_x(a, b, x)
    return math.log(specfun.kummer_1f1(a, b, x, control))


def snr_pdf(params: ChannelParams, gamma: float,
            control: SeriesControl = DEFAULT_CONTROL) -> float:
    """Instantaneous-SNR density f(gamma).

    At gamma = 0 the density is 0 for alpha*m_x > 2, finite for
    alpha*m_x = 2, and unbounded for alpha*m_x < 2 (reported as inf so
    downstream integrals keep working).
    """
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    dc = derived_constants(params)
    exponent = params.alpha * params.m_x / 2.0 - 1.0
    if gamma == 0.0:
        if exponent > 0.0:
            return 0.0
        base = (params.alpha * (1.0 - dc.beta_bar) ** params.m_y
                / (2.0 * dc.c_alpha ** params.m_x * math.gamma(params.m_x)
                   * params.gamma_bar))
        return base if exponent == 0.0 else math.inf
    ratio = gamma / params.gamma_bar
    u = ratio ** (params.alpha / 2.0) / dc.c_alpha
    log_f = (math.log(params.alpha / 2.0)
             + params.m_y * math.log1p(-dc.beta_bar)
             - params.m_x * math.log(dc.c_alpha)
             - math.lgamma(params.m_x)
             - math.log(params.gamma_bar)
             + exponent * math.log(ratio)
             - u
             + _log_1f1(params.m_y, params.m_x, dc.beta_bar * u, control))
    if log_f > 709.0:
        return math.inf
    return math.exp(log_f)


def _cdf_weights(params: ChannelParams, control: SeriesControl):
    """Series weights (1-bb)^m_y (m_y)_k bb^k / k! and shapes m_x + k."""
    dc = derived_constants(params)
    bb = dc.beta_bar
    scale = (1.0 - bb) ** params.m_y
    w = scale
    k = 0
    out = []
    while True:
        out.append((w, params.m_x + k))
        if bb == 0.0:
            break
        w_next = w * (params.m_y + k) * bb / (k + 1.0)
        # positive weights summing to 1; stop once the remainder is negligible
        if w_next < control.rel_tol * scale and k >= 2:
            break
        if k + 1 >= control.max_terms:
            raise specfun.ConvergenceError("cdf series weights exhausted max_terms")
        w = w_next
        k += 1
    return out


def snr_cdf(params: ChannelParams, gamma: float,
            control: SeriesControl = DEFAULT_CONTROL) -> float:
    """SNR distribution function via the incomplete-gamma series (primary path)."""
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    if gamma == 0.0:
        return 0.0
    dc = derived_constants(params)
    u = (gamma / params.gamma_bar) ** (params.alpha / 2.0) / dc.c_alpha
    total = 0.0
    for w, shape in _cdf_weights(params, control):
        total += w * specfun.reg_lower_inc_gamma(shape, u)
    return min(total, 1.0)


def snr_ccdf(params: ChannelParams, gamma: float,
             control: SeriesControl = DEFAULT_CONTROL) -> float:
    """Complementary cdf via the upper-incomplete-gamma series."""
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    if gamma == 0.0:
        return 1.0
    dc = derived_constants(params)
    u = (gamma / params.gamma_bar) ** (params.alpha / 2.0) / dc.c_alpha
    total = 0.0
    for w, shape in _cdf_weights(params, control):
        total += w * specfun.reg_upper_inc_gamma(shape, u)
    return min(total, 1.0)


def snr_cdf_phi2(params: ChannelParams, gamma: float,
                 control: SeriesControl = DEFAULT_CONTROL) -> float:
    """Cross-validation route for the cdf through the Appell Phi2 function.

    F = (1-bb)^m_y u^m_x e^-u Phi2(1, m_y; m_x + 1; u, bb*u) / Gamma(m_x + 1).
    Overflows for u beyond the exp range; intended for moderate arguments.
    """
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    if gamma == 0.0:
        return 0.0
    dc = derived_constants(params)
    u = (gamma / params.gamma_bar) ** (params.alpha / 2.0) / dc.c_alpha
    if u > 650.0:
        raise OverflowError("snr_cdf_phi2 argument too large; use snr_cdf")
    phi2 = specfun.appell_phi2(1.0, params.m_y, params.m_x + 1.0, u,
                               dc.beta_bar * u, control)
    log_f = (params.m_y * math.log1p(-dc.beta_bar) + params.m_x * math.log(u)
             - u - math.lgamma(params.m_x + 1.0))
    return math.exp(log_f) * phi2


def snr_pdf_asymptotic(params: ChannelParams, gamma: float) -> float:
    """High-mean-SNR density approximation (confluent factor dropped)."""
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    dc = derived_constants(params)
    exponent = params.alpha * params.m_x / 2.0 - 1.0
    if gamma == 0.0:
        if exponent > 0.0:
            return 0.0
        base = (params.alpha * (1.0 - dc.beta_bar) ** params.m_y
                / (2.0 * dc.c_alpha ** params.m_x * math.gamma(params.m_x)
                   * params.gamma_bar))
        return base if exponent == 0.0 else math.inf
    ratio = gamma / params.gamma_bar
    u = ratio ** (params.alpha / 2.0) / dc.c_alpha
    log_f = (math.log(params.alpha / 2.0)
             + params.m_y * math.log1p(-dc.beta_bar)
             - params.m_x * math.log(dc.c_alpha)
             - math.lgamma(params.m_x)
             - math.log(params.gamma_bar)
             + exponent * math.log(ratio)
             - u)
    if log_f > 709.0:
        return math.inf
    return math.exp(log_f)


def snr_cdf_asymptotic(params: ChannelParams, gamma: float) -> float:
    """High-mean-SNR cdf approximation: the bare power law."""
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    if gamma == 0.0:
        return 0.0
    dc = derived_constants(params)
    ratio = gamma / params.gamma_bar
    log_f = (params.m_y * math.log1p(-dc.beta_bar)
             - params.m_x * math.log(dc.c_alpha)
             - math.lgamma(params.m_x + 1.0)
             + (params.alpha * params.m_x / 2.0) * math.log(ratio))
    return math.exp(log_f)


def bxs_envelope_pdf(params: ChannelParams, r: float,
                     control: SeriesControl = DEFAULT_CONTROL) -> float:
    """Envelope density of the baseline (alpha = 2) Beaulieu-Xie shadowed model.

    Reference form for the alpha = 2 reduction tests and the sampler check;
    the nonlinearity exponent is ignored.
    """
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r}")
    if r == 0.0:
        if params.m_x > 0.5:
            return 0.0
        if params.m_x == 0.5:
            bb = beta_bar(params)
            return (2.0 * (1.0 - bb) ** params.m_y
                    * (params.m_x / params.omega_x) ** params.m_x
                    / math.gamma(params.m_x))
        return math.inf
    bb = beta_bar(params)
    t = params.m_x * r * r / params.omega_x
    log_f = (math.log(2.0) + (2.0 * params.m_x - 1.0) * math.log(r)
             - math.lgamma(params.m_x)
             + params.m_y * math.log1p(-bb)
             + params.m_x * math.log(params.m_x / params.omega_x)
             - t
             + _log_1f1(params.m_y, params.m_x, bb * t, control))
    if log_f > 709.0:
        return math.inf
    return math.exp(log_f)


def bxs_power_pdf(params: ChannelParams, w: float,
                  control: SeriesControl = DEFAULT_CONTROL) -> float:
    """Density of the envelope power W = R^2 for the baseline model."""
    if w < 0:
        raise ValueError(f"w must be >= 0, got {w}")
    if w == 0.0:
        # f_W ~ const * w^(m_x - 1) near the origin
        if params.m_x > 1.0:
            return 0.0
        if params.m_x < 1.0:
            return math.inf
        bb = beta_bar(params)
        return ((1.0 - bb) ** params.m_y * (params.m_x / params.omega_x) ** params.m_x
                / math.gamma(params.m_x))
    rw = math.sqrt(w)
    return bxs_envelope_pdf(params, rw, control) / (2.0 * rw)


def _snr_pdf_smooth(params: ChannelParams, gamma: float,
                    control: SeriesControl = DEFAULT_CONTROL) -> float:
    """f(gamma) with the (gamma/gamma_bar)^(alpha*m_x/2 - 1) factor removed.

    Finite at the origin; lets quadrature treat the endpoint singularity as an
    explicit algebraic weight.
    """
    dc = derived_constants(params)
    base = (params.alpha * (1.0 - dc.beta_bar) ** params.m_y
            / (2.0 * dc.c_alpha ** params.m_x * math.gamma(params.m_x)
               * params.gamma_bar))
    if gamma == 0.0:
        return base
    u = (gamma / params.gamma_bar) ** (params.alpha / 2.0) / dc.c_alpha
    v = dc.beta_bar * u
    log_rest = -u + _log_1f1(params.m_y, params.m_x, v, control)
    return base * math.exp(log_rest)
