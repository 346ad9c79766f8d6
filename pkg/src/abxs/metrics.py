"""Link-performance metrics: average bit error rate and ergodic capacity.

Each metric comes in three flavours:

* a quadrature oracle integrating the SNR density directly (the reference
  every closed form is judged against),
* the exact closed form (a truncated series of Meijer G terms, with an
  automatic series-plus-quadrature hybrid when alpha/2 has no small rational
  form), and
* the high-SNR asymptote, which also yields diversity order and coding gain.

The Q-function is taken from erfc, never a polynomial fit, so the oracle is
more accurate than anything it judges.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy import integrate

from . import channel, specfun
from .channel import ChannelParams, derived_constants
from .specfun import DEFAULT_CONTROL, ConvergenceError, MeijerGSpec, SeriesControl

# Truncation policy for the k-series of the exact ABER/capacity forms:
# stricter than the handful of terms they typically need, so the truncation
# behaviour is measured rather than assumed.
METRIC_SERIES = SeriesControl(rel_tol=1e-7, max_terms=64)

# Above this denominator of alpha/2 the Meijer-G parameter count makes the
# closed form worse than quadrature; switch to the hybrid path.
_MAX_MEIJER_Q = 8


@dataclass(frozen=True)
class ModulationScheme:
    """Coefficient triple {delta1, delta2_j, delta3} of the Q-function ABER sum."""

    name: str
    delta1: float
    delta2: tuple
    delta3: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "delta2", tuple(float(v) for v in self.delta2))
        if self.delta3 < 1 or len(self.delta2) != self.delta3:
            raise ValueError("delta3 must equal len(delta2) and be >= 1")
        if not self.delta1 > 0:
            raise ValueError(f"delta1 must be positive, got {self.delta1}")
        if any(d <= 0 for d in self.delta2):
            raise ValueError("all delta2 entries must be positive")


@dataclass(frozen=True)
class AberResult:
    """ABER value plus provenance: series length and evaluation route."""

    value: float
    terms_used: int
    path: str  # meijer-g | series-quadrature | oracle | asymptotic

    def __post_init__(self) -> None:
        if self.value < -1e-12:
            raise ValueError(f"ABER is negative: {self.value}")
        object.__setattr__(self, "value", max(self.value, 0.0))


@dataclass(frozen=True)
class CapacityResult:
    """Ergodic capacity (bits per channel use) plus provenance."""

    value: float
    terms_used: int
    path: str


def modulation_coeffs(kind: str, order: int = 2) -> ModulationScheme:
    """Coefficient set for a modulation family.

    kind is one of ``bpsk``, ``mpsk``, ``mqam``, ``mfsk`` (coherent). M-QAM
    requires a square constellation. M-PSK and M-FSK use the standard
    symbol-SNR Q-function approximations.
    """
    kind = kind.lower().replace("-", "").replace("_", "")
    if kind == "bpsk":
        if order != 2:
            raise ValueError("BPSK has order 2")
        return ModulationScheme("bpsk", 1.0, (1.0,), 1)
    if kind == "mqam":
        root = math.isqrt(order)
        bits = order.bit_length() - 1
        if root * root != order or (1 << bits) != order or order < 4:
            raise ValueError(f"M-QAM needs a square power-of-two order, got {order}")
        d1 = 4.0 * (1.0 - 1.0 / root) / bits
        d3 = root // 2
        d2 = tuple(3.0 * (2 * j - 1) ** 2 / (2.0 * (order - 1)) for j in range(1, d3 + 1))
        return ModulationScheme(f"qam{order}", d1, d2, d3)
    if kind == "mpsk":
        bits = order.bit_length() - 1
        if (1 << bits) != order or order < 4:
            raise ValueError(f"M-PSK needs a power-of-two order >= 4, got {order}")
        d3 = max(order // 4, 1)
        d1 = 2.0 / bits
        d2 = tuple(math.sin((2 * j - 1) * math.pi / order) ** 2 for j in range(1, d3 + 1))
        return ModulationScheme(f"psk{order}", d1, d2, d3)
    if kind == "mfsk":
        bits = order.bit_length() - 1
        if (1 << bits) != order or order < 2:
            raise ValueError(f"M-FSK needs a power-of-two order >= 2, got {order}")
        return ModulationScheme(f"fsk{order}", order / 2.0, (0.5,), 1)
    raise ValueError(f"unsupported modulation kind {kind!r}")


def _q_func(x: float) -> float:
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def _make_aber(value: float, terms_used: int, path: str,
               mod: ModulationScheme) -> AberResult:
    bound = 0.5 * mod.delta1 * mod.delta3
    if value > bound * (1.0 + 1e-9):
        raise ValueError(f"ABER {value} exceeds the Q <= 1/2 bound {bound}")
    return AberResult(value=min(value, bound), terms_used=terms_used, path=path)


def _snr_integral(params: ChannelParams, weight, extra_breaks=(),
                  epsrel: float = 1e-11, limit: int = 200) -> float:
    """integral of weight(gamma) * f(gamma) over [0, inf).

    Splits at the natural scales, pulls the algebraic origin singularity
    (alpha*m_x < 2) into an explicit quadrature weight, and lets QUADPACK's
    rational map handle the semi-infinite tail.
    """
    dc = derived_constants(params)
    s = params.alpha * params.m_x / 2.0 - 1.0
    tail_start = params.gamma_bar * (45.0 * dc.c_alpha) ** (2.0 / params.alpha)
    breaks = sorted({params.gamma_bar, *extra_breaks})
    breaks = [x for x in breaks if 0.0 < x < tail_start] + [tail_start]

    total = 0.0
    err = 0.0
    lo = 0.0
    first = True
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for hi in breaks:
            if first and s < 0.0:
                scale = params.gamma_bar ** (-s)
                val, e = integrate.quad(
                    lambda g: weight(g) * channel._snr_pdf_smooth(params, g) * scale,
                    lo, hi, weight="alg", wvar=(s, 0.0),
                    epsabs=0.0, epsrel=epsrel, limit=limit)
            else:
                val, e = integrate.quad(lambda g: weight(g) * channel.snr_pdf(params, g),
                                        lo, hi, epsabs=0.0, epsrel=epsrel, limit=limit)
            total += val
            err += e
            lo = hi
            first = False
        val, e = integrate.quad(lambda g: weight(g) * channel.snr_pdf(params, g),
                                lo, math.inf, epsabs=1e-14, epsrel=epsrel, limit=limit)
    total += val
    err += e
    gate = max(10.0 * epsrel * abs(total), 1e-6 * abs(total), 1e-13)
    if err > gate:
        raise ConvergenceError(f"quadrature error estimate too large: {err:g} on {total:g}")
    return total


def aber_quadrature(params: ChannelParams, mod: ModulationScheme,
                    epsrel: float = 1e-11) -> AberResult:
    """ABER by direct adaptive quadrature of the Q-function expectation."""
    total = 0.0
    for d2 in mod.delta2:
        # second break marks where the Gaussian tail has died (Q ~ e^-45)
        total += _snr_integral(params, lambda g, d=d2: _q_func(math.sqrt(2.0 * d * g)),
                               extra_breaks=(1.0 / d2, 45.0 / d2), epsrel=epsrel)
    return _make_aber(mod.delta1 * total, 0, "oracle", mod)


def _aber_meijer_term(params: ChannelParams, d2: float, k: int,
                      dc) -> float:
    p, q = dc.p, dc.q
    z = ((p / d2) ** p
         / (q * dc.c_alpha * params.gamma_bar ** (params.alpha / 2.0)) ** q)
    upper = tuple((0.5 + i) / p for i in range(p)) + (1.0,)
    lower = tuple((params.m_x + k + i) / q for i in range(q)) + (0.0,)
    spec = MeijerGSpec(m=q, n=p + 1, a_params=upper, b_params=lower)
    return specfun.meijer_g(spec, z)


def _aber_series_weights(params: ChannelParams, dc, control: SeriesControl):
    """Yields (k, (m_y)_k (q bb)^k / (k! Gamma(m_x + k)))."""
    w = 1.0 / math.gamma(params.m_x)
    k = 0
    while k < control.max_terms:
        yield k, w
        w *= (params.m_y + k) * (dc.q * dc.beta_bar) / ((k + 1.0) * (params.m_x + k))
        k += 1


def aber_exact(params: ChannelParams, mod: ModulationScheme,
               control: SeriesControl = METRIC_SERIES) -> AberResult:
    """Exact ABER via the Meijer-G series.

    Sums, per Q-function component j, the k-series of G-function terms at
    argument (p/delta2_j)^p / (q C gamma_bar^(alpha/2))^q. Falls back to the
    series-plus-quadrature hybrid when alpha/2 needs a large denominator or
    the G evaluation fails.
    """
    dc = derived_constants(params)
    if dc.q is None or dc.q > _MAX_MEIJER_Q:
        return _aber_hybrid(params, mod, control)
    p, q = dc.p, dc.q
    prefactor = (mod.delta1 * math.sqrt(math.pi)
                 * (1.0 - dc.beta_bar) ** params.m_y
                 * q ** (params.m_x - 0.5)
                 / (2.0 * math.pi) ** ((p + q) / 2.0))
    total = 0.0
    terms_used = 0
    try:
        for d2 in mod.delta2:
            streak = 0
            partial = 0.0
            for k, w in _aber_series_weights(params, dc, control):
                term = w * _aber_meijer_term(params, d2, k, dc)
                partial += term
                if dc.beta_bar == 0.0:
                    terms_used = max(terms_used, 1)
                    break
                if abs(term) <= control.rel_tol * max(abs(partial), 1e-300):
                    streak += 1
                    if streak >= 3:
                        terms_used = max(terms_used, k + 1)
                        break
                else:
                    streak = 0
            else:
                raise ConvergenceError("ABER k-series exhausted max_terms")
            total += partial
    except (ConvergenceError, OverflowError):
        return _aber_hybrid(params, mod, control)
    return _make_aber(prefactor * total, terms_used, "meijer-g", mod)


def aber_exact_truncation_profile(params: ChannelParams, mod: ModulationScheme,
                                  k_max: int = 16):
    """ABER partial sums truncating the inner k-series after 1..k_max terms.

    Supports the truncation-length measurements; entry i holds the ABER with
    k <= i terms kept in every component.
    """
    dc = derived_constants(params)
    if dc.q is None or dc.q > _MAX_MEIJER_Q:
        raise ValueError("truncation profile needs the Meijer-G route")
    p, q = dc.p, dc.q
    prefactor = (mod.delta1 * math.sqrt(math.pi)
                 * (1.0 - dc.beta_bar) ** params.m_y
                 * q ** (params.m_x - 0.5)
                 / (2.0 * math.pi) ** ((p + q) / 2.0))
    per_k = [0.0] * k_max
    for d2 in mod.delta2:
        for k, w in _aber_series_weights(params, dc, SeriesControl(1e-7, k_max)):
            if k >= k_max:
                break
            per_k[k] += w * _aber_meijer_term(params, d2, k, dc)
    out = []
    acc = 0.0
    for v in per_k:
        acc += v
        out.append(prefactor * acc)
    return out


def _aber_hybrid(params: ChannelParams, mod: ModulationScheme,
                 control: SeriesControl) -> AberResult:
    """ABER through the cdf series and term-wise Laplace quadrature.

    Uses the Gaussian-tail identity: each Q-component equals
    (1/2) sqrt(d/pi) * integral of exp(-d g) g^(-1/2) F(g); substituting
    g = u^2 removes the endpoint singularity.
    """
    total = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for d2 in mod.delta2:
            def integrand(u: float, d: float = d2) -> float:
                return math.exp(-d * u * u) * channel.snr_cdf(params, u * u, control)

            upper = math.sqrt(40.0 / d2)
            val1, e1 = integrate.quad(integrand, 0.0, upper,
                                      epsabs=1e-14, epsrel=1e-10, limit=200)
            val2, e2 = integrate.quad(integrand, upper, math.inf,
                                      epsabs=1e-14, epsrel=1e-10, limit=200)
            total += math.sqrt(d2 / math.pi) * (val1 + val2)
    return _make_aber(mod.delta1 * total, 0, "series-quadrature", mod)


def aber_asymptotic(params: ChannelParams, mod: ModulationScheme) -> AberResult:
    """High-SNR ABER: the single-term power law G_c * gamma_bar^(-G_d)."""
    gd = diversity_order(params)
    return AberResult(value=coding_gain(params, mod) * params.gamma_bar ** (-gd),
                      terms_used=1, path="asymptotic")  # upper bound may exceed 1/2 at low SNR


def diversity_order(params: ChannelParams) -> float:
    """Log-log ABER slope at high SNR: (alpha/2) * m_x, shadowing-independent."""
    return 0.5 * params.alpha * params.m_x


def coding_gain(params: ChannelParams, mod: ModulationScheme) -> float:
    """G_c with aber_asymptotic = G_c * gamma_bar^(-G_d); depends on the modulation."""
    dc = derived_constants(params)
    gd = diversity_order(params)
    log_c = (math.log(mod.delta1)
             + params.m_y * math.log1p(-dc.beta_bar)
             + math.lgamma(gd + 0.5)
             - math.log(2.0) - 0.5 * math.log(math.pi)
             - params.m_x * math.log(dc.c_alpha)
             - math.lgamma(params.m_x + 1.0))
    return math.exp(log_c) * sum(d ** (-gd) for d in mod.delta2)


def capacity_quadrature(params: ChannelParams) -> float:
    """Ergodic capacity (bits per channel use) by direct quadrature."""
    ln2 = math.log(2.0)
    return _snr_integral(params, lambda g: math.log1p(g) / ln2, extra_breaks=(1.0,))


def capacity_exact(params: ChannelParams,
                   control: SeriesControl = METRIC_SERIES) -> CapacityResult:
    """Exact ergodic capacity via the Meijer-G series.

    The G terms here always carry an integer pole collision (a doubled zero
    parameter), so they evaluate on the Mellin-Barnes contour; the collision
    warning is expected and suppressed.
    """
    dc = derived_constants(params)
    if dc.q is None or dc.q > _MAX_MEIJER_Q:
        return _capacity_hybrid(params, control)
    p, q = dc.p, dc.q
    prefactor = (q ** (params.m_x - 0.5) * (1.0 - dc.beta_bar) ** params.m_y
                 / ((2.0 * math.pi) ** ((q - 3.0) / 2.0 + p) * math.log(2.0)))
    z = (1.0 / (q * dc.c_alpha * params.gamma_bar ** (params.alpha / 2.0))) ** q
    upper = tuple(i / p for i in range(p)) + (1.0,)
    total = 0.0
    terms_used = 0
    streak = 0
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", specfun.PrecisionWarning)
            for k, w in _aber_series_weights(params, dc, control):
                lower = (tuple(i / p for i in range(p))
                         + tuple((params.m_x + k + i) / q for i in range(q))
                         + (0.0,))
                spec = MeijerGSpec(m=q + p + 1, n=p, a_params=upper, b_params=lower)
                term = w * specfun.meijer_g(spec, z)
                total += term
                if dc.beta_bar == 0.0:
                    terms_used = 1
                    break
                if abs(term) <= control.rel_tol * max(abs(total), 1e-300):
                    streak += 1
                    if streak >= 3:
                        terms_used = k + 1
                        break
                else:
                    streak = 0
            else:
                raise ConvergenceError("capacity k-series exhausted max_terms")
    except (ConvergenceError, OverflowError):
        return _capacity_hybrid(params, control)
    return CapacityResult(value=prefactor * total, terms_used=terms_used, path="meijer-g")


def _capacity_hybrid(params: ChannelParams, control: SeriesControl) -> CapacityResult:
    """Capacity via quadrature of ccdf(gamma) / (1 + gamma) / ln 2."""
    def integrand(g: float) -> float:
        return channel.snr_ccdf(params, g, control) / (1.0 + g)

    tail = params.gamma_bar * (45.0 * derived_constants(params).c_alpha) ** (2.0 / params.alpha)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val1, _ = integrate.quad(integrand, 0.0, min(params.gamma_bar, tail),
                                 epsabs=1e-13, epsrel=1e-10, limit=200)
        val2, _ = integrate.quad(integrand, min(params.gamma_bar, tail), tail,
                                 epsabs=1e-13, epsrel=1e-10, limit=200)
        val3, _ = integrate.quad(integrand, tail, math.inf,
                                 epsabs=1e-13, epsrel=1e-10, limit=200)
    return CapacityResult(value=(val1 + val2 + val3) / math.log(2.0),
                          terms_used=0, path="series-quadrature")


def capacity_asymptotic(params: ChannelParams,
                        control: SeriesControl = DEFAULT_CONTROL) -> float:
    """High-SNR ergodic capacity.

    (2 / (alpha ln 2)) [ln(C gamma_bar^(alpha/2)) + psi(m_x)
                        + (1-bb)^m_y d/da 2F1(m_x, m_y; m_x; bb)].
    """
    dc = derived_constants(params)
    if dc.beta_bar == 0.0:
        deriv = 0.0
    else:
        deriv = specfun.gauss_2f1_da(params.m_x, params.m_y, params.m_x,
                                     dc.beta_bar, control)
    bracket = (math.log(dc.c_alpha) + 0.5 * params.alpha * math.log(params.gamma_bar)
               + specfun.digamma(params.m_x)
               + (1.0 - dc.beta_bar) ** params.m_y * deriv)
    return 2.0 / (params.alpha * math.log(2.0)) * bracket
