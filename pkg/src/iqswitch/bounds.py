"""Analytic queue-length bounds for the saturated-face heavy-traffic regime.

Implements the geometric drift tail/moment bounds, the policy-independent
lower bound on the steady-state total queue, the collapse moment constants
for the perpendicular queue component, and the matching upper/lower
bracket around (1 - 1/(2n)) ||sigma||^2 / epsilon, together with its
uniform-Bernoulli and load-scaling specializations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ConfigError
from .model import TrafficModel

_E = math.e


def _pow(base: float, exp: float) -> float:
    try:
        return base**exp
    except OverflowError:
        return math.inf


def _mul(*xs: float) -> float:
    out = 1.0
    for x in xs:
        try:
            out = out * x
        except OverflowError:
            return math.inf
        if math.isinf(out):
            return math.inf
    return out


@dataclass(frozen=True)
class DriftParams:
    """Geometric drift data: negative drift eta beyond level kappa, with
    one-slot changes bounded by d_max."""

    kappa: float
    eta: float
    d_max: float

    def __post_init__(self):
        if self.kappa < 0:
            raise ConfigError("kappa must be nonnegative")
        if not self.eta > 0:
            raise ConfigError("eta must be positive")
        if self.eta > self.d_max:
            raise ConfigError("eta cannot exceed the one-slot change bound d_max")


def drift_tail_bound(params: DriftParams, m: int) -> float:
    """Stationary tail bound P(Z > kappa + 2 d_max m) <= (d/(d+eta))^(m+1)."""
    if m < 0:
        raise ConfigError("m must be a nonnegative integer")
    return (params.d_max / (params.d_max + params.eta)) ** (m + 1)


def drift_moment_bound(params: DriftParams, r: int) -> float:
    """Stationary moment bound E[Z^r] <= (2 kappa)^r + (4 d)^r ((d+eta)/eta)^r r!.

    Values beyond double range come back as +inf.
    """
    if r < 1:
        raise ConfigError("r must be a positive integer")
    try:
        fact = float(math.factorial(r))
    except OverflowError:
        return math.inf
    head = _pow(2.0 * params.kappa, r)
    tail = _mul(
        _pow(4.0 * params.d_max, r),
        _pow((params.d_max + params.eta) / params.eta, r),
        fact,
    )
    return head + tail


def universal_lower_bound(model: TrafficModel) -> float:
    """Lower bound on the steady-state mean total queue under any policy.

    ||sigma||^2 / (2 epsilon) - n (1 - epsilon) / 2, obtained by letting
    each input port race a single-server queue that it can never beat.
    """
    eps = model.epsilon
    return model.sigma_sq_total / (2.0 * eps) - model.n * (1.0 - eps) / 2.0


def ssc_moment_constant(model: TrafficModel, r: int) -> float:
    """Constant M_r with E[||q_perp||^r] <= M_r^r in the collapse regime.

    Valid for integer r >= 1 whenever epsilon <= nu_min / (2 ||nu||); the
    value is returned regardless, so callers should consult
    validate_traffic or model.ssc_threshold for applicability.
    """
    if r < 1:
        raise ConfigError("r must be a positive integer")
    nu_min = model.nu_min
    if nu_min <= 0:
        raise ConfigError("collapse constant needs every port rate positive")
    n = model.n
    a_max = float(model.a_max)
    first = 8.0 * (model.lam_sq_total + model.sigma_sq_total + n) / nu_min
    second = _mul(
        _pow(math.sqrt(r) * _E, 1.0 / r),
        16.0 * r / _E,
        n * a_max / nu_min,
        n * a_max + 1.0,
    )
    return _mul(_pow(2.0, 1.0 / r), max(first, second))


def ssc_drift_threshold(model: TrafficModel) -> float:
    """Level above which ||q_perp|| has negative expected one-step drift.

    Equals 4 (||lambda||^2 + ||sigma||^2 + n) / nu_min.  Conditional
    drift estimates of the perpendicular norm above this level should be
    nonpositive; the level is loose, so empirical thresholds (for
    example the observed mean of ||q_perp||) give a sharper diagnostic.
    """
    nu_min = model.nu_min
    if nu_min <= 0:
        raise ConfigError("drift threshold needs every port rate positive")
    return 4.0 * (model.lam_sq_total + model.sigma_sq_total + model.n) / nu_min


def bernoulli_ssc_constant(n: int, r: int) -> float:
    """Closed form of ssc_moment_constant for the uniform Bernoulli model."""
    if r < 1:
        raise ConfigError("r must be a positive integer")
    return _mul(
        _pow(2.0 * math.sqrt(r) * _E, 1.0 / r),
        16.0 * r / _E,
        float(n) ** 2,
        n + 1.0,
    )


@dataclass(frozen=True)
class BoundReport:
    """Two-sided bound with the quantities that built it.

    applicable is False when the inputs sit outside the regime the formula
    was derived for; the numbers are still reported.  No clamping is done,
    so lower may be negative and either side may be +/-inf on overflow.
    """

    lower: float
    upper: float
    applicable: bool
    terms: dict = field(default_factory=dict)
    notes: tuple = ()

    def __post_init__(self):
        if not (self.lower <= self.upper or math.isnan(self.lower) or math.isnan(self.upper)):
            raise ConfigError(f"bound inverted: [{self.lower}, {self.upper}]")


def _require_bracket_r(r: int):
    if r < 2:
        raise ConfigError("bracket formulas need integer r >= 2")


def heavy_traffic_bracket(model: TrafficModel, r: int = 2) -> BoundReport:
    """Two-sided bound on the mean total queue under max-weight scheduling.

    centre (1 - 1/(2n)) ||sigma||^2 / epsilon, with slack terms built from
    the collapse constant M_r.  Flagged not applicable when epsilon
    exceeds nu_min / (2 ||nu||).
    """
    _require_bracket_r(r)
    n = model.n
    eps = model.epsilon
    m_r = ssc_moment_constant(model, r)
    leading = (1.0 - 1.0 / (2.0 * n)) * model.sigma_sq_total / eps
    pen = _mul(_pow(float(n), 2.0 - 1.0 / r), _pow(eps, -1.0 / r), m_r)
    slack_low = -n * eps / 2.0 + n + 3.0 * pen
    slack_high = n * (1.0 + eps) / 2.0 + 2.0 * pen
    applicable = eps <= model.ssc_threshold
    notes = ()
    if not applicable:
        notes = (
            f"epsilon={eps:g} above collapse threshold {model.ssc_threshold:g}",
        )
    if math.isinf(pen):
        notes = notes + ("slack overflowed to inf",)
    return BoundReport(
        lower=leading - slack_low,
        upper=leading + slack_high,
        applicable=applicable,
        terms={
            "leading": leading,
            "sigma_sq": model.sigma_sq_total,
            "m_r": m_r,
            "slack_low": slack_low,
            "slack_high": slack_high,
            "r": r,
        },
        notes=notes,
    )


def bernoulli_bracket(n: int, epsilon: float, r: int = 2) -> BoundReport:
    """heavy_traffic_bracket specialized to uniform Bernoulli arrivals.

    centre (n - 3/2 + 1/(2n)) / epsilon; agrees term by term with the
    general bracket evaluated on bernoulli_uniform(n, epsilon).  Flagged
    not applicable when epsilon > 1/(2n).
    """
    _require_bracket_r(r)
    if not 0.0 < epsilon < 1.0:
        raise ConfigError("epsilon must lie strictly between 0 and 1")
    m_r = bernoulli_ssc_constant(n, r)
    leading = (n - 1.5 + 1.0 / (2.0 * n)) / epsilon
    pen = _mul(_pow(float(n), 2.0 - 1.0 / r), _pow(epsilon, -1.0 / r), m_r)
    base = (1.0 - epsilon / 2.0) * (n - 2.0 + 1.0 / n)
    slack_low = base + n - 0.5 + 3.0 * pen
    slack_high = -base + (n + 1.0) / 2.0 + 2.0 * pen
    applicable = epsilon <= 1.0 / (2.0 * n)
    notes = ()
    if not applicable:
        notes = (f"epsilon={epsilon:g} above 1/(2n)={1.0 / (2 * n):g}",)
    return BoundReport(
        lower=leading - slack_low,
        upper=leading + slack_high,
        applicable=applicable,
        terms={
            "leading": leading,
            "m_r": m_r,
            "slack_low": slack_low,
            "slack_high": slack_high,
            "r": r,
        },
        notes=notes,
    )


def bernoulli_scaled_limit(n: int) -> float:
    """Limit of epsilon * E[total queue] as epsilon -> 0, uniform Bernoulli."""
    return n - 1.5 + 1.0 / (2.0 * n)


def bernoulli_universal_lower_bound(n: int, epsilon: float) -> float:
    """universal_lower_bound specialized to uniform Bernoulli arrivals."""
    return (1.0 - epsilon) ** 2 * (n - 1.0) / (2.0 * epsilon)


def scaling_regime_bracket(n: int, beta: float, gamma_n: float, r: int = 2) -> BoundReport:
    """Bracket when the load couples to port count via epsilon = gamma_n * n^-beta.

    centre n^(1+beta) / gamma_n.  Requires 2 gamma_n <= n^(beta-1) so that
    epsilon <= 1/(2n); flagged otherwise.  A note marks beta <= 4, where
    the slack terms are not of lower order than the centre.
    """
    _require_bracket_r(r)
    if gamma_n <= 0:
        raise ConfigError("gamma_n must be positive")
    eps = gamma_n * _pow(float(n), -beta)
    leading = _pow(float(n), 1.0 + beta) / gamma_n
    pen = _mul(
        _pow(2.0 * math.sqrt(r) * _E / gamma_n, 1.0 / r),
        r / _E,
        _pow(float(n), 2.0 - 1.0 / r + beta / r),
        float(n) ** 2,
        n + 1.0,
    )
    head = (3.0 * _pow(float(n), beta) - _pow(float(n), beta - 1.0)) / (2.0 * gamma_n)
    base = (1.0 - eps / 2.0) * (n - 2.0 + 1.0 / n)
    slack_low = head + base + n - 0.5 + 48.0 * pen
    slack_high = -head - base + (n + 1.0) / 2.0 + 32.0 * pen
    applicable = 2.0 * gamma_n <= _pow(float(n), beta - 1.0)
    notes = ()
    if not applicable:
        notes = (f"2*gamma_n={2 * gamma_n:g} exceeds n^(beta-1)={_pow(float(n), beta - 1.0):g}",)
    if not 0.0 < eps < 1.0:
        applicable = False
        notes = notes + (f"implied epsilon {eps:g} outside (0, 1)",)
    if beta <= 4.0:
        notes = notes + ("beta <= 4: slack not of lower order than the centre",)
    return BoundReport(
        lower=leading - slack_low,
        upper=leading + slack_high,
        applicable=applicable,
        terms={
            "leading": leading,
            "epsilon": eps,
            "slack_low": slack_low,
            "slack_high": slack_high,
            "r": r,
        },
        notes=notes,
    )
