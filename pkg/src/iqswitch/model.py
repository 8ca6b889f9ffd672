"""Traffic model and one-slot dynamics for an n x n input-queued switch.

Queues live on a square matrix: entry (i, j) counts packets waiting at
input port i for output port j.  Each slot, a permutation schedule serves
at most one packet per matched pair, arrivals are integer matrices drawn
independently across entries and slots, and service offered to an empty
queue is wasted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NegativeRate, RowColSumViolation

_SUM_TOL = 1e-9
_PMF_TOL = 1e-12


@dataclass(frozen=True)
class Schedule:
    """Permutation schedule: input i serves output perm[i]."""

    perm: np.ndarray

    def __post_init__(self):
        perm = np.asarray(self.perm, dtype=np.int64)
        perm.setflags(write=False)
        object.__setattr__(self, "perm", perm)
        n = perm.shape[0]
        if perm.ndim != 1 or not np.array_equal(np.sort(perm), np.arange(n)):
            raise ConfigError("schedule is not a permutation of 0..n-1")

    @property
    def n(self) -> int:
        return self.perm.shape[0]

    def as_matrix(self) -> np.ndarray:
        s = np.zeros((self.n, self.n), dtype=np.int64)
        s[np.arange(self.n), self.perm] = 1
        return s


@dataclass(frozen=True)
class TrafficModel:
    """Arrival-rate description: rate matrix split into face point and slack.

    nu is a doubly stochastic matrix (the saturated face point), epsilon in
    (0, 1) is the distance to saturation, and the mean arrival rate is
    lam = (1 - epsilon) * nu.  pmfs[i, j] is the arrival distribution of
    entry (i, j) on support {0, ..., a_max}; its mean must equal lam[i, j].
    """

    nu: np.ndarray
    epsilon: float
    pmfs: np.ndarray
    kind: str = "bernoulli"

    def __post_init__(self):
        nu = np.array(self.nu, dtype=np.float64)
        pmfs = np.array(self.pmfs, dtype=np.float64)
        nu.setflags(write=False)
        pmfs.setflags(write=False)
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "pmfs", pmfs)
        if nu.ndim != 2 or nu.shape[0] != nu.shape[1]:
            raise ConfigError("nu must be a square matrix")
        if pmfs.shape[:2] != nu.shape or pmfs.ndim != 3:
            raise ConfigError("pmfs must have shape (n, n, a_max + 1)")
        if not 0.0 < float(self.epsilon) < 1.0:
            raise ConfigError("epsilon must lie strictly between 0 and 1")

    @property
    def n(self) -> int:
        return self.nu.shape[0]

    @property
    def a_max(self) -> int:
        return self.pmfs.shape[2] - 1

    @property
    def lam(self) -> np.ndarray:
        """Mean arrival-rate matrix (1 - epsilon) * nu."""
        return (1.0 - self.epsilon) * self.nu

    @property
    def sigma2(self) -> np.ndarray:
        """Per-entry arrival variance matrix."""
        support = np.arange(self.pmfs.shape[2], dtype=np.float64)
        mean = self.pmfs @ support
        second = self.pmfs @ support**2
        return second - mean**2

    @property
    def sigma_sq_total(self) -> float:
        """Total arrival variance, the squared norm of the sigma matrix."""
        return float(self.sigma2.sum())

    @property
    def lam_sq_total(self) -> float:
        return float((self.lam**2).sum())

    @property
    def nu_min(self) -> float:
        return float(self.nu.min())

    @property
    def ssc_threshold(self) -> float:
        """Largest epsilon the collapse moment bounds are stated for."""
        return self.nu_min / (2.0 * float(np.linalg.norm(self.nu)))


@dataclass(frozen=True)
class ValidationReport:
    n: int
    nu_min: float
    load: float
    lam_sq: float
    sigma_sq: float
    max_row_dev: float
    max_col_dev: float
    all_ports_active: bool
    ssc_applicable: bool


def validate_traffic(model: TrafficModel) -> ValidationReport:
    """Check face membership and pmf consistency; return summary quantities.

    Raises NegativeRate or RowColSumViolation on a malformed rate matrix and
    ConfigError on a malformed pmf.  The report carries the norms the bound
    formulas consume and flags whether the collapse regime condition
    epsilon <= nu_min / (2 ||nu||) holds.
    """
    nu, pmfs = model.nu, model.pmfs
    if (nu < 0).any():
        raise NegativeRate("nu has a negative entry")
    row_dev = float(np.abs(nu.sum(axis=1) - 1.0).max())
    col_dev = float(np.abs(nu.sum(axis=0) - 1.0).max())
    if max(row_dev, col_dev) > _SUM_TOL:
        raise RowColSumViolation(
            f"row/col sums deviate from 1 by {max(row_dev, col_dev):.3e}"
        )
    if (pmfs < -_PMF_TOL).any():
        raise NegativeRate("pmf has a negative entry")
    mass_dev = float(np.abs(pmfs.sum(axis=2) - 1.0).max())
    if mass_dev > _PMF_TOL:
        raise ConfigError(f"pmf mass deviates from 1 by {mass_dev:.3e}")
    if (pmfs[:, :, 0] <= 0.0).any():
        raise ConfigError("every entry needs positive probability of zero arrivals")
    support = np.arange(pmfs.shape[2], dtype=np.float64)
    mean_dev = float(np.abs(pmfs @ support - model.lam).max())
    if mean_dev > _PMF_TOL:
        raise ConfigError(f"pmf means deviate from the rate matrix by {mean_dev:.3e}")
    return ValidationReport(
        n=model.n,
        nu_min=model.nu_min,
        load=1.0 - model.epsilon,
        lam_sq=model.lam_sq_total,
        sigma_sq=model.sigma_sq_total,
        max_row_dev=row_dev,
        max_col_dev=col_dev,
        all_ports_active=model.nu_min > 0.0,
        ssc_applicable=model.epsilon <= model.ssc_threshold,
    )


def bernoulli_model(nu, epsilon: float) -> TrafficModel:
    """Bernoulli arrivals with success probability (1 - epsilon) * nu[i, j]."""
    nu = np.asarray(nu, dtype=np.float64)
    lam = (1.0 - epsilon) * nu
    if (lam > 1.0).any():
        raise ConfigError("Bernoulli rate above 1")
    pmfs = np.stack([1.0 - lam, lam], axis=2)
    model = TrafficModel(nu=nu, epsilon=epsilon, pmfs=pmfs, kind="bernoulli")
    validate_traffic(model)
    return model


def bernoulli_uniform(n: int, epsilon: float) -> TrafficModel:
    """Uniform face point nu = J/n with Bernoulli arrivals."""
    return bernoulli_model(np.full((n, n), 1.0 / n), epsilon)


def from_config(cfg: dict) -> TrafficModel:
    """Build a model from a parsed JSON config.

    Expected keys: n, epsilon, nu ("uniform" or row-major list of n*n
    rates), arrivals ("bernoulli" or {"pmf": ...} with either one shared
    pmf or an n x n nest of per-entry pmfs).  Extra keys such as "seed"
    belong to the run layer and are ignored here.
    """
    try:
        n = int(cfg["n"])
        epsilon = float(cfg["epsilon"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad or missing model field: {exc}") from exc
    if n < 1:
        raise ConfigError("n must be at least 1")
    nu_spec = cfg.get("nu", "uniform")
    if isinstance(nu_spec, str):
        if nu_spec != "uniform":
            raise ConfigError(f"unknown nu spec {nu_spec!r}")
        nu = np.full((n, n), 1.0 / n)
    else:
        nu = np.asarray(nu_spec, dtype=np.float64)
        if nu.size != n * n:
            raise ConfigError("nu must list n*n rates in row-major order")
        nu = nu.reshape(n, n)
    arrivals = cfg.get("arrivals", "bernoulli")
    if arrivals == "bernoulli":
        return bernoulli_model(nu, epsilon)
    if isinstance(arrivals, dict) and "pmf" in arrivals:
        pmf = np.asarray(arrivals["pmf"], dtype=np.float64)
        if pmf.ndim == 1:
            pmf = np.broadcast_to(pmf, (n, n, pmf.shape[0])).copy()
        if pmf.shape[:2] != (n, n) or pmf.ndim != 3:
            raise ConfigError("pmf must be one shared pmf or an n x n nest")
        model = TrafficModel(nu=nu, epsilon=epsilon, pmfs=pmf, kind="pmf")
        validate_traffic(model)
        return model
    raise ConfigError(f"unknown arrivals spec {arrivals!r}")


def sample_arrivals(model: TrafficModel, rng: np.random.Generator) -> np.ndarray:
    """Draw one slot's arrival matrix."""
    u = rng.random((model.n, model.n))
    cdf = np.cumsum(model.pmfs, axis=2)
    return (u[:, :, None] >= cdf).sum(axis=2).astype(np.int64)


def arrival_block(model: TrafficModel, size: int, rng: np.random.Generator) -> np.ndarray:
    """Draw arrivals for `size` consecutive slots, shape (size, n, n)."""
    u = rng.random((size, model.n, model.n))
    cdf = np.cumsum(model.pmfs, axis=2)
    return (u[:, :, :, None] >= cdf[None]).sum(axis=3).astype(np.int64)


@dataclass(frozen=True)
class SlotOutcome:
    """Result of one slot: next queue state, wasted service, and inputs."""

    q_next: np.ndarray
    unused: np.ndarray
    arrivals: np.ndarray
    schedule: Schedule


def step(q: np.ndarray, schedule: Schedule | np.ndarray, arrivals: np.ndarray) -> SlotOutcome:
    """Advance the queue matrix one slot under the given schedule.

    q_next = max(q + arrivals - s, 0) entrywise, where s is the 0/1
    schedule matrix.  The unused-service matrix records service offered to
    entries that had nothing to send.
    """
    if not isinstance(schedule, Schedule):
        schedule = Schedule(np.asarray(schedule))
    q = np.asarray(q, dtype=np.int64)
    a = np.asarray(arrivals, dtype=np.int64)
    if (q < 0).any() or (a < 0).any():
        raise ConfigError("queues and arrivals must be nonnegative")
    dep = q + a - schedule.as_matrix()
    q_next = np.maximum(dep, 0)
    return SlotOutcome(q_next=q_next, unused=q_next - dep, arrivals=a, schedule=schedule)


@dataclass(frozen=True)
class LyapunovValues:
    """Quadratic test functions of one queue state.

    port_potential = row_sums_sq + col_sums_sq - total_sq / n is the
    combination whose steady-state drift vanishes; perp_norm is filled in
    when a cone decomposition is supplied.
    """

    sq_norm: float
    row_sums_sq: float
    col_sums_sq: float
    total_sq: float
    port_potential: float
    perp_norm: float | None = None
    para_norm: float | None = None


def lyapunov_values(q: np.ndarray, decomp=None) -> LyapunovValues:
    q = np.asarray(q, dtype=np.float64)
    n = q.shape[0]
    rows = q.sum(axis=1)
    cols = q.sum(axis=0)
    total = float(q.sum())
    v1 = float((rows**2).sum())
    v2 = float((cols**2).sum())
    v3 = total**2
    return LyapunovValues(
        sq_norm=float((q**2).sum()),
        row_sums_sq=v1,
        col_sums_sq=v2,
        total_sq=v3,
        port_potential=v1 + v2 - v3 / n,
        perp_norm=None if decomp is None else float(np.linalg.norm(decomp.q_perp)),
        para_norm=None if decomp is None else float(np.linalg.norm(decomp.q_para)),
    )
