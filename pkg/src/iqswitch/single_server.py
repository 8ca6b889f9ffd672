"""Single-server queue coupled to one row or column of the switch.

Feeding all arrivals of row i into one queue with unit service gives a
workload process that can never exceed the switch's own row sum when both
start together, because the switch serves that row at most once per slot.
The coupled queue admits an exact stationary mean, which turns it into a
simulation cross-check and into the policy-independent lower bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .model import TrafficModel


def step_single_server(phi: int, alpha: int) -> tuple[int, int]:
    """One slot of the unit-service queue: returns (next workload, unused).

    next = max(phi + alpha - 1, 0); unused is 1 exactly when the server
    had nothing to do (phi + alpha == 0).
    """
    if phi < 0 or alpha < 0:
        raise ConfigError("workload and arrivals must be nonnegative")
    dep = phi + alpha - 1
    if dep < 0:
        return 0, -dep
    return dep, 0


def single_server_mean(sigma_sq_sum: float, epsilon: float) -> float:
    """Exact stationary mean workload of the aggregated queue.

    sigma_sq_sum is the total arrival variance feeding the queue (sum of
    per-entry variances along the row or column); the aggregate arrival
    rate is 1 - epsilon against unit service.
    """
    if not 0.0 < epsilon < 1.0:
        raise ConfigError("epsilon must lie strictly between 0 and 1")
    return sigma_sq_sum / (2.0 * epsilon) - (1.0 - epsilon) / 2.0


def analytic_workload_mean(model: TrafficModel, index: int, axis: str = "row") -> float:
    """single_server_mean for one row or column of a traffic model."""
    if axis not in ("row", "col"):
        raise ConfigError("axis must be 'row' or 'col'")
    if not 0 <= index < model.n:
        raise ConfigError("index out of range")
    s2 = model.sigma2[index, :].sum() if axis == "row" else model.sigma2[:, index].sum()
    return single_server_mean(float(s2), model.epsilon)


@dataclass(frozen=True)
class CouplingReport:
    """Outcome of a coupled run along one row or column."""

    axis: str
    index: int
    replications: int
    sample_slots: int
    violations: int
    workload_mean: float
    workload_ci: float
    unused_mean: float
    unused_ci: float
    queue_sum_mean: float
    analytic_mean: float


def coupled_dominance_run(
    model: TrafficModel,
    sample_slots: int,
    index: int = 0,
    axis: str = "row",
    replications: int = 8,
    seed: int = 0,
    warmup_slots: int | None = None,
    tie_break: str = "auto",
) -> CouplingReport:
    """Simulate the switch with the coupled aggregate queue attached.

    Dominance (workload <= matching row/column sum of the switch) is
    checked on every slot including warmup; any violation raises
    DominanceViolation from the run itself.  Averages are taken after
    warmup.
    """
    from .harness import DiagnosticsConfig, SimConfig, run_steady_state

    if axis not in ("row", "col"):
        raise ConfigError("axis must be 'row' or 'col'")
    diag = DiagnosticsConfig(
        ssc=False,
        drift=False,
        couple_row=index if axis == "row" else None,
        couple_col=index if axis == "col" else None,
    )
    cfg = SimConfig(
        model=model,
        sample_slots=sample_slots,
        warmup_slots=warmup_slots,
        replications=replications,
        seed=seed,
        tie_break=tie_break,
        diagnostics=diag,
    )
    est = run_steady_state(cfg)
    side = est.coupling[axis]
    return CouplingReport(
        axis=axis,
        index=index,
        replications=replications,
        sample_slots=sample_slots,
        violations=side["violations"],
        workload_mean=side["workload_mean"],
        workload_ci=side["workload_ci"],
        unused_mean=side["unused_mean"],
        unused_ci=side["unused_ci"],
        queue_sum_mean=side["queue_sum_mean"],
        analytic_mean=analytic_workload_mean(model, index, axis),
    )
