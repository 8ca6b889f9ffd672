"""Steady-state simulation harness for the max-weight switch.

Replication/time-average design: R independent replications, each warmed
up and then time-averaged over a sampling window, with a Student-t
confidence interval across replication means.  Replication streams come
from spawned seed sequences, one child per replication and one grandchild
per matrix entry, so runs are reproducible and replications independent.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from . import _kernels, geometry
from .bounds import heavy_traffic_bracket, ssc_moment_constant, universal_lower_bound
from .errors import ConfigError, DominanceViolation
from .matching import BRUTE_FORCE_MAX_N, _perm_table
from .model import TrafficModel, bernoulli_model, lyapunov_values, validate_traffic

DEFAULT_STRIDE = 100


def default_warmup(model: TrafficModel) -> int:
    """Heuristic warmup: max(1e5, 20 * expected mean / epsilon) slots."""
    expected = (1.0 - 1.0 / (2.0 * model.n)) * model.sigma_sq_total / model.epsilon
    return max(100_000, int(math.ceil(20.0 * expected / model.epsilon)))


@dataclass(frozen=True)
class DiagnosticsConfig:
    """Which extra statistics a run collects.

    ssc records cone-projection norms of sampled states; drift records
    exact time-averages of the quadratic test functions plus a
    conditional drift estimate for the perpendicular norm.  couple_row /
    couple_col attach the aggregated single-server queue to one row or
    column.  stride is the sampling period for projection snapshots.
    """

    ssc: bool = True
    drift: bool = True
    stride: int = DEFAULT_STRIDE
    couple_row: int | None = None
    couple_col: int | None = None
    perp_threshold: float | None = None
    moments: tuple[int, ...] = (1, 2)


@dataclass(frozen=True)
class SimConfig:
    model: TrafficModel
    sample_slots: int
    warmup_slots: int | None = None
    replications: int = 8
    seed: int = 0
    tie_break: str = "auto"
    diagnostics: DiagnosticsConfig = field(default_factory=DiagnosticsConfig)
    chunk_slots: int = 1 << 17

    def __post_init__(self):
        if self.sample_slots < 1000:
            raise ConfigError("sample_slots must be at least 1000")
        if self.replications < 1:
            raise ConfigError("replications must be at least 1")
        if self.warmup_slots is not None and self.warmup_slots < 0:
            raise ConfigError("warmup_slots cannot be negative")
        if self.chunk_slots < 1:
            raise ConfigError("chunk_slots must be positive")
        if self.tie_break not in ("auto", "uniform", "shuffle"):
            raise ConfigError(f"unknown tie_break {self.tie_break!r}")
        d = self.diagnostics
        if d.stride < 1:
            raise ConfigError("diagnostics stride must be at least 1")
        n = self.model.n
        for idx in (d.couple_row, d.couple_col):
            if idx is not None and not 0 <= idx < n:
                raise ConfigError("coupling index out of range")
        for r in d.moments:
            if r < 1:
                raise ConfigError("moment orders must be positive integers")
        if self.resolved_tie_break == "uniform" and n > BRUTE_FORCE_MAX_N:
            raise ConfigError(
                f"uniform tie-break enumerates permutations, capped at n={BRUTE_FORCE_MAX_N}"
            )

    @property
    def resolved_tie_break(self) -> str:
        if self.tie_break != "auto":
            return self.tie_break
        return "uniform" if self.model.n <= 5 else "shuffle"

    @property
    def resolved_warmup(self) -> int:
        if self.warmup_slots is not None:
            return self.warmup_slots
        return default_warmup(self.model)


@dataclass(frozen=True)
class SimEstimate:
    """Point estimate of the steady-state mean total queue, with context."""

    n: int
    epsilon: float
    replications: int
    warmup_slots: int
    sample_slots: int
    seed: int
    tie_break: str
    mean: float
    ci: float
    scaled_mean: float
    scaled_ci: float
    per_replication: tuple
    ssc: dict | None = None
    drift: dict | None = None
    coupling: dict | None = None


def _t_ci(values, conf: float = 0.95) -> float:
    v = np.asarray(values, dtype=np.float64)
    if v.size < 2:
        return float("nan")
    crit = stats.t.ppf(0.5 + conf / 2.0, v.size - 1)
    return float(crit * v.std(ddof=1) / math.sqrt(v.size))


def _arrival_chunk(model: TrafficModel, gens, t_chunk: int) -> np.ndarray:
    n = model.n
    arr = np.empty((t_chunk, n, n), dtype=np.int64)
    if model.a_max == 1:
        zero_mass = model.pmfs[:, :, 0]
        for i in range(n):
            for j in range(n):
                u = gens[i * n + j].random(t_chunk)
                arr[:, i, j] = u >= zero_mass[i, j]
    else:
        cdf = np.cumsum(model.pmfs, axis=2)
        for i in range(n):
            for j in range(n):
                u = gens[i * n + j].random(t_chunk)
                arr[:, i, j] = np.searchsorted(cdf[i, j], u, side="right")
    return arr


def _norm_series(samples: np.ndarray, slab: int = 50_000):
    """(para, perp) norms of a stack of integer states, projected in slabs."""
    paras = []
    perps = []
    for k in range(0, samples.shape[0], slab):
        pa, pe = geometry.perp_norms(samples[k : k + slab].astype(np.float64))
        paras.append(pa)
        perps.append(pe)
    if not paras:
        return np.empty(0), np.empty(0)
    return np.concatenate(paras), np.concatenate(perps)


_TELE_KEYS = (
    "d_sq_norm",
    "d_row_sums_sq",
    "d_col_sums_sq",
    "d_total_sq",
    "d_port_potential",
)


def _functional_vector(q: np.ndarray) -> np.ndarray:
    vals = lyapunov_values(q)
    return np.array(
        [vals.sq_norm, vals.row_sums_sq, vals.col_sums_sq, vals.total_sq, vals.port_potential]
    )


def run_steady_state(cfg: SimConfig) -> SimEstimate:
    """Estimate the steady-state mean total queue length under max-weight.

    Simulates cfg.replications independent replications from an empty
    system, discards the warmup, and time-averages the total queue over
    the sampling window.  Diagnostics are collected per the config; a
    coupled-queue dominance failure raises DominanceViolation.
    """
    model = cfg.model
    validate_traffic(model)
    n = model.n
    diag = cfg.diagnostics
    tie_mode = 0 if cfg.resolved_tie_break == "uniform" else 1
    if tie_mode == 0:
        perms = np.asarray(_perm_table(n))
    else:
        perms = np.zeros((1, n), dtype=np.int64)
    tie_buf = np.empty(perms.shape[0], dtype=np.int64)
    warm = cfg.resolved_warmup
    samp = cfg.sample_slots
    want_snaps = diag.ssc or diag.drift
    stride = diag.stride
    cap = (samp + stride - 1) // stride if want_snaps else 0
    couple_row = -1 if diag.couple_row is None else diag.couple_row
    couple_col = -1 if diag.couple_col is None else diag.couple_col

    children = np.random.SeedSequence(cfg.seed).spawn(cfg.replications)
    rep_means = []
    rep_perp = []  # per-rep arrays of sampled perp norms
    rep_para = []
    rep_post_perp = []
    rep_tele = []  # per-rep telescoped averages of the five functionals
    rep_tele_perp = []
    rep_couple = []
    viol_row = 0
    viol_col = 0

    for rep in range(cfg.replications):
        streams = children[rep].spawn(n * n + 1)
        gens = [np.random.default_rng(s) for s in streams[: n * n]]
        aux = np.random.default_rng(streams[n * n])
        q = np.zeros((n, n), dtype=np.int64)
        phi_state = np.zeros(2, dtype=np.int64)
        acc = np.zeros(4, dtype=np.int64)
        sums = np.zeros(6, dtype=np.int64)
        snaps_pre = np.zeros((cap, n, n), dtype=np.int64)
        snaps_post = np.zeros((cap, n, n), dtype=np.int64)

        done = 0
        while done < warm:
            t_chunk = min(cfg.chunk_slots, warm - done)
            arr = _arrival_chunk(model, gens, t_chunk)
            _kernels.simulate_chunk(
                q, arr, perms, tie_buf, tie_mode, int(aux.integers(0, 2**62)),
                False, acc, 0, 0, snaps_pre, snaps_post,
                couple_row, couple_col, phi_state, sums,
            )
            done += t_chunk
        q_start = q.copy()
        phi_start = phi_state.copy()
        done = 0
        while done < samp:
            t_chunk = min(cfg.chunk_slots, samp - done)
            arr = _arrival_chunk(model, gens, t_chunk)
            _kernels.simulate_chunk(
                q, arr, perms, tie_buf, tie_mode, int(aux.integers(0, 2**62)),
                True, acc, stride if want_snaps else 0, done, snaps_pre, snaps_post,
                couple_row, couple_col, phi_state, sums,
            )
            done += t_chunk
        q_end = q.copy()

        rep_means.append(acc[0] / samp)
        viol_row += int(acc[2])
        viol_col += int(acc[3])
        filled = int(acc[1])
        if want_snaps:
            para, perp = _norm_series(snaps_pre[:filled])
            rep_para.append(para)
            rep_perp.append(perp)
        if diag.drift:
            _, post_perp = _norm_series(snaps_post[:filled])
            rep_post_perp.append(post_perp)
            tele = (_functional_vector(q_end) - _functional_vector(q_start)) / samp
            rep_tele.append(tele)
            bounds_pair = np.stack([q_start, q_end]).astype(np.float64)
            _, edge_perp = geometry.perp_norms(bounds_pair)
            rep_tele_perp.append((edge_perp[1] - edge_perp[0]) / samp)
        if couple_row >= 0 or couple_col >= 0:
            rep_couple.append(sums.astype(np.float64) / samp)

    if viol_row or viol_col:
        raise DominanceViolation(
            f"coupled queue exceeded switch sums ({viol_row} row, {viol_col} col violations)"
        )

    mean = float(np.mean(rep_means))
    ci = _t_ci(rep_means)
    eps = model.epsilon

    ssc_block = None
    if diag.ssc:
        perp_means = [float(p.mean()) for p in rep_perp]
        para_means = [float(p.mean()) for p in rep_para]
        moments = {}
        moment_cis = {}
        for r in diag.moments:
            per_rep = [float((p**r).mean()) for p in rep_perp]
            moments[str(r)] = float(np.mean(per_rep))
            moment_cis[str(r)] = _t_ci(per_rep)
        perp_mean = float(np.mean(perp_means))
        para_mean = float(np.mean(para_means))
        ssc_block = {
            "samples": int(sum(p.size for p in rep_perp)),
            "stride": stride,
            "perp_mean": perp_mean,
            "perp_ci": _t_ci(perp_means),
            "para_mean": para_mean,
            "para_ci": _t_ci(para_means),
            "ratio": perp_mean / para_mean if para_mean > 0 else float("inf"),
            "perp_moments": moments,
            "perp_moment_cis": moment_cis,
        }

    drift_block = None
    if diag.drift:
        tele = np.array(rep_tele)
        drift_block = {}
        for k, key in enumerate(_TELE_KEYS):
            drift_block[key] = {
                "mean": float(tele[:, k].mean()),
                "ci": _t_ci(tele[:, k]),
            }
        drift_block["d_perp_norm"] = {
            "mean": float(np.mean(rep_tele_perp)),
            "ci": _t_ci(rep_tele_perp),
        }
        threshold = diag.perp_threshold
        if threshold is None:
            pooled = np.concatenate(rep_perp) if rep_perp else np.empty(0)
            threshold = float(pooled.mean()) if pooled.size else 0.0
        cond_means = []
        cond_count = 0
        for pre, post in zip(rep_perp, rep_post_perp):
            mask = pre >= threshold
            cond_count += int(mask.sum())
            if mask.any():
                cond_means.append(float((post[mask] - pre[mask]).mean()))
        drift_block["cond_perp"] = {
            "threshold": threshold,
            "mean": float(np.mean(cond_means)) if cond_means else float("nan"),
            "ci": _t_ci(cond_means),
            "samples": cond_count,
        }

    coupling_block = None
    if rep_couple:
        arrs = np.array(rep_couple)
        coupling_block = {}
        if couple_row >= 0:
            coupling_block["row"] = {
                "index": couple_row,
                "workload_mean": float(arrs[:, 0].mean()),
                "workload_ci": _t_ci(arrs[:, 0]),
                "unused_mean": float(arrs[:, 1].mean()),
                "unused_ci": _t_ci(arrs[:, 1]),
                "queue_sum_mean": float(arrs[:, 2].mean()),
                "violations": viol_row,
            }
        if couple_col >= 0:
            coupling_block["col"] = {
                "index": couple_col,
                "workload_mean": float(arrs[:, 3].mean()),
                "workload_ci": _t_ci(arrs[:, 3]),
                "unused_mean": float(arrs[:, 4].mean()),
                "unused_ci": _t_ci(arrs[:, 4]),
                "queue_sum_mean": float(arrs[:, 5].mean()),
                "violations": viol_col,
            }

    return SimEstimate(
        n=n,
        epsilon=eps,
        replications=cfg.replications,
        warmup_slots=warm,
        sample_slots=samp,
        seed=cfg.seed,
        tie_break=cfg.resolved_tie_break,
        mean=mean,
        ci=ci,
        scaled_mean=eps * mean,
        scaled_ci=eps * ci,
        per_replication=tuple(float(x) for x in rep_means),
        ssc=ssc_block,
        drift=drift_block,
        coupling=coupling_block,
    )


def drift_zero_check(pre: np.ndarray, post: np.ndarray, threshold: float | None = None) -> dict:
    """Per-slot-pair averages of the quadratic test functions.

    pre and post are stacks (S, n, n) of states at the two ends of sampled
    slots.  Returns mean and CI (across pairs, treated as independent) of
    the change in each functional, plus the conditional change of the
    perpendicular norm over pairs starting at or above `threshold`
    (default: the mean sampled perpendicular norm).
    """
    pre = np.asarray(pre, dtype=np.float64)
    post = np.asarray(post, dtype=np.float64)
    if pre.shape != post.shape or pre.ndim != 3:
        raise ConfigError("pre and post must be matching stacks of states")
    s, n, _ = pre.shape

    def batch_vals(x):
        rows = x.sum(axis=2)
        cols = x.sum(axis=1)
        tot = x.sum(axis=(1, 2))
        v1 = (rows**2).sum(axis=1)
        v2 = (cols**2).sum(axis=1)
        v3 = tot**2
        return np.stack([(x**2).sum(axis=(1, 2)), v1, v2, v3, v1 + v2 - v3 / n])

    delta = batch_vals(post) - batch_vals(pre)
    out = {}
    for k, key in enumerate(_TELE_KEYS):
        out[key] = {
            "mean": float(delta[k].mean()),
            "ci": _t_ci(delta[k]),
            "samples": s,
        }
    _, pre_perp = geometry.perp_norms(pre)
    _, post_perp = geometry.perp_norms(post)
    dperp = post_perp - pre_perp
    out["d_perp_norm"] = {"mean": float(dperp.mean()), "ci": _t_ci(dperp), "samples": s}
    if threshold is None:
        threshold = float(pre_perp.mean())
    mask = pre_perp >= threshold
    out["cond_perp"] = {
        "threshold": float(threshold),
        "mean": float(dperp[mask].mean()) if mask.any() else float("nan"),
        "ci": _t_ci(dperp[mask]),
        "samples": int(mask.sum()),
    }
    return out


def ssc_moment_check(est: SimEstimate, model: TrafficModel, orders=(1, 2)) -> dict:
    """Compare empirical perpendicular moments against the analytic caps.

    Returns, per order r, the empirical E[||q_perp||^r], the cap M_r^r,
    and a one-sided pass flag; `applicable` reflects the collapse regime
    condition epsilon <= nu_min / (2 ||nu||).
    """
    if est.ssc is None:
        raise ConfigError("estimate carries no collapse diagnostics")
    applicable = model.epsilon <= model.ssc_threshold
    out = {"applicable": applicable, "orders": {}}
    for r in orders:
        key = str(r)
        if key not in est.ssc["perp_moments"]:
            raise ConfigError(f"moment order {r} was not recorded in the run")
        emp = est.ssc["perp_moments"][key]
        cap = ssc_moment_constant(model, r) ** r
        out["orders"][key] = {"empirical": emp, "bound": cap, "ok": emp <= cap}
    return out


@dataclass(frozen=True)
class SweepRow:
    eps: float
    mean: float
    ci: float
    scaled_mean: float
    ulb: float
    thm_lb: float
    thm_ub: float
    ssc_ratio: float
    applicable: bool
    estimate: SimEstimate


SWEEP_HEADER = ("eps", "mean", "ci", "scaled_mean", "ulb", "thm_lb", "thm_ub", "ssc_ratio")


def heavy_traffic_sweep(
    eps_list,
    n: int | None = None,
    *,
    nu=None,
    model_fn=None,
    sample_slots: int = 1_000_000,
    warmup_slots: int | None = None,
    replications: int = 8,
    seed: int = 0,
    r: int = 2,
    tie_break: str = "auto",
    stride: int = DEFAULT_STRIDE,
    csv_path=None,
    json_path=None,
) -> list[SweepRow]:
    """Run one steady-state estimate per load point along decreasing eps.

    Each point is simulated with its own spawned seed, compared against
    the policy-independent lower bound and the two-sided bracket, and the
    bracket containment (widened by the CI) is asserted whenever the
    point sits inside the collapse regime.  Points outside the regime are
    still simulated, with the bracket flagged not applicable.  model_fn
    overrides the default Bernoulli family nu -> (1 - eps) nu.
    """
    eps_list = [float(e) for e in eps_list]
    if not eps_list:
        raise ConfigError("eps_list is empty")
    if any(not 0.0 < e < 1.0 for e in eps_list):
        raise ConfigError("eps values must lie strictly between 0 and 1")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ConfigError("eps_list must be strictly decreasing")
    if model_fn is None:
        if n is None:
            raise ConfigError("give n (with optional nu) or a model_fn")
        nu_mat = np.full((n, n), 1.0 / n) if nu is None else np.asarray(nu, dtype=np.float64)
        model_fn = lambda e: bernoulli_model(nu_mat, e)  # noqa: E731

    point_seeds = np.random.SeedSequence(seed).spawn(len(eps_list))
    rows = []
    for eps, child in zip(eps_list, point_seeds):
        model = model_fn(eps)
        cfg = SimConfig(
            model=model,
            sample_slots=sample_slots,
            warmup_slots=warmup_slots,
            replications=replications,
            seed=int(child.generate_state(1, np.uint64)[0] >> 1),
            tie_break=tie_break,
            diagnostics=DiagnosticsConfig(ssc=True, drift=False, stride=stride),
        )
        est = run_steady_state(cfg)
        bracket = heavy_traffic_bracket(model, r=r)
        if bracket.applicable and not math.isnan(est.ci):
            if not bracket.lower - est.ci <= est.mean <= bracket.upper + est.ci:
                raise RuntimeError(
                    f"estimate {est.mean:.6g} escaped the bracket "
                    f"[{bracket.lower:.6g}, {bracket.upper:.6g}] at eps={eps:g}"
                )
        rows.append(
            SweepRow(
                eps=eps,
                mean=est.mean,
                ci=est.ci,
                scaled_mean=est.scaled_mean,
                ulb=universal_lower_bound(model),
                thm_lb=bracket.lower,
                thm_ub=bracket.upper,
                ssc_ratio=est.ssc["ratio"],
                applicable=bracket.applicable,
                estimate=est,
            )
        )
    if csv_path is not None:
        write_sweep_csv(rows, csv_path)
    if json_path is not None:
        with open(json_path, "w", newline="\n") as fh:
            json.dump([_row_dict(row) for row in rows], fh, indent=2, sort_keys=True)
            fh.write("\n")
    return rows


def _row_dict(row: SweepRow) -> dict:
    d = {k: getattr(row, k) for k in SWEEP_HEADER}
    d["applicable"] = row.applicable
    return d


def write_sweep_csv(rows, path) -> None:
    """Fixed-header CSV, numbers at 12 significant digits."""
    with open(path, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SWEEP_HEADER)
        for row in rows:
            writer.writerow([f"{getattr(row, k):.12g}" for k in SWEEP_HEADER])


def estimate_dict(est: SimEstimate) -> dict:
    d = asdict(est)
    d["per_replication"] = list(est.per_replication)
    return d


def save_results_json(est: SimEstimate, path, extra: dict | None = None) -> None:
    """Write a run's estimate (plus optional config echo) as stable JSON."""
    payload = {"estimate": estimate_dict(est)}
    if extra:
        payload.update(extra)
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
