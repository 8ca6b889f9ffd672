"""Command-line front end.

Subcommands: match (assignment solve), project (cone split), bounds
(analytic formulas), simulate (one steady-state run), sweep (a load
sweep writing sweep.csv).  Exit codes: 0 success, 1 bad configuration or
input, 2 invariant violation detected while running.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import bounds as bounds_mod
from . import geometry, matching
from .errors import (
    ConfigError,
    ConvergenceFailure,
    DominanceViolation,
    InapplicableRegime,
    NegativeRate,
    RowColSumViolation,
    SizeLimitExceeded,
)
from .harness import (
    DiagnosticsConfig,
    SimConfig,
    estimate_dict,
    heavy_traffic_sweep,
    run_steady_state,
    save_results_json,
)
from .model import bernoulli_uniform, from_config, validate_traffic

_CONFIG_ERRORS = (
    ConfigError,
    RowColSumViolation,
    NegativeRate,
    SizeLimitExceeded,
    InapplicableRegime,
    OSError,
    json.JSONDecodeError,
    KeyError,
    TypeError,
    ValueError,
)
_RUN_ERRORS = (DominanceViolation, ConvergenceFailure, RuntimeError)


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _emit(payload) -> None:
    json.dump(_jsonable(payload), sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def _load_json(path: str):
    if path == "-":
        return json.load(sys.stdin)
    with open(path) as fh:
        return json.load(fh)


def _load_matrix(path: str) -> np.ndarray:
    data = _load_json(path)
    if isinstance(data, dict):
        data = data["q"]
    q = np.asarray(data, dtype=np.float64)
    if q.ndim != 2 or q.shape[0] != q.shape[1]:
        raise ConfigError("input must be a square matrix")
    return q


def _cmd_match(args) -> int:
    q = _load_matrix(args.input)
    rng = None if args.seed is None else np.random.default_rng(args.seed)
    result = matching.max_weight_matching(q, rng=rng, tie_break=args.tie_break)
    _emit(
        {
            "n": q.shape[0],
            "perm": result.perm,
            "weight": result.weight,
            "w": result.w,
            "w_tilde": result.w_tilde,
            "slackness_ok": matching.check_complementary_slackness(q, result),
        }
    )
    return 0


def _cmd_project(args) -> int:
    q = _load_matrix(args.input)
    d = geometry.project_onto_cone(q, tol=args.tol)
    _emit(
        {
            "q_para": d.q_para,
            "q_perp": d.q_perp,
            "w": d.w,
            "w_tilde": d.w_tilde,
            "kkt_residual": d.kkt_residual,
            "iterations": d.iterations,
            "norm_sq": {
                "input": float((q**2).sum()),
                "para": float((d.q_para**2).sum()),
                "perp": float((d.q_perp**2).sum()),
            },
        }
    )
    return 0


def _bracket_dict(rep: bounds_mod.BoundReport) -> dict:
    return {
        "lower": rep.lower,
        "upper": rep.upper,
        "applicable": rep.applicable,
        "terms": rep.terms,
        "notes": list(rep.notes),
    }


def _cmd_bounds(args) -> int:
    if args.config is not None:
        model = from_config(_load_json(args.config))
    elif args.n is not None and args.epsilon is not None:
        model = bernoulli_uniform(args.n, args.epsilon)
    else:
        raise ConfigError("give --config, or both --n and --epsilon")
    report = validate_traffic(model)
    out = {
        "n": model.n,
        "epsilon": model.epsilon,
        "sigma_sq": report.sigma_sq,
        "ulb": bounds_mod.universal_lower_bound(model),
        "ssc_constant": {
            str(args.r): bounds_mod.ssc_moment_constant(model, args.r),
        },
        "ssc_applicable": model.epsilon <= model.ssc_threshold,
        "drift_threshold": bounds_mod.ssc_drift_threshold(model),
        "bracket": _bracket_dict(bounds_mod.heavy_traffic_bracket(model, r=args.r)),
    }
    uniform = np.allclose(model.nu, 1.0 / model.n) and model.kind == "bernoulli"
    if uniform:
        out["bernoulli_bracket"] = _bracket_dict(
            bounds_mod.bernoulli_bracket(model.n, model.epsilon, r=args.r)
        )
        out["scaled_limit"] = bounds_mod.bernoulli_scaled_limit(model.n)
    if args.beta is not None:
        out["scaling"] = _bracket_dict(
            bounds_mod.scaling_regime_bracket(model.n, args.beta, args.gamma, r=args.r)
        )
    _emit(out)
    return 0


def _diagnostics_from(cfg: dict) -> DiagnosticsConfig:
    d = cfg.get("diagnostics", {})
    if not isinstance(d, dict):
        raise ConfigError("diagnostics must be an object")
    return DiagnosticsConfig(
        ssc=bool(d.get("ssc", True)),
        drift=bool(d.get("drift", True)),
        stride=int(d.get("stride", 100)),
        couple_row=d.get("couple_row"),
        couple_col=d.get("couple_col"),
        perp_threshold=d.get("perp_threshold"),
        moments=tuple(int(r) for r in d.get("moments", (1, 2))),
    )


def _cmd_simulate(args) -> int:
    cfg = _load_json(args.config)
    model = from_config(cfg)
    sim = SimConfig(
        model=model,
        sample_slots=args.sample_slots or int(cfg.get("sample_slots", 1_000_000)),
        warmup_slots=args.warmup_slots
        if args.warmup_slots is not None
        else cfg.get("warmup_slots"),
        replications=args.replications or int(cfg.get("replications", 8)),
        seed=args.seed if args.seed is not None else int(cfg.get("seed", 0)),
        tie_break=args.tie_break or cfg.get("tie_break", "auto"),
        diagnostics=_diagnostics_from(cfg),
    )
    est = run_steady_state(sim)
    save_results_json(
        est,
        args.out,
        extra={"model": {"n": model.n, "epsilon": model.epsilon, "kind": model.kind}},
    )
    _emit(
        {
            "mean": est.mean,
            "ci": est.ci,
            "scaled_mean": est.scaled_mean,
            "replications": est.replications,
            "sample_slots": est.sample_slots,
            "out": args.out,
        }
    )
    return 0


def _cmd_sweep(args) -> int:
    cfg = _load_json(args.config)
    if args.eps:
        eps_list = [float(tok) for tok in args.eps.split(",") if tok.strip()]
    else:
        eps_list = [float(e) for e in cfg.get("eps_list", ())]
    if not eps_list:
        raise ConfigError("no eps values: use --eps or an eps_list config key")
    n = int(cfg["n"])
    nu_spec = cfg.get("nu", "uniform")
    nu = None if isinstance(nu_spec, str) else np.asarray(nu_spec, dtype=np.float64).reshape(n, n)
    if cfg.get("arrivals", "bernoulli") != "bernoulli":
        raise ConfigError("sweeps support the Bernoulli family only")
    rows = heavy_traffic_sweep(
        eps_list,
        n,
        nu=nu,
        sample_slots=args.sample_slots or int(cfg.get("sample_slots", 1_000_000)),
        warmup_slots=args.warmup_slots
        if args.warmup_slots is not None
        else cfg.get("warmup_slots"),
        replications=args.replications or int(cfg.get("replications", 8)),
        seed=args.seed if args.seed is not None else int(cfg.get("seed", 0)),
        r=args.r,
        tie_break=args.tie_break or cfg.get("tie_break", "auto"),
        csv_path=args.csv,
        json_path=args.json_out,
    )
    _emit(
        [
            {
                "eps": row.eps,
                "mean": row.mean,
                "ci": row.ci,
                "scaled_mean": row.scaled_mean,
                "ulb": row.ulb,
                "thm_lb": row.thm_lb,
                "thm_ub": row.thm_ub,
                "ssc_ratio": row.ssc_ratio,
                "applicable": row.applicable,
            }
            for row in rows
        ]
    )
    return 0


class _Parser(argparse.ArgumentParser):
    """Usage mistakes are configuration errors, so exit 1 rather than argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="iqswitch",
        description="Input-queued switch: max-weight scheduling, projections, bounds, simulation.",
    )
    sub = p.add_subparsers(dest="cmd", required=True)

    m = sub.add_parser("match", help="max-weight matching with dual certificate")
    m.add_argument("--input", required=True, help="JSON square matrix (or - for stdin)")
    m.add_argument("--tie-break", default="none", choices=["none", "shuffle", "uniform"])
    m.add_argument("--seed", type=int, default=None)
    m.set_defaults(fn=_cmd_match)

    pr = sub.add_parser("project", help="split a matrix against the weight cone")
    pr.add_argument("--input", required=True, help="JSON square matrix (or - for stdin)")
    pr.add_argument("--tol", type=float, default=1e-8)
    pr.set_defaults(fn=_cmd_project)

    b = sub.add_parser("bounds", help="analytic bounds for a traffic model")
    b.add_argument("--config", help="model JSON (n, epsilon, nu, arrivals)")
    b.add_argument("--n", type=int, help="uniform Bernoulli shortcut: ports")
    b.add_argument("--epsilon", type=float, help="uniform Bernoulli shortcut: slack")
    b.add_argument("--r", type=int, default=2, help="moment order in the bracket (default 2)")
    b.add_argument("--beta", type=float, help="also report the load-scaling bracket")
    b.add_argument("--gamma", type=float, default=1.0)
    b.set_defaults(fn=_cmd_bounds)

    s = sub.add_parser("simulate", help="steady-state estimate for one model")
    s.add_argument("--config", required=True, help="JSON: model fields plus run fields")
    s.add_argument("--out", default="results.json")
    s.add_argument("--sample-slots", type=int, default=None)
    s.add_argument("--warmup-slots", type=int, default=None)
    s.add_argument("--replications", type=int, default=None)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--tie-break", default=None, choices=["auto", "uniform", "shuffle"])
    s.set_defaults(fn=_cmd_simulate)

    w = sub.add_parser("sweep", help="load sweep writing sweep.csv")
    w.add_argument("--config", required=True, help="JSON: model family plus run fields")
    w.add_argument("--eps", help="comma-separated strictly decreasing loads")
    w.add_argument("--csv", default="sweep.csv")
    w.add_argument("--json", dest="json_out", default=None)
    w.add_argument("--r", type=int, default=2)
    w.add_argument("--sample-slots", type=int, default=None)
    w.add_argument("--warmup-slots", type=int, default=None)
    w.add_argument("--replications", type=int, default=None)
    w.add_argument("--seed", type=int, default=None)
    w.add_argument("--tie-break", default=None, choices=["auto", "uniform", "shuffle"])
    w.set_defaults(fn=_cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except _RUN_ERRORS as exc:
        print(f"run invariant violated: {exc}", file=sys.stderr)
        return 2
    except _CONFIG_ERRORS as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
