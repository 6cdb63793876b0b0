"""Command-line front end.

    liouville-lab check-operator --config op.json [--out DIR] [--seed N]
    liouville-lab verify-example --config ex.json
    liouville-lab growth-scan    --config scan.json
    liouville-lab classify       --config triples.json
    liouville-lab --paper-suite  [--out DIR] [--seed N]

Each run prints a JSON summary on stdout and, with ``--out``, writes
``<command>.json`` (config echo, versions, summary) and ``<command>.csv``
(one row per sample group, radius or query). Exit codes: 0 pass or
determinate, 1 mathematical failure, 2 indeterminate, 3 config error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .growth import GrowthFunctionalSpec, growth_grid, growth_remark_T4, growth_remark_T7, growth_series
from .operators import (SamplePlan, check_alpha_monotonicity, check_monotonicity,
                        inverse_quadratic_weight, make_modified_p_laplacian, make_p_laplacian,
                        make_weighted_p_laplacian)
from .radial import (ExampleParams, RegimeError, build_pair, constant_gap_pair, derive_suitable_c,
                     radius_grid, strong_residual)
from .regimes import RegimeQuery, classify
from .suite import run_suite, summarize
from .weak_form import QuadratureSpec, make_cutoff, mc_oracle_residual, weak_residual

log = logging.getLogger("liouville_lab")

EXIT_PASS, EXIT_FAIL, EXIT_INDETERMINATE, EXIT_CONFIG = 0, 1, 2, 3
_EXIT = {"pass": EXIT_PASS, "determinate": EXIT_PASS, "fail": EXIT_FAIL,
         "indeterminate": EXIT_INDETERMINATE}


class ConfigError(ValueError):
    pass


@dataclass
class ReportBundle:
    command: str
    config: dict
    rows: list
    summary: dict
    status: str
    meta: dict = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return _EXIT[self.status]

    def document(self) -> dict:
        return {"command": self.command, "status": self.status, "config": self.config,
                "versions": {"liouville_lab": __version__, "numpy": np.__version__},
                "summary": self.summary, **self.meta}

    def csv_text(self) -> str:
        buf = io.StringIO()
        if self.rows:
            cols = list(self.rows[0])
            for row in self.rows[1:]:
                cols += [k for k in row if k not in cols]
            w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
            w.writeheader()
            for row in self.rows:
                w.writerow({k: _cell(row.get(k, "")) for k in cols})
        return buf.getvalue()

    def write(self, out: Path) -> None:
        out.mkdir(parents=True, exist_ok=True)
        stem = self.command.replace("-", "_")
        (out / f"{stem}.json").write_text(_dumps(self.document()) + "\n", encoding="utf-8")
        (out / f"{stem}.csv").write_text(self.csv_text(), encoding="utf-8")


def _cell(v):
    if isinstance(v, (list, tuple)):
        return ";".join(str(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return v


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if np.isfinite(f) else repr(f)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True)


def load_config(path: str | Path) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return cfg


def _field(cfg: dict, key: str, kind, default=..., where: str = "config"):
    if key not in cfg:
        if default is ...:
            raise ConfigError(f"{where}: missing field '{key}'")
        return default
    val = cfg[key]
    try:
        if kind is int and (isinstance(val, bool) or float(val) != int(val)):
            raise ValueError
        return kind(val)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: field '{key}' must be {kind.__name__}, got {val!r}") from None


WEIGHTS = {
    "inverse_quadratic": (inverse_quadratic_weight, 1.0),
    "unit": (lambda x: np.ones(len(x)), 1.0),
    "zero": (lambda x: np.zeros(len(x)), 1.0),
}


def _make_field(name: str, n: int, p: float, weight: str = "inverse_quadratic"):
    try:
        if name == "p_laplacian":
            return make_p_laplacian(n, p)
        if name == "modified_p_laplacian":
            return make_modified_p_laplacian(n, p)
        if name == "weighted_p_laplacian":
            if weight not in WEIGHTS:
                raise ConfigError(f"config: field 'weight' must be one of {sorted(WEIGHTS)}")
            fn, bound = WEIGHTS[weight]
            return make_weighted_p_laplacian(n, p, fn, bound, radial=True)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"config: {exc}") from None
    raise ConfigError(f"config: unknown operator {name!r}")


def cmd_check_operator(cfg: dict, seed: int) -> ReportBundle:
    n = _field(cfg, "n", int)
    p = _field(cfg, "p", float)
    alpha = _field(cfg, "alpha", float, p)
    fld = _make_field(_field(cfg, "operator", str, "p_laplacian"), n, p,
                      _field(cfg, "weight", str, "inverse_quadratic"))
    lo, hi = cfg.get("box_bounds", (-2.0, 2.0))
    plan = SamplePlan(seed=seed, count=_field(cfg, "samples", int, 100_000),
                      box_bounds=(float(lo), float(hi)),
                      tolerance=_field(cfg, "tolerance", float, 1e-12))
    mono = check_monotonicity(fld, plan)
    am = check_alpha_monotonicity(fld, alpha, plan)
    rows = []
    for rep in (mono, am):
        row = {"check": rep.kind, "pass": rep.passed, "samples": rep.samples_checked,
               "min_pairing": rep.min_pairing, "k_hat": rep.k_hat,
               "violations": rep.violation_count}
        for eps, k in sorted(rep.k_by_eps.items(), reverse=True):
            row[f"k_eps_{eps:g}"] = k
        rows.append(row)
    status = "pass" if mono.passed and am.passed else "fail"
    summary = {"field": fld.name, "alpha": alpha, "plan": plan.to_dict(),
               "monotonicity": mono.to_dict(), "alpha_monotonicity": am.to_dict()}
    return ReportBundle("check-operator", cfg, rows, summary, status)


def _example_params(cfg: dict, where: str = "config") -> ExampleParams:
    family = _field(cfg, "family", str, "example1", where)
    return ExampleParams(n=_field(cfg, "n", int, where=where),
                         alpha=_field(cfg, "alpha", float, where=where),
                         q=_field(cfg, "q", float, where=where),
                         c=_field(cfg, "c", float, 1.0, where),
                         mu=_field(cfg, "mu", float, None, where),
                         lam=_field(cfg, "lambda", float, None, where),
                         family=family)


def _resolve_pair(cfg: dict, where: str = "config"):
    """Build the pair, deriving c when absent. Returns (params, pair, note)."""
    if cfg.get("family") == "constant_gap":
        n = _field(cfg, "n", int, where=where)
        pair = constant_gap_pair(n, _field(cfg, "alpha", float, where=where),
                                 _field(cfg, "q", float, where=where),
                                 gap=_field(cfg, "gap", float, 1.0, where),
                                 base=_field(cfg, "base", float, 0.0, where))
        return None, pair, None
    params = _example_params(cfg, where)
    if params.family == "example23" and params.lam is None:
        params.lam = params.sharp_lambda
    bad = params.violations()
    if bad:
        raise ConfigError(f"{params.family} refused, hypotheses violated: " + "; ".join(bad))
    if "c" not in cfg:
        c = derive_suitable_c(params)
        if c is None:
            return params, None, "no admissible c in [1e-8, 1e3]"
        params.c = c
    try:
        return params, build_pair(params), None
    except RegimeError as exc:
        raise ConfigError(str(exc)) from None


def cmd_verify_example(cfg: dict, seed: int) -> ReportBundle:
    params, pair, note = _resolve_pair(cfg)
    if pair is None:
        return ReportBundle("verify-example", cfg, [], {"params": params.to_dict(), "note": note}, "fail")
    ops = cfg.get("operators", ["p_laplacian", "modified_p_laplacian"])
    radii = [float(r) for r in cfg.get("R", [1.0, 10.0, 100.0])]
    qcfg = dict(cfg.get("quadrature", {}))
    qcfg.setdefault("seed", seed)
    try:
        spec = QuadratureSpec(**qcfg)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config: quadrature: {exc}") from None
    mc_samples = _field(cfg, "mc_samples", int, 0)

    grid = radius_grid()
    res, scale = strong_residual(pair, params.alpha, grid)
    pointwise = bool(np.all(np.isfinite(res)) and np.all(res <= 1e-12 * scale))

    rows = []
    statuses = []
    for name in ops:
        fld = _make_field(name, params.n, params.alpha)
        for R in radii:
            cut = make_cutoff(R)
            rep = weak_residual(fld, params.q, pair, cut, spec)
            row = {"operator": name, **rep.to_dict()}
            status = rep.status
            if mc_samples > 0:
                est, se = mc_oracle_residual(fld, params.q, pair, cut, mc_samples, seed)
                agree = abs(est - rep.residual) <= max(0.01 * rep.scale, 3.0 * se)
                row.update(mc_residual=est, mc_se=se, mc_agree=agree)
                if not agree and status == "pass":
                    status = "indeterminate"
            statuses.append(status)
            rows.append(row)
    if "fail" in statuses:
        status = "fail"
    elif "indeterminate" in statuses:
        status = "indeterminate"
    else:
        status = "pass"
    summary = {"params": params.to_dict(), "c": params.c, "c_derived": "c" not in cfg,
               "pointwise_supersolution": pointwise,
               "max_strong_residual": float(np.max(res)), "weak_status": status}
    return ReportBundle("verify-example", cfg, rows, summary, status)


def cmd_growth_scan(cfg: dict, seed: int) -> ReportBundle:
    pcfg = cfg.get("pair")
    if not isinstance(pcfg, dict):
        raise ConfigError("config: field 'pair' must be an object")
    params, pair, note = _resolve_pair(pcfg, "config.pair")
    if pair is None:
        return ReportBundle("growth-scan", cfg, [], {"note": note}, "indeterminate")
    fcfg = cfg.get("functional", {})
    kind = _field(fcfg, "kind", str, "T4", "config.functional")
    try:
        spec = GrowthFunctionalSpec(kind, pair.n, pair.alpha, pair.q,
                                    _field(fcfg, "nu", float, None, "config.functional"))
    except ValueError as exc:
        raise ConfigError(f"config.functional: {exc}") from None
    gcfg = cfg.get("R_grid", {})
    radii = growth_grid(_field(gcfg, "min", float, 1e2, "config.R_grid"),
                        _field(gcfg, "max", float, 1e5, "config.R_grid"),
                        _field(gcfg, "per_decade", int, 16, "config.R_grid"))
    series = growth_series(pair, spec, radii)
    rows = [{"R": R, "F": F} for R, F in series.points]
    if cfg.get("remark_form"):
        for row in rows:
            if kind == "T4":
                row["F_remark"] = growth_remark_T4(pair, pair.n, pair.alpha, pair.q, row["R"])
            else:
                row["F_remark"] = growth_remark_T7(pair, pair.n, pair.alpha, row["R"])
    summary = {"kind": kind, "slope": series.slope, "classification": series.classification,
               "limit_estimate": series.limit_estimate, "functional": spec.to_dict()}
    if params is not None:
        summary["params"] = params.to_dict()
    status = "indeterminate" if series.classification == "indeterminate" else "determinate"
    return ReportBundle("growth-scan", cfg, rows, summary, status)


def cmd_classify(cfg: dict, seed: int) -> ReportBundle:
    queries = cfg.get("queries", [cfg])
    rows, decisions = [], []
    for i, q in enumerate(queries):
        where = f"config.queries[{i}]" if "queries" in cfg else "config"
        try:
            query = RegimeQuery(_field(q, "n", int, where=where), _field(q, "alpha", float, where=where),
                                _field(q, "q", float, where=where))
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"{where}: {exc}") from None
        d = classify(query)
        decisions.append(d.to_dict())
        rows.append({"n": query.n, "alpha": query.alpha, "q": query.q,
                     "applicable": d.applicable, "critical_q": d.critical_q, "uncovered": d.uncovered})
    return ReportBundle("classify", cfg, rows, {"decisions": decisions}, "determinate")


COMMANDS = {
    "check-operator": cmd_check_operator,
    "verify-example": cmd_verify_example,
    "growth-scan": cmd_growth_scan,
    "classify": cmd_classify,
}


def paper_suite(seed: int) -> ReportBundle:
    results = run_suite(seed)
    rows = [{"criterion": r.number, "name": r.name, "pass": r.passed} for r in results]
    summary = summarize(results)
    return ReportBundle("paper-suite", {"seed": seed}, rows, summary,
                        "pass" if summary["pass"] else "fail")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="liouville-lab", description=__doc__.split("\n")[0])
    parser.add_argument("--paper-suite", action="store_true",
                        help="run the full verification battery")
    parser.add_argument("--out", type=Path, default=None, help="directory for JSON/CSV reports")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("-v", "--verbose", action="store_true")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="path to a JSON config")
    common.add_argument("--out", type=Path, default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command")
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    start = time.perf_counter()
    try:
        if args.paper_suite:
            seed = 0 if args.seed is None else args.seed
            bundle = paper_suite(seed)
            for row in bundle.summary["criteria"]:
                print(f"criterion {row['criterion']} [{'PASS' if row['pass'] else 'FAIL'}] {row['name']}",
                      file=sys.stderr)
        elif args.command:
            cfg = load_config(args.config)
            seed = args.seed if args.seed is not None else _field(cfg, "seed", int, 0)
            bundle = COMMANDS[args.command](cfg, seed)
        else:
            parser.print_usage(sys.stderr)
            return EXIT_CONFIG
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    log.info("%s finished in %.2fs", bundle.command, time.perf_counter() - start)
    print(_dumps({"command": bundle.command, "status": bundle.status, "summary": bundle.summary}))
    if args.out is not None:
        bundle.write(args.out)
    return bundle.exit_code


if __name__ == "__main__":
    sys.exit(main())
