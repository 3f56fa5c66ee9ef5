"""Command-line entry point ``triperiod``.

Exit codes: 0 success, 1 a criterion or config assertion failed, 2 invalid
input or configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import operator
import sys
from pathlib import Path

import numpy as np

from triperiod import __version__, asympt, betacore, corput, spectral
from triperiod.errors import TriperiodError
from triperiod.experiments import EXPERIMENTS, parse_imag, run_experiment
from triperiod.fitting import fit_exponent
from triperiod.repn import CircleFunction, RepParams, make_test_vector
from triperiod.trilinear import h_form, l_kernel

SCHEMA_VERSION = 1
SIG = 12
OPS = {"<": operator.lt, "<=": operator.le, ">": operator.gt, ">=": operator.ge, "==": operator.eq, "!=": operator.ne}
CONFIG_KEYS = {"experiment", "params", "assertions"}
PARAM_KEYS = {"tau", "tau_prime", "t_grid", "n_rule", "tol", "seed"}


class ConfigError(Exception):
    pass


# --- formatting ------------------------------------------------------------


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.{SIG}g}"
    if isinstance(x, (complex, np.complexfloating)):
        z = complex(x)
        return f"{z.real:.{SIG}g}{z.imag:+.{SIG}g}j"
    if x is None:
        return ""
    if isinstance(x, (list, tuple, dict)):
        return json.dumps(jsonable(x), separators=(",", ":"))
    return str(x)


def jsonable(x):
    """Round floats to 12 significant digits; complex becomes ``{re, im}``."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        v = float(x)
        return float(f"{v:.{SIG}g}") if math.isfinite(v) else str(v)
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": jsonable(complex(x).real), "im": jsonable(complex(x).imag)}
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    return x


def rows_to_csv(rows: list[dict]) -> str:
    keys: list[str] = []
    for r in rows:
        keys.extend(k for k in r if k not in keys)
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(keys)
    for r in rows:
        wr.writerow([fmt(r.get(k)) for k in keys])
    return buf.getvalue()


def emit(args, record: dict, rows: list[dict] | None = None):
    """Print ``record`` as text or JSON; optionally write ``rows`` to ``--csv``."""
    rows = rows if rows is not None else [record]
    if getattr(args, "csv", None):
        Path(args.csv).write_text(rows_to_csv(rows))
    if getattr(args, "json", False):
        print(json.dumps(jsonable(record), indent=2, sort_keys=False))
    else:
        for k, v in record.items():
            print(f"{k}: {fmt(v)}")


# --- config ----------------------------------------------------------------


def load_config(path) -> dict:
    try:
        cfg = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc}") from exc
    return validate_config(cfg)


def validate_config(cfg) -> dict:
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    extra = set(cfg) - CONFIG_KEYS
    if extra:
        raise ConfigError(f"unknown config keys: {sorted(extra)}")
    name = cfg.get("experiment")
    if name not in EXPERIMENTS:
        raise ConfigError(f"'experiment' must be one of {sorted(EXPERIMENTS)}")
    params = cfg.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("'params' must be an object")
    for key in ("tau", "tau_prime"):
        if key in params:
            try:
                parse_imag(params[key], key)
            except TriperiodError as exc:
                raise ConfigError(str(exc)) from exc
    if "t_grid" in params:
        g = params["t_grid"]
        if not isinstance(g, list) or not g or not all(isinstance(v, (int, float)) and not isinstance(v, bool) and v > 0 for v in g):
            raise ConfigError("'t_grid' must be a nonempty list of positive numbers")
    if "tol" in params and not (isinstance(params["tol"], (int, float)) and params["tol"] > 0):
        raise ConfigError("'tol' must be positive")
    if "seed" in params and not (isinstance(params["seed"], int) and not isinstance(params["seed"], bool)):
        raise ConfigError("'seed' must be an integer")
    assertions = cfg.get("assertions", [])
    if not isinstance(assertions, list):
        raise ConfigError("'assertions' must be a list")
    for a in assertions:
        if not isinstance(a, dict) or set(a) != {"metric", "op", "value"}:
            raise ConfigError("each assertion needs exactly {metric, op, value}")
        if a["op"] not in OPS:
            raise ConfigError(f"assertion op must be one of {sorted(OPS)}")
        if not isinstance(a["metric"], str):
            raise ConfigError("assertion metric must be a string")
    return {"experiment": name, "params": params, "assertions": assertions}


def lookup_metric(summary: dict, metric: str):
    """Summary value by key, or by a dotted path into nested dicts and lists."""
    if metric in summary:
        return summary[metric]
    cur = summary
    for part in metric.split("."):
        if isinstance(cur, dict) and part in cur:
            cur = cur[part]
        elif isinstance(cur, list) and part.lstrip("-").isdigit():
            cur = cur[int(part)]
        else:
            raise KeyError(metric)
    return cur


# --- subcommands -----------------------------------------------------------


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 2
    try:
        res = run_experiment(cfg["experiment"], cfg["params"])
    except TriperiodError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 2
    outcomes = []
    for a in cfg["assertions"]:
        try:
            actual = lookup_metric(res.summary, a["metric"])
            ok = bool(OPS[a["op"]](actual, a["value"]))
        except KeyError:
            print(f"invalid config: unknown metric {a['metric']!r}", file=sys.stderr)
            return 2
        except TypeError:
            print(f"invalid config: metric {a['metric']!r} is not comparable", file=sys.stderr)
            return 2
        outcomes.append({**a, "actual": actual, "passed": ok})
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = args.name or cfg["experiment"]
    csv_path = Path(args.csv) if args.csv else out_dir / f"{stem}.csv"
    csv_path.write_text(rows_to_csv(res.rows))
    report = {
        "schema_version": SCHEMA_VERSION,
        "experiment": res.name,
        "criterion": res.criterion,
        "params": cfg["params"],
        "passed": res.passed and all(o["passed"] for o in outcomes),
        "checks": [{"name": c.name, "kind": c.kind, "passed": c.passed, "detail": c.detail} for c in res.checks],
        "assertions": outcomes,
        "summary": res.summary,
        "data": csv_path.name,
    }
    json_path = out_dir / f"{stem}.json"
    json_path.write_text(json.dumps(jsonable(report), indent=2) + "\n")
    if args.json:
        print(json.dumps(jsonable(report), indent=2))
    else:
        for c in res.checks:
            print(f"[{'PASS' if c.passed else 'FAIL'}] ({c.kind}) {c.name} {c.detail}".rstrip())
        for o in outcomes:
            print(f"[{'PASS' if o['passed'] else 'FAIL'}] (assertion) {o['metric']} {o['op']} {fmt(o['value'])}: actual {fmt(o['actual'])}")
        print(f"wrote {csv_path} and {json_path}")
    if not report["passed"]:
        names = [c.name for c in res.failing()] + [o["metric"] for o in outcomes if not o["passed"]]
        print(f"criterion {res.criterion} ({res.name}) failed: {'; '.join(names)}", file=sys.stderr)
        return 1
    return 0


def _params(args) -> RepParams:
    return RepParams(1j * parse_imag(args.tau, "tau"), 1j * parse_imag(args.tau_prime, "tau_prime"))


def cmd_kernel(args) -> int:
    p = _params(args)
    r = l_kernel(p, args.t, args.c, args.tol)
    rec = {"t": args.t, "c": args.c, "value": complex(r.value), "err_estimate": r.err_estimate, "converged": r.converged}
    if args.t >= p.S_cutoff and math.fmod(abs(args.c), math.pi) != 0:
        ap = asympt.l_kernel_approx(p, args.t, args.c)
        rec.update(main_term=ap.main_term, remainder_budget=ap.remainder_budget, error=abs(complex(r.value) - ap.main_term))
    emit(args, rec)
    return 0


def cmd_hform(args) -> int:
    p = _params(args)
    w = make_test_vector(args.n, args.kind)
    H = h_form(p, args.t, w, args.tol, args.method)
    rec = {"t": args.t, "n": args.n, "kind": args.kind, "H": H, "regime": asympt.classify_regime(args.t, args.n).value}
    if args.t >= p.S_cutoff:
        rec["budget_II"] = asympt.remainder_budget_II(p, args.t, args.n)
    rec["airy_main"] = abs(2.0 * asympt.f_main_term(args.t, args.n)) ** 2 if args.kind == "plain" else None
    emit(args, rec)
    return 0


def cmd_beta(args) -> int:
    s = complex(args.sigma.replace("i", "j")) if isinstance(args.sigma, str) else args.sigma
    sp = complex(args.sigma_prime.replace("i", "j")) if isinstance(args.sigma_prime, str) else args.sigma_prime
    phi = betacore.bump(args.radius, args.center)
    lam = 1j * args.t
    if args.kind == "std":
        r = betacore.std_beta(lam, s, sp, phi, args.tol)
        main = betacore.std_beta_main(lam, s, sp, phi)
    elif args.kind == "scaled":
        r = betacore.scaled_beta(lam, s, sp, args.a, phi, args.tol)
        main = betacore.scaled_beta_main(lam, s, sp, args.a, phi(0.0))
    else:
        r = betacore.general_beta(np.sin, lam, s, sp, args.c, phi, args.tol)
        main = betacore.general_beta_main(np.sin, lam, s, sp, args.c, phi)
    rec = {"kind": args.kind, "t": args.t, "value": complex(r.value), "err_estimate": r.err_estimate, "main_term": main, "remainder": abs(complex(r.value) - main)}
    emit(args, rec)
    return 0


def _poly(coeffs):
    c = np.asarray(coeffs, dtype=float)
    return np.polynomial.Polynomial(c)


def cmd_vdc(args) -> int:
    f = _poly(args.coeffs)
    lo, hi = args.interval
    if args.radius:
        phi = betacore.bump(args.radius, args.center)
    else:
        phi = lambda x: np.ones_like(np.asarray(x, dtype=float))  # noqa: E731
    B = corput.vdc_bound(f, phi, (lo, hi), args.k, fk=f.deriv(args.k), f1=f.deriv(1))
    freq = float(np.max(np.abs(f.deriv(1)(np.linspace(lo, hi, 257)))))
    I = corput.oscillatory_integral(f, phi, (lo, hi), freq)
    emit(args, {"k": args.k, "bound": B, "abs_I": abs(I.value), "err_estimate": I.err_estimate, "dominated": abs(I.value) <= B})
    return 0


def cmd_spectrum(args) -> int:
    p = _params(args)
    if args.action == "gen":
        spec = spectral.gen_spectrum(args.T_max, args.kappa, args.A, args.seed, args.model, p.S_cutoff)
        path, side = spectral.write_spectrum(spec, args.out)
        rec = {"points": len(spec), "T_max": spec.T_max, "kappa": spec.weyl_const, "A": spec.mv_const, "seed": spec.seed, "csv": str(path), "sidecar": str(side)}
        rec.update(spec.audit(p.S_cutoff))
        emit(args, rec)
        return 0
    spec = spectral.read_spectrum(args.spectrum)
    if args.action == "sum":
        rep = spectral.parseval_sum(spec, p, args.n, args.mode)
        rec = {
            "n": rep.n,
            "mode": rep.mode,
            "C": rep.C,
            "low_H": rep.low.H,
            "tail_sum": rep.tail_sum,
            "tail_bound": rep.tail_bound,
            "total": rep.total,
            "blocks_ok": rep.blocks_ok,
            "blocks_ok_literal": rep.blocks_ok_literal,
        }
        if rep.mode == "oracle-spot-check":
            rec["spot_ok"] = rep.spot_ok
        emit(args, rec, rep.rows())
        return 0
    e = spectral.subconvexity_extract(spec, p, args.T, args.b_window)
    emit(
        args,
        {
            "T": e.T,
            "n": e.n,
            "window_lo": e.window[0],
            "window_hi": e.window[1],
            "window_sum": e.window_sum,
            "min_H": e.min_H,
            "h_delta": e.h_delta,
            "certified_bound": e.certified_bound,
            "normalized": e.normalized,
            "empty": e.empty,
        },
    )
    return 0


def cmd_fit(args) -> int:
    if args.data:
        with open(args.data, newline="") as fh:
            rd = csv.DictReader(fh)
            try:
                pairs = [(float(r[args.x]), float(r[args.y])) for r in rd]
            except (KeyError, ValueError) as exc:
                raise TriperiodError(f"cannot read columns {args.x!r}, {args.y!r}: {exc}") from exc
    else:
        try:
            pairs = [tuple(float(v) for v in item.split(",")) for item in args.pairs]
        except ValueError as exc:
            raise TriperiodError(f"pairs must look like x,y: {exc}") from exc
    fit = fit_exponent(pairs)
    emit(args, {"slope": fit.slope, "intercept": fit.intercept, "r2": fit.r2, "points": len(pairs)})
    return 0


# --- parser ----------------------------------------------------------------


def _common(sp, params: bool = True):
    sp.add_argument("--json", action="store_true", help="print JSON instead of text")
    sp.add_argument("--csv", metavar="PATH", help="also write the table to PATH")
    if params:
        sp.add_argument("--tau", default="0.3i", help="tau as '0.3i' or its imaginary part")
        sp.add_argument("--tau-prime", dest="tau_prime", default="0.7i")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="triperiod", description="Trilinear functional numerics and experiments.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("run", help="run an experiment from a JSON config")
    sp.add_argument("config")
    sp.add_argument("--out-dir", default=".", help="directory for the CSV and JSON reports")
    sp.add_argument("--name", help="file stem for the reports (default: experiment name)")
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--csv", metavar="PATH", help="data CSV path (default: OUT_DIR/NAME.csv)")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("kernel", help="evaluate the reduced kernel l(c)")
    _common(sp)
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--c", type=float, required=True)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.set_defaults(func=cmd_kernel)

    sp = sub.add_parser("hform", help="Hermitian form on a test vector")
    _common(sp)
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--kind", choices=["plain", "tilde"], default="plain")
    sp.add_argument("--method", choices=["auto", "series", "quad"], default="auto")
    sp.add_argument("--tol", type=float, default=1e-7)
    sp.set_defaults(func=cmd_hform)

    sp = sub.add_parser("beta", help="Beta-type integrals against their main terms")
    _common(sp, params=False)
    sp.add_argument("--kind", choices=["std", "scaled", "general"], default="std")
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--sigma", default="-0.5")
    sp.add_argument("--sigma-prime", dest="sigma_prime", default="-0.5")
    sp.add_argument("--a", type=float, default=0.1, help="scale for --kind scaled")
    sp.add_argument("--c", type=float, default=0.3, help="offset for --kind general (h = sin)")
    sp.add_argument("--radius", type=float, default=0.5)
    sp.add_argument("--center", type=float, default=0.0)
    sp.add_argument("--tol", type=float, default=1e-11)
    sp.set_defaults(func=cmd_beta)

    sp = sub.add_parser("vdc", help="van der Corput bound for a polynomial phase")
    _common(sp, params=False)
    sp.add_argument("--coeffs", type=float, nargs="+", required=True, help="phase coefficients a0 a1 a2 ...")
    sp.add_argument("--k", type=int, choices=[1, 2], required=True)
    sp.add_argument("--interval", type=float, nargs=2, default=[-1.0, 1.0])
    sp.add_argument("--radius", type=float, default=0.0, help="bump amplitude radius (0: constant 1)")
    sp.add_argument("--center", type=float, default=0.0)
    sp.set_defaults(func=cmd_vdc)

    sp = sub.add_parser("spectrum", help="synthetic spectra")
    ssub = sp.add_subparsers(dest="action", required=True)
    g = ssub.add_parser("gen", help="generate a spectrum file")
    _common(g)
    g.add_argument("--T-max", dest="T_max", type=float, required=True)
    g.add_argument("--kappa", type=float, default=1.0)
    g.add_argument("--A", type=float, default=1.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--model", choices=list(spectral.D_MODELS), default="uniform")
    g.add_argument("--out", required=True, help="CSV path; the sidecar is OUT.json")
    s = ssub.add_parser("sum", help="dyadic Parseval sums")
    _common(s)
    s.add_argument("--spectrum", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--mode", choices=["asymptotic", "oracle-spot-check"], default="asymptotic")
    e = ssub.add_parser("extract", help="window mass against its certificate")
    _common(e)
    e.add_argument("--spectrum", required=True)
    e.add_argument("--T", type=float, required=True)
    e.add_argument("--b-window", dest="b_window", type=float, default=None)
    for x in (g, s, e):
        x.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("fit", help="log-log exponent fit")
    _common(sp, params=False)
    grp = sp.add_mutually_exclusive_group(required=True)
    grp.add_argument("--data", help="CSV file with a header")
    grp.add_argument("--pairs", nargs="+", help="x,y pairs")
    sp.add_argument("--x", default="x", help="x column for --data")
    sp.add_argument("--y", default="y", help="y column for --data")
    sp.set_defaults(func=cmd_fit)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except TriperiodError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
