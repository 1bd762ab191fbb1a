"""Command-line interface: ``tlevy {cumulants,regime,oracle,simulate,returns}``.

Every command accepts ``--config FILE`` holding a JSON object whose keys
mirror the long flags (``eps_list`` or ``eps-list``); flags given on the
command line override the file.  Exit codes: 0 success, 2 invalid input,
3 numerical failure, 4 I/O failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from datetime import datetime, timezone

from . import __version__
from .errors import DomainError, QuadratureError, TlfError, IterationLimitError

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

_MODEL_DEFAULTS = dict(alpha=None, gamma=1.0, ell=None, truncation="ms", h=None)
_DEFAULTS = {
    "cumulants": dict(_MODEL_DEFAULTS, orders="2,4,6", format="csv", out=None),
    "regime": dict(_MODEL_DEFAULTS, format="json", out=None),
    "oracle": dict(alpha=None, gamma=1.0, truncation="ms", h=None, order=2,
                   eps_list="1e-2,1e-3,1e-4", format="csv", out=None),
    "simulate": dict(_MODEL_DEFAULTS, steps=None, walkers=None, seed=0, record=None,
                     out=None, backend=None),
    "returns": dict(alpha=None, gamma=1.0, n_list="1", format="csv", out=None),
}
_REQUIRED = {
    "cumulants": ("alpha", "ell"),
    "regime": ("alpha", "ell"),
    "oracle": ("alpha",),
    "simulate": ("alpha", "ell", "steps", "walkers", "out"),
    "returns": ("alpha",),
}

CUMULANT_COLUMNS = ("j", "mu_j", "kappa_j", "lambda_j", "a_alpha", "epsilon")
REGIME_COLUMNS = ("diffusion", "n_gauss", "n_levy_max", "epsilon")
ORACLE_COLUMNS = ("epsilon", "kappa_numeric", "kappa_asymptotic", "rel_error")
RETURNS_COLUMNS = ("n", "return_density")


class UsageError(Exception):
    pass


# -- canonical serialization ----------------------------------------------------

def format_float(x: float) -> str:
    return "%.17g" % x


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, ``%.17g`` floats, no insignificant whitespace."""
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError(f"non-finite float {obj!r} cannot be serialized")
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        return "{" + ",".join(f"{json.dumps(str(k))}:{dumps(obj[k])}" for k in sorted(obj)) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(dumps(v) for v in obj) + "]"
    if hasattr(obj, "item"):
        return dumps(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_csv(rows, columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([format_float(r[c]) if isinstance(r[c], float) else r[c] for c in columns])
    return buf.getvalue()


# -- argument handling ------------------------------------------------------------

def _model_flags(p, with_ell=True):
    p.add_argument("--alpha", type=float, help="index of stability, 0 < alpha < 2")
    p.add_argument("--gamma", type=float, help="scale of the stable law (default 1)")
    if with_ell:
        p.add_argument("--ell", type=float, help="truncation scale")
    p.add_argument("--truncation", help="ms, exp or pexp (default ms)")
    p.add_argument("--h", type=float, help="shape parameter of pexp")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tlevy", description=__doc__.splitlines()[0],
                                     argument_default=argparse.SUPPRESS)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt=True):
        p.add_argument("--config", help="JSON file with default flag values")
        if fmt:
            p.add_argument("--format", choices=("csv", "json"))
            p.add_argument("--out", help="write the table here instead of stdout")

    p = sub.add_parser("cumulants", help="cumulant table of a model", argument_default=argparse.SUPPRESS)
    _model_flags(p)
    p.add_argument("--orders", help="comma-separated even orders (default 2,4,6)")
    common(p)

    p = sub.add_parser("regime", help="diffusion coefficient and regime scales",
                       argument_default=argparse.SUPPRESS)
    _model_flags(p)
    common(p)

    p = sub.add_parser("oracle", help="quadrature versus first-order cumulants",
                       argument_default=argparse.SUPPRESS)
    _model_flags(p, with_ell=False)
    p.add_argument("--order", type=int, help="even order 2, 4 or 6")
    p.add_argument("--eps-list", dest="eps_list", help="comma-separated epsilon values in (0, 0.1]")
    common(p)

    p = sub.add_parser("simulate", help="Monte Carlo ensemble of walks",
                       argument_default=argparse.SUPPRESS)
    _model_flags(p)
    p.add_argument("--steps", type=int)
    p.add_argument("--walkers", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--record", help="comma-separated step counts (default: steps)")
    p.add_argument("--out", help="output prefix for .stats.csv and .manifest.json")
    p.add_argument("--backend", choices=("numba", "numpy"))
    common(p, fmt=False)

    p = sub.add_parser("returns", help="Levy-regime return density", argument_default=argparse.SUPPRESS)
    p.add_argument("--alpha", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--n-list", dest="n_list", help="comma-separated step counts")
    common(p)
    return parser


def _load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path}: invalid JSON ({exc.msg})") from None
    if not isinstance(data, dict):
        raise UsageError(f"config {path}: expected a JSON object")
    return {str(k).replace("-", "_"): v for k, v in data.items()}


def resolve_params(command: str, explicit: dict) -> dict:
    """Defaults, then config file, then explicit flags."""
    params = dict(_DEFAULTS[command])
    if "config" in explicit:
        cfg = _load_config(explicit["config"])
        unknown = sorted(set(cfg) - set(params))
        if unknown:
            raise UsageError(f"config: unknown keys {unknown}")
        params.update(cfg)
    params.update({k: v for k, v in explicit.items() if k not in ("config", "command")})
    missing = [k for k in _REQUIRED[command] if params.get(k) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + k.replace("_", "-") for k in missing))
    return params


def _number(value, name, kind=float):
    try:
        out = kind(value)
    except (TypeError, ValueError):
        raise UsageError(f"--{name}: expected a number, got {value!r}") from None
    if kind is int and isinstance(value, float) and value != out:
        raise UsageError(f"--{name}: expected an integer, got {value!r}")
    return out


def _list(value, name, kind=float):
    if isinstance(value, (list, tuple)):
        items = list(value)
    else:
        items = [v for v in str(value).split(",") if v.strip()]
    if not items:
        raise UsageError(f"--{name}: empty list")
    return [_number(v, name, kind) for v in items]


def _model(params):
    from .truncation import Family, make_model
    fam = Family.parse(params["truncation"])
    if fam is Family.CUSTOM:
        raise UsageError("--truncation: custom deformations are not available from the command line")
    if fam is Family.POWER_EXPONENTIAL and params.get("h") is None:
        raise UsageError("--h is required for --truncation pexp")
    return make_model(_number(params["alpha"], "alpha"), _number(params["gamma"], "gamma"),
                      _number(params["ell"], "ell"), fam, params.get("h"))


# -- commands -----------------------------------------------------------------------

def cmd_cumulants(params):
    from .cumulants import cumulant_table
    model = _model(params)
    table = cumulant_table(model, _list(params["orders"], "orders", int))
    rows = [dict(r, a_alpha=table.a_alpha, epsilon=table.epsilon) for r in table.rows()]
    if params["format"] == "json":
        body = dict(a_alpha=table.a_alpha, epsilon=table.epsilon,
                    rows=[{k: r[k] for k in CUMULANT_COLUMNS[:4]} for r in rows])
        return dumps(body) + "\n"
    return to_csv(rows, CUMULANT_COLUMNS)


def cmd_regime(params):
    from .cumulants import regime_report
    rep = regime_report(_model(params))
    row = {c: float(getattr(rep, c)) for c in REGIME_COLUMNS}
    if params["format"] == "json":
        return dumps(row) + "\n"
    return to_csv([row], REGIME_COLUMNS)


def cmd_oracle(params):
    from .oracle import convergence_sweep
    from .truncation import Family
    order = _number(params["order"], "order", int)
    if order not in (2, 4, 6):
        raise UsageError(f"--order must be 2, 4 or 6, got {order}")
    eps = _list(params["eps_list"], "eps-list")
    bad = [e for e in eps if not 0.0 < e <= 0.1]
    if bad:
        raise UsageError(f"--eps-list: values must lie in (0, 0.1], got {bad}")
    fam = Family.parse(params["truncation"])
    if fam is Family.POWER_EXPONENTIAL and params.get("h") is None:
        raise UsageError("--h is required for --truncation pexp")
    rows = []
    for e in eps:
        try:
            rep = convergence_sweep(_number(params["alpha"], "alpha"), fam, order, [e],
                                    gamma=_number(params["gamma"], "gamma"), h=params.get("h"))[0]
        except QuadratureError as exc:
            raise QuadratureError(f"epsilon={format_float(e)}: {exc}") from exc
        rows.append({c: float(getattr(rep, c)) for c in ORACLE_COLUMNS})
    if params["format"] == "json":
        return dumps(dict(order=order, rows=rows)) + "\n"
    return to_csv(rows, ORACLE_COLUMNS)


def cmd_returns(params):
    from .cumulants import levy_return_density
    from .stable import StableParams
    sp = StableParams(_number(params["alpha"], "alpha"), _number(params["gamma"], "gamma"))
    ns = _list(params["n_list"], "n-list", int)
    rows = [dict(n=n, return_density=levy_return_density(sp, n)) for n in ns]
    if params["format"] == "json":
        return dumps(dict(rows=rows)) + "\n"
    return to_csv(rows, RETURNS_COLUMNS)


def cmd_simulate(params):
    from .kernels import default_backend
    from .montecarlo import EnsembleStats, WalkConfig, run_ensemble
    model = _model(params)
    steps = _number(params["steps"], "steps", int)
    record = _list(params["record"], "record", int) if params.get("record") is not None else [steps]
    cfg = WalkConfig(model, steps, _number(params["walkers"], "walkers", int),
                     _number(params["seed"], "seed", int), tuple(record))
    backend = params.get("backend") or default_backend()
    stats_ = run_ensemble(cfg, backend)
    return to_csv(stats_.rows(), EnsembleStats.COLUMNS), backend


def manifest(command, params, backend=None) -> dict:
    return dict(command=command, params={k: v for k, v in params.items() if k != "out"},
                seed=params.get("seed"), version=__version__, backend=backend,
                timestamp=datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"))


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


_COMMANDS = dict(cumulants=cmd_cumulants, regime=cmd_regime, oracle=cmd_oracle, returns=cmd_returns)


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    explicit = vars(ns)
    command = explicit["command"]
    try:
        params = resolve_params(command, explicit)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            if command == "simulate":
                text, backend = cmd_simulate(params)
                prefix = params["out"]
                _write(prefix + ".stats.csv", text)
                _write(prefix + ".manifest.json", dumps(manifest(command, params, backend)) + "\n")
                return EXIT_OK
            text = _COMMANDS[command](params)
        man = dumps(manifest(command, params)) + "\n"
        if params.get("out"):
            _write(params["out"], text)
            _write(params["out"] + ".manifest.json", man)
        else:
            stdout.write(text)
            stderr.write(man)
        return EXIT_OK
    except (UsageError, DomainError) as exc:
        stderr.write(f"tlevy {command}: error: {exc}\n")
        return EXIT_USAGE
    except (QuadratureError, IterationLimitError, TlfError, ArithmeticError) as exc:
        stderr.write(f"tlevy {command}: numerical failure: {exc}\n")
        return EXIT_NUMERIC
    except OSError as exc:
        stderr.write(f"tlevy {command}: I/O error: {exc}\n")
        return EXIT_IO


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
