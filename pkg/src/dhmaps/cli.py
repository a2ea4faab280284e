"""Command-line front end.

    dhmaps verify --case theorem3 --grid 32x16 --fd-step 1e-4 --out report.json
    dhmaps properties --seed 42 --trials 1000 --json
    dhmaps convergence --case theorem3 --steps 1e-2,3e-3,1e-3
    dhmaps list-cases

Exit status: 0 all gated residuals pass, 1 some residual fails, 2 bad
configuration, unknown case, constructor validation failure or unwritable output.
"""

import argparse
import json
import os
import re
import sys
import tempfile
import time

import numpy as np

from . import fd
from .convergence import DEFAULT_STEPS, convergence_sweep
from .examples import CASES, ValidationError, build_case, verify
from .grids import parse_grid
from .properties import run_properties

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
STEP_RANGE = (1e-8, 1e-1)
COMPLEX_SCALARS = {"a", "b"}
MODE_KEY = re.compile(r"^([cd])_(-?\d+)$")
# derived quantities that appear in reports but are not constructor inputs
REPORT_ONLY = {"balance_residual", "mode_residual"}


class ConfigError(ValueError):
    pass


def _is_num(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _complex(v, key):
    if _is_num(v):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(_is_num(t) for t in v):
        return complex(v[0], v[1])
    raise ConfigError(f"{key}: expected a number or [re, im]")


def convert_params(raw):
    """Config values -> constructor keyword arguments.

    Lists of ``[re, im]`` pairs become complex arrays, ``c_k``/``d_k`` are
    collected into mode dictionaries, ``a`` and ``b`` are complex scalars and
    other number lists stay real.
    """
    if not isinstance(raw, dict):
        raise ConfigError("params must be a JSON object")
    out, modes = {}, {}
    for key, v in raw.items():
        if key in REPORT_ONLY:
            continue
        m = MODE_KEY.match(key)
        if m:
            modes.setdefault(m.group(1), {})[int(m.group(2))] = _complex(v, key)
        elif key in COMPLEX_SCALARS:
            out[key] = _complex(v, key)
        elif isinstance(v, list) and v and all(isinstance(t, list) for t in v):
            out[key] = np.array([_complex(t, key) for t in v])
        elif isinstance(v, list):
            if not all(_is_num(t) for t in v):
                raise ConfigError(f"{key}: mixed list")
            out[key] = np.array(v, dtype=float)
        elif isinstance(v, float) and v.is_integer() and key in ("m", "n", "p"):
            out[key] = int(v)
        else:
            out[key] = v
    out.update(modes)
    return out


def load_params(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read params file {path}: {exc}") from exc
    return convert_params(raw)


def parse_tols(items):
    tols = {}
    for item in items or []:
        name, sep, val = item.partition("=")
        if not sep or not name:
            raise ConfigError(f"bad --tol {item!r}; expected name=value")
        try:
            tols[name] = float(val)
        except ValueError:
            raise ConfigError(f"bad --tol value {val!r}") from None
    return tols


def check_step(h):
    lo, hi = STEP_RANGE
    if not lo < h < hi:
        raise ConfigError(f"fd_step must lie in ({lo:g}, {hi:g}), got {h:g}")
    return h


def write_atomic(path, text):
    """Write via a temporary file in the target directory, then rename."""
    d = os.path.dirname(os.path.abspath(path))
    fd_, tmp = tempfile.mkstemp(dir=d, prefix=".dhmaps-", suffix=".tmp")
    try:
        with os.fdopen(fd_, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(t) for k, t in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(t) for t in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, np.generic):
        return v.item()
    return v


def dumps(report):
    return json.dumps(_jsonable(report), indent=2)


def error_report(args, condition, message):
    return {"case": getattr(args, "case", None), "error": {"condition": condition, "message": message}}


# -- subcommands ------------------------------------------------------------------

def cmd_verify(args):
    t0 = time.perf_counter()
    counts = parse_grid(args.grid) if args.grid else None
    h = check_step(args.fd_step)
    case = build_case(args.case, **load_params(args.params))
    rep = verify(case, counts, h, parse_tols(args.tol), analytic=not args.fd_only)
    out = {"case": case.name, "params": case.params, "grid": list(rep.grid), "fd_step": h,
           "seed": args.seed}
    out.update(rep.to_dict())
    out["pass"] = rep.passed
    out["wall_time_ms"] = round(1000 * (time.perf_counter() - t0), 3)
    return out, EXIT_PASS if rep.passed else EXIT_FAIL


def cmd_properties(args):
    if args.trials < 1:
        raise ConfigError("trials must be at least 1")
    rep = run_properties(args.seed, args.trials, parse_tols(args.tol))
    return rep, EXIT_PASS if rep["pass"] else EXIT_FAIL


def cmd_convergence(args):
    try:
        steps = [float(s) for s in args.steps.split(",") if s.strip()]
    except ValueError:
        raise ConfigError(f"bad --steps {args.steps!r}") from None
    if len(steps) < 3:
        raise ConfigError("a convergence sweep needs at least 3 fd steps")
    for h in steps:
        check_step(h)
    counts = parse_grid(args.grid) if args.grid else None
    case = build_case(args.case, **load_params(args.params))
    rep = convergence_sweep(case, steps, counts, analytic=not args.fd_only)
    return rep, EXIT_PASS if rep["pass"] else EXIT_FAIL


def cmd_list_cases(args):
    return {"cases": sorted(CASES)}, EXIT_PASS


def _summary(report):
    lines = []
    if "error" in report:
        e = report["error"]
        return f"error: {e['condition']}: {e['message']}"
    if "cases" in report:
        return "\n".join(report["cases"])
    if "properties" in report:
        for k, p in report["properties"].items():
            lines.append(f"{'PASS' if p['pass'] else 'FAIL'}  {k:32s} {p['max_violation']:.3e}  (tol {p['tol']:g})")
    elif "table" in report:
        for k, e in report["residuals"].items():
            order = "" if e["order"] is None else f"order {e['order']:.3f}"
            lines.append(f"{e['kind']:10s} {k:32s} {order}")
    else:
        for k, r in report["residuals"].items():
            flag = "    " if r["pass"] is None else ("PASS" if r["pass"] else "FAIL")
            lines.append(f"{flag}  {k:32s} max {r['max']:.3e}  mean {r['mean']:.3e}")
    lines.append("PASS" if report.get("pass") else "FAIL")
    return "\n".join(lines)


def build_parser():
    p = argparse.ArgumentParser(prog="dhmaps", description="Verify explicit Dirac-harmonic map constructions.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, case=True):
        if case:
            sp.add_argument("--case", required=True, help="registered case name (see list-cases)")
            sp.add_argument("--grid", help="per-axis point counts, e.g. 32x16")
            sp.add_argument("--params", help="JSON config file of constructor parameters")
            sp.add_argument("--fd-only", action="store_true", help="finite differences even where exact derivatives exist")
        sp.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override a tolerance (repeatable)")
        sp.add_argument("--seed", type=int, default=42)
        sp.add_argument("--out", help="write the JSON report here (atomically)")
        sp.add_argument("--json", action="store_true", help="print the JSON report to stdout")

    v = sub.add_parser("verify", help="evaluate all residuals of a case")
    common(v)
    v.add_argument("--fd-step", type=float, default=fd.DEFAULT_STEP)
    pr = sub.add_parser("properties", help="randomized invariant suites")
    common(pr, case=False)
    pr.add_argument("--trials", type=int, default=1000)
    c = sub.add_parser("convergence", help="residuals against fd step with fitted orders")
    common(c)
    c.add_argument("--steps", default=",".join(f"{h:g}" for h in DEFAULT_STEPS))
    lc = sub.add_parser("list-cases", help="print registered case names")
    lc.add_argument("--json", action="store_true")
    lc.add_argument("--out")
    return p


COMMANDS = {"verify": cmd_verify, "properties": cmd_properties,
            "convergence": cmd_convergence, "list-cases": cmd_list_cases}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        report, status = COMMANDS[args.command](args)
    except ValidationError as exc:
        report, status = error_report(args, exc.condition, exc.detail), EXIT_CONFIG
    except KeyError as exc:
        report, status = error_report(args, "unknown case", exc.args[0]), EXIT_CONFIG
    except (ConfigError, ValueError, TypeError) as exc:
        report, status = error_report(args, "configuration", str(exc)), EXIT_CONFIG
    text = dumps(report)
    if getattr(args, "out", None):
        try:
            write_atomic(args.out, text + "\n")
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    print(text if args.json else _summary(report))
    return status


if __name__ == "__main__":
    sys.exit(main())
