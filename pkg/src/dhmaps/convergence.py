"""Finite-difference convergence sweeps over ``fd_step``.

Each residual is classified before fitting:

* ``floor``: every sample below ``FLOOR`` (exact or analytic data, nothing to fit);
* ``structural``: changes by less than ``STRUCTURAL_SPREAD`` across the sweep,
  i.e. it measures a genuine defect of the data rather than truncation error;
* ``fd``: FD-dominated; the log-log slope against h is fitted.
"""

import numpy as np

from . import fd
from .examples import verify

FLOOR = 1e-11
STRUCTURAL_SPREAD = 0.1
MIN_ORDER = 1.8
DEFAULT_STEPS = (1e-2, 3e-3, 1e-3)


def classify(values):
    v = np.asarray(values, dtype=float)
    if v.max() < FLOOR:
        return "floor"
    if (v.max() - v.min()) <= STRUCTURAL_SPREAD * v.max():
        return "structural"
    return "fd"


def convergence_sweep(case, steps=DEFAULT_STEPS, counts=None, analytic=True, min_order=MIN_ORDER):
    """Residual maxima for each step and fitted orders of the FD-dominated ones."""
    steps = [float(h) for h in steps]
    if len(steps) < 3:
        raise ValueError("a convergence sweep needs at least 3 fd steps")
    if len(set(steps)) != len(steps):
        raise ValueError("fd steps must be distinct")
    rows = []
    for h in steps:
        rep = verify(case, counts, h, analytic=analytic)
        rows.append({"fd_step": h, "residuals": {k: r.max for k, r in rep.residuals.items()}})
    names = sorted(rows[0]["residuals"])
    residuals = {}
    for name in names:
        vals = [row["residuals"][name] for row in rows]
        kind = classify(vals)
        entry = {"kind": kind, "order": None, "pass": None}
        if kind == "fd":
            entry["order"] = float(fd.fitted_order(steps, vals))
            entry["pass"] = bool(entry["order"] >= min_order)
        residuals[name] = entry
    fitted = [e for e in residuals.values() if e["kind"] == "fd"]
    return {
        "case": case.name,
        "steps": steps,
        "table": rows,
        "residuals": residuals,
        "min_order": min_order,
        "pass": bool(all(e["pass"] for e in fitted)),
        "fitted": len(fitted),
    }
