"""Result emission: cells.csv, summary.json and plot-ready two-column files.

Everything except the timestamp in summary.json is a pure function of the
configuration and seed, so repeated runs are byte-identical.
"""

import dataclasses
import json
import math
import os
import time

from . import __version__
from .engine import fit_loglog_rate

CSV_FIXED_COLUMNS = [
    "experiment_id", "family", "regime", "estimator", "t",
    "population_size", "sample_sizes", "k_t", "replications", "valid",
    "mean", "bias", "variance", "mse", "mc_se", "ks_stat",
]

PLOT_METRICS = ("mean", "bias", "variance", "mse", "ks_stat")


def _fmt(v):
    """Shortest round-trip decimal for floats; empty-safe for NaN."""
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(v)


def _eps_label(eps):
    return f"p_outside_{_fmt(float(eps))}"


def _cell_population(cell):
    cfg = cell.cfg
    if cfg.family == "interval":
        return _fmt(float(cfg.theta))
    if cfg.family == "nsum_general":
        return str(cfg.total)
    return str(cfg.population_size)


def _x_value(regime, cell):
    """Plot abscissa: the growing quantity of the regime."""
    if regime == "infill":
        return cell.k_t
    return cell.target


def rate_fits(config, results):
    """Per-estimator log-log MSE rate against the regime's growing axis."""
    fits = {}
    for eid in config.estimators:
        xs, ys = [], []
        for cell, stats in results:
            st = stats.get(eid)
            if st is None or not st.valid:
                continue
            x = _x_value(config.regime, cell)
            if st.mse > 0 and x > 0:
                xs.append(x)
                ys.append(st.mse)
        if len(xs) >= 3:
            fit = fit_loglog_rate(xs, ys)
            fits[eid] = {"slope": fit.slope, "intercept": fit.intercept,
                         "r_squared": fit.r_squared}
        else:
            fits[eid] = None
    return fits


def render_cells_csv(config, results):
    header = CSV_FIXED_COLUMNS + [_eps_label(e) for e in config.eps] \
        + ["seed"]
    lines = [",".join(header)]
    for cell, stats in results:
        for eid in config.estimators:
            st = stats.get(eid)
            if st is None:
                continue
            row = [
                config.experiment_id, config.family, config.regime, eid,
                str(cell.t), _cell_population(cell),
                "+".join(str(s) for s in cell.sample_sizes),
                str(cell.k_t), str(st.replications), str(st.valid),
                _fmt(st.mean), _fmt(st.bias), _fmt(st.variance),
                _fmt(st.mse), _fmt(st.mc_se), _fmt(st.ks_stat),
            ]
            row += [_fmt(st.p_outside[e]) for e in config.eps]
            row.append(str(st.seed))
            lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def _schedule_echo(schedule):
    cells = []
    for cell in schedule.cells:
        model = dataclasses.asdict(cell.cfg)
        model = {k: (list(v) if isinstance(v, tuple) else v)
                 for k, v in model.items() if v is not None}
        if "horizon" in model and isinstance(model["horizon"], float) \
                and math.isinf(model["horizon"]):
            model["horizon"] = "inf"
        cells.append({
            "t": cell.t,
            "k_t": cell.k_t,
            "target": cell.target,
            "sample_sizes": list(cell.sample_sizes),
            "model": model,
        })
    return {"kind": schedule.kind, "family": schedule.family,
            "ratios": list(schedule.ratios), "cells": cells}


def write_outputs(config, schedule, results, out_dir):
    """Write cells.csv, summary.json and per-estimator plot files.

    Returns the list of written paths.
    """
    os.makedirs(out_dir, exist_ok=True)
    written = []

    csv_path = os.path.join(out_dir, "cells.csv")
    with open(csv_path, "w") as fh:
        fh.write(render_cells_csv(config, results))
    written.append(csv_path)

    summary = {
        "version": __version__,
        "config": config.to_dict(),
        "schedule": _schedule_echo(schedule),
        "rates": rate_fits(config, results),
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    summary_path = os.path.join(out_dir, "summary.json")
    with open(summary_path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=False)
        fh.write("\n")
    written.append(summary_path)

    metrics = list(PLOT_METRICS) + [_eps_label(e) for e in config.eps]
    for eid in config.estimators:
        est_dir = os.path.join(out_dir, "plots", eid.replace("/", "_"))
        os.makedirs(est_dir, exist_ok=True)
        for metric in metrics:
            rows = []
            for cell, stats in results:
                st = stats.get(eid)
                if st is None:
                    continue
                x = _x_value(config.regime, cell)
                if metric.startswith("p_outside_"):
                    y = st.p_outside[float(metric[len("p_outside_"):])]
                else:
                    y = getattr(st, metric)
                rows.append(f"{_fmt(x)},{_fmt(y)}")
            path = os.path.join(est_dir, f"plot_{metric}.csv")
            with open(path, "w") as fh:
                fh.write("x," + metric + "\n")
                fh.write("\n".join(rows) + "\n")
            written.append(path)
    return written
