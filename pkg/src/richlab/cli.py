"""Command-line front end: experiment configs, batch runs, reproducible artifacts.

Configs are plain key=value assignments (whitespace separated, ``#`` comments,
one or more per line); every subcommand accepts ``--config FILE`` plus inline
``key=value`` overrides.  Each run writes into its output directory:

    results.csv    figure-ready table (schema per subcommand, documented in
                   docs/output-formats.md); byte-identical across reruns and
                   thread counts
    summary.json   parameters and estimates (no timestamps)
    manifest.json  full config text, package version, build id, timestamp
    events.csv     infection log, ``simulate --emit-events`` only

Exit codes: 0 success; 2 configuration/precondition error; 3 completed but at
least one replication hit its event horizon (reported, never silent); 1 other
failures.  An interrupted run leaves a ``.partial`` marker in the output dir.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import io
import json
import subprocess
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, estimators
from .competition import StopRule, run_two_type
from .errors import ConfigurationError, RichlabError
from .lattice import (
    Domain,
    Empty,
    HalfAxisMinusOrigin,
    HyperplaneMinusOrigin,
    Origin,
    Region,
    SeedConfig,
    parse_region,
    region_to_text,
)
from .weights import SINGLE_CLOCK, TWO_CLOCK, WeightField

KINDS = (
    "mu",
    "mu-hyperplane",
    "mu-hampered",
    "descent",
    "records",
    "shape",
    "survival",
    "coexistence-scan",
    "simulate",
)

_KIND_ALIASES = {
    "survival_curve": "survival",
    "coexistence_scan": "coexistence-scan",
    "mu_hyperplane": "mu-hyperplane",
    "mu_hampered": "mu-hampered",
}


def _parse_int(s: str) -> int:
    return int(s, 0)


def _parse_float(s: str) -> float:
    return float(s)


def _parse_bool(s: str) -> bool:
    if s.lower() in ("1", "true", "yes", "on"):
        return True
    if s.lower() in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {s!r}")


def _parse_int_list(s: str) -> tuple:
    return tuple(int(v) for v in s.split(",") if v)


def _parse_clock(s: str) -> str:
    if s in (SINGLE_CLOCK, TWO_CLOCK):
        return s
    raise ValueError("clock-mode must be 'single' or 'two'")


# per-kind parameter schema: key -> (parser, default); None default = required
_COMMON = {
    "seed": (_parse_int, 0),
    "reps": (_parse_int, None),
    "threads": (_parse_int, 1),
    "out": (str, "out"),
}

_SCHEMAS = {
    "mu": {"lambda": (_parse_float, 1.0), "n": (_parse_int, 128)},
    "mu-hyperplane": {"lambda": (_parse_float, 1.0), "n": (_parse_int, 32), "W": (_parse_int, None)},
    "mu-hampered": {
        "lambda": (_parse_float, 1.0),
        "b": (_parse_int, None),
        "n": (_parse_int, 256),
    },
    "descent": {
        "b": (_parse_int, None),
        "W": (_parse_int, None),
        "overshoot": (_parse_int, -1),  # -1 = default rule: overshoot = b
    },
    "records": {
        "mode": (str, "probability"),
        "n": (_parse_int, 64),
        "K": (_parse_int, 64),
        "t": (_parse_float, 200.0),
    },
    "shape": {"lambda": (_parse_float, 1.0), "t": (_parse_float, 150.0)},
    "survival": {
        "cfg": (parse_region, None),
        "lambda1": (_parse_float, 1.0),
        "lambda2": (_parse_float, 1.0),
        "clock-mode": (_parse_clock, TWO_CLOCK),
        "R": (_parse_int_list, None),
        "M": (_parse_int, 0),  # 0 = default rule M = 2 max(R)
        "horizon": (_parse_float, 0.0),  # 0 = default safety rule
        "engine": (str, "weights"),
    },
    "coexistence-scan": {
        "n-list": (_parse_int_list, (1, 2, 4, 8, 16, 32)),
        "R": (_parse_int, 64),
        "M": (_parse_int, 0),
    },
    "simulate": {
        "cfg": (parse_region, None),
        "type2": (parse_region, Origin()),
        "lambda1": (_parse_float, 1.0),
        "lambda2": (_parse_float, 1.0),
        "clock-mode": (_parse_clock, TWO_CLOCK),
        "M": (_parse_int, None),
        "R": (_parse_int, 0),  # 0 = no reach stop, run to exhaustion
        "horizon": (_parse_float, 0.0),  # 0 = none
        "rep": (_parse_int, 0),
        "emit-events": (_parse_bool, False),
    },
}

# kinds that run a single realization rather than a replication batch
_SINGLE_RUN = {"simulate"}


@dataclass
class ExperimentConfig:
    """A fully validated experiment description; round-trips through text."""

    kind: str
    seed: int
    reps: int
    threads: int
    out: str
    params: dict

    def to_text(self) -> str:
        lines = [f"kind={self.kind}"]
        lines.append(f"seed={self.seed}")
        lines.append(f"reps={self.reps}")
        lines.append(f"threads={self.threads}")
        lines.append(f"out={self.out}")
        for k in sorted(self.params):
            lines.append(f"{k}={_format_value(self.params[k])}")
        return "\n".join(lines) + "\n"


def _format_value(v) -> str:
    if isinstance(v, Region):
        return region_to_text(v)
    if isinstance(v, tuple):
        return ",".join(str(x) for x in v)
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def _tokens_with_locations(text: str):
    for ln, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0]
        col = 1
        for chunk in body.split():
            col = line.index(chunk, col - 1) + 1
            yield ln, col, chunk
            col += len(chunk)


def parse_config(text: str, overrides=()) -> ExperimentConfig:
    """Parse the key=value config format; every error carries a line/column."""
    assignments: dict = {}
    locations: dict = {}
    entries = list(_tokens_with_locations(text))
    entries += [(0, 0, tok) for tok in overrides]  # line 0 = command line
    for ln, col, tok in entries:
        where = f"line {ln}, col {col}" if ln else "command line"
        if "=" not in tok:
            raise ConfigurationError(f"{where}: expected key=value, got {tok!r}")
        key, _, val = tok.partition("=")
        assignments[key] = val
        locations[key] = where
    if "kind" not in assignments:
        raise ConfigurationError("missing required key 'kind'")
    kind = assignments.pop("kind")
    kind = _KIND_ALIASES.get(kind, kind)
    if kind not in KINDS:
        raise ConfigurationError(
            f"{locations['kind']}: unknown kind {kind!r} (expected one of {', '.join(KINDS)})"
        )

    schema = dict(_COMMON)
    schema.update(_SCHEMAS[kind])
    if kind in _SINGLE_RUN:
        schema["reps"] = (_parse_int, 1)
    parsed: dict = {}
    for key, raw in assignments.items():
        if key not in schema:
            raise ConfigurationError(f"{locations[key]}: unknown key {key!r} for kind {kind!r}")
        parser, _ = schema[key]
        try:
            parsed[key] = parser(raw)
        except (ValueError, ConfigurationError) as exc:
            raise ConfigurationError(f"{locations[key]}: bad value for {key!r}: {exc}") from exc
    for key, (_, default) in schema.items():
        if key not in parsed:
            if default is None:
                raise ConfigurationError(f"missing required key {key!r} for kind {kind!r}")
            parsed[key] = default

    cfg = ExperimentConfig(
        kind=kind,
        seed=parsed.pop("seed"),
        reps=parsed.pop("reps"),
        threads=parsed.pop("threads"),
        out=parsed.pop("out"),
        params=parsed,
    )
    validate_config(cfg, locations)
    return cfg


def _where(locations, key) -> str:
    loc = locations.get(key)
    return f"{loc}: " if loc else ""


def validate_config(cfg: ExperimentConfig, locations=None) -> None:
    """Eager checks of every domain/truncation precondition, before any run."""
    locations = locations or {}
    p = cfg.params
    if cfg.reps < 1:
        raise ConfigurationError(_where(locations, "reps") + f"reps must be >= 1, got {cfg.reps}")
    if cfg.threads < 1:
        raise ConfigurationError(_where(locations, "threads") + "threads must be >= 1")
    for key in ("lambda", "lambda1", "lambda2"):
        if key in p and not p[key] > 0:
            raise ConfigurationError(
                _where(locations, key) + f"{key}={p[key]} violates the rate > 0 precondition"
            )
    kind = cfg.kind
    if kind == "mu" and p["n"] < 1:
        raise ConfigurationError(_where(locations, "n") + "n must be >= 1")
    if kind == "mu-hyperplane" and p["W"] < 4 * p["n"]:
        raise ConfigurationError(
            _where(locations, "W") + f"W={p['W']} must be >= 4n = {4 * p['n']}"
        )
    if kind == "mu-hampered" and (p["b"] < 0 or p["n"] < 1):
        raise ConfigurationError(_where(locations, "b") + "need b >= 0 and n >= 1")
    if kind == "descent":
        if p["b"] < 0 or p["overshoot"] < -1:
            raise ConfigurationError(_where(locations, "b") + "b and overshoot must be >= 0")
        if p["W"] < p["b"]:
            raise ConfigurationError(
                _where(locations, "W")
                + f"W={p['W']} < b={p['b']}: lateral truncation bias unbounded"
            )
    if kind == "records":
        if p["mode"] not in ("probability", "rates"):
            raise ConfigurationError(_where(locations, "mode") + "mode must be probability|rates")
        if p["mode"] == "probability" and (p["n"] < 0 or p["K"] < 0):
            raise ConfigurationError(_where(locations, "n") + "n and K must be >= 0")
        if p["mode"] == "rates" and p["t"] <= 0:
            raise ConfigurationError(_where(locations, "t") + "t must be > 0")
    if kind == "shape" and p["t"] <= 0:
        raise ConfigurationError(_where(locations, "t") + "t must be > 0")
    if kind == "survival":
        radii = p["R"]
        if not radii or any(b <= a for a, b in zip(radii, radii[1:])):
            raise ConfigurationError(_where(locations, "R") + "R must be an increasing list")
        M = p["M"] or 2 * max(radii)
        if 2 * max(radii) > M:
            raise ConfigurationError(
                _where(locations, "R")
                + f"R={max(radii)} exceeds the domain rule M = 2R (M={M})"
            )
        region = p["cfg"]
        if isinstance(region, HyperplaneMinusOrigin) and region.half_width < M:
            raise ConfigurationError(
                _where(locations, "cfg")
                + f"cfg W={region.half_width} does not span the domain: R={max(radii)} "
                f"requires M={M} under the M = 2R rule, so W must be >= {M}"
            )
        if isinstance(region, HalfAxisMinusOrigin) and region.depth < M:
            raise ConfigurationError(
                _where(locations, "cfg")
                + f"cfg L={region.depth} does not span the domain: R={max(radii)} "
                f"requires M={M} under the M = 2R rule, so L must be >= {M}"
            )
        if not isinstance(region, (HyperplaneMinusOrigin, HalfAxisMinusOrigin, Empty)):
            raise ConfigurationError(
                _where(locations, "cfg") + "survival cfg must be hyperplane:W=, halfaxis:L= or empty"
            )
        if p["engine"] not in ("weights", "markov"):
            raise ConfigurationError(_where(locations, "engine") + "engine must be weights|markov")
        if p["clock-mode"] == SINGLE_CLOCK and p["lambda1"] != p["lambda2"]:
            raise ConfigurationError(
                _where(locations, "clock-mode") + "single clock requires lambda1 == lambda2"
            )
    if kind == "coexistence-scan":
        if any(v == 0 for v in p["n-list"]):
            raise ConfigurationError(
                _where(locations, "n-list") + "separation 0 would overlap the seeds"
            )
        M = p["M"] or 2 * p["R"]
        if 2 * p["R"] > M:
            raise ConfigurationError(
                _where(locations, "R") + f"R={p['R']} exceeds the domain rule M = 2R (M={M})"
            )
    if kind == "simulate":
        if p["M"] < 1:
            raise ConfigurationError(_where(locations, "M") + "M must be >= 1")
        if p["R"] and 2 * p["R"] > p["M"]:
            raise ConfigurationError(
                _where(locations, "R") + f"R={p['R']} exceeds the domain rule M = 2R (M={p['M']})"
            )
        if p["clock-mode"] == SINGLE_CLOCK and p["lambda1"] != p["lambda2"]:
            raise ConfigurationError(
                _where(locations, "clock-mode") + "single clock requires lambda1 == lambda2"
            )


# ---------------------------------------------------------------------------
# Runners
# ---------------------------------------------------------------------------


def _est(e: estimators.Estimate) -> dict:
    return {"mean": e.mean, "ci_lo": e.ci_lo, "ci_hi": e.ci_hi, "n": e.n, "kind": e.kind}


def _summary_rows(summary: dict) -> list:
    """(quantity, mean, ci_lo, ci_hi, n) rows for every estimate in the summary."""
    rows = []

    def walk(prefix, obj):
        if isinstance(obj, dict):
            if set(obj) == {"mean", "ci_lo", "ci_hi", "n", "kind"}:
                rows.append((prefix, obj["mean"], obj["ci_lo"], obj["ci_hi"], obj["n"]))
                return
            for k in sorted(obj):
                walk(f"{prefix}.{k}" if prefix else k, obj[k])
        elif isinstance(obj, list):
            for i, v in enumerate(obj):
                walk(f"{prefix}[{i}]", v)

    walk("", summary)
    return rows


def _per_rep_rows(quantity_values: dict) -> tuple:
    header = ("rep", "quantity", "value")
    rows = []
    for name, values in quantity_values.items():
        for r, v in enumerate(values):
            rows.append((r, name, float(v)))
    rows.sort(key=lambda row: (row[0], row[1]))
    return header, rows


def _run_mu(cfg: ExperimentConfig):
    p = cfg.params
    res = estimators.estimate_mu(p["lambda"], p["n"], cfg.reps, cfg.seed, threads=cfg.threads)
    header, rows = _per_rep_rows({"axis_time_over_n": res.samples})
    summary = {"params": res.params, "estimate": _est(res.estimate)}
    return header, rows, summary, 0, None


def _run_mu_hyperplane(cfg: ExperimentConfig):
    p = cfg.params
    res = estimators.estimate_mu_hyperplane(
        p["lambda"], p["n"], cfg.reps, p["W"], cfg.seed, threads=cfg.threads
    )
    header, rows = _per_rep_rows(
        {
            "hyperplane_time_over_n": res.samples_hyperplane / p["n"],
            "origin_time_over_n": res.samples_origin / p["n"],
            "origin_to_plane_time_over_n": res.samples_origin_to_plane / p["n"],
        }
    )
    summary = {
        "params": res.params,
        "hyperplane_estimate": _est(res.estimate),
        "origin_estimate": _est(res.origin_estimate),
        "ks_stat": res.ks_stat,
        "ks_pvalue": res.ks_pvalue,
        "pathwise_violations": res.pathwise_violations,
    }
    return header, rows, summary, 0, None


def _run_mu_hampered(cfg: ExperimentConfig):
    p = cfg.params
    res = estimators.estimate_mu_hampered(
        p["lambda"], p["b"], p["n"], cfg.reps, cfg.seed, threads=cfg.threads
    )
    header, rows = _per_rep_rows({"tube_time_over_n": res.samples})
    summary = {"params": res.params, "estimate": _est(res.estimate)}
    return header, rows, summary, 0, None


def _run_descent(cfg: ExperimentConfig):
    from .fpp import descent_counts

    p = cfg.params
    free = np.empty(cfg.reps, np.int64)
    confined = np.empty(cfg.reps, np.int64)

    overshoot = p["overshoot"] if p["overshoot"] >= 0 else None

    def worker(r):
        f = WeightField(cfg.seed, r)
        c = descent_counts(p["b"], p["W"], overshoot, f)
        return c.count, c.confined_count

    results = estimators._map_reps(worker, cfg.reps, cfg.threads)
    for r, (a, b) in enumerate(results):
        free[r], confined[r] = a, b
    header, rows = _per_rep_rows({"descent_count": free, "confined_descent_count": confined})
    implication_violations = int(np.count_nonzero((free >= 1) & (confined < 1)))
    summary = {
        "params": {"b": p["b"], "W": p["W"],
                   "overshoot": overshoot if overshoot is not None else p["b"],
                   "seed": cfg.seed, "reps": cfg.reps},
        "descent_mean": _est(estimators.mean_estimate(free)),
        "confined_mean": _est(estimators.mean_estimate(confined)),
        "implication_violations": implication_violations,
    }
    return header, rows, summary, 0, None


def _run_records(cfg: ExperimentConfig):
    p = cfg.params
    if p["mode"] == "probability":
        res = estimators.record_probability(p["n"], p["K"], cfg.reps, cfg.seed, threads=cfg.threads)
        header, rows = _per_rep_rows({"record_indicator": res.indicators.astype(float)})
        summary = {"params": res.params, "estimate": _est(res.estimate)}
    else:
        res = estimators.record_rates(p["t"], cfg.reps, cfg.seed, threads=cfg.threads)
        header, rows = _per_rep_rows(
            {"axis_count_rate": res.axis_samples, "record_count_rate": res.record_samples}
        )
        summary = {
            "params": res.params,
            "axis_rate": _est(res.axis_rate),
            "record_rate": _est(res.record_rate),
        }
    return header, rows, summary, 0, None


def _run_shape(cfg: ExperimentConfig):
    p = cfg.params
    res = estimators.shape_check(p["lambda"], p["t"], cfg.reps, cfg.seed, threads=cfg.threads)
    header, rows = _per_rep_rows(
        {"convexity_deficiency": res.deficiency_samples, "symmetry_deviation": res.deviation_samples}
    )
    summary = {
        "params": res.params,
        "mean_deficiency": res.mean_deficiency,
        "mean_symmetry_deviation": res.mean_symmetry_deviation,
    }
    return header, rows, summary, 0, None


def _run_survival(cfg: ExperimentConfig):
    p = cfg.params
    curve = estimators.survival_curve(
        p["cfg"],
        list(p["R"]),
        cfg.reps,
        cfg.seed,
        lam1=p["lambda1"],
        lam2=p["lambda2"],
        clock_mode=p["clock-mode"],
        M=p["M"] or None,
        horizon=p["horizon"] or None,
        engine=p["engine"],
        threads=cfg.threads,
    )
    header = ("R", "survived", "reps", "p_hat", "ci_lo", "ci_hi")
    rows = [
        (pt.radius, pt.survived, pt.reps, pt.estimate.mean, pt.estimate.ci_lo, pt.estimate.ci_hi)
        for pt in curve.points
    ]
    summary = {
        "params": curve.params,
        "points": [
            {"R": pt.radius, "survived": pt.survived, "estimate": _est(pt.estimate)}
            for pt in curve.points
        ],
        "horizon_hits": curve.horizon_hits,
    }
    return header, rows, summary, curve.horizon_hits, None


def _run_coexistence(cfg: ExperimentConfig):
    p = cfg.params
    scan = estimators.coexistence_scan(
        list(p["n-list"]), p["R"], cfg.reps, cfg.seed, M=p["M"] or None, threads=cfg.threads
    )
    header = ("n", "both_reached", "reps", "p_hat", "ci_lo", "ci_hi")
    rows = [
        (pt.separation, pt.both_reached, pt.reps, pt.estimate.mean, pt.estimate.ci_lo,
         pt.estimate.ci_hi)
        for pt in scan.points
    ]
    summary = {
        "params": scan.params,
        "points": [
            {"n": pt.separation, "both_reached": pt.both_reached, "estimate": _est(pt.estimate)}
            for pt in scan.points
        ],
    }
    return header, rows, summary, 0, None


def _run_simulate(cfg: ExperimentConfig):
    p = cfg.params
    dom = Domain.box(2, p["M"])
    seed_cfg = SeedConfig(p["cfg"], p["type2"])
    field = WeightField(cfg.seed, p["rep"], p["clock-mode"], p["lambda1"], p["lambda2"])
    stop = StopRule(
        radius=p["R"] or None,
        horizon=p["horizon"] or None,
        mode="type2" if p["R"] else "none",
    )
    imap, outcome = run_two_type(dom, seed_cfg, field, stop, keep_events=True)
    header = ("quantity", "value")
    rows = [
        ("survived_to_R", "" if outcome.survived_to_R is None else int(outcome.survived_to_R)),
        ("max_type2_distance", outcome.max_type2_distance),
        ("max_type1_distance", outcome.max_type1_distance),
        ("enclosure_time", "" if outcome.enclosure_time is None else outcome.enclosure_time),
        ("event_count", outcome.event_count),
        ("stop_reason", outcome.stop_reason),
        ("end_time", outcome.end_time),
    ]
    summary = {
        "params": {k: _format_value(v) for k, v in p.items()},
        "outcome": {
            "survived_to_R": outcome.survived_to_R,
            "max_type2_distance": outcome.max_type2_distance,
            "max_type1_distance": outcome.max_type1_distance,
            "enclosure_time": outcome.enclosure_time,
            "type1_enclosure_time": outcome.type1_enclosure_time,
            "event_count": outcome.event_count,
            "stop_reason": outcome.stop_reason,
            "end_time": outcome.end_time,
        },
    }
    events = imap.events if p["emit-events"] else None
    return header, rows, summary, 1 if outcome.horizon_hit else 0, events


_RUNNERS = {
    "mu": _run_mu,
    "mu-hyperplane": _run_mu_hyperplane,
    "mu-hampered": _run_mu_hampered,
    "descent": _run_descent,
    "records": _run_records,
    "shape": _run_shape,
    "survival": _run_survival,
    "coexistence-scan": _run_coexistence,
    "simulate": _run_simulate,
}


def _csv_bytes(header, rows) -> bytes:
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue().encode()


def _build_id() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=Path(__file__).parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
        if out.returncode == 0:
            return out.stdout.strip()
    except Exception:
        pass
    return f"richlab-{__version__}"


def run_experiment(cfg: ExperimentConfig) -> int:
    """Execute a validated config; write results.csv/summary.json/manifest.json."""
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    marker = out_dir / ".partial"
    marker.write_text(f"kind={cfg.kind} seed={cfg.seed}\n")
    try:
        header, rows, summary, horizon_hits, events = _RUNNERS[cfg.kind](cfg)
        (out_dir / "results.csv").write_bytes(_csv_bytes(header, rows))
        summary_full = {
            "kind": cfg.kind,
            "seed": cfg.seed,
            "reps": cfg.reps,
            **summary,
        }
        (out_dir / "summary.json").write_text(
            json.dumps(summary_full, indent=2, sort_keys=True) + "\n"
        )
        srows = _summary_rows(summary)
        if srows:
            (out_dir / "summary.csv").write_bytes(
                _csv_bytes(("quantity", "mean", "ci_lo", "ci_hi", "n"), srows)
            )
        manifest = {
            "config": cfg.to_text(),
            "kind": cfg.kind,
            "package": "richlab",
            "version": __version__,
            "build_id": _build_id(),
            "created_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "outputs": ["results.csv", "summary.json"] + (["events.csv"] if events else []),
            "horizon_hits": horizon_hits,
        }
        (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        if events is not None:
            d = events.domain.dim
            ev_header = ("time", *[f"x{i + 1}" for i in range(d)], "type")
            ev_rows = [(t, *site, typ) for t, site, typ in events]
            (out_dir / "events.csv").write_bytes(_csv_bytes(ev_header, ev_rows))
    except Exception:
        raise  # marker stays behind for interrupted/failed runs
    marker.unlink()
    if horizon_hits:
        print(
            f"warning: {horizon_hits} replication(s) hit the event horizon; "
            "results flagged in summary.json",
            file=sys.stderr,
        )
        return 3
    return 0


# ---------------------------------------------------------------------------
# argparse front end
# ---------------------------------------------------------------------------


def _make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="richlab",
        description="Growth and competition experiments on the integer lattice",
    )
    sub = ap.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        sp = sub.add_parser(kind, help=f"run the {kind} experiment")
        sp.add_argument("--config", type=Path, help="key=value config file")
        sp.add_argument("--seed", help="master seed (u64)")
        sp.add_argument("--reps", help="number of replications")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--threads", help="worker threads (speed only, never results)")
        if kind == "simulate":
            sp.add_argument(
                "--emit-events", action="store_true", help="write the infection log (events.csv)"
            )
        sp.add_argument(
            "assignments",
            nargs="*",
            metavar="key=value",
            help="inline overrides (same keys as the config file)",
        )
    return ap


def main(argv=None) -> int:
    args = _make_parser().parse_args(argv)
    text = ""
    if args.config is not None:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return 2
    overrides = [f"kind={args.kind}"] + list(args.assignments)
    for key in ("seed", "reps", "out", "threads"):
        val = getattr(args, key, None)
        if val is not None:
            overrides.append(f"{key}={val}")
    if getattr(args, "emit_events", False):
        overrides.append("emit-events=true")
    try:
        cfg = parse_config(text, overrides=overrides)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return run_experiment(cfg)
    except RichlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
