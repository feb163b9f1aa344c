"""Command-line entry point: ``bootperc <command> [options]``.

Options can also come from ``--config FILE``: either ``key = value`` lines
or a manifest written by an earlier run. Flags given on the command line
override the file. Each run writes its data file(s) under ``--out`` (a path
prefix, by default ``$BOOTPERC_OUTPUT_DIR/<command>``) plus
``<prefix>.manifest.json``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import secrets
import sys
import time
from pathlib import Path

from . import __version__
from .engine import closure, make_nr_family
from .experiments import (
    STREAM_RULE,
    center_cluster_stats,
    critical_length,
    diam_tail_probability,
    seeded_growth,
)
from .families import classify_nr, stable_set_descriptor
from .gridfile import format_grid, read_grid
from .scaling import MODELS, ScalingPoint, lambda_, scaling_fit
from .spanning import NoWitnessError, StrongGraphParam, al_witness, diam
from .validation import check_probability, check_spec, parse_float_list, parse_int_list

OUTPUT_DIR_ENV = "BOOTPERC_OUTPUT_DIR"

COMMANDS = ("classify", "closure", "lc-scan", "cluster-stats", "growth", "al-check", "diam-tail", "fit")

# key -> (type, default); None default means "required by some command"
OPTIONS = {
    "a": (str, None),
    "r": (int, None),
    "geometry": (str, "cube"),
    "p": (str, None),
    "L": (int, None),
    "N": (int, None),
    "trials": (int, 1000),
    "seed": (int, None),
    "batch": (int, None),
    "max_L": (int, 1 << 14),
    "threshold": (float, None),
    "cutoff": (str, "auto"),
    "eps": (float, 0.1),
    "seed_block": (str, None),
    "grid": (str, None),
    "input": (str, None),
    "model": (str, "both"),
    "i": (int, None),
    "n_jobs": (int, 1),
    "out": (str, None),
}

_MC = ("trials", "seed", "n_jobs")
COMMAND_KEYS = {
    "classify": ("a", "r"),
    "closure": ("grid",),
    "lc-scan": ("a", "r", "geometry", "p", "batch", "max_L") + _MC,
    "cluster-stats": ("a", "r", "p", "N", "cutoff", "eps", "i") + _MC,
    "growth": ("a", "r", "geometry", "p", "L", "seed_block") + _MC,
    "al-check": ("grid",),
    "diam-tail": ("a", "r", "geometry", "p", "L", "threshold") + _MC,
    "fit": ("input", "model", "i"),
}

RANDOMIZED = {"lc-scan", "cluster-stats", "growth", "diam-tail"}


class UsageError(Exception):
    pass


def fmt(x) -> str:
    """Six significant digits for floats; everything else as ``str``."""
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bootperc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"bootperc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="key = value file or a previous run's manifest")
        for key in COMMAND_KEYS[name] + ("out",):
            flag = "--" + key.replace("_", "-")
            sp.add_argument(flag, dest=key, default=None)
    return parser


def read_config_file(path: str) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    if path.endswith(".json"):
        data = json.loads(text)
        return dict(data.get("config", data))
    out = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected 'key = value'")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k.replace("-", "_")] = v
    return out


def resolve_config(args: argparse.Namespace) -> dict:
    merged = {}
    if args.config:
        filecfg = read_config_file(args.config)
        cmd = filecfg.pop("command", None)
        if cmd is not None and cmd != args.command:
            raise UsageError(f"config file is for '{cmd}', not '{args.command}'")
        unknown = set(filecfg) - set(OPTIONS)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        merged.update(filecfg)
    keys = COMMAND_KEYS[args.command] + ("out",)
    for key in keys:
        val = getattr(args, key)
        if val is not None:
            merged[key] = val
    cfg = {}
    for key in keys:
        typ, default = OPTIONS[key]
        val = merged.get(key, default)
        if val is None:
            cfg[key] = None
            continue
        try:
            cfg[key] = typ(val)
        except (TypeError, ValueError):
            raise UsageError(f"bad value for --{key.replace('_', '-')}: {val!r}")
    cfg["command"] = args.command
    return cfg


def _require(cfg, *keys):
    missing = [k for k in keys if cfg.get(k) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + k.replace("_", "-") for k in missing))


def _spec(cfg):
    _require(cfg, "a", "r")
    try:
        return check_spec(cfg["a"], cfg["r"])
    except ValueError as exc:
        raise UsageError(str(exc))


def _p_list(cfg):
    _require(cfg, "p")
    try:
        return [check_probability(p) for p in parse_float_list(cfg["p"])]
    except ValueError as exc:
        raise UsageError(str(exc))


def _family_cols(spec, geometry):
    name = f"N_{spec.r}^{'-'.join(map(str, spec.a))}"
    return {"family": name, "d": spec.d, **{f"a{j + 1}": x for j, x in enumerate(spec.a)}, "r": spec.r, "geometry": geometry}


def _csv_text(cfg, rows, columns) -> str:
    buf = io.StringIO()
    buf.write("# " + config_line(cfg) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(row[c]) for c in columns])
    return buf.getvalue()


def config_line(cfg) -> str:
    return "bootperc " + " ".join(f"{k}={cfg[k]}" for k in sorted(cfg) if cfg[k] is not None and k != "out")


def _estimate_cols(est):
    return {"trials": est.trials, "estimate": float(est.estimate), "ci_low": float(est.ci_low), "ci_high": float(est.ci_high)}


PROBE_COLUMNS = ["family", "d", "a...", "r", "geometry", "L", "p", "trials", "estimate", "ci_low", "ci_high", "seed"]


def _probe_columns(spec, extra=()):
    cols = []
    for c in PROBE_COLUMNS:
        cols += [f"a{j + 1}" for j in range(spec.d)] if c == "a..." else [c]
    return cols + list(extra)


def cmd_classify(cfg):
    spec = _spec(cfg)
    desc = stable_set_descriptor(spec)
    record = {
        "label": str(classify_nr(spec)),
        "neighborhood_size": spec.size,
        "descriptor": ";".join(desc.components) if desc.covered else "not-covered",
        "case": desc.case if desc.case is not None else "none",
    }
    if not desc.covered:
        record["reason"] = desc.reason.replace(" ", "_")
    line = " ".join(f"{k}={v}" for k, v in record.items())
    print(line)
    return {".txt": line + "\n"}


def cmd_closure(cfg):
    _require(cfg, "grid")
    config, spec = read_grid(cfg["grid"])
    out = closure(config, make_nr_family(spec))
    text = format_grid(out, spec)
    if cfg.get("out") is None:
        sys.stdout.write(text)
    return {".grid": text}


def cmd_lc_scan(cfg):
    spec, ps = _spec(cfg), _p_list(cfg)
    rows, probe_rows = [], []
    for p in ps:
        res = critical_length(
            spec, p, cfg["trials"], cfg["seed"], cfg["geometry"], cfg["batch"], cfg["max_L"], cfg["n_jobs"]
        )
        base = _family_cols(spec, cfg["geometry"])
        rows.append({
            **base, "p": p, "lc": res.lc if res.lc is not None else "none",
            "bracket_lo": res.bracket[0],
            "bracket_hi": res.bracket[1] if res.bracket[1] is not None else "none",
            "status": res.status.replace(" ", "_"), "nonmonotone": int(res.nonmonotone), "seed": cfg["seed"],
        })
        for q in res.probes:
            probe_rows.append({**base, "L": q.L, "p": p, **_estimate_cols(q.estimate), "seed": cfg["seed"]})
    cols = list(_family_cols(spec, cfg["geometry"])) + ["p", "lc", "bracket_lo", "bracket_hi", "status", "nonmonotone", "seed"]
    return {".csv": _csv_text(cfg, rows, cols), ".probes.csv": _csv_text(cfg, probe_rows, _probe_columns(spec))}


def cmd_cluster_stats(cfg):
    spec, ps = _spec(cfg), _p_list(cfg)
    _require(cfg, "N")
    i = cfg["i"] if cfg["i"] is not None else max(spec.r - sum(spec.a[1:]), 1)
    rows = []
    for p in ps:
        cutoff = p ** (-i - cfg["eps"]) if cfg["cutoff"] == "auto" else float(cfg["cutoff"])
        st = center_cluster_stats(spec, cfg["N"], p, cutoff, cfg["trials"], cfg["seed"], n_jobs=cfg["n_jobs"])
        bound = math.sqrt(p)
        rows.append({
            **_family_cols(spec, "cube"), "N": cfg["N"], "p": p, "trials": st.trials,
            "mean_size": st.mean_size, "mean_size_given_cutoff": st.mean_size_given_cutoff,
            "conditioned_trials": st.conditioned_trials, "diam_tail": st.diam_tail, "cutoff": st.cutoff,
            "full_fraction": st.full_fraction, "sqrt_p": bound,
            "bound_pass": int(st.mean_size_given_cutoff <= bound), "seed": cfg["seed"],
        })
    cols = list(rows[0])
    return {".csv": _csv_text(cfg, rows, cols)}


def cmd_growth(cfg):
    spec, ps = _spec(cfg), _p_list(cfg)
    _require(cfg, "L", "seed_block")
    block = parse_int_list(cfg["seed_block"])
    rows = []
    for p in ps:
        est = seeded_growth(spec, cfg["L"], block, p, cfg["trials"], cfg["seed"], cfg["geometry"], cfg["n_jobs"])
        rows.append({**_family_cols(spec, cfg["geometry"]), "L": cfg["L"], "p": p, **_estimate_cols(est),
                     "seed": cfg["seed"], "seed_block": "x".join(map(str, block))})
    return {".csv": _csv_text(cfg, rows, _probe_columns(spec, ["seed_block"]))}


def cmd_diam_tail(cfg):
    spec, ps = _spec(cfg), _p_list(cfg)
    _require(cfg, "L", "threshold")
    rows = []
    for p in ps:
        est = diam_tail_probability(spec, cfg["L"], p, cfg["threshold"], cfg["trials"], cfg["seed"], cfg["geometry"], cfg["n_jobs"])
        rows.append({**_family_cols(spec, cfg["geometry"]), "L": cfg["L"], "p": p, **_estimate_cols(est),
                     "seed": cfg["seed"], "threshold": cfg["threshold"]})
    return {".csv": _csv_text(cfg, rows, _probe_columns(spec, ["threshold"]))}


def cmd_al_check(cfg):
    _require(cfg, "grid")
    config, spec = read_grid(cfg["grid"])
    family = make_nr_family(spec)
    param = StrongGraphParam.for_spec(spec)
    top = diam(closure(config, family).sites(), param)
    rows = []
    for k in range(1, top + 1):
        R = al_witness(config, family, k, param=param)
        rows.append({"k": k, **{f"lo{j + 1}": x for j, x in enumerate(R.lo)},
                     **{f"hi{j + 1}": x for j, x in enumerate(R.hi)}, "diam": R.long})
    cols = ["k"] + [f"lo{j + 1}" for j in range(spec.d)] + [f"hi{j + 1}" for j in range(spec.d)] + ["diam"]
    return {".csv": _csv_text(cfg, rows, cols)}


def cmd_fit(cfg):
    _require(cfg, "input")
    with open(cfg["input"], encoding="utf-8") as fh:
        rows = list(csv.DictReader(line for line in fh if not line.startswith("#")))
    if not rows:
        raise UsageError(f"{cfg['input']} has no data rows")
    d = int(rows[0]["d"])
    a = tuple(int(rows[0][f"a{j + 1}"]) for j in range(d))
    spec = check_spec(a, rows[0]["r"])
    i = cfg["i"] if cfg["i"] is not None else max(spec.r - sum(spec.a[1:]), 1)
    a2 = a[1] if d > 1 else a[0]
    points = [
        ScalingPoint(float(row["p"]), int(row["lc"]), lambda_(float(row["p"]), i, a[0], a2))
        for row in rows if row["lc"] != "none"
    ]
    models = MODELS if cfg["model"] == "both" else (cfg["model"],)
    if any(m not in MODELS for m in models):
        raise UsageError(f"--model must be one of {MODELS + ('both',)}")
    lines = [config_line(cfg), f"family={_family_cols(spec, 'cube')['family']}", f"i={i}", f"points={len(points)}"]
    rss = {}
    for m in models:
        fit = scaling_fit(points, m)
        rss[m] = fit.rss
        lines += [f"{m}.{k}={fmt(v)}" for k, v in fit.as_record().items() if k != "model"]
    if len(models) > 1:
        lines.append(f"best_model={min(rss, key=rss.get)}")
    return {".txt": "\n".join(lines) + "\n"}


HANDLERS = {
    "classify": cmd_classify,
    "closure": cmd_closure,
    "lc-scan": cmd_lc_scan,
    "cluster-stats": cmd_cluster_stats,
    "growth": cmd_growth,
    "al-check": cmd_al_check,
    "diam-tail": cmd_diam_tail,
    "fit": cmd_fit,
}


def run(cfg: dict) -> dict[str, Path]:
    """Execute one resolved config; returns the written files keyed by suffix."""
    command = cfg["command"]
    if command in RANDOMIZED:
        if cfg["seed"] is None:
            cfg["seed"] = secrets.randbits(63)
        if cfg["seed"] < 0:
            raise UsageError("--seed must be nonnegative")
    if cfg.get("geometry", "cube") not in ("cube", "torus"):
        raise UsageError(f"unknown geometry {cfg['geometry']!r}")
    start = time.perf_counter()
    outputs = HANDLERS[command](cfg)
    wall = time.perf_counter() - start

    prefix = cfg.get("out") or os.path.join(os.environ.get(OUTPUT_DIR_ENV, "."), command)
    prefix = Path(prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    written = {}
    for suffix, text in outputs.items():
        path = Path(str(prefix) + suffix)
        path.write_text(text, encoding="utf-8")
        written[suffix] = path
    manifest = {
        "config": {k: v for k, v in cfg.items() if v is not None},
        "seed": cfg.get("seed"),
        "rng_streams": STREAM_RULE,
        "version": __version__,
        "wall_time_s": round(wall, 3),
        "outputs": sorted(p.name for p in written.values()),
    }
    mpath = Path(str(prefix) + ".manifest.json")
    mpath.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    written[".manifest.json"] = mpath
    return written


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        run(cfg)
    except UsageError as exc:
        print(f"bootperc {args.command}: usage error: {exc}", file=sys.stderr)
        return 2
    except (NoWitnessError, ValueError, OSError) as exc:
        print(f"bootperc {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
