"""Command line entry point: synth, fuse, correlate, train-eval, report.

Settings come from a flat ``key = value`` file (``--config``) and can be
overridden by long flags named after the keys (``sliver_threshold`` ->
``--sliver-threshold``). Logs are key=value lines on stderr; nothing but
files is produced as data output.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import json
import logging
import sys
from pathlib import Path

from .fuse import AdminUnit, read_fused_csv, write_fused_csv
from .ingest import Period
from .pipeline import load_dataset, fuse_dataset

log = logging.getLogger(__name__)

LEVELS = ("country", "region", "district")


class ConfigError(ValueError):
    pass


def _flag(key: str) -> str:
    return "--" + key.replace("_", "-")


def _bool(s) -> bool:
    if isinstance(s, bool):
        return s
    v = str(s).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {s!r}")


def _nonneg_float(s) -> float:
    v = float(s)
    if not v >= 0:
        raise ConfigError(f"expected a non-negative number, got {s!r}")
    return v


def _pos_int(s) -> int:
    v = int(s)
    if v < 1:
        raise ConfigError(f"expected a positive integer, got {s!r}")
    return v


def _models(s) -> tuple[str, ...]:
    names = tuple(x.strip() for x in str(s).split(",") if x.strip())
    bad = [n for n in names if n not in ("logistic", "forest")]
    if bad or not names:
        raise ConfigError(f"models must be a comma list of logistic,forest; got {s!r}")
    return names


def _cutoff(s):
    if s in (None, "", "auto"):
        return None
    return Period.parse(str(s))


# key -> (parser, default, help)
RUN_KEYS = {
    "data_dir": (str, None, "dataset directory; supplies admin/fs_dir/conflicts defaults"),
    "admin": (str, None, "admin shapefile (.shp)"),
    "fs_dir": (str, None, "directory of cs_YYYYMM.shp layers"),
    "conflicts": (str, None, "conflict event CSV"),
    "fused": (str, None, "fused CSV input (default: <out>/fused.csv)"),
    "out": (str, None, "output directory"),
    "sliver_threshold": (_nonneg_float, 0.005, "minimum overlay part area, square degrees"),
    "lag_months": (_pos_int, 3, "months in the lag window"),
    "cumulative_window": (_pos_int, 24, "months in the cumulative window"),
    "alpha": (_nonneg_float, 0.05, "significance level; 1 keeps every defined unit"),
    "method": (str, "t", "p-value method: t or permutation"),
    "n_perm": (_pos_int, 10_000, "permutations for method=permutation"),
    "cutoff": (_cutoff, None, "first test period YYYYMM (default: last 20%% of periods)"),
    "test_frac": (float, 0.2, "test share when no cutoff is given"),
    "models": (_models, ("logistic", "forest"), "comma list of model kinds"),
    "n_trees": (_pos_int, 200, "trees per forest"),
    "l2": (_nonneg_float, 1.0, "logistic L2 strength"),
    "seed": (int, 5, "seed for the forest and permutations"),
}


def _synth_keys():
    from .synth import SynthConfig

    out = {}
    for f in dataclasses.fields(SynthConfig):
        if f.name == "seed":
            continue
        typ = {"int": int, "float": float}.get(f.type if isinstance(f.type, str) else f.type.__name__, float)
        out[f.name] = (typ, f.default, f"synthetic world: {f.name}")
    out["planted"] = (_bool, False, "use the larger planted-coupling world as the base")
    out["synth_seed"] = (int, 0, "seed of the synthetic world")
    return out


def read_config(path) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    cfg = {}
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            k, v = (s.strip() for s in line.split("=", 1))
            cfg[k.replace("-", "_")] = v
    return cfg


def resolve(args: argparse.Namespace, keys: dict) -> dict:
    """defaults < config file < command line flags"""
    file_cfg = read_config(args.config) if args.config else {}
    unknown = set(file_cfg) - set(keys)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    out = {}
    explicit = set()
    for k, (parse, default, _) in keys.items():
        v = getattr(args, k, None)
        if v is None:
            v = file_cfg.get(k)
        if v is not None:
            explicit.add(k)
        out[k] = default if v is None else parse(v)
    out["explicit"] = frozenset(explicit)
    return out


def _paths(cfg):
    d = Path(cfg["data_dir"]) if cfg["data_dir"] else None
    admin = cfg["admin"] or (d / "admin.shp" if d else None)
    fs_dir = cfg["fs_dir"] or (d / "fs" if d else None)
    conflicts = cfg["conflicts"] or (d / "acled.csv" if d else None)
    if not (admin and fs_dir and conflicts):
        raise ConfigError("need admin, fs_dir and conflicts (or data_dir)")
    for p in (admin, conflicts):
        if not Path(p).is_file():
            raise FileNotFoundError(f"input not found: {p}")
    return Path(admin), Path(fs_dir), Path(conflicts)


def _out(cfg) -> Path:
    if not cfg["out"]:
        raise ConfigError("out is required")
    p = Path(cfg["out"])
    p.mkdir(parents=True, exist_ok=True)
    return p


def _fused_path(cfg, out: Path) -> Path:
    p = Path(cfg["fused"]) if cfg["fused"] else out / "fused.csv"
    if not p.is_file():
        raise FileNotFoundError(f"fused table not found: {p} (run fuse first)")
    return p


# -- commands -------------------------------------------------------------------

def cmd_synth(cfg) -> list[Path]:
    from .synth import SynthConfig, generate, planted_config, write_dataset

    fields = {f.name for f in dataclasses.fields(SynthConfig)} - {"seed"}
    if cfg["planted"]:
        base = planted_config(cfg["synth_seed"], cfg["coupling_beta"])
        sc = dataclasses.replace(base, **{k: cfg[k] for k in fields & cfg["explicit"]})
    else:
        sc = SynthConfig(seed=cfg["synth_seed"], **{k: cfg[k] for k in fields})
    out = _out(cfg)
    world = generate(sc)
    write_dataset(world, out)
    log.info("event=synth out=%s districts=%d periods=%d events=%d",
             out, sc.n_districts, len(sc.periods), len(world.conflicts.events))
    written = [out / "admin.shp", out / "admin.dbf", out / "acled.csv", out / "truth.json"]
    written += sorted((out / "fs").glob("cs_*.shp"))
    return written


def write_join_quality(report, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["country", "fs_units", "matched_units", "match_rate"])
        for c, n, m, rate in report.rows():
            w.writerow([c, n, m, f"{rate:.6f}"])
        for u in report.unmatched_conflict_units:
            w.writerow([f"unmatched:{u.key}", 0, 0, ""])


def cmd_fuse(cfg) -> list[Path]:
    admin, fs_dir, conflicts = _paths(cfg)
    ds = load_dataset(admin, fs_dir, conflicts)
    fused, report = fuse_dataset(ds, cfg["sliver_threshold"], cfg["lag_months"], cfg["cumulative_window"])
    out = _out(cfg)
    write_fused_csv(fused, out / "fused.csv")
    write_join_quality(report, out / "join_quality.csv")
    # schema check by reading back
    n = len(read_fused_csv(out / "fused.csv"))
    if n != len(fused):
        raise RuntimeError("fused.csv did not read back")
    log.info("event=fuse rows=%d skipped_conflict_rows=%d", n, ds.skipped_rows)
    return [out / "fused.csv", out / "join_quality.csv"]


def _unit_geometries(admin_path) -> dict[str, dict]:
    from .geom import dissolve
    from .ingest import read_layer
    from .stats.levels import unit_key

    layer = read_layer(admin_path)
    groups: dict[str, dict[str, list]] = {lv: {} for lv in LEVELS}
    for f in layer.features:
        if f.geometry.is_empty:
            continue
        a = f.attributes
        unit = AdminUnit.of(a["ADMIN0"], a["ADMIN1"], a["ADMIN2"])
        for lv in LEVELS:
            groups[lv].setdefault(unit_key(unit, lv), []).append(f.geometry)
    return {lv: {k: (g[0] if len(g) == 1 and lv == "district" else dissolve(g)) for k, g in m.items()}
            for lv, m in groups.items()}


def cmd_correlate(cfg) -> list[Path]:
    from .stats import correlate, read_correlations_csv, write_correlations_csv, write_geojson

    out = _out(cfg)
    fused = read_fused_csv(_fused_path(cfg, out))
    geoms = None
    try:
        admin = _paths(cfg)[0]
        geoms = _unit_geometries(admin)
    except (ConfigError, FileNotFoundError) as exc:
        log.warning("event=correlate geojson=without_geometry reason=%r", str(exc))
    written = []
    for lv in LEVELS:
        res = correlate(fused, lv, alpha=cfg["alpha"], method=cfg["method"], n_perm=cfg["n_perm"], seed=cfg["seed"])
        path = out / f"correlations_{lv}.csv"
        write_correlations_csv(res, path)
        if len(read_correlations_csv(path)) != len(res):
            raise RuntimeError(f"{path} did not read back")
        gpath = out / f"correlations_{lv}.geojson"
        write_geojson(res, geoms[lv] if geoms else {}, gpath)
        log.info("event=correlate level=%s significant=%d", lv, len(res))
        written += [path, gpath]
    return written


def cmd_train_eval(cfg) -> list[Path]:
    from .predict import ForestConfig, LogisticConfig, run_models, write_importance, write_manifest, write_table
    from .predict.harness import TABLE_COLUMNS, manifest

    out = _out(cfg)
    fused = read_fused_csv(_fused_path(cfg, out))
    forest = ForestConfig(n_trees=cfg["n_trees"], seed=cfg["seed"])
    result = run_models(fused, cutoff=cfg["cutoff"], test_frac=cfg["test_frac"],
                        logistic=LogisticConfig(l2=cfg["l2"]), forest=forest, models=cfg["models"])
    write_table(result, out / "metrics.csv")
    write_importance(result, out / "importance.csv")
    write_manifest(manifest(result, cfg["seed"], {"models": list(cfg["models"]), "n_trees": cfg["n_trees"],
                                                  "l2": cfg["l2"]}), out / "manifest.json")
    with open(out / "metrics.csv", newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f))
    if tuple(rows[0]) != TABLE_COLUMNS or len(rows) - 1 != len(result.rows):
        raise RuntimeError("metrics.csv failed its schema check")
    for r in result.rows:
        log.info("event=train_eval model=%r accuracy=%.6f n=%d", r.model, r.metrics.accuracy, r.metrics.n)
    return [out / "metrics.csv", out / "importance.csv", out / "manifest.json"]


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def cmd_report(cfg) -> list[Path]:
    """Run fuse, correlate and train-eval into one directory and index it."""
    out = _out(cfg)
    stages = {}
    for name, fn in (("fuse", cmd_fuse), ("correlate", cmd_correlate), ("train-eval", cmd_train_eval)):
        stages[name] = fn(dict(cfg, fused=None))
    index = {
        "stages": {k: [p.name for p in v] for k, v in stages.items()},
        "files": {p.name: {"bytes": p.stat().st_size, "sha256": _sha256(p)}
                  for v in stages.values() for p in v},
        "settings": {k: (list(v) if isinstance(v, tuple) else str(v) if isinstance(v, Period) else v)
                     for k, v in sorted(cfg.items()) if k != "explicit"},
    }
    path = out / "index.json"
    with open(path, "w", encoding="utf-8") as f:
        json.dump(index, f, indent=1, sort_keys=True)
        f.write("\n")
    log.info("event=report out=%s files=%d", out, len(index["files"]))
    return [path]


COMMANDS = {
    "synth": (cmd_synth, "write a synthetic dataset"),
    "fuse": (cmd_fuse, "overlay, dedup and lag-join into fused.csv"),
    "correlate": (cmd_correlate, "Spearman rho per unit at three levels"),
    "train-eval": (cmd_train_eval, "baselines and models, metrics and importance"),
    "report": (cmd_report, "fuse + correlate + train-eval into one indexed directory"),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fsconflict", description=__doc__.splitlines()[0])
    p.add_argument("--log-level", default="INFO")
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", help="flat key = value settings file")
        keys = dict(RUN_KEYS, **_synth_keys()) if name == "synth" else RUN_KEYS
        for k, (_, default, h) in keys.items():
            if isinstance(default, tuple):
                default = ",".join(default)
            if default is not None:
                h = f"{h} (default: {default})"
            sp.add_argument(_flag(k), dest=k, default=None, help=h)
    return p


class _KVFormatter(logging.Formatter):
    def format(self, record):
        return f"level={record.levelname.lower()} logger={record.name} {record.getMessage()}"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(_KVFormatter())
    root = logging.getLogger("fsconflict")
    root.handlers[:] = [handler]
    root.setLevel(args.log_level.upper())
    root.propagate = False
    fn, _ = COMMANDS[args.command]
    keys = dict(RUN_KEYS, **_synth_keys()) if args.command == "synth" else RUN_KEYS
    try:
        cfg = resolve(args, keys)
        written = fn(cfg)
    except Exception as exc:  # reported as a structured line, exit nonzero
        log.error("event=failed command=%s error=%s message=%r", args.command, type(exc).__name__, str(exc))
        return 1
    log.info("event=done command=%s outputs=%d", args.command, len(written))
    return 0


if __name__ == "__main__":
    sys.exit(main())
