"""Experiment orchestration: config ingestion, sweeps, and persistence.

A single JSON config (validated against the shipped schema, unknown keys
rejected) describes a walk or search, the backends to run it on, the
noise model (explicit rates or ``"calibrate"``), and an optional sweep
over lattice sizes.  Every run writes one JSON record whose ``payload``
section is fully deterministic under (config, seed): re-running the same
config yields byte-identical payloads, while wall-clock data lives under
``meta``.

Seed derivation is one documented chain: the config's root seed spawns a
run seed per sweep point via SeedSequence([root, point_index]); inside a
run, shot sampling and trajectories use the stream tags from
:mod:`qcawalk.states`.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .lattice import Lattice
from .metrics import (
    hellinger_fidelity,
    inverse_fit,
    l1_distance,
    linear_fit,
    selectivity,
    success_probability,
)
from .noise import NoiseModel, calibrate_rates
from .states import Distribution
from .walks import InitSpec, WalkBackend, WalkConfig, run_walk

#: Environment variable bounding the number of concurrent sweep workers.
WORKERS_ENV = "QCAWALK_WORKERS"

_DEFAULT_STEPS = {"cycle": 50, "torus": 20}
_DEFAULT_MARKED = {"cycle": 2}  # torus default is vertex (3, 0)


class ConfigError(ValueError):
    """Config failed schema validation; ``messages`` lists the violations."""

    def __init__(self, messages):
        self.messages = list(messages)
        super().__init__("\n".join(self.messages))


def _load_schema(name: str) -> dict:
    ref = resources.files("qcawalk").joinpath("schemas", name)
    return json.loads(ref.read_text())


def config_schema() -> dict:
    return _load_schema("experiment_config.schema.json")


def run_record_schema() -> dict:
    return _load_schema("run_record.schema.json")


def validate_config(raw: dict) -> list:
    """Schema diagnostics for a raw config dict ([] when valid)."""
    validator = jsonschema.Draft202012Validator(config_schema())
    out = []
    for err in sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path)):
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        out.append(f"{where}: {err.message}")
    return out


def load_config(source) -> dict:
    """Read, validate and normalise a config (path, JSON string, or dict)."""
    if isinstance(source, dict):
        raw = source
    else:
        text = Path(source).read_text()
        raw = json.loads(text)
    problems = validate_config(raw)
    if problems:
        raise ConfigError(problems)
    return _apply_defaults(raw)


def _apply_defaults(raw: dict) -> dict:
    cfg = json.loads(json.dumps(raw))  # deep copy, JSON-typed
    kind = cfg["lattice"]["kind"]
    walk = cfg.setdefault("walk", {})
    walk.setdefault("steps", _DEFAULT_STEPS[kind])
    walk.setdefault("marked", None)
    walk.setdefault("initializer_mode", "exact")
    if "variant" not in walk:
        walk["variant"] = "search" if walk["marked"] is not None else "walk"
    if walk["variant"] == "search":
        walk.setdefault("init", {"kind": "search_uniform"})
    else:
        walk.setdefault("init", {"kind": "symmetric", "site": 0})
    walk["init"].setdefault("site", 0)
    cfg.setdefault("name", "experiment")
    cfg.setdefault("shots", 10000)
    cfg.setdefault("seed", 0)
    cfg.setdefault("backends", ["statevector"])
    cfg.setdefault("n_trajectories", 2000)
    cfg.setdefault("density_cap", 12)
    cfg.setdefault("noise", None)
    cfg.setdefault("sweep", None)
    output = cfg.setdefault("output", {})
    output.setdefault("directory", "results")
    output.setdefault("formats", ["json", "csv"])
    return cfg


def resolve_noise(spec) -> NoiseModel | None:
    if spec is None:
        return None
    if spec == "calibrate":
        return calibrate_rates().model
    return NoiseModel.from_dict(spec)


def _default_marked(lattice: Lattice) -> int:
    if lattice.kind == "cycle":
        return _DEFAULT_MARKED["cycle"]
    return lattice.vertex_id(3, 0)


def _point_config(cfg: dict, size: int, index: int) -> dict:
    """Resolve one sweep point: concrete size, marked vertex, run seed."""
    point = json.loads(json.dumps(cfg))
    point["lattice"]["N"] = size
    lattice = Lattice(point["lattice"]["kind"], size)
    walk = point["walk"]
    if walk["variant"] == "search" and walk["marked"] is None:
        walk["marked"] = _default_marked(lattice)
    if walk["variant"] == "walk":
        walk["marked"] = None
    seq = np.random.SeedSequence([point["seed"], index])
    point["run_seed"] = int(seq.generate_state(1, dtype=np.uint32)[0])
    point["point_index"] = index
    del point["sweep"]
    return point


def _dist_payload(dist: Distribution) -> dict:
    return {
        "probabilities": {str(k): float(v) for k, v in sorted(
            dist.outcomes.items(), key=lambda kv: str(kv[0]))},
        "shots": dist.shots,
        "counts": None if dist.counts is None else {
            str(k): int(v) for k, v in sorted(dist.counts.items(), key=lambda kv: str(kv[0]))},
    }


def _walk_config(point: dict, backend: str, noise: NoiseModel | None) -> WalkConfig:
    lattice = Lattice(point["lattice"]["kind"], point["lattice"]["N"])
    walk = point["walk"]
    return WalkConfig(
        lattice=lattice,
        steps=walk["steps"],
        init=InitSpec(walk["init"]["kind"], walk["init"]["site"]),
        marked=walk["marked"],
        shots=point["shots"],
        seed=point["run_seed"],
        backend=WalkBackend(backend, point["n_trajectories"]),
        initializer_mode=walk["initializer_mode"],
        density_cap=point["density_cap"],
    )


def execute_point(point: dict, noise: NoiseModel | None) -> dict:
    """Run all configured backends for one sweep point and build its record."""
    backends = list(point["backends"])
    if "statevector" not in backends:
        backends.insert(0, "statevector")  # ideal reference is always produced
    runs = {}
    timings = {}
    for backend in backends:
        result = run_walk(_walk_config(point, backend, noise), noise=noise)
        timings[backend] = result.metadata["wall_time_s"]
        runs[backend] = result

    marked = point["walk"]["marked"]
    ideal = runs["statevector"]
    series = []
    scalars = {}
    for backend, result in runs.items():
        if backend != "statevector":
            series.append({
                "name": "hellinger_fidelity",
                "values": [hellinger_fidelity(i, n)
                           for i, n in zip(ideal.exact, result.exact)],
                "source": ["statevector", backend],
            })
            series.append({
                "name": "l1_distance",
                "values": [l1_distance(i, n)
                           for i, n in zip(ideal.exact, result.exact)],
                "source": ["statevector", backend],
            })
        series.append({
            "name": "leakage",
            "values": [float(x) for x in result.leakage_per_step],
            "source": [backend],
        })
        if marked is not None:
            series.append({
                "name": "marked_probability",
                "values": [d.get(marked) for d in result.exact],
                "source": [backend],
            })
            series.append({
                "name": "selectivity",
                "values": [selectivity(d, marked) for d in result.exact],
                "source": [backend],
            })
    if marked is not None:
        peak, step = success_probability(ideal.exact, marked)
        scalars["success_probability"] = peak
        scalars["hitting_time"] = step
        for backend, result in runs.items():
            if backend == "statevector":
                continue
            npeak, nstep = success_probability(result.exact, marked)
            scalars[f"success_probability_{backend}"] = npeak
            scalars[f"hitting_time_{backend}"] = nstep
            scalars[f"degraded_ratio_{backend}"] = npeak / peak if peak > 0 else None

    payload_runs = {}
    for backend, result in runs.items():
        payload_runs[backend] = {
            "backend": backend,
            "per_step": [
                {
                    "exact": _dist_payload(exact),
                    "empirical": _dist_payload(emp),
                    "leakage": float(leak),
                }
                for (exact, emp), leak in zip(result.per_step, result.leakage_per_step)
            ],
        }

    config_echo = {k: point[k] for k in sorted(point)}
    payload = {
        "schema_version": 1,
        "config": config_echo,
        "config_hash": hashlib.sha256(
            json.dumps(config_echo, sort_keys=True).encode()).hexdigest(),
        "runs": payload_runs,
        "metrics": {"series": series, "scalars": scalars},
    }
    meta = {
        "tool_version": __version__,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "wall_time_s": timings,
    }
    return {"payload": payload, "meta": meta}


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def run_experiment(source, output_dir=None, workers: int | None = None) -> list:
    """Execute a validated config and persist one record per sweep point.

    Returns the written record paths.  Sweep points run concurrently up
    to ``workers`` (default: the QCAWALK_WORKERS env var, else 1); outputs
    are independent of the worker count.
    """
    cfg = load_config(source)
    noise = resolve_noise(cfg["noise"])
    sizes = cfg["sweep"]["sizes"] if cfg["sweep"] else [cfg["lattice"]["N"]]
    points = [_point_config(cfg, size, i) for i, size in enumerate(sizes)]
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    workers = max(1, workers)

    if workers == 1 or len(points) == 1:
        records = [execute_point(p, noise) for p in points]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda p: execute_point(p, noise), points))

    outdir = Path(output_dir) if output_dir else Path(cfg["output"]["directory"])
    outdir.mkdir(parents=True, exist_ok=True)
    schema = run_record_schema()
    paths = []
    for point, record in zip(points, records):
        jsonschema.validate(record, schema)
        name = f"{cfg['name']}_N{point['lattice']['N']}_p{point['point_index']}.json"
        path = outdir / name
        _atomic_write(path, _record_text(record))
        paths.append(path)
    if "csv" in cfg["output"]["formats"]:
        emit_report(records, outdir)
    return paths


def _record_text(record: dict) -> str:
    return json.dumps(record, sort_keys=True, indent=1) + "\n"


def payload_text(record: dict) -> str:
    """Canonical bytes of the deterministic part of a record."""
    return json.dumps(record["payload"], sort_keys=True, indent=1) + "\n"


def load_records(directory) -> list:
    paths = sorted(Path(directory).glob("*.json"))
    records = []
    for p in paths:
        data = json.loads(p.read_text())
        if isinstance(data, dict) and "payload" in data:
            records.append(data)
    return records


def emit_report(records_or_dir, output_dir) -> list:
    """Write per-step and sweep CSVs plus a plain-text summary.

    The per-step CSV holds every metric series as (run, backend(s),
    metric, step, value) rows; the sweep CSV one row per lattice size
    with the search scalars; scaling fits (hitting time vs size, success
    probability vs 1/size) go to fits.csv when at least two sizes exist.
    """
    if isinstance(records_or_dir, (str, Path)):
        records = load_records(records_or_dir)
    else:
        records = list(records_or_dir)
    outdir = Path(output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []

    steps_path = outdir / "per_step.csv"
    lines = ["run,source,metric,step,value"]
    for rec in records:
        payload = rec["payload"]
        run_id = payload["config_hash"][:12]
        for s in payload["metrics"]["series"]:
            src = "+".join(s.get("source") or [])
            for step, value in enumerate(s["values"]):
                lines.append(f"{run_id},{src},{s['name']},{step},{value!r}")
    steps_path.write_text("\n".join(lines) + "\n")
    written.append(steps_path)

    search_recs = [r for r in records
                   if r["payload"]["config"]["walk"]["variant"] == "search"]
    if search_recs:
        sweep_path = outdir / "sweep.csv"
        scalar_keys = sorted({k for r in search_recs
                              for k in r["payload"]["metrics"]["scalars"]})
        rows = ["N," + ",".join(scalar_keys)]
        ns, hits, peaks = [], [], []
        for rec in sorted(search_recs, key=lambda r: r["payload"]["config"]["lattice"]["N"]):
            payload = rec["payload"]
            n = payload["config"]["lattice"]["N"]
            sc = payload["metrics"]["scalars"]
            rows.append(str(n) + "," + ",".join(
                "" if sc.get(k) is None else repr(sc.get(k)) for k in scalar_keys))
            ns.append(n)
            hits.append(sc.get("hitting_time"))
            peaks.append(sc.get("success_probability"))
        sweep_path.write_text("\n".join(rows) + "\n")
        written.append(sweep_path)

        if len(ns) >= 2:
            hit_fit = linear_fit(ns, hits)
            peak_fit = inverse_fit(ns, peaks)
            fits_path = outdir / "fits.csv"
            fit_lines = ["fit,parameter,value"]
            for k, v in hit_fit.items():
                fit_lines.append(f"hitting_time_linear,{k},{v!r}")
            for k, v in peak_fit.items():
                fit_lines.append(f"success_probability_inverse,{k},{v!r}")
            fits_path.write_text("\n".join(fit_lines) + "\n")
            written.append(fits_path)

    summary = outdir / "summary.txt"
    text_lines = []
    for rec in records:
        payload = rec["payload"]
        cfgp = payload["config"]
        text_lines.append(
            f"run {payload['config_hash'][:12]}: {cfgp['walk']['variant']} on "
            f"{cfgp['lattice']['kind']} N={cfgp['lattice']['N']}, "
            f"steps={cfgp['walk']['steps']}, backends={cfgp['backends']}"
        )
        for k, v in sorted(payload["metrics"]["scalars"].items()):
            text_lines.append(f"    {k} = {v}")
    summary.write_text("\n".join(text_lines) + "\n")
    written.append(summary)
    return written
