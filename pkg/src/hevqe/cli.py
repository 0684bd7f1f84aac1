"""Experiment runner CLI.

Three subcommands: ``maxcut`` sweeps ansatz families over random graph
instances, ``heisenberg`` sweeps the frozen-impurity chain grid, and
``oracle-fixtures`` dumps the classical reference values.  Runs checkpoint
per cell (one JSON plus trace/series CSVs named by the cell key); re-running
with the same output directory skips finished cells unless --force is given,
and the assembled summary.csv is byte-identical across reruns because wall
times stay in the per-cell JSON only.

Exit codes: 0 success, 1 at least one cell failed (see failures.txt),
2 configuration or usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .ansatz import AnsatzSpec
from .driver import ChainSpec, EvalMode, RunConfig, config_digest, run_dvqe, run_vqe
from .hamiltonians import ImpuritySpec, random_complete_graph
from .oracles import (
    brute_force_maxcut,
    exact_ground,
    fixture_chain_cases,
    fixture_graph_cases,
    write_chain_fixture_csv,
    write_maxcut_fixture_csv,
)

MAXCUT_SUMMARY_SCHEMA = "maxcut_summary_v1"
MAXCUT_SERIES_SCHEMA = "maxcut_series_v1"
HEIS_SUMMARY_SCHEMA = "heisenberg_summary_v1"

MAXCUT_SUMMARY_COLUMNS = [
    "schema", "ansatz", "n", "instance_seed", "opt_seed", "budget",
    "best_energy", "c_opt", "alpha", "p_best",
]
MAXCUT_SERIES_COLUMNS = [
    "schema", "ansatz", "n", "instance_seed", "opt_seed", "eval_index",
    "alpha", "p_best",
]
HEIS_SUMMARY_COLUMNS = [
    "schema", "n", "J", "d", "frozen", "h", "reps", "budget",
    "energy", "e_ref", "error_abs", "error_rel", "magnetization",
]

MAXCUT_DEFAULTS = {
    "ansatzes": ["he", "qaoa_p1", "qaoa_p2", "qaoa_p3", "hea_r2"],
    "n": [5],
    "instance_seeds": list(range(10)),
    "opt_seed": 0,
    "budget": 150,
    "shots": 0,
    "shot_seed": 11,
}

HEIS_DEFAULTS = {
    "n": 6,
    "J": 1.0,
    "d_values": [0, 1, 2],
    "h_values": [0, 1, 2, 3, 4],
    "frozen": ["zero", "one"],
    "reps": 4,
    "budget": 600,
    "opt_seed": 0,
    "shots": 0,
    "shot_seed": 11,
}

_QAOA_RE = re.compile(r"qaoa_p([1-9]\d*)$")
_HEA_RE = re.compile(r"hea_r([1-9]\d*)$")


class ConfigError(Exception):
    """Bad configuration file, --set override, or key combination."""


def _parse_scalar(token: str):
    token = token.strip()
    if len(token) >= 2 and token[0] == token[-1] and token[0] in "'\"":
        return token[1:-1]
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        pass
    return token


def _parse_value(raw: str):
    raw = raw.strip()
    if raw.startswith("[") and raw.endswith("]"):
        inner = raw[1:-1].strip()
        return [_parse_scalar(t) for t in inner.split(",")] if inner else []
    return _parse_scalar(raw)


def parse_config(text: str) -> dict:
    """``key = value`` lines; ``#`` comments; ``[a, b, c]`` lists."""
    out = {}
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, val = line.partition("=")
        if not eq:
            raise ConfigError(f"line {ln}: expected `key = value`, got {raw.strip()!r}")
        key, val = key.strip(), val.strip()
        if not key or not val:
            raise ConfigError(f"line {ln}: empty key or value")
        out[key] = _parse_value(val)
    return out


def _load_settings(defaults: dict, args) -> dict:
    settings = dict(defaults)
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        file_cfg = parse_config(path.read_text())
        unknown = sorted(set(file_cfg) - set(defaults))
        if unknown:
            raise ConfigError(f"unknown config keys: {unknown}")
        settings.update(file_cfg)
    for item in args.set or []:
        key, eq, val = item.partition("=")
        if not eq:
            raise ConfigError(f"--set needs KEY=VALUE, got {item!r}")
        key = key.strip()
        if key not in defaults:
            raise ConfigError(f"unknown config key {key!r}")
        settings[key] = _parse_value(val)
    if args.seed is not None:
        settings["opt_seed"] = int(args.seed)
    return settings


def _as_list(value) -> list:
    return list(value) if isinstance(value, list) else [value]


def _validate_ansatz_token(token: str) -> None:
    if token == "he" or _QAOA_RE.match(token) or _HEA_RE.match(token):
        return
    raise ConfigError(
        f"unknown ansatz token {token!r} (expected he, qaoa_p<k>, or hea_r<k>)"
    )


def ansatz_spec_from_token(token: str, n: int, graph=None) -> AnsatzSpec:
    if token == "he":
        return AnsatzSpec("HE_MAXCUT", n)
    m = _QAOA_RE.match(token)
    if m:
        return AnsatzSpec("QAOA", n, reps_or_p=int(m.group(1)), graph=graph)
    m = _HEA_RE.match(token)
    if m:
        return AnsatzSpec("HARDWARE_EFFICIENT", n, reps_or_p=int(m.group(1)))
    raise ConfigError(f"unknown ansatz token {token!r}")


def _eval_mode_fields(settings: dict) -> dict:
    shots = int(settings["shots"])
    if shots > 0:
        return {"kind": "shots", "shots": shots, "seed": int(settings["shot_seed"])}
    return {"kind": "exact", "shots": 0, "seed": 0}


# --- cell workers (top level so the process pool can pickle them) ---

def _maxcut_cell(task: dict) -> str:
    token, n = task["ansatz"], task["n"]
    gseed, oseed = task["instance_seed"], task["opt_seed"]
    graph = random_complete_graph(n, gseed)
    spec = ansatz_spec_from_token(token, n, graph=graph)
    config = RunConfig(
        ansatz=spec,
        graph=graph,
        eval_mode=EvalMode(**task["eval_mode"]),
        budget=task["budget"],
        seed=oseed,
    )
    record = run_vqe(config)
    out_dir, key = Path(task["out_dir"]), task["key"]
    record.trace.to_csv(out_dir / f"{key}.trace.csv")
    with open(out_dir / f"{key}.series.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(MAXCUT_SERIES_COLUMNS)
        for k in range(len(record.trace)):
            writer.writerow(
                [MAXCUT_SERIES_SCHEMA, token, n, gseed, oseed, k,
                 repr(float(record.alpha_series[k])),
                 repr(float(record.p_best_series[k]))]
            )
    summary_row = {
        "schema": MAXCUT_SUMMARY_SCHEMA,
        "ansatz": token,
        "n": n,
        "instance_seed": gseed,
        "opt_seed": oseed,
        "budget": task["budget"],
        "best_energy": repr(record.best_energy),
        "c_opt": repr(record.c_opt),
        "alpha": repr(record.alpha),
        "p_best": repr(record.p_best),
    }
    cell = {
        "key": key,
        "config_hash": config_digest(config),
        "wall_time_s": record.wall_time_s,
        "summary_row": summary_row,
    }
    # The JSON is written last: its presence marks the cell complete.
    (out_dir / f"{key}.json").write_text(
        json.dumps(cell, indent=2, sort_keys=True) + "\n"
    )
    return key


def _heisenberg_cell(task: dict) -> str:
    chain = ChainSpec(task["n"], task["J"], task["h"])
    imp = ImpuritySpec(task["d"], task["frozen"])
    spec = AnsatzSpec(
        "HE_DVQE", task["n"], reps_or_p=task["reps"], impurity=imp
    )
    config = RunConfig(
        ansatz=spec,
        chain=chain,
        eval_mode=EvalMode(**task["eval_mode"]),
        budget=task["budget"],
        seed=task["opt_seed"],
    )
    result = run_dvqe(config)
    out_dir, key = Path(task["out_dir"]), task["key"]
    result.record.trace.to_csv(out_dir / f"{key}.trace.csv")
    summary_row = {
        "schema": HEIS_SUMMARY_SCHEMA,
        "n": task["n"],
        "J": repr(float(task["J"])),
        "d": task["d"],
        "frozen": task["frozen"],
        "h": repr(float(task["h"])),
        "reps": task["reps"],
        "budget": task["budget"],
        "energy": repr(result.system_energy),
        "e_ref": repr(result.e_ref),
        "error_abs": repr(result.error_abs),
        "error_rel": repr(result.error_rel),
        "magnetization": repr(result.magnetization),
    }
    cell = {
        "key": key,
        "config_hash": config_digest(config),
        "wall_time_s": result.record.wall_time_s,
        "summary_row": summary_row,
    }
    (out_dir / f"{key}.json").write_text(
        json.dumps(cell, indent=2, sort_keys=True) + "\n"
    )
    return key


def _run_cells(tasks, worker, out_dir: Path, workers: int, force: bool):
    """Run the not-yet-checkpointed cells; returns [(key, message)] failures."""
    pending = [
        t for t in tasks if force or not (out_dir / f"{t['key']}.json").exists()
    ]
    for t in tasks:
        if t not in pending:
            print(f"skip {t['key']} (checkpointed)")
    failures = []
    if workers > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [(t["key"], pool.submit(worker, t)) for t in pending]
            for key, fut in futures:
                exc = fut.exception()
                if exc is None:
                    print(f"done {key}")
                else:
                    print(f"FAIL {key}: {exc}")
                    failures.append((key, f"{type(exc).__name__}: {exc}"))
    else:
        for t in pending:
            try:
                worker(t)
            except Exception as exc:
                print(f"FAIL {t['key']}: {exc}")
                failures.append((t["key"], f"{type(exc).__name__}: {exc}"))
            else:
                print(f"done {t['key']}")
    return failures


def _assemble_summary(out_dir: Path, keys, columns) -> int:
    rows = []
    for key in keys:
        path = out_dir / f"{key}.json"
        if path.exists():
            rows.append(json.loads(path.read_text())["summary_row"])
    with open(out_dir / "summary.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        writer.writerows(rows)
    return len(rows)


def _assemble_series(out_dir: Path, keys) -> None:
    with open(out_dir / "series.csv", "w", newline="") as fh:
        wrote_header = False
        for key in keys:
            path = out_dir / f"{key}.series.csv"
            if not path.exists():
                continue
            lines = path.read_text().splitlines()
            if not wrote_header:
                fh.write(lines[0] + "\n")
                wrote_header = True
            for line in lines[1:]:
                fh.write(line + "\n")


def _finish(out_dir: Path, failures) -> int:
    if failures:
        with open(out_dir / "failures.txt", "w") as fh:
            for key, message in failures:
                fh.write(f"{key}: {message}\n")
        print(f"{len(failures)} cell(s) failed; see {out_dir / 'failures.txt'}")
        return 1
    return 0


def cmd_maxcut(args) -> int:
    settings = _load_settings(MAXCUT_DEFAULTS, args)
    tokens = [str(t) for t in _as_list(settings["ansatzes"])]
    for token in tokens:
        _validate_ansatz_token(token)
    sizes = [int(n) for n in _as_list(settings["n"])]
    gseeds = [int(s) for s in _as_list(settings["instance_seeds"])]
    if not tokens or not sizes or not gseeds:
        raise ConfigError("ansatzes, n, and instance_seeds must be non-empty")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    eval_fields = _eval_mode_fields(settings)
    tasks = [
        {
            "key": f"{token}_n{n}_g{gseed}",
            "ansatz": token,
            "n": n,
            "instance_seed": gseed,
            "opt_seed": int(settings["opt_seed"]),
            "budget": int(settings["budget"]),
            "eval_mode": eval_fields,
            "out_dir": str(out_dir),
        }
        for token in tokens
        for n in sizes
        for gseed in gseeds
    ]
    failures = _run_cells(tasks, _maxcut_cell, out_dir, args.workers, args.force)
    keys = [t["key"] for t in tasks]
    n_rows = _assemble_summary(out_dir, keys, MAXCUT_SUMMARY_COLUMNS)
    _assemble_series(out_dir, keys)
    print(f"{n_rows}/{len(tasks)} cells -> {out_dir / 'summary.csv'}")
    return _finish(out_dir, failures)


def cmd_heisenberg(args) -> int:
    settings = _load_settings(HEIS_DEFAULTS, args)
    n = int(settings["n"])
    coupling = float(settings["J"])
    d_values = [int(d) for d in _as_list(settings["d_values"])]
    h_values = [float(h) for h in _as_list(settings["h_values"])]
    frozen_values = [str(f) for f in _as_list(settings["frozen"])]
    if not d_values or not h_values or not frozen_values:
        raise ConfigError("d_values, h_values, and frozen must be non-empty")
    for frozen in frozen_values:
        if frozen not in ("zero", "one"):
            raise ConfigError(f'frozen must be "zero" or "one", got {frozen!r}')
    for d in d_values:
        if not 0 <= d < n:
            raise ConfigError(f"impurity site {d} outside chain of {n}")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    eval_fields = _eval_mode_fields(settings)
    tasks = [
        {
            "key": f"d{d}_h{h:g}_{frozen}",
            "n": n,
            "J": coupling,
            "d": d,
            "h": h,
            "frozen": frozen,
            "reps": int(settings["reps"]),
            "budget": int(settings["budget"]),
            "opt_seed": int(settings["opt_seed"]),
            "eval_mode": eval_fields,
            "out_dir": str(out_dir),
        }
        for d in d_values
        for h in h_values
        for frozen in frozen_values
    ]
    failures = _run_cells(tasks, _heisenberg_cell, out_dir, args.workers, args.force)
    keys = [t["key"] for t in tasks]
    n_rows = _assemble_summary(out_dir, keys, HEIS_SUMMARY_COLUMNS)
    print(f"{n_rows}/{len(tasks)} cells -> {out_dir / 'summary.csv'}")
    return _finish(out_dir, failures)


def cmd_oracle_fixtures(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    graph_rows = []
    for case_id, graph in fixture_graph_cases():
        c_opt, cuts = brute_force_maxcut(graph)
        graph_rows.append((case_id, c_opt, cuts))
    write_maxcut_fixture_csv(out_dir / "maxcut_fixtures.csv", graph_rows)
    chain_rows = []
    for case_id, hamiltonian in fixture_chain_cases():
        e0, _ = exact_ground(hamiltonian)
        chain_rows.append((case_id, e0))
    write_chain_fixture_csv(out_dir / "chain_fixtures.csv", chain_rows)
    print(
        f"{len(graph_rows)} graph cases, {len(chain_rows)} chain cases -> {out_dir}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hevqe",
        description="Variational MaxCut and frozen-impurity chain experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("maxcut", "sweep ansatz families over random complete graphs"),
        ("heisenberg", "sweep the frozen-impurity chain grid"),
    ):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--config", default=None, help="key = value settings file")
        sp.add_argument("--out", required=True, help="output directory")
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--force", action="store_true",
                        help="re-run cells even if checkpointed")
        sp.add_argument("--seed", type=int, default=None,
                        help="override the optimizer seed")
        sp.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override one settings key (repeatable)")
    sp = sub.add_parser("oracle-fixtures", help="dump classical reference values")
    sp.add_argument("--out", required=True, help="output directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "maxcut":
            return cmd_maxcut(args)
        if args.command == "heisenberg":
            return cmd_heisenberg(args)
        return cmd_oracle_fixtures(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
