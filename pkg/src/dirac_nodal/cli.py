"""Command line front end.

    dirac-nodal forward   --problem P.json [--n-min A --n-max B] --out DIR
    dirac-nodal nodes     --problem P.json [--n-min A --n-max B] --out DIR
    dirac-nodal synth     --problem P.json [--n-min A --n-max B] --out DIR
    dirac-nodal invert    --data nodes.csv [--m M] [--grid G] --out DIR
    dirac-nodal roundtrip --problem P.json [--use-asymptotic] --out DIR
    dirac-nodal demo-example1 [--m M] --out DIR

Every command also accepts ``--config run.json`` holding the same fields.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import io as dio
from .asymptotics import AsymptoticNodalModel, synthesize_nodal_data
from .forward import eigenvalues, nodal_data
from .inverse import NodalData, reconstruct, reconstruct_from_psi
from .problem import PI, DiracProblem, derived_constants, example1_problem, load_problem

COMMANDS = ("forward", "nodes", "synth", "invert", "roundtrip", "demo-example1")
NEEDS_PROBLEM = {"forward", "nodes", "synth", "roundtrip"}


class ConfigError(ValueError):
    def __init__(self, message: str, fields: list[str]):
        super().__init__(message)
        self.fields = fields


@dataclass
class RunConfig:
    command: str
    problem_path: str | None = None
    data_path: str | None = None
    n_min: int = 25
    n_max: int = 200
    grid_size: int = 257
    m: float | None = None
    output_dir: str = "out"
    use_asymptotic: bool = False


def check_config(cfg: RunConfig) -> RunConfig:
    if cfg.command not in COMMANDS:
        raise ConfigError(f"command must be one of {', '.join(COMMANDS)}, got {cfg.command!r}", ["command"])
    for name in ("n_min", "n_max", "grid_size"):
        v = getattr(cfg, name)
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(f"{name} must be an integer, got {v!r}", [name])
    if cfg.n_min > cfg.n_max:
        raise ConfigError(f"n_min ({cfg.n_min}) must not exceed n_max ({cfg.n_max})", ["n_min", "n_max"])
    if cfg.command in ("nodes", "synth", "roundtrip") and cfg.n_min < 1:
        raise ConfigError(f"n_min must be >= 1 for {cfg.command}, got {cfg.n_min}", ["n_min"])
    if cfg.grid_size < 9:
        raise ConfigError(f"grid_size must be >= 9, got {cfg.grid_size}", ["grid_size"])
    if cfg.command in NEEDS_PROBLEM:
        if not cfg.problem_path:
            raise ConfigError(f"problem_path is required for {cfg.command}", ["problem_path"])
        if not Path(cfg.problem_path).is_file():
            raise ConfigError(f"problem_path {cfg.problem_path!r} does not exist", ["problem_path"])
    if cfg.command == "invert":
        if not cfg.data_path:
            raise ConfigError("data_path is required for invert", ["data_path"])
        if not Path(cfg.data_path).is_file():
            raise ConfigError(f"data_path {cfg.data_path!r} does not exist", ["data_path"])
    if cfg.m is not None:
        if isinstance(cfg.m, bool) or not isinstance(cfg.m, (int, float)) or not math.isfinite(cfg.m):
            raise ConfigError(f"m must be a finite real, got {cfg.m!r}", ["m"])
        cfg.m = float(cfg.m)
    return cfg


def validate_config(path: str | Path, overrides: dict | None = None) -> RunConfig:
    """Parse a JSON run file, fill defaults and cross-check fields."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})", []) from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be an object", [])
    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"unknown config fields: {', '.join(unknown)}", unknown)
    if "command" not in raw:
        raise ConfigError("command is required", ["command"])
    return check_config(RunConfig(**raw))


# -- commands -------------------------------------------------------------------
# each returns ({filename: text}, summary dict); files are written only on success


def _problem(cfg: RunConfig) -> DiracProblem:
    return load_problem(cfg.problem_path)


def cmd_forward(cfg: RunConfig):
    spec = eigenvalues(_problem(cfg), (cfg.n_min, cfg.n_max))
    summary = {"found": len(spec.entries), "missing": spec.missing, "duplicates": spec.duplicates}
    return {"spectrum.csv": dio.spectrum_csv(spec)}, summary


def cmd_nodes(cfg: RunConfig):
    data = nodal_data(_problem(cfg), cfg.n_min, cfg.n_max)
    bad = [n for n, s in data.sets.items() if not s.count_ok]
    return {"nodes.csv": dio.nodal_csv(data)}, {"sets": len(data), "count_mismatch": bad}


def cmd_synth(cfg: RunConfig):
    model = AsymptoticNodalModel.from_problem(_problem(cfg))
    data = synthesize_nodal_data(model, cfg.n_min, cfg.n_max)
    return {"nodes.csv": dio.nodal_csv(data)}, {"sets": len(data)}


def _invert(data: NodalData, cfg: RunConfig):
    res = reconstruct(data, cfg.m, cfg.grid_size)
    files = {"reconstruction.json": dio.reconstruction_json(res), "diagnostics.csv": dio.diagnostics_csv(res)}
    return res, files


def cmd_invert(cfg: RunConfig):
    res, files = _invert(dio.read_nodal_csv(cfg.data_path), cfg)
    summary = {k: v for k, v in res.to_dict().items() if k != "V"}
    return files, summary


def error_report(problem: DiracProblem, res) -> dict:
    c = derived_constants(problem)
    v_true = np.asarray(problem.V(res.grid)) * np.ones_like(res.grid)
    report = {
        "alpha_error": abs(res.alpha - problem.alpha),
        "beta_error": abs(res.beta - problem.beta),
        "V_sup_error": float(np.max(np.abs(res.V - v_true))),
        "Fpi_error": abs(res.Fpi - c.Fpi),
        "G0_error": abs(res.G0 - c.G0),
    }
    if res.F0 is not None:
        report["F0_error"] = abs(res.F0 - c.F0)
        report["Gpi_error"] = abs(res.Gpi - c.Gpi)
    report["source_omega_pi"] = c.omega_pi
    report["gauge_satisfied"] = abs(c.omega_pi) <= 1e-9
    return report


def cmd_roundtrip(cfg: RunConfig):
    problem = _problem(cfg)
    if cfg.use_asymptotic:
        data = synthesize_nodal_data(AsymptoticNodalModel.from_problem(problem), cfg.n_min, cfg.n_max)
    else:
        data = nodal_data(problem, cfg.n_min, cfg.n_max)
    if cfg.m is None:
        cfg.m = problem.m
    res, files = _invert(data, cfg)
    report = error_report(problem, res)
    report["source"] = "asymptotic" if cfg.use_asymptotic else "numeric"
    files["nodes.csv"] = dio.nodal_csv(data)
    files["report.json"] = dio.dumps_json(report)
    return files, report


def example1_psi(grid: np.ndarray):
    """Closed-form psi1, psi2+, psi2- of the worked example."""
    s3 = math.sqrt(3.0)
    g = grid
    psi1 = np.sin(g) + (g + PI) / 6
    base = PI / 6 * (np.sin(g) + PI / 6)
    p2p = base - PI / 2 * (6 - s3) * g + PI * (1.5 * (g + 0.5) + 2 * PI)
    p2m = base + PI / 2 * (2 + s3) * g + PI * (1.5 * (g + 0.5) - 2 * PI)
    return psi1, p2p, p2m


EXAMPLE1_VALUES = {
    "alpha": PI / 6,
    "beta": PI / 3,
    "Fpi": 2 * PI,
    "G0": 0.0,
    "F0": 0.0,
    "Gpi": (math.sqrt(3.0) + 1) * PI / 2,
}


def cmd_demo(cfg: RunConfig):
    grid = np.linspace(0.0, PI, cfg.grid_size)
    exact = reconstruct_from_psi(grid, *example1_psi(grid), m=cfg.m)
    model = AsymptoticNodalModel.from_problem(example1_problem())
    n_lo = max(1, cfg.n_max // 2)
    data = synthesize_nodal_data(model, n_lo, cfg.n_max)
    synth = reconstruct(data, cfg.m, cfg.grid_size)
    keys = ["alpha", "beta", "Fpi", "G0"] + (["F0", "Gpi"] if cfg.m is not None else [])
    rows = []
    for k in keys:
        rows.append({"quantity": k, "reference": EXAMPLE1_VALUES[k], "from_psi": getattr(exact, k), "from_nodes": getattr(synth, k)})
    v_err = {
        "from_psi": float(np.max(np.abs(exact.V - np.cos(grid)))),
        "from_nodes": float(np.max(np.abs(synth.V - np.cos(grid)))),
    }
    lines = [f"{'quantity':<8} {'reference':>22} {'from psi':>22} {'from nodes':>22}"]
    for r in rows:
        lines.append(f"{r['quantity']:<8} {r['reference']:>22.15g} {r['from_psi']:>22.15g} {r['from_nodes']:>22.15g}")
    lines.append(f"{'V=cos x':<8} {'sup error':>22} {v_err['from_psi']:>22.3g} {v_err['from_nodes']:>22.3g}")
    print("\n".join(lines))
    report = {"rows": rows, "V_sup_error": v_err, "nodal_window": [n_lo, cfg.n_max]}
    return {"example1_report.json": dio.dumps_json(report)}, report


HANDLERS = {
    "forward": cmd_forward,
    "nodes": cmd_nodes,
    "synth": cmd_synth,
    "invert": cmd_invert,
    "roundtrip": cmd_roundtrip,
    "demo-example1": cmd_demo,
}


def _write_all(out_dir: Path, files: dict[str, str]) -> list[str]:
    out_dir.mkdir(parents=True, exist_ok=True)
    staged = []
    try:
        for name, text in files.items():
            fd, tmp = tempfile.mkstemp(dir=out_dir, prefix=f".{name}.", suffix=".tmp")
            staged.append((tmp, out_dir / name))
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
    except BaseException:
        for tmp, _ in staged:
            Path(tmp).unlink(missing_ok=True)
        raise
    for tmp, final in staged:
        os.replace(tmp, final)
    return [str(final) for _, final in staged]


def run(cfg: RunConfig) -> int:
    """Execute one command; returns the process exit status."""
    try:
        check_config(cfg)
        files, summary = HANDLERS[cfg.command](cfg)
        written = _write_all(Path(cfg.output_dir), files)
    except Exception as exc:  # noqa: BLE001 - every failure becomes an error record
        err = {"status": "error", "command": cfg.command, "type": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, ConfigError):
            err["fields"] = exc.fields
        print(json.dumps(err))
        return 1
    print(dio.dumps_json({"status": "ok", "command": cfg.command, "outputs": written, "summary": summary}), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dirac-nodal", description="Dirac inverse nodal problem toolkit")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="JSON run file with RunConfig fields")
    ap.add_argument("--problem", dest="problem_path")
    ap.add_argument("--data", dest="data_path")
    ap.add_argument("--n-min", dest="n_min", type=int)
    ap.add_argument("--n-max", dest="n_max", type=int)
    ap.add_argument("--grid", dest="grid_size", type=int)
    ap.add_argument("--m", type=float)
    ap.add_argument("--out", dest="output_dir")
    ap.add_argument("--use-asymptotic", action="store_true", default=None)
    return ap


def main(argv=None) -> int:
    args = vars(build_parser().parse_args(argv))
    config_path = args.pop("config")
    try:
        if config_path:
            cfg = validate_config(config_path, args)
        else:
            cfg = RunConfig(**{k: v for k, v in args.items() if v is not None})
    except (ConfigError, OSError) as exc:
        err = {"status": "error", "command": args.get("command"), "type": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, ConfigError):
            err["fields"] = exc.fields
        print(json.dumps(err))
        return 1
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
