"""Command line: ``wavemaplab <verify|evolve|spectrum|modes|sweep> [options]``.

Option precedence is command-line flag > ``--config`` JSON file > default.
With ``--out DIR`` the artifacts go into ``DIR`` together with
``config.json`` recording every resolved setting; without it, the primary
artifact is written to standard output.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

from . import evolve, model, modes
from .errors import ConfigError
from .grid import build_grid
from .verify import run_checks

COMMANDS = ("verify", "evolve", "spectrum", "modes", "sweep")
SWEEP_HEADER = ("amplitude", "verdict", "delta_hat", "center_amplitude")
DEFAULTS = {"d": 5, "k": None, "n": 48, "ds": None, "smax": 20.0, "amp": [1e-3], "p": 2,
            "out": None, "seed": 0, "workers": 1, "tol_scale": 1.0}


@dataclass
class RunConfig:
    command: str
    d: int = 5
    k: int = 3
    N: int = 48
    ds: float = 0.5 / 48 ** 2
    s_max: float = 20.0
    amplitudes: tuple = (1e-3,)
    p: int = 2
    out: str | None = None
    seed: int = 0
    workers: int = 1
    tol_scale: float = 1.0

    @property
    def params(self) -> model.ModelParams:
        if self.d < 5:
            return model.ModelParams.relaxed(self.d, self.k)
        return model.ModelParams(self.d, self.k)

    def evolution_config(self) -> evolve.EvolutionConfig:
        return evolve.EvolutionConfig(params=self.params, N=self.N, ds=self.ds, s_max=self.s_max)


def _amplitudes(text) -> list:
    if isinstance(text, (int, float)):
        return [float(text)]
    if isinstance(text, list):
        return [float(a) for a in text]
    try:
        return [float(a) for a in str(text).split(",") if a.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad amplitude list {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wavemaplab", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--d", type=int, help="spatial dimension, odd (default 5)")
    parser.add_argument("--k", type=int, help="Sobolev order, > d/2 (default (d+1)/2)")
    parser.add_argument("--n", type=int, help="number of collocation intervals N (default 48)")
    parser.add_argument("--ds", type=float, help="time step (default 0.5/N^2)")
    parser.add_argument("--smax", type=float, help="final time s (default 20)")
    parser.add_argument("--amp", type=_amplitudes, help="amplitude or comma list (default 1e-3)")
    parser.add_argument("--p", type=int, help="data profile exponent in (1-r^2)^p (default 2)")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--seed", type=int, help="seed for randomized checks (default 0)")
    parser.add_argument("--config", help="JSON file with any of the option names as keys")
    parser.add_argument("--workers", type=int, help="processes for sweep (default 1)")
    parser.add_argument("--tol-scale", dest="tol_scale", type=float, help=argparse.SUPPRESS)
    return parser


def parse_config(argv=None) -> RunConfig:
    """Resolve flags, an optional JSON file and defaults into a validated RunConfig.

    Violated constraints exit through ``parser.error`` (status 2).
    """
    parser = build_parser()
    ns = parser.parse_args(argv)
    values = dict(DEFAULTS)
    if ns.config:
        try:
            with open(ns.config) as fh:
                from_file = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            parser.error(f"cannot read config file: {exc}")
        unknown = set(from_file) - set(DEFAULTS)
        if unknown:
            parser.error(f"unknown config keys: {', '.join(sorted(unknown))}")
        values.update(from_file)
    for key in DEFAULTS:
        flag = getattr(ns, key)
        if flag is not None:
            values[key] = flag

    d = values["d"]
    if d % 2 == 0:
        parser.error(f"d must be odd (got {d})")
    minimum = 3 if ns.command == "verify" else 5
    if d < minimum:
        parser.error(f"d must be at least {minimum} for {ns.command} (got {d})")
    k = values["k"] if values["k"] is not None else (d + 1) // 2
    if not 2 * k > d:
        parser.error(f"k must exceed d/2 (got d={d}, k={k})")
    n = int(values["n"])
    if n < 8:
        parser.error(f"n must be at least 8 (got {n})")
    ds = values["ds"] if values["ds"] is not None else 0.5 / n ** 2
    if not ds > 0 or not values["smax"] > 0:
        parser.error("ds and smax must be positive")
    amps = _amplitudes(values["amp"])
    if not amps:
        parser.error("need at least one amplitude")
    if ns.command == "evolve" and len(amps) != 1:
        parser.error("evolve takes a single amplitude; use sweep for a list")
    if values["p"] < 0:
        parser.error("p must be nonnegative")
    return RunConfig(ns.command, d, k, n, float(ds), float(values["smax"]), tuple(amps),
                     int(values["p"]), values["out"], int(values["seed"]),
                     max(1, int(values["workers"])), float(values["tol_scale"]))


# commands -------------------------------------------------------------------

def _out_dir(config: RunConfig) -> Path | None:
    if config.out is None:
        return None
    path = Path(config.out)
    path.mkdir(parents=True, exist_ok=True)
    with open(path / "config.json", "w") as fh:
        json.dump(asdict(config), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _fit_window(s_max: float):
    return (5.0, s_max) if s_max >= 10.0 else (0.25 * s_max, s_max)


def run_single(config: RunConfig, amplitude: float, keep_final: bool = False):
    """One evolution from ``q1 = a (1-r^2)^p, q2 = 0``; returns the series and a summary row."""
    cfg = config.evolution_config()
    grid = build_grid(cfg.N, cfg.params.d)
    initial = evolve.polynomial_data(grid, amplitude, 0.0, config.p)
    series = evolve.evolve(cfg, initial, grid, keep_states=keep_final)
    try:
        delta = evolve.fit_decay_rate(series, _fit_window(cfg.s_max))
    except ValueError:
        delta = math.nan  # blowup, zero data or too few samples
    center = series.center_amp[-1]
    return series, grid, (amplitude, series.verdict, delta, center)


def _sweep_row(args):
    config, amplitude = args
    return run_single(config, amplitude)[2]


def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, float) else str(x)


def cmd_verify(config: RunConfig, stream=None) -> int:
    stream = stream or sys.stdout
    items = run_checks(config.d, config.k, config.seed, config.tol_scale)
    lines = [it.line() for it in items]
    for line in lines:
        print(line, file=stream)
    out = _out_dir(config)
    if out is not None:
        (out / "verify.txt").write_text("\n".join(lines) + "\n")
    return 0 if all(it.passed for it in items) else 1


def cmd_evolve(config: RunConfig, stream=None) -> int:
    stream = stream or sys.stdout
    series, grid, row = run_single(config, config.amplitudes[0], keep_final=True)
    out = _out_dir(config)
    if out is None:
        series.to_csv(stream)
    else:
        with open(out / "timeseries.csv", "w") as fh:
            series.to_csv(fh)
        final = series.final_state
        if final is not None and not series.blowup:
            with open(out / "snapshot.csv", "w") as fh:
                evolve.write_snapshot(fh, grid, config.params, final, config.ds)
        print(f"verdict={row[1]} delta_hat={_fmt(row[2])} center_amplitude={_fmt(row[3])}",
              file=stream)
    return 0


def _spectrum(config: RunConfig):
    return modes.generator_spectrum(config.params, config.N, 2 * config.N)


def _dump_json(obj, config: RunConfig, name: str, stream) -> None:
    obj = dict(obj, config=asdict(config))
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    out = _out_dir(config)
    if out is None:
        stream.write(text)
    else:
        (out / name).write_text(text)


def cmd_spectrum(config: RunConfig, stream=None) -> int:
    stream = stream or sys.stdout
    report = _spectrum(config)
    _dump_json(modes.report_to_json(config.d, config.k, spectrum=report), config,
               "spectrum.json", stream)
    return 0


def cmd_modes(config: RunConfig, stream=None) -> int:
    stream = stream or sys.stdout
    cert = modes.oscillation_certificate(config.d)
    report = _spectrum(config)
    _dump_json(modes.report_to_json(config.d, config.k, cert, report), config, "modes.json", stream)
    return 0 if cert.verdict == "PASS" else 1


def cmd_sweep(config: RunConfig, stream=None) -> int:
    stream = stream or sys.stdout
    jobs = [(config, a) for a in config.amplitudes]
    workers = min(config.workers, len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            rows = list(pool.map(_sweep_row, jobs))
    else:
        rows = [_sweep_row(job) for job in jobs]
    text = ",".join(SWEEP_HEADER) + "\n"
    text += "".join(",".join(_fmt(x) for x in row) + "\n" for row in rows)
    out = _out_dir(config)
    if out is None:
        stream.write(text)
    else:
        (out / "sweep.csv").write_text(text)
    return 0


HANDLERS = {"verify": cmd_verify, "evolve": cmd_evolve, "spectrum": cmd_spectrum,
            "modes": cmd_modes, "sweep": cmd_sweep}


def main(argv=None) -> int:
    config = parse_config(argv)
    try:
        return HANDLERS[config.command](config)
    except ConfigError as exc:
        print(f"wavemaplab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
