"""Command-line front end.

Subcommands::

    simulate   trajectory + redundancy CSV            (--out file, default stdout)
    fuzz       fuzzy redundancy CSV + summary JSON    (--out directory)
    measure    yearly redundancy CSV from tables      (--out file, default stdout)
    fit        Fourier coefficients + spectrum        (--out directory)
    spectrum   spectrum CSV from a coefficients CSV   (--out file, default stdout)
    pipeline   measure -> fit -> spectrum             (--out directory)

Every option may also come from a JSON document given with ``--config``;
keys are the long option names with dashes replaced by underscores.
Precedence is command-line flag > config file > built-in default.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import closedform, dynamics, fuzz, infometrics, spectral
from .model import PRESETS, HelixState, Vec3

__all__ = ["ConfigError", "RunConfig", "main", "format_number", "build_parser"]


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


def format_number(x: float) -> str:
    """Fixed notation, 12 significant digits, no exponent, no locale."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"refusing to write non-finite value {x}")
    if x == 0:
        return "0"
    return np.format_float_positional(x, precision=12, unique=False,
                                      fractional=False, trim="-")


@dataclass
class RunConfig:
    preset: str | None = None
    p0: list[float] | None = None
    q0: list[float] | None = None
    g: float | None = None
    dt: float = dynamics.DEFAULT_DT
    steps: int = int(round(dynamics.DEFAULT_HORIZON / dynamics.DEFAULT_DT))
    method: str = "rk4"
    interval: list[str] = field(default_factory=lambda: ["0"])
    mask: list[int] = field(default_factory=lambda: [1, 2, 3])
    seed: int | None = None
    terms: int | None = None
    omega0: float | None = None
    subsets: list[str] | None = None
    detrend: bool = False
    window: bool = False
    in_path: str | None = None
    out: str | None = None

    # -- validation helpers -------------------------------------------------

    def state(self) -> tuple[HelixState, float]:
        if self.preset is not None:
            if self.preset not in PRESETS:
                raise ConfigError("preset", f"unknown preset {self.preset!r}; "
                                  f"choose from {sorted(PRESETS)}")
            state, g = PRESETS[self.preset]
        else:
            if self.p0 is None or self.q0 is None:
                raise ConfigError("p0", "give --preset or both --p0 and --q0")
            state, g = None, 0.2
        p = self.p0 if self.p0 is not None else state.p
        q = self.q0 if self.q0 is not None else state.q
        for name, v in (("p0", p), ("q0", q)):
            try:
                Vec3.of(v)
            except (ValueError, TypeError) as exc:
                raise ConfigError(name, str(exc)) from None
        if self.g is not None:
            g = self.g
        if not math.isfinite(g):
            raise ConfigError("g", "must be finite")
        return HelixState.from_arrays(p, q), float(g)

    def check_grid(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ConfigError("dt", f"must be > 0, got {self.dt}")
        if self.steps < 1:
            raise ConfigError("steps", f"must be >= 1, got {self.steps}")
        if self.method not in ("rk4", "closedform"):
            raise ConfigError("method", f"must be rk4 or closedform, got {self.method!r}")

    def require(self, name: str, attr: str | None = None):
        value = getattr(self, attr or name)
        if value is None:
            raise ConfigError(name, "is required for this command")
        return value

    def check_fit(self):
        if self.terms is not None and self.terms < 1:
            raise ConfigError("terms", f"must be >= 1, got {self.terms}")
        if self.omega0 is not None and not (math.isfinite(self.omega0) and self.omega0 > 0):
            raise ConfigError("omega0", f"must be > 0, got {self.omega0}")


# -- argument parsing ----------------------------------------------------------

def _floats3(text: str) -> list[float]:
    parts = [p for p in re.split(r"[,\s]+", text.strip()) if p]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected x,y,z, got {text!r}")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected three numbers, got {text!r}") from None


def _csv_list(text: str) -> list[str]:
    return [p.strip() for p in text.split(",") if p.strip()]


def _mask(text: str) -> list[int]:
    try:
        return [int(p) for p in _csv_list(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"mask must list 1, 2 and/or 3, got {text!r}") from None


_INTERVAL_RE = re.compile(r"^\s*([0-9.eE+-]*)\s*\*?\s*pi\s*/\s*\(?\s*2\s*\*?\s*r\s*\)?\s*$")


def parse_interval(token, r: float) -> float:
    """A length in time units, or a multiple of pi/(2r) such as ``3pi/2r``."""
    if isinstance(token, (int, float)):
        return float(token)
    m = _INTERVAL_RE.match(str(token))
    if m:
        mult = float(m.group(1)) if m.group(1) else 1.0
        if r <= 0:
            raise ConfigError("interval", "pi/2r units need a non-degenerate solution (r > 0)")
        return fuzz.interval_from_multiple(mult, r)
    try:
        return float(token)
    except ValueError:
        raise ConfigError("interval", f"cannot parse {token!r}") from None


_OPTIONS = {
    # name: (argparse kwargs)
    "preset": dict(help=f"named initial state: {', '.join(sorted(PRESETS))}"),
    "p0": dict(type=_floats3, metavar="X,Y,Z", help="initial P"),
    "q0": dict(type=_floats3, metavar="X,Y,Z", help="initial Q"),
    "g": dict(type=float, help="coupling coefficient"),
    "dt": dict(type=float, help="time step (default 0.01)"),
    "steps": dict(type=int, help="number of steps (default 5000)"),
    "method": dict(choices=["rk4", "closedform"], help="trajectory source"),
    "interval": dict(type=_csv_list, metavar="L[,L2]",
                     help="fuzzy interval length(s): number or multiple like 3pi/2r"),
    "mask": dict(type=_mask, metavar="I[,J..]", help="fuzzed dimensions (1..3)"),
    "seed": dict(type=int, help="RNG seed (required for fuzz)"),
    "terms": dict(type=int, help="Fourier terms N (default (n-1)//2)"),
    "omega0": dict(type=float, help="base angular frequency (default 2pi(n-1)/(n*span))"),
    "subsets": dict(type=_csv_list, metavar="LABELS",
                    help="dimension subsets, e.g. uig,uif,ugf,igf"),
    "in": dict(dest="in_path", metavar="PATH", help="input file or directory"),
    "out": dict(metavar="PATH", help="output file or directory"),
}

_COMMAND_OPTIONS = {
    "simulate": ["preset", "p0", "q0", "g", "dt", "steps", "method", "out"],
    "fuzz": ["preset", "p0", "q0", "g", "dt", "steps", "interval", "mask", "seed", "out"],
    "measure": ["in", "subsets", "out"],
    "fit": ["in", "terms", "omega0", "out"],
    "spectrum": ["in", "out"],
    "pipeline": ["in", "subsets", "terms", "omega0", "out"],
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="helixfield", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for command, names in _COMMAND_OPTIONS.items():
        sp = sub.add_parser(command)
        sp.add_argument("--config", metavar="JSON", help="JSON config file")
        for name in names:
            kwargs = dict(_OPTIONS[name])
            kwargs.setdefault("dest", name)
            sp.add_argument(f"--{name}", default=None, **kwargs)
        if command in ("fit", "pipeline"):
            sp.add_argument("--detrend", action="store_true", default=None,
                            help="remove a linear trend before fitting")
            sp.add_argument("--window", action="store_true", default=None,
                            help="apply a Hann taper before fitting")
    return parser


_CONFIG_TYPES = {
    "preset": str, "p0": list, "q0": list, "g": float, "dt": float, "steps": int,
    "method": str, "interval": list, "mask": list, "seed": int, "terms": int,
    "omega0": float, "subsets": list, "detrend": bool, "window": bool,
    "in": str, "out": str,
}


def load_config(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("config", str(exc)) from None
        if not isinstance(doc, dict):
            raise ConfigError("config", "top level must be a JSON object")
        for key, value in doc.items():
            if key not in _CONFIG_TYPES:
                raise ConfigError(key, "unknown config key")
            if isinstance(value, str) and key in ("p0", "q0"):
                value = _floats3(value)
            elif isinstance(value, str) and key in ("interval", "subsets"):
                value = _csv_list(value)
            elif isinstance(value, str) and key == "mask":
                value = _mask(value)
            elif isinstance(value, (int, float)) and key in ("interval", "mask"):
                value = [value]
            expected = _CONFIG_TYPES[key]
            if value is not None:
                if expected is float and isinstance(value, int) and not isinstance(value, bool):
                    value = float(value)
                if not isinstance(value, expected) or (expected is int and isinstance(value, bool)):
                    raise ConfigError(key, f"expected {expected.__name__}, got {value!r}")
            values["in_path" if key == "in" else key] = value
    for key, value in vars(args).items():
        if key in ("command", "config") or value is None:
            continue
        values[key] = value
    return RunConfig(**values)


# -- output helpers ------------------------------------------------------------

def _write_csv(header, rows, path: str | None):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else format_number(v) for v in row])
    text = buf.getvalue()
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _write_json(doc, path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.require("out"))
    if out.exists() and not out.is_dir():
        raise ConfigError("out", f"{out} exists and is not a directory")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _times(cfg: RunConfig) -> np.ndarray:
    return np.arange(cfg.steps + 1) * cfg.dt


# -- commands --------------------------------------------------------------------

def cmd_simulate(cfg: RunConfig) -> int:
    state, g = cfg.state()
    cfg.check_grid()
    if cfg.method == "rk4":
        traj = dynamics.integrate(state, g, cfg.dt, cfg.steps)
        t, p, q = traj.times, traj.p, traj.q
    else:
        t = _times(cfg)
        p, q = closedform.eval_arrays(closedform.solve(state, g), t)
    red = p * p - q * q
    rows = (
        [t[n], *p[n], *q[n], *red[n], red[n].sum()] for n in range(len(t))
    )
    _write_csv(["t", "P1", "P2", "P3", "Q1", "Q2", "Q3", "R1", "R2", "R3", "Rtotal"],
               rows, cfg.out)
    return 0


def cmd_fuzz(cfg: RunConfig) -> int:
    state, g = cfg.state()
    cfg.check_grid()
    seed = cfg.require("seed")
    sol = closedform.solve(state, g)
    if not 1 <= len(cfg.interval) <= 2:
        raise ConfigError("interval", "give one or two interval lengths")
    lengths = [parse_interval(tok, sol.r) for tok in cfg.interval]
    try:
        fcfgs = [fuzz.FuzzyConfig(L, frozenset(cfg.mask), seed) for L in lengths]
    except ValueError as exc:
        name = "mask" if "mask" in str(exc) else "seed" if "seed" in str(exc) else "interval"
        raise ConfigError(name, str(exc)) from None
    if sol.degenerate and any(L > 0 for L in lengths):
        raise ConfigError("interval", "r = 0 (constant solution): only interval 0 is allowed")
    out = _out_dir(cfg)
    t = _times(cfg)
    noiseless = closedform.redundancy_series(sol, t)
    runs = [fuzz.fuzzy_redundancy(sol, t, fc) for fc in fcfgs]
    header = ["t", "Rf1", "Rf2", "Rf3", "Rftotal"]
    for idx, run in enumerate(runs):
        name = "fuzz.csv" if idx == 0 else "fuzz_2.csv"
        comps, total = run.components, run.total
        _write_csv(header, ([t[n], *comps[n], total[n]] for n in range(len(t))),
                   str(out / name))
    summary = {
        "rng": fuzz.RNG_ALGORITHM,
        "seed": seed,
        "g": g,
        "r": sol.r,
        "mask": sorted(cfg.mask),
        "noiseless_total_mean": float(noiseless.total.mean()),
        "runs": [
            {
                "interval": L,
                "interval_pi_over_2r": (L * 2 * sol.r / math.pi) if sol.r > 0 else None,
                "mean_Rftotal": float(run.total.mean()),
                "var_Rftotal": float(run.total.var()),
                "mean_Rf": [float(x) for x in run.components.mean(axis=0)],
                "var_Rf": [float(x) for x in run.components.var(axis=0)],
            }
            for L, run in zip(lengths, runs)
        ],
    }
    if len(runs) == 2:
        summary["ks_statistic"] = fuzz.compare_lengths(
            sol, t, seed, tuple(lengths), frozenset(cfg.mask)).ks_statistic
    _write_json(summary, out / "summary.json")
    return 0


def _series(cfg: RunConfig) -> infometrics.RedundancySeries:
    in_path = cfg.require("in", "in_path")
    subsets = cfg.subsets
    if not subsets:
        raise ConfigError("subsets", "at least one subset is required")
    try:
        tables = infometrics.read_table_dir(in_path)
    except infometrics.SchemaError as exc:
        raise ConfigError("in", str(exc)) from None
    try:
        return infometrics.series(tables, subsets)
    except (KeyError, IndexError, ValueError) as exc:
        raise ConfigError("subsets", str(exc)) from None


def _series_rows(rs: infometrics.RedundancySeries):
    return ([str(year), label, v] for year, label, v in rs.rows())


def cmd_measure(cfg: RunConfig) -> int:
    rs = _series(cfg)
    _write_csv(["year", "label", "value_bits"], _series_rows(rs), cfg.out)
    return 0


def _read_series_csv(path) -> tuple[np.ndarray, np.ndarray]:
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not {"t", "value"} <= set(reader.fieldnames):
                raise ConfigError("in", f"{path}: columns t,value required")
            rows = [(float(r["t"]), float(r["value"])) for r in reader]
    except OSError as exc:
        raise ConfigError("in", str(exc)) from None
    except (TypeError, ValueError) as exc:
        raise ConfigError("in", f"{path}: {exc}") from None
    if len(rows) < 2:
        raise ConfigError("in", f"{path}: need at least 2 samples")
    arr = np.array(rows)
    return arr[:, 0], arr[:, 1]


def _fit(cfg: RunConfig, t, y, where: str = "in") -> spectral.FourierModel:
    cfg.check_fit()
    try:
        return spectral.fit(t, y, n_terms=cfg.terms, omega0=cfg.omega0,
                            detrend=bool(cfg.detrend), window=bool(cfg.window))
    except ValueError as exc:
        raise ConfigError(where, str(exc)) from None


def _coefficient_rows(model: spectral.FourierModel):
    yield [0, model.offset, 0.0]
    for k, (b, d) in enumerate(model.harmonics, start=1):
        yield [k, b, d]


def _spectrum_rows(spec: spectral.Spectrum):
    for k, v in enumerate(spec.powers, start=1):
        vn = "" if spec.normalized is None else spec.normalized[k - 1]
        yield [k, v, vn]


def _fit_summary(model, spec):
    return {
        "n_samples": model.n_samples,
        "n_terms": model.n_terms,
        "omega0": model.omega0,
        "t0": model.t0,
        "offset": model.offset,
        "interpolating": model.interpolating,
        "rss": model.rss,
        "detrended": model.trend is not None,
        "normalized": spec.normalized is not None,
        "peak_k": spec.peak if spec.normalized is not None else None,
    }


def cmd_fit(cfg: RunConfig) -> int:
    t, y = _read_series_csv(cfg.require("in", "in_path"))
    model = _fit(cfg, t, y)
    spec = spectral.spectrum(model)
    out = _out_dir(cfg)
    _write_csv(["k", "b", "d"], _coefficient_rows(model), str(out / "coefficients.csv"))
    _write_csv(["k", "V", "V_normalized"], _spectrum_rows(spec), str(out / "spectrum.csv"))
    _write_json(_fit_summary(model, spec), out / "summary.json")
    return 0


def cmd_spectrum(cfg: RunConfig) -> int:
    path = cfg.require("in", "in_path")
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not {"k", "b", "d"} <= set(reader.fieldnames):
                raise ConfigError("in", f"{path}: columns k,b,d required")
            rows = {int(r["k"]): (float(r["b"]), float(r["d"])) for r in reader}
    except OSError as exc:
        raise ConfigError("in", str(exc)) from None
    except (TypeError, ValueError) as exc:
        raise ConfigError("in", f"{path}: {exc}") from None
    ks = sorted(k for k in rows if k >= 1)
    if ks != list(range(1, len(ks) + 1)) or not ks:
        raise ConfigError("in", f"{path}: harmonics must be numbered 1..N without gaps")
    b = np.array([rows[k][0] for k in ks])
    d = np.array([rows[k][1] for k in ks])
    model = spectral.FourierModel(rows.get(0, (0.0, 0.0))[0], b, d, omega0=1.0, t0=0.0)
    _write_csv(["k", "V", "V_normalized"], _spectrum_rows(spectral.spectrum(model)), cfg.out)
    return 0


def _safe_label(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9_-]+", "_", label)


def cmd_pipeline(cfg: RunConfig) -> int:
    rs = _series(cfg)
    out = _out_dir(cfg)
    _write_csv(["year", "label", "value_bits"], _series_rows(rs), str(out / "redundancy.csv"))
    try:
        years = np.array([float(y) for y in rs.years])
    except ValueError:
        raise ConfigError("in", "file names must be numeric years for fitting") from None
    summary = {"years": [str(y) for y in rs.years], "fits": {}}
    for label in rs.labels:
        stem = _safe_label(label)
        values = np.array(rs.values[label])
        _write_csv(["t", "value"], ([t, v] for t, v in zip(years, values)),
                   str(out / f"series_{stem}.csv"))
        model = _fit(cfg, years, values)
        spec = spectral.spectrum(model)
        _write_csv(["k", "b", "d"], _coefficient_rows(model),
                   str(out / f"coefficients_{stem}.csv"))
        _write_csv(["k", "V", "V_normalized"], _spectrum_rows(spec),
                   str(out / f"spectrum_{stem}.csv"))
        summary["fits"][label] = _fit_summary(model, spec)
    _write_json(summary, out / "summary.json")
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "fuzz": cmd_fuzz,
    "measure": cmd_measure,
    "fit": cmd_fit,
    "spectrum": cmd_spectrum,
    "pipeline": cmd_pipeline,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"helixfield {args.command}: invalid {exc}", file=sys.stderr)
        return 2
    except dynamics.IntegrationError as exc:
        print(f"helixfield {args.command}: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"helixfield {args.command}: I/O error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
