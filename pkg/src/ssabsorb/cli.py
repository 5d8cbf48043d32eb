"""Command-line front end: read a TOML model file, evaluate, write CSV.

    ssabsorb <command> --config FILE [--out FILE] [--seed N] [--paths N]

Commands: constants, survival, density, laplace, exit, mc, validate.

Config layout::

    [model]
    alpha = 1.0
    bbar = 1.0          # or drift = 1.0 for the linear drift b
    sigma = 0.0
    kill_q = 0.0

    [model.jumps]
    type = "exp_mixture"   # "none" | "exp_mixture" | "tabulated"
    rates = [0.5]
    intensities = [1.0]
    # tabulated: file = "jumps.csv" (columns r,density, r < 0), tail_rate = 2.0

    [grid]
    start = 0.5
    stop = 50.0
    count = 32
    spacing = "log"     # or "linear"
    derivative = 0      # density only: order m of s^(m)

    [tolerances]
    series = 1e-11

    [exit]
    level_a = 2.0
    lambda = -1.0
    start_x = 0.5       # omit to use the [grid] values as starting points
    rho = 0.0

    [laplace]
    x = 1.0             # the grid is r

    [mc]
    paths = 200000
    dt = 1e-4
    seed = 20240607

    [output]
    path = "out.csv"

Exit codes: 0 success, 2 config error, 3 numeric error, 4 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import re
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ModelError, SsabsorbError
from .levy_model import BoundedVariation, ExpMixture, LevyModel, NoJumps, TabulatedDensity

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

COMMANDS = ("constants", "survival", "density", "laplace", "exit", "mc", "validate")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_VALIDATION = 4


class ConfigError(SsabsorbError, ValueError):
    """Schema violation in a config file; ``line`` is 1-based or None."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass(frozen=True)
class Grid:
    start: float
    stop: float
    count: int
    spacing: str = "log"

    def points(self):
        if self.count == 1:
            return [self.start]
        if self.spacing == "log":
            pts = np.geomspace(self.start, self.stop, self.count)
        else:
            pts = np.linspace(self.start, self.stop, self.count)
        return [float(p) for p in pts]


@dataclass(frozen=True)
class RunConfig:
    model: LevyModel
    command: str = "survival"
    grid: Grid | None = None
    derivative: int = 0
    series_tol: float = 1e-11
    mc: dict = field(default_factory=dict)
    exit: dict = field(default_factory=dict)
    laplace_x: float = 1.0
    output_path: str | None = None


# -- parsing -------------------------------------------------------------------------

_SECTION = re.compile(r"^\s*\[\s*([A-Za-z0-9_.]+)\s*\]")
_KEY = re.compile(r"^\s*([A-Za-z0-9_]+)\s*=")


def _line_index(text):
    """{(section, key): line} and {section: line} from a scan of the raw text."""
    keys, sections = {}, {}
    section = ""
    for no, raw in enumerate(text.splitlines(), start=1):
        m = _SECTION.match(raw)
        if m:
            section = m.group(1)
            sections.setdefault(section, no)
            continue
        m = _KEY.match(raw)
        if m:
            keys.setdefault((section, m.group(1)), no)
    return keys, sections


class _Reader:
    def __init__(self, data, text):
        self.data = data
        self.keys, self.sections = _line_index(text)

    def line(self, section, key=None):
        if key is not None and (section, key) in self.keys:
            return self.keys[(section, key)]
        return self.sections.get(section)

    def fail(self, section, key, message):
        where = f"[{section}] {key}" if key else f"[{section}]"
        raise ConfigError(f"{where}: {message}", self.line(section, key))

    def table(self, section, required=False):
        node = self.data
        for part in section.split("."):
            node = node.get(part) if isinstance(node, dict) else None
            if node is None:
                if required:
                    raise ConfigError(f"missing section [{section}]")
                return None
        if not isinstance(node, dict):
            self.fail(section, None, "must be a table")
        return node

    def number(self, tab, section, key, default=None, required=False, positive=False,
               nonnegative=False):
        if key not in tab:
            if required:
                raise ConfigError(f"[{section}] missing required key '{key}'", self.line(section))
            return default
        v = tab[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            self.fail(section, key, f"must be a number, got {v!r}")
        v = float(v)
        if not math.isfinite(v):
            self.fail(section, key, "must be finite")
        if positive and not v > 0:
            self.fail(section, key, f"must be > 0, got {v!r}")
        if nonnegative and v < 0:
            self.fail(section, key, f"must be >= 0, got {v!r}")
        return v

    def integer(self, tab, section, key, default=None, minimum=None):
        if key not in tab:
            return default
        v = tab[key]
        if isinstance(v, bool) or not isinstance(v, int):
            self.fail(section, key, f"must be an integer, got {v!r}")
        if minimum is not None and v < minimum:
            self.fail(section, key, f"must be >= {minimum}, got {v}")
        return v

    def numbers(self, tab, section, key):
        v = tab.get(key)
        if not isinstance(v, list) or not v:
            self.fail(section, key, "must be a non-empty array of numbers")
        out = []
        for x in v:
            if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x) or not x > 0:
                self.fail(section, key, f"entries must be finite numbers > 0, got {x!r}")
            out.append(float(x))
        return out


def _read_table_file(path):
    r, f = [], []
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ConfigError(f"cannot read tabulated density file {path}: {exc.strerror}") from exc
    for i, row in enumerate(rows, start=1):
        if not row or row[0].lstrip().startswith("#"):
            continue
        try:
            a, b = float(row[0]), float(row[1])
        except (ValueError, IndexError):
            if i == 1:
                continue  # header
            raise ConfigError(f"{path} row {i}: expected two numbers r,density") from None
        r.append(a)
        f.append(b)
    return r, f


def _parse_jumps(rd: _Reader, base_dir):
    sec = "model.jumps"
    tab = rd.table(sec)
    if tab is None:
        return NoJumps()
    kind = tab.get("type", "none")
    if kind == "none":
        return NoJumps()
    if kind == "exp_mixture":
        rates = rd.numbers(tab, sec, "rates")
        intens = rd.numbers(tab, sec, "intensities")
        if len(rates) != len(intens):
            rd.fail(sec, "intensities", f"needs {len(rates)} entries to match rates")
        return ExpMixture(tuple(rates), tuple(intens))
    if kind == "tabulated":
        name = tab.get("file")
        if not isinstance(name, str) or not name:
            rd.fail(sec, "file", "tabulated jumps need a file path")
        tail = rd.number(tab, sec, "tail_rate", required=True, positive=True)
        path = Path(name)
        if not path.is_absolute():
            path = Path(base_dir) / path
        r, f = _read_table_file(path)
        try:
            return TabulatedDensity(tuple(r), tuple(f), tail)
        except ModelError as exc:
            rd.fail(sec, "file", str(exc))
    rd.fail(sec, "type", f"must be 'none', 'exp_mixture' or 'tabulated', got {kind!r}")


def _parse_model(rd: _Reader, base_dir):
    sec = "model"
    tab = rd.table(sec, required=True)
    alpha = rd.number(tab, sec, "alpha", required=True, positive=True)
    sigma = rd.number(tab, sec, "sigma", default=0.0, nonnegative=True)
    kill_q = rd.number(tab, sec, "kill_q", default=0.0, nonnegative=True)
    if ("bbar" in tab) == ("drift" in tab):
        raise ConfigError("[model] give exactly one of 'bbar' or 'drift'", rd.line(sec))
    measure = _parse_jumps(rd, base_dir)
    key = "bbar" if "bbar" in tab else "drift"
    v = rd.number(tab, sec, key, required=True)
    try:
        if key == "bbar":
            return LevyModel(v, sigma, measure, kill_q, alpha)
        return LevyModel.from_drift(v, sigma, measure, kill_q, alpha)
    except ModelError as exc:
        rd.fail(sec, key, str(exc))


def _parse_grid(rd: _Reader):
    sec = "grid"
    tab = rd.table(sec)
    if tab is None:
        return None, 0
    start = rd.number(tab, sec, "start", required=True, positive=True)
    stop = rd.number(tab, sec, "stop", default=start, positive=True)
    count = rd.integer(tab, sec, "count", default=1, minimum=1)
    spacing = tab.get("spacing", "log")
    if spacing not in ("log", "linear"):
        rd.fail(sec, "spacing", f"must be 'log' or 'linear', got {spacing!r}")
    if count > 1 and not stop > start:
        rd.fail(sec, "stop", "must exceed start when count > 1")
    m = rd.integer(tab, sec, "derivative", default=0, minimum=0)
    return Grid(start, stop, count, spacing), m


_MC_KEYS = {
    "paths": "int", "dt": "pos", "horizon": "pos", "seed": "seed",
    "small_jump_cutoff": "pos", "eps_tail": "pos", "h_max": "pos",
}


def _parse_mc(rd: _Reader):
    sec = "mc"
    tab = rd.table(sec) or {}
    out = {}
    for key, v in tab.items():
        kind = _MC_KEYS.get(key)
        if kind is None:
            rd.fail(sec, key, f"unknown key; expected one of {', '.join(_MC_KEYS)}")
        if kind == "int":
            out[key] = rd.integer(tab, sec, key, minimum=1000)
        elif kind == "seed":
            s = rd.integer(tab, sec, key, minimum=0)
            if s >= 2 ** 64:
                rd.fail(sec, key, "must fit in 64 bits")
            out[key] = s
        else:
            out[key] = rd.number(tab, sec, key, positive=True)
    return out


def _parse_exit(rd: _Reader):
    sec = "exit"
    tab = rd.table(sec)
    if tab is None:
        return {}
    out = {
        "level_a": rd.number(tab, sec, "level_a", required=True, positive=True),
        "lam": rd.number(tab, sec, "lambda", required=True),
        "start_x": rd.number(tab, sec, "start_x", positive=True),
        "rho": rd.number(tab, sec, "rho", default=0.0),
    }
    if out["lam"] == 0:
        rd.fail(sec, "lambda", "must be nonzero")
    absorbed = tab.get("absorbed", True)
    if not isinstance(absorbed, bool):
        rd.fail(sec, "absorbed", "must be true or false")
    out["absorbed"] = absorbed
    return out


def parse_config(text, base_dir=".", command="survival"):
    """Parse and validate a TOML config; raises ConfigError with a line number."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise ConfigError(f"not valid TOML: {exc}", int(m.group(1)) if m else None) from None
    rd = _Reader(data, text)
    model = _parse_model(rd, base_dir)
    grid, m = _parse_grid(rd)
    tol_tab = rd.table("tolerances") or {}
    tol = rd.number(tol_tab, "tolerances", "series", default=1e-11, positive=True)
    lap = rd.table("laplace") or {}
    lap_x = rd.number(lap, "laplace", "x", default=1.0, positive=True)
    out_tab = rd.table("output") or {}
    out_path = out_tab.get("path")
    if out_path is not None and not isinstance(out_path, str):
        rd.fail("output", "path", "must be a string")
    return RunConfig(model, command, grid, m, tol, _parse_mc(rd), _parse_exit(rd), lap_x, out_path)


# -- commands -----------------------------------------------------------------------------


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _table(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _need_grid(cfg: RunConfig):
    if cfg.grid is None:
        raise ConfigError(f"command '{cfg.command}' needs a [grid] section")
    return cfg.grid.points()


def _law(cfg):
    from .absorption import AbsorptionLaw

    return AbsorptionLaw(cfg.model, tol=cfg.series_tol)


def cmd_constants(cfg: RunConfig):
    law = _law(cfg)
    h = law.handle
    regime = h.classify_regime()
    rows = []
    if isinstance(regime, BoundedVariation):
        rows.append(("regime", "bounded_variation", ""))
        rows.append(("regime_b", regime.b, 0.0))
    else:
        rows.append(("regime", "unbounded_variation", ""))
    gerr = 1e-13 * max(1.0, abs(law.gamma))
    rows.append(("phi_q" if cfg.model.kill_q > 0 else "theta", law.gamma, gerr))
    rows.append(("gamma", law.gamma, gerr))
    rows.append(("alpha_tilde_gamma", law.alpha_tilde_gamma, gerr / law.alpha))
    rows.append(("c_gamma", law.c_gamma, law.kesten_error()))
    return _table(("quantity", "value", "err_bound"), rows)


def cmd_survival(cfg: RunConfig, with_m=False):
    law = _law(cfg)
    m = cfg.derivative
    rows = []
    for t in _need_grid(cfg):
        S = law.survival(t)
        s = law.density(t, m)
        row = [t, S.value, s.value, S.method if S.method == s.method else f"{S.method}+{s.method}",
               max(S.trunc_order, s.trunc_order), max(S.err_bound, s.err_bound)]
        if with_m:
            row.append(m)
        rows.append(row)
    header = ["t", "S", "s", "method", "trunc_order", "err_bound"]
    if with_m:
        header.append("m")
    return _table(header, rows)


def cmd_density(cfg: RunConfig):
    return cmd_survival(cfg, with_m=cfg.derivative > 0)


def cmd_laplace(cfg: RunConfig):
    law = _law(cfg)
    rows = []
    for r in _need_grid(cfg):
        rep = law.laplace(r, cfg.laplace_x)
        rows.append((r, cfg.laplace_x, rep.value, rep.method, rep.trunc_order, rep.err_bound))
    return _table(("r", "x", "laplace", "method", "trunc_order", "err_bound"), rows)


def _exit_specs(cfg: RunConfig):
    from .absorption import ExitSpec

    e = cfg.exit
    if not e:
        raise ConfigError("command 'exit' needs an [exit] section")
    if e.get("start_x") is not None:
        xs = [e["start_x"]]
    elif cfg.grid is not None:
        xs = cfg.grid.points()
    else:
        raise ConfigError("[exit] needs start_x or a [grid] of starting points")
    out = []
    for x in xs:
        try:
            out.append(ExitSpec(e["lam"], e["level_a"], x, cfg.model.alpha))
        except SsabsorbError as exc:
            raise ConfigError(f"[exit] {exc}") from None
    return out


def cmd_exit(cfg: RunConfig):
    law = _law(cfg)
    e = cfg.exit
    rows = []
    for spec in _exit_specs(cfg):
        rep = law.exit_mellin(spec, rho=e["rho"], absorbed=e["absorbed"])
        rows.append((spec.start_x, rep.value, rep.method, rep.trunc_order, rep.err_bound))
    return _table(("x", "value", "method", "trunc_order", "err_bound"), rows)


def _mc_config(cfg: RunConfig):
    from .mc import MCConfig

    try:
        return MCConfig(**cfg.mc)
    except SsabsorbError as exc:
        raise ConfigError(f"[mc] {exc}") from None


def cmd_mc(cfg: RunConfig):
    from .mc import estimate_survival

    mcfg = _mc_config(cfg)
    law = _law(cfg)
    ts = _need_grid(cfg)
    rows = []
    for t, est in zip(ts, estimate_survival(cfg.model, mcfg, ts)):
        ref = law.survival(t).value
        z = (est.value - ref) / est.std_err if est.std_err > 0 else (0.0 if est.value == ref else math.inf)
        rows.append((t, est.value, est.std_err, est.truncation_bias_bound, ref, z))
    return _table(("t", "mc_value", "std_err", "bias_bound", "analytic", "z_score"), rows)


HANDLERS = {
    "constants": cmd_constants,
    "survival": cmd_survival,
    "density": cmd_density,
    "laplace": cmd_laplace,
    "exit": cmd_exit,
    "mc": cmd_mc,
}


def run(cfg: RunConfig, out=None):
    """Execute one command; returns (exit code, text written)."""
    text = HANDLERS[cfg.command](cfg)
    path = out or cfg.output_path
    if path:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK, text


def run_validate(mc_paths, seed, out=None):
    from .validation import run_all

    results = run_all(mc_paths=mc_paths, seed=seed)
    lines = [r.line() for r in results]
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VALIDATION


def _parser():
    p = argparse.ArgumentParser(prog="ssabsorb", description="Absorption-time laws of pssMps.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="TOML model file (optional for validate)")
    p.add_argument("--out", help="write the CSV here instead of stdout")
    p.add_argument("--seed", type=int, help="Monte Carlo seed (overrides [mc] seed)")
    p.add_argument("--paths", type=int, help="Monte Carlo path count (overrides [mc] paths)")
    return p


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        if args.command == "validate":
            seed = 20240607 if args.seed is None else args.seed
            return run_validate(args.paths or 200_000, seed, args.out)
        if not args.config:
            raise ConfigError(f"command '{args.command}' needs --config")
        path = Path(args.config)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
        cfg = parse_config(text, base_dir=path.parent, command=args.command)
        mc = dict(cfg.mc)
        if args.seed is not None:
            mc["seed"] = args.seed
        if args.paths is not None:
            mc["paths"] = args.paths
        cfg = replace(cfg, mc=mc)
        code, _ = run(cfg, args.out)
        return code
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SsabsorbError, ArithmeticError, ValueError) as exc:
        print(f"numeric error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
