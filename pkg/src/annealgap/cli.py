"""Command-line driver: ``annealgap <command> [flags]``.

Every command writes one table (CSV or JSON) preceded by a self-describing
header: tool version, the full resolved configuration and the column schema.
Data sections are deterministic, so reruns with the same configuration are
byte-identical.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import __version__
from .catalysis import (
    exact_state,
    fit_gap_scaling,
    fit_kappa_c,
    quantum_width_scan,
    rayleigh_alpha_optimum,
    small_kappa_state,
)
from .continuum import lmg_barrier
from .doublewell import build_well, iso_gap_scan, solve_well
from .exceptions import AnnealGapError, ConfigError
from .pathfinder import build_graph, ridge_axis, shortest_schedule, tstar_scaling
from .spectrum import lowest_eigenpairs, pspin_summary, saddle_search, scan_landscape
from .spinspace import build_lmg_hamiltonian, spin_vector_stats

__all__ = ["RunConfig", "main", "parse_range", "parse_j_list", "COMMANDS"]

EXIT_OK, EXIT_IO, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
SCALING_FITS = ("kappa_c", "catalysed", "uncatalysed", "lmg", "tstar", "width")


def parse_range(text, name):
    """``a:b:n`` -> n evenly spaced values; a bare number -> one value."""
    try:
        parts = [p.strip() for p in str(text).split(":")]
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) != 3:
            raise ValueError
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"{name}: expected 'a:b:n' or a number, got {text!r}") from None
    if n < 1:
        raise ConfigError(f"{name}: grid must be nonempty (n={n})")
    if n > 1 and b <= a:
        raise ConfigError(f"{name}: need a < b for n > 1")
    return np.linspace(a, b, n)


def parse_j_list(text):
    """``25``, ``20,30,40`` or ``20:100:9``; returned sorted."""
    text = str(text)
    try:
        if ":" in text:
            values = parse_range(text, "j")
        else:
            values = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"j: cannot parse {text!r}") from None
    js = sorted(float(v) for v in values)
    if not js:
        raise ConfigError("j: empty list")
    for j in js:
        if j <= 0 or abs(2 * j - round(2 * j)) > 1e-9:
            raise ConfigError(f"j: {j} is not a positive half-integer")
    return [round(2 * j) / 2 for j in js]


@dataclass
class RunConfig:
    command: str
    j: str = "25"
    p: int = 3
    gamma_range: str = "0:1:21"
    kappa_range: str = "0:1:21"
    gz_range: str = "-1:1:21"
    xi_range: str = "0:4:41"
    beta_range: str = "1"
    alpha_range: str = "0.5:4:36"
    x: float = 1.0
    fit: str = "kappa_c"
    raster: int = 201
    out: str = "-"
    format: str = "csv"
    threads: int = 1

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if self.p < 2:
            raise ConfigError("p must be >= 2")
        if self.raster < 2:
            raise ConfigError("raster must be >= 2")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.fit not in SCALING_FITS:
            raise ConfigError(f"fit must be one of {SCALING_FITS}")
        self.j_list  # parse eagerly so bad input fails before any compute
        limits = {
            "gamma_range": (0.0, 1.0), "kappa_range": (0.0, 1.0), "gz_range": (-1.0, 1.0),
            "xi_range": (0.0, math.inf), "beta_range": (1e-300, math.inf), "alpha_range": (1e-300, math.inf),
        }
        for name, (lo, hi) in limits.items():
            grid = parse_range(getattr(self, name), name)
            if grid.min() < lo or grid.max() > hi:
                raise ConfigError(f"{name}: values must lie in [{lo:g}, {hi:g}]")
        return self

    @property
    def j_list(self):
        return parse_j_list(self.j)

    def grid(self, name):
        return parse_range(getattr(self, name), name)

    def echo(self):
        return asdict(self)


def _read_config_file(path):
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key=value")
                key, value = (s.strip() for s in line.split("=", 1))
                values[key.replace("-", "_")] = value
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return values


def build_config(args) -> RunConfig:
    names = {f.name: f for f in fields(RunConfig)}
    merged = {}
    if args.config:
        merged.update(_read_config_file(args.config))
    for key, value in vars(args).items():
        if key in names and value is not None:
            merged[key] = value
    unknown = set(merged) - set(names)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    kwargs = {}
    for key, value in merged.items():
        kind = names[key].type
        try:
            if kind in ("int", int):
                kwargs[key] = int(value)
            elif kind in ("float", float):
                kwargs[key] = float(value)
            else:
                kwargs[key] = str(value)
        except ValueError:
            raise ConfigError(f"{key}: cannot parse {value!r}") from None
    return RunConfig(**kwargs).validate()


# --- output -----------------------------------------------------------------

def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.11e}"
    return str(value)


def _json_value(value):
    text = _fmt(value)
    if isinstance(value, (float, np.floating)):
        v = float(text)
        return None if math.isnan(v) else (str(v) if math.isinf(v) else v)
    if isinstance(value, (bool, np.bool_, int, np.integer)):
        return int(text)
    return text


def render(config: RunConfig, columns, rows) -> str:
    header = [
        f"# annealgap {__version__}",
        f"# command: {config.command}",
        "# config: " + " ".join(f"{k}={v}" for k, v in sorted(config.echo().items())),
        "# columns: " + ",".join(columns),
    ]
    if config.format == "csv":
        body = [",".join(columns)] + [",".join(_fmt(v) for v in row) for row in rows]
        return "\n".join(header + body) + "\n"
    doc = {
        "version": __version__,
        "command": config.command,
        "config": config.echo(),
        "columns": list(columns),
        "data": {c: [_json_value(row[i]) for row in rows] for i, c in enumerate(columns)},
    }
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


def write_output(config, columns, rows, stdout=None):
    text = render(config, columns, rows)
    if config.out == "-":
        (stdout or sys.stdout).write(text)
        return
    try:
        with open(config.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {config.out}: {exc.strerror}") from exc


@contextmanager
def worker_pool(threads):
    """A parallel map sized by the config; plain ``map`` for one worker."""
    if threads <= 1:
        yield map
        return
    with ProcessPoolExecutor(max_workers=threads) as pool:
        yield lambda fn, items: list(pool.map(fn, items, chunksize=8))


# --- commands -----------------------------------------------------------------

def cmd_pairing(config, pmap):
    beta = float(config.grid("beta_range")[0])
    columns = ["xi1"] + [f"eps{k}_{s}" for k in range(4) for s in ("plus", "minus")]
    rows = []
    for xi in config.grid("xi_range"):
        spec = solve_well(build_well(xi, beta1=beta), 8)
        rows.append([xi, *spec.epsilon])
    return columns, rows


def cmd_isogap(config, pmap):
    scan = iso_gap_scan(config.grid("xi_range"), config.grid("beta_range"), pmap=pmap)
    rows = [[x, b, scan.gap_ratio[a, c], scan.beta_star[a]]
            for a, x in enumerate(scan.xi1) for c, b in enumerate(scan.beta)]
    return ["xi1", "beta", "gap_ratio", "beta_star"], rows


def cmd_landscape(config, pmap):
    rows = []
    for j in config.j_list:
        land = scan_landscape(j, config.p, config.grid("gamma_range"), config.grid("kappa_range"),
                              k=3, pmap=pmap)
        for a, g in enumerate(land.gamma_axis):
            for b, k in enumerate(land.kappa_axis):
                s = land.summaries[a, b]
                rows.append([j, g, k, s.eigenvalues[0], s.delta01, s.delta02])
    return ["j", "Gamma", "kappa", "E0", "delta01", "delta02"], rows


def cmd_saddle(config, pmap):
    rows = []
    for j in config.j_list:
        r = saddle_search(j, config.p, pmap=pmap)
        rows.append([j, r.gamma_c, r.kappa_c, r.gap, r.clamped])
    return ["j", "Gamma_c", "kappa_c", "delta_c", "clamped"], rows


def cmd_scaling(config, pmap):
    js = config.j_list
    kind = config.fit
    if kind == "kappa_c":
        fit = fit_kappa_c(js, config.p, pmap=pmap)
        scaled = fit.y * np.sqrt(fit.x)
    elif kind in ("catalysed", "uncatalysed"):
        fit = fit_gap_scaling(js, catalysed=kind == "catalysed", p=config.p, pmap=pmap)
        scaled = fit.y * fit.x**2 if kind == "catalysed" else fit.y
    elif kind == "lmg":
        fit = fit_gap_scaling(js, model="lmg", pmap=pmap)
        scaled = fit.y * (2 * fit.x) ** (4.0 / 3.0)
    elif kind == "tstar":
        fit = tstar_scaling(js, config.raster, config.p, pmap=pmap)
        scaled = fit.y
    else:
        fit = quantum_width_scan(config.grid("kappa_range"), js[-1], config.p, pmap=pmap)
        scaled = fit.y
    rows = [[x, y, s, fit.exponent, fit.coefficient, fit.residual] for x, y, s in zip(fit.x, fit.y, scaled)]
    return ["x", "y", "scaled", "fit_exponent", "fit_coefficient", "fit_residual"], rows


def cmd_path(config, pmap):
    rows = []
    for j in config.j_list:
        land = scan_landscape(j, config.p, ridge_axis(config.raster),
                              np.linspace(0.0, 1.0, config.raster), k=2, pmap=pmap)
        result = shortest_schedule(build_graph(land))
        for step, ((g, k), t) in enumerate(zip(result.controls, result.cumulative)):
            rows.append([j, step, g, k, t])
    return ["j", "step", "Gamma", "kappa", "cumulative_time"], rows


def cmd_lmg(config, pmap):
    rows = []
    for j in config.j_list:
        for gx in config.grid("gamma_range"):
            barrier = float(lmg_barrier(gx)) if 0 < gx < 1 else float("nan")
            for gz in config.grid("gz_range"):
                s = lowest_eigenpairs(build_lmg_hamiltonian(j, gx, gz), 3, vectors=False)
                rows.append([j, gx, gz, s.delta01, s.delta02, barrier])
    return ["j", "Gamma_x", "Gamma_z", "delta01", "delta02", "barrier"], rows


def cmd_asymptotics(config, pmap):
    rows = []
    j = config.j_list[-1]
    for k in config.grid("kappa_range"):
        approx = small_kappa_state(k, config.x, j).as_dict()
        exact = exact_state(k, config.x, j).as_dict()
        for name in approx:
            rows.append([k, name, approx[name], exact[name], exact[name] - approx[name]])
    return ["kappa", "quantity", "asymptotic", "exact", "residual"], rows


def cmd_rayleigh(config, pmap):
    opt = rayleigh_alpha_optimum(config.grid("alpha_range"))
    rows = [[a, v / (a * a), v, opt.alpha, opt.gap_coefficient] for a, v in zip(opt.alpha_grid, opt.values)]
    return ["alpha", "gap_ratio", "gap_ratio_alpha2", "alpha_star", "gap_coefficient"], rows


def cmd_spinstats(config, pmap):
    rows = []
    kappa = float(config.grid("kappa_range")[0])
    for j in config.j_list:
        for g in config.grid("gamma_range"):
            state = pspin_summary(j, config.p, g, kappa, k=1, vectors=True).ground_state
            st = spin_vector_stats(state, j)
            rows.append([j, g, kappa, st.r, st.theta, st.delta_r])
    return ["j", "Gamma", "kappa", "r", "theta", "delta_r"], rows


COMMANDS = {
    "pairing": cmd_pairing,
    "isogap": cmd_isogap,
    "landscape": cmd_landscape,
    "saddle": cmd_saddle,
    "scaling": cmd_scaling,
    "path": cmd_path,
    "lmg": cmd_lmg,
    "asymptotics": cmd_asymptotics,
    "rayleigh": cmd_rayleigh,
    "spinstats": cmd_spinstats,
}


def make_parser():
    parser = argparse.ArgumentParser(prog="annealgap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key=value file; flags override it")
        p.add_argument("--j", help="spin size(s): 25, 20,30,40 or a:b:n")
        p.add_argument("--p", type=int)
        p.add_argument("--gamma-range", dest="gamma_range")
        p.add_argument("--kappa-range", dest="kappa_range")
        p.add_argument("--gz-range", dest="gz_range", help="longitudinal field grid (lmg)")
        p.add_argument("--xi-range", dest="xi_range")
        p.add_argument("--beta-range", dest="beta_range")
        p.add_argument("--alpha-range", dest="alpha_range")
        p.add_argument("--x", type=float, help="sweet-spot parameter (asymptotics)")
        p.add_argument("--fit", choices=SCALING_FITS, help="which law to fit (scaling)")
        p.add_argument("--raster", type=int)
        p.add_argument("--out")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--threads", type=int)
    return parser


def main(argv=None, stdout=None):
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse usage errors
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        config = build_config(args)
        with worker_pool(config.threads) as pmap:
            columns, rows = COMMANDS[config.command](config, pmap)
        write_output(config, columns, rows, stdout)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (AnnealGapError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
