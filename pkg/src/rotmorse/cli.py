"""Batch command-line front end: ``rotmorse {eigen,evolve,wigner,scan,fit,angle}``.

Every subcommand writes plain-text tables with a commented header carrying
the library version, a SHA-256 of the result-relevant configuration, units
and grid metadata. Without ``--out`` the table goes to stdout; with it, one
file per result is written into that directory (plus PNG figures under
``--plot``).
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .coherent import cs_weights, detect_peaks, evolve, periods
from .eigen import build_basis, default_grid
from .errors import (
    ConfigError,
    DomainError,
    GridMismatchError,
    ModelError,
    NumericalToleranceError,
    ResolutionError,
)
from .phase_space import wigner
from .rotation import REFERENCE_ANGLES, find_angle
from .rotor import load_molecule, rotor_constants
from .sensitivity import REFERENCE_JS, find_minima, scaling_fit, sensitivity_scan, tile_area

log = logging.getLogger("rotmorse")

EXIT_OK, EXIT_CONFIG, EXIT_MODEL, EXIT_NUMERICAL = 0, 2, 3, 4
NORM_TOL, PURITY_TOL = 1e-6, 1e-4


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Everything that determines a run's numbers.

    ``output`` and ``threads`` do not change results and are left out of
    the configuration hash.
    """

    molecule: str = "i2"
    j: tuple[int, ...] = (0,)
    alpha: float = 1.6
    time_fraction: Fraction = Fraction(1, 4)
    grid_n: int | None = None
    grid_r: int = 512
    grid_p: int = 512
    equilibrium: str = "semianalytic"
    output: Path | None = None
    threads: int = 1
    extras: tuple = ()

    def hashed(self) -> dict:
        d = {
            "molecule": self.molecule,
            "j": list(self.j),
            "alpha": self.alpha,
            "time": f"{self.time_fraction.numerator}/{self.time_fraction.denominator}",
            "grid_n": self.grid_n,
            "grid_r": self.grid_r,
            "grid_p": self.grid_p,
            "equilibrium": self.equilibrium,
        }
        d.update(dict(self.extras))
        return d

    def digest(self) -> str:
        blob = json.dumps(self.hashed(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def parse_time(text: str) -> Fraction:
    """'p/q' in lowest terms (or an integer) as a fraction of T_rev."""
    try:
        if "/" in text:
            p, q = (int(x) for x in text.split("/"))
        else:
            p, q = int(text), 1
    except ValueError:
        raise ConfigError(f"time must look like p/q, got {text!r}") from None
    if q <= 0 or p < 0:
        raise ConfigError(f"time must be a non-negative fraction, got {text!r}")
    if math.gcd(p, q) != 1 and p != 0:
        raise ConfigError(f"time {text} is not in lowest terms")
    return Fraction(p, q)


def parse_js(text: str) -> tuple[int, ...]:
    """'82', '0..160', '0..160:2' or a comma list of those."""
    out: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                rng, _, step = part.partition(":")
                lo, hi = (int(x) for x in rng.split(".."))
                out.extend(range(lo, hi + 1, int(step) if step else 1))
            else:
                out.append(int(part))
    except ValueError:
        raise ConfigError(f"cannot parse j specification {text!r}") from None
    if not out or min(out) < 0:
        raise ConfigError(f"j values must be non-negative integers, got {text!r}")
    return tuple(sorted(set(out)))


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def _row(values) -> str:
    return "\t".join(_fmt(v) if not isinstance(v, str) else v for v in values)


def _tag(frac: Fraction) -> str:
    return f"{frac.numerator}-{frac.denominator}"


class Emitter:
    """Collects output documents and writes them to stdout or --out."""

    def __init__(self, cfg: RunConfig, command: str, plot: bool):
        self.cfg = cfg
        self.command = command
        self.plot = plot
        if plot and cfg.output is None:
            raise ConfigError("--plot needs --out DIR")
        if cfg.output is not None:
            cfg.output.mkdir(parents=True, exist_ok=True)

    def header(self, *lines: str) -> list[str]:
        head = [
            f"# rotmorse {__version__} {self.command}",
            f"# config-sha256 {self.cfg.digest()}",
            f"# config {json.dumps(self.cfg.hashed(), sort_keys=True)}",
            "# units: r bohr, p and E atomic units (hbar = 1), t atomic time units, angles radians unless /pi",
        ]
        return head + [f"# {line}" for line in lines]

    def emit(self, name: str, lines: list[str]) -> None:
        text = "\n".join(lines) + "\n"
        if self.cfg.output is None:
            sys.stdout.write(text)
        else:
            path = self.cfg.output / name
            path.write_text(text)
            print(path, file=sys.stderr)

    def figure(self, name: str, fn, *args, **kw) -> None:
        if self.plot:
            from . import plotting

            path = getattr(plotting, fn)(*args, path=self.cfg.output / name, **kw)
            print(path, file=sys.stderr)


def _basis(params, cfg: RunConfig, j: int):
    const = rotor_constants(params, j, cfg.equilibrium)
    grid = default_grid(const) if cfg.grid_n is None else default_grid(const, cfg.grid_n)
    return const, build_basis(const, grid)


def cmd_eigen(cfg: RunConfig, params, em: Emitter, args) -> None:
    for j in cfg.j:
        const, basis = _basis(params, cfg, j)
        g = basis.grid
        stride = max(1, math.ceil(g.size / cfg.grid_r))
        states = range(basis.n_max + 1) if args.states == "all" else parse_js(args.states)
        states = [n for n in states if n <= basis.n_max]
        lines = em.header(
            f"j={j} r_j={const.r_j:.12g} D_j={const.D_j:.12g} lambda_j={const.lambda_j:.12g} "
            f"lambda_bar_j={const.lambda_bar_j:.12g} n_max={basis.n_max}",
            f"c0={const.c0:.12g} c1={const.c1:.12g} c2={const.c2:.12g}",
            f"grid: {g.size} points on [{g.points[0]:.12g}, {g.points[-1]:.12g}], step {g.step:.6g}, "
            f"rows every {stride}",
            "[levels] columns: n\ts\tE_n",
        )
        lines += [_row((st.n, st.s, st.energy)) for st in basis.states]
        lines += ["", "# [wavefunctions] columns: r\t" + "\t".join(f"psi_{n}" for n in states)]
        for i in range(0, g.size, stride):
            lines.append(_row([g.points[i]] + [basis.psi[n, i] for n in states]))
        em.emit(f"eigen_j{j}.tsv", lines)
        em.figure(f"eigen_j{j}.png", "plot_eigen", basis)


def cmd_evolve(cfg: RunConfig, params, em: Emitter, args) -> None:
    frac = cfg.time_fraction
    for j in cfg.j:
        const, basis = _basis(params, cfg, j)
        t_cl, t_rev = periods(const)
        pk = evolve(basis, cs_weights(basis, cfg.alpha), float(frac) * t_rev)
        _check_norm(pk.norm(), f"packet norm j={j}")
        peaks = detect_peaks(pk)
        lines = em.header(
            f"j={j} T_cl={t_cl:.12g} T_rev={t_rev:.12g} t={pk.time:.12g} norm={pk.norm():.12g}",
            "peaks (r, density): " + " ".join(f"({x:.6f}, {y:.6g})" for x, y in peaks),
            "columns: r\tdensity\tre_phi\tim_phi",
        )
        lines += [
            _row((r, d, a.real, a.imag)) for r, d, a in zip(pk.r, pk.density, pk.amplitudes)
        ]
        em.emit(f"evolve_j{j}_t{_tag(frac)}.tsv", lines)
        em.figure(
            f"evolve_j{j}_t{_tag(frac)}.png",
            "plot_density",
            pk.r,
            pk.density,
            title=f"j = {j}, t = {frac} T_rev",
            peaks=peaks,
        )


def _check_norm(value: float, what: str, tol: float = NORM_TOL) -> None:
    if abs(value - 1.0) > tol:
        raise NumericalToleranceError(f"{what} = {value:.10g} misses 1 by more than {tol:g}")


def _preview(field, width=64, height=24) -> str:
    chars = " .:-=+*#%@"
    v = field.values
    ri = np.linspace(0, v.shape[0] - 1, width).astype(int)
    pi_ = np.linspace(0, v.shape[1] - 1, height).astype(int)[::-1]
    vmax = np.abs(v).max()
    rows = []
    for k in pi_:
        line = ""
        for i in ri:
            x = v[i, k] / vmax
            line += chars[min(int(abs(x) * len(chars)), len(chars) - 1)] if x >= 0 else ("~" if x < -0.1 else " ")
        rows.append(line)
    return "\n".join(rows)


def cmd_wigner(cfg: RunConfig, params, em: Emitter, args) -> None:
    frac = cfg.time_fraction
    for j in cfg.j:
        const, basis = _basis(params, cfg, j)
        pk = evolve(basis, cs_weights(basis, cfg.alpha), float(frac) * periods(const)[1])
        field = wigner(pk, grid_r=cfg.grid_r, grid_p=cfg.grid_p)
        _check_norm(field.norm(), f"Wigner norm j={j}")
        _check_norm(field.purity(), f"Wigner purity j={j}", PURITY_TOL)
        try:
            tile = f"{tile_area(field):.6g}"
        except ModelError as exc:
            tile = f"n/a ({exc})"
        lines = em.header(
            f"j={j} t={frac} T_rev norm={field.norm():.10g} purity={field.purity():.10g} "
            f"min_W={field.values.min():.6g} max_W={field.values.max():.6g} tile_area={tile}",
            f"r axis: {field.r_axis.size} points [{field.r_axis[0]:.10g}, {field.r_axis[-1]:.10g}] "
            f"step {field.dr:.6g}; p axis: {field.p_axis.size} points "
            f"[{field.p_axis[0]:.10g}, {field.p_axis[-1]:.10g}] step {field.dp:.6g}",
            "gnuplot nonuniform matrix: first row N r_0..r_{N-1}; then p_k W(r_0,p_k)..W(r_{N-1},p_k)",
        )
        lines.append(_row([field.r_axis.size, *field.r_axis]))
        for k, p in enumerate(field.p_axis):
            lines.append(_row([p, *field.values[:, k]]))
        em.emit(f"wigner_j{j}_t{_tag(frac)}.dat", lines)
        if args.preview:
            print(_preview(field), file=sys.stderr)
        em.figure(f"wigner_j{j}_t{_tag(frac)}.png", "plot_wigner", field, title=f"j = {j}, t = {frac} T_rev")


def cmd_scan(cfg: RunConfig, params, em: Emitter, args) -> None:
    refs = _reference_js(args.reference_js)
    records = sensitivity_scan(
        params,
        cfg.j,
        cfg.time_fraction,
        cfg.alpha,
        reference_js=refs,
        threads=cfg.threads,
        equilibrium=cfg.equilibrium,
        n_points=cfg.grid_n,
        grid_p=cfg.grid_p,
    )
    minima = find_minima(records)
    lines = em.header(
        f"time {cfg.time_fraction} T_rev, alpha {cfg.alpha}; tile areas at j = {list(refs)}",
        "columns: j\tdelta_x\tdelta_p\taction\tinv_action\ttile_area\terror",
    )
    for rec in records:
        lines.append(
            _row((rec.j, rec.delta_x, rec.delta_p, rec.action, rec.inv_action, rec.tile_area, rec.error or ""))
        )
    lines += ["", "# [minima] interior local minima of inv_action", "# columns: j\tinv_action\tj_refined"]
    lines += [_row(m) for m in minima]
    name = f"scan_t{_tag(cfg.time_fraction)}"
    em.emit(f"{name}.tsv", lines)
    em.figure(f"{name}.png", "plot_scan", records, minima, title=f"t = {cfg.time_fraction} T_rev")


def _reference_js(text: str | None) -> tuple[int, ...]:
    if not text:
        return ()
    if text == "default":
        return REFERENCE_JS
    return parse_js(text)


def read_scan(path: Path) -> list[tuple[float, float, int]]:
    """(inv_action, tile_area, j) rows with a tile area from a scan table."""
    rows = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            continue
        if not line.strip():
            break
        cols = line.split("\t")
        if len(cols) < 6:
            raise ConfigError(f"{path}: not a scan table (row {line[:40]!r})")
        if cols[5]:
            rows.append((float(cols[4]), float(cols[5]), int(cols[0])))
    return rows


def cmd_fit(cfg: RunConfig, params, em: Emitter, args) -> None:
    if not args.input:
        raise ConfigError("fit needs --input SCAN_TABLE (one or more)")
    rows = []
    for path in args.input:
        if not Path(path).is_file():
            raise ConfigError(f"no such scan table: {path}")
        rows += read_scan(path)
    rows.sort(key=lambda r: r[2])
    fit = scaling_fit([(x, y) for x, y, _ in rows], min_span=args.min_span)
    lines = em.header(
        f"inputs: {', '.join(str(p) for p in args.input)}",
        "log(tile) = slope * log(1/A) + intercept; factor = least-squares c in tile = c / A",
        "columns: slope\tintercept\tfactor\tresidual\tn",
    )
    lines.append(_row((fit.slope, fit.intercept, fit.factor, fit.residual, fit.n)))
    lines += ["", "# [points] columns: j\tinv_action\ttile_area\ttile_times_action"]
    lines += [_row((j, x, y, y / x)) for x, y, j in rows]
    em.emit("fit.tsv", lines)
    em.figure("fit.png", "plot_fit", [(x, y) for x, y, _ in rows], fit)


def cmd_angle(cfg: RunConfig, params, em: Emitter, args) -> None:
    if args.reference_angles:
        jobs = [(fam, frac, j, ref) for fam, frac, j, ref in REFERENCE_ANGLES]
    else:
        jobs = [("", cfg.time_fraction, j, None) for j in cfg.j]

    def one(job):
        return find_angle(params, job[2], job[1], cfg.alpha, equilibrium=cfg.equilibrium)

    with ThreadPoolExecutor(max_workers=max(1, cfg.threads)) as pool:
        estimates = list(pool.map(one, jobs))
    lines = em.header("columns: family\tj\ttime\tphi_over_pi\tpeak_overlap\textra_over_pi\treference_over_pi\tdiff_over_pi")
    for (fam, frac, j, ref), est in zip(jobs, estimates):
        diff = None if ref is None else est.phi_over_pi - ref
        lines.append(
            _row(
                (fam or "-", j, f"{frac.numerator}/{frac.denominator}", est.phi_over_pi, est.peak_overlap,
                 est.extra_rotation / math.pi, ref, diff)
            )
        )
    em.emit("angles.tsv", lines)
    ref = {j: r for _, _, j, r in jobs if r is not None} or None
    em.figure("angles.png", "plot_angles", estimates, reference=ref)


COMMANDS = {
    "eigen": cmd_eigen,
    "evolve": cmd_evolve,
    "wigner": cmd_wigner,
    "scan": cmd_scan,
    "fit": cmd_fit,
    "angle": cmd_angle,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--molecule", default="i2", help="profile name or key=value parameter file (default: i2)")
    common.add_argument("--j", default=None, help="rotational level(s): 82, 0..160, 0..160:2 or a comma list")
    common.add_argument("--alpha", type=float, default=1.6, help="coherent-state parameter (default: 1.6)")
    common.add_argument("--time", default="1/4", help="time as a fraction p/q of the revival period (default: 1/4)")
    common.add_argument("--grid-n", type=int, default=None, help="intervals of the eigenbasis grid (default: 4096)")
    common.add_argument("--grid-r", type=int, default=512, help="max r samples in Wigner/eigen output (default: 512)")
    common.add_argument("--grid-p", type=int, default=512, help="p samples of Wigner fields (default: 512)")
    common.add_argument("--equilibrium", choices=("semianalytic", "numeric"), default="semianalytic")
    common.add_argument("--out", type=Path, default=None, help="output directory (default: stdout)")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="worker threads")
    common.add_argument("--plot", action="store_true", help="also render PNG figures into --out")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="rotmorse", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"rotmorse {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("eigen", parents=[common], help="bound-state energies and wavefunctions")
    p.add_argument("--states", default="0..3", help="wavefunction columns: n list/range or 'all' (default: 0..3)")
    sub.add_parser("evolve", parents=[common], help="coherent-state packet at a fraction of T_rev")
    p = sub.add_parser("wigner", parents=[common], help="Wigner field as a gnuplot matrix")
    p.add_argument("--preview", action="store_true", help="print a coarse text rendering to stderr")
    p = sub.add_parser("scan", parents=[common], help="1/action over j, tile areas at reference j")
    p.add_argument("--reference-js", default=None, help="j values that also get a tile area; 'default' for the six-level set")
    p = sub.add_parser("fit", parents=[common], help="scaling fit of tile area against 1/action")
    p.add_argument("--input", type=Path, nargs="+", help="scan table(s) with tile areas")
    p.add_argument("--min-span", type=float, default=1.05, help="smallest accepted max/min ratio of 1/action")
    p = sub.add_parser("angle", parents=[common], help="rotation angle of the j=0 packet onto level j")
    p.add_argument("--reference-angles", action="store_true", help="run the nine reference (family, time, j) cases")
    return parser


_DEFAULT_J = {"scan": "0..160", "angle": "82"}


def config_from_args(args) -> RunConfig:
    if args.alpha == 0 or not math.isfinite(args.alpha):
        raise ConfigError("alpha must be finite and nonzero")
    for flag in ("grid_r", "grid_p", "threads"):
        if getattr(args, flag) < 1:
            raise ConfigError(f"--{flag.replace('_', '-')} must be positive")
    if args.grid_n is not None and args.grid_n < 16:
        raise ConfigError("--grid-n must be at least 16")
    extras = {}
    for name in ("states", "reference_js", "reference_angles", "min_span"):
        if hasattr(args, name):
            extras[name] = getattr(args, name)
    if getattr(args, "input", None):
        extras["input"] = [hashlib.sha256(Path(p).read_bytes()).hexdigest() if Path(p).is_file() else str(p) for p in args.input]
    j_text = args.j if args.j is not None else _DEFAULT_J.get(args.command, "0")
    return RunConfig(
        molecule=args.molecule,
        j=parse_js(j_text),
        alpha=args.alpha,
        time_fraction=parse_time(args.time),
        grid_n=args.grid_n,
        grid_r=args.grid_r,
        grid_p=args.grid_p,
        equilibrium=args.equilibrium,
        output=args.out,
        threads=args.threads,
        extras=tuple(sorted(extras.items())),
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(args)
        params = load_molecule(cfg.molecule)
        em = Emitter(cfg, args.command, args.plot)
        COMMANDS[args.command](cfg, params, em, args)
    except (ConfigError, DomainError, GridMismatchError, ResolutionError) as exc:
        print(f"rotmorse: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ModelError, IndexError) as exc:
        print(f"rotmorse: model error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except NumericalToleranceError as exc:
        print(f"rotmorse: numerical tolerance: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
