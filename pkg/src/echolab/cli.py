"""Config-driven experiment runner.

Subcommands reproduce the laboratory's standard experiments at desk scale
and write plot-ready CSV data files (``.`` decimal separator, ``\\n`` line
endings, ``#``-prefixed metadata header lines) plus a run manifest.  Every
failure mode maps to a distinct exit code so scripted pipelines can react
per error class.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .config import apply_overrides, load_config, validate_config
from .errors import (
    AmbiguousTrackingError,
    CacheError,
    ConfigError,
    ConvergenceError,
    EchoLabError,
    GridLeakageError,
    IncompleteBasisError,
    InsufficientBoundStatesError,
    InvalidParameterError,
    NoMinimumError,
    QuadratureError,
    StepSizeError,
    TruncationError,
    UnsupportedSymmetryError,
)
from .store import CacheEntry, Store, canonical_text

EXIT_CODES = [
    (ConfigError, 2),
    (IncompleteBasisError, 3),
    (ConvergenceError, 4),
    (QuadratureError, 5),
    (TruncationError, 6),
    (GridLeakageError, 7),
    (InsufficientBoundStatesError, 8),
    (StepSizeError, 9),
    (NoMinimumError, 10),
    (AmbiguousTrackingError, 11),
    (CacheError, 12),
    (InvalidParameterError, 13),
    (UnsupportedSymmetryError, 14),
    (EchoLabError, 1),
]


# ---------------------------------------------------------------------------
# deterministic CSV output
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path, columns, rows, header_lines=()) -> None:
    """CSV with '#'-prefixed metadata, '.' decimals, '\\n' endings,
    exact repr floats (deterministic byte-for-byte)."""
    with open(path, "w", newline="\n") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _config_header(experiment: str, cfg: dict):
    yield f"echolab {experiment}"
    for line in canonical_text(cfg).strip().split("\n"):
        yield f"config {line}"


# ---------------------------------------------------------------------------
# shared construction helpers
# ---------------------------------------------------------------------------


def _build_shape(section: dict):
    from .geometry import Circle, Rectangle, Stadium

    kind = section["type"]
    if kind == "stadium":
        return Stadium(section["r"], section["l"])
    if kind == "rectangle":
        return Rectangle(section["a"], section["b"])
    if kind == "circle":
        return Circle(section["R"])
    raise ConfigError(f"unknown shape type {kind!r}")


def _build_family(name: str):
    from .geometry import Dilation, Physical, Stretch

    if name == "dilation":
        return lambda s: Dilation(1.0 + s)
    if name == "stretch":
        return Stretch
    if name == "physical":
        return Physical
    raise ConfigError(f"unknown perturbation family {name!r}")


def _build_trap(section: dict):
    from .trap1d import EvanescentTrap, GaussianTrap, HarmonicTrap

    kind = section["type"]
    common = dict(g=section["g"], m=section["m"], eta=section["eta"])
    if kind == "gaussian":
        return GaussianTrap(U=section["U"], w=section["w"], **common)
    if kind == "evanescent":
        return EvanescentTrap(U=section["U"], kappa=section["kappa"], **common)
    if kind == "harmonic":
        return HarmonicTrap(omega=section["omega"], x0=section["x0"], **common)
    raise ConfigError(f"unknown trap type {kind!r}")


def _build_grid(section: dict):
    from .trap1d import Grid1D

    return Grid1D(section["x_min"], section["x_max"], section["n"])


def _solver_config(section: dict):
    from .solver import SolverConfig

    return SolverConfig(
        basis_factor=section["basis_factor"],
        points_per_wavelength=section["points_per_wavelength"],
        slice_width=section["slice_width"],
        weyl_tolerance=section["weyl_tolerance"],
    )


def _parity(cfg) -> "SymmetryClass":
    from .geometry import SymmetryClass

    p = cfg["parity"]
    if len(p) != 2 or any(v not in (-1, 1) for v in p):
        raise ConfigError(f"parity must be two values in {{-1, 1}}, got {p}")
    return SymmetryClass(int(p[0]), int(p[1]))


def _basis_descriptor(experiment_cfg, shape, cls, k_center, half_width, solver_cfg):
    return {
        "shape": shape.to_dict() if hasattr(shape, "to_dict") else repr(shape),
        "parity": [cls.px, cls.py],
        "k_center": k_center,
        "half_width": half_width,
        "solver": solver_cfg.to_dict(),
    }


def _solve_cached(store, shape, cls, k_center, half_width, solver_cfg, used_keys):
    """solve_window with optional read-through caching of the eigenbasis."""
    from .basis import PlaneWaveBasis
    from .solver import EigenBasis, EigenState, solve_window

    desc = _basis_descriptor(None, shape, cls, k_center, half_width, solver_cfg)
    if store is not None:
        hit = store.get("eigenbasis", desc)
        if hit is not None:
            used_keys.append(hit.key)
            a = hit.arrays
            n = len(a["ks"])
            states = []
            for i in range(n):
                basis = PlaneWaveBasis(k=float(a[f"basis_k_{i}"][0]), cls=cls,
                                       kx=a[f"kx_{i}"], ky=a[f"ky_{i}"])
                states.append(EigenState(k=float(a["ks"][i]), cls=cls,
                                         coeffs=a[f"coeffs_{i}"], shape=shape,
                                         quality=float(a["quality"][i]),
                                         basis=basis))
            return EigenBasis(shape=shape, cls=cls,
                              k_lo=k_center - half_width, k_hi=k_center + half_width,
                              states=states, weyl_expected=float(a["weyl"][0]),
                              weyl_found=n, complete=True)
    basis = solve_window(shape, cls, k_center, half_width, solver_cfg)
    if store is not None:
        arrays = {
            "ks": basis.ks(),
            "quality": np.array([s.quality for s in basis.states]),
            "weyl": np.array([basis.weyl_expected]),
        }
        for i, s in enumerate(basis.states):
            arrays[f"coeffs_{i}"] = s.coeffs
            arrays[f"kx_{i}"] = s.basis.kx
            arrays[f"ky_{i}"] = s.basis.ky
            arrays[f"basis_k_{i}"] = np.array([s.basis.k])
        used_keys.append(store.put(CacheEntry("eigenbasis", desc, arrays)))
    return basis


def _overlap_cfg(method: str):
    from .overlaps import OverlapConfig

    if method not in ("area", "boundary"):
        raise ConfigError(f"overlap_method must be 'area' or 'boundary', got {method!r}")
    return OverlapConfig(method=method)


def _matched_diagonal(om) -> np.ndarray:
    """|O| carried by each unperturbed state after optimal assignment."""
    from scipy.optimize import linear_sum_assignment

    n_cols = om.entries.shape[1]
    rows, cols = linear_sum_assignment(-np.abs(om.entries))
    out = np.zeros(n_cols)
    for r, c in zip(rows, cols):
        out[c] = abs(om.entries[r, c])
    return out


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------


def run_eigensolve(cfg, out_dir, store, threads, used_keys):
    shape = _build_shape(cfg["shape"])
    cls = _parity(cfg)
    solver_cfg = _solver_config(cfg["solver"])
    basis = _solve_cached(store, shape, cls, cfg["k_center"], cfg["half_width"],
                          solver_cfg, used_keys)
    header = list(_config_header("eigensolve", cfg))
    write_csv(out_dir / "spectrum.csv", ["index", "k", "quality"],
              [(i, s.k, s.quality) for i, s in enumerate(basis.states)],
              header + [f"states {len(basis)}",
                        f"weyl_expected {basis.weyl_expected!r}"])

    # probability density of the state nearest k_center on a uniform grid,
    # exactly zero outside the (full, symmetry-unfolded) domain
    if len(basis) == 0:
        write_csv(out_dir / "density.csv", ["x", "y", "density"], [],
                  header + ["states 0"])
        return {"states": 0}
    target = int(np.argmin(np.abs(basis.ks() - cfg["k_center"])))
    state = basis.states[target]
    h = cfg["density_grid_step"]
    xs = np.arange(-shape.x_extent, shape.x_extent + h / 2, h)
    ys = np.arange(-shape.y_extent, shape.y_extent + h / 2, h)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    pts = np.column_stack([np.abs(gx.ravel()), np.abs(gy.ravel())])
    dens = state.evaluate(pts) ** 2
    rows = [(x, y, d) for (x, y), d in zip(np.column_stack([gx.ravel(), gy.ravel()]), dens)]
    write_csv(out_dir / "density.csv", ["x", "y", "density"], rows,
              header + [f"state_index {target}", f"state_k {state.k!r}"])
    return {"states": len(basis)}


def run_overlap_scan(cfg, out_dir, store, threads, used_keys):
    from .geometry import apply_perturbation
    from .overlaps import overlap_matrix

    shape = _build_shape(cfg["shape"])
    cls = _parity(cfg)
    solver_cfg = _solver_config(cfg["solver"])
    ocfg = _overlap_cfg(cfg["overlap_method"])
    family = _build_family(cfg["family"])
    base = _solve_cached(store, shape, cls, cfg["k_center"], cfg["half_width"],
                         solver_cfg, used_keys)

    def scan_one(strength):
        s = float(strength)
        if s == 0.0:
            return np.ones(len(base))
        deformed = apply_perturbation(shape, family(s))
        # recenter on the expected dilation-like drift of the spectrum
        drift = cfg["k_center"] * (shape.area() / deformed.area() - 1.0) / 2.0
        pert = _solve_cached(store, deformed, cls, cfg["k_center"] + drift,
                             cfg["half_width"] + 0.15, solver_cfg, used_keys)
        return _matched_diagonal(overlap_matrix(base, pert, ocfg))

    with ThreadPoolExecutor(max_workers=threads) as pool:
        diags = list(pool.map(scan_one, cfg["strengths"]))

    rows = []
    for s, diag in zip(cfg["strengths"], diags):
        for n, (k, o) in enumerate(zip(base.ks(), diag)):
            rows.append((float(s), n, k, o))
    write_csv(out_dir / "overlap_scan.csv",
              ["strength", "state", "k0", "abs_overlap"], rows,
              list(_config_header("overlap-scan", cfg)))
    return {"strengths": len(cfg["strengths"]), "states": len(base)}


def run_level_tracking(cfg, out_dir, store, threads, used_keys):
    from .overlaps import overlap_matrix
    from .tracking import track_levels

    shape = _build_shape(cfg["shape"])
    cls = _parity(cfg)
    solver_cfg = _solver_config(cfg["solver"])
    ocfg = _overlap_cfg(cfg["overlap_method"])
    family = _build_family(cfg["family"])
    track = track_levels(shape, cls, family, [float(s) for s in cfg["strengths"]],
                         cfg["k_center"], cfg["half_width"], solver_cfg, ocfg)
    header = list(_config_header("level-tracking", cfg))
    rows = []
    for t in range(track.n_tracks):
        for i, s in enumerate(track.strengths):
            ov = track.step_overlaps[t, i - 1] if i > 0 else 1.0
            rows.append((t, float(s), track.curves[t, i], ov))
    write_csv(out_dir / "tracks.csv",
              ["track", "strength", "k", "step_abs_overlap"], rows, header)
    write_csv(out_dir / "crossings.csv",
              ["strength", "strength_index", "track_lo", "track_hi", "gap"],
              [(c.strength, c.strength_index, c.track_lo, c.track_hi, c.gap)
               for c in track.crossings], header)
    # inter-track matrix elements against the initial basis, per strength
    rows = []
    base = track.bases[0]
    for i in range(1, len(track.bases)):
        om = overlap_matrix(base, track.bases[i], ocfg)
        sub = om.entries[np.ix_(track.state_indices[:, i], track.state_indices[:, 0])]
        for a in range(track.n_tracks):
            for b in range(track.n_tracks):
                rows.append((float(track.strengths[i]), a, b, abs(sub[a, b])))
    write_csv(out_dir / "matrix_elements.csv",
              ["strength", "track_row", "track_col", "abs_overlap"], rows, header)
    return {"tracks": track.n_tracks, "crossings": len(track.crossings)}


def _trap_pair(cfg):
    from .spectroscopy import SpectralPair
    from .trap1d import eigensolve_1d

    model = _build_trap(cfg["trap"])
    grid = _build_grid(cfg["grid"])
    n = cfg["n_states"]
    n_rows = cfg["n_rows"] or min(2 * n, n + 20)
    s1 = eigensolve_1d(model, grid, n)
    s2 = eigensolve_1d(model, grid, n_rows, perturbed=True)
    overlaps = (s2.psi @ s1.psi.T) * grid.dx
    pair = SpectralPair(s1.energies, s2.energies, overlaps, max_truncation=0.01)
    return model, grid, s1, pair


def run_echo_trap(cfg, out_dir, store, threads, used_keys):
    from .spectroscopy import ThermalWeights, ensemble_contrast, thermal_average
    from .trap1d import oscillation_period

    model, grid, s1, pair = _trap_pair(cfg)
    t_osc = oscillation_period(model)
    taus = np.linspace(0.0, cfg["tau_max_periods"] * t_osc, cfg["tau_points"])
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        weights = ThermalWeights.boltzmann(s1.energies, cfg["temperature"])
        curve = thermal_average(pair, weights, taus, kind="echo")
    header = list(_config_header("echo-trap", cfg)) + [
        f"oscillation_period {t_osc!r}",
        f"thermal_coverage_warnings {len(caught)}",
    ]
    write_csv(out_dir / "echo.csv", ["tau", "p2_ensemble"],
              list(zip(taus, curve.values)), header)
    if cfg["ramsey"]:
        contrast = ensemble_contrast(pair, weights, taus)
        write_csv(out_dir / "ramsey_contrast.csv", ["tau", "contrast"],
                  list(zip(taus, contrast.values)), header)
    return {"t_osc": t_osc, "max_p2": float(curve.values.max())}


def run_echo_billiard(cfg, out_dir, store, threads, used_keys):
    from .geometry import Physical, apply_perturbation
    from .overlaps import overlap_matrix
    from .spectroscopy import (SpectralPair, ThermalWeights, long_time_echo,
                               thermal_average)

    shape = _build_shape(cfg["shape"])
    cls = _parity(cfg)
    solver_cfg = _solver_config(cfg["solver"])
    ocfg = _overlap_cfg(cfg["overlap_method"])
    d = cfg["displacement"]
    base = _solve_cached(store, shape, cls, cfg["k_center"], cfg["half_width"],
                         solver_cfg, used_keys)
    deformed = apply_perturbation(shape, Physical(d))
    drift = cfg["k_center"] * (shape.area() / deformed.area() - 1.0) / 2.0
    pert = _solve_cached(store, deformed, cls, cfg["k_center"] + drift,
                         cfg["half_width"] + 0.15, solver_cfg, used_keys)
    om = overlap_matrix(base, pert, ocfg)
    # permute the perturbed states so row n is column n's partner: the
    # long-time echo formula reads the matrix diagonal, and the wider,
    # drift-shifted perturbed window does not line up by index
    from scipy.optimize import linear_sum_assignment

    rows, cols = linear_sum_assignment(-np.abs(om.entries))
    order = rows[np.argsort(cols)]
    rest = [r for r in range(om.entries.shape[0]) if r not in set(order)]
    perm = np.concatenate([order, np.array(rest, dtype=int)])
    pair = SpectralPair(base.ks() ** 2, (pert.ks() ** 2)[perm],
                        om.entries[perm, :], max_truncation=0.05)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        weights = ThermalWeights.boltzmann(base.ks() ** 2, cfg["temperature"])
    p2bar = long_time_echo(pair, weights)

    # time-resolved ensemble echo: resolve the slowest relevant beat but
    # sample well past dephasing
    spacing = float(np.mean(np.diff(base.ks() ** 2)))
    taus = np.linspace(0.0, 40.0 * 2.0 * math.pi / spacing, cfg["tau_points"])
    curve = thermal_average(pair, weights, taus, kind="echo")
    header = list(_config_header("echo-billiard", cfg)) + [
        f"long_time_p2 {p2bar!r}",
        f"thermal_coverage_warnings {len(caught)}",
    ]
    write_csv(out_dir / "echo.csv", ["tau", "p2_ensemble"],
              list(zip(taus, curve.values)), header)
    write_csv(out_dir / "long_time.csv", ["long_time_p2"], [(p2bar,)], header)
    return {"long_time_p2": p2bar}


def run_dephasing_free(cfg, out_dir, store, threads, used_keys):
    from .spectroscopy import SpectralPair, generalized_detuning
    from .trap1d import eigensolve_1d

    n = cfg["n_states"]
    results = {}
    rows = []
    for label in ("evanescent", "gaussian"):
        model = _build_trap(cfg[label])
        grid = _build_grid(cfg[f"{label}_grid"])
        s1 = eigensolve_1d(model, grid, n)
        s2 = eigensolve_1d(model, grid, min(2 * n, n + 20), perturbed=True)
        overlaps = (s2.psi @ s1.psi.T) * grid.dx
        pair = SpectralPair(s1.energies, s2.energies, overlaps,
                            max_truncation=0.01)
        shifts = s2.energies[:n] - s1.energies
        detunings = [generalized_detuning(pair, i, cfg["tau"]) for i in range(n)]
        spread = float(np.std(shifts) / abs(np.mean(shifts)))
        results[label] = spread
        for i in range(n):
            rows.append((label, i, s1.energies[i], shifts[i], detunings[i]))
    header = list(_config_header("dephasing-free", cfg)) + [
        f"evanescent_normalized_spread {results['evanescent']!r}",
        f"gaussian_normalized_spread {results['gaussian']!r}",
        f"spread_ratio {results['gaussian'] / results['evanescent']!r}",
    ]
    write_csv(out_dir / "detuning_spread.csv",
              ["trap", "state", "energy", "level_shift", "generalized_detuning"],
              rows, header)
    return {"spread_ratio": results["gaussian"] / results["evanescent"]}


RUNNERS = {
    "eigensolve": run_eigensolve,
    "overlap-scan": run_overlap_scan,
    "level-tracking": run_level_tracking,
    "echo-trap": run_echo_trap,
    "echo-billiard": run_echo_billiard,
    "dephasing-free": run_dephasing_free,
}


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="echolab",
                                description="echo-spectroscopy simulation lab")
    sub = p.add_subparsers(dest="command", required=True)
    for name in list(RUNNERS) + ["verify"]:
        sp = sub.add_parser(name)
        if name != "verify":
            sp.add_argument("--config", required=True, help="YAML run config")
            sp.add_argument("--out", required=True, help="output directory")
            sp.add_argument("--cache", default=None, help="cache directory")
            sp.add_argument("--threads", type=int, default=1)
            sp.add_argument("--set", action="append", default=[], dest="overrides",
                            metavar="K=V", help="override config key (dotted path)")
        else:
            sp.add_argument("pytest_args", nargs="*")
    return p


def _run_verify(args) -> int:
    import subprocess
    from pathlib import Path

    test = Path(__file__).resolve().parents[2] / "tests" / "test_acceptance.py"
    cmd = [sys.executable, "-m", "pytest", str(test), "-v", *args.pytest_args]
    return subprocess.call(cmd)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "verify":
        return _run_verify(args)
    from pathlib import Path

    try:
        cfg = validate_config(args.command,
                              apply_overrides(load_config(args.config),
                                              args.overrides))
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        store = Store(args.cache) if args.cache else None
        used_keys = []
        start = time.time()
        summary = RUNNERS[args.command](cfg, out_dir, store,
                                        max(1, args.threads), used_keys)
        elapsed = time.time() - start
        with open(out_dir / "manifest.txt", "w", newline="\n") as fh:
            fh.write(f"experiment: {args.command}\n")
            fh.write(f"version: {__version__}\n")
            fh.write(f"wall_time_seconds: {elapsed:.3f}\n")
            for key in used_keys:
                fh.write(f"cache_key: {key}\n")
            for k, v in sorted(summary.items()):
                fh.write(f"result.{k}: {_fmt(v)}\n")
            fh.write("config:\n")
            for line in canonical_text(cfg).strip().split("\n"):
                fh.write(f"  {line}\n")
        return 0
    except EchoLabError as exc:
        for klass, code in EXIT_CODES:
            if isinstance(exc, klass):
                print(f"error: {exc}", file=sys.stderr)
                return code
        raise
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 15


if __name__ == "__main__":
    sys.exit(main())
