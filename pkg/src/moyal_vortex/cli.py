"""Experiment harness: `moyal-vortex <command> --config <path> [--output <dir>]`.

Commands
--------
star-check          Moyal property suite (associativity, trace, conjugation,
                    commutative limit, representation agreement); exit 0 only
                    if every row passes.
stationary-residual Sigma sweep of the stationary-equation residual for the
                    configured phi_n states; records the least-squares
                    minimizer next to the 4*theta reference.
pn-landscape        F and the lstar numeric/asymptotic pair over an R sweep.
fixed-points        FixedPoint table plus Landau cell areas, both lattice
                    variants.
evolve-reduced      RK4 trajectory of the reduced peak equation (CSV t,R,V).
evolve-pde          Star-NLS run: time-series CSV plus raw snapshots.
compare             PDE and reduced model from the same ansatz, joined CSV.

Exit codes: 0 success, 1 numerical failure, 2 configuration error.  All
output files use LF line endings and 17-significant-digit floats; every
output directory gets a metadata.json with the fully resolved config, and
failures leave an error.json record.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, ExperimentConfig, parse_config
from .grids import ComplexField2D, make_grid, power, sample_radial
from .moyal import (
    LandauCoefficients,
    MoyalParams,
    from_landau,
    star,
    star_landau,
    to_landau,
)
from .evolution import (
    EvolutionConfig,
    LandauBackend,
    QuadratureBackend,
    evolve,
)
from .reduced import (
    LatticeVariant,
    QuadratureError,
    evolve_peak,
    fixed_points,
    landau_cell_areas,
    lstar_asymptotic,
    lstar_numeric,
    pn_potential,
)
from .states import phi_n, stationary_residual, StationaryParams
from .vortex import VortexParams, build_ansatz

COMMANDS = (
    "star-check",
    "stationary-residual",
    "pn-landscape",
    "fixed-points",
    "evolve-reduced",
    "evolve-pde",
    "compare",
)

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_CONFIG = 2


def _fmt(x: float) -> str:
    """Fixed 17-significant-digit float formatting (determinism contract)."""
    return format(float(x), ".17g")


def _write_csv(path: Path, header: str, rows: list[list]) -> None:
    lines = [header]
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, str):
                cells.append(v)
            elif isinstance(v, (int, np.integer)):
                cells.append(str(int(v)))
            elif v is None:
                cells.append("nan")
            else:
                cells.append(_fmt(v))
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _write_metadata(outdir: Path, cfg: ExperimentConfig, command: str) -> None:
    record = {
        "command": command,
        "version": __version__,
        "config": cfg.resolved(),
    }
    (outdir / "metadata.json").write_text(
        json.dumps(record, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _write_error(outdir: Path, command: str, message: str) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "error.json").write_text(
        json.dumps({"command": command, "error": message}, indent=2) + "\n",
        encoding="utf-8",
    )


def write_snapshot(path: Path, field: ComplexField2D, theta: float, t: float, command: str) -> None:
    """Raw little-endian float64 pairs (re, im), row-major, plus a JSON sidecar."""
    inter = np.empty((field.grid.n, field.grid.n, 2), dtype="<f8")
    inter[..., 0] = field.values.real
    inter[..., 1] = field.values.imag
    path.write_bytes(inter.tobytes())
    sidecar = {
        "n": field.grid.n,
        "L": field.grid.L,
        "theta": theta,
        "t": t,
        "command": command,
        "version": __version__,
    }
    path.with_suffix(path.suffix + ".meta.json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def read_snapshot(path: Path) -> tuple[ComplexField2D, dict]:
    """Inverse of write_snapshot."""
    sidecar = json.loads(path.with_suffix(path.suffix + ".meta.json").read_text())
    n = sidecar["n"]
    raw = np.frombuffer(path.read_bytes(), dtype="<f8").reshape(n, n, 2)
    grid = make_grid(n, sidecar["L"])
    return ComplexField2D(grid=grid, values=raw[..., 0] + 1j * raw[..., 1]), sidecar


# ---------------------------------------------------------------------------
# commands


def _smooth_test_fields(grid, seed: int):
    rng = np.random.default_rng(seed)
    z = grid.x_mesh + 1j * grid.y_mesh
    coef = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    poly = sum(
        coef[i, j] * z**i * np.conj(z) ** j for i in range(3) for j in range(3)
    )
    return ComplexField2D(grid, poly * np.exp(-0.5 * grid.r_mesh**2))


def _rel_l2(a: ComplexField2D, b: ComplexField2D) -> float:
    num = np.sqrt(power(ComplexField2D(a.grid, a.values - b.values)))
    den = np.sqrt(power(b))
    return float(num / den) if den else float(num)


def cmd_star_check(cfg: ExperimentConfig, outdir: Path) -> int:
    g = make_grid(cfg.grid.n, cfg.grid.L)
    p = cfg.moyal_params
    u, v, w = (_smooth_test_fields(g, s) for s in (1, 2, 3))
    rows: list[list] = []

    def record(name: str, value: float, bound: float) -> None:
        rows.append([name, value, bound, "pass" if value <= bound else "fail"])

    lhs = star(star(u, v, p), w, p)
    rhs = star(u, star(v, w, p), p)
    record("associativity", _rel_l2(lhs, rhs), 1e-8)

    sw = star(u, v, p)
    tr_lhs = complex(np.sum(sw.values)) * g.dx**2
    tr_rhs = complex(np.sum(u.values * v.values)) * g.dx**2
    record("trace_property", abs(tr_lhs - tr_rhs) / abs(tr_rhs), 1e-8)

    cu = ComplexField2D(g, np.conj(u.values))
    cv = ComplexField2D(g, np.conj(v.values))
    conj_lhs = ComplexField2D(g, np.conj(star(u, v, p).values))
    conj_rhs = star(cv, cu, p)
    record("conjugation_antihom", _rel_l2(conj_lhs, conj_rhs), 1e-10)

    uv = ComplexField2D(g, u.values * v.values)
    thetas = np.array([1e-3, 1e-2, 1e-1])
    errs = [
        _rel_l2(star(u, v, MoyalParams(t)), uv) for t in thetas
    ]
    slope = float(np.polyfit(np.log(thetas), np.log(errs), 1)[0])
    rows.append(
        [
            "commutative_limit_slope",
            slope,
            "order 1 within factor 2",
            "pass" if 0.5 <= slope <= 2.0 else "fail",
        ]
    )

    if p.theta > 0:
        M = 8
        rng = np.random.default_rng(4)
        c1 = LandauCoefficients(
            M, rng.normal(size=(M, M)) + 1j * rng.normal(size=(M, M)), p.theta
        )
        c2 = LandauCoefficients(
            M, rng.normal(size=(M, M)) + 1j * rng.normal(size=(M, M)), p.theta
        )
        f1, f2 = from_landau(c1, g), from_landau(c2, g)
        record(
            "representation_agreement",
            _rel_l2(star(f1, f2, p), from_landau(star_landau(c1, c2), g)),
            1e-6,
        )

    _write_csv(outdir / "star_check.csv", "property,value,bound,status", rows)
    ok = all(r[-1] == "pass" for r in rows)
    for r in rows:
        print(f"{r[0]}: {r[-1]} (value {r[1]:.3e})" if isinstance(r[1], float) else r)
    return EXIT_OK if ok else EXIT_NUMERICAL


def cmd_stationary_residual(cfg: ExperimentConfig, outdir: Path) -> int:
    g = make_grid(cfg.grid.n, cfg.grid.L)
    p = cfg.moyal_params
    st = cfg.states
    sigmas = np.linspace(st.sigma_min, st.sigma_max, st.sigma_steps)
    rows: list[list] = []
    summary: list[list] = []
    for idx in st.phi_indices:
        zeta = phi_n(idx, g)
        residuals = [
            stationary_residual(
                zeta, StationaryParams(sigma=s, theta=p), st.drop_laplacian
            )
            for s in sigmas
        ]
        for s, r in zip(sigmas, residuals):
            rows.append([f"phi_{idx}", s, r])
        best = int(np.argmin(residuals))
        summary.append(
            [f"phi_{idx}", sigmas[best], residuals[best], 4.0 * p.theta]
        )
    _write_csv(outdir / "residual_sweep.csv", "state,sigma,residual", rows)
    _write_csv(
        outdir / "residual_summary.csv",
        "state,sigma_min_residual,residual,sigma_reference_4theta",
        summary,
    )
    return EXIT_OK


def cmd_pn_landscape(cfg: ExperimentConfig, outdir: Path) -> int:
    p = cfg.moyal_params
    variant = cfg.lattice_variant
    a, om, V = cfg.ansatz.a, cfg.ansatz.omega, cfg.ansatz.V
    radii = np.linspace(cfg.sweep.R_min, cfg.sweep.R_max, cfg.sweep.steps)
    rows = []
    for R in radii:
        F = pn_potential(R, om, V, p, variant)
        num = lstar_numeric(a, om, R, V, p)
        asym = lstar_asymptotic(a, om, R, V, p, variant)
        rows.append([R, F, num, asym])
    _write_csv(
        outdir / "pn_landscape.csv", "R,F,lstar_numeric,lstar_asymptotic", rows
    )
    return EXIT_OK


def cmd_fixed_points(cfg: ExperimentConfig, outdir: Path) -> int:
    p = cfg.moyal_params
    for variant in LatticeVariant:
        fps = fixed_points(p, cfg.fixed_points_n_max, variant)
        areas = landau_cell_areas(fps) + [float("nan")]
        rows = [
            [fp.index, fp.R, fp.stability, fp.paper_R, area]
            for fp, area in zip(fps, areas)
        ]
        _write_csv(
            outdir / f"fixed_points_{variant.value}.csv",
            "n,R,stability,paper_R,cell_area",
            rows,
        )
    return EXIT_OK


def cmd_evolve_reduced(cfg: ExperimentConfig, outdir: Path) -> int:
    p = cfg.moyal_params
    r = cfg.reduced
    traj = evolve_peak(
        r.R0,
        r.V0,
        cfg.ansatz.a,
        cfg.ansatz.omega,
        p,
        cfg.lattice_variant,
        dt=r.dt,
        t_end=r.t_end,
    )
    rows = [[t, R, V] for t, R, V in zip(traj.t, traj.R, traj.V)]
    _write_csv(outdir / "reduced_timeseries.csv", "t,R,V", rows)
    _write_csv(
        outdir / "reduced_energy.csv",
        "t,energy",
        [[t, e] for t, e in zip(traj.energy_t, traj.energy)],
    )
    if traj.aborted:
        _write_error(outdir, "evolve-reduced", "trajectory aborted (R <= 0 or non-finite)")
        return EXIT_NUMERICAL
    return EXIT_OK


def _diag_rows(diags) -> list[list]:
    return [
        [d.t, d.power, d.energy, d.R_fit, d.omega_fit, d.a_fit, d.V_fit, d.winding]
        for d in diags
    ]


def cmd_evolve_pde(cfg: ExperimentConfig, outdir: Path) -> int:
    g = make_grid(cfg.grid.n, cfg.grid.L)
    p = cfg.moyal_params
    e = cfg.evolution
    backend = (
        QuadratureBackend()
        if e.star_backend == "quadrature"
        else LandauBackend(cutoff=e.landau_cutoff)
    )
    a = cfg.ansatz
    u0 = build_ansatz(
        VortexParams(a=a.a, omega=a.omega, R=a.R, V=a.V, sigma=a.sigma, m=a.m), g
    )
    res = evolve(
        u0,
        EvolutionConfig(
            dt=e.dt,
            t_end=e.t_end,
            snapshot_every=e.snapshot_every,
            theta=p,
            star_backend=backend,
        ),
    )
    _write_csv(
        outdir / "pde_timeseries.csv",
        "t,power,energy,R_fit,omega_fit,a_fit,V_fit,winding",
        _diag_rows(res.diagnostics),
    )
    for i, (t, field) in enumerate(res.snapshots):
        write_snapshot(outdir / f"snapshot_{i:05d}.raw", field, p.theta, t, "evolve-pde")
    if res.aborted:
        _write_error(outdir, "evolve-pde", res.error or "aborted")
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_compare(cfg: ExperimentConfig, outdir: Path) -> int:
    g = make_grid(cfg.grid.n, cfg.grid.L)
    p = cfg.moyal_params
    e = cfg.evolution
    a = cfg.ansatz
    backend = (
        QuadratureBackend()
        if e.star_backend == "quadrature"
        else LandauBackend(cutoff=e.landau_cutoff)
    )
    u0 = build_ansatz(
        VortexParams(a=a.a, omega=a.omega, R=a.R, V=a.V, sigma=a.sigma, m=a.m), g
    )
    res = evolve(
        u0,
        EvolutionConfig(
            dt=e.dt,
            t_end=e.t_end,
            snapshot_every=e.snapshot_every,
            theta=p,
            star_backend=backend,
        ),
    )
    traj = evolve_peak(
        a.R,
        a.V,
        a.a,
        a.omega,
        p,
        cfg.lattice_variant,
        dt=e.dt,
        t_end=e.t_end,
    )
    rows = []
    for d in res.diagnostics:
        i = min(int(round(d.t / e.dt)), len(traj.R) - 1)
        rows.append([d.t, d.R_fit, d.V_fit, traj.R[i], traj.V[i]])
    _write_csv(
        outdir / "compare_timeseries.csv",
        "t,R_pde,V_pde,R_reduced,V_reduced",
        rows,
    )
    if res.aborted:
        _write_error(outdir, "compare", res.error or "aborted")
        return EXIT_NUMERICAL
    return EXIT_OK


_DISPATCH = {
    "star-check": cmd_star_check,
    "stationary-residual": cmd_stationary_residual,
    "pn-landscape": cmd_pn_landscape,
    "fixed-points": cmd_fixed_points,
    "evolve-reduced": cmd_evolve_reduced,
    "evolve-pde": cmd_evolve_pde,
    "compare": cmd_compare,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="moyal-vortex",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=(
            "Config defaults (JSON keys, see docs/config.md): grid {n: 128, L: 8.0}, "
            "theta 1.0, variant 'charge1_quadratic', ansatz {a: 2.0, omega: 0.5, "
            "R: 2.1708..., V: 0.0, sigma: 0.0, m: 1}, evolution {dt: 1e-3, t_end: 1.0, "
            "snapshot_every: 100, star_backend: 'landau', landau_cutoff: 16}, "
            "sweep {R_min: 1.0, R_max: 10.0, steps: 64}, states {phi_indices: [0,1,2], "
            "sigma_min: -4.0, sigma_max: 2.0, sigma_steps: 121, drop_laplacian: false}, "
            "reduced {R0: 2.1925..., V0: 0.0, dt: 0.02, t_end: 80.0}, "
            "fixed_points_n_max 30, output_dir 'out'."
        ),
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="path to a JSON config file")
    parser.add_argument(
        "--output", default=None, help="output directory (overrides config output_dir)"
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = parse_config(Path(args.config).read_text(encoding="utf-8"))
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    outdir = Path(args.output) if args.output else Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    _write_metadata(outdir, cfg, args.command)
    try:
        return _DISPATCH[args.command](cfg, outdir)
    except (QuadratureError, FloatingPointError, RuntimeError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        _write_error(outdir, args.command, str(exc))
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
