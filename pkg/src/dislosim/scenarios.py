"""Named experiments wired from the library modules.

Every scenario writes delimited data (CSV) plus rendered figures into the
output directory, and raises InvariantViolation if a declared inequality
fails during the run, so the CLI can exit nonzero.
"""

from __future__ import annotations

import csv
import os

import numpy as np

from . import plots
from .analytic import (StraightDislocation, displacement, stress,
                       traction_limit_integral, verify_equilibrium)
from .continuum import (SlipField, SlipSystem, classical_step,
                        dislocation_density_of_slip, energy_ledger,
                        mollified_loop_slip, resolved_stress, solve_elasticity,
                        evolve_slip)
from .curves import (CurveState, enclosed_radius, max_stable_dt,
                     plane_confinement_residual, step, uniform_stress)
from .errors import ConfigError, InvariantViolation
from .grid import PeriodicCell
from .io import write_curves, write_grid_snapshot, write_time_series
from .measures import circle_loop
from .mobility import MobilityLaw
from .tensors import IsotropicElasticity


def run_scenario(cfg, output_dir=None, seed=None, max_steps=None):
    """Dispatch a validated config to its scenario; returns a summary dict."""
    out = output_dir or cfg["io.output_dir"]
    os.makedirs(out, exist_ok=True)
    if seed is None:
        seed = cfg["run.seed"]
    if max_steps is None:
        max_steps = cfg["run.max_steps"]
    runner = _RUNNERS.get(cfg.scenario)
    if runner is None:
        raise ConfigError(f"no runner for scenario {cfg.scenario!r}")
    return runner(cfg, out, int(seed), int(max_steps))


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (int, float, np.floating))
                        else v for v in row])


def _dislocation(cfg):
    elast = cfg.elasticity()
    if not isinstance(elast, IsotropicElasticity):
        raise ConfigError("analytic scenarios need isotropic lambda/mu material")
    return StraightDislocation(cfg["scenario.b1"], cfg["scenario.b3"], elast)


def _mobility(cfg):
    return MobilityLaw(cfg["mobility.c"], cfg["mobility.gamma"])


def _step_count(cfg, max_steps):
    n = int(round(cfg["run.t_end"] / cfg["run.dt"]))
    if max_steps:
        n = min(n, max_steps)
    return max(n, 1)


# ---------------------------------------------------------------------------
# analytic-field scenarios


def run_field_sample(cfg, out, seed, max_steps):
    """Sample the straight-dislocation fields on an x1-x2 grid."""
    d = _dislocation(cfg)
    n = 101
    extent = 1.0
    xs = np.linspace(-extent, extent, n)
    # offset x2 slightly off the branch cut / core line
    x1, x2 = np.meshgrid(xs, xs + 0.5 * (xs[1] - xs[0]), indexing="ij")
    pts = np.stack([x1, x2, np.zeros_like(x1)], axis=-1)
    u = displacement(d, pts)
    t = stress(d, pts)

    rows = []
    for i in range(n):
        for j in range(n):
            rows.append((x1[i, j], x2[i, j], *u[i, j],
                         t[i, j, 0, 0], t[i, j, 1, 1], t[i, j, 2, 2],
                         t[i, j, 1, 2], t[i, j, 0, 2], t[i, j, 0, 1]))
    _write_csv(os.path.join(out, "field_sample.csv"),
               ("x1", "x2", "u1", "u2", "u3",
                "t11", "t22", "t33", "t23", "t13", "t12"), rows)

    ext = (-extent, extent, -extent, extent)
    plots.save_heatmap(os.path.join(out, "stress_t12.png"),
                       np.clip(t[..., 0, 1], -2, 2), ext,
                       "in-plane shear stress", "T12")
    comp = t[..., 0, 2] if abs(d.b3) > abs(d.b1) else t[..., 0, 0]
    name = "T13" if abs(d.b3) > abs(d.b1) else "T11"
    plots.save_heatmap(os.path.join(out, f"stress_{name.lower()}.png"),
                       np.clip(comp, -2, 2), ext, "stress component", name)
    plots.save_heatmap(os.path.join(out, "displacement_u1.png"),
                       u[..., 0], ext, "displacement", "u1")
    return {"samples": n * n, "output": out}


def run_verify_analytic(cfg, out, seed, max_steps):
    """Check table for the closed-form solution.

    Displacement jump across the cut, finite-difference equilibrium
    residual versus step size, stress continuity across the cut, and the
    decay of the core traction integral.
    """
    d = _dislocation(cfg)
    rng = np.random.default_rng(seed)
    rows = []
    ok = True

    b = d.burgers
    for _ in range(20):
        x1 = rng.uniform(0.1, 2.0)
        x3 = rng.uniform(-1.0, 1.0)
        eps = 1e-12
        up = displacement(d, np.array([x1, eps, x3]))
        dn = displacement(d, np.array([x1, -eps, x3]))
        jump = up - dn
        err = float(np.abs(jump - (-b)).max())
        passed = err <= 1e-10  # one-sided limit at finite eps
        ok &= passed
        rows.append(("displacement_jump", err, 1e-10, int(passed)))

    hs = (1e-2, 1e-3, 1e-4)
    pts = np.array([[0.7, 0.4, 0.0], [-0.5, 0.8, 0.0], [0.3, -0.9, 0.0]])
    residuals = []
    for h in hs:
        res = max(verify_equilibrium(d, p, h) for p in pts)
        residuals.append(res)
        rows.append(("fd_equilibrium_residual", res, float("nan"), 1))
    slope = np.polyfit(np.log(hs), np.log(residuals), 1)[0]
    passed = abs(slope - 2.0) <= 0.2
    ok &= passed
    rows.append(("fd_equilibrium_slope", slope, 2.0, int(passed)))

    for _ in range(10):
        x1 = rng.uniform(0.1, 2.0)
        eps = 1e-12
        tu = stress(d, np.array([x1, eps, 0.0]))
        td = stress(d, np.array([x1, -eps, 0.0]))
        err = float(np.abs(tu - td).max())
        passed = err <= 1e-10
        ok &= passed
        rows.append(("stress_continuity", err, 1e-10, int(passed)))

    radii = (0.1, 0.05, 0.025)
    zero = lambda x: np.zeros_like(x[..., 0])
    test_fns = [
        lambda x: np.stack([x[..., 0] * x[..., 1], zero(x), zero(x)], axis=-1),
        lambda x: np.stack([zero(x), x[..., 0] ** 2, zero(x)], axis=-1),
        lambda x: np.stack([2.0 * x[..., 0] * x[..., 1], -x[..., 0] ** 2,
                            x[..., 0] * x[..., 1]], axis=-1),
    ]
    decay_sets = []
    for k, fn in enumerate(test_fns):
        vals = [abs(traction_limit_integral(d, r, fn)) for r in radii]
        decay_sets.append(vals)
        passed = vals[0] > vals[1] > vals[2]
        ok &= passed
        for r, v in zip(radii, vals):
            rows.append((f"traction_integral_fn{k}_r{r}", v, float("nan"), 1))
        rows.append((f"traction_integral_fn{k}_decreasing",
                     float(passed), 1.0, int(passed)))

    _write_csv(os.path.join(out, "verify_analytic.csv"),
               ("check", "value", "reference", "passed"), rows)
    plots.save_convergence(os.path.join(out, "equilibrium_residual.png"),
                           hs, residuals,
                           "finite-difference equilibrium residual",
                           slope_ref=2.0)
    plots.save_convergence(os.path.join(out, "traction_decay.png"),
                           radii, decay_sets[0],
                           "core traction integral vs radius", slope_ref=1.0)
    if not ok:
        raise InvariantViolation(
            "analytic verification failed; see verify_analytic.csv")
    return {"checks": len(rows), "slope": slope, "output": out}


# ---------------------------------------------------------------------------
# curve scenarios


def _run_loop(cfg, out, seed, max_steps, tag):
    law = _mobility(cfg)
    b = np.array(cfg["scenario.burgers"], float)
    radius = cfg["scenario.radius"]
    loop = circle_loop(radius, cfg["scenario.n_nodes"],
                       center=(0.0, 0.0, 0.0), burgers=b)
    stress = uniform_stress(cfg.mean_stress())
    g = np.array([0.0, 0.0, 1.0])
    sigma = float(g @ (cfg.mean_stress() @ b))
    rate = law.f(sigma)
    if rate == 0.0:
        raise ConfigError(
            "loop scenarios need a nonzero resolved stress (g . T b)")

    state = CurveState(loop, 0.0)
    dt = cfg["run.dt"]
    n_steps = _step_count(cfg, max_steps)
    rows = []
    snaps = [(0.0, state.curve)]
    snap_every = cfg["run.snapshot_every"] or max(n_steps // 8, 1)
    for k in range(n_steps):
        dt_k = min(dt, max_stable_dt(state, stress, law))
        state = step(state, stress, law, dt_k)
        r_meas = enclosed_radius(state.curve)
        conf = plane_confinement_residual(state, g, 0.0)
        if conf > 1e-10:
            raise InvariantViolation(
                f"loop left its glide plane: residual {conf:g} > 1e-10")
        rows.append((state.time, r_meas, radius + rate * state.time, conf))
        if (k + 1) % snap_every == 0:
            snaps.append((state.time, state.curve))
        if r_meas < 4.0 * abs(rate) * dt:
            break

    _write_csv(os.path.join(out, f"{tag}_radius.csv"),
               ("t", "radius", "oracle_radius", "confinement_residual"), rows)
    plots.save_curves(os.path.join(out, f"{tag}_loop.png"), snaps,
                      f"loop under uniform stress ({tag})")
    write_curves(os.path.join(out, f"{tag}_final.curves"), [state.curve])

    t, r, r0 = rows[-1][0], rows[-1][1], rows[-1][2]
    err = abs(r - r0) / radius
    if err > 5e-3:
        raise InvariantViolation(
            f"loop radius drifted from the linear-in-time oracle: "
            f"relative error {err:g} > 5e-3 at t={t:g}")
    return {"steps": len(rows), "final_radius": r, "radius_error": err,
            "output": out}


def run_curve_glide(cfg, out, seed, max_steps):
    """Loop expanding under a positive resolved stress."""
    sigma = float(np.array([0, 0, 1.0]) @ (cfg.mean_stress()
                                           @ np.array(cfg["scenario.burgers"])))
    if sigma <= 0.0:
        raise ConfigError("curve-glide expects an expanding loop "
                          "(positive resolved stress)")
    return _run_loop(cfg, out, seed, max_steps, "glide")


def run_loop_shrink(cfg, out, seed, max_steps):
    """Loop shrinking at constant rate: R(t) = R0 - c t."""
    sigma = float(np.array([0, 0, 1.0]) @ (cfg.mean_stress()
                                           @ np.array(cfg["scenario.burgers"])))
    if sigma >= 0.0:
        raise ConfigError("loop-shrink expects a negative resolved stress")
    return _run_loop(cfg, out, seed, max_steps, "shrink")


# ---------------------------------------------------------------------------
# continuum scenarios


def _slip_setup(cfg):
    lengths = cfg["geometry.lengths"]
    res = cfg["geometry.resolution"]
    cell = PeriodicCell(tuple(lengths), tuple(res))
    b = np.array(cfg["scenario.burgers"], float)
    if abs(b[2]) > 1e-12 * np.linalg.norm(b):
        raise ConfigError("slip scenarios need the Burgers vector in the "
                          "x1-x2 plane (slip normal is x3)")
    system = SlipSystem(np.array([0.0, 0.0, 1.0]), b)
    return cell, system


def run_slip_plane(cfg, out, seed, max_steps):
    """Hamilton-Jacobi slip front under uniform resolved stress.

    mode=front: planar front, measured speed against |f(|b| m:T)|;
    mode=loop: expanding smoothed loop, radius against the front oracle.
    """
    cell, system = _slip_setup(cfg)
    law = _mobility(cfg)
    mean_stress = cfg.mean_stress()
    speed = float(law.f(system.b_mag
                        * np.einsum("ij,ij->", system.m, mean_stress)))

    x = cell.coords()
    w = 4.0 * cell.spacing[0]
    if cfg["scenario.mode"] == "front":
        # periodic band of slip; the tracked right edge glides at f(|b| m:T)
        L1 = cell.lengths[0]
        prof = 0.5 * (np.tanh((x[..., 0] - 0.25 * L1) / w)
                      - np.tanh((x[..., 0] - 0.75 * L1) / w))
        eps0 = system.b_mag * prof
    else:
        eps0 = mollified_loop_slip(
            cell, (0.5 * cell.lengths[0], 0.5 * cell.lengths[1], 0.0),
            cfg["scenario.radius"], system.b_mag)
    sf = SlipField(cell, eps0, system)

    dt = min(cfg["run.dt"], 0.4 * cell.spacing[0] / max(abs(speed), 1e-30))
    n_steps = _step_count(cfg, max_steps)
    level = 0.5 * system.b_mag
    rows = []
    profiles = [sf.eps_p[:, cell.shape[1] // 2, 0].copy()]
    labels = ["t=0"]
    snap_every = cfg["run.snapshot_every"] or max(n_steps // 4, 1)
    for k in range(n_steps):
        sf = evolve_slip(sf, mean_stress, law, dt)
        t = (k + 1) * dt
        pos = _level_position(cell, sf.eps_p, level)
        rows.append((t, pos, speed))
        if (k + 1) % snap_every == 0:
            profiles.append(sf.eps_p[:, cell.shape[1] // 2, 0].copy())
            labels.append(f"t={t:.3g}")
            write_grid_snapshot(
                os.path.join(out, f"slip_{k + 1:05d}.grid"),
                cell, "eps_p", sf.eps_p)

    _write_csv(os.path.join(out, "front_position.csv"),
               ("t", "front_position", "oracle_speed"), rows)
    plots.save_profiles(os.path.join(out, "front_profiles.png"),
                        cell.axes()[0], profiles, labels,
                        "slip front profiles")
    plots.save_heatmap(os.path.join(out, "slip_final.png"),
                       sf.eps_p[:, :, 0],
                       (0, cell.lengths[0], 0, cell.lengths[1]),
                       "final slip field", "eps_p")

    if speed != 0.0 and len(rows) >= 2:
        t0, p0 = rows[len(rows) // 2][0], rows[len(rows) // 2][1]
        t1, p1 = rows[-1][0], rows[-1][1]
        measured = (p1 - p0) / (t1 - t0)
        err = abs(abs(measured) - abs(speed)) / abs(speed)
        if err > 0.02:
            raise InvariantViolation(
                f"front speed off by {100 * err:.2f}% (> 2%)")
        return {"speed": measured, "oracle": speed, "output": out}
    return {"speed": 0.0, "oracle": speed, "output": out}


def _level_position(cell, eps_p, level):
    """x1 where the mid-row profile crosses ``level`` (linear interpolation)."""
    prof = eps_p[:, cell.shape[1] // 2, 0]
    xs = cell.axes()[0]
    above = prof >= level
    idx = np.flatnonzero(above[:-1] != above[1:])
    if idx.size == 0:
        return float("nan")
    i = int(idx[-1])
    f0, f1 = prof[i], prof[i + 1]
    frac = (level - f0) / (f1 - f0)
    return float(xs[i] + frac * (xs[i + 1] - xs[i]))


def run_relaxation(cfg, out, seed, max_steps):
    """Energy relaxation of a slip loop at zero mean stress.

    Records the canonical time series; the free energy must be
    nonincreasing every step.
    """
    cell, system = _slip_setup(cfg)
    law = _mobility(cfg)
    elast = cfg.elasticity()
    mean_stress = cfg.mean_stress()
    if not np.allclose(mean_stress, 0.0):
        raise ConfigError("relaxation runs at zero mean stress")

    eps0 = mollified_loop_slip(
        cell, (0.5 * cell.lengths[0], 0.5 * cell.lengths[1], 0.0),
        cfg["scenario.radius"], system.b_mag)
    sf = SlipField(cell, eps0, system)
    plots.save_heatmap(os.path.join(out, "slip_initial.png"),
                       sf.eps_p[:, :, 0],
                       (0, cell.lengths[0], 0, cell.lengths[1]),
                       "initial slip field", "eps_p")

    state = solve_elasticity(cell, elast, sf.plastic_strain(), mean_stress)
    psi0 = state.free_energy
    dt = cfg["run.dt"]
    n_steps = _step_count(cfg, max_steps)
    rows = []
    t = 0.0
    for k in range(n_steps):
        speed = law.f(resolved_stress(state, system))
        vmax = float(np.abs(speed).max())
        dt_k = min(dt, 0.4 * min(cell.spacing[:2]) / max(vmax, 1e-30))
        sf_new = evolve_slip(sf, state, law, dt_k)
        state_new = solve_elasticity(cell, elast, sf_new.plastic_strain(),
                                     mean_stress)
        hp_rate = (sf_new.hp() - sf.hp()) / dt_k
        ledger = energy_ledger(state, state_new, hp_rate, system.b_hat, dt_k,
                               check=True, tol_energy=1e-10)
        rho = dislocation_density_of_slip(sf_new)
        t += dt_k
        rows.append((t, ledger.psi_after, ledger.dissipation,
                     state_new.div_residual, rho.total_weight()))
        sf, state = sf_new, state_new
        if vmax == 0.0:
            break

    write_time_series(os.path.join(out, "relaxation.csv"), rows)
    plots.save_time_series(os.path.join(out, "relaxation.png"), rows,
                           "loop relaxation at zero mean stress")
    plots.save_heatmap(os.path.join(out, "slip_final.png"),
                       sf.eps_p[:, :, 0],
                       (0, cell.lengths[0], 0, cell.lengths[1]),
                       "relaxed slip field", "eps_p")
    write_grid_snapshot(os.path.join(out, "slip_final.grid"),
                        cell, "eps_p", sf.eps_p)
    return {"psi0": psi0, "psi_final": rows[-1][1] if rows else psi0,
            "steps": len(rows), "output": out}


def run_classical_compare(cfg, out, seed, max_steps):
    """Slip evolution with |grad eps_p| frozen at 1 against the pointwise ODE."""
    cell, system = _slip_setup(cfg)
    law = _mobility(cfg)
    mean_stress = cfg.mean_stress()

    rng = np.random.default_rng(seed)
    eps_hj = rng.standard_normal(cell.shape) * 0.01
    eps_cl = eps_hj.copy()
    sf = SlipField(cell, eps_hj, system)

    dt = cfg["run.dt"]
    n_steps = _step_count(cfg, max_steps)
    rows = []
    i, j = cell.shape[0] // 3, cell.shape[1] // 3
    for k in range(n_steps):
        sf = evolve_slip(sf, mean_stress, law, dt, gradient_norm=1.0)
        eps_cl = classical_step(eps_cl, mean_stress, system, law, dt,
                                burgers_scale=system.b_mag)
        diff = float(np.abs(sf.eps_p - eps_cl).max())
        rows.append(((k + 1) * dt, sf.eps_p[i, j, 0], eps_cl[i, j, 0], diff))

    _write_csv(os.path.join(out, "classical_compare.csv"),
               ("t", "eps_p_new", "eps_p_classical", "max_abs_diff"), rows)
    data = np.asarray(rows, float)
    plots.save_profiles(os.path.join(out, "classical_compare.png"),
                        data[:, 0], [data[:, 1], data[:, 2]],
                        ["frozen-gradient model", "classical ODE"],
                        "slip at a sample node", xlabel="t")
    max_diff = float(data[:, 3].max())
    if max_diff > 1e-8:
        raise InvariantViolation(
            f"frozen-gradient evolution deviates from the classical law by "
            f"{max_diff:g} > 1e-8")
    return {"max_diff": max_diff, "steps": n_steps, "output": out}


_RUNNERS = {
    "field-sample": run_field_sample,
    "verify-analytic": run_verify_analytic,
    "curve-glide": run_curve_glide,
    "loop-shrink": run_loop_shrink,
    "slip-plane": run_slip_plane,
    "relaxation": run_relaxation,
    "classical-compare": run_classical_compare,
}
