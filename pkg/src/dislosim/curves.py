"""Lagrangian front tracking of dislocation curves.

A curve state is an immutable snapshot (polyline + time).  Nodes move with
the mobility normal velocity evaluated from a caller-supplied stress field;
the curve's own singular self-field is deliberately not included.  Time
integration is explicit midpoint (RK2) with a CFL guard, followed by an
optional split/merge remesh that keeps segment lengths inside
[h_max / 5, h_max].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CflError, DislosimError, ScrewSingularityError
from .measures import DislocationCurve
from .mobility import MobilityLaw, alpha_tilde, normal_velocity, peach_koehler

CFL_NUMBER = 0.5


@dataclass(frozen=True)
class CurveState:
    curve: DislocationCurve
    time: float = 0.0


@dataclass(frozen=True)
class RemeshParams:
    """Split segments longer than h_max, merge shorter than h_max / ratio."""

    h_max: float
    ratio: float = 5.0

    @property
    def h_min(self):
        return self.h_max / self.ratio


def uniform_stress(t):
    """Stress provider returning the same tensor everywhere."""
    t = np.asarray(t, float)

    def provider(x):
        return t

    return provider


def node_tangents(curve: DislocationCurve):
    """Unit tangent per node: normalized bisector of the adjacent segments."""
    seg = curve.segments()
    unit = seg / np.linalg.norm(seg, axis=1)[:, None]
    n = len(curve.vertices)
    tan = np.empty((n, 3))
    if curve.closed:
        mean = unit + np.roll(unit, 1, axis=0)
    else:
        mean = np.empty((n, 3))
        mean[0] = unit[0]
        mean[-1] = unit[-1]
        mean[1:-1] = unit[:-1] + unit[1:]
    norms = np.linalg.norm(mean, axis=1)
    if np.any(norms <= 1e-12):
        raise DislosimError("degenerate node tangent (curve folds back on itself)")
    tan = mean / norms[:, None]
    return tan


def nodal_velocity(state: CurveState, stress, law: MobilityLaw):
    """Per-node normal velocity under the given stress provider."""
    curve = state.curve
    tans = node_tangents(curve)
    v = np.empty_like(curve.vertices)
    for i, (x, tau) in enumerate(zip(curve.vertices, tans)):
        try:
            v[i] = normal_velocity(law, tau, stress(x), curve.burgers)
        except ScrewSingularityError as exc:
            raise ScrewSingularityError(f"screw point at node {i}: {exc}") from exc
    return v


def max_stable_dt(state: CurveState, stress, law: MobilityLaw):
    v = nodal_velocity(state, stress, law)
    vmax = float(np.linalg.norm(v, axis=1).max())
    if vmax == 0.0:
        return np.inf
    return CFL_NUMBER * float(state.curve.segment_lengths().min()) / vmax


def step(state: CurveState, stress, law: MobilityLaw, dt, remesh_params=None):
    """One explicit midpoint step; raises CflError with a suggested dt."""
    if dt <= 0.0:
        raise DislosimError("time step must be positive")
    curve = state.curve
    v1 = nodal_velocity(state, stress, law)
    vmax = float(np.linalg.norm(v1, axis=1).max())
    min_seg = float(curve.segment_lengths().min())
    if vmax > 0.0 and dt * vmax > CFL_NUMBER * min_seg * (1.0 + 1e-12):
        raise CflError(dt, CFL_NUMBER * min_seg / vmax)

    mid = CurveState(
        DislocationCurve(curve.vertices + 0.5 * dt * v1, curve.burgers, curve.closed),
        state.time + 0.5 * dt,
    )
    v2 = nodal_velocity(mid, stress, law)
    new_curve = DislocationCurve(curve.vertices + dt * v2, curve.burgers,
                                 curve.closed)
    if remesh_params is not None:
        new_curve = remesh(new_curve, remesh_params)
    return CurveState(new_curve, state.time + dt)


def remesh(curve: DislocationCurve, params: RemeshParams):
    """Split long segments at their midpoints, merge short ones.

    Both operations are second-order in the segment length for smooth
    curves; total line length is preserved to O(h^2).
    """
    verts = list(curve.vertices)
    changed = True
    while changed:
        changed = False
        out = []
        n = len(verts)
        last = n if curve.closed else n - 1
        for i in range(n):
            out.append(verts[i])
            if i < last:
                nxt = verts[(i + 1) % n]
                if np.linalg.norm(nxt - verts[i]) > params.h_max:
                    out.append(0.5 * (verts[i] + nxt))
                    changed = True
        verts = out
    # merge pass: collapse the shortest too-short segment onto its midpoint
    # (shortest-first keeps the coarsening uniform along the curve)
    min_count = 4 if curve.closed else 2
    while len(verts) > min_count:
        arr = np.asarray(verts)
        seg = (np.roll(arr, -1, axis=0) - arr) if curve.closed \
            else (arr[1:] - arr[:-1])
        lens = np.linalg.norm(seg, axis=1)
        i = int(np.argmin(lens))
        if lens[i] >= params.h_min:
            break
        j = (i + 1) % len(verts)
        verts[i] = 0.5 * (verts[i] + verts[j])
        del verts[j]
    return DislocationCurve(np.asarray(verts), curve.burgers, curve.closed)


def plane_confinement_residual(state: CurveState, g, ref_offset):
    """Max out-of-plane excursion of the vertices from the plane x.g = ref."""
    g = np.asarray(g, float)
    d = state.curve.vertices @ g - ref_offset
    return float(np.abs(d).max())


def enclosed_radius(curve: DislocationCurve, normal=(0.0, 0.0, 1.0)):
    """Effective radius from the enclosed polygon area (planar closed loops)."""
    if not curve.closed:
        raise DislosimError("enclosed_radius needs a closed curve")
    normal = np.asarray(normal, float)
    v = curve.vertices
    cr = np.cross(v, np.roll(v, -1, axis=0))
    area = 0.5 * abs(float(cr.sum(axis=0) @ normal))
    return np.sqrt(area / np.pi)


def step_dissipation(state: CurveState, stress, law: MobilityLaw):
    """Sum over nodes of (T b_hat) . alpha  (discrete dissipation rate >= 0)."""
    curve = state.curve
    b_hat = curve.burgers / np.linalg.norm(curve.burgers)
    tans = node_tangents(curve)
    total = 0.0
    for x, tau in zip(curve.vertices, tans):
        t = stress(x)
        force = peach_koehler(tau, t, curve.burgers)
        a = alpha_tilde(law, tau, force, curve.burgers)
        total += float((t @ b_hat) @ a)
    return total
