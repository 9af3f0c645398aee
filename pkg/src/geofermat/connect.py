"""Geodesic boundary-value solver.

Finds a geodesic arc between two chart points as a two-unknown root
solve over (heading, length).  The endpoint residual is measured in the
chart metric frozen at the target point.  Initial guesses come from a
cheap fixed-step fan of headings (batched RK4) screened against every
requested winding of the target; the embedded chord direction is always
included as a start.  Each promising start is polished by a damped
quasi-Newton iteration whose Jacobian uses a finite-difference heading
column and the analytic length column (the endpoint velocity).

Among converged candidates the shortest is returned; ties within
``tie_tol`` prefer smaller |winding|, then smaller heading.  When a
second distinct candidate matches the best length within
``ambiguity_tol`` the result is flagged ambiguous (cut-locus regime).
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ChartExitError, SolveError
from .geodesics import _integrate, shoot, shoot_fan, GeodesicPath
from .surfaces import ProfileSurface, SurfacePoint, TWO_PI

__all__ = ["ConnectOptions", "connect_geodesic", "distance"]


@dataclass(frozen=True)
class ConnectOptions:
    n_starts: int = 16
    windings: tuple = (-1, 0, 1)
    max_len: float = 20.0
    resid_tol: float = 1e-10
    shoot_tol: float = 1e-10
    newton_max_iter: int = 30
    fan_steps: int = 80
    refine_top: int = 4
    ambiguity_tol: float = 1e-6
    tie_tol: float = 1e-9

    def __post_init__(self):
        if self.n_starts < 4:
            raise ValueError("n_starts must be at least 4")
        if self.max_len <= 0.0:
            raise ValueError("max_len must be positive")
        if self.resid_tol <= 0.0:
            raise ValueError("resid_tol must be positive")


_DEFAULT = ConnectOptions()


def _endpoint(surface, A, theta, length, tol):
    """Endpoint state (u, v, du, dv) of a shot, without sample collection."""
    E0, G0, _, _, _ = surface.metric_terms(A.u)
    du0 = math.sin(theta) / math.sqrt(E0)
    dv0 = math.cos(theta) / math.sqrt(G0)
    if length == 0.0:
        return A.u, A.v, du0, dv0
    _, end, _, _ = _integrate(surface, A.u, A.v, du0, dv0, length, tol, False)
    return end


def _chord_heading(surface, A, B):
    d = surface.embed(B) - surface.embed(A)
    e_par, e_mer = surface.embedding_frame(A)
    return math.atan2(float(d @ e_mer), float(d @ e_par))


@dataclass
class _Candidate:
    theta: float
    length: float
    winding: int
    resid: float


def _newton(surface, A, u_t, v_t, s_e, s_g, theta0, L0, opts):
    """Damped Newton on the 2-D endpoint residual.  Returns a _Candidate
    with the converged residual, or None."""
    theta, L = theta0, max(L0, 1e-12)

    def res(th, ln):
        try:
            u, v, du, dv = _endpoint(surface, A, th, ln, opts.shoot_tol)
        except (ChartExitError, SolveError):
            return None
        return (s_e * (u - u_t), s_g * (v - v_t), du, dv)

    cur = res(theta, L)
    if cur is None:
        return None
    r_norm = math.hypot(cur[0], cur[1])
    for _ in range(opts.newton_max_iter):
        if r_norm <= opts.resid_tol:
            return _Candidate(theta, L, 0, r_norm)
        # Jacobian: finite-difference heading column, analytic length column
        d_th = 1e-7 * max(1.0, abs(theta))
        bumped = res(theta + d_th, L)
        if bumped is None:
            return None
        j00 = (bumped[0] - cur[0]) / d_th
        j10 = (bumped[1] - cur[1]) / d_th
        j01 = s_e * cur[2]
        j11 = s_g * cur[3]
        det = j00 * j11 - j01 * j10
        if det == 0.0 or not math.isfinite(det):
            return None
        step_th = (-cur[0] * j11 + cur[1] * j01) / det
        step_L = (-j00 * cur[1] + j10 * cur[0]) / det
        # near-conjugate configurations make the heading column tiny; a
        # trust region keeps the step sane instead of diverging
        big = max(abs(step_th), abs(step_L) / max(1.0, L))
        lam = min(1.0, 1.0 / big) if big > 1.0 else 1.0
        improved = False
        for _halve in range(14):
            th_new = theta + lam * step_th
            L_new = min(opts.max_len, max(L + lam * step_L, 0.25 * L, 1e-12))
            trial = res(th_new, L_new)
            if trial is not None:
                t_norm = math.hypot(trial[0], trial[1])
                if t_norm <= (1.0 - 1e-4 * lam) * r_norm:
                    theta, L, cur, r_norm = th_new, L_new, trial, t_norm
                    improved = True
                    break
            lam *= 0.5
        if not improved:
            return None
    if r_norm <= opts.resid_tol:
        return _Candidate(theta, L, 0, r_norm)
    return None


def _wrap_pi(theta):
    theta = math.remainder(theta, TWO_PI)
    if theta <= -math.pi:
        theta += TWO_PI
    return theta


def connect_geodesic(surface: ProfileSurface, A: SurfacePoint, B: SurfacePoint,
                     opts: ConnectOptions | None = None,
                     initial: tuple[float, float] | None = None) -> GeodesicPath:
    """Shortest found geodesic from A to B.

    ``initial`` is an optional warm start ``(theta, length)`` aimed at the
    winding-0 target; when it converges the multi-start search is skipped
    (no ambiguity detection in that mode).
    """
    opts = opts or _DEFAULT
    surface.check_point(A)
    surface.check_point(B)

    E_b, G_b, _, _, _ = surface.metric_terms(B.u)
    s_e, s_g = math.sqrt(E_b), math.sqrt(G_b)

    if A.u == B.u and A.v == B.v:
        return shoot(surface, A, 0.0, 0.0)

    chord = float(np.linalg.norm(surface.embed(B) - surface.embed(A)))
    if chord > opts.max_len:
        raise SolveError(
            f"unreachable within search budget: chord {chord:.6g} exceeds "
            f"max_len {opts.max_len:.6g}")

    if initial is not None:
        got = _newton(surface, A, B.u, B.v, s_e, s_g,
                      initial[0], initial[1], opts)
        if got is not None:
            path = shoot(surface, A, got.theta, got.length, opts.shoot_tol)
            path.winding = 0
            return path

    theta_chord = _chord_heading(surface, A, B)
    fan_thetas = [-math.pi + TWO_PI * (j + 0.5) / opts.n_starts
                  for j in range(opts.n_starts)]
    fan_thetas.append(theta_chord)
    L_fan = min(opts.max_len, 3.2 * chord + 0.1)
    n_steps = max(opts.fan_steps, min(320, int(L_fan * 16)))
    s_grid, us, vs, alive = shoot_fan(surface, A, fan_thetas, L_fan, n_steps)

    seeds: list[_Candidate] = [_Candidate(theta_chord, chord, 0, 0.0)]
    for k in opts.windings:
        v_t = B.v + TWO_PI * k
        r2 = (s_e * (us - B.u)) ** 2 + (s_g * (vs - v_t)) ** 2
        r2 = np.where(alive, r2, np.inf)
        r2[:, 0] = np.inf  # the launch point is not an arrival
        idx = np.argmin(r2, axis=1)
        for j, theta in enumerate(fan_thetas):
            i = int(idx[j])
            r = float(r2[j, i])
            if math.isfinite(r):
                seeds.append(_Candidate(theta, float(s_grid[i]), int(k),
                                        math.sqrt(r)))

    ranked = sorted(seeds[1:], key=lambda c: c.resid)
    picks = seeds[:1]
    # the true minimum always screens within grid resolution of the best
    # seed; anything far worse never wins, so skip its Newton polish
    cutoff = 8.0 * ranked[0].resid + 1e-6 if ranked else math.inf
    for cand in ranked:
        if len(picks) >= opts.refine_top + 1:
            break
        if cand.resid > cutoff:
            break
        dup = any(c.winding == cand.winding
                  and abs(_wrap_pi(c.theta - cand.theta)) < math.pi / opts.n_starts
                  for c in picks)
        if not dup:
            picks.append(cand)
    converged: list[_Candidate] = []

    def _absorb(cand):
        got = _newton(surface, A, B.u, B.v + TWO_PI * cand.winding,
                      s_e, s_g, cand.theta, cand.length, opts)
        if got is None:
            return
        got.winding = cand.winding
        dup = any(abs(c.length - got.length) <= 1e-8 * max(1.0, got.length)
                  and c.winding == got.winding
                  and abs(_wrap_pi(c.theta - got.theta)) <= 1e-8
                  for c in converged)
        if not dup:
            converged.append(got)

    for cand in picks:
        _absorb(cand)

    if not converged:
        raise SolveError("unreachable within search budget")

    best_len = min(c.length for c in converged)
    pool = [c for c in converged if c.length <= best_len + opts.tie_tol]
    best = min(pool, key=lambda c: (abs(c.winding), c.theta))
    ambiguous = any(
        c is not best and c.length <= best.length + opts.ambiguity_tol
        and (abs(_wrap_pi(c.theta - best.theta)) > 1e-6
             or c.winding != best.winding)
        for c in converged)

    path = shoot(surface, A, best.theta, best.length, opts.shoot_tol)
    path.winding = best.winding
    path.ambiguous = ambiguous
    return path


def distance(surface: ProfileSurface, A: SurfacePoint, B: SurfacePoint,
             opts: ConnectOptions | None = None) -> float:
    """Length of the shortest found geodesic from A to B."""
    if A.u == B.u and A.v == B.v:
        return 0.0
    return connect_geodesic(surface, A, B, opts).length
