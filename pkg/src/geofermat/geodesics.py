"""Arc-length geodesic integration with first-integral monitoring.

The geodesic equations of the diagonal metric ``E du^2 + G dv^2`` (E, G
functions of u only) are

    u'' = -(E_u / 2E) u'^2 + (G_u / 2E) v'^2
    v'' = -(G_u / G) u' v'

Meridians (v' = 0) are geodesics of every surface of revolution, and the
quantity ``G v' = rho cos(alpha)`` (alpha the angle with the parallel) is
conserved along every geodesic.  The integrator treats that conservation
law, together with unit speed ``E u'^2 + G v'^2 = 1``, as correctness
monitors: a step that violates either budget is rejected, not patched.

Exact meridian launches are integrated as a one-dimensional profile
arc-length problem.  When the profile closes smoothly on the rotation
axis (|d phi / d s| -> 1 where phi -> 0, as on a sphere cap or a
paraboloid apex) a meridian passes through the axis with ``v`` jumping by
pi; for any other chart exit a :class:`ChartExitError` reports the exit
arc length.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import ChartExitError, SolveError
from .surfaces import ProfileSurface, SurfacePoint, TWO_PI

__all__ = [
    "GeodesicState",
    "GeodesicPath",
    "geodesic_derivative",
    "shoot",
    "clairaut_constant",
    "write_path_csv",
    "CSV_COLUMNS",
]

DEFAULT_TOL = 1e-10
_MERIDIAN_SNAP = 1e-14
_MAX_STEPS = 200_000

CSV_COLUMNS = ("s", "u", "v", "du", "dv", "x", "y", "z", "clairaut_c")


@dataclass(frozen=True)
class GeodesicState:
    """Chart coordinates and coordinate velocities per unit arc length."""

    u: float
    v: float
    du: float
    dv: float


@dataclass
class GeodesicPath:
    """An arc-length sampled geodesic.

    ``samples`` has one row ``(s, u, v, du, dv)`` per accepted integrator
    step plus the endpoint, ordered by strictly increasing ``s`` starting
    at 0.  ``c_nominal`` is the conserved quantity ``G(u) v'`` at launch
    and ``c_drift`` the largest observed deviation from it.
    """

    surface: ProfileSurface
    samples: np.ndarray
    length: float
    c_nominal: float
    c_drift: float
    theta_start: float
    theta_end: float
    unit_defect: float = 0.0
    ambiguous: bool = False
    winding: int = 0

    def start(self) -> SurfacePoint:
        return SurfacePoint(float(self.samples[0, 1]), float(self.samples[0, 2]))

    def end(self) -> SurfacePoint:
        return SurfacePoint(float(self.samples[-1, 1]), float(self.samples[-1, 2]))

    def end_state(self) -> GeodesicState:
        s = self.samples[-1]
        return GeodesicState(float(s[1]), float(s[2]), float(s[3]), float(s[4]))

    def start_unit_tangent(self):
        """Departure tangent components (a_par, a_mer) in the unit frame."""
        return math.cos(self.theta_start), math.sin(self.theta_start)

    def reversed_heading(self) -> float:
        """Heading at the endpoint that retraces the path backwards."""
        theta = self.theta_end + math.pi
        if theta > math.pi:
            theta -= TWO_PI
        return theta

    def clairaut_values(self) -> np.ndarray:
        """Conserved quantity G(u) v' at every sample."""
        _, G, _, _, _ = self.surface.metric_terms_batch(self.samples[:, 1])
        return G * self.samples[:, 4]

    def rho_max(self) -> float:
        return float(np.max(self.surface.metric_terms_batch(self.samples[:, 1])[4]))

    def embed_samples(self) -> np.ndarray:
        return self.surface.embed_batch(self.samples[:, 1], self.samples[:, 2])


def geodesic_derivative(surface: ProfileSurface, state: GeodesicState):
    """Right-hand side ``(du, dv, ddu, ddv)`` of the geodesic equations."""
    surface.require_chart(state.u)
    E, G, E_u, G_u, _ = surface.metric_terms(state.u)
    ddu = (-E_u * state.du * state.du + G_u * state.dv * state.dv) / (2.0 * E)
    ddv = -(G_u / G) * state.du * state.dv
    return state.du, state.dv, ddu, ddv


def clairaut_constant(surface: ProfileSurface, p: SurfacePoint, theta: float) -> float:
    """Conserved value ``phi(u) cos(theta)`` for a unit launch at heading theta."""
    surface.check_point(p)
    return float(surface.metric_terms(p.u)[4] * math.cos(theta))


# -- adaptive embedded 5(4) pair ------------------------------------------

_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = (9017 / 3168, -355 / 33, 46732 / 5247,
                                49 / 176, -5103 / 18656)
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (71 / 57600, -71 / 16695, 71 / 1920,
                                -17253 / 339200, 22 / 525, -1 / 40)


def _integrate(surface, u0, v0, du0, dv0, length, tol, collect):
    """Core stepper.  Returns (samples or None, end state, drift, unit defect).

    Raises ChartExitError when the trajectory reaches the chart boundary
    and SolveError when the conservation budget cannot be met.
    """
    terms = surface.metric_terms
    u_lo, u_hi, guard = surface.u_min, surface.u_max, surface.axis_guard

    E, G, _, _, phi = terms(u0)
    c0 = G * dv0
    rho_max = max(1.0, phi)
    budget_factor = 10.0 * tol

    s = 0.0
    u, v, du, dv = u0, v0, du0, dv0
    drift = 0.0
    unit_defect = 0.0
    rows = [(0.0, u0, v0, du0, dv0)] if collect else None
    s_eps = 1e-15 * max(1.0, length)

    # FSAL stage cache
    E, G, E_u, G_u, _ = terms(u)
    a1 = (-E_u * du * du + G_u * dv * dv) / (2.0 * E)
    b1 = -(G_u / G) * du * dv

    h = min(length, 1e-2)
    chart_rejects = 0
    for _step in range(_MAX_STEPS):
        if length - s <= s_eps:
            break
        if h > length - s:
            h = length - s

        try:
            # stage 2
            uu = u + h * _A21 * du
            d1 = du + h * _A21 * a1
            e1 = dv + h * _A21 * b1
            E, G, E_u, G_u, _ = terms(uu)
            a2 = (-E_u * d1 * d1 + G_u * e1 * e1) / (2.0 * E)
            b2 = -(G_u / G) * d1 * e1
            du2, dv2 = d1, e1
            # stage 3
            uu = u + h * (_A31 * du + _A32 * du2)
            d1 = du + h * (_A31 * a1 + _A32 * a2)
            e1 = dv + h * (_A31 * b1 + _A32 * b2)
            E, G, E_u, G_u, _ = terms(uu)
            a3 = (-E_u * d1 * d1 + G_u * e1 * e1) / (2.0 * E)
            b3 = -(G_u / G) * d1 * e1
            du3, dv3 = d1, e1
            # stage 4
            uu = u + h * (_A41 * du + _A42 * du2 + _A43 * du3)
            d1 = du + h * (_A41 * a1 + _A42 * a2 + _A43 * a3)
            e1 = dv + h * (_A41 * b1 + _A42 * b2 + _A43 * b3)
            E, G, E_u, G_u, _ = terms(uu)
            a4 = (-E_u * d1 * d1 + G_u * e1 * e1) / (2.0 * E)
            b4 = -(G_u / G) * d1 * e1
            du4, dv4 = d1, e1
            # stage 5
            uu = u + h * (_A51 * du + _A52 * du2 + _A53 * du3 + _A54 * du4)
            d1 = du + h * (_A51 * a1 + _A52 * a2 + _A53 * a3 + _A54 * a4)
            e1 = dv + h * (_A51 * b1 + _A52 * b2 + _A53 * b3 + _A54 * b4)
            E, G, E_u, G_u, _ = terms(uu)
            a5 = (-E_u * d1 * d1 + G_u * e1 * e1) / (2.0 * E)
            b5 = -(G_u / G) * d1 * e1
            du5, dv5 = d1, e1
            # stage 6
            uu = u + h * (_A61 * du + _A62 * du2 + _A63 * du3 + _A64 * du4
                          + _A65 * du5)
            d1 = du + h * (_A61 * a1 + _A62 * a2 + _A63 * a3 + _A64 * a4
                           + _A65 * a5)
            e1 = dv + h * (_A61 * b1 + _A62 * b2 + _A63 * b3 + _A64 * b4
                           + _A65 * b5)
            E, G, E_u, G_u, _ = terms(uu)
            a6 = (-E_u * d1 * d1 + G_u * e1 * e1) / (2.0 * E)
            b6 = -(G_u / G) * d1 * e1
            du6, dv6 = d1, e1
            # 5th order solution (b7 = 0)
            u_n = u + h * (_B1 * du + _B3 * du3 + _B4 * du4 + _B5 * du5
                           + _B6 * du6)
            du_n = du + h * (_B1 * a1 + _B3 * a3 + _B4 * a4 + _B5 * a5
                             + _B6 * a6)
            dv_n = dv + h * (_B1 * b1 + _B3 * b3 + _B4 * b4 + _B5 * b5
                             + _B6 * b6)
            v_n = v + h * (_B1 * dv + _B3 * dv3 + _B4 * dv4 + _B5 * dv5
                           + _B6 * dv6)
            # FSAL stage 7 at the new point
            E_n, G_n, E_u7, G_u7, phi_n = terms(u_n)
            a7 = (-E_u7 * du_n * du_n + G_u7 * dv_n * dv_n) / (2.0 * E_n)
            b7 = -(G_u7 / G_n) * du_n * dv_n
        except (ValueError, OverflowError, ZeroDivisionError):
            h *= 0.5
            chart_rejects += 1
            if chart_rejects > 60:
                raise ChartExitError("geodesic left the chart", s) from None
            continue

        err_u = h * (_E1 * du + _E3 * du3 + _E4 * du4 + _E5 * du5
                     + _E6 * du6 + _E7 * du_n)
        err_v = h * (_E1 * dv + _E3 * dv3 + _E4 * dv4 + _E5 * dv5
                     + _E6 * dv6 + _E7 * dv_n)
        err_du = h * (_E1 * a1 + _E3 * a3 + _E4 * a4 + _E5 * a5
                      + _E6 * a6 + _E7 * a7)
        err_dv = h * (_E1 * b1 + _E3 * b3 + _E4 * b4 + _E5 * b5
                      + _E6 * b6 + _E7 * b7)

        ok = (math.isfinite(u_n) and math.isfinite(v_n)
              and math.isfinite(du_n) and math.isfinite(dv_n))
        if ok:
            sc_u = tol * (1.0 + max(abs(u), abs(u_n)))
            sc_v = tol * (1.0 + max(abs(v), abs(v_n)))
            sc_d = tol * (1.0 + max(abs(du), abs(du_n)))
            sc_e = tol * (1.0 + max(abs(dv), abs(dv_n)))
            errnorm = 0.5 * math.sqrt((err_u / sc_u) ** 2 + (err_v / sc_v) ** 2
                                      + (err_du / sc_d) ** 2
                                      + (err_dv / sc_e) ** 2)
        else:
            errnorm = math.inf

        if errnorm > 1.0:
            h *= max(0.2, 0.9 * errnorm ** -0.2) if math.isfinite(errnorm) else 0.25
            chart_rejects += 1
            if chart_rejects > 200:
                raise SolveError("integrator cannot satisfy the error tolerance")
            continue

        # chart boundary check on the accepted candidate
        if not (u_lo <= u_n <= u_hi) or phi_n <= guard:
            h *= 0.5
            chart_rejects += 1
            if chart_rejects > 60 or h < 1e-13 * max(1.0, length):
                raise ChartExitError("geodesic left the chart", s)
            continue

        # conservation monitors
        rho_here = max(rho_max, phi_n)
        budget = budget_factor * rho_here
        defect_c = abs(G_n * dv_n - c0)
        defect_s = abs(E_n * du_n * du_n + G_n * dv_n * dv_n - 1.0)
        if (defect_c > 0.7 * budget or defect_s > 0.7 * budget) and h > 1e-13:
            h *= 0.5
            chart_rejects += 1
            if chart_rejects > 120:
                raise SolveError(
                    "conservation monitors reject every step "
                    f"(drift {defect_c:.3e}, unit defect {defect_s:.3e})")
            continue

        chart_rejects = 0
        s += h
        u, v, du, dv = u_n, v_n, du_n, dv_n
        a1, b1 = a7, b7
        rho_max = rho_here
        drift = max(drift, defect_c)
        unit_defect = max(unit_defect, defect_s)
        if collect:
            rows.append((s, u, v, du, dv))
        if errnorm > 0.0:
            h *= min(5.0, max(0.2, 0.9 * errnorm ** -0.2))
        else:
            h *= 5.0
    else:
        raise SolveError("integrator exceeded the step budget")

    if collect and rows[-1][0] != length:
        last = rows[-1]
        rows[-1] = (length, last[1], last[2], last[3], last[4])
    return rows, (u, v, du, dv), drift, unit_defect


# -- meridian special case --------------------------------------------------


def _meridian_shoot(surface, p, sigma, length, collect):
    """Integrate an exact meridian (dv = 0) as a 1-D arc-length problem."""
    terms = surface.metric_terms

    def speed(uq):
        return math.sqrt(terms(uq)[0])

    def arc(ua, ub):
        if ua == ub:
            return 0.0
        val, _ = quad(speed, ua, ub, epsabs=1e-13, epsrel=1e-13, limit=200)
        return abs(val)

    def guard_stop(ua, direction):
        """First chart exit along the travel direction.

        Returns (u_stop, crosses).  ``crosses`` is True when the exit is a
        smoothly closing axis end, which a meridian may pass through.  A
        start inside the guard cap (just after an axis crossing) is skipped
        before searching for the next exit.
        """
        bound = surface.u_max if direction > 0 else surface.u_min
        closes = surface.closes_at_max if direction > 0 else surface.closes_at_min
        grid = np.linspace(ua, bound, 513)
        g = np.asarray(surface.phi(grid), dtype=float) - surface.axis_guard
        started = g[0] > 0.0
        for i in range(1, len(grid)):
            if not started:
                started = g[i] > 0.0
                continue
            if g[i] <= 0.0:
                if closes and np.all(g[i:] <= 0.0):
                    return bound, True
                lo, hi = sorted((grid[i - 1], grid[i]))
                f = lambda x: float(surface.phi(x)) - surface.axis_guard
                return brentq(f, lo, hi, xtol=1e-14), False
        return bound, False

    rows = [(0.0, p.u, p.v, sigma / speed(p.u), 0.0)]
    s_done = 0.0
    u_cur, v_cur = p.u, p.v
    sig = sigma
    for _leg in range(16):
        u_stop, crosses = guard_stop(u_cur, sig)
        s_leg = arc(u_cur, u_stop)
        remaining = length - s_done
        if remaining <= s_leg + 1e-15 or s_leg == 0.0 and not crosses:
            if remaining > s_leg + 1e-15:
                raise ChartExitError("meridian left the chart", s_done + s_leg)
            # endpoint inside this leg
            lo, hi = (u_cur, u_stop) if sig > 0 else (u_stop, u_cur)
            if hi - lo < 1e-15 or remaining >= s_leg - 1e-13:
                u_end = u_stop if remaining >= s_leg - 1e-13 else u_cur
            else:
                u_end = brentq(lambda x: arc(u_cur, x) - remaining, lo, hi,
                               xtol=1e-14)
            if collect:
                n_mid = 24
                for k in range(1, n_mid):
                    u_k = u_cur + (u_end - u_cur) * k / n_mid
                    rows.append((s_done + arc(u_cur, u_k), u_k, v_cur,
                                 sig / speed(u_k), 0.0))
            rows.append((s_done + remaining, u_end, v_cur,
                         sig / speed(u_end), 0.0))
            theta_end = 0.5 * math.pi * sig
            samples = np.asarray(rows) if collect else np.asarray([rows[0], rows[-1]])
            return samples, theta_end
        if not crosses:
            raise ChartExitError("meridian left the chart", s_done + s_leg)
        # pass through the axis: reflect and rotate the chart by pi
        if collect:
            n_mid = 24
            for k in range(1, n_mid + 1):
                u_k = u_cur + (u_stop - u_cur) * k / n_mid
                rows.append((s_done + arc(u_cur, u_k), u_k, v_cur,
                             sig / speed(u_k), 0.0))
        s_done += s_leg
        u_cur = u_stop
        v_cur += math.pi
        sig = -sig
    raise SolveError("meridian crossed the axis too many times")


def shoot(surface: ProfileSurface, p: SurfacePoint, theta: float, length: float,
          tol: float = DEFAULT_TOL, collect: bool = True) -> GeodesicPath:
    """Exponential map: follow the geodesic from ``p`` at heading ``theta``.

    The integration is adaptive with an embedded error estimate; along the
    accepted path both the unit-speed defect and the drift of the
    conserved quantity ``G v'`` stay below ``10 * tol * max(1, rho)``.
    """
    surface.check_point(p)
    if length < 0.0:
        raise ValueError("length must be nonnegative")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    E0, G0, _, _, phi0 = surface.metric_terms(p.u)
    a_par, a_mer = math.cos(theta), math.sin(theta)
    c0 = phi0 * a_par

    if length == 0.0:
        samples = np.array([[0.0, p.u, p.v,
                             a_mer / math.sqrt(E0), a_par / math.sqrt(G0)]])
        return GeodesicPath(surface, samples, 0.0, c0, 0.0, theta, theta)

    if abs(a_par) <= _MERIDIAN_SNAP:
        sigma = 1.0 if a_mer > 0 else -1.0
        samples, theta_end = _meridian_shoot(surface, p, sigma, length, collect)
        return GeodesicPath(surface, samples, length, 0.0, 0.0,
                            0.5 * math.pi * sigma, theta_end)

    du0 = a_mer / math.sqrt(E0)
    dv0 = a_par / math.sqrt(G0)
    rows, end, drift, unit_defect = _integrate(
        surface, p.u, p.v, du0, dv0, length, tol, collect)
    if not collect:
        rows = [(0.0, p.u, p.v, du0, dv0),
                (length, end[0], end[1], end[2], end[3])]
    samples = np.asarray(rows, dtype=float)
    E1, G1, _, _, _ = surface.metric_terms(end[0])
    theta_end = math.atan2(math.sqrt(E1) * end[2], math.sqrt(G1) * end[3])
    return GeodesicPath(surface, samples, length, c0, drift, theta,
                        theta_end, unit_defect=unit_defect)


# -- batched fixed-step screening integrator ---------------------------------


def shoot_fan(surface, p, thetas, length, n_steps):
    """Fixed-step RK4 trajectories for a fan of headings, used as cheap
    screening for boundary-value solves.  Returns (s_grid, u, v, alive)
    where u, v have shape (len(thetas), n_steps + 1) and dead samples
    (off chart or non-finite) are flagged.
    """
    thetas = np.asarray(thetas, dtype=float)
    k = len(thetas)
    E0, G0, _, _, _ = surface.metric_terms(p.u)
    u = np.full(k, p.u)
    v = np.full(k, p.v)
    du = np.sin(thetas) / math.sqrt(E0)
    dv = np.cos(thetas) / math.sqrt(G0)
    h = length / n_steps

    def rhs(u_, du_, dv_):
        E, G, E_u, G_u, _ = surface.metric_terms_batch(u_)
        ddu = (-E_u * du_ * du_ + G_u * dv_ * dv_) / (2.0 * E)
        ddv = -(G_u / G) * du_ * dv_
        return ddu, ddv

    us = np.empty((k, n_steps + 1))
    vs = np.empty((k, n_steps + 1))
    alive = np.empty((k, n_steps + 1), dtype=bool)
    us[:, 0] = u
    vs[:, 0] = v
    alive[:, 0] = True
    live = np.ones(k, dtype=bool)
    with np.errstate(all="ignore"):
        for i in range(n_steps):
            ka1, kb1 = rhs(u, du, dv)
            u2 = u + 0.5 * h * du
            du2 = du + 0.5 * h * ka1
            dv2 = dv + 0.5 * h * kb1
            ka2, kb2 = rhs(u2, du2, dv2)
            u3 = u + 0.5 * h * du2
            du3 = du + 0.5 * h * ka2
            dv3 = dv + 0.5 * h * kb2
            ka3, kb3 = rhs(u3, du3, dv3)
            u4 = u + h * du3
            du4 = du + h * ka3
            dv4 = dv + h * kb3
            ka4, kb4 = rhs(u4, du4, dv4)
            v = v + (h / 6.0) * (dv + 2.0 * dv2 + 2.0 * dv3 + dv4)
            u = u + (h / 6.0) * (du + 2.0 * du2 + 2.0 * du3 + du4)
            du = du + (h / 6.0) * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4)
            dv = dv + (h / 6.0) * (kb1 + 2.0 * kb2 + 2.0 * kb3 + kb4)
            phi = surface.metric_terms_batch(u)[4]
            good = (np.isfinite(u) & np.isfinite(v) & np.isfinite(du)
                    & np.isfinite(dv) & (u >= surface.u_min)
                    & (u <= surface.u_max) & (phi > surface.axis_guard))
            live = live & good
            # freeze dead trajectories so they stop producing overflows
            u = np.where(live, u, us[:, i])
            v = np.where(live, v, vs[:, i])
            du = np.where(live, du, 0.0)
            dv = np.where(live, dv, 0.0)
            us[:, i + 1] = u
            vs[:, i + 1] = v
            alive[:, i + 1] = live
    s_grid = np.linspace(0.0, length, n_steps + 1)
    return s_grid, us, vs, alive


def write_path_csv(path: GeodesicPath, fileobj) -> None:
    """Serialize a path as CSV with columns s,u,v,du,dv,x,y,z,clairaut_c."""
    xyz = path.embed_samples()
    cvals = path.clairaut_values()
    fileobj.write(",".join(CSV_COLUMNS) + "\n")
    for row, (x, y, z), c in zip(path.samples, xyz, cvals):
        cells = (row[0], row[1], row[2], row[3], row[4], x, y, z, c)
        fileobj.write(",".join(repr(float(val)) for val in cells) + "\n")
