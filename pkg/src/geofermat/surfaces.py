"""Surfaces of revolution built from profile curves.

A surface is generated by rotating the profile curve ``(phi(u), psi(u))``
in the x-z plane about the z axis:

    r(u, v) = (phi(u) cos v, phi(u) sin v, psi(u))

Curves of constant ``v`` (meridians) and constant ``u`` (parallels) form an
orthogonal net, so the first fundamental form is diagonal:

    E = phi'(u)**2 + psi'(u)**2,   F = 0,   G = phi(u)**2

The chart excludes the rotation axis through ``axis_guard``: every
admissible ``u`` must satisfy ``phi(u) > axis_guard > 0``.

The rotation angle ``v`` is stored unwrapped (on the universal cover) so
that geodesics may wind; reduce mod 2*pi only for display.

Frame and orientation convention, fixed here once for the whole package:
``e_parallel = (d/dv)/sqrt(G)`` and ``e_meridian = (d/du)/sqrt(E)``.
A heading ``theta`` is the signed angle from ``e_parallel`` toward
``e_meridian``; ``theta = 0`` points along increasing ``v`` and
``theta = pi/2`` along increasing ``u``.  The angle with a parallel is
``alpha = theta`` and the angle with a meridian is ``beta = pi/2 - theta``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import OffChartError, ProfileError

__all__ = [
    "SurfacePoint",
    "TangentVector",
    "ProfileSurface",
    "make_surface",
    "CATALOGUE",
]

TWO_PI = 2.0 * math.pi

# How close |dphi/ds| must be to 1 at a phi -> 0 chart end for the profile
# to count as closing smoothly on the axis (sphere-like cap).
_CLOSURE_SLOPE_TOL = 1e-6
_CLOSURE_PHI_TOL = 1e-9


@dataclass(frozen=True)
class SurfacePoint:
    """Chart coordinates: profile parameter ``u`` and rotation angle ``v``."""

    u: float
    v: float

    def wrapped_v(self) -> float:
        """Rotation angle reduced to [0, 2*pi), for display only."""
        return self.v % TWO_PI


@dataclass(frozen=True)
class TangentVector:
    """Tangent at ``point`` in the orthonormal (parallel, meridian) frame."""

    point: SurfacePoint
    a_par: float
    a_mer: float

    def norm(self) -> float:
        return math.hypot(self.a_par, self.a_mer)


def _sphere_fns(R):
    sin, cos = math.sin, math.cos
    R2 = R * R

    def terms(u):
        s = sin(u)
        return R2, R2 * s * s, 0.0, 2.0 * R2 * s * cos(u), R * s

    def vals(u):
        u = np.asarray(u, dtype=float)
        s, c = np.sin(u), np.cos(u)
        return R * s, R * c, -R * s, R * c, -R * s, -R * c

    return terms, vals


def _cylinder_fns(R):
    R2 = R * R

    def terms(u):
        return 1.0, R2, 0.0, 0.0, R

    def vals(u):
        u = np.asarray(u, dtype=float)
        z = np.zeros_like(u)
        return R + z, z, z, u.copy(), np.ones_like(u), z

    return terms, vals


def _cone_fns(slope):
    E = 1.0 + slope * slope

    def terms(u):
        return E, u * u, 0.0, 2.0 * u, u

    def vals(u):
        u = np.asarray(u, dtype=float)
        z = np.zeros_like(u)
        return u.copy(), np.ones_like(u), z, slope * u, slope + z, z

    return terms, vals


def _paraboloid_fns(a):
    inv_a = 1.0 / a
    inv_a2 = inv_a * inv_a

    def terms(u):
        return 1.0 + u * u * inv_a2, u * u, 2.0 * u * inv_a2, 2.0 * u, u

    def vals(u):
        u = np.asarray(u, dtype=float)
        z = np.zeros_like(u)
        return (
            u.copy(),
            np.ones_like(u),
            z,
            0.5 * u * u * inv_a,
            u * inv_a,
            inv_a + z,
        )

    return terms, vals


def _catenoid_fns(a):
    cosh, sinh = math.cosh, math.sinh
    inv_a = 1.0 / a

    def terms(u):
        ch = cosh(u * inv_a)
        sh = sinh(u * inv_a)
        phi = a * ch
        # E = sh^2 + 1 = ch^2
        return ch * ch, phi * phi, 2.0 * sh * ch * inv_a, 2.0 * phi * sh, phi

    def vals(u):
        u = np.asarray(u, dtype=float)
        ch, sh = np.cosh(u * inv_a), np.sinh(u * inv_a)
        z = np.zeros_like(u)
        return a * ch, sh, ch * inv_a, u.copy(), np.ones_like(u), z

    return terms, vals


def _torus_fns(R, r):
    sin, cos = math.sin, math.cos
    r2 = r * r

    def terms(u):
        s, c = sin(u), cos(u)
        phi = R + r * c
        return r2, phi * phi, 0.0, -2.0 * phi * r * s, phi

    def vals(u):
        u = np.asarray(u, dtype=float)
        s, c = np.sin(u), np.cos(u)
        return R + r * c, -r * s, -r * c, r * s, r * c, -r * s

    return terms, vals


def _plane_fns():
    def terms(u):
        return 1.0, u * u, 0.0, 2.0 * u, u

    def vals(u):
        u = np.asarray(u, dtype=float)
        z = np.zeros_like(u)
        return u.copy(), np.ones_like(u), z, z, z, z

    return terms, vals


class _SplinePair:
    """Fast scalar and batch evaluation of the custom-profile splines."""

    def __init__(self, u_samples, phi_samples, psi_samples):
        self.phi = CubicSpline(u_samples, phi_samples, bc_type="not-a-knot")
        self.psi = CubicSpline(u_samples, psi_samples, bc_type="not-a-knot")
        self._x = self.phi.x
        self._cphi = self.phi.c
        self._cpsi = self.psi.c
        self._n = len(self._x) - 2  # max interval index

    def _locate(self, u):
        i = int(np.searchsorted(self._x, u, side="right")) - 1
        if i < 0:
            i = 0
        elif i > self._n:
            i = self._n
        return i, u - self._x[i]

    def scalar(self, u):
        """Return (phi, dphi, d2phi, psi, dpsi, d2psi) at a scalar u."""
        i, t = self._locate(u)
        a, b, c, d = self._cphi[0, i], self._cphi[1, i], self._cphi[2, i], self._cphi[3, i]
        ph = ((a * t + b) * t + c) * t + d
        dph = (3.0 * a * t + 2.0 * b) * t + c
        d2ph = 6.0 * a * t + 2.0 * b
        a, b, c, d = self._cpsi[0, i], self._cpsi[1, i], self._cpsi[2, i], self._cpsi[3, i]
        ps = ((a * t + b) * t + c) * t + d
        dps = (3.0 * a * t + 2.0 * b) * t + c
        d2ps = 6.0 * a * t + 2.0 * b
        return ph, dph, d2ph, ps, dps, d2ps

    def batch(self, u):
        u = np.asarray(u, dtype=float)
        return (
            self.phi(u),
            self.phi(u, 1),
            self.phi(u, 2),
            self.psi(u),
            self.psi(u, 1),
            self.psi(u, 2),
        )


def _custom_fns(samples):
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 3 or arr.shape[0] < 4:
        raise ProfileError("custom profile needs >= 4 rows of (u, phi, psi)")
    u_s, phi_s, psi_s = arr[:, 0], arr[:, 1], arr[:, 2]
    if np.any(np.diff(u_s) <= 0):
        raise ProfileError("custom profile samples must have strictly increasing u")
    if np.any(phi_s <= 0):
        raise ProfileError("custom profile requires phi > 0 at every sample")
    sp = _SplinePair(u_s, phi_s, psi_s)

    def terms(u):
        ph, dph, d2ph, _, dps, d2ps = sp.scalar(u)
        E = dph * dph + dps * dps
        return E, ph * ph, 2.0 * (dph * d2ph + dps * d2ps), 2.0 * ph * dph, ph

    return terms, sp.batch, (float(u_s[0]), float(u_s[-1]))


CATALOGUE = ("sphere", "cylinder", "cone", "paraboloid", "catenoid",
             "torus", "plane", "custom")


def _positive(params, key, kind):
    try:
        val = float(params[key])
    except KeyError:
        raise ProfileError(f"{kind} requires parameter '{key}'") from None
    if not math.isfinite(val) or val <= 0.0:
        raise ProfileError(f"{kind}: parameter '{key}' must be positive, got {val!r}")
    return val


class ProfileSurface:
    """A surface of revolution with evaluable metric and embedding.

    Construct through :func:`make_surface`.  All methods are pure
    functions of immutable data and safe for concurrent use.
    """

    def __init__(self, kind, params, terms, vals, u_min, u_max, axis_guard):
        self.kind = kind
        self.params = dict(params)
        self.u_min = float(u_min)
        self.u_max = float(u_max)
        self.axis_guard = float(axis_guard)
        self._terms = terms          # scalar u -> (E, G, E_u, G_u, phi)
        self._vals = vals            # batch u -> (phi, dphi, d2phi, psi, dpsi, d2psi)
        if not (self.u_min < self.u_max):
            raise ProfileError(f"empty chart: u_min={self.u_min}, u_max={self.u_max}")
        if self.axis_guard <= 0.0:
            raise ProfileError("axis_guard must be positive")
        self._check_regular()
        self.closes_at_min = self._closes_smoothly(self.u_min)
        self.closes_at_max = self._closes_smoothly(self.u_max)

    def _check_regular(self):
        probe = np.linspace(self.u_min, self.u_max, 33)
        phi, dphi, _, _, dpsi, _ = self._vals(probe)
        E = dphi * dphi + dpsi * dpsi
        if not np.all(np.isfinite(E)) or np.any(E <= 0.0):
            raise ProfileError("profile is not regular: E <= 0 somewhere on the chart")
        if np.all(phi <= self.axis_guard):
            raise ProfileError("entire chart lies inside the axis guard")

    def _closes_smoothly(self, u_end):
        phi, dphi, _, _, dpsi, _ = (float(x) for x in self._vals(u_end))
        if abs(phi) > _CLOSURE_PHI_TOL * max(1.0, self.scale()):
            return False
        slope = abs(dphi) / math.sqrt(dphi * dphi + dpsi * dpsi)
        return abs(slope - 1.0) <= _CLOSURE_SLOPE_TOL

    def scale(self) -> float:
        """Characteristic radius, used to normalise tolerances."""
        u_mid = 0.5 * (self.u_min + self.u_max)
        return max(1e-12, float(self._vals(u_mid)[0]))

    # -- chart checks ------------------------------------------------------

    def on_chart(self, u: float) -> bool:
        if not (self.u_min <= u <= self.u_max):
            return False
        return float(self._vals(u)[0]) > self.axis_guard

    def require_chart(self, u: float) -> None:
        if not (self.u_min <= u <= self.u_max):
            raise OffChartError(
                f"u={u!r} outside chart [{self.u_min}, {self.u_max}]")
        if float(self._vals(u)[0]) <= self.axis_guard:
            raise OffChartError(f"phi(u) <= axis guard {self.axis_guard} at u={u!r}")

    def check_point(self, p: SurfacePoint) -> SurfacePoint:
        self.require_chart(p.u)
        return p

    # -- metric and embedding ---------------------------------------------

    def phi(self, u):
        return self._vals(u)[0]

    def psi(self, u):
        return self._vals(u)[3]

    def metric_at(self, u):
        """Return ``(E, G, E_u, G_u, rho)`` at ``u`` (rho = phi(u))."""
        self.require_chart(float(u))
        E, G, E_u, G_u, phi = self._terms(float(u))
        return E, G, E_u, G_u, phi

    def metric_terms(self, u: float):
        """Unchecked scalar metric terms ``(E, G, E_u, G_u, phi)``."""
        return self._terms(u)

    def metric_terms_batch(self, u):
        phi, dphi, d2phi, _, dpsi, d2psi = self._vals(u)
        E = dphi * dphi + dpsi * dpsi
        E_u = 2.0 * (dphi * d2phi + dpsi * d2psi)
        G_u = 2.0 * phi * dphi
        return E, phi * phi, E_u, G_u, phi

    def embed(self, p: SurfacePoint) -> np.ndarray:
        """Embedding r(u, v) = (phi cos v, phi sin v, psi) in 3-space."""
        self.check_point(p)
        phi, _, _, psi, _, _ = (float(x) for x in self._vals(p.u))
        return np.array([phi * math.cos(p.v), phi * math.sin(p.v), psi])

    def embed_batch(self, u, v):
        phi, _, _, psi, _, _ = self._vals(u)
        v = np.asarray(v, dtype=float)
        return np.stack([phi * np.cos(v), phi * np.sin(v),
                         psi * np.ones_like(v)], axis=-1)

    def embedding_frame(self, p: SurfacePoint):
        """Unit frame vectors (e_parallel, e_meridian) in 3-space at p."""
        self.check_point(p)
        _, dphi, _, _, dpsi, _ = (float(x) for x in self._vals(p.u))
        cv, sv = math.cos(p.v), math.sin(p.v)
        e_par = np.array([-sv, cv, 0.0])
        inv_sqrt_e = 1.0 / math.sqrt(dphi * dphi + dpsi * dpsi)
        e_mer = np.array([dphi * cv, dphi * sv, dpsi]) * inv_sqrt_e
        return e_par, e_mer

    # -- headings ----------------------------------------------------------

    def tangent_from_heading(self, p: SurfacePoint, theta: float) -> TangentVector:
        """Unit tangent ``cos(theta) e_parallel + sin(theta) e_meridian``."""
        self.check_point(p)
        return TangentVector(p, math.cos(theta), math.sin(theta))

    def heading_from_tangent(self, t: TangentVector):
        """Return ``(theta, alpha, beta)`` for a nonzero tangent.

        ``theta = atan2(a_mer, a_par)`` in (-pi, pi]; ``alpha = theta`` is
        the signed angle with the parallel and ``beta = pi/2 - theta`` the
        signed angle with the meridian.
        """
        if t.norm() == 0.0:
            raise ValueError("zero tangent has no heading")
        theta = math.atan2(t.a_mer, t.a_par)
        if theta <= -math.pi:
            theta = math.pi
        return theta, theta, 0.5 * math.pi - theta


_DEFAULTS = {
    "sphere": lambda p: (0.0, math.pi, 1e-6 * p["radius"]),
    "cylinder": lambda p: (-20.0, 20.0, 1e-6 * p["radius"]),
    "cone": lambda p: (0.0, 20.0, 1e-6),
    "paraboloid": lambda p: (0.0, 10.0, 1e-6),
    "catenoid": lambda p: (-3.0 * p["a"], 3.0 * p["a"], 1e-6 * p["a"]),
    "torus": lambda p: (-4.0 * math.pi, 4.0 * math.pi, 1e-6 * p["R"]),
    "plane": lambda p: (0.0, 50.0, 1e-6),
}


def make_surface(kind: str, *, u_min=None, u_max=None, axis_guard=None,
                 **params) -> ProfileSurface:
    """Build a catalogue surface or a custom spline-profile surface.

    Catalogue kinds and their parameters:

    ========== ============================ ==========================
    kind       parameters                   profile
    ========== ============================ ==========================
    sphere     radius                       (R sin u, R cos u)
    cylinder   radius                       (R, u)
    cone       slope                        (u, slope * u)
    paraboloid a                            (u, u**2 / (2 a))
    catenoid   a                            (a cosh(u/a), u)
    torus      R, r  (0 < r < R)            (R + r cos u, r sin u)
    plane      none                         (u, 0)
    custom     samples: rows of (u,phi,psi) C2 not-a-knot spline
    ========== ============================ ==========================

    ``u_min``/``u_max``/``axis_guard`` override per-kind defaults.
    """
    if kind == "sphere":
        R = _positive(params, "radius", kind)
        terms, vals = _sphere_fns(R)
        norm_params = {"radius": R}
    elif kind == "cylinder":
        R = _positive(params, "radius", kind)
        terms, vals = _cylinder_fns(R)
        norm_params = {"radius": R}
    elif kind == "cone":
        try:
            slope = float(params["slope"])
        except KeyError:
            raise ProfileError("cone requires parameter 'slope'") from None
        if not math.isfinite(slope):
            raise ProfileError("cone slope must be finite")
        terms, vals = _cone_fns(slope)
        norm_params = {"slope": slope}
    elif kind == "paraboloid":
        a = _positive(params, "a", kind)
        terms, vals = _paraboloid_fns(a)
        norm_params = {"a": a}
    elif kind == "catenoid":
        a = _positive(params, "a", kind)
        terms, vals = _catenoid_fns(a)
        norm_params = {"a": a}
    elif kind == "torus":
        R = _positive(params, "R", kind)
        r = _positive(params, "r", kind)
        if r >= R:
            raise ProfileError(f"torus requires r < R, got R={R}, r={r}")
        terms, vals = _torus_fns(R, r)
        norm_params = {"R": R, "r": r}
    elif kind == "plane":
        terms, vals = _plane_fns()
        norm_params = {}
    elif kind == "custom":
        if "samples" not in params:
            raise ProfileError("custom profile requires 'samples'")
        terms, vals, span = _custom_fns(params["samples"])
        norm_params = {"samples": np.asarray(params["samples"], float).tolist()}
        if u_min is None:
            u_min = span[0]
        if u_max is None:
            u_max = span[1]
    else:
        raise ProfileError(f"unknown surface kind {kind!r}; "
                           f"expected one of {CATALOGUE}")

    if kind != "custom":
        extra = set(params) - set(norm_params)
        if extra:
            raise ProfileError(f"{kind}: unknown parameters {sorted(extra)}")
        d_min, d_max, d_guard = _DEFAULTS[kind](norm_params)
    else:
        d_min, d_max, d_guard = u_min, u_max, 1e-6

    return ProfileSurface(
        kind, norm_params, terms, vals,
        u_min=d_min if u_min is None else float(u_min),
        u_max=d_max if u_max is None else float(u_max),
        axis_guard=d_guard if axis_guard is None else float(axis_guard),
    )
