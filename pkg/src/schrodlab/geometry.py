"""Geometry of the compact unit level set Sigma = {P = 1}.

The surface is reached through the radial parametrization xi = rho(omega)*omega
with rho = P(omega)^(-1/m), which satisfies P(xi) = 1 up to round-off by
homogeneity.  Contact order (finite type), convexity via the support
inequality, Gauss-Kronecker curvature, and support points (inverse Gauss map)
are all certified at sampling resolution and refined locally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .symbols import PolySymbol, check_elliptic, sphere_samples


class GeometryError(ValueError):
    """Precondition failures (non-elliptic symbol, nonconvex surface, ...)."""


# -- radial parametrization -----------------------------------------------------


def radial_scale(symbol, omega):
    """rho(omega) = P(omega)^(-1/m) so that P(rho*omega) = 1."""
    vals = symbol.evaluate(omega)
    if np.any(np.asarray(vals) <= 0):
        raise GeometryError("P is not positive along the requested directions")
    return np.asarray(vals) ** (-1.0 / symbol.m)


@dataclass(frozen=True)
class SurfacePoint:
    """A point on Sigma with its outward unit normal and |grad P^{1/m}|."""

    point: tuple
    normal: tuple
    grad_norm_phi: float  # |grad P|/m evaluated on Sigma

    def to_dict(self):
        return {"point": list(self.point), "normal": list(self.normal),
                "grad_norm_phi": self.grad_norm_phi}


def surface_point(symbol, omega):
    """Lift a unit direction to Sigma and package its first-order data."""
    omega = np.asarray(omega, dtype=float)
    rho = radial_scale(symbol, omega)
    xi = rho * omega
    grad = symbol.gradient(xi)
    gn = float(np.linalg.norm(grad))
    return SurfacePoint(point=tuple(float(v) for v in xi),
                        normal=tuple(float(v) for v in grad / gn),
                        grad_norm_phi=gn / symbol.m)


@dataclass(frozen=True)
class SurfaceSamples:
    """Vectorized surface sample set (struct-of-arrays)."""

    directions: np.ndarray  # (N, n) unit directions
    points: np.ndarray      # (N, n) points on Sigma
    gradients: np.ndarray   # (N, n) grad P at the points
    rho: np.ndarray         # (N,) radial scales

    def __len__(self):
        return self.points.shape[0]


def sample_surface(symbol, density):
    """Sample Sigma through the radial parametrization (requires ellipticity)."""
    ell = check_elliptic(symbol, density=max(density, 256))
    if not ell.positive:
        raise GeometryError(
            f"symbol is not elliptic: min P on sphere = {ell.min_value} near {ell.argmin}")
    omega = sphere_samples(symbol.n, density)
    rho = radial_scale(symbol, omega)
    points = rho[:, None] * omega
    grads = symbol.gradient(points)
    return SurfaceSamples(directions=omega, points=points, gradients=grads, rho=rho)


# -- finite type ------------------------------------------------------------------


@dataclass(frozen=True)
class TypeReport:
    """Smallest certified contact order k with its lower bound delta."""

    k: int | None
    delta: float
    certified: bool
    grid_min_per_order: tuple   # grid minima of the cumulative sums, orders 1..m
    witness: tuple | None       # (xi, eta) minimizing pair for the failing order
    density: int

    def to_dict(self):
        return {
            "k": self.k, "delta": self.delta, "certified": self.certified,
            "grid_min_per_order": list(self.grid_min_per_order),
            "witness": [list(w) for w in self.witness] if self.witness else None,
            "density": self.density,
        }


def _angles_to_unit(angles, n):
    """Hyperspherical angles -> unit vector in R^n (n-1 angles)."""
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    v = np.empty(n)
    sin_prod = 1.0
    for i in range(n - 1):
        v[i] = sin_prod * math.cos(angles[i])
        sin_prod *= math.sin(angles[i])
    v[n - 1] = sin_prod
    return v


def _unit_to_angles(v):
    v = np.asarray(v, dtype=float)
    n = v.shape[0]
    angles = []
    sin_prod = 1.0
    for i in range(n - 1):
        c = np.clip(v[i] / sin_prod if sin_prod > 1e-300 else 1.0, -1.0, 1.0)
        a = math.acos(c)
        if i == n - 2:
            # last angle lives on the full circle
            s = v[n - 1] / sin_prod if sin_prod > 1e-300 else 0.0
            a = math.atan2(s, c)
        angles.append(a)
        sin_prod *= math.sin(a) if i < n - 2 else 1.0
    return np.array(angles)


def _cumulative_derivative_sums(symbol, xi_rows, eta_rows):
    """Sums over j<=k of |j-th directional derivative|, for k = 1..m."""
    coeffs = symbol.line_coefficients(xi_rows, eta_rows)
    facts = np.array([math.factorial(j) for j in range(1, symbol.m + 1)])
    derivs = np.abs(coeffs[..., 1:] * facts)
    return np.cumsum(derivs, axis=-1)


def detect_type(symbol, density=2048, delta_min=1e-6, refine_starts=20):
    """Smallest k in [2, m] whose derivative-sum minimum over Sigma x S^{n-1}
    exceeds delta_min, with Nelder-Mead refinement from the worst grid pairs.

    Returns a TypeReport; `certified` is False only if even k = m fails, which
    for an elliptic symbol indicates delta_min was set above m! * min P.
    """
    m, n = symbol.m, symbol.n
    if n == 2:
        surf_density = dir_density = density
    else:
        surf_density = min(density, 4096)
        dir_density = min(density, 1024)
    samples = sample_surface(symbol, surf_density)
    etas = sphere_samples(n, dir_density)

    # single pass over the pair grid: per order, keep the `refine_starts`
    # smallest values with their pair indices
    candidates = [[] for _ in range(m)]
    n_eta = len(etas)
    chunk = max(1, (4 * 10**5) // max(1, n_eta))
    for start in range(0, len(samples), chunk):
        xi_c = samples.points[start:start + chunk][:, None, :]
        sums = _cumulative_derivative_sums(symbol, xi_c, etas[None, :, :])
        for k in range(m):
            flat = sums[..., k].ravel()
            take = min(refine_starts, flat.size)
            part = np.argpartition(flat, take - 1)[:take]
            for b in part:
                i, j = divmod(int(b), n_eta)
                candidates[k].append((float(flat[b]), start + i, j))
    for k in range(m):
        candidates[k].sort()
        del candidates[k][refine_starts:]
    grid_min = np.array([c[0][0] for c in candidates])

    def refined_min(k_order):
        best = grid_min[k_order - 1]
        _, bi, bj = candidates[k_order - 1][0]
        best_pair = (samples.points[bi], etas[bj])

        def objective(z):
            xi_dir = _angles_to_unit(z[: n - 1], n)
            eta = _angles_to_unit(z[n - 1:], n)
            rho = float(symbol.evaluate(xi_dir)) ** (-1.0 / m)
            s = _cumulative_derivative_sums(symbol, rho * xi_dir, eta)
            return float(s[..., k_order - 1])

        for _, i, j in candidates[k_order - 1]:
            z0 = np.concatenate([_unit_to_angles(samples.directions[i]),
                                 _unit_to_angles(etas[j])])
            res = minimize(objective, z0, method="Nelder-Mead",
                           options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 400})
            if res.fun < best:
                best = float(res.fun)
                xi_dir = _angles_to_unit(res.x[: n - 1], n)
                rho = float(symbol.evaluate(xi_dir)) ** (-1.0 / m)
                best_pair = (rho * xi_dir, _angles_to_unit(res.x[n - 1:], n))
        return best, best_pair

    for k in range(2, m + 1):
        if grid_min[k - 1] <= delta_min:
            continue  # the grid already witnesses failure below delta_min
        delta, pair = refined_min(k)
        if delta > delta_min:
            return TypeReport(k=k, delta=float(delta), certified=True,
                              grid_min_per_order=tuple(float(v) for v in grid_min),
                              witness=None, density=density)
    delta, pair = refined_min(m)
    witness = (tuple(float(v) for v in pair[0]), tuple(float(v) for v in pair[1]))
    return TypeReport(k=None, delta=float(delta), certified=False,
                      grid_min_per_order=tuple(float(v) for v in grid_min),
                      witness=witness, density=density)


# -- convexity --------------------------------------------------------------------


@dataclass(frozen=True)
class ConvexityReport:
    """Support-inequality verdict over sampled pairs of Sigma."""

    convex: bool
    margin: float
    witness: tuple | None  # (xi, zeta) violating pair when nonconvex
    density: int

    def to_dict(self):
        return {
            "convex": self.convex, "margin": self.margin,
            "witness": [list(w) for w in self.witness] if self.witness else None,
            "density": self.density,
        }


def check_convex(symbol, density=2048):
    """Evaluate <zeta - xi, grad P(xi)> over sampled pairs of Sigma.

    Sigma is convex when one of the two one-sided inclusions holds; the margin
    is the worst signed value of the satisfied side (>= -1e-9 passes).  By the
    homogeneity identity <xi, grad P(xi)> = m on Sigma, the pair matrix reduces
    to <zeta, grad P(xi)> - m.
    """
    samples = sample_surface(symbol, density)
    m = float(symbol.m)
    # A[i, j] = <zeta_j, grad P(xi_i)>
    A = samples.gradients @ samples.points.T
    lo = float(A.min()) - m   # min over pairs of <zeta - xi, grad P(xi)>
    hi = float(A.max()) - m   # max over pairs
    margin_in = -hi           # inclusion <zeta - xi, grad> <= 0
    margin_out = lo           # inclusion >= 0
    if margin_in >= margin_out:
        margin, side = margin_in, "inner"
        i, j = np.unravel_index(int(np.argmax(A)), A.shape)
    else:
        margin, side = margin_out, "outer"
        i, j = np.unravel_index(int(np.argmin(A)), A.shape)
    convex = margin >= -1e-9
    witness = None
    if not convex:
        witness = (tuple(float(v) for v in samples.points[i]),
                   tuple(float(v) for v in samples.points[j]))
    return ConvexityReport(convex=bool(convex), margin=margin, witness=witness,
                           density=density)


# -- curvature --------------------------------------------------------------------


def _tangent_basis(normal):
    """Orthonormal basis of the hyperplane normal to the given unit vector."""
    n = normal.shape[0]
    # Householder reflection taking e_1 to the normal; remaining columns span
    # the tangent space.
    sign = 1.0 if normal[0] >= 0 else -1.0
    v = normal.copy()
    v[0] += sign
    v /= np.linalg.norm(v)
    H = np.eye(n) - 2.0 * np.outer(v, v)
    return -sign * H[:, 1:]


def gaussian_curvature(symbol, xi):
    """Gauss-Kronecker curvature of the level set of P through xi.

    Computed from the second fundamental form with respect to the outward
    normal grad P/|grad P|: K = det(E^T Hess P E) / |grad P|^(n-1) over an
    orthonormal tangent basis E.  The round symbol (sum of squares)^{m/2}
    gives K = 1 everywhere on Sigma.
    """
    xi = np.asarray(xi, dtype=float)
    grad = symbol.gradient(xi)
    gn = np.linalg.norm(grad)
    if gn == 0.0:
        raise GeometryError("gradient vanishes; curvature undefined here")
    E = _tangent_basis(grad / gn)
    H = symbol.hessian(xi)
    shape_form = E.T @ H @ E / gn
    if shape_form.shape == (1, 1):
        return float(shape_form[0, 0])
    return float(np.linalg.det(shape_form))


def curvature_zeros(symbol, density=1024, threshold=1e-8):
    """Points of Sigma where the Gauss-Kronecker curvature vanishes.

    Local minima of |K| over the sample grid are refined by direction-space
    minimization; refined points below the threshold are reported (deduplicated
    by proximity).
    """
    samples = sample_surface(symbol, density)
    kvals = np.array([abs(gaussian_curvature(symbol, samples.points[i]))
                      for i in range(len(samples))])
    if symbol.n == 2:
        is_min = (kvals <= np.roll(kvals, 1)) & (kvals <= np.roll(kvals, -1))
        starts = np.nonzero(is_min)[0]
    else:
        cut = np.quantile(kvals, min(1.0, 32.0 / len(kvals)))
        starts = np.nonzero(kvals <= cut)[0]

    def objective(z):
        omega = _angles_to_unit(z, symbol.n)
        xi = radial_scale(symbol, omega) * omega
        return abs(gaussian_curvature(symbol, xi))

    zeros = []
    for i in starts:
        if kvals[i] > max(threshold, 1e4 * threshold * (1.0 + kvals.max())):
            # cheap screen: only refine minima that could plausibly reach zero
            if kvals[i] > 1e-2 * (1.0 + kvals.max()):
                continue
        res = minimize(objective, _unit_to_angles(samples.directions[i]),
                       method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-16, "maxiter": 400})
        if res.fun < threshold:
            omega = _angles_to_unit(res.x, symbol.n)
            xi = radial_scale(symbol, omega) * omega
            zeros.append(tuple(float(v) for v in xi))
    # deduplicate refined points that collapsed to the same zero
    unique = []
    for z in zeros:
        if all(np.linalg.norm(np.subtract(z, u)) > 1e-6 for u in unique):
            unique.append(z)
    return unique


# -- inverse Gauss map --------------------------------------------------------------


def gauss_map_inverse(symbol, eta, convexity=None, density=4096):
    """Support points xi_plus / xi_minus of Sigma in the direction eta.

    xi_plus maximizes <eta, xi> over Sigma (so grad P(xi_plus) is parallel to
    eta) and xi_minus minimizes it.  Requires a convex surface; the support
    height satisfies <eta, xi_plus> * |grad phi(xi_plus)| = 1 with
    phi = P^{1/m}.  Stalls of gradient ascent near curvature-flat points are
    avoided by maximizing the radial height rho(omega)<eta, omega> directly
    (coarse scan + golden-section / simplex refinement).
    """
    eta = np.asarray(eta, dtype=float)
    eta = eta / np.linalg.norm(eta)
    if convexity is None:
        convexity = check_convex(symbol, density=min(density, 2048))
    if not convexity.convex:
        raise GeometryError(
            f"surface is not convex (margin {convexity.margin}); "
            "the Gauss map is not invertible")

    def height(omega):
        return float(radial_scale(symbol, omega) * np.dot(eta, omega))

    def support(direction_sign):
        target = direction_sign * eta
        if symbol.n == 2:
            theta = _golden_max(
                lambda th: direction_sign * height(np.array([math.cos(th), math.sin(th)])),
                density)
            theta = _polish_support_angle(symbol, target, theta)
            omega = np.array([math.cos(theta), math.sin(theta)])
        else:
            pts = sphere_samples(symbol.n, density)
            vals = direction_sign * (radial_scale(symbol, pts) * (pts @ eta))
            best = pts[int(np.argmax(vals))]
            res = minimize(
                lambda z: -direction_sign * height(_angles_to_unit(z, symbol.n)),
                _unit_to_angles(best),
                method="Nelder-Mead",
                options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 800})
            omega = _polish_support_direction(symbol, target, _angles_to_unit(res.x, symbol.n))
        return surface_point(symbol, omega)

    return support(1.0), support(-1.0)


def _polish_support_angle(symbol, eta, theta):
    """Sharpen a support angle by root-finding the normal-alignment condition.

    Height maximization alone stalls at ~sqrt(machine eps) because the height
    is quadratically (or quartically) flat at the top; the alignment function
    cross(grad P, eta) changes sign through the support angle and bisects to
    full precision, including at curvature-flat support points.
    """

    def alignment(th):
        omega = np.array([math.cos(th), math.sin(th)])
        xi = radial_scale(symbol, omega) * omega
        g = symbol.gradient(xi)
        return g[0] * eta[1] - g[1] * eta[0]

    span = 1e-6
    a, b = theta - span, theta + span
    for _ in range(40):
        fa, fb = alignment(a), alignment(b)
        if fa == 0.0:
            return a
        if fb == 0.0:
            return b
        if fa * fb < 0:
            for _ in range(90):
                mid = 0.5 * (a + b)
                fm = alignment(mid)
                if fm == 0.0:
                    return mid
                if fa * fm < 0:
                    b, fb = mid, fm
                else:
                    a, fa = mid, fm
            return 0.5 * (a + b)
        span *= 2.0
        a, b = theta - span, theta + span
    return theta  # alignment never bracketed; keep the golden-section angle


def _polish_support_direction(symbol, eta, omega):
    """Newton-polish an n >= 3 support direction on the stationarity system."""
    from scipy.optimize import root

    T = _tangent_basis(eta / np.linalg.norm(eta))

    def residual(z):
        w = _angles_to_unit(z, symbol.n)
        xi = radial_scale(symbol, w) * w
        return T.T @ symbol.gradient(xi)

    res = root(residual, _unit_to_angles(omega), method="hybr", tol=1e-14)
    cand = _angles_to_unit(res.x, symbol.n)
    # accept by achieved residual, and only if the polish stayed on the same
    # support cap (hybr can report failure after bottoming out at round-off)
    if np.linalg.norm(res.fun) < 1e-9 and np.dot(cand, omega) > 0.99:
        return cand
    return omega


def _golden_max(f, density):
    """Global max of a smooth periodic function: coarse scan + golden section."""
    thetas = (np.arange(density) + 0.5) * (2.0 * math.pi / density)
    vals = np.array([f(t) for t in thetas])
    i = int(np.argmax(vals))
    span = 2.0 * math.pi / density
    a, b = thetas[i] - span, thetas[i] + span
    gr = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - gr * (b - a), a + gr * (b - a)
    fc, fd = f(c), f(d)
    while b - a > 1e-13:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - gr * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + gr * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


# -- composite report -----------------------------------------------------------


@dataclass(frozen=True)
class SurfaceReport:
    """Full geometric verdict for Sigma = {P = 1}."""

    k: int | None
    delta: float
    convex: bool
    margin: float
    curvature_zero_points: tuple
    density: int
    classical_regime: bool = False
    type_report: TypeReport | None = None
    convexity_report: ConvexityReport | None = None

    def to_dict(self):
        return {
            "k": self.k,
            "delta": self.delta,
            "convex": self.convex,
            "margin": self.margin,
            "curvature_zeros": [list(p) for p in self.curvature_zero_points],
            "density": self.density,
            "classical_regime": self.classical_regime,
        }


def analyze_surface(symbol, density=2048, delta_min=1e-6, curvature_density=1024,
                    curvature_threshold=1e-8):
    """Run ellipticity, type detection, convexity, and the curvature scan."""
    ell = check_elliptic(symbol, density=max(density, 4096))
    if not ell.positive:
        raise GeometryError(
            f"symbol is not elliptic: min P on sphere = {ell.min_value} near {ell.argmin}")
    type_rep = detect_type(symbol, density=density, delta_min=delta_min)
    conv_rep = check_convex(symbol, density=min(density, 2048))
    zeros = curvature_zeros(symbol, density=curvature_density,
                            threshold=curvature_threshold)
    return SurfaceReport(
        k=type_rep.k, delta=type_rep.delta,
        convex=conv_rep.convex, margin=conv_rep.margin,
        curvature_zero_points=tuple(zeros), density=density,
        classical_regime=symbol.classical_regime,
        type_report=type_rep, convexity_report=conv_rep)
