"""Homogeneous elliptic polynomial symbols and their exact differential calculus.

A symbol is a real homogeneous polynomial P of even degree m in n >= 2
variables, stored as a map from multi-indices to coefficients.  All
differentiation is done on the coefficients, so derivative values are exact up
to evaluation round-off.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib


class SymbolError(ValueError):
    """Invalid symbol data (bad multi-indices, degree, or dimension)."""


class DimensionMismatch(SymbolError):
    """Evaluation point has the wrong number of coordinates."""


def _canonical_terms(n, m, terms):
    """Merge duplicate multi-indices and sort graded-lexicographically."""
    merged = {}
    for alpha, c in terms:
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != n:
            raise SymbolError(f"multi-index {alpha} has length {len(alpha)}, expected {n}")
        if any(a < 0 for a in alpha):
            raise SymbolError(f"multi-index {alpha} has a negative entry")
        if sum(alpha) != m:
            raise SymbolError(f"multi-index {alpha} has degree {sum(alpha)}, expected {m}")
        c = float(c)
        if not math.isfinite(c):
            raise SymbolError(f"non-finite coefficient for {alpha}")
        merged[alpha] = merged.get(alpha, 0.0) + c
    cleaned = {a: c for a, c in merged.items() if c != 0.0}
    if not cleaned:
        raise SymbolError("symbol has no nonzero terms")
    return tuple(sorted(cleaned.items()))


@dataclass(frozen=True)
class PolySymbol:
    """Homogeneous polynomial P(xi) = sum_alpha c_alpha xi^alpha with |alpha| = m.

    Immutable after construction; all operations are pure functions, safe for
    concurrent use.  The degree m must be even and >= 2; m = 2 is accepted but
    flagged as the classical (order-two) regime, which the higher-order theory
    does not target.
    """

    n: int
    m: int
    terms: tuple = field(default=())

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise SymbolError(f"dimension n must be an integer >= 2, got {self.n}")
        if int(self.m) != self.m or self.m < 2 or self.m % 2 != 0:
            raise SymbolError(f"degree m must be an even integer >= 2, got {self.m}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "terms", _canonical_terms(self.n, self.m, self.terms))

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_dict(cls, n, m, coeffs):
        """Build from a {multi-index tuple: coefficient} mapping."""
        return cls(n=n, m=m, terms=tuple(coeffs.items()))

    @property
    def classical_regime(self):
        """True for m = 2 (classical Schrodinger scaling, kept for sanity checks)."""
        return self.m == 2

    # -- evaluation -----------------------------------------------------------

    def __call__(self, xi):
        return self.evaluate(xi)

    def evaluate(self, xi):
        """Evaluate P at one point or at an array of points with shape (..., n)."""
        xi = np.asarray(xi, dtype=float)
        if xi.shape[-1] != self.n:
            raise DimensionMismatch(f"point has dimension {xi.shape[-1]}, symbol has n={self.n}")
        out = np.zeros(xi.shape[:-1], dtype=float)
        for alpha, c in self.terms:
            mono = np.full(xi.shape[:-1], c, dtype=float)
            for i, a in enumerate(alpha):
                if a:
                    mono = mono * xi[..., i] ** a
            out += mono
        return out if out.shape else float(out)

    def gradient(self, xi):
        """Exact gradient, evaluated at one point or an array of points (..., n)."""
        xi = np.asarray(xi, dtype=float)
        if xi.shape[-1] != self.n:
            raise DimensionMismatch(f"point has dimension {xi.shape[-1]}, symbol has n={self.n}")
        grad = np.zeros(xi.shape, dtype=float)
        for i in range(self.n):
            for alpha, c in self._partial(i).items():
                mono = np.full(xi.shape[:-1], c, dtype=float)
                for j, a in enumerate(alpha):
                    if a:
                        mono = mono * xi[..., j] ** a
                grad[..., i] += mono
        return grad

    def hessian(self, xi):
        """Exact Hessian matrix (or stacked matrices for points shaped (..., n))."""
        xi = np.asarray(xi, dtype=float)
        if xi.shape[-1] != self.n:
            raise DimensionMismatch(f"point has dimension {xi.shape[-1]}, symbol has n={self.n}")
        hess = np.zeros(xi.shape[:-1] + (self.n, self.n), dtype=float)
        for i in range(self.n):
            dpi = self._partial(i)
            for j in range(i, self.n):
                acc = np.zeros(xi.shape[:-1], dtype=float)
                for alpha, c in _differentiate(dpi, j).items():
                    mono = np.full(xi.shape[:-1], c, dtype=float)
                    for k, a in enumerate(alpha):
                        if a:
                            mono = mono * xi[..., k] ** a
                    acc += mono
                hess[..., i, j] = acc
                if j != i:
                    hess[..., j, i] = acc
        return hess

    def _partial(self, i):
        """Coefficient map of dP/dxi_i (cached per instance)."""
        cache = self.__dict__.setdefault("_partial_cache", {})
        if i not in cache:
            cache[i] = _differentiate(dict(self.terms), i)
        return cache[i]

    def partial_derivative(self, order):
        """Return the coefficient map of d^alpha P for a multi-index `order`.

        The result has homogeneous degree m - |order| (empty map once the
        degree is exhausted).  Mixed partials commute exactly because the
        differentiation acts on coefficients.
        """
        coeffs = dict(self.terms)
        for i, a in enumerate(order):
            for _ in range(int(a)):
                coeffs = _differentiate(coeffs, i)
        return coeffs

    # -- directional calculus ---------------------------------------------------

    def line_coefficients(self, xi, eta):
        """Coefficients g_0..g_m of s |-> P(xi + s*eta), vectorized over rows.

        `xi` and `eta` broadcast to shape (..., n); the result has shape
        (..., m+1).  The j-th directional derivative at xi along eta is
        j! * g_j, so a single call yields every order at once.
        """
        xi = np.asarray(xi, dtype=float)
        eta = np.asarray(eta, dtype=float)
        if xi.shape[-1] != self.n or eta.shape[-1] != self.n:
            raise DimensionMismatch("xi/eta dimension does not match symbol")
        base = np.broadcast(xi[..., 0], eta[..., 0]).shape
        out = np.zeros(base + (self.m + 1,), dtype=float)
        for alpha, c in self.terms:
            conv = None
            for i, a in enumerate(alpha):
                x = np.broadcast_to(xi[..., i], base)
                e = np.broadcast_to(eta[..., i], base)
                fac = np.empty(base + (a + 1,), dtype=float)
                for l in range(a + 1):
                    fac[..., l] = math.comb(a, l) * x ** (a - l) * e**l
                conv = fac if conv is None else _poly_mul(conv, fac)
            if conv is None:  # constant term cannot occur (m >= 2)
                continue
            out[..., : conv.shape[-1]] += c * conv
        return out

    def directional_derivative(self, xi, eta, j):
        """j-th directional derivative of P at xi along the unit vector eta.

        Orders above m return 0.0 exactly (the degree is exhausted).  The
        direction must be a unit vector to 1e-12.
        """
        if j < 1:
            raise SymbolError(f"derivative order must be >= 1, got {j}")
        eta_arr = np.asarray(eta, dtype=float)
        norm = np.linalg.norm(eta_arr, axis=-1)
        if np.any(np.abs(norm - 1.0) > 1e-12):
            raise SymbolError("direction eta must be a unit vector (|eta| = 1 within 1e-12)")
        if j > self.m:
            return 0.0 if np.asarray(xi).ndim == 1 else np.zeros(np.asarray(xi).shape[:-1])
        coeffs = self.line_coefficients(xi, eta)
        val = math.factorial(j) * coeffs[..., j]
        return float(val) if np.ndim(val) == 0 else val


def _differentiate(coeffs, i):
    """Differentiate a coefficient map with respect to variable i."""
    out = {}
    for alpha, c in coeffs.items():
        if alpha[i] == 0:
            continue
        beta = alpha[:i] + (alpha[i] - 1,) + alpha[i + 1 :]
        out[beta] = out.get(beta, 0.0) + c * alpha[i]
    return out


def _poly_mul(a, b):
    """Multiply polynomial coefficient arrays along the last axis."""
    la, lb = a.shape[-1], b.shape[-1]
    out = np.zeros(a.shape[:-1] + (la + lb - 1,), dtype=float)
    for k in range(lb):
        out[..., k : k + la] += a * b[..., k : k + 1]
    return out


def evaluate_poly_map(coeffs, n, xi):
    """Evaluate a raw coefficient map (as from `partial_derivative`) at points."""
    xi = np.asarray(xi, dtype=float)
    if xi.shape[-1] != n:
        raise DimensionMismatch(f"point has dimension {xi.shape[-1]}, expected {n}")
    out = np.zeros(xi.shape[:-1], dtype=float)
    for alpha, c in coeffs.items():
        mono = np.full(xi.shape[:-1], c, dtype=float)
        for i, a in enumerate(alpha):
            if a:
                mono = mono * xi[..., i] ** a
        out += mono
    return out if out.shape else float(out)


# -- sphere sampling and ellipticity ------------------------------------------


def sphere_samples(n, density):
    """Quasi-uniform samples of the unit sphere S^{n-1}, shape (N, n).

    Uses the golden-angle lattice on the circle (n=2) and the Fibonacci
    lattice on S^2 (n=3); for n >= 4 a product-of-angles grid.
    """
    if n == 2:
        theta = (np.arange(density) + 0.5) * (2.0 * np.pi / density)
        return np.column_stack([np.cos(theta), np.sin(theta)])
    if n == 3:
        k = np.arange(density)
        golden = (1.0 + 5.0**0.5) / 2.0
        z = 1.0 - (2.0 * k + 1.0) / density
        phi = 2.0 * np.pi * k / golden
        r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    # product-of-angles grid in hyperspherical coordinates
    per_axis = max(6, int(round(density ** (1.0 / (n - 1)))))
    grids = [np.linspace(0.0, np.pi, per_axis, endpoint=False) + np.pi / (2 * per_axis)
             for _ in range(n - 2)]
    grids.append(np.linspace(0.0, 2.0 * np.pi, 2 * per_axis, endpoint=False))
    mesh = np.meshgrid(*grids, indexing="ij")
    angles = np.stack([g.ravel() for g in mesh], axis=-1)
    pts = np.empty((angles.shape[0], n))
    sin_prod = np.ones(angles.shape[0])
    for i in range(n - 1):
        pts[:, i] = sin_prod * np.cos(angles[:, i])
        sin_prod = sin_prod * np.sin(angles[:, i])
    pts[:, n - 1] = sin_prod
    return pts


MIN_SPHERE_DENSITY = 256


@dataclass(frozen=True)
class EllipticityReport:
    """Certified-at-resolution minimum of P over the unit sphere."""

    positive: bool
    min_value: float
    argmin: tuple
    density: int

    def to_dict(self):
        return {
            "positive": self.positive,
            "min_value": self.min_value,
            "argmin": list(self.argmin),
            "density": self.density,
        }


def check_elliptic(symbol, density=4096, descent_steps=50, n_starts=10):
    """Minimum of P over the sampled unit sphere, with local descent refinement.

    A positive minimum certifies ellipticity at the sampling resolution; the
    minimizing direction is reported as a witness either way.
    """
    if density < MIN_SPHERE_DENSITY:
        raise SymbolError(f"sphere sampling density must be >= {MIN_SPHERE_DENSITY}")
    pts = sphere_samples(symbol.n, density)
    vals = symbol.evaluate(pts)
    order = np.argsort(vals)
    best_val = float(vals[order[0]])
    best_pt = pts[order[0]]
    for idx in order[:n_starts]:
        w = pts[idx].copy()
        v = float(symbol.evaluate(w))
        step = 0.1
        for _ in range(descent_steps):
            g = symbol.gradient(w)
            g_tan = g - np.dot(g, w) * w  # project onto the tangent space
            gn = np.linalg.norm(g_tan)
            if gn < 1e-15:
                break
            cand = w - step * g_tan / gn
            cand /= np.linalg.norm(cand)
            cv = float(symbol.evaluate(cand))
            if cv < v:
                w, v = cand, cv
                step *= 1.2
            else:
                step *= 0.5
        if v < best_val:
            best_val, best_pt = v, w
    return EllipticityReport(
        positive=best_val > 0.0,
        min_value=best_val,
        argmin=tuple(float(x) for x in best_pt),
        density=density,
    )


# -- file round-trip ------------------------------------------------------------


def symbol_to_dict(symbol):
    return {
        "n": symbol.n,
        "m": symbol.m,
        "terms": [{"alpha": list(alpha), "c": c} for alpha, c in symbol.terms],
    }


def symbol_from_dict(data, normalize_sign=True):
    """Build a symbol from parsed file data.

    If P is negative on the sphere (the mirrored ellipticity convention), the
    coefficients are negated at load time so the unit level set is always
    {P = 1}; the flip is recorded on the returned symbol as `sign_flipped`.
    """
    try:
        terms = [(tuple(t["alpha"]), float(t["c"])) for t in data["terms"]]
        sym = PolySymbol(n=int(data["n"]), m=int(data["m"]), terms=tuple(terms))
    except (KeyError, TypeError) as exc:
        raise SymbolError(f"malformed symbol data: {exc}") from exc
    flipped = False
    if normalize_sign:
        probe = symbol_from_probe_sign(sym)
        if probe < 0:
            sym = PolySymbol(n=sym.n, m=sym.m,
                             terms=tuple((a, -c) for a, c in sym.terms))
            flipped = True
    sym.__dict__["sign_flipped"] = flipped
    return sym


def symbol_from_probe_sign(symbol):
    """Sign of P on a coarse sphere sample (-1, 0, or +1)."""
    vals = symbol.evaluate(sphere_samples(symbol.n, MIN_SPHERE_DENSITY))
    if np.all(vals > 0):
        return 1
    if np.all(vals < 0):
        return -1
    return 0


def save_symbol(symbol, path):
    """Write the symbol as JSON; coefficients round-trip bit-exactly."""
    path = Path(path)
    path.write_text(json.dumps(symbol_to_dict(symbol), indent=2) + "\n")


def load_symbol(path):
    """Read a symbol from a .json or .toml file (auto-detected by extension)."""
    path = Path(path)
    if path.suffix.lower() == ".toml":
        data = tomllib.loads(path.read_text())
    elif path.suffix.lower() == ".json":
        data = json.loads(path.read_text())
    else:
        raise SymbolError(f"unsupported symbol file extension: {path.suffix!r}")
    return symbol_from_dict(data)


# -- stock symbols used throughout the experiments -------------------------------


def axis_powers(n, m):
    """xi_1^m + ... + xi_n^m; its unit level set has the maximal contact order m."""
    terms = []
    for i in range(n):
        alpha = [0] * n
        alpha[i] = m
        terms.append((tuple(alpha), 1.0))
    return PolySymbol(n=n, m=m, terms=tuple(terms))


def radial_power(n, half_power=2):
    """(xi_1^2 + ... + xi_n^2)^half_power, the round (curvature-one) reference."""
    from itertools import product

    coeffs = {}
    for combo in product(range(n), repeat=half_power):
        alpha = [0] * n
        for i in combo:
            alpha[i] += 2
        coeffs[tuple(alpha)] = coeffs.get(tuple(alpha), 0.0) + 1.0
    return PolySymbol(n=n, m=2 * half_power, terms=tuple(coeffs.items()))
