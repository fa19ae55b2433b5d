"""Closed-form calculus for polynomial-times-Gaussian integrands.

Everything the element algebra computes reduces to manipulating functions
of the form

    F(z) = [sum_g c_g z^g] * exp(-1/2 z^T P z + q.z + r),   z in C^n,

with P complex symmetric.  Differentiation and partial substitution stay
inside the family; full integration over R^n has a closed form whenever
Re(P) is positive definite.  The integral branch of det(P)^(-1/2) is fixed
by taking principal logarithms of the eigenvalues of P, all of which have
positive real part when Re(P) is positive definite.
"""

import numpy as np

from .errors import DivergentNormError

# Smallest admissible eigenvalue of the symmetrized real part of a
# quadratic form before the pair integral is declared divergent.
PD_TOLERANCE = 1e-10

_TWO_PI = 2.0 * np.pi


def min_real_eigenvalue(quad: np.ndarray) -> float:
    """Smallest eigenvalue of the symmetrized real part of ``quad``."""
    re = np.asarray(quad).real
    sym = 0.5 * (re + re.T)
    return float(np.linalg.eigvalsh(sym)[0])


def _gaussian_moment(gamma: tuple[int, ...], mu: np.ndarray, sigma: np.ndarray,
                     cache: dict) -> complex:
    """E[z^gamma] for a (complex) Gaussian with mean mu, covariance sigma.

    Uses the recursion E[z_i z^g] = mu_i E[z^g] + sum_j g_j sigma_ij E[z^(g-e_j)],
    which follows from differentiating the moment generating function.
    """
    if all(k == 0 for k in gamma):
        return 1.0 + 0.0j
    hit = cache.get(gamma)
    if hit is not None:
        return hit
    i = next(k for k, g in enumerate(gamma) if g > 0)
    rest = list(gamma)
    rest[i] -= 1
    rest_t = tuple(rest)
    total = mu[i] * _gaussian_moment(rest_t, mu, sigma, cache)
    for j, gj in enumerate(rest_t):
        if gj > 0:
            lower = list(rest_t)
            lower[j] -= 1
            total += gj * sigma[i, j] * _gaussian_moment(tuple(lower), mu, sigma, cache)
    cache[gamma] = total
    return total


class PolyGaussian:
    """A polynomial multiplied by a complex Gaussian exponential."""

    __slots__ = ("poly", "quad", "lin", "const")

    def __init__(self, poly: dict, quad, lin, const: complex = 0.0):
        self.quad = np.array(quad, dtype=complex)
        self.lin = np.array(lin, dtype=complex).reshape(-1)
        self.const = complex(const)
        n = self.lin.shape[0]
        if self.quad.shape != (n, n):
            raise ValueError("quadratic form shape does not match dimension")
        self.poly = {}
        for g, c in poly.items():
            g = tuple(int(k) for k in g)
            if len(g) != n:
                raise ValueError("monomial length does not match dimension")
            c = complex(c)
            if c != 0:
                self.poly[g] = self.poly.get(g, 0.0) + c

    @property
    def dim(self) -> int:
        return self.lin.shape[0]

    def differentiate(self, axis: int) -> "PolyGaussian":
        """Partial derivative with respect to coordinate ``axis``."""
        new: dict = {}

        def add(g, c):
            if c != 0:
                new[g] = new.get(g, 0.0) + c

        row = self.quad[axis]
        qa = self.lin[axis]
        for g, c in self.poly.items():
            if g[axis] > 0:
                lower = list(g)
                lower[axis] -= 1
                add(tuple(lower), c * g[axis])
            add(g, c * qa)
            for j, pij in enumerate(row):
                if pij != 0:
                    upper = list(g)
                    upper[j] += 1
                    add(tuple(upper), -c * pij)
        return PolyGaussian(new, self.quad, self.lin, self.const)

    def substitute(self, fixed: dict[int, complex]) -> "PolyGaussian":
        """Pin a subset of coordinates to values; returns the restriction."""
        keep = [i for i in range(self.dim) if i not in fixed]
        if not keep:
            raise ValueError("substitute must leave at least one coordinate; use evaluate")
        fix = sorted(fixed)
        w = np.array([fixed[i] for i in fix], dtype=complex)
        P = self.quad
        q = self.lin
        new_quad = P[np.ix_(keep, keep)]
        new_lin = q[keep] - P[np.ix_(keep, fix)] @ w
        new_const = self.const + q[fix] @ w - 0.5 * (w @ P[np.ix_(fix, fix)] @ w)
        new_poly: dict = {}
        for g, c in self.poly.items():
            factor = c
            for pos, i in enumerate(fix):
                if g[i]:
                    factor *= w[pos] ** g[i]
            key = tuple(g[i] for i in keep)
            if factor != 0:
                new_poly[key] = new_poly.get(key, 0.0) + factor
        return PolyGaussian(new_poly, new_quad, new_lin, new_const)

    def evaluate(self, z) -> complex:
        """Value of the function at a single point."""
        z = np.asarray(z, dtype=complex).reshape(-1)
        if z.shape[0] != self.dim:
            raise ValueError("point dimension mismatch")
        expo = -0.5 * (z @ self.quad @ z) + self.lin @ z + self.const
        total = 0.0 + 0.0j
        for g, c in self.poly.items():
            mono = c
            for zi, gi in zip(z, g):
                if gi:
                    mono *= zi ** gi
            total += mono
        return complex(total * np.exp(expo))

    def integrate(self, pd_tolerance: float = PD_TOLERANCE) -> complex:
        """Integral over all of R^n.

        Raises DivergentNormError when the symmetrized real part of the
        quadratic form has an eigenvalue <= ``pd_tolerance``.
        """
        if not self.poly:
            return 0.0 + 0.0j
        n = self.dim
        min_eig = min_real_eigenvalue(self.quad)
        if min_eig <= pd_tolerance:
            raise DivergentNormError(
                f"combined quadratic form is not positive definite "
                f"(min real-part eigenvalue {min_eig:.3e})",
                min_eigenvalue=min_eig,
            )
        # All eigenvalues of a complex symmetric matrix with positive definite
        # real part lie in the right half plane, so principal logs give the
        # analytic branch of det^(1/2).
        lam = np.linalg.eigvals(self.quad)
        sqrt_det = np.exp(0.5 * np.sum(np.log(lam)))
        sigma = np.linalg.inv(self.quad)
        mu = sigma @ self.lin
        base = _TWO_PI ** (0.5 * n) / sqrt_det * np.exp(
            0.5 * (self.lin @ sigma @ self.lin) + self.const
        )
        cache: dict = {}
        total = 0.0 + 0.0j
        for g, c in self.poly.items():
            total += c * _gaussian_moment(g, mu, sigma, cache)
        return complex(base * total)
