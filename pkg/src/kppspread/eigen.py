"""Periodic principal eigenvalues of the drifted operator

    (L_p u)(x) = u'' - 2 p u' + (p^2 + mu(x)) u      on [0, L), periodic,

and the finite-period spreading speed  w_L = min_{p>0} lambda_p(mu_L) / p
with mu_L(x) = mu0(x/L).  As L grows, w_L approaches the limiting speed
min_{k >= M} k / j(k) computed in :mod:`kppspread.theory`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csc_matrix, diags
from scipy.sparse.linalg import splu

from .errors import ConvergenceError, DiscretizationError, ParameterError
from .media import PeriodicProfile
from .theory import _golden_min


@dataclass(eq=False, frozen=True)
class PeriodicOperator:
    """Discretization of L_p on a uniform periodic grid of [0, L)."""

    p: float
    L: float
    mu: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.mu.size < 16:
            raise ParameterError("periodic operator needs at least 16 grid points")
        if self.h * (2.0 * abs(self.p) + 1.0) > 1.0 + 1e-12:
            raise ParameterError(
                "grid too coarse for the drift: need h*(2|p|+1) <= 1 so the "
                "off-diagonals stay nonnegative")

    @property
    def n(self) -> int:
        return self.mu.size

    @property
    def h(self) -> float:
        return self.L / self.mu.size


def _assemble(op: PeriodicOperator) -> csc_matrix:
    h, p, mu = op.h, op.p, op.mu
    n = op.n
    sub = np.full(n - 1, 1.0 / h ** 2 + p / h)     # coefficient of u_{i-1}
    sup = np.full(n - 1, 1.0 / h ** 2 - p / h)     # coefficient of u_{i+1}
    diag = -2.0 / h ** 2 + p * p + mu
    A = diags([sub, diag, sup], [-1, 0, 1], format="lil")
    A[0, n - 1] = 1.0 / h ** 2 + p / h
    A[n - 1, 0] = 1.0 / h ** 2 - p / h
    return A.tocsc()


def principal_eigenvalue(op: PeriodicOperator, tol: float = 1e-11,
                         max_iter: int = 100_000):
    """Largest-real eigenvalue with positive periodic eigenvector.

    Uses shift-invert power iteration: with the step restriction
    h*(2|p|+1) <= 1 the matrix sigma*I - A is a nonsingular M-matrix for any
    shift above the Perron root, so every iterate stays strictly positive
    and the iteration converges to the Perron pair.  The shift is tightened
    adaptively toward the eigenvalue estimate to keep convergence fast on
    large periods, where the spectral gap shrinks.

    Returns (lambda, eigenvector) with the eigenvector normalized to max 1.
    """
    A = _assemble(op)
    n = op.n
    ident = diags([np.ones(n)], [0], format="csc")

    def factor(s):
        return splu((s * ident - A).tocsc())

    upper = op.p ** 2 + float(np.max(op.mu))      # Perron root <= max row sum
    sigma = upper + 1.0
    safe_sigma = sigma
    lu = factor(sigma)
    v = np.ones(n)
    lam_old = None
    inc = math.inf
    for it in range(max_iter):
        w = lu.solve(v)
        if not np.all(np.isfinite(w)) or np.min(w) <= 0.0:
            # shift fell at or below the Perron root; back off halfway
            sigma = 0.5 * (sigma + safe_sigma)
            lu = factor(sigma)
            continue
        lam = sigma - float(v @ v) / float(v @ w)
        v = w / np.max(w)
        if lam_old is not None:
            inc = abs(lam - lam_old)
            if inc < tol * max(1.0, abs(lam)):
                if np.min(v) <= 0.0:
                    raise DiscretizationError("eigenvector lost positivity; "
                                              "refine the grid")
                return lam, v
        lam_old = lam
        if it % 20 == 19 and math.isfinite(inc):
            tightened = lam + max(10.0 * inc, 1e-9)
            if tightened < sigma:
                try:
                    lu = factor(tightened)
                except RuntimeError:      # exactly singular: shift hit an eigenvalue
                    tightened += 1e-7
                    lu = factor(tightened)
                safe_sigma = sigma
                sigma = tightened
    raise ConvergenceError(f"eigenvalue iteration did not reach {tol} in "
                           f"{max_iter} iterations")


def _sampled_mu(profile: PeriodicProfile, L: float, n: int) -> np.ndarray:
    x = np.arange(n) * (L / n)
    mu = np.asarray(profile.evaluate(x / L), dtype=float)
    if profile.kind == "two_value":
        # jump coefficients degrade the centered scheme; smooth over a 2h
        # transition (changes lambda by O(h))
        mu = 0.25 * np.roll(mu, 1) + 0.5 * mu + 0.25 * np.roll(mu, -1)
    return mu


def operator_for(profile: PeriodicProfile, L: float, p: float,
                 refine: int = 1) -> PeriodicOperator:
    """Grid the L-periodic medium mu0(x/L) finely enough for drift p."""
    p_cap = max(abs(p), 0.05)
    h_target = min(L / 64.0, 1.0 / (2.0 * p_cap + 1.0)) / max(refine, 1)
    n = max(16, int(math.ceil(L / h_target)))
    return PeriodicOperator(p, L, _sampled_mu(profile, L, n))


def w_L(profile: PeriodicProfile, L: float, refine: int = 1,
        rel_tol: float = 1e-6) -> float:
    """Finite-period spreading speed min_{p>0} lambda_p(mu_L) / p.

    Coarse 16-point log scan over p in [0.05, 4 sqrt(max mu0)] brackets the
    minimum, then golden-section refines it.  One grid (sized for the
    largest scanned p) serves all evaluations.
    """
    if L <= 0:
        raise ParameterError("w_L needs L > 0")
    p_max = 4.0 * math.sqrt(profile.max_val)
    h_target = min(L / 64.0, 1.0 / (2.0 * p_max + 1.0)) / max(refine, 1)
    n = max(16, int(math.ceil(L / h_target)))
    mu = _sampled_mu(profile, L, n)

    def g(p):
        lam, _ = principal_eigenvalue(PeriodicOperator(p, L, mu))
        return lam / p

    ps = np.geomspace(0.05, p_max, 16)
    vals = np.array([g(p) for p in ps])
    i = int(np.argmin(vals))
    lo = ps[max(i - 1, 0)]
    hi = ps[min(i + 1, ps.size - 1)]
    value, _ = _golden_min(g, lo, hi, rel_tol)
    return value
