"""Dense symmetric linear algebra for the small information matrices.

Only what the fitter needs: a Cholesky factorization with triangular
solves for the well-conditioned case, and a cyclic Jacobi eigensolver
that backs the pseudo-inverse when the matrix is indefinite or nearly
singular (flat likelihood ridges make that the common case, not the
exception).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


def _check_square(a):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix entries must be finite")
    return a


def cholesky_factor(a):
    """Lower-triangular L with a = L L^T, or None when a is not
    positive definite (a nonpositive pivot is the detection, not an error)."""
    a = _check_square(a)
    n = a.shape[0]
    low = np.zeros_like(a)
    for i in range(n):
        for j in range(i + 1):
            acc = a[i, j] - float(low[i, :j] @ low[j, :j])
            if i == j:
                if not (acc > 0.0) or not math.isfinite(acc):
                    return None
                low[i, i] = math.sqrt(acc)
            else:
                low[i, j] = acc / low[j, j]
    return low


def cholesky_solve(low, rhs):
    """Solve (L L^T) x = rhs given the lower factor."""
    low = np.asarray(low, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    n = low.shape[0]
    y = np.zeros(rhs.shape)
    for i in range(n):
        y[i] = (rhs[i] - low[i, :i] @ y[:i]) / low[i, i]
    x = np.zeros(rhs.shape)
    for i in range(n - 1, -1, -1):
        x[i] = (y[i] - low[i + 1:, i] @ x[i + 1:]) / low[i, i]
    return x


def jacobi_eigh(a, max_sweeps=100):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns (eigenvalues ascending, column eigenvectors).  Sweeps until
    every off-diagonal entry is annihilated to roundoff; for the 5x5
    matrices used here that takes a handful of sweeps.
    """
    a = _check_square(a).copy()
    n = a.shape[0]
    vec = np.eye(n)
    scale = math.sqrt(float(np.sum(a * a))) or 1.0
    for _ in range(max_sweeps):
        off = math.sqrt(2.0 * float(np.sum(np.tril(a, -1) ** 2)))
        if off <= 1e-15 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-18 * scale:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                cth = 1.0 / math.sqrt(1.0 + t * t)
                sth = t * cth
                for mat in (a,):
                    col_p = mat[:, p].copy()
                    col_q = mat[:, q].copy()
                    mat[:, p] = cth * col_p - sth * col_q
                    mat[:, q] = sth * col_p + cth * col_q
                    row_p = mat[p, :].copy()
                    row_q = mat[q, :].copy()
                    mat[p, :] = cth * row_p - sth * row_q
                    mat[q, :] = sth * row_p + cth * row_q
                col_p = vec[:, p].copy()
                col_q = vec[:, q].copy()
                vec[:, p] = cth * col_p - sth * col_q
                vec[:, q] = sth * col_p + cth * col_q
                # rotation zeroes the (p,q) pair exactly
                a[p, q] = a[q, p] = 0.0
    vals = np.diag(a).copy()
    order = np.argsort(vals, kind="stable")
    return vals[order], vec[:, order]


@dataclass(frozen=True)
class SymInverse:
    """Inverse (or pseudo-inverse) of a symmetric matrix with diagnostics."""

    inverse: np.ndarray
    cond_number: float
    used_pseudo: bool


def sym_inverse(a, cond_limit=1e12):
    """Invert a symmetric matrix, falling back to a spectral pseudo-inverse.

    The plain Cholesky inverse is used while the matrix is positive
    definite and its eigenvalue condition number stays at or below
    cond_limit; otherwise eigenvalues within machine noise of zero are
    dropped and the rest inverted.  Never raises on singularity.
    """
    a = _check_square(a)
    vals, vecs = jacobi_eigh(a)
    mags = np.abs(vals)
    top = float(mags.max())
    if top == 0.0:
        return SymInverse(np.zeros_like(a), math.inf, True)
    bottom = float(mags.min())
    cond = math.inf if bottom == 0.0 else top / bottom
    low = cholesky_factor(a)
    if low is not None and cond <= cond_limit:
        eye = np.eye(a.shape[0])
        inv = cholesky_solve(low, eye)
        inv = 0.5 * (inv + inv.T)
        return SymInverse(inv, cond, False)
    keep = mags > top * 1e-14 * a.shape[0]
    with np.errstate(divide="ignore"):
        recip = np.where(keep, 1.0 / np.where(keep, vals, 1.0), 0.0)
    inv = (vecs * recip) @ vecs.T
    inv = 0.5 * (inv + inv.T)
    return SymInverse(inv, cond, True)
