"""Independent optimality verification.

Three tools, deliberately decoupled from the analytic solvers: a cyclic
Jacobi eigensolver for small dense symmetric matrices, a certificate
checker for the null-space/row-norm optimality conditions, and a
brute-force grid-search oracle that minimizes -sum(log d_i) directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ConvergenceError, DomainError, InfeasibleError
from .model import StarCovariance

MAX_JACOBI_SWEEPS = 50
JACOBI_TOL = 1e-13
ZERO_EIG_TOL = 1e-8


def _as_matrix(sigma_x) -> np.ndarray:
    if isinstance(sigma_x, StarCovariance):
        return sigma_x.matrix
    return np.asarray(sigma_x, dtype=float)


def sym_eigen(M, tol: float = JACOBI_TOL, max_sweeps: int = MAX_JACOBI_SWEEPS):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Iterates until the off-diagonal Frobenius norm drops below
    ``tol * ||M||_F``.  Returns ``(eigenvalues_ascending, eigenvectors)``
    with eigenvectors in matching columns.
    """
    A = np.array(_as_matrix(M), dtype=float)
    n = A.shape[0]
    if A.shape != (n, n):
        raise DomainError("matrix must be square")
    if n > 256:
        raise DomainError("matrix too large for the dense Jacobi solver")
    if not np.allclose(A, A.T, atol=1e-12 * max(1.0, np.abs(A).max())):
        raise DomainError("matrix must be symmetric")
    A = 0.5 * (A + A.T)
    V = np.eye(n)
    norm = np.linalg.norm(A)
    if norm == 0.0:
        return np.zeros(n), V

    mask = ~np.eye(n, dtype=bool)

    def off(A):
        # summed directly over the off-diagonal entries; the difference
        # sum(A^2) - sum(diag^2) cancels catastrophically near convergence
        return np.linalg.norm(A[mask])

    for _ in range(max_sweeps):
        if off(A) <= tol * norm:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= tol * norm / n:
                    continue
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = np.sign(tau) / (abs(tau) + np.sqrt(tau**2 + 1.0))
                if tau == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t**2 + 1.0)
                s = t * c
                rot_p, rot_q = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * rot_p - s * rot_q
                A[:, q] = s * rot_p + c * rot_q
                rot_p, rot_q = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * rot_p - s * rot_q
                A[q, :] = s * rot_p + c * rot_q
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    if off(A) > tol * norm:
        raise ConvergenceError(
            f"Jacobi iteration did not converge in {max_sweeps} sweeps")
    w = np.diag(A).copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


@dataclass(frozen=True)
class Certificate:
    """Outcome of the optimality check for a candidate decomposition."""

    lambda_min: float
    second_eigenvalue: float
    rank_sigma_t: int
    row_norm_residuals: np.ndarray
    nullspace_residual: float
    passed: bool


def check_certificate(sigma_x, d, T, tol_eig: float = ZERO_EIG_TOL,
                      tol_row: float = 1e-10, tol_null: float = 1e-9,
                      tol_psd: float | None = None) -> Certificate:
    """Verify the optimality conditions for ``Sigma_x = (Sigma_x - D) + D``.

    Checks that the smallest eigenvalue of ``Sigma_x - D`` is zero (and the
    matrix PSD), that the columns of ``T`` lie in its null space, and that
    row i of ``T`` has squared norm 1/d_i.  Failures are reported in the
    returned :class:`Certificate`, not raised.
    """
    S = _as_matrix(sigma_x)
    d = np.asarray(d, dtype=float).ravel()
    T = np.asarray(T, dtype=float)
    if T.ndim == 1:
        T = T[:, None]
    n = d.size
    if np.any(d <= 0.0):
        raise DomainError("diagonal entries must be positive")
    sigma_t = S - np.diag(d)
    w, _ = sym_eigen(sigma_t)
    lambda_min = float(w[0])
    second = float(w[1])
    rank = int(np.sum(w > ZERO_EIG_TOL))
    if tol_psd is None:
        tol_psd = 1e-10 * n * np.linalg.norm(S)
    target = 1.0 / d
    row_resid = np.abs(np.sum(T**2, axis=1) - target) / target
    null_resid = float(np.linalg.norm(sigma_t @ T))
    passed = (abs(lambda_min) <= tol_eig
              and lambda_min >= -tol_psd
              and bool(np.all(row_resid <= tol_row))
              and null_resid <= tol_null * n)
    return Certificate(
        lambda_min=lambda_min, second_eigenvalue=second, rank_sigma_t=rank,
        row_norm_residuals=row_resid, nullspace_residual=null_resid,
        passed=passed,
    )


def _saturated_d1(S, rest) -> np.ndarray:
    """Largest d_1 keeping ``S - diag(d1, rest)`` PSD, per row of ``rest``.

    All principal minors of the shifted matrix are affine in d_1, so the
    boundary value is a minimum of linear roots.  Rows whose trailing block
    is itself infeasible get -inf.
    """
    n = S.shape[0]
    rest = np.asarray(rest, dtype=float)
    if n == 2:
        b22 = S[1, 1] - rest[:, 0]
        d1 = np.where(b22 > 0.0, S[0, 0] - S[0, 1] ** 2 / np.maximum(b22, 1e-300),
                      -np.inf)
        return np.where(b22 >= 0.0, np.minimum(d1, S[0, 0]), -np.inf)
    if n == 3:
        b22 = S[1, 1] - rest[:, 0]
        b33 = S[2, 2] - rest[:, 1]
        m12 = b22 * b33 - S[1, 2] ** 2
        ok = (b22 > 0.0) & (b33 > 0.0) & (m12 > 0.0)
        bb22 = np.maximum(b22, 1e-300)
        bb33 = np.maximum(b33, 1e-300)
        mm12 = np.maximum(m12, 1e-300)
        k = (S[0, 1] ** 2 * b33 - 2.0 * S[0, 1] * S[0, 2] * S[1, 2]
             + S[0, 2] ** 2 * b22)
        a11_floor = np.maximum.reduce(
            [S[0, 1] ** 2 / bb22, S[0, 2] ** 2 / bb33, k / mm12,
             np.zeros_like(b22)])
        return np.where(ok, S[0, 0] - a11_floor, -np.inf)
    raise DomainError("oracle supports n <= 3 only")


def brute_force_oracle(sigma_x, grid0: float = 0.02,
                       refinements: int = 3) -> np.ndarray:
    """Direct-search minimizer of -sum(log d_i) subject to S - diag(d) PSD.

    d_2..d_n run over a grid on the open interval (0,1) (padded away from
    the ends by half a step); for each grid point d_1 is saturated exactly
    on the PSD boundary, where the optimum must lie since the objective is
    strictly decreasing in every d_i.  ``refinements`` local zoom-ins
    shrink the step by a factor of 10 each.  The returned point is
    re-validated with :func:`sym_eigen`.
    """
    S = _as_matrix(sigma_x)
    n = S.shape[0]
    if n > 3:
        raise DomainError("oracle is exponential in n and capped at n = 3")
    if grid0 <= 0:
        raise DomainError("grid step must be positive")

    def search(axes):
        grids = np.meshgrid(*axes, indexing="ij")
        rest = np.stack([g.ravel() for g in grids], axis=1)
        d1 = np.minimum(_saturated_d1(S, rest), 1.0 - 1e-12)
        feas = d1 > 0.0
        if not np.any(feas):
            return None
        rest, d1 = rest[feas], d1[feas]
        obj = -np.log(d1) - np.sum(np.log(rest), axis=1)
        k = np.argmin(obj)
        return np.concatenate(([d1[k]], rest[k]))

    step = grid0
    axes = [np.arange(step / 2.0, 1.0, step)] * (n - 1)
    best = search(axes)
    if best is None:
        raise InfeasibleError("no feasible grid point found on the coarse grid")
    for _ in range(refinements):
        prev = step
        step /= 10.0
        axes = []
        for i in range(1, n):
            lo = max(best[i] - prev, step / 2.0)
            hi = min(best[i] + prev, 1.0 - step / 2.0)
            axes.append(np.arange(lo, hi + step / 2.0, step))
        refined = search(axes)
        if refined is not None:
            best = refined
    w, _ = sym_eigen(S - np.diag(best))
    if w[0] < -1e-10 * n:
        raise InfeasibleError("oracle returned an infeasible point")
    return best
