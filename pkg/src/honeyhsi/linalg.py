"""Dense linear algebra and special functions underpinning the pipeline.

Everything operates on plain 2-D float64 numpy arrays. The symmetric
eigensolver is a cyclic Jacobi iteration; the Student-t survival function
goes through the regularized incomplete beta evaluated with a modified
Lentz continued fraction. All routines are pure functions.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceError,
    DomainError,
    NotPositiveDefiniteError,
    ShapeError,
    SingularMatrixError,
)
from .validation import as_matrix, check_square, check_symmetric

__all__ = [
    "EigenResult",
    "matmul",
    "cholesky",
    "solve_lower_triangular",
    "solve_upper_triangular",
    "eig_symmetric",
    "regularized_incomplete_beta",
    "student_t_sf",
]


@dataclass(frozen=True)
class EigenResult:
    """Eigenvalues in descending order with unit-norm eigenvector columns."""

    eigenvalues: np.ndarray  # (d,)
    eigenvectors: np.ndarray  # (d, d), column k pairs with eigenvalues[k]


def matmul(a, b):
    """Matrix product with shape checking."""
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(
            f"cannot multiply {a.shape[0]}x{a.shape[1]} by {b.shape[0]}x{b.shape[1]}"
        )
    out = a @ b
    if not np.all(np.isfinite(out)):
        raise DomainError("matrix product overflowed")
    return out


def cholesky(a):
    """Lower-triangular L with L @ L.T == a for symmetric positive definite a.

    Raises NotPositiveDefiniteError on a non-positive pivot; callers that
    expect near-singular inputs are responsible for regularizing first.
    """
    a = as_matrix(a, "a")
    check_square(a, "a")
    n = a.shape[0]
    lower = np.zeros_like(a)
    for j in range(n):
        pivot = a[j, j] - lower[j, :j] @ lower[j, :j]
        if pivot <= 0.0 or not math.isfinite(pivot):
            raise NotPositiveDefiniteError(
                f"non-positive pivot {pivot:.6e} at column {j}"
            )
        diag = math.sqrt(pivot)
        lower[j, j] = diag
        if j + 1 < n:
            lower[j + 1 :, j] = (a[j + 1 :, j] - lower[j + 1 :, :j] @ lower[j, :j]) / diag
    return lower


def solve_lower_triangular(l, b):
    """Solve l @ x = b by forward substitution. b may have many columns."""
    l = as_matrix(l, "l")
    check_square(l, "l")
    b_arr = np.asarray(b, dtype=np.float64)
    vector_input = b_arr.ndim == 1
    if vector_input:
        b_arr = b_arr.reshape(-1, 1)
    b_arr = as_matrix(b_arr, "b")
    n = l.shape[0]
    if b_arr.shape[0] != n:
        raise ShapeError(f"b has {b_arr.shape[0]} rows, expected {n}")
    diag = np.diagonal(l)
    if np.any(diag == 0.0):
        raise SingularMatrixError("zero diagonal entry in triangular solve")
    x = np.empty_like(b_arr)
    for i in range(n):
        x[i] = (b_arr[i] - l[i, :i] @ x[:i]) / diag[i]
    return x[:, 0] if vector_input else x


def solve_upper_triangular(u, b):
    """Solve u @ x = b by back substitution. b may have many columns."""
    u = as_matrix(u, "u")
    check_square(u, "u")
    b_arr = np.asarray(b, dtype=np.float64)
    vector_input = b_arr.ndim == 1
    if vector_input:
        b_arr = b_arr.reshape(-1, 1)
    b_arr = as_matrix(b_arr, "b")
    n = u.shape[0]
    if b_arr.shape[0] != n:
        raise ShapeError(f"b has {b_arr.shape[0]} rows, expected {n}")
    diag = np.diagonal(u)
    if np.any(diag == 0.0):
        raise SingularMatrixError("zero diagonal entry in triangular solve")
    x = np.empty_like(b_arr)
    for i in range(n - 1, -1, -1):
        x[i] = (b_arr[i] - u[i, i + 1 :] @ x[i + 1 :]) / diag[i]
    return x[:, 0] if vector_input else x


def _offdiag_norm(a):
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def eig_symmetric(a, max_sweeps=100):
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.

    Sweeps run until the off-diagonal Frobenius norm drops below
    1e-12 * ||a||_F. Eigenvalues come back descending; eigenvectors are the
    matching unit-norm columns, sign-fixed so the largest-magnitude entry
    of each column is positive.
    """
    a = as_matrix(a, "a")
    check_symmetric(a, 1e-8, "a")
    n = a.shape[0]
    if n == 0:
        return EigenResult(np.zeros(0), np.zeros((0, 0)))
    work = 0.5 * (a + a.T)
    vectors = np.eye(n)
    norm_a = np.linalg.norm(work)
    target = 1e-12 * norm_a
    if n > 1 and norm_a > 0.0:
        converged = False
        for _ in range(max_sweeps):
            if _offdiag_norm(work) < target:
                converged = True
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = work[p, q]
                    if apq == 0.0:
                        continue
                    diff = work[q, q] - work[p, p]
                    if abs(diff) + 100.0 * abs(apq) == abs(diff):
                        # Rotation angle below float resolution.
                        t = apq / diff
                    else:
                        tau = diff / (2.0 * apq)
                        if tau >= 0.0:
                            t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                        else:
                            t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                    c = 1.0 / math.sqrt(1.0 + t * t)
                    s = t * c
                    col_p = work[:, p].copy()
                    col_q = work[:, q].copy()
                    work[:, p] = c * col_p - s * col_q
                    work[:, q] = s * col_p + c * col_q
                    row_p = work[p, :].copy()
                    row_q = work[q, :].copy()
                    work[p, :] = c * row_p - s * row_q
                    work[q, :] = s * row_p + c * row_q
                    work[p, q] = 0.0
                    work[q, p] = 0.0
                    vec_p = vectors[:, p].copy()
                    vec_q = vectors[:, q].copy()
                    vectors[:, p] = c * vec_p - s * vec_q
                    vectors[:, q] = s * vec_p + c * vec_q
        else:
            converged = _offdiag_norm(work) < target
        if not converged:
            raise ConvergenceError(
                f"Jacobi sweeps did not reach off-diagonal target {target:.3e}"
            )
    values = np.diagonal(work).copy()
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    # Deterministic sign: make the largest-magnitude entry of each column positive.
    for k in range(n):
        col = vectors[:, k]
        pivot = int(np.argmax(np.abs(col)))
        if col[pivot] < 0.0:
            vectors[:, k] = -col
    return EigenResult(values, vectors)


_LENTZ_TINY = 1e-300
_LENTZ_MAX_ITER = 200
_LENTZ_TOL = 1e-12


def _beta_continued_fraction(a, b, x):
    """Modified Lentz evaluation of the incomplete-beta continued fraction."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _LENTZ_TINY:
        d = _LENTZ_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _LENTZ_MAX_ITER + 1):
        m2 = 2 * m
        coeff = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + coeff * d
        if abs(d) < _LENTZ_TINY:
            d = _LENTZ_TINY
        c = 1.0 + coeff / c
        if abs(c) < _LENTZ_TINY:
            c = _LENTZ_TINY
        d = 1.0 / d
        h *= d * c
        coeff = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + coeff * d
        if abs(d) < _LENTZ_TINY:
            d = _LENTZ_TINY
        c = 1.0 + coeff / c
        if abs(c) < _LENTZ_TINY:
            c = _LENTZ_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _LENTZ_TOL:
            return h
    raise ConvergenceError("incomplete beta continued fraction did not converge")


def regularized_incomplete_beta(a, b, x):
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if a <= 0.0 or b <= 0.0:
        raise DomainError("beta parameters must be positive")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x={x} outside [0, 1]")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_continued_fraction(a, b, x) / a
    return 1.0 - front * _beta_continued_fraction(b, a, 1.0 - x) / b


def student_t_sf(t, df):
    """Upper-tail survival probability P(T > t) for Student's t with df degrees.

    df must be a positive integer count.
    """
    if not isinstance(df, (int, np.integer)) or df < 1:
        raise DomainError(f"df must be a positive integer, got {df!r}")
    t = float(t)
    if not math.isfinite(t):
        raise DomainError("t must be finite")
    if t == 0.0:
        return 0.5
    x = df / (df + t * t)
    half_tail = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, x)
    return half_tail if t > 0.0 else 1.0 - half_tail
