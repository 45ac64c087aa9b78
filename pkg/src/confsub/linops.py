"""Small dense linear algebra generic over floats and jets.

The frame pipeline runs twice per point: once on floats (fast, validated) and
once on first-order jets (same code path, derivatives for free).  Everything
here therefore works on plain Python lists whose entries support ring
arithmetic; pivoting and drop decisions look only at the float value part so
both runs take identical branches.
"""

from __future__ import annotations

import numpy as np

from .errors import SingularMetricError
from .expr import s_sqrt, value_of

__all__ = [
    "vdot",
    "mat_vec",
    "mat_mul",
    "mat_sub",
    "inverse",
    "gram_inner",
    "gram_schmidt",
    "projector",
    "values_vec",
    "values_mat",
    "lin_comb",
]


def vdot(u, v):
    acc = u[0] * v[0]
    for i in range(1, len(u)):
        acc = acc + u[i] * v[i]
    return acc


def mat_vec(A, v):
    return [vdot(row, v) for row in A]


def mat_mul(A, B):
    n, k, m = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = A[i][0] * B[0][j]
            for l in range(1, k):
                acc = acc + A[i][l] * B[l][j]
            row.append(acc)
        out.append(row)
    return out


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def inverse(A):
    """Gauss-Jordan inverse with partial pivoting on the value part."""
    n = len(A)
    aug = [list(row) + [1.0 if i == j else 0.0 for j in range(n)] for i, row in enumerate(A)]
    scale = max(abs(value_of(A[i][j])) for i in range(n) for j in range(n))
    if scale == 0.0:
        raise SingularMetricError("zero matrix")
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(value_of(aug[r][col])))
        if abs(value_of(aug[pivot][col])) < 1e-14 * scale:
            raise SingularMetricError("singular matrix")
        if pivot != col:
            aug[col], aug[pivot] = aug[pivot], aug[col]
        inv_piv = 1.0 / aug[col][col]
        aug[col] = [x * inv_piv for x in aug[col]]
        for r in range(n):
            if r == col:
                continue
            f = aug[r][col]
            if value_of(f) == 0.0:
                continue
            aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def gram_inner(G, u, v):
    return vdot(u, mat_vec(G, v))


def gram_schmidt(G, seeds, drop_tol, against=()):
    """Metric Gram-Schmidt in fixed seed order, dropping near-dependent seeds.

    `against` holds already-orthonormal vectors that the result must also be
    orthogonal to (they are not returned).  Drop decisions compare the value
    part of the squared norm to drop_tol**2, so float and jet runs agree.
    """
    basis = []
    for w in seeds:
        w = list(w)
        for b in list(against) + basis:
            c = gram_inner(G, w, b)
            w = [wi - c * bi for wi, bi in zip(w, b)]
        n2 = gram_inner(G, w, w)
        if value_of(n2) < drop_tol * drop_tol:
            continue
        inv_n = 1.0 / s_sqrt(n2)
        basis.append([wi * inv_n for wi in w])
    return basis


def projector(G, basis, dim):
    """Coordinate matrix of metric-orthogonal projection onto span(basis)."""
    P = [[0.0 for _ in range(dim)] for _ in range(dim)]
    for b in basis:
        Gb = mat_vec(G, b)
        for k in range(dim):
            for l in range(dim):
                P[k][l] = P[k][l] + b[k] * Gb[l]
    return P


def values_vec(v) -> np.ndarray:
    return np.array([value_of(x) for x in v], dtype=float)


def values_mat(A) -> np.ndarray:
    return np.array([[value_of(x) for x in row] for row in A], dtype=float)


def lin_comb(coeffs, vectors):
    """Linear combination with float coefficients of generic vectors."""
    dim = len(vectors[0])
    out = [0.0] * dim
    for c, v in zip(coeffs, vectors):
        if c == 0.0:
            continue
        out = [o + c * vi for o, vi in zip(out, v)]
    return out
