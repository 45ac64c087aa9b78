"""Charted Riemannian / almost Hermitian manifolds and the Levi-Civita calculus.

A manifold is a single global chart: a dimension, a symmetric grid of metric
component expressions, an optional almost complex structure given the same
way, and a sampling box with excluded hypersurfaces.  All operations are pure
and pointwise; derivatives come from jet evaluation of the component
expressions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import NonSPDMetricError, StructureError
from .expr import (
    Const,
    Jet2,
    ScalarExpr,
    as_jet,
    evaluate,
    jet_seeds,
    parse,
    value_of,
)

__all__ = [
    "ExcludedLocus",
    "ChartedManifold",
    "ConnectionCoefficients",
    "VectorField",
    "ExprField",
    "ConstantField",
    "DerivedField",
    "euclidean_metric",
    "canonical_complex_structure",
    "euclidean",
    "metric_at",
    "metric_entries",
    "christoffel",
    "covariant_derivative",
    "lie_bracket",
    "complex_structure_at",
    "complex_structure_residuals",
    "nabla_j_residual",
]


@dataclass(frozen=True)
class ExcludedLocus:
    """Hypersurface x_coord = value (kind 'eq') or x_coord = k*value (kind 'mod')."""

    kind: str
    coord: int  # 0-based
    value: float

    def distance(self, p) -> float:
        x = float(p[self.coord])
        if self.kind == "eq":
            return abs(x - self.value)
        half = self.value / 2.0
        return abs(((x + half) % self.value) - half)


@dataclass(frozen=True)
class ChartedManifold:
    dim: int
    metric: tuple[tuple[ScalarExpr, ...], ...]
    complex_structure: tuple[tuple[ScalarExpr, ...], ...] | None = None
    box: tuple[tuple[float, float], ...] | None = None
    excluded: tuple[ExcludedLocus, ...] = ()

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        if len(self.metric) != self.dim or any(len(r) != self.dim for r in self.metric):
            raise ValueError("metric grid must be dim x dim")
        if self.complex_structure is not None:
            if self.dim % 2 != 0:
                raise ValueError("complex structure requires even dimension")
            J = self.complex_structure
            if len(J) != self.dim or any(len(r) != self.dim for r in J):
                raise ValueError("complex structure grid must be dim x dim")
        if self.box is not None and len(self.box) != self.dim:
            raise ValueError("box must have one interval per coordinate")

    def contains(self, p) -> bool:
        if self.box is not None:
            for x, (lo, hi) in zip(p, self.box):
                if not (lo <= x <= hi):
                    return False
        return all(loc.distance(p) >= 1e-3 for loc in self.excluded)


@dataclass(frozen=True)
class ConnectionCoefficients:
    point: tuple[float, ...]
    gamma: np.ndarray  # gamma[k, i, j], symmetric in (i, j)


def euclidean_metric(dim: int) -> tuple[tuple[ScalarExpr, ...], ...]:
    return tuple(
        tuple(Const(1.0) if i == j else Const(0.0) for j in range(dim)) for i in range(dim)
    )


def canonical_complex_structure(dim: int) -> tuple[tuple[ScalarExpr, ...], ...]:
    """Pairs consecutive coordinates: (a1, a2, ...) -> (-a2, a1, ..., -a_{2m}, a_{2m-1})."""
    if dim % 2 != 0:
        raise ValueError("canonical complex structure needs even dimension")
    J = [[0.0] * dim for _ in range(dim)]
    for k in range(0, dim, 2):
        J[k][k + 1] = -1.0
        J[k + 1][k] = 1.0
    return tuple(tuple(Const(v) for v in row) for row in J)


def euclidean(dim: int, box=None, with_j: bool = False, excluded=()) -> ChartedManifold:
    J = canonical_complex_structure(dim) if with_j else None
    b = None if box is None else tuple((float(lo), float(hi)) for lo, hi in box)
    return ChartedManifold(dim, euclidean_metric(dim), J, b, tuple(excluded))


# ---------------------------------------------------------------------------
# Metric and connection


def metric_entries(M: ChartedManifold, xs) -> list[list]:
    """Evaluate the metric grid on generic scalars (floats or jets)."""
    out = [[None] * M.dim for _ in range(M.dim)]
    for i in range(M.dim):
        for j in range(i, M.dim):
            v = evaluate(M.metric[i][j], xs)
            out[i][j] = v
            out[j][i] = v
    return out


def metric_at(M: ChartedManifold, p) -> np.ndarray:
    """SPD metric matrix at a point; raises NonSPDMetricError otherwise."""
    G = np.array(
        [[value_of(evaluate(M.metric[i][j], p)) for j in range(M.dim)] for i in range(M.dim)]
    )
    G = (G + G.T) / 2.0
    eigs = np.linalg.eigvalsh(G)
    if eigs[0] <= 1e-12 * max(eigs[-1], 1e-300):
        raise NonSPDMetricError(f"metric not positive definite at {tuple(p)}: eigs {eigs}")
    return G


def _metric_jets(M: ChartedManifold, p) -> list[list[Jet2]]:
    seeds = jet_seeds(p, second_order=False)
    grid = metric_entries(M, seeds)
    return [[as_jet(grid[i][j], M.dim) for j in range(M.dim)] for i in range(M.dim)]


def christoffel(M: ChartedManifold, p) -> ConnectionCoefficients:
    """Levi-Civita connection coefficients from jet derivatives of the metric."""
    n = M.dim
    jets = _metric_jets(M, p)
    G = np.array([[jets[i][j].value for j in range(n)] for i in range(n)])
    dG = np.empty((n, n, n))  # dG[l, i, j] = d_l g_ij
    for i in range(n):
        for j in range(n):
            dG[:, i, j] = jets[i][j].gradient
    eigs = np.linalg.eigvalsh((G + G.T) / 2.0)
    if eigs[0] <= 1e-12 * max(eigs[-1], 1e-300):
        raise NonSPDMetricError(f"metric not positive definite at {tuple(p)}")
    Ginv = np.linalg.inv(G)
    # Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
    sym = dG + dG.transpose(1, 0, 2) - np.einsum("lij->ijl", dG)
    gamma = 0.5 * np.einsum("kl,ijl->kij", Ginv, sym)
    gamma = (gamma + gamma.transpose(0, 2, 1)) / 2.0  # exact lower-index symmetry
    return ConnectionCoefficients(tuple(float(x) for x in p), gamma)


# ---------------------------------------------------------------------------
# Vector fields


class VectorField:
    """A tangent vector field evaluable in jet arithmetic near a point."""

    dim: int

    def values_at(self, p) -> np.ndarray:
        raise NotImplementedError

    def jets_at(self, p) -> list[Jet2]:
        raise NotImplementedError


class ExprField(VectorField):
    def __init__(self, components: Sequence[ScalarExpr], dim: int):
        if len(components) != dim:
            raise ValueError("component count must equal dimension")
        self.components = tuple(components)
        self.dim = dim

    @classmethod
    def from_strings(cls, texts: Sequence[str], dim: int) -> "ExprField":
        return cls([parse(t, dim) for t in texts], dim)

    def values_at(self, p) -> np.ndarray:
        return np.array([value_of(evaluate(c, p)) for c in self.components])

    def jets_at(self, p) -> list[Jet2]:
        seeds = jet_seeds(p, second_order=False)
        return [as_jet(evaluate(c, seeds), self.dim) for c in self.components]


class ConstantField(VectorField):
    def __init__(self, vec):
        self.vec = np.asarray(vec, dtype=float)
        self.dim = self.vec.shape[0]

    def values_at(self, p) -> np.ndarray:
        return self.vec.copy()

    def jets_at(self, p) -> list[Jet2]:
        return [Jet2(v, np.zeros(self.dim)) for v in self.vec]


class DerivedField(VectorField):
    """Field given by a procedure mapping generic chart scalars to components."""

    def __init__(self, fn: Callable, dim: int):
        self.fn = fn
        self.dim = dim

    def values_at(self, p) -> np.ndarray:
        return np.array([value_of(c) for c in self.fn([float(x) for x in p])])

    def jets_at(self, p) -> list[Jet2]:
        out = self.fn(jet_seeds(p, second_order=False))
        return [as_jet(c, self.dim) for c in out]


def _as_field(Y, dim: int) -> VectorField:
    if isinstance(Y, VectorField):
        return Y
    return ConstantField(np.asarray(Y, dtype=float).reshape(dim))


def covariant_derivative(M: ChartedManifold, Y, X, p) -> np.ndarray:
    """(nabla_X Y)^k = X^i d_i Y^k + Gamma^k_ij X^i Y^j at p (X a vector at p)."""
    Yf = _as_field(Y, M.dim)
    X = np.asarray(X, dtype=float)
    jets = Yf.jets_at(p)
    gamma = christoffel(M, p).gamma
    Yv = np.array([j.value for j in jets])
    dY = np.array([j.gradient for j in jets])  # dY[k, i] = d_i Y^k
    return dY @ X + np.einsum("kij,i,j->k", gamma, X, Yv)


def lie_bracket(X, Y, p, dim: int | None = None) -> np.ndarray:
    """[X, Y]^k = X^i d_i Y^k - Y^i d_i X^k at p."""
    if dim is None:
        dim = X.dim if isinstance(X, VectorField) else len(np.asarray(X))
    Xf = _as_field(X, dim)
    Yf = _as_field(Y, dim)
    Xj = Xf.jets_at(p)
    Yj = Yf.jets_at(p)
    Xv = np.array([j.value for j in Xj])
    Yv = np.array([j.value for j in Yj])
    dX = np.array([j.gradient for j in Xj])
    dY = np.array([j.gradient for j in Yj])
    return dY @ Xv - dX @ Yv


# ---------------------------------------------------------------------------
# Almost complex structure


def complex_structure_at(M: ChartedManifold, p) -> np.ndarray:
    if M.complex_structure is None:
        raise StructureError("manifold has no complex structure")
    J = M.complex_structure
    return np.array(
        [[value_of(evaluate(J[i][j], p)) for j in range(M.dim)] for i in range(M.dim)]
    )


def complex_structure_residuals(M: ChartedManifold, p) -> tuple[float, float]:
    """(max |J^2 + I|, max |g(JX,JY) - g(X,Y)| on coordinate pairs)."""
    J = complex_structure_at(M, p)
    G = metric_at(M, p)
    r_square = float(np.max(np.abs(J @ J + np.eye(M.dim))))
    r_compat = float(np.max(np.abs(J.T @ G @ J - G)))
    return r_square, r_compat


def nabla_j_residual(M: ChartedManifold, p) -> float:
    """Max g-norm over coordinate pairs of (nabla_{d_i} J) d_j; zero iff Kaehler at p."""
    if M.complex_structure is None:
        raise StructureError("manifold has no complex structure")
    n = M.dim
    seeds = jet_seeds(p, second_order=False)
    Jj = [[as_jet(evaluate(M.complex_structure[i][j], seeds), n) for j in range(n)] for i in range(n)]
    Jv = np.array([[Jj[i][j].value for j in range(n)] for i in range(n)])
    dJ = np.empty((n, n, n))  # dJ[l, k, j] = d_l J^k_j
    for k in range(n):
        for j in range(n):
            dJ[:, k, j] = Jj[k][j].gradient
    gamma = christoffel(M, p).gamma
    G = metric_at(M, p)
    worst = 0.0
    for i in range(n):
        # (nabla_i J)^k_j = d_i J^k_j + Gamma^k_im J^m_j - J^k_m Gamma^m_ij
        nab = dJ[i] + gamma[:, i, :] @ Jv - Jv @ gamma[:, i, :]
        for j in range(n):
            w = nab[:, j]
            worst = max(worst, math.sqrt(float(w @ G @ w)))
    return worst
