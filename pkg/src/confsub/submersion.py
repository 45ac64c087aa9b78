"""Everything attached to a smooth map between charted manifolds.

Per point the engine builds a `PointContext`: metric, Jacobian, orthonormal
vertical/horizontal frames, the invariant/anti-invariant refinement of the
vertical space, the dilation, and all projectors.  The construction runs twice
through the same code path, once on floats (validated) and once on first-order
jets, so every constructed frame field comes with its first derivatives and
brackets, covariant derivatives and the pullback connection need no finite
differencing.

Frame construction is deterministic: horizontal seeds are the metric-raised
component gradients in component order, vertical seeds are the coordinate
fields in coordinate order, and Gram-Schmidt drops seeds whose post-projection
norm falls below the drop tolerance.  The invariant part of the vertical space
is the range of -(P_V J P_V)^2, which is a smooth g-orthogonal projector
whenever the structure is genuinely semi-invariant; a singular value
decomposition of P_V J P_V (float pass only) validates the split and rejects
ambiguous points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import (
    AmbiguousSplittingError,
    BookkeepingError,
    CriticalPointError,
    NotConformalError,
    StructureError,
)
from .expr import Jet2, ScalarExpr, as_jet, evaluate, jet_seeds, s_log, s_sqrt, value_of
from .geometry import ChartedManifold, VectorField, christoffel, metric_entries
from .linops import (
    gram_inner,
    gram_schmidt,
    inverse,
    lin_comb,
    mat_mul,
    mat_vec,
    projector,
    values_mat,
    values_vec,
    vdot,
)

__all__ = [
    "SmoothMap",
    "SplitFrame",
    "GradLnLambda",
    "FundamentalTensorsAtPoint",
    "PointContext",
    "FrameField",
    "jacobian",
    "split_frame",
    "phi_omega",
    "bc_decompose",
    "oneill_t",
    "oneill_a",
    "second_fundamental_form",
    "tension",
    "fiber_mean_curvature",
    "grad_ln_lambda",
    "fundamental_tensors",
    "sff_identity_residuals",
]


@dataclass(frozen=True)
class SmoothMap:
    source: ChartedManifold
    target: ChartedManifold
    components: tuple[ScalarExpr, ...]
    _cache: dict = field(default_factory=dict, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if len(self.components) != self.target.dim:
            raise ValueError("component count must equal target dimension")
        if self.target.dim >= self.source.dim:
            raise ValueError("a submersion needs source dimension > target dimension")

    def context(self, p, tol: Tolerances = DEFAULT_TOLERANCES) -> "PointContext":
        key = (tuple(float(x) for x in p), tol)
        ctx = self._cache.get(key)
        if ctx is None:
            ctx = PointContext(self, np.asarray(p, dtype=float), tol)
            self._cache[key] = ctx
        return ctx

    def value_at(self, p) -> np.ndarray:
        return np.array([value_of(evaluate(c, p)) for c in self.components])


@dataclass(frozen=True)
class SplitFrame:
    """Point-local orthonormal frames and the dilation."""

    point: tuple[float, ...]
    vertical: tuple[np.ndarray, ...]
    horizontal: tuple[np.ndarray, ...]
    d1: tuple[np.ndarray, ...]
    d2: tuple[np.ndarray, ...]
    jd2: tuple[np.ndarray, ...]
    mu: tuple[np.ndarray, ...]
    lam: float
    lambda_sq_residual: float

    @property
    def dims(self) -> tuple[int, int, int, int]:
        return (len(self.d1), len(self.d2), len(self.jd2), len(self.mu))


@dataclass(frozen=True)
class FundamentalTensorsAtPoint:
    """The submersion tensors at one point, bundled for callers.

    `t` and `a` are bilinear maps on coordinate vectors (skew-symmetric as
    operators in their second slot), `sff` the second fundamental form with
    values in the target chart, `tension` its trace over the full orthonormal
    frame, `fiber_mean_curvature` the normalized vertical trace of `t`.
    """

    point: tuple[float, ...]
    t: object  # (vector, vector) -> vector
    a: object
    sff: object  # (vector, vector) -> target vector
    tension: np.ndarray
    fiber_mean_curvature: np.ndarray


@dataclass(frozen=True)
class GradLnLambda:
    vector: np.ndarray  # riemannian gradient of ln(dilation)
    horizontal_part: np.ndarray
    vertical_part: np.ndarray
    horizontal_norm: float  # g-norm of the horizontal part of grad(dilation)
    horizontally_homothetic: bool


@dataclass
class _PipelineResult:
    G: list
    Ginv: list
    DF: list  # DF[a][i], rows indexed by target component
    J: list | None
    gN: list  # target metric grid at the image point
    vertical: list
    horizontal: list
    d1: list | None
    d2: list | None
    jd2: list | None
    mu: list | None
    PV: list
    PH: list
    PD1: list | None
    PD2: list | None
    PJD2: list | None
    PMU: list | None
    lambda_sq: object
    lam: object
    conf_residual: float
    invariance_residuals: tuple[float, float]  # (J(d1) in d1, J(d2) horizontal)


def _run_pipeline(dim, n, G, DF, J, gN_of, tol: Tolerances, validate: bool, point):
    point = tuple(float(x) for x in point)
    """Shared frame construction; scalars are floats or jets throughout."""
    Ginv = inverse(G)

    seeds_h = [mat_vec(Ginv, DF[a]) for a in range(n)]
    horizontal = gram_schmidt(G, seeds_h, tol.drop)
    if len(horizontal) < n:
        raise CriticalPointError(
            f"differential has rank {len(horizontal)} < {n} at {point}"
        )

    coord = [[1.0 if i == k else 0.0 for i in range(dim)] for k in range(dim)]
    vertical = gram_schmidt(G, coord, tol.drop, against=horizontal)
    if len(vertical) != dim - n:
        raise StructureError(
            f"vertical frame has {len(vertical)} vectors, expected {dim - n} at {point}"
        )

    def push(v):
        return [vdot(DF[a], v) for a in range(n)]

    FX = [push(X) for X in horizontal]
    gN = gN_of
    gram = [[gram_inner(gN, FX[a], FX[b]) for b in range(n)] for a in range(n)]
    lambda_sq = gram[0][0]
    for a in range(1, n):
        lambda_sq = lambda_sq + gram[a][a]
    lambda_sq = lambda_sq * (1.0 / n)
    lam = s_sqrt(lambda_sq)

    lsq = value_of(lambda_sq)
    conf_residual = 0.0
    for a in range(n):
        for b in range(n):
            expect = lsq if a == b else 0.0
            conf_residual = max(conf_residual, abs(value_of(gram[a][b]) - expect))
    if validate and conf_residual > tol.conformality * lsq:
        raise NotConformalError(
            f"not horizontally conformal at {point}: residual {conf_residual:.3e} "
            f"against square dilation {lsq:.3e}"
        )

    PV = projector(G, vertical, dim)
    PH = projector(G, horizontal, dim)

    d1 = d2 = jd2 = mu = None
    PD1 = PD2 = PJD2 = PMU = None
    invariance = (0.0, 0.0)
    if J is not None:
        Qm = mat_mul(PV, mat_mul(J, PV))
        if validate:
            k_vert = len(vertical)
            Qv = np.empty((k_vert, k_vert))
            for i in range(k_vert):
                for j in range(k_vert):
                    Qv[i, j] = value_of(gram_inner(G, vertical[i], mat_vec(Qm, vertical[j])))
            svals = np.linalg.svd(Qv, compute_uv=False) if k_vert else np.array([])
            thr = 1.0 - tol.split_threshold
            n_d1 = int(np.sum(svals > thr))
            # genuine structures give singular values at 1 or 0; anything in
            # between means the invariant subspace is not well separated
            for s in svals:
                if tol.split_margin <= s <= thr:
                    raise AmbiguousSplittingError(
                        f"splitting ambiguous at {point}: singular value {s:.6f} "
                        f"between {tol.split_margin} and {thr:.7f}"
                    )
            if n_d1 % 2 != 0:
                raise StructureError(
                    f"invariant vertical subspace has odd dimension {n_d1} at {point}"
                )
        # -(P_V J P_V)^2 projects onto the J-invariant part of the vertical space
        QQ = [[-x for x in row] for row in mat_mul(Qm, Qm)]
        d1 = gram_schmidt(G, [mat_vec(QQ, v) for v in vertical], tol.drop)
        d2 = gram_schmidt(G, vertical, tol.drop, against=d1)
        jd2 = gram_schmidt(G, [mat_vec(J, w) for w in d2], tol.drop)
        mu = gram_schmidt(G, horizontal, tol.drop, against=jd2)
        PD1 = projector(G, d1, dim)
        PD2 = projector(G, d2, dim)
        PJD2 = projector(G, jd2, dim)
        PMU = projector(G, mu, dim)

        if validate:
            if len(d1) != n_d1:
                raise StructureError(
                    f"invariant frame has {len(d1)} vectors but {n_d1} singular values "
                    f"above threshold at {point}"
                )
            if len(jd2) != len(d2):
                raise StructureError(f"J(d2) frame degenerate at {point}")
            if len(mu) % 2 != 0:
                raise StructureError(
                    f"complement of J(d2) has odd dimension {len(mu)} at {point}"
                )
            Gfv = values_mat(G)
            PD1v = values_mat(PD1)
            PVv = values_mat(PV)
            r_d1 = 0.0
            for u in d1:
                w = values_vec(mat_vec(J, u))
                w = w - PD1v @ w
                r_d1 = max(r_d1, math.sqrt(float(w @ Gfv @ w)))
            r_d2 = 0.0
            for w0 in d2:
                w = PVv @ values_vec(mat_vec(J, w0))
                r_d2 = max(r_d2, math.sqrt(float(w @ Gfv @ w)))
            invariance = (r_d1, r_d2)
            if r_d1 > tol.structural or r_d2 > tol.structural:
                raise StructureError(
                    f"vertical space is not semi-invariant at {point}: "
                    f"J(d1) residual {r_d1:.3e}, J(d2) horizontality residual {r_d2:.3e}"
                )

    if validate:
        frame = vertical + horizontal
        Gf = values_mat(G)
        for i, u in enumerate(frame):
            for j, v in enumerate(frame):
                got = float(values_vec(u) @ Gf @ values_vec(v))
                if abs(got - (1.0 if i == j else 0.0)) > tol.structural:
                    raise StructureError(
                        f"frame not orthonormal at {point}: gram[{i},{j}] = {got}"
                    )
        gNf = values_mat(gN)
        for v in vertical:
            fv = values_vec(push(v))
            r = math.sqrt(float(fv @ gNf @ fv))
            if r > tol.structural:
                raise StructureError(
                    f"pushforward of vertical vector has norm {r:.3e} at {point}"
                )

    return _PipelineResult(
        G=G,
        Ginv=Ginv,
        DF=DF,
        J=J,
        gN=gN,
        vertical=vertical,
        horizontal=horizontal,
        d1=d1,
        d2=d2,
        jd2=jd2,
        mu=mu,
        PV=PV,
        PH=PH,
        PD1=PD1,
        PD2=PD2,
        PJD2=PJD2,
        PMU=PMU,
        lambda_sq=lambda_sq,
        lam=lam,
        conf_residual=conf_residual,
        invariance_residuals=invariance,
    )


class PointContext:
    """All pointwise data for a map at one sample point, computed lazily."""

    def __init__(self, fmap: SmoothMap, p: np.ndarray, tol: Tolerances):
        self.fmap = fmap
        self.p = p
        self.tol = tol
        self._cache: dict = {}

    def _get(self, name, builder):
        if name not in self._cache:
            self._cache[name] = builder()
        return self._cache[name]

    # -- raw jets ------------------------------------------------------------

    @property
    def comp_jets(self) -> list[Jet2]:
        def build():
            seeds = jet_seeds(self.p, second_order=True)
            n = self.fmap.source.dim
            return [as_jet(evaluate(c, seeds), n, second_order=True) for c in self.fmap.components]

        return self._get("comp_jets", build)

    @property
    def df_pseudo(self) -> list[list[Jet2]]:
        """First-order jets of the Jacobian entries (gradient rows from Hessians)."""

        def build():
            rows = []
            for j in self.comp_jets:
                rows.append(
                    [Jet2(j.gradient[i], j.hessian[i].copy()) for i in range(self.fmap.source.dim)]
                )
            return rows

        return self._get("df_pseudo", build)

    @property
    def _src_metric_jets(self):
        def build():
            seeds = jet_seeds(self.p, second_order=False)
            grid = metric_entries(self.fmap.source, seeds)
            d = self.fmap.source.dim
            return [[as_jet(grid[i][j], d) for j in range(d)] for i in range(d)]

        return self._get("src_metric_jets", build)

    @property
    def _src_j_jets(self):
        def build():
            J = self.fmap.source.complex_structure
            if J is None:
                return None
            seeds = jet_seeds(self.p, second_order=False)
            d = self.fmap.source.dim
            return [[as_jet(evaluate(J[i][j], seeds), d) for j in range(d)] for i in range(d)]

        return self._get("src_j_jets", build)

    # -- pipeline passes -----------------------------------------------------

    def _gn_grid(self, target_point):
        tgt = self.fmap.target
        out = [[None] * tgt.dim for _ in range(tgt.dim)]
        for i in range(tgt.dim):
            for j in range(i, tgt.dim):
                v = evaluate(tgt.metric[i][j], target_point)
                out[i][j] = v
                out[j][i] = v
        return out

    @property
    def fdata(self) -> _PipelineResult:
        def build():
            dim, n = self.fmap.source.dim, self.fmap.target.dim
            G = [[self._src_metric_jets[i][j].value for j in range(dim)] for i in range(dim)]
            DF = [[j.gradient[i] for i in range(dim)] for j in self.comp_jets]
            Jm = None
            if self._src_j_jets is not None:
                Jm = [[self._src_j_jets[i][j].value for j in range(dim)] for i in range(dim)]
            fp = [j.value for j in self.comp_jets]
            gN = self._gn_grid(fp)
            return _run_pipeline(dim, n, G, DF, Jm, gN, self.tol, True, self.p)

        return self._get("fdata", build)

    @property
    def jdata(self) -> _PipelineResult:
        def build():
            self.fdata  # float pass validates first; jet pass reuses its branch structure
            dim, n = self.fmap.source.dim, self.fmap.target.dim
            G = self._src_metric_jets
            DF = self.df_pseudo
            Jm = self._src_j_jets
            gN = self._gn_grid(self.comp_jets)
            return _run_pipeline(dim, n, G, DF, Jm, gN, self.tol, False, self.p)

        return self._get("jdata", build)

    # -- float views ----------------------------------------------------------

    @property
    def Gf(self) -> np.ndarray:
        return self._get("Gf", lambda: values_mat(self.fdata.G))

    @property
    def Ginvf(self) -> np.ndarray:
        return self._get("Ginvf", lambda: values_mat(self.fdata.Ginv))

    @property
    def GNf(self) -> np.ndarray:
        return self._get("GNf", lambda: values_mat(self.fdata.gN))

    @property
    def DFf(self) -> np.ndarray:
        return self._get("DFf", lambda: values_mat(self.fdata.DF))

    @property
    def Jf(self) -> np.ndarray | None:
        if self.fdata.J is None:
            return None
        return self._get("Jf", lambda: values_mat(self.fdata.J))

    @property
    def target_point(self) -> np.ndarray:
        return self._get("target_point", lambda: np.array([j.value for j in self.comp_jets]))

    def _proj(self, name):
        mat = getattr(self.fdata, name)
        if mat is None:
            return None
        return values_mat(mat)

    @property
    def PVf(self):
        return self._get("PVf", lambda: self._proj("PV"))

    @property
    def PHf(self):
        return self._get("PHf", lambda: self._proj("PH"))

    @property
    def PD1f(self):
        return self._get("PD1f", lambda: self._proj("PD1"))

    @property
    def PD2f(self):
        return self._get("PD2f", lambda: self._proj("PD2"))

    @property
    def PJD2f(self):
        return self._get("PJD2f", lambda: self._proj("PJD2"))

    @property
    def PMUf(self):
        return self._get("PMUf", lambda: self._proj("PMU"))

    @property
    def gamma_src(self) -> np.ndarray:
        return self._get("gamma_src", lambda: christoffel(self.fmap.source, self.p).gamma)

    @property
    def gamma_tgt(self) -> np.ndarray:
        return self._get(
            "gamma_tgt", lambda: christoffel(self.fmap.target, self.target_point).gamma
        )

    def frame(self, name: str, floats: bool = True) -> list:
        key = ("frame", name, floats)

        def build():
            data = self.fdata if floats else self.jdata
            vecs = getattr(data, name)
            if vecs is None:
                return []
            if floats:
                return [values_vec(v) for v in vecs]
            return vecs

        return self._get(key, build)

    @property
    def split(self) -> SplitFrame:
        def build():
            f = self.fdata
            as_np = lambda vs: tuple(values_vec(v) for v in (vs or []))
            return SplitFrame(
                point=tuple(float(x) for x in self.p),
                vertical=as_np(f.vertical),
                horizontal=as_np(f.horizontal),
                d1=as_np(f.d1),
                d2=as_np(f.d2),
                jd2=as_np(f.jd2),
                mu=as_np(f.mu),
                lam=float(value_of(f.lam)),
                lambda_sq_residual=f.conf_residual,
            )

        return self._get("split", build)

    @property
    def has_j(self) -> bool:
        return self.fmap.source.complex_structure is not None

    @property
    def dims(self) -> tuple[int, int, int, int]:
        return self.split.dims

    def bookkeeping(self) -> tuple[int, int, int]:
        """(m, n, r) with dim d1 = 2m, dim d2 = n, dim mu = 2r; validated."""
        d1, d2, _, mu = self.dims
        if d1 % 2 != 0 or mu % 2 != 0:
            raise BookkeepingError(f"odd distribution dimensions {self.dims}")
        m, n, r = d1 // 2, d2, mu // 2
        if 2 * (m + n + r) != self.fmap.source.dim or n + 2 * r != self.fmap.target.dim:
            raise BookkeepingError(
                f"dimension bookkeeping violated: dims {self.dims} against "
                f"{self.fmap.source.dim} -> {self.fmap.target.dim}"
            )
        return m, n, r

    # -- pointwise calculus on jets -------------------------------------------

    def gnorm(self, v) -> float:
        v = np.asarray(v, dtype=float)
        return math.sqrt(max(float(v @ self.Gf @ v), 0.0))

    def gn_norm(self, w) -> float:
        w = np.asarray(w, dtype=float)
        return math.sqrt(max(float(w @ self.GNf @ w), 0.0))

    def push(self, v) -> np.ndarray:
        return self.DFf @ np.asarray(v, dtype=float)

    def _wrap(self, jets) -> list[Jet2]:
        d = self.fmap.source.dim
        return [as_jet(j, d) for j in jets]

    def cov(self, Xv, Yjets) -> np.ndarray:
        """nabla_X of a field given by its jets at the point (X a float vector)."""
        Xv = np.asarray(Xv, dtype=float)
        Yjets = self._wrap(Yjets)
        Yv = np.array([j.value for j in Yjets])
        dY = np.array([j.gradient for j in Yjets])
        return dY @ Xv + np.einsum("kij,i,j->k", self.gamma_src, Xv, Yv)

    def bracket(self, Xjets, Yjets) -> np.ndarray:
        Xjets = self._wrap(Xjets)
        Yjets = self._wrap(Yjets)
        Xv = np.array([j.value for j in Xjets])
        Yv = np.array([j.value for j in Yjets])
        dX = np.array([j.gradient for j in Xjets])
        dY = np.array([j.gradient for j in Yjets])
        return dY @ Xv - dX @ Yv

    def section_push(self, Xjets) -> list[Jet2]:
        """First-order jets of the pushforward section q -> dF_q(X_q)."""
        n = self.fmap.target.dim
        return [vdot(self.df_pseudo[a], Xjets) for a in range(n)]

    def pullback_deriv(self, Zv, section_jets) -> np.ndarray:
        """Pullback-connection derivative of a target-vector section along Z."""
        Zv = np.asarray(Zv, dtype=float)
        sv = np.array([value_of(s) for s in section_jets])
        ds = np.array([as_jet(s, self.fmap.source.dim).gradient for s in section_jets])
        FZ = self.push(Zv)
        return ds @ Zv + np.einsum("abc,b,c->a", self.gamma_tgt, FZ, sv)

    def sff_jets(self, Xjets, Yjets) -> np.ndarray:
        """Second fundamental form on two fields given by jets at the point."""
        Xjets = self._wrap(Xjets)
        Yjets = self._wrap(Yjets)
        Xv = np.array([value_of(j) for j in Xjets])
        Yv = np.array([value_of(j) for j in Yjets])
        sec = self.section_push(Yjets)
        t1 = np.array([as_jet(s, self.fmap.source.dim).gradient @ Xv for s in sec])
        t2 = np.einsum("abc,b,c->a", self.gamma_tgt, self.DFf @ Xv, self.DFf @ Yv)
        t3 = self.DFf @ self.cov(Xv, Yjets)
        return t1 + t2 - t3

    # -- extensions ------------------------------------------------------------

    def subframe_jets(self, name: str) -> list[list[Jet2]]:
        def build():
            d = self.fmap.source.dim
            return [[as_jet(c, d) for c in vec] for vec in self.frame(name, floats=False)]

        return self._get(("subframe_jets", name), build)

    def jsubframe_jets(self, name: str) -> list[list[Jet2]]:
        """Jets of the complex structure applied to the named frame fields."""

        def build():
            return [self.jmul_jets(jets) for jets in self.subframe_jets(name)]

        return self._get(("jsubframe_jets", name), build)

    def extend(self, v, name: str) -> list[Jet2]:
        """Constant-coefficient extension of a vector in the named frame family."""
        vecs_f = self.frame(name)
        vecs_j = self.frame(name, floats=False)
        if not vecs_f:
            return [as_jet(0.0, self.fmap.source.dim) for _ in range(self.fmap.source.dim)]
        coeffs = [float(np.asarray(v) @ self.Gf @ w) for w in vecs_f]
        out = lin_comb(coeffs, vecs_j)
        return [as_jet(c, self.fmap.source.dim) for c in out]

    def extend_full(self, v) -> list[Jet2]:
        """Extension over the full vertical + horizontal frame."""
        vert = self.extend(self.PVf @ np.asarray(v, dtype=float), "vertical")
        hor = self.extend(self.PHf @ np.asarray(v, dtype=float), "horizontal")
        return [a + b for a, b in zip(vert, hor)]

    # -- J operators on fields (jets) and vectors (floats) ---------------------

    def jmul_jets(self, Ujets) -> list[Jet2]:
        return [vdot(row, Ujets) for row in self.jdata.J]

    def _pmat_jets(self, name):
        return getattr(self.jdata, name)

    def phi_jets(self, Ujets):
        return mat_vec(self.jdata.PV, self.jmul_jets(Ujets))

    def omega_jets(self, Ujets):
        return mat_vec(self.jdata.PJD2, self.jmul_jets(Ujets))

    def b_jets(self, Xjets):
        return mat_vec(self.jdata.PD2, self.jmul_jets(Xjets))

    def c_jets(self, Xjets):
        return mat_vec(self.jdata.PMU, self.jmul_jets(Xjets))

    def phi_vec(self, v):
        return self.PVf @ (self.Jf @ np.asarray(v, dtype=float))

    def omega_vec(self, v):
        return self.PJD2f @ (self.Jf @ np.asarray(v, dtype=float))

    def b_vec(self, x):
        return self.PD2f @ (self.Jf @ np.asarray(x, dtype=float))

    def c_vec(self, x):
        return self.PMUf @ (self.Jf @ np.asarray(x, dtype=float))

    # -- tensors ----------------------------------------------------------------

    def t_tensor(self, E, Gv) -> np.ndarray:
        """O'Neill T: horizontal part of nabla_{VE} (VG) plus vertical part of nabla_{VE} (HG)."""
        E = np.asarray(E, dtype=float)
        Gv = np.asarray(Gv, dtype=float)
        vE = self.PVf @ E
        VGj = self.extend(self.PVf @ Gv, "vertical")
        HGj = self.extend(self.PHf @ Gv, "horizontal")
        return self.PHf @ self.cov(vE, VGj) + self.PVf @ self.cov(vE, HGj)

    def a_tensor(self, E, Gv) -> np.ndarray:
        """O'Neill A: vertical part of nabla_{HE} (HG) plus horizontal part of nabla_{HE} (VG)."""
        E = np.asarray(E, dtype=float)
        Gv = np.asarray(Gv, dtype=float)
        hE = self.PHf @ E
        VGj = self.extend(self.PVf @ Gv, "vertical")
        HGj = self.extend(self.PHf @ Gv, "horizontal")
        return self.PVf @ self.cov(hE, HGj) + self.PHf @ self.cov(hE, VGj)

    def tension_direct(self) -> np.ndarray:
        """Trace of the second fundamental form over the full orthonormal frame."""
        out = np.zeros(self.fmap.target.dim)
        for name in ("vertical", "horizontal"):
            for jets in self.subframe_jets(name):
                out = out + self.sff_jets(jets, jets)
        return out

    def fiber_mean_curvature_vec(self) -> np.ndarray:
        vert = self.frame("vertical")
        if not vert:
            return np.zeros(self.fmap.source.dim)
        acc = np.zeros(self.fmap.source.dim)
        for v in vert:
            acc = acc + self.t_tensor(v, v)
        return acc / len(vert)

    @property
    def grad_ln_lambda(self) -> GradLnLambda:
        def build():
            lnl = s_log(self.jdata.lambda_sq) * 0.5
            coord_grad = lnl.gradient
            vec = self.Ginvf @ coord_grad
            h = self.PHf @ vec
            v = self.PVf @ vec
            lam = self.split.lam
            h_norm = lam * self.gnorm(h)
            return GradLnLambda(
                vector=vec,
                horizontal_part=h,
                vertical_part=v,
                horizontal_norm=h_norm,
                horizontally_homothetic=bool(h_norm < self.tol.homothety),
            )

        return self._get("grad_ln_lambda", build)

    def dln_lambda(self, v) -> float:
        """Directional derivative of ln(dilation) along a vector at the point."""
        return float(np.asarray(v, dtype=float) @ self.Gf @ self.grad_ln_lambda.vector)


class FrameField(VectorField):
    """A constructed frame vector as a smooth field (re-runs the pipeline per point)."""

    def __init__(self, fmap: SmoothMap, name: str, index: int, tol: Tolerances = DEFAULT_TOLERANCES):
        self.fmap = fmap
        self.name = name
        self.index = index
        self.tol = tol
        self.dim = fmap.source.dim

    def values_at(self, p) -> np.ndarray:
        return self.fmap.context(p, self.tol).frame(self.name)[self.index]

    def jets_at(self, p) -> list[Jet2]:
        ctx = self.fmap.context(p, self.tol)
        return ctx.subframe_jets(self.name)[self.index]


# ---------------------------------------------------------------------------
# Public operations


def jacobian(fmap: SmoothMap, p, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Rows are the component gradients; raises CriticalPointError if rank-deficient."""
    ctx = fmap.context(p, tol)
    DF = ctx.DFf
    svals = np.linalg.svd(DF, compute_uv=False)
    if svals[-1] <= 1e-10 * max(svals[0], 1.0):
        raise CriticalPointError(f"rank-deficient differential at {tuple(p)}")
    return DF


def split_frame(fmap: SmoothMap, p, tol: Tolerances = DEFAULT_TOLERANCES) -> SplitFrame:
    return fmap.context(p, tol).split


def _check_in_span(ctx: PointContext, v, proj, what: str):
    v = np.asarray(v, dtype=float)
    res = ctx.gnorm(v - proj @ v)
    scale = max(ctx.gnorm(v), 1.0)
    if res > 1e-8 * scale:
        raise StructureError(f"vector is not {what} (residual {res:.3e})")


def phi_omega(fmap: SmoothMap, p, v, tol: Tolerances = DEFAULT_TOLERANCES):
    """Split J(v), v vertical, into its vertical part and its J(d2) part."""
    ctx = fmap.context(p, tol)
    if ctx.Jf is None:
        raise StructureError("source manifold has no complex structure")
    _check_in_span(ctx, v, ctx.PVf, "vertical")
    phi = ctx.phi_vec(v)
    omega = ctx.omega_vec(v)
    recon = ctx.gnorm(ctx.Jf @ np.asarray(v, dtype=float) - phi - omega)
    if recon > tol.reconstruction * max(1.0, ctx.gnorm(v)):
        raise StructureError(f"phi/omega reconstruction residual {recon:.3e} at {tuple(p)}")
    return phi, omega


def bc_decompose(fmap: SmoothMap, p, x, tol: Tolerances = DEFAULT_TOLERANCES):
    """Split J(x), x horizontal, into its d2 part and its mu part."""
    ctx = fmap.context(p, tol)
    if ctx.Jf is None:
        raise StructureError("source manifold has no complex structure")
    _check_in_span(ctx, x, ctx.PHf, "horizontal")
    b = ctx.b_vec(x)
    c = ctx.c_vec(x)
    recon = ctx.gnorm(ctx.Jf @ np.asarray(x, dtype=float) - b - c)
    if recon > tol.reconstruction * max(1.0, ctx.gnorm(x)):
        raise StructureError(f"B/C reconstruction residual {recon:.3e} at {tuple(p)}")
    return b, c


def oneill_t(fmap: SmoothMap, p, E, G, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    return fmap.context(p, tol).t_tensor(E, G)


def oneill_a(fmap: SmoothMap, p, E, G, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    return fmap.context(p, tol).a_tensor(E, G)


def _field_jets(ctx: PointContext, X):
    if isinstance(X, VectorField):
        return X.jets_at(ctx.p)
    return ctx.extend_full(np.asarray(X, dtype=float))


def second_fundamental_form(
    fmap: SmoothMap, p, X, Y, tol: Tolerances = DEFAULT_TOLERANCES
) -> np.ndarray:
    """(nabla dF)(X, Y); vectors are extended by constant frame coefficients."""
    ctx = fmap.context(p, tol)
    return ctx.sff_jets(_field_jets(ctx, X), _field_jets(ctx, Y))


def tension(fmap: SmoothMap, p, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    return fmap.context(p, tol).tension_direct()


def fiber_mean_curvature(fmap: SmoothMap, p, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    return fmap.context(p, tol).fiber_mean_curvature_vec()


def grad_ln_lambda(fmap: SmoothMap, p, tol: Tolerances = DEFAULT_TOLERANCES) -> GradLnLambda:
    return fmap.context(p, tol).grad_ln_lambda


def fundamental_tensors(
    fmap: SmoothMap, p, tol: Tolerances = DEFAULT_TOLERANCES
) -> FundamentalTensorsAtPoint:
    ctx = fmap.context(p, tol)
    return FundamentalTensorsAtPoint(
        point=tuple(float(x) for x in ctx.p),
        t=ctx.t_tensor,
        a=ctx.a_tensor,
        sff=lambda X, Y: ctx.sff_jets(_field_jets(ctx, X), _field_jets(ctx, Y)),
        tension=ctx.tension_direct(),
        fiber_mean_curvature=ctx.fiber_mean_curvature_vec(),
    )


def sff_identity_residuals(
    fmap: SmoothMap, p, tol: Tolerances = DEFAULT_TOLERANCES
) -> tuple[float, float, float]:
    """Residuals of the conformal second-fundamental-form identities.

    Horizontal slots: (nabla dF)(X,Y) against the dilation-gradient expression;
    vertical slots: against -dF(T_V W); mixed slots: against -dF(A_X V).
    Each residual is the max g_N-norm gap over the respective frame pairs.
    """
    ctx = fmap.context(p, tol)
    grad = ctx.grad_ln_lambda
    horiz = ctx.frame("horizontal")
    vert = ctx.frame("vertical")
    horiz_j = ctx.subframe_jets("horizontal")
    vert_j = ctx.subframe_jets("vertical")
    push_grad = ctx.push(grad.vector)

    r_h = 0.0
    for a, X in enumerate(horiz):
        for b in range(a, len(horiz)):
            Y = horiz[b]
            lhs = ctx.sff_jets(horiz_j[a], horiz_j[b])
            rhs = (
                ctx.dln_lambda(X) * ctx.push(Y)
                + ctx.dln_lambda(Y) * ctx.push(X)
                - float(X @ ctx.Gf @ Y) * push_grad
            )
            r_h = max(r_h, ctx.gn_norm(lhs - rhs))

    r_v = 0.0
    for i, V in enumerate(vert):
        for j in range(i, len(vert)):
            W = vert[j]
            lhs = ctx.sff_jets(vert_j[i], vert_j[j])
            rhs = -ctx.push(ctx.t_tensor(V, W))
            r_v = max(r_v, ctx.gn_norm(lhs - rhs))

    r_m = 0.0
    for a, X in enumerate(horiz):
        for i, V in enumerate(vert):
            lhs = ctx.sff_jets(horiz_j[a], vert_j[i])
            rhs = -ctx.push(ctx.a_tensor(X, V))
            r_m = max(r_m, ctx.gn_norm(lhs - rhs))

    return r_h, r_v, r_m
