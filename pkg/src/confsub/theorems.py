"""Two-sided checkers for the characterization results of conformal semi-invariant submersions.

Each checker computes two residuals independently at a sample point:

* ``residual_a`` is the definition-level statement (bracket components,
  covariant-derivative components against a complementary frame, norms of the
  second fundamental form, the horizontal dilation gradient);
* ``residual_b`` is the equivalent condition expressed through the O'Neill
  tensors, the phi/omega/B/C decompositions and the pullback connection.

Verdicts are compared: a sound equivalence can never yield ``holds`` on one
side and ``fails`` on the other.  Conditions quantified over an empty frame
range are reported as vacuous; equivalences whose content degenerates (the
dilation characterizations need both the anti-invariant part and its
horizontal complement to be nonzero) are vacuous as well.

Checkers run in three modes.  With a verified Kaehler structure both sides are
produced.  Without a complex structure (or with an unverified one) only the
definition-level side is reported, labelled accordingly, and no agreement
claim is made.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .config import Tolerances
from .errors import BookkeepingError
from .submersion import PointContext

__all__ = [
    "ConditionReport",
    "DimensionBookkeeping",
    "CheckerSpec",
    "CHECKERS",
    "verdict_of",
    "check_d2_integrable",
    "check_d1_integrability",
    "check_horizontal_integrability",
    "check_homothetic_characterization",
    "check_horizontal_totally_geodesic",
    "check_vertical_totally_geodesic",
    "check_d1_totally_geodesic",
    "check_d2_totally_geodesic",
    "check_product_structures",
    "check_tension_formula",
    "check_harmonicity",
    "check_jd2_mu_totally_geodesic",
    "check_totally_geodesic_characterization",
    "check_corollaries",
    "check_sff_identities",
]

HOLDS, FAILS, INCONCLUSIVE = "holds", "fails", "inconclusive"


@dataclass(frozen=True)
class ConditionReport:
    name: str
    point: tuple[float, ...]
    residual_a: float
    residual_b: float | None
    verdict_a: str
    verdict_b: str
    agree: bool
    tolerance: float
    inconclusive_band: tuple[float, float]
    vacuous: bool = False
    label: str = ""

    @property
    def effective_agree(self) -> bool:
        """Agreement for gating purposes; vacuous reports carry no claim."""
        return self.agree or self.vacuous


@dataclass(frozen=True)
class DimensionBookkeeping:
    """dim d1 = 2m, dim d2 = n, dim mu = 2r; consistent with both chart dimensions."""

    m: int
    n: int
    r: int

    @classmethod
    def from_context(cls, ctx: PointContext) -> "DimensionBookkeeping":
        m, n, r = ctx.bookkeeping()
        return cls(m, n, r)

    def validate(self, dim_source: int, dim_target: int):
        if 2 * (self.m + self.n + self.r) != dim_source or self.n + 2 * self.r != dim_target:
            raise BookkeepingError(
                f"dimension bookkeeping violated: (m, n, r) = "
                f"({self.m}, {self.n}, {self.r}) against {dim_source} -> {dim_target}"
            )

    @property
    def fiber_dim(self) -> int:
        return 2 * self.m + self.n


def verdict_of(residual: float, tol: float) -> str:
    if residual < tol:
        return HOLDS
    if residual > 10.0 * tol:
        return FAILS
    return INCONCLUSIVE


def _report(name, ctx, ra, rb, tol, vacuous=False, label="", identity=False):
    va = verdict_of(ra, tol)
    if rb is None:
        vb = INCONCLUSIVE
    else:
        vb = verdict_of(rb, tol)
    agree = not ((va == HOLDS and vb == FAILS) or (va == FAILS and vb == HOLDS))
    if identity and not label:
        label = "identity"
    return ConditionReport(
        name=name,
        point=tuple(float(x) for x in ctx.p),
        residual_a=float(ra),
        residual_b=None if rb is None else float(rb),
        verdict_a=va,
        verdict_b=vb,
        agree=agree,
        tolerance=tol,
        inconclusive_band=(tol, 10.0 * tol),
        vacuous=vacuous,
        label=label,
    )


def _orth_residual_target(ctx: PointContext, v: np.ndarray, basis_vectors) -> float:
    """g_N-norm of the component of a target vector orthogonal to a pushed family."""
    GN = ctx.GNf
    basis = []
    for b in basis_vectors:
        w = np.asarray(b, dtype=float)
        for q in basis:
            w = w - float(w @ GN @ q) * q
        n = math.sqrt(max(float(w @ GN @ w), 0.0))
        if n > 1e-12:
            basis.append(w / n)
    res = np.asarray(v, dtype=float)
    for q in basis:
        res = res - float(res @ GN @ q) * q
    return math.sqrt(max(float(res @ GN @ res), 0.0))


# ---------------------------------------------------------------------------
# Integrability


def check_d2_integrable(ctx: PointContext, tol: Tolerances):
    """The anti-invariant vertical distribution is integrable unconditionally."""
    d2 = ctx.frame("d2")
    d2j = ctx.subframe_jets("d2")
    others = ctx.frame("d1") + ctx.frame("horizontal")
    if len(d2) < 2:
        return [_report("d2_integrability", ctx, 0.0, 0.0, tol.theorem, vacuous=True,
                        label="vacuous: fewer than two anti-invariant directions")]
    ra = 0.0
    for i in range(len(d2)):
        for j in range(i + 1, len(d2)):
            br = ctx.bracket(d2j[i], d2j[j])
            for Z in others:
                ra = max(ra, abs(float(br @ ctx.Gf @ Z)))
    return [_report("d2_integrability", ctx, ra, 0.0, tol.theorem)]


def check_d1_integrability(ctx: PointContext, tol: Tolerances):
    """Invariant part integrable iff the antisymmetrized sff of J-twisted pairs pushes into F(mu)."""
    d1 = ctx.frame("d1")
    d1j = ctx.subframe_jets("d1")
    d2 = ctx.frame("d2")
    mu = ctx.frame("mu")
    if len(d1) < 2:
        return [_report("d1_integrability", ctx, 0.0, 0.0, tol.theorem, vacuous=True,
                        label="vacuous: fewer than two invariant directions")]
    pushed_mu = [ctx.push(x) for x in mu]
    ra = rb = 0.0
    for i in range(len(d1)):
        for j in range(i + 1, len(d1)):
            br = ctx.bracket(d1j[i], d1j[j])
            for Z in d2:
                ra = max(ra, abs(float(br @ ctx.Gf @ Z)))
            jd1 = ctx.jsubframe_jets("d1")
            sxy = ctx.sff_jets(d1j[j], jd1[i])
            syx = ctx.sff_jets(d1j[i], jd1[j])
            rb = max(rb, _orth_residual_target(ctx, sxy - syx, pushed_mu))
    return [_report("d1_integrability", ctx, ra, rb, tol.theorem)]


def _horizontal_bracket_residual(ctx: PointContext) -> float:
    horiz = ctx.frame("horizontal")
    hj = ctx.subframe_jets("horizontal")
    vert = ctx.frame("vertical")
    worst = 0.0
    for a in range(len(horiz)):
        for b in range(a + 1, len(horiz)):
            br = ctx.bracket(hj[a], hj[b])
            for u in vert:
                worst = max(worst, abs(float(br @ ctx.Gf @ u)))
    return worst


def check_horizontal_integrability(ctx: PointContext, tol: Tolerances):
    horiz = ctx.frame("horizontal")
    hj = ctx.subframe_jets("horizontal")
    if len(horiz) < 2:
        return [_report("horizontal_integrability", ctx, 0.0, 0.0, tol.theorem, vacuous=True,
                        label="vacuous: fewer than two horizontal directions")]
    ra = _horizontal_bracket_residual(ctx)
    if ctx.Jf is None:
        return [_report("horizontal_integrability", ctx, ra, None, tol.theorem,
                        label="direct test only (no complex structure)")]
    d1 = ctx.frame("d1")
    d2 = ctx.frame("d2")
    grad = ctx.grad_ln_lambda.vector
    lsq = ctx.split.lam ** 2
    rb = 0.0
    for a in range(len(horiz)):
        X, Xj = horiz[a], hj[a]
        for b in range(a + 1, len(horiz)):
            Y, Yj = horiz[b], hj[b]
            BX, BY = ctx.b_vec(X), ctx.b_vec(Y)
            CX, CY = ctx.c_vec(X), ctx.c_vec(Y)
            # invariant-part component of the bracket through the A tensor
            w1 = (
                ctx.a_tensor(Y, ctx.omega_vec(BX))
                - ctx.a_tensor(X, ctx.omega_vec(BY))
                - ctx.Jf @ ctx.a_tensor(X, CY)
                + ctx.Jf @ ctx.a_tensor(Y, CX)
            )
            for V in d1:
                rb = max(rb, abs(float(w1 @ ctx.Gf @ V)))
            # anti-invariant component through the pullback connection
            if d2:
                secX = ctx.section_push(ctx.c_jets(Xj))
                secY = ctx.section_push(ctx.c_jets(Yj))
                dmix = ctx.pullback_deriv(Y, secX) - ctx.pullback_deriv(X, secY)
                w2 = (
                    ctx.a_tensor(Y, BX)
                    - ctx.a_tensor(X, BY)
                    - ctx.dln_lambda(CY) * X
                    + ctx.dln_lambda(CX) * Y
                    + 2.0 * float(X @ ctx.Gf @ CY) * grad
                )
                for W in d2:
                    JW = ctx.Jf @ W
                    val = float(w2 @ ctx.Gf @ JW) - float(dmix @ ctx.GNf @ ctx.push(JW)) / lsq
                    rb = max(rb, abs(val))
    return [_report("horizontal_integrability", ctx, ra, rb, tol.theorem)]


def check_homothetic_characterization(ctx: PointContext, tol: Tolerances):
    """Horizontal homothety against the pullback-connection identity on horizontal pairs."""
    name = "homothety_characterization"
    d2 = ctx.frame("d2")
    mu = ctx.frame("mu")
    ra = ctx.grad_ln_lambda.horizontal_norm
    if ctx.Jf is None:
        return [_report(name, ctx, ra, None, tol.theorem,
                        label="direct test only (no complex structure)")]
    if not d2 or not mu:
        # with either part empty the identity holds identically and carries
        # no information about the dilation
        return [_report(name, ctx, ra, 0.0, tol.theorem, vacuous=True,
                        label="vacuous: needs nonzero d2 and mu")]
    hyp = _horizontal_bracket_residual(ctx)
    if hyp > tol.theorem:
        return [_report(name, ctx, ra, None, tol.theorem,
                        label="hypothesis unmet: horizontal distribution not integrable")]
    horiz = ctx.frame("horizontal")
    hj = ctx.subframe_jets("horizontal")
    lsq = ctx.split.lam ** 2
    rb = 0.0
    for a in range(len(horiz)):
        X, Xj = horiz[a], hj[a]
        for b in range(a + 1, len(horiz)):
            Y, Yj = horiz[b], hj[b]
            BX, BY = ctx.b_vec(X), ctx.b_vec(Y)
            secX = ctx.section_push(ctx.c_jets(Xj))
            secY = ctx.section_push(ctx.c_jets(Yj))
            dmix = ctx.pullback_deriv(Y, secX) - ctx.pullback_deriv(X, secY)
            lhs_vec = ctx.a_tensor(Y, BX) - ctx.a_tensor(X, BY)
            for W in d2:
                JW = ctx.Jf @ W
                val = float(lhs_vec @ ctx.Gf @ JW) - float(dmix @ ctx.GNf @ ctx.push(JW)) / lsq
                rb = max(rb, abs(val))
    return [_report(name, ctx, ra, rb, tol.theorem)]


# ---------------------------------------------------------------------------
# Totally geodesic foliations


def check_horizontal_totally_geodesic(ctx: PointContext, tol: Tolerances):
    horiz = ctx.frame("horizontal")
    hj = ctx.subframe_jets("horizontal")
    vert = ctx.frame("vertical")
    ra = 0.0
    for a in range(len(horiz)):
        for b in range(len(horiz)):
            nab = ctx.cov(horiz[a], hj[b])
            for u in vert:
                ra = max(ra, abs(float(nab @ ctx.Gf @ u)))
    name = "horizontal_totally_geodesic"
    if ctx.Jf is None:
        return [_report(name, ctx, ra, None, tol.theorem,
                        label="direct test only (no complex structure)")]
    d1 = ctx.frame("d1")
    d2 = ctx.frame("d2")
    grad = ctx.grad_ln_lambda.vector
    lsq = ctx.split.lam ** 2
    rb = 0.0
    for a in range(len(horiz)):
        X, Xj = horiz[a], hj[a]
        for b in range(len(horiz)):
            Y, Yj = horiz[b], hj[b]
            BY, CY = ctx.b_vec(Y), ctx.c_vec(Y)
            w1 = ctx.a_tensor(X, CY) + ctx.PVf @ ctx.cov(X, ctx.b_jets(Yj))
            for V in d1:
                rb = max(rb, abs(float(w1 @ ctx.Gf @ V)))
            if d2:
                vec = ctx.a_tensor(X, BY) - ctx.dln_lambda(CY) * X + float(X @ ctx.Gf @ CY) * grad
                for k, W in enumerate(d2):
                    sec = ctx.section_push(ctx.jsubframe_jets("d2")[k])
                    dval = ctx.pullback_deriv(X, sec)
                    val = float(vec @ ctx.Gf @ (ctx.Jf @ W)) - float(dval @ ctx.GNf @ ctx.push(CY)) / lsq
                    rb = max(rb, abs(val))
    return [_report(name, ctx, ra, rb, tol.theorem)]


def check_vertical_totally_geodesic(ctx: PointContext, tol: Tolerances):
    vert = ctx.frame("vertical")
    vj = ctx.subframe_jets("vertical")
    horiz = ctx.frame("horizontal")
    ra = 0.0
    for i in range(len(vert)):
        for j in range(len(vert)):
            nab = ctx.cov(vert[i], vj[j])
            for X in horiz:
                ra = max(ra, abs(float(nab @ ctx.Gf @ X)))
    name = "vertical_totally_geodesic"
    if ctx.Jf is None:
        return [_report(name, ctx, ra, None, tol.theorem,
                        label="direct test only (no complex structure)")]
    d2 = ctx.frame("d2")
    mu = ctx.frame("mu")
    muj = ctx.subframe_jets("mu")
    grad = ctx.grad_ln_lambda.vector
    lsq = ctx.split.lam ** 2
    rb = 0.0
    for i in range(len(vert)):
        V, Vj = vert[i], vj[i]
        for j in range(len(vert)):
            U, Uj = vert[j], vj[j]
            w1 = ctx.t_tensor(V, ctx.omega_vec(U)) + ctx.PVf @ ctx.cov(V, ctx.phi_jets(Uj))
            for W in d2:
                rb = max(rb, abs(float(w1 @ ctx.Gf @ W)))
            if mu:
                omV = ctx.omega_vec(V)
                omU = ctx.omega_vec(U)
                phU = ctx.phi_vec(U)
                phV = ctx.phi_vec(V)
                vec = (
                    ctx.c_vec(ctx.t_tensor(U, phV))
                    + ctx.a_tensor(omV, phU)
                    + float(omV @ ctx.Gf @ omU) * grad
                )
                for k, X in enumerate(mu):
                    sec = ctx.section_push(muj[k])
                    dval = ctx.pullback_deriv(omV, sec)
                    val = float(vec @ ctx.Gf @ X) - float(dval @ ctx.GNf @ ctx.push(omU)) / lsq
                    rb = max(rb, abs(val))
    return [_report(name, ctx, ra, rb, tol.theorem)]


def check_d1_totally_geodesic(ctx: PointContext, tol: Tolerances):
    name = "d1_totally_geodesic"
    d1 = ctx.frame("d1")
    d1j = ctx.subframe_jets("d1")
    if not d1:
        return [_report(name, ctx, 0.0, 0.0, tol.theorem, vacuous=True,
                        label="vacuous: invariant part is zero")]
    others = ctx.frame("d2") + ctx.frame("horizontal")
    ra = 0.0
    for i in range(len(d1)):
        for j in range(len(d1)):
            nab = ctx.cov(d1[i], d1j[j])
            for Z in others:
                ra = max(ra, abs(float(nab @ ctx.Gf @ Z)))
    horiz = ctx.frame("horizontal")
    mu = ctx.frame("mu")
    pushed_mu = [ctx.push(x) for x in mu]
    rb = 0.0
    for i in range(len(d1)):
        for j in range(len(d1)):
            sff = ctx.sff_jets(d1j[i], ctx.jsubframe_jets("d1")[j])
            rb = max(rb, _orth_residual_target(ctx, sff, pushed_mu))
            for X in horiz:
                CX = ctx.c_vec(X)
                omBX = ctx.omega_vec(ctx.b_vec(X))
                lhs = float(ctx.push(CX) @ ctx.GNf @ sff) / (ctx.split.lam ** 2)
                rhs = float(d1[j] @ ctx.Gf @ ctx.t_tensor(d1[i], omBX))
                rb = max(rb, abs(lhs - rhs))
    return [_report(name, ctx, ra, rb, tol.theorem)]


def check_d2_totally_geodesic(ctx: PointContext, tol: Tolerances):
    name = "d2_totally_geodesic"
    d2 = ctx.frame("d2")
    d2j = ctx.subframe_jets("d2")
    if not d2:
        return [_report(name, ctx, 0.0, 0.0, tol.theorem, vacuous=True,
                        label="vacuous: anti-invariant part is zero")]
    others = ctx.frame("d1") + ctx.frame("horizontal")
    ra = 0.0
    for i in range(len(d2)):
        for j in range(len(d2)):
            nab = ctx.cov(d2[i], d2j[j])
            for Z in others:
                ra = max(ra, abs(float(nab @ ctx.Gf @ Z)))
    d1 = ctx.frame("d1")
    d1j = ctx.subframe_jets("d1")
    mu = ctx.frame("mu")
    horiz = ctx.frame("horizontal")
    pushed_mu = [ctx.push(x) for x in mu]
    grad_h = ctx.grad_ln_lambda.horizontal_part
    lam = ctx.split.lam
    rb = 0.0
    for i in range(len(d2)):
        for k in range(len(d1)):
            sff = ctx.sff_jets(d2j[i], ctx.jsubframe_jets("d1")[k])
            rb = max(rb, _orth_residual_target(ctx, sff, pushed_mu))
    for i in range(len(d2)):
        X2, X2j = d2[i], d2j[i]
        secJX2 = ctx.section_push(ctx.jsubframe_jets("d2")[i])
        for j in range(len(d2)):
            Y2 = d2[j]
            JY2 = ctx.Jf @ Y2
            for X in horiz:
                BX, CX = ctx.b_vec(X), ctx.c_vec(X)
                JCX = ctx.Jf @ CX
                lhs = -float(ctx.pullback_deriv(JY2, secJX2) @ ctx.GNf @ ctx.push(JCX)) / (lam ** 2)
                rhs = float(Y2 @ ctx.Gf @ ctx.b_vec(ctx.t_tensor(X2, BX)))
                rhs += float(X2 @ ctx.Gf @ Y2) * float(grad_h @ ctx.Gf @ JCX)
                rb = max(rb, abs(lhs - rhs))
    return [_report(name, ctx, ra, rb, tol.theorem)]


def _combine(name, ctx, tol, parts):
    ra = max(p.residual_a for p in parts)
    rbs = [p.residual_b for p in parts if p.residual_b is not None]
    rb = max(rbs) if rbs else None
    vac = all(p.vacuous for p in parts)
    label = "conjunction: " + ", ".join(p.name for p in parts)
    return _report(name, ctx, ra, rb, tol.theorem, vacuous=vac, label=label)


def _memo_check(func, ctx: PointContext, tol: Tolerances):
    return ctx._get(("checker", func.__name__, tol), lambda: func(ctx, tol))


def check_product_structures(ctx: PointContext, tol: Tolerances):
    """Local product structures: total space (horizontal x fibers) and within fibers."""
    teo_h = _memo_check(check_horizontal_totally_geodesic, ctx, tol)[0]
    teo_v = _memo_check(check_vertical_totally_geodesic, ctx, tol)[0]
    out = [_combine("product_total_space", ctx, tol, [teo_h, teo_v])]
    if ctx.Jf is not None:
        teo_1 = _memo_check(check_d1_totally_geodesic, ctx, tol)[0]
        teo_2 = _memo_check(check_d2_totally_geodesic, ctx, tol)[0]
        out.append(_combine("product_fibers", ctx, tol, [teo_1, teo_2]))
    return out


# ---------------------------------------------------------------------------
# Tension, harmonicity, total geodesicity


def _tension_formula_rhs(ctx: PointContext, bk: DimensionBookkeeping) -> np.ndarray:
    mean = ctx.fiber_mean_curvature_vec()
    grad = ctx.grad_ln_lambda.vector
    coeff = 2.0 - bk.n - 2.0 * bk.r
    return -float(bk.fiber_dim) * ctx.push(mean) + coeff * ctx.push(grad)


def check_tension_formula(ctx: PointContext, tol: Tolerances):
    bk = DimensionBookkeeping.from_context(ctx)
    bk.validate(ctx.fmap.source.dim, ctx.fmap.target.dim)
    tau = ctx.tension_direct()
    rhs = _tension_formula_rhs(ctx, bk)
    res = ctx.gn_norm(tau - rhs)
    return [_report("tension_formula", ctx, res, res, tol.identity, identity=True)]


def check_harmonicity(ctx: PointContext, tol: Tolerances):
    """Harmonicity against the mean-curvature / dilation decomposition of the tension."""
    bk = DimensionBookkeeping.from_context(ctx)
    bk.validate(ctx.fmap.source.dim, ctx.fmap.target.dim)
    tau = ctx.tension_direct()
    ra = ctx.gn_norm(tau)
    rb = ctx.gn_norm(_tension_formula_rhs(ctx, bk))
    minimal = ctx.gn_norm(ctx.push(ctx.fiber_mean_curvature_vec())) < tol.theorem
    homothetic = ctx.grad_ln_lambda.horizontal_norm < tol.theorem
    branch = "minimal-fibers-iff-harmonic" if bk.n + 2 * bk.r == 2 else "paired-implications"
    label = f"{branch}; minimal={minimal}; homothetic={homothetic}"
    return [_report("harmonicity", ctx, ra, rb, tol.theorem, label=label)]


def check_jd2_mu_totally_geodesic(ctx: PointContext, tol: Tolerances):
    """Vanishing sff on (J d2) x horizontal pairs iff horizontally homothetic."""
    name = "jd2_mu_totally_geodesic"
    d2j = ctx.subframe_jets("d2")
    horizj = ctx.subframe_jets("horizontal")
    rb = ctx.grad_ln_lambda.horizontal_norm
    if not d2j:
        return [_report(name, ctx, 0.0, rb, tol.theorem, vacuous=True,
                        label="vacuous: anti-invariant part is zero")]
    ra = 0.0
    for i in range(len(d2j)):
        JUj = ctx.jsubframe_jets("d2")[i]
        for Xj in horizj:
            ra = max(ra, ctx.gn_norm(ctx.sff_jets(JUj, Xj)))
    return [_report(name, ctx, ra, rb, tol.theorem)]


def check_totally_geodesic_characterization(ctx: PointContext, tol: Tolerances):
    name = "totally_geodesic_characterization"
    vj = ctx.subframe_jets("vertical")
    hj = ctx.subframe_jets("horizontal")
    basis = vj + hj
    ra = 0.0
    for i in range(len(basis)):
        for j in range(i, len(basis)):
            ra = max(ra, ctx.gn_norm(ctx.sff_jets(basis[i], basis[j])))
    if ctx.Jf is None:
        return [_report(name, ctx, ra, None, tol.theorem,
                        label="direct test only (no complex structure)")]
    d1 = ctx.frame("d1")
    d1j = ctx.subframe_jets("d1")
    d2j = ctx.subframe_jets("d2")
    vert = ctx.frame("vertical")
    cond_a = 0.0
    for i in range(len(d1)):
        for j in range(len(d1)):
            JVj = ctx.jsubframe_jets("d1")[j]
            JV = ctx.Jf @ d1[j]
            w = ctx.c_vec(ctx.t_tensor(d1[i], JV)) + ctx.omega_vec(
                ctx.PVf @ ctx.cov(d1[i], JVj)
            )
            cond_a = max(cond_a, ctx.gnorm(w))
    cond_b = 0.0
    for i in range(len(vert)):
        for j in range(len(d2j)):
            JWj = ctx.jsubframe_jets("d2")[j]
            JW = ctx.Jf @ ctx.frame("d2")[j]
            w = ctx.c_vec(ctx.PHf @ ctx.cov(vert[i], JWj)) + ctx.omega_vec(
                ctx.t_tensor(vert[i], JW)
            )
            cond_b = max(cond_b, ctx.gnorm(w))
    cond_c = ctx.grad_ln_lambda.horizontal_norm
    rb = max(cond_a, cond_b, cond_c)
    return [_report(name, ctx, ra, rb, tol.theorem)]


# ---------------------------------------------------------------------------
# Corollaries


def check_corollaries(ctx: PointContext, tol: Tolerances):
    reports = []
    d2 = ctx.frame("d2")
    d2j = ctx.subframe_jets("d2")
    mu = ctx.frame("mu")
    muj = ctx.subframe_jets("mu")
    vert = ctx.frame("vertical")
    vj = ctx.subframe_jets("vertical")
    horiz = ctx.frame("horizontal")
    hj = ctx.subframe_jets("horizontal")
    anti_holo = ctx.has_j and len(mu) == 0 and len(d2) > 0
    lam = ctx.split.lam

    # anti-holomorphic case: J(d2) spans the whole horizontal space
    name1, name2 = "antiholomorphic_integrability", "antiholomorphic_horizontal_geodesic"
    if not anti_holo:
        for nm in (name1, name2):
            reports.append(_report(nm, ctx, 0.0, None, tol.theorem,
                                   label="skipped: hypothesis unmet (not anti-holomorphic)"))
    else:
        ra = _horizontal_bracket_residual(ctx)
        rb = 0.0
        for i in range(len(d2)):
            JW1 = ctx.push(ctx.Jf @ d2[i])
            JW1j = ctx.jsubframe_jets("d2")[i]
            for j in range(i + 1, len(d2)):
                JW2 = ctx.push(ctx.Jf @ d2[j])
                JW2j = ctx.jsubframe_jets("d2")[j]
                for k in range(len(vert)):
                    s2 = ctx.sff_jets(vj[k], JW2j)
                    s1 = ctx.sff_jets(vj[k], JW1j)
                    val = float(JW1 @ ctx.GNf @ s2) - float(JW2 @ ctx.GNf @ s1)
                    rb = max(rb, abs(val) / (lam ** 2))
        reports.append(_report(name1, ctx, ra, rb, tol.theorem))

        ra2 = 0.0
        for a in range(len(horiz)):
            for b in range(len(horiz)):
                nab = ctx.cov(horiz[a], hj[b])
                for u in vert:
                    ra2 = max(ra2, abs(float(nab @ ctx.Gf @ u)))
        pushed_mu = [ctx.push(x) for x in mu]
        rb2 = 0.0
        for k in range(len(vert)):
            for i in range(len(d2)):
                s = ctx.sff_jets(vj[k], ctx.jsubframe_jets("d2")[i])
                rb2 = max(rb2, _orth_residual_target(ctx, s, pushed_mu) / (lam ** 2))
        reports.append(_report(name2, ctx, ra2, rb2, tol.theorem))

    # dilation constant characterizations under parallelism hypotheses
    name3 = "d2_parallel_homothety"
    if not d2 or not mu:
        reports.append(_report(name3, ctx, ctx.grad_ln_lambda.horizontal_norm, 0.0,
                               tol.theorem, vacuous=True,
                               label="vacuous: needs nonzero d2 and mu"))
    else:
        hyp = 0.0
        for a in range(len(horiz)):
            for j in range(len(d2)):
                nab = ctx.cov(horiz[a], d2j[j])
                hyp = max(hyp, ctx.gnorm(nab - ctx.PD2f @ nab))
        if hyp > tol.theorem:
            reports.append(_report(name3, ctx, ctx.grad_ln_lambda.horizontal_norm, None,
                                   tol.theorem,
                                   label="hypothesis unmet: d2 not parallel along horizontal"))
        else:
            rb3 = 0.0
            for a in range(len(horiz)):
                X = horiz[a]
                for b in range(len(horiz)):
                    Y, Yj = horiz[b], hj[b]
                    BY = ctx.b_vec(Y)
                    CY = ctx.c_vec(Y)
                    lhs_vec = ctx.a_tensor(X, BY)
                    for k in range(len(d2)):
                        JWj = ctx.jsubframe_jets("d2")[k]
                        sec = ctx.section_push(JWj)
                        dval = ctx.pullback_deriv(X, sec)
                        val = float(lhs_vec @ ctx.Gf @ (ctx.Jf @ d2[k])) - float(
                            dval @ ctx.GNf @ ctx.push(CY)
                        ) / (lam ** 2)
                        rb3 = max(rb3, abs(val))
            reports.append(_report(name3, ctx, ctx.grad_ln_lambda.horizontal_norm, rb3, tol.theorem))

    name4 = "mu_parallel_dilation"
    if not d2 or not mu:
        ra4 = 0.0
        if mu:
            PMU = ctx.PMUf
            gvec = ctx.grad_ln_lambda.vector
            ra4 = lam * ctx.gnorm(PMU @ gvec)
        reports.append(_report(name4, ctx, ra4, 0.0, tol.theorem, vacuous=True,
                               label="vacuous: needs nonzero d2 and mu"))
    else:
        hyp = 0.0
        for i in range(len(vert)):
            for k in range(len(mu)):
                nab = ctx.cov(vert[i], muj[k])
                hyp = max(hyp, ctx.gnorm(nab - ctx.PMUf @ nab))
        ra4 = lam * ctx.gnorm(ctx.PMUf @ ctx.grad_ln_lambda.vector)
        if hyp > tol.theorem:
            reports.append(_report(name4, ctx, ra4, None, tol.theorem,
                                   label="hypothesis unmet: mu not parallel along the fibers"))
        else:
            rb4 = 0.0
            for i in range(len(vert)):
                U, Uj = vert[i], vj[i]
                phU = ctx.phi_vec(U)
                for j in range(len(vert)):
                    V = vert[j]
                    omV = ctx.omega_vec(V)
                    phV = ctx.phi_vec(V)
                    omU = ctx.omega_vec(U)
                    vec = ctx.c_vec(ctx.t_tensor(U, phV)) + ctx.a_tensor(omV, phU)
                    for k in range(len(mu)):
                        sec = ctx.section_push(muj[k])
                        dval = ctx.pullback_deriv(omV, sec)
                        val = float(vec @ ctx.Gf @ mu[k]) - float(
                            dval @ ctx.GNf @ ctx.push(omU)
                        ) / (lam ** 2)
                        rb4 = max(rb4, abs(val))
            reports.append(_report(name4, ctx, ra4, rb4, tol.theorem))
    return reports


# ---------------------------------------------------------------------------
# Identity diagnostics (run on any conformal scene)


def check_sff_identities(ctx: PointContext, tol: Tolerances):
    from .submersion import sff_identity_residuals

    rh, rv, rm = sff_identity_residuals(ctx.fmap, ctx.p, ctx.tol)
    return [
        _report("sff_identity_horizontal", ctx, rh, rh, tol.identity, identity=True),
        _report("sff_identity_vertical", ctx, rv, rv, tol.identity, identity=True),
        _report("sff_identity_mixed", ctx, rm, rm, tol.identity, identity=True),
    ]


# ---------------------------------------------------------------------------
# Registry


@dataclass(frozen=True)
class CheckerSpec:
    name: str
    func: Callable
    needs_j: bool  # no definition-level side without a complex structure
    kahler_gated: bool  # equivalence side requires a verified Kaehler structure


CHECKERS: dict[str, CheckerSpec] = {
    spec.name: spec
    for spec in [
        CheckerSpec("d2_integrability", check_d2_integrable, True, True),
        CheckerSpec("d1_integrability", check_d1_integrability, True, True),
        CheckerSpec("horizontal_integrability", check_horizontal_integrability, False, True),
        CheckerSpec("homothety_characterization", check_homothetic_characterization, False, True),
        CheckerSpec("horizontal_totally_geodesic", check_horizontal_totally_geodesic, False, True),
        CheckerSpec("vertical_totally_geodesic", check_vertical_totally_geodesic, False, True),
        CheckerSpec("d1_totally_geodesic", check_d1_totally_geodesic, True, True),
        CheckerSpec("d2_totally_geodesic", check_d2_totally_geodesic, True, True),
        CheckerSpec("product_structures", check_product_structures, False, True),
        CheckerSpec("tension_formula", check_tension_formula, True, True),
        CheckerSpec("harmonicity", check_harmonicity, True, True),
        CheckerSpec("jd2_mu_totally_geodesic", check_jd2_mu_totally_geodesic, True, True),
        CheckerSpec(
            "totally_geodesic_characterization",
            check_totally_geodesic_characterization,
            False,
            True,
        ),
        CheckerSpec("corollaries", check_corollaries, True, True),
        CheckerSpec("sff_identities", check_sff_identities, False, False),
    ]
}
