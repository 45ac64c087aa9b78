"""Suite runner: structure validation, Kaehler gate, checker dispatch, report assembly.

Exit code contract: 0 success, 2 scene error (raised before a report exists),
3 structural failure, 4 theorem disagreement, 5 hypothesis violations only.
Vacuous reports never count as disagreements: an equivalence with an empty
side carries no claim.
"""

from __future__ import annotations

from dataclasses import replace

from . import __version__
from .config import Tolerances
from .errors import EngineError, StructureError
from .geometry import complex_structure_residuals, nabla_j_residual
from .report import RunReport, StructureRow
from .scenes import Scene, sample_points
from .theorems import CHECKERS, ConditionReport, _memo_check

__all__ = ["run", "EXIT_OK", "EXIT_SCENE", "EXIT_STRUCTURAL", "EXIT_DISAGREE", "EXIT_HYPOTHESIS"]

EXIT_OK = 0
EXIT_SCENE = 2
EXIT_STRUCTURAL = 3
EXIT_DISAGREE = 4
EXIT_HYPOTHESIS = 5


def _strip_verdict_b(r: ConditionReport, label: str) -> ConditionReport:
    return replace(
        r,
        residual_b=None,
        verdict_b="inconclusive",
        agree=True,
        vacuous=False,
        label=label,
    )


def run(
    scene: Scene,
    points: int | None = None,
    seed: int | None = None,
    tol: Tolerances | None = None,
    only: list[str] | None = None,
    structure_only: bool = False,
    hypothesis_ok: bool = False,
) -> RunReport:
    tol = tol if tol is not None else scene.tolerances
    count = scene.count if points is None else int(points)
    the_seed = scene.seed if seed is None else int(seed)
    sampled = sample_points(scene, count=count, seed=the_seed)
    fmap = scene.fmap
    use_j = fmap.source.complex_structure is not None and not scene.machinery_only

    report = RunReport(
        scene=scene.name,
        engine_version=__version__,
        seed=the_seed,
        count=count,
        theorem_tolerance=tol.theorem,
        machinery_only=not use_j,
        kahler_verified=None,
    )

    # structure pass
    contexts = []
    dims_seen = set()
    for idx, p in enumerate(sampled):
        ctx = fmap.context(p, tol)
        split = ctx.split  # validates frames, conformality, splitting
        kah = None
        if use_j:
            r_sq, r_compat = complex_structure_residuals(fmap.source, p)
            if r_sq > tol.structural or r_compat > tol.structural:
                raise StructureError(
                    f"complex structure invalid at {tuple(float(x) for x in p)}: "
                    f"J^2 residual {r_sq:.3e}, compatibility residual {r_compat:.3e}"
                )
            kah = nabla_j_residual(fmap.source, p)
        dims = split.dims if use_j else None
        if use_j:
            dims_seen.add(dims)
        report.structure.append(
            StructureRow(
                index=idx,
                point=tuple(float(x) for x in p),
                lam=split.lam,
                dims=dims,
                conformality_residual=split.lambda_sq_residual,
                kahler_residual=kah,
            )
        )
        contexts.append(ctx)
    if use_j and len(dims_seen) > 1:
        raise StructureError(f"distribution dimensions vary across points: {sorted(dims_seen)}")

    kahler_ok = None
    if use_j:
        kahler_ok = all(
            row.kahler_residual is not None and row.kahler_residual < tol.kahler
            for row in report.structure
        )
        report.kahler_verified = kahler_ok
        if not kahler_ok and scene.kahler_expected:
            report.warnings.append(
                "kaehler structure expected but the parallelism residual exceeds tolerance; "
                "equivalence verdicts withheld"
            )

    if not structure_only:
        names = list(CHECKERS)
        if only:
            unknown = [n for n in only if n not in CHECKERS]
            if unknown:
                raise EngineError(f"unknown checkers: {', '.join(unknown)}")
            names = [n for n in names if n in only]
        for name in names:
            spec = CHECKERS[name]
            if not use_j and spec.needs_j:
                report.skipped.append((name, "no complex structure"))
                continue
            gate_label = None
            if use_j and spec.kahler_gated and not kahler_ok:
                gate_label = "hypothesis unmet: Kaehler parallelism residual above tolerance"
            for ctx in contexts:
                for r in _memo_check(spec.func, ctx, tol):
                    if gate_label is not None:
                        r = _strip_verdict_b(r, gate_label)
                    report.reports.setdefault(r.name, []).append(r)

    if report.disagreements():
        report.exit_code = EXIT_DISAGREE
    elif report.warnings and not hypothesis_ok:
        report.exit_code = EXIT_HYPOTHESIS
    else:
        report.exit_code = EXIT_OK
    return report
