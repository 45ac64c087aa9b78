"""Run reports: per-point structure rows, per-checker condition reports, aggregates.

Two output formats: a human-readable table and a canonical structured text
with stable key order.  The canonical form contains no timestamps and uses
shortest round-trip float repr, so identical runs serialize byte-identically
and `from_canonical(to_canonical(r))` reproduces the report exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .theorems import ConditionReport

__all__ = [
    "StructureRow",
    "CheckerAggregate",
    "RunReport",
    "to_canonical",
    "from_canonical",
    "render_table",
]

_SEP = " | "


@dataclass(frozen=True)
class StructureRow:
    index: int
    point: tuple[float, ...]
    lam: float
    dims: tuple[int, int, int, int] | None  # (d1, d2, jd2, mu); None without J
    conformality_residual: float
    kahler_residual: float | None


@dataclass(frozen=True)
class CheckerAggregate:
    name: str
    total: int
    max_residual_a: float
    max_residual_b: float | None
    agree_count: int
    vacuous_count: int
    holds_a: int
    fails_a: int
    inconclusive_a: int
    holds_b: int
    fails_b: int
    inconclusive_b: int

    @classmethod
    def from_reports(cls, name: str, reports: list[ConditionReport]) -> "CheckerAggregate":
        rbs = [r.residual_b for r in reports if r.residual_b is not None]
        count = lambda side, verdict: sum(
            1 for r in reports if getattr(r, f"verdict_{side}") == verdict
        )
        return cls(
            name=name,
            total=len(reports),
            max_residual_a=max((r.residual_a for r in reports), default=0.0),
            max_residual_b=max(rbs) if rbs else None,
            agree_count=sum(1 for r in reports if r.agree),
            vacuous_count=sum(1 for r in reports if r.vacuous),
            holds_a=count("a", "holds"),
            fails_a=count("a", "fails"),
            inconclusive_a=count("a", "inconclusive"),
            holds_b=count("b", "holds"),
            fails_b=count("b", "fails"),
            inconclusive_b=count("b", "inconclusive"),
        )

@dataclass
class RunReport:
    scene: str
    engine_version: str
    seed: int
    count: int
    theorem_tolerance: float
    machinery_only: bool
    kahler_verified: bool | None  # None when there is no complex structure
    structure: list[StructureRow] = field(default_factory=list)
    reports: dict[str, list[ConditionReport]] = field(default_factory=dict)
    skipped: list[tuple[str, str]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    exit_code: int = 0

    def aggregates(self) -> list[CheckerAggregate]:
        return [
            CheckerAggregate.from_reports(name, reps) for name, reps in self.reports.items()
        ]

    def disagreements(self) -> list[ConditionReport]:
        return [
            r
            for reps in self.reports.values()
            for r in reps
            if not (r.agree or r.vacuous)
        ]

    def __eq__(self, other):
        if not isinstance(other, RunReport):
            return NotImplemented
        return (
            self.scene == other.scene
            and self.engine_version == other.engine_version
            and self.seed == other.seed
            and self.count == other.count
            and self.theorem_tolerance == other.theorem_tolerance
            and self.machinery_only == other.machinery_only
            and self.kahler_verified == other.kahler_verified
            and self.structure == other.structure
            and self.reports == other.reports
            and self.skipped == other.skipped
            and self.warnings == other.warnings
            and self.exit_code == other.exit_code
        )


# ---------------------------------------------------------------------------
# Canonical text


def _fnum(v: float | None) -> str:
    return "-" if v is None else repr(float(v))


def _pnum(raw: str) -> float | None:
    return None if raw == "-" else float(raw)


def _fpoint(point: tuple[float, ...]) -> str:
    return ",".join(repr(float(x)) for x in point)


def _ppoint(raw: str) -> tuple[float, ...]:
    return tuple(float(x) for x in raw.split(",")) if raw else ()


def to_canonical(report: RunReport) -> str:
    lines = [
        "confsub-report = 1",
        f"scene = {report.scene}",
        f"engine = {report.engine_version}",
        f"seed = {report.seed}",
        f"count = {report.count}",
        f"tol.theorem = {_fnum(report.theorem_tolerance)}",
        f"machinery_only = {int(report.machinery_only)}",
        f"kahler_verified = {'-' if report.kahler_verified is None else int(report.kahler_verified)}",
        f"exit = {report.exit_code}",
    ]
    lines.append("[structure]")
    for row in report.structure:
        dims = "-" if row.dims is None else ",".join(str(d) for d in row.dims)
        lines.append(
            _SEP.join(
                [
                    str(row.index),
                    f"point={_fpoint(row.point)}",
                    f"lambda={_fnum(row.lam)}",
                    f"dims={dims}",
                    f"conformality={_fnum(row.conformality_residual)}",
                    f"kahler={_fnum(row.kahler_residual)}",
                ]
            )
        )
    for name in report.reports:
        lines.append(f"[checker {name}]")
        for i, r in enumerate(report.reports[name]):
            assert _SEP not in r.label, "labels must not contain the field separator"
            lines.append(
                _SEP.join(
                    [
                        str(i),
                        f"point={_fpoint(r.point)}",
                        f"ra={_fnum(r.residual_a)}",
                        f"rb={_fnum(r.residual_b)}",
                        f"va={r.verdict_a}",
                        f"vb={r.verdict_b}",
                        f"agree={int(r.agree)}",
                        f"vacuous={int(r.vacuous)}",
                        f"tol={_fnum(r.tolerance)}",
                        f"label={r.label}",
                    ]
                )
            )
    lines.append("[aggregates]")
    for agg in report.aggregates():
        lines.append(
            _SEP.join(
                [
                    agg.name,
                    f"n={agg.total}",
                    f"max_ra={_fnum(agg.max_residual_a)}",
                    f"max_rb={_fnum(agg.max_residual_b)}",
                    f"agree={agg.agree_count}/{agg.total}",
                    f"vacuous={agg.vacuous_count}",
                ]
            )
        )
    lines.append("[skipped]")
    for name, reason in report.skipped:
        lines.append(f"{name}{_SEP}{reason}")
    lines.append("[warnings]")
    for w in report.warnings:
        lines.append(w)
    lines.append("[end]")
    return "\n".join(lines) + "\n"


def _take(line: str, key: str) -> str:
    prefix = f"{key}="
    if not line.startswith(prefix):
        raise ValueError(f"expected field {key!r} in {line!r}")
    return line[len(prefix):]


def from_canonical(text: str) -> RunReport:
    lines = text.splitlines()
    if not lines or lines[0] != "confsub-report = 1":
        raise ValueError("not a canonical report")
    head = {}
    i = 1
    while i < len(lines) and not lines[i].startswith("["):
        key, _, value = lines[i].partition(" = ")
        head[key] = value
        i += 1
    report = RunReport(
        scene=head["scene"],
        engine_version=head["engine"],
        seed=int(head["seed"]),
        count=int(head["count"]),
        theorem_tolerance=float(head["tol.theorem"]),
        machinery_only=bool(int(head["machinery_only"])),
        kahler_verified=None if head["kahler_verified"] == "-" else bool(int(head["kahler_verified"])),
        exit_code=int(head["exit"]),
    )
    section = None
    checker = None
    while i < len(lines):
        line = lines[i]
        i += 1
        if line.startswith("["):
            tag = line[1:-1]
            if tag.startswith("checker "):
                section = "checker"
                checker = tag[len("checker "):]
                report.reports[checker] = []
            else:
                section = tag
            continue
        if section == "structure":
            fields = line.split(_SEP)
            dims_raw = _take(fields[3], "dims")
            report.structure.append(
                StructureRow(
                    index=int(fields[0]),
                    point=_ppoint(_take(fields[1], "point")),
                    lam=float(_take(fields[2], "lambda")),
                    dims=None if dims_raw == "-" else tuple(int(x) for x in dims_raw.split(",")),
                    conformality_residual=float(_take(fields[4], "conformality")),
                    kahler_residual=_pnum(_take(fields[5], "kahler")),
                )
            )
        elif section == "checker":
            fields = line.split(_SEP)
            tol = float(_take(fields[8], "tol"))
            report.reports[checker].append(
                ConditionReport(
                    name=checker,
                    point=_ppoint(_take(fields[1], "point")),
                    residual_a=float(_take(fields[2], "ra")),
                    residual_b=_pnum(_take(fields[3], "rb")),
                    verdict_a=_take(fields[4], "va"),
                    verdict_b=_take(fields[5], "vb"),
                    agree=bool(int(_take(fields[6], "agree"))),
                    vacuous=bool(int(_take(fields[7], "vacuous"))),
                    tolerance=tol,
                    inconclusive_band=(tol, 10.0 * tol),
                    label=_take(fields[9], "label"),
                )
            )
        elif section == "skipped":
            name, _, reason = line.partition(_SEP)
            report.skipped.append((name, reason))
        elif section == "warnings":
            report.warnings.append(line)
        elif section in ("aggregates", "end"):
            continue
    return report


# ---------------------------------------------------------------------------
# Human-readable table


def render_table(report: RunReport) -> str:
    out = []
    out.append(f"scene {report.scene}  (engine {report.engine_version})")
    out.append(
        f"points {report.count}  seed {report.seed}  theorem tol {report.theorem_tolerance:g}"
    )
    if report.kahler_verified is None:
        out.append("complex structure: none (machinery-only run)")
    else:
        out.append(f"kaehler verified: {'yes' if report.kahler_verified else 'NO'}")
    out.append("")
    out.append("structure per point")
    out.append(f"{'idx':>4} {'lambda':>18} {'d1':>3} {'d2':>3} {'jd2':>4} {'mu':>3} {'conf_resid':>11} {'kahler_resid':>13}")
    for row in report.structure:
        dims = row.dims or ("-", "-", "-", "-")
        kah = "-" if row.kahler_residual is None else f"{row.kahler_residual:.2e}"
        out.append(
            f"{row.index:>4} {row.lam:>18.12f} {dims[0]:>3} {dims[1]:>3} {dims[2]:>4} {dims[3]:>3} "
            f"{row.conformality_residual:>11.2e} {kah:>13}"
        )
    out.append("")
    if report.reports:
        out.append("checkers (aggregated over points)")
        out.append(
            f"{'checker':<38} {'n':>3} {'max_resid_a':>12} {'max_resid_b':>12} {'agree':>7} {'vacuous':>7}"
        )
        for agg in report.aggregates():
            rb = "-" if agg.max_residual_b is None else f"{agg.max_residual_b:.2e}"
            out.append(
                f"{agg.name:<38} {agg.total:>3} {agg.max_residual_a:>12.2e} {rb:>12} "
                f"{agg.agree_count:>3}/{agg.total:<3} {agg.vacuous_count:>7}"
            )
    if report.skipped:
        out.append("")
        out.append("skipped checkers")
        for name, reason in report.skipped:
            out.append(f"  {name}: {reason}")
    if report.warnings:
        out.append("")
        out.append("warnings")
        for w in report.warnings:
            out.append(f"  {w}")
    out.append("")
    out.append("verdicts are sampled statements at the listed points, not global claims")
    status = {0: "ok", 3: "STRUCTURAL FAILURE", 4: "THEOREM DISAGREEMENT", 5: "hypothesis warnings"}
    out.append(f"exit {report.exit_code} ({status.get(report.exit_code, 'error')})")
    return "\n".join(out) + "\n"
