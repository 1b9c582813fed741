"""Per-group bounds table, the closed-form gap curve for PSL(2,p), and emitters."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import sympy

from . import config
from .errors import GroupTensorError, ParameterError, ResourceError
from .ffla import check_prime
from .groups import Group, quasirandom_degree
from .matching import exact_max_matching, gowers_matching_upper, heuristic_matching
from .modrep import semisimple_summary

SCHEMA = "grouptensor/v1"
GOWERS_THRESHOLD = "|A||B||C| <= |G|^3 / D"


@dataclass(frozen=True)
class EllRow:
    ell: int | str  # a prime, or "coprime" for every characteristic not dividing |G|
    dim_semisimple: int | None
    dim_radical: int | None
    source: str  # modrep | maschke | formula | unavailable
    error: str | None = None


@dataclass(frozen=True)
class BoundsReport:
    group: str
    order: int
    D_lower: int
    matching_lower: int
    matching_lower_method: str
    matching_upper: int
    gowers_threshold: str
    per_ell: tuple[EllRow, ...]
    sr_group_lower: int
    vacuous_flags: dict[str, bool] = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"schema": SCHEMA}
        out.update(asdict(self))
        out["per_ell"] = [asdict(r) for r in self.per_ell]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "BoundsReport":
        data = dict(data)
        if data.pop("schema", SCHEMA) != SCHEMA:
            raise ParameterError("unknown report schema")
        data["per_ell"] = tuple(EllRow(**r) for r in data["per_ell"])
        return cls(**data)


def _prime_divisors(n: int) -> list[int]:
    return sorted(sympy.primefactors(n))


def _formula_row(G: Group, ell: int) -> EllRow:
    """Closed-form values used when the regular module is too large to chop."""
    fam = G.spec
    if fam.family == "psl2":
        p = fam.params[0]
        if ell == p:
            value = char_p_formula(p)
        else:
            value = char_ell_formula(p)
        return EllRow(ell, value, None, "formula")
    if fam.family == "sl2":
        p = fam.params[0]
        if ell == p:
            # the polynomial modules of degree 0..p-1 are the simples of SL(2,p) in char p
            value = p * (p + 1) * (2 * p + 1) // 6
            return EllRow(ell, value, G.order - value, "formula")
        # simples of PSL(2,p) inflate to SL(2,p), so its bound carries over
        return EllRow(ell, char_ell_formula(p), None, "formula")
    if G.is_abelian:
        # F_ell[A] / J is F_ell[A_ell'], the group algebra of the ell-regular part
        part = G.order
        while part % ell == 0:
            part //= ell
        return EllRow(ell, part, G.order - part, "formula")
    return EllRow(ell, None, None, "unavailable", "group order exceeds the modrep cap")


def bounds_report(G: Group, seed: int = 0, iters: int = 200) -> BoundsReport:
    """Matching bounds, Gowers bound and per-characteristic semisimple dimensions."""
    rows: list[EllRow] = []
    cap = config.get().modrep_max_order
    for ell in _prime_divisors(G.order):
        if G.order > cap:
            rows.append(_formula_row(G, ell))
            continue
        try:
            s = semisimple_summary(G, ell, seed)
            rows.append(EllRow(ell, s.dim_semisimple, s.dim_radical, "modrep"))
        except GroupTensorError as exc:
            rows.append(EllRow(ell, None, None, "unavailable", f"{type(exc).__name__}: {exc}"))
    rows.append(EllRow("coprime", G.order, 0, "maschke"))

    D = quasirandom_degree(G)
    method = "identity"
    lower = 1
    try:
        lower = heuristic_matching(G, seed, iters).m
        method = "heuristic"
    except GroupTensorError:
        pass
    if G.order <= config.get().exact_matching_max_order:
        lower, _ = exact_max_matching(G)
        method = "exact"
    upper = gowers_matching_upper(G.order, D)
    values = [r.dim_semisimple for r in rows]
    # a missing characteristic could hold the minimum, so only the trivial bound survives
    sr_lower = 1 if None in values else min(values)
    flags = {
        "matching_upper": upper >= G.order,
        "matching_lower": lower <= 1,
        "sr_group_lower": sr_lower <= 1,
        "formula_rows": any(r.source == "formula" for r in rows),
        "missing_rows": any(r.dim_semisimple is None for r in rows),
    }
    return BoundsReport(
        group=G.descriptor,
        order=G.order,
        D_lower=D,
        matching_lower=lower,
        matching_lower_method=method,
        matching_upper=upper,
        gowers_threshold=GOWERS_THRESHOLD,
        per_ell=tuple(rows),
        sr_group_lower=sr_lower,
        vacuous_flags=flags,
    )


# ---------------------------------------------------------------------------
# closed-form gap curve
# ---------------------------------------------------------------------------


def psl2_order(p: int) -> int:
    return (p - 1) * p * (p + 1) // 2


def char_p_formula(p: int) -> int:
    """Sum of (2i+1)^2 for i = 0..(p-1)/2: the char-p semisimple dimension of PSL(2,p)."""
    m = (p - 1) // 2
    return (m + 1) * (2 * m + 1) * (2 * m + 3) // 3


def char_ell_formula(p: int) -> int:
    """max(1, (ceil((p-5)/4) - 1) ((p-1)/2)^2 + 1), valid for every ell != p."""
    count = -((5 - p) // 4)
    return max(1, (count - 1) * ((p - 1) // 2) ** 2 + 1)


@dataclass(frozen=True)
class GapCurve:
    p: int
    order: int
    sr_lb_coprime: int
    sr_lb_char_p: int
    sr_lb_char_ell: int
    sr_lb: int
    m_ub: int
    ratio: Fraction

    def to_dict(self) -> dict:
        out = asdict(self)
        out["ratio"] = str(self.ratio)
        out["ratio_float"] = float(self.ratio)
        return out


def _check_odd_prime(p: int) -> int:
    p = check_prime(p, "p")
    if p == 2:
        raise ParameterError("p must be an odd prime")
    return p


def gap_eval(p: int) -> GapCurve:
    """Semisimple lower bound on SR(PSL(2,p)) against the Gowers matching bound, exactly."""
    p = _check_odd_prime(p)
    order = psl2_order(p)
    cp, ce = char_p_formula(p), char_ell_formula(p)
    lb = min(order, cp, ce)
    ub = gowers_matching_upper(order, max(1, (p - 1) // 2))
    return GapCurve(p, order, order, cp, ce, lb, ub, Fraction(lb, ub))


def gap_scan(p_max: int, p_min: int = 3) -> tuple[int | None, list[GapCurve]]:
    """Evaluate every odd prime in [p_min, p_max]; also return the first with ratio > 1."""
    if p_max < p_min:
        raise ParameterError("empty prime range")
    curves = [gap_eval(p) for p in sympy.primerange(max(3, p_min), p_max + 1)]
    first = next((c.p for c in curves if c.ratio > 1), None)
    return first, curves


# ---------------------------------------------------------------------------
# quasirandomness probe
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProbeRow:
    group: str
    order: int
    min_ratio: Fraction | None
    argmin_ell: int | None
    error: str | None = None

    def to_dict(self) -> dict:
        out = asdict(self)
        out["min_ratio"] = None if self.min_ratio is None else str(self.min_ratio)
        return out


def quasirandom_probe(groups: Iterable[Group], seed: int = 0) -> list[ProbeRow]:
    """min over prime divisors ell of dim k[G]/J / |G|, one row per group."""
    out = []
    for G in groups:
        best: tuple[Fraction, int] | None = None
        try:
            if G.order > config.get().modrep_max_order:
                raise ResourceError(f"order {G.order} exceeds the modrep cap")
            for ell in _prime_divisors(G.order):
                r = Fraction(semisimple_summary(G, ell, seed).dim_semisimple, G.order)
                if best is None or r < best[0]:
                    best = (r, ell)
            if best is None:
                best = (Fraction(1), None)
            out.append(ProbeRow(G.descriptor, G.order, best[0], best[1]))
        except GroupTensorError as exc:
            out.append(ProbeRow(G.descriptor, G.order, None, None, f"{type(exc).__name__}: {exc}"))
    return out


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------

CSV_FIELDS = (
    "group",
    "order",
    "ell",
    "dim_semisimple",
    "dim_radical",
    "source",
    "error",
    "D_lower",
    "matching_lower",
    "matching_upper",
    "sr_group_lower",
)


def to_json(reports: BoundsReport | Sequence[BoundsReport]) -> str:
    if isinstance(reports, BoundsReport):
        return json.dumps(reports.to_dict(), indent=2)
    return json.dumps([r.to_dict() for r in reports], indent=2)


def to_csv(reports: BoundsReport | Sequence[BoundsReport]) -> str:
    if isinstance(reports, BoundsReport):
        reports = [reports]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for rep in reports:
        for row in rep.per_ell:
            writer.writerow(
                {
                    "group": rep.group,
                    "order": rep.order,
                    "ell": row.ell,
                    "dim_semisimple": "" if row.dim_semisimple is None else row.dim_semisimple,
                    "dim_radical": "" if row.dim_radical is None else row.dim_radical,
                    "source": row.source,
                    "error": row.error or "",
                    "D_lower": rep.D_lower,
                    "matching_lower": rep.matching_lower,
                    "matching_upper": rep.matching_upper,
                    "sr_group_lower": rep.sr_group_lower,
                }
            )
    return buf.getvalue()


def emit(reports: BoundsReport | Sequence[BoundsReport], fmt: str = "json", path: str | Path | None = None) -> str:
    """Render as JSON or CSV; write to ``path`` when given. Returns the text."""
    if fmt == "json":
        text = to_json(reports) + "\n"
    elif fmt == "csv":
        text = to_csv(reports)
    else:
        raise ParameterError(f"unknown format {fmt!r}; use json or csv")
    if path is not None:
        path = Path(path)
        try:
            path.write_text(text, encoding="utf-8")
        except OSError as exc:
            raise OSError(f"cannot write report to {path}: {exc}") from exc
    return text


def load_reports(text: str) -> BoundsReport | list[BoundsReport]:
    data = json.loads(text)
    if isinstance(data, list):
        return [BoundsReport.from_dict(d) for d in data]
    return BoundsReport.from_dict(data)


def schema_path() -> Path:
    return Path(__file__).with_name("schemas") / "bounds_report.schema.json"
