"""Certified branch-and-bound infimum and scan tables for univariate expressions.

certified_infimum maintains a certified upper bound from midpoint evaluations
(rounded up, so some evaluated point is proved <= ub) and prunes boxes whose
enclosure lower bound exceeds it; the true infimum always lies in [lb, ub].
Boxes are processed best-first (lowest lower bound) in fixed-size waves, so
the result is identical for any worker-thread count, and every pruning
decision is recorded for independent re-checking.
"""

from __future__ import annotations

import hashlib
import heapq
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .errors import MalformedCertificate
from .expr import Expr, eval_interval, eval_point, free_vars, parse, render
from .interval import Interval, Scalar, bisect, sub as interval_sub
from .prover import SCHEMA, ProverConfig, dumps

CONVERGED = "converged"
BUDGET_EXHAUSTED = "budget_exhausted"


@dataclass(frozen=True)
class BoxRecord:
    """A box together with the certified lower bound it was judged by."""

    box: Interval
    value_lo: Scalar
    precision: int


@dataclass(frozen=True)
class MinimizationResult:
    expression_text: str
    variable: str
    domain: Interval
    target_width: Scalar
    parameters: dict
    status: str  # CONVERGED | BUDGET_EXHAUSTED
    inf_lo: Scalar
    inf_hi: Scalar
    witness_point: Scalar
    witness_precision: int
    argmin_boxes: tuple[Interval, ...]
    active: tuple[BoxRecord, ...]
    pruned: tuple[BoxRecord, ...]
    leaves_processed: int

    @property
    def inf_enclosure(self) -> Interval:
        return Interval(self.inf_lo, self.inf_hi)

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED


@dataclass(frozen=True)
class ScanRow:
    u: Scalar
    value: Interval | None  # None marks a row whose evaluation hit a domain error
    error: str = ""

    @property
    def valid(self) -> bool:
        return self.value is not None


@dataclass(frozen=True)
class ScanTable:
    expression_text: str
    variable: str
    precision: int
    rows: tuple[ScanRow, ...]


def _single_variable(e: Expr) -> str:
    names = sorted(free_vars(e))
    if len(names) != 1:
        raise ValueError(f"expression must have exactly one free variable, found {names}")
    return names[0]


_WAVE = 8  # boxes expanded per wave; fixed so thread count cannot change the result


def certified_infimum(
    e: Expr,
    domain: Interval,
    target_width: Scalar,
    cfg: ProverConfig = ProverConfig(),
    threads: int = 1,
) -> MinimizationResult:
    """Enclose the infimum of e over a compact interval to the target width.

    The returned [lb, ub] satisfies lb <= inf <= ub with ub witnessed by an
    evaluated midpoint; argmin_boxes is a union of boxes containing every
    global minimizer (no uniqueness claim).  Budget exhaustion returns the
    best enclosure so far with status BUDGET_EXHAUSTED.
    """
    variable = _single_variable(e)
    precision = cfg.start_precision

    def box_lower(box: Interval) -> Scalar:
        return eval_interval(e, {variable: box}, precision).lo

    def midpoint_value_hi(box: Interval) -> Scalar:
        return eval_point(e, {variable: box.midpoint()}, precision).hi

    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        counter = 0
        heap: list[tuple[object, object, int, Interval, Scalar]] = []

        def push(box: Interval, lower: Scalar):
            nonlocal counter
            counter += 1
            heapq.heappush(heap, (lower.value, box.lo.value, counter, box, lower))

        root_lo = box_lower(domain)
        ub = midpoint_value_hi(domain)
        witness = domain.midpoint()
        push(domain, root_lo)
        pruned: list[BoxRecord] = []
        processed = 0
        status = CONVERGED

        while heap:
            lb = Scalar(heap[0][0])
            gap_hi = interval_sub(Interval.point(ub), Interval.point(lb), precision).hi
            if gap_hi.value <= target_width.value:
                break
            if processed >= cfg.leaf_budget:
                status = BUDGET_EXHAUSTED
                break

            wave = [heapq.heappop(heap) for _ in range(min(_WAVE, len(heap)))]
            tasks = []
            for _, _, _, box, lower in wave:
                processed += 1
                if lower.value > ub.value:
                    pruned.append(BoxRecord(box, lower, precision))
                    continue
                if box.is_degenerate():
                    # Point boxes cannot shrink; keep them active.
                    push(box, lower)
                    continue
                left, right = bisect(box)
                tasks.append((left, right))
            if not tasks:
                if not any(not rec[3].is_degenerate() for rec in wave if rec[4].value <= ub.value):
                    # Only degenerate unprunable boxes remain; no further progress.
                    break
                continue

            def expand(pair):
                left, right = pair
                return (
                    left, box_lower(left), midpoint_value_hi(left),
                    right, box_lower(right), midpoint_value_hi(right),
                )

            if pool is None:
                results = [expand(pair) for pair in tasks]
            else:
                results = list(pool.map(expand, tasks))

            for left, left_lo, left_mid, right, right_lo, right_mid in results:
                for child, lower, mid_hi in ((left, left_lo, left_mid), (right, right_lo, right_mid)):
                    if mid_hi.value < ub.value:
                        ub = mid_hi
                        witness = child.midpoint()
                    if lower.value > ub.value:
                        pruned.append(BoxRecord(child, lower, precision))
                    else:
                        push(child, lower)

        # Argmin polish: interval dependency widens a box enclosure by
        # O(width), so boxes wider than a few target-widths can still be
        # pruned by splitting; refine them until they prune or reach that
        # floor.  Only tightens ub and the argmin report.
        if status == CONVERGED:
            resolution = max(float(target_width.value), 1e-15)
            while processed < cfg.leaf_budget:
                wave = []
                keep = []
                while heap:
                    entry = heapq.heappop(heap)
                    _, _, _, box, lower = entry
                    if lower.value > ub.value:
                        processed += 1
                        pruned.append(BoxRecord(box, lower, precision))
                    elif not box.is_degenerate() and float(box.width(precision).value) > resolution:
                        wave.append(entry)
                        if len(wave) >= _WAVE:
                            break
                    else:
                        keep.append(entry)
                for entry in keep:
                    heapq.heappush(heap, entry)
                if not wave:
                    break
                tasks = []
                for _, _, _, box, lower in wave:
                    processed += 1
                    tasks.append(bisect(box))

                def expand(pair):
                    left, right = pair
                    return (
                        left, box_lower(left), midpoint_value_hi(left),
                        right, box_lower(right), midpoint_value_hi(right),
                    )

                if pool is None:
                    results = [expand(pair) for pair in tasks]
                else:
                    results = list(pool.map(expand, tasks))
                for left, left_lo, left_mid, right, right_lo, right_mid in results:
                    for child, lower, mid_hi in ((left, left_lo, left_mid), (right, right_lo, right_mid)):
                        if mid_hi.value < ub.value:
                            ub = mid_hi
                            witness = child.midpoint()
                        if lower.value > ub.value:
                            pruned.append(BoxRecord(child, lower, precision))
                        else:
                            push(child, lower)
    finally:
        if pool is not None:
            pool.shutdown()

    # Deterministic sequential re-pass: prune the surviving queue against the
    # final ub, then coalesce adjacent boxes into the argmin report.
    active: list[BoxRecord] = []
    for _, _, _, box, lower in sorted(heap, key=lambda item: (item[3].lo.value, item[3].hi.value)):
        record = BoxRecord(box, lower, precision)
        if lower.value > ub.value:
            pruned.append(record)
        else:
            active.append(record)
    pruned.sort(key=lambda rec: (rec.box.lo.value, rec.box.hi.value))

    if not active:
        raise AssertionError("at least one box must survive pruning (it contains the minimizer)")
    inf_lo = Scalar(min(rec.value_lo.value for rec in active))

    argmin: list[Interval] = []
    for rec in active:
        if argmin and argmin[-1].hi.value >= rec.box.lo.value:
            argmin[-1] = Interval(argmin[-1].lo, Scalar(max(argmin[-1].hi.value, rec.box.hi.value)))
        else:
            argmin.append(rec.box)

    return MinimizationResult(
        expression_text=render(e),
        variable=variable,
        domain=domain,
        target_width=target_width,
        parameters=cfg.echo(),
        status=status,
        inf_lo=inf_lo,
        inf_hi=ub,
        witness_point=witness,
        witness_precision=precision,
        argmin_boxes=tuple(argmin),
        active=tuple(active),
        pruned=tuple(pruned),
        leaves_processed=processed,
    )


def validate_minimization(result: MinimizationResult) -> bool:
    """Re-check a minimization record: witness, box bounds, pruning, and cover."""
    try:
        e = parse(result.expression_text)
    except Exception:
        return False
    if _single_variable(e) != result.variable:
        return False
    if result.inf_lo.value > result.inf_hi.value:
        return False
    # ub must be witnessed by the recorded point.
    try:
        witness_value = eval_point(e, {result.variable: result.witness_point}, result.witness_precision)
    except Exception:
        return False
    if witness_value.hi.value > result.inf_hi.value:
        return False
    if not result.domain.contains(result.witness_point):
        return False
    # Each recorded lower bound must hold, pruned boxes must exclude the
    # minimum (lower bound above ub), and lb must be the active minimum.
    for record in result.active + result.pruned:
        try:
            enclosure = eval_interval(e, {result.variable: record.box}, record.precision)
        except Exception:
            return False
        if enclosure.lo.value < record.value_lo.value:
            return False
    for record in result.pruned:
        if not record.value_lo.value > result.inf_hi.value:
            return False
    if not result.active:
        return False
    if result.inf_lo.value != min(rec.value_lo.value for rec in result.active):
        return False
    # active + pruned must partition the domain (1D chain check).
    segments = sorted(
        (rec.box.lo.to_fraction(), rec.box.hi.to_fraction())
        for rec in result.active + result.pruned
    )
    cursor = result.domain.lo.to_fraction()
    for lo, hi in segments:
        if lo != cursor:
            return False
        cursor = hi
    if cursor != result.domain.hi.to_fraction():
        return False
    # Every active box must be inside some reported argmin box.
    for rec in result.active:
        if not any(box.contains(rec.box) for box in result.argmin_boxes):
            return False
    return True


# ---------------------------------------------------------------------------
# Scan tables
# ---------------------------------------------------------------------------

def scan(e: Expr, domain: Interval, n: int, precision: int = 64, threads: int = 1) -> ScanTable:
    """Sound enclosures of e at n equally spaced points (endpoints included)."""
    if n < 2:
        raise ValueError("scan needs n >= 2")
    variable = _single_variable(e)
    from .interval import _ctx  # grid generation only; evaluation stays outward

    ctx = _ctx(precision, "nearest")
    lo, hi = domain.lo.value, domain.hi.value
    step = ctx.div(ctx.sub(hi, lo), n - 1)
    points = [Scalar(lo)]
    for i in range(1, n - 1):
        points.append(Scalar(ctx.add(lo, ctx.mul(step, i))))
    points.append(Scalar(hi))

    def evaluate(point: Scalar) -> ScanRow:
        try:
            return ScanRow(point, eval_point(e, {variable: point}, precision))
        except Exception as err:  # row-level domain errors are reported, not raised
            return ScanRow(point, None, error=str(err))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = tuple(pool.map(evaluate, points))
    else:
        rows = tuple(evaluate(point) for point in points)
    return ScanTable(render(e), variable, precision, rows)


def scan_to_csv(table: ScanTable) -> str:
    """CSV with header "u,lo,hi"; lo rounds down and hi rounds up, so each row
    remains a sound decimal enclosure.  Invalid rows render the word
    "invalid" in both value cells."""
    digits = max(2, int(table.precision * 0.30103) + 3)
    lines = ["u,lo,hi"]
    for row in table.rows:
        u = row.u.decimal(digits)
        if row.valid:
            lines.append(f"{u},{row.value.lo.decimal(digits, 'down')},{row.value.hi.decimal(digits, 'up')}")
        else:
            lines.append(f"{u},invalid,invalid")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Serialization (schema v1)
# ---------------------------------------------------------------------------

def _scalar_pair_json(s: Scalar) -> dict:
    return {"hex": s.to_hex(), "dec": s.decimal()}


def minimization_to_json(result: MinimizationResult) -> dict:
    def record_json(rec: BoxRecord) -> dict:
        return {
            "box": [rec.box.lo.to_hex(), rec.box.hi.to_hex()],
            "value_lo": rec.value_lo.to_hex(),
            "precision": rec.precision,
        }

    return {
        "schema": SCHEMA,
        "kind": "minimization_result",
        "expression": result.expression_text,
        "variable": result.variable,
        "domain": [result.domain.lo.to_hex(), result.domain.hi.to_hex()],
        "target_width": result.target_width.to_hex(),
        "parameters": result.parameters,
        "status": result.status,
        "inf_lo": _scalar_pair_json(result.inf_lo),
        "inf_hi": _scalar_pair_json(result.inf_hi),
        "witness": {"point": result.witness_point.to_hex(), "precision": result.witness_precision},
        "argmin_boxes": [[b.lo.to_hex(), b.hi.to_hex()] for b in result.argmin_boxes],
        "active": [record_json(rec) for rec in result.active],
        "pruned": [record_json(rec) for rec in result.pruned],
        "leaves_processed": result.leaves_processed,
    }


def minimization_from_json(obj: dict) -> MinimizationResult:
    try:
        if obj["schema"] != SCHEMA or obj["kind"] != "minimization_result":
            raise MalformedCertificate(f"not a schema-{SCHEMA} minimization result")

        def interval_of(pair) -> Interval:
            return Interval(Scalar.from_hex(pair[0]), Scalar.from_hex(pair[1]))

        def record_of(entry) -> BoxRecord:
            return BoxRecord(interval_of(entry["box"]), Scalar.from_hex(entry["value_lo"]), int(entry["precision"]))

        return MinimizationResult(
            expression_text=obj["expression"],
            variable=obj["variable"],
            domain=interval_of(obj["domain"]),
            target_width=Scalar.from_hex(obj["target_width"]),
            parameters=dict(obj["parameters"]),
            status=obj["status"],
            inf_lo=Scalar.from_hex(obj["inf_lo"]["hex"]),
            inf_hi=Scalar.from_hex(obj["inf_hi"]["hex"]),
            witness_point=Scalar.from_hex(obj["witness"]["point"]),
            witness_precision=int(obj["witness"]["precision"]),
            argmin_boxes=tuple(interval_of(pair) for pair in obj["argmin_boxes"]),
            active=tuple(record_of(entry) for entry in obj["active"]),
            pruned=tuple(record_of(entry) for entry in obj["pruned"]),
            leaves_processed=int(obj["leaves_processed"]),
        )
    except MalformedCertificate:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as err:
        raise MalformedCertificate(f"bad minimization structure: {err}") from None


def write_minimization(result: MinimizationResult, path) -> str:
    text = dumps(minimization_to_json(result))
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)
    return hashlib.sha256(text.encode()).hexdigest()


def read_minimization(path) -> MinimizationResult:
    try:
        with open(path, encoding="utf-8") as handle:
            obj = json.load(handle)
    except (OSError, json.JSONDecodeError) as err:
        raise MalformedCertificate(f"cannot read minimization result: {err}") from None
    return minimization_from_json(obj)
