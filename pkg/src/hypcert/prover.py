"""Adaptive-bisection certifier for strict inequalities on compact boxes.

verify_strict proves LHS < RHS over a 1- or 2-variable box by depth-first
bisection: a box is a proved leaf when the upper enclosure bound of the LHS
falls strictly below the lower enclosure bound of the RHS; otherwise it is
split along its widest variable, with precision doubled (up to a cap) when a
failing box has become narrow relative to the current precision, i.e. when
rounding rather than interval dependency is the plausible bottleneck.

The result is a Certificate: a leaf cover with per-leaf bound witnesses that
an independent checker re-verifies without trusting the search.  The search
is deterministic for a given configuration: box batches are drawn from the
work stack in a fixed order regardless of how many worker threads evaluate
them, and leaves are reported in ascending lexicographic box order.

Certificate files use the text-based schema "v1" with exact hexadecimal
mantissa/exponent renderings of every endpoint, so re-validation is bit-exact.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import expr as expr_mod
from .errors import MalformedCertificate
from .expr import Expr, eval_interval, free_vars, parse, render
from .interval import DEFAULT_PRECISION, Interval, Scalar, bisect

SCHEMA = "v1"

PROVED = "proved"
UNKNOWN = "unknown"
UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class Box:
    """An ordered, named product of intervals (dimension 1 or 2)."""

    items: tuple[tuple[str, Interval], ...]

    def __post_init__(self):
        if not 1 <= len(self.items) <= 2:
            raise ValueError("Box supports 1 or 2 variables")

    @classmethod
    def of(cls, *pairs) -> "Box":
        return cls(tuple((name, iv) for name, iv in pairs))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.items)

    @property
    def intervals(self) -> tuple[Interval, ...]:
        return tuple(iv for _, iv in self.items)

    def binding(self) -> dict[str, Interval]:
        return dict(self.items)

    def widest(self) -> int:
        """Index of the widest dimension (exact comparison, ties to the first)."""
        best, best_width = 0, None
        for i, (_, iv) in enumerate(self.items):
            width = iv.width(DEFAULT_PRECISION).value
            if best_width is None or width > best_width:
                best, best_width = i, width
        return best

    def max_width(self) -> Scalar:
        i = self.widest()
        return self.items[i][1].width(DEFAULT_PRECISION)

    def split(self) -> tuple["Box", "Box"]:
        i = self.widest()
        name, iv = self.items[i]
        left, right = bisect(iv)
        a = list(self.items)
        b = list(self.items)
        a[i] = (name, left)
        b[i] = (name, right)
        return Box(tuple(a)), Box(tuple(b))

    def is_splittable(self) -> bool:
        return not self.items[self.widest()][1].is_degenerate()

    def contains(self, other: "Box") -> bool:
        return self.names == other.names and all(
            mine.contains(theirs) for (_, mine), (_, theirs) in zip(self.items, other.items)
        )

    def sort_key(self):
        return tuple(x for _, iv in self.items for x in (iv.lo.value, iv.hi.value))

    def __repr__(self):
        return " x ".join(f"{name}={iv!r}" for name, iv in self.items)


@dataclass(frozen=True)
class InequalityStatement:
    """lhs < rhs over every point of the domain box (strict)."""

    lhs: Expr
    rhs: Expr
    domain: Box

    def __post_init__(self):
        unbound = (free_vars(self.lhs) | free_vars(self.rhs)) - set(self.domain.names)
        if unbound:
            raise ValueError(f"statement uses variables outside the domain box: {sorted(unbound)}")

    @classmethod
    def from_text(cls, text: str, domain: Box) -> "InequalityStatement":
        if text.count("<") != 1:
            raise ValueError("statement must contain exactly one '<'")
        lhs_text, rhs_text = text.split("<")
        return cls(parse(lhs_text), parse(rhs_text), domain)

    def text(self) -> str:
        return f"{render(self.lhs)} < {render(self.rhs)}"

    def with_domain(self, domain: Box) -> "InequalityStatement":
        return InequalityStatement(self.lhs, self.rhs, domain)


@dataclass(frozen=True)
class ProverConfig:
    start_precision: int = 64
    escalation_factor: int = 2
    max_precision: int = 512
    max_depth: int = 60
    leaf_budget: int = 10**6
    split_policy: str = "widest-midpoint"
    batch_size: int = 32  # boxes evaluated per wave; fixed so thread count cannot matter

    def __post_init__(self):
        if self.start_precision <= 0 or self.max_precision < self.start_precision:
            raise ValueError("invalid precision bounds")
        if self.escalation_factor < 2:
            raise ValueError("escalation factor must be >= 2")
        if self.max_depth < 1 or self.leaf_budget < 1 or self.batch_size < 1:
            raise ValueError("depth, budget and batch size must be positive")
        if self.split_policy != "widest-midpoint":
            raise ValueError(f"unsupported split policy {self.split_policy!r}")

    def echo(self) -> dict:
        return {
            "start_precision": self.start_precision,
            "escalation_factor": self.escalation_factor,
            "max_precision": self.max_precision,
            "max_depth": self.max_depth,
            "leaf_budget": self.leaf_budget,
            "split_policy": self.split_policy,
            "batch_size": self.batch_size,
        }


@dataclass(frozen=True)
class Leaf:
    box: Box
    lhs_upper: Scalar
    rhs_lower: Scalar
    depth: int
    precision: int


@dataclass(frozen=True)
class TailReduction:
    """A one-point hypothesis check that licenses the statement on a subdomain.

    The hypothesis is a closed-form margin expression (no free variables);
    checking that its enclosure is strictly positive at the recorded precision
    discharges the covered subdomain through the listed axioms.
    """

    name: str
    hypothesis_text: str  # margin expression; the claim is: enclosure.lo > 0
    precision: int
    margin: Interval
    covers_lo: Scalar
    covers_hi: Scalar | None  # None means unbounded above
    covers_lo_open: bool
    axiom_ids: tuple[str, ...]
    conclusion: str
    status: str  # PROVED | UNKNOWN

    def covers_text(self) -> str:
        left = "(" if self.covers_lo_open else "["
        hi = "inf)" if self.covers_hi is None else f"{self.covers_hi.decimal()}]"
        return f"{left}{self.covers_lo.decimal()}, {hi}"


@dataclass(frozen=True)
class Certificate:
    statement_text: str
    statement_hash: str
    domain: Box  # the compact core covered by the leaves
    parameters: dict
    status: str  # PROVED | UNDETERMINED
    leaves: tuple[Leaf, ...]
    frontier: tuple[Box, ...] = ()
    tail_reductions: tuple[TailReduction, ...] = ()
    axioms: tuple[tuple[str, str], ...] = ()  # (id, statement) pairs referenced by tails
    claim: str = ""

    @property
    def proved(self) -> bool:
        return self.status == PROVED


def statement_hash(text: str, domain: Box) -> str:
    dom = ";".join(f"{name}={iv.lo.to_hex()}..{iv.hi.to_hex()}" for name, iv in domain.items)
    digest = hashlib.sha256(f"{text}\n{dom}".encode()).hexdigest()
    return f"sha256:{digest}"


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------

def check_box(stmt: InequalityStatement, box: Box, precision: int = DEFAULT_PRECISION):
    """One node of the bisection tree: never a false Proved.

    Returns (status, lhs_upper, rhs_lower) where status is PROVED iff the
    enclosures separate strictly on this box.
    """
    binding = box.binding()
    lhs = eval_interval(stmt.lhs, binding, precision)
    rhs = eval_interval(stmt.rhs, binding, precision)
    status = PROVED if lhs.hi.value < rhs.lo.value else UNKNOWN
    return status, lhs.hi, rhs.lo


def _stalled(box: Box, precision: int) -> bool:
    # Rounding (not dependency) is the plausible bottleneck once the box has
    # shrunk below ~2^(-precision/2); splitting further is then unlikely to
    # beat doubling the precision.
    return float(box.max_width().value) < 2.0 ** (-precision / 2)


def verify_strict(stmt: InequalityStatement, cfg: ProverConfig = ProverConfig(), threads: int = 1) -> Certificate:
    """Adaptive bisection over the statement's compact domain.

    Returns a Proved certificate with a full leaf cover, or an Undetermined
    one listing the unresolved frontier after budget/depth/precision
    exhaustion.  Strictness at boundary equality points is out of scope:
    domains must be bounded away from tightness (tail reductions handle the
    rest).
    """
    stack: list[tuple[Box, int, int]] = [(stmt.domain, 0, cfg.start_precision)]
    leaves: list[Leaf] = []
    frontier: list[Box] = []
    processed = 0
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        while stack:
            batch = [stack.pop() for _ in range(min(cfg.batch_size, len(stack)))]
            if pool is None:
                results = [check_box(stmt, box, precision) for box, _, precision in batch]
            else:
                results = list(pool.map(lambda item: check_box(stmt, item[0], item[2]), batch))
            for (box, depth, precision), (status, lhs_hi, rhs_lo) in zip(batch, results):
                processed += 1
                if status == PROVED:
                    leaves.append(Leaf(box, lhs_hi, rhs_lo, depth, precision))
                elif _stalled(box, precision) and precision < cfg.max_precision:
                    stack.append((box, depth, min(precision * cfg.escalation_factor, cfg.max_precision)))
                elif depth < cfg.max_depth and box.is_splittable():
                    left, right = box.split()
                    stack.append((right, depth + 1, precision))
                    stack.append((left, depth + 1, precision))
                else:
                    frontier.append(box)
            if processed >= cfg.leaf_budget:
                frontier.extend(box for box, _, _ in stack)
                stack.clear()
    finally:
        if pool is not None:
            pool.shutdown()

    leaves.sort(key=lambda leaf: leaf.box.sort_key())
    frontier.sort(key=lambda box: box.sort_key())
    text = stmt.text()
    return Certificate(
        statement_text=text,
        statement_hash=statement_hash(text, stmt.domain),
        domain=stmt.domain,
        parameters=cfg.echo(),
        status=PROVED if not frontier else UNDETERMINED,
        leaves=tuple(leaves),
        frontier=tuple(frontier),
    )


# ---------------------------------------------------------------------------
# Validation (independent of the search heuristics)
# ---------------------------------------------------------------------------

def _fraction_box(box: Box) -> tuple[tuple[Fraction, Fraction], ...]:
    return tuple((iv.lo.to_fraction(), iv.hi.to_fraction()) for iv in box.intervals)


def _check_partition(domain: Box, boxes: list[Box]) -> bool:
    """Exact check that the boxes partition the domain (union equal, interiors disjoint)."""
    if any(b.names != domain.names for b in boxes):
        return False
    dom = _fraction_box(domain)
    rects = [_fraction_box(b) for b in boxes]
    for rect in rects:
        if any(lo > hi for lo, hi in rect):
            return False
        if any(lo < dlo or hi > dhi for (lo, hi), (dlo, dhi) in zip(rect, dom)):
            return False
    # Dimensions where the domain is a point carry no measure: every box must
    # match them exactly; drop them and check the remainder.
    keep = [i for i, (dlo, dhi) in enumerate(dom) if dlo != dhi]
    for rect in rects:
        for i, (dlo, dhi) in enumerate(dom):
            if i not in keep and (rect[i][0] != dlo or rect[i][1] != dhi):
                return False
    if not keep:
        return bool(rects)
    dom = tuple(dom[i] for i in keep)
    rects = [tuple(rect[i] for i in keep) for rect in rects]

    if len(dom) == 1:
        segments = sorted(rect[0] for rect in rects)
        (dlo, dhi) = dom[0]
        cursor = dlo
        for lo, hi in segments:
            if lo != cursor:
                return False
            cursor = hi
        return cursor == dhi

    # 2D: total area + containment + pairwise interior disjointness (sweep).
    area = sum((hi - lo) * (yhi - ylo) for (lo, hi), (ylo, yhi) in rects)
    dom_area = (dom[0][1] - dom[0][0]) * (dom[1][1] - dom[1][0])
    if area != dom_area:
        return False
    boxes2 = sorted(rects)
    active: list[tuple[Fraction, Fraction, Fraction]] = []  # (x_hi, y_lo, y_hi)
    for (xlo, xhi), (ylo, yhi) in boxes2:
        if xlo == xhi or ylo == yhi:
            continue  # no interior
        active = [entry for entry in active if entry[0] > xlo]
        for _, aylo, ayhi in active:
            if not (yhi <= aylo or ayhi <= ylo):
                return False
        active.append((xhi, ylo, yhi))
    return True


def validate_tail(tail: TailReduction, known_axioms: set[str]) -> bool:
    """Re-check one tail hypothesis at its recorded precision."""
    if tail.status != PROVED:
        return False
    if not set(tail.axiom_ids) <= known_axioms:
        return False
    try:
        margin_expr = parse(tail.hypothesis_text)
        if free_vars(margin_expr):
            return False
        margin = eval_interval(margin_expr, {}, tail.precision)
    except Exception:
        return False
    if not margin.lo.value > 0:
        return False
    if not tail.margin.lo.value > 0:
        return False
    return True


def certificate_validate(cert: Certificate, stmt: InequalityStatement) -> bool:
    """Independently re-verify a certificate against a statement.

    Re-evaluates every leaf at its recorded precision, re-checks the
    partition property and any tail-reduction hypotheses.  Shares no code
    path with verify_strict's search heuristics.
    """
    if cert.statement_text != stmt.text():
        return False
    if cert.statement_hash != statement_hash(cert.statement_text, cert.domain):
        return False
    if cert.status == PROVED and cert.frontier:
        return False
    if cert.domain.names != stmt.domain.names:
        return False

    for leaf in cert.leaves:
        if leaf.lhs_upper.value >= leaf.rhs_lower.value:
            return False
        binding = leaf.box.binding()
        try:
            lhs = eval_interval(stmt.lhs, binding, leaf.precision)
            rhs = eval_interval(stmt.rhs, binding, leaf.precision)
        except Exception:
            return False
        if lhs.hi.value > leaf.lhs_upper.value:
            return False
        if rhs.lo.value < leaf.rhs_lower.value:
            return False

    cover = [leaf.box for leaf in cert.leaves] + list(cert.frontier)
    if not _check_partition(cert.domain, cover):
        return False

    known = {axiom_id for axiom_id, _ in cert.axioms}
    for tail in cert.tail_reductions:
        if cert.status == PROVED and not validate_tail(tail, known):
            return False
    if cert.tail_reductions and cert.status == PROVED:
        # Seams: the near-zero tail must reach the compact core's lower edge
        # and the infinity tail must start at or below its upper edge.
        _, core = cert.domain.items[0]
        for tail in cert.tail_reductions:
            if tail.covers_hi is not None and tail.covers_lo.value <= core.lo.value:
                if tail.covers_hi.value < core.lo.value:
                    return False
            if tail.covers_hi is None and tail.covers_lo.value > core.hi.value:
                return False
    return True


# ---------------------------------------------------------------------------
# Serialization (schema v1)
# ---------------------------------------------------------------------------

def _interval_json(iv: Interval) -> dict:
    return {
        "lo": iv.lo.to_hex(),
        "hi": iv.hi.to_hex(),
        "lo_dec": iv.lo.decimal(direction="down"),
        "hi_dec": iv.hi.decimal(direction="up"),
    }


def _interval_from_json(obj: dict) -> Interval:
    return Interval(Scalar.from_hex(obj["lo"]), Scalar.from_hex(obj["hi"]))


def _box_json(box: Box) -> list:
    return [[name, _interval_json(iv)] for name, iv in box.items]


def _box_from_json(obj) -> Box:
    return Box(tuple((name, _interval_from_json(iv)) for name, iv in obj))


def _box_values_json(box: Box) -> list:
    # Leaf/frontier boxes reuse the statement's variable order: values only.
    return [[iv.lo.to_hex(), iv.hi.to_hex()] for iv in box.intervals]


def _box_values_from_json(obj, names: tuple[str, ...]) -> Box:
    if len(obj) != len(names):
        raise MalformedCertificate("box arity does not match the statement domain")
    return Box(tuple(
        (name, Interval(Scalar.from_hex(lo), Scalar.from_hex(hi)))
        for name, (lo, hi) in zip(names, obj)
    ))


def _tail_json(tail: TailReduction) -> dict:
    return {
        "name": tail.name,
        "hypothesis": tail.hypothesis_text,
        "precision": tail.precision,
        "margin": _interval_json(tail.margin),
        "covers_lo": tail.covers_lo.to_hex(),
        "covers_hi": None if tail.covers_hi is None else tail.covers_hi.to_hex(),
        "covers_lo_open": tail.covers_lo_open,
        "covers": tail.covers_text(),
        "axioms": list(tail.axiom_ids),
        "conclusion": tail.conclusion,
        "status": tail.status,
    }


def _tail_from_json(obj: dict) -> TailReduction:
    return TailReduction(
        name=obj["name"],
        hypothesis_text=obj["hypothesis"],
        precision=int(obj["precision"]),
        margin=_interval_from_json(obj["margin"]),
        covers_lo=Scalar.from_hex(obj["covers_lo"]),
        covers_hi=None if obj["covers_hi"] is None else Scalar.from_hex(obj["covers_hi"]),
        covers_lo_open=bool(obj["covers_lo_open"]),
        axiom_ids=tuple(obj["axioms"]),
        conclusion=obj["conclusion"],
        status=obj["status"],
    )


def certificate_to_json(cert: Certificate) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "inequality_certificate",
        "statement": {
            "text": cert.statement_text,
            "hash": cert.statement_hash,
            "domain": _box_json(cert.domain),
        },
        "claim": cert.claim,
        "parameters": cert.parameters,
        "status": cert.status,
        "leaves": [
            {
                "box": _box_values_json(leaf.box),
                "lhs_upper": leaf.lhs_upper.to_hex(),
                "rhs_lower": leaf.rhs_lower.to_hex(),
                "depth": leaf.depth,
                "precision": leaf.precision,
            }
            for leaf in cert.leaves
        ],
        "frontier": [_box_values_json(box) for box in cert.frontier],
        "tail_reductions": [_tail_json(tail) for tail in cert.tail_reductions],
        "axioms": [{"id": axiom_id, "statement": text} for axiom_id, text in cert.axioms],
    }


def certificate_from_json(obj: dict) -> Certificate:
    try:
        if obj["schema"] != SCHEMA or obj["kind"] != "inequality_certificate":
            raise MalformedCertificate(f"not a schema-{SCHEMA} inequality certificate")
        domain = _box_from_json(obj["statement"]["domain"])
        names = domain.names
        leaves = tuple(
            Leaf(
                box=_box_values_from_json(entry["box"], names),
                lhs_upper=Scalar.from_hex(entry["lhs_upper"]),
                rhs_lower=Scalar.from_hex(entry["rhs_lower"]),
                depth=int(entry["depth"]),
                precision=int(entry["precision"]),
            )
            for entry in obj["leaves"]
        )
        return Certificate(
            statement_text=obj["statement"]["text"],
            statement_hash=obj["statement"]["hash"],
            domain=domain,
            parameters=dict(obj["parameters"]),
            status=obj["status"],
            leaves=leaves,
            frontier=tuple(_box_values_from_json(entry, names) for entry in obj["frontier"]),
            tail_reductions=tuple(_tail_from_json(entry) for entry in obj.get("tail_reductions", [])),
            axioms=tuple((entry["id"], entry["statement"]) for entry in obj.get("axioms", [])),
            claim=obj.get("claim", ""),
        )
    except MalformedCertificate:
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as err:
        raise MalformedCertificate(f"bad certificate structure: {err}") from None


def dumps(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def write_certificate(cert: Certificate, path) -> str:
    text = dumps(certificate_to_json(cert))
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)
    return hashlib.sha256(text.encode()).hexdigest()


def read_certificate(path) -> Certificate:
    try:
        with open(path, encoding="utf-8") as handle:
            obj = json.load(handle)
    except (OSError, json.JSONDecodeError) as err:
        raise MalformedCertificate(f"cannot read certificate: {err}") from None
    return certificate_from_json(obj)


def statement_for_certificate(cert: Certificate) -> InequalityStatement:
    """Reconstruct the statement a certificate claims to prove (for re-validation)."""
    return InequalityStatement.from_text(cert.statement_text, cert.domain)
