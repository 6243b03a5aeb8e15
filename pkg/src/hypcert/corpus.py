"""Built-in corpus: the sharp hyperbolic inequalities, their tail reductions,
and the axiom ledger.

Each corpus item packages one statement with its domain and verification
plan: certify-compact (bisection certificate on a compact box), property-test
(certified separation of point enclosures at escalating precision on seeded
samples), or composite (compact certificate plus analytic tail reductions).

The two tight endpoints of the main inequality are closed by tail reductions:
each collapses an unbounded subdomain to a single interval check of a
closed-form margin expression, justified by the axioms listed on the record.
Every axiom in the ledger carries a one-line proof and its own property test.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from fractions import Fraction

from gmpy2 import mpq

from .errors import MalformedCertificate
from .expr import eval_interval, eval_point, parse, render, substitute
from .interval import DEFAULT_PRECISION, Interval, Scalar, sub as interval_sub, div as interval_div
from .minimize import (
    MinimizationResult,
    certified_infimum,
    minimization_from_json,
    minimization_to_json,
    validate_minimization,
)
from .prover import (
    PROVED,
    SCHEMA,
    UNDETERMINED,
    UNKNOWN,
    Box,
    Certificate,
    InequalityStatement,
    ProverConfig,
    TailReduction,
    certificate_validate,
    dumps,
    statement_hash,
    validate_tail,
    verify_strict,
)

# The ratio under study: LHS/RHS of the main inequality.  Below its value is
# 1 at u = 0, dips to a certified minimum near u ~ 0.82, and returns to 1 as
# u grows.
F_TEXT = "cosh(tanh(u)*arcosh(2*cosh(u)))/exp(u*tanh(u))"

T3_TEXT = "cosh(tanh(u)*arcosh(2*cosh(u))) < exp(u*tanh(u))"
T1_TEXT = "cosh(sqrt(1-1/t^2)*arcosh(2*t)) < exp(sqrt(1-1/t^2)*arcosh(t))"
T2_TEXT = "cosh(c*arcosh(2/sqrt(1-c^2))) < exp(c*artanh(c))"
L1_TEXT = "tanh(x)*tanh(y) < tanh(x*tanh(y))"
L2_TEXT = "cosh(K*arcosh(x))*K*sqrt(x^2-1) < sinh(K*arcosh(x))*x"
PS_TEXT = "cosh(sqrt(1-1/t^2)*arcosh(2*t))-cosh(sqrt(1-1/t^2)*arcosh(t)) < sinh(sqrt(1-1/t^2)*arcosh(t))"
CH_STEP_TEXT = "2*sinh(u) < sqrt(4*cosh(u)^2-1)"
CH_TEXT = "ln(2)+u < arcosh(2*cosh(u))"
S3A_LOWER_TEXT = "exp((tanh(u)-1)*ln(2))*exp(u*tanh(u)) < cosh(tanh(u)*arcosh(2*cosh(u)))"
TWO_POWER_TEXT = "exp((tanh(u)-1)*ln(2))"  # 2^(tanh u - 1) in the minimal vocabulary

INF_THRESHOLD = "0.972"
_THRESHOLD_FRACTION = Fraction(972, 1000)


# ---------------------------------------------------------------------------
# Axiom ledger
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MarginSpec:
    """Sampled positivity check: margin expression > 0 (or >= 0 boundary cases
    are avoided by sampling open ranges)."""

    margin_text: str
    variables: tuple[tuple[str, str, str], ...]  # (name, lo, hi) decimal bounds
    ordered: bool = False  # when 2 variables: force first < second


@dataclass(frozen=True)
class Axiom:
    id: str
    statement: str
    proof: str
    test: MarginSpec


AXIOMS: dict[str, Axiom] = {
    axiom.id: axiom
    for axiom in (
        Axiom(
            "cosh_le_exp_halfsq",
            "cosh(z) <= exp(z^2/2) for all real z",
            "coefficientwise: z^(2k)/(2k)! <= z^(2k)/(2^k k!) since (2k)! >= 2^k k!",
            MarginSpec("exp(z^2/2)-cosh(z)", (("z", "-30", "30"),)),
        ),
        Axiom(
            "tanh_below_identity",
            "tanh(u) < u for u > 0",
            "tanh(0) = 0 and tanh'(u) = sech(u)^2 < 1 for u != 0",
            MarginSpec("u-tanh(u)", (("u", "0", "30"),)),
        ),
        Axiom(
            "sinh_above_identity",
            "sinh(u) > u for u > 0",
            "sinh(0) = 0 and sinh'(u) = cosh(u) > 1 for u != 0",
            MarginSpec("sinh(u)-u", (("u", "0", "30"),)),
        ),
        Axiom(
            "log1p_below_identity",
            "ln(1+y) <= y for y >= 0",
            "ln is concave; y is its tangent line at 1",
            MarginSpec("y-ln(1+y)", (("y", "0", "50"),)),
        ),
        Axiom(
            "arcosh_tangent_line_at_2",
            "arcosh(x) <= arcosh(2) + (x-2)/sqrt(3) for x >= 1",
            "arcosh is concave on [1, inf) and its tangent at 2 has slope 1/sqrt(3)",
            MarginSpec("arcosh(2)+(x-2)/sqrt(3)-arcosh(x)", (("x", "1", "50"),)),
        ),
        Axiom(
            "xe2x_decreasing",
            "u*exp(-2u) is decreasing for u >= 1/2",
            "derivative exp(-2u)(1-2u) <= 0 for u >= 1/2",
            MarginSpec("a*exp(-2*a)-b*exp(-2*b)", (("a", "0.5", "30"), ("b", "0.5", "30")), ordered=True),
        ),
        Axiom(
            "one_minus_tanh_lower",
            "1 - tanh(u) >= 2*exp(-2u)*(1 - exp(-2u)) for u >= 0",
            "with y = exp(-2u): 2y/(1+y) - 2y(1-y) = 2y^3/(1+y) >= 0",
            MarginSpec("1-tanh(u)-2*exp(-2*u)*(1-exp(-2*u))", (("u", "0", "20"),)),
        ),
        Axiom(
            "tanh_lower_exp",
            "tanh(u) >= 1 - 2*exp(-2u) for u >= 0",
            "1 - tanh(u) = 2y/(1+y) <= 2y with y = exp(-2u)",
            MarginSpec("tanh(u)-(1-2*exp(-2*u))", (("u", "0", "20"),)),
        ),
        Axiom(
            "arcosh_2cosh_upper",
            "arcosh(2*cosh(u)) <= u + ln(2) + exp(-2u) for u >= 0",
            "arcosh(2 cosh u) <= ln(4 cosh u) = u + ln 2 + ln(1+exp(-2u)) and ln(1+y) <= y",
            MarginSpec("u+ln(2)+exp(-2*u)-arcosh(2*cosh(u))", (("u", "0", "30"),)),
        ),
        Axiom(
            "arcosh_2cosh_lower",
            "arcosh(2*cosh(u)) > u + ln(2) for u > 0",
            "sqrt(4 cosh(u)^2 - 1) > 2 sinh(u) since 4 cosh^2 - 4 sinh^2 = 4 > 1",
            MarginSpec("arcosh(2*cosh(u))-(u+ln(2))", (("u", "0", "30"),)),
        ),
        Axiom(
            "exp_ge_affine",
            "exp(x) >= 1 + x for all real x",
            "exp is convex; 1 + x is its tangent line at 0",
            MarginSpec("exp(x)-1-x", (("x", "-30", "30"),)),
        ),
        Axiom(
            "tanh_increasing",
            "tanh is strictly increasing",
            "tanh'(u) = sech(u)^2 > 0",
            MarginSpec("tanh(b)-tanh(a)", (("a", "-20", "20"), ("b", "-20", "20")), ordered=True),
        ),
        Axiom(
            "cosh_increasing_nonneg",
            "cosh is strictly increasing on [0, inf)",
            "cosh'(u) = sinh(u) > 0 for u > 0",
            MarginSpec("cosh(b)-cosh(a)", (("a", "0", "30"), ("b", "0", "30")), ordered=True),
        ),
        Axiom(
            "cosh_ge_one",
            "cosh(x) >= 1 for all real x",
            "cosh(x) - 1 = 2*sinh(x/2)^2 >= 0",
            MarginSpec("cosh(x)-1", (("x", "-30", "30"),)),
        ),
        Axiom(
            "cosh_above_half_exp",
            "cosh(z) > exp(z)/2 for all real z",
            "cosh(z) = (exp(z) + exp(-z))/2 and exp(-z) > 0",
            MarginSpec("cosh(z)-exp(z)/2", (("z", "-30", "30"),)),
        ),
    )
}


def _axiom_pairs(ids) -> tuple[tuple[str, str], ...]:
    return tuple((axiom_id, AXIOMS[axiom_id].statement) for axiom_id in ids)


def _dyadic_sample(rng: random.Random, lo: str, hi: str) -> Scalar:
    # k/2^48 with k >= 1 keeps samples strictly inside the open left end and
    # exactly representable, so point evaluations start from exact inputs.
    k = rng.getrandbits(48) | 1
    lo_q, hi_q = mpq(lo), mpq(hi)
    value = lo_q + (hi_q - lo_q) * mpq(k, 1 << 48)
    num, den = value.numerator, value.denominator
    bits = max(int(num).bit_length(), 64)
    from gmpy2 import mpfr, context, RoundToNearest

    ctx = context(precision=bits + 8, round=RoundToNearest)
    return Scalar(ctx.div(ctx.add(num, mpfr(0)), ctx.add(den, mpfr(0))))


def check_axiom(axiom: Axiom, n: int = 1000, seed: int = 0, start_precision: int = 64, max_precision: int = 512):
    """Certified positivity of the axiom's margin at n seeded sample points.

    Returns (failures, samples_checked); failures lists (point, reason).
    """
    rng = random.Random(f"{seed}:{axiom.id}")
    margin = parse(axiom.test.margin_text)
    failures = []
    for _ in range(n):
        values = [_dyadic_sample(rng, lo, hi) for _, lo, hi in axiom.test.variables]
        if axiom.test.ordered and len(values) == 2 and not values[0].value < values[1].value:
            values = [min(values), max(values)]
            if values[0].value == values[1].value:
                continue
        binding = {name: values[i] for i, (name, _, _) in enumerate(axiom.test.variables)}
        precision = start_precision
        while True:
            enclosure = eval_point(margin, binding, precision)
            if enclosure.lo.value > 0:
                break
            if precision >= max_precision:
                failures.append((binding, f"margin enclosure {enclosure!r} not positive at {precision} bits"))
                break
            precision *= 2
    return failures, n


# ---------------------------------------------------------------------------
# Certified separation of point enclosures (property-test machinery)
# ---------------------------------------------------------------------------

def certified_strictly_less(lhs, rhs, points: dict, start_precision: int = 64, max_precision: int = 512) -> bool:
    """True iff the enclosures separate (lhs_hi < rhs_lo) at some precision."""
    precision = start_precision
    while True:
        left = eval_point(lhs, points, precision)
        right = eval_point(rhs, points, precision)
        if left.hi.value < right.lo.value:
            return True
        if precision >= max_precision:
            return False
        precision *= 2


# ---------------------------------------------------------------------------
# Tail reductions for the main inequality
# ---------------------------------------------------------------------------

_NEAR_ZERO_AXIOMS = (
    "cosh_le_exp_halfsq",
    "arcosh_tangent_line_at_2",
    "tanh_below_identity",
    "cosh_increasing_nonneg",
)

_INFINITY_AXIOMS = (
    "arcosh_2cosh_upper",
    "arcosh_2cosh_lower",
    "log1p_below_identity",
    "one_minus_tanh_lower",
    "tanh_lower_exp",
    "xe2x_decreasing",
    "tanh_increasing",
    "exp_ge_affine",
)


def _require_decimal(value, name: str) -> str:
    if isinstance(value, str):
        return value
    raise TypeError(f"{name} must be a decimal literal string, got {value!r}")


def verify_near_zero_reduction(delta: str = "0.3", precision: int = DEFAULT_PRECISION) -> TailReduction:
    """One-point check licensing the main inequality on (0, delta].

    Chain: with A(u) = arcosh(2) + 2(cosh(u)-1)/sqrt(3), concavity of arcosh
    gives arcosh(2 cosh u) <= A(u); cosh(z) <= exp(z^2/2) turns the LHS into
    exp(tanh(u)^2 A(u)^2 / 2); tanh(u) < u and A increasing make that less
    than exp(u tanh(u)) as soon as A(delta)^2 < 2, which is exactly the
    hypothesis interval check.
    """
    delta = _require_decimal(delta, "delta")
    q = mpq(delta)
    if not 0 < q <= mpq(2, 5):
        raise ValueError("near-zero reduction requires 0 < delta <= 0.4")
    hypothesis = f"2-(arcosh(2)+2*(cosh({delta})-1)/sqrt(3))^2"
    margin = eval_interval(parse(hypothesis), {}, precision)
    proved = margin.lo.value > 0
    return TailReduction(
        name="near-zero",
        hypothesis_text=hypothesis,
        precision=precision,
        margin=margin,
        covers_lo=Scalar.from_int(0, precision),
        covers_hi=Scalar.from_decimal(delta, precision, "up"),
        covers_lo_open=True,
        axiom_ids=_NEAR_ZERO_AXIOMS,
        conclusion=(
            f"{T3_TEXT} holds for all u in (0, {delta}]: with A(u) = arcosh(2)+2*(cosh(u)-1)/sqrt(3), "
            "LHS <= exp(tanh(u)^2*A(u)^2/2) < exp(u*tanh(u)) whenever A(delta)^2 < 2"
        ),
        status=PROVED if proved else UNKNOWN,
    )


def verify_infinity_reduction(u0: str = "3", precision: int = DEFAULT_PRECISION) -> TailReduction:
    """One-point check licensing the main inequality on [u0, inf).

    Chain: with T = tanh(u), z0 = T(u+ln 2) and z1 = T(u+ln 2+exp(-2u)),
    the argument of the LHS lies in (z0, z1], so
    LHS <= exp(z1)(1+exp(-2 z0))/2; comparing with exp(uT) reduces to
    (1-T) ln 2 - T exp(-2u) >= exp(-2 z0), and bounding each side per u >= u0
    (1-T >= 2 exp(-2u)(1-exp(-2u)); T >= 1-2 exp(-2u); u exp(-2u) decreasing;
    tanh increasing) leaves exactly the hypothesis interval check.
    """
    u0 = _require_decimal(u0, "u0")
    q = mpq(u0)
    if not q >= 1:
        raise ValueError("infinity reduction requires u0 >= 1")
    hypothesis = (
        f"2*ln(2)*(1-exp(-2*{u0}))"
        f"-(1+exp(-2*tanh({u0})*ln(2))*exp(4*{u0}*exp(-2*{u0})))"
    )
    margin = eval_interval(parse(hypothesis), {}, precision)
    proved = margin.lo.value > 0
    return TailReduction(
        name="infinity",
        hypothesis_text=hypothesis,
        precision=precision,
        margin=margin,
        covers_lo=Scalar.from_decimal(u0, precision, "down"),
        covers_hi=None,
        covers_lo_open=False,
        axiom_ids=_INFINITY_AXIOMS,
        conclusion=(
            f"{T3_TEXT} holds for all u >= {u0}: "
            "2*ln(2)*(1-exp(-2*u0)) > 1 + 2^(-2*tanh(u0))*exp(4*u0*exp(-2*u0)) "
            "bounds the separation uniformly on the tail"
        ),
        status=PROVED if proved else UNKNOWN,
    )


def t3_statement(lo: str = "0.3", hi: str = "3") -> InequalityStatement:
    return InequalityStatement.from_text(
        T3_TEXT, Box.of(("u", Interval.from_decimal(lo, hi)))
    )


def verify_three_full_line(cfg: ProverConfig = ProverConfig(), threads: int = 1) -> Certificate:
    """Full-line composite for the main inequality (all u > 0).

    Composes the near-zero reduction at delta = 0.3, a bisection certificate
    on [0.3, 3], and the infinity reduction at u0 = 3; Proved only when all
    three components prove.
    """
    near = verify_near_zero_reduction("0.3", cfg.start_precision)
    compact = verify_strict(t3_statement("0.3", "3"), cfg, threads)
    far = verify_infinity_reduction("3", cfg.start_precision)
    proved = near.status == PROVED and compact.proved and far.status == PROVED
    axiom_ids = sorted(set(near.axiom_ids) | set(far.axiom_ids))
    return Certificate(
        statement_text=compact.statement_text,
        statement_hash=compact.statement_hash,
        domain=compact.domain,
        parameters=compact.parameters,
        status=PROVED if proved else UNDETERMINED,
        leaves=compact.leaves,
        frontier=compact.frontier,
        tail_reductions=(near, far),
        axioms=_axiom_pairs(axiom_ids),
        claim=f"{T3_TEXT} for all u > 0",
    )


# ---------------------------------------------------------------------------
# Full-line infimum claim
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PointCheck:
    """Positivity of a margin expression at one bound point."""

    name: str
    margin_text: str
    variable: str
    point: Scalar
    precision: int
    margin: Interval
    status: str


@dataclass(frozen=True)
class InfimumClaim:
    """Composite record certifying: ratio > threshold for all u >= 0."""

    threshold_text: str
    near_zero: TailReduction
    minimization: MinimizationResult
    infinity: TailReduction
    endpoint: PointCheck
    axioms: tuple[tuple[str, str], ...]
    status: str

    @property
    def proved(self) -> bool:
        return self.status == PROVED

    def claim_text(self) -> str:
        return f"{F_TEXT} > {self.threshold_text} for all u >= 0"


_INF_NEAR_ZERO_AXIOMS = ("cosh_ge_one", "tanh_below_identity")
_INF_INFINITY_AXIOMS = ("arcosh_2cosh_lower", "cosh_above_half_exp", "tanh_increasing")


def _point_check(name: str, margin_text: str, variable: str, point: Scalar, precision: int) -> PointCheck:
    margin = eval_point(parse(margin_text), {variable: point}, precision)
    return PointCheck(
        name=name,
        margin_text=margin_text,
        variable=variable,
        point=point,
        precision=precision,
        margin=margin,
        status=PROVED if margin.lo.value > 0 else UNKNOWN,
    )


def infimum_claim_full_line(
    cfg: ProverConfig = ProverConfig(),
    threads: int = 1,
    target_width: str = "1e-4",
) -> InfimumClaim:
    """Certify ratio > 0.972 on [0, inf).

    (i) on (0, 0.15] the ratio is at least exp(-u*tanh(u)) >= exp(-0.15^2)
    (cosh >= 1 and tanh u < u), checked above threshold at one point;
    (ii) certified branch-and-bound infimum on [0.15, 3] with lower bound
    above threshold; (iii) on [3, inf) the ratio exceeds 2^(tanh u - 1) >=
    2^(tanh 3 - 1), again one point check; plus the exact endpoint value 1
    at u = 0.
    """
    precision = cfg.start_precision
    threshold = INF_THRESHOLD

    near_hyp = f"exp(-(0.15^2))-{threshold}"
    near_margin = eval_interval(parse(near_hyp), {}, precision)
    near = TailReduction(
        name="near-zero-bound",
        hypothesis_text=near_hyp,
        precision=precision,
        margin=near_margin,
        covers_lo=Scalar.from_int(0, precision),
        covers_hi=Scalar.from_decimal("0.15", precision, "up"),
        covers_lo_open=True,
        axiom_ids=_INF_NEAR_ZERO_AXIOMS,
        conclusion=(
            f"{F_TEXT} > {threshold} on (0, 0.15]: the ratio is >= exp(-u*tanh(u)) >= exp(-0.15^2)"
        ),
        status=PROVED if near_margin.lo.value > 0 else UNKNOWN,
    )

    minimization = certified_infimum(
        parse(F_TEXT),
        Interval.from_decimal("0.15", "3"),
        Scalar.from_decimal(target_width, precision, "up"),
        cfg,
        threads,
    )
    lb_ok = minimization.converged and minimization.inf_lo.to_fraction() > _THRESHOLD_FRACTION

    far_hyp = f"exp((tanh(3)-1)*ln(2))-{threshold}"
    far_margin = eval_interval(parse(far_hyp), {}, precision)
    far = TailReduction(
        name="infinity-bound",
        hypothesis_text=far_hyp,
        precision=precision,
        margin=far_margin,
        covers_lo=Scalar.from_int(3, precision),
        covers_hi=None,
        covers_lo_open=False,
        axiom_ids=_INF_INFINITY_AXIOMS,
        conclusion=(
            f"{F_TEXT} > {threshold} on [3, inf): the ratio exceeds 2^(tanh(u)-1) >= 2^(tanh(3)-1)"
        ),
        status=PROVED if far_margin.lo.value > 0 else UNKNOWN,
    )

    endpoint = _point_check(
        "endpoint u=0",
        f"{F_TEXT}-{threshold}",
        "u",
        Scalar.from_int(0, precision),
        precision,
    )

    proved = (
        near.status == PROVED
        and lb_ok
        and far.status == PROVED
        and endpoint.status == PROVED
    )
    axiom_ids = sorted(set(_INF_NEAR_ZERO_AXIOMS) | set(_INF_INFINITY_AXIOMS))
    return InfimumClaim(
        threshold_text=threshold,
        near_zero=near,
        minimization=minimization,
        infinity=far,
        endpoint=endpoint,
        axioms=_axiom_pairs(axiom_ids),
        status=PROVED if proved else UNDETERMINED,
    )


def validate_infimum_claim(claim: InfimumClaim) -> bool:
    """Independently re-check every part of a full-line infimum claim."""
    known = {axiom_id for axiom_id, _ in claim.axioms}
    if claim.status == PROVED:
        if not validate_tail(claim.near_zero, known):
            return False
        if not validate_tail(claim.infinity, known):
            return False
        try:
            margin = eval_point(
                parse(claim.endpoint.margin_text),
                {claim.endpoint.variable: claim.endpoint.point},
                claim.endpoint.precision,
            )
        except Exception:
            return False
        if not margin.lo.value > 0:
            return False
        if not validate_minimization(claim.minimization):
            return False
        if not claim.minimization.converged:
            return False
        threshold = Fraction(claim.threshold_text.replace(",", "."))
        if not claim.minimization.inf_lo.to_fraction() > threshold * Fraction(1):
            return False
        # Seams: (0, 0.15] tail meets the minimization domain, which meets [3, inf).
        if claim.near_zero.covers_hi.value < claim.minimization.domain.lo.value:
            return False
        if claim.infinity.covers_lo.value > claim.minimization.domain.hi.value:
            return False
    return True


# ---------------------------------------------------------------------------
# Metamorphic equivalence and limit behavior
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckReport:
    name: str
    checks: tuple[tuple[str, bool, str], ...]

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    @property
    def failures(self) -> tuple[str, ...]:
        return tuple(name for name, ok, _ in self.checks if not ok)


def _overlap(a: Interval, b: Interval) -> bool:
    return a.overlaps(b)


def metamorphic_equivalence_check(n: int = 1000, precision: int = 128, seed: int = 0) -> CheckReport:
    """The three forms of the theorem agree under t = cosh(u), c = tanh(u).

    For seeded u > 0, the substituted form-1 and form-2 sides must produce
    enclosures overlapping the form-3 sides (LHS with LHS, RHS with RHS),
    and exp(c*artanh(c)) must overlap exp(c*arcosh(1/sqrt(1-c^2))).
    """
    t1_lhs, t1_rhs = (parse(part) for part in T1_TEXT.split("<"))
    t2_lhs, t2_rhs = (parse(part) for part in T2_TEXT.split("<"))
    t3_lhs, t3_rhs = (parse(part) for part in T3_TEXT.split("<"))
    cosh_u = parse("cosh(u)")
    tanh_u = parse("tanh(u)")
    form1 = [substitute(side, "t", cosh_u) for side in (t1_lhs, t1_rhs)]
    form2 = [substitute(side, "c", tanh_u) for side in (t2_lhs, t2_rhs)]
    alt_rhs = substitute(parse("exp(c*arcosh(1/sqrt(1-c^2)))"), "c", tanh_u)

    rng = random.Random(seed)
    checks = []
    failures = 0
    for i in range(n):
        u = _dyadic_sample(rng, "0.001", "10")
        binding = {"u": u}
        sides3 = [eval_point(side, binding, precision) for side in (t3_lhs, t3_rhs)]
        sides1 = [eval_point(side, binding, precision) for side in form1]
        sides2 = [eval_point(side, binding, precision) for side in form2]
        alt = eval_point(alt_rhs, binding, precision)
        ok = (
            _overlap(sides1[0], sides3[0])
            and _overlap(sides1[1], sides3[1])
            and _overlap(sides2[0], sides3[0])
            and _overlap(sides2[1], sides3[1])
            and _overlap(sides1[0], sides2[0])
            and _overlap(sides1[1], sides2[1])
            and _overlap(alt, sides2[1])
        )
        if not ok:
            failures += 1
            checks.append((f"sample {i} u={u.decimal(8)}", False, "enclosures failed to overlap"))
    checks.append((f"{n} samples, pairwise overlap of forms 1/2/3", failures == 0, f"{failures} failures"))

    # Limiting behavior proxy: all six sides are ~1 at u = 1e-6.
    tiny = {"u": "1e-6"}
    near_one = all(
        abs(float(eval_point(side, tiny, precision).lo.value) - 1.0) < 1e-5
        for side in (t3_lhs, t3_rhs, *form1, *form2)
    )
    checks.append(("u=1e-6 proxy: all sides near 1", near_one, ""))
    return CheckReport("metamorphic-equivalence", tuple(checks))


def limit_behavior_check(precision: int = 128) -> CheckReport:
    """Sandwich behavior at u in {5, 10, 20}: 2^(tanh u - 1) < ratio < 1,
    with the distance to 1 shrinking at least tenfold per step."""
    ratio = parse(F_TEXT)
    lower = parse(TWO_POWER_TEXT)
    one = Interval.from_int(1, precision)
    checks = []
    gaps = []
    for u in ("5", "10", "20"):
        value = eval_point(ratio, {"u": u}, precision)
        bound = eval_point(lower, {"u": u}, precision)
        checks.append((f"u={u}: lower bound < ratio", bound.hi.value < value.lo.value, f"{bound!r} vs {value!r}"))
        checks.append((f"u={u}: ratio < 1", value.hi.value < 1, f"{value!r}"))
        gaps.append(interval_sub(one, bound, precision))
    for (ua, ub), (ga, gb) in zip((("5", "10"), ("10", "20")), ((gaps[0], gaps[1]), (gaps[1], gaps[2]))):
        ratio_lo = interval_div(ga, gb, precision).lo
        checks.append(
            (f"(1 - bound({ua})) / (1 - bound({ub})) >= 10", ratio_lo.value >= 10, f"ratio >= {ratio_lo.decimal(6, 'down')}")
        )
    return CheckReport("limit-behavior", tuple(checks))


# ---------------------------------------------------------------------------
# artanh series coefficients
# ---------------------------------------------------------------------------

def artanh_series_coefficients(k_max: int = 20) -> list[Fraction]:
    """Exact odd Taylor coefficients of artanh at 0, for exponents 1,3,...,2k+1.

    From (1 - t^2) * artanh'(t) = 1 with artanh(0) = 0: the coefficients obey
    (j+1) a_{j+1} = (j-1) a_{j-1} + [j = 0], giving a_1 = 1 and
    a_{2k+1} = (2k-1)/(2k+1) * a_{2k-1} = 1/(2k+1).
    """
    coefficients = [Fraction(1)]
    for k in range(1, k_max + 1):
        previous = coefficients[-1]
        coefficients.append(previous * Fraction(2 * k - 1, 2 * k + 1))
    return coefficients


def check_artanh_series(k_max: int = 20, precision: int = 192) -> CheckReport:
    """Coefficient values and nonnegativity, tied to artanh by remainder checks.

    The partial sum S_K(t) must satisfy S_K(t) <= artanh(t) <= S_K(t) +
    t^(2K+3) / ((2K+3)(1-t^2)) for sample t, which pins the tail between 0
    and the geometric remainder bound.
    """
    checks = []
    coefficients = artanh_series_coefficients(k_max)
    for k, coefficient in enumerate(coefficients):
        expected = Fraction(1, 2 * k + 1)
        checks.append(
            (f"coefficient of t^{2 * k + 1} = 1/{2 * k + 1}", coefficient == expected and coefficient >= 0, str(coefficient))
        )
    terms = "+".join(f"t^{2 * k + 1}/{2 * k + 1}" for k in range(k_max + 1))
    partial = parse(terms)
    artanh_t = parse("artanh(t)")
    power = 2 * k_max + 3
    remainder = parse(f"t^{power}/({power}*(1-t^2))")
    for t in ("0.1", "0.3", "0.5", "0.9"):
        binding = {"t": t}
        s = eval_point(partial, binding, precision)
        a = eval_point(artanh_t, binding, precision)
        r = eval_point(remainder, binding, precision)
        lower_ok = s.lo.value <= a.hi.value
        upper_ok = a.lo.value <= s.hi.value + r.hi.value
        checks.append((f"t={t}: S_K <= artanh <= S_K + remainder", lower_ok and upper_ok, f"S={s!r} artanh={a!r}"))
    return CheckReport("artanh-series", tuple(checks))


# ---------------------------------------------------------------------------
# Property suites for the lemmas
# ---------------------------------------------------------------------------

def l1_property_check(n: int = 10**4, seed: int = 0) -> CheckReport:
    """Certified separation of tanh(x)*tanh(y) < tanh(x*tanh(y)) on (0, 20]^2."""
    lhs, rhs = (parse(part) for part in L1_TEXT.split("<"))
    rng = random.Random(seed)
    failures = 0
    for _ in range(n):
        points = {"x": _dyadic_sample(rng, "0", "20"), "y": _dyadic_sample(rng, "0", "20")}
        if not certified_strictly_less(lhs, rhs, points):
            failures += 1
    return CheckReport(
        "l1-property",
        ((f"{n} samples on (0,20]^2 certified separated", failures == 0, f"{failures} failures"),),
    )


def ch_property_check(n: int = 10**4, seed: int = 0) -> CheckReport:
    """Certified separation of ln(2)+u < arcosh(2*cosh(u)) on (0, 20]."""
    lhs, rhs = (parse(part) for part in CH_TEXT.split("<"))
    rng = random.Random(seed)
    failures = 0
    for _ in range(n):
        points = {"u": _dyadic_sample(rng, "0", "20")}
        if not certified_strictly_less(lhs, rhs, points):
            failures += 1
    return CheckReport(
        "ch-property",
        ((f"{n} samples on (0,20] certified separated", failures == 0, f"{failures} failures"),),
    )


def l2_reduction_check(n: int = 1000, seed: int = 0) -> CheckReport:
    """Random L2 sign-condition instances map to true L1 instances.

    For sampled (K, x), both the original instance and its image under
    u = arcosh(x), v = artanh(K) (evaluated as enclosures) must certify.
    """
    l2_lhs, l2_rhs = (parse(part) for part in L2_TEXT.split("<"))
    l1_lhs, l1_rhs = (parse(part) for part in L1_TEXT.split("<"))
    arco = parse("arcosh(x)")
    arta = parse("artanh(K)")
    rng = random.Random(seed)
    failures = 0
    for _ in range(n):
        K = _dyadic_sample(rng, "0.001", "0.999")
        x = _dyadic_sample(rng, "1.001", "20")
        points = {"K": K, "x": x}
        ok_l2 = certified_strictly_less(l2_lhs, l2_rhs, points)
        precision = 128
        u_enc = eval_point(arco, {"x": x}, precision)
        v_enc = eval_point(arta, {"K": K}, precision)
        mapped = {"x": u_enc, "y": v_enc}
        left = eval_interval(l1_lhs, mapped, precision)
        right = eval_interval(l1_rhs, mapped, precision)
        ok_l1 = left.hi.value < right.lo.value
        if not (ok_l2 and ok_l1):
            failures += 1
    return CheckReport(
        "l2-to-l1-reduction",
        ((f"{n} instances: sign condition and mapped product bound both certify", failures == 0, f"{failures} failures"),),
    )


# ---------------------------------------------------------------------------
# Corpus items
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CorpusItem:
    id: str
    title: str
    plan: str  # certify-compact | property-test | composite
    expected: str
    statement_text: str = ""
    notes: str = ""


_ITEMS = (
    CorpusItem(
        "L1", "product of tanh bounded by tanh of scaled argument", "certify-compact", PROVED,
        L1_TEXT,
        "certified on [0.5,2]^2; sampled on (0,20]^2 (tight as y grows, so the full quadrant is property-tested)",
    ),
    CorpusItem(
        "L1S", "artanh power series has coefficients 1/(2k+1)", "property-test", "passed",
        notes="exact rational recurrence for k <= 20, plus interval remainder checks tying the series to artanh",
    ),
    CorpusItem(
        "L2", "concavity sign condition for cosh(K*arcosh(x))", "certify-compact", PROVED,
        L2_TEXT,
        "certified on x in [1.1,10], K in [0.1,0.9] (tight as x -> 1+); the u=arcosh(x), v=artanh(K) map sends instances to L1",
    ),
    CorpusItem("T1", "main inequality, form in t", "certify-compact", PROVED, T1_TEXT, "certified on t in [1.1,10]"),
    CorpusItem("T2", "main inequality, form in c", "certify-compact", PROVED, T2_TEXT, "certified on c in [0.1,0.9]"),
    CorpusItem("T3", "main inequality, form in u", "certify-compact", PROVED, T3_TEXT, "certified on u in [0.3,3]; tails close the rest"),
    CorpusItem(
        "PS", "mean-value step: increment bounded by endpoint slope", "certify-compact", PROVED,
        PS_TEXT, "certified on t in [1.1,10] with the slope factor sqrt(1-1/t^2) inlined",
    ),
    CorpusItem(
        "CH", "arcosh(2*cosh(u)) exceeds ln(2)+u", "property-test", PROVED,
        CH_STEP_TEXT,
        "exact chain step 2*sinh(u) < sqrt(4*cosh(u)^2-1) certified on [0.1,5]; the bound itself sampled on (0,20]",
    ),
    CorpusItem(
        "S3A", "two-sided sandwich: lower bound 2^(tanh(u)-1) on the ratio", "certify-compact", PROVED,
        S3A_LOWER_TEXT,
        "lower side certified on [0.5,5]; the upper side of the sandwich is item T3",
    ),
    CorpusItem(
        "T3-full", "main inequality on the whole half-line", "composite", PROVED,
        T3_TEXT, "near-zero reduction at 0.3 + certified bisection on [0.3,3] + infinity reduction at 3",
    ),
    CorpusItem(
        "infimum-full", f"ratio stays above {INF_THRESHOLD} on [0, inf)", "composite", PROVED,
        notes="near-zero bound on (0,0.15] + certified infimum on [0.15,3] + tail bound on [3,inf) + endpoint value 1",
    ),
    CorpusItem(
        "equivalence", "three theorem forms agree under substitution", "property-test", "passed",
        notes="t = cosh(u) and c = tanh(u) produce pairwise overlapping enclosures",
    ),
    CorpusItem(
        "limits", "ratio approaches 1 with certified rate", "property-test", "passed",
        notes="sandwich at u in {5,10,20}; distance to 1 drops at least tenfold per step",
    ),
    CorpusItem(
        "axioms", "axiom ledger property tests", "property-test", "passed",
        notes="every tail-reduction axiom checked for certified positivity at seeded samples",
    ),
)


def builtin_items() -> list[CorpusItem]:
    return list(_ITEMS)


def get_item(item_id: str) -> CorpusItem:
    for item in _ITEMS:
        if item.id == item_id:
            return item
    raise KeyError(item_id)


_CERTIFY_DOMAINS: dict[str, Box] = {}


def _certify_domain(item_id: str) -> Box:
    if not _CERTIFY_DOMAINS:
        _CERTIFY_DOMAINS.update(
            {
                "L1": Box.of(("x", Interval.from_decimal("0.5", "2")), ("y", Interval.from_decimal("0.5", "2"))),
                "L2": Box.of(("x", Interval.from_decimal("1.1", "10")), ("K", Interval.from_decimal("0.1", "0.9"))),
                "T1": Box.of(("t", Interval.from_decimal("1.1", "10"))),
                "T2": Box.of(("c", Interval.from_decimal("0.1", "0.9"))),
                "T3": Box.of(("u", Interval.from_decimal("0.3", "3"))),
                "PS": Box.of(("t", Interval.from_decimal("1.1", "10"))),
                "CH": Box.of(("u", Interval.from_decimal("0.1", "5"))),
                "S3A": Box.of(("u", Interval.from_decimal("0.5", "5"))),
            }
        )
    return _CERTIFY_DOMAINS[item_id]


@dataclass
class ItemOutcome:
    item: CorpusItem
    status: str  # proved / passed / undetermined / failed
    lines: list[str]
    certificate: Certificate | None = None
    claim: InfimumClaim | None = None

    @property
    def ok(self) -> bool:
        return self.status in (PROVED, "passed")


def run_item(
    item_id: str,
    cfg: ProverConfig = ProverConfig(),
    seed: int = 0,
    threads: int = 1,
    samples: dict | None = None,
) -> ItemOutcome:
    """Execute one corpus item's verification plan.

    samples overrides the default property-test sample counts, keyed by
    "l1", "ch", "l2map", "equivalence", "axioms".
    """
    samples = samples or {}
    item = get_item(item_id)
    lines: list[str] = []

    def certify(statement_text: str, domain: Box) -> tuple[Certificate, bool]:
        stmt = InequalityStatement.from_text(statement_text, domain)
        cert = verify_strict(stmt, cfg, threads)
        valid = certificate_validate(cert, stmt)
        lines.append(
            f"certify {statement_text} on {domain!r}: {cert.status}, {len(cert.leaves)} leaves, validates={valid}"
        )
        return cert, cert.proved and valid

    if item.plan == "certify-compact":
        cert, ok = certify(item.statement_text, _certify_domain(item_id))
        if item_id == "L1":
            report = l1_property_check(samples.get("l1", 10**4), seed)
            lines.extend(f"{name}: {'ok' if good else 'FAIL'} {detail}" for name, good, detail in report.checks)
            ok = ok and report.passed
        if item_id == "L2":
            report = l2_reduction_check(samples.get("l2map", 1000), seed)
            lines.extend(f"{name}: {'ok' if good else 'FAIL'} {detail}" for name, good, detail in report.checks)
            ok = ok and report.passed
        if item_id == "S3A":
            lines.append("upper side of the sandwich is item T3")
        return ItemOutcome(item, PROVED if ok else UNDETERMINED, lines, certificate=cert)

    if item_id == "CH":
        cert, ok = certify(item.statement_text, _certify_domain(item_id))
        report = ch_property_check(samples.get("ch", 10**4), seed)
        lines.extend(f"{name}: {'ok' if good else 'FAIL'} {detail}" for name, good, detail in report.checks)
        ok = ok and report.passed
        return ItemOutcome(item, PROVED if ok else UNDETERMINED, lines, certificate=cert)

    if item_id == "L1S":
        report = check_artanh_series()
        lines.extend(f"{name}: {'ok' if good else 'FAIL'} {detail}" for name, good, detail in report.checks)
        return ItemOutcome(item, "passed" if report.passed else "failed", lines)

    if item_id == "equivalence":
        report = metamorphic_equivalence_check(samples.get("equivalence", 1000), 128, seed)
        lines.extend(f"{name}: {'ok' if good else 'FAIL'} {detail}" for name, good, detail in report.checks)
        return ItemOutcome(item, "passed" if report.passed else "failed", lines)

    if item_id == "limits":
        report = limit_behavior_check()
        lines.extend(f"{name}: {'ok' if good else 'FAIL'} {detail}" for name, good, detail in report.checks)
        return ItemOutcome(item, "passed" if report.passed else "failed", lines)

    if item_id == "axioms":
        n = samples.get("axioms", 1000)
        all_ok = True
        for axiom in AXIOMS.values():
            failures, checked = check_axiom(axiom, n, seed)
            all_ok = all_ok and not failures
            lines.append(f"{axiom.id}: {checked - len(failures)}/{checked} certified positive")
        return ItemOutcome(item, "passed" if all_ok else "failed", lines)

    if item_id == "T3-full":
        cert = verify_three_full_line(cfg, threads)
        stmt = t3_statement("0.3", "3")
        valid = certificate_validate(cert, stmt)
        for tail in cert.tail_reductions:
            lines.append(f"tail {tail.name}: {tail.status}, covers {tail.covers_text()}, margin lo {tail.margin.lo.decimal(8, 'down')}")
        lines.append(f"compact part: {len(cert.leaves)} leaves on {cert.domain!r}")
        lines.append(f"composite status: {cert.status}, validates={valid}")
        if not cert.proved:
            failing = [t.name for t in cert.tail_reductions if t.status != PROVED]
            if cert.frontier:
                failing.append("compact")
            lines.append(f"failing components: {', '.join(failing) or 'none'}")
        ok = cert.proved and valid
        return ItemOutcome(item, PROVED if ok else UNDETERMINED, lines, certificate=cert)

    if item_id == "infimum-full":
        claim = infimum_claim_full_line(cfg, threads)
        valid = validate_infimum_claim(claim)
        m = claim.minimization
        lines.append(f"near-zero bound: {claim.near_zero.status}, margin lo {claim.near_zero.margin.lo.decimal(8, 'down')}")
        lines.append(
            f"infimum on [{m.domain.lo.decimal(4, 'down')}, {m.domain.hi.decimal(4, 'up')}]: "
            f"[{m.inf_lo.decimal(10, 'down')}, {m.inf_hi.decimal(10, 'up')}], {m.status}"
        )
        lines.append(f"infinity bound: {claim.infinity.status}, margin lo {claim.infinity.margin.lo.decimal(8, 'down')}")
        lines.append(f"endpoint u=0: {claim.endpoint.status}")
        lines.append(f"claim: {claim.claim_text()}: {claim.status}, validates={valid}")
        if not claim.proved:
            failing = [
                name
                for name, good in (
                    ("near-zero", claim.near_zero.status == PROVED),
                    ("minimization", m.converged and m.inf_lo.to_fraction() > _THRESHOLD_FRACTION),
                    ("infinity", claim.infinity.status == PROVED),
                    ("endpoint", claim.endpoint.status == PROVED),
                )
                if not good
            ]
            lines.append(f"failing components: {', '.join(failing) or 'none'}")
        ok = claim.proved and valid
        return ItemOutcome(item, PROVED if ok else UNDETERMINED, lines, claim=claim)

    raise KeyError(item_id)


# ---------------------------------------------------------------------------
# Infimum-claim serialization (schema v1; minimization referenced by hash)
# ---------------------------------------------------------------------------

from .prover import _interval_json, _interval_from_json, _tail_json, _tail_from_json  # noqa: E402


def _point_check_json(check: PointCheck) -> dict:
    return {
        "name": check.name,
        "margin": check.margin_text,
        "variable": check.variable,
        "point": check.point.to_hex(),
        "precision": check.precision,
        "enclosure": _interval_json(check.margin),
        "status": check.status,
    }


def _point_check_from_json(obj: dict) -> PointCheck:
    return PointCheck(
        name=obj["name"],
        margin_text=obj["margin"],
        variable=obj["variable"],
        point=Scalar.from_hex(obj["point"]),
        precision=int(obj["precision"]),
        margin=_interval_from_json(obj["enclosure"]),
        status=obj["status"],
    )


def infimum_claim_to_json(claim: InfimumClaim, minimization_ref: dict | None = None) -> dict:
    payload = {
        "schema": SCHEMA,
        "kind": "infimum_claim",
        "claim": claim.claim_text(),
        "threshold": claim.threshold_text,
        "status": claim.status,
        "near_zero": _tail_json(claim.near_zero),
        "infinity": _tail_json(claim.infinity),
        "endpoint": _point_check_json(claim.endpoint),
        "axioms": [{"id": axiom_id, "statement": text} for axiom_id, text in claim.axioms],
    }
    if minimization_ref is None:
        payload["minimization"] = minimization_to_json(claim.minimization)
    else:
        payload["minimization_ref"] = minimization_ref
    return payload


def infimum_claim_from_json(obj: dict, minimization: MinimizationResult | None = None) -> InfimumClaim:
    try:
        if obj["schema"] != SCHEMA or obj["kind"] != "infimum_claim":
            raise MalformedCertificate(f"not a schema-{SCHEMA} infimum claim")
        if minimization is None:
            minimization = minimization_from_json(obj["minimization"])
        return InfimumClaim(
            threshold_text=obj["threshold"],
            near_zero=_tail_from_json(obj["near_zero"]),
            minimization=minimization,
            infinity=_tail_from_json(obj["infinity"]),
            endpoint=_point_check_from_json(obj["endpoint"]),
            axioms=tuple((entry["id"], entry["statement"]) for entry in obj["axioms"]),
            status=obj["status"],
        )
    except MalformedCertificate:
        raise
    except (KeyError, TypeError, ValueError) as err:
        raise MalformedCertificate(f"bad infimum claim structure: {err}") from None


def write_infimum_claim(claim: InfimumClaim, path, minimization_path=None) -> None:
    """Write the composite; with minimization_path, the minimization component
    is written separately and referenced by content hash."""
    import os

    ref = None
    if minimization_path is not None:
        text = dumps(minimization_to_json(claim.minimization))
        with open(minimization_path, "w", encoding="utf-8") as handle:
            handle.write(text)
        ref = {
            "file": os.path.basename(str(minimization_path)),
            "sha256": hashlib.sha256(text.encode()).hexdigest(),
        }
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(dumps(infimum_claim_to_json(claim, minimization_ref=ref)))


def read_infimum_claim(path) -> InfimumClaim:
    import os

    try:
        with open(path, encoding="utf-8") as handle:
            obj = json.load(handle)
    except (OSError, json.JSONDecodeError) as err:
        raise MalformedCertificate(f"cannot read infimum claim: {err}") from None
    minimization = None
    if "minimization_ref" in obj:
        ref = obj["minimization_ref"]
        ref_path = os.path.join(os.path.dirname(os.path.abspath(str(path))), ref["file"])
        try:
            with open(ref_path, "rb") as handle:
                blob = handle.read()
        except OSError as err:
            raise MalformedCertificate(f"missing referenced component: {err}") from None
        if hashlib.sha256(blob).hexdigest() != ref["sha256"]:
            raise MalformedCertificate("referenced minimization component fails its content hash")
        minimization = minimization_from_json(json.loads(blob.decode()))
    return infimum_claim_from_json(obj, minimization)
