"""Continued fractions of rotation parameters in exact arithmetic.

The rotation parameter theta lives in (0,1) and is given exactly as a big
rational or quadratic surd, or approximately as a decimal string. This
module expands theta into partial quotients a_1..a_N and convergents
p_k/q_k (p_0 = 0, p_1 = 1, q_0 = 1, q_1 = a_1, then the usual three-term
recursion), entirely with big integers and rationals:

  * rational inputs terminate at the exact finite expansion,
  * quadratic surds use the periodic integer-state algorithm with period
    detection, exact to arbitrary depth,
  * decimal inputs denote the certified interval [v - 10^-prec, v + 10^-prec]
    and a quotient is emitted only when both endpoints agree on it.

On top of the expansion sit the quantitative facts the error radii need:
the gap bound |theta - p_n/q_n| < 1/(q_n q_{n+1}), the Fibonacci growth of
the q_k, the geometric tail-sum constant 2*sqrt(5)/(sqrt(5)-1), and the
convergent membership tests.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .errors import (
    IndexOutOfRange,
    InsufficientTerms,
    InvalidInput,
    PrecisionExhausted,
)
from .exact import Surd, is_perfect_square, sqrt_lower, sqrt_upper


# ---------------------------------------------------------------------------
# theta input variants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BigRational:
    """Exact rational number p/q, stored reduced with q > 0."""

    numerator: int
    denominator: int

    def __post_init__(self):
        if self.denominator == 0:
            raise InvalidInput("rational denominator must be nonzero")
        g = math.gcd(self.numerator, self.denominator)
        num, den = self.numerator // g, self.denominator // g
        if den < 0:
            num, den = -num, -den
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "denominator", den)

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def __str__(self) -> str:
        return f"rational:{self.numerator}/{self.denominator}"


@dataclass(frozen=True)
class QuadraticSurd:
    """Exact quadratic irrational (a + b*sqrt(d))/c with integer fields;
    d must not be a perfect square and b must be nonzero (a degenerate
    surd is just a rational in disguise and is rejected)."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.c == 0:
            raise InvalidInput("surd denominator c must be nonzero")
        if self.b == 0:
            raise InvalidInput("degenerate surd (b = 0); use a rational input")
        if self.d < 2 or is_perfect_square(self.d):
            raise InvalidInput(f"surd radicand d={self.d} must be >= 2 and non-square")

    def surd(self) -> Surd:
        return Surd(Fraction(self.a, self.c), Fraction(self.b, self.c), self.d)

    def __str__(self) -> str:
        return f"surd:({self.a}+{self.b}*sqrt({self.d}))/{self.c}"


@dataclass(frozen=True)
class DecimalString:
    """Decimal literal standing for the certified interval
    [v - 10^-precision, v + 10^-precision], where precision counts the
    digits after the decimal point (last-place uncertainty)."""

    digits: str

    def __post_init__(self):
        if not re.fullmatch(r"0?\.[0-9]+", self.digits):
            raise InvalidInput(f"malformed decimal digits {self.digits!r}")

    @property
    def precision(self) -> int:
        return len(self.digits.split(".", 1)[1])

    @property
    def value(self) -> Fraction:
        return Fraction(self.digits)

    def interval(self) -> tuple[Fraction, Fraction]:
        ulp = Fraction(1, 10**self.precision)
        return self.value - ulp, self.value + ulp

    def __str__(self) -> str:
        return f"decimal:{self.digits}"


RealNumberInput = Union[BigRational, QuadraticSurd, DecimalString]

_THETA_GRAMMAR = {
    "rational": re.compile(r"rational:(-?\d+)/(-?\d+)\Z"),
    "surd": re.compile(r"surd:\((-?\d+)\+(-?\d+)\*sqrt\((\d+)\)\)/(-?\d+)\Z"),
    "decimal": re.compile(r"decimal:(0?\.[0-9]+)\Z"),
}


def parse_theta(text: str) -> RealNumberInput:
    """Parse "rational:<p>/<q>", "surd:(<a>+<b>*sqrt(<d>))/<c>" or
    "decimal:<digits>" into the corresponding input variant."""
    if m := _THETA_GRAMMAR["rational"].fullmatch(text):
        return BigRational(int(m.group(1)), int(m.group(2)))
    if m := _THETA_GRAMMAR["surd"].fullmatch(text):
        return QuadraticSurd(int(m.group(1)), int(m.group(2)), int(m.group(4)), int(m.group(3)))
    if m := _THETA_GRAMMAR["decimal"].fullmatch(text):
        return DecimalString(m.group(1))
    raise InvalidInput(
        f"cannot parse theta {text!r}; expected rational:<p>/<q>, "
        "surd:(<a>+<b>*sqrt(<d>))/<c> or decimal:<digits>"
    )


def theta_is_exact(theta: RealNumberInput) -> bool:
    return not isinstance(theta, DecimalString)


def theta_is_irrational(theta: RealNumberInput) -> Optional[bool]:
    """True for surds, False for rationals, None (unknown, assumed) for
    decimal inputs."""
    if isinstance(theta, QuadraticSurd):
        return True
    if isinstance(theta, BigRational):
        return False
    return None


def theta_bounds(theta: RealNumberInput, digits: int = 40) -> tuple[Fraction, Fraction]:
    """Rational enclosure of the represented value (a point for exact
    inputs, the certified interval for decimals)."""
    if isinstance(theta, BigRational):
        v = theta.value
        return v, v
    if isinstance(theta, QuadraticSurd):
        return theta.surd().enclosure(digits)
    return theta.interval()


def theta_float(theta: RealNumberInput) -> float:
    lo, hi = theta_bounds(theta)
    return float((lo + hi) / 2)


def require_unit_interval(theta: RealNumberInput) -> None:
    """Reject rotation parameters outside the open interval (0,1). For a
    decimal input the check applies to the written value."""
    if isinstance(theta, BigRational):
        ok = 0 < theta.value < 1
    elif isinstance(theta, QuadraticSurd):
        s = theta.surd()
        ok = s.sign() > 0 and s.compare(1) < 0
    else:
        ok = 0 < theta.value < 1
    if not ok:
        raise InvalidInput(f"theta {theta} is not in (0,1)")


# ---------------------------------------------------------------------------
# expansion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContinuedFractionExpansion:
    """Partial quotients a_1..a_N with convergents (p_k, q_k), k = 0..N.

    exact is False only for decimal (precision-limited) inputs;
    terminated marks a rational theta whose full finite expansion was
    reached; periodic_part = (preperiod length, period length) for surds.
    """

    theta: RealNumberInput
    partial_quotients: tuple[int, ...]
    convergents: tuple[tuple[int, int], ...]
    exact: bool
    periodic_part: Optional[tuple[int, int]] = None
    terminated: bool = False

    @property
    def n_terms(self) -> int:
        return len(self.partial_quotients)

    def convergent(self, k: int) -> tuple[int, int]:
        if not 0 <= k < len(self.convergents):
            raise IndexOutOfRange(
                f"convergent index {k} outside computed range 0..{len(self.convergents) - 1}"
            )
        return self.convergents[k]

    def p(self, k: int) -> int:
        return self.convergent(k)[0]

    def q(self, k: int) -> int:
        return self.convergent(k)[1]

    def __post_init__(self):
        # exact-integer recursion invariants; cheap and always on
        a, conv = self.partial_quotients, self.convergents
        assert len(conv) == len(a) + 1
        assert conv[0] == (0, 1)
        pm2, qm2 = 1, 0
        for k in range(1, len(conv)):
            p, q = conv[k]
            pprev, qprev = conv[k - 1]
            assert a[k - 1] >= 1
            assert p == a[k - 1] * pprev + pm2 and q == a[k - 1] * qprev + qm2
            assert p * qprev - pprev * q == (-1) ** (k - 1)  # gcd(p_k, q_k) = 1
            if k >= 2:
                assert q > qprev
            pm2, qm2 = pprev, qprev


def _convergents_from_quotients(quotients) -> tuple[tuple[int, int], ...]:
    conv = [(0, 1)]
    pm1, qm1 = 1, 0  # virtual index -1 seeds the recursion
    p, q = 0, 1
    for a in quotients:
        p, q, pm1, qm1 = a * p + pm1, a * q + qm1, p, q
        conv.append((p, q))
    return tuple(conv)


def _expand_rational(value: Fraction, max_terms: int) -> tuple[list[int], bool]:
    # quotients of theta = p/q in (0,1) are the Euclidean quotients of (q, p)
    num, den = value.denominator, value.numerator
    quotients: list[int] = []
    while den != 0 and len(quotients) < max_terms:
        a, rem = divmod(num, den)
        quotients.append(a)
        num, den = den, rem
    return quotients, den == 0


def _floor_state(P: int, D: int, Q: int) -> int:
    """Exact floor of (P + sqrt(D))/Q for non-square D. sqrt(D) lies in
    the open interval (s, s+1) with s = isqrt(D), which contains no
    integers, so the floor is constant there."""
    s = math.isqrt(D)
    if Q > 0:
        return (P + s) // Q
    return (-P - s - 1) // (-Q)


def _expand_surd(theta: QuadraticSurd, max_terms: int):
    """Periodic integer-state algorithm on states x_k = (P_k + sqrt(D))/Q_k
    with invariant Q_k | D - P_k^2; the next state is P' = a*Q - P,
    Q' = (D - P'^2)/Q. States repeat, which yields the period."""
    # normalize (a + b*sqrt(d))/c to (P + sqrt(D))/Q with the + sign on the root
    a, b, c, d = theta.a, theta.b, theta.c, theta.d
    if b > 0:
        P, D, Q = a, b * b * d, c
    else:
        P, D, Q = -a, b * b * d, -c
    if (D - P * P) % Q != 0:
        P, D, Q = P * abs(Q), D * Q * Q, Q * abs(Q)

    a0 = _floor_state(P, D, Q)
    assert a0 == 0  # theta in (0,1)
    P = -P  # state of x - a0 reciprocated below
    # reciprocal of (P0 - a0*Q0 ... ) handled by the generic step with a = a0
    # here: x1 = 1/(x0 - 0) has state P1 = -P0, Q1 = (D - P0^2)/Q0
    Q = (D - P * P) // Q

    quotients: list[int] = []
    seen: dict[tuple[int, int], int] = {}
    periodic_part: Optional[tuple[int, int]] = None
    while len(quotients) < max_terms:
        state = (P, Q)
        if periodic_part is None:
            if state in seen:
                first = seen[state]
                periodic_part = (first, len(quotients) - first)
            else:
                seen[state] = len(quotients)
        ak = _floor_state(P, D, Q)
        quotients.append(ak)
        P = ak * Q - P
        Q = (D - P * P) // Q
    return quotients, periodic_part


def _expand_decimal(theta: DecimalString, max_terms: int) -> list[int]:
    lo, hi = theta.interval()
    quotients: list[int] = []
    while len(quotients) < max_terms:
        # next quotient is floor(1/x); certified only if both endpoints agree
        if lo <= 0:
            raise PrecisionExhausted(
                f"{theta} certifies only {len(quotients)} partial quotients "
                f"(interval endpoint reached 0); supply more digits",
                certified_terms=len(quotients),
            )
        a_hi, a_lo = (1 / hi).__floor__(), (1 / lo).__floor__()
        if a_hi != a_lo:
            raise PrecisionExhausted(
                f"{theta} certifies only {len(quotients)} partial quotients "
                f"(endpoints give floors {a_hi} and {a_lo}); supply more digits "
                "or use rational:<p>/<q> for an exact rational",
                certified_terms=len(quotients),
            )
        quotients.append(a_hi)
        lo, hi = 1 / hi - a_hi, 1 / lo - a_hi
    return quotients


def expand(theta: RealNumberInput, max_terms: int) -> ContinuedFractionExpansion:
    """Expand theta in (0,1) to at most max_terms partial quotients.

    Rational inputs may terminate early (exact finite expansion); surds
    always yield max_terms quotients plus the detected periodic part;
    decimal inputs either certify every requested quotient or raise
    PrecisionExhausted.
    """
    if max_terms < 1:
        raise InvalidInput(f"max_terms must be >= 1, got {max_terms}")
    require_unit_interval(theta)

    periodic_part = None
    terminated = False
    if isinstance(theta, BigRational):
        quotients, terminated = _expand_rational(theta.value, max_terms)
    elif isinstance(theta, QuadraticSurd):
        quotients, periodic_part = _expand_surd(theta, max_terms)
    else:
        quotients = _expand_decimal(theta, max_terms)

    return ContinuedFractionExpansion(
        theta=theta,
        partial_quotients=tuple(quotients),
        convergents=_convergents_from_quotients(quotients),
        exact=theta_is_exact(theta),
        periodic_part=periodic_part,
        terminated=terminated,
    )


# ---------------------------------------------------------------------------
# quantitative bounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GapBound:
    """Certified data for |theta - p_n/q_n| against 1/(q_n * q_{n+1}).

    gap_lower/gap_upper is a rational enclosure of the gap (a point for
    exact theta, where exact_gap is also set for rational inputs);
    strict records whether gap < bound strictly (it fails, with exact
    equality, only at the final index of a terminated rational
    expansion); squared_bound_holds records bound < (1/q_n)^2, which
    requires q_{n+1} > q_n and so can fail only at n = 0 with a_1 = 1.
    """

    n: int
    p: int
    q: int
    bound: Fraction
    gap_lower: Fraction
    gap_upper: Fraction
    exact_gap: Optional[Fraction] = None
    strict: bool = True
    squared_bound_holds: bool = True
    certified: bool = True

    @property
    def gap_float(self) -> float:
        return float((self.gap_lower + self.gap_upper) / 2)


def _gap_digits(qprod: int) -> int:
    return max(40, len(str(qprod)) + 20)


def convergent_gap(expansion: ContinuedFractionExpansion, n: int) -> GapBound:
    """Certified gap data at index n; needs q_{n+1}, so n+1 must be
    within the computed range."""
    if not 0 <= n + 1 < len(expansion.convergents):
        raise IndexOutOfRange(
            f"gap at n={n} needs convergent {n + 1}; computed 0..{len(expansion.convergents) - 1}"
        )
    p, q = expansion.convergent(n)
    qnext = expansion.q(n + 1)
    bound = Fraction(1, q * qnext)
    target = Fraction(p, q)
    theta = expansion.theta

    if isinstance(theta, BigRational):
        gap = abs(theta.value - target)
        lo = hi = gap
        exact_gap = gap
        certified = True
    elif isinstance(theta, QuadraticSurd):
        diff = theta.surd() - target
        if diff.sign() < 0:
            diff = -diff
        lo, hi = diff.enclosure(_gap_digits(q * qnext))
        exact_gap = None
        # exact strictness check, independent of the enclosure
        cmp = diff.compare(bound)
        assert cmp < 0
        certified = True
    else:
        tlo, thi = theta.interval()
        lo = max(Fraction(0), tlo - target, target - thi)
        hi = max(abs(tlo - target), abs(thi - target))
        exact_gap = None
        certified = hi < bound

    strict = True
    if exact_gap is not None:
        at_terminal = expansion.terminated and n == expansion.n_terms - 1
        if at_terminal:
            # consecutive-convergent determinant makes this an equality
            assert exact_gap == bound
            strict = False
        else:
            assert exact_gap < bound
    squared = bound < Fraction(1, q) ** 2
    if n >= 1:
        assert squared
    return GapBound(
        n=n, p=p, q=q, bound=bound, gap_lower=lo, gap_upper=hi,
        exact_gap=exact_gap, strict=strict, squared_bound_holds=squared,
        certified=certified,
    )


def tail_constant_enclosure(digits: int = 30) -> tuple[Fraction, Fraction]:
    """Rational enclosure of 2*sqrt(5)/(sqrt(5)-1) = (5+sqrt(5))/2, the
    geometric tail-sum constant (about 3.618034)."""
    return (5 + sqrt_lower(5, digits)) / 2, (5 + sqrt_upper(5, digits)) / 2


def tail_sum_bound(expansion: ContinuedFractionExpansion, n: int) -> Fraction:
    """Outward-rounded rational upper bound (1/q_n) * 2*sqrt(5)/(sqrt(5)-1)
    for the tail sum over 1/q_{n+k}, k >= 0."""
    if not 0 <= n < len(expansion.convergents):
        raise IndexOutOfRange(
            f"tail bound at n={n}; computed 0..{len(expansion.convergents) - 1}"
        )
    return tail_constant_enclosure()[1] / expansion.q(n)


def fibonacci(k: int) -> int:
    """F(0) = 1 = F(1), F(2) = 2, F(k) = F(k-1) + F(k-2)."""
    if k < 0:
        raise InvalidInput(f"Fibonacci index must be >= 0, got {k}")
    a, b = 1, 1
    for _ in range(k):
        a, b = b, a + b
    return a


def fibonacci_growth_check(expansion: ContinuedFractionExpansion, n: int, k: int) -> bool:
    """q_{n+k} >= F(k) * q_n; always true, exposed as a checkable assertion."""
    if k < 0 or n < 0 or n + k >= len(expansion.convergents):
        raise IndexOutOfRange(f"growth check needs convergents {n} and {n + k}")
    return expansion.q(n + k) >= fibonacci(k) * expansion.q(n)


def is_convergent(p: int, q: int, expansion: ContinuedFractionExpansion) -> Optional[int]:
    """Index k with p/q = p_k/q_k, or None. Decidable only when the
    expansion reaches denominators >= q."""
    if not (0 < p < q):
        raise InvalidInput(f"need 0 < p < q, got {p}/{q}")
    if math.gcd(p, q) != 1:
        raise InvalidInput(f"{p}/{q} is not reduced")
    if expansion.q(expansion.n_terms) < q:
        raise InsufficientTerms(
            f"largest computed denominator q_{expansion.n_terms} = "
            f"{expansion.q(expansion.n_terms)} < {q}; expand further"
        )
    for k, pq in enumerate(expansion.convergents):
        if pq == (p, q):
            return k
    return None


def sufficient_condition_check(p: int, q: int, theta: RealNumberInput) -> bool:
    """Exact test of |theta - p/q| < 1/(2q^2); when true, p/q is
    necessarily one of the convergents of theta."""
    if not (0 < p < q):
        raise InvalidInput(f"need 0 < p < q, got {p}/{q}")
    if not theta_is_exact(theta):
        raise InvalidInput("sufficient-condition test needs an exact theta")
    bound = Fraction(1, 2 * q * q)
    if isinstance(theta, BigRational):
        return abs(theta.value - Fraction(p, q)) < bound
    diff = theta.surd() - Fraction(p, q)
    if diff.sign() < 0:
        diff = -diff
    return diff.compare(bound) < 0


# ---------------------------------------------------------------------------
# exact helpers consumed by the certificate layer
# ---------------------------------------------------------------------------

def round_nearest(theta: RealNumberInput, n: int) -> tuple[int, bool]:
    """Exact nearest integer to n*theta, with ties (possible only for
    rational-valued inputs) broken to even. Returns (value, tie_was_broken)."""
    if n < 1:
        raise InvalidInput(f"n must be >= 1, got {n}")
    if isinstance(theta, QuadraticSurd):
        x = theta.surd() * n
        m = x.floor()
        cmp = x.compare(Fraction(2 * m + 1, 2))
        assert cmp != 0  # n * irrational is never a half-integer
        return (m if cmp < 0 else m + 1), False
    v = theta.value * n
    tie = v - math.floor(v) == Fraction(1, 2)
    return round(v), tie
