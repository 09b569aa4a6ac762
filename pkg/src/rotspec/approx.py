"""Certified spectral approximation: error radii with outward rounding.

Three certified statements are implemented, each as a computed radius
attached to finite data:

  * two-sided level-n certificates: the union of the spectra (or epsilon-
    pseudospectra) of the models h at the two convergents p_{n-1}/q_{n-1}
    and p_n/q_n approximates the infinite-dimensional operator within
    epsilon_n, where epsilon_n has a clean form 204*M*(1/q_{n-1} + 1/q_n)
    and a sharper practical form assembled from 2*pi / tail-sum pieces;
  * one-sided sqrt(n) certificates: for any denominator n and
    p = round(n*theta), sigma(h_{p/n}) lies within C1/sqrt(n) of the
    operator's spectrum, C1 = 36*M*sqrt(3*pi);
  * parameter continuity: changing theta moves the generators by at most
    9*sqrt(6*pi*|theta - theta'|).

Every irrational constant enters through rational enclosures and the
final float conversion rounds up, so returned radii are true bounds.
All inputs pass the irrationality gate: exactly rational theta is
rejected, surds certify irrationality, decimal inputs carry a recorded
caveat that irrationality is assumed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from . import contfrac
from .contfrac import (
    BigRational,
    ContinuedFractionExpansion,
    DecimalString,
    QuadraticSurd,
    RealNumberInput,
    expand,
    round_nearest,
    tail_constant_enclosure,
    theta_bounds,
    theta_is_irrational,
)
from .errors import (
    CertificateViolation,
    EmptyCloud,
    IndexOutOfRange,
    InvalidInput,
    ModelsNotNormal,
    NonCanonicalSpec,
    ResourceBudgetExceeded,
    ThetaRational,
)
from .exact import PI_HI, PI_LO, float_down, float_up, sqrt_lower, sqrt_upper
from .matmodel import MatrixModel, OperatorSpec, build_operator, spec_norm_bound
from .pseudospectra import (
    GridParams,
    PointCloud,
    PseudospectrumGrid,
    compute_grid,
    default_region,
    level_set,
    union_spectrum,
)
from .spectral import hermitian_eigenvalues, is_normal, normal_eigenvalues

RATE_FLAG = "O(1/q_{n-1} + 1/q_n)"


# ---------------------------------------------------------------------------
# exact constant assembly
# ---------------------------------------------------------------------------

def _abs_upper(c: complex, digits: int = 30) -> Fraction:
    """Rational upper bound on |c| from the exact square of its parts."""
    sq = Fraction(c.real) ** 2 + Fraction(c.imag) ** 2
    return sqrt_upper(sq, digits)


def _canonical_weights(spec: OperatorSpec) -> tuple[Fraction, Fraction, Fraction]:
    """(|a1|+|a-1|, |b1|+|b-1|, M) as rational upper bounds."""
    if not spec.is_canonical:
        raise NonCanonicalSpec(
            "certified radii exist for the canonical four-term form only; "
            f"general specs converge at rate {RATE_FLAG} without a computed constant"
        )
    a1, am, b1, bm = spec.canonical_four_term
    ups = [_abs_upper(c) for c in (a1, am, b1, bm)]
    return ups[0] + ups[1], ups[2] + ups[3], max(ups)


def _q_triple(expansion: ContinuedFractionExpansion, n: int) -> tuple[int, int, int]:
    if n < 1:
        raise IndexOutOfRange(f"level must be >= 1 (needs q_(n-1)), got n={n}")
    if n + 1 >= len(expansion.convergents):
        raise IndexOutOfRange(
            f"level n={n} needs convergent {n + 1}; computed 0..{len(expansion.convergents) - 1}"
        )
    return expansion.q(n - 1), expansion.q(n), expansion.q(n + 1)


def sharp_bound_exact(spec: OperatorSpec, expansion: ContinuedFractionExpansion,
                      n: int) -> Fraction:
    """The practical radius: with T = 2*sqrt(5)/(sqrt(5)-1),
    (|a1|+|a-1|) * [2*pi*(1/q_{n-1} + 1/q_n) + 2*pi*T/q_{n+1}]
    + (|b1|+|b-1|) * [pi/q_{n-1} + 5*pi/q_n + 5*pi*T/q_{n+1}],
    every factor rounded toward +inf."""
    au, bu, _ = _canonical_weights(spec)
    qm, qn, qp = (Fraction(x) for x in _q_triple(expansion, n))
    tail_hi = tail_constant_enclosure()[1]
    u_part = 2 * PI_HI * (1 / qm + 1 / qn) + (2 * PI_HI * tail_hi) / qp
    v_part = PI_HI / qm + 5 * PI_HI / qn + (5 * PI_HI * tail_hi) / qp
    return au * u_part + bu * v_part


def sharp_bound(spec: OperatorSpec, expansion: ContinuedFractionExpansion,
                n: int) -> float:
    return float_up(sharp_bound_exact(spec, expansion, n))


def clean_bound_exact(spec: OperatorSpec, expansion: ContinuedFractionExpansion,
                      n: int) -> Fraction:
    """204 * M * (1/q_{n-1} + 1/q_n)."""
    _, _, m_up = _canonical_weights(spec)
    qm, qn, _ = _q_triple(expansion, n)
    value = 204 * m_up * (Fraction(1, qm) + Fraction(1, qn))
    # the clean constant majorizes the sharp expression by construction
    assert sharp_bound_exact(spec, expansion, n) <= value
    return value


def clean_bound(spec: OperatorSpec, expansion: ContinuedFractionExpansion,
                n: int) -> float:
    return float_up(clean_bound_exact(spec, expansion, n))


def one_sided_constant_exact(spec: OperatorSpec) -> Fraction:
    """C1 = 36 * M * sqrt(3*pi), rounded up."""
    _, _, m_up = _canonical_weights(spec)
    return 36 * m_up * sqrt_upper(3 * PI_HI)


@dataclass(frozen=True)
class ConstantAudit:
    """Programmatic audit of the majorization constants: the exact chain
    behind the clean bound, 14*pi*(3*sqrt(5)-1)/(sqrt(5)-1) <= 204, and
    the tail-sum constant 2*sqrt(5)/(sqrt(5)-1)."""

    majorization_lower: float
    majorization_upper: float
    majorization_below_204: bool
    tail_lower: float
    tail_upper: float


def constant_audit() -> ConstantAudit:
    s5_lo, s5_hi = sqrt_lower(5), sqrt_upper(5)
    # 14*pi*(3*sqrt(5)-1)/(sqrt(5)-1), monotone in each enclosure endpoint:
    # increasing in pi and in the numerator root, decreasing in the
    # denominator root
    major_lo = 14 * PI_LO * (3 * s5_lo - 1) / (s5_hi - 1)
    major_hi = 14 * PI_HI * (3 * s5_hi - 1) / (s5_lo - 1)
    tail_lo, tail_hi = tail_constant_enclosure()
    return ConstantAudit(
        majorization_lower=float_down(major_lo),
        majorization_upper=float_up(major_hi),
        majorization_below_204=major_hi <= 204,
        tail_lower=float_down(tail_lo),
        tail_upper=float_up(tail_hi),
    )


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

def _irrationality_caveat(theta: RealNumberInput) -> Optional[str]:
    irr = theta_is_irrational(theta)
    if irr is False:
        raise ThetaRational(
            f"theta {theta} is exactly rational; certified radii "
            "need irrational theta"
        )
    if irr is None:
        return "irrationality assumed: decimal input cannot certify it"
    return None


@dataclass(frozen=True)
class ApproximationCertificate:
    """Two-sided certificate at level n: every spectral point of the
    operator is within radius of the returned cloud and vice versa
    (normal mode), or the pseudospectrum sandwich radius (grid mode)."""

    theta: RealNumberInput
    spec: OperatorSpec
    level_n: int
    pair: tuple[tuple[int, int], tuple[int, int]]  # ((p_{n-1}, q_{n-1}), (p_n, q_n))
    epsilon_clean: float
    epsilon_sharp: float
    mode: str  # normal_hausdorff | pseudospectrum_sandwich
    caveat: Optional[str] = None

    @property
    def radius(self) -> float:
        return min(self.epsilon_sharp, self.epsilon_clean)

    @property
    def q_pair(self) -> tuple[int, int]:
        return self.pair[0][1], self.pair[1][1]

    def to_json(self, cloud: Optional[PointCloud] = None) -> dict:
        doc = {
            "theta": str(self.theta),
            "spec": self.spec.to_json(),
            "n": self.level_n,
            "q_pair": list(self.q_pair),
            "epsilon_sharp": self.epsilon_sharp,
            "epsilon_clean": self.epsilon_clean,
            "mode": self.mode,
        }
        if self.caveat:
            doc["caveat"] = self.caveat
        if cloud is not None:
            doc["cloud"] = [[z.real, z.imag] for z in cloud.points]
        return doc


def _build_pair(spec: OperatorSpec, expansion: ContinuedFractionExpansion,
                n: int) -> tuple[MatrixModel, MatrixModel]:
    models = []
    for k in (n - 1, n):
        p, q = expansion.convergent(k)
        models.append(build_operator(spec, p % q, q))  # v is q-periodic in p
    return models[0], models[1]


def certify_normal(theta: RealNumberInput, spec: OperatorSpec, n: int,
                   max_q: Optional[int] = None) -> tuple[PointCloud, ApproximationCertificate]:
    """sigma(h_{n-1}) union sigma(h_n) with the certified radius
    min(epsilon_sharp, epsilon_clean); models must be normal."""
    caveat = _irrationality_caveat(theta)
    if not spec.is_canonical:
        raise NonCanonicalSpec(
            "certified spectra need the canonical four-term form; "
            "general specs get grids with a rate flag via certify_pseudospectrum"
        )
    expansion = expand(theta, n + 1)
    _q_triple(expansion, n)
    if max_q is not None and expansion.q(n) > max_q:
        raise ResourceBudgetExceeded(
            f"level n={n} needs order q_n={expansion.q(n)} > budget {max_q}"
        )
    h_prev, h_curr = _build_pair(spec, expansion, n)
    if not spec.is_hermitian:
        if not (is_normal(h_prev.entries) and is_normal(h_curr.entries)):
            raise ModelsNotNormal(
                "models are not normal; use certify_pseudospectrum (Hausdorff "
                "control of the spectrum alone is not available here)"
            )
    cloud = union_spectrum(h_prev, h_curr)
    cert = ApproximationCertificate(
        theta=theta,
        spec=spec,
        level_n=n,
        pair=(expansion.convergent(n - 1), expansion.convergent(n)),
        epsilon_clean=clean_bound(spec, expansion, n),
        epsilon_sharp=sharp_bound(spec, expansion, n),
        mode="normal_hausdorff",
        caveat=caveat,
    )
    return cloud, cert


@dataclass(frozen=True)
class PseudospectrumSandwich:
    """Grid enclosure pair: the inner union of level-epsilon masks and
    the outer union at epsilon + 2*epsilon_n bracket the operator's
    (epsilon + epsilon_n)-pseudospectrum. For non-canonical specs no
    epsilon_n exists and only the rate flag is carried."""

    theta: RealNumberInput
    spec: OperatorSpec
    level_n: int
    q_pair: tuple[int, int]
    epsilon: float
    epsilon_n: Optional[float]
    epsilon_sharp: Optional[float]
    epsilon_clean: Optional[float]
    certified: bool
    rate: str
    grid_prev: PseudospectrumGrid
    grid_curr: PseudospectrumGrid
    inner_mask: np.ndarray
    outer_mask: Optional[np.ndarray]
    inclusion_verified: bool
    mode: str = "pseudospectrum_sandwich"
    caveat: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "theta": str(self.theta),
            "spec": self.spec.to_json(),
            "n": self.level_n,
            "q_pair": list(self.q_pair),
            "epsilon": self.epsilon,
            "epsilon_n": self.epsilon_n,
            "epsilon_sharp": self.epsilon_sharp,
            "epsilon_clean": self.epsilon_clean,
            "certified": self.certified,
            "rate": self.rate,
            "mode": self.mode,
            "caveat": self.caveat,
            "region": list(self.grid_prev.region),
            "resolution": list(self.grid_prev.resolution),
            "inner_count": int(self.inner_mask.sum()),
            "outer_count": int(self.outer_mask.sum()) if self.outer_mask is not None else None,
            "inclusion_verified": self.inclusion_verified,
            "grid_fingerprints": [
                self.grid_prev.matrix_fingerprint,
                self.grid_curr.matrix_fingerprint,
            ],
        }


def certify_pseudospectrum(theta: RealNumberInput, spec: OperatorSpec, n: int,
                           epsilon: float,
                           grid_params: Optional[GridParams] = None) -> PseudospectrumSandwich:
    """Grids for both convergent models plus the sandwich masks; the
    operator itself is never materialized."""
    if epsilon <= 0:
        raise InvalidInput(f"epsilon must be > 0, got {epsilon}")
    caveat = _irrationality_caveat(theta)
    expansion = expand(theta, n + 1)
    _q_triple(expansion, n)
    gp = grid_params or GridParams()

    if spec.is_canonical:
        eps_sharp = sharp_bound(spec, expansion, n)
        eps_clean = clean_bound(spec, expansion, n)
        eps_n: Optional[float] = min(eps_sharp, eps_clean)
        certified = True
    else:
        eps_sharp = eps_clean = eps_n = None
        certified = False

    h_prev, h_curr = _build_pair(spec, expansion, n)
    margin = epsilon + 2 * (eps_n or 0.0)
    region = gp.region or default_region(spec_norm_bound(spec), margin)
    levels = (epsilon,) if eps_n is None else (epsilon, epsilon + eps_n, epsilon + 2 * eps_n)
    grid_prev = compute_grid(h_prev, region, gp.resolution, gp.method, gp.jobs,
                             gp.seed).with_levels(levels)
    grid_curr = compute_grid(h_curr, region, gp.resolution, gp.method, gp.jobs,
                             gp.seed).with_levels(levels)

    inner = level_set(grid_prev, epsilon) | level_set(grid_curr, epsilon)
    if eps_n is not None:
        outer = level_set(grid_prev, epsilon + 2 * eps_n) | level_set(grid_curr, epsilon + 2 * eps_n)
        verified = bool(np.all(outer | ~inner))
    else:
        outer = None
        verified = True

    return PseudospectrumSandwich(
        theta=theta, spec=spec, level_n=n,
        q_pair=(expansion.q(n - 1), expansion.q(n)),
        epsilon=float(epsilon), epsilon_n=eps_n,
        epsilon_sharp=eps_sharp, epsilon_clean=eps_clean,
        certified=certified, rate=RATE_FLAG,
        grid_prev=grid_prev, grid_curr=grid_curr,
        inner_mask=inner, outer_mask=outer,
        inclusion_verified=verified, caveat=caveat,
    )


@dataclass(frozen=True)
class OneSidedCertificate:
    """sigma(h_{p/n}) lies within radius = C1/sqrt(n) of the operator's
    spectrum (containment one way only; no Hausdorff claim)."""

    theta: RealNumberInput
    spec: OperatorSpec
    denominator_n: int
    chosen_p: int
    radius: float
    wrapped: bool = False      # round(n*theta) = n, stored mod n
    tie_broken: bool = False   # decimal half-integer tie, broken to even
    caveat: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "theta": str(self.theta),
            "spec": self.spec.to_json(),
            "n": self.denominator_n,
            "p": self.chosen_p,
            "radius": self.radius,
            "wrapped": self.wrapped,
            "tie_broken": self.tie_broken,
            "caveat": self.caveat,
        }


OneSidedResult = Union[PointCloud, PseudospectrumGrid]


def one_sided(theta: RealNumberInput, spec: OperatorSpec, n: int,
              grid_params: Optional[GridParams] = None) -> tuple[OneSidedResult, OneSidedCertificate]:
    """Single model at denominator n with p = round(n*theta); returns its
    spectrum (normal case) or a sigma_min grid, plus the sqrt(n)-rate
    certificate."""
    if n < 1:
        raise InvalidInput(f"denominator must be >= 1, got {n}")
    caveat = _irrationality_caveat(theta)
    p_star, tie = round_nearest(theta, n)
    p = p_star % n
    # |theta - p*/n| <= 1/(2n) holds by the choice of p*; check it exactly
    lo, hi = theta_bounds(theta)
    mid = (lo + hi) / 2
    if abs(mid - Fraction(p_star, n)) > Fraction(1, 2 * n):
        raise CertificateViolation(
            f"rounded p*={p_star} violates |theta - p*/n| <= 1/(2n)"
        )
    radius = float_up(one_sided_constant_exact(spec) / sqrt_lower(n))

    model = build_operator(spec, p, n)
    result: OneSidedResult
    if spec.is_hermitian:
        result = PointCloud(hermitian_eigenvalues(model).values.astype(np.complex128),
                            label=f"sigma(h_{p}/{n})")
    elif is_normal(model.entries):
        result = PointCloud(normal_eigenvalues(model).values,
                            label=f"sigma(h_{p}/{n})")
    else:
        gp = grid_params or GridParams()
        region = gp.region or default_region(spec_norm_bound(spec), radius)
        result = compute_grid(model, region, gp.resolution, gp.method, gp.jobs, gp.seed)

    cert = OneSidedCertificate(
        theta=theta, spec=spec, denominator_n=n, chosen_p=p, radius=radius,
        wrapped=p != p_star, tie_broken=tie, caveat=caveat,
    )
    return result, cert


# ---------------------------------------------------------------------------
# parameter continuity
# ---------------------------------------------------------------------------

ThetaLike = Union[RealNumberInput, Fraction, int, float]


def _theta_like_bounds(x: ThetaLike) -> tuple[Fraction, Fraction]:
    if isinstance(x, (BigRational, QuadraticSurd, DecimalString)):
        return theta_bounds(x)
    v = Fraction(x)
    return v, v


def haagerup_rordam_bound(theta: ThetaLike, theta_prime: ThetaLike) -> float:
    """9*sqrt(6*pi*|theta - theta'|): the guaranteed displacement of each
    generator pair under a common representation."""
    (alo, ahi), (blo, bhi) = _theta_like_bounds(theta), _theta_like_bounds(theta_prime)
    for lo, hi in ((alo, ahi), (blo, bhi)):
        if (lo + hi) / 2 < 0 or (lo + hi) / 2 >= 1:
            raise InvalidInput("parameters must lie in [0,1)")
    delta_up = max(abs(alo - bhi), abs(ahi - blo))
    if delta_up == 0:
        return 0.0
    return float_up(9 * sqrt_upper(6 * PI_HI * delta_up))


def parameter_continuity_bound(spec: OperatorSpec, theta: ThetaLike,
                               theta_prime: ThetaLike) -> float:
    """Spectral-variation bound: each term U^j V^k moves by at most
    (|j| + |k|) generator displacements (telescoping with unitaries), so
    sum |c_jk| (|j|+|k|) times the displacement bound controls ||h - h'||.
    For the canonical form the weight is the plain coefficient-modulus sum."""
    hr = haagerup_rordam_bound(theta, theta_prime)
    weight = sum(_abs_upper(c) * (abs(j) + abs(k)) for j, k, c in spec.terms)
    return float_up(Fraction(hr) * weight)


# ---------------------------------------------------------------------------
# set geometry
# ---------------------------------------------------------------------------

def _directed(p: np.ndarray, q: np.ndarray) -> float:
    dist = np.abs(p[:, None] - q[None, :])
    return float(np.max(np.min(dist, axis=1)))


def hausdorff_distance(P: PointCloud, Q: PointCloud) -> float:
    """max of the two directed max-min deviations, exact over the finite
    clouds."""
    if len(P) == 0 or len(Q) == 0:
        raise EmptyCloud("Hausdorff distance needs nonempty clouds")
    return max(_directed(P.points, Q.points), _directed(Q.points, P.points))


def one_sided_contains(P: PointCloud, Q: PointCloud, delta: float) -> bool:
    """True iff every point of P is strictly within delta of Q."""
    if delta <= 0:
        raise InvalidInput(f"delta must be > 0, got {delta}")
    if len(P) == 0 or len(Q) == 0:
        raise EmptyCloud("containment test needs nonempty clouds")
    return _directed(P.points, Q.points) < delta


def sharpness_floor(expansion: ContinuedFractionExpansion, n: int) -> float:
    """pi / (2*(q_{n-1} + q_n)), rounded down: at most q_{n-1} + q_n
    distinct points cover the unit circle, forcing a gap of at least this
    size (the shift-only model at golden theta realizes it)."""
    qm, qn, _ = _q_triple(expansion, n)
    return float_down(PI_LO / (2 * (qm + qn)))


# ---------------------------------------------------------------------------
# convergence ladder
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    q_prev: int
    q_n: int
    epsilon_sharp: float
    epsilon_clean: float
    empirical_dh: float
    certified_bound: float  # epsilon_sharp(n) + epsilon_sharp(n_max)

    @property
    def within_bound(self) -> bool:
        return self.empirical_dh <= self.certified_bound + 1e-8


@dataclass(frozen=True)
class ConvergenceTable:
    theta: RealNumberInput
    spec: OperatorSpec
    rows: tuple[ConvergenceRow, ...]
    reference_n: int

    @property
    def all_verified(self) -> bool:
        return all(r.within_bound for r in self.rows)

    def to_csv(self) -> str:
        lines = ["n,q_prev,q_n,epsilon_sharp,epsilon_clean,empirical_dH"]
        for r in self.rows:
            lines.append(
                f"{r.n},{r.q_prev},{r.q_n},{r.epsilon_sharp:.17g},"
                f"{r.epsilon_clean:.17g},{r.empirical_dh:.17g}"
            )
        return "\n".join(lines) + "\n"


def convergence_study(theta: RealNumberInput, spec: OperatorSpec,
                      n_range, max_q: int = 4096) -> ConvergenceTable:
    """Ladder of certificates with the deepest level as the reference
    proxy for the operator's spectrum: empirical_dH(n) compares cloud(n)
    against cloud(n_max) and must stay below epsilon_sharp(n) +
    epsilon_sharp(n_max) (triangle inequality through the true spectrum)."""
    levels = sorted(set(int(n) for n in n_range))
    if not levels:
        raise InvalidInput("empty level range")
    if levels[0] < 1:
        raise InvalidInput(f"levels must be >= 1, got {levels[0]}")
    n_max = levels[-1]
    expansion = expand(theta, n_max + 1)
    if expansion.q(n_max) > max_q:
        raise ResourceBudgetExceeded(
            f"deepest level n={n_max} needs q={expansion.q(n_max)} > budget {max_q}"
        )

    clouds: dict[int, PointCloud] = {}
    certs: dict[int, ApproximationCertificate] = {}
    for n in levels:
        clouds[n], certs[n] = certify_normal(theta, spec, n)
    ref_sharp = certs[n_max].epsilon_sharp
    rows = tuple(
        ConvergenceRow(
            n=n,
            q_prev=certs[n].q_pair[0],
            q_n=certs[n].q_pair[1],
            epsilon_sharp=certs[n].epsilon_sharp,
            epsilon_clean=certs[n].epsilon_clean,
            empirical_dh=hausdorff_distance(clouds[n], clouds[n_max]),
            certified_bound=certs[n].epsilon_sharp + ref_sharp,
        )
        for n in levels
    )
    return ConvergenceTable(theta=theta, spec=spec, rows=rows, reference_n=n_max)
