"""
Infinitesimal Calculus Procedures
Standard-part derivatives, Cauchy continuity and microcontinuity probes,
decimal-subdivision root finding and transfer spot-checks
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence

from core.backends import Backend, LeviCivitaBackend
from core.errors import (
    BTrackError,
    DivisionByZero,
    DomainError,
    NoSignChange,
    NonNumericValue,
    NotDifferentiable,
    NotFinite,
    NoTransfer,
    Undecided,
    UnsupportedBackend,
)
from core.expr import BinOp, Expr, evaluate, to_text
from core.numeric import DEFAULT_CONFIG, Classification, FieldConfig, Tag, format_rational, truncate_decimal

logger = logging.getLogger(__name__)

_UNDEFINED = (DomainError, DivisionByZero, NotFinite)

# ============================================================================
# DERIVATIVES
# ============================================================================

@dataclass
class DerivativeProbe:
    """One differential ratio dy/dx with its standard part"""

    dx: str
    ratio_class: Classification
    st: Fraction


@dataclass
class DerivativeReport:
    value: Fraction
    exact: bool
    probes: List[DerivativeProbe]
    tolerance: Fraction


def _at(f: Expr, x, backend: Backend):
    return evaluate(f, {"x": x}, backend.config)


def derivative(f: Expr, x0: Fraction, backend: Backend) -> DerivativeReport:
    """
    st(dy/dx) for every infinitesimal probe dx of the backend

    The standard parts must agree within the backend's tolerance; an infinite
    ratio or a disagreement is NotDifferentiable.
    """
    point = backend.embed(x0)
    fx0 = _at(f, point, backend)
    probes: List[DerivativeProbe] = []
    exact = True
    for label, dx in backend.derivative_probes():
        ratio = (_at(f, point + dx, backend) - fx0) / dx
        ratio_class = backend.classify(ratio)
        if ratio_class.tag is Tag.INFINITE:
            raise NotDifferentiable(f"{to_text(f)} at {format_rational(x0)}: ratio for dx={label} is infinite")
        standard = backend.standard_value(ratio)
        exact = exact and standard.exact
        probes.append(DerivativeProbe(label, ratio_class, standard.value))

    tolerance = backend.agreement_tolerance()
    values = [p.st for p in probes]
    if max(values) - min(values) > tolerance:
        spread = ", ".join(f"dx={p.dx}: {format_rational(p.st)}" for p in probes)
        raise NotDifferentiable(f"{to_text(f)} at {format_rational(x0)}: standard parts differ ({spread})")
    logger.info(f"📐 d/dx {to_text(f)} at {format_rational(x0)} = {format_rational(values[0])}")
    return DerivativeReport(values[0], exact, probes, tolerance)


def second_derivative(f: Expr, x0: Fraction, backend: Backend) -> DerivativeReport:
    """st((f(x0+dx) - 2 f(x0) + f(x0-dx)) / dx^2) over the positive probes"""
    point = backend.embed(x0)
    fx0 = _at(f, point, backend)
    probes: List[DerivativeProbe] = []
    exact = True
    for label, dx in backend.derivative_probes():
        if label.startswith("-"):
            continue
        ratio = (_at(f, point + dx, backend) - 2 * fx0 + _at(f, point - dx, backend)) / (dx * dx)
        ratio_class = backend.classify(ratio)
        if ratio_class.tag is Tag.INFINITE:
            raise NotDifferentiable(f"second difference ratio of {to_text(f)} for dx={label} is infinite")
        standard = backend.standard_value(ratio)
        exact = exact and standard.exact
        probes.append(DerivativeProbe(label, ratio_class, standard.value))
    tolerance = backend.agreement_tolerance()
    values = [p.st for p in probes]
    if max(values) - min(values) > tolerance:
        raise NotDifferentiable(f"second difference ratios of {to_text(f)} disagree")
    return DerivativeReport(values[0], exact, probes, tolerance)


# ============================================================================
# CONTINUITY
# ============================================================================

PASS = "PassToOrder"
FAIL = "Fail"
UNDECIDED = "Undecided"


@dataclass
class IncrementProbe:
    point: str
    alpha: str
    increment_class: Optional[Classification]
    increment_st: Optional[Fraction] = None
    note: str = ""


@dataclass
class ContinuityReport:
    point: str
    probes: List[IncrementProbe]
    verdict: str
    mode: str = "increment"
    witness: Optional[IncrementProbe] = None


def _increment_probe(backend: Backend, point_label: str, alpha_label: str, increment) -> IncrementProbe:
    try:
        increment_class = backend.classify(increment)
    except Undecided as exc:
        return IncrementProbe(point_label, alpha_label, None, note=f"Undecided: {exc.message}")
    increment_st = None
    if increment_class.tag is not Tag.INFINITE:
        try:
            increment_st = backend.standard_value(increment).value
        except (Undecided, NotFinite):
            increment_st = None
    return IncrementProbe(point_label, alpha_label, increment_class, increment_st)


def _verdict(probes: List[IncrementProbe]) -> str:
    """Fail needs a non-infinitesimal increment; an unresolved probe blocks a pass"""
    measured = [p for p in probes if p.increment_class is not None]
    if any(not p.increment_class.is_negligible for p in measured):
        return FAIL
    if any(p.note.startswith("Undecided") for p in probes):
        return UNDECIDED
    return PASS


def continuity_at(f: Expr, x0: Fraction, backend: Backend) -> ContinuityReport:
    """
    Cauchy continuity at a standard point

    Every probe increment f(x0+alpha) - f(x0) must be infinitesimal. When f has
    no value at x0 but is finite at every probe, the mirrored increment
    f(x0+alpha) - f(x0-alpha) is tested instead: an appreciable one is a jump.
    """
    point = backend.embed(x0)
    label = format_rational(x0)
    try:
        fx0 = _at(f, point, backend)
    except _UNDEFINED as exc:
        return _mirrored_continuity(f, x0, backend, exc)

    probes: List[IncrementProbe] = []
    for alpha_label, alpha in backend.continuity_probes():
        try:
            increment = _at(f, point + alpha, backend) - fx0
        except _UNDEFINED as exc:
            probes.append(IncrementProbe(label, alpha_label, None, note=f"outside domain: {exc.name}"))
            continue
        probes.append(_increment_probe(backend, label, alpha_label, increment))
    if all(p.increment_class is None and not p.note.startswith("Undecided") for p in probes):
        raise DomainError(f"{to_text(f)} is undefined on every probe around {label}")
    verdict = _verdict(probes)
    witness = next((p for p in probes if p.increment_class and not p.increment_class.is_negligible), None)
    logger.info(f"🔎 continuity of {to_text(f)} at {label}: {verdict}")
    return ContinuityReport(label, probes, verdict, "increment", witness)


def _mirrored_continuity(f: Expr, x0: Fraction, backend: Backend, cause: BTrackError) -> ContinuityReport:
    point = backend.embed(x0)
    label = format_rational(x0)
    probes: List[IncrementProbe] = []
    for alpha_label, alpha in backend.continuity_probes():
        try:
            right = _at(f, point + alpha, backend)
            left = _at(f, point - alpha, backend)
            finite = backend.classify(right).is_finite and backend.classify(left).is_finite
        except _UNDEFINED + (Undecided,) as exc:
            raise DomainError(f"{to_text(f)} is undefined at {label} ({cause.message})") from exc
        if not finite:
            raise DomainError(f"{to_text(f)} is undefined at {label} and unbounded next to it")
        probes.append(_increment_probe(backend, label, f"{alpha_label} (mirrored)", right - left))
    verdict = _verdict(probes)
    witness = next((p for p in probes if p.increment_class and not p.increment_class.is_negligible), None)
    return ContinuityReport(label, probes, verdict, "mirrored", witness)


def uniform_continuity_probe(f: Expr, a: Fraction, b: Fraction, backend: Backend) -> ContinuityReport:
    """
    Microcontinuity on (a, b) at hyperpoints next to both ends and on a grid

    The near-edge points a+eps and b-eps are perturbed by eps^2, -eps^2 and
    eps^3; the standard grid points a + (b-a)*i/4 by eps, -eps and eps^2.
    """
    if not isinstance(backend, LeviCivitaBackend):
        raise UnsupportedBackend("uniform continuity probes need hyperpoints of the Levi-Civita backend")
    if a >= b:
        raise DomainError(f"empty interval ({format_rational(a)}, {format_rational(b)})")

    eps = backend.eps()
    near = [("eps^2", backend.eps(2)), ("-eps^2", -backend.eps(2)), ("eps^3", backend.eps(3))]
    standard = [("eps", eps), ("-eps", -eps), ("eps^2", backend.eps(2))]
    points = [(f"{format_rational(a)}+eps", backend.embed(a) + eps, near)]
    for i in range(1, 4):
        grid = a + (b - a) * Fraction(i, 4)
        points.append((format_rational(grid), backend.embed(grid), standard))
    points.append((f"{format_rational(b)}-eps", backend.embed(b) - eps, near))

    probes: List[IncrementProbe] = []
    for point_label, point, alphas in points:
        try:
            base = _at(f, point, backend)
        except _UNDEFINED as exc:
            raise DomainError(f"{to_text(f)} is undefined at the hyperpoint {point_label}") from exc
        for alpha_label, alpha in alphas:
            try:
                increment = _at(f, point + alpha, backend) - base
            except _UNDEFINED as exc:
                probes.append(IncrementProbe(point_label, alpha_label, None, note=f"outside domain: {exc.name}"))
                continue
            probes.append(_increment_probe(backend, point_label, alpha_label, increment))
    verdict = _verdict(probes)
    witness = next((p for p in probes if p.increment_class and not p.increment_class.is_negligible), None)
    logger.info(f"🔎 uniform continuity of {to_text(f)} on ({format_rational(a)}, {format_rational(b)}): {verdict}")
    return ContinuityReport(f"({format_rational(a)}, {format_rational(b)})", probes, verdict, "hyperpoint", witness)


# ============================================================================
# INTERMEDIATE VALUES BY DECIMAL SUBDIVISION
# ============================================================================

@dataclass
class IVTResult:
    decimal: str
    exact_hit: bool
    left: Fraction
    right: Fraction
    rounds: int


def _rational_value(f: Expr, x: Fraction, config: FieldConfig) -> Fraction:
    try:
        value = evaluate(f, {"x": x}, config)
    except _UNDEFINED as exc:
        raise NonNumericValue(f"{to_text(f)} has no value at {format_rational(x)}: {exc.message}") from exc
    if not isinstance(value, Fraction):
        raise NonNumericValue(f"{to_text(f)} at {format_rational(x)} is not a rational value")
    return value


def ivt_root(f: Expr, a: Fraction, b: Fraction, digits: int, config: FieldConfig = DEFAULT_CONFIG) -> IVTResult:
    """
    Decimal digits of a zero of f in [a, b] by repeated 10-part subdivision

    Each round keeps the leftmost subinterval [c, d] with f(c)*f(d) <= 0. A
    zero found at d is reported only when no sign change shows up to its left
    in the remaining rounds. Returns the left endpoint truncated to `digits`
    decimals, or that exact zero.
    """
    if digits < 1:
        raise DomainError("digits must be positive")
    if a >= b:
        raise DomainError(f"empty interval [{format_rational(a)}, {format_rational(b)}]")
    lc = LeviCivitaBackend(config)
    for x in (a, b, (a + b) / 2):
        report = continuity_at(f, x, lc)
        if report.verdict == FAIL:
            raise DomainError(f"{to_text(f)} is not continuous at {format_rational(x)}")

    fa, fb = _rational_value(f, a, config), _rational_value(f, b, config)
    if fa == 0:
        return IVTResult(truncate_decimal(a, digits), True, a, a, 0)
    if fa * fb > 0:
        raise NoSignChange(f"f({format_rational(a)}) and f({format_rational(b)}) have the same sign")

    # hi is an exact zero while no sign change has been seen left of it
    zero_at_hi = fb == 0
    lo, hi = a, b
    for _ in range(digits):
        step = (hi - lo) / 10
        grid = [lo + step * i for i in range(11)]
        values = [_rational_value(f, c, config) for c in grid]
        i = next(i for i in range(10) if values[i] * values[i + 1] <= 0)
        lo, hi = grid[i], grid[i + 1]
        zero_at_hi = values[i + 1] == 0
    if zero_at_hi:
        logger.info(f"🎯 exact zero of {to_text(f)} at {format_rational(hi)}")
        return IVTResult(truncate_decimal(hi, digits), True, hi, hi, digits)
    return IVTResult(truncate_decimal(lo, digits), False, lo, hi, digits)


# ============================================================================
# TRANSFER SPOT-CHECKS
# ============================================================================

TRANSFER_PASS = "Pass"
TRANSFER_FAIL = "Fail"
TRANSFER_NO_TRANSFER = "NoTransfer"
TRANSFER_ERROR = "Error"


@dataclass
class TransferPoint:
    point: str
    magnitude: Optional[Fraction] = None
    outcome: str = TRANSFER_PASS
    error: Optional[str] = None
    message: str = ""


@dataclass
class TransferReport:
    identity: str
    points: List[TransferPoint]
    verdict: str
    threshold: Fraction = field(default_factory=lambda: DEFAULT_CONFIG.noise_floor)


def transfer_check(lhs: Expr, rhs: Expr, backend: Backend, sample_points: Optional[Sequence[str]] = None) -> TransferReport:
    """
    Evaluate lhs - rhs at each sample point of the backend

    Pass when every residual's largest coefficient (or sampled term) is below
    10^-(working_precision - guard_digits). Backend errors are findings
    recorded per point.
    """
    difference = BinOp("-", lhs, rhs)
    threshold = backend.config.noise_floor
    points: List[TransferPoint] = []
    for text in sample_points or backend.default_transfer_points():
        try:
            value = _at(difference, backend.parse_point(text), backend)
            magnitude = backend.magnitude(value)
            outcome = TRANSFER_PASS if magnitude < threshold else TRANSFER_FAIL
            points.append(TransferPoint(text, magnitude, outcome))
        except NoTransfer as exc:
            points.append(TransferPoint(text, None, TRANSFER_NO_TRANSFER, exc.name, exc.message))
        except BTrackError as exc:
            points.append(TransferPoint(text, None, TRANSFER_ERROR, exc.name, exc.message))

    outcomes = {p.outcome for p in points}
    for verdict in (TRANSFER_NO_TRANSFER, TRANSFER_ERROR, TRANSFER_FAIL):
        if verdict in outcomes:
            break
    else:
        verdict = TRANSFER_PASS
    logger.info(f"🔁 transfer {to_text(lhs)} = {to_text(rhs)} on {backend.name}: {verdict}")
    return TransferReport(f"{to_text(lhs)} = {to_text(rhs)}", points, verdict, threshold)
