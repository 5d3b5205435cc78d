"""Grid evaluation, L^alpha norms, flatness metrics, Mahler measure.

Quadrature is the trapezoid rule on M equispaced circle points, which for
periodic integrands is spectrally accurate and exact for trigonometric
polynomials of degree < M.  In particular the grid mean of |P|^2 equals
the Parseval sum whenever M >= 2(deg P + 1), and the grid mean of |P|^4
equals the autocorrelation sum under the same oversampling.  For non-even
exponents |P|^alpha is only piecewise smooth near zeros of P, so grids
start at oversample*(deg+1) points and are doubled until the integral
stabilizes (relative 1e-9, capped at 2^22 points).

sup metrics report a refined lower bound of the true supremum (dense grid
plus golden-section ascent around the best sample); a certified two-sided
bound is deliberately out of scope.  All reductions use numpy's pairwise
summation, so results do not depend on thread count.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import poly_core
from .errors import CapabilityError, DegenerateInputError, ParameterError
from .poly_core import CirclePolynomial

DEFAULT_OVERSAMPLE = 8
MIN_OVERSAMPLE = 4
GRID_POINT_CAP = 2**22
QUAD_RTOL = 1e-9
ROOT_SOLVER_DEGREE_CAP = 512
LOG_CLIP = -50.0
DEFAULT_EPS_LADDER = (0.5, 0.2, 0.1, 0.05, 0.02, 0.01)

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class EvaluationGrid:
    """P evaluated at the M-th roots of unity: values[t] = P(e^{2 pi i t/M})."""

    M: int
    values: np.ndarray
    degree: int

    def __post_init__(self):
        self.values.setflags(write=False)

    @property
    def oversample(self) -> float:
        return self.M / (self.degree + 1)

    def abs_values(self) -> np.ndarray:
        return np.abs(self.values)


def _next_pow2(n: int) -> int:
    return 1 << max(0, (int(n) - 1)).bit_length()


def default_grid_size(degree: int, oversample: int = DEFAULT_OVERSAMPLE) -> int:
    if oversample < MIN_OVERSAMPLE:
        raise ParameterError(f"oversample must be >= {MIN_OVERSAMPLE}")
    return _next_pow2(max(oversample * (degree + 1), 2 * (degree + 1)))


def evaluate_on_grid(
    P: CirclePolynomial, M: int | None = None, oversample: int = DEFAULT_OVERSAMPLE
) -> EvaluationGrid:
    """Zero-padded inverse FFT of the coefficients; deterministic.

    M, when given, must be a power of two with M >= 2(deg P + 1).
    """
    d = P.degree
    if M is None:
        M = default_grid_size(d, oversample)
    else:
        M = int(M)
        if M & (M - 1) != 0:
            raise ParameterError(f"grid size {M} is not a power of two")
        if M < 2 * (d + 1):
            raise ParameterError(
                f"grid size {M} too small for degree {d}: need M >= {2 * (d + 1)}"
            )
    if M > GRID_POINT_CAP:
        raise CapabilityError(f"grid size {M} exceeds cap {GRID_POINT_CAP}")
    values = M * np.fft.ifft(P.coeffs, n=M)
    return EvaluationGrid(M=M, values=values, degree=d)


def _grid_mean_abs_pow(grid: EvaluationGrid, alpha: float) -> float:
    return float(np.mean(grid.abs_values() ** alpha))


def _refined_grid(P, stat, oversample=DEFAULT_OVERSAMPLE, rtol=QUAD_RTOL, cap=GRID_POINT_CAP):
    """Double the grid until stat(grid) stabilizes; returns (grid, value)."""
    grid = evaluate_on_grid(P, oversample=oversample)
    value = stat(grid)
    while grid.M < cap:
        bigger = evaluate_on_grid(P, grid.M * 2)
        new_value = stat(bigger)
        prev, grid, value = value, bigger, new_value
        if abs(new_value - prev) <= max(rtol * abs(new_value), 1e-14):
            break
    return grid, value


def lp_norm(
    P: CirclePolynomial,
    alpha: float,
    grid: EvaluationGrid | None = None,
    method: str = "auto",
    oversample: int = DEFAULT_OVERSAMPLE,
) -> float:
    """(mean over the circle of |P|^alpha)^(1/alpha).

    alpha = 2 bypasses the grid via Parseval and alpha = 4 can bypass it
    via the autocorrelation sum; both closed-form paths stay exposed for
    cross-checks against the grid path.  alpha = inf is the refined sup.
    Passing a grid pins the quadrature to it; otherwise even exponents
    get one sufficiently fine grid and other exponents get the doubling
    refinement.
    """
    if method not in ("auto", "grid", "parseval", "autocorrelation"):
        raise ParameterError(f"unknown lp_norm method {method!r}")
    if math.isinf(alpha):
        return sup_norm(P, grid)
    if not alpha > 0:
        raise ParameterError(f"alpha must be positive, got {alpha}")

    if method == "parseval" or (method == "auto" and alpha == 2):
        if alpha != 2:
            raise ParameterError("the Parseval path applies only at alpha = 2")
        return P.l2_norm()
    if method == "autocorrelation":
        if alpha != 4:
            raise ParameterError("the autocorrelation path applies only at alpha = 4")
        gamma = poly_core.autocorrelation(P)
        mags = np.abs(gamma) ** 2
        return float(mags[0] + 2.0 * np.sum(mags[1:])) ** 0.25

    if grid is None and method == "grid":
        grid = evaluate_on_grid(P, oversample=oversample)
    if grid is not None:
        return _grid_mean_abs_pow(grid, alpha) ** (1.0 / alpha)

    half = alpha / 2.0
    if half == int(half):
        # |P|^alpha is a trigonometric polynomial of degree (alpha/2) d:
        # one exact grid suffices.
        need = int(half) * P.degree + 1
        M = max(default_grid_size(P.degree, oversample), _next_pow2(need))
        return _grid_mean_abs_pow(evaluate_on_grid(P, M), alpha) ** (1.0 / alpha)
    _, mean = _refined_grid(P, lambda g: _grid_mean_abs_pow(g, alpha), oversample)
    return mean ** (1.0 / alpha)


def _golden_section_max(f, lo: float, hi: float, iters: int = 64) -> float:
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    best = max(fc, fd)
    for _ in range(iters):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
        best = max(best, fc, fd)
    return best


def _refine_peak(P: CirclePolynomial, fn, grid: EvaluationGrid) -> float:
    """Golden-section ascent of fn(|P(e^{i theta})|) around the best grid
    sample; the result is a certified lower bound of the true sup."""
    samples = fn(grid.abs_values())
    t_best = int(np.argmax(samples))
    coarse = float(samples[t_best])
    width = 2.0 * math.pi / grid.M
    center = 2.0 * math.pi * t_best / grid.M

    def objective(theta):
        return fn(abs(poly_core.evaluate(P, np.exp(1j * theta))))

    refined = _golden_section_max(objective, center - width, center + width)
    return max(coarse, float(refined))


def sup_norm(
    P: CirclePolynomial, grid: EvaluationGrid | None = None, refine: bool = True
) -> float:
    """Refined lower bound of sup |P| on the circle."""
    if grid is None:
        grid = evaluate_on_grid(P)
    if not refine:
        return float(np.max(grid.abs_values()))
    return _refine_peak(P, lambda x: x, grid)


@dataclass(frozen=True)
class FlatnessReport:
    """All flatness metrics of one polynomial at one alpha, computed on
    the l2-normalized polynomial."""

    alpha: float
    lp_ratio: float
    flatness_distance: float
    sup_deviation: float
    measure_deviation: dict
    mahler: float
    grid_M: int

    def measure_at(self, eps: float) -> float:
        return self.measure_deviation[eps]

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "lp_ratio": self.lp_ratio,
            "flatness_distance": self.flatness_distance,
            "sup_deviation": self.sup_deviation,
            "measure_deviation": {repr(k): v for k, v in self.measure_deviation.items()},
            "mahler": self.mahler,
            "grid_M": self.grid_M,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def csv_header(self) -> str:
        cols = ["alpha", "lp_ratio", "flatness_distance", "sup_deviation", "mahler", "grid_M"]
        cols += [f"measure_gt_{eps!r}" for eps in self.measure_deviation]
        return ",".join(cols)

    def to_csv_row(self) -> str:
        vals = [
            repr(self.alpha),
            repr(self.lp_ratio),
            repr(self.flatness_distance),
            repr(self.sup_deviation),
            repr(self.mahler),
            str(self.grid_M),
        ]
        vals += [repr(v) for v in self.measure_deviation.values()]
        return ",".join(vals)


def flatness_report(
    P: CirclePolynomial,
    alpha: float,
    eps_ladder=DEFAULT_EPS_LADDER,
    oversample: int = DEFAULT_OVERSAMPLE,
) -> FlatnessReport:
    """Norm ratio, integral flatness distance, sup deviation, deviation
    measure ladder and Mahler measure of P/||P||_2 on one shared grid.

    The grid is refined until the flatness distance integral stabilizes;
    its final size is recorded in the report.
    """
    if not alpha > 0:
        raise ParameterError(f"alpha must be positive, got {alpha}")
    if P.is_zero():
        raise DegenerateInputError("flatness metrics need a nonzero polynomial")
    tilde = P.normalized()

    def distance(g: EvaluationGrid) -> float:
        return float(np.mean(np.abs(g.abs_values() - 1.0) ** alpha))

    grid, flat_dist = _refined_grid(tilde, distance, oversample)
    lp_ratio = lp_norm(tilde, alpha, grid) if alpha != 2 else 1.0
    sup_dev = _refine_peak(tilde, lambda x: np.abs(x - 1.0), grid)
    deviations = np.abs(grid.abs_values() - 1.0)
    measure = {
        float(eps): float(np.count_nonzero(deviations > eps) / grid.M)
        for eps in eps_ladder
    }
    mahler = mahler_quadrature(tilde, grid)
    return FlatnessReport(
        alpha=float(alpha),
        lp_ratio=float(lp_ratio),
        flatness_distance=flat_dist,
        sup_deviation=sup_dev,
        measure_deviation=measure,
        mahler=mahler,
        grid_M=grid.M,
    )


def mahler_roots(P: CirclePolynomial, degree_cap: int = ROOT_SOLVER_DEGREE_CAP) -> float:
    """Mahler measure from the full root set: |lead| * prod max(1, |root|).

    Roots come from numpy's companion-matrix eigenvalue solver.  Degrees
    above degree_cap are refused; use mahler_quadrature there.
    """
    if P.is_zero():
        raise DegenerateInputError("Mahler measure of the zero polynomial is undefined")
    if P.degree > degree_cap:
        raise CapabilityError(
            f"degree {P.degree} above root-solver threshold {degree_cap}; "
            "use mahler_quadrature"
        )
    lead = abs(P.coeffs[-1])
    if P.degree == 0:
        return float(lead)
    roots = np.roots(P.coeffs[::-1])
    moduli = np.abs(roots)
    return float(lead * np.prod(np.maximum(1.0, moduli)))


@dataclass(frozen=True)
class MahlerQuadInfo:
    grid_M: int
    clip_count: int
    low_confidence: bool


def mahler_quadrature(
    P: CirclePolynomial,
    grid: EvaluationGrid | None = None,
    clip: float = LOG_CLIP,
    with_info: bool = False,
):
    """exp(mean of log|P| over the grid), log values clipped below at
    `clip` to guard near-zeros.  A clip fraction above 0.1% of the grid
    flags the result low-confidence (see with_info).  Without an explicit
    grid the quadrature is refined by doubling until stable."""
    if P.is_zero():
        raise DegenerateInputError("Mahler measure of the zero polynomial is undefined")

    def stat(g: EvaluationGrid) -> float:
        absv = g.abs_values()
        if not np.any(absv > 0):
            raise DegenerateInputError("all grid values vanish")
        with np.errstate(divide="ignore"):
            logs = np.log(absv)
        return float(np.mean(np.maximum(logs, clip)))

    if grid is None:
        grid, log_mean = _refined_grid(P, stat)
    else:
        log_mean = stat(grid)
    value = math.exp(log_mean)
    if not with_info:
        return value
    with np.errstate(divide="ignore"):
        logs = np.log(grid.abs_values())
    clip_count = int(np.count_nonzero(logs < clip))
    info = MahlerQuadInfo(
        grid_M=grid.M,
        clip_count=clip_count,
        low_confidence=clip_count > 0.001 * grid.M,
    )
    return value, info
