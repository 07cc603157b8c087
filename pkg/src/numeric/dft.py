"""Coefficient extraction from products of affine factors.

The normalizing constants of the mixed system need the coefficients c_b of

    f(z) = prod_j (constant_j + slope_j * z)

where each factor belongs to one persistent user. f is evaluated at the
roots of unity in scaled arithmetic and the coefficients are recovered with
an inverse discrete Fourier transform.
"""

import math
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Union

import numpy as np
import structlog

from src.common.exceptions import ConditioningError, InvalidParameterError, OracleScopeError
from src.model.scenario import PersistentUser
from .scaled import ScaledComplex, ScaledVector

logger = structlog.get_logger(__name__)

IMAG_REL_TOL = 1e-9
IMAG_ABS_TOL = 1e-12
ACCEPTANCE_WINDOW = 1e-3
CONVOLUTION_LIMIT = 64


@dataclass(frozen=True)
class AffineFactor:
    """One factor ``constant + slope * z`` of the generating polynomial."""

    constant: float
    slope: float

    def __post_init__(self):
        """Validate factor coefficients."""
        object.__setattr__(self, "constant", float(self.constant))
        object.__setattr__(self, "slope", float(self.slope))
        if not (math.isfinite(self.constant) and self.constant > 0):
            raise InvalidParameterError(f"factor constant must be positive, got {self.constant}")
        if not (math.isfinite(self.slope) and self.slope >= 0):
            raise InvalidParameterError(f"factor slope must be non-negative, got {self.slope}")

    @classmethod
    def for_user(cls, user: PersistentUser) -> "AffineFactor":
        """Factor 1 + alpha/beta + z * alpha*u/(beta*v) of a persistent user."""
        return cls(1.0 + user.wait_ratio, user.transmit_ratio)


def factors_for(users: Iterable[PersistentUser]) -> List[AffineFactor]:
    """Affine factors of a list of persistent users."""
    return [AffineFactor.for_user(user) for user in users]


def _as_factors(factors: Sequence[Union[AffineFactor, tuple]]) -> List[AffineFactor]:
    return [f if isinstance(f, AffineFactor) else AffineFactor(*f) for f in factors]


def evaluate_at_roots(
    factors: Sequence[AffineFactor],
    points: int,
    radius: float = 1.0,
) -> ScaledVector:
    """Evaluate the factor product at ``radius * exp(-2*pi*i*t/points)``.

    Args:
        factors: Affine factors (tuples of (constant, slope) are accepted)
        points: Number of evaluation points P >= 1
        radius: Radius of the evaluation circle

    Returns:
        ScaledVector: Entry t is prod_j (constant_j + slope_j * radius * w^t)
    """
    if isinstance(points, bool) or not isinstance(points, (int, np.integer)) or points < 1:
        raise InvalidParameterError(f"point count must be a positive integer, got {points!r}")
    if not (math.isfinite(radius) and radius > 0):
        raise InvalidParameterError(f"radius must be positive, got {radius}")

    roots = np.exp(-2j * np.pi * np.arange(points) / points)
    mantissa = np.ones(points, dtype=np.complex128)
    exponent = np.zeros(points, dtype=np.int64)
    for factor in _as_factors(factors):
        mantissa = mantissa * (factor.constant + (factor.slope * radius) * roots)
        _, shift = np.frexp(np.abs(mantissa))
        mantissa = mantissa * np.exp2(-shift.astype(np.float64))
        exponent += shift
    return ScaledVector(mantissa, exponent)


def inverse_dft_scaled(
    values: Union[ScaledVector, Sequence[ScaledComplex]],
    wanted: int,
    imag_rel_tol: float = IMAG_REL_TOL,
    imag_abs_tol: float = IMAG_ABS_TOL,
) -> ScaledVector:
    """Inverse DFT of scaled samples, returning real scaled coefficients.

    Args:
        values: Samples of a polynomial of degree < P at the P-th roots of unity
        wanted: Number of leading coefficients to return (<= P)
        imag_rel_tol: Allowed |Im| relative to |Re| of the same coefficient
        imag_abs_tol: Allowed |Im| relative to the largest coefficient

    Returns:
        ScaledVector: Real, non-negative coefficients 0..wanted-1

    Raises:
        ConditioningError: If an imaginary part or a negative real part is
            not negligible
    """
    if not isinstance(values, ScaledVector):
        values = ScaledVector.from_scalars(values)
    points = len(values)
    if not 0 <= wanted <= points:
        raise InvalidParameterError(f"wanted must be in 0..{points}, got {wanted}")

    aligned, top = values.aligned()
    coefficients = np.fft.ifft(aligned)
    peak = float(np.max(np.abs(coefficients))) if points else 0.0
    head = coefficients[:wanted]
    floor = imag_abs_tol * peak

    residue = np.abs(head.imag)
    bad = residue > imag_rel_tol * np.abs(head.real) + floor
    if np.any(bad):
        b = int(np.flatnonzero(bad)[0])
        raise ConditioningError(
            f"imaginary residue {residue[b]:.3e} at coefficient {b} exceeds tolerance"
        )
    real = head.real.copy()
    if np.any(real < -floor):
        b = int(np.flatnonzero(real < -floor)[0])
        raise ConditioningError(f"negative coefficient {real[b]:.3e} at index {b}")
    real[real < 0] = 0.0
    return ScaledVector(real, np.full(wanted, top, dtype=np.int64))


def inverse_dft_coefficients(
    values: Union[ScaledVector, Sequence[ScaledComplex]],
    wanted: int,
    imag_rel_tol: float = IMAG_REL_TOL,
    imag_abs_tol: float = IMAG_ABS_TOL,
) -> List[float]:
    """Plain-float variant of :func:`inverse_dft_scaled`."""
    scaled = inverse_dft_scaled(values, wanted, imag_rel_tol=imag_rel_tol, imag_abs_tol=imag_abs_tol)
    return [float(v) for v in scaled.to_array()]


def convolution_expand(
    factors: Sequence[AffineFactor],
    limit: int = CONVOLUTION_LIMIT,
) -> ScaledVector:
    """Expand the factor product by repeated convolution.

    Independent of the transform path and used to check it.

    Args:
        factors: Affine factors
        limit: Maximum number of factors

    Returns:
        ScaledVector: All len(factors)+1 coefficients

    Raises:
        OracleScopeError: If there are more than ``limit`` factors
    """
    factors = _as_factors(factors)
    if len(factors) > limit:
        raise OracleScopeError("convolution factor count", len(factors), limit)
    coefficients = ScaledVector(np.ones(1))
    for factor in factors:
        zero = ScaledVector(np.zeros(1))
        kept = ScaledVector(
            np.concatenate([coefficients.mantissa * factor.constant, zero.mantissa]),
            np.concatenate([coefficients.exponent, zero.exponent]),
        )
        shifted = ScaledVector(
            np.concatenate([zero.mantissa, coefficients.mantissa * factor.slope]),
            np.concatenate([zero.exponent, coefficients.exponent]),
        )
        coefficients = kept + shifted
    return coefficients


def _expected_transmitters(log_radius: float, log_ratio: np.ndarray) -> float:
    # r t / (1 + r t) written with tanh so extreme ratios do not overflow
    return float(np.sum(0.5 * (1.0 + np.tanh(0.5 * (log_radius + log_ratio)))))


def balanced_radius(factors: Sequence[AffineFactor], target: float) -> float:
    """Radius at which the expected transmitter count equals ``target``.

    At radius r the scaled coefficients c_b r^b are proportional to the
    distribution of the number of factors "on" when factor j is on with
    probability r t_j / (1 + r t_j), t_j = slope_j / constant_j. Choosing
    the mean of that distribution makes c_b r^b the dominant coefficient.
    """
    ratios = np.array([f.slope / f.constant for f in factors if f.slope > 0])
    if ratios.size == 0:
        return 1.0
    log_ratio = np.log(ratios)
    target = min(max(target, 0.25), ratios.size - 0.25)
    lo = float(-log_ratio.max()) - 40.0
    hi = float(-log_ratio.min()) + 40.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _expected_transmitters(mid, log_ratio) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12:
            break
    return math.exp(0.5 * (lo + hi))


def extract_coefficients(
    factors: Sequence[AffineFactor],
    wanted: int,
    imag_rel_tol: float = IMAG_REL_TOL,
    imag_abs_tol: float = IMAG_ABS_TOL,
    acceptance_window: float = ACCEPTANCE_WINDOW,
) -> ScaledVector:
    """Recover c_0..c_{wanted-1} with per-coefficient relative accuracy.

    A single transform on the unit circle only resolves coefficients within
    about 1e-12 of the largest one. Each pass here picks the radius at which
    the smallest unresolved index dominates, transforms on len(factors)+1
    points, and accepts every coefficient within ``acceptance_window`` of
    that pass's peak.

    Args:
        factors: Affine factors
        wanted: Number of leading coefficients, at most len(factors)+1

    Returns:
        ScaledVector: Real coefficients c_0..c_{wanted-1}
    """
    factors = _as_factors(factors)
    points = len(factors) + 1
    if not 0 <= wanted <= points:
        raise InvalidParameterError(f"wanted must be in 0..{points}, got {wanted}")

    mantissa = np.zeros(wanted)
    exponent = np.zeros(wanted, dtype=np.int64)
    done = np.zeros(wanted, dtype=bool)
    passes = 0
    while not done.all():
        b = int(np.flatnonzero(~done)[0])
        target = b if 0 < b < points - 1 else (0.25 if b == 0 else points - 1.25)
        radius = balanced_radius(factors, target)
        values = evaluate_at_roots(factors, points, radius=radius)
        scaled = inverse_dft_scaled(values, points, imag_rel_tol=imag_rel_tol, imag_abs_tol=imag_abs_tol)
        aligned, _ = scaled.aligned()
        peak = float(aligned.max())
        accept = (aligned[:wanted] >= acceptance_window * peak) & ~done
        accept[b] = True

        step = ScaledComplex.of(radius)
        for index in np.flatnonzero(accept):
            value = scaled[int(index)] / (step ** int(index))
            mantissa[index] = value.mantissa.real
            exponent[index] = value.exponent
        done |= accept
        passes += 1

    logger.debug("coefficients_extracted", factors=len(factors), wanted=wanted, passes=passes)
    return ScaledVector(mantissa, exponent)
