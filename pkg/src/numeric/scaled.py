"""Overflow-safe scaled arithmetic.

A scaled number stores a mantissa and a separate power-of-two exponent so
that long products of user parameter ratios and factorial-like terms never
leave the double range. ``ScaledComplex`` is the scalar type and
``ScaledVector`` its numpy-backed array counterpart.
"""

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Tuple, Union

import numpy as np

from src.common.exceptions import ConditioningError

Number = Union[int, float, complex]

# Exponent gaps beyond this make the smaller operand vanish in a sum.
_NEGLIGIBLE_GAP = 1100


def _normalize(mantissa: complex, exponent: int) -> Tuple[complex, int]:
    if mantissa == 0:
        return 0j, 0
    if not (math.isfinite(mantissa.real) and math.isfinite(mantissa.imag)):
        raise ConditioningError(f"non-finite mantissa {mantissa!r}")
    _, shift = math.frexp(abs(mantissa))
    scaled = complex(math.ldexp(mantissa.real, -shift), math.ldexp(mantissa.imag, -shift))
    return scaled, exponent + shift


@dataclass(frozen=True)
class ScaledComplex:
    """Complex value ``mantissa * 2**exponent``.

    The mantissa is kept with magnitude in [0.5, 1) after every operation;
    zero is stored as mantissa 0, exponent 0.
    """

    mantissa: complex = 0j
    exponent: int = 0

    def __post_init__(self):
        mantissa, exponent = _normalize(complex(self.mantissa), int(self.exponent))
        object.__setattr__(self, "mantissa", mantissa)
        object.__setattr__(self, "exponent", exponent)

    @classmethod
    def of(cls, value: Union["ScaledComplex", Number]) -> "ScaledComplex":
        """Wrap a plain number (scaled values pass through)."""
        if isinstance(value, ScaledComplex):
            return value
        return cls(complex(value), 0)

    @classmethod
    def one(cls) -> "ScaledComplex":
        return cls(1.0, 0)

    @classmethod
    def zero(cls) -> "ScaledComplex":
        return cls(0j, 0)

    def is_zero(self) -> bool:
        return self.mantissa == 0

    @property
    def real(self) -> "ScaledComplex":
        return ScaledComplex(self.mantissa.real, self.exponent)

    @property
    def imag(self) -> "ScaledComplex":
        return ScaledComplex(self.mantissa.imag, self.exponent)

    def conjugate(self) -> "ScaledComplex":
        return ScaledComplex(self.mantissa.conjugate(), self.exponent)

    def __mul__(self, other: Union["ScaledComplex", Number]) -> "ScaledComplex":
        other = ScaledComplex.of(other)
        return ScaledComplex(self.mantissa * other.mantissa, self.exponent + other.exponent)

    __rmul__ = __mul__

    def __truediv__(self, other: Union["ScaledComplex", Number]) -> "ScaledComplex":
        other = ScaledComplex.of(other)
        if other.is_zero():
            raise ZeroDivisionError("division by a scaled zero")
        return ScaledComplex(self.mantissa / other.mantissa, self.exponent - other.exponent)

    def __rtruediv__(self, other: Number) -> "ScaledComplex":
        return ScaledComplex.of(other) / self

    def __add__(self, other: Union["ScaledComplex", Number]) -> "ScaledComplex":
        other = ScaledComplex.of(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        big, small = (self, other) if self.exponent >= other.exponent else (other, self)
        gap = big.exponent - small.exponent
        if gap > _NEGLIGIBLE_GAP:
            return big
        aligned = complex(
            math.ldexp(small.mantissa.real, -gap), math.ldexp(small.mantissa.imag, -gap)
        )
        return ScaledComplex(big.mantissa + aligned, big.exponent)

    __radd__ = __add__

    def __neg__(self) -> "ScaledComplex":
        return ScaledComplex(-self.mantissa, self.exponent)

    def __sub__(self, other: Union["ScaledComplex", Number]) -> "ScaledComplex":
        return self + (-ScaledComplex.of(other))

    def __rsub__(self, other: Number) -> "ScaledComplex":
        return ScaledComplex.of(other) - self

    def __pow__(self, power: int) -> "ScaledComplex":
        """Integer power by repeated squaring with renormalization."""
        if not isinstance(power, (int, np.integer)):
            raise TypeError("only integer powers are supported")
        if power < 0:
            return ScaledComplex.one() / (self ** (-power))
        result = ScaledComplex.one()
        base = self
        while power:
            if power & 1:
                result = result * base
            base = base * base
            power >>= 1
        return result

    def __abs__(self) -> float:
        return float(abs(self.to_complex()))

    def magnitude(self) -> "ScaledComplex":
        """|value| as a scaled real."""
        return ScaledComplex(abs(self.mantissa), self.exponent)

    def log10(self) -> float:
        """Decimal logarithm of |value| (-inf for zero)."""
        if self.is_zero():
            return float("-inf")
        return math.log10(abs(self.mantissa)) + self.exponent * math.log10(2.0)

    def to_complex(self, strict: bool = True) -> complex:
        """Convert to a plain complex number.

        Args:
            strict: Raise instead of returning an infinite value on overflow

        Raises:
            ConditioningError: If the value does not fit a double and strict is set
        """
        try:
            return complex(
                math.ldexp(self.mantissa.real, self.exponent),
                math.ldexp(self.mantissa.imag, self.exponent),
            )
        except OverflowError:
            if strict:
                raise ConditioningError(f"value 2^{self.exponent} exceeds double range")
            return complex(math.copysign(math.inf, self.mantissa.real) if self.mantissa.real else 0.0,
                           math.copysign(math.inf, self.mantissa.imag) if self.mantissa.imag else 0.0)

    def to_float(self, strict: bool = True) -> float:
        """Real part as a plain float."""
        return self.to_complex(strict=strict).real

    def __float__(self) -> float:
        return self.to_float()

    def __complex__(self) -> complex:
        return self.to_complex()

    def __repr__(self) -> str:
        return f"ScaledComplex({self.mantissa!r}, {self.exponent})"


def _ldexp(mantissa: np.ndarray, exponent: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore", under="ignore"):
        if np.iscomplexobj(mantissa):
            return np.ldexp(mantissa.real, exponent) + 1j * np.ldexp(mantissa.imag, exponent)
        return np.ldexp(mantissa, exponent)


class ScaledVector:
    """Array of scaled values with per-entry exponents.

    Attributes:
        mantissa: float64 or complex128 array, |entry| in [0.5, 1) or zero
        exponent: int64 array of powers of two
    """

    __slots__ = ("mantissa", "exponent")

    def __init__(self, mantissa: Union[np.ndarray, Sequence[Number]], exponent=None):
        mantissa = np.asarray(mantissa)
        if mantissa.dtype.kind not in "fc":
            mantissa = mantissa.astype(np.float64)
        if exponent is None:
            exponent = np.zeros(mantissa.shape, dtype=np.int64)
        else:
            exponent = np.broadcast_to(np.asarray(exponent, dtype=np.int64), mantissa.shape)
        if not np.all(np.isfinite(mantissa)):
            raise ConditioningError("non-finite entry in scaled vector")
        _, shift = np.frexp(np.abs(mantissa))
        shift = shift.astype(np.int64)
        self.mantissa = _ldexp(mantissa, -shift)
        self.exponent = np.where(mantissa == 0, 0, exponent + shift).astype(np.int64)

    @classmethod
    def from_scalars(cls, values: Iterable[Union[ScaledComplex, Number]]) -> "ScaledVector":
        """Pack scalars (plain or scaled) into a vector."""
        items = [ScaledComplex.of(v) for v in values]
        mantissa = np.array([v.mantissa for v in items], dtype=np.complex128)
        exponent = np.array([v.exponent for v in items], dtype=np.int64)
        return cls(mantissa, exponent)

    @classmethod
    def cumulative_product(cls, ratios: Sequence[float], start: float = 1.0) -> "ScaledVector":
        """Entries start, start*r0, start*r0*r1, ... (len(ratios)+1 entries)."""
        current = ScaledComplex.of(start)
        mantissa = [current.mantissa.real]
        exponent = [current.exponent]
        for ratio in ratios:
            current = current * float(ratio)
            mantissa.append(current.mantissa.real)
            exponent.append(current.exponent)
        return cls(np.array(mantissa, dtype=np.float64), np.array(exponent, dtype=np.int64))

    def __len__(self) -> int:
        return len(self.mantissa)

    def __getitem__(self, index):
        if isinstance(index, slice):
            return ScaledVector(self.mantissa[index], self.exponent[index])
        return ScaledComplex(complex(self.mantissa[index]), int(self.exponent[index]))

    def __iter__(self) -> Iterator[ScaledComplex]:
        for i in range(len(self)):
            yield self[i]

    @property
    def real(self) -> "ScaledVector":
        return ScaledVector(np.real(self.mantissa).copy(), self.exponent)

    def __mul__(self, other: Union["ScaledVector", ScaledComplex, Number]) -> "ScaledVector":
        if isinstance(other, ScaledVector):
            return ScaledVector(self.mantissa * other.mantissa, self.exponent + other.exponent)
        other = ScaledComplex.of(other)
        mantissa = other.mantissa.real if other.mantissa.imag == 0 else other.mantissa
        return ScaledVector(self.mantissa * mantissa, self.exponent + other.exponent)

    __rmul__ = __mul__

    def __add__(self, other: "ScaledVector") -> "ScaledVector":
        top = np.maximum(self.exponent, other.exponent)
        mantissa = _ldexp(self.mantissa, self.exponent - top) + _ldexp(other.mantissa, other.exponent - top)
        return ScaledVector(mantissa, top)

    def peak_exponent(self) -> int:
        """Largest exponent among non-zero entries (0 for an all-zero vector)."""
        nonzero = self.mantissa != 0
        if not np.any(nonzero):
            return 0
        return int(self.exponent[nonzero].max())

    def aligned(self) -> Tuple[np.ndarray, int]:
        """Mantissas rescaled to the common peak exponent.

        Returns:
            (values, exponent) with ``self == values * 2**exponent``; entries far
            below the peak underflow to zero.
        """
        top = self.peak_exponent()
        return _ldexp(self.mantissa, self.exponent - top), top

    def total(self) -> ScaledComplex:
        """Sum of all entries."""
        values, top = self.aligned()
        return ScaledComplex(complex(values.sum()), top)

    def dot(self, other: "ScaledVector") -> ScaledComplex:
        """Sum of elementwise products."""
        return (self * other).total()

    def to_array(self) -> np.ndarray:
        """Plain values; entries outside the double range become inf or 0."""
        return _ldexp(self.mantissa, self.exponent)

    def relative_to(self, scale: ScaledComplex) -> np.ndarray:
        """Plain values of ``self / scale``."""
        if scale.is_zero():
            raise ZeroDivisionError("division by a scaled zero")
        mantissa = self.mantissa / (scale.mantissa.real if scale.mantissa.imag == 0 else scale.mantissa)
        return _ldexp(mantissa, self.exponent - scale.exponent)

    def __repr__(self) -> str:
        return f"ScaledVector(len={len(self)}, peak_exponent={self.peak_exponent()})"
