"""Exact arithmetic in Z[zeta16], zeta16 = exp(i*pi/8), with basis zeta16**0..7 and zeta16**8 = -1."""
from dataclasses import dataclass
from functools import cached_property
from typing import Tuple

import numpy as np

DEGREE = 8
_ZETA_POWERS = np.exp(1j * np.pi * np.arange(DEGREE) / DEGREE)


@dataclass(frozen=True)
class Cyclotomic16:
    coeffs: Tuple[int, ...] = (0,) * DEGREE

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coeffs)
        if len(coeffs) != DEGREE:
            raise ValueError(f"expected {DEGREE} coefficients, got {len(coeffs)}")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_int(cls, value: int) -> "Cyclotomic16":
        return cls((value,) + (0,) * (DEGREE - 1))

    @classmethod
    def zeta(cls, power: int) -> "Cyclotomic16":
        """zeta16**power for any integer power."""
        power %= 2 * DEGREE
        coeffs = [0] * DEGREE
        if power < DEGREE:
            coeffs[power] = 1
        else:
            coeffs[power - DEGREE] = -1
        return cls(tuple(coeffs))

    @classmethod
    def from_counts(cls, counts) -> "Cyclotomic16":
        """Sum of zeta16**k weighted by counts[k], k = 0..15."""
        counts = [int(c) for c in counts]
        if len(counts) != 2 * DEGREE:
            raise ValueError(f"expected {2 * DEGREE} counts, got {len(counts)}")
        return cls(tuple(counts[k] - counts[k + DEGREE] for k in range(DEGREE)))

    def __add__(self, other):
        if isinstance(other, int):
            other = Cyclotomic16.from_int(other)
        if not isinstance(other, Cyclotomic16):
            return NotImplemented
        return Cyclotomic16(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic16(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return Cyclotomic16(tuple(other * c for c in self.coeffs))
        if not isinstance(other, Cyclotomic16):
            return NotImplemented
        product = [0] * DEGREE
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                k = i + j
                if k < DEGREE:
                    product[k] += a * b
                else:
                    product[k - DEGREE] -= a * b
        return Cyclotomic16(tuple(product))

    __rmul__ = __mul__

    def conjugate(self) -> "Cyclotomic16":
        # zeta**-k = -zeta**(8-k)
        coeffs = [self.coeffs[0]] + [-self.coeffs[DEGREE - k] for k in range(1, DEGREE)]
        return Cyclotomic16(tuple(coeffs))

    @property
    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    @cached_property
    def value(self) -> complex:
        return complex(np.dot(np.array(self.coeffs, dtype=np.float64), _ZETA_POWERS))

    def __str__(self):
        if self.is_rational:
            return str(self.coeffs[0])
        return "[" + ",".join(str(c) for c in self.coeffs) + "]"
