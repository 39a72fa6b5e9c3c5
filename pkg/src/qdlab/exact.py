"""Exact phase arithmetic.

Phases are stored as `Fraction` values f meaning the unit complex number
exp(2*pi*i*f), reduced mod 1.  Cyclotomic integers over the 8th root of
unity cover every ribbon coefficient that occurs for the built-in groups.
"""

from __future__ import annotations

import cmath
from fractions import Fraction

TWO_PI = 2.0 * 3.141592653589793


def phase(num: int, den: int) -> Fraction:
    return Fraction(num, den) % 1


def phase_mul(a: Fraction, b: Fraction) -> Fraction:
    return (a + b) % 1


def phase_inv(a: Fraction) -> Fraction:
    return (-a) % 1


def phase_to_complex(a: Fraction) -> complex:
    return cmath.exp(2j * cmath.pi * float(a))


def phase_from_complex(z: complex, max_den: int = 64, tol: float = 1e-9) -> Fraction:
    """Snap a unit complex number to an exact rational phase.

    Raises ValueError when z is not within tol of the exp(2*pi*i*k/max_den) grid.
    """
    if abs(abs(z) - 1.0) > tol:
        raise ValueError(f"not a unit phase: |z| = {abs(z)}")
    ang = cmath.phase(z) / TWO_PI  # in (-1/2, 1/2]
    k = round(ang * max_den)
    f = Fraction(k, max_den) % 1
    if abs(phase_to_complex(f) - z) > tol:
        raise ValueError(f"phase {z} not on the 1/{max_den} grid")
    return f


class Cyc8:
    """Element of Z[zeta_8] with Fraction coefficients: a + b*z + c*z^2 + d*z^3."""

    __slots__ = ("c",)

    def __init__(self, a=0, b=0, c=0, d=0):
        self.c = (Fraction(a), Fraction(b), Fraction(c), Fraction(d))

    @staticmethod
    def from_phase(f: Fraction) -> "Cyc8":
        f = f % 1
        if f.denominator not in (1, 2, 4, 8):
            raise ValueError(f"phase {f} is not an 8th root of unity")
        k = int(f * 8)
        co = [Fraction(0)] * 4
        q, r = divmod(k, 4)
        co[r] = Fraction(-1) if q else Fraction(1)
        out = Cyc8.__new__(Cyc8)
        out.c = tuple(co)
        return out

    def __add__(self, other: "Cyc8") -> "Cyc8":
        out = Cyc8.__new__(Cyc8)
        out.c = tuple(x + y for x, y in zip(self.c, other.c))
        return out

    def __sub__(self, other: "Cyc8") -> "Cyc8":
        out = Cyc8.__new__(Cyc8)
        out.c = tuple(x - y for x, y in zip(self.c, other.c))
        return out

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            out = Cyc8.__new__(Cyc8)
            out.c = tuple(x * other for x in self.c)
            return out
        co = [Fraction(0)] * 4
        for i, x in enumerate(self.c):
            if not x:
                continue
            for j, y in enumerate(other.c):
                if not y:
                    continue
                k = i + j
                if k < 4:
                    co[k] += x * y
                else:
                    co[k - 4] -= x * y  # z^4 = -1
        out = Cyc8.__new__(Cyc8)
        out.c = tuple(co)
        return out

    __rmul__ = __mul__

    def __neg__(self):
        out = Cyc8.__new__(Cyc8)
        out.c = tuple(-x for x in self.c)
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = Cyc8(other)
        return self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __bool__(self):
        return any(self.c)

    def conj(self) -> "Cyc8":
        # complex conjugation: z -> z^-1 = -z^3
        a, b, c, d = self.c
        out = Cyc8.__new__(Cyc8)
        out.c = (a, -d, -c, -b)
        return out

    def to_complex(self) -> complex:
        z = cmath.exp(1j * cmath.pi / 4)
        return sum(float(x) * z**k for k, x in enumerate(self.c))

    def as_phase(self) -> Fraction | None:
        """Return f with self == exp(2*pi*i*f) when self is a grid phase, else None."""
        for k in range(8):
            if self == Cyc8.from_phase(Fraction(k, 8)):
                return Fraction(k, 8)
        return None

    def __repr__(self):
        return f"Cyc8{self.c}"
