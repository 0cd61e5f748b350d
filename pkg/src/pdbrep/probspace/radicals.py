"""Exact arithmetic for probabilities that involve rational powers.

A `PowProb` is a product of factors base^exp with rational base and positive
rational exponent. Sums and differences of such products (which arise when
world probabilities are multiplied out, e.g. 1 - sqrt(1/5)) are held as a
`RadicalSum`: a rational linear combination of monomials prod p^e over primes
p with exponents in (0, 1). Distinct monomials of this shape are linearly
independent over the rationals, so the canonical form decides equality
exactly. Order comparisons fall back to interval evaluation when needed.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from sympy import factorint, integer_nthroot

from ..errors import ModelError

PRECISION_BITS = 128


def set_precision(bits: int) -> None:
    """Fractional bits used by interval comparisons of radical sums."""
    global PRECISION_BITS
    if bits < 8:
        raise ValueError("precision must be at least 8 bits")
    PRECISION_BITS = bits


class Indeterminate:
    """Result of an order comparison that interval evaluation cannot decide."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Indeterminate"

    def __bool__(self):
        raise TypeError("Indeterminate has no truth value")


INDETERMINATE = Indeterminate()


@lru_cache(maxsize=4096)
def _factor_int(n: int) -> tuple:
    return tuple(sorted(factorint(n).items()))


def _prime_exponents(q: Fraction) -> dict:
    if q <= 0:
        raise ModelError(f"radical base must be positive, got {q}")
    out = {}
    for p, e in _factor_int(q.numerator):
        out[p] = out.get(p, 0) + e
    for p, e in _factor_int(q.denominator):
        out[p] = out.get(p, 0) - e
    return out


def _canonical(coeff: Fraction, exps: dict):
    """Split prime exponents into integer parts (into coeff) and (0,1) parts."""
    key = []
    for p in sorted(exps):
        e = Fraction(exps[p])
        whole = math.floor(e)
        frac = e - whole
        if whole:
            coeff *= Fraction(p) ** whole
        if frac:
            key.append((p, frac))
    return coeff, tuple(key)


@lru_cache(maxsize=65536)
def _mul_keys(a: tuple, b: tuple):
    if not a:
        return Fraction(1), b
    if not b:
        return Fraction(1), a
    exps = dict(a)
    for p, e in b:
        exps[p] = exps.get(p, 0) + e
    return _canonical(Fraction(1), exps)


def _monomial_bounds(key: tuple, bits: int):
    """Rational lower and upper bounds of prod p^e with error about 2^-bits."""
    lo = Fraction(1)
    hi = Fraction(1)
    for p, e in key:
        a, b = e.numerator, e.denominator
        scaled = p ** a * 2 ** (bits * b)
        root, exact = integer_nthroot(scaled, b)
        lo *= Fraction(int(root), 2 ** bits)
        hi *= Fraction(int(root) + (0 if exact else 1), 2 ** bits)
    return lo, hi


class RadicalSum:
    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        self.terms = {k: c for k, c in (terms or {}).items() if c}
        self._hash = None

    @classmethod
    def const(cls, q) -> "RadicalSum":
        return cls({(): Fraction(q)})

    @classmethod
    def power(cls, base, exp, coeff=1) -> "RadicalSum":
        base, exp = Fraction(base), Fraction(exp)
        coeff = Fraction(coeff)
        if base == 0 or coeff == 0:
            return cls()
        exps = {p: e * exp for p, e in _prime_exponents(base).items()}
        c, key = _canonical(coeff, exps)
        return cls({key: c})

    # algebra
    def _coerce(self, other):
        if isinstance(other, RadicalSum):
            return other
        if isinstance(other, PowProb):
            return other.to_radical()
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return RadicalSum.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, 0) + c
        return RadicalSum(terms)

    __radd__ = __add__

    def __neg__(self):
        return RadicalSum({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return RadicalSum({k: c * other for k, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                extra, k = _mul_keys(k1, k2)
                terms[k] = terms.get(k, 0) + c1 * c2 * extra
        return RadicalSum(terms)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return RadicalSum({k: c / other for k, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(other.terms) == 1:
            (k, c), = other.terms.items()
            inv = {p: -e for p, e in k}
            ic, ik = _canonical(1 / c, inv)
            return self * RadicalSum({ik: ic})
        raise ArithmeticError("division by a sum of radicals is not supported")

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        out = RadicalSum.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # inspection
    def is_rational(self) -> bool:
        return all(k == () for k in self.terms)

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("value is irrational")
        return self.terms.get((), Fraction(0))

    def is_zero(self) -> bool:
        return not self.terms

    def bounds(self, bits: int | None = None):
        bits = PRECISION_BITS if bits is None else bits
        lo = hi = Fraction(0)
        for k, c in self.terms.items():
            mlo, mhi = _monomial_bounds(k, bits)
            if c > 0:
                lo += c * mlo
                hi += c * mhi
            else:
                lo += c * mhi
                hi += c * mlo
        return lo, hi

    def __float__(self):
        lo, hi = self.bounds(64)
        return float((lo + hi) / 2)

    def sign(self, bits: int | None = None):
        """-1, 0, 1, or INDETERMINATE."""
        if not self.terms:
            return 0
        if len(self.terms) == 1:
            return 1 if next(iter(self.terms.values())) > 0 else -1
        lo, hi = self.bounds(bits)
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        return INDETERMINATE

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(self.to_fraction())
            else:
                self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self):
        parts = []
        for k, c in sorted(self.terms.items(), key=lambda kv: kv[0]):
            mono = "*".join(f"{p}^({e})" for p, e in k)
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        return "RadicalSum(" + (" + ".join(parts) or "0") + ")"


class PowProb:
    """Product of factors base^exp; equal bases are merged."""

    __slots__ = ("factors",)

    def __init__(self, factors):
        merged = {}
        for base, exp in factors:
            base, exp = Fraction(base), Fraction(exp)
            if not 0 <= base <= 1:
                raise ModelError(f"PowProb base {base} outside [0, 1]")
            if exp <= 0:
                raise ModelError(f"PowProb exponent {exp} must be positive")
            merged[base] = merged.get(base, 0) + exp
        self.factors = tuple(sorted(merged.items()))

    @classmethod
    def root(cls, base, n: int) -> "PowProb":
        return cls([(base, Fraction(1, n))])

    def to_radical(self) -> RadicalSum:
        out = RadicalSum.const(1)
        for base, exp in self.factors:
            out = out * RadicalSum.power(base, exp)
        return out

    def reduce(self):
        """The value as a Fraction when it is rational, else None."""
        r = self.to_radical()
        return r.to_fraction() if r.is_rational() else None

    def compare(self, q):
        """Exact sign of self - q for rational q (-1, 0 or 1)."""
        q = Fraction(q)
        r = self.to_radical()
        if r.is_rational():
            v = r.to_fraction()
            return (v > q) - (v < q)
        if q <= 0:
            return 1
        (key, coeff), = r.terms.items()
        # raise both sides to the common denominator of the exponents
        n = math.lcm(*(e.denominator for _, e in key))
        lhs = coeff ** n
        for p, e in key:
            lhs *= Fraction(p) ** int(e * n)
        rhs = q ** n
        return (lhs > rhs) - (lhs < rhs)

    def __mul__(self, other):
        if isinstance(other, PowProb):
            return PowProb(self.factors + other.factors)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, PowProb):
            return self.to_radical() == other.to_radical()
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.compare(other) == 0
        if isinstance(other, RadicalSum):
            return self.to_radical() == other
        return NotImplemented

    def __hash__(self):
        return hash(self.to_radical())

    def __float__(self):
        return math.prod(float(b) ** float(e) for b, e in self.factors)

    def __repr__(self):
        return "PowProb(" + ", ".join(f"{b}^{e}" for b, e in self.factors) + ")"

    def to_json(self):
        return [{"base": str(b), "exp": str(e)} for b, e in self.factors]


def normalize(value):
    """Collapse RadicalSum/PowProb values to a Fraction when rational."""
    if isinstance(value, PowProb):
        value = value.to_radical()
    if isinstance(value, RadicalSum):
        return value.to_fraction() if value.is_rational() else value
    return Fraction(value)


def is_zero(value) -> bool:
    if isinstance(value, RadicalSum):
        return value.is_zero()
    return value == 0


def compare(a, b):
    """Sign of a - b: -1, 0, 1 or INDETERMINATE."""
    if isinstance(a, PowProb) and not isinstance(b, (PowProb, RadicalSum)):
        return a.compare(b)
    if isinstance(b, PowProb) and not isinstance(a, (PowProb, RadicalSum)):
        c = b.compare(a)
        return -c
    a = normalize(a)
    b = normalize(b)
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return (a > b) - (a < b)
    d = (a if isinstance(a, RadicalSum) else RadicalSum.const(a)) - b
    return d.sign()


def to_float(value) -> float:
    return float(value)
