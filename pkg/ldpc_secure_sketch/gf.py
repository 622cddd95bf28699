"""
Finite-field arithmetic over GF(q) for prime powers q.

Elements are encoded as integers 0..q-1: the base-p digits of an element are
the coefficients of its polynomial representation (lowest degree first), so
for p = 2 the encoding is plain bit packing. Multiplication goes through
discrete exp/log tables relative to a fixed primitive element.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np


MAX_FIELD_ORDER = 1 << 16


def is_prime(n: int) -> bool:
    """Trial-division primality test (field orders are small)."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def is_prime_power(q: int) -> Optional[Tuple[int, int]]:
    """
    Decompose q as p^s.

    Args:
        q: Candidate field order

    Returns:
        (p, s) if q is a prime power, otherwise None
    """
    if q < 2:
        return None
    p = next(d for d in range(2, q + 1) if q % d == 0)
    s = 0
    rest = q
    while rest % p == 0:
        rest //= p
        s += 1
    if rest != 1:
        return None
    return p, s


def _prime_factors(n: int) -> List[int]:
    factors = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            factors.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        factors.append(n)
    return factors


def _to_digits(a: int, p: int, s: int) -> List[int]:
    digits = []
    for _ in range(s):
        digits.append(a % p)
        a //= p
    return digits


def _from_digits(digits: Sequence[int], p: int) -> int:
    value = 0
    for d in reversed(digits):
        value = value * p + d
    return value


def _poly_rem_prime(a: List[int], m: List[int], p: int) -> List[int]:
    """Remainder of a modulo monic m over GF(p); coefficient lists, lowest degree first."""
    a = [c % p for c in a]
    deg_m = len(m) - 1
    for i in range(len(a) - 1, deg_m - 1, -1):
        coef = a[i]
        if coef:
            shift = i - deg_m
            for j, mc in enumerate(m):
                a[shift + j] = (a[shift + j] - coef * mc) % p
    return a[:deg_m] if deg_m > 0 else []


def _is_irreducible(modulus: List[int], p: int) -> bool:
    s = len(modulus) - 1
    for d in range(1, s // 2 + 1):
        for low in range(p ** d):
            divisor = _to_digits(low, p, d) + [1]
            if not any(_poly_rem_prime(modulus, divisor, p)):
                return False
    return True


def _mulmod(a: int, b: int, modulus: List[int], p: int, s: int) -> int:
    """Multiply two encoded elements modulo the field polynomial."""
    if p == 2:
        mod_int = _from_digits(modulus, 2)
        result = 0
        while b:
            if b & 1:
                result ^= a
            b >>= 1
            a <<= 1
            if a >> s:
                a ^= mod_int
        return result
    da = _to_digits(a, p, s)
    db = _to_digits(b, p, s)
    prod = [0] * (2 * s - 1)
    for i, x in enumerate(da):
        if x:
            for j, y in enumerate(db):
                prod[i + j] += x * y
    rem = _poly_rem_prime(prod, modulus, p) if s > 1 else [prod[0] % p]
    rem = rem + [0] * (s - len(rem))
    return _from_digits(rem, p)


def _powmod(a: int, e: int, modulus: List[int], p: int, s: int) -> int:
    result = 1
    while e:
        if e & 1:
            result = _mulmod(result, a, modulus, p, s)
        a = _mulmod(a, a, modulus, p, s)
        e >>= 1
    return result


@dataclass(frozen=True, eq=False)
class FieldTable:
    """
    Arithmetic context for GF(q), q = p^s.

    Attributes:
        q: Field size
        characteristic: Prime p
        degree: Extension degree s
        modulus: Monic irreducible polynomial over GF(p), lowest degree first
        exp_table: exp_table[i] = alpha^i for 0 <= i < q-1
        log_table: log_table[a] = i with alpha^i = a, -1 for a = 0
    """

    q: int
    characteristic: int
    degree: int
    modulus: Tuple[int, ...]
    exp_table: np.ndarray
    log_table: np.ndarray
    digits: np.ndarray

    @property
    def primitive_element(self) -> int:
        return int(self.exp_table[1]) if self.q > 2 else 1

    def __repr__(self) -> str:
        return (f"FieldTable(q={self.q}, p={self.characteristic}, s={self.degree}, "
                f"alpha={self.primitive_element})")

    def _check(self, *elements: int) -> None:
        for a in elements:
            if not 0 <= a < self.q:
                raise ValueError(f"Element {a} is not a valid encoding in GF({self.q})")

    def add(self, a: int, b: int) -> int:
        self._check(a, b)
        if self.characteristic == 2:
            return a ^ b
        p = self.characteristic
        return int(_from_digits([(int(x) + int(y)) % p
                                 for x, y in zip(self.digits[a], self.digits[b])], p))

    def neg(self, a: int) -> int:
        self._check(a)
        if self.characteristic == 2:
            return a
        p = self.characteristic
        return int(_from_digits([(-int(x)) % p for x in self.digits[a]], p))

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        self._check(a, b)
        if a == 0 or b == 0:
            return 0
        return int(self.exp_table[(self.log_table[a] + self.log_table[b]) % (self.q - 1)])

    def inv(self, a: int) -> int:
        self._check(a)
        if a == 0:
            raise ZeroDivisionError(f"Zero has no inverse in GF({self.q})")
        return int(self.exp_table[(-self.log_table[a]) % (self.q - 1)])

    def power(self, a: int, e: int) -> int:
        self._check(a)
        if a == 0:
            if e < 0:
                raise ZeroDivisionError(f"Negative power of zero in GF({self.q})")
            return 1 if e == 0 else 0
        return int(self.exp_table[(self.log_table[a] * e) % (self.q - 1)])

    def exp(self, i: int) -> int:
        return int(self.exp_table[i % (self.q - 1)])

    def log(self, a: int) -> int:
        self._check(a)
        if a == 0:
            raise ValueError("log(0) is undefined")
        return int(self.log_table[a])

    def elements_in_location_order(self) -> List[int]:
        """Elements ordered as (0, alpha^0, alpha^1, ..., alpha^(q-2))."""
        return [0] + [int(x) for x in self.exp_table]

    def location_index(self, a: int) -> int:
        """Position of a in elements_in_location_order()."""
        self._check(a)
        return 0 if a == 0 else 1 + int(self.log_table[a])


@lru_cache(maxsize=None)
def build_field(p: int, s: int = 1) -> FieldTable:
    """
    Build GF(p^s) deterministically.

    The modulus is the monic irreducible polynomial of degree s whose lower
    coefficients have the smallest base-p encoding, and the primitive
    element is the smallest encoding of multiplicative order q-1.

    Args:
        p: Characteristic (prime)
        s: Extension degree

    Returns:
        FieldTable for GF(p^s)
    """
    if not is_prime(p):
        raise ValueError(f"Characteristic {p} is not prime")
    if s < 1:
        raise ValueError(f"Extension degree must be >= 1, got {s}")
    q = p ** s
    if q > MAX_FIELD_ORDER:
        raise ValueError(f"Field order {q} exceeds the supported maximum {MAX_FIELD_ORDER}")

    modulus = None
    for low in range(p ** s):
        candidate = _to_digits(low, p, s) + [1]
        if s == 1 or _is_irreducible(candidate, p):
            modulus = candidate
            break

    order = q - 1
    factors = _prime_factors(order)
    alpha = 1
    if q > 2:
        for g in range(1, q):
            if all(_powmod(g, order // r, modulus, p, s) != 1 for r in factors):
                alpha = g
                break

    exp_table = np.zeros(order, dtype=np.int64)
    log_table = np.full(q, -1, dtype=np.int64)
    x = 1
    for i in range(order):
        exp_table[i] = x
        log_table[x] = i
        x = _mulmod(x, alpha, modulus, p, s)

    digits = np.array([_to_digits(a, p, s) for a in range(q)], dtype=np.int64)
    exp_table.setflags(write=False)
    log_table.setflags(write=False)
    digits.setflags(write=False)
    return FieldTable(q=q, characteristic=p, degree=s, modulus=tuple(modulus),
                      exp_table=exp_table, log_table=log_table, digits=digits)


def field_for_order(q: int) -> FieldTable:
    """Build GF(q) from its order."""
    decomposition = is_prime_power(q)
    if decomposition is None:
        raise ValueError(f"Field size {q} is not a prime power")
    return build_field(*decomposition)


def add(a: int, b: int, f: FieldTable) -> int:
    return f.add(a, b)


def sub(a: int, b: int, f: FieldTable) -> int:
    return f.sub(a, b)


def neg(a: int, f: FieldTable) -> int:
    return f.neg(a)


def mul(a: int, b: int, f: FieldTable) -> int:
    """Field product of two encoded elements."""
    return f.mul(a, b)


def inv(a: int, f: FieldTable) -> int:
    """Multiplicative inverse; raises ZeroDivisionError for a = 0."""
    return f.inv(a)


def power(a: int, e: int, f: FieldTable) -> int:
    return f.power(a, e)


def exp(i: int, f: FieldTable) -> int:
    return f.exp(i)


def log(a: int, f: FieldTable) -> int:
    return f.log(a)


def poly_trim(a: Sequence[int]) -> List[int]:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mul(a: Sequence[int], b: Sequence[int], f: FieldTable) -> List[int]:
    """Product of polynomials over GF(q), coefficients lowest degree first."""
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = f.add(out[i + j], f.mul(x, y))
    return poly_trim(out)


def poly_mod(a: Sequence[int], m: Sequence[int], f: FieldTable) -> List[int]:
    """Remainder of a divided by m over GF(q)."""
    m = poly_trim(m)
    if not m:
        raise ZeroDivisionError("Polynomial division by zero")
    a = poly_trim(a)
    lead_inv = f.inv(m[-1])
    deg_m = len(m) - 1
    while len(a) - 1 >= deg_m and a:
        coef = f.mul(a[-1], lead_inv)
        shift = len(a) - 1 - deg_m
        for j, mc in enumerate(m):
            a[shift + j] = f.sub(a[shift + j], f.mul(coef, mc))
        a = poly_trim(a)
    return a


@lru_cache(maxsize=None)
def arith_tables(f: FieldTable) -> Tuple[np.ndarray, np.ndarray]:
    """Full (q x q) addition and multiplication tables for small fields."""
    if f.q > 256:
        raise ValueError(f"Arithmetic tables are only built for q <= 256, got {f.q}")
    elems = range(f.q)
    add_t = np.array([[f.add(a, b) for b in elems] for a in elems], dtype=np.int64)
    mul_t = np.array([[f.mul(a, b) for b in elems] for a in elems], dtype=np.int64)
    add_t.setflags(write=False)
    mul_t.setflags(write=False)
    return add_t, mul_t
