"""Symbolic algebra of Majorana generators.

Generators c_0, c_1, ... satisfy c_i = c_i^dagger, c_i^2 = 1 and
{c_i, c_j} = 2 delta_ij.  A monomial is an ascending product of distinct
generators with a scalar coefficient; a polynomial is a finite sum of
monomials keyed by their index tuple.  Two coefficient modes coexist:

* float mode: python complex, terms pruned when |coeff| <= 1e-14;
* exact mode: Gaussian rationals (`GaussianRational`), pruned only at
  exact zero, so statements like "this commutator vanishes" carry no
  floating-point caveat.

Mixing modes in one operation silently degrades the result to float
mode; nothing ever upgrades float coefficients to exact ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

FLOAT_PRUNE_TOL = 1e-14
FLOAT_COMM_TOL = 1e-12


@dataclass(frozen=True)
class GaussianRational:
    """Exact complex scalar re + im*i with rational parts."""

    re: Fraction
    im: Fraction

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __add__(self, other):
        other = _as_exact_scalar(other)
        if other is None:
            return NotImplemented
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        other = _as_exact_scalar(other)
        if other is None:
            return NotImplemented
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return -self + other

    def __mul__(self, other):
        other = _as_exact_scalar(other)
        if other is None:
            return NotImplemented
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        out = GaussianRational(1)
        base = self
        for _ in range(n):
            out = out * base
        return out

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))


EXACT_ONE = GaussianRational(1)
EXACT_I = GaussianRational(0, 1)


def _as_exact_scalar(z):
    if isinstance(z, GaussianRational):
        return z
    if isinstance(z, (int, Fraction)):
        return GaussianRational(z)
    return None


def is_exact_coeff(z) -> bool:
    return _as_exact_scalar(z) is not None


def _to_complex(z) -> complex:
    if isinstance(z, GaussianRational):
        return z.to_complex()
    return complex(z)


def _coeff_mul(a, b):
    ea, eb = _as_exact_scalar(a), _as_exact_scalar(b)
    if ea is not None and eb is not None:
        return ea * eb
    return _to_complex(a) * _to_complex(b)


def _coeff_add(a, b):
    ea, eb = _as_exact_scalar(a), _as_exact_scalar(b)
    if ea is not None and eb is not None:
        return ea + eb
    return _to_complex(a) + _to_complex(b)


def _coeff_conj(a):
    ea = _as_exact_scalar(a)
    if ea is not None:
        return ea.conjugate()
    return _to_complex(a).conjugate()


def _coeff_is_null(a) -> bool:
    ea = _as_exact_scalar(a)
    if ea is not None:
        return not ea
    return abs(_to_complex(a)) <= FLOAT_PRUNE_TOL


@lru_cache(maxsize=1 << 18)
def _canonical_core(indices: tuple) -> tuple:
    """(sorted key with pairs removed, parity sign) for an index tuple.

    Memoized: products rebuild the same index merges over and over, and
    the map is pure.  Entries are small tuples, so even a full cache
    stays in the tens of megabytes.
    """
    seq = list(indices)
    swaps = 0
    for k in range(1, len(seq)):
        x = seq[k]
        j = k - 1
        while j >= 0 and seq[j] > x:
            seq[j + 1] = seq[j]
            j -= 1
            swaps += 1
        seq[j + 1] = x

    out: list[int] = []
    for x in seq:
        if out and out[-1] == x:
            out.pop()
        else:
            out.append(x)
    return tuple(out), (-1 if swaps % 2 else 1)


def canonicalize(indices: Iterable[int], coeff=1):
    """Bring a generator product into canonical form.

    Sorts the index sequence (stable; the sign is the parity of the
    sorting permutation) and removes adjacent equal pairs via c^2 = 1.
    Returns (ascending index tuple of the survivors, signed coeff).
    """
    seq = []
    for i in indices:
        if not isinstance(i, (int,)) or isinstance(i, bool):
            raise TypeError(f"generator index must be int, got {i!r}")
        if i < 0:
            raise ValueError(f"generator index must be non-negative, got {i}")
        seq.append(i)
    key, sign = _canonical_core(tuple(seq))
    return key, (coeff if sign > 0 else -coeff)


class ReflectionMap:
    """Involutive index map i -> sigma(i) with an orientation flag.

    The flag records which spatial axis the mirror plane is normal to;
    the algebra only uses the index involution itself.
    """

    __slots__ = ("_map", "axis")

    def __init__(self, mapping: Mapping[int, int], axis: str = "x"):
        m = dict(mapping)
        for i, j in m.items():
            if j not in m or m[j] != i:
                raise ValueError(f"mapping is not an involution at index {i}")
        self._map = m
        self.axis = axis

    def __call__(self, i: int) -> int:
        try:
            return self._map[i]
        except KeyError:
            raise KeyError(f"index {i} not covered by the reflection") from None

    def __contains__(self, i: int) -> bool:
        return i in self._map

    def __len__(self) -> int:
        return len(self._map)

    def items(self):
        return self._map.items()

    def as_dict(self) -> dict[int, int]:
        return dict(self._map)


class MajoranaPolynomial:
    """Finite sum of canonical Majorana monomials.

    Immutable by convention: all operations return new polynomials.
    Terms are held as {ascending index tuple: coefficient} with the
    empty tuple denoting the identity.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[tuple, object] | None = None):
        acc: dict[tuple, object] = {}
        if terms:
            for key, coeff in terms.items():
                k, c = canonicalize(key, coeff)
                if k in acc:
                    acc[k] = _coeff_add(acc[k], c)
                else:
                    acc[k] = c
        self._terms = {k: c for k, c in acc.items() if not _coeff_is_null(c)}

    @classmethod
    def _from_canonical(cls, terms: dict) -> "MajoranaPolynomial":
        p = cls.__new__(cls)
        p._terms = {k: c for k, c in terms.items() if not _coeff_is_null(c)}
        return p

    @classmethod
    def monomial(cls, indices: Iterable[int], coeff=1) -> "MajoranaPolynomial":
        k, c = canonicalize(indices, coeff)
        return cls._from_canonical({k: c})

    @classmethod
    def identity(cls, coeff=1) -> "MajoranaPolynomial":
        return cls._from_canonical({(): coeff})

    @classmethod
    def generator(cls, i: int) -> "MajoranaPolynomial":
        return cls.monomial((i,))

    @classmethod
    def zero(cls) -> "MajoranaPolynomial":
        return cls._from_canonical({})

    def terms(self) -> dict[tuple, object]:
        return dict(self._terms)

    def coefficient(self, indices: Iterable[int]):
        key, sign = canonicalize(indices, 1)
        c = self._terms.get(key)
        if c is None:
            return None
        return _coeff_mul(c, sign) if sign != 1 else c

    def __iter__(self) -> Iterator[tuple]:
        return iter(sorted(self._terms))

    def __len__(self) -> int:
        return len(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_exact(self) -> bool:
        return all(is_exact_coeff(c) for c in self._terms.values())

    def support(self) -> frozenset[int]:
        out: set[int] = set()
        for k in self._terms:
            out.update(k)
        return frozenset(out)

    def degree(self) -> int:
        return max((len(k) for k in self._terms), default=0)

    def parities(self) -> frozenset[int]:
        """Degree parities present: subset of {0 (even), 1 (odd)}."""
        return frozenset(len(k) % 2 for k in self._terms)

    def max_abs_coeff(self) -> float:
        return max((abs(_to_complex(c)) for c in self._terms.values()), default=0.0)

    def to_float(self) -> "MajoranaPolynomial":
        return MajoranaPolynomial._from_canonical(
            {k: _to_complex(c) for k, c in self._terms.items()}
        )

    def __add__(self, other):
        if not isinstance(other, MajoranaPolynomial):
            return NotImplemented
        acc = dict(self._terms)
        for k, c in other._terms.items():
            acc[k] = _coeff_add(acc[k], c) if k in acc else c
        return MajoranaPolynomial._from_canonical(acc)

    def __sub__(self, other):
        if not isinstance(other, MajoranaPolynomial):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return MajoranaPolynomial._from_canonical(
            {k: -c if is_exact_coeff(c) else -_to_complex(c) for k, c in self._terms.items()}
        )

    def __mul__(self, other):
        if isinstance(other, MajoranaPolynomial):
            acc: dict[tuple, object] = {}
            core = _canonical_core
            for k1, c1 in self._terms.items():
                for k2, c2 in other._terms.items():
                    k, sign = core(k1 + k2)
                    c = _coeff_mul(c1, c2)
                    if sign < 0:
                        c = -c
                    acc[k] = _coeff_add(acc[k], c) if k in acc else c
            return MajoranaPolynomial._from_canonical(acc)
        return self._scaled(other)

    def __rmul__(self, other):
        # scalars commute with everything here
        return self._scaled(other)

    def _scaled(self, scalar):
        if not (is_exact_coeff(scalar) or isinstance(scalar, (float, complex))):
            return NotImplemented
        return MajoranaPolynomial._from_canonical(
            {k: _coeff_mul(c, scalar) for k, c in self._terms.items()}
        )

    def adjoint(self) -> "MajoranaPolynomial":
        """Hermitian adjoint: reverse each product, conjugate each coefficient."""
        out = {}
        for k, c in self._terms.items():
            n = len(k)
            c = _coeff_conj(c)
            if (n * (n - 1) // 2) % 2:  # parity of reversing n factors
                c = -c if is_exact_coeff(c) else -_to_complex(c)
            out[k] = c
        return MajoranaPolynomial._from_canonical(out)

    def reflect(self, rmap: ReflectionMap) -> "MajoranaPolynomial":
        """Anti-unitary mirror image: conjugate the coefficient and relabel
        indices in place (order preserved), then recanonicalize."""
        acc: dict[tuple, object] = {}
        for k, c in self._terms.items():
            key, coeff = canonicalize([rmap(i) for i in k], _coeff_conj(c))
            acc[key] = _coeff_add(acc[key], coeff) if key in acc else coeff
        return MajoranaPolynomial._from_canonical(acc)

    def is_hermitian(self, tol: float = FLOAT_COMM_TOL) -> bool:
        diff = self - self.adjoint()
        if diff.is_exact:
            return diff.is_zero
        return diff.max_abs_coeff() <= tol

    def isclose(self, other: "MajoranaPolynomial", tol: float = FLOAT_COMM_TOL) -> bool:
        return (self - other).max_abs_coeff() <= tol

    def __eq__(self, other):
        if not isinstance(other, MajoranaPolynomial):
            return NotImplemented
        if set(self._terms) != set(other._terms):
            return False
        for k, c in self._terms.items():
            d = other._terms[k]
            if is_exact_coeff(c) and is_exact_coeff(d):
                if _as_exact_scalar(c) != _as_exact_scalar(d):
                    return False
            elif _to_complex(c) != _to_complex(d):
                return False
        return True

    __hash__ = None  # mutable-dict backed; not hashable

    def render(self) -> str:
        """Canonical text form, identical bytes for identical polynomials.

        Terms are sorted by index tuple; each renders as
        ``(<re>,<im>)*c<i1>*c<i2>*...`` with the identity as
        ``(<re>,<im>)*1``.  Coefficients render as floats.
        """
        if not self._terms:
            return "(0.0,0.0)*1"
        parts = []
        for k in sorted(self._terms):
            z = _to_complex(self._terms[k])
            re, im = z.real + 0.0, z.imag + 0.0  # normalize -0.0
            body = "*".join(f"c{i}" for i in k) if k else "1"
            parts.append(f"({re!r},{im!r})*{body}")
        return " + ".join(parts)

    def __repr__(self):
        mode = "exact" if self.is_exact else "float"
        return f"<MajoranaPolynomial {len(self._terms)} terms, {mode}>"


def multiply(p: MajoranaPolynomial, q: MajoranaPolynomial) -> MajoranaPolynomial:
    return p * q


def adjoint(p: MajoranaPolynomial) -> MajoranaPolynomial:
    return p.adjoint()


def reflect(p: MajoranaPolynomial, rmap: ReflectionMap) -> MajoranaPolynomial:
    return p.reflect(rmap)


def commutator(p: MajoranaPolynomial, q: MajoranaPolynomial) -> MajoranaPolynomial:
    return p * q - q * p


def anticommutator(p: MajoranaPolynomial, q: MajoranaPolynomial) -> MajoranaPolynomial:
    return p * q + q * p


def commutator_is_zero(p: MajoranaPolynomial, q: MajoranaPolynomial,
                       tol: float = FLOAT_COMM_TOL) -> bool:
    """Decide [p, q] = 0.

    Exact-coefficient operands get an exact decision (no tolerance);
    float operands compare the largest surviving coefficient to `tol`.
    """
    diff = commutator(p, q)
    if p.is_exact and q.is_exact:
        return diff.is_zero
    return diff.max_abs_coeff() <= tol
