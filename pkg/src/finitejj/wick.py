"""Normal ordering and vacuum expectations for a single bosonic mode.

Operators are polynomials in ladder-operator words: each word is a tuple of
``RAISE``/``LOWER`` symbols read left to right in operator order, and a
polynomial maps words to complex coefficients.  Normal ordering rewrites
``LOWER, RAISE`` pairs via the canonical commutator until every word has all
raising symbols first; the identity (empty word) coefficient of the normal
form is then the vacuum expectation value.

An affine frame change ``b = u_plus a + u_minus a^dag - i u_0`` (with its
conjugate) is supported by exact inversion, so polynomials written in the
original mode can be evaluated in the quasiparticle vacuum.

A truncated Fock-space representation serves as the independent oracle: a
degree-d word is exact in any Fock dimension above d.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import ConvergenceError, TermBudgetError

RAISE = "+"
LOWER = "-"

Word = tuple[str, ...]

# Guard against runaway expansions (the cap counts words in one polynomial).
TERM_CAP = 200_000


def _check_budget(n_terms: int):
    if n_terms > TERM_CAP:
        raise TermBudgetError(f"expansion produced {n_terms} terms (cap {TERM_CAP})")


class OperatorPoly:
    """Sum of scalar-weighted ladder-operator words, closed under + and *."""

    __slots__ = ("_terms",)

    def __init__(self, terms: dict[Word, complex] | None = None):
        clean: dict[Word, complex] = {}
        if terms:
            for word, coeff in terms.items():
                c = complex(coeff)
                if c != 0:
                    clean[tuple(word)] = c
        _check_budget(len(clean))
        self._terms = clean

    @classmethod
    def identity(cls, coeff: complex = 1.0) -> "OperatorPoly":
        return cls({(): coeff})

    @classmethod
    def lowering(cls, coeff: complex = 1.0) -> "OperatorPoly":
        return cls({(LOWER,): coeff})

    @classmethod
    def raising(cls, coeff: complex = 1.0) -> "OperatorPoly":
        return cls({(RAISE,): coeff})

    @classmethod
    def momentum(cls) -> "OperatorPoly":
        """i (a^dag - a) / sqrt(2)."""
        s = 1j / math.sqrt(2.0)
        return cls({(RAISE,): s, (LOWER,): -s})

    @classmethod
    def from_word(cls, word: Word, coeff: complex = 1.0) -> "OperatorPoly":
        for sym in word:
            if sym not in (RAISE, LOWER):
                raise ValueError(f"unknown ladder symbol {sym!r}")
        return cls({tuple(word): coeff})

    def coefficient(self, word: Word) -> complex:
        return self._terms.get(tuple(word), 0j)

    def terms(self) -> list[tuple[Word, complex]]:
        """Terms in canonical order (by length, then symbol sequence)."""
        return sorted(self._terms.items(), key=lambda item: (len(item[0]), item[0]))

    @property
    def n_terms(self) -> int:
        return len(self._terms)

    def degree(self) -> int:
        return max((len(w) for w in self._terms), default=0)

    def __add__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        merged = dict(self._terms)
        for word, coeff in other._terms.items():
            c = merged.get(word, 0j) + coeff
            if c == 0:
                merged.pop(word, None)
            else:
                merged[word] = c
        return OperatorPoly(merged)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __neg__(self):
        return OperatorPoly({w: -c for w, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            if other == 0:
                return OperatorPoly()
            return OperatorPoly({w: c * other for w, c in self._terms.items()})
        if not isinstance(other, OperatorPoly):
            return NotImplemented
        product: dict[Word, complex] = {}
        for w1, c1 in self._terms.items():
            for w2, c2 in other._terms.items():
                word = w1 + w2
                c = product.get(word, 0j) + c1 * c2
                if c == 0:
                    product.pop(word, None)
                else:
                    product[word] = c
            _check_budget(len(product))
        return OperatorPoly(product)

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self.__mul__(other)
        return NotImplemented

    def __pow__(self, exponent: int):
        if exponent < 0 or exponent != int(exponent):
            raise ValueError("exponent must be a non-negative integer")
        result = OperatorPoly.identity()
        for _ in range(int(exponent)):
            result = result * self
        return result

    def dagger(self) -> "OperatorPoly":
        """Hermitian conjugate: reverse words, swap symbols, conjugate coefficients."""
        flip = {RAISE: LOWER, LOWER: RAISE}
        return OperatorPoly(
            {tuple(flip[s] for s in reversed(w)): c.conjugate() for w, c in self._terms.items()}
        )

    def __eq__(self, other):
        if isinstance(other, OperatorPoly):
            return self._terms == other._terms
        return NotImplemented

    def __repr__(self):
        return f"OperatorPoly({dump(self)})"


def _as_poly(value) -> "OperatorPoly":
    if isinstance(value, OperatorPoly):
        return value
    if isinstance(value, (int, float, complex)):
        return OperatorPoly.identity(value)
    return NotImplemented


def dump(p: OperatorPoly) -> str:
    """Render as a sum of ``coeff * b†^m b^n``-style strings (debug aid)."""
    if not p._terms:
        return "0"
    pieces = []
    for word, coeff in p.terms():
        if coeff.imag == 0:
            coeff = coeff.real
        if not word:
            pieces.append(f"({coeff:.6g})")
            continue
        ops = ["b†" if sym == RAISE else "b" for sym in word]
        # compress runs: b†^m etc.
        compact = []
        i = 0
        while i < len(ops):
            j = i
            while j < len(ops) and ops[j] == ops[i]:
                j += 1
            compact.append(ops[i] if j - i == 1 else f"{ops[i]}^{j - i}")
            i = j
        pieces.append(f"({coeff:.6g}) {' '.join(compact)}")
    return " + ".join(pieces)


@lru_cache(maxsize=None)
def _normal_order_word(word: Word) -> tuple[tuple[Word, int], ...]:
    """Normal form of a single word as ((canonical word, integer count), ...)."""
    for i in range(len(word) - 1):
        if word[i] == LOWER and word[i + 1] == RAISE:
            swapped = word[:i] + (RAISE, LOWER) + word[i + 2 :]
            contracted = word[:i] + word[i + 2 :]
            merged: dict[Word, int] = {}
            for w, n in _normal_order_word(swapped):
                merged[w] = merged.get(w, 0) + n
            for w, n in _normal_order_word(contracted):
                merged[w] = merged.get(w, 0) + n
            return tuple(sorted(merged.items()))
    return ((word, 1),)


def normal_order(p: OperatorPoly) -> OperatorPoly:
    """Rewrite so every word has all raising symbols before lowering symbols."""
    result: dict[Word, complex] = {}
    for word, coeff in p.terms():
        for canon, count in _normal_order_word(word):
            c = result.get(canon, 0j) + coeff * count
            if c == 0:
                result.pop(canon, None)
            else:
                result[canon] = c
        _check_budget(len(result))
    return OperatorPoly(result)


def vacuum_expectation(p: OperatorPoly) -> complex:
    """<0| p |0>: the identity coefficient after normal ordering.

    Summation runs in canonical term order through exact accumulation
    (math.fsum per component), so results are bitwise reproducible.
    """
    re_parts: list[float] = []
    im_parts: list[float] = []
    for word, coeff in p.terms():
        for canon, count in _normal_order_word(word):
            if not canon:
                re_parts.append(coeff.real * count)
                im_parts.append(coeff.imag * count)
    return complex(math.fsum(re_parts), math.fsum(im_parts))


def substitute_affine(
    p: OperatorPoly, u_plus: float, u_minus: float, u_0: float = 0.0
) -> OperatorPoly:
    """Rewrite a polynomial in mode ``a`` in terms of the transformed mode ``b``.

    The forward map is ``b = u_plus a + u_minus a^dag - i u_0`` together with
    its conjugate; symplectic normalization ``u_plus^2 - u_minus^2 = 1`` makes
    it exactly invertible:

        a     = u_plus b - u_minus b^dag + i u_0 (u_plus + u_minus)
        a^dag = u_plus b^dag - u_minus b - i u_0 (u_plus + u_minus)

    Each symbol of every word is replaced by its image and the expansion is
    collected into canonical terms.
    """
    # Tolerance scales with u^2: the identity is evaluated by cancelling two
    # squares, so machine error grows with the squeezing strength.
    scale = max(1.0, u_plus * u_plus + u_minus * u_minus)
    if abs(u_plus * u_plus - u_minus * u_minus - 1.0) > 1e-12 * scale:
        raise ValueError(
            f"non-symplectic coefficients: u_plus^2 - u_minus^2 = {u_plus**2 - u_minus**2!r}"
        )
    shift = 1j * u_0 * (u_plus + u_minus)
    images = {
        LOWER: OperatorPoly({(LOWER,): u_plus, (RAISE,): -u_minus, (): shift}),
        RAISE: OperatorPoly({(RAISE,): u_plus, (LOWER,): -u_minus, (): -shift}),
    }
    result = OperatorPoly()
    for word, coeff in p.terms():
        factor = OperatorPoly.identity(coeff)
        for sym in word:
            factor = factor * images[sym]
        result = result + factor
    return result


def fock_matrix(p: OperatorPoly, dim: int) -> np.ndarray:
    """Dense matrix of the polynomial in a Fock space truncated at ``dim`` states."""
    if dim < 1:
        raise ValueError("dim must be at least 1")
    lower = np.diag(np.sqrt(np.arange(1.0, dim)), 1).astype(complex)
    raise_ = lower.conj().T
    mats = {LOWER: lower, RAISE: raise_}
    total = np.zeros((dim, dim), dtype=complex)
    eye = np.eye(dim, dtype=complex)
    for word, coeff in p.terms():
        m = eye
        for sym in word:
            m = m @ mats[sym]
        total += coeff * m
    return total


def fock_oracle(p: OperatorPoly, dim: int) -> complex:
    """(vacuum, vacuum) element of the truncated Fock matrix of ``p``.

    Exact whenever ``dim`` exceeds the polynomial degree; for general use the
    caller doubles ``dim`` until the value is stable (see
    :func:`fock_oracle_stable`).
    """
    return complex(fock_matrix(p, dim)[0, 0])


def fock_oracle_stable(
    p: OperatorPoly, dim: int = 16, max_dim: int = 4096, rtol: float = 1e-10
) -> complex:
    """Double the Fock truncation until the vacuum element settles to ``rtol``."""
    value = fock_oracle(p, dim)
    while dim < max_dim:
        dim *= 2
        new = fock_oracle(p, dim)
        if abs(new - value) <= rtol * max(1.0, abs(new)):
            return new
        value = new
    raise ConvergenceError(
        f"Fock truncation still unstable at dim {dim} (last value {value})", achieved=dim
    )
