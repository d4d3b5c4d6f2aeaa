"""The exact symbolic algebra of Wick expansions.

An algebra element is stored as its (unique) graded family of chaos
coefficients ``{k ↦ F_k}``; multiplication sums over cross pairings between
the two leg sets weighted by ``q^crb``, moments follow the q-weighted pair
partition rule, and the graded ℓ¹ norm with constants ``C_q, D_q`` makes the
expansions a Banach algebra.  The matrix realisation on the truncated Fock
space (``to_operator``) provides the independent oracle for all of it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .combinat import (IndexSet, Pairing, contraction_stats, crossing_number,
                       enumerate_pairings)
from .fock import (FockTensor, TruncatedOperator, field_operator,
                   identity_operator, wick_block_matrix, zero_operator)


@dataclass(frozen=True)
class NormConstants:
    """The constants of the graded norm at a fixed q in (-1, 1).

    ``D = 1/(1-|q|)``; ``C`` is the infinite product ``∏ (1-|q|^n)^{-1}``
    truncated once the tail factor deviates from 1 by less than ``tol``.
    """

    q: float
    D: float
    C: float
    tol: float


def norm_constants(q: float, tol: float = 1e-15) -> NormConstants:
    if not -1.0 < q < 1.0:
        raise ValueError("norm constants require |q| < 1")
    a = abs(q)
    D = 1.0 / (1.0 - a)
    C = 1.0
    n = 1
    while True:
        factor = 1.0 / (1.0 - a ** n)
        C *= factor
        if abs(1.0 - factor) < tol:
            break
        n += 1
        if n > 100000:  # pragma: no cover - |q| < 1 converges long before
            break
    return NormConstants(q, D, C, tol)


class TruncationCutoffError(ValueError):
    """Requested exact sectors do not fit below the cutoff."""


class WickElement:
    """A finite graded family ``{k ↦ F_k}`` of chaos coefficients."""

    __slots__ = ("d", "chaos")

    def __init__(self, d: int, chaos: dict[int, FockTensor] | None = None) -> None:
        self.d = int(d)
        self.chaos: dict[int, FockTensor] = {}
        for k, F in (chaos or {}).items():
            if F.d != self.d or F.degree != k:
                raise ValueError(f"chaos slot {k} holds a degree-{F.degree}, d={F.d} tensor")
            self.chaos[int(k)] = F

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def one(d: int, scalar: float = 1.0) -> "WickElement":
        return WickElement(d, {0: FockTensor.scalar(d, scalar)})

    @staticmethod
    def zero(d: int) -> "WickElement":
        return WickElement(d, {})

    @staticmethod
    def from_vector(f) -> "WickElement":
        F = FockTensor.from_vectors([f])
        return WickElement(F.d, {1: F})

    @staticmethod
    def from_tensor(F: FockTensor) -> "WickElement":
        return WickElement(F.d, {F.degree: F})

    # -- structure --------------------------------------------------------------

    def coeff(self, k: int) -> FockTensor:
        return self.chaos.get(k, FockTensor.zeros(self.d, k))

    def max_degree(self) -> int:
        return max(self.chaos, default=0)

    def support(self, tol: float = 0.0) -> tuple[int, ...]:
        return tuple(sorted(k for k, F in self.chaos.items()
                            if np.max(np.abs(F.data), initial=0.0) > tol))

    def trim(self, tol: float = 0.0) -> "WickElement":
        return WickElement(self.d, {k: F for k, F in self.chaos.items()
                                    if np.max(np.abs(F.data), initial=0.0) > tol})

    def chaos_part(self, degrees) -> "WickElement":
        keep = set(degrees)
        return WickElement(self.d, {k: F for k, F in self.chaos.items() if k in keep})

    def max_abs_coeff(self) -> float:
        return max((float(np.max(np.abs(F.data), initial=0.0))
                    for F in self.chaos.values()), default=0.0)

    # -- linear algebra -----------------------------------------------------------

    def __add__(self, other: "WickElement") -> "WickElement":
        if self.d != other.d:
            raise ValueError("dimension mismatch")
        out = dict(self.chaos)
        for k, F in other.chaos.items():
            out[k] = out[k] + F if k in out else F
        return WickElement(self.d, out)

    def __sub__(self, other: "WickElement") -> "WickElement":
        return self + other.scale(-1.0)

    def scale(self, c: float) -> "WickElement":
        return WickElement(self.d, {k: F.scale(c) for k, F in self.chaos.items()})

    def allclose(self, other: "WickElement", tol: float = 1e-10) -> bool:
        return (self - other).max_abs_coeff() <= tol

    # -- serialization ---------------------------------------------------------

    def to_json(self) -> dict:
        return {"d": self.d,
                "chaos": {str(k): self.chaos[k].to_json() for k in sorted(self.chaos)}}

    @staticmethod
    def from_json(obj: dict) -> "WickElement":
        chaos = {int(k): FockTensor.from_json(v) for k, v in obj["chaos"].items()}
        return WickElement(obj["d"], chaos)

    def __repr__(self) -> str:
        return f"WickElement(d={self.d}, support={self.support()})"


# ---------------------------------------------------------------------------
# products, moments, maps
# ---------------------------------------------------------------------------


def wick_product_vectors(fs, q: float) -> WickElement:
    """The pure chaos element with coefficient ``f_1 ⊗ ... ⊗ f_n``.

    By uniqueness of the Wick expansion this *is* the n-fold Wick product of
    the given vectors; the recursive operator realisation used to cross-check
    it is ``wick_product_recursive_operator``.
    """
    fs = [np.asarray(f, dtype=float) for f in fs]
    if not fs:
        raise ValueError("need at least one vector (use WickElement.one for scalars)")
    return WickElement.from_tensor(FockTensor.from_vectors(fs))


def wick_product_recursive_operator(fs, q: float, cutoff: int) -> TruncatedOperator:
    """Matrix realisation of the n-fold Wick product by its defining recursion.

    Peels the leftmost vector: the degree-n product equals the field operator
    of ``f_1`` times the degree-(n-1) product, minus the ``q``-weighted
    contractions of ``f_1`` against each later slot.
    """
    fs = [np.asarray(f, dtype=float) for f in fs]
    d = len(fs[0])
    n = len(fs)
    if n == 0:
        return identity_operator(d, cutoff)
    if n == 1:
        return field_operator(fs[0], q, cutoff)
    head, rest = fs[0], fs[1:]
    out = field_operator(head, q, cutoff).compose(
        wick_product_recursive_operator(rest, q, cutoff))
    for i in range(1, n):
        inner = rest[:i - 1] + rest[i:]
        coeff = q ** (i - 1) * float(np.dot(head, rest[i - 1]))
        if coeff == 0.0:
            continue
        sub = (wick_product_recursive_operator(inner, q, cutoff)
               if inner else identity_operator(d, cutoff))
        out = out - sub.scale(coeff)
    return out


def expand_field_product(fs, q: float) -> WickElement:
    """Wick expansion of the plain product of field operators.

    Sums over all pairings of the leg set: a pairing with intertwining number
    ``crb`` contributes ``q^crb · ∏ <f_s, f_t>`` times the chaos tensor of the
    uncontracted legs.
    """
    fs = [np.asarray(f, dtype=float) for f in fs]
    n = len(fs)
    if n == 0:
        raise ValueError("empty product")
    d = len(fs[0])
    ctx = IndexSet.range(n)
    out = WickElement.zero(d)
    gram = np.array([[float(np.dot(a, b)) for b in fs] for a in fs])
    for pairing in enumerate_pairings(ctx):
        _, _, crb = contraction_stats(pairing)
        coeff = q ** crb
        for s, t in pairing.pairs:
            coeff *= gram[s - 1, t - 1]
        if coeff == 0.0:
            continue
        free = pairing.free()
        if free:
            tensor = FockTensor.from_vectors([fs[i - 1] for i in free]).scale(coeff)
        else:
            tensor = FockTensor.scalar(d, coeff)
        out = out + WickElement.from_tensor(tensor)
    return out.trim()


def _cross_pairings(m: int, n: int):
    """All ways to pair a subset of ``1..m`` injectively into ``1..n``."""
    for k in range(min(m, n) + 1):
        for left in itertools.combinations(range(1, m + 1), k):
            for right in itertools.permutations(range(1, n + 1), k):
                yield tuple((i, m + j) for i, j in zip(left, right))


def multiply(A: WickElement, B: WickElement, q: float) -> WickElement:
    """Product of two Wick expansions.

    Bilinear over chaos components: a degree-m and a degree-n component
    multiply by summing over pairings that only join left legs to right legs,
    with weight ``q^crb`` evaluated in the concatenated leg set, and the
    corresponding tensor contraction of the coefficients.  Deterministic
    summation order.
    """
    if A.d != B.d:
        raise ValueError("dimension mismatch")
    d = A.d
    out = WickElement.zero(d)
    for m in sorted(A.chaos):
        F = A.chaos[m]
        for n in sorted(B.chaos):
            G = B.chaos[n]
            ctx = IndexSet.range(m + n)
            for pairs in _cross_pairings(m, n):
                _, _, crb = contraction_stats(Pairing(pairs, ctx))
                w = q ** crb
                if pairs:
                    axes_f = [s - 1 for s, _ in pairs]
                    axes_g = [t - m - 1 for _, t in pairs]
                    data = np.tensordot(F.data, G.data, axes=(axes_f, axes_g))
                else:
                    data = np.multiply.outer(F.data, G.data)
                term = FockTensor(d, w * data)
                out = out + WickElement.from_tensor(term)
    return out.trim()


def moment(vectors, q: float) -> float:
    """Vacuum moment of a product of field operators (q-weighted pair rule)."""
    fs = [np.asarray(f, dtype=float) for f in vectors]
    n = len(fs)
    if n % 2 == 1:
        return 0.0
    if n == 0:
        return 1.0
    gram = np.array([[float(np.dot(a, b)) for b in fs] for a in fs])
    total = 0.0
    for pairing in enumerate_pairings(IndexSet.range(n), n // 2):
        term = q ** crossing_number(pairing)
        for s, t in pairing.pairs:
            term *= gram[s - 1, t - 1]
        total += term
    return total


def vacuum_expectation(A: WickElement) -> float:
    """The chaos-0 coefficient; every higher chaos has zero vacuum mean."""
    if 0 in A.chaos:
        return float(A.chaos[0].data)
    return 0.0


def delta_q(A: WickElement, q: float) -> WickElement:
    """Scale the chaos-k coefficient by ``q^k`` (with ``0^0 = 1``)."""
    return WickElement(A.d, {k: F.scale(q ** k) for k, F in A.chaos.items()})


def triple_norm(A: WickElement, q: float) -> float:
    """The graded ℓ¹ algebra norm ``Σ_k (k+1) C^{3/2} D^k ||F_k||``."""
    if not -1.0 < q < 1.0:
        raise ValueError("norm undefined at q = ±1")
    nc = norm_constants(q)
    return sum((k + 1) * nc.C ** 1.5 * nc.D ** k * F.norm()
               for k, F in sorted(A.chaos.items()))


def to_operator(A: WickElement, q: float, cutoff: int) -> TruncatedOperator:
    """Matrix realisation via Wick blocks on the truncated Fock space.

    Exactness on the vacuum requires ``cutoff >= max chaos degree``; applied
    to the vacuum, the operator reproduces the chaos coefficients exactly.
    """
    if A.max_degree() > cutoff:
        raise TruncationCutoffError(
            f"cutoff {cutoff} too small for chaos degree {A.max_degree()}")
    op = zero_operator(A.d, cutoff)
    for n in sorted(A.chaos):
        F = A.chaos[n]
        if n == 0:
            op = op + identity_operator(A.d, cutoff, scalar=float(F.data))
            continue
        for ell in range(n + 1):
            op = op + wick_block_matrix(n - ell, ell, F, q, cutoff)
    return op
