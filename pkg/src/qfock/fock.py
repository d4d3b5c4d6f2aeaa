"""Exact finite-dimensional q-Fock space: graded tensors, the q-symmetrizer,
creation/annihilation/field operators, Wick blocks, and norm estimation.

Everything acts on the truncated Fock space ``⊕_{k<=N} H^{⊗k}`` over a real
``d``-dimensional one-particle space.  Operators track on which input sectors
they are *exact* (no intermediate result ever leaves the truncation); applying
an operator outside its exact range raises ``TruncationError`` instead of
silently truncating.  Sector blocks are materialised lazily and cached, since
a block from sector ``k`` to sector ``k'`` has ``d^{k+k'}`` entries.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np


class TruncationError(ValueError):
    """An operation would need sectors beyond the truncation cutoff."""


# ---------------------------------------------------------------------------
# graded tensors and vectors
# ---------------------------------------------------------------------------


class FockTensor:
    """A degree-k coefficient tensor over the d-dimensional real basis."""

    __slots__ = ("d", "data")

    def __init__(self, d: int, data) -> None:
        self.d = int(d)
        arr = np.asarray(data, dtype=float)
        if arr.ndim > 0 and any(s != self.d for s in arr.shape):
            raise ValueError(f"expected shape ({self.d},)*k, got {arr.shape}")
        self.data = arr

    @property
    def degree(self) -> int:
        return self.data.ndim

    def norm(self) -> float:
        """Euclidean (flat) norm of the coefficient array."""
        return float(np.linalg.norm(self.data.ravel()))

    @staticmethod
    def scalar(d: int, value: float) -> "FockTensor":
        return FockTensor(d, np.asarray(float(value)))

    @staticmethod
    def zeros(d: int, degree: int) -> "FockTensor":
        return FockTensor(d, np.zeros((d,) * degree))

    @staticmethod
    def from_vectors(vectors) -> "FockTensor":
        """Elementary tensor f_1 ⊗ ... ⊗ f_k."""
        vs = [np.asarray(v, dtype=float) for v in vectors]
        d = vs[0].shape[0]
        out = np.asarray(1.0)
        for v in vs:
            if v.shape != (d,):
                raise ValueError("all vectors must share the dimension")
            out = np.multiply.outer(out, v)
        return FockTensor(d, out)

    @staticmethod
    def basis_word(d: int, word) -> "FockTensor":
        t = np.zeros((d,) * len(word))
        t[tuple(word)] = 1.0
        return FockTensor(d, t)

    def __add__(self, other: "FockTensor") -> "FockTensor":
        return FockTensor(self.d, self.data + other.data)

    def __sub__(self, other: "FockTensor") -> "FockTensor":
        return FockTensor(self.d, self.data - other.data)

    def scale(self, c: float) -> "FockTensor":
        return FockTensor(self.d, c * self.data)

    def to_json(self) -> dict:
        coeffs = []
        if self.degree == 0:
            if self.data != 0.0:
                coeffs.append({"word": [], "value": float(self.data)})
        else:
            for word in sorted(zip(*np.nonzero(self.data))):
                coeffs.append({"word": [int(i) for i in word],
                               "value": float(self.data[word])})
        return {"d": self.d, "degree": self.degree, "coeffs": coeffs}

    @staticmethod
    def from_json(obj: dict) -> "FockTensor":
        t = FockTensor.zeros(obj["d"], obj["degree"])
        for entry in obj["coeffs"]:
            word = tuple(entry["word"])
            if obj["degree"] == 0:
                t.data = np.asarray(float(entry["value"]))
            else:
                t.data[word] = float(entry["value"])
        return t

    def __repr__(self) -> str:
        return f"FockTensor(d={self.d}, degree={self.degree})"


class FockVector:
    """An element of the graded Fock space with finitely many sectors."""

    __slots__ = ("d", "sectors")

    def __init__(self, d: int, sectors: dict[int, np.ndarray] | None = None) -> None:
        self.d = int(d)
        self.sectors: dict[int, np.ndarray] = {}
        for k, arr in (sectors or {}).items():
            arr = np.asarray(arr, dtype=float)
            if arr.shape != (self.d,) * k:
                raise ValueError(f"sector {k} has shape {arr.shape}")
            self.sectors[int(k)] = arr

    @staticmethod
    def vacuum(d: int) -> "FockVector":
        return FockVector(d, {0: np.asarray(1.0)})

    def sector(self, k: int) -> np.ndarray:
        return self.sectors.get(k, np.zeros((self.d,) * k))

    def __add__(self, other: "FockVector") -> "FockVector":
        out = dict(self.sectors)
        for k, arr in other.sectors.items():
            out[k] = out.get(k, 0.0) + arr
        return FockVector(self.d, out)

    def scale(self, c: float) -> "FockVector":
        return FockVector(self.d, {k: c * v for k, v in self.sectors.items()})

    def f0_inner(self, other: "FockVector") -> float:
        tot = 0.0
        for k in sorted(set(self.sectors) & set(other.sectors)):
            tot += float(np.vdot(self.sectors[k], other.sectors[k]))
        return tot

    def fq_inner(self, other: "FockVector", q: float) -> float:
        tot = 0.0
        for k in sorted(set(self.sectors) & set(other.sectors)):
            tot += float(np.vdot(self.sectors[k], pq_apply(other.sectors[k], q)))
        return tot

    def f0_norm(self) -> float:
        return float(np.sqrt(max(self.f0_inner(self), 0.0)))


# ---------------------------------------------------------------------------
# the q-symmetrizer
# ---------------------------------------------------------------------------


def _inversions(perm) -> int:
    n = len(perm)
    return sum(1 for i in range(n) for j in range(i + 1, n) if perm[j] < perm[i])


def permute_factors(tensor: np.ndarray, perm) -> np.ndarray:
    """Action of a permutation on tensor factors.

    For an elementary tensor, ``permute_factors(f_1⊗...⊗f_n, σ)`` equals
    ``f_{σ(1)} ⊗ ... ⊗ f_{σ(n)}`` with σ given 0-based in one-line notation.
    """
    return np.transpose(tensor, axes=list(perm))


def _pq_apply_axes(tensor: np.ndarray, axes: list[int], q: float) -> np.ndarray:
    """q-symmetrize the listed (contiguous-in-meaning) tensor axes.

    Uses the coset recursion: symmetrizing k factors equals symmetrizing the
    last k-1 and then summing the ``q^{j-1}``-weighted rotations that move the
    first factor into position j.  Cost is polynomial in the degree rather
    than factorial.
    """
    out = np.asarray(tensor, dtype=float).copy()
    for k in range(2, len(axes) + 1):
        group = axes[-k:]
        acc = out.copy()
        for j in range(2, k + 1):
            acc += q ** (j - 1) * np.moveaxis(out, group[0], group[j - 1])
        out = acc
    return out


def pq_apply(tensor: np.ndarray, q: float) -> np.ndarray:
    """Apply the q-symmetrizer ``Σ_σ q^{inv(σ)} U_σ`` to a degree-n tensor."""
    n = np.ndim(tensor)
    if n <= 1:
        return np.asarray(tensor, dtype=float).copy()
    return _pq_apply_axes(tensor, list(range(n)), q)


def pq_matrix(d: int, n: int, q: float) -> np.ndarray:
    """The q-symmetrizer on ``H^{⊗n}`` as a dense ``d^n × d^n`` matrix."""
    if n == 0:
        return np.ones((1, 1))
    dim = d ** n
    batch = np.eye(dim).reshape((dim,) + (d,) * n)
    sym = _pq_apply_axes(batch, list(range(1, n + 1)), q)
    return sym.reshape(dim, dim).T


def q_inner(left: FockTensor, right: FockTensor, q: float) -> float:
    """The q-twisted inner product ``<F, P_q G>``; zero across degrees."""
    if left.d != right.d:
        raise ValueError("dimension mismatch")
    if left.degree != right.degree:
        return 0.0
    return float(np.vdot(left.data, pq_apply(right.data, q)))


# ---------------------------------------------------------------------------
# truncated operators
# ---------------------------------------------------------------------------


@dataclass
class TruncatedOperator:
    """A linear map between particle sectors of the truncated Fock space.

    ``out_map[k]`` lists the sectors that input sector ``k`` can reach; input
    sectors absent from ``out_map`` are not exact.  Blocks are dense matrices
    of shape ``(d^{k_out}, d^{k_in})``, built lazily by ``_maker`` and cached.
    """

    d: int
    cutoff: int
    out_map: dict[int, tuple[int, ...]]
    _maker: object  # callable: k_in -> dict[k_out, ndarray]
    _cache: dict | None = None

    def __post_init__(self):
        if self._cache is None:
            self._cache = {}

    @property
    def exact_sectors(self) -> set[int]:
        return set(self.out_map)

    def shifts(self) -> tuple[int, int]:
        deltas = [o - k for k, outs in self.out_map.items() for o in outs]
        if not deltas:
            return (0, 0)
        return (min(deltas), max(deltas))

    def block(self, k_in: int) -> dict[int, np.ndarray]:
        if k_in not in self.out_map:
            raise TruncationError(
                f"operator is not exact on input sector {k_in} (cutoff {self.cutoff})")
        if k_in not in self._cache:
            made = self._maker(k_in)
            self._cache[k_in] = {k: np.asarray(m, dtype=float) for k, m in made.items()}
        return self._cache[k_in]

    def apply(self, vec: FockVector) -> FockVector:
        if vec.d != self.d:
            raise ValueError("dimension mismatch")
        out: dict[int, np.ndarray] = {}
        for k, arr in vec.sectors.items():
            if not np.any(arr):
                continue
            for k_out, mat in self.block(k).items():
                flat = mat @ arr.reshape(-1)
                add = flat.reshape((self.d,) * k_out)
                out[k_out] = out.get(k_out, 0.0) + add
        return FockVector(self.d, out)

    # -- algebra ------------------------------------------------------------

    def _binary_outmap(self, other: "TruncatedOperator") -> dict[int, tuple[int, ...]]:
        common = self.exact_sectors & other.exact_sectors
        return {k: tuple(sorted(set(self.out_map[k]) | set(other.out_map[k])))
                for k in sorted(common)}

    def __add__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        if self.d != other.d:
            raise ValueError("dimension mismatch")
        a, b = self, other

        def maker(k):
            out: dict[int, np.ndarray] = {}
            for src in (a, b):
                for k_out, mat in src.block(k).items():
                    out[k_out] = out.get(k_out, 0.0) + mat
            return out

        return TruncatedOperator(self.d, min(self.cutoff, other.cutoff),
                                 self._binary_outmap(other), maker)

    def __sub__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        return self + other.scale(-1.0)

    def scale(self, c: float) -> "TruncatedOperator":
        base = self

        def maker(k):
            return {k_out: c * mat for k_out, mat in base.block(k).items()}

        return TruncatedOperator(self.d, self.cutoff, dict(self.out_map), maker)

    def __rmul__(self, c: float) -> "TruncatedOperator":
        return self.scale(float(c))

    def compose(self, inner: "TruncatedOperator") -> "TruncatedOperator":
        """The product self∘inner (inner applied first)."""
        if self.d != inner.d:
            raise ValueError("dimension mismatch")
        outer = self
        out_map: dict[int, tuple[int, ...]] = {}
        for k, mids in inner.out_map.items():
            if all(m in outer.out_map for m in mids):
                outs: set[int] = set()
                for m in mids:
                    outs.update(outer.out_map[m])
                out_map[k] = tuple(sorted(outs))

        def maker(k):
            out: dict[int, np.ndarray] = {}
            for mid, bmat in inner.block(k).items():
                for k_out, amat in outer.block(mid).items():
                    out[k_out] = out.get(k_out, 0.0) + amat @ bmat
            return out

        return TruncatedOperator(self.d, min(self.cutoff, inner.cutoff), out_map, maker)

    def __matmul__(self, inner: "TruncatedOperator") -> "TruncatedOperator":
        return self.compose(inner)

    # -- dense restrictions ---------------------------------------------------

    def restricted_matrix(self, sectors_in, sectors_out=None) -> np.ndarray:
        """Stacked dense matrix over the given input (and output) sectors."""
        sectors_in = sorted(sectors_in)
        if not sectors_in:
            raise ValueError("empty sector range")
        if sectors_out is None:
            outs: set[int] = set()
            for k in sectors_in:
                outs.update(self.block(k).keys())
            sectors_out = sorted(outs) if outs else [0]
        else:
            sectors_out = sorted(sectors_out)
        col_off = np.cumsum([0] + [self.d ** k for k in sectors_in])
        row_off = np.cumsum([0] + [self.d ** k for k in sectors_out])
        out_pos = {k: i for i, k in enumerate(sectors_out)}
        mat = np.zeros((row_off[-1], col_off[-1]))
        for ci, k in enumerate(sectors_in):
            for k_out, blk in self.block(k).items():
                if k_out not in out_pos:
                    continue
                ri = out_pos[k_out]
                mat[row_off[ri]:row_off[ri + 1], col_off[ci]:col_off[ci + 1]] = blk
        return mat


# ---------------------------------------------------------------------------
# operator constructors
# ---------------------------------------------------------------------------


def zero_operator(d: int, cutoff: int) -> TruncatedOperator:
    out_map = {k: () for k in range(cutoff + 1)}
    return TruncatedOperator(d, cutoff, out_map, lambda k: {})


def identity_operator(d: int, cutoff: int, scalar: float = 1.0) -> TruncatedOperator:
    out_map = {k: (k,) for k in range(cutoff + 1)}

    def maker(k):
        return {k: scalar * np.eye(d ** k)}

    return TruncatedOperator(d, cutoff, out_map, maker)


def _creation_block(f: np.ndarray, k: int) -> np.ndarray:
    return np.kron(f.reshape(-1, 1), np.eye(len(f) ** k))


def _annihilation_block(f: np.ndarray, q: float, k: int) -> np.ndarray:
    # X ↦ Σ_i q^{i-1} <f, X_i> · (X without factor i)
    d = len(f)
    out = np.zeros((d ** (k - 1), d ** k))
    for i in range(1, k + 1):
        term = np.kron(np.kron(np.eye(d ** (i - 1)), f.reshape(1, -1)),
                       np.eye(d ** (k - i)))
        out += q ** (i - 1) * term
    return out


def creation(f, cutoff: int) -> TruncatedOperator:
    """Prepend ``f``: sector k -> k+1; exact strictly below the cutoff."""
    f = np.asarray(f, dtype=float)
    d = len(f)
    out_map = {k: (k + 1,) for k in range(cutoff)}

    def maker(k):
        return {k + 1: _creation_block(f, k)}

    return TruncatedOperator(d, cutoff, out_map, maker)


def annihilation(f, q: float, cutoff: int) -> TruncatedOperator:
    """Contract with ``f`` at position i, weighted ``q^{i-1}``; kills the vacuum."""
    f = np.asarray(f, dtype=float)
    d = len(f)
    out_map: dict[int, tuple[int, ...]] = {0: ()}
    out_map.update({k: (k - 1,) for k in range(1, cutoff + 1)})

    def maker(k):
        if k == 0:
            return {}
        return {k - 1: _annihilation_block(f, q, k)}

    return TruncatedOperator(d, cutoff, out_map, maker)


def field_operator(f, q: float, cutoff: int) -> TruncatedOperator:
    """The self-adjoint noise field: creation plus annihilation."""
    return creation(f, cutoff) + annihilation(f, q, cutoff)


# Cache of annihilation-word matrices for basis letters, keyed by
# (d, q, input sector, letter word).  Entries are small and reused heavily
# when assembling Wick blocks.
_ANN_WORD_CACHE: dict = {}


def _ann_word_matrix(d: int, q: float, m: int, word: tuple[int, ...]) -> np.ndarray:
    key = (d, float(q), m, word)
    cached = _ANN_WORD_CACHE.get(key)
    if cached is not None:
        return cached
    b = len(word)
    mat = np.eye(d ** m)
    # rightmost annihilation acts first: letters applied in reverse order
    for j in range(b, 0, -1):
        sector = m - (b - j)
        e = np.zeros(d)
        e[word[j - 1]] = 1.0
        mat = _annihilation_block(e, q, sector) @ mat
    _ANN_WORD_CACHE[key] = mat
    return mat


def _shuffle_weighted_tensor(F: np.ndarray, a: int, q: float) -> np.ndarray:
    """Sum of axis-splits of F into ``a`` creation and ``n-a`` annihilation slots.

    Each split (S, T) with S the sorted creation axes contributes
    ``q^{#{(s,t) in S×T : s > t}} · F_{axes reordered to S then T}``.
    """
    n = F.ndim
    out = np.zeros_like(F)
    axes_all = range(n)
    for S in itertools.combinations(axes_all, a):
        T = tuple(i for i in axes_all if i not in S)
        w = sum(1 for s in S for t in T if s > t)
        out += q ** w * np.transpose(F, axes=S + T)
    return out


def wick_block_matrix(k: int, ell: int, F: FockTensor, q: float, cutoff: int) -> TruncatedOperator:
    """The Wick block creating ``k`` and annihilating ``ell`` particles from F.

    Realises the shuffle-weighted sum of operator words
    ``α†(·)…α†(·) α_q(·)…α_q(·)`` fed by the slots of the degree-(k+ell)
    tensor F.  Annihilates every sector below ``ell``; shifts degree by
    ``k - ell`` elsewhere.
    """
    if F.degree != k + ell:
        raise ValueError(f"tensor degree {F.degree} != k+ell = {k + ell}")
    d = F.d
    if k + ell == 0:
        return identity_operator(d, cutoff, scalar=float(F.data))
    hat = _shuffle_weighted_tensor(F.data, k, q)
    out_map: dict[int, tuple[int, ...]] = {}
    for m in range(cutoff + 1):
        if m < ell:
            out_map[m] = ()
        elif m - ell + k <= cutoff:
            out_map[m] = (m - ell + k,)

    def maker(m):
        if m < ell:
            return {}
        rest = m - ell
        blk = np.zeros((d ** (k + rest), d ** m))
        for word in itertools.product(range(d), repeat=ell):
            c = hat[(slice(None),) * k + word] if k > 0 else hat[word]
            c_col = np.asarray(c, dtype=float).reshape(-1, 1)
            if not np.any(c_col):
                continue
            ann = _ann_word_matrix(d, q, m, word)
            blk += np.kron(c_col, np.eye(d ** rest)) @ ann
        return {k + rest: blk}

    return TruncatedOperator(d, cutoff, out_map, maker)


# ---------------------------------------------------------------------------
# norm estimation
# ---------------------------------------------------------------------------


def _sqrt_and_inv_sqrt(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    vals, vecs = np.linalg.eigh(mat)
    if np.min(vals) <= 0:
        raise ValueError("metric matrix is not positive definite")
    r = np.sqrt(vals)
    return (vecs * r) @ vecs.T, (vecs / r) @ vecs.T


def operator_norm(op: TruncatedOperator, sectors, metric: str = "f0",
                  q: float | None = None, tol: float = 1e-9,
                  max_iter: int = 10000, seed: int = 0) -> float:
    """Largest singular value of the operator restricted to ``sectors``.

    Power iteration on ``MᵀM`` with a deterministic seeded start vector,
    stopping when the estimate is stable to relative tolerance ``tol``.
    With ``metric="fq"`` the singular value is taken in the q-twisted
    geometry (blocks conjugated by ``P_q^{±1/2}``), which requires |q| < 1.
    """
    sectors = sorted(sectors)
    if not sectors:
        raise ValueError("empty sector range")
    outs: set[int] = set()
    for k in sectors:
        outs.update(op.block(k).keys())
    sectors_out = sorted(outs) if outs else [0]
    mat = op.restricted_matrix(sectors, sectors_out)
    if metric == "fq":
        if q is None:
            raise ValueError("metric='fq' requires q")
        if not -1.0 < q < 1.0:
            raise ValueError("q-metric norm requires |q| < 1")
        in_blocks = [_sqrt_and_inv_sqrt(pq_matrix(op.d, k, q))[1] for k in sectors]
        out_blocks = [_sqrt_and_inv_sqrt(pq_matrix(op.d, k, q))[0] for k in sectors_out]
        col_off = np.cumsum([0] + [op.d ** k for k in sectors])
        row_off = np.cumsum([0] + [op.d ** k for k in sectors_out])
        for i, blk in enumerate(out_blocks):
            mat[row_off[i]:row_off[i + 1], :] = blk @ mat[row_off[i]:row_off[i + 1], :]
        for j, blk in enumerate(in_blocks):
            mat[:, col_off[j]:col_off[j + 1]] = mat[:, col_off[j]:col_off[j + 1]] @ blk
    elif metric != "f0":
        raise ValueError(f"unknown metric {metric!r}")

    rng = np.random.default_rng(seed)
    x = rng.standard_normal(mat.shape[1])
    nx = np.linalg.norm(x)
    if nx == 0 or not np.any(mat):
        return 0.0
    x /= nx
    sigma_old = np.inf
    sigma = 0.0
    for _ in range(max_iter):
        y = mat @ x
        sigma = float(np.linalg.norm(y))
        if sigma == 0.0:
            return 0.0
        x = mat.T @ y
        x /= np.linalg.norm(x)
        if abs(sigma - sigma_old) <= tol * max(sigma, 1e-300):
            break
        sigma_old = sigma
    return sigma


def load_json_tensor(text: str) -> FockTensor:
    return FockTensor.from_json(json.loads(text))
