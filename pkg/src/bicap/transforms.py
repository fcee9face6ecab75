"""Moebius, co-Moebius and interaction transforms of games and bi-games.

Representations are dense tables (absent entries are simply zero); the JSON
layer writes them sparsely. The Moebius transform and its inverse are axis-wise
finite differences and cumulative sums over the product-of-chains layout
described in :mod:`bicap.setfn`.
"""

from dataclasses import dataclass
from functools import lru_cache
from math import factorial

import numpy as np

from . import kernels
from .setfn import (
    DEFAULT_TOL,
    MAX_N_PAIR,
    BiGame,
    Game,
    ValidationReport,
    as_cube,
    format_pair,
    format_set,
    full_mask,
    pair_index,
    pair_masks,
    popcount,
    popcount_table,
    pow3_table,
    twoadditive_support,
    zero_offset,
)

DIRECT_BIINTERACTION_CAP = 10


class NotTwoAdditiveError(ValueError):
    """Input carries mass outside the 2-additive index set."""


# ---------------------------------------------------------------------------
# representations


@dataclass(frozen=True, eq=False)
class _Rep:
    n: int
    values: np.ndarray
    family: str = "bi"

    def __post_init__(self):
        if self.family not in ("set", "bi"):
            raise ValueError(f"family must be 'set' or 'bi', got {self.family!r}")
        size = (1 << self.n) if self.family == "set" else 3 ** self.n
        arr = np.array(self.values, dtype=float)
        if arr.shape != (size,):
            raise ValueError(f"expected {size} values, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __call__(self, *key) -> float:
        if self.family == "set":
            (mask,) = key
            return float(self.values[mask])
        pos, neg = key
        return float(self.values[pair_index(self.n, pos, neg)])

    def support(self, tol: float = 0.0):
        """Indices carrying an entry of magnitude above ``tol``."""
        return np.flatnonzero(np.abs(self.values) > tol)


class MobiusRep(_Rep):
    """Moebius transform ``m`` of a game (``family='set'``) or bi-game (``'bi'``)."""


class CoMobiusRep(_Rep):
    """Co-Moebius transform (commonality function) of a game."""


class InteractionRep(_Rep):
    """Interaction transform ``I(A)`` or ``I_{S,T}``."""


# ---------------------------------------------------------------------------
# raw table transforms


def mobius_sets(values: np.ndarray, n: int) -> np.ndarray:
    cube = as_cube(np.asarray(values, dtype=float), n, 2)
    for ax in range(n):
        cube = np.diff(cube, axis=ax, prepend=0.0)
    return cube.ravel()


def zeta_sets(values: np.ndarray, n: int) -> np.ndarray:
    cube = as_cube(np.asarray(values, dtype=float), n, 2)
    for ax in range(n):
        cube = np.cumsum(cube, axis=ax)
    return cube.ravel()


def mobius_pairs(values: np.ndarray, n: int) -> np.ndarray:
    cube = as_cube(np.asarray(values, dtype=float), n, 3)
    for ax in range(n):
        cube = np.diff(cube, axis=ax, prepend=0.0)
    return cube.ravel()


def zeta_pairs(values: np.ndarray, n: int) -> np.ndarray:
    cube = as_cube(np.asarray(values, dtype=float), n, 3)
    for ax in range(n):
        cube = np.cumsum(cube, axis=ax)
    return cube.ravel()


# ---------------------------------------------------------------------------
# games


def mobius(c: Game) -> MobiusRep:
    return MobiusRep(c.n, mobius_sets(c.values, c.n), "set")


def bimobius(v: BiGame) -> MobiusRep:
    return MobiusRep(v.n, mobius_pairs(v.values, v.n), "bi")


def zeta(m: MobiusRep):
    """Inverse Moebius transform; returns a :class:`Game` or :class:`BiGame`."""
    if m.family == "set":
        return Game(m.n, zeta_sets(m.values, m.n))
    return BiGame(m.n, zeta_pairs(m.values, m.n))


def comobius(c: Game) -> CoMobiusRep:
    """``sum over B containing N \\ A of (-1)**(n - |B|) nu(B)``.

    Substituting ``D = N \\ B`` this is the zeta transform of
    ``D -> (-1)**|D| nu(N \\ D)``.
    """
    n = c.n
    masks = np.arange(1 << n)
    pc = popcount_table(n)
    signed = np.where(pc % 2 == 0, 1.0, -1.0) * c.values[full_mask(n) ^ masks]
    return CoMobiusRep(n, zeta_sets(signed, n), "set")


@lru_cache(maxsize=None)
def interaction_weights(n: int) -> np.ndarray:
    """``W[a, k] = (n - a - k)! k! / (n - a + 1)!`` for ``a + k <= n``."""
    W = np.zeros((n + 1, n + 1))
    for a in range(n + 1):
        for k in range(n - a + 1):
            W[a, k] = factorial(n - a - k) * factorial(k) / factorial(n - a + 1)
    W.setflags(write=False)
    return W


def interaction(c: Game) -> InteractionRep:
    """Interaction transform through the discrete derivative of ``c``."""
    n = c.n
    vals = kernels.capacity_interaction(np.ascontiguousarray(c.values), n, popcount_table(n), interaction_weights(n))
    return InteractionRep(n, vals, "set")


def derivative(c: Game, A: int, K: int) -> float:
    """``sum over L subset of A of (-1)**(|A| - |L|) nu(L u K)`` for ``K`` disjoint from ``A``."""
    if A & K:
        raise ValueError(f"K={format_set(K)} must be disjoint from A={format_set(A)}")
    a = popcount(A)
    total = 0.0
    L = A
    while True:
        total += (-1) ** (a - popcount(L)) * c.values[L | K]
        if L == 0:
            return float(total)
        L = (L - 1) & A


def bi_derivative(v: BiGame, S: int, T: int, K: int, L: int) -> float:
    """Bipolar derivative ``Delta_{S,T} v(K, L)``.

    Requires ``(S, T)`` disjoint, ``(K, L)`` a disjoint pair of ``N \\ S`` and
    ``L`` containing ``T``.
    """
    if S & T:
        raise ValueError("S and T must be disjoint")
    if (K | L) & S or K & L:
        raise ValueError("(K, L) must be a disjoint pair outside S")
    if T & ~L:
        raise ValueError("L must contain T")
    s, t = popcount(S), popcount(T)
    total = 0.0
    Sp = S
    while True:
        Tp = T
        while True:
            sign = (-1) ** ((s - popcount(Sp)) + (t - popcount(Tp)))
            total += sign * v(K | Sp, L & ~Tp)
            if Tp == 0:
                break
            Tp = (Tp - 1) & T
        if Sp == 0:
            return float(total)
        Sp = (Sp - 1) & S


def biinteraction(v) -> InteractionRep:
    """Bi-interaction as interval sums of the bi-Moebius transform.

    Accepts a :class:`BiGame` or its :class:`MobiusRep`.
    """
    m = v if isinstance(v, MobiusRep) else bimobius(v)
    if m.family != "bi":
        raise ValueError("biinteraction needs a bi-game or a bi-Moebius transform")
    n = m.n
    pos_of, neg_of = pair_masks(n)
    vals = kernels.interval_sum(
        np.ascontiguousarray(m.values), n, pow3_table(n), zero_offset(n), pos_of, neg_of, popcount_table(n)
    )
    return InteractionRep(n, vals, "bi")


def biinteraction_direct(v: BiGame) -> InteractionRep:
    """Bi-interaction straight from the weighted bipolar derivatives (slow path)."""
    n = v.n
    if n > DIRECT_BIINTERACTION_CAP:
        raise ValueError(f"direct bi-interaction is capped at n={DIRECT_BIINTERACTION_CAP}")
    pos_of, neg_of = pair_masks(n)
    vals = kernels.biinteraction_direct(
        np.ascontiguousarray(v.values), n, pow3_table(n), zero_offset(n), pos_of, neg_of,
        popcount_table(n), interaction_weights(n),
    )
    return InteractionRep(n, vals, "bi")


# ---------------------------------------------------------------------------
# 2-additive bi-capacities


def _pidx(n, pos, neg):
    return pair_index(n, pos, neg)


def twoadditive_violation(m: MobiusRep, tol: float = 1e-12) -> float:
    """Largest ``|m(A, B)|`` over pairs with ``|B| < n - 2``."""
    outside = ~twoadditive_support(m.n)
    return float(np.max(np.abs(m.values[outside]), initial=0.0))


def _interaction_outside(I: InteractionRep) -> float:
    pos_of, neg_of = pair_masks(I.n)
    pc = popcount_table(I.n)
    outside = pc[pos_of] + pc[neg_of] > 2
    return float(np.max(np.abs(I.values[outside]), initial=0.0))


def twoadd_I_from_m(m: MobiusRep, tol: float = 1e-9) -> InteractionRep:
    """Interaction of a 2-additive bi-capacity from its Moebius transform.

    Only the pairs with ``|S| + |T| <= 2`` are filled; ``I_{emptyset,emptyset}``
    uses the interval-sum weights ``1, 1/2, 1/3`` for ``|T'| = n, n-1, n-2``.
    """
    if m.family != "bi":
        raise ValueError("expected a bi-Moebius transform")
    if twoadditive_violation(m) > tol:
        raise NotTwoAdditiveError("Moebius transform is not 2-additive")
    n = m.n
    full = full_mask(n)
    mv = m.values
    out = np.zeros(3 ** n)

    def M(pos, neg):
        return mv[_pidx(n, pos, neg)]

    empty = M(0, full)
    singles = 0.0
    pairs = 0.0
    for i in range(n):
        bi = 1 << i
        ic = full ^ bi
        s_pos = 0.0
        s_neg = 0.0
        for j in range(n):
            if j == i:
                continue
            bj = 1 << j
            ijc = full ^ bi ^ bj
            s_pos += M(bi, ijc) + M(bi | bj, ijc)
            s_neg += M(bj, ijc) + M(0, ijc)
            out[_pidx(n, bi, bj)] = M(bi, ijc)
            if j > i:
                out[_pidx(n, bi | bj, 0)] = M(bi | bj, ijc)
                out[_pidx(n, 0, bi | bj)] = M(0, ijc)
                pairs += M(bi | bj, ijc) + M(bi, ijc) + M(bj, ijc) + M(0, ijc)
        out[_pidx(n, bi, 0)] = M(bi, ic) + 0.5 * s_pos
        out[_pidx(n, 0, bi)] = M(0, ic) + 0.5 * s_neg
        singles += M(bi, ic) + M(0, ic)
    out[zero_offset(n)] = empty + singles / 2.0 + pairs / 3.0
    return InteractionRep(n, out, "bi")


def twoadd_m_from_I(I: InteractionRep, tol: float = 1e-9) -> MobiusRep:
    """Moebius transform of a 2-additive bi-capacity from its interaction.

    ``m(emptyset, N)`` is recovered from ``I_{emptyset,emptyset}`` by inverting
    the interval sum restricted to the 2-additive support.
    """
    if I.family != "bi":
        raise ValueError("expected a bi-interaction")
    if _interaction_outside(I) > tol:
        raise NotTwoAdditiveError("interaction has entries with |S| + |T| > 2")
    n = I.n
    full = full_mask(n)
    iv = I.values
    out = np.zeros(3 ** n)

    def J(pos, neg):
        return iv[_pidx(n, pos, neg)]

    for i in range(n):
        bi = 1 << i
        s_pos = 0.0
        s_neg = 0.0
        for j in range(n):
            if j == i:
                continue
            bj = 1 << j
            ijc = full ^ bi ^ bj
            s_pos += J(bi, bj) + J(bi | bj, 0)
            s_neg += J(bj, bi) + J(0, bi | bj)
            out[_pidx(n, bi, ijc)] = J(bi, bj)
            if j > i:
                out[_pidx(n, bi | bj, ijc)] = J(bi | bj, 0)
                out[_pidx(n, 0, ijc)] = J(0, bi | bj)
        out[_pidx(n, bi, full ^ bi)] = J(bi, 0) - 0.5 * s_pos
        out[_pidx(n, 0, full ^ bi)] = J(0, bi) - 0.5 * s_neg
    singles = 0.0
    pairs = 0.0
    for i in range(n):
        bi = 1 << i
        singles += out[_pidx(n, bi, full ^ bi)] + out[_pidx(n, 0, full ^ bi)]
        for j in range(i + 1, n):
            bj = 1 << j
            ijc = full ^ bi ^ bj
            pairs += (out[_pidx(n, bi | bj, ijc)] + out[_pidx(n, bi, ijc)]
                      + out[_pidx(n, bj, ijc)] + out[_pidx(n, 0, ijc)])
    out[_pidx(n, 0, full)] = J(0, 0) - singles / 2.0 - pairs / 3.0
    return MobiusRep(n, out, "bi")


def _decode_other(n, i, code):
    """Ternary code over the criteria other than ``i`` -> masks ``(A, B)``."""
    A = B = 0
    for j in range(n):
        if j == i:
            continue
        d = code % 3
        code //= 3
        if d == 2:
            A |= 1 << j
        elif d == 0:
            B |= 1 << j
    return A, B


def _report_margins(rep, label, margins, tol):
    n = margins.shape[0]
    for i, code in zip(*np.nonzero(margins < -tol)):
        A, B = _decode_other(n, int(i), int(code))
        rep.add(label, f"i={i + 1}, (A,B)={format_pair(A, B)}", margins[i, code])


def mobius_margins(m: MobiusRep):
    """Left-hand sides of the two nonnegativity families on the Moebius side.

    Returns two ``(n, 3**(n-1))`` arrays, rows per criterion ``i`` and columns
    per ternary code of ``(A, B)`` in ``Q(N \\ i)``.
    """
    n = m.n
    full = full_mask(n)
    mv = m.values
    base1 = np.empty(n)
    base2 = np.empty(n)
    w1 = np.zeros((n, n, 3))
    w2 = np.zeros((n, n, 3))
    for i in range(n):
        bi = 1 << i
        base1[i] = mv[_pidx(n, bi, full ^ bi)]
        base2[i] = mv[_pidx(n, 0, full ^ bi)]
        for j in range(n):
            if j == i:
                continue
            bj = 1 << j
            ijc = full ^ bi ^ bj
            w1[i, j, 1] = mv[_pidx(n, bi, ijc)]
            w1[i, j, 2] = mv[_pidx(n, bi, ijc)] + mv[_pidx(n, bi | bj, ijc)]
            w2[i, j, 1] = mv[_pidx(n, 0, ijc)]
            w2[i, j, 2] = mv[_pidx(n, 0, ijc)] + mv[_pidx(n, bj, ijc)]
    return kernels.ternary_margins(base1, w1), kernels.ternary_margins(base2, w2)


def check_mobius_validity(m: MobiusRep, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Is ``m`` the Moebius transform of a normalized 2-additive bi-capacity?"""
    rep = ValidationReport("2-additive bi-Moebius")
    n = m.n
    full = full_mask(n)
    off = twoadditive_violation(m)
    if off > tol:
        rep.add("support outside 2-additive set", "|B| < n-2", off)
    pos_of, _ = pair_masks(n)
    total = m.values.sum() - 1.0
    bottom = m.values[_pidx(n, 0, full)]
    empty_sum = m.values[pos_of == 0].sum() - bottom - 1.0
    for label, resid in (("sum of m = 1", total), ("sum of m(emptyset,B), B != N = 1", empty_sum),
                         ("m(emptyset,N) = -1", bottom + 1.0)):
        rep.note_residual(resid)
        if abs(resid) > tol:
            rep.add(label, "(i)", resid)
    if n > MAX_N_PAIR:
        return rep
    g1, g2 = mobius_margins(m)
    _report_margins(rep, "(ii.1) negative", g1, tol)
    _report_margins(rep, "(ii.2) negative", g2, tol)
    rep.normalized = abs(total) <= tol and abs(bottom + 1.0) <= tol
    return rep


def interaction_identities(I: InteractionRep):
    """Residuals of the three linear identities of a normalized 2-additive bi-capacity."""
    n = I.n
    iv = I.values
    s_pos = sum(iv[_pidx(n, 1 << i, 0)] for i in range(n))
    s_neg = sum(iv[_pidx(n, 0, 1 << i)] for i in range(n))
    s_cross = sum(iv[_pidx(n, 1 << i, 1 << j)] for i in range(n) for j in range(n) if i != j)
    s_pp = sum(iv[_pidx(n, (1 << i) | (1 << j), 0)] for i in range(n) for j in range(i + 1, n))
    s_nn = sum(iv[_pidx(n, 0, (1 << i) | (1 << j))] for i in range(n) for j in range(i + 1, n))
    r1 = s_pos + s_neg - 2.0
    r2 = s_neg - (0.5 * s_cross + 1.0)
    r3 = iv[zero_offset(n)] + (s_cross + s_pp + s_nn) / 6.0
    return r1, r2, r3


def interaction_margins(I: InteractionRep):
    """Left-hand sides of the two nonnegativity families on the interaction side."""
    n = I.n
    iv = I.values
    base1 = np.empty(n)
    base2 = np.empty(n)
    w1 = np.zeros((n, n, 3))
    w2 = np.zeros((n, n, 3))
    for i in range(n):
        bi = 1 << i
        base1[i] = iv[_pidx(n, bi, 0)]
        base2[i] = iv[_pidx(n, 0, bi)]
        for j in range(n):
            if j == i:
                continue
            bj = 1 << j
            pp = iv[_pidx(n, bi | bj, 0)]
            ij = iv[_pidx(n, bi, bj)]
            nn = iv[_pidx(n, 0, bi | bj)]
            ji = iv[_pidx(n, bj, bi)]
            # states: 0 -> j in B, 1 -> j in neither, 2 -> j in A
            w1[i, j] = 0.5 * np.array([-pp - ij, -pp + ij, pp + ij])
            w2[i, j] = 0.5 * np.array([-nn - ji, nn - ji, nn + ji])
    return kernels.ternary_margins(base1, w1), kernels.ternary_margins(base2, w2)


def check_interaction_validity(I: InteractionRep, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Is ``I`` the interaction of a normalized 2-additive bi-capacity?"""
    rep = ValidationReport("2-additive bi-interaction")
    off = _interaction_outside(I)
    if off > tol:
        rep.add("support outside |S|+|T| <= 2", "(S,T)", off)
    labels = ("(i) sum I(i,0) + I(0,i) = 2", "(ii) sum I(0,i) = sum I(i,j)/2 + 1",
              "(iii) I(0,0) = -(sum I(i,j) + sum I(ij,0) + I(0,ij))/6")
    for label, resid in zip(labels, interaction_identities(I)):
        rep.note_residual(resid)
        if abs(resid) > tol:
            rep.add(label, "identity", resid)
    g1, g2 = interaction_margins(I)
    _report_margins(rep, "(ii.1) negative", g1, tol)
    _report_margins(rep, "(ii.2) negative", g2, tol)
    rep.normalized = all(abs(r) <= tol for r in interaction_identities(I))
    return rep


def is_k_additive(m: MobiusRep, k: int, tol: float = 1e-12) -> bool:
    """Moebius vanishes above order ``k`` (sets: ``|A| > k``; pairs: ``|B| < n - k``)."""
    pc = popcount_table(m.n)
    if m.family == "set":
        outside = pc > k
    else:
        _, neg_of = pair_masks(m.n)
        outside = pc[neg_of] < m.n - k
    return bool(np.all(np.abs(m.values[outside]) <= tol))
