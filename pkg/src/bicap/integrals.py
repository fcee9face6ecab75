"""Choquet-type integrals: classical, symmetric/asymmetric, CPT, bi-capacity
and bipolar-capacity versions, each closed form as its own code path.

None of the alternative forms calls another one, so comparing them is a real
check. Acts are plain 1-d float arrays; subsets are bitmasks.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels
from .setfn import (
    DEFAULT_TOL,
    BiCapacity,
    BiGame,
    BipolarCapacity,
    Capacity,
    Game,
    ValidationReport,
    as_act,
    conjugate,
    decompose_act,
    format_pair,
    full_mask,
    pair_index,
    pair_masks,
    popcount_table,
    pow3_table,
    zero_offset,
)
from .transforms import (
    InteractionRep,
    MobiusRep,
    NotTwoAdditiveError,
    comobius,
    interaction,
    mobius,
    twoadditive_violation,
)


class EbViolationError(ValueError):
    """Bipolar capacity does not satisfy the permutation-invariance condition."""


class InadmissiblePermutationError(ValueError):
    pass


# ---------------------------------------------------------------------------
# helpers


def _ascending(values):
    return np.argsort(values, kind="stable")


def _suffix_masks(order):
    """``out[i]`` = mask of ``order[i:]``; ``out[n]`` = 0."""
    n = len(order)
    out = [0] * (n + 1)
    acc = 0
    for j in range(n - 1, -1, -1):
        acc |= 1 << int(order[j])
        out[j] = acc
    return out


def subset_minima(f):
    """``mins[A] = min over A of f`` with the empty-set convention ``0``."""
    f = np.asarray(f, dtype=float)
    n = f.shape[0]
    mins = np.full(1 << n, np.inf)
    for i in range(n):
        lo, hi = 1 << i, 1 << (i + 1)
        mins[lo:hi] = np.minimum(mins[:lo], f[i])
    mins[0] = 0.0
    return mins


def subset_maxima(f):
    """``maxs[A] = max over A of f`` with the empty-set convention ``0``."""
    return -subset_minima(-np.asarray(f, dtype=float))


def _check_n(obj, f):
    return as_act(f, obj.n)


# ---------------------------------------------------------------------------
# classical Choquet integral


def choquet(c: Game, f, form: str = "differences") -> float:
    """Choquet integral of a nonnegative act w.r.t. a game.

    ``form='differences'`` sums ``(f_(i) - f_(i-1)) nu(A_(i))``;
    ``form='increments'`` sums ``f_(i) (nu(A_(i)) - nu(A_(i+1)))`` over the
    distinct values of ``f`` only, so tied entries contribute one term.
    """
    f = _check_n(c, f)
    if np.any(f < 0):
        raise ValueError("choquet needs a nonnegative act; use the signed variants otherwise")
    order = _ascending(f)
    levels = _suffix_masks(order)
    nu = c.values
    fs = f[order]
    if form == "differences":
        prev = np.concatenate([[0.0], fs[:-1]])
        return float(np.sum((fs - prev) * nu[levels[:-1]]))
    if form == "increments":
        starts = np.flatnonzero(np.concatenate([[True], fs[1:] != fs[:-1]]))
        masks = np.asarray(levels)[np.append(starts, len(fs))]
        return float(np.sum(fs[starts] * (nu[masks[:-1]] - nu[masks[1:]])))
    raise ValueError(f"unknown form {form!r}")


def choquet_asymmetric(c: Capacity, f) -> float:
    """``C_nu(f+) - C_conj(nu)(f-)``."""
    f = _check_n(c, f)
    return choquet(c, np.maximum(f, 0.0)) - choquet(conjugate(c), np.maximum(-f, 0.0))


def choquet_symmetric(c: Capacity, f) -> float:
    """Sipos integral ``C_nu(f+) - C_nu(f-)``."""
    f = _check_n(c, f)
    return choquet(c, np.maximum(f, 0.0)) - choquet(c, np.maximum(-f, 0.0))


# ---------------------------------------------------------------------------
# cumulative prospect theory


@dataclass(frozen=True)
class CptModel:
    nu_plus: Capacity
    nu_minus: Capacity

    def __post_init__(self):
        if self.nu_plus.n != self.nu_minus.n:
            raise ValueError("gain and loss capacities live on different ground sets")

    @property
    def n(self):
        return self.nu_plus.n


CPT_PATHS = ("definition", "explicit", "mobius", "comobius")


def cpt(model: CptModel, f, path: str = "definition") -> float:
    """CPT value ``C_{nu+}(f+) - C_{nu-}(f-)`` by one of four routes.

    ``definition`` uses two classical integrals; ``explicit`` the single sorted
    sum over signed values; ``mobius`` and ``comobius`` the transforms of the
    two capacities.
    """
    f = _check_n(model, f)
    if path == "definition":
        return choquet(model.nu_plus, np.maximum(f, 0.0)) - choquet(model.nu_minus, np.maximum(-f, 0.0))
    if path == "explicit":
        return _cpt_explicit(model, f)
    if path == "mobius":
        return _cpt_mobius(model, f)
    if path == "comobius":
        return _cpt_comobius(model, f)
    raise ValueError(f"unknown CPT path {path!r}")


def _cpt_explicit(model, f):
    n = f.shape[0]
    order = _ascending(f)
    fs = f[order]
    p = int(np.sum(f < 0))
    up = model.nu_plus.values
    um = model.nu_minus.values
    prefix = [0] * (n + 1)
    for j in range(n):
        prefix[j + 1] = prefix[j] | (1 << int(order[j]))
    suffix = _suffix_masks(order)
    total = 0.0
    # losses: sigma(1..p) are the negative entries, most negative first
    for i in range(1, p):
        total += (fs[i - 1] - fs[i]) * um[prefix[i]]
    if p > 0:
        total += fs[p - 1] * um[prefix[p]]
    if p < n:
        total += fs[p] * up[suffix[p]]
    for i in range(p + 1, n):
        total += (fs[i] - fs[i - 1]) * up[suffix[i]]
    return float(total)


def _cpt_mobius(model, f):
    n = f.shape[0]
    mp = mobius(model.nu_plus).values
    mm = mobius(model.nu_minus).values
    masks = np.arange(1 << n)
    d = decompose_act(f)
    in_plus = (masks & ~d.n_plus) == 0
    in_minus = (masks & ~d.n_minus) == 0
    return float(mp[in_plus] @ subset_minima(f)[in_plus] + mm[in_minus] @ subset_maxima(f)[in_minus])


def _cpt_comobius(model, f):
    n = f.shape[0]
    cp = comobius(model.nu_plus).values
    cm = comobius(model.nu_minus).values
    masks = np.arange(1 << n)
    d = decompose_act(f)
    sign = np.where(popcount_table(n) % 2 == 1, 1.0, -1.0)
    hit_plus = (masks & d.n_plus) != 0
    hit_minus = (masks & d.n_minus) != 0
    return float((sign * cp)[hit_plus] @ subset_maxima(f)[hit_plus]
                 + (sign * cm)[hit_minus] @ subset_minima(f)[hit_minus])


# ---------------------------------------------------------------------------
# 2-additive closed forms for capacities


def _pair_terms(I: InteractionRep):
    n = I.n
    iv = I.values
    single = np.array([iv[1 << i] for i in range(n)])
    pair = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            pair[i, j] = pair[j, i] = iv[(1 << i) | (1 << j)]
    return single, pair


def _require_2additive_set(I: InteractionRep, tol):
    pc = popcount_table(I.n)
    off = float(np.max(np.abs(I.values[pc > 2]), initial=0.0))
    if off > tol:
        raise NotTwoAdditiveError(f"interaction has mass {off:.3g} above pairs")


def choquet_asymmetric_2additive(I: InteractionRep, f, tol: float = DEFAULT_TOL) -> float:
    """Asymmetric integral of a 2-additive capacity from its interaction."""
    _require_2additive_set(I, tol)
    f = _check_n(I, f)
    single, pair = _pair_terms(I)
    n = I.n
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            w = pair[i, j]
            if w > 0:
                total += w * min(f[i], f[j])
            elif w < 0:
                total += -w * max(f[i], f[j])
    absum = np.abs(pair).sum(axis=1)
    total += float(f @ (single - 0.5 * absum))
    return float(total)


def choquet_symmetric_2additive(I: InteractionRep, f, tol: float = DEFAULT_TOL) -> float:
    """Sipos integral of a 2-additive capacity from its interaction."""
    _require_2additive_set(I, tol)
    f = _check_n(I, f)
    single, pair = _pair_terms(I)
    n = I.n
    plus = f >= 0
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            w = pair[i, j]
            if plus[i] and plus[j]:
                if w > 0:
                    total += w * min(f[i], f[j])
                elif w < 0:
                    total += -w * max(f[i], f[j])
            elif not plus[i] and not plus[j]:
                if w > 0:
                    total += w * max(f[i], f[j])
                elif w < 0:
                    total += -w * min(f[i], f[j])
    for i in range(n):
        cross = sum(-pair[i, j] for j in range(n) if plus[j] != plus[i] and pair[i, j] < 0)
        total += f[i] * cross
    absum = np.abs(pair).sum(axis=1)
    total += float(f @ (single - 0.5 * absum))
    return float(total)


def cpt_2additive(model: CptModel, f, tol: float = DEFAULT_TOL) -> float:
    """CPT value of a model with 2-additive gain and loss capacities."""
    return cpt_2additive_from_interactions(interaction(model.nu_plus), interaction(model.nu_minus), f, tol)


def cpt_2additive_from_interactions(I_plus: InteractionRep, I_minus: InteractionRep, f,
                                    tol: float = DEFAULT_TOL) -> float:
    """Interaction form of CPT with 2-additive parts.

    Within the loss block the bracket of ``f_i`` carries
    ``-1/2 * sum |I-(ij)|``; this is the sign that makes the expression equal
    to ``-C_{nu-}(f-)`` and reduce to the symmetric integral when both
    capacities coincide.
    """
    _require_2additive_set(I_plus, tol)
    _require_2additive_set(I_minus, tol)
    f = _check_n(I_plus, f)
    sp, pp = _pair_terms(I_plus)
    sm, pm = _pair_terms(I_minus)
    n = I_plus.n
    plus = f >= 0
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            if plus[i] and plus[j]:
                w = pp[i, j]
                if w > 0:
                    total += w * min(f[i], f[j])
                elif w < 0:
                    total += -w * max(f[i], f[j])
            elif not plus[i] and not plus[j]:
                w = pm[i, j]
                if w > 0:
                    total += w * max(f[i], f[j])
                elif w < 0:
                    total += -w * min(f[i], f[j])
    for i in range(n):
        others = [j for j in range(n) if j != i]
        same = [j for j in others if plus[j] == plus[i]]
        cross = [j for j in others if plus[j] != plus[i]]
        if plus[i]:
            coef = sp[i] - 0.5 * (np.abs(pp[i, same]).sum() + pp[i, cross].sum())
        else:
            coef = sm[i] - 0.5 * (pm[i, cross].sum() + np.abs(pm[i, same]).sum())
        total += f[i] * coef
    return float(total)


# ---------------------------------------------------------------------------
# Choquet integral w.r.t. a bi-capacity


BICAP_PATHS = ("definition", "telescoping")


def signed_game(v: BiGame, n_plus: int) -> Game:
    """Game ``C -> v(C & N+, C & N-) - v({}, {})`` attached to a sign pattern.

    The offset only matters for games with ``v({}, {}) != 0`` such as the
    bi-unanimity games ``u_({}, B)``; it keeps the integral a function of
    the increments of ``v``, in line with the telescoping and Moebius forms.
    """
    n = v.n
    full = full_mask(n)
    n_minus = full ^ n_plus
    C = np.arange(1 << n)
    P = pow3_table(n)
    Z = zero_offset(n)
    vals = v.values[Z + P[C & n_plus] - P[C & n_minus]]
    if v.values[Z] != 0.0:
        vals = vals - v.values[Z]
    return Game(n, vals)


def bicap_choquet(v: BiGame, f, path: str = "definition", sigma=None) -> float:
    """Choquet integral of a real act w.r.t. a bi-capacity (or bi-game).

    ``definition`` builds the signed game and integrates ``|f|`` classically
    in the increments form, which is exact on ternary acts and on 0/1 games;
    ``telescoping`` sums ``|f_(i)|`` times the drop of ``v`` between
    consecutive level sets. ``sigma`` (0-based, telescoping only) overrides
    the canonical stable ordering; it must sort ``|f|`` nondecreasingly.
    """
    f = _check_n(v, f)
    if path == "definition":
        d = decompose_act(f)
        return choquet(signed_game(v, d.n_plus), d.abs_values, "increments")
    if path == "telescoping":
        return _bicap_telescoping(v, f, sigma)
    raise ValueError(f"unknown bi-capacity path {path!r}")


def _admissible(f, sigma):
    sigma = np.asarray(sigma, dtype=np.int64)
    n = f.shape[0]
    if sigma.shape != (n,) or sorted(sigma.tolist()) != list(range(n)):
        raise InadmissiblePermutationError(f"{sigma.tolist()} is not a permutation of 0..{n - 1}")
    a = np.abs(f)[sigma]
    if np.any(np.diff(a) < 0):
        raise InadmissiblePermutationError(f"{sigma.tolist()} does not sort |f| nondecreasingly")
    return sigma


def _bicap_telescoping(v, f, sigma=None):
    n = f.shape[0]
    order = _ascending(np.abs(f)) if sigma is None else _admissible(f, sigma)
    total = 0.0
    pos = neg = 0
    prev = v(0, 0)
    for j in range(n - 1, -1, -1):
        i = int(order[j])
        if f[i] >= 0:
            pos |= 1 << i
        else:
            neg |= 1 << i
        cur = v(pos, neg)
        total += abs(f[i]) * (cur - prev)
        prev = cur
    return float(total)


def bicap_choquet_batch(v: BiGame, F) -> np.ndarray:
    """Telescoping form over the rows of ``F`` using the compiled kernel."""
    F = np.ascontiguousarray(np.atleast_2d(np.asarray(F, dtype=float)))
    if F.shape[1] != v.n:
        raise ValueError("acts do not match the ground set")
    return kernels.bicap_choquet_batch(np.ascontiguousarray(v.values), pow3_table(v.n), zero_offset(v.n), F)


def bicap_choquet_mobius(m: MobiusRep, f) -> float:
    """Choquet integral from the bi-Moebius transform, summing over all pairs.

    Pairs ``(emptyset, B)`` weigh the minimum of ``f`` over ``B^c & N-``;
    pairs with ``A`` nonempty weigh the positive part of
    ``min over (A u B)^c & N- of f  +  min over A of f``. Minima over the
    empty set are 0.
    """
    if m.family != "bi":
        raise ValueError("expected a bi-Moebius transform")
    f = _check_n(m, f)
    n = m.n
    full = full_mask(n)
    d = decompose_act(f)
    mins = subset_minima(f)
    A, B = pair_masks(n)
    rest = full & ~(A | B) & d.n_minus
    weight = np.where(
        A == 0,
        mins[full & ~B & d.n_minus],
        np.maximum(mins[rest] + mins[A], 0.0),
    )
    return float(m.values @ weight)


def biunanimity_choquet(A: int, B: int, f) -> float:
    """Closed-form Choquet integral w.r.t. the bi-unanimity game ``u_(A,B)``.

    The ground set size is taken from the length of ``f``.
    """
    f = as_act(f)
    n = f.shape[0]
    full = full_mask(n)
    if A & B:
        raise ValueError("(A, B) must be disjoint")
    if (A | B) & ~full:
        raise ValueError(f"(A, B) refers to criteria beyond n={n}")
    if A == 0 and B == full:
        return 0.0

    def lowest(mask):
        return min(f[i] for i in range(n) if mask >> i & 1)

    if A == 0:
        return float(min(lowest(full & ~B), 0.0))
    if B == full & ~A:
        return float(max(lowest(A), 0.0))
    neg_rest = full & ~(A | B) & decompose_act(f).n_minus
    head = lowest(neg_rest) if neg_rest else 0.0
    return float(max(head + lowest(A), 0.0))


# ---------------------------------------------------------------------------
# 2-additive bi-capacities


BICAP_2ADD_PATHS = ("mobius2", "interaction_a", "interaction_b")


def bicap_choquet_2additive(rep, f, path: str = "mobius2", tol: float = DEFAULT_TOL) -> float:
    """Closed forms for 2-additive bi-capacities.

    ``mobius2`` takes the bi-Moebius transform; ``interaction_a`` and
    ``interaction_b`` take the bi-interaction (the latter is the signed,
    almost-convex rearrangement).
    """
    f = _check_n(rep, f)
    if path == "mobius2":
        if not isinstance(rep, MobiusRep) or rep.family != "bi":
            raise ValueError("mobius2 needs a bi-Moebius transform")
        if twoadditive_violation(rep) > tol:
            raise NotTwoAdditiveError("Moebius transform is not 2-additive")
        return _mobius2(rep, f)
    if not isinstance(rep, InteractionRep) or rep.family != "bi":
        raise ValueError(f"{path} needs a bi-interaction")
    _require_2additive_pairs(rep, tol)
    if path == "interaction_a":
        return _interaction_a(rep, f)
    if path == "interaction_b":
        return _interaction_b(rep, f)
    raise ValueError(f"unknown 2-additive path {path!r}")


def _require_2additive_pairs(I, tol):
    pos_of, neg_of = pair_masks(I.n)
    pc = popcount_table(I.n)
    off = float(np.max(np.abs(I.values[pc[pos_of] + pc[neg_of] > 2]), initial=0.0))
    if off > tol:
        raise NotTwoAdditiveError(f"bi-interaction has mass {off:.3g} on |S|+|T| > 2")


class _TwoAddTerms:
    """Dense per-criterion views of the 2-additive coordinates."""

    def __init__(self, rep):
        n = rep.n
        full = full_mask(n)
        vals = rep.values
        self.n = n
        self.is_mobius = isinstance(rep, MobiusRep)
        self.pos1 = np.zeros(n)     # m(i, i^c)   | I(i, {})
        self.neg1 = np.zeros(n)     # m({}, i^c)  | I({}, i)
        self.pp = np.zeros((n, n))  # m(ij,(ij)^c) | I(ij, {})
        self.nn = np.zeros((n, n))  # m({},(ij)^c) | I({}, ij)
        self.pn = np.zeros((n, n))  # m(i,(ij)^c)  | I(i, j)
        for i in range(n):
            bi = 1 << i
            if self.is_mobius:
                self.pos1[i] = vals[pair_index(n, bi, full ^ bi)]
                self.neg1[i] = vals[pair_index(n, 0, full ^ bi)]
            else:
                self.pos1[i] = vals[pair_index(n, bi, 0)]
                self.neg1[i] = vals[pair_index(n, 0, bi)]
            for j in range(n):
                if j == i:
                    continue
                bj = 1 << j
                rest = full ^ bi ^ bj
                if self.is_mobius:
                    self.pp[i, j] = vals[pair_index(n, bi | bj, rest)]
                    self.nn[i, j] = vals[pair_index(n, 0, rest)]
                    self.pn[i, j] = vals[pair_index(n, bi, rest)]
                else:
                    self.pp[i, j] = vals[pair_index(n, bi | bj, 0)]
                    self.nn[i, j] = vals[pair_index(n, 0, bi | bj)]
                    self.pn[i, j] = vals[pair_index(n, bi, bj)]


def _mobius2(m, f):
    t = _TwoAddTerms(m)
    n = t.n
    plus = f >= 0
    total = 0.0
    for i in range(n):
        if plus[i]:
            total += t.pos1[i] * f[i]
        else:
            total += t.neg1[i] * f[i]
        for j in range(n):
            if j == i:
                continue
            if plus[i] and plus[j]:
                total += t.pn[i, j] * f[i]
                if i < j:
                    total += t.pp[i, j] * min(f[i], f[j])
            elif plus[i] and not plus[j]:
                total += t.pn[i, j] * max(f[i] + f[j], 0.0)
            elif not plus[i] and plus[j]:
                total += t.nn[i, j] * f[i]
            elif i < j:
                total += t.nn[i, j] * min(f[i], f[j])
    return float(total)


def _interaction_a(I, f):
    t = _TwoAddTerms(I)
    n = t.n
    plus = f >= 0
    total = 0.0
    for i in range(n):
        others = [j for j in range(n) if j != i]
        if plus[i]:
            inner = sum(t.pn[i, j] if plus[j] else -t.pn[i, j] for j in others)
            inner -= sum(t.pp[i, j] for j in others)
            total += f[i] * (t.pos1[i] + 0.5 * inner)
        else:
            inner = -sum(t.pn[j, i] for j in others)
            inner += sum(t.nn[i, j] if plus[j] else -t.nn[i, j] for j in others)
            total += f[i] * (t.neg1[i] + 0.5 * inner)
    for i in range(n):
        for j in range(n):
            if j == i:
                continue
            if plus[i] and not plus[j]:
                total += t.pn[i, j] * max(f[i] + f[j], 0.0)
            elif i < j and plus[i] and plus[j]:
                total += t.pp[i, j] * min(f[i], f[j])
            elif i < j and not plus[i] and not plus[j]:
                total += t.nn[i, j] * min(f[i], f[j])
    return float(total)


def rearrangement_coefficients(I: InteractionRep, f) -> np.ndarray:
    """Bracketed coefficient multiplying ``f_i`` in the signed rearrangement.

    These are nonnegative for the interaction of any bi-capacity.
    """
    t = _TwoAddTerms(I)
    n = t.n
    f = as_act(f, n)
    plus = f >= 0
    coef = np.empty(n)
    for i in range(n):
        s = 0.0
        for j in range(n):
            if j == i:
                continue
            if plus[i]:
                s += (t.pn[i, j] - abs(t.pp[i, j])) if plus[j] else -(abs(t.pn[i, j]) + t.pp[i, j])
            else:
                s += (t.nn[i, j] - abs(t.pn[j, i])) if plus[j] else -(t.pn[j, i] + abs(t.nn[i, j]))
        coef[i] = (t.pos1[i] if plus[i] else t.neg1[i]) + 0.5 * s
    return coef


def _interaction_b(I, f):
    t = _TwoAddTerms(I)
    n = t.n
    plus = f >= 0
    total = float(rearrangement_coefficients(I, f) @ f)
    for i in range(n):
        for j in range(n):
            if j == i:
                continue
            if i < j and plus[i] == plus[j]:
                w = t.pp[i, j] if plus[i] else t.nn[i, j]
                if w > 0:
                    total += w * min(f[i], f[j])
                elif w < 0:
                    total += -w * max(f[i], f[j])
            elif plus[i] and not plus[j]:
                w = t.pn[i, j]
                if w > 0:
                    total += w * max(f[i] + f[j], 0.0)
                elif w < 0:
                    total += -w * min(f[i] + f[j], 0.0)
    return float(total)


def partial_convexity_sums(I: InteractionRep):
    """The two sums that equal 1 for a normalized 2-additive bi-capacity.

    They are the signed rearrangement evaluated at ``f = 1`` and at
    ``f = -1`` (negated). In the first one ``I(i,j)`` enters with ``+1/2``.
    """
    t = _TwoAddTerms(I)
    n = t.n
    iu = np.triu_indices(n, 1)
    s_plus = np.abs(t.pp[iu]).sum() + sum(
        t.pos1[i] + 0.5 * sum(t.pn[i, j] - abs(t.pp[i, j]) for j in range(n) if j != i) for i in range(n))
    s_minus = np.abs(t.nn[iu]).sum() + sum(
        t.neg1[i] - 0.5 * sum(t.pn[j, i] + abs(t.nn[i, j]) for j in range(n) if j != i) for i in range(n))
    return float(s_plus), float(s_minus)


# ---------------------------------------------------------------------------
# bipolar capacities


class BipolarValue(NamedTuple):
    total: float
    plus: float
    minus: float


def bipolar_choquet(z: BipolarCapacity, f, sigma=None) -> BipolarValue:
    """Choquet integral w.r.t. a bipolar capacity as ``(C+ - C-, C+, C-)``.

    ``sigma`` is a 0-based permutation sorting ``|f|`` nondecreasingly; the
    canonical stable one is used when omitted. The value may depend on this
    choice when ``|f|`` has ties across signs. Level terms whose increment is
    zero are skipped, which covers the positions holding zeros of ``f``
    (their two level sets are not disjoint).
    """
    f = _check_n(z, f)
    n = z.n
    order = _ascending(np.abs(f)) if sigma is None else _admissible(f, sigma)
    fp = np.maximum(f, 0.0)
    fm = np.maximum(-f, 0.0)
    up = [0] * (n + 1)
    down = [0] * (n + 1)
    for j in range(n - 1, -1, -1):
        i = int(order[j])
        up[j] = up[j + 1] | ((1 << i) if f[i] >= 0 else 0)
        down[j] = down[j + 1] | ((1 << i) if f[i] <= 0 else 0)
    c_plus = c_minus = 0.0
    prev_p = prev_m = 0.0
    for j in range(n):
        i = int(order[j])
        inc_p = fp[i] - prev_p
        inc_m = fm[i] - prev_m
        prev_p, prev_m = fp[i], fm[i]
        if inc_p == 0.0 and inc_m == 0.0:
            continue
        zp, zm = z(up[j], down[j])
        c_plus += inc_p * zp
        c_minus += inc_m * zm
    return BipolarValue(float(c_plus - c_minus), float(c_plus), float(c_minus))


def eb_residuals(z: BipolarCapacity) -> np.ndarray:
    """``(z+(A,B) - z-({},B)) - (z+(A,{}) - z-(A,B))`` over every pair."""
    n = z.n
    A, B = pair_masks(n)
    P = pow3_table(n)
    Z = zero_offset(n)
    left = z.plus - z.minus[Z - P[B]]
    right = z.plus[Z + P[A]] - z.minus
    return left - right


def check_eb(z: BipolarCapacity, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Pairs where the permutation-invariance condition fails."""
    rep = ValidationReport("bipolar permutation invariance")
    res = eb_residuals(z)
    A, B = pair_masks(z.n)
    for idx in np.flatnonzero(np.abs(res) > tol):
        rep.add("condition violated", format_pair(int(A[idx]), int(B[idx])), res[idx])
    rep.note_residual(np.max(np.abs(res)))
    return rep


def reduce_bipolar(z: BipolarCapacity, tol: float = DEFAULT_TOL) -> BiCapacity:
    """Bi-capacity ``v(A,B) = z+(A,B) - z-({},B)`` of a condition-satisfying ``z``."""
    rep = check_eb(z, tol)
    if not rep.ok:
        raise EbViolationError(f"{len(rep.violations)} pairs violate the condition; first: {rep.violations[0]}")
    n = z.n
    _, B = pair_masks(n)
    vals = z.plus - z.minus[zero_offset(n) - pow3_table(n)[B]]
    return BiCapacity(n, vals, normalized=z.normalized)


def bipolar_from_bicapacity(v: BiGame) -> BipolarCapacity:
    """``z+(A,B) = v(A,B) - v({},B)``, ``z-(A,B) = v(A,{}) - v(A,B)``.

    The result always satisfies the permutation-invariance condition and
    reduces back to ``v``; it need not meet the [0, 1] range and
    monotonicity requirements of a bipolar capacity.
    """
    n = v.n
    A, B = pair_masks(n)
    P = pow3_table(n)
    Z = zero_offset(n)
    plus = v.values - v.values[Z - P[B]]
    minus = v.values[Z + P[A]] - v.values
    return BipolarCapacity(n, plus, minus, normalized=bool(getattr(v, "normalized", False)))


# ---------------------------------------------------------------------------
# symmetry maps


def reflect(v: BiGame, A: int) -> BiGame:
    """``v((B & A) | (B' - A), (B - A) | (B' & A))``: swap signs outside ``A``."""
    n = v.n
    # axis k of the cube carries criterion n - 1 - k
    axes = tuple(n - 1 - i for i in range(n) if not (A >> i & 1))
    vals = np.flip(v.cube(), axis=axes).ravel() if axes else v.values.copy()
    return type(v)(n, vals) if type(v) is BiGame else BiGame(n, vals)


def reflect_act(f, A: int) -> np.ndarray:
    f = as_act(f)
    keep = np.array([(A >> i) & 1 for i in range(f.shape[0])], dtype=bool)
    return np.where(keep, f, -f)
