"""Hot inner loops, each in a numba flavour and a pure-numpy flavour.

All kernels work on the dense tabulations used throughout the package:

* a set function on ``N`` is a float array of length ``2**n`` indexed by
  bitmask (bit ``i`` set iff criterion ``i+1`` is in the set);
* a function on disjoint pairs ``(A, B)`` is a float array of length
  ``3**n``. Criterion ``i`` contributes the ternary digit 0 if it lies in
  ``B``, 1 if in neither set and 2 if in ``A``, weighted by ``3**i``. The
  index of ``(A, B)`` is therefore ``Z + P[A] - P[B]`` with
  ``P[X] = sum(3**i for i in X)`` and ``Z = (3**n - 1) // 2``.

The public names at the bottom pick one flavour according to
:mod:`bicap._accel`. Both flavours stay importable so they can be compared.
"""

import numpy as np

from ._accel import USE_NUMBA, njit

# ---------------------------------------------------------------------------
# batched Choquet integral w.r.t. a bi-capacity (telescoping form)


def _bicap_choquet_batch_loops(v, P, Z, F):
    k, n = F.shape
    out = np.empty(k)
    for r in range(k):
        f = F[r]
        absf = np.abs(f)
        order = np.argsort(absf, kind="mergesort")
        pos = 0
        neg = 0
        prev = v[Z]
        total = 0.0
        for j in range(n - 1, -1, -1):
            i = order[j]
            if f[i] >= 0:
                pos |= 1 << i
            else:
                neg |= 1 << i
            cur = v[Z + P[pos] - P[neg]]
            total += absf[i] * (cur - prev)
            prev = cur
        out[r] = total
    return out


bicap_choquet_batch_numba = njit(_bicap_choquet_batch_loops)


def bicap_choquet_batch_numpy(v, P, Z, F):
    F = np.atleast_2d(F)
    k, n = F.shape
    absF = np.abs(F)
    order = np.argsort(absF, axis=1, kind="stable")
    fs = np.take_along_axis(F, order, axis=1)
    abs_sorted = np.take_along_axis(absF, order, axis=1)
    bits = np.left_shift(np.int64(1), order.astype(np.int64))
    posbits = np.where(fs >= 0, bits, 0)
    negbits = np.where(fs >= 0, 0, bits)
    pos = np.cumsum(posbits[:, ::-1], axis=1)[:, ::-1]
    neg = np.cumsum(negbits[:, ::-1], axis=1)[:, ::-1]
    vals = v[Z + P[pos] - P[neg]]
    nxt = np.concatenate([vals[:, 1:], np.full((k, 1), v[Z])], axis=1)
    return np.sum(abs_sorted * (vals - nxt), axis=1)


# ---------------------------------------------------------------------------
# interaction transform of a game through the discrete derivative


def _capacity_interaction_loops(nu, n, pc, W):
    size = 1 << n
    full = size - 1
    out = np.zeros(size)
    for A in range(size):
        a = pc[A]
        comp = full ^ A
        total = 0.0
        K = comp
        while True:
            delta = 0.0
            L = A
            while True:
                if (a - pc[L]) % 2 == 0:
                    delta += nu[L | K]
                else:
                    delta -= nu[L | K]
                if L == 0:
                    break
                L = (L - 1) & A
            total += W[a, pc[K]] * delta
            if K == 0:
                break
            K = (K - 1) & comp
        out[A] = total
    return out


capacity_interaction_numba = njit(_capacity_interaction_loops)


def capacity_interaction_numpy(nu, n, pc, W):
    size = 1 << n
    masks = np.arange(size)
    out = np.zeros(size)
    for A in range(size):
        a = pc[A]
        K = masks[(masks & A) == 0]
        L = masks[(masks & ~A) == 0]
        signs = np.where((a - pc[L]) % 2 == 0, 1.0, -1.0)
        delta = signs @ nu[L[:, None] | K[None, :]]
        out[A] = W[a, pc[K]] @ delta
    return out


# ---------------------------------------------------------------------------
# bi-interaction directly from the bi-game (bipolar derivative form)


def _biinteraction_direct_loops(v, n, P, Z, pos_of, neg_of, pc, W):
    size3 = v.shape[0]
    full = (1 << n) - 1
    out = np.zeros(size3)
    for idx in range(size3):
        S = pos_of[idx]
        T = neg_of[idx]
        st = pc[S] + pc[T]
        free = full ^ (S | T)
        total = 0.0
        K = free
        while True:
            delta = 0.0
            Sp = S
            while True:
                Tp = T
                while True:
                    par = (pc[S] - pc[Sp]) + (pc[T] - pc[Tp])
                    negset = full ^ (K | S | Tp)
                    val = v[Z + P[K | Sp] - P[negset]]
                    if par % 2 == 0:
                        delta += val
                    else:
                        delta -= val
                    if Tp == 0:
                        break
                    Tp = (Tp - 1) & T
                if Sp == 0:
                    break
                Sp = (Sp - 1) & S
            total += W[st, pc[K]] * delta
            if K == 0:
                break
            K = (K - 1) & free
        out[idx] = total
    return out


biinteraction_direct_numba = njit(_biinteraction_direct_loops)


def _submasks(mask, masks):
    return masks[(masks & ~mask) == 0]


def biinteraction_direct_numpy(v, n, P, Z, pos_of, neg_of, pc, W):
    size3 = v.shape[0]
    full = (1 << n) - 1
    masks = np.arange(1 << n)
    out = np.zeros(size3)
    for idx in range(size3):
        S = int(pos_of[idx])
        T = int(neg_of[idx])
        st = pc[S] + pc[T]
        K = _submasks(full ^ (S | T), masks)
        Sp = _submasks(S, masks)
        Tp = _submasks(T, masks)
        # axes: K, S', T'
        posset = K[:, None, None] | Sp[None, :, None]
        negset = full ^ (K[:, None, None] | S | Tp[None, None, :])
        par = (pc[S] - pc[Sp])[None, :, None] + (pc[T] - pc[Tp])[None, None, :]
        signs = np.where(par % 2 == 0, 1.0, -1.0)
        delta = np.sum(signs * v[Z + P[posset] - P[negset]], axis=(1, 2))
        out[idx] = W[st, pc[K]] @ delta
    return out


# ---------------------------------------------------------------------------
# bi-interaction from the bi-Moebius transform (interval sums)


def _interval_sum_loops(m, n, P, Z, pos_of, neg_of, pc):
    size3 = m.shape[0]
    full = (1 << n) - 1
    out = np.zeros(size3)
    for idx in range(size3):
        mv = m[idx]
        if mv == 0.0:
            continue
        Sp = pos_of[idx]
        Tp = neg_of[idx]
        R = full ^ (Sp | Tp)
        tp = pc[Tp]
        S = Sp
        while True:
            T = R
            while True:
                out[Z + P[S] - P[T]] += mv / (n - pc[S] - pc[T] - tp + 1)
                if T == 0:
                    break
                T = (T - 1) & R
            if S == 0:
                break
            S = (S - 1) & Sp
    return out


interval_sum_numba = njit(_interval_sum_loops)


def interval_sum_numpy(m, n, P, Z, pos_of, neg_of, pc):
    full = (1 << n) - 1
    masks = np.arange(1 << n)
    out = np.zeros(m.shape[0])
    for idx in np.flatnonzero(m):
        Sp = int(pos_of[idx])
        Tp = int(neg_of[idx])
        S = _submasks(Sp, masks)[:, None]
        T = _submasks(full ^ (Sp | Tp), masks)[None, :]
        w = m[idx] / (n - pc[S] - pc[T] - pc[Tp] + 1)
        np.add.at(out, (Z + P[S] - P[T]).ravel(), w.ravel())
    return out


# ---------------------------------------------------------------------------
# affine margins over all (A, B) in Q(N \ i), for every i


def _ternary_margins_loops(base, w):
    n = base.shape[0]
    size = 1
    for _ in range(n - 1):
        size *= 3
    out = np.empty((n, size))
    for i in range(n):
        for code in range(size):
            total = base[i]
            c = code
            for j in range(n):
                if j == i:
                    continue
                total += w[i, j, c % 3]
                c //= 3
            out[i, code] = total
    return out


ternary_margins_numba = njit(_ternary_margins_loops)


def ternary_digits(m):
    """All ternary digit vectors of length ``m``, row ``code`` little-endian."""
    codes = np.arange(3 ** m)
    return (codes[:, None] // 3 ** np.arange(m)[None, :]) % 3


def ternary_margins_numpy(base, w):
    n = base.shape[0]
    digits = ternary_digits(n - 1)
    out = np.empty((n, digits.shape[0]))
    for i in range(n):
        others = np.array([j for j in range(n) if j != i], dtype=np.int64)
        if others.size == 0:
            out[i] = base[i]
            continue
        out[i] = base[i] + w[i, others[None, :], digits].sum(axis=1)
    return out


# ---------------------------------------------------------------------------

if USE_NUMBA:
    bicap_choquet_batch = bicap_choquet_batch_numba
    capacity_interaction = capacity_interaction_numba
    biinteraction_direct = biinteraction_direct_numba
    interval_sum = interval_sum_numba
    ternary_margins = ternary_margins_numba
else:
    bicap_choquet_batch = bicap_choquet_batch_numpy
    capacity_interaction = capacity_interaction_numpy
    biinteraction_direct = biinteraction_direct_numpy
    interval_sum = interval_sum_numpy
    ternary_margins = ternary_margins_numpy
