"""Index spaces, set-function types, acts and structural validation.

Subsets of ``N = {1, ..., n}`` are ints used as bitmasks: bit ``i - 1`` is
set iff criterion ``i`` belongs to the subset. Functions on subsets are
dense float arrays of length ``2**n``.

Disjoint pairs ``(A, B)`` (the set ``Q(N)``) are indexed by the ternary code
described in :mod:`bicap.kernels`: digit 0 for criteria in ``B``, 1 for
criteria in neither set, 2 for criteria in ``A``. Under this code the order
``(A, B) <= (C, D)`` iff ``A <= C`` and ``B >= D`` is the componentwise order
of digits, so ``Q(N)`` is the product of ``n`` three-element chains.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

MAX_N_SET = 16
MAX_N_PAIR = 12
DEFAULT_TOL = 1e-9


class CapExceededError(ValueError):
    """Raised when ``n`` is beyond the tabulation cap of a representation."""


def check_n(n, cap=MAX_N_SET):
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if n > cap:
        raise CapExceededError(f"n={n} exceeds the cap {cap}")
    return int(n)


# ---------------------------------------------------------------------------
# subsets


def to_mask(criteria: Sequence[int]) -> int:
    """1-based criteria -> bitmask."""
    mask = 0
    for i in criteria:
        if i < 1:
            raise ValueError(f"criteria are 1-based, got {i}")
        mask |= 1 << (int(i) - 1)
    return mask


def members(mask: int) -> List[int]:
    """Bitmask -> sorted 1-based criteria."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i + 1)
        mask >>= 1
        i += 1
    return out


def full_mask(n: int) -> int:
    return (1 << n) - 1


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def format_set(mask: int) -> str:
    items = members(mask)
    return "{" + ",".join(map(str, items)) + "}" if items else "{}"


@lru_cache(maxsize=None)
def popcount_table(n: int) -> np.ndarray:
    pc = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        pc[1 << i:1 << (i + 1)] = pc[:1 << i] + 1
    pc.setflags(write=False)
    return pc


def iter_subsets(mask: int):
    """All submasks of ``mask`` in decreasing numeric order, ending with 0."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


# ---------------------------------------------------------------------------
# disjoint pairs


@lru_cache(maxsize=None)
def pow3_table(n: int) -> np.ndarray:
    """``P[mask] = sum(3**i for bit i in mask)``."""
    P = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        P[1 << i:1 << (i + 1)] = P[:1 << i] + 3 ** i
    P.setflags(write=False)
    return P


def zero_offset(n: int) -> int:
    """Ternary index of ``(emptyset, emptyset)``."""
    return (3 ** n - 1) // 2


def pair_index(n: int, pos: int, neg: int) -> int:
    if pos & neg:
        raise ValueError(f"pair ({format_set(pos)}, {format_set(neg)}) is not disjoint")
    P = pow3_table(n)
    return zero_offset(n) + int(P[pos]) - int(P[neg])


@lru_cache(maxsize=None)
def pair_masks(n: int):
    """Arrays ``(pos_of, neg_of)`` decoding every ternary index."""
    codes = np.arange(3 ** n, dtype=np.int64)
    pos = np.zeros_like(codes)
    neg = np.zeros_like(codes)
    c = codes.copy()
    for i in range(n):
        d = c % 3
        pos |= np.where(d == 2, 1 << i, 0)
        neg |= np.where(d == 0, 1 << i, 0)
        c //= 3
    pos.setflags(write=False)
    neg.setflags(write=False)
    return pos, neg


def iter_pairs(n: int):
    """Yield ``(index, A, B)`` for all ``3**n`` disjoint pairs."""
    pos, neg = pair_masks(n)
    for idx in range(3 ** n):
        yield idx, int(pos[idx]), int(neg[idx])


def pair_leq(a: int, b: int, c: int, d: int) -> bool:
    """``(a, b) <= (c, d)`` in Q(N): ``a`` subset of ``c`` and ``b`` superset of ``d``."""
    return (a & ~c) == 0 and (d & ~b) == 0


def format_pair(pos: int, neg: int) -> str:
    return f"({format_set(pos)},{format_set(neg)})"


def as_cube(values: np.ndarray, n: int, base: int) -> np.ndarray:
    """View a dense table as an ``n``-dimensional array with ``base`` states per axis."""
    return values.reshape((base,) * n)


# ---------------------------------------------------------------------------
# set-function types


def _frozen_array(values, size, name):
    arr = np.array(values, dtype=float)
    if arr.shape != (size,):
        raise ValueError(f"{name} expects {size} values, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Game:
    """Real-valued set function on N, tabulated by bitmask."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        check_n(self.n, MAX_N_SET)
        object.__setattr__(self, "values", _frozen_array(self.values, 1 << self.n, type(self).__name__))

    def __call__(self, mask: int) -> float:
        return float(self.values[mask])

    def of(self, *criteria: int) -> float:
        return float(self.values[to_mask(criteria)])

    @property
    def full(self) -> int:
        return full_mask(self.n)


@dataclass(frozen=True, eq=False)
class Capacity(Game):
    normalized: bool = False


@dataclass(frozen=True, eq=False)
class BiGame:
    """Real-valued function on Q(N), tabulated by ternary index."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        check_n(self.n, MAX_N_PAIR)
        object.__setattr__(self, "values", _frozen_array(self.values, 3 ** self.n, type(self).__name__))

    def __call__(self, pos: int, neg: int) -> float:
        return float(self.values[pair_index(self.n, pos, neg)])

    def of(self, pos: Sequence[int] = (), neg: Sequence[int] = ()) -> float:
        return self(to_mask(pos), to_mask(neg))

    def cube(self) -> np.ndarray:
        return as_cube(self.values, self.n, 3)


@dataclass(frozen=True, eq=False)
class BiCapacity(BiGame):
    normalized: bool = False


@dataclass(frozen=True, eq=False)
class BipolarCapacity:
    """Pair ``(plus, minus)`` of functions on Q(N) valued in [0, 1]."""

    n: int
    plus: np.ndarray
    minus: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        check_n(self.n, MAX_N_PAIR)
        size = 3 ** self.n
        object.__setattr__(self, "plus", _frozen_array(self.plus, size, "BipolarCapacity.plus"))
        object.__setattr__(self, "minus", _frozen_array(self.minus, size, "BipolarCapacity.minus"))

    def __call__(self, pos: int, neg: int):
        idx = pair_index(self.n, pos, neg)
        return float(self.plus[idx]), float(self.minus[idx])


def unanimity_game(n: int, T: int) -> Capacity:
    """``u_T(A) = 1`` iff ``T`` is contained in ``A``."""
    masks = np.arange(1 << n)
    return Capacity(n, ((masks & T) == T).astype(float), normalized=T != 0)


def biunanimity_game(n: int, A: int, B: int) -> BiCapacity:
    """``u_(A,B)(C, D) = 1`` iff ``(C, D) >= (A, B)``."""
    if A & B:
        raise ValueError("bi-unanimity game needs a disjoint pair")
    pos, neg = pair_masks(n)
    vals = (((pos & A) == A) & ((B & neg) == neg)).astype(float)
    return BiCapacity(n, vals)


def additive_capacity(n: int, weights=None) -> Capacity:
    """Additive capacity from per-criterion weights (uniform ``1/n`` by default)."""
    w = np.full(n, 1.0 / n) if weights is None else np.asarray(weights, dtype=float)
    masks = np.arange(1 << n)
    bits = (masks[:, None] >> np.arange(n)[None, :]) & 1
    return Capacity(n, bits @ w, normalized=bool(np.isclose(w.sum(), 1.0)))


def cpt_bicapacity(nu_plus: Game, nu_minus: Game) -> BiCapacity:
    """``v(A, B) = nu_plus(A) - nu_minus(B)``."""
    if nu_plus.n != nu_minus.n:
        raise ValueError("ground sets differ")
    pos, neg = pair_masks(nu_plus.n)
    normalized = bool(getattr(nu_plus, "normalized", False) and getattr(nu_minus, "normalized", False))
    return BiCapacity(nu_plus.n, nu_plus.values[pos] - nu_minus.values[neg], normalized=normalized)


def conjugate(c: Game) -> Game:
    """Conjugate (dual) set function ``nu(N) - nu(N \\ A)``."""
    full = c.full
    vals = c.values[full] - c.values[full ^ np.arange(1 << c.n)]
    if isinstance(c, Capacity):
        return Capacity(c.n, vals, normalized=c.normalized)
    return Game(c.n, vals)


# ---------------------------------------------------------------------------
# acts


class ActDecomposition(NamedTuple):
    """Derived quantities of a real act ``f``.

    ``sigma`` is 0-based and orders ``|f|`` nondecreasingly with ties broken
    by criterion index. ``level_sets[i]`` is the mask of
    ``{sigma[i], ..., sigma[n-1]}``; ``level_sets[n]`` is 0.
    """

    f: np.ndarray
    pos_part: np.ndarray
    neg_part: np.ndarray
    abs_values: np.ndarray
    n_plus: int
    n_minus: int
    sigma: np.ndarray
    level_sets: tuple


def as_act(f, n: Optional[int] = None) -> np.ndarray:
    arr = np.asarray(f, dtype=float)
    if arr.ndim != 1:
        raise ValueError("an act is a 1-d vector")
    if n is not None and arr.shape[0] != n:
        raise ValueError(f"act has {arr.shape[0]} entries, ground set has {n}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("act entries must be finite")
    return arr


def decompose_act(f) -> ActDecomposition:
    f = as_act(f)
    n = f.shape[0]
    pos_part = np.maximum(f, 0.0)
    neg_part = np.maximum(-f, 0.0)
    absf = np.abs(f)
    n_plus = 0
    for i in range(n):
        if f[i] >= 0:
            n_plus |= 1 << i
    sigma = np.argsort(absf, kind="stable")
    levels = [0] * (n + 1)
    acc = 0
    for j in range(n - 1, -1, -1):
        acc |= 1 << int(sigma[j])
        levels[j] = acc
    return ActDecomposition(f, pos_part, neg_part, absf, n_plus, full_mask(n) ^ n_plus, sigma, tuple(levels))


def ternary_act(n: int, A: int, B: int) -> np.ndarray:
    """The act equal to 1 on ``A``, -1 on ``B`` and 0 elsewhere."""
    if A & B:
        raise ValueError("ternary act needs a disjoint pair")
    f = np.zeros(n)
    for i in range(n):
        if A >> i & 1:
            f[i] = 1.0
        elif B >> i & 1:
            f[i] = -1.0
    return f


# ---------------------------------------------------------------------------
# validation


@dataclass
class Violation:
    kind: str
    where: str
    amount: float

    def __str__(self):
        return f"{self.kind} at {self.where}: {self.amount:.3g}"


@dataclass
class ValidationReport:
    """Outcome of a validator: list of violations plus summary numbers."""

    subject: str
    violations: List[Violation] = field(default_factory=list)
    normalized: Optional[bool] = None
    max_residual: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind, where, amount):
        self.violations.append(Violation(kind, where, float(amount)))
        self.max_residual = max(self.max_residual, abs(float(amount)))

    def note_residual(self, amount):
        self.max_residual = max(self.max_residual, abs(float(amount)))

    def lines(self):
        head = f"{self.subject}: {'valid' if self.ok else 'INVALID'}"
        if self.normalized is not None:
            head += f", normalized={self.normalized}"
        head += f", max residual={self.max_residual:.3g}"
        return [head] + [f"  {v}" for v in self.violations]

    def __str__(self):
        return "\n".join(self.lines())


def _cover_drops(cube, base, tol):
    """Yield ``(axis, flat_index_of_upper, drop)`` where a covering step decreases."""
    n = cube.ndim
    for ax in range(n):
        lower = np.take(cube, range(base - 1), axis=ax)
        upper = np.take(cube, range(1, base), axis=ax)
        drop = lower - upper
        bad = np.argwhere(drop > tol)
        for pos in bad:
            up = list(pos)
            up[ax] += 1
            yield ax, np.ravel_multi_index(tuple(up), cube.shape), float(drop[tuple(pos)])


def validate_capacity(c: Game, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Emptyset, monotonicity along covering pairs, normalization status."""
    rep = ValidationReport("capacity")
    if abs(c.values[0]) > tol:
        rep.add("empty set nonzero", "{}", c.values[0])
    n = c.n
    for ax, upper, drop in _cover_drops(as_cube(c.values, n, 2), 2, tol):
        bit = n - 1 - ax
        rep.add("monotonicity", f"{format_set(upper ^ (1 << bit))} < {format_set(upper)}", drop)
    is_norm = abs(c.values[c.full] - 1.0) <= tol
    rep.normalized = bool(is_norm)
    if getattr(c, "normalized", False) and not is_norm:
        rep.add("normalization nu(N)=1", format_set(c.full), c.values[c.full] - 1.0)
    return rep


def validate_bicapacity(v: BiGame, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Checks ``v(emptyset, emptyset) = 0`` and isotonicity along covering pairs.

    A covering step either adds one criterion to ``A`` or removes one from
    ``B``; in ternary digits it raises one digit by one.
    """
    n = v.n
    rep = ValidationReport("bi-capacity")
    Z = zero_offset(n)
    if abs(v.values[Z]) > tol:
        rep.add("v(emptyset,emptyset) nonzero", "({},{})", v.values[Z])
    pos_of, neg_of = pair_masks(n)
    for _, upper, drop in _cover_drops(v.cube(), 3, tol):
        rep.add("isotonicity", format_pair(int(pos_of[upper]), int(neg_of[upper])), drop)
    top = v.values[3 ** n - 1]
    bottom = v.values[0]
    is_norm = abs(top - 1.0) <= tol and abs(bottom + 1.0) <= tol
    rep.normalized = bool(is_norm)
    if getattr(v, "normalized", False):
        if abs(top - 1.0) > tol:
            rep.add("normalization v(N,{})=1", format_pair(full_mask(n), 0), top - 1.0)
        if abs(bottom + 1.0) > tol:
            rep.add("normalization v({},N)=-1", format_pair(0, full_mask(n)), bottom + 1.0)
    return rep


def validate_bipolar(z: BipolarCapacity, tol: float = DEFAULT_TOL) -> ValidationReport:
    n = z.n
    rep = ValidationReport("bipolar capacity")
    pos_of, neg_of = pair_masks(n)
    plus = as_cube(z.plus, n, 3)
    minus = as_cube(z.minus, n, 3)
    for _, upper, drop in _cover_drops(plus, 3, tol):
        rep.add("plus part not isotone", format_pair(int(pos_of[upper]), int(neg_of[upper])), drop)
    for _, upper, drop in _cover_drops(-minus, 3, tol):
        rep.add("minus part not antitone", format_pair(int(pos_of[upper]), int(neg_of[upper])), drop)
    for name, arr in (("plus", z.plus), ("minus", z.minus)):
        for idx in np.flatnonzero((arr < -tol) | (arr > 1 + tol)):
            rep.add(f"{name} outside [0,1]", format_pair(int(pos_of[idx]), int(neg_of[idx])), arr[idx])
    for idx in np.flatnonzero((neg_of == 0) & (np.abs(z.minus) > tol)):
        rep.add("minus(A,{}) nonzero", format_pair(int(pos_of[idx]), 0), z.minus[idx])
    for idx in np.flatnonzero((pos_of == 0) & (np.abs(z.plus) > tol)):
        rep.add("plus({},B) nonzero", format_pair(0, int(neg_of[idx])), z.plus[idx])
    top, bottom = 3 ** n - 1, 0
    is_norm = (abs(z.plus[top] - 1) <= tol and abs(z.minus[top]) <= tol
               and abs(z.plus[bottom]) <= tol and abs(z.minus[bottom] - 1) <= tol)
    rep.normalized = bool(is_norm)
    if z.normalized and not is_norm:
        if abs(z.plus[top] - 1) > tol or abs(z.minus[top]) > tol:
            rep.add("zeta(N,{}) != (1,0)", format_pair(full_mask(n), 0), z.plus[top] - 1)
        if abs(z.plus[bottom]) > tol or abs(z.minus[bottom] - 1) > tol:
            rep.add("zeta({},N) != (0,1)", format_pair(0, full_mask(n)), z.minus[bottom] - 1)
    return rep


# ---------------------------------------------------------------------------
# random instances (monotone repair, not uniform over the polytope)


def _rng(seed):
    return np.random.default_rng(seed)


def _cummax_axes(cube):
    out = cube
    for ax in range(cube.ndim):
        out = np.maximum.accumulate(out, axis=ax)
    return out


def generate_random_capacity(n: int, seed=None) -> Capacity:
    n = check_n(n, MAX_N_SET)
    vals = _rng(seed).uniform(0.0, 1.0, size=1 << n)
    vals[0] = 0.0
    vals = _cummax_axes(as_cube(vals, n, 2)).ravel()
    if vals[-1] == 0.0:
        vals[-1] = 1.0
    vals = vals / vals[-1]
    return Capacity(n, vals, normalized=True)


def generate_random_bicapacity(n: int, seed=None) -> BiCapacity:
    """Isotone repair on Q(N), then a two-piece monotone rescale.

    The raw table gets 0 at the bottom ``(emptyset, N)`` and 1 at the top
    ``(N, emptyset)`` so that after repair the value ``c`` at
    ``(emptyset, emptyset)`` lies strictly between them; values below ``c``
    are mapped affinely onto [-1, 0] and values above onto [0, 1].
    """
    n = check_n(n, MAX_N_PAIR)
    size = 3 ** n
    raw = _rng(seed).uniform(0.05, 0.95, size=size)
    raw[0] = 0.0
    raw[-1] = 1.0
    vals = _cummax_axes(as_cube(raw, n, 3)).ravel()
    c = vals[zero_offset(n)]
    out = np.where(vals >= c, (vals - c) / (1.0 - c), -1.0 + vals / c)
    out[zero_offset(n)] = 0.0
    return BiCapacity(n, out, normalized=True)


def _isotone_unit(n, rng):
    """Isotone table on Q(N), zero wherever A is empty, 1 at (N, emptyset)."""
    pos_of, _ = pair_masks(n)
    raw = rng.uniform(0.0, 1.0, size=3 ** n)
    raw[pos_of == 0] = 0.0
    raw[-1] = 1.0
    return _cummax_axes(as_cube(raw, n, 3)).ravel()


def generate_random_bipolar(n: int, seed=None) -> BipolarCapacity:
    n = check_n(n, MAX_N_PAIR)
    rng = _rng(seed)
    plus = _isotone_unit(n, rng)
    # (A, B) -> (B, A) reverses every digit, i.e. index -> 3**n - 1 - index
    minus = _isotone_unit(n, rng)[::-1]
    return BipolarCapacity(n, plus, minus, normalized=True)


def twoadditive_support(n: int) -> np.ndarray:
    """Boolean mask over Q(N) of the pairs with ``|B| >= n - 2``.

    For a 2-additive bi-capacity the Moebius transform can only be nonzero
    on ``(emptyset, N)``, ``(emptyset, i^c)``, ``(emptyset, (ij)^c)``,
    ``(i, i^c)``, ``(i, (ij)^c)`` and ``(ij, (ij)^c)``.
    """
    _, neg_of = pair_masks(n)
    pc = popcount_table(n)
    return pc[neg_of] >= n - 2


def generate_random_2additive_bicapacity(n: int, seed=None) -> BiCapacity:
    """Random normalized bi-capacity whose Moebius transform is 2-additive.

    Starts from a strictly isotone point (a positive mixture of 2-additive
    bi-unanimity games shifted by ``-u_(emptyset,N)``), then moves a random
    fraction of the way to the boundary along a random direction that keeps
    the normalization equalities.
    """
    from .transforms import zeta_pairs

    n = check_n(n, MAX_N_PAIR)
    rng = _rng(seed)
    size = 3 ** n
    pos_of, neg_of = pair_masks(n)
    support = twoadditive_support(n)
    bottom = 0
    empty_pos = support & (pos_of == 0)
    empty_pos[bottom] = False
    nonempty_pos = support & (pos_of != 0)

    base = np.zeros(size)
    base[bottom] = -1.0
    base[empty_pos] = rng.dirichlet(np.ones(empty_pos.sum()))
    base[nonempty_pos] = rng.dirichlet(np.ones(nonempty_pos.sum()))

    d = np.zeros(size)
    for group in (empty_pos, nonempty_pos):
        g = rng.normal(size=group.sum())
        d[group] = g - g.mean()

    vb = as_cube(zeta_pairs(base, n), n, 3)
    vd = as_cube(zeta_pairs(d, n), n, 3)
    t_max = 10.0
    for ax in range(n):
        db = np.diff(vb, axis=ax)
        dd = np.diff(vd, axis=ax)
        neg = dd < 0
        if np.any(neg):
            t_max = min(t_max, float(np.min(-db[neg] / dd[neg])))
    t = rng.uniform(0.0, 0.9) * t_max
    vals = zeta_pairs(base + t * d, n)
    vals[zero_offset(n)] = 0.0
    vals[0] = -1.0
    vals[-1] = 1.0
    return BiCapacity(n, vals, normalized=True)


def generate_random_2additive_capacity(n: int, seed=None) -> Capacity:
    """Random normalized capacity whose Moebius transform vanishes above pairs."""
    from .transforms import zeta_sets

    n = check_n(n, MAX_N_SET)
    rng = _rng(seed)
    size = 1 << n
    pc = popcount_table(n)
    support = (pc >= 1) & (pc <= 2)
    base = np.zeros(size)
    base[support] = rng.dirichlet(np.ones(support.sum()))
    d = np.zeros(size)
    g = rng.normal(size=support.sum())
    d[support] = g - g.mean()
    vb = as_cube(zeta_sets(base, n), n, 2)
    vd = as_cube(zeta_sets(d, n), n, 2)
    t_max = 10.0
    for ax in range(n):
        db = np.diff(vb, axis=ax)
        dd = np.diff(vd, axis=ax)
        neg = dd < 0
        if np.any(neg):
            t_max = min(t_max, float(np.min(-db[neg] / dd[neg])))
    t = rng.uniform(0.0, 0.9) * t_max
    vals = zeta_sets(base + t * d, n)
    vals[0] = 0.0
    vals[-1] = 1.0
    return Capacity(n, vals, normalized=True)
