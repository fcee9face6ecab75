"""Brute-force references and instance constructors.

Everything here is written from the definitions with plain Python loops and
shares no code with the production paths it is used to check. Oracles are
exponential and capped by :class:`OracleConfig`.
"""

import itertools
import json
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .setfn import BiGame, BipolarCapacity, CapExceededError, Game
from .transforms import MobiusRep

ORACLE_N_CAP = 8


@dataclass(frozen=True)
class OracleConfig:
    n_max: int = 6
    samples: int = 200
    seed: int = 0
    tol: float = 1e-9
    exact_tol: float = 1e-12
    dump_dir: Optional[str] = None

    def __post_init__(self):
        if not 1 <= self.n_max <= ORACLE_N_CAP:
            raise ValueError(f"n_max must lie in 1..{ORACLE_N_CAP}")

    def rng(self, salt: int = 0):
        return np.random.default_rng([self.seed, salt])


def _require(n, cap):
    if n > cap:
        raise CapExceededError(f"oracle limited to n <= {cap}, got {n}")


def _sets_of(n):
    """Subsets of range(n) as frozensets, keyed by bitmask."""
    return {m: frozenset(i for i in range(n) if m >> i & 1) for m in range(1 << n)}


def _mask(items):
    out = 0
    for i in items:
        out |= 1 << i
    return out


def _pairs(n):
    """All disjoint pairs (A, B) of range(n) as frozensets."""
    out = []
    for labels in itertools.product((0, 1, 2), repeat=n):
        A = frozenset(i for i, d in enumerate(labels) if d == 2)
        B = frozenset(i for i, d in enumerate(labels) if d == 0)
        out.append((A, B))
    return out


def _pair_value(v: BiGame, A, B):
    return v(_mask(A), _mask(B))


# ---------------------------------------------------------------------------
# Choquet integral via its level-set (Riemann) form


def choquet_levelset_oracle(c: Game, f) -> float:
    """``int_0^inf nu({i : f_i >= t}) dt`` for nonnegative ``f``.

    The integrand is a step function, so the integral is a finite sum over
    the distinct values of ``f``.
    """
    f = [float(x) for x in f]
    if any(x < 0 for x in f):
        raise ValueError("level-set oracle needs a nonnegative act")
    total = 0.0
    lower = 0.0
    for level in sorted(set(f) - {0.0}):
        upper_set = [i for i, x in enumerate(f) if x >= level]
        total += (level - lower) * c(_mask(upper_set))
        lower = level
    return total


# ---------------------------------------------------------------------------
# Moebius transform by back-substitution in the zeta system


def mobius_solve_oracle(c, n_cap: int = 6) -> MobiusRep:
    """Solve ``c(X) = sum over Y <= X of m(Y)`` by walking a linear extension.

    Works for games (subset order) and bi-games (order on pairs).
    """
    _require(c.n, n_cap)
    n = c.n
    if isinstance(c, Game):
        sets = _sets_of(n)
        order = sorted(sets, key=lambda m: len(sets[m]))
        m = {}
        for X in order:
            below = sum(m[Y] for Y in m if sets[Y] < sets[X])
            m[X] = c(X) - below
        return MobiusRep(n, np.array([m[k] for k in range(1 << n)]), "set")
    if isinstance(c, BiGame):
        pairs = _pairs(n)
        # rank |A| - |B| strictly increases along the order
        order = sorted(pairs, key=lambda p: len(p[0]) - len(p[1]))
        m = {}
        for A, B in order:
            below = sum(val for (C, D), val in m.items() if C <= A and D >= B and (C, D) != (A, B))
            m[(A, B)] = _pair_value(c, A, B) - below
        out = np.zeros(3 ** n)
        for (A, B), val in m.items():
            idx = sum((2 if i in A else 0 if i in B else 1) * 3 ** i for i in range(n))
            out[idx] = val
        return MobiusRep(n, out, "bi")
    raise TypeError("expected a Game or BiGame")


def interaction_from_mobius_oracle(m_values, n: int) -> np.ndarray:
    """``I(A) = sum over B >= A of m(B) / (|B| - |A| + 1)`` for set functions."""
    sets = _sets_of(n)
    out = np.zeros(1 << n)
    for A, SA in sets.items():
        out[A] = sum(m_values[B] / (len(SB) - len(SA) + 1) for B, SB in sets.items() if SA <= SB)
    return out


# ---------------------------------------------------------------------------
# bipolar integral over every admissible permutation


def _bipolar_for_order(z: BipolarCapacity, f, order):
    n = len(f)
    fp = [max(x, 0.0) for x in f]
    fm = [max(-x, 0.0) for x in f]
    c_plus = c_minus = 0.0
    for k in range(n):
        tail = order[k:]
        A = [i for i in tail if f[i] >= 0]
        B = [i for i in tail if f[i] <= 0]
        prev = order[k - 1] if k else None
        dp = fp[order[k]] - (fp[prev] if prev is not None else 0.0)
        dm = fm[order[k]] - (fm[prev] if prev is not None else 0.0)
        if dp == 0.0 and dm == 0.0:
            continue
        zp, zm = z(_mask(A), _mask(B))
        c_plus += dp * zp
        c_minus += dm * zm
    return c_plus - c_minus


def admissible_orders(f):
    """Every permutation sorting ``|f|`` nondecreasingly (ties permuted freely)."""
    absf = [abs(float(x)) for x in f]
    blocks = []
    for level in sorted(set(absf)):
        blocks.append([i for i, a in enumerate(absf) if a == level])
    for choice in itertools.product(*(itertools.permutations(b) for b in blocks)):
        yield [i for block in choice for i in block]


def exhaustive_permutation_oracle(z: BipolarCapacity, f, tol: float = 1e-12, n_cap: int = 6):
    """Distinct bipolar integral values over all admissible permutations.

    Values closer than ``tol`` are merged; the result is a sorted tuple.
    """
    _require(z.n, n_cap)
    f = [float(x) for x in f]
    values = sorted(_bipolar_for_order(z, f, order) for order in admissible_orders(f))
    distinct = []
    for x in values:
        if not distinct or x - distinct[-1] > tol:
            distinct.append(x)
    return tuple(distinct)


# ---------------------------------------------------------------------------
# act constructors and predicates


def is_cosigned(f, g) -> bool:
    """No criterion where ``f`` and ``g`` have strictly opposite signs."""
    return all(a * b >= 0 for a, b in zip(f, g))


def is_comonotone(f, g) -> bool:
    """No pair of criteria ordered one way by ``f`` and strictly the other by ``g``."""
    n = len(f)
    return all((f[i] - f[j]) * (g[i] - g[j]) >= 0 for i in range(n) for j in range(n))


def make_cosigned_comonotone_pair(n: int, seed=None):
    """Two acts with a common sign pattern whose magnitudes are comonotone."""
    rng = np.random.default_rng(seed)
    signs = rng.choice([-1.0, 1.0], size=n)
    perm = rng.permutation(n)
    mag_f = np.empty(n)
    mag_g = np.empty(n)
    mag_f[perm] = np.sort(rng.uniform(0.0, 5.0, size=n))
    mag_g[perm] = np.sort(rng.uniform(0.0, 5.0, size=n))
    f, g = signs * mag_f, signs * mag_g
    assert is_cosigned(f, g) and is_comonotone(np.abs(f), np.abs(g))
    return f, g


# ---------------------------------------------------------------------------
# mismatch reporting


class OracleMismatch(AssertionError):
    pass


def assert_agree(label, actual, expected, tol, instance=None, config: Optional[OracleConfig] = None):
    """Fail loudly when two computations differ by more than ``tol``.

    ``instance`` maps names to package objects or acts; when a dump
    directory is configured it is written there as JSON for reproduction.
    """
    diff = abs(float(actual) - float(expected))
    if diff <= tol:
        return diff
    msg = f"{label}: {actual!r} vs {expected!r} (|diff| = {diff:.3g} > {tol:g})"
    if instance:
        from . import io

        doc = {}
        for key, obj in instance.items():
            doc[key] = io.act_to_dict(obj) if isinstance(obj, (np.ndarray, list, tuple)) else io.to_dict(obj)
        dump_dir = config.dump_dir if config else None
        if dump_dir:
            os.makedirs(dump_dir, exist_ok=True)
            path = os.path.join(dump_dir, f"{label.replace(' ', '_')}.json")
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(doc, fh, indent=1)
            msg += f"\ninstance written to {path}"
        else:
            msg += "\ninstance: " + json.dumps(doc)
    raise OracleMismatch(msg)
