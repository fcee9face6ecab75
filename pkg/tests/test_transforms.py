import numpy as np
import pytest

from bicap.oracle import interaction_from_mobius_oracle, mobius_solve_oracle
from bicap.setfn import (
    BiGame,
    additive_capacity,
    biunanimity_game,
    conjugate,
    cpt_bicapacity,
    full_mask,
    generate_random_2additive_bicapacity,
    generate_random_2additive_capacity,
    generate_random_bicapacity,
    generate_random_capacity,
    iter_pairs,
    pair_index,
    pair_masks,
    popcount,
    popcount_table,
    unanimity_game,
)
from bicap.transforms import (
    InteractionRep,
    MobiusRep,
    NotTwoAdditiveError,
    bi_derivative,
    biinteraction,
    biinteraction_direct,
    bimobius,
    check_interaction_validity,
    check_mobius_validity,
    comobius,
    derivative,
    interaction,
    interaction_identities,
    interaction_margins,
    is_k_additive,
    mobius,
    twoadd_I_from_m,
    twoadd_m_from_I,
    zeta,
)


# ---------------------------------------------------------------------------
# capacities


def test_mobius_of_additive_and_unanimity():
    n = 4
    m = mobius(additive_capacity(n)).values
    pc = popcount_table(n)
    assert np.allclose(m[pc == 1], 1 / n) and np.allclose(m[pc != 1], 0)
    T = 0b0110
    m = mobius(unanimity_game(n, T)).values
    expected = np.zeros(1 << n)
    expected[T] = 1.0
    assert np.array_equal(m, expected)


@pytest.mark.parametrize("n", [1, 3, 6, 8])
def test_mobius_zeta_roundtrip(n):
    for seed in range(5):
        c = generate_random_capacity(n, seed)
        assert np.allclose(zeta(mobius(c)).values, c.values, atol=1e-12, rtol=0)
        m = mobius(c)
        assert np.allclose(mobius(zeta(m)).values, m.values, atol=1e-12, rtol=0)


def test_zero_mobius_gives_zero_game():
    assert np.all(zeta(MobiusRep(3, np.zeros(8), "set")).values == 0)
    assert np.all(zeta(MobiusRep(3, np.zeros(27), "bi")).values == 0)


@pytest.mark.parametrize("n", [1, 2, 4, 6])
def test_mobius_matches_back_substitution(n):
    c = generate_random_capacity(n, 3)
    assert np.allclose(mobius(c).values, mobius_solve_oracle(c).values, atol=1e-9)


def test_comobius_conjugate_relation():
    # co-Moebius of the conjugate equals the signed Moebius, nonempty sets
    for n in (1, 3, 5, 8):
        for seed in range(3):
            c = generate_random_capacity(n, seed)
            lhs = comobius(conjugate(c)).values
            pc = popcount_table(n)
            rhs = np.where(pc % 2 == 1, 1.0, -1.0) * mobius(c).values
            assert np.allclose(lhs[1:], rhs[1:], atol=1e-12)


def test_comobius_of_additive():
    n = 4
    cm = comobius(additive_capacity(n)).values
    pc = popcount_table(n)
    assert np.allclose(cm[pc == 1], 1 / n)


def test_derivative_basics():
    c = generate_random_capacity(4, 0)
    for K in range(16):
        assert derivative(c, 0, K) == pytest.approx(c(K))
    for i in range(4):
        bit = 1 << i
        for K in range(16):
            if K & bit:
                continue
            assert derivative(c, bit, K) == pytest.approx(c(K | bit) - c(K))
    with pytest.raises(ValueError):
        derivative(c, 1, 1)


def test_interaction_additive():
    n = 4
    I = interaction(additive_capacity(n)).values
    pc = popcount_table(n)
    assert np.allclose(I[pc == 1], 1 / n) and np.allclose(I[pc >= 2], 0, atol=1e-15)


@pytest.mark.parametrize("n", [1, 2, 4, 7])
def test_interaction_matches_mobius_oracle(n):
    c = generate_random_capacity(n, 9)
    expected = interaction_from_mobius_oracle(mobius(c).values, n)
    assert np.allclose(interaction(c).values, expected, atol=1e-12)


def test_interaction_conjugate_relation():
    for n in (2, 4, 8):
        for seed in range(3):
            c = generate_random_capacity(n, seed)
            pc = popcount_table(n)
            sign = np.where(pc % 2 == 1, 1.0, -1.0)
            I, Ibar = interaction(c).values, interaction(conjugate(c)).values
            assert np.allclose(I[1:], (sign * Ibar)[1:], atol=1e-12)
            # the empty set is the exception: the two values add up to nu(N)
            assert I[0] + Ibar[0] == pytest.approx(c(c.full), abs=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_k_additivity_same_under_mobius_and_interaction(k):
    n = 5
    rng = np.random.default_rng(k)
    pc = popcount_table(n)
    m = np.where((pc >= 1) & (pc <= k), rng.uniform(0, 1, size=1 << n), 0.0)
    c = zeta(MobiusRep(n, m, "set"))
    assert is_k_additive(MobiusRep(n, m, "set"), k)
    I = interaction(c).values
    assert np.max(np.abs(I[pc > k])) < 1e-12
    # and conversely, a generic capacity is not k-additive on either side
    g = generate_random_capacity(n, k)
    assert not is_k_additive(mobius(g), k)
    assert np.max(np.abs(interaction(g).values[pc > k])) > 1e-6


def test_2additive_capacity_interaction_vanishes_above_pairs():
    for n in (3, 5):
        c = generate_random_2additive_capacity(n, 1)
        pc = popcount_table(n)
        assert np.max(np.abs(interaction(c).values[pc > 2])) < 1e-12


# ---------------------------------------------------------------------------
# bi-capacities


def test_bimobius_of_biunanimity():
    n = 3
    for idx, A, B in iter_pairs(n):
        m = bimobius(biunanimity_game(n, A, B)).values
        expected = np.zeros(3 ** n)
        expected[idx] = 1.0
        assert np.array_equal(m, expected)


def _bimobius_bruteforce(v):
    """Alternating sum over B subset of A and A' subset of B' subset of A^c."""
    n = v.n
    full = full_mask(n)
    out = np.zeros(3 ** n)
    for idx, A, Ap in iter_pairs(n):
        total = 0.0
        for B in range(1 << n):
            if B & ~A:
                continue
            for Bp in range(1 << n):
                if Ap & ~Bp or Bp & ~(full ^ A):
                    continue
                sign = (-1) ** (popcount(A & ~B) + popcount(Bp & ~Ap))
                total += sign * v(B, Bp)
        out[idx] = total
    return out


@pytest.mark.parametrize("n", [1, 2, 3])
def test_bimobius_matches_alternating_sum(n):
    v = generate_random_bicapacity(n, 4)
    assert np.allclose(bimobius(v).values, _bimobius_bruteforce(v), atol=1e-12)


@pytest.mark.parametrize("n", [1, 3, 5])
def test_bimobius_matches_back_substitution(n):
    v = generate_random_bicapacity(n, 8)
    assert np.allclose(bimobius(v).values, mobius_solve_oracle(v).values, atol=1e-9)


@pytest.mark.parametrize("n", [1, 2, 4, 6])
def test_bimobius_zeta_roundtrip(n):
    for seed in range(4):
        v = generate_random_bicapacity(n, seed)
        m = bimobius(v)
        assert np.allclose(zeta(m).values, v.values, atol=1e-12, rtol=0)
        assert np.allclose(bimobius(zeta(m)).values, m.values, atol=1e-12, rtol=0)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_biunanimity_basis_expansion(n):
    v = generate_random_bicapacity(n, 2)
    m = bimobius(v)
    total = np.zeros(3 ** n)
    for idx, A, B in iter_pairs(n):
        total += m.values[idx] * biunanimity_game(n, A, B).values
    assert np.allclose(total, v.values, atol=1e-12)


def test_cpt_type_bimobius_roundtrip():
    v = cpt_bicapacity(additive_capacity(3), additive_capacity(3, [0.2, 0.3, 0.5]))
    assert np.allclose(zeta(bimobius(v)).values, v.values, atol=1e-15)


def test_bi_derivative_preconditions_and_values():
    v = generate_random_bicapacity(3, 1)
    with pytest.raises(ValueError):
        bi_derivative(v, 1, 1, 0, 0)
    with pytest.raises(ValueError):
        bi_derivative(v, 0, 0b010, 0, 0)  # L must contain T
    assert bi_derivative(v, 0, 0, 0b001, 0b100) == pytest.approx(v(0b001, 0b100))
    # one step in S: v(K u i, L) - v(K, L)
    assert bi_derivative(v, 0b010, 0, 0b001, 0b100) == pytest.approx(v(0b011, 0b100) - v(0b001, 0b100))
    # one step in T: v(K, L) - v(K, L \ j)
    assert bi_derivative(v, 0, 0b100, 0b001, 0b100) == pytest.approx(v(0b001, 0b100) - v(0b001, 0))


def test_biinteraction_direct_via_bi_derivative():
    from bicap.transforms import interaction_weights

    n = 3
    v = generate_random_bicapacity(n, 6)
    I = biinteraction_direct(v)
    W = interaction_weights(n)
    full = full_mask(n)
    for idx, S, T in iter_pairs(n):
        free = full ^ (S | T)
        total = 0.0
        for K in range(1 << n):
            if K & ~free:
                continue
            total += W[popcount(S) + popcount(T), popcount(K)] * bi_derivative(v, S, T, K, full ^ (K | S))
        assert I.values[idx] == pytest.approx(total, abs=1e-12)


@pytest.mark.parametrize("n", range(1, 7))
def test_two_biinteraction_routes_agree(n):
    for seed in range(3):
        v = generate_random_bicapacity(n, seed)
        a = biinteraction(v).values
        b = biinteraction_direct(v).values
        assert np.max(np.abs(a - b)) < 1e-9


def test_biinteraction_zero_and_cap():
    assert np.all(biinteraction(BiGame(3, np.zeros(27))).values == 0)
    with pytest.raises(ValueError):
        biinteraction_direct(BiGame(11, np.zeros(3 ** 11)))


# ---------------------------------------------------------------------------
# 2-additive bi-capacities


@pytest.mark.parametrize("n", range(2, 7))
def test_2additive_interaction_support(n):
    # 2-additivity forces I(S,T) = 0 whenever |S| + |T| > 2
    pos, neg = pair_masks(n)
    pc = popcount_table(n)
    big = pc[pos] + pc[neg] > 2
    for seed in range(5):
        I = biinteraction(generate_random_2additive_bicapacity(n, seed))
        assert np.max(np.abs(I.values[big]), initial=0.0) < 1e-12


@pytest.mark.parametrize("n", range(2, 7))
def test_m_and_I_conversions(n):
    for seed in range(5):
        v = generate_random_2additive_bicapacity(n, seed)
        m = bimobius(v)
        I = biinteraction(v)
        full = full_mask(n)
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                bi, bj = 1 << i, 1 << j
                rest = full ^ bi ^ bj
                assert m(bi | bj, rest) == pytest.approx(I(bi | bj, 0), abs=1e-12)
                assert m(0, rest) == pytest.approx(I(0, bi | bj), abs=1e-12)
                assert m(bi, rest) == pytest.approx(I(bi, bj), abs=1e-12)
        assert np.allclose(twoadd_I_from_m(m).values, I.values, atol=1e-12)
        back = twoadd_m_from_I(I)
        assert np.allclose(back.values, m.values, atol=1e-12)
        assert np.allclose(zeta(back).values, v.values, atol=1e-12)


def test_m_from_I_without_pair_interactions():
    n = 3
    vals = np.zeros(3 ** n)
    for i in range(n):
        vals[pair_index(n, 1 << i, 0)] = 0.4 + i
        vals[pair_index(n, 0, 1 << i)] = 0.1 * i
    m = twoadd_m_from_I(InteractionRep(n, vals, "bi"))
    full = full_mask(n)
    for i in range(n):
        assert m(1 << i, full ^ (1 << i)) == pytest.approx(0.4 + i)


def test_conversions_reject_non_2additive():
    v = generate_random_bicapacity(4, 0)
    with pytest.raises(NotTwoAdditiveError):
        twoadd_I_from_m(bimobius(v))
    with pytest.raises(NotTwoAdditiveError):
        twoadd_m_from_I(biinteraction(v))


@pytest.mark.parametrize("n", range(2, 7))
def test_interaction_identities_hold(n):
    for seed in range(20):
        I = biinteraction(generate_random_2additive_bicapacity(n, seed))
        assert max(abs(r) for r in interaction_identities(I)) < 1e-9


@pytest.mark.parametrize("n", range(2, 6))
def test_validity_checkers_accept_generated(n):
    for seed in range(10):
        v = generate_random_2additive_bicapacity(n, seed)
        rep = check_mobius_validity(bimobius(v))
        assert rep.ok, str(rep)
        rep = check_interaction_validity(biinteraction(v))
        assert rep.ok, str(rep)


def test_mobius_validity_condition_i():
    m = bimobius(generate_random_2additive_bicapacity(3, 0))
    vals = m.values.copy()
    vals[0] = 0.0
    rep = check_mobius_validity(MobiusRep(3, vals, "bi"))
    assert any("m(emptyset,N)" in x.kind for x in rep.violations)


def test_mobius_validity_catches_sign_flip():
    n = 3
    v = generate_random_2additive_bicapacity(n, 2)
    m = bimobius(v)
    # pushing m(1, 3) down while raising m(1, 23) keeps every equality in (i)
    # but breaks monotonicity in direction of criterion 2
    vals = m.values.copy()
    vals[pair_index(n, 0b001, 0b100)] -= 5.0
    vals[pair_index(n, 0b001, 0b110)] += 5.0
    rep = check_mobius_validity(MobiusRep(n, vals, "bi"))
    assert not rep.ok
    assert all("(ii" in x.kind for x in rep.violations)
    # the same edit makes the zeta transform non-isotone
    from bicap.setfn import validate_bicapacity

    assert not validate_bicapacity(zeta(MobiusRep(n, vals, "bi"))).ok


def test_interaction_validity_identity_iii():
    I = biinteraction(generate_random_2additive_bicapacity(3, 4))
    vals = I.values.copy()
    vals[pair_index(3, 0, 0)] += 0.1
    rep = check_interaction_validity(InteractionRep(3, vals, "bi"))
    assert [x.kind for x in rep.violations] == ["(iii) I(0,0) = -(sum I(i,j) + sum I(ij,0) + I(0,ij))/6"]


def _code_without(n, i, A, B):
    code, w = 0, 1
    for j in range(n):
        if j == i:
            continue
        code += (2 if A >> j & 1 else 0 if B >> j & 1 else 1) * w
        w *= 3
    return code


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_margin_at_signed_sets_is_rearrangement_coefficient(n):
    from bicap.integrals import rearrangement_coefficients

    rng = np.random.default_rng(n)
    for seed in range(10):
        I = biinteraction(generate_random_2additive_bicapacity(n, seed))
        f = rng.normal(size=n)
        coef = rearrangement_coefficients(I, f)
        g1, g2 = interaction_margins(I)
        plus = {j for j in range(n) if f[j] >= 0}
        for i in range(n):
            bi = 1 << i
            if i in plus:
                A = sum(1 << j for j in plus if j != i and I(bi | 1 << j, 0) < 0)
                B = sum(1 << j for j in range(n) if j not in plus and I(bi, 1 << j) > 0)
                assert g1[i, _code_without(n, i, A, B)] == pytest.approx(coef[i], abs=1e-12)
            else:
                A = sum(1 << j for j in plus if I(1 << j, bi) < 0)
                B = sum(1 << j for j in range(n) if j not in plus and j != i and I(0, bi | 1 << j) > 0)
                assert g2[i, _code_without(n, i, A, B)] == pytest.approx(coef[i], abs=1e-12)


def test_margins_are_the_isotonicity_increments():
    # each margin equals a covering increment of v, so a valid v has them >= 0
    n = 4
    v = generate_random_2additive_bicapacity(n, 11)
    I = biinteraction(v)
    g1, g2 = interaction_margins(I)
    assert g1.min() >= -1e-12 and g2.min() >= -1e-12
    for i in range(n):
        bi = 1 << i
        for code in range(3 ** (n - 1)):
            from bicap.transforms import _decode_other

            A, B = _decode_other(n, i, code)
            assert g1[i, code] == pytest.approx(v(A | bi, B) - v(A, B), abs=1e-12)
            assert g2[i, code] == pytest.approx(v(A, B) - v(A, B | bi), abs=1e-12)
