import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conflictruin._errors import DomainError
from conflictruin.battle import (
    E,
    BattleModel,
    battle_p_general,
    battle_p_simple,
    logit,
    q_constant_p,
    q_general,
    q_general_expanded,
    q_simple,
    sigmoid,
    win_probability,
)
from conflictruin.markov import ConflictShape, absorption_q_solve, build_chain

probs = st.floats(min_value=0.01, max_value=0.99)
small = st.integers(min_value=1, max_value=8)


def test_sigmoid_logit_basics():
    assert sigmoid(0) == 0.5
    assert logit(0.5) == 0.0
    assert abs(sigmoid(logit(0.3)) - 0.3) < 1e-15
    assert sigmoid(-800) > 0.0 or sigmoid(-800) == 0.0  # no OverflowError
    assert sigmoid(800) == 1.0


@pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5, math.nan])
def test_logit_domain(p):
    with pytest.raises(DomainError):
        logit(p)


@given(st.floats(min_value=-12, max_value=12))
def test_sigmoid_round_trip(x):
    assert logit(sigmoid(x)) == pytest.approx(x, abs=1e-9)


def test_battle_p_simple_examples():
    assert battle_p_simple(1, 5, 5) == 0.5
    assert battle_p_simple(10, 2, 50) == pytest.approx(5 / 7, abs=1e-15)
    assert battle_p_simple(1e6, 1, 1) == pytest.approx(1 / (1 + 1e6), rel=1e-12)


@pytest.mark.parametrize("args", [(0, 1, 1), (1, 0, 1), (1, 1, -2), (-1, 1, 1)])
def test_battle_p_simple_rejects_nonpositive(args):
    with pytest.raises(DomainError):
        battle_p_simple(*args)


def test_battle_p_simple_monotone():
    assert battle_p_simple(2, 3, 4) < battle_p_simple(1, 3, 4)
    assert battle_p_simple(1, 4, 4) < battle_p_simple(1, 3, 4)
    assert battle_p_simple(1, 3, 5) > battle_p_simple(1, 3, 4)


def test_battle_p_general_examples():
    model = BattleModel(s=1, R=1, gamma=1)
    assert battle_p_general(model, 3, 3, 3) == 0.5
    assert battle_p_general(model, 3, 3, 5) == pytest.approx(1 / (1 + math.exp(-1)), abs=1e-15)
    assert battle_p_general(model, 3, 3, 1) == pytest.approx(1 / (1 + math.exp(1)), abs=1e-15)
    # the alternate convention mirrors the shift
    assert battle_p_general(model, 3, 3, 5, "appendix") == pytest.approx(0.2689414213699951, abs=1e-15)


@pytest.mark.parametrize("i", [1, 4, 6])
def test_battle_p_general_reduces_to_simple(i):
    assert battle_p_general(BattleModel(3), 3, 4, i) == pytest.approx(battle_p_simple(3, 3, 4), rel=1e-14)


def test_randomness_limits():
    strong = BattleModel(s=4, R=1e-2)
    fuzzy = BattleModel(s=4, R=1e3)
    assert battle_p_general(strong, 2, 2, 2) < 1e-50
    assert battle_p_general(fuzzy, 2, 2, 2) == pytest.approx(0.5, abs=1e-3)
    with pytest.raises(DomainError, match="double precision"):
        battle_p_general(BattleModel(s=4, R=1e-3), 2, 2, 2)


def test_model_validation():
    with pytest.raises(DomainError):
        BattleModel(s=0)
    with pytest.raises(DomainError):
        BattleModel(s=1, R=-1)
    with pytest.raises(DomainError):
        BattleModel(s=1, gamma=math.inf)
    with pytest.raises(DomainError):
        battle_p_general(BattleModel(1), 2, 2, 1, convention="sideways")


def test_q_constant_p_examples():
    assert q_constant_p(0.5, 3, 7) == 0.3
    assert q_constant_p(0.6, 2, 3) == pytest.approx(135 / 211, abs=1e-15)
    for p in (0.1, 0.37, 0.9):
        assert q_constant_p(p, 1, 1) == pytest.approx(p, abs=1e-15)
    with pytest.raises(DomainError):
        q_constant_p(1.0, 2, 2)


@given(probs, small, small)
def test_q_constant_p_matches_exact_chain(p, m, n):
    from conftest import exact_q

    expected = float(exact_q([Fraction(p)] * (m + n - 1), n))
    assert q_constant_p(p, m, n) == pytest.approx(expected, abs=1e-12)


@given(probs, small, small)
def test_complementarity(p, m, n):
    assert q_constant_p(p, m, n) + q_constant_p(1 - p, n, m) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("m,n", [(1, 1), (3, 7), (8, 2)])
def test_near_tie_continuity(m, n):
    for p in (0.5 + 1e-9, 0.5 - 1e-9, 0.5 + 1e-12):
        assert abs(q_constant_p(p, m, n) - m / (m + n)) < 1e-6


def test_near_tie_branch_is_continuous_with_expm1_branch():
    # just outside the tie band the expm1 route is used; values must agree smoothly
    for p in (0.5 + 2e-11, 0.5 + 5e-11):
        inside = q_constant_p(p, 4, 6)
        assert inside == pytest.approx(0.4 - 6 * 4 / 10 * (math.log1p(-p) - math.log(p)) / 2, abs=1e-15)


def test_real_valued_part_counts():
    q = q_constant_p(0.55, 2.5, 3.5)
    rho = 0.45 / 0.55
    assert q == pytest.approx((1 - rho**2.5) / (1 - rho**6), rel=1e-13)


def test_q_simple_examples():
    assert q_simple(2, 1, 1) == pytest.approx(1 / 3, abs=1e-15)
    assert q_simple(10, 1, 50) == pytest.approx(0.8, abs=1e-12)
    assert q_simple(10, 2, 50) == pytest.approx(0.84, abs=1e-12)
    for m, n in [(1, 1), (3, 7), (4, 3), (8, 8)]:
        assert q_simple(n / m, m, n) == pytest.approx(m / (m + n), abs=1e-14)


@given(st.floats(min_value=0.05, max_value=20), small, small)
def test_q_simple_is_constant_p_composition(s, m, n):
    assert q_simple(s, m, n) == pytest.approx(q_constant_p(battle_p_simple(s, m, n), m, n), abs=1e-12)


def test_q_simple_decreasing_in_s():
    grid = [0.1 * 1.25**k for k in range(40)]
    for m, n in [(1, 3), (2, 2), (5, 4)]:
        qs = [q_simple(s, m, n) for s in grid]
        assert all(a > b for a, b in zip(qs, qs[1:]))


def test_q_simple_extreme_strengths_finite():
    q = q_simple(1e6, 50, 5)
    assert math.isfinite(q) and 0 <= q <= 1
    assert q == pytest.approx((1e6 * 50 / 5) ** -5, rel=1e-12)
    assert q_simple(1e-12, 40, 40) == pytest.approx(1.0, abs=1e-15)
    assert q_simple(1e300, 10, 10) == 0.0


def test_E_boundaries():
    for x in (0.2, 0.5, 0.8):
        assert E(x, 3, 0) == 0.0
        assert E(x, 0, 3) == 1.0
    for j, k in [(1, 1), (2, 5), (7, 3)]:
        assert E(0.5, j, k) == pytest.approx(k / (j + k), abs=1e-15)
    with pytest.raises(DomainError):
        E(0.5, 0, 0)
    with pytest.raises(DomainError):
        E(1.2, 1, 1)


def test_E_matches_gamblers_ruin():
    # Player 1 at distance j from its goal: same as q_constant_p with m=k, n=j
    assert E(0.6, 3, 2) == pytest.approx(q_constant_p(0.6, 2, 3), abs=1e-15)


@given(st.floats(min_value=0.1, max_value=10), small, small)
def test_q_general_reduces_to_simple(s, m, n):
    assert q_general(BattleModel(s), m, n) == pytest.approx(q_simple(s, m, n), abs=1e-12)


@pytest.mark.parametrize("convention", ["eq10", "appendix"])
def test_q_general_matches_chain_under_same_convention(convention):
    model = BattleModel(s=1, R=1, gamma=0.5)
    chain = build_chain(ConflictShape(2, 2), model, convention)
    assert q_general(model, 2, 2, convention) == pytest.approx(absorption_q_solve(chain), abs=1e-9)


def test_q_general_single_part():
    model = BattleModel(s=2, R=0.7, gamma=0.4)
    n = 4
    base = sigmoid(-math.log(2 * 1 / n) / 0.7)
    p_near = sigmoid(-math.log(2 / n) / 0.7 - 0.4)
    e = E(p_near, n - 1, 1)
    assert q_general(model, 1, n) == pytest.approx(base * e / (1 - base * (1 - e)), abs=1e-14)


def test_q_general_rejects_fractional_shape():
    with pytest.raises(DomainError):
        q_general(BattleModel(1), 2.5, 3)


def test_expanded_form_matches_eq10_chain():
    for model, m, n in [(BattleModel(2, 1, 0.5), 2, 3), (BattleModel(0.5, 2, -0.3), 3, 2)]:
        chain = build_chain(ConflictShape(m, n), model, "eq10")
        assert q_general_expanded(model, m, n) == pytest.approx(absorption_q_solve(chain), abs=1e-12)


def test_win_probability_dispatch():
    assert win_probability(3, 7, p=0.5).method == "closed_form_constant_p"
    assert win_probability(3, 3, s=1).q == 0.5
    assert win_probability(2, 2, model=BattleModel(1, 1, 0.5)).method == "closed_form_general"
    with pytest.raises(DomainError):
        win_probability(2, 2, s=1, p=0.5)


def test_expanded_form_singular_at_tie():
    with pytest.raises(DomainError, match="singular"):
        q_general_expanded(BattleModel(1), 2, 2)
