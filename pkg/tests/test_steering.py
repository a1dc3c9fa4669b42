"""Steering kits, branch statistics, abort budgets, and full rounds."""

import math

import pytest

from exclab.pbr import BitString, bit_state, critical_angle
from exclab.qcore import StateVector, inner_product, make_rng
from exclab.steering import (
    SteeringParameters,
    SteeringRoundResult,
    build_kit,
    choose_k,
    p_abort,
    p_global_steer,
    p_steer,
    run_steering_round,
    steer_one,
)


def fidelity(a: StateVector, b: StateVector) -> float:
    return abs(inner_product(a, b))


def test_build_kit_pair_amplitudes_for_m_two():
    kit = build_kit(2)
    amplitudes = kit.phi_ab.amplitudes
    assert amplitudes[0].real == pytest.approx(2.0 ** -0.25, abs=1e-15)
    assert amplitudes[3].real == pytest.approx(0.5411961001461971, abs=1e-15)
    assert amplitudes[1] == 0.0 and amplitudes[2] == 0.0


@pytest.mark.parametrize("m", [1, 2, 3, 5, 8, 32])
def test_steering_branches_hit_their_targets(m):
    kit = build_kit(m)
    theta = critical_angle(m)
    minus_plus = {
        (0, 1): StateVector.of([1 / math.sqrt(2), -1 / math.sqrt(2)]),
        (1, 1): StateVector.of([1 / math.sqrt(2), 1 / math.sqrt(2)]),
    }
    for bit in (0, 1):
        # Outcome 0 lands exactly on the bit state at the critical angle.
        assert fidelity(kit.branch_posts[bit][0],
                        bit_state(bit, theta)) == pytest.approx(1.0, abs=1e-12)
        # Outcome 1 lands on the signal-free conjugate state.
        assert fidelity(kit.branch_posts[bit][1],
                        minus_plus[(bit, 1)]) == pytest.approx(1.0, abs=1e-12)
        p0, p1 = kit.branch_probs[bit]
        sin_t = math.sin(theta)
        assert p0 == pytest.approx(1.0 / (1.0 + sin_t), abs=1e-12)
        assert p1 == pytest.approx(sin_t / (1.0 + sin_t), abs=1e-12)
        assert p0 + p1 == pytest.approx(1.0, abs=1e-12)


def test_branch_posts_match_declared_targets():
    kit = build_kit(4)
    ordered = (kit.branch_posts[0][0], kit.branch_posts[0][1],
               kit.branch_posts[1][0], kit.branch_posts[1][1])
    for post, target in zip(ordered, kit.targets):
        assert fidelity(post, target) == pytest.approx(1.0, abs=1e-12)


def test_build_kit_is_cached():
    assert build_kit(3) is build_kit(3)


@pytest.mark.parametrize("m", [1, 2, 4, 7, 16, 32])
def test_p_steer_algebraic_form(m):
    # 1/(1 + sin(2 atan(2**(1/m) - 1))) reduces to this two-power expression.
    algebraic = 1.0 + 2.0 ** ((m - 2) / m) - 2.0 ** ((m - 1) / m)
    assert p_steer(m) == pytest.approx(algebraic, abs=1e-12)


def test_p_steer_known_points():
    assert p_steer(1) == pytest.approx(0.5, abs=1e-15)
    assert p_steer(2) == pytest.approx(2.0 / (2.0 + math.sqrt(2.0)), abs=1e-15)


def test_p_global_steer_is_the_power():
    assert p_global_steer(3, 2) == pytest.approx(p_steer(2) ** 3, rel=1e-12)
    assert p_global_steer(1, 5) == pytest.approx(p_steer(5), rel=1e-15)
    values = [p_global_steer(n, 4) for n in (1, 2, 4, 8, 16)]
    assert all(a > b for a, b in zip(values, values[1:]))
    with pytest.raises(ValueError):
        p_global_steer(0, 4)


def test_p_abort_frozen_values():
    assert p_abort(8, 8, 11) == pytest.approx(0.03288901594722301, rel=1e-12)
    assert p_abort(4, 4, 11) == pytest.approx(0.023924134114610668, rel=1e-12)
    single = 1.0 - p_global_steer(2, 2)
    assert p_abort(2, 2, 3) == pytest.approx(single ** 3, rel=1e-12)
    with pytest.raises(ValueError):
        p_abort(2, 2, 0)


def test_choose_k_golden_and_minimality():
    assert choose_k(1.0, 0.05) == 11
    for alpha, delta in ((1.0, 0.05), (0.5, 0.05), (0.25, 0.2), (1.0, 0.75)):
        k = choose_k(alpha, delta)
        base = 1.0 - 4.0 ** (-1.0 / alpha)
        assert base ** k <= delta
        if k > 1:
            assert base ** (k - 1) > delta


def test_choose_k_validation():
    for alpha in (0.0, -1.0, 1.5):
        with pytest.raises(ValueError):
            choose_k(alpha, 0.05)
    for delta in (0.0, 1.0, -0.3):
        with pytest.raises(ValueError):
            choose_k(1.0, delta)


def test_steer_one_statistics_and_posts():
    kit = build_kit(2)
    rng = make_rng(321)
    trials = 20000
    hits = 0
    for _ in range(trials):
        outcome, post = steer_one(kit, 1, rng)
        assert post is kit.branch_posts[1][outcome]
        hits += outcome == 0
    p0 = kit.branch_probs[1][0]
    sigma = math.sqrt(p0 * (1.0 - p0) / trials)
    assert hits / trials == pytest.approx(p0, abs=3 * sigma)
    with pytest.raises(ValueError):
        steer_one(kit, 2, make_rng(0))


def test_steer_one_reproducible():
    kit = build_kit(3)
    first = [steer_one(kit, 0, make_rng(11))[0] for _ in range(5)]
    second = [steer_one(kit, 0, make_rng(11))[0] for _ in range(5)]
    assert first == second


def test_steering_parameters_validation():
    SteeringParameters(4, 2, 5, 0.05)
    with pytest.raises(ValueError):
        SteeringParameters(0, 1, 5, 0.05)
    with pytest.raises(ValueError):
        SteeringParameters(4, 5, 5, 0.05)
    with pytest.raises(ValueError):
        SteeringParameters(4, 2, 0, 0.05)
    with pytest.raises(ValueError):
        SteeringParameters(4, 2, 5, 1.0)


def test_run_steering_round_success_states_match_input_bits():
    params = SteeringParameters(3, 2, 50, 0.05)
    x = BitString.from_string("101")
    theta = critical_angle(2)
    rng = make_rng(5)
    result = run_steering_round(params, x, rng)
    # k=50 makes abort essentially impossible at this seed.
    assert not result.aborted
    assert 0 <= result.set_index < 50
    assert len(result.receiver_states) == 3
    for bit, state in zip(x, result.receiver_states):
        assert fidelity(state, bit_state(bit, theta)) == pytest.approx(
            1.0, abs=1e-12
        )


def test_run_steering_round_abort_shape_and_rate():
    params = SteeringParameters(2, 2, 3, 0.5)
    x = BitString.from_string("10")
    rng = make_rng(17)
    trials = 3000
    aborts = 0
    for _ in range(trials):
        result = run_steering_round(params, x, rng)
        if result.aborted:
            assert result.set_index is None
            assert result.receiver_states is None
            aborts += 1
    expected = p_abort(2, 2, 3)
    sigma = math.sqrt(expected * (1.0 - expected) / trials)
    assert aborts / trials == pytest.approx(expected, abs=3 * sigma)


def test_run_steering_round_checks_input_length():
    params = SteeringParameters(3, 2, 5, 0.05)
    with pytest.raises(ValueError):
        run_steering_round(params, BitString.from_string("10"), make_rng(0))


def test_run_steering_round_reproducible():
    params = SteeringParameters(4, 3, 8, 0.1)
    x = BitString.from_string("0110")
    first = run_steering_round(params, x, make_rng(99))
    second = run_steering_round(params, x, make_rng(99))
    assert first.aborted == second.aborted
    assert first.set_index == second.set_index
    if not first.aborted:
        for a, b in zip(first.receiver_states, second.receiver_states):
            assert fidelity(a, b) == pytest.approx(1.0, abs=1e-15)
    assert isinstance(first, SteeringRoundResult)
