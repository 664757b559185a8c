import numpy as np
import pytest

from nco.linalg import StochasticVector
from nco.network import (GraphSequence, ValidationError, cyclic_gossip,
                         detect_B, edges_at, lambda_param, mixing,
                         transition_product, validate_weight_matrix)
from nco.schedules import PowerLawSchedule


def test_validate_identity_passes():
    r = StochasticVector.uniform(3)
    rep = validate_weight_matrix(np.eye(3), r, eta=1.0)
    assert rep.ok
    assert rep.failures() == []


def test_validate_bad_row_sum():
    r = StochasticVector.uniform(2)
    W = np.array([[0.5, 0.4], [0.5, 0.5]])
    rep = validate_weight_matrix(W, r, eta=0.1)
    assert not rep.ok
    assert "row_stochastic" in rep.failures()


def test_validate_shape_error():
    r = StochasticVector.uniform(3)
    with pytest.raises(ValidationError):
        validate_weight_matrix(np.eye(2), r, eta=1.0)


def test_cyclic_gossip_uniform_entries():
    # uniform r: every nonzero entry is 1/2 or 1, so eta = 1/2
    r = StochasticVector.uniform(6)
    for t in range(1, 7):
        W = cyclic_gossip(6, r, t)
        rep = validate_weight_matrix(W, r, eta=0.5)
        assert rep.ok, (t, rep.failures())
        assert rep.min_nonzero == pytest.approx(0.5)


def test_cyclic_gossip_t1_matrix():
    # t=1 mixes agents 1 and 2 (indices 0, 1)
    r = StochasticVector.uniform(6)
    W = cyclic_gossip(6, r, 1)
    expect = np.eye(6)
    expect[0, 0] = expect[0, 1] = expect[1, 0] = expect[1, 1] = 0.5
    assert np.allclose(W, expect)


def test_cyclic_gossip_period():
    r = StochasticVector.uniform(5)
    for t in range(1, 6):
        assert np.allclose(cyclic_gossip(5, r, t), cyclic_gossip(5, r, t + 5))


def test_cyclic_sequence_validates():
    g = GraphSequence.cyclic(6)
    g.validate()
    assert g.eta == pytest.approx(0.5)
    assert g.B == 5
    assert g.period == 6


def test_detect_B_complete_graph():
    g = GraphSequence.complete(4)
    assert detect_B(g, 8) == 1


def test_detect_B_cyclic_six():
    g = GraphSequence.cyclic(6)
    assert detect_B(g, 12) == 5


def test_detect_B_disconnected_sentinel():
    # identity matrices: no edges ever, no B exists
    r = StochasticVector.uniform(3)
    g = GraphSequence.static(np.eye(3), r)
    assert detect_B(g, 10) is None


def test_edges_at_cyclic():
    g = GraphSequence.cyclic(4)
    assert sorted(edges_at(g, 1)) == [(0, 1), (1, 0)]


def test_lambda_param_values():
    assert lambda_param(1.0, 1.0, 1, 2) == pytest.approx(1.0 / 8)
    assert lambda_param(0.5, 1.0 / 6, 5, 6) == pytest.approx(1.0 / 4320)
    assert lambda_param(0.5, 1.0 / 6, 6, 6) == pytest.approx(1.0 / 5184)


def test_lambda_param_cyclic_benchmark():
    g = GraphSequence.cyclic(6)
    assert g.lam == pytest.approx(1.0 / 4320)
    assert g.lam == pytest.approx(2.3148e-4, rel=1e-4)


def test_lambda_param_range_errors():
    with pytest.raises(ValueError):
        lambda_param(0.0, 0.5, 1, 2)
    with pytest.raises(ValueError):
        lambda_param(0.5, 1.5, 1, 2)
    with pytest.raises(ValueError):
        lambda_param(0.5, 0.5, 0, 2)
    with pytest.raises(ValueError):
        lambda_param(0.5, 0.5, 1, 1)


def test_mixing_beta_one_is_W():
    r = StochasticVector.uniform(6)
    W = cyclic_gossip(6, r, 1)
    assert np.allclose(mixing(W, 1.0), W)


def test_mixing_identity_fixed_point():
    assert np.allclose(mixing(np.eye(3), 0.5), np.eye(3))


def test_mixing_benchmark_rows():
    # beta=0.21, cyclic n=6 uniform, t=1: first two rows (0.895, 0.105, 0...)
    r = StochasticVector.uniform(6)
    A = mixing(cyclic_gossip(6, r, 1), 0.21)
    assert np.allclose(A[0, :2], [0.895, 0.105])
    assert np.allclose(A[1, :2], [0.105, 0.895])
    assert np.allclose(A[0, 2:], 0.0)


def test_mixing_beta_range():
    with pytest.raises(ValueError):
        mixing(np.eye(2), 0.0)
    with pytest.raises(ValueError):
        mixing(np.eye(2), 1.5)


def test_mixing_preserves_stochasticity():
    g = GraphSequence.cyclic(6)
    for t in range(1, 13):
        A = mixing(g.weight(t), 0.21 * t ** -0.6)
        assert np.allclose(A @ np.ones(6), 1.0, atol=1e-12)
        assert np.allclose(g.r.entries @ A, g.r.entries, atol=1e-12)


SCHED = PowerLawSchedule(alpha0=0.0055, nu=0.77, beta0=0.21, mu=0.6)


def test_transition_product_conventions():
    g = GraphSequence.cyclic(6)
    s = 3
    # Phi(s+1:s) = I, Phi(s+2:s) = A(s+1)
    assert np.allclose(transition_product(g, SCHED, s + 1, s), np.eye(6))
    A = mixing(g.weight(s + 1), SCHED.eval(s + 1)[1])
    assert np.allclose(transition_product(g, SCHED, s + 2, s), A)
    # Phi(t:t-1) = I
    assert np.allclose(transition_product(g, SCHED, s, s + 1), np.eye(6))


def test_transition_product_invariants():
    g = GraphSequence.cyclic(6)
    P = transition_product(g, SCHED, 17, 2)
    assert np.allclose(g.r.entries @ P, g.r.entries, atol=1e-10)
    assert np.allclose(P @ np.ones(6), 1.0, atol=1e-10)


def test_transition_product_bad_range():
    g = GraphSequence.cyclic(6)
    with pytest.raises(ValueError):
        transition_product(g, SCHED, 2, 5)


def test_transition_product_static_power():
    # static doubly stochastic W, beta = 1: Phi(t:s) = W^(t-s-1)
    W = np.array([[0.7, 0.3, 0.0], [0.3, 0.4, 0.3], [0.0, 0.3, 0.7]])
    r = StochasticVector.uniform(3)
    g = GraphSequence.static(W, r)
    sched = PowerLawSchedule(alpha0=1.0, nu=1.0, beta0=1.0, mu=0.0)
    P = transition_product(g, sched, 7, 2)
    assert np.allclose(P, np.linalg.matrix_power(W, 4), atol=1e-12)


def test_declared_B_mismatch_raises():
    g = GraphSequence.cyclic(6)
    g.B = 3  # too small: actual union connectivity needs 5 steps
    with pytest.raises(ValidationError):
        g.validate()


def test_from_file_roundtrip(tmp_path):
    r = StochasticVector.uniform(2)
    W1 = np.array([[0.5, 0.5], [0.5, 0.5]])
    path = tmp_path / "seq.txt"
    path.write_text("0.5 0.5\n0.5 0.5\n\n1 0\n0 1\n")
    g = GraphSequence.from_file(path, r)
    assert g.n == 2
    assert g.period == 2
    assert np.allclose(g.weight(1), W1)
    assert np.allclose(g.weight(2), np.eye(2))
    assert np.allclose(g.weight(3), W1)
    assert g.B == 2  # a window may start at the identity step


def test_from_file_disconnected(tmp_path):
    path = tmp_path / "seq.txt"
    path.write_text("1 0\n0 1\n")
    with pytest.raises(ValidationError):
        GraphSequence.from_file(path, StochasticVector.uniform(2))
