import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from drlos.qnet import (LAYER_SIZES, NormStats, QNetwork, TrainHyper, action_code,
                        compute_targets, dump_weights, forward, gradient_check, init_network,
                        records_matrix, train_session, training_data)
from drlos.state import PopulationState, make_record


def synthetic_records(rng, count=100):
    recs = []
    for _ in range(count):
        s = PopulationState(*rng.random(3))
        op = int(rng.integers(1, 3))
        s_next = PopulationState(*rng.random(3))
        recs.append(make_record(s, op, s_next))
    return recs


def test_default_hyperparameters():
    h = TrainHyper()
    assert (h.lr0, h.decay, h.max_iters, h.gamma) == (0.01, 1e-4, 80000, 0.9)
    assert LAYER_SIZES == (4, 40, 40, 1)
    assert h.learning_rate(10000) == pytest.approx(0.005)


@pytest.mark.parametrize("kwargs", [dict(lr0=0), dict(decay=-1), dict(max_iters=-1),
                                    dict(gamma=1.0)])
def test_hyper_validation(kwargs):
    with pytest.raises(ValueError):
        TrainHyper(**kwargs)


def test_init_network_layout():
    net = init_network(0)
    assert net.sizes == LAYER_SIZES
    for W in net.weights:
        assert np.all(np.abs(W) <= 0.5 / np.sqrt(W.shape[0]))
    assert np.all(net.biases[0] == 0.1) and np.all(net.biases[1] == 0.1)
    assert np.all(net.biases[2] == 0.0)


def test_action_codes():
    assert action_code(1, 2) == 0.0 and action_code(2, 2) == 1.0
    assert action_code(2, 3) == 0.5


def test_forward_matches_hand_computation():
    # one neuron per hidden layer so the pass is checkable by hand
    W = [np.array([[1.0], [-1.0], [2.0], [0.5]]), np.array([[3.0]]), np.array([[-2.0]])]
    b = [np.array([0.1]), np.array([-1.0]), np.array([0.25])]
    net = QNetwork(W, b)
    # z1 = 0.2 - 0.1 + 0.6 + 0.5 + 0.1 = 1.3; z2 = 3.9 - 1 = 2.9; out = -5.8 + 0.25
    assert forward(net, [0.2, 0.1, 0.3], 1.0) == pytest.approx(-5.55)
    # a negative first pre-activation zeroes the chain: z2 = -1 -> 0, out = 0.25
    assert forward(net, [0.0, 1.0, 0.0], 0.0) == pytest.approx(0.25)


def test_norm_stats_round_trip(rng):
    rows = records_matrix(synthetic_records(rng, 30))
    norm = NormStats.from_rows(rows)
    z = norm.normalize(rows)
    assert np.all(z >= 0) and np.all(z <= 1)
    cols = [0, 1, 2, 4, 5, 6, 7]
    assert np.allclose(norm.denormalize(z)[:, cols], rows[:, cols])
    assert set(np.unique(z[:, 3])) <= {0.0, 1.0}


def test_norm_degenerate_column():
    rows = np.zeros((5, 8))
    rows[:, 3] = 1
    rows[:, 0] = np.arange(5)
    z = NormStats.from_rows(rows).normalize(rows)
    assert np.all(z[:, 1] == 0.5)
    assert z[:, 0].tolist() == [0, 0.25, 0.5, 0.75, 1]


def test_state_input_clamps():
    norm = NormStats(np.zeros(8), np.ones(8))
    assert norm.state_input(PopulationState(2.0, -1.0, 0.5)).tolist() == [1.0, 0.0, 0.5]


def test_norm_stats_validation():
    with pytest.raises(ValueError):
        NormStats(np.zeros(7), np.ones(7))
    with pytest.raises(ValueError):
        NormStats(np.ones(8), np.zeros(8))


def test_targets_with_gamma_zero_are_rewards(rng):
    recs = synthetic_records(rng, 20)
    norm = NormStats.from_rows(records_matrix(recs))
    y = compute_targets(init_network(1), recs, norm, gamma=0.0)
    assert np.allclose(y, norm.normalize(records_matrix(recs))[:, 4])


def test_targets_bootstrap(rng):
    recs = synthetic_records(rng, 10)
    net = init_network(2)
    norm = NormStats.from_rows(records_matrix(recs))
    y = compute_targets(net, recs, norm, gamma=0.9)
    rows = norm.normalize(records_matrix(recs))
    for i, row in enumerate(rows):
        best = max(forward(net, row[5:8], a) for a in (0.0, 1.0))
        assert y[i] == pytest.approx(row[4] + 0.9 * best)


@pytest.mark.parametrize("seed", range(4))
def test_gradient_check(seed):
    rng = np.random.default_rng(seed)
    net = init_network(rng, (4, 6, 5, 1))
    X, y = rng.random((8, 4)), rng.random(8)
    assert gradient_check(net, X, y) < 1e-4


def test_gradient_check_detects_wrong_gradient(rng):
    class Broken(QNetwork):
        def loss_and_grads(self, X, y):
            loss, grads = super().loss_and_grads(X, y)
            return loss, [2 * g for g in grads]

        def copy(self):
            return Broken(*super().copy().__dict__.values())

    net = init_network(rng, (4, 5, 5, 1))
    broken = Broken(net.weights, net.biases)
    assert gradient_check(broken, rng.random((6, 4)), rng.random(6)) > 0.1


def test_training_descends(rng):
    recs = synthetic_records(rng, 60)
    net0 = init_network(5)
    trained, _ = train_session(net0, recs, TrainHyper(max_iters=500))
    first, final = trained.history[-1]
    assert final < first
    assert net0.history == []  # the input network is untouched


def test_gamma_zero_linear_regression():
    rng = np.random.default_rng(9)
    recs = []
    for _ in range(100):
        s = rng.random(3)
        op = int(rng.integers(1, 3))
        s_next = rng.random(3)
        # reward is affine in the normalised inputs
        r = 0.5 * s[0] - 0.3 * s[1] + 0.2 * s[2] + 0.4 * (op - 1)
        recs.append(make_record(PopulationState(*s), op, PopulationState(*s_next)))
        object.__setattr__(recs[-1], "r", r)
    hyper = TrainHyper(max_iters=3000, gamma=0.0)
    trained, _ = train_session(None, recs, hyper, rng=np.random.default_rng(0))
    first, final = trained.history[-1]
    assert final < 0.1 * first


def test_zero_iterations_leave_weights(rng):
    recs = synthetic_records(rng, 10)
    net = init_network(0)
    trained, _ = train_session(net, recs, TrainHyper(max_iters=0))
    assert all(np.array_equal(a, b) for a, b in zip(net.parameters(), trained.parameters()))
    assert trained.history[-1][0] == trained.history[-1][1]


def test_training_data_shapes(rng):
    recs = synthetic_records(rng, 12)
    norm, X, y = training_data(init_network(0), recs, TrainHyper())
    assert X.shape == (12, 4) and y.shape == (12,)
    assert isinstance(norm, NormStats)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31))
def test_train_session_deterministic(seed):
    rng = np.random.default_rng(seed)
    recs = synthetic_records(rng, 15)
    a, _ = train_session(None, recs, TrainHyper(max_iters=20), rng=np.random.default_rng(seed))
    b, _ = train_session(None, recs, TrainHyper(max_iters=20), rng=np.random.default_rng(seed))
    assert all(np.array_equal(p, q) for p, q in zip(a.parameters(), b.parameters()))


def test_dump_weights(tmp_path):
    net = init_network(0, (4, 3, 2, 1))
    path = tmp_path / "w.txt"
    dump_weights(net, path)
    text = path.read_text()
    assert text.count("# layer") == 6
    assert "# layer 0 weights 4x3" in text
