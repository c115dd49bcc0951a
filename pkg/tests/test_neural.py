"""MLP, loss, optimizer and checkpoint tests."""

import numpy as np
import pytest

from rdq_lab.errors import CheckpointError, TrainingError, UsageError
from rdq_lab.neural.checkpoint import load_checkpoint, save_checkpoint
from rdq_lab.neural.losses import (
    floor_teacher,
    kl_divergence,
    kl_from_logits,
    log_softmax,
    smooth_l1,
    smooth_l1_grad,
    softmax,
)
from rdq_lab.neural.mlp import (
    MlpParams,
    backward,
    finite_difference_grad,
    forward,
    forward_with_cache,
    init_params,
)
from rdq_lab.neural.optim import adam_init, adam_step


@pytest.fixture
def net():
    return init_params([6, 5, 3], np.random.default_rng(0), activation="tanh")


def test_init_and_shapes(net):
    assert net.layer_sizes == [6, 5, 3]
    assert net.input_size == 6 and net.output_size == 3
    bound = 1.0 / np.sqrt(6)
    assert np.all(np.abs(net.weights[0]) <= bound)
    x = np.ones(6)
    assert forward(net, x).shape == (3,)
    assert forward(net, np.ones((4, 6))).shape == (4, 3)
    np.testing.assert_allclose(forward(net, np.ones((4, 6)))[2], forward(net, x))


def test_same_seed_same_params():
    a = init_params([4, 3, 2], np.random.default_rng(42))
    b = init_params([4, 3, 2], np.random.default_rng(42))
    np.testing.assert_array_equal(a.flatten(), b.flatten())


def test_bad_input_and_shapes(net):
    with pytest.raises(UsageError):
        forward(net, np.ones(5))
    with pytest.raises(UsageError):
        init_params([3], np.random.default_rng(0))
    with pytest.raises(UsageError):
        MlpParams(weights=[np.ones((2, 3))], biases=[np.ones(2)])
    with pytest.raises(UsageError):
        MlpParams(weights=[np.ones((2, 3))], biases=[np.ones(3)], activation="gelu")


def test_flatten_unflatten(net):
    theta = net.flatten()
    assert theta.size == 6 * 5 + 5 + 5 * 3 + 3
    np.testing.assert_array_equal(net.unflatten(theta).flatten(), theta)


@pytest.mark.parametrize("activation", ["tanh", "relu"])
def test_backward_matches_finite_differences(activation):
    rng = np.random.default_rng(3)
    p = init_params([4, 6, 3], rng, activation=activation)
    x = rng.normal(size=(5, 4))
    w = rng.normal(size=(5, 3))

    def loss(params):
        return float(np.sum(w * forward(params, x)))

    _, cache = forward_with_cache(p, x)
    analytic = backward(p, cache, w)
    numeric = finite_difference_grad(loss, p)
    np.testing.assert_allclose(analytic.flatten(), numeric.flatten(), rtol=1e-4, atol=1e-7)


def test_backward_rejects_non_finite(net):
    _, cache = forward_with_cache(net, np.ones(6))
    with pytest.raises(TrainingError):
        backward(net, cache, np.array([np.nan, 0.0, 0.0]))


# ── Losses ───────────────────────────────────────────────────────────────


def test_softmax_is_stable_and_normalized():
    v = np.array([[1000.0, 1000.0, 0.0], [-5.0, 0.0, 5.0]])
    p = softmax(v)
    np.testing.assert_allclose(p.sum(axis=1), 1.0)
    np.testing.assert_allclose(p[0, :2], 0.5)
    np.testing.assert_allclose(log_softmax(v)[1], np.log(p[1]), atol=1e-12)
    hot = softmax(np.array([1.0, 2.0]), temperature=0.01)
    assert hot[1] > 0.999
    with pytest.raises(UsageError):
        softmax(v, temperature=0.0)


def test_smooth_l1():
    pred = np.array([0.0, 0.5, 3.0, -2.0])
    target = np.zeros(4)
    np.testing.assert_allclose(smooth_l1(pred, target), [0.0, 0.125, 2.5, 1.5])
    np.testing.assert_allclose(smooth_l1_grad(pred, target), [0.0, 0.5, 1.0, -1.0])


def test_kl_properties():
    p = np.array([0.25, 0.25, 0.5])
    assert kl_divergence(p, p) == pytest.approx(0.0, abs=1e-12)
    assert kl_divergence(p, np.array([0.5, 0.25, 0.25])) > 0
    # zero teacher entries are floored, never infinite
    assert np.isfinite(kl_divergence(np.array([0.5, 0.5, 0.0]), np.array([1.0, 0.0, 0.0])))
    # 0 ln 0 = 0
    assert kl_divergence(np.array([1.0, 0.0]), np.array([1.0, 0.0])) == pytest.approx(
        0.0, abs=1e-5
    )
    np.testing.assert_allclose(floor_teacher(np.array([1.0, 0.0])).sum(), 1.0)


@pytest.mark.parametrize("temperature", [1.0, 0.5, 2.0])
def test_kl_gradient_matches_finite_differences(temperature):
    rng = np.random.default_rng(8)
    logits = rng.normal(size=(3, 4))
    teacher = softmax(rng.normal(size=(3, 4)))
    teacher[0, 1] = 0.0
    kl, grad = kl_from_logits(logits, teacher, temperature)
    np.testing.assert_allclose(kl, kl_divergence(softmax(logits, temperature), teacher))
    numeric = np.zeros_like(logits)
    h = 1e-6
    for i in range(logits.shape[0]):
        for j in range(logits.shape[1]):
            plus, minus = logits.copy(), logits.copy()
            plus[i, j] += h
            minus[i, j] -= h
            numeric[i, j] = (
                kl_from_logits(plus, teacher, temperature)[0][i]
                - kl_from_logits(minus, teacher, temperature)[0][i]
            ) / (2 * h)
    np.testing.assert_allclose(grad, numeric, rtol=1e-5, atol=1e-8)


# ── Adam ─────────────────────────────────────────────────────────────────


def test_adam_first_step_moves_by_learning_rate(net):
    grads = net.zeros_like()
    grads.weights[0][0, 0] = 3.0
    grads.biases[1][2] = -0.2
    state = adam_init(net, lr=0.01)
    updated, new_state = adam_step(net, grads, state)
    assert new_state.step == 1 and state.step == 0
    assert updated.weights[0][0, 0] == pytest.approx(net.weights[0][0, 0] - 0.01, rel=1e-6)
    assert updated.biases[1][2] == pytest.approx(net.biases[1][2] + 0.01, rel=1e-6)
    np.testing.assert_array_equal(updated.weights[1], net.weights[1])


def test_adam_rejects_bad_gradients(net):
    state = adam_init(net)
    bad = net.zeros_like()
    bad.weights[0][0, 0] = np.inf
    with pytest.raises(TrainingError):
        adam_step(net, bad, state)
    other = init_params([6, 4, 3], np.random.default_rng(1))
    with pytest.raises(UsageError):
        adam_step(net, other, state)


def test_adam_minimizes_a_quadratic():
    p = MlpParams(weights=[np.array([[3.0]])], biases=[np.array([-2.0])])
    state = adam_init(p, lr=0.1)
    for _ in range(1_000):
        grads = MlpParams(weights=[2 * p.weights[0]], biases=[2 * p.biases[0]])
        p, state = adam_step(p, grads, state)
    assert abs(p.weights[0][0, 0]) < 0.05 and abs(p.biases[0][0]) < 0.05


# ── Checkpoints ──────────────────────────────────────────────────────────


def test_checkpoint_round_trip(tmp_path, net):
    arrays = {f"online_{i}": a for i, a in enumerate(net.arrays())}
    path = save_checkpoint(str(tmp_path / "ckpt"), arrays, {"step": 12, "kind": "rdq"})
    assert path.endswith(".npz")
    loaded, meta = load_checkpoint(path)
    assert meta["step"] == 12 and meta["kind"] == "rdq"
    for name, arr in arrays.items():
        np.testing.assert_array_equal(loaded[name], arr)


def test_checkpoint_errors(tmp_path):
    garbage = tmp_path / "garbage.npz"
    garbage.write_bytes(b"not a zip")
    with pytest.raises(CheckpointError):
        load_checkpoint(str(garbage))
    with pytest.raises(CheckpointError):
        load_checkpoint(str(tmp_path / "missing.npz"))

    no_meta = tmp_path / "plain.npz"
    with open(no_meta, "wb") as f:
        np.savez(f, a=np.zeros(2))
    with pytest.raises(CheckpointError, match="metadata"):
        load_checkpoint(str(no_meta))

    path = save_checkpoint(str(tmp_path / "old.npz"), {}, {"format_version": 0})
    with pytest.raises(CheckpointError, match="format version"):
        load_checkpoint(path)
