"""Action selection and teacher-policy tests."""

import numpy as np
import pytest

from rdq_lab.agent.policy import act, build_teacher_policy, safe_mask, teacher_from_policy
from rdq_lab.errors import UsageError
from rdq_lab.neural.losses import softmax
from rdq_lab.neural.mlp import MlpParams
from rdq_lab.rules.models import Rule, RuleSet


def _fixed_q(values):
    """A one-layer network whose Q-values ignore the input."""
    n = len(values)
    return MlpParams(weights=[np.zeros((2, n))], biases=[np.asarray(values, dtype=np.float64)])


@pytest.fixture
def up_forbidden(qsr, by_name):
    return RuleSet.of([Rule(body=qsr("n_close(p, h)").relations, forbidden_action=by_name["up"])])


# ── act ──────────────────────────────────────────────────────────────────


def test_greedy_action(qsr, fl_actions):
    net = _fixed_q([0.1, 0.9, 0.3, 0.2])
    decision = act(net, np.zeros(2), qsr(), 0.0, RuleSet(), fl_actions, np.random.default_rng(0))
    assert decision.action.name == "down"
    assert not decision.overridden


def test_unsafe_greedy_action_is_overridden(qsr, fl_actions, up_forbidden):
    net = _fixed_q([5.0, 0.0, 0.0, 0.0])
    rng = np.random.default_rng(0)
    s = qsr("n_close(p, h)")
    for _ in range(50):
        decision = act(net, np.zeros(2), s, 0.0, up_forbidden, fl_actions, rng)
        assert decision.action.name != "up"
        assert decision.overridden
    unshielded = act(net, np.zeros(2), s, 0.0, up_forbidden, fl_actions, rng, shielded=False)
    assert unshielded.action.name == "up" and not unshielded.overridden


def test_rule_does_not_fire_when_body_absent(qsr, fl_actions, up_forbidden):
    net = _fixed_q([5.0, 0.0, 0.0, 0.0])
    rng = np.random.default_rng(0)
    decision = act(net, np.zeros(2), qsr("n_far(p, h)"), 0.0, up_forbidden, fl_actions, rng)
    assert decision.action.name == "up"


def test_exploration_respects_rules(qsr, fl_actions, up_forbidden):
    net = _fixed_q([0.0, 0.0, 0.0, 0.0])
    rng = np.random.default_rng(1)
    s = qsr("n_close(p, h)")
    picks = [
        act(net, np.zeros(2), s, 1.0, up_forbidden, fl_actions, rng).action.name
        for _ in range(400)
    ]
    assert "up" not in picks
    assert set(picks) == {"down", "left", "right"}


def test_unshielded_exploration_is_uniform(qsr, fl_actions, up_forbidden):
    net = _fixed_q([0.0, 0.0, 0.0, 0.0])
    rng = np.random.default_rng(2)
    s = qsr("n_close(p, h)")
    picks = [
        act(net, np.zeros(2), s, 1.0, up_forbidden, fl_actions, rng, shielded=False).action.id
        for _ in range(4_000)
    ]
    counts = np.bincount(picks, minlength=4)
    assert np.all(np.abs(counts - 1_000) < 4 * np.sqrt(4_000 * 0.25 * 0.75))


def test_all_actions_forbidden_falls_back(qsr, fl_actions):
    s = qsr("n_close(p, h)")
    rs = RuleSet.of([Rule(body=s.relations, forbidden_action=a) for a in fl_actions])
    net = _fixed_q([0.0, 0.0, 1.0, 0.0])
    decision = act(net, np.zeros(2), s, 0.0, rs, fl_actions, np.random.default_rng(0))
    assert decision.action in fl_actions


def test_act_validates_inputs(qsr, fl_actions):
    net = _fixed_q([0.0] * 4)
    rng = np.random.default_rng(0)
    with pytest.raises(UsageError):
        act(net, np.zeros(2), qsr(), 1.5, RuleSet(), fl_actions, rng)
    with pytest.raises(UsageError):
        act(net, np.zeros(2), qsr(), 0.1, RuleSet(), [], rng)


# ── Teacher policy ───────────────────────────────────────────────────────


def test_teacher_moves_unsafe_mass_to_safe_actions():
    pi = np.array([0.4, 0.3, 0.2, 0.1])
    mask = np.array([False, True, True, True])
    np.testing.assert_allclose(
        teacher_from_policy(pi, mask), [0.0, 0.3 + 0.4 / 3, 0.2 + 0.4 / 3, 0.1 + 0.4 / 3]
    )
    np.testing.assert_allclose(
        teacher_from_policy(pi, mask, "renormalize"), [0.0, 0.7 / 1.8, 0.6 / 1.8, 0.5 / 1.8]
    )


def test_teacher_leaves_degenerate_rows_alone():
    pi = np.array([[0.4, 0.3, 0.2, 0.1], [0.25, 0.25, 0.25, 0.25]])
    mask = np.array([[True] * 4, [False] * 4])
    np.testing.assert_array_equal(teacher_from_policy(pi, mask), pi)
    with pytest.raises(UsageError):
        teacher_from_policy(pi, mask, "other")


def test_renormalize_with_an_all_unsafe_row_stays_finite():
    pi = np.array([[0.4, 0.3, 0.2, 0.1], [0.25, 0.25, 0.25, 0.25]])
    mask = np.array([[False, True, True, True], [False] * 4])
    with np.errstate(all="raise"):
        teacher = teacher_from_policy(pi, mask, "renormalize")
    assert np.all(np.isfinite(teacher))
    np.testing.assert_array_equal(teacher[1], pi[1])
    np.testing.assert_allclose(teacher[0], [0.0, 0.7 / 1.8, 0.6 / 1.8, 0.5 / 1.8])


@pytest.mark.parametrize("normalization", ["safe", "renormalize"])
def test_teacher_invariants_fuzz(normalization):
    rng = np.random.default_rng(4)
    pi = softmax(rng.normal(size=(10_000, 5)) * 3)
    mask = rng.random((10_000, 5)) < 0.6
    teacher = teacher_from_policy(pi, mask, normalization)

    np.testing.assert_allclose(teacher.sum(axis=1), 1.0, atol=1e-12)
    assert np.all(teacher >= 0.0)
    mixed = mask.any(axis=1) & ~mask.all(axis=1)
    assert np.all(teacher[mixed][~mask[mixed]] == 0.0)
    np.testing.assert_array_equal(teacher[~mixed], pi[~mixed])
    if normalization == "safe":
        gained = teacher[mixed] - pi[mixed]
        assert np.all(gained[mask[mixed]] >= -1e-12)
        p_bad = np.where(mask[mixed], 0.0, pi[mixed]).sum(axis=1)
        n_safe = mask[mixed].sum(axis=1)
        expected = np.where(mask[mixed], (p_bad / n_safe)[:, None], 0.0)
        np.testing.assert_allclose(np.where(mask[mixed], gained, 0.0), expected, atol=1e-12)


def test_safe_mask(qsr, fl_actions, up_forbidden):
    states = [qsr("n_close(p, h)"), qsr("e_far(p, g)")]
    mask = safe_mask(states, up_forbidden, fl_actions)
    np.testing.assert_array_equal(mask, [[False, True, True, True], [True, True, True, True]])
    assert safe_mask(states, RuleSet(), fl_actions).all()


def test_build_teacher_policy(qsr, fl_actions, up_forbidden):
    net = _fixed_q([1.0, 0.0, 0.0, 0.0])
    s = qsr("n_close(p, h)")
    teacher = build_teacher_policy(net, np.zeros(2), s, up_forbidden, fl_actions)
    pi = softmax(np.array([1.0, 0.0, 0.0, 0.0]))
    assert teacher[0] == 0.0
    np.testing.assert_allclose(teacher[1:], pi[1:] + pi[0] / 3)
    no_rule = build_teacher_policy(net, np.zeros(2), qsr("e_far(p, g)"), up_forbidden, fl_actions)
    np.testing.assert_allclose(no_rule, pi)
