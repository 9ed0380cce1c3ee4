"""SMO solver, one-vs-rest wrapper, and model persistence."""

import filecmp

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from udkernels.errors import ModelError, NumericError, TrainingError
from udkernels.svm import (
    ClassModel,
    GramMatrix,
    SvmModel,
    build_model,
    compute_gram,
    kkt_violations,
    load_model,
    predict,
    predict_binary,
    save_model,
    train_binary,
    train_ovr,
)
from udkernels.transforms import labeled_from_sexpr


# ---------------------------------------------------------------------------
# compute_gram


def dot_kernel(u, v):
    return float(np.dot(u, v))


VECS = [np.array(v, dtype=float) for v in [(1.0, 0.0), (0.5, 0.5), (0.0, 2.0)]]


def test_compute_gram_values_and_exact_symmetry():
    gram = compute_gram(VECS, dot_kernel, instance_ids=("a", "b", "c"), fingerprint="ff")
    assert gram.values.shape == (3, 3)
    assert gram.instance_ids == ("a", "b", "c")
    assert gram.fingerprint == "ff"
    assert len(gram) == 3
    assert gram.values[0, 1] == 0.5
    assert gram.values[2, 2] == 4.0
    # mirrored from the upper triangle, so symmetric to the bit
    assert np.array_equal(gram.values, gram.values.T)


def test_compute_gram_default_ids_and_thread_independence():
    one = compute_gram(VECS, dot_kernel)
    four = compute_gram(VECS, dot_kernel, threads=4)
    assert one.instance_ids == ("0", "1", "2")
    assert np.array_equal(one.values, four.values)


def test_compute_gram_id_length_mismatch():
    with pytest.raises(ValueError, match="instance_ids"):
        compute_gram(VECS, dot_kernel, instance_ids=("a", "b"))


def test_compute_gram_names_failing_pair():
    def bad(u, v):
        if v is VECS[2]:
            raise ValueError("boom")
        return float(np.dot(u, v))

    with pytest.raises(ValueError, match=r"0 x 2"):
        compute_gram(VECS, bad)


def test_compute_gram_rejects_non_finite():
    def nan_kernel(u, v):
        return float("nan") if (u is VECS[0] and v is VECS[1]) else 1.0

    with pytest.raises(NumericError, match=r"0 x 1"):
        compute_gram(VECS, nan_kernel)


# ---------------------------------------------------------------------------
# binary solver

# Two orthonormal points with opposite labels. The dual collapses to
# max 2a - a^2 under alpha_1 = alpha_2 = a, so a = 1, b = 0, and both
# margins sit exactly on the boundary.


def test_two_point_closed_form():
    gram = np.eye(2)
    y = [1.0, -1.0]
    model = train_binary(gram, y, C=10.0)
    assert model.alpha == pytest.approx([1.0, 1.0], abs=1e-9)
    assert model.bias == pytest.approx(0.0, abs=1e-9)
    f = (model.alpha * np.array(y)) @ gram + model.bias
    assert f == pytest.approx([1.0, -1.0], abs=1e-9)
    assert model.objective_history[-1] == pytest.approx(1.0, abs=1e-9)
    assert list(model.support) == [0, 1]
    assert kkt_violations(gram, y, model, C=10.0) == []


def test_two_point_box_clamp():
    # same problem with C below the unconstrained optimum: both alphas
    # stop at the box and the bias falls back to the feasibility midpoint
    gram = np.eye(2)
    y = [1.0, -1.0]
    model = train_binary(gram, y, C=0.5)
    assert model.alpha == pytest.approx([0.5, 0.5], abs=1e-9)
    assert model.bias == pytest.approx(0.0, abs=1e-9)
    assert kkt_violations(gram, y, model, C=0.5) == []


def test_flat_direction_duplicate_points():
    # identical rows make eta zero; the step must still move to the
    # better box endpoint instead of dividing by zero
    gram = np.ones((2, 2))
    y = [1.0, -1.0]
    model = train_binary(gram, y, C=1.0)
    assert model.alpha == pytest.approx([1.0, 1.0], abs=1e-9)
    assert kkt_violations(gram, y, model, C=1.0) == []


def test_per_sample_box():
    gram = np.ones((2, 2))
    y = [1.0, -1.0]
    model = train_binary(gram, y, C=1.0, sample_C=[1.0, 0.3])
    # the equality constraint keeps the alphas tied, so the smaller
    # box binds both
    assert model.alpha == pytest.approx([0.3, 0.3], abs=1e-9)


def block_problem():
    """Six separable points in two feature-space clusters."""
    points = np.array(
        [
            [2.0, 0.0],
            [2.2, 0.1],
            [1.9, -0.1],
            [0.0, 2.0],
            [0.1, 2.1],
            [-0.1, 1.9],
        ]
    )
    gram = points @ points.T
    y = np.array([1.0, 1.0, 1.0, -1.0, -1.0, -1.0])
    return gram, y


def test_block_separable_problem():
    gram, y = block_problem()
    model = train_binary(gram, y, C=1.0)
    f = (model.alpha * y) @ gram + model.bias
    assert np.all(np.sign(f) == y)
    assert kkt_violations(gram, y, model, C=1.0) == []
    assert float(np.dot(model.alpha, y)) == pytest.approx(0.0, abs=1e-9)


def test_objective_history_monotone():
    gram, y = block_problem()
    model = train_binary(gram, y, C=1.0)
    hist = model.objective_history
    assert len(hist) >= 1
    for earlier, later in zip(hist, hist[1:]):
        assert later >= earlier - 1e-9


def test_training_is_deterministic():
    gram, y = block_problem()
    first = train_binary(gram, y, C=1.0)
    second = train_binary(gram, y, C=1.0)
    assert np.array_equal(first.alpha, second.alpha)
    assert first.bias == second.bias
    assert first.objective_history == second.objective_history


def test_label_and_shape_validation():
    with pytest.raises(TrainingError, match="both classes"):
        train_binary(np.eye(2), [1.0, 1.0])
    with pytest.raises(TrainingError, match="shape"):
        train_binary(np.eye(3), [1.0, -1.0])
    with pytest.raises(NumericError, match="non-finite"):
        train_binary(np.array([[1.0, np.nan], [np.nan, 1.0]]), [1.0, -1.0])


@st.composite
def psd_problems(draw):
    n = draw(st.integers(min_value=3, max_value=6))
    entries = st.floats(min_value=-2.0, max_value=2.0)
    a = np.array([[draw(entries) for _ in range(n)] for _ in range(n)])
    gram = a @ a.T + 1e-6 * np.eye(n)
    n_pos = draw(st.integers(min_value=1, max_value=n - 1))
    y = np.array([1.0] * n_pos + [-1.0] * (n - n_pos))
    return gram, y


@settings(max_examples=40, deadline=None)
@given(problem=psd_problems())
def test_solver_invariants_on_random_problems(problem):
    gram, y = problem
    model = train_binary(gram, y, C=1.0)
    assert kkt_violations(gram, y, model, C=1.0) == []
    assert float(np.dot(model.alpha, y)) == pytest.approx(0.0, abs=1e-8)
    assert np.all(model.alpha >= -1e-12)
    assert np.all(model.alpha <= 1.0 + 1e-12)
    hist = model.objective_history
    for earlier, later in zip(hist, hist[1:]):
        assert later >= earlier - 1e-8


# ---------------------------------------------------------------------------
# one-vs-rest and persisted models


def three_class_problem():
    points = np.array(
        [
            [2.0, 0.0, 0.0],
            [2.1, 0.1, 0.0],
            [0.0, 2.0, 0.1],
            [0.1, 2.2, 0.0],
            [0.0, 0.1, 2.0],
            [0.1, 0.0, 2.1],
        ]
    )
    labels = ["cause", "cause", "message", "message", "content", "content"]
    return points @ points.T, labels


def pair_payload(tag):
    a = labeled_from_sexpr(f"(root ({tag}))")
    b = labeled_from_sexpr(f"(root ({tag}) (extra))")
    return (a, b)


def test_train_ovr_classes_and_errors():
    gram, labels = three_class_problem()
    ovr = train_ovr(gram, labels, C=1.0)
    assert ovr.classes == ("cause", "content", "message")
    assert set(ovr.binaries) == set(ovr.classes)
    with pytest.raises(TrainingError, match="2 classes"):
        train_ovr(gram, ["only"] * 6)


def test_class_weights_scale_the_box():
    gram, labels = three_class_problem()
    ovr = train_ovr(gram, labels, C=1.0, class_weights={"cause": 0.5})
    for binary in ovr.binaries.values():
        assert np.all(binary.alpha <= 1.0 + 1e-12)


def test_build_model_pools_supports():
    gram, labels = three_class_problem()
    payloads = [pair_payload(f"w{i}") for i in range(len(labels))]
    ovr = train_ovr(gram, labels, C=1.0)
    model = build_model("pi", {"task": "pi"}, ovr, labels, payloads, {"C": 1.0})
    assert [cls.label for cls in model.classes] == ["cause", "content", "message"]
    assert len(model.supports) <= len(labels)
    # every pooled payload is one of the training payloads, stored once
    assert all(any(p is q for q in payloads) for p in model.supports)
    assert model.training_meta["n_train"] == 6
    assert model.training_meta["class_counts"] == {"cause": 2, "content": 2, "message": 2}
    assert model.training_meta["C"] == 1.0


def pool_rows(model, payloads, gram):
    """Kernel rows of each training instance against the support pool."""
    original = [next(i for i, p in enumerate(payloads) if p is q) for q in model.supports]
    return [gram[t, original] for t in range(len(payloads))]


def test_predict_recovers_training_labels():
    gram, labels = three_class_problem()
    payloads = [pair_payload(f"w{i}") for i in range(len(labels))]
    ovr = train_ovr(gram, labels, C=1.0)
    model = build_model("pi", {"task": "pi"}, ovr, labels, payloads)
    for row, expected in zip(pool_rows(model, payloads, gram), labels):
        got, decisions = predict(model, row)
        assert got == expected
        assert set(decisions) == {"cause", "content", "message"}


def test_predict_row_length_check():
    gram, labels = three_class_problem()
    payloads = [pair_payload(f"w{i}") for i in range(len(labels))]
    model = build_model("pi", {"task": "pi"}, train_ovr(gram, labels), labels, payloads)
    with pytest.raises(ValueError, match="supports"):
        predict(model, np.zeros(len(model.supports) + 1))


def test_predict_tie_goes_to_smallest_label():
    tied = SvmModel(
        task="pi",
        kernel_spec={},
        classes=[
            ClassModel("beta", 0.5, np.zeros(0), np.zeros(0, dtype=int)),
            ClassModel("alpha", 0.5, np.zeros(0), np.zeros(0, dtype=int)),
        ],
        supports=[],
        label_map={},
        training_meta={},
    )
    tied.classes.sort(key=lambda c: c.label)
    label, decisions = predict(tied, np.zeros(0))
    assert decisions == {"alpha": 0.5, "beta": 0.5}
    assert label == "alpha"


def test_predict_binary_reports_positive_decision():
    gram = np.eye(2)
    labels = ["no", "yes"]
    payloads = [pair_payload("p"), pair_payload("q")]
    model = build_model("pi", {"task": "pi"}, train_ovr(gram, labels), labels, payloads)
    row = pool_rows(model, payloads, gram)[1]
    label, decision = predict_binary(model, row)
    assert label == "yes"
    _, decisions = predict(model, row)
    assert decision == decisions["yes"]


def test_model_save_load_roundtrip(tmp_path):
    gram, labels = three_class_problem()
    payloads = [pair_payload(f"w{i}") for i in range(len(labels))]
    ovr = train_ovr(gram, labels, C=1.0)
    model = build_model("pi", {"task": "pi", "kind": "sm"}, ovr, labels, payloads)

    path = tmp_path / "model.json"
    save_model(model, path)
    loaded = load_model(path)
    assert loaded.task == "pi"
    assert loaded.kernel_spec == {"task": "pi", "kind": "sm"}
    assert [cls.label for cls in loaded.classes] == [cls.label for cls in model.classes]
    for orig, back in zip(model.classes, loaded.classes):
        assert back.bias == orig.bias
        assert np.array_equal(back.coeffs, orig.coeffs)

    # the reloaded model predicts identically
    for row in pool_rows(model, payloads, gram):
        assert predict(loaded, row) == predict(model, row)

    # and re-saving reproduces the file byte for byte
    again = tmp_path / "again.json"
    save_model(loaded, again)
    assert filecmp.cmp(path, again, shallow=False)


def test_model_save_is_deterministic(tmp_path):
    gram, labels = three_class_problem()
    payloads = [pair_payload(f"w{i}") for i in range(len(labels))]
    for name in ("one.json", "two.json"):
        ovr = train_ovr(gram, labels, C=1.0)
        model = build_model("pi", {"task": "pi"}, ovr, labels, payloads)
        save_model(model, tmp_path / name)
    assert filecmp.cmp(tmp_path / "one.json", tmp_path / "two.json", shallow=False)


def test_load_model_rejects_other_versions(tmp_path):
    path = tmp_path / "model.json"
    path.write_text('{"version": "999", "task": "pi", "classes": []}')
    with pytest.raises(ModelError, match="version"):
        load_model(path)


def test_load_model_rejects_garbage(tmp_path):
    path = tmp_path / "model.json"
    path.write_text("{not json")
    with pytest.raises(ModelError, match="cannot read"):
        load_model(path)
