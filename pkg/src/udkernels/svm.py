"""Kernel SVM training on precomputed Gram matrices.

The binary solver runs deterministic pairwise coordinate updates on the
soft-margin dual: scan instances in index order, pair each violator
with the partner maximizing the error gap, fall back to an ordered scan
when that pair makes no progress. No randomness anywhere, so training
is reproducible bit for bit. Multiclass is one-vs-rest with argmax and
lexicographic tie-breaking.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .combine import REKernelInput
from .errors import ModelError, NumericError, TrainingError
from .transforms import labeled_from_sexpr, labeled_to_sexpr

MODEL_VERSION = "1"


@dataclass
class GramMatrix:
    values: np.ndarray
    instance_ids: tuple
    fingerprint: str = ""

    def __len__(self) -> int:
        return len(self.instance_ids)


def compute_gram(items, kernel, instance_ids=None, fingerprint: str = "", threads: int = 1) -> GramMatrix:
    """Symmetric Gram matrix over items under a kernel callable.

    Cells of the upper triangle are independent evaluations, so the
    result is identical for any thread count. Kernel failures are
    re-raised with the offending instance pair named.
    """
    n = len(items)
    if instance_ids is None:
        instance_ids = tuple(str(i) for i in range(n))
    instance_ids = tuple(instance_ids)
    if len(instance_ids) != n:
        raise ValueError("instance_ids length does not match items")
    values = np.zeros((n, n))

    def fill(i: int):
        for j in range(i, n):
            try:
                values[i, j] = kernel(items[i], items[j])
            except Exception as exc:
                raise type(exc)(
                    f"kernel failed on pair {instance_ids[i]} x {instance_ids[j]}: {exc}"
                ) from exc

    rows = range(n)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill, rows))
    else:
        for i in rows:
            fill(i)
    lower = np.tril_indices(n, -1)
    values[lower] = values.T[lower]
    if not np.all(np.isfinite(values)):
        i, j = np.argwhere(~np.isfinite(values))[0]
        raise NumericError(
            f"non-finite Gram entry at {instance_ids[i]} x {instance_ids[j]}"
        )
    return GramMatrix(values=values, instance_ids=instance_ids, fingerprint=fingerprint)


@dataclass
class BinaryModel:
    alpha: np.ndarray
    bias: float
    objective_history: list = field(default_factory=list)

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.alpha > 1e-12)


def _dual_objective(gram: np.ndarray, y: np.ndarray, alpha: np.ndarray) -> float:
    q = alpha * y
    return float(alpha.sum() - 0.5 * q @ gram @ q)


def train_binary(
    gram: np.ndarray,
    y,
    C: float = 1.0,
    tol: float = 1e-3,
    max_passes: int = 10,
    max_sweeps: int = 1000,
    sample_C=None,
) -> BinaryModel:
    """Solve the soft-margin dual for labels in {-1, +1}.

    Sweeps the training set until max_passes consecutive sweeps produce
    no update, meaning every instance satisfies its KKT condition within
    tol. The bias is then recomputed from free support vectors, or from
    the midpoint of the feasible interval when none exist.
    """
    gram = np.asarray(gram, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = len(y)
    if gram.shape != (n, n):
        raise TrainingError(f"gram shape {gram.shape} does not match {n} labels")
    if not np.all(np.isfinite(gram)):
        raise NumericError("gram matrix contains non-finite entries")
    if set(np.unique(y)) != {-1.0, 1.0}:
        raise TrainingError("training labels must contain both classes as -1/+1")
    box = np.full(n, float(C)) if sample_C is None else np.asarray(sample_C, dtype=np.float64)

    alpha = np.zeros(n)
    b = 0.0
    g = np.zeros(n)  # decision values without bias
    history: list = []

    def take_step(i: int, j: int) -> bool:
        nonlocal b, g
        if i == j:
            return False
        ai, aj = alpha[i], alpha[j]
        yi, yj = y[i], y[j]
        Ei = g[i] + b - yi
        Ej = g[j] + b - yj
        s = yi * yj
        if s < 0:
            L, H = max(0.0, aj - ai), min(box[j], box[i] + aj - ai)
        else:
            L, H = max(0.0, ai + aj - box[i]), min(box[j], ai + aj)
        if H - L < 1e-12:
            return False
        eta = gram[i, i] + gram[j, j] - 2.0 * gram[i, j]
        if eta > 1e-12:
            aj_new = aj + yj * (Ei - Ej) / eta
            aj_new = min(H, max(L, aj_new))
        else:
            # flat direction: move to whichever box end improves the dual
            fi = yi * (Ei + b) - ai * gram[i, i] - s * aj * gram[i, j]
            fj = yj * (Ej + b) - s * ai * gram[i, j] - aj * gram[j, j]
            L1 = ai + s * (aj - L)
            H1 = ai + s * (aj - H)
            obj_L = (
                L1 + L - 0.5 * L1 * L1 * gram[i, i] - 0.5 * L * L * gram[j, j]
                - s * L * L1 * gram[i, j] - L1 * fi - L * fj
            )
            obj_H = (
                H1 + H - 0.5 * H1 * H1 * gram[i, i] - 0.5 * H * H * gram[j, j]
                - s * H * H1 * gram[i, j] - H1 * fi - H * fj
            )
            if obj_L > obj_H + 1e-12:
                aj_new = L
            elif obj_H > obj_L + 1e-12:
                aj_new = H
            else:
                return False
        if abs(aj_new - aj) < 1e-12 * (aj_new + aj + 1e-12):
            return False
        ai_new = ai + s * (aj - aj_new)
        ai_new = min(box[i], max(0.0, ai_new))
        di, dj = ai_new - ai, aj_new - aj
        b1 = b - Ei - yi * di * gram[i, i] - yj * dj * gram[i, j]
        b2 = b - Ej - yi * di * gram[i, j] - yj * dj * gram[j, j]
        if 0.0 < ai_new < box[i]:
            b = b1
        elif 0.0 < aj_new < box[j]:
            b = b2
        else:
            b = (b1 + b2) / 2.0
        g += yi * di * gram[i] + yj * dj * gram[j]
        alpha[i], alpha[j] = ai_new, aj_new
        return True

    def examine(i: int) -> bool:
        Ei = g[i] + b - y[i]
        r = Ei * y[i]
        if not ((r < -tol and alpha[i] < box[i]) or (r > tol and alpha[i] > 0.0)):
            return False
        errors = g + b - y
        free = np.flatnonzero((alpha > 0.0) & (alpha < box))
        if free.size:
            j = int(free[np.argmax(np.abs(Ei - errors[free]))])
            if take_step(i, j):
                return True
            for j in free:
                if take_step(i, int(j)):
                    return True
        for j in range(n):
            if take_step(i, j):
                return True
        return False

    clean = 0
    sweeps = 0
    while clean < max_passes and sweeps < max_sweeps:
        changed = 0
        for i in range(n):
            if examine(i):
                changed += 1
        history.append(_dual_objective(gram, y, alpha))
        clean = clean + 1 if changed == 0 else 0
        sweeps += 1

    # final bias from free support vectors, else feasibility midpoint
    free = np.flatnonzero((alpha > 1e-12) & (alpha < box - 1e-12))
    if free.size:
        b = float(np.mean(y[free] - g[free]))
    else:
        lower = [
            y[i] - g[i]
            for i in range(n)
            if (alpha[i] <= 1e-12 and y[i] > 0) or (alpha[i] >= box[i] - 1e-12 and y[i] < 0)
        ]
        upper = [
            y[i] - g[i]
            for i in range(n)
            if (alpha[i] <= 1e-12 and y[i] < 0) or (alpha[i] >= box[i] - 1e-12 and y[i] > 0)
        ]
        if lower and upper:
            b = (max(lower) + min(upper)) / 2.0
        elif lower:
            b = max(lower)
        elif upper:
            b = min(upper)
    return BinaryModel(alpha=alpha, bias=float(b), objective_history=history)


def kkt_violations(gram: np.ndarray, y, model: BinaryModel, C: float = 1.0, tol: float = 1e-3):
    """Instances whose KKT condition fails at tol, for diagnostics."""
    y = np.asarray(y, dtype=np.float64)
    f = (model.alpha * y) @ gram + model.bias
    out = []
    for i in range(len(y)):
        margin = y[i] * f[i]
        a = model.alpha[i]
        if a <= 1e-12 and margin < 1.0 - tol:
            out.append(i)
        elif a >= C - 1e-12 and margin > 1.0 + tol:
            out.append(i)
        elif 1e-12 < a < C - 1e-12 and abs(margin - 1.0) > tol:
            out.append(i)
    return out


@dataclass
class OvrModel:
    classes: tuple
    binaries: dict


def train_ovr(
    gram: np.ndarray,
    labels,
    C: float = 1.0,
    tol: float = 1e-3,
    max_passes: int = 10,
    class_weights: dict | None = None,
) -> OvrModel:
    """One binary model per distinct label, positives against the rest."""
    labels = list(labels)
    classes = tuple(sorted(set(labels)))
    if len(classes) < 2:
        raise TrainingError(f"need at least 2 classes, got {classes}")
    sample_C = None
    if class_weights:
        sample_C = np.array([C * class_weights.get(lab, 1.0) for lab in labels])
    binaries = {}
    for cls in classes:
        y = np.array([1.0 if lab == cls else -1.0 for lab in labels])
        binaries[cls] = train_binary(
            gram, y, C=C, tol=tol, max_passes=max_passes, sample_C=sample_C
        )
    return OvrModel(classes=classes, binaries=binaries)


# ---------------------------------------------------------------------------
# Persisted models: weights plus the serialized support instances needed
# to evaluate kernels against new data.


@dataclass
class ClassModel:
    label: str
    bias: float
    coeffs: np.ndarray  # alpha_i * y_i over this class's supports
    support_idx: np.ndarray  # indices into SvmModel.supports


@dataclass
class SvmModel:
    task: str  # "pi" | "re"
    kernel_spec: dict
    classes: list
    supports: list  # deduplicated payload pool
    label_map: dict
    training_meta: dict
    version: str = MODEL_VERSION


def _payload_to_dict(task: str, payload) -> dict:
    if task == "pi":
        a, b = payload
        return {"a": labeled_to_sexpr(a), "b": labeled_to_sexpr(b)}
    if task == "re":
        return {
            "lct": labeled_to_sexpr(payload.lct),
            "pet": labeled_to_sexpr(payload.pet) if payload.pet is not None else None,
            "vec": [float(x) for x in payload.vec] if payload.vec is not None else None,
        }
    raise ModelError(f"unknown task {task!r}")


def _payload_from_dict(task: str, data: dict):
    if task == "pi":
        return (labeled_from_sexpr(data["a"]), labeled_from_sexpr(data["b"]))
    if task == "re":
        return REKernelInput(
            lct=labeled_from_sexpr(data["lct"]),
            pet=labeled_from_sexpr(data["pet"]) if data.get("pet") else None,
            vec=np.array(data["vec"], dtype=np.float64) if data.get("vec") is not None else None,
        )
    raise ModelError(f"unknown task {task!r}")


def build_model(
    task: str,
    kernel_spec: dict,
    ovr: OvrModel,
    labels,
    payloads,
    training_meta: dict | None = None,
) -> SvmModel:
    """Package a trained one-vs-rest model with its support payloads."""
    labels = list(labels)
    pool: list = []
    pool_index: dict = {}
    classes = []
    for cls in ovr.classes:
        binary = ovr.binaries[cls]
        sup = binary.support
        y = np.array([1.0 if lab == cls else -1.0 for lab in labels])
        idx = []
        for i in sup:
            key = i
            if key not in pool_index:
                pool_index[key] = len(pool)
                pool.append(payloads[i])
            idx.append(pool_index[key])
        classes.append(
            ClassModel(
                label=cls,
                bias=binary.bias,
                coeffs=(binary.alpha[sup] * y[sup]),
                support_idx=np.array(idx, dtype=int),
            )
        )
    meta = dict(training_meta or {})
    meta.setdefault("n_train", len(labels))
    counts: dict = {}
    for lab in labels:
        counts[lab] = counts.get(lab, 0) + 1
    meta.setdefault("class_counts", {k: counts[k] for k in sorted(counts)})
    return SvmModel(
        task=task,
        kernel_spec=kernel_spec,
        classes=classes,
        supports=pool,
        label_map={cls: i for i, cls in enumerate(ovr.classes)},
        training_meta=meta,
    )


def predict(model: SvmModel, kernel_row) -> tuple:
    """Classify from a row of kernel values against model.supports.

    Returns (label, decisions). Argmax over classes; exact ties go to
    the lexicographically smallest label.
    """
    kernel_row = np.asarray(kernel_row, dtype=np.float64)
    if kernel_row.shape != (len(model.supports),):
        raise ValueError(
            f"kernel row has {kernel_row.shape} values, model has {len(model.supports)} supports"
        )
    decisions = {}
    best_label = None
    best_value = None
    for cls in model.classes:  # classes are stored sorted by label
        value = float(cls.coeffs @ kernel_row[cls.support_idx] + cls.bias)
        decisions[cls.label] = value
        if best_value is None or value > best_value:
            best_label, best_value = cls.label, value
    return best_label, decisions


def predict_binary(model: SvmModel, kernel_row) -> tuple:
    """Decision value of the positive class for two-way tasks."""
    label, decisions = predict(model, kernel_row)
    positive = model.classes[-1].label if len(model.classes) > 1 else model.classes[0].label
    return label, decisions[positive]


def save_model(model: SvmModel, path):
    data = {
        "version": model.version,
        "task": model.task,
        "kernel_spec": model.kernel_spec,
        "classes": [
            {
                "label": cls.label,
                "bias": cls.bias,
                "coeffs": [float(c) for c in cls.coeffs],
                "support": [
                    _payload_to_dict(model.task, model.supports[i]) for i in cls.support_idx
                ],
            }
            for cls in model.classes
        ],
        "label_map": model.label_map,
        "training_meta": model.training_meta,
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(data, handle, sort_keys=True, separators=(",", ": "), indent=1)
        handle.write("\n")


def load_model(path) -> SvmModel:
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelError(f"cannot read model file {path}: {exc}") from None
    if data.get("version") != MODEL_VERSION:
        raise ModelError(
            f"unsupported model version {data.get('version')!r}, expected {MODEL_VERSION}"
        )
    task = data.get("task")
    pool: list = []
    pool_index: dict = {}
    classes = []
    for cls in data.get("classes", []):
        idx = []
        for payload_dict in cls["support"]:
            key = json.dumps(payload_dict, sort_keys=True)
            if key not in pool_index:
                pool_index[key] = len(pool)
                pool.append(_payload_from_dict(task, payload_dict))
            idx.append(pool_index[key])
        classes.append(
            ClassModel(
                label=cls["label"],
                bias=float(cls["bias"]),
                coeffs=np.array(cls["coeffs"], dtype=np.float64),
                support_idx=np.array(idx, dtype=int),
            )
        )
    classes.sort(key=lambda c: c.label)
    return SvmModel(
        task=task,
        kernel_spec=data.get("kernel_spec", {}),
        classes=classes,
        supports=pool,
        label_map=data.get("label_map", {}),
        training_meta=data.get("training_meta", {}),
        version=data["version"],
    )
