"""Tree kernels as decayed counts of shared tree fragments.

Three fragment spaces are supported. SST counts production-closed
fragments: a node either keeps all of its children or stops. PTK counts
any order-preserving fragment, scoring child subsequences with a
gap-weighted subsequence recursion. SPTK is PTK with the exact-label
gate replaced by a node similarity score, so lexically different but
related nodes can still match.

brute_force_kernel enumerates fragments explicitly and exists only to
check tree_kernel on tiny trees; the two share no code.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericError
from .transforms import LabeledTree, _escape

KINDS = ("SST", "PTK", "SPTK")

# per-kind invocation counts, used to assert which kernels a pipeline ran
call_counts: Counter = Counter()


def reset_call_counts():
    call_counts.clear()


@dataclass
class TreeKernelParams:
    kind: str
    lam: float = 0.4  # vertical decay
    mu: float = 0.4  # horizontal decay, PTK and SPTK only
    sigma: Callable | None = None  # node similarity, SPTK only
    sigma_cfg: object = None  # serializable description of sigma
    normalize: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown kernel kind {self.kind!r}, expected one of {KINDS}")
        if not 0.0 < self.lam <= 1.0:
            raise ConfigError(f"lambda must be in (0, 1], got {self.lam}")
        if not 0.0 < self.mu <= 1.0:
            raise ConfigError(f"mu must be in (0, 1], got {self.mu}")
        if self.kind == "SPTK" and self.sigma is None:
            raise ConfigError("SPTK requires a node similarity function")


@dataclass
class DeltaMatrix:
    """Per node-pair fragment sums, with node labels for inspection."""

    row_labels: tuple
    col_labels: tuple
    values: np.ndarray

    def to_tsv(self) -> str:
        lines = ["\t" + "\t".join(self.col_labels)]
        for label, row in zip(self.row_labels, self.values):
            lines.append(label + "\t" + "\t".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"


class _Indexed:
    """Postorder view of a tree; children come before their parents."""

    __slots__ = ("nodes", "children", "labels", "prods", "atomic")

    def __init__(self, tree: LabeledTree):
        order = []
        stack = [(tree, False)]
        while stack:
            node, done = stack.pop()
            if done:
                order.append(node)
                continue
            stack.append((node, True))
            for child in reversed(node.children):
                stack.append((child, False))
        index = {id(n): i for i, n in enumerate(order)}
        self.nodes = order
        self.children = [tuple(index[id(c)] for c in n.children) for n in order]
        self.labels = [n.label for n in order]
        self.prods = [(n.label, tuple(c.label for c in n.children)) for n in order]
        self.atomic = [all(not c.children for c in n.children) for n in order]


def _sst_matrix(ix1: _Indexed, ix2: _Indexed, lam: float) -> np.ndarray:
    delta = np.zeros((len(ix1.nodes), len(ix2.nodes)))
    for i, prod in enumerate(ix1.prods):
        for j in range(len(ix2.nodes)):
            if prod != ix2.prods[j]:
                continue
            # a node whose production bottoms out in leaves matches as a
            # single unit, the production itself admits no sub-choices
            if ix1.atomic[i] or ix2.atomic[j]:
                delta[i, j] = lam
                continue
            val = lam
            for ci, cj in zip(ix1.children[i], ix2.children[j]):
                val *= 1.0 + delta[ci, cj]
            delta[i, j] = val
    return delta


def _subseq_sum(delta: np.ndarray, ch1: tuple, ch2: tuple, lam: float) -> float:
    """Sum over equal-length ordered child subsequence pairs of
    lam^(span1 + span2) times the product of child deltas.

    span counts positions from the first to the last picked child
    inclusive, so gaps inside a subsequence decay the term.
    """
    a, b = len(ch1), len(ch2)
    lam2 = lam * lam
    # T[x, y]: current-length terms whose subsequences end exactly at
    # child x of the first node and child y of the second (1-based).
    T = np.zeros((a + 1, b + 1))
    for x in range(1, a + 1):
        row = delta[ch1[x - 1]]
        for y in range(1, b + 1):
            T[x, y] = lam2 * row[ch2[y - 1]]
    total = T.sum()
    for _ in range(2, min(a, b) + 1):
        # R: lam-discounted 2d prefix sums of T, so extending both
        # subsequences by one picked child costs lam^(gap+1) per side
        R = np.zeros((a + 1, b + 1))
        for x in range(1, a + 1):
            for y in range(1, b + 1):
                R[x, y] = (
                    T[x, y] + lam * R[x - 1, y] + lam * R[x, y - 1] - lam2 * R[x - 1, y - 1]
                )
        T = np.zeros((a + 1, b + 1))
        level = 0.0
        for x in range(2, a + 1):
            row = delta[ch1[x - 1]]
            for y in range(2, b + 1):
                d = row[ch2[y - 1]]
                if d != 0.0:
                    v = d * lam2 * R[x - 1, y - 1]
                    T[x, y] = v
                    level += v
        if level == 0.0:
            break
        total += level
    return float(total)


def _pt_matrix(
    ix1: _Indexed, ix2: _Indexed, lam: float, mu: float, sigma: Callable | None
) -> np.ndarray:
    delta = np.zeros((len(ix1.nodes), len(ix2.nodes)))
    lam2 = lam * lam
    for i in range(len(ix1.nodes)):
        for j in range(len(ix2.nodes)):
            if sigma is None:
                gate = 1.0 if ix1.labels[i] == ix2.labels[j] else 0.0
            else:
                gate = float(sigma(ix1.nodes[i], ix2.nodes[j]))
            if gate == 0.0:
                continue
            ch1, ch2 = ix1.children[i], ix2.children[j]
            total = lam2
            if ch1 and ch2:
                total += _subseq_sum(delta, ch1, ch2, lam)
            delta[i, j] = mu * gate * total
    return delta


def _matrix(t1: LabeledTree, t2: LabeledTree, params: TreeKernelParams) -> np.ndarray:
    ix1, ix2 = _Indexed(t1), _Indexed(t2)
    if params.kind == "SST":
        return _sst_matrix(ix1, ix2, params.lam)
    sigma = params.sigma if params.kind == "SPTK" else None
    return _pt_matrix(ix1, ix2, params.lam, params.mu, sigma)


def _raw_kernel(t1: LabeledTree, t2: LabeledTree, params: TreeKernelParams) -> float:
    return float(_matrix(t1, t2, params).sum())


def delta_matrix(t1: LabeledTree, t2: LabeledTree, params: TreeKernelParams) -> DeltaMatrix:
    ix1, ix2 = _Indexed(t1), _Indexed(t2)
    if params.kind == "SST":
        values = _sst_matrix(ix1, ix2, params.lam)
    else:
        sigma = params.sigma if params.kind == "SPTK" else None
        values = _pt_matrix(ix1, ix2, params.lam, params.mu, sigma)
    return DeltaMatrix(tuple(ix1.labels), tuple(ix2.labels), values)


def tree_kernel(t1: LabeledTree, t2: LabeledTree, params: TreeKernelParams) -> float:
    """Kernel value between two trees, normalized unless disabled.

    Normalization divides by the geometric mean of the self kernels and
    maps a degenerate zero self kernel to 0.
    """
    call_counts[params.kind] += 1
    raw = _raw_kernel(t1, t2, params)
    if not math.isfinite(raw):
        raise NumericError(
            f"{params.kind} kernel overflowed; use smaller lambda/mu or normalization"
        )
    if not params.normalize:
        return raw
    if t1 is t2:
        return 1.0 if raw > 0.0 else 0.0
    s1 = _raw_kernel(t1, t1, params)
    s2 = _raw_kernel(t2, t2, params)
    if not (math.isfinite(s1) and math.isfinite(s2)):
        raise NumericError(
            f"{params.kind} self kernel overflowed; use smaller lambda/mu"
        )
    if s1 <= 0.0 or s2 <= 0.0:
        return 0.0
    return raw / math.sqrt(s1 * s2)


def poly_kernel(u, v, degree: int = 2, coef0: float = 1.0) -> float:
    """(u . v + coef0) ** degree on plain feature vectors."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"vector shapes differ: {u.shape} vs {v.shape}")
    if degree < 1 or int(degree) != degree:
        raise ConfigError(f"polynomial degree must be a positive integer, got {degree}")
    return float((float(np.dot(u, v)) + coef0) ** int(degree))


# ---------------------------------------------------------------------------
# Brute-force oracle: explicit fragment enumeration on tiny trees.

_ORACLE_MAX_NODES = 6


def _sst_fragments(node: LabeledTree) -> dict:
    """Serialized production-closed fragments rooted at node, mapped to
    the number of expanded nodes (the lambda exponent).

    A stopped child renders as a bare label; an expanded node renders
    parenthesized. Nodes whose children are all leaves expand as one
    indivisible unit.
    """
    if not node.children:
        return {f"({_escape(node.label)})": 1}
    if all(not c.children for c in node.children):
        inner = " ".join(_escape(c.label) for c in node.children)
        return {f"({_escape(node.label)} {inner})": 1}
    options = []
    for child in node.children:
        opts = [(_escape(child.label), 0)]
        opts.extend(_sst_fragments(child).items())
        options.append(opts)
    out = {}
    for combo in itertools.product(*options):
        ser = f"({_escape(node.label)} " + " ".join(s for s, _ in combo) + ")"
        out[ser] = 1 + sum(w for _, w in combo)
    return out


def _pt_occurrences(node: LabeledTree) -> list:
    """Every embedding of a partial fragment rooted at node, as
    (serialization, span exponent, node count) triples.

    The span exponent collects, per fragment node, the child-index span
    it picks (1 for fragment leaves), which is this side's lambda
    exponent for the embedding.
    """
    out = [(_escape(node.label), 1, 1)]
    k = len(node.children)
    for r in range(1, k + 1):
        for picks in itertools.combinations(range(k), r):
            span = picks[-1] - picks[0] + 1
            child_occs = [_pt_occurrences(node.children[j]) for j in picks]
            for combo in itertools.product(*child_occs):
                ser = f"({_escape(node.label)} " + " ".join(c[0] for c in combo) + ")"
                out.append(
                    (ser, span + sum(c[1] for c in combo), 1 + sum(c[2] for c in combo))
                )
    return out


def _pt_table(node: LabeledTree, lam: float) -> dict:
    table: dict = {}
    for ser, span_exp, n_nodes in _pt_occurrences(node):
        entry = table.setdefault(ser, [0.0, n_nodes])
        entry[0] += lam**span_exp
    return table


def brute_force_kernel(
    t1: LabeledTree, t2: LabeledTree, kind: str, lam: float = 1.0, mu: float = 1.0
) -> float:
    """Fragment-enumeration kernel for checking tree_kernel, unnormalized.

    Only SST and PTK are supported and only on trees with at most 6
    nodes; anything larger raises ValueError.
    """
    for t in (t1, t2):
        if t.size() > _ORACLE_MAX_NODES:
            raise ValueError(
                f"brute-force oracle limited to {_ORACLE_MAX_NODES} nodes, got {t.size()}"
            )
    if kind == "SST":
        total = 0.0
        tables2 = [(_sst_fragments(n2)) for n2 in t2.iter_nodes()]
        for n1 in t1.iter_nodes():
            f1 = _sst_fragments(n1)
            for f2 in tables2:
                for ser, wraps in f1.items():
                    other = f2.get(ser)
                    if other is not None:
                        assert other == wraps, "fragment weight must be intrinsic"
                        total += lam**wraps
        return total
    if kind == "PTK":
        total = 0.0
        tables2 = [_pt_table(n2, lam) for n2 in t2.iter_nodes()]
        for n1 in t1.iter_nodes():
            f1 = _pt_table(n1, lam)
            for f2 in tables2:
                for ser, (weight1, n_nodes) in f1.items():
                    other = f2.get(ser)
                    if other is not None:
                        assert other[1] == n_nodes, "node count must be intrinsic"
                        total += mu**n_nodes * weight1 * other[0]
        return total
    raise ValueError(f"no brute-force oracle for kind {kind!r}")
