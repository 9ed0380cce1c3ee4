"""Kernel combination: smoothed-max pair kernel and composite kernels.

The pair kernel scores two sentence pairs by the better of the two
cross-pair alignments, using a log-sum-exp smooth maximum so the result
stays a well-behaved kernel. The composite kernels mix a dependency
tree kernel, a polynomial kernel on entity context vectors, and
optionally a constituency tree kernel.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError
from .kernels import TreeKernelParams, poly_kernel, tree_kernel
from .lexical import SigmaConfig
from .transforms import LabeledTree

VARIANTS = ("CK1", "CK2", "CK3")


def softmax2(x1: float, x2: float, m: float = 100.0) -> float:
    """Smooth maximum (1/m) * log(exp(m*x1) + exp(m*x2)).

    Evaluated as max + log1p(exp(-m*|x1 - x2|))/m so it never overflows;
    the result sits within log(2)/m above the true maximum.
    """
    if m <= 0:
        raise ConfigError(f"softmax sharpness must be positive, got {m}")
    return max(x1, x2) + math.log1p(math.exp(-m * abs(x1 - x2))) / m


class TreeKernelCache:
    """Caches kernel values by tree object identity.

    Gram construction re-pairs the same trees many times; raw values
    (self kernels included) are cached so each unordered tree pair is
    evaluated once. Entries pin their trees so ids cannot be recycled.
    Concurrent use is safe: a racing recompute stores the same value.
    """

    def __init__(self, params: TreeKernelParams):
        self.params = params
        self._raw_params = replace(params, normalize=False)
        self._values: dict = {}
        self._pinned: dict = {}

    def _raw(self, t1: LabeledTree, t2: LabeledTree) -> float:
        key = (id(t1), id(t2)) if id(t1) <= id(t2) else (id(t2), id(t1))
        hit = self._values.get(key)
        if hit is None:
            hit = tree_kernel(t1, t2, self._raw_params)
            self._values[key] = hit
            self._pinned[id(t1)] = t1
            self._pinned[id(t2)] = t2
        return hit

    def __call__(self, t1: LabeledTree, t2: LabeledTree) -> float:
        k12 = self._raw(t1, t2)
        if not self.params.normalize:
            return k12
        if t1 is t2:
            return 1.0 if k12 > 0.0 else 0.0
        s1 = self._raw(t1, t1)
        s2 = self._raw(t2, t2)
        if s1 <= 0.0 or s2 <= 0.0:
            return 0.0
        return k12 / math.sqrt(s1 * s2)


@dataclass
class PairKernelParams:
    base: TreeKernelParams
    m: float = 100.0

    def __post_init__(self):
        if self.m <= 0:
            raise ConfigError(f"softmax sharpness must be positive, got {self.m}")


def sm_tk(pair_a, pair_b, params: PairKernelParams, cache: TreeKernelCache | None = None) -> float:
    """Smoothed maximum over the two cross-pair kernel products.

    pair_a and pair_b are (tree, tree) tuples. With a shared cache the
    four underlying kernel values are reused across a Gram build.
    """
    a1, a2 = pair_a
    b1, b2 = pair_b
    if cache is None:
        tk = lambda x, y: tree_kernel(x, y, params.base)
    else:
        tk = cache
    straight = tk(a1, b1) * tk(a2, b2)
    crossed = tk(a1, b2) * tk(a2, b1)
    return softmax2(straight, crossed, params.m)


@dataclass
class REKernelInput:
    """Prepared relation instance: dependency LCT, context vector, and
    the constituency fragment when the variant needs one."""

    lct: LabeledTree
    vec: np.ndarray | None = None
    pet: LabeledTree | None = None


@dataclass
class CompositeParams:
    variant: str
    alpha: float = 0.23
    sst: TreeKernelParams = field(default_factory=lambda: TreeKernelParams("SST"))
    pt: TreeKernelParams = field(default_factory=lambda: TreeKernelParams("PTK"))
    vec_degree: int = 2
    vec_coef0: float = 1.0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown composite variant {self.variant!r}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.sst.kind != "SST":
            raise ConfigError("composite sst slot must hold an SST kernel")
        if self.pt.kind not in ("PTK", "SPTK"):
            raise ConfigError("composite pt slot must hold a PTK or SPTK kernel")

    @property
    def feature_mode(self) -> str:
        """Entity context flavor: surface windows for CK1, dependency
        contexts for CK2 and CK3."""
        return "V_o" if self.variant == "CK1" else "V_ud"


def _normalized_poly(u, v, degree: int, coef0: float) -> float:
    k = poly_kernel(u, v, degree, coef0)
    if u is v:
        return 1.0 if k > 0.0 else 0.0
    s1 = poly_kernel(u, u, degree, coef0)
    s2 = poly_kernel(v, v, degree, coef0)
    if s1 <= 0.0 or s2 <= 0.0:
        return 0.0
    return k / math.sqrt(s1 * s2)


def composite_kernel(
    a: REKernelInput,
    b: REKernelInput,
    params: CompositeParams,
    pt_cache: TreeKernelCache | None = None,
    sst_cache: TreeKernelCache | None = None,
) -> float:
    """Composite kernel over two prepared relation instances.

    CK2 = (K_vec + K_pt)^2 and never evaluates a constituency kernel;
    CK1 and CK3 add alpha * K_sst on the enclosing constituency
    fragment. All sub-kernels are individually normalized.
    """
    if a.vec is None or b.vec is None:
        raise ConfigError("composite kernel requires entity context vectors")
    pt = pt_cache if pt_cache is not None else (lambda x, y: tree_kernel(x, y, params.pt))
    k_pt = pt(a.lct, b.lct)
    k_vec = _normalized_poly(a.vec, b.vec, params.vec_degree, params.vec_coef0)
    core = (k_vec + k_pt) ** 2
    if params.variant == "CK2":
        return core
    if a.pet is None or b.pet is None:
        raise ConfigError(f"{params.variant} requires constituency trees for both instances")
    sst = sst_cache if sst_cache is not None else (lambda x, y: tree_kernel(x, y, params.sst))
    k_sst = sst(a.pet, b.pet)
    return params.alpha * k_sst + (1.0 - params.alpha) * core


# ---------------------------------------------------------------------------
# Kernel spec serialization. Every hyperparameter is written explicitly
# so model files and Gram manifests pin the exact kernel they used.


def tree_params_to_dict(p: TreeKernelParams) -> dict:
    out = {
        "kind": p.kind,
        "lambda": p.lam,
        "mu": p.mu,
        "normalize": p.normalize,
    }
    if p.sigma_cfg is not None:
        out["sigma"] = p.sigma_cfg.to_dict()
    elif p.kind == "SPTK":
        out["sigma"] = SigmaConfig().to_dict()
    return out


def tree_params_from_dict(data: dict) -> TreeKernelParams:
    """Rebuild kernel params from their serialized form.

    SPTK specs come back with sigma_cfg populated and a placeholder
    similarity; callers bind the real one against loaded resources.
    """
    kind = data.get("kind")
    if kind not in ("SST", "PTK", "SPTK"):
        raise ConfigError(f"unknown kernel kind {kind!r} in kernel spec")
    sigma_cfg = None
    sigma = None
    if kind == "SPTK":
        sigma_cfg = SigmaConfig.from_dict(data.get("sigma", {}))
        sigma = _unbound_sigma
    return TreeKernelParams(
        kind=kind,
        lam=float(data.get("lambda", 0.4)),
        mu=float(data.get("mu", 0.4)),
        sigma=sigma,
        sigma_cfg=sigma_cfg,
        normalize=bool(data.get("normalize", True)),
    )


def _unbound_sigma(n1, n2):
    raise ConfigError("SPTK similarity is not bound to embedding resources yet")


def pair_spec_to_dict(p: PairKernelParams) -> dict:
    return {"task": "pi", "m": p.m, "base": tree_params_to_dict(p.base)}


def pair_spec_from_dict(data: dict) -> PairKernelParams:
    return PairKernelParams(
        base=tree_params_from_dict(data.get("base", {})), m=float(data.get("m", 100.0))
    )


def composite_spec_to_dict(p: CompositeParams) -> dict:
    return {
        "task": "re",
        "variant": p.variant,
        "alpha": p.alpha,
        "degree": p.vec_degree,
        "coef0": p.vec_coef0,
        "feature_mode": p.feature_mode,
        "sst": tree_params_to_dict(p.sst),
        "pt": tree_params_to_dict(p.pt),
    }


def composite_spec_from_dict(data: dict) -> CompositeParams:
    params = CompositeParams(
        variant=data.get("variant", ""),
        alpha=float(data.get("alpha", 0.23)),
        sst=tree_params_from_dict(data.get("sst", {"kind": "SST"})),
        pt=tree_params_from_dict(data.get("pt", {"kind": "PTK"})),
        vec_degree=int(data.get("degree", 2)),
        vec_coef0=float(data.get("coef0", 1.0)),
    )
    mode = data.get("feature_mode")
    if mode is not None and mode != params.feature_mode:
        raise ConfigError(
            f"feature_mode {mode!r} does not match variant {params.variant}"
        )
    return params


def kernel_spec_from_dict(data: dict):
    task = data.get("task")
    if task == "pi":
        return pair_spec_from_dict(data)
    if task == "re":
        return composite_spec_from_dict(data)
    raise ConfigError(f"kernel spec task must be 'pi' or 're', got {task!r}")


def kernel_spec_to_dict(spec) -> dict:
    if isinstance(spec, PairKernelParams):
        return pair_spec_to_dict(spec)
    if isinstance(spec, CompositeParams):
        return composite_spec_to_dict(spec)
    raise ConfigError(f"cannot serialize kernel spec of type {type(spec).__name__}")


def kernel_fingerprint(spec_dict: dict) -> str:
    canon = json.dumps(spec_dict, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]
