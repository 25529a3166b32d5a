"""Classification heads over frozen backbone features, trained from scratch.

The network is a shared fully-connected layer with ReLU and inverted
dropout, a style head over the hairstyle library, and one linear head per
taxonomy label slot. Style and attribute cross-entropies are summed and
minimized with decoupled-weight-decay Adam under a cosine learning-rate
schedule. Everything is plain numpy with analytic gradients; attribute
heads are stored stacked row-wise so the whole bank is two matmuls.

Parameters are kept in float64 for optimizer math but are always delivered
on the float32 grid (init and end of training), so writing a checkpoint,
which stores float32, is lossless.
"""

from __future__ import annotations

import base64
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .taxonomy import LayoutSlot, Taxonomy, flatten_labels

CHECKPOINT_VERSION = 1

TENSOR_NAMES = ("shared_w", "shared_b", "style_w", "style_b", "attr_w", "attr_b")
_DECAYED = ("shared_w", "style_w", "attr_w")  # biases are never decayed


@dataclass(frozen=True)
class HeadConfig:
    """Shapes and knobs of the head network."""

    feature_dim: int = 8192
    hidden_dim: int = 4096
    num_styles: int = 480
    attribute_cardinalities: tuple[int, ...] = ()
    dropout_rate: float = 0.1
    attr_head_input: str = "hidden"  # "hidden" | "feature"

    def __post_init__(self):
        if min(self.feature_dim, self.hidden_dim, self.num_styles) <= 0:
            raise ValueError("dimensions must be positive")
        if any(c <= 0 for c in self.attribute_cardinalities):
            raise ValueError("attribute cardinalities must be positive")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError("dropout_rate must be in [0, 1)")
        if self.attr_head_input not in ("hidden", "feature"):
            raise ValueError("attr_head_input must be 'hidden' or 'feature'")
        object.__setattr__(
            self, "attribute_cardinalities", tuple(int(c) for c in self.attribute_cardinalities)
        )

    @property
    def attr_input_dim(self) -> int:
        return self.hidden_dim if self.attr_head_input == "hidden" else self.feature_dim

    @property
    def attr_total(self) -> int:
        return int(sum(self.attribute_cardinalities))

    def attr_offsets(self) -> np.ndarray:
        return np.concatenate(([0], np.cumsum(self.attribute_cardinalities))).astype(int)

    @classmethod
    def for_taxonomy(cls, tax: Taxonomy, **kwargs) -> "HeadConfig":
        cards = tuple(slot.cardinality for slot in tax.layout())
        return cls(attribute_cardinalities=cards, **kwargs)

    def to_dict(self) -> dict:
        return {
            "feature_dim": self.feature_dim,
            "hidden_dim": self.hidden_dim,
            "num_styles": self.num_styles,
            "attribute_cardinalities": list(self.attribute_cardinalities),
            "dropout_rate": self.dropout_rate,
            "attr_head_input": self.attr_head_input,
        }


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer and schedule settings; defaults are the full-scale presets."""

    lr_max: float = 3e-4
    lr_min: float = 0.0
    epochs: int = 30
    batch_size: int = 512
    weight_decay: float = 0.01
    betas: tuple[float, float] = (0.9, 0.999)
    eps: float = 1e-8
    seed: int = 0

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["betas"] = list(self.betas)
        return doc


@dataclass
class ModelParams:
    """Weights and biases of the shared layer, style head, and attribute bank."""

    shared_w: np.ndarray  # (hidden, feature)
    shared_b: np.ndarray  # (hidden,)
    style_w: np.ndarray  # (num_styles, hidden)
    style_b: np.ndarray  # (num_styles,)
    attr_w: np.ndarray  # (sum of cardinalities, attr input dim)
    attr_b: np.ndarray  # (sum of cardinalities,)

    def tensors(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in TENSOR_NAMES}

    def copy(self) -> "ModelParams":
        return ModelParams(**{k: v.copy() for k, v in self.tensors().items()})

    def check_finite(self) -> None:
        for name, t in self.tensors().items():
            if not np.isfinite(t).all():
                raise FloatingPointError(f"non-finite values in {name}")


@dataclass(frozen=True)
class ForwardOutput:
    hidden: np.ndarray
    style_logits: np.ndarray
    attr_logits: list[np.ndarray]


def _f32_grid(arr: np.ndarray) -> np.ndarray:
    """Snap values onto the float32 grid while keeping float64 math."""
    return arr.astype(np.float32).astype(np.float64)


def init_params(cfg: HeadConfig, seed) -> ModelParams:
    """Seeded uniform init scaled by 1/sqrt(fan_in); biases zero.

    Weight matrices are drawn from U(-sqrt(6/fan_in), +sqrt(6/fan_in)),
    in a fixed order, so the same seed is bit-reproducible.
    """
    rng = np.random.default_rng(seed)

    def draw(rows: int, fan_in: int) -> np.ndarray:
        bound = math.sqrt(6.0 / fan_in)
        return _f32_grid(rng.uniform(-bound, bound, size=(rows, fan_in)))

    return ModelParams(
        shared_w=draw(cfg.hidden_dim, cfg.feature_dim),
        shared_b=np.zeros(cfg.hidden_dim),
        style_w=draw(cfg.num_styles, cfg.hidden_dim),
        style_b=np.zeros(cfg.num_styles),
        attr_w=draw(cfg.attr_total, cfg.attr_input_dim),
        attr_b=np.zeros(cfg.attr_total),
    )


def _as_batch(f: np.ndarray, cfg: HeadConfig) -> tuple[np.ndarray, bool]:
    x = np.asarray(f, dtype=np.float64)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != cfg.feature_dim:
        raise ValueError(
            f"expected features of dimension {cfg.feature_dim}, got shape {np.asarray(f).shape}"
        )
    return x, single


def _forward_full(
    params: ModelParams,
    cfg: HeadConfig,
    x: np.ndarray,
    mode: str,
    rng: np.random.Generator | None,
):
    """Forward pass keeping the intermediates the backward pass needs."""
    if mode not in ("train", "eval"):
        raise ValueError("mode must be 'train' or 'eval'")
    pre = x @ params.shared_w.T + params.shared_b
    hidden = np.maximum(pre, 0.0)
    mask = None
    if mode == "train" and cfg.dropout_rate > 0.0:
        if rng is None:
            raise ValueError("train-mode forward with dropout needs an rng")
        keep = 1.0 - cfg.dropout_rate
        mask = (rng.random(hidden.shape) < keep).astype(np.float64) / keep
        hidden = hidden * mask
    style_logits = hidden @ params.style_w.T + params.style_b
    attr_in = hidden if cfg.attr_head_input == "hidden" else x
    attr_flat = attr_in @ params.attr_w.T + params.attr_b
    return pre, mask, hidden, style_logits, attr_in, attr_flat


def forward(
    params: ModelParams,
    cfg: HeadConfig,
    f: np.ndarray,
    mode: str = "eval",
    rng: np.random.Generator | None = None,
) -> ForwardOutput:
    """Hidden representation plus style and per-slot attribute logits."""
    x, single = _as_batch(f, cfg)
    _, _, hidden, style_logits, _, attr_flat = _forward_full(params, cfg, x, mode, rng)
    offsets = cfg.attr_offsets()
    attr_logits = [
        attr_flat[:, offsets[t] : offsets[t + 1]]
        for t in range(len(cfg.attribute_cardinalities))
    ]
    if single:
        return ForwardOutput(hidden[0], style_logits[0], [a[0] for a in attr_logits])
    return ForwardOutput(hidden, style_logits, attr_logits)


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def softmax(logits: np.ndarray) -> np.ndarray:
    return np.exp(_log_softmax(logits))


def style_loss(style_logits: np.ndarray, s: int) -> float:
    """Cross-entropy of the style head against the true style index."""
    logits = np.asarray(style_logits, dtype=np.float64)
    if not 0 <= s < logits.shape[-1]:
        raise ValueError(f"style index {s} out of range")
    return float(-_log_softmax(logits)[..., s])


def attr_loss(attr_logits: Sequence[np.ndarray], labels) -> float:
    """Unweighted sum of per-slot cross-entropies against the label vector."""
    idx = list(getattr(labels, "labels", labels))
    if len(idx) != len(attr_logits):
        raise ValueError(f"{len(attr_logits)} heads for {len(idx)} labels")
    total = 0.0
    for logits, label in zip(attr_logits, idx):
        logits = np.asarray(logits, dtype=np.float64)
        if not 0 <= label < logits.shape[-1]:
            raise ValueError(f"label {label} out of range for head of size {logits.shape[-1]}")
        total += -_log_softmax(logits)[..., label]
    return float(total)


def batch_loss(
    params: ModelParams,
    cfg: HeadConfig,
    feats: np.ndarray,
    styles: np.ndarray,
    labels: np.ndarray,
) -> float:
    """Mean over the batch of style plus attribute loss, dropout off."""
    x, _ = _as_batch(feats, cfg)
    _, _, _, style_logits, _, attr_flat = _forward_full(params, cfg, x, "eval", None)
    n = x.shape[0]
    rows = np.arange(n)
    loss = float(-_log_softmax(style_logits)[rows, styles].mean())
    offsets = cfg.attr_offsets()
    labels = np.asarray(labels, dtype=int)
    for t in range(len(cfg.attribute_cardinalities)):
        seg = _log_softmax(attr_flat[:, offsets[t] : offsets[t + 1]])
        loss += float(-seg[rows, labels[:, t]].mean())
    return loss


def backward(
    params: ModelParams,
    cfg: HeadConfig,
    feats: np.ndarray,
    styles: np.ndarray,
    labels: np.ndarray,
    mode: str = "train",
    rng: np.random.Generator | None = None,
) -> tuple[dict[str, np.ndarray], float]:
    """Analytic gradients of the mean batch loss for every parameter tensor.

    Runs its own forward pass; the dropout mask drawn there is reused for
    the backward pass. Returns (gradients, batch loss).
    """
    x, _ = _as_batch(feats, cfg)
    n = x.shape[0]
    if n == 0:
        raise ValueError("empty batch")
    styles = np.asarray(styles, dtype=int)
    labels = np.asarray(labels, dtype=int)
    if labels.ndim != 2 or labels.shape != (n, len(cfg.attribute_cardinalities)):
        raise ValueError(
            f"labels must have shape ({n}, {len(cfg.attribute_cardinalities)})"
        )

    pre, mask, hidden, style_logits, attr_in, attr_flat = _forward_full(
        params, cfg, x, mode, rng
    )
    rows = np.arange(n)
    offsets = cfg.attr_offsets()

    log_p_style = _log_softmax(style_logits)
    loss = float(-log_p_style[rows, styles].mean())
    d_style = np.exp(log_p_style)
    d_style[rows, styles] -= 1.0
    d_style /= n

    d_attr = np.empty_like(attr_flat)
    for t in range(len(cfg.attribute_cardinalities)):
        seg = slice(offsets[t], offsets[t + 1])
        log_p = _log_softmax(attr_flat[:, seg])
        loss += float(-log_p[rows, labels[:, t]].mean())
        g = np.exp(log_p)
        g[rows, labels[:, t]] -= 1.0
        d_attr[:, seg] = g / n

    grads = {
        "style_w": d_style.T @ hidden,
        "style_b": d_style.sum(axis=0),
        "attr_w": d_attr.T @ attr_in,
        "attr_b": d_attr.sum(axis=0),
    }
    d_hidden = d_style @ params.style_w
    if cfg.attr_head_input == "hidden":
        d_hidden = d_hidden + d_attr @ params.attr_w
    if mask is not None:
        d_hidden = d_hidden * mask
    d_pre = d_hidden * (pre > 0.0)
    grads["shared_w"] = d_pre.T @ x
    grads["shared_b"] = d_pre.sum(axis=0)
    return grads, loss


@dataclass
class AdamWState:
    """First/second moment accumulators and the step counter."""

    step: int
    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]

    @classmethod
    def zeros(cls, params: ModelParams) -> "AdamWState":
        return cls(
            step=0,
            m={k: np.zeros_like(t) for k, t in params.tensors().items()},
            v={k: np.zeros_like(t) for k, t in params.tensors().items()},
        )


def adamw_step(
    params: ModelParams,
    grads: Mapping[str, np.ndarray],
    state: AdamWState,
    lr: float,
    cfg: TrainConfig,
) -> tuple[ModelParams, AdamWState]:
    """One decoupled-weight-decay Adam step, updating params in place.

    theta <- theta * (1 - lr * wd) - lr * m_hat / (sqrt(v_hat) + eps),
    with bias-corrected moments. The decay is applied multiplicatively so
    a gradient-free step shrinks weights by exactly (1 - lr * wd); decay
    touches weight matrices only, never biases.
    """
    beta1, beta2 = cfg.betas
    state.step += 1
    t = state.step
    bc1 = 1.0 - beta1**t
    bc2 = 1.0 - beta2**t
    for name, theta in params.tensors().items():
        g = grads[name]
        m = state.m[name]
        v = state.v[name]
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * np.square(g)
        if cfg.weight_decay > 0.0 and name in _DECAYED:
            theta *= 1.0 - lr * cfg.weight_decay
        theta -= lr * (m / bc1) / (np.sqrt(v / bc2) + cfg.eps)
    return params, state


def cosine_lr(step: int, total_steps: int, lr_max: float, lr_min: float = 0.0) -> float:
    """Cosine annealing from lr_max at step 0 down to lr_min at total_steps."""
    if total_steps <= 0:
        raise ValueError("total_steps must be positive")
    if not 0 <= step <= total_steps:
        raise ValueError(f"step {step} outside [0, {total_steps}]")
    return lr_min + 0.5 * (lr_max - lr_min) * (1.0 + math.cos(math.pi * step / total_steps))


def label_matrix(tax: Taxonomy, styles: Mapping, style_ids: Sequence[str]) -> np.ndarray:
    """Stack each style's flattened label vector; row order follows style_ids."""
    return np.asarray(
        [flatten_labels(tax, styles[sid]).labels for sid in style_ids], dtype=int
    )


def train(
    feats: np.ndarray,
    styles: np.ndarray,
    labels: np.ndarray,
    head_cfg: HeadConfig,
    train_cfg: TrainConfig,
) -> tuple[ModelParams, dict]:
    """Full training loop: seeded shuffling, per-step cosine schedule, AdamW.

    Returns the final parameters (snapped to checkpoint precision) and a
    history dict with the per-epoch mean loss and the learning rate at
    each epoch boundary (epochs + 1 entries, ending at lr_min).
    """
    feats = np.asarray(feats, dtype=np.float64)
    n = feats.shape[0]
    if n == 0:
        raise ValueError("empty dataset")
    styles = np.asarray(styles, dtype=int)
    labels = np.asarray(labels, dtype=int)

    root = np.random.SeedSequence(train_cfg.seed)
    init_seq, loop_seq = root.spawn(2)
    params = init_params(head_cfg, init_seq)
    rng = np.random.default_rng(loop_seq)
    state = AdamWState.zeros(params)

    batch = min(train_cfg.batch_size, n)
    steps_per_epoch = math.ceil(n / batch)
    total_steps = train_cfg.epochs * steps_per_epoch

    history = {"loss": [], "lr": []}
    step = 0
    for _epoch in range(train_cfg.epochs):
        history["lr"].append(
            cosine_lr(step, total_steps, train_cfg.lr_max, train_cfg.lr_min)
        )
        perm = rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, batch):
            idx = perm[start : start + batch]
            lr = cosine_lr(step, total_steps, train_cfg.lr_max, train_cfg.lr_min)
            grads, loss = backward(
                params, head_cfg, feats[idx], styles[idx], labels[idx], "train", rng
            )
            adamw_step(params, grads, state, lr, train_cfg)
            epoch_loss += loss * len(idx)
            step += 1
        history["loss"].append(epoch_loss / n)
    history["lr"].append(
        cosine_lr(total_steps, total_steps, train_cfg.lr_max, train_cfg.lr_min)
    )

    params.check_finite()
    final = ModelParams(**{k: _f32_grid(t) for k, t in params.tensors().items()})
    return final, history


@dataclass(frozen=True)
class Prediction:
    style_index: int
    attr_indices: tuple[int, ...]
    style_probs: np.ndarray


def predict(params: ModelParams, cfg: HeadConfig, f: np.ndarray) -> Prediction:
    """Eval-mode argmax prediction; ties resolve to the lowest index."""
    out = forward(params, cfg, f, mode="eval")
    if out.style_logits.ndim != 1:
        raise ValueError("predict takes a single feature vector; see predict_batch")
    return Prediction(
        style_index=int(np.argmax(out.style_logits)),
        attr_indices=tuple(int(np.argmax(a)) for a in out.attr_logits),
        style_probs=softmax(out.style_logits),
    )


def predict_batch(
    params: ModelParams, cfg: HeadConfig, feats: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized predict: (style indices, attribute indices, style probabilities)."""
    x, _ = _as_batch(np.atleast_2d(np.asarray(feats)), cfg)
    out = forward(params, cfg, x, mode="eval")
    attr_idx = np.stack([np.argmax(a, axis=1) for a in out.attr_logits], axis=1)
    return (
        np.argmax(out.style_logits, axis=1),
        attr_idx,
        softmax(out.style_logits),
    )


def _encode_tensor(arr: np.ndarray) -> dict:
    data = np.ascontiguousarray(arr, dtype="<f4").tobytes(order="C")
    return {
        "shape": list(arr.shape),
        "dtype": "float32",
        "data": base64.b64encode(data).decode("ascii"),
    }


def _decode_tensor(doc: Mapping) -> np.ndarray:
    if doc.get("dtype") != "float32":
        raise ValueError(f"unsupported tensor dtype {doc.get('dtype')!r}")
    raw = base64.b64decode(doc["data"])
    arr = np.frombuffer(raw, dtype="<f4").reshape(doc["shape"])
    return arr.astype(np.float64)


@dataclass(frozen=True)
class Checkpoint:
    params: ModelParams
    head_cfg: HeadConfig
    layout: tuple[LayoutSlot, ...]
    style_ids: tuple[str, ...]


def save_checkpoint(
    path: str | Path,
    params: ModelParams,
    head_cfg: HeadConfig,
    layout: Sequence[LayoutSlot],
    style_ids: Sequence[str] = (),
    meta: Mapping | None = None,
) -> None:
    """JSON envelope with base64 float32 tensors; byte-stable for fixed inputs."""
    doc = {
        "version": CHECKPOINT_VERSION,
        "head_cfg": head_cfg.to_dict(),
        "layout": [[s.slot, s.attribute, s.cardinality] for s in layout],
        "style_ids": list(style_ids),
        "tensors": {name: _encode_tensor(t) for name, t in params.tensors().items()},
    }
    if meta is not None:
        doc["_meta"] = dict(meta)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_checkpoint(path: str | Path) -> Checkpoint:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {doc.get('version')!r}")
    cfg_doc = dict(doc["head_cfg"])
    cfg_doc["attribute_cardinalities"] = tuple(cfg_doc["attribute_cardinalities"])
    head_cfg = HeadConfig(**cfg_doc)
    tensors = {name: _decode_tensor(doc["tensors"][name]) for name in TENSOR_NAMES}
    params = ModelParams(**tensors)
    expected = {
        "shared_w": (head_cfg.hidden_dim, head_cfg.feature_dim),
        "shared_b": (head_cfg.hidden_dim,),
        "style_w": (head_cfg.num_styles, head_cfg.hidden_dim),
        "style_b": (head_cfg.num_styles,),
        "attr_w": (head_cfg.attr_total, head_cfg.attr_input_dim),
        "attr_b": (head_cfg.attr_total,),
    }
    for name, shape in expected.items():
        if tensors[name].shape != shape:
            raise ValueError(
                f"tensor {name}: shape {tensors[name].shape} does not match config {shape}"
            )
    layout = tuple(LayoutSlot(s, a, int(c)) for s, a, c in doc.get("layout", []))
    return Checkpoint(
        params=params,
        head_cfg=head_cfg,
        layout=layout,
        style_ids=tuple(doc.get("style_ids", [])),
    )
