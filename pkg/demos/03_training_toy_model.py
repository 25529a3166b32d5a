#!/usr/bin/env python3
"""Train the classification heads on separable toy features.

Five Gaussian clusters stand in for backbone features of five styles;
the model learns the style head and all 74 attribute heads jointly.

Run from the repo root: python3 demos/03_training_toy_model.py
"""

import numpy as np

from hairmony.collation import collate
from hairmony.model import (
    HeadConfig,
    TrainConfig,
    label_matrix,
    predict_batch,
    save_checkpoint,
    train,
)
from hairmony.taxonomy import load_canonical_taxonomy, read_annotations

rng = np.random.default_rng(0)
tax = load_canonical_taxonomy()
library = read_annotations("data/styles.v1.jsonl")
style_ids = list(library)[:5]
labels = label_matrix(tax, library, style_ids)

dim = 32
means = 6.0 * np.eye(5, dim)


def draw(n):
    cluster = rng.integers(0, 5, size=n)
    return means[cluster] + rng.normal(size=(n, dim)), cluster


train_x, train_s = draw(500)
eval_x, eval_s = draw(100)

cfg = HeadConfig.for_taxonomy(
    tax, feature_dim=dim, hidden_dim=32, num_styles=5, dropout_rate=0.1
)
tcfg = TrainConfig(lr_max=1e-3, epochs=120, batch_size=64, seed=7)
print(f"training {tcfg.epochs} epochs on {len(train_x)} samples ...")
params, history = train(train_x, train_s, labels[train_s], cfg, tcfg)
print(f"epoch loss: {history['loss'][0]:.2f} -> {history['loss'][-1]:.3f}")
print(f"lr schedule: {history['lr'][0]:.1e} -> {history['lr'][-1]:.1e}")

pred_s, pred_attrs, probs = predict_batch(params, cfg, eval_x)
print(f"held-out style accuracy: {(pred_s == eval_s).mean():.1%}")

pred_types = [collate(tax, library[style_ids[i]])["Hair Type"] for i in pred_s]
true_types = [collate(tax, library[style_ids[i]])["Hair Type"] for i in eval_s]
type_acc = np.mean([a == b for a, b in zip(pred_types, true_types)])
print(f"held-out collated Hair Type accuracy: {type_acc:.1%}")

save_checkpoint("toy_model.json", params, cfg, tax.layout(), style_ids=style_ids)
print("checkpoint written to toy_model.json")
