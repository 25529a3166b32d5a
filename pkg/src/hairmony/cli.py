"""Command-line entry point: validate, marginals, balance, sample, train,
eval, report, and serve.

Exit codes follow one contract everywhere: 0 on success, 1 when inputs are
well-formed but fail validation or the targets are infeasible, 2 on I/O,
format, or usage errors. Machine-readable results go only to ``--out``
paths; progress and summaries go to standard error. Every output document
echoes the effective configuration under ``_meta``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import balancer as balancer_mod
from . import datastore, evaluation, model as model_mod
from .balancer import (
    FRINGE_FLAG,
    GATHERED_FLAG,
    LENGTH_BUCKET_FLAG,
    BalancerError,
    InfeasibleTargetError,
    SamplingWeights,
    TargetMarginals,
    fit_weights,
    style_target_value,
)
from .datastore import FeatureStoreError, JoinError
from .service import AnnotationService
from .taxonomy import (
    AnnotationError,
    TaxonomyError,
    data_dir,
    load_taxonomy,
    read_annotations,
    validate_annotation,
)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def _write_json(path: str | Path, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _meta(args: argparse.Namespace, command: str, **extra) -> dict:
    skip = {"func"}
    config = {
        k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None
    }
    config = {k: (str(v) if isinstance(v, Path) else v) for k, v in config.items()}
    doc = {"command": command, "config": config}
    doc.update(extra)
    return doc


def _default_taxonomy_path() -> Path:
    return data_dir() / "taxonomy.v1.json"


def cmd_validate(args) -> int:
    tax = load_taxonomy(args.taxonomy)
    annotations = read_annotations(args.annotations)
    all_violations: dict[str, list[dict]] = {}
    for sid, ann in annotations.items():
        violations = validate_annotation(tax, ann)
        if violations:
            all_violations[sid] = [v.to_dict() for v in violations]
    if args.out:
        _write_json(
            args.out,
            {
                "valid": not all_violations,
                "count": len(annotations),
                "violations": all_violations,
                "_meta": _meta(args, "validate"),
            },
        )
    if all_violations:
        for sid, violations in all_violations.items():
            for v in violations:
                _say(f"{sid}: {v['rule_id']} at {v['path']}: {v['message']}")
        _say(f"{len(all_violations)} of {len(annotations)} styles invalid")
        return EXIT_INVALID
    _say(f"{len(annotations)} styles valid")
    return EXIT_OK


def cmd_marginals(args) -> int:
    tax = load_taxonomy(args.taxonomy)
    styles = read_annotations(args.library)
    weights = None
    if args.weights:
        weights = SamplingWeights.from_json(args.weights).weights
    attr_table = datastore.attribute_marginals(tax, styles, weights)
    w = weights or {sid: 1.0 / len(styles) for sid in styles}
    derived: dict[str, dict[str, float]] = {}
    for flag in (FRINGE_FLAG, GATHERED_FLAG, LENGTH_BUCKET_FLAG):
        dist: dict[str, float] = {}
        for sid, ann in styles.items():
            value = style_target_value(tax, ann, flag)
            dist[value] = dist.get(value, 0.0) + w[sid]
        derived[flag] = dist
    _write_json(
        args.out,
        {
            "attributes": attr_table,
            "derived": derived,
            "_meta": _meta(args, "marginals", num_styles=len(styles)),
        },
    )
    _say(f"marginals over {len(styles)} styles written to {args.out}")
    return EXIT_OK


def cmd_balance(args) -> int:
    tax = load_taxonomy(args.taxonomy)
    styles = read_annotations(args.library)
    targets = TargetMarginals.from_json(args.targets)
    fitted = fit_weights(
        tax,
        styles,
        targets,
        max_iters=args.max_iters,
        tol=args.tol,
        damping=args.damping,
    )
    doc = fitted.to_json_doc()
    doc["_meta"].update(_meta(args, "balance"))
    _write_json(args.out, doc)
    state = "converged" if fitted.converged else "did not converge"
    _say(
        f"{state} after {fitted.iterations_used} iterations; "
        f"max residual {max(fitted.residuals.values()):.3g}"
    )
    return EXIT_OK


def cmd_sample(args) -> int:
    weights = SamplingWeights.from_json(args.weights)
    ids = balancer_mod.sample(weights, args.count, args.seed)
    _write_json(
        args.out,
        {"style_ids": ids, "_meta": _meta(args, "sample")},
    )
    _say(f"{len(ids)} draws written to {args.out}")
    return EXIT_OK


def _load_dataset(args):
    store = datastore.read_feature_store(args.features)
    samples = datastore.read_samples(args.samples)
    styles = read_annotations(args.library)
    return datastore.join(store, samples, styles)


def cmd_train(args) -> int:
    tax = load_taxonomy(args.taxonomy)
    dataset = _load_dataset(args)
    style_ids = list(dataset.styles.keys())
    index_of = {sid: i for i, sid in enumerate(style_ids)}

    head_cfg = model_mod.HeadConfig.for_taxonomy(
        tax,
        feature_dim=dataset.features.dim,
        hidden_dim=args.hidden_dim,
        num_styles=len(style_ids),
        dropout_rate=args.dropout,
        attr_head_input=args.attr_head_input,
    )
    train_cfg = model_mod.TrainConfig(
        lr_max=args.lr_max,
        lr_min=args.lr_min,
        epochs=args.epochs,
        batch_size=args.batch_size,
        weight_decay=args.weight_decay,
        seed=args.seed,
    )

    feats = dataset.feature_matrix()
    per_style_labels = model_mod.label_matrix(tax, dataset.styles, style_ids)
    sample_styles = np.asarray([index_of[rec.style_id] for rec in dataset.samples])
    sample_labels = per_style_labels[sample_styles]

    _say(
        f"training on {len(dataset.samples)} samples, {len(style_ids)} styles, "
        f"{train_cfg.epochs} epochs"
    )
    params, history = model_mod.train(
        feats, sample_styles, sample_labels, head_cfg, train_cfg
    )
    model_mod.save_checkpoint(
        args.out,
        params,
        head_cfg,
        tax.layout(),
        style_ids=style_ids,
        meta=_meta(args, "train", train_config=train_cfg.to_dict()),
    )
    if args.history_out:
        _write_json(
            args.history_out, {"history": history, "_meta": _meta(args, "train")}
        )
    _say(f"final epoch loss {history['loss'][-1]:.4f}; checkpoint at {args.out}")
    return EXIT_OK


def cmd_eval(args) -> int:
    tax = load_taxonomy(args.taxonomy)
    checkpoint = model_mod.load_checkpoint(args.model)
    dataset = _load_dataset(args)
    if not checkpoint.style_ids:
        _say("checkpoint carries no style ids; cannot map predictions to styles")
        return EXIT_IO

    feats = dataset.feature_matrix()
    style_idx, attr_idx, _probs = model_mod.predict_batch(
        checkpoint.params, checkpoint.head_cfg, feats
    )
    predicted_styles = [checkpoint.style_ids[i] for i in style_idx]
    doc = evaluation.report(tax, dataset, predicted_styles, label=args.label)

    truth_labels = model_mod.label_matrix(
        tax, dataset.styles, [rec.style_id for rec in dataset.samples]
    )
    doc["_diagnostics"] = {
        "attr_head_agreement": evaluation.attr_head_agreement(attr_idx, truth_labels)
    }
    doc["_meta"].update(_meta(args, "eval"))
    _write_json(args.out, doc)
    _say(
        f"mean accuracy {100 * doc['mean_accuracy']:.1f}%, "
        f"mean fairness {doc['mean_fairness']:.1f}%"
    )
    return EXIT_OK


def cmd_report(args) -> int:
    reports = []
    for path in args.reports:
        with open(path, "r", encoding="utf-8") as fh:
            reports.append(json.load(fh))
    if args.format == "csv":
        rendered = evaluation.to_csv(reports)
    elif args.fairness:
        rendered = evaluation.render_fairness_table(reports)
    else:
        rendered = evaluation.render_table(reports)
    if args.out:
        Path(args.out).write_text(rendered, encoding="utf-8")
        _say(f"table written to {args.out}")
    else:
        print(rendered, end="")
    return EXIT_OK


def cmd_serve(args) -> int:
    service = AnnotationService(
        image_dir=args.images,
        taxonomy_path=args.taxonomy,
        store_path=args.store,
        ui_dir=args.ui,
        lease_seconds=args.lease_seconds,
    )
    _say(f"serving on http://{args.host}:{args.port} (Ctrl-C to stop)")
    try:
        service.serve_forever(host=args.host, port=args.port)
    except KeyboardInterrupt:
        _say("stopped")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hairmony",
        description="Fairness-aware hairstyle classification toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    default_tax = _default_taxonomy_path()

    p = sub.add_parser("validate", help="validate an annotation library")
    p.add_argument("--taxonomy", default=default_tax)
    p.add_argument("--annotations", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("marginals", help="attribute marginals of a style library")
    p.add_argument("--taxonomy", default=default_tax)
    p.add_argument("--library", required=True)
    p.add_argument("--weights", help="optional weights JSON from 'balance'")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_marginals)

    p = sub.add_parser("balance", help="fit sampling weights to target marginals")
    p.add_argument("--taxonomy", default=default_tax)
    p.add_argument("--library", required=True)
    p.add_argument("--targets", required=True)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iters", type=int, default=1000)
    p.add_argument("--damping", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_balance)

    p = sub.add_parser("sample", help="seeded draws from fitted weights")
    p.add_argument("--weights", required=True)
    p.add_argument("-n", "--count", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("train", help="train the classification heads")
    p.add_argument("--taxonomy", default=default_tax)
    p.add_argument("--features", required=True)
    p.add_argument("--samples", required=True)
    p.add_argument("--library", required=True)
    p.add_argument("--hidden-dim", type=int, default=4096)
    p.add_argument("--dropout", type=float, default=0.1)
    p.add_argument("--attr-head-input", choices=("hidden", "feature"), default="hidden")
    p.add_argument("--epochs", type=int, default=30)
    p.add_argument("--batch-size", type=int, default=512)
    p.add_argument("--lr-max", type=float, default=3e-4)
    p.add_argument("--lr-min", type=float, default=0.0)
    p.add_argument("--weight-decay", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--history-out")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint on labeled samples")
    p.add_argument("--model", required=True)
    p.add_argument("--taxonomy", default=default_tax)
    p.add_argument("--features", required=True)
    p.add_argument("--samples", required=True)
    p.add_argument("--library", required=True)
    p.add_argument("--label", default="model")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("report", help="render eval reports as a table")
    p.add_argument("--reports", nargs="+", required=True)
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--fairness", action="store_true", help="per-category fairness table")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="run the annotation service")
    p.add_argument("--taxonomy", default=default_tax)
    p.add_argument("--images", required=True)
    p.add_argument("--store", required=True)
    p.add_argument("--ui", help="directory with the built labeling UI")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8799)
    p.add_argument("--lease-seconds", type=float, default=600.0)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleTargetError as exc:
        _say(f"infeasible target: {exc}")
        return EXIT_INVALID
    except (JoinError,) as exc:
        for problem in exc.problems:
            _say(problem)
        return EXIT_INVALID
    except (BalancerError, evaluation.EvaluationError) as exc:
        _say(str(exc))
        return EXIT_INVALID
    except (TaxonomyError, AnnotationError, FeatureStoreError) as exc:
        _say(str(exc))
        return EXIT_IO
    except FileNotFoundError as exc:
        _say(f"file not found: {exc.filename}")
        return EXIT_IO
    except (json.JSONDecodeError, ValueError) as exc:
        _say(str(exc))
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
