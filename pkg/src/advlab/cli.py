"""Command-line interface mirroring the API endpoints.

Subcommands: serve, fixture, attack, defend, explain, export. Exit status 0
on success, 2 for argument/validation errors (message names the offending
parameter), 1 for runtime failures.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .fixture import generate_toy_fixture
from .modelio import (
    FileFormatError,
    canon_dumps,
    load_dataset,
    load_model,
    save_dataset,
    save_model,
)
from .service import (
    XaiConfig,
    attack_config_from_dict,
    defense_config_from_dict,
    evaluate_attack_run,
    evaluate_defense_run,
)
from .store import STORE_ENV_VAR, RunStore, resolve_store_dir
from .xai import class_pair_importance, compute_frequency_table


def _attack_block(args):
    block = {"algorithm": args.attack, "epsilon": args.epsilon}
    if args.steps is not None:
        block["steps"] = args.steps
    if args.attack_seed is not None:
        block["seed"] = args.attack_seed
    return block


def _xai_config(args):
    return XaiConfig(layer_index=args.layer, tau=args.tau, k=args.k)


def _maybe_store(args):
    explicit = getattr(args, "store", None)
    if explicit:
        return RunStore(Path(explicit))
    if os.environ.get(STORE_ENV_VAR):
        return RunStore(resolve_store_dir(None))
    return None


def _write_record(record, out, args):
    Path(out).write_bytes(canon_dumps(record).encode())
    store = _maybe_store(args)
    if store is not None:
        store.save_run(record)
    print(f"run {record['run_id']} -> {out}")


def cmd_fixture(args):
    bundle = generate_toy_fixture(args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_model(bundle.network, out / "model.json")
    save_dataset(bundle.test, bundle.class_names, out / "dataset.json")
    print(
        f"fixture seed={args.seed}: model.json + dataset.json "
        f"({len(bundle.test)} samples) in {out}, "
        f"held-out accuracy {bundle.test_accuracy:.4f}"
    )
    return 0


def cmd_attack(args):
    model = load_model(args.model)
    dataset = load_dataset(args.data)
    cfg = attack_config_from_dict(_attack_block(args))
    record = evaluate_attack_run(
        model, dataset, cfg, args.samples, args.seed, _xai_config(args)
    )
    _write_record(record, args.out, args)
    return 0


def cmd_defend(args):
    model = load_model(args.model)
    dataset = load_dataset(args.data)
    attack_cfg = attack_config_from_dict(_attack_block(args))

    block = {"kind": args.defense}
    if args.defense == "adversarial_training":
        block["attack"] = _attack_block(args)
    for cli_name, wire_name in [
        ("mix_ratio", "mix_ratio"),
        ("def_epochs", "epochs"),
        ("def_lr", "lr"),
        ("def_batch_size", "batch_size"),
        ("latent_dim", "latent_dim"),
        ("window_capacity", "window_capacity"),
        ("similarity_threshold", "similarity_threshold"),
        ("risk_threshold", "risk_threshold"),
    ]:
        value = getattr(args, cli_name)
        if value is not None:
            block[wire_name] = value
    defense_cfg = defense_config_from_dict(block)

    record = evaluate_defense_run(
        model, dataset, attack_cfg, defense_cfg, args.samples, args.seed,
        _xai_config(args),
    )
    _write_record(record, args.out, args)
    return 0


def cmd_explain(args):
    model = load_model(args.model)
    dataset = load_dataset(args.data)
    layer = args.layer if args.layer is not None else model.network.embedding_index
    table = compute_frequency_table(model.network, dataset.data, layer, args.tau)
    ranking = class_pair_importance(table, args.class_a, args.class_b)
    payload = {
        "layer_index": layer,
        "tau": args.tau,
        "class_pair": [args.class_a, args.class_b],
        "class_counts": [int(c) for c in table.class_counts],
        "ranking": [
            {
                "neuron": e.neuron,
                "freq_a": e.freq_a,
                "freq_b": e.freq_b,
                "difference": e.difference,
            }
            for e in ranking.entries[: args.k]
        ],
    }
    text = canon_dumps(payload)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_export(args):
    if (args.model is None) == (args.data is None):
        raise ValueError("export takes exactly one of --model or --data")
    if args.model:
        loaded = load_model(args.model)
        save_model(loaded.network, args.out)
    else:
        loaded = load_dataset(args.data)
        save_dataset(loaded.data, loaded.class_names, args.out)
    print(f"exported {args.model or args.data} -> {args.out}")
    return 0


def cmd_serve(args):
    from .server import serve

    serve(host=args.host, port=args.port, store_dir=args.store)
    return 0


def _add_attack_args(p):
    p.add_argument("--model", required=True, help="model file path")
    p.add_argument("--data", required=True, help="dataset file path")
    p.add_argument("--attack", required=True, choices=["fgsm", "bim", "pgd"])
    p.add_argument("--epsilon", required=True, type=float, help="L-inf budget in [0,1]")
    p.add_argument("--steps", type=int, default=None, help="iterations (bim/pgd only)")
    p.add_argument("--attack-seed", type=int, default=None, help="pgd random-start seed")
    p.add_argument("--samples", required=True, type=int, help="samples to attack")
    p.add_argument("--seed", type=int, default=0, help="sample-selection seed")
    p.add_argument("--layer", type=int, default=None,
                   help="monitored layer (default: embedding layer)")
    p.add_argument("--tau", type=float, default=0.0, help="activation threshold")
    p.add_argument("--k", type=int, default=10, help="monitored neurons per sample")
    p.add_argument("--out", required=True, help="run record output path")
    p.add_argument("--store", default=None,
                   help=f"also persist into this run store (or ${STORE_ENV_VAR})")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="advlab",
        description="adversarial-robustness workbench: attacks, defenses, "
                    "neuron-frequency explainability",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fixture", help="generate the toy model and dataset files")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_fixture)

    p = sub.add_parser("attack", help="run an attack and write the run record")
    _add_attack_args(p)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("defend", help="evaluate a defense against an attack")
    _add_attack_args(p)
    p.add_argument("--defense", required=True,
                   choices=["adversarial_training", "dim_reduction_input",
                            "dim_reduction_embedding", "prediction_similarity"])
    p.add_argument("--mix-ratio", type=float, default=None)
    p.add_argument("--def-epochs", type=int, default=None)
    p.add_argument("--def-lr", type=float, default=None)
    p.add_argument("--def-batch-size", type=int, default=None)
    p.add_argument("--latent-dim", type=int, default=None)
    p.add_argument("--window-capacity", type=int, default=None)
    p.add_argument("--similarity-threshold", type=float, default=None)
    p.add_argument("--risk-threshold", type=float, default=None)
    p.set_defaults(func=cmd_defend)

    p = sub.add_parser("explain", help="dump frequency table and top-k for a class pair")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--layer", type=int, default=None)
    p.add_argument("--tau", type=float, default=0.0)
    p.add_argument("--class-a", required=True, type=int)
    p.add_argument("--class-b", required=True, type=int)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("export", help="re-export a model or dataset file canonically")
    p.add_argument("--model", default=None)
    p.add_argument("--data", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("serve", help="start the REST API")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--store", default=None,
                   help=f"run store directory (or ${STORE_ENV_VAR}; default ./runs)")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FileFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
