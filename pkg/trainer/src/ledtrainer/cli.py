"""CLI: ledtrainer train | predict | experiment."""

from __future__ import annotations

import argparse
import json
import sys

from .config import TrainConfig
from .experiments import PROTOCOLS, run_experiment
from .predict import predict
from .train import train


def _add_config_args(p):
    p.add_argument("--input-size", type=int, default=96)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--epochs", type=int, default=25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lambda1", type=float, default=1.0)
    p.add_argument("--lambda2", type=float, default=1.0)


def _config_from(args) -> TrainConfig:
    return TrainConfig(input_size=args.input_size, batch_size=args.batch_size,
                       learning_rate=args.lr, epochs=args.epochs,
                       seed=args.seed, lambda1=args.lambda1,
                       lambda2=args.lambda2)


def _build_parser():
    p = argparse.ArgumentParser(prog="ledtrainer",
                                description="Toy depth regressor for headlight datasets")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train one model")
    t.add_argument("--manifest", required=True)
    t.add_argument("--out", required=True)
    t.add_argument("--illumination", default="led")
    t.add_argument("--fraction", type=float)
    _add_config_args(t)

    pr = sub.add_parser("predict", help="write test-split prediction PFMs")
    pr.add_argument("--checkpoint", required=True)
    pr.add_argument("--manifest", required=True)
    pr.add_argument("--out", required=True)
    pr.add_argument("--split", default="test")
    pr.add_argument("--illumination", default="led")

    e = sub.add_parser("experiment", help="run a full protocol")
    e.add_argument("--protocol", required=True, choices=PROTOCOLS)
    e.add_argument("--manifest", action="append", required=True,
                   help="manifest path; repeat as label=path for cell_size")
    e.add_argument("--out", required=True)
    e.add_argument("--mask", default="roi", choices=["roi", "outside", "full"])
    _add_config_args(e)
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "train":
        ckpt = train(args.manifest, _config_from(args), args.out,
                     illumination=args.illumination, fraction=args.fraction)
        print(f"wrote {ckpt}")
    elif args.command == "predict":
        out = predict(args.checkpoint, args.manifest, args.out,
                      split=args.split, illumination=args.illumination)
        print(f"wrote predictions to {out}")
    elif args.command == "experiment":
        if args.protocol == "cell_size":
            manifests = dict(m.split("=", 1) for m in args.manifest)
        else:
            if len(args.manifest) != 1:
                print("error: this protocol takes exactly one --manifest",
                      file=sys.stderr)
                return 2
            manifests = args.manifest[0]
        table = run_experiment(args.protocol, manifests, _config_from(args),
                               args.out, mask=args.mask)
        print(json.dumps({"protocol": table["protocol"],
                          "rows": len(table["rows"]), "out": args.out}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
