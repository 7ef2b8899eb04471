"""Command line surface. Every stage of the machine is reachable as a verb.

Success output is machine-parseable: a bare value, JSON, or loss lines.
Anticipated failures (parse errors, malformed programs, division by
zero, bad files) print one diagnostic line on stderr and exit 1; usage
errors exit 2 through the argument parser.
"""

from __future__ import annotations

import argparse
import json
import sys

from .conversion import ConversionError, convert
from .datagen import (
    EmptyInput,
    GenConfig,
    Stage,
    gen_arith_qa,
    gen_dot_place,
    gen_numbers_ops,
    load_training_lines,
    mix_datasets,
    read_records,
    write_json_array,
    write_jsonl,
    write_lines,
)
from .evaluator import EvalError, evaluate_with_trace
from .gates import (
    AGREEMENT_FIELDS,
    EmptyCorpus,
    TrainConfig,
    agreement_table,
    events_from_lines,
    load_params,
    make_learned_policy,
    rule_gates,
    save_params,
    train_gates,
)
from .infix import ParseError, parse_infix, to_postfix
from .pipeline import PayloadTooLong, PipelineConfig, run
from .render import NonFinite, render
from .tokenizer import encode

_ERRORS = (
    ConversionError,
    EvalError,
    ParseError,
    NonFinite,
    PayloadTooLong,
    EmptyCorpus,
    EmptyInput,
    OSError,
    json.JSONDecodeError,
    ValueError,
    KeyError,
)


def _policy_from_args(args: argparse.Namespace):
    gates_path = getattr(args, "gates", None)
    if gates_path:
        return make_learned_policy(load_params(gates_path))
    return rule_gates


def cmd_eval(args: argparse.Namespace) -> int:
    program = convert(encode(args.expression), _policy_from_args(args))
    trace = evaluate_with_trace(program)
    if args.trace:
        print(json.dumps({"result": render(trace.final), "trace": trace.to_json_dict()}))
    else:
        print(render(trace.final))
    return 0


def cmd_convert(args: argparse.Namespace) -> int:
    program = convert(encode(args.expression), _policy_from_args(args))
    print(json.dumps(program.to_json_dict()))
    return 0


def cmd_to_postfix(args: argparse.Namespace) -> int:
    print(to_postfix(parse_infix(args.expression)))
    return 0


def cmd_render(args: argparse.Namespace) -> int:
    try:
        value = float(args.value)
    except ValueError:
        raise ValueError(f"not a number: {args.value!r}") from None
    print(render(value))
    return 0


def cmd_gen(args: argparse.Namespace) -> int:
    if args.kind == "dot-place":
        lines = gen_dot_place(args.count, args.seed)
        write_lines(args.out, lines)
        written = len(lines)
    elif args.kind == "numbers-ops":
        lines = gen_numbers_ops(args.count, args.seed)
        write_lines(args.out, lines)
        written = len(lines)
    elif args.kind == "qa":
        records = gen_arith_qa(
            GenConfig(count=args.count, seed=args.seed, stage=Stage(args.stage))
        )
        if args.array:
            write_json_array(args.out, records)
        else:
            write_jsonl(args.out, records)
        written = len(records)
    else:
        mixed = mix_datasets(
            read_records(args.arith), read_records(args.other), args.fraction, args.seed
        )
        if args.array:
            write_json_array(args.out, mixed)
        else:
            write_jsonl(args.out, mixed)
        written = len(mixed)
    print(json.dumps({"written": written, "path": args.out}))
    return 0


def cmd_train_gates(args: argparse.Namespace) -> int:
    lines: list[str] = []
    for path in args.data:
        lines.extend(load_training_lines(path))
    events = events_from_lines(lines)
    config = TrainConfig(
        epoch_size=args.epoch_size,
        repeats=args.repeats,
        lr=args.lr,
        steps_max=args.steps_max,
        dot_weight=args.dot_weight,
        op_weight=args.op_weight,
        freeze=args.freeze,
    )
    params, trace = train_gates(events, config)
    save_params(params, args.out)
    for i, mean in enumerate(trace.epoch_mean):
        print(f"epoch {i} mean_loss {mean:.6f}")
    print(f"trained {len(trace.events)} steps, params written to {args.out}")
    return 0


def cmd_verify_gates(args: argparse.Namespace) -> int:
    rows = agreement_table(load_params(args.gates))
    header = ["token", "flag"] + list(AGREEMENT_FIELDS) + ["all"]
    print(" ".join(f"{h:>13}" for h in header))
    for row in rows:
        cells = [repr(row.char), str(row.decimal_started)]
        cells += ["ok" if row.matches[f] else "MISMATCH" for f in AGREEMENT_FIELDS]
        cells.append("ok" if row.ok else "MISMATCH")
        print(" ".join(f"{c:>13}" for c in cells))
    good = sum(1 for r in rows if r.ok)
    print(f"agreement {good}/{len(rows)}")
    return 0 if good == len(rows) else 1


def cmd_run(args: argparse.Namespace) -> int:
    config = PipelineConfig(
        draft_len=args.draft_len,
        inject_len=args.inject_len,
        policy=_policy_from_args(args),
    )
    result = run(args.question, config=config)
    print(json.dumps(result.to_json_dict()))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gatecalc",
        description="Character-gated arithmetic: convert, reduce, render, and serve.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("eval", help="evaluate a postfix expression")
    p.add_argument("expression")
    p.add_argument("--trace", action="store_true", help="emit reduction steps as JSON")
    p.add_argument("--gates", help="gate parameter file (default: rule policy)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("convert", help="convert text to a dense program")
    p.add_argument("expression")
    p.add_argument("--gates", help="gate parameter file (default: rule policy)")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("to-postfix", help="translate an infix question to postfix")
    p.add_argument("expression")
    p.set_defaults(func=cmd_to_postfix)

    p = sub.add_parser("render", help="render a float as answer text")
    p.add_argument("value")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("gen", help="generate corpora")
    gen_sub = p.add_subparsers(dest="kind", required=True)

    g = gen_sub.add_parser("dot-place", help="decimal literal lines")
    g.add_argument("--count", type=int, default=100)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    g = gen_sub.add_parser("numbers-ops", help="mixed literal and operator lines")
    g.add_argument("--count", type=int, default=500)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    g = gen_sub.add_parser("qa", help="question records with postfix expressions")
    g.add_argument("--count", type=int, default=1000)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--stage", choices=[s.value for s in Stage], default="easy")
    g.add_argument("--array", action="store_true", help="write one JSON array instead of JSONL")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    g = gen_sub.add_parser("mix", help="interleave two record files at a fraction")
    g.add_argument("--arith", required=True)
    g.add_argument("--other", required=True)
    g.add_argument("--fraction", type=float, default=0.6)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--array", action="store_true", help="write one JSON array instead of JSONL")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    p = sub.add_parser("train-gates", help="fit gate heads on corpus files")
    p.add_argument("--data", nargs="+", required=True,
                   help="text or record files; records contribute their postfix field")
    p.add_argument("--out", required=True)
    p.add_argument("--epoch-size", type=int, default=50)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--steps-max", type=int, default=None)
    p.add_argument("--dot-weight", type=float, default=5.0)
    p.add_argument("--op-weight", type=float, default=5.0)
    p.add_argument("--freeze", action="store_true",
                   help="record losses without updating parameters")
    p.set_defaults(func=cmd_train_gates)

    p = sub.add_parser("verify-gates", help="compare learned gates to the rule policy")
    p.add_argument("--gates", required=True)
    p.set_defaults(func=cmd_verify_gates)

    p = sub.add_parser("run", help="answer one prompt through the full pipeline")
    p.add_argument("question")
    p.add_argument("--gates", help="gate parameter file (default: rule policy)")
    p.add_argument("--draft-len", type=int, default=32)
    p.add_argument("--inject-len", type=int, default=16)
    p.set_defaults(func=cmd_run)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
