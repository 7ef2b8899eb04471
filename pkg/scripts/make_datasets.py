#!/usr/bin/env python3
"""Generate the full corpus family into one directory.

Writes the decimal-literal lines, the mixed numbers-and-ops lines, and
staged question records, then optionally mixes the questions with an
external instruction dataset at a chosen fraction. Counts follow the
reference sizes by default and everything is reproducible from the seed.
"""

import argparse
import json
from pathlib import Path

from gatecalc.datagen import (
    GenConfig,
    Stage,
    gen_arith_qa,
    gen_dot_place,
    gen_numbers_ops,
    mix_datasets,
    read_records,
    write_jsonl,
    write_lines,
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="data", help="output directory")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--dot-place-count", type=int, default=100)
    parser.add_argument("--numbers-ops-count", type=int, default=500)
    parser.add_argument("--qa-easy-count", type=int, default=600)
    parser.add_argument("--qa-priority-count", type=int, default=400)
    parser.add_argument("--other", default=None,
                        help="instruction records (JSONL or JSON array) to mix with")
    parser.add_argument("--fraction", type=float, default=0.6,
                        help="arithmetic share of the mixed file")
    args = parser.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    dot = gen_dot_place(args.dot_place_count, args.seed)
    write_lines(out_dir / "dot_place.txt", dot)
    print(f"dot_place.txt: {len(dot)} lines")

    ops = gen_numbers_ops(args.numbers_ops_count, args.seed)
    write_lines(out_dir / "numbers_ops.txt", ops)
    print(f"numbers_ops.txt: {len(ops)} lines")

    easy = gen_arith_qa(GenConfig(count=args.qa_easy_count, seed=args.seed,
                                  stage=Stage.EASY))
    priority = gen_arith_qa(GenConfig(count=args.qa_priority_count, seed=args.seed + 1,
                                      stage=Stage.PRIORITY))
    qa = easy + priority
    write_jsonl(out_dir / "arith_qa.jsonl", qa)
    print(f"arith_qa.jsonl: {len(qa)} records "
          f"({len(easy)} easy + {len(priority)} priority)")
    print("sample record:", json.dumps(qa[0].to_dict()))

    if args.other:
        other = read_records(args.other)
        mixed = mix_datasets([r.to_dict() for r in qa], other, args.fraction, args.seed)
        write_jsonl(out_dir / "mixed.jsonl", mixed)
        n_arith = sum(1 for r in mixed if "swift_express" in r)
        print(f"mixed.jsonl: {len(mixed)} records, {n_arith} arithmetic "
              f"(fraction {n_arith / len(mixed):.2f})")
    else:
        print("no --other file given, skipping the mixed set")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
