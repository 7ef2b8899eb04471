"""Corpus generators for gate training and the question pipeline.

Three corpus families, in roughly the order the gates meet them. Dot
place lines are five-digit numbers with the decimal dot cycling through
the interior positions, which isolates the decimal machinery. Numbers
and ops lines mix literals, operator characters, junk characters, and
terminators so every (token, decimal flag) case the gates can face shows
up in training. Question records pair an infix question with its answer
and the postfix expression that computes it, in the flat JSON shape a
fine-tuning set expects.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .conversion import convert
from .evaluator import evaluate
from .gates import rule_gates
from .infix import parse_infix, to_postfix
from .render import render
from .tokenizer import encode

INSTRUCTION_TEXT = "Please caculate this."

_OP_CHARS = "+-*/"
_JUNK_CHARS = "abcxyz#?"


class EmptyInput(ValueError):
    pass


class Stage(str, Enum):
    EASY = "easy"
    PRIORITY = "priority"


_STAGE_OPS = {Stage.EASY: (1, 2), Stage.PRIORITY: (2, 4)}


@dataclass
class GenConfig:
    count: int
    seed: int = 0
    stage: Stage = Stage.EASY
    max_value: float = 100.0
    max_decimals: int = 2
    ops_min: int | None = None
    ops_max: int | None = None

    def ops_range(self) -> tuple[int, int]:
        lo, hi = _STAGE_OPS[self.stage]
        if self.ops_min is not None:
            lo = self.ops_min
        if self.ops_max is not None:
            hi = self.ops_max
        if not 1 <= lo <= hi:
            raise ValueError(f"bad operator count range [{lo}, {hi}]")
        return lo, hi


@dataclass
class QARecord:
    instruction: str
    input: str
    output: str
    swift_express: str

    def to_dict(self) -> dict:
        return {
            "instruction": self.instruction,
            "input": self.input,
            "output": self.output,
            "swift_express": self.swift_express,
        }


# ---------------------------------------------------------------------------
# Dot place


def dot_place_line(digits: str, dot_pos: int) -> str:
    """Insert a decimal dot at an interior position of a digit string."""
    if not digits.isdigit():
        raise ValueError(f"not a digit string: {digits!r}")
    if not 1 <= dot_pos <= len(digits) - 1:
        raise ValueError(f"dot position {dot_pos} not interior to {digits!r}")
    return digits[:dot_pos] + "." + digits[dot_pos:]


def gen_dot_place(count: int, seed: int = 0) -> list[str]:
    """Five-digit decimal literals, the dot cycling through positions 1 to 4."""
    rng = random.Random(seed)
    lines = []
    for i in range(count):
        digits = str(rng.randint(1, 9)) + "".join(
            str(rng.randint(0, 9)) for _ in range(4)
        )
        lines.append(dot_place_line(digits, 1 + i % 4))
    return lines


# ---------------------------------------------------------------------------
# Numbers and ops


def _mixed_literal(rng: random.Random) -> str:
    if rng.random() < 0.5:
        return str(rng.randint(0, 999))
    whole = rng.randint(0, 99)
    frac = "".join(str(rng.randint(0, 9)) for _ in range(rng.randint(1, 4)))
    return f"{whole}.{frac}"


def gen_numbers_ops(count: int, seed: int = 0) -> list[str]:
    """Free-form lines of literals and operator characters for gate training.

    The line structure cycles deterministically so coverage does not
    depend on luck: every tenth line is operator-only, every seventh
    carries junk characters for the ignore gate, every ninth ends in a
    terminator, and operators occasionally glue straight onto a number.
    Every line converts cleanly under the reference policy.
    """
    rng = random.Random(seed)
    lines = []
    for i in range(count):
        if i % 10 == 3:
            line = " ".join(rng.choice(_OP_CHARS) for _ in range(rng.randint(2, 5)))
        else:
            parts = []
            for _ in range(rng.randint(2, 6)):
                if rng.random() < 0.35:
                    parts.append(rng.choice(_OP_CHARS))
                else:
                    parts.append(_mixed_literal(rng))
            line = parts[0]
            for part in parts[1:]:
                glue = part in _OP_CHARS and rng.random() < 0.2
                line += part if glue else " " + part
        if i % 7 == 5:
            for _ in range(rng.randint(1, 2)):
                j = rng.randrange(len(line) + 1)
                line = line[:j] + rng.choice(_JUNK_CHARS) + line[j:]
        if i % 9 == 2:
            line += "$"
        lines.append(line)
    return lines


# ---------------------------------------------------------------------------
# Question records


def qa_record(question: str) -> QARecord:
    """One record from question text, deriving the postfix and the answer.

    The answer comes from the machine itself, converting and reducing
    the postfix expression, so every record is self-consistent by
    construction.
    """
    ast = parse_infix(question)
    swift = to_postfix(ast)
    output = render(evaluate(convert(encode(swift), rule_gates)))
    return QARecord(INSTRUCTION_TEXT, question, output, swift)


def _qa_literal(config: GenConfig, rng: random.Random, nonzero: bool = False) -> str:
    scale = 10 ** rng.randint(0, config.max_decimals)
    while True:
        value = rng.randrange(0, int(round(config.max_value * scale))) / scale
        if not nonzero or value != 0.0:
            return render(value)


def _qa_question(config: GenConfig, rng: random.Random) -> str:
    lo, hi = config.ops_range()
    n_ops = rng.randint(lo, hi)
    ops = [rng.choice(_OP_CHARS) for _ in range(n_ops)]
    if config.stage == Stage.PRIORITY and n_ops >= 2:
        # Force a low-precedence operator somewhere before a high one, so
        # the question only comes out right under real precedence rules.
        j = rng.randrange(1, n_ops)
        i = rng.randrange(0, j)
        ops[i] = rng.choice("+-")
        ops[j] = rng.choice("*/")
    text = _qa_literal(config, rng)
    for op in ops:
        text += f" {op} {_qa_literal(config, rng, nonzero=(op == '/'))}"
    return text + " = ?"


def gen_questions(config: GenConfig) -> list[str]:
    """Question texts alone, for driving the pipeline directly."""
    rng = random.Random(config.seed)
    return [_qa_question(config, rng) for _ in range(config.count)]


def gen_arith_qa(config: GenConfig) -> list[QARecord]:
    """Flat operator chains as question records, sized by the stage."""
    return [qa_record(question) for question in gen_questions(config)]


# ---------------------------------------------------------------------------
# Mixing


def mix_datasets(
    arith: Sequence[dict],
    other: Sequence[dict],
    arith_fraction: float,
    seed: int = 0,
) -> list[dict]:
    """Shuffled interleave of two record lists at a target fraction.

    Takes the largest total for which both sides can supply their share,
    then shuffles. Records pass through untouched.
    """
    if not 0.0 < arith_fraction < 1.0:
        raise ValueError(f"fraction must be strictly between 0 and 1, got {arith_fraction}")
    if not arith or not other:
        raise EmptyInput("both record lists must be non-empty")
    n_total = min(
        int(len(arith) / arith_fraction + 1e-9),
        int(len(other) / (1.0 - arith_fraction) + 1e-9),
    )
    n_arith = round(arith_fraction * n_total)
    n_other = n_total - n_arith
    mixed = [dict(r) for r in arith[:n_arith]] + [dict(r) for r in other[:n_other]]
    random.Random(seed).shuffle(mixed)
    return mixed


# ---------------------------------------------------------------------------
# Files


def write_lines(path: str | Path, lines: Iterable[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line + "\n")


def read_lines(path: str | Path) -> list[str]:
    return Path(path).read_text(encoding="utf-8").splitlines()


def write_jsonl(path: str | Path, records: Iterable[dict | QARecord]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            if isinstance(record, QARecord):
                record = record.to_dict()
            fh.write(json.dumps(record) + "\n")


def write_json_array(path: str | Path, records: Iterable[dict | QARecord]) -> None:
    rows = [r.to_dict() if isinstance(r, QARecord) else r for r in records]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(rows, indent=2) + "\n")


def read_records(path: str | Path) -> list[dict]:
    """Records from a JSONL file or a single JSON array file."""
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    if stripped.startswith("["):
        rows = json.loads(text)
        if not isinstance(rows, list):
            raise ValueError(f"{path}: expected a JSON array")
        return rows
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def load_training_lines(path: str | Path) -> list[str]:
    """Trainer input from a file: plain text lines, or the swift_express
    field when the file holds question records."""
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    if stripped.startswith("[") or stripped.startswith("{"):
        return [r["swift_express"] for r in read_records(path)]
    return text.splitlines()
