"""Reduction machine for dense postfix programs.

Evaluation repeatedly rewrites the program in place of a stack: scan the
slots left to right, remember the last two live numbers, and at the
first live operator fold those two into one. Each reduction stores the
result in the later operand's slot and retires the earlier operand and
the operator. A well-formed program ends with exactly one live number.

stack_oracle is a deliberately independent textbook evaluator kept for
cross-checking; it shares nothing with the reduction path but the
operator arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass

from .conversion import DenseProgram, op_json_name
from .tokenizer import Op


class EvalError(Exception):
    """Base class for evaluation failures."""


class MalformedPostfix(EvalError):
    """The program is not a well-formed postfix expression."""


class DivisionByZero(EvalError):
    pass


@dataclass(frozen=True)
class ReductionStep:
    """One fold: slots index_a and index_b combined through the op at op_index."""

    index_a: int
    index_b: int
    op_index: int
    op: Op
    operands: tuple[float, float]
    result: float

    def to_json_dict(self) -> dict:
        return {
            "a": self.index_a,
            "b": self.index_b,
            "op_slot": self.op_index,
            "op": op_json_name(self.op),
            "operands": list(self.operands),
            "result": self.result,
        }


@dataclass
class EvalTrace:
    steps: list[ReductionStep]
    final: float

    def to_json_dict(self) -> dict:
        return {
            "steps": [s.to_json_dict() for s in self.steps],
            "final": self.final,
        }


def apply_op(op: Op, a: float, b: float) -> float:
    if op == Op.ADD:
        return a + b
    if op == Op.SUB:
        return a - b
    if op == Op.MUL:
        return a * b
    if op == Op.DIV:
        if b == 0.0:
            raise DivisionByZero(f"division of {a} by zero")
        return a / b
    raise MalformedPostfix(f"cannot apply op {op!r}")


def _find_reduction(program: DenseProgram) -> tuple[int, int, int]:
    """Indices (a, b, k): the two cached numbers and the first live operator."""
    a = None
    b = None
    for i in range(program.length):
        if not program.valid[i]:
            continue
        if program.ops[i] == Op.NONE:
            a, b = b, i
        else:
            if a is None or b is None:
                raise MalformedPostfix(
                    f"operator at slot {i} has fewer than two numbers before it"
                )
            return a, b, i
    raise MalformedPostfix("no live operator to reduce")


def _reduce_in_place(program: DenseProgram) -> ReductionStep:
    a, b, k = _find_reduction(program)
    op = program.ops[k]
    lhs = program.dense[a]
    rhs = program.dense[b]
    result = apply_op(op, lhs, rhs)
    program.dense[b] = result
    program.valid[a] = 0
    program.valid[k] = 0
    program.ops[k] = Op.NONE
    return ReductionStep(a, b, k, op, (lhs, rhs), result)


def reduce_once(program: DenseProgram) -> DenseProgram:
    """One reduction on a copy; the input program is never touched."""
    out = program.clone()
    _reduce_in_place(out)
    return out


def _has_live_op(program: DenseProgram) -> bool:
    return any(
        program.valid[i] and program.ops[i] != Op.NONE
        for i in range(program.length)
    )


def evaluate_with_trace(program: DenseProgram) -> EvalTrace:
    """Reduce to a single number, recording every fold along the way."""
    work = program.clone()
    steps: list[ReductionStep] = []
    while _has_live_op(work):
        steps.append(_reduce_in_place(work))
    survivors = [i for i in range(work.length) if work.valid[i]]
    if len(survivors) != 1:
        raise MalformedPostfix(
            f"{len(survivors)} numbers remain after all reductions, expected 1"
        )
    return EvalTrace(steps=steps, final=work.dense[survivors[0]])


def evaluate(program: DenseProgram) -> float:
    return evaluate_with_trace(program).final


def stack_oracle(program: DenseProgram) -> float:
    """Independent stack evaluation of the same program, for cross-checks."""
    stack: list[float] = []
    for i in range(program.length):
        if not program.valid[i]:
            continue
        if program.ops[i] == Op.NONE:
            stack.append(program.dense[i])
        else:
            if len(stack) < 2:
                raise MalformedPostfix(
                    f"operator at slot {i} underflows the stack"
                )
            b = stack.pop()
            a = stack.pop()
            stack.append(apply_op(program.ops[i], a, b))
    if len(stack) != 1:
        raise MalformedPostfix(
            f"{len(stack)} values remain on the stack, expected 1"
        )
    return stack[0]
