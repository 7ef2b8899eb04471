"""End-to-end wiring: question in, answer out.

A predictor looks at the prompt and either declines, leaving the prompt
for the responder as-is, or produces a postfix expression. The
expression runs through conversion and reduction, and the rendered
result is appended to the prompt as a fixed-length terminated segment.
The responder then answers from the augmented prompt. Reference
implementations of both seams live here; anything with the same call
shape plugs in.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .conversion import DEFAULT_CAPACITY, ConversionError, convert
from .evaluator import EvalError, EvalTrace, evaluate_with_trace
from .gates import GatePolicy, rule_gates
from .infix import ParseError, parse_infix, to_postfix
from .render import NonFinite, render
from .tokenizer import TERMINATOR_CHAR, encode

DEFAULT_DRAFT_LEN = 32
DEFAULT_INJECT_LEN = 16

Predictor = Callable[[str], "PredictorOutput"]
Responder = Callable[[str], str]


class PayloadTooLong(ValueError):
    pass


@dataclass(frozen=True)
class PredictorOutput:
    """Expression head output: an enable flag, the expression, and the raw
    decoded text the flag and expression were carved from."""

    enable: int
    expression: str
    raw: str


@dataclass(frozen=True)
class InjectionSegment:
    payload: str
    text: str


@dataclass
class PipelineConfig:
    draft_len: int = DEFAULT_DRAFT_LEN
    inject_len: int = DEFAULT_INJECT_LEN
    capacity: int = DEFAULT_CAPACITY
    policy: GatePolicy = field(default=rule_gates)


@dataclass
class PipelineResult:
    answer: str
    injected: bool
    expression: str
    trace: EvalTrace | None = None
    diagnostic: str | None = None

    def to_json_dict(self) -> dict:
        out = {
            "answer": self.answer,
            "injected": self.injected,
            "expression": self.expression,
            "trace": self.trace.to_json_dict() if self.trace else None,
        }
        if self.diagnostic is not None:
            out["diagnostic"] = self.diagnostic
        return out


def reference_predictor(question: str, draft_len: int = DEFAULT_DRAFT_LEN) -> PredictorOutput:
    """Deterministic stand-in for a trained expression head.

    A prompt that parses as an infix question enables the machine and
    carries its postfix translation after a fixed draft pad; anything
    else disables it. The raw field mimics the decoded output layout:
    one enable character, draft_len blanks, then the expression.
    """
    try:
        ast = parse_infix(question)
    except ParseError:
        return PredictorOutput(0, "", "0" + " " * draft_len)
    expression = to_postfix(ast)
    return PredictorOutput(1, expression, "1" + " " * draft_len + expression)


def make_segment(result: float, inject_len: int = DEFAULT_INJECT_LEN) -> InjectionSegment:
    """Fixed-length segment: rendered payload, one terminator, space padding."""
    payload = render(result)
    if len(payload) + 1 > inject_len:
        raise PayloadTooLong(
            f"payload {payload!r} does not fit a segment of length {inject_len}"
        )
    text = payload + TERMINATOR_CHAR + " " * (inject_len - len(payload) - 1)
    return InjectionSegment(payload=payload, text=text)


def inject(prompt: str, result: float, inject_len: int = DEFAULT_INJECT_LEN) -> str:
    return prompt + make_segment(result, inject_len).text


def extract_segment_payload(prompt: str, inject_len: int = DEFAULT_INJECT_LEN) -> str | None:
    """Payload of a trailing injected segment, or None if the tail is not one."""
    if len(prompt) < inject_len:
        return None
    tail = prompt[-inject_len:]
    payload, terminator, pad = tail.partition(TERMINATOR_CHAR)
    if terminator != TERMINATOR_CHAR:
        return None
    if not payload or " " in payload or TERMINATOR_CHAR in pad:
        return None
    if pad != " " * len(pad):
        return None
    return payload


def make_echo_responder(inject_len: int = DEFAULT_INJECT_LEN) -> Responder:
    """Reference responder: reads an injected answer back when one is
    present, otherwise echoes the prompt byte for byte."""

    def respond(prompt: str) -> str:
        payload = extract_segment_payload(prompt, inject_len)
        return payload if payload is not None else prompt

    return respond


def run(
    question: str,
    predictor: Predictor | None = None,
    responder: Responder | None = None,
    config: PipelineConfig | None = None,
) -> PipelineResult:
    """Full pass over one prompt.

    Arithmetic failures inside the machine (malformed expression,
    division by zero, an unrepresentable result) never escape: the
    prompt falls through to the responder untouched and the failure is
    reported in the diagnostic field.
    """
    config = config or PipelineConfig()
    if predictor is None:
        predictor = lambda q: reference_predictor(q, config.draft_len)
    if responder is None:
        responder = make_echo_responder(config.inject_len)

    predicted = predictor(question)
    if not predicted.enable:
        return PipelineResult(
            answer=responder(question), injected=False, expression=predicted.expression
        )
    try:
        program = convert(encode(predicted.expression), config.policy, config.capacity)
        trace = evaluate_with_trace(program)
        prompt = inject(question, trace.final, config.inject_len)
    except (ConversionError, EvalError, NonFinite, PayloadTooLong) as exc:
        return PipelineResult(
            answer=responder(question),
            injected=False,
            expression=predicted.expression,
            diagnostic=f"{type(exc).__name__}: {exc}",
        )
    return PipelineResult(
        answer=responder(prompt),
        injected=True,
        expression=predicted.expression,
        trace=trace,
    )
