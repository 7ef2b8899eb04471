"""Gate policies for the conversion machine, and the trainer behind them.

Two interchangeable policies drive the converter. rule_gates is the
exact hand-written reference. The learned policy carries one small
linear head per gate over the one-hot token embedding; the decimal flag
joins the input only for the dense-mode head, the one gate whose answer
depends on it. Prediction always takes the argmax of a head's outputs,
ties breaking toward the lowest class.

Training is plain per-event gradient descent. The two-way gates use a
sigmoid unit per class with binary cross entropy; the wider heads use
softmax cross entropy. Supervision comes from replaying the reference
policy over corpus text, so the trainer needs nothing but lines of
characters. Events step through the corpus in small chunks, each chunk
repeated several times before the next one starts, which keeps early
material fresh while later material arrives. Decimal dots and operator
characters carry extra loss weight because a miss there corrupts a
whole number rather than one digit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .conversion import DenseOpMode, init_state, step
from .tokenizer import (
    DOT_ID,
    OP_ID_TO_OP,
    OTHER_ID,
    SPACE_ID,
    VOCAB_SIZE,
    Op,
    Token,
    encode,
    token_for_id,
)

FORMAT_VERSION = 1

# name, classes, input width
HEAD_SHAPES: tuple[tuple[str, int, int], ...] = (
    ("ignore", 2, VOCAB_SIZE),
    ("move", 2, VOCAB_SIZE),
    ("decimal", 2, VOCAB_SIZE),
    ("denseop", 4, VOCAB_SIZE + 1),
    ("digit", 10, VOCAB_SIZE),
    ("op", 5, VOCAB_SIZE),
)

BINARY_HEADS = ("ignore", "move", "decimal")


class EmptyCorpus(ValueError):
    pass


@dataclass(frozen=True)
class GateDecision:
    """Everything the conversion machine needs to know about one token."""

    ignore: int
    move: int
    decimal_start: int
    dense_mode: DenseOpMode
    digit: int
    op: Op


GatePolicy = Callable[[Token, int], GateDecision]

_QUIET = GateDecision(0, 0, 0, DenseOpMode.IGNORE, 0, Op.NONE)


def rule_gates(token: Token, decimal_started: int) -> GateDecision:
    """Reference decisions, a pure function of token id and the decimal flag."""
    if token.id == OTHER_ID:
        return GateDecision(1, 0, 0, DenseOpMode.IGNORE, 0, Op.NONE)
    if token.is_digit():
        mode = (
            DenseOpMode.BASE_MUL_ADD if decimal_started else DenseOpMode.TIMES_TEN_ADD
        )
        return GateDecision(0, 0, 0, mode, token.id, Op.NONE)
    if token.id == DOT_ID:
        return GateDecision(0, 0, 1, DenseOpMode.IGNORE, 0, Op.NONE)
    if token.id == SPACE_ID:
        return GateDecision(0, 1, 0, DenseOpMode.IGNORE, 0, Op.NONE)
    if token.is_op():
        return GateDecision(0, 1, 0, DenseOpMode.IGNORE, 0, OP_ID_TO_OP[token.id])
    # Terminator: every gate stays quiet, the machine stops on the token itself.
    return _QUIET


@dataclass
class GateParams:
    """One weight matrix and bias vector per gate head."""

    ignore_w: np.ndarray
    ignore_b: np.ndarray
    move_w: np.ndarray
    move_b: np.ndarray
    decimal_w: np.ndarray
    decimal_b: np.ndarray
    denseop_w: np.ndarray
    denseop_b: np.ndarray
    digit_w: np.ndarray
    digit_b: np.ndarray
    op_w: np.ndarray
    op_b: np.ndarray

    @classmethod
    def zeros(cls) -> "GateParams":
        kwargs = {}
        for name, n_out, n_in in HEAD_SHAPES:
            kwargs[f"{name}_w"] = np.zeros((n_out, n_in))
            kwargs[f"{name}_b"] = np.zeros(n_out)
        return cls(**kwargs)

    def clone(self) -> "GateParams":
        kwargs = {}
        for name, _, _ in HEAD_SHAPES:
            kwargs[f"{name}_w"] = getattr(self, f"{name}_w").copy()
            kwargs[f"{name}_b"] = getattr(self, f"{name}_b").copy()
        return GateParams(**kwargs)

    def head(self, name: str) -> tuple[np.ndarray, np.ndarray]:
        return getattr(self, f"{name}_w"), getattr(self, f"{name}_b")


def _head_input(name: str, token: Token, decimal_started: int) -> np.ndarray:
    x = token.onehot
    if name == "denseop":
        return np.concatenate([x, [float(decimal_started)]])
    return x


def _head_argmax(
    params: GateParams, name: str, token: Token, decimal_started: int
) -> int:
    w, b = params.head(name)
    z = w @ _head_input(name, token, decimal_started) + b
    return int(np.argmax(z))


def learned_gates(
    params: GateParams, token: Token, decimal_started: int
) -> GateDecision:
    """Argmax of every head. All-zero params answer class 0 everywhere."""
    return GateDecision(
        ignore=_head_argmax(params, "ignore", token, decimal_started),
        move=_head_argmax(params, "move", token, decimal_started),
        decimal_start=_head_argmax(params, "decimal", token, decimal_started),
        dense_mode=DenseOpMode(_head_argmax(params, "denseop", token, decimal_started)),
        digit=_head_argmax(params, "digit", token, decimal_started),
        op=Op(_head_argmax(params, "op", token, decimal_started)),
    )


def make_learned_policy(params: GateParams) -> GatePolicy:
    """Freeze params behind a policy callable.

    Decisions depend only on (token id, decimal flag), a domain of 36
    cases, so the whole table is computed once up front.
    """
    table = {
        (token_id, ds): learned_gates(params, token_for_id(token_id), ds)
        for token_id in range(VOCAB_SIZE)
        for ds in (0, 1)
    }

    def policy(token: Token, decimal_started: int) -> GateDecision:
        return table[(token.id, 1 if decimal_started else 0)]

    return policy


# ---------------------------------------------------------------------------
# Supervision


@dataclass(frozen=True)
class GateEvent:
    """One token in context: the decimal flag it arrived under plus the
    reference decision for it."""

    token: Token
    decimal_started: int
    target: GateDecision


def label_events(text: str) -> list[GateEvent]:
    """Replay the reference conversion over one line, recording every token.

    The decimal flag is captured before the token acts, which is exactly
    the context a policy sees. A terminator is recorded and then stops
    the replay, the same way it stops the converter.
    """
    stream = encode(text)
    state = init_state(max(1, len(stream) + 1))
    events: list[GateEvent] = []
    for token in stream:
        events.append(
            GateEvent(token, state.decimal_started, rule_gates(token, state.decimal_started))
        )
        if not step(state, token, rule_gates):
            break
    return events


def events_from_lines(lines: Iterable[str]) -> list[GateEvent]:
    events: list[GateEvent] = []
    for line in lines:
        events.extend(label_events(line))
    return events


# ---------------------------------------------------------------------------
# Training


@dataclass
class TrainConfig:
    epoch_size: int = 50
    repeats: int = 5
    lr: float = 0.1
    steps_max: int | None = None
    dot_weight: float = 5.0
    op_weight: float = 5.0
    freeze: bool = False


@dataclass(frozen=True)
class EventLoss:
    step: int
    token_id: int
    weight: float
    raw: float
    weighted: float


@dataclass
class LossTrace:
    events: list[EventLoss] = field(default_factory=list)
    epoch_mean: list[float] = field(default_factory=list)


def _event_weight(event: GateEvent, config: TrainConfig) -> float:
    if event.token.id == DOT_ID:
        return config.dot_weight
    if event.token.id in OP_ID_TO_OP:
        return config.op_weight
    return 1.0


def _event_targets(event: GateEvent) -> dict[str, int]:
    t = event.target
    return {
        "ignore": t.ignore,
        "move": t.move,
        "decimal": t.decimal_start,
        "denseop": int(t.dense_mode),
        "digit": t.digit,
        "op": int(t.op),
    }


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-z))


def _binary_loss_grad(z: np.ndarray, target: int) -> tuple[float, np.ndarray]:
    """Summed BCE over one sigmoid unit per class, stable for any logit."""
    y = np.zeros(len(z))
    y[target] = 1.0
    loss = float(np.sum(np.logaddexp(0.0, z) - y * z))
    return loss, _sigmoid(z) - y


def _softmax_loss_grad(z: np.ndarray, target: int) -> tuple[float, np.ndarray]:
    zmax = float(np.max(z))
    lse = zmax + float(np.log(np.sum(np.exp(z - zmax))))
    loss = lse - float(z[target])
    p = np.exp(z - lse)
    p[target] -= 1.0
    return loss, p


def event_loss(params: GateParams, event: GateEvent) -> float:
    """Unweighted loss of one event under current params, without updating."""
    total = 0.0
    targets = _event_targets(event)
    for name, _, _ in HEAD_SHAPES:
        w, b = params.head(name)
        x = _head_input(name, event.token, event.decimal_started)
        z = w @ x + b
        if name in BINARY_HEADS:
            loss, _ = _binary_loss_grad(z, targets[name])
        else:
            loss, _ = _softmax_loss_grad(z, targets[name])
        total += loss
    return total


def _train_step(
    params: GateParams, event: GateEvent, config: TrainConfig
) -> tuple[float, float]:
    """One gradient step over all heads. Returns (raw, weighted) loss."""
    weight = _event_weight(event, config)
    targets = _event_targets(event)
    raw = 0.0
    for name, _, _ in HEAD_SHAPES:
        w, b = params.head(name)
        x = _head_input(name, event.token, event.decimal_started)
        z = w @ x + b
        if name in BINARY_HEADS:
            loss, dz = _binary_loss_grad(z, targets[name])
        else:
            loss, dz = _softmax_loss_grad(z, targets[name])
        raw += loss
        if not config.freeze:
            w -= config.lr * weight * np.outer(dz, x)
            b -= config.lr * weight * dz
    return raw, weight * raw


def train_gates(
    events: Sequence[GateEvent],
    config: TrainConfig | None = None,
    init: GateParams | None = None,
) -> tuple[GateParams, LossTrace]:
    """Fit the gate heads to a labeled event stream.

    The stream is cut into chunks of epoch_size events; each chunk runs
    repeats times before the next chunk starts. The trace keeps one
    entry per gradient step plus the mean weighted loss of every chunk
    pass. With freeze set, losses are recorded but nothing updates,
    which is how a later corpus can be scored against frozen gates.
    """
    events = list(events)
    if not events:
        raise EmptyCorpus("no training events")
    config = config or TrainConfig()
    if config.epoch_size < 1:
        raise ValueError(f"epoch_size must be positive, got {config.epoch_size}")
    if config.repeats < 1:
        raise ValueError(f"repeats must be positive, got {config.repeats}")

    params = init.clone() if init is not None else GateParams.zeros()
    trace = LossTrace()
    step_idx = 0
    budget_spent = False

    for start in range(0, len(events), config.epoch_size):
        chunk = events[start : start + config.epoch_size]
        for _ in range(config.repeats):
            pass_losses: list[float] = []
            for event in chunk:
                if config.steps_max is not None and step_idx >= config.steps_max:
                    budget_spent = True
                    break
                raw, weighted = _train_step(params, event, config)
                trace.events.append(
                    EventLoss(step_idx, event.token.id, _event_weight(event, config), raw, weighted)
                )
                pass_losses.append(weighted)
                step_idx += 1
            if pass_losses:
                trace.epoch_mean.append(sum(pass_losses) / len(pass_losses))
            if budget_spent:
                break
        if budget_spent:
            break
    return params, trace


# ---------------------------------------------------------------------------
# Agreement with the reference


AGREEMENT_FIELDS = ("ignore", "move", "decimal_start", "dense_mode", "digit", "op")


@dataclass(frozen=True)
class AgreementRow:
    token_id: int
    char: str
    decimal_started: int
    matches: dict[str, bool]
    ok: bool


def agreement_table(params: GateParams) -> list[AgreementRow]:
    """Learned versus reference decisions across all 36 (token, flag) cases."""
    policy = make_learned_policy(params)
    rows: list[AgreementRow] = []
    for token_id in range(VOCAB_SIZE):
        token = token_for_id(token_id)
        for ds in (0, 1):
            want = rule_gates(token, ds)
            got = policy(token, ds)
            matches = {
                f: getattr(want, f) == getattr(got, f) for f in AGREEMENT_FIELDS
            }
            rows.append(
                AgreementRow(token_id, token.char, ds, matches, all(matches.values()))
            )
    return rows


def full_agreement(params: GateParams) -> bool:
    return all(row.ok for row in agreement_table(params))


# ---------------------------------------------------------------------------
# Serialization


def save_params(params: GateParams, path: str | Path) -> None:
    """Flat JSON, arrays as nested lists. Round trips bit exactly."""
    payload: dict = {"format_version": FORMAT_VERSION}
    for name, _, _ in HEAD_SHAPES:
        w, b = params.head(name)
        payload[f"{name}_w"] = w.tolist()
        payload[f"{name}_b"] = b.tolist()
    Path(path).write_text(json.dumps(payload) + "\n", encoding="utf-8")


def load_params(path: str | Path) -> GateParams:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    version = payload.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported gate file version {version!r}")
    kwargs = {}
    for name, n_out, n_in in HEAD_SHAPES:
        w = np.asarray(payload[f"{name}_w"], dtype=float)
        b = np.asarray(payload[f"{name}_b"], dtype=float)
        if w.shape != (n_out, n_in) or b.shape != (n_out,):
            raise ValueError(f"head {name!r} has wrong shape {w.shape} / {b.shape}")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
            raise ValueError(f"head {name!r} contains non-finite values")
        kwargs[f"{name}_w"] = w
        kwargs[f"{name}_b"] = b
    return GateParams(**kwargs)
