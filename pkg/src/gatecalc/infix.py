"""Infix question parsing and its bridges to postfix and back.

The grammar is deliberately small: non-negative decimal literals, the
four binary operators with the usual precedence and left associativity,
parentheses, and an optional trailing "= ?" that questions carry.
Unary minus does not exist; a leading dot does not start a number.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .evaluator import DivisionByZero, apply_op
from .render import render
from .tokenizer import CHAR_TO_OP, OP_TO_CHAR, Op


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class Number:
    value: float


@dataclass(frozen=True)
class BinOp:
    op: Op
    left: "InfixAst"
    right: "InfixAst"


InfixAst = Union[Number, BinOp]

_ANSWER_SUFFIX = re.compile(r"\s*=\s*\?\s*$")
_NUMBER = re.compile(r"[0-9]+(?:\.[0-9]*)?")

_PRECEDENCE = {Op.ADD: 1, Op.SUB: 1, Op.MUL: 2, Op.DIV: 2}


class _Parser:
    """Recursive descent over a question with the answer suffix removed."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.pos)

    def skip_spaces(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] == " ":
            self.pos += 1

    def peek(self) -> str:
        self.skip_spaces()
        if self.pos >= len(self.text):
            return ""
        return self.text[self.pos]

    def parse_expr(self) -> InfixAst:
        node = self.parse_term()
        while self.peek() in ("+", "-"):
            op = CHAR_TO_OP[self.text[self.pos]]
            self.pos += 1
            node = BinOp(op, node, self.parse_term())
        return node

    def parse_term(self) -> InfixAst:
        node = self.parse_factor()
        while self.peek() in ("*", "/"):
            op = CHAR_TO_OP[self.text[self.pos]]
            self.pos += 1
            node = BinOp(op, node, self.parse_factor())
        return node

    def parse_factor(self) -> InfixAst:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            node = self.parse_expr()
            if self.peek() != ")":
                raise self.error("expected ')'")
            self.pos += 1
            return node
        match = _NUMBER.match(self.text, self.pos)
        if not match:
            raise self.error("expected a number or '('")
        self.pos = match.end()
        return Number(float(match.group()))

    def expect_end(self) -> None:
        if self.peek() != "":
            raise self.error(f"unexpected {self.text[self.pos]!r}")


def parse_infix(text: str) -> InfixAst:
    """Parse a question like "3 + 5 * 2 = ?" into an expression tree."""
    source = _ANSWER_SUFFIX.sub("", text)
    parser = _Parser(source)
    ast = parser.parse_expr()
    parser.expect_end()
    return ast


def to_postfix(ast: InfixAst) -> str:
    """Space-separated postfix text, numbers rendered canonically."""
    parts: list[str] = []

    def walk(node: InfixAst) -> None:
        if isinstance(node, Number):
            parts.append(render(node.value))
        else:
            walk(node.left)
            walk(node.right)
            parts.append(OP_TO_CHAR[node.op])

    walk(ast)
    return " ".join(parts)


def to_infix(ast: InfixAst) -> str:
    """Expression text with the fewest parentheses that preserve the tree."""
    if isinstance(ast, Number):
        return render(ast.value)
    prec = _PRECEDENCE[ast.op]
    left = to_infix(ast.left)
    if isinstance(ast.left, BinOp) and _PRECEDENCE[ast.left.op] < prec:
        left = f"({left})"
    right = to_infix(ast.right)
    if isinstance(ast.right, BinOp) and _PRECEDENCE[ast.right.op] <= prec:
        right = f"({right})"
    return f"{left} {OP_TO_CHAR[ast.op]} {right}"


def eval_infix(ast: InfixAst) -> float:
    """Reference tree evaluation; raises DivisionByZero like the machine."""
    if isinstance(ast, Number):
        return ast.value
    return apply_op(ast.op, eval_infix(ast.left), eval_infix(ast.right))


__all__ = [
    "BinOp",
    "DivisionByZero",
    "InfixAst",
    "Number",
    "ParseError",
    "eval_infix",
    "parse_infix",
    "to_infix",
    "to_postfix",
]
