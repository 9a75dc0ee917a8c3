"""SALT language front end.

SALT describes a finite state transducer as one transition per line:

    <from-state> ?<kind>/<word>[,args]  [!<kind>/<word>[,args] ...]  <to-state>

Kinds are ``e`` (external, exchanged between objects), ``l`` (logical,
variable tests and assignments) and ``h`` (hardware, sensing/actuating
words). ``?.`` is the empty input: the transition fires as soon as its
state is reached. Lines starting with ``#`` and blank lines are ignored.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

MAX_RULES = 50
MAX_DATA_LEN = 6  # message arguments, variable names and values
MAX_NAME_LEN = 24  # state names and external/hardware words

SET_OPS = ("=", "+=", "-=", "*=", "/=")
TEST_OPS = ("==", "!=", "<", ">", "<=", ">=")
LOGICAL_OPS = SET_OPS + TEST_OPS

EPSILON_TOKEN = "?."

_NAME_RE = re.compile(r"[A-Za-z0-9_]+\Z")
_ARG_RE = re.compile(r"[A-Za-z0-9_$-]+\Z")
_MSG_RE = re.compile(r"[?!]([elh])/(.*)\Z")
_PAREN_RE = re.compile(r"([^(),]+)\(([^()]*)\)\Z")


class MessageKind(Enum):
    EXTERNAL = "e"
    LOGICAL = "l"
    HARDWARE = "h"


class ParseError(Exception):
    """Raised for malformed SALT text; carries a 1-based source position."""

    def __init__(self, reason: str, line: int = 1, col: int = 1):
        super().__init__(f"line {line}, col {col}: {reason}")
        self.reason = reason
        self.line = line
        self.col = col


class UnknownFeatureError(Exception):
    pass


def _check_message(kind: MessageKind, word: str, args: tuple[str, ...]) -> str | None:
    """Return a description of the first invariant violation, or None."""
    if not word:
        return "empty message word"
    if kind is MessageKind.LOGICAL:
        if word not in LOGICAL_OPS:
            return f"unknown logical operator '{word}'"
        if len(args) != 2:
            return f"logical message '{word}' needs exactly 2 arguments, got {len(args)}"
    else:
        if not _NAME_RE.match(word):
            return f"invalid word '{word}' (letters, digits and _ only)"
        if len(word) > MAX_NAME_LEN:
            return f"word '{word}' longer than {MAX_NAME_LEN} characters"
    for a in args:
        if not a:
            return "empty argument"
        if not _ARG_RE.match(a):
            return f"invalid argument '{a}'"
        if len(a) > MAX_DATA_LEN:
            return f"argument '{a}' longer than {MAX_DATA_LEN} characters"
    return None


def _check_state(name: str) -> str | None:
    if not _NAME_RE.match(name):
        return f"invalid state name '{name}'"
    if len(name) > MAX_NAME_LEN:
        return f"state name '{name}' longer than {MAX_NAME_LEN} characters"
    return None


@dataclass(frozen=True)
class Message:
    """One typed stimulus or output: kind + word + argument list."""

    kind: MessageKind
    word: str
    args: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        problem = _check_message(self.kind, self.word, self.args)
        if problem:
            raise ValueError(problem)

    @property
    def is_set_op(self) -> bool:
        return self.kind is MessageKind.LOGICAL and self.word in SET_OPS

    @property
    def is_test_op(self) -> bool:
        return self.kind is MessageKind.LOGICAL and self.word in TEST_OPS

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "word": self.word, "args": list(self.args)}

    @classmethod
    def from_dict(cls, d: dict) -> "Message":
        return cls(MessageKind(d["kind"]), d["word"], tuple(d.get("args") or ()))


@dataclass(frozen=True)
class Transition:
    """One rule: input ``None`` means the empty (epsilon) message."""

    from_state: str
    input: Message | None
    outputs: tuple[Message, ...]
    to_state: str
    line: int = field(default=0, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "outputs", tuple(self.outputs))
        for name in (self.from_state, self.to_state):
            problem = _check_state(name)
            if problem:
                raise ValueError(problem)
        if self.input is not None and self.input.is_set_op:
            raise ValueError(f"set operator '{self.input.word}' cannot be an input")
        for out in self.outputs:
            if out.is_test_op:
                raise ValueError(f"test operator '{out.word}' cannot be an output")


@dataclass(frozen=True)
class Transducer:
    transitions: tuple[Transition, ...]

    def __post_init__(self):
        object.__setattr__(self, "transitions", tuple(self.transitions))
        if not self.transitions:
            raise ValueError("a transducer needs at least one transition")
        if len(self.transitions) > MAX_RULES:
            raise ValueError(f"more than {MAX_RULES} transitions")

    @property
    def initial(self) -> str:
        return self.transitions[0].from_state

    @property
    def states(self) -> frozenset[str]:
        names = set()
        for t in self.transitions:
            names.add(t.from_state)
            names.add(t.to_state)
        return frozenset(names)

    def transitions_from(self, state: str) -> list[Transition]:
        return [t for t in self.transitions if t.from_state == state]


def _split_body(body: str, line: int, col: int) -> tuple[str, list[str]]:
    if "(" in body or ")" in body:
        m = _PAREN_RE.match(body)
        if not m:
            raise ParseError(f"malformed message '{body}'", line, col)
        word, argstr = m.group(1), m.group(2)
        args = argstr.split(",") if argstr else []
    else:
        parts = body.split(",")
        word, args = parts[0], parts[1:]
    return word, args


def _parse_message(token: str, line: int, col: int, is_input: bool) -> Message | None:
    if is_input and token == EPSILON_TOKEN:
        return None
    if token.startswith("!."):
        raise ParseError("the empty message '?.' is only valid as input", line, col)
    m = _MSG_RE.match(token)
    if not m:
        raise ParseError(
            f"malformed message '{token}' (expected {'?' if is_input else '!'}e|l|h/word)",
            line,
            col,
        )
    kind = MessageKind(m.group(1))
    word, args = _split_body(m.group(2), line, col)
    problem = _check_message(kind, word, tuple(args))
    if problem:
        raise ParseError(problem, line, col)
    if kind is MessageKind.LOGICAL:
        if is_input and word in SET_OPS:
            raise ParseError(f"set operator '{word}' cannot be used as input", line, col)
        if not is_input and word in TEST_OPS:
            raise ParseError(f"test operator '{word}' cannot be used as output", line, col)
    return Message(kind, word, tuple(args))


def parse_transducer(source: str) -> Transducer:
    """Parse SALT text into a Transducer, preserving transition order.

    Raises ParseError with the offending line/column for malformed input,
    for programs with more than 50 transitions and for empty programs.
    """
    transitions: list[Transition] = []
    for lineno, raw in enumerate(source.splitlines(), 1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        toks = [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", raw)]
        col0 = toks[0][0]
        if len(transitions) >= MAX_RULES:
            raise ParseError(f"more than {MAX_RULES} transitions", lineno, col0)
        if len(toks) < 3:
            raise ParseError("transition needs <from> <input> ... <to>", lineno, col0)

        col, from_tok = toks[0]
        problem = _check_state(from_tok)
        if problem:
            raise ParseError(problem, lineno, col)

        col, input_tok = toks[1]
        if not input_tok.startswith("?"):
            raise ParseError(f"expected input message, found '{input_tok}'", lineno, col)
        inp = _parse_message(input_tok, lineno, col, is_input=True)

        outputs = []
        for col, tok in toks[2:-1]:
            if not tok.startswith("!"):
                raise ParseError(f"expected output message, found '{tok}'", lineno, col)
            outputs.append(_parse_message(tok, lineno, col, is_input=False))

        col, to_tok = toks[-1]
        if to_tok.startswith(("?", "!")):
            raise ParseError(f"expected target state, found '{to_tok}'", lineno, col)
        problem = _check_state(to_tok)
        if problem:
            raise ParseError(problem, lineno, col)

        transitions.append(Transition(from_tok, inp, tuple(outputs), to_tok, line=lineno))

    if not transitions:
        raise ParseError("empty program")
    return Transducer(tuple(transitions))


def _format_message(msg: Message, prefix: str) -> str:
    if msg.kind is MessageKind.LOGICAL:
        body = f"{msg.word}({msg.args[0]},{msg.args[1]})"
    elif msg.args:
        body = msg.word + "," + ",".join(msg.args)
    else:
        body = msg.word
    return f"{prefix}{msg.kind.value}/{body}"


def print_transducer(t: Transducer) -> str:
    """Canonical one-transition-per-line text; re-parses to an equal value."""
    lines = []
    for tr in t.transitions:
        parts = [tr.from_state]
        parts.append(EPSILON_TOKEN if tr.input is None else _format_message(tr.input, "?"))
        parts.extend(_format_message(out, "!") for out in tr.outputs)
        parts.append(tr.to_state)
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Feature:
    """Hardware abstraction entry: the words a feature senses/actuates."""

    name: str
    sensing: dict[str, int]  # word -> arity
    actuating: dict[str, int]


# Word lists offered by the hardware abstraction layer. ``timer`` is the
# virtual feature: actuating starts a countdown, sensing fires on expiry.
DEFAULT_CATALOG: dict[str, Feature] = {
    "button": Feature("button", {"push": 0}, {}),
    "acceleration": Feature("acceleration", {"accelerationChanged": 3}, {}),
    "gps": Feature("gps", {"positionChanged": 3}, {}),
    "light": Feature("light", {"lightChanged": 1}, {}),
    "led": Feature("led", {}, {"led": 1}),
    "notification": Feature("notification", {}, {"notify": 1}),
    "sms": Feature("sms", {}, {"sms": 2}),
    "timer": Feature("timer", {"timeout": 0}, {"timer": 1}),
}

FeatureCatalog = dict


@dataclass(frozen=True)
class ValidationIssue:
    severity: str  # "error" | "warning"
    message: str
    line: int = 0
    word: str | None = None

    def to_dict(self) -> dict:
        return {
            "severity": self.severity,
            "message": self.message,
            "line": self.line,
            "word": self.word,
        }


def validate_against_features(
    t: Transducer,
    features: list[str] | tuple[str, ...],
    catalog: dict[str, Feature] = DEFAULT_CATALOG,
) -> list[ValidationIssue]:
    """Check that a program only uses hardware words its object supports.

    Error-severity issues: hardware input word outside the declared sensing
    words, hardware output word outside the actuating words, and explicit
    argument-count mismatches. Unreachable states are warnings. Missing
    transition coverage is legal (partial automata).
    """
    sensing: dict[str, int] = {}
    actuating: dict[str, int] = {}
    for name in features:
        feat = catalog.get(name)
        if feat is None:
            raise UnknownFeatureError(f"feature '{name}' is not in the catalog")
        sensing.update(feat.sensing)
        actuating.update(feat.actuating)

    issues: list[ValidationIssue] = []
    for tr in t.transitions:
        inp = tr.input
        if inp is not None and inp.kind is MessageKind.HARDWARE:
            if inp.word not in sensing:
                issues.append(ValidationIssue(
                    "error",
                    f"sensing word '{inp.word}' is not provided by features {list(features)}",
                    tr.line, inp.word))
            elif inp.args and len(inp.args) != sensing[inp.word]:
                issues.append(ValidationIssue(
                    "error",
                    f"sensing word '{inp.word}' takes {sensing[inp.word]} argument(s), got {len(inp.args)}",
                    tr.line, inp.word))
        for out in tr.outputs:
            if out.kind is not MessageKind.HARDWARE:
                continue
            if out.word not in actuating:
                issues.append(ValidationIssue(
                    "error",
                    f"actuating word '{out.word}' is not provided by features {list(features)}",
                    tr.line, out.word))
            elif len(out.args) != actuating[out.word]:
                issues.append(ValidationIssue(
                    "error",
                    f"actuating word '{out.word}' takes {actuating[out.word]} argument(s), got {len(out.args)}",
                    tr.line, out.word))

    reachable = {t.initial}
    grew = True
    while grew:
        grew = False
        for tr in t.transitions:
            if tr.from_state in reachable and tr.to_state not in reachable:
                reachable.add(tr.to_state)
                grew = True
    for state in sorted(t.states - reachable):
        first = next((tr.line for tr in t.transitions if tr.from_state == state), 0)
        issues.append(ValidationIssue(
            "warning", f"state '{state}' is unreachable from '{t.initial}'", first))
    return issues
