"""Deterministic execution engine for one transducer.

A VM consumes external/hardware stimuli, applies logical outputs to its
variable store, counts down timers, and reports everything it produced as
an Emission. After every stimulus the machine "settles": transitions with
an empty input or a true variable test keep firing (first match in
declaration order) until none is enabled.
"""

from __future__ import annotations

import re
from collections.abc import Mapping
from dataclasses import dataclass, field

from .salt import MAX_DATA_LEN, SET_OPS, TEST_OPS, Message, MessageKind, Transducer

CHAIN_BUDGET = 64  # settle firings allowed per stimulus delivery
INT_MIN = -99999  # 6 characters including the sign
INT_MAX = 999999

TIMER_WORD = "timer"
TIMEOUT_WORD = "timeout"

_INT_RE = re.compile(r"-?\d+\Z")


class VmError(Exception):
    pass


class ChainLimitExceeded(VmError):
    """The settle loop fired 64 times without quiescing: a logic loop."""


class VmArithmeticError(VmError):
    pass


class VmOverflowError(VmError):
    pass


def _as_int(token: str) -> int | None:
    return int(token) if _INT_RE.match(token) else None


def _read(name: str, vars: Mapping[str, str], bindings: Mapping[str, str] | None) -> str | None:
    if bindings is not None and name in bindings:
        return bindings[name]
    return vars.get(name)


def eval_logical_test(
    op: str,
    var: str,
    value: str,
    vars: Mapping[str, str],
    bindings: Mapping[str, str] | None = None,
) -> bool:
    """Total evaluation of a variable test.

    ``value`` may name another variable (resolved once). Equality compares
    as integers when both sides parse as integers, else as exact strings;
    ordering operators need both sides to be integers. An undefined ``var``
    makes every test false except ``!=``, which reports the variable as
    different from any defined value.
    """
    if op not in TEST_OPS:
        raise ValueError(f"'{op}' is not a test operator")
    left = _read(var, vars, bindings)
    right = _read(value, vars, bindings)
    if right is None:
        right = value
    if left is None:
        return op == "!="
    li, ri = _as_int(left), _as_int(right)
    if op in ("==", "!="):
        equal = li == ri if li is not None and ri is not None else left == right
        return equal if op == "==" else not equal
    if li is None or ri is None:
        return False
    if op == "<":
        return li < ri
    if op == ">":
        return li > ri
    if op == "<=":
        return li <= ri
    return li >= ri


def apply_logical_set(
    op: str,
    var: str,
    value: str,
    vars: dict[str, str],
    bindings: Mapping[str, str] | None = None,
) -> dict[str, str]:
    """Apply an assignment to the store, creating the variable for ``=``.

    Arithmetic requires integer operands within the 6-character range and
    divides toward zero. Returns the (mutated) store.
    """
    if op not in SET_OPS:
        raise ValueError(f"'{op}' is not a set operator")
    if len(var) > MAX_DATA_LEN:
        raise ValueError(f"variable name '{var}' longer than {MAX_DATA_LEN} characters")
    resolved = _read(value, vars, bindings)
    if resolved is None:
        resolved = value
    if op == "=":
        if len(resolved) > MAX_DATA_LEN:
            raise VmOverflowError(f"value '{resolved}' longer than {MAX_DATA_LEN} characters")
        vars[var] = resolved
        return vars
    left = vars.get(var)
    if left is None:
        raise VmArithmeticError(f"arithmetic on undefined variable '{var}'")
    li, ri = _as_int(left), _as_int(resolved)
    if li is None or ri is None:
        raise VmArithmeticError(f"non-integer operand in '{op}({var},{value})'")
    if op == "+=":
        result = li + ri
    elif op == "-=":
        result = li - ri
    elif op == "*=":
        result = li * ri
    else:
        if ri == 0:
            raise VmArithmeticError(f"division by zero in '/=({var},{value})'")
        result = -(-li // ri) if (li < 0) != (ri < 0) else li // ri  # truncate toward zero
    if not INT_MIN <= result <= INT_MAX:
        raise VmOverflowError(f"result {result} does not fit in {MAX_DATA_LEN} characters")
    vars[var] = str(result)
    return vars


@dataclass
class Emission:
    """Messages produced by one stimulus delivery, in execution order.

    External messages are destined for subscribers, hardware messages for
    the hardware layer; logical messages were already applied internally.
    """

    messages: list[Message] = field(default_factory=list)

    @property
    def to_subscribers(self) -> list[Message]:
        return [m for m in self.messages if m.kind is MessageKind.EXTERNAL]

    @property
    def to_hardware(self) -> list[Message]:
        return [m for m in self.messages if m.kind is MessageKind.HARDWARE]

    @property
    def internal(self) -> list[Message]:
        return [m for m in self.messages if m.kind is MessageKind.LOGICAL]

    def extend(self, other: "Emission") -> None:
        self.messages.extend(other.messages)

    def __bool__(self) -> bool:
        return bool(self.messages)


class VM:
    """One running transducer: current state, variables and timers.

    A VM instance is owned by one logical caller at a time; operations are
    synchronous and deterministic.
    """

    def __init__(self, program: Transducer):
        self.program = program
        self.current = program.initial
        self.vars: dict[str, str] = {}
        self._timers: list[list[int]] = []  # [id, remaining], creation order
        self._timer_seq = 0

    # -- stimulus delivery -------------------------------------------------

    def step(self, stimulus: Message) -> Emission:
        """Deliver one external/hardware stimulus and settle.

        The first transition from the current state whose input matches the
        stimulus kind and word fires; an unmatched stimulus is dropped.
        Hardware stimulus arguments are visible as $1..$n to the matched
        transition's outputs only.
        """
        if stimulus.kind is MessageKind.LOGICAL:
            raise ValueError("stimuli are external or hardware messages")
        emission = Emission()
        matched = self._first_match(stimulus)
        if matched is None:
            return emission
        bindings = None
        if stimulus.kind is MessageKind.HARDWARE and stimulus.args:
            bindings = {f"${i}": v for i, v in enumerate(stimulus.args, 1)}
        self._fire(matched, emission, bindings)
        self._settle(emission)
        return emission

    def tick(self, elapsed: int = 1) -> Emission:
        """Advance time; timers reaching zero inject a hardware ``timeout``."""
        if elapsed < 1:
            raise ValueError("elapsed must be >= 1")
        emission = Emission()
        for _ in range(elapsed):
            if not self._timers:
                continue
            for rec in self._timers:
                rec[1] -= 1
            due = [rec for rec in self._timers if rec[1] <= 0]
            self._timers = [rec for rec in self._timers if rec[1] > 0]
            for _rec in due:
                emission.extend(self.step(Message(MessageKind.HARDWARE, TIMEOUT_WORD)))
        return emission

    @property
    def pending_timers(self) -> list[tuple[int, int]]:
        return [(rec[0], rec[1]) for rec in self._timers]

    # -- internals ----------------------------------------------------------

    def _first_match(self, stimulus: Message):
        for tr in self.program.transitions:
            if tr.from_state != self.current or tr.input is None:
                continue
            if tr.input.kind is stimulus.kind and tr.input.word == stimulus.word:
                return tr
        return None

    def _first_enabled(self):
        for tr in self.program.transitions:
            if tr.from_state != self.current:
                continue
            if tr.input is None:
                return tr
            if tr.input.kind is MessageKind.LOGICAL and eval_logical_test(
                tr.input.word, tr.input.args[0], tr.input.args[1], self.vars
            ):
                return tr
        return None

    def _settle(self, emission: Emission) -> None:
        for _ in range(CHAIN_BUDGET):
            tr = self._first_enabled()
            if tr is None:
                return
            self._fire(tr, emission, None)
        if self._first_enabled() is not None:
            raise ChainLimitExceeded(
                f"more than {CHAIN_BUDGET} chained firings around state '{self.current}'"
            )

    def _fire(self, tr, emission: Emission, bindings) -> None:
        for out in tr.outputs:
            if out.kind is MessageKind.LOGICAL:
                apply_logical_set(out.word, out.args[0], out.args[1], self.vars, bindings)
            elif out.kind is MessageKind.HARDWARE and out.word == TIMER_WORD:
                self._start_timer(out, bindings)
            emission.messages.append(out)
        self.current = tr.to_state

    def _start_timer(self, out: Message, bindings) -> None:
        if not out.args:
            raise VmArithmeticError("timer needs a delay argument")
        token = out.args[0]
        resolved = _read(token, self.vars, bindings)
        if resolved is None:
            resolved = token
        delay = _as_int(resolved)
        if delay is None or delay < 1:
            raise VmArithmeticError(f"timer delay '{resolved}' is not a positive integer")
        self._timers.append([self._timer_seq, delay])
        self._timer_seq += 1


def create_vm(program: Transducer) -> tuple[VM, Emission]:
    """Instantiate a VM at the initial state and run the initial settling."""
    vm = VM(program)
    emission = Emission()
    vm._settle(emission)
    return vm, emission
