"""D-LITe virtual objects.

A Node couples one VM with a feature list, a subscriber list and the
four-verb lifecycle: describe (get), program (put), deliver (post) and
clear (delete). Emitted external messages fan out to the subscribers,
hardware messages go to the hardware log and an optional shim callback.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .salt import (
    DEFAULT_CATALOG,
    Feature,
    Message,
    MessageKind,
    ParseError,
    Transducer,
    UnknownFeatureError,
    ValidationIssue,
    parse_transducer,
    validate_against_features,
)
from .vm import VM, Emission, VmError, create_vm

VERSION = "0.1.0"
MAX_SUBSCRIBERS = 20

DELIVERED = "delivered"


class UnknownNodeError(KeyError):
    pass


class NoBehaviourError(Exception):
    """The node has no installed behaviour; deliveries are dropped."""


class NodeFaultedError(Exception):
    """A previous delivery raised a VM error; reprogram to recover."""


class UnsupportedSensingWordError(Exception):
    pass


@dataclass
class DispatchResult:
    to: str
    message: Message
    status: str  # delivered | unknown-node | no-behaviour | faulted | unrouted

    def to_dict(self) -> dict:
        return {
            "to": self.to,
            "word": self.message.word,
            "args": list(self.message.args),
            "status": self.status,
        }


@dataclass
class Delivery:
    """Observable outcome of one delivery: messages out, dispatches done."""

    emitted: list[Message] = field(default_factory=list)
    dispatched: list[DispatchResult] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "emitted": [m.to_dict() for m in self.emitted],
            "dispatched": [d.to_dict() for d in self.dispatched],
        }


@dataclass
class Ack:
    install: Delivery | None = None


@dataclass
class Rejection:
    reason: str  # parse | validation | subscribers | runtime
    message: str
    parse_error: ParseError | None = None
    issues: list[ValidationIssue] = field(default_factory=list)

    def to_dict(self) -> dict:
        body: dict = {"reason": self.reason, "message": self.message}
        if self.parse_error is not None:
            body["line"] = self.parse_error.line
            body["col"] = self.parse_error.col
        if self.issues:
            body["issues"] = [i.to_dict() for i in self.issues]
        return body


class Node:
    """One virtual object with its descriptor, behaviour and subscribers."""

    def __init__(
        self,
        node_id: str,
        features: list[str] | tuple[str, ...],
        catalog: dict[str, Feature] = DEFAULT_CATALOG,
        kind: str | None = None,
        shim: Callable[[str, Message], None] | None = None,
        observer: Callable[[str, str, Message], None] | None = None,
    ):
        for name in features:
            if name not in catalog:
                raise UnknownFeatureError(f"feature '{name}' is not in the catalog")
        self.id = node_id
        self.kind = kind
        self.features = list(features)
        self.catalog = catalog
        self.shim = shim
        self.observer = observer
        self.network = None  # set by a Network when the node is registered
        self.program_text: str | None = None
        self.program: Transducer | None = None
        self.vm: VM | None = None
        self.subscribers: list[str] = []
        self.hardware_log: list[Message] = []
        self.faulted = False

    # -- GET ---------------------------------------------------------------

    def descriptor(self) -> dict:
        sensing = []
        actuating = []
        for name in self.features:
            feat = self.catalog[name]
            sensing.extend(
                {"feature": name, "word": w, "arity": a} for w, a in feat.sensing.items()
            )
            actuating.extend(
                {"feature": name, "word": w, "arity": a} for w, a in feat.actuating.items()
            )
        desc = {
            "id": self.id,
            "version": VERSION,
            "features": list(self.features),
            "sensing": sensing,
            "actuating": actuating,
        }
        if self.kind is not None:
            desc["kind"] = self.kind
        return desc

    # -- PUT ---------------------------------------------------------------

    def put(self, program_text: str, subscribers: list[str] | tuple[str, ...] = ()) -> Ack | Rejection:
        """Atomically replace the behaviour, or keep the old one on failure.

        Parses and validates the program, checks the subscriber list
        (duplicates are collapsed, more than 20 rejected), then installs a
        fresh VM. The initial settling's emission is routed like any other.
        """
        try:
            program = parse_transducer(program_text)
        except ParseError as exc:
            return Rejection("parse", str(exc), parse_error=exc)
        issues = validate_against_features(program, self.features, self.catalog)
        errors = [i for i in issues if i.severity == "error"]
        if errors:
            return Rejection(
                "validation",
                "; ".join(i.message for i in errors),
                issues=issues,
            )
        subs = list(dict.fromkeys(subscribers))
        if len(subs) > MAX_SUBSCRIBERS:
            return Rejection(
                "subscribers", f"{len(subs)} subscribers exceed the limit of {MAX_SUBSCRIBERS}"
            )
        try:
            vm, boot = create_vm(program)
        except VmError as exc:
            return Rejection("runtime", f"behaviour failed while settling: {exc}")
        self.program_text = program_text
        self.program = program
        self.vm = vm
        self.subscribers = subs
        self.faulted = False
        return Ack(install=self._route(boot))

    # -- POST --------------------------------------------------------------

    def post(self, message: Message) -> Delivery:
        """Deliver an external message to the behaviour and fan out."""
        if message.kind is not MessageKind.EXTERNAL:
            raise ValueError("post delivers external messages")
        return self._deliver(message)

    def sensor(self, word: str, args: list[str] | tuple[str, ...] = ()) -> Delivery:
        """Inject a hardware sensing event (e.g. a button press)."""
        arity = None
        for name in self.features:
            feat = self.catalog[name]
            if word in feat.sensing:
                arity = feat.sensing[word]
                break
        if arity is None:
            raise UnsupportedSensingWordError(
                f"'{word}' is not a sensing word of node '{self.id}'"
            )
        if arity != len(args):
            raise UnsupportedSensingWordError(
                f"sensing word '{word}' takes {arity} argument(s), got {len(args)}"
            )
        return self._deliver(Message(MessageKind.HARDWARE, word, tuple(args)))

    def tick(self, elapsed: int = 1) -> Delivery:
        """Advance the node's timers; no-op without behaviour."""
        if self.vm is None or self.faulted:
            return Delivery()
        try:
            emission = self.vm.tick(elapsed)
        except VmError:
            self._fault()
            raise
        return self._route(emission)

    # -- DELETE ------------------------------------------------------------

    def delete(self) -> Ack:
        """Clear behaviour and subscribers; descriptor and log survive."""
        self.program_text = None
        self.program = None
        self.vm = None
        self.subscribers = []
        self.faulted = False
        return Ack()

    # -- internals -----------------------------------------------------------

    def _deliver(self, message: Message) -> Delivery:
        if self.faulted:
            raise NodeFaultedError(self.id)
        if self.vm is None:
            raise NoBehaviourError(self.id)
        try:
            emission = self.vm.step(message)
        except VmError:
            self._fault()
            raise
        return self._route(emission)

    def _fault(self) -> None:
        self.faulted = True
        if self.observer:
            self.observer(self.id, "faulted", Message(MessageKind.EXTERNAL, "fault"))

    def _route(self, emission: Emission) -> Delivery:
        delivery = Delivery()
        for msg in emission.messages:
            if msg.kind is MessageKind.HARDWARE:
                self.hardware_log.append(msg)
                if self.shim:
                    self.shim(self.id, msg)
                if self.observer:
                    self.observer(self.id, "actuated", msg)
                delivery.emitted.append(msg)
            elif msg.kind is MessageKind.EXTERNAL:
                if self.observer:
                    self.observer(self.id, "emitted", msg)
                delivery.emitted.append(msg)
                for addr in self.subscribers:
                    if self.network is None:
                        status = "unrouted"
                    else:
                        status = self.network.deliver(addr, msg)
                    delivery.dispatched.append(DispatchResult(addr, msg, status))
        return delivery


class InProcessNetwork:
    """Address book resolving subscriber addresses to in-process nodes."""

    def __init__(self):
        self.nodes: dict[str, Node] = {}

    def add(self, node: Node) -> Node:
        self.nodes[node.id] = node
        node.network = self
        return node

    def deliver(self, address: str, message: Message) -> str:
        node = self.nodes.get(address)
        if node is None:
            return "unknown-node"
        if node.faulted:
            return "faulted"
        if node.vm is None:
            return "no-behaviour"
        try:
            node.post(message)
        except VmError:
            return "faulted"
        return DELIVERED
