"""HTTP front door to a registry of virtual objects.

Routes:
    GET    /nodes                       list node descriptors
    POST   /nodes                       create a node: {"kind": ..., "id"?}
    GET    /nodes/{id}                  descriptor
    PUT    /nodes/{id}                  install behaviour: {"program", "subscribers"[]}
    DELETE /nodes/{id}                  clear behaviour and subscribers
    POST   /nodes/{id}/messages         deliver external message: {"word", "args"[]}
    POST   /nodes/{id}/sensors/{word}   inject a sensing event: {"args"[]}
    GET    /events?since=N              line-delimited JSON event stream

Bodies are JSON. Status codes: 200 ok, 201 created, 400 parse/validation,
404 unknown node, 409 faulted or unprogrammed node, 422 unsupported
sensing word.
"""

from __future__ import annotations

import json
import threading
import time
from collections import deque
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Iterator
from urllib.parse import parse_qs, urlparse

from .node import (
    Ack,
    InProcessNetwork,
    Node,
    NoBehaviourError,
    NodeFaultedError,
    UnknownNodeError,
    UnsupportedSensingWordError,
)
from .salt import DEFAULT_CATALOG, Message, MessageKind
from .vm import VmError

EVENT_BUFFER_SIZE = 4096
DEFAULT_TICK_RATE = 10.0  # timer ticks per second

KIND_FEATURES = {
    "button": ["button"],
    "led": ["led"],
    "notification": ["notification"],
    "gps": ["gps"],
    "light": ["light"],
    "sms": ["sms"],
    "acceleration": ["acceleration"],
    "generic": ["timer"],
}


@dataclass
class EventRecord:
    seq: int
    ts: float
    node: str
    kind: str  # emitted | actuated | programmed | cleared | sensor-injected | faulted
    payload: dict

    def to_dict(self) -> dict:
        return {
            "seq": self.seq,
            "ts": self.ts,
            "node": self.node,
            "kind": self.kind,
            "payload": self.payload,
        }


class EventBuffer:
    """Append-only ring of the most recent events; readers never block writers."""

    def __init__(self, size: int = EVENT_BUFFER_SIZE):
        self._records: deque[EventRecord] = deque(maxlen=size)
        self._cond = threading.Condition()
        self._seq = 0

    def append(self, node: str, kind: str, payload: dict) -> EventRecord:
        with self._cond:
            self._seq += 1
            rec = EventRecord(self._seq, time.time(), node, kind, payload)
            self._records.append(rec)
            self._cond.notify_all()
            return rec

    def since(self, seq: int) -> list[EventRecord]:
        with self._cond:
            return [r for r in self._records if r.seq > seq]

    def wait_since(self, seq: int, timeout: float = 0.25) -> list[EventRecord]:
        with self._cond:
            records = [r for r in self._records if r.seq > seq]
            if records:
                return records
            self._cond.wait(timeout)
            return [r for r in self._records if r.seq > seq]

    @property
    def last_seq(self) -> int:
        with self._cond:
            return self._seq


class Registry:
    """Node store with stock kinds wired into one in-process network."""

    def __init__(self, catalog=DEFAULT_CATALOG, buffer: EventBuffer | None = None):
        self.catalog = catalog
        self.buffer = buffer or EventBuffer()
        self.network = InProcessNetwork()
        self.lock = threading.RLock()
        self._auto = 0

    def create(self, kind: str, node_id: str | None = None) -> Node:
        with self.lock:
            features = KIND_FEATURES.get(kind)
            if features is None:
                raise ValueError(f"unknown node kind '{kind}'")
            if node_id is None:
                self._auto += 1
                node_id = f"{kind[0]}{self._auto}"
            if node_id in self.network.nodes:
                raise KeyError(f"node id '{node_id}' already exists")
            node = Node(node_id, features, self.catalog, kind=kind, observer=self._observe)
            return self.network.add(node)

    def node(self, node_id: str) -> Node:
        node = self.network.nodes.get(node_id)
        if node is None:
            raise UnknownNodeError(node_id)
        return node

    def nodes(self) -> list[Node]:
        return list(self.network.nodes.values())

    def tick(self, elapsed: int = 1) -> None:
        with self.lock:
            for node in self.nodes():
                try:
                    node.tick(elapsed)
                except VmError:
                    pass  # the fault event was recorded by the observer

    def _observe(self, node_id: str, kind: str, message: Message) -> None:
        self.buffer.append(node_id, kind, message.to_dict())


class Gateway:
    """Maps HTTP verbs onto node operations and serves the event stream."""

    def __init__(self, registry: Registry | None = None, tick_rate: float = 0.0,
                 buffer_size: int = EVENT_BUFFER_SIZE):
        if registry is None:
            registry = Registry(buffer=EventBuffer(buffer_size))
        self.registry = registry
        self.buffer = registry.buffer
        self.tick_rate = tick_rate
        self._stop = threading.Event()
        self._clock: threading.Thread | None = None

    # -- request handling ---------------------------------------------------

    def handle(self, verb: str, path: str, body: dict | None = None) -> tuple[int, object]:
        """Route one request; returns (status code, JSON-serializable body)."""
        parsed = urlparse(path)
        parts = [p for p in parsed.path.split("/") if p]
        query = parse_qs(parsed.query)
        try:
            return self._dispatch(verb.upper(), parts, body or {}, query)
        except UnknownNodeError as exc:
            return 404, {"error": "unknown-node", "detail": str(exc)}
        except NoBehaviourError:
            return 409, {"error": "no-behaviour"}
        except NodeFaultedError:
            return 409, {"error": "faulted"}
        except UnsupportedSensingWordError as exc:
            return 422, {"error": "unsupported-sensing-word", "detail": str(exc)}
        except VmError as exc:
            return 409, {"error": "faulted", "detail": str(exc)}
        except (ValueError, TypeError) as exc:
            return 400, {"error": "bad-request", "detail": str(exc)}

    def _dispatch(self, verb, parts, body, query) -> tuple[int, object]:
        registry = self.registry
        if parts == ["nodes"]:
            if verb == "GET":
                return 200, [n.descriptor() for n in registry.nodes()]
            if verb == "POST":
                try:
                    node = registry.create(body.get("kind", ""), body.get("id"))
                except KeyError as exc:
                    return 409, {"error": "duplicate-id", "detail": str(exc)}
                return 201, node.descriptor()
        elif parts == ["events"]:
            if verb == "GET":
                since = int(query.get("since", ["0"])[0])
                return 200, [r.to_dict() for r in self.buffer.since(since)]
        elif len(parts) == 2 and parts[0] == "nodes":
            node = registry.node(parts[1])
            if verb == "GET":
                return 200, node.descriptor()
            if verb == "PUT":
                with registry.lock:
                    result = node.put(body.get("program", ""), body.get("subscribers", ()))
                if isinstance(result, Ack):
                    self.buffer.append(node.id, "programmed",
                                       {"subscribers": list(node.subscribers)})
                    install = result.install.to_dict() if result.install else {}
                    return 200, {"status": "ok", **install}
                return 400, {"status": "rejected", **result.to_dict()}
            if verb == "DELETE":
                with registry.lock:
                    node.delete()
                self.buffer.append(node.id, "cleared", {})
                return 200, {"status": "ok"}
        elif len(parts) == 3 and parts[0] == "nodes" and parts[2] == "messages":
            node = registry.node(parts[1])
            if verb == "POST":
                message = Message(MessageKind.EXTERNAL, body.get("word", ""),
                                  tuple(body.get("args") or ()))
                with registry.lock:
                    delivery = node.post(message)
                return 200, delivery.to_dict()
        elif len(parts) == 4 and parts[0] == "nodes" and parts[2] == "sensors":
            node = registry.node(parts[1])
            if verb == "POST":
                args = tuple(body.get("args") or ())
                with registry.lock:
                    delivery = node.sensor(parts[3], args)
                self.buffer.append(node.id, "sensor-injected",
                                   {"word": parts[3], "args": list(args)})
                return 200, delivery.to_dict()
        return 404, {"error": "not-found"}

    # -- event stream ---------------------------------------------------------

    def event_stream(self, since: int = 0) -> Iterator[EventRecord]:
        """Replay buffered records newer than ``since``, then live-tail."""
        cursor = since
        while not self._stop.is_set():
            for rec in self.buffer.wait_since(cursor):
                cursor = rec.seq
                yield rec

    # -- clock ------------------------------------------------------------------

    def start_clock(self) -> None:
        if self.tick_rate <= 0 or self._clock:
            return
        interval = 1.0 / self.tick_rate

        def loop():
            while not self._stop.wait(interval):
                self.registry.tick(1)

        self._clock = threading.Thread(target=loop, daemon=True)
        self._clock.start()

    def stop(self) -> None:
        self._stop.set()
        if self._clock:
            self._clock.join(timeout=1.0)
            self._clock = None


def make_server(gateway: Gateway, host: str = "127.0.0.1", port: int = 0) -> ThreadingHTTPServer:
    """Build (but do not start) an HTTP server bound to the gateway."""

    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, *args):
            pass

        def _body(self):
            length = int(self.headers.get("Content-Length") or 0)
            if not length:
                return None
            return json.loads(self.rfile.read(length))

        def _send_json(self, status: int, obj) -> None:
            data = json.dumps(obj).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(data)

        def _route(self, verb: str) -> None:
            try:
                body = self._body()
            except (json.JSONDecodeError, UnicodeDecodeError):
                self._send_json(400, {"error": "bad-request", "detail": "invalid JSON body"})
                return
            status, obj = gateway.handle(verb, self.path, body)
            self._send_json(status, obj)

        def _stream(self) -> None:
            query = parse_qs(urlparse(self.path).query)
            try:
                since = int(query.get("since", ["0"])[0])
            except ValueError:
                self._send_json(400, {"error": "bad-request", "detail": "since must be an integer"})
                return
            self.close_connection = True
            self.send_response(200)
            self.send_header("Content-Type", "application/x-ndjson")
            self.send_header("Cache-Control", "no-cache")
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Connection", "close")
            self.end_headers()
            try:
                for rec in gateway.event_stream(since):
                    self.wfile.write((json.dumps(rec.to_dict()) + "\n").encode())
                    self.wfile.flush()
            except (BrokenPipeError, ConnectionResetError):
                pass

        def do_GET(self):
            parsed = urlparse(self.path)
            if parsed.path.rstrip("/") == "/events":
                # ?replay=1 returns the buffered snapshot and closes;
                # the default is the live ndjson stream
                if parse_qs(parsed.query).get("replay", ["0"])[0] in ("1", "true"):
                    self._route("GET")
                else:
                    self._stream()
            else:
                self._route("GET")

        def do_POST(self):
            self._route("POST")

        def do_PUT(self):
            self._route("PUT")

        def do_DELETE(self):
            self._route("DELETE")

    server = ThreadingHTTPServer((host, port), Handler)
    server.daemon_threads = True
    return server


def serve(host: str = "127.0.0.1", port: int = 8080, tick_rate: float = DEFAULT_TICK_RATE,
          buffer_size: int = EVENT_BUFFER_SIZE) -> None:
    """Run the gateway until interrupted."""
    gateway = Gateway(tick_rate=tick_rate, buffer_size=buffer_size)
    server = make_server(gateway, host, port)
    actual_port = server.server_address[1]
    print(f"listening on http://{host}:{actual_port}", flush=True)
    gateway.start_clock()
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        gateway.stop()
        server.shutdown()
        server.server_close()
