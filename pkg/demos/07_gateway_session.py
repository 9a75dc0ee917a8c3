#!/usr/bin/env python3
# Drive the HTTP gateway end to end: create virtual objects, program them
# over PUT, press the virtual button, and read the event feed.

import json
import threading
import urllib.request

from dlite.gateway import Gateway, make_server

gateway = Gateway()
server = make_server(gateway, "127.0.0.1", 0)
threading.Thread(target=server.serve_forever, daemon=True).start()
base = f"http://127.0.0.1:{server.server_address[1]}"
print(f"gateway at {base}\n")


def call(method, path, body=None):
    data = json.dumps(body).encode() if body is not None else None
    req = urllib.request.Request(base + path, data=data, method=method,
                                 headers={"Content-Type": "application/json"})
    with urllib.request.urlopen(req) as resp:
        return resp.status, json.loads(resp.read())


for kind, node_id in (("button", "b1"), ("led", "lamp"), ("notification", "c1")):
    status, desc = call("POST", "/nodes", {"kind": kind, "id": node_id})
    print(f"created {desc['id']:<5} kind={kind:<12} sensing={[s['word'] for s in desc['sensing']]}"
          f" actuating={[a['word'] for a in desc['actuating']]}")

call("PUT", "/nodes/b1", {"program": "s ?h/push !e/push s", "subscribers": ["lamp", "c1"]})
call("PUT", "/nodes/lamp", {"program": "off ?e/push !h/led,on on\non ?e/push !h/led,off off",
                            "subscribers": []})
call("PUT", "/nodes/c1", {"program": ("x ?e/push !l/=(count,3) c\n"
                                      "c ?e/push !l/-=(count,1) c\n"
                                      "c ?l/==(count,0) !e/reached !h/notify,OK etc"),
                          "subscribers": []})
print("\nprogrammed all three; pressing the button four times:")

for press in range(1, 5):
    status, delivery = call("POST", "/nodes/b1/sensors/push", {})
    assert status == 200, delivery

status, events = call("GET", "/events?since=0&replay=1")
print(f"\nevent feed ({len(events)} records):")
for ev in events:
    payload = ev["payload"]
    detail = payload.get("word", "")
    if payload.get("args"):
        detail += f"({','.join(payload['args'])})"
    print(f"  #{ev['seq']:<3} {ev['node']:<5} {ev['kind']:<16} {detail}")

server.shutdown()
server.server_close()
gateway.stop()
