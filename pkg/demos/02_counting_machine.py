#!/usr/bin/env python3
# Step-by-step trace of one virtual machine running the counting program:
# watch the state, the variable store, and what each push emits.

from dlite import create_vm, parse_transducer
from dlite.salt import Message, MessageKind

program = parse_transducer("""\
x ?e/push !l/=(count,3) counting
counting ?e/push !l/-=(count,1) counting
counting ?l/==(count,0) !e/reached !h/notify,OK etc
""")

vm, boot = create_vm(program)
print(f"boot: state={vm.current} vars={vm.vars} emitted={len(boot.messages)} messages")

push = Message(MessageKind.EXTERNAL, "push")
for n in range(1, 6):
    emission = vm.step(push)
    out = [f"{m.kind.value}/{m.word}{list(m.args) if m.args else ''}" for m in emission.messages]
    print(f"push {n}: state={vm.current:<8} vars={vm.vars}  outputs={out}")

# Timers are virtual hardware: an output arms one, expiry injects `timeout`.
timed = parse_transducer("idle ?e/go !h/timer,3 armed\narmed ?h/timeout !e/ding idle")
vm, _ = create_vm(timed)
vm.step(Message(MessageKind.EXTERNAL, "go"))
print(f"\narmed: pending timers = {vm.pending_timers}")
for tick in range(1, 4):
    emission = vm.tick(1)
    words = [m.word for m in emission.to_subscribers]
    print(f"tick {tick}: emitted {words or 'nothing'}")
