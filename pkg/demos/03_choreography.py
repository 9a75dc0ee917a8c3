#!/usr/bin/env python3
# A three-object choreography with no central controller: a button relays
# presses to a lamp (toggle) and to a counter whose indicator lights on
# the third press. Wiring is nothing but subscriber lists.

from dlite import InProcessNetwork, Node

network = InProcessNetwork()
button = network.add(Node("button", ["button"]))
lamp = network.add(Node("lamp", ["led"]))
counter = network.add(Node("counter", ["led"]))

button.put("s ?h/push !e/push s", subscribers=["lamp", "counter"])
lamp.put("off ?e/push !h/led,on on\non ?e/push !h/led,off off")
counter.put("""\
x ?e/push !l/=(count,2) c
c ?e/push !l/-=(count,1) c
c ?l/==(count,0) !e/reached !h/led,on lit
""")

for press in range(1, 4):
    button.sensor("push")
    lamp_state = lamp.hardware_log[-1].args[0] if lamp.hardware_log else "off"
    counter_led = "on" if counter.hardware_log else "off"
    print(f"press {press}: lamp={lamp_state:<3} counter-indicator={counter_led} "
          f"(counter vars={counter.vm.vars})")

print("\nhardware logs:")
for node in (lamp, counter):
    log = [f"{m.word}({','.join(m.args)})" for m in node.hardware_log]
    print(f"  {node.id}: {log}")
