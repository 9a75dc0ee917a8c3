#!/usr/bin/env python3
# Tour of the SALT rule language: parsing, canonical printing, and
# checking a program against the hardware words a device actually has.

from dlite import parse_transducer, print_transducer, validate_against_features
from dlite.salt import ParseError

# The counting behaviour: the first push seeds a countdown, later pushes
# decrement it, and zero triggers an external message plus a display.
SOURCE = """\
# count 4 pushes, then tell the world and show OK
x ?e/push !l/=(count,3) counting
counting ?e/push !l/-=(count,1) counting
counting ?l/==(count,0) !e/reached !h/notify,OK etc
"""

program = parse_transducer(SOURCE)
print(f"parsed {len(program.transitions)} transitions, start state '{program.initial}'")
print(f"states: {sorted(program.states)}")

print("\ncanonical form (comments dropped, one rule per line):")
print(print_transducer(program), end="")

# Static validation: would this run on a device with a button and a display?
issues = validate_against_features(program, ["button", "notification"])
print(f"\nagainst button+notification: {len(issues)} issues")

# ... and on a bare button, where `notify` has no meaning?
issues = validate_against_features(program, ["button"])
for issue in issues:
    print(f"against button only: [{issue.severity}] line {issue.line}: {issue.message}")

# The parser pinpoints malformed rules.
try:
    parse_transducer("x ?e/push !l/=(count,1234567) y")
except ParseError as exc:
    print(f"\noversized data word rejected -> {exc}")
