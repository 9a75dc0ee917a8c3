import random

import pytest

from dlite.salt import Message, MessageKind, parse_transducer
from dlite.vm import (
    CHAIN_BUDGET,
    VM,
    ChainLimitExceeded,
    VmArithmeticError,
    VmOverflowError,
    apply_logical_set,
    create_vm,
    eval_logical_test,
)

from conftest import counting_program

E, L, H = MessageKind.EXTERNAL, MessageKind.LOGICAL, MessageKind.HARDWARE
PUSH = Message(E, "push")


def boot(text):
    return create_vm(parse_transducer(text))


def test_create_table3(table3):
    vm, emission = boot(table3)
    assert vm.current == "x"
    assert vm.vars == {}
    assert not emission


def test_create_runs_epsilon_settling():
    vm, emission = boot("a ?. !l/=(i,0) b")
    assert vm.current == "b"
    assert vm.vars == {"i": "0"}
    assert emission.internal == [Message(L, "=", ("i", "0"))]


def test_create_echo_no_emission(echo):
    vm, emission = boot(echo)
    assert vm.current == "a"
    assert not emission


def test_table3_counts_four_pushes(table3):
    vm, _ = boot(table3)
    for i, expected_count in zip(range(1, 4), ("3", "2", "1")):
        emission = vm.step(PUSH)
        assert emission.to_subscribers == []
        assert emission.to_hardware == []
        assert vm.vars["count"] == expected_count
    emission = vm.step(PUSH)
    assert emission.to_subscribers == [Message(E, "reached")]
    assert emission.to_hardware == [Message(H, "notify", ("OK",))]
    assert vm.vars["count"] == "0"
    assert vm.current == "etc"
    # terminal state: further pushes are dropped
    assert not vm.step(PUSH)
    assert vm.current == "etc"


def test_echo_step(echo):
    vm, _ = boot(echo)
    emission = vm.step(Message(E, "on"))
    assert emission.to_subscribers == [Message(E, "on")]
    assert vm.current == "a"


def test_unmatched_stimulus_dropped():
    vm, _ = boot("a ?l/==(x,0) !e/zero a")
    assert vm.current == "a"  # undefined x: the test is false at boot
    emission = vm.step(Message(E, "ping"))
    assert not emission
    assert vm.current == "a"


def test_logical_stimulus_rejected(echo):
    vm, _ = boot(echo)
    with pytest.raises(ValueError):
        vm.step(Message(L, "==", ("a", "b")))


# -- eval_logical_test -----------------------------------------------------


def test_eval_examples():
    assert eval_logical_test("==", "count", "0", {"count": "0"}) is True
    assert eval_logical_test("<", "i", "3", {"i": "2"}) is True
    assert eval_logical_test(">=", "i", "j", {"i": "5", "j": "5"}) is True


def test_eval_integer_vs_string_comparison():
    assert eval_logical_test("==", "a", "7", {"a": "07"}) is True
    assert eval_logical_test("==", "s", "hi", {"s": "hi"}) is True
    assert eval_logical_test("!=", "s", "ho", {"s": "hi"}) is True
    # ordering needs integers on both sides
    assert eval_logical_test("<", "s", "3", {"s": "hi"}) is False


def test_eval_undefined_variable():
    for op in ("==", "<", ">", "<=", ">="):
        assert eval_logical_test(op, "x", "0", {}) is False
    assert eval_logical_test("!=", "x", "0", {}) is True


def test_eval_indirection_resolved_once():
    assert eval_logical_test("==", "a", "b", {"a": "4", "b": "4"}) is True
    # `b` undefined: compared as the literal string "b"
    assert eval_logical_test("==", "a", "b", {"a": "b"}) is True


def test_eval_rejects_set_operator():
    with pytest.raises(ValueError):
        eval_logical_test("=", "a", "1", {})


# -- apply_logical_set -------------------------------------------------------


def test_set_examples():
    assert apply_logical_set("=", "count", "3", {}) == {"count": "3"}
    assert apply_logical_set("-=", "count", "1", {"count": "3"}) == {"count": "2"}
    assert apply_logical_set("*=", "x", "0", {"x": "12345"}) == {"x": "0"}


def test_set_indirection():
    assert apply_logical_set("=", "a", "b", {"b": "9"}) == {"a": "9", "b": "9"}
    assert apply_logical_set("+=", "a", "b", {"a": "1", "b": "9"}) == {"a": "10", "b": "9"}


def test_arithmetic_errors():
    with pytest.raises(VmArithmeticError, match="undefined"):
        apply_logical_set("+=", "x", "1", {})
    with pytest.raises(VmArithmeticError, match="non-integer"):
        apply_logical_set("+=", "x", "1", {"x": "abc"})
    with pytest.raises(VmArithmeticError, match="non-integer"):
        apply_logical_set("+=", "x", "abc", {"x": "1"})
    with pytest.raises(VmArithmeticError, match="zero"):
        apply_logical_set("/=", "x", "0", {"x": "4"})


def test_overflow_errors():
    with pytest.raises(VmOverflowError):
        apply_logical_set("*=", "x", "100", {"x": "99999"})
    with pytest.raises(VmOverflowError):
        apply_logical_set("-=", "x", "1", {"x": "-99999"})
    # six characters exactly is fine on both ends
    assert apply_logical_set("=", "x", "999999", {}) == {"x": "999999"}
    assert apply_logical_set("-=", "x", "0", {"x": "-99999"}) == {"x": "-99999"}


def test_division_truncates_toward_zero():
    assert apply_logical_set("/=", "x", "2", {"x": "-5"}) == {"x": "-2"}
    assert apply_logical_set("/=", "x", "-2", {"x": "5"}) == {"x": "-2"}
    assert apply_logical_set("/=", "x", "2", {"x": "5"}) == {"x": "2"}


def test_variable_store_six_char_bound_property():
    rng = random.Random(99)
    vars = {"a": "1", "b": "-12"}
    for _ in range(500):
        op = rng.choice(["=", "+=", "-=", "*=", "/="])
        var = rng.choice(["a", "b", "c"])
        value = rng.choice(["a", "b", "7", "-3", "99999", "0"])
        try:
            apply_logical_set(op, var, value, vars)
        except (VmArithmeticError, VmOverflowError):
            pass
        assert all(len(v) <= 6 for v in vars.values())


# -- settling and chain budget ---------------------------------------------


def test_epsilon_self_loop_hits_chain_limit():
    with pytest.raises(ChainLimitExceeded):
        create_vm(parse_transducer("a ?. a"))


def test_logical_self_loop_hits_chain_limit():
    vm, _ = boot("a ?e/set !l/=(x,0) b\nb ?l/==(x,0) !e/z b")
    with pytest.raises(ChainLimitExceeded):
        vm.step(Message(E, "set"))


def test_chain_budget_allows_long_finite_chains():
    # 40 chained epsilon hops stay under the budget of 64
    lines = [f"s{i} ?. s{i + 1}" for i in range(40)]
    lines[0] = "s0 ?e/go s1"
    vm, _ = boot("\n".join(lines))
    vm.step(Message(E, "go"))
    assert vm.current == "s40"
    assert CHAIN_BUDGET == 64


def test_settle_scans_in_declaration_order():
    # the true logical test is declared before the epsilon and fires first
    src = (
        "a ?e/go !l/=(x,1) b\n"
        "b ?l/==(x,1) !e/viaTest c\n"
        "b ?. !e/viaEps c\n"
    )
    vm, _ = boot(src)
    emission = vm.step(Message(E, "go"))
    assert [m.word for m in emission.to_subscribers] == ["viaTest"]


def test_first_match_wins():
    vm, _ = boot("s ?e/x !e/one s\ns ?e/x !e/two s")
    emission = vm.step(Message(E, "x"))
    assert [m.word for m in emission.to_subscribers] == ["one"]


def test_first_match_property_random_programs():
    rng = random.Random(7)
    for _ in range(50):
        n = rng.randint(2, 5)
        outs = [f"o{i}" for i in range(n)]
        src = "\n".join(f"s ?e/x !e/{o} s" for o in outs)
        vm, _ = boot(src)
        emission = vm.step(Message(E, "x"))
        assert [m.word for m in emission.to_subscribers] == [outs[0]]


def test_determinism_replay(table3):
    def trace():
        vm, _ = boot(table3)
        out = []
        for _ in range(6):
            emission = vm.step(PUSH)
            out.append((vm.current, dict(vm.vars), [m.to_dict() for m in emission.messages]))
        return out

    assert trace() == trace()


def test_state_closure_property(table3):
    vm, _ = boot(table3)
    program_states = vm.program.states
    for _ in range(10):
        vm.step(PUSH)
        assert vm.current in program_states


# -- hardware argument bindings ----------------------------------------------


def test_sensing_args_bound_to_dollar_names():
    vm, _ = boot("g ?h/positionChanged !l/=(lon,$1) !l/=(lat,$2) !l/=(alt,$3) g2")
    vm.step(Message(H, "positionChanged", ("12", "34", "56")))
    assert vm.vars == {"lon": "12", "lat": "34", "alt": "56"}


def test_bindings_do_not_leak_into_settling():
    vm, _ = boot("g ?h/lightChanged !l/=(a,$1) w\nw ?. !l/=(b,$1) z")
    vm.step(Message(H, "lightChanged", ("7",)))
    assert vm.vars["a"] == "7"
    assert vm.vars["b"] == "$1"  # binding expired; literal fallback


def test_external_args_are_not_bound():
    vm, _ = boot("a ?e/data !l/=(x,$1) b")
    vm.step(Message(E, "data", ("5",)))
    assert vm.vars["x"] == "$1"


# -- timers ---------------------------------------------------------------------


TIMER_PROG = "a ?e/go !h/timer,5 w\nw ?h/timeout !e/done a"


def test_timer_fires_after_delay():
    vm, _ = boot(TIMER_PROG)
    vm.step(Message(E, "go"))
    assert vm.pending_timers == [(0, 5)]
    emission = vm.tick(5)
    assert emission.to_subscribers == [Message(E, "done")]
    assert vm.pending_timers == []
    assert vm.current == "a"


def test_timer_not_yet_due():
    vm, _ = boot(TIMER_PROG)
    vm.step(Message(E, "go"))
    emission = vm.tick(4)
    assert not emission.to_subscribers
    assert vm.pending_timers == [(0, 1)]


def test_tick_without_timers_is_noop(echo):
    vm, _ = boot(echo)
    state_before = (vm.current, dict(vm.vars))
    assert not vm.tick(3)
    assert (vm.current, dict(vm.vars)) == state_before


def test_timers_expire_in_creation_order():
    src = (
        "a ?e/go !h/timer,2 !h/timer,2 b\n"
        "b ?h/timeout !e/first c\n"
        "c ?h/timeout !e/second d\n"
    )
    vm, _ = boot(src)
    vm.step(Message(E, "go"))
    emission = vm.tick(2)
    assert [m.word for m in emission.to_subscribers] == ["first", "second"]


def test_timer_delay_from_variable():
    src = "a ?. !l/=(d,2) b\nb ?e/go !h/timer,d w\nw ?h/timeout !e/done z"
    vm, _ = boot(src)
    vm.step(Message(E, "go"))
    assert not vm.tick(1)
    assert vm.tick(1).to_subscribers == [Message(E, "done")]


def test_timer_needs_positive_integer_delay():
    vm, _ = boot("a ?e/go !h/timer,zero b")
    with pytest.raises(VmArithmeticError):
        vm.step(Message(E, "go"))


def test_timer_started_by_timeout_handler():
    src = (
        "a ?e/go !h/timer,1 b\n"
        "b ?h/timeout !h/timer,1 !e/tick1 c\n"
        "c ?h/timeout !e/tick2 d\n"
    )
    vm, _ = boot(src)
    vm.step(Message(E, "go"))
    first = vm.tick(1)
    assert [m.word for m in first.to_subscribers] == ["tick1"]
    second = vm.tick(1)
    assert [m.word for m in second.to_subscribers] == ["tick2"]


def test_timer_output_is_still_reported_as_hardware():
    vm, _ = boot("a ?e/go !h/timer,3 b")
    emission = vm.step(Message(E, "go"))
    assert emission.to_hardware == [Message(H, "timer", ("3",))]


# -- counting oracle ----------------------------------------------------------


def _oracle_reach_schedule(k: int, pushes: int) -> list[bool]:
    """Independent replay: a plain countdown, no transducer machinery."""
    count = None
    fired = False
    out = []
    for _ in range(pushes):
        if fired:
            out.append(False)
            continue
        if count is None:
            count = k - 1
        else:
            count -= 1
        if count == 0:
            fired = True
            out.append(True)
        else:
            out.append(False)
    return out


@pytest.mark.parametrize("k", range(1, 21))
def test_counting_oracle(k):
    vm, _ = boot(counting_program(k))
    expected = _oracle_reach_schedule(k, 25)
    for push_idx, should_fire in enumerate(expected, 1):
        emission = vm.step(PUSH)
        fired = Message(E, "reached") in emission.to_subscribers
        assert fired == should_fire, f"k={k} push={push_idx}"
