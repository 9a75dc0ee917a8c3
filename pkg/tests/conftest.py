import pytest

# The 4-push counting example: the first push seeds the countdown, the
# following ones decrement it, and reaching zero emits to subscribers and
# displays OK on the device.
TABLE3 = """\
x ?e/push !l/=(count,3) counting
counting ?e/push !l/-=(count,1) counting
counting ?l/==(count,0) !e/reached !h/notify,OK etc
"""

ECHO = "a ?e/on !e/on a\n"


def counting_program(k: int) -> str:
    """Emit `reached` (and notify OK) exactly on the k-th push."""
    return (
        f"x ?e/push !l/=(count,{k - 1}) counting\n"
        "counting ?e/push !l/-=(count,1) counting\n"
        "counting ?l/==(count,0) !e/reached !h/notify,OK etc\n"
    )


@pytest.fixture
def table3():
    return TABLE3


@pytest.fixture
def echo():
    return ECHO
