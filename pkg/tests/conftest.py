import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from ctacp.syntax import parse_spec  # noqa: E402

DEMO = """\
// running example
props P, Q;
actions a, b, c, d;
comm b | c = d;
proc M1 = a . (P ^ b + ~P ^ c);
proc M2 = a . ((P /\\ ~P) ^ (b + c));
proc M3 = a . (Cons(P) ^ (P ^ b + ~P ^ c));
proc M4 = a . (P ^ b || ~P ^ c);
proc Del = delta;
recspec E { X = a . X; }
recspec F { Y = a . a . Y; }
proc RX = <X | E>;
proc RY = <Y | F>;
"""

STATES = """\
props P, Q;
actions a, b;
statespace M {
  states s0, s1;
  sig(s0) = P;
  sig(s1) = Q;
  act(a, s0) = b;
  eff(a, s0) = s1;
}
"""


@pytest.fixture
def demo():
    return parse_spec(DEMO)


@pytest.fixture
def demo_path(tmp_path):
    path = tmp_path / "demo.ct"
    path.write_text(DEMO)
    return str(path)


@pytest.fixture
def states_spec():
    return parse_spec(STATES)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
    if mod.UNDECIDED_LOG:
        terminalreporter.write_line(f"bisimilar-but-undecided classes logged: {len(mod.UNDECIDED_LOG)}")
        for line in mod.UNDECIDED_LOG[:10]:
            terminalreporter.write_line(f"  {line}")
