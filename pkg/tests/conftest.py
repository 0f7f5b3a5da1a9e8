import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from evident.defaults import DefaultRule, DefaultTheory  # noqa: E402
from evident.frontend import parse_formula  # noqa: E402
from evident.sources import EvidenceModel, Source  # noqa: E402

F = parse_formula

NIXON_KB = """\
# Nixon is a quaker and a republican
fact quaker. fact republican.
rule r1: if quaker then pacifist weight 0.9 nocontra.
rule r2: if republican then !pacifist weight 0.8 nocontra.
"""

PENGUIN_KB = """\
fact penguin. fact bird.
rule r1: if penguin then !flies weight 0.9 nocontra priority 0.
rule r2: if bird then flies weight 0.8 nocontra priority 1.
"""

NIXON_DEFAULTS_KB = """\
fact quaker. fact republican.
default d1: quaker : pacifist / pacifist.
default d2: republican : !pacifist / !pacifist.
rule dove: if pacifist then dove weight 0.9.
"""


@pytest.fixture
def nixon():
    return EvidenceModel(
        (F("quaker"), F("republican")),
        (
            Source.inference(1, F("quaker"), F("pacifist"), 0.9),
            Source.inference(2, F("republican"), F("!pacifist"), 0.8),
        ),
    )


@pytest.fixture
def nixon_defaults():
    return DefaultTheory(
        (
            DefaultRule(F("quaker"), F("pacifist"), F("pacifist"), 1),
            DefaultRule(F("republican"), F("!pacifist"), F("!pacifist"), 2),
        ),
        (F("quaker"), F("republican")),
    )


@pytest.fixture
def orphan():
    """The theory { : b / !b } with no facts."""
    return DefaultTheory((DefaultRule(F("true"), F("b"), F("!b"), 1),), ())


@pytest.fixture
def kb_file(tmp_path):
    def write(text, name="kb.txt"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return write


ACCEPTANCE_KEY = pytest.StashKey[dict]()


@pytest.fixture
def acceptance_log(request):
    return request.config.stash.setdefault(ACCEPTANCE_KEY, {})


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])
