from pathlib import Path

import pytest

from conflict_metrics import KnowledgeBase, parse_kb

DATA_DIR = Path(__file__).resolve().parent.parent / "data"

# Nine-formula KB: two conflict clusters sharing no formulas, no free part.
EXAMPLE2_TEXT = """\
a & d
!a
!b
b | !c
!c & d
!c | e
c
!e
e & d
"""

# Ten-formula KB: a chain-like cluster over a, b and a tight cluster over c..f.
EXAMPLE6_TEXT = """\
a
!a
a | b
!b
b
c
!c & d
!d & e & f
!e
!f
"""


def chain_kb(n: int) -> KnowledgeBase:
    """a_i, !a_i pairs linked by bridges a_i | !a_{i+1}."""
    lines = []
    for i in range(1, n + 1):
        lines.append(f"a{i}")
        lines.append(f"!a{i}")
        if i < n:
            lines.append(f"a{i} | !a{i + 1}")
    return parse_kb("\n".join(lines))


@pytest.fixture
def example2_kb() -> KnowledgeBase:
    return parse_kb(EXAMPLE2_TEXT)


@pytest.fixture
def example6_kb() -> KnowledgeBase:
    return parse_kb(EXAMPLE6_TEXT)
