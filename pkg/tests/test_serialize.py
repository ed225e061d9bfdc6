import json

import pytest

from sunits.engine import matrix_level, verify_level
from sunits.fpgroup import abelian_invariants
from sunits.quaternion import hurwitz_order, quat_s_presentation
from sunits.serialize import FORMAT, dumps, level_from_dict, level_to_dict, presentation_text


@pytest.mark.parametrize("make", [lambda: matrix_level(2, [2, 3]), lambda: quat_s_presentation(hurwitz_order(), [3])])
def test_round_trip(make):
    level = make()
    doc = json.loads(dumps(level_to_dict(level)))
    assert doc["format"] == FORMAT
    back, trusted = level_from_dict(doc)
    assert back.presentation == level.presentation
    assert trusted == level.generators
    assert verify_level(back, trusted)["ok"]
    assert dumps(level_to_dict(back)) == dumps(level_to_dict(level))


def test_rationals_as_strings():
    doc = level_to_dict(matrix_level(2, [2]))
    img = {g["name"]: g["image"] for g in doc["generators"]}
    assert img["z2"] == [["2/1", "0/1"], ["0/1", "2/1"]]
    assert all(isinstance(x, str) for row in img["S"] for x in row)


def test_quaternion_document():
    doc = level_to_dict(quat_s_presentation(hurwitz_order(), [3]))
    assert doc["algebra"] == {"a": "-1/1", "b": "-1/1"}
    assert len(doc["order_basis"]) == 4
    assert doc["abelian_invariants"] == {"free_rank": 1, "torsion": [3]}


def test_bad_format():
    with pytest.raises(ValueError):
        level_from_dict({"format": "nope"})


def test_text_export():
    level = matrix_level(2, [2])
    text = presentation_text(level)
    assert text.startswith("# kind: matrix\n# S: 2\n")
    from sunits.fpgroup import Presentation

    P = Presentation.from_text(text)
    assert P.relators == level.presentation.relators
    assert abelian_invariants(P) == abelian_invariants(level.presentation)
