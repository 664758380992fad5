from itertools import product

import pytest

from asympt.facons import (Facon, enumerate_facons, facon_count_by_cases, facon_count_formula, group_facons_n3,
                           group_of)
from asympt.poly import StructureError


def brute_force(n):
    """All disjoint (I, J) with I nonempty, filtered by the three admissible shapes."""
    out = set()
    for labels in product("IJ.", repeat=n):
        inf = tuple(k + 1 for k, c in enumerate(labels) if c == "I")
        fixed = tuple(k + 1 for k, c in enumerate(labels) if c == "J")
        if not inf:
            continue
        covered = len(inf) + len(fixed)
        full = covered == n
        bare = covered < n and not fixed
        partial = covered < n and fixed
        if full or bare or partial:
            out.add((inf, fixed))
    return out


@pytest.mark.parametrize("n", range(1, 7))
def test_enumeration_matches_brute_force(n):
    got = {(f.inf_set, f.fixed_set) for f in enumerate_facons(n)}
    assert got == brute_force(n)
    assert len(enumerate_facons(n)) == len(got)  # no duplicates


@pytest.mark.parametrize("n", range(1, 7))
def test_case_count_matches_enumeration(n):
    assert facon_count_by_cases(n) == len(enumerate_facons(n))


def test_small_dimensions():
    assert [str(f) for f in enumerate_facons(1)] == ["(1)"]
    assert sorted(map(str, enumerate_facons(2))) == sorted(["(1,2)", "(1)[2]", "(2)[1]", "(1)", "(2)"])
    assert [len(enumerate_facons(n)) for n in range(1, 7)] == [1, 5, 19, 65, 211, 665]


def test_closed_formula_values():
    assert facon_count_formula(1) == 1
    assert facon_count_formula(3) == 7 + 6 + 6
    assert facon_count_formula(4) == 15 + 14 + 36
    assert facon_count_formula(5) == 31 + 30 + 200


def test_dimension_three_list():
    names = {str(f) for f in enumerate_facons(3)}
    assert len(names) == 19
    assert {"(1,2,3)", "(1,2)[3]", "(3)[1,2]", "(1)[2]"} <= names


def test_groups():
    groups = group_facons_n3()
    assert [g.label for g in groups] == ["I", "II", "III", "IV", "V", "VI"]
    assert [len(g.members) for g in groups] == [1, 3, 3, 3, 6, 3]
    by_label = {g.label: {str(f) for f in g.members} for g in groups}
    assert "(1,2)[3]" in by_label["IV"]
    assert by_label["V"] == {"(1)[2]", "(1)[3]", "(2)[1]", "(2)[3]", "(3)[1]", "(3)[2]"}
    assert by_label["VI"] == {"(1)[2,3]", "(2)[1,3]", "(3)[1,2]"}
    members = [f for g in groups for f in g.members]
    assert sorted(members, key=Facon.sort_key) == enumerate_facons(3)


def test_groups_reject_wrong_list():
    with pytest.raises(StructureError):
        group_facons_n3(enumerate_facons(3)[:-1])


@pytest.mark.parametrize("n", range(1, 6))
def test_invariants_and_cases(n):
    counts = {"full": 0, "bare": 0, "partial": 0}
    for f in enumerate_facons(n):
        assert f.inf_set
        assert not set(f.inf_set) & set(f.fixed_set)
        assert set(f.inf_set) | set(f.fixed_set) <= set(range(1, n + 1))
        counts[f.case] += 1
    assert counts["full"] == 2 ** n - 1
    assert counts["bare"] == 2 ** n - 2


def test_deterministic_order():
    a = enumerate_facons(4)
    assert a == enumerate_facons(4)
    assert [len(f.inf_set) + len(f.fixed_set) for f in a] == sorted(len(f.inf_set) + len(f.fixed_set) for f in a)


def test_parse_and_print():
    for f in enumerate_facons(3):
        assert Facon.parse(str(f), 3) == f
    assert group_of(Facon.parse("(2)[1,3]", 3)) == "VI"


@pytest.mark.parametrize("bad", [((), (1,)), ((1,), (1,)), ((4,), ())])
def test_invalid_facons(bad):
    with pytest.raises(StructureError):
        Facon(bad[0], bad[1], 3)


def test_dimension_zero_rejected():
    with pytest.raises(ValueError):
        enumerate_facons(0)
    with pytest.raises(ValueError):
        facon_count_formula(0)
