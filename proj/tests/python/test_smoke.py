import json
from fractions import Fraction

import pytest

import ufhom


def test_ball_sizes_z2():
    assert ufhom.ball_sizes("Z2", 5) == [2 * r * r + 2 * r + 1 for r in range(6)]


def test_growth_even_sublattice_density():
    t = ufhom.growth("Z2", "cubes", 20, "chi_even_x")
    last = t["rows"][-1]
    assert last["j"] == 20
    assert abs(last["beta"] - Fraction(1, 2)) < Fraction(1, 20)
    assert all(0 <= r["beta"] <= 1 for r in t["rows"])


def test_compare_prec():
    n = list(range(1, 201))
    v = ufhom.compare(n, [Fraction(1, k) for k in n], [Fraction(1)] * len(n))
    assert v["relation"] == "prec"


def test_sparse_build_radii():
    s = ufhom.sparse_build("Z", "supergeo", 3)
    assert [r["r"] for r in s["rows"]] == [1, 1, 3, 81]


def test_thick_round_trip():
    tf = ufhom.thick_build("Z2", "axes:1", 2, 2)
    assert len(tf["tiles"]) == 4
    rep = ufhom.thick_verify(tf, 20, 5)
    assert rep["ok"]


def test_errors_are_typed():
    with pytest.raises(ValueError):
        ufhom.ball_sizes("Q8", 2)


def test_cli_exit_codes(tmp_path):
    out = tmp_path / "b.json"
    assert ufhom.run(["ball", "--group", "Z", "--radius", "3", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["size"] == 7
    assert ufhom.run(["ball", "--group", "Z", "--nope", "1"]) == 1
