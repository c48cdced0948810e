from __future__ import annotations

import json
from fractions import Fraction

import pytest

from walkgen.errors import GraphFormatError
from walkgen.graphs import (
    BUILTINS,
    builtin,
    cancelling_square,
    dump_graph,
    load_graph,
    parse_graph,
    random_graph,
    zero_return_triangle,
)
from walkgen.grids import encode
from walkgen.scalars import gauss
from walkgen.series import TruncatedSeries, mul
from walkgen.walks import coefficients


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_builtins_construct(name):
    choice = builtin(name)
    assert choice.v is not None
    assert choice.oracle.neighbors(choice.oracle.root)


def test_grid_builtin_targets():
    assert builtin("grid", d=2).v is None
    assert builtin("grid", d=2, v="1,0").v == encode((1, 0))
    with pytest.raises(GraphFormatError):
        builtin("grid")


def test_unknown_builtin():
    with pytest.raises(GraphFormatError):
        builtin("petersen")


def test_random_graphs_are_seeded():
    assert random_graph(4).edges == random_graph(4).edges
    assert random_graph(4).edges != random_graph(5).edges
    assert builtin("random4").oracle.edges == random_graph(4).edges


def test_zero_return_triangle_closed_form():
    # B(x) = (1 - x^2) / (1 + (720/1681) x^3)
    b = coefficients(zero_return_triangle(), 2, 12).b
    num = TruncatedSeries([1, 0, -1] + [0] * 10)
    den = TruncatedSeries([1, 0, 0, Fraction(720, 1681)] + [0] * 9)
    assert mul(b, den) == num


def test_cancelling_square_never_reaches_target():
    b = coefficients(cancelling_square(), 4, 12)
    assert all(x == 0 for x in b.c_v.coeffs)
    assert b.b_v == b.b


def test_parse_edges_form():
    desc = {"edges": [[1, 2, "1/2"], [2, 3, 0, "1/3"]], "v": 3, "v_transitive": True}
    choice = parse_graph(desc)
    assert choice.v == 3
    assert choice.oracle.neighbors(2) == [(1, Fraction(1, 2)), (3, gauss(0, Fraction(1, 3)))]
    assert choice.oracle.v_transitive


@pytest.mark.parametrize("desc", [
    [],
    {},
    {"edges": [[1, 2]]},
    {"edges": [[1, 1, 1]]},
    {"edges": [["a", 2, 1]]},
    {"edges": [[1, 2, "x"]]},
    {"edges": [[1, 2, 1, 2, 3]]},
    {"edges": [[1, 2, 1]], "root": "one"},
])
def test_parse_rejects_bad_descriptions(desc):
    with pytest.raises(GraphFormatError):
        parse_graph(desc)


def test_dump_load_round_trip(tmp_path):
    g = random_graph(9, complex_weights=True)
    path = tmp_path / "g.json"
    path.write_text(json.dumps(dump_graph(g, 6)))
    choice = load_graph(path)
    assert choice.v == 6
    assert choice.oracle.edges == g.edges


def test_load_errors(tmp_path):
    with pytest.raises(GraphFormatError):
        load_graph(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(GraphFormatError):
        load_graph(bad)
