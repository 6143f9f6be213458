import pytest

from qcoha.quiver import (
    Cut,
    DimVector,
    InvalidCut,
    Potential,
    Quiver,
    QuiverError,
    b_matrix,
    chi,
    cut_relations,
    cyclic_derivative,
    is_degree_preserving,
    is_symmetric,
    l0,
    l1,
    l_gamma,
    parse_word,
    render_path,
)
from qcoha.specio import SpecError, load_spec, parse_spec


def test_b_matrix_one_vertex():
    assert b_matrix(Quiver.loops(1)) == [[0]]
    assert b_matrix(Quiver.loops(0)) == [[1]]
    assert b_matrix(Quiver.loops(3)) == [[-2]]


def test_euler_form():
    q = Quiver.loops(1)
    g = q.dim([1])
    assert chi(q, g, g) == 0
    assert l0(q, g, g) == l1(q, g, g) == 1
    n = Quiver.loops(0)
    assert chi(n, n.dim([2]), n.dim([3])) == 6
    assert l_gamma(DimVector((2, 3))) == 8


@pytest.mark.parametrize("m", [1, 2, 3])
def test_genus2_chi(m):
    q = load_spec("genus2").quiver
    g = q.dim([m] * 4)
    assert chi(q, g, g) == -8 * m * m


def test_symmetry():
    for n in range(4):
        assert is_symmetric(Quiver.loops(n))
    assert not is_symmetric(load_spec("genus2").quiver)
    assert is_symmetric(load_spec("sym2v").quiver)


def test_degree_preserving_single_arrow():
    q = Quiver.build(["1", "2"], [("a", "1", "2")])
    assert not is_degree_preserving(q, [q.dim([1, 0]), q.dim([0, 1])])
    assert is_degree_preserving(Quiver.loops(2), [DimVector((1,)), DimVector((2,))])


def test_dim_vector_arithmetic():
    a, b = DimVector((1, 2)), DimVector((2, 1))
    assert a + b == DimVector((3, 3))
    assert (a + b) - a == b
    assert a.total == 3
    assert not a <= b
    assert len(DimVector((2, 1)).splittings()) == 6
    with pytest.raises(QuiverError):
        DimVector((-1,))


def test_cyclic_derivative_jordan():
    q = Quiver.loops(1, "X")
    for d in (1, 2, 3):
        w = Potential.from_words(q, [(1, "X" * (d + 1))])
        assert str(cyclic_derivative(w, "X")) == f"{d + 1}*{'X' * d}"


def test_three_loop_relation():
    spec = load_spec("three_loop")
    assert str(cyclic_derivative(spec.potential, "x")) == "yz - zy"
    rel = cut_relations(spec.potential, Cut.of(["x"]))
    assert {k: str(v) for k, v in rel.items()} == {"x": "yz - zy"}


def test_genus2_relations():
    spec = load_spec("genus2")
    rel = cut_relations(spec.potential, spec.cut)
    assert {k: str(v) for k, v in rel.items()} == {
        "a": "lgf - jgd", "b": "jhd - khe", "c": "kie - lif"}


def test_invalid_cut():
    q = Quiver.loops(1, "X")
    w = Potential.from_words(q, [(1, "XX")])
    with pytest.raises(InvalidCut):
        cut_relations(w, Cut.of(["X"]))
    three = load_spec("three_loop")
    assert not Cut.of([]).is_valid(three.potential)
    assert Cut.of(["x"]).is_valid(three.potential)


def test_path_roundtrip():
    q = load_spec("genus2").quiver
    assert render_path(parse_word("lgfa", q)) == "lgfa"
    with pytest.raises(QuiverError):
        parse_word("az", q)


def test_malformed_spec():
    with pytest.raises(SpecError, match="line 1"):
        parse_spec("{bad", "x")
    with pytest.raises(SpecError):
        parse_spec('{"vertices": ["1"], "arrows": [{"name": "a", "from": "1", "to": "9"}]}', "x")
