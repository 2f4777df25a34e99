import pytest

from dcalg.cli import bundled_names, read_input
from dcalg.dsl import DslError, parse, to_text
from dcalg.quiver import PresentationError


@pytest.mark.parametrize("name", bundled_names())
def test_round_trip(name):
    doc = parse(read_input(name)[0])
    again = parse(to_text(doc))
    assert again == doc
    assert to_text(again) == to_text(doc)


def test_atiyah_parses(load):
    p = load("atiyah").presentation
    assert p.vertices == ("1", "2")
    assert [a.weight for a in p.arrows] == [1, 1, 1, 1]
    assert len(p.relations) == 4


def test_laufer_relation_encoding(load):
    p = load("laufer").presentation
    first = dict(p.relations[0].terms)
    assert first == {("a", "y", "y"): 1, ("a", "b", "a"): 1}


def test_empty_file():
    with pytest.raises(DslError, match="no vertices"):
        parse("")


def test_unknown_arrow_reports_location():
    with pytest.raises(DslError) as e:
        parse("vertex 1\narrow a: 1 -> 1 weight 1\nrelation a q\n")
    assert e.value.line == 3


def test_inhomogeneous_relation():
    with pytest.raises(PresentationError, match="weight-homogeneous"):
        parse("vertex 1\narrow a: 1 -> 1 weight 1\narrow b: 1 -> 1 weight 2\nrelation a a - b a\n")


def test_superpotential_must_be_cyclic():
    with pytest.raises(PresentationError):
        parse("vertex 1\nvertex 2\narrow a: 1 -> 2 weight 1\nsuperpotential a\n")


def test_unknown_vertex():
    with pytest.raises(PresentationError):
        parse("vertex 1\narrow a: 1 -> 2 weight 1\n")


def test_glued_words_and_powers():
    doc = parse("vertex 1\narrow b: 1 -> 1 weight 1\narrow s: 1 -> 1 weight 1\n"
                "relation bsbs - (bs)^2 + 1/2 b^3 s\n")
    terms = dict(doc.presentation.relations[0].terms)
    assert terms == {("b", "b", "b", "s"): 1 / 2}


def test_comments_and_rationals():
    doc = parse("# a loop\nvertex 1  # the only vertex\narrow x: 1 -> 1 weight 1\n"
                "superpotential 2/3 x x x\n")
    assert str(doc.superpotential) == "2/3 x x x"
