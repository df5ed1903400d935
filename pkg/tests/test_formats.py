from fractions import Fraction
from random import Random

import pytest

from multicx.derham import PolyVector
from multicx.errors import ParseError
from multicx.formats import (
    format_rational,
    parse_multicomplex,
    parse_retract,
    parse_series,
    parse_structure,
    polyvector_from_terms,
    polyvector_to_terms,
    print_multicomplex,
    print_retract,
    print_series,
    print_structure,
)
from multicx.gauge import OperatorSeries
from multicx.generators import generate, rand_series, rand_space, rand_square_zero, staircase4
from multicx.transfer import build_retract


def test_rational_formatting():
    assert format_rational(Fraction(3, 1)) == "3"
    assert format_rational(Fraction(-4, 6)) == "-2/3"


def test_multicomplex_round_trip_staircase():
    m = staircase4()
    text = print_multicomplex(m, meta={"generator": "hand", "seed": 0})
    back, meta = parse_multicomplex(text)
    assert back == m
    assert meta == {"generator": "hand", "seed": "0"}
    assert print_multicomplex(back, meta=meta) == text


def test_multicomplex_round_trip_random():
    for prof, seed in [("a", 0), ("a", 5), ("b", 2), ("c", 1), ("c", 4)]:
        m = generate(prof, seed)
        text = print_multicomplex(m)
        back, _ = parse_multicomplex(text)
        assert back == m
        assert print_multicomplex(back) == text


def test_multicomplex_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError):
        parse_multicomplex("not a header\n")
    doc = "multicx multicomplex v1\ndegrees\n0 1\noperator 0\n0 0 0 oops\nend\n"
    with pytest.raises(ParseError) as exc:
        parse_multicomplex(doc)
    assert "line 5" in str(exc.value)
    doc = "multicx multicomplex v1\ndegrees\n0 1\n0 2\nend\n"
    with pytest.raises(ParseError):
        parse_multicomplex(doc)


def test_multicomplex_rejects_misordered_operators():
    doc = ("multicx multicomplex v1\ndegrees\n0 1\n1 1\n"
           "operator 1\noperator 0\nend\n")
    with pytest.raises(ParseError):
        parse_multicomplex(doc)


def test_series_round_trip():
    rng = Random(3)
    for _ in range(10):
        space = rand_space(rng)
        s = rand_series(rng, space)
        assert parse_series(print_series(s)) == s
    assert parse_series(print_series(OperatorSeries.zero(space))) == \
        OperatorSeries.zero(space)


def test_retract_round_trip():
    rng = Random(5)
    for _ in range(6):
        space = rand_space(rng)
        d = rand_square_zero(rng, space, -1)
        r, _ = build_retract(space, d)
        back = parse_retract(print_retract(r))
        assert back.proj == r.proj and back.incl == r.incl
        assert back.homotopy == r.homotopy
        assert back.d_big == r.d_big and back.d_small == r.d_small
        assert back.is_valid()


def test_polyvector_terms_round_trip():
    p = PolyVector(3, {((0, 1, 0), (1, 2)): Fraction(-1, 2),
                       ((0, 0, 0), (0,)): 3})
    terms = polyvector_to_terms(p)
    assert all(set(t) == {"coefficient", "monomial", "indices"} for t in terms)
    assert polyvector_from_terms(terms, 3) == p


def test_structure_round_trip_and_validation():
    w = PolyVector(3, {((0, 0, 0), (0, 1)): 1, ((0, 1, 0), (1, 2)): -1})
    e = PolyVector(3, {((0, 0, 0), (2,)): -1})
    text = print_structure(3, w, e)
    dim, back_w, back_e = parse_structure(text)
    assert (dim, back_w, back_e) == (3, w, e)
    dim, back_w, back_e = parse_structure(text, dim=3)
    assert back_w == w
    with pytest.raises(ParseError):
        parse_structure(text, dim=2)
    with pytest.raises(ParseError):
        parse_structure("{broken json")
    with pytest.raises(ParseError):
        parse_structure("{\"dim\": 2}")
