from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perigrowth.ball import distances_upto, growth_sequence, relative_counts
from perigrowth.errors import InputError, NoFitError
from perigrowth.periodic_graph import PeriodicVertex, parse_periodic_graph
from perigrowth.series import (
    MultivariateRationalSeries,
    RationalSeries,
    canonicalize,
    default_denominator,
    evaluate_series,
    expand_mv_series,
    expand_series,
    fit_multivariate,
    fit_univariate,
    fit_univariate_auto,
    qp_evaluate,
    quasi_polynomial,
    s_from_b,
    series_from_text,
    series_to_text,
    specialize_to_univariate,
)

from oracles import honeycomb_patch_growth


def test_default_denominator_square(square):
    assert default_denominator(square) == ((1, 5),)


def test_default_denominator_honeycomb(honeycomb):
    assert default_denominator(honeycomb) == ((1, 1), (2, 9))


def test_default_denominator_edgeless():
    g = parse_periodic_graph("dim 1\nvertex v\n")
    assert default_denominator(g) == ((1, 1),)


def test_fit_constant_ones():
    fit = fit_univariate([1] * 21, [(1, 1)])
    assert fit.numerator == (1,)
    assert fit.factors == ((1, 1),)
    assert fit.verified_through == 20


def test_fit_square_canonical(square):
    terms = growth_sequence(square, square.vertex(0), 50).terms
    # oracle first: (1+t)^2/(1-t)^2 expands to 1, 4i
    closed = RationalSeries((1, 2, 1), ((1, 2),), 50)
    assert expand_series(closed, 50) == list(terms)
    fit = canonicalize(fit_univariate(terms, default_denominator(square)))
    assert fit.numerator == (1, 2, 1)
    assert fit.factors == ((1, 2),)
    assert fit.verified_through == 50


def test_fit_honeycomb_canonical(honeycomb):
    terms = growth_sequence(honeycomb, honeycomb.vertex(0), 60).terms
    assert list(terms) == honeycomb_patch_growth(60)
    fit = canonicalize(fit_univariate(terms, default_denominator(honeycomb)))
    assert fit.numerator == (1, 1, 1)
    assert fit.factors == ((1, 2),)
    # cross-check the fitted form against the independent patch terms
    assert expand_series(fit, 60) == honeycomb_patch_growth(60)


def test_fit_reports_no_fit():
    terms = [2**i for i in range(30)]  # not rational with cyclotomic denominator
    with pytest.raises(NoFitError):
        fit_univariate(terms, [(1, 2)])


def test_fit_insufficient_terms():
    with pytest.raises(InputError):
        fit_univariate([1, 1, 1], [(1, 1)], numerator_degree=2, margin=10)


def test_evaluate_examples():
    square_series = RationalSeries((1, 2, 1), ((1, 2),), 50)
    assert evaluate_series(square_series, 7) == 28
    ones = RationalSeries((1,), ((1, 1),), 10)
    assert evaluate_series(ones, 0) == 1


def test_evaluate_matches_fit_terms(z_pm):
    terms = growth_sequence(z_pm, z_pm.vertex(0), 25).terms
    fit = fit_univariate(terms, default_denominator(z_pm))
    assert expand_series(fit, 25) == list(terms)


@settings(max_examples=60, derandomize=True, deadline=None)
@given(
    num=st.lists(st.integers(-4, 4), min_size=1, max_size=5),
    periods=st.lists(st.integers(1, 3), min_size=1, max_size=3),
)
def test_fit_round_trip_property(num, periods):
    source = RationalSeries(tuple(num), tuple((w, 1) for w in set(periods)), 0)
    through = 40
    terms = expand_series(source, through)
    fit = fit_univariate(terms, source.factors)
    assert expand_series(fit, through) == terms
    reduced = canonicalize(fit)
    assert expand_series(reduced, through) == terms


def test_quasi_polynomial_square():
    qp = quasi_polynomial(RationalSeries((1, 2, 1), ((1, 2),), 50))
    assert qp.period == 1
    assert qp.threshold == 1
    assert qp.exceptions == {0: 1}
    assert qp.polynomials[0] == (Fraction(0), Fraction(4))
    assert [qp_evaluate(qp, i) for i in range(6)] == [1, 4, 8, 12, 16, 20]


def test_quasi_polynomial_even_indicator():
    qp = quasi_polynomial(RationalSeries((1,), ((2, 1),), 30))
    assert qp.period == 2
    assert qp.threshold == 0
    assert qp.exceptions == {}
    assert qp.polynomials == ((Fraction(1),), (Fraction(0),))


def test_quasi_polynomial_geometric():
    qp = quasi_polynomial(RationalSeries((1,), ((1, 1),), 30))
    assert qp.period == 1
    assert qp.polynomials == ((Fraction(1),),)


def test_quasi_polynomial_matches_series_everywhere(honeycomb):
    terms = growth_sequence(honeycomb, honeycomb.vertex(0), 40).terms
    fit = canonicalize(fit_univariate(terms, default_denominator(honeycomb)))
    qp = quasi_polynomial(fit)
    for i in range(fit.verified_through + 1):
        assert qp_evaluate(qp, i) == evaluate_series(fit, i)


def _diagonal_table(z_pm, box):
    base = PeriodicVertex(0, (0,))
    dm = distances_upto(z_pm, base, max(box))
    diagonal = [(v, v) for v in dm.entries]
    return relative_counts(z_pm, base, diagonal, box)


def test_fit_multivariate_diagonal(z_pm):
    table = _diagonal_table(z_pm, (12, 12))
    fit = fit_multivariate(table.counts_exact, (12, 12), [((1, 1), 1)])
    assert fit.numerator == {(0, 0): 1, (1, 1): 1}
    assert fit.factors == (((1, 1), 1),)


def test_fit_multivariate_numerator_box(z_pm):
    table = _diagonal_table(z_pm, (12, 12))
    fit = fit_multivariate(
        table.counts_exact, (12, 12), [((1, 1), 1)], numerator_box=(1, 1)
    )
    assert fit.numerator == {(0, 0): 1, (1, 1): 1}
    with pytest.raises(NoFitError):
        fit_multivariate(
            table.counts_exact, (12, 12), [((1, 1), 1)], numerator_box=(0, 0)
        )


def test_fit_multivariate_d1_matches_univariate(square):
    base = square.vertex(0)
    terms = growth_sequence(square, base, 20).terms
    dm = distances_upto(square, base, 20)
    table = relative_counts(square, base, [(v,) for v in dm.entries], (20,))
    mv = fit_multivariate(table.counts_exact, (20,), [((1,), 5)])
    uni = fit_univariate(terms, ((1, 5),))
    assert {a[0]: c for a, c in mv.numerator.items()} == {
        i: c for i, c in enumerate(uni.numerator) if c
    }


def test_fit_multivariate_product_structure(z_pm):
    base = PeriodicVertex(0, (0,))
    box = (10, 10)
    dm = distances_upto(z_pm, base, 10)
    pairs = [(v, w) for v in dm.entries for w in dm.entries]
    table = relative_counts(z_pm, base, pairs, box)
    fit = fit_multivariate(
        table.counts_exact, box, [((1, 0), 1), ((0, 1), 1)]
    )
    # expansion equals the product of the univariate growth data
    terms = growth_sequence(z_pm, base, 10).terms
    expansion = expand_mv_series(fit, box)
    for a1 in range(11):
        for a2 in range(11):
            assert expansion[(a1, a2)] == terms[a1] * terms[a2]


def test_s_from_b_d1():
    b = MultivariateRationalSeries(1, {(0,): 1}, (((1,), 2),), (10,))
    s = s_from_b(b)
    assert s.factors == (((1,), 1),)
    assert s.numerator == {(0,): 1}


def test_s_from_b_diagonal(z_pm):
    box = (12, 12)
    table = _diagonal_table(z_pm, box)
    fit_s = fit_multivariate(table.counts_exact, box, [((1, 1), 1)])
    fit_b = fit_multivariate(
        table.counts_cumulative, box, [((1, 0), 1), ((0, 1), 1), ((1, 1), 1)]
    )
    derived = s_from_b(fit_b)
    assert expand_mv_series(derived, box) == expand_mv_series(fit_s, box)


def test_s_from_b_zero_series():
    empty = MultivariateRationalSeries(2, {}, (((1, 1), 1),), (6, 6))
    derived = s_from_b(empty)
    assert derived.numerator == {}
    expansion = expand_mv_series(derived, (6, 6))
    assert all(c == 0 for c in expansion.values())


def test_specialize_diagonal():
    ms = MultivariateRationalSeries(
        2, {(0, 0): 1, (1, 1): 1}, (((1, 1), 1),), (12, 12)
    )
    rs = specialize_to_univariate(ms)
    assert rs.numerator == (1, 0, 1)
    assert rs.factors == ((2, 1),)
    assert rs.verified_through == 12


def test_specialize_d1_identity():
    ms = MultivariateRationalSeries(1, {(0,): 1, (2,): 1}, (((1,), 1),), (15,))
    rs = specialize_to_univariate(ms)
    assert rs.numerator == (1, 0, 1)
    assert rs.factors == ((1, 1),)


def test_series_text_round_trip(z_pm):
    terms = growth_sequence(z_pm, z_pm.vertex(0), 25).terms
    fit = canonicalize(fit_univariate(terms, default_denominator(z_pm)))
    assert series_from_text(series_to_text(fit)) == RationalSeries(
        fit.numerator, fit.factors, fit.verified_through
    )
    ms = MultivariateRationalSeries(
        2, {(0, 0): 1, (1, 1): 1}, (((1, 1), 1),), (12, 12)
    )
    assert series_from_text(series_to_text(ms)) == ms


def test_escalation_ladder_squares_factors():
    # terms of 1/(1-t)^2 cannot fit over (1-t) but fit after squaring
    source = RationalSeries((1,), ((1, 2),), 0)
    terms = expand_series(source, 30)
    fit = fit_univariate_auto(terms, ((1, 1),))
    assert fit.factors == ((1, 2),)
