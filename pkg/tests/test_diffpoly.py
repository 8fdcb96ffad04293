import json
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from pilab.diffpoly import (
    DiffPoly, apply_lenard_operator, evaluate, generate_equation, generate_kdv_flow,
    integrate_total_derivative, lenard, partial, q, s, t, total_derivative, verify_lax_identities,
)
from pilab.diffpoly.fixtures import FIXTURE_ORDERS, fixture_path, load_fixture, load_fixture_file
from pilab.diffpoly.ring import monomial_weight
from pilab.errors import MissingAssignment, NotATotalDerivative, OddOrderRequested, SchemaViolation

JET = 8

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=7)


@st.composite
def diffpolys(draw, max_terms=4):
    """Random polynomials in q0..q3, s, t1 with small rational coefficients."""
    names = ["q0", "q1", "q2", "q3", "s", "t1"]
    p = DiffPoly()
    for _ in range(draw(st.integers(0, max_terms))):
        c = draw(rationals)
        term = DiffPoly.const(c)
        for name in draw(st.lists(st.sampled_from(names), max_size=3)):
            term = term * DiffPoly.var(name)
        p = p + term
    return p


@st.composite
def jets(draw):
    pt = {f"q{j}": draw(rationals) for j in range(JET)}
    pt["s"] = draw(rationals)
    pt["t1"] = draw(rationals)
    return pt


# --- total derivative ---------------------------------------------------

def test_total_derivative_examples():
    assert total_derivative(q(0) * q(0)) == 2 * q(0) * q(1)
    assert total_derivative(s) == DiffPoly.const(1)
    assert total_derivative(6 * q(0) ** 2 - q(2)) == 12 * q(0) * q(1) - q(3)


def _sympy_curve(coeffs):
    x = sp.Symbol("x")
    return x, sum(sp.Rational(c.numerator, c.denominator) * x ** i for i, c in enumerate(coeffs))


@settings(max_examples=40, deadline=None)
@given(diffpolys(), st.lists(rationals, min_size=2, max_size=6), rationals)
def test_total_derivative_is_chain_rule_along_a_curve(p, coeffs, s0):
    # oracle: substitute a concrete polynomial q(s) and differentiate with sympy
    # t1 is held at 3/2, a constant along the curve
    x, curve = _sympy_curve(coeffs)

    def at(poly):
        expr = sp.Integer(0)
        for mono, c in poly.items():
            term = sp.Rational(c.numerator, c.denominator)
            for (kind, idx), e in mono:
                base = sp.diff(curve, x, idx) if kind == 0 else (x if kind == 1 else sp.Rational(3, 2))
                term *= base ** e
            expr += term
        return expr

    lhs = at(total_derivative(p)).subs(x, sp.Rational(s0.numerator, s0.denominator))
    rhs = sp.diff(at(p), x).subs(x, sp.Rational(s0.numerator, s0.denominator))
    assert sp.simplify(lhs - rhs) == 0


# --- Lenard operator and its inverse -------------------------------------

def test_lenard_operator_examples():
    assert apply_lenard_operator(DiffPoly()) == DiffPoly()
    assert apply_lenard_operator(-4 * q(0)) == -q(3) + 12 * q(0) * q(1)
    want = (-Fraction(1, 4) * q(5) + 5 * q(0) * q(3) + 10 * q(1) * q(2)
            - 30 * q(0) ** 2 * q(1))
    assert apply_lenard_operator(6 * q(0) ** 2 - q(2)) == want
    assert want == total_derivative(lenard(2))


def test_integrate_examples():
    out = integrate_total_derivative(12 * q(0) * q(1) - q(3))
    assert out == 6 * q(0) ** 2 - q(2)
    assert total_derivative(out) == 12 * q(0) * q(1) - q(3)
    assert integrate_total_derivative(DiffPoly.const(1)) == s
    assert integrate_total_derivative(DiffPoly()) == DiffPoly()


def test_integrate_rejects_non_derivatives():
    # q q'' = D(q q') - q'^2 and q'^2 has no preimage
    with pytest.raises(NotATotalDerivative):
        integrate_total_derivative(q(0) * q(2))


@pytest.mark.parametrize("k", range(8))
def test_recursion_round_trip(k):
    assert total_derivative(lenard(k + 1)) == apply_lenard_operator(lenard(k))


@pytest.mark.parametrize("k", range(8))
def test_lenard_grading(k):
    weights = {monomial_weight(mono) for mono, _ in lenard(k).items()}
    assert weights == {2 * k + 2}


# --- equations and flows ------------------------------------------------

def test_m0_equation():
    assert generate_equation(0).paper_normalized == s - 4 * q(0)


def test_m3_leading_terms():
    eq = generate_equation(3, allow_odd=True).paper_normalized
    assert eq.terms[(((0, 6), 1),)] == -1
    assert eq.terms[(((1, 0), 1),)] == 16
    assert eq.terms[(((0, 0), 1), ((0, 4), 1))] == 28
    assert eq.terms[(((0, 1), 1), ((0, 3), 1))] == 56


def test_m4_leading_terms():
    eq = generate_equation(4).paper_normalized
    assert eq.terms[(((0, 8), 1),)] == -1
    assert eq.terms[(((1, 0), 1),)] == 64
    assert eq.terms[(((0, 0), 1), ((0, 6), 1))] == 36


def test_odd_order_needs_override():
    with pytest.raises(OddOrderRequested):
        generate_equation(3)


@pytest.mark.parametrize("m", FIXTURE_ORDERS)
def test_fixtures_match(m):
    assert generate_equation(m, allow_odd=True).paper_normalized == load_fixture(m)


def test_kdv_flow_examples():
    assert generate_kdv_flow(1).rhs == -4 * q(0) * q(1) + Fraction(1, 3) * q(3)
    assert {monomial_weight(mono) for mono, _ in generate_kdv_flow(2).rhs.items()} == {7}
    pt = {f"q{j}": 0 for j in range(8)}
    pt["q0"] = Fraction(7, 3)
    assert generate_kdv_flow(1).rhs.evaluate_exact(pt) == 0


@pytest.mark.parametrize("m", [2, 4, 6])
def test_lax_identities(m):
    rep = verify_lax_identities(m)
    assert rep.passed, rep.lines()


# --- evaluation ---------------------------------------------------------

def test_evaluate_examples():
    assert evaluate(6 * q(0) ** 2 - q(2), {"q0": 1, "q2": 0}) == 6
    assert partial(6 * q(0) ** 2, "q0") == 12 * q(0)
    with pytest.raises(MissingAssignment):
        evaluate(q(0) * t(1), {"q0": 1})


@settings(max_examples=100, deadline=None)
@given(diffpolys(), diffpolys(), jets())
def test_evaluate_is_a_ring_homomorphism(p, r, pt):
    assert (p * r).evaluate_exact(pt) == p.evaluate_exact(pt) * r.evaluate_exact(pt)
    assert (p + r).evaluate_exact(pt) == p.evaluate_exact(pt) + r.evaluate_exact(pt)


@settings(max_examples=60, deadline=None)
@given(diffpolys())
def test_json_round_trip(p):
    text = p.to_json()
    back = DiffPoly.from_json(text)
    assert back == p
    assert back.to_json() == text


def test_schema_violations_name_the_document(tmp_path):
    with pytest.raises(SchemaViolation, match="doc.json"):
        DiffPoly.from_json('{"vars": ["q0"], "terms": [{"exp": [1, 2], "num": "1", "den": "1"}]}',
                           where="doc.json")
    with pytest.raises(SchemaViolation):
        DiffPoly.from_json('{"vars": ["x9"], "terms": []}')


def test_corrupted_fixture_names_path(tmp_path):
    obj = json.loads(fixture_path(2).read_text())
    obj["terms"][0]["den"] = "zero"
    bad = tmp_path / "pi_m2.json"
    bad.write_text(json.dumps(obj))
    with pytest.raises(SchemaViolation) as info:
        load_fixture_file(bad)
    assert str(bad) in str(info.value)
    assert info.value.details["path"] == str(bad)
