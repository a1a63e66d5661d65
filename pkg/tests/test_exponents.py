from fractions import Fraction as F

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from wavecrit import exponents as ex
from wavecrit.exponents import INF, AdmissiblePair, HolderSplit


def test_critical_regularity_values():
    assert ex.critical_regularity(6) == 2
    assert ex.critical_regularity(4) == 1
    assert ex.critical_regularity(3) == F(1, 2)
    with pytest.raises(ex.DomainError):
        ex.critical_regularity(2)


@pytest.mark.parametrize("d,expected", [(6, F(13, 10)), (7, F(11, 6)), (8, F(33, 14))])
def test_alpha_exponent(d, expected):
    assert ex.alpha_exponent(d) == expected


def test_alpha_exponent_domain():
    with pytest.raises(ex.DomainError):
        ex.alpha_exponent(5)


def test_alpha_matches_symbolic_formula():
    d = sympy.symbols("d")
    expr = (d ** 2 - 4 * d + 1) / (2 * (d - 1))
    for k in range(6, 40):
        v = expr.subs(d, k)
        assert ex.alpha_exponent(k) == F(int(v.p), int(v.q))


@pytest.mark.parametrize("d", [2, 3, 6, 11])
def test_endpoint_pair_is_admissible(d):
    assert ex.is_wave_admissible(AdmissiblePair(INF, 2, 0, d))


def test_scattering_norm_pair():
    assert ex.is_wave_admissible(AdmissiblePair(7, 7, 2, 6))


def test_interpolation_pair_at_d6():
    assert ex.is_wave_admissible(AdmissiblePair(2, F(10, 3), F(7, 10), 6))


def test_pair_validation():
    with pytest.raises(ValueError):
        AdmissiblePair(1, 4, 0, 6)
    with pytest.raises(ValueError):
        AdmissiblePair(4, INF, 0, 6)


def test_admissible_regularity_solves_scaling():
    s = ex.admissible_regularity(7, 7, 6)
    assert s == 2
    assert AdmissiblePair(7, 7, s, 6).scaling_residual() == 0


@given(st.integers(2, 40), st.integers(2, 40), st.integers(3, 30))
def test_unique_regularity_per_pair(q, r, d):
    s = ex.admissible_regularity(q, r, d)
    pair = AdmissiblePair(q, r, s, d)
    assert pair.scaling_residual() == 0
    assert not ex.is_wave_admissible(AdmissiblePair(q, r, s + F(1, 100), d))
    assert ex.is_wave_admissible(pair) == (pair.decay_slack() >= 0)


@pytest.mark.parametrize("d,window", [(6, (F(10, 3), F(18, 5))), (7, (F(3), F(7, 2))), (10, (F(18, 7), F(10, 3)))])
def test_decay_window(d, window):
    assert ex.decay_R_window(d) == window


def test_decay_window_positive_width_up_to_1000():
    for d in range(6, 1001):
        lo, hi = ex.decay_R_window(d)
        assert hi > lo


def test_holder_splits():
    assert ex.holder_split_valid(HolderSplit(F(1, 2), [F(1, 4), F(1, 4)]))
    assert ex.holder_split_valid(HolderSplit(F(11, 14), [F(1, 2), F(2, 7)]))
    assert not ex.holder_split_valid(HolderSplit(F(1, 2), [F(1, 3), F(1, 4)]))


def test_evaluate_is_exact_and_safe():
    assert ex.evaluate("2*(d-1)/(d-3)", d=6) == F(10, 3)
    assert ex.evaluate("min(2*d/(d-4), 3*d/(d-1))", d=6) == F(18, 5)
    assert ex.evaluate("inf") is INF
    assert ex.reciprocal(INF) == 0
    with pytest.raises(Exception):
        ex.evaluate("__import__('os')", d=6)
    with pytest.raises(Exception):
        ex.evaluate("d ** 0.5", d=6)


@pytest.mark.parametrize("d", [6, 7, 13, 64])
def test_claim_database_passes(d):
    report = ex.verify_claims(d)
    assert report.all_passed, [r.id for r in report.failures]


def test_forcing_index_identity_is_recorded_as_false():
    claims = {c.id: c for c in ex.load_claims()}
    res = ex.check_claim(claims["adm.stability_forcing_index"], 6)
    assert res.expected is False and res.holds is False and res.passed
    assert res.residual == F(1, 10)


def test_open_pair_is_admissible():
    claims = {c.id: c for c in ex.load_claims()}
    for d in (6, 9, 30):
        res = ex.check_claim(claims["adm.stability_pair"], d)
        assert res.holds


def test_perturbed_claim_fails_with_residual():
    claims = {c.id: c for c in ex.load_claims()}
    bad = ex.perturb_claim(claims["adm.scatter_norm"], "s", "1/100")
    report = ex.verify_claims(6, [bad])
    assert not report.all_passed
    assert report.failures[0].id.startswith("adm.scatter_norm")
    assert report.failures[0].residual != 0


def test_claim_dims_below_six_rejected():
    with pytest.raises(ex.DomainError):
        ex.verify_claims(5)


def test_bad_record_rejected():
    with pytest.raises(ex.ClaimFormatError):
        ex.Claim.from_record({"id": "x", "kind": "nope"})


fractions = st.fractions(min_value=-50, max_value=50, max_denominator=1000)


@settings(max_examples=200)
@given(fractions, fractions, fractions)
def test_rational_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    if b != 0:
        assert (a / b) * b == a
