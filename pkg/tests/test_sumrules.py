import json
import math

import mpmath
import pytest

from airylab.errors import ArgumentError, DivergenceError
from airylab.spectra import airy_zero
from airylab.sumrules import (
    REPORT_FIELDS,
    SumFamily,
    SummationConfig,
    evaluate_sum,
    identity_ids,
    records_for,
    registry,
    reports_to_csv,
    reports_to_jsonl,
    tilde_sums,
    verify_identity,
    verify_record,
)

SMALL = SummationConfig(explicit_terms=2000)


def test_examples():
    assert evaluate_sum(SumFamily("T", 1, 5)).total == pytest.approx(0.25, rel=1e-10)
    assert abs(evaluate_sum(SumFamily("T", 4, 3)).total) < 1e-9
    assert evaluate_sum(SumFamily("U", 2, 2)).total == pytest.approx(1.0, rel=1e-6)


def test_evaluation_invariants():
    ev = evaluate_sum(SumFamily("S", 3, 4), SMALL)
    assert ev.total == ev.explicit_sum + ev.tail_estimate
    assert ev.est_error >= 0
    assert ev.explicit_terms == 1999  # k = n is skipped
    assert ev.tail_method == "integral_euler_maclaurin"


def test_explicit_part_against_mpmath_direct_sum():
    # the first 100 terms of T_5(2) at 30 digits
    mpmath.mp.dps = 30
    zeta = mpmath.airyaizero(2)
    ref = mpmath.fsum(
        1 / (-mpmath.airyaizero(k, derivative=1) * (-mpmath.airyaizero(k, derivative=1) + zeta) ** 5)
        for k in range(1, 101)
    )
    cfg = SummationConfig(explicit_terms=100, tail_method="none")
    assert evaluate_sum(SumFamily("T", 2, 5), cfg).explicit_sum == pytest.approx(float(ref), rel=1e-13)


@pytest.mark.parametrize("tag", ["T", "U", "Ttilde", "Utilde", "S"])
@pytest.mark.parametrize("p", [0, 1])
def test_divergence_below_threshold(tag, p):
    with pytest.raises(DivergenceError):
        SumFamily(tag, 1, p)


def test_bad_labels_and_config():
    with pytest.raises(ArgumentError):
        SumFamily("T", 0, 3)
    with pytest.raises(ArgumentError):
        SumFamily("HalfShoTRK", -1)
    with pytest.raises(ArgumentError):
        SummationConfig(explicit_terms=50)
    with pytest.raises(ArgumentError):
        SummationConfig(tail_method="richardson")


def test_tilde_sums():
    zeta1 = airy_zero("ai", 1)
    t5, u5 = tilde_sums(5, 1)
    assert t5 == pytest.approx(7 * zeta1 / 12, rel=1e-10)
    assert u5 == pytest.approx(airy_zero("aiprime", 1) / 4, rel=1e-10)
    t4, u4 = tilde_sums(4, 2)
    assert t4 == pytest.approx(evaluate_sum(SumFamily("Ttilde", 2, 4)).total, rel=1e-8)
    assert u4 == pytest.approx(evaluate_sum(SumFamily("Utilde", 2, 4)).total, rel=1e-8)
    with pytest.raises(DivergenceError):
        tilde_sums(2, 1)


def test_registry_contents():
    ids = identity_ids()
    assert "linear.trk" in ids
    assert len([i for i in ids if i.startswith("bouncer.")]) == 5
    assert len(ids) == 15
    keys = [r.key for r in registry()]
    assert len(keys) == len(set(keys))


def test_records_lookup():
    assert [r.part for r in records_for("linear.trk")] == ["T5", "U5"]
    assert [r.key for r in records_for("linear.trk:U5")] == ["linear.trk:U5"]
    with pytest.raises(ArgumentError):
        records_for("bogus")


def test_constant_rhs_identities_are_n_independent():
    constant = ["linear.force_squared:T2", "linear.force_squared:U2", "linear.force_momentum:T3",
                "linear.trk:T5", "linear.trk:U5"]
    for key in constant:
        (rec,) = records_for(key)
        for n in range(1, 21):
            assert verify_record(rec, n).passed, (key, n)
    (rec,) = records_for("halfsho.trk")
    for n in range(0, 20):
        assert verify_record(rec, n).passed


def test_force_momentum_even_part_scales_as_inverse_eta():
    for n in (1, 5, 12):
        u3 = evaluate_sum(SumFamily("U", n, 3)).total
        assert u3 * airy_zero("aiprime", n) == pytest.approx(0.5, rel=1e-10)


def test_even_monopole_sign():
    n = 3
    eta = airy_zero("aiprime", n)
    total = evaluate_sum(SumFamily("EvenEvenMonopole", n)).total
    assert total == pytest.approx((8 * eta**2 / 15 + 1 / (5 * eta)) / 36, rel=1e-10)


def test_half_sho_completeness_needs_diagonal():
    # the diagonal term D_n^2 is required to reach (8n+6) pi
    from airylab.specfun import d_coefficient

    n = 2
    total = evaluate_sum(SumFamily("HalfShoCompleteness", n)).total
    assert total == pytest.approx((8 * n + 6) * math.pi, rel=1e-10)
    dn = d_coefficient(n).float
    assert abs(total - dn * dn - (8 * n + 6) * math.pi) > 1.0


@pytest.mark.parametrize(
    "family",
    [SumFamily("U", 1, 2), SumFamily("Utilde", 2, 2), SumFamily("HalfShoCompleteness", 1)],
    ids=["U2", "Utilde2", "halfsho-completeness"],
)
def test_convergence_with_more_terms(family):
    ref = evaluate_sum(family, SummationConfig(explicit_terms=64000)).total
    raw = [abs(evaluate_sum(family, SummationConfig(explicit_terms=k, tail_method="none")).total - ref)
           for k in (500, 1000, 2000, 4000)]
    assert all(a > b for a, b in zip(raw, raw[1:]))
    acc = [evaluate_sum(family, SummationConfig(explicit_terms=k)) for k in (500, 1000, 2000)]
    errs = [abs(e.total - ref) for e in acc]
    # with the tail the error reaches rounding level; it never grows beyond the estimate
    for prev, cur, ev in zip(errs, errs[1:], acc[1:]):
        assert cur <= max(prev, ev.est_error)


@pytest.mark.parametrize(
    "family",
    [SumFamily("U", 1, 2), SumFamily("T", 5, 3), SumFamily("S", 4, 7), SumFamily("HalfShoTRK", 3),
     SumFamily("EvenEvenMonopole", 2)],
    ids=lambda f: f.label,
)
@pytest.mark.parametrize("k", [250, 1000, 4000])
def test_error_estimate_is_honest(family, k):
    a = evaluate_sum(family, SummationConfig(explicit_terms=k))
    b = evaluate_sum(family, SummationConfig(explicit_terms=4 * k))
    assert a.est_error >= abs(a.total - b.total)
    raw = evaluate_sum(family, SummationConfig(explicit_terms=k, tail_method="none"))
    assert raw.est_error >= abs(raw.total - b.total)


def test_reproducible_totals():
    fam = SumFamily("U", 7, 6)
    assert evaluate_sum(fam).total == evaluate_sum(fam).total


def test_report_serialization():
    reps = verify_identity("linear.trk", 1)
    assert [r.id for r in reps] == ["linear.trk:T5", "linear.trk:U5"]
    assert all(r.rhs == 0.25 and r.passed for r in reps)
    rows = [json.loads(line) for line in reports_to_jsonl(reps).splitlines()]
    assert list(rows[0]) == list(REPORT_FIELDS)
    assert rows[0]["pass"] is True
    assert rows[0]["lhs"] == reps[0].lhs
    lines = reports_to_csv(reps).splitlines()
    assert lines[0] == "id,n,lhs,rhs,abs_res,rel_res,terms,tail,pass"
    assert lines[1].split(",")[3] == "2.5000000000000000e-01"


def test_zero_rhs_uses_absolute_residual():
    (rep,) = verify_identity("linear.force_momentum:T3", 2)
    assert rep.rhs == 0.0
    assert rep.rel_res == rep.abs_res
    assert rep.passed


def test_tolerance_override():
    (rep,) = verify_identity("linear.trk:T5", 1, SMALL, tolerance=0.0)
    assert rep.passed == (rep.rel_res == 0.0)
