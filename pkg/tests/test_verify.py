from fractions import Fraction

import pytest

from defml import verify


@pytest.mark.parametrize("suite", verify.EXACT_SUITES)
def test_exact_suites_pass(suite):
    reports = verify.run(suite, n_max=10)
    assert reports and all(r.passed for r in reports)


def test_genfun_suite_flags_printed_egf():
    reps = [r for r in verify.run("genfun", n_max=4) if r.identity == "phi-monic-egf-normalization"]
    assert {r.params["h"] for r in reps} == {Fraction(1, 2), Fraction(1), Fraction(2)}
    assert all(r.passed and r.matched == "derived" for r in reps)


def test_all_short_circuits_on_exact_failure(monkeypatch):
    from defml.report import exact_report

    monkeypatch.setattr(verify, "suite_hdiff", lambda n, seed=0: [exact_report("x", {}, False)])
    called = []
    monkeypatch.setattr(verify, "suite_orthogonality", lambda *a: called.append(1) or [])
    reps = verify.run("all", n_max=3)
    assert not reps[-1].passed
    assert called == []


def test_unknown_suite():
    with pytest.raises(ValueError):
        verify.run("bogus")
