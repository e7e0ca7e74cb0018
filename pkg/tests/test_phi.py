import math

import pytest

from besovmorrey import phi as phimod
from besovmorrey.errors import (
    DomainError,
    ExtrapolationError,
    NoProfileError,
    TableFormatError,
)


# ---------------------------------------------------------------------------
# evaluation


def test_power_eval():
    spec = phimod.power(2)
    assert phimod.eval_phi(spec, 0.25) == pytest.approx(0.5, rel=1e-15)
    assert phimod.eval_phi(spec, 4.0) == pytest.approx(2.0, rel=1e-15)


def test_twopower_switches_exponent_at_one():
    # frozen: phi(8) = sqrt(8) for exponents (1, 2) in one dimension
    spec = phimod.twopower(1, 2)
    assert phimod.eval_phi(spec, 8.0) == pytest.approx(math.sqrt(8.0), rel=1e-15)
    assert phimod.eval_phi(spec, 0.125) == pytest.approx(0.125, rel=1e-15)
    assert phimod.eval_phi(spec, 1.0) == 1.0


def test_capped_and_floorone_eval():
    assert phimod.eval_phi(phimod.capped(2), 16.0) == 1.0
    assert phimod.eval_phi(phimod.capped(2), 0.25) == pytest.approx(0.5)
    assert phimod.eval_phi(phimod.floorone(2), 0.25) == 1.0
    assert phimod.eval_phi(phimod.floorone(2), 16.0) == pytest.approx(4.0)


def test_powerlog_eval():
    spec = phimod.powerlog(2, -1.0)
    t = math.e * (math.e - 1.0)  # lshift + t = e^2, so the log factor is 2
    expected = t ** 0.5 / 2.0
    assert phimod.eval_phi(spec, t) == pytest.approx(expected, rel=1e-14)


def test_cappedlog_eval():
    spec = phimod.cappedlog(2, -0.5)
    assert phimod.eval_phi(spec, 4.0) == 1.0
    t = math.exp(-2.0)
    expected = math.exp(-1.0) / math.sqrt(3.0)
    assert phimod.eval_phi(spec, t) == pytest.approx(expected, rel=1e-14)


def test_eval_rejects_bad_t():
    spec = phimod.power(1)
    for t in (0.0, -1.0, float("inf"), float("nan")):
        with pytest.raises(DomainError):
            phimod.eval_phi(spec, t)


def test_constructor_validation():
    with pytest.raises(DomainError):
        phimod.power(0.0)
    with pytest.raises(DomainError):
        phimod.power(2, d=0)
    with pytest.raises(DomainError):
        phimod.powerlog(2, 1.0, lshift=1.0)  # below e
    with pytest.raises(DomainError):
        phimod.const(-3.0)


# ---------------------------------------------------------------------------
# normalisation


def test_normalize_sets_value_one_at_one():
    spec = phimod.normalize(phimod.const(5.0))
    assert phimod.eval_phi(spec, 1.0) == 1.0
    assert phimod.eval_phi(spec, 123.0) == 1.0


def test_normalize_is_idempotent():
    for spec in (
        phimod.const(7.0),
        phimod.powerlog(2, 1.5),
        phimod.tabulated((0.5, 1.0, 2.0), (0.25, 0.5, 4.0)),
    ):
        once = phimod.normalize(spec)
        assert phimod.normalize(once) == once
        assert phimod.eval_phi(once, 1.0) == pytest.approx(1.0, rel=1e-15)


# ---------------------------------------------------------------------------
# admissibility


@pytest.mark.parametrize(
    "spec,p,member",
    [
        (phimod.power(2), 2.0, True),
        (phimod.power(2), 2.5, False),
        (phimod.twopower(2, 4), 2.0, True),
        (phimod.twopower(2, 4), 3.0, False),
        (phimod.twopower(4, 2), 3.0, False),
        (phimod.capped(2), 2.0, True),
        (phimod.capped(2), 2.1, False),
        (phimod.floorone(3), 3.0, True),
        (phimod.floorone(3), 3.5, False),
        (phimod.const(1.0), 100.0, True),
        # frozen: log growth on top of the critical power breaks the damping
        (phimod.powerlog(2, 1.0), 2.0, False),
        (phimod.powerlog(2, 1.0), 1.0, True),
        # a steep negative log power destroys monotonicity near infinity
        (phimod.powerlog(2, -5.0), 1.0, False),
        (phimod.cappedlog(2, 0.25), 2.0, True),
        (phimod.cappedlog(2, 0.25), 4.0, False),
        (phimod.cappedlog(2, -1.0), 2.0, False),
        (phimod.cappedlog(2, -1.0), 0.5, True),
    ],
)
def test_class_membership(spec, p, member):
    report = phimod.check_class_gp(spec, p)
    assert report.member is member
    assert report.exact


def test_closed_form_agrees_with_grid():
    specs = [
        phimod.power(1.5),
        phimod.power(3),
        phimod.twopower(2, 3),
        phimod.twopower(3, 2),
        phimod.capped(1),
        phimod.floorone(2),
        phimod.powerlog(2, 0.5),
        phimod.powerlog(2, -0.5),
        phimod.powerlog(3, 2.0, lshift=5.0),
        phimod.cappedlog(2, 0.5),
        phimod.cappedlog(3, -0.25),
        phimod.const(2.0),
    ]
    for spec in specs:
        for p in (0.5, 1.0, 1.5, 2.0, 3.0, 6.0):
            report = phimod.check_class_gp(spec, p)
            assert report.exact
            assert report.member == report.grid_member, (
                "closed form and grid disagree for %s at p=%g: %s"
                % (phimod.format_phi(spec), p, report.failures)
            )


def test_tabulated_membership_uses_knots():
    # knots of t**(1/2): admissible for p <= 2 and the check is exact there
    ts = tuple(2.0 ** k for k in range(-6, 7))
    spec = phimod.tabulated(ts, tuple(t ** 0.5 for t in ts))
    assert phimod.check_class_gp(spec, 2.0).member
    assert not phimod.check_class_gp(spec, 2.5).member
    # a dip in the middle breaks monotonicity
    vals = list(t ** 0.5 for t in ts)
    vals[6] = vals[5] * 0.5
    bad = phimod.tabulated(ts, tuple(vals))
    report = phimod.check_class_gp(bad, 2.0)
    assert not report.member
    assert any(reason == "nondecreasing" for _, _, reason in report.failures)


def test_nontriviality():
    assert phimod.check_nontrivial(phimod.power(2), 2.0)
    assert phimod.check_nontrivial(phimod.capped(2), 5.0)
    # a floor profile grows too slowly to matter but its space needs p <= v
    assert not phimod.check_nontrivial(phimod.floorone(1), 2.0)
    assert phimod.check_nontrivial(phimod.tabulated((0.5, 2.0), (0.5, 2.0)), 1.0)


# ---------------------------------------------------------------------------
# asymptotics


def test_profile_oracles():
    prof = phimod.asymptotic_profile(phimod.powerlog(2, -1.0, d=2))
    assert (prof.a_zero, prof.b_zero, prof.a_inf, prof.b_inf) == (1.0, 0.0, 1.0, -1.0)

    prof = phimod.asymptotic_profile(phimod.capped(2, d=2))
    assert (prof.a_zero, prof.b_zero, prof.a_inf, prof.b_inf) == (1.0, 0.0, 0.0, 0.0)

    prof = phimod.asymptotic_profile(phimod.const(1.0))
    assert (prof.a_zero, prof.b_zero, prof.a_inf, prof.b_inf) == (0.0, 0.0, 0.0, 0.0)

    prof = phimod.asymptotic_profile(phimod.twopower(2, 4))
    assert (prof.a_zero, prof.b_zero, prof.a_inf, prof.b_inf) == (0.5, 0.0, 0.25, 0.0)

    prof = phimod.asymptotic_profile(phimod.cappedlog(2, 0.5))
    assert (prof.a_zero, prof.b_zero, prof.a_inf, prof.b_inf) == (0.5, 0.5, 0.0, 0.0)

    prof = phimod.asymptotic_profile(phimod.floorone(4, d=2))
    assert (prof.a_zero, prof.b_zero, prof.a_inf, prof.b_inf) == (0.0, 0.0, 0.5, 0.0)


def test_table_has_no_profile():
    spec = phimod.tabulated((0.5, 2.0), (0.5, 2.0))
    with pytest.raises(NoProfileError):
        phimod.asymptotic_profile(spec)


# ---------------------------------------------------------------------------
# grammar


@pytest.mark.parametrize(
    "text",
    [
        "power(2)",
        "twopower(1,2)",
        "twopower(0.5, 3)",
        "capped(2)",
        "floorone(4)",
        "powerlog(2,-1)",
        "powerlog(2, -1, 3.5)",
        "cappedlog(2,0.5)",
        "const(2)",
    ],
)
def test_parse_format_round_trip(text):
    spec = phimod.parse_phi(text, d=2)
    assert spec.d == 2
    again = phimod.parse_phi(phimod.format_phi(spec), d=2)
    assert again == spec


@pytest.mark.parametrize(
    "text",
    [
        "power",
        "power()",
        "power(2,3)",
        "bogus(1)",
        "power(x)",
        "powerlog(2)",
        "powerlog(2,1,2,9)",
        "table()",
    ],
)
def test_parse_rejects_malformed(text):
    with pytest.raises(DomainError):
        phimod.parse_phi(text)


def test_table_file_round_trip(tmp_path):
    path = tmp_path / "knots.csv"
    path.write_text("# comment line\nt,phi\n0.25,0.5\n1,1\n4,2\n")
    spec = phimod.parse_phi("table(%s)" % path)
    assert phimod.eval_phi(spec, 0.25) == pytest.approx(0.5)
    assert phimod.eval_phi(spec, 4.0) == pytest.approx(2.0)
    # log-log interpolation passes through geometric midpoints exactly
    assert phimod.eval_phi(spec, 1.0) == pytest.approx(1.0, rel=1e-14)
    with pytest.raises(ExtrapolationError):
        phimod.eval_phi(spec, 100.0)


def test_table_file_errors(tmp_path):
    with pytest.raises(TableFormatError):
        phimod.load_table(str(tmp_path / "missing.csv"))
    bad = tmp_path / "bad.csv"
    bad.write_text("0.25,0.5\nwhoops,1\n")
    with pytest.raises(TableFormatError):
        phimod.load_table(str(bad))
    nonmono = tmp_path / "nonmono.csv"
    nonmono.write_text("1,1\n0.5,2\n")
    with pytest.raises(TableFormatError):
        phimod.load_table(str(nonmono))
