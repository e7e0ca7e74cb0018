import io
import math
import random

import pytest

from besovmorrey import phi as phimod
from besovmorrey.dyadic import (
    INF,
    DyadicCube,
    DyadicSequence,
    SpaceParams,
    b_infty_norm,
    cube_contains,
    format_space_params,
    level_quantity,
    load_csv,
    lq_norm,
    n_norm,
    n_norm_via_morrey,
    parse_space_params,
    read_csv,
    save_csv,
    write_csv,
)
from besovmorrey.errors import DomainError


def test_cube_geometry():
    cube = DyadicCube(nu=-1, k=(0,))
    assert cube.side == 2.0
    assert cube_contains(cube, DyadicCube(nu=1, k=(3,)))
    assert not cube_contains(cube, DyadicCube(nu=1, k=(4,)))
    # negative orthant
    outer = DyadicCube(nu=0, k=(-1,))
    assert cube_contains(outer, DyadicCube(nu=2, k=(-4,)))
    assert cube_contains(outer, DyadicCube(nu=2, k=(-1,)))
    assert not cube_contains(outer, DyadicCube(nu=2, k=(0,)))
    # a finer cube never contains a coarser one
    assert not cube_contains(DyadicCube(nu=2, k=(0,)), DyadicCube(nu=1, k=(0,)))


def test_sequence_container():
    seq = DyadicSequence(1, {(0, (0,)): 1.0, (2, (5,)): 0.0, (1, (-3,)): -2.0})
    assert len(seq) == 2  # exact zero dropped
    assert seq.levels() == [0, 1]
    assert seq.level(1) == {(-3,): -2.0}
    assert seq.level(7) == {}
    doubled = seq.scaled(2.0)
    assert doubled.level(1) == {(-3,): -4.0}
    merged = seq.plus(DyadicSequence(1, {(1, (-3,)): 2.0}))
    assert merged.levels() == [0]
    with pytest.raises(DomainError):
        DyadicSequence(1, {(-1, (0,)): 1.0})
    with pytest.raises(DomainError):
        DyadicSequence(2, {(0, (0,)): 1.0})


def test_space_params_validation():
    params = parse_space_params("s=0.5,p=2,q=inf,phi=power(2),d=1")
    assert params.q == INF
    assert params.sigma_p == 0.0
    assert parse_space_params("s=0,p=0.5,q=1,phi=power(1),d=2").sigma_p == 2.0
    with pytest.raises(DomainError):
        parse_space_params("s=0.5,p=2,q=1,d=1")  # no phi
    with pytest.raises(DomainError):
        parse_space_params("s=0.5,p=2,q=1,phi=power(2)")  # no dimension anywhere
    with pytest.raises(DomainError):
        # inadmissible pair: power(2) only carries p <= 2
        parse_space_params("s=0.5,p=3,q=1,phi=power(2),d=1")
    # d supplied by the caller
    params = parse_space_params("s=1,p=1,q=2,phi=capped(1)", d=2)
    assert params.d == 2


def test_space_params_normalizes_phi():
    params = parse_space_params("s=0,p=1,q=1,phi=const(5),d=1")
    assert phimod.eval_phi(params.phi, 1.0) == 1.0


def test_format_round_trip():
    text = "s=-0.75,p=1.5,q=inf,phi=twopower(2.0,4.0),d=2"
    params = parse_space_params(text)
    assert parse_space_params(format_space_params(params)) == params


def test_lq_norm():
    assert lq_norm([3.0, -4.0], INF) == 4.0
    assert lq_norm([3.0, -4.0], 2.0) == pytest.approx(5.0)
    assert lq_norm([1.0, 1.0], 0.5) == pytest.approx(4.0)
    with pytest.raises(DomainError):
        lq_norm([1.0], 0.0)


def test_level_quantity_oracles():
    """Hand-computed values for phi(t) = sqrt(t), s = 1/2, p = 2, d = 1.

    At the critical balance the candidate value is the same at every scale,
    so the three levels give 1, 1/2 and 1/8 exactly.
    """
    params = parse_space_params("s=0.5,p=2,q=inf,phi=power(2),d=1")
    seq = DyadicSequence(
        1,
        {
            (0, (0,)): 1.0,
            (1, (0,)): 0.5,
            (1, (1,)): -0.5,
            (2, (3,)): 0.25,
        },
    )
    assert level_quantity(seq, 0, params) == pytest.approx(1.0, rel=1e-14)
    assert level_quantity(seq, 1, params) == pytest.approx(0.5, rel=1e-14)
    assert level_quantity(seq, 2, params) == pytest.approx(0.125, rel=1e-14)
    assert level_quantity(seq, 3, params) == 0.0
    assert n_norm(seq, params) == pytest.approx(1.0, rel=1e-14)


def test_constant_profile_collapses_to_sup():
    # with a constant weight the quantity is the plain level supremum for
    # every integrability exponent
    seq = DyadicSequence(1, {(3, (m,)): float(m + 1) for m in range(6)})
    for p in (0.5, 1.0, 2.0, 7.0):
        params = parse_space_params("s=0,p=%r,q=inf,phi=const(1),d=1" % p)
        assert level_quantity(seq, 3, params) == pytest.approx(6.0, rel=1e-12)


def test_dual_route_norms_agree():
    rng = random.Random(404)
    families = ["power", "twopower", "capped", "floorone", "powerlog"]
    for trial in range(60):
        d = 1 if trial % 2 == 0 else 2
        fam = families[trial % len(families)]
        p = rng.choice([0.5, 1.0, 2.0])
        if fam == "power":
            phi = "power(%r)" % (p + rng.choice([0.0, 1.0]))
        elif fam == "twopower":
            phi = "twopower(%r,%r)" % (p + rng.choice([0.0, 0.5]), p + 1.0)
        elif fam == "capped":
            phi = "capped(%r)" % (p + rng.choice([0.0, 2.0]))
        elif fam == "floorone":
            phi = "floorone(%r)" % (p + rng.choice([0.0, 1.5]))
        else:
            phi = "powerlog(%r,-0.5)" % (p + 1.0)
        params = parse_space_params(
            "s=%r,p=%r,q=%r,phi=%s,d=%d"
            % (rng.uniform(-2, 2), p, rng.choice([0.5, 1.0, 2.0, INF]), phi, d)
        )
        entries = {}
        for _ in range(rng.randrange(1, 20)):
            j = rng.randrange(0, 5)
            m = tuple(rng.randrange(-12, 12) for _ in range(d))
            entries[(j, m)] = rng.uniform(-2.0, 2.0)
        seq = DyadicSequence(d, entries)
        a = n_norm(seq, params)
        b = n_norm_via_morrey(seq, params)
        assert a == pytest.approx(b, rel=1e-12)


def test_b_infty_norm():
    seq = DyadicSequence(1, {(0, (0,)): 1.0, (2, (1,)): -3.0})
    assert b_infty_norm(seq, 0.0, INF) == 3.0
    assert b_infty_norm(seq, 1.0, INF) == 12.0
    assert b_infty_norm(seq, 0.0, 1.0) == 4.0


def test_csv_round_trip(tmp_path):
    seq = DyadicSequence(
        2, {(0, (0, -1)): 1.5, (3, (7, 2)): -0.25, (1, (-4, 4)): 1e-7}
    )
    path = tmp_path / "seq.csv"
    save_csv(seq, str(path), header_lines=("made by the test suite",))
    again = load_csv(str(path))
    assert again == seq
    text = path.read_text()
    assert text.startswith("#")
    assert "j,m_1,m_2,value" in text


def test_csv_duplicate_rows_sum():
    data = io.StringIO("# d=1\nj,m_1,value\n0,4,1.0\n0,4,0.5\n")
    seq = read_csv(data)
    assert seq.level(0) == {(4,): 1.5}


def test_csv_malformed_rows():
    with pytest.raises(DomainError):
        read_csv(io.StringIO("# d=1\nj,m_1,value\n0,oops,1.0\n"))
    with pytest.raises(DomainError):
        read_csv(io.StringIO("# d=1\nj,m_1,value\n0,1,2.0\nnot,a,row\n"))
    # column-count mismatch
    with pytest.raises(DomainError):
        read_csv(io.StringIO("# d=2\nj,m_1,m_2,value\n0,1,1.0\n"))


def test_csv_dimension_from_columns():
    # no metadata comment: the width of the first row decides d
    seq = read_csv(io.StringIO("j,m_1,m_2,value\n1,0,3,2.5\n"))
    assert seq.d == 2
    assert seq.level(1) == {(0, 3): 2.5}
