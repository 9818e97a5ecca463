import pytest

from twistxxz import tables


def test_fmt():
    assert tables.fmt(None) == ""
    assert tables.fmt(0.0036257631231579) == "3.62576312315790e-03"
    assert tables.fmt(0.2j) == "0.00000000000000e+00+2.00000000000000e-01j"
    assert tables.fmt(-0.0 + 1j) == tables.fmt(0.0 + 1j)


def test_roots_table_matches_reference():
    built = tables.build("1")
    for row in built[1]:
        assert row.abs_diff <= 1e-10, row


def test_all_tables_agree():
    built = tables.build("all")
    assert sorted(built) == [1, 2, 3, 4, 5]
    assert tables.max_disagreement(built) <= tables.AGREEMENT_TOL


def test_other_sizes_build():
    built = tables.build("2", eta=0.7, n=2)
    assert tables.max_disagreement(built) <= tables.AGREEMENT_TOL


def test_build_validation():
    with pytest.raises(ValueError):
        tables.build("5", n=1)
    with pytest.raises(ValueError):
        tables.build("9")
