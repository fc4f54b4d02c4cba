from fractions import Fraction
import io

import pytest

from kalton_gap.bounds import BoundRow, bounds_table, format_table, parse_grid, read_csv, write_csv


def test_parse_grid():
    assert parse_grid("diag:2..4") == [(2, 2), (3, 3), (4, 4)]
    assert parse_grid("rect:2..3,2..3") == [(2, 2), (2, 3), (3, 2), (3, 3)]
    assert parse_grid("4x2, 10X10") == [(4, 2), (10, 10)]
    with pytest.raises(ValueError):
        parse_grid("diag:2-4")


def test_chain_arithmetic():
    r = BoundRow(4, 2, Fraction(13, 11), Fraction(13, 11))
    assert r.m == 8
    assert r.derived_Kw_lower == Fraction(13, 22)
    assert r.derived_Ks_lower == Fraction(13, 44)
    assert not r.flagged
    assert BoundRow(2, 2, Fraction(1), Fraction(1, 2)).flagged
    assert BoundRow(2, 2, Fraction(1), Fraction(2)).best_lower == 2


def test_lp_rows():
    rows = bounds_table([(4, 2), (2, 2), (2, 2)], solve_lp=True)
    assert [(r.k, r.n) for r in rows] == [(2, 2), (4, 2)]
    assert rows[0].lp_distance == Fraction(3, 5)
    assert rows[1].lp_distance == Fraction(13, 11)
    assert rows[1].derived_Kw_lower == Fraction(13, 22)


def test_csv_round_trip_and_table():
    rows = bounds_table(parse_grid("rect:2..3,2..3"), solve_lp=True)
    buf = io.StringIO()
    write_csv(rows, buf)
    buf.seek(0)
    assert buf.readline().strip() == "k,n,m,a_formula,a_formula_dec,lp_distance,best_lower,kw_lower,ks_lower"
    buf.seek(0)
    assert read_csv(buf) == rows
    text = format_table(rows)
    assert "LP<formula" not in text and len(text.splitlines()) == len(rows) + 2
