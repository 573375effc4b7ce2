import pytest

from d4fusion.perms import ConfigurationError
from d4fusion.valuations import (
    ROWS,
    all_families,
    closed_form_families,
    two_part_valuation,
    v2,
)


def test_v2_basic():
    assert v2(8) == 3
    assert v2(12) == 2
    assert v2(1) == 0
    with pytest.raises(ConfigurationError):
        v2(0)


def test_pinned_values_at_q3():
    assert two_part_valuation("POmega8+", 3) == 12
    assert two_part_valuation("POmega7", 3) == 9
    assert two_part_valuation("G2", 3) == 6
    assert two_part_valuation("3D4", 3) == 6
    assert two_part_valuation("POmega8-", 3) == 10
    assert two_part_valuation("POmega8-", 3) != 12


def test_closed_forms_match_direct_for_small_q():
    for family in closed_form_families():
        for q in (3, 5, 7, 11, 13):
            # two_part_valuation raises if the closed form and the direct
            # polynomial valuation disagree
            val = two_part_valuation(family, q)
            assert val == ROWS[family].closed(q)


def test_closed_form_oracle_by_hand():
    # independent oracle: v2 from explicit integer factorizations
    def brute_v2(n):
        k = 0
        while n % 2 == 0:
            n //= 2
            k += 1
        return k

    for q in (3, 5, 7, 11, 13):
        omega8 = (q ** 2 - 1) * (q ** 4 - 1) * (q ** 6 - 1) * (q ** 4 - 1)
        assert two_part_valuation("POmega8+", q) == brute_v2(omega8) - 2


def test_exclusion_rows_exceed_12():
    for family in ("PGL7", "PSU7", "PSp8", "POmega9", "F4", "E6", "E7", "E8", "2E6"):
        for q in (3, 5, 7, 11, 13):
            assert two_part_valuation(family, q) > 12


def test_relative_rows_dominate_f4():
    for family in ("E6", "E7", "E8", "2E6"):
        for q in (3, 5, 7):
            assert two_part_valuation(family, q) > two_part_valuation("F4", q)


def test_unique_family_matching_12_at_q3():
    hits = [f for f in all_families() if two_part_valuation(f, 3) == 12]
    assert hits == ["POmega8+"]


def test_rejects_bad_inputs():
    with pytest.raises(ConfigurationError):
        two_part_valuation("POmega8+", 4)
    with pytest.raises(ConfigurationError):
        two_part_valuation("nonsense", 3)
