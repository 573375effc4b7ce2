"""2-adic valuations of classical and exceptional group orders for odd q.

Each supported family carries the even part of its order as an explicit
integer polynomial in q, plus (where one exists) a closed form in
v2(q^2 - 1).  Evaluating a family checks the closed form against the
direct polynomial valuation, so the arithmetic is self-auditing.

The exclusion families only assert a lower bound (> 12); they are kept so
the full row set of the table can be replayed for several q.
"""

from __future__ import annotations

from dataclasses import dataclass

from .perms import ConfigurationError


def v2(n: int) -> int:
    if n <= 0:
        raise ConfigurationError("v2 is defined for positive integers")
    k = 0
    while n % 2 == 0:
        n //= 2
        k += 1
    return k


def _prod(q, exps):
    out = 1
    for e in exps:
        out *= q ** e - 1
    return out


@dataclass(frozen=True)
class FamilyRow:
    name: str
    direct: callable            # q -> integer whose v2 is the 2-part expression
    shift: int = 0              # subtract from v2(direct)
    closed: callable = None     # q -> closed-form valuation, when exact
    exceeds_12: bool = False    # exclusion rows only assert v2 > 12


ROWS = {
    "PGL7": FamilyRow(
        "PGL7", lambda q: _prod(q, (7, 6, 5, 4, 3, 2)), exceeds_12=True),
    "PSU7": FamilyRow(
        "PSU7",
        lambda q: (q ** 7 + 1) * (q ** 6 - 1) * (q ** 5 + 1) * (q ** 4 - 1)
        * (q ** 3 + 1) * (q ** 2 - 1),
        exceeds_12=True),
    "PSp8": FamilyRow(
        "PSp8", lambda q: _prod(q, (8, 6, 4, 2)), shift=1, exceeds_12=True),
    "POmega9": FamilyRow(
        "POmega9", lambda q: _prod(q, (8, 6, 4, 2)), shift=1, exceeds_12=True),
    "POmega8-": FamilyRow(
        "POmega8-",
        lambda q: _prod(q, (6, 4, 2)) * (q ** 4 + 1),
        shift=1,
        closed=lambda q: 3 * v2(q * q - 1) + 1),
    "POmega7": FamilyRow(
        "POmega7", lambda q: _prod(q, (2, 4, 6)), shift=1,
        closed=lambda q: 3 * v2(q * q - 1)),
    "POmega8+": FamilyRow(
        "POmega8+", lambda q: _prod(q, (2, 4, 6, 4)), shift=2,
        closed=lambda q: 4 * v2(q * q - 1)),
    "G2": FamilyRow(
        "G2", lambda q: _prod(q, (2, 6)),
        closed=lambda q: 2 * v2(q * q - 1)),
    "F4": FamilyRow(
        "F4", lambda q: _prod(q, (2, 6, 8, 12)), exceeds_12=True),
    "E6": FamilyRow(
        "E6", lambda q: _prod(q, (2, 5, 6, 8, 9, 12)), exceeds_12=True),
    "E7": FamilyRow(
        "E7", lambda q: _prod(q, (2, 6, 8, 10, 12, 14, 18)), exceeds_12=True),
    "E8": FamilyRow(
        "E8", lambda q: _prod(q, (2, 8, 12, 14, 18, 20, 24, 30)), exceeds_12=True),
    "2E6": FamilyRow(
        "2E6",
        lambda q: (q ** 2 - 1) * (q ** 5 + 1) * (q ** 6 - 1) * (q ** 8 - 1)
        * (q ** 9 + 1) * (q ** 12 - 1),
        exceeds_12=True),
    "3D4": FamilyRow(
        "3D4", lambda q: _prod(q, (2, 6)) * (q ** 8 + q ** 4 + 1),
        closed=lambda q: 2 * v2(q * q - 1)),
}


def two_part_valuation(family: str, q: int) -> int:
    """v2 of the odd-characteristic order polynomial for one table row.

    For rows with a closed form, the direct polynomial valuation is
    computed as well and must agree exactly.
    """
    if q < 3 or q % 2 == 0:
        raise ConfigurationError("q must be an odd integer >= 3")
    row = ROWS.get(family)
    if row is None:
        raise ConfigurationError("unknown family %r" % family)
    direct = v2(row.direct(q)) - row.shift
    if row.closed is not None:
        closed = row.closed(q)
        if closed != direct:
            raise ConfigurationError(
                "closed form disagrees with the direct valuation for %s, q=%d"
                % (family, q))
    if row.exceeds_12 and direct <= 12:
        raise ConfigurationError(
            "exclusion row %s unexpectedly has 2-part <= 2^12 at q=%d" % (family, q))
    return direct


def closed_form_families():
    return sorted(name for name, row in ROWS.items() if row.closed is not None)


def all_families():
    return sorted(ROWS)
