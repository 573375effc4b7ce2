"""Stabilizer chains (base and strong generating sets) for permutation groups.

The construction is the deterministic Schreier-Sims algorithm: every
Schreier generator of every level is sifted, so a finished chain is a
certificate for the group order, not a Monte-Carlo estimate.  Degrees up
to ~2000 and orders up to ~10^13 are the intended envelope; transversals
are stored as explicit image arrays.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from .perms import (
    DTYPE,
    ConfigurationError,
    Permutation,
    ResourceError,
    as_images,
    compose,
    identity_images,
    inverse,
    is_identity,
)

CACHE_FORMAT_VERSION = 1


def orbit(generators, point: int):
    """Orbit of a point under a generator list.

    Breadth-first with ascending tie-break inside each layer, so the
    returned list has a deterministic order independent of generator
    order quirks.
    """
    gens = [as_images(g) for g in generators]
    if not gens:
        raise ConfigurationError("generator list is empty")
    degree = gens[0].shape[0]
    for g in gens:
        if g.shape[0] != degree:
            raise ConfigurationError("degree mismatch among generators")
    if not (0 <= point < degree):
        raise ConfigurationError("point outside the domain")
    seen = np.zeros(degree, dtype=bool)
    seen[point] = True
    out = [point]
    frontier = [point]
    while frontier:
        nxt = set()
        for g in gens:
            images = g[frontier]
            fresh = images[~seen[images]]
            for q in fresh:
                nxt.add(int(q))
        nxt = sorted(nxt)
        for q in nxt:
            seen[q] = True
        out.extend(nxt)
        frontier = nxt
    return out


class _Level:
    __slots__ = ("base", "gens", "orbit", "transversal", "dirty")

    def __init__(self, base: int):
        self.base = base
        self.gens = []
        self.orbit = [base]
        self.transversal = {}
        self.dirty = True

    def recompute(self, degree: int):
        """BFS orbit of the base point with explicit transversal elements."""
        ident = identity_images(degree)
        self.transversal = {self.base: ident}
        self.orbit = [self.base]
        frontier = [self.base]
        while frontier:
            nxt = []
            for p in frontier:
                t = self.transversal[p]
                for g in self.gens:
                    q = int(g[p])
                    if q not in self.transversal:
                        self.transversal[q] = compose(t, g)
                        nxt.append(q)
            nxt.sort()
            self.orbit.extend(nxt)
            frontier = nxt
        self.dirty = False


@dataclass
class StabChain:
    """Base, strong generators, basic orbits and explicit transversals."""

    degree: int
    levels: list = field(default_factory=list)

    @property
    def base(self):
        return [lv.base for lv in self.levels]

    def order(self) -> int:
        n = 1
        for lv in self.levels:
            n *= len(lv.orbit)
        return n

    def orbit_lengths(self):
        return [len(lv.orbit) for lv in self.levels]

    def strong_generators(self):
        return list(self.levels[0].gens) if self.levels else []

    def sift(self, g, start: int = 0):
        """Strip g through levels >= start.

        Returns (residue, level_reached).  residue is the identity iff g
        lies in the stabilizer-chain group below `start` and sifts fully.
        """
        for i in range(start, len(self.levels)):
            lv = self.levels[i]
            p = int(g[lv.base])
            if p == lv.base:
                continue
            t = lv.transversal.get(p)
            if t is None:
                return g, i
            g = compose(g, inverse(t))
        return g, len(self.levels)

    def contains(self, g) -> bool:
        g = as_images(g)
        if g.shape[0] != self.degree:
            raise ConfigurationError("degree mismatch")
        residue, _ = self.sift(g)
        return is_identity(residue)

    def random_element(self, rng) -> np.ndarray:
        """Uniform element: product of independently uniform coset reps."""
        if isinstance(rng, (int, np.integer)):
            rng = np.random.default_rng(int(rng))
        g = identity_images(self.degree)
        for lv in reversed(self.levels):
            p = lv.orbit[int(rng.integers(len(lv.orbit)))]
            g = compose(g, lv.transversal[p])
        return g

    def elements(self):
        """Iterate all group elements (only sensible for small orders).

        Mirrors random_element: the deepest level's coset representative
        is composed first, so every element appears exactly once.
        """
        levels = self.levels

        def rec(i):
            if i == len(levels):
                yield identity_images(self.degree)
                return
            for rest in rec(i + 1):
                for p in levels[i].orbit:
                    yield compose(rest, levels[i].transversal[p])

        return rec(0)


def membership(chain: StabChain, p) -> bool:
    return chain.contains(p)


def random_element(chain: StabChain, rng_seed: int) -> Permutation:
    return Permutation(chain.random_element(rng_seed))


@dataclass
class GroupHandle:
    """A named permutation group with optional certified chain."""

    name: str
    generators: list
    chain: StabChain | None = None
    domain_description: str = ""

    def __post_init__(self):
        arrs = [as_images(g) for g in self.generators]
        if not arrs:
            raise ConfigurationError("generator list is empty")
        degrees = {a.shape[0] for a in arrs}
        if len(degrees) != 1:
            raise ConfigurationError("generators do not share one degree")
        self.generators = arrs

    @property
    def degree(self) -> int:
        return self.generators[0].shape[0]

    def order(self) -> int:
        if self.chain is None:
            self.chain = build_stab_chain(self)
        return self.chain.order()


def build_stab_chain(g: GroupHandle, base_hint=None, max_seconds=None) -> StabChain:
    """Deterministic Schreier-Sims with full Schreier-generator verification.

    base_hint is used as a base prefix (kept even when redundant), which
    is how flag stabilizers are carved out downstream.
    """
    degree = g.degree
    chain = StabChain(degree=degree)
    deadline = None if max_seconds is None else time.monotonic() + max_seconds

    def check_budget():
        if deadline is not None and time.monotonic() > deadline:
            raise ResourceError(
                "stabilizer chain construction exceeded its time budget",
                partial=chain.base,
            )

    for b in base_hint or []:
        chain.levels.append(_Level(int(b)))

    def add_gen(arr) -> int:
        """Insert a strong generator; returns the deepest level it joins."""
        k = 0
        while k < len(chain.levels) and arr[chain.levels[k].base] == chain.levels[k].base:
            k += 1
        if k == len(chain.levels):
            moved = int(np.nonzero(arr != np.arange(degree, dtype=arr.dtype))[0][0])
            chain.levels.append(_Level(moved))
        for j in range(k + 1):
            chain.levels[j].gens.append(arr)
            chain.levels[j].dirty = True
        return k

    for arr in g.generators:
        if not is_identity(arr):
            add_gen(arr)

    if not chain.levels:
        return chain  # trivial group

    def fresh(lv):
        if lv.dirty:
            lv.recompute(degree)

    i = len(chain.levels) - 1
    while i >= 0:
        check_budget()
        lv = chain.levels[i]
        fresh(lv)
        stuck = None
        for p in lv.orbit:
            t = lv.transversal[p]
            for s in lv.gens:
                q = int(s[p])
                schreier = compose(compose(t, s), inverse(lv.transversal[q]))
                if is_identity(schreier):
                    continue
                residue, _ = chain.sift(schreier, start=i + 1)
                if not is_identity(residue):
                    stuck = add_gen(residue)
                    break
            if stuck is not None:
                break
        if stuck is None:
            i -= 1
        else:
            for j in range(stuck + 1):
                if chain.levels[j].dirty:
                    chain.levels[j].recompute(degree)
            i = stuck
    verify_chain(chain, g.generators)
    g.chain = chain
    return chain


def verify_chain(chain: StabChain, original_gens=None) -> None:
    """Deterministic certificate pass: re-sift every Schreier generator.

    Raises on any failure; afterwards order() is exact.
    """
    degree = chain.degree
    for i, lv in enumerate(chain.levels):
        if lv.dirty:
            lv.recompute(degree)
        for s in lv.gens:
            if s[lv.base] == lv.base:
                continue
        for p in lv.orbit:
            t = lv.transversal[p]
            if int(t[lv.base]) != p:
                raise ConfigurationError("transversal element does not reach its point")
            for s in lv.gens:
                q = int(s[p])
                schreier = compose(compose(t, s), inverse(lv.transversal[q]))
                residue, _ = chain.sift(schreier, start=i + 1)
                if not is_identity(residue):
                    raise ConfigurationError("chain failed Schreier verification")
        # strong generators at level i must fix the base prefix
        for s in lv.gens:
            for j in range(i):
                if int(s[chain.levels[j].base]) != chain.levels[j].base:
                    raise ConfigurationError("strong generator moves an earlier base point")
    for arr in original_gens or []:
        if not chain.contains(arr):
            raise ConfigurationError("original generator not in the constructed chain")


def stabilizer_of_prefix(g: GroupHandle, points) -> GroupHandle:
    """Pointwise stabilizer of an ordered point list, as a fresh handle.

    The points are forced to the front of the base, so the stabilizer's
    strong generators fall out of the chain directly.
    """
    points = [int(p) for p in points]
    if not points:
        if g.chain is None:
            build_stab_chain(g)
        return GroupHandle(g.name, [Permutation(a) for a in g.generators], g.chain,
                           g.domain_description)
    chain = g.chain
    if chain is None or chain.base[: len(points)] != points:
        chain = build_stab_chain(
            GroupHandle(g.name, [Permutation(a) for a in g.generators]),
            base_hint=points,
        )
        if g.chain is None:
            g.chain = chain
    k = len(points)
    sub = StabChain(degree=chain.degree, levels=chain.levels[k:])
    if k < len(chain.levels):
        gens = list(chain.levels[k].gens)
    else:
        gens = []
    if not gens:
        gens = [identity_images(chain.degree)]
    handle = GroupHandle(
        name="%s_stab%r" % (g.name, tuple(points)),
        generators=[Permutation(a) for a in gens],
        chain=sub,
        domain_description=g.domain_description,
    )
    return handle


def chain_to_json(chain: StabChain, group_name: str) -> dict:
    return {
        "format_version": CACHE_FORMAT_VERSION,
        "group_name": group_name,
        "degree": chain.degree,
        "base": chain.base,
        "strong_generators": [g.tolist() for g in chain.strong_generators()],
        "orbit_lengths": chain.orbit_lengths(),
        "order_decimal": str(chain.order()),
    }


def save_chain(chain: StabChain, group_name: str, path) -> None:
    with open(path, "w") as fh:
        json.dump(chain_to_json(chain, group_name), fh)


def load_chain(path, expected_name=None) -> StabChain:
    """Load a cached chain and re-verify it from scratch before trusting it."""
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format_version") != CACHE_FORMAT_VERSION:
        raise ConfigurationError("unknown chain cache format version")
    if expected_name is not None and doc["group_name"] != expected_name:
        raise ConfigurationError("chain cache is for a different group")
    gens = [np.asarray(a, dtype=DTYPE) for a in doc["strong_generators"]]
    handle = GroupHandle(doc["group_name"], [Permutation(a) for a in gens])
    chain = build_stab_chain(handle, base_hint=doc["base"])
    if chain.orbit_lengths() != doc["orbit_lengths"]:
        raise ConfigurationError("cached orbit lengths do not re-verify")
    if str(chain.order()) != doc["order_decimal"]:
        raise ConfigurationError("cached order does not re-verify")
    return chain
