"""Fully enumerated finite groups: Cayley tables, bit-vector subgroups, series.

Groups of order up to a few thousand (here: 4096 and its quotients) are
enumerated once; every structural question afterwards is an exhaustive
table computation, never a sampled one.  The multiplication table keeps
the left-to-right convention of the rest of the package:
``T[a, b] = a then b``.

Subgroups are boolean vectors over element indices.  The commutator
matrix ``comm[x, y] = x^-1 y^-1 x y`` is precomputed lazily and turns
centralizers, central series and abelianness checks into gathers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .perms import ConfigurationError, ResourceError

IDX = np.uint16


class ClosureError(ValueError):
    """A member set failed a subgroup axiom."""


@dataclass
class SubgroupBits:
    """A subgroup as a bit-vector over the parent group's element indices."""

    group: "CayleyGroup"
    bits: np.ndarray

    _order: int | None = field(default=None, repr=False)

    @property
    def order(self) -> int:
        if self._order is None:
            self._order = int(self.bits.sum())
        return self._order

    @property
    def members(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def key(self) -> bytes:
        return np.packbits(self.bits).tobytes()

    def __contains__(self, idx) -> bool:
        return bool(self.bits[int(idx)])

    def __eq__(self, other) -> bool:
        return isinstance(other, SubgroupBits) and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash(self.key())

    def __le__(self, other) -> bool:
        return bool((~other.bits[self.members]).sum() == 0)

    def serialize(self):
        return [int(i) for i in self.members]

    @property
    def is_elementary_abelian(self) -> bool:
        return self.group.is_elementary_abelian(self)

    @property
    def is_extraspecial(self) -> bool:
        return self.group.is_extraspecial(self)


class CayleyGroup:
    """A fully enumerated group with uint16 multiplication table."""

    def __init__(self, table: np.ndarray, gen_indices=None, parents=None,
                 elements=None, name=""):
        table = np.asarray(table, dtype=IDX)
        n = table.shape[0]
        if table.shape != (n, n):
            raise ConfigurationError("multiplication table must be square")
        if table.max(initial=0) >= n:
            raise ClosureError("table entry outside the element range")
        self.n = n
        self.T = table
        self.name = name
        self.gen_indices = list(gen_indices or [])
        self.parents = parents  # (parent, gen_pos) BFS decomposition per element
        self.elements = elements
        self._comm = None
        self._classes = None
        if not np.array_equal(table[0], np.arange(n, dtype=IDX)):
            raise ClosureError("element 0 is not a left identity")
        if not np.array_equal(table[:, 0], np.arange(n, dtype=IDX)):
            raise ClosureError("element 0 is not a right identity")
        rows, cols = np.nonzero(table == 0)
        self.inv = np.empty(n, dtype=IDX)
        self.inv[rows] = cols.astype(IDX)
        if not np.array_equal(table[np.arange(n), self.inv], np.zeros(n, dtype=IDX)):
            raise ClosureError("inverses do not verify")
        self.order_of = self._element_orders()
        self._spot_check_associativity()

    # -- construction -------------------------------------------------------

    @classmethod
    def from_generators(cls, generators, mul, key, identity, name="",
                        max_order=1 << 13):
        """Enumerate by breadth-first closure and build the table.

        `mul(a, b)` means "a then b"; `key` must injectively serialize
        elements.  Generator columns of the table come straight out of the
        closure products; the remaining columns follow by associativity
        from the BFS decomposition b = parent * generator.
        """
        elements = [identity]
        index = {key(identity): 0}
        parents = [(-1, -1)]
        gen_cols = [[] for _ in generators]
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for j, g in enumerate(generators):
                    prod = mul(elements[x], g)
                    k = key(prod)
                    idx = index.get(k)
                    if idx is None:
                        idx = len(elements)
                        if idx >= max_order:
                            raise ResourceError("group closure exceeded max_order")
                        elements.append(prod)
                        index[k] = idx
                        parents.append((x, j))
                        nxt.append(idx)
                    # defer: gen columns recorded below once all indices exist
            frontier = nxt
        n = len(elements)
        # generator element indices
        gen_idx = [index[key(g)] for g in generators]
        # generator columns: one pass of products per generator
        T = np.zeros((n, n), dtype=IDX)
        for j, g in enumerate(generators):
            col = np.empty(n, dtype=IDX)
            for x in range(n):
                col[x] = index[key(mul(elements[x], g))]
            gen_cols[j] = col
            T[:, gen_idx[j]] = col
        # remaining columns by T[:, f*g] = T[T[:, f], g]
        T[:, 0] = np.arange(n, dtype=IDX)
        done = np.zeros(n, dtype=bool)
        done[0] = True
        for gi in gen_idx:
            done[gi] = True
        for b in range(1, n):
            if done[b]:
                continue
            f, j = parents[b]
            if not done[f]:
                raise ConfigurationError("BFS parent order violated")
            T[:, b] = gen_cols[j][T[:, f]]
            done[b] = True
        return cls(T, gen_indices=gen_idx, parents=parents, elements=elements,
                   name=name)

    def _element_orders(self):
        orders = np.ones(self.n, dtype=np.int32)
        idx = np.arange(self.n, dtype=IDX)
        power = idx.copy()
        k = 1
        alive = power != 0
        while alive.any():
            k += 1
            power = self.T[power, idx]
            newly = alive & (power == 0)
            orders[newly] = k
            alive &= power != 0
            if k > self.n:
                raise ClosureError("element order exceeded group order")
        orders[0] = 1
        return orders

    def _spot_check_associativity(self, samples=1_000_000, seed=0):
        rng = np.random.default_rng(seed)
        m = min(samples, 1_000_000)
        a = rng.integers(0, self.n, m)
        b = rng.integers(0, self.n, m)
        c = rng.integers(0, self.n, m)
        left = self.T[self.T[a, b], c]
        right = self.T[a, self.T[b, c]]
        if not np.array_equal(left, right):
            raise ClosureError("associativity spot check failed")

    # -- primitives ---------------------------------------------------------

    def mul(self, a, b):
        return int(self.T[int(a), int(b)])

    def conj(self, x, g):
        """g^-1 x g."""
        return int(self.T[self.T[self.inv[int(g)], int(x)], int(g)])

    def conj_map_images(self, g) -> np.ndarray:
        """The inner automorphism x -> g^-1 x g as a full image array."""
        g = int(g)
        return self.T[self.T[self.inv[g], :], g]

    @property
    def comm(self) -> np.ndarray:
        """comm[x, y] = x^-1 y^-1 x y, computed once."""
        if self._comm is None:
            n = self.n
            a = self.T[np.ix_(self.inv, self.inv)]
            a = self.T[a, np.arange(n, dtype=IDX)[:, None]]
            self._comm = self.T[a, np.arange(n, dtype=IDX)[None, :]]
        return self._comm

    # -- subgroups ----------------------------------------------------------

    def subgroup(self, members, verify=True) -> SubgroupBits:
        bits = np.zeros(self.n, dtype=bool)
        if isinstance(members, np.ndarray) and members.dtype == bool:
            bits = members.copy()
        else:
            bits[[int(m) for m in members]] = True
        if not bits[0]:
            raise ClosureError("subgroup must contain the identity")
        sub = SubgroupBits(self, bits)
        if verify:
            self.check_closed(sub)
        return sub

    def check_closed(self, sub: SubgroupBits) -> None:
        m = sub.members
        prods = self.T[np.ix_(m, m)]
        if not sub.bits[prods].all():
            raise ClosureError("member set is not closed under multiplication")
        if not sub.bits[self.inv[m]].all():
            raise ClosureError("member set is not closed under inversion")

    def trivial_bits(self) -> SubgroupBits:
        return self.subgroup([0], verify=False)

    def full_bits(self) -> SubgroupBits:
        bits = np.ones(self.n, dtype=bool)
        return SubgroupBits(self, bits)

    def closure(self, seed) -> SubgroupBits:
        """Subgroup generated by the seed indices."""
        bits = np.zeros(self.n, dtype=bool)
        bits[0] = True
        seed = sorted({int(s) for s in seed})
        frontier = [0]
        for s in seed:
            if not bits[s]:
                bits[s] = True
                frontier.append(s)
        while frontier:
            m = np.flatnonzero(bits)
            prods = np.unique(self.T[np.ix_(np.asarray(frontier), m)])
            prods = np.concatenate([prods, np.unique(self.T[np.ix_(m, np.asarray(frontier))])])
            fresh = np.unique(prods[~bits[prods]])
            bits[fresh] = True
            frontier = list(fresh)
        return SubgroupBits(self, bits)

    def centralizer(self, of_members, within: SubgroupBits | None = None) -> SubgroupBits:
        of_members = np.asarray([int(m) for m in of_members])
        mask = (self.comm[:, of_members] == 0).all(axis=1)
        if within is not None:
            mask &= within.bits
        mask[0] = True
        return SubgroupBits(self, mask)

    def center_of(self, sub: SubgroupBits) -> SubgroupBits:
        m = sub.members
        mask = np.zeros(self.n, dtype=bool)
        central = (self.comm[np.ix_(m, m)] == 0).all(axis=1)
        mask[m[central]] = True
        return SubgroupBits(self, mask)

    def upper_central_series(self, sub: SubgroupBits | None = None):
        """Z1 <= Z2 <= ... computed by preimage-of-center scans, until stable."""
        if sub is None:
            sub = self.full_bits()
        m = sub.members
        series = []
        z = np.zeros(self.n, dtype=bool)
        z[0] = True
        while True:
            # next term: x in sub with [x, y] in current z for all y in sub
            nxt = np.zeros(self.n, dtype=bool)
            cand = m
            ok = z[self.comm[np.ix_(cand, m)]].all(axis=1)
            nxt[cand[ok]] = True
            if np.array_equal(nxt, z):
                break
            z = nxt
            series.append(SubgroupBits(self, z.copy()))
            if np.array_equal(z, sub.bits):
                break
        return series

    def derived_subgroup(self, sub: SubgroupBits | None = None) -> SubgroupBits:
        if sub is None:
            sub = self.full_bits()
        m = sub.members
        seeds = np.unique(self.comm[np.ix_(m, m)])
        return self.closure(seeds)

    def squares(self, sub: SubgroupBits | None = None) -> np.ndarray:
        if sub is None:
            sub = self.full_bits()
        m = sub.members
        return np.unique(self.T[m, m])

    def frattini(self, sub: SubgroupBits | None = None) -> SubgroupBits:
        """Frattini subgroup of a 2-group, computed two independent ways.

        Route 1: closure of commutators and squares.  Route 2: literal
        intersection of all maximal subgroups.  Both must agree.
        """
        if sub is None:
            sub = self.full_bits()
        derived = self.derived_subgroup(sub)
        seeds = np.concatenate([derived.members, self.squares(sub)])
        phi1 = self.closure(seeds)
        inter = sub.bits.copy()
        for mx in self.maximal_subgroups(sub):
            inter &= mx.bits
        if not np.array_equal(phi1.bits, inter):
            raise ClosureError("the two Frattini computations disagree")
        return phi1

    # -- quotients ----------------------------------------------------------

    def coset_reps(self, k: SubgroupBits, sub: SubgroupBits | None = None) -> np.ndarray:
        """rep[x] = min element of the coset K x (K must be normal in sub)."""
        mk = k.members
        reps = self.T[np.ix_(mk, np.arange(self.n))].min(axis=0)
        return reps

    def quotient_labels(self, k: SubgroupBits) -> np.ndarray:
        return self.coset_reps(k)

    def quotient_group(self, k: SubgroupBits, sub: SubgroupBits | None = None):
        """Quotient (sub or whole group)/k as a fresh CayleyGroup.

        Returns (quotient, rep_of, new_index) where rep_of[x] is the coset
        representative and new_index[rep] the quotient element index.
        """
        if sub is None:
            sub = self.full_bits()
        self.check_normal(k, sub)
        rep_of = self.coset_reps(k)
        reps = np.unique(rep_of[sub.members])
        new_index = np.full(self.n, -1, dtype=np.int64)
        new_index[reps] = np.arange(len(reps))
        table = new_index[rep_of[self.T[np.ix_(reps, reps)]]]
        q = CayleyGroup(table.astype(IDX), name="%s/%s" % (self.name, "K"))
        return q, rep_of, new_index

    def check_normal(self, k: SubgroupBits, sub: SubgroupBits | None = None) -> None:
        if sub is None:
            sub = self.full_bits()
        mk = k.members
        conj = self.comm[np.ix_(mk, sub.members)]
        # [k, s] in K for all k, s is equivalent to normality of K in sub
        if not k.bits[conj].all():
            raise ClosureError("subgroup is not normal where required")

    def elementary_quotient_coords(self, k: SubgroupBits,
                                   sub: SubgroupBits | None = None):
        """GF(2)-coordinates on an elementary abelian quotient sub/k.

        Returns (coords, basis_reps): coords[x] is the bit vector of the
        coset of x, for every x in sub.
        """
        if sub is None:
            sub = self.full_bits()
        rep_of = self.coset_reps(k)
        reps = np.unique(rep_of[sub.members])
        basis = []
        span = {int(reps[0]) if reps[0] == 0 else 0}
        span = {0}
        coords_of_rep = {0: 0}
        for r in reps:
            r = int(r)
            if r in span:
                continue
            # new basis vector
            bpos = len(basis)
            basis.append(r)
            for s, c in list(coords_of_rep.items()):
                t = int(rep_of[self.T[s, r]])
                coords_of_rep[t] = c | (1 << bpos)
                span.add(t)
        if len(span) != len(reps):
            raise ClosureError("quotient is not elementary abelian")
        coords = np.zeros(self.n, dtype=np.int64)
        for r, c in coords_of_rep.items():
            coords[r] = c
        full = coords[rep_of]
        return full, basis

    # -- maximal subgroup descent -------------------------------------------

    def maximal_subgroups(self, sub: SubgroupBits | None = None):
        """Index-2 subgroups of a 2-group: hyperplane preimages mod Frattini."""
        if sub is None:
            sub = self.full_bits()
        derived = self.derived_subgroup(sub)
        seeds = np.concatenate([derived.members, self.squares(sub)])
        phi = self.closure(seeds)
        coords, basis = self.elementary_quotient_coords(phi, sub)
        r = len(basis)
        out = []
        sm = sub.members
        for lam in range(1, 1 << r):
            par = np.zeros(self.n, dtype=np.int64)
            par[sm] = _popcount(coords[sm] & lam) & 1
            bits = sub.bits & (par == 0)
            out.append(SubgroupBits(self, bits))
        return out

    def subgroups_of_index(self, k: int, explosion_guard=1_000_000):
        """Complete duplicate-free list for k in {2, 4, 8} by maximal descent."""
        if k not in (2, 4, 8):
            raise ConfigurationError("only indices 2, 4, 8 are supported")
        current = {self.full_bits().key(): self.full_bits()}
        depth = {2: 1, 4: 2, 8: 3}[k]
        for _ in range(depth):
            nxt = {}
            for sub in current.values():
                for mx in self.maximal_subgroups(sub):
                    key = mx.key()
                    if key not in nxt:
                        if len(nxt) > explosion_guard:
                            raise ResourceError("subgroup descent exploded")
                        nxt[key] = mx
            current = nxt
        for sub in current.values():
            self.check_closed(sub)
        return sorted(current.values(), key=lambda s: tuple(s.members[:3]))

    # -- structure flags ----------------------------------------------------

    def is_abelian(self, sub: SubgroupBits) -> bool:
        m = sub.members
        return bool((self.comm[np.ix_(m, m)] == 0).all())

    def is_elementary_abelian(self, sub: SubgroupBits) -> bool:
        m = sub.members
        if (self.order_of[m] > 2).any():
            return False
        return self.is_abelian(sub)

    def exponent(self, sub: SubgroupBits) -> int:
        from math import lcm
        return int(np.lcm.reduce(self.order_of[sub.members]))

    def order_histogram(self, sub: SubgroupBits):
        vals, counts = np.unique(self.order_of[sub.members], return_counts=True)
        return tuple((int(v), int(c)) for v, c in zip(vals, counts))

    def is_extraspecial(self, sub: SubgroupBits) -> bool:
        z = self.center_of(sub)
        if z.order != 2:
            return False
        d = self.derived_subgroup(sub)
        if not np.array_equal(d.bits, z.bits):
            return False
        sq = self.squares(sub)
        phi = self.closure(np.concatenate([d.members, sq]))
        if not np.array_equal(phi.bits, z.bits):
            return False
        n = sub.order
        power = n.bit_length() - 1
        return n == 1 << power and power % 2 == 1

    def extraspecial_type(self, sub: SubgroupBits) -> str:
        """'+' or '-' by involution count, for extraspecial 2-groups."""
        if not self.is_extraspecial(sub):
            raise ConfigurationError("type is defined for extraspecial groups only")
        n = sub.order
        m = (n.bit_length() - 2) // 2  # |sub| = 2^(1+2m)
        invol = int((self.order_of[sub.members] <= 2).sum())  # includes identity
        plus = 2 * (2 ** (m - 1) + 1) * (2 ** m - 1) + 2
        minus = 2 * (2 ** (m - 1) - 1) * (2 ** m + 1) + 2
        if invol == plus:
            return "+"
        if invol == minus:
            return "-"
        raise ClosureError("involution count matches neither extraspecial type")

    def abelian_invariant_check(self, sub: SubgroupBits, invariants) -> bool:
        """Does an abelian sub have the given cyclic invariants (e.g. (4,2,2,2))?"""
        if not self.is_abelian(sub):
            return False
        import math
        order = 1
        for q in invariants:
            order *= q
        if sub.order != order:
            return False
        # compare the full order histogram with the abstract product's
        from collections import Counter
        hist = Counter()
        def count_orders(invs):
            tallies = Counter({1: 1})
            for q in invs:
                new = Counter()
                for o, c in tallies.items():
                    for k in range(q):
                        e = _order_in_cyclic(k, q)
                        new[math.lcm(o, e)] += c
                tallies = new
            return tallies
        target = count_orders(tuple(invariants))
        actual = Counter({int(v): int(c) for v, c in self.order_histogram(sub)})
        return target == actual

    def fingerprint(self, sub: SubgroupBits):
        """Isomorphism-invariant tuple used for dedup and search pruning."""
        z = self.center_of(sub)
        d = self.derived_subgroup(sub)
        phi_seeds = np.concatenate([d.members, self.squares(sub)])
        phi = self.closure(phi_seeds)
        return (
            sub.order,
            self.exponent(sub),
            z.order,
            d.order,
            phi.order,
            self.order_histogram(sub),
            self.is_abelian(sub),
            self.is_elementary_abelian(sub),
            self.is_extraspecial(sub),
        )

    # -- conjugacy ----------------------------------------------------------

    def generating_set(self):
        """A small generating set (greedy closure over ascending indices)."""
        if self.gen_indices:
            return list(self.gen_indices)
        gens = []
        bits = np.zeros(self.n, dtype=bool)
        bits[0] = True
        while not bits.all():
            x = int(np.flatnonzero(~bits)[0])
            gens.append(x)
            bits |= self.closure(gens).bits
        self.gen_indices = gens
        return gens

    def conjugacy_classes(self) -> np.ndarray:
        """class id (minimal member) per element, under inner automorphisms."""
        if self._classes is not None:
            return self._classes
        gens = self.generating_set()
        maps = [self.conj_map_images(g) for g in gens]
        label = np.arange(self.n, dtype=np.int64)
        changed = True
        while changed:
            changed = False
            for mp in maps:
                pulled = np.minimum(label, label[mp])
                # propagate min label across the orbit both ways
                np.minimum.at(pulled, mp, label)
                if not np.array_equal(pulled, label):
                    label = pulled
                    changed = True
        # canonicalize: relabel by orbit minimum until stable
        stable = False
        while not stable:
            relabeled = label[label]
            stable = np.array_equal(relabeled, label)
            label = relabeled
        self._classes = label
        return label


def derived_and_frattini(g: CayleyGroup, sub: SubgroupBits | None = None):
    """(derived subgroup, Frattini subgroup); the latter is computed two
    independent ways internally and must agree."""
    return g.derived_subgroup(sub), g.frattini(sub)


def _popcount(arr):
    arr = np.asarray(arr, dtype=np.int64)
    out = np.zeros_like(arr)
    while arr.any():
        out += arr & 1
        arr >>= 1
    return out


def _order_in_cyclic(k, q):
    from math import gcd
    return q // gcd(k, q)


@dataclass
class AutoMap:
    """A multiplicative bijection on a subgroup domain (or the whole group).

    Verification is exhaustive over the domain at construction time:
    ``images[T[x, y]] == T[images[x], images[y]]`` for every domain pair.
    """

    group: CayleyGroup
    images: np.ndarray
    domain: SubgroupBits | None = None

    def __post_init__(self):
        self.images = np.asarray(self.images, dtype=IDX)
        g = self.group
        dom = self.domain.bits if self.domain is not None else np.ones(g.n, dtype=bool)
        m = np.flatnonzero(dom)
        img = self.images[m]
        if len(np.unique(img)) != len(m):
            raise ClosureError("automorphism images are not injective on the domain")
        if self.domain is not None and not dom[img].all():
            raise ClosureError("automorphism does not map the domain to itself")
        prods = g.T[np.ix_(m, m)]
        if not dom[prods].all():
            raise ClosureError("automorphism domain is not closed")
        left = self.images[prods]
        right = g.T[np.ix_(img, img)]
        if not np.array_equal(left, right):
            raise ClosureError("map is not multiplicative on its domain")
        if int(self.images[0]) != 0:
            raise ClosureError("map does not fix the identity")

    def apply(self, x):
        return int(self.images[int(x)])

    def then(self, other: "AutoMap") -> "AutoMap":
        return AutoMap(self.group, other.images[self.images], self.domain)

    def inverse_map(self) -> "AutoMap":
        inv = np.empty_like(self.images)
        dom = self.domain.bits if self.domain is not None else None
        if dom is None:
            inv[self.images] = np.arange(self.group.n, dtype=IDX)
        else:
            inv[:] = np.arange(self.group.n, dtype=IDX)
            m = np.flatnonzero(dom)
            inv[self.images[m]] = m.astype(IDX)
        return AutoMap(self.group, inv, self.domain)

    def map_order(self) -> int:
        k = 1
        cur = self.images
        ident = np.arange(self.group.n, dtype=IDX)
        dom = self.domain.bits if self.domain is not None else np.ones(self.group.n, bool)
        m = np.flatnonzero(dom)
        while not np.array_equal(cur[m], m):
            cur = self.images[cur]
            k += 1
            if k > self.group.n:
                raise ClosureError("map order runaway")
        return k

    def stabilizes(self, sub: SubgroupBits) -> bool:
        m = sub.members
        return bool(sub.bits[self.images[m]].all())


def inner_automap(g: CayleyGroup, elem: int, domain: SubgroupBits | None = None) -> AutoMap:
    return AutoMap(g, g.conj_map_images(elem), domain)


def enumerate_elab_subgroups(g: CayleyGroup, rank: int,
                             universe: SubgroupBits | None = None,
                             avoid: SubgroupBits | None = None,
                             max_nodes: int = 5_000_000):
    """All elementary abelian subgroups of 2^rank elements, exhaustively.

    Depth-first search over greedy-minimal generating sequences.  When
    ``avoid`` is given, only subgroups with at least one member outside
    ``avoid`` are wanted: elements outside sort first in the priority
    order, so those subgroups start their canonical basis outside and the
    root loop can skip inside elements entirely.
    """
    n = g.n
    inv_mask = (g.order_of == 2)
    if universe is not None:
        inv_mask = inv_mask & universe.bits
    prio = np.arange(n, dtype=np.int64)
    if avoid is not None:
        prio = prio + np.where(avoid.bits, np.int64(n), np.int64(0))
    target = 1 << rank
    found = {}
    nodes = 0

    comm = g.comm

    def extend(basis, span_arr, span_bits, cmask, last_prio):
        nonlocal nodes
        nodes += 1
        if nodes > max_nodes:
            raise ResourceError("elementary abelian search exceeded its node budget",
                                stats={"nodes": nodes, "found": len(found)})
        if len(basis) == rank:
            key = span_bits.tobytes()
            if key not in found:
                found[key] = g.subgroup(span_bits, verify=True)
            return
        # capacity prune: every future member is an involution commuting
        # with the current span
        if int((inv_mask & cmask).sum()) + 1 < target:
            return
        cand = np.flatnonzero(inv_mask & cmask & ~span_bits)
        if len(cand) == 0:
            return
        cand = cand[prio[cand] > last_prio]
        if len(cand) == 0:
            return
        # greedy-minimal condition: candidate is the prio-min of its coset
        prods = g.T[np.ix_(cand, span_arr)]
        keep = prio[prods].min(axis=1) >= prio[cand]
        cand = cand[keep]
        for t in cand:
            t = int(t)
            new_span = np.unique(np.concatenate([span_arr, g.T[t, span_arr]]))
            nb = span_bits.copy()
            nb[new_span] = True
            extend(basis + [t], new_span, nb, cmask & (comm[t] == 0), prio[t])

    roots = np.flatnonzero(inv_mask)
    if avoid is not None:
        roots = roots[~avoid.bits[roots]]
    roots = roots[np.argsort(prio[roots])]
    ident_bits = np.zeros(n, dtype=bool)
    ident_bits[0] = True
    for r in roots:
        r = int(r)
        span_arr = np.array([0, r], dtype=np.int64)
        sb = ident_bits.copy()
        sb[r] = True
        extend([r], span_arr, sb, (comm[r] == 0), prio[r])
    return list(found.values()), nodes
