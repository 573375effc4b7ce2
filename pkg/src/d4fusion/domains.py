"""Indexed geometric domains (singular points, lines, solids) and induced actions.

Each domain enumerates its objects deterministically (sorted by packed
vector codes), assigns dense 0-based indices, and can convert an isometry
matrix into the induced permutation of those indices.  The permutation
engine never sees geometry, only indices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .perms import DTYPE
from .quadforms import (
    DIM,
    GF2_SPACE,
    GF3_SPACE,
    PreconditionError,
    QuadraticSpace,
)

_POW2 = (1 << np.arange(DIM)).astype(np.int64)
_POW3 = (3 ** np.arange(DIM)).astype(np.int64)

# all 256 GF(2) vectors as rows, indexed by code
_BITS = ((np.arange(256)[:, None] >> np.arange(DIM)[None, :]) & 1).astype(np.uint8)


def gf2_code_map(mat) -> np.ndarray:
    """code -> code table for one GF(2) matrix acting on column vectors."""
    imgs = (_BITS @ (np.asarray(mat, dtype=np.int64).T % 2)) % 2
    return (imgs @ _POW2).astype(np.int64)


def span_codes_gf2(basis_codes) -> frozenset:
    """All nonzero codes in the GF(2) span of the given codes."""
    out = {0}
    for b in basis_codes:
        out |= {x ^ int(b) for x in out}
    out.discard(0)
    return frozenset(out)


class IndexedDomain:
    """Base: an ordered list of geometric objects with index lookup."""

    kind = ""

    def __len__(self):
        return self.size

    def perm_of_matrix(self, mat) -> np.ndarray:
        raise NotImplementedError


class Gf2PointsDomain(IndexedDomain):
    kind = "points"

    def __init__(self):
        self.space = GF2_SPACE
        codes = np.sort(GF2_SPACE.singular_codes())
        self.codes = codes.astype(np.int64)
        self.size = len(codes)
        self.index_of_code = np.full(256, -1, dtype=np.int64)
        self.index_of_code[self.codes] = np.arange(self.size)

    def perm_of_matrix(self, mat) -> np.ndarray:
        cmap = gf2_code_map(mat)
        imgs = self.index_of_code[cmap[self.codes]]
        if (imgs < 0).any():
            bad = self.codes[int(np.nonzero(imgs < 0)[0][0])]
            raise PreconditionError("matrix does not preserve the singular points; "
                                    "witness code %d" % bad)
        return imgs.astype(DTYPE)


class Gf2SubspaceDomain(IndexedDomain):
    """Totally singular subspaces of a fixed dimension, keyed by member codes."""

    def __init__(self, kind, keys):
        self.space = GF2_SPACE
        self.kind = kind
        self.keys = sorted(keys)  # each key: sorted tuple of nonzero member codes
        self.size = len(self.keys)
        self.index = {k: i for i, k in enumerate(self.keys)}

    def perm_of_matrix(self, mat) -> np.ndarray:
        cmap = gf2_code_map(mat)
        out = np.empty(self.size, dtype=DTYPE)
        for i, key in enumerate(self.keys):
            img = tuple(sorted(int(cmap[c]) for c in key))
            j = self.index.get(img)
            if j is None:
                raise PreconditionError("matrix does not preserve the %s domain; "
                                        "witness object %r" % (self.kind, key))
            out[i] = j
        return out


class Gf3ProjectivePointsDomain(IndexedDomain):
    """Singular projective points of the GF(3) space (1120 of them)."""

    kind = "points"

    def __init__(self):
        self.space = GF3_SPACE
        reps = []
        for code in range(3 ** DIM):
            v = GF3_SPACE.vector(code)
            nz = np.nonzero(v)[0]
            if len(nz) == 0 or v[nz[0]] != 1:
                continue  # not the normalized representative
            if GF3_SPACE.eval_q(v) == 0:
                reps.append(v)
        self.vectors = np.array(reps, dtype=np.int64)
        codes = self.vectors @ _POW3
        order = np.argsort(codes)
        self.vectors = self.vectors[order]
        self.codes = codes[order]
        self.size = len(self.codes)
        self.index_of_code = np.full(3 ** DIM, -1, dtype=np.int64)
        self.index_of_code[self.codes] = np.arange(self.size)

    @staticmethod
    def normalize_rows(rows) -> np.ndarray:
        rows = rows % 3
        out = rows.copy()
        for i in range(rows.shape[0]):
            nz = np.nonzero(rows[i])[0]
            if len(nz) and rows[i][nz[0]] == 2:
                out[i] = (rows[i] * 2) % 3
        return out

    def perm_of_matrix(self, mat) -> np.ndarray:
        mat = np.asarray(mat, dtype=np.int64) % 3
        imgs = (self.vectors @ mat.T) % 3
        imgs = self.normalize_rows(imgs)
        idx = self.index_of_code[imgs @ _POW3]
        if (idx < 0).any():
            bad = int(np.nonzero(idx < 0)[0][0])
            raise PreconditionError("matrix does not preserve the projective singular "
                                    "points; witness index %d" % bad)
        return idx.astype(DTYPE)


def enumerate_ts_lines():
    """Totally singular GF(2) lines as sorted triples of codes."""
    points = np.sort(GF2_SPACE.singular_codes())
    out = set()
    pts = [int(p) for p in points]
    singular = set(pts)
    for a in pts:
        for b in pts:
            if b <= a:
                continue
            if GF2_SPACE.polar(a, b) == 0 and (a ^ b) in singular:
                out.add(tuple(sorted((a, b, a ^ b))))
    return sorted(out)


def enumerate_ts_solids():
    """Totally singular GF(2) 4-spaces as sorted 15-tuples of codes.

    Depth-first search over greedy-minimal bases; each solid is found at
    least once and deduplicated by its member set.
    """
    singular = set(int(c) for c in GF2_SPACE.singular_codes())
    pts = sorted(singular)
    found = set()

    def extend(basis, span):
        if len(basis) == 4:
            found.add(tuple(sorted(span)))
            return
        lo = basis[-1] if basis else 0
        for c in pts:
            if c <= lo or c in span:
                continue
            if any(GF2_SPACE.polar(c, b) for b in basis):
                continue
            coset = [c ^ s for s in span]
            if any(x < c for x in coset):
                continue  # not the greedy-minimal choice for this subspace
            if any(x not in singular for x in coset):
                continue
            extend(basis + [c], span | set(coset) | {c})

    extend([], set())
    return sorted(found)


def split_solid_families(solids):
    """Partition solids by intersection-dimension parity with a reference solid."""
    ref = set(solids[0])
    fam1, fam2 = [], []
    for key in solids:
        inter = len(ref & set(key))  # 2^d - 1 common nonzero vectors
        d = {0: 0, 1: 1, 3: 2, 7: 3, 15: 4}[inter]
        (fam1 if d % 2 == 0 else fam2).append(key)
    return fam1, fam2


_CACHE = {}


def singular_objects(space: QuadraticSpace, kind: str) -> IndexedDomain:
    """Deterministic indexed enumeration of one kind of singular object."""
    key = (space.name, kind)
    if key in _CACHE:
        return _CACHE[key]
    if space.field_order == 2:
        if kind == "points":
            dom = Gf2PointsDomain()
        elif kind == "lines":
            dom = Gf2SubspaceDomain("lines", enumerate_ts_lines())
        elif kind in ("solids-family-1", "solids-family-2"):
            fam1, fam2 = split_solid_families(enumerate_ts_solids())
            _CACHE[(space.name, "solids-family-1")] = Gf2SubspaceDomain(
                "solids-family-1", fam1)
            _CACHE[(space.name, "solids-family-2")] = Gf2SubspaceDomain(
                "solids-family-2", fam2)
            return _CACHE[key]
        else:
            raise PreconditionError("unsupported GF(2) domain kind %r" % kind)
    elif space.field_order == 3:
        if kind != "points":
            raise PreconditionError("only projective points are enumerated over GF(3)")
        dom = Gf3ProjectivePointsDomain()
    else:
        raise PreconditionError("unsupported space")
    _CACHE[key] = dom
    return dom


class ConcatenatedDomain(IndexedDomain):
    """Disjoint union of domains with offset bookkeeping."""

    kind = "concat"

    def __init__(self, parts):
        self.parts = list(parts)
        self.offsets = []
        total = 0
        for p in self.parts:
            self.offsets.append(total)
            total += p.size
        self.size = total

    def offset_of(self, part_index: int) -> int:
        return self.offsets[part_index]

    def perm_of_matrix(self, mat) -> np.ndarray:
        blocks = []
        for p, off in zip(self.parts, self.offsets):
            blocks.append(p.perm_of_matrix(mat).astype(np.int64) + off)
        return np.concatenate(blocks).astype(DTYPE)


def induced_action(group_gens, domain: IndexedDomain):
    """Permutations induced by matrix generators on an indexed domain."""
    out = []
    for g in group_gens:
        mat = g.entries if hasattr(g, "entries") else g
        out.append(domain.perm_of_matrix(mat))
    return out


@dataclass
class SingularFlag:
    """An incident chain of totally singular subspaces, oriflamme style.

    ``subspaces`` maps kinds to member-code keys: a point code, a line
    triple, and one solid 15-tuple from each family; the two solids must
    meet in dimension 3 and both contain the line.
    """

    point: int
    line: tuple
    solid1: tuple
    solid2: tuple

    def validate(self):
        if GF2_SPACE.eval_q(self.point) != 0:
            raise PreconditionError("flag point is not singular")
        line = set(self.line)
        s1, s2 = set(self.solid1), set(self.solid2)
        if self.point not in line or not line <= s1 or not line <= s2:
            raise PreconditionError("flag members are not incident")
        if len(s1 & s2) != 7:  # 2^3 - 1 shared nonzero vectors
            raise PreconditionError("solids do not meet in dimension 3")
        for key in (line, s1, s2):
            for c in key:
                if GF2_SPACE.eval_q(c) != 0:
                    raise PreconditionError("flag subspace is not totally singular")
        return True
