"""The Sylow 2-subgroup as a root-generator matrix group, and its order-3
diagram symmetry.

The twelve positive roots of the D4 system give twelve explicit unipotent
isometries of the hyperbolic GF(2) form; together they generate the full
chamber stabilizer of order 2^12.  The star symmetry of the D4 diagram
permutes the root labels with order 3, and substituting permuted
generators into each element's factorization yields a candidate map whose
multiplicativity is then verified exhaustively on the Cayley table.  That
verified map is the outer automorphism of order 3 used downstream.
"""

from __future__ import annotations

import numpy as np

from .cayley import AutoMap, CayleyGroup
from .perms import ConfigurationError
from .quadforms import DIM

# epsilon-coordinates of the simple roots (D4, node 2 is the branch node)
SIMPLE_ROOTS = np.array([
    [1, -1, 0, 0],
    [0, 1, -1, 0],
    [0, 0, 1, -1],
    [0, 0, 1, 1],
], dtype=np.int64)

# diagram symmetry of order 3: alpha1 -> alpha3 -> alpha4 -> alpha1
DIAGRAM_ROTATION = [2, 1, 3, 0]


def positive_roots():
    """(kind, i, j) with kind '-' for e_i - e_j and '+' for e_i + e_j, i < j."""
    out = []
    for i in range(4):
        for j in range(i + 1, 4):
            out.append(("-", i, j))
    for i in range(4):
        for j in range(i + 1, 4):
            out.append(("+", i, j))
    return out


def root_epsilon_vector(root):
    kind, i, j = root
    v = np.zeros(4, dtype=np.int64)
    v[i] = 1
    v[j] = -1 if kind == "-" else 1
    return v


def root_alpha_coords(root):
    v = root_epsilon_vector(root)
    sol = np.linalg.solve(SIMPLE_ROOTS.T.astype(float), v.astype(float))
    coords = np.rint(sol).astype(np.int64)
    if not np.array_equal(SIMPLE_ROOTS.T @ coords, v):
        raise ConfigurationError("root does not lie in the simple-root lattice")
    return tuple(int(c) for c in coords)


def triality_root_permutation():
    """Order-3 permutation of the 12 positive roots from the diagram symmetry."""
    roots = positive_roots()
    by_coords = {root_alpha_coords(r): k for k, r in enumerate(roots)}
    perm = []
    for r in roots:
        c = root_alpha_coords(r)
        image = [0, 0, 0, 0]
        for i, ci in enumerate(c):
            image[DIAGRAM_ROTATION[i]] = ci
        k = by_coords.get(tuple(image))
        if k is None:
            raise ConfigurationError("diagram symmetry left the positive system")
        perm.append(k)
    perm = np.array(perm, dtype=np.int64)
    p3 = perm[perm][perm]
    if not np.array_equal(p3, np.arange(12)):
        raise ConfigurationError("diagram symmetry does not have order 3 on roots")
    if np.array_equal(perm, np.arange(12)):
        raise ConfigurationError("diagram symmetry is trivial on roots")
    return perm


def root_matrix(root) -> np.ndarray:
    """The unipotent isometry for one positive root.

    Coordinates pair hyperbolically as (0,1), (2,3), (4,5), (6,7) with
    e_i = bit 2i and f_i = bit 2i+1.
    """
    kind, i, j = root
    m = np.eye(DIM, dtype=np.uint8)
    e = lambda k: 2 * k
    f = lambda k: 2 * k + 1
    if kind == "-":
        m[e(i), e(j)] = 1   # e_j -> e_j + e_i
        m[f(j), f(i)] = 1   # f_i -> f_i + f_j
    else:
        m[e(j), f(i)] = 1   # f_i -> f_i + e_j
        m[e(i), f(j)] = 1   # f_j -> f_j + e_i
    return m


def matrix_key(mat) -> bytes:
    return np.asarray(mat, dtype=np.uint8).tobytes()


def build_root_model() -> CayleyGroup:
    """The group generated by the twelve root matrices, fully enumerated."""
    mats = [root_matrix(r) for r in positive_roots()]

    def mul(a, b):  # a then b, acting on column vectors
        return ((np.asarray(b, dtype=np.int64) @ np.asarray(a, dtype=np.int64)) % 2) \
            .astype(np.uint8)

    group = CayleyGroup.from_generators(
        mats, mul=mul, key=matrix_key, identity=np.eye(DIM, dtype=np.uint8),
        name="root-model")
    if group.n != 4096:
        raise ConfigurationError("root matrices generated order %d, not 4096" % group.n)
    return group


def triality_automap(group: CayleyGroup) -> AutoMap:
    """The verified order-3 automorphism from the diagram symmetry.

    Images are produced by substituting rotated generators into each
    element's breadth-first factorization; the AutoMap constructor then
    checks multiplicativity on every pair, so a wrong substitution cannot
    survive.
    """
    rot = triality_root_permutation()
    gen_idx = group.gen_indices
    images = np.zeros(group.n, dtype=np.uint16)
    for b in range(1, group.n):
        f, j = group.parents[b]
        images[b] = group.T[images[f], gen_idx[int(rot[j])]]
    auto = AutoMap(group, images)
    if auto.map_order() != 3:
        raise ConfigurationError("diagram map does not have order 3 on the group")
    return auto


def root_model_matches(bundle_matrices) -> np.ndarray:
    """Index translation root-model -> bundle for matrix-backed models.

    Returns an array mapping each root-model element index to the bundle
    element index carrying the same matrix; raises if the two element sets
    differ (they must coincide for the standard chamber stabilizer).
    """
    group = build_root_model()
    lookup = {matrix_key(m): i for i, m in enumerate(bundle_matrices)}
    out = np.empty(group.n, dtype=np.int64)
    for i, m in enumerate(group.elements):
        j = lookup.get(matrix_key(m))
        if j is None:
            raise ConfigurationError("root-model element missing from the bundle; "
                                     "the chamber is not the standard one")
        out[i] = j
    return out
