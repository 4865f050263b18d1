"""Shared test utilities: exhaustive enumerations and brute-force oracles."""

import itertools
import random
from functools import lru_cache

from limrec.treelogic import DirectedTree


@lru_cache(maxsize=None)
def tree_shapes(n):
    """All rooted tree shapes with n vertices, as nested sorted tuples."""
    if n == 1:
        return ((),)
    shapes = set()

    def parts(remaining, min_key):
        if remaining == 0:
            yield ()
            return
        for s in range(1, remaining + 1):
            for t in tree_shapes(s):
                key = (s, t)
                if key < min_key:
                    continue
                for rest in parts(remaining - s, key):
                    yield (t,) + rest

    for kids in parts(n - 1, (0, ())):
        shapes.add(tuple(sorted(kids)))
    return tuple(sorted(shapes))


def shape_to_tree(shape) -> DirectedTree:
    parents = [None]

    def attach(kids, parent):
        for kid in kids:
            parents.append(parent)
            attach(kid, len(parents) - 1)

    attach(shape, 0)
    return DirectedTree(parents)


def all_trees(max_n):
    for n in range(1, max_n + 1):
        for shape in tree_shapes(n):
            yield shape_to_tree(shape)


def permute_tree(tree: DirectedTree, perm) -> DirectedTree:
    """Relabel vertices by perm (old index -> new index)."""
    parents = [None] * tree.n
    for v, p in enumerate(tree.parent):
        parents[perm[v]] = None if p is None else perm[p]
    return DirectedTree(parents)


def random_permutation(n, rng: random.Random):
    perm = list(range(n))
    rng.shuffle(perm)
    return perm


def coloured_canonical_form(tree: DirectedTree, colours, v):
    """Colour-aware canonical nested tuple; equal forms iff the coloured
    subtrees are isomorphic."""
    kids = sorted(coloured_canonical_form(tree, colours, c) for c in tree.children[v])
    return (colours.get(v, ()), tuple(kids))


def graphs_up_to_iso(n, numpy_module):
    """Connected graph representatives on n vertices (canonical edge masks),
    built by extending the (n-1)-vertex representatives."""
    np = numpy_module
    pairs = list(itertools.combinations(range(n), 2))
    pair_index = {pq: i for i, pq in enumerate(pairs)}
    perms = list(itertools.permutations(range(n)))
    perm_maps = np.array(
        [
            [pair_index[tuple(sorted((perm[a], perm[b])))] for (a, b) in pairs]
            for perm in perms
        ],
        dtype=np.int64,
    )
    weights = np.left_shift(np.int64(1), np.arange(len(pairs), dtype=np.int64))

    def canonical(mask):
        bits = np.array([(mask >> i) & 1 for i in range(len(pairs))], dtype=np.int64)
        images = bits[perm_maps]
        return int(np.min(images @ weights))

    if n == 1:
        return [0]
    small_pairs = list(itertools.combinations(range(n - 1), 2))
    seen = set()
    out = []
    for small in graphs_up_to_iso_all(n - 1, np):
        lifted = 0
        for i, pq in enumerate(small_pairs):
            if small >> i & 1:
                lifted |= 1 << pair_index[pq]
        for nbhd in range(1, 1 << (n - 1)):
            mask = lifted
            for v in range(n - 1):
                if nbhd >> v & 1:
                    mask |= 1 << pair_index[(v, n - 1)]
            canon = canonical(mask)
            if canon not in seen:
                seen.add(canon)
                if _mask_connected(canon, n):
                    out.append(canon)
    return out


_ALL_CACHE = {}


def graphs_up_to_iso_all(n, numpy_module):
    """All graph representatives on n vertices (not only connected)."""
    np = numpy_module
    if n in _ALL_CACHE:
        return _ALL_CACHE[n]
    if n == 1:
        reps = [0]
    else:
        pairs = list(itertools.combinations(range(n), 2))
        pair_index = {pq: i for i, pq in enumerate(pairs)}
        perms = list(itertools.permutations(range(n)))
        perm_maps = np.array(
            [
                [pair_index[tuple(sorted((perm[a], perm[b])))] for (a, b) in pairs]
                for perm in perms
            ],
            dtype=np.int64,
        )
        weights = np.left_shift(np.int64(1), np.arange(len(pairs), dtype=np.int64))
        small_pairs = list(itertools.combinations(range(n - 1), 2))
        seen = set()
        reps = []
        for small in graphs_up_to_iso_all(n - 1, np):
            lifted = 0
            for i, pq in enumerate(small_pairs):
                if small >> i & 1:
                    lifted |= 1 << pair_index[pq]
            for nbhd in range(1 << (n - 1)):
                mask = lifted
                for v in range(n - 1):
                    if nbhd >> v & 1:
                        mask |= 1 << pair_index[(v, n - 1)]
                bits = np.array(
                    [(mask >> i) & 1 for i in range(len(pairs))], dtype=np.int64
                )
                canon = int(np.min(bits[perm_maps] @ weights))
                if canon not in seen:
                    seen.add(canon)
                    reps.append(canon)
    _ALL_CACHE[n] = reps
    return reps


def mask_to_edges(mask, n):
    pairs = list(itertools.combinations(range(n), 2))
    return {pairs[i] for i in range(len(pairs)) if mask >> i & 1}


def _mask_connected(mask, n):
    edges = mask_to_edges(mask, n)
    adj = {v: set() for v in range(n)}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == n


def graph_iso(edges1, edges2, n1, n2):
    """Brute-force undirected graph isomorphism for small n."""
    if n1 != n2 or len(edges1) != len(edges2):
        return False
    e2 = {frozenset(e) for e in edges2}
    deg1 = _degrees(edges1, n1)
    deg2 = _degrees(edges2, n2)
    if sorted(deg1) != sorted(deg2):
        return False
    for perm in itertools.permutations(range(n1)):
        if all(deg2[perm[v]] == deg1[v] for v in range(n1)):
            if {frozenset((perm[a], perm[b])) for a, b in edges1} == e2:
                return True
    return False


def _degrees(edges, n):
    deg = [0] * n
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1
    return deg
