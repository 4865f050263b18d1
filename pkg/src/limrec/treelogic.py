"""Directed-tree machinery: subtree isomorphism and a canonical subtree
order decided through native recursion graphs, plus tree canonisation and
Boolean circuit evaluation.

The recursion graphs ("gadgets") live over the tuple space
N(T) x V(T)^4 x N(T) and are queried through the generic engines; they
are built directly as labelled graphs with analytic out-neighbour,
in-degree and label functions, never materialized.  Trees with fewer
than four vertices bypass the gadgets and use the direct comparator.
"""

from __future__ import annotations

from .errors import DomainError, RecognitionError
from .evaluator import LabelledGraph, evaluate, x_membership
from .structures import Structure
from .syntax import parse_formula, svar


class DirectedTree:
    """A rooted directed tree given by a parent array (root has None)."""

    def __init__(self, parents):
        parents = list(parents)
        n = len(parents)
        if n < 1:
            raise DomainError("tree must have at least one vertex")
        roots = [v for v, p in enumerate(parents) if p is None]
        if len(roots) != 1:
            raise DomainError(f"tree must have exactly one root, found {len(roots)}")
        self.root = roots[0]
        self.n = n
        self.parent = parents
        self.children = [[] for _ in range(n)]
        for v, p in enumerate(parents):
            if p is None:
                continue
            if not (0 <= p < n):
                raise DomainError(f"parent index {p} out of range")
            self.children[p].append(v)
        # detect cycles / reachability: every vertex must reach the root
        self.size = [0] * n
        order = []
        stack = [self.root]
        seen = {self.root}
        while stack:
            v = stack.pop()
            order.append(v)
            for c in self.children[v]:
                if c in seen:
                    raise DomainError("cycle in parent array")
                seen.add(c)
                stack.append(c)
        if len(order) != n:
            raise DomainError("parent array is not connected to the root")
        for v in reversed(order):
            self.size[v] = 1 + sum(self.size[c] for c in self.children[v])
        self._tables = None

    @classmethod
    def from_structure(cls, structure: Structure) -> "DirectedTree":
        n = structure.universe_size
        parents = [None] * n
        for a, b in structure.rel("E"):
            if parents[b] is not None:
                raise RecognitionError(f"vertex {b} has two parents")
            parents[b] = a
        try:
            return cls(parents)
        except DomainError as exc:
            raise RecognitionError(f"not a directed tree: {exc}") from None

    @classmethod
    def from_parent_line(cls, text: str) -> "DirectedTree":
        toks = text.split()
        if toks and toks[0] == "parents":
            toks = toks[1:]
        vals = [int(t) for t in toks]
        try:
            return cls([None if p < 0 else p for p in vals])
        except DomainError as exc:
            raise RecognitionError(f"not a directed tree: {exc}") from None

    def to_structure(self) -> Structure:
        from .structures import GRAPH_VOCAB

        edges = {(p, v) for v, p in enumerate(self.parent) if p is not None}
        return Structure(GRAPH_VOCAB, self.n, {"E": edges})

    def count_of_size(self, v: int, s: int) -> int:
        return self.tables().count_by_size.get((v, s), 0)

    def profile(self, v: int) -> tuple[int, ...]:
        return self.tables().profile[v]

    def tables(self):
        if self._tables is None:
            self._tables = _TreeTables(self)
        return self._tables


class _TreeTables:
    """Per-tree derived data shared by the gadgets."""

    def __init__(self, tree: DirectedTree):
        self.tree = tree
        n = tree.n
        self.kids_by_size = {}
        self.count_by_size = {}
        for v in range(n):
            for c in tree.children[v]:
                key = (v, tree.size[c])
                self.kids_by_size.setdefault(key, []).append(c)
                self.count_by_size[key] = self.count_by_size.get(key, 0) + 1
        for lst in self.kids_by_size.values():
            lst.sort()
        self.profile = [
            (tree.size[v],)
            + tuple(self.count_by_size.get((v, s), 0) for s in range(1, tree.size[v]))
            for v in range(n)
        ]
        self._easy = {}
        self.iso_cache = {}
        self.order_cache = {}
        self._theta = {}
        self._good = {}
        self._iso_gadget = None
        self._order_gadget = None
        self._canon_graph = None

    def kids_of_size(self, v, s):
        return self.kids_by_size.get((v, s), ())

    def easy(self, v, w) -> bool:
        """The pair fails the size/child-count screening of the recursive
        isomorphism procedure."""
        key = (v, w)
        cached = self._easy.get(key)
        if cached is None:
            cached = self.profile[v] != self.profile[w]
            self._easy[key] = cached
        return cached

    def theta(self, u, t) -> int:
        """Number of children of u whose subtree is isomorphic to T_t."""
        key = (u, t)
        cached = self._theta.get(key)
        if cached is None:
            cached = sum(
                1
                for c in self.kids_of_size(u, self.tree.size[t])
                if tree_isomorphic(self.tree, c, t)
            )
            self._theta[key] = cached
        return cached

    def good(self, v, w, vh) -> bool:
        """vh is a good child of v against w: v has more copies of T_vh
        than w, and all strictly smaller child classes are balanced."""
        key = (v, w, vh)
        cached = self._good.get(key)
        if cached is None:
            cached = self.theta(v, vh) > self.theta(w, vh) and all(
                self.theta(v, c) == self.theta(w, c)
                for c in self.tree.children[v]
                if self.tree.size[c] < self.tree.size[vh]
            )
            self._good[key] = cached
        return cached

    def iso_gadget(self):
        if self._iso_gadget is None:
            self._iso_gadget = _IsoGadget(self)
        return self._iso_gadget

    def order_gadget(self):
        if self._order_gadget is None:
            self._order_gadget = _OrderGadget(self)
        return self._order_gadget

    def canon_graph(self):
        if self._canon_graph is None:
            self._canon_graph = _CanonGraph(self)
        return self._canon_graph


class _IsoGadget(LabelledGraph):
    """Decision graph for subtree isomorphism queries.

    Vertex roles, encoded (type, v, w, vhat, what, k):
      type 0  (0,v,w,v,w,0)      "is T_v iso to T_w?"
      type 1  (1,v,w,vh,w,0)     "does child vh of v have a partner?"
      type 2  (2,v,w,vh,wh,k)    "is wh a partner of vh with multiplicity k?"
      type 3  (3,v,w,vh,wh,k)    counts partners of vh among w's children
      type 4  (4,v,w,vh,wh,k)    counts partners of wh among v's children
    """

    def __init__(self, tables: _TreeTables):
        super().__init__()
        self.tb = tables
        self.tree = tables.tree

    def out_neighbours(self, vx):
        t, v, w, vh, wh, k = vx
        tb, tree = self.tb, self.tree
        if t == 0:
            if (vh, wh, k) != (v, w, 0) or tb.easy(v, w):
                return ()
            return tuple((1, v, w, c, w, 0) for c in tree.children[v])
        if tb.easy(v, w):
            return ()
        if t == 1:
            if wh != w or k != 0 or tree.parent[vh] != v:
                return ()
            s = tree.size[vh]
            cap = tb.count_by_size.get((v, s), 0)
            return tuple(
                (2, v, w, vh, c, kk)
                for c in tb.kids_of_size(w, s)
                for kk in range(1, cap + 1)
            )
        # shared validity for types 2-4
        if tree.parent[vh] != v or tree.parent[wh] != w:
            return ()
        s = tree.size[vh]
        if tree.size[wh] != s:
            return ()
        cap = tb.count_by_size.get((v, s), 0)
        if not (1 <= k <= cap):
            return ()
        if t == 2:
            first = (0, vh, wh, vh, wh, 0)
            if cap == 1:
                return (first,)
            return (first, (3, v, w, vh, wh, k), (4, v, w, vh, wh, k))
        if cap < 2:
            return ()
        if t == 3:
            return tuple((0, vh, c, vh, c, 0) for c in tb.kids_of_size(w, s))
        return tuple((0, c, wh, c, wh, 0) for c in tb.kids_of_size(v, s))

    def in_degree(self, vx):
        t, v, w, vh, wh, k = vx
        tb, tree = self.tb, self.tree
        if t != 0:
            return 1
        x, y = v, w
        if tree.parent[x] is None or tree.parent[y] is None:
            return 0
        pv, pw = tree.parent[x], tree.parent[y]
        if tb.easy(pv, pw):
            return 0
        s = tree.size[x]
        if tree.size[y] != s:
            return 0
        cap = tb.count_by_size.get((pv, s), 0)
        deg = cap
        if cap >= 2:
            deg += 2 * cap * cap
        return deg

    def label_contains(self, vx, m):
        t, v, w, vh, wh, k = vx
        tb, tree = self.tb, self.tree
        if t == 0:
            if (vh, wh, k) != (v, w, 0) or tb.easy(v, w):
                return False
            return m == len(tree.children[v])
        if tb.easy(v, w):
            return False
        if t == 1:
            return 1 <= m <= tree.n
        s = tree.size[vh]
        cap = tb.count_by_size.get((v, s), 0)
        if t == 2:
            return m == (1 if cap == 1 else 3)
        return m == k


class _OrderGadget(LabelledGraph):
    """Decision graph for the canonical subtree order.

    A type-0 vertex (0,v,w,v,w,0) asserts v comes strictly before w.
    Profile comparison settles unequal profiles; for equal profiles the
    gadget finds a good child of v, matches it against a child of w and
    verifies the three counting conditions through types 2-4.
    """

    def __init__(self, tables: _TreeTables):
        super().__init__()
        self.tb = tables
        self.tree = tables.tree

    def _valid_inner(self, v, w, vh, wh, k):
        tb, tree = self.tb, self.tree
        if tb.profile[v] != tb.profile[w]:
            return False
        if tree.parent[vh] != v or tree.parent[wh] != w:
            return False
        if not tb.good(v, w, vh):
            return False
        s = tree.size[vh]
        if tree.size[wh] != s:
            return False
        return 1 <= k <= tb.count_by_size.get((v, s), 0)

    def out_neighbours(self, vx):
        t, v, w, vh, wh, k = vx
        tb, tree = self.tb, self.tree
        if t == 0:
            if (vh, wh, k) != (v, w, 0):
                return ()
            if tb.profile[v] != tb.profile[w]:
                return ()
            out = []
            for c in tree.children[v]:
                if not tb.good(v, w, c):
                    continue
                s = tree.size[c]
                cap = tb.count_by_size.get((v, s), 0)
                for d in tb.kids_of_size(w, s):
                    for kk in range(1, cap + 1):
                        out.append((1, v, w, c, d, kk))
            return tuple(sorted(out))
        if not self._valid_inner(v, w, vh, wh, k):
            return ()
        s = tree.size[vh]
        cap = tb.count_by_size.get((v, s), 0)
        if t == 1:
            first = (0, vh, wh, vh, wh, 0)
            if cap == 1:
                return (first,)
            return (
                first,
                (2, v, w, vh, wh, k),
                (3, v, w, vh, wh, k),
                (4, v, w, vh, wh, k),
            )
        if cap < 2:
            return ()
        if t == 2:
            return tuple((0, d, vh, d, vh, 0) for d in tb.kids_of_size(w, s))
        if t == 3:
            return tuple(
                (0, c, wh, c, wh, 0)
                for c in tb.kids_of_size(v, s)
                if not tree_isomorphic(tree, c, vh)
            )
        return tuple(
            (0, d, vh, d, vh, 0)
            for d in tb.kids_of_size(w, s)
            if tb.theta(v, d) == tb.theta(w, d)
        )

    def in_degree(self, vx):
        t, v, w, vh, wh, k = vx
        tb, tree = self.tb, self.tree
        if t != 0:
            return 1
        x, y = v, w
        if tree.parent[x] is None or tree.parent[y] is None:
            return 0
        deg = 0
        s = tree.size[x]
        if tree.size[y] == s:
            # target of a type-1 edge: (x, y) = (vhat, what)
            pv, pw = tree.parent[x], tree.parent[y]
            if tb.profile[pv] == tb.profile[pw] and tb.good(pv, pw, x):
                deg += tb.count_by_size.get((pv, s), 0)
            # targets of types 2 and 4: (x, y) = (wring/wprime, vhat)
            pv, pw = tree.parent[y], tree.parent[x]
            if tb.profile[pv] == tb.profile[pw] and tb.good(pv, pw, y):
                cap = tb.count_by_size.get((pv, s), 0)
                if cap >= 2:
                    deg += cap * cap
                    if tb.theta(pv, x) == tb.theta(pw, x):
                        deg += cap * cap
            # target of type 3: (x, y) = (vring, what)
            pv, pw = tree.parent[x], tree.parent[y]
            if tb.profile[pv] == tb.profile[pw]:
                cap = tb.count_by_size.get((pv, s), 0)
                if cap >= 2:
                    goods = sum(
                        1
                        for c in tb.kids_of_size(pv, s)
                        if tb.good(pv, pw, c) and not tree_isomorphic(tree, c, x)
                    )
                    deg += cap * goods
        return deg

    def label_contains(self, vx, m):
        t, v, w, vh, wh, k = vx
        tb, tree = self.tb, self.tree
        if t == 0:
            if (vh, wh, k) != (v, w, 0):
                return False
            pv, pw = tb.profile[v], tb.profile[w]
            if pv < pw:
                return m == 0
            if pv > pw:
                return False
            return 1 <= m <= tree.n
        if not self._valid_inner(v, w, vh, wh, k):
            return False
        if t == 1:
            cap = tb.count_by_size.get((v, tree.size[vh]), 0)
            return m == (1 if cap == 1 else 4)
        return m == k


def build_iso_gadget(tree: DirectedTree) -> LabelledGraph:
    """The subtree-isomorphism recursion graph; query its type-0 vertex
    (0, v, w, v, w, 0).  Trees with fewer than four vertices go through
    the canonical-string oracle instead."""
    if tree.n < 4:
        raise DomainError("tree too small for the gadget; use the oracle path")
    return tree.tables().iso_gadget()


def build_order_gadget(tree: DirectedTree) -> LabelledGraph:
    """The subtree-order recursion graph, same vertex layout."""
    if tree.n < 4:
        raise DomainError("tree too small for the gadget; use the oracle path")
    return tree.tables().order_gadget()


def _gadget_resource(tree: DirectedTree) -> int:
    return (tree.n + 1) ** 5 - 1


def tree_isomorphic(tree: DirectedTree, v: int, w: int) -> bool:
    """Whether the subtrees rooted at v and w are isomorphic, decided by
    the recursion-graph query for trees with >= 4 vertices and by the
    canonical-string oracle below it."""
    tb = tree.tables()
    key = (v, w)
    cached = tb.iso_cache.get(key)
    if cached is None:
        if v == w:
            cached = True
        elif tree.n < 4:
            cached = subtree_string(tree, v) == subtree_string(tree, w)
        else:
            cached = x_membership(tb.iso_gadget(), (0, v, w, v, w, 0), _gadget_resource(tree))
        tb.iso_cache[key] = cached
        tb.iso_cache[(w, v)] = cached
    return cached


def tree_order_less(tree: DirectedTree, v: int, w: int) -> bool:
    """Strict canonical order on subtrees (profile first, then the
    recursive child comparison), decided through the order gadget."""
    tb = tree.tables()
    key = (v, w)
    cached = tb.order_cache.get(key)
    if cached is None:
        if v == w:
            cached = False
        elif tree.n < 4:
            cached = profile_order_direct(tree, v, w) < 0
        else:
            cached = x_membership(tb.order_gadget(), (0, v, w, v, w, 0), _gadget_resource(tree))
        tb.order_cache[key] = cached
    return cached


# ---------------------------------------------------------------------------
# Direct comparators and oracles


def subtree_string(tree: DirectedTree, v: int) -> str:
    """Canonical parenthesis string: equal strings iff isomorphic subtrees."""
    parts = sorted(subtree_string(tree, c) for c in tree.children[v])
    return "(" + "".join(parts) + ")"


def tree_canon_oracle(tree: DirectedTree) -> str:
    return subtree_string(tree, tree.root)


def coloured_compare(tree: DirectedTree, colours, a: int, b: int, _memo=None) -> int:
    """Total preorder on coloured subtrees: root colours first
    (lexicographically), then profiles, then recursively compared child
    lists.  Returns -1/0/1; 0 exactly on coloured-isomorphic subtrees.
    With empty colours this is the plain canonical subtree order."""
    if _memo is None:
        _memo = {}
    key = (a, b)
    if key in _memo:
        return _memo[key]
    if a == b:
        return 0
    ca = colours.get(a, ())
    cb = colours.get(b, ())
    if ca != cb:
        result = -1 if ca < cb else 1
    else:
        tb = tree.tables()
        pa, pb = tb.profile[a], tb.profile[b]
        if pa != pb:
            result = -1 if pa < pb else 1
        else:
            import functools

            cmp = functools.cmp_to_key(
                lambda x, y: coloured_compare(tree, colours, x, y, _memo)
            )
            kids_a = sorted(tree.children[a], key=cmp)
            kids_b = sorted(tree.children[b], key=cmp)
            result = 0
            for x, y in zip(kids_a, kids_b):
                c = coloured_compare(tree, colours, x, y, _memo)
                if c != 0:
                    result = c
                    break
    _memo[key] = result
    _memo[(b, a)] = -result
    return result


def profile_order_direct(tree: DirectedTree, v: int, w: int) -> int:
    """Oracle for the plain subtree order: -1/0/1 with 0 iff isomorphic."""
    return coloured_compare(tree, {}, v, w)


# ---------------------------------------------------------------------------
# Canonisation


class _CanonGraph(LabelledGraph):
    """Recursion graph computing preorder-numbered canonical copies.

    Vertices (v, a, b) assert that (a, b) is an edge of the canonical
    copy of the subtree at v.  For each class of isomorphic children the
    copies occupy consecutive blocks after all strictly smaller classes;
    a block tuple delegates to the corresponding child tuple, with one
    parallel edge per isomorphic sibling, and the label demands that all
    of them accept.
    """

    def __init__(self, tables: _TreeTables):
        super().__init__()
        self.tb = tables
        self.tree = tables.tree
        self._layout = {}

    def layout(self, v):
        """Per vertex: list of (members, e, size, positions p_{c,i})."""
        cached = self._layout.get(v)
        if cached is None:
            tree = self.tree
            classes = []
            for c in sorted(tree.children[v]):
                for cls in classes:
                    if tree.size[cls[0][0]] == tree.size[c] and tree_isomorphic(
                        tree, cls[0][0], c
                    ):
                        cls[0].append(c)
                        break
                else:
                    classes.append(([c], None))
            out = []
            for members, _ in classes:
                rep = members[0]
                below = [
                    c
                    for c in tree.children[v]
                    if tree_order_less(tree, c, rep)
                ]
                base = 2 + sum(tree.size[c] for c in below)
                e = len(members)
                size = tree.size[rep]
                positions = [base + i * size for i in range(e)]
                out.append((members, e, size, positions))
            cached = out
            self._layout[v] = cached
        return cached

    def out_neighbours(self, vx):
        v, a, b = vx
        tree = self.tree
        if not tree.children[v]:
            return ()
        out = []
        top = tree.n
        for members, e, size, positions in self.layout(v):
            for p in positions:
                m, nn = a - p + 1, b - p + 1
                if 0 <= m <= top and 0 <= nn <= top:
                    for child in members:
                        out.append((child, m, nn))
        return tuple(sorted(out))

    def in_degree(self, vx):
        v, a, b = vx
        tree = self.tree
        parent = tree.parent[v]
        if parent is None:
            return 0
        top = tree.n
        for members, e, size, positions in self.layout(parent):
            if v in members:
                # one edge per copy whose source tuple stays inside the
                # number sort; copies shifted past n generate no edge
                return sum(
                    1 for p in positions if p - 1 + a <= top and p - 1 + b <= top
                )
        return 0

    def label_contains(self, vx, m):
        v, a, b = vx
        tree = self.tree
        if not tree.children[v]:
            return False
        for members, e, size, positions in self.layout(v):
            if a == 1 and b in positions and m == 0:
                return True
            for p in positions:
                if p <= a <= p + size - 1 and p <= b <= p + size - 1 and m == e:
                    return True
        return False


def tree_canon(tree: DirectedTree) -> tuple[tuple[int, int], ...]:
    """Canonical copy of the tree: directed edges over [1, n], the root
    numbered 1 and every subtree numbered by preorder position.  Isomorphic
    trees yield identical edge tuples."""
    n = tree.n
    if n == 1:
        return ()
    graph = tree.tables().canon_graph()
    edges = []
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            if x_membership(graph, (tree.root, a, b), n):
                edges.append((a, b))
    assert len(edges) == n - 1, "canonical copy must be a tree"
    return tuple(sorted(edges))


def canon_edges_to_tree(edges, n: int) -> DirectedTree:
    parents = [None] * n
    for a, b in edges:
        parents[b - 1] = a - 1
    return DirectedTree(parents)


# ---------------------------------------------------------------------------
# Circuit evaluation

CIRCUIT_FORMULA_TEXT = (
    "exists #r1 exists #r2 ([lrec x, y, #p : E(x, y) ; "
    "(Pand(x) and count(y ; E(x, y)) = #p) or (Por(x) and not #p = 0) "
    "or (Pnot(x) and #p = 0) or P1(x)](z, (#r1, #r2)) "
    "and forall #r (#r <= #r1 and #r <= #r2))"
)

_GATE_RELS = ("Pand", "Por", "Pnot", "P0", "P1")


def _circuit_shape(structure: Structure):
    n = structure.universe_size
    out = {v: [] for v in range(n)}
    indeg = {v: 0 for v in range(n)}
    for a, b in structure.rel("E"):
        out[a].append(b)
        indeg[b] += 1
    kinds = {}
    for relname in _GATE_RELS:
        if relname not in structure.vocab:
            raise DomainError(f"circuit structure lacks relation {relname}")
        for (v,) in structure.rel(relname):
            if v in kinds:
                raise DomainError(f"gate {v} has two types")
            kinds[v] = relname
    for v in range(n):
        if v not in kinds:
            raise DomainError(f"gate {v} has no type")
        if kinds[v] in ("P0", "P1") and out[v]:
            raise DomainError(f"constant gate {v} has children")
        if kinds[v] == "Pnot" and len(out[v]) != 1:
            raise DomainError(f"negation gate {v} needs exactly one child")
    roots = [v for v in range(n) if indeg[v] == 0]
    if len(roots) != 1:
        raise DomainError(f"circuit must have exactly one output gate, found {len(roots)}")
    return out, indeg, kinds, roots[0]


def check_path_property(structure: Structure):
    """Verify the in-degree product along every path is at most |C|.
    Returns the worst product; raises with a witness path otherwise."""
    out, indeg, _, root = _circuit_shape(structure)
    n = structure.universe_size
    state = {}
    best = {}

    def visit(v):
        if state.get(v) == 1:
            raise DomainError("circuit contains a cycle")
        if state.get(v) == 2:
            return best[v]
        state[v] = 1
        prod, path = 1, (v,)
        for w in out[v]:
            sub_prod, sub_path = visit(w)
            cand = indeg[w] * sub_prod
            if cand > prod:
                prod, path = cand, (v,) + sub_path
        state[v] = 2
        best[v] = (prod, path)
        return best[v]

    worst, path = 1, (root,)
    for v in range(n):
        prod, p = visit(v)
        if prod > worst:
            worst, path = prod, p
    if worst > n:
        raise RecognitionError(
            f"path property violated: product {worst} exceeds {n}",
            certificate=path,
        )
    return worst


def circuit_value(structure: Structure, engine: str = "memo") -> bool:
    """Evaluate the circuit's output gate through the recursion formula;
    rejects inputs without the size-bounded path property."""
    _, _, _, root = _circuit_shape(structure)
    check_path_property(structure)
    formula = parse_formula(CIRCUIT_FORMULA_TEXT)
    return evaluate(structure, {svar("z"): root}, formula, engine=engine)


def circuit_value_oracle(structure: Structure) -> bool:
    """Independent bottom-up evaluation."""
    out, _, kinds, root = _circuit_shape(structure)
    memo = {}

    def value(v):
        if v in memo:
            return memo[v]
        kind = kinds[v]
        if kind == "P0":
            result = False
        elif kind == "P1":
            result = True
        elif kind == "Pand":
            result = all(value(w) for w in out[v])
        elif kind == "Por":
            result = any(value(w) for w in out[v])
        else:
            result = not value(out[v][0])
        memo[v] = result
        return result

    return value(root)
