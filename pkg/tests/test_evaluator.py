import random
from pathlib import Path

import pytest

from limrec.errors import DomainError
from limrec.evaluator import (
    EvalContext, ExplicitGraph, Transduction, apply_transduction, evaluate,
    lrec_eq_membership, lrec_membership, lrec_membership_streaming, unravel,
    x_membership, x_membership_streaming,
)
from limrec.structures import GRAPH_VOCAB, Structure, generate_layered_graph
from limrec.syntax import (
    And, Atom, EqVar, Forall, LeqNum, Lrec, LrecEq, Not, Or, nvar,
    parse_formula, svar,
)

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="module")
def circuit():
    return Structure.parse((DATA / "circuit_small.struct").read_text())


@pytest.fixture(scope="module")
def circuit_formula():
    return parse_formula((DATA / "circuit_eval.formula").read_text())


def _lrec_node(formula):
    """Extract the single lrec node from the parsed circuit formula."""
    f = formula
    while not isinstance(f, Lrec):
        f = f.sub if hasattr(f, "sub") else f.left
    return f


def elem(circuit, name):
    return circuit.element_index(name)


def test_circuit_example_true(circuit, circuit_formula):
    alpha = {svar("z"): elem(circuit, "a")}
    assert evaluate(circuit, alpha, circuit_formula) is True
    assert evaluate(circuit, alpha, circuit_formula, engine="stream") is True
    assert evaluate(circuit, alpha, circuit_formula, engine="both") is True


def test_circuit_x_facts(circuit, circuit_formula):
    node = _lrec_node(circuit_formula)
    ctx = EvalContext(circuit)
    alpha = {svar("z"): elem(circuit, "a")}

    def member(name, ell):
        return lrec_membership(circuit, alpha, node, (elem(circuit, name),), ell, ctx=ctx)

    for name in "cehjk":
        assert member(name, 1)
    assert not member("f", 1)
    assert not member("i", 1)
    assert member("b", 2)
    for ell in range(1, 12):
        assert not member("g", ell)
    assert member("d", 3)
    assert member("a", 4)


def test_tautology_any_structure(circuit):
    f = parse_formula("forall x x = x")
    assert evaluate(circuit, {}, f)


def test_count_self_loops():
    g = Structure.parse("vocab E/2\nuniverse 3\nE 0 1\nE 1 2\n")
    f = parse_formula("count(x ; E(x, x)) = #p")
    assert evaluate(g, {nvar("p"): 0}, f)
    assert not evaluate(g, {nvar("p"): 1}, f)


def test_unbound_variable_rejected(circuit, circuit_formula):
    with pytest.raises(DomainError):
        evaluate(circuit, {}, circuit_formula)
    with pytest.raises(DomainError):
        evaluate(circuit, {svar("z"): 99}, circuit_formula)


def test_non_monotonicity_witness():
    # single-edge graph, label formula "p = 0": (a,1) in X but (a,2) not
    g = Structure.parse("vocab E/2\nuniverse 2\nE 0 1\n")
    node = Lrec(
        (svar("u"),), (svar("v"),), (nvar("p"),),
        Atom("E", (svar("u"), svar("v"))),
        Forall(nvar("q"), LeqNum(nvar("p"), nvar("q"))),
        (svar("u"),), (nvar("p"),),
    )
    assert lrec_membership(g, {}, node, (0,), 1)
    assert not lrec_membership(g, {}, node, (0,), 2)
    assert lrec_membership_streaming(g, {}, node, (0,), 1)
    assert not lrec_membership_streaming(g, {}, node, (0,), 2)


def _random_graph(rng, n):
    out = {}
    labels = {}
    for v in range(n):
        outs = tuple(sorted(w for w in range(n) if w != v and rng.random() < 0.4))
        out[(v,)] = tuple((w,) for w in outs)
        labels[(v,)] = {m for m in range(n + 2) if rng.random() < 0.3}
    return ExplicitGraph(out, labels)


def test_engines_agree_on_random_graphs():
    rng = random.Random(7)
    for _ in range(120):
        n = rng.randint(1, 6)
        g = _random_graph(rng, n)
        for v in range(n):
            for ell in range(0, 21):
                assert x_membership(g, (v,), ell) == x_membership_streaming(g, (v,), ell)


def test_unravelling_matches_claim():
    # every tree node's Y-verdict equals X-membership of its (vertex, resource)
    rng = random.Random(13)
    for _ in range(40):
        n = rng.randint(1, 5)
        g = _random_graph(rng, n)
        root = (rng.randrange(n),)
        ell = rng.randint(0, 15)
        tree = unravel(g, root, ell)
        for i in range(len(tree)):
            in_x = x_membership(g, tree.vertices[i], tree.resources[i])
            accepted = (
                not tree.fail(i)
                and g.label_contains(
                    tree.vertices[i],
                    sum(
                        1
                        for j in tree.children[i]
                        if x_membership(g, tree.vertices[j], tree.resources[j])
                    ),
                )
            )
            assert in_x == accepted


def test_leaf_with_zero_label_streaming():
    g = ExplicitGraph({(0,): ()}, {(0,): {0}})
    assert x_membership_streaming(g, (0,), 1)
    assert x_membership(g, (0,), 1)
    assert not x_membership(g, (0,), 0)


def test_engines_agree_on_random_formulas():
    # random formula shapes, including nested recursion operators, on
    # random small structures: the two engines always agree
    from hypothesis import given, settings
    from .test_syntax import _formulas
    from limrec.syntax import expand_dtc, free_variables
    import hypothesis.strategies as st

    @given(_formulas(), st.integers(1, 3), st.integers(0, 10 ** 6))
    @settings(max_examples=150, deadline=None)
    def check(formula, n, edge_bits):
        pairs = [(a, b) for a in range(n) for b in range(n)]
        edges = {pairs[i] for i in range(len(pairs)) if edge_bits >> i & 1}
        rels = {"E": edges, "P": {(v,) for v in range(n) if edge_bits >> (n * n + v) & 1}}
        vocab = Vocabulary((("E", 2), ("P", 1)))
        structure = Structure(vocab, n, rels)
        alpha = {v: 0 for v in free_variables(formula)}
        memo = evaluate(structure, alpha, formula, engine="memo")
        stream = evaluate(structure, alpha, formula, engine="stream")
        assert memo == stream
        assert evaluate(structure, alpha, formula, engine="both") == memo

    check()


from limrec.structures import Vocabulary


# --- dtc ------------------------------------------------------------------


def _det_path_oracle(n, edges, s, t):
    """Follow unique out-neighbours from s; report whether t is reached."""
    cur = s
    seen = set()
    while True:
        if cur == t:
            return True
        if cur in seen:
            return False
        seen.add(cur)
        outs = [b for (a, b) in edges if a == cur]
        if len(outs) != 1:
            return False
        cur = outs[0]


def test_dtc_figure_graph():
    # c -> v2 -> v1 -> d, e -> v1, x -> v1, x -> d  (deterministic path c..d)
    s = Structure.parse(
        "vocab E/2\nuniverse 6\nnames c v2 v1 d e x\n"
        "E c v2\nE v2 v1\nE v1 d\nE e v1\nE x v1\nE x d\n"
    )
    f = parse_formula("[dtc x, y : E(x, y)](s, t)")
    assert evaluate(s, {svar("s"): 0, svar("t"): 3}, f) is True
    assert evaluate(s, {svar("s"): 4, svar("t"): 0}, f) is False


def test_dtc_matches_oracle_exhaustive_small():
    f = parse_formula("[dtc x, y : E(x, y)](s, t)")
    for n in (2, 3):
        pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
        for bits in range(2 ** len(pairs)):
            edges = {pairs[i] for i in range(len(pairs)) if bits >> i & 1}
            g = Structure(GRAPH_VOCAB, n, {"E": edges})
            ctx = EvalContext(g)
            for s in range(n):
                for t in range(n):
                    got = evaluate(
                        g, {svar("s"): s, svar("t"): t}, f, ctx=ctx
                    )
                    assert got == _det_path_oracle(n, edges, s, t), (edges, s, t)


def test_dtc_matches_oracle_sampled_five_vertices():
    f = parse_formula("[dtc x, y : E(x, y)](s, t)")
    rng = random.Random(55)
    n = 5
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    for _ in range(400):
        edges = {p for p in pairs if rng.random() < 0.3}
        g = Structure(GRAPH_VOCAB, n, {"E": edges})
        ctx = EvalContext(g)
        for s in range(n):
            for t in range(n):
                got = evaluate(g, {svar("s"): s, svar("t"): t}, f, ctx=ctx)
                assert got == _det_path_oracle(n, edges, s, t), (edges, s, t)


# --- lrec= ----------------------------------------------------------------


def reach_formula():
    # undirected reachability: equivalence from E, empty edge graph,
    # label checks the target is in the class
    return LrecEq(
        (svar("x"),), (svar("y"),), (nvar("p"),),
        Atom("E", (svar("x"), svar("y"))),
        Not(EqVar(svar("x"), svar("x"))),
        EqVar(svar("x"), svar("t")),
        (svar("s"),), (nvar("r"),),
    )


def _components(n, edges):
    comp = list(range(n))
    for a, b in edges:
        ra, rb = comp[a], comp[b]
        if ra != rb:
            for i in range(n):
                if comp[i] == rb:
                    comp[i] = ra
    return comp


def test_lrec_eq_reachability_small():
    # two components: 0-1-2 and 3-4
    edges = {(0, 1), (1, 0), (1, 2), (2, 1), (3, 4), (4, 3)}
    g = Structure(GRAPH_VOCAB, 5, {"E": edges})
    f = reach_formula()
    ctx = EvalContext(g)
    for s in range(5):
        for t in range(5):
            alpha = {svar("s"): s, svar("t"): t, nvar("r"): 1}
            expected = (s < 3) == (t < 3)
            assert evaluate(g, alpha, f, ctx=ctx) == expected


def test_lrec_eq_membership_direct():
    edges = {(0, 1), (1, 0)}
    g = Structure(GRAPH_VOCAB, 3, {"E": edges})
    f = reach_formula()
    alpha = {svar("t"): 1}
    assert lrec_eq_membership(g, alpha, f, (0,), 1)
    assert not lrec_eq_membership(g, alpha, f, (2,), 1)
    # reflexivity: s = t in a singleton component
    alpha = {svar("t"): 2}
    assert lrec_eq_membership(g, alpha, f, (2,), 1)


def test_lrec_eq_random_graphs_match_search():
    rng = random.Random(99)
    f = reach_formula()
    for _ in range(30):
        n = rng.randint(2, 8)
        edges = set()
        for a in range(n):
            for b in range(a + 1, n):
                if rng.random() < 0.25:
                    edges.add((a, b))
                    edges.add((b, a))
        g = Structure(GRAPH_VOCAB, n, {"E": edges})
        comp = _components(n, {(a, b) for a, b in edges if a < b})
        ctx = EvalContext(g)
        for s in range(n):
            for t in range(n):
                alpha = {svar("s"): s, svar("t"): t, nvar("r"): 1}
                assert evaluate(g, alpha, f, ctx=ctx) == (comp[s] == comp[t])


# --- transductions ---------------------------------------------------------


def layer_transduction():
    x, y, z = svar("x"), svar("y"), svar("z")
    ex_z = Atom("E", (x, z))
    ey_z = Atom("E", (y, z))
    ez_x = Atom("E", (z, x))
    ez_y = Atom("E", (z, y))
    same_nbhd = Forall(
        z,
        And(
            And(Or(Not(ex_z), ey_z), Or(Not(ey_z), ex_z)),
            And(Or(Not(ez_x), ez_y), Or(Not(ez_y), ez_x)),
        ),
    )
    return Transduction(
        u=(x,), v=(y,),
        theta_v=EqVar(x, x),
        theta_approx=same_nbhd,
        relations=(("E", Atom("E", (x, y)), ((x,), (y,))),),
    )


def test_identity_transduction():
    g = Structure.parse("vocab E/2\nuniverse 3\nE 0 1\nE 1 2\n")
    x, y = svar("x"), svar("y")
    theta = Transduction(
        u=(x,), v=(y,),
        theta_v=EqVar(x, x),
        theta_approx=EqVar(x, y),
        relations=(("E", Atom("E", (x, y)), ((x,), (y,))),),
    )
    out = apply_transduction(theta, g)
    assert out.universe_size == 3
    assert out.rel("E") == g.rel("E")


def _is_two_disjoint_paths(structure, n):
    edges = structure.rel("E")
    if structure.universe_size != 2 * n or len(edges) != 2 * (n - 1):
        return False
    outs = {}
    ins = {}
    for a, b in edges:
        outs.setdefault(a, []).append(b)
        ins.setdefault(b, []).append(a)
    if any(len(v) != 1 for v in outs.values()) or any(len(v) != 1 for v in ins.values()):
        return False
    starts = [v for v in range(structure.universe_size) if v not in ins]
    if len(starts) != 2:
        return False
    for start in starts:
        length = 1
        cur = start
        while cur in outs:
            cur = outs[cur][0]
            length += 1
        if length != n:
            return False
    return True


def test_layer_transduction_on_g4():
    g = generate_layered_graph(4)
    out = apply_transduction(layer_transduction(), g)
    assert out.universe_size == 8
    assert len(out.rel("E")) == 6
    assert _is_two_disjoint_paths(out, 4)


def test_transduction_validates_tuples():
    from limrec.errors import FormulaError

    x, y = svar("x"), svar("y")
    with pytest.raises(FormulaError):
        Transduction(
            u=(x,), v=(y, y),
            theta_v=EqVar(x, x), theta_approx=EqVar(x, y),
            relations=(),
        )
    with pytest.raises(FormulaError):
        Transduction(
            u=(x,), v=(y,),
            theta_v=EqVar(x, x), theta_approx=EqVar(x, y),
            relations=(("E", Atom("E", (x, y)), ((x,), (nvar("p"), nvar("q")))),),
        )


def test_transduction_undefined():
    g = Structure.parse("vocab E/2\nuniverse 2\nE 0 1\n")
    x, y = svar("x"), svar("y")
    theta = Transduction(
        u=(x,), v=(y,),
        theta_v=Not(EqVar(x, x)),
        theta_approx=EqVar(x, y),
        relations=(("E", Atom("E", (x, y)), ((x,), (y,))),),
    )
    with pytest.raises(DomainError):
        apply_transduction(theta, g)
