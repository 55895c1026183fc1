import pytest

from downward.cfg import find_nonmember_word, parse_grammar
from downward.expr import Vocabulary, difference_degree, parse_expression, relation_names
from downward.graph import Structure, active_domain, evaluate, is_satisfied
from downward.modelfind import Bounds, check_finite_sat
from downward.reduce import (
    INFINITY, GadgetNode, grammar_to_expression, model_from_one, model_from_two,
    model_to_one, model_to_two, one_name_gadgets, reduce_full, reduce_to_one,
    reduce_to_two, two_name_gadget, witness_structure,
)

from gen import random_expr, random_grammar, random_structure, seeded

P = parse_expression


def nonuniversal_grammars(seed, count, max_len=4):
    rng = seeded(seed)
    found = []
    while len(found) < count:
        g = random_grammar(rng)
        w = find_nonmember_word(g, max_len)
        if w is not None:
            found.append((g, w))
    return found


# -- grammar -> expression ---------------------------------------------------

def test_expression_for_single_production():
    out = grammar_to_expression(parse_grammar("S -> b"))
    parts = out.parts
    assert parts[3] == P("alpha.(b - S).alpha")
    assert parts[4] == P("(alpha - alpha.b).S.omega")
    assert parts[7] == P("alpha.((X.b) & b).alpha")
    assert parts[0] == P("alpha.b.omega")
    assert list(out.vocabulary) == ["b", "S", "alpha", "omega", "X"]
    assert out.expression.left == parts[0]


def test_expression_uses_each_production_verbatim():
    g = parse_grammar("S -> A b S | a\nA -> a")
    phi3 = grammar_to_expression(g).parts[3]
    assert phi3 == P("alpha.(A.b.S - S).alpha | alpha.(a - S).alpha | alpha.(a - A).alpha")


def test_expression_degree_two_random():
    rng = seeded(41)
    for _ in range(50):
        out = grammar_to_expression(random_grammar(rng))
        assert difference_degree(out.expression) == 2
        assert relation_names(out.expression) <= set(out.vocabulary)


def test_fresh_role_names_on_collision():
    g = parse_grammar("S -> alpha X | omega")
    out = grammar_to_expression(g)
    assert out.name_map == {"alpha": "alpha'", "omega": "omega'", "X": "X'"}
    # three terminals, S, and the three primed role names
    assert len(out.vocabulary) == 7


def test_witness_structure_example():
    g = parse_grammar("@terminals d\nS -> b")
    I = witness_structure(g, ["d"])
    assert I["alpha"] == {(0, 1), (1, INFINITY), (2, INFINITY)}
    assert I["omega"] == {(2, INFINITY)}
    assert I["d"] == {(1, 2)} and I["b"] == set()
    assert I["X"] == {(1, 2)} and I["S"] == set()
    assert len(active_domain(I)) == 1 + 3
    out = grammar_to_expression(g)
    assert (0, INFINITY) in evaluate(out.parts[0], I)
    for k in range(1, 8):
        assert (0, INFINITY) not in evaluate(out.parts[k], I), k
    assert is_satisfied(out.expression, I) == (0, INFINITY)


def test_witness_structure_rejects_members_and_bad_words():
    g = parse_grammar("@terminals d\nS -> b")
    for word in (["b"], [], ["z"]):
        with pytest.raises(ValueError):
            witness_structure(g, word)


def test_witness_structure_random_nonuniversal():
    for g, w in nonuniversal_grammars(42, 30):
        I = witness_structure(g, w)
        out = grammar_to_expression(g)
        assert len(active_domain(I) | {0, INFINITY} | set(range(1, len(w) + 2))) == len(w) + 3
        assert (0, INFINITY) in evaluate(out.expression, I)
        for k in range(1, 8):
            assert (0, INFINITY) not in evaluate(out.parts[k], I)


# -- many names -> two ---------------------------------------------------------

def test_reduce_to_two_examples():
    out = reduce_to_two(P("a - a"), ["a"])
    assert out.expression == P("b.(c & c^2).b - b.(c & c^2).b")
    out = reduce_to_two(P("a2"), ["a1", "a2"])
    assert out.expression == P("b.(c & c^3).b")
    assert list(out.vocabulary) == ["b", "c"]


def test_reduce_to_two_freshens_names():
    out = reduce_to_two(P("b - c"), ["b", "c"])
    assert out.name_map == {"b": "b'", "c": "c'"}
    assert out.expression == P("b'.(c' & c'^2).b' - b'.(c' & c'^3).b'")


def test_reduce_to_two_checks_vocabulary():
    with pytest.raises(ValueError):
        reduce_to_two(P("a - z"), ["a"])


def test_model_to_two_single_edge():
    K = Structure({"a": [("x", "y")]})
    J = model_to_two(K)
    u = [GadgetNode(("x", "y"), "a", k) for k in (1, 2, 3)]
    assert J["b"] == {("x", u[0]), (u[2], "y")}
    assert J["c"] == {(u[0], u[1]), (u[1], u[2]), (u[0], u[2])}


def test_model_to_two_empty():
    J = model_to_two(Structure({}, ["a", "a2"]))
    assert active_domain(J) == frozenset()


def test_two_names_extensional_and_round_trip():
    rng = seeded(43)
    names = ["a", "d", "e"]
    for _ in range(150):
        K = random_structure(rng, names, rng.randint(1, 4), rng.random() * 0.5)
        e = random_expr(rng, names, rng.randint(0, 5))
        out = reduce_to_two(e, names)
        J = model_to_two(K, names)
        assert evaluate(e, K) == evaluate(out.expression, J)
        assert model_from_two(J, names) == K
        assert active_domain(J) & active_domain(K) == active_domain(K)


def test_two_names_if_direction_on_arbitrary_structures():
    rng = seeded(44)
    names = ["a", "d"]
    for _ in range(150):
        J = random_structure(rng, ["b", "c"], rng.randint(1, 6), rng.random() * 0.6)
        e = random_expr(rng, names, rng.randint(0, 4))
        out = reduce_to_two(e, names)
        assert evaluate(out.expression, J) == evaluate(e, model_from_two(J, names))


def test_gadget_nodes_fresh_even_against_gadget_nodes():
    K = Structure({"a": [(1, 2)]})
    J = model_to_two(K)
    again = model_to_two(Structure({"a": J["b"].pairs}))
    old = active_domain(J)
    new = active_domain(again) - old
    assert all(isinstance(n, GadgetNode) and n.tag == 1 for n in new)
    assert active_domain(again) & old == active_domain(Structure({"a": J["b"].pairs}))


def test_degree_preserved_two_names():
    rng = seeded(45)
    for _ in range(200):
        e = random_expr(rng, ["a", "d"], rng.randint(0, 6))
        assert difference_degree(reduce_to_two(e, ["a", "d"]).expression) == difference_degree(e)


# -- two names -> one ------------------------------------------------------------

def test_reduce_to_one_examples():
    gb, gc = one_name_gadgets()
    assert gb == P("a.(a & a^2).a") and gc == P("a.(a & a^3).a")
    assert reduce_to_one(P("b")).expression == gb
    assert reduce_to_one(P("c - b")).expression == P("a.(a & a^3).a - a.(a & a^2).a")
    with pytest.raises(ValueError):
        reduce_to_one(P("b - z"))


def test_model_to_one_gadget_shapes():
    J = model_to_one(Structure({"b": [("x", "y")]}, ["b", "c"]))
    u = [GadgetNode(("x", "y"), "b", k) for k in (1, 2, 3)]
    assert J["a"] == {("x", u[0]), (u[0], u[1]), (u[1], u[2]), (u[2], "y"), (u[0], u[2])}
    J = model_to_one(Structure({"c": [("x", "y")]}, ["b", "c"]))
    u = [GadgetNode(("x", "y"), "c", k) for k in (1, 2, 3, 4)]
    assert len(J["a"]) == 6 and (u[0], u[3]) in J["a"]


def test_one_name_claims_and_round_trip():
    rng = seeded(46)
    gb, gc = one_name_gadgets()
    for _ in range(150):
        I = random_structure(rng, ["b", "c"], rng.randint(1, 5), rng.random() * 0.5)
        J = model_to_one(I)
        assert evaluate(gb, J) == I["b"] and evaluate(gc, J) == I["c"]
        assert model_from_one(J) == I
        e = random_expr(rng, ["b", "c"], rng.randint(0, 5))
        assert evaluate(e, I) == evaluate(reduce_to_one(e).expression, J)


def test_one_name_if_direction_on_arbitrary_structures():
    rng = seeded(47)
    for _ in range(150):
        J = random_structure(rng, ["a"], rng.randint(1, 6), rng.random() * 0.6)
        e = random_expr(rng, ["b", "c"], rng.randint(0, 4))
        assert evaluate(reduce_to_one(e).expression, J) == evaluate(e, model_from_one(J))


def test_three_cycle_decodes_to_whatever_evaluation_gives():
    J = Structure({"a": [(0, 1), (1, 2), (2, 0)]})
    I = model_from_one(J)
    gb, gc = one_name_gadgets()
    assert I["b"] == evaluate(gb, J) and I["c"] == evaluate(gc, J)


# -- both steps ------------------------------------------------------------------

def test_reduce_full_unsat_preserved():
    out = reduce_full(P("a - a"), ["a"])
    # the single output name only has to avoid the intermediate b and c
    assert list(out.vocabulary) == ["a"] and relation_names(out.expression) == {"a"}
    r = check_finite_sat(out.expression, Bounds(2), "cnf")
    assert (r.verdict, r.size) == ("UNSAT_UP_TO", 2)


def test_reduce_full_on_grammar_expression_is_one_name_degree_two():
    g = parse_grammar("S -> a S | b")
    e = grammar_to_expression(g)
    out = reduce_full(e.expression, e.vocabulary)
    assert len(out.vocabulary) == 1 and len(relation_names(out.expression)) == 1
    assert difference_degree(out.expression) == 2


def test_reduce_full_transports_witnesses():
    rng = seeded(48)
    names = ["a", "d"]
    for _ in range(80):
        K = random_structure(rng, names, rng.randint(1, 4), rng.random() * 0.5)
        e = random_expr(rng, names, rng.randint(0, 5))
        out = reduce_full(e, names)
        b, c, a = out.name_map["b"], out.name_map["c"], out.name_map["a"]
        J = model_to_one(model_to_two(K, names, b, c), b, c, a)
        assert evaluate(out.expression, J) == evaluate(e, K)
        assert (is_satisfied(out.expression, J) is None) == (is_satisfied(e, K) is None)


def test_reduce_full_degree_random():
    rng = seeded(49)
    for _ in range(200):
        names = ["a", "b", "c"][: rng.randint(1, 3)]
        e = random_expr(rng, names, rng.randint(0, 6))
        assert difference_degree(reduce_full(e, names).expression) == difference_degree(e)


def test_map_lines():
    out = reduce_to_two(P("a"), Vocabulary(["a"]))
    lines = out.map_lines()
    assert "# map: b -> b" in lines
    assert "# map: a := " + str(two_name_gadget(1)) in lines
