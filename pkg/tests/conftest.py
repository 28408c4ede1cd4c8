"""Shared micro instances and independent oracles for the test suite."""

import itertools
from fractions import Fraction

import netcode as nc


def make(doc):
    return nc.validate_instance(doc)


def inst_doc(vertices, edges, sources, terminals, demand):
    return {
        "vertices": list(vertices),
        "edges": [{"a": a, "b": b, "cap": cap} for a, b, cap in edges],
        "sources": list(sources),
        "terminals": list(terminals),
        "demand": [list(r) for r in demand],
    }


# -------------------------------------------------------------- micro corpus

def single_edge():
    return make(inst_doc("ab", [("a", "b", "1")], ["a"], ["b"], [[1]]))


def single_edge_cap2():
    return make(inst_doc("ab", [("a", "b", "2")], ["a"], ["b"], [[1]]))


def two_way():
    return make(inst_doc("ab", [("a", "b", "1")], ["a", "b"], ["b", "a"], [[1, 0], [0, 1]]))


def pair_at_one_node():
    # two messages both originating at a, both wanted at b
    return make(inst_doc("ab", [("a", "b", "1")], ["a", "a"], ["b", "b"],
                         [[1, 0], [0, 1]]))


def star3():
    return make(inst_doc(
        ["s", "x", "y"], [("s", "x", "1"), ("s", "y", "1")],
        ["s"], ["x", "y"], [[1, 1]]))


def triangle():
    return make(inst_doc(
        "abc", [("a", "b", "1"), ("b", "c", "1"), ("a", "c", "1")],
        ["a"], ["b"], [[1]]))


def line3():
    return make(inst_doc(
        "abc", [("a", "b", "1"), ("b", "c", "1")], ["a"], ["c"], [[1]]))


def cycle4():
    return make(inst_doc(
        "abcd",
        [("a", "b", "1"), ("b", "c", "1"), ("c", "d", "1"), ("d", "a", "1")],
        ["a", "c"], ["c", "a"], [[1, 0], [0, 1]]))


def two_triangles():
    # disconnected; the probe pair (c, d) bridges them
    return make(inst_doc(
        "abcdfg",
        [("a", "b", "1"), ("b", "c", "1"), ("a", "c", "1"),
         ("d", "f", "1"), ("f", "g", "1"), ("d", "g", "1")],
        ["a", "d"], ["b", "g"], [[1, 0], [0, 1]]))


def corpus():
    """Instances swept by the cut-bound consistency checks."""
    out = [
        single_edge(), single_edge_cap2(), two_way(), pair_at_one_node(),
        star3(), triangle(), line3(), cycle4(), two_triangles(),
    ]
    out.append(nc.add_edge(cycle4(), "a", "c", Fraction(1)))
    out.append(nc.add_edge(line3(), "a", "c", Fraction(1, 2)))
    out.append(nc.add_edge(two_triangles(), "c", "d", Fraction(1)))
    return out


# ------------------------------------------------------------- simple codes

def unit_code(inst, route_nodes, rounds, n=1, outer_n=1, sizes=(2,)):
    routes = [nc.Route(0, 0, tuple(route_nodes), tuple(rounds))]
    return nc.make_routing_code(inst, routes, n, outer_n, list(sizes))


def identity_suite():
    """(instance, single-round code) pairs used by the identity checks."""
    out = []
    out.append((single_edge(), unit_code(single_edge(), "ab", (1,))))
    out.append((single_edge_cap2(), unit_code(single_edge_cap2(), "ab", (1,), sizes=(4,))))
    pair = pair_at_one_node()
    out.append((
        pair,
        nc.make_routing_code(
            pair,
            [nc.Route(0, 0, ("a", "b"), (1,)), nc.Route(1, 1, ("a", "b"), (1,))],
            2, 1, [2, 2],
        ),
    ))
    st = star3()
    out.append((
        st,
        nc.make_routing_code(
            st,
            [nc.Route(0, 0, ("s", "x"), (1,)), nc.Route(0, 1, ("s", "y"), (1,))],
            1, 1, [2],
        ),
    ))
    out.append((triangle(), unit_code(triangle(), "ab", (1,))))
    return out


def clamp_code(inst, sender, receiver, n, outer_n, send_round, size=4):
    """Unicast code that sends 0 in place of the top message value, so
    exactly 1/size of the messages decode wrong."""
    idx, is_a = inst.edge_between(sender, receiver)
    direction = nc.FWD if is_a else nc.BWD

    def encoder(state):
        w = state.message(0)
        return w if w < size - 1 else 0

    def decoder(state):
        return (state.recv(sender, send_round),)

    return nc.NetworkCode(
        inner_n=n,
        outer_n=outer_n,
        message_sizes=(size,),
        splits=nc.AlphabetSplit({(idx, send_round): (size, 1) if is_a else (1, size)}),
        encoders={(idx, send_round, direction): encoder},
        decoders={0: decoder},
    )


# ------------------------------------------------------------------- oracles

def brute_force_cut(inst, group_a, group_b):
    """Minimum crossing capacity over all bipartitions, by enumeration."""
    a_set, b_set = set(group_a), set(group_b)
    rest = [v for v in inst.vertices if v not in a_set and v not in b_set]
    best = None
    for picks in itertools.product((False, True), repeat=len(rest)):
        x = set(a_set)
        x.update(v for v, take in zip(rest, picks) if take)
        crossing = sum(
            (e.cap for e in inst.edges if (e.a in x) != (e.b in x)),
            Fraction(0),
        )
        if best is None or crossing < best:
            best = crossing
    return best


def all_simple_paths(inst, u, v):
    paths = []

    def walk(node, seen, acc):
        if node == v:
            paths.append(tuple(acc))
            return
        for y in inst.neighbors(node):
            if y not in seen:
                walk(y, seen | {y}, acc + [y])

    walk(u, {u}, [u])
    return paths


def widest_path_oracle(inst, u, v):
    """(best bottleneck, best path) by exhaustive path enumeration with the
    documented tie-break: bottleneck desc, hop count asc, lexicographic."""
    best = None
    for path in all_simple_paths(inst, u, v):
        bn = min(
            inst.edges[inst.edge_between(x, y)[0]].cap
            for x, y in zip(path, path[1:])
        )
        key = (-bn, len(path), path)
        if best is None or key < best[0]:
            best = (key, bn, path)
    return None if best is None else (best[1], best[2])
