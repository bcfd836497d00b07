"""Independent checkers shared by the unit tests and the acceptance suite."""

import itertools

import networkx as nx

from grues.graph import Cpdag, CycleError, Dag, GraphError, UndirectedGraph, udg


def cpdag_violations(c: Cpdag, g: UndirectedGraph) -> list[str]:
    """Structural conditions of an essential graph, plus the neighborhood direction rule."""
    out = []
    if not c.skeleton().edges <= g.edges:
        out.append("skeleton is not a subgraph of the graph")
    adj = lambda a, b: g.has_edge(a, b)  # noqa: E731
    # chain graph: contracting undirected components leaves a DAG
    comp = {v: k for k, members in enumerate(c.chain_components()) for v in members}
    contracted = nx.DiGraph()
    contracted.add_nodes_from(set(comp.values()))
    for a, b in c.directed:
        if comp[a] == comp[b]:
            out.append(f"directed edge {(a, b)} inside a chain component")
        contracted.add_edge(comp[a], comp[b])
    if not nx.is_directed_acyclic_graph(contracted):
        out.append("partially directed cycle")
    # chordal components
    for members in c.chain_components():
        sub = nx.Graph()
        sub.add_nodes_from(members)
        sub.add_edges_from(e for e in c.undirected if e[0] in members)
        if not nx.is_chordal(sub):
            out.append(f"component {members} not chordal")
    und = lambda a, b: (min(a, b), max(a, b)) in c.undirected  # noqa: E731
    # no induced a -> b - c
    for a, b in c.directed:
        for x in c.undirected_neighbors(b):
            if x != a and not adj(a, x):
                out.append(f"induced {a}->{b}-{x}")
    # strong protection
    for a, b in c.directed:
        others = [x for x in range(g.n) if x not in (a, b)]
        protected = (
            any((x, a) in c.directed and not adj(x, b) for x in others)
            or any((x, b) in c.directed and not adj(x, a) for x in others)
            or any((a, x) in c.directed and (x, b) in c.directed for x in others)
            or any(
                und(a, x) and und(a, y) and (x, b) in c.directed and (y, b) in c.directed and not adj(x, y)
                for x, y in itertools.combinations(others, 2)
            )
        )
        if not protected:
            out.append(f"edge {(a, b)} not strongly protected")
    # direction follows strict inclusion of closed neighborhoods; incomparable edges are dropped
    for a, b in g.edges:
        na, nb = g.closed_neighborhood(a), g.closed_neighborhood(b)
        if na < nb:
            ok = (a, b) in c.directed
        elif nb < na:
            ok = (b, a) in c.directed
        elif na == nb:
            ok = und(a, b)
        else:
            ok = (a, b) not in c.skeleton().edges
        if not ok:
            out.append(f"edge {(a, b)} breaks the neighborhood rule")
    return out


def maximal_dags(g: UndirectedGraph) -> list[Dag]:
    """DAGs with dependence graph ``g`` and the most edges, by brute force.

    Adjacent vertices in a DAG are dependent, so candidates only use edges of
    ``g``; each edge is absent or takes one of two orientations.
    """
    edges = sorted(g.edges)
    best: list[Dag] = []
    size = -1
    for choice in itertools.product((0, 1, 2), repeat=len(edges)):
        count = sum(1 for c in choice if c)
        if count < size:
            continue
        oriented = [(a, b) if c == 1 else (b, a) for (a, b), c in zip(edges, choice) if c]
        try:
            dag = Dag.from_edges(g.n, oriented)
        except (CycleError, GraphError):
            continue
        if udg(dag) != g:
            continue
        if count > size:
            best, size = [], count
        best.append(dag)
    return best


def essential_graph_oracle(g: UndirectedGraph) -> Cpdag:
    """Edges oriented the same way in every maximal DAG stay directed."""
    dags = maximal_dags(g)
    directed, undirected = set(), set()
    for a, b in g.edges:
        ways = {((a, b) in d.edges, (b, a) in d.edges) for d in dags}
        if ways == {(True, False)}:
            directed.add((a, b))
        elif ways == {(False, True)}:
            directed.add((b, a))
        elif ways == {(False, False)}:
            continue
        elif (False, False) in ways:
            raise AssertionError("maximal DAGs disagree on the skeleton")
        else:
            undirected.add((a, b))
    return Cpdag(g.n, frozenset(directed), frozenset(undirected))


def nx_graph(g: UndirectedGraph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


def alpha_oracle(g: UndirectedGraph) -> int:
    return max(len(c) for c in nx.find_cliques(nx_graph(g.complement())))


def delta_oracle(g: UndirectedGraph) -> int:
    # smallest family of maximal cliques covering every edge and every vertex
    cliques = [frozenset(c) for c in nx.find_cliques(nx_graph(g))]
    for k in range(1, len(cliques) + 1):
        for family in itertools.combinations(cliques, k):
            if all(any({a, b} <= c for c in family) for a, b in g.edges) and set().union(*family) == set(range(g.n)):
                return k
    raise AssertionError
