"""Registry of graph properties, numeric parameters and graph polynomials,
each with an exact evaluator.  Coloring polynomials are evaluated at integer
arguments by brute-force enumeration (the oracle of record); symbolic
polynomials use exact integer/rational arithmetic.

Every NP-hard evaluator carries an explicit size guard and raises
SizeBoundError instead of approximating.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from .polynomial import Poly, falling_factorial
from .structures import SizeBoundError, Structure, automorphism_count, is_asymmetric

COLORING_WORK_BOUND = 4_000_000   # maximum k**units enumerated by brute force


class InvariantError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Connectivity basics
# ---------------------------------------------------------------------------

def components(g: Structure) -> List[List[int]]:
    adj = g.adjacency()
    seen = [False] * g.n
    out = []
    for s in range(g.n):
        if seen[s]:
            continue
        comp = [s]
        seen[s] = True
        stack = [s]
        while stack:
            v = stack.pop()
            for u in adj[v]:
                if not seen[u]:
                    seen[u] = True
                    comp.append(u)
                    stack.append(u)
        out.append(sorted(comp))
    return out


def is_connected(g: Structure) -> bool:
    return g.n <= 1 or len(components(g)) == 1


def component_count(g: Structure) -> int:
    return len(components(g))


def max_cc_count(g: Structure) -> int:
    """Number of connected components of maximum size."""
    comps = components(g)
    if not comps:
        return 0
    top = max(len(c) for c in comps)
    return sum(1 for c in comps if len(c) == top)


def is_acyclic(g: Structure) -> bool:
    """Forest test for undirected graphs."""
    return len(g.edges()) == g.n - component_count(g)


def is_tree(g: Structure) -> bool:
    return is_connected(g) and is_acyclic(g) and g.n >= 1


def is_bipartite(g: Structure) -> bool:
    adj = g.adjacency()
    color = [-1] * g.n
    for s in range(g.n):
        if color[s] >= 0:
            continue
        color[s] = 0
        queue = [s]
        while queue:
            v = queue.pop()
            for u in adj[v]:
                if color[u] < 0:
                    color[u] = 1 - color[v]
                    queue.append(u)
                elif color[u] == color[v]:
                    return False
    return True


def has_odd_cycle(g: Structure) -> bool:
    return not is_bipartite(g)


def simple_cycles(g: Structure, bound: int = 1_000_000) -> List[List[int]]:
    """All simple cycles (length >= 3) of an undirected graph, each listed once
    starting from its smallest vertex."""
    adj = g.adjacency()
    out: List[List[int]] = []
    path: List[int] = []

    def extend(start: int, v: int, visited: Set[int]):
        if len(out) > bound:
            raise SizeBoundError("cycle enumeration bound exceeded")
        for u in sorted(adj[v]):
            if u == start and len(path) >= 3:
                if path[1] < path[-1]:  # canonical direction
                    out.append(list(path))
            elif u > start and u not in visited:
                path.append(u)
                visited.add(u)
                extend(start, u, visited)
                visited.remove(u)
                path.pop()

    for s in range(g.n):
        path = [s]
        extend(s, s, {s})
    return out


def cycle_count(g: Structure, bound: int = 1_000_000) -> int:
    return len(simple_cycles(g, bound=bound))


def has_even_cycle(g: Structure) -> bool:
    return any(len(c) % 2 == 0 for c in simple_cycles(g))


def girth(g: Structure) -> int:
    """Length of a shortest cycle; 0 for forests."""
    best = 0
    adj = g.adjacency()
    for (u, v) in g.edges():
        # shortest u-v path avoiding the edge itself
        dist = {u: 0}
        queue = [u]
        while queue:
            nxt = []
            for w in queue:
                for x in adj[w]:
                    if (w, x) in ((u, v), (v, u)):
                        continue
                    if x not in dist:
                        dist[x] = dist[w] + 1
                        nxt.append(x)
            queue = nxt
        if v in dist:
            cyc = dist[v] + 1
            if best == 0 or cyc < best:
                best = cyc
    return best


# ---------------------------------------------------------------------------
# Blocks, bridges, connectivity
# ---------------------------------------------------------------------------

def biconnected_components(g: Structure) -> List[List[Tuple[int, int]]]:
    """Edge sets of the biconnected components (standard DFS low-link)."""
    adj = g.adjacency()
    index = [0] * g.n
    low = [0] * g.n
    visited = [False] * g.n
    counter = itertools.count(1)
    stack: List[Tuple[int, int]] = []
    out: List[List[Tuple[int, int]]] = []

    def dfs(root: int):
        work = [(root, -1, iter(sorted(adj[root])))]
        visited[root] = True
        index[root] = low[root] = next(counter)
        while work:
            v, parent, it = work[-1]
            advanced = False
            for u in it:
                if u == parent:
                    parent = -2  # allow one back-edge to parent only for multi-edges (none here)
                    continue
                edge = (min(v, u), max(v, u))
                if not visited[u]:
                    stack.append(edge)
                    visited[u] = True
                    index[u] = low[u] = next(counter)
                    work.append((u, v, iter(sorted(adj[u]))))
                    advanced = True
                    break
                elif index[u] < index[v]:
                    stack.append(edge)
                    low[v] = min(low[v], index[u])
            if advanced:
                continue
            work.pop()
            if work:
                pv = work[-1][0]
                low[pv] = min(low[pv], low[v])
                if low[v] >= index[pv]:
                    comp = []
                    edge = (min(pv, v), max(pv, v))
                    while stack:
                        e = stack.pop()
                        comp.append(e)
                        if e == edge:
                            break
                    if comp:
                        out.append(comp)
    for s in range(g.n):
        if not visited[s]:
            dfs(s)
    return out


def block_count(g: Structure) -> int:
    """Number of blocks: biconnected components plus isolated vertices."""
    iso = sum(1 for a in g.adjacency() if not a)
    return len(biconnected_components(g)) + iso


def nontrivial_block_count(g: Structure) -> int:
    """Biconnected components with at least two edges (bridge blocks excluded)."""
    return sum(1 for comp in biconnected_components(g) if len(comp) >= 2)


def bridges(g: Structure) -> List[Tuple[int, int]]:
    return [comp[0] for comp in biconnected_components(g) if len(comp) == 1
            ]


def _bridge_list(g: Structure) -> List[Tuple[int, int]]:
    out = []
    for comp in biconnected_components(g):
        if len(comp) == 1:
            out.append(comp[0])
    return out


def is_bridgeless(g: Structure) -> bool:
    """No bridge edge (connectivity itself is not required here)."""
    return not _bridge_list(g)


def articulation_vertices(g: Structure) -> List[int]:
    comps = biconnected_components(g)
    membership: Dict[int, int] = {}
    arts = set()
    for i, comp in enumerate(comps):
        verts = {v for e in comp for v in e}
        for v in verts:
            if v in membership and membership[v] != i:
                arts.add(v)
            membership.setdefault(v, i)
    return sorted(arts)


def is_two_connected(g: Structure) -> bool:
    if g.n < 3 or not is_connected(g):
        return False
    return not articulation_vertices(g)


def vertex_connectivity(g: Structure, bound: int = 24) -> int:
    """Exact vertex connectivity via minimum vertex cuts (unit-capacity max-flow)."""
    if g.n > bound:
        raise SizeBoundError(f"connectivity bound exceeded: {g.n} > {bound}")
    if g.n <= 1:
        return 0
    if not is_connected(g):
        return 0
    adj = g.adjacency()
    if all(len(adj[v]) == g.n - 1 for v in range(g.n)):
        return g.n - 1
    best = g.n - 1
    for s in range(g.n):
        for t in range(g.n):
            if s == t or t in adj[s]:
                continue
            best = min(best, _min_vertex_cut(g, s, t))
    return best


def _min_vertex_cut(g: Structure, s: int, t: int) -> int:
    """Max-flow on the vertex-split digraph; unit capacities."""
    n = g.n
    # nodes: 2*v (in), 2*v+1 (out)
    cap: Dict[Tuple[int, int], int] = {}
    for v in range(n):
        cap[(2 * v, 2 * v + 1)] = 1 if v not in (s, t) else n
    for (u, v) in g.edges():
        cap[(2 * u + 1, 2 * v)] = n
        cap[(2 * v + 1, 2 * u)] = n
    source, sink = 2 * s + 1, 2 * t
    flow = 0
    while True:
        # BFS for augmenting path
        parent = {source: None}
        queue = [source]
        while queue and sink not in parent:
            x = queue.pop(0)
            for (a, b), c in cap.items():
                if a == x and c > 0 and b not in parent:
                    parent[b] = (a, b)
                    queue.append(b)
        if sink not in parent:
            return flow
        path = []
        node = sink
        while parent[node] is not None:
            path.append(parent[node])
            node = parent[node][0]
        for e in path:
            cap[e] -= 1
            cap[(e[1], e[0])] = cap.get((e[1], e[0]), 0) + 1
        flow += 1


def is_l_connected(g: Structure, l: int, bound: int = 24) -> bool:
    if g.n <= l:
        return False
    return vertex_connectivity(g, bound=bound) >= l


# ---------------------------------------------------------------------------
# Structured properties
# ---------------------------------------------------------------------------

def is_chordal(g: Structure) -> bool:
    """Maximum-cardinality search followed by perfect-elimination verification."""
    adj = g.adjacency()
    weight = [0] * g.n
    order: List[int] = []
    placed = [False] * g.n
    for _ in range(g.n):
        v = max((x for x in range(g.n) if not placed[x]), key=lambda x: (weight[x], -x))
        placed[v] = True
        order.append(v)
        for u in adj[v]:
            if not placed[u]:
                weight[u] += 1
    pos = {v: i for i, v in enumerate(order)}
    for v in order:
        later = [u for u in adj[v] if pos[u] > pos[v]]
        if not later:
            continue
        w = min(later, key=lambda u: pos[u])
        for u in later:
            if u != w and u not in adj[w]:
                return False
    return True


def is_block_graph(g: Structure) -> bool:
    adj = g.adjacency()
    for comp in biconnected_components(g):
        verts = sorted({v for e in comp for v in e})
        for a, b in itertools.combinations(verts, 2):
            if b not in adj[a]:
                return False
    return True


def _induced_cycles_odd(g: Structure, min_len: int = 5) -> bool:
    """Is there an induced (chordless) odd cycle of length >= min_len?"""
    adj = g.adjacency()

    def extend(start: int, path: List[int], in_path: Set[int]) -> bool:
        v = path[-1]
        for u in sorted(adj[v]):
            if u == start:
                if len(path) >= min_len and len(path) % 2 == 1 and path[1] < path[-1]:
                    # chordless already enforced during growth; closing edge ok
                    return True
                continue
            if u < start or u in in_path:
                continue
            # chordless: u may only touch path at v
            if any(w in adj[u] for w in path[:-1] if w != start) or (start in adj[u] and False):
                continue
            if start in adj[u] and len(path) + 1 < min_len:
                # closing too early would allow only short cycles; still may extend
                pass
            path.append(u)
            in_path.add(u)
            if extend(start, path, in_path):
                return True
            in_path.remove(u)
            path.pop()
        return False

    for s in range(g.n):
        if extend(s, [s], {s}):
            return True
    return False


def complement(g: Structure) -> Structure:
    from .structures import make_graph
    edges = [e for e in itertools.combinations(range(g.n), 2) if e not in set(g.edges())]
    return make_graph(g.n, edges)


def is_perfect(g: Structure, bound: int = 14) -> bool:
    """Strong-perfect-graph characterization checked by brute force."""
    if g.n > bound:
        raise SizeBoundError(f"perfection bound exceeded: {g.n} > {bound}")
    return not _induced_cycles_odd(g) and not _induced_cycles_odd(complement(g))


def is_parity_graph(g: Structure, bound: int = 12) -> bool:
    """All induced paths between each vertex pair have the same parity."""
    if g.n > bound:
        raise SizeBoundError(f"parity-graph bound exceeded: {g.n} > {bound}")
    adj = g.adjacency()

    parities: Dict[Tuple[int, int], Set[int]] = {}

    def extend(path: List[int], in_path: Set[int]):
        v = path[-1]
        if len(path) >= 2:
            key = (path[0], v) if path[0] < v else (v, path[0])
            parities.setdefault(key, set()).add((len(path) - 1) % 2)
        for u in sorted(adj[v]):
            if u in in_path:
                continue
            # induced path: u may be adjacent only to the last vertex
            if any(w in adj[u] for w in path[:-1]):
                continue
            path.append(u)
            in_path.add(u)
            extend(path, in_path)
            in_path.remove(u)
            path.pop()

    for s in range(g.n):
        extend([s], {s})
    return all(len(ps) == 1 for ps in parities.values())


def is_interval(g: Structure, bound: int = 10, clique_bound: int = 8) -> bool:
    """Interval recognition: search for a consecutive arrangement of maximal cliques."""
    if g.n > bound:
        raise SizeBoundError(f"interval bound exceeded: {g.n} > {bound}")
    cliques = maximal_cliques(g)
    if len(cliques) > clique_bound:
        raise SizeBoundError(f"too many maximal cliques for interval search: {len(cliques)}")
    for perm in itertools.permutations(range(len(cliques))):
        ok = True
        for v in range(g.n):
            hits = [i for i, ci in enumerate(perm) if v in cliques[ci]]
            if hits and hits != list(range(hits[0], hits[-1] + 1)):
                ok = False
                break
        if ok:
            return True
    return False


def maximal_cliques(g: Structure) -> List[Set[int]]:
    adj = g.adjacency()
    out: List[Set[int]] = []

    def bk(r: Set[int], p: Set[int], x: Set[int]):
        if not p and not x:
            out.append(set(r))
            return
        pivot = max(p | x, key=lambda v: len(adj[v] & p)) if (p | x) else None
        for v in sorted(p - (adj[pivot] if pivot is not None else set())):
            bk(r | {v}, p & adj[v], x & adj[v])
            p.remove(v)
            x.add(v)

    bk(set(), set(range(g.n)), set())
    return out


def clique_number(g: Structure, bound: int = 24) -> int:
    if g.n > bound:
        raise SizeBoundError(f"clique bound exceeded: {g.n} > {bound}")
    adj = g.adjacency()
    best = 0

    def grow(r_size: int, candidates: Set[int]):
        nonlocal best
        if r_size + len(candidates) <= best:
            return
        if not candidates:
            best = max(best, r_size)
            return
        for v in sorted(candidates):
            grow(r_size + 1, candidates & adj[v])
            candidates = candidates - {v}
            if r_size + len(candidates) <= best:
                return

    grow(0, set(range(g.n)))
    return best


def degeneracy(g: Structure) -> int:
    adj = [set(a) for a in g.adjacency()]
    alive = set(range(g.n))
    best = 0
    while alive:
        v = min(alive, key=lambda x: (len(adj[x] & alive), x))
        best = max(best, len(adj[v] & alive))
        alive.remove(v)
    return best


# ---------------------------------------------------------------------------
# Hamiltonicity, matchings, paths
# ---------------------------------------------------------------------------

def is_hamiltonian(g: Structure, bound: int = 18) -> bool:
    """Hamiltonian cycle decision by bitmask dynamic programming."""
    n = g.n
    if n > bound:
        raise SizeBoundError(f"hamiltonicity bound exceeded: {n} > {bound}")
    if n < 3:
        return False
    if not is_connected(g):
        return False
    masks = g.adjacency_masks()
    full = (1 << n) - 1
    # paths start at vertex 0; dp[mask] = bitset of reachable endpoints
    dp = [0] * (1 << n)
    dp[1] = 1
    for mask in range(1, full + 1):
        ends = dp[mask]
        if not ends or not (mask & 1):
            continue
        e = ends
        while e:
            v = (e & -e).bit_length() - 1
            e &= e - 1
            avail = masks[v] & ~mask
            while avail:
                u = (avail & -avail).bit_length() - 1
                avail &= avail - 1
                dp[mask | (1 << u)] |= 1 << u
    ends = dp[full]
    return bool(ends & masks[0])


def has_perfect_matching(g: Structure, bound: int = 18) -> bool:
    n = g.n
    if n > bound:
        raise SizeBoundError(f"matching bound exceeded: {n} > {bound}")
    if n % 2:
        return False
    masks = g.adjacency_masks()

    @lru_cache(maxsize=None)
    def solve(mask: int) -> bool:
        if mask == 0:
            return True
        v = (mask & -mask).bit_length() - 1
        avail = masks[v] & mask & ~(1 << v)
        while avail:
            u = (avail & -avail).bit_length() - 1
            avail &= avail - 1
            if solve(mask & ~(1 << v) & ~(1 << u)):
                return True
        return False

    result = solve((1 << n) - 1)
    solve.cache_clear()
    return result


def longest_path(g: Structure, bound: int = 18) -> int:
    """Number of edges of a longest simple path."""
    n = g.n
    if n > bound:
        raise SizeBoundError(f"longest-path bound exceeded: {n} > {bound}")
    if n == 0:
        return 0
    masks = g.adjacency_masks()
    best = 0
    dp: Dict[Tuple[int, int], bool] = {}
    stack = [(1 << v, v) for v in range(n)]
    seen = set(stack)
    while stack:
        mask, v = stack.pop()
        best = max(best, bin(mask).count("1") - 1)
        avail = masks[v] & ~mask
        while avail:
            u = (avail & -avail).bit_length() - 1
            avail &= avail - 1
            state = (mask | (1 << u), u)
            if state not in seen:
                seen.add(state)
                stack.append(state)
    return best


def circumference(g: Structure, bound: int = 18) -> int:
    """Length of a longest cycle; 0 for forests."""
    n = g.n
    if n > bound:
        raise SizeBoundError(f"circumference bound exceeded: {n} > {bound}")
    masks = g.adjacency_masks()
    best = 0
    for s in range(n):
        stack = [(1 << s, s)]
        seen = {(1 << s, s)}
        while stack:
            mask, v = stack.pop()
            length = bin(mask).count("1")
            if length >= 3 and masks[v] >> s & 1:
                best = max(best, length)
            avail = masks[v] & ~mask
            while avail:
                u = (avail & -avail).bit_length() - 1
                avail &= avail - 1
                if u < s:
                    continue
                state = (mask | (1 << u), u)
                if state not in seen:
                    seen.add(state)
                    stack.append(state)
    return best


def is_well_covered(g: Structure, bound: int = 14) -> bool:
    """Every maximal independent set has the same size."""
    n = g.n
    if n > bound:
        raise SizeBoundError(f"well-covered bound exceeded: {n} > {bound}")
    masks = g.adjacency_masks()
    sizes = set()
    for s in range(1 << n):
        ok = True
        for v in range(n):
            if s >> v & 1 and masks[v] & s:
                ok = False
                break
        if not ok:
            continue
        maximal = True
        for v in range(n):
            if not (s >> v & 1) and not (masks[v] & s):
                maximal = False
                break
        if maximal:
            sizes.add(bin(s).count("1"))
            if len(sizes) > 1:
                return False
    return True


def is_regular(g: Structure) -> bool:
    degs = set(g.degree_sequence())
    return len(degs) <= 1


def is_bidegree(g: Structure) -> bool:
    degs = set(g.degree_sequence())
    return len(degs) <= 2


def is_aperiodic_digraph(g: Structure) -> bool:
    """gcd of all directed cycle lengths equals 1 (False when no cycle exists)."""
    if g.is_symmetric() and g.rel("E"):
        raise InvariantError("aperiodicity is a digraph property")
    out_adj = g.out_adjacency()
    index = {}
    lowlink = {}
    on_stack = set()
    stack: List[int] = []
    counter = itertools.count()
    sccs: List[List[int]] = []

    def strongconnect(v0: int):
        work = [(v0, iter(sorted(out_adj[v0])))]
        index[v0] = lowlink[v0] = next(counter)
        stack.append(v0)
        on_stack.add(v0)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = lowlink[w] = next(counter)
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(sorted(out_adj[w]))))
                    advanced = True
                    break
                elif w in on_stack:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                pv = work[-1][0]
                lowlink[pv] = min(lowlink[pv], lowlink[v])
            if lowlink[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(comp)

    for v in range(g.n):
        if v not in index:
            strongconnect(v)

    overall = 0
    for comp in sccs:
        cset = set(comp)
        has_arc = any(u in cset for v in comp for u in out_adj[v])
        if len(comp) == 1 and not has_arc:
            continue
        root = comp[0]
        level = {root: 0}
        queue = [root]
        period = 0
        while queue:
            v = queue.pop(0)
            for u in out_adj[v]:
                if u not in cset:
                    continue
                if u not in level:
                    level[u] = level[v] + 1
                    queue.append(u)
                else:
                    period = gcd(period, level[v] + 1 - level[u])
        overall = gcd(overall, abs(period))
    return overall == 1


# ---------------------------------------------------------------------------
# Spanning trees and forests
# ---------------------------------------------------------------------------

def _int_determinant(rows: List[List[int]]) -> int:
    """Fraction-free Bareiss determinant of an integer matrix."""
    n = len(rows)
    if n == 0:
        return 1
    a = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def spanning_tree_count(g: Structure) -> int:
    """Matrix-tree theorem; 0 when disconnected, 1 for a single vertex."""
    if g.n == 0:
        return 0
    if g.n == 1:
        return 1
    if not is_connected(g):
        return 0
    deg = [0] * g.n
    adj_mult = [[0] * g.n for _ in range(g.n)]
    for (u, v) in g.edges():
        deg[u] += 1
        deg[v] += 1
        adj_mult[u][v] += 1
        adj_mult[v][u] += 1
    lap = [[(deg[i] if i == j else -adj_mult[i][j]) for j in range(g.n - 1)]
           for i in range(g.n - 1)]
    return _int_determinant(lap)


def spanning_forest_count(g: Structure) -> int:
    """Maximal spanning forests: product of spanning-tree counts per component."""
    from .structures import make_graph
    result = 1
    for comp in components(g):
        index = {v: i for i, v in enumerate(comp)}
        edges = [(index[u], index[v]) for (u, v) in g.edges() if u in index and v in index]
        result *= spanning_tree_count(make_graph(len(comp), edges))
    return result


def spanning_tree_maxdeg_le(g: Structure, d: int, node_budget: int = 2_000_000) -> bool:
    """Degree-constrained spanning tree decision with forced-edge reduction,
    capacity pruning and component-connectivity pruning."""
    n = g.n
    if n == 0:
        return False
    if n == 1:
        return True
    if not is_connected(g):
        return False
    budgets = [d] * n
    adj = [set(a) for a in g.adjacency()]
    chosen: Set[Tuple[int, int]] = set()

    # forced edges: a vertex of remaining degree 1 must use its single edge
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
        return True

    changed = True
    while changed:
        changed = False
        for v in range(n):
            live = [u for u in adj[v] if find(u) != find(v)]
            if len(adj[v]) == 1 and live:
                u = next(iter(adj[v]))
                if budgets[v] < 1 or budgets[u] < 1:
                    return False
                union(v, u)
                chosen.add((min(u, v), max(u, v)))
                budgets[v] -= 1
                budgets[u] -= 1
                adj[v].discard(u)
                adj[u].discard(v)
                changed = True

    edges = sorted({(min(u, v), max(u, v)) for v in range(n) for u in adj[v]})
    # edges within one component after forcing are optional; cross edges connect
    needed = len({find(v) for v in range(n)}) - 1
    if needed == 0:
        return True

    nodes = 0

    def capacity_ok(budg, avail_deg, need):
        cap = sum(min(budg[v], avail_deg[v]) for v in range(n))
        return cap >= 2 * need

    def search(idx: int, parent_state: List[int], budg: List[int], need: int,
               remaining: List[Tuple[int, int]]) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise SizeBoundError("spanning-tree search budget exceeded")
        if need == 0:
            return True
        if idx >= len(remaining):
            return False

        def find2(x):
            while parent_state[x] != x:
                parent_state[x] = parent_state[parent_state[x]]
                x = parent_state[x]
            return x

        avail_deg = [0] * n
        comp_out: Dict[int, int] = {}
        for (u, v) in remaining[idx:]:
            if budg[u] > 0 and budg[v] > 0 and find2(u) != find2(v):
                avail_deg[u] += 1
                avail_deg[v] += 1
                comp_out[find2(u)] = comp_out.get(find2(u), 0) + 1
                comp_out[find2(v)] = comp_out.get(find2(v), 0) + 1
        roots = {find2(v) for v in range(n)}
        if len(roots) - 1 != need:
            pass
        for r in roots:
            if len(roots) > 1 and comp_out.get(r, 0) == 0:
                return False
        if not capacity_ok(budg, avail_deg, need):
            return False

        (u, v) = remaining[idx]
        ru, rv = find2(u), find2(v)
        if ru != rv and budg[u] > 0 and budg[v] > 0:
            ps = list(parent_state)
            ps[ru] = rv
            bs = list(budg)
            bs[u] -= 1
            bs[v] -= 1
            if search(idx + 1, ps, bs, need - 1, remaining):
                return True
        return search(idx + 1, list(parent_state), list(budg), need, remaining)

    return search(0, parent[:], budgets, needed, edges)


# ---------------------------------------------------------------------------
# Planarity (incremental face embedding)
# ---------------------------------------------------------------------------

def is_planar(g: Structure) -> bool:
    for comp in biconnected_components(g):
        verts = sorted({v for e in comp for v in e})
        if len(comp) < 3:
            continue
        index = {v: i for i, v in enumerate(verts)}
        edges = [(index[u], index[v]) for (u, v) in comp]
        if not _planar_biconnected(len(verts), edges):
            return False
    return True


def _planar_biconnected(n: int, edges: List[Tuple[int, int]]) -> bool:
    m = len(edges)
    if n < 5 or m < 9:
        return True
    if m > 3 * n - 6:
        return False
    adj = [set() for _ in range(n)]
    eset = set()
    for (u, v) in edges:
        adj[u].add(v)
        adj[v].add(u)
        eset.add((min(u, v), max(u, v)))

    # initial cycle by walking
    cycle = _find_cycle(n, adj)
    embedded_v = set(cycle)
    embedded_e = {(min(cycle[i], cycle[(i + 1) % len(cycle)]),
                   max(cycle[i], cycle[(i + 1) % len(cycle)])) for i in range(len(cycle))}
    faces: List[List[int]] = [list(cycle), list(cycle)]

    while embedded_e != eset:
        fragments = _fragments(n, adj, eset, embedded_v, embedded_e)
        chosen = None
        chosen_faces = None
        for frag in fragments:
            admissible = [i for i, f in enumerate(faces) if frag["contacts"] <= set(f)]
            if not admissible:
                return False
            if chosen is None or len(admissible) < len(chosen_faces):
                chosen, chosen_faces = frag, admissible
                if len(admissible) == 1:
                    break
        path = _fragment_path(adj, chosen, embedded_v)
        face = faces.pop(chosen_faces[0])
        u, v = path[0], path[-1]
        iu, iv = face.index(u), face.index(v)
        if iu <= iv:
            arc_uv = face[iu:iv + 1]
            arc_vu = face[iv:] + face[:iu + 1]
        else:
            arc_uv = face[iu:] + face[:iv + 1]
            arc_vu = face[iv:iu + 1]
        interior = path[1:-1]
        faces.append(arc_uv + list(reversed(interior)))
        faces.append(arc_vu + list(interior))
        for w in interior:
            embedded_v.add(w)
        for i in range(len(path) - 1):
            embedded_e.add((min(path[i], path[i + 1]), max(path[i], path[i + 1])))
    return True


def _find_cycle(n: int, adj) -> List[int]:
    parent = [-1] * n
    state = [0] * n
    stack = [0]
    state[0] = 1
    order = [0]
    while stack:
        v = stack[-1]
        advanced = False
        for u in sorted(adj[v]):
            if state[u] == 0:
                parent[u] = v
                state[u] = 1
                stack.append(u)
                advanced = True
                break
            elif u != parent[v] and state[u] == 1:
                # back edge: cycle found
                cyc = [u]
                w = v
                while w != u:
                    cyc.append(w)
                    w = parent[w]
                return cyc
        if not advanced:
            state[v] = 2
            stack.pop()
    raise InvariantError("biconnected component without a cycle")


def _fragments(n, adj, eset, embedded_v, embedded_e):
    frags = []
    # single unembedded edges between embedded vertices
    for (u, v) in eset - embedded_e:
        if u in embedded_v and v in embedded_v:
            frags.append({"kind": "edge", "edge": (u, v), "contacts": {u, v}})
    # components of the non-embedded vertices
    seen = set()
    for s in range(n):
        if s in embedded_v or s in seen:
            continue
        comp = {s}
        queue = [s]
        seen.add(s)
        contacts = set()
        while queue:
            v = queue.pop()
            for u in adj[v]:
                if u in embedded_v:
                    contacts.add(u)
                elif u not in seen:
                    seen.add(u)
                    comp.add(u)
                    queue.append(u)
        frags.append({"kind": "comp", "verts": comp, "contacts": contacts})
    return frags


def _fragment_path(adj, frag, embedded_v) -> List[int]:
    if frag["kind"] == "edge":
        return list(frag["edge"])
    contacts = sorted(frag["contacts"])
    u = contacts[0]
    targets = set(contacts[1:])
    # BFS from u through fragment vertices to any other contact
    prev = {u: None}
    queue = [u]
    while queue:
        v = queue.pop(0)
        for w in sorted(adj[v]):
            if w in prev:
                continue
            if w in targets:
                prev[w] = v
                path = [w]
                while path[-1] is not None:
                    nxt = prev[path[-1]]
                    if nxt is None:
                        break
                    path.append(nxt)
                return list(reversed(path))
            if w in frag["verts"]:
                prev[w] = v
                queue.append(w)
    raise InvariantError("fragment with fewer than two contacts in a biconnected graph")


def contains_subdivision(g: Structure, pattern_edges: List[Tuple[int, int]], k: int) -> bool:
    """Brute-force test for a subdivision of the pattern graph on k branch vertices."""
    n = g.n
    adj = g.adjacency()

    def disjoint_paths(pairs, used, assignment):
        if not pairs:
            return True
        (a, b), rest = pairs[0], pairs[1:]
        start, goal = assignment[a], assignment[b]

        def dfs_path(v, path, visited):
            if v == goal:
                return [list(path)]
            outs = []
            for u in sorted(adj[v]):
                if u in visited or (u in used and u != goal):
                    continue
                if u in assignment.values() and u != goal:
                    continue
                path.append(u)
                visited.add(u)
                outs.extend(dfs_path(u, path, visited))
                visited.remove(u)
                path.pop()
                if outs:
                    return outs
            return outs

        for p in dfs_path(start, [start], {start}):
            inner = set(p[1:-1])
            if disjoint_paths(rest, used | inner, assignment):
                return True
        return False

    for branch in itertools.permutations(range(n), k):
        assignment = {i: branch[i] for i in range(k)}
        if disjoint_paths(list(pattern_edges), set(branch), assignment):
            return True
    return False


def is_planar_bruteforce(g: Structure, bound: int = 7) -> bool:
    """Kuratowski-subdivision oracle for tiny graphs."""
    if g.n > bound:
        raise SizeBoundError(f"brute-force planarity bound exceeded: {g.n} > {bound}")
    k5 = list(itertools.combinations(range(5), 2))
    k33 = [(a, 3 + b) for a in range(3) for b in range(3)]
    if g.n >= 5 and contains_subdivision(g, k5, 5):
        return False
    if g.n >= 6 and contains_subdivision(g, k33, 6):
        return False
    return True


# ---------------------------------------------------------------------------
# Treewidth
# ---------------------------------------------------------------------------

def treewidth_le(g: Structure, w: int, bound: int = 40) -> bool:
    """Elimination-order search with simplicial/almost-simplicial reductions."""
    if g.n > bound:
        raise SizeBoundError(f"treewidth bound exceeded: {g.n} > {bound}")
    if w < 0:
        return g.n == 0
    adj = {v: set(a) for v, a in enumerate(g.adjacency())}

    def eliminate(a: Dict[int, Set[int]], v: int) -> Dict[int, Set[int]]:
        nbrs = a[v]
        out = {u: set(x) for u, x in a.items() if u != v}
        for u in nbrs:
            out[u].discard(v)
        for x, y in itertools.combinations(sorted(nbrs), 2):
            out[x].add(y)
            out[y].add(x)
        return out

    def is_clique(a, vs) -> bool:
        return all(y in a[x] for x, y in itertools.combinations(sorted(vs), 2))

    seen: Set[frozenset] = set()

    def solve(a: Dict[int, Set[int]]) -> bool:
        while True:
            if len(a) <= w + 1:
                return True
            reduced = False
            for v in sorted(a):
                deg = len(a[v])
                if deg <= 1 or (deg <= w and is_clique(a, a[v])):
                    if deg > w:
                        return False
                    a = eliminate(a, v)
                    reduced = True
                    break
                if deg <= w and deg >= 2:
                    # almost simplicial: neighbors minus one vertex form a clique
                    for skip in sorted(a[v]):
                        if is_clique(a, a[v] - {skip}):
                            a = eliminate(a, v)
                            reduced = True
                            break
                    if reduced:
                        break
            if not reduced:
                break
        key = frozenset((v, frozenset(a[v])) for v in a)
        if key in seen:
            return False
        seen.add(key)
        candidates = sorted((v for v in a if len(a[v]) <= w),
                            key=lambda v: len(a[v]))
        for v in candidates:
            if solve(eliminate(a, v)):
                return True
        return False

    return solve(adj)


def treewidth(g: Structure, bound: int = 40) -> int:
    """Exact treewidth (bag size minus one); -1 for the empty graph."""
    if g.n == 0:
        return -1
    lo = max(degeneracy(g), 0)
    for w in range(lo, g.n):
        if treewidth_le(g, w, bound=bound):
            return w
    return g.n - 1


# ---------------------------------------------------------------------------
# Simple numerics and means
# ---------------------------------------------------------------------------

def order(g: Structure) -> int:
    return g.n


def size(g: Structure) -> int:
    return len(g.edges())


def apex_count(g: Structure) -> int:
    adj = g.adjacency()
    return sum(1 for v in range(g.n) if len(adj[v]) == g.n - 1)


def odd_degree_count(g: Structure) -> int:
    return sum(1 for d in g.degree_sequence() if d % 2 == 1)


def max_degree(g: Structure) -> int:
    return max(g.degree_sequence(), default=0)


def min_degree(g: Structure) -> int:
    return min(g.degree_sequence(), default=0)


def avg_degree(g: Structure) -> Fraction:
    if g.n == 0:
        raise InvariantError("average degree of the empty graph")
    return Fraction(2 * len(g.edges()), g.n)


def avg_degree_le_half_order(g: Structure) -> bool:
    return avg_degree(g) <= Fraction(g.n, 2)


def quadratic_mean_degree_squared(g: Structure) -> Fraction:
    if g.n == 0:
        raise InvariantError("degree mean of the empty graph")
    return Fraction(sum(d * d for d in g.degree_sequence()), g.n)


def harmonic_mean_degree(g: Structure) -> Fraction:
    degs = g.degree_sequence()
    if not degs:
        raise InvariantError("degree mean of the empty graph")
    if any(d == 0 for d in degs):
        raise InvariantError("harmonic degree mean undefined with isolated vertices")
    s = sum(Fraction(1, d) for d in degs)
    return Fraction(g.n, 1) / s


def avg_neighborhood_size(g: Structure, radius: int) -> Fraction:
    if g.n == 0:
        raise InvariantError("mean over the empty graph")
    adj = g.adjacency()
    total = 0
    for v in range(g.n):
        dist = {v: 0}
        queue = [v]
        d = 0
        while queue and d < radius:
            d += 1
            nxt = []
            for x in queue:
                for u in adj[x]:
                    if u not in dist:
                        dist[u] = d
                        nxt.append(u)
            queue = nxt
        total += len(dist)
    return Fraction(total, g.n)


def avg_edge_incident_edges(g: Structure) -> Fraction:
    edges = g.edges()
    if not edges:
        raise InvariantError("mean over an edgeless graph")
    deg = [0] * g.n
    for (u, v) in edges:
        deg[u] += 1
        deg[v] += 1
    total = sum(deg[u] + deg[v] - 2 for (u, v) in edges)
    return Fraction(total, len(edges))
