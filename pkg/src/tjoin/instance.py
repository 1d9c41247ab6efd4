"""Problem instances, edge multisets and the basic connected-T-join machinery.

All numbers are :class:`fractions.Fraction`; nothing here touches floats.
Edges are always stored as normalized pairs ``(u, v)`` with ``u < v``.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping

Edge = tuple[int, int]

_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")


class InstanceFormatError(ValueError):
    """Raised when an instance file cannot be parsed or validated."""

    def __init__(self, lineno: int | None, message: str) -> None:
        self.lineno = lineno
        self.message = message
        prefix = f"line {lineno}: " if lineno is not None else ""
        super().__init__(prefix + message)


def parse_rational(token: str) -> Fraction:
    if not _RATIONAL.match(token):
        raise ValueError(f"not a rational: {token!r}")
    try:
        return Fraction(token)
    except ZeroDivisionError:
        raise ValueError(f"zero denominator in {token!r}") from None


def fmt_q(value: Fraction | int) -> str:
    """Render a rational as ``p`` or ``p/q`` in lowest terms."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def norm(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


def fmt_edge(e: Edge) -> str:
    return f"{e[0]}-{e[1]}"


def fmt_set(nodes: Iterable[int]) -> str:
    return "{" + ",".join(str(v) for v in sorted(nodes)) + "}"


def mask_of(nodes: Iterable[int]) -> int:
    m = 0
    for v in nodes:
        m |= 1 << v
    return m


def nodes_of(mask: int) -> frozenset[int]:
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return frozenset(out)


@dataclass(frozen=True)
class Instance:
    n: int
    edges: tuple[tuple[int, int, Fraction], ...]
    terminals: frozenset[int]
    penalties: Mapping[int, Fraction] | None = field(default=None, compare=False)
    root: int | None = None
    is_metric: bool = False

    @cached_property
    def edge_list(self) -> list[Edge]:
        return [(u, v) for u, v, _ in self.edges]

    @cached_property
    def costs(self) -> dict[Edge, Fraction]:
        return {(u, v): c for u, v, c in self.edges}

    @cached_property
    def index(self) -> dict[Edge, int]:
        return {(u, v): i for i, (u, v, _) in enumerate(self.edges)}

    @cached_property
    def t_mask(self) -> int:
        return mask_of(self.terminals)

    @property
    def root_node(self) -> int:
        """The designated terminal: ``root`` if given, else the lowest-indexed node of T."""
        return self.root if self.root is not None else min(self.terminals)

    def cost(self, u: int, v: int) -> Fraction:
        return self.costs[norm(u, v)]

    def total_cost(self) -> Fraction:
        return sum((c for _, _, c in self.edges), Fraction(0))

    def is_complete(self) -> bool:
        return len(self.edges) == self.n * (self.n - 1) // 2

    def check_metric(self) -> bool:
        """True if the graph is complete and every triangle inequality holds."""
        if not self.is_complete():
            return False
        c = self.costs
        n = self.n
        for u in range(n):
            for v in range(u + 1, n):
                cuv = c[(u, v)]
                for w in range(n):
                    if w == u or w == v:
                        continue
                    if cuv > c[norm(u, w)] + c[norm(w, v)]:
                        return False
        return True


def make_instance(
    n: int,
    edges: Iterable[tuple[int, int, Fraction | int]],
    terminals: Iterable[int],
    penalties: Mapping[int, Fraction | int] | None = None,
    root: int | None = None,
) -> Instance:
    """Build and validate an :class:`Instance`; ``is_metric`` is computed."""
    norm_edges = []
    seen = set()
    for u, v, c in edges:
        c = Fraction(c)
        if u == v:
            raise InstanceFormatError(None, f"self-loop at node {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise InstanceFormatError(None, f"edge {u}-{v} out of range")
        if c < 0:
            raise InstanceFormatError(None, f"negative cost on edge {u}-{v}")
        e = norm(u, v)
        if e in seen:
            raise InstanceFormatError(None, f"duplicate edge {u}-{v}")
        seen.add(e)
        norm_edges.append((e[0], e[1], c))
    T = frozenset(terminals)
    _check_terminals(n, T, None)
    pen = None
    if penalties is not None:
        pen = {}
        for v, p in penalties.items():
            p = Fraction(p)
            if v in T:
                raise InstanceFormatError(None, f"penalty given for terminal {v}")
            if p < 0:
                raise InstanceFormatError(None, f"negative penalty at node {v}")
            pen[v] = p
    if root is not None and root not in T:
        raise InstanceFormatError(None, f"root {root} is not in T")
    inst = Instance(n, tuple(norm_edges), T, pen, root, False)
    if inst.check_metric():
        inst = Instance(n, tuple(norm_edges), T, pen, root, True)
    return inst


def _check_terminals(n: int, T: frozenset[int], lineno: int | None) -> None:
    if not T:
        raise InstanceFormatError(lineno, "empty T")
    if any(not 0 <= t < n for t in T):
        raise InstanceFormatError(lineno, "terminal out of range")
    if len(T) % 2:
        raise InstanceFormatError(lineno, "odd |T|")


def parse_instance(text: str) -> Instance:
    """Parse the line-oriented instance format.

    Directives: ``nodes <n>``, ``T <k> <v1> ... <vk>``, ``root <v>``,
    ``edge <u> <v> <cost>``, ``penalty <v> <p>``; ``#`` starts a comment.
    """
    n = None
    T: frozenset[int] | None = None
    root = None
    root_line = None
    edges: list[tuple[int, int, Fraction]] = []
    seen: dict[Edge, int] = {}
    penalties: dict[int, Fraction] = {}
    pen_lines: dict[int, int] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key, args = parts[0], parts[1:]
        try:
            if key != "nodes" and n is None:
                raise InstanceFormatError(lineno, "'nodes' must come first")
            if key == "nodes":
                if n is not None:
                    raise InstanceFormatError(lineno, "repeated 'nodes'")
                if len(args) != 1:
                    raise InstanceFormatError(lineno, "malformed 'nodes' line")
                n = int(args[0])
                if n < 2:
                    raise InstanceFormatError(lineno, "need at least 2 nodes")
            elif key == "T":
                if T is not None:
                    raise InstanceFormatError(lineno, "repeated 'T'")
                if not args:
                    raise InstanceFormatError(lineno, "malformed 'T' line")
                k = int(args[0])
                vs = [int(a) for a in args[1:]]
                if k != len(vs):
                    raise InstanceFormatError(lineno, f"'T' declares {k} nodes but lists {len(vs)}")
                if len(set(vs)) != len(vs):
                    raise InstanceFormatError(lineno, "repeated terminal")
                T = frozenset(vs)
                _check_terminals(n, T, lineno)
            elif key == "root":
                if len(args) != 1:
                    raise InstanceFormatError(lineno, "malformed 'root' line")
                root, root_line = int(args[0]), lineno
            elif key == "edge":
                if len(args) != 3:
                    raise InstanceFormatError(lineno, "malformed 'edge' line")
                u, v, c = int(args[0]), int(args[1]), parse_rational(args[2])
                if u == v:
                    raise InstanceFormatError(lineno, "self-loop")
                if not (0 <= u < n and 0 <= v < n):
                    raise InstanceFormatError(lineno, "edge endpoint out of range")
                if c < 0:
                    raise InstanceFormatError(lineno, "negative cost")
                e = norm(u, v)
                if e in seen:
                    raise InstanceFormatError(lineno, f"duplicate edge (first on line {seen[e]})")
                seen[e] = lineno
                edges.append((e[0], e[1], c))
            elif key == "penalty":
                if len(args) != 2:
                    raise InstanceFormatError(lineno, "malformed 'penalty' line")
                v, p = int(args[0]), parse_rational(args[1])
                if not 0 <= v < n:
                    raise InstanceFormatError(lineno, "penalty node out of range")
                if p < 0:
                    raise InstanceFormatError(lineno, "negative penalty")
                if v in penalties:
                    raise InstanceFormatError(lineno, "duplicate penalty")
                penalties[v], pen_lines[v] = p, lineno
            else:
                raise InstanceFormatError(lineno, f"unknown directive {key!r}")
        except InstanceFormatError:
            raise
        except ValueError as exc:
            raise InstanceFormatError(lineno, f"malformed line ({exc})") from None

    if n is None:
        raise InstanceFormatError(None, "missing 'nodes'")
    if T is None:
        raise InstanceFormatError(None, "empty T")
    if root is not None and root not in T:
        raise InstanceFormatError(root_line, f"root {root} is not in T")
    for v, ln in pen_lines.items():
        if v in T:
            raise InstanceFormatError(ln, f"penalty given for terminal {v}")
    return make_instance(n, edges, T, penalties or None, root)


def format_instance(inst: Instance) -> str:
    lines = [f"nodes {inst.n}"]
    lines.append("T " + " ".join(str(x) for x in [len(inst.terminals), *sorted(inst.terminals)]))
    if inst.root is not None:
        lines.append(f"root {inst.root}")
    for u, v, c in inst.edges:
        lines.append(f"edge {u} {v} {fmt_q(c)}")
    if inst.penalties:
        for v in sorted(inst.penalties):
            lines.append(f"penalty {v} {fmt_q(inst.penalties[v])}")
    return "\n".join(lines) + "\n"


def metric_completion(inst: Instance) -> Instance:
    """Complete graph on the same nodes with exact shortest-path costs.

    Existing edges keep their position in the edge list (with possibly
    reduced cost); missing pairs are appended in lexicographic order.
    """
    n = inst.n
    dist: list[list[Fraction | None]] = [[None] * n for _ in range(n)]
    for v in range(n):
        dist[v][v] = Fraction(0)
    for u, v, c in inst.edges:
        if dist[u][v] is None or c < dist[u][v]:
            dist[u][v] = dist[v][u] = c
    for k in range(n):
        dk = dist[k]
        for i in range(n):
            dik = dist[i][k]
            if dik is None:
                continue
            di = dist[i]
            for j in range(n):
                dkj = dk[j]
                if dkj is None:
                    continue
                if di[j] is None or dik + dkj < di[j]:
                    di[j] = dik + dkj
    if any(d is None for row in dist for d in row):
        raise ValueError("input graph is disconnected")
    edges = [(u, v, dist[u][v]) for u, v, _ in inst.edges]
    present = set(inst.edge_list)
    for u in range(n):
        for v in range(u + 1, n):
            if (u, v) not in present:
                edges.append((u, v, dist[u][v]))
    return Instance(n, tuple(edges), inst.terminals, inst.penalties, inst.root, True)


@dataclass(frozen=True)
class EdgeMultiset:
    """Edges with multiplicities (the mu^F_e of a solution)."""

    mult: Mapping[Edge, int]

    @classmethod
    def from_edges(cls, edges: Iterable[Edge]) -> "EdgeMultiset":
        return cls(dict(Counter(norm(u, v) for u, v in edges)))

    def __post_init__(self) -> None:
        clean = {norm(*e): m for e, m in self.mult.items() if m}
        if any(m < 0 for m in clean.values()):
            raise ValueError("negative multiplicity")
        object.__setattr__(self, "mult", clean)

    def __add__(self, other: "EdgeMultiset") -> "EdgeMultiset":
        out = Counter(self.mult)
        out.update(other.mult)
        return EdgeMultiset(dict(out))

    def __iter__(self) -> Iterator[Edge]:
        for e, m in sorted(self.mult.items()):
            for _ in range(m):
                yield e

    def __len__(self) -> int:
        return sum(self.mult.values())

    def support(self) -> list[Edge]:
        return sorted(self.mult)

    def cost(self, inst: Instance) -> Fraction:
        c = inst.costs
        try:
            return sum((m * c[e] for e, m in self.mult.items()), Fraction(0))
        except KeyError as exc:
            raise ValueError(f"edge {exc.args[0]} is not in the instance") from None

    def degrees(self, n: int) -> list[int]:
        deg = [0] * n
        for (u, v), m in self.mult.items():
            deg[u] += m
            deg[v] += m
        return deg

    def odd_nodes(self, n: int) -> frozenset[int]:
        return frozenset(v for v, d in enumerate(self.degrees(n)) if d % 2)

    def is_reduced(self) -> bool:
        return all(m <= 2 for m in self.mult.values())


def combine(J: Iterable[Edge], M: EdgeMultiset) -> EdgeMultiset:
    """Multiset union ``J + M``; edges in both get multiplicity 2."""
    return EdgeMultiset.from_edges(J) + M


def wrong_degree_set(J: Iterable[Edge], T: Iterable[int]) -> frozenset[int]:
    """Nodes of T with even degree in J plus non-terminals with odd degree."""
    deg: Counter[int] = Counter()
    for u, v in J:
        deg[u] += 1
        deg[v] += 1
    T = frozenset(T)
    odd = {v for v, d in deg.items() if d % 2}
    return frozenset(odd.symmetric_difference(T))


def _components(n: int, edges: Iterable[Edge]) -> list[int]:
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    return [find(v) for v in range(n)]


def kruskal(n: int, edges: Iterable[Edge], weight) -> list[Edge]:
    """Minimum spanning forest; ties broken by position in ``edges``."""
    edges = list(edges)
    order = sorted(range(len(edges)), key=lambda i: (weight(edges[i]), i))
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    out = []
    for i in order:
        u, v = edges[i]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            out.append(norm(u, v))
    return out


def is_connected(n: int, edges: Iterable[Edge]) -> bool:
    return len(set(_components(n, edges))) == 1


@dataclass(frozen=True)
class JoinReport:
    connected: bool
    parity_ok: bool
    cost: Fraction

    @property
    def ok(self) -> bool:
        return self.connected and self.parity_ok


def validate_connected_tjoin(inst: Instance, F: EdgeMultiset) -> JoinReport:
    connected = is_connected(inst.n, F.support())
    parity_ok = F.odd_nodes(inst.n) == inst.terminals
    return JoinReport(connected, parity_ok, F.cost(inst))


def is_spanning_tree(n: int, edges: Iterable[Edge]) -> bool:
    edges = list(edges)
    return len(edges) == n - 1 and len(set(edges)) == n - 1 and is_connected(n, edges)


def _find_cycle(F: Counter) -> list[int] | None:
    """A cycle ``[v1, ..., vk]`` of F; a doubled edge counts as ``k = 2``."""
    for e in sorted(F):
        if F[e] >= 2:
            return [e[0], e[1]]
    adj: dict[int, list[int]] = {}
    for u, v in sorted(F):
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    parent: dict[int, int] = {}
    for start in sorted(adj):
        if start in parent:
            continue
        parent[start] = -1
        stack = [(start, iter(adj[start]))]
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                continue
            if nxt == parent[node]:
                continue
            if nxt in parent:
                # back edge closes a cycle along the current DFS path
                path = [node]
                while path[-1] != nxt:
                    path.append(parent[path[-1]])
                return path[::-1]
            parent[nxt] = node
            stack.append((nxt, iter(adj[nxt])))
    return None


def shortcut_steps(inst: Instance, F: EdgeMultiset) -> Iterator[EdgeMultiset]:
    """Yield the successive multisets of the shortcutting procedure.

    Each step finds a cycle ``C`` (two copies of one edge count), an edge
    ``u v_i`` outside ``C``, and replaces ``u v_i, v_i v_{i+1}`` by
    ``u v_{i+1}``. The last multiset yielded is a spanning tree.
    """
    if not inst.is_metric:
        raise ValueError("shortcutting needs a metric instance")
    if not inst.terminals:
        raise ValueError("shortcutting needs T nonempty")
    rep = validate_connected_tjoin(inst, F)
    if not rep.ok:
        raise ValueError("input is not a connected T-join")
    cur = Counter(F.mult)
    yield EdgeMultiset(dict(cur))
    while True:
        cycle = _find_cycle(cur)
        if cycle is None:
            return
        k = len(cycle)
        cyc_edges = Counter(norm(cycle[i], cycle[(i + 1) % k]) for i in range(k))
        if k == 2:
            cyc_edges = Counter({norm(*cycle): 2})
        rest = cur - cyc_edges
        choice = None
        for i, vi in enumerate(cycle):
            others = sorted(
                (a if b == vi else b) for (a, b), m in rest.items() if m and vi in (a, b)
            )
            if others:
                choice = (i, others[0])
                break
        assert choice is not None, "a connected T-join with T nonempty always has one"
        i, u = choice
        vi, vnext = cycle[i], cycle[(i + 1) % k]
        cur[norm(u, vi)] -= 1
        cur[norm(vi, vnext)] -= 1
        if u != vnext:
            cur[norm(u, vnext)] += 1
        cur = +cur
        yield EdgeMultiset(dict(cur))


def shortcut_to_tree(inst: Instance, F: EdgeMultiset) -> list[Edge]:
    """A spanning tree with odd-degree set T and cost at most ``c(F)``."""
    last = None
    for last in shortcut_steps(inst, F):
        pass
    assert last is not None
    tree = last.support()
    assert is_spanning_tree(inst.n, tree)
    return tree


def cut_parity_holds(F: EdgeMultiset, T: frozenset[int], U: frozenset[int], n: int) -> bool:
    """Check both cut-parity properties of F for one set U."""
    D = wrong_degree_set(F, T)
    cut = sum(m for (u, v), m in F.mult.items() if (u in U) != (v in U))
    rhs = len(U & D - T) + len((U - D) & T)
    if cut % 2 != rhs % 2:
        return False
    if len(U & T) % 2 == 1 and len(U & D) % 2 == 1 and cut % 2:
        return False
    return True
