"""MaxCut problem instances: generators, exact classical oracles, bandwidth tools.

Bit convention used throughout the package: a cut assignment on N vertices is
encoded as a computational-basis index z in [0, 2^N), where bit i of z (bit 0 =
least significant) is the side of vertex i.  Bitstrings are written with vertex
0 first, so "0110" puts vertices 1 and 2 on one side and 0, 3 on the other.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

UNWEIGHTED_REGULAR = "unweighted_regular"
WEIGHTED_REGULAR = "weighted_regular"
WEIGHTED_COMPLETE = "weighted_complete"
ARBITRARY = "arbitrary"

BRUTE_FORCE_CAP = 24  # exhaustive oracle refuses larger N

Edge = tuple[int, int, float]


@dataclass(frozen=True)
class Graph:
    """Weighted undirected graph; edges are canonicalized, validated (i < j,
    no duplicates, no self-loops) and kind invariants are enforced."""

    n_vertices: int
    edges: tuple[Edge, ...]
    kind: str = ARBITRARY
    degree: int | None = None

    def __post_init__(self):
        n = self.n_vertices
        if n < 1:
            raise ValueError("graph needs at least one vertex")
        canon = []
        for i, j, w in self.edges:
            i, j = int(i), int(j)
            if i > j:
                i, j = j, i
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            if not 0 <= i < j < n:
                raise ValueError(f"edge ({i},{j}) out of range for n={n}")
            w = float(w)
            if not np.isfinite(w) or w < 0:
                raise ValueError(f"edge ({i},{j}) has invalid weight {w}")
            canon.append((i, j, w))
        canon.sort()
        pairs = [(i, j) for i, j, _ in canon]
        if len(set(pairs)) != len(pairs):
            raise ValueError("duplicate edges")
        object.__setattr__(self, "edges", tuple(canon))
        if self.kind not in (UNWEIGHTED_REGULAR, WEIGHTED_REGULAR, WEIGHTED_COMPLETE, ARBITRARY):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.kind in (UNWEIGHTED_REGULAR, WEIGHTED_REGULAR):
            if self.degree is None:
                raise ValueError(f"kind {self.kind} requires a degree")
            if not np.all(self.degrees() == self.degree):
                raise ValueError(f"graph is not {self.degree}-regular")
        if self.kind == UNWEIGHTED_REGULAR and any(w != 1.0 for _, _, w in self.edges):
            raise ValueError("unweighted graph must have unit weights")
        if self.kind in (WEIGHTED_REGULAR, WEIGHTED_COMPLETE) and any(
            not 0.0 <= w <= 1.0 for _, _, w in self.edges
        ):
            raise ValueError("weighted graph needs weights in [0, 1]")
        if self.kind == WEIGHTED_COMPLETE and len(self.edges) != n * (n - 1) // 2:
            raise ValueError("weighted_complete graph must be complete")

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def total_weight(self) -> float:
        return float(sum(w for _, _, w in self.edges))

    @property
    def is_weighted(self) -> bool:
        return self.kind != UNWEIGHTED_REGULAR

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_vertices, dtype=int)
        for i, j, _ in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def neighbors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for i, j, _ in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return adj


@dataclass(frozen=True)
class CutResult:
    """Exact MaxCut value and the full set of optimal assignments.

    ``optimal_strings`` is closed under global bit-flip (the objective is
    invariant under exchanging the two sides)."""

    c_max: float
    optimal_strings: frozenset[str]

    def optimal_indices(self) -> np.ndarray:
        """Optimal assignments as basis indices (sorted)."""
        return np.sort(np.fromiter(
            (bitstring_to_index(s) for s in self.optimal_strings), dtype=np.int64
        ))


@dataclass(frozen=True)
class VertexNumbering:
    """Bijective relabeling; ``permutation[old_index] = new_index``."""

    permutation: tuple[int, ...]

    def __post_init__(self):
        n = len(self.permutation)
        if sorted(self.permutation) != list(range(n)):
            raise ValueError("permutation is not a bijection")


def index_to_bitstring(z: int, n: int) -> str:
    """Basis index -> assignment string, vertex 0 first (bit 0)."""
    return "".join("1" if (z >> i) & 1 else "0" for i in range(n))


def bitstring_to_index(s: str) -> int:
    z = 0
    for i, c in enumerate(s):
        if c == "1":
            z |= 1 << i
        elif c != "0":
            raise ValueError(f"invalid bitstring {s!r}")
    return z


def _as_sides(z, n: int) -> np.ndarray:
    if isinstance(z, str):
        if len(z) != n:
            raise ValueError(f"bitstring length {len(z)} != {n} vertices")
        return np.array([1 if c == "1" else 0 for c in z], dtype=np.int8)
    if isinstance(z, (int, np.integer)):
        return np.array([(int(z) >> i) & 1 for i in range(n)], dtype=np.int8)
    sides = np.asarray(z, dtype=np.int8)
    if sides.shape != (n,):
        raise ValueError(f"assignment length {sides.shape} != {n} vertices")
    return sides


def cut_value(g: Graph, z) -> float:
    """Total weight of edges whose endpoints are on opposite sides of z.

    ``z`` may be a bitstring, a basis index, or a 0/1 sequence.
    """
    sides = _as_sides(z, g.n_vertices)
    return float(sum(w for i, j, w in g.edges if sides[i] != sides[j]))


def generate_random_regular(n: int, d: int, seed) -> Graph:
    """Random simple d-regular graph via the configuration (pairing) model,
    restarting from scratch whenever a self-loop or multi-edge appears.
    Deterministic for a fixed seed."""
    if not 0 <= d < n:
        raise ValueError(f"degree d={d} must satisfy 0 <= d < n={n}")
    if (n * d) % 2 != 0:
        raise ValueError(f"n*d = {n * d} must be even")
    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(n), d)
    for _ in range(100_000):
        rng.shuffle(stubs)
        a = stubs[0::2]
        b = stubs[1::2]
        if np.any(a == b):
            continue
        lo = np.minimum(a, b)
        hi = np.maximum(a, b)
        keys = lo * n + hi
        if np.unique(keys).size != keys.size:
            continue
        edges = tuple((int(i), int(j), 1.0) for i, j in zip(lo, hi))
        return Graph(n, edges, UNWEIGHTED_REGULAR, d)
    raise RuntimeError(f"pairing model failed to produce a simple graph (n={n}, d={d})")


def complete_graph(n: int) -> Graph:
    edges = tuple((i, j, 1.0) for i in range(n) for j in range(i + 1, n))
    return Graph(n, edges, UNWEIGHTED_REGULAR, n - 1)


def _infer_kind(n: int, edges: tuple[Edge, ...]) -> tuple[str, int | None]:
    deg = np.zeros(n, dtype=int)
    for i, j, _ in edges:
        deg[i] += 1
        deg[j] += 1
    regular = n > 0 and np.all(deg == deg[0])
    ws = [w for _, _, w in edges]
    if regular and all(w == 1.0 for w in ws):
        return UNWEIGHTED_REGULAR, int(deg[0])
    if all(0.0 <= w <= 1.0 for w in ws):
        if len(edges) == n * (n - 1) // 2 and n > 1:
            return WEIGHTED_COMPLETE, None
        if regular:
            return WEIGHTED_REGULAR, int(deg[0])
    return ARBITRARY, None


def assign_random_weights(g: Graph, seed) -> Graph:
    """Replace every edge weight with an i.i.d. uniform [0,1] draw; the kind
    tag is re-inferred (e.g. unweighted 3-regular -> weighted 3-regular)."""
    rng = np.random.default_rng(seed)
    ws = rng.uniform(0.0, 1.0, size=g.n_edges)
    edges = tuple((i, j, float(w)) for (i, j, _), w in zip(g.edges, ws))
    kind, degree = _infer_kind(g.n_vertices, edges)
    return Graph(g.n_vertices, edges, kind, degree)


def brute_force_maxcut(g: Graph, cap: int = BRUTE_FORCE_CAP) -> CutResult:
    """Exhaustive MaxCut oracle.

    Enumerates the 2^(N-1) assignments with vertex 0 fixed to side 0 (global
    flip symmetry), then closes the optimal set under flip.
    """
    n = g.n_vertices
    if n > cap:
        raise ValueError(f"brute force capped at N={cap}, got N={n}")
    m = 1 << (n - 1)
    k = np.arange(m, dtype=np.int64)
    vals = np.zeros(m)
    for i, j, w in g.edges:
        # basis index z = 2k: bit b of z is bit b-1 of k (b >= 1), bit 0 is 0
        if i == 0:
            cross = (k >> (j - 1)) & 1
        else:
            cross = ((k >> (i - 1)) ^ (k >> (j - 1))) & 1
        vals += w * cross
    c_max = float(vals.max())
    best_k = np.nonzero(vals == c_max)[0]
    mask = (1 << n) - 1
    strings = set()
    for kk in best_k:
        z = int(kk) << 1
        strings.add(index_to_bitstring(z, n))
        strings.add(index_to_bitstring(z ^ mask, n))
    return CutResult(c_max, frozenset(strings))


def bandwidth(g: Graph) -> int:
    """Longest edge under the current numbering: max |i - j|."""
    return max((j - i for i, j, _ in g.edges), default=0)


def apply_numbering(g: Graph, numbering: VertexNumbering) -> Graph:
    perm = numbering.permutation
    if len(perm) != g.n_vertices:
        raise ValueError("numbering size mismatch")
    edges = tuple((perm[i], perm[j], w) for i, j, w in g.edges)
    return Graph(g.n_vertices, edges, g.kind, g.degree)


def cuthill_mckee(g: Graph) -> VertexNumbering:
    """Bandwidth-reducing renumbering (Cuthill-McKee breadth-first order,
    neighbors visited by increasing degree).

    Applied per connected component, components concatenated in decreasing
    size order.  Returns the identity instead whenever the BFS order would
    not strictly improve the bandwidth, so the result never loses to the
    input numbering.
    """
    n = g.n_vertices
    adj = g.neighbors()
    deg = g.degrees()

    seen = [False] * n
    components = []
    for v0 in range(n):
        if seen[v0]:
            continue
        comp = [v0]
        seen[v0] = True
        qi = 0
        while qi < len(comp):
            for u in adj[comp[qi]]:
                if not seen[u]:
                    seen[u] = True
                    comp.append(u)
            qi += 1
        components.append(comp)
    components.sort(key=len, reverse=True)

    order = []
    for comp in components:
        start = min(comp, key=lambda v: (deg[v], v))
        visited = {start}
        queue = deque([start])
        while queue:
            v = queue.popleft()
            order.append(v)
            for u in sorted(adj[v], key=lambda u: (deg[u], u)):
                if u not in visited:
                    visited.add(u)
                    queue.append(u)

    perm = [0] * n
    for pos, v in enumerate(order):
        perm[v] = pos
    candidate = VertexNumbering(tuple(perm))
    if bandwidth(apply_numbering(g, candidate)) < bandwidth(g):
        return candidate
    return VertexNumbering(tuple(range(n)))


def save_graph(g: Graph, path) -> None:
    """Edge-list file: header line ``N M`` then M lines ``i j w``."""
    with open(path, "w") as fh:
        fh.write(f"{g.n_vertices} {g.n_edges}\n")
        for i, j, w in g.edges:
            fh.write(f"{i} {j} {w:.17g}\n")


def load_graph(path) -> Graph:
    with open(path) as fh:
        tokens = fh.read().split()
    if len(tokens) < 2:
        raise ValueError(f"malformed graph file {path}")
    n, m = int(tokens[0]), int(tokens[1])
    body = tokens[2:]
    if len(body) != 3 * m:
        raise ValueError(f"expected {m} edges in {path}, found {len(body) // 3}")
    edges = tuple(
        (int(body[3 * e]), int(body[3 * e + 1]), float(body[3 * e + 2])) for e in range(m)
    )
    kind, degree = _infer_kind(n, edges)
    return Graph(n, edges, kind, degree)
