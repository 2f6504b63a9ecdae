"""
Erdős–Rényi random graphs and exact hop distances.

Graphs are sampled as G(N, p) with p = c·ln(N)/N, conditioned on being
connected by rejection, and stored as immutable sorted adjacency lists.
Distances are hop counts from breadth-first search.
"""

import logging
import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import networkx as nx
import numpy as np

from .exceptions import GraphGenerationError, UnreachableVertexError, ValidationError
from .seeding import mix_seed

logger = logging.getLogger(__name__)

MAX_REJECTIONS = 100


@dataclass(frozen=True)
class RandomGraphSpec:
    """
    Parameters of a connected G(N, p) sample.

    Attributes:
        num_vertices: Number of vertices N (at least 2)
        degree_coeff: Constant c > 1 of the connected regime
        seed: 64-bit unsigned seed; identical specs give identical graphs
    """

    num_vertices: int
    degree_coeff: float
    seed: int = 0

    def __post_init__(self):
        """Validate parameters after initialization."""
        if not isinstance(self.num_vertices, (int, np.integer)) or self.num_vertices < 2:
            raise ValidationError(f"num_vertices must be an integer >= 2, got {self.num_vertices}")
        if not self.degree_coeff > 1:
            raise ValidationError(f"degree_coeff must be > 1, got {self.degree_coeff}")
        if self.seed < 0 or self.seed >= 1 << 64:
            raise ValidationError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    @property
    def edge_probability(self) -> float:
        """p = c·ln(N)/N, capped at 1."""
        n = self.num_vertices
        return min(1.0, self.degree_coeff * math.log(n) / n)


@dataclass(frozen=True)
class Graph:
    """Undirected unweighted graph as per-vertex sorted neighbor tuples."""

    num_vertices: int
    adjacency: Tuple[Tuple[int, ...], ...]
    num_edges: int

    def __post_init__(self):
        if len(self.adjacency) != self.num_vertices:
            raise ValidationError("adjacency must have one entry per vertex")
        if 2 * self.num_edges != sum(len(nbrs) for nbrs in self.adjacency):
            raise ValidationError("num_edges must equal half the sum of adjacency lengths")

    @classmethod
    def from_edges(cls, num_vertices: int, edges: Iterable[Tuple[int, int]]) -> 'Graph':
        """Build a graph from an edge list, rejecting self-loops and duplicates."""
        neighbors: List[set] = [set() for _ in range(num_vertices)]
        count = 0
        for u, v in edges:
            if u == v:
                raise ValidationError(f"self-loop at vertex {u}")
            if not (0 <= u < num_vertices and 0 <= v < num_vertices):
                raise ValidationError(f"edge ({u}, {v}) outside vertex range")
            if v in neighbors[u]:
                raise ValidationError(f"duplicate edge ({u}, {v})")
            neighbors[u].add(v)
            neighbors[v].add(u)
            count += 1
        return cls(num_vertices, tuple(tuple(sorted(n)) for n in neighbors), count)

    @classmethod
    def from_networkx(cls, nx_graph: nx.Graph) -> 'Graph':
        """Convert a networkx graph on vertices 0..N-1."""
        n = nx_graph.number_of_nodes()
        adjacency = tuple(tuple(sorted(nx_graph.adj[v])) for v in range(n))
        return cls(n, adjacency, nx_graph.number_of_edges())

    def neighbors(self, v: int) -> Tuple[int, ...]:
        return self.adjacency[v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]


@dataclass(frozen=True)
class DistanceField:
    """Hop distances from one origin to every vertex."""

    origin: int
    dist: Tuple[int, ...]

    def __getitem__(self, v: int) -> int:
        return self.dist[v]

    def __len__(self) -> int:
        return len(self.dist)


def generate_er(spec: RandomGraphSpec) -> Graph:
    """
    Sample a connected G(N, p) graph.

    Disconnected samples are rejected; attempt ``a >= 1`` reseeds with
    ``mix_seed(spec.seed, a)``.

    Raises:
        GraphGenerationError: If no connected sample appears within 100 attempts.
    """
    n = spec.num_vertices
    p = spec.edge_probability
    for attempt in range(MAX_REJECTIONS):
        seed = spec.seed if attempt == 0 else mix_seed(spec.seed, attempt)
        sample = nx.fast_gnp_random_graph(n, p, seed=seed)
        if nx.is_connected(sample):
            if attempt:
                logger.debug(f"G({n}, {p:.5f}) connected after {attempt + 1} draws")
            return Graph.from_networkx(sample)
    raise GraphGenerationError(
        f"No connected G({n}, {p:.5f}) sample in {MAX_REJECTIONS} draws; "
        f"degree_coeff={spec.degree_coeff} is likely in the disconnected regime"
    )


def check_vertex(g: Graph, v: int, what: str = "vertex") -> None:
    if not 0 <= v < g.num_vertices:
        raise ValidationError(f"{what} {v} outside 0..{g.num_vertices - 1}")


def bfs_distances(g: Graph, origin: int) -> DistanceField:
    """
    Exact hop counts from ``origin`` to every vertex.

    Raises:
        UnreachableVertexError: If some vertex is not reachable.
    """
    check_vertex(g, origin, "origin")
    dist = [-1] * g.num_vertices
    dist[origin] = 0
    queue = deque([origin])
    adjacency = g.adjacency
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for w in adjacency[u]:
            if dist[w] < 0:
                dist[w] = du
                queue.append(w)
    unreached = dist.count(-1)
    if unreached:
        raise UnreachableVertexError(
            f"{unreached} vertices unreachable from {origin}; graph is not connected"
        )
    return DistanceField(origin, tuple(dist))


def average_distance(g: Graph, origin: int) -> float:
    """Mean hop distance from ``origin`` over all other vertices."""
    if g.num_vertices < 2:
        raise ValidationError("average distance needs at least two vertices")
    field = bfs_distances(g, origin)
    return sum(field.dist) / (g.num_vertices - 1)


def shortest_path(g: Graph, field: DistanceField, target: int) -> List[int]:
    """
    Shortest path from ``field.origin`` to ``target``.

    Built backwards from ``target``, always stepping to the smallest-id
    neighbor one hop closer to the origin.
    """
    check_vertex(g, target, "target")
    path = [target]
    v = target
    dist = field.dist
    while v != field.origin:
        dv = dist[v] - 1
        v = min(u for u in g.adjacency[v] if dist[u] == dv)
        path.append(v)
    path.reverse()
    return path


def eccentricity(g: Graph, origin: int) -> int:
    """Largest hop distance from ``origin``."""
    return max(bfs_distances(g, origin).dist)


def diameter_estimate(g: Graph, samples: int = 16, seed: int = 0) -> int:
    """Lower estimate of the diameter: max eccentricity over sampled origins."""
    rng = np.random.default_rng(seed)
    count = min(samples, g.num_vertices)
    origins = rng.choice(g.num_vertices, size=count, replace=False)
    return max(eccentricity(g, int(v)) for v in origins)


def mean_degree(g: Graph) -> float:
    """Average vertex degree 2|E|/N."""
    return 2.0 * g.num_edges / g.num_vertices


def predicted_average_distance(num_vertices: int, edge_probability: float) -> float:
    """ln N / ln(Np), the asymptotic average distance of G(N, p)."""
    return math.log(num_vertices) / math.log(num_vertices * edge_probability)


def path_graph(num_vertices: int) -> Graph:
    """Path 0-1-...-(N-1)."""
    return Graph.from_edges(num_vertices, [(i, i + 1) for i in range(num_vertices - 1)])


def complete_graph(num_vertices: int) -> Graph:
    """Complete graph K_N."""
    edges: Sequence[Tuple[int, int]] = [
        (u, v) for u in range(num_vertices) for v in range(u + 1, num_vertices)
    ]
    return Graph.from_edges(num_vertices, edges)
