"""
Memory deployments on a network with a single content source.

A deployment places memory units on some vertices. Traffic from the source
S to a destination D either follows a shortest path, or is compressed by the
memorization gain g on its way to a memory μ, decoded there, and forwarded
to D. The cheaper of the two in bit×hop is the effective distance of D.
"""

import heapq
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import numpy as np

from .exceptions import UnknownMemoryError, ValidationError
from .random_graph import DistanceField, Graph, bfs_distances, check_vertex, shortest_path

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Deployment:
    """
    A graph, its source, the memory vertices and the per-link memorization gain.

    Attributes:
        graph: Connected network
        source: Source vertex S
        memories: Sorted distinct memory vertices, never containing S
        gain: Memorization gain g >= 1 (g == 1 only makes sense in degenerate checks)
        flows: Optional per-vertex demand f_D; None means unit demand everywhere.
            The entry at S is ignored.
    """

    graph: Graph
    source: int
    memories: Tuple[int, ...] = ()
    gain: float = 1.25
    flows: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        n = self.graph.num_vertices
        if not 0 <= self.source < n:
            raise ValidationError(f"source {self.source} outside 0..{n - 1}")
        memories = tuple(sorted(int(m) for m in self.memories))
        if len(set(memories)) != len(memories):
            raise ValidationError("memories must be distinct")
        if memories and not (0 <= memories[0] and memories[-1] < n):
            raise ValidationError("memory vertex outside the graph")
        if self.source in memories:
            raise ValidationError("the source cannot hold a memory")
        if not self.gain >= 1:
            raise ValidationError(f"gain must be >= 1, got {self.gain}")
        object.__setattr__(self, 'memories', memories)
        if self.flows is not None:
            flows = tuple(float(f) for f in self.flows)
            if len(flows) != n:
                raise ValidationError(f"flows must have {n} entries, got {len(flows)}")
            if any(f < 0 for f in flows):
                raise ValidationError("flows must be nonnegative")
            object.__setattr__(self, 'flows', flows)

    @property
    def num_memories(self) -> int:
        return len(self.memories)

    def destinations(self) -> List[int]:
        """Every vertex except S."""
        return [v for v in range(self.graph.num_vertices) if v != self.source]

    def flow(self, dest: int) -> float:
        return 1.0 if self.flows is None else self.flows[dest]

    def with_memories(self, memories: Iterable[int]) -> 'Deployment':
        return Deployment(self.graph, self.source, tuple(memories), self.gain, self.flows)

    def with_gain(self, gain: float) -> 'Deployment':
        return Deployment(self.graph, self.source, self.memories, gain, self.flows)


@dataclass(frozen=True)
class EffectiveDistanceField:
    """
    Per-vertex effective distance, chosen memory and D1 membership.

    Entries at the source are 0 / None / False.
    """

    source: int
    direct_dist: Tuple[int, ...]
    eff_dist: Tuple[float, ...]
    chosen_memory: Tuple[Optional[int], ...]
    in_d1: Tuple[bool, ...]

    @property
    def d1(self) -> List[int]:
        """Destinations that route through a memory."""
        return [v for v, flag in enumerate(self.in_d1) if flag]

    @property
    def d2(self) -> List[int]:
        """Destinations that keep their plain shortest path."""
        return [v for v, flag in enumerate(self.in_d1) if not flag and v != self.source]


@dataclass(frozen=True)
class FlowSummary:
    """Total bit×hop flow without and with memories, and their ratio G."""

    flow_no_mem: float
    flow_with_mem: float
    net_gain: float
    num_benefiting: int = 0
    num_destinations: int = 0


@dataclass(frozen=True)
class BenefitSet:
    """Vertices v with d(S,μ)/g + d(μ,v) <= d(S,v); radius_used is None when unbounded."""

    memory: int
    members: FrozenSet[int]
    radius_used: Optional[int] = None

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, v: int) -> bool:
        return v in self.members


@dataclass
class EvaluationContext:
    """
    Per-task cache of BFS fields for one deployment.

    Create one per evaluation; it is not safe to share between workers.
    """

    deployment: Deployment
    _source_field: Optional[DistanceField] = field(default=None, repr=False)
    _memory_fields: Dict[int, DistanceField] = field(default_factory=dict, repr=False)
    _search: Optional[Tuple[List[float], List[int]]] = field(default=None, repr=False)

    def source_distances(self) -> DistanceField:
        if self._source_field is None:
            self._source_field = bfs_distances(self.deployment.graph, self.deployment.source)
        return self._source_field

    def memory_distances(self, memory: int) -> DistanceField:
        if memory not in self._memory_fields:
            self._memory_fields[memory] = bfs_distances(self.deployment.graph, memory)
        return self._memory_fields[memory]

    def memory_search(self) -> Tuple[List[float], List[int]]:
        """
        Best memory-routed cost and memory per vertex.

        Returns ``(cost, memory)`` lists where ``cost[v]`` is
        min over μ of d(S,μ)/g + d(μ,v), ties going to the smallest μ, and
        ``memory[v]`` is that μ (-1 and inf when there are no memories).
        """
        if self._search is None:
            self._search = _multi_source_search(self.deployment, self.source_distances())
        return self._search


def _multi_source_search(dep: Deployment, source_field: DistanceField) -> Tuple[List[float], List[int]]:
    # Label-setting search seeded at every memory with offset d(S,μ)/g.
    # Keys (cost, memory id) grow by one hop per edge, so the first label
    # settled at v is the lexicographic minimum over all memories.
    n = dep.graph.num_vertices
    adjacency = dep.graph.adjacency
    offset = {mu: source_field[mu] / dep.gain for mu in dep.memories}
    best_cost = [math.inf] * n
    best_mem = [-1] * n
    heap = [(offset[mu], mu, 0, mu) for mu in dep.memories]
    heapq.heapify(heap)
    while heap:
        cost, mu, hops, v = heapq.heappop(heap)
        if best_mem[v] >= 0:
            continue
        best_cost[v] = cost
        best_mem[v] = mu
        base = offset[mu]
        next_hops = hops + 1
        for w in adjacency[v]:
            if best_mem[w] < 0:
                heapq.heappush(heap, (base + next_hops, mu, next_hops, w))
    return best_cost, best_mem


def effective_distances(dep: Deployment, ctx: Optional[EvaluationContext] = None) -> EffectiveDistanceField:
    """
    Effective distance of every destination.

    d̂_D = min(d(S,D), min over μ of d(S,μ)/g + d(μ,D)). The memory branch is
    taken only when it is strictly cheaper.
    """
    ctx = ctx or EvaluationContext(dep)
    direct = ctx.source_distances().dist
    best_cost, best_mem = ctx.memory_search()
    eff: List[float] = []
    chosen: List[Optional[int]] = []
    in_d1: List[bool] = []
    for v in range(dep.graph.num_vertices):
        if v != dep.source and best_cost[v] < direct[v]:
            eff.append(best_cost[v])
            chosen.append(best_mem[v])
            in_d1.append(True)
        else:
            eff.append(float(direct[v]))
            chosen.append(None)
            in_d1.append(False)
    return EffectiveDistanceField(dep.source, direct, tuple(eff), tuple(chosen), tuple(in_d1))


def effective_walk(dep: Deployment, dest: int, ctx: Optional[EvaluationContext] = None) -> List[int]:
    """
    Lowest-cost walk from S to ``dest``.

    For a destination in D1 this is a shortest path S→μ_D followed by a
    shortest path μ_D→dest, which may revisit vertices.
    """
    check_vertex(dep.graph, dest, "destination")
    if dest == dep.source:
        raise ValidationError("the source is not a destination")
    ctx = ctx or EvaluationContext(dep)
    g = dep.graph
    fields = effective_distances(dep, ctx)
    source_field = ctx.source_distances()
    mu = fields.chosen_memory[dest]
    if mu is None:
        return shortest_path(g, source_field, dest)
    to_memory = shortest_path(g, source_field, mu)
    from_memory = shortest_path(g, ctx.memory_distances(mu), dest)
    return to_memory + from_memory[1:]


def total_flow(dep: Deployment, ctx: Optional[EvaluationContext] = None) -> FlowSummary:
    """
    Total bit×hop flow F0 without memory, F with memory, and G = F0/F.

    Raises:
        ValidationError: If every destination has zero demand.
    """
    ctx = ctx or EvaluationContext(dep)
    fields = effective_distances(dep, ctx)
    f0 = 0.0
    f = 0.0
    benefiting = 0
    destinations = 0
    for v in range(dep.graph.num_vertices):
        if v == dep.source:
            continue
        demand = dep.flow(v)
        f0 += demand * fields.direct_dist[v]
        f += demand * fields.eff_dist[v]
        destinations += 1
        if fields.in_d1[v]:
            benefiting += 1
    if f0 <= 0:
        raise ValidationError("total flow without memory is zero; no destination has demand")
    return FlowSummary(f0, f, f0 / f, benefiting, destinations)


def network_gain(dep: Deployment, ctx: Optional[EvaluationContext] = None) -> float:
    """G = F0 / F."""
    return total_flow(dep, ctx).net_gain


def benefit_set(
    dep: Deployment,
    memory: int,
    ctx: Optional[EvaluationContext] = None,
    radius: Optional[int] = None,
) -> BenefitSet:
    """
    Vertices that gain from routing through ``memory``.

    With ``radius`` set, only vertices within that many hops of the memory are kept.

    Raises:
        UnknownMemoryError: If ``memory`` is not deployed.
    """
    if memory not in dep.memories:
        raise UnknownMemoryError(f"vertex {memory} holds no memory")
    ctx = ctx or EvaluationContext(dep)
    d_source = ctx.source_distances().dist
    d_memory = ctx.memory_distances(memory).dist
    offset = d_source[memory] / dep.gain
    members = {
        v for v in range(dep.graph.num_vertices)
        if offset + d_memory[v] <= d_source[v] and (radius is None or d_memory[v] <= radius)
    }
    return BenefitSet(memory, frozenset(members), radius)


def coverage_fraction(dep: Deployment, ctx: Optional[EvaluationContext] = None) -> float:
    """Fraction of destinations lying in the union of all benefit sets."""
    ctx = ctx or EvaluationContext(dep)
    d_source = ctx.source_distances().dist
    best_cost, _ = ctx.memory_search()
    covered = sum(
        1 for v in range(dep.graph.num_vertices)
        if v != dep.source and best_cost[v] <= d_source[v]
    )
    return covered / (dep.graph.num_vertices - 1)


def vertex_boundary(g: Graph, vset: Iterable[int]) -> Set[int]:
    """Vertices outside ``vset`` adjacent to some vertex inside it."""
    inside = set(vset)
    if not inside:
        raise ValidationError("vertex set must be nonempty")
    boundary: Set[int] = set()
    for v in inside:
        check_vertex(g, v)
        boundary.update(g.adjacency[v])
    return boundary - inside


def deploy_uniform(graph: Graph, source: int, num_memories: int, gain: float, seed: int) -> Deployment:
    """Place ``num_memories`` memories uniformly without replacement on V minus S."""
    candidates = np.array([v for v in range(graph.num_vertices) if v != source])
    if not 0 <= num_memories <= len(candidates):
        raise ValidationError(f"cannot place {num_memories} memories on {len(candidates)} vertices")
    rng = np.random.default_rng(seed)
    chosen = rng.choice(candidates, size=num_memories, replace=False)
    return Deployment(graph, source, tuple(int(v) for v in chosen), gain)
