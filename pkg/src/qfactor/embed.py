"""Chimera hardware graphs, minor embeddings and physical parameters"""

import logging
from collections import namedtuple
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import dwave_networkx as dnx
import networkx as nx
import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra

from .ising import IsingModel
from .solve import SampleSet, collect
from .util import (
    LOGGER_NAME,
    InvalidEmbedding,
    NoEmbeddingFound,
    Number,
    TooLarge,
)

logger = logging.getLogger(LOGGER_NAME)

CHAIN_LENGTH = 4
HEURISTIC_TRIES = 16
REROUTE_ROUNDS = 64
SHRINK_ROUNDS = 2
# caps size**usage well inside float range
MAX_OVERLAP_POWER = 16

Edge = Tuple[int, int]

# chimera shores
VERTICAL = 0
HORIZONTAL = 1


class ChimeraGraph(namedtuple("ChimeraGraph", ["m", "n", "t", "graph"])):
    @property
    def adjacency(self) -> frozenset:
        return frozenset(tuple(sorted(e)) for e in self.graph.edges)

    def linear(self, row: int, col: int, shore: int, k: int) -> int:
        return dnx.chimera_coordinates(self.m, self.n, self.t).chimera_to_linear(
            (row, col, shore, k)
        )


class Embedding(namedtuple("Embedding", ["chains", "chain_edges", "logical_edges"])):
    """
    chains: logical spin -> frozenset of qubits; chain_edges: logical spin ->
    hardware edges inside its chain; logical_edges: coupled pair -> hardware
    edges joining the two chains.
    """

    @property
    def qubits(self) -> List[int]:
        return sorted(q for chain in self.chains.values() for q in chain)


def build_chimera(m: int, n: int, t: int) -> ChimeraGraph:
    if min(m, n, t) < 1:
        raise ValueError(f"Chimera dimensions must be positive, got ({m}, {n}, {t})")
    return ChimeraGraph(m, n, t, dnx.chimera_graph(m, n, t))


def _edges_between(graph: nx.Graph, a: Iterable[int], b: frozenset) -> List[Edge]:
    return sorted(
        tuple(sorted((u, v))) for u in a for v in graph.neighbors(u) if v in b
    )


def make_embedding(
    model: IsingModel, chains: Mapping[int, Iterable[int]], hw: ChimeraGraph
) -> Embedding:
    chains = {v: frozenset(chains[v]) for v in sorted(chains)}
    chain_edges = {
        v: tuple(sorted(tuple(sorted(e)) for e in hw.graph.subgraph(chain).edges))
        for v, chain in chains.items()
    }
    logical_edges = {
        (i, j): tuple(_edges_between(hw.graph, chains[i], chains[j]))
        for (i, j) in model.J
        if i in chains and j in chains
    }
    emb = Embedding(chains, chain_edges, logical_edges)
    validate_embedding(model, emb, hw)
    return emb


def validate_embedding(model: IsingModel, emb: Embedding, hw: ChimeraGraph):
    missing = set(range(model.n_spins)) - set(emb.chains)
    if missing:
        raise InvalidEmbedding(f"Spins {sorted(missing)} have no chain")
    seen: Dict[int, int] = {}
    for v, chain in emb.chains.items():
        if not chain:
            raise InvalidEmbedding(f"Chain of spin {v} is empty")
        if not chain <= set(hw.graph.nodes):
            raise InvalidEmbedding(f"Chain of spin {v} leaves the hardware graph")
        if not nx.is_connected(hw.graph.subgraph(chain)):
            raise InvalidEmbedding(f"Chain of spin {v} is disconnected")
        for q in chain:
            if q in seen:
                raise InvalidEmbedding(f"Qubit {q} is in chains {seen[q]} and {v}")
            seen[q] = v
    for pair in model.J:
        if not emb.logical_edges.get(pair):
            raise InvalidEmbedding(f"Coupling {pair} has no hardware edge")


def embed_grouped(
    model: IsingModel, hw: ChimeraGraph, chain_length: int = CHAIN_LENGTH
) -> Embedding:
    """
    Native clique layout: spin v = k·t + r gets qubit r of the vertical shore
    in column k, rows 0..k, joined inside cell (k, k) to qubit r of the
    horizontal shore in row k, columns k..G−1, where G = chain_length − 1.
    Chains of different groups cross in exactly one cell.
    """
    if chain_length < 2:
        raise ValueError(f"Chain length must be at least 2, got {chain_length}")
    groups = chain_length - 1
    capacity = hw.t * groups
    if model.n_spins > capacity or min(hw.m, hw.n) < groups:
        raise TooLarge(
            f"{model.n_spins} spins exceed the {capacity}-spin grouped layout"
            f" on a {hw.m}x{hw.n} chimera"
        )
    chains = {}
    for v in range(model.n_spins):
        k, r = divmod(v, hw.t)
        vertical = [hw.linear(row, k, VERTICAL, r) for row in range(k + 1)]
        horizontal = [hw.linear(k, col, HORIZONTAL, r) for col in range(k, groups)]
        chains[v] = vertical + horizontal
    return make_embedding(model, chains, hw)


def logical_graph(model: IsingModel) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(range(model.n_spins))
    graph.add_edges_from(model.J)
    return graph


def _placement_order(graph: nx.Graph, rng: np.random.Generator) -> List[int]:
    """each next spin has the most already-placed neighbours, ties at random"""
    order: List[int] = []
    placed = set()
    remaining = list(graph.nodes)
    while remaining:
        scores = [sum(u in placed for u in graph.neighbors(v)) for v in remaining]
        best = max(scores)
        ties = [v for v, s in zip(remaining, scores) if s == best]
        choice = ties[int(rng.integers(len(ties)))]
        order.append(choice)
        placed.add(choice)
        remaining.remove(choice)
    return order


class Router:
    """
    Node-weighted shortest paths over the hardware graph. Entering qubit q
    costs size**usage[q], so routes through qubits other chains hold are
    allowed but priced out whenever a free detour exists.
    """

    def __init__(self, hw: ChimeraGraph):
        edges = np.array(sorted(hw.adjacency), dtype=np.int64).reshape(-1, 2)
        self.size = hw.graph.number_of_nodes()
        self.heads = np.concatenate([edges[:, 0], edges[:, 1]])
        self.tails = np.concatenate([edges[:, 1], edges[:, 0]])
        self.usage = np.zeros(self.size, dtype=np.int64)

    def weights(self) -> np.ndarray:
        return float(self.size) ** np.minimum(self.usage, MAX_OVERLAP_POWER)

    def hold(self, chain: Iterable[int], count: int = 1):
        self.usage[list(chain)] += count

    def overlapped(self) -> bool:
        return bool(self.size) and int(self.usage.max()) > 1

    def route(
        self,
        sources: Sequence[frozenset],
        rng: np.random.Generator,
    ) -> Optional[frozenset]:
        """cheapest chain touching every source chain, None when unreachable"""
        weights = self.weights()
        if not sources:
            lowest = np.flatnonzero(self.usage == self.usage.min())
            return frozenset([int(rng.choice(lowest))])
        matrix = sp.csr_matrix(
            (weights[self.tails], (self.heads, self.tails)),
            shape=(self.size, self.size),
        )
        cost = weights.copy()
        trees = []
        for chain in sources:
            start = np.fromiter(sorted(chain), dtype=np.int64)
            dist, pred, _ = dijkstra(
                matrix, indices=start, return_predecessors=True, min_only=True
            )
            inside = np.zeros(self.size, dtype=bool)
            inside[start] = True
            # dist already counts the root's own weight
            cost += np.where(inside, 0.0, dist - weights)
            trees.append((inside, pred))
        if not np.isfinite(cost.min()):
            return None
        ties = np.flatnonzero(cost == cost.min())
        root = int(rng.choice(ties))
        chain = {root}
        for inside, pred in trees:
            q = root
            while not inside[q]:
                chain.add(q)
                q = int(pred[q])
        return frozenset(chain)


def _reroute(
    graph: nx.Graph,
    router: Router,
    chains: Dict[int, frozenset],
    v: int,
    rng: np.random.Generator,
) -> bool:
    sources = [chains[u] for u in sorted(graph.neighbors(v)) if u in chains]
    chain = router.route(sources, rng)
    if chain is None:
        return False
    chains[v] = chain
    router.hold(chain)
    return True


def _grow(
    graph: nx.Graph, hw: ChimeraGraph, rng: np.random.Generator, rounds: int
) -> Optional[Dict[int, frozenset]]:
    """
    Place every spin with overlaps allowed, then rip up and reroute one chain
    at a time in random order until no qubit is shared. A few more passes
    then keep a rerouted chain only when it is disjoint and no longer.
    """
    router = Router(hw)
    chains: Dict[int, frozenset] = {}
    for v in _placement_order(graph, rng):
        if not _reroute(graph, router, chains, v, rng):
            return None
    for done in range(rounds):
        if not router.overlapped():
            logger.debug(f"chains disjoint after {done} reroute passes")
            break
        for v in rng.permutation(sorted(graph.nodes)).tolist():
            router.hold(chains.pop(v), -1)
            if not _reroute(graph, router, chains, v, rng):
                return None
    if router.overlapped():
        return None

    for _ in range(SHRINK_ROUNDS):
        for v in rng.permutation(sorted(graph.nodes)).tolist():
            old = chains.pop(v)
            router.hold(old, -1)
            if not _reroute(graph, router, chains, v, rng):
                return None
            if router.overlapped() or len(chains[v]) > len(old):
                router.hold(chains[v], -1)
                chains[v] = old
                router.hold(old)
    return chains


def embed_heuristic(
    model: IsingModel,
    hw: ChimeraGraph,
    seed: Optional[int] = None,
    tries: int = HEURISTIC_TRIES,
    rounds: int = REROUTE_ROUNDS,
) -> Embedding:
    """
    Randomized chain growth with rip-up and reroute, each restart seeded by
    (seed, k).
    """
    graph = logical_graph(model)
    seed = 0 if seed is None else seed
    for attempt in range(tries):
        rng = np.random.default_rng([seed, attempt])
        chains = _grow(graph, hw, rng, rounds)
        if chains is None:
            logger.debug(f"heuristic embedding attempt {attempt} failed")
            continue
        emb = make_embedding(model, chains, hw)
        logger.debug(
            f"heuristic embedding after {attempt + 1} attempts,"
            f" {len(emb.qubits)} qubits"
        )
        return emb
    logger.warning(f"no embedding of {model.n_spins} spins within {tries} attempts")
    raise NoEmbeddingFound(
        f"No embedding of {model.n_spins} spins on a {hw.m}x{hw.n}x{hw.t} chimera"
        f" after {tries} attempts"
    )


def default_chain_strength(model: IsingModel) -> Fraction:
    return model.max_parameter() or Fraction(1)


def bounded_chain_strength(model: IsingModel) -> Fraction:
    """
    exceeds every spin's total field and coupling weight, so ground states
    keep chains intact
    """
    weight = [abs(v) for v in model.h]
    for (i, j), value in model.J.items():
        weight[i] += abs(value)
        weight[j] += abs(value)
    return max(weight, default=Fraction(0)) + 1


def set_parameters(
    model: IsingModel,
    emb: Embedding,
    hw: ChimeraGraph,
    chain_strength: Optional[Number] = None,
    split: bool = False,
) -> IsingModel:
    validate_embedding(model, emb, hw)
    strength = (
        default_chain_strength(model)
        if chain_strength is None
        else Fraction(chain_strength)
    )
    qubits = emb.qubits
    index = {q: k for k, q in enumerate(qubits)}
    h = [Fraction(0)] * len(qubits)
    J: Dict[Edge, Fraction] = {}
    for v, chain in emb.chains.items():
        for q in chain:
            h[index[q]] = model.h[v] / len(chain)
        for a, b in emb.chain_edges[v]:
            J[(index[a], index[b])] = -strength
    for pair, value in model.J.items():
        carriers = emb.logical_edges[pair] if split else emb.logical_edges[pair][:1]
        for a, b in carriers:
            J[(index[a], index[b])] = value / len(carriers)
    n_chain_edges = sum(len(edges) for edges in emb.chain_edges.values())
    logger.debug(
        f"physical model: {len(qubits)} qubits, chain strength {strength},"
        f" {n_chain_edges} chain edges"
    )
    return IsingModel(
        len(qubits), h, J, model.offset + strength * n_chain_edges, labels=qubits
    )


def unembed(sample: Mapping[int, int], emb: Embedding) -> Tuple[Tuple[int, ...], int]:
    """majority vote per chain, ties to +1, with the number of broken chains"""
    spins = []
    breaks = 0
    for v in sorted(emb.chains):
        votes = [sample[q] for q in emb.chains[v]]
        if len(set(votes)) > 1:
            breaks += 1
        spins.append(1 if sum(votes) >= 0 else -1)
    return tuple(spins), breaks


def embedding_json(emb: Embedding) -> Dict[str, List[int]]:
    return {str(v): sorted(chain) for v, chain in emb.chains.items()}


def unembed_sampleset(
    ss: SampleSet, emb: Embedding, model: IsingModel
) -> Tuple[SampleSet, int]:
    """physical records mapped to logical spins by majority vote, plus broken chains"""
    states: List[Tuple[int, ...]] = []
    breaks = 0
    for record in ss.records:
        spins, broken = unembed(dict(zip(emb.qubits, record.spins)), emb)
        states.extend([spins] * record.count)
        breaks += broken * record.count
    if breaks:
        logger.debug(f"{breaks} broken chains over {len(states)} samples")
    return collect(model, states, ss.info), breaks
