"""Mention and hashtag graphs, ego networks, structural metrics and Louvain communities."""

from __future__ import annotations

import csv
import enum
import itertools
from collections import Counter, defaultdict, deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from . import text as textutil
from .corpus import Corpus


class GraphError(ValueError):
    pass


class VertexNotFound(KeyError):
    pass


class HashtagCategory(str, enum.Enum):
    SUPPORTING = "Supporting"
    AGAINST = "Against"
    GENERAL = "General"
    IMPORTANT_TOPICS = "ImportantTopics"
    OTHER = "Other"


REPORTED_CATEGORIES = (HashtagCategory.SUPPORTING, HashtagCategory.AGAINST,
                       HashtagCategory.GENERAL, HashtagCategory.IMPORTANT_TOPICS)


@dataclass
class Graph:
    """Simple weighted graph. Undirected edge keys are stored with sorted endpoints."""

    directed: bool
    vertices: set[str] = field(default_factory=set)
    edges: dict[tuple[str, str], int] = field(default_factory=dict)
    labels: dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_edges(cls, edges: Iterable[tuple], directed: bool, vertices: Iterable[str] = ()):
        g = cls(directed)
        for v in vertices:
            g.add_vertex(v)
        for e in edges:
            g.add_edge(e[0], e[1], e[2] if len(e) > 2 else 1)
        return g

    def _key(self, u: str, v: str) -> tuple[str, str]:
        return (u, v) if self.directed or u <= v else (v, u)

    def add_vertex(self, v: str) -> None:
        self.vertices.add(v)

    def add_edge(self, u: str, v: str, weight: int = 1) -> None:
        if u == v:
            raise GraphError(f"self-loop on {u!r}")
        if weight < 1:
            raise GraphError("edge weights must be >= 1")
        self.vertices.update((u, v))
        k = self._key(u, v)
        self.edges[k] = self.edges.get(k, 0) + weight

    def has_edge(self, u: str, v: str) -> bool:
        return self._key(u, v) in self.edges

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    def order(self) -> list[str]:
        return sorted(self.vertices)

    def neighbors(self, v: str) -> set[str]:
        """All adjacent vertices, ignoring direction."""
        out = set()
        for a, b in self.edges:
            if a == v:
                out.add(b)
            elif b == v:
                out.add(a)
        return out

    def index_adjacency(self, undirected: bool = False) -> tuple[list[str], list[list[int]]]:
        names = self.order()
        idx = {v: i for i, v in enumerate(names)}
        nbrs: list[set[int]] = [set() for _ in names]
        for a, b in self.edges:
            nbrs[idx[a]].add(idx[b])
            if undirected or not self.directed:
                nbrs[idx[b]].add(idx[a])
        return names, [sorted(s) for s in nbrs]

    def subgraph(self, keep: Iterable[str]) -> "Graph":
        keep = set(keep)
        g = Graph(self.directed, set(keep), {}, {v: l for v, l in self.labels.items() if v in keep})
        for (a, b), w in self.edges.items():
            if a in keep and b in keep:
                g.edges[(a, b)] = w
        return g


# --------------------------------------------------------------------------- #
# construction
# --------------------------------------------------------------------------- #

def build_mention_graph(corpus: Corpus, include_retweet_head: bool = True) -> Graph:
    """Directed author -> mentioned-user graph; weight counts tweets, not occurrences."""
    g = Graph(directed=True)
    for r in corpus.records:
        src = r.user
        g.add_vertex(src)
        body = r.text if include_retweet_head else textutil.strip_retweet_head(r.text)
        for dst in sorted(set(textutil.mentions(body))):
            if dst != src:
                g.add_edge(src, dst)
    return g


def build_hashtag_graph(corpus: Corpus) -> Graph:
    """Undirected co-occurrence graph over case-folded hashtags."""
    g = Graph(directed=False)
    surface: dict[str, Counter] = defaultdict(Counter)
    for r in corpus.records:
        tags = set()
        for h in textutil.hashtags(r.text):
            k = h.casefold()
            surface[k][h] += 1
            tags.add(k)
        for t in tags:
            g.add_vertex(t)
        for a, b in itertools.combinations(sorted(tags), 2):
            g.add_edge(a, b)
    # most frequent surface form, ties broken alphabetically
    g.labels = {k: min(c.items(), key=lambda kv: (-kv[1], kv[0]))[0] for k, c in surface.items()}
    return g


# --------------------------------------------------------------------------- #
# ego networks and categories
# --------------------------------------------------------------------------- #

@dataclass
class EgoNetwork:
    ego: str
    graph: Graph
    categories: dict[str, HashtagCategory] | None = None

    @property
    def vertices(self) -> set[str]:
        return self.graph.vertices


def load_category_map(path: str | Path) -> dict[str, HashtagCategory]:
    out = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or row[0].startswith("//"):
                continue
            tag, cat = row[0].strip(), row[1].strip() if len(row) > 1 else ""
            if lineno == 1 and tag.lower() == "hashtag":
                continue
            try:
                category = HashtagCategory(cat)
            except ValueError:
                raise GraphError(f"{path}:{lineno}: unknown category {cat!r}") from None
            key = tag.casefold()
            if not key.startswith("#"):
                key = "#" + key
            if key in out and out[key] != category:
                raise GraphError(f"{path}:{lineno}: {tag} has two categories")
            out[key] = category
    return out


def ego_network(graph: Graph, vertex: str, category_map: Mapping[str, HashtagCategory] | None = None,
                keep: Iterable[HashtagCategory] | None = None) -> EgoNetwork:
    """One-step ego network. With ``keep``, neighbours outside those categories are dropped."""
    if vertex not in graph.vertices:
        folded = vertex.casefold()
        if folded not in graph.vertices:
            raise VertexNotFound(vertex)
        vertex = folded
    members = graph.neighbors(vertex) | {vertex}
    labels = None
    if category_map is not None:
        labels = {v: category_map[v] for v in members if v in category_map}
        if keep is not None:
            keep = set(keep)
            members = {v for v in members if v == vertex or labels.get(v) in keep}
            labels = {v: c for v, c in labels.items() if v in members}
    return EgoNetwork(vertex, graph.subgraph(members), labels)


def hashtag_category_shares(ego: EgoNetwork) -> dict[HashtagCategory, float]:
    """Percentage of labelled non-ego vertices in each reported category; Other is excluded."""
    if not ego.categories:
        raise GraphError("ego network has no category labels")
    counts = Counter(c for v, c in ego.categories.items()
                     if v != ego.ego and c != HashtagCategory.OTHER)
    total = sum(counts.values())
    if total == 0:
        raise GraphError("no labelled vertices in the reported categories")
    return {c: 100.0 * counts[c] / total for c in REPORTED_CATEGORIES}


# --------------------------------------------------------------------------- #
# metrics
# --------------------------------------------------------------------------- #

def density(graph: Graph) -> float:
    return density_from_counts(graph.n, graph.m, graph.directed)


def density_from_counts(n: int, m: int, directed: bool) -> float:
    if n < 2:
        raise GraphError("density is undefined for fewer than 2 vertices")
    pairs = n * (n - 1)
    return m / pairs if directed else 2 * m / pairs


def average_degree(graph: Graph) -> float:
    return average_degree_from_counts(graph.n, graph.m, graph.directed)


def average_degree_from_counts(n: int, m: int, directed: bool) -> float:
    if n < 1:
        raise GraphError("average degree needs at least one vertex")
    return m / n if directed else 2 * m / n


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a == b:
            return
        if self.size[a] < self.size[b]:
            a, b = b, a
        self.parent[b] = a
        self.size[a] += self.size[b]


def components(graph: Graph) -> list[int]:
    """Weakly connected component sizes, largest first."""
    names = graph.order()
    idx = {v: i for i, v in enumerate(names)}
    uf = _UnionFind(len(names))
    for a, b in graph.edges:
        uf.union(idx[a], idx[b])
    sizes = Counter(uf.find(i) for i in range(len(names)))
    return sorted(sizes.values(), reverse=True)


def degree_sequence(graph: Graph, mode: str) -> list[tuple[str, int]]:
    if graph.directed and mode not in ("in", "out"):
        raise GraphError("directed graphs take mode 'in' or 'out'")
    if not graph.directed and mode != "total":
        raise GraphError("undirected graphs take mode 'total'")
    deg = dict.fromkeys(graph.vertices, 0)
    for a, b in graph.edges:
        if mode in ("out", "total"):
            deg[a] += 1
        if mode in ("in", "total"):
            deg[b] += 1
    return sorted(deg.items())


def betweenness(graph: Graph, undirected: bool = False) -> dict[str, float]:
    """Raw Brandes betweenness on unweighted shortest paths.

    Directed graphs use directed paths unless ``undirected`` is set. For undirected
    traversal each unordered pair is counted once.
    """
    names, adj = graph.index_adjacency(undirected=undirected)
    n = len(names)
    cb = [0.0] * n
    for s in range(n):
        stack = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma = [0] * n
        sigma[s] = 1
        dist = [-1] * n
        dist[s] = 0
        q = deque([s])
        while q:
            v = q.popleft()
            stack.append(v)
            dv = dist[v] + 1
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dv
                    q.append(w)
                if dist[w] == dv:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * n
        while stack:
            w = stack.pop()
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                cb[w] += delta[w]
    if undirected or not graph.directed:
        cb = [c / 2.0 for c in cb]
    return dict(zip(names, cb))


# --------------------------------------------------------------------------- #
# communities
# --------------------------------------------------------------------------- #

@dataclass(frozen=True)
class CommunityAssignment:
    membership: dict[str, int]
    modularity: float

    @property
    def n_communities(self) -> int:
        return len(set(self.membership.values()))


def _weighted_undirected(graph: Graph) -> dict[tuple[str, str], float]:
    w: dict[tuple[str, str], float] = defaultdict(float)
    for (a, b), x in graph.edges.items():
        w[(a, b) if a <= b else (b, a)] += x
    return dict(w)


def modularity(graph: Graph, membership: Mapping[str, int], resolution: float = 1.0) -> float:
    """Newman modularity of a partition; digraphs are symmetrised with summed weights."""
    wedges = _weighted_undirected(graph)
    m = sum(wedges.values())
    if m == 0:
        return 0.0
    internal: dict[int, float] = defaultdict(float)
    tot: dict[int, float] = defaultdict(float)
    for (a, b), x in wedges.items():
        tot[membership[a]] += x
        tot[membership[b]] += x
        if membership[a] == membership[b]:
            internal[membership[a]] += x
    return sum(internal[c] / m - resolution * (tot[c] / (2 * m)) ** 2 for c in tot)


def _one_level(adj: list[dict[int, float]], loops: list[float], m2: float, resolution: float,
               rng: np.random.Generator) -> list[int]:
    n = len(adj)
    k = [sum(a.values()) + 2 * loops[i] for i, a in enumerate(adj)]
    comm = list(range(n))
    tot = list(k)
    improved = True
    while improved:
        improved = False
        for i in rng.permutation(n):
            ci = comm[i]
            links: dict[int, float] = defaultdict(float)
            for j, w in adj[i].items():
                links[comm[j]] += w
            tot[ci] -= k[i]
            best, best_gain = ci, links.get(ci, 0.0) - resolution * tot[ci] * k[i] / m2
            for c in sorted(links):
                gain = links[c] - resolution * tot[c] * k[i] / m2
                if gain > best_gain + 1e-12:
                    best, best_gain = c, gain
            tot[best] += k[i]
            if best != ci:
                comm[i] = best
                improved = True
    return comm


def detect_communities(graph: Graph, resolution: float = 1.0, seed: int = 0) -> CommunityAssignment:
    """Louvain modularity optimisation; deterministic for a given seed."""
    names = graph.order()
    idx = {v: i for i, v in enumerate(names)}
    rng = np.random.default_rng(seed)
    adj: list[dict[int, float]] = [defaultdict(float) for _ in names]
    for (a, b), w in _weighted_undirected(graph).items():
        adj[idx[a]][idx[b]] += w
        adj[idx[b]][idx[a]] += w
    loops = [0.0] * len(names)
    m2 = 2.0 * sum(_weighted_undirected(graph).values())
    node_comm = list(range(len(names)))
    if m2 > 0:
        while True:
            comm = _one_level(adj, loops, m2, resolution, rng)
            relabel = {c: i for i, c in enumerate(sorted(set(comm)))}
            comm = [relabel[c] for c in comm]
            if len(relabel) == len(adj):
                break
            node_comm = [comm[c] for c in node_comm]
            new_adj: list[dict[int, float]] = [defaultdict(float) for _ in relabel]
            new_loops = [0.0] * len(relabel)
            for i, a in enumerate(adj):
                new_loops[comm[i]] += loops[i]
                for j, w in a.items():
                    if comm[i] == comm[j]:
                        new_loops[comm[i]] += w / 2.0
                    else:
                        new_adj[comm[i]][comm[j]] += w
            adj, loops = new_adj, new_loops
    # canonical ids: order communities by their smallest member name
    first: dict[int, str] = {}
    for v, c in zip(names, node_comm):
        first.setdefault(c, v)
    order = {c: i for i, c in enumerate(sorted(first, key=first.get))}
    membership = {v: order[c] for v, c in zip(names, node_comm)}
    return CommunityAssignment(membership, modularity(graph, membership, resolution))


# --------------------------------------------------------------------------- #
# summaries and export
# --------------------------------------------------------------------------- #

def graph_stats(graph: Graph) -> dict:
    comps = components(graph)
    out = {"vertices": graph.n, "edges": graph.m, "directed": graph.directed,
           "components": len(comps), "largest_component": comps[0] if comps else 0,
           "average_degree": average_degree(graph) if graph.n else 0.0,
           "density": density(graph) if graph.n >= 2 else None}
    return out


def write_edge_list(graph: Graph, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["src", "dst", "weight", "directed"])
        for (a, b), x in sorted(graph.edges.items()):
            w.writerow([a, b, x, int(graph.directed)])


def to_networkx(graph: Graph, categories: Mapping[str, HashtagCategory] | None = None,
                communities: Mapping[str, int] | None = None):
    import networkx as nx

    g = nx.DiGraph() if graph.directed else nx.Graph()
    for v in graph.order():
        attrs = {"label": graph.labels.get(v, v)}
        if categories and v in categories:
            attrs["category"] = categories[v].value
        if communities and v in communities:
            attrs["community"] = int(communities[v])
        g.add_node(v, **attrs)
    for (a, b), x in sorted(graph.edges.items()):
        g.add_edge(a, b, weight=x)
    return g


def write_graphml(graph: Graph, path: str | Path, categories=None, communities=None) -> None:
    import networkx as nx

    nx.write_graphml(to_networkx(graph, categories, communities), str(path))
