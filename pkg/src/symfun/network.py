"""Network descriptions shared by the tree and general-graph code.

File schema (JSON)::

    {"nodes": [{"id": 0, "alphabet": 2}, ...],
     "edges": [[0, 1], ...],
     "root": 0}

``alphabet`` is the number of letters ``l_i``; node ``i`` measures a value
in ``0..l_i-1``. ``root`` is optional and only used by trees.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from .errors import NetworkError

Edge = tuple[int, int]


def norm_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Network:
    alphabets: dict[int, int]
    edges: tuple[Edge, ...]
    root: Optional[int] = None

    def __post_init__(self):
        for node, l in self.alphabets.items():
            if l < 2:
                raise NetworkError(f"node {node}: alphabet size must be >= 2, got {l}")
        seen = set()
        for u, v in self.edges:
            if u == v:
                raise NetworkError(f"self-loop at node {u}")
            if u not in self.alphabets or v not in self.alphabets:
                raise NetworkError(f"edge ({u}, {v}) references an unknown node")
            e = norm_edge(u, v)
            if e in seen:
                raise NetworkError(f"duplicate edge {e}")
            seen.add(e)
        object.__setattr__(self, "edges", tuple(sorted(seen)))
        if self.root is not None and self.root not in self.alphabets:
            raise NetworkError(f"root {self.root} is not a node")
        if not self.is_connected():
            raise NetworkError("network is not connected")

    @property
    def nodes(self) -> tuple[int, ...]:
        return tuple(sorted(self.alphabets))

    @property
    def n(self) -> int:
        return len(self.alphabets)

    def max_value(self, node: int) -> int:
        return self.alphabets[node] - 1

    def max_sum(self, nodes: Optional[Iterable[int]] = None) -> int:
        """Largest achievable sum over ``nodes`` (all nodes by default)."""
        nodes = self.alphabets if nodes is None else nodes
        return sum(self.alphabets[i] - 1 for i in nodes)

    def neighbors(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {i: [] for i in self.alphabets}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        for lst in adj.values():
            lst.sort()
        return adj

    def is_connected(self) -> bool:
        if not self.alphabets:
            return False
        adj = self.neighbors()
        start = self.nodes[0]
        seen = {start}
        queue = deque([start])
        while queue:
            for w in adj[queue.popleft()]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == len(self.alphabets)

    def is_tree(self) -> bool:
        return len(self.edges) == self.n - 1

    def is_complete(self) -> bool:
        return len(self.edges) == self.n * (self.n - 1) // 2

    def to_dict(self) -> dict:
        out = {
            "nodes": [{"id": i, "alphabet": self.alphabets[i]} for i in self.nodes],
            "edges": [list(e) for e in self.edges],
        }
        if self.root is not None:
            out["root"] = self.root
        return out


def network_from_dict(obj: dict, source: str = "<network>") -> Network:
    if not isinstance(obj, dict):
        raise NetworkError(f"{source}: top level must be an object")
    try:
        raw_nodes = obj["nodes"]
        raw_edges = obj["edges"]
    except KeyError as exc:
        raise NetworkError(f"{source}: missing key {exc.args[0]!r}") from None
    alphabets: dict[int, int] = {}
    for pos, item in enumerate(raw_nodes):
        try:
            node, l = int(item["id"]), int(item.get("alphabet", 2))
        except (KeyError, TypeError, ValueError, AttributeError):
            raise NetworkError(f"{source}: nodes[{pos}] must look like {{\"id\": 0, \"alphabet\": 2}}") from None
        if node in alphabets:
            raise NetworkError(f"{source}: node id {node} appears twice")
        alphabets[node] = l
    edges = []
    for pos, item in enumerate(raw_edges):
        try:
            u, v = (int(x) for x in item)
        except (TypeError, ValueError):
            raise NetworkError(f"{source}: edges[{pos}] must be a pair of node ids") from None
        edges.append((u, v))
    root = obj.get("root")
    try:
        return Network(alphabets, tuple(edges), None if root is None else int(root))
    except NetworkError as exc:
        raise NetworkError(f"{source}: {exc}") from None


def load_network(path) -> Network:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise NetworkError(f"{path}: {exc.strerror}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        line = text.splitlines()[exc.lineno - 1] if text.splitlines() else ""
        raise NetworkError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}\n    {line}") from None
    return network_from_dict(obj, str(path))


def complete_graph(n: int, alphabet: int = 2) -> Network:
    return Network({i: alphabet for i in range(n)},
                   tuple((i, j) for i in range(n) for j in range(i + 1, n)))


def path_graph(alphabets: Iterable[int], first_id: int = 0) -> Network:
    ls = list(alphabets)
    ids = range(first_id, first_id + len(ls))
    return Network(dict(zip(ids, ls)), tuple((i, i + 1) for i in ids[:-1]))


def star_graph(leaves: int, alphabet: int = 2, center: int = 0) -> Network:
    others = [i for i in range(leaves + 1) if i != center]
    return Network({i: alphabet for i in range(leaves + 1)}, tuple((center, j) for j in others))
