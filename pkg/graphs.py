"""
Instance generation and the plain-text instance format.

File format (Biq Mac style): a header line "n m" followed by m lines "u v w"
with 1-based vertices and integer weights. Blank lines and lines starting
with '#' are ignored.
"""
import logging
from pathlib import Path
from typing import List, Optional, Set, Tuple, Union

import networkx as nx
import numpy as np
from pydantic import ValidationError

from modspace import Graph


GRAPH_KINDS = ("3regular", "erdos_renyi")
WEIGHT_KINDS = ("unit", "pm1")
MAX_ATTEMPTS = 10000


class GraphFormatError(ValueError):
    pass


def _pairing_attempt(n: int, degree: int, rng: np.random.Generator) -> Optional[Set[Tuple[int, int]]]:
    """One pass of the configuration model; None on a self-loop or repeated pair."""
    stubs = np.repeat(np.arange(1, n + 1), degree)
    rng.shuffle(stubs)
    edges: Set[Tuple[int, int]] = set()
    for s1, s2 in zip(stubs[0::2], stubs[1::2]):
        s1, s2 = int(min(s1, s2)), int(max(s1, s2))
        if s1 == s2 or (s1, s2) in edges:
            return None
        edges.add((s1, s2))
    return edges


def random_regular_edges(n: int, degree: int, rng: np.random.Generator) -> List[Tuple[int, int]]:
    """Simple connected d-regular graph by rejection on the pairing model."""
    if (n * degree) % 2:
        raise ValueError(f"[Graphs] n * d must be even, got n={n}, d={degree}")
    if not 0 <= degree < n:
        raise ValueError(f"[Graphs] need 0 <= d < n, got n={n}, d={degree}")
    for attempt in range(1, MAX_ATTEMPTS + 1):
        edges = _pairing_attempt(n, degree, rng)
        if edges is None:
            continue
        candidate = nx.Graph()
        candidate.add_nodes_from(range(1, n + 1))
        candidate.add_edges_from(edges)
        if nx.is_connected(candidate):
            logging.debug(f"[Graphs] {degree}-regular graph on {n} vertices after {attempt} attempts")
            return sorted(edges)
    raise RuntimeError(f"[Graphs] no simple connected {degree}-regular graph on {n} vertices "
                       f"after {MAX_ATTEMPTS} attempts")


def erdos_renyi_edges(n: int, p: float, rng: np.random.Generator) -> List[Tuple[int, int]]:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"[Graphs] edge probability must lie in [0, 1], got {p}")
    return [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1) if rng.random() < p]


def gen_graph(n: int, kind: str = "3regular", seed: int = 0, p: float = 0.5,
              weights: str = "unit") -> Graph:
    if kind not in GRAPH_KINDS:
        raise ValueError(f"[Graphs] unknown graph kind {kind!r}; choose from {GRAPH_KINDS}")
    if weights not in WEIGHT_KINDS:
        raise ValueError(f"[Graphs] unknown weight kind {weights!r}; choose from {WEIGHT_KINDS}")
    rng = np.random.default_rng(seed)
    if kind == "3regular":
        if n < 4 or n % 2:
            raise ValueError(f"[Graphs] 3-regular graphs need an even n >= 4, got {n}")
        pairs = random_regular_edges(n, 3, rng)
        name = f"3reg_n{n}_s{seed}"
    else:
        if n < 2:
            raise ValueError(f"[Graphs] Erdos-Renyi graphs need n >= 2, got {n}")
        pairs = erdos_renyi_edges(n, p, rng)
        name = f"er_n{n}_p{p:g}_s{seed}"
    if weights == "pm1":
        signs = rng.choice([-1, 1], size=len(pairs))
        edges = [(u, v, int(w)) for (u, v), w in zip(pairs, signs)]
        name += "_pm1"
    else:
        edges = [(u, v, 1) for u, v in pairs]
    return Graph(n_vertices=n, edges=edges, name=name)


def _content_lines(text: str) -> List[str]:
    return [line.strip() for line in text.splitlines() if line.strip() and not line.strip().startswith("#")]


def _ints(line: str, count: int, what: str) -> List[int]:
    parts = line.split()
    if len(parts) != count:
        raise GraphFormatError(f"[Graphs] {what} needs {count} integers, got {line!r}")
    try:
        return [int(part) for part in parts]
    except ValueError as exc:
        raise GraphFormatError(f"[Graphs] {what} is not integral: {line!r}") from exc


def parse_graph_text(text: str, name: str = "") -> Graph:
    lines = _content_lines(text)
    if not lines:
        raise GraphFormatError("[Graphs] empty instance")
    n, m = _ints(lines[0], 2, "header")
    if n < 1 or m < 0:
        raise GraphFormatError(f"[Graphs] invalid header {lines[0]!r}")
    body = lines[1:]
    if len(body) != m:
        raise GraphFormatError(f"[Graphs] header announces {m} edges, found {len(body)}")
    edges = [tuple(_ints(line, 3, "edge line")) for line in body]
    try:
        return Graph(n_vertices=n, edges=edges, name=name)
    except ValidationError as exc:
        raise GraphFormatError(f"[Graphs] invalid instance: {exc.errors()[0]['msg']}") from exc


def parse_graph(path: Union[str, Path]) -> Graph:
    path = Path(path)
    logging.info(f"[Graphs] reading instance {path}")
    return parse_graph_text(path.read_text(), name=path.stem)


def format_graph(graph: Graph) -> str:
    lines = [f"{graph.n_vertices} {len(graph.edges)}"]
    lines.extend(f"{u} {v} {w}" for u, v, w in graph.edges)
    return "\n".join(lines) + "\n"


def write_graph(graph: Graph, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_graph(graph))
    logging.info(f"[Graphs] wrote {graph.n_vertices} vertices / {len(graph.edges)} edges to {path}")
    return path
