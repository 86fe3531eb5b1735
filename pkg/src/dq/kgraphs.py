"""Labeled admissible graphs and their bidifferential operators (no weights)."""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product
from typing import Union

from .symcore import DimensionError, Poly

__all__ = ["AdmissibleGraph", "GraphError", "enumerate_graphs", "graph_count", "graph_operator", "DEFAULT_BOUND"]

DEFAULT_BOUND = 4

Target = Union[int, str]  # 1..n or "L" / "R"


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class AdmissibleGraph:
    """n aerial vertices 1..n; vertex k sends its two edges to ``edges[k-1]`` (ordered)."""

    n: int
    edges: tuple[tuple[Target, Target], ...]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        self.validate()

    def validate(self) -> None:
        if self.n < 0 or len(self.edges) != self.n:
            raise GraphError(f"need exactly {self.n} edge pairs (2n edges)")
        allowed = set(range(1, self.n + 1)) | {"L", "R"}
        for k, pair in enumerate(self.edges, start=1):
            if len(pair) != 2:
                raise GraphError(f"vertex {k} must have two outgoing edges")
            a, b = pair
            if a not in allowed or b not in allowed:
                raise GraphError(f"vertex {k} points outside {{1..{self.n}, L, R}}")
            if a == k or b == k:
                raise GraphError(f"self-edge at vertex {k}")
            if a == b:
                raise GraphError(f"vertex {k} has a double edge to {a}")

    def text(self) -> str:
        parts = [str(self.n)] + [f"v{k}:({a},{b})" for k, (a, b) in enumerate(self.edges, start=1)]
        return "; ".join(parts)

    __str__ = text

    @classmethod
    def parse(cls, text: str) -> "AdmissibleGraph":
        chunks = [c.strip() for c in text.split(";") if c.strip()]
        if not chunks:
            raise GraphError("empty graph text")
        n = int(chunks[0])
        edges = []
        for k, c in enumerate(chunks[1:], start=1):
            m = re.fullmatch(r"v(\d+):\((\w+),(\w+)\)", c.replace(" ", ""))
            if not m or int(m.group(1)) != k:
                raise GraphError(f"cannot read vertex entry {c!r}")
            edges.append(tuple(x if x in ("L", "R") else int(x) for x in m.group(2, 3)))
        return cls(n, tuple(edges))


def graph_count(n: int) -> int:
    return 1 if n == 0 else (n * (n + 1)) ** n


def enumerate_graphs(n: int, bound: int = DEFAULT_BOUND) -> list[AdmissibleGraph]:
    """All labeled admissible graphs with n aerial vertices, in lexicographic order."""
    if n < 0:
        raise GraphError("n must be non-negative")
    if n > bound:
        raise GraphError(f"n = {n} exceeds the enumeration bound {bound}")
    targets: list[Target] = list(range(1, n + 1)) + ["L", "R"]
    choices = []
    for k in range(1, n + 1):
        options = [t for t in targets if t != k]
        choices.append([(a, b) for a in options for b in options if a != b])
    return [AdmissibleGraph(n, combo) for combo in product(*choices)]


def graph_operator(graph: AdmissibleGraph, tensor, u: Poly, v: Poly) -> Poly:
    """B_Gamma(u, v): vertex k carries Lambda^{i_k j_k}; edge (k -> a) with index i_k differentiates a."""
    space = tensor.space
    if u.space != space or v.space != space:
        raise DimensionError("tensor and arguments live on different spaces")
    d = space.nvars
    n = graph.n
    if n == 0:
        return u * v
    incoming: dict[Target, list[tuple[int, int]]] = {t: [] for t in list(range(1, n + 1)) + ["L", "R"]}
    for k, (a, b) in enumerate(graph.edges, start=1):
        incoming[a].append((k, 0))
        incoming[b].append((k, 1))
    out = Poly.zero(space)
    for idx in product(range(d), repeat=2 * n):
        # idx[2(k-1)] is the index on vertex k's first edge, idx[2(k-1)+1] on its second
        term = None
        for k in range(1, n + 1):
            lam = tensor.entry(idx[2 * (k - 1)], idx[2 * (k - 1) + 1])
            if not lam:
                term = None
                break
            lam = lam.derive_multi(_alpha(incoming[k], idx, d))
            if not lam:
                term = None
                break
            term = lam if term is None else term * lam
        if term is None:
            continue
        du = u.derive_multi(_alpha(incoming["L"], idx, d))
        if not du:
            continue
        dv = v.derive_multi(_alpha(incoming["R"], idx, d))
        if not dv:
            continue
        out = out + term * du * dv
    return out


def _alpha(edges: list[tuple[int, int]], idx: tuple[int, ...], d: int) -> tuple[int, ...]:
    a = [0] * d
    for k, which in edges:
        a[idx[2 * (k - 1) + which]] += 1
    return tuple(a)
