"""Line-oriented text formats for graphs and potentials"""
import logging
import sys
from pathlib import Path
from typing import Dict, List, Tuple, Union

import aiofiles
import numpy as np

from errors import ConfigError, GraphFormatError, PotentialError, UnknownIdError
from models.graph import CombinatorialGraph, MetricGraph
from models.potential import QUADRATURE_RULES, EdgePotential, EdgeProfile, VertexPotential
from services.graph_service import graph_service

logger = logging.getLogger(__name__)

AnyGraph = Union[CombinatorialGraph, MetricGraph]
AnyPotential = Union[VertexPotential, EdgePotential]

STDIO = "-"


def _number(value: float) -> str:
    """Shortest text that parses back to the same double"""
    return repr(float(value))


def _lines(text: str):
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield number, line.split()


def _float(token: str, number: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise GraphFormatError(f"line {number}: not a number: {token!r}", {"line": number})


# Graphs

def dumps_graph(graph: AnyGraph) -> str:
    lines = [f"graph {graph.kind}"]
    for vertex, label in enumerate(graph.labels):
        lines.append(f"v {label} boundary" if vertex in graph.boundary else f"v {label}")
    values = graph.lengths if isinstance(graph, MetricGraph) else graph.weights
    for (u, v), value in zip(graph.edges.tolist(), values):
        lines.append(f"e {graph.labels[u]} {graph.labels[v]} {_number(value)}")
    return "\n".join(lines) + "\n"


def loads_graph(text: str) -> AnyGraph:
    """Parse and validate; vertex ids follow the order of the v lines"""
    kind = None
    labels: List[str] = []
    index: Dict[str, int] = {}
    boundary = set()
    edges: List[Tuple[int, int]] = []
    values: List[float] = []
    for number, tokens in _lines(text):
        head = tokens[0]
        if head == "graph":
            if kind is not None or len(tokens) != 2 or tokens[1] not in ("combinatorial", "metric"):
                raise GraphFormatError(f"line {number}: expected 'graph combinatorial|metric'", {"line": number})
            kind = tokens[1]
        elif kind is None:
            raise GraphFormatError("graph header must come first", {"line": number})
        elif head == "v":
            if len(tokens) not in (2, 3) or (len(tokens) == 3 and tokens[2] != "boundary"):
                raise GraphFormatError(f"line {number}: expected 'v <label> [boundary]'", {"line": number})
            label = tokens[1]
            if label in index or "~" in label:
                raise GraphFormatError(f"line {number}: duplicate or invalid label {label!r}", {"line": number})
            index[label] = len(labels)
            labels.append(label)
            if len(tokens) == 3:
                boundary.add(index[label])
        elif head == "e":
            if len(tokens) != 4:
                raise GraphFormatError(f"line {number}: expected 'e <label1> <label2> <value>'", {"line": number})
            for label in tokens[1:3]:
                if label not in index:
                    raise GraphFormatError(f"line {number}: undeclared vertex {label!r}", {"line": number})
            edges.append((index[tokens[1]], index[tokens[2]]))
            values.append(_float(tokens[3], number))
        else:
            raise GraphFormatError(f"line {number}: unknown record {head!r}", {"line": number})
    if kind is None:
        raise GraphFormatError("missing graph header")

    structure = dict(
        n_vertices=len(labels),
        edges=np.array(edges, dtype=np.int64).reshape(-1, 2),
        boundary=frozenset(boundary),
        labels=tuple(labels),
    )
    if kind == "metric":
        graph = MetricGraph(**structure, lengths=np.array(values))
    else:
        graph = CombinatorialGraph(**structure, weights=np.array(values))
    logger.debug(f"Parsed {kind} graph: {graph.n_vertices} vertices, {graph.n_edges} edges")
    return graph_service.ensure_valid(graph)


# Potentials

def dumps_potential(graph: AnyGraph, potential: AnyPotential) -> str:
    if isinstance(potential, VertexPotential):
        return "".join(
            f"vpot {graph.labels[v]} {_number(value)}\n"
            for v, value in enumerate(potential.values) if value != 0.0
        )
    lines = [f"rule {potential.rule}"]
    for edge, profile in enumerate(potential.profiles):
        if profile.is_constant:
            lines.append(f"epot {edge} const {_number(profile.constant)}")
        else:
            samples = " ".join(_number(x) for x in profile.samples)
            lines.append(f"epot {edge} samples {profile.sample_count} {samples}")
    return "\n".join(lines) + "\n"


def _edge_id(graph: AnyGraph, token: str, number: int) -> int:
    if "~" in token:
        first, second = token.split("~", 1)
        ids = {graph.label_index.get(first), graph.label_index.get(second)}
        for edge, (u, v) in enumerate(graph.edges.tolist()):
            if {u, v} == ids:
                return edge
        raise UnknownIdError(f"line {number}: unknown edge {token!r}", {"line": number, "edge": token})
    try:
        edge = int(token)
    except ValueError:
        raise GraphFormatError(f"line {number}: bad edge reference {token!r}", {"line": number})
    if not 0 <= edge < graph.n_edges:
        raise UnknownIdError(f"line {number}: unknown edge id {edge}", {"line": number, "edge": edge})
    return edge


def loads_potential(text: str, graph: AnyGraph) -> AnyPotential:
    """vpot lines for combinatorial graphs; epot (and an optional rule line) for metric ones"""
    vertex_values = np.zeros(graph.n_vertices)
    profiles: List[EdgeProfile] = [EdgeProfile(constant=0.0)] * graph.n_edges
    rule = "trapezoid"
    for number, tokens in _lines(text):
        head = tokens[0]
        if head == "vpot" and graph.kind == "combinatorial":
            if len(tokens) != 3:
                raise GraphFormatError(f"line {number}: expected 'vpot <vertex> <value>'", {"line": number})
            if tokens[1] not in graph.label_index:
                raise UnknownIdError(f"line {number}: unknown vertex {tokens[1]!r}", {"line": number})
            vertex_values[graph.label_index[tokens[1]]] = _float(tokens[2], number)
        elif head == "epot" and graph.kind == "metric":
            if len(tokens) < 4:
                raise GraphFormatError(f"line {number}: incomplete epot record", {"line": number})
            edge = _edge_id(graph, tokens[1], number)
            if tokens[2] == "const" and len(tokens) == 4:
                profiles[edge] = EdgeProfile(constant=_float(tokens[3], number))
            elif tokens[2] == "samples":
                count = int(_float(tokens[3], number))
                samples = [_float(t, number) for t in tokens[4:]]
                if count != len(samples):
                    raise GraphFormatError(f"line {number}: declared {count} samples, found {len(samples)}",
                                           {"line": number})
                profiles[edge] = EdgeProfile(samples=np.array(samples))
            else:
                raise GraphFormatError(f"line {number}: expected 'const <c>' or 'samples <n> ...'", {"line": number})
        elif head == "rule" and graph.kind == "metric":
            if len(tokens) != 2 or tokens[1] not in QUADRATURE_RULES:
                raise GraphFormatError(f"line {number}: rule must be one of {QUADRATURE_RULES}", {"line": number})
            rule = tokens[1]
        else:
            raise PotentialError(f"line {number}: {head!r} record does not fit a {graph.kind} graph",
                                 {"line": number})
    if graph.kind == "combinatorial":
        return VertexPotential(vertex_values)
    return EdgePotential(tuple(profiles), rule)


# Files

async def read_text(path: Union[str, Path]) -> str:
    """File contents; '-' reads standard input"""
    if str(path) == STDIO:
        return sys.stdin.read()
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"file not found: {path}", {"path": str(path)})
    async with aiofiles.open(path, "r", encoding="utf-8") as f:
        return await f.read()


async def read_graph(path: Union[str, Path]) -> AnyGraph:
    return loads_graph(await read_text(path))


async def read_potential(path: Union[str, Path], graph: AnyGraph) -> AnyPotential:
    return loads_potential(await read_text(path), graph)
