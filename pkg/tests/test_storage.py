import asyncio
import hashlib
import json

import numpy as np
import pytest
import scipy.sparse as sp

from database.models import Database, EigenCacheRepository, pair_digest
from errors import ConfigError, GraphFormatError, GraphValidationError, PotentialError, UnknownIdError
from models.experiment import load_experiment, options_argv
from models.potential import VertexPotential
from models.reports import Eigenpairs
from services.assembly_service import assembly_service
from storage.artifacts import ArtifactWriter, coo_text, csv_text, format_value
from storage.graph_files import dumps_graph, dumps_potential, loads_graph, loads_potential, read_graph

METRIC_TEXT = """\
graph metric
# star with one sampled edge
v c
v x boundary
v y boundary
e c x 1.5
e c y 0.5
"""


# Graph and potential files

def test_dump_combinatorial_graph(k2_dirichlet):
    assert dumps_graph(k2_dirichlet) == "graph combinatorial\nv a\nv b boundary\ne a b 2.0\n"


def test_parse_metric_graph():
    graph = loads_graph(METRIC_TEXT)
    assert graph.kind == "metric"
    assert graph.labels == ("c", "x", "y")
    assert graph.boundary == frozenset({1, 2})
    np.testing.assert_array_equal(graph.lengths, [1.5, 0.5])
    assert loads_graph(dumps_graph(graph)).labels == graph.labels


def test_hash_inside_labels_round_trips():
    graph = loads_graph("graph metric\n# comment\nv a#1\nv b#2 boundary\ne a#1 b#2 2.5\n")
    assert graph.labels == ("a#1", "b#2")
    again = loads_graph(dumps_graph(graph))
    assert again.labels == graph.labels
    assert again.boundary == frozenset({1})
    np.testing.assert_array_equal(again.lengths, [2.5])


@pytest.mark.parametrize("text", [
    "v a\n",
    "graph metric\nv a\nv a\n",
    "graph metric\nv a\ne a b 1.0\n",
    "graph metric\nv a\nv b\ne a b one\n",
    "graph planar\n",
    "graph metric\nw a\n",
])
def test_malformed_graph_files(text):
    with pytest.raises(GraphFormatError):
        loads_graph(text)


def test_parsed_graph_is_validated():
    with pytest.raises(GraphValidationError):
        loads_graph("graph metric\nv a\nv b boundary\ne a b -1.0\n")


def test_vertex_potential_file(k2_dirichlet):
    potential = loads_potential("vpot a 3.5\n", k2_dirichlet)
    np.testing.assert_array_equal(potential.values, [3.5, 0.0])
    assert dumps_potential(k2_dirichlet, potential) == "vpot a 3.5\n"
    with pytest.raises(UnknownIdError):
        loads_potential("vpot z 1.0\n", k2_dirichlet)


def test_edge_potential_file():
    graph = loads_graph(METRIC_TEXT)
    potential = loads_potential("rule simpson\nepot c~y const 2.0\nepot 0 samples 3 0 1 0\n", graph)
    assert potential.rule == "simpson"
    assert potential.profiles[1].constant == 2.0
    np.testing.assert_array_equal(potential.profiles[0].samples, [0.0, 1.0, 0.0])
    again = loads_potential(dumps_potential(graph, potential), graph)
    np.testing.assert_array_equal(again.profiles[0].samples, potential.profiles[0].samples)


def test_edge_potential_errors():
    graph = loads_graph(METRIC_TEXT)
    with pytest.raises(GraphFormatError):
        loads_potential("epot 0 samples 4 0 1 0\n", graph)
    with pytest.raises(UnknownIdError):
        loads_potential("epot 7 const 1\n", graph)
    with pytest.raises(UnknownIdError):
        loads_potential("epot x~y const 1\n", graph)
    with pytest.raises(PotentialError):
        loads_potential("vpot c 1\n", graph)


def test_missing_graph_file(tmp_path):
    with pytest.raises(ConfigError) as excinfo:
        asyncio.run(read_graph(tmp_path / "absent.txt"))
    assert excinfo.value.details["path"].endswith("absent.txt")


# Artifacts

def test_number_formatting():
    assert format_value(0.1) == "0.10000000000000001"
    assert format_value(np.int64(3)) == "3"
    assert format_value(True) == "true"
    assert format_value(None) == ""


def test_csv_and_coo_text():
    assert csv_text(("n", "s_n"), [(1, 0.5)]) == "n,s_n\r\n1,0.5\r\n"
    matrix = sp.csr_matrix(np.array([[2.0, -1.0], [-1.0, 2.0]]))
    assert coo_text(matrix).splitlines() == ["% 2 2 4", "0 0 2", "0 1 -1", "1 0 -1", "1 1 2"]


def test_writer_manifest(tmp_path):
    writer = ArtifactWriter(tmp_path / "out")
    writer.annotations["seed"] = 7

    async def write():
        await writer.write_csv("table.csv", ("a",), [(1,)])
        await writer.write_json("extra.json", {"value": np.float64(0.25)}, stdout=False)
        await writer.write_manifest({"status": "ok"})

    asyncio.run(write())
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert manifest["status"] == "ok" and manifest["seed"] == 7
    assert [f["path"] for f in manifest["files"]] == ["extra.json", "table.csv"]
    table = (tmp_path / "out" / "table.csv").read_bytes()
    assert manifest["files"][1]["sha256"] == hashlib.sha256(table).hexdigest()
    assert json.loads((tmp_path / "out" / "extra.json").read_text()) == {"value": 0.25}


def test_stdout_mode_prints_primary_files_only(capsys):
    writer = ArtifactWriter()

    async def write():
        await writer.write_csv("table.csv", ("a",), [(1,)])
        await writer.write_json("side.json", {"b": 2}, stdout=False)
        return await writer.write_manifest()

    assert asyncio.run(write()) is None
    assert capsys.readouterr().out == "a\r\n1\r\n"
    assert writer.files == {}


# Eigen cache

def test_eigen_cache_roundtrip(tmp_path, k2_dirichlet):
    pair = assembly_service.assemble_combinatorial(k2_dirichlet, VertexPotential(np.array([1.0, 0.0])))
    digest = pair_digest(pair)
    eig = Eigenpairs(np.array([1.0, 4.0]), np.eye(2))

    async def exercise():
        db = Database(tmp_path / "cache" / "eigen.db")
        await db.connect()
        try:
            cache = EigenCacheRepository(db)
            assert await cache.get(digest) is None
            await cache.put(digest, eig)
            await cache.put(digest, eig)
            stored = await cache.get(digest)
            count = await cache.count()
            await cache.delete(digest)
            return stored, count, await cache.count()
        finally:
            await db.disconnect()

    stored, count, after = asyncio.run(exercise())
    np.testing.assert_array_equal(stored.values, eig.values)
    np.testing.assert_array_equal(stored.vectors, eig.vectors)
    assert (count, after) == (1, 0)


def test_digest_keys_on_stiffness(k2_dirichlet):
    first = assembly_service.assemble_combinatorial(k2_dirichlet, VertexPotential(np.array([1.0, 0.0])))
    second = assembly_service.assemble_combinatorial(k2_dirichlet, VertexPotential(np.array([2.0, 0.0])))
    heavier = assembly_service.assemble_combinatorial(
        loads_graph("graph combinatorial\nv a\nv b boundary\ne a b 3.0\n"), VertexPotential(np.array([1.0, 0.0])))
    assert len(pair_digest(first)) == 64
    assert pair_digest(first) == pair_digest(second)
    assert pair_digest(first) != pair_digest(heavier)


# Experiment files

def test_options_argv():
    assert options_argv({"count": 5, "on_mesh": True, "split": False, "alpha_grid": [1, 2]}) == [
        "--count", "5", "--on-mesh", "--alpha-grid", "1,2",
    ]


def test_load_experiment(tmp_path):
    (tmp_path / "graph.txt").write_text(METRIC_TEXT)
    path = tmp_path / "experiment.toml"
    path.write_text(
        'seed = 11\nrefine = 1\n\n[graph]\nfile = "graph.txt"\n\n[potential]\ngen = "constant:2"\n\n'
        '[[operations]]\ncommand = "bound  bracketing"\noptions = { s = "0.1,0.5" }\n'
    )
    config = load_experiment(path)
    assert config.graph.file == tmp_path / "graph.txt"
    assert config.operations[0].argv() == ["bound", "bracketing", "--s", "0.1,0.5"]
    assert config.shared_argv(config.graph.file, None)[:4] == ["--graph", str(tmp_path / "graph.txt"), "--refine", "1"]


@pytest.mark.parametrize("body", [
    '[graph]\nbuilder = "lattice"\n',
    '[graph]\nbuilder = "hypercube"\n[[operations]]\ncommand = "eigs"\n',
    '[graph]\nfile = "g.txt"\nbuilder = "lattice"\n[[operations]]\ncommand = "eigs"\n',
    '[graph]\nbuilder = "lattice"\n[[operations]]\ncommand = "bound upper"\n',
    'jobs = 0\n[graph]\nbuilder = "lattice"\n[[operations]]\ncommand = "eigs"\n',
    '[graph\n',
])
def test_invalid_experiments(tmp_path, body):
    path = tmp_path / "bad.toml"
    path.write_text(body)
    with pytest.raises(ConfigError) as excinfo:
        load_experiment(path)
    assert excinfo.value.details["path"] == str(path)


def test_missing_experiment(tmp_path):
    with pytest.raises(ConfigError):
        load_experiment(tmp_path / "none.toml")
