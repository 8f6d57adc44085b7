"""Quadratic-form pairs and their degrees of freedom"""
import hashlib
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True, eq=False)
class DofMap:
    """Vertex DOFs for non-boundary vertices, then m_e - 1 interior DOFs per edge.

    vertex_dofs[v] is -1 for vertices outside the window (Dirichlet).
    Interior DOFs of edge e are edge_offsets[e] .. edge_offsets[e + 1] - 1, ordered
    from the first endpoint of the edge to the second.
    """

    vertex_dofs: np.ndarray
    mesh: Tuple[int, ...] = ()
    edge_offsets: np.ndarray = field(default_factory=lambda: np.zeros(1, dtype=np.int64))

    @classmethod
    def for_window(cls, n_vertices: int, window: np.ndarray, mesh: Tuple[int, ...] = ()) -> "DofMap":
        vertex_dofs = np.full(n_vertices, -1, dtype=np.int64)
        window = np.sort(np.asarray(window, dtype=np.int64))
        vertex_dofs[window] = np.arange(window.size)
        interior_counts = np.array([m - 1 for m in mesh], dtype=np.int64)
        offsets = window.size + np.concatenate(([0], np.cumsum(interior_counts))).astype(np.int64)
        vertex_dofs.setflags(write=False)
        offsets.setflags(write=False)
        return cls(vertex_dofs=vertex_dofs, mesh=tuple(int(m) for m in mesh), edge_offsets=offsets)

    @property
    def n_vertex_dofs(self) -> int:
        return int(np.count_nonzero(self.vertex_dofs >= 0))

    @property
    def n_dofs(self) -> int:
        return int(self.edge_offsets[-1])

    @property
    def window(self) -> np.ndarray:
        """Vertex ids carrying a DOF, in DOF order"""
        return np.flatnonzero(self.vertex_dofs >= 0)

    def interior_dofs(self, edge_id: Optional[int] = None) -> np.ndarray:
        if edge_id is None:
            return np.arange(self.n_vertex_dofs, self.n_dofs)
        return np.arange(self.edge_offsets[edge_id], self.edge_offsets[edge_id + 1])

    @property
    def signature(self) -> str:
        digest = hashlib.sha256()
        digest.update(self.vertex_dofs.tobytes())
        digest.update(np.asarray(self.mesh, dtype=np.int64).tobytes())
        return digest.hexdigest()[:16]

    def tags(self) -> List[Dict[str, int]]:
        """DOF descriptions for the JSON sidecar of matrix exports"""
        tags: List[Dict[str, int]] = [{"dof": dof, "vertex": int(v)} for dof, v in enumerate(self.window)]
        for edge_id, m in enumerate(self.mesh):
            start = int(self.edge_offsets[edge_id])
            tags.extend({"dof": start + k - 1, "edge": edge_id, "node": k} for k in range(1, m))
        return tags


@dataclass(frozen=True, eq=False)
class FormPair:
    """Stiffness A (positive definite), potential form B (semidefinite), optional mass M"""

    A: sp.csr_matrix
    B: sp.csr_matrix
    dof_map: DofMap
    M: Optional[sp.csr_matrix] = None
    provenance: Dict[str, Any] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return int(self.A.shape[0])

    @property
    def mesh_signature(self) -> str:
        return self.dof_map.signature

    def with_potential(self, B: sp.csr_matrix, **provenance) -> "FormPair":
        return FormPair(self.A, B.tocsr(), self.dof_map, self.M, {**self.provenance, **provenance})


@dataclass(frozen=True, eq=False)
class Splitting:
    """A-orthogonal split into the piecewise-linear and the edge-Dirichlet subspaces"""

    pl_basis: sp.csr_matrix
    dirichlet_dofs: np.ndarray
    pl_pair: FormPair
    dirichlet_pair: FormPair
    cross_max: float

    @property
    def pl_dimension(self) -> int:
        return int(self.pl_basis.shape[1])

    @property
    def dirichlet_dimension(self) -> int:
        return int(self.dirichlet_dofs.size)
