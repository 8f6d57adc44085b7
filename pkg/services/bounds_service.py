"""Lower bounds, bracketing, domination and ratio diagnostics on computed spectra"""
import logging
import math
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from config import settings
from errors import AssumptionError, InvalidParameterError, PotentialError, ProvenanceMismatchError, WindowError
from models.forms import FormPair
from models.graph import CombinatorialGraph, MetricGraph
from models.potential import EdgePotential, EdgeProfile, SequenceSummary, VertexPotential
from models.reports import BirmanSchwingerCheck, BoundReport, Count, RatioTable, SpectralReport
from services.assembly_service import assembly_service
from services.coloring_service import coloring_service
from services.graph_service import graph_service
from services.potential_service import potential_service
from services.spectral_service import spectral_service

logger = logging.getLogger(__name__)

CountSweep = Sequence[Tuple[float, Count]]


class BoundsService:
    """Evaluates every inequality as a BoundReport with margin = lhs - rhs"""

    def __init__(self, abs_tol: Optional[float] = None):
        self._abs_tol = abs_tol

    @property
    def abs_tol(self) -> float:
        return settings.bound_abs_tol if self._abs_tol is None else self._abs_tol

    # Combinatorial graphs

    def lower_bound_combinatorial(
        self,
        graph: CombinatorialGraph,
        potential: VertexPotential,
        s: float,
        report: Optional[SpectralReport] = None,
        pair: Optional[FormPair] = None,
    ) -> BoundReport:
        """n(s, B_V) >= (d + 1)^{-1} nu(g_0 (d + 1) s, V), with the independent-set witness.

        The witness is the colour class Omega_1 holding most vertices of
        {V > g_0 (d + 1) s}; its delta functions are A- and B-orthogonal and each
        has Rayleigh quotient V(v) / sum_e g_e > s.
        """
        pair = pair or assembly_service.assemble_combinatorial(graph, potential)
        self._check_support(np.flatnonzero(potential.values), pair.dof_map.window)
        report = report or spectral_service.pencil_eigenvalues(pair, threshold=s)
        stats = graph_service.stats(graph)
        degree, g_zero = stats.degree_bound, stats.g_zero
        level = g_zero * (degree + 1) * s
        nu = potential_service.distribution(potential.values, level)
        lhs = report.count(s)
        rhs = nu / (degree + 1)
        parameters = {"s": s, "degree_bound": degree, "g_zero": g_zero, "level": level, "nu": nu}

        witness = None
        if nu:
            coloring = coloring_service.greedy_vertex_coloring(graph)
            loaded = set(np.flatnonzero(potential.values > level).tolist())
            classes = [[v for v in members if v in loaded] for members in coloring.classes()]
            best = max(range(len(classes)), key=lambda c: len(classes[c]))
            dofs = pair.dof_map.vertex_dofs[classes[best]]
            basis = sp.csr_matrix((np.ones(dofs.size), (dofs, np.arange(dofs.size))), shape=(pair.size, dofs.size))
            witness = self._subspace_witness(pair, basis, s)
            witness.update({"class": best, "class_count": coloring.class_count,
                            "vertices": [int(v) for v in classes[best]]})
            witness["passed"] = witness["passed"] and lhs.value >= len(classes[best])

        result = BoundReport.evaluate("lower-combinatorial", lhs.value, rhs, self.abs_tol,
                                      parameters, witness, lhs.ambiguous)
        logger.info(f"lower-combinatorial s={s}: n={lhs.value} >= {rhs:.6g} -> {result.passed}")
        return result

    def weak_class_lower_bound(self, graph: CombinatorialGraph, potential: VertexPotential,
                               report: SpectralReport, q: float) -> RatioTable:
        """||B_V||_{Sigma_q} against ||V||_{l^q_w}; the lower bound makes the ratio bounded below"""
        stats = graph_service.stats(graph)
        weak_b = spectral_service.quasi_norms(report, q).weak
        weak_v = SequenceSummary.of(potential.values).weak_norm(q)
        ratio = weak_b / weak_v if weak_v > 0 else 0.0
        floor = (stats.degree_bound + 1) ** (-1.0 - 1.0 / q) / stats.g_zero
        return RatioTable(
            "weak-class", ("q", "weak_B", "weak_V", "ratio"), ((q, weak_b, weak_v, ratio),),
            {"reference_floor": floor, "degree_bound": stats.degree_bound, "g_zero": stats.g_zero},
        )

    # Metric graphs: single edges

    def per_edge_dirichlet_bound(
        self,
        graph: MetricGraph,
        potential: EdgePotential,
        edge: int,
        lam: float,
        mesh: Optional[Sequence[int]] = None,
        constant: Optional[float] = None,
    ) -> BoundReport:
        """n(lam, B_{V,e,D}) <= C lam^{-1/2} sqrt(eta_V(e)), plus the one-edge Weyl ratio"""
        if not lam > 0:
            raise InvalidParameterError(f"lambda must be positive, got {lam}")
        mesh = assembly_service.default_mesh(graph, potential) if mesh is None else tuple(mesh)
        pair = assembly_service.edge_dirichlet_pair(graph, potential, edge, mesh)
        report = spectral_service.pencil_eigenvalues(pair)
        count = report.count(lam)
        profile, length = potential.profiles[edge], float(graph.lengths[edge])
        eta = length * potential_service.edge_integral(profile, length, potential.rule, int(mesh[edge]))
        sqrt_integral = potential_service.edge_integral(profile, length, potential.rule, int(mesh[edge]),
                                                        transform=np.sqrt)
        constant = max(settings.edge_constant, constant or 0.0)
        bound = constant * lam ** -0.5 * math.sqrt(eta)
        parameters = {
            "edge": edge, "lambda": lam, "constant": constant, "eta": eta,
            "weyl_ratio": math.sqrt(lam) * count.value * math.pi / sqrt_integral if sqrt_integral > 0 else None,
        }
        return BoundReport.evaluate("per-edge", count.value, bound, self.abs_tol, parameters,
                                    ambiguous=count.ambiguous, margin=bound - count.value)

    def calibrate_edge_constant(
        self,
        rng: np.random.Generator,
        instances: int = 100,
        intervals: int = 64,
        samples: int = 9,
        rule: str = "trapezoid",
    ) -> float:
        """sup lam^{1/2} n(lam) / sqrt(eta) over random (l, V); attained at lam just below s_k"""
        worst = 0.0
        for _ in range(instances):
            length = float(rng.uniform(0.25, 4.0))
            values = rng.uniform(0.0, rng.uniform(0.5, 50.0), size=samples)
            graph = MetricGraph(n_vertices=2, edges=np.array([[0, 1]]), boundary=frozenset({0, 1}),
                                lengths=np.array([length]))
            potential = EdgePotential((EdgeProfile(samples=values),), rule)
            pair = assembly_service.edge_dirichlet_pair(graph, potential, 0, (intervals,))
            report = spectral_service.pencil_eigenvalues(pair)
            eta = length * potential_service.edge_integral(potential.profiles[0], length, rule, intervals)
            if eta <= 0 or not len(report):
                continue
            k = np.arange(1, len(report) + 1)
            worst = max(worst, float(np.max(k * np.sqrt(report.eigenvalues))) / math.sqrt(eta))
        logger.info(f"Calibrated per-edge constant over {instances} instances: {worst:.6g}")
        return worst

    # Metric graphs: decomposition checks

    def bracketing_check(
        self,
        graph: MetricGraph,
        potential: EdgePotential,
        s: float,
        full: Optional[SpectralReport] = None,
        pl: Optional[SpectralReport] = None,
        dirichlet: Optional[SpectralReport] = None,
        mesh: Optional[Sequence[int]] = None,
    ) -> BoundReport:
        """max{n(s, pl), n(s, D)} <= n(s, full) <= n(s/2, pl) + n(s/2, D)"""
        if full is None or pl is None or dirichlet is None:
            pair = assembly_service.assemble_metric_fem(graph, potential, mesh)
            split = assembly_service.split_pl_dirichlet(pair, graph)
            full = full or spectral_service.pencil_eigenvalues(pair, threshold=s / 2)
            pl = pl or spectral_service.pencil_eigenvalues(split.pl_pair, threshold=s / 2)
            dirichlet = dirichlet or spectral_service.pencil_eigenvalues(split.dirichlet_pair, threshold=s / 2)
        signatures = {name: r.provenance.get("mesh_signature")
                      for name, r in (("full", full), ("pl", pl), ("dirichlet", dirichlet))}
        if len(set(signatures.values())) != 1:
            raise ProvenanceMismatchError("bracketing reports come from different meshes", signatures)

        counts = {
            "full": full.count(s),
            "pl": pl.count(s),
            "dirichlet": dirichlet.count(s),
            "pl_half": pl.count(s / 2),
            "dirichlet_half": dirichlet.count(s / 2),
        }
        lower = max(counts["pl"].value, counts["dirichlet"].value)
        upper = counts["pl_half"].value + counts["dirichlet_half"].value
        middle = counts["full"].value
        margin = min(middle - lower, upper - middle)
        parameters = {"s": s, "lower": lower, "upper": upper,
                      **{name: c.value for name, c in counts.items()}}
        ambiguous = any(c.ambiguous for c in counts.values())
        result = BoundReport.evaluate("bracketing", middle, lower, self.abs_tol, parameters,
                                      ambiguous=ambiguous, margin=margin)
        logger.info(f"bracketing s={s}: {lower} <= {middle} <= {upper} -> {result.passed}")
        return result

    def domination_check(
        self,
        graph: MetricGraph,
        potential: EdgePotential,
        pl: Optional[SpectralReport] = None,
        kappa: Optional[SpectralReport] = None,
        mesh: Optional[Sequence[int]] = None,
    ) -> BoundReport:
        """lambda_n(B_{V,pl}) <= lambda_n(B_{kappa_V}) for every computed n"""
        mesh = assembly_service.default_mesh(graph, potential) if mesh is None else tuple(mesh)
        if pl is None:
            pair = assembly_service.assemble_metric_fem(graph, potential, mesh)
            pl = spectral_service.pencil_eigenvalues(assembly_service.split_pl_dirichlet(pair, graph).pl_pair)
        if kappa is None:
            combinatorial = graph_service.associated_combinatorial(graph)
            kappa_potential = potential_service.kappa(graph, potential, mesh)
            kappa = spectral_service.pencil_eigenvalues(
                assembly_service.assemble_combinatorial(combinatorial, kappa_potential))
        if pl.provenance.get("dofs") != kappa.provenance.get("dofs"):
            raise WindowError("pl and kappa reports use different windows",
                              {"pl": pl.provenance.get("dofs"), "kappa": kappa.provenance.get("dofs")})

        n = min(len(pl), len(kappa))
        pl_values = _padded(pl.eigenvalues, n)
        kappa_values = _padded(kappa.eigenvalues, n)
        gaps = kappa_values - pl_values
        margin = float(np.min(gaps)) if n else 0.0
        worst = int(np.argmin(gaps)) if n else 0
        parameters = {"compared": n, "worst_index": worst + 1 if n else None,
                      "norm_pl": float(pl_values[0]) if n else 0.0,
                      "norm_kappa": float(kappa_values[0]) if n else 0.0}
        lhs = float(kappa_values[worst]) if n else 0.0
        rhs = float(pl_values[worst]) if n else 0.0
        return BoundReport.evaluate("domination", lhs, rhs, self.abs_tol, parameters, margin=margin)

    def metric_lower_bound(
        self,
        graph: MetricGraph,
        potential: EdgePotential,
        s: float,
        report: Optional[SpectralReport] = None,
        pair: Optional[FormPair] = None,
    ) -> BoundReport:
        """n(s, B_V) >= c' nu(c'' s, eta_V), c' = (2d^2 + 1)^{-1}, c'' = 2(d - 1) l_+ / l_-.

        Witnesses are the pl functions phi_e equal to 1 on e and vanishing off S(e),
        taken from one star-disjoint colour class; every loaded interior edge also
        gets its ratio b[phi_e] / a[phi_e] checked against (2d - 2)^{-1} (l_- / l_+) eta_V(e).
        """
        stats = graph_service.stats(graph)
        degree = stats.degree_bound
        if degree < 2:
            raise AssumptionError("metric lower bound needs degree bound >= 2", {"degree_bound": degree})
        pair = pair or assembly_service.assemble_metric_fem(graph, potential)
        mesh = pair.dof_map.mesh
        eta = potential_service.eta(graph, potential, mesh)
        report = report or spectral_service.pencil_eigenvalues(pair, threshold=s)
        c_prime = 1.0 / (2 * degree ** 2 + 1)
        c_second = 2 * (degree - 1) * stats.l_plus / stats.l_minus
        level = c_second * s
        loaded = np.flatnonzero(eta > level)
        lhs = report.count(s)
        rhs = c_prime * loaded.size
        parameters = {"s": s, "degree_bound": degree, "c_prime": c_prime, "c_second": c_second,
                      "l_minus": stats.l_minus, "l_plus": stats.l_plus, "nu": int(loaded.size)}

        witness = None
        if loaded.size:
            interior = set(graph.interior_edges.tolist())
            touching = [int(e) for e in loaded if e not in interior]
            if touching:
                raise WindowError("potential loads edges touching the truncation boundary",
                                  {"edges": touching})
            split = assembly_service.split_pl_dirichlet(pair, graph)
            coloring = coloring_service.greedy_edge_star_coloring(graph)
            chosen_set = set(loaded.tolist())
            classes = [[e for e in members if e in chosen_set] for members in coloring.classes()]
            best = max(range(len(classes)), key=lambda c: len(classes[c]))
            basis = self._edge_witnesses(pair, split.pl_basis, graph, classes[best])
            witness = self._subspace_witness(pair, basis, s)

            checked = [int(e) for e in np.flatnonzero(eta > 0) if int(e) in interior]
            vectors = self._edge_witnesses(pair, split.pl_basis, graph, checked)
            ratios, claims = [], []
            for column, e in enumerate(checked):
                phi = vectors[:, column].toarray().ravel()
                a, b = assembly_service.evaluate(pair, phi)
                ratios.append(b / a)
                claims.append(stats.l_minus * eta[e] / ((2 * degree - 2) * stats.l_plus))
            edge_checks = [r >= c * (1 - 1e-12) for r, c in zip(ratios, claims)]
            witness.update({
                "class": best, "class_count": coloring.class_count, "edges": [int(e) for e in classes[best]],
                "checked_edges": checked, "edge_ratios": ratios, "edge_claims": claims,
            })
            witness["passed"] = witness["passed"] and all(edge_checks) and lhs.value >= len(classes[best])

        result = BoundReport.evaluate("lower-metric", lhs.value, rhs, self.abs_tol, parameters,
                                      witness, lhs.ambiguous)
        logger.info(f"lower-metric s={s}: n={lhs.value} >= {rhs:.6g} -> {result.passed}")
        return result

    def norm_lower_bound(self, graph: MetricGraph, potential: EdgePotential,
                         report: Optional[SpectralReport] = None,
                         pair: Optional[FormPair] = None) -> BoundReport:
        """s_1 >= (2d - 2)^{-1} (l_- / l_+) max eta_V(e) over interior edges"""
        stats = graph_service.stats(graph)
        if stats.degree_bound < 2:
            raise AssumptionError("norm bound needs degree bound >= 2", {"degree_bound": stats.degree_bound})
        pair = pair or assembly_service.assemble_metric_fem(graph, potential)
        report = report or spectral_service.pencil_eigenvalues(pair, count=1)
        eta = potential_service.eta(graph, potential, pair.dof_map.mesh)
        interior = graph.interior_edges
        eta_max = float(eta[interior].max()) if interior.size else 0.0
        rhs = stats.l_minus * eta_max / ((2 * stats.degree_bound - 2) * stats.l_plus)
        return BoundReport.evaluate(
            "norm-metric", spectral_service.operator_norm(report), rhs, self.abs_tol,
            {"eta_max": eta_max, "degree_bound": stats.degree_bound},
        )

    # Ratio diagnostics

    @staticmethod
    def rlc_ratio(values: Iterable[float], sweep: CountSweep, dimension: float,
                  q_values: Sequence[float] = ()) -> RatioTable:
        """R(alpha) = N_-(A - alpha V) / (alpha^q ||V||_q^q) for q = D/2 and the extra exponents"""
        exponents = [dimension / 2.0, *q_values]
        for q in exponents:
            if not q > 0:
                raise InvalidParameterError(f"exponent q must be positive, got {q}")
        summary = SequenceSummary.of(list(values))
        powers = [summary.lq_norm(q) ** q for q in exponents]
        rows = []
        for alpha, count in sweep:
            ratios = [count.value / (alpha ** q * p) if p > 0 else 0.0 for q, p in zip(exponents, powers)]
            rows.append((alpha, count.value, count.ambiguous, *ratios))
        columns = ("alpha", "n_minus", "ambiguous", *(f"R_q={q:g}" for q in exponents))
        return RatioTable("rlc", columns, tuple(rows), {"dimension": dimension, "q": exponents})

    @staticmethod
    def weyl_ratio(graph: MetricGraph, potential: EdgePotential, sweep: CountSweep,
                   mesh: Optional[Sequence[int]] = None, refinement: int = 0) -> RatioTable:
        """W(alpha) = pi N_- / (alpha^{1/2} int sqrt V) and the eta^{1/2} estimate ratio"""
        sqrt_integral = potential_service.sqrt_integral(graph, potential, mesh)
        if sqrt_integral <= 0:
            raise PotentialError("integral of sqrt(V) vanishes; the Weyl ratio is undefined")
        eta = potential_service.eta(graph, potential, mesh)
        eta_half = float(np.sum(np.sqrt(eta)))
        rows = tuple(
            (alpha, count.value, count.ambiguous, refinement,
             math.pi * count.value / (math.sqrt(alpha) * sqrt_integral),
             count.value / (math.sqrt(alpha) * eta_half))
            for alpha, count in sweep
        )
        return RatioTable(
            "weyl", ("alpha", "n_minus", "ambiguous", "refinement", "W", "estw_ratio"), rows,
            {"sqrt_integral": sqrt_integral, "eta_half_norm": eta_half ** 2},
        )

    # Manifest

    @staticmethod
    def summary_manifest(results: Iterable[Union[BoundReport, BirmanSchwingerCheck, RatioTable]]) -> Dict[str, Any]:
        """pass / fail / diagnostic listing for an experiment"""
        checks: List[Dict[str, Any]] = []
        for result in results:
            if isinstance(result, BoundReport):
                checks.append({"name": result.name, "status": "pass" if result.passed else "fail",
                               "margin": result.margin, "ambiguous": result.ambiguous})
            elif isinstance(result, BirmanSchwingerCheck):
                status = "pass" if result.equal else ("ambiguous" if result.ambiguous else "fail")
                checks.append({"name": "birman-schwinger", "status": status, "alpha": result.alpha})
            else:
                checks.append({"name": result.name, "status": "diagnostic", "rows": len(result.rows)})
        statuses = [c["status"] for c in checks]
        return {
            "checks": checks,
            "passed": statuses.count("pass"),
            "failed": statuses.count("fail"),
            "diagnostics": statuses.count("diagnostic"),
        }

    # Helpers

    @staticmethod
    def _check_support(support: np.ndarray, window: np.ndarray) -> None:
        outside = np.setdiff1d(support, window)
        if outside.size:
            raise WindowError("window does not contain the support of V",
                              {"vertices": outside[:20].tolist(), "count": int(outside.size)})

    @staticmethod
    def _edge_witnesses(pair: FormPair, pl_basis: sp.csr_matrix, graph: MetricGraph,
                        edges: Sequence[int]) -> sp.csr_matrix:
        """Columns phi_e = J(1_{v} + 1_{v'}) for e = (v, v')"""
        if not edges:
            return sp.csr_matrix((pair.size, 0))
        dofs = pair.dof_map.vertex_dofs[graph.edges[list(edges)]]
        rows = dofs.ravel()
        cols = np.repeat(np.arange(len(edges)), 2)
        indicator = sp.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(pl_basis.shape[1], len(edges)))
        return (pl_basis @ indicator).tocsr()

    @staticmethod
    def _subspace_witness(pair: FormPair, basis: sp.csr_matrix, s: float) -> Dict[str, Any]:
        """Rayleigh quotients of the test subspace recomputed from the assembled forms"""
        a, b = assembly_service.galerkin(pair, basis)
        quotients = np.diag(b) / np.diag(a)
        pencil = la.eigh(b, a, eigvals_only=True) if a.size else np.zeros(0)
        min_pencil = float(pencil.min()) if pencil.size else None
        return {
            "dimension": int(basis.shape[1]),
            "quotients": quotients.tolist(),
            "min_quotient": float(quotients.min()) if quotients.size else None,
            "min_pencil": min_pencil,
            "threshold": s,
            "passed": bool(pencil.size == 0 or min_pencil > s),
        }


def _padded(values: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(n)
    m = min(n, values.size)
    out[:m] = values[:m]
    return out


# Create global instance
bounds_service = BoundsService()
