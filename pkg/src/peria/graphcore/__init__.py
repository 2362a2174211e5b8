"""Finite graphs: cliques, gates, hyperplanes, recognition axioms, metrics and partitions."""

from peria.graphcore.axioms import AxiomReport, check_axioms
from peria.graphcore.graphs import FiniteGraph, load_graph, parse_graph
from peria.graphcore.hyperplanes import HyperplaneStructure, compute_hyperplanes, is_paraclique
from peria.graphcore.metrics import CliqueMetrics, delta_distance, well_separated_check
from peria.graphcore.partitions import PartitionSpace, parse_parts, qm_closure, quasi_cubulate

__all__ = [
    "AxiomReport",
    "check_axioms",
    "FiniteGraph",
    "load_graph",
    "parse_graph",
    "HyperplaneStructure",
    "compute_hyperplanes",
    "is_paraclique",
    "CliqueMetrics",
    "delta_distance",
    "well_separated_check",
    "PartitionSpace",
    "parse_parts",
    "qm_closure",
    "quasi_cubulate",
]
