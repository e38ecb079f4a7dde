"""Precision/recall scoring of extractions against annotated ground truth."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .interchange import ExtractionResult


@dataclass(frozen=True)
class GroundTruthAnnotation:
    """Expected nodes as (id, kind, sorted tool tuple); edges as (src, dst, kind)."""

    nodes: tuple[tuple[str, str, tuple[str, ...]], ...]
    edges: tuple[tuple[str, str, str], ...]

    @classmethod
    def of(cls, nodes: Iterable, edges: Iterable) -> "GroundTruthAnnotation":
        norm_nodes = tuple(
            (nid, kind, tuple(sorted(tools))) for nid, kind, tools in nodes
        )
        return cls(nodes=norm_nodes, edges=tuple(tuple(e) for e in edges))


@dataclass(frozen=True)
class ExtractionScore:
    node_precision: float
    node_recall: float
    kind_accuracy: float
    edge_precision: float
    edge_recall: float

    @property
    def perfect(self) -> bool:
        return all(
            v == 1.0
            for v in (
                self.node_precision,
                self.node_recall,
                self.kind_accuracy,
                self.edge_precision,
                self.edge_recall,
            )
        )


def _precision_recall(extracted: set, truth: set) -> tuple[float, float]:
    tp = len(extracted & truth)
    precision = tp / len(extracted) if extracted else 1.0
    recall = tp / len(truth) if truth else 1.0
    return precision, recall


def score_extraction(result: ExtractionResult, annotation: GroundTruthAnnotation) -> ExtractionScore:
    extracted_ids = {n.id for n in result.doc.nodes}
    truth_ids = {nid for nid, _, _ in annotation.nodes}
    node_p, node_r = _precision_recall(extracted_ids, truth_ids)

    extracted_kinds = {(n.id, n.kind) for n in result.doc.nodes}
    truth_kinds = {(nid, kind) for nid, kind, _ in annotation.nodes}
    kind_accuracy = (
        len(extracted_kinds & truth_kinds) / len(truth_kinds) if truth_kinds else 1.0
    )

    extracted_edges = {(e.src, e.dst, e.kind) for e in result.doc.edges}
    truth_edges = set(annotation.edges)
    edge_p, edge_r = _precision_recall(extracted_edges, truth_edges)

    return ExtractionScore(
        node_precision=node_p,
        node_recall=node_r,
        kind_accuracy=kind_accuracy,
        edge_precision=edge_p,
        edge_recall=edge_r,
    )
