"""Framework-facing extractors emitting the workflow graph interchange format."""

from .adk import extract_adk
from .autogen import extract_autogen
from .crewai import extract_crewai
from .interchange import (
    EdgeSpec,
    ExtractionError,
    ExtractionResult,
    GraphDoc,
    NodeSpec,
    check_document,
)
from .langgraph import extract_langgraph
from .scoring import ExtractionScore, GroundTruthAnnotation, score_extraction

__version__ = "0.1.0"
