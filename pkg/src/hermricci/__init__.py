"""Curvature of Hermitian metrics: Chern, Levi-Civita and Riemannian quantities."""

from .jets import MetricJet2, MetricSpec, JetError, evaluate_jet, inverse_metric
from .catalog import parse_metric_id

__all__ = ["MetricJet2", "MetricSpec", "JetError", "evaluate_jet", "inverse_metric", "parse_metric_id"]
__version__ = "0.1.0"
