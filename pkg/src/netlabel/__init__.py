"""Label inference on attributed social graphs.

Build KNN and threshold networks from sparse count attributes, measure how
strongly labels cluster along edges, and compare local classifiers trained on
network neighborhoods against global baselines.
"""
from .bias import BiasReport, DeltaBiasSummary, bias_reports, delta_bias, network_label_bias
from .errors import (ConfigError, DensityTooLowError, EmptyInputError, InputError, NetlabelError,
                     ParseError, UndefinedBiasError)
from .graph import AttributedGraph, EdgeSet, LabelSet, bfs_order, degree_stats, neighborhood
from .models import ModelSpec, build_knn, build_model, build_threshold, match_density, random_edges
from .synth import GenreRule, SynthConfig, generate_synthetic

__version__ = "0.1.0"

__all__ = [
    "AttributedGraph", "BiasReport", "ConfigError", "DeltaBiasSummary", "DensityTooLowError",
    "EdgeSet", "EmptyInputError", "GenreRule", "InputError", "LabelSet", "ModelSpec",
    "NetlabelError", "ParseError", "SynthConfig", "UndefinedBiasError", "bfs_order",
    "bias_reports", "build_knn", "build_model", "build_threshold", "degree_stats", "delta_bias",
    "generate_synthetic", "match_density", "neighborhood", "network_label_bias", "random_edges",
]
