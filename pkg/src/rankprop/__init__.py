"""Transductive rank propagation with locally learned regularizers.

Builds a smoothness regularizer from overlapping local models of the
feature manifold, propagates a handful of ordinal labels into a global
ranking criterion, and picks the next items to label by information
gain on the criterion's posterior covariance.
"""
from .active_dense import (CovarianceState, SuggestionList, choose_subset,
                           info_gain, info_gain_many, init_covariance,
                           observe_label, predictive_variance, suggest)
from .active_sparse import (EigenBasis, LowRankCovariance, compute_eigenbasis,
                            info_gain_sparse, init_lowrank, load_eigenbasis,
                            observe_label_sparse, predictive_variance_sparse,
                            save_eigenbasis, suggest_sparse)
from .baselines import (UCovariance, select_amershi, select_infogain,
                        select_max_variance, select_random)
from .dataset import (CatalogEntry, Dataset, ItemCatalog, load_dataset,
                      read_features, save_dataset, write_features)
from .errors import NumericalError, ValidationError
from .estimator import RankPropagation
from .labels import (LabelAssignment, Placement2D, Ranking, group_values,
                     placement_to_labels, ranking_to_labels)
from .metrics import (HUMAN_AGREEMENT_TAU, USEFULNESS_LINE, agreement_ratio,
                      kendall_tau, mae, usefulness_score)
from .neighbors import NeighborGraph, build_knn
from .propagation import (Criterion, SolverConfig, export_criterion_csv,
                          order_items, solve, solve_multi)
from .regularizer import (LocalModels, ManifoldConfig, RegularizerMatrix,
                          assemble_regularizer, build_graph_laplacian,
                          build_local_models, build_regularizer,
                          load_regularizer, save_regularizer)
from .service import ServiceConfig, build_app, run_service
from .simulate import (STRATEGIES, CurveResult, OracleLabeler,
                       export_curves_csv, init_curve_state,
                       run_learning_curve)
from .store import SessionStore
from .synthetic import make_chain, make_manifold

__version__ = "0.1.0"

__all__ = [
    "CatalogEntry", "CovarianceState", "Criterion", "CurveResult", "Dataset",
    "EigenBasis", "HUMAN_AGREEMENT_TAU", "ItemCatalog", "LabelAssignment",
    "LocalModels", "LowRankCovariance", "ManifoldConfig", "NeighborGraph",
    "NumericalError", "OracleLabeler", "Placement2D", "Ranking",
    "RankPropagation", "RegularizerMatrix", "STRATEGIES", "ServiceConfig",
    "SessionStore", "SolverConfig", "SuggestionList", "USEFULNESS_LINE",
    "UCovariance", "ValidationError", "agreement_ratio",
    "assemble_regularizer", "build_app", "build_graph_laplacian",
    "build_knn", "build_local_models", "build_regularizer",
    "choose_subset", "compute_eigenbasis", "export_criterion_csv",
    "export_curves_csv", "group_values", "info_gain", "info_gain_many",
    "info_gain_sparse", "init_covariance", "init_curve_state",
    "init_lowrank", "kendall_tau", "load_dataset", "load_eigenbasis",
    "load_regularizer", "mae", "make_chain", "make_manifold",
    "observe_label", "observe_label_sparse", "order_items",
    "placement_to_labels", "predictive_variance",
    "predictive_variance_sparse", "ranking_to_labels", "read_features",
    "run_learning_curve", "run_service", "save_dataset", "save_eigenbasis",
    "save_regularizer", "select_amershi", "select_infogain",
    "select_max_variance", "select_random", "solve", "solve_multi",
    "suggest", "suggest_sparse", "usefulness_score", "write_features",
]
