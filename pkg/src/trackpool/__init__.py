"""Ensemble visual tracking with correlation-filter experts.

Every non-empty subset of six feature kinds defines an expert; a roulette
wheel over running fitness picks which experts run each frame, and the
fittest executive's box is the output.
"""
from .boxes import BoundingBox, PatchSpec
from .dcf import (FeatureStack, FilterModel, GaussianLabel, ResponseMap,
                  apply_hann, make_gaussian_label, respond, train_filter,
                  update_model)
from .experts import Expert, ExpertId, enumerate_pool, fuse_responses
from .features import FeatureKind
from .metrics import EvalCurves, evaluate, precision_curve, success_auc
from .selection import FitnessLedger, SelectionConfig, select_executives
from .sequences import MotionScript, SequenceSpec, load_sequence, synth_sequence
from .tracker import PoolTracker, RunConfig, RunRecord, run_tracker

__version__ = "0.1.0"

__all__ = [
    "BoundingBox", "EvalCurves", "Expert", "ExpertId", "FeatureKind",
    "FeatureStack", "FilterModel", "FitnessLedger", "GaussianLabel",
    "MotionScript", "PatchSpec", "PoolTracker", "ResponseMap", "RunConfig",
    "RunRecord", "SelectionConfig", "SequenceSpec", "apply_hann",
    "enumerate_pool", "evaluate", "fuse_responses", "load_sequence",
    "make_gaussian_label", "precision_curve", "respond", "run_tracker",
    "select_executives", "success_auc", "synth_sequence", "train_filter",
    "update_model",
]
