"""Desk-scale laboratory for progressive layer-drop LoRA training and the
merging, connectivity, Shapley, pruning, and federated/multi-task evaluations
built on top of it."""

from .connectivity import InterpCurve, barrier, interpolation_sweep
from .datasets import Dataset, gen_blobs, gen_rings, gen_spirals, load_csv
from .merging import (
    AlignMap,
    DeltaSet,
    MergeWeights,
    align,
    fuse,
    fusion_mixture_gap,
    mix,
    upper_bound,
)
from .network import (
    AdapterSet,
    BaseNet,
    LayerMask,
    LoraAdapter,
    effective_delta,
    forward,
    init_adapters,
    loss_and_grads,
)
from .pruning import SparsitySpec, StructuredSpec, structured_prune, unstructured_prune
from .rng import RngStream
from .schedule import DropSchedule, prob_at, sample_mask
from .shapley import (
    CoalitionGame,
    ShapleyResult,
    exact_shapley,
    mle_shapley,
    model_game,
)
from .training import TrainConfig, evaluate, pretrain_base, train

__version__ = "0.1.0"
