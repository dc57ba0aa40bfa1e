"""P-K sampling, triplet mining, analytic gradients, Adam, and training."""

from .adam import AdamState, Params, adam_step
from .encoder import NONLINEARITIES, ToyEncoder
from .sampler import TripletBatch, build_batch, sample_batch
from .train import (
    LEARNING_RATE_RANGE,
    TraceRow,
    TrainConfig,
    TrainResult,
    train,
    validation_rank1,
)
from .triplet import (
    MinedTriplet,
    batch_distances,
    hardest_violating_negative,
    loss_gradient,
    mine_batch,
    triplet_loss,
    verify_mined_triplets,
)

__all__ = [
    "LEARNING_RATE_RANGE",
    "NONLINEARITIES",
    "AdamState",
    "MinedTriplet",
    "Params",
    "ToyEncoder",
    "TraceRow",
    "TrainConfig",
    "TrainResult",
    "TripletBatch",
    "adam_step",
    "batch_distances",
    "build_batch",
    "hardest_violating_negative",
    "loss_gradient",
    "mine_batch",
    "sample_batch",
    "train",
    "triplet_loss",
    "validation_rank1",
    "verify_mined_triplets",
]
