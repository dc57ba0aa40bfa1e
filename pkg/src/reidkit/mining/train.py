"""The transfer-learning recipe at desk scale.

Each step samples a P-by-K identity-balanced batch, encodes it, mines
hardest violating negatives, and applies one Adam update through the
encoder. Validation rank-1 on the held-out clothes-change split is
recorded once per (nominal) epoch, which is what exposes the fast-
convergence behavior the recipe is known for.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import BadValue
from ..corpus.records import Manifest
from ..metrics.evaluate import evaluate
from ..metrics.protocol import protocol_for
from .adam import AdamState, adam_step
from .encoder import ToyEncoder
from .sampler import TripletBatch, sample_batch
from .triplet import loss_gradient, triplet_loss

# published sweep endpoints for the transfer recipe's learning rate
LEARNING_RATE_RANGE = (7.5e-6, 1.25e-5)


@dataclass(frozen=True)
class TrainConfig:
    margin: float = 0.35
    batch_identities: int = 10
    images_per_identity: int = 4
    learning_rate: float = 1e-5
    weight_decay: float = 1e-6
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    max_steps: int = 1000
    seed: int = 0
    eval_protocol: str = "prcc_cc"

    @property
    def batch_size(self) -> int:
        return self.batch_identities * self.images_per_identity

    def validate(self) -> "TrainConfig":
        if self.margin <= 0:
            raise BadValue("margin must be positive")
        if self.batch_identities < 1 or self.images_per_identity < 1:
            raise BadValue("P and K must be positive")
        if self.learning_rate < 0:
            raise BadValue("learning_rate must be non-negative")
        if self.weight_decay < 0:
            raise BadValue("weight_decay must be non-negative")
        for beta in (self.adam_beta1, self.adam_beta2):
            if not 0 < beta < 1:
                raise BadValue("adam betas must lie in (0, 1)")
        if self.adam_epsilon <= 0:
            raise BadValue("adam_epsilon must be positive")
        if self.max_steps < 1:
            raise BadValue("max_steps must be >= 1")
        if self.seed < 0 or self.seed >= 2**64:
            raise BadValue("seed must fit in 64 unsigned bits")
        return self


@dataclass(frozen=True)
class TraceRow:
    step: int
    epoch: int
    loss: float
    active_count: int
    val_rank1: Optional[float] = None


@dataclass
class TrainResult:
    encoder: ToyEncoder
    loss_trace: list[TraceRow] = field(default_factory=list)
    eval_trace: list[tuple[int, int, float]] = field(default_factory=list)  # (step, epoch, rank1)

    def trace_csv(self, seed: Optional[int] = None) -> str:
        buf = io.StringIO()
        if seed is not None:
            buf.write(f"# seed={seed}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["step", "epoch", "loss", "active_count", "val_rank1"])
        for row in self.loss_trace:
            writer.writerow(
                [
                    row.step,
                    row.epoch,
                    repr(row.loss),
                    row.active_count,
                    "" if row.val_rank1 is None else repr(row.val_rank1),
                ]
            )
        return buf.getvalue()


def validation_rank1(
    manifest: Manifest, embeddings: np.ndarray, encoder: ToyEncoder, protocol_kind: str
) -> float:
    encoded = encoder.encode(embeddings)
    report = evaluate(
        manifest,
        encoded,
        protocol_for(protocol_kind, ranks=(1,)),
        model_tag="validation",
    )
    return report.rank(1)


def train(manifest: Manifest, encoder: ToyEncoder, config: TrainConfig) -> TrainResult:
    """Run the mining/update loop for max_steps and trace progress.

    The train split must be identity-disjoint from the query/gallery
    splits; validation rank-1 is computed at every epoch boundary and at
    the final step.
    """
    config.validate()
    train_idents = {r.identity for r in manifest.records if r.split == "train"}
    val_idents = {r.identity for r in manifest.records if r.split != "train"}
    if train_idents & val_idents:
        raise BadValue(
            f"train and validation splits share identities: {sorted(train_idents & val_idents)[:4]}"
        )
    has_validation = any(r.split == "query" for r in manifest.records) and any(
        r.split == "gallery" for r in manifest.records
    )

    embeddings = manifest.matrix().astype(np.float64)
    rng = np.random.default_rng(config.seed)
    n_train = sum(1 for r in manifest.records if r.split == "train")
    steps_per_epoch = max(1, math.ceil(n_train / config.batch_size))

    params = encoder.params()
    state = AdamState.for_params(params)
    result = TrainResult(encoder=encoder)

    for step in range(1, config.max_steps + 1):
        current = encoder.with_params(params)
        indices = sample_batch(
            manifest, config.batch_identities, config.images_per_identity, rng
        )
        raw = embeddings[indices]
        batch = TripletBatch(
            embeddings=current.encode(raw),
            labels=tuple(manifest.records[int(i)].identity for i in indices),
            provenance=tuple(manifest.records[int(i)].record_id for i in indices),
        )
        loss, active = triplet_loss(batch, config.margin)
        upstream = loss_gradient(batch, config.margin)
        grads = current.backprop(raw, upstream)
        params, state = adam_step(
            params,
            grads,
            state,
            learning_rate=config.learning_rate,
            step=step,
            beta1=config.adam_beta1,
            beta2=config.adam_beta2,
            epsilon=config.adam_epsilon,
            weight_decay=config.weight_decay,
        )

        epoch = (step - 1) // steps_per_epoch
        val: Optional[float] = None
        at_epoch_end = step % steps_per_epoch == 0 or step == config.max_steps
        if at_epoch_end and has_validation:
            val = validation_rank1(
                manifest, embeddings, encoder.with_params(params), config.eval_protocol
            )
            result.eval_trace.append((step, epoch, val))
        result.loss_trace.append(
            TraceRow(step=step, epoch=epoch, loss=loss, active_count=active, val_rank1=val)
        )

    result.encoder = encoder.with_params(params)
    return result
