"""A minimal trainable encoder: one affine map with optional tanh.

Small enough for cheap finite-difference checks while still letting
gradients flow through real parameters. Weights serialize in the shared
binary container under the "ENC1" magic: d_in weight rows, one bias row,
and one flag row whose first entry encodes the nonlinearity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import BadValue, NonFiniteInput, ShapeMismatch
from ..corpus.io import ENCODER_MAGIC, read_embeddings, write_embeddings

NONLINEARITIES = ("identity", "tanh")


@dataclass
class ToyEncoder:
    weights: np.ndarray  # d_in x d_out
    bias: np.ndarray  # d_out
    nonlinearity: str = "identity"

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.weights.ndim != 2 or self.bias.ndim != 1:
            raise ShapeMismatch("weights must be 2-D and bias 1-D")
        if self.weights.shape[0] < 1 or self.weights.shape[1] < 1:
            raise ShapeMismatch("encoder dimensions must be positive")
        if self.weights.shape[1] != self.bias.shape[0]:
            raise ShapeMismatch(
                f"bias length {self.bias.shape[0]} vs output dim {self.weights.shape[1]}"
            )
        if self.nonlinearity not in NONLINEARITIES:
            raise BadValue(f"nonlinearity must be one of {NONLINEARITIES}")
        if not (np.isfinite(self.weights).all() and np.isfinite(self.bias).all()):
            raise NonFiniteInput("encoder parameters must be finite")

    @property
    def dim_in(self) -> int:
        return self.weights.shape[0]

    @property
    def dim_out(self) -> int:
        return self.weights.shape[1]

    @classmethod
    def identity_init(cls, dim: int, nonlinearity: str = "identity") -> "ToyEncoder":
        return cls(weights=np.eye(dim), bias=np.zeros(dim), nonlinearity=nonlinearity)

    @classmethod
    def random_init(
        cls, dim_in: int, dim_out: int, seed: int, nonlinearity: str = "identity"
    ) -> "ToyEncoder":
        rng = np.random.default_rng(seed)
        scale = 1.0 / np.sqrt(dim_in)
        return cls(
            weights=scale * rng.standard_normal((dim_in, dim_out)),
            bias=np.zeros(dim_out),
            nonlinearity=nonlinearity,
        )

    def params(self) -> dict[str, np.ndarray]:
        return {"weights": self.weights, "bias": self.bias}

    def with_params(self, params: dict[str, np.ndarray]) -> "ToyEncoder":
        return ToyEncoder(
            weights=params["weights"], bias=params["bias"], nonlinearity=self.nonlinearity
        )

    def preactivation(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=np.float64) @ self.weights + self.bias

    def encode(self, x: np.ndarray) -> np.ndarray:
        pre = self.preactivation(x)
        if self.nonlinearity == "tanh":
            return np.tanh(pre)
        return pre

    def backprop(self, x: np.ndarray, upstream: np.ndarray) -> dict[str, np.ndarray]:
        """Parameter gradients given dL/d(output) for inputs x."""
        x = np.asarray(x, dtype=np.float64)
        upstream = np.asarray(upstream, dtype=np.float64)
        if self.nonlinearity == "tanh":
            act = np.tanh(self.preactivation(x))
            upstream = upstream * (1.0 - act * act)
        return {"weights": x.T @ upstream, "bias": upstream.sum(axis=0)}

    def save(self, path) -> None:
        flags = np.zeros(self.dim_out)
        flags[0] = float(NONLINEARITIES.index(self.nonlinearity))
        block = np.vstack([self.weights, self.bias[None, :], flags[None, :]])
        write_embeddings(path, block, magic=ENCODER_MAGIC)

    @classmethod
    def load(cls, path) -> "ToyEncoder":
        block = read_embeddings(path, magic=ENCODER_MAGIC)
        if block.shape[0] < 3:
            raise ShapeMismatch("encoder container must hold weights, bias, and flag rows")
        flags = block[-1]
        code = int(round(float(flags[0])))
        if code not in (0, 1):
            raise BadValue(f"unknown nonlinearity code {code}")
        return cls(
            weights=block[:-2].astype(np.float64),
            bias=block[-2].astype(np.float64),
            nonlinearity=NONLINEARITIES[code],
        )
