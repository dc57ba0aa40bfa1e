"""Adam update with bias correction, implemented functionally.

Weight decay enters as an additive gradient term (decay * param) before
the moment updates; passing step t >= 1 applies the published bias
corrections 1 - beta^t.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ShapeMismatch

Params = dict[str, np.ndarray]


@dataclass
class AdamState:
    first_moment: Params = field(default_factory=dict)
    second_moment: Params = field(default_factory=dict)

    @classmethod
    def for_params(cls, params: Params) -> "AdamState":
        return cls(
            first_moment={k: np.zeros_like(v, dtype=np.float64) for k, v in params.items()},
            second_moment={k: np.zeros_like(v, dtype=np.float64) for k, v in params.items()},
        )


def adam_step(
    params: Params,
    grads: Params,
    state: AdamState,
    learning_rate: float,
    step: int,
    beta1: float = 0.9,
    beta2: float = 0.999,
    epsilon: float = 1e-8,
    weight_decay: float = 0.0,
) -> tuple[Params, AdamState]:
    """One Adam update; returns new params and state without mutating inputs."""
    if set(params) != set(grads):
        raise ShapeMismatch(f"param/grad keys differ: {sorted(params)} vs {sorted(grads)}")
    if step < 1:
        raise ShapeMismatch("step must be >= 1 for bias correction")
    new_params: Params = {}
    new_m: Params = {}
    new_v: Params = {}
    for key, p in params.items():
        g = np.asarray(grads[key], dtype=np.float64)
        if g.shape != p.shape:
            raise ShapeMismatch(f"gradient shape {g.shape} vs param shape {p.shape} for {key!r}")
        if weight_decay:
            g = g + weight_decay * p
        m = beta1 * state.first_moment[key] + (1.0 - beta1) * g
        v = beta2 * state.second_moment[key] + (1.0 - beta2) * (g * g)
        m_hat = m / (1.0 - beta1**step)
        v_hat = v / (1.0 - beta2**step)
        new_params[key] = p - learning_rate * m_hat / (np.sqrt(v_hat) + epsilon)
        new_m[key] = m
        new_v[key] = v
    return new_params, AdamState(first_moment=new_m, second_moment=new_v)
