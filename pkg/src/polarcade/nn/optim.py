"""Adam with bias correction, plus Polyak averaging for target networks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .tensor import Tensor


@dataclass
class AdamState:
    lr: float = 3e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1.5e-4
    step_count: int = 0
    m: list[np.ndarray] = field(default_factory=list)
    v: list[np.ndarray] = field(default_factory=list)

    @classmethod
    def for_params(cls, params: Sequence[Tensor], *, lr: float = 3e-4,
                   eps: float = 1.5e-4, beta1: float = 0.9,
                   beta2: float = 0.999) -> "AdamState":
        state = cls(lr=lr, beta1=beta1, beta2=beta2, eps=eps)
        state.m = [np.zeros_like(p.data) for p in params]
        state.v = [np.zeros_like(p.data) for p in params]
        return state


def adam_step(params: Sequence[Tensor], grads: Sequence[np.ndarray | None],
              state: AdamState):
    """One in-place Adam update; entries whose gradient is None are skipped."""
    state.step_count += 1
    t = state.step_count
    correct1 = 1.0 - state.beta1**t
    correct2 = 1.0 - state.beta2**t
    for p, g, m, v in zip(params, grads, state.m, state.v):
        if g is None:
            continue
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)
        update = (m / correct1) / (np.sqrt(v / correct2) + state.eps)
        p.data -= state.lr * update.astype(p.data.dtype)


def step_with_grads(params: Sequence[Tensor], state: AdamState):
    """Convenience: feed each parameter's accumulated gradient to adam_step."""
    adam_step(params, [p.grad for p in params], state)


def soft_update(target: Sequence[Tensor], online: Sequence[Tensor], rho: float):
    """target <- rho * target + (1 - rho) * online, in place."""
    for t, o in zip(target, online):
        t.data *= rho
        t.data += (1.0 - rho) * o.data


def hard_update(target: Sequence[Tensor], online: Sequence[Tensor]):
    for t, o in zip(target, online):
        np.copyto(t.data, o.data)
