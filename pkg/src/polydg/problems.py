"""Manufactured Poisson problems on the unit square."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["Problem", "PROBLEMS", "get_problem", "linear_problem"]

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class Problem:
    name: str
    u: Callable
    grad: Callable
    f: Callable
    g: Callable | None

    def __repr__(self) -> str:
        return f"Problem({self.name!r})"


def _paper_u(x, y):
    return np.sin(TWO_PI * x) * np.cos(TWO_PI * y)


def _paper_grad(x, y):
    return np.stack(
        [TWO_PI * np.cos(TWO_PI * x) * np.cos(TWO_PI * y),
         -TWO_PI * np.sin(TWO_PI * x) * np.sin(TWO_PI * y)], axis=-1)


def _sinsin_u(x, y):
    return np.sin(TWO_PI * x) * np.sin(TWO_PI * y)


def _sinsin_grad(x, y):
    return np.stack(
        [TWO_PI * np.cos(TWO_PI * x) * np.sin(TWO_PI * y),
         TWO_PI * np.sin(TWO_PI * x) * np.cos(TWO_PI * y)], axis=-1)


# sin(2 pi x) cos(2 pi y) does not vanish on y = 0, 1; its trace is imposed as g
PAPER = Problem("paper", _paper_u, _paper_grad, lambda x, y: 8 * np.pi**2 * _paper_u(x, y), _paper_u)
SINSIN = Problem("sinsin", _sinsin_u, _sinsin_grad, lambda x, y: 8 * np.pi**2 * _sinsin_u(x, y), None)


def linear_problem(a: float = 1.0, b: float = 2.0, c: float = 0.0) -> Problem:
    """``u = c + a x + b y``: harmonic, reproduced exactly by degree >= 1."""

    def u(x, y):
        return c + a * np.asarray(x) + b * np.asarray(y)

    def grad(x, y):
        shape = np.broadcast(x, y).shape
        return np.stack([np.full(shape, a), np.full(shape, b)], axis=-1)

    return Problem("linear", u, grad, lambda x, y: np.zeros(np.broadcast(x, y).shape), u)


PROBLEMS = {"paper": PAPER, "sinsin": SINSIN, "linear": linear_problem()}


def get_problem(name: str) -> Problem:
    try:
        return PROBLEMS[name]
    except KeyError:
        raise ValueError(f"unknown problem {name!r}; choose from {sorted(PROBLEMS)}") from None
