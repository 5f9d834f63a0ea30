from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike


class Profile:
    """
    Base class for unscaled interaction profiles Φ on (0, ∞).

    Subclasses implement the shape on (0, 1) through `_inner`, `_inner_derivative`
    and `_inner_second_derivative`; the base class cuts everything off at u = 1.
    """

    profile_id: str  # To be set by subclasses

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.profile_id!r})"

    def value(self, u: ArrayLike) -> np.ndarray:
        """Φ(u); zero for u ≥ 1."""
        u = np.asarray(u, dtype=float)
        inside = u < 1.0
        safe = np.where(inside, u, 0.5)
        return np.where(inside, self._inner(safe), 0.0)

    def derivative(self, u: ArrayLike) -> np.ndarray:
        """Φ'(u); zero for u ≥ 1."""
        u = np.asarray(u, dtype=float)
        inside = u < 1.0
        safe = np.where(inside, u, 0.5)
        return np.where(inside, self._inner_derivative(safe), 0.0)

    def second_derivative(self, u: ArrayLike) -> np.ndarray:
        """Φ''(u); zero for u > 1."""
        u = np.asarray(u, dtype=float)
        inside = u < 1.0
        safe = np.where(inside, u, 0.5)
        return np.where(inside, self._inner_second_derivative(safe), 0.0)

    def secant_slope(self, u0: float, du: ArrayLike) -> np.ndarray:
        """
        (Φ(u0 + du) − Φ(u0)) / du for du ≥ 0, with Φ'(u0) at du = 0.

        The default divides a difference of values; subclasses override with a closed
        form that stays accurate when du is tiny compared with u0.
        """
        du = np.asarray(du, dtype=float)
        small = du <= 0.0
        safe = np.where(small, 1.0, du)
        quotient = (self.value(u0 + safe) - float(self.value(u0))) / safe
        return np.where(small, float(self.derivative(u0)), quotient)

    def _inner(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _inner_derivative(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _inner_second_derivative(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError
