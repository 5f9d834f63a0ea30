import numpy as np

from ..profile import Profile


class InverseSquareProfile(Profile):
    """Φ(u) = (1/u − 1)² on (0, 1]."""

    profile_id = "inverse-square"

    def _inner(self, u: np.ndarray) -> np.ndarray:
        return (1.0 / u - 1.0) ** 2

    def _inner_derivative(self, u: np.ndarray) -> np.ndarray:
        return -2.0 * (1.0 / u - 1.0) / u**2

    def _inner_second_derivative(self, u: np.ndarray) -> np.ndarray:
        return (6.0 / u - 4.0) / u**3

    def secant_slope(self, u0, du):
        # a² − b² = (a − b)(a + b) with a − b = −du/(u·u0)
        du = np.asarray(du, dtype=float)
        u = u0 + du
        inside = -((1.0 / u - 1.0) + (1.0 / u0 - 1.0)) / (u * u0)
        outside = -float(self.value(u0)) / np.where(du > 0.0, du, 1.0)
        return np.where(u < 1.0, inside, outside)
