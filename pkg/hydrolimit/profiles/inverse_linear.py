import numpy as np

from ..profile import Profile


class InverseLinearProfile(Profile):
    """Φ(u) = 1/u + u − 2 on (0, 1]; C¹ at the cutoff since Φ'(1) = 0."""

    profile_id = "inverse-linear"

    def _inner(self, u: np.ndarray) -> np.ndarray:
        return 1.0 / u + u - 2.0

    def _inner_derivative(self, u: np.ndarray) -> np.ndarray:
        return 1.0 - 1.0 / u**2

    def _inner_second_derivative(self, u: np.ndarray) -> np.ndarray:
        return 2.0 / u**3

    def secant_slope(self, u0, du):
        # Φ(u) − Φ(u0) = (u − u0)(1 − 1/(u·u0)) inside the support
        du = np.asarray(du, dtype=float)
        u = u0 + du
        inside = 1.0 - 1.0 / (u * u0)
        outside = -float(self.value(u0)) / np.where(du > 0.0, du, 1.0)
        return np.where(u < 1.0, inside, outside)
