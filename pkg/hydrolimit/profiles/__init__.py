from .inverse_linear import InverseLinearProfile
from .inverse_square import InverseSquareProfile

PROFILES = {
    InverseLinearProfile.profile_id: InverseLinearProfile,
    InverseSquareProfile.profile_id: InverseSquareProfile,
}

__all__ = ["InverseLinearProfile", "InverseSquareProfile", "PROFILES"]
