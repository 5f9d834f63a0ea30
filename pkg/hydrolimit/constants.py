from enum import Enum, auto


class Scenario(Enum):
    GHOST = "ghost"
    REVERSE = "reverse"
    TRANSVERSE = "transverse"
    LAYERS = "layers"
    SCATTER = "scatter"
    SWEEP = "sweep"


class LimitTag(Enum):
    """Closed-form limit measures that can be discretized."""

    GHOST = "ghost"
    REVERSE = "reverse"
    TRANSVERSE = "transverse"
    TWO_LAYER = "two-layer"
    THREE_LAYER = "three-layer"


class LayerKind(Enum):
    TWO = "two"
    THREE = "three"


class CollisionType(Enum):
    BINARY = "binary"
    TRIPLE = "triple"


class Moment(Enum):
    """Velocity weights g(v) of the 1D moment equations."""

    MASS = auto()
    MOMENTUM = auto()
    ENERGY = auto()


class Law(Enum):
    MASS = "mass"
    MOMENTUM = "momentum"
    ENERGY = "energy"


class W1Mode(Enum):
    EXACT = "exact"
    SLICED = "sliced"


# Largest combined atom count solved exactly by min-cost transport
EXACT_W1_MAX_ATOMS = 1024

# Projection count and seed of the sliced W1 approximation
SLICED_PROJECTIONS = 64
SLICED_SEED = 20240601

SUMMARY_SCHEMA_VERSION = 1
