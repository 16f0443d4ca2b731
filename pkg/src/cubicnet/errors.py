class CubicNetError(Exception):
    """Base class for engine errors."""


class MultipleZero(CubicNetError):
    pass


class BranchAmbiguity(CubicNetError):
    pass


class Hit(CubicNetError):
    """Closest approach below the hit tolerance: the target is reached."""

    def __init__(self, distance):
        super().__init__(f"hit at distance {distance:.3e}")
        self.distance = distance


class CoreAssemblyFailure(CubicNetError):
    pass


class UnclassifiedCore(CubicNetError):
    pass


class QuadratureStall(CubicNetError):
    pass


class NotReducible(CubicNetError):
    pass


class NoTriangle(CubicNetError):
    pass


class WallNotBracketed(CubicNetError):
    pass


class AmbiguousClass(CubicNetError):
    def __init__(self, msg, near=()):
        super().__init__(msg)
        self.near = list(near)


class BoundaryRayActive(CubicNetError):
    pass


class ConfigError(CubicNetError):
    pass
