class GerbyMirrorError(Exception):
    """Base class for all library errors."""


class ShapeError(GerbyMirrorError, ValueError):
    pass


class NotSymmetric(GerbyMirrorError, ValueError):
    pass


class NotAntisymmetric(GerbyMirrorError, ValueError):
    pass


class IndeterminatePhase(GerbyMirrorError, ValueError):
    """The complex number is too small for its argument to mean anything."""


class InvalidTorus(GerbyMirrorError, ValueError):
    pass


class NotSymplecticType(GerbyMirrorError, ValueError):
    pass


class NotComplexType(GerbyMirrorError, ValueError):
    pass


class NotHolomorphic(GerbyMirrorError, ValueError):
    pass


class NotLagrangian(GerbyMirrorError, ValueError):
    pass


class MirrorUndefined(GerbyMirrorError, ValueError):
    """det(-tau - iY^t) vanishes, so the mirror complex structure is undefined."""


class ConfigError(GerbyMirrorError, ValueError):
    pass
