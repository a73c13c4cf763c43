"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Operands have incompatible or malformed dimensions."""


class GridMismatchError(ValueError):
    """Histories or bridging sets defined on different time grids."""


class DegenerateHistoryError(ValueError):
    """Zero-norm history where a normalizable state is required."""


class ImpossiblePostselectionError(ValueError):
    """Boundary conditions give zero total weight; conditionals undefined."""


class NonFactorizableEvolutionError(ValueError):
    """Bridging evolution does not factor across the requested subsystem split."""
