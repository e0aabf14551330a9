"""Exception types raised across the package."""


class ThreeSpinError(Exception):
    pass


class DomainError(ThreeSpinError, ValueError):
    """Parameter outside the admissible region."""


class DimensionMismatch(ThreeSpinError, ValueError):
    pass


class NotHermitian(ThreeSpinError, ValueError):
    pass


class NotAState(ThreeSpinError, ValueError):
    """Matrix is not a valid density matrix (Hermitian, PSD, unit trace)."""


class NonDiagonalizable(ThreeSpinError):
    """Eigendecomposition reconstruction residual exceeded the threshold."""

    def __init__(self, residual, threshold):
        super().__init__(f"eigendecomposition residual {residual:.3e} exceeds {threshold:.1e}")
        self.residual = residual
        self.threshold = threshold


class BlockLeakage(ThreeSpinError):
    """Superoperator couples index pairs from different sigma_1 sectors."""


class DegenerateOmegas(ThreeSpinError):
    """Two of the four omega eigenvalues coincide; closed form (+,-) is invalid."""

    def __init__(self, min_gap):
        super().__init__(f"omega eigenvalues degenerate (min pairwise gap {min_gap:.3e})")
        self.min_gap = min_gap


class StepSizeError(ThreeSpinError, ValueError):
    pass


class TraceDrift(ThreeSpinError):
    pass


class IdentityViolation(ThreeSpinError):
    """Two computations of the same quantity disagree."""
