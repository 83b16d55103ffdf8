"""Problem dimensions and the derived degrees of freedom used everywhere."""

from dataclasses import dataclass

from .errors import DimensionMismatch


@dataclass(frozen=True)
class Dims:
    """Dimensions of the detection problem.

    Parameters
    ----------
    N : int
        Number of channels (length of each data vector).
    K : int
        Number of secondary (training) vectors.
    r : int
        Dimension of the signal subspace.
    t : int
        Dimension of the jammer subspace.
    """

    N: int
    K: int
    r: int
    t: int

    def __post_init__(self):
        if self.r < 1 or self.t < 1:
            raise DimensionMismatch(f"r and t must be >= 1, got r={self.r}, t={self.t}")
        if self.N < 2:
            raise DimensionMismatch(f"N must be >= 2, got {self.N}")
        if self.m > self.N:
            raise DimensionMismatch(f"t + r = {self.m} exceeds N = {self.N}")
        if self.K < self.N:
            raise DimensionMismatch(f"K = {self.K} must be >= N = {self.N}")

    @property
    def m(self) -> int:
        return self.t + self.r

    @property
    def full(self) -> bool:
        """True when the signal-plus-jammer subspace fills the whole space."""
        return self.m == self.N

    @property
    def n_rest(self) -> int:
        return self.N - self.m

    @property
    def dof_p1(self) -> int:
        # first complex dof of the conditional law of p1: K - (N - t) + 1
        return self.K - (self.N - self.t) + 1

    @property
    def dof_p2(self) -> tuple:
        return (self.K - (self.N - self.t) + self.r + 1, self.N - self.t - self.r)

    @property
    def dof_p3(self) -> tuple:
        return (self.K - self.r + 1, self.r)

    @property
    def a(self) -> float:
        """Slope constant of the locally optimum statistic."""
        if self.full:
            return (self.K - self.r + 1) / self.r
        return self.dof_p1 / self.r
