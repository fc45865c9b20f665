"""Exception hierarchy shared by every module."""


class NbwalkError(Exception):
    """Base class for all library errors."""


class GraphError(NbwalkError, ValueError):
    """Input graph violates a structural assumption."""


class SelfLoop(GraphError):
    pass


class MultiEdge(GraphError):
    pass


class Malformed(GraphError):
    pass


class Empty(GraphError):
    pass


class DegreeTooSmall(GraphError):
    pass


class Infeasible(GraphError):
    pass


class GenerationFailure(NbwalkError, RuntimeError):
    pass


class WeightMismatch(NbwalkError, ValueError):
    pass


class HypothesesNotMet(NbwalkError, ValueError):
    """Raised by certificates; ``failed`` lists the unmet hypotheses."""

    def __init__(self, failed):
        self.failed = list(failed)
        super().__init__("hypotheses not met: " + ", ".join(self.failed))


class Disconnected(HypothesesNotMet):
    def __init__(self):
        super().__init__(["connected"])


class Bipartite(HypothesesNotMet):
    def __init__(self):
        super().__init__(["non-bipartite"])


class BipartiteInput(GraphError):
    pass


class NotMeanZero(NbwalkError, ValueError):
    pass


class NotATree(GraphError):
    pass


class NotRegular(GraphError):
    pass


class SpectralParameterNotInUpperHalfPlane(NbwalkError, ValueError):
    pass


class NonConvergence(NbwalkError, RuntimeError):
    def __init__(self, iterations, update_norm):
        self.iterations = iterations
        self.update_norm = update_norm
        super().__init__(
            f"fixed point did not converge after {iterations} iterations "
            f"(last update {update_norm:.3e})"
        )


class SingularMatrix(NbwalkError, ArithmeticError):
    pass


class SingularFactorization(SingularMatrix):
    pass


class SampleAtPole(NbwalkError, ValueError):
    pass


class PathNotAdmissible(NbwalkError, ValueError):
    """The edge pair is not joined by a non-backtracking path."""


class InconsistentField(NbwalkError, ArithmeticError):
    """Two directed evaluations of an edge Green function disagree."""
