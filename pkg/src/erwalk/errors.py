"""Exception types raised across the package."""


class ErwalkError(Exception):
    """Base class for domain errors."""


class EmptyGraph(ErwalkError, ValueError):
    pass


class IsolatedVertex(ErwalkError, ValueError):
    def __init__(self, vertex):
        super().__init__(f"vertex {vertex} has degree 0")
        self.vertex = vertex


class Disconnected(ErwalkError, ValueError):
    def __init__(self, msg="graph is disconnected"):
        super().__init__(msg)


class SameVertex(ErwalkError, ValueError):
    pass


class EdgeListError(ErwalkError, ValueError):
    pass


class ParseError(EdgeListError):
    pass


class RangeError(EdgeListError):
    pass


class DuplicateEdge(EdgeListError):
    pass


class SelfLoop(EdgeListError):
    pass


class ConvergenceFailure(ErwalkError, ArithmeticError):
    pass


class GapZeroDivergence(ErwalkError, ArithmeticError):
    pass


class SingularSystem(ErwalkError, ArithmeticError):
    pass


class DegenerateScaling(ErwalkError, ValueError):
    pass


class CRangeError(ErwalkError, ValueError):
    pass


class ResampleLimitExceeded(ErwalkError, RuntimeError):
    def __init__(self, n, replicate):
        super().__init__(f"no connected sample for n={n}, replicate={replicate}")
        self.n = n
        self.replicate = replicate
