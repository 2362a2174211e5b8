"""Exception hierarchy shared by all modules."""


class PeriaError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class PresentationError(PeriaError, ValueError):
    pass


class PeriaSyntaxError(PresentationError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class WordError(PeriaError, ValueError):
    pass


class ResourceBoundError(PeriaError):
    """A configured enumeration bound was exceeded."""

    def __init__(self, what: str, bound: int):
        super().__init__(f"{what} exceeded the configured bound {bound}")
        self.bound = bound


class GraphError(PeriaError, ValueError):
    pass


class NotCliqueGatedError(GraphError):
    def __init__(self, vertex, clique):
        super().__init__(f"clique {tuple(clique)} has no gate for vertex {vertex}")
        self.vertex = vertex
        self.clique = tuple(clique)


class ParallelismNotTransitiveError(GraphError):
    def __init__(self, cliques):
        a, b, c = cliques
        super().__init__(f"parallelism is not transitive: {a} || {b} and {b} || {c} but not {a} || {c}")
        self.cliques = tuple(cliques)


class IncoherentMetricsError(GraphError):
    def __init__(self, c1, c2):
        super().__init__(f"projection {c1} -> {c2} is not an isometry of clique metrics")
        self.cliques = (c1, c2)


class PartitionSpaceError(GraphError):
    pass


class RadiusError(PeriaError):
    """An answer could not be certified inside the explored ball."""


class PrecisionError(PeriaError, ArithmeticError):
    pass
