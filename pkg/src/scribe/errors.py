"""Exception hierarchy shared across the engine."""


class ScribeError(Exception):
    """Base class for all engine errors."""


class UnsupportedFeature(ScribeError):
    """Query uses a SPARQL feature outside the supported subset."""


class UnknownVariableInProjection(ScribeError):
    """A projected variable does not occur in any triple pattern."""


class ParseError(ScribeError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EndpointError(ScribeError):
    """Base class for endpoint transport failures."""


class QueryTimeout(EndpointError):
    """The endpoint did not answer within its timeout.

    This is a normal control-flow outcome for the initializer and the
    relaxation engine, not a fatal error.
    """


class NetworkError(EndpointError):
    """The endpoint could not be reached (distinct from a timeout)."""


class MalformedResponse(EndpointError):
    """The endpoint answered with something that is not a SPARQL result."""


class InitFailure(ScribeError):
    """Endpoint initialization could not complete its mandatory queries."""


class BudgetExhausted(ScribeError):
    """A query budget ran out; callers finalize with what they have."""


class NoConnectionFound(ScribeError):
    """Relaxation could not connect the seed groups."""


class AllEndpointsFailed(ScribeError):
    """Every registered endpoint failed for a federated query."""


class StaleSession(ScribeError):
    """A suggestion was accepted against an outdated execution."""
