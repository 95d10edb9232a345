"""Error taxonomy shared across the package.

Two failure families matter to callers: bad input that never made it into
the engine (IngestError) and input that is formally valid but collapses the
geometry (DegenerateDataError). Plain ValueError is reserved for contract
violations by calling code.
"""


class IngestError(ValueError):
    """Raised when a file, manifest or raw array cannot be turned into a valid dataset."""


class DegenerateDataError(ValueError):
    """Raised when data admits no meaningful clustering (e.g. all points identical)."""
