"""Exception types shared across the package."""


class GraphAtlasError(Exception):
    """Base class for all graphatlas errors."""


class ParseError(GraphAtlasError):
    """Malformed input text; carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ConfigError(GraphAtlasError):
    """Invalid configuration value or combination."""


class LayoutError(GraphAtlasError):
    """Layout cannot be computed for the given sub-graph."""


class ArrangementError(GraphAtlasError):
    """Invalid partition arrangement request (e.g. overlapping candidate box)."""


class EmptyLayerError(GraphAtlasError):
    """An abstraction step would produce a layer with no nodes."""


class StoreError(GraphAtlasError):
    """Store construction or query failure."""


class StoreLoadError(StoreError):
    """A persisted store file is unreadable, corrupt, or incompatible."""


class NotFoundError(GraphAtlasError):
    """Lookup target (layer, node) does not exist."""


class PipelineError(GraphAtlasError):
    """A preprocessing stage failed; message names the stage."""
