"""Exception hierarchy shared across the pipeline."""


class VeriScaleError(Exception):
    pass


# value model / file formats
class ValueSyntaxError(VeriScaleError):
    """Malformed value literal."""


class TypeMismatch(VeriScaleError):
    """A well-formed literal or payload that does not inhabit the requested type."""


class SchemaError(VeriScaleError):
    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer
        self.message = message


class UnknownType(SchemaError):
    pass


# mutation
class EmptySeedSet(VeriScaleError):
    pass


# seed generation / prompts
class MissingPrecondText(VeriScaleError):
    pass


class MissingSlot(VeriScaleError):
    pass


class NoJsonArray(VeriScaleError):
    pass


class ClientError(VeriScaleError):
    def __init__(self, message: str, round_index: int | None = None):
        if round_index is not None:
            message = f"round {round_index}: {message}"
        super().__init__(message)
        self.round_index = round_index


# classifier / backends
class BackendInconsistency(VeriScaleError):
    pass


class BackendUnavailable(VeriScaleError):
    pass


class ExecutorUnavailable(VeriScaleError):
    pass


class CompileError(VeriScaleError):
    pass


# adversarial
class NoBlocksFound(VeriScaleError):
    pass


class NotConjunctive(VeriScaleError):
    pass


# harness
class EmptySuiteSet(VeriScaleError):
    pass


class ConfigError(VeriScaleError):
    pass
