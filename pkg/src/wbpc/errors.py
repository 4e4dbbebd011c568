"""Exception types shared across the codec."""


class CodecError(Exception):
    """Base class for all codec errors."""


class UnsupportedLayoutError(CodecError, ValueError):
    """Channel layout not supported by the requested operation."""


class ShapeError(CodecError, ValueError):
    """Array shapes are inconsistent with each other."""


class DomainError(CodecError, ValueError):
    """Argument outside the operation's domain."""


class LevelRangeError(CodecError, ValueError):
    """Decomposition or decode level out of range."""


class DepthOverflowError(CodecError, ValueError):
    """Coefficient magnitude does not fit the declared plane depth."""


class StreamIndexError(CodecError, IndexError):
    """Serialized-area index out of range."""


class EmptyAlphabetError(CodecError, ValueError):
    """No symbol has a nonzero frequency."""


class CodeLengthError(CodecError, ValueError):
    """A Huffman codeword exceeded the 32-bit cap."""


class MalformedTreeError(CodecError, ValueError):
    """Serialized Huffman tree is truncated, overlong or inconsistent."""


class TruncationError(CodecError, ValueError):
    """Bitstream ended before the expected data was read."""


class MalformedPayloadError(CodecError, ValueError):
    """Payload decodes to something structurally impossible."""


class BlockParseError(CodecError, ValueError):
    """Compressed block header cannot be parsed."""


class CorruptionError(CodecError, ValueError):
    """Parsed structures contradict each other (bad seek table, index...)."""


class ContainerParseError(CodecError, ValueError):
    """Container magic/version/layout is invalid."""
