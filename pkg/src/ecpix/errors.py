"""Exception taxonomy shared by all ecpix modules.

The CLI maps these onto stable exit codes (see ecpix.cli), so library code
should raise the most specific class that applies.
"""


class EcpixError(Exception):
    """Base class for all ecpix errors."""


class ParameterError(EcpixError, ValueError):
    """Invalid argument: mismatched fields, bad shapes, unknown names."""


class FormatError(EcpixError, ValueError):
    """Malformed textual or serialized data (hex strings, JSON key files)."""


class UnsupportedFormatError(FormatError):
    """Recognizably foreign input: wrong image magic, unsupported depth."""


class CorruptFileError(FormatError):
    """Binary input that starts well but is truncated or inconsistent."""


class StructureError(EcpixError, ValueError):
    """Block/grid data whose dimensions violate the declared structure."""


class CapabilityError(EcpixError):
    """Operation refused because it is intractable at the given size."""


class KeyMaterialError(EcpixError):
    """Key material that is invalid or does not match the data it is used on."""


class EnvelopeError(EcpixError):
    """Cipher envelope metadata that conflicts with the supplied key."""


class DegenerateDataError(EcpixError, ValueError):
    """Statistic undefined for this input (e.g. zero-variance correlation)."""
