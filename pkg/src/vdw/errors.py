"""Exception hierarchy shared by every vdw module."""


class VdwError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(VdwError, ValueError):
    pass


class ColorOutOfRangeError(VdwError, ValueError):
    def __init__(self, position: int, color: int, r_declared: int):
        self.position = position
        self.color = color
        self.r_declared = r_declared
        super().__init__(
            f"color index {color} at position {position} is out of range "
            f"for r={r_declared}"
        )


class CertificateParseError(VdwError, ValueError):
    def __init__(self, offset: int, char: str):
        self.offset = offset
        self.char = char
        super().__init__(f"invalid character {char!r} at offset {offset}")


class SymbolOutOfRangeError(CertificateParseError, ColorOutOfRangeError):
    """A valid alphabet symbol whose color is not below the declared r."""

    def __init__(self, offset: int, char: str, position: int, color: int, r_declared: int):
        self.offset = offset
        self.char = char
        self.position = position
        self.color = color
        self.r_declared = r_declared
        ValueError.__init__(
            self,
            f"symbol {char!r} at offset {offset} (position {position}) is color "
            f"{color}, out of range for r={r_declared}",
        )


class UnrepresentableColorError(VdwError, ValueError):
    pass


class InvalidFormulaError(VdwError, ValueError):
    pass


class MalformedOutputError(VdwError, ValueError):
    pass


class InconsistentModelError(VdwError, ValueError):
    def __init__(self, position: int, true_colors: list[int]):
        self.position = position
        self.true_colors = true_colors
        what = "no color" if not true_colors else f"colors {true_colors}"
        super().__init__(f"model assigns {what} to position {position}")


class EnumerationGuardError(VdwError):
    pass
