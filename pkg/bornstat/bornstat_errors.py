"""
Exception hierarchy shared by every bornstat module.

Each exception also derives from the built-in a caller would expect, so code
catching ``ValueError`` or ``RuntimeError`` keeps working.
"""


class BornstatError(Exception):
    """ Root of all bornstat errors """
    pass


class ConfigError(BornstatError, ValueError):
    """ Invalid parameters, grids or configuration values """
    pass


class InputError(ConfigError):
    """ Malformed input to an analysis routine (e.g. too few sizes) """
    pass


class DomainError(BornstatError, ValueError):
    """ Argument outside the mathematical domain of the operation """
    pass


class PoleError(DomainError):
    """ Requested quantity sits on a pole (e.g. tan(phi_k) = 0) """
    pass


class CapacityError(BornstatError, MemoryError):
    """ Requested size exceeds a configured capacity limit """

    def __init__(self, msg: str, cap: int=None):
        super().__init__(msg)
        #: The cap that was exceeded, if any
        self.cap = cap


class VerificationError(BornstatError, RuntimeError):
    """ A contract check (e.g. MBQC equivalence) failed """
    pass
