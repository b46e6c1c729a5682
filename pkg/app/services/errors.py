class CertifyError(Exception):
    """Base class for every error raised by the certificate engine"""


class ExactError(CertifyError):
    """Malformed exact-arithmetic input (bad chamber, non-skew matrix, non-affine expression)"""


class LatticeError(CertifyError):
    """Dimension mismatch or inconsistent intersection data"""


class NotPseudoEffectiveError(CertifyError):
    """Raised by the Zariski oracle when the divisor is not pseudo-effective"""

    def __init__(self, detail: str = ""):
        message = "not pseudo-effective"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)


class CorpusError(CertifyError):
    """Base class for corpus loading failures (exit status 2)"""


class CorpusParseError(CorpusError):
    def __init__(self, path, line: int | None, message: str):
        self.path = str(path)
        self.line = line
        self.message = message
        where = f"{self.path}:{line}" if line is not None else self.path
        super().__init__(f"{where}: {message}")


class DanglingReferenceError(CorpusError):
    """A certificate or scope names a geometry, surface, divisor or curve that does not exist"""


class SelfCheckError(CorpusError):
    """A geometry fails its anticanonical-cube or printed-table self-check"""
