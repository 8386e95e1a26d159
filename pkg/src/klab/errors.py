"""Exception hierarchy shared by all modules.

Every failure raised by the library derives from :class:`KlabError`, so the
command line front end can map any of them to exit code 3 and print the class
name.
"""


class KlabError(Exception):
    """Base class for computation errors."""


class PointOnCut(KlabError):
    pass


class NoConvergence(KlabError):
    pass


class Diverged(KlabError):
    pass


class DegenerateDegree(KlabError):
    pass


class DegenerateMoment(KlabError):
    """A diagonal mixed moment vanished, so the next polynomial does not exist."""

    def __init__(self, k, N=None, message=None):
        self.k = k
        self.N = N
        where = f"k={k}" if N is None else f"k={k}, N={N}"
        super().__init__(message or f"vanishing norm at {where}")


class Nonexistent(KlabError):
    pass


class ZeroDerivative(KlabError):
    pass


class SingularParameter(KlabError):
    pass


class LostCurve(KlabError):
    pass


class AmbiguousNearBoundary(KlabError):
    def __init__(self, re_h_cr, message=None):
        self.re_h_cr = re_h_cr
        super().__init__(message or f"Re h_cr = {re_h_cr} inside tolerance band")


class BranchJump(KlabError):
    pass


class WrongRegion(KlabError):
    pass


class TruncationInsufficient(KlabError):
    pass


class NearDegenerate(KlabError):
    pass


class NotOnBreakingCurve(KlabError):
    pass


class RegionMismatch(KlabError):
    pass


class BVPDiverged(KlabError):
    pass


class OutOfDomain(KlabError):
    pass
