"""Exception hierarchy.

Two families matter to callers (and to the CLI exit-code mapping):

* ``InputError`` — bad geometry, bad parameters, violated preconditions.
  The computation never started; fix the input.  CLI exit code 2.
* ``NumericalError`` — the computation ran and could not reach its
  accuracy or convergence target.  CLI exit code 3.
"""


class ConvfactorError(Exception):
    """Base class for everything raised deliberately by this package."""


class InputError(ConvfactorError):
    """Invalid input or violated precondition; computation not attempted."""


class NumericalError(ConvfactorError):
    """Computation attempted but failed to meet its numerical target."""


# -- geometry ---------------------------------------------------------------

class OverlappingComponents(InputError):
    def __init__(self, i, j, gap):
        self.indices = (i, j)
        self.gap = gap
        super().__init__(
            f"components {i} and {j} are not disjoint (gap {gap:.3g})")


class DegenerateShape(InputError):
    def __init__(self, index, reason):
        self.index = index
        super().__init__(f"component {index} is degenerate: {reason}")


class EmptyInteriorComponent(InputError):
    """Component 0 must have nonempty interior (it hosts the expansion point)."""


class TooFewComponents(InputError):
    """A compact set needs component 0 plus at least one outer component."""


class PointNotInterior(InputError):
    pass


class TooFewPoints(InputError):
    pass


class PointOnContour(InputError):
    pass


class ContourCollision(InputError):
    """Inflation so large that contours collide with each other or the set."""


class ContourTouchesSet(InputError):
    pass


class PointInsideSet(InputError):
    pass


class DiskIntersectsSet(InputError):
    pass


class GridTooCoarse(InputError):
    pass


class BadSequenceSpec(InputError):
    pass


class BadScenarioParameter(InputError):
    """Scenario parameter outside its documented range."""


class RefusedOutsideInterval(InputError):
    """Requested ratio lies outside the window where the step search is sound."""

    def __init__(self, ratio, lower, upper):
        self.ratio = ratio
        self.window = (lower, upper)
        super().__init__(
            f"ratio {ratio:.6g} outside admissible window "
            f"({lower:.6g}, {upper:.6g})")


# -- numerics ---------------------------------------------------------------

class IllConditioned(NumericalError):
    def __init__(self, message, cond_estimate=None):
        self.cond_estimate = cond_estimate
        super().__init__(message)


class ResidualTooLarge(NumericalError):
    def __init__(self, residual, limit):
        self.residual = residual
        self.limit = limit
        super().__init__(
            f"boundary residual {residual:.3g} exceeds limit {limit:.3g} "
            "after refinement; increase charge count")


class ResolutionTooCoarse(NumericalError):
    """Raster cannot separate the components' level-set collars."""


class NonConvergence(NumericalError):
    pass


class InsufficientDecadeRange(NumericalError):
    """Deviation data spans too little dynamic range for a reliable fit."""


class BernsteinViolation(NumericalError):
    """Polynomial growth exceeds its potential-theoretic ceiling: solver bug."""

    def __init__(self, point, lhs, rhs):
        self.point = point
        self.lhs = lhs
        self.rhs = rhs
        super().__init__(
            f"growth bound violated at {point!r}: {lhs:.12g} > {rhs:.12g}")


class StepNotFound(NumericalError):
    """No truncation degree within the search budget met both error targets."""

    def __init__(self, n_max, best_err_inner, best_err_outer):
        self.n_max = n_max
        self.best_err_inner = best_err_inner
        self.best_err_outer = best_err_outer
        super().__init__(
            f"no degree <= {n_max} met both targets "
            f"(best inner {best_err_inner:.3g}, best outer {best_err_outer:.3g})")


class SearchExhausted(NumericalError):
    pass


class InternalInconsistency(ConvfactorError):
    """Two classification rules that exclude each other both fired."""
