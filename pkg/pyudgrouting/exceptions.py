#!/usr/bin/env python

"""
Exceptions raised by the routing schemes and the harness
"""

from typing import Any


class RoutingError(Exception):
    """
    Base class of every error raised by `pyudgrouting`
    """


class DisconnectedGraph(RoutingError, ValueError):
    """
    The unit disk graph of the given sites is not connected
    """

    def __init__(self, message: str, components: int = 0):
        super().__init__(message)
        self.components = components


class DuplicateId(RoutingError, ValueError):
    pass


class InvalidEpsilon(RoutingError, ValueError):
    pass


class EpsilonTooSmall(RoutingError, ValueError):
    """
    The additive scheme and the decomposition need `epsilon > 1 / D`
    """

    def __init__(self, epsilon: float, diameter: float):
        super().__init__(
            f"epsilon={epsilon} must be larger than 1/D={1.0 / diameter if diameter else float('inf')}"
        )
        self.epsilon = epsilon
        self.diameter = diameter


class IncompatibleLabels(RoutingError, ValueError):
    pass


class NotANeighbor(RoutingError):
    """
    A routing function picked a vertex that is not adjacent to the current vertex.
    This is an internal consistency violation and points to a construction bug.
    """

    def __init__(self, current: int, chosen: int):
        super().__init__(f"vertex {chosen} is not a neighbor of {current}")
        self.current = current
        self.chosen = chosen


class NoCommonPortal(RoutingError):
    pass


class NoCommonLevel(RoutingError):
    pass


class SpannerPropertyViolated(RoutingError):
    def __init__(self, message: str, ratio: float = float("nan"), instance: Any = None):
        super().__init__(message)
        self.ratio = ratio
        self.instance = instance


class DegenerateInput(RoutingError, ValueError):
    pass


class DepthLimitExceeded(RoutingError):
    def __init__(self, height: int, limit: float, instance: Any = None):
        super().__init__(f"decomposition height {height} exceeds the limit {limit:.1f}")
        self.height = height
        self.limit = limit
        self.instance = instance


class CalibrationFailed(RoutingError):
    pass


class GenerationFailed(RoutingError):
    pass


class NonTermination(RoutingError):
    """
    A route did not reach its target within the step cap
    """

    def __init__(self, source: int, target: int, trace: list[int]):
        super().__init__(
            f"route {source} -> {target} did not terminate after {len(trace) - 1} hops"
        )
        self.source = source
        self.target = target
        self.trace = trace


class AssertionViolation(RoutingError):
    """
    A per-hop invariant failed during a simulation, `trace` holds the hops so far
    """

    def __init__(self, prop: str, message: str, trace: list[int] | None = None):
        super().__init__(f"{prop}: {message}")
        self.prop = prop
        self.trace = trace or []


class LabelFormatError(RoutingError, ValueError):
    pass
