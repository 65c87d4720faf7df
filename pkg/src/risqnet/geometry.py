"""3D node geometry for a single-QBS network with one RIS and N ground users.

Coordinates are meters in a fixed ground frame: x, y horizontal, h height
above ground. All optical paths are QBS -> RIS -> user, so the only derived
quantity links care about is the two-hop path length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class Point3D:
    """A node position; heights are above ground, so h >= 0."""

    x: float  # [m]
    y: float  # [m]
    h: float  # [m]

    def __post_init__(self) -> None:
        if self.h < 0:
            raise ValueError(f"height must be nonnegative, got {self.h}")


@dataclass(frozen=True, slots=True)
class DeploymentRegion:
    """Axis-aligned box of admissible RIS positions (closed intervals)."""

    x_min: float  # [m]
    x_max: float  # [m]
    y_min: float  # [m]
    y_max: float  # [m]
    h_min: float  # [m]
    h_max: float  # [m]

    def __post_init__(self) -> None:
        if not (self.x_min <= self.x_max and self.y_min <= self.y_max
                and self.h_min <= self.h_max):
            raise ValueError("region bounds must satisfy min <= max per axis")

    def contains(self, p: Point3D) -> bool:
        return region_contains(self, p)


@dataclass(frozen=True, slots=True)
class NetworkLayout:
    """QBS, user set, and a candidate RIS position.

    The minimum RIS-user separation is a deployment rule checked by the
    optimizer's feasibility tests, not a constructor invariant: partially
    built or deliberately invalid layouts must remain representable.
    """

    qbs: Point3D
    users: tuple[Point3D, ...]
    ris: Point3D

    def __post_init__(self) -> None:
        if len(self.users) == 0:
            raise ValueError("layout needs at least one user")
        object.__setattr__(self, "users", tuple(self.users))

    @property
    def n_users(self) -> int:
        return len(self.users)

    def min_ris_user_distance(self) -> float:
        return min(distance(self.ris, u) for u in self.users)


def distance(a: Point3D, b: Point3D) -> float:
    """Euclidean distance [m] between two nodes."""
    return math.sqrt((a.x - b.x) ** 2 + (a.y - b.y) ** 2 + (a.h - b.h) ** 2)


def e2e_distance(layout: NetworkLayout, user_index: int) -> float:
    """Two-hop path length QBS -> RIS -> user [m]."""
    user = layout.users[user_index]
    return distance(layout.qbs, layout.ris) + distance(layout.ris, user)


def region_contains(region: DeploymentRegion, p: Point3D) -> bool:
    """Closed-interval membership test on all three axes."""
    return (region.x_min <= p.x <= region.x_max
            and region.y_min <= p.y <= region.y_max
            and region.h_min <= p.h <= region.h_max)
