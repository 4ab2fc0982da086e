"""Node labels and CZ links of the time-frequency lattice.

Shared by the state-level construction and the scheduler so that both apply
the same gates in the same order with the same roles.
"""

from __future__ import annotations

from dataclasses import dataclass

STAGE_SITE = "site"
STAGE_TIME = "time"
STAGE_FREQUENCY = "frequency"


@dataclass(frozen=True)
class Link:
    """A CZ between a later ``field`` qumode and an earlier ``stored`` qumode."""

    stage: str
    channel: int
    field: tuple
    stored: tuple


def site_nodes(f: int, t: int) -> tuple[tuple, tuple]:
    """The field node and the read-out node of site ``(f, t)``."""
    return (f, t, 0), (f, t, 1)


def lattice_links(d: int, n: int) -> list[Link]:
    """CZ links in application order: time links per channel, then frequency
    links between neighbouring channels.

    ``channel`` is the frequency index for time links and the lower of the two
    channels for frequency links.
    """
    links = [
        Link(STAGE_TIME, f, (f, t + 1, 0), (f, t, 1)) for f in range(d) for t in range(n - 1)
    ]
    for f in range(d - 1):
        # alternate the node used so that no node takes part in two
        # frequency links; the qumode on the even channel is the earlier one
        s = f % 2
        for t in range(n):
            lower, upper = (f, t, s), (f + 1, t, s)
            field, stored = (upper, lower) if f % 2 == 0 else (lower, upper)
            links.append(Link(STAGE_FREQUENCY, f, field, stored))
    return links
