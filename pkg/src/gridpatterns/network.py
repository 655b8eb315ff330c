"""Transmission network as a connected simple graph with line multiplicities.

Multiple circuits between the same pair of buses are collapsed into a single
line whose multiplicity records the distinct circuit count.  All pattern
extraction and generation happens on this single-line graph.
"""

from __future__ import annotations

import csv
from collections import deque
from typing import Iterable, Mapping, NamedTuple

from .errors import DegenerateDataError, InputFormatError
from .ingest import OutageRecord
from .lines import Line, canonical_line, check_serializable_bus


class Network:
    """Immutable connected network of buses and lines.

    Parameters
    ----------
    lines:
        Iterable of bus pairs.  Pairs are canonicalized and deduplicated.
    multiplicity:
        Optional map from line to distinct circuit count (default 1).

    Raises ValueError if the resulting graph is empty or not connected;
    callers that start from raw data should reduce to the largest connected
    component first (see :func:`build_network_from_outages`).
    """

    def __init__(self, lines: Iterable[tuple[str, str]], multiplicity: Mapping[Line, int] | None = None):
        canon = sorted({canonical_line(a, b) for a, b in lines})
        if not canon:
            raise ValueError("network has no lines")
        self.lines: tuple[Line, ...] = tuple(canon)
        self.line_set: frozenset[Line] = frozenset(canon)
        mult = {line: 1 for line in canon}
        if multiplicity:
            for line, count in multiplicity.items():
                key = canonical_line(*line)
                if key not in mult:
                    raise ValueError(f"multiplicity given for unknown line {key}")
                if int(count) < 1:
                    raise ValueError(f"multiplicity for line {key} must be >= 1")
                mult[key] = int(count)
        self.multiplicity: dict[Line, int] = mult
        adjacency: dict[str, list[Line]] = {}
        for line in canon:
            adjacency.setdefault(line[0], []).append(line)
            adjacency.setdefault(line[1], []).append(line)
        self.adjacency: dict[str, tuple[Line, ...]] = {
            bus: tuple(sorted(incident)) for bus, incident in sorted(adjacency.items())
        }
        self.buses: frozenset[str] = frozenset(self.adjacency)
        self.multi_circuit_lines: tuple[Line, ...] = tuple(
            line for line in canon if mult[line] >= 2
        )
        if not self._is_connected():
            raise ValueError("network is not connected")

    def _is_connected(self) -> bool:
        start = next(iter(self.buses))
        seen = {start}
        queue = deque([start])
        while queue:
            bus = queue.popleft()
            for line in self.adjacency[bus]:
                other = line[1] if line[0] == bus else line[0]
                if other not in seen:
                    seen.add(other)
                    queue.append(other)
        return len(seen) == len(self.buses)

    @property
    def n_lines(self) -> int:
        return len(self.lines)

    @property
    def n_buses(self) -> int:
        return len(self.buses)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Network):
            return NotImplemented
        return self.lines == other.lines and self.multiplicity == other.multiplicity

    def __repr__(self) -> str:
        return f"Network({self.n_buses} buses, {self.n_lines} lines)"


class AttachablePartition(NamedTuple):
    """Candidate lines for growing a pattern, split by pattern-bus degree."""

    at_degree_1: frozenset[Line]
    at_degree_2plus: frozenset[Line]


def pattern_degrees(pattern_lines: Iterable[Line]) -> dict[str, int]:
    """Degree of each bus inside the subgraph formed by ``pattern_lines``."""
    degrees: dict[str, int] = {}
    for a, b in pattern_lines:
        degrees[a] = degrees.get(a, 0) + 1
        degrees[b] = degrees.get(b, 0) + 1
    return degrees


def partition_attachable(
    network: Network, pattern_lines: frozenset[Line] | set[Line], degrees: Mapping[str, int]
) -> tuple[tuple[Line, ...], tuple[Line, ...]]:
    """Split the lines adjacent to a pattern by the degree of the bus they touch.

    A candidate line incident to both a degree-1 bus and a degree-2-or-more
    bus of the pattern appears on both sides.  Each side is sorted so that
    uniform selection by index is deterministic given a random stream.
    """
    at_deg1: set[Line] = set()
    at_deg2: set[Line] = set()
    for bus, degree in degrees.items():
        side = at_deg1 if degree == 1 else at_deg2
        for line in network.adjacency[bus]:
            if line not in pattern_lines:
                side.add(line)
    return tuple(sorted(at_deg1)), tuple(sorted(at_deg2))


def attachable_lines(network: Network, pattern_lines: Iterable[Line]) -> AttachablePartition:
    """Public wrapper returning the attachable-line partition for a pattern.

    Raises ValueError if the pattern is empty or uses lines outside the
    network.
    """
    pat = frozenset(canonical_line(a, b) for a, b in pattern_lines)
    if not pat:
        raise ValueError("pattern has no lines")
    extra = pat - network.line_set
    if extra:
        raise ValueError(f"pattern uses lines outside the network: {sorted(extra)[:3]}")
    deg1, deg2 = partition_attachable(network, pat, pattern_degrees(pat))
    return AttachablePartition(frozenset(deg1), frozenset(deg2))


def _largest_component(lines: Iterable[Line]) -> set[Line]:
    """Lines of the largest connected component.

    Largest is judged by line count, then bus count, then smallest bus name,
    so the choice is deterministic.
    """
    adjacency: dict[str, list[Line]] = {}
    for line in lines:
        adjacency.setdefault(line[0], []).append(line)
        adjacency.setdefault(line[1], []).append(line)
    unvisited = set(adjacency)
    best: tuple[int, int, str] | None = None
    best_lines: set[Line] = set()
    while unvisited:
        start = min(unvisited)
        comp_buses = {start}
        comp_lines: set[Line] = set()
        queue = deque([start])
        while queue:
            bus = queue.popleft()
            for line in adjacency[bus]:
                comp_lines.add(line)
                other = line[1] if line[0] == bus else line[0]
                if other not in comp_buses:
                    comp_buses.add(other)
                    queue.append(other)
        unvisited -= comp_buses
        key = (len(comp_lines), len(comp_buses), min(comp_buses))
        # min() on the name ranks earlier names higher for the tie break
        if best is None or key[:2] > best[:2] or (key[:2] == best[:2] and key[2] < best[2]):
            best = key
            best_lines = comp_lines
    return best_lines


def build_network_from_outages(
    records: Iterable[OutageRecord], exclusions: Iterable[Line] = ()
) -> Network:
    """Build the network implied by an outage history.

    Every line ever outaged becomes a network line; its multiplicity is the
    number of distinct circuit identifiers seen for it across the whole
    history.  Excluded lines are removed, then the largest connected
    component is retained.
    """
    circuits: dict[Line, set[str]] = {}
    for rec in records:
        circuits.setdefault(rec.line, set()).add(rec.circuit_id)
    if not circuits:
        raise DegenerateDataError("no outage records to build a network from")
    for line in exclusions:
        circuits.pop(canonical_line(*line), None)
    if not circuits:
        raise DegenerateDataError("all lines were excluded")
    keep = _largest_component(circuits)
    return Network(keep, {line: len(circuits[line]) for line in keep})


def write_network_csv(path, network: Network) -> None:
    """Write ``from_bus,to_bus,multiplicity`` rows sorted by line."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("from_bus", "to_bus", "multiplicity"))
        for line in network.lines:
            writer.writerow(
                (
                    check_serializable_bus(line[0]),
                    check_serializable_bus(line[1]),
                    network.multiplicity[line],
                )
            )


def read_network_csv(path) -> Network:
    """Read a network CSV written by :func:`write_network_csv`."""
    lines: list[Line] = []
    multiplicity: dict[Line, int] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(cell.strip().lower() for cell in header) != (
            "from_bus",
            "to_bus",
            "multiplicity",
        ):
            raise InputFormatError(f"{path}: expected header from_bus,to_bus,multiplicity")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise InputFormatError(f"{path}: line {lineno}: expected 3 fields, got {len(row)}")
            try:
                line = canonical_line(row[0], row[1])
                count = int(row[2])
            except ValueError as exc:
                raise InputFormatError(f"{path}: line {lineno}: {exc}") from exc
            if line in multiplicity:
                raise InputFormatError(f"{path}: line {lineno}: duplicate line {line}")
            if count < 1:
                raise InputFormatError(f"{path}: line {lineno}: multiplicity must be >= 1")
            lines.append(line)
            multiplicity[line] = count
    if not lines:
        raise DegenerateDataError(f"{path}: network file has no lines")
    try:
        return Network(lines, multiplicity)
    except ValueError as exc:
        raise InputFormatError(f"{path}: {exc}") from exc
