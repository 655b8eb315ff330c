"""Bus and line primitives shared across the package.

A line is an unordered pair of distinct bus names, stored as a tuple sorted
lexicographically so that equal lines compare equal everywhere.  Multiple
physical circuits on the same tower pair are represented by one line plus a
multiplicity kept on the network.
"""

from __future__ import annotations

Line = tuple[str, str]

# Characters with structural meaning in the text formats.  Bus names that
# contain them cannot be serialized unambiguously, so they are rejected at
# the point of formatting; an alias map is the supported workaround.
RESERVED_CHARS = "-;|,"


def canonical_line(a: str, b: str) -> Line:
    """Return the canonical (sorted) form of the line between buses a and b.

    Raises ValueError if the endpoints coincide, since a line from a bus to
    itself is meaningless here.
    """
    if a == b:
        raise ValueError(f"line endpoints coincide: {a!r}")
    return (a, b) if a < b else (b, a)


def check_serializable_bus(name: str) -> str:
    """Validate that a bus name can appear in the text formats."""
    if not name:
        raise ValueError("empty bus name")
    for ch in RESERVED_CHARS:
        if ch in name:
            raise ValueError(
                f"bus name {name!r} contains reserved character {ch!r}; "
                "map it to a clean name with an alias file"
            )
    return name


def format_line(line: Line) -> str:
    """Format a line as ``FROM-TO`` with endpoints in canonical order."""
    a, b = line
    return f"{check_serializable_bus(a)}-{check_serializable_bus(b)}"


def parse_line(text: str) -> Line:
    """Parse a ``FROM-TO`` token back into a canonical line."""
    parts = text.split("-")
    if len(parts) != 2 or not parts[0] or not parts[1]:
        raise ValueError(f"malformed line token: {text!r}")
    return canonical_line(parts[0], parts[1])
