"""
Line-oriented scenario text format.

    # comment
    [graph]
    vertex a b c
    edge a b 1.0
    [solver]
    dt = 0.01

Key/value sections hold ``key = value`` lines; the ``graph`` and ``probes``
sections hold rows. The parser only checks the syntax; values are validated
by the scenario serializers.
"""

import logging

from apps.core.exceptions import ScenarioError

logger = logging.getLogger(__name__)

ROW_SECTIONS = {
    "graph": {"vertex": None, "edge": 3},
    "probes": {"probe": 3},
}
KEY_SECTIONS = (
    "hamiltonian",
    "initial",
    "solver",
    "verification",
    "transform",
    "refinement",
    "output",
)


def _column(raw, token, start=0):
    return raw.index(token, start) + 1


def _parse_row(section, tokens, raw, number, rows):
    kind = tokens[0]
    expected = ROW_SECTIONS[section]
    if kind not in expected:
        raise ScenarioError(
            f"Unknown row {kind!r} in section [{section}]",
            line=number,
            column=_column(raw, kind),
        )
    arity = expected[kind]
    values = tokens[1:]
    if (arity is None and not values) or (arity is not None and len(values) != arity):
        raise ScenarioError(
            f"Row {kind!r} takes {arity or 'one or more'} values, got {len(values)}",
            line=number,
            column=_column(raw, kind),
        )
    rows.setdefault(kind, []).append(values)


def _parse_key(section, raw, number, entries):
    if "=" not in raw:
        raise ScenarioError(
            f"Expected 'key = value' in section [{section}]",
            line=number,
            column=len(raw) - len(raw.lstrip()) + 1,
        )
    key, _, value = raw.partition("=")
    key, value = key.strip(), value.strip()
    if not key or " " in key:
        raise ScenarioError("Malformed key", line=number, column=len(raw) - len(raw.lstrip()) + 1)
    if not value:
        raise ScenarioError(f"Missing value for {key!r}", line=number, column=raw.index("=") + 2)
    if key in entries:
        raise ScenarioError(
            f"Duplicate key {section}.{key}",
            key=f"{section}.{key}",
            line=number,
            column=_column(raw, key),
        )
    entries[key] = value


def parse_scenario(text):
    """
    Parse scenario ``text`` into a dictionary of sections.

    Key sections map to ``{key: raw string}``; ``graph`` maps to
    ``{"vertex": [[ids...], ...], "edge": [[u, v, length], ...]}`` and
    ``probes`` to ``{"probe": [[edge, offset, t], ...]}``.
    """
    sections = {}
    current = None
    for number, line in enumerate(text.splitlines(), start=1):
        raw = line.split("#", 1)[0].rstrip()
        stripped = raw.strip()
        if not stripped:
            continue
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ScenarioError("Unclosed section header", line=number, column=len(raw) + 1)
            name = stripped[1:-1].strip()
            if name not in ROW_SECTIONS and name not in KEY_SECTIONS:
                raise ScenarioError(
                    f"Unknown section [{name}]",
                    key=name,
                    line=number,
                    column=_column(raw, "[") + 1,
                )
            if name in sections:
                raise ScenarioError(
                    f"Section [{name}] appears twice", key=name, line=number, column=1
                )
            current = name
            sections[name] = {}
            continue
        if current is None:
            raise ScenarioError("Content before the first section", line=number, column=1)
        if current in ROW_SECTIONS:
            _parse_row(current, stripped.split(), raw, number, sections[current])
        else:
            _parse_key(current, raw, number, sections[current])

    logger.debug("Parsed scenario sections: %s", sorted(sections))
    return sections
