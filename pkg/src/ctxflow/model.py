"""Core graph entities: descriptions, attribute values, elements, and log records.

A workflow is a set of named elements carrying string attributes. An attribute
is either a literal string or a `FlowRef`, a pending constraint that the value
be copied from an attribute of another element (or from the run arguments via
the reserved source token ``@args``). Reduction replaces FlowRefs with
literals one arrow at a time.
"""

from __future__ import annotations

from dataclasses import dataclass, field

WORKFLOW_ORIGIN = "workflow"
ARGS_SOURCE = "@args"
WILDCARD = "*"


def _require_token(text: str, what: str) -> str:
    if not text or text != text.strip() or any(ch.isspace() for ch in text):
        raise ValueError(f"{what} must be a non-empty token, got {text!r}")
    return text


@dataclass
class Description:
    """Ordered key/value identity of a workflow element.

    Serializes canonically as comma-joined ``key=value`` pairs in insertion
    order. Keys are unique; keys and values are non-empty tokens.
    """

    entries: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for k, v in self.entries.items():
            _require_token(k, "description key")
            _require_token(v, "description value")

    def canonical(self) -> str:
        return ",".join(f"{k}={v}" for k, v in self.entries.items())

    def subsumes(self, other: Description) -> bool:
        """True if every pair of this description appears in `other`."""
        return all(other.entries.get(k) == v for k, v in self.entries.items())

    def merged(self, extra: dict[str, str]) -> Description:
        out = dict(self.entries)
        out.update(extra)
        return Description(out)

    @classmethod
    def parse(cls, text: str) -> Description:
        entries: dict[str, str] = {}
        for piece in text.split(","):
            if "=" not in piece:
                raise ValueError(f"description pair without '=': {piece!r}")
            k, v = piece.split("=", 1)
            if k in entries:
                raise ValueError(f"duplicate description key: {k}")
            entries[k] = v
        return cls(entries)

    def __str__(self) -> str:
        return self.canonical()


@dataclass
class HeaderPattern:
    """Match target for context block headers, aliases, and pattern deps.

    Each key maps to a list of admissible values; ``*`` admits any value.
    Canonical text form: ``key=v1,v2,key2=v3`` (a comma piece containing
    ``=`` starts a new key, otherwise it extends the previous key's list).
    """

    entries: dict[str, list[str]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.entries:
            raise ValueError("pattern must have at least one key")
        for k, vals in self.entries.items():
            _require_token(k, "pattern key")
            if not vals:
                raise ValueError(f"pattern key {k} has no values")
            for v in vals:
                _require_token(v, "pattern value")

    def matches(self, description: Description) -> bool:
        """True if every pattern key is present in `description` with an
        admitted value. Extra description keys are permitted."""
        for key, alternatives in self.entries.items():
            actual = description.entries.get(key)
            if actual is None:
                return False
            if WILDCARD not in alternatives and actual not in alternatives:
                return False
        return True

    def canonical(self) -> str:
        parts = []
        for k, vals in self.entries.items():
            parts.append(f"{k}={vals[0]}")
            parts.extend(vals[1:])
        return ",".join(parts)

    def single_value(self) -> str | None:
        """The unique concrete value when the pattern is one key with one
        non-wildcard value; used to derive alias element names."""
        if len(self.entries) != 1:
            return None
        values = next(iter(self.entries.values()))
        if len(values) == 1 and values[0] != WILDCARD:
            return values[0]
        return None

    @classmethod
    def parse(cls, text: str) -> HeaderPattern:
        entries: dict[str, list[str]] = {}
        current: str | None = None
        for piece in text.split(","):
            if "=" in piece:
                current, v = piece.split("=", 1)
                entries.setdefault(current, []).append(v)
            elif current is not None:
                entries[current].append(piece)
            else:
                raise ValueError(f"pattern must start with key=value, got {text!r}")
        return cls(entries)

    def __str__(self) -> str:
        return self.canonical()


@dataclass(frozen=True)
class FlowRef:
    """One metadata-flow arrow stored on its target attribute.

    `source` is an element name, an alias, or the reserved token ``@args``.
    """

    source: str
    attr: str

    def __str__(self) -> str:
        return f"::{self.source}:{self.attr}"


AttrValue = str | FlowRef

# A dependency target is an element name (resolved when added) or a pattern
# matched lazily against element descriptions at ordering time.
DependencyTarget = str | HeaderPattern


def render_value(value: str | FlowRef) -> str:
    """Macro-language text of an attribute value."""
    return value if isinstance(value, str) else str(value)


@dataclass
class WorkflowElement:
    """A node of the workflow multigraph.

    Application nodes take part in sequencing; metadata terminals exist only
    to source or sink metadata flows and never appear in emitted DAG arrows.
    `history` records the statements that shaped this element, in order, so
    the state can be replayed as a macro document.
    """

    name: str
    description: Description
    is_terminal: bool = False
    attributes: dict[str, str | FlowRef] = field(default_factory=dict)
    attr_origins: dict[str, str] = field(default_factory=dict)
    dependencies: list[str | HeaderPattern] = field(default_factory=list)
    handlers: dict[str, str] = field(default_factory=dict)
    history: list[tuple] = field(default_factory=list, compare=False, repr=False)
    applied_directives: set[tuple] = field(default_factory=set, compare=False, repr=False)


@dataclass
class CheckConstraint:
    """Equality check: the target attribute must equal the expected value
    (a literal, or a value read through a reference). False is an error."""

    element: str
    key: str
    expected: str | FlowRef


@dataclass
class ReductionEvent:
    """One provenance log record.

    kind ``REDUCE``: a flow was satisfied and removed; `source`/`source_attr`
    name the resolved origin (or ``@args``) and `doc` the document that
    defined the flow. kind ``SHADOW``: a later directive overwrote an earlier
    write to the same attribute.
    """

    seq: int
    kind: str
    element: str
    attribute: str
    source: str | None = None
    source_attr: str | None = None
    value: str | None = None
    doc: str | None = None
    old_doc: str | None = None
    new_doc: str | None = None

    REDUCE = "REDUCE"
    SHADOW = "SHADOW"


@dataclass
class CollisionRecord:
    """Two writes landed on the same (element, attribute) target."""

    element: str
    attribute: str
    old_value: str
    old_doc: str
    new_value: str
    new_doc: str
