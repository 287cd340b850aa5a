"""Restricted CSS selector engine.

Supported grammar (enough for `.menu .group .item`-style configuration
without a full CSS engine): type selectors, `.class`, `#id`,
`:nth-child(n)` with a literal integer, the descendant combinator
(whitespace) and the child combinator (`>`). Compound selectors may stack
qualifiers, e.g. ``ul#nav.wide:nth-child(2) > li.item``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import InvalidSelector
from .dom import Node

DESCENDANT = " "
CHILD = ">"

_NAME = r"[A-Za-z_][A-Za-z0-9_-]*"
_TOKEN = re.compile(
    rf"(?P<ws>\s+)"
    rf"|(?P<child>>)"
    rf"|(?P<tag>\*|{_NAME})"
    rf"|#(?P<id>[A-Za-z0-9_-]+)"
    rf"|\.(?P<cls>{_NAME})"
    rf"|:nth-child\((?P<nth>[0-9]+)\)"
)


@dataclass(frozen=True)
class Compound:
    """One simple-selector group matched against a single element."""

    tag: str | None = None
    id_attr: str | None = None
    classes: frozenset[str] = field(default_factory=frozenset)
    nth_child: int | None = None

    def matches(self, node: Node) -> bool:
        if node.is_text:
            return False
        if self.tag is not None and node.tag != self.tag:
            return False
        if self.id_attr is not None and node.attributes.get("id") != self.id_attr:
            return False
        if self.classes and not self.classes.issubset(node.classes()):
            return False
        if self.nth_child is not None:
            if node.parent is None or node.element_index() + 1 != self.nth_child:
                return False
        return True


@dataclass(frozen=True)
class Selector:
    """Parsed selector: compounds joined by combinators, matched right to left."""

    source: str
    compounds: tuple[Compound, ...]
    combinators: tuple[str, ...]  # between compounds, len == len(compounds) - 1

    def matches(self, node: Node) -> bool:
        if node.is_text:
            return False
        return self._match_at(node, len(self.compounds) - 1)

    def _match_at(self, node: Node, index: int) -> bool:
        if not self.compounds[index].matches(node):
            return False
        if index == 0:
            return True
        combinator = self.combinators[index - 1]
        parent = node.parent
        if combinator == CHILD:
            return parent is not None and not parent.is_text and self._match_at(parent, index - 1)
        while parent is not None and not parent.is_text:
            if self._match_at(parent, index - 1):
                return True
            parent = parent.parent
        return False


def parse_selector(text: str) -> Selector:
    """Parse a selector string; raises InvalidSelector outside the grammar."""
    if not isinstance(text, str) or not text.strip():
        raise InvalidSelector(f"empty selector: {text!r}")

    stripped = text.strip()
    compounds: list[Compound] = []
    combinators: list[str] = []
    pending: str | None = None  # combinator waiting for the next compound
    current: dict | None = None
    pos = 0

    def flush() -> None:
        nonlocal current
        if current is not None:
            compounds.append(
                Compound(
                    tag=current["tag"],
                    id_attr=current["id"],
                    classes=frozenset(current["classes"]),
                    nth_child=current["nth"],
                )
            )
            current = None

    while pos < len(stripped):
        m = _TOKEN.match(stripped, pos)
        if m is None:
            raise InvalidSelector(f"unexpected {stripped[pos]!r} in selector {text!r}")
        pos = m.end()
        kind = m.lastgroup
        if kind == "ws":
            if current is not None:
                flush()
                pending = DESCENDANT
            continue
        if kind == "child":
            if current is not None:
                flush()
                pending = CHILD
            elif pending == DESCENDANT:
                pending = CHILD
            else:  # leading '>' or doubled combinator
                raise InvalidSelector(f"dangling '>' in selector {text!r}")
            continue
        if current is None:
            if compounds:
                combinators.append(pending if pending is not None else DESCENDANT)
            pending = None
            current = {"tag": None, "id": None, "classes": [], "nth": None}
        if kind == "tag":
            if current["tag"] is not None or current["id"] or current["classes"] or current["nth"]:
                raise InvalidSelector(f"misplaced type selector in {text!r}")
            tag = m.group("tag").lower()
            current["tag"] = None if tag == "*" else tag
        elif kind == "id":
            if current["id"] is not None:
                raise InvalidSelector(f"duplicate id qualifier in {text!r}")
            current["id"] = m.group("id")
        elif kind == "cls":
            current["classes"].append(m.group("cls"))
        elif kind == "nth":
            if current["nth"] is not None:
                raise InvalidSelector(f"duplicate :nth-child in {text!r}")
            n = int(m.group("nth"))
            if n < 1:
                raise InvalidSelector(f":nth-child index must be >= 1 in {text!r}")
            current["nth"] = n

    if pending is not None and current is None:
        raise InvalidSelector(f"trailing combinator in selector {text!r}")
    flush()
    if not compounds:
        raise InvalidSelector(f"empty selector: {text!r}")
    return Selector(source=stripped, compounds=tuple(compounds), combinators=tuple(combinators))


def select_all(root: Node, selector: Selector) -> list[Node]:
    """All elements under (and including) root matching selector, document order."""
    return [node for node in root.walk() if not node.is_text and selector.matches(node)]


@dataclass(frozen=True)
class SelectorSet:
    """Selector triple locating one family of menus in a document."""

    menu: str
    item: str
    group: str | None = None

    def parsed(self) -> tuple[Selector, Selector | None, Selector]:
        menu = parse_selector(self.menu)
        group = parse_selector(self.group) if self.group is not None else None
        item = parse_selector(self.item)
        return menu, group, item
