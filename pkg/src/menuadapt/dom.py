"""HTML document tree: lenient parsing and canonical serialization.

The tree is the substrate everything else works on: selectors query it,
element ids are computed from it, and adaptation plans mutate it. Parsing
is recovery-based (stdlib ``html.parser`` events), so malformed markup is
repaired rather than rejected. Serialization is canonical -- sorted
attributes, fixed escaping -- so that byte comparison of two serializations
is a sound structural-equality check.
"""

from __future__ import annotations

from html.parser import HTMLParser

TEXT_TAG = "#text"
DOCUMENT_TAG = "#document"

VOID_ELEMENTS = frozenset(
    "area base br col embed hr img input link meta param source track wbr".split()
)

# Start of <tag> implicitly closes an open element whose tag is listed here.
_CLOSED_BY_SIBLING = {
    "li": ("li",),
    "dt": ("dt", "dd"),
    "dd": ("dt", "dd"),
    "tr": ("tr", "td", "th"),
    "td": ("td", "th"),
    "th": ("td", "th"),
    "option": ("option",),
    "optgroup": ("option", "optgroup"),
    "p": ("p",),
}

# Block-level starts also terminate an open <p>.
_BLOCK_TAGS = frozenset(
    (
        "address article aside blockquote details div dl fieldset figure footer form "
        "h1 h2 h3 h4 h5 h6 header hr main menu nav ol p pre section table ul"
    ).split()
)


class Node:
    """One element or text run. Text nodes use tag ``#text``."""

    __slots__ = ("tag", "attributes", "children", "text", "parent")

    def __init__(self, tag: str, attributes: dict[str, str] | None = None, text: str = ""):
        self.tag = tag
        self.attributes: dict[str, str] = attributes if attributes is not None else {}
        self.children: list[Node] = []
        self.text = text
        self.parent: Node | None = None

    @property
    def is_text(self) -> bool:
        return self.tag == TEXT_TAG

    def append(self, child: "Node") -> "Node":
        child.parent = self
        self.children.append(child)
        return child

    def element_children(self) -> list["Node"]:
        return [c for c in self.children if not c.is_text]

    def element_index(self) -> int:
        """Position among the parent's element children (0 for a root)."""
        if self.parent is None:
            return 0
        index = 0
        for sibling in self.parent.children:
            if sibling is self:
                return index
            if not sibling.is_text:
                index += 1
        raise ValueError("node detached from its parent")

    def classes(self) -> list[str]:
        return self.attributes.get("class", "").split()

    def walk(self):
        """Yield self and all descendants in document order."""
        yield self
        for child in self.children:
            yield from child.walk()

    def iter_text(self):
        for node in self.walk():
            if node.is_text:
                yield node.text

    def label_text(self) -> str:
        """Concatenated descendant text with whitespace collapsed."""
        return " ".join("".join(self.iter_text()).split())

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        if self.is_text:
            return f"Node(#text {self.text!r})"
        return f"Node(<{self.tag}> children={len(self.children)})"


class DocumentTree:
    """Parsed document. ``root`` is a synthetic #document node holding <html>."""

    __slots__ = ("root", "_unique_ids", "active_application")

    def __init__(self, root: Node):
        self.root = root
        self._unique_ids: frozenset[str] | None = None
        # Set by styles.apply_plan while an adaptation is in effect.
        self.active_application = None

    @property
    def html(self) -> Node:
        return self.root.element_children()[0]

    @property
    def body(self) -> Node:
        for child in self.html.element_children():
            if child.tag == "body":
                return child
        raise ValueError("document has no body")

    def unique_ids(self) -> frozenset[str]:
        """Values of `id` attributes that occur exactly once in the document."""
        if self._unique_ids is None:
            counts: dict[str, int] = {}
            for node in self.root.walk():
                value = node.attributes.get("id")
                if value is not None:
                    counts[value] = counts.get(value, 0) + 1
            self._unique_ids = frozenset(v for v, n in counts.items() if n == 1)
        return self._unique_ids


class _TreeBuilder(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.top_level: list[Node] = []
        self.stack: list[Node] = []

    def _append(self, node: Node) -> None:
        if self.stack:
            self.stack[-1].append(node)
        else:
            self.top_level.append(node)

    def _make_element(self, tag: str, attrs) -> Node:
        attributes: dict[str, str] = {}
        for name, value in attrs:
            # First occurrence wins on duplicate attributes.
            if name not in attributes:
                attributes[name] = value if value is not None else ""
        return Node(tag, attributes)

    def _implied_close(self, tag: str) -> None:
        while self.stack:
            open_tag = self.stack[-1].tag
            if open_tag in _CLOSED_BY_SIBLING.get(tag, ()):
                self.stack.pop()
            elif open_tag == "p" and tag in _BLOCK_TAGS:
                self.stack.pop()
            else:
                break

    def handle_starttag(self, tag: str, attrs) -> None:
        self._implied_close(tag)
        node = self._make_element(tag, attrs)
        self._append(node)
        if tag not in VOID_ELEMENTS:
            self.stack.append(node)

    def handle_startendtag(self, tag: str, attrs) -> None:
        self._implied_close(tag)
        self._append(self._make_element(tag, attrs))

    def handle_endtag(self, tag: str) -> None:
        if tag in VOID_ELEMENTS:
            return
        for i in range(len(self.stack) - 1, -1, -1):
            if self.stack[i].tag == tag:
                del self.stack[i:]
                return
        # Stray end tag: ignore.

    def handle_data(self, data: str) -> None:
        if not data:
            return
        parent_children = self.stack[-1].children if self.stack else self.top_level
        if parent_children and parent_children[-1].is_text:
            parent_children[-1].text += data
            return
        self._append(Node(TEXT_TAG, text=data))


def parse_document(html_text: str) -> DocumentTree:
    """Parse HTML text into a DocumentTree.

    Parsing is total: malformed markup is recovered (implied closes, stray
    end tags dropped, unclosed elements closed at EOF). The result is
    normalized to #document > html > (head, body); top-level content that
    is not wrapped in <html> lands in the body.
    """
    builder = _TreeBuilder()
    builder.feed(html_text)
    builder.close()

    root = Node(DOCUMENT_TAG)
    html_node = next(
        (n for n in builder.top_level if not n.is_text and n.tag == "html"), None
    )
    if html_node is None:
        html_node = Node("html")
        head = Node("head")
        body = Node("body")
        html_node.append(head)
        html_node.append(body)
        for node in builder.top_level:
            if node.is_text and not node.text.strip():
                continue
            body.append(node)
    else:
        elements = {child.tag for child in html_node.element_children()}
        if "head" not in elements:
            head = Node("head")
            head.parent = html_node
            html_node.children.insert(0, head)
        if "body" not in elements:
            body = Node("body")
            moved = [
                c
                for c in html_node.children
                if not (c.is_text or c.tag in ("head", "body"))
            ]
            for node in moved:
                html_node.children.remove(node)
                body.append(node)
            html_node.append(body)
    root.append(html_node)
    return DocumentTree(root)


def _escape_text(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _escape_attr(value: str) -> str:
    return _escape_text(value).replace('"', "&quot;")


def _serialize(node: Node, out: list[str]) -> None:
    if node.is_text:
        out.append(_escape_text(node.text))
        return
    out.append(f"<{node.tag}")
    for name in sorted(node.attributes):
        out.append(f' {name}="{_escape_attr(node.attributes[name])}"')
    out.append(">")
    if node.tag in VOID_ELEMENTS:
        return
    for child in node.children:
        _serialize(child, out)
    out.append(f"</{node.tag}>")


def canonical_html(tree: DocumentTree) -> str:
    """Deterministic serialization: sorted attributes, fixed escaping.

    Two trees are structurally equal iff their canonical forms are
    byte-identical; reversibility checks rely on this.
    """
    out: list[str] = ["<!DOCTYPE html>"]
    for child in tree.root.children:
        _serialize(child, out)
    out.append("\n")
    return "".join(out)
