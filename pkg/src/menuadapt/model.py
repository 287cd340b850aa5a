"""Abstract menu model: stable element identifiers and menu extraction.

Menus are abstracted as menu > group > item over the parsed document.
Each element gets an ElementId that is a pure function of its position in
the original document, so interaction history keyed on it stays valid
across sessions and is untouched by later adaptation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from urllib.parse import quote, unquote, urljoin, urlsplit

from .dom import DocumentTree, Node
from .errors import NoMenuMatched
from .selectors import Selector, SelectorSet, select_all


@dataclass(frozen=True)
class Step:
    tag: str
    id_attr: str | None
    sibling_index: int


_STEP_RE = re.compile(r"^(?P<tag>[^#:>]+)(?:#(?P<id>[^:>]*))?:(?P<index>\d+)$")


@dataclass(frozen=True)
class ElementId:
    """Structural identifier: path from the nearest unique-id ancestor.

    Canonical string form joins steps with `>`, each step rendered
    `tag#id:index` (`#id` omitted when absent), e.g. ``ul#nav:0>li:2``.
    Ids are percent-escaped in the string form so the rendering stays
    unambiguous and round-trips for any attribute value.
    """

    steps: tuple[Step, ...]

    @property
    def key(self) -> str:
        return str(self)

    def __str__(self) -> str:
        parts = []
        for step in self.steps:
            rendered = step.tag
            if step.id_attr is not None:
                rendered += "#" + quote(step.id_attr, safe="")
            parts.append(f"{rendered}:{step.sibling_index}")
        return ">".join(parts)

    @classmethod
    def parse(cls, text: str) -> "ElementId":
        steps = []
        for raw in text.split(">"):
            m = _STEP_RE.match(raw)
            if m is None:
                raise ValueError(f"malformed element id step: {raw!r}")
            id_attr = m.group("id")
            steps.append(
                Step(
                    tag=m.group("tag"),
                    id_attr=unquote(id_attr) if id_attr is not None else None,
                    sibling_index=int(m.group("index")),
                )
            )
        return cls(steps=tuple(steps))


def compute_element_id(node: Node, doc: DocumentTree) -> ElementId:
    """Identifier from tag, id attribute and sibling position along the path.

    The path is anchored at the nearest ancestor-or-self carrying an `id`
    attribute whose value is unique in the document (falling back to the
    document root), which keeps ids short and stable against edits in
    unrelated parts of the page.
    """
    unique_ids = doc.unique_ids()
    chain: list[Node] = []
    current: Node | None = node
    while current is not None and current.tag != "#document":
        chain.append(current)
        node_id = current.attributes.get("id")
        if node_id is not None and node_id in unique_ids:
            break
        current = current.parent
    chain.reverse()
    steps = tuple(
        Step(
            tag=n.tag,
            id_attr=n.attributes.get("id"),
            sibling_index=n.element_index(),
        )
        for n in chain
    )
    return ElementId(steps=steps)


# --- Page identity -------------------------------------------------------

_SCHEME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.-]*:")
_NON_PAGE_SCHEMES = ("javascript", "mailto", "tel", "data", "about")


def normalize_page_path(href: str, base: str | None = None) -> str | None:
    """Reduce a link target to its page identity: the URL path alone.

    Query string and fragment are dropped, a trailing slash is removed
    (except for the bare root), comparison stays case-sensitive. Relative
    references resolve against `base` (the linking page's own identity).
    Returns None for non-navigation schemes such as javascript: links.
    Idempotent: normalizing an already-normalized path is a no-op.
    """
    if href is None:
        return None
    m = _SCHEME_RE.match(href)
    if m is not None and m.group(0)[:-1].lower() in _NON_PAGE_SCHEMES:
        return None
    resolved = urljoin(base if base else "/", href)
    path = urlsplit(resolved).path
    if path.endswith("/") and len(path) > 1:
        path = path.rstrip("/")
        if not path:
            path = "/"
    if not path:
        path = base if base else "/"
    return path


# --- Menu model ----------------------------------------------------------


@dataclass
class Item:
    id: ElementId
    label: str
    page_target: str | None
    node: Node
    menu_index: int = 0
    group_index: int = 0

    @property
    def key(self) -> str:
        return self.id.key


@dataclass
class Group:
    id: ElementId
    node: Node
    items: list[Item] = field(default_factory=list)
    implicit: bool = False

    @property
    def key(self) -> str:
        return self.id.key


@dataclass
class Menu:
    id: ElementId
    node: Node
    groups: list[Group] = field(default_factory=list)

    @property
    def key(self) -> str:
        return self.id.key

    def items(self) -> list[Item]:
        return [item for group in self.groups for item in group.items]


@dataclass
class MenuModel:
    menus: list[Menu] = field(default_factory=list)
    node_by_id: dict[str, Node] = field(default_factory=dict)

    def items(self) -> list[Item]:
        return [item for menu in self.menus for item in menu.items()]

    def item_count(self) -> int:
        return sum(len(menu.items()) for menu in self.menus)

    def item_keys(self) -> set[str]:
        return {item.key for item in self.items()}

    def describe(self) -> dict:
        """JSON-ready structural description (canonical, for stability checks)."""
        return {
            "menus": [
                {
                    "id": menu.key,
                    "groups": [
                        {
                            "id": group.key,
                            "implicit": group.implicit,
                            "items": [
                                {
                                    "id": item.key,
                                    "label": item.label,
                                    "page_target": item.page_target,
                                }
                                for item in group.items
                            ],
                        }
                        for group in menu.groups
                    ],
                }
                for menu in self.menus
            ]
        }


def _nearest_ancestor_in(node: Node, candidates: dict[int, int]) -> int | None:
    """Index of the nearest strict ancestor present in candidates (by identity)."""
    parent = node.parent
    while parent is not None:
        found = candidates.get(id(parent))
        if found is not None:
            return found
        parent = parent.parent
    return None


def _first_link_target(node: Node, base: str | None) -> str | None:
    for candidate in node.walk():
        if not candidate.is_text and candidate.tag == "a" and "href" in candidate.attributes:
            return normalize_page_path(candidate.attributes["href"], base)
    return None


def extract_menus(
    doc: DocumentTree, selectors: SelectorSet, base_page: str | None = None
) -> MenuModel:
    """Extract the abstract menu structure for one selector triple.

    Every node matching the item selector that descends from a node
    matching the menu selector becomes an Item, attached to its nearest
    enclosing menu. Grouping follows the group selector when given; a menu
    without explicit groups gets one implicit group (sharing the menu's
    node), and so do stray items that fall outside every matched group.

    Raises NoMenuMatched when the menu selector matches nothing;
    InvalidSelector propagates from selector parsing.
    """
    menu_sel, group_sel, item_sel = selectors.parsed()
    root = doc.root

    menu_nodes = select_all(root, menu_sel)
    if not menu_nodes:
        raise NoMenuMatched(f"menu selector matched nothing: {selectors.menu!r}")
    menu_index_of = {id(n): i for i, n in enumerate(menu_nodes)}

    menus = [Menu(id=compute_element_id(n, doc), node=n) for n in menu_nodes]

    group_nodes: list[Node] = select_all(root, group_sel) if group_sel is not None else []
    group_index_of = {id(n): i for i, n in enumerate(group_nodes)}
    # Group -> owning menu (nearest menu ancestor); groups outside every menu
    # are dropped. Built in document order so group listing stays ordered.
    groups: list[Group | None] = [None] * len(group_nodes)
    group_menu: list[int | None] = [None] * len(group_nodes)
    for gi, gnode in enumerate(group_nodes):
        owner = _nearest_ancestor_in(gnode, menu_index_of)
        if owner is None:
            continue
        group_menu[gi] = owner
        group = Group(id=compute_element_id(gnode, doc), node=gnode)
        groups[gi] = group
        menus[owner].groups.append(group)

    implicit_groups: dict[int, Group] = {}

    def implicit_group_for(menu_idx: int) -> Group:
        group = implicit_groups.get(menu_idx)
        if group is None:
            menu = menus[menu_idx]
            group = Group(id=menu.id, node=menu.node, implicit=True)
            implicit_groups[menu_idx] = group
            menu.groups.append(group)
        return group

    for item_node in select_all(root, item_sel):
        menu_idx = _nearest_ancestor_in(item_node, menu_index_of)
        if menu_idx is None:
            continue
        group: Group | None = None
        gi = _nearest_ancestor_in(item_node, group_index_of)
        if gi is not None and group_menu[gi] == menu_idx:
            group = groups[gi]
        if group is None:
            group = implicit_group_for(menu_idx)
        item = Item(
            id=compute_element_id(item_node, doc),
            label=item_node.label_text(),
            page_target=_first_link_target(item_node, base_page),
            node=item_node,
        )
        group.items.append(item)

    node_by_id: dict[str, Node] = {}
    for mi, menu in enumerate(menus):
        node_by_id[menu.key] = menu.node
        for gi, group in enumerate(menu.groups):
            node_by_id[group.key] = group.node
            for item in group.items:
                item.menu_index = mi
                item.group_index = gi
                node_by_id[item.key] = item.node
    return MenuModel(menus=menus, node_by_id=node_by_id)


def extract_all(
    doc: DocumentTree, selector_sets: list[SelectorSet], base_page: str | None = None
) -> MenuModel:
    """Extract and merge menus for several selector triples.

    A selector set that matches no menu is skipped; NoMenuMatched is raised
    only when none of the sets matched anything.
    """
    merged = MenuModel()
    matched_any = False
    for selectors in selector_sets:
        try:
            part = extract_menus(doc, selectors, base_page)
        except NoMenuMatched:
            continue
        matched_any = True
        offset = len(merged.menus)
        for menu in part.menus:
            for group in menu.groups:
                for item in group.items:
                    item.menu_index += offset
            merged.menus.append(menu)
        merged.node_by_id.update(part.node_by_id)
    if not matched_any:
        raise NoMenuMatched("no selector set matched any menu")
    return merged
