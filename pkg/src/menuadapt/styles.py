"""Adaptation styles: turn scores into reversible mutation plans.

Styles never touch the document while planning; they emit an ordered list
of mutations against element ids bound at extraction time. Only apply()
mutates the tree, recording enough to restore it exactly, so any plan
(including composites) cancels back to a byte-identical canonical
serialization. Decoupling planning from rendering is what lets the CLI
diff plans without a browser in the loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .dom import DocumentTree, Node
from .errors import AlreadyApplied, StaleTarget
from .model import MenuModel
from .policies import ScoredGroup, ScoredItem

STYLE_NAMES = ("highlight", "reorder-items", "reorder-groups", "fold")

HIGHLIGHT_TOKEN = "sam-highlighted"
FOLD_TOKEN = "sam-folded"
FOLD_TOGGLE_TOKEN = "sam-fold-toggle"

SIZE_FUNCTION = "auto"


@dataclass(frozen=True)
class StyleConfig:
    """A single style name or an ordered composite of style names."""

    style_name: str | tuple[str, ...] = "highlight"
    top_n: int | str = SIZE_FUNCTION
    min_visible_on_fold: int = 3

    def members(self) -> tuple[str, ...]:
        if isinstance(self.style_name, str):
            return (self.style_name,)
        return tuple(self.style_name)

    def validate(self) -> None:
        names = self.members()
        if not names:
            raise ValueError("composite style must not be empty")
        if len(set(names)) != len(names):
            raise ValueError(f"composite style has duplicates: {names}")
        for name in names:
            if name not in STYLE_NAMES:
                raise ValueError(f"unknown style {name!r}; expected one of {STYLE_NAMES}")
        if isinstance(self.top_n, str):
            if self.top_n != SIZE_FUNCTION:
                raise ValueError(f"top_n must be a positive integer or {SIZE_FUNCTION!r}")
        elif self.top_n < 1:
            raise ValueError(f"top_n must be >= 1, got {self.top_n}")
        if self.min_visible_on_fold < 1:
            raise ValueError(f"min_visible_on_fold must be >= 1, got {self.min_visible_on_fold}")


def compose(styles: list[str] | tuple[str, ...], **kwargs) -> StyleConfig:
    """Composite style applying members in order (and cancelling in reverse)."""
    config = StyleConfig(style_name=tuple(styles), **kwargs)
    config.validate()
    return config


def top_n(menu_item_count: int, config: StyleConfig) -> int:
    """Number of elements to adapt: fixed, or a function of the menu size.

    The size function takes a fifth of the menu, clamped to the 2..5 range
    that split-menu designs settled on for their promoted-item count.
    """
    if isinstance(config.top_n, int):
        return config.top_n
    return min(max(math.ceil(0.2 * menu_item_count), 2), 5)


# --- Mutations and plans ---------------------------------------------------


@dataclass(frozen=True)
class AddMarker:
    target: str  # canonical element-id string
    token: str

    def to_obj(self) -> dict:
        return {"op": "add-marker", "target": self.target, "token": self.token}


@dataclass(frozen=True)
class MoveBefore:
    target: str
    anchor: str | None  # None means front of the target's parent

    def to_obj(self) -> dict:
        return {"op": "move-before", "target": self.target, "anchor": self.anchor}


@dataclass(frozen=True)
class Collapse:
    target: str

    def to_obj(self) -> dict:
        return {"op": "collapse", "target": self.target}


Mutation = AddMarker | MoveBefore | Collapse


@dataclass(frozen=True)
class AdaptationPlan:
    mutations: tuple[Mutation, ...] = ()

    @property
    def empty(self) -> bool:
        return not self.mutations

    def to_obj(self) -> list[dict]:
        return [m.to_obj() for m in self.mutations]

    def __add__(self, other: "AdaptationPlan") -> "AdaptationPlan":
        return AdaptationPlan(mutations=self.mutations + other.mutations)


# --- Planners --------------------------------------------------------------


def _per_menu(scored: list[ScoredItem]) -> dict[int, list[ScoredItem]]:
    blocks: dict[int, list[ScoredItem]] = {}
    for s in scored:
        blocks.setdefault(s.item.menu_index, []).append(s)
    return blocks


def plan_highlight(scored: list[ScoredItem], config: StyleConfig) -> AdaptationPlan:
    """Mark the top-N positively scored items of each menu."""
    mutations: list[Mutation] = []
    for _, block in sorted(_per_menu(scored).items()):
        n = top_n(len(block), config)
        for s in block[:n]:
            if s.score > 0:
                mutations.append(AddMarker(target=s.item.key, token=HIGHLIGHT_TOKEN))
    return AdaptationPlan(mutations=tuple(mutations))


def plan_reorder_items(
    scored: list[ScoredItem], model: MenuModel, config: StyleConfig
) -> AdaptationPlan:
    """Move each menu's top-N positively scored items to the front of their own group.

    Moves are emitted back-to-front so the best item ends up first;
    unmoved items keep their relative order.
    """
    mutations: list[Mutation] = []
    for menu_index, block in sorted(_per_menu(scored).items()):
        n = top_n(len(block), config)
        selected = [s.item for s in block[:n] if s.score > 0]
        by_group: dict[int, list] = {}
        for item in selected:
            by_group.setdefault(item.group_index, []).append(item)
        for _, members in sorted(by_group.items()):
            for item in reversed(members):
                mutations.append(MoveBefore(target=item.key, anchor=None))
    return AdaptationPlan(mutations=tuple(mutations))


def plan_reorder_groups(
    scored_groups: list[ScoredGroup], model: MenuModel, config: StyleConfig
) -> AdaptationPlan:
    """Move the top-N positively scored groups to the front of the menu.

    Intra-group item order is untouched. Implicit groups share the menu's
    own node, so a menu without real group structure is left alone.
    """
    mutations: list[Mutation] = []
    blocks: dict[int, list[ScoredGroup]] = {}
    for sg in scored_groups:
        blocks.setdefault(sg.menu_index, []).append(sg)
    for menu_index, block in sorted(blocks.items()):
        movable = [sg for sg in block if not sg.group.implicit]
        if len(movable) < 2:
            continue
        n = top_n(len(movable), config)
        selected = [sg.group for sg in movable[:n] if sg.score > 0]
        for group in reversed(selected):
            mutations.append(MoveBefore(target=group.key, anchor=None))
    return AdaptationPlan(mutations=tuple(mutations))


def plan_fold(
    scored: list[ScoredItem], model: MenuModel, config: StyleConfig
) -> AdaptationPlan:
    """Collapse zero-scored items ranked beyond each group's visible quota.

    The quota is max(top_n, min_visible_on_fold) over the group's items in
    score order, so positively scored items are never folded and small
    groups are left intact. Each affected group gets an expander marker;
    folded items stay in the tree behind it.
    """
    mutations: list[Mutation] = []
    for menu_index, block in sorted(_per_menu(scored).items()):
        if all(s.score == 0 for s in block):
            continue
        quota = max(top_n(len(block), config), config.min_visible_on_fold)
        menu = model.menus[menu_index]
        for gi, group in enumerate(menu.groups):
            members = [s for s in block if s.item.group_index == gi]
            folding = [s.item for s in members[quota:] if s.score == 0]
            if not folding:
                continue
            mutations.append(AddMarker(target=group.key, token=FOLD_TOGGLE_TOKEN))
            position = {item.key: n for n, item in enumerate(group.items)}
            folding.sort(key=lambda item: position[item.key])
            for item in folding:
                mutations.append(Collapse(target=item.key))
    return AdaptationPlan(mutations=tuple(mutations))


def build_plan(
    config: StyleConfig,
    scored_items: list[ScoredItem],
    scored_groups: list[ScoredGroup],
    model: MenuModel,
) -> AdaptationPlan:
    """Plan for a single or composite style; members concatenate in order."""
    config.validate()
    plan = AdaptationPlan()
    for name in config.members():
        if name == "highlight":
            plan = plan + plan_highlight(scored_items, config)
        elif name == "reorder-items":
            plan = plan + plan_reorder_items(scored_items, model, config)
        elif name == "reorder-groups":
            plan = plan + plan_reorder_groups(scored_groups, model, config)
        elif name == "fold":
            plan = plan + plan_fold(scored_items, model, config)
    return plan


# --- Apply / cancel --------------------------------------------------------

_ABSENT = object()  # class attribute was not present before the mutation


@dataclass
class _ClassUndo:
    node: Node
    original: object  # str or _ABSENT

    def restore(self) -> None:
        if self.original is _ABSENT:
            self.node.attributes.pop("class", None)
        else:
            self.node.attributes["class"] = self.original


@dataclass
class _MoveUndo:
    node: Node
    parent: Node
    index: int  # position in parent.children before removal

    def restore(self) -> None:
        current = self.node.parent
        if current is not None:
            current.children.remove(self.node)
        self.parent.children.insert(self.index, self.node)
        self.node.parent = self.parent


@dataclass
class AppliedState:
    """Undo journal for one applied plan; restores the pre-apply tree exactly."""

    plan: AdaptationPlan
    undo: list = field(default_factory=list)


def _add_class_token(node: Node, token: str) -> _ClassUndo:
    original = node.attributes.get("class", _ABSENT)
    existing = node.attributes.get("class", "")
    if token not in existing.split():
        node.attributes["class"] = f"{existing} {token}".strip()
    return _ClassUndo(node=node, original=original)


def _move_node(node: Node, anchor: Node | None) -> _MoveUndo:
    parent = node.parent
    undo = _MoveUndo(node=node, parent=parent, index=parent.children.index(node))
    if anchor is node:  # degenerate self-anchor: nothing to do
        return undo
    parent.children.remove(node)
    if anchor is None:
        parent.children.insert(0, node)
        node.parent = parent
    else:
        target_parent = anchor.parent
        target_parent.children.insert(target_parent.children.index(anchor), node)
        node.parent = target_parent
    return undo


def apply(plan: AdaptationPlan, doc: DocumentTree, model: MenuModel) -> AppliedState:
    """Execute the plan's mutations in order.

    Raises AlreadyApplied when the document still has an active adaptation
    (double application is never silent), and StaleTarget when an element
    id does not resolve, rolling back mutations already performed.
    """
    if doc.active_application is not None:
        raise AlreadyApplied("document already has an active adaptation; cancel it first")
    state = AppliedState(plan=plan)

    def resolve(key: str) -> Node:
        node = model.node_by_id.get(key)
        if node is None:
            raise StaleTarget(f"element id does not resolve: {key}")
        return node

    try:
        for mutation in plan.mutations:
            if isinstance(mutation, AddMarker):
                state.undo.append(_add_class_token(resolve(mutation.target), mutation.token))
            elif isinstance(mutation, Collapse):
                state.undo.append(_add_class_token(resolve(mutation.target), FOLD_TOKEN))
            else:
                anchor = resolve(mutation.anchor) if mutation.anchor is not None else None
                state.undo.append(_move_node(resolve(mutation.target), anchor))
    except StaleTarget:
        for record in reversed(state.undo):
            record.restore()
        raise
    doc.active_application = state
    return state


def cancel(applied: AppliedState, doc: DocumentTree, model: MenuModel | None = None) -> None:
    """Undo an applied plan, restoring the pre-apply document exactly.

    Mutations are unwound in reverse order, which also makes composite
    styles cancel member by member in reverse.
    """
    if doc.active_application is not applied:
        raise ValueError("applied state does not belong to this document")
    for record in reversed(applied.undo):
        record.restore()
    applied.undo.clear()
    doc.active_application = None
