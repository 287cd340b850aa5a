"""Self-adapting menus: local interaction logging, pluggable target
policies, and reversible visual adaptation styles over plain HTML menus."""

from .analytics import Analyzer, ItemMetrics, MetricsSnapshot, PageMetrics, compute_metrics
from .dom import DocumentTree, Node, canonical_html, parse_document
from .errors import (
    AlreadyApplied,
    CorruptStore,
    InvalidInterval,
    InvalidSelector,
    MenuAdaptError,
    NoMenuMatched,
    StaleTarget,
)
from .eventlog import ClickEvent, EventDatabase, VisitEvent, deserialize, serialize
from .model import (
    ElementId,
    Group,
    Item,
    Menu,
    MenuModel,
    compute_element_id,
    extract_all,
    extract_menus,
    normalize_page_path,
)
from .policies import (
    POLICY_NAMES,
    AccessRankParams,
    AccessRankState,
    PolicyConfig,
    ScoredGroup,
    ScoredItem,
    score_groups,
    score_items,
)
from .selectors import SelectorSet, parse_selector, select_all
from .styles import (
    STYLE_NAMES,
    AdaptationPlan,
    AppliedState,
    StyleConfig,
    build_plan,
    compose,
    top_n,
)

__version__ = "0.1.0"
