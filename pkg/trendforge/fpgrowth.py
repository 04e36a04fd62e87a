"""
Frequent attribute itemset mining with FP-growth.

Transactions are attribute sets (one per catalog item). The FP-tree
inserts each transaction's frequent attributes in the canonical order:
global support descending, ties by attribute name. Mining recurses over
conditional trees built from the conditional pattern base of each
header-table attribute.
"""
import itertools
import logging
import typing as ty
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .diagnostics import DiagnosticLog
from .exceptions import DataError, PreconditionError
from .ingest.schema import AttributeTable
from .utils import split_items

_LOGGER = logging.getLogger(__name__)

DEFAULT_MIN_SUPPORT = 0.05
DEFAULT_ATTR_CUTOFF = 0.5
ORACLE_MAX_ATTRIBUTES = 20

AttributeSet = ty.FrozenSet[str]


@dataclass(frozen=True)
class AttributeItemset:
    items: AttributeSet
    support: int

    def __post_init__(self):
        if not self.items:
            raise PreconditionError('itemset must not be empty')

    @property
    def sorted_items(self) -> ty.Tuple[str, ...]:
        return tuple(sorted(self.items))

    @property
    def sort_key(self):
        return len(self.items), self.sorted_items

    def relative_support(self, n_transactions: int) -> float:
        return self.support / n_transactions if n_transactions else 0.0

    def __str__(self):
        return f'{{{",".join(self.sorted_items)}}}:{self.support}'


class FPNode:
    __slots__ = ('item', 'count', 'parent', 'children', 'link', 'ends')

    def __init__(self, item: ty.Optional[str],
                 parent: ty.Optional['FPNode']) -> None:
        self.item = item
        self.count = 0
        self.parent = parent
        self.children: ty.Dict[str, FPNode] = {}
        self.link: ty.Optional[FPNode] = None
        self.ends = 0  # transactions whose last frequent item is this node

    @property
    def is_root(self) -> bool:
        return self.item is None

    def path(self) -> ty.List[str]:
        """Attributes from the root down to the parent of this node"""
        items = []
        node = self.parent
        while node is not None and not node.is_root:
            items.append(node.item)
            node = node.parent
        items.reverse()
        return items

    def __repr__(self):
        return f'<FPNode:{self.item}:{self.count}>'


class FPTree:
    def __init__(self, min_support: int) -> None:
        self.min_support = min_support
        self.root = FPNode(None, None)
        self.support: ty.Dict[str, int] = {}
        self.order: ty.Dict[str, int] = {}
        self._heads: ty.Dict[str, FPNode] = {}
        self._tails: ty.Dict[str, FPNode] = {}
        self.transactions = 0

    def set_frequencies(self, support: ty.Mapping[str, int]) -> None:
        self.support = {
            item: count for item, count in support.items()
            if count >= self.min_support
        }
        ordered = sorted(self.support, key=lambda i: (-self.support[i], i))
        self.order = {item: rank for rank, item in enumerate(ordered)}

    def canonical(self, transaction: ty.Iterable[str]) -> ty.List[str]:
        return sorted(
            (i for i in set(transaction) if i in self.order),
            key=self.order.__getitem__,
        )

    def insert(self, ordered_items: ty.Sequence[str], count: int = 1) -> None:
        self.transactions += count
        node = self.root
        node.count += count
        for item in ordered_items:
            child = node.children.get(item)
            if child is None:
                child = FPNode(item, node)
                node.children[item] = child
                self._append_link(child)
            child.count += count
            node = child
        node.ends += count

    def _append_link(self, node: FPNode) -> None:
        tail = self._tails.get(node.item)  # type: ignore
        if tail is None:
            self._heads[node.item] = node  # type: ignore
        else:
            tail.link = node
        self._tails[node.item] = node  # type: ignore

    def nodes(self, item: str) -> ty.Iterator[FPNode]:
        node = self._heads.get(item)
        while node is not None:
            yield node
            node = node.link

    @property
    def header(self) -> ty.List[str]:
        """Header-table attributes, least frequent first"""
        return sorted(self._heads, key=self.order.__getitem__, reverse=True)

    def walk(self) -> ty.Iterator[FPNode]:
        stack = list(self.root.children.values())
        while stack:
            node = stack.pop()
            yield node
            stack.extend(node.children.values())

    def is_empty(self) -> bool:
        return not self.root.children

    def conditional_pattern_base(
            self, item: str,
    ) -> ty.List[ty.Tuple[ty.List[str], int]]:
        return [(node.path(), node.count) for node in self.nodes(item)]

    def __repr__(self):
        return (
            f'<FPTree: {len(self._heads)} attributes, '
            f'{self.transactions} transactions, '
            f'min_support={self.min_support}>'
        )


def check_min_support(min_support: int) -> None:
    if min_support < 1:
        raise PreconditionError(f'min_support must be >= 1, got {min_support}')


def binarize(
        attributes: AttributeTable,
        item_ids: ty.Iterable[int],
        cutoff: float = DEFAULT_ATTR_CUTOFF,
        log: ty.Optional[DiagnosticLog] = None,
) -> ty.Dict[int, AttributeSet]:
    """Attribute set per item, present iff posterior >= cutoff"""
    if not (0.0 < cutoff < 1.0):
        raise PreconditionError(f'attribute cutoff must be in (0,1), '
                                f'got {cutoff}')
    log = log if log is not None else DiagnosticLog('binarize')
    vocabulary = np.array(attributes.vocabulary, dtype=object)
    result = {}
    for item_id in item_ids:
        if item_id not in attributes:
            log.warning(0, f'item {item_id} has no attributes, skipped')
            continue
        present = attributes.vector(item_id) >= cutoff
        result[item_id] = frozenset(vocabulary[present].tolist())
    return result


def build_tree(transactions: ty.Sequence[ty.Iterable[str]],
               min_support: int) -> FPTree:
    check_min_support(min_support)
    transactions = [frozenset(t) for t in transactions]
    tree = FPTree(min_support)
    tree.set_frequencies(Counter(i for t in transactions for i in t))
    for transaction in transactions:
        tree.insert(tree.canonical(transaction))
    return tree


def _conditional_tree(tree: FPTree, item: str) -> FPTree:
    base = tree.conditional_pattern_base(item)
    support: ty.Counter[str] = Counter()
    for path, count in base:
        for i in path:
            support[i] += count
    conditional = FPTree(tree.min_support)
    conditional.set_frequencies(support)
    for path, count in base:
        conditional.insert(conditional.canonical(path), count)
    return conditional


def _mine_suffixes(
        tree: FPTree,
        suffix: ty.Tuple[str, ...],
        min_support: int,
        max_size: ty.Optional[int],
        found: ty.List[AttributeItemset],
) -> None:
    for item in tree.header:
        support = sum(node.count for node in tree.nodes(item))
        if support < min_support:
            continue
        itemset = (item, *suffix)
        found.append(AttributeItemset(frozenset(itemset), support))
        if max_size is not None and len(itemset) >= max_size:
            continue
        conditional = _conditional_tree(tree, item)
        if not conditional.is_empty():
            _mine_suffixes(conditional, itemset, min_support, max_size, found)


def mine(tree: FPTree, min_support: ty.Optional[int] = None,
         max_size: ty.Optional[int] = None) -> ty.List[AttributeItemset]:
    min_support = tree.min_support if min_support is None else min_support
    check_min_support(min_support)
    if min_support < tree.min_support:
        raise PreconditionError(
            f'tree was built with min_support {tree.min_support}, '
            f'cannot mine at {min_support}',
        )
    if max_size is not None and max_size < 1:
        raise PreconditionError('max itemset size must be >= 1')
    found: ty.List[AttributeItemset] = []
    _mine_suffixes(tree, (), min_support, max_size, found)
    found.sort(key=lambda s: s.sort_key)
    return found


def frequent_itemsets(transactions: ty.Sequence[ty.Iterable[str]],
                      min_support: int,
                      max_size: ty.Optional[int] = None,
                      ) -> ty.List[AttributeItemset]:
    return mine(build_tree(transactions, min_support), min_support, max_size)


def brute_force_oracle(transactions: ty.Sequence[ty.Iterable[str]],
                       min_support: int,
                       max_size: ty.Optional[int] = None,
                       ) -> ty.List[AttributeItemset]:
    check_min_support(min_support)
    transactions = [frozenset(t) for t in transactions]
    universe = sorted(set().union(*transactions)) if transactions else []
    if len(universe) > ORACLE_MAX_ATTRIBUTES:
        raise PreconditionError(
            f'oracle enumerates at most {ORACLE_MAX_ATTRIBUTES} attributes, '
            f'got {len(universe)}',
        )
    limit = len(universe) if max_size is None else min(max_size,
                                                        len(universe))
    found = []
    for size in range(1, limit + 1):
        for candidate in itertools.combinations(universe, size):
            items = frozenset(candidate)
            support = sum(1 for t in transactions if items <= t)
            if support >= min_support:
                found.append(AttributeItemset(items, support))
    found.sort(key=lambda s: s.sort_key)
    return found


def load_baskets(path) -> ty.List[AttributeSet]:
    """One transaction per line, items separated by ';'"""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            lines = f.read().splitlines()
    except (OSError, UnicodeDecodeError) as e:
        raise DataError(f'cannot read baskets: {e}', source=str(path)) from e
    return [split_items(line) for line in lines if line.strip()]
