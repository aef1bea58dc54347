"""Collision-set families and the combined nests that index strata.

A nest couples a chain of partitions with a family of subsets (each of
size >= 2) recording which point clusters have bubbled off.  The side
condition on the family is: together with the blocks of the finest chain
element it must be nested, and no member may strictly contain a block
(membership S = B is allowed; such an S records a bubble swallowing the
whole block).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence, Union

from .partitions import (
    Chain,
    PartitionParseError,
    SetPartition,
    _check_cap,
    elements_of,
    enumerate_chains,
    mask_of,
    parse_partition,
)

EDGELESS = "edgeless"
COMPLETE = "complete"
GRAPHS = (EDGELESS, COMPLETE)

DEFAULT_NEST_CAP_COMPLETE = 7
DEFAULT_NEST_CAP_EDGELESS = 8

_FAMILY_CACHE_MAX_POPCOUNT = 7  # memoized family lists stay small


@dataclass(frozen=True)
class FmSet:
    """A subset of {1,..,n} with at least two elements, as a bitmask."""

    n: int
    mask: int

    def __post_init__(self):
        if self.mask & ~((1 << self.n) - 1):
            raise ValueError("set not contained in the ground set")
        if bin(self.mask).count("1") < 2:
            raise ValueError("set must have at least two elements")

    @property
    def elements(self) -> tuple[int, ...]:
        return elements_of(self.mask)

    def __str__(self) -> str:
        return "{" + ",".join(str(e) for e in self.elements) + "}"


def _fm_sort_key(mask: int) -> tuple[int, int, int]:
    return ((mask & -mask).bit_length(), bin(mask).count("1"), mask)


@dataclass(frozen=True)
class Nest:
    """A stratum index: graph flavour, partition chain, and set family.

    The constructor only normalizes; semantic validity (nestedness, the
    block side condition) is checked by validate_nest so that invalid
    candidates remain representable.
    """

    n: int
    graph: str
    chain: Chain
    fm: tuple[FmSet, ...]

    def __post_init__(self):
        if self.graph not in GRAPHS:
            raise ValueError(f"graph must be one of {GRAPHS}")
        if self.chain.n != self.n:
            raise ValueError("chain ground size mismatch")
        for s in self.fm:
            if s.n != self.n:
                raise ValueError("set ground size mismatch")
        masks = [s.mask for s in self.fm]
        if len(set(masks)) != len(masks):
            raise ValueError("duplicate sets in the family")
        ordered = tuple(sorted(self.fm, key=lambda s: _fm_sort_key(s.mask)))
        object.__setattr__(self, "fm", ordered)

    @staticmethod
    def make(
        n: int,
        graph: str,
        chain_parts: Sequence[Union[SetPartition, str]],
        fm_sets: Iterable[Union[FmSet, Iterable[int]]] = (),
    ) -> "Nest":
        elems = tuple(
            parse_partition(p, n) if isinstance(p, str) else p for p in chain_parts
        )
        fms = tuple(
            s if isinstance(s, FmSet) else FmSet(n, mask_of(s)) for s in fm_sets
        )
        return Nest(n, graph, Chain(n, elems), fms)

    @property
    def fm_masks(self) -> tuple[int, ...]:
        return tuple(s.mask for s in self.fm)

    def size(self) -> int:
        return len(self.chain.elements) + len(self.fm)

    def __str__(self) -> str:
        return format_nest(self)


def is_nested(family: Iterable[Union[FmSet, int, Iterable[int]]]) -> bool:
    """True when any two members are disjoint or comparable."""
    masks = []
    for s in family:
        if isinstance(s, FmSet):
            masks.append(s.mask)
        elif isinstance(s, int):
            masks.append(s)
        else:
            masks.append(mask_of(s))
    return _nested_masks(masks)


def _nested_masks(masks: Sequence[int]) -> bool:
    for i in range(len(masks)):
        a = masks[i]
        for b in masks[i + 1 :]:
            c = a & b
            if c and c != a and c != b:
                return False
    return True


def validate_nest(nest: Nest) -> tuple[bool, Optional[str]]:
    """Check the nest invariants; on failure name the first violated clause."""
    if nest.graph == EDGELESS and nest.fm:
        return False, "edgeless nests cannot carry a set family"
    masks = list(nest.fm_masks)
    if not nest.chain.elements:
        if not _nested_masks(masks):
            return False, _overlap_message(masks)
        return True, None
    blocks = list(nest.chain.max.blocks)
    if not _nested_masks(masks + blocks):
        return False, _overlap_message(masks + blocks)
    for s in masks:
        for b in blocks:
            if b & s == b and b != s:
                return (
                    False,
                    f"set {{{','.join(map(str, elements_of(s)))}}} strictly contains "
                    f"block {{{','.join(map(str, elements_of(b)))}}} of the finest partition",
                )
    return True, None


def _overlap_message(masks: Sequence[int]) -> str:
    for i in range(len(masks)):
        for j in range(i + 1, len(masks)):
            c = masks[i] & masks[j]
            if c and c != masks[i] and c != masks[j]:
                a = ",".join(map(str, elements_of(masks[i])))
                b = ",".join(map(str, elements_of(masks[j])))
                return f"family not nested: {{{a}}} and {{{b}}} overlap"
    return "family not nested"


def _partial_partitions(mask: int) -> Iterator[tuple[int, ...]]:
    """Sets of pairwise-disjoint sub-masks of size >= 2 (elements may stay uncovered)."""
    if mask == 0:
        yield ()
        return
    low = mask & -mask
    rest = mask ^ low
    # lowest element left uncovered
    for p in _partial_partitions(rest):
        yield p
    # lowest element inside a block: choose the rest of its block from `rest`
    sub = rest
    while True:
        # iterate over all submasks of rest, nonempty
        if sub:
            block = low | sub
            for p in _partial_partitions(rest ^ sub):
                yield (block,) + p
        if sub == 0:
            break
        sub = (sub - 1) & rest


def _inner_families(mask: int) -> list[tuple[int, ...]]:
    """Nested families on mask whose members are proper subsets of mask."""
    out = []
    for tops in _partial_partitions(mask):
        if tops == (mask,):
            continue
        choices = [[(t,) + g for g in _families_cached(t, inner=True)] for t in tops]
        for combo in _product(choices):
            fam = tuple(m for part in combo for m in part)
            out.append(fam)
    return out


def _product(choices: list[list[tuple[int, ...]]]) -> Iterator[tuple[tuple[int, ...], ...]]:
    if not choices:
        yield ()
        return
    for head in choices[0]:
        for tail in _product(choices[1:]):
            yield (head,) + tail


@functools.lru_cache(maxsize=None)
def _families_cached(mask: int, inner: bool) -> tuple[tuple[int, ...], ...]:
    fams = _inner_families(mask)
    if not inner:
        fams = fams + [f + (mask,) for f in fams]
    fams = [tuple(sorted(f, key=_fm_sort_key)) for f in fams]
    fams.sort(key=lambda f: (len(f), tuple(_fm_sort_key(m) for m in f)))
    return tuple(fams)


def nested_families(mask: int) -> tuple[tuple[int, ...], ...]:
    """All nested families of subsets (size >= 2) of the given mask.

    Sorted by family size then member keys; the empty family comes first.
    """
    if bin(mask).count("1") <= _FAMILY_CACHE_MAX_POPCOUNT:
        return _families_cached(mask, False)
    fams = _inner_families(mask)
    fams = fams + [f + (mask,) for f in fams]
    fams = [tuple(sorted(f, key=_fm_sort_key)) for f in fams]
    fams.sort(key=lambda f: (len(f), tuple(_fm_sort_key(m) for m in f)))
    return tuple(fams)


def _nest_cap(graph: str) -> int:
    return DEFAULT_NEST_CAP_COMPLETE if graph == COMPLETE else DEFAULT_NEST_CAP_EDGELESS


def iter_nest_keys(
    n: int,
    graph: str,
    require_bottom: bool,
    *,
    cap: Optional[int] = None,
    force: bool = False,
) -> Iterator[tuple[tuple[SetPartition, ...], tuple[int, ...]]]:
    """Raw nest stream as (chain elements, family masks); single source of order.

    Chains follow the chain enumeration order; for each chain, families run
    through the per-block family lists (blocks by minimum element) in
    row-major order.
    """
    if graph not in GRAPHS:
        raise ValueError(f"graph must be one of {GRAPHS}")
    _check_cap(n, cap if cap is not None else _nest_cap(graph), force, "enumerate_nests")
    for chain in enumerate_chains(
        n, require_bottom=require_bottom, allow_empty=True, cap=n, force=True
    ):
        if graph == EDGELESS:
            yield chain.elements, ()
            continue
        if not chain.elements:
            for fam in nested_families((1 << n) - 1):
                yield (), fam
            continue
        per_block = [nested_families(b) for b in chain.max.blocks]
        if len(per_block) == 1:
            for fam in per_block[0]:
                yield chain.elements, fam
            continue
        for combo in _product([list(p) for p in per_block]):
            fam = tuple(sorted((m for part in combo for m in part), key=_fm_sort_key))
            yield chain.elements, fam


def enumerate_nests(
    n: int,
    graph: str,
    require_bottom: bool,
    *,
    cap: Optional[int] = None,
    force: bool = False,
) -> Iterator[Nest]:
    """Every valid nest exactly once, in the documented deterministic order."""
    for elems, fam in iter_nest_keys(n, graph, require_bottom, cap=cap, force=force):
        yield Nest(n, graph, Chain(n, elems), tuple(FmSet(n, m) for m in fam))


def restrict_fm(nest: Nest, block: Union[int, Iterable[int]]) -> tuple[FmSet, ...]:
    """Members of the family contained in the given block of the finest partition."""
    bmask = block if isinstance(block, int) else mask_of(block)
    if not nest.chain.elements or bmask not in nest.chain.max.blocks:
        raise ValueError("block is not a block of the finest chain element")
    return tuple(s for s in nest.fm if s.mask & ~bmask == 0)


def format_nest(nest: Nest) -> str:
    """Canonical text: chain coarsest-to-finest, then sets by (min, size)."""
    items = [str(p) for p in nest.chain.elements]
    items.extend(str(s) for s in sorted(nest.fm, key=lambda s: _fm_sort_key(s.mask)))
    return "; ".join(items)


def parse_nest(text: str, n: int, graph: str = COMPLETE) -> Nest:
    """Parse nest text: ';'-separated partition items and {..} set items."""
    chain_parts: list[SetPartition] = []
    fms: list[FmSet] = []
    pos = 0
    for raw in text.split(";"):
        item = raw.strip()
        if not item:
            raise PartitionParseError("empty nest item", pos)
        if item.startswith("{"):
            if not item.endswith("}"):
                raise PartitionParseError(f"unterminated set item {item!r}", pos)
            body = item[1:-1]
            try:
                elems = [int(t) for t in body.split(",")]
            except ValueError:
                raise PartitionParseError(f"malformed set item {item!r}", pos) from None
            if any(not 1 <= e <= n for e in elems):
                raise PartitionParseError(f"set element out of range in {item!r}", pos)
            fms.append(FmSet(n, mask_of(elems)))
        else:
            if fms:
                raise PartitionParseError("partition items must precede set items", pos)
            chain_parts.append(parse_partition(item, n))
        pos += len(raw) + 1
    return Nest(n, graph, Chain(n, tuple(chain_parts)), tuple(fms))
