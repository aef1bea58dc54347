"""Set partitions of {1,..,n} and the lattice ops used everywhere else.

Order convention: a <= b when every block of b sits inside a block of a,
so the one-block partition is the minimum ("bottom") and the partition
into singletons is the maximum ("top").  Blocks are stored as bitmasks
(bit i-1 <-> element i), which keeps disjointness and subset tests O(1).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

MAX_GROUND = 64  # hard limit of the bitmask representation

DEFAULT_PARTITION_CAP = 12
DEFAULT_CHAIN_CAP = 8


class PartitionParseError(ValueError):
    """Raised on malformed partition text; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (position {position})")
        self.position = position


class CapExceededError(ValueError):
    """An enumeration was requested beyond its safety cap without force."""


def _check_cap(n: int, cap: int, force: bool, what: str) -> None:
    if n < 1:
        raise ValueError(f"{what}: n must be >= 1, got {n}")
    if n > MAX_GROUND:
        raise ValueError(f"{what}: n must be <= {MAX_GROUND}, got {n}")
    if n > cap and not force:
        raise CapExceededError(
            f"{what}: n={n} exceeds the default cap {cap}; pass force=True to override"
        )


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        m |= 1 << (e - 1)
    return m


def elements_of(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length())
        mask ^= low
    return tuple(out)


@dataclass(frozen=True)
class SetPartition:
    """A set partition of {1,..,n}; blocks are bitmasks sorted by min element."""

    n: int
    blocks: tuple[int, ...]

    def __post_init__(self):
        if not 1 <= self.n <= MAX_GROUND:
            raise ValueError(f"ground size must be in 1..{MAX_GROUND}")
        union = 0
        for b in self.blocks:
            if b == 0:
                raise ValueError("empty block")
            if union & b:
                raise ValueError("blocks are not disjoint")
            union |= b
        if union != (1 << self.n) - 1:
            raise ValueError("blocks do not cover {1,..,n}")
        if list(self.blocks) != sorted(self.blocks, key=lambda b: b & -b):
            raise ValueError("blocks must be sorted by minimum element")

    @staticmethod
    def from_blocks(n: int, blocks: Iterable[Iterable[int]]) -> "SetPartition":
        masks = sorted((mask_of(b) for b in blocks), key=lambda b: b & -b)
        return SetPartition(n, tuple(masks))

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    def block_elements(self) -> tuple[tuple[int, ...], ...]:
        return tuple(elements_of(b) for b in self.blocks)

    def block_containing(self, element: int) -> int:
        bit = 1 << (element - 1)
        for b in self.blocks:
            if b & bit:
                return b
        raise ValueError(f"element {element} out of range")

    def __str__(self) -> str:
        return format_partition(self)

    def __le__(self, other: "SetPartition") -> bool:
        return leq(self, other)

    def __lt__(self, other: "SetPartition") -> bool:
        return self != other and leq(self, other)


def bottom(n: int) -> SetPartition:
    """The one-block partition (minimum of the lattice)."""
    return SetPartition(n, ((1 << n) - 1,))


def top(n: int) -> SetPartition:
    """The all-singletons partition (maximum of the lattice)."""
    return SetPartition(n, tuple(1 << i for i in range(n)))


def format_partition(p: SetPartition) -> str:
    """Canonical text: juxtaposed digits for n <= 9, comma-separated otherwise."""
    if p.n <= 9:
        return "|".join("".join(str(e) for e in elements_of(b)) for b in p.blocks)
    return "|".join(",".join(str(e) for e in elements_of(b)) for b in p.blocks)


def parse_partition(text: str, n: int) -> SetPartition:
    """Parse partition text ("12|34" or "1,10|2,3"); errors carry positions."""
    if not 1 <= n <= MAX_GROUND:
        raise ValueError(f"ground size must be in 1..{MAX_GROUND}")
    seen = 0
    masks = []
    pos = 0
    for chunk in text.split("|"):
        if chunk.strip() == "":
            raise PartitionParseError("empty block", pos)
        block = 0
        if "," in chunk:
            tokpos = pos
            for tok in chunk.split(","):
                t = tok.strip()
                if not t.isdigit():
                    raise PartitionParseError(f"malformed token {tok!r}", tokpos)
                block |= _claim(int(t), n, seen | block, tokpos)
                tokpos += len(tok) + 1
        elif n <= 9:
            for i, ch in enumerate(chunk.strip()):
                if not ch.isdigit():
                    raise PartitionParseError(f"malformed token {ch!r}", pos + i)
                block |= _claim(int(ch), n, seen | block, pos + i)
        else:
            t = chunk.strip()
            if not t.isdigit():
                raise PartitionParseError(f"malformed token {chunk!r}", pos)
            block |= _claim(int(t), n, seen | block, pos)
        seen |= block
        masks.append(block)
        pos += len(chunk) + 1
    if seen != (1 << n) - 1:
        missing = elements_of(((1 << n) - 1) ^ seen)
        raise PartitionParseError(f"missing element(s) {missing}", len(text))
    masks.sort(key=lambda b: b & -b)
    return SetPartition(n, tuple(masks))


def _claim(value: int, n: int, seen: int, position: int) -> int:
    if not 1 <= value <= n:
        raise PartitionParseError(f"element {value} out of range 1..{n}", position)
    bit = 1 << (value - 1)
    if seen & bit:
        raise PartitionParseError(f"duplicate element {value}", position)
    return bit


def _require_same_ground(a: SetPartition, b: SetPartition) -> None:
    if a.n != b.n:
        raise ValueError(f"ground-size mismatch: {a.n} vs {b.n}")


def leq(a: SetPartition, b: SetPartition) -> bool:
    """a <= b: every block of b is contained in a block of a."""
    _require_same_ground(a, b)
    for bb in b.blocks:
        low = bb & -bb
        for ab in a.blocks:
            if ab & low:
                if bb & ~ab:
                    return False
                break
    return True


def meet(a: SetPartition, b: SetPartition) -> SetPartition:
    """Finest common coarsening: components of the union of the block graphs."""
    _require_same_ground(a, b)
    blocks = list(a.blocks)
    for bb in b.blocks:
        merged = bb
        rest = []
        for blk in blocks:
            if blk & merged:
                merged |= blk
            else:
                rest.append(blk)
        rest.append(merged)
        blocks = rest
    blocks.sort(key=lambda m: m & -m)
    return SetPartition(a.n, tuple(blocks))


def join(a: SetPartition, b: SetPartition) -> SetPartition:
    """Common refinement: nonempty pairwise intersections of blocks."""
    _require_same_ground(a, b)
    blocks = [x & y for x in a.blocks for y in b.blocks if x & y]
    blocks.sort(key=lambda m: m & -m)
    return SetPartition(a.n, tuple(blocks))


def _partitions_with_block_count(n: int, k: int) -> Iterator[tuple[int, ...]]:
    """All partitions of [n] into exactly k blocks, as mask tuples."""
    # Insert elements 1..n in order; block creation order = order of minima.
    def rec(e: int, blocks: list[int]) -> Iterator[tuple[int, ...]]:
        if e > n:
            if len(blocks) == k:
                yield tuple(blocks)
            return
        remaining = n - e + 1
        bit = 1 << (e - 1)
        if len(blocks) + remaining > k:
            for i in range(len(blocks)):
                blocks[i] |= bit
                yield from rec(e + 1, blocks)
                blocks[i] ^= bit
        if len(blocks) < k:
            blocks.append(bit)
            yield from rec(e + 1, blocks)
            blocks.pop()

    yield from rec(1, [])


def enumerate_partitions(
    n: int, *, cap: int = DEFAULT_PARTITION_CAP, force: bool = False
) -> Iterator[SetPartition]:
    """All partitions of [n], by block count ascending then canonical text."""
    _check_cap(n, cap, force, "enumerate_partitions")
    for k in range(1, n + 1):
        batch = [SetPartition(n, masks) for masks in _partitions_with_block_count(n, k)]
        batch.sort(key=format_partition)
        yield from batch


@dataclass(frozen=True)
class Chain:
    """A strictly increasing chain of partitions, coarsest first; may be empty."""

    n: int
    elements: tuple[SetPartition, ...]

    def __post_init__(self):
        for p in self.elements:
            if p.n != self.n:
                raise ValueError("chain elements must share the ground size")
        for a, b in zip(self.elements, self.elements[1:]):
            if a == b or not leq(a, b):
                raise ValueError(f"chain not strictly increasing at {a} !< {b}")

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def max(self) -> SetPartition:
        if not self.elements:
            raise ValueError("empty chain has no maximum")
        return self.elements[-1]

    def __str__(self) -> str:
        return "; ".join(format_partition(p) for p in self.elements)


def enumerate_chains(
    n: int,
    *,
    require_bottom: bool = False,
    allow_empty: bool = True,
    cap: int = DEFAULT_CHAIN_CAP,
    force: bool = False,
) -> Iterator[Chain]:
    """Chains of the partition lattice in depth-first lexicographic order.

    With require_bottom, bottom is prepended to every chain over the rest of
    the lattice (allow_empty then admits the bare {bottom} chain).  Without
    it, allow_empty admits the empty chain.  Comparable partitions always
    differ in block count, so the global enumeration order is a linear
    extension and chains are emitted as increasing index sequences.
    """
    _check_cap(n, cap, force, "enumerate_chains")
    univ = list(enumerate_partitions(n, cap=cap, force=force))
    finer: list[list[int]] = [
        [j for j in range(len(univ)) if i != j and leq(univ[i], univ[j])]
        for i in range(len(univ))
    ]

    def extend(prefix: list[int]) -> Iterator[tuple[int, ...]]:
        for j in finer[prefix[-1]]:
            prefix.append(j)
            yield tuple(prefix)
            yield from extend(prefix)
            prefix.pop()

    def emit(indices: tuple[int, ...]) -> Chain:
        return Chain(n, tuple(univ[i] for i in indices))

    if require_bottom:
        if allow_empty:
            yield emit((0,))
        for seq in extend([0]):
            yield emit(seq)
    else:
        if allow_empty:
            yield emit(())
        for start in range(len(univ)):
            yield emit((start,))
            for seq in extend([start]):
                yield emit(seq)


@dataclass(frozen=True)
class BlockPointer:
    """A partition together with one of its blocks (as a mask)."""

    partition: SetPartition
    block: int

    def __post_init__(self):
        if self.block not in self.partition.blocks:
            raise ValueError("block is not a block of the partition")

    @property
    def block_elements(self) -> tuple[int, ...]:
        return elements_of(self.block)


def adjoin_singleton(p: SetPartition) -> SetPartition:
    """Extend a partition of [n] to [n+1] by adding {n+1} as a new block."""
    if p.n >= MAX_GROUND:
        raise ValueError("ground size limit reached")
    return SetPartition(p.n + 1, p.blocks + (1 << p.n,))


def classify_extension(p: SetPartition) -> Optional[BlockPointer]:
    """Inverse bookkeeping for adjoin_singleton on a partition of [n+1].

    Returns None when {n+1} is a singleton block (p then comes from a
    partition of [n] by adjoin_singleton); otherwise returns the partition
    of [n] obtained by deleting n+1, pointing at the block that held it.
    """
    if p.n < 2:
        raise ValueError("need ground size >= 2")
    bit = 1 << (p.n - 1)
    containing = next(b for b in p.blocks if b & bit)
    if containing == bit:
        return None
    blocks = sorted(
        (b if b != containing else b ^ bit for b in p.blocks),
        key=lambda m: m & -m,
    )
    reduced = SetPartition(p.n - 1, tuple(blocks))
    return BlockPointer(reduced, containing ^ bit)


def strip_singleton(p: SetPartition) -> SetPartition:
    """Delete the singleton {n+1} from a partition in the adjoin image."""
    bit = 1 << (p.n - 1)
    if bit not in p.blocks:
        raise ValueError("the last element is not a singleton block")
    return SetPartition(p.n - 1, tuple(b for b in p.blocks if b != bit))


def extend_into_block(bp: BlockPointer) -> SetPartition:
    """Add element n+1 to the pointed block (inverse of classify_extension)."""
    p = bp.partition
    bit = 1 << p.n
    blocks = sorted(
        (b if b != bp.block else b | bit for b in p.blocks),
        key=lambda m: m & -m,
    )
    return SetPartition(p.n + 1, tuple(blocks))
