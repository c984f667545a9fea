"""Deterministic, seedable channel models: block-erasure bursts and
symbol errors / Byzantine servers, plus pattern generators for tests.

Erasures are whole blocks (all n responses of an iteration lost); errors
substitute individual symbols and are always real changes, never
accidental no-ops.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .decoder import UmDistanceProfile, check_guarantee
from .errors import InvalidParams
from .protocol import Block, ERASED, ERRORED, ResponseStream
from .seeds import derive_rng


@dataclass(frozen=True)
class ErasureSchedule:
    """Set of erased block indices (1-based) within a stream of ell+M blocks.

    Valid schedules have every burst of consecutive erasures at most eps
    long and at most eps erased blocks inside any window of N consecutive
    blocks, so each burst is resolvable within its window.
    """

    erased: frozenset
    ell: int
    memory: int
    window: int
    burst: int

    @property
    def stream_len(self) -> int:
        return self.ell + self.memory

    def is_valid(self) -> bool:
        if any(not 1 <= b <= self.stream_len for b in self.erased):
            return False
        for b in self.erased:
            run = 1
            while b + run in self.erased:
                run += 1
            if b - 1 not in self.erased and run > self.burst:
                return False
        for start in range(1, self.stream_len - self.window + 2):
            cnt = sum(1 for b in range(start, start + self.window)
                      if b in self.erased)
            if cnt > self.burst:
                return False
        return True

    def to_csv(self) -> str:
        lines = ["block,server,kind"]
        for b in sorted(self.erased):
            lines.append(f"{b},,erase")
        return "\n".join(lines) + "\n"


def gen_burst_patterns(ell: int, memory: int, window: int, eps: int,
                       mode: str, seed: int | None = None,
                       count: int = 10) -> list[ErasureSchedule]:
    """Erasure schedules for a stream of ell+memory blocks.

    'shifted-family' emits the N cyclic shifts of the canonical
    eps-burst-per-window pattern; 'exhaustive' emits every valid schedule
    (small streams only); 'random' draws valid schedules from a seed.
    """
    if eps == 0:
        return [ErasureSchedule(frozenset(), ell, memory, window, eps)]
    if not window > eps >= 0:
        raise InvalidParams(f"need N > eps >= 0, got N={window}, eps={eps}")
    stream_len = ell + memory

    def make(blocks) -> ErasureSchedule:
        return ErasureSchedule(frozenset(blocks), ell, memory, window, eps)

    if mode == "shifted-family":
        cycle = -(-ell // window) * window
        out = []
        for z in range(window):
            blocks = set()
            for seg in range(cycle // window):
                for c in range(1, eps + 1):
                    b = (seg * window + z + c) % cycle
                    if b == 0:
                        b = cycle
                    if b <= stream_len:
                        blocks.add(b)
            out.append(make(blocks))
        return out

    if mode == "exhaustive":
        if stream_len > 22:
            raise InvalidParams("exhaustive enumeration only for short streams")
        out = []
        for r in range(stream_len + 1):
            for blocks in itertools.combinations(range(1, stream_len + 1), r):
                sched = make(blocks)
                if sched.is_valid():
                    out.append(sched)
        return out

    if mode == "random":
        if seed is None:
            raise InvalidParams("random mode needs a seed")
        out = []
        for i in range(count):
            rng = derive_rng(seed, "burst", i)
            blocks = []
            pos = 1
            while pos <= stream_len:
                if rng.random() < 0.4:
                    run = rng.randint(1, eps)
                    blocks.extend(b for b in range(pos, min(pos + run, stream_len + 1)))
                    pos += window
                else:
                    pos += 1
            out.append(make(blocks))
        return out

    raise InvalidParams(f"unknown mode {mode!r}")


def erasure_schedule_from_csv(text: str, ell: int, memory: int, window: int,
                              eps: int) -> ErasureSchedule:
    blocks = set()
    for ln in text.strip().splitlines()[1:]:
        b, _, kind = ln.split(",")
        if kind != "erase":
            raise InvalidParams(f"unexpected schedule row kind {kind!r}")
        blocks.add(int(b))
    return ErasureSchedule(frozenset(blocks), ell, memory, window, eps)


def error_schedule_from_csv(text: str, mode: str = "replay") -> "ErrorSchedule":
    entries = []
    for ln in text.strip().splitlines()[1:]:
        b, j, kind = ln.split(",")
        if kind != "error":
            raise InvalidParams(f"unexpected schedule row kind {kind!r}")
        entries.append((int(b), int(j), 0))
    return ErrorSchedule(tuple(entries), mode)


def apply_erasures(stream: ResponseStream, schedule: ErasureSchedule) -> ResponseStream:
    blocks = list(stream.blocks)
    for b in schedule.erased:
        if not 1 <= b <= len(blocks):
            raise InvalidParams(f"block {b} outside the stream")
        blocks[b - 1] = Block(ERASED, None)
    return ResponseStream(stream.n, stream.ell, stream.memory, stream.rounds,
                          tuple(blocks), stream.downloaded)


@dataclass(frozen=True)
class ErrorSchedule:
    """Symbol substitutions: (block, server, proposed value) triples.

    In fixed-Byzantine mode the corrupted server set is the same in every
    block.  Proposed values are drawn at generation time; application
    resamples any that collide with the stored symbol.
    """

    entries: tuple
    mode: str

    def weights(self, stream_len: int) -> list[int]:
        w = [0] * stream_len
        for b, _, _ in self.entries:
            w[b - 1] += 1
        return w

    def to_csv(self) -> str:
        lines = ["block,server,kind"]
        for b, j, _ in self.entries:
            lines.append(f"{b},{j},error")
        return "\n".join(lines) + "\n"


def gen_error_schedule(profile: UmDistanceProfile, ell: int, memory: int,
                       n: int, q: int, mode: str, seed: int,
                       b: int | None = None,
                       max_weight: int | None = None) -> ErrorSchedule:
    """Draw one error schedule.

    'budget' rejection-samples until the guarantee check passes, so every
    emitted schedule is decodable by design; 'fixed-byzantine' corrupts
    the same b servers in every block; 'none' is empty; 'random' ignores
    the budget.
    """
    stream_len = ell + memory
    if mode == "none":
        return ErrorSchedule((), mode)
    if mode == "fixed-byzantine":
        if b is None or not 0 <= b <= n:
            raise InvalidParams("fixed-byzantine mode needs 0 <= b <= n")
        rng = derive_rng(seed, "errors", "fixed")
        servers = sorted(rng.sample(range(n), b))
        entries = tuple(
            (blk, j, rng.randrange(q))
            for blk in range(1, stream_len + 1)
            for j in servers
        )
        return ErrorSchedule(entries, mode)
    if mode not in ("budget", "random"):
        raise InvalidParams(f"unknown mode {mode!r}")
    cap = max_weight if max_weight is not None else (profile.dbar(1) - 1) // 2
    for attempt in range(10000):
        rng = derive_rng(seed, "errors", attempt)
        entries = []
        weights = []
        for blk in range(1, stream_len + 1):
            w = rng.randint(0, cap)
            weights.append(w)
            for j in sorted(rng.sample(range(n), w)):
                entries.append((blk, j, rng.randrange(q)))
        if mode == "random" or check_guarantee(weights, profile):
            return ErrorSchedule(tuple(entries), mode)
    raise InvalidParams("could not sample a budget-respecting schedule")


def apply_errors(stream: ResponseStream, schedule: ErrorSchedule, q: int,
                 seed: int) -> ResponseStream:
    """Substitute the scheduled symbols, resampling any proposed value
    that equals the stored one so every entry is a real corruption."""
    if stream.rounds != 1:
        raise InvalidParams("symbol errors target single-round streams")
    rng = derive_rng(seed, "error-values")
    blocks = list(stream.blocks)
    by_block: dict[int, list] = {}
    for b, j, v in schedule.entries:
        by_block.setdefault(b, []).append((j, v))
    for b, subs in sorted(by_block.items()):
        blk = blocks[b - 1]
        if blk.parts is None:
            raise InvalidParams(f"block {b} is erased; cannot add errors")
        vec = list(blk.parts[0])
        for j, v in subs:
            original = vec[j]
            while v == original:
                v = rng.randrange(q)
            vec[j] = v
        blocks[b - 1] = Block(ERRORED, (tuple(vec),))
    return ResponseStream(stream.n, stream.ell, stream.memory, stream.rounds,
                          tuple(blocks), stream.downloaded)
