"""User-side recovery pipelines.

Three decoders share the same front half (erasure-decode each block in
the star-product code, strip the interference, keep the desired-file
combination on the support):

* ``recover_plain``   -- sequential peeling, one stripe per iteration;
* ``recover_window``  -- opportunistic window solves that ride through
  bursts of block erasures and otherwise behave like plain peeling;
* ``decode_um``       -- the unit-memory error decoder: per-block
  decoding in the sum code, coset decoding outward from the anchors,
  then Viterbi over the reduced trellis of stripe hypotheses.

``check_guarantee`` evaluates the designed-extended-row-distance budget
that makes ``decode_um`` provably exact.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .errors import (
    DecodingFailure,
    InconsistentBlock,
    InconsistentSystem,
    InvalidParams,
    RankDeficient,
    UncorrectablePattern,
)
from .grs import GrsCode
from .linalg import solve_unique
from .protocol import BLOCK, BYZANTINE, ERASED, PLAIN, PirScheme, ResponseStream

logger = logging.getLogger(__name__)

DIRECT = "direct"
WINDOW = "window-solved"
TRELLIS = "trellis"


@dataclass(frozen=True)
class UmDistanceProfile:
    """Block and coset distances of a unit-memory construction."""

    d_alpha: int
    d1: int
    d2: int

    @classmethod
    def for_byzantine(cls, n: int, k: int, t: int) -> "UmDistanceProfile":
        d_alpha = n - 3 * k - t + 2
        d_coset = n - 2 * k - t + 2
        if d_alpha < 1:
            raise InvalidParams(f"degenerate block distance for n={n}, k={k}, t={t}")
        return cls(d_alpha, d_coset, d_coset)

    def dbar(self, length: int) -> int:
        """Designed extended row distance of a window of ``length`` blocks."""
        if length < 1:
            raise InvalidParams("window length must be >= 1")
        return self.d1 + (length - 1) * self.d_alpha + self.d2


def check_guarantee(weights, profile: UmDistanceProfile) -> bool:
    """True iff every window of iota+1 consecutive blocks carries strictly
    less than dbar(iota)/2 errors, for every iota >= 1.

    A deviation of iota stripes touches iota+1 blocks (each stripe feeds
    two adjacent blocks), which is why the iota-th distance guards the
    (iota+1)-block window; single blocks are bounded through their pairs.
    """
    weights = list(weights)
    total = len(weights)
    for start in range(total - 1):
        acc = weights[start]
        for iota in range(1, total - start):
            acc += weights[start + iota]
            if 2 * acc >= profile.dbar(iota):
                return False
    return True


@dataclass(frozen=True)
class RecoveredFile:
    """The ell recovered stripes with per-stripe provenance."""

    stripes: tuple
    provenance: tuple

    @property
    def ell(self) -> int:
        return len(self.stripes)


# --- shared front half -------------------------------------------------------

def _desired_combination(scheme: PirScheme, block) -> dict:
    """Strip the interference from one intact block.

    Erasure-decodes each sub-round in the star-product code with the
    sub-support treated as erased, and returns {j: u_j} on the support,
    where u_j is the remaining combination of desired-file symbols.
    """
    f = scheme.field
    star = scheme.star_code()
    out = {}
    for r, part in enumerate(scheme.sub_supports):
        word = list(block.parts[r])
        try:
            msg = star.erasure_decode(word, erased=set(part))
        except InconsistentWord as exc:
            raise InconsistentBlock(str(exc)) from exc
        clean = star.encode(msg)
        for j in part:
            out[j] = f.sub(word[j], clean[j])
    return out


def _support_solve(scheme: PirScheme, rhs: dict):
    """Solve X . (G scaled by the z=0 offsets) on the support for one stripe."""
    f = scheme.field
    g = scheme.storage_code.generator_matrix()
    rows = [[f.mul(_offset(scheme, 0, j), g[r][j]) for r in range(scheme.k)]
            for j in sorted(rhs)]
    b = [rhs[j] for j in sorted(rhs)]
    return tuple(solve_unique(f, rows, b))


def recover_plain(stream: ResponseStream, scheme: PirScheme) -> RecoveredFile:
    """Sequential peeling recovery; needs every block intact."""
    if scheme.variant not in (PLAIN, BLOCK):
        raise InvalidParams(f"recover_plain does not apply to {scheme.variant}")
    f = scheme.field
    code = scheme.storage_code
    ell, memory = stream.ell, scheme.memory
    known: dict[int, tuple] = {}
    provenance = []
    for xi in range(1, ell + memory + 1):
        block = stream.block(xi)
        if block.parts is None:
            raise UncorrectablePattern(f"block {xi} is erased")
        u = _desired_combination(scheme, block)
        rhs = {}
        for j, val in u.items():
            acc = val
            for z in range(1, memory + 1):
                prev = xi - z
                if 1 <= prev <= ell:
                    y = code.encode(list(known[prev]))[j]
                    acc = f.sub(acc, f.mul(_offset(scheme, z, j), y))
            rhs[j] = acc
        if xi <= ell:
            try:
                known[xi] = _support_solve(scheme, rhs)
            except InconsistentSystem as exc:
                raise InconsistentBlock(f"block {xi}: {exc}") from exc
            provenance.append(DIRECT)
        else:
            if any(rhs.values()):
                raise InconsistentBlock(
                    f"termination block {xi} disagrees with decoded stripes")
    return RecoveredFile(tuple(known[xi] for xi in range(1, ell + 1)),
                         tuple(provenance))


def _offset(scheme: PirScheme, z: int, j: int) -> int:
    for r, part in enumerate(scheme.sub_supports):
        if j in part:
            return scheme.e_offsets[r][z][j]
    return 0


# --- window decoding ---------------------------------------------------------

def _validate_erasures(stream: ResponseStream, scheme: PirScheme):
    erased = [xi for xi in range(1, len(stream.blocks) + 1)
              if stream.block(xi).status == ERASED]
    eps, window = scheme.burst, scheme.window
    runs = []
    for b in erased:
        if b - 1 in erased:
            continue
        run = 1
        while b + run in erased:
            run += 1
        runs.append((b, run))
    for b, run in runs:
        if run > eps:
            raise UncorrectablePattern(
                f"burst of {run} erasures at block {b} exceeds eps={eps}")
    stream_len = len(stream.blocks)
    erased_set = set(erased)
    for start in range(1, stream_len - window + 2):
        cnt = sum(1 for b in range(start, start + window) if b in erased_set)
        if cnt > eps:
            raise UncorrectablePattern(
                f"{cnt} erasures in the {window}-block window at {start}")


def recover_window(stream: ResponseStream, scheme: PirScheme,
                   certificate=None) -> RecoveredFile:
    """Window recovery through erasure bursts.

    Intact stretches decode stripe-per-block exactly like recover_plain;
    a burst defers its stripes until the window provides a full-rank
    stacked system, which the recovering certificate of the support
    locators guarantees.
    """
    if scheme.variant != BLOCK:
        raise InvalidParams(f"recover_window needs the block-erasure variant")
    if certificate is not None:
        _check_certificate(scheme, certificate)
    _validate_erasures(stream, scheme)
    f = scheme.field
    code = scheme.storage_code
    g = code.generator_matrix()
    ell, memory, window = stream.ell, scheme.memory, scheme.window
    known: dict[int, tuple] = {}
    provenance: dict[int, str] = {}
    unknown: list[int] = []
    pending: list[tuple[int, dict]] = []

    def try_batch(deadline: bool):
        cols = [(xi, r) for xi in unknown for r in range(scheme.k)]
        col_index = {c: i for i, c in enumerate(cols)}
        rows, rhs = [], []
        for s, u in pending:
            for j, val in u.items():
                row = [0] * len(cols)
                acc = val
                for z in range(memory + 1):
                    prev = s - z
                    if prev < 1 or prev > ell:
                        continue
                    off = _offset(scheme, z, j)
                    if prev in known:
                        y = code.encode(list(known[prev]))[j]
                        acc = f.sub(acc, f.mul(off, y))
                    else:
                        for r in range(scheme.k):
                            row[col_index[(prev, r)]] = f.mul(off, g[r][j])
                rows.append(row)
                rhs.append(acc)
        if len(rows) < len(cols):
            if deadline:
                raise UncorrectablePattern(
                    f"stripes {unknown} ran out of equations")
            return False
        try:
            sol = solve_unique(f, rows, rhs)
        except RankDeficient:
            if deadline:
                raise
            return False
        except InconsistentSystem as exc:
            raise InconsistentBlock(str(exc)) from exc
        for xi in unknown:
            base = col_index[(xi, 0)]
            known[xi] = tuple(sol[base: base + scheme.k])
            provenance[xi] = WINDOW
        unknown.clear()
        pending.clear()
        return True

    for xi in range(1, ell + memory + 1):
        block = stream.block(xi)
        if block.status == ERASED:
            if xi <= ell:
                unknown.append(xi)
        else:
            u = _desired_combination(scheme, block)
            if not unknown:
                rhs = {}
                for j, val in u.items():
                    acc = val
                    for z in range(1, memory + 1):
                        prev = xi - z
                        if 1 <= prev <= ell:
                            y = code.encode(list(known[prev]))[j]
                            acc = f.sub(acc, f.mul(_offset(scheme, z, j), y))
                    rhs[j] = acc
                if xi <= ell:
                    try:
                        known[xi] = _support_solve(scheme, rhs)
                    except InconsistentSystem as exc:
                        raise InconsistentBlock(f"block {xi}: {exc}") from exc
                    provenance[xi] = DIRECT
                elif any(rhs.values()):
                    raise InconsistentBlock(
                        f"termination block {xi} disagrees with decoded stripes")
                continue
            if xi <= ell:
                unknown.append(xi)
            pending.append((xi, u))
            try_batch(deadline=False)
        if unknown and xi >= unknown[0] + window - 1:
            try_batch(deadline=True)
    if unknown:
        try_batch(deadline=True)
    return RecoveredFile(tuple(known[xi] for xi in range(1, ell + 1)),
                         tuple(provenance[xi] for xi in range(1, ell + 1)))


def _check_certificate(scheme: PirScheme, certificate):
    locs = tuple(scheme.storage_code.locators[j] for j in scheme.support)
    if (certificate.k != scheme.k or certificate.M != scheme.memory
            or set(certificate.locators) != set(locs)):
        raise InvalidParams("certificate does not match the scheme support")
    if not certificate.verdict:
        raise RankDeficient("support locators lack the recovering property")


# --- unit-memory error decoding ----------------------------------------------

_BOT = None  # trellis pass-through node


def decode_um(stream: ResponseStream, scheme: PirScheme) -> RecoveredFile:
    """Unit-memory decoding of a stream with symbol errors.

    Step 1 decodes each block in the sum code; step 2 extends from every
    anchor through the cosets of the neighbours; step 3 runs Viterbi over
    the reduced trellis of stripe hypotheses (an unknown node with
    saturated metric bridges gaps); step 4 reads the stripes off the
    winning path, whose per-block split is unique by construction.
    """
    if scheme.variant != BYZANTINE:
        raise InvalidParams("decode_um needs the unit-memory error variant")
    f = scheme.field
    code = scheme.storage_code
    n, k, t = scheme.n, scheme.k, scheme.t
    ell = stream.ell
    locs = code.locators
    e1, e2 = scheme.e_offsets[0]
    c_sum = GrsCode(f, n, 3 * k + t - 1, locs, e1)
    c_fwd = GrsCode(f, n, 2 * k + t - 1, locs, e1)   # desired + interference
    c_bwd = GrsCode(f, n, 2 * k + t - 1, locs)       # interference + delayed
    c_int = scheme.star_code()
    saturated = c_int.d
    zero = (0,) * k

    def enc(stripe):
        return code.encode(list(stripe))

    def sub_scaled(word, offsets, stripe):
        y = enc(stripe)
        return [f.sub(w, f.mul(o, v)) for w, o, v in zip(word, offsets, y)]

    candidates: dict[int, set] = {xi: set() for xi in range(1, ell + 1)}
    anchored: dict[int, tuple] = {}

    # step 1: per-block decoding in the sum code
    for xi in range(1, ell + 2):
        block = stream.block(xi)
        if block.parts is None:
            continue
        try:
            msg, errors = c_sum.bmd_decode(list(block.parts[0]))
        except DecodingFailure:
            continue
        cur = tuple(msg[:k])
        prev = tuple(msg[2 * k + t - 1:])
        anchored[xi] = (cur, prev)
        if xi <= ell:
            candidates[xi].add(cur)
        if xi - 1 >= 1:
            candidates[xi - 1].add(prev)

    # step 2: coset chains from every anchor and both stream boundaries.
    # Chains run at maximal depth, straight through other anchored blocks:
    # an anchor with more errors than the per-block radius can be a
    # miscorrection, and stopping there would suppress the correct
    # candidates its neighbours can still derive.
    def forward(s, prev_stripe):
        while s <= ell:
            block = stream.block(s)
            if block.parts is None:
                return
            residual = sub_scaled(block.parts[0], e2, prev_stripe)
            try:
                msg, _ = c_fwd.bmd_decode(residual)
            except DecodingFailure:
                return
            cur = tuple(msg[:k])
            candidates[s].add(cur)
            prev_stripe = cur
            s += 1

    def backward(s, cur_stripe):
        while s >= 2:
            block = stream.block(s)
            if block.parts is None:
                return
            residual = sub_scaled(block.parts[0], e1, cur_stripe)
            try:
                msg, _ = c_bwd.bmd_decode(residual)
            except DecodingFailure:
                return
            prev = tuple(msg[k + t - 1:])
            candidates[s - 1].add(prev)
            cur_stripe = prev
            s -= 1

    forward(1, zero)
    backward(ell + 1, zero)
    for xi, (cur, prev) in sorted(anchored.items()):
        forward(xi + 1, cur)
        if xi - 1 >= 1:
            backward(xi - 1, prev)

    # step 3: Viterbi over the reduced trellis
    stages: list[list] = [[zero]]
    for xi in range(1, ell + 1):
        stages.append(sorted(candidates[xi]) + [_BOT])
    stages.append([zero])

    enc_cache: dict[tuple, list] = {}

    def encoded(stripe):
        if stripe not in enc_cache:
            enc_cache[stripe] = enc(stripe)
        return enc_cache[stripe]

    def branch_metric(xi, a, b):
        block = stream.block(xi)
        if block.parts is None:
            return 0
        if a is _BOT or b is _BOT:
            return saturated
        word = list(block.parts[0])
        ya, yb = encoded(a), encoded(b)
        residual = [
            f.sub(w, f.add(f.mul(o1, v1), f.mul(o2, v2)))
            for w, o1, v1, o2, v2 in zip(word, e1, yb, e2, ya)
        ]
        try:
            _, errors = c_int.bmd_decode(residual)
        except DecodingFailure:
            return saturated
        return 2 * len(errors)

    costs = [{zero: 0}]
    back: list[dict] = [{}]
    for xi in range(1, ell + 2):
        cost: dict = {}
        prev_nodes = stages[xi - 1]
        ptr: dict = {}
        for b in stages[xi]:
            best = None
            best_prev = None
            for a in prev_nodes:
                base = costs[xi - 1].get(a)
                if base is None:
                    continue
                total = base + branch_metric(xi, a, b)
                if best is None or total < best:
                    best = total
                    best_prev = a
            if best is not None:
                cost[b] = best
                ptr[b] = best_prev
        costs.append(cost)
        back.append(ptr)
        logger.debug("block %d: status=%s candidates=%d best=%s",
                     xi, stream.block(xi).status, len(stages[xi]),
                     min(cost.values()) if cost else None)

    if zero not in costs[ell + 1]:
        raise DecodingFailure("no trellis path reaches the terminated state")
    path = [zero]
    for xi in range(ell + 1, 0, -1):
        path.append(back[xi][path[-1]])
    path.reverse()
    stripes = path[1: ell + 1]
    if any(s is _BOT for s in stripes):
        raise DecodingFailure("winning path passes through an unknown block")
    return RecoveredFile(tuple(stripes), (TRELLIS,) * ell)
