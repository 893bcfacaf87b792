"""Distributed zone construction by synchronous message passing.

Every node runs the same three-phase procedure over the communication
graph G, knowing initially only its own apparent position:

1. Triangulation: each node floods its position k hops, builds a Voronoi
   diagram of the positions it learned, reads triangulation edges off the
   cell sequences its incident G-edges traverse, floods those edges k
   hops, and asserts a global failure when a received edge joins cells
   that are not adjacent in its own diagram.
2. Face probing: each node launches one probe per incident triangulation
   edge; a probe walks the face on the left of its starting edge (at each
   node it turns to the first neighbor counterclockwise from the reversed
   arrival direction), records the nodes it meets, and asserts a global
   failure when two face segments cross.  The nodes of each face then
   compute a face-local Voronoi diagram and mark boundaries between cells
   whose owners are farther than k hops apart as hole strips.
3. Zone assembly: each node intersects its face cells into its final
   Voronoi cell, floods cell and holes k hops, asserts a global failure
   when a triangulation neighbor's cell is not adjacent to its own, and
   assembles its zone from its own and its k-hop neighbors' cells.

A successful run reproduces the canonical simulation for the same k: the
zones are the same cell-id sets and the union of hole strips equals the
forbidden boundary pairs.  A global failure carries a concrete witness
and proves that the geographic eccentricity of the network exceeds k.

The simulator is synchronous with reliable in-order delivery: a k-hop
broadcast is k rounds of flooding with duplicate suppression, counted as
one message per node reached; a probe forward along a triangulation edge
costs one message per G-hop.  Messages are applied in sorted sender-id
order, so verdicts, witnesses, and zones are deterministic.

Hole strips are symbolic: a strip is identified by the pair of cell
owners whose common boundary it removes, the same representation the
canonical simulation uses for forbidden boundaries.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .errors import Disconnected, PreconditionViolated, ProbeLost
from .geometry import build_subdivision, cells_traversed, segments_cross
from .netgen import LocalizedNetwork
from .netgraph import all_pairs_distances

PHASE_DELAUNAY = "delaunay"
PHASE_PROBE = "probe"
PHASE_ZONE = "zone"


class FailureCause(Enum):
    """What a global failure was asserted on.

    Each value corresponds to exactly one check in the three phases.
    """

    NON_LOCAL_DELAUNAY_EDGE = "non-local delaunay edge"
    CROSSING_LINKS = "crossing links"
    NON_ADJACENT_CELLS = "non-adjacent cells"


@dataclass(frozen=True)
class GlobalFailure:
    """Verdict proving the geographic eccentricity exceeds the tested k.

    The witness is concrete: for NON_LOCAL_DELAUNAY_EDGE an
    ``((a, b), checker)`` tuple naming the received edge and the node
    whose diagram contradicts it; for CROSSING_LINKS the two crossing
    edges ``((a, b), (c, d))``; for NON_ADJACENT_CELLS the triangulation
    neighbors ``(u, v)`` whose cells do not touch.
    """

    cause: FailureCause
    witness: tuple


@dataclass(frozen=True)
class Success:
    """Verdict carrying the per-node zones and the hole-strip pairs."""

    zones: dict[int, frozenset[int]]
    holes: frozenset[tuple[int, int]]


@dataclass(frozen=True)
class FaceResult:
    """One face of the computed triangulation, after deduplication.

    ``cycle`` is the walk of the lowest-id initiator's probe (first and
    last entry equal); ``members`` the distinct nodes on the face;
    ``holes`` the face-local adjacent cell pairs more than k hops apart.
    """

    cycle: tuple[int, ...]
    members: frozenset[int]
    initiator: int
    holes: frozenset[tuple[int, int]]


@dataclass(frozen=True)
class MessageCounts:
    """Per-phase message totals.

    Broadcast phases count one message per node reached; the probe phase
    counts one message per G-hop of probe forwarding.  ``probe`` counts
    every launched probe, ``probe_dedup`` only the lowest-initiator probe
    kept per face; totals use the raw count since all probes are sent.
    """

    delaunay: int
    probe: int
    probe_dedup: int
    zone: int

    @property
    def total(self) -> int:
        return self.delaunay + self.probe + self.zone


@dataclass(frozen=True)
class ProtocolRun:
    """Outcome of a full protocol execution at a given k."""

    k: int
    rounds: int
    messages_sent: MessageCounts
    verdict: Success | GlobalFailure


def _pair(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


@dataclass
class _Base:
    """Shared read-only facts: positions, box, G-distances, k-reach."""

    net: LocalizedNetwork
    k: int
    pos: tuple
    box: object
    dist: np.ndarray
    reach: list[list[int]]


def _base(net: LocalizedNetwork, k: int) -> _Base:
    if k < 1:
        raise PreconditionViolated(f"k must be >= 1, got {k}")
    if not net.graph.is_connected():
        raise Disconnected("protocol requires a connected network")
    dist = all_pairs_distances(net.graph)
    reach = [[int(v) for v in np.flatnonzero(dist[u] <= k)]
             for u in range(net.n)]
    return _Base(net, k, net.apparent_positions, net.routing_box(),
                 dist, reach)


@dataclass
class _LocalViews:
    """Instruction-level per-node state of the triangulation phase."""

    subs: list
    derived: list[list[tuple[int, int]]]


def _local_views(base: _Base) -> _LocalViews:
    pos = base.pos
    subs = []
    derived = []
    for u in range(base.net.n):
        sub = build_subdivision([(i, pos[i]) for i in base.reach[u]],
                                base.box)
        pairs: set[tuple[int, int]] = set()
        for v in base.net.graph.adjacency[u]:
            flat = cells_traversed(sub, (pos[u], pos[v]))
            for a, b in zip(flat, flat[1:]):
                p = _pair(a, b)
                if p in sub.adjacency:
                    pairs.add(p)
        subs.append(sub)
        derived.append(sorted(pairs))
    return _LocalViews(subs, derived)


def _delaunay_check(base: _Base, views: _LocalViews) -> GlobalFailure | None:
    """Reject any received edge whose cells a receiver sees as separate.

    Two receiver roles apply.  An endpoint of the edge judges it
    unconditionally: its own cell is always in its local diagram, and a
    partner missing from the position flood means the diagram shows no
    adjacent cell for it, which is a rejection.  That is sound because
    when the smallest valid horizon is at most k every derived pair
    matches a consecutive pair of the full-knowledge traversal and those
    sit within k hops of each other, so the partner is always known.  A
    third-party receiver judges only edges whose two endpoints it
    learned during the flood; at a valid horizon it may legitimately
    know just one endpoint, so skipping is required for completeness.
    Cell adjacency never disappears when sites are removed, so a
    locally separate pair is separate in the full diagram and the
    assertion is sound for both roles.
    """
    for x in range(base.net.n):
        known = set(base.reach[x])
        adjacency = views.subs[x].adjacency
        for sender in base.reach[x]:
            for edge in views.derived[sender]:
                a, b = edge
                if x == a or x == b:
                    partner = b if x == a else a
                    if partner not in known or edge not in adjacency:
                        return GlobalFailure(
                            FailureCause.NON_LOCAL_DELAUNAY_EDGE, (edge, x))
                elif a in known and b in known and edge not in adjacency:
                    return GlobalFailure(FailureCause.NON_LOCAL_DELAUNAY_EDGE,
                                         (edge, x))
    return None


def _gamma(base: _Base, views: _LocalViews) -> dict[int, tuple[int, ...]]:
    nbrs: list[set[int]] = [set() for _ in range(base.net.n)]
    for u in range(base.net.n):
        for sender in base.reach[u]:
            for a, b in views.derived[sender]:
                if u == a:
                    nbrs[u].add(b)
                elif u == b:
                    nbrs[u].add(a)
    return {u: tuple(sorted(nbrs[u])) for u in range(base.net.n)}


def run_distributed_delaunay(net: LocalizedNetwork, k: int):
    """Triangulation phase: per-node neighborhoods or a global failure."""
    base = _base(net, k)
    views = _local_views(base)
    failure = _delaunay_check(base, views)
    if failure is not None:
        return failure
    return _gamma(base, views)


def _next_face_neighbor(pos, gamma, cur: int, prev: int) -> int | None:
    """First triangulation neighbor counterclockwise from the arrival edge.

    The reversed arrival direction itself counts as a full turn, so a
    probe bounces back from a degree-one node.  Ties (exactly collinear
    neighbors) break by distance then id, keeping walks deterministic.
    """
    nbrs = gamma.get(cur, ())
    if not nbrs:
        return None
    px, py = pos[cur]
    base_angle = math.atan2(pos[prev][1] - py, pos[prev][0] - px)
    tau = 2.0 * math.pi
    best = None
    for w in nbrs:
        wx, wy = pos[w]
        theta = (math.atan2(wy - py, wx - px) - base_angle) % tau
        if theta == 0.0:
            theta = tau
        key = (theta, (wx - px) ** 2 + (wy - py) ** 2, w)
        if best is None or key < best:
            best = key
    return best[2]


def _face_walk(pos, gamma, u0: int, v0: int, cap: int):
    """Walk the face on the left of directed edge (u0, v0).

    Returns the node cycle (closed: first == last) and the directed edges
    walked.  Raises ProbeLost when the walk cannot return to its starting
    edge, which only happens when nodes disagree on the triangulation.
    """
    cycle = [u0, v0]
    dedges = [(u0, v0)]
    prev, cur = u0, v0
    while True:
        nxt = _next_face_neighbor(pos, gamma, cur, prev)
        if nxt is None:
            raise ProbeLost(f"probe from {u0} via {v0} stranded at {cur}")
        if (cur, nxt) == (u0, v0):
            break
        dedges.append((cur, nxt))
        cycle.append(nxt)
        if len(dedges) > cap:
            raise ProbeLost(f"probe from {u0} via {v0} exceeded "
                            f"{cap} forwards")
        prev, cur = cur, nxt
    return cycle, dedges


@dataclass(frozen=True)
class _ProbeAccounting:
    raw_probes: int
    raw_hops: int
    dedup_hops: int
    per_probe_hops: tuple[int, ...]


def _probe_phase(base: _Base, gamma):
    """All face probes: deduplicated faces plus accounting, or a failure."""
    pos = base.pos
    cap = sum(len(v) for v in gamma.values()) + 2
    probes = []
    for u in sorted(gamma):
        for v in gamma[u]:
            cycle, dedges = _face_walk(pos, gamma, u, v, cap)
            hops = int(sum(base.dist[a, b] for a, b in dedges))
            probes.append((u, v, cycle, dedges, hops))

    groups: dict[frozenset, list] = {}
    for probe in probes:
        groups.setdefault(frozenset(probe[3]), []).append(probe)
    reps = sorted((groups[key][0] for key in groups),
                  key=lambda p: p[:2])
    accounting = _ProbeAccounting(
        raw_probes=len(probes),
        raw_hops=sum(p[4] for p in probes),
        dedup_hops=sum(p[4] for p in reps),
        per_probe_hops=tuple(p[4] for p in probes),
    )

    faces = []
    for u0, v0, cycle, dedges, hops in reps:
        for i in range(len(dedges)):
            a, b = dedges[i]
            seg_i = (pos[a], pos[b])
            for j in range(i + 1, len(dedges)):
                c, d = dedges[j]
                if a == c or a == d or b == c or b == d:
                    continue
                if segments_cross(seg_i, (pos[c], pos[d])):
                    failure = GlobalFailure(FailureCause.CROSSING_LINKS,
                                            ((a, b), (c, d)))
                    return failure, accounting
        members = frozenset(cycle)
        fsub = build_subdivision([(i, pos[i]) for i in sorted(members)],
                                 base.box)
        holes = frozenset(p for p in fsub.adjacency
                          if base.dist[p[0], p[1]] > base.k)
        faces.append(FaceResult(tuple(cycle), members, u0, holes))
    return tuple(faces), accounting


def run_face_probe(net: LocalizedNetwork, k: int, gamma):
    """Face-probing phase: deduplicated face results or a global failure."""
    base = _base(net, k)
    result, _ = _probe_phase(base, gamma)
    return result


def _zone_phase(base: _Base, gamma, faces):
    """Final cells, adjacency and embedding checks, zones and holes.

    Besides the cell-adjacency assertion for triangulation neighbors,
    each node re-traces its incident communication edges in its final
    diagram and rejects any traversed cell owned by a node outside its
    k-neighborhood: such a cell cannot belong to the node's zone, so
    the zone cannot cover the edge embedding.  When the smallest valid
    horizon is at most k, every owner along an incident edge is within
    k of the node and is therefore known, which makes the final local
    trace identical to the full-knowledge one; the assertion then never
    fires, and firing is sound evidence that the horizon exceeds k.
    """
    n = base.net.n
    pos = base.pos
    face_members: list[set[int]] = [set() for _ in range(n)]
    face_holes: list[set[tuple[int, int]]] = [set() for _ in range(n)]
    for face in faces:
        for u in face.members:
            face_members[u] |= face.members
            face_holes[u] |= face.holes

    zones: dict[int, frozenset[int]] = {}
    holes: set[tuple[int, int]] = set()
    for u in range(n):
        reachset = set(base.reach[u])
        known = sorted(reachset | face_members[u])
        zsub = build_subdivision([(i, pos[i]) for i in known], base.box)
        for v in gamma.get(u, ()):
            if _pair(u, v) not in zsub.adjacency:
                return GlobalFailure(FailureCause.NON_ADJACENT_CELLS, (u, v))
        for v in base.net.graph.adjacency[u]:
            for owner in cells_traversed(zsub, (pos[u], pos[v])):
                if owner not in reachset:
                    return GlobalFailure(FailureCause.NON_ADJACENT_CELLS,
                                         (u, owner))
        for p in zsub.adjacency:
            if u in p and base.dist[p[0], p[1]] > base.k and p in face_holes[u]:
                holes.add(p)
        zones[u] = frozenset(base.reach[u])
    return Success(zones, frozenset(holes))


def _gamma_from_faces(faces) -> dict[int, tuple[int, ...]]:
    nbrs: dict[int, set[int]] = {}
    for face in faces:
        cycle = face.cycle
        for a, b in zip(cycle, cycle[1:]):
            nbrs.setdefault(a, set()).add(b)
            nbrs.setdefault(b, set()).add(a)
    return {u: tuple(sorted(v)) for u, v in nbrs.items()}


def run_zone_computation(net: LocalizedNetwork, k: int, faces):
    """Zone-assembly phase: Success with zones and holes, or a failure."""
    base = _base(net, k)
    return _zone_phase(base, _gamma_from_faces(faces), faces)


def _flood_round_counts(dist: np.ndarray, k: int) -> list[int]:
    """Messages delivered in each round of an all-node k-hop flood.

    Round r of a flood with duplicate suppression delivers each origin's
    message to the nodes at G-distance exactly r, so the per-round count
    is the number of ordered pairs at that distance.
    """
    return [int((dist == r).sum()) for r in range(1, k + 1)]


def run_full_protocol(net: LocalizedNetwork, k: int,
                      trace: Callable[[str], None] | None = None) -> ProtocolRun:
    """Chain the three phases and account rounds and messages.

    The trace callback, when given, receives one line per executed round:
    ``round <i>: <msgs> messages, phase <name>``.
    """
    base = _base(net, k)
    flood = _flood_round_counts(base.dist, k)
    round_no = 0

    def emit(counts: list[int], phase: str) -> None:
        nonlocal round_no
        for m in counts:
            round_no += 1
            if trace is not None:
                trace(f"round {round_no}: {m} messages, phase {phase}")

    emit(flood, PHASE_DELAUNAY)
    views = _local_views(base)
    emit(flood, PHASE_DELAUNAY)
    delaunay_msgs = 2 * sum(flood)

    failure = _delaunay_check(base, views)
    if failure is not None:
        counts = MessageCounts(delaunay_msgs, 0, 0, 0)
        return ProtocolRun(k, round_no, counts, failure)

    gamma = _gamma(base, views)
    result, accounting = _probe_phase(base, gamma)
    probe_rounds = max(accounting.per_probe_hops, default=0)
    emit([sum(1 for h in accounting.per_probe_hops if h >= r)
          for r in range(1, probe_rounds + 1)], PHASE_PROBE)
    if isinstance(result, GlobalFailure):
        counts = MessageCounts(delaunay_msgs, accounting.raw_hops,
                               accounting.dedup_hops, 0)
        return ProtocolRun(k, round_no, counts, result)

    verdict = _zone_phase(base, gamma, result)
    emit(flood, PHASE_ZONE)
    counts = MessageCounts(delaunay_msgs, accounting.raw_hops,
                           accounting.dedup_hops, sum(flood))
    return ProtocolRun(k, round_no, counts, verdict)
