"""Routing-history tables and the source-side cross-checking defense.

Every node keeps a table of two bits per peer ("routed data from" /
"routed data through"). A source that receives a reply from an unknown
generator interrogates the disclosed next hop with further-request messages,
walking the disclosed chain until a hop it already trusts can confirm or
refute the suspect's claim. Positive classifications flag the whole examined
chain, raise a network-wide alarm, and blacklist the members everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .messages import Alarm, DriEntry, Frp, Frq, NodeId, Rrep


class DriTable:
    """Per-node data-routing-information table; absent peers read as (0,0)."""

    def __init__(self, owner: NodeId):
        self.owner = owner
        self.entries: dict[NodeId, DriEntry] = {}

    def lookup(self, peer: NodeId) -> DriEntry:
        if peer == self.owner:
            raise ValueError("DRI lookup of self")
        return self.entries.get(peer, DriEntry())

    def record_data_event(self, prev_hop: NodeId | None = None,
                          next_hop: NodeId | None = None,
                          next_hop_confirmed: bool = False) -> None:
        """Record one handled data packet.

        The from-bit rises as soon as a packet from prev_hop is forwarded or
        delivered; the through-bit rises only once the downstream hop confirms
        it passed the packet on (otherwise a node absorbing traffic would earn
        trust by merely accepting packets).
        """
        if prev_hop is not None:
            self._raise(prev_hop, from_bit=True)
        if next_hop is not None and next_hop_confirmed:
            self._raise(next_hop, through_bit=True)

    def _raise(self, peer: NodeId, from_bit: bool = False,
               through_bit: bool = False) -> None:
        if peer == self.owner:
            raise ValueError("DRI update for self")
        current = self.entries.get(peer, DriEntry())
        self.entries[peer] = current.union(DriEntry(from_bit, through_bit))

    def is_reliable(self, peer: NodeId) -> bool:
        """A peer is reliable once this node has confirmedly routed data through it."""
        return self.lookup(peer).through_bit

    def mark_verified(self, peer: NodeId) -> None:
        # Clean cross-check verdict grants the through-bit; kept bit-monotone,
        # an already-set from-bit is never reset.
        self._raise(peer, through_bit=True)


def classify_suspect(claimed: DriEntry, reported: DriEntry) -> bool:
    """True when the suspect's through-claim is refuted by the queried hop.

    Flag exactly when the suspect claims it routed data through the hop
    (claimed through-bit 1) while the hop never routed data from the suspect
    (reported from-bit 0).
    """
    return claimed.through_bit and not reported.from_bit


@dataclass
class Blacklist:
    members: set[NodeId] = field(default_factory=set)
    seen_alarm_ids: set[tuple[NodeId, int]] = field(default_factory=set)


def propagate_alarm(alarm: Alarm, blacklist: Blacklist) -> bool:
    """Fold an alarm into the blacklist; True when new (rebroadcast once)."""
    key = (alarm.reporter, alarm.alarm_id)
    if key in blacklist.seen_alarm_ids:
        return False
    blacklist.seen_alarm_ids.add(key)
    blacklist.members.update(alarm.black_holes)
    return True


@dataclass
class CrossCheckSession:
    source: NodeId
    dest: NodeId
    current_suspect: NodeId
    current_target: NodeId
    suspect_claimed_dri: DriEntry
    hops_examined: list[NodeId]  # suspects walked so far, generator first
    round: int
    max_rounds: int
    held_rrep: Rrep  # the unverified reply; installed only on a clean verdict
    held_from: NodeId


# Terminal and intermediate outcomes of the cross-check state machine. The
# engine interprets these; the decision logic stays radio-free.

@dataclass(frozen=True)
class RouteAccepted:
    rrep: Rrep
    sender: NodeId


@dataclass(frozen=True)
class ContinueCheck:
    frq: Frq
    avoid: NodeId  # current suspect; the query must not travel through it


@dataclass(frozen=True)
class BlackHolesFound:
    flagged: frozenset[NodeId]
    route_via: NodeId | None  # reliable target to bypass through, if it has a route
    dest: NodeId


@dataclass(frozen=True)
class RestartDiscovery:
    dest: NodeId


@dataclass(frozen=True)
class Ignored:
    reason: str


class Detector:
    """Source-side secure-route decisions for one detection-enabled node."""

    def __init__(self, self_id: NodeId, dri: DriTable, blacklist: Blacklist,
                 max_rounds: int):
        self.self_id = self_id
        self.dri = dri
        self.blacklist = blacklist
        self.max_rounds = max_rounds
        self.sessions: dict[NodeId, CrossCheckSession] = {}  # keyed by dest
        self.next_alarm_id = 0

    def consider_rrep(self, rrep: Rrep, sender: NodeId, discovery_open: bool):
        """Accept replies from the destination or a reliable node; probe the rest."""
        generator = rrep.generator
        if generator in self.blacklist.members:
            return Ignored("blacklisted generator")
        if generator == rrep.dest or self.dri.is_reliable(generator):
            return RouteAccepted(rrep, sender)
        if not discovery_open:
            return Ignored("no open discovery")
        if rrep.dest in self.sessions:
            return Ignored("cross-check already in progress")
        if rrep.responder_next_hop is None:
            return Ignored("no next hop disclosed")
        session = CrossCheckSession(
            self.self_id, rrep.dest, generator, rrep.responder_next_hop,
            rrep.responder_dri_for_nhn or DriEntry(), [generator], 1,
            self.max_rounds, rrep, sender)
        self.sessions[rrep.dest] = session
        return ContinueCheck(
            Frq(self.self_id, generator, session.current_target, rrep.dest),
            generator)

    def handle_frp(self, dest: NodeId, frp: Frp):
        """Advance the session for dest with a further reply from its target."""
        session = self.sessions.get(dest)
        if session is None or frp.responder != session.current_target:
            return Ignored("unexpected further reply")

        if self.dri.is_reliable(session.current_target):
            del self.sessions[dest]
            if classify_suspect(session.suspect_claimed_dri, frp.dri_for_suspect):
                # Every suspect examined on the walk back to the reply
                # generator is part of the hole.
                via = session.current_target if frp.responder_next_hop is not None else None
                return BlackHolesFound(frozenset(session.hops_examined), via, dest)
            self.dri.mark_verified(session.current_suspect)
            return RouteAccepted(session.held_rrep, session.held_from)

        # Target unknown: it becomes the suspect and its disclosed onward hop
        # the next target, unless the walk cannot continue.
        onward = frp.responder_next_hop
        if (onward is None or session.round >= session.max_rounds
                or onward in session.hops_examined or onward == self.self_id):
            del self.sessions[dest]
            return RestartDiscovery(dest)
        session.current_suspect = session.current_target
        session.current_target = onward
        session.suspect_claimed_dri = frp.dri_for_responder_next_hop or DriEntry()
        session.hops_examined.append(session.current_suspect)
        session.round += 1
        return ContinueCheck(
            Frq(self.self_id, session.current_suspect, onward, dest),
            session.current_suspect)

    def tunnel_failed(self, dest: NodeId):
        """No suspect-avoiding path for the probe: give up without flagging."""
        if dest in self.sessions:
            del self.sessions[dest]
            return RestartDiscovery(dest)
        return Ignored("no session")

    def make_alarm(self, flagged) -> Alarm:
        alarm = Alarm(self.self_id, frozenset(flagged), self.next_alarm_id)
        self.next_alarm_id += 1
        return alarm


def answer_further_request(dri: DriTable, aodv, frq: Frq) -> Frp:
    """Honest node's answer: its entry for the suspect, plus its own onward hop."""
    entry = aodv.routing_table.get(frq.dest)
    if entry is None or not entry.valid:
        return Frp(dri.owner, dri.lookup(frq.suspect))
    return Frp(dri.owner, dri.lookup(frq.suspect),
               entry.next_hop, dri.lookup(entry.next_hop))
