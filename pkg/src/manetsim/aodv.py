"""Per-node AODV route discovery: routing table, flooding, reply selection, forwarding.

Nodes are pure state machines: handlers return action values (broadcast,
unicast, drop, ...) and the simulation engine interprets them. No timers or
radio knowledge lives here.
"""

from __future__ import annotations

import dataclasses
from collections import deque
from dataclasses import dataclass

from .messages import DataPacket, NodeId, Rrep, Rreq

MAX_BUFFERED_PER_DEST = 64


@dataclass(frozen=True)
class Broadcast:
    msg: object


@dataclass(frozen=True)
class Unicast:
    to: NodeId
    msg: object


@dataclass(frozen=True)
class NoRoute:
    """Data packet dropped at an intermediate node with no usable route."""

    pkt: DataPacket


@dataclass(frozen=True)
class BufferDrop:
    """Oldest buffered packet evicted by the per-destination cap."""

    pkt: DataPacket


@dataclass(frozen=True)
class NeedDiscovery:
    """Origin buffered a packet and wants a route discovery for dest."""

    dest: NodeId


@dataclass
class RoutingTableEntry:
    dest: NodeId
    next_hop: NodeId
    hop_count: int
    dest_seq: int
    valid: bool = True
    generator: NodeId | None = None  # reply generator the entry was learned from


class AodvNode:
    """AODV state for one honest node, owned and driven by the engine's event loop."""

    def __init__(self, self_id: NodeId, dri_lookup=None, gratuitous_rrep: bool = False):
        self.self_id = self_id
        self.own_seq = 0
        self.routing_table: dict[NodeId, RoutingTableEntry] = {}
        self.seen_rreqs: set[tuple[NodeId, int]] = set()
        self.next_broadcast_id = 0
        self.pending: dict[NodeId, deque[DataPacket]] = {}
        self.dri_lookup = dri_lookup  # peer -> DriEntry, disclosed in intermediate replies
        self.gratuitous_rrep = gratuitous_rrep
        self.mutations = 0  # bumped on any table change; lets tests snapshot lazily

    # -- routing table ------------------------------------------------------

    def _fresher(self, existing: RoutingTableEntry | None, seq: int, hops: int) -> bool:
        # Sequence numbers dominate; hop count breaks ties; an equal-seq update
        # may revive an invalidated entry. A lower seq never installs, even
        # over an invalid entry, so learned freshness only moves forward.
        if existing is None:
            return True
        if seq > existing.dest_seq:
            return True
        if seq == existing.dest_seq and (not existing.valid or hops < existing.hop_count):
            return True
        return False

    def _install(self, dest: NodeId, next_hop: NodeId, hops: int, seq: int,
                 generator: NodeId | None = None) -> bool:
        if self._fresher(self.routing_table.get(dest), seq, hops):
            self.routing_table[dest] = RoutingTableEntry(dest, next_hop, hops, seq,
                                                         True, generator)
            self.mutations += 1
            return True
        return False

    def has_valid_route(self, dest: NodeId) -> bool:
        entry = self.routing_table.get(dest)
        return entry is not None and entry.valid

    def last_known_seq(self, dest: NodeId) -> int:
        entry = self.routing_table.get(dest)
        return entry.dest_seq if entry is not None else 0

    # -- discovery ----------------------------------------------------------

    def originate_discovery(self, dest: NodeId) -> list:
        """Start a new discovery flood for dest; returns the broadcast action."""
        if dest == self.self_id:
            raise ValueError("discovery for self")
        self.own_seq += 1
        bid = self.next_broadcast_id
        self.next_broadcast_id += 1
        self.seen_rreqs.add((self.self_id, bid))  # ignore echoes of our own flood
        rreq = Rreq(self.self_id, self.own_seq, bid, dest, self.last_known_seq(dest), 0)
        return [Broadcast(rreq)]

    def handle_rreq(self, rreq: Rreq, sender: NodeId) -> list:
        """Process one copy of a discovery flood arriving from a neighbor.

        Duplicates are dropped; otherwise the reverse route toward the
        originator is refreshed and the node answers (destination or fresh
        intermediate) or rebroadcasts.
        """
        key = (rreq.origin, rreq.broadcast_id)
        if key in self.seen_rreqs:
            return []
        self.seen_rreqs.add(key)
        self._install(rreq.origin, sender, rreq.hop_count + 1, rreq.origin_seq)

        if rreq.dest == self.self_id:
            return [Unicast(sender, self.make_dest_rrep(rreq))]

        entry = self.routing_table.get(rreq.dest)
        if entry is not None and entry.valid and entry.dest_seq >= rreq.dest_seq_known:
            dri = self.dri_lookup(entry.next_hop) if self.dri_lookup else None
            reply = Rrep(rreq.origin, rreq.dest, entry.dest_seq, entry.hop_count,
                         self.self_id, entry.next_hop, dri)
            out = [Unicast(sender, reply)]
            if self.gratuitous_rrep:
                # Tell the destination about the reverse path as well.
                grat = Rrep(rreq.dest, rreq.origin, rreq.origin_seq,
                            rreq.hop_count, self.self_id)
                out.append(Unicast(entry.next_hop, grat))
            return out

        return [Broadcast(dataclasses.replace(rreq, hop_count=rreq.hop_count + 1))]

    def make_dest_rrep(self, rreq: Rreq) -> Rrep:
        """Destination-side reply: seq becomes max(own, requested + 1)."""
        if rreq.dest != self.self_id:
            raise ValueError("destination reply requested at a non-destination node")
        self.own_seq = max(self.own_seq, rreq.dest_seq_known + 1)
        return Rrep(rreq.origin, self.self_id, self.own_seq, 0, self.self_id)

    def handle_rrep(self, rrep: Rrep, sender: NodeId, window_open: bool = False) -> list:
        """Install the candidate route if fresher, then forward or flush.

        Non-originators forward the reply one hop along the stored reverse
        route (dropping it if that route is gone). The originator flushes
        buffered data immediately unless a collection window is still open.
        """
        self._install(rrep.dest, sender, rrep.hop_count + 1, rrep.dest_seq,
                      rrep.generator)

        if rrep.origin == self.self_id:
            if not window_open and self.pending.get(rrep.dest) and \
                    self.has_valid_route(rrep.dest):
                return self.flush_pending(rrep.dest)
            return []

        back = self.routing_table.get(rrep.origin)
        if back is None or not back.valid:
            return []
        return [Unicast(back.next_hop,
                        dataclasses.replace(rrep, hop_count=rrep.hop_count + 1))]

    # -- data plane ---------------------------------------------------------

    def forward_data(self, pkt: DataPacket) -> list:
        """Route one data packet: unicast, buffer-and-discover, or drop."""
        entry = self.routing_table.get(pkt.dest)
        if entry is not None and entry.valid:
            return [Unicast(entry.next_hop, pkt)]
        if pkt.origin != self.self_id:
            return [NoRoute(pkt)]
        queue = self.pending.setdefault(pkt.dest, deque())
        out = []
        if len(queue) >= MAX_BUFFERED_PER_DEST:
            out.append(BufferDrop(queue.popleft()))
        queue.append(pkt)
        out.append(NeedDiscovery(pkt.dest))
        return out

    def flush_pending(self, dest: NodeId) -> list:
        """Re-dispatch every packet buffered for dest through forward_data."""
        out = []
        queue = self.pending.pop(dest, None)
        while queue:
            out.extend(self.forward_data(queue.popleft()))
        return out

    def invalidate_routes_via(self, lost_neighbor: NodeId) -> int:
        """Invalidate every valid entry whose next hop was just lost; return count."""
        count = 0
        for entry in self.routing_table.values():
            if entry.valid and entry.next_hop == lost_neighbor:
                entry.valid = False
                count += 1
        if count:
            self.mutations += 1
        return count

    def purge_routes(self, banned) -> int:
        """Delete entries that point at, or were learned from, banned nodes.

        Deleting (rather than invalidating) forgets forged sequence numbers so
        honest replies can install again after an alarm.
        """
        doomed = [dest for dest, entry in self.routing_table.items()
                  if entry.next_hop in banned or entry.generator in banned]
        for dest in doomed:
            del self.routing_table[dest]
        if doomed:
            self.mutations += 1
        return len(doomed)
