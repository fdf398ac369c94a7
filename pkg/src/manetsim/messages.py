"""Identity, geometry, and control/data message types shared by every layer."""

from __future__ import annotations

from dataclasses import dataclass

NodeId = int  # index into the scenario's node list


@dataclass(frozen=True)
class Position:
    x: float
    y: float


@dataclass(frozen=True)
class DriEntry:
    """Two bits of per-peer history: data routed from / routed through that peer."""

    from_bit: bool = False
    through_bit: bool = False

    def union(self, other: "DriEntry") -> "DriEntry":
        return DriEntry(self.from_bit or other.from_bit,
                        self.through_bit or other.through_bit)


@dataclass(frozen=True)
class Rreq:
    origin: NodeId
    origin_seq: int
    broadcast_id: int  # unique per (origin, discovery)
    dest: NodeId
    dest_seq_known: int  # last destination sequence number known at the origin, 0 if none
    hop_count: int


@dataclass(frozen=True)
class Rrep:
    origin: NodeId  # originator of the discovery this reply answers
    dest: NodeId
    dest_seq: int
    hop_count: int
    generator: NodeId  # node that created the reply
    responder_next_hop: NodeId | None = None
    responder_dri_for_nhn: DriEntry | None = None


@dataclass(frozen=True)
class Frq:
    asker: NodeId
    suspect: NodeId  # the reply generator under test
    target: NodeId   # the next-hop node being queried
    dest: NodeId     # original data destination


@dataclass(frozen=True)
class Frp:
    responder: NodeId
    dri_for_suspect: DriEntry
    responder_next_hop: NodeId | None = None
    dri_for_responder_next_hop: DriEntry | None = None


@dataclass(frozen=True)
class Alarm:
    reporter: NodeId
    black_holes: frozenset[NodeId]
    alarm_id: int


@dataclass(frozen=True)
class DataPacket:
    origin: NodeId
    dest: NodeId
    pkt_id: int
    payload_bytes: int = 512
    created_at: float = 0.0


def validate_message(msg, cfg) -> str | None:
    """Return the first violated invariant of msg against the scenario, or None.

    Construction is total; this is the separate validation pass. `cfg` only
    needs a `num_nodes` attribute.
    """
    n = cfg.num_nodes

    def oob(node_id) -> bool:
        return not (0 <= node_id < n)

    if isinstance(msg, Rreq):
        if oob(msg.origin):
            return "origin out of range"
        if oob(msg.dest):
            return "dest out of range"
        if msg.origin == msg.dest:
            return "origin equals dest"
        if msg.origin_seq < 0 or msg.dest_seq_known < 0:
            return "negative sequence number"
        if msg.broadcast_id < 0:
            return "negative broadcast id"
        if msg.hop_count < 0:
            return "negative hop count"
    elif isinstance(msg, Rrep):
        for label, node_id in (("origin", msg.origin), ("dest", msg.dest),
                               ("generator", msg.generator)):
            if oob(node_id):
                return f"{label} out of range"
        if msg.dest_seq < 0:
            return "negative sequence number"
        if msg.hop_count < 0:
            return "negative hop count"
        if msg.generator == msg.dest and msg.responder_next_hop is not None:
            return "destination reply discloses a next hop"
        if msg.responder_next_hop is not None and oob(msg.responder_next_hop):
            return "responder next hop out of range"
    elif isinstance(msg, Frq):
        for label, node_id in (("asker", msg.asker), ("suspect", msg.suspect),
                               ("target", msg.target), ("dest", msg.dest)):
            if oob(node_id):
                return f"{label} out of range"
        if msg.suspect == msg.target:
            return "suspect equals target"
        if msg.asker == msg.suspect:
            return "asker equals suspect"
    elif isinstance(msg, Frp):
        if oob(msg.responder):
            return "responder out of range"
        if (msg.responder_next_hop is None) != (msg.dri_for_responder_next_hop is None):
            return "onward hop and its entry must be disclosed together"
        if msg.responder_next_hop is not None and oob(msg.responder_next_hop):
            return "responder next hop out of range"
    elif isinstance(msg, Alarm):
        if not msg.black_holes:
            return "empty black hole set"
        if oob(msg.reporter):
            return "reporter out of range"
        if any(oob(b) for b in msg.black_holes):
            return "black hole id out of range"
        if msg.alarm_id < 0:
            return "negative alarm id"
    elif isinstance(msg, DataPacket):
        if oob(msg.origin):
            return "origin out of range"
        if oob(msg.dest):
            return "dest out of range"
        if msg.origin == msg.dest:
            return "origin equals dest"
        if msg.payload_bytes <= 0:
            return "non-positive payload"
    else:
        return "unknown message type"
    return None
