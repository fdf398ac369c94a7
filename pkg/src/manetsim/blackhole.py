"""Black-hole behavior: forged instant replies, silent data absorption, vouching.

A black hole keeps honest mobility and radio behavior; only its routing
answers are malicious. It never consults a routing table, never rebroadcasts
a discovery, and never forwards data.
"""

from __future__ import annotations

from dataclasses import dataclass

from .messages import DataPacket, DriEntry, Frp, Frq, NodeId, Rrep, Rreq


@dataclass(frozen=True)
class BlackHoleConfig:
    members: frozenset[NodeId]
    seq_inflation: int = 100  # added to the requested dest seq in forged replies
    advertised_hop_count: int = 1
    respond_delay_seconds: float = 0.0
    cooperative: bool = False


class BlackHoleNode:
    """Malicious per-node state; one instance per configured member."""

    def __init__(self, self_id: NodeId, cfg: BlackHoleConfig, rng):
        self.self_id = self_id
        self.cfg = cfg
        self.rng = rng
        self.seen_rreqs: set[tuple[NodeId, int]] = set()
        self.absorbed = 0

    def handle_rreq(self, rreq: Rreq, honest_neighbors, honest_nodes) -> Rrep | None:
        """Forge an immediate reply claiming a fresh short route; never rebroadcast."""
        key = (rreq.origin, rreq.broadcast_id)
        if key in self.seen_rreqs:
            return None
        self.seen_rreqs.add(key)
        nhn = self._fabricate_hop(rreq.origin, honest_neighbors, honest_nodes)
        return Rrep(rreq.origin, rreq.dest,
                    rreq.dest_seq_known + self.cfg.seq_inflation,
                    self.cfg.advertised_hop_count, self.self_id,
                    nhn, DriEntry(True, True) if nhn is not None else None)

    def _fabricate_hop(self, exclude: NodeId, honest_neighbors, honest_nodes):
        # Cooperative members name their partner; a lone liar picks an honest
        # neighbor (never the node it is lying to), or any honest node at all.
        if self.cfg.cooperative and len(self.cfg.members) > 1:
            ring = sorted(self.cfg.members)
            return ring[(ring.index(self.self_id) + 1) % len(ring)]
        pool = [n for n in honest_neighbors if n != exclude]
        if not pool:
            pool = [n for n in honest_nodes if n != exclude and n != self.self_id]
        return self.rng.choice(pool) if pool else None

    def handle_data(self, pkt: DataPacket) -> None:
        """Absorb a transit packet: nothing is forwarded, ever."""
        self.absorbed += 1

    def handle_frq(self, frq: Frq, honest_neighbors, honest_nodes) -> Frp:
        """Vouch for a partner under cooperative mode, else answer truthfully.

        The real table stays empty (this node never forwards), so the truthful
        answer is always all-zero bits and no onward route.
        """
        if self.cfg.cooperative and frq.suspect in self.cfg.members:
            onward = self._fabricate_hop(frq.asker, honest_neighbors, honest_nodes)
            if onward is not None:
                return Frp(self.self_id, DriEntry(True, True),
                           onward, DriEntry(True, True))
            return Frp(self.self_id, DriEntry(True, True))
        return Frp(self.self_id, DriEntry(False, False))
