"""Range-limited exchange of search history between vehicles.

Each vehicle keeps a :class:`ShareStore`: one fixed-capacity state-history
matrix per fleet member (position, heading, timestamp rows) plus one
target matrix (position and discovery timestamp per target slot).  Stores
are broadcast as bit-exact little-endian packages to every peer in radio
range each epoch; receivers keep whichever slot copy carries the newest
timestamp, wholesale.  Newly acquired records are then replayed onto the
receiver's own map (see ``replay_detections``), reproducing the sender's
sensor coverage locally.  A long-range vehicle relays automatically: it
merges rotor histories on contact and re-broadcasts them, no special
casing required.

Wire format (documented in docs/wire_format.md): a 24-byte header of six
little-endian uint32 fields (magic, version, sender id, history length H,
fleet size N_U, target count N_T) followed by N_U state matrices of 4*H
float32 values (x, y, heading, t per record, oldest first, absent records
padded with timestamp -1) and one target matrix of 3*N_T float32 values.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import PackageDecodeError

__all__ = [
    "ShareStore",
    "MessagePackage",
    "payload_size",
    "encode_store",
    "decode_package",
    "merge",
    "mark_replayed",
    "replay_detections",
    "link_pairs",
    "HEADER_BYTES",
]

MAGIC = 0x53565541  # "AUVS" little-endian on the wire
VERSION = 1
HEADER_FIELDS = 6
HEADER_BYTES = HEADER_FIELDS * 4
_HEADER = struct.Struct("<6I")

EMPTY_T = -1.0  # wire sentinel for an absent record


def payload_size(n_uavs: int, history: int, n_targets: int) -> int:
    """Payload bytes of one package (header excluded)."""
    return (4 * history * n_uavs + 3 * n_targets) * 4


@dataclass
class ShareStore:
    """One vehicle's locally stored search information.

    ``state[slot]`` is an (H, 4) float32 matrix of (x, y, heading, t)
    records for fleet member ``slot`` (0-based), oldest first, left
    justified; unused rows carry timestamp -1.  ``targets`` is (N_T, 3)
    float32 of (x, y, t) with t = -1 until the slot's target is known
    discovered.  ``replayed_t`` tracks, per slot, the newest record already
    folded into this vehicle's map; it is local bookkeeping and never
    transmitted.
    """

    n_uavs: int
    history: int
    n_targets: int
    state: np.ndarray = field(init=False)
    counts: np.ndarray = field(init=False)
    targets: np.ndarray = field(init=False)
    replayed_t: np.ndarray = field(init=False)
    dropped_records: int = 0

    def __post_init__(self):
        self.state = np.zeros((self.n_uavs, self.history, 4), dtype=np.float32)
        self.state[:, :, 3] = EMPTY_T
        self.counts = np.zeros(self.n_uavs, dtype=np.int64)
        self.targets = np.zeros((self.n_targets, 3), dtype=np.float32)
        self.targets[:, 2] = EMPTY_T
        self.replayed_t = np.full(self.n_uavs, EMPTY_T, dtype=np.float64)

    def record(self, slot: int, x: float, y: float, heading: float, t: float) -> None:
        """Append one record to a slot's history, evicting the oldest when full."""
        c = int(self.counts[slot])
        if c == self.history:
            self.state[slot, :-1] = self.state[slot, 1:]
            c -= 1
        self.state[slot, c] = (np.float32(x), np.float32(y), np.float32(heading), np.float32(t))
        self.counts[slot] = c + 1

    def set_target(self, slot: int, x: float, y: float, t: float) -> None:
        self.targets[slot] = (np.float32(x), np.float32(y), np.float32(t))

    def latest_t(self, slot: int) -> float:
        c = int(self.counts[slot])
        return float(self.state[slot, c - 1, 3]) if c else EMPTY_T

    def records(self, slot: int) -> np.ndarray:
        return self.state[slot, : int(self.counts[slot])]


@dataclass(frozen=True)
class MessagePackage:
    """Decoded package: a snapshot of the sender's store."""

    sender: int
    history: int
    n_uavs: int
    n_targets: int
    state: np.ndarray  # (N_U, H, 4) float32
    targets: np.ndarray  # (N_T, 3) float32


def encode_store(store: ShareStore, sender: int) -> bytes:
    """Serialize a store snapshot; decode(encode(s)) reproduces it exactly."""
    header = _HEADER.pack(MAGIC, VERSION, sender, store.history, store.n_uavs, store.n_targets)
    body = store.state.astype("<f4", copy=False).tobytes() + store.targets.astype(
        "<f4", copy=False
    ).tobytes()
    return header + body


def decode_package(buf: bytes) -> MessagePackage:
    """Parse a package, rejecting malformed magic, version, or length."""
    if len(buf) < HEADER_BYTES:
        raise PackageDecodeError(f"package truncated at {len(buf)} bytes")
    magic, version, sender, history, n_uavs, n_targets = _HEADER.unpack_from(buf)
    if magic != MAGIC:
        raise PackageDecodeError(f"bad magic 0x{magic:08x}")
    if version != VERSION:
        raise PackageDecodeError(f"unsupported version {version}")
    expected = HEADER_BYTES + payload_size(n_uavs, history, n_targets)
    if len(buf) != expected:
        raise PackageDecodeError(f"length {len(buf)} != expected {expected}")
    state_count = n_uavs * history * 4
    flat = np.frombuffer(buf, dtype="<f4", count=state_count, offset=HEADER_BYTES)
    state = flat.reshape(n_uavs, history, 4).copy()
    targets = (
        np.frombuffer(buf, dtype="<f4", count=3 * n_targets, offset=HEADER_BYTES + state_count * 4)
        .reshape(n_targets, 3)
        .copy()
    )
    return MessagePackage(
        sender=sender, history=history, n_uavs=n_uavs, n_targets=n_targets, state=state, targets=targets
    )


def merge(store: ShareStore, pkg: MessagePackage) -> list[tuple[int, np.ndarray]]:
    """Fold a package into a local store; newest timestamp wins per slot.

    For every fleet slot whose incoming latest timestamp beats the local
    one, the local history matrix is replaced wholesale (older local
    records the package no longer carries are counted in
    ``dropped_records``).  Target slots follow the same per-slot rule.
    Returns the replay set: per slot, the records newer than anything this
    store has already folded into its map, with the replay watermark
    advanced (so re-merging the same package is a no-op).
    """
    if (pkg.n_uavs, pkg.history, pkg.n_targets) != (store.n_uavs, store.history, store.n_targets):
        raise PackageDecodeError("package dimensions do not match the local store")
    replay: list[tuple[int, np.ndarray]] = []
    for slot in range(store.n_uavs):
        in_t = pkg.state[slot, :, 3]
        in_count = int(np.count_nonzero(in_t > EMPTY_T))
        if in_count == 0:
            continue
        incoming_latest = float(in_t[in_count - 1])
        if incoming_latest > store.latest_t(slot):
            local = store.records(slot)
            if len(local):
                store.dropped_records += int(np.count_nonzero(local[:, 3] < pkg.state[slot, 0, 3]))
            store.state[slot] = pkg.state[slot]
            store.counts[slot] = in_count
        fresh = store.records(slot)
        new = fresh[fresh[:, 3] > store.replayed_t[slot]]
        if len(new):
            replay.append((slot, new.copy()))
            store.replayed_t[slot] = float(new[-1, 3])
    newer_target = pkg.targets[:, 2] > store.targets[:, 2]
    store.targets[newer_target] = pkg.targets[newer_target]
    return replay


def mark_replayed(store: ShareStore, slot: int, t: float) -> None:
    """Advance the replay watermark for records already on the local map
    (used for a vehicle's own sensing, which is never replayed)."""
    if t > store.replayed_t[slot]:
        store.replayed_t[slot] = t


def replay_detections(
    smap,
    replay_records: list[tuple[int, np.ndarray]],
    fov_caches: dict[int, object],
    target_entries: np.ndarray,
    p_detect: float,
    p_false: float,
    found_threshold: float,
) -> tuple[float, int]:
    """Reproduce remote sensor passes on a local map.

    Records are applied in (timestamp, slot) order.  Each record whose slot
    has a known footprint geometry rasterizes that footprint at the
    recorded pose and applies the no-detection update (uncertainty halves,
    probability takes the negative Bayesian branch), except that a cell
    holding a target entry whose discovery timestamp equals the record's
    timestamp gets the positive branch.  Returns (total uncertainty mass
    removed, number of sensing records replayed).
    """
    from .mapping import _bayes_update_cells, rasterize_fov, world_to_grid

    items = []
    for slot, recs in replay_records:
        cache = fov_caches.get(slot)
        if cache is None:
            continue  # non-sensing vehicle: nothing to reproduce
        for rec in recs:
            items.append((float(rec[3]), slot, rec))
    items.sort(key=lambda it: (it[0], it[1]))

    spec = smap.spec
    chi_drop = 0.0
    for t, slot, rec in items:
        x, y, heading = float(rec[0]), float(rec[1]), float(rec[2])
        cells = rasterize_fov(x, y, heading, spec, fov_caches[slot])
        if len(cells) == 0:
            continue
        ix = cells[:, 0] - 1
        iy = cells[:, 1] - 1
        detections = np.zeros(len(cells), dtype=bool)
        for tx, ty, tt in target_entries:
            if float(tt) == t:
                cx, cy = world_to_grid(float(tx), float(ty), spec)
                detections |= (cells[:, 0] == cx) & (cells[:, 1] == cy)
        p_after = _bayes_update_cells(smap.probability[ix, iy], detections, p_detect, p_false)
        smap.probability[ix, iy] = p_after
        chi_before = smap.uncertainty[ix, iy]
        smap.uncertainty[ix, iy] = 0.5 * chi_before
        chi_drop += float(np.sum(chi_before * 0.5))
        smap.found[ix, iy] |= p_after >= found_threshold
    return chi_drop, len(items)


def link_pairs(positions: np.ndarray, ranges: np.ndarray) -> list[tuple[int, int]]:
    """Symmetric radio links between vehicles.

    positions is (N, 3) including altitude; two vehicles link when their
    3-D separation is within the longer of their two radio ranges (the
    long-range relay's links to short-range vehicles use the relay's
    range, which is what makes it a relay).
    """
    n = len(positions)
    out = []
    for a in range(n):
        for b in range(a + 1, n):
            d = float(np.linalg.norm(positions[a] - positions[b]))
            if d <= max(ranges[a], ranges[b]):
                out.append((a, b))
    return out
