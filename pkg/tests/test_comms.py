import numpy as np
import pytest

from uavsearch import comms
from uavsearch import mapping as mp
from uavsearch.errors import PackageDecodeError


def _fill(store, slot, times, rng=None, x0=100.0):
    for k, t in enumerate(times):
        store.record(slot, x0 + 4.0 * k, 50.0, 0.0, float(t))


def _random_store(rng, n_uavs, history, n_targets):
    s = comms.ShareStore(n_uavs=n_uavs, history=history, n_targets=n_targets)
    for slot in range(n_uavs):
        n = int(rng.integers(0, history + 1))
        t0 = int(rng.integers(0, 50))
        for k in range(n):
            s.record(
                slot,
                float(np.float32(rng.random() * 1600)),
                float(np.float32(rng.random() * 800)),
                float(np.float32(rng.random() * 360 - 180)),
                float(t0 + k),
            )
    for d in range(n_targets):
        if rng.random() < 0.4:
            s.set_target(d, float(np.float32(rng.random() * 1600)),
                         float(np.float32(rng.random() * 800)), float(rng.integers(0, 500)))
    return s


def _stores_equal(a, b):
    return (
        np.array_equal(a.state, b.state)
        and np.array_equal(a.counts, b.counts)
        and np.array_equal(a.targets, b.targets)
    )


def test_payload_size_example():
    assert comms.payload_size(5, 100, 10) == 8120
    store = comms.ShareStore(n_uavs=5, history=100, n_targets=10)
    buf = comms.encode_store(store, sender=1)
    assert len(buf) - comms.HEADER_BYTES == 8120


def test_round_trip_identity():
    rng = np.random.default_rng(0)
    store = _random_store(rng, 5, 100, 10)
    pkg = comms.decode_package(comms.encode_store(store, sender=3))
    assert pkg.sender == 3
    assert np.array_equal(pkg.state, store.state)
    assert np.array_equal(pkg.targets, store.targets)


def test_round_trip_fuzz():
    rng = np.random.default_rng(1)
    for _ in range(300):
        n_uavs = int(rng.integers(1, 7))
        history = int(rng.integers(1, 30))
        n_targets = int(rng.integers(0, 12))
        store = _random_store(rng, n_uavs, history, n_targets)
        pkg = comms.decode_package(comms.encode_store(store, sender=n_uavs))
        assert np.array_equal(pkg.state, store.state)
        assert np.array_equal(pkg.targets, store.targets)


def test_decode_rejects_garbage():
    with pytest.raises(PackageDecodeError):
        comms.decode_package(b"short")
    store = comms.ShareStore(n_uavs=2, history=5, n_targets=1)
    buf = bytearray(comms.encode_store(store, sender=1))
    with pytest.raises(PackageDecodeError):
        comms.decode_package(bytes(buf[:-4]))  # truncated
    buf[0] ^= 0xFF
    with pytest.raises(PackageDecodeError):
        comms.decode_package(bytes(buf))  # bad magic


def test_empty_store_has_fixed_size_sentinel_payload():
    store = comms.ShareStore(n_uavs=3, history=10, n_targets=4)
    buf = comms.encode_store(store, sender=1)
    assert len(buf) == comms.HEADER_BYTES + comms.payload_size(3, 10, 4)
    pkg = comms.decode_package(buf)
    assert np.all(pkg.state[:, :, 3] == -1.0)
    assert np.all(pkg.targets[:, 2] == -1.0)


def test_ring_buffer_evicts_oldest():
    store = comms.ShareStore(n_uavs=1, history=3, n_targets=0)
    _fill(store, 0, [1, 2, 3, 4])
    recs = store.records(0)
    assert list(recs[:, 3]) == [2.0, 3.0, 4.0]
    assert store.latest_t(0) == 4.0


def test_merge_replaces_only_newer_slots():
    a = comms.ShareStore(n_uavs=3, history=10, n_targets=2)
    b = comms.ShareStore(n_uavs=3, history=10, n_targets=2)
    _fill(a, 0, range(5))          # a knows uav 0 through t=4
    _fill(b, 0, range(8))          # b knows uav 0 through t=7 (newer)
    _fill(a, 1, range(10, 14))     # a knows uav 1 through t=13
    _fill(b, 1, range(10, 12))     # b is stale for uav 1
    pkg = comms.decode_package(comms.encode_store(b, sender=2))
    replay = comms.merge(a, pkg)
    assert a.latest_t(0) == 7.0        # replaced wholesale
    assert a.latest_t(1) == 13.0       # kept
    slots = [slot for slot, _ in replay]
    assert slots == [0, 1]  # both slots have never been replayed locally


def test_merge_is_idempotent():
    rng = np.random.default_rng(5)
    a = _random_store(rng, 4, 12, 3)
    b = _random_store(rng, 4, 12, 3)
    pkg = comms.decode_package(comms.encode_store(b, sender=1))
    comms.merge(a, pkg)
    snap_state = a.state.copy()
    snap_targets = a.targets.copy()
    replay2 = comms.merge(a, pkg)
    assert np.array_equal(a.state, snap_state)
    assert np.array_equal(a.targets, snap_targets)
    assert replay2 == []


def test_merge_fuzz_idempotence_and_disjoint_commutativity():
    rng = np.random.default_rng(6)
    for _ in range(200):
        n_uavs = int(rng.integers(2, 6))
        h = int(rng.integers(2, 10))
        nt = int(rng.integers(0, 4))
        base = _random_store(rng, n_uavs, h, nt)

        # two incoming packages that are newer on disjoint slot sets
        left = _random_store(rng, n_uavs, h, nt)
        right = _random_store(rng, n_uavs, h, nt)
        half = n_uavs // 2
        for slot in range(n_uavs):
            if slot < half:
                right.state[slot] = base.state[slot]
                right.counts[slot] = base.counts[slot]
            else:
                left.state[slot] = base.state[slot]
                left.counts[slot] = base.counts[slot]
        pl = comms.decode_package(comms.encode_store(left, sender=1))
        pr = comms.decode_package(comms.encode_store(right, sender=2))

        s1 = comms.ShareStore(n_uavs=n_uavs, history=h, n_targets=nt)
        s2 = comms.ShareStore(n_uavs=n_uavs, history=h, n_targets=nt)
        for (s, first, second) in ((s1, pl, pr), (s2, pr, pl)):
            s.state[:] = base.state
            s.counts[:] = base.counts
            s.targets[:] = base.targets
            comms.merge(s, first)
            comms.merge(s, second)
        assert _stores_equal(s1, s2)

        # idempotence on top
        snap = s1.state.copy()
        comms.merge(s1, pl)
        assert np.array_equal(s1.state, snap)


def test_merge_timestamps_never_regress():
    rng = np.random.default_rng(7)
    store = _random_store(rng, 4, 8, 2)
    before = [store.latest_t(s) for s in range(4)]
    for _ in range(20):
        pkg = comms.decode_package(comms.encode_store(_random_store(rng, 4, 8, 2), sender=1))
        comms.merge(store, pkg)
        after = [store.latest_t(s) for s in range(4)]
        assert all(b >= a for a, b in zip(before, after))
        before = after


def test_target_slots_merge_by_timestamp():
    a = comms.ShareStore(n_uavs=2, history=4, n_targets=2)
    b = comms.ShareStore(n_uavs=2, history=4, n_targets=2)
    a.set_target(0, 10.0, 20.0, 5.0)
    b.set_target(0, 11.0, 21.0, 9.0)   # newer
    b.set_target(1, 30.0, 40.0, 2.0)
    comms.merge(a, comms.decode_package(comms.encode_store(b, sender=1)))
    assert a.targets[0, 2] == 9.0
    assert a.targets[1, 2] == 2.0
    # stale incoming does not regress
    comms.merge(a, comms.decode_package(comms.encode_store(comms.ShareStore(2, 4, 2), sender=1)))
    assert a.targets[0, 2] == 9.0


def test_replay_reproduces_remote_coverage_bitwise():
    """Two-vehicle conformance: B replays A's recorded flight and must end
    with A's uncertainty layer bit-for-bit (probability to 1e-12)."""
    spec = mp.GridSpec(4.0, 120, 80)
    cache = mp.FootprintCache(mp.FovGeometry(40.0, 40.0), spec.r)
    priors = [((202.0, 202.0), 0.3, 50.0), ((350.0, 150.0), 0.3, 50.0)]
    map_a = mp.init_probability(spec, priors, owner=1)
    map_b = mp.init_probability(spec, priors, owner=2)
    store_a = comms.ShareStore(n_uavs=2, history=50, n_targets=0)
    store_b = comms.ShareStore(n_uavs=2, history=50, n_targets=0)

    rng = np.random.default_rng(3)
    pose = mp.world_to_grid(150.0, 150.0, spec)
    from uavsearch.geometry import GridPose, step

    cur = GridPose(pose[0], pose[1], 0.0)
    p_false = 1e-12  # keep the flight free of false alarms
    for t in range(1, 21):
        cur = step(cur, int(rng.integers(-1, 2)), 2)
        x, y = mp.grid_to_world(cur.x_g, cur.y_g, spec)
        qx, qy, qh = float(np.float32(x)), float(np.float32(y)), float(np.float32(cur.heading))
        store_a.record(0, qx, qy, qh, float(t))
        comms.mark_replayed(store_a, 0, float(t))
        cells = mp.rasterize_fov(qx, qy, qh, spec, cache)
        mp.apply_detection_footprint(map_a, cells, {}, 0.8, p_false, 0.95, rng, float(t))

    pkg = comms.decode_package(comms.encode_store(store_a, sender=1))
    replay = comms.merge(store_b, pkg)
    drop, n = comms.replay_detections(map_b, replay, {0: cache}, store_b.targets, 0.8, p_false, 0.95)
    assert n == 20
    assert drop > 0
    assert np.array_equal(map_a.uncertainty, map_b.uncertainty)
    changed = map_b.uncertainty != 1.0
    assert np.max(np.abs(map_a.probability - map_b.probability)[changed]) <= 1e-12


def test_replay_applies_detection_branch_at_target_timestamps():
    spec = mp.GridSpec(4.0, 60, 60)
    cache = mp.FootprintCache(mp.FovGeometry(40.0, 40.0), spec.r)
    smap = mp.init_probability(spec, [((102.0, 102.0), 0.3, 50.0)], owner=2)
    store = comms.ShareStore(n_uavs=2, history=10, n_targets=1)
    # remote vehicle sat over the target at t=4 and reported it discovered
    state = store.state.copy()
    state[0, 0] = (102.0, 102.0, 0.0, 4.0)
    pkg = comms.MessagePackage(sender=1, history=10, n_uavs=2, n_targets=1,
                               state=state, targets=np.array([[102.0, 102.0, 4.0]], dtype=np.float32))
    replay = comms.merge(store, pkg)
    comms.replay_detections(smap, replay, {0: cache}, store.targets, 0.8, 1e-4, 0.95)
    cell = mp.world_to_grid(102.0, 102.0, spec)
    assert smap.probability[cell[0] - 1, cell[1] - 1] > 0.95
    assert smap.found[cell[0] - 1, cell[1] - 1]
    # neighbors got the no-detection branch instead
    assert smap.probability[cell[0] + 1, cell[1] - 1] < 0.3


def test_links_use_the_longer_range_of_a_pair():
    # two rotors 200 m apart cannot link directly, but a relay overhead with
    # a 300 m radio bridges both despite its 160 m altitude offset
    positions = np.array(
        [[0.0, 0.0, 40.0], [200.0, 0.0, 40.0], [100.0, 0.0, 200.0]]
    )
    ranges = np.array([160.0, 160.0, 300.0])
    pairs = comms.link_pairs(positions, ranges)
    assert (0, 1) not in pairs
    assert (0, 2) in pairs and (1, 2) in pairs


def test_two_rotors_within_range_link():
    positions = np.array([[0.0, 0.0, 40.0], [150.0, 0.0, 40.0]])
    pairs = comms.link_pairs(positions, np.array([160.0, 160.0]))
    assert pairs == [(0, 1)]


def test_two_hop_store_and_forward_through_relay():
    """After two exchange epochs via the relay, the far rotors hold each
    other's histories even though they never linked directly."""
    n = 3
    stores = [comms.ShareStore(n_uavs=n, history=10, n_targets=0) for _ in range(n)]
    positions = np.array([[0.0, 0.0, 40.0], [400.0, 0.0, 40.0], [200.0, 0.0, 200.0]])
    ranges = np.array([160.0, 160.0, 300.0])
    for t in (1.0, 2.0):
        for slot in range(n):
            stores[slot].record(slot, positions[slot, 0], positions[slot, 1], 0.0, t)
            comms.mark_replayed(stores[slot], slot, t)
        pairs = comms.link_pairs(positions, ranges)
        assert set(pairs) == {(0, 2), (1, 2)}
        packages = {s: comms.encode_store(stores[s], sender=s) for s in range(n)}
        for a, b in pairs:
            comms.merge(stores[b], comms.decode_package(packages[a]))
            comms.merge(stores[a], comms.decode_package(packages[b]))
    assert stores[0].latest_t(1) >= 1.0
    assert stores[1].latest_t(0) >= 1.0


def test_connected_topology_converges_within_fleet_size_epochs():
    """In a static chain a-b-c-d, every store holds everyone's newest record
    after at most fleet-size epochs."""
    n = 4
    stores = [comms.ShareStore(n_uavs=n, history=8, n_targets=0) for _ in range(n)]
    positions = np.array([[k * 150.0, 0.0, 40.0] for k in range(n)])
    ranges = np.full(n, 160.0)
    for slot in range(n):
        stores[slot].record(slot, positions[slot, 0], 0.0, 0.0, 1.0)
        comms.mark_replayed(stores[slot], slot, 1.0)
    for _ in range(n):
        pairs = comms.link_pairs(positions, ranges)
        packages = {s: comms.encode_store(stores[s], sender=s) for s in range(n)}
        for a, b in pairs:
            comms.merge(stores[b], comms.decode_package(packages[a]))
            comms.merge(stores[a], comms.decode_package(packages[b]))
    for s in range(n):
        assert all(stores[s].latest_t(o) == 1.0 for o in range(n))


def test_dropped_records_counter():
    a = comms.ShareStore(n_uavs=1, history=4, n_targets=0)
    b = comms.ShareStore(n_uavs=1, history=4, n_targets=0)
    _fill(a, 0, [1, 2, 3, 4])
    _fill(b, 0, [7, 8, 9, 10])  # b's window no longer contains 1..4
    comms.merge(a, comms.decode_package(comms.encode_store(b, sender=1)))
    assert a.dropped_records == 4
