"""Acceptance checks, one test per criterion, each printing a PASS/FAIL line."""
import time

import numpy as np
import pytest

from qll import benchmarks
from qll.attacks import WRONG_KEYS, run_campaign
from qll.circuit import GateKind, circuits_equal, depth, gate_count
from qll.core import Key, encrypt, gen_key, unlock
from qll.errors import QasmError
from qll.metrics import CountsDistribution as D, accuracy, dfc, hvd, tvd
from qll.qasm import parse_qasm, serialize_qasm
from qll.sim import prepare_basis_input, sample_counts, unitaries_equal_up_to_phase, unitary_of

NAMES = benchmarks.names()


def random_locks(name, count, seed, max_bits=12):
    """``count`` random keys (one-bits never exceeding the gate count) with their locks."""
    c = benchmarks.load(name)
    m = gate_count(c)
    rng = np.random.default_rng([seed, NAMES.index(name)])
    out = []
    while len(out) < count:
        key = gen_key(int(rng.integers(1, max_bits + 1)), rng)
        if key.n1 > m:
            continue
        locked, _ = encrypt(c, key, seed=rng)
        out.append((key, locked))
    return c, out


@pytest.fixture(scope="module")
def campaigns():
    return {
        name: run_campaign(benchmarks.load(name), benchmarks.info(name).test_input, name=name)
        for name in NAMES
    }


def test_c1_round_trip(verdict):
    with verdict("1 round trip: 8 benchmarks x 100 keys, simplify(decrypt(encrypt)) == original, < 30 s"):
        assert len(NAMES) >= 8
        start = time.perf_counter()
        failures = 0
        for name in NAMES:
            c, locks = random_locks(name, 100, seed=1)
            failures += sum(not circuits_equal(unlock(locked, key), c) for key, locked in locks)
        elapsed = time.perf_counter() - start
        print(f"  failures={failures} elapsed={elapsed:.2f}s")
        assert failures == 0
        assert elapsed < 30


def test_c2_unitary(verdict):
    with verdict("2 unitary: round-tripped unitaries equal originals up to phase (<= 8 qubits)"):
        checked = 0
        for name in NAMES:
            if benchmarks.info(name).qubits > 8:
                continue
            c, locks = random_locks(name, 5, seed=2)
            u = unitary_of(c.unitary_part())
            for key, locked in locks:
                restored = unlock(locked, key)
                assert unitaries_equal_up_to_phase(unitary_of(restored.unitary_part()), u, tol=1e-9)
                checked += 1
        print(f"  checked={checked}")
        assert checked > 0


def test_c3_worked_example(verdict):
    with verdict("3 worked example: key 100101 over gates 1,2,4; guess 110001 unlocks to a different circuit"):
        original, locked, record = benchmarks.five_gate_lock()
        roles = [s.role for s in record.slots]
        assert [j for j, r in enumerate(roles) if r == "real"] == [0, 3, 5]
        assert [j for j, r in enumerate(roles) if r == "dummy"] == [1, 2, 4]
        assert circuits_equal(unlock(locked, record.key), original)
        guessed = unlock(locked, Key.from_string("110001"))
        assert not circuits_equal(guessed, original)


def test_c4_zero_overhead(verdict):
    with verdict("4 zero overhead: unlocked gate count and depth equal the original on every benchmark"):
        for name in NAMES:
            c, locks = random_locks(name, 20, seed=4)
            for key, locked in locks:
                restored = unlock(locked, key)
                assert gate_count(restored) == gate_count(c), name
                assert depth(restored) == depth(c), name


def test_c5_xgate_corruption(campaigns, verdict):
    with verdict(f"5 xgate corruption: max TVD >= 0.9 and mean TVD >= 0.5 over {WRONG_KEYS} wrong keys"):
        for name, camp in campaigns.items():
            s = camp.summary()
            print(f"  {name}: mean={s['xgate_mean_tvd']:.3f} max={s['xgate_max_tvd']:.3f}")
            assert s["xgate_max_tvd"] >= 0.9, name
            assert s["xgate_mean_tvd"] >= 0.5, name
            if len(benchmarks.info(name).output_qubits) == 1:
                assert s["xgate_max_tvd"] == 1.0, name
            for ev in camp.locks:
                assert len(ev.xgate) == WRONG_KEYS


def _single_slot_lock(name):
    """Key "1" over a seeded choice among gates that change the test-vector output."""
    c = benchmarks.load(name)
    value = benchmarks.info(name).test_input
    body = [g for g in c.gates if g.kind is not GateKind.MEASURE]
    full = sample_counts(prepare_basis_input(c, value), 1, seed=0).argmax()
    for i in np.random.default_rng(NAMES.index(name)).permutation(len(body)):
        skipped = c.with_gates(body[:i] + body[i + 1:] + list(c.measurements()))
        other = sample_counts(prepare_basis_input(skipped, value), 1, seed=0).argmax()
        if other != full:
            locked, _ = encrypt(c, Key((1,)), seed=0, real_gates=[int(i)])
            return c, locked, value, full, other
    raise AssertionError(f"no gate of {name} changes its test output")


def test_c6_hgate_neutrality(campaigns, verdict):
    with verdict("6 hgate neutrality: bits behind a masked slot read 1 in [0.45, 0.55]; mean TVD(H) < mean TVD(X)"):
        for name in NAMES:
            c, locked, value, fired, skipped = _single_slot_lock(name)
            prepared = prepare_basis_input(locked, value, qubits=range(c.num_qubits))
            counts = sample_counts(prepared, 1000, seed=NAMES.index(name))
            width = counts.width
            for j in range(width):
                a, b = fired[width - 1 - j], skipped[width - 1 - j]
                if a != b:
                    freq = counts.bit_counts(j)[1] / counts.shots
                    print(f"  {name} bit {j}: {freq:.3f}")
                    assert 0.45 <= freq <= 0.55, (name, j, freq)
        for name, camp in campaigns.items():
            s = camp.summary()
            print(f"  {name}: hgate={s['hgate_mean_tvd']:.3f} xgate={s['xgate_mean_tvd']:.3f}")
            assert s["hgate_mean_tvd"] < s["xgate_mean_tvd"], name


def test_c7_dfc(campaigns, verdict):
    with verdict("7 dfc: 1.0 on originals, < 0 whenever a wrong key moves the argmax, min <= -0.9"):
        for name, camp in campaigns.items():
            s = camp.summary()
            assert s["dfc_original"] == 1.0, name
            for ev in camp.locks:
                for r in ev.xgate:
                    moved = r.accuracy < 0.5
                    if moved:
                        assert r.dfc < 0, name
            print(f"  {name}: min dfc={s['xgate_min_dfc']:.3f}")
            assert s["xgate_min_dfc"] <= -0.9, name


def test_c8_key_sweep(verdict):
    with verdict("8 key sweep: true key byte_rate >= 0.95 and above all others; wrong bit_rates in [0.35, 0.65]; < 10 s"):
        from qll.attacks import key_sweep

        start = time.perf_counter()
        _, locked, record = benchmarks.alu_sweep_lock()
        results = key_sweep(locked, record.key, input_qubits=benchmarks.fixture("alu1")["input_qubits"])
        elapsed = time.perf_counter() - start
        assert len(results) == 8
        true = next(r for r in results if r.key == record.key)
        for r in results:
            print(f"  {r.key}: byte={r.byte_rate:.3f} bit={r.bit_rate:.3f}")
        assert true.byte_rate >= 0.95
        for r in results:
            if r.key != record.key:
                assert r.byte_rate < true.byte_rate
                assert 0.35 <= r.bit_rate <= 0.65
        print(f"  elapsed={elapsed:.2f}s")
        assert elapsed < 10


def test_c9_metric_identities(verdict):
    with verdict("9 metric identities hold exactly"):
        p = D({"00": 600, "01": 250, "11": 150})
        assert tvd(p, p) == 0
        assert hvd(p, p) == 0
        assert tvd(D({"0": 1000}), D({"1": 1000})) == 1
        one, other = D({"0": 321, "1": 679}), D({"0": 900, "1": 100})
        assert hvd(one, other) == tvd(one, other)
        assert hvd(D({"00": 1000}), D({"11": 1000})) == 2
        assert dfc(D({"0": 1000}), "0") == 1
        assert dfc(D({"1": 1000}), "0") == -1
        assert dfc(D({"0": 500, "1": 500}), "0") == 0
        assert accuracy(D({"0": 985, "1": 15}), "0") == 0.985


def test_c10_parser_robustness(verdict):
    with verdict("10 parser: corpus round trip is identity; 10^5 random-byte inputs give only diagnostics"):
        for name in NAMES + ["five_gate", "alu1"]:
            c = parse_qasm(benchmarks.source(name))
            assert circuits_equal(parse_qasm(serialize_qasm(c)), c)
        rng = np.random.default_rng(10)
        sources = [benchmarks.source(n).encode() for n in NAMES]
        accepted = rejected = 0
        for i in range(100_000):
            if i % 2:
                data = rng.bytes(int(rng.integers(0, 96)))
            else:
                buf = bytearray(sources[i // 2 % len(sources)])
                for _ in range(int(rng.integers(1, 4))):
                    p = int(rng.integers(0, len(buf)))
                    op = int(rng.integers(0, 3))
                    if op == 0:
                        buf[p] = int(rng.integers(0, 256))
                    elif op == 1:
                        del buf[p]
                    else:
                        buf.insert(p, int(rng.integers(0, 256)))
                data = bytes(buf)
            try:
                parse_qasm(data)
                accepted += 1
            except QasmError as exc:
                assert exc.diagnostic.line >= 1
                rejected += 1
        print(f"  accepted={accepted} rejected={rejected}")
        assert accepted + rejected == 100_000
