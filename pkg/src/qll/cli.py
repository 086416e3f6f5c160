"""Command-line front end: lock, unlock, simplify, simulate, evaluate, attack, report."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from pathlib import Path

from . import benchmarks
from .attacks import (
    CAMPAIGN_KEY_BITS,
    CAMPAIGN_LOCKS,
    DEFAULT_SHOTS,
    WRONG_KEYS,
    evaluate_lock,
    hgate_attack_eval,
    key_sweep,
    random_keys,
    reference_counts,
    run_campaign,
    score_guess,
)
from .circuit import GateKind, QuantumCircuit, circuits_equal, depth, gate_count
from .core import (
    Key,
    census,
    decrypt,
    find_slots,
    lock_random,
    simplify,
    unlock,
)
from .errors import (
    KeyLengthMismatch,
    KeyTooLong,
    MalformedLockedCircuit,
    QasmError,
    QLLError,
    SweepTooLarge,
)
from .metrics import accuracy
from .qasm import load_qasm, serialize_qasm
from .sim import NoiseSpec, prepare_basis_input, sample_counts

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARSE = 2
EXIT_KEY_TOO_LONG = 3
EXIT_IO = 4
EXIT_BAD_LOCK = 5
EXIT_SWEEP = 6

PALETTES = {"cx": (GateKind.CX,), "h": (GateKind.H,)}


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _stem(path: str) -> str:
    name = Path(path).name
    for suffix in (".qasm", ".locked", ".unlocked", ".simplified"):
        if name.endswith(suffix):
            name = name[: -len(suffix)]
    return name


def _load(path: str) -> QuantumCircuit:
    try:
        return load_qasm(path)
    except QasmError as exc:
        exc.filename = path
        raise


def _read_key(path: str) -> Key:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return Key.from_dict(data)
    except (json.JSONDecodeError, KeyError, TypeError, AttributeError) as exc:
        raise KeyLengthMismatch(f"{path}: key file is truncated or malformed ({exc})") from exc
    except ValueError as exc:
        raise KeyLengthMismatch(f"{path}: {exc}") from exc


def _noise(args) -> NoiseSpec | None:
    if not args.noise_1q and not args.noise_2q:
        return None
    return NoiseSpec(args.noise_1q, args.noise_2q)


def _input(text: str | None, circuit: QuantumCircuit):
    if text is None:
        return None
    if set(text) <= {"0", "1"} and len(text) == circuit.num_qubits:
        return text
    value = int(text, 0)
    if not 0 <= value < 2**circuit.num_qubits:
        raise ValueError(f"input {text} does not fit {circuit.num_qubits} qubits")
    return value


def cmd_lock(args) -> int:
    circuit = _load(args.input)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore" if args.quiet else "default")
        locked, record = lock_random(circuit, args.key_length, args.seed, PALETTES[args.palette])
    out = Path(args.out_dir)
    stem = _stem(args.input)
    _write(out / f"{stem}.locked.qasm", serialize_qasm(locked))
    _write(out / f"{stem}.key.json", _json(record.key.to_dict()))
    _write(out / f"{stem}.lock.json", _json(record.to_dict()))
    c = census(circuit, record.key, locked)
    print(
        f"{stem}: m={c['m']} n={c['n']} n1={c['n1']} n0={c['n0']} "
        f"locked_gates={c['locked_gate_count']}"
    )
    return EXIT_OK


def cmd_unlock(args) -> int:
    locked = _load(args.locked)
    key = _read_key(args.key)
    unlocked = decrypt(locked, key)
    simplified = simplify(unlocked)
    out = Path(args.out_dir)
    stem = _stem(args.locked)
    _write(out / f"{stem}.unlocked.qasm", serialize_qasm(unlocked))
    _write(out / f"{stem}.simplified.qasm", serialize_qasm(simplified))
    line = f"{stem}: gates={gate_count(simplified)} depth={depth(simplified)}"
    if args.original:
        same = circuits_equal(simplified, _load(args.original))
        line += f" matches_original={'yes' if same else 'no'}"
    print(line)
    return EXIT_OK


def cmd_simplify(args) -> int:
    unlocked = _load(args.unlocked)
    simplified = simplify(unlocked)
    stem = _stem(args.unlocked)
    _write(Path(args.out_dir) / f"{stem}.simplified.qasm", serialize_qasm(simplified))
    print(f"{stem}: gates={gate_count(simplified)} depth={depth(simplified)}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    circuit = _load(args.input)
    value = _input(args.input_state, circuit)
    if value is not None:
        circuit = prepare_basis_input(circuit, value)
    counts = sample_counts(circuit, args.shots, args.seed, _noise(args))
    text = _json(counts.to_dict())
    if args.out_dir:
        _write(Path(args.out_dir) / f"{_stem(args.input)}.counts.json", text)
    sys.stdout.write(text)
    return EXIT_OK


def _sweep_outputs(out: Path, stem: str, results) -> None:
    _write(out / f"{stem}.sweep.jsonl", "".join(r.to_json() + "\n" for r in results))
    rows = [[str(r.key), repr(r.byte_rate), repr(r.bit_rate), repr(r.count_divergence)] for r in results]
    _write(out / f"{stem}.sweep.csv", _csv(["key", "byte_rate", "bit_rate", "count_divergence"], rows))


def cmd_evaluate(args) -> int:
    original = _load(args.original)
    locked = _load(args.locked)
    key = _read_key(args.key)
    value = _input(args.input_state, original)
    ev = evaluate_lock(
        original, locked, key, args.shots, args.seed, args.wrong_keys,
        input_state=value, noise=_noise(args), name=_stem(args.original),
    )
    out = Path(args.out_dir)
    stem = _stem(args.locked)
    results = None
    if args.sweep:
        results = key_sweep(locked, key, shots=args.shots, seed=args.seed, noise=_noise(args))
    data = ev.to_dict()
    _write(out / f"{stem}.metrics.json", _json(data))
    rows = [
        [k, repr(r.tvd), repr(r.hvd), repr(r.dfc), repr(r.accuracy)]
        for k, r in zip(ev.wrong_keys, ev.xgate)
    ]
    _write(out / f"{stem}.xgate.csv", _csv(["key", "tvd", "hvd", "dfc", "accuracy"], rows))
    if results is not None:
        _sweep_outputs(out, stem, results)
    s = ev.summary()
    print(
        f"{stem}: dfc_original={s['dfc_original']:.3f} xgate_mean_tvd={s['xgate_mean_tvd']:.3f} "
        f"hgate_tvd={s['hgate_tvd']:.3f}"
    )
    return EXIT_OK


def cmd_attack(args) -> int:
    locked = _load(args.locked)
    original = _load(args.original)
    value = _input(args.input_state, original)
    noise = _noise(args)
    out = Path(args.out_dir)
    stem = _stem(args.locked)
    if args.strategy == "hgate":
        r = hgate_attack_eval(locked, args.shots, args.seed, original=original, input_state=value, noise=noise)
        rows = [["hgate", "", repr(r.tvd), repr(r.hvd), repr(r.dfc), repr(r.accuracy)]]
    else:
        n = len(find_slots(locked))
        if args.guess:
            guesses = [Key.from_string(args.guess)]
        else:
            guesses = random_keys(n, args.wrong_keys, args.seed)
        rows = []
        for i, g in enumerate(guesses):
            r = score_guess(locked, original, g, args.shots, (args.seed, i), input_state=value, noise=noise)
            rows.append(["xgate", str(g), repr(r.tvd), repr(r.hvd), repr(r.dfc), repr(r.accuracy)])
    header = ["strategy", "key", "tvd", "hvd", "dfc", "accuracy"]
    _write(out / f"{stem}.{args.strategy}.csv", _csv(header, rows))
    _write(out / f"{stem}.{args.strategy}.json", _json([dict(zip(header, r)) for r in rows]))
    tvds = [float(r[2]) for r in rows]
    print(f"{stem}: strategy={args.strategy} runs={len(rows)} mean_tvd={sum(tvds) / len(tvds):.3f}")
    return EXIT_OK


def _report_targets(paths: list[str]) -> list[tuple[str, QuantumCircuit, object]]:
    if not paths:
        return [(n, benchmarks.load(n), benchmarks.info(n).test_input) for n in benchmarks.names()]
    return [(_stem(p), _load(p), None) for p in paths]


def cmd_report(args) -> int:
    noise = _noise(args)
    out = Path(args.out_dir)
    tvd_rows, dfc_rows, overhead_rows, summaries = [], [], [], []
    for name, circuit, value in _report_targets(args.circuits):
        camp = run_campaign(
            circuit, value, args.key_length, args.locks, args.shots, args.seed,
            noise=noise, palette=PALETTES[args.palette], name=name,
        )
        s = camp.summary()
        summaries.append(s)
        tvd_rows.append([name, "original", "0.0", "0.0"])
        tvd_rows.append([name, "xgate", repr(s["xgate_mean_tvd"]), repr(s["xgate_mean_hvd"])])
        tvd_rows.append([name, "hgate", repr(s["hgate_mean_tvd"]), repr(s["hgate_mean_hvd"])])
        dfc_rows.append([name, repr(s["dfc_original"]), repr(s["xgate_mean_dfc"]), repr(s["xgate_min_dfc"]),
                     repr(s["hgate_mean_dfc"])])

        locked, record = lock_random(circuit, args.key_length, args.seed, PALETTES[args.palette])
        restored = unlock(locked, record.key)
        acc_before = _accuracy(circuit, value, args, noise)
        acc_after = _accuracy(restored, value, args, noise)
        overhead_rows.append([
            name, depth(circuit), depth(locked), depth(restored),
            gate_count(circuit), gate_count(locked), gate_count(restored),
            repr(acc_before), repr(acc_after),
        ])
    _write(out / "report.json", _json({"campaigns": summaries}))
    _write(out / "tvd.csv", _csv(["circuit", "strategy", "tvd", "hvd"], tvd_rows))
    _write(out / "dfc.csv", _csv(["circuit", "dfc_original", "dfc_xgate_mean", "dfc_xgate_min", "dfc_hgate_mean"], dfc_rows))
    _write(out / "overhead.csv", _csv(
        ["circuit", "depth", "depth_locked", "depth_unlocked", "gate_count", "count_locked",
         "count_unlocked", "accuracy", "accuracy_after"],
        overhead_rows,
    ))
    if args.sweep:
        _, locked, record = benchmarks.alu_sweep_lock()
        results = key_sweep(
            locked, record.key, input_qubits=benchmarks.fixture("alu1")["input_qubits"],
            shots=args.shots, seed=args.seed, noise=noise,
        )
        _sweep_outputs(out, "alu_sweep", results)
    for s in summaries:
        print(
            f"{s['circuit']}: xgate_mean_tvd={s['xgate_mean_tvd']:.3f} "
            f"hgate_mean_tvd={s['hgate_mean_tvd']:.3f} xgate_min_dfc={s['xgate_min_dfc']:.3f}"
        )
    return EXIT_OK


def _accuracy(circuit: QuantumCircuit, value, args, noise) -> float:
    ref = reference_counts(circuit, args.shots, args.seed, value)
    run = circuit if value is None else prepare_basis_input(circuit, value)
    return accuracy(sample_counts(run, args.shots, args.seed, noise), ref.argmax())


def _add_sim_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--shots", type=_positive, default=DEFAULT_SHOTS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise-1q", type=float, default=0.0, help="depolarizing probability per 1-qubit gate")
    p.add_argument("--noise-2q", type=float, default=0.0, help="depolarizing probability per multi-qubit gate")


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qll", description="Lock quantum circuits behind a key qubit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lock", help="lock a circuit with a fresh random key")
    p.add_argument("input")
    p.add_argument("--key-length", type=_positive, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--palette", choices=sorted(PALETTES), default="cx")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--quiet", action="store_true", help="suppress structural-leakage warnings")
    p.set_defaults(func=cmd_lock)

    p = sub.add_parser("unlock", help="decrypt and simplify with a key file")
    p.add_argument("locked")
    p.add_argument("--key", required=True)
    p.add_argument("--original", help="report whether the result equals this circuit")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_unlock)

    p = sub.add_parser("simplify", help="fold a decrypted key qubit away")
    p.add_argument("unlocked")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_simplify)

    p = sub.add_parser("simulate", help="sample measurement counts")
    p.add_argument("input")
    p.add_argument("--input-state", help="basis input, as a bitstring over all qubits or an integer")
    p.add_argument("--out-dir")
    _add_sim_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("evaluate", help="score a lock against both attack strategies")
    p.add_argument("original")
    p.add_argument("locked")
    p.add_argument("--key", required=True)
    p.add_argument("--input-state")
    p.add_argument("--wrong-keys", type=_positive, default=WRONG_KEYS)
    p.add_argument("--sweep", action="store_true", help="also try every key on every input")
    p.add_argument("--out-dir", default=".")
    _add_sim_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("attack", help="run one attack strategy without the key")
    p.add_argument("locked")
    p.add_argument("--original", required=True, help="reference circuit for scoring")
    p.add_argument("--strategy", choices=["xgate", "hgate"], default="xgate")
    p.add_argument("--guess", help="key guess for the xgate strategy (random guesses if omitted)")
    p.add_argument("--wrong-keys", type=_positive, default=WRONG_KEYS)
    p.add_argument("--input-state")
    p.add_argument("--out-dir", default=".")
    _add_sim_flags(p)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("report", help="evaluate a corpus and write plot-ready tables")
    p.add_argument("circuits", nargs="*", help="QASM files (default: the bundled benchmarks)")
    p.add_argument("--key-length", type=_positive, default=CAMPAIGN_KEY_BITS)
    p.add_argument("--locks", type=_positive, default=CAMPAIGN_LOCKS)
    p.add_argument("--palette", choices=sorted(PALETTES), default="cx")
    p.add_argument("--sweep", action="store_true", help="add the key sweep of the 1-bit ALU fixture")
    p.add_argument("--out-dir", default=".")
    _add_sim_flags(p)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except QasmError as exc:
        print(exc.diagnostic.format(getattr(exc, "filename", "<input>")), file=sys.stderr)
        return EXIT_PARSE
    except KeyTooLong as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_KEY_TOO_LONG
    except (MalformedLockedCircuit, KeyLengthMismatch) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_BAD_LOCK
    except SweepTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SWEEP
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (QLLError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
