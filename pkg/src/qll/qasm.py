"""
Reader and writer for the OpenQASM 2.0 subset used by reversible benchmarks.

Accepted: the ``OPENQASM 2.0;`` header, ``include`` (ignored), one ``qreg``
and one ``creg``, the gates x y z h s t sdg tdg cx ccx, ``measure``,
``barrier`` (ignored), ``//`` comments and ``gate`` declarations whose
bodies use those same gates.

Gates the named set cannot express directly (``ccx`` with an extra control,
controlled ``h`` and so on) are written as declared helper gates named
``mc<base>_<k>``, e.g. ``mcx_3`` for a three-control X. The declaration
carries an exact decomposition so any OpenQASM consumer can run the file;
this reader maps helper applications straight back to the native gate.
Helpers with three or more controls take one extra trailing argument, a
borrowed qubit the decomposition restores.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, replace
from pathlib import Path

from .circuit import Gate, GateKind, QuantumCircuit
from .decompose import decompose, needs_borrowed_qubit
from .errors import NotExpressible, QasmSyntaxError, UndeclaredRegister, UnsupportedGate

_NAMED = {
    "x": GateKind.X, "y": GateKind.Y, "z": GateKind.Z, "h": GateKind.H,
    "s": GateKind.S, "t": GateKind.T, "sdg": GateKind.SDG, "tdg": GateKind.TDG,
    "cx": GateKind.CX, "ccx": GateKind.CCX,
}
_HELPER_RE = re.compile(r"^mc(x|y|z|h|s|sdg|t|tdg)_([1-9][0-9]?)$")


@dataclass(frozen=True)
class ParseDiagnostic:
    line: int
    column: int
    message: str
    severity: str = "error"

    def format(self, filename: str = "<input>") -> str:
        return f"{filename}:{self.line}:{self.column}: {self.severity}: {self.message}"

    def __str__(self):
        return self.format()


@dataclass(frozen=True)
class _Tok:
    kind: str  # ident, int, real, string, sym, eof
    text: str
    line: int
    col: int


_SYMBOLS = {"->", ";", ",", "[", "]", "(", ")", "{", "}", "+", "-", "*", "/", "^"}


def _tokenize(src: str) -> list[_Tok]:
    toks = []
    i, line, col = 0, 1, 1
    n = len(src)

    def err(msg):
        raise QasmSyntaxError(ParseDiagnostic(line, col, msg))

    while i < n:
        c = src[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r\f\v":
            i += 1
            col += 1
            continue
        if src.startswith("//", i):
            while i < n and src[i] != "\n":
                i += 1
            continue
        start_col = col
        if c.isascii() and (c.isalpha() or c == "_"):
            j = i + 1
            while j < n and src[j].isascii() and (src[j].isalnum() or src[j] == "_"):
                j += 1
            toks.append(_Tok("ident", src[i:j], line, start_col))
        elif c.isascii() and (c.isdigit() or (c == "." and i + 1 < n and src[i + 1].isdigit())):
            m = re.compile(r"[0-9]*\.?[0-9]*([eE][-+]?[0-9]+)?").match(src, i)
            j = m.end()
            text = src[i:j]
            toks.append(_Tok("int" if text.isdigit() else "real", text, line, start_col))
        elif c == '"':
            j = src.find('"', i + 1)
            if j < 0 or "\n" in src[i:j]:
                err("unterminated string")
            j += 1
            toks.append(_Tok("string", src[i:j], line, start_col))
        elif src.startswith("->", i):
            j = i + 2
            toks.append(_Tok("sym", "->", line, start_col))
        elif c in _SYMBOLS:
            j = i + 1
            toks.append(_Tok("sym", c, line, start_col))
        else:
            err(f"unexpected character {c!r}")
        col += j - i
        i = j
    toks.append(_Tok("eof", "", line, col))
    return toks


@dataclass
class _Macro:
    formals: list[str]
    body: list[tuple[str, list[str], _Tok]]


class _Parser:
    def __init__(self, src: str, expand_helpers: bool):
        self.toks = _tokenize(src)
        self.pos = 0
        self.expand_helpers = expand_helpers
        self.qreg: tuple[str, int] | None = None
        self.creg: tuple[str, int] | None = None
        self.gates: list[Gate] = []
        self.macros: dict[str, _Macro] = {}

    # token helpers
    def peek(self) -> _Tok:
        return self.toks[self.pos]

    def next(self) -> _Tok:
        tok = self.toks[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def fail(self, tok: _Tok, msg: str):
        raise QasmSyntaxError(ParseDiagnostic(tok.line, tok.col, msg))

    def expect(self, text: str) -> _Tok:
        tok = self.next()
        if tok.kind not in ("sym", "ident") or tok.text != text:
            self.fail(tok, f"expected {text!r}, found {tok.text or 'end of input'!r}")
        return tok

    def expect_kind(self, kind: str, what: str) -> _Tok:
        tok = self.next()
        if tok.kind != kind:
            self.fail(tok, f"expected {what}, found {tok.text or 'end of input'!r}")
        return tok

    # grammar
    def program(self) -> QuantumCircuit:
        first = True
        while self.peek().kind != "eof":
            tok = self.peek()
            if tok.kind == "ident" and tok.text == "OPENQASM":
                if not first:
                    self.fail(tok, "OPENQASM header must come first")
                self.header()
            else:
                self.statement()
            first = False
        if self.qreg is None:
            if self.gates:
                self.fail(self.peek(), "no qreg declared")
            return QuantumCircuit(0)
        qname, nq = self.qreg
        cname, nc = self.creg if self.creg else ("c", 0)
        return QuantumCircuit(nq, tuple(self.gates), num_clbits=nc, qreg=qname, creg=cname)

    def header(self):
        self.next()
        tok = self.next()
        if tok.kind not in ("real", "int") or tok.text not in ("2.0", "2"):
            self.fail(tok, f"only OpenQASM 2.0 is supported, found {tok.text!r}")
        self.expect(";")

    def statement(self):
        tok = self.next()
        if tok.kind != "ident":
            self.fail(tok, f"expected a statement, found {tok.text or 'end of input'!r}")
        word = tok.text
        if word == "include":
            self.expect_kind("string", "a file name")
            self.expect(";")
        elif word in ("qreg", "creg"):
            self.register(tok)
        elif word == "gate":
            self.gate_decl()
        elif word == "barrier":
            self.skip_to_semicolon()
        elif word == "measure":
            self.measure(tok)
        elif word in ("opaque", "reset", "if", "OPENQASM"):
            self.fail(tok, f"'{word}' is not supported")
        else:
            self.application(tok)

    def skip_to_semicolon(self):
        while True:
            tok = self.next()
            if tok.kind == "eof":
                self.fail(tok, "missing ';'")
            if tok.text == ";" and tok.kind == "sym":
                return
            if tok.text in ("{", "}") and tok.kind == "sym":
                self.fail(tok, f"unexpected {tok.text!r}")

    def register(self, kw: _Tok):
        name = self.expect_kind("ident", "a register name")
        self.expect("[")
        size_tok = self.expect_kind("int", "a register size")
        self.expect("]")
        self.expect(";")
        size = int(size_tok.text)
        if size < 1:
            self.fail(size_tok, "register size must be positive")
        if size > 64:
            self.fail(size_tok, "register larger than 64 bits")
        if (self.qreg and name.text == self.qreg[0]) or (self.creg and name.text == self.creg[0]):
            self.fail(name, f"register {name.text!r} declared twice")
        if kw.text == "qreg":
            if self.qreg is not None:
                self.fail(kw, "only one qreg per file is supported")
            self.qreg = (name.text, size)
        else:
            if self.creg is not None:
                self.fail(kw, "only one creg per file is supported")
            self.creg = (name.text, size)

    def operand(self, quantum: bool) -> list[int]:
        """One argument; a bare register name broadcasts over all its bits."""
        name = self.expect_kind("ident", "a register operand")
        reg = self.qreg if quantum else self.creg
        other = self.creg if quantum else self.qreg
        if reg is None or reg[0] != name.text:
            if other is not None and other[0] == name.text:
                self.fail(name, f"{name.text!r} is a {'classical' if quantum else 'quantum'} register here")
            raise UndeclaredRegister(ParseDiagnostic(name.line, name.col, f"undeclared register {name.text!r}"))
        if self.peek().text == "[" and self.peek().kind == "sym":
            self.next()
            idx = self.expect_kind("int", "an index")
            self.expect("]")
            i = int(idx.text)
            if i >= reg[1]:
                self.fail(idx, f"index {i} out of range for {name.text}[{reg[1]}]")
            return [i]
        return list(range(reg[1]))

    def operands(self, quantum: bool = True) -> tuple[list[list[int]], _Tok]:
        args = [self.operand(quantum)]
        while self.peek().text == "," and self.peek().kind == "sym":
            self.next()
            args.append(self.operand(quantum))
        end = self.expect(";")
        return args, end

    @staticmethod
    def broadcast(args: list[list[int]], at: _Tok, fail) -> list[list[int]]:
        sizes = {len(a) for a in args if len(a) > 1}
        if len(sizes) > 1:
            fail(at, "register operands of different sizes")
        width = sizes.pop() if sizes else 1
        return [[a[i] if len(a) > 1 else a[0] for a in args] for i in range(width)]

    def measure(self, kw: _Tok):
        if self.qreg is None:
            raise UndeclaredRegister(ParseDiagnostic(kw.line, kw.col, "measure before any qreg"))
        q = self.operand(True)
        self.expect("->")
        c = self.operand(False)
        self.expect(";")
        if len(q) != len(c):
            self.fail(kw, "measure operands have different sizes")
        for qi, ci in zip(q, c):
            self.gates.append(Gate(GateKind.MEASURE, (qi,), clbit=ci))

    def skip_params(self, name: _Tok) -> bool:
        if not (self.peek().text == "(" and self.peek().kind == "sym"):
            return False
        self.next()
        depth = 1
        while depth:
            tok = self.next()
            if tok.kind == "eof":
                self.fail(tok, f"unterminated parameter list for {name.text!r}")
            if tok.kind == "sym" and tok.text == "(":
                depth += 1
            elif tok.kind == "sym" and tok.text == ")":
                depth -= 1
            elif tok.kind == "sym" and tok.text in ";{}":
                self.fail(tok, f"unexpected {tok.text!r} in parameter list")
        return True

    def application(self, name: _Tok):
        had_params = self.skip_params(name)
        known = name.text in _NAMED or name.text in self.macros
        if not known or had_params:
            if known:
                self.fail(name, f"{name.text!r} takes no parameters")
            raise UnsupportedGate(
                name.text, ParseDiagnostic(name.line, name.col, f"unsupported gate {name.text!r}")
            )
        if self.qreg is None:
            raise UndeclaredRegister(ParseDiagnostic(name.line, name.col, "gate before any qreg"))
        args, _ = self.operands(True)
        for qubits in self.broadcast(args, name, self.fail):
            self.emit(name, qubits)

    def emit(self, name: _Tok, qubits: list[int], depth: int = 0):
        if depth > 32:
            self.fail(name, "gate declarations nest too deeply")
        if len(set(qubits)) != len(qubits):
            self.fail(name, f"repeated qubit in {name.text!r}")
        kind = _NAMED.get(name.text)
        if kind is not None:
            want = 1 + kind.base_controls
            if len(qubits) != want:
                self.fail(name, f"{name.text!r} takes {want} qubits, got {len(qubits)}")
            self.gates.append(Gate(kind, (qubits[-1],), tuple(qubits[:-1])))
            return
        macro = self.macros[name.text]
        if len(qubits) != len(macro.formals):
            self.fail(name, f"{name.text!r} takes {len(macro.formals)} qubits, got {len(qubits)}")
        helper = _HELPER_RE.match(name.text)
        if helper and not self.expand_helpers:
            k = int(helper.group(2))
            kind = GateKind(helper.group(1))
            # the trailing argument, if any, is a borrowed qubit
            self.gates.append(Gate(kind, (qubits[k],), tuple(qubits[:k])))
            return
        binding = dict(zip(macro.formals, qubits))
        for _, formals, at in macro.body:
            self.emit(at, [binding[f] for f in formals], depth + 1)

    def gate_decl(self):
        name = self.expect_kind("ident", "a gate name")
        if name.text in _NAMED or name.text in self.macros or name.text in ("measure", "barrier", "gate"):
            self.fail(name, f"gate {name.text!r} is already defined")
        if self.skip_params(name):
            self.fail(name, "parameterised gate declarations are not supported")
        formals = [self.expect_kind("ident", "a qubit argument").text]
        while self.peek().text == "," and self.peek().kind == "sym":
            self.next()
            formals.append(self.expect_kind("ident", "a qubit argument").text)
        if len(set(formals)) != len(formals):
            self.fail(name, "repeated argument name")
        helper = _HELPER_RE.match(name.text)
        if helper:
            k = int(helper.group(2))
            if len(formals) not in (k + 1, k + 2):
                self.fail(name, f"helper {name.text!r} must take {k + 1} or {k + 2} arguments")
        self.expect("{")
        body = []
        while not (self.peek().text == "}" and self.peek().kind == "sym"):
            tok = self.next()
            if tok.kind != "ident":
                self.fail(tok, f"expected a gate in the body of {name.text!r}, found {tok.text or 'end of input'!r}")
            if tok.text == "barrier":
                self.skip_to_semicolon()
                continue
            if self.skip_params(tok) or (tok.text not in _NAMED and tok.text not in self.macros):
                raise UnsupportedGate(
                    tok.text, ParseDiagnostic(tok.line, tok.col, f"unsupported gate {tok.text!r}")
                )
            args = [self.expect_kind("ident", "an argument").text]
            while self.peek().text == "," and self.peek().kind == "sym":
                self.next()
                args.append(self.expect_kind("ident", "an argument").text)
            self.expect(";")
            for a in args:
                if a not in formals:
                    self.fail(tok, f"unknown argument {a!r} in {name.text!r}")
            body.append((tok.text, args, tok))
        self.next()
        self.macros[name.text] = _Macro(formals, body)


def parse_qasm(source: str | bytes, expand_helpers: bool = False) -> QuantumCircuit:
    """Parse OpenQASM 2.0 text into a circuit.

    Raises ``QasmSyntaxError``, ``UnsupportedGate`` or ``UndeclaredRegister``,
    each carrying a ``ParseDiagnostic``. With ``expand_helpers`` the bodies of
    ``mc*`` helper gates are inlined instead of being read as native gates.
    """
    if isinstance(source, (bytes, bytearray)):
        try:
            source = bytes(source).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise QasmSyntaxError(ParseDiagnostic(1, exc.start + 1, "input is not valid UTF-8")) from None
    if "\x00" in source:
        raise QasmSyntaxError(ParseDiagnostic(1, source.index("\x00") + 1, "NUL byte in input"))
    return _Parser(source, expand_helpers).program()


def load_qasm(path) -> QuantumCircuit:
    with open(path, "rb") as fh:
        data = fh.read()
    return replace(parse_qasm(data), name=Path(path).stem)


# writer

_BASE_NAME = {
    GateKind.X: "x", GateKind.CX: "x", GateKind.CCX: "x", GateKind.Y: "y", GateKind.Z: "z",
    GateKind.H: "h", GateKind.S: "s", GateKind.SDG: "sdg", GateKind.T: "t", GateKind.TDG: "tdg",
}


def _direct_name(g: Gate) -> str | None:
    if g.kind.is_x_family:
        return {0: "x", 1: "cx", 2: "ccx"}.get(len(g.controls))
    return None if g.controls else g.kind.value


def _helper_decl(g: Gate) -> tuple[str, str]:
    k = len(g.controls)
    name = f"mc{_BASE_NAME[g.kind]}_{k}"
    formals = [f"c{i}" for i in range(k)] + ["t"]
    borrowed = needs_borrowed_qubit(g)
    if borrowed:
        formals.append("a")
    template = Gate(g.kind, (k,), tuple(range(k)))
    body = decompose(template, [k + 1] if borrowed else [])
    lines = []
    for b in body:
        n = _direct_name(b)
        lines.append(f"  {n} " + ",".join(formals[q] for q in b.qubits) + ";")
    return name, f"gate {name} {','.join(formals)}\n{{\n" + "\n".join(lines) + "\n}"


def serialize_qasm(circuit: QuantumCircuit) -> str:
    """Write ``circuit`` as OpenQASM 2.0; key material never appears here."""
    r, cr = circuit.qreg, circuit.creg
    decls: dict[str, str] = {}
    body = []
    for g in circuit.gates:
        if g.kind is GateKind.MEASURE:
            body.append(f"measure {r}[{g.target}] -> {cr}[{g.clbit}];")
            continue
        name = _direct_name(g)
        qubits = list(g.qubits)
        if name is None:
            name, text = _helper_decl(g)
            decls.setdefault(name, text)
            if needs_borrowed_qubit(g):
                spare = [q for q in range(circuit.num_qubits) if q not in g.qubits]
                if not spare:
                    raise NotExpressible(f"{g} needs a spare qubit to borrow")
                qubits.append(spare[0])
        body.append(f"{name} " + ",".join(f"{r}[{q}]" for q in qubits) + ";")
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";']
    lines.extend(decls.values())
    if circuit.num_qubits:
        lines.append(f"qreg {r}[{circuit.num_qubits}];")
    if circuit.num_clbits:
        lines.append(f"creg {cr}[{circuit.num_clbits}];")
    lines.extend(body)
    return "\n".join(lines) + "\n"


def dump_qasm(circuit: QuantumCircuit, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_qasm(circuit))
