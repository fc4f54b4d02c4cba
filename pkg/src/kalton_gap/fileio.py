"""Line-oriented text formats for set functions, symmetric functions and certificates."""
from __future__ import annotations

from collections import Counter
from fractions import Fraction
from pathlib import Path
from typing import List, TextIO, Tuple, Union

from .core import (BlockStructure, GroundSet, KaltonGapError, Measure, SetFunction,
                   SymmetricSetFunction, format_rational, require_dense)
from .family import FamilyParams, make_fkn
from .projection import DistanceCertificate


class FormatError(KaltonGapError, ValueError):
    pass


def _lines(text: str) -> List[Tuple[int, str]]:
    out = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((no, line))
    return out


def _header(lines, idx: int, key: str) -> str:
    if idx >= len(lines):
        raise FormatError(f"missing '{key}=' line")
    no, line = lines[idx]
    name, sep, value = line.partition("=")
    if not sep or name.strip() != key:
        raise FormatError(f"line {no}: expected '{key}=...', got {line!r}")
    return value.strip()


def _rational(text: str, no: int) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"line {no}: bad rational {text!r}") from exc


# --- set functions ---

def dumps_set_function(f: SetFunction) -> str:
    default = Counter(f.values).most_common(1)[0][0]
    width = max(1, (f.m + 3) // 4)
    lines = [f"m={f.m}", f"default={format_rational(default)}"]
    lines += [f"{a:0{width}x} {format_rational(v)}" for a, v in enumerate(f.values) if v != default]
    return "\n".join(lines) + "\n"


def loads_set_function(text: str) -> SetFunction:
    lines = _lines(text)
    try:
        m = int(_header(lines, 0, "m"))
    except ValueError as exc:
        raise FormatError("m must be an integer") from exc
    if m < 1:
        raise FormatError("m must be positive")
    require_dense(m, what="set-function file")
    default = _rational(_header(lines, 1, "default"), lines[1][0])
    vals = [default] * (1 << m)
    for no, line in lines[2:]:
        parts = line.split()
        if len(parts) != 2:
            raise FormatError(f"line {no}: expected '<subset-hex> <p/q>'")
        try:
            a = int(parts[0], 16)
        except ValueError as exc:
            raise FormatError(f"line {no}: bad subset {parts[0]!r}") from exc
        if a >= 1 << m:
            raise FormatError(f"line {no}: subset {parts[0]} outside a {m}-element ground set")
        vals[a] = _rational(parts[1], no)
    return SetFunction(GroundSet(m), tuple(vals))


# --- symmetric functions ---

def dumps_symmetric(sf: SymmetricSetFunction) -> str:
    lines = ["blocks=" + ",".join(map(str, sf.blocks.block_sizes))]
    if sf.rule == "fkn":
        lines.append("rule=fkn")
    else:
        lines.append("rule=table")
        for c in sf.blocks.profiles():
            lines.append(",".join(map(str, c)) + " " + format_rational(sf.value(c)))
    return "\n".join(lines) + "\n"


def loads_symmetric(text: str) -> SymmetricSetFunction:
    lines = _lines(text)
    try:
        sizes = tuple(int(x) for x in _header(lines, 0, "blocks").split(","))
        blocks = BlockStructure(sizes)
    except ValueError as exc:
        raise FormatError(f"bad blocks line: {exc}") from exc
    rule = _header(lines, 1, "rule")
    if rule == "fkn":
        if len(set(sizes)) != 1:
            raise FormatError("rule=fkn needs equal block sizes")
        try:
            return make_fkn(FamilyParams(sizes[0], len(sizes)))
        except ValueError as exc:
            raise FormatError(str(exc)) from exc
    if rule != "table":
        raise FormatError(f"unknown rule {rule!r}")
    table = {}
    for no, line in lines[2:]:
        parts = line.split()
        if len(parts) != 2:
            raise FormatError(f"line {no}: expected '<c1,c2,...> <p/q>'")
        try:
            c = tuple(int(x) for x in parts[0].split(","))
        except ValueError as exc:
            raise FormatError(f"line {no}: bad profile {parts[0]!r}") from exc
        if not blocks.is_profile(c):
            raise FormatError(f"line {no}: {parts[0]} is not a profile for blocks {sizes}")
        table[c] = _rational(parts[1], no)
    try:
        return SymmetricSetFunction.from_table(blocks, table)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def loads_function(text: str) -> Union[SetFunction, SymmetricSetFunction]:
    """Parse either format, telling them apart by the first line."""
    lines = _lines(text)
    if lines and lines[0][1].startswith("blocks"):
        return loads_symmetric(text)
    return loads_set_function(text)


def load_function(path) -> Union[SetFunction, SymmetricSetFunction]:
    return loads_function(Path(path).read_text(encoding="utf-8"))


def dump_function(obj, path) -> None:
    text = dumps_symmetric(obj) if isinstance(obj, SymmetricSetFunction) else dumps_set_function(obj)
    Path(path).write_text(text, encoding="utf-8")


# --- certificates ---

def _item_str(item, cert: DistanceCertificate) -> str:
    if cert.symmetric:
        return ",".join(map(str, item))
    return format(item, "x")


def dumps_certificate(cert: DistanceCertificate) -> str:
    """``optimum=``, ``atoms=`` and ``dual`` lines; profile certificates add a
    leading ``blocks=`` line, and tight sets are listed as ``active`` lines."""
    lines = []
    if cert.symmetric:
        lines.append("blocks=" + ",".join(map(str, cert.blocks.block_sizes)))
    lines.append(f"optimum={format_rational(cert.optimum)}")
    lines.append("atoms=" + ",".join(format_rational(w) for w in cert.measure.atom_weights))
    for item, s, w in cert.dual_weights:
        lines.append(f"dual {_item_str(item, cert)} {'+' if s > 0 else '-'} {format_rational(w)}")
    for item in cert.active_sets:
        lines.append(f"active {_item_str(item, cert)}")
    return "\n".join(lines) + "\n"


def loads_certificate(text: str) -> DistanceCertificate:
    lines = _lines(text)
    blocks = None
    idx = 0
    if lines and lines[0][1].startswith("blocks"):
        try:
            blocks = BlockStructure(tuple(int(x) for x in _header(lines, 0, "blocks").split(",")))
        except ValueError as exc:
            raise FormatError(f"bad blocks line: {exc}") from exc
        idx = 1
    optimum = _rational(_header(lines, idx, "optimum"), lines[idx][0])
    atoms_text = _header(lines, idx + 1, "atoms")
    atoms = tuple(_rational(x, lines[idx + 1][0]) for x in atoms_text.split(",") if x.strip())
    if not atoms:
        raise FormatError("certificate has no atoms")

    def item(text: str, no: int):
        try:
            if blocks is not None:
                return tuple(int(x) for x in text.split(","))
            return int(text, 16)
        except ValueError as exc:
            raise FormatError(f"line {no}: bad subset or profile {text!r}") from exc

    duals, active = [], []
    for no, line in lines[idx + 2:]:
        parts = line.split()
        if parts[0] == "dual" and len(parts) == 4 and parts[2] in ("+", "-"):
            duals.append((item(parts[1], no), 1 if parts[2] == "+" else -1, _rational(parts[3], no)))
        elif parts[0] == "active" and len(parts) == 2:
            active.append(item(parts[1], no))
        else:
            raise FormatError(f"line {no}: unrecognized certificate line {line!r}")
    return DistanceCertificate(optimum, Measure(GroundSet(len(atoms)), atoms), tuple(active),
                               tuple(duals), blocks)


def write_certificate(cert: DistanceCertificate, fh: TextIO) -> None:
    fh.write(dumps_certificate(cert))
