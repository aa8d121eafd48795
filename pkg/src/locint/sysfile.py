"""Reading and writing system-definition files.

A system file is TOML. It either spells out every node with its
conditional table under repeated `[[node]]` sections, or gives a
`[markov]` shorthand with a transition matrix. It may also name
permutations under `[groups]` and mark the agent row of a
perception-action loop under `[paloop]`. Probabilities are rational
strings like "97/100". Writing is handled by a fixed-format emitter so
a loaded file writes back byte-identically once canonicalized.
"""

import re
from fractions import Fraction
from itertools import product

import tomli

from .errors import LocintError, ParseError
from .model import BayesNet, MarkovSpec, Mechanism, NodeId, StateSpace, \
    build_markov_chain, node
from .symmetry import GeneratedGroup, Permutation

_COORD = re.compile(r"^(\d+)/(\d+)$")


class SystemFile:
    """A named net plus optional loop and symmetry groups."""

    def __init__(self, name, net, loop=None, groups=None, form="nodes"):
        self.name = name
        self.net = net
        self.loop = loop
        self.groups = dict(groups or {})
        self.form = form


def _parse_node_id(text):
    m = _COORD.match(text)
    if m:
        return node(int(m.group(1)), int(m.group(2)))
    return NodeId(text)


def _parse_fraction(text, where):
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"{where}: bad rational {text!r}") from None


def loads_system(text, name_hint="system"):
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ParseError(f"TOML syntax: {exc}") from None
    name = data.get("net", {}).get("name", name_hint)
    has_nodes = "node" in data
    has_markov = "markov" in data
    if has_nodes == has_markov:
        raise ParseError("a system needs either [[node]] sections or [markov], not both")
    if has_markov:
        net = _load_markov(data["markov"])
        form = "markov"
    else:
        net = _load_nodes(data["node"])
        form = "nodes"
    loop = None
    if "paloop" in data:
        from .agency import PaLoop

        m_row = data["paloop"].get("m_row")
        if not isinstance(m_row, int):
            raise ParseError("[paloop] needs an integer m_row")
        loop = PaLoop.from_net(net, m_row)
    groups = {}
    for gname, words in data.get("groups", {}).items():
        if isinstance(words, str):
            words = [words]
        generators = [parse_permutation(w, net) for w in words]
        groups[gname] = GeneratedGroup(generators)
    return SystemFile(name, net, loop, groups, form)


def load_system(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    stem = str(path).rsplit("/", 1)[-1]
    stem = stem.rsplit(".", 1)[0] if "." in stem else stem
    return loads_system(text, name_hint=stem)


def _load_nodes(entries):
    nodes = {}
    mechanisms = {}
    parents_of = {}
    for entry in entries:
        where = f"node {entry.get('id', '?')!r}"
        try:
            nid = _parse_node_id(entry["id"])
            states = [str(s) for s in entry["states"]]
            parents = [_parse_node_id(str(p)) for p in entry.get("parents", [])]
            cpt = entry["cpt"]
        except KeyError as exc:
            raise ParseError(f"{where}: missing field {exc.args[0]}") from None
        if nid in nodes:
            raise ParseError(f"{where}: declared twice")
        nodes[nid] = StateSpace(states)
        parents_of[nid] = (parents, cpt)
    for nid, (parents, cpt) in parents_of.items():
        where = f"node {nid}"
        for p in parents:
            if p not in nodes:
                raise ParseError(f"{where}: unknown parent {p}")
        configs = list(product(*(nodes[p].symbols for p in parents)))
        if len(cpt) != len(configs):
            raise ParseError(
                f"{where}: cpt has {len(cpt)} rows, expected {len(configs)}")
        table = {}
        for cfg, row in zip(configs, cpt):
            table[cfg] = tuple(_parse_fraction(p, where) for p in row)
        mechanisms[nid] = Mechanism(tuple(parents), table)
    try:
        return BayesNet(nodes, mechanisms)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def _load_markov(section):
    try:
        rows = [tuple(str(s) for s in r) for r in section["rows"]]
        steps = section["steps"]
        matrix = [[_parse_fraction(p, "matrix") for p in row]
                  for row in section["matrix"]]
        initial = [_parse_fraction(p, "initial") for p in section["initial"]]
    except KeyError as exc:
        raise ParseError(f"[markov]: missing field {exc.args[0]}") from None
    driving = tuple(section.get("driving", []))
    try:
        spec = MarkovSpec(row_states=rows, steps=steps, matrix=matrix,
                          initial=initial, driving_rows=driving)
        return build_markov_chain(spec)
    except (ValueError, LocintError) as exc:
        raise ParseError(f"[markov]: {exc}") from None


def parse_permutation(word, net):
    """Cycle notation over node ids, e.g. "(1/0 1/1)(2/0 2/1)"."""
    word = word.strip()
    if word in ("", "()"):
        return Permutation({})
    if re.sub(r"\([^()]*\)", "", word).strip():
        raise ParseError(f"bad permutation {word!r}")
    by_label = {str(n): n for n in net.node_ids}
    cycles = []
    for body in re.findall(r"\(([^()]*)\)", word):
        members = []
        for token in body.split():
            if token not in by_label:
                raise ParseError(f"permutation names unknown node {token!r}")
            members.append(by_label[token])
        if members:
            cycles.append(tuple(members))
    try:
        return Permutation.from_cycles(cycles)
    except ValueError as exc:
        raise ParseError(f"bad permutation {word!r}: {exc}") from None


def format_permutation(g):
    cycles = g.to_cycles()
    if not cycles:
        return "()"
    return "".join("(" + " ".join(str(x) for x in c) + ")" for c in cycles)


def _quote(value):
    text = str(value)
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _string_list(values):
    return "[" + ", ".join(_quote(v) for v in values) + "]"


def _fraction_list(values):
    return "[" + ", ".join(_quote(str(v)) for v in values) + "]"


def write_system(system):
    lines = ["[net]", f"name = {_quote(system.name)}", ""]
    net = system.net
    if system.form == "markov" and net.markov_spec is not None:
        spec = net.markov_spec
        lines.append("[markov]")
        lines.append("rows = [" + ", ".join(
            _string_list(r) for r in spec.row_states) + "]")
        lines.append(f"steps = {spec.steps}")
        if spec.driving_rows:
            lines.append("driving = [" + ", ".join(
                str(j) for j in spec.driving_rows) + "]")
        lines.append("matrix = [")
        for row in spec.matrix:
            lines.append("    " + _fraction_list(row) + ",")
        lines.append("]")
        lines.append("initial = " + _fraction_list(spec.initial))
        lines.append("")
    else:
        for n in net.node_ids:
            space = net.state_space(n)
            mech = net.mechanism(n)
            lines.append("[[node]]")
            lines.append(f"id = {_quote(n)}")
            lines.append("states = " + _string_list(space.symbols))
            lines.append("parents = " + _string_list(mech.parent_order))
            configs = list(product(*(net.state_space(p).symbols
                                     for p in mech.parent_order)))
            if len(configs) == 1:
                lines.append("cpt = [" + _fraction_list(mech.table[configs[0]]) + "]")
            else:
                lines.append("cpt = [")
                for cfg in configs:
                    lines.append("    " + _fraction_list(mech.table[cfg]) + ",")
                lines.append("]")
            lines.append("")
    if system.loop is not None:
        lines.append("[paloop]")
        lines.append(f"m_row = {system.loop.m_row}")
        lines.append("")
    if system.groups:
        lines.append("[groups]")
        for gname in system.groups:
            gens = system.groups[gname].generators
            lines.append(f"{gname} = [" + ", ".join(
                _quote(format_permutation(g)) for g in gens) + "]")
        lines.append("")
    return "\n".join(lines)


def save_system(system, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_system(system))
