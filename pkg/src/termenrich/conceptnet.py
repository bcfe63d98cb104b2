"""Coordination classes and insertion specialization graphs built from
acquisition links, with DOT and JSON export."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, Union

from .acquisition import AcquisitionLink
from .metagrammar import Family
from .terms import Term

logger = logging.getLogger(__name__)

TOWARD_SPECIFIC = "toward-specific"


class UnknownFormat(ValueError):
    pass


class GraphFormatError(ValueError):
    pass


class DisjointSet:
    """Union-find with path halving and union by size."""

    def __init__(self, items: Iterable = ()) -> None:
        self._parent: dict = {}
        self._size: dict = {}
        for item in items:
            self.add(item)

    def add(self, item) -> None:
        if item not in self._parent:
            self._parent[item] = item
            self._size[item] = 1

    def find(self, item):
        parent = self._parent
        while parent[item] != item:
            parent[item] = parent[parent[item]]
            item = parent[item]
        return item

    def union(self, a, b) -> bool:
        """Merge the sets of ``a`` and ``b``; False if they were already one set."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self._size[ra] < self._size[rb]:
            ra, rb = rb, ra
        self._parent[rb] = ra
        self._size[ra] += self._size[rb]
        return True

    def groups(self) -> list[list]:
        out: dict = {}
        for item in self._parent:
            out.setdefault(self.find(item), []).append(item)
        return list(out.values())


def _key(term: Union[Term, str]) -> str:
    return term.text if isinstance(term, Term) else term


@dataclass(frozen=True)
class CoordClass:
    id: int
    members: frozenset[str]

    @property
    def representative(self) -> str:
        return min(self.members)

    @property
    def label(self) -> str:
        return " / ".join(sorted(self.members))


def _number_classes(groups: Iterable[Iterable[str]]) -> list[CoordClass]:
    ordered = sorted((frozenset(g) for g in groups), key=min)
    return [CoordClass(i, members) for i, members in enumerate(ordered)]


def coordination_links(links: Iterable[AcquisitionLink],
                       split_head_coord: bool = False) -> list[AcquisitionLink]:
    out = [l for l in links if l.family is Family.COORDINATION]
    if split_head_coord:
        out = [l for l in out if not l.is_head_coordination]
    return out


def build_coord_classes(links: Iterable[AcquisitionLink], universe: Iterable[Union[Term, str]] = (),
                        split_head_coord: bool = False) -> list[CoordClass]:
    """Connected components of the undirected coordination-link graph.

    Every term of ``universe`` lands in exactly one class (a singleton when it
    has no coordination link). Class ids follow the sorted representatives.
    """
    ds = DisjointSet(_key(t) for t in universe)
    for link in coordination_links(links, split_head_coord):
        a, b = link.source.text, link.candidate.text
        ds.add(a)
        ds.add(b)
        ds.union(a, b)
    return _number_classes(ds.groups())


def read_conflation(path: str | Path) -> list[tuple[str, str]]:
    """Parse ``term a == term b`` lines; ``#`` comments and blank lines are skipped."""
    pairs = []
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        left, sep, right = line.partition(" == ")
        if not sep or not left.strip() or not right.strip():
            raise GraphFormatError(f"{path}:{line_no}: expected 'term == term'")
        pairs.append((Term.from_text(left).text, Term.from_text(right).text))
    return pairs


def apply_conflation(classes: Sequence[CoordClass],
                     pairs: Iterable[tuple[Union[Term, str], Union[Term, str]]]) -> list[CoordClass]:
    """Merge the classes holding each pair of terms; unknown terms are ignored."""
    owner = {m: c.id for c in classes for m in c.members}
    ds = DisjointSet(c.id for c in classes)
    for a, b in pairs:
        ka, kb = _key(a), _key(b)
        if ka not in owner or kb not in owner:
            logger.warning("conflation %r == %r names a term outside the graph", ka, kb)
            continue
        ds.union(owner[ka], owner[kb])
    by_id = {c.id: c for c in classes}
    return _number_classes(
        frozenset().union(*(by_id[i].members for i in group)) for group in ds.groups()
    )


@dataclass(frozen=True)
class SpecEdge:
    source: int
    target: int
    witnesses: tuple[AcquisitionLink, ...]
    direction: str = TOWARD_SPECIFIC


@dataclass(frozen=True)
class SpecGraph:
    classes: tuple[CoordClass, ...]
    edges: tuple[SpecEdge, ...]

    @property
    def nodes(self) -> list[int]:
        return [c.id for c in self.classes]

    def class_of(self, term: Union[Term, str]) -> CoordClass:
        key = _key(term)
        for c in self.classes:
            if key in c.members:
                return c
        raise KeyError(key)


def build_spec_graph(links: Iterable[AcquisitionLink], classes: Sequence[CoordClass]) -> SpecGraph:
    """Directed class graph induced by insertion links.

    Links inside one class are dropped; parallel links between two classes
    merge into one edge. Cycles are kept. Terms missing from ``classes`` get
    new singleton classes numbered after the existing ones.
    """
    insertions = [l for l in links if l.family is Family.INSERTION]
    classes = list(classes)
    owner = {m: c.id for c in classes for m in c.members}
    extra = sorted({t for l in insertions for t in (l.source.text, l.candidate.text)} - owner.keys())
    for term in extra:
        cls = CoordClass(len(classes), frozenset({term}))
        classes.append(cls)
        owner[term] = cls.id
    witnesses: dict[tuple[int, int], list[AcquisitionLink]] = {}
    for link in insertions:
        a, b = owner[link.source.text], owner[link.candidate.text]
        if a != b:
            witnesses.setdefault((a, b), []).append(link)
    edges = tuple(SpecEdge(a, b, tuple(sorted(ws, key=AcquisitionLink.sort_key)))
                  for (a, b), ws in sorted(witnesses.items()))
    return SpecGraph(tuple(classes), edges)


# --- export ---------------------------------------------------------------

def _class_dict(c: CoordClass) -> dict:
    return {"id": c.id, "representative": c.representative, "members": sorted(c.members)}


def _class_from_dict(d: dict) -> CoordClass:
    return CoordClass(int(d["id"]), frozenset(d["members"]))


def _dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def classes_to_json(classes: Sequence[CoordClass], links: Iterable[AcquisitionLink] = ()) -> str:
    arrows = sorted({(l.source.text, l.candidate.text) for l in links
                     if l.family is Family.COORDINATION})
    return _dumps({
        "classes": [_class_dict(c) for c in sorted(classes, key=lambda c: c.id)],
        "arrows": [{"source": a, "candidate": b} for a, b in arrows],
    })


def classes_from_json(text: str) -> list[CoordClass]:
    try:
        data = json.loads(text)
        return [_class_from_dict(d) for d in data["classes"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphFormatError(f"bad classes document: {exc}") from exc


def spec_graph_to_json(graph: SpecGraph) -> str:
    return _dumps({
        "nodes": [_class_dict(c) for c in sorted(graph.classes, key=lambda c: c.id)],
        "edges": [
            {
                "from": e.source,
                "to": e.target,
                "direction": e.direction,
                "witnesses": [w.to_dict() for w in e.witnesses],
            }
            for e in sorted(graph.edges, key=lambda e: (e.source, e.target))
        ],
    })


def spec_graph_from_json(text: str) -> SpecGraph:
    try:
        data = json.loads(text)
        classes = tuple(_class_from_dict(d) for d in data["nodes"])
        edges = tuple(
            SpecEdge(int(e["from"]), int(e["to"]),
                     tuple(AcquisitionLink.from_dict(w) for w in e["witnesses"]),
                     e.get("direction", TOWARD_SPECIFIC))
            for e in data["edges"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphFormatError(f"bad spec-graph document: {exc}") from exc
    return SpecGraph(classes, edges)


def _q(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def classes_to_dot(classes: Sequence[CoordClass], links: Iterable[AcquisitionLink] = ()) -> str:
    """One cluster per class; an arrow t -> t' means t' came from a coordination of t."""
    lines = ["digraph coordination {", "  node [shape=plaintext];"]
    for c in sorted(classes, key=lambda c: c.id):
        lines.append(f"  subgraph cluster_{c.id} {{")
        lines.append(f"    label={_q(f'class {c.id}')};")
        for m in sorted(c.members):
            lines.append(f"    {_q(m)};")
        lines.append("  }")
    arrows = sorted({(l.source.text, l.candidate.text) for l in links
                     if l.family is Family.COORDINATION})
    for a, b in arrows:
        lines.append(f"  {_q(a)} -> {_q(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def spec_graph_to_dot(graph: SpecGraph) -> str:
    lines = ["digraph specialization {", "  node [shape=box];"]
    for c in sorted(graph.classes, key=lambda c: c.id):
        lines.append(f"  subgraph cluster_{c.id} {{")
        lines.append('    label="";')
        lines.append(f"    c{c.id} [label={_q(c.label)}];")
        lines.append("  }")
    for e in sorted(graph.edges, key=lambda e: (e.source, e.target)):
        lines.append(f"  c{e.source} -> c{e.target} [label=\"{len(e.witnesses)}\"];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_graph(obj: Union[SpecGraph, Sequence[CoordClass]], fmt: str,
                 links: Iterable[AcquisitionLink] = ()) -> str:
    """Render a spec graph or a class list as ``dot`` or ``json``."""
    if fmt not in ("dot", "json"):
        raise UnknownFormat(f"unknown export format {fmt!r}")
    if isinstance(obj, SpecGraph):
        return spec_graph_to_dot(obj) if fmt == "dot" else spec_graph_to_json(obj)
    return classes_to_dot(obj, links) if fmt == "dot" else classes_to_json(obj, links)
