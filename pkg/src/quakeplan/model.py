"""Problem data model: links, origin-destination pairs, allowed paths, instances, plans.

An instance describes a road network in which every link either survives or
fails after a shock.  Survival probability is p before investment and q after,
investment costs money, and a global budget caps the total spend.  Each
origin-destination pair carries a list of allowed paths (routes short enough to
be usable) together with two thresholds: m_allow, the length cutoff used when
enumerating allowed paths, and m_penalty, the length charged when no allowed
path survives.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from functools import cached_property


class ValidationError(ValueError):
    """An instance or plan violates a structural constraint."""


class FormatError(ValueError):
    """A document cannot be parsed into the expected shape."""


@dataclass(frozen=True)
class Link:
    id: int          # positive, unique within the instance
    p: float         # survival probability without investment
    q: float         # survival probability with investment, q >= p
    cost: float      # investment cost, >= 0
    length: float | None = None  # informational; authoritative lengths live on graph edges


@dataclass(frozen=True)
class AllowedPath:
    links: tuple[int, ...]  # member link ids, no repeats
    length: float           # total traversal length, 0 < length < m_allow


@dataclass(frozen=True)
class PairSpec:
    source: int
    sink: int
    weight: float                        # contribution weight in the objective
    m_allow: float                       # admissibility cutoff for path lengths
    m_penalty: float                     # length charged on disconnection, >= m_allow
    allowed_paths: tuple[AllowedPath, ...]

    @property
    def relevant_links(self) -> tuple[int, ...]:
        """Ids of links appearing in at least one allowed path, ascending."""
        seen: set[int] = set()
        for path in self.allowed_paths:
            seen.update(path.links)
        return tuple(sorted(seen))

    @property
    def label(self) -> str:
        return f"{self.source}-{self.sink}"


@dataclass(frozen=True)
class GraphEdge:
    id: int       # matches a link id
    u: int
    v: int
    length: float


@dataclass(frozen=True)
class Graph:
    nodes: int    # node ids are 1..nodes
    edges: tuple[GraphEdge, ...]


@dataclass(frozen=True)
class Instance:
    name: str
    budget: float
    links: tuple[Link, ...]
    pairs: tuple[PairSpec, ...]
    graph: Graph | None = None

    @cached_property
    def sorted_links(self) -> tuple[Link, ...]:
        """Links in ascending id order; the canonical order for plan vectors."""
        return tuple(sorted(self.links, key=lambda k: k.id))

    @cached_property
    def link_ids(self) -> tuple[int, ...]:
        return tuple(k.id for k in self.sorted_links)

    @cached_property
    def link_by_id(self) -> dict[int, Link]:
        return {k.id: k for k in self.links}

    @property
    def n_links(self) -> int:
        return len(self.links)


@dataclass(frozen=True)
class InvestmentPlan:
    """A 0/1 investment decision per link, in ascending link-id order."""

    invest: tuple[int, ...]

    @classmethod
    def from_string(cls, text: str) -> "InvestmentPlan":
        if not text or any(c not in "01" for c in text):
            raise ValidationError(f"plan string must be nonempty over 0/1, got {text!r}")
        return cls(tuple(int(c) for c in text))

    def to_string(self) -> str:
        return "".join(str(b) for b in self.invest)

    def __len__(self) -> int:
        return len(self.invest)

    def __iter__(self):
        return iter(self.invest)


def effective_survival(plan, links: tuple[Link, ...]) -> dict[int, float]:
    """Per-link survival probability under a plan: q where invested, else p.

    ``links`` must be in ascending id order and ``plan`` one 0/1 entry per link
    in that same order.
    """
    from .validation import as_invest_vector

    vec = as_invest_vector(plan, len(links))
    return {k.id: (k.q if y else k.p) for k, y in zip(links, vec)}


def plan_cost(plan, instance: Instance) -> float:
    """Total investment cost of a plan."""
    from .validation import as_invest_vector

    vec = as_invest_vector(plan, instance.n_links)
    return math.fsum(k.cost for k, y in zip(instance.sorted_links, vec) if y)


def is_feasible(plan, instance: Instance) -> bool:
    return plan_cost(plan, instance) <= instance.budget


# ---------------------------------------------------------------------------
# parsing

def _num(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FormatError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise FormatError(f"{where}: expected an integer, got {value!r}")
    return value


def _obj(value, where: str) -> dict:
    if not isinstance(value, dict):
        raise FormatError(f"{where}: expected an object, got {type(value).__name__}")
    return value


def _arr(value, where: str) -> list:
    if not isinstance(value, list):
        raise FormatError(f"{where}: expected an array, got {type(value).__name__}")
    return value


def _check_keys(doc: dict, allowed: set[str], required: set[str], where: str) -> None:
    # "notes" is tolerated anywhere so data files can carry commentary
    unknown = set(doc) - allowed - {"notes"}
    if unknown:
        raise FormatError(f"{where}: unknown key {sorted(unknown)[0]!r}")
    missing = required - set(doc)
    if missing:
        raise FormatError(f"{where}: missing key {sorted(missing)[0]!r}")


def _parse_path(doc, where: str) -> AllowedPath:
    doc = _obj(doc, where)
    _check_keys(doc, {"links", "length"}, {"links", "length"}, where)
    members = tuple(_int(e, f"{where}.links[{i}]") for i, e in enumerate(_arr(doc["links"], f"{where}.links")))
    return AllowedPath(links=members, length=_num(doc["length"], f"{where}.length"))


def _parse_pair(doc, where: str) -> PairSpec:
    doc = _obj(doc, where)
    _check_keys(doc, {"source", "sink", "weight", "m_allow", "m_penalty", "allowed_paths"},
                {"source", "sink", "weight", "m_allow", "allowed_paths"}, where)
    m_allow = _num(doc["m_allow"], f"{where}.m_allow")
    # the disconnection penalty defaults to the admissibility cutoff
    m_penalty = _num(doc["m_penalty"], f"{where}.m_penalty") if "m_penalty" in doc else m_allow
    paths = tuple(_parse_path(p, f"{where}.allowed_paths[{i}]")
                  for i, p in enumerate(_arr(doc["allowed_paths"], f"{where}.allowed_paths")))
    return PairSpec(
        source=_int(doc["source"], f"{where}.source"),
        sink=_int(doc["sink"], f"{where}.sink"),
        weight=_num(doc["weight"], f"{where}.weight"),
        m_allow=m_allow,
        m_penalty=m_penalty,
        allowed_paths=paths,
    )


def _parse_link(doc, where: str) -> Link:
    doc = _obj(doc, where)
    _check_keys(doc, {"id", "p", "q", "cost", "length"}, {"id", "p", "q", "cost"}, where)
    return Link(
        id=_int(doc["id"], f"{where}.id"),
        p=_num(doc["p"], f"{where}.p"),
        q=_num(doc["q"], f"{where}.q"),
        cost=_num(doc["cost"], f"{where}.cost"),
        length=_num(doc["length"], f"{where}.length") if "length" in doc else None,
    )


def _parse_graph(doc, where: str) -> Graph:
    doc = _obj(doc, where)
    _check_keys(doc, {"nodes", "edges"}, {"nodes", "edges"}, where)
    edges = []
    for i, e in enumerate(_arr(doc["edges"], f"{where}.edges")):
        ew = f"{where}.edges[{i}]"
        e = _obj(e, ew)
        _check_keys(e, {"id", "u", "v", "length"}, {"id", "u", "v", "length"}, ew)
        edges.append(GraphEdge(id=_int(e["id"], f"{ew}.id"), u=_int(e["u"], f"{ew}.u"),
                               v=_int(e["v"], f"{ew}.v"), length=_num(e["length"], f"{ew}.length")))
    return Graph(nodes=_int(doc["nodes"], f"{where}.nodes"), edges=tuple(edges))


def parse_instance(doc: dict) -> Instance:
    """Build an Instance from a decoded document, then validate it."""
    doc = _obj(doc, "instance")
    _check_keys(doc, {"name", "budget", "links", "pairs", "graph"}, {"name", "budget", "links", "pairs"}, "instance")
    if not isinstance(doc["name"], str):
        raise FormatError("instance.name: expected a string")
    instance = Instance(
        name=doc["name"],
        budget=_num(doc["budget"], "instance.budget"),
        links=tuple(_parse_link(k, f"links[{i}]") for i, k in enumerate(_arr(doc["links"], "links"))),
        pairs=tuple(_parse_pair(p, f"pairs[{i}]") for i, p in enumerate(_arr(doc["pairs"], "pairs"))),
        graph=_parse_graph(doc["graph"], "graph") if "graph" in doc else None,
    )
    validate_instance(instance)
    return instance


def load_instance(text: str) -> Instance:
    """Parse an instance from JSON text.  Raises FormatError or ValidationError."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from None
    return parse_instance(doc)


def load_instance_file(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return load_instance(fh.read())


def validate_instance(instance: Instance) -> None:
    """Raise ValidationError naming the first violated constraint."""
    seen_ids: set[int] = set()
    for k in instance.links:
        if k.id <= 0:
            raise ValidationError(f"link id {k.id} must be positive")
        if k.id in seen_ids:
            raise ValidationError(f"duplicate link id {k.id}")
        seen_ids.add(k.id)
        if not 0.0 <= k.p <= 1.0:
            raise ValidationError(f"link {k.id}: p={k.p} outside [0, 1]")
        if not 0.0 <= k.q <= 1.0:
            raise ValidationError(f"link {k.id}: q={k.q} outside [0, 1]")
        if k.q < k.p:
            raise ValidationError(f"link {k.id}: q={k.q} below p={k.p}")
        if k.cost < 0:
            raise ValidationError(f"link {k.id}: negative cost {k.cost}")
    if instance.budget < 0:
        raise ValidationError(f"negative budget {instance.budget}")
    for i, pair in enumerate(instance.pairs):
        where = f"pair {i} ({pair.label})"
        if pair.source == pair.sink:
            raise ValidationError(f"{where}: source equals sink")
        if pair.weight < 0:
            raise ValidationError(f"{where}: negative weight {pair.weight}")
        if pair.m_allow <= 0:
            raise ValidationError(f"{where}: m_allow={pair.m_allow} must be positive")
        if pair.m_penalty < pair.m_allow:
            raise ValidationError(f"{where}: m_penalty={pair.m_penalty} below m_allow={pair.m_allow}")
        for j, path in enumerate(pair.allowed_paths):
            pw = f"{where} path {j}"
            if not path.links:
                raise ValidationError(f"{pw}: empty link list")
            if len(set(path.links)) != len(path.links):
                raise ValidationError(f"{pw}: repeated link id")
            for e in path.links:
                if e not in seen_ids:
                    raise ValidationError(f"{pw}: unknown link id {e}")
            if path.length <= 0:
                raise ValidationError(f"{pw}: length {path.length} must be positive")
            if path.length >= pair.m_allow:
                raise ValidationError(f"{pw}: length {path.length} not below m_allow={pair.m_allow}")
    if instance.graph is not None:
        _validate_graph(instance)


def _validate_graph(instance: Instance) -> None:
    graph = instance.graph
    if graph.nodes <= 0:
        raise ValidationError(f"graph: node count {graph.nodes} must be positive")
    edge_ids = [e.id for e in graph.edges]
    if len(set(edge_ids)) != len(edge_ids):
        raise ValidationError("graph: duplicate edge id")
    if set(edge_ids) != set(instance.link_by_id):
        raise ValidationError("graph: edge ids must match link ids exactly")
    lengths = {}
    for e in graph.edges:
        if not (1 <= e.u <= graph.nodes and 1 <= e.v <= graph.nodes):
            raise ValidationError(f"graph edge {e.id}: endpoint outside 1..{graph.nodes}")
        if e.u == e.v:
            raise ValidationError(f"graph edge {e.id}: self loop")
        if e.length <= 0:
            raise ValidationError(f"graph edge {e.id}: length {e.length} must be positive")
        lengths[e.id] = e.length
    # declared path lengths must agree with the per-link lengths they sum
    for i, pair in enumerate(instance.pairs):
        for j, path in enumerate(pair.allowed_paths):
            total = math.fsum(lengths[e] for e in path.links)
            if abs(total - path.length) > 1e-9:
                raise ValidationError(
                    f"pair {i} ({pair.label}) path {j}: length {path.length} "
                    f"differs from link-length sum {total}")


# ---------------------------------------------------------------------------
# serialization

def _link_doc(k: Link) -> dict:
    doc = {"id": k.id, "p": k.p, "q": k.q, "cost": k.cost}
    if k.length is not None:
        doc["length"] = k.length
    return doc


def _pair_doc(pair: PairSpec) -> dict:
    return {
        "source": pair.source,
        "sink": pair.sink,
        "weight": pair.weight,
        "m_allow": pair.m_allow,
        "m_penalty": pair.m_penalty,
        "allowed_paths": [{"links": list(p.links), "length": p.length} for p in pair.allowed_paths],
    }


def instance_to_doc(instance: Instance) -> dict:
    doc = {
        "name": instance.name,
        "budget": instance.budget,
        "links": [_link_doc(k) for k in instance.links],
        "pairs": [_pair_doc(p) for p in instance.pairs],
    }
    if instance.graph is not None:
        doc["graph"] = {
            "nodes": instance.graph.nodes,
            "edges": [{"id": e.id, "u": e.u, "v": e.v, "length": e.length} for e in instance.graph.edges],
        }
    return doc


def serialize_instance(instance: Instance) -> str:
    """Render an instance as JSON text; load_instance inverts this exactly."""
    return json.dumps(instance_to_doc(instance), indent=2) + "\n"


# ---------------------------------------------------------------------------
# overlays

def load_overlay(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from None
    return _obj(doc, "overlay")


def apply_overlay(instance: Instance, overlay: dict) -> Instance:
    """Merge a sparse overlay document field-by-field over a base instance.

    Overlay links are matched by id and may update p, q, cost, or length.
    Overlay pairs are matched by position and may update weight, m_allow,
    m_penalty, or replace the allowed-path list; when an overlay pair names a
    source or sink it must agree with the base pair.  The merged instance is
    validated before being returned.
    """
    _check_keys(overlay, {"name", "budget", "links", "pairs", "graph"}, set(), "overlay")
    name = overlay.get("name", instance.name)
    if not isinstance(name, str):
        raise FormatError("overlay.name: expected a string")
    budget = _num(overlay["budget"], "overlay.budget") if "budget" in overlay else instance.budget

    links = list(instance.links)
    index_of = {k.id: i for i, k in enumerate(links)}
    for i, patch in enumerate(_arr(overlay.get("links", []), "overlay.links")):
        where = f"overlay.links[{i}]"
        patch = _obj(patch, where)
        _check_keys(patch, {"id", "p", "q", "cost", "length"}, {"id"}, where)
        link_id = _int(patch["id"], f"{where}.id")
        if link_id not in index_of:
            raise ValidationError(f"{where}: no link with id {link_id}")
        base = links[index_of[link_id]]
        fields = {f: _num(patch[f], f"{where}.{f}") for f in ("p", "q", "cost", "length") if f in patch}
        links[index_of[link_id]] = replace(base, **fields)

    pairs = list(instance.pairs)
    patches = _arr(overlay.get("pairs", []), "overlay.pairs")
    if len(patches) > len(pairs):
        raise ValidationError(f"overlay.pairs: {len(patches)} entries for {len(pairs)} pairs")
    for i, patch in enumerate(patches):
        where = f"overlay.pairs[{i}]"
        patch = _obj(patch, where)
        _check_keys(patch, {"source", "sink", "weight", "m_allow", "m_penalty", "allowed_paths"}, set(), where)
        base = pairs[i]
        for key in ("source", "sink"):
            if key in patch and _int(patch[key], f"{where}.{key}") != getattr(base, key):
                raise ValidationError(f"{where}: {key} {patch[key]} does not match base pair {base.label}")
        fields = {f: _num(patch[f], f"{where}.{f}") for f in ("weight", "m_allow", "m_penalty") if f in patch}
        if "allowed_paths" in patch:
            fields["allowed_paths"] = tuple(
                _parse_path(p, f"{where}.allowed_paths[{j}]")
                for j, p in enumerate(_arr(patch["allowed_paths"], f"{where}.allowed_paths")))
        pairs[i] = replace(base, **fields)

    graph = instance.graph
    if "graph" in overlay:
        graph = _parse_graph(overlay["graph"], "overlay.graph")

    merged = Instance(name=name, budget=budget, links=tuple(links), pairs=tuple(pairs), graph=graph)
    validate_instance(merged)
    return merged


def override_m_penalty(instance: Instance, value: float) -> Instance:
    """Return a copy of the instance with every pair's m_penalty set to value."""
    pairs = tuple(replace(p, m_penalty=value) for p in instance.pairs)
    out = replace(instance, pairs=pairs)
    validate_instance(out)
    return out


# ---------------------------------------------------------------------------
# path enumeration from the graph

def enumerate_allowed_paths(instance: Instance, pair: PairSpec) -> list[AllowedPath]:
    """Enumerate all simple source-sink paths shorter than m_allow.

    Requires graph mode.  Paths are returned sorted ascending by length, ties
    broken by the lexicographic order of their link-id sequences.
    """
    if instance.graph is None:
        raise ValidationError("path enumeration requires graph data")
    if pair.source == pair.sink:
        raise ValidationError(f"pair {pair.label}: source equals sink")
    graph = instance.graph
    if not (1 <= pair.source <= graph.nodes and 1 <= pair.sink <= graph.nodes):
        raise ValidationError(f"pair {pair.label}: endpoint outside 1..{graph.nodes}")

    adjacency: dict[int, list[tuple[int, int, float]]] = {}
    for e in graph.edges:
        adjacency.setdefault(e.u, []).append((e.v, e.id, e.length))
        adjacency.setdefault(e.v, []).append((e.u, e.id, e.length))
    for nbrs in adjacency.values():
        nbrs.sort(key=lambda t: t[1])

    found: list[AllowedPath] = []
    route: list[int] = []
    visited = {pair.source}

    def walk(node: int, total: float) -> None:
        if node == pair.sink:
            found.append(AllowedPath(links=tuple(route), length=total))
            return
        for nxt, link_id, length in adjacency.get(node, ()):
            if nxt in visited:
                continue
            # lengths are positive, so a too-long prefix cannot recover
            if total + length >= pair.m_allow:
                continue
            visited.add(nxt)
            route.append(link_id)
            walk(nxt, total + length)
            route.pop()
            visited.remove(nxt)

    walk(pair.source, 0.0)
    found.sort(key=lambda p: (p.length, p.links))
    return found
