"""Proof-net representation: links, edges, boxes, inductive builders, validation.

Edges are directed from their tail link (which produces them as a conclusion)
to their head link (which consumes them as a premise).  Pending edges have
head ``None``.  Boxes are arborescent sets of link ids with one principal
door and an ordered list of auxiliary doors; doors are not members of their
own box.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from . import formula as F
from .formula import Formula

AX = "ax"
CUT = "cut"
TENSOR = "tensor"
PAR = "par"
FORALL = "forall"
EXISTS = "exists"
DEREL = "derel"
CONTR = "contr"
WEAK = "weak"
DIG = "dig"
PARA = "para"
BANG = "bang_door"
WHYNOT = "whynot_door"

KINDS = (AX, CUT, TENSOR, PAR, FORALL, EXISTS, DEREL, CONTR, WEAK, DIG,
         PARA, BANG, WHYNOT)

# premise count, conclusion count
_ARITY = {
    AX: (0, 2), CUT: (2, 0), TENSOR: (2, 1), PAR: (2, 1),
    FORALL: (1, 1), EXISTS: (1, 1), DEREL: (1, 1), CONTR: (2, 1),
    WEAK: (0, 1), DIG: (1, 1), PARA: (1, 1), BANG: (1, 1), WHYNOT: (1, 1),
}


@dataclass(frozen=True)
class Link:
    id: int
    kind: str
    eigen: str | None = None        # forall links
    witness: Formula | None = None  # exists links
    aux_index: int | None = None    # whynot_door links


@dataclass(frozen=True)
class Edge:
    id: int
    tail: tuple        # (link id, conclusion slot)
    head: tuple | None  # (link id, premise slot) or None when pending
    formula: Formula


@dataclass(frozen=True)
class Box:
    principal: int           # bang_door link id
    aux: tuple               # whynot_door link ids, ordered
    members: frozenset       # member link ids


class NetError(ValueError):
    pass


class ProofNet:
    def __init__(self, typed: bool = True):
        self.links: dict[int, Link] = {}
        self.edges: dict[int, Edge] = {}
        self.boxes: list[Box] = []
        self.typed = typed
        self._next = 0

    # -- construction helpers -------------------------------------------
    def fresh_id(self) -> int:
        while self._next in self.links or self._next in self.edges:
            self._next += 1
        n = self._next
        self._next += 1
        return n

    def add_link(self, kind, eigen=None, witness=None, aux_index=None, id=None) -> int:
        lid = self.fresh_id() if id is None else id
        self.links[lid] = Link(lid, kind, eigen, witness, aux_index)
        return lid

    def add_edge(self, tail, head, formula, id=None) -> int:
        eid = self.fresh_id() if id is None else id
        self.edges[eid] = Edge(eid, tuple(tail), None if head is None else tuple(head), formula)
        return eid

    def set_head(self, eid, head):
        self.edges[eid] = replace(self.edges[eid], head=None if head is None else tuple(head))

    def set_formula(self, eid, formula):
        self.edges[eid] = replace(self.edges[eid], formula=formula)

    def copy(self) -> "ProofNet":
        n = ProofNet(self.typed)
        n.links = dict(self.links)
        n.edges = dict(self.edges)
        n.boxes = list(self.boxes)
        n._next = self._next
        return n

    # -- structure queries -----------------------------------------------
    def premises(self, lid: int) -> list[Edge]:
        out = [e for e in self.edges.values() if e.head and e.head[0] == lid]
        out.sort(key=lambda e: e.head[1])
        return out

    def conclusions(self, lid: int) -> list[Edge]:
        out = [e for e in self.edges.values() if e.tail[0] == lid]
        out.sort(key=lambda e: e.tail[1])
        return out

    def pending_edges(self) -> list[Edge]:
        return sorted((e for e in self.edges.values() if e.head is None),
                      key=lambda e: e.id)

    def boxes_containing(self, lid: int) -> list[Box]:
        return [b for b in self.boxes if lid in b.members]

    def depth_link(self, lid: int) -> int:
        return len(self.boxes_containing(lid))

    def depth_edge(self, eid: int) -> int:
        return self.depth_link(self.edges[eid].tail[0])

    def depth_box(self, box: Box) -> int:
        return self.depth_link(box.principal)

    def max_depth(self) -> int:
        return max((self.depth_edge(e) for e in self.edges), default=0)

    def box_of_door(self, lid: int) -> Box | None:
        for b in self.boxes:
            if b.principal == lid or lid in b.aux:
                return b
        return None

    def deepest_box(self, eid: int) -> Box | None:
        tail = self.edges[eid].tail[0]
        bs = self.boxes_containing(tail)
        if not bs:
            return None
        return max(bs, key=lambda b: self.depth_box(b))

    def enclosing_boxes(self, eid: int) -> list[Box]:
        """Boxes containing the edge, outermost first."""
        tail = self.edges[eid].tail[0]
        bs = self.boxes_containing(tail)
        bs.sort(key=lambda b: self.depth_box(b))
        return bs

    def principal_edge(self, box: Box) -> Edge:
        return self.conclusions(box.principal)[0]

    def aux_edge(self, box: Box, i: int) -> Edge:
        return self.conclusions(box.aux[i])[0]

    def doors(self, box: Box) -> tuple[Edge, list[Edge]]:
        return self.principal_edge(box), [self.aux_edge(box, i) for i in range(len(box.aux))]

    def door_count(self, box: Box) -> int:
        return 1 + len(box.aux)

    def edge_count(self) -> int:
        return len(self.edges)

    # -- validation --------------------------------------------------------
    def validate(self) -> list[str]:
        errs = []
        for e in self.edges.values():
            if e.tail[0] not in self.links:
                errs.append(f"edge {e.id}: dangling tail {e.tail[0]}")
            if e.head is not None and e.head[0] not in self.links:
                errs.append(f"edge {e.id}: dangling head {e.head[0]}")
        if errs:
            return errs
        for l in self.links.values():
            np, nc = _ARITY[l.kind]
            prem = self.premises(l.id)
            concl = self.conclusions(l.id)
            if len(prem) != np:
                errs.append(f"link {l.id} ({l.kind}): expected {np} premises, got {len(prem)}")
            elif [e.head[1] for e in prem] != list(range(np)):
                errs.append(f"link {l.id} ({l.kind}): bad premise slots")
            if len(concl) != nc:
                errs.append(f"link {l.id} ({l.kind}): expected {nc} conclusions, got {len(concl)}")
            elif [e.tail[1] for e in concl] != list(range(nc)):
                errs.append(f"link {l.id} ({l.kind}): bad conclusion slots")
            if l.kind == FORALL and not l.eigen:
                errs.append(f"link {l.id}: forall without eigenvariable")
            if l.kind == EXISTS and l.witness is None:
                errs.append(f"link {l.id}: exists without witness formula")
        if errs:
            return errs

        # box invariants
        seen_doors = {}
        for i, b in enumerate(self.boxes):
            if self.links[b.principal].kind != BANG:
                errs.append(f"box {i}: principal {b.principal} is not a bang_door")
            for j, a in enumerate(b.aux):
                la = self.links[a]
                if la.kind != WHYNOT:
                    errs.append(f"box {i}: aux {a} is not a whynot_door")
                elif la.aux_index != j:
                    errs.append(f"box {i}: aux door {a} has index {la.aux_index}, expected {j}")
            for d in (b.principal, *b.aux):
                if d in seen_doors:
                    errs.append(f"link {d} is a door of two boxes")
                seen_doors[d] = i
                if d in b.members:
                    errs.append(f"box {i}: door {d} is a member of its own box")
                prem = self.premises(d)
                if prem and prem[0].tail[0] not in b.members:
                    errs.append(f"box {i}: premise of door {d} does not come from inside")
            for m in b.members:
                if m not in self.links:
                    errs.append(f"box {i}: unknown member {m}")
        for l in self.links.values():
            if l.kind in (BANG, WHYNOT) and l.id not in seen_doors:
                errs.append(f"link {l.id} ({l.kind}) is not a door of any box")
        # arborescence
        for i, b in enumerate(self.boxes):
            for j, c in enumerate(self.boxes):
                if i < j:
                    inter = b.members & c.members
                    if inter and not (b.members <= c.members or c.members <= b.members):
                        errs.append(f"boxes not arborescent: boxes {i} and {j} overlap")
        # box contents are closed under edges except through doors
        door_ids = set(seen_doors)
        for i, b in enumerate(self.boxes):
            for e in self.edges.values():
                t_in = e.tail[0] in b.members
                h_in = e.head is not None and e.head[0] in b.members
                if t_in and not h_in:
                    if e.head is None or e.head[0] not in door_ids or \
                       self.box_of_door(e.head[0]) is not b:
                        errs.append(f"box {i}: edge {e.id} escapes without a door")
                if h_in and not t_in:
                    errs.append(f"box {i}: edge {e.id} enters from outside")
        # eigenvariables pairwise distinct
        eigens = {}
        for l in self.links.values():
            if l.kind == FORALL:
                if l.eigen in eigens:
                    errs.append(f"duplicate eigenvariable {l.eigen} on links "
                                f"{eigens[l.eigen]} and {l.id}")
                eigens[l.eigen] = l.id
        if errs:
            return errs
        if self.typed:
            errs.extend(self._validate_types())
        return errs

    def _validate_types(self) -> list[str]:
        errs = []
        eq = F.alpha_equal
        for l in self.links.values():
            prem = self.premises(l.id)
            concl = self.conclusions(l.id)
            k = l.kind
            if k == AX:
                if F.shift_between(F.dual(concl[0].formula), concl[1].formula) is None:
                    errs.append(f"ax {l.id}: conclusions are not dual up to an index shift")
            elif k == CUT:
                if not eq(prem[1].formula, F.dual(prem[0].formula)):
                    errs.append(f"cut {l.id}: premises are not dual")
            elif k in (TENSOR, PAR):
                want = (F.Tensor if k == TENSOR else F.Par)(prem[0].formula, prem[1].formula)
                if not eq(concl[0].formula, want):
                    errs.append(f"{k} {l.id}: conclusion does not combine the premises")
            elif k == FORALL:
                c = concl[0].formula
                if not isinstance(c, F.Forall):
                    errs.append(f"forall {l.id}: conclusion is not a forall formula")
                elif not eq(prem[0].formula,
                            F.substitute(c.body, {c.var: F.Atom(l.eigen, 0, True)})):
                    errs.append(f"forall {l.id}: premise is not the body at the eigenvariable")
            elif k == EXISTS:
                c = concl[0].formula
                if not isinstance(c, F.Exists):
                    errs.append(f"exists {l.id}: conclusion is not an exists formula")
                elif not eq(prem[0].formula,
                            F.substitute(c.body, {c.var: l.witness})):
                    errs.append(f"exists {l.id}: premise is not the body at the witness")
            elif k == DEREL:
                if not eq(concl[0].formula, F.WhyNot(prem[0].formula)):
                    errs.append(f"derel {l.id}: bad typing")
            elif k == CONTR:
                if not (eq(prem[0].formula, concl[0].formula)
                        and eq(prem[1].formula, concl[0].formula)
                        and isinstance(concl[0].formula, F.WhyNot)):
                    errs.append(f"contr {l.id}: premises/conclusion mismatch")
            elif k == WEAK:
                if not isinstance(concl[0].formula, F.WhyNot):
                    errs.append(f"weak {l.id}: conclusion is not a whynot formula")
            elif k == DIG:
                if not eq(F.WhyNot(concl[0].formula), prem[0].formula):
                    errs.append(f"dig {l.id}: premise is not ?? of the conclusion body")
                elif not isinstance(concl[0].formula, F.WhyNot):
                    errs.append(f"dig {l.id}: conclusion is not a whynot formula")
            elif k == PARA:
                if not eq(concl[0].formula, F.Para(prem[0].formula)):
                    errs.append(f"para {l.id}: bad typing")
            elif k == BANG:
                if not eq(concl[0].formula, F.OfCourse(prem[0].formula)):
                    errs.append(f"bang_door {l.id}: bad typing")
            elif k == WHYNOT:
                if not eq(concl[0].formula, F.WhyNot(prem[0].formula)):
                    errs.append(f"whynot_door {l.id}: bad typing")
        return errs

    def check(self):
        errs = self.validate()
        if errs:
            raise NetError("; ".join(errs))
        return self

    # -- serialization -----------------------------------------------------
    def to_doc(self) -> dict:
        links = []
        for l in sorted(self.links.values(), key=lambda x: x.id):
            item = {"id": l.id, "kind": l.kind}
            if l.eigen is not None:
                item["eigen"] = l.eigen
            if l.witness is not None:
                item["witness"] = F.print_formula(l.witness)
            if l.aux_index is not None:
                item["aux_index"] = l.aux_index
            links.append(item)
        edges = []
        for e in sorted(self.edges.values(), key=lambda x: x.id):
            edges.append({
                "id": e.id,
                "tail": list(e.tail),
                "head": None if e.head is None else list(e.head),
                "formula": F.print_formula(e.formula),
            })
        boxes = [{"principal": b.principal, "aux": list(b.aux),
                  "members": sorted(b.members)} for b in self.boxes]
        doc = {"links": links, "edges": edges, "boxes": boxes}
        if not self.typed:
            doc["typed"] = False
        return doc

    def serialize(self) -> str:
        return json.dumps(self.to_doc(), indent=1)

    @classmethod
    def from_doc(cls, doc: dict) -> "ProofNet":
        net = cls(typed=doc.get("typed", True))
        for item in doc["links"]:
            witness = item.get("witness")
            net.add_link(item["kind"],
                         eigen=item.get("eigen"),
                         witness=None if witness is None else F.parse_formula(witness),
                         aux_index=item.get("aux_index"),
                         id=item["id"])
        for item in doc["edges"]:
            net.add_edge(item["tail"], item.get("head"),
                         F.parse_formula(item["formula"]), id=item["id"])
        for item in doc.get("boxes", []):
            net.boxes.append(Box(item["principal"], tuple(item["aux"]),
                                 frozenset(item["members"])))
        return net

    @classmethod
    def deserialize(cls, text: str) -> "ProofNet":
        net = cls.from_doc(json.loads(text))
        return net.check()


# --- inductive builders -----------------------------------------------------
#
# Each builder returns a new net; operands are never mutated.  Multi-net
# rules renumber the second operand to avoid id clashes.

def _merge(g: ProofNet, h: ProofNet) -> tuple[ProofNet, dict]:
    out = g.copy()
    out.typed = g.typed and h.typed
    remap = {}
    for l in sorted(h.links.values(), key=lambda x: x.id):
        remap[l.id] = out.add_link(l.kind, l.eigen, l.witness, l.aux_index)
    emap = {}
    for e in sorted(h.edges.values(), key=lambda x: x.id):
        head = None if e.head is None else (remap[e.head[0]], e.head[1])
        emap[e.id] = out.add_edge((remap[e.tail[0]], e.tail[1]), head, e.formula)
    for b in h.boxes:
        out.boxes.append(Box(remap[b.principal], tuple(remap[a] for a in b.aux),
                             frozenset(remap[m] for m in b.members)))
    remap.update({("edge", k): v for k, v in emap.items()})
    return out, emap


def ax(a: Formula, p: int = 0) -> ProofNet:
    net = ProofNet()
    l = net.add_link(AX)
    net.add_edge((l, 0), None, a)
    net.add_edge((l, 1), None, F.shift(p, F.dual(a)))
    return net


def _need_pending(net: ProofNet, eid: int):
    e = net.edges[eid]
    if e.head is not None:
        raise NetError(f"edge {eid} is not pending")
    return e


def cut(g: ProofNet, eg: int, h: ProofNet, eh: int) -> ProofNet:
    a = _need_pending(g, eg).formula
    b = _need_pending(h, eh).formula
    if g.typed and h.typed and not F.alpha_equal(b, F.dual(a)):
        raise NetError("cut: conclusions are not dual")
    out, emap = _merge(g, h)
    l = out.add_link(CUT)
    out.set_head(eg, (l, 0))
    out.set_head(emap[eh], (l, 1))
    return out


def tensor(g: ProofNet, eg: int, h: ProofNet, eh: int) -> ProofNet:
    a = _need_pending(g, eg).formula
    b = _need_pending(h, eh).formula
    out, emap = _merge(g, h)
    l = out.add_link(TENSOR)
    out.set_head(eg, (l, 0))
    out.set_head(emap[eh], (l, 1))
    out.add_edge((l, 0), None, F.Tensor(a, b))
    return out


def par(g: ProofNet, e1: int, e2: int) -> ProofNet:
    a = _need_pending(g, e1).formula
    b = _need_pending(g, e2).formula
    if e1 == e2:
        raise NetError("par premises must be distinct")
    out = g.copy()
    l = out.add_link(PAR)
    out.set_head(e1, (l, 0))
    out.set_head(e2, (l, 1))
    out.add_edge((l, 0), None, F.Par(a, b))
    return out


def forall(g: ProofNet, e: int, var: str, eigen: str) -> ProofNet:
    a = _need_pending(g, e).formula
    if g.typed:
        for other in g.pending_edges():
            if other.id != e and eigen in F.free_vars(other.formula):
                raise NetError(f"eigenvariable {eigen} free in another conclusion")
    for l in g.links.values():
        if l.kind == FORALL and l.eigen == eigen:
            raise NetError(f"duplicate eigenvariable {eigen}")
    body = F.substitute(a, {eigen: F.Atom(var, 0, True)})
    out = g.copy()
    l = out.add_link(FORALL, eigen=eigen)
    out.set_head(e, (l, 0))
    out.add_edge((l, 0), None, F.Forall(var, body))
    return out


def exists(g: ProofNet, e: int, var: str, body: Formula, witness: Formula) -> ProofNet:
    a = _need_pending(g, e).formula
    if g.typed and not F.alpha_equal(a, F.substitute(body, {var: witness})):
        raise NetError("exists: premise does not match body[witness/var]")
    out = g.copy()
    l = out.add_link(EXISTS, witness=witness)
    out.set_head(e, (l, 0))
    out.add_edge((l, 0), None, F.Exists(var, body))
    return out


def derel(g: ProofNet, e: int) -> ProofNet:
    a = _need_pending(g, e).formula
    out = g.copy()
    l = out.add_link(DEREL)
    out.set_head(e, (l, 0))
    out.add_edge((l, 0), None, F.WhyNot(a))
    return out


def contr(g: ProofNet, e1: int, e2: int) -> ProofNet:
    a = _need_pending(g, e1).formula
    b = _need_pending(g, e2).formula
    if e1 == e2:
        raise NetError("contr premises must be distinct")
    if g.typed and (not F.alpha_equal(a, b) or not isinstance(a, F.WhyNot)):
        raise NetError("contr: premises must be equal whynot formulas")
    out = g.copy()
    l = out.add_link(CONTR)
    out.set_head(e1, (l, 0))
    out.set_head(e2, (l, 1))
    out.add_edge((l, 0), None, a)
    return out


def weak(g: ProofNet, a: Formula) -> ProofNet:
    out = g.copy()
    l = out.add_link(WEAK)
    out.add_edge((l, 0), None, F.WhyNot(a))
    return out


def para(g: ProofNet, e: int) -> ProofNet:
    a = _need_pending(g, e).formula
    out = g.copy()
    l = out.add_link(PARA)
    out.set_head(e, (l, 0))
    out.add_edge((l, 0), None, F.Para(a))
    return out


def dig(g: ProofNet, e: int) -> ProofNet:
    a = _need_pending(g, e).formula
    if g.typed and not (isinstance(a, F.WhyNot) and isinstance(a.body, F.WhyNot)):
        raise NetError("dig: premise must be a double whynot")
    out = g.copy()
    l = out.add_link(DIG)
    out.set_head(e, (l, 0))
    out.add_edge((l, 0), None, a.body if isinstance(a, F.WhyNot) else a)
    return out


def promote(g: ProofNet, principal: int, aux: list[int] | None = None) -> ProofNet:
    """Box the whole net: the chosen pending edge goes below the principal
    door, every other pending edge below an auxiliary door (in the given
    order)."""
    pend = [e.id for e in g.pending_edges()]
    if principal not in pend:
        raise NetError(f"edge {principal} is not pending")
    rest = [e for e in pend if e != principal]
    if aux is None:
        aux = rest
    if sorted(aux) != sorted(rest):
        raise NetError("aux list must cover the other pending edges")
    out = g.copy()
    members = frozenset(out.links)
    bl = out.add_link(BANG)
    a = out.edges[principal].formula
    out.set_head(principal, (bl, 0))
    out.add_edge((bl, 0), None, F.OfCourse(a))
    auxl = []
    for i, eid in enumerate(aux):
        wl = out.add_link(WHYNOT, aux_index=i)
        b = out.edges[eid].formula
        out.set_head(eid, (wl, 0))
        out.add_edge((wl, 0), None, F.WhyNot(b))
        auxl.append(wl)
    out.boxes.append(Box(bl, tuple(auxl), members))
    return out
