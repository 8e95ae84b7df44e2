"""Web diagrams as bottom-to-top stacks of generator layers.

Strand labels are single letters.  SL2 and SO3 use only ``x``.  GL2 uses
``x``/``y`` for the usual strand pointing up/down and ``p``/``q`` for the
phantom strand pointing up/down.

A layer ``(offset, gen)`` replaces the generator's domain template found at
``offset`` in the current word by its codomain template.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

from .errors import TypeMismatch

CATEGORIES = ("sl2", "gl2", "so3")

LABELS = {
    "sl2": ("x",),
    "so3": ("x",),
    "gl2": ("x", "y", "p", "q"),
}

# label -> (kind, orientation)
STRAND_KIND = {
    "sl2": {"x": ("usual", "none")},
    "so3": {"x": ("usual", "none")},
    "gl2": {
        "x": ("usual", "up"),
        "y": ("usual", "down"),
        "p": ("phantom", "up"),
        "q": ("phantom", "down"),
    },
}

GENERATORS: dict[str, dict[str, tuple[str, str]]] = {
    "sl2": {
        "cap": ("xx", ""),
        "cup": ("", "xx"),
        "cross_pos": ("xx", "xx"),
        "cross_neg": ("xx", "xx"),
    },
    "so3": {
        "cap": ("xx", ""),
        "cup": ("", "xx"),
        "tup": ("xxx", ""),
        "tdown": ("", "xxx"),
        "cross_pos": ("xx", "xx"),
        "cross_neg": ("xx", "xx"),
    },
    "gl2": {
        "cap": ("xy", ""),
        "cup": ("", "yx"),
        "cap'": ("yx", ""),
        "cup'": ("", "xy"),
        "pcap": ("pq", ""),
        "pcup": ("", "qp"),
        "pcap'": ("qp", ""),
        "pcup'": ("", "pq"),
        "tup": ("xqx", ""),
        "tdown": ("", "xqx"),
        "cross_pos": ("xx", "xx"),
        "cross_neg": ("xx", "xx"),
        "mixed_cross": ("xp", "px"),
    },
}

CROSSINGS = ("cross_pos", "cross_neg", "mixed_cross")
VERTICES = ("tup", "tdown")


def _check_category(category: str) -> None:
    if category not in CATEGORIES:
        raise TypeMismatch(f"unknown category {category!r}")


def check_word(category: str, word) -> tuple[str, ...]:
    _check_category(category)
    word = tuple(word)
    for i, a in enumerate(word):
        if a not in LABELS[category]:
            raise TypeMismatch(f"label {a!r} not legal for {category}", location={"position": i})
    return word


@dataclass(frozen=True)
class LayeredDiagram:
    category: str
    domain: tuple[str, ...]
    layers: tuple[tuple[int, str], ...] = ()
    codomain: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(self.domain))
        object.__setattr__(self, "layers", tuple((int(o), str(g)) for o, g in self.layers))
        if self.codomain is not None:
            object.__setattr__(self, "codomain", tuple(self.codomain))

    def words(self) -> list[tuple[str, ...]]:
        """The word before the first layer and after every layer."""
        check_word(self.category, self.domain)
        gens = GENERATORS[self.category]
        word = self.domain
        out = [word]
        for idx, (off, g) in enumerate(self.layers):
            if g not in gens:
                raise TypeMismatch(f"unknown generator {g!r} for {self.category}", location={"layer": idx})
            dom, cod = gens[g]
            if off < 0 or off + len(dom) > len(word) or "".join(word[off : off + len(dom)]) != dom:
                got = "".join(word[off : off + len(dom)]) if 0 <= off <= len(word) else "?"
                raise TypeMismatch(
                    f"layer {idx}: {g} needs {dom or 'empty'} at offset {off}, found {got or 'empty'}",
                    location={"layer": idx},
                )
            word = word[:off] + tuple(cod) + word[off + len(dom) :]
            out.append(word)
        return out

    def validate(self) -> tuple[str, ...]:
        cod = self.words()[-1]
        if self.codomain is not None and cod != self.codomain:
            raise TypeMismatch(
                f"declared codomain {''.join(self.codomain)!r} but diagram ends in {''.join(cod)!r}",
                location={"layer": len(self.layers)},
            )
        return cod

    @property
    def target(self) -> tuple[str, ...]:
        return self.validate()

    def vertex_count(self) -> int:
        return sum(1 for _, g in self.layers if g in VERTICES)

    def to_json(self) -> dict:
        return {
            "category": self.category,
            "domain": list(self.domain),
            "codomain": list(self.validate()),
            "layers": [{"offset": o, "gen": g} for o, g in self.layers],
        }

    @classmethod
    def from_json(cls, obj: dict) -> LayeredDiagram:
        try:
            cat = obj["category"]
            layers = tuple((int(l["offset"]), l["gen"]) for l in obj.get("layers", []))
            dom = tuple(obj.get("domain", []))
        except (KeyError, TypeError, ValueError) as exc:
            raise TypeMismatch(f"malformed diagram JSON: {exc}") from exc
        cod = obj.get("codomain")
        return cls(cat, dom, layers, tuple(cod) if cod is not None else None)


def validate(d: LayeredDiagram) -> tuple[str, ...]:
    return d.validate()


def identity(category: str, word) -> LayeredDiagram:
    return LayeredDiagram(category, check_word(category, word), ())


def generator(category: str, g: str, left=(), right=()) -> LayeredDiagram:
    """A single generator with identity strands on either side."""
    dom, _ = GENERATORS[category][g]
    left, right = tuple(left), tuple(right)
    return LayeredDiagram(category, left + tuple(dom) + right, ((len(left), g),))


def compose(top: LayeredDiagram, bottom: LayeredDiagram) -> LayeredDiagram:
    """top after bottom."""
    if top.category != bottom.category:
        raise TypeMismatch("category mismatch")
    mid = bottom.validate()
    if tuple(top.domain) != mid:
        raise TypeMismatch(f"cannot compose: {''.join(top.domain)!r} vs {''.join(mid)!r}")
    return LayeredDiagram(bottom.category, bottom.domain, bottom.layers + top.layers)


def tensor(left: LayeredDiagram, right: LayeredDiagram) -> LayeredDiagram:
    """Side by side: first run the left layers, then the right ones shifted."""
    if left.category != right.category:
        raise TypeMismatch("category mismatch")
    lcod = left.validate()
    right.validate()
    layers = tuple((o, g) for o, g in left.layers)
    layers += tuple((o + len(lcod), g) for o, g in right.layers)
    return LayeredDiagram(left.category, left.domain + right.domain, layers)


# boundary partitions -------------------------------------------------------------


@dataclass(frozen=True, order=True)
class PlanarPartition:
    """Noncrossing partition of boundary points 1..k+l.

    Points 1..k sit on the bottom left to right, k+1..k+l on the top right to
    left, so the boundary circle reads 1, 2, ..., k+l.
    """

    k: int
    l: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(sorted(tuple(sorted(b)) for b in self.blocks))
        object.__setattr__(self, "blocks", blocks)
        pts = sorted(p for b in blocks for p in b)
        if pts != list(range(1, self.k + self.l + 1)):
            raise ValueError("blocks must partition 1..k+l")
        if any(len(b) < 2 for b in blocks):
            raise ValueError("blocks need at least two points")
        if not is_noncrossing(blocks):
            raise ValueError("partition is crossing")

    def block_of(self) -> dict[int, int]:
        return {p: i for i, b in enumerate(self.blocks) for p in b}


class Matching(PlanarPartition):
    def __post_init__(self):
        super().__post_init__()
        if any(len(b) != 2 for b in self.blocks):
            raise ValueError("a matching has blocks of size two")


def is_noncrossing(blocks) -> bool:
    """No a < b < c < d with a, c in one block and b, d in another."""
    owner = {p: i for i, b in enumerate(blocks) for p in b}
    pts = sorted(owner)
    for i, a in enumerate(pts):
        for j in range(i + 1, len(pts)):
            b = pts[j]
            if owner[a] == owner[b]:
                continue
            for c in pts[j + 1 :]:
                if owner[c] != owner[a]:
                    continue
                if any(owner[d] == owner[b] for d in pts if d > c):
                    return False
    return True


def _nc_partitions(points: tuple[int, ...], pairs_only: bool) -> Iterator[tuple[tuple[int, ...], ...]]:
    if not points:
        yield ()
        return
    first = points[0]

    def grow(block, pos, inner):
        if len(block) >= 2:
            for tail in _nc_partitions(points[pos:], pairs_only):
                yield (tuple(block),) + inner + tail
        if pairs_only and len(block) == 2:
            return
        for j in range(pos, len(points)):
            if pairs_only and (j - pos) % 2:
                continue
            for mid in _nc_partitions(points[pos:j], pairs_only):
                yield from grow(block + [points[j]], j + 1, inner + mid)

    yield from grow([first], 1, ())


@lru_cache(maxsize=None)
def _enumerate(k: int, l: int, pairs_only: bool) -> tuple:
    if k < 0 or l < 0:
        raise ValueError("k, l must be nonnegative")
    pts = tuple(range(1, k + l + 1))
    cls = Matching if pairs_only else PlanarPartition
    return tuple(sorted(cls(k, l, blocks) for blocks in _nc_partitions(pts, pairs_only)))


def enumerate_matchings(k: int, l: int) -> list[Matching]:
    if (k + l) % 2:
        return []
    return list(_enumerate(k, l, True))


def enumerate_planar_partitions(k: int, l: int) -> list[PlanarPartition]:
    return list(_enumerate(k, l, False))


# realizing partitions as layered diagrams ----------------------------------------

# planar macros, expressed as layer lists relative to an offset
def _merge_x(o):  # so3/sl2 style: x x -> x via a bent tup
    return [(o + 2, "cup"), (o, "tup")]


def _split_x(o):  # x -> x x
    return [(o, "tdown"), (o + 2, "cap")]


def _reduce_side(labels: list[int], block_of: dict[int, int], sizes: dict[int, int], other: dict[int, int]):
    """Strip one side down to a single strand per mixed block.

    Returns the list of ('cap'|'tup'|'merge', offset) steps and the final word
    of block ids.
    """
    word = [block_of[p] for p in labels]
    steps = []
    changed = True
    while changed:
        changed = False
        i = 0
        while i < len(word):
            b = word[i]
            j = i
            while j < len(word) and word[j] == b:
                j += 1
            run = j - i
            if run == word.count(b):
                if other.get(b, 0) == 0:
                    m = run
                    while m > 3:
                        steps.append(("merge", i))
                        m -= 1
                    steps.append(("tup" if m == 3 else "cap", i))
                    del word[i:j]
                    changed = True
                    break
                if run > 1:
                    for _ in range(run - 1):
                        steps.append(("merge", i))
                    del word[i + 1 : j]
                    changed = True
                    break
            i = j
    return steps, word


def partition_to_diagram(p: PlanarPartition, category: str | None = None) -> LayeredDiagram:
    """Layered realization: close side-only blocks innermost first, chain larger
    blocks by left combs, and carry one strand per block that touches both sides."""
    if category is None:
        category = "sl2" if isinstance(p, Matching) else "so3"
    if category not in ("sl2", "so3"):
        raise TypeMismatch("partition_to_diagram is for sl2/so3")
    if category == "sl2" and any(len(b) != 2 for b in p.blocks):
        raise TypeMismatch("sl2 diagrams need a matching")
    block_of = p.block_of()
    bottom = list(range(1, p.k + 1))
    top = list(range(p.k + p.l, p.k, -1))
    cnt_b: dict[int, int] = {}
    cnt_t: dict[int, int] = {}
    for x in bottom:
        cnt_b[block_of[x]] = cnt_b.get(block_of[x], 0) + 1
    for x in top:
        cnt_t[block_of[x]] = cnt_t.get(block_of[x], 0) + 1
    steps_b, mid_b = _reduce_side(bottom, block_of, cnt_b, cnt_t)
    steps_t, mid_t = _reduce_side(top, block_of, cnt_t, cnt_b)
    if mid_b != mid_t:  # pragma: no cover - impossible for noncrossing input
        raise ValueError("partition is not planar")
    layers = []
    for kind, o in steps_b:
        layers += _merge_x(o) if kind == "merge" else [(o, kind)]
    for kind, o in reversed(steps_t):
        if kind == "merge":
            layers += _split_x(o)
        else:
            layers.append((o, {"cap": "cup", "tup": "tdown"}[kind]))
    d = LayeredDiagram(category, ("x",) * p.k, tuple(layers))
    d.validate()
    return d


def matching_to_diagram(m: PlanarPartition, category: str = "sl2") -> LayeredDiagram:
    return partition_to_diagram(m, category)


def basis(category: str, k: int, l: int) -> list[LayeredDiagram]:
    if category == "sl2":
        return [matching_to_diagram(m) for m in enumerate_matchings(k, l)]
    if category == "so3":
        return [partition_to_diagram(p) for p in enumerate_planar_partitions(k, l)]
    return gl2_basis(("x",) * k, ("x",) * l)


def basis_count(category: str, k: int, l: int) -> int:
    if category == "sl2":
        return len(enumerate_matchings(k, l))
    if category == "so3":
        return len(enumerate_planar_partitions(k, l))
    return len(gl2_basis(("x",) * k, ("x",) * l))


# GL2: phantom routing ----------------------------------------------------------

# each move: (domain at offset, codomain at offset, layers relative to offset)
GL2_MOVES: dict[str, tuple[str, str, list[tuple[int, str]]]] = {
    "conv_y": ("y", "xq", [(0, "tdown"), (2, "cap")]),
    "unconv_y": ("xq", "y", [(2, "cup'"), (0, "tup")]),
    "swap_px": ("px", "xp", [(2, "pcup"), (3, "cup'"), (1, "tup"), (2, "tdown"), (1, "cap'"), (0, "pcap")]),
    "swap_xp": ("xp", "px", [(0, "pcup'"), (1, "cup"), (2, "tup"), (1, "tdown"), (3, "cap"), (2, "pcap'")]),
    "swap_qx": ("qx", "xq", [(0, "cup"), (1, "tup"), (0, "tdown"), (2, "cap")]),
    "swap_xq": ("xq", "qx", [(2, "cup'"), (0, "tup"), (1, "tdown"), (0, "cap'")]),
    "cancel_pq": ("pq", "", [(0, "pcap")]),
    "cancel_qp": ("qp", "", [(0, "pcap'")]),
    "make_pq": ("", "pq", [(0, "pcup'")]),
    "make_qp": ("", "qp", [(0, "pcup")]),
    "merge": ("xx", "p", [(1, "cup"), (2, "pcup'"), (3, "cup"), (4, "tup"), (0, "cap"), (1, "cap'")]),
    "split": ("p", "xx", [(0, "cup'"), (3, "cup"), (4, "tdown"), (3, "cap'"), (2, "pcap"), (1, "cap'")]),
}

GL2_INVERSE = {
    "conv_y": "unconv_y",
    "swap_px": "swap_xp",
    "swap_qx": "swap_xq",
    "cancel_pq": "make_pq",
    "cancel_qp": "make_qp",
    "merge": "split",
}


def gl2_move_layers(move: str, offset: int) -> list[tuple[int, str]]:
    return [(offset + o, g) for o, g in GL2_MOVES[move][2]]


def _apply_move(word: list[str], move: str, offset: int) -> None:
    dom, cod, _ = GL2_MOVES[move]
    assert "".join(word[offset : offset + len(dom)]) == dom, (move, word, offset)
    word[offset : offset + len(dom)] = list(cod)


def _gl2_normalize(word: list[str]) -> list[tuple[str, int]]:
    """Moves taking a GL2 word to x^a followed by a homogeneous phantom tail."""
    moves: list[tuple[str, int]] = []

    def do(m, o):
        _apply_move(word, m, o)
        moves.append((m, o))

    i = 0
    while i < len(word):
        if word[i] == "y":
            do("conv_y", i)
        i += 1
    _settle_phantoms(word, do)
    return moves


def _settle_phantoms(word: list[str], do) -> None:
    changed = True
    while changed:
        changed = False
        for i in range(len(word) - 1):
            a, b = word[i], word[i + 1]
            if a in "pq" and b == "x":
                do("swap_px" if a == "p" else "swap_qx", i)
                changed = True
                break
            if (a, b) in (("p", "q"), ("q", "p")):
                do("cancel_pq" if a == "p" else "cancel_qp", i)
                changed = True
                break


def _charge(word) -> int:
    return sum({"x": 1, "y": -1, "p": 2, "q": -2}[a] for a in word)


def _gl2_strip_arcs(labels: list[int], tail: list[str], partner: dict[int, int], side: set[int]):
    """Remove same-side arcs innermost first, pushing the phantom each merge
    creates into the tail.  Returns the moves and the leftover labels."""
    word = ["x"] * len(labels) + list(tail)
    labels = list(labels)
    moves: list[tuple[str, int]] = []

    def do(m, o):
        _apply_move(word, m, o)
        moves.append((m, o))

    found = True
    while found:
        found = False
        for i in range(len(labels) - 1):
            a, b = labels[i], labels[i + 1]
            if partner[a] == b and b in side:
                do("merge", i)
                del labels[i : i + 2]
                pos = i
                while pos < len(labels):
                    do("swap_px", pos)
                    pos += 1
                if pos + 1 < len(word) and word[pos + 1] == "q":
                    do("cancel_pq", pos)
                found = True
                break
    return moves, labels


def gl2_basis(domain, codomain) -> list[LayeredDiagram]:
    """One diagram per crossingless matching of the usual strands.

    Phantom placement is fixed: every word is first brought to the shape
    x...x followed by phantoms (turning y into x with a phantom, and sliding
    phantoms to the right), arcs between two bottom (or two top) points are
    closed through a phantom-emitting vertex whose phantom is slid to the
    right end, and leftover phantoms are paired off.
    """
    dom = list(check_word("gl2", domain))
    cod = list(check_word("gl2", codomain))
    if _charge(dom) != _charge(cod):
        return []
    wa, wb = list(dom), list(cod)
    moves_a = _gl2_normalize(wa)
    moves_b = _gl2_normalize(wb)
    a = wa.count("x")
    b = wb.count("x")
    tail_a, tail_b = wa[a:], wb[b:]
    out = []
    for m in enumerate_matchings(a, b):
        partner = {}
        for x, y in m.blocks:
            partner[x], partner[y] = y, x
        bottom = list(range(1, a + 1))
        top = list(range(a + b, a, -1))
        mv_a, left_a = _gl2_strip_arcs(bottom, tail_a, partner, set(bottom))
        mv_b, left_b = _gl2_strip_arcs(top, tail_b, partner, set(top))
        assert len(left_a) == len(left_b)
        layers = []
        for mv, o in moves_a + mv_a:
            layers += gl2_move_layers(mv, o)
        for mv, o in reversed(moves_b + mv_b):
            layers += gl2_move_layers(GL2_INVERSE[mv], o)
        d = LayeredDiagram("gl2", tuple(dom), tuple(layers), tuple(cod))
        d.validate()
        out.append(d)
    return out


# structural checks ---------------------------------------------------------------


def diagram_graph(d: LayeredDiagram) -> dict:
    """Graph of a planar layered diagram.

    Nodes are boundary points (circle numbering) and trivalent vertices; each
    strand piece running between two nodes is an edge.  Returns a dict with
    ``nodes``, ``edges`` (list of node pairs), ``loops`` (closed components
    without nodes) and ``blocks`` (boundary points grouped by component).
    """
    words = d.words()
    gens = GENERATORS[d.category]
    k, l = len(words[0]), len(words[-1])
    piece_parent: dict[int, int] = {}
    ends: dict[int, list] = {}

    def root(p):
        while piece_parent[p] != p:
            piece_parent[p] = piece_parent[piece_parent[p]]
            p = piece_parent[p]
        return p

    def new_piece(endpoints):
        pid = len(piece_parent)
        piece_parent[pid] = pid
        ends[pid] = list(endpoints)
        return pid

    nodes = [("b", i) for i in range(1, k + l + 1)]
    edges = []
    loops = 0
    cur = [new_piece([("b", i + 1)]) for i in range(k)]
    for idx, (off, g) in enumerate(d.layers):
        dom, cod = gens[g]
        if g in CROSSINGS:
            raise ValueError("structural checks apply to planar diagrams")
        ins = [root(p) for p in cur[off : off + len(dom)]]
        if g in VERTICES:
            node = ("v", idx)
            nodes.append(node)
            for p in ins:
                ends[p].append(node)
                if len(ends[p]) == 2:
                    edges.append(tuple(ends[p]))
            new = [new_piece([node]) for _ in cod]
        elif len(dom) == 2:
            a, b = ins
            if a == b:
                loops += 1
            else:
                piece_parent[a] = b
                ends[b] = ends[b] + ends[a]
                if len(ends[b]) == 2:
                    edges.append(tuple(ends[b]))
            new = []
        else:
            pid = new_piece([])
            new = [pid, pid]
        cur = cur[:off] + new + cur[off + len(dom) :]
    for j, p in enumerate(cur):
        p = root(p)
        ends[p].append(("b", k + l - j))
        if len(ends[p]) == 2:
            edges.append(tuple(ends[p]))
    comp = {n: n for n in nodes}

    def find(x):
        while comp[x] != x:
            comp[x] = comp[comp[x]]
            x = comp[x]
        return x

    for a, b in edges:
        comp[find(a)] = find(b)
    groups: dict = {}
    for i in range(1, k + l + 1):
        groups.setdefault(find(("b", i)), []).append(i)
    n_comp = len({find(n) for n in nodes})
    return {
        "nodes": nodes,
        "edges": edges,
        "loops": loops,
        "components": n_comp,
        "blocks": sorted(tuple(g) for g in groups.values()),
    }


def is_forest(d: LayeredDiagram) -> bool:
    """No closed loops and no cycles: the diagram has no internal faces."""
    g = diagram_graph(d)
    return g["loops"] == 0 and len(g["edges"]) == len(g["nodes"]) - g["components"]


def circle(category: str) -> LayeredDiagram:
    if category == "gl2":
        return LayeredDiagram("gl2", (), ((0, "cup'"), (0, "cap")))
    return LayeredDiagram(category, (), ((0, "cup"), (0, "cap")))
