"""Minimum-weight perfect matching on general weighted graphs.

Primal-dual blossom method, specialised to the perfect-matching variant:
vertex potentials are unconstrained in sign, so the search either covers
every vertex or proves that no perfect matching exists.  The solver
maintains the LP dual throughout and returns it with the matching, which
makes the result independently checkable: `verify_certificate` confirms
optimality from the duals alone, without re-solving.

Dual bookkeeping (for edge e = (u, v) with weight w):

    reduced slack  pi_e = w - y_u - y_v + sum(z_B for blossoms B with e inside B)

Feasibility requires pi_e >= 0 and z_B >= 0; optimality additionally
requires matched edges tight (pi_e = 0) and every blossom with z_B > 0
full.  The dual objective sum(y) - sum(z_B * (|B|-1)/2) then equals the
matching weight, which is the certificate of minimality.

Internally vertex duals are stored doubled (dual2[v] = 2*y_v) so the
edge slack of cross-blossom edges is the round number
2*w - dual2[u] - dual2[v] and all dual adjustments use a single delta.
The dual adjustment evaluates every edge vectorially instead of keeping
per-blossom least-slack caches; at the sparse sizes this library feeds
the solver, one numpy pass per substage beats maintaining the caches.

`brute_force_min_matching` enumerates every perfect matching of small
graphs and is the independent oracle the solver is tested against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

__all__ = [
    "WeightedGraph",
    "Matching",
    "MatchingInfeasibleError",
    "CertificateError",
    "min_weight_perfect_matching",
    "brute_force_min_matching",
    "verify_certificate",
]

_FREE, _S, _T = 0, 1, 2
_BRUTE_FORCE_CAP = 16


class MatchingInfeasibleError(ValueError):
    """The graph admits no perfect matching."""


class CertificateError(AssertionError):
    """The dual certificate failed an optimality check."""


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected weighted graph given as a node count and an edge list."""

    node_count: int
    edges: tuple[tuple[int, int, float], ...]

    def __init__(self, node_count: int, edges: Iterable[tuple[int, int, float]]):
        canon = []
        seen: set[tuple[int, int]] = set()
        for (u, v, w) in edges:
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if not 0 <= u < node_count or not 0 <= v < node_count:
                raise ValueError(f"edge ({u}, {v}) out of range for {node_count} nodes")
            if not math.isfinite(w) or w < 0.0:
                raise ValueError(f"edge ({u}, {v}) weight must be finite and >= 0, got {w}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            canon.append((key[0], key[1], float(w)))
        canon.sort()
        object.__setattr__(self, "node_count", node_count)
        object.__setattr__(self, "edges", tuple(canon))


@dataclass(frozen=True)
class Matching:
    """A set of vertex-disjoint edges plus the dual certificate of the solve.

    `pairs` lists matched vertex pairs (u < v, sorted).  `vertex_duals` and
    `blossom_duals` carry the LP dual at termination; `blossom_duals` maps
    each surviving (possibly nested) blossom, given by its sorted leaf
    vertices, to its dual value.  Oracle results carry empty duals.
    """

    pairs: tuple[tuple[int, int], ...]
    weight: float
    vertex_duals: tuple[float, ...] = ()
    blossom_duals: tuple[tuple[tuple[int, ...], float], ...] = ()


class _Solver:
    """One solve's mutable state: matching, alternating forest, blossoms.

    Vertices double as trivial blossom ids 0..n-1; nontrivial blossoms take
    ids from n..2n-1 via a free-id pool.  Per stage the top-level blossoms
    carry S/T labels, a queue holds S-vertices awaiting their edge scan,
    and each substage either grows the forest along a tight edge or pumps
    slack out of the duals.
    """

    def __init__(self, graph: WeightedGraph):
        self.n = n = graph.node_count
        self.edges = list(graph.edges)
        m = len(self.edges)
        # vertex -> (edge id, other endpoint, 2*weight); 2w makes the scan's
        # slack arithmetic a pure subtraction against the doubled duals
        self.adj: list[list[tuple[int, int, float]]] = [[] for _ in range(n)]
        for k, (u, v, w) in enumerate(self.edges):
            self.adj[u].append((k, v, 2.0 * w))
            self.adj[v].append((k, u, 2.0 * w))
        self.eu = np.fromiter((e[0] for e in self.edges), np.int64, m)
        self.ev = np.fromiter((e[1] for e in self.edges), np.int64, m)
        self.ew2 = np.fromiter((2.0 * e[2] for e in self.edges), np.float64, m)

        self.mate = [-1] * n
        self.label = np.zeros(2 * n, dtype=np.int8)
        self.labeledge: list[tuple[int, int] | None] = [None] * (2 * n)
        self.inblossom = np.arange(n, dtype=np.int64)
        self.blossomparent = np.full(2 * n, -1, dtype=np.int64)
        self.blossombase = list(range(n)) + [-1] * n
        self.blossomchilds: list[list[int] | None] = [None] * (2 * n)
        self.blossomedges: list[list[tuple[int, int]] | None] = [None] * (2 * n)
        self.blossomdual = np.zeros(2 * n, dtype=np.float64)
        # nontrivial blossoms currently alive, as a mask so the dual
        # adjustment can treat the whole blossom population vectorially
        self.alive = np.zeros(2 * n, dtype=bool)
        # leaf vertex ids per blossom, cached as arrays: blossoms are
        # immutable between creation and expansion, and the hot paths
        # (relabeling, inblossom rewrites) touch every leaf
        self._vertex_ids = np.arange(n, dtype=np.int64)
        self.blossomleafarr: list[np.ndarray | None] = [None] * (2 * n)
        self.unused_ids = list(range(2 * n - 1, n - 1, -1))
        self.allowedge = bytearray(m)
        self.queue: list[int] = []

        # Tightness tolerance: float dual updates leave residues of this
        # order on edges that are tight in exact arithmetic (ubiquitous when
        # many edges share a weight, e.g. zero), and treating those residues
        # as slack would burn one dual adjustment per residue.  The final
        # weight then exceeds the true optimum by at most n/2 residues,
        # far inside the certificate tolerances.
        self.eps2 = float(self.ew2.max()) * 2.0**-40 if m else 0.0

        # y_v = half the cheapest incident weight keeps every edge slack
        # nonnegative and makes locally cheapest edges tight immediately.
        self.dual2 = np.zeros(n, dtype=np.float64)
        for v in range(n):
            if self.adj[v]:
                self.dual2[v] = min(t[2] for t in self.adj[v]) / 2.0

    # -- plain helpers -------------------------------------------------

    def slack2(self, k: int) -> float:
        # Twice the reduced slack; valid only for edges between distinct
        # top-level blossoms (no z terms apply there).
        u, v, w = self.edges[k]
        return 2.0 * w - self.dual2[u] - self.dual2[v]

    def leaf_arr(self, b: int) -> np.ndarray:
        if b < self.n:
            return self._vertex_ids[b : b + 1]
        return self.blossomleafarr[b]  # type: ignore[return-value]

    def blossom_leaves(self, b: int) -> Iterator[int]:
        return iter(self.leaf_arr(b).tolist())

    # -- forest growth -------------------------------------------------

    def assign_label(self, w: int, t: int, edge: tuple[int, int] | None) -> None:
        b = self.inblossom[w]
        self.label[w] = self.label[b] = t
        self.labeledge[w] = self.labeledge[b] = edge
        if t == _S:
            self.queue.extend(self.leaf_arr(b).tolist())
        else:
            # The base of a T-blossom is its only externally matched vertex;
            # its mate becomes an S-vertex one level deeper in the tree.
            base = self.blossombase[b]
            self.assign_label(self.mate[base], _S, (base, self.mate[base]))

    def scan_for_base(self, v: int, w: int) -> int:
        """Trace back from both endpoints of an S-S edge.

        Returns the base vertex of the new blossom when the traces meet,
        or -1 when they reach distinct roots (an augmenting path).
        """
        path = []
        base = -1
        while v != -1:
            b = self.inblossom[v]
            if self.label[b] & 4:
                base = self.blossombase[b]
                break
            path.append(b)
            self.label[b] = 5  # breadcrumb
            if self.labeledge[b] is None:
                v = -1  # reached a root
            else:
                v = self.labeledge[b][0]  # matched edge into the parent T-blossom
                b = self.inblossom[v]
                v = self.labeledge[b][0]  # unmatched edge into the grandparent
            if w != -1:
                v, w = w, v  # alternate the two traces
        for b in path:
            self.label[b] = _S
        return base

    def add_blossom(self, base: int, k: int) -> None:
        """Shrink the odd cycle through `base` closed by S-S edge k."""
        (v, w, _wt) = self.edges[k]
        bb = self.inblossom[base]
        bv = self.inblossom[v]
        bw = self.inblossom[w]
        b = self.unused_ids.pop()
        self.alive[b] = True
        self.blossombase[b] = base
        self.blossomparent[b] = -1
        self.blossomparent[bb] = b
        path: list[int] = []
        edgs: list[tuple[int, int]] = [(v, w)]
        while bv != bb:
            self.blossomparent[bv] = b
            path.append(bv)
            edgs.append(self.labeledge[bv])  # type: ignore[arg-type]
            v = self.labeledge[bv][0]  # type: ignore[index]
            bv = self.inblossom[v]
        path.append(bb)
        path.reverse()
        edgs.reverse()
        while bw != bb:
            self.blossomparent[bw] = b
            path.append(bw)
            le = self.labeledge[bw]
            edgs.append((le[1], le[0]))  # type: ignore[index]
            w = self.labeledge[bw][0]  # type: ignore[index]
            bw = self.inblossom[w]
        self.blossomchilds[b] = path
        self.blossomedges[b] = edgs
        self.label[b] = _S
        self.labeledge[b] = self.labeledge[bb]
        self.blossomdual[b] = 0.0
        leaves = np.concatenate([self.leaf_arr(c) for c in path])
        self.blossomleafarr[b] = leaves
        # Former T-vertices are S-vertices now; they still need a scan.
        was_t = self.label[self.inblossom[leaves]] == _T
        self.queue.extend(leaves[was_t].tolist())
        self.inblossom[leaves] = b

    def expand_blossom(self, b: int, endstage: bool) -> None:
        """Dissolve blossom b; mid-stage (T-blossom at z=0) relabels children.

        Iterative via a generator stack: nesting depth can reach n/2, which
        would overflow the interpreter's recursion limit on large inputs.
        """

        def _recurse(b: int, endstage: bool) -> Iterator[int]:
            for s in self.blossomchilds[b]:  # type: ignore[union-attr]
                self.blossomparent[s] = -1
                if s < self.n:
                    self.inblossom[s] = s
                elif endstage and self.blossomdual[s] == 0.0:
                    yield s
                else:
                    self.inblossom[self.blossomleafarr[s]] = s
            if (not endstage) and self.label[b] == _T:
                # Relabel along the even alternating path from the entry
                # child to the base; everything else becomes free.
                entrychild = self.inblossom[self.labeledge[b][1]]  # type: ignore[index]
                childs = self.blossomchilds[b]  # type: ignore[assignment]
                edgs = self.blossomedges[b]  # type: ignore[assignment]
                j = childs.index(entrychild)
                if j & 1:
                    j -= len(childs)
                    jstep = 1
                else:
                    jstep = -1
                v, w = self.labeledge[b]  # type: ignore[misc]
                while j != 0:
                    if jstep == 1:
                        p, q = edgs[j]
                    else:
                        q, p = edgs[j - 1]
                    self.label[w] = _FREE
                    self.label[q] = _FREE
                    self.assign_label(w, _T, (v, w))
                    self.allowedge[self._edge_id(p, q)] = 1
                    j += jstep
                    if jstep == 1:
                        v, w = edgs[j]
                    else:
                        w, v = edgs[j - 1]
                    self.allowedge[self._edge_id(v, w)] = 1
                    j += jstep
                bw = childs[j]
                self.label[w] = self.label[bw] = _T
                self.labeledge[w] = self.labeledge[bw] = (v, w)
                j += jstep
                while childs[j] != entrychild:
                    bv = childs[j]
                    if self.label[bv] == _S:
                        j += jstep
                        continue
                    reached = -1
                    for leaf in self.blossom_leaves(bv):
                        if self.label[leaf] != _FREE:
                            reached = leaf
                            break
                    if reached != -1:
                        self.label[reached] = _FREE
                        self.label[self.mate[self.blossombase[bv]]] = _FREE
                        self.assign_label(reached, _T, self.labeledge[reached])
                    j += jstep
            self.label[b] = _FREE
            self.labeledge[b] = None
            self.blossomchilds[b] = None
            self.blossomedges[b] = None
            self.blossombase[b] = -1
            self.blossomdual[b] = 0.0
            self.blossomleafarr[b] = None
            self.alive[b] = False
            self.unused_ids.append(b)

        stack = [_recurse(b, endstage)]
        while stack:
            for s in stack[-1]:
                stack.append(_recurse(s, endstage))
                break
            else:
                stack.pop()

    def _edge_id(self, u: int, v: int) -> int:
        for (k, other, _w2) in self.adj[u]:
            if other == v:
                return k
        raise AssertionError(f"no edge between {u} and {v}")

    # -- augmentation ---------------------------------------------------

    def augment_blossom(self, b: int, v: int) -> None:
        """Rotate b's internal matching so that v becomes its base."""

        def _recurse(b: int, v: int) -> Iterator[tuple[int, int]]:
            t = v
            while self.blossomparent[t] != b:
                t = self.blossomparent[t]
            if t >= self.n:
                yield (t, v)
            childs = self.blossomchilds[b]  # type: ignore[assignment]
            edgs = self.blossomedges[b]  # type: ignore[assignment]
            i = j = childs.index(t)
            if i & 1:
                j -= len(childs)
                jstep = 1
            else:
                jstep = -1
            while j != 0:
                j += jstep
                t = childs[j]
                if jstep == 1:
                    w, x = edgs[j]
                else:
                    x, w = edgs[j - 1]
                if t >= self.n:
                    yield (t, w)
                j += jstep
                t = childs[j]
                if t >= self.n:
                    yield (t, x)
                self.mate[w] = x
                self.mate[x] = w
            self.blossomchilds[b] = childs[i:] + childs[:i]
            self.blossomedges[b] = edgs[i:] + edgs[:i]
            self.blossombase[b] = self.blossombase[self.blossomchilds[b][0]]  # type: ignore[index]

        stack = [_recurse(b, v)]
        while stack:
            for args in stack[-1]:
                stack.append(_recurse(*args))
                break
            else:
                stack.pop()

    def augment_matching(self, v: int, w: int) -> None:
        """Flip matched/unmatched edges along the path between two roots."""
        for (s, j) in ((v, w), (w, v)):
            while True:
                bs = self.inblossom[s]
                if bs >= self.n:
                    self.augment_blossom(bs, s)
                self.mate[s] = j
                if self.labeledge[bs] is None:
                    break  # reached an exposed root
                t = self.labeledge[bs][0]  # type: ignore[index]
                bt = self.inblossom[t]
                s, j = self.labeledge[bt]  # type: ignore[misc]
                if bt >= self.n:
                    self.augment_blossom(bt, j)
                self.mate[j] = s

    # -- stages ----------------------------------------------------------

    def greedy_init(self) -> None:
        # Dual ascent sweeps: lift each vertex potential until its cheapest
        # incident edge is tight.  A lift at v is by v's minimum slack, so
        # every other slack stays nonnegative; feasibility is preserved and
        # tight edges multiply.
        dual2 = self.dual2
        for _ in range(2):
            for v in range(self.n):
                adj = self.adj[v]
                if adj:
                    d2v = dual2[v]
                    s = min(ew2 - dual2[u] - d2v for (_k, u, ew2) in adj)
                    if s > 0.0:
                        dual2[v] = d2v + s
        # Matching tight edges up front removes most stages on benign inputs.
        mate = self.mate
        eps2 = self.eps2
        for k, (u, v, w) in enumerate(self.edges):
            if mate[u] == -1 and mate[v] == -1 and 2.0 * w - dual2[u] - dual2[v] <= eps2:
                mate[u] = v
                mate[v] = u

    def _dual_adjust(self) -> tuple[int, int]:
        """Pick the binding dual constraint, apply the step, return the action.

        Returns (deltatype, payload): payload is the newly tight edge id for
        types 2 and 3, the blossom to expand for type 4.  Raises when no
        constraint binds, which proves there is no perfect matching.
        """
        label = self.label
        tops = self.alive & (self.blossomparent == -1)
        t_tops = tops & (label == _T)
        if t_tops.any():
            # A T-blossom whose dual is already (numerically) zero binds at
            # delta = 0; expand it without paying for the edge scans.
            # argmax on the mask picks the lowest id for determinism.
            zmask = t_tops & (self.blossomdual <= self.eps2)
            if zmask.any():
                return 4, int(np.argmax(zmask))

        delta = math.inf
        deltatype = -1
        payload = -1
        if self.ew2.size:
            top_u = self.inblossom[self.eu]
            top_v = self.inblossom[self.ev]
            lab_u = label[top_u]
            lab_v = label[top_v]
            cross = top_u != top_v
            slack = self.ew2 - self.dual2[self.eu] - self.dual2[self.ev]
            # type 2: an edge from an S-blossom to a free blossom becomes tight
            m2 = cross & (((lab_u == _S) & (lab_v == _FREE)) | ((lab_v == _S) & (lab_u == _FREE)))
            s2 = np.where(m2, slack, math.inf)
            k = int(np.argmin(s2))
            d = float(s2[k])
            if d < delta:
                delta, deltatype, payload = d, 2, k
            # type 3: an edge between two S-blossoms becomes tight (half
            # rate: both endpoint duals rise)
            m3 = cross & (lab_u == _S) & (lab_v == _S)
            s3 = np.where(m3, slack, math.inf)
            k = int(np.argmin(s3))
            d = float(s3[k]) / 2.0
            if d < delta:
                delta, deltatype, payload = d, 3, k
        # type 4: a T-blossom's dual hits zero and it must be expanded;
        # argmin's first-minimum rule breaks ties toward the lowest id
        if t_tops.any():
            z4 = np.where(t_tops, self.blossomdual, math.inf)
            b = int(np.argmin(z4))
            z = float(z4[b])
            if z < delta:
                delta, deltatype, payload = z, 4, b

        if deltatype == -1:
            # The S-side duals could rise forever without creating a tight
            # edge: the deficiency witness that no perfect matching exists.
            raise MatchingInfeasibleError("graph admits no perfect matching")

        # Edges admitted at the tightness tolerance can sit at slightly
        # negative slack; never step the duals backwards for them.
        delta = max(delta, 0.0)
        vlab = label[self.inblossom]
        self.dual2[vlab == _S] += delta
        self.dual2[vlab == _T] -= delta
        self.blossomdual[tops & (label == _S)] += delta
        self.blossomdual[t_tops] = np.maximum(self.blossomdual[t_tops] - delta, 0.0)
        return deltatype, payload

    def run_stage(self) -> None:
        """Grow the forest until one augmentation; raise if duals prove infeasibility."""
        n = self.n
        self.label[:] = _FREE
        self.labeledge = [None] * (2 * n)
        self.allowedge = bytearray(len(self.allowedge))
        self.queue.clear()
        mate = self.mate
        inblossom = self.inblossom
        label = self.label
        dual2 = self.dual2
        allowedge = self.allowedge
        for v in range(n):
            if mate[v] == -1 and label[inblossom[v]] == _FREE:
                self.assign_label(v, _S, None)

        queue = self.queue
        eps2 = self.eps2
        while True:
            while queue:
                v = queue.pop()
                d2v = dual2[v]
                bv = inblossom[v]
                for (k, w2, ew2) in self.adj[v]:
                    bw = inblossom[w2]
                    if bv == bw:
                        continue
                    allowed = allowedge[k]
                    if not allowed and ew2 - d2v - dual2[w2] <= eps2:
                        allowed = allowedge[k] = 1
                    if allowed:
                        lw = label[bw]
                        if lw == _FREE:
                            self.assign_label(w2, _T, (v, w2))
                        elif lw == _S:
                            base = self.scan_for_base(v, w2)
                            if base == -1:
                                self.augment_matching(v, w2)
                                return
                            self.add_blossom(base, k)
                            bv = inblossom[v]
                        elif label[w2] == _FREE:
                            # Unreached vertex inside a T-blossom: remember the
                            # reaching edge for relabeling on expansion.
                            label[w2] = _T
                            self.labeledge[w2] = (v, w2)

            deltatype, payload = self._dual_adjust()
            if deltatype == 2:
                self.allowedge[payload] = 1
                (u, v, _wt) = self.edges[payload]
                queue.append(u if label[inblossom[u]] == _S else v)
            elif deltatype == 3:
                self.allowedge[payload] = 1
                queue.append(self.edges[payload][0])
            else:
                self.expand_blossom(payload, endstage=False)

    def solve(self) -> Matching:
        n = self.n
        if n % 2 == 1:
            raise MatchingInfeasibleError("odd number of nodes")
        if n > 0:
            self.greedy_init()
            while any(m == -1 for m in self.mate):
                self.run_stage()
                # A stage ends with an augmentation; S-blossoms that gained no
                # dual weight carry no constraint and are dissolved.
                for b in np.nonzero(self.alive)[0].tolist():
                    if (
                        self.blossomchilds[b] is not None
                        and self.blossomparent[b] == -1
                        and self.label[b] == _S
                        and self.blossomdual[b] == 0.0
                    ):
                        self.expand_blossom(b, endstage=True)

        pair_weight = {(u, v): w for (u, v, w) in self.edges}
        pairs = sorted((v, int(self.mate[v])) for v in range(n) if v < self.mate[v])
        weight = sum(pair_weight[p] for p in pairs)
        blossoms = tuple(
            (tuple(int(x) for x in sorted(self.blossom_leaves(b))), float(self.blossomdual[b]))
            for b in np.nonzero(self.alive)[0].tolist()
        )
        return Matching(
            pairs=tuple(pairs),
            weight=weight,
            vertex_duals=tuple(float(d) / 2.0 for d in self.dual2),
            blossom_duals=blossoms,
        )


def min_weight_perfect_matching(g: WeightedGraph) -> Matching:
    """Minimum-total-weight matching covering every node of `g`.

    Deterministic for a fixed edge list (ties break toward the
    lexicographically smallest canonical edge order).  Raises
    MatchingInfeasibleError when no perfect matching exists.
    """
    return _Solver(g).solve()


def brute_force_min_matching(g: WeightedGraph) -> Matching:
    """Exhaustive minimum-weight perfect matching; oracle for small graphs.

    Enumerates every perfect matching by always matching the lowest
    unmatched node next.  Returns a Matching without duals.
    """
    n = g.node_count
    if n > _BRUTE_FORCE_CAP:
        raise ValueError(f"brute force capped at {_BRUTE_FORCE_CAP} nodes, got {n}")
    if n % 2 == 1:
        raise MatchingInfeasibleError("odd number of nodes")
    adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for (u, v, w) in g.edges:
        adj[u].append((v, w))
        adj[v].append((u, w))

    best_weight = math.inf
    best_pairs: list[tuple[int, int]] | None = None
    matched = [False] * n
    chosen: list[tuple[int, int]] = []

    def recurse(acc: float) -> None:
        nonlocal best_weight, best_pairs
        u = next((v for v in range(n) if not matched[v]), -1)
        if u == -1:
            if acc < best_weight:
                best_weight = acc
                best_pairs = list(chosen)
            return
        matched[u] = True
        for (v, w) in adj[u]:
            if not matched[v]:
                matched[v] = True
                chosen.append((u, v) if u < v else (v, u))
                recurse(acc + w)
                chosen.pop()
                matched[v] = False
        matched[u] = False

    recurse(0.0)
    if best_pairs is None:
        raise MatchingInfeasibleError("graph admits no perfect matching")
    return Matching(pairs=tuple(sorted(best_pairs)), weight=best_weight)


def verify_certificate(g: WeightedGraph, m: Matching, tol: float = 1e-9) -> None:
    """Check m's duals prove optimality for g; raise CertificateError if not.

    Checks, at tolerance `tol` scaled by the largest edge weight:
      1. the matching is perfect and uses only edges of g;
      2. blossom duals are nonnegative;
      3. every edge has nonnegative reduced slack;
      4. matched edges are tight;
      5. blossoms with positive dual are full;
      6. the dual objective equals the matching weight.

    The check is independent of the solver's internals: it evaluates the
    LP conditions directly from the returned numbers.
    """
    n = g.node_count
    scale = max([1.0] + [abs(w) for (_u, _v, w) in g.edges])
    eps = tol * scale

    mate: dict[int, int] = {}
    for (u, v) in m.pairs:
        if u in mate or v in mate:
            raise CertificateError(f"vertex repeated in matching pairs near ({u}, {v})")
        mate[u] = v
        mate[v] = u
    if len(mate) != n:
        raise CertificateError(f"matching covers {len(mate)} of {n} vertices")
    if len(m.vertex_duals) != n:
        raise CertificateError("vertex dual vector has wrong length")

    pair_weight = {(u, v): w for (u, v, w) in g.edges}
    total = 0.0
    for (u, v) in m.pairs:
        if (u, v) not in pair_weight:
            raise CertificateError(f"matched pair ({u}, {v}) is not an edge")
        total += pair_weight[(u, v)]
    if abs(total - m.weight) > eps * max(1, n):
        raise CertificateError(f"stated weight {m.weight} != recomputed {total}")

    y = m.vertex_duals
    blossoms = [(frozenset(leaves), z) for (leaves, z) in m.blossom_duals]
    for (leaves, z) in blossoms:
        if z < -eps:
            raise CertificateError(f"negative blossom dual {z}")
        if len(leaves) % 2 == 0 or len(leaves) < 3:
            raise CertificateError(f"blossom must span an odd set of >= 3 vertices, got {len(leaves)}")

    for (u, v, w) in g.edges:
        slack = w - y[u] - y[v]
        for (leaves, z) in blossoms:
            if u in leaves and v in leaves:
                slack += z
        if slack < -eps:
            raise CertificateError(f"edge ({u}, {v}) has negative reduced slack {slack}")
        if mate.get(u) == v and abs(slack) > eps:
            raise CertificateError(f"matched edge ({u}, {v}) is not tight (slack {slack})")

    for (leaves, z) in blossoms:
        if z > eps:
            inside = sum(1 for (u, v) in m.pairs if u in leaves and v in leaves)
            if inside != (len(leaves) - 1) // 2:
                raise CertificateError(
                    f"blossom with dual {z} is not full ({inside} internal matched edges)"
                )

    dual_obj = sum(y) - sum(z * ((len(leaves) - 1) // 2) for (leaves, z) in blossoms)
    if abs(dual_obj - m.weight) > eps * max(1, n):
        raise CertificateError(
            f"dual objective {dual_obj} != matching weight {m.weight}"
        )
