"""The main resolution loop: invariants, center selection, blow-up rounds.

Each round evaluates every active leaf (refined order, boundary refinement,
component decomposition with labels), takes the global invariant maximum
across leaves, and blows up exactly the leaves attaining it.  Horizontal
components take precedence; among them the oldest label wins (the newest
strategy exists only to reproduce the known non-terminating example).  A
leaf whose canonical chart state equals an ancestor's flags a loop.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .geometry import (
    BoundaryComponent,
    Chart,
    assign_labels,
    blow_up,
    decompose,
    is_weakly_permissible,
)
from .ideals import Ideal, intersect, is_unit_ideal
from .locus import log_refined_locus, minimal_pieces, refined_order
from .poly import Poly, parse_poly


@dataclass
class CenterRecord:
    ideal: Ideal
    label: int
    invariant: tuple
    entire_component: bool
    kind: str  # "horizontal" | "vertical(p)" | "preparation-point"
    component_labels: list = field(default_factory=list)


@dataclass
class TreeNode:
    chart: Chart
    node_id: int
    parent: int | None
    status: str  # "active" | "resolved" | "expanded"


@dataclass
class ResolutionTree:
    nodes: dict = field(default_factory=dict)
    edges: list = field(default_factory=list)  # (parent, child, chart_index, CenterRecord)
    strategy: str = "oldest"
    steps: int = 0
    outcome: str = "resolved"  # "resolved" | "budget" | "loop"

    def leaves(self, status="active"):
        return [n for n in self.nodes.values() if n.status == status]


def evaluate_chart(chart):
    """Fill nu, invariant, and labeled-component slots; return resolved flag.

    Label assignment for non-root charts happens in prepare_children; here
    components start unlabeled (None).
    """
    if is_unit_ideal(chart.x_ideal):
        chart.invariant = (0, 0, 0)
        chart.nu = (0, 0)
        chart.components = []
        return True
    nu, pieces = refined_order(chart)
    chart.nu = (nu.alpha, nu.delta)
    lognu, lpieces = log_refined_locus(nu, pieces, chart.boundary_pairs(), chart.x_ideal)
    chart.invariant = lognu.key()
    if lognu.delta == 1 and lognu.sigma == 0:
        chart.components = []
        return True
    comps = []
    for prime, piece in lpieces:
        J = piece + [Poly.const(chart.varlist, prime)] if prime else piece
        comps.extend(decompose(J))
    merged = minimal_pieces([(0, c.ideal) for c in comps])
    kept_ideals = [J for _p, J in merged]
    chart.components = [c for c in comps if any(c.ideal == J for J in kept_ideals)]
    return False


def find_center(chart, strategy="oldest"):
    """Choose the next center on a chart per the labeled-component rules."""
    comps = [c for c in chart.components if c.label is not None]
    if not comps:
        comps = chart.components
    if not comps:
        raise ValueError("chart has no components; already resolved?")
    horizontal = [c for c in comps if c.kind[0] == "horizontal"]
    pool = horizontal if horizontal else comps
    labels = [c.label or 0 for c in pool]
    target = min(labels) if strategy == "oldest" else max(labels)
    chosen = [c for c in pool if (c.label or 0) == target]
    return center_y(chosen, chart, target)


def center_y(chosen, chart, label):
    """One component of the chosen-label locus if it is weakly permissible,
    else the defect locus as a preparation center.

    When several same-label components are permissible together (regular,
    snc, pairwise disjoint) they are blown one per round, smallest
    contraction first (horizontal before vertical, small primes first);
    disjoint blow-ups commute, so the resolution is the same.
    """
    union = chosen[0].ideal
    for c in chosen[1:]:
        union = intersect(union, c.ideal)
    ok, defect = is_weakly_permissible(union, chart, components=chosen)
    if ok:
        def sort_key(c):
            from .ideals import contract_to_integers

            return (
                contract_to_integers(c.ideal),
                tuple(str(g) for g in c.ideal.groebner().elements),
            )

        first = min(chosen, key=sort_key)
        kind = first.kind
        kind_str = "horizontal" if kind[0] == "horizontal" else f"vertical({kind[1]})"
        return CenterRecord(
            ideal=first.ideal,
            label=label,
            invariant=chart.invariant,
            entire_component=True,
            kind=kind_str,
            component_labels=[(first.ideal, first.label or 0)],
        )
    return CenterRecord(
        ideal=defect,
        label=label,
        invariant=chart.invariant,
        entire_component=False,
        kind="preparation-point",
        component_labels=[],
    )


def prepare_children(parent, record, step):
    """Blow up and fully evaluate the children: epochs, labels, invariants."""
    children = blow_up(parent, record.ideal, step=step, center_record=record)
    out = []
    for idx, child in enumerate(children):
        resolved = evaluate_chart(child)
        if child.nu is not None and parent.nu is not None and child.nu < parent.nu:
            # strict refined-order drop: every surviving divisor becomes old
            for b in child.boundary:
                b.status = "old"
            resolved = evaluate_chart(child)  # sigma changes with the epoch
        if not resolved and child.components:
            if child.invariant < parent.invariant:
                for c in child.components:
                    c.label = step
            else:
                assign_labels(child.components, parent.components, record, child, step)
        out.append((idx, child, resolved))
    return out


def canonical_state(chart):
    """Rename variables positionally and return hashable canonical chart data."""
    std = tuple(f"v{i}" for i in range(len(chart.varlist)))

    def conv(ideal):
        J = Ideal(std, [Poly(std, dict(g.terms)) for g in ideal.gens])
        return tuple(str(g) for g in J.groebner().elements)

    return (
        len(std),
        conv(chart.ambient),
        conv(chart.x_ideal),
        frozenset((conv(b.ideal), b.status) for b in chart.boundary),
        chart.designated_prime,
    )


def resolve(
    x_gens,
    z_gens,
    ring,
    boundary=None,
    strategy="oldest",
    max_steps=64,
    jobs=1,
    engine="direct",
):
    """Resolve X inside Z over the integers; returns a ResolutionTree.

    boundary is a list of principal divisor generators (status old at start).
    Outcomes: "resolved", "budget" (max_steps exhausted), "loop" (a chart
    state recurred along its own branch).
    """
    ring = tuple(ring)

    def as_poly(g):
        return parse_poly(g, ring) if isinstance(g, str) else g

    x_gens = [as_poly(g) for g in x_gens]
    z_gens = [as_poly(g) for g in z_gens]
    boundary = [as_poly(b) for b in (boundary or [])]
    if engine == "petri":
        from .petri import run_main_net

        return run_main_net(x_gens, z_gens, ring, boundary, strategy, max_steps, jobs)
    chart = Chart.make(
        ring,
        z_gens,
        x_gens,
        [BoundaryComponent(Ideal(ring, [b]), 0, "old") for b in boundary],
    )
    return _resolve_direct(chart, strategy, max_steps, jobs)


def _resolve_direct(root, strategy, max_steps, jobs):
    tree = ResolutionTree(strategy=strategy)
    resolved = evaluate_chart(root)
    for c in root.components:
        c.label = 0
    root.chart_id = 0
    tree.nodes[0] = TreeNode(root, 0, None, "resolved" if resolved else "active")
    next_id = 1
    for step in range(1, max_steps + 1):
        active = tree.leaves("active")
        if not active:
            tree.outcome = "resolved"
            tree.steps = step - 1
            return tree
        global_max = max(n.chart.invariant for n in active)
        this_round = [n for n in active if n.chart.invariant == global_max]

        def work(node):
            rec = find_center(node.chart, strategy)
            return node, rec, prepare_children(node.chart, rec, step)

        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(work, this_round))
        else:
            results = [work(n) for n in this_round]

        loop_found = False
        for node, rec, children in results:
            node.status = "expanded"
            for idx, child, child_resolved in children:
                child.chart_id = next_id
                tree.nodes[next_id] = TreeNode(
                    child, next_id, node.node_id, "resolved" if child_resolved else "active"
                )
                tree.edges.append((node.node_id, next_id, idx, rec))
                next_id += 1
                if not child_resolved and _recurs_on_branch(tree, node.node_id, child):
                    tree.nodes[child.chart_id].status = "active"
                    loop_found = True
        tree.steps = step
        if loop_found:
            tree.outcome = "loop"
            return tree
    tree.outcome = "budget"
    return tree


def _recurs_on_branch(tree, parent_id, child):
    state = canonical_state(child)
    cursor = parent_id
    while cursor is not None:
        node = tree.nodes[cursor]
        if canonical_state(node.chart) == state:
            return True
        cursor = node.parent
    return False


# -- JSON serialization ---------------------------------------------------------


def tree_to_json(tree):
    nodes = []
    for nid in sorted(tree.nodes):
        n = tree.nodes[nid]
        ch = n.chart
        nodes.append(
            {
                "id": nid,
                "vars": list(ch.varlist),
                "ambient": [str(g) for g in ch.ambient.gens],
                "x_ideal": [str(g) for g in ch.x_ideal.gens],
                "boundary": [
                    {"ideal": [str(g) for g in b.ideal.gens], "birth": b.birth_step, "status": b.status}
                    for b in ch.boundary
                ],
                "prime": ch.designated_prime,
                "status": "resolved" if n.status == "resolved" else n.status,
            }
        )
    edges = []
    for parent, child, idx, rec in tree.edges:
        edges.append(
            {
                "parent": parent,
                "child": child,
                "chart_index": idx,
                "center": {
                    "ideal": [str(g) for g in rec.ideal.gens],
                    "label": rec.label,
                    "kind": rec.kind,
                    "invariant": list(rec.invariant),
                },
            }
        )
    return {
        "nodes": nodes,
        "edges": edges,
        "meta": {"strategy": tree.strategy, "steps": tree.steps, "outcome": tree.outcome},
    }


def chart_from_json(data):
    ring = tuple(data["vars"])
    ambient = [parse_poly(t, ring) for t in data["ambient"]]
    x_extra = [parse_poly(t, ring) for t in data["x_ideal"]]
    boundary = [
        BoundaryComponent(
            Ideal(ring, [parse_poly(t, ring) for t in b["ideal"]]), b["birth"], b["status"]
        )
        for b in data.get("boundary", [])
    ]
    chart = Chart.make(ring, ambient, x_extra, boundary, data.get("prime"))
    return chart


def chart_to_json(chart):
    return {
        "vars": list(chart.varlist),
        "ambient": [str(g) for g in chart.ambient.gens],
        "x_ideal": [str(g) for g in chart.x_ideal.gens],
        "boundary": [
            {"ideal": [str(g) for g in b.ideal.gens], "birth": b.birth_step, "status": b.status}
            for b in chart.boundary
        ],
        "prime": chart.designated_prime,
    }
