"""Colored Petri-net execution engine plus the resolution nets.

Transitions fire atomically: the engine serializes the enable-check and
token consumption while actions run (possibly concurrently under a worker
budget); actions are pure functions from input payloads to lists of output
payloads per output place.  The builders wire the algebra operations into
the five nets driving the resolution: the main loop, center finding,
interesting primes, maximal refined order, and the arithmetic
maximal-order locus.  A Cover/Extract/Remove fragment turns one list-token
into one token per element.
"""

from __future__ import annotations

import random
import threading
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from dataclasses import dataclass, field

from .errors import InternalError


@dataclass(frozen=True)
class Place:
    pid: str
    note: str = ""
    terminal: bool = False


@dataclass
class Transition:
    tid: str
    inputs: list
    outputs: list
    guard: object = None  # predicate over payload tuple
    action: object = None  # payloads -> {place: [payload, ...]}


@dataclass(frozen=True)
class Token:
    tok_id: int
    place: str
    payload: object


@dataclass
class Net:
    name: str
    places: dict = field(default_factory=dict)
    transitions: list = field(default_factory=list)

    def place(self, pid, note="", terminal=False):
        self.places[pid] = Place(pid, note, terminal)
        return pid

    def transition(self, tid, inputs, outputs, guard=None, action=None):
        t = Transition(tid, list(inputs), list(outputs), guard, action)
        self.transitions.append(t)
        return t


class Marking:
    """Multiset of tokens, kept per place in insertion order."""

    def __init__(self):
        self.by_place = {}
        self._next = 0

    def add(self, place, payload):
        tok = Token(self._next, place, payload)
        self._next += 1
        self.by_place.setdefault(place, []).append(tok)
        return tok

    def remove(self, token):
        self.by_place[token.place].remove(token)

    def tokens(self, place=None):
        if place is not None:
            return list(self.by_place.get(place, []))
        return [t for toks in self.by_place.values() for t in toks]

    def __len__(self):
        return len(self.tokens())


def _selections(net, marking, transition):
    """Deterministic enumeration of input-token selections (insertion order)."""
    pools = [marking.tokens(p) for p in transition.inputs]
    if any(not pool for pool in pools):
        return
    idx = [0] * len(pools)
    while True:
        sel = tuple(pool[i] for pool, i in zip(pools, idx))
        if len({t.tok_id for t in sel}) == len(sel):
            payloads = tuple(t.payload for t in sel)
            if transition.guard is None or transition.guard(*payloads):
                yield sel
        k = len(pools) - 1
        while k >= 0:
            idx[k] += 1
            if idx[k] < len(pools[k]):
                break
            idx[k] = 0
            k -= 1
        if k < 0:
            return


def enabled(net, marking):
    """All transitions with a satisfying token selection (the first each)."""
    out = []
    for t in net.transitions:
        sel = next(_selections(net, marking, t), None)
        if sel is not None:
            out.append((t, sel))
    return out


def fire(net, marking, transition, selection):
    """Atomic firing: consume the selection, append the action's outputs."""
    for tok in selection:
        if tok not in marking.by_place.get(tok.place, []):
            raise InternalError("stale selection")  # engine-internal retry signal
    for tok in selection:
        marking.remove(tok)
    payloads = tuple(t.payload for t in selection)
    produced = []
    outputs = transition.action(*payloads) if transition.action else {}
    for place in transition.outputs:
        for payload in outputs.get(place, []):
            produced.append(marking.add(place, payload))
    for place, extra in outputs.items():
        if place not in transition.outputs:
            raise InternalError(f"{transition.tid} emitted to undeclared place {place}")
    return produced


@dataclass
class RunResult:
    marking: Marking
    log: list
    stuck: bool = False

    def payloads(self, place):
        return [t.payload for t in self.marking.tokens(place)]


def run(net, initial, budget=1, rng=None):
    """Execute until no transition is enabled.

    initial: dict place -> list of payloads.  budget > 1 executes enabled
    firings concurrently (marking mutations serialized); rng randomizes the
    pick among enabled firings for confluence testing.
    """
    marking = Marking()
    for place, payloads in initial.items():
        for payload in payloads:
            marking.add(place, payload)
    log = []
    step = 0

    if budget <= 1:
        while True:
            ready = enabled(net, marking)
            if not ready:
                break
            t, sel = ready[0] if rng is None else rng.choice(ready)
            produced = fire(net, marking, t, sel)
            step += 1
            log.append(
                {
                    "step": step,
                    "fired": t.tid,
                    "consumed": [tok.tok_id for tok in sel],
                    "produced": [tok.tok_id for tok in produced],
                }
            )
    else:
        lock = threading.Lock()
        inflight = {}
        with ThreadPoolExecutor(max_workers=budget) as pool:
            while True:
                with lock:
                    ready = enabled(net, marking)
                    started = False
                    for t, sel in ready:
                        if any(tok.tok_id in inflight.get("consumed", set()) for tok in sel):
                            continue
                        for tok in sel:
                            marking.remove(tok)
                        inflight.setdefault("consumed", set()).update(
                            tok.tok_id for tok in sel
                        )
                        payloads = tuple(tok.payload for tok in sel)
                        fut = pool.submit(
                            t.action if t.action else (lambda *a: {}), *payloads
                        )
                        inflight[fut] = (t, sel)
                        started = True
                        if len([k for k in inflight if k != "consumed"]) >= budget:
                            break
                futures = [k for k in inflight if k != "consumed"]
                if not futures:
                    if not started:
                        break
                    continue
                done, _ = wait(futures, return_when=FIRST_COMPLETED)
                with lock:
                    for fut in done:
                        t, sel = inflight.pop(fut)
                        inflight["consumed"] -= {tok.tok_id for tok in sel}
                        outputs = fut.result() or {}
                        produced = []
                        for place in t.outputs:
                            for payload in outputs.get(place, []):
                                produced.append(marking.add(place, payload))
                        step += 1
                        log.append(
                            {
                                "step": step,
                                "fired": t.tid,
                                "consumed": [tok.tok_id for tok in sel],
                                "produced": [tok.tok_id for tok in produced],
                            }
                        )

    stuck = any(
        not net.places.get(tok.place, Place(tok.place)).terminal
        for tok in marking.tokens()
    )
    return RunResult(marking, log, stuck)


def format_log(log):
    lines = []
    for e in log:
        lines.append(
            f"step={e['step']} fired={e['fired']} "
            f"consumed={e['consumed']} produced={e['produced']}"
        )
    return "\n".join(lines)


def replay(net, initial, log):
    """Re-fire a recorded log sequentially; returns the final marking."""
    marking = Marking()
    tok_map = {}
    for place, payloads in initial.items():
        for payload in payloads:
            tok = marking.add(place, payload)
            tok_map[tok.tok_id] = tok
    transitions = {t.tid: t for t in net.transitions}
    for e in log:
        t = transitions[e["fired"]]
        sel = tuple(tok_map[i] for i in e["consumed"])
        produced = fire(net, marking, t, sel)
        for tok in produced:
            tok_map[tok.tok_id] = tok
    return marking


def canonical_payload(x):
    from .ideals import Ideal
    from .poly import Poly

    if isinstance(x, Ideal):
        return ("ideal", x.ring, tuple(str(g) for g in x.groebner().elements))
    if isinstance(x, Poly):
        return ("poly", x.ring, str(x))
    if isinstance(x, (list, tuple)):
        return tuple(canonical_payload(v) for v in x)
    if isinstance(x, set):
        return ("set",) + tuple(sorted(canonical_payload(v) for v in x))
    if isinstance(x, dict):
        return tuple(
            sorted((str(k), canonical_payload(v)) for k, v in x.items())
        )
    if hasattr(x, "varlist") and hasattr(x, "x_ideal"):
        from .resolver import canonical_state

        return ("chart",) + canonical_state(x)
    return x


def canonical_marking(marking):
    return tuple(
        sorted((tok.place, repr(canonical_payload(tok.payload))) for tok in marking.tokens())
    )


# -- Cover / Extract / Remove fragment --------------------------------------------


def cover_pattern(net, prefix, cover_action=None):
    """Add the list-splitting fragment; returns (p_in, p_out).

    One token on p_in carrying a list yields one p_out token per element and
    no residue on the intermediate list place.
    """
    p_in = net.place(f"{prefix}_in")
    p_list = net.place(f"{prefix}_L")
    p_out = net.place(f"{prefix}_out", terminal=True)
    net.transition(
        f"{prefix}Cover",
        [p_in],
        [p_list],
        action=lambda payload: {p_list: [list(cover_action(payload) if cover_action else payload)]},
    )
    net.transition(
        f"{prefix}Extract",
        [p_list],
        [p_list, p_out],
        guard=lambda lst: len(lst) > 0,
        action=lambda lst: {p_out: [lst[0]], p_list: [lst[1:]]},
    )
    net.transition(
        f"{prefix}Remove",
        [p_list],
        [],
        guard=lambda lst: len(lst) == 0,
        action=lambda lst: {},
    )
    return p_in, p_out


# -- net builders -------------------------------------------------------------------


def build_interesting_primes_net(use_normal_form=True):
    """The interesting-primes net: CapInt, Factor, Split, FormalDer, Drop,
    Glue & Collect, Heureka.  Input: one (I_Z, I_X) token on 'start'."""
    from .ideals import contract_to_integers, primefactors
    from .locus import ip_primes_of, ip_round, ip_start

    net = Net("interesting_primes")
    start = net.place("start")
    a = net.place("a", "(..., M, m)")
    b = net.place("b", "(..., I_temp, I_int)")
    d = net.place("d", "(..., {p_1..p_t})")
    e = net.place("e", "(..., S)")
    end = net.place("end", "(X, Z, B, S)", terminal=True)

    def cap_action(data):
        I_Z, I_X = data
        m = contract_to_integers(I_Z)
        return {a: [{"I_Z": I_Z, "I_X": I_X, "M": None, "m": m}]}

    net.transition("CapInt", [start], [a], action=cap_action)
    net.transition(
        "Factor",
        [a],
        [d, e],
        guard=lambda t: t["m"] != 0,
        action=lambda t: {
            d: [primefactors(t["m"])],
            e: [{"S": set(), "pending": 1}],
        },
    )

    def split_action(t):
        _kind, branches = ip_start(t["I_Z"], t["I_X"], use_normal_form)
        return {
            b: branches,
            e: [{"S": set(), "pending": len(branches)}],
        }

    net.transition("Split", [a], [b, e], guard=lambda t: t["m"] == 0, action=split_action)
    net.transition(
        "FormalDer",
        [b],
        [b],
        guard=lambda br: not br["done"],
        action=lambda br: {b: [ip_round(br)]},
    )
    net.transition(
        "Drop",
        [b],
        [d],
        guard=lambda br: br["done"],
        action=lambda br: {d: [ip_primes_of(br)]},
    )
    net.transition(
        "Glue&Collect",
        [d, e],
        [e],
        action=lambda primes, st: {
            e: [{"S": st["S"] | primes, "pending": st["pending"] - 1}]
        },
    )
    net.transition(
        "Heureka",
        [e],
        [end],
        guard=lambda st: st["pending"] == 0,
        action=lambda st: {end: [frozenset(st["S"])]},
    )
    return net


def run_interesting_primes_net(I_Z, I_X, use_normal_form=True, budget=1, rng=None):
    net = build_interesting_primes_net(use_normal_form)
    result = run(net, {"start": [(I_Z, I_X)]}, budget, rng)
    final = result.payloads("end")
    if len(final) != 1:
        raise InternalError("interesting-primes net did not converge to one token")
    return set(final[0]), result


def build_max_ord_arith_net():
    """The arithmetic maximal-order net: MaxOrd0, Split & Replace, HasseDer,
    Resubstitute & Eliminate, Glue & Collect, Drop, Clean-Up."""
    from .locus import (
        interesting_primes,
        max_ord_char0,
        moa_finish,
        moa_merge,
        moa_prime_tokens,
        moa_token_result,
        _x_only_gens,
    )
    from .locus import ArithOrderResult

    net = Net("max_ord_arith")
    start = net.place("start")
    a = net.place("a", "(..., maxord, MaxOrd)")
    b = net.place("b", "(p, J_X, J_Z, M)")
    c = net.place("c", "(DiffList, m)")
    d = net.place("d", "(..., maxord_new, MaxOrd_new)")
    e = net.place("e")
    end = net.place("end", terminal=True)

    def maxnull(data):
        I_Z, I_X, S = data
        if not _x_only_gens(I_Z, I_X):
            return {a: [{"I_Z": I_Z, "I_X": I_X, "S": [], "state": {"maxord0": 0, "pieces0": [], "per_prime": {}}, "final": True}]}
        char0 = max_ord_char0(I_Z, I_X)
        plist = sorted(interesting_primes(I_Z, I_X)) if S is None else sorted(S)
        state = {
            "maxord0": char0.maxord,
            "pieces0": [(0, char0.locus)] if char0.maxord >= 1 else [],
            "per_prime": {},
        }
        return {a: [{"I_Z": I_Z, "I_X": I_X, "S": plist, "state": state, "final": False}]}

    net.transition("MaxOrd0", [start], [a], action=maxnull)
    net.transition(
        "Clean-Up",
        [a],
        [end],
        guard=lambda t: t["final"] or not t["S"],
        action=lambda t: {end: [moa_finish(t["state"])]},
    )

    def split_replace(t):
        tokens = []
        for p in t["S"]:
            tokens.extend(moa_prime_tokens(t["I_Z"], t["I_X"], p))
        return {
            b: tokens,
            e: [{"state": t["state"], "pending": len(tokens)}],
        }

    net.transition(
        "Split&Replace",
        [a],
        [b, e],
        guard=lambda t: not t["final"] and bool(t["S"]),
        action=split_replace,
    )
    net.transition(
        "HasseDer",
        [b],
        [c],
        action=lambda tok: {c: [moa_token_result(tok)]},
    )
    net.transition(
        "Resubstitute&Eliminate",
        [c],
        [d],
        action=lambda res: {d: [res]},
    )
    net.transition(
        "Glue&Collect",
        [d, e],
        [e],
        action=lambda res, st: {
            e: [{"state": moa_merge(st["state"], res), "pending": st["pending"] - 1}]
        },
    )
    net.transition(
        "Drop",
        [e],
        [end],
        guard=lambda st: st["pending"] == 0,
        action=lambda st: {end: [moa_finish(st["state"])]},
    )
    return net


def run_max_ord_arith_net(I_Z, I_X, primes=None, budget=1, rng=None):
    net = build_max_ord_arith_net()
    result = run(net, {"start": [(I_Z, I_X, primes)]}, budget, rng)
    final = result.payloads("end")
    if len(final) != 1:
        raise InternalError("max-ord-arith net did not converge to one token")
    return final[0], result


def build_max_ref_ord_net():
    """The refined-order net: the MaxOrdArithm/Descent loop with gluing."""
    from .locus import descend_finish, descend_step

    net = Net("max_ref_ord")
    start = net.place("start")
    a = net.place("a", "(X_af, Z_af)")
    c = net.place("c")
    end = net.place("end", "(..., nu_max, MaxNu)", terminal=True)

    def down(data):
        I_Z, I_X, N = data
        from .locus import descend_start

        return {
            a: [descend_start(I_Z, I_X, N)],
            c: [{"results": [], "pending": 1, "I_X": I_X}],
        }

    net.transition("Down", [start], [a, c], action=down)

    def arith_or_descent(state):
        kind, payload = descend_step(state)
        if kind == "branches":
            return {a: payload, c: [("delta", len(payload) - 1)]}
        if kind == "report":
            return {c: [("report", payload)]}
        return {c: [("delta", -1)]}

    # MaxOrdArithm and Descent act on the same tokens: one transition runs
    # the arithmetic order computation, descending when the order is one
    net.transition("MaxOrdArithm/Descent", [a], [a, c], action=arith_or_descent)

    def glue(update, st):
        if not isinstance(st, dict):
            update, st = st, update
        out = dict(st)
        kind, payload = update
        if kind == "delta":
            out["pending"] = st["pending"] + payload
        else:
            out = dict(st)
            out["results"] = st["results"] + [payload]
            out["pending"] = st["pending"] - 1
        return {c: [out]}

    net.transition(
        "Glue&Collect",
        [c, c],
        [c],
        guard=lambda x, y: isinstance(x, tuple) != isinstance(y, tuple),
        action=glue,
    )
    net.transition(
        "Heureka",
        [c],
        [end],
        guard=lambda st: isinstance(st, dict) and st["pending"] == 0,
        action=lambda st: {end: [descend_finish(st["results"], st["I_X"])]},
    )
    return net


def run_max_ref_ord_net(I_Z, I_X, N, budget=1, rng=None):
    net = build_max_ref_ord_net()
    result = run(net, {"start": [(I_Z, I_X, N)]}, budget, rng)
    final = result.payloads("end")
    if len(final) != 1:
        raise InternalError("max-ref-ord net did not converge to one token")
    return final[0], result


def build_find_center_net(strategy="oldest"):
    """The center pipeline: InterestPrimes, MaxRefOrd, IntersecExc, Labeling,
    CenterY.  Input: one evaluated chart token; output: a CenterRecord."""
    from .locus import interesting_primes, log_refined_locus, refined_order

    net = Net("find_center")
    start = net.place("start", "(X, Z, B)")
    a = net.place("a", "(..., S)")
    b = net.place("b", "(..., nu_max, MaxNu)")
    c = net.place("c", "(..., lognu_max, OMaxNu)")
    d = net.place("d", "(..., Y)")
    end = net.place("end", "(..., C)", terminal=True)

    net.transition(
        "InterestPrimes",
        [start],
        [a],
        action=lambda chart: {
            a: [(chart, interesting_primes(chart.ambient, chart.x_ideal))]
        },
    )
    net.transition(
        "MaxRefOrd",
        [a],
        [b],
        action=lambda data: {b: [data[:1] + refined_order(data[0])]},
    )
    net.transition(
        "IntersecExc",
        [b],
        [c],
        action=lambda data: {
            c: [
                (data[0],)
                + log_refined_locus(
                    data[1], data[2], data[0].boundary_pairs(), data[0].x_ideal
                )
            ]
        },
    )

    def labeling(data):
        chart = data[0]
        comps = [x for x in chart.components]
        horizontal = [x for x in comps if x.kind[0] == "horizontal"]
        pool = horizontal if horizontal else comps
        labels = [x.label or 0 for x in pool]
        target = min(labels) if strategy == "oldest" else max(labels)
        return {d: [(chart, [x for x in pool if (x.label or 0) == target], target)]}

    net.transition("Labeling", [c], [d], action=labeling)

    def center(data):
        from .resolver import center_y

        chart, chosen, label = data
        return {end: [center_y(chosen, chart, label)]}

    net.transition("CenterY", [d], [end], action=center)
    return net


def run_find_center_net(chart, strategy="oldest", budget=1, rng=None):
    net = build_find_center_net(strategy)
    result = run(net, {"start": [chart]}, budget, rng)
    final = result.payloads("end")
    if len(final) != 1:
        raise InternalError("find-center net did not converge to one token")
    return final[0], result


def build_main_net(strategy="oldest", max_steps=64, jobs_hint=1):
    """The resolution main net: Init, FindCenter, Done & Glue, Dispatch,
    BlowUp, Split, Heureka.  The state token on place d serializes the
    round bookkeeping (the paper's initialization token)."""
    from .resolver import (
        ResolutionTree,
        TreeNode,
        canonical_state,
        evaluate_chart,
        find_center,
        prepare_children,
    )

    net = Net("main")
    start = net.place("start", "(X, Z, B)")
    a = net.place("a", "X_af")
    b = net.place("b", "(X_af, C_af)")
    blow = net.place("blow")
    cpl = net.place("c")
    dst = net.place("d")
    end = net.place("end", "ERS(X, Z, B)", terminal=True)

    def init(chart):
        resolved = evaluate_chart(chart)
        for comp in chart.components:
            comp.label = 0
        chart.chart_id = 0
        tree = ResolutionTree(strategy=strategy)
        tree.nodes[0] = TreeNode(chart, 0, None, "resolved" if resolved else "active")
        state = {"tree": tree, "pending": 1, "step": 0, "next_id": 1, "outcome": None}
        return {a: [(0, chart, resolved)], dst: [state]}

    net.transition("Init", [start], [a, dst], action=init)

    def find(data):
        nid, chart, resolved = data
        rec = None
        if not resolved:
            rec = find_center(chart, strategy)
        return {b: [(nid, chart, resolved, rec)]}

    net.transition("FindCenter", [a], [b], action=find)

    def glue(data, state):
        if isinstance(data, dict):
            data, state = state, data
        nid, chart, resolved, rec = data
        out = dict(state)
        out.setdefault("stash", [])
        out["stash"] = state.get("stash", []) + [(nid, chart, resolved, rec)]
        out["pending"] = state["pending"] - 1
        return {dst: [out]}

    net.transition(
        "Done&Glue",
        [b, dst],
        [dst],
        guard=lambda x, y: isinstance(x, tuple) != isinstance(y, tuple),
        action=glue,
    )

    def dispatch(state):
        tree = state["tree"]
        stash = sorted(state.get("stash", []), key=lambda s: s[0])
        for nid, chart, resolved, rec in stash:
            tree.nodes[nid].status = "resolved" if resolved else "active"
        if state["outcome"]:
            tree.outcome = state["outcome"]
            tree.steps = state["step"]
            return {end: [tree]}
        active = [(nid, chart, rec) for nid, chart, resolved, rec in stash if not resolved]
        if not active:
            tree.outcome = "resolved"
            tree.steps = state["step"]
            return {end: [tree]}
        if state["step"] >= max_steps:
            tree.outcome = "budget"
            tree.steps = state["step"]
            return {end: [tree]}
        global_max = max(chart.invariant for _nid, chart, _rec in active)
        this_round = [t for t in active if t[1].invariant == global_max]
        waiting = [t for t in active if t[1].invariant != global_max]
        out = dict(state)
        out["step"] = state["step"] + 1
        out["pending"] = len(this_round)
        out["stash"] = [(nid, chart, False, rec) for nid, chart, rec in waiting]
        # waiting leaves keep their evaluation; they re-enter next round
        out["waiting"] = out["stash"]
        out["stash"] = []
        return {
            blow: [(nid, chart, rec) for nid, chart, rec in this_round],
            dst: [out],
        }

    net.transition(
        "Dispatch",
        [dst],
        [blow, dst, end],
        guard=lambda st: isinstance(st, dict) and st["pending"] == 0,
        action=dispatch,
    )

    def blow_action(data):
        nid, chart, rec = data
        children = prepare_children(chart, rec, step=None)
        return {cpl: [(nid, chart, rec, children)]}

    net.transition("BlowUp", [blow], [cpl], action=blow_action)

    def split(data, state):
        if isinstance(data, dict):
            data, state = state, data
        nid, chart, rec, children = data
        tree = state["tree"]
        tree.nodes[nid].status = "expanded"
        out = dict(state)
        new_tokens = []
        loop_found = False
        for idx, child, resolved in children:
            child.chart_id = out["next_id"]
            tree.nodes[child.chart_id] = TreeNode(
                child, child.chart_id, nid, "resolved" if resolved else "active"
            )
            tree.edges.append((nid, child.chart_id, idx, rec))
            out["next_id"] += 1
            if not resolved and _recurs(tree, nid, child):
                loop_found = True
            new_tokens.append((child.chart_id, child, resolved))
        out["pending"] = state["pending"] - 1 + len(new_tokens)
        if loop_found:
            out["outcome"] = "loop"
        # re-inject waiting leaves exactly once, at the end of the round
        if out["pending"] - len(new_tokens) == 0 and out.get("waiting"):
            waiting = out.pop("waiting")
            out["pending"] += len(waiting)
            new_tokens.extend((nid2, ch2, False) for nid2, ch2, _r, _rec in waiting)
            out["stash"] = []
        return {a: new_tokens, dst: [out]}

    net.transition(
        "Split",
        [cpl, dst],
        [a, dst],
        guard=lambda x, y: isinstance(x, tuple) != isinstance(y, tuple),
        action=split,
    )

    def _recurs(tree, parent_id, child):
        state = canonical_state(child)
        cursor = parent_id
        while cursor is not None:
            node = tree.nodes[cursor]
            if canonical_state(node.chart) == state:
                return True
            cursor = node.parent
        return False

    net.transition(
        "Heureka",
        [dst],
        [end],
        guard=lambda st: isinstance(st, dict) and st.get("finished", False),
        action=lambda st: {end: [st["tree"]]},
    )
    return net


def run_main_net(x_gens, z_gens, ring, boundary, strategy, max_steps, jobs):
    from .geometry import BoundaryComponent, Chart
    from .ideals import Ideal
    from .resolver import renumber_tree

    ring = tuple(ring)
    chart = Chart.make(
        ring,
        z_gens,
        x_gens,
        [BoundaryComponent(Ideal(ring, [b]), 0, "old") for b in (boundary or [])],
    )
    net = build_main_net(strategy, max_steps, jobs)
    result = run(net, {"start": [chart]}, budget=max(1, jobs))
    final = result.payloads("end")
    if len(final) != 1:
        raise InternalError("main net did not finish with a single tree token")
    return renumber_tree(final[0])
