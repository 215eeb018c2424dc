"""Command line front end: ``orbidouble {inertia,simples,verify,fusion}``.

Input is one JSON document describing a group, an action and optional
modules, phi-families and an atlas; see the README for the schema. Reports
are written as sorted JSON or as plain text tables. Exit codes: 0 success,
1 a verification suite failed, 2 malformed input.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from .atlas import (Atlas, Chart, ChartMorphism, check_descent_panel, check_double_panel,
                    chartwise_double_counts, inertia_atlas, validate_atlas)
from .double import (HalfBraidedModule, double_braiding, double_hom_space, double_tensor,
                     double_unit, enumerate_half_braidings, fusion_data, hexagon_defects,
                     is_half_braided_iso, oracle_bits, round_trip_double, round_trip_inertia,
                     theta, theta_families_on, theta_monoidal_iso,
                     verify_half_braiding)
from .errors import (InvariantError, MismatchError, NonSplittingFieldError,
                     SplittingFailedError)
from .groups import (FiniteGroup, GroupHom, is_splitting_prime, permutation_group,
                     splitting_prime)
from .gsets import EquivariantMap, GroupAction, InertiaAction, double_inertia
from .modules import (EquivariantModule, construct_simples, count_simples, direct_sum,
                      make_module, projection_iso, random_module)
from .rings import compare_with_inertia, fixed_point_dims, ring_B


class InputError(Exception):
    """The input document is malformed or violates an invariant."""


@dataclass
class Job:
    group: FiniteGroup
    action: GroupAction
    prime: int
    modules: list[EquivariantModule]
    half_braidings: list[HalfBraidedModule]
    atlas: Atlas | None
    seed: int
    trials: int
    budget_bits: float


# -- input ---------------------------------------------------------------------------------


def parse_group(spec: dict) -> FiniteGroup:
    if "table" in spec:
        return FiniteGroup(spec["table"], name=spec.get("name"))
    if "permutations" in spec:
        return permutation_group(spec["permutations"], spec.get("degree"), name=spec.get("name"))
    raise InputError("group needs a 'table' or 'permutations' entry")


def parse_action(group: FiniteGroup, spec: Any) -> GroupAction:
    if spec == "point":
        return GroupAction.point(group)
    if spec == "natural":
        return GroupAction.natural(group)
    if isinstance(spec, dict) and "table" in spec:
        return GroupAction(group, spec["table"], spec.get("labels"))
    if isinstance(spec, dict) and "generator_images" in spec:
        images = {int(k): v for k, v in spec["generator_images"].items()}
        return GroupAction.from_generator_images(group, images, int(spec["size"]))
    raise InputError("action must be 'point', 'natural', or have 'table' / 'generator_images'")


def parse_module(action: GroupAction, p: int, spec: dict) -> EquivariantModule:
    return make_module(action, p, spec["dims"], spec["rho"])


def parse_half_braiding(action: GroupAction, p: int, modules: list[EquivariantModule],
                        spec: dict) -> HalfBraidedModule:
    ref = spec["module"]
    M = modules[ref] if isinstance(ref, int) else parse_module(action, p, ref)
    phi = {(int(e["h"]), int(e["x"])): e["matrix"] for e in spec["phi"]}
    return HalfBraidedModule(M, phi, check=False)


def parse_atlas(base: GroupAction, spec: dict) -> Atlas:
    charts = []
    for c in spec["charts"]:
        grp = parse_group(c["group"]) if "group" in c else base.group
        local = parse_action(grp, c.get("action", "point"))
        emb = c["embed"]
        gamma = GroupHom(grp, base.group, emb.get("gamma", list(range(grp.order))))
        charts.append(Chart(local, EquivariantMap(local, base, emb["alpha"], gamma), c.get("name")))
    morphisms = []
    for m in spec.get("morphisms", []):
        s, t = int(m["source"]), int(m["target"])
        gamma = GroupHom(charts[s].local.group, charts[t].local.group,
                         m.get("gamma", list(range(charts[s].local.group.order))))
        fmap = EquivariantMap(charts[s].local, charts[t].local, m["alpha"], gamma)
        theta_ = m.get("theta", [base.group.identity] * charts[s].local.size)
        morphisms.append(ChartMorphism(charts, s, t, fmap, theta_))
    return Atlas(base, charts, morphisms)


def load_job(args: argparse.Namespace) -> Job:
    try:
        with open(args.input) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read input: {exc}") from None
    try:
        group = parse_group(doc["group"])
        action = parse_action(group, doc.get("action", "point"))
        p = args.prime if args.prime is not None else doc.get("prime")
        if p is None:
            p = splitting_prime(group)
        elif not is_splitting_prime(group, int(p)):
            raise InputError(f"{p} is not a splitting prime for a group of order {group.order} "
                             f"and exponent {group.exponent}")
        p = int(p)
        modules = [parse_module(action, p, m) for m in doc.get("modules", [])]
        hbs = [parse_half_braiding(action, p, modules, h) for h in doc.get("half_braidings", [])]
        atlas = parse_atlas(action, doc["atlas"]) if "atlas" in doc else None
    except InvariantError as exc:
        raise InputError(f"invariant '{exc.invariant}' violated, witness {exc.witness!r}") from None
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise InputError(f"malformed input: {exc!r}") from None
    return Job(group, action, p, modules, hbs, atlas, args.seed, args.trials, args.budget_bits)


# -- commands --------------------------------------------------------------------------------


def _orbit_table(action: GroupAction) -> list[dict]:
    return [{"points": list(orb), "stabilizer_order": len(action.stabilizer_elements(orb[0]))}
            for orb in action.orbits]


def cmd_inertia(job: Job) -> tuple[dict, int]:
    inert = InertiaAction(job.action)
    di = double_inertia(job.action, inert)
    report: dict[str, Any] = {
        "group_order": job.group.order,
        "base": {"points": job.action.size, "orbits": _orbit_table(job.action)},
        "inertia": {"pairs": [list(pr) for pr in inert.pairs], "orbits": _orbit_table(inert)},
        "double_inertia_size": len(di.triples),
    }
    if job.atlas is not None:
        ia = inertia_atlas(job.atlas)
        report["inertia_atlas"] = {
            "charts": [[list(pr) for pr in c.local.pairs] for c in ia.charts],
            "valid": validate_atlas(ia).passed,
        }
    return report, 0


def _double_certificate(inert: InertiaAction, p: int) -> dict:
    simples = construct_simples(inert, p)
    doubles = [theta(S) for S in simples]
    valid = all(not D.violations() for D in doubles)
    distinct = all(len(double_hom_space(a, b)) == (1 if i == j else 0)
                   for i, a in enumerate(doubles) for j, b in enumerate(doubles))
    round_trips = all(round_trip_inertia(S).is_certified_iso() for S in simples)
    return {"count": len(doubles), "phi_families_valid": valid,
            "pairwise_distinct_and_simple": distinct, "round_trips_certified": round_trips}


def cmd_simples(job: Job) -> tuple[dict, int]:
    inert = InertiaAction(job.action)
    cert = _double_certificate(inert, job.prime)
    report = {
        "prime": job.prime,
        "base": count_simples(job.action, job.prime),
        "inertia": count_simples(inert, job.prime),
        "double": cert["count"],
        "certificate": cert,
    }
    ok = cert["phi_families_valid"] and cert["pairwise_distinct_and_simple"] and \
        cert["round_trips_certified"]
    return report, 0 if ok else 1


def _suite(name: str, fn: Callable[[], tuple[str, Any]]) -> dict:
    try:
        status, detail = fn()
    except (InvariantError, MismatchError, SplittingFailedError) as exc:
        status, detail = "FAIL", f"{type(exc).__name__}: {exc}"
    return {"name": name, "status": status, "detail": detail}


def _verify_suites(job: Job) -> list[dict]:
    p, act = job.prime, job.action
    inert = InertiaAction(act)
    simples_i = construct_simples(inert, p)
    simples_b = construct_simples(act, p)
    randoms = [random_module(inert, 2, job.seed + k, p) for k in range(job.trials)]
    doubles = [theta(S) for S in simples_i]
    rng = np.random.default_rng(job.seed)

    def axioms():
        bad = []
        for n, D in enumerate(doubles + [theta(M) for M in randoms]):
            rep = verify_half_braiding(D, panel=list(simples_b), seed=job.seed)
            if not rep:
                bad.append({"module": n, "failed": rep.names()})
        return ("PASS" if not bad else "FAIL"), {"checked": len(doubles) + len(randoms),
                                                 "failures": bad}

    def round_trips():
        bad = []
        for n, M in enumerate(list(simples_i) + randoms):
            if not round_trip_inertia(M).is_certified_iso():
                bad.append(["extract-theta", n])
            D, c = round_trip_double(theta(M))
            if not is_half_braided_iso(c, D, theta(M)):
                bad.append(["theta-extract", n])
        return ("PASS" if not bad else "FAIL"), {"checked": len(simples_i) + len(randoms),
                                                 "failures": bad}

    def oracle():
        panel = [direct_sum(*combo) for r in (1, 2)
                 for combo in itertools.combinations_with_replacement(simples_b, r)]
        within = [M for M in panel if oracle_bits(M) <= job.budget_bits]
        bad = []
        for n, M in enumerate(within):
            brute = {D.key() for D in enumerate_half_braidings(M, job.budget_bits)}
            images = {D.key() for D in theta_families_on(M, inert)}
            if brute != images:
                bad.append(n)
        detail = {"checked": len(within), "skipped_over_budget": len(panel) - len(within),
                  "budget_bits": job.budget_bits, "failures": bad}
        if bad:
            return "FAIL", detail
        return ("SKIPPED" if len(within) < len(panel) else "PASS"), detail

    def monoidal():
        bad = []
        unit_d = double_unit(act, p)
        for i, a in enumerate(doubles):
            if double_tensor(a, unit_d).key() != a.key() or double_tensor(unit_d, a).key() != a.key():
                bad.append(["unit", i])
        for i, j in itertools.product(range(len(simples_i)), repeat=2):
            try:
                theta_monoidal_iso(simples_i[i], simples_i[j])
            except InvariantError:
                bad.append(["convolution transport", i, j])
        for i, j, k in _triples(len(doubles), job.trials, rng):
            lhs = double_tensor(double_tensor(doubles[i], doubles[j]), doubles[k])
            rhs = double_tensor(doubles[i], double_tensor(doubles[j], doubles[k]))
            if lhs.key() != rhs.key():
                bad.append(["associativity", i, j, k])
        return ("PASS" if not bad else "FAIL"), {"failures": bad}

    def braiding():
        bad = []
        for i, j, k in _triples(len(doubles), job.trials, rng):
            for name in hexagon_defects(doubles[i], doubles[j], doubles[k]):
                bad.append([name, i, j, k])
        for i, j in itertools.product(range(len(doubles)), repeat=2):
            c = double_braiding(doubles[i], doubles[j])
            if not is_half_braided_iso(c, double_tensor(doubles[i], doubles[j]),
                                       double_tensor(doubles[j], doubles[i])):
                bad.append(["braiding is a double morphism", i, j])
        return ("PASS" if not bad else "FAIL"), {"failures": bad}

    def rings():
        dims = fixed_point_dims(act, p)
        cmp_ = compare_with_inertia(ring_B(act, p), inert)
        ok = all(q == f for _, q, f in dims) and cmp_.certified
        return ("PASS" if ok else "FAIL"), {"quotient_dims": [[h, q, f] for h, q, f in dims],
                                            "isomorphism_certified": cmp_.certified}

    def projection():
        di = double_inertia(act, inert)
        maps = {"pi": inert.pi, "p1": di.p1, "p2": di.p2, "m": di.m}
        bad = []
        for name, f in maps.items():
            for k in range(job.trials):
                M = random_module(f.source, 2, job.seed + 101 * k, p)
                N = random_module(f.target, 2, job.seed + 101 * k + 1, p)
                if not projection_iso(f, M, N, check=False).is_certified_iso():
                    bad.append([name, k])
        return ("PASS" if not bad else "FAIL"), {"instances": len(maps) * job.trials,
                                                 "failures": bad}

    def fixtures():
        bad = []
        for n, D in enumerate(job.half_braidings):
            rep = verify_half_braiding(D, panel=list(simples_b), seed=job.seed)
            if not rep:
                bad.append({"fixture": n, "failed": rep.names(),
                            "witness": [list(w) if isinstance(w, tuple) else w
                                        for _, w in rep.failures]})
        return ("PASS" if not bad else "FAIL"), {"checked": len(job.half_braidings),
                                                 "failures": bad}

    def descent():
        atlas = job.atlas
        rep = validate_atlas(atlas)
        if not rep:
            return "FAIL", {"atlas": [[k, w] for k, w in rep.failures]}
        panel = list(simples_b) + [random_module(act, 2, job.seed + 7 * k, p)
                                   for k in range(job.trials)]
        d1 = check_descent_panel(atlas, panel)
        d2 = check_double_panel(atlas, doubles + [theta(M) for M in randoms])
        ia = inertia_atlas(atlas)
        d3 = validate_atlas(ia)
        counts = chartwise_double_counts(atlas)
        ok = d1 and d2 and d3 and sum(counts) == len(simples_i)
        return ("PASS" if ok else "FAIL"), {
            "restrict_descend": [list(f) for f in d1.failures],
            "relative_double": [list(f) for f in d2.failures],
            "inertia_atlas_valid": d3.passed,
            "chart_double_counts": counts, "inertia_simples": len(simples_i)}

    suites = [_suite("half-braiding axioms", axioms), _suite("round trips", round_trips),
              _suite("oracle completeness", oracle), _suite("monoidal laws", monoidal),
              _suite("braiding laws", braiding), _suite("twisted rings", rings),
              _suite("projection formula", projection)]
    if job.half_braidings:
        suites.append(_suite("input half-braidings", fixtures))
    if job.atlas is not None:
        suites.append(_suite("descent", descent))
    return suites


def _triples(n: int, trials: int, rng: np.random.Generator) -> list[tuple[int, int, int]]:
    allt = list(itertools.product(range(n), repeat=3))
    if len(allt) <= max(trials, 27):
        return allt
    pick = rng.choice(len(allt), size=max(trials, 27), replace=False)
    return [allt[i] for i in sorted(pick)]


def cmd_verify(job: Job) -> tuple[dict, int]:
    suites = _verify_suites(job)
    failed = [s["name"] for s in suites if s["status"] == "FAIL"]
    report = {"prime": job.prime, "seed": job.seed, "trials": job.trials,
              "suites": suites, "failed": failed}
    return report, 1 if failed else 0


def cmd_fusion(job: Job) -> tuple[dict, int]:
    inert = InertiaAction(job.action)
    fd = fusion_data(inert, job.prime)
    labels = [f"({x},{job.group.labels[h]})" + ":" + ",".join(str(c) for c in ch)
              for x, h, ch in fd.labels]
    report = {"prime": job.prime, "simples": labels, "multiplicity": fd.multiplicity,
              "braiding": fd.braiding}
    return report, 0


COMMANDS = {"inertia": cmd_inertia, "simples": cmd_simples, "verify": cmd_verify,
            "fusion": cmd_fusion}


# -- output --------------------------------------------------------------------------------


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    return repr(obj)


def _table(rows: list[list[str]]) -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows)


def render_text(command: str, report: dict) -> str:
    if command == "verify":
        rows = [["suite", "status"]] + [[s["name"], s["status"]] for s in report["suites"]]
        return _table(rows) + "\n"
    if command == "fusion":
        names = report["simples"]
        out = []
        for i, a in enumerate(names):
            rows = [[f"{a} * ..."] + ["mult"]]
            for j, b in enumerate(names):
                prod = " + ".join(f"{m}{names[k]}" if m > 1 else names[k]
                                  for k, m in enumerate(report["multiplicity"][i][j]) if m)
                rows.append([b, prod or "0"])
            out.append(_table(rows))
        rows = [[""] + [str(k) for k in range(len(names))]]
        for i, row in enumerate(report["braiding"]):
            rows.append([str(i)] + ["-" if v is None else str(v) for v in row])
        out.append("braiding scalars (diagonal: self-braiding, off-diagonal: monodromy)\n"
                   + _table(rows))
        return "\n\n".join(out) + "\n"
    if command == "simples":
        rows = [["category", "simples"], ["base", str(report["base"])],
                ["inertia", str(report["inertia"])], ["double", str(report["double"])]]
        return _table(rows) + "\n"
    lines = [f"group order {report['group_order']}",
             f"inertia pairs: {len(report['inertia']['pairs'])}",
             f"inertia orbits: {len(report['inertia']['orbits'])}"]
    rows = [["pair", "x", "h"]] + [[str(i), str(x), str(h)]
                                     for i, (x, h) in enumerate(report["inertia"]["pairs"])]
    return "\n".join(lines) + "\n" + _table(rows) + "\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="orbidouble", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--input", required=True, help="JSON description of group, action and data")
    ap.add_argument("--prime", type=int, default=None, help="override the coefficient prime")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int, default=8, help="random instances per suite")
    ap.add_argument("--budget-bits", type=float, default=40.0,
                    help="largest brute-force search the oracle may attempt")
    ap.add_argument("--output", default=None, help="write the report here instead of stdout")
    ap.add_argument("--format", choices=("json", "text"), default="json")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = load_job(args)
        report, code = COMMANDS[args.command](job)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except (NonSplittingFieldError, SplittingFailedError) as exc:
        print(f"error: {exc} (try another --seed or --prime)", file=sys.stderr)
        return 2
    report = _jsonable(report)
    text = (json.dumps(report, sort_keys=True, indent=2) + "\n" if args.format == "json"
            else render_text(args.command, report))
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
