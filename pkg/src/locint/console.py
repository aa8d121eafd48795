"""Command-line front end.

Loads a system file or a built-in chain, runs the requested analysis,
and emits deterministic reports: the same config always produces the
same bytes, whatever the thread count. Values are printed as exact
fractions with float bits alongside; the floats are display only.
"""

import json
import os
import sys
from fractions import Fraction

import click

from .agency import (EntitySet, CoPerceptionContext, PaLoop, branch_morph,
                     branching_partition, co_perception_environments,
                     extend_pa_loop, find_co_actions, non_heteronomy,
                     perception_partition)
from .disintegration import (disintegration_hierarchy, entity_set_union,
                             iota_entities, refinement_free,
                             verify_disintegration_theorem)
from .errors import LocintError, ParseError, PerceptionNotUnique
from .model import build_markov_chain, mc_const_spec, mc_eps_spec, node
from .pattern import ascii_grid, classify_composite, parse_pattern, pgm_grid, \
    occurs_in, traverses_dof, variation
from .symmetry import (GeneratedGroup, Permutation, check_sli_symmetry,
                       check_markov_symmetry_propagation,
                       mc_const_symmetry_group, spatial_flip)
from .sysfile import SystemFile, load_system
from .partition import sli_workload


def _fraction_option(text, name):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise click.UsageError(f"{name} must be a rational like 1/100")


def _load(system_path, builtin, eps):
    if (system_path is None) == (builtin is None):
        raise click.UsageError("give a system file or --builtin, not both")
    if builtin == "mc-const":
        net = build_markov_chain(mc_const_spec())
        return SystemFile("mc-const", net,
                          loop=PaLoop.from_net(net, m_row=2),
                          groups={"full": mc_const_symmetry_group(net)},
                          form="markov")
    if builtin == "mc-eps":
        eps = _fraction_option(eps, "--eps")
        if not 0 < eps < Fraction(1, 3):
            raise click.UsageError("--eps must lie strictly between 0 and 1/3")
        net = build_markov_chain(mc_eps_spec(eps))
        return SystemFile("mc-eps", net,
                          groups={"flip": GeneratedGroup([spatial_flip(net)])},
                          form="markov")
    try:
        return load_system(system_path)
    except ParseError as exc:
        raise click.UsageError(str(exc))


def _select_group(system, name):
    if name is not None:
        if name not in system.groups:
            raise click.UsageError(f"system defines no group named {name!r}")
        return name, system.groups[name]
    if len(system.groups) == 1:
        only = next(iter(system.groups))
        return only, system.groups[only]
    return None, None


def _select_trajectories(net, index):
    """All trajectories when few, else the first of each probability
    class, most likely class first; an explicit index overrides."""
    trajectories = net.enumerate_trajectories()
    if index is not None:
        if not 0 <= index < len(trajectories):
            raise click.UsageError(
                f"--trajectory must be in 0..{len(trajectories) - 1}")
        t, p = trajectories[index]
        return [(index, t, p)]
    if len(trajectories) <= 8:
        return [(i, t, p) for i, (t, p) in enumerate(trajectories)]
    classes = {}
    for i, (t, p) in enumerate(trajectories):
        classes.setdefault(p, (i, t, p))
    return [classes[p] for p in sorted(classes, reverse=True)]


def _frac(x):
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def _emit(report, as_json):
    if as_json:
        click.echo(json.dumps(report, indent=2))


def _write_artifact(out_dir, filename, text):
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, filename)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return path


def _analysis_errors(fn):
    try:
        return fn()
    except click.ClickException:
        raise
    except LocintError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


def system_options(f):
    f = click.argument("system_path", metavar="[SYSTEM]", required=False)(f)
    f = click.option("--builtin", type=click.Choice(["mc-const", "mc-eps"]),
                     help="Use a built-in chain instead of a file.")(f)
    f = click.option("--eps", default="1/100", show_default=True,
                     help="Noise level p/q for the mc-eps built-in.")(f)
    f = click.option("--json", "as_json", is_flag=True,
                     help="Emit a JSON report instead of text.")(f)
    f = click.option("--threads", default=1, show_default=True,
                     type=click.IntRange(min=1),
                     help="Worker threads; never changes output bytes.")(f)
    f = click.option("--cap-partitions", default=None, type=click.IntRange(min=1),
                     help="Override the partition enumeration cap.")(f)
    f = click.option("--cap-states", default=None, type=click.IntRange(min=1),
                     help="Override the trajectory enumeration cap.")(f)
    f = click.option("--out", "out_dir", default=None,
                     help="Directory for DOT and PGM artifacts.")(f)
    return f


@click.group()
@click.version_option(package_name="locint", prog_name="locint")
def main():
    """Exact local-integration analysis of discrete dynamical networks."""


@main.command()
@system_options
@click.option("--trajectory", "trajectory_index", type=int, default=None,
              help="Analyze one trajectory by enumeration index.")
@click.option("--dot", "want_dot", is_flag=True,
              help="Write a level-poset DOT file per trajectory (needs --out).")
def analyze(system_path, builtin, eps, as_json, threads, cap_partitions,
            cap_states, out_dir, trajectory_index, want_dot):
    """Disintegration hierarchy per trajectory."""

    def run():
        system = _load(system_path, builtin, eps)
        net = system.net
        reports = []
        for idx, trajectory, prob in _select_trajectories(net, trajectory_index):
            hierarchy = disintegration_hierarchy(
                net, trajectory, threads=threads, cap=cap_partitions)
            levels = []
            for k, (value, parts) in enumerate(hierarchy.levels, start=1):
                levels.append({"level": k, "ratio": _frac(value.ratio),
                               "bits": value.bits(), "size": len(parts)})
            reports.append({"trajectory_index": idx,
                            "trajectory": trajectory.render(),
                            "probability": _frac(prob),
                            "probability_float": float(prob),
                            "levels": levels})
            if want_dot:
                if out_dir is None:
                    raise click.UsageError("--dot needs --out")
                for k in range(1, len(hierarchy) + 1):
                    dot = hierarchy.level_poset(k).to_dot(name=f"level{k}")
                    _write_artifact(out_dir,
                                    f"{system.name}-traj{idx}-level{k}.dot", dot)
        _emit({"system": system.name, "reports": reports}, as_json)
        if not as_json:
            for r in reports:
                click.echo(f"trajectory {r['trajectory_index']}: "
                           f"{r['trajectory']}  p={r['probability']} "
                           f"({r['probability_float']:.6g})")
                for lv in r["levels"]:
                    click.echo(f"  level {lv['level']}: ratio {lv['ratio']} "
                               f"({lv['bits']:.6f} bits), {lv['size']} partitions")

    _analysis_errors(run)


@main.command()
@system_options
@click.option("--trajectory", "trajectory_index", type=int, default=None,
              help="Dump entities of one trajectory only.")
def entities(system_path, builtin, eps, as_json, threads, cap_partitions,
             cap_states, out_dir, trajectory_index):
    """Completely integrated patterns, per trajectory and as a union."""

    def run():
        system = _load(system_path, builtin, eps)
        net = system.net
        selections = _select_trajectories(net, trajectory_index)

        def describe(entity, others):
            kinds = sorted({variation(entity.pattern, o.pattern)
                            for o in others if o.pattern != entity.pattern})
            return {
                "pattern": entity.pattern.render(),
                "iota_ratio": _frac(entity.iota.ratio),
                "iota_bits": entity.iota.bits(),
                "witness_partition": entity.witness_partition.render(),
                "composite": classify_composite(entity.pattern),
                "traverses_dof": traverses_dof(entity.pattern),
                "counterfactuals": kinds,
                "grid": ascii_grid(net, entity.pattern),
            }

        reports = []
        for idx, trajectory, _ in selections:
            ents = iota_entities(net, trajectory, threads=threads)
            rows = [describe(e, ents) for e in ents]
            reports.append({"trajectory_index": idx,
                            "trajectory": trajectory.render(),
                            "count": len(ents), "entities": rows})
            if out_dir is not None:
                for i, e in enumerate(ents):
                    _write_artifact(out_dir,
                                    f"{system.name}-traj{idx}-entity{i}.pgm",
                                    pgm_grid(net, e.pattern))
        union = entity_set_union(net, threads=threads)
        union_rows = [describe(e, union) for e in union]
        report = {"system": system.name, "reports": reports,
                  "union": {"count": len(union), "entities": union_rows}}
        _emit(report, as_json)
        if not as_json:
            for r in reports:
                click.echo(f"trajectory {r['trajectory_index']} "
                           f"({r['trajectory']}): {r['count']} entities")
                for row in r["entities"]:
                    click.echo(f"  {row['pattern']}  iota {row['iota_ratio']} "
                               f"({row['iota_bits']:.6f} bits)  "
                               f"{row['composite']}  "
                               f"dof={'yes' if row['traverses_dof'] else 'no'}  "
                               f"counterfactuals: "
                               f"{','.join(row['counterfactuals']) or '-'}")
            click.echo(f"union: {len(union)} distinct entities")

    _analysis_errors(run)


@main.command()
@system_options
@click.option("--trajectory", "trajectory_index", type=int, default=None,
              help="Anchor trajectory by enumeration index.")
@click.option("--time", "at_time", type=int, default=None,
              help="Restrict to actions at one time step.")
def actions(system_path, builtin, eps, as_json, threads, cap_partitions,
            cap_states, out_dir, trajectory_index, at_time):
    """Co-action pairs of the system's entities."""

    def run():
        system = _load(system_path, builtin, eps)
        net = system.net
        entity_set = EntitySet.iota(net, threads=threads)
        times = net.times()
        reports = []
        for idx, trajectory, _ in _select_trajectories(net, trajectory_index):
            pairs = []
            for anchor in entity_set:
                if not occurs_in(anchor, trajectory):
                    continue
                anchor_times = {n.time for n in anchor.domain}
                for t in times[:-1]:
                    if at_time is not None and t != at_time:
                        continue
                    if t not in anchor_times or t + 1 not in anchor_times:
                        continue
                    for pair in find_co_actions(net, entity_set, anchor,
                                                trajectory, t):
                        pairs.append({
                            "time": pair.time,
                            "kind": pair.kind,
                            "actor": pair.actor.render(),
                            "actor_grid": ascii_grid(net, pair.actor),
                            "coactor": pair.coactor.render(),
                            "coactor_grid": ascii_grid(net, pair.coactor),
                            "coactor_trajectory": pair.coactor_trajectory.render(),
                        })
            kinds = sorted({p["kind"] for p in pairs})
            reports.append({"trajectory_index": idx,
                            "trajectory": trajectory.render(),
                            "pair_count": len(pairs), "kinds": kinds,
                            "pairs": pairs})
        _emit({"system": system.name, "reports": reports}, as_json)
        if not as_json:
            for r in reports:
                click.echo(f"trajectory {r['trajectory_index']} "
                           f"({r['trajectory']}): {r['pair_count']} co-action "
                           f"pairs ({','.join(r['kinds']) or 'none'})")
                for p in r["pairs"]:
                    click.echo(f"  t={p['time']} {p['kind']}: {p['actor']} vs "
                               f"{p['coactor']} in {p['coactor_trajectory']}")

    _analysis_errors(run)


@main.command()
@system_options
@click.option("--trajectory", "trajectory_index", type=int, default=None,
              help="Anchor trajectory by enumeration index.")
@click.option("--zeta", default=None,
              help="Semicolon-separated pattern list; first is the anchor.")
@click.option("--time", "at_time", type=int, default=None,
              help="Perception time step (default: first valid).")
def perceptions(system_path, builtin, eps, as_json, threads, cap_partitions,
                cap_states, out_dir, trajectory_index, zeta, at_time):
    """Branch-morphs and perception partitions of entity anchors."""

    def run():
        system = _load(system_path, builtin, eps)
        net = system.net
        entity_set = EntitySet.iota(net, threads=threads)
        contexts = []
        if zeta is not None:
            patterns = [parse_pattern(chunk, net)
                        for chunk in zeta.split(";") if chunk.strip()]
            if not patterns:
                raise click.UsageError("--zeta names no patterns")
            anchor = patterns[0]
            t = at_time if at_time is not None else _first_valid_time(net, anchor)
            contexts.append(CoPerceptionContext(net, entity_set, anchor, t,
                                                zeta=patterns))
        else:
            anchors = list(entity_set)
            if trajectory_index is not None:
                selected = _select_trajectories(net, trajectory_index)
                anchors = [a for a in anchors
                           if any(occurs_in(a, tr) for _, tr, _ in selected)]
            for anchor in anchors:
                anchor_times = {n.time for n in anchor.domain}
                for t in sorted(anchor_times):
                    if at_time is not None and t != at_time:
                        continue
                    if t + 1 not in anchor_times:
                        continue
                    contexts.append(CoPerceptionContext(
                        net, entity_set, anchor, t))
        reports = []
        for context in contexts:
            branches = branching_partition(context)
            entry = {
                "anchor": context.anchor.render(),
                "time": context.time,
                "members": [y.render() for y in context.members],
                "flags": context.flags,
            }
            if context.zeta is not None:
                entry["zeta"] = [y.render() for y in context.zeta]
            if len(branches) < 2:
                entry["notice"] = "no co-perception entities"
                reports.append(entry)
                continue
            entry["branches"] = [key.render() for key, _ in branches]
            morphs = []
            for env in co_perception_environments(net, context):
                morph = branch_morph(net, context, env)
                morphs.append({
                    "environment": env.render(),
                    "distribution": [
                        {"branch": key.render(), "probability": _frac(p),
                         "probability_float": float(p)}
                        for key, p, _ in morph.branches],
                })
            entry["morphs"] = morphs
            partition = perception_partition(net, context)
            entry["perception_partition"] = [
                {"environments": [e.render() for e in envs],
                 "morph": [_frac(p) for p in signature]}
                for envs, signature in partition.blocks]
            reports.append(entry)
        _emit({"system": system.name, "reports": reports}, as_json)
        if not as_json:
            for r in reports:
                click.echo(f"anchor {r['anchor']} at t={r['time']}: "
                           f"{len(r['members'])} co-perception entities")
                if "notice" in r:
                    click.echo(f"  {r['notice']}")
                    continue
                for m in r["morphs"]:
                    parts = ", ".join(
                        f"{d['branch']}: {d['probability']}"
                        for d in m["distribution"])
                    click.echo(f"  env {m['environment']} -> {parts}")
                click.echo(f"  perceptions: "
                           f"{len(r['perception_partition'])} blocks")

    _analysis_errors(run)


def _first_valid_time(net, anchor):
    anchor_times = {n.time for n in anchor.domain}
    for t in sorted(anchor_times):
        if t + 1 in anchor_times:
            return t
    raise click.UsageError("anchor has no two consecutive occupied times")


@main.command()
@system_options
@click.option("--trajectory", "trajectory_index", type=int, default=None,
              help="Restrict the poset report to one trajectory.")
@click.option("--level", "level_index", type=int, default=None,
              help="Restrict to one 1-based hierarchy level.")
@click.option("--dot", "want_dot", is_flag=True,
              help="Write DOT files per level (needs --out).")
def hasse(system_path, builtin, eps, as_json, threads, cap_partitions,
          cap_states, out_dir, trajectory_index, level_index, want_dot):
    """Hasse diagrams of disintegration levels."""

    def run():
        system = _load(system_path, builtin, eps)
        net = system.net
        reports = []
        for idx, trajectory, _ in _select_trajectories(net, trajectory_index):
            hierarchy = disintegration_hierarchy(
                net, trajectory, threads=threads, cap=cap_partitions)
            levels = []
            for k in range(1, len(hierarchy) + 1):
                if level_index is not None and k != level_index:
                    continue
                value, parts = hierarchy.level(k)
                poset = hierarchy.level_poset(k)
                comps = poset.components()
                levels.append({"level": k, "ratio": _frac(value.ratio),
                               "bits": value.bits(), "size": len(parts),
                               "component_sizes": [len(c) for c in comps]})
                if want_dot:
                    if out_dir is None:
                        raise click.UsageError("--dot needs --out")
                    _write_artifact(
                        out_dir, f"{system.name}-traj{idx}-level{k}.dot",
                        poset.to_dot(name=f"level{k}"))
            reports.append({"trajectory_index": idx,
                            "trajectory": trajectory.render(),
                            "levels": levels})
        _emit({"system": system.name, "reports": reports}, as_json)
        if not as_json:
            for r in reports:
                click.echo(f"trajectory {r['trajectory_index']}: {r['trajectory']}")
                for lv in r["levels"]:
                    sizes = ",".join(str(s) for s in lv["component_sizes"])
                    click.echo(f"  level {lv['level']}: {lv['size']} partitions, "
                               f"{len(lv['component_sizes'])} components "
                               f"(sizes {sizes})")

    _analysis_errors(run)


@main.command()
@system_options
@click.option("--group", "group_name", default=None,
              help="Named symmetry group for the transformation-law check.")
def verify(system_path, builtin, eps, as_json, threads, cap_partitions,
           cap_states, out_dir, group_name):
    """Run the theorem suite; exit 0 only if every check passes."""

    def run():
        system = _load(system_path, builtin, eps)
        net = system.net
        checks = []

        if net.has_coordinates:
            ok = net.verify_time_slice_markov()
            checks.append({"name": "time_slice_markov", "passed": bool(ok)})

        trajectories = net.enumerate_trajectories()
        dis_violations = []
        for i, (trajectory, _) in enumerate(trajectories):
            report = verify_disintegration_theorem(net, trajectory,
                                                   threads=threads)
            if not report["passed"]:
                dis_violations.append({"trajectory_index": i, "report": report})
        checks.append({"name": "disintegration_theorem",
                       "trajectories": len(trajectories),
                       "passed": not dis_violations,
                       "violations": dis_violations})

        gname, group = _select_group(system, group_name)
        if group is not None:
            failures = []
            checked = 0
            for i, (trajectory, _) in enumerate(trajectories):
                report = check_sli_symmetry(net, group, trajectory)
                checked += report["checked"]
                if not report["passed"]:
                    failures.append({"trajectory_index": i,
                                     "violations": report["violations"]})
            checks.append({"name": "sli_symmetry_transformation",
                           "group": gname, "group_size": len(group.elements()),
                           "checked": checked, "passed": not failures,
                           "violations": failures})

        if net.markov_spec is not None:
            rows = net.spatial_indices()
            spec = net.markov_spec
            candidates = []
            for a in range(len(rows)):
                for b in range(a + 1, len(rows)):
                    ja, jb = rows[a], rows[b]
                    if ja in spec.driving_rows or jb in spec.driving_rows:
                        continue
                    if spec.row_states[ja - 1] != spec.row_states[jb - 1]:
                        continue
                    candidates.append((ja, jb))
            results = []
            for ja, jb in candidates:
                row_group = GeneratedGroup([Permutation({ja: jb, jb: ja})])
                propagates = check_markov_symmetry_propagation(spec, row_group)
                results.append({"rows": [ja, jb], "propagates": propagates})
            checks.append({"name": "markov_symmetry_propagation",
                           "transpositions": results, "passed": True})

        if system.loop is not None:
            extend_pa_loop(system.loop)
            entropies = []
            for t in range(system.loop.steps - 1):
                bits, has_actions = non_heteronomy(system.loop, t)
                entropies.append({"time": t, "bits": bits,
                                  "entity_actions": has_actions})
            checks.append({"name": "pa_loop_extension",
                           "non_heteronomy": entropies, "passed": True})

        passed = all(c["passed"] for c in checks)
        report = {"system": system.name, "checks": checks, "passed": passed}
        _emit(report, as_json)
        if not as_json:
            for c in checks:
                click.echo(f"{c['name']}: {'pass' if c['passed'] else 'FAIL'}")
            click.echo(f"verify: {'pass' if passed else 'FAIL'}")
        if not passed:
            sys.exit(1)

    _analysis_errors(run)


@main.command()
@system_options
def workload(system_path, builtin, eps, as_json, threads, cap_partitions,
             cap_states, out_dir):
    """Compare exhaustive and hierarchy-based analysis workloads."""

    def run():
        system = _load(system_path, builtin, eps)
        exhaustive = sli_workload(system.net, "exhaustive")
        hierarchy = sli_workload(system.net, "disintegration")
        report = {"system": system.name,
                  "exhaustive_evaluations": exhaustive,
                  "disintegration_evaluations": hierarchy,
                  "ratio_float": exhaustive / hierarchy}
        _emit(report, as_json)
        if not as_json:
            click.echo(f"exhaustive: {exhaustive}")
            click.echo(f"disintegration: {hierarchy}")
            click.echo(f"ratio: {report['ratio_float']:.4f}")

    _analysis_errors(run)


if __name__ == "__main__":
    main()
