"""Experiment driver.

Usage:
    corrdyn analyze|equidistribute|spectra|mixing|periodic|render
            --config <file.json> --out <dir> [--serial] [--seed N] [--strict]

The config is a JSON object holding the correspondence record (bidegree plus
row-major (re, im) coefficient pairs, optionally a factored form), a seed,
optional numeric-policy overrides, and one section per command.  Outputs land
in <out>/<runid>/ where the run id hashes the command and canonical config;
a manifest.json records policy, seeds, budgets and output hashes so a run can
be reproduced bit-exactly.  Exit codes: 0 ok, 2 config error, 3 numeric
failure, 4 hypothesis unverified (with --strict).
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .correspondence import (
    CorrespondenceError,
    adjoint,
    critical_orbit_report,
    critical_values,
    delta_bound,
)
from .manifest import (
    ConfigError,
    RunManifest,
    Stopwatch,
    load_config,
    parse_correspondence,
    parse_policy,
    run_id,
    start_manifest,
)
from .measures import (
    TestDictionary,
    dual_lip_distance,
    invariance_residual,
    mixing_correlation,
    rate_fit,
    render_density,
    save_pgm,
)
from .periodic import periodic_count_with_multiplicity, periodic_points, periodic_table
from .pointcloud import PointCloudMeasure, load_cloud, save_cloud
from .transport import (
    TransportError,
    backward_cloud_series,
    operator_norm_estimate,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_HYPOTHESIS = 4


def _cv_str(v):
    if v.chart == 1 and v.coord == 0:
        return f"inf ({v.kind})"
    return f"{v.as_extended():.6g} ({v.kind})"


def cmd_analyze(cfg, f, policy, seed, out_dir, manifest):
    sec = cfg.get("analyze", {})
    horizon = int(sec.get("horizon", 12))
    iters = int(sec.get("norm_iters", 25))
    res = int(cfg.get("grid_resolution", 256))
    data = critical_values(f, policy=policy)
    orbit = critical_orbit_report(f, horizon=horizon, data=data, policy=policy)
    delta = delta_bound(f, data=data, policy=policy)
    norm = operator_norm_estimate(f, "pullback", iters=iters, resolution=res,
                                  seed=seed, policy=policy)
    print(f"d1 = {f.d1}, d2 = {f.d2}")
    print("B1:", ", ".join(_cv_str(v) for v in data.b1) or "(empty)")
    print("B2:", ", ".join(_cv_str(v) for v in data.b2) or "(empty)")
    for e in orbit.entries:
        print(f"orbit of {_cv_str(e.value)}: periodic={e.periodic_detected} "
              f"certified={e.certified} min_return={e.min_return_distance:.3g}"
              + (" [inconclusive]" if e.inconclusive else ""))
    print(f"local-degree bound d^#B2 = {delta}")
    verdict = "weak-modularity suspected" if norm["weak_modularity_suspected"] else "contracting"
    print(f"one-form contraction estimate = {norm['norm_estimate']:.4f} ({verdict})")
    report = {
        "d1": f.d1, "d2": f.d2,
        "b1": [{"point": _cv_str(v), "kind": v.kind, "multiplicity": v.multiplicity} for v in data.b1],
        "b2": [{"point": _cv_str(v), "kind": v.kind, "multiplicity": v.multiplicity} for v in data.b2],
        "orbit": [{"value": _cv_str(e.value), "periodic": e.periodic_detected,
                   "certified": e.certified, "min_return": e.min_return_distance,
                   "inconclusive": e.inconclusive} for e in orbit.entries],
        "delta_bound": delta,
        "norm_estimate": norm["norm_estimate"],
        "norm_history": norm["history"],
        "verdict": verdict,
        "hypothesis_unverified": orbit.hypothesis_unverified,
    }
    path = os.path.join(out_dir, "analysis.json")
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    manifest.record_output(path)
    manifest.flags["hypothesis_unverified"] = orbit.hypothesis_unverified
    return orbit.hypothesis_unverified


def cmd_equidistribute(cfg, f, policy, seed, out_dir, manifest):
    sec = cfg.get("equidistribute", {})
    direction = sec.get("direction", "plus")
    if direction not in ("plus", "minus"):
        raise ConfigError("equidistribute.direction must be 'plus' or 'minus'")
    g = f if direction == "plus" else adjoint(f)
    n_values = sec.get("n_values")
    if n_values is None:
        n_values = list(range(2, int(sec.get("n_max", 12)) + 1, 2))
    budget = int(sec.get("budget", 100000))
    starts = [complex(re, im) for re, im in sec.get("starting_points", [[1.0, 0.0]])]
    rsec = sec.get("render", {})
    dictionary = TestDictionary(l_max=int(sec.get("dictionary_degree", 8)))

    orbit = critical_orbit_report(g, horizon=int(sec.get("horizon", 10)), policy=policy)
    unverified = orbit.hypothesis_unverified
    tag = "_unverified" if unverified else ""
    all_series = []
    for k, a in enumerate(starts):
        clouds = backward_cloud_series(g, a, n_values, max_atoms=budget,
                                       seed=seed + k, policy=policy)
        all_series.append(clouds)
        for n in n_values:
            path = os.path.join(out_dir, f"cloud_p{k}_n{n}{tag}.bin")
            save_cloud(path, clouds[n])
            manifest.record_output(path)
        img = render_density(clouds[n_values[-1]],
                             resolution=int(rsec.get("resolution", 512)),
                             bandwidth=float(rsec.get("bandwidth", 2.0)))
        path = os.path.join(out_dir, f"density_p{k}{tag}.pgm")
        save_pgm(path, img)
        manifest.record_output(path)

    rate = None
    if len(n_values) >= 3:
        rate = rate_fit(g, starts[0], n_values, dictionary, seed=seed, budget=budget,
                        policy=policy)
    residuals = {n: invariance_residual(g, all_series[0][n], dictionary, policy=policy)
                 for n in n_values}
    uniformity = None
    if len(starts) > 1:
        nmax = n_values[-1]
        uniformity = max(dual_lip_distance(all_series[i][nmax], all_series[j][nmax], dictionary)
                         for i in range(len(starts)) for j in range(i + 1, len(starts)))
    report = {
        "direction": direction,
        "n_values": n_values,
        "rate": None if rate is None else
                {"lambda": rate.lam, "band": rate.lam_band, "residual": rate.fit_residual,
                 "distances": rate.distances, "unreliable": rate.unreliable},
        "invariance_residuals": {str(n): r for n, r in residuals.items()},
        "uniformity_max_pairwise": uniformity,
        "hypothesis_unverified": unverified,
    }
    path = os.path.join(out_dir, f"equidistribution{tag}.json")
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    manifest.record_output(path)
    manifest.flags["hypothesis_unverified"] = unverified
    if rate is not None:
        print(f"rate lambda = {rate.lam:.3f} (residual {rate.fit_residual:.3f})"
              + (" [hypothesis unverified]" if unverified else ""))
    return unverified


def cmd_spectra(cfg, f, policy, seed, out_dir, manifest):
    sec = cfg.get("spectra", {})
    res = int(cfg.get("grid_resolution", 256))
    iters = int(sec.get("iters", 25))
    out = {}
    for direction in sec.get("directions", ["pullback", "pushforward"]):
        r = operator_norm_estimate(f, direction, iters=iters, resolution=res,
                                   seed=seed, policy=policy)
        out[direction] = r
        verdict = "weak-modularity suspected" if r["weak_modularity_suspected"] else "contracting"
        print(f"{direction}: estimate {r['norm_estimate']:.4f} ({verdict})")
    path = os.path.join(out_dir, "spectra.json")
    with open(path, "w") as fh:
        json.dump(out, fh, indent=2)
        fh.write("\n")
    manifest.record_output(path)
    return False


def cmd_mixing(cfg, f, policy, seed, out_dir, manifest):
    sec = cfg.get("mixing", {})
    dictionary = TestDictionary(l_max=int(sec.get("dictionary_degree", 8)))
    pairs = sec.get("pairs", [[[1, 0, "re"], [2, 0, "re"]]])
    lo, hi = sec.get("n_range", [2, 8])
    start = complex(*sec.get("start", [0.3, 0.2]))
    depth = int(sec.get("mu_depth", 12))
    atoms = int(sec.get("mu_atoms", 4096))
    budget = int(sec.get("budget", 400000))
    mu = backward_cloud_series(f, start, [depth], max_atoms=atoms,
                               seed=seed + 71, policy=policy)[depth]
    results = []
    for lp, lq in pairs:
        phi = dictionary.function(int(lp[0]), int(lp[1]), lp[2])
        psi = dictionary.function(int(lq[0]), int(lq[1]), lq[2])
        r = mixing_correlation(f, mu, phi, psi, range(int(lo), int(hi) + 1),
                               budget=budget, seed=seed, policy=policy)
        results.append(r)
        print(f"{phi.name} x {psi.name}: " +
              " ".join(f"I_{n}={v:.3e}" for n, v in r["pairs"]))
    path = os.path.join(out_dir, "mixing.json")
    with open(path, "w") as fh:
        json.dump(results, fh, indent=2)
        fh.write("\n")
    manifest.record_output(path)
    return False


def cmd_periodic(cfg, f, policy, seed, out_dir, manifest):
    sec = cfg.get("periodic", {})
    n_values = sec.get("n_values", [1, 2, 3])
    tol = float(sec.get("tol", 1e-8))
    dictionary = TestDictionary(l_max=8)
    summary = {}
    for n in n_values:
        pts = periodic_points(f, int(n), tol=tol, policy=policy)
        path = os.path.join(out_dir, f"periodic_n{n}.txt")
        with open(path, "w") as fh:
            fh.write(periodic_table(pts))
        manifest.record_output(path)
        count = periodic_count_with_multiplicity(pts)
        rep = [p for p in pts if p.kind == "repelling"]
        entry = {"count_with_multiplicity": count,
                 "expected": f.d1 ** int(n) + f.d2 ** int(n),
                 "classes": {k: sum(1 for p in pts if p.kind == k)
                             for k in ("repelling", "attracting", "neutral")}}
        # recorded, not asserted: how the repelling points sit against the
        # empirical backward measure
        if rep:
            cloud = PointCloudMeasure(np.array([p.chart for p in rep], dtype=np.uint8),
                                      np.array([p.coord for p in rep], dtype=complex),
                                      np.full(len(rep), 1.0 / len(rep)))
            mu = backward_cloud_series(f, 0.37 + 0.21j, [10], max_atoms=20000,
                                       seed=seed + 5, policy=policy)[10]
            entry["repelling_fraction"] = len(rep) / max(len(pts), 1)
            entry["repelling_vs_mu_plus"] = dual_lip_distance(cloud, mu, dictionary)
        summary[str(n)] = entry
        print(f"n={n}: {count} points with multiplicity "
              f"(expected {entry['expected']}), classes {entry['classes']}")
    path = os.path.join(out_dir, "periodic_summary.json")
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    manifest.record_output(path)
    return False


def cmd_render(cfg, f, policy, seed, out_dir, manifest):
    sec = cfg.get("render", {})
    src = sec.get("cloud_file")
    if not src:
        raise ConfigError("render.cloud_file is required")
    try:
        cloud = load_cloud(src)
    except FileNotFoundError:
        raise ConfigError(f"cloud file not found: {src}")
    img = render_density(cloud, resolution=int(sec.get("resolution", 512)),
                         bandwidth=float(sec.get("bandwidth", 2.0)))
    path = os.path.join(out_dir, "density.pgm")
    save_pgm(path, img)
    manifest.record_output(path)
    print(f"wrote {path}")
    return False


_COMMANDS = {
    "analyze": cmd_analyze,
    "equidistribute": cmd_equidistribute,
    "spectra": cmd_spectra,
    "mixing": cmd_mixing,
    "periodic": cmd_periodic,
    "render": cmd_render,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="corrdyn", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True)
    parser.add_argument("--out", default="runs")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--serial", action="store_true",
                        help="force deterministic reductions (the default engine is serial)")
    parser.add_argument("--strict", action="store_true",
                        help="exit 4 when the periodic-critical-value hypothesis is unverified")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
        f = parse_correspondence(cfg)
        policy = parse_policy(cfg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    cfg_effective = dict(cfg)
    cfg_effective["seed"] = seed
    rid = run_id(args.command, cfg_effective)
    out_dir = os.path.join(args.out, rid)
    os.makedirs(out_dir, exist_ok=True)

    # the engine is serial and deterministic; the flag is recorded for provenance
    manifest = start_manifest(args.command, cfg_effective, f, policy, seed, serial=True)
    manifest.flags["serial_requested"] = bool(args.serial)
    try:
        with Stopwatch() as sw:
            unverified = _COMMANDS[args.command](cfg_effective, f, policy, seed,
                                                 out_dir, manifest)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (CorrespondenceError, TransportError, ValueError) as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    manifest.wall_clock_s = sw.elapsed
    manifest.write(os.path.join(out_dir, "manifest.json"))
    print(f"run {rid} complete ({sw.elapsed:.1f}s); outputs in {out_dir}")
    if unverified and args.strict:
        return EXIT_HYPOTHESIS
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
