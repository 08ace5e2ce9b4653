"""Command-line front end.

    distchaos <subcommand> [--config FILE] [--set key=value ...] [--out DIR]

Config files are flat ``key = value`` text.  Exit status: 0 when every
embedded check passes, 1 on a failed check or numerical failure, 2 on a
usage or configuration error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .errors import ConfigError, DistChaosError, ParameterError

log = logging.getLogger("distchaos")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class RunConfig:
    kappa: float = 0.037
    n_param: float = 0.001
    allow_outside: bool = False
    tol: float = 1e-9
    shift: str = "pi"               # "pi", "full2" or a presentation file
    horizon: int = 262226
    l_max: int = 18
    dc1_tol: float = 0.05
    n_max: int = 8
    count: int = 5
    shifts: int = 3
    max_len: int = 8
    random_words: int = 0
    samples: int = 100000
    g_samples: int = 500
    grid_resolution: int = 400
    n_periods: int = 3
    shell_samples: int = 1000
    seeds: str = ""                 # itinerary starts, e.g. "0.1+0.2j, -0.3j"
    random_seeds: int = 0
    full_csv: bool = False
    seed: int | None = None
    out_dir: str = "out"


def _coerce(name: str, raw: str, typ):
    raw = raw.strip()
    try:
        if typ in ("bool",) or typ is bool:
            low = raw.lower()
            if low not in ("1", "0", "true", "false", "yes", "no"):
                raise ValueError(raw)
            return low in ("1", "true", "yes")
        if typ in ("int", "int | None") or typ is int:
            return None if raw.lower() in ("", "none") else int(raw)
        if typ in ("float",) or typ is float:
            return float(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {raw!r}") from exc


def parse_config_text(text: str, base: RunConfig | None = None, origin: str = "<config>") -> RunConfig:
    cfg = base or RunConfig()
    types = {f.name: f.type for f in fields(RunConfig)}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{origin}:{lineno}: expected 'key = value', got {line!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in types:
            raise ConfigError(f"{origin}:{lineno}: unknown key {key!r}")
        setattr(cfg, key, _coerce(key, val, types[key]))
    return cfg


def load_config(path: str | None, overrides: list[str]) -> RunConfig:
    cfg = RunConfig()
    if path:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file {path} not found")
        cfg = parse_config_text(p.read_text(), cfg, str(p))
    if overrides:
        cfg = parse_config_text("\n".join(overrides), cfg, "--set")
    return cfg


def _need_seed(cfg: RunConfig, what: str) -> int:
    if cfg.seed is None:
        raise ConfigError(f"{what} samples randomly; set 'seed' in the config")
    return int(cfg.seed)


def _params(cfg: RunConfig):
    from .ode import ProcessParams
    try:
        return ProcessParams(cfg.kappa, cfg.n_param, cfg.allow_outside)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc


def _shift(cfg: RunConfig):
    from .shift import build_pi_shift, full_shift, read_presentation
    if cfg.shift == "pi":
        return build_pi_shift()
    if cfg.shift.startswith("full"):
        return full_shift(int(cfg.shift[4:] or 2))
    if Path(cfg.shift).is_file():
        return read_presentation(cfg.shift)
    raise ConfigError(f"unknown shift {cfg.shift!r}")


def _check(results: list, name: str, ok: bool, detail: str = "") -> None:
    results.append(ok)
    print(f"[{'PASS' if ok else 'FAIL'}] {name}{': ' + detail if detail else ''}")


# --- subcommands ----------------------------------------------------------------

def cmd_shift_check(cfg: RunConfig, out: Path) -> list:
    from .shift import (all_words, build_pi_shift, find_non_sft_witness, is_mixing,
                        pi_rules_allow, specification_gap, words_matrix_allowed,
                        write_presentation)
    res: list = []
    pi = build_pi_shift()
    write_presentation(pi, out / "pi.pres")
    bad = 0
    total = 0
    for n in range(cfg.max_len + 1):
        mat = all_words(5, n)
        got = words_matrix_allowed(pi, mat)
        want = np.array([pi_rules_allow(w) for w in mat])
        bad += int((got != want).sum())
        total += mat.shape[0]
    _check(res, "exhaustive oracle equivalence", bad == 0, f"{total} words, {bad} mismatches")
    if cfg.random_words:
        rng = np.random.default_rng(_need_seed(cfg, "shift-check"))
        mat = rng.integers(0, 5, size=(cfg.random_words, 40))
        got = words_matrix_allowed(pi, mat)
        want = np.array([pi_rules_allow(w) for w in mat])
        _check(res, "random oracle equivalence", bool((got == want).all()),
               f"{cfg.random_words} words of length 40")
    _check(res, "mixing", is_mixing(pi))
    gap = specification_gap(pi)
    print(f"specification gap = {gap}")
    _check(res, "not of finite type at memory 8", find_non_sft_witness(pi, 8) is not None)
    return res


def cmd_build_scrambled(cfg: RunConfig, out: Path) -> list:
    from .scrambled import build_distal_family, build_invariant_sample, write_stream
    from .shift import stream_allowed
    from .stats import classify_dc1, default_schedule, dyadic_thresholds
    res: list = []
    shift = _shift(cfg)
    fam = build_distal_family(shift, cfg.n_max, cfg.horizon)
    for n, z in fam.points.items():
        d = fam.details[n]
        write_stream(z, out / f"z_{n}.txt", {"n": n, "block_length": d.block_length,
                                             "separation": d.separation})
    _check(res, "distal family allowed", all(stream_allowed(shift, z) for z in fam.points.values()),
           f"eps = {fam.eps}")
    sample = build_invariant_sample(shift, cfg.count, cfg.horizon, cfg.shifts)
    cert = sample.certificate()
    for i, s in enumerate(sample.points):
        write_stream(s, out / f"point_{i}.txt", cert)
    sched = default_schedule(cfg.l_max)
    sched = sched[sched <= cfg.horizon - cfg.shifts]
    thr = dyadic_thresholds()
    clo = sample.closure()
    keys = sorted(clo)
    h = min(s.horizon for s in clo.values())
    fails = 0
    for a in range(len(keys)):
        for b in range(a + 1, len(keys)):
            v = classify_dc1(clo[keys[a]].truncated(h), clo[keys[b]].truncated(h), sample.epsilon,
                             thr, sched, cfg.dc1_tol)
            fails += not v.is_dc1_empirical
    _check(res, "sample pairs DC1", fails == 0,
           f"{len(keys) * (len(keys) - 1) // 2} pairs, eps = {sample.epsilon}, failures = {fails}")
    _check(res, "sample points allowed", all(stream_allowed(shift, s) for s in sample.points))
    return res


def cmd_dc1_stats(cfg: RunConfig, out: Path) -> list:
    from .scrambled import build_dc1_pair
    from .stats import classify_dc1, default_schedule, dyadic_thresholds, profile, stream_distances
    from .svg import line_plot
    res: list = []
    shift = _shift(cfg)
    x, y, eps = build_dc1_pair(shift, cfg.horizon)
    sched = default_schedule(cfg.l_max)
    sched = sched[sched <= cfg.horizon]
    thr = dyadic_thresholds()
    prof = profile(stream_distances(x, y, int(sched.max())), thr, sched)
    prof.write_csv(out / "profile.csv")
    verdict = classify_dc1(x, y, eps, thr, sched, cfg.dc1_tol)
    verdict.write_csv(out / "verdict.csv")
    series = [(f"t=2^{int(round(np.log2(t)))}", sched, prof.phi_at[i]) for i, t in enumerate(thr)]
    line_plot(out / "phi.svg", series, "phi_n(t) along the horizon schedule", "n", "phi_n(t)",
              logx=True)
    _check(res, "DC1 verdict", verdict.is_dc1_empirical,
           f"eps = {eps}, upper {verdict.upper_witness}, lower {verdict.lower_witness}")
    return res


def cmd_segment_verify(cfg: RunConfig, out: Path) -> list:
    from .segments import (check_g_conditions, margin_infimum, segment_e, segment_u, segment_v,
                           segment_w, transversality_report)
    res: list = []
    seed = _need_seed(cfg, "segment-verify")
    p = _params(cfg)
    segs = [segment_w(p), segment_u(p), segment_v(0.568, p)]
    if p.n_param > 0:
        segs.append(segment_v(1.3 * p.m_scale, p))
        segs += [segment_e(k, e * p.m_scale, p) for e in (0.004, 0.383) for k in range(3)]
    csv_path = out / "transversality.csv"
    summary = []
    for i, seg in enumerate(segs):
        rep = transversality_report(seg, p, cfg.samples, seed + i)
        if cfg.full_csv:
            rep.write_csv(csv_path, append=i > 0)
        else:
            # per-face minima and all violations
            keep = set(int(j) for j in rep.violations)
            for f in np.unique(rep.face):
                idx = np.flatnonzero(rep.face == f)
                keep.add(int(idx[np.argmin(rep.margin[idx])]))
            sel = np.array(sorted(keep))
            sub = type(rep)(rep.segment, rep.face[sel], rep.t[sel], rep.z[sel], rep.margin[sel])
            sub.write_csv(csv_path, append=i > 0)
        corner = min(margin_infimum(seg, p, 1001, 1001).values())
        summary.append(f"{seg.name}: violations={rep.violation_count} min_margin={rep.min_margin!r} "
                       f"corner_infimum={corner!r}")
        _check(res, f"transversality {seg.name}", rep.violation_count == 0 and rep.min_margin > 0,
               f"min margin {rep.min_margin:.3e}")
    g = check_g_conditions(segs[0], segs[1], p, samples=cfg.g_samples, seed=seed)
    summary.append(f"G1={g.g1_pass} sections_equal_at_0={g.sections_equal_at_0} eta={g.eta!r}")
    (out / "segment_summary.txt").write_text("\n".join(summary) + "\n")
    _check(res, "G1", g.g1_pass and g.sections_equal_at_0)
    _check(res, "G2", g.eta > 0, f"eta = {g.eta:.4g}")
    return res


def cmd_periodic_points(cfg: RunConfig, out: Path) -> list:
    from .ode import (center_bound, centers, find_periodic_solutions, trajectory,
                      write_fixed_points_csv, write_trajectory_csv)
    res: list = []
    p = _params(cfg)
    sols = find_periodic_solutions(p)
    write_fixed_points_csv(sols, out / "fixed_points.csv")
    for s in sols:
        ts, zs = trajectory(s.z, p, samples=1001)
        write_trajectory_csv(ts, zs, out / f"orbit_{s.k}.csv")
    if p.n_param > 0:
        bound = center_bound(p)
        _check(res, "three fixed points", len(sols) == 3)
        _check(res, "residuals", all(s.residual <= 1e-9 for s in sols))
        _check(res, "orbit bound", all(s.max_center_distance <= bound for s in sols),
               f"max {max(s.max_center_distance for s in sols):.3e} <= {bound:.3e}")
        cs = centers(p)
        _check(res, "one per sector", sorted(s.k for s in sols) == [0, 1, 2]
               and all(abs(s.z - cs[s.k]) < p.m_scale for s in sols))
    else:
        _check(res, "single fixed point at 0", len(sols) == 1 and sols[0].residual <= 1e-8)
    return res


def _parse_seeds(text: str) -> list[complex]:
    out = []
    for tok in text.split(","):
        tok = tok.strip().replace(" ", "")
        if tok:
            try:
                out.append(complex(tok))
            except ValueError as exc:
                raise ConfigError(f"bad seed {tok!r}") from exc
    return out


def cmd_itinerary(cfg: RunConfig, out: Path) -> list:
    from .coding import itineraries, sample_w0, verify_semiconjugacy
    res: list = []
    p = _params(cfg)
    seeds = _parse_seeds(cfg.seeds)
    if cfg.random_seeds:
        rng = np.random.default_rng(_need_seed(cfg, "itinerary"))
        seeds += list(sample_w0(cfg.random_seeds, p, rng))
    if not seeds:
        raise ConfigError("itinerary needs 'seeds' or 'random_seeds'")
    its = itineraries(seeds, cfg.n_periods, p, cfg.tol)
    lines = []
    bad = 0
    for z, it in zip(seeds, its):
        lines.append(f"{z.real!r} {z.imag!r} {it.word} {it.terminated_by}")
        if it.terminated_by == "completed" and cfg.n_periods >= 2:
            rep = verify_semiconjugacy(z, cfg.n_periods - 1, p, cfg.tol)
            bad += not rep.ok
    (out / "itineraries.txt").write_text("\n".join(lines) + "\n")
    _check(res, "semiconjugacy on completed itineraries", bad == 0, f"{len(seeds)} seeds")
    return res


def cmd_census(cfg: RunConfig, out: Path) -> list:
    from .coding import census_g_inverse_zero
    from .svg import heat_map
    res: list = []
    seed = _need_seed(cfg, "census")
    p = _params(cfg)
    rep = census_g_inverse_zero(p, cfg.grid_resolution, cfg.n_periods, cfg.shell_samples,
                                seed, cfg.tol)
    rep.write_csv(out / "census.csv")
    grid = np.where(rep.inside, np.where(rep.survived, 5, rep.exit_component), -1)
    colors = {-1: None, 0: "#bbbbbb", 1: "#d62728", 2: "#2ca02c", 3: "#1f77b4", 4: "#ff7f0e",
              5: "#000000"}
    heat_map(out / "census.svg", grid.tolist(), colors,
             f"exit component after {cfg.n_periods} periods (black: survived)")
    lines = [f"clusters={rep.cluster_count}"] + [
        f"cluster size={c['size']} centroid={c['centroid']!r} nearest={c['nearest_center']} "
        f"distance={c['distance']!r}" for c in rep.clusters]
    lines.append(f"shell_left={rep.shell_left}/{rep.shell_total}")
    lines.append(rep.evidence_note)
    (out / "census_summary.txt").write_text("\n".join(lines) + "\n")
    if p.n_param > 0:
        _check(res, "survivor clusters <= 3", rep.cluster_count <= 3, f"{rep.cluster_count}")
    else:
        _check(res, "single survivor cluster", rep.cluster_count == 1, f"{rep.cluster_count}")
    _check(res, "shell starts leave U", rep.shell_all_left, f"{rep.shell_left}/{rep.shell_total}")
    return res


COMMANDS = {
    "shift-check": (cmd_shift_check, "build Pi and compare with the rule oracle"),
    "build-scrambled": (cmd_build_scrambled, "distal family, DC1 sample and certificates"),
    "dc1-stats": (cmd_dc1_stats, "phi profile CSV/SVG and DC1 verdict of a constructed pair"),
    "segment-verify": (cmd_segment_verify, "transversality and G-condition reports"),
    "periodic-points": (cmd_periodic_points, "Poincare fixed points and orbit bounds"),
    "itinerary": (cmd_itinerary, "symbolic itineraries and semiconjugacy checks"),
    "census": (cmd_census, "survivor census over V(r)_0"),
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="distchaos", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", help="flat key = value config file")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config key (repeatable)")
        sp.add_argument("--out", help="output directory (overrides out_dir)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, args.set)
        out = Path(args.out or cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        func = COMMANDS[args.command][0]
        results = func(cfg, out)
    except (ConfigError, ParameterError) as exc:
        print(f"distchaos {args.command}: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DistChaosError as exc:
        print(f"distchaos {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK if all(results) else EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
