"""Scenario pipeline: weights, moments, distances, witnesses and annihilators.

``run_scenario`` executes the stages in a fixed order and writes plain CSV
and JSON artifacts.  Everything written to the artifact files is a
deterministic function of the scenario, its precision and its seed; wall
clock timings go to a separate ``timing.json`` sidecar.
"""

from __future__ import annotations

import copy
import csv
import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import mpmath
import numpy as np

from .approx import annihilator, certificates, predict_structure, splitting_profile
from .errors import DiskApproxError, NotLogIntegrable, ScenarioError
from .moments import alpha_table, verify_P_lower_bound
from .poisson import Polar, outer_eval, variation_sum_check
from .scenario import Scenario, parse_scenario
from .sets import Arc
from .weights import carrier_and_residual, check_exp_dec, check_loglog_int
from .witness import build_fN, verify_conditions, vitali_select

__all__ = ["RunReport", "run_scenario", "random_families", "sweep", "write_csv", "SWEEP_COLUMNS",
           "EXIT_OK", "EXIT_PARSE", "EXIT_VERDICT", "EXIT_PRECISION"]

EXIT_OK, EXIT_PARSE, EXIT_VERDICT, EXIT_PRECISION = 0, 1, 2, 3
SWEEP_COLUMNS = ["d_Nmax", "certificate", "expdec_d", "loglog_integral", "verdict", "checks"]


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for r in rows:
            wr.writerow([_fmt(v) for v in r])


def _write_json(path: Path, obj):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n")


def _json_default(x):
    if isinstance(x, (np.floating, mpmath.mpf)):
        return float(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, Fraction):
        return str(x)
    raise TypeError(f"not serialisable: {type(x).__name__}")


def _clean(x):
    # JSON has no infinities; keep them readable
    if isinstance(x, float) and not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


@dataclass
class RunReport:
    scenario: str
    precision: int
    seed: int
    regime: dict = field(default_factory=dict)
    prediction: dict = field(default_factory=dict)
    moments: dict | None = None
    profiles: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    annihilator: dict | None = None
    certificates: dict = field(default_factory=dict)
    variation: dict | None = None
    escalations: list = field(default_factory=list)
    checks: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)
    files: list = field(default_factory=list)

    @property
    def failed(self) -> list:
        return sorted(k for k, ok in self.checks.items() if not ok)

    @property
    def exit_code(self) -> int:
        return EXIT_VERDICT if self.failed else EXIT_OK

    def as_dict(self) -> dict:
        d = {k: getattr(self, k) for k in ("scenario", "precision", "seed", "regime", "prediction",
                                           "moments", "profiles", "witnesses", "annihilator",
                                           "certificates", "variation", "escalations", "checks")}
        d["failed"] = self.failed
        return _clean(d)


# --------------------------------------------------------------------------
# randomised audit


def random_families(seed: int, count: int, max_arcs: int) -> list:
    """Seeded disjoint arc families with between 1 and ``max_arcs`` arcs each."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        k = int(rng.integers(1, max_arcs + 1))
        pts = np.sort(rng.random(2 * k))
        shift = rng.random()
        fam = []
        for a, b in zip(pts[0::2], pts[1::2]):
            if b <= a:
                continue
            s = Fraction((a + shift) % 1.0)
            fam.append(Arc(s, s + Fraction(b - a)))
        out.append(fam)
    return out


def _variation(sc: Scenario, out: Path, report: RunReport):
    v = sc.variation
    fams = random_families(sc.seed, int(v["families"]), int(v["max_arcs"]))
    rows, worst, violations = [], 0.0, 0
    for i, fam in enumerate(fams):
        for r in v["radii"]:
            res = variation_sum_check(fam, float(r))
            violations += not res.ok
            worst = max(worst, res.sum / res.bound)
            rows.append((i, len(fam), float(r), res.sum, res.bound, res.ok))
    write_csv(out / "variation.csv", ["family", "arcs", "r", "sum", "bound", "ok"], rows)
    report.files.append("variation.csv")
    report.variation = {"families": len(fams), "radii": list(v["radii"]), "violations": violations,
                        "worst_ratio": worst}
    report.checks["variation_bound"] = violations == 0


# --------------------------------------------------------------------------
# stages


def _sets(sc: Scenario, out: Path, report: RunReport):
    if sc.w is None:
        return
    res = carrier_and_residual(sc.w)
    for name, S in (("E", res.E), ("F", res.F)):
        write_csv(out / f"arcs_{name}.csv", ["start_turns", "end_turns", "stage"], sorted(S.stage_rows(10)))
        report.files.append(f"arcs_{name}.csv")


def _moments(sc: Scenario, out: Path, report: RunReport):
    N = sc.moments.get("N") or (max(sc.N_list) if sc.N_list else 50)
    tab = alpha_table(sc.G, int(N), sc.precision)
    digits = max(15, int(sc.precision * math.log10(2)) - 4)
    rows = [(n, mpmath.nstr(v, digits, min_fixed=1, max_fixed=0), mpmath.nstr(e, 3))
            for n, v, e in tab.rows()]
    write_csv(out / "moments.csv", ["n", "alpha", "error"], rows)
    report.files.append("moments.csv")
    report.moments = {"N": int(N), "decreasing": tab.is_decreasing()}
    report.checks["moments_decreasing"] = tab.is_decreasing()
    grid = sc.moments.get("P_grid") or []
    if grid:
        pb = verify_P_lower_bound(sc.G, grid, sc.precision)
        report.moments["P_lower_bound"] = {"rows": pb.rows, "violations": pb.violations,
                                           "threshold": pb.threshold}
        report.checks["P_lower_bound"] = pb.ok


def _profiles(sc: Scenario, out: Path, report: RunReport, tup):
    mu = sc.measure
    for t in sc.targets:
        prof = splitting_profile(mu, t, sc.N_list, sc.precision)
        report.escalations += [p for p in prof.escalations if p not in report.escalations]
        cert = None
        if tup is not None and not isinstance(tup, str):
            cert = certificates(tup, t, [N for N in sc.N_list if N <= tup.N_ext], sc.w)
        rows = []
        for r in prof.rows:
            c = cert.get(r["N"]) if cert else None
            rows.append((r["N"], r["d_N"], r["cond_est"], c.value if c is not None else None))
        fname = f"profile_{_safe(t.label)}.csv"
        write_csv(out / fname, ["N", "d_N", "cond_est", "certificate"], rows)
        report.files.append(fname)
        entry = {
            "target": t.describe(),
            "precision": prof.precision,
            "monotone": prof.monotone,
            "strictly_decreasing": prof.strictly_decreasing,
            "plateau_exploratory": prof.plateau,
            "d_Nmax": prof.rows[-1]["d_N"] if prof.rows else None,
        }
        report.profiles[t.label] = entry
        report.checks[f"profile_monotone[{t.label}]"] = prof.monotone
        if cert:
            vals = [c for c in cert.values() if not c.vacuous]
            L = max((c.value for c in vals), default=0.0)
            bracket = all(r["d_N"] >= cert[r["N"]].value - 1e-8 for r in prof.rows if r["N"] in cert)
            report.certificates[t.label] = {"L": L, "positive": L > 0, "bracket_ok": bracket,
                                            "by_N": {str(N): c.as_dict() for N, c in cert.items()}}
            report.checks[f"bracket[{t.label}]"] = bracket


def _safe(label: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-_" else "_" for ch in label) or "target"


def _annihilator(sc: Scenario, out: Path, report: RunReport):
    a = sc.annihilator
    N_ext = max([a["N_max"]] + [N for N in sc.N_list])
    try:
        tup = annihilator(sc.measure, a["arc"], a["N_max"], sc.precision, N_ext=N_ext,
                          resolution=a["resolution"], boxes=a["boxes"])
    except NotLogIntegrable as e:
        report.annihilator = {"constructed": False, "reason": str(e),
                              "arc": [str(a["arc"].start), str(a["arc"].end)]}
        return "not log-integrable"
    s = tup.summary()
    s["constructed"] = True
    report.annihilator = s
    report.checks["annihilator_residuals"] = tup.residual_ok
    report.checks["annihilator_F_bound"] = tup.F_bound_ok
    _write_json(out / "annihilator.json", _clean({
        "coefficients": [{"n": n, "abs_h": h, "bound": b, "abs_F": f, "residual": r}
                         for n, h, b, f, r in tup.coefficient_rows()],
        "residuals": {"max": tup.max_residual, "tolerance": 1e-10 * tup.norm, "ok": tup.residual_ok},
        "norms": {"tuple": tup.norm, "disk2": tup.disk_norm2, "boundary2": tup.boundary_norm2,
                  "F2": tup.F_norm2, "F2_bound": tup.F_norm_bound},
        "summary": s,
    }))
    report.files.append("annihilator.json")
    return tup


def _witnesses(sc: Scenario, out: Path, report: RunReport):
    res = carrier_and_residual(sc.w)
    for N in sc.witness["N"]:
        t0 = time.perf_counter()
        intervals = vitali_select(sc.w, res.F, N)
        fam = build_fN(sc.w, intervals, N, refine=int(sc.witness["refine"]), F=res.F)
        rep = verify_conditions(fam, sc.w, sc.G, F=res.F)
        tag = f"N{_fmt(N)}"
        write_csv(out / f"witness_{tag}.csv", ["arc_start", "arc_end", "value"], fam.rows())
        ev = outer_eval(fam.scaled, [Polar(t, 1 - rep.extras["rho"]) for t in rep.fidelity_points], 128)
        write_csv(out / f"witness_{tag}_eval.csv", ["re_z", "im_z", "re_g", "im_g", "log_modulus"],
                  [(v.z.real, v.z.imag, None if v.value is None else v.value.real,
                    None if v.value is None else v.value.imag, v.log_modulus) for v in ev])
        report.files += [f"witness_{tag}.csv", f"witness_{tag}_eval.csv"]
        d = rep.as_dict()
        d["fidelity_ok"] = rep.fidelity_error <= 1e-6
        report.witnesses.append(d)
        report.checks[f"witness_conditions[{tag}]"] = rep.five_pass
        report.checks[f"witness_fidelity[{tag}]"] = d["fidelity_ok"]
        report.checks[f"witness_growth[{tag}]"] = rep.growth_ok
        report.timing[f"witness_{tag}"] = time.perf_counter() - t0


def run_scenario(sc: Scenario, out_dir, stages=None) -> RunReport:
    """Run the scenario, writing artifacts into ``out_dir``.

    ``stages`` restricts the pipeline to a subset of ``regime``, ``sets``,
    ``moments``, ``annihilator``, ``profiles``, ``witness`` and ``variation``.
    Precision exhaustion propagates as :class:`EscalationExhausted`.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    want = set(stages) if stages else {"regime", "sets", "moments", "annihilator", "profiles",
                                       "witness", "variation"}
    report = RunReport(sc.name, sc.precision, sc.seed)
    started = time.time()

    def stage(name, fn, *args):
        t0 = time.perf_counter()
        r = fn(*args)
        report.timing[name] = time.perf_counter() - t0
        return r

    if "regime" in want:
        if sc.G is not None:
            ed, ll = check_exp_dec(sc.G), check_loglog_int(sc.G)
            report.regime = {"expdec": ed.holds, "expdec_d": ed.d, "loglog": ll.holds,
                             "loglog_integral": ll.integral}
        report.prediction = predict_structure(sc.measure).as_dict()
    if "sets" in want:
        stage("sets", _sets, sc, out, report)
    if "moments" in want and sc.moments is not None:
        stage("moments", _moments, sc, out, report)
    tup = None
    if "annihilator" in want and sc.annihilator is not None:
        tup = stage("annihilator", _annihilator, sc, out, report)
    if "profiles" in want and sc.N_list and sc.targets:
        stage("profiles", _profiles, sc, out, report, tup)
    if "witness" in want and sc.witness is not None:
        stage("witness", _witnesses, sc, out, report)
    if "variation" in want and sc.variation is not None:
        stage("variation", _variation, sc, out, report)

    _write_json(out / "report.json", report.as_dict())
    report.files.append("report.json")
    _write_json(out / "timing.json", {"started_unix": started, "finished_unix": time.time(),
                                      "stages_seconds": report.timing})
    return report


# --------------------------------------------------------------------------
# sweeps


def _set_path(d: dict, path: str, value):
    keys = path.split(".")
    cur = d
    for k in keys[:-1]:
        if isinstance(cur, list):
            cur = cur[int(k)]
        else:
            if k not in cur:
                raise ScenarioError("grid path not present in the base scenario", field=path)
            cur = cur[k]
    last = keys[-1]
    if isinstance(cur, list):
        cur[int(last)] = value
    else:
        cur[last] = value


def _sweep_point(args):
    raw, params, out_dir, precision, seed = args
    row = dict(params)
    try:
        data = copy.deepcopy(raw)
        for k, v in params.items():
            _set_path(data, k, v)
        sc = parse_scenario(json.loads(json.dumps(data))).with_overrides(precision, seed)
        rep = run_scenario(sc, out_dir)
        first = next(iter(rep.profiles.values()), {})
        certs = [c["L"] for c in rep.certificates.values()]
        row.update(d_Nmax=first.get("d_Nmax"), certificate=max(certs) if certs else None,
                   expdec_d=rep.regime.get("expdec_d"), loglog_integral=rep.regime.get("loglog_integral"),
                   verdict=rep.prediction.get("verdict"), checks="pass" if not rep.failed else
                   "fail:" + ";".join(rep.failed))
    except DiskApproxError as e:
        row.update(d_Nmax=None, certificate=None, expdec_d=None, loglog_integral=None, verdict=None,
                   checks=f"error:{type(e).__name__}:{e}")
    return row


def sweep(sc: Scenario, grid: dict, out_dir, jobs: int = 1, precision=None, seed=None) -> list:
    """Run ``sc`` at every point of the product ``grid`` (dotted field paths).

    Each point writes into its own subdirectory; failures are recorded in
    the ``checks`` column and the sweep continues.  An empty grid does nothing.
    """
    out = Path(out_dir)
    keys = list(grid)
    if not keys or any(len(grid[k]) == 0 for k in keys):
        return []
    points = [dict(zip(keys, combo)) for combo in itertools.product(*(grid[k] for k in keys))]
    out.mkdir(parents=True, exist_ok=True)
    tasks = [(sc.raw, p, out / f"point_{i:03d}", precision, seed) for i, p in enumerate(points)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(_sweep_point, tasks))
    else:
        rows = [_sweep_point(t) for t in tasks]
    write_csv(out / "sweep.csv", keys + SWEEP_COLUMNS, [[r.get(k) for k in keys + SWEEP_COLUMNS] for r in rows])
    return rows

