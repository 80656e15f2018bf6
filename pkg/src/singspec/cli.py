"""Scenario-driven command line front end.

Four commands share one JSON scenario format (versioned, unknown keys
rejected):

* ``annihilate`` builds the mode's annihilator bundle and runs the weak
  trace ladder over every dictionary pair;
* ``classify`` runs the full detector battery and emits per-region verdicts;
* ``smirnov`` runs only the Smirnov-norm detectors (no verdicts);
* ``trace`` prints the raw eps ladder of one detector/vector pair as CSV.

Reports are deterministic for a fixed config + seed: floats are serialized
with 17 significant digits and wall-clock timing goes to stderr only (the
report's runtime_ms field is pinned to 0 so reruns stay byte-identical).
Exit codes: 0 success, 1 numeric/detection failure, 2 config error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import annihilator as ann
from . import detect
from .detect import Calibration, SlopeFit
from .errors import ConfigError, SingspecError
from .measure import AcPiece, ScPiece, SpectralMeasure, SymbolVector, constant_symbol
from .operator import OperatorModel
from .poly import PiecewisePoly, bump_poly

SCHEMA_VERSION = 1

_DETECTORS = ("smirnov_strong", "smirnov_weak", "ac_baseline", "weak_thm2", "weak_thm3")


# ---------------------------------------------------------------------------
# Scenario loading and validation
# ---------------------------------------------------------------------------

@dataclass
class Scenario:
    id: str
    mode: str
    measure: SpectralMeasure
    model: OperatorModel
    regions: list
    delta0: float | None
    gap: tuple | None
    derealize: dict | None
    calibration: Calibration
    grid_points: int
    seed: int
    tables: bool
    out_dir: Path
    path: str


def _line_of(path: str, text: str, key: str) -> int | None:
    for n, line in enumerate(text.splitlines(), start=1):
        if f'"{key}"' in line:
            return n
    return None


def _check_keys(obj: dict, allowed: set, where: str, path: str, text: str):
    for key in obj:
        if key not in allowed:
            raise ConfigError(path, f"unknown key '{key}' in {where}", _line_of(path, text, key))


def load_scenario(path: str, *, out_dir: str | None = None,
                  eps_ladder: list[float] | None = None,
                  grid: int | None = None, seed: int | None = None) -> Scenario:
    p = Path(path)
    if not p.exists():
        raise ConfigError(path, "config file not found")
    text = p.read_text()
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(path, f"invalid JSON: {exc.msg}", exc.lineno) from exc

    _check_keys(cfg, {"schema_version", "id", "mode", "measure", "coupling", "region",
                      "numeric", "derealize", "output"}, "the scenario", path, text)
    if cfg.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(path, f"schema_version must be {SCHEMA_VERSION}",
                          _line_of(path, text, "schema_version"))
    for req in ("id", "mode", "measure", "region"):
        if req not in cfg:
            raise ConfigError(path, f"missing required key '{req}'")
    mode = cfg["mode"]
    if mode not in ("thm2", "thm3"):
        raise ConfigError(path, "mode must be 'thm2' or 'thm3'", _line_of(path, text, "mode"))

    mu = _build_measure(cfg["measure"], path, text,
                        max_depth=cfg.get("numeric", {}).get("max_sc_depth", 24))
    model = _build_model(cfg.get("coupling"), mu, path, text)

    num = cfg.get("numeric", {})
    _check_keys(num, {"eps_ladder", "grid_points", "max_sc_depth", "seed", "thresholds",
                      "window_pad"}, "numeric", path, text)
    ladder = eps_ladder or num.get("eps_ladder") or list(detect.DEFAULT_EPS_LADDER)
    ladder = [float(e) for e in ladder]
    if not ladder or any(e <= 0 for e in ladder) or any(
            b >= a for a, b in zip(ladder, ladder[1:])):
        raise ConfigError(path, "eps_ladder must be nonempty, positive, strictly decreasing",
                          _line_of(path, text, "eps_ladder"))
    if any(e > 0.5 for e in ladder):
        raise ConfigError(path, "eps_ladder entries must not exceed 0.5",
                          _line_of(path, text, "eps_ladder"))
    thresholds = num.get("thresholds", {})
    _check_keys(thresholds, {"annihilation_ratio", "detection_fraction", "slope_unbounded",
                             "slope_bounded", "residual_limit", "weighted_ratio_limit",
                             "step_stability"}, "thresholds", path, text)
    cal = Calibration(eps_ladder=tuple(ladder),
                      window_pad=float(num.get("window_pad", 50.0)),
                      **{k: float(v) for k, v in thresholds.items()})

    grid_points = int(grid or num.get("grid_points", 2**14))
    if not 2**10 <= grid_points <= 2**20:
        raise ConfigError(path, "grid_points must lie in [2^10, 2^20]",
                          _line_of(path, text, "grid_points"))
    seed_val = int(seed if seed is not None else num.get("seed", 7))

    region_cfg = cfg["region"]
    hull_lo, hull_hi = mu.hull
    delta0 = gap = None
    if mode == "thm2":
        _check_keys(region_cfg, {"delta0", "gap"}, "region", path, text)
        if "gap" not in region_cfg or "delta0" not in region_cfg:
            raise ConfigError(
                path, "thm2 mode requires region.gap (an interval containing 0) "
                      "and region.delta0", _line_of(path, text, "region"))
        gap = tuple(float(x) for x in region_cfg["gap"])
        delta0 = float(region_cfg["delta0"])
        if not gap[0] < 0 < gap[1]:
            raise ConfigError(path, "the declared gap must contain 0",
                              _line_of(path, text, "gap"))
        if delta0 <= 0 or delta0 >= min(-gap[0], gap[1]):
            raise ConfigError(path, "delta0 must lie in (0, gap half-width)",
                              _line_of(path, text, "delta0"))
        for lo, hi in _component_intervals(mu):
            if lo < gap[1] and hi > gap[0]:
                raise ConfigError(
                    path, f"measure component [{lo:g}, {hi:g}] intersects the declared gap",
                    _line_of(path, text, "gap"))
        regions = [[(hull_lo - 1.0, -delta0)]]
    else:
        _check_keys(region_cfg, {"intervals"}, "region", path, text)
        if "intervals" not in region_cfg or not region_cfg["intervals"]:
            raise ConfigError(path, "thm3 mode requires region.intervals",
                              _line_of(path, text, "region"))
        regions = [[tuple(float(x) for x in iv)] for iv in region_cfg["intervals"]]
        pad = cal.window_pad
        for reg in regions:
            for lo, hi in reg:
                if lo >= hi:
                    raise ConfigError(path, f"region interval [{lo:g}, {hi:g}] is empty",
                                      _line_of(path, text, "intervals"))
                if lo < hull_lo - pad or hi > hull_hi + pad:
                    raise ConfigError(
                        path, "region intervals must lie inside the inflated support hull",
                        _line_of(path, text, "intervals"))

    dr = cfg.get("derealize")
    if dr is not None:
        _check_keys(dr, {"intervals", "amplitude", "shape"}, "derealize", path, text)

    out_cfg = cfg.get("output", {})
    _check_keys(out_cfg, {"dir", "tables"}, "output", path, text)
    out = Path(out_dir or out_cfg.get("dir") or f"out/{cfg['id']}")

    return Scenario(
        id=str(cfg["id"]), mode=mode, measure=mu, model=model, regions=regions,
        delta0=delta0, gap=gap, derealize=dr, calibration=cal,
        grid_points=grid_points, seed=seed_val, tables=bool(out_cfg.get("tables", False)),
        out_dir=out, path=path,
    )


def _component_intervals(mu: SpectralMeasure):
    for a, _ in mu.atoms:
        yield (a, a)
    for p in mu.ac_pieces:
        yield p.interval
    for p in mu.sc_pieces:
        yield (p.lo, p.hi)


def _build_measure(mcfg: dict, path: str, text: str, max_depth: int) -> SpectralMeasure:
    _check_keys(mcfg, {"atoms", "ac_pieces", "sc_pieces"}, "measure", path, text)
    try:
        atoms = [(float(a), float(w)) for a, w in mcfg.get("atoms", [])]
        ac = []
        for piece in mcfg.get("ac_pieces", []):
            _check_keys(piece, {"interval", "coeffs", "bump"}, "ac piece", path, text)
            lo, hi = (float(x) for x in piece["interval"])
            if "bump" in piece:
                b = piece["bump"]
                _check_keys(b, {"shape", "amplitude"}, "ac bump", path, text)
                poly = bump_poly(lo, hi, int(b.get("shape", 2)),
                                 float(b.get("amplitude", 1.0)))
            else:
                poly = PiecewisePoly(np.array([lo, hi]),
                                     (np.array([float(c) for c in piece["coeffs"]]),))
            ac.append(AcPiece(poly))
        sc = []
        for piece in mcfg.get("sc_pieces", []):
            _check_keys(piece, {"interval", "ratio", "p", "depth", "mass"},
                        "sc piece", path, text)
            lo, hi = (float(x) for x in piece["interval"])
            sc.append(ScPiece(lo, hi, float(piece["ratio"]), float(piece["p"]),
                              int(piece.get("depth", 10)), float(piece.get("mass", 1.0))))
        return SpectralMeasure(atoms=atoms, ac_pieces=ac, sc_pieces=sc,
                               max_sc_depth=max_depth)
    except SingspecError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(path, f"malformed measure description: {exc}") from exc


def _build_model(ccfg: dict | None, mu: SpectralMeasure, path: str, text: str) -> OperatorModel:
    if ccfg is None:
        return OperatorModel(mu)
    _check_keys(ccfg, {"rank", "vectors", "strengths"}, "coupling", path, text)
    vectors = ccfg.get("vectors", [{"kind": "constant", "value": 1.0}])
    strengths = [float(s) for s in ccfg.get("strengths", [1.0] * len(vectors))]
    if len(strengths) != len(vectors):
        raise ConfigError(path, "coupling strengths and vectors must match in length")
    if "rank" in ccfg and int(ccfg["rank"]) != len(vectors):
        raise ConfigError(path, "declared coupling rank disagrees with the vector list")
    lo, hi = mu.hull
    couplings = []
    for spec_v, s in zip(vectors, strengths):
        _check_keys(spec_v, {"kind", "value", "coeffs", "interval"}, "coupling vector",
                    path, text)
        kind = spec_v.get("kind", "constant")
        if kind == "constant":
            sym = constant_symbol(mu, float(spec_v.get("value", 1.0)))
        elif kind == "poly":
            iv = spec_v.get("interval", [lo - 1.0, hi + 1.0])
            sym = SymbolVector(PiecewisePoly(
                np.array([float(iv[0]), float(iv[1])]),
                (np.array([float(c) for c in spec_v["coeffs"]]),)), "poly")
        else:
            raise ConfigError(path, f"unknown coupling vector kind '{kind}'")
        couplings.append((sym, s))
    return OperatorModel(mu, couplings=tuple(couplings))


# ---------------------------------------------------------------------------
# Canonical serialization (17 significant digits, deterministic)
# ---------------------------------------------------------------------------

def canonical_json(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        rows = [f'{pad}  {json.dumps(str(k))}: {canonical_json(v, indent + 1)}'
                for k, v in obj.items()]
        return "{\n" + ",\n".join(rows) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        rows = [f"{pad}  {canonical_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(rows) + f"\n{pad}]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not np.isfinite(x):
            return "null"
        return f"{x:.17g}"
    if isinstance(obj, (complex, np.complexfloating)):
        return canonical_json({"re": obj.real, "im": obj.imag}, indent)
    return json.dumps(obj)


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


# ---------------------------------------------------------------------------
# Pipelines
# ---------------------------------------------------------------------------

def _build_bundle(scn: Scenario):
    if scn.mode == "thm2":
        bundle = ann.build_gamma_thm2(scn.model, scn.delta0)
        if scn.derealize:
            bundle = ann.derealize(
                bundle,
                [tuple(float(x) for x in iv) for iv in scn.derealize["intervals"]],
                amplitude=float(scn.derealize.get("amplitude", 0.5)),
                shape=int(scn.derealize.get("shape", 2)))
        return bundle
    intervals = [iv for reg in scn.regions for iv in reg]
    return ann.build_bundle_thm3(scn.model, intervals)


def _trace_rows(detector: str, vector_id: str, ladder, values, norms) -> list[str]:
    rows = []
    for eps, val, nrm in zip(ladder, values, norms):
        rows.append(",".join([
            detector, vector_id, _fmt(eps),
            _fmt(np.real(val)), _fmt(np.imag(val)), _fmt(nrm),
        ]))
    return rows


def run_annihilate(scn: Scenario) -> dict:
    bundle = _build_bundle(scn)
    ladder = np.asarray(scn.calibration.eps_ladder)
    cal = scn.calibration
    verdicts = []
    all_rows = ["detector,vector_id,eps,value_re,value_im,norm"]
    detector = "weak_" + scn.mode
    for region in scn.regions:
        vectors = detect.build_dictionary(scn.measure, region, seed=scn.seed)
        table = ann.weak_trace_table(bundle, scn.model, vectors, ladder)
        evidence = []
        states = []
        for (i, j), tr in sorted(table.items()):
            absv = np.abs(tr)
            sup = float(np.max(absv))
            ratio = float(absv[-1] / sup) if sup > 0 else 0.0
            step = float(absv[-1] / absv[-2]) if absv[-2] > 0 else 0.0
            fit = SlopeFit.from_ladder(ladder, absv, cal.slope_points)
            pair_id = f"{vectors[i].name}|{vectors[j].name}"
            if sup <= 1e-12 * max(scn.measure.total_mass, 1.0):
                state = "zero"
            elif ratio <= cal.annihilation_ratio:
                state = "annihilated"
            elif ratio >= cal.detection_fraction or (
                    step >= cal.step_stability and ratio > 2 * cal.annihilation_ratio):
                state = "persistent"
            else:
                state = "middle"
            states.append(state)
            evidence.append({
                "detector": detector, "vector": pair_id,
                "slope": fit.slope, "residual": fit.residual,
                "ratio": ratio, "state": state,
            })
            all_rows.extend(_trace_rows(detector, pair_id, ladder, tr, absv))
        live = [s for s in states if s != "zero"]
        if live and all(s == "annihilated" for s in live):
            verdict = detect.VERDICT_SINGULAR
        elif live and all(s == "persistent" for s in live):
            verdict = detect.VERDICT_AC
        elif any(s == "persistent" for s in live):
            verdict = detect.VERDICT_MIXED
        else:
            verdict = detect.VERDICT_INCONCLUSIVE
        verdicts.append({"region": [list(iv) for iv in region], "verdict": verdict,
                         "evidence": evidence})
    report = _report_skeleton(scn, verdicts)
    report["bundle"] = {k: v for k, v in bundle.diagnostics.items()}
    _write_artifacts(scn, report, {"weak_traces.csv": "\n".join(all_rows) + "\n"})
    return report


def run_classify(scn: Scenario) -> dict:
    bundle = _build_bundle(scn)
    verdicts = []
    rows = ["detector,vector_id,eps,value_re,value_im,norm"]
    ladder = np.asarray(scn.calibration.eps_ladder)
    for region in scn.regions:
        vectors = detect.build_dictionary(scn.measure, region, seed=scn.seed)
        rep = detect.analyze_region(scn.model, bundle, region, vectors, scn.calibration)
        evidence = []
        for ev in rep.evidence:
            evidence.append({"detector": "smirnov_strong", "vector": ev.vector,
                             "slope": ev.strong_bare.slope,
                             "residual": ev.strong_bare.residual})
            evidence.append({"detector": "smirnov_strong_delta", "vector": ev.vector,
                             "slope": ev.strong_delta.slope,
                             "residual": ev.strong_delta.residual})
            tr = ev.detectors["weak_" + scn.mode]
            fit = SlopeFit.from_ladder(ladder, np.abs(tr), scn.calibration.slope_points)
            evidence.append({"detector": "weak_" + scn.mode, "vector": ev.vector,
                             "slope": fit.slope, "residual": fit.residual,
                             "ratio": ev.weak_ratio, "verdict": ev.verdict})
            strong = ev.detectors["smirnov_strong"]
            rows.extend(_trace_rows(
                "smirnov_strong", ev.vector, ladder,
                [complex(r.bare_upper, r.delta_upper) for r in strong],
                [r.bare_upper for r in strong]))
            weak = ev.detectors["smirnov_weak"]
            rows.extend(_trace_rows(
                "smirnov_weak", ev.vector, ladder,
                [complex(r.bare_window, r.weighted) for r in weak],
                [r.weighted for r in weak]))
            rows.extend(_trace_rows("weak_" + scn.mode, ev.vector, ladder,
                                    tr, np.abs(tr)))
        verdicts.append({"region": rep.region, "verdict": rep.verdict,
                         "evidence": evidence})
    report = _report_skeleton(scn, verdicts)
    if scn.model.rank > 1:
        report["warnings"] = [
            "rank > 1 coupling: cyclicity of the span is not certified; "
            "detector completeness is heuristic"]
    _write_artifacts(scn, report, {"traces.csv": "\n".join(rows) + "\n"})
    return report


def run_smirnov(scn: Scenario) -> dict:
    ladder = np.asarray(scn.calibration.eps_ladder)
    rows = ["detector,vector_id,eps,value_re,value_im,norm"]
    verdicts = []
    for region in scn.regions:
        vectors = detect.build_dictionary(scn.measure, region, seed=scn.seed)
        evidence = []
        for u in vectors:
            strong = detect.smirnov_strong_trace(scn.model, u, ladder,
                                                 scn.calibration.window_pad)
            weak = detect.smirnov_weak_trace(scn.model, u, u, ladder,
                                             scn.calibration.window_pad)
            fit_b = SlopeFit.from_ladder(ladder, [r.bare_upper for r in strong])
            fit_d = SlopeFit.from_ladder(ladder, [r.delta_upper for r in strong])
            evidence.append({"detector": "smirnov_strong", "vector": u.name,
                             "slope": fit_b.slope, "residual": fit_b.residual})
            evidence.append({"detector": "smirnov_strong_delta", "vector": u.name,
                             "slope": fit_d.slope, "residual": fit_d.residual})
            rows.extend(_trace_rows(
                "smirnov_strong", u.name, ladder,
                [complex(r.bare_upper, r.delta_upper) for r in strong],
                [r.bare_upper for r in strong]))
            rows.extend(_trace_rows(
                "smirnov_weak", u.name, ladder,
                [complex(r.bare_window, r.weighted) for r in weak],
                [r.weighted for r in weak]))
        verdicts.append({"region": [list(iv) for iv in region],
                         "verdict": "not-classified", "evidence": evidence})
    report = _report_skeleton(scn, verdicts)
    _write_artifacts(scn, report, {"traces.csv": "\n".join(rows) + "\n"})
    return report


def run_trace(scn: Scenario, detector: str, vector_id: str) -> str:
    if detector not in _DETECTORS:
        raise SingspecError(
            f"unknown detector '{detector}'; choose from {', '.join(_DETECTORS)}")
    region = scn.regions[0]
    vectors = detect.build_dictionary(scn.measure, region, seed=scn.seed)
    byname = {v.name: v for v in vectors}
    if vector_id not in byname:
        raise SingspecError(
            f"unknown vector id '{vector_id}'; dictionary has {sorted(byname)}")
    u = byname[vector_id]
    ladder = np.asarray(scn.calibration.eps_ladder)
    rows = ["detector,vector_id,eps,value_re,value_im,norm"]
    if detector in ("weak_thm2", "weak_thm3"):
        want = "thm2" if detector.endswith("2") else "thm3"
        if want != scn.mode:
            raise SingspecError(f"detector {detector} needs a {want}-mode scenario")
        bundle = _build_bundle(scn)
        fn = ann.weak_trace_thm2 if want == "thm2" else ann.weak_trace_thm3
        tr = fn(bundle, scn.model, u, u, ladder)
        rows.extend(_trace_rows(detector, u.name, ladder, tr, np.abs(tr)))
    elif detector == "smirnov_strong":
        recs = detect.smirnov_strong_trace(scn.model, u, ladder, scn.calibration.window_pad)
        rows.extend(_trace_rows(detector, u.name, ladder,
                                [complex(r.bare_upper, r.delta_upper) for r in recs],
                                [r.bare_upper for r in recs]))
    elif detector == "ac_baseline":
        recs = detect.ac_baseline_trace(scn.model, u, ladder, scn.calibration.window_pad)
        rows.extend(_trace_rows(detector, u.name, ladder,
                                [complex(nrm, 0.0) for _, nrm in recs],
                                [nrm for _, nrm in recs]))
    else:
        recs = detect.smirnov_weak_trace(scn.model, u, u, ladder, scn.calibration.window_pad)
        rows.extend(_trace_rows(detector, u.name, ladder,
                                [complex(r.bare_window, r.weighted) for r in recs],
                                [r.weighted for r in recs]))
    return "\n".join(rows) + "\n"


def _report_skeleton(scn: Scenario, verdicts: list) -> dict:
    return {
        "scenario_id": scn.id,
        "mode": scn.mode,
        "verdicts": verdicts,
        "calibration": dict(scn.calibration.to_dict(), seed=scn.seed,
                            grid_points=scn.grid_points),
        "runtime_ms": 0,
    }


def _write_artifacts(scn: Scenario, report: dict, extra: dict[str, str]):
    scn.out_dir.mkdir(parents=True, exist_ok=True)
    (scn.out_dir / "report.json").write_text(canonical_json(report) + "\n")
    for name, content in extra.items():
        (scn.out_dir / name).write_text(content)
    if scn.tables:
        _write_tables(scn)


def _write_tables(scn: Scenario):
    """Sampled function tables for plotting: gamma_A boundary + line samples."""
    lo, hi = scn.measure.hull
    xs = np.linspace(lo - 2.0, hi + 2.0, min(scn.grid_points, 4096))
    from .operator import log_gamma_a

    lg = log_gamma_a(scn.model, xs + 1j * ann.EPS_BOUNDARY)
    rows = ["x,log_abs_gamma_a,arg_gamma_a"]
    rows += [f"{_fmt(x)},{_fmt(v.real)},{_fmt(v.imag)}" for x, v in zip(xs, lg)]
    (scn.out_dir / "gamma_a_boundary.csv").write_text("\n".join(rows) + "\n")


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _add_common(sub):
    sub.add_argument("--config", required=True, help="scenario JSON path")
    sub.add_argument("--out", default=None, help="output directory")
    sub.add_argument("--eps-ladder", default=None,
                     help="comma-separated decreasing eps values")
    sub.add_argument("--grid", type=int, default=None, help="uniform grid points")
    sub.add_argument("--seed", type=int, default=None, help="dictionary seed")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="singspec",
        description="outer-function annihilators and Smirnov detectors for "
                    "singular spectrum")
    subs = parser.add_subparsers(dest="command", required=True)
    for name in ("annihilate", "classify", "smirnov"):
        _add_common(subs.add_parser(name))
    tr = subs.add_parser("trace")
    _add_common(tr)
    tr.add_argument("--detector", required=True)
    tr.add_argument("--vector", required=True)

    args = parser.parse_args(argv)
    t0 = time.monotonic()
    try:
        ladder = None
        if args.eps_ladder:
            ladder = [float(tok) for tok in args.eps_ladder.split(",") if tok.strip()]
            if not ladder:
                raise ConfigError(args.config, "empty eps ladder override")
        scn = load_scenario(args.config, out_dir=args.out, eps_ladder=ladder,
                            grid=args.grid, seed=args.seed)
        if args.command == "annihilate":
            report = run_annihilate(scn)
        elif args.command == "classify":
            report = run_classify(scn)
        elif args.command == "smirnov":
            report = run_smirnov(scn)
        else:
            sys.stdout.write(run_trace(scn, args.detector, args.vector))
            print(f"[singspec] trace done in {1000 * (time.monotonic() - t0):.0f} ms",
                  file=sys.stderr)
            return 0
    except ConfigError as exc:
        print(f"[singspec] config error: {exc}", file=sys.stderr)
        return 2
    except SingspecError as exc:
        print(f"[singspec] {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1

    ms = 1000 * (time.monotonic() - t0)
    summary = "; ".join(f"{v['region']}: {v['verdict']}" for v in report["verdicts"])
    print(f"[singspec] {scn.id} [{args.command}] -> {summary or 'no regions'} "
          f"({ms:.0f} ms) -> {scn.out_dir}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
