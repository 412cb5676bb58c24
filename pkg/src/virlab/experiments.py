"""Experiment catalog behind the ``vir-lab`` command.

Each experiment has a JSON schema for its payload, defaults that form a
runnable descriptor, and a runner returning CSV rows, a summary and
pass/fail verdicts.
"""
from __future__ import annotations

import copy
import csv
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from . import chflows as ch
from . import circle as cc
from . import discrete as dv
from . import rigid_body as rb
from . import virasoro as vr
from .errors import DescriptorInvalid

DEFAULT_OUT = "vir-lab-out"

# ---------------------------------------------------------------------------
# schemas

_FIELD = {
    "type": "object",
    "oneOf": [
        {
            "required": ["n", "samples"],
            "properties": {
                "n": {"type": "integer", "minimum": 16},
                "samples": {"type": "array", "items": {"type": "number"}},
            },
        },
        {
            "required": ["n", "fourier"],
            "properties": {
                "n": {"type": "integer", "minimum": 16},
                "fourier": {
                    "type": "object",
                    "properties": {
                        "const": {"type": "number"},
                        "cos": {"type": "array", "items": {"type": "number"}},
                        "sin": {"type": "array", "items": {"type": "number"}},
                    },
                    "additionalProperties": False,
                },
            },
        },
    ],
}

_MATRIX = {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}


def _num(default, **kw):
    return {"type": "number", "default": default, **kw}


def _int(default, **kw):
    return {"type": "integer", "default": default, **kw}


def _schema(props, required=()):
    return {"type": "object", "properties": props, "required": list(required),
            "additionalProperties": False}


SCHEMAS = {
    "vir-check": _schema({
        "n": _int(256, minimum=16),
        "trials": _int(100, minimum=1),
        "modes": _int(8, minimum=1),
        "algebra_modes": _int(5, minimum=1),
        "amplitude": _num(0.3, exclusiveMinimum=0),
        "max_slope": _num(0.5, exclusiveMinimum=0, exclusiveMaximum=1),
        "group_tol": _num(1e-6),
        "vector_tol": _num(1e-8),
        "central_tol": _num(1e-6),
        "metric_tol": _num(1e-10),
    }),
    "ch-evolve": _schema({
        "params": {
            "type": "object",
            "properties": {"alpha": {"type": "number", "minimum": 0},
                           "beta": {"type": "number", "minimum": 0},
                           "b": {"type": "number"}},
            "required": ["alpha", "beta", "b"],
            "additionalProperties": False,
            "default": {"alpha": 1.0, "beta": 0.0, "b": -1.0},
        },
        "v0": {**_FIELD, "default": {"n": 256, "fourier": {"sin": [1.0]}}},
        "dt": _num(1e-3, exclusiveMinimum=0),
        "steps": _int(1000, minimum=0),
        "record_every": _int(10, minimum=1),
        "drift_tol": _num(1e-6),
        "residual_trials": _int(100, minimum=0),
        "residual_tol": _num(1e-8),
    }),
    "hopf-oracle": _schema({
        "v0": {**_FIELD, "default": {"n": 256, "fourier": {"sin": [0.1]}}},
        "fraction": _num(0.25, exclusiveMinimum=0, exclusiveMaximum=1),
        "steps": _int(1000, minimum=1),
        "record_every": _int(50, minimum=1),
        "tol": _num(1e-4),
    }),
    "mv-run": _schema({
        "J": {**_MATRIX, "default": [[1.0, 0, 0], [0, 2.0, 0], [0, 0, 3.0]]},
        "omega0": {**_MATRIX, "default": None, "type": ["array", "null"]},
        "omega_scale": _num(0.3, exclusiveMinimum=0),
        "steps": _int(1000, minimum=0),
        "record_every": _int(1, minimum=1),
        "spectrum_tol": _num(1e-10),
        "orthogonality_tol": _num(1e-9),
        "roundtrip_trials": _int(100, minimum=0),
        "roundtrip_max_n": _int(6, minimum=2),
        "roundtrip_tol": _num(1e-9),
    }),
    "mv-limit": _schema({
        "J": {**_MATRIX, "default": [[1.0, 0, 0], [0, 2.0, 0], [0, 0, 3.0]]},
        "omega0": {**_MATRIX, "default": None, "type": ["array", "null"]},
        "omega_scale": _num(1.0, exclusiveMinimum=0),
        "epsilons": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0},
                     "minItems": 2, "default": [0.1, 0.01, 0.001]},
        "T": _num(1.0, exclusiveMinimum=0),
        "dt_for_limit": _num(1e-3, exclusiveMinimum=0),
        "slope_min": _num(0.9),
    }),
    "hs-step": _schema({
        "stepper": {"enum": ["hs", "hs_simple"], "default": "hs"},
        "omega0": {"anyOf": [{"type": "null"}, _FIELD], "default": None},
        "n": _int(256, minimum=16),
        "Omega": _num(1.0),
        "mode": {"oneOf": [{"const": "periodic_C"},
                           {"type": "object", "required": ["fix_C"],
                            "properties": {"fix_C": {"type": "number"}},
                            "additionalProperties": False}],
                 "default": "periodic_C"},
        "rotation": _num(0.0),
        "steps": _int(3, minimum=1),
        "stationarity": {"type": "boolean", "default": True},
        "directions": _int(20, minimum=1),
        "el2_tol": _num(1e-7),
        "stationarity_tol": _num(1e-5),
        "negative_control": {"type": "boolean", "default": True},
        "negative_tol": _num(1e-2),
        "rootfind_trials": _int(50, minimum=0),
        "rootfind_tol": _num(1e-10),
    }),
    "invariance-check": _schema({
        "V": {"enum": sorted(dv.DENSITIES), "default": "sqrt"},
        "trials": _int(100, minimum=1),
        "n": _int(256, minimum=16),
        "h_tol": _num(1e-7),
    }),
}
SCHEMAS["hs-simple"] = copy.deepcopy(SCHEMAS["hs-step"])
SCHEMAS["hs-simple"]["properties"]["stepper"]["default"] = "hs_simple"
# the simple map roughly doubles the bandwidth of omega' per step
SCHEMAS["hs-simple"]["properties"]["n"]["default"] = 512

DESCRIPTIONS = {
    "vir-check": "Virasoro group and algebra laws on seeded random data",
    "ch-evolve": "Evolve the Camassa-Holm family and monitor conserved quantities",
    "hopf-oracle": "Pseudo-spectral Hopf flow against the characteristics solution",
    "mv-run": "Moser-Veselov discrete rigid body: isospectrality and orthogonality",
    "mv-limit": "Convergence of the discrete rigid body to the Euler-Arnold flow",
    "hs-step": "Hunter-Saxton discretisation on Vir with the stationarity oracle",
    "hs-simple": "Hunter-Saxton discretisation on Diff(S^1) with the stationarity oracle",
    "invariance-check": "Inverse invariance of H for a derivative-only density",
}

DESCRIPTOR_SCHEMA = {
    "type": "object",
    "properties": {
        "experiment": {"enum": sorted(SCHEMAS)},
        "payload": {"type": "object"},
        "seed": {"type": "integer"},
        "output_dir": {"type": "string"},
    },
    "required": ["experiment"],
    "additionalProperties": False,
}


def _defaults(schema: dict) -> dict:
    return {k: copy.deepcopy(v["default"]) for k, v in schema["properties"].items()
            if "default" in v}


def _errors(schema, instance) -> list[str]:
    v = jsonschema.Draft202012Validator(schema)
    return [f"{'/'.join(map(str, e.absolute_path)) or '<root>'}: {e.message}"
            for e in sorted(v.iter_errors(instance), key=lambda e: list(e.absolute_path))]


def list_experiments() -> dict:
    """Name -> description, payload schema and defaults."""
    return {name: {"description": DESCRIPTIONS[name], "schema": SCHEMAS[name],
                   "defaults": _defaults(SCHEMAS[name])}
            for name in sorted(SCHEMAS)}


@dataclass
class RunDescriptor:
    experiment: str
    payload: dict = field(default_factory=dict)
    seed: int = 0
    output_dir: str = DEFAULT_OUT

    @classmethod
    def from_json(cls, data) -> "RunDescriptor":
        """Validate ``data`` and fill payload defaults.

        Raises
        ------
        DescriptorInvalid
            With one line per schema violation.
        """
        errs = _errors(DESCRIPTOR_SCHEMA, data)
        if not errs:
            errs = [f"payload/{e}" for e in _errors(SCHEMAS[data["experiment"]],
                                                    data.get("payload", {}))]
        if errs:
            raise DescriptorInvalid("invalid run descriptor:\n  " + "\n  ".join(errs))
        payload = _defaults(SCHEMAS[data["experiment"]])
        payload.update(copy.deepcopy(data.get("payload", {})))
        return cls(data["experiment"], payload, int(data.get("seed", 0)),
                   data.get("output_dir", DEFAULT_OUT))

    def to_json(self) -> dict:
        return {"experiment": self.experiment, "payload": self.payload,
                "seed": self.seed, "output_dir": self.output_dir}


@dataclass
class RunReport:
    descriptor: dict
    wall_time: float
    csv_path: str
    summary: dict
    verdicts: dict

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def to_json(self) -> dict:
        return {"descriptor": self.descriptor, "wall_time": self.wall_time,
                "csv_path": self.csv_path, "summary": self.summary,
                "verdicts": self.verdicts, "passed": self.passed}


# ---------------------------------------------------------------------------
# payload decoding

def field_from_json(data) -> cc.PeriodicFunction:
    if "samples" in data:
        return cc.PeriodicFunction.from_json(data)
    cfg = cc.GridConfig(data["n"])
    x = cfg.nodes
    fo = data["fourier"]
    s = np.full(cfg.n, float(fo.get("const", 0.0)))
    for k, a in enumerate(fo.get("cos", []), start=1):
        s += a * np.cos(k * x)
    for k, b in enumerate(fo.get("sin", []), start=1):
        s += b * np.sin(k * x)
    return cc.PeriodicFunction(s)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def write_csv(path: Path, header: list, rows: list) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


# ---------------------------------------------------------------------------
# runners: each returns (header, rows, summary, verdicts)

def _run_vir_check(p, rng):
    cfg = cc.GridConfig(p["n"])
    metrics = [vr.MetricParams(a, b) for a, b in ((1, 0), (0, 1), (1, 1), (2, 0.5))]
    rows = []
    B = vr.bott_cocycle
    for trial in range(p["trials"]):
        f, g, h = (cc.random_diffeo(rng, cfg, p["modes"], p["amplitude"], p["max_slope"])
                   for _ in range(3))
        X, Y, Z = (vr.VirasoroElement(q, rng.normal()) for q in (f, g, h))
        df, dF = vr.group_product(vr.group_product(X, Y), Z).distance(
            vr.group_product(X, vr.group_product(Y, Z)))
        cocycle = abs(B(cc.compose(f, g), h) + B(f, g) - B(f, cc.compose(g, h)) - B(g, h))

        xi, eta, zeta = (vr.VirasoroAlgebraElement(
            cc.random_trig_poly(rng, cfg, p["algebra_modes"], 1.0), rng.normal())
            for _ in range(3))
        br = vr.gelfand_fuchs_bracket
        anti = br(xi, eta) + br(eta, xi)
        jac = br(br(xi, eta), zeta) + br(br(eta, zeta), xi) + br(br(zeta, xi), eta)
        metric = 0.0
        for m in metrics:
            lhs = vr.h1_inner(xi, eta, m)
            rhs = vr.pairing(vr.inertia_apply(xi, m), eta)
            metric = max(metric, abs(lhs - rhs))
        rows.append([trial, df, dF, cocycle, anti.v.sup_norm(), abs(anti.a),
                     jac.v.sup_norm(), abs(jac.a), metric])
    arr = np.array(rows)[:, 1:]
    worst = dict(zip(["assoc_f", "assoc_F", "cocycle", "antisym_vector", "antisym_central",
                      "jacobi_vector", "jacobi_central", "metric"], arr.max(axis=0).tolist()))
    sx = cc.PeriodicFunction.from_callable(np.sin, cfg)
    cx = cc.PeriodicFunction.from_callable(np.cos, cfg)
    gf = vr.gelfand_fuchs_bracket(vr.VirasoroAlgebraElement(sx), vr.VirasoroAlgebraElement(cx))
    worst["gf_example_error"] = abs(gf.a + np.pi)
    verdicts = {
        "group_associativity": worst["assoc_f"] < p["group_tol"] and worst["assoc_F"] < p["group_tol"],
        "cocycle_identity": worst["cocycle"] < p["group_tol"],
        "bracket_vector": max(worst["antisym_vector"], worst["jacobi_vector"]) < p["vector_tol"],
        "bracket_central": max(worst["antisym_central"], worst["jacobi_central"]) < p["central_tol"],
        "gf_example": worst["gf_example_error"] < 1e-10,
        "metric_compatibility": worst["metric"] < p["metric_tol"],
    }
    header = ["trial", "assoc_f", "assoc_F", "cocycle", "antisym_vector", "antisym_central",
              "jacobi_vector", "jacobi_central", "metric"]
    return header, rows, worst, verdicts


def _run_ch_evolve(p, rng):
    params = ch.CHParams(**p["params"])
    v0 = field_from_json(p["v0"])
    rows = []

    def observe(step, s):
        q = ch.conserved_quantities(s, params)
        rows.append([step, s.t, q.momentum, q.energy, s.v.sup_norm()])

    ch.evolve(ch.VelocityState(v0), params, p["dt"], p["steps"],
              observer=observe, record_every=p["record_every"])
    mom = np.array([r[2] for r in rows])
    en = np.array([r[3] for r in rows])
    summary = {"orbit": ch.classify(params).value,
               "momentum_drift": float(np.max(np.abs(mom - mom[0]))),
               "energy_drift": float(np.max(np.abs(en - en[0])))}
    verdicts = {"momentum_conserved": summary["momentum_drift"] < p["drift_tol"],
                "energy_conserved": summary["energy_drift"] < p["drift_tol"]}
    if p["residual_trials"]:
        worst = 0.0
        for _ in range(p["residual_trials"]):
            v = cc.random_trig_poly(rng, v0.n, 8, 0.3)
            vt = ch.rhs(ch.VelocityState(v), params)
            worst = max(worst, ch.ch1_residual(v, vt, params).sup_norm())
        summary["ch1_residual"] = worst
        verdicts["ch1_residual"] = worst < p["residual_tol"]
    return ["step", "t", "momentum", "energy", "sup_norm"], rows, summary, verdicts


def _run_hopf(p, rng):
    v0 = field_from_json(p["v0"])
    t_end = p["fraction"] * ch.hopf_shock_time(v0)
    dt = t_end / p["steps"]
    rows = []
    nodes = v0.nodes

    def observe(step, s):
        exact = ch.hopf_characteristics(v0, s.t, nodes)
        rows.append([step, s.t, float(np.max(np.abs(exact - s.v.samples)))])

    ch.evolve(ch.VelocityState(v0), ch.CHParams(1.0, 0.0, 0.0), dt, p["steps"],
              observer=observe, record_every=p["record_every"])
    if rows[-1][0] != p["steps"]:
        raise RuntimeError("record_every must divide steps")
    summary = {"t_shock": ch.hopf_shock_time(v0), "t_end": t_end, "final_error": rows[-1][2]}
    return ["step", "t", "sup_error"], rows, summary, {"oracle_agreement": rows[-1][2] < p["tol"]}


def _body_and_omega(p, rng):
    J = rb.BodyTensor(np.array(p["J"], dtype=float))
    if p["omega0"] is None:
        omega0 = rb.random_rotation(rng, J.N, p["omega_scale"])
    else:
        omega0 = rb.check_rotation(np.array(p["omega0"], dtype=float))
    return J, omega0


def _run_mv_run(p, rng):
    J, omega0 = _body_and_omega(p, rng)
    Ms, omegas = rb.mv_trajectory(omega0, J, p["steps"])
    spec0 = rb.spectrum(Ms[0])
    rows = []
    spec_drift = orth = 0.0
    for k, (M, om) in enumerate(zip(Ms, omegas)):
        sp = rb.spectrum(M)
        o = rb.orthogonality_residual(om)
        spec_drift = max(spec_drift, float(np.max(np.abs(sp - spec0))))
        orth = max(orth, o)
        if k % p["record_every"] == 0:
            rows.append([k, *sp, o, rb.kinetic_energy(M, J)])
    summary = {"spectrum_drift": spec_drift, "orthogonality": orth}
    verdicts = {"isospectral": spec_drift < p["spectrum_tol"],
                "orthogonal": orth < p["orthogonality_tol"]}
    if p["roundtrip_trials"]:
        worst = 0.0
        for _ in range(p["roundtrip_trials"]):
            N = int(rng.integers(2, p["roundtrip_max_n"] + 1))
            A = rng.standard_normal((N, N))
            Jr = rb.BodyTensor(A @ A.T + np.eye(N))
            om = rb.random_rotation(rng, N, 0.3)
            worst = max(worst, float(np.max(np.abs(rb.solve_omega(rb.momentum(om, Jr), Jr) - om))))
        summary["roundtrip_error"] = worst
        verdicts["solve_roundtrip"] = worst < p["roundtrip_tol"]
    header = ["step", *[f"spectrum_{i}" for i in range(J.N)], "orthogonality", "energy"]
    return header, rows, summary, verdicts


def _run_mv_limit(p, rng):
    J, omega0 = _body_and_omega(p, rng)
    M0 = rb.momentum(omega0, J)
    eps = np.array(p["epsilons"], dtype=float)
    errs = [rb.limit_error(M0, J, e, p["T"], p["dt_for_limit"]) for e in eps]
    slope = float(np.polyfit(np.log(eps), np.log(errs), 1)[0])
    rows = [[e, int(round(p["T"] / e)), err] for e, err in zip(eps, errs)]
    return (["epsilon", "steps", "error"], rows, {"slope": slope},
            {"convergence_order": slope >= p["slope_min"]})


def _initial_velocity(p, rng):
    if p["omega0"] is not None:
        return cc.CircleDiffeo(field_from_json(p["omega0"]))
    return cc.random_diffeo(rng, p["n"], modes=4, amplitude=0.2, max_slope=0.3, rotate=False)


def _run_hs(p, rng):
    omega1 = _initial_velocity(p, rng)
    Vd = dv.LagrangianDensityV.sqrt()
    simple = p["stepper"] == "hs_simple"
    if simple:
        omegas = dv.simple_trajectory(omega1, p["steps"], p["rotation"])
        params = [dv.simple_constant(w) for w in omegas[:-1]]
        residuals = [dv.simple_residual(a, b) for a, b in zip(omegas[:-1], omegas[1:])]
        Omega = 0.0
    else:
        mode = p["mode"]
        C = None
        if isinstance(mode, dict):
            mode, C = "fix_C", mode["fix_C"]
        Omega = p["Omega"]
        omegas, diags = dv.hs_trajectory(omega1, Omega, p["steps"], mode, C, p["rotation"])
        params = [d.C for d in diags]
        residuals = [dv.el2_residual(a, b, Omega) for a, b in zip(omegas[:-1], omegas[1:])]
    seq = dv.assemble_sequence(omegas, Omega)
    rows = []
    stat = []
    for k in range(1, p["steps"] + 1):
        s = None
        if p["stationarity"]:
            s = dv.stationarity_residual(Vd, seq, k, p["directions"], seed=k)
            stat.append(s)
        rows.append([k, residuals[k - 1], float(np.min(omegas[k].slope().samples)),
                     params[k - 1], s])
    spread = max(abs(dv.discrete_velocity(seq, l).Omega - Omega) for l in range(1, len(seq)))
    summary = {"max_step_residual": max(residuals), "Omega_spread": spread}
    verdicts = {"step_residual": max(residuals) < p["el2_tol"],
                "Omega_constant": spread < 1e-9}
    if stat:
        summary["max_stationarity"] = max(stat)
        verdicts["stationary"] = max(stat) < p["stationarity_tol"]
        if simple:
            rev = seq.reversed()
            back = max(dv.stationarity_residual(Vd, rev, k, p["directions"], seed=k)
                       for k in range(1, len(rev) - 1))
            summary["reversed_stationarity"] = back
            verdicts["time_reversal"] = back < p["stationarity_tol"]
        if p["negative_control"]:
            # a bump on one interior point must be detected
            k = 1 + p["steps"] // 2
            x = seq[k]
            bump = 0.05 * np.sin(3 * x.f.u.nodes)
            bad = seq.replace(k, vr.VirasoroElement(cc.CircleDiffeo(x.f.u + bump), x.F))
            neg = dv.stationarity_residual(Vd, bad, k, p["directions"], seed=k)
            summary["negative_control_residual"] = neg
            verdicts["negative_control_detected"] = neg > p["negative_tol"]
    if simple and p["rootfind_trials"]:
        worst = 0.0
        for _ in range(p["rootfind_trials"]):
            w = cc.random_diffeo(rng, p["n"], modes=8, amplitude=0.3, max_slope=0.5)
            worst = max(worst, abs(dv.simple_constant(w) - dv.simple_constant_rootfind(w)))
        ident = dv.hs_simple_step(cc.identity(p["n"]), p["rotation"])
        # the constant fixes omega^{-1}(0), so the step is x -> x - rotation
        rot_err = ident.distance(cc.rotation(-p["rotation"], p["n"]))
        summary.update(closed_form_error=worst, identity_rotation_error=rot_err)
        verdicts["closed_form"] = worst < p["rootfind_tol"]
        verdicts["identity_rotation"] = rot_err < p["rootfind_tol"]
    header = ["step", "step_residual", "min_omega_prime", "c" if simple else "C", "stationarity"]
    return header, rows, summary, verdicts


def _run_invariance(p, rng):
    Vd = dv.DENSITIES[p["V"]]()
    rep = dv.check_inverse_invariance(Vd, p["trials"], seed=int(rng.integers(2**31)),
                                      n=p["n"], h_tol=p["h_tol"])
    rows = [[i, d] for i, d in enumerate(rep.defects)]
    summary = {"h_defect": rep.h_defect, "cond_defect": rep.cond_defect}
    return ["trial", "h_defect"], rows, summary, {"inverse_invariant": rep.invariant}


RUNNERS = {
    "vir-check": _run_vir_check,
    "ch-evolve": _run_ch_evolve,
    "hopf-oracle": _run_hopf,
    "mv-run": _run_mv_run,
    "mv-limit": _run_mv_limit,
    "hs-step": _run_hs,
    "hs-simple": _run_hs,
    "invariance-check": _run_invariance,
}


def resolve_output_dir(d: RunDescriptor, override: str | None = None) -> Path:
    """``override`` beats ``$VIR_LAB_OUT``, which beats the descriptor."""
    return Path(override or os.environ.get("VIR_LAB_OUT") or d.output_dir)


def run(d: RunDescriptor, output_dir: str | None = None) -> RunReport:
    """Execute an experiment and write ``<name>.csv`` and ``<name>.report.json``."""
    out = resolve_output_dir(d, output_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(d.seed)
    t0 = time.perf_counter()
    header, rows, summary, verdicts = RUNNERS[d.experiment](d.payload, rng)
    wall = time.perf_counter() - t0
    csv_path = out / f"{d.experiment}.csv"
    write_csv(csv_path, header, rows)
    report = RunReport(d.to_json(), wall, str(csv_path),
                       {k: (float(v) if isinstance(v, (float, np.floating)) else v)
                        for k, v in summary.items()},
                       {k: bool(v) for k, v in verdicts.items()})
    with open(out / f"{d.experiment}.report.json", "w") as fh:
        json.dump(report.to_json(), fh, indent=2)
    return report
