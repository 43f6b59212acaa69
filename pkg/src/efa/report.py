"""Pipeline orchestration, self-contained reports and their re-verification."""

from __future__ import annotations

import time
from dataclasses import dataclass, field as dc_field

from .arith import AlgebraicNumber, KElement, NumberField, compose_extension
from .desingular import (
    Desingularization,
    ExceptionalSet,
    IterationCapExceeded,
    TransformMatrix,
    _cokernel_value,
    _det_poly,
    _direct_pins,
    conjugate_value,
    desingularize,
    exceptional_derivative_values,
    local_certificate,
    nonzero_roots,
    polynomial_part_decomposition,
    relations_at_singularity,
    terminal_certificate,
)
from .inhomog import (
    InhomEq,
    SystemMatrix,
    _normalize_tuple,
    minimal_inhomogeneous,
    normalize,
    relation_residual,
    transcendence_verdict,
)
from .io import (
    algebraic_from_json,
    algebraic_to_json,
    elem_from_json,
    elem_to_json,
    elemmatrix_from_json,
    field_from_json,
    field_to_json,
    input_from_json,
    input_to_json,
    matrix_to_json,
    operator_from_json,
    operator_to_json,
    poly_from_json,
    poly_to_json,
    polymatrix_from_json,
    ratfun_from_json,
    ratfun_to_json,
    ratmatrix_from_json,
)
from .minhomog import SieveLimitExceeded, certification_data, find_min_operator
from .numeric import corroborate
from .operators import DiffOp
from .poly import KPoly, KRatFun
from .ratsol import LinearSystem
from .series import EFunctionInput, InternalInconsistencyError, LazySeries

FORMAT = "efa-report/1"


@dataclass
class AnalysisConfig:
    degree_cap: int | None = None
    series_check_order: int = 200
    residual_order: int = 100
    shear_check_order: int = 80
    window: int = 10
    fast: bool = False
    digits: int = 50
    iteration_cap: int | None = None
    corroborate: bool = True
    derivatives: bool = True
    decomposition: bool = True
    decomposition_terms: int = 21

    def to_json(self) -> dict:
        return dict(self.__dict__)

    @classmethod
    def from_json(cls, d: dict) -> AnalysisConfig:
        return cls(**{k: v for k, v in d.items() if k in cls.__dataclass_fields__})


@dataclass
class PointRecord:
    """One representative root of an irreducible factor of ``u_0``."""

    factor: KPoly
    field: NumberField
    alpha: KElement
    roots: list[AlgebraicNumber]
    pole_order: int
    direct: list[list[KElement]]
    M: list[list[KPoly]] | None


@dataclass
class ValueRecord:
    alpha: AlgebraicNumber
    value: AlgebraicNumber
    kind: str
    point: int | None = None  # index into points; None for alpha = 0
    value_element: KElement | None = None
    vector: list[KElement] | None = None
    direct_relation: list[KElement] | None = None


@dataclass
class AnalysisReport:
    input: EFunctionInput
    config: AnalysisConfig
    status: str = "complete"
    flags: list[str] = dc_field(default_factory=list)
    min_operator: DiffOp | None = None
    minimal_within_cap: bool = False
    min_certificate: dict = dc_field(default_factory=dict)
    min_log: list[str] = dc_field(default_factory=list)
    has_rational_solution: bool | None = None
    relation: InhomEq | None = None
    verdict: str | None = None
    polynomial: KPoly | None = None
    system: list[list[KRatFun]] | None = None
    iteration_cap: int | None = None
    global_transform: dict | None = None
    points: list[PointRecord] = dc_field(default_factory=list)
    exceptional: list[ValueRecord] = dc_field(default_factory=list)
    derivatives: dict[int, list[ValueRecord]] = dc_field(default_factory=dict)
    decomposition: dict | None = None
    notes: list[str] = dc_field(default_factory=list)
    timings_ms: dict[str, int] = dc_field(default_factory=dict)
    partial: dict | None = None

    def exceptional_pairs(self) -> set[tuple[AlgebraicNumber, AlgebraicNumber]]:
        return {(e.alpha, e.value) for e in self.exceptional}

    def series(self) -> LazySeries:
        return self.input.series()

    def to_json(self) -> dict:
        return report_to_json(self)


# orchestration

def _records(exc: ExceptionalSet, D: Desingularization | None) -> list[ValueRecord]:
    out = []
    index = {}
    if D is not None:
        for i, pd in enumerate(D.points):
            for a in pd.roots:
                index[a] = i
    for e in exc.entries:
        c = e.certificate
        out.append(ValueRecord(
            e.alpha, e.value, c.get("kind", "taylor"), index.get(e.alpha),
            c.get("value_element"), c.get("vector"), c.get("direct_relation")))
    return out


def _point_records(D: Desingularization) -> list[PointRecord]:
    out = []
    for pd in D.points:
        T = pd.transform
        M = T.M if (T is not None and T is not D.global_transform) else None
        k = relations_at_singularity(pd.system, pd.alpha)[0] if pd.direct else 0
        out.append(PointRecord(pd.factor, pd.extension.field, pd.alpha, list(pd.roots), k, pd.direct, M))
    return out


def _tick(report: AnalysisReport, name: str, t0: float) -> float:
    t1 = time.perf_counter()
    report.timings_ms[name] = int(round((t1 - t0) * 1000))
    return t1


def analyze(inp: EFunctionInput, config: AnalysisConfig | None = None) -> AnalysisReport:
    """Run the four steps; cap overruns yield a flagged partial report."""
    config = config or AnalysisConfig()
    rep = AnalysisReport(inp, config)
    f = inp.series()
    t = time.perf_counter()
    try:
        mo = find_min_operator(inp, config.degree_cap)
    except SieveLimitExceeded as e:
        rep.status = "partial"
        rep.flags.append("sieve_limit_exceeded")
        rep.partial = {"stage": "minimal operator", "message": str(e)}
        _tick(rep, "minimal_operator", t)
        return rep
    rep.min_operator = mo.operator
    rep.minimal_within_cap = mo.minimal_within_cap
    rep.min_certificate = dict(mo.certificate, degree_cap=mo.degree_cap)
    rep.min_log = mo.log
    if mo.minimal_within_cap:
        rep.flags.append("minimal_within_degree_cap")
    t = _tick(rep, "minimal_operator", t)

    eq = minimal_inhomogeneous(mo.operator, f, config.window)
    rep.relation = eq
    rep.has_rational_solution = eq.s < mo.order
    verdict = transcendence_verdict(eq)
    rep.verdict = verdict.kind
    rep.polynomial = verdict.polynomial
    t = _tick(rep, "inhomogeneous", t)
    if verdict.kind == "polynomial":
        rep.notes.append("f is a polynomial: algebraic at every algebraic point")
        return rep

    S = normalize(eq)
    rep.system = S.B
    try:
        D = desingularize(S, iteration_cap=config.iteration_cap, fast=config.fast)
    except IterationCapExceeded as e:
        rep.status = "partial"
        rep.flags.append("iteration_cap_exceeded")
        p = e.partial
        rep.partial = {"stage": "singularity removal", "message": str(e),
                       "field": p["point"].field, "point": p["point"], "M": p["M"], "B": p["B"]}
        _tick(rep, "desingularization", t)
        return rep
    rep.iteration_cap = D.iteration_cap
    if D.global_transform is not None:
        T = D.global_transform
        rep.global_transform = {"M": T.M, "N": T.N, "det": T.det, "steps": T.steps}
    exc = exceptional_derivative_values(D, 0, f)
    rep.points = _point_records(D)
    rep.exceptional = _records(exc, D)
    if config.derivatives:
        for j in range(1, eq.s):
            rep.derivatives[j] = _records(exceptional_derivative_values(D, j, f), D)
    # fast mode may have filled transforms lazily while answering derivative queries
    rep.points = _point_records(D)
    t = _tick(rep, "desingularization", t)

    if config.decomposition and len(exc.entries) > 1:
        try:
            dec = polynomial_part_decomposition(D, exc, f)
        except NotImplementedError:
            rep.notes.append("decomposition skipped: exceptional points outside the coefficient field")
        else:
            rep.decomposition = {
                "p": dec.p,
                "points": dec.elements,
                "multiplicities": dec.multiplicities,
                "g": dec.g.coefficients(config.decomposition_terms - 1),
            }
        t = _tick(rep, "decomposition", t)

    if config.corroborate:
        rep.notes.extend(corroborate(
            f, [(e.alpha, e.value) for e in rep.exceptional], [r for pr in rep.points for r in pr.roots],
            config.digits, derivatives={j: [(e.alpha, e.value) for e in recs] for j, recs in rep.derivatives.items()}))
        _tick(rep, "corroboration", t)
    return rep


# serialization

def _value_to_json(v: ValueRecord, F: NumberField | None) -> dict:
    d = {"alpha": algebraic_to_json(v.alpha), "value": algebraic_to_json(v.value), "kind": v.kind,
         "point": v.point}
    if v.value_element is not None:
        d["value_element"] = elem_to_json(v.value_element)
    if v.vector is not None:
        d["vector"] = [elem_to_json(x) for x in v.vector]
    if v.direct_relation is not None:
        d["direct_relation"] = [elem_to_json(x) for x in v.direct_relation]
    return d


def _value_from_json(d: dict, points: list[PointRecord], K: NumberField) -> ValueRecord:
    F = points[d["point"]].field if d.get("point") is not None else K
    v = ValueRecord(algebraic_from_json(d["alpha"]), algebraic_from_json(d["value"]), d["kind"], d.get("point"))
    if "value_element" in d:
        v.value_element = elem_from_json(F, d["value_element"])
    if "vector" in d:
        v.vector = [elem_from_json(F, x) for x in d["vector"]]
    if "direct_relation" in d:
        v.direct_relation = [elem_from_json(F, x) for x in d["direct_relation"]]
    return v


def report_to_json(rep: AnalysisReport) -> dict:
    K = rep.input.field
    d: dict = {
        "format": FORMAT,
        "status": rep.status,
        "flags": list(rep.flags),
        "input": input_to_json(rep.input),
        "config": rep.config.to_json(),
    }
    if rep.min_operator is not None:
        cert = dict(rep.min_certificate)
        if cert.get("annihilator") is not None:
            cert["annihilator"] = operator_to_json(cert["annihilator"])
        d["minimal_operator"] = {
            "operator": operator_to_json(rep.min_operator),
            "order": rep.min_operator.order,
            "degree": rep.min_operator.degree,
            "minimal_within_cap": rep.minimal_within_cap,
            "certificate": cert,
            "log": rep.min_log,
        }
    if rep.relation is not None:
        eq = rep.relation
        d["inhomogeneous"] = {
            "s": eq.s,
            "Q": [ratfun_to_json(q) for q in eq.Q],
            "c": elem_to_json(eq.c),
            "u": [poly_to_json(p) for p in eq.u],
            "u0": poly_to_json(eq.u0),
            "rational_solution": rep.has_rational_solution,
        }
        d["verdict"] = {"kind": rep.verdict,
                        "polynomial": poly_to_json(rep.polynomial) if rep.polynomial is not None else None}
    if rep.system is not None:
        d["system"] = matrix_to_json(rep.system)
    if rep.iteration_cap is not None:
        g = rep.global_transform
        d["desingularization"] = {
            "iteration_cap": rep.iteration_cap,
            "global": None if g is None else {
                "M": matrix_to_json(g["M"]), "N": matrix_to_json(g["N"]),
                "det": poly_to_json(g["det"]), "steps": g["steps"]},
            "points": [{
                "factor": poly_to_json(p.factor),
                "field": field_to_json(p.field),
                "alpha": elem_to_json(p.alpha),
                "roots": [algebraic_to_json(r) for r in p.roots],
                "pole_order": p.pole_order,
                "direct": matrix_to_json(p.direct),
                "M": matrix_to_json(p.M) if p.M is not None else None,
            } for p in rep.points],
        }
        d["exceptional"] = [_value_to_json(v, K) for v in rep.exceptional]
        d["derivatives"] = {str(j): [_value_to_json(v, K) for v in vs] for j, vs in rep.derivatives.items()}
    if rep.decomposition is not None:
        dec = rep.decomposition
        d["decomposition"] = {
            "p": poly_to_json(dec["p"]),
            "points": [elem_to_json(a) for a in dec["points"]],
            "multiplicities": dec["multiplicities"],
            "g": [elem_to_json(c) for c in dec["g"]],
        }
    if rep.partial is not None:
        p = dict(rep.partial)
        if "M" in p:
            F = p.pop("field")
            p["field"] = field_to_json(F)
            p["point"] = elem_to_json(p["point"])
            p["M"] = matrix_to_json(p["M"])
            p["B"] = matrix_to_json(p["B"])
        d["partial"] = p
    d["notes"] = list(rep.notes)
    d["timings_ms"] = dict(rep.timings_ms)
    return d


def report_from_json(d: dict) -> AnalysisReport:
    if d.get("format") != FORMAT:
        raise ValueError(f"unknown report format {d.get('format')!r}")
    inp = input_from_json(d["input"])
    K = inp.field
    rep = AnalysisReport(inp, AnalysisConfig.from_json(d["config"]), d["status"], list(d["flags"]))
    mo = d.get("minimal_operator")
    if mo is not None:
        rep.min_operator = operator_from_json(K, mo["operator"])
        rep.minimal_within_cap = mo["minimal_within_cap"]
        cert = dict(mo["certificate"])
        if cert.get("annihilator") is not None:
            cert["annihilator"] = operator_from_json(K, cert["annihilator"])
        rep.min_certificate = cert
        rep.min_log = list(mo["log"])
    ih = d.get("inhomogeneous")
    if ih is not None:
        Q = [ratfun_from_json(K, q) for q in ih["Q"]]
        rep.relation = InhomEq(ih["s"], Q, elem_from_json(K, ih["c"]),
                               [poly_from_json(K, p) for p in ih["u"]], rep.min_operator)
        rep.has_rational_solution = ih["rational_solution"]
        rep.verdict = d["verdict"]["kind"]
        pj = d["verdict"]["polynomial"]
        rep.polynomial = poly_from_json(K, pj) if pj is not None else None
    if "system" in d:
        rep.system = ratmatrix_from_json(K, d["system"])
    ds = d.get("desingularization")
    if ds is not None:
        rep.iteration_cap = ds["iteration_cap"]
        g = ds["global"]
        if g is not None:
            rep.global_transform = {"M": polymatrix_from_json(K, g["M"]), "N": ratmatrix_from_json(K, g["N"]),
                                    "det": poly_from_json(K, g["det"]), "steps": g["steps"]}
        for p in ds["points"]:
            F = field_from_json(p["field"])
            rep.points.append(PointRecord(
                poly_from_json(K, p["factor"]), F, elem_from_json(F, p["alpha"]),
                [algebraic_from_json(r) for r in p["roots"]], p["pole_order"],
                elemmatrix_from_json(F, p["direct"]),
                polymatrix_from_json(F, p["M"]) if p["M"] is not None else None))
        rep.exceptional = [_value_from_json(v, rep.points, K) for v in d["exceptional"]]
        rep.derivatives = {int(j): [_value_from_json(v, rep.points, K) for v in vs]
                           for j, vs in d["derivatives"].items()}
    dec = d.get("decomposition")
    if dec is not None:
        rep.decomposition = {
            "p": poly_from_json(K, dec["p"]),
            "points": [elem_from_json(K, a) for a in dec["points"]],
            "multiplicities": list(dec["multiplicities"]),
            "g": [elem_from_json(K, c) for c in dec["g"]],
        }
    if "partial" in d:
        p = dict(d["partial"])
        if "M" in p:
            F = field_from_json(p["field"])
            p["field"] = F
            p["point"] = elem_from_json(F, p["point"])
            p["M"] = polymatrix_from_json(F, p["M"])
            p["B"] = ratmatrix_from_json(F, p["B"])
        rep.partial = p
    rep.notes = list(d.get("notes", []))
    rep.timings_ms = dict(d.get("timings_ms", {}))
    return rep


# re-verification

@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""


def _is_laurent(x: KRatFun) -> bool:
    return x.den.degree == x.den.valuation()


def _check_values(rep: AnalysisReport, records: list[ValueRecord], j: int, f: LazySeries,
                  S: SystemMatrix, out: list[Check]) -> None:
    K = rep.input.field
    tag = "f" if j == 0 else f"f^({j})"
    zero = [v for v in records if v.point is None]
    fact = 1
    for t in range(2, j + 1):
        fact *= t
    want0 = AlgebraicNumber.from_element(f.coefficients(j)[j] * fact)
    out.append(Check(f"{tag}(0) from the Taylor seed", len(zero) == 1 and zero[0].value == want0,
                     f"claimed {[v.value for v in zero]}, series gives {want0}"))
    claimed = {v.point for v in records if v.point is not None}
    for i, pr in enumerate(rep.points):
        ext = compose_extension(K, pr.roots[0])
        same = ext.field == pr.field and ext.alpha.poly == pr.alpha.poly
        if not same:
            out.append(Check(f"point {i}: extension", False, "recomputed extension differs"))
            continue
        B = [[x.map(ext) for x in row] for row in S.B]
        if i in claimed:
            recs = [v for v in records if v.point == i]
            val = recs[0].value_element
        else:
            recs, val = [], None
        # cokernel test on M(alpha)
        if pr.M is not None:
            Ma = [[x(pr.alpha) for x in row] for row in pr.M]
        elif rep.global_transform is not None and pr.field == K:
            Ma = [[x(pr.alpha) for x in row] for row in rep.global_transform["M"]]
        else:
            Ma = None
        if Ma is not None:
            cv = _cokernel_value(Ma, j + 1)
            ok = (cv is None and val is None) or (cv is not None and val is not None and cv == val)
            if ok and recs and recs[0].vector is not None:
                lam = recs[0].vector
                ok = all(sum((lam[r] * Ma[r][c] for r in range(len(lam))), pr.field.zero).is_zero()
                         for c in range(len(lam))) and -lam[0] == val and lam[j + 1] == pr.field.one
            out.append(Check(f"point {i}: cokernel test for {tag}", ok,
                             f"alpha ~ {pr.roots[0].approx(10)}, value element {val}"))
        else:
            pinned = _direct_pins(relations_at_singularity(B, pr.alpha)[1], j)
            out.append(Check(f"point {i}: direct relation for {tag}", pinned is not None and pinned == val,
                             f"alpha ~ {pr.roots[0].approx(10)}"))
        for v in recs:
            want = conjugate_value(val, ext, v.alpha)
            out.append(Check(f"point {i}: value at {v.alpha.approx(10)}", want == v.value,
                             f"claimed {v.value.approx(12)}"))
        got_roots = {v.alpha for v in recs}
        if val is not None and got_roots != set(pr.roots):
            out.append(Check(f"point {i}: conjugates listed", False, "missing conjugate roots"))


def verify_report(rep: AnalysisReport | dict) -> list[Check]:
    """Recompute every certificate in a report."""
    if isinstance(rep, dict):
        rep = report_from_json(rep)
    cfg = rep.config
    out: list[Check] = []
    inp = rep.input
    K = inp.field
    f = inp.series()
    if rep.min_operator is None:
        out.append(Check("report carries a minimal operator", False, "partial report"))
        return out
    L = rep.min_operator
    r = L.order
    order = cfg.series_check_order
    image = L.apply_series(f.coefficients(order + r))[: order + 1]
    out.append(Check(f"L_min annihilates the series to order {order}", all(c.is_zero() for c in image)))
    if not L.same_up_to_factor(inp.operator):
        ok, _, m_A = certification_data(inp.operator, L, f)
        out.append(Check("L_min certified via the annihilator of its image", ok, f"m_A = {m_A}"))

    eq = rep.relation
    if eq is None:
        return out
    res = relation_residual(eq, f, cfg.residual_order)
    out.append(Check(f"relation residual vanishes to order {cfg.residual_order}", all(c.is_zero() for c in res)))
    out.append(Check("normalized tuple u matches (Q, c)", _normalize_tuple(eq.Q, eq.c) == eq.u))
    if eq.s == r - 1:
        sysm = LinearSystem.companion(L.primitive())
        out.append(Check("Q solves the companion system", sysm.is_solution(eq.Q)))
    else:
        out.append(Check("relation is the homogeneous equation", eq.s == r and eq.c.is_zero()
                         and DiffOp(K, eq.Q).same_up_to_factor(L)))
    if rep.verdict == "polynomial":
        p = rep.polynomial
        ok = eq.s == 0 and KRatFun(p) * eq.Q[0] == KRatFun.constant(K, eq.c)
        cs = f.coefficients(max(p.degree, 0) + cfg.residual_order)
        ok = ok and all(cs[n] == p[n] for n in range(len(cs)))
        out.append(Check("polynomial verdict matches the series", ok))
        return out
    if rep.system is None:
        return out
    S = normalize(eq)
    out.append(Check("system matrix B matches the relation", S.B == rep.system))
    if rep.status != "complete":
        out.append(Check("report is complete", False, ", ".join(rep.flags)))
        return out

    roots = nonzero_roots(S)
    facs = sorted(str(g.factor) for g in roots.groups)
    out.append(Check("every nonzero root of u_0 is processed", facs == sorted(str(p.factor) for p in rep.points)))
    g = rep.global_transform
    if g is not None:
        T = TransformMatrix(K, g["M"], g["N"], g["det"], g["steps"])
        ok, N = terminal_certificate(S, T)
        ok = ok and _det_poly(g["M"]) == g["det"] and not g["det"].is_zero()
        out.append(Check("terminal certificate: M^-1 B M - M^-1 M' has poles only at 0", ok))
    for i, pr in enumerate(rep.points):
        if pr.M is None:
            continue
        ext = compose_extension(K, pr.roots[0])
        B = [[x.map(ext) for x in row] for row in S.B]
        T = TransformMatrix(pr.field, pr.M, [], _det_poly(pr.M), 0)
        ok = not T.det.is_zero() and local_certificate(B, T, pr.alpha)[0]
        out.append(Check(f"point {i}: transformed system is regular at alpha", ok))
    _check_values(rep, rep.exceptional, 0, f, S, out)
    for j, recs in rep.derivatives.items():
        _check_values(rep, recs, j, f, S, out)
    dec = rep.decomposition
    if dec is not None:
        n = len(dec["g"])
        den = KPoly.constant(K, 1)
        for a, m in zip(dec["points"], dec["multiplicities"]):
            den = den * KPoly(K, [-a, K.one]) ** m
        prod = (KPoly(K, dec["g"]) * den)
        cs = f.coefficients(n - 1)
        ok = all(cs[k] == dec["p"][k] + prod[k] for k in range(n))
        out.append(Check("decomposition f = p + prod (z - alpha)^m g to the listed order", ok))
    return out


def run_with_timing(inp: EFunctionInput, config: AnalysisConfig | None = None) -> tuple[AnalysisReport, float]:
    t = time.perf_counter()
    rep = analyze(inp, config)
    return rep, time.perf_counter() - t


__all__ = [
    "AnalysisConfig",
    "AnalysisReport",
    "Check",
    "InternalInconsistencyError",
    "PointRecord",
    "ValueRecord",
    "analyze",
    "report_from_json",
    "report_to_json",
    "verify_report",
]
