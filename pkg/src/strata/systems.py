"""Iterated universal extensions and mixed (co)stratifying systems."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .exactlin import rank, vstack
from .homext import (
    Conflation,
    dualize_conflation,
    ext1_dim,
    hom_space,
    pullback,
    universal_extension,
)
from .module import (
    Module,
    ModuleMap,
    cokernel,
    dualize,
    is_brick,
    is_indecomposable,
    kernel,
    left_minimal,
    minimal_left_approximation,
    radical,
    right_minimal,
)
from .strata import (
    FiltrationCertificate,
    filtration_membership,
    verify_mixed_standardizable,
)


class CapExceeded(RuntimeError):
    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class SystemError_(RuntimeError):
    """A construction postcondition failed (signals an implementation bug)."""


def default_cap(A) -> int:
    return 10 * A.dim


# -- universal extension sequences ----------------------------------------------


@dataclass
class UnivExtTrace:
    target: Module
    modules: list[Module]
    deflations: list[ModuleMap]
    d: list[int]
    kernels: list[Module]
    certificates: list[object]
    status: str  # "stabilized" or "cap_exceeded"
    steps: int
    brick: bool

    @property
    def final(self) -> Module:
        return self.modules[-1]

    def composite(self) -> ModuleMap:
        """The deflation ``P_s -> M`` obtained by composing every step."""
        alpha = ModuleMap.identity(self.modules[0])
        for a in self.deflations:
            alpha = a.then(alpha)
        return alpha

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "steps": self.steps,
            "d": self.d,
            "dims": [list(m.dims) for m in self.modules],
            "total_dims": [m.dim for m in self.modules],
            "kernel_dims": [list(k.dims) for k in self.kernels],
            "brick_target": self.brick,
        }


def universal_extension_sequence(M: Module, N: Module, cap: int | None = None, *, certify: bool = True) -> UnivExtTrace:
    """Iterate universal extensions of ``M`` by ``N`` until ``Ext^1(P_s, N) = 0``."""
    cap = default_cap(M.A) if cap is None else cap
    if cap < 1:
        raise ValueError("cap must be at least 1")
    if not is_indecomposable(N):
        raise ValueError("target module must be indecomposable")
    brick = is_brick(N)
    modules = [M]
    deflations: list[ModuleMap] = []
    ds: list[int] = []
    kernels: list[Module] = []
    certs: list[object] = []
    alpha = ModuleMap.identity(M)
    status = "cap_exceeded"
    steps = 0
    while True:
        P = modules[-1]
        if ext1_dim(P, N) == 0:
            status = "stabilized"
            ds.append(0)
            break
        if steps >= cap:
            break
        ue = universal_extension(P, N, check_indecomposable=False)
        ds.append(ue.d)
        a = ue.conflation.proj
        deflations.append(a)
        modules.append(ue.conflation.E)
        alpha = a.then(alpha)
        K, _ = kernel(alpha)
        kernels.append(K)
        if certify:
            certs.append(filtration_membership(K, [N], check_family=False, report=_single_report(N, brick)))
        steps += 1
    return UnivExtTrace(N, modules, deflations, ds, kernels, certs, status, steps, brick)


def _single_report(N: Module, brick: bool):
    from .strata import StandardizableReport

    return StandardizableReport([{"brick": brick, "stone": not brick}], None, None)


def check_finiteness_conditions(N: Module) -> dict:
    if not is_brick(N):
        raise ValueError("condition (ii) is stated for bricks")
    R, _ = radical(N)
    return {"length_bound": "not checked", "ext_rad_vanishing": ext1_dim(N, R) == 0}


# -- projective objects of the filtration category -----------------------------------


@dataclass
class ProjectiveOver:
    conflation: Conflation
    traces: list[UnivExtTrace]
    kernel_certificate: object
    ext_vanishing: list[int]


def build_projective_over(M: Module, theta: Sequence[Module], cap: int | None = None, *, min_index: int = 0) -> ProjectiveOver:
    """``K -> P -> M`` with ``P`` Ext-projective for ``F(theta)`` and ``K`` filtered."""
    cap = default_cap(M.A) if cap is None else cap
    current = M
    alpha = ModuleMap.identity(M)
    traces = []
    for j, T in enumerate(theta):
        tr = universal_extension_sequence(current, T, cap, certify=False)
        traces.append(tr)
        if tr.status != "stabilized":
            raise CapExceeded(f"universal extensions by stratum {j} did not stabilize within {cap} steps", j)
        alpha = tr.composite().then(alpha)
        current = tr.final
    reduced, _, _ = right_minimal(alpha)
    P = reduced.source
    K, inc = kernel(reduced)
    conf = Conflation(K, P, M, inc, reduced)
    vanish = [ext1_dim(P, T) for T in theta]
    if any(vanish):
        raise SystemError_("projective object has nonzero extensions with the family")
    sub = list(theta[min_index:])
    cert = filtration_membership(K, sub, check_family=False, report=_family_report(sub))
    return ProjectiveOver(conf, traces, cert, vanish)


def _family_report(theta):
    return verify_mixed_standardizable(theta)


@dataclass
class SystemCheck:
    mss1: list[bool]
    mss2_witness: tuple[int, int] | None
    mss3: list[bool]
    mss3_detail: list[str]
    indecomposable: list[bool]
    ext_order_witness: tuple[int, int] | None
    mss4: str = "vacuous"

    @property
    def passed(self) -> bool:
        return all(self.mss1) and self.mss2_witness is None and all(self.mss3) and all(self.indecomposable) and self.ext_order_witness is None

    @property
    def mss3_witness(self) -> int | None:
        for i, ok in enumerate(self.mss3):
            if not ok:
                return i
        return None

    def to_json(self) -> dict:
        return {
            "MSS1": self.mss1,
            "MSS2": {"pass": self.mss2_witness is None, "witness": self.mss2_witness},
            "MSS3": {"pass": all(self.mss3), "per_index": self.mss3, "detail": self.mss3_detail, "witness": self.mss3_witness},
            "MSS4": self.mss4,
            "indecomposable": self.indecomposable,
            "ext_vanishing_consequence": {"pass": self.ext_order_witness is None, "witness": self.ext_order_witness},
            "pass": self.passed,
        }


def verify_system(theta: Sequence[Module], projectives: Sequence[Module]) -> SystemCheck:
    """Axiom-by-axiom check of a mixed stratifying system.

    Condition (MSS3) at ``i`` holds exactly when ``P(i)`` has no extensions
    with the family and is filtered by ``theta(>= i)`` with top layer ``theta(i)``.
    """
    rep = verify_mixed_standardizable(theta)
    mss1 = [e["brick"] or e["stone"] for e in rep.ms1]
    mss3, detail = [], []
    for i, P in enumerate(projectives):
        if any(ext1_dim(P, T) for T in theta):
            mss3.append(False)
            detail.append("nonzero extension with the family")
            continue
        cert = filtration_membership(P, theta, check_family=False, report=rep)
        if not isinstance(cert, FiltrationCertificate):
            mss3.append(False)
            detail.append("not filtered")
            continue
        ok = min(cert.indices) >= i and cert.indices[-1] == i
        mss3.append(ok)
        detail.append("ok" if ok else f"top layer {cert.indices[-1]}, lowest index {min(cert.indices)}")
    indec = [is_indecomposable(P) for P in projectives]
    return SystemCheck(mss1, rep.ms2_witness, mss3, detail, indec, rep.ms3_witness)


@dataclass
class MixedSystem:
    theta: list[Module]
    projectives: list[Module]
    conflations: list[Conflation]
    certificates: list[object]
    check: SystemCheck

    def to_json(self) -> dict:
        return {
            "theta_dims": [list(T.dims) for T in self.theta],
            "projective_dims": [list(P.dims) for P in self.projectives],
            "kernel_dims": [list(c.K.dims) for c in self.conflations],
            "kernel_layers": [[j + i for j in c.indices] for i, c in enumerate(self.certificates)],
            "check": self.check.to_json(),
        }


def build_system(theta: Sequence[Module], cap: int | None = None) -> MixedSystem:
    rep = verify_mixed_standardizable(theta)
    if not rep.passed:
        raise ValueError("family is not mixed standardizable")
    projs, confs, certs = [], [], []
    for i, T in enumerate(theta):
        po = build_projective_over(T, theta, cap, min_index=i)
        if not is_indecomposable(po.conflation.E):
            raise SystemError_(f"projective object {i} is decomposable")
        if not isinstance(po.kernel_certificate, FiltrationCertificate):
            raise SystemError_(f"kernel at {i} is not filtered by the higher strata")
        projs.append(po.conflation.E)
        confs.append(po.conflation)
        certs.append(po.kernel_certificate)
    check = verify_system(theta, projs)
    return MixedSystem(list(theta), projs, confs, certs, check)


# -- costratifying systems ---------------------------------------------------------


@dataclass
class CoSystemCheck:
    mcs3: list[bool]
    detail: list[str]
    indecomposable: list[bool]
    base: object

    @property
    def passed(self) -> bool:
        return all(self.mcs3) and all(self.indecomposable) and self.base.passed

    def to_json(self) -> dict:
        return {
            "standardizable": self.base.to_json(),
            "MCS3": {"pass": all(self.mcs3), "per_index": self.mcs3, "detail": self.detail},
            "indecomposable": self.indecomposable,
            "pass": self.passed,
        }


def verify_cosystem(theta: Sequence[Module], injectives: Sequence[Module]) -> CoSystemCheck:
    """Dual check: ``I(i)`` has no extensions from the family and ``I(i) / theta(i)`` is filtered below ``i``."""
    rep = verify_mixed_standardizable(theta)
    mcs3, detail = [], []
    for i, I in enumerate(injectives):
        if any(ext1_dim(T, I) for T in theta):
            mcs3.append(False)
            detail.append("nonzero extension from the family")
            continue
        Dtheta = [dualize(T) for T in reversed(theta)]
        cert = filtration_membership(dualize(I), Dtheta, check_family=True)
        k = len(theta) - 1 - i
        ok = isinstance(cert, FiltrationCertificate) and min(cert.indices) >= k and cert.indices[-1] == k
        mcs3.append(ok)
        detail.append("ok" if ok else "no cofiltration with bottom layer at this index")
    indec = [is_indecomposable(I) for I in injectives]
    return CoSystemCheck(mcs3, detail, indec, rep)


@dataclass
class MixedCoSystem:
    theta: list[Module]
    injectives: list[Module]
    conflations: list[Conflation]
    certificates: list[object]
    check: CoSystemCheck

    def to_json(self) -> dict:
        return {
            "theta_dims": [list(T.dims) for T in self.theta],
            "injective_dims": [list(I.dims) for I in self.injectives],
            "cokernel_dims": [list(c.M.dims) for c in self.conflations],
            "cokernel_layers": [c.indices for c in self.certificates],
            "check": self.check.to_json(),
        }


def build_cosystem(theta: Sequence[Module], cap: int | None = None) -> MixedCoSystem:
    """Built over the opposite algebra on the dualized, order-reversed family."""
    t = len(theta)
    dual_theta = [dualize(T) for T in reversed(theta)]
    sysop = build_system(dual_theta, cap)
    injectives, confs, certs = [], [], []
    for i in range(t):
        k = t - 1 - i
        conf = dualize_conflation(sysop.conflations[k])
        # conf: D(theta_k) = theta(i) -> D P'(k) -> D K'(k)
        I = conf.E
        injectives.append(I)
        confs.append(conf)
        sub = list(theta[: i + 1])
        certs.append(filtration_membership(conf.M, sub, check_family=False, report=verify_mixed_standardizable(sub)))
    for i, c in enumerate(certs):
        if not isinstance(c, FiltrationCertificate):
            raise SystemError_(f"cokernel at {i} is not filtered by the lower strata")
    check = verify_cosystem(theta, injectives)
    return MixedCoSystem(list(theta), injectives, confs, certs, check)


# -- left approximations -------------------------------------------------------


def left_approximation(M: Module, theta: Sequence[Module], cap: int | None = None, cosystem: MixedCoSystem | None = None) -> ModuleMap:
    """A left ``F(theta)``-approximation ``M -> E``, made left minimal."""
    F = M.F
    cos = cosystem or build_cosystem(theta, cap)
    g = minimal_left_approximation(M, cos.injectives)
    if g.target.dim == 0:
        return g
    X = g.target
    _, rej = kernel(g)
    Mq, q = cokernel(rej)
    phi = ModuleMap(Mq, X, [F.mul(s, gm) for s, gm in zip(_sections(q), g.mats)])
    C, c = cokernel(phi)
    po = build_projective_over(C, theta, cap)
    conf_C = Conflation(Mq, X, C, phi, c)
    pb = pullback(conf_C, po.conflation.proj)
    approx = q.then(pb.incl)
    reduced, _, _ = left_minimal(approx)
    return reduced


def _sections(q: ModuleMap) -> list[np.ndarray]:
    from .exactlin import solve_left

    F = q.F
    out = []
    for X in q.mats:
        if X.shape[1] == 0:
            out.append(F.zeros(0, X.shape[0]))
            continue
        out.append(solve_left(F, X, F.eye(X.shape[1]))[0])
    return out


def factors_through(approx: ModuleMap, targets: Sequence[Module]) -> bool:
    """Every map ``M -> T`` factors through ``approx`` (rank comparison)."""
    F = approx.F
    M, E = approx.source, approx.target
    for T in targets:
        HM = hom_space(M, T)
        if HM.dim == 0:
            continue
        HE = hom_space(E, T)
        rows = [HM.coords(approx.then(h)).reshape(1, -1) for h in HE.basis]
        mat = vstack(F, rows, HM.dim)
        if (rank(F, mat) if mat.size else 0) != HM.dim:
            return False
    return True
