"""Verification suites run from a :class:`RunConfig` and their reports.

Reports are deterministic for a given (config, seed): random data comes from
counter-based streams, checks run in a fixed order, and wall times are left
out unless explicitly requested.
"""

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import gerbe
from . import bundle_objects as bo
from . import dhym_slag as dh
from . import exterior_forms as ef
from . import generators as gen
from . import lagrangian_objects as lo
from . import torus_gcs as tg
from .errors import GerbyMirrorError, MirrorUndefined

SUITES = ("gcs", "gerbe", "objects", "dhym")
VERDICTS = ("pass", "fail", "skip", "info")
SYMPLECTO_TOL = 1e-12


@dataclass
class CheckResult:
    name: str
    verdict: str
    max_error: float = None
    witness: str = None
    reason: str = ""
    value: str = None
    wall_time: float = None

    def to_dict(self, timings=False):
        out = {"name": self.name, "verdict": self.verdict}
        if self.max_error is not None:
            out["max_error"] = float(self.max_error)
        if self.witness is not None:
            out["witness"] = self.witness
        if self.value is not None:
            out["value"] = self.value
        if self.reason:
            out["reason"] = self.reason
        if timings and self.wall_time is not None:
            out["wall_time"] = round(self.wall_time, 6)
        return out


@dataclass
class VerificationReport:
    suite: str
    seed: int
    checks: list = field(default_factory=list)
    config: dict = None

    @property
    def passed(self):
        return not any(c.verdict == "fail" for c in self.checks)

    @property
    def exit_code(self):
        return 0 if self.passed else 1

    def counts(self):
        return {v: sum(c.verdict == v for c in self.checks) for v in VERDICTS}

    def to_dict(self, timings=False, include_config=False):
        out = {
            "suite": self.suite,
            "seed": self.seed,
            "overall": "pass" if self.passed else "fail",
            "counts": self.counts(),
            "checks": [c.to_dict(timings) for c in self.checks],
        }
        if include_config and self.config is not None:
            out["config"] = self.config
        return out

    def to_json(self, timings=False, include_config=False):
        return json.dumps(self.to_dict(timings, include_config), indent=2, sort_keys=True)

    def to_text(self, timings=False):
        rows = []
        width = max([len(c.name) for c in self.checks] + [5])
        for c in self.checks:
            err = "" if c.max_error is None else f"{c.max_error:.3e}"
            extra = " ".join(x for x in (c.value and f"value={c.value}", c.witness and f"at {c.witness}", c.reason) if x)
            t = f" {c.wall_time:8.3f}s" if timings and c.wall_time is not None else ""
            rows.append(f"{c.name:<{width}}  {c.verdict.upper():<4}  {err:>10}{t}  {extra}".rstrip())
        counts = self.counts()
        summary = ", ".join(f"{counts[v]} {v}" for v in VERDICTS if counts[v])
        rows.append(f"overall: {'PASS' if self.passed else 'FAIL'} ({summary})")
        return "\n".join(rows)


class _Runner:
    def __init__(self, cfg, seed):
        self.cfg = cfg
        self.seed = seed
        self.tol = cfg.tol
        self.checks = []

    def run(self, name, fn, *args):
        """fn returns (ok, max_error, witness, value, reason); errors become verdicts."""
        t0 = time.perf_counter()
        try:
            ok, err, witness, value, reason = fn(*args)
            verdict = ok if isinstance(ok, str) else ("pass" if ok else "fail")
        except MirrorUndefined as exc:
            verdict, err, witness, value, reason = "skip", None, None, None, f"MirrorUndefined: {exc}"
        except GerbyMirrorError as exc:
            verdict, err, witness, value, reason = "fail", None, None, None, f"{type(exc).__name__}: {exc}"
        self.checks.append(CheckResult(name, verdict, err, witness, reason, value, time.perf_counter() - t0))


def _worst(items):
    """(max error, witness label) over (label, error) pairs, first max wins."""
    best, label = 0.0, None
    for lab, err in items:
        if label is None or err > best:
            best, label = float(err), lab
    return best, label


# ---------------------------------------------------------------------------
# gcs
# ---------------------------------------------------------------------------


def _tori(cfg, seed):
    out = [("config", cfg.torus, np.asarray(cfg.tau))]
    for n in (1, 2, 3, 4):
        for k in range(cfg.samples["gcs"]):
            rng = gen.rng_for(seed, f"gcs/n{n}", k)
            out.append((f"random[n={n},#{k}]", gen.random_torus(rng, n), gen.random_tau(rng, n)))
    return out


def _structures(torus, tau):
    IJ = tg.gcs_from_complex(torus)
    Iw = tg.gcs_from_kahler(torus)
    IJB = tg.b_transform(IJ, tau)
    IwB = tg.b_transform(Iw, tau)
    return {"I_J": IJ, "I_J(B)": IJB, "I_w": Iw, "I_w(B)": IwB,
            "mirror I_J": tg.mirror(IJ), "mirror I_J(B)": tg.mirror(IJB),
            "mirror I_w": tg.mirror(Iw), "mirror I_w(B)": tg.mirror(IwB)}


def _gcs_invariants(tori, tol):
    errs = []
    for label, torus, tau in tori:
        for name, g in _structures(torus, tau).items():
            errs.append((f"{label}:{name}", max(g.square_error(), g.pairing_error())))
    err, wit = _worst(errs)
    return err <= tol.abs_tol, err, wit, None, ""


def _mirror_symplectic(tori, tol):
    errs = []
    for label, torus, tau in tori:
        P = -np.linalg.inv(torus.T).T
        W, B = P.imag, P.real
        d = tg.extract_complexified_symplectic(tg.mirror(tg.gcs_from_complex(torus)), tol)
        e0 = max(np.max(np.abs(d.omega_mat - W)), np.max(np.abs(d.b_mat - B)))
        dt = tg.extract_complexified_symplectic(tg.mirror(tg.b_transform(tg.gcs_from_complex(torus), tau)), tol)
        Wt, Bt = W @ tau, B @ tau
        e1 = max(
            np.max(np.abs(dt.omega_mat - W)), np.max(np.abs(dt.b_mat - B)),
            np.max(np.abs(dt.omega_xx + (Wt - Wt.T))), np.max(np.abs(dt.b_xx + (Bt - Bt.T))),
        )
        errs.append((label, max(e0, e1)))
    err, wit = _worst(errs)
    return err <= tol.abs_tol, err, wit, None, ""


def _period_matrices(tori, tol):
    errs, skipped = [], []
    for label, torus, tau in tori:
        Y = torus.Y
        e = np.max(np.abs(tg.extract_period_matrix(tg.gcs_from_complex(torus), tol) - torus.T))
        e = max(e, np.max(np.abs(tg.extract_period_matrix(tg.mirror(tg.gcs_from_kahler(torus)), tol) - 1j * np.linalg.inv(Y).T)))
        try:
            M = dh.mirror_period(torus, tau, tol)
        except MirrorUndefined:
            skipped.append(label)
        else:
            got = tg.extract_period_matrix(tg.mirror(tg.b_transform(tg.gcs_from_kahler(torus), tau)), tol)
            e = max(e, np.max(np.abs(got - np.linalg.inv(M))))
        errs.append((label, e))
    err, wit = _worst(errs)
    reason = f"twisted period matrix skipped for {', '.join(skipped)} (MirrorUndefined)" if skipped else ""
    return err <= tol.abs_tol, err, wit, None, reason


def _symplectomorphism(tori, tol):
    errs = []
    for label, torus, tau in tori:
        res = tg.symplectomorphism_residual(torus, tau)
        Ot = ef.two_form_from_matrix(tg.mirror_forms(torus, tau))
        pulled = ef.matrix_from_two_form(ef.pullback(Ot, tg.g_tau(tau)))
        res2 = float(np.max(np.abs(pulled - tg.mirror_forms(torus))))
        scale = max(1.0, float(np.max(np.abs(tg.mirror_forms(torus)))))
        errs.append((label, max(res, res2) / scale))
    err, wit = _worst(errs)
    return err <= SYMPLECTO_TOL, err, wit, None, "errors relative to max |Omega~|"


def _twist_report(cfg):
    nontrivial = bool(np.max(np.abs(np.asarray(cfg.tau) @ cfg.torus.T - (np.asarray(cfg.tau) @ cfg.torus.T).T)) > cfg.tol.abs_tol)
    same = np.max(np.abs(tg.b_transform(tg.gcs_from_complex(cfg.torus), cfg.tau).M - tg.gcs_from_complex(cfg.torus).M))
    # I_J(B) = I_J exactly when tau T is symmetric
    ok = nontrivial == bool(same > cfg.tol.abs_tol)
    return ok, float(same), "config", "nontrivial" if nontrivial else "trivial", ""


def suite_gcs(cfg, seed, r):
    tori = _tori(cfg, seed)
    r.run("gcs.invariants", _gcs_invariants, tori, r.tol)
    r.run("gcs.mirror_symplectic_data", _mirror_symplectic, tori, r.tol)
    r.run("gcs.period_matrices", _period_matrices, tori, r.tol)
    r.run("gcs.symplectomorphism", _symplectomorphism, tori, r.tol)
    r.run("gcs.twist_nontrivial", _twist_report, cfg)


# ---------------------------------------------------------------------------
# gerbe
# ---------------------------------------------------------------------------


def _zero_conn(n, tau, eps, expect_pass=True, rule="cocycle", antisymmetric=True):
    rep = gerbe.verify_zero_connection(n, tau, eps, rule, antisymmetric)
    wit = None if rep.first_violation is None else " ".join(rep.first_violation)
    value = f"triples={rep.triples_checked} violations={rep.cocycle_violations}"
    return rep.passed == expect_pass, float(rep.cocycle_violations + rep.antisymmetry_violations), wit, value, ""


def _one_conn(n, tau, eps, local_b=None, expect_pass=True):
    rep = gerbe.verify_one_connection(n, tau, eps, local_b)
    wit = None if rep.worst_pair is None else " ".join(rep.worst_pair)
    return rep.passed == expect_pass, max(rep.max_curvature, rep.max_delta_beta_error), wit, f"pairs={rep.pairs_checked}", ""


def _perturbed_b(n, tau):
    B = gerbe.b_field_form(tau)
    first = gerbe.cover_indices(n)[0]

    def local_b(index, x):
        if index != first:
            return B
        return B + 0.1 * (np.outer(x, np.ones(2 * n)) - np.outer(np.ones(2 * n), x))

    return local_b


def _cover_check(n, eps):
    bad = gerbe.uncovered_points(n, eps)
    return not bad, float(len(bad)), None, f"boxes={len(gerbe.build_cover(n, eps))}", ""


def suite_gerbe(cfg, seed, r):
    n, tau, eps = cfg.n, np.asarray(cfg.tau), cfg.epsilon
    if n <= 2:
        r.run("gerbe.cover", _cover_check, n, eps)
        r.run("gerbe.zero_connection[config]", _zero_conn, n, tau, eps)
        r.run("gerbe.one_connection[config]", _one_conn, n, tau, eps)
    else:
        r.checks.append(CheckResult("gerbe.zero_connection[config]", "skip",
                                    reason="exhaustive triple enumeration is capped at n <= 2"))
    for m in (1, 2):
        rng = gen.rng_for(seed, f"gerbe/n{m}")
        t = gen.random_tau(rng, m)
        while not np.any(t):
            t = gen.random_tau(rng, m)
        for e in (Fraction(1, 24), Fraction(1, 30)):
            tag = f"n={m},eps={e}"
            r.run(f"gerbe.zero_connection[{tag}]", _zero_conn, m, t, e)
            r.run(f"gerbe.control.dropped_antisymmetry[{tag}]", _zero_conn, m, t, e, False, "cocycle", False)
        r.run(f"gerbe.literal_rule_not_cocycle[n={m}]", _zero_conn, m, t, gerbe.DEFAULT_EPSILON, False, "literal")
        r.run(f"gerbe.one_connection[n={m}]", _one_conn, m, t, gerbe.DEFAULT_EPSILON)
        r.run(f"gerbe.control.perturbed_b[n={m}]", _one_conn, m, t, gerbe.DEFAULT_EPSILON, _perturbed_b(m, t), False)


# ---------------------------------------------------------------------------
# objects
# ---------------------------------------------------------------------------


def _grid(cfg, n, section):
    return bo.sample_grid(n, section, cfg.grid_density)


def _object_checks(cfg, torus, section, tau, tol):
    grid = _grid(cfg, torus.n, section)
    corr = lo.mirror_correspondence_check(section, torus, tau, grid, tol)
    z = bo.zero_two_part_vanishes(bo.BundleObject(torus, section, tau), grid, tol)
    untwisted = lo.GraphLagrangian(torus, section)
    moved = lo.apply_symplectomorphism(untwisted, tau)
    invariant = lo.is_fukaya_object(untwisted, grid, tol).holds == lo.is_fukaya_object(moved, grid, tol).holds
    return corr, z, invariant


def _config_object(cfg, idx, section):
    corr, z, invariant = _object_checks(cfg, cfg.torus, section, cfg.tau, cfg.tol)
    obj = bo.BundleObject(cfg.torus, section, cfg.tau)
    trans = bo.verify_transition_compat(obj, cfg.epsilon, cfg.tol) if cfg.n <= 2 else None
    ok = corr.agree and z.holds == corr.verdict and invariant and (trans is None or trans.passed)
    err = max(corr.holomorphic.max_violation, corr.fukaya.max_violation)
    value = f"is_holomorphic={str(corr.holomorphic.holds).lower()} is_fukaya={str(corr.fukaya.holds).lower()}"
    wit = None if corr.verdict else np.array2string(corr.holomorphic.witness, precision=6)
    reason = "" if trans is not None else "transition compatibility skipped for n > 2"
    return ok, err, wit, value, reason


def _random_objects(cfg, seed, tol):
    objs = gen.mixed_objects(seed, cfg.samples["objects"])
    bad = []
    for k, (torus, section, tau, built) in enumerate(objs):
        corr, z, invariant = _object_checks(cfg, torus, section, tau, tol)
        if not (corr.agree and z.holds == corr.verdict and invariant and corr.verdict == built):
            bad.append(f"#{k}")
    value = f"objects={len(objs)} disagreements={len(bad)}"
    return not bad, float(len(bad)), ", ".join(bad) or None, value, ""


def suite_objects(cfg, seed, r):
    for idx, section in enumerate(cfg.objects):
        r.run(f"objects.correspondence[config#{idx}]", _config_object, cfg, idx, section)
    r.run("objects.correspondence[random]", _random_objects, cfg, seed, r.tol)


# ---------------------------------------------------------------------------
# dhym
# ---------------------------------------------------------------------------


def _kahler(cfg, seed):
    errs = [("config", dh.kahler_verify(cfg.torus))]
    for n in (1, 2, 3, 4):
        for k in range(cfg.samples["dhym"]):
            errs.append((f"random[n={n},#{k}]", dh.kahler_verify(gen.random_torus(gen.rng_for(seed, f"kahler/n{n}", k), n))))
    ok = all(rep.passed for _, rep in errs)
    err, wit = _worst((lab, rep.max_error) for lab, rep in errs)
    J = dh.KahlerData.from_torus(cfg.torus).J_coeff.copy()
    J[0, 0] += 1e-3
    control = not dh.kahler_verify(cfg.torus, J=J).passed
    return ok and control, err, wit, None, "" if control else "perturbed J was not rejected"


def _equivalence(cfg, section):
    grid = _grid(cfg, cfg.n, section)
    rep = dh.equivalence_check(section, cfg.torus, cfg.tau, grid, cfg.tol)
    if rep.dhym is None and rep.slag is None:
        return "pass", None, None, "dhym=none slag=none", f"vacuous: {rep.reason}"
    ok = rep.agree and (not (rep.dhym and rep.slag and rep.dhym.exists) or rep.delta_error <= cfg.tol.phase_tol)
    value = f"dhym_exists={str(bool(rep.dhym and rep.dhym.exists)).lower()} slag_exists={str(bool(rep.slag and rep.slag.exists)).lower()}"
    if rep.dhym and rep.dhym.exists and rep.slag and rep.slag.exists:
        value += f" delta={rep.delta:.12f} delta_is_zero={str(rep.delta_is_zero).lower()}"
    return ok, rep.delta_error, None, value, rep.reason


def _routes(cfg, seed):
    errs = []
    for k in range(cfg.samples["dhym"]):
        n = 1 + k % 3
        rng = gen.rng_for(seed, "dhym/routes", k)
        torus = gen.random_torus(rng, n)
        section = bo.SectionData(rng.integers(-2, 3, size=(n, n)), None, gen._modes(rng, n, 1))
        tau = gen.random_tau(rng, n)
        x = rng.uniform(size=n)
        e = dh.dhym_top(bo.BundleObject(torus, section, tau), x).rel_error
        try:
            e = max(e, dh.slag_value(lo.GraphLagrangian(torus, section, tau), x, cfg.tol).rel_error)
        except MirrorUndefined:
            pass
        errs.append((f"#{k}", e))
    err, wit = _worst(errs)
    return err <= cfg.tol.rel_tol, err, wit, None, ""


def _theorem(cfg, seed):
    bad, worst = [], 0.0
    for k in range(cfg.samples["dhym"]):
        n = 1 + k % 3
        rng = gen.rng_for(seed, "dhym/affine", k)
        torus, section = gen.holomorphic_object(rng, n)
        tau = gen.random_tau(rng, n)
        try:
            rep = dh.equivalence_check(section, torus, tau, None, cfg.tol)
        except MirrorUndefined:
            continue
        worst = max(worst, rep.delta_error)
        if not (rep.agree and rep.dhym.exists and rep.delta_error <= cfg.tol.phase_tol):
            bad.append(f"#{k}")
    torus, section = gen.non_affine_counterexample()
    rep = dh.equivalence_check(section, torus, None, None, cfg.tol)
    rejected = not rep.dhym.exists and not rep.slag.exists
    if not rejected:
        bad.append("non-affine")
    return not bad, worst, ", ".join(bad) or None, f"non_affine_rejected={str(rejected).lower()}", ""


def suite_dhym(cfg, seed, r):
    r.run("dhym.kahler", _kahler, cfg, seed)
    for idx, section in enumerate(cfg.objects):
        r.run(f"dhym.equivalence[config#{idx}]", _equivalence, cfg, section)
    r.run("dhym.routes", _routes, cfg, seed)
    r.run("dhym.phase_equivalence[random]", _theorem, cfg, seed)


_DISPATCH = {"gcs": suite_gcs, "gerbe": suite_gerbe, "objects": suite_objects, "dhym": suite_dhym}


def run_suite(cfg, name, seed=None):
    """Run one suite (or "all") and return its report."""
    from .config import to_dict

    if name != "all" and name not in _DISPATCH:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES + ('all',))}")
    seed = cfg.seed if seed is None else int(seed)
    r = _Runner(cfg, seed)
    for s in SUITES if name == "all" else (name,):
        _DISPATCH[s](cfg, seed, r)
    return VerificationReport(name, seed, r.checks, to_dict(cfg))
