"""Acceptance gate: one test per primary criterion, each printing PASS/FAIL."""

import itertools
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from gerbymirror import bundle_objects as bo
from gerbymirror import dhym_slag as dh
from gerbymirror import exterior_forms as ef
from gerbymirror import generators as gen
from gerbymirror import gerbe
from gerbymirror import lagrangian_objects as lo
from gerbymirror import torus_gcs as tg
from gerbymirror.errors import MirrorUndefined
from gerbymirror.matrix_kernel import ToleranceConfig, phase_distance


@pytest.fixture
def report(capsys):
    def emit(label, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
        return ok

    return emit


def random_pairs(stream, count, n_values):
    for n in n_values:
        for k in range(count):
            rng = gen.rng_for(2024, stream, 100 * n + k)
            yield n, gen.random_torus(rng, n), gen.random_tau(rng, n)


def defined_twist(rng, torus):
    while True:
        tau = gen.random_tau(rng, torus.n)
        try:
            dh.mirror_period(torus, tau)
            return tau
        except MirrorUndefined:
            continue


def test_gcs_algebra(report):
    start = time.perf_counter()
    worst = 0.0
    for _, torus, tau in random_pairs("acc-gcs", 100, (1, 2, 3, 4)):
        for g in (tg.gcs_from_complex(torus), tg.gcs_from_kahler(torus)):
            for h in (g, tg.b_transform(g, tau), tg.mirror(g), tg.mirror(tg.b_transform(g, tau))):
                worst = max(worst, h.square_error(), h.pairing_error())
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and elapsed <= 5.0
    assert report("1 GCS algebra", ok, f"max error {worst:.2e} (<= 1e-10), {elapsed:.2f} s (<= 5 s)")


def test_mirror_formulas(report):
    worst, twisted = 0.0, 0
    for k, (_, torus, tau) in enumerate(random_pairs("acc-mirror", 50, (1, 2, 3))):
        P = -np.linalg.inv(torus.T).T
        d = tg.extract_complexified_symplectic(tg.mirror(tg.gcs_from_complex(torus)))
        worst = max(worst, np.max(np.abs(d.omega_mat - P.imag)), np.max(np.abs(d.b_mat - P.real)))
        got = tg.extract_period_matrix(tg.mirror(tg.gcs_from_kahler(torus)))
        worst = max(worst, np.max(np.abs(got - 1j * np.linalg.inv(torus.Y).T)))
        try:
            M = dh.mirror_period(torus, tau)
        except MirrorUndefined:
            tau = defined_twist(gen.rng_for(2024, "acc-mirror-tau", k), torus)
            M = dh.mirror_period(torus, tau)
        got = tg.extract_period_matrix(tg.mirror(tg.b_transform(tg.gcs_from_kahler(torus), tau)))
        worst = max(worst, np.max(np.abs(got - np.linalg.inv(M))))
        twisted += 1
    ok = worst <= 1e-10 and twisted == 150
    assert report("2 mirror formulas", ok, f"max entry error {worst:.2e} (<= 1e-10) over {twisted} (T, tau)")


def test_symplectomorphism(report):
    worst = 0.0
    for _, torus, tau in random_pairs("acc-sympl", 50, (1, 2, 3, 4)):
        base = tg.mirror_forms(torus)
        twisted = tg.mirror_forms(torus, tau)
        g = tg.g_tau(tau)
        pulled = ef.matrix_from_two_form(ef.pullback(ef.two_form_from_matrix(twisted), g))
        worst = max(worst, np.max(np.abs(g.T @ twisted @ g - base)), np.max(np.abs(pulled - base)))
    ok = worst <= 1e-12
    assert report("3 symplectomorphism", ok, f"max entry error {worst:.2e} (<= 1e-12), matrix and pullback routes")


def test_gerbe_cocycles(report):
    start = time.perf_counter()
    passed = controls = 0
    for n, eps in itertools.product((1, 2), (Fraction(1, 24), Fraction(1, 30))):
        tau = gen.random_tau(gen.rng_for(2024, "acc-gerbe", 10 * n + eps.denominator), n)
        tau[0, 0] = tau[0, 0] or 1
        passed += gerbe.verify_zero_connection(n, tau, eps).passed
        controls += not gerbe.verify_zero_connection(n, tau, eps, antisymmetric=False).passed
    elapsed = time.perf_counter() - start
    ok = passed == 4 and controls == 4 and elapsed <= 20.0
    assert report("4 gerbe cocycles", ok, f"{passed}/4 exact sweeps pass, {controls}/4 controls fail, {elapsed:.2f} s (<= 20 s)")


def test_holomorphic_equivalences(report):
    tol = ToleranceConfig(abs_tol=1e-9)
    objs = gen.mixed_objects(2024, 200, stream="acc-objects")
    disagree = wrong_label = fourier = 0
    for torus, s, tau, built in objs:
        obj = bo.BundleObject(torus, s, tau)
        h = bool(bo.is_holomorphic(obj, tol=tol))
        z = bool(bo.zero_two_part_vanishes(obj, tol=tol))
        f = bool(lo.is_fukaya_object(lo.GraphLagrangian(torus, s, tau), tol=tol))
        disagree += not (h == z == f)
        wrong_label += h != built
        fourier += not s.is_affine
    ok = disagree == 0 and wrong_label == 0 and sum(b for *_, b in objs) == 100 and fourier > 0
    assert report("5 holomorphic equivalences", ok, f"{disagree} disagreements over 200 objects ({fourier} with Fourier modes)")


def test_phase_oracles(report):
    worst_d = worst_s = 0.0
    count = 0
    for n in (1, 2, 3):
        for k in range(100):
            rng = gen.rng_for(2024, "acc-oracle", 100 * n + k)
            torus = gen.random_torus(rng, n)
            A = rng.integers(-2, 3, size=(n, n)) + rng.normal(scale=0.3, size=(n, n))
            worst_d = max(worst_d, dh.dhym_top_from_jacobian(torus, A).rel_error)
            tau = defined_twist(rng, torus)
            worst_s = max(worst_s, dh.slag_value_from_jacobian(torus, tau, A).rel_error)
            count += 1
    ok = worst_d <= 1e-9 and worst_s <= 1e-9
    assert report("6 phase oracles", ok, f"dHYM rel error {worst_d:.2e}, sLag rel error {worst_s:.2e} (<= 1e-9) over {count}")


def test_phase_equivalence(report):
    tol = ToleranceConfig(phase_tol=1e-9)
    disagree = offset_bad = 0
    worst = 0.0
    for k in range(100):
        rng = gen.rng_for(2024, "acc-theorem", k)
        n = 1 + k % 3
        torus, s = gen.holomorphic_object(rng, n)
        tau = defined_twist(rng, torus)
        rep = dh.equivalence_check(s, torus, tau, tol=tol)
        disagree += not (rep.agree and rep.dhym.exists)
        worst = max(worst, rep.delta_error)
        offset_bad += rep.delta_error > 1e-9
    torus, s = gen.non_affine_counterexample()
    ce = dh.equivalence_check(s, torus, tol=tol)
    rejected = ce.dhym is not None and not ce.dhym.exists and not ce.slag.exists
    ok = disagree == 0 and offset_bad == 0 and rejected
    assert report(
        "7 phase equivalence", ok,
        f"{disagree} disagreements, max offset error {worst:.2e} (<= 1e-9), non-affine rejected by both: {rejected}",
    )


def test_kahler_lemma(report):
    worst, pd = 0.0, True
    for n in (1, 2, 3, 4):
        for k in range(100):
            torus = gen.random_torus(gen.rng_for(2024, "acc-kahler", 100 * n + k), n)
            d = dh.KahlerData.from_torus(torus)
            worst = max(worst, float(np.max(np.abs(d.J_coeff.T @ d.g_coeff - d.omega_coeff))))
            pd &= bool(np.linalg.eigvalsh(0.5 * (d.g_coeff + d.g_coeff.T))[0] > 0)
    ok = worst <= 1e-12 and pd
    assert report("8 Kahler lemma", ok, f"max |J^t G - Omega| {worst:.2e} (<= 1e-12), g positive definite: {pd}")


def test_verify_all_reproducible(report):
    cmd = [sys.executable, "-m", "gerbymirror", "verify", "all", "--json"]
    start = time.perf_counter()
    first = subprocess.run(cmd, capture_output=True, timeout=120)
    elapsed = time.perf_counter() - start
    second = subprocess.run(cmd, capture_output=True, timeout=120)
    same = first.stdout == second.stdout and len(first.stdout) > 0
    ok = first.returncode == 0 and second.returncode == 0 and same and elapsed <= 60.0
    assert report(
        "9 verify all", ok, f"exit {first.returncode}/{second.returncode}, {elapsed:.1f} s (<= 60 s), byte-identical: {same}"
    )
