"""Acceptance gate: ten end-to-end criteria, one printed verdict line each.

Each criterion pits a solver output against an independently computable
oracle (closed-form duals, fan constructions, a-priori bounds) at a fixed
tolerance, on seeded random sweeps sized to run at desk scale.  Run with
-s to see the verdict lines for passing criteria as well.
"""
from __future__ import annotations

import math
import time

import numpy as np

from conftest import random_convex_pl, random_pl
from hjfront.fronttrack import front_track
from hjfront.genfam import build_wavefront, section_check
from hjfront.iterate import Subdivision, contact_shock_check, iterated_minmax
from hjfront.minmax import hopf_conj, hopf_lax, minmax_exact, minmax_grid, minmax_step
from hjfront.piecewise import PLFunction, pl_approx, sup_diff_on
from hjfront.riemann import fan_eval, solve_fan


def _verdict(num: int, ok: bool, detail: str) -> None:
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'} - {detail}", flush=True)
    assert ok, f"criterion {num}: {detail}"


def _sup_abs_on(H: PLFunction, lo: float, hi: float) -> float:
    qs = [lo, hi] + [q for q in H.breakpoints if lo < q < hi]
    return max(abs(H.eval(q)) for q in qs)


def _nonconvex_pl(rng, n_kinks: int) -> PLFunction:
    while True:
        H = random_pl(rng, n_kinks)
        sl = H.all_slopes
        if any(b < a - 1e-6 for a, b in zip(sl, sl[1:])):
            return H


def test_criterion_01_tracking_matches_conjugate_dual_for_convex_data():
    t0 = time.time()
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(20):
        v = random_convex_pl(rng, int(rng.integers(1, 9)))
        H = random_pl(rng, int(rng.integers(1, 9)))
        trace = front_track(v, H, 1.0)
        for _ in range(50):
            t = float(rng.uniform(1e-3, 1.0))
            x = float(rng.uniform(-3.0, 3.0))
            worst = max(worst, abs(trace.profile(t).eval(x) - hopf_conj(v, H, t, x)))
    elapsed = time.time() - t0
    ok = worst <= 1e-9 and elapsed < 30.0
    _verdict(1, ok, f"20 convex data, 1000 (t,x): max |track - dual| = {worst:.3e} "
                    f"(tol 1e-9), {elapsed:.1f}s")


def test_criterion_02_tracking_matches_inf_convolution_for_convex_hamiltonian():
    t0 = time.time()
    rng = np.random.default_rng(103)
    worst = 0.0
    for _ in range(20):
        v = random_pl(rng, int(rng.integers(1, 9)))
        H = random_convex_pl(rng, int(rng.integers(1, 9)))
        trace = front_track(v, H, 1.0)
        for _ in range(50):
            t = float(rng.uniform(1e-3, 1.0))
            x = float(rng.uniform(-3.0, 3.0))
            worst = max(worst, abs(trace.profile(t).eval(x) - hopf_lax(v, H, t, x)))
    elapsed = time.time() - t0
    ok = worst <= 1e-9 and elapsed < 30.0
    _verdict(2, ok, f"20 data, convex H, 1000 (t,x): max |track - inf-conv| = "
                    f"{worst:.3e} (tol 1e-9), {elapsed:.1f}s")


def test_criterion_03_single_kink_grid_value_matches_fan():
    t0 = time.time()
    rng = np.random.default_rng(31)
    errs = {256: [], 512: []}
    within = True
    for _ in range(10):
        while True:
            pl_, pr_ = rng.uniform(-2.0, 2.0, size=2)
            if abs(pl_ - pr_) >= 0.3:
                break
        H = _nonconvex_pl(rng, int(rng.integers(2, 9)))
        v = PLFunction((0.0,), (0.0,), float(pl_), float(pr_))
        fan = solve_fan(float(pl_), float(pr_), H)
        t = float(rng.uniform(0.2, 1.0))
        x = float(rng.uniform(-0.8, 0.8)) * t
        ref = fan_eval(fan, H, 0.0, t, x)
        for n in (256, 512):
            r = minmax_grid(v, H, t, x, n, n)
            err = abs(r.minmax_value - ref)
            errs[n].append(err)
            # r.tol = 2h*hypot(Lx, Ly) <= the advertised 3hL budget
            within = within and err <= r.tol
    halved = sum(errs[512]) <= 0.55 * sum(errs[256]) + 1e-15
    elapsed = time.time() - t0
    ok = within and halved and elapsed < 60.0
    _verdict(3, ok, f"10 single-kink data: max err {max(errs[256]):.2e} @256, "
                    f"{max(errs[512]):.2e} @512, sum ratio "
                    f"{sum(errs[512]) / sum(errs[256]):.2f} (need <= 0.55), {elapsed:.1f}s")


def test_criterion_04_pass_value_equals_dual_pass_value():
    t0 = time.time()
    rng = np.random.default_rng(107)
    worst_gap = 0.0
    worst_rel = 0.0
    for _ in range(1000):
        v = random_pl(rng, int(rng.integers(1, 6)))
        H = random_pl(rng, int(rng.integers(1, 6)))
        t = float(rng.uniform(0.05, 1.2))
        x = float(rng.uniform(-2.0, 2.0))
        r = minmax_grid(v, H, t, x)
        gap = abs(r.minmax_value - r.maxmin_value)
        worst_gap = max(worst_gap, gap)
        worst_rel = max(worst_rel, gap / r.tol)
    elapsed = time.time() - t0
    ok = worst_rel <= 1.0 and elapsed < 60.0
    _verdict(4, ok, f"1000 instances: max |minmax - maxmin| = {worst_gap:.3e}, "
                    f"max gap/tol = {worst_rel:.3f} (need <= 1), {elapsed:.1f}s")


def test_criterion_05_pass_value_below_conjugate_dual():
    t0 = time.time()
    rng = np.random.default_rng(109)
    worst_violation = -math.inf
    for _ in range(10):
        v = random_convex_pl(rng, int(rng.integers(1, 7)))
        H = _nonconvex_pl(rng, int(rng.integers(1, 7)))
        t = float(rng.uniform(0.1, 1.0))
        for x in np.linspace(-2.0, 2.0, 21):
            r = minmax_grid(v, H, t, float(x), 128, 128)
            J = hopf_conj(v, H, t, float(x))
            worst_violation = max(worst_violation, r.minmax_value - J - r.tol)
    upper_ok = worst_violation <= 0.0

    # decreasing-jump single kink whose fan rarefies under the cubic-type
    # Hamiltonian; compare the grid pass value against the tracked value
    v = PLFunction((0.0,), (0.0,), 1.2, -2.0 / 3.0)
    H = pl_approx(lambda p: -p**3 + p**2 + p, 200, (-2.0, 2.0))
    r = minmax_grid(v, H, 0.1, 0.0, 1024, 1024)
    J = front_track(v, H, 0.2).profile(0.1).eval(0.0)
    gap = J - r.minmax_value
    gap_ok = r.minmax_value < J - 10.0 * r.tol
    elapsed = time.time() - t0
    ok = upper_ok and gap_ok and elapsed < 60.0
    _verdict(5, ok, f"upper bound: max (pass - dual - tol) = {worst_violation:.3e} "
                    f"(need <= 0); strict gap at the rarefying kink: measured {gap:.3e}, "
                    f"required > {10.0 * r.tol:.3e} -> {'holds' if gap_ok else 'absent'}; "
                    f"{elapsed:.1f}s")


def test_criterion_06_composite_error_bound_and_exact_refinement():
    t0 = time.time()
    rng = np.random.default_rng(113)
    details = []
    ok = True
    found = 0
    while found < 5:
        v = random_pl(rng, int(rng.integers(2, 6)))
        H = random_pl(rng, int(rng.integers(1, 5)))
        trace = front_track(v, H, 1.0)
        if trace.collisions < 1:
            continue
        found += 1
        times = sorted({e.t for e in trace.events if e.kind in ("collision", "merge")})
        k = len(times)
        max_h = _sup_abs_on(H, -v.lipschitz, v.lipschitz)
        zeta = Subdivision.uniform(1.0, 8)
        tr = iterated_minmax(v, H, zeta)
        err = sup_diff_on(tr.profiles[-1], trace.profile(1.0), -6.0, 6.0)
        bound = 2.0 * k * max_h * 0.125
        zeta2 = zeta.refined_with(times)
        tr2 = iterated_minmax(v, H, zeta2)
        err2 = sup_diff_on(tr2.profiles[-1], trace.profile(1.0), -6.0, 6.0)
        ok = ok and err <= bound + 1e-12 and err2 <= 1e-9
        details.append((k, err, bound, err2))
    elapsed = time.time() - t0
    worst = max(d[1] for d in details)
    worst_ref = max(d[3] for d in details)
    ok = ok and elapsed < 60.0
    _verdict(6, ok, f"5 colliding instances: max composite err {worst:.2e} within "
                    f"2k*max|H|*mesh bounds, refined-at-collision err {worst_ref:.2e} "
                    f"(tol 1e-9), {elapsed:.1f}s")


def test_criterion_07_one_step_operator_contractions():
    t0 = time.time()
    rng = np.random.default_rng(127)
    bad = {"slope": 0.0, "time": 0.0, "ham": 0.0, "compact": 0.0}
    for _ in range(250):
        v = random_pl(rng, int(rng.integers(1, 6)))
        H = random_pl(rng, int(rng.integers(1, 5)))
        tau = float(rng.uniform(0.05, 0.8))

        prof = minmax_step(v, H, tau)
        bad["slope"] = max(
            bad["slope"], max(abs(s) for s in prof.all_slopes) - v.lipschitz
        )

        x = float(rng.uniform(-2.0, 2.0))
        t1, t2 = rng.uniform(0.0, 1.0, size=2)
        max_h = _sup_abs_on(H, -v.lipschitz, v.lipschitz)
        d = abs(minmax_exact(v, H, float(t1), x) - minmax_exact(v, H, float(t2), x))
        bad["time"] = max(bad["time"], d - abs(float(t1) - float(t2)) * max_h)

        H1 = random_pl(rng, int(rng.integers(1, 5)))
        diff = _sup_abs_on(
            PLFunction.from_points(
                [(q, H.eval(q) - H1.eval(q))
                 for q in sorted({-v.lipschitz, v.lipschitz}
                                 | {b for b in H.breakpoints + H1.breakpoints
                                    if -v.lipschitz < b < v.lipschitz})],
                H.all_slopes[0] - H1.all_slopes[0],
                H.all_slopes[-1] - H1.all_slopes[-1],
            ),
            -v.lipschitz,
            v.lipschitz,
        )
        d = abs(minmax_exact(v, H, tau, x) - minmax_exact(v, H1, tau, x))
        bad["ham"] = max(bad["ham"], d - tau * diff)

        w = random_pl(rng, int(rng.integers(1, 6)))
        C = max(v.lipschitz, w.lipschitz)
        qs = [-C, C] + [q for q in H.breakpoints if -C < q < C]
        speed = max(abs(H.slope_at(q + 1e-12)) for q in qs[:-1]) if qs else 0.0
        speed = max(speed, abs(H.slope_at(-C + 1e-12)), abs(H.slope_at(C - 1e-12)))
        radius = 1.0 + tau * speed
        rhs = sup_diff_on(v, w, -radius, radius)
        lhs = max(
            abs(minmax_exact(v, H, tau, float(xx)) - minmax_exact(w, H, tau, float(xx)))
            for xx in np.linspace(-1.0, 1.0, 7)
        )
        bad["compact"] = max(bad["compact"], lhs - rhs)
    elapsed = time.time() - t0
    ok = all(val <= 1e-9 for val in bad.values()) and elapsed < 60.0
    _verdict(7, ok, f"250x4 property sweeps: max excess slope {bad['slope']:.2e}, "
                    f"time {bad['time']:.2e}, hamiltonian {bad['ham']:.2e}, "
                    f"compact {bad['compact']:.2e} (all need <= 1e-9), {elapsed:.1f}s")


def test_criterion_08_tracking_structural_invariants():
    t0 = time.time()
    rng = np.random.default_rng(131)
    n_events = 0
    worst_semi = 0.0
    for _ in range(25):
        v = random_pl(rng, int(rng.integers(1, 8)))
        H = random_pl(rng, int(rng.integers(1, 8)))
        budget = 10 * (len(v.kinks()) * len(H.breakpoints) + 100)
        trace = front_track(v, H, 1.0)
        trace.check_invariants(tol=1e-9)
        assert trace.collisions <= budget
        n_events += len(trace.events)
        restarted = front_track(trace.profile(0.4), H, 0.6)
        worst_semi = max(
            worst_semi,
            sup_diff_on(restarted.profile(0.6), trace.profile(1.0), -6.0, 6.0),
        )
    elapsed = time.time() - t0
    ok = worst_semi <= 1e-9 and elapsed < 30.0
    _verdict(8, ok, f"25 runs, {n_events} events: invariants hold, max restart "
                    f"deviation {worst_semi:.2e} (tol 1e-9), {elapsed:.1f}s")


def test_criterion_09_tangential_shock_counts_and_residuals():
    t0 = time.time()

    def bowl_kink(x):
        return -x * (x - 1.0) if x <= 0 else x * (x - 1.0)

    def twin_well(x):
        return x * (x + 1.0) if x <= 0 else x * (x - 1.0)

    v1 = pl_approx(bowl_kink, 48, (-0.5, 0.5))
    Hc = pl_approx(lambda p: -p**3 + p**2 + p, 200, (-2.0, 2.0))
    tr1 = iterated_minmax(v1, Hc, Subdivision.uniform(0.06, 12))
    verdicts1 = contact_shock_check(tr1, Hc, tol=0.25, min_jump=0.5)
    one_ok = len(verdicts1) == 1 and verdicts1[0].is_contact and verdicts1[0].rh_ok

    v2 = pl_approx(twin_well, 48, (-0.5, 0.5))
    Hq = pl_approx(lambda p: p**4 - p**2, 200, (-2.0, 2.0))
    tr2 = iterated_minmax(v2, Hq, Subdivision.uniform(0.06, 12))
    verdicts2 = contact_shock_check(tr2, Hq, tol=0.25, min_jump=0.5)
    two_ok = len(verdicts2) == 2 and all(w.is_contact and w.rh_ok for w in verdicts2)

    res = []
    for kv, kH, n in ((24, 100, 6), (96, 400, 24)):
        v = pl_approx(bowl_kink, kv, (-0.5, 0.5))
        H = pl_approx(lambda p: -p**3 + p**2 + p, kH, (-2.0, 2.0))
        tr = iterated_minmax(v, H, Subdivision.uniform(0.06, n))
        (w,) = contact_shock_check(tr, H, tol=1.0, min_jump=0.5)
        res.append((w.max_contact_residual, w.max_rh_residual))
    shrink_ok = res[1][0] < 0.5 * res[0][0] and res[1][1] < 0.6 * res[0][1]
    elapsed = time.time() - t0
    ok = one_ok and two_ok and shrink_ok and elapsed < 120.0
    _verdict(9, ok, f"tangential shocks: {len(verdicts1)} (need 1) and "
                    f"{len(verdicts2)} (need 2); drift residual {res[0][0]:.3f} -> "
                    f"{res[1][0]:.3f} under joint refinement, {elapsed:.1f}s")


def test_criterion_10_one_step_profile_lies_on_front():
    t0 = time.time()
    rng = np.random.default_rng(137)
    passed = 0
    for _ in range(10):
        v = random_pl(rng, int(rng.integers(1, 6)))
        H = random_pl(rng, int(rng.integers(1, 5)))
        t = float(rng.uniform(0.1, 0.9))
        u = minmax_step(v, H, t)
        front = build_wavefront(v, H, t)
        if section_check(front, u):
            passed += 1
    elapsed = time.time() - t0
    ok = passed == 10 and elapsed < 30.0
    _verdict(10, ok, f"{passed}/10 one-step profiles lie on their fronts "
                     f"(tol 1e-8), {elapsed:.1f}s")
