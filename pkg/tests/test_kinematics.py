import math

import numpy as np
import pytest

from eelwrist.errors import InvalidGeometry, ModeVanished, NoConvergence, Unreachable
from eelwrist.kinematics import (PRINCIPAL, SPURIOUS, direct_kinematics, direct_kinematics_all,
                                 direct_kinematics_numeric, inverse_kinematics,
                                 inverse_kinematics_all, leg_roots, parse_mode, pitch_branches,
                                 solve_trig)
from eelwrist.mechanism import closure_residuals, crank_tip, make_geometry
from eelwrist.orientation import rpy_to_orientation
from eelwrist.workspace import relative_orientation

from fk_oracle import brute_force_fk, same_sets

FIG14 = (math.pi / 4, math.pi / 12, math.pi / 12)


def dense_roots(g, k, o, n=400001):
    th = np.linspace(-math.pi, math.pi, n)
    a, _, u, w, cm = g.leg(k)
    c = np.asarray(o) @ cm
    b = a + g.rod_length * (np.cos(th)[:, None] * u + np.sin(th)[:, None] * w)
    f = np.sum((c - b) ** 2, 1) - g.coupler_length ** 2
    return th[:-1][np.sign(f[:-1]) != np.sign(f[1:])], np.min(np.abs(f))


# --- trig solver --------------------------------------------------------------

def test_solve_trig_two_roots():
    roots = solve_trig(1.0, 1.0, 1.0)
    assert sorted(round(r.theta, 12) for r in roots) == [0.0, round(math.pi / 2, 12)]


def test_solve_trig_theta_pi():
    # P cos + Q sin = E with root at pi: E + P = 0
    roots = solve_trig(1.0, 0.5, -1.0)
    assert any(abs(abs(r.theta) - math.pi) < 1e-12 and r.degenerate for r in roots)
    for r in roots:
        assert abs(math.cos(r.theta) + 0.5 * math.sin(r.theta) + 1.0) < 1e-12


def test_solve_trig_no_root():
    assert solve_trig(1.0, 0.0, 2.0) == []


def test_solve_trig_double():
    roots = solve_trig(1.0, 0.0, 1.0)
    assert len(roots) == 1 and roots[0].double and roots[0].theta == pytest.approx(0.0)


# --- inverse ------------------------------------------------------------------

def test_fig14_four_solutions(geom):
    sols = inverse_kinematics_all(geom, rpy_to_orientation(FIG14))
    assert len(sols) == 4
    assert sorted(s.mode for s in sols) == [(-1, -1), (-1, 1), (1, -1), (1, 1)]
    for s in sols:
        assert max(map(abs, s.residuals)) <= 1e-9
        assert s.q.t3 == pytest.approx(math.pi / 4)


def test_ik_roots_match_dense_scan(geom):
    o = rpy_to_orientation(FIG14)
    sols = inverse_kinematics_all(geom, o)
    for k in (1, 2):
        scan, _ = dense_roots(geom, k, o)
        got = sorted({round(getattr(s.q, f"t{k}"), 9) for s in sols})
        assert len(scan) == len(got)
        assert np.allclose(sorted(scan), got, atol=1e-4)


def test_ik_neutral_contains_home(geom):
    sols = inverse_kinematics_all(geom, geom.home.orientation)
    homes = [s for s in sols if s.mode == (1, 1)]
    assert len(homes) == 1
    assert np.allclose(homes[0].q, geom.home.q, atol=1e-12)
    assert homes[0].q.t1 == pytest.approx(homes[0].q.t2, abs=1e-12)


def test_ik_unreachable(geom):
    o = relative_orientation(geom, -1.0, 2.8, 0.0)
    for k in (1, 2):
        scan, fmin = dense_roots(geom, k, o)
        assert len(scan) == 0 and fmin > 1e-3
    with pytest.raises(Unreachable):
        inverse_kinematics_all(geom, o)


def test_ik_modes(geom):
    o = rpy_to_orientation(FIG14)
    for s in inverse_kinematics_all(geom, o):
        q = inverse_kinematics(geom, o, s.mode)
        assert np.allclose(q, s.q)
    assert inverse_kinematics(geom, o, parse_mode("+-")) == inverse_kinematics(geom, o, (1, -1))
    with pytest.raises(ValueError):
        parse_mode("+x")


def test_ik_default_mode_is_home(geom):
    assert np.allclose(inverse_kinematics(geom, geom.home.orientation), geom.home.q, atol=1e-12)


def test_ik_double_root_on_reach_limit(geom):
    # bisect tilt towards the leg-1 reach limit along azimuth 3 rad
    def reach(t):
        return bool(leg_roots(geom, 1, relative_orientation(geom, 3.0, t, 0.0)))
    lo, hi = 0.0, 0.7
    assert reach(lo) and not reach(hi)
    for _ in range(200):
        m = 0.5 * (lo + hi)
        lo, hi = (m, hi) if reach(m) else (lo, m)
    o = relative_orientation(geom, 3.0, lo, 0.0)
    roots = leg_roots(geom, 1, o)
    assert len(roots) == 1 and roots[0].double
    with pytest.raises(ModeVanished):
        inverse_kinematics(geom, o)


def test_leg_roots_independent_of_other_leg(geom, rng):
    # each leg's closure involves only its own crank angle
    for _ in range(20):
        t1, t2, t2b, t3 = rng.uniform(-0.5, 0.5, 4)
        a = pitch_branches(geom, (t1, t2, t3 + math.pi / 4))
        b = pitch_branches(geom, (t1, t2b, t3 + math.pi / 4))
        assert a == b


def test_ik_round_trip_from_fk(geom, rng):
    for _ in range(500):
        q = (rng.uniform(math.radians(-17), math.radians(38)),
             rng.uniform(math.radians(-17), math.radians(38)),
             math.pi / 4 + rng.uniform(-0.35, 0.35))
        try:
            o = direct_kinematics(geom, q)
        except (Unreachable, ModeVanished):
            continue
        assert np.allclose(inverse_kinematics(geom, o), q, atol=1e-9)


# --- direct -------------------------------------------------------------------

def test_fig13_four_solutions(geom):
    sols = direct_kinematics_all(geom, (0.1, 0.2, math.pi / 4))
    assert len(sols) == 4
    spurious = [s for s in sols if s.branch == SPURIOUS]
    assert len(spurious) == 2
    assert all(s.pitch == pytest.approx(math.pi / 2) for s in spurious)
    for s in sols:
        assert max(map(abs, s.residuals)) <= 1e-9


def test_published_pitch_polynomial(geom):
    # the literal factored polynomial must vanish at our principal pitch
    t1, t3 = 0.1, math.pi / 4
    r2 = math.sqrt(2.0)
    S1, C1, S3, C3 = math.sin(t1), math.cos(t1), math.sin(t3), math.cos(t3)
    phi = [p for p, br, _ in pitch_branches(geom, (t1, 0.2, t3)) if br == PRINCIPAL][0]
    Q = math.tan(phi / 2)
    lin = r2 * S1 * Q - r2 * Q * C3 - r2 * Q * C1 * S3 - 2 * Q + 2 - r2 * C1 * S3 - r2 * C3 - r2 * S1
    assert abs(lin * (Q - 1)) < 1e-12


def test_spurious_branch_for_every_q(geom, rng):
    for _ in range(200):
        q = rng.uniform(-math.pi, math.pi, 3)
        br = pitch_branches(geom, q)
        sp = [p for p, b, _ in br if b == SPURIOUS]
        assert sp == [math.pi / 2]
        c = crank_tip(geom, 1, q[0])
        assert c is not None


def test_fk_home(geom):
    o = direct_kinematics(geom, geom.home.q)
    assert np.allclose(o, geom.home.orientation, atol=1e-12)
    all_o = [s.orientation for s in direct_kinematics_all(geom, geom.home.q)]
    assert any(np.allclose(m, geom.home.orientation, atol=1e-12) for m in all_o)


def test_r2_dot_p2_cannot_separate_roll_roots(geom):
    # r2.p2 = 1 - c2.b2 is fixed by the closure, identical on both roll roots
    sols = [s for s in direct_kinematics_all(geom, (0.1, 0.2, math.pi / 4)) if s.branch == PRINCIPAL]
    assert len(sols) == 2
    assert sols[0].coupler_dot == pytest.approx(sols[1].coupler_dot, abs=1e-12)
    assert sols[0].roll_sign == -sols[1].roll_sign


def test_fk_selection_follows_continuation_from_home(geom):
    # the selected assembly is the one reached by continuously driving the
    # joints from home to the target
    target = np.array([0.1, 0.2, math.pi / 4])
    o = geom.home.orientation
    for s in np.linspace(0, 1, 201)[1:]:
        q = np.array(geom.home.q) + s * (target - np.array(geom.home.q))
        o = direct_kinematics_numeric(geom, q, o)
    assert np.allclose(direct_kinematics(geom, target), o, atol=1e-9)


def test_fk_matches_brute_force(geom, rng):
    for _ in range(10):
        q = (rng.uniform(-0.3, 0.66), rng.uniform(-0.3, 0.66), math.pi / 4 + rng.uniform(-0.6, 0.6))
        closed = [s.orientation for s in direct_kinematics_all(geom, q)]
        brute = brute_force_fk(geom, q)
        assert same_sets(closed, brute)


def test_fk_rejects_other_variants():
    with pytest.raises(InvalidGeometry):
        direct_kinematics_all(make_geometry("parallel_axes"), (0, 0, 0))


def test_fk_numeric_agrees_with_closed_form(geom, rng):
    for _ in range(50):
        q = (rng.uniform(-0.2, 0.5), rng.uniform(-0.2, 0.5), math.pi / 4 + rng.uniform(-0.3, 0.3))
        assert np.allclose(direct_kinematics_numeric(geom, q, geom.home.orientation),
                           direct_kinematics(geom, q), atol=1e-9)


def test_fk_numeric_exact_seed_converges_fast(geom):
    q = (0.1, 0.2, math.pi / 4)
    o = direct_kinematics(geom, q)
    _, it = direct_kinematics_numeric(geom, q, o, full_output=True)
    assert it <= 2


def test_fk_numeric_unreachable(geom):
    with pytest.raises(NoConvergence):
        direct_kinematics_numeric(geom, (-math.pi / 2, -math.pi / 2, math.pi / 4),
                                  geom.home.orientation)


@pytest.mark.parametrize("variant", ["parallel_axes", "orthogonal_axes"])
def test_fk_numeric_other_variants(variant, rng):
    g = make_geometry(variant)
    for _ in range(10):
        o = g.home.orientation @ rpy_to_orientation(rng.uniform(-0.1, 0.1, 3))
        q = inverse_kinematics(g, o)
        o2 = direct_kinematics_numeric(g, q, g.home.orientation)
        assert max(map(abs, closure_residuals(g, q, o2))) <= 1e-10
        assert np.allclose(o2, o, atol=1e-8)


def test_spurious_branch_leaves_leg1_indeterminate(geom):
    # on the pitch = 90 deg branches C1 lies on the crank axis, so every theta1 closes leg 1
    from eelwrist.errors import IndeterminateLeg
    spurious = [s for s in direct_kinematics_all(geom, (0.1, 0.2, math.pi / 4)) if s.branch == SPURIOUS]
    assert len(spurious) == 2
    for s in spurious:
        with pytest.raises(IndeterminateLeg) as exc:
            inverse_kinematics_all(geom, s.orientation)
        assert exc.value.leg == 1
        for th in np.linspace(-3, 3, 7):
            res = closure_residuals(geom, (th, 0.2, math.pi / 4), s.orientation)
            assert abs(res[0]) < 1e-12
