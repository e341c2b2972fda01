import json

import numpy as np
import pytest

from robin_torsion.geometry import (CrossPolygon, DeformationFamily, Disk, DomainError,
                                    Ellipse, Peanut, ProfileTable, RoundedCrossPolygon,
                                    Stadium, boundary_trace, build_family,
                                    build_radial_family, check_condition_A2,
                                    domain_from_config, min_curvature,
                                    sup_convolve_profiles)


def kappa_at(trace, point):
    i = np.argmin(np.hypot(*(trace.points - np.asarray(point)).T))
    return trace.kappa[i]


def test_disk_curvature_is_one():
    tr = boundary_trace(Disk(), 256)
    assert np.max(np.abs(tr.kappa - 1.0)) <= 1e-10


def test_ellipse_curvature_at_vertices():
    tr = boundary_trace(Ellipse(2.0, 1.0), 512)
    assert kappa_at(tr, (2, 0)) == pytest.approx(2.0, abs=1e-9)
    assert kappa_at(tr, (0, 1)) == pytest.approx(0.25, abs=1e-9)


def test_ellipse_curvature_matches_closed_form():
    tr = boundary_trace(Ellipse(2.0, 1.0), 512)
    x, y = tr.points.T
    t = np.arctan2(y / 1.0, x / 2.0)
    exact = 2.0 / (4.0 * np.sin(t) ** 2 + np.cos(t) ** 2) ** 1.5
    assert np.max(np.abs(tr.kappa - exact)) < 1e-9


@pytest.mark.parametrize("rho, expected", [(0.1, -10.0), (0.05, -20.0)])
def test_rounded_cross_min_curvature(rho, expected):
    tr = boundary_trace(RoundedCrossPolygon(1.5, 3.0, rho), 4096)
    assert min_curvature(tr) == pytest.approx(expected, rel=1e-12)
    vals = np.unique(np.round(tr.kappa[np.isfinite(tr.kappa)], 9))
    assert set(vals) <= {0.0, round(1 / rho, 9), round(-1 / rho, 9)}


def test_min_curvature_presets():
    assert min_curvature(boundary_trace(Disk(), 256)) == pytest.approx(1.0, abs=1e-10)
    assert min_curvature(boundary_trace(Ellipse(2, 1), 512)) == pytest.approx(0.25, abs=1e-6)


def test_min_curvature_converges_with_samples():
    dom = Peanut(0.4)
    m1 = min_curvature(boundary_trace(dom, 1024))
    m2 = min_curvature(boundary_trace(dom, 2048))
    assert abs(m1 - m2) < 50.0 / 1024 ** 2
    assert m2 == pytest.approx(dom.waist_curvature, abs=1e-5)


def test_trace_frame_is_orthonormal_and_right_handed():
    for dom in (Disk(), Ellipse(2, 1), Peanut(0.4), RoundedCrossPolygon(1.5, 3, 0.2)):
        tr = boundary_trace(dom, 512)
        assert np.allclose(np.hypot(*tr.tau.T), 1.0, atol=1e-12)
        assert np.allclose(np.hypot(*tr.nu.T), 1.0, atol=1e-12)
        cross = tr.tau[:, 0] * tr.nu[:, 1] - tr.tau[:, 1] * tr.nu[:, 0]
        assert np.allclose(cross, 1.0, atol=1e-12)
        # outward normal on the disk family
        assert tr.turning() == pytest.approx(-2 * np.pi, abs=1e-9)


def test_trace_is_clockwise():
    tr = boundary_trace(Disk(), 256)
    x, y = tr.points.T
    area = 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
    assert area < 0


def test_frenet_residual_first_order():
    errs = []
    for n in (256, 512, 1024):
        tr = boundary_trace(Ellipse(2, 1), n)
        ds = np.diff(tr.s)
        dtau = np.diff(tr.tau, axis=0) / ds[:, None]
        mid_k = 0.5 * (tr.kappa[1:] + tr.kappa[:-1])
        mid_nu = 0.5 * (tr.nu[1:] + tr.nu[:-1])
        errs.append(np.max(np.hypot(*(dtau + mid_k[:, None] * mid_nu).T)))
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(rates > 0.9)


def test_polygon_vertices_tagged_without_curvature():
    tr = boundary_trace(CrossPolygon(1.5, 3.0), 512)
    tags = list(tr.tag)
    assert tags.count("reentrant") == 4
    assert tags.count("convex") == 8
    corner = np.isin(tr.tag, ["convex", "reentrant"])
    assert np.all(np.isnan(tr.kappa[corner]))
    assert np.all(tr.kappa[~corner] == 0.0)


def test_cross_rejects_degenerate_lengths():
    with pytest.raises(DomainError):
        CrossPolygon(1.0, 2.0)
    with pytest.raises(DomainError):
        RoundedCrossPolygon(1.5, 3.0, 0.6)


def test_cross_reentrant_vertices():
    dom = CrossPolygon(1.5, 3.0)
    inside = dom.contains(np.array([[0.99, 0.99], [1.01, 1.01], [1.4, 0.5], [0.5, 2.9]]))
    assert inside.tolist() == [True, False, True, True]


def test_reflection_symmetry_of_point_sets():
    rng = np.random.default_rng(1)
    p = rng.uniform(-3.5, 3.5, (4000, 2))
    for dom in (Ellipse(2, 1), Peanut(0.4), CrossPolygon(1.5, 3), Stadium(1.0, 0.7),
                RoundedCrossPolygon(1.5, 3, 0.2)):
        q = p * np.array([1.0, -1.0])
        assert np.array_equal(dom.contains(p), dom.contains(q))


def test_profile_positive_inside():
    for dom in (Ellipse(2, 1), Peanut(0.4), Stadium(1.0, 0.7)):
        l = dom.half_width
        z = np.linspace(-l, l, 201)[1:-1]
        assert np.all(dom.profile(z) > 0)
        assert dom.check_A1()


def test_a2_examples():
    disk = check_condition_A2(1.0, boundary_trace(Disk(), 256))
    assert disk.holds and disk.margin == pytest.approx(2.0, abs=1e-10)
    rc = check_condition_A2(1.0, boundary_trace(RoundedCrossPolygon(2.0, 2.0, 0.5), 1024))
    assert not rc.holds and rc.margin == pytest.approx(-1.0, abs=1e-12)
    pea = Peanut(0.4)
    k0 = -min_curvature(boundary_trace(pea, 1 << 15))
    assert k0 > 0
    res = check_condition_A2(2 * k0, boundary_trace(pea, 1 << 15))
    assert res.holds and res.margin == pytest.approx(k0, rel=1e-9)


def test_a2_requires_positive_beta():
    with pytest.raises(DomainError):
        check_condition_A2(0.0, boundary_trace(Disk(), 256))


def test_peanut_with_min_curvature():
    pea = Peanut.with_min_curvature(-0.5)
    assert pea.waist_curvature == pytest.approx(-0.5, abs=1e-12)
    assert min_curvature(boundary_trace(pea, 8192)) == pytest.approx(-0.5, abs=1e-6)


def test_sup_convolution_degenerate_weight_is_exact():
    e = Ellipse(2, 1)
    tab = sup_convolve_profiles(e, Ellipse(1, 0.5), 0.0, n=512)
    z = tab.x[1:-1]
    assert np.array_equal(tab.phi[1:-1], np.maximum(e.profile(z), 0.0))


def test_sup_convolution_of_disks_is_a_disk():
    tab = sup_convolve_profiles(Disk(), Disk(), 0.5, n=512)
    exact = np.sqrt(np.maximum(1 - tab.x ** 2, 0.0))
    assert np.max(np.abs(tab.phi - exact)) < 1e-6


def test_sup_convolution_dominates_brute_force():
    A, B = Ellipse(2, 1), Ellipse(1, 0.5)
    tab = sup_convolve_profiles(A, B, 0.5, n=512)
    # at the table nodes z, any split z = u/2 + v/2 is dominated
    rng = np.random.default_rng(3)
    k = rng.integers(0, len(tab.x), 4000)
    z = tab.x[k]
    u = rng.uniform(np.maximum(-2, 2 * z - 1), np.minimum(2, 2 * z + 1))
    v = 2 * z - u
    brute = 0.5 * A.profile(u) + 0.5 * B.profile(v)
    assert np.all(tab.phi[k] >= brute - 1e-9)
    # each weighted profile alone is dominated (take the partner's centre)
    sel = np.abs(tab.x) <= 0.99
    zz, psi = tab.x[sel], tab.phi[sel]
    assert np.all(psi >= 0.5 * A.profile(2 * zz) + 0.5 * B.profile(0.0 * zz) - 1e-9)
    assert np.all(psi >= 0.5 * A.profile(0.0 * zz) + 0.5 * B.profile(2 * zz) - 1e-9)


def test_sup_convolution_symmetric_under_weight_swap():
    A, B = Ellipse(2, 1), Ellipse(1, 0.5)
    t1 = sup_convolve_profiles(A, B, 0.3, n=512)
    t2 = sup_convolve_profiles(B, A, 0.7, n=512)
    assert np.allclose(t1.x, t2.x, atol=1e-12)
    assert np.max(np.abs(t1.phi - t2.phi)) < 1e-8


def test_sup_convolution_monotone_in_profiles():
    small, big = Ellipse(2, 0.8), Ellipse(2, 1.0)
    B = Disk()
    lo = sup_convolve_profiles(small, B, 0.4, n=512)
    hi = sup_convolve_profiles(big, B, 0.4, n=512)
    assert np.all(hi.phi >= lo.phi - 1e-9)


def test_sup_convolution_rejects_bad_weight():
    with pytest.raises(DomainError):
        sup_convolve_profiles(Disk(), Disk(), 1.5)


def test_family_of_disks():
    fam = build_family(Disk(), Disk(), 1.0)
    for t in np.linspace(0, 1, 9):
        d = fam(t)
        tr = boundary_trace(d, 512)
        assert check_condition_A2(1.0, tr).margin > 0
        k = tr.kappa
        assert np.max(k) - np.min(k) < 1e-6 * np.max(k)


def test_disk_to_ellipse_family_satisfies_a2():
    fam = build_family(Disk(), Ellipse(2, 1), 1.0, safety=0.9)
    assert isinstance(fam, DeformationFamily)
    assert fam(0.0) is fam.omega0 and fam(1.0) is fam.omega1
    for t in np.linspace(0, 1, 33):
        assert check_condition_A2(1.0, boundary_trace(fam(t), 1024)).holds


def test_family_is_continuous_in_t():
    fam = build_family(Disk(), Ellipse(2, 1), 1.0)
    z = np.linspace(-0.9, 0.9, 64)

    def jump(t, dt):
        return np.max(np.abs(fam(t).profile(z) - fam(t + dt).profile(z)))

    for t in (0.1, 0.5, 0.8):
        assert jump(t, 1 / 128) < 0.6 * jump(t, 1 / 64)


def test_disk_to_peanut_family():
    pea = Peanut.with_min_curvature(-0.5)
    fam = build_radial_family(Disk(), pea, 1.0)
    for t in np.linspace(0, 1, 17):
        d = fam(t)
        assert d.check_A1()
        assert check_condition_A2(1.0, boundary_trace(d, 2048)).holds


def test_minkowski_family_rejects_a2_violation():
    with pytest.raises(DomainError):
        build_family(Disk(), Peanut.with_min_curvature(-2.0), 1.0)


def test_domain_config_round_trip():
    for cfg in ({"kind": "ellipse", "a": 2.0, "b": 1.0}, {"kind": "cross", "a": 1.5, "b": 3.0},
                {"kind": "rounded_cross", "a": 1.5, "b": 3.0, "rho": 0.05},
                {"kind": "peanut", "neck": 0.4}):
        dom = domain_from_config(json.loads(json.dumps(cfg)))
        assert domain_from_config(dom.config()).config() == dom.config()
    with pytest.raises(DomainError):
        domain_from_config({"kind": "torus"})
    with pytest.raises(DomainError):
        domain_from_config({"kind": "cross", "a": 1.5})


def test_trace_csv_header(tmp_path):
    tr = boundary_trace(Disk(), 64)
    tr.to_csv(tmp_path / "t.csv")
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "s,x,y,tx,ty,nx,ny,kappa,tag"
    assert len(lines) == 65


def test_trace_requires_enough_samples():
    with pytest.raises(DomainError):
        boundary_trace(Disk(), 16)


def test_profile_table_domain():
    z = np.linspace(-1, 1, 1025)
    tab = ProfileTable(z, np.sqrt(1 - z ** 2))
    assert tab.half_width == 1.0
