"""End-to-end acceptance battery, one test per shipped guarantee."""

import numpy as np
from scipy import ndimage

from jetcones.cones import (
    GeneratedCone,
    HalfSpaceList,
    bipolar_roundtrip,
    dual_span,
    edge,
    parabola_region,
    recession_cone,
    stab_membership,
    support_infimum,
    supporting_test,
)
from jetcones.gridcheck import (
    GridFunction,
    MollifierKernel,
    distributional_check,
    ess_limsup,
    viscosity_check,
)
from jetcones.jets import (
    Jet2,
    JetHalfSpace,
    JetOperator,
    SymMatrix,
    jet_to_vec,
    min_eigenvalue,
)
from jetcones.linearcase import (
    POLE_CLEARANCE,
    DiscMesh,
    DiscreteMeasure,
    EllipticOperator,
    equivalence_harness,
    fd_dirichlet_solve,
    green_kernel,
    green_potential_stack,
    linear_battery,
    poisson_mass,
)
from jetcones.subequations import (
    SubequationSpec,
    decomposition_check,
    diagonal_entry_spec,
    diagonal_pair_spec,
    laplacian_spec,
    psd_spec,
    sample_stable,
    second_order_complete,
)

H = 1.0 / 64.0


def _staggered(f, m=64, half=0.5, h=H):
    origin = (-half + h / 2, -half + h / 2)
    return GridFunction.from_callable(f, origin, h, (m, m))


def test_c01_parabola_fixture_geometry():
    f = parabola_region()
    rng = np.random.default_rng(101)

    rec = recession_cone(f, rng=rng)
    assert isinstance(rec, GeneratedCone) and len(rec.rays) == 1
    ray = rec.rays[0] / np.linalg.norm(rec.rays[0])
    angle = np.arccos(np.clip(ray @ np.array([0.0, 1.0]), -1.0, 1.0))
    assert angle < 1e-6

    assert dual_span(f, rng=rng).dim == 2
    assert edge(f, rng=rng).dim == 0

    hits = 0
    while hits < 50:
        w = rng.normal(size=2)
        w /= np.linalg.norm(w)
        if w[1] <= 0.05:
            continue
        assert stab_membership(w, f, rng=rng)
        hits += 1
    assert not stab_membership(np.array([1.0, 0.0]), f, rng=rng)
    assert not stab_membership(np.array([-1.0, 0.0]), f, rng=rng)
    assert support_infimum(f, np.array([1.0, 0.0]), rng=rng) == -np.inf
    print("criterion 01 parabola fixture geometry: PASS")


def test_c02_bipolar_roundtrip_suite():
    rng = np.random.default_rng(202)
    mismatches = 0
    for _ in range(100):
        d = int(rng.integers(2, 5))
        rays = rng.normal(size=(int(rng.integers(1, 2 * d + 1)), d))
        rep = bipolar_roundtrip(GeneratedCone(d, rays), rng=rng, tol=1e-9)
        mismatches += rep["mismatches"]
    for _ in range(20):
        d = int(rng.integers(2, 5))
        m = int(rng.integers(d, 2 * d + 1))
        normals = rng.normal(size=(m, d))
        offsets = -rng.uniform(0.0, 1.0, size=m)
        hs = HalfSpaceList(d, list(zip(normals, offsets)))
        rep = bipolar_roundtrip(hs, rng=rng, tol=1e-9)
        mismatches += rep["mismatches"]
    assert mismatches == 0
    print("criterion 02 bipolar round trips: PASS")


def test_c03_completeness_matches_ellipticity():
    rng = np.random.default_rng(303)
    seen = {True: 0, False: 0}
    for trial in range(200):
        n = 2
        halfspaces = []
        for _ in range(int(rng.integers(1, 4))):
            rank = int(rng.integers(1, n + 1))
            b = rng.normal(size=(rank, n))
            op = JetOperator(
                -float(rng.uniform(0.0, 1.0)),
                rng.normal(size=n),
                SymMatrix.from_full(b.T @ b),
            )
            halfspaces.append(JetHalfSpace(op, float(rng.normal() * 0.3)))
        spec = SubequationSpec(n, "halfspace_list", halfspaces)
        report = second_order_complete(spec, samples=16, rng=np.random.default_rng(trial))
        stable = sample_stable(spec, 100, rng=np.random.default_rng(trial + 1000))
        elliptic = all(min_eigenvalue(op.a.full()) > 1e-10 for op, _ in stable)
        assert report.complete == elliptic, trial
        seen[report.complete] += 1
    assert seen[True] >= 20 and seen[False] >= 20

    assert not second_order_complete(diagonal_entry_spec(2, 0)).complete
    assert second_order_complete(diagonal_pair_spec()).complete
    assert second_order_complete(laplacian_spec(2)).complete
    assert second_order_complete(psd_spec(2)).complete
    print("criterion 03 completeness matches sampled ellipticity: PASS")


def test_c04_decomposition_inside_outside():
    rng = np.random.default_rng(404)
    for name, spec in (("psd", psd_spec(2)), ("trace", laplacian_spec(2))):
        stable = sample_stable(spec, 40, rng=rng)
        inside = []
        outside = []
        for _ in range(100):
            b = rng.normal(size=(2, 2))
            if name == "psd":
                a = b.T @ b
            else:
                a = (b + b.T) / 2
                a += (max(0.0, -np.trace(a)) / 2 + rng.uniform(0.0, 1.0)) * np.eye(2)
            inside.append(Jet2(float(rng.normal()), rng.normal(size=2), SymMatrix.from_full(a)))
        for _ in range(100):
            delta = float(rng.uniform(0.1, 1.0))
            b = rng.normal(size=(2, 2))
            if name == "psd":
                lam, vec = np.linalg.eigh(b.T @ b)
                lam[0] = -delta
                a = (vec * lam) @ vec.T
            else:
                a = (b + b.T) / 2
                a -= ((np.trace(a) + delta * np.sqrt(2.0)) / 2) * np.eye(2)
            outside.append(
                (Jet2(float(rng.normal()), rng.normal(size=2), SymMatrix.from_full(a)), delta)
            )
        rep = decomposition_check(spec, stable, inside, outside, rng=rng, tol=1e-9)
        assert rep["ok"], (name, rep["inside_failures"])
        assert all(row["escalations"] <= 3 for row in rep["outside"])
    print("criterion 04 stable half-space decomposition: PASS")


def _fixture_directions(name, f, rng, k=10):
    dirs = []
    for i in range(k):
        if i % 2 == 0:
            w = rng.normal(size=f.d)
        elif name == "parabola":
            w = np.array([rng.normal() * 0.3, rng.uniform(0.5, 2.0)])
        elif name == "psd":
            b = rng.normal(size=(2, 2))
            iso = SymMatrix.from_full(b.T @ b + 0.2 * np.eye(2)).iso_vector()
            w = np.concatenate([np.zeros(3), iso])
        else:
            w = sum(rng.uniform(0.2, 1.0) * np.asarray(n) for n, _ in f.items)
        dirs.append(w / np.linalg.norm(w))
    return dirs


def test_c05_edge_base_independence_and_stab_inside_support():
    rng = np.random.default_rng(505)
    jet_base_a = jet_to_vec(Jet2(0.0, np.zeros(2), SymMatrix.eye(2)))
    jet_base_b = jet_to_vec(
        Jet2(-1.0, np.array([0.3, -0.2]), SymMatrix.from_full(2.0 * np.eye(2)))
    )
    fixtures = {
        "parabola": (parabola_region(), np.array([0.0, 1.0]), np.array([1.5, 2.0])),
        "psd": (psd_spec(2).rep, jet_base_a, jet_base_b),
        "trace": (laplacian_spec(2).rep, jet_base_a, jet_base_b),
        "pair": (diagonal_pair_spec().rep, jet_base_a, jet_base_b),
        "entry": (diagonal_entry_spec(2).rep, jet_base_a, jet_base_b),
    }
    for name, (f, b1, b2) in fixtures.items():
        e1 = edge(f, rng=rng, base_point=b1)
        e2 = edge(f, rng=rng, base_point=b2)
        assert e1.dim == e2.dim, name
        if e1.dim > 0:
            assert e1.max_principal_angle(e2) <= 1e-8, name

    hits = 0
    for name, (f, _, _) in fixtures.items():
        for w in _fixture_directions(name, f, rng):
            if stab_membership(w, f, rng=rng):
                hits += 1
                assert supporting_test(f, w, rng=rng)["verdict"] != "not_containing", name
    assert hits >= 15
    print("criterion 05 edge base independence, stable directions support: PASS")


def test_c06_battery_verdicts_and_reproduction():
    op = EllipticOperator(np.eye(2))
    battery = linear_battery()
    expected = {
        "point_mass_potential": (True, True),
        "half_plane_ramp": (True, False),
        "paraboloid": (True, False),
        "saddle_quad": (True, True),
        "saddle_cubic": (True, True),
    }
    for member in battery:
        pole = member["pole"]
        exclude = None if pole is None else (pole, POLE_CLEARANCE)
        for sign, slot in ((1.0, 0), (-1.0, 1)):
            grid = GridFunction(
                member["grid"].origin, member["grid"].spacing, sign * member["grid"].values
            )
            rep = equivalence_harness(
                grid, op, eps=6 * H, rng=np.random.default_rng(606), exclude=exclude
            )
            assert rep["agree"], (member["name"], sign, rep["verdicts"])
            assert rep["verdicts"]["classical"] == expected[member["name"]][slot]

        for sign in (1.0, -1.0):
            if sign < 0 and pole is not None:
                continue
            grid = GridFunction(
                member["grid"].origin, member["grid"].spacing, sign * member["grid"].values
            )
            upper = ess_limsup(grid, [2 * H])["limsup"]
            ax = grid.axes()
            xx, yy = np.meshgrid(ax[0], ax[1], indexing="ij")
            keep = np.ones_like(xx, dtype=bool)
            if pole is not None:
                keep = np.hypot(xx - pole[0], yy - pole[1]) >= POLE_CLEARANCE
            err = float(np.max(np.abs(upper.values - grid.values)[keep]))
            assert err <= member["lipschitz"] * 2 * H, (member["name"], sign, err)
    print("criterion 06 battery verdict coherence and reproduction: PASS")


def test_c07_kernel_checks():
    rng = np.random.default_rng(707)
    x = rng.uniform(-0.9, 0.9, size=(200, 2))
    x = x[np.linalg.norm(x, axis=1) <= 0.9]
    mass = poisson_mass(x, 1.0, m=512)
    assert np.max(np.abs(mass - 1.0)) <= 1e-6

    inner = rng.uniform(-0.95, 0.95, size=(10000, 2))
    inner = inner[np.linalg.norm(inner, axis=1) < 0.95]
    sources = rng.uniform(-0.9, 0.9, size=(40, 2))
    sources = sources[np.linalg.norm(sources, axis=1) < 0.9]
    for y in sources:
        assert np.all(green_kernel(inner, y, 1.0) <= 1e-12)

    theta = rng.uniform(0.0, 2 * np.pi, size=500)
    rim = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    for y in sources[:10]:
        assert np.max(np.abs(green_kernel(rim, y, 1.0))) <= 1e-10

    for _ in range(200):
        a, b = rng.uniform(-0.9, 0.9, size=(2, 2))
        if max(np.linalg.norm(a), np.linalg.norm(b)) >= 0.95:
            continue
        gab = green_kernel(a[None, :], b, 1.0)[0]
        gba = green_kernel(b[None, :], a, 1.0)[0]
        assert abs(gab - gba) <= 1e-10

    measure = DiscreteMeasure(np.array([[0.1, -0.2], [-0.3, 0.4]]), np.array([0.7, 0.3]))
    stack = green_potential_stack(measure, inner[:500], 1.0, levels=(1, 2, 4, 8, 16))
    for (_, upper), (_, lower) in zip(stack, stack[1:]):
        assert np.all(upper >= lower)
    print("criterion 07 disc kernel properties: PASS")


def test_c08_discrete_maximum_principle():
    rng = np.random.default_rng(808)
    mesh = DiscMesh(1.0, 64)
    for _ in range(50):
        a12 = float(rng.uniform(-0.5, 0.5))
        a = np.array(
            [
                [abs(a12) + rng.uniform(0.1, 1.5), a12],
                [a12, abs(a12) + rng.uniform(0.1, 1.5)],
            ]
        )
        op = EllipticOperator(a, rng.uniform(-1.0, 1.0, size=2), -float(rng.uniform(0.0, 1.0)))
        k = int(rng.integers(1, 4))
        amp = float(rng.uniform(0.2, 1.0))
        phase = float(rng.uniform(0.0, 2 * np.pi))
        base = float(rng.uniform(0.1, 1.0))

        def g(pts, k=k, amp=amp, phase=phase, base=base):
            return base + amp * np.cos(k * np.arctan2(pts[:, 1], pts[:, 0]) + phase)

        sol = fd_dirichlet_solve(op, mesh, g)
        assert sol.interior_max() <= sol.boundary_max() + 1e-8
    print("criterion 08 discrete maximum principle: PASS")


def test_c09_regularization_properties():
    rng = np.random.default_rng(909)
    rough = GridFunction((0.0, 0.0), H, rng.normal(size=(48, 48)))
    stack = ess_limsup(rough, [8 * H, 4 * H, 2 * H])["stack"]
    for (_, upper), (_, lower) in zip(stack, stack[1:]):
        assert np.all(upper.values >= lower.values)

    members = [
        (_staggered(lambda x, y: np.maximum(x, 0.0)), 1.0),
        (_staggered(lambda x, y: x**2 - y**2), 1.5),
        (_staggered(lambda x, y: np.abs(x) + np.abs(y)), 1.5),
    ]
    for grid, lip in members:
        upper = ess_limsup(grid, [2 * H])["limsup"]
        assert np.all(upper.values <= grid.values + lip * 2 * H + 1e-12)

    plateau = np.full((24, 24), 2.0)
    plateau[7, 9] = -3.0
    spiked = GridFunction((0.0, 0.0), H, plateau)
    upper = ess_limsup(spiked, [2 * H])["limsup"]
    assert np.all(upper.values == 2.0)
    assert upper.values[7, 9] == 2.0
    print("criterion 09 regularization properties: PASS")


def test_c10_round_trip_at_grid_scale():
    spec = diagonal_pair_spec()

    def crease(x, y):
        return np.maximum(
            x**2 + 0.5 * y**2 + 0.3 * x - 0.1, 0.5 * x**2 + y**2 - 0.3 * x
        )

    u = _staggered(crease)
    assert viscosity_check(u, spec)["ok"]
    assert distributional_check(u, spec, samples=8, rng=np.random.default_rng(1010))["ok"]

    kern = MollifierKernel(2, 6 * H, H)
    smooth = ndimage.convolve(u.values, kern.rho, mode="constant", cval=0.0)
    smooth *= kern.cell_volume
    margin = kern.rho.shape[0] // 2
    window = (slice(margin, 64 - margin), slice(margin, 64 - margin))
    moll = GridFunction(
        (u.origin[0] + margin * H, u.origin[1] + margin * H), H, smooth[window]
    )
    upper = ess_limsup(moll, [2 * H])["limsup"]
    lip = 1.394
    err = float(np.max(np.abs(upper.values - u.values[window])))
    assert err <= 4 * H * lip, err
    print("criterion 10 round trip at grid scale: PASS")
