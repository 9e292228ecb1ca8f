"""Kernel evaluation: point kernels, direct summation, treecode."""

import numpy as np
import pytest

from helpers import double_loop_velocity
from vortexlab.cloud import ParticleCloud
from vortexlab.errors import CoincidentPointError
from vortexlab.kernels import (KernelParams, QuadTree, biot_savart,
                               blob_kernel, direct_velocity,
                               min_cross_distance, min_pairwise_distance,
                               newtonian_potential, split_velocity,
                               tree_velocity)

TWO_PI = 2.0 * np.pi


class TestPointKernels:
    def test_unit_x(self):
        assert np.allclose(biot_savart([1.0, 0.0]), [0.0, 1.0 / TWO_PI],
                           atol=1e-15)

    def test_two_up(self):
        assert np.allclose(biot_savart([0.0, 2.0]), [-1.0 / (2 * TWO_PI), 0.0],
                           atol=1e-15)

    def test_antisymmetry_exact(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            z = rng.normal(0, 3, 2)
            assert (biot_savart(-z) == -biot_savart(z)).all()

    def test_singular_origin(self):
        with pytest.raises(CoincidentPointError):
            biot_savart([0.0, 0.0])

    def test_potential_values(self):
        assert newtonian_potential([1.0, 0.0]) == 0.0
        assert np.isclose(newtonian_potential([np.e, 0.0]), -1.0 / TWO_PI,
                          atol=1e-15)
        assert np.isclose(newtonian_potential([1.0 / np.e, 0.0]),
                          1.0 / TWO_PI, atol=1e-15)
        with pytest.raises(CoincidentPointError):
            newtonian_potential([0.0, 0.0])

    def test_blob_values(self):
        assert np.allclose(blob_kernel([1.0, 0.0], 1.0),
                           [0.0, 1.0 / (2 * TWO_PI)], atol=1e-16)
        assert (blob_kernel([0.0, 0.0], 0.1) == 0.0).all()
        assert np.allclose(blob_kernel([3.0, 0.0], 0.0),
                           biot_savart([3.0, 0.0]), atol=0)
        with pytest.raises(CoincidentPointError):
            blob_kernel([0.0, 0.0], 0.0)

    def test_blob_antisymmetry_and_tangency(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            z = rng.normal(0, 2, 2)
            db = rng.uniform(0, 0.5)
            k = blob_kernel(z, db)
            assert (blob_kernel(-z, db) == -k).all()
            dot = k[0] * z[0] + k[1] * z[1]
            assert abs(dot) <= 8 * np.finfo(float).eps * \
                (abs(k[0] * z[0]) + abs(k[1] * z[1]) + 1e-300)


class TestDirectVelocity:
    def test_single_source(self):
        u = direct_velocity([[0.0, 0.0]], [1.0], [[1.0, 0.0]])
        assert np.allclose(u, [[0.0, 1.0 / TWO_PI]], atol=1e-16)

    def test_cancellation(self):
        u = direct_velocity([[1.0, 0.0], [-1.0, 0.0]], [1.0, 1.0],
                            [[0.0, 0.0]])
        assert np.allclose(u, 0.0, atol=1e-17)

    def test_matches_double_loop(self):
        rng = np.random.default_rng(5)
        src = rng.uniform(0, 1, (100, 2))
        gam = rng.uniform(-1, 1, 100)
        tgt = rng.uniform(0, 1, (10, 2))
        ref = double_loop_velocity(src, gam, tgt, 0.05)
        for det in (True, False):
            u = direct_velocity(src, gam, tgt,
                                KernelParams(blob_radius=0.05,
                                             deterministic=det))
            assert np.max(np.abs(u - ref)) <= 1e-12 * np.max(np.abs(ref))

    def test_self_interaction_skips_diagonal(self):
        rng = np.random.default_rng(6)
        src = rng.uniform(0, 1, (40, 2))
        gam = rng.uniform(0.1, 1, 40)
        ref = double_loop_velocity(src, gam, src, 0.0, self_skip=True)
        u = direct_velocity(src, gam, None, KernelParams(),
                            self_interaction=True)
        assert np.max(np.abs(u - ref)) <= 1e-12 * np.max(np.abs(ref))

    def test_coincident_pair_raises(self):
        with pytest.raises(CoincidentPointError):
            direct_velocity([[0.0, 0.0]], [1.0], [[0.0, 0.0]],
                            KernelParams(blob_radius=0.0))

    def test_coincident_ok_with_blob(self):
        u = direct_velocity([[0.0, 0.0]], [1.0], [[0.0, 0.0]],
                            KernelParams(blob_radius=0.1))
        assert (u == 0.0).all()

    def test_repeatable_bits(self):
        rng = np.random.default_rng(7)
        src = rng.uniform(0, 1, (200, 2))
        gam = rng.uniform(-1, 1, 200)
        p = KernelParams(blob_radius=0.01, deterministic=True)
        u1 = direct_velocity(src, gam, None, p, self_interaction=True)
        u2 = direct_velocity(src, gam, None, p, self_interaction=True)
        assert (u1 == u2).all()


class TestTreeVelocity:
    def test_theta_zero_bitwise_equals_direct(self):
        rng = np.random.default_rng(8)
        src = rng.uniform(-1, 1, (1500, 2))
        gam = rng.uniform(-1, 1, 1500)
        p = KernelParams(blob_radius=0.02, opening_angle=0.0,
                         deterministic=True)
        ud = direct_velocity(src, gam, None, p, self_interaction=True)
        ut = tree_velocity(src, gam, None, p, self_interaction=True)
        assert (ud == ut).all()

    def test_theta_zero_bitwise_external_targets(self):
        rng = np.random.default_rng(9)
        src = rng.uniform(-1, 1, (700, 2))
        gam = rng.uniform(0.1, 1, 700)
        tgt = rng.uniform(-2, 2, (150, 2))
        p = KernelParams(blob_radius=0.0, opening_angle=0.0,
                         deterministic=True)
        assert (tree_velocity(src, gam, tgt, p) ==
                direct_velocity(src, gam, tgt, p)).all()

    def test_single_source_identical(self):
        p = KernelParams(blob_radius=0.0, opening_angle=0.5)
        src = [[0.25, -0.5]]
        gam = [2.0]
        tgt = [[1.0, 1.0], [-3.0, 0.5]]
        assert (tree_velocity(src, gam, tgt, p) ==
                direct_velocity(src, gam, tgt, p)).all()

    def test_accuracy_at_half_theta(self):
        rng = np.random.default_rng(10)
        src = rng.uniform(-1, 1, (4000, 2))
        gam = rng.uniform(0.1, 1.0, 4000)
        p = KernelParams(blob_radius=0.02, opening_angle=0.5)
        ud = direct_velocity(src, gam, None, p, self_interaction=True)
        ut = tree_velocity(src, gam, None, p, self_interaction=True)
        err = np.hypot(*(ut - ud).T).max()
        assert err <= 1e-3 * np.hypot(*ud.T).max()

    def test_repeatable_bits(self):
        rng = np.random.default_rng(11)
        src = rng.uniform(-1, 1, (900, 2))
        gam = rng.uniform(-1, 1, 900)
        p = KernelParams(blob_radius=0.01, opening_angle=0.6)
        u1 = tree_velocity(src, gam, None, p, self_interaction=True)
        u2 = tree_velocity(src, gam, None, p, self_interaction=True)
        assert (u1 == u2).all()


class TestSplitVelocity:
    def _cloud(self, xy, gam, tag):
        return ParticleCloud(xy, gam, tag, pitch=None, blob_radius=0.0)

    def test_single_component_far_field_zero(self):
        cloud = self._cloud([[0, 0], [1, 0]], [1.0, 1.0], [0, 0])
        u_near, u_far = split_velocity(cloud, 0, [0.3, 0.7])
        assert (u_far == 0.0).all()

    def test_two_singleton_components(self):
        # evaluation at the component's own particle with zero blob radius:
        # the coincident source is skipped, the far field is the exact kernel
        cloud = self._cloud([[0, 0], [1, 0]], [1.0, 1.0], [0, 1])
        u_near, u_far = split_velocity(
            cloud, 0, [0.0, 0.0], KernelParams(blob_radius=0.0))
        assert (u_near == 0.0).all()
        expected = biot_savart([-1.0, 0.0])
        assert np.allclose(u_far, expected, atol=1e-16)
        assert np.allclose(u_far, [0.0, -1.0 / TWO_PI], atol=1e-16)

    def test_recombination(self):
        rng = np.random.default_rng(12)
        n = 90
        xy = rng.uniform(-1, 1, (n, 2))
        gam = rng.uniform(0.1, 1, n)
        tag = rng.integers(0, 3, n)
        cloud = self._cloud(xy, gam, tag)
        x = np.array([2.5, -1.0])
        p = KernelParams(blob_radius=0.05)
        total = direct_velocity(xy, gam, [x], p)[0]
        for i in range(3):
            u_near, u_far = split_velocity(cloud, i, x, p)
            assert np.allclose(u_near + u_far, total, atol=1e-14)


class TestQuadTreeInvariants:
    def test_structure(self):
        rng = np.random.default_rng(13)
        xy = rng.uniform(-1, 1, (500, 2))
        gam = rng.uniform(-1, 1, 500)
        tree = QuadTree(xy, gam, leaf_size=8)

        # every particle in exactly one leaf range
        seen = np.zeros(500, dtype=int)
        for node in range(tree.n_nodes):
            if tree.is_leaf(node):
                s = tree.start[node]
                seen[tree.orig[s:s + tree.count[node]]] += 1
        assert (seen == 1).all()

        scale = np.abs(gam).sum()
        for node in range(tree.n_nodes):
            kids = [c for c in tree.child[node] if c >= 0]
            if kids:
                assert abs(tree.gsum[node] -
                           sum(tree.gsum[c] for c in kids)) <= 1e-12 * scale
            s = tree.start[node]
            seg = slice(s, s + tree.count[node])
            g = tree.gs[seg].sum()
            if g != 0.0:
                cx = (tree.gs[seg] * tree.xs[seg]).sum() / g
                assert abs(cx - tree.wx[node]) <= 1e-9 * max(1, abs(cx))
            # children partition the parent's range
            if kids:
                assert sum(tree.count[c] for c in kids) == tree.count[node]


class TestFarFieldBounds:
    # fixture constants: two unit-intensity components separated by 1.5 with
    # support radius ~0.2; the far field is below max|K| at range 1.1 and its
    # Lipschitz quotient below the kernel gradient scale at that range
    FAR_FIELD_CAP = 0.16
    LIPSCHITZ_CAP = 0.16

    def test_far_field_magnitude_and_lipschitz(self):
        from vortexlab.initial_data import InitialDataSpec, \
            sample_initial_cloud
        spec = InitialDataSpec(centers=[[-1, 0], [1, 0]],
                               intensities=[1.0, 1.0], epsilon=0.2,
                               support_radius=0.2, separation=1.5,
                               p_exponent=4.0)
        cloud = sample_initial_cloud(spec, pitch=0.2 / 6)
        rng = np.random.default_rng(15)
        for i in range(2):
            pts = cloud.xy[cloud.component_indices(i)]
            sample = pts[rng.choice(len(pts), 25, replace=False)]
            _, far = split_velocity(cloud, i, sample,
                                    KernelParams(blob_radius=cloud.blob_radius))
            mags = np.hypot(far[:, 0], far[:, 1])
            assert mags.max() <= self.FAR_FIELD_CAP
            for a in range(0, 24, 3):
                for b in range(a + 1, 25, 4):
                    gap = np.hypot(*(sample[a] - sample[b]))
                    if gap < 1e-9:
                        continue
                    quot = np.hypot(*(far[a] - far[b])) / gap
                    assert quot <= self.LIPSCHITZ_CAP


class TestDistanceHelpers:
    def test_min_pairwise(self):
        pts = [[0, 0], [1, 0], [3, 0]]
        assert min_pairwise_distance(pts) == 1.0
        assert min_pairwise_distance([[5, 5]]) == np.inf

    def test_min_cross_matches_brute(self):
        rng = np.random.default_rng(14)
        a = rng.uniform(0, 1, (40, 2))
        b = rng.uniform(2, 3, (30, 2))
        brute = min(np.hypot(*(p - q)) for p in a for q in b)
        assert np.isclose(min_cross_distance(a, b), brute, rtol=1e-15)
