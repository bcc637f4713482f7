import numpy as np
import pytest

from cvloss import (
    GraphSpec,
    cz_symplectic,
    decay_generator,
    graph_cov,
    initial_cov,
    is_symplectic_orthogonal,
    marginal,
    min_excess_kurtosis,
    square_graph_adjacency,
    square_graph_scenario,
    subtract_then_lose,
    symplectic_eigenvalues,
    symplectic_form,
)

from conftest import mode_basis


class TestInitialCov:
    def test_no_squeezing_is_vacuum(self):
        np.testing.assert_array_equal(initial_cov([0.0, 0.0]).V, np.eye(4))

    def test_ten_db(self):
        np.testing.assert_allclose(initial_cov([10.0]).V, np.diag([10.0, 0.1]), atol=1e-12)

    def test_mixed_squeezing(self):
        np.testing.assert_allclose(
            initial_cov([10.0, 0.0]).V, np.diag([10.0, 1.0, 0.1, 1.0]), atol=1e-12
        )


class TestCzSymplectic:
    def test_empty_graph(self):
        np.testing.assert_array_equal(cz_symplectic(np.zeros((3, 3))), np.eye(6))

    def test_square_graph_block(self):
        G = cz_symplectic(square_graph_adjacency())
        off = G[:4, 4:]
        assert np.count_nonzero(off) == 8
        assert np.all(np.isin(off, (0.0, 1.0)))

    def test_determinant_one(self, rng):
        for _ in range(20):
            m = int(rng.integers(2, 6))
            A = (rng.uniform(size=(m, m)) < 0.4).astype(float)
            A = np.triu(A, 1)
            A = A + A.T
            G = cz_symplectic(A)
            assert np.linalg.det(G) == pytest.approx(1.0, rel=1e-10)
            J = symplectic_form(m)
            np.testing.assert_allclose(G.T @ J @ G, J, atol=1e-12)


class TestGraphCov:
    def test_empty_graph_keeps_initial(self):
        spec = GraphSpec(adjacency=np.zeros((2, 2)), squeezing_db=(7.0, 3.0))
        np.testing.assert_allclose(graph_cov(spec).V, initial_cov([7.0, 3.0]).V, atol=1e-12)

    def test_square_graph_is_pure(self):
        spec, _, _ = square_graph_scenario("uniform")
        nus = symplectic_eigenvalues(graph_cov(spec).V)
        np.testing.assert_allclose(nus, np.ones(4), atol=1e-9)

    def test_purity_for_random_squeezing(self, rng):
        for _ in range(100):
            m = int(rng.integers(2, 6))
            A = np.triu((rng.uniform(size=(m, m)) < 0.5).astype(float), 1)
            spec = GraphSpec(adjacency=A + A.T, squeezing_db=tuple(rng.uniform(-6, 12, size=m)))
            nus = symplectic_eigenvalues(graph_cov(spec).V)
            np.testing.assert_allclose(nus, np.ones(m), atol=1e-9)

    def test_weighted_adjacency_rejected(self):
        A = np.array([[0.0, 0.5], [0.5, 0.0]])
        with pytest.raises(ValueError):
            GraphSpec(adjacency=A, squeezing_db=(1.0, 1.0))

    def test_asymmetric_adjacency_rejected(self):
        A = np.array([[0.0, 1.0], [0.0, 0.0]])
        with pytest.raises(ValueError):
            GraphSpec(adjacency=A, squeezing_db=(1.0, 1.0))


class TestScenarios:
    def test_uniform_generator_is_half_identity(self):
        _, _, channel = square_graph_scenario("uniform")
        np.testing.assert_allclose(decay_generator(channel).D, np.eye(8) / 2, atol=1e-15)

    def test_vertex_loss_rates(self):
        _, g, channel = square_graph_scenario("vertex-loss")
        assert len(channel.modes) == 1
        np.testing.assert_array_equal(channel.modes[0], mode_basis(4)[0])
        assert channel.gammas == (1.0,)
        np.testing.assert_array_equal(g, mode_basis(4)[0])

    def test_overlapping_mode(self):
        _, _, channel = square_graph_scenario("overlapping")
        e = mode_basis(4)
        np.testing.assert_allclose(channel.modes[0], (e[0] + e[3]) / np.sqrt(2), atol=1e-15)

    def test_off_support_mode(self):
        _, _, channel = square_graph_scenario("off-support")
        e = mode_basis(4)
        np.testing.assert_allclose(channel.modes[0], (e[1] + e[2] + e[3]) / np.sqrt(3), atol=1e-15)

    def test_unknown_scenario(self):
        with pytest.raises(ValueError, match="unknown scenario"):
            square_graph_scenario("sideways")


class TestLosslessBaseline:
    def test_mirror_symmetry_of_spectator_vertices(self):
        # with uniform squeezing and subtraction at vertex 1, vertices 2 and 4
        # are related by the square's reflection automorphism
        spec, g, channel = square_graph_scenario("uniform")
        state = graph_cov(spec)
        out = subtract_then_lose(state, g, channel, 0.0)
        w2 = marginal(out, [1])
        w4 = marginal(out, [3])
        assert np.abs(w2.sigma - w4.sigma).max() < 1e-12
        assert np.abs(w2.M - w4.M).max() < 1e-12
        assert abs(w2.c - w4.c) < 1e-12

    def test_non_gaussian_at_every_vertex_strongest_on_diagonal(self):
        spec, g, channel = square_graph_scenario("uniform")
        state = graph_cov(spec)
        out = subtract_then_lose(state, g, channel, 0.0)
        e = mode_basis(4)
        kappas = [min_excess_kurtosis(out, e[k])[0] for k in range(4)]
        assert all(k < 0 for k in kappas)
        # most pronounced at the subtraction vertex and its opposite corner
        assert kappas[0] < kappas[1] and kappas[0] < kappas[3]
        assert kappas[2] < kappas[1] and kappas[2] < kappas[3]
