#include "support.hpp"

#include "sgcp/errors.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

using namespace sgcp;
using testing::random_dirichlet;
using testing::random_field;

TEST_CASE("energy of simple fields") {
  auto g0 = make_graph(3, 0);
  DiscreteForm f0(g0);
  CHECK(f0.energy(VertexField::constant(g0, 7.0)) == 0.0);
  VertexField e(g0, Eigen::Vector3d(1.0, 0.0, 0.0));
  CHECK(f0.energy(e) == doctest::Approx(2.0).epsilon(1e-15));

  std::mt19937_64 rng(1);
  for (int m = 0; m <= 4; ++m) {
    auto g = make_graph(3, m);
    DiscreteForm f(g);
    CHECK(f.renormalization() == doctest::Approx(std::pow(5.0 / 3.0, m)));
    const VertexField u = random_field(g, rng);
    CHECK(f.energy(u) == doctest::Approx(testing::edge_energy(*g, u)).epsilon(1e-12));
    CHECK(f.energy(3.0 * u) == doctest::Approx(9.0 * f.energy(u)).epsilon(1e-12));
  }
}

TEST_CASE("bilinear form is symmetric, kills constants and polarizes") {
  std::mt19937_64 rng(2);
  for (int n : {3, 4}) {
    auto g = make_graph(n, 3);
    DiscreteForm f(g);
    for (int k = 0; k < 20; ++k) {
      const VertexField u = random_field(g, rng);
      const VertexField v = random_field(g, rng);
      CHECK(std::abs(f.bilinear(u, VertexField::constant(g, 2.5))) < 1e-10);
      CHECK(f.bilinear(u, v) == doctest::Approx(f.bilinear(v, u)).epsilon(1e-14));
      CHECK(f.bilinear(u, u) == doctest::Approx(f.energy(u)).epsilon(1e-14));
      const double polar = 0.25 * (testing::edge_energy(*g, u + v) - testing::edge_energy(*g, u - v));
      CHECK(f.bilinear(u, v) == doctest::Approx(polar).epsilon(1e-10).scale(f.energy(u) + f.energy(v)));
    }
  }
}

TEST_CASE("stiffness is symmetric with the constants as kernel") {
  auto g = make_graph(3, 3);
  DiscreteForm f(g);
  const Eigen::MatrixXd k(f.stiffness());
  CHECK((k - k.transpose()).norm() == 0.0);
  CHECK((k * Eigen::VectorXd::Ones(k.rows())).norm() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
  CHECK(std::abs(es.eigenvalues()[0]) < 1e-10);
  CHECK(es.eigenvalues()[1] > 1e-6);
}

TEST_CASE("measure weights") {
  auto g0 = make_graph(3, 0);
  for (std::size_t i = 0; i < 3; ++i) CHECK(measure_weights(g0)[i] == doctest::Approx(1.0 / 3.0));

  auto g1 = make_graph(3, 1);
  const VertexField w = measure_weights(g1);
  for (std::size_t v = 0; v < g1->vertex_count(); ++v)
    CHECK(w[v] == doctest::Approx(g1->is_boundary(v) ? 1.0 / 9.0 : 2.0 / 9.0).epsilon(1e-15));

  for (int n : {3, 4, 5}) {
    for (int m = 0; m <= 4; ++m) {
      auto g = make_graph(n, m);
      const VertexField wm = measure_weights(g);
      CHECK(std::abs(wm.values().sum() - 1.0) < 1e-12);
      CHECK(wm.values().minCoeff() > 0.0);
    }
  }
}

TEST_CASE("integration") {
  auto g1 = make_graph(3, 1);
  CHECK(integrate(*g1, VertexField::constant(g1, 1.0)) == doctest::Approx(1.0).epsilon(1e-15));
  // Indicator of the first cell: one boundary vertex (1/9) and two midpoints (2/9 each).
  VertexField ind = VertexField::zeros(g1);
  for (std::size_t v : g1->cells()[0]) ind[v] = 1.0;
  CHECK(integrate(*g1, ind) == doctest::Approx(5.0 / 9.0).epsilon(1e-15));

  std::mt19937_64 rng(3);
  auto g = make_graph(3, 3);
  const VertexField u = random_field(g, rng), v = random_field(g, rng);
  CHECK(integrate(*g, 2.0 * u + 3.0 * v) ==
        doctest::Approx(2.0 * integrate(*g, u) + 3.0 * integrate(*g, v)).epsilon(1e-13));
}

TEST_CASE("harmonic extension of one level") {
  auto g0 = make_graph(3, 0);
  auto g1 = make_graph(3, 1);
  VertexField u = VertexField::zeros(g0);
  u[g0->boundary()[0]] = 1.0;  // value 1 at p_1
  const VertexField ext = harmonic_extension(g0, g1, u);
  CHECK(ext[g1->find(BaryVertex{1, {1, 1, 0}})] == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(ext[g1->find(BaryVertex{1, {1, 0, 1}})] == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(ext[g1->find(BaryVertex{1, {0, 1, 1}})] == doctest::Approx(0.2).epsilon(1e-14));

  const VertexField c = harmonic_extension(g0, g1, VertexField::constant(g0, 3.0));
  CHECK((c.values().array() - 3.0).abs().maxCoeff() < 1e-14);
  CHECK(DiscreteForm(g1).energy(c) < 1e-24);
}

TEST_CASE("harmonic extension keeps the energy and the range") {
  std::mt19937_64 rng(4);
  for (int n : {3, 4}) {
    for (int m = 0; m <= 3; ++m) {
      auto coarse = make_graph(n, m);
      auto fine = make_graph(n, m + 1);
      DiscreteForm fc(coarse), ff(fine);
      for (int k = 0; k < 10; ++k) {
        const VertexField u = random_field(coarse, rng);
        const VertexField e = harmonic_extension(coarse, fine, u);
        CHECK(std::abs(ff.energy(e) - fc.energy(u)) <= 1e-9 * fc.energy(u));
        CHECK(e.values().minCoeff() >= u.values().minCoeff() - 1e-12);
        CHECK(e.values().maxCoeff() <= u.values().maxCoeff() + 1e-12);
        const VertexField back = restrict_to(coarse, e);
        CHECK((back.values() - u.values()).norm() == 0.0);
      }
    }
  }
}

TEST_CASE("Dirichlet Laplacian") {
  CHECK_FALSE(dirichlet_laplacian(DiscreteForm(make_graph(3, 0))).has_value());

  std::mt19937_64 rng(5);
  auto g = make_graph(3, 3);
  DiscreteForm f(g);
  const auto lap = dirichlet_laplacian(f);
  REQUIRE(lap.has_value());
  CHECK(lap->apply(VertexField::constant(g, 1.0)).cwiseAbs().maxCoeff() < 1e-10);

  VertexField bdry = random_field(g, rng);
  const VertexField harm = f.harmonic_from_boundary(bdry);
  for (std::size_t i = 0; i < g->boundary().size(); ++i) CHECK(harm[g->boundary()[i]] == bdry[g->boundary()[i]]);
  CHECK(lap->apply(harm).cwiseAbs().maxCoeff() < 1e-10);

  // Independent pairing: sum_i w_i (Lu)_i v_i with L = -D^-1 K built by hand.
  const Eigen::MatrixXd k(f.stiffness());
  for (int t = 0; t < 20; ++t) {
    const VertexField u = random_field(g, rng);
    const VertexField v = random_dirichlet(g, rng);
    const Eigen::VectorXd ku = k * u.values();
    double by_hand = 0.0;
    for (std::size_t i : g->interior()) by_hand += -ku[static_cast<Eigen::Index>(i)] * v[i];
    CHECK(lap->pairing(f, u, v) == doctest::Approx(-f.bilinear(u, v)).epsilon(1e-10));
    CHECK(lap->pairing(f, u, v) == doctest::Approx(by_hand).epsilon(1e-10));
  }
}

TEST_CASE("norms and the embedding bound") {
  auto g = make_graph(3, 4);
  DiscreteForm f(g);
  const Norms z = f.norms(VertexField::zeros(g));
  CHECK(z.energy_norm == 0.0);
  CHECK(z.sup_norm == 0.0);
  CHECK(z.l2_mu_norm == 0.0);

  std::mt19937_64 rng(6);
  for (int k = 0; k < 200; ++k) {
    const VertexField u = random_dirichlet(g, rng);
    const Norms nm = f.norms(u);
    REQUIRE(nm.embedding_holds.has_value());
    CHECK(*nm.embedding_holds);
    CHECK(nm.sup_norm <= 9.0 * nm.energy_norm);
    CHECK(nm.l2_mu_norm <= nm.sup_norm);
  }
  CHECK_FALSE(f.norms(random_field(g, rng)).embedding_holds.has_value());
}

TEST_CASE("interior view matches the full form") {
  std::mt19937_64 rng(7);
  auto g = make_graph(3, 3);
  DiscreteForm f(g);
  const VertexField u = random_dirichlet(g, rng), v = random_dirichlet(g, rng);
  const Eigen::VectorXd ui = f.restrict_interior(u), vi = f.restrict_interior(v);
  CHECK(f.interior_bilinear(ui, vi) == doctest::Approx(f.bilinear(u, v)).epsilon(1e-13));
  CHECK(f.interior_energy(ui) == doctest::Approx(f.energy(u)).epsilon(1e-13));
  CHECK((f.extend_dirichlet(ui).values() - u.values()).norm() == 0.0);
  const Eigen::VectorXd p = f.solve_interior(ui);
  CHECK((f.interior_stiffness() * p - ui).norm() < 1e-10 * ui.norm());
}

TEST_CASE("mismatched graphs are rejected") {
  auto g2 = make_graph(3, 2);
  auto g3 = make_graph(3, 3);
  DiscreteForm f(g2);
  CHECK_THROWS_AS(f.energy(VertexField::zeros(g3)), PreconditionError);
}
