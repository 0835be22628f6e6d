#include <catch2/catch.hpp>

#include <cmath>
#include <complex>

#include "cutwalk/expsup.hpp"
#include "cutwalk/instances.hpp"
#include "cutwalk/oracles.hpp"
#include "cutwalk/walkagg.hpp"

using namespace cutwalk;

namespace {

Graph triangle() { return Graph(3, {{1, 2}, {2, 3}, {1, 3}}); }

Graph cycle(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 1; i < n; ++i) e.push_back({i, i + 1});
  e.push_back({n, 1});
  return Graph(n, e);
}

Graph random_graph(Rng& rng, int n, double p) {
  std::vector<std::pair<int, int>> e;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      if (uniform(rng, 0.0, 1.0) < p) e.push_back({i, j});
  return Graph(n, e);
}

InteriorPoint random_point(Rng& rng, int n, double radius = 0.9) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (auto& v : w) v = uniform(rng, -radius, radius);
  return InteriorPoint(w);
}

}  // namespace

TEST_CASE("edge matrix entries", "[walkagg]") {
  CHECK(edge_matrix(Graph(3, {}), Complex(1, 2), InteriorPoint::zeros(3)).A.isZero());

  // z = 0 gives the 0/1 adjacency matrix regardless of w
  Rng rng(3);
  Graph g = random_graph(rng, 6, 0.5);
  auto em = edge_matrix(g, Complex(0, 0), random_point(rng, 6));
  for (int i = 1; i <= 6; ++i)
    for (int j = 1; j <= 6; ++j)
      CHECK(em.A(i - 1, j - 1) == (g.has_edge(i, j) ? Complex(1, 0) : Complex(0, 0)));

  // triangle at w = 0: adjacency of K3 for any z
  auto tri = edge_matrix(triangle(), Complex(0.7, -1.2), InteriorPoint::zeros(3));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(tri.A(i, j) == (i == j ? Complex(0, 0) : Complex(1, 0)));

  // entries are e^{-z s} with s = -(w_i + w_j)/2, symmetric, zero diagonal
  Complex z(0.4, 0.9);
  InteriorPoint w({0.3, -0.5, 0.1});
  Graph t3 = triangle();
  auto em2 = edge_matrix(t3, z, w);
  for (auto [i, j] : t3.edges()) {
    double s = -(w[static_cast<std::size_t>(i - 1)] + w[static_cast<std::size_t>(j - 1)]) / 2.0;
    CHECK(std::abs(em2.A(i - 1, j - 1) - std::exp(-z * s)) < 1e-15);
    CHECK(em2.A(i - 1, j - 1) == em2.A(j - 1, i - 1));
  }
  CHECK_THROWS_AS(edge_matrix(triangle(), z, InteriorPoint::zeros(4)), ValidationError);
}

TEST_CASE("kernel satisfies the slack/rate derivative duality", "[walkagg]") {
  // psi(s, z) = e^{-z s}: s d(psi)/ds = z d(psi)/dz, checked by central
  // differences at random points
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    double s = uniform(rng, 0.2, 3.0), z = uniform(rng, 0.2, 3.0), h = 1e-6;
    auto psi = [](double zz, double ss) { return std::exp(-zz * ss); };
    double dps = (psi(z, s + h) - psi(z, s - h)) / (2 * h);
    double dpz = (psi(z + h, s) - psi(z - h, s)) / (2 * h);
    CHECK(s * dps == Approx(z * dpz).epsilon(1e-6));
  }
}

TEST_CASE("pairwise walk sums match the enumeration oracle", "[walkagg]") {
  // single edge, l = 1: the kernel itself
  Graph e2(2, {{1, 2}});
  Complex z(0.8, 0.3);
  InteriorPoint w2({0.2, -0.4});
  CHECK(std::abs(walk_sum_pair(e2, z, w2, 1, 1, 2) -
                 std::exp(z * 0.5 * (0.2 - 0.4))) < 1e-15);

  // path 1-2-3, l=2 from 1 to 3: one walk through the middle vertex
  Graph path(3, {{1, 2}, {2, 3}});
  InteriorPoint w3({0.1, 0.2, 0.3});
  auto em = edge_matrix(path, z, w3);
  CHECK(std::abs(walk_sum_pair(path, z, w3, 2, 1, 3) - em.A(0, 1) * em.A(1, 2)) < 1e-15);

  // random graphs vs exhaustive enumeration
  Rng rng(7);
  for (int trial = 0; trial < 3; ++trial) {
    Graph g = random_graph(rng, 8, 0.4);
    InteriorPoint w = random_point(rng, 8);
    for (int l = 1; l <= 6; ++l) {
      int i = 1 + static_cast<int>(rng() % 8), j = 1 + static_cast<int>(rng() % 8);
      Complex direct = walk_sum_pair(g, z, w, l, i, j);
      Complex oracle = oracles::walk_sum(oracles::enumerate_walks(g, z, w.coords(), l, i, j));
      CHECK(std::abs(direct - oracle) <= 1e-10 * std::max(1.0, std::abs(oracle)));
    }
  }
}

TEST_CASE("closed walk aggregation", "[walkagg]") {
  // triangle at w=0, z=0: trace 6, one triangle
  CHECK(std::abs(closed_walks(triangle(), Complex(0, 0), InteriorPoint::zeros(3), 3) -
                 Complex(1, 0)) < 1e-15);
  // C5 at l=5: the cycle is the only closed 5-walk
  CHECK(std::abs(closed_walks(cycle(5), Complex(0, 0), InteriorPoint::zeros(5), 5) -
                 Complex(1, 0)) < 1e-12);
  // bipartite: no odd closed walks
  CHECK(std::abs(closed_walks(cycle(6), Complex(1, 0), InteriorPoint::zeros(6), 5)) < 1e-15);
  CHECK_THROWS_AS(closed_walks(triangle(), Complex(0, 0), InteriorPoint::zeros(3), 2),
                  ValidationError);
}

TEST_CASE("walk potential on canonical graphs", "[walkagg]") {
  Complex z(0.6, 1.1);
  auto tri = walk_potential(triangle(), z, InteriorPoint::zeros(3));
  CHECK(tri.k_max == 1);
  CHECK(std::abs(tri.psi - Complex(1, 0)) < 1e-14);
  CHECK(std::abs(tri.psi_tilde - std::exp(z)) < 1e-14);

  auto c5 = walk_potential(cycle(5), z, InteriorPoint::zeros(5));
  CHECK(c5.k_max == 2);
  CHECK(std::abs(c5.psi_l.at(3)) < 1e-14);
  CHECK(std::abs(c5.psi_l.at(5) - Complex(1, 0)) < 1e-14);
  CHECK(std::abs(c5.psi - Complex(1, 0)) < 1e-14);
  CHECK(std::abs(c5.psi_tilde - std::exp(z)) < 1e-14);

  // edgeless and bipartite graphs aggregate to zero
  CHECK(std::abs(walk_potential(Graph(5, {}), z, InteriorPoint::zeros(5)).psi) == 0.0);
  CHECK(std::abs(walk_potential(cycle(6), z, InteriorPoint::zeros(6)).psi) < 1e-14);

  CHECK_THROWS_AS(walk_potential(Graph(2, {{1, 2}}), z, InteriorPoint::zeros(2)),
                  ValidationError);
}

TEST_CASE("psi equals tr B and psi~ carries the e^z transition factor", "[walkagg]") {
  Rng rng(11);
  Complex z(0.5, 1.3);
  Graph g = random_graph(rng, 8, 0.5);
  InteriorPoint w = random_point(rng, 8);
  auto rep = walk_potential(g, z, w);
  CHECK(std::abs(rep.psi - rep.B.trace()) < 1e-14);
  CHECK(rep.psi_tilde == std::exp(z) * rep.psi);
  Complex sum(0, 0);
  for (auto [l, v] : rep.psi_l) {
    CHECK(l % 2 == 1);
    sum += v;
  }
  CHECK(std::abs(sum - rep.psi) <= 1e-12 * std::max(1.0, std::abs(rep.psi)));
}

TEST_CASE("walk aggregates dominate cycle-only sums for real kernels", "[walkagg]") {
  Rng rng(13);
  Graph g = random_graph(rng, 9, 0.35);
  InteriorPoint w = random_point(rng, 9, 0.5);
  double z = 0.7;
  auto cycles = oracles::enumerate_odd_cycles(g, 9);
  for (int l = 3; l <= 7; l += 2) {
    double cycle_sum = 0.0;
    for (const auto& c : cycles) {
      if (static_cast<int>(c.size()) != l) continue;
      double s = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i) {
        int a = c[i], b = c[(i + 1) % c.size()];
        s += -(w[static_cast<std::size_t>(a - 1)] + w[static_cast<std::size_t>(b - 1)]) / 2.0;
      }
      cycle_sum += std::exp(-z * s);
    }
    double psi_l = closed_walks(g, Complex(z, 0.0), w, l).real();
    CHECK(psi_l >= cycle_sum - 1e-12);
    if (l == 3) {
      // no closed 3-walks except triangles, so equality holds there
      CHECK(psi_l == Approx(cycle_sum).margin(1e-12));
    }
  }
}

TEST_CASE("edge matrix derivative", "[walkagg]") {
  Rng rng(17);
  Graph g = random_graph(rng, 6, 0.5);
  InteriorPoint w = random_point(rng, 6);
  Complex z(0.9, 0.4);

  // z = 0 kills the derivative
  CHECK(edge_matrix_derivative(g, Complex(0, 0), w, 2).isZero());

  // a coordinate touching no edge contributes nothing
  Graph e2(3, {{1, 2}});
  CHECK(edge_matrix_derivative(e2, z, InteriorPoint::zeros(3), 3).isZero());

  // finite differences over each coordinate
  for (int p = 1; p <= 6; ++p) {
    Matrix d = edge_matrix_derivative(g, z, w, p);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        auto entry = [&](const std::vector<double>& coords) {
          return edge_matrix(g, z, InteriorPoint::unchecked(coords)).A(i, j);
        };
        Complex fd = oracles::finite_difference_partial(entry, w.coords(),
                                                        static_cast<std::size_t>(p - 1), 1e-6);
        CHECK(std::abs(d(i, j) - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
      }
  }
}

TEST_CASE("power derivatives", "[walkagg]") {
  Rng rng(19);
  Graph g = random_graph(rng, 6, 0.5);
  InteriorPoint w = random_point(rng, 6);
  Complex z(0.8, -0.6);

  // k = 1 reduces to the edge matrix derivative
  CHECK((power_derivative(g, z, w, 1, 2) - edge_matrix_derivative(g, z, w, 2))
            .cwiseAbs()
            .maxCoeff() < 1e-14);

  // trace identity: d tr(A^k)/dw_p = k tr(D_p A^{k-1})
  auto em = edge_matrix(g, z, w);
  for (int k = 2; k <= 5; ++k) {
    for (int p = 1; p <= 6; ++p) {
      Complex lhs = power_derivative(g, z, w, k, p).trace();
      Matrix dp = edge_matrix_derivative(g, z, w, p);
      Complex rhs = static_cast<double>(k) * (dp * matrix_power(em.A, static_cast<unsigned>(k - 1))).trace();
      CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
    }
  }

  // second derivative vs finite differences of the first power
  for (int p = 1; p <= 3; ++p)
    for (int q = 1; q <= 3; ++q) {
      Matrix d2 = power_derivative(g, z, w, 3, p, q);
      auto entry = [&](const std::vector<double>& coords) {
        return matrix_power(edge_matrix(g, z, InteriorPoint::unchecked(coords)).A, 3)(0, 1);
      };
      Complex fd = oracles::finite_difference_second(entry, w.coords(),
                                                     static_cast<std::size_t>(p - 1),
                                                     static_cast<std::size_t>(q - 1), 1e-4);
      CHECK(std::abs(d2(0, 1) - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
    }
}

TEST_CASE("gradient and hessian of the potential match finite differences", "[walkagg]") {
  Rng rng(23);
  Graph g = random_graph(rng, 7, 0.5);
  InteriorPoint w = random_point(rng, 7, 0.6);
  Complex z(0.5, 0.8);

  auto rep = walk_potential(g, z, w, DerivativeLevel::Hessian);
  REQUIRE(rep.gradient.has_value());
  REQUIRE(rep.hessian.has_value());

  auto value = [&](const std::vector<double>& coords) {
    return walk_potential(g, z, InteriorPoint::unchecked(coords)).psi_tilde;
  };
  for (int p = 0; p < 7; ++p) {
    Complex fd = oracles::finite_difference_partial(value, w.coords(), static_cast<std::size_t>(p),
                                                    1e-5);
    CHECK(std::abs((*rep.gradient)(p) - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
  }
  for (int p = 0; p < 7; ++p)
    for (int q = p; q < 7; ++q) {
      Complex fd = oracles::finite_difference_second(value, w.coords(), static_cast<std::size_t>(p),
                                                     static_cast<std::size_t>(q), 1e-4);
      CHECK(std::abs((*rep.hessian)(p, q) - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
      CHECK((*rep.hessian)(p, q) == (*rep.hessian)(q, p));
    }
}

TEST_CASE("large-n path agrees with the direct power ladder", "[walkagg]") {
  Rng rng(29);
  Graph g = random_graph(rng, 70, 0.12);
  std::vector<double> coords(70);
  for (auto& v : coords) v = uniform(rng, -0.95, -0.8);
  InteriorPoint w(coords);
  Complex z(3.0, 0.5);

  auto rep = walk_potential(g, z, w, DerivativeLevel::Gradient);  // Schur + PS path

  auto em = edge_matrix(g, z, w);
  Matrix pw = em.A;
  Complex psi_direct(0, 0);
  Matrix b_direct = Matrix::Zero(70, 70);
  int kmax = (70 - 1) / 2;
  for (int l = 2; l <= 2 * kmax + 1; ++l) {
    pw = pw * em.A;
    if (l % 2 == 1) {
      if (l >= 3) {
        CHECK(std::abs(pw.trace() / (2.0 * l) - rep.psi_l.at(l)) <=
              1e-9 * std::max(1.0, std::abs(pw.trace() / (2.0 * l))));
      }
      b_direct += pw / (2.0 * l);
      psi_direct += pw.trace() / (2.0 * l);
    }
  }
  CHECK(std::abs(rep.psi - psi_direct) <= 1e-9 * std::max(1.0, std::abs(psi_direct)));
  double bscale = std::max(1.0, b_direct.cwiseAbs().maxCoeff());
  CHECK((rep.B - b_direct).cwiseAbs().maxCoeff() <= 1e-9 * bscale);

  // gradient closed form from the direct ladder
  REQUIRE(rep.gradient.has_value());
  Matrix pw2 = em.A;
  Vector grad_direct = Vector::Zero(70);
  for (int l = 2; l <= 2 * kmax + 1; ++l) {
    pw2 = pw2 * em.A;
    if (l % 2 == 1) grad_direct += pw2.diagonal();
  }
  grad_direct = (std::exp(z) * 0.5 * z) * grad_direct;
  double gscale = std::max(1.0, grad_direct.cwiseAbs().maxCoeff());
  CHECK(((*rep.gradient) - grad_direct).cwiseAbs().maxCoeff() <= 1e-9 * gscale);
}

TEST_CASE("fitted derivative weights depend only on composition rank", "[walkagg]") {
  for (int k = 1; k <= 6; ++k) {
    auto w1 = derive_power_derivative_weights(k, 1);
    REQUIRE(w1.weights.size() == 2);
    CHECK(w1.residual < 1e-10);
    CHECK(w1.weights[0] == Approx(1.0).margin(1e-8));
    if (k >= 2) CHECK(w1.weights[1] == Approx(2.0).margin(1e-8));
  }
  for (int k = 2; k <= 6; ++k) {
    auto w2 = derive_power_derivative_weights(k, 2);
    REQUIRE(w2.weights.size() == 3);
    CHECK(w2.residual < 1e-10);
    CHECK(w2.weights[0] == Approx(2.0).margin(1e-8));
    CHECK(w2.weights[1] == Approx(4.0).margin(1e-8));
    if (k >= 3) CHECK(w2.weights[2] == Approx(8.0).margin(1e-8));
  }
}

TEST_CASE("superposed potential", "[walkagg]") {
  Rng rng(31);
  Graph g = random_graph(rng, 6, 0.6);
  InteriorPoint w = random_point(rng, 6, 0.5);
  Complex z0(0.9, 0.2);

  ExpSuperposition single;
  single.terms.push_back({Complex(1, 0), z0});
  CHECK(std::abs(superposed_potential(g, w, single) - walk_potential(g, z0, w).psi_tilde) < 1e-14);

  ExpSuperposition empty;
  CHECK(superposed_potential(g, w, empty) == Complex(0, 0));
}

TEST_CASE("superposition of exponentials approximates reciprocal slack sums", "[walkagg]") {
  // all sharper slacks positive: w = -0.8 everywhere makes every closed odd
  // walk of length l have slack 0.8 l - 1 >= 1.4
  Rng rng(37);
  Graph g = random_graph(rng, 8, 0.45);
  InteriorPoint w(std::vector<double>(8, -0.8));
  ExpSuperposition sup = reciprocal_superposition(0.5, 10, 32);

  double expected = 0.0;
  int kmax = (8 - 1) / 2;
  for (int l = 3; l <= 2 * kmax + 1; l += 2) {
    for (const auto& rec : oracles::enumerate_closed_walks(g, Complex(0, 0),
                                                           std::vector<double>(8, 0.0), l)) {
      double s = 0.0;
      for (std::size_t t = 0; t + 1 < rec.vertices.size(); ++t) s += 0.8;
      double stilde = s - 1.0;
      expected += (1.0 / stilde) / (2.0 * l);
    }
  }
  Complex phi = superposed_potential(g, w, sup);
  if (expected > 0.0) {
    CHECK(std::abs(phi.real() - expected) / expected < 1e-5);
    CHECK(std::abs(phi.imag()) < 1e-12);
  }
}
