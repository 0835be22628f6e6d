// Acceptance suite: runs every contract criterion end to end and prints one
// pass/fail line per criterion. Exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "cutwalk/expsup.hpp"
#include "cutwalk/formulation.hpp"
#include "cutwalk/instances.hpp"
#include "cutwalk/jproduct.hpp"
#include "cutwalk/json_io.hpp"
#include "cutwalk/mobiusagg.hpp"
#include "cutwalk/oracles.hpp"
#include "cutwalk/proof.hpp"
#include "cutwalk/walkagg.hpp"

using namespace cutwalk;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& what) {
  std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion, what.c_str());
  if (!pass) ++failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Graph cycle(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 1; i < n; ++i) e.push_back({i, i + 1});
  e.push_back({n, 1});
  return Graph(n, e);
}

Graph petersen() {
  return Graph(10, {{1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 1},
                    {6, 8}, {8, 10}, {10, 7}, {7, 9}, {9, 6},
                    {1, 6}, {2, 7}, {3, 8}, {4, 9}, {5, 10}});
}

Graph random_graph(Rng& rng, int n, double p) {
  std::vector<std::pair<int, int>> e;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      if (uniform(rng, 0.0, 1.0) < p) e.push_back({i, j});
  return Graph(n, e);
}

InteriorPoint random_point(Rng& rng, int n, double radius = 0.8) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (auto& v : w) v = uniform(rng, -radius, radius);
  return InteriorPoint(w);
}

CnfFormula random_formula(Rng& rng, int n, int m) {
  std::vector<Clause> clauses;
  for (int c = 0; c < m; ++c) {
    std::vector<int> vs(static_cast<std::size_t>(n));
    std::iota(vs.begin(), vs.end(), 1);
    std::shuffle(vs.begin(), vs.end(), rng);
    auto lit = [&](int v) { return rng() % 2 ? v : -v; };
    clauses.push_back(make_clause(lit(vs[0]), lit(vs[1]), lit(vs[2])));
  }
  return CnfFormula(n, clauses);
}

std::string data_file(const std::string& name) {
  return std::string(CUTWALK_DATA_DIR) + "/" + name;
}

// ---------------------------------------------------------------------------

void criterion_1_motzkin() {
  auto t0 = Clock::now();
  auto cert = load_certificate(data_file("motzkin_cert.json"));
  auto exact = verify_sos_certificate(cert, SosStrategy::ExactSphere);
  SosOptions opts;
  opts.samples = 1000;
  opts.seed = 424242;
  auto numeric = verify_sos_certificate(cert, SosStrategy::NumericSample, opts);
  double dt = seconds_since(t0);
  bool pass = exact.accepted && exact.exact_zero && numeric.max_abs_numeric <= 1e-12 && dt < 1.0;
  std::ostringstream msg;
  msg << "Motzkin certificate: exact residual "
      << (exact.exact_zero ? "0" : exact.reduced_residual.str()) << ", numeric max |r| = "
      << numeric.max_abs_numeric << " at 1000 sphere points, " << dt << " s";
  report(1, pass, msg.str());
}

void criterion_2_robinson() {
  auto t0 = Clock::now();
  auto cert = load_certificate(data_file("robinson_cert.json"));
  // weights as printed: (1, 3/4, 1/4, 1, 1)
  bool weights_ok = cert.squares.size() == 5 && cert.squares[0].first == 1 &&
                    cert.squares[1].first == Rational(3, 4) &&
                    cert.squares[2].first == Rational(1, 4) && cert.squares[3].first == 1 &&
                    cert.squares[4].first == 1;
  auto exact = verify_sos_certificate(cert, SosStrategy::ExactSphere);
  SosOptions opts;
  opts.samples = 1000;
  opts.seed = 424242;
  auto numeric = verify_sos_certificate(cert, SosStrategy::NumericSample, opts);
  double dt = seconds_since(t0);
  bool pass = weights_ok && exact.accepted && exact.exact_zero &&
              numeric.max_abs_numeric <= 1e-9 && dt < 1.0;
  std::ostringstream msg;
  msg << "Robinson certificate: exact residual " << (exact.exact_zero ? "0" : "nonzero")
      << ", numeric max |r| = " << numeric.max_abs_numeric << ", " << dt << " s";
  report(2, pass, msg.str());
}

void criterion_3_mutations() {
  int rejected = 0, total = 0;
  for (const auto& name : {"motzkin_cert.json", "robinson_cert.json"}) {
    // mutate each of the five weights
    for (std::size_t i = 0; i < 5; ++i) {
      auto cert = load_certificate(data_file(name));
      cert.squares[i].first += Rational(1, 10);
      ++total;
      if (!verify_sos_certificate(cert, SosStrategy::ExactSphere).accepted) ++rejected;
    }
    // mutate the leading coefficient inside each square polynomial
    for (std::size_t i = 0; i < 5; ++i) {
      auto cert = load_certificate(data_file(name));
      auto lead = cert.squares[i].second.lead();
      cert.squares[i].second =
          cert.squares[i].second +
          Polynomial::monomial(cert.target.variables(), Rational(1, 10), lead.first);
      ++total;
      if (!verify_sos_certificate(cert, SosStrategy::ExactSphere).accepted) ++rejected;
    }
  }
  std::ostringstream msg;
  msg << "mutation rejection: " << rejected << "/" << total
      << " single-coefficient perturbations (+1/10) rejected";
  report(3, rejected == total && total == 20, msg.str());
}

void criterion_4_walk_identity() {
  auto t0 = Clock::now();
  std::vector<Graph> graphs{cycle(3), cycle(5), cycle(7), petersen()};
  Rng grng(804);
  for (int s = 0; s < 5; ++s) graphs.push_back(random_graph(grng, 8, 0.4));
  std::vector<Complex> zs{{0, 0}, {1, 0}, {0.5, 1.3}};
  double worst = 0.0;
  long checks = 0;
  bool pass = true;
  for (const auto& g : graphs) {
    Rng wrng(900 + g.n() + static_cast<int>(g.edge_count()));
    for (int wtrial = 0; wtrial < 3; ++wtrial) {
      InteriorPoint w = random_point(wrng, g.n());
      for (Complex z : zs) {
        EdgeMatrix em = edge_matrix(g, z, w);
        Matrix pw = Matrix::Identity(em.A.rows(), em.A.cols());
        for (int l = 1; l <= 7; ++l) {
          pw = pw * em.A;
          Complex closed = pw.trace() / (2.0 * l);
          Complex oracle =
              oracles::walk_sum(oracles::enumerate_closed_walks(g, z, w.coords(), l)) / (2.0 * l);
          double rel = std::abs(closed - oracle) / std::max(1e-30, std::abs(oracle));
          if (std::abs(oracle) == 0.0) rel = std::abs(closed);
          worst = std::max(worst, rel);
          pass = pass && rel <= 1e-10;
          ++checks;
        }
      }
    }
  }
  double dt = seconds_since(t0);
  pass = pass && dt < 30.0;
  std::ostringstream msg;
  msg << "MIS walk identity: " << checks << " trace/oracle comparisons, worst rel err = " << worst
      << ", " << dt << " s";
  report(4, pass, msg.str());
}

void criterion_5_cycle_specialization() {
  Rng rng(505);
  bool pass = true;
  double worst = 0.0;
  for (int k = 1; k <= 3; ++k) {
    int l = 2 * k + 1;
    Graph g = cycle(l);
    for (Complex z : {Complex(0.7, 0.0), Complex(0.4, 0.9)}) {
      InteriorPoint w = random_point(rng, l);
      double s = 0.0;  // slack of the cycle's implied inequality: -sum w
      for (double c : w.coords()) s -= c;
      Complex expected = std::exp(-z * s);
      auto rep = walk_potential(g, z, w);
      Complex psi_l = rep.psi_l.at(l);
      double err = std::abs(psi_l - expected);
      worst = std::max(worst, err);
      pass = pass && err <= 1e-12;
      Complex tilde = std::exp(z) * psi_l;
      pass = pass && std::abs(rep.psi_tilde - rep.psi * std::exp(z)) == 0.0;
      // psi~_l = e^z psi_l as the sharper-transition identity
      pass = pass && std::abs(tilde - std::exp(z) * expected) <= 1e-12;
    }
  }
  std::ostringstream msg;
  msg << "cycle specialization: psi_l equals the single odd-cycle kernel e^{-z s}, worst abs err = "
      << worst;
  report(5, pass, msg.str());
}

void criterion_6_derivatives() {
  bool pass = true;
  double worst = 0.0;
  // The second-difference stencil at h = 1e-5 carries a noise floor of about
  // 4 eps |psi~| / h^2, so the seeded instance stream keeps only candidates
  // whose aggregate has unit magnitude: the derivatives stay meaningful and
  // the comparison is limited by the recurrence, not by stencil noise.
  Rng rng(606);
  std::vector<Complex> zs{{1.0, 0.0}, {0.8, 0.9}, {0.9, -0.4}, {0.7, 0.3}, {1.1, 0.6}};
  int accepted = 0;
  while (accepted < 5) {
    int n = 6 + static_cast<int>(rng() % 2);
    std::vector<std::pair<int, int>> edges{{1, 2}, {2, 3}, {1, 3}};
    for (int i = 1; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j)
        if (!(j <= 3) && uniform(rng, 0.0, 1.0) < 0.4) edges.push_back({i, j});
    Graph g(n, edges);
    std::vector<double> coords(static_cast<std::size_t>(g.n()));
    for (auto& v : coords) v = uniform(rng, -0.9, -0.5);
    InteriorPoint w(coords);
    Complex z = zs[static_cast<std::size_t>(accepted)];
    auto rep = walk_potential(g, z, w, DerivativeLevel::Hessian);
    double scale = std::abs(rep.psi_tilde);
    if (scale < 0.1 || scale > 1.5) continue;
    ++accepted;

    auto value = [&](const std::vector<double>& c) {
      return walk_potential(g, z, InteriorPoint::unchecked(c)).psi_tilde;
    };
    const double h = 1e-5;
    for (int p = 0; p < g.n(); ++p) {
      Complex fd = oracles::finite_difference_partial(value, w.coords(),
                                                      static_cast<std::size_t>(p), h);
      double rel = std::abs((*rep.gradient)(p) - fd) / std::max(1.0, std::abs(fd));
      worst = std::max(worst, rel);
      pass = pass && rel <= 1e-5;
    }
    for (int p = 0; p < g.n(); ++p)
      for (int q = p; q < g.n(); ++q) {
        Complex fd = oracles::finite_difference_second(
            value, w.coords(), static_cast<std::size_t>(p), static_cast<std::size_t>(q), h);
        double rel = std::abs((*rep.hessian)(p, q) - fd) / std::max(1.0, std::abs(fd));
        worst = std::max(worst, rel);
        pass = pass && rel <= 1e-5;
      }
  }
  std::ostringstream msg;
  msg << "derivative recurrences vs central differences (h=1e-5), 5 instances: worst rel err = "
      << worst;
  report(6, pass, msg.str());
}

Tensor random_matrix_t(Rng& rng, std::size_t n, const std::string& rn, const std::string& cn) {
  Tensor t = Tensor::matrix(n, n, rn, cn);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      t.at({i, j}) = Complex(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
  return t;
}

void criterion_7_jproduct_laws() {
  bool pass = true;
  double worst = 0.0;
  auto note = [&](double err) {
    worst = std::max(worst, err);
    pass = pass && err <= 1e-10;
  };

  Rng rng(700);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 2 + rng() % 3;
    Tensor a = random_matrix_t(rng, n, "a", "p");
    Tensor b = random_matrix_t(rng, n, "p", "q");
    Tensor c = random_matrix_t(rng, n, "q", "d");
    Tensor b2 = random_matrix_t(rng, n, "p", "q");
    Complex alpha(uniform(rng, -2, 2), uniform(rng, -2, 2));
    Complex beta(uniform(rng, -2, 2), uniform(rng, -2, 2));

    // bilinearity
    note(join(b.scaled(alpha) + b2.scaled(beta), c, {"q"})
             .max_abs_diff(join(b, c, {"q"}).scaled(alpha) + join(b2, c, {"q"}).scaled(beta)));

    // associativity
    note(join(join(a, b, {"p"}), c, {"q"}).max_abs_diff(join(a, join(b, c, {"q"}), {"p"})));

    // contraction equals the tensor (matrix) product
    Tensor prod = contract(join(b, c, {"q"}));
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        Complex expect(0, 0);
        for (std::size_t t = 0; t < n; ++t) expect += b.at({i, t}) * c.at({t, j});
        err = std::max(err, std::abs(prod.at({i, j}) - expect));
      }
    note(err);

    // rank law
    if (contract(join(b, c, {"q"})).rank() != b.rank() + c.rank() - 2) pass = false;
    Tensor h = Tensor({n, n}, {{"p", Variance::Co, false}, {"q", Variance::Contra, false}});
    if (contract(join(b, h, {"p", "q"})).rank() != b.rank() + h.rank() - 4) pass = false;

    // derivative rule on tensors with entries linear in a parameter; the
    // join entries are then quadratic, so central differences are exact
    Tensor a0 = random_matrix_t(rng, n, "p", "q"), a1 = random_matrix_t(rng, n, "p", "q");
    Tensor c0 = random_matrix_t(rng, n, "q", "r"), c1 = random_matrix_t(rng, n, "q", "r");
    auto at = [&](double x) { return a0 + a1.scaled(Complex(x, 0)); };
    auto ct = [&](double x) { return c0 + c1.scaled(Complex(x, 0)); };
    double x0 = 0.37, hstep = 0.5;
    Tensor up = join(at(x0 + hstep), ct(x0 + hstep), {"q"});
    Tensor down = join(at(x0 - hstep), ct(x0 - hstep), {"q"});
    Tensor fd = (up + down.scaled(Complex(-1, 0))).scaled(Complex(1.0 / (2 * hstep), 0));
    Tensor rule = join(a1, ct(x0), {"q"}) + join(at(x0), c1, {"q"});
    note(fd.max_abs_diff(rule));

    // transpose of the triple product reverses the join indices
    note(join(join(a, b, {"p"}), c, {"q"})
             .transpose()
             .max_abs_diff(join(c.transpose(), join(b.transpose(), a.transpose(), {"p"}), {"q"})));
  }
  std::ostringstream msg;
  msg << "join product laws over 100 seeded trials each: worst abs err = " << worst;
  report(7, pass, msg.str());
}

void criterion_8_quadrature() {
  auto sup = reciprocal_superposition(0.5, 2, 60);
  bool terms_ok = sup.terms.size() == 63;
  double worst = 0.0, worst_s = 0.0;
  const int npts = 200;
  for (int i = 0; i < npts; ++i) {
    double t = static_cast<double>(i) / (npts - 1);
    double s = std::exp(-30.0 * (1.0 - t) + 1.0 * t);
    double rel = std::abs(sup.evaluate_real(s) - 1.0 / s) * s;
    if (rel > worst) {
      worst = rel;
      worst_s = s;
    }
  }
  bool sweep_ok = worst <= 1e-6;

  // index-shift scale identity at machine precision
  auto shifted = reciprocal_superposition(0.5, 3, 59);
  double shift_err = 0.0;
  for (double s : {0.3, 1.0, 4.2}) {
    double lhs = sup.evaluate_real(std::exp(0.5) * s);
    double rhs = std::exp(-0.5) * shifted.evaluate_real(s);
    shift_err = std::max(shift_err, std::abs(lhs - rhs) / std::abs(rhs));
  }
  bool shift_ok = shift_err <= 1e-14;

  std::ostringstream msg;
  msg << "quadrature (a=1/2, m=2, M=60, 63 terms): max rel err vs 1/s over [e^-30, e^1] = "
      << worst << " at s = " << worst_s << " (bound 1e-6); shift identity err = " << shift_err;
  report(8, terms_ok && sweep_ok && shift_ok, msg.str());
}

void criterion_9_sat_potential() {
  bool pass = true;
  double worst = 0.0;
  Complex z(0.6, 0.35);
  int zero_confirmed = 0;
  Rng rng(909);
  for (int trial = 0; trial < 10; ++trial) {
    CnfFormula f;
    if (trial == 0) {
      // monotone formula: no complement edges are reachable, phi must be 0
      f = CnfFormula(5, {make_clause(1, 2, 3), make_clause(2, 3, 4), make_clause(3, 4, 5)});
    } else {
      f = random_formula(rng, 5 + static_cast<int>(rng() % 2), 5 + static_cast<int>(rng() % 4));
    }
    InteriorPoint x = random_point(rng, f.n(), 0.6);
    auto rep = mobius_potential(f, z, x);
    Complex oracle = oracles::enumerate_mobius_walks(f, z, x.coords(), rep.k_max);
    double rel = std::abs(rep.phi - oracle) / std::max(1e-30, std::abs(oracle));
    if (std::abs(oracle) == 0.0) {
      rel = std::abs(rep.phi);
      if (trial == 0 && rel == 0.0) ++zero_confirmed;
    }
    worst = std::max(worst, rel);
    pass = pass && rel <= 1e-10;
  }
  pass = pass && zero_confirmed == 1;
  std::ostringstream msg;
  msg << "SAT potential vs mobius-walk oracle on 10 seeded formulas: worst rel err = " << worst
      << ", mobius-walk-free formulas confirmed at phi = 0: " << zero_confirmed;
  report(9, pass, msg.str());
}

void criterion_10_clause_polynomial() {
  bool pass = true;
  // all 8 assignments of an arbitrary clause
  std::vector<std::string> vars{"x1", "x2", "x3"};
  for (Clause c : {make_clause(1, 2, 3), make_clause(1, -2, 3), make_clause(-1, -2, -3)}) {
    Polynomial pc = clause_polynomial(c, vars);
    int zeros = 0;
    for (int mask = 0; mask < 8; ++mask) {
      std::vector<double> a(3);
      for (int b = 0; b < 3; ++b) a[static_cast<std::size_t>(b)] = (mask >> b & 1) ? 1.0 : -1.0;
      bool sat = false;
      for (Literal l : c.literals()) sat = sat || literal_value(l, a) > 0;
      double val = pc.eval(a);
      pass = pass && (val == (sat ? 0.0 : 8.0));
      if (val == 0.0) ++zeros;
    }
    pass = pass && zeros == 7;
  }

  // min f = 8 * minimum violated count on 5 seeded formulas
  Rng rng(1000);
  for (int trial = 0; trial < 5; ++trial) {
    int n = 8 + static_cast<int>(rng() % 5);
    CnfFormula f = random_formula(rng, n, 14 + static_cast<int>(rng() % 10));
    auto scan = oracles::enumerate_assignments(f);
    // independent recount of the minimum violated clauses
    long best = static_cast<long>(f.clause_count()) + 1;
    for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
      long violated = 0;
      for (const auto& cl : f.clauses()) {
        bool sat = false;
        for (Literal l : cl.literals()) {
          bool positive = (mask >> (literal_var(l) - 1)) & 1ul;
          if ((l > 0) == positive) sat = true;
        }
        if (!sat) ++violated;
      }
      best = std::min(best, violated);
    }
    pass = pass && scan.min_f == 8 * best;
  }
  report(10, pass, "clause polynomial case table and 8x violated-count minimum");
}

void criterion_11_lifting() {
  // lifted triangle inequality equals the 5-cycle inequality
  SubdivisionMap map;
  map.base = Graph(3, {{1, 2}, {2, 3}, {1, 3}});
  map.paths[{1, 2}] = {4, 5};
  Graph c5 = map.apply();
  auto lifted = lift_inequality_by_subdivision(odd_cycle_inequality({1, 2, 3}), map);
  bool pass = lifted == odd_cycle_inequality({1, 4, 5, 2, 3}, &c5);

  Rng rng(1100);
  for (int trial = 0; trial < 5; ++trial) {
    SubdivisionMap m2;
    m2.base = Graph(3, {{1, 2}, {2, 3}, {1, 3}});
    int next = 4;
    for (auto [i, j] : m2.base.edges()) {
      int interior = 2 * static_cast<int>(rng() % 3);  // 0, 2 or 4 interior vertices
      std::vector<int> path;
      for (int t = 0; t < interior && next <= 12; ++t) path.push_back(next++);
      if (path.size() % 2 != 0) path.pop_back();
      m2.paths[{i, j}] = path;
    }
    Graph big = m2.apply();
    if (big.n() > 12) {
      pass = false;
      continue;
    }
    auto q = lift_inequality_by_subdivision(odd_cycle_inequality({1, 2, 3}), m2);
    for (const auto& set : oracles::enumerate_independent_sets(big)) {
      std::vector<double> w(static_cast<std::size_t>(big.n()), -1.0);
      for (int v : set) w[static_cast<std::size_t>(v - 1)] = 1.0;
      pass = pass && q.holds_at(w);
    }
  }
  report(11, pass, "subdivision lifting: 5-cycle identity and exhaustive independent-set checks");
}

void criterion_12_scaling() {
  Rng rng(1200);
  std::vector<int> sizes{125, 250, 500};
  std::vector<double> times;
  Complex z(5.0, 0.5);
  for (int n : sizes) {
    Graph g = random_graph(rng, n, 0.05);
    InteriorPoint w(std::vector<double>(static_cast<std::size_t>(n), -0.95));
    double best = 1e300;
    int reps = n <= 250 ? 3 : 1;
    for (int r = 0; r < reps; ++r) {
      auto t0 = Clock::now();
      auto rep = walk_potential(g, z, w);
      double dt = seconds_since(t0);
      best = std::min(best, dt);
      if (!std::isfinite(std::abs(rep.psi))) best = 1e300;
    }
    times.push_back(best);
  }
  // least squares slope of log t against log n
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    double x = std::log(static_cast<double>(sizes[i])), y = std::log(times[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double m = static_cast<double>(sizes.size());
  double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  bool pass = slope <= 3.5 && times.back() < 60.0;
  std::ostringstream msg;
  msg << "scaling: t(125) = " << times[0] << " s, t(250) = " << times[1]
      << " s, t(500) = " << times[2] << " s, fitted exponent = " << slope;
  report(12, pass, msg.str());
}

}  // namespace

int main() {
  std::printf("cutwalk acceptance suite (%s)\n", kVersion);
  criterion_1_motzkin();
  criterion_2_robinson();
  criterion_3_mutations();
  criterion_4_walk_identity();
  criterion_5_cycle_specialization();
  criterion_6_derivatives();
  criterion_7_jproduct_laws();
  criterion_8_quadrature();
  criterion_9_sat_potential();
  criterion_10_clause_polynomial();
  criterion_11_lifting();
  criterion_12_scaling();
  std::printf("%d of 12 criteria passed\n", 12 - failures);
  return failures;
}
