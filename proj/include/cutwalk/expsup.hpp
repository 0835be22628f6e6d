#ifndef CUTWALK_EXPSUP_HPP
#define CUTWALK_EXPSUP_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "cutwalk/common.hpp"

namespace cutwalk {

/// Finite superposition of exponentials: psi(s) ~ sum_i c_i e^{-lambda_i s}.
struct ExpTerm {
  Complex coefficient;
  Complex rate;
};

struct ExpSuperposition {
  std::vector<ExpTerm> terms;

  void validate() const {
    std::set<std::pair<double, double>> rates;
    for (const auto& t : terms)
      if (!rates.insert({t.rate.real(), t.rate.imag()}).second)
        throw ValidationError("superposition rates must be distinct");
  }

  Complex evaluate(Complex s) const {
    Complex acc(0.0, 0.0);
    for (const auto& t : terms) acc += t.coefficient * std::exp(-t.rate * s);
    return acc;
  }

  double evaluate_real(double s) const { return evaluate(Complex(s, 0.0)).real(); }

  ExpSuperposition concatenated(const ExpSuperposition& o) const {
    ExpSuperposition r = *this;
    r.terms.insert(r.terms.end(), o.terms.begin(), o.terms.end());
    return r;
  }
};

/// Trapezoidal discretization of 1/s = integral of e^{-s x} dx under the
/// substitution x = e^{-a t}: terms a * lambda_i * e^{-lambda_i s} with
/// lambda_i = e^{-i a} for integer i in [-m, M]. Scale-invariant up to an
/// index shift: the window [-m, M] evaluated at e^a s equals e^{-a} times
/// the window [-m-1, M-1] at s.
inline ExpSuperposition reciprocal_superposition(double a, int m, int M) {
  if (a <= 0.0) throw ValidationError("quadrature spacing a must be positive");
  if (m < 0 || M < 0) throw ValidationError("window bounds must be nonnegative");
  ExpSuperposition sup;
  for (int i = -m; i <= M; ++i) {
    double lambda = std::exp(-static_cast<double>(i) * a);
    sup.terms.push_back({Complex(a * lambda, 0.0), Complex(lambda, 0.0)});
  }
  sup.validate();
  return sup;
}

/// Kernel 1/s^2 by the same substitution: 1/s^2 = integral of x e^{-s x} dx,
/// giving coefficients a * lambda_i^2.
inline ExpSuperposition reciprocal_squared_superposition(double a, int m, int M) {
  if (a <= 0.0) throw ValidationError("quadrature spacing a must be positive");
  if (m < 0 || M < 0) throw ValidationError("window bounds must be nonnegative");
  ExpSuperposition sup;
  for (int i = -m; i <= M; ++i) {
    double lambda = std::exp(-static_cast<double>(i) * a);
    sup.terms.push_back({Complex(a * lambda * lambda, 0.0), Complex(lambda, 0.0)});
  }
  sup.validate();
  return sup;
}

/// Nested slack regions R_i = [e^{-i}, e^{j_max}], i = 1..L.
struct RegionLadder {
  int L = 0;
  int j_max = 0;

  std::pair<double, double> region(int i) const {
    if (i < 1 || i > L) throw ValidationError("region index out of range");
    return {std::exp(-static_cast<double>(i)), std::exp(static_cast<double>(j_max))};
  }
};

/// The ladder depth is not known in advance; it grows with the iteration
/// count (policy: L = base + iterations) while the slack lower bound stays
/// bounded away from zero by rounding to the nearest valid solution.
inline RegionLadder ladder_for_iterations(int iter_count, int j_max, int base = 4) {
  if (iter_count < 0) throw ValidationError("iteration count must be nonnegative");
  return RegionLadder{base + iter_count, j_max};
}

/// Quadrature window matched to a ladder: m = ceil(j_max/a), M = ceil(L/a).
inline ExpSuperposition reciprocal_superposition_for_ladder(const RegionLadder& ladder, double a) {
  int m = static_cast<int>(std::ceil(static_cast<double>(ladder.j_max) / a));
  int M = static_cast<int>(std::ceil(static_cast<double>(ladder.L) / a));
  return reciprocal_superposition(a, std::max(m, 0), std::max(M, 0));
}

// ---------------------------------------------------------------------------
// Two-dimensional superposition for constraints (a^T x)^2 - (b^T x)^2 <= c.
// With u = a^T x, v = b^T x the slack is c - u^2 + v^2 and the kernel of
// interest is psi~(u,v) = psi(c - u^2 + v^2) restricted to a rectangle of
// the (u,v) quarter-plane.

struct ExpTerm2d {
  double coefficient;
  double mu;      // rate in u
  double lambda;  // rate in v
};

struct Rectangle {
  double u0 = 0.0, u1 = 0.0, v0 = 0.0, v1 = 0.0;
  bool empty() const { return !(u1 > u0) || !(v1 > v0); }
};

enum class Kernel2d { Reciprocal, ReciprocalSquared, Constant, Sampled };

struct Kernel2dSpec {
  Kernel2d kind = Kernel2d::Reciprocal;
  double constant_value = 1.0;                      // Constant
  std::function<double(double, double)> sampled;    // Sampled: psi~(u, v)
};

struct Superposition2d {
  std::vector<ExpTerm2d> terms;
  double max_rel_error = 0.0;
  bool within_tolerance = true;

  double evaluate(double u, double v) const {
    double acc = 0.0;
    for (const auto& t : terms) acc += t.coefficient * std::exp(-(t.mu * u + t.lambda * v));
    return acc;
  }
};

struct Fit2dOptions {
  double tolerance = 1e-3;
  std::size_t term_budget = 400;
  std::size_t grid = 24;  // sample grid per axis
};

/// Approximate chi_R * psi~ by a tensor-product family of exponentials with
/// least-squares coefficients fitted on a sample grid. The contract is
/// accuracy on the interior grid, not a particular inversion algorithm; when
/// the budget cannot reach the tolerance the report says so explicitly.
inline Superposition2d superposition_2d(const Kernel2dSpec& spec, double c, const Rectangle& r,
                                        Fit2dOptions opts = {}) {
  Superposition2d out;
  if (r.empty()) return out;
  if (r.u0 < 0.0 || r.v0 < 0.0)
    throw ValidationError("rectangle must lie in the quarter-plane u,v >= 0");

  auto kernel = [&](double u, double v) -> double {
    double s = c - u * u + v * v;
    switch (spec.kind) {
      case Kernel2d::Reciprocal:
        if (s <= 0.0) throw DomainError("reciprocal kernel sampled at nonpositive slack");
        return 1.0 / s;
      case Kernel2d::ReciprocalSquared:
        if (s <= 0.0) throw DomainError("reciprocal kernel sampled at nonpositive slack");
        return 1.0 / (s * s);
      case Kernel2d::Constant:
        return spec.constant_value;
      case Kernel2d::Sampled:
        if (!spec.sampled) throw ValidationError("sampled kernel requires a callable");
        return spec.sampled(u, v);
    }
    return 0.0;
  };

  if (spec.kind == Kernel2d::Constant) {
    out.terms.push_back({spec.constant_value, 0.0, 0.0});
    out.max_rel_error = 0.0;
    out.within_tolerance = true;
    return out;
  }

  const double du = r.u1 - r.u0, dv = r.v1 - r.v0;
  std::size_t side = 2;
  while (true) {
    // rate grids 0, 1/d, 2/d, ... scaled to the rectangle
    std::vector<double> mus, lambdas;
    for (std::size_t i = 0; i < side; ++i) mus.push_back(static_cast<double>(i) / du);
    for (std::size_t i = 0; i < side; ++i) lambdas.push_back(static_cast<double>(i) / dv);
    const std::size_t terms = side * side;

    const std::size_t g = std::max<std::size_t>(opts.grid, 2 * side);
    Eigen::MatrixXd basis(g * g, terms);
    Eigen::VectorXd rhs(g * g);
    std::vector<std::pair<double, double>> pts;
    pts.reserve(g * g);
    for (std::size_t iu = 0; iu < g; ++iu)
      for (std::size_t iv = 0; iv < g; ++iv) {
        double u = r.u0 + du * static_cast<double>(iu) / static_cast<double>(g - 1);
        double v = r.v0 + dv * static_cast<double>(iv) / static_cast<double>(g - 1);
        pts.push_back({u, v});
      }
    for (std::size_t row = 0; row < pts.size(); ++row) {
      auto [u, v] = pts[row];
      rhs(static_cast<Eigen::Index>(row)) = kernel(u, v);
      std::size_t col = 0;
      for (double mu : mus)
        for (double lambda : lambdas)
          basis(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col++)) =
              std::exp(-(mu * u + lambda * v));
    }
    Eigen::VectorXd sol = basis.colPivHouseholderQr().solve(rhs);

    Superposition2d cand;
    std::size_t col = 0;
    for (double mu : mus)
      for (double lambda : lambdas)
        cand.terms.push_back({sol(static_cast<Eigen::Index>(col++)), mu, lambda});

    // measure on strictly interior points offset from the fit grid
    double worst = 0.0;
    const std::size_t eg = g + 3;
    for (std::size_t iu = 1; iu + 1 < eg; ++iu)
      for (std::size_t iv = 1; iv + 1 < eg; ++iv) {
        double u = r.u0 + du * static_cast<double>(iu) / static_cast<double>(eg - 1);
        double v = r.v0 + dv * static_cast<double>(iv) / static_cast<double>(eg - 1);
        double truth = kernel(u, v);
        double approx = cand.evaluate(u, v);
        double denom = std::max(std::abs(truth), 1e-30);
        worst = std::max(worst, std::abs(approx - truth) / denom);
      }
    cand.max_rel_error = worst;
    cand.within_tolerance = worst <= opts.tolerance;
    out = std::move(cand);
    if (out.within_tolerance) return out;
    if ((side + 1) * (side + 1) > opts.term_budget) return out;  // explicit failure report
    ++side;
  }
}

}  // namespace cutwalk

#endif
