#ifndef CUTWALK_WALKAGG_HPP
#define CUTWALK_WALKAGG_HPP

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <vector>

#include "cutwalk/common.hpp"
#include "cutwalk/instances.hpp"
#include "cutwalk/jproduct.hpp"

namespace cutwalk {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Edge matrix A(z,w): A_ij = e^{(z/2)(w_i + w_j)} on edges, 0 elsewhere.
/// Each nonzero entry is the kernel e^{-z s_ij} of the halved edge
/// inequality with slack s_ij = -(w_i + w_j)/2. Symmetric, zero diagonal.
struct EdgeMatrix {
  Matrix A;
  Complex z;
  std::vector<double> w;
};

inline EdgeMatrix edge_matrix(const Graph& g, Complex z, const InteriorPoint& w) {
  if (static_cast<int>(w.size()) != g.n())
    throw ValidationError("interior point dimension does not match vertex count");
  Matrix A = Matrix::Zero(g.n(), g.n());
  for (auto [i, j] : g.edges()) {
    Complex v = std::exp(z * 0.5 * (w[static_cast<std::size_t>(i - 1)] +
                                    w[static_cast<std::size_t>(j - 1)]));
    A(i - 1, j - 1) = v;
    A(j - 1, i - 1) = v;
  }
  return {std::move(A), z, w.coords()};
}

inline Matrix matrix_power(const Matrix& a, unsigned l) {
  Matrix r = Matrix::Identity(a.rows(), a.cols());
  Matrix base = a;
  while (l) {
    if (l & 1u) r = r * base;
    base = base * base;
    l >>= 1u;
  }
  return r;
}

/// (A^l)_{ij}: the aggregated kernel of all walks of length l from i to j.
inline Complex walk_sum_pair(const Graph& g, Complex z, const InteriorPoint& w, int l, int i,
                             int j) {
  if (l < 1) throw ValidationError("walk length must be >= 1");
  if (i < 1 || i > g.n() || j < 1 || j > g.n())
    throw ValidationError("walk endpoints out of range");
  EdgeMatrix em = edge_matrix(g, z, w);
  return matrix_power(em.A, static_cast<unsigned>(l))(i - 1, j - 1);
}

/// psi_l = tr(A^l) / (2l): every closed walk is rooted at l vertices and
/// traversed in two senses, so the trace counts it 2l times.
inline Complex closed_walks(const Graph& g, Complex z, const InteriorPoint& w, int l) {
  if (l < 3) throw ValidationError("closed walk aggregation needs length >= 3");
  EdgeMatrix em = edge_matrix(g, z, w);
  return matrix_power(em.A, static_cast<unsigned>(l)).trace() / (2.0 * l);
}

enum class DerivativeLevel { None, Gradient, Hessian };

struct WalkPotentialReport {
  int k_max = 0;
  std::map<int, Complex> psi_l;  // odd length -> tr(A^l)/(2l)
  Matrix B;                      // sum of A^{2k+1} / (2(2k+1))
  Complex psi{0.0, 0.0};         // tr(B)
  Complex psi_tilde{0.0, 0.0};   // e^z tr(B), the sharper-inequality aggregate
  std::optional<Vector> gradient;  // d psi_tilde / d w
  std::optional<Matrix> hessian;   // d^2 psi_tilde / dw dw
};

namespace detail {

// Paterson-Stockmeyer evaluation of polynomials sum_k coeffs[k] * C^k for
// several coefficient vectors at once, sharing the power ladder. Keeps the
// matrix multiplication count near 2*sqrt(degree).
inline std::vector<Matrix> polynomials_of_matrix(const Matrix& c,
                                                 const std::vector<std::vector<double>>& coeff_sets) {
  const auto n = c.rows();
  std::size_t deg = 0;
  for (const auto& cs : coeff_sets) deg = std::max(deg, cs.size() ? cs.size() - 1 : 0);
  std::vector<Matrix> out;
  if (deg == 0) {
    for (const auto& cs : coeff_sets)
      out.push_back(cs.empty() ? Matrix::Zero(n, n).eval()
                               : (cs[0] * Matrix::Identity(n, n)).eval());
    return out;
  }
  const std::size_t r = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::sqrt(
                                                     static_cast<double>(deg + 1)))));
  std::vector<Matrix> pow{Matrix::Identity(n, n)};
  pow.push_back(c);
  for (std::size_t t = 2; t <= r; ++t) pow.push_back(pow[t - 1] * c);
  const Matrix& cr = pow[r];

  for (const auto& cs : coeff_sets) {
    const std::size_t d = cs.size() ? cs.size() - 1 : 0;
    const std::size_t blocks = d / r + 1;
    Matrix acc = Matrix::Zero(n, n);
    for (std::size_t j = blocks; j-- > 0;) {
      Matrix h = Matrix::Zero(n, n);
      for (std::size_t t = 0; t < r; ++t) {
        std::size_t k = j * r + t;
        if (k < cs.size() && cs[k] != 0.0) h += cs[k] * pow[t];
      }
      if (j + 1 == blocks)
        acc = h;
      else
        acc = acc * cr + h;
    }
    out.push_back(std::move(acc));
  }
  return out;
}

constexpr int kDirectPathMaxN = 64;

}  // namespace detail

/// Derivative of the edge matrix in one interior-point coordinate:
/// dA/dw_p = (z/2)(I (x)J_p A + A (x)J_p I), whose entries close to
/// (z/2) A_ij (delta_ip + delta_jp). For small n both routes are evaluated
/// and must agree entrywise; beyond that the closed form is used alone.
inline Matrix edge_matrix_derivative(const Graph& g, Complex z, const InteriorPoint& w, int p) {
  if (p < 1 || p > g.n()) throw ValidationError("derivative coordinate out of range");
  EdgeMatrix em = edge_matrix(g, z, w);
  const auto n = em.A.rows();
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(p - 1, i) += 0.5 * z * em.A(p - 1, i);
    d(i, p - 1) += 0.5 * z * em.A(i, p - 1);
  }
  if (n <= 32) {
    Tensor ta = Tensor::matrix(static_cast<std::size_t>(n), static_cast<std::size_t>(n), "q", "j");
    Tensor tb = Tensor::matrix(static_cast<std::size_t>(n), static_cast<std::size_t>(n), "i", "q");
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        ta.at({static_cast<std::size_t>(i), static_cast<std::size_t>(j)}) = em.A(i, j);
        tb.at({static_cast<std::size_t>(i), static_cast<std::size_t>(j)}) = em.A(i, j);
      }
    Tensor ident_left = Tensor::identity(static_cast<std::size_t>(n), "i", "q");
    Tensor ident_right = Tensor::matrix(static_cast<std::size_t>(n), static_cast<std::size_t>(n), "q", "j");
    for (Eigen::Index i = 0; i < n; ++i)
      ident_right.at({static_cast<std::size_t>(i), static_cast<std::size_t>(i)}) = Complex(1.0, 0.0);
    Tensor left = join(ident_left, ta, {"q"}).family_member("q", static_cast<std::size_t>(p - 1));
    Tensor right = join(tb, ident_right, {"q"}).family_member("q", static_cast<std::size_t>(p - 1));
    Matrix via_join = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        via_join(i, j) = 0.5 * z *
                         (left.at({static_cast<std::size_t>(i), static_cast<std::size_t>(j)}) +
                          right.at({static_cast<std::size_t>(i), static_cast<std::size_t>(j)}));
    if ((via_join - d).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + d.cwiseAbs().maxCoeff()))
      throw DomainError("join-product derivative disagrees with the closed form");
  }
  return d;
}

namespace detail {

inline Matrix second_edge_derivative(const EdgeMatrix& em, int p, int q) {
  const auto n = em.A.rows();
  Matrix e = Matrix::Zero(n, n);
  Complex f = 0.25 * em.z * em.z;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      double dp = (i == p - 1 ? 1.0 : 0.0) + (j == p - 1 ? 1.0 : 0.0);
      double dq = (i == q - 1 ? 1.0 : 0.0) + (j == q - 1 ? 1.0 : 0.0);
      if (dp != 0.0 && dq != 0.0) e(i, j) = f * em.A(i, j) * dp * dq;
    }
  return e;
}

inline Matrix first_derivative_matrix(const EdgeMatrix& em, int p) {
  const auto n = em.A.rows();
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(p - 1, i) += 0.5 * em.z * em.A(p - 1, i);
    d(i, p - 1) += 0.5 * em.z * em.A(i, p - 1);
  }
  return d;
}

}  // namespace detail

/// First (and with q, second) derivative of A^k by the product rule over the
/// power ladder.
inline Matrix power_derivative(const Graph& g, Complex z, const InteriorPoint& w, int k, int p,
                               std::optional<int> q = std::nullopt) {
  if (k < 1) throw ValidationError("power must be >= 1");
  EdgeMatrix em = edge_matrix(g, z, w);
  const auto n = em.A.rows();
  std::vector<Matrix> pow{Matrix::Identity(n, n)};
  for (int t = 1; t <= k; ++t) pow.push_back(pow[static_cast<std::size_t>(t - 1)] * em.A);

  Matrix dp = detail::first_derivative_matrix(em, p);
  if (!q) {
    Matrix acc = Matrix::Zero(n, n);
    for (int i = 0; i + 1 <= k; ++i)
      acc += pow[static_cast<std::size_t>(i)] * dp * pow[static_cast<std::size_t>(k - 1 - i)];
    return acc;
  }

  Matrix dq = detail::first_derivative_matrix(em, *q);
  Matrix epq = detail::second_edge_derivative(em, p, *q);
  Matrix acc = Matrix::Zero(n, n);
  for (int i = 0; i + 1 <= k; ++i)
    acc += pow[static_cast<std::size_t>(i)] * epq * pow[static_cast<std::size_t>(k - 1 - i)];
  for (int a = 0; a + 2 <= k; ++a)
    for (int b = 0; a + b + 2 <= k; ++b) {
      const Matrix& left = pow[static_cast<std::size_t>(a)];
      const Matrix& mid = pow[static_cast<std::size_t>(b)];
      const Matrix& rightm = pow[static_cast<std::size_t>(k - 2 - a - b)];
      acc += left * dp * mid * dq * rightm;
      acc += left * dq * mid * dp * rightm;
    }
  return acc;
}

/// Aggregate of all closed odd walks of length at most n, with derivatives.
///
/// Direct path (small n or Hessian requested): iterated multiplication over
/// the power ladder, exact over the complex field. Large path: Schur
/// triangularization gives every trace in O(n^3), and B = A * g(A^2) is
/// assembled by Paterson-Stockmeyer in O(n^3 sqrt(n)).
///
/// Derivative identities used (consequences of the product-rule recurrence,
/// fixed by trace cyclicity; cross-checked against finite differences in the
/// test suite):
///   d psi~ / dw_p      = e^z (z/2) sum_k (A^{2k+1})_{pp}
///   d^2 psi~ / dw_p dw_q = e^z (z^2/2) sum_k [ delta_pq (A^{2k+1})_{pq}
///                          + sum_{j=1}^{2k} (A^j)_{pq} (A^{2k+1-j})_{pq} ]
inline WalkPotentialReport walk_potential(const Graph& g, Complex z, const InteriorPoint& w,
                                          DerivativeLevel level = DerivativeLevel::None) {
  if (g.n() < 3) throw ValidationError("walk potential needs n >= 3");
  EdgeMatrix em = edge_matrix(g, z, w);
  const auto n = em.A.rows();
  WalkPotentialReport rep;
  rep.k_max = (g.n() - 1) / 2;
  const int lmax = 2 * rep.k_max + 1;
  const Complex ez = std::exp(z);

  const bool direct = g.n() <= detail::kDirectPathMaxN || level == DerivativeLevel::Hessian;

  if (direct) {
    std::vector<Matrix> pow{Matrix::Identity(n, n)};
    for (int l = 1; l <= lmax; ++l) pow.push_back(pow[static_cast<std::size_t>(l - 1)] * em.A);

    rep.B = Matrix::Zero(n, n);
    for (int k = 1; k <= rep.k_max; ++k) {
      int l = 2 * k + 1;
      rep.B += pow[static_cast<std::size_t>(l)] / (2.0 * l);
      rep.psi_l[l] = pow[static_cast<std::size_t>(l)].trace() / (2.0 * l);
    }
    rep.psi = rep.B.trace();
    rep.psi_tilde = ez * rep.psi;

    if (level != DerivativeLevel::None) {
      Vector grad = Vector::Zero(n);
      for (int k = 1; k <= rep.k_max; ++k)
        grad += pow[static_cast<std::size_t>(2 * k + 1)].diagonal();
      rep.gradient = (ez * 0.5 * z) * grad;
    }
    if (level == DerivativeLevel::Hessian) {
      Matrix h = Matrix::Zero(n, n);
      for (int k = 1; k <= rep.k_max; ++k) {
        int l = 2 * k + 1;
        h += pow[static_cast<std::size_t>(l)].diagonal().asDiagonal().toDenseMatrix();
        for (int j = 1; j < l; ++j)
          h += pow[static_cast<std::size_t>(j)].cwiseProduct(pow[static_cast<std::size_t>(l - j)]);
      }
      // symmetric up to rounding by construction; make it exact
      h = 0.5 * (h + h.transpose()).eval();
      rep.hessian = (ez * 0.5 * z * z) * h;
    }
    return rep;
  }

  // Traces of all powers from the Schur diagonal.
  Eigen::ComplexSchur<Matrix> schur(em.A, /*computeU=*/false);
  if (schur.info() != Eigen::Success) throw DomainError("Schur decomposition failed");
  Vector diag = schur.matrixT().diagonal();
  for (int k = 1; k <= rep.k_max; ++k) rep.psi_l[2 * k + 1] = Complex(0.0, 0.0);
  Vector acc = diag;
  for (int l = 2; l <= lmax; ++l) {
    acc = acc.cwiseProduct(diag);
    if (l % 2 == 1 && l >= 3) rep.psi_l[l] = acc.sum() / (2.0 * l);
  }

  // B = A * g(A^2) with g(C) = sum_k C^k / (2(2k+1)).
  Matrix c = em.A * em.A;
  std::vector<std::vector<double>> coeffs;
  std::vector<double> gcoeff(static_cast<std::size_t>(rep.k_max) + 1, 0.0);
  for (int k = 1; k <= rep.k_max; ++k) gcoeff[static_cast<std::size_t>(k)] = 1.0 / (2.0 * (2 * k + 1));
  coeffs.push_back(gcoeff);
  if (level != DerivativeLevel::None) {
    std::vector<double> pcoeff(static_cast<std::size_t>(rep.k_max) + 1, 0.0);
    for (int k = 1; k <= rep.k_max; ++k) pcoeff[static_cast<std::size_t>(k)] = 1.0;
    coeffs.push_back(pcoeff);
  }
  auto polys = detail::polynomials_of_matrix(c, coeffs);
  rep.B = em.A * polys[0];
  rep.psi = rep.B.trace();
  rep.psi_tilde = ez * rep.psi;
  if (level != DerivativeLevel::None)
    rep.gradient = (ez * 0.5 * z) * (em.A * polys[1]).diagonal();
  return rep;
}

/// Empirically fitted weights W^{k,m}_rank for expressing derivatives of A^k
/// through rank-classified families of J-products. The first-derivative
/// family splits compositions (a1,a2) of k by rank (count of nonzero parts);
/// the second-derivative family splits (a1,a2,a3) the same way.
struct PowerDerivativeWeights {
  std::vector<double> weights;  // indexed by rank-1
  double residual = 0.0;        // max absolute fit residual
};

inline PowerDerivativeWeights derive_power_derivative_weights(int k, int order,
                                                              std::uint64_t seed = 99) {
  if (k < 1 || (order != 1 && order != 2)) throw ValidationError("need k >= 1 and order in {1,2}");
  Rng rng(seed);
  const int n = 6;
  // random symmetric complex matrix with zero diagonal, shaped like an edge matrix
  Matrix a = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Complex v(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
      a(i, j) = v;
      a(j, i) = v;
    }
  std::vector<Matrix> pow{Matrix::Identity(n, n)};
  for (int t = 1; t <= k; ++t) pow.push_back(pow[static_cast<std::size_t>(t - 1)] * a);

  const Complex z(0.8, 0.4);

  auto dp_of = [&](int p) {
    Matrix d = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      d(p, i) += 0.5 * z * a(p, i);
      d(i, p) += 0.5 * z * a(i, p);
    }
    return d;
  };

  if (order == 1) {
    const int p = 1;
    Matrix dp = dp_of(p);
    Matrix truth = Matrix::Zero(n, n);
    for (int i = 0; i + 1 <= k; ++i)
      truth += pow[static_cast<std::size_t>(i)] * dp * pow[static_cast<std::size_t>(k - 1 - i)];
    // basis: rank-1 = {(0,k),(k,0)}, rank-2 = {(i,k-i): 0<i<k}
    auto family = [&](int a1, int a2) {
      Matrix m = Matrix::Zero(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          m(i, j) = pow[static_cast<std::size_t>(a1)](i, p) * pow[static_cast<std::size_t>(a2)](p, j);
      return m;
    };
    Matrix g1 = family(0, k) + family(k, 0);
    Matrix g2 = Matrix::Zero(n, n);
    for (int i = 1; i < k; ++i) g2 += family(i, k - i);
    g1 *= 0.5 * z;
    g2 *= 0.5 * z;
    // least squares over flattened entries for (W1, W2)
    Eigen::MatrixXcd basis(n * n, 2);
    Eigen::VectorXcd rhs(n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        basis(i * n + j, 0) = g1(i, j);
        basis(i * n + j, 1) = g2(i, j);
        rhs(i * n + j) = truth(i, j);
      }
    Eigen::VectorXcd sol = basis.colPivHouseholderQr().solve(rhs);
    PowerDerivativeWeights out;
    out.weights = {sol(0).real(), sol(1).real()};
    out.residual = (basis * sol - rhs).cwiseAbs().maxCoeff();
    return out;
  }

  const int p = 1, q = 3;
  Matrix dp = dp_of(p), dq = dp_of(q);
  Matrix epq = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double ddp = (i == p ? 1.0 : 0.0) + (j == p ? 1.0 : 0.0);
      double ddq = (i == q ? 1.0 : 0.0) + (j == q ? 1.0 : 0.0);
      epq(i, j) = 0.25 * z * z * a(i, j) * ddp * ddq;
    }
  Matrix truth = Matrix::Zero(n, n);
  for (int i = 0; i + 1 <= k; ++i)
    truth += pow[static_cast<std::size_t>(i)] * epq * pow[static_cast<std::size_t>(k - 1 - i)];
  for (int a1 = 0; a1 + 2 <= k; ++a1)
    for (int b = 0; a1 + b + 2 <= k; ++b) {
      truth += pow[static_cast<std::size_t>(a1)] * dp * pow[static_cast<std::size_t>(b)] * dq *
               pow[static_cast<std::size_t>(k - 2 - a1 - b)];
      truth += pow[static_cast<std::size_t>(a1)] * dq * pow[static_cast<std::size_t>(b)] * dp *
               pow[static_cast<std::size_t>(k - 2 - a1 - b)];
    }

  auto triple = [&](int a1, int a2, int a3, int pi, int qi) {
    Matrix m = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        m(i, j) = pow[static_cast<std::size_t>(a1)](i, pi) *
                  pow[static_cast<std::size_t>(a2)](pi, qi) *
                  pow[static_cast<std::size_t>(a3)](qi, j);
    return m;
  };
  std::vector<Matrix> basis_mats(3, Matrix::Zero(n, n));
  for (int a1 = 0; a1 <= k; ++a1)
    for (int a2 = 0; a1 + a2 <= k; ++a2) {
      int a3 = k - a1 - a2;
      int rank = (a1 > 0) + (a2 > 0) + (a3 > 0);
      if (rank == 0) continue;
      basis_mats[static_cast<std::size_t>(rank - 1)] +=
          triple(a1, a2, a3, p, q) + triple(a1, a2, a3, q, p);
    }
  Complex scale = 0.25 * z * z * 0.5;  // (z^2/4) * (1/2!)
  Eigen::MatrixXcd basis(n * n, 3);
  Eigen::VectorXcd rhs(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      for (int r = 0; r < 3; ++r) basis(i * n + j, r) = scale * basis_mats[static_cast<std::size_t>(r)](i, j);
      rhs(i * n + j) = truth(i, j);
    }
  Eigen::VectorXcd sol = basis.colPivHouseholderQr().solve(rhs);
  PowerDerivativeWeights out;
  out.weights = {sol(0).real(), sol(1).real(), sol(2).real()};
  out.residual = (basis * sol - rhs).cwiseAbs().maxCoeff();
  return out;
}

/// phi = sum_i c_i psi~(lambda_i): the superposed potential, one walk
/// aggregation per distinct rate.
template <class Superposition>
Complex superposed_potential(const Graph& g, const InteriorPoint& w, const Superposition& sup) {
  std::map<std::pair<double, double>, Complex> by_rate;  // rate -> summed coefficient
  for (const auto& term : sup.terms)
    by_rate[{term.rate.real(), term.rate.imag()}] += term.coefficient;
  Complex acc(0.0, 0.0);
  for (const auto& [rate, coeff] : by_rate) {
    Complex lambda(rate.first, rate.second);
    acc += coeff * walk_potential(g, lambda, w).psi_tilde;
  }
  return acc;
}

}  // namespace cutwalk

#endif
