#ifndef CUTWALK_MOBIUSAGG_HPP
#define CUTWALK_MOBIUSAGG_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <vector>

#include "cutwalk/common.hpp"
#include "cutwalk/formulation.hpp"
#include "cutwalk/instances.hpp"
#include "cutwalk/walkagg.hpp"

namespace cutwalk {

/// Bijection between the 2n literals and matrix indices. Variable v
/// (1-based) owns rows/columns 2v-2 (positive literal) and 2v-1 (negated);
/// complementation flips the low bit, a fixed-point-free involution.
struct LiteralIndex {
  int n = 0;

  int nodes() const { return 2 * n; }

  int node_of(Literal l) const {
    int v = literal_var(l);
    if (v < 1 || v > n) throw ValidationError("literal variable out of range");
    return l > 0 ? 2 * (v - 1) : 2 * (v - 1) + 1;
  }

  static int bar(int node) { return node ^ 1; }

  Literal literal_of(int node) const {
    int v = node / 2 + 1;
    return node % 2 == 0 ? v : -v;
  }
};

/// Directed clause matrix over the 2n literal nodes. Every clause
/// C = l1 v l2 v l3 contributes, for each ordered pair (u, v) of its distinct
/// literals, the edge u -> bar(v) weighted with the clause kernel
/// psi_C = e^{-z s}, s = 1 + v(l1) + v(l2) + v(l3); parallel edges add.
///
/// The edge set is closed under reversal composed with complementation, so
/// A(i,j) = A(bar j, bar i); that involution maps each closing walk to its
/// mirror image, which the 1/2 normalization accounts for.
struct ClauseMatrix {
  Matrix A;
  LiteralIndex index;
  Complex z;
  std::vector<double> x;
};

inline ClauseMatrix clause_matrix(const CnfFormula& f, Complex z, const InteriorPoint& x) {
  if (static_cast<int>(x.size()) != f.n())
    throw ValidationError("interior point dimension does not match variable count");
  LiteralIndex index{f.n()};
  Matrix A = Matrix::Zero(index.nodes(), index.nodes());
  for (const auto& cl : f.clauses()) {
    // slack summed in variable order so the kernel is bit-identical under
    // in-clause literal reordering
    std::vector<Literal> ordered = cl.literals();
    std::sort(ordered.begin(), ordered.end(),
              [](Literal a, Literal b) { return literal_var(a) < literal_var(b); });
    double s = 1.0;
    for (Literal l : ordered) s += literal_value(l, x.coords());
    Complex psi = std::exp(-z * s);
    for (Literal u : cl.literals())
      for (Literal v : cl.literals()) {
        if (u == v) continue;
        A(index.node_of(u), index.node_of(negate_literal(v))) += psi;
      }
  }
  return {std::move(A), index, z, x.coords()};
}

/// Mobius completion matrix: nonzero only on complement pairs,
/// M(i, bar i) = e^{z(1 - x_i)} and M(bar i, i) = e^{z(1 + x_i)}.
/// Traversing such an edge converts the implied-inequality kernel of a
/// closing walk into the sharper mobius kernel, since s - s~ = 1 + v(l1).
struct MobiusCompletion {
  Matrix M;
  LiteralIndex index;
};

inline MobiusCompletion mobius_completion(const CnfFormula& f, Complex z, const InteriorPoint& x) {
  if (static_cast<int>(x.size()) != f.n())
    throw ValidationError("interior point dimension does not match variable count");
  LiteralIndex index{f.n()};
  Matrix M = Matrix::Zero(index.nodes(), index.nodes());
  for (int v = 1; v <= f.n(); ++v) {
    double xv = x[static_cast<std::size_t>(v - 1)];
    int pos = 2 * (v - 1), neg = pos + 1;
    M(pos, neg) = std::exp(z * (1.0 - xv));
    M(neg, pos) = std::exp(z * (1.0 + xv));
  }
  return {std::move(M), index};
}

struct MobiusPotentialReport {
  Complex phi{0.0, 0.0};
  Matrix B;
  int k_max = 0;  // number of clauses
};

/// Combined effect of all mobius cycles: phi = tr(M_c B) with
/// B = sum_{k=2}^{m} A^k / (2k), walks of every parity included.
inline MobiusPotentialReport mobius_potential(const CnfFormula& f, Complex z,
                                              const InteriorPoint& x) {
  ClauseMatrix cm = clause_matrix(f, z, x);
  if (f.clause_count() < 1) {
    MobiusPotentialReport rep;
    rep.B = Matrix::Zero(cm.A.rows(), cm.A.cols());
    return rep;
  }
  MobiusCompletion mc = mobius_completion(f, z, x);
  const auto n = cm.A.rows();
  MobiusPotentialReport rep;
  rep.k_max = static_cast<int>(f.clause_count());
  rep.B = Matrix::Zero(n, n);
  Matrix pw = cm.A;
  for (int k = 2; k <= rep.k_max; ++k) {
    pw = pw * cm.A;
    rep.B += pw / (2.0 * k);
  }
  rep.phi = (mc.M * rep.B).trace();
  return rep;
}

inline Complex mobius_potential_value(const CnfFormula& f, Complex z, const InteriorPoint& x) {
  return mobius_potential(f, z, x).phi;
}

/// Conservative mobius-freeness test: true iff no directed walk of length
/// <= m joins a literal node to its complement in the clause digraph. When
/// true, the LP over the clause inequalities already captures every
/// aggregated constraint.
inline bool lp_sufficiency_flag(const CnfFormula& f) {
  if (f.clause_count() == 0) return true;
  LiteralIndex index{f.n()};
  const int nn = index.nodes();
  std::vector<std::vector<bool>> adj(static_cast<std::size_t>(nn),
                                     std::vector<bool>(static_cast<std::size_t>(nn), false));
  for (const auto& cl : f.clauses())
    for (Literal u : cl.literals())
      for (Literal v : cl.literals()) {
        if (u == v) continue;
        adj[static_cast<std::size_t>(index.node_of(u))]
           [static_cast<std::size_t>(index.node_of(negate_literal(v)))] = true;
      }
  // reach = adj^k pattern, k = 1..m
  auto reach = adj;
  for (std::size_t k = 1; k <= f.clause_count(); ++k) {
    if (k > 1) {
      std::vector<std::vector<bool>> next(static_cast<std::size_t>(nn),
                                          std::vector<bool>(static_cast<std::size_t>(nn), false));
      for (int i = 0; i < nn; ++i)
        for (int t = 0; t < nn; ++t)
          if (reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)])
            for (int j = 0; j < nn; ++j)
              if (adj[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)])
                next[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
      reach = std::move(next);
    }
    for (int u = 0; u < nn; ++u)
      if (reach[static_cast<std::size_t>(u)][static_cast<std::size_t>(LiteralIndex::bar(u))])
        return false;
  }
  return true;
}

}  // namespace cutwalk

#endif
