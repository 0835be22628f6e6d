#ifndef CUTWALK_ORACLES_HPP
#define CUTWALK_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cutwalk/common.hpp"
#include "cutwalk/formulation.hpp"
#include "cutwalk/instances.hpp"

// Brute-force reference implementations. These recompute every kernel from
// first principles and never share code with the closed-form evaluators they
// anchor. All enumerators carry hard size guards and refuse oversized inputs
// rather than truncate.

namespace cutwalk::oracles {

struct WalkRecord {
  std::vector<int> vertices;  // 1-based, length = edge count + 1
  Complex kernel;             // product of per-edge kernels
};

namespace detail {

inline void check_walk_guard(const Graph& g, int l) {
  if (l > 8 || g.n() > 10)
    throw GuardError("walk enumeration guard exceeded: l=" + std::to_string(l) +
                     " (max 8), n=" + std::to_string(g.n()) + " (max 10)");
}

inline Complex edge_kernel(Complex z, const std::vector<double>& w, int i, int j) {
  // e^{(z/2)(w_i + w_j)}, the kernel of one edge's halved inequality.
  return std::exp(z * 0.5 * (w[static_cast<std::size_t>(i - 1)] + w[static_cast<std::size_t>(j - 1)]));
}

inline void extend_walks(const Graph& g, Complex z, const std::vector<double>& w,
                         const std::vector<std::vector<int>>& adj, std::vector<int>& path,
                         Complex kernel, int remaining, int target,
                         std::vector<WalkRecord>& out) {
  if (remaining == 0) {
    if (target == 0 || path.back() == target) out.push_back({path, kernel});
    return;
  }
  int u = path.back();
  for (int v : adj[static_cast<std::size_t>(u)]) {
    path.push_back(v);
    extend_walks(g, z, w, adj, path, kernel * edge_kernel(z, w, u, v), remaining - 1, target, out);
    path.pop_back();
  }
}

}  // namespace detail

/// All rooted directed walks of length l from i to j.
inline std::vector<WalkRecord> enumerate_walks(const Graph& g, Complex z,
                                               const std::vector<double>& w, int l, int i, int j) {
  detail::check_walk_guard(g, l);
  if (l < 1) throw ValidationError("walk length must be >= 1");
  auto adj = g.adjacency_lists();
  std::vector<WalkRecord> out;
  std::vector<int> path{i};
  detail::extend_walks(g, z, w, adj, path, Complex(1.0, 0.0), l, j, out);
  return out;
}

/// All rooted directed closed walks of length l (every starting vertex).
inline std::vector<WalkRecord> enumerate_closed_walks(const Graph& g, Complex z,
                                                      const std::vector<double>& w, int l) {
  detail::check_walk_guard(g, l);
  if (l < 1) throw ValidationError("walk length must be >= 1");
  auto adj = g.adjacency_lists();
  std::vector<WalkRecord> out;
  for (int s = 1; s <= g.n(); ++s) {
    std::vector<int> path{s};
    detail::extend_walks(g, z, w, adj, path, Complex(1.0, 0.0), l, s, out);
  }
  return out;
}

inline Complex walk_sum(const std::vector<WalkRecord>& records) {
  Complex acc(0.0, 0.0);
  for (const auto& r : records) acc += r.kernel;
  return acc;
}

/// Canonical form of a cycle: lexicographically least among all rotations of
/// both traversal directions.
inline std::vector<int> canonical_cycle(std::vector<int> cycle) {
  std::vector<int> best;
  for (int dir = 0; dir < 2; ++dir) {
    for (std::size_t r = 0; r < cycle.size(); ++r) {
      std::vector<int> rot(cycle.begin() + static_cast<long>(r), cycle.end());
      rot.insert(rot.end(), cycle.begin(), cycle.begin() + static_cast<long>(r));
      if (best.empty() || rot < best) best = rot;
    }
    std::reverse(cycle.begin(), cycle.end());
  }
  return best;
}

/// All simple odd cycles of length <= max_len, each reported once.
inline std::vector<std::vector<int>> enumerate_odd_cycles(const Graph& g, int max_len) {
  if (g.n() > 12)
    throw GuardError("odd cycle enumeration guard exceeded: n=" + std::to_string(g.n()) +
                     " (max 12)");
  auto adj = g.adjacency_lists();
  std::set<std::vector<int>> seen;
  std::vector<std::vector<int>> out;
  std::vector<int> path;
  std::vector<bool> used(static_cast<std::size_t>(g.n()) + 1, false);

  std::function<void(int, int)> dfs = [&](int start, int u) {
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (v == start && path.size() >= 3) {
        if (path.size() % 2 == 1 && static_cast<int>(path.size()) <= max_len) {
          auto canon = canonical_cycle(path);
          if (seen.insert(canon).second) out.push_back(canon);
        }
        continue;
      }
      if (v <= start || used[static_cast<std::size_t>(v)]) continue;
      if (static_cast<int>(path.size()) >= max_len) continue;
      used[static_cast<std::size_t>(v)] = true;
      path.push_back(v);
      dfs(start, v);
      path.pop_back();
      used[static_cast<std::size_t>(v)] = false;
    }
  };

  for (int s = 1; s <= g.n(); ++s) {
    path = {s};
    std::fill(used.begin(), used.end(), false);
    used[static_cast<std::size_t>(s)] = true;
    dfs(s, s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// All independent sets of g, as sorted vertex lists (guarded to n <= 12).
inline std::vector<std::vector<int>> enumerate_independent_sets(const Graph& g) {
  if (g.n() > 12)
    throw GuardError("independent set enumeration guard exceeded: n=" + std::to_string(g.n()) +
                     " (max 12)");
  std::vector<std::vector<int>> out;
  const unsigned n = static_cast<unsigned>(g.n());
  for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
    bool ok = true;
    for (auto [i, j] : g.edges())
      if ((mask >> (i - 1) & 1ul) && (mask >> (j - 1) & 1ul)) {
        ok = false;
        break;
      }
    if (!ok) continue;
    std::vector<int> s;
    for (unsigned b = 0; b < n; ++b)
      if (mask >> b & 1ul) s.push_back(static_cast<int>(b) + 1);
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// SAT-side oracles. The literal digraph is rebuilt here from the clause
// definitions, independent of the closed-form clause matrix.

namespace detail {

// Literal node layout: variable v (1-based) owns nodes 2v-2 (positive) and
// 2v-1 (negative); complementation flips the low bit.
inline int literal_node(Literal l) {
  return l > 0 ? 2 * (l - 1) : 2 * (-l - 1) + 1;
}
inline int bar_node(int u) { return u ^ 1; }

struct LiteralDigraph {
  int nodes;
  // weighted edges as adjacency: from -> list of (to, weight)
  std::vector<std::vector<std::pair<int, Complex>>> adj;
};

inline LiteralDigraph build_clause_digraph(const CnfFormula& f, Complex z,
                                           const std::vector<double>& x) {
  LiteralDigraph d;
  d.nodes = 2 * f.n();
  d.adj.assign(static_cast<std::size_t>(d.nodes), {});
  for (const auto& cl : f.clauses()) {
    std::vector<Literal> ordered = cl.literals();
    std::sort(ordered.begin(), ordered.end(),
              [](Literal a, Literal b) { return literal_var(a) < literal_var(b); });
    double s = 1.0;
    for (Literal l : ordered) s += literal_value(l, x);
    Complex psi = std::exp(-z * s);
    for (Literal u : cl.literals())
      for (Literal v : cl.literals()) {
        if (u == v) continue;
        d.adj[static_cast<std::size_t>(literal_node(u))].push_back(
            {literal_node(negate_literal(v)), psi});
      }
  }
  return d;
}

inline Complex completion_weight(int from_node, Complex z, const std::vector<double>& x) {
  // weight of the special edge from `from_node` to its complement
  int var = from_node / 2;
  bool from_positive = (from_node % 2) == 0;
  double xv = x[static_cast<std::size_t>(var)];
  // (i, bar i) carries e^{z(1-x)}, (bar i, i) carries e^{z(1+x)}
  return std::exp(z * (from_positive ? 1.0 - xv : 1.0 + xv));
}

}  // namespace detail

/// Weighted sum over directed walks u -> bar(u) of length 2..k_max, each
/// closed by the special complement edge and divided by 2k. Matches the
/// closed-form mobius potential by construction of the latter.
inline Complex enumerate_mobius_walks(const CnfFormula& f, Complex z, const std::vector<double>& x,
                                      int k_max) {
  if (f.n() > 6 || f.clause_count() > 8)
    throw GuardError("mobius walk enumeration guard exceeded: n=" + std::to_string(f.n()) +
                     " (max 6), m=" + std::to_string(f.clause_count()) + " (max 8)");
  auto d = detail::build_clause_digraph(f, z, x);
  Complex total(0.0, 0.0);
  for (int u = 0; u < d.nodes; ++u) {
    int target = detail::bar_node(u);
    for (int k = 2; k <= k_max; ++k) {
      Complex sum(0.0, 0.0);
      std::function<void(int, int, Complex)> go = [&](int at, int remaining, Complex kernel) {
        if (remaining == 0) {
          if (at == target) sum += kernel;
          return;
        }
        for (auto [v, wgt] : d.adj[static_cast<std::size_t>(at)]) go(v, remaining - 1, kernel * wgt);
      };
      go(u, k, Complex(1.0, 0.0));
      total += sum * detail::completion_weight(target, z, x) / (2.0 * k);
    }
  }
  return total;
}

/// One distinct mobius cycle found in the formula.
struct MobiusChainRecord {
  std::vector<std::size_t> clause_indices;  // in chain order
  Literal l1 = 0;
  std::vector<Literal> even_lits;
  double sharper_slack(const std::vector<double>& x) const {
    double s = static_cast<double>(clause_indices.size()) - 1.0 + literal_value(l1, x);
    for (Literal l : even_lits) s += literal_value(l, x);
    return s;
  }
};

/// Exhaustively enumerate distinct mobius cycles (clause sequences classified
/// MobiusCycle, deduplicated across traversal direction). Used to measure the
/// gap between the walk normalization and per-cycle counting, and to anchor
/// the LP-sufficiency flag.
inline std::vector<MobiusChainRecord> enumerate_mobius_chains(const CnfFormula& f) {
  if (f.n() > 6 || f.clause_count() > 8)
    throw GuardError("mobius chain enumeration guard exceeded: n=" + std::to_string(f.n()) +
                     " (max 6), m=" + std::to_string(f.clause_count()) + " (max 8)");
  std::vector<MobiusChainRecord> out;
  std::set<std::pair<std::vector<std::size_t>, Literal>> seen;
  const auto& clauses = f.clauses();
  std::vector<std::size_t> seq;
  std::vector<bool> used(clauses.size(), false);

  std::function<void()> grow = [&]() {
    if (seq.size() >= 2) {
      std::vector<Clause> chain;
      for (auto idx : seq) chain.push_back(clauses[idx]);
      ClauseChain cc = classify_chain(chain);
      if (cc.kind == ChainKind::MobiusCycle) {
        std::vector<std::size_t> key = seq;
        std::sort(key.begin(), key.end());
        if (seen.insert({key, cc.l1}).second) {
          MobiusChainRecord rec;
          rec.clause_indices = seq;
          rec.l1 = cc.l1;
          rec.even_lits = cc.even_lits;
          out.push_back(std::move(rec));
        }
      }
    }
    if (seq.size() == clauses.size()) return;
    for (std::size_t i = 0; i < clauses.size(); ++i) {
      if (used[i]) continue;
      // prune: the next clause must share a complementary literal with the last
      if (!seq.empty()) {
        bool linked = false;
        for (Literal u : clauses[seq.back()].literals())
          if (clauses[i].contains(-u)) linked = true;
        if (!linked) continue;
      }
      used[i] = true;
      seq.push_back(i);
      grow();
      seq.pop_back();
      used[i] = false;
    }
  };
  grow();
  return out;
}

/// Sum over distinct mobius cycles of e^{-z * sharper slack}.
inline Complex mobius_chain_sum(const CnfFormula& f, Complex z, const std::vector<double>& x) {
  Complex total(0.0, 0.0);
  for (const auto& rec : enumerate_mobius_chains(f))
    total += std::exp(-z * rec.sharper_slack(x));
  return total;
}

// ---------------------------------------------------------------------------

struct AssignmentScan {
  bool satisfiable = false;
  long min_f = 0;                  // 8 * minimum violated clause count
  std::vector<double> argmin;      // a +-1 assignment attaining it
};

/// Exhaustive +-1 scan of a formula (guarded to n <= 20).
inline AssignmentScan enumerate_assignments(const CnfFormula& f) {
  if (f.n() > 20)
    throw GuardError("assignment enumeration guard exceeded: n=" + std::to_string(f.n()) +
                     " (max 20)");
  AssignmentScan best;
  long best_violated = -1;
  const unsigned n = static_cast<unsigned>(f.n());
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
    if (best_violated < 0 || violated < best_violated) {
      best_violated = violated;
      best.argmin.assign(n, 0.0);
      for (unsigned b = 0; b < n; ++b)
        best.argmin[b] = (mask >> b & 1ul) ? 1.0 : -1.0;
    }
    if (violated == 0) best.satisfiable = true;
  }
  best.min_f = 8 * best_violated;
  return best;
}

/// Seeded uniform points on the unit sphere in R^n (normalized Gaussians).
inline std::vector<std::vector<double>> sphere_sample(std::size_t n, std::size_t count,
                                                      std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> out;
  out.reserve(count);
  while (out.size() < count) {
    std::vector<double> p(n);
    double norm2 = 0.0;
    for (auto& c : p) {
      c = gaussian(rng);
      norm2 += c * c;
    }
    if (norm2 < 1e-12) continue;
    double inv = 1.0 / std::sqrt(norm2);
    for (auto& c : p) c *= inv;
    out.push_back(std::move(p));
  }
  return out;
}

// Central finite differences. The callable may return double or Complex.

template <class F>
auto finite_difference_partial(F&& f, std::vector<double> x, std::size_t i, double h) {
  if (h <= 0) throw ValidationError("finite difference step must be positive");
  x[i] += h;
  auto up = f(x);
  x[i] -= 2 * h;
  auto down = f(x);
  return (up - down) / (2 * h);
}

template <class F>
auto finite_difference_second(F&& f, std::vector<double> x, std::size_t i, std::size_t j,
                              double h) {
  if (h <= 0) throw ValidationError("finite difference step must be positive");
  if (i == j) {
    auto mid = f(x);
    x[i] += h;
    auto up = f(x);
    x[i] -= 2 * h;
    auto down = f(x);
    return (up - 2.0 * mid + down) / (h * h);
  }
  x[i] += h;
  x[j] += h;
  auto pp = f(x);
  x[j] -= 2 * h;
  auto pm = f(x);
  x[i] -= 2 * h;
  auto mm = f(x);
  x[j] += 2 * h;
  auto mp = f(x);
  return (pp - pm - mp + mm) / (4 * h * h);
}

}  // namespace cutwalk::oracles

#endif
