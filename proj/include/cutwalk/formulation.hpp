#ifndef CUTWALK_FORMULATION_HPP
#define CUTWALK_FORMULATION_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cutwalk/common.hpp"
#include "cutwalk/instances.hpp"

namespace cutwalk {

enum class Sense { Le, Ge };

/// Sparse linear inequality over vertex/variable indices (1-based).
struct LinearInequality {
  std::map<int, double> coeffs;
  double rhs = 0.0;
  Sense sense = Sense::Le;

  void validate() const {
    bool any = false;
    for (auto& [v, c] : coeffs) any = any || c != 0.0;
    if (!any) throw ValidationError("inequality needs at least one nonzero coefficient");
  }

  double lhs_at(const std::vector<double>& w) const {
    double s = 0.0;
    for (auto [v, c] : coeffs) s += c * w[static_cast<std::size_t>(v - 1)];
    return s;
  }

  bool holds_at(const std::vector<double>& w, double tol = 1e-12) const {
    double l = lhs_at(w);
    return sense == Sense::Le ? l <= rhs + tol : l >= rhs - tol;
  }

  bool operator==(const LinearInequality& o) const {
    return coeffs == o.coeffs && rhs == o.rhs && sense == o.sense;
  }
};

/// One inequality per edge: w_i + w_j <= 0, or the halved form
/// (w_i + w_j)/2 <= 0 used when aggregating over walks (each cycle vertex
/// has degree 2, so the per-edge share is half).
inline std::vector<LinearInequality> edge_inequalities(const Graph& g, bool halved = false) {
  std::vector<LinearInequality> out;
  const double c = halved ? 0.5 : 1.0;
  for (auto [i, j] : g.edges()) {
    LinearInequality q;
    q.coeffs[i] = c;
    q.coeffs[j] = c;
    q.rhs = 0.0;
    q.sense = Sense::Le;
    out.push_back(std::move(q));
  }
  return out;
}

/// For an odd cycle on 2k+1 vertices at most k vertices are independent,
/// so the +-1 indicators satisfy sum w <= -1.
inline LinearInequality odd_cycle_inequality(const std::vector<int>& cycle,
                                             const Graph* g = nullptr) {
  if (cycle.size() < 3 || cycle.size() % 2 == 0)
    throw ValidationError("odd cycle inequality needs an odd cycle of length >= 3");
  std::set<int> distinct(cycle.begin(), cycle.end());
  if (distinct.size() != cycle.size()) throw ValidationError("cycle vertices must be distinct");
  if (g) {
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      int a = cycle[i], b = cycle[(i + 1) % cycle.size()];
      if (!g->has_edge(a, b))
        throw ValidationError("not a cycle in the graph: missing edge (" + std::to_string(a) +
                              "," + std::to_string(b) + ")");
    }
  }
  LinearInequality q;
  for (int v : cycle) q.coeffs[v] = 1.0;
  q.rhs = -1.0;
  q.sense = Sense::Le;
  return q;
}

/// Odd subdivision of a base graph: selected edges are replaced by odd-length
/// paths through fresh interior vertices. Path length odd means an even
/// number of interior vertices per edge (possibly zero).
struct SubdivisionMap {
  Graph base;
  // edge (i,j) with i<j  ->  ordered interior vertices of the replacement path
  std::map<std::pair<int, int>, std::vector<int>> paths;

  void validate() const {
    std::set<int> seen;
    for (const auto& [e, interior] : paths) {
      if (!base.has_edge(e.first, e.second))
        throw ValidationError("subdivision path for a non-edge of the base graph");
      if (interior.size() % 2 != 0)
        throw ValidationError("replacement path length must be odd (even interior count)");
      for (int v : interior) {
        if (v <= base.n())
          throw ValidationError("interior vertex id must exceed the base vertex count");
        if (!seen.insert(v).second)
          throw ValidationError("interior vertex appears in more than one path");
      }
    }
  }

  /// The subdivided graph. Interior vertices must be exactly
  /// base.n()+1 ... base.n()+(total interior count).
  Graph apply() const {
    validate();
    int extra = 0;
    for (const auto& [e, interior] : paths) extra += static_cast<int>(interior.size());
    int nn = base.n() + extra;
    std::vector<std::pair<int, int>> edges;
    for (auto [i, j] : base.edges()) {
      auto it = paths.find({i, j});
      if (it == paths.end() || it->second.empty()) {
        edges.push_back({i, j});
        continue;
      }
      int prev = i;
      for (int v : it->second) {
        if (v > nn) throw ValidationError("interior vertex id out of range");
        edges.push_back({prev, v});
        prev = v;
      }
      edges.push_back({prev, j});
    }
    return Graph(nn, std::move(edges));
  }
};

/// Transport a unit-coefficient inequality from the base graph to its odd
/// subdivision: every original and interior vertex gets coefficient 1 and
/// the right-hand side is unchanged.
inline LinearInequality lift_inequality_by_subdivision(const LinearInequality& ineq,
                                                       const SubdivisionMap& map) {
  map.validate();
  if (ineq.sense != Sense::Le)
    throw UnsupportedError("subdivision lifting expects a <= inequality");
  for (auto [v, c] : ineq.coeffs)
    if (c != 1.0)
      throw UnsupportedError("subdivision lifting supports unit coefficients only");
  LinearInequality out = ineq;
  for (const auto& [e, interior] : map.paths) {
    if (!ineq.coeffs.count(e.first) || !ineq.coeffs.count(e.second))
      continue;  // subdivided edge outside the inequality's support
    for (int v : interior) out.coeffs[v] = 1.0;
  }
  out.validate();
  return out;
}

/// v(l) = x for a positive literal, -x for a negated one.
inline double literal_value(Literal l, const std::vector<double>& x) {
  double xv = x[static_cast<std::size_t>(literal_var(l) - 1)];
  return l > 0 ? xv : -xv;
}

/// Clause of arbitrary width produced by joins; kept as a sorted literal set.
struct GeneralClause {
  std::vector<Literal> literals;  // sorted, duplicate-free

  static GeneralClause of(std::vector<Literal> ls) {
    std::sort(ls.begin(), ls.end());
    ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
    return GeneralClause{std::move(ls)};
  }

  bool operator==(const GeneralClause& o) const { return literals == o.literals; }
};

/// The inequality of an m-literal clause: sum v(l) >= -(m-2). The value -m
/// would mean every literal is false, which a satisfied clause forbids, and
/// +-1 sums step by 2.
inline LinearInequality clause_inequality(const GeneralClause& c) {
  if (c.literals.size() < 2) throw ValidationError("clause inequality needs >= 2 literals");
  LinearInequality q;
  for (Literal l : c.literals) q.coeffs[literal_var(l)] = l > 0 ? 1.0 : -1.0;
  q.rhs = -(static_cast<double>(c.literals.size()) - 2.0);
  q.sense = Sense::Ge;
  return q;
}

inline LinearInequality clause_inequality(const Clause& c) {
  return clause_inequality(GeneralClause::of({c.a, c.b, c.c}));
}

struct JoinResult {
  bool tautology = false;
  GeneralClause clause;  // meaningful when !tautology
};

/// Resolution join over a pivot variable: the pivot must occur positively in
/// one clause and negatively in the other; the result is the union of the
/// remaining literals with duplicates merged. If some literal and its
/// complement both survive, the join is a tautology.
inline JoinResult join_clauses(const GeneralClause& c1, const GeneralClause& c2, int pivot_var) {
  auto find = [&](const GeneralClause& c, Literal l) {
    return std::find(c.literals.begin(), c.literals.end(), l) != c.literals.end();
  };
  bool pos1 = find(c1, pivot_var), neg1 = find(c1, -pivot_var);
  bool pos2 = find(c2, pivot_var), neg2 = find(c2, -pivot_var);
  if ((!pos1 && !neg1) || (!pos2 && !neg2))
    throw ValidationError("pivot variable absent from a clause");
  if (!((pos1 && neg2) || (neg1 && pos2)))
    throw ValidationError("pivot must appear with opposite polarity in the two clauses");
  if ((pos1 && neg1) || (pos2 && neg2))
    throw ValidationError("pivot appears with both polarities inside one clause");

  std::vector<Literal> rest;
  for (Literal l : c1.literals)
    if (literal_var(l) != pivot_var) rest.push_back(l);
  for (Literal l : c2.literals)
    if (literal_var(l) != pivot_var) rest.push_back(l);
  GeneralClause joined = GeneralClause::of(std::move(rest));
  for (Literal l : joined.literals)
    if (std::binary_search(joined.literals.begin(), joined.literals.end(), -l))
      return JoinResult{true, {}};
  return JoinResult{false, std::move(joined)};
}

inline JoinResult join_clauses(const Clause& c1, const Clause& c2, int pivot_var) {
  return join_clauses(GeneralClause::of({c1.a, c1.b, c1.c}),
                      GeneralClause::of({c2.a, c2.b, c2.c}), pivot_var);
}

enum class ChainKind { OpenPath, OrdinaryCycle, MobiusCycle, Invalid };

/// A classified chain of clauses l1 v l2 v ~l3, l3 v l4 v ~l5, ...
/// When valid, `link` holds l3, l5, ..., l_{2k+1} (as literals) and `free`
/// holds l2, l4, ..., l_{2k}; `head` holds {l1, l2} for the first clause.
struct ClauseChain {
  std::vector<Clause> clauses;
  ChainKind kind = ChainKind::Invalid;
  Literal l1 = 0;                  // designated closure literal (cycles only)
  std::vector<Literal> even_lits;  // l2, l4, ..., l_{2k}
  std::string reason;              // why Invalid, when it is
};

/// Classify a clause sequence: consecutive clauses must share exactly one
/// complementary literal pair; all link/free literals use distinct variables
/// except at the closure. An open path leaves both ends free, a cycle closes
/// on l1 (making the fold a tautology) and a mobius cycle closes on ~l1
/// (yielding the sharper inequality).
inline ClauseChain classify_chain(const std::vector<Clause>& clauses) {
  ClauseChain out;
  out.clauses = clauses;
  auto invalid = [&](std::string why) {
    out.kind = ChainKind::Invalid;
    out.reason = std::move(why);
    return out;
  };
  const std::size_t k = clauses.size();
  if (k < 2) return invalid("chain needs at least two clauses");

  auto distinct = [](const std::vector<Literal>& lits) {
    std::set<int> vars;
    for (Literal l : lits)
      if (!vars.insert(literal_var(l)).second) return false;
    return true;
  };

  // Candidate complementary pairs between consecutive clauses. Normally
  // exactly one; a 2-clause cycle also exposes its closure pair here, so the
  // link designation may need a second try.
  std::vector<std::vector<Literal>> options(k - 1);
  for (std::size_t i = 0; i + 1 < k; ++i) {
    for (Literal u : clauses[i].literals())
      if (clauses[i + 1].contains(-u)) options[i].push_back(u);
    if (options[i].empty())
      return invalid("clauses " + std::to_string(i + 1) + "," + std::to_string(i + 2) +
                     " share no complementary literal pair");
  }

  std::string first_reason;
  std::vector<Literal> link_out(k - 1);
  ClauseChain best;
  best.kind = ChainKind::Invalid;

  auto attempt = [&]() -> ClauseChain {
    ClauseChain res;
    res.clauses = clauses;
    res.kind = ChainKind::Invalid;
    std::vector<Literal> head;  // first clause minus its out-link: {l1, l2}
    for (Literal l : clauses[0].literals())
      if (l != link_out[0]) head.push_back(l);
    std::vector<Literal> mids;  // middle free literal of clauses 2..k-1
    for (std::size_t i = 1; i + 1 < k; ++i) {
      std::vector<Literal> free;
      for (Literal l : clauses[i].literals())
        if (l != -link_out[i - 1] && l != link_out[i]) free.push_back(l);
      if (free.size() != 1) {
        res.reason = "interior clause has no single free literal";
        return res;
      }
      mids.push_back(free[0]);
    }
    std::vector<Literal> tail;  // last clause minus its in-link: {l_{2k}, ~l_{2k+1}}
    for (Literal l : clauses[k - 1].literals())
      if (l != -link_out[k - 2]) tail.push_back(l);
    if (head.size() != 2 || tail.size() != 2) {
      res.reason = "malformed end clause";
      return res;
    }

    std::vector<Literal> interior{head[0], head[1]};
    for (std::size_t i = 0; i + 1 < k; ++i) interior.push_back(-link_out[i]);  // l_{2i+3}
    for (Literal l : mids) interior.push_back(l);
    if (!distinct(interior)) {
      res.reason = "chain literals reuse a variable";
      return res;
    }

    // Closure: one tail literal is ~l_{2k+1}, the other l_{2k}.
    for (int t = 0; t < 2; ++t) {
      Literal third = tail[static_cast<std::size_t>(t)];
      Literal free_last = tail[static_cast<std::size_t>(1 - t)];
      Literal closing = -third;  // l_{2k+1}
      for (int h = 0; h < 2; ++h) {
        Literal cand_l1 = head[static_cast<std::size_t>(h)];
        Literal cand_l2 = head[static_cast<std::size_t>(1 - h)];
        if (closing != cand_l1 && closing != -cand_l1) continue;
        std::vector<Literal> all{cand_l1, cand_l2, free_last};
        for (std::size_t i = 0; i + 1 < k; ++i) all.push_back(-link_out[i]);
        for (Literal l : mids) all.push_back(l);
        if (!distinct(all)) continue;
        res.l1 = cand_l1;
        res.even_lits = {cand_l2};
        for (Literal l : mids) res.even_lits.push_back(l);
        res.even_lits.push_back(free_last);
        res.kind = closing == cand_l1 ? ChainKind::OrdinaryCycle : ChainKind::MobiusCycle;
        return res;
      }
    }

    std::vector<Literal> all = interior;
    all.push_back(tail[0]);
    all.push_back(tail[1]);
    if (!distinct(all)) {
      res.reason = "open chain reuses a variable at its tail";
      return res;
    }
    res.kind = ChainKind::OpenPath;
    return res;
  };

  // Depth-first over link designations; first valid classification wins.
  std::vector<std::size_t> pick(k - 1, 0);
  while (true) {
    for (std::size_t i = 0; i + 1 < k; ++i) link_out[i] = options[i][pick[i]];
    ClauseChain res = attempt();
    if (res.kind != ChainKind::Invalid) return res;
    if (first_reason.empty()) first_reason = res.reason;
    std::size_t pos = 0;
    while (pos < pick.size() && pick[pos] + 1 == options[pos].size()) {
      pick[pos] = 0;
      ++pos;
    }
    if (pos == pick.size()) break;
    ++pick[pos];
  }
  return invalid(first_reason.empty() ? "no consistent link designation" : first_reason);
}

/// Sharper inequality of a mobius cycle of k clauses:
/// v(l1) + v(l2) + v(l4) + ... + v(l_{2k}) >= -k + 1.
inline LinearInequality mobius_sharper_inequality(const ClauseChain& chain) {
  if (chain.kind != ChainKind::MobiusCycle)
    throw ValidationError("sharper inequality requires a mobius cycle");
  LinearInequality q;
  auto add = [&](Literal l, double w) { q.coeffs[literal_var(l)] += l > 0 ? w : -w; };
  add(chain.l1, 1.0);
  for (Literal l : chain.even_lits) add(l, 1.0);
  q.rhs = -static_cast<double>(chain.clauses.size()) + 1.0;
  q.sense = Sense::Ge;
  q.validate();
  return q;
}

/// The weaker form implied by summing the constituent clause inequalities:
/// 2 v(l1) + v(l2) + ... + v(l_{2k}) >= -k.
inline LinearInequality mobius_implied_inequality(const ClauseChain& chain) {
  if (chain.kind != ChainKind::MobiusCycle)
    throw ValidationError("implied inequality requires a mobius cycle");
  LinearInequality q;
  auto add = [&](Literal l, double w) { q.coeffs[literal_var(l)] += l > 0 ? w : -w; };
  add(chain.l1, 2.0);
  for (Literal l : chain.even_lits) add(l, 1.0);
  q.rhs = -static_cast<double>(chain.clauses.size());
  q.sense = Sense::Ge;
  q.validate();
  return q;
}

enum class DistanceMode { Simplex, Slack };

/// Projectively invariant p-norm distance. Simplex mode expects two interior
/// simplex points; slack mode expects two positive slack vectors. p must be
/// even so the value is real and symmetric without absolute values.
inline double projective_distance(const std::vector<double>& x, const std::vector<double>& y,
                                  int p, DistanceMode mode) {
  if (p < 2 || p % 2 != 0) throw ValidationError("p must be an even integer >= 2");
  if (x.size() != y.size()) throw ValidationError("dimension mismatch");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] <= 0.0 || y[i] <= 0.0) throw DomainError("coordinates must be strictly positive");
  double acc = 0.0;
  if (mode == DistanceMode::Simplex) {
    for (std::size_t i = 0; i < x.size(); ++i)
      acc += std::pow(x[i] / y[i] - y[i] / x[i], p);
    return 0.5 * std::pow(acc, 1.0 / p);
  }
  for (std::size_t i = 0; i < x.size(); ++i)
    acc += std::pow(0.5 * (x[i] / y[i] - y[i] / x[i]), p);
  return std::pow(acc, 1.0 / p);
}

/// Infinitesimal form sum (dx_i / x_i)^p; the Riemannian metric at p=2.
inline double metric_form(const std::vector<double>& x, const std::vector<double>& dx, int p) {
  if (p < 2 || p % 2 != 0) throw ValidationError("p must be an even integer >= 2");
  if (x.size() != dx.size()) throw ValidationError("dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) throw DomainError("zero coordinate in metric form");
    acc += std::pow(dx[i] / x[i], p);
  }
  return acc;
}

/// sum w_i + beta * sum w_i^2.
inline double nonconvex_objective(const std::vector<double>& w, double beta) {
  double lin = 0.0, quad = 0.0;
  for (double v : w) {
    lin += v;
    quad += v * v;
  }
  return lin + beta * quad;
}

/// Coordinate-wise sign with ties mapped to +1.
inline std::vector<double> round_to_hypercube(const std::vector<double>& w) {
  std::vector<double> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i] >= 0.0 ? 1.0 : -1.0;
  return out;
}

}  // namespace cutwalk

#endif
