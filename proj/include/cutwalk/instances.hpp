#ifndef CUTWALK_INSTANCES_HPP
#define CUTWALK_INSTANCES_HPP

#include <algorithm>
#include <cstdlib>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cutwalk/common.hpp"

namespace cutwalk {

// External indices are 1-based (DIMACS convention); everything stored here
// keeps that convention and adapters translate to 0-based where matrices
// are involved.

/// Simple undirected graph: no self-loops, no duplicate edges.
class Graph {
public:
  Graph() = default;
  Graph(int n, std::vector<std::pair<int, int>> edges) : n_(n) {
    if (n < 0) throw ValidationError("negative vertex count");
    for (auto [i, j] : edges) add_edge(i, j);
  }

  int n() const { return n_; }
  const std::set<std::pair<int, int>>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }

  bool has_edge(int i, int j) const {
    if (i > j) std::swap(i, j);
    return edges_.count({i, j}) > 0;
  }

  void add_edge(int i, int j) {
    if (i < 1 || i > n_ || j < 1 || j > n_)
      throw ValidationError("edge endpoint out of range: (" + std::to_string(i) + "," +
                            std::to_string(j) + ") with n=" + std::to_string(n_));
    if (i == j) throw ValidationError("self-loop at vertex " + std::to_string(i));
    if (i > j) std::swap(i, j);
    if (!edges_.insert({i, j}).second)
      throw ValidationError("duplicate edge (" + std::to_string(i) + "," + std::to_string(j) + ")");
  }

  std::vector<std::vector<int>> adjacency_lists() const {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n_) + 1);
    for (auto [i, j] : edges_) {
      adj[static_cast<std::size_t>(i)].push_back(j);
      adj[static_cast<std::size_t>(j)].push_back(i);
    }
    return adj;
  }

  bool operator==(const Graph& o) const { return n_ == o.n_ && edges_ == o.edges_; }

private:
  int n_ = 0;
  std::set<std::pair<int, int>> edges_;
};

/// A literal: positive var is +v, negated var is -v (DIMACS style), v >= 1.
using Literal = int;

inline Literal negate_literal(Literal l) { return -l; }
inline int literal_var(Literal l) { return std::abs(l); }

/// A 3-SAT clause; literals use three distinct variables.
struct Clause {
  Literal a, b, c;

  std::vector<Literal> literals() const { return {a, b, c}; }

  bool contains(Literal l) const { return a == l || b == l || c == l; }

  bool operator==(const Clause& o) const {
    auto key = [](const Clause& cl) {
      std::vector<Literal> v{cl.a, cl.b, cl.c};
      std::sort(v.begin(), v.end());
      return v;
    };
    return key(*this) == key(o);
  }
};

inline Clause make_clause(Literal a, Literal b, Literal c) {
  if (a == 0 || b == 0 || c == 0) throw ValidationError("zero literal in clause");
  std::set<int> vars{literal_var(a), literal_var(b), literal_var(c)};
  if (vars.size() != 3) throw ValidationError("clause literals must use 3 distinct variables");
  return Clause{a, b, c};
}

/// Strict 3-SAT formula.
class CnfFormula {
public:
  CnfFormula() = default;
  CnfFormula(int n, std::vector<Clause> clauses) : n_(n), clauses_(std::move(clauses)) {
    if (n < 0) throw ValidationError("negative variable count");
    for (const auto& cl : clauses_)
      for (Literal l : cl.literals())
        if (literal_var(l) < 1 || literal_var(l) > n_)
          throw ValidationError("literal variable out of range: " + std::to_string(l));
  }

  int n() const { return n_; }
  const std::vector<Clause>& clauses() const { return clauses_; }
  std::size_t clause_count() const { return clauses_.size(); }

  bool operator==(const CnfFormula& o) const {
    if (n_ != o.n_ || clauses_.size() != o.clauses_.size()) return false;
    auto key = [](const CnfFormula& f) {
      std::vector<std::vector<Literal>> v;
      for (const auto& cl : f.clauses_) {
        std::vector<Literal> w{cl.a, cl.b, cl.c};
        std::sort(w.begin(), w.end());
        v.push_back(w);
      }
      std::sort(v.begin(), v.end());
      return v;
    };
    return key(*this) == key(o);
  }

private:
  int n_ = 0;
  std::vector<Clause> clauses_;
};

/// Interior point of the relaxation cube: every coordinate strictly in (-1,1).
class InteriorPoint {
public:
  InteriorPoint() = default;
  explicit InteriorPoint(std::vector<double> coords) : coords_(std::move(coords)) {
    for (double c : coords_)
      if (!(c > -1.0 && c < 1.0))
        throw DomainError("interior point coordinate " + std::to_string(c) +
                          " outside open cube (-1,1)");
  }

  /// Bypasses the cube check; for diagnostics and oracle probing only.
  static InteriorPoint unchecked(std::vector<double> coords) {
    InteriorPoint p;
    p.coords_ = std::move(coords);
    return p;
  }

  static InteriorPoint zeros(std::size_t n) { return InteriorPoint(std::vector<double>(n, 0.0)); }

  const std::vector<double>& coords() const { return coords_; }
  std::size_t size() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }

private:
  std::vector<double> coords_;
};

namespace detail {

struct Line {
  std::string text;
  long number;
};

inline std::vector<Line> significant_lines(const std::string& text) {
  std::vector<Line> out;
  std::istringstream in(text);
  std::string line;
  long num = 0;
  while (std::getline(in, line)) {
    ++num;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == 'c') continue;  // comment
    out.push_back({line, num});
  }
  return out;
}

}  // namespace detail

/// Parse DIMACS edge format: `p edge n m` then `e i j` lines.
inline Graph parse_graph(const std::string& text) {
  auto lines = detail::significant_lines(text);
  if (lines.empty()) throw ParseError("empty graph document");

  std::istringstream head(lines[0].text);
  std::string p, kind;
  int n = 0;
  long m = 0;
  if (!(head >> p >> kind >> n >> m) || p != "p" || kind != "edge")
    throw ParseError("expected problem line 'p edge n m'", lines[0].number);
  if (n < 0 || m < 0) throw ParseError("negative size in problem line", lines[0].number);

  Graph g(n, {});
  long seen = 0;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    std::istringstream in(lines[k].text);
    std::string tag;
    in >> tag;
    if (tag != "e") throw ParseError("expected edge line 'e i j'", lines[k].number);
    int i = 0, j = 0;
    if (!(in >> i >> j)) throw ParseError("malformed edge line", lines[k].number);
    std::string extra;
    if (in >> extra) throw ParseError("trailing tokens on edge line", lines[k].number);
    g.add_edge(i, j);
    ++seen;
  }
  if (seen != m)
    throw ParseError("problem line declares " + std::to_string(m) + " edges, found " +
                     std::to_string(seen));
  return g;
}

inline std::string render_graph(const Graph& g) {
  std::ostringstream out;
  out << "p edge " << g.n() << " " << g.edge_count() << "\n";
  for (auto [i, j] : g.edges()) out << "e " << i << " " << j << "\n";
  return out.str();
}

/// Parse DIMACS CNF: `p cnf n m` then 0-terminated clauses (3 literals each).
inline CnfFormula parse_cnf(const std::string& text) {
  auto lines = detail::significant_lines(text);
  if (lines.empty()) throw ParseError("empty CNF document");

  std::istringstream head(lines[0].text);
  std::string p, kind;
  int n = 0;
  long m = 0;
  if (!(head >> p >> kind >> n >> m) || p != "p" || kind != "cnf")
    throw ParseError("expected problem line 'p cnf n m'", lines[0].number);
  if (n < 0 || m < 0) throw ParseError("negative size in problem line", lines[0].number);

  std::vector<Clause> clauses;
  std::vector<Literal> pending;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    std::istringstream in(lines[k].text);
    long lit;
    while (in >> lit) {
      if (lit == 0) {
        if (pending.size() != 3)
          throw ValidationError("line " + std::to_string(lines[k].number) + ": clause with " +
                                std::to_string(pending.size()) +
                                " literals; strict 3-SAT requires exactly 3");
        std::set<int> vars;
        for (Literal l : pending) vars.insert(literal_var(l));
        if (vars.size() != 3)
          throw ValidationError("line " + std::to_string(lines[k].number) +
                                ": repeated variable within a clause");
        clauses.push_back(Clause{pending[0], pending[1], pending[2]});
        pending.clear();
      } else {
        pending.push_back(static_cast<Literal>(lit));
      }
    }
    if (!in.eof()) throw ParseError("malformed clause line", lines[k].number);
  }
  if (!pending.empty()) throw ParseError("unterminated clause at end of document");
  if (static_cast<long>(clauses.size()) != m)
    throw ParseError("problem line declares " + std::to_string(m) + " clauses, found " +
                     std::to_string(clauses.size()));
  return CnfFormula(n, std::move(clauses));
}

inline std::string render_cnf(const CnfFormula& f) {
  std::ostringstream out;
  out << "p cnf " << f.n() << " " << f.clause_count() << "\n";
  for (const auto& cl : f.clauses()) out << cl.a << " " << cl.b << " " << cl.c << " 0\n";
  return out.str();
}

}  // namespace cutwalk

#endif
