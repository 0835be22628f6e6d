#ifndef CUTWALK_PROOF_HPP
#define CUTWALK_PROOF_HPP

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cutwalk/common.hpp"
#include "cutwalk/oracles.hpp"
#include "cutwalk/polynomial.hpp"

namespace cutwalk {

// ---------------------------------------------------------------------------
// Positivity proof trees.
//
// A node concludes "polynomial >= 0" (or "> 0" when strict) on a domain:
// all of R^n, the nonnegative orthant, or a variety given by relations.
// check_proof validates every rule application structurally and returns the
// concluded polynomial; it never trusts a claim it cannot recompute.

enum class ProofDomain { Reals, PositiveOrthant, Variety };

struct ProofNode;
using ProofNodePtr = std::shared_ptr<ProofNode>;

enum class ProofRule {
  Const,       // alpha > 0 for a positive scalar alpha
  Square,      // g^2 >= 0
  Sum,         // f >= 0, g >= 0  =>  f + g >= 0
  Product,     // f >= 0, g >= 0  =>  f * g >= 0
  ModVariety,  // restrict a conclusion to a variety
  Compose,     // h = f(g_1, ..., g_n); variant (b) needs certified g_i >= 0
  Divide,      // g > 0, f >= 0, g | f  =>  f/g >= 0
  OddRadical,  // f = g^(2k+1) >= 0  =>  g >= 0
};

struct ProofNode {
  ProofRule rule;

  // Const
  Rational alpha;
  std::vector<std::string> universe;  // variable universe for Const leaves

  // Square
  Polynomial square_base;

  // Sum / Product
  ProofNodePtr left, right;

  // ModVariety
  ProofNodePtr child;
  std::vector<Polynomial> relations;

  // Compose: f over its own universe, inner[i] replaces f's i-th variable.
  ProofNodePtr f_node;
  std::vector<Polynomial> inner;
  bool orthant_variant = false;          // variant (b)
  std::vector<ProofNodePtr> inner_certs; // required by variant (b)
  bool named_lemma = false;              // O(1) lemma: f's subtree length not counted

  // Divide
  ProofNodePtr divisor_cert;  // must conclude the divisor strictly positive

  // OddRadical
  unsigned radical_k = 0;
};

inline ProofNodePtr proof_const(std::vector<std::string> vars, Rational alpha) {
  auto n = std::make_shared<ProofNode>();
  n->rule = ProofRule::Const;
  n->alpha = std::move(alpha);
  n->universe = std::move(vars);
  return n;
}

inline ProofNodePtr proof_square(Polynomial g) {
  auto n = std::make_shared<ProofNode>();
  n->rule = ProofRule::Square;
  n->square_base = std::move(g);
  return n;
}

inline ProofNodePtr proof_sum(ProofNodePtr l, ProofNodePtr r) {
  auto n = std::make_shared<ProofNode>();
  n->rule = ProofRule::Sum;
  n->left = std::move(l);
  n->right = std::move(r);
  return n;
}

inline ProofNodePtr proof_product(ProofNodePtr l, ProofNodePtr r) {
  auto n = std::make_shared<ProofNode>();
  n->rule = ProofRule::Product;
  n->left = std::move(l);
  n->right = std::move(r);
  return n;
}

inline ProofNodePtr proof_mod_variety(ProofNodePtr child, std::vector<Polynomial> relations) {
  auto n = std::make_shared<ProofNode>();
  n->rule = ProofRule::ModVariety;
  n->child = std::move(child);
  n->relations = std::move(relations);
  return n;
}

inline ProofNodePtr proof_compose(ProofNodePtr f, std::vector<Polynomial> inner,
                                  bool orthant_variant = false,
                                  std::vector<ProofNodePtr> inner_certs = {},
                                  bool named_lemma = false) {
  auto n = std::make_shared<ProofNode>();
  n->rule = ProofRule::Compose;
  n->f_node = std::move(f);
  n->inner = std::move(inner);
  n->orthant_variant = orthant_variant;
  n->inner_certs = std::move(inner_certs);
  n->named_lemma = named_lemma;
  return n;
}

inline ProofNodePtr proof_divide(ProofNodePtr f, ProofNodePtr divisor_cert) {
  auto n = std::make_shared<ProofNode>();
  n->rule = ProofRule::Divide;
  n->f_node = std::move(f);
  n->divisor_cert = std::move(divisor_cert);
  return n;
}

inline ProofNodePtr proof_odd_radical(ProofNodePtr f, unsigned k) {
  auto n = std::make_shared<ProofNode>();
  n->rule = ProofRule::OddRadical;
  n->f_node = std::move(f);
  n->radical_k = k;
  return n;
}

struct ProofCheck {
  bool accepted = false;
  Polynomial conclusion;
  ProofDomain domain = ProofDomain::Reals;
  std::vector<Polynomial> domain_relations;
  bool strict = false;
  long proof_length = 0;
  std::string failing_node;  // path like "root.left" when rejected
  std::string reason;
};

namespace detail {

inline ProofDomain combine_domain(ProofDomain a, ProofDomain b) {
  if (a == ProofDomain::Variety || b == ProofDomain::Variety) return ProofDomain::Variety;
  if (a == ProofDomain::PositiveOrthant || b == ProofDomain::PositiveOrthant)
    return ProofDomain::PositiveOrthant;
  return ProofDomain::Reals;
}

inline long substitution_size(const std::vector<Polynomial>& inner) {
  long s = 0;
  for (const auto& p : inner) s += static_cast<long>(p.terms().size());
  return s;
}

inline ProofCheck reject(ProofCheck base, std::string node, std::string reason) {
  base.accepted = false;
  base.failing_node = std::move(node);
  base.reason = std::move(reason);
  return base;
}

inline ProofCheck check_node(const ProofNode& n, const std::string& path);

inline ProofCheck check_child(const ProofNodePtr& c, const std::string& path) {
  if (!c) {
    ProofCheck r;
    return reject(std::move(r), path, "missing child node");
  }
  return check_node(*c, path);
}

inline ProofCheck check_node(const ProofNode& n, const std::string& path) {
  ProofCheck r;
  switch (n.rule) {
    case ProofRule::Const: {
      if (n.alpha <= 0) return reject(std::move(r), path, "Const requires a positive scalar");
      r.accepted = true;
      r.conclusion = Polynomial::constant(n.universe, n.alpha);
      r.strict = true;
      r.proof_length = 1;
      return r;
    }
    case ProofRule::Square: {
      r.accepted = true;
      r.conclusion = n.square_base * n.square_base;
      r.strict = false;
      r.proof_length = 1;
      return r;
    }
    case ProofRule::Sum:
    case ProofRule::Product: {
      ProofCheck a = check_child(n.left, path + ".left");
      if (!a.accepted) return a;
      ProofCheck b = check_child(n.right, path + ".right");
      if (!b.accepted) return b;
      if (a.conclusion.variables() != b.conclusion.variables())
        return reject(std::move(r), path, "operands live in different variable universes");
      r.accepted = true;
      r.conclusion = n.rule == ProofRule::Sum ? a.conclusion + b.conclusion
                                              : a.conclusion * b.conclusion;
      r.strict = n.rule == ProofRule::Sum ? (a.strict || b.strict) : (a.strict && b.strict);
      r.domain = combine_domain(a.domain, b.domain);
      r.domain_relations = a.domain_relations;
      r.domain_relations.insert(r.domain_relations.end(), b.domain_relations.begin(),
                                b.domain_relations.end());
      r.proof_length = 1 + a.proof_length + b.proof_length;
      return r;
    }
    case ProofRule::ModVariety: {
      ProofCheck a = check_child(n.child, path + ".child");
      if (!a.accepted) return a;
      r = a;
      r.domain = ProofDomain::Variety;
      r.domain_relations.insert(r.domain_relations.end(), n.relations.begin(), n.relations.end());
      r.proof_length = 1 + a.proof_length;
      return r;
    }
    case ProofRule::Compose: {
      ProofCheck f = check_child(n.f_node, path + ".f");
      if (!f.accepted) return f;
      const auto& fvars = f.conclusion.variables();
      if (n.inner.size() != fvars.size())
        return reject(std::move(r), path, "substitution arity does not match the outer universe");
      for (std::size_t i = 1; i < n.inner.size(); ++i)
        if (n.inner[i].variables() != n.inner[0].variables())
          return reject(std::move(r), path, "inner polynomials live in different universes");
      if (!n.orthant_variant) {
        if (f.domain != ProofDomain::Reals)
          return reject(std::move(r), path,
                        "Compose variant (a) needs the outer bound to hold on all of R^n");
      } else {
        if (f.domain == ProofDomain::Variety)
          return reject(std::move(r), path,
                        "Compose variant (b) needs the outer bound on the nonnegative orthant");
        if (n.inner_certs.size() != n.inner.size())
          return reject(std::move(r), path,
                        "Compose variant (b) needs one nonnegativity certificate per inner polynomial");
        for (std::size_t i = 0; i < n.inner_certs.size(); ++i) {
          ProofCheck ic = check_child(n.inner_certs[i], path + ".inner[" + std::to_string(i) + "]");
          if (!ic.accepted) return ic;
          if (ic.domain != ProofDomain::Reals)
            return reject(std::move(r), path + ".inner[" + std::to_string(i) + "]",
                          "inner certificate must hold on all of R^m");
          if (!(ic.conclusion == n.inner[i]))
            return reject(std::move(r), path + ".inner[" + std::to_string(i) + "]",
                          "inner certificate concludes a different polynomial");
          r.proof_length += ic.proof_length;
        }
      }
      // h = f(g_1, ..., g_n), expanded exactly.
      const auto& tvars = n.inner.empty() ? fvars : n.inner[0].variables();
      Polynomial h(tvars);
      for (const auto& [e, c] : f.conclusion.terms()) {
        Polynomial term = Polynomial::constant(tvars, c);
        for (std::size_t i = 0; i < e.size(); ++i)
          if (e[i] > 0) term = term * n.inner[i].pow(e[i]);
        h = h + term;
      }
      r.accepted = true;
      r.conclusion = std::move(h);
      r.strict = f.strict;
      r.domain = ProofDomain::Reals;
      r.proof_length += 1 + substitution_size(n.inner) + (n.named_lemma ? 0 : f.proof_length);
      return r;
    }
    case ProofRule::Divide: {
      ProofCheck f = check_child(n.f_node, path + ".f");
      if (!f.accepted) return f;
      ProofCheck g = check_child(n.divisor_cert, path + ".divisor");
      if (!g.accepted) return g;
      if (!g.strict)
        return reject(std::move(r), path, "Divide needs a strictly positive divisor certificate");
      if (f.conclusion.variables() != g.conclusion.variables())
        return reject(std::move(r), path, "dividend and divisor universes differ");
      auto q = f.conclusion.divide_exact(g.conclusion);
      if (!q) return reject(std::move(r), path, "divisor does not divide the dividend exactly");
      r.accepted = true;
      r.conclusion = std::move(*q);
      r.strict = f.strict;
      r.domain = combine_domain(f.domain, g.domain);
      r.domain_relations = f.domain_relations;
      r.proof_length = 1 + f.proof_length + g.proof_length;
      return r;
    }
    case ProofRule::OddRadical: {
      ProofCheck f = check_child(n.f_node, path + ".f");
      if (!f.accepted) return f;
      auto root = f.conclusion.odd_root(n.radical_k);
      if (!root)
        return reject(std::move(r), path,
                      "polynomial is not a perfect (2k+1)-th power with k=" +
                          std::to_string(n.radical_k));
      r.accepted = true;
      r.conclusion = std::move(*root);
      r.strict = f.strict;
      r.domain = f.domain;
      r.domain_relations = f.domain_relations;
      r.proof_length = 1 + f.proof_length;
      return r;
    }
  }
  return reject(std::move(r), path, "unknown rule");
}

}  // namespace detail

inline ProofCheck check_proof(const ProofNodePtr& root) {
  return detail::check_child(root, "root");
}

// ---------------------------------------------------------------------------
// Sums-of-squares certificates modulo a variety.

struct SosCertificate {
  std::string name;
  Polynomial target;                                  // f
  std::vector<std::pair<Rational, Polynomial>> squares;  // (c_i, S_i), c_i > 0
  std::vector<Polynomial> relations;                  // g_j, zero on V
  std::vector<Polynomial> multipliers;                // optional a_j

  void validate() const {
    for (const auto& [c, s] : squares)
      if (c <= 0) throw ValidationError("certificate weights must be positive");
  }
};

enum class SosStrategy { ExactSphere, NumericSample };

struct SosReport {
  bool accepted = false;
  SosStrategy strategy_used = SosStrategy::ExactSphere;
  bool exact_zero = false;          // reduced residual is the zero polynomial
  Polynomial reduced_residual;      // meaningful for the exact strategy
  double max_abs_numeric = 0.0;     // meaningful for the numeric strategy
  std::size_t sample_count = 0;
  std::string warning;
};

struct SosOptions {
  double tolerance = 1e-9;
  std::size_t samples = 1000;
  std::uint64_t seed = 20140101;
};

namespace detail {

inline Polynomial sphere_relation(const std::vector<std::string>& vars) {
  Polynomial s(vars);
  for (const auto& v : vars) {
    Polynomial xv = Polynomial::variable(vars, v);
    s = s + xv * xv;
  }
  return s - Polynomial::constant(vars, 1);
}

inline bool has_sphere_relation(const SosCertificate& cert) {
  Polynomial sphere = sphere_relation(cert.target.variables());
  for (const auto& g : cert.relations)
    if (g == sphere || g == -sphere) return true;
  return false;
}

inline Polynomial raw_residual(const SosCertificate& cert) {
  Polynomial acc = cert.target;
  for (const auto& [c, s] : cert.squares) acc = acc - (s * s).scalar_mul(c);
  return acc;
}

}  // namespace detail

/// Check f = sum c_i S_i^2 on the variety. The exact strategy reduces the
/// residual modulo the sphere relation (rewriting the last variable's square)
/// and demands the exact zero polynomial; when other relations are present
/// and the sphere alone does not close the residual, it falls back to
/// numeric sampling with a warning. The numeric strategy evaluates the raw
/// residual at seeded sphere points.
inline SosReport verify_sos_certificate(const SosCertificate& cert, SosStrategy strategy,
                                        SosOptions opts = {}) {
  cert.validate();
  SosReport rep;
  Polynomial residual = detail::raw_residual(cert);

  if (strategy == SosStrategy::ExactSphere) {
    if (!detail::has_sphere_relation(cert))
      throw ValidationError("exact-sphere strategy requires the sphere relation");
    const auto& vars = cert.target.variables();
    Polynomial reduced = residual.reduce_mod_sphere(vars.back());
    rep.strategy_used = SosStrategy::ExactSphere;
    rep.reduced_residual = reduced;
    rep.exact_zero = reduced.is_zero();
    if (rep.exact_zero) {
      rep.accepted = true;
      return rep;
    }
    if (cert.relations.size() > 1) {
      // The variety is cut by more than the sphere; sphere-only reduction is
      // incomplete there, so fall back to sampling.
      rep.warning = "sphere reduction left a nonzero residual; fell back to numeric sampling";
      strategy = SosStrategy::NumericSample;
    } else {
      rep.accepted = false;
      return rep;
    }
  }

  rep.strategy_used = SosStrategy::NumericSample;
  auto points = oracles::sphere_sample(cert.target.variables().size(), opts.samples, opts.seed);
  double worst = 0.0;
  for (const auto& p : points) worst = std::max(worst, std::abs(residual.eval(p)));
  rep.max_abs_numeric = worst;
  rep.sample_count = points.size();
  rep.accepted = worst <= opts.tolerance;
  return rep;
}

// ---------------------------------------------------------------------------
// SAT non-satisfiability encoding.

/// Per-clause polynomial: product over literals of (1 - x) for a positive
/// literal and (1 + x) for a negated one. Value 0 on satisfying +-1 points
/// and 8 otherwise.
inline Polynomial clause_polynomial(const Clause& c, const std::vector<std::string>& vars) {
  Polynomial p = Polynomial::constant(vars, 1);
  for (Literal l : c.literals()) {
    Polynomial x = Polynomial::variable(vars, vars[static_cast<std::size_t>(literal_var(l) - 1)]);
    Polynomial factor = l > 0 ? Polynomial::constant(vars, 1) - x
                              : Polynomial::constant(vars, 1) + x;
    p = p * factor;
  }
  return p;
}

inline std::vector<std::string> cnf_variable_names(const CnfFormula& f) {
  std::vector<std::string> vars;
  for (int i = 1; i <= f.n(); ++i) vars.push_back("x" + std::to_string(i));
  return vars;
}

/// f = sum of clause polynomials; strictly positive on the +-1 variety iff
/// the formula is unsatisfiable.
inline Polynomial sat_nonneg_encoding(const CnfFormula& f) {
  auto vars = cnf_variable_names(f);
  Polynomial acc(vars);
  for (const auto& c : f.clauses()) acc = acc + clause_polynomial(c, vars);
  return acc;
}

// ---------------------------------------------------------------------------
// Critical point variety.

/// Relations {df/dx_i - lam * x_i} plus the sphere constraint, over the
/// universe extended with the multiplier variable "lam".
inline std::vector<Polynomial> critical_point_relations(const Polynomial& f) {
  std::vector<std::string> vars = f.variables();
  vars.push_back("lam");
  Polynomial lam = Polynomial::variable(vars, "lam");
  std::vector<Polynomial> out;
  for (const auto& v : f.variables()) {
    Polynomial df = f.derivative(v).extend_universe(vars);
    Polynomial xv = Polynomial::variable(vars, v);
    out.push_back(df - lam * xv);
  }
  Polynomial sphere(vars);
  for (const auto& v : f.variables()) {
    Polynomial xv = Polynomial::variable(vars, v);
    sphere = sphere + xv * xv;
  }
  out.push_back(sphere - Polynomial::constant(vars, 1));
  return out;
}

}  // namespace cutwalk

#endif
