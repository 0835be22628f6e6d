#ifndef CUTWALK_POLYNOMIAL_HPP
#define CUTWALK_POLYNOMIAL_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "cutwalk/common.hpp"

namespace cutwalk {

using Rational = mpq_class;

inline double to_double(const Rational& q) { return q.get_d(); }

/// Exact multivariate polynomial over the rationals.
///
/// The variable universe is fixed at construction; exponent vectors are
/// dense (one slot per variable) and terms live in a map keyed by the
/// exponent vector, so the representation is canonical: equal polynomials
/// compare equal with operator==. Zero coefficients are never stored.
class Polynomial {
public:
  using Exponents = std::vector<unsigned>;
  using TermMap = std::map<Exponents, Rational>;

  Polynomial() = default;

  explicit Polynomial(std::vector<std::string> vars) : vars_(std::move(vars)) {}

  static Polynomial constant(std::vector<std::string> vars, Rational c) {
    Polynomial p(std::move(vars));
    if (c != 0) p.terms_[Exponents(p.vars_.size(), 0)] = std::move(c);
    return p;
  }

  static Polynomial variable(std::vector<std::string> vars, const std::string& name) {
    Polynomial p(std::move(vars));
    Exponents e(p.vars_.size(), 0);
    e[p.var_index(name)] = 1;
    p.terms_[e] = 1;
    return p;
  }

  static Polynomial monomial(std::vector<std::string> vars, Rational c, Exponents e) {
    Polynomial p(std::move(vars));
    if (e.size() != p.vars_.size()) throw ValidationError("monomial exponent arity mismatch");
    if (c != 0) p.terms_[std::move(e)] = std::move(c);
    return p;
  }

  const std::vector<std::string>& variables() const { return vars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  std::size_t var_index(const std::string& name) const {
    auto it = std::find(vars_.begin(), vars_.end(), name);
    if (it == vars_.end()) throw ValidationError("unknown variable '" + name + "'");
    return static_cast<std::size_t>(it - vars_.begin());
  }

  long degree() const {
    long d = -1;
    for (const auto& [e, c] : terms_) {
      long t = 0;
      for (unsigned x : e) t += x;
      d = std::max(d, t);
    }
    return d;  // -1 for the zero polynomial
  }

  long degree_in(std::size_t v) const {
    long d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, static_cast<long>(e[v]));
    return d;
  }

  Polynomial operator+(const Polynomial& o) const {
    check_universe(o);
    Polynomial r(vars_);
    r.terms_ = terms_;
    for (const auto& [e, c] : o.terms_) r.add_term(e, c);
    return r;
  }

  Polynomial operator-() const {
    Polynomial r(vars_);
    for (const auto& [e, c] : terms_) r.terms_[e] = -c;
    return r;
  }

  Polynomial operator-(const Polynomial& o) const { return *this + (-o); }

  Polynomial operator*(const Polynomial& o) const {
    check_universe(o);
    Polynomial r(vars_);
    for (const auto& [ea, ca] : terms_)
      for (const auto& [eb, cb] : o.terms_) {
        Exponents e(ea.size());
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
        r.add_term(e, ca * cb);
      }
    return r;
  }

  Polynomial scalar_mul(const Rational& c) const {
    Polynomial r(vars_);
    if (c == 0) return r;
    for (const auto& [e, t] : terms_) r.terms_[e] = t * c;
    return r;
  }

  Polynomial pow(unsigned k) const {
    Polynomial r = constant(vars_, 1);
    Polynomial base = *this;
    while (k) {
      if (k & 1u) r = r * base;
      base = base * base;
      k >>= 1u;
    }
    return r;
  }

  bool operator==(const Polynomial& o) const {
    return vars_ == o.vars_ && terms_ == o.terms_;
  }
  bool operator!=(const Polynomial& o) const { return !(*this == o); }

  /// Exact composition p[var := replacement].
  Polynomial substitute(const std::string& var, const Polynomial& replacement) const {
    check_universe(replacement);
    std::size_t v = var_index(var);
    Polynomial r(vars_);
    for (const auto& [e, c] : terms_) {
      Exponents rest = e;
      unsigned k = rest[v];
      rest[v] = 0;
      Polynomial term = monomial(vars_, c, rest) * replacement.pow(k);
      r = r + term;
    }
    return r;
  }

  /// Rewrite pivot^2 -> 1 - sum of squares of the other variables until the
  /// degree in the pivot is at most 1. The result agrees with the original
  /// on the unit sphere.
  Polynomial reduce_mod_sphere(const std::string& pivot) const {
    std::size_t v = var_index(pivot);
    Polynomial sub(vars_);
    sub = constant(vars_, 1);
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (i == v) continue;
      Exponents e(vars_.size(), 0);
      e[i] = 2;
      sub = sub - monomial(vars_, 1, e);
    }
    Polynomial cur = *this;
    while (cur.degree_in(v) >= 2) {
      Polynomial next(vars_);
      for (const auto& [e, c] : cur.terms_) {
        if (e[v] >= 2) {
          Exponents rest = e;
          rest[v] -= 2;
          next = next + monomial(vars_, c, rest) * sub;
        } else {
          next.add_term(e, c);
        }
      }
      cur = std::move(next);
    }
    return cur;
  }

  /// Term-wise partial derivative.
  Polynomial derivative(const std::string& var) const {
    std::size_t v = var_index(var);
    Polynomial r(vars_);
    for (const auto& [e, c] : terms_) {
      if (e[v] == 0) continue;
      Exponents d = e;
      d[v] -= 1;
      r.add_term(d, c * static_cast<long>(e[v]));
    }
    return r;
  }

  /// Re-express over a larger universe that contains every current variable.
  Polynomial extend_universe(std::vector<std::string> vars) const {
    Polynomial r(std::move(vars));
    std::vector<std::size_t> where(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i) where[i] = r.var_index(vars_[i]);
    for (const auto& [e, c] : terms_) {
      Exponents ne(r.vars_.size(), 0);
      for (std::size_t i = 0; i < e.size(); ++i) ne[where[i]] = e[i];
      r.terms_[ne] = c;
    }
    return r;
  }

  Rational eval(const std::vector<Rational>& point) const {
    if (point.size() != vars_.size()) throw ValidationError("evaluation point arity mismatch");
    Rational acc = 0;
    for (const auto& [e, c] : terms_) {
      Rational t = c;
      for (std::size_t i = 0; i < e.size(); ++i)
        for (unsigned k = 0; k < e[i]; ++k) t *= point[i];
      acc += t;
    }
    return acc;
  }

  double eval(const std::vector<double>& point) const {
    if (point.size() != vars_.size()) throw ValidationError("evaluation point arity mismatch");
    double acc = 0;
    for (const auto& [e, c] : terms_) {
      double t = to_double(c);
      for (std::size_t i = 0; i < e.size(); ++i) t *= std::pow(point[i], e[i]);
      acc += t;
    }
    return acc;
  }

  /// Exact division; returns nullopt when the divisor does not divide.
  std::optional<Polynomial> divide_exact(const Polynomial& g) const {
    check_universe(g);
    if (g.is_zero()) throw DomainError("division by zero polynomial");
    Polynomial rem = *this;
    Polynomial quo(vars_);
    auto glead = g.lead();
    while (!rem.is_zero()) {
      auto rlead = rem.lead();
      Exponents q(rlead.first.size());
      for (std::size_t i = 0; i < q.size(); ++i) {
        if (rlead.first[i] < glead.first[i]) return std::nullopt;
        q[i] = rlead.first[i] - glead.first[i];
      }
      Polynomial qt = monomial(vars_, rlead.second / glead.second, q);
      quo = quo + qt;
      rem = rem - qt * g;
      if (!rem.is_zero() && rem.lead().first >= rlead.first) return std::nullopt;
    }
    return quo;
  }

  /// (2k+1)-th root when the polynomial is a perfect odd power.
  std::optional<Polynomial> odd_root(unsigned k) const {
    unsigned p = 2 * k + 1;
    if (is_zero()) return Polynomial(vars_);
    auto flead = lead();
    Exponents re(flead.first.size());
    for (std::size_t i = 0; i < re.size(); ++i) {
      if (flead.first[i] % p != 0) return std::nullopt;
      re[i] = flead.first[i] / p;
    }
    auto rc = rational_root(flead.second, p);
    if (!rc) return std::nullopt;
    Polynomial g = monomial(vars_, *rc, re);
    // Grow g term by term: the next correction t satisfies
    // p * lead(g)^(p-1) * t = lead(f - g^p).
    Polynomial lead_pow = monomial(vars_, *rc, re).pow(p - 1).scalar_mul(p);
    for (int guard = 0; guard < 4096; ++guard) {
      Polynomial diff = *this - g.pow(p);
      if (diff.is_zero()) return g;
      auto dlead = diff.lead();
      Exponents te(dlead.first.size());
      auto llead = lead_pow.lead();
      for (std::size_t i = 0; i < te.size(); ++i) {
        if (dlead.first[i] < llead.first[i]) return std::nullopt;
        te[i] = dlead.first[i] - llead.first[i];
      }
      Polynomial t = monomial(vars_, dlead.second / llead.second, te);
      if (t.is_zero()) return std::nullopt;
      Polynomial g2 = g + t;
      if (g2 == g) return std::nullopt;
      g = g2;
    }
    return std::nullopt;
  }

  /// Leading term in the lex order induced by the variable list.
  std::pair<Exponents, Rational> lead() const {
    if (terms_.empty()) throw DomainError("zero polynomial has no leading term");
    auto it = std::prev(terms_.end());
    return {it->first, it->second};
  }

  /// Text form: terms `coef * x^e y^e ...` joined with +/-.
  std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [e, c] = *it;
      Rational a = c;
      if (first) {
        if (a < 0) {
          out << "-";
          a = -a;
        }
      } else {
        out << (a < 0 ? " - " : " + ");
        if (a < 0) a = -a;
      }
      first = false;
      bool has_var = std::any_of(e.begin(), e.end(), [](unsigned x) { return x > 0; });
      if (a != 1 || !has_var) {
        out << a.get_str();
        if (has_var) out << "*";
      }
      bool first_var = true;
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        if (!first_var) out << "*";
        first_var = false;
        out << vars_[i];
        if (e[i] > 1) out << "^" << e[i];
      }
    }
    return out.str();
  }

  /// Parse the text form. Whitespace-tolerant; '*' between factors optional.
  static Polynomial parse(const std::vector<std::string>& vars, const std::string& text) {
    Polynomial r{vars};
    std::size_t i = 0;
    auto skip = [&] { while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i; };
    skip();
    if (i == text.size()) throw ParseError("empty polynomial text");
    bool any = false;
    while (true) {
      skip();
      if (i == text.size()) break;
      int sign = 1;
      while (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        if (text[i] == '-') sign = -sign;
        ++i;
        skip();
      }
      if (i == text.size()) throw ParseError("dangling sign in polynomial text");
      Rational coef = sign;
      Exponents e(vars.size(), 0);
      bool saw_factor = false;
      while (true) {
        skip();
        if (i < text.size() && text[i] == '*') {
          ++i;
          skip();
        }
        if (i == text.size() || text[i] == '+' || text[i] == '-') break;
        if (std::isdigit(static_cast<unsigned char>(text[i]))) {
          std::size_t j = i;
          while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
          std::string num = text.substr(i, j - i);
          i = j;
          skip();
          if (i < text.size() && text[i] == '/') {
            ++i;
            skip();
            std::size_t k2 = i;
            while (k2 < text.size() && std::isdigit(static_cast<unsigned char>(text[k2]))) ++k2;
            if (k2 == i) throw ParseError("missing denominator in rational coefficient");
            num += "/" + text.substr(i, k2 - i);
            i = k2;
          }
          coef *= Rational(num, 10);
          coef.canonicalize();
          saw_factor = true;
        } else if (std::isalpha(static_cast<unsigned char>(text[i])) || text[i] == '_') {
          std::size_t j = i;
          while (j < text.size() &&
                 (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
            ++j;
          std::string name = text.substr(i, j - i);
          i = j;
          unsigned exp = 1;
          skip();
          if (i < text.size() && text[i] == '^') {
            ++i;
            skip();
            std::size_t k2 = i;
            while (k2 < text.size() && std::isdigit(static_cast<unsigned char>(text[k2]))) ++k2;
            if (k2 == i) throw ParseError("missing exponent after '^'");
            exp = static_cast<unsigned>(std::stoul(text.substr(i, k2 - i)));
            i = k2;
          }
          auto it = std::find(vars.begin(), vars.end(), name);
          if (it == vars.end()) throw ParseError("unknown variable '" + name + "' in polynomial text");
          e[static_cast<std::size_t>(it - vars.begin())] += exp;
          saw_factor = true;
        } else {
          throw ParseError(std::string("unexpected character '") + text[i] + "' in polynomial text");
        }
      }
      if (!saw_factor) throw ParseError("empty term in polynomial text");
      r.add_term(e, coef);
      any = true;
    }
    if (!any) throw ParseError("empty polynomial text");
    return r;
  }

private:
  void check_universe(const Polynomial& o) const {
    if (vars_ != o.vars_) throw ValidationError("polynomial variable universes differ");
  }

  void add_term(const Exponents& e, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  // c^(1/p) over Q for odd p, or nullopt.
  static std::optional<Rational> rational_root(const Rational& c, unsigned p) {
    mpz_class num = c.get_num(), den = c.get_den();
    mpz_class rn, rd;
    int exact_n = mpz_root(rn.get_mpz_t(), num.get_mpz_t(), p);
    int exact_d = mpz_root(rd.get_mpz_t(), den.get_mpz_t(), p);
    if (!exact_n || !exact_d) return std::nullopt;
    Rational r(rn, rd);
    r.canonicalize();
    return r;
  }

  std::vector<std::string> vars_;
  TermMap terms_;
};

}  // namespace cutwalk

#endif
