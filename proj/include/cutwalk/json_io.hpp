#ifndef CUTWALK_JSON_IO_HPP
#define CUTWALK_JSON_IO_HPP

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cutwalk/common.hpp"
#include "cutwalk/formulation.hpp"
#include "cutwalk/proof.hpp"

namespace cutwalk {

using Json = nlohmann::json;

inline Json to_json(Complex c) { return Json{{"re", c.real()}, {"im", c.imag()}}; }

inline Json to_json(const LinearInequality& q) {
  Json coeffs = Json::object();
  for (auto [v, c] : q.coeffs) coeffs[std::to_string(v)] = c;
  return Json{{"coeffs", coeffs}, {"rhs", q.rhs}, {"sense", q.sense == Sense::Le ? "<=" : ">="}};
}

inline LinearInequality inequality_from_json(const Json& j) {
  LinearInequality q;
  for (auto it = j.at("coeffs").begin(); it != j.at("coeffs").end(); ++it)
    q.coeffs[std::stoi(it.key())] = it.value().get<double>();
  q.rhs = j.at("rhs").get<double>();
  std::string sense = j.at("sense").get<std::string>();
  if (sense == "<=")
    q.sense = Sense::Le;
  else if (sense == ">=")
    q.sense = Sense::Ge;
  else
    throw ParseError("inequality sense must be '<=' or '>='");
  q.validate();
  return q;
}

inline SosCertificate certificate_from_json(const Json& j) {
  SosCertificate cert;
  cert.name = j.value("name", "");
  std::vector<std::string> vars = j.at("variables").get<std::vector<std::string>>();
  cert.target = Polynomial::parse(vars, j.at("target").get<std::string>());
  for (const auto& sq : j.at("squares")) {
    Rational c(sq.at("coeff").get<std::string>(), 10);
    c.canonicalize();
    cert.squares.push_back({c, Polynomial::parse(vars, sq.at("poly").get<std::string>())});
  }
  for (const auto& rel : j.at("relations"))
    cert.relations.push_back(Polynomial::parse(vars, rel.get<std::string>()));
  if (j.contains("multipliers"))
    for (const auto& m : j.at("multipliers"))
      cert.multipliers.push_back(Polynomial::parse(vars, m.get<std::string>()));
  cert.validate();
  return cert;
}

inline Json to_json(const SosCertificate& cert) {
  Json squares = Json::array();
  for (const auto& [c, s] : cert.squares)
    squares.push_back(Json{{"coeff", c.get_str()}, {"poly", s.str()}});
  Json relations = Json::array();
  for (const auto& r : cert.relations) relations.push_back(r.str());
  Json multipliers = Json::array();
  for (const auto& m : cert.multipliers) multipliers.push_back(m.str());
  return Json{{"name", cert.name},
              {"variables", cert.target.variables()},
              {"target", cert.target.str()},
              {"squares", squares},
              {"relations", relations},
              {"multipliers", multipliers}};
}

inline SosCertificate load_certificate(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open certificate file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw ParseError("invalid JSON in " + path + ": " + e.what());
  }
  try {
    return certificate_from_json(j);
  } catch (const Json::exception& e) {
    throw ParseError("bad certificate schema in " + path + ": " + e.what());
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace cutwalk

#endif
