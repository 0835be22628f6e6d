#ifndef CUTWALK_CLI_HPP
#define CUTWALK_CLI_HPP

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cutwalk/common.hpp"
#include "cutwalk/expsup.hpp"
#include "cutwalk/formulation.hpp"
#include "cutwalk/instances.hpp"
#include "cutwalk/json_io.hpp"
#include "cutwalk/mobiusagg.hpp"
#include "cutwalk/oracles.hpp"
#include "cutwalk/proof.hpp"
#include "cutwalk/walkagg.hpp"

namespace cutwalk::cli {

// Exit codes: 0 success, 1 domain/validation/verdict failure, 2 I/O or
// parse errors (including bad flags).

namespace detail {

inline Complex parse_complex(const std::string& text) {
  std::istringstream in(text);
  double re = 0.0, im = 0.0;
  char comma = 0;
  if (!(in >> re)) throw ParseError("bad complex literal '" + text + "' (want re[,im])");
  if (in >> comma) {
    if (comma != ',' || !(in >> im))
      throw ParseError("bad complex literal '" + text + "' (want re[,im])");
  }
  std::string rest;
  if (in >> rest) throw ParseError("trailing characters in complex literal '" + text + "'");
  return {re, im};
}

// grid bound token: e<int> means e^int, otherwise a plain double
inline double parse_grid_bound(const std::string& text) {
  if (!text.empty() && (text[0] == 'e' || text[0] == 'E')) {
    try {
      return std::exp(std::stod(text.substr(1)));
    } catch (const std::exception&) {
      throw ParseError("bad grid bound '" + text + "'");
    }
  }
  try {
    return std::stod(text);
  } catch (const std::exception&) {
    throw ParseError("bad grid bound '" + text + "'");
  }
}

inline std::vector<double> load_coords(const std::string& spec, std::size_t expected) {
  if (spec == "zero") return std::vector<double>(expected, 0.0);
  std::ifstream in(spec);
  if (!in) throw ParseError("cannot open coordinate file: " + spec);
  std::vector<double> out;
  double v;
  while (in >> v) out.push_back(v);
  if (out.size() != expected)
    throw ValidationError("coordinate file has " + std::to_string(out.size()) +
                          " entries, expected " + std::to_string(expected));
  return out;
}

inline void check_finite(const Json& j, const std::string& where) {
  if (j.is_number_float()) {
    double v = j.get<double>();
    if (!std::isfinite(v)) throw DomainError("non-finite value in report at " + where);
  } else if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) check_finite(it.value(), where + "." + it.key());
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      check_finite(j[i], where + "[" + std::to_string(i) + "]");
  }
}

inline std::uint64_t default_seed() {
  if (const char* env = std::getenv("CUTWALK_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ValidationError("CUTWALK_SEED is not an unsigned integer");
    }
  }
  return 20140101;
}

struct Emitter {
  std::string out_path;  // empty: stdout
  bool no_timestamp = false;

  void emit_json(Json report, const Json& config, std::ostream& stdout_stream) const {
    report["artifact"] = Json{{"name", "cutwalk"}, {"version", kVersion}};
    report["config"] = config;
    if (!no_timestamp) {
      auto now = std::chrono::system_clock::now();
      report["timestamp"] =
          static_cast<long long>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                     now.time_since_epoch())
                                     .count());
    }
    check_finite(report, "$");
    std::string text = report.dump(2) + "\n";
    write(text, stdout_stream);
  }

  void emit_text(const std::string& text, std::ostream& stdout_stream) const {
    write(text, stdout_stream);
  }

private:
  void write(const std::string& text, std::ostream& stdout_stream) const {
    if (out_path.empty()) {
      stdout_stream << text;
      return;
    }
    std::ofstream out(out_path);
    if (!out) throw ParseError("cannot open output file: " + out_path);
    out << text;
  }
};

inline Json inequality_report(const LinearInequality& q) { return to_json(q); }

}  // namespace detail

/// Run the command line given argv-style arguments (excluding the program
/// name). Output goes to `out`, diagnostics to `err`; returns the exit code.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"cutwalk: closed-form aggregation of exponentially many cutting planes"};
  app.require_subcommand(1);
  app.fallthrough();  // --out/--seed/--no-timestamp may follow the subcommand

  detail::Emitter emitter;
  app.add_option("--out", emitter.out_path, "write the report to a file instead of stdout");
  app.add_flag("--no-timestamp", emitter.no_timestamp, "omit the timestamp field");
  std::uint64_t seed = detail::default_seed();
  app.add_option("--seed", seed, "seed for sampled computations");

  // ---- mis-potential ------------------------------------------------------
  auto* mis = app.add_subcommand("mis-potential",
                                 "walk aggregate of all odd-cycle inequalities of a graph");
  std::string mis_graph;
  std::vector<std::string> mis_z{"1,0"};
  std::string mis_w = "zero";
  bool mis_grad = false, mis_hess = false, mis_emit_matrix = false;
  mis->add_option("graph", mis_graph, "DIMACS edge-format file")->required();
  mis->add_option("--z", mis_z, "rate(s) re[,im]");
  mis->add_option("--w", mis_w, "interior point file or 'zero'");
  mis->add_flag("--grad", mis_grad, "include the gradient");
  mis->add_flag("--hess", mis_hess, "include the Hessian");
  mis->add_flag("--emit-matrix", mis_emit_matrix, "include the aggregated walk matrix B");

  // ---- sat-potential ------------------------------------------------------
  auto* sat = app.add_subcommand("sat-potential",
                                 "mobius-cycle aggregate of a 3-SAT formula");
  std::string sat_cnf;
  std::vector<std::string> sat_z{"1,0"};
  std::string sat_x = "zero";
  sat->add_option("formula", sat_cnf, "DIMACS CNF file")->required();
  sat->add_option("--z", sat_z, "rate(s) re[,im]");
  sat->add_option("--x", sat_x, "interior point file or 'zero'");

  // ---- verify-cert --------------------------------------------------------
  auto* verify = app.add_subcommand("verify-cert", "check a sums-of-squares certificate");
  std::string cert_path, strategy = "exact";
  double tol = 1e-9;
  verify->add_option("certificate", cert_path, "certificate JSON file")->required();
  verify->add_option("--strategy", strategy, "exact | numeric")
      ->check(CLI::IsMember({"exact", "numeric"}));
  verify->add_option("--tol", tol, "numeric tolerance");

  // ---- approx-recip -------------------------------------------------------
  auto* recip = app.add_subcommand("approx-recip",
                                   "exponential-sum approximation of the kernel 1/s");
  double recip_a = 0.5;
  int recip_m = 2, recip_M = 60, recip_points = 200;
  std::string sweep;
  recip->add_option("--a", recip_a, "quadrature spacing");
  recip->add_option("--m", recip_m, "window bound toward large rates");
  recip->add_option("--M", recip_M, "window bound toward small rates");
  recip->add_option("--sweep", sweep, "log grid lo:hi, bounds like e-30 or 2.5");
  recip->add_option("--points", recip_points, "sweep grid size");

  // ---- oracle -------------------------------------------------------------
  auto* oracle = app.add_subcommand("oracle", "brute-force reference computations");
  oracle->require_subcommand(1);

  auto* owalks = oracle->add_subcommand("walks", "enumerate walks and their kernel sum");
  std::string ow_graph;
  std::vector<std::string> ow_z{"1,0"};
  std::string ow_w = "zero";
  int ow_l = 3, ow_from = 0, ow_to = 0;
  bool ow_closed = false;
  owalks->add_option("graph", ow_graph)->required();
  owalks->add_option("--z", ow_z);
  owalks->add_option("--w", ow_w);
  owalks->add_option("--l", ow_l, "walk length");
  owalks->add_option("--from", ow_from);
  owalks->add_option("--to", ow_to);
  owalks->add_flag("--closed", ow_closed, "closed walks over all roots");

  auto* ocycles = oracle->add_subcommand("odd-cycles", "enumerate simple odd cycles");
  std::string oc_graph;
  int oc_maxlen = 11;
  ocycles->add_option("graph", oc_graph)->required();
  ocycles->add_option("--max-len", oc_maxlen);

  auto* omobius = oracle->add_subcommand("mobius-walks", "closing-walk sum of a formula");
  std::string om_cnf;
  std::vector<std::string> om_z{"1,0"};
  std::string om_x = "zero";
  int om_kmax = 0;
  omobius->add_option("formula", om_cnf)->required();
  omobius->add_option("--z", om_z);
  omobius->add_option("--x", om_x);
  omobius->add_option("--kmax", om_kmax, "walk length bound (default: clause count)");

  auto* ochains = oracle->add_subcommand("mobius-chains", "distinct mobius cycles of a formula");
  std::string och_cnf;
  std::vector<std::string> och_z{"1,0"};
  std::string och_x = "zero";
  ochains->add_option("formula", och_cnf)->required();
  ochains->add_option("--z", och_z);
  ochains->add_option("--x", och_x);

  auto* oassign = oracle->add_subcommand("assignments", "exhaustive +-1 scan of a formula");
  std::string oa_cnf;
  oassign->add_option("formula", oa_cnf)->required();

  auto* osphere = oracle->add_subcommand("sphere-sample", "seeded unit-sphere points");
  int os_n = 3, os_count = 10;
  osphere->add_option("--n", os_n);
  osphere->add_option("--count", os_count);

  // ---- lift-ineq ----------------------------------------------------------
  auto* lift = app.add_subcommand("lift-ineq",
                                  "transport an inequality along an odd subdivision");
  std::string lift_ineq_path, lift_map_path;
  lift->add_option("inequality", lift_ineq_path, "inequality JSON file")->required();
  lift->add_option("subdivision", lift_map_path, "subdivision JSON file")->required();

  // ---- classify-chain -----------------------------------------------------
  auto* chain = app.add_subcommand("classify-chain",
                                   "classify a clause sequence as path/cycle/mobius");
  std::string chain_cnf;
  chain->add_option("formula", chain_cnf, "DIMACS CNF file, clauses in chain order")->required();

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    Json config{{"seed", seed}};

    if (mis->parsed()) {
      Graph g = parse_graph(read_text_file(mis_graph));
      InteriorPoint w(detail::load_coords(mis_w, static_cast<std::size_t>(g.n())));
      DerivativeLevel level = mis_hess   ? DerivativeLevel::Hessian
                              : mis_grad ? DerivativeLevel::Gradient
                                         : DerivativeLevel::None;
      config["command"] = "mis-potential";
      config["graph"] = mis_graph;
      config["w"] = mis_w;
      config["z"] = mis_z;
      config["derivatives"] = mis_hess ? "hessian" : (mis_grad ? "gradient" : "none");
      Json results = Json::array();
      for (const auto& ztext : mis_z) {
        Complex z = detail::parse_complex(ztext);
        auto rep = walk_potential(g, z, w, level);
        Json r{{"z", to_json(z)},
               {"k_max", rep.k_max},
               {"psi", to_json(rep.psi)},
               {"psi_tilde", to_json(rep.psi_tilde)}};
        Json psil = Json::object();
        for (auto [l, v] : rep.psi_l) psil[std::to_string(l)] = to_json(v);
        r["psi_l"] = psil;
        if (rep.gradient) {
          Json grad = Json::array();
          for (Eigen::Index i = 0; i < rep.gradient->size(); ++i)
            grad.push_back(to_json((*rep.gradient)(i)));
          r["gradient"] = grad;
        }
        if (rep.hessian) {
          Json hess = Json::array();
          for (Eigen::Index i = 0; i < rep.hessian->rows(); ++i) {
            Json row = Json::array();
            for (Eigen::Index j = 0; j < rep.hessian->cols(); ++j)
              row.push_back(to_json((*rep.hessian)(i, j)));
            hess.push_back(row);
          }
          r["hessian"] = hess;
        }
        if (mis_emit_matrix) {
          Json b = Json::array();
          for (Eigen::Index i = 0; i < rep.B.rows(); ++i) {
            Json row = Json::array();
            for (Eigen::Index j = 0; j < rep.B.cols(); ++j) row.push_back(to_json(rep.B(i, j)));
            b.push_back(row);
          }
          r["B"] = b;
        }
        results.push_back(std::move(r));
      }
      emitter.emit_json(Json{{"results", results}}, config, out);
      return 0;
    }

    if (sat->parsed()) {
      CnfFormula f = parse_cnf(read_text_file(sat_cnf));
      InteriorPoint x(detail::load_coords(sat_x, static_cast<std::size_t>(f.n())));
      config["command"] = "sat-potential";
      config["formula"] = sat_cnf;
      config["x"] = sat_x;
      config["z"] = sat_z;
      Json results = Json::array();
      for (const auto& ztext : sat_z) {
        Complex z = detail::parse_complex(ztext);
        auto rep = mobius_potential(f, z, x);
        results.push_back(Json{{"z", to_json(z)},
                               {"phi", to_json(rep.phi)},
                               {"k_max", rep.k_max},
                               {"nodes", 2 * f.n()}});
      }
      emitter.emit_json(
          Json{{"results", results}, {"lp_sufficient", lp_sufficiency_flag(f)}}, config, out);
      return 0;
    }

    if (verify->parsed()) {
      SosCertificate cert = load_certificate(cert_path);
      config["command"] = "verify-cert";
      config["certificate"] = cert_path;
      config["strategy"] = strategy;
      config["tol"] = tol;
      SosOptions opts;
      opts.tolerance = tol;
      opts.seed = seed;
      auto rep = verify_sos_certificate(
          cert, strategy == "exact" ? SosStrategy::ExactSphere : SosStrategy::NumericSample, opts);
      Json r{{"name", cert.name},
             {"accepted", rep.accepted},
             {"strategy_used", rep.strategy_used == SosStrategy::ExactSphere ? "exact" : "numeric"},
             {"exact_zero", rep.exact_zero}};
      if (rep.strategy_used == SosStrategy::ExactSphere)
        r["reduced_residual"] = rep.reduced_residual.str();
      else {
        r["max_abs_residual"] = rep.max_abs_numeric;
        r["samples"] = rep.sample_count;
      }
      if (!rep.warning.empty()) r["warning"] = rep.warning;
      emitter.emit_json(Json{{"result", r}}, config, out);
      return rep.accepted ? 0 : 1;
    }

    if (recip->parsed()) {
      auto sup = reciprocal_superposition(recip_a, recip_m, recip_M);
      std::ostringstream csv;
      csv << "# cutwalk " << kVersion << " approx-recip a=" << recip_a << " m=" << recip_m
          << " M=" << recip_M << "\n";
      csv << std::setprecision(17);
      if (sweep.empty()) {
        csv << "i,lambda,coefficient\n";
        for (std::size_t t = 0; t < sup.terms.size(); ++t) {
          long i = static_cast<long>(t) - recip_m;
          csv << i << "," << sup.terms[t].rate.real() << "," << sup.terms[t].coefficient.real()
              << "\n";
        }
      } else {
        auto colon = sweep.find(':');
        if (colon == std::string::npos) throw ParseError("sweep wants lo:hi");
        double lo = detail::parse_grid_bound(sweep.substr(0, colon));
        double hi = detail::parse_grid_bound(sweep.substr(colon + 1));
        if (!(lo > 0.0) || !(hi > lo)) throw ValidationError("sweep bounds must satisfy 0 < lo < hi");
        if (recip_points < 2) throw ValidationError("sweep needs at least 2 points");
        csv << "s,approx,exact,rel_err\n";
        for (int i = 0; i < recip_points; ++i) {
          double t = static_cast<double>(i) / (recip_points - 1);
          double s = std::exp(std::log(lo) * (1.0 - t) + std::log(hi) * t);
          double approx = sup.evaluate_real(s);
          double exact = 1.0 / s;
          csv << s << "," << approx << "," << exact << "," << std::abs(approx - exact) / exact
              << "\n";
        }
      }
      emitter.emit_text(csv.str(), out);
      return 0;
    }

    if (oracle->parsed()) {
      if (owalks->parsed()) {
        Graph g = parse_graph(read_text_file(ow_graph));
        std::vector<double> w = detail::load_coords(ow_w, static_cast<std::size_t>(g.n()));
        config["command"] = "oracle walks";
        Json results = Json::array();
        for (const auto& ztext : ow_z) {
          Complex z = detail::parse_complex(ztext);
          std::vector<oracles::WalkRecord> records;
          if (ow_closed)
            records = oracles::enumerate_closed_walks(g, z, w, ow_l);
          else {
            if (ow_from < 1 || ow_to < 1)
              throw ValidationError("walks need --from and --to, or --closed");
            records = oracles::enumerate_walks(g, z, w, ow_l, ow_from, ow_to);
          }
          results.push_back(Json{{"z", to_json(z)},
                                 {"count", records.size()},
                                 {"kernel_sum", to_json(oracles::walk_sum(records))}});
        }
        emitter.emit_json(Json{{"results", results}}, config, out);
        return 0;
      }
      if (ocycles->parsed()) {
        Graph g = parse_graph(read_text_file(oc_graph));
        config["command"] = "oracle odd-cycles";
        auto cycles = oracles::enumerate_odd_cycles(g, oc_maxlen);
        Json arr = Json::array();
        for (const auto& c : cycles) arr.push_back(c);
        emitter.emit_json(Json{{"count", cycles.size()}, {"cycles", arr}}, config, out);
        return 0;
      }
      if (omobius->parsed()) {
        CnfFormula f = parse_cnf(read_text_file(om_cnf));
        std::vector<double> x = detail::load_coords(om_x, static_cast<std::size_t>(f.n()));
        int kmax = om_kmax > 0 ? om_kmax : static_cast<int>(f.clause_count());
        config["command"] = "oracle mobius-walks";
        Json results = Json::array();
        for (const auto& ztext : om_z) {
          Complex z = detail::parse_complex(ztext);
          results.push_back(Json{{"z", to_json(z)},
                                 {"phi", to_json(oracles::enumerate_mobius_walks(f, z, x, kmax))}});
        }
        emitter.emit_json(Json{{"results", results}}, config, out);
        return 0;
      }
      if (ochains->parsed()) {
        CnfFormula f = parse_cnf(read_text_file(och_cnf));
        std::vector<double> x = detail::load_coords(och_x, static_cast<std::size_t>(f.n()));
        config["command"] = "oracle mobius-chains";
        auto chains = oracles::enumerate_mobius_chains(f);
        Json arr = Json::array();
        for (const auto& rec : chains) {
          Json idx = Json::array();
          for (auto i : rec.clause_indices) idx.push_back(i);
          arr.push_back(Json{{"clauses", idx},
                             {"l1", rec.l1},
                             {"even_literals", rec.even_lits},
                             {"sharper_slack_at_x", rec.sharper_slack(x)}});
        }
        Json results = Json::array();
        for (const auto& ztext : och_z) {
          Complex z = detail::parse_complex(ztext);
          results.push_back(
              Json{{"z", to_json(z)}, {"chain_sum", to_json(oracles::mobius_chain_sum(f, z, x))}});
        }
        emitter.emit_json(Json{{"count", chains.size()}, {"chains", arr}, {"results", results}},
                          config, out);
        return 0;
      }
      if (oassign->parsed()) {
        CnfFormula f = parse_cnf(read_text_file(oa_cnf));
        config["command"] = "oracle assignments";
        auto scan = oracles::enumerate_assignments(f);
        emitter.emit_json(Json{{"satisfiable", scan.satisfiable},
                               {"min_f", scan.min_f},
                               {"argmin", scan.argmin}},
                          config, out);
        return 0;
      }
      if (osphere->parsed()) {
        config["command"] = "oracle sphere-sample";
        if (os_n < 1 || os_count < 1) throw ValidationError("need n >= 1 and count >= 1");
        auto pts = oracles::sphere_sample(static_cast<std::size_t>(os_n),
                                          static_cast<std::size_t>(os_count), seed);
        Json arr = Json::array();
        for (const auto& p : pts) arr.push_back(p);
        emitter.emit_json(Json{{"points", arr}}, config, out);
        return 0;
      }
    }

    if (lift->parsed()) {
      Json jq = Json::parse(read_text_file(lift_ineq_path));
      LinearInequality q = inequality_from_json(jq);
      Json jm = Json::parse(read_text_file(lift_map_path));
      SubdivisionMap map;
      std::vector<std::pair<int, int>> edges;
      for (const auto& e : jm.at("base").at("edges"))
        edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
      map.base = Graph(jm.at("base").at("n").get<int>(), edges);
      if (jm.contains("paths"))
        for (const auto& p : jm.at("paths")) {
          int i = p.at("edge").at(0).get<int>(), j = p.at("edge").at(1).get<int>();
          if (i > j) std::swap(i, j);
          map.paths[{i, j}] = p.at("interior").get<std::vector<int>>();
        }
      config["command"] = "lift-ineq";
      auto lifted = lift_inequality_by_subdivision(q, map);
      emitter.emit_json(Json{{"base", to_json(q)},
                             {"lifted", to_json(lifted)},
                             {"subdivided_n", map.apply().n()}},
                        config, out);
      return 0;
    }

    if (chain->parsed()) {
      CnfFormula f = parse_cnf(read_text_file(chain_cnf));
      config["command"] = "classify-chain";
      auto cls = classify_chain(f.clauses());
      const char* kind = cls.kind == ChainKind::OpenPath        ? "open-path"
                         : cls.kind == ChainKind::OrdinaryCycle ? "ordinary-cycle"
                         : cls.kind == ChainKind::MobiusCycle   ? "mobius-cycle"
                                                                : "invalid";
      Json r{{"kind", kind}};
      if (cls.kind == ChainKind::Invalid) r["reason"] = cls.reason;
      if (cls.kind == ChainKind::MobiusCycle) {
        r["l1"] = cls.l1;
        r["sharper_inequality"] = to_json(mobius_sharper_inequality(cls));
        r["implied_inequality"] = to_json(mobius_implied_inequality(cls));
      }
      emitter.emit_json(Json{{"result", r}}, config, out);
      return 0;
    }

    err << "no subcommand selected\n";
    return 2;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const Json::exception& e) {
    err << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return 1;
  } catch (const GuardError& e) {
    err << "size guard: " << e.what() << "\n";
    return 1;
  } catch (const UnsupportedError& e) {
    err << "unsupported: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace cutwalk::cli

#endif
