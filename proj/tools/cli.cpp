#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "conangle/angles.hpp"
#include "conangle/corpus.hpp"
#include "conangle/cyclic.hpp"
#include "conangle/error.hpp"
#include "conangle/projection.hpp"
#include "conangle/scene.hpp"
#include "conangle/theorems.hpp"

namespace conangle::cli {

namespace {

using json = nlohmann::ordered_json;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v == 0.0 ? 0.0 : v);
  return buf;
}

std::string full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
  return buf;
}

json to_json(const Point& p) {
  json a = json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) a.push_back(p(i) == 0.0 ? 0.0 : p(i));
  return a;
}

template <class T>
json opt_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

void row(std::ostream& out, const std::string& key, const std::string& value) {
  out << "  " << key;
  for (std::size_t i = key.size(); i < 24; ++i) out << ' ';
  out << value << '\n';
}

int exit_code(Errc code) {
  switch (code) {
    case Errc::parse_error:
    case Errc::zero_direction:
    case Errc::dimension_mismatch:
    case Errc::invalid_argument:
    case Errc::sign_condition_violated:
      return kParse;
    case Errc::resolve_error:
      return kResolve;
    case Errc::iteration_limit:
    case Errc::identity_not_applicable:
    case Errc::witness_not_found:
    case Errc::dichotomy_failure:
    case Errc::insufficient_data:
      return kNumeric;
    case Errc::unsupported_dimension:
      return kUnsupportedDim;
    case Errc::hypothesis_violated:
      return kHypothesis;
  }
  return kNumeric;
}

// A scene point name, or a literal "a,b,c".
Point resolve_point(const Scene& scene, const std::string& text) {
  if (scene.points.count(text)) return scene.points.at(text);
  std::vector<double> coords;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find(',', pos), text.size());
    std::string part = text.substr(pos, end - pos);
    while (!part.empty() && part.front() == ' ') part.erase(part.begin());
    while (!part.empty() && part.back() == ' ') part.pop_back();
    double v = 0.0;
    const auto res = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || res.ec != std::errc() || res.ptr != part.data() + part.size()) {
      throw Error(Errc::resolve_error, "unknown point '" + text + "'");
    }
    coords.push_back(v);
    pos = end + 1;
  }
  Point p = make_point(std::span<const double>(coords));
  if (p.size() != scene.dim) {
    throw Error(Errc::dimension_mismatch, "point '" + text + "' has dimension " + std::to_string(p.size()) +
                                               ", scene has " + std::to_string(scene.dim));
  }
  return p;
}

void emit(std::ostream& out, const std::string& command, json inputs, json result) {
  json env;
  env["command"] = command;
  env["inputs"] = std::move(inputs);
  env["result"] = std::move(result);
  out << env.dump(2) << '\n';
}

json angle_json(const AngleReport& r) {
  json j;
  j["value"] = r.value;
  j["kind"] = to_string(r.kind);
  j["method"] = to_string(r.method);
  j["iterations"] = r.iterations;
  j["degenerate"] = r.degenerate;
  j["pair"] = r.pair ? json::array({to_json(r.pair->first), to_json(r.pair->second)}) : json(nullptr);
  j["beta"] = opt_json(r.beta);
  j["gamma"] = opt_json(r.gamma);
  return j;
}

void angle_table(std::ostream& out, const AngleReport& r) {
  row(out, "value", num(r.value));
  row(out, "method", to_string(r.method));
  row(out, "iterations", std::to_string(r.iterations));
  if (r.degenerate) row(out, "degenerate", "yes");
  if (r.pair) {
    row(out, "x", format_point(r.pair->first, 10));
    row(out, "y", format_point(r.pair->second, 10));
  }
  if (r.beta) row(out, "beta", num(*r.beta));
  if (r.gamma) row(out, "gamma", num(*r.gamma));
}

struct Common {
  std::string scene_path;
  std::string a;
  std::string b;
  bool as_json = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("scene", c.scene_path, "scene JSON file")->required();
  sub->add_option("cone1", c.a, "first cone name")->required();
  sub->add_option("cone2", c.b, "second cone name")->required();
}

json common_inputs(const Common& c) {
  json j;
  j["scene"] = c.scene_path;
  j["cone1"] = c.a;
  j["cone2"] = c.b;
  return j;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Angles between convex cones: projections, minimal angles, closedness checks, cyclic projections."};
  app.name("conangle");
  app.require_subcommand(1);

  std::function<int()> action;
  ToleranceConfig cfg;

  // project
  std::string p_scene, p_cone, p_point;
  bool p_json = false;
  auto* project_cmd = app.add_subcommand("project", "project a point onto a cone");
  project_cmd->add_option("scene", p_scene, "scene JSON file")->required();
  project_cmd->add_option("cone", p_cone, "cone name")->required();
  project_cmd->add_option("point", p_point, "point name or comma list")->required();
  project_cmd->add_flag("--json", p_json, "JSON output");
  project_cmd->callback([&] {
    action = [&]() {
      const Scene s = load_scene(p_scene);
      const ConeExpr& k = s.cone(p_cone);
      const Point x = resolve_point(s, p_point);
      const Point p = project(k, x, cfg);
      const double d = (x - p).norm();
      const ProjectionCertificate cert = certify_projection(k, x, p, cfg);
      if (p_json) {
        json in{{"scene", p_scene}, {"cone", p_cone}, {"point", to_json(x)}};
        json res{{"projection", to_json(p)},
                 {"distance", d},
                 {"certificate",
                  {{"membership_residual", cert.membership_residual},
                   {"orthogonality_residual", cert.orthogonality_residual},
                   {"polar_residual", cert.polar_residual},
                   {"passed", cert.passed}}}};
        emit(out, "project", in, res);
      } else {
        out << "project " << format_point(x, 10) << " onto " << p_cone << '\n';
        row(out, "projection", format_point(p, 10));
        row(out, "distance", num(d));
        row(out, "membership_residual", num(cert.membership_residual));
        row(out, "orthogonality_residual", num(cert.orthogonality_residual));
        row(out, "polar_residual", num(cert.polar_residual));
        row(out, "certificate", cert.passed ? "pass" : "fail");
      }
      return kOk;
    };
  });

  // angle
  Common ang;
  std::string ang_kind = "c0";
  bool ang_oracle = false;
  int ang_resolution = 400;
  auto* angle_cmd = app.add_subcommand("angle", "minimal angle c0, angle c, or the beta / gamma identities");
  add_common(angle_cmd, ang);
  angle_cmd->add_option("kind", ang_kind, "c0 | c | beta | gamma")
      ->check(CLI::IsMember({"c0", "c", "beta", "gamma"}))
      ->capture_default_str();
  angle_cmd->add_flag("--oracle", ang_oracle, "also run the sphere-grid oracle (dim <= 4)");
  angle_cmd->add_option("--resolution", ang_resolution, "oracle grid resolution")
      ->check(CLI::Range(8, 100000))
      ->capture_default_str();
  angle_cmd->add_option("--starts", cfg.multistarts, "random starts of the power iteration")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  angle_cmd->add_option("--seed", cfg.rng_seed, "random seed")->capture_default_str();
  angle_cmd->add_flag("--json", ang.as_json, "JSON output");
  angle_cmd->callback([&] {
    action = [&]() {
      const Scene s = load_scene(ang.scene_path);
      const ConeExpr& k1 = s.cone(ang.a);
      const ConeExpr& k2 = s.cone(ang.b);
      if (ang_oracle && s.dim > 4) {
        throw Error(Errc::unsupported_dimension, "the oracle supports dim <= 4, got " + std::to_string(s.dim));
      }
      json in = common_inputs(ang);
      in["kind"] = ang_kind;
      in["oracle"] = ang_oracle;
      in["resolution"] = ang_resolution;
      in["starts"] = cfg.multistarts;
      in["seed"] = cfg.rng_seed;

      if (ang_kind == "beta" || ang_kind == "gamma") {
        const IdentityEstimate e = ang_kind == "beta" ? beta(k1, k2, cfg, ang_oracle ? ang_resolution : 0)
                                                      : gamma(k1, k2, cfg, ang_oracle ? ang_resolution : 0);
        if (ang.as_json) {
          json res{{"value", e.value}, {"c0", e.c0}, {"sampled", opt_json(e.sampled)},
                   {"deviation", opt_json(e.deviation)}};
          emit(out, "angle", in, res);
        } else {
          out << ang_kind << '(' << ang.a << ", " << ang.b << ")\n";
          row(out, "value", num(e.value));
          row(out, "c0", num(e.c0));
          if (ang_oracle) row(out, "sampled", e.sampled ? num(*e.sampled) : "n/a");
          if (e.deviation) row(out, "deviation", num(*e.deviation));
        }
        return kOk;
      }

      const bool want_c = ang_kind == "c";
      const AngleReport r = want_c ? c_angle(k1, k2, cfg) : c0(k1, k2, cfg);
      std::optional<SphereSweep> sweep;
      if (ang_oracle) {
        if (want_c) {
          const ConeExpr e = polar(intersect({k1, k2}));
          sweep = sphere_sweep(intersect({k1, e}), intersect({k2, e}), ang_resolution, cfg);
        } else {
          sweep = sphere_sweep(k1, k2, ang_resolution, cfg);
        }
      }
      if (ang.as_json) {
        json res = angle_json(r);
        if (sweep) {
          res["oracle"] = {{"value", sweep->c0},
                           {"deviation", std::abs(sweep->c0 - r.value)},
                           {"grid_size", sweep->grid_size}};
        }
        emit(out, "angle", in, res);
      } else {
        out << ang_kind << '(' << ang.a << ", " << ang.b << ")\n";
        angle_table(out, r);
        if (sweep) {
          row(out, "oracle", num(sweep->c0));
          row(out, "oracle_deviation", num(std::abs(sweep->c0 - r.value)));
          row(out, "oracle_grid", std::to_string(sweep->grid_size));
        }
      }
      return kOk;
    };
  });

  // principal
  Common pr;
  auto* principal_cmd = app.add_subcommand("principal", "principal vectors of c0 with their certificate");
  add_common(principal_cmd, pr);
  principal_cmd->add_option("--starts", cfg.multistarts, "random starts")->check(CLI::PositiveNumber);
  principal_cmd->add_option("--seed", cfg.rng_seed, "random seed");
  principal_cmd->add_flag("--json", pr.as_json, "JSON output");
  principal_cmd->callback([&] {
    action = [&]() {
      const Scene s = load_scene(pr.scene_path);
      const AngleReport r = principal_vectors(s.cone(pr.a), s.cone(pr.b), cfg);
      const PrincipalCertificate& cert = *r.certificate;
      if (pr.as_json) {
        json res = angle_json(r);
        res["certificate"] = {{"polar_residual_1", cert.polar_residual_1},
                              {"polar_residual_2", cert.polar_residual_2},
                              {"projection_identity_residuals", cert.projection_identity_residuals},
                              {"boundary_violations", cert.boundary_violations},
                              {"passed", cert.passed}};
        emit(out, "principal", common_inputs(pr), res);
      } else {
        out << "principal(" << pr.a << ", " << pr.b << ")\n";
        angle_table(out, r);
        row(out, "polar_residual_1", num(cert.polar_residual_1));
        row(out, "polar_residual_2", num(cert.polar_residual_2));
        double worst = 0.0;
        for (double v : cert.projection_identity_residuals) worst = std::max(worst, v);
        row(out, "identity_residual_max", num(worst));
        row(out, "boundary_violations", std::to_string(cert.boundary_violations));
        row(out, "certificate", cert.passed ? "pass" : "fail");
      }
      return kOk;
    };
  });

  // check
  Common ck;
  std::string ck_which;
  auto* check_cmd = app.add_subcommand("check", "closedness, dichotomy, polar-witness or trivial");
  check_cmd->add_option("which", ck_which, "closedness | dichotomy | polar-witness | trivial")
      ->required()
      ->check(CLI::IsMember({"closedness", "dichotomy", "polar-witness", "trivial"}));
  add_common(check_cmd, ck);
  check_cmd->add_flag("--json", ck.as_json, "JSON output");
  check_cmd->callback([&] {
    action = [&]() {
      const Scene s = load_scene(ck.scene_path);
      const ConeExpr& k1 = s.cone(ck.a);
      const ConeExpr& k2 = s.cone(ck.b);
      json in = common_inputs(ck);
      in["check"] = ck_which;
      json res;
      if (!ck.as_json) out << ck_which << '(' << ck.a << ", " << ck.b << ")\n";

      if (ck_which == "closedness") {
        const ClosednessReport r = check_sum_closedness(k1, k2, cfg);
        json conds = json::array();
        for (const ConditionReport& c : r.conditions) {
          conds.push_back({{"condition_id", to_string(c.condition_id)},
                           {"holds", c.holds},
                           {"numeric_value", std::isfinite(c.numeric_value) ? json(c.numeric_value) : json("inf")}});
          if (!ck.as_json) {
            row(out, to_string(c.condition_id),
                std::string(c.holds ? "true " : "false") + "  " + num(c.numeric_value));
          }
        }
        res = {{"conditions", conds}, {"conclusion_sum_closed", r.conclusion_sum_closed}, {"consistent", r.consistent}};
        if (!ck.as_json) {
          row(out, "sum_closed", r.conclusion_sum_closed ? "certified" : "not certified");
          row(out, "consistent", r.consistent ? "yes" : "no");
        }
      } else if (ck_which == "dichotomy") {
        const DichotomyResult r = dichotomy_check(k1, k2, cfg);
        res = {{"branch", to_string(r.branch)}, {"value", r.value}, {"witness", to_json(r.witness)}};
        if (!ck.as_json) {
          row(out, "branch", to_string(r.branch));
          row(out, "value", num(r.value));
          row(out, "witness", format_point(r.witness, 10));
        }
      } else if (ck_which == "polar-witness") {
        const PolarWitness w = polar_intersection_witness(k1, k2, cfg);
        res = {{"w1", to_json(w.w1)}, {"w2", to_json(w.w2)}};
        if (!ck.as_json) {
          row(out, "w1 (K1^o cap K2^+)", format_point(w.w1, 10));
          row(out, "w2 (K1^+ cap K2^o)", format_point(w.w2, 10));
        }
      } else {
        const TrivialityResult r = check_trivial_intersection(k1, k2, cfg);
        res = {{"trivial", r.trivial}, {"c0", r.c0}, {"witness", r.witness ? to_json(*r.witness) : json(nullptr)}};
        if (!ck.as_json) {
          row(out, "trivial", r.trivial ? "true" : "false");
          row(out, "c0", num(r.c0));
          if (r.witness) row(out, "witness", format_point(*r.witness, 10));
        }
      }
      if (ck.as_json) emit(out, "check", in, res);
      return kOk;
    };
  });

  // cyclic
  Common cy;
  std::string cy_x0, cy_anchor, cy_csv;
  double cy_tol = cfg.tol_iter;
  auto* cyclic_cmd = app.add_subcommand("cyclic", "cyclic projections x <- P_D P_C x");
  add_common(cyclic_cmd, cy);
  cyclic_cmd->add_option("x0", cy_x0, "start point name or comma list")->required();
  cyclic_cmd->add_option("--anchor", cy_anchor, "common translation of both cones");
  cyclic_cmd->add_option("--max-iters", cfg.max_iters, "iteration cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cyclic_cmd->add_option("--tol", cy_tol, "stop when the error drops below this")
      ->check(CLI::Range(1e-300, 0.5))
      ->capture_default_str();
  cyclic_cmd->add_option("--csv", cy_csv, "write the trace as CSV");
  cyclic_cmd->add_flag("--json", cy.as_json, "JSON output");
  cyclic_cmd->callback([&] {
    action = [&]() {
      const Scene s = load_scene(cy.scene_path);
      const ConeExpr& k1 = s.cone(cy.a);
      const ConeExpr& k2 = s.cone(cy.b);
      const Point x0 = resolve_point(s, cy_x0);
      const Point anchor = cy_anchor.empty() ? Point(Point::Zero(s.dim)) : resolve_point(s, cy_anchor);
      cfg.tol_iter = cy_tol;
      cfg.tol_zero = std::min(cfg.tol_zero, cy_tol);
      cfg.tol_feas = std::max(cfg.tol_feas, cy_tol);

      const Trace t = run_cyclic({k1, anchor}, {k2, anchor}, x0, cfg);
      const double g = theoretical_rate(k1, k2, cfg);
      const std::vector<double> ratios = t.ratios();
      double max_ratio = 0.0;
      for (double r : ratios) max_ratio = std::max(max_ratio, r);
      std::optional<double> est;
      try {
        est = estimate_rate(t, cfg.tol_zero);
      } catch (const Error& e) {
        if (e.code() != Errc::insufficient_data) throw;
      }

      if (!cy_csv.empty()) {
        std::ofstream f(cy_csv);
        if (!f) throw Error(Errc::invalid_argument, "cannot write '" + cy_csv + "'");
        f << 'k';
        for (int i = 1; i <= s.dim; ++i) f << ",x" << i;
        f << ",err,ratio\n";
        for (std::size_t k = 0; k < t.iterates.size(); ++k) {
          f << k;
          for (Eigen::Index i = 0; i < s.dim; ++i) f << ',' << full(t.iterates[k](i));
          f << ',' << full(t.errors[k]) << ',';
          if (k > 0) f << full(ratios[k - 1]);
          f << '\n';
        }
      }

      if (cy.as_json) {
        json in = common_inputs(cy);
        in["x0"] = to_json(x0);
        in["anchor"] = to_json(anchor);
        in["max_iters"] = cfg.max_iters;
        in["tol"] = cy_tol;
        in["csv"] = cy_csv.empty() ? json(nullptr) : json(cy_csv);
        json res{{"iterations", t.iterations()},
                 {"converged", t.converged},
                 {"monotone", t.monotone},
                 {"final_error", t.errors.back()},
                 {"limit_estimate", to_json(t.limit_estimate)},
                 {"gamma", g},
                 {"rate_bound", g * g},
                 {"estimated_rate", opt_json(est)},
                 {"max_ratio", max_ratio}};
        emit(out, "cyclic", in, res);
      } else {
        out << "cyclic(" << cy.a << ", " << cy.b << ") from " << format_point(x0, 10) << '\n';
        row(out, "iterations", std::to_string(t.iterations()));
        row(out, "converged", t.converged ? "yes" : "no");
        row(out, "monotone", t.monotone ? "yes" : "no");
        row(out, "final_error", num(t.errors.back()));
        row(out, "limit_estimate", format_point(t.limit_estimate, 10));
        row(out, "gamma", num(g));
        row(out, "rate_bound", num(g * g));
        row(out, "estimated_rate", est ? num(*est) : "n/a");
        row(out, "max_ratio", num(max_ratio));
      }
      return kOk;
    };
  });

  // corpus
  bool co_json = false, co_dump = false;
  std::string co_file;
  auto* corpus_cmd = app.add_subcommand("corpus", "check the worked examples against their stated values");
  corpus_cmd->add_flag("--json", co_json, "JSON results array");
  corpus_cmd->add_option("--file", co_file, "corpus JSON file instead of the built-in one");
  corpus_cmd->add_flag("--dump", co_dump, "print the built-in corpus JSON and exit");
  corpus_cmd->callback([&] {
    action = [&]() {
      if (co_dump) {
        out << builtin_corpus_json() << '\n';
        return kOk;
      }
      std::vector<CorpusCase> cases;
      if (co_file.empty()) {
        cases = builtin_corpus();
      } else {
        std::ifstream f(co_file);
        if (!f) throw Error(Errc::parse_error, "cannot read '" + co_file + "'");
        cases = parse_corpus(std::string(std::istreambuf_iterator<char>(f), {}));
      }
      const std::vector<ExpectationResult> results = run_corpus(cases, cfg);
      int failures = 0;
      json arr = json::array();
      if (!co_json) {
        char head[256];
        std::snprintf(head, sizeof head, "%-11s %-7s %-16s %-18s %-18s %-8s %-5s %s", "case", "qty", "args",
                      "expected", "computed", "tol", "stat", "citation");
        out << head << '\n';
      }
      for (const ExpectationResult& r : results) {
        if (!r.pass) ++failures;
        const Expectation& e = r.expectation;
        std::string args;
        for (const std::string& a : e.args) args += (args.empty() ? "" : ",") + a;
        if (e.quantity == "probe") args += " t=" + num(e.t);
        if (co_json) {
          json j{{"case", r.case_id},     {"quantity", e.quantity},
                 {"args", e.args},        {"t", e.t},
                 {"expected", e.expected}, {"computed", std::isfinite(r.computed) ? json(r.computed) : json(nullptr)},
                 {"tolerance", e.tolerance}, {"pass", r.pass},
                 {"citation", e.citation}};
          if (!r.error.empty()) j["error"] = r.error;
          arr.push_back(j);
        } else {
          char line[512];
          std::snprintf(line, sizeof line, "%-11s %-7s %-16s %-18s %-18s %-8s %-5s %s", r.case_id.c_str(),
                        e.quantity.c_str(), args.c_str(), num(e.expected).c_str(),
                        (std::isfinite(r.computed) ? num(r.computed) : std::string("error")).c_str(),
                        num(e.tolerance).c_str(), r.pass ? "ok" : "FAIL", e.citation.c_str());
          out << line << '\n';
          if (!r.error.empty()) out << "    " << r.error << '\n';
        }
      }
      if (co_json) {
        json in{{"file", co_file.empty() ? json(nullptr) : json(co_file)}};
        emit(out, "corpus", in, {{"results", arr}, {"failures", failures}});
      } else {
        out << results.size() << " expectations, " << failures << " failures\n";
      }
      return failures == 0 ? kOk : kCorpusFailure;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParse;
  }
  try {
    return action();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.code());
  }
}

}  // namespace conangle::cli
