#include "conangle/corpus.hpp"

#include <cmath>

#include <json.hpp>

#include "conangle/angles.hpp"
#include "conangle/error.hpp"
#include "conangle/theorems.hpp"
#include "scene_json.hpp"

namespace conangle {

using nlohmann::json;

const std::string& builtin_corpus_json() {
  static const std::string text = R"json([
  {
    "id": "examK1K2",
    "scene": {
      "dim": 2,
      "cones": {
        "K1": {"kind": "generated", "generators": [[1, 0], [0, 1]]},
        "K2": {"kind": "halfspace", "normals": [[1, 1]]},
        "K1o": {"kind": "polar", "of": "K1"},
        "K2o": {"kind": "polar", "of": "K2"},
        "K2d": {"kind": "dual", "of": "K2"}
      }
    },
    "expectations": [
      {"quantity": "c0", "args": ["K1", "K2"], "expected": 0.7071067811865476, "tolerance": 1e-6, "citation": "examK1K2 (iii)"},
      {"quantity": "c", "args": ["K1", "K2"], "expected": 0.7071067811865476, "tolerance": 1e-6, "citation": "examK1K2 (iii)"},
      {"quantity": "c0", "args": ["K1o", "K2d"], "expected": 1, "tolerance": 1e-6, "citation": "examK1K2 (iv)"},
      {"quantity": "c", "args": ["K1o", "K2d"], "expected": 0, "tolerance": 1e-6, "citation": "examK1K2 (iv)"},
      {"quantity": "c0", "args": ["K1o", "K2o"], "expected": 0, "tolerance": 1e-6, "citation": "examK1K2 (iv)"}
    ]
  },
  {
    "id": "KMR3",
    "scene": {
      "dim": 3,
      "cones": {
        "K": {"kind": "soc"},
        "M": {"kind": "subspace", "basis": [[1, 0, -1]]},
        "Ko": {"kind": "polar", "of": "K"},
        "Kd": {"kind": "dual", "of": "K"},
        "Mperp": {"kind": "polar", "of": "M"}
      },
      "points": {
        "z": [0, 1, 0],
        "m": [1, 0, -1],
        "w": [-0.7071067811865476, 0, -0.7071067811865476],
        "wneg": [0.7071067811865476, 0, 0.7071067811865476]
      }
    },
    "expectations": [
      {"quantity": "c0", "args": ["K", "M"], "expected": 1, "tolerance": 1e-6, "citation": "KMR3 (iii)"},
      {"quantity": "c", "args": ["K", "M"], "expected": 0, "tolerance": 1e-6, "citation": "KMR3 (iii)"},
      {"quantity": "c0", "args": ["Ko", "Mperp"], "expected": 1, "tolerance": 1e-6, "citation": "KMR3 (vi)"},
      {"quantity": "c", "args": ["Ko", "Mperp"], "expected": 0, "tolerance": 1e-6, "citation": "KMR3 (vi)"},
      {"quantity": "member", "args": ["Ko", "w"], "expected": 1, "tolerance": 0, "citation": "KMR3 (v)"},
      {"quantity": "member", "args": ["Mperp", "w"], "expected": 1, "tolerance": 0, "citation": "KMR3 (v)"},
      {"quantity": "member", "args": ["Kd", "wneg"], "expected": 1, "tolerance": 0, "citation": "KMR3 (v)"},
      {"quantity": "member", "args": ["Mperp", "wneg"], "expected": 1, "tolerance": 0, "citation": "KMR3 (v)"},
      {"quantity": "probe", "args": ["K", "z", "m"], "t": 0, "expected": 0.7071067811865475, "tolerance": 1e-4, "citation": "KMR3 (ii)"},
      {"quantity": "probe", "args": ["K", "z", "m"], "t": 1, "expected": 0.29289321881345254, "tolerance": 1e-4, "citation": "KMR3 (ii)"},
      {"quantity": "probe", "args": ["K", "z", "m"], "t": 10, "expected": 0.03526738991047227, "tolerance": 1e-4, "citation": "KMR3 (ii)"},
      {"quantity": "probe", "args": ["K", "z", "m"], "t": 100, "expected": 0.0035354455220034772, "tolerance": 1e-4, "citation": "KMR3 (ii)"}
    ]
  },
  {
    "id": "exam11NEQ",
    "scene": {
      "dim": 2,
      "cones": {
        "K": {"kind": "generated", "generators": [[1, 0], [1, 1]]},
        "M": {"kind": "subspace", "basis": [[1, 0]]},
        "Ko": {"kind": "polar", "of": "K"},
        "Mperp": {"kind": "polar", "of": "M"}
      }
    },
    "expectations": [
      {"quantity": "c0", "args": ["K", "M"], "expected": 1, "tolerance": 1e-6, "citation": "exam11NEQ (iii)"},
      {"quantity": "c", "args": ["K", "M"], "expected": 0, "tolerance": 1e-6, "citation": "exam11NEQ (iii)"},
      {"quantity": "c0", "args": ["Ko", "Mperp"], "expected": 1, "tolerance": 1e-6, "citation": "exam11NEQ (iii)"},
      {"quantity": "c", "args": ["Ko", "Mperp"], "expected": 0.7071067811865476, "tolerance": 1e-6, "citation": "exam11NEQ (iii)"}
    ]
  },
  {
    "id": "remark_c_a",
    "scene": {
      "dim": 2,
      "cones": {
        "C": {"kind": "ray", "direction": [1, 0]},
        "D": {"kind": "ray", "direction": [-1, 0]},
        "U": {"kind": "generated", "generators": [[1, 0], [0, 1]]},
        "V": {"kind": "halfspace", "normals": [[1, 0], [0, 1]]}
      }
    },
    "expectations": [
      {"quantity": "c", "args": ["C", "D"], "expected": 0, "tolerance": 1e-6, "citation": "remark_c (i)"},
      {"quantity": "c0", "args": ["C", "D"], "expected": 0, "tolerance": 1e-6, "citation": "remark_c (i)"},
      {"quantity": "c0", "args": ["U", "V"], "expected": 0, "tolerance": 1e-6, "citation": "remark_c (i)"},
      {"quantity": "c", "args": ["U", "V"], "expected": 0, "tolerance": 1e-6, "citation": "remark_c (i)"}
    ]
  },
  {
    "id": "remark_c_b",
    "scene": {
      "dim": 2,
      "cones": {
        "C": {"kind": "ray", "direction": [1, 0]},
        "D": {"kind": "ray", "direction": [1, 1]},
        "U": {"kind": "subspace", "basis": [[1, 0], [0, 1]]},
        "V": {"kind": "subspace", "basis": [[1, 0], [0, 1]]}
      }
    },
    "expectations": [
      {"quantity": "c", "args": ["C", "D"], "expected": 0.7071067811865476, "tolerance": 1e-6, "citation": "remark_c (ii)"},
      {"quantity": "c0", "args": ["C", "D"], "expected": 0.7071067811865476, "tolerance": 1e-6, "citation": "remark_c (ii)"},
      {"quantity": "c", "args": ["U", "V"], "expected": 0, "tolerance": 1e-6, "citation": "remark_c (ii)"}
    ]
  },
  {
    "id": "remark_c_c",
    "scene": {
      "dim": 2,
      "cones": {
        "C": {"kind": "ray", "direction": [1, 0]},
        "D": {"kind": "ray", "direction": [-1, 0]},
        "U": {"kind": "generated", "generators": [[1, 0], [0, 1]]},
        "V": {"kind": "generated", "generators": [[-1, 0], [-1, 1]]}
      }
    },
    "expectations": [
      {"quantity": "c", "args": ["C", "D"], "expected": 0, "tolerance": 1e-6, "citation": "remark_c (iii)"},
      {"quantity": "c0", "args": ["C", "D"], "expected": 0, "tolerance": 1e-6, "citation": "remark_c (iii)"},
      {"quantity": "c0", "args": ["U", "V"], "expected": 0.7071067811865476, "tolerance": 1e-6, "citation": "remark_c (iii)"},
      {"quantity": "c", "args": ["U", "V"], "expected": 0.7071067811865476, "tolerance": 1e-6, "citation": "remark_c (iii)"}
    ]
  }
])json";
  return text;
}

std::vector<CorpusCase> builtin_corpus() { return parse_corpus(builtin_corpus_json()); }

std::vector<CorpusCase> parse_corpus(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, e.what());
  }
  if (!j.is_array()) throw Error(Errc::parse_error, "corpus must be an array of cases");
  std::vector<CorpusCase> out;
  try {
    for (const json& jc : j) {
      CorpusCase c;
      c.id = jc.at("id").get<std::string>();
      c.scene = detail::scene_from_json(jc.at("scene"));
      for (const json& je : jc.at("expectations")) {
        Expectation e;
        e.quantity = je.at("quantity").get<std::string>();
        e.args = je.at("args").get<std::vector<std::string>>();
        e.t = je.value("t", 0.0);
        e.expected = je.at("expected").get<double>();
        e.tolerance = je.at("tolerance").get<double>();
        e.citation = je.at("citation").get<std::string>();
        if (e.citation.empty()) throw Error(Errc::parse_error, c.id + ": expectation without citation");
        c.expectations.push_back(std::move(e));
      }
      out.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, e.what());
  }
  return out;
}

double evaluate(const CorpusCase& c, const Expectation& e, const ToleranceConfig& cfg) {
  auto need = [&e](std::size_t n) {
    if (e.args.size() != n) {
      throw Error(Errc::parse_error, e.quantity + " takes " + std::to_string(n) + " arguments");
    }
  };
  const Scene& s = c.scene;
  if (e.quantity == "c0") {
    need(2);
    return c0(s.cone(e.args[0]), s.cone(e.args[1]), cfg).value;
  }
  if (e.quantity == "c") {
    need(2);
    return c_angle(s.cone(e.args[0]), s.cone(e.args[1]), cfg).value;
  }
  if (e.quantity == "probe") {
    need(3);
    const auto samples = nonclosedness_probe(s.cone(e.args[0]), s.point(e.args[1]), s.point(e.args[2]), {e.t}, cfg);
    return samples.front().distance;
  }
  if (e.quantity == "member") {
    need(2);
    return member(s.cone(e.args[0]), s.point(e.args[1]), cfg.tol_feas) ? 1.0 : 0.0;
  }
  throw Error(Errc::parse_error, "unknown quantity '" + e.quantity + "'");
}

std::vector<ExpectationResult> run_corpus(const std::vector<CorpusCase>& cases, const ToleranceConfig& cfg) {
  std::vector<ExpectationResult> out;
  for (const CorpusCase& c : cases) {
    for (const Expectation& e : c.expectations) {
      ExpectationResult r;
      r.case_id = c.id;
      r.expectation = e;
      try {
        r.computed = evaluate(c, e, cfg);
        r.pass = std::abs(r.computed - e.expected) <= e.tolerance;
      } catch (const Error& err) {
        r.computed = std::nan("");
        r.error = err.what();
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace conangle
