#pragma once

#include <string>
#include <vector>

#include "conangle/scene.hpp"
#include "conangle/tolerance.hpp"

namespace conangle {

// One checked quantity of a corpus case. Quantities:
//   c0, c    args = {cone, cone}
//   probe    args = {cone, z, m}, distance of z - t m to the cone
//   member   args = {cone, point}, 1 when the point is in the cone, else 0
struct Expectation {
  std::string quantity;
  std::vector<std::string> args;
  double t = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string citation;
};

struct CorpusCase {
  std::string id;
  Scene scene;
  std::vector<Expectation> expectations;
};

struct ExpectationResult {
  std::string case_id;
  Expectation expectation;
  double computed = 0.0;
  bool pass = false;
  std::string error;  // set when evaluation threw
};

// The worked examples shipped with the library, as JSON.
const std::string& builtin_corpus_json();
std::vector<CorpusCase> builtin_corpus();

// [{"id": ..., "scene": {...}, "expectations": [{"quantity", "args", "t",
// "expected", "tolerance", "citation"}]}]. Error(parse_error / resolve_error).
std::vector<CorpusCase> parse_corpus(const std::string& text);

double evaluate(const CorpusCase& c, const Expectation& e, const ToleranceConfig& cfg = {});
std::vector<ExpectationResult> run_corpus(const std::vector<CorpusCase>& cases, const ToleranceConfig& cfg = {});

}  // namespace conangle
