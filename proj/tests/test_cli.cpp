#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "../tools/cli.hpp"

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

std::string data(const std::string& name) { return std::string(CONANGLE_TEST_DATA) + "/" + name; }

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "conangle");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Outcome o;
  o.code = conangle::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

bool contains(const std::string& text, const std::string& part) { return text.find(part) != std::string::npos; }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

using conangle::cli::kCorpusFailure;
using conangle::cli::kHypothesis;
using conangle::cli::kOk;
using conangle::cli::kParse;
using conangle::cli::kResolve;
using conangle::cli::kUnsupportedDim;

TEST_CASE("project") {
  const Outcome o = run({"project", data("KMR3.json"), "K", "z"});
  CHECK(o.code == kOk);
  CHECK(contains(o.out, "(0, 0.5, 0.5)"));
  CHECK(contains(o.out, "certificate             pass"));
  // literal points work too
  const Outcome lit = run({"project", data("KMR3.json"), "K", "0,1,0"});
  CHECK(lit.out == o.out);
}

TEST_CASE("angle") {
  const Outcome o = run({"angle", data("examK1K2.json"), "K1", "K2"});
  CHECK(o.code == kOk);
  CHECK(contains(o.out, "0.7071067812"));
  const Outcome c = run({"angle", data("KMR3.json"), "K", "M", "c"});
  CHECK(c.code == kOk);
  const Outcome oracle = run({"angle", data("examK1K2.json"), "K1", "K2", "--oracle", "--resolution", "720"});
  CHECK(oracle.code == kOk);
}

TEST_CASE("json envelope") {
  const Outcome o = run({"angle", data("examK1K2.json"), "K1", "K2", "--json"});
  REQUIRE(o.code == kOk);
  const nlohmann::json j = nlohmann::json::parse(o.out);
  CHECK(j.at("command") == "angle");
  CHECK(j.at("inputs").at("cone1") == "K1");
  CHECK(std::abs(j.at("result").at("value").get<double>() - std::sqrt(0.5)) <= 1e-9);
}

TEST_CASE("closedness on the second-order cone and a line") {
  const Outcome o = run({"check", "closedness", data("KMR3.json"), "K", "M", "--json"});
  REQUIRE(o.code == kOk);
  const nlohmann::json j = nlohmann::json::parse(o.out);
  const nlohmann::json& conds = j.at("result").at("conditions");
  REQUIRE(conds.size() == 5);
  for (const auto& c : conds) CHECK(c.at("holds") == false);
  CHECK(j.at("result").at("consistent") == true);
}

TEST_CASE("hypothesis violations exit with 6") {
  CHECK(run({"check", "polar-witness", data("exam11NEQ.json"), "K", "M"}).code == kHypothesis);
  CHECK(run({"check", "dichotomy", data("KMR3.json"), "M", "K"}).code == kHypothesis);
  CHECK(run({"check", "polar-witness", data("examK1K2.json"), "K1", "K2"}).code == kOk);
}

TEST_CASE("error exits") {
  SUBCASE("unreadable scene") {
    const Outcome o = run({"angle", data("missing.json"), "K", "M"});
    CHECK(o.code == kParse);
    CHECK(contains(o.err, "ParseError"));
  }
  SUBCASE("unknown cone") {
    const Outcome o = run({"angle", data("KMR3.json"), "K", "nope"});
    CHECK(o.code == kResolve);
    CHECK(contains(o.err, "nope"));
  }
  SUBCASE("oracle beyond dim 4") { CHECK(run({"angle", data("soc5.json"), "K", "R", "--oracle"}).code == kUnsupportedDim); }
  SUBCASE("bad arguments") {
    CHECK(run({"angle", data("KMR3.json"), "K"}).code == kParse);
    CHECK(run({"project", data("KMR3.json"), "K", "1,2"}).code == kParse);
    CHECK(run({"frobnicate"}).code == kParse);
  }
}

TEST_CASE("cyclic csv") {
  const std::string path = "conangle_test_trace.csv";
  const Outcome o = run({"cyclic", data("remark_c_b.json"), "C", "D", "1,1", "--csv", path});
  REQUIRE(o.code == kOk);
  const std::string csv = read_file(path);
  std::remove(path.c_str());
  std::istringstream lines(csv);
  std::string header, row;
  std::getline(lines, header);
  CHECK(header == "k,x1,x2,err,ratio");
  int rows = 0;
  while (std::getline(lines, row)) {
    ++rows;
    const std::string ratio = row.substr(row.rfind(',') + 1);
    if (rows > 1) CHECK(std::abs(std::stod(ratio) - 0.5) <= 1e-9);
  }
  CHECK(rows > 10);
  CHECK(contains(o.out, "estimated_rate          0.5"));
}

TEST_CASE("corpus") {
  const Outcome o = run({"corpus"});
  CHECK(o.code == kOk);
  CHECK(contains(o.out, "0 failures"));

  const Outcome j = run({"corpus", "--json"});
  REQUIRE(j.code == kOk);
  const nlohmann::json parsed = nlohmann::json::parse(j.out);
  CHECK(parsed.at("command") == "corpus");

  // a corpus file with a wrong expected value fails
  const Outcome dump = run({"corpus", "--dump"});
  REQUIRE(dump.code == kOk);
  nlohmann::json cases = nlohmann::json::parse(dump.out);
  REQUIRE(cases.is_array());
  cases[0]["expectations"][0]["expected"] = 0.123;
  const std::string path = "conangle_test_corpus.json";
  {
    std::ofstream out(path);
    out << cases.dump();
  }
  const Outcome bad = run({"corpus", "--file", path});
  std::remove(path.c_str());
  CHECK(bad.code == kCorpusFailure);
  CHECK(contains(bad.out, "1 failures"));
}

TEST_CASE("output is deterministic") {
  const std::vector<std::string> args{"principal", data("examK1K2.json"), "K1", "K2"};
  const Outcome a = run(args);
  const Outcome b = run(args);
  CHECK(a.code == kOk);
  CHECK(a.out == b.out);
  const Outcome c = run({"corpus", "--json"});
  CHECK(c.out == run({"corpus", "--json"}).out);
}
