#pragma once

#include <ostream>

namespace conangle::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kCorpusFailure = 1;
inline constexpr int kParse = 2;
inline constexpr int kResolve = 3;
inline constexpr int kNumeric = 4;
inline constexpr int kUnsupportedDim = 5;
inline constexpr int kHypothesis = 6;

// Entry point of the conangle tool, with the streams injected for tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace conangle::cli
