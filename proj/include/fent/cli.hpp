#pragma once

// Command dispatch for the fent executable, separated from argument parsing so
// it can be driven from tests.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "fent/marginals.hpp"

namespace fent {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitValidation = 2, kExitCap = 3, kExitDisagreement = 4 };

struct RunConfig {
  std::string command;  // validate f decay-profile growth ks rformula decompose corpus marginal
  std::string input;
  std::optional<int> rank;
  std::optional<int> radius;
  std::optional<int> depth;
  Mode mode = Mode::rational;
  std::string order;  // letter permutation, e.g. "AabB"; empty for the default
  std::uint64_t cap = kDefaultPatternCap;
  std::string format = "text";
  bool bits = false;
  std::string word = "a";    // ks
  std::string support;       // marginal: comma-separated words; empty means B_radius
  bool oracle = false;       // marginal
  bool relative = false;     // condition on the component partition
  bool normalize = false;    // validate: print the normalized description
  std::string route = "ball";  // decompose: ball | sphere | decay
  bool serial = false;
};

int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace fent
