#pragma once

// Built-in regression systems with stored expected values.

#include <ostream>
#include <string>
#include <vector>

#include "fent/f_entropy.hpp"

namespace fent {

struct ExpectedValue {
  RouteChoice route;
  double value;
};

struct CorpusEntry {
  std::string name;
  std::string description;  // system-description text
  std::vector<ExpectedValue> expected;
  bool markov_structured = false;  // delta vanishes beyond radius 1
};

const std::vector<CorpusEntry>& corpus();
System corpus_system(const CorpusEntry& entry);

inline constexpr double kCorpusTolerance = 1e-9;

// Evaluates every entry by every applicable route and writes a deterministic
// report. Returns true when stored values match and exact routes agree.
bool run_corpus(std::ostream& out, const EngineOptions& options = {}, bool bits = false);

}  // namespace fent
