#pragma once

// H(F alpha) and H(F alpha / Sigma) for finite F, with memoization.
//
// Closed forms are used where the measure factorizes (Bernoulli, coset
// Bernoulli, Markov on connected sets, finite actions, direct sums); everything
// else goes through the tree kernel with hidden sites.

#include <map>
#include <string>

#include "fent/marginals.hpp"

namespace fent {

// Conditioning on the invariant partition Sigma. For direct sums Sigma is the
// component partition xi; for other systems it is trivial.
enum class Relative { none, components };

struct EngineOptions {
  Mode mode = Mode::rational;
  std::uint64_t pattern_cap = kDefaultPatternCap;
  Execution execution = Execution::parallel;
};

class EntropyEngine {
 public:
  EntropyEngine(System system, EngineOptions options = {});

  const System& system() const { return system_; }
  const EngineOptions& options() const { return options_; }
  int rank() const { return system_.rank; }

  // H(F alpha / Sigma); the empty set has entropy 0.
  Nats block(const WordSet& F, Relative relative = Relative::none);

  std::size_t cache_size() const { return cache_.size(); }

 private:
  Nats compute(const SystemSpec& spec, const WordSet& F);
  Nats kernel(const MarkovSpec& inner, const std::vector<int>& emit, int observed, const WordSet& F);

  System system_;
  EngineOptions options_;
  std::map<std::pair<int, std::string>, Nats> cache_;
};

// Translated to contain the identity, F is closed under dropping the last letter.
bool is_connected(const WordSet& F);

// h_s = H(x_{g s} | x_g) = sum_a pi(a) H(P_s(a, .)).
Nats edge_entropy(const MarkovSpec& m, Letter s);

}  // namespace fent
