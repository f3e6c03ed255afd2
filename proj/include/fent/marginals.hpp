#pragma once

// Joint laws of the canonical partition over finite subsets F of the group:
// the tree-factorized fast path and an independent brute-force oracle.

#include <cstdint>
#include <string>
#include <vector>

#include "fent/free_group.hpp"
#include "fent/kernels.hpp"
#include "fent/numeric.hpp"
#include "fent/systems.hpp"

namespace fent {

enum class Mode { rational, floating };

inline constexpr std::uint64_t kDefaultPatternCap = std::uint64_t{1} << 26;
inline constexpr std::uint64_t kOracleCap = std::uint64_t{1} << 20;
// Entropies in rational mode enumerate exactly up to this many patterns.
inline constexpr std::uint64_t kRationalPatternLimit = std::uint64_t{1} << 16;
// Exact log forms are kept only for at most this many distinct probabilities.
inline constexpr std::size_t kExactDistinctLimit = 4096;

// FENT_PATTERN_CAP if set to a positive integer, else kDefaultPatternCap.
std::uint64_t default_pattern_cap();

struct PatternDistribution {
  WordSet support;                  // default-order sorted
  std::vector<std::string> labels;  // alphabet of every site
  bool exact = false;
  // Pattern y encodes as sum_i y_i * |labels|^(m-1-i), support[0] most significant.
  std::vector<std::uint64_t> keys;  // ascending, probability > 0 only
  std::vector<Rational> exact_probs;  // parallel to keys when exact
  std::vector<double> probs;          // always filled

  std::size_t size() const { return keys.size(); }
  std::vector<int> pattern(std::size_t i) const;
  // Labels concatenated when all are single characters, else comma-joined.
  std::string pattern_string(std::size_t i) const;
};

struct MarginalOptions {
  Mode mode = Mode::rational;
  std::uint64_t pattern_cap = kDefaultPatternCap;
  Execution execution = Execution::parallel;
};

// Site alphabet of the canonical partition.
std::vector<std::string> site_labels(const System& system);

// F must contain the identity and be prefix-closed (connected in the Cayley
// tree whose edges join g and g s). Otherwise InvalidArgument naming the hull.
PatternDistribution marginal(const System& system, const WordSet& F, const MarginalOptions& options = {});

// Full enumeration without tree factorization; always exact. Cap is on the
// enumerated space (for shifts of finite type the nonzero-support bound).
PatternDistribution oracle_marginal(const System& system, const WordSet& F, std::uint64_t cap = kOracleCap);

PatternDistribution restrict_to(const PatternDistribution& pd, const WordSet& subset);
Nats entropy_of(const PatternDistribution& pd);
// H(F alpha / F' alpha) = H(F alpha) - H(F' alpha).
Nats conditional_between(const PatternDistribution& big, const WordSet& subset);

// Exact equality of supports, labels and probabilities (both must be exact).
bool identical(const PatternDistribution& a, const PatternDistribution& b);
// max |p_a - p_b| over the union of patterns; infinity if supports or labels differ.
double max_difference(const PatternDistribution& a, const PatternDistribution& b);

// One line per pattern, "label-string probability", sorted by label string.
std::string dump(const PatternDistribution& pd);

// Exact Shannon entropy of a multiset of probabilities (approximate beyond
// kExactDistinctLimit distinct values).
Nats exact_entropy(std::vector<Rational> probs);
double float_entropy(const std::vector<double>& probs);

}  // namespace fent
