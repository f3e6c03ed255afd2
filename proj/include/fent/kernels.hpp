#pragma once

// Sum-product enumeration of observed-label patterns for tree-indexed Markov
// measures with a deterministic letter map (hidden sites allowed).
//
// The blocked kernel materializes one table per subtree hanging off the root
// and streams the root's pattern space in fixed-size blocks. Each block is
// summed with compensation and blocks are reduced in index order, so the result
// does not depend on the number of threads. The reference kernel evaluates
// every pattern independently by recursion and is kept for testing.

#include <cstdint>
#include <vector>

#include "fent/free_group.hpp"
#include "fent/systems.hpp"

namespace fent {

struct TreeModel {
  struct Vertex {
    int parent = -1;      // index into vertices; -1 for the root
    int transition = -1;  // letter index of the matrix from parent label to this label
    int place = -1;       // position in the support order, or -1 for a hidden site
  };

  int inner_size = 0;
  int observed_size = 0;
  std::vector<int> emit;  // inner letter -> observed letter
  std::vector<Rational> prior;
  std::vector<Matrix> transitions;  // indexed by letter
  std::vector<Vertex> vertices;     // parents precede children
  int observed_sites = 0;

  // Number of observed patterns, observed_size ^ observed_sites (saturating).
  std::uint64_t pattern_count() const;
};

// Tree model for the joint law of the observed labels at `support` (any
// nonempty finite set; it is translated to contain the identity and completed
// to its spanning subtree with hidden sites). The root is a centroid.
TreeModel tree_model(const MarkovSpec& inner, const std::vector<int>& emit, int observed_size, const WordSet& support);

enum class Execution { serial, parallel };

inline constexpr std::uint64_t kDefaultTableCap = std::uint64_t{1} << 24;
inline constexpr std::uint64_t kBlockSize = std::uint64_t{1} << 12;

struct StreamResult {
  double entropy = 0.0;  // -sum p log p
  double mass = 0.0;     // sum p, for sanity checks
};

StreamResult stream_entropy(const TreeModel& model, Execution execution = Execution::parallel,
                            std::uint64_t table_cap = kDefaultTableCap);

template <class T>
struct Materialized {
  std::vector<std::uint64_t> keys;  // ascending; key = sum_i y_i * base^(m-1-i)
  std::vector<T> probs;             // strictly positive entries only
};

Materialized<double> materialize_float(const TreeModel& model, Execution execution = Execution::parallel,
                                       std::uint64_t table_cap = kDefaultTableCap);
Materialized<Rational> materialize_exact(const TreeModel& model, std::uint64_t table_cap = kDefaultTableCap);

// Per-pattern recursion without shared tables; serial, key order.
StreamResult reference_entropy(const TreeModel& model);
Materialized<double> reference_materialize(const TreeModel& model);

}  // namespace fent
