#pragma once

// Finite descriptions of measure-preserving actions of the free group, each
// with a canonical finite generating partition alpha.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fent/free_group.hpp"
#include "fent/prob.hpp"

namespace fent {

using Matrix = std::vector<std::vector<Rational>>;

// Product measure on A^G; alpha reads the identity coordinate.
struct BernoulliSpec {
  FiniteDistribution base;
};

// Coordinates indexed by left cosets of <t>; alpha reads the identity coset.
struct CosetBernoulliSpec {
  FiniteDistribution base;
  int marked = 0;  // generator index of t
};

// Tree-indexed Markov measure on A^G: stationary pi at every site and, along
// each right-Cayley edge (g, g s), transition matrix P_s.
struct MarkovSpec {
  std::vector<std::string> alphabet;
  std::vector<Rational> stationary;
  std::vector<Matrix> transitions;  // indexed by Letter::index, size 2r
};

// Factor of an inner Bernoulli or Markov system through a letter map A -> B.
struct HiddenMarkovSpec {
  std::variant<BernoulliSpec, MarkovSpec> inner;
  std::vector<std::string> observed;
  std::vector<int> letter_map;  // inner letter -> observed letter
};

// Action on finitely many atoms; one bijection per free generator.
struct FiniteActionSpec {
  std::vector<std::string> points;
  std::vector<Rational> mass;
  std::vector<std::vector<int>> generator_maps;  // size r; map[x] = s_i . x
  // Optional coarsening of the point partition (label per point).
  std::optional<std::vector<std::string>> partition;
};

struct SystemSpec;

// Components live on disjoint labeled copies, hence are mutually singular.
struct DirectSumSpec {
  std::vector<Rational> weights;
  std::vector<SystemSpec> components;
};

struct SystemSpec {
  std::variant<FiniteActionSpec, BernoulliSpec, MarkovSpec, HiddenMarkovSpec, DirectSumSpec, CosetBernoulliSpec> kind;
};

struct System {
  int rank = 2;
  SystemSpec spec;
};

std::string kind_name(const SystemSpec& spec);

struct Diagnostic {
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return diagnostics.empty(); }
  bool has(const std::string& code) const;
  std::string summary() const;
};

ValidationReport validate(const System& system);
// Throws ValidationError carrying the first diagnostic.
void require_valid(const System& system);

struct CanonicalPartition {
  std::vector<std::string> labels;
  std::string description;
};

// Labels of alpha. For direct sums these are "i:label", the join with the
// component partition xi. Throws ValidationError for a non-generating user
// partition of a finite action.
CanonicalPartition canonical_partition(const System& system);

// Systems whose independence decay vanishes beyond radius 1 (or whose f is a
// closed form), so that finite truncations are exact.
bool tail_closes(const SystemSpec& spec);

MarkovSpec as_markov(const BernoulliSpec& b, int rank);
MarkovSpec inner_markov(const HiddenMarkovSpec& h, int rank);

// g . x for a finite action.
int act(const FiniteActionSpec& a, const Word& g, int x);
// Block id per point of the finest invariant partition (orbits).
std::vector<int> orbit_partition(const FiniteActionSpec& a);
// Partition label id per point (the point itself when no coarsening is given).
std::vector<int> point_labels(const FiniteActionSpec& a);
// Refines `labels` by all translates; generating iff the result separates atoms.
std::vector<int> orbit_refinement(const FiniteActionSpec& a, std::vector<int> labels);

// Coset representative: g with trailing t^{+-1} letters removed.
Word coset_representative(const Word& g, int marked);

}  // namespace fent
