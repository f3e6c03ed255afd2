#pragma once

// Finite distributions, partitions of finite sample spaces, and Shannon entropy.
// All entropies are in nats.

#include <span>
#include <string>
#include <vector>

#include "fent/numeric.hpp"

namespace fent {

inline constexpr double kFloatMassTolerance = 1e-12;

struct FiniteDistribution {
  std::vector<std::string> labels;
  std::vector<Rational> weights;

  std::size_t size() const { return weights.size(); }
  // Empty when valid; otherwise one message per problem.
  std::vector<std::string> problems() const;
  std::vector<double> as_doubles() const;
};

// Throws ValidationError on negative weights or |sum - 1| > kFloatMassTolerance.
double shannon(std::span<const double> weights);
// Exact; throws ValidationError unless the weights are nonnegative and sum to 1.
Nats shannon(std::span<const Rational> weights);
Nats shannon(const FiniteDistribution& d);

// Block label per sample point.
struct LabeledPartition {
  std::vector<int> labels;

  std::size_t points() const { return labels.size(); }
};

LabeledPartition join(const LabeledPartition& a, const LabeledPartition& b);

// H(alpha) under mu, H(alpha v beta), H(alpha / beta) = H(alpha v beta) - H(beta).
Nats partition_entropy(const LabeledPartition& alpha, std::span<const Rational> mu);
Nats joint_entropy(const LabeledPartition& alpha, const LabeledPartition& beta, std::span<const Rational> mu);
Nats conditional(const LabeledPartition& alpha, const LabeledPartition& beta, std::span<const Rational> mu);
// sum over blocks C of xi with mu(C) > 0 of mu(C) * H_{mu_C}(alpha).
Nats conditional_on_invariant(const LabeledPartition& alpha, const LabeledPartition& xi,
                              std::span<const Rational> mu);

double partition_entropy(const LabeledPartition& alpha, std::span<const double> mu);
double conditional(const LabeledPartition& alpha, const LabeledPartition& beta, std::span<const double> mu);

}  // namespace fent
