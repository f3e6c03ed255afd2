#include "fent/prob.hpp"

#include <map>
#include <set>
#include <utility>

#include "fent/errors.hpp"

namespace fent {

namespace {

void check_space(const LabeledPartition& p, std::size_t n) {
  if (p.points() != n) {
    throw InvalidArgument("partition covers " + std::to_string(p.points()) + " points but the measure has " +
                          std::to_string(n));
  }
}

template <class W>
std::vector<W> block_masses(const LabeledPartition& alpha, std::span<const W> mu) {
  check_space(alpha, mu.size());
  std::map<int, W> mass;
  for (std::size_t i = 0; i < mu.size(); ++i) mass[alpha.labels[i]] += mu[i];
  std::vector<W> out;
  out.reserve(mass.size());
  for (auto& [label, m] : mass) out.push_back(m);
  return out;
}

}  // namespace

std::vector<std::string> FiniteDistribution::problems() const {
  std::vector<std::string> out;
  if (weights.empty()) out.emplace_back("distribution is empty");
  if (labels.size() != weights.size()) {
    out.emplace_back("distribution has " + std::to_string(weights.size()) + " weights for " +
                     std::to_string(labels.size()) + " labels");
  }
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) out.push_back("label \"" + l + "\" repeated");
  }
  Rational total;
  for (const auto& w : weights) {
    if (w < 0) out.push_back("negative weight " + format_rational(w));
    total += w;
  }
  if (!weights.empty() && total != 1) out.push_back("weights sum to " + format_rational(total) + ", not 1");
  return out;
}

std::vector<double> FiniteDistribution::as_doubles() const {
  std::vector<double> out;
  out.reserve(weights.size());
  for (const auto& w : weights) out.push_back(w.get_d());
  return out;
}

double shannon(std::span<const double> weights) {
  CompensatedSum total;
  CompensatedSum h;
  for (double p : weights) {
    if (p < 0) throw ValidationError("negative probability");
    total.add(p);
    if (p > 0) h.add(-p * std::log(p));
  }
  if (std::abs(total.value() - 1.0) > kFloatMassTolerance) {
    throw ValidationError("probabilities sum to " + std::to_string(total.value()));
  }
  return h.value();
}

Nats shannon(std::span<const Rational> weights) {
  Rational total;
  for (const auto& p : weights) {
    if (p < 0) throw ValidationError("negative probability");
    total += p;
  }
  if (total != 1) throw ValidationError("probabilities sum to " + format_rational(total) + ", not 1");
  LogCombination c;
  for (const auto& p : weights) c.add_plogp(p);
  return Nats::exactly(std::move(c));
}

Nats shannon(const FiniteDistribution& d) {
  if (auto p = d.problems(); !p.empty()) throw ValidationError(p.front());
  return shannon(std::span<const Rational>(d.weights));
}

LabeledPartition join(const LabeledPartition& a, const LabeledPartition& b) {
  check_space(b, a.points());
  std::map<std::pair<int, int>, int> ids;
  LabeledPartition out;
  out.labels.reserve(a.points());
  for (std::size_t i = 0; i < a.points(); ++i) {
    auto [it, inserted] = ids.try_emplace({a.labels[i], b.labels[i]}, static_cast<int>(ids.size()));
    out.labels.push_back(it->second);
  }
  return out;
}

Nats partition_entropy(const LabeledPartition& alpha, std::span<const Rational> mu) {
  const auto masses = block_masses(alpha, mu);
  return shannon(std::span<const Rational>(masses));
}

Nats joint_entropy(const LabeledPartition& alpha, const LabeledPartition& beta, std::span<const Rational> mu) {
  return partition_entropy(join(alpha, beta), mu);
}

Nats conditional(const LabeledPartition& alpha, const LabeledPartition& beta, std::span<const Rational> mu) {
  return joint_entropy(alpha, beta, mu) - partition_entropy(beta, mu);
}

Nats conditional_on_invariant(const LabeledPartition& alpha, const LabeledPartition& xi,
                              std::span<const Rational> mu) {
  check_space(alpha, mu.size());
  check_space(xi, mu.size());
  std::map<int, std::vector<std::size_t>> blocks;
  for (std::size_t i = 0; i < mu.size(); ++i) blocks[xi.labels[i]].push_back(i);
  Nats total;
  for (const auto& [label, members] : blocks) {
    Rational mass;
    for (auto i : members) mass += mu[i];
    if (mass == 0) continue;
    LabeledPartition restricted;
    std::vector<Rational> conditional_mu;
    for (auto i : members) {
      restricted.labels.push_back(alpha.labels[i]);
      conditional_mu.push_back(mu[i] / mass);
    }
    total += partition_entropy(restricted, conditional_mu) * mass;
  }
  return total;
}

double partition_entropy(const LabeledPartition& alpha, std::span<const double> mu) {
  const auto masses = block_masses(alpha, mu);
  return shannon(std::span<const double>(masses));
}

double conditional(const LabeledPartition& alpha, const LabeledPartition& beta, std::span<const double> mu) {
  return partition_entropy(join(alpha, beta), mu) - partition_entropy(beta, mu);
}

}  // namespace fent
