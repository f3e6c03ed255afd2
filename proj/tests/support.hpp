#pragma once

// Random system generators shared by the unit tests and the acceptance binary.
// Everything is rational with small denominators so exact mode stays cheap.

#include <algorithm>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "fent/systems.hpp"

namespace fent::testing {

using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline std::vector<std::string> alphabet(int k, char first = 'x') {
  std::vector<std::string> out;
  for (int i = 0; i < k; ++i) out.push_back(std::string(1, static_cast<char>(first + i)));
  return out;
}

// Positive weights with denominators dividing the sum of small integers.
inline std::vector<Rational> random_weights(Rng& rng, int k, int max_part = 4) {
  std::vector<int> parts(k);
  for (auto& p : parts) p = uniform_int(rng, 1, max_part);
  const int total = std::accumulate(parts.begin(), parts.end(), 0);
  std::vector<Rational> out;
  for (int p : parts) {
    Rational q(p, total);
    q.canonicalize();
    out.push_back(q);
  }
  return out;
}

inline BernoulliSpec random_bernoulli(Rng& rng, int k) {
  return BernoulliSpec{FiniteDistribution{alphabet(k, '0'), random_weights(rng, k)}};
}

// Each edge pair (s, s^-1) comes from a joint law J with both marginals pi:
// lambda diag(pi) + (1 - lambda) pi pi^T, plus a circulation that breaks the
// symmetry when k >= 3. P_s(a, b) = J(a, b) / pi(a), P_{s^-1}(a, b) = J(b, a) / pi(a).
inline MarkovSpec random_markov(Rng& rng, int rank, int k) {
  MarkovSpec m;
  m.alphabet = alphabet(k);
  m.stationary = random_weights(rng, k, 3);
  const auto& pi = m.stationary;
  m.transitions.resize(2 * rank);
  for (int i = 0; i < rank; ++i) {
    Rational lambda(uniform_int(rng, 0, 3), 4);
    lambda.canonicalize();
    Matrix J(k, std::vector<Rational>(k));
    Rational smallest = 1;
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        J[a][b] = (1 - lambda) * pi[a] * pi[b];
        if (a == b) J[a][b] += lambda * pi[a];
        smallest = std::min(smallest, Rational((1 - lambda) * pi[a] * pi[b]));
      }
    }
    if (k >= 3 && lambda != 1) {
      Rational half(uniform_int(rng, 0, 2), 2);
      half.canonicalize();
      const Rational eps = smallest * half;
      for (int a = 0; a < k; ++a) {
        J[a][(a + 1) % k] += eps;
        J[a][(a + k - 1) % k] -= eps;
      }
    }
    Matrix forward(k, std::vector<Rational>(k)), backward(k, std::vector<Rational>(k));
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        forward[a][b] = J[a][b] / pi[a];
        backward[a][b] = J[b][a] / pi[a];
      }
    }
    m.transitions[2 * i] = forward;
    m.transitions[2 * i + 1] = backward;
  }
  return m;
}

// Inner Markov chain on 3 states, observed through a random surjection onto 2 labels.
inline HiddenMarkovSpec random_hidden_markov(Rng& rng, int rank) {
  HiddenMarkovSpec h;
  h.inner = random_markov(rng, rank, 3);
  h.observed = alphabet(2, '0');
  const int lone = uniform_int(rng, 0, 2);
  h.letter_map = {0, 0, 0};
  h.letter_map[lone] = 1;
  return h;
}

// Up to max_points atoms; generators permute atoms within equal-mass classes,
// which keeps the measure invariant.
inline FiniteActionSpec random_finite_action(Rng& rng, int rank, int max_points = 6) {
  const int n = uniform_int(rng, 1, max_points);
  FiniteActionSpec a;
  for (int i = 0; i < n; ++i) a.points.push_back("p" + std::to_string(i));
  // Few distinct masses so that nontrivial permutations exist.
  std::vector<int> klass(n);
  for (auto& c : klass) c = uniform_int(rng, 0, 1);
  std::vector<int> parts(n);
  const int heavy = uniform_int(rng, 1, 3);
  int total = 0;
  for (int i = 0; i < n; ++i) total += parts[i] = klass[i] ? heavy : 1;
  for (int p : parts) {
    Rational q(p, total);
    q.canonicalize();
    a.mass.push_back(q);
  }
  for (int g = 0; g < rank; ++g) {
    std::vector<int> map(n);
    std::iota(map.begin(), map.end(), 0);
    for (int c = 0; c < 2; ++c) {
      std::vector<int> members;
      for (int i = 0; i < n; ++i) {
        if (a.mass[i] == a.mass[0] ? c == 0 : c == 1) members.push_back(i);
      }
      std::vector<int> image = members;
      std::shuffle(image.begin(), image.end(), rng);
      for (std::size_t j = 0; j < members.size(); ++j) map[members[j]] = image[j];
    }
    a.generator_maps.push_back(map);
  }
  return a;
}

// 1 to max_components Bernoulli / Markov components with random weights.
inline DirectSumSpec random_direct_sum(Rng& rng, int rank, int max_components = 3) {
  DirectSumSpec d;
  const int m = uniform_int(rng, 1, max_components);
  d.weights = random_weights(rng, m, 3);
  for (int i = 0; i < m; ++i) {
    if (uniform_int(rng, 0, 1) == 0) {
      d.components.push_back(SystemSpec{random_bernoulli(rng, uniform_int(rng, 2, 3))});
    } else {
      d.components.push_back(SystemSpec{random_markov(rng, rank, 2)});
    }
  }
  return d;
}

inline System make_system(int rank, SystemSpec spec) { return System{rank, std::move(spec)}; }

}  // namespace fent::testing
