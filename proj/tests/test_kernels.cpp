#include "doctest.h"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cmath>
#include <cstring>

#include "fent/errors.hpp"
#include "fent/kernels.hpp"
#include "support.hpp"

using namespace fent;

namespace {

WordSet ball_words(int rank, int n) {
  const auto B = ball(rank, n);
  return WordSet(B->elements().begin(), B->elements().end());
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("blocked kernel matches the per-pattern reference") {
    testing::Rng rng(21);
    for (int t = 0; t < 6; ++t) {
      const MarkovSpec inner = testing::random_markov(rng, 2, 3);
      const std::vector<int> emit = {0, testing::uniform_int(rng, 0, 1), 1};
      const WordSet support = t % 2 ? ball_words(2, 2) : normalize_set(set_union(ball_words(2, 1), {parse_word("ab", 2), parse_word("bb", 2), parse_word("Ba", 2)}));
      const TreeModel model = tree_model(inner, emit, 2, support);
      const StreamResult ref = reference_entropy(model);
      const StreamResult ser = stream_entropy(model, Execution::serial);
      const StreamResult par = stream_entropy(model, Execution::parallel);
      CHECK(std::abs(ref.mass - 1.0) <= 1e-12);
      CHECK(std::abs(ser.entropy - ref.entropy) <= 1e-11);
      CHECK(std::abs(par.entropy - ref.entropy) <= 1e-11);

      const auto fast = materialize_float(model);
      const auto slow = reference_materialize(model);
      REQUIRE(fast.keys == slow.keys);
      double worst = 0.0;
      for (std::size_t i = 0; i < fast.probs.size(); ++i) worst = std::max(worst, std::abs(fast.probs[i] - slow.probs[i]));
      CHECK(worst <= 1e-15);
    }
  }

  TEST_CASE("exact materialization sums to one and matches floats") {
    testing::Rng rng(8);
    const MarkovSpec inner = testing::random_markov(rng, 2, 3);
    const TreeModel model = tree_model(inner, {0, 1, 1}, 2, ball_words(2, 1));
    const auto exact = materialize_exact(model);
    const auto approx = materialize_float(model);
    REQUIRE(exact.keys == approx.keys);
    Rational total;
    for (std::size_t i = 0; i < exact.probs.size(); ++i) {
      total += exact.probs[i];
      CHECK(std::abs(exact.probs[i].get_d() - approx.probs[i]) <= 1e-15);
    }
    CHECK(total == 1);
  }

  TEST_CASE("hidden sites fill the spanning subtree") {
    testing::Rng rng(4);
    const MarkovSpec inner = testing::random_markov(rng, 2, 2);
    // {1, ab}: the site b is hidden
    const TreeModel model = tree_model(inner, {0, 1}, 2, normalize_set({Word(), parse_word("ab", 2)}));
    CHECK(model.observed_sites == 2);
    CHECK(model.vertices.size() == 3);
    CHECK(model.pattern_count() == 4);
    CHECK(std::abs(stream_entropy(model).entropy - reference_entropy(model).entropy) <= 1e-14);
  }

  TEST_CASE("serial and parallel runs are bit-identical") {
    testing::Rng rng(99);
    const MarkovSpec inner = testing::random_markov(rng, 2, 3);
    const TreeModel model = tree_model(inner, {0, 0, 1}, 2, ball_words(2, 2));
    const StreamResult serial = stream_entropy(model, Execution::serial);
#ifdef _OPENMP
    const int before = omp_get_max_threads();
    for (int threads : {1, 2, 3, 8}) {
      omp_set_num_threads(threads);
      const StreamResult par = stream_entropy(model, Execution::parallel);
      CHECK(same_bits(par.entropy, serial.entropy));
      CHECK(same_bits(par.mass, serial.mass));
      const auto m = materialize_float(model, Execution::parallel);
      const auto s = materialize_float(model, Execution::serial);
      CHECK(m.keys == s.keys);
      CHECK(m.probs == s.probs);
    }
    omp_set_num_threads(before);
#else
    CHECK(same_bits(stream_entropy(model, Execution::parallel).entropy, serial.entropy));
#endif
  }

  TEST_CASE("table cap") {
    testing::Rng rng(1);
    const MarkovSpec inner = testing::random_markov(rng, 2, 3);
    const TreeModel model = tree_model(inner, {0, 0, 1}, 2, ball_words(2, 2));
    CHECK_THROWS_AS(stream_entropy(model, Execution::serial, 16), CapExceeded);
  }
}
