#include "doctest.h"

#include <cmath>

#include "fent/errors.hpp"
#include "fent/marginals.hpp"
#include "fent/system_io.hpp"
#include "support.hpp"

using namespace fent;

namespace {

WordSet ball_words(int rank, int n) {
  const auto B = ball(rank, n);
  return WordSet(B->elements().begin(), B->elements().end());
}

WordSet words(std::initializer_list<const char*> xs, int rank = 2) {
  WordSet out;
  for (auto x : xs) out.push_back(parse_word(x, rank));
  return normalize_set(out);
}

const char* kSymmetric = R"(rank 2
system markov
  alphabet 0 1
  stationary 1/2 1/2
  transition all
    9/10 1/10
    1/10 9/10
end
)";

const char* kHalf = "rank 2\nsystem bernoulli\n  alphabet 0 1\n  base 1/2 1/2\nend\n";

}  // namespace

TEST_SUITE("marginals") {
  TEST_CASE("Bernoulli on B_1 is uniform over 32 patterns") {
    const System s = parse_system(kHalf);
    const auto pd = marginal(s, ball_words(2, 1));
    CHECK(pd.exact);
    REQUIRE(pd.size() == 32);
    for (const auto& p : pd.exact_probs) CHECK(p == Rational(1, 32));
    CHECK(exactly_equal(entropy_of(pd), shannon(std::vector<Rational>{Rational(1, 2), Rational(1, 2)}) * Rational(5)));
    const auto oracle = oracle_marginal(s, ball_words(2, 1));
    CHECK(identical(pd, oracle));
  }

  TEST_CASE("symmetric Markov on {1, a}") {
    const System s = parse_system(kSymmetric);
    const auto pd = marginal(s, words({"e", "a"}));
    REQUIRE(pd.size() == 4);
    CHECK(pd.exact_probs[0] == Rational(9, 20));
    CHECK(pd.exact_probs[1] == Rational(1, 20));
    CHECK(pd.exact_probs[2] == Rational(1, 20));
    CHECK(pd.exact_probs[3] == Rational(9, 20));
    const Nats h = conditional_between(pd, words({"e"}));
    CHECK(h.value() == doctest::Approx(0.325082973391448).epsilon(1e-12));
    CHECK(conditional_between(pd, pd.support).value() == 0.0);
    CHECK(pd.pattern_string(1) == "01");
  }

  TEST_CASE("disconnected sets are rejected with the hull") {
    const System s = parse_system(kSymmetric);
    try {
      marginal(s, words({"e", "ab"}));
      FAIL("expected InvalidArgument");
    } catch (const InvalidArgument& e) {
      CHECK(std::string(e.what()).find("{e, a, ab}") != std::string::npos);
    }
    CHECK_THROWS_AS(conditional_between(marginal(s, words({"e", "a"})), words({"b"})), InvalidArgument);
  }

  TEST_CASE("oracle agreement on random Markov systems over B_1") {
    testing::Rng rng(50);
    for (int t = 0; t < 50; ++t) {
      const System s = testing::make_system(2, {testing::random_markov(rng, 2, testing::uniform_int(rng, 2, 3))});
      const auto F = ball_words(2, 1);
      CHECK(identical(marginal(s, F), oracle_marginal(s, F)));
    }
  }

  TEST_CASE("oracle agreement on hidden-Markov, finite actions, direct sums and cosets") {
    testing::Rng rng(51);
    const WordSet pre_ab = words({"e", "a", "A", "b", "B", "aa", "ab"});
    for (int t = 0; t < 10; ++t) {
      const System h = testing::make_system(2, {testing::random_hidden_markov(rng, 2)});
      // full-support inner chains: the oracle enumerates B_1 only
      CHECK(identical(marginal(h, ball_words(2, 1)), oracle_marginal(h, ball_words(2, 1))));
      const System f = testing::make_system(2, {testing::random_finite_action(rng, 2)});
      CHECK(identical(marginal(f, ball_words(2, 2)), oracle_marginal(f, ball_words(2, 2))));
      const System d = testing::make_system(2, {testing::random_direct_sum(rng, 2)});
      CHECK(identical(marginal(d, ball_words(2, 1)), oracle_marginal(d, ball_words(2, 1))));
    }
    const System c = parse_system("rank 2\nsystem coset-bernoulli\n  alphabet 0 1 2\n  base 1/2 1/3 1/6\n  marked b\nend\n");
    CHECK(identical(marginal(c, pre_ab), oracle_marginal(c, pre_ab)));
    const System c2 = parse_system("rank 2\nsystem coset-bernoulli\n  alphabet 0 1\n  base 1/3 2/3\n  marked b\nend\n");
    CHECK(identical(marginal(c2, ball_words(2, 2)), oracle_marginal(c2, ball_words(2, 2))));
  }

  TEST_CASE("float mode agrees with rational mode") {
    testing::Rng rng(52);
    const System h = testing::make_system(2, {testing::random_hidden_markov(rng, 2)});
    MarginalOptions fl;
    fl.mode = Mode::floating;
    const auto a = marginal(h, ball_words(2, 2));
    const auto b = marginal(h, ball_words(2, 2), fl);
    CHECK_FALSE(b.exact);
    CHECK(max_difference(a, b) <= 1e-15);
    CHECK(std::abs(entropy_of(a).value() - entropy_of(b).value()) <= 1e-9);
  }

  TEST_CASE("restriction consistency") {
    testing::Rng rng(53);
    for (int t = 0; t < 5; ++t) {
      const System h = testing::make_system(2, {testing::random_hidden_markov(rng, 2)});
      const auto big = marginal(h, ball_words(2, 2));
      CHECK(identical(restrict_to(big, ball_words(2, 1)), marginal(h, ball_words(2, 1))));
      const WordSet sub = words({"e", "ab"});
      CHECK(identical(restrict_to(big, sub), restrict_to(marginal(h, prefix_hull(sub)), sub)));
    }
  }

  TEST_CASE("shift invariance of Markov pattern laws") {
    testing::Rng rng(54);
    const System s = testing::make_system(2, {testing::random_markov(rng, 2, 2)});
    const auto B2 = marginal(s, ball_words(2, 2));
    // a B_1 is connected after translating back; its law is that of B_1
    for (const char* g : {"a", "B"}) {
      const WordSet moved = translate(parse_word(g, 2), ball_words(2, 1));
      auto shifted = restrict_to(B2, moved);
      CHECK(exactly_equal(entropy_of(shifted), entropy_of(marginal(s, ball_words(2, 1)))));
    }
  }

  TEST_CASE("finite action with trivial action") {
    const System f = parse_system("rank 2\nsystem finite-action\n  points p q s\n  mass 1/2 1/4 1/4\n  generator a p q s\n  generator b p q s\nend\n");
    CHECK(oracle_marginal(f, ball_words(2, 2)).size() == 3);
  }

  TEST_CASE("caps") {
    const System s = parse_system(kSymmetric);
    MarginalOptions o;
    o.pattern_cap = 16;
    CHECK_THROWS_AS(marginal(s, ball_words(2, 1), o), CapExceeded);
    CHECK_THROWS_AS(oracle_marginal(s, ball_words(2, 2), 1000), CapExceeded);
  }

  TEST_CASE("dump is sorted") {
    const System s = parse_system(kSymmetric);
    CHECK(dump(marginal(s, words({"e", "a"}))) == "00 9/20\n01 1/20\n10 1/20\n11 9/20\n");
  }
}
