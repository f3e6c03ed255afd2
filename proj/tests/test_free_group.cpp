#include "doctest.h"

#include <algorithm>
#include <queue>
#include <random>
#include <set>

#include "fent/errors.hpp"
#include "fent/free_group.hpp"

using namespace fent;

namespace {

Word w(const char* s, int rank = 2) { return parse_word(s, rank); }

// BFS over the Cayley graph, independent of OrderedBall.
std::size_t bfs_ball_size(int rank, int radius) {
  std::set<std::vector<std::uint8_t>> seen{{}};
  std::queue<std::pair<Word, int>> q;
  q.push({Word(), 0});
  while (!q.empty()) {
    auto [g, d] = q.front();
    q.pop();
    if (d == radius) continue;
    for (int i = 0; i < 2 * rank; ++i) {
      const Word h = g.times(Letter{static_cast<std::uint8_t>(i)});
      if (seen.insert(h.raw()).second) q.push({h, d + 1});
    }
  }
  return seen.size();
}

Word random_word(std::mt19937_64& rng, int rank, int max_len) {
  std::uniform_int_distribution<int> len(0, max_len), letter(0, 2 * rank - 1);
  Word g;
  for (int n = len(rng); n > 0; --n) g = g.times(Letter{static_cast<std::uint8_t>(letter(rng))});
  return g;
}

}  // namespace

TEST_SUITE("free_group") {
  TEST_CASE("ball sizes") {
    const std::size_t expected[] = {1, 5, 17, 53};
    for (int n = 0; n <= 3; ++n) {
      CHECK(ball(2, n)->size() == expected[n]);
      CHECK(ball_size(2, n) == expected[n]);
      CHECK(bfs_ball_size(2, n) == expected[n]);
    }
    for (int r = 1; r <= 4; ++r) {
      for (int n = 0; n <= 3; ++n) CHECK(ball(r, n)->size() == bfs_ball_size(r, n));
    }
  }

  TEST_CASE("printing and parsing") {
    CHECK(to_string(Word()) == "e");
    CHECK(to_string(w("abAB")) == "abAB");
    CHECK(w("aA").is_identity());
    CHECK(to_string(w("abBc", 3)) == "ac");
    CHECK(to_string(w("e")) == "e");
    CHECK_THROWS_AS(w("c"), InvalidArgument);
    CHECK(letter_char(generator_letter(4)) == 'f');
  }

  TEST_CASE("Pre(ab) in the default order") {
    const auto B = ball(2, 2);
    const auto pre = B->predecessors(w("ab"));
    const std::vector<std::string> expected = {"e", "a", "A", "b", "B", "aa"};
    REQUIRE(pre.size() == expected.size());
    for (std::size_t i = 0; i < pre.size(); ++i) CHECK(to_string(pre[i]) == expected[i]);
  }

  TEST_CASE("Pre(g) is the initial segment under compare") {
    for (const char* order : {"aAbB", "AabB", "bBaA", "BAba"}) {
      const LetterOrder o = LetterOrder::parse(order, 2);
      const auto B = ball(2, 2, o);
      for (const auto& g : B->elements()) {
        std::vector<Word> filtered;
        for (const auto& h : B->elements()) {
          if (compare(h, g, o) == std::strong_ordering::less) filtered.push_back(h);
        }
        const auto pre = B->predecessors(g);
        REQUIRE(pre.size() == filtered.size());
        CHECK(std::equal(pre.begin(), pre.end(), filtered.begin()));
      }
    }
  }

  TEST_CASE("compare is a strict total order extending length") {
    const LetterOrder o = LetterOrder::parse("bAaB", 2);
    const auto B = ball(2, 2, o);
    for (const auto& g : B->elements()) {
      CHECK(compare(g, g, o) == std::strong_ordering::equal);
      for (const auto& h : B->elements()) {
        if (g.length() < h.length()) CHECK(compare(g, h, o) == std::strong_ordering::less);
        if (!(g == h)) CHECK(compare(g, h, o) != std::strong_ordering::equal);
        CHECK((compare(g, h, o) < 0) == (compare(h, g, o) > 0));
      }
    }
    CHECK_THROWS_AS(LetterOrder::parse("aabB", 2), InvalidArgument);
  }

  TEST_CASE("parent") {
    CHECK(letter_char(parent(w("ab")).first) == 'a');
    CHECK(to_string(parent(w("ab")).second) == "b");
    CHECK(letter_char(parent(w("a")).first) == 'a');
    CHECK(parent(w("a")).second.is_identity());
    CHECK(letter_char(parent(w("Ba")).first) == 'B');
    CHECK(to_string(parent(w("Ba")).second) == "a");

    std::mt19937_64 rng(7);
    for (int i = 0; i < 1000; ++i) {
      Word g = random_word(rng, 3, 8);
      const std::size_t len = g.length();
      std::size_t steps = 0;
      while (!g.is_identity()) {
        const auto [s, p] = parent(g);
        CHECK(p.length() + 1 == g.length());
        CHECK(multiply(Word::of(s), p) == g);
        g = p;
        ++steps;
      }
      CHECK(steps == len);
    }
  }

  TEST_CASE("geodesic") {
    auto strings = [](const std::vector<Word>& path) {
      std::vector<std::string> out;
      for (const auto& g : path) out.push_back(to_string(g));
      return out;
    };
    CHECK(strings(geodesic(Word(), w("ab"))) == std::vector<std::string>{"e", "b", "ab"});
    CHECK(strings(geodesic(w("ab"), w("ab"))) == std::vector<std::string>{"ab"});
    CHECK(geodesic(w("a"), w("b")).size() == 3);
    CHECK(strings(geodesic(w("a"), w("b"))) == std::vector<std::string>{"a", "e", "b"});
  }

  TEST_CASE("inverses on random words") {
    std::mt19937_64 rng(1234);
    for (int i = 0; i < 10000; ++i) {
      const Word g = random_word(rng, 4, 12);
      CHECK(multiply(g, inverse(g)).is_identity());
      CHECK(multiply(inverse(g), g).is_identity());
    }
  }

  TEST_CASE("sphere adjacency") {
    for (int r = 1; r <= 3; ++r) {
      const auto B = ball(r, 4);
      for (int n = 1; n < 4; ++n) {
        const auto next = B->sphere(n + 1);
        for (const auto& g : B->sphere(n)) {
          int neighbours = 0;
          for (int i = 0; i < 2 * r; ++i) {
            const Word h = g.left_times(Letter{static_cast<std::uint8_t>(i)});
            if (std::find(next.begin(), next.end(), h) != next.end()) ++neighbours;
          }
          CHECK(neighbours == 2 * r - 1);
        }
      }
    }
  }

  TEST_CASE("ball cap") {
    CHECK_THROWS_AS(ball(3, 9, LetterOrder(3), 1000), CapExceeded);
  }

  TEST_CASE("set helpers") {
    const WordSet F = normalize_set({w("ab"), w("b"), Word(), w("ab")});
    CHECK(F.size() == 3);
    CHECK_FALSE(is_prefix_closed(F));
    const WordSet hull = prefix_hull({w("ab")});
    CHECK(is_prefix_closed(hull));
    CHECK(hull.size() == 3);
    CHECK(is_subset(normalize_set({w("a")}), hull));
    CHECK(translate(w("A"), normalize_set({w("a"), w("ab")})) == normalize_set({Word(), w("b")}));
    CHECK(power(w("ab"), -2) == w("BABA"));
  }
}
