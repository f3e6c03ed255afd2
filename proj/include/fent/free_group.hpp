#pragma once

// Reduced words in the free group of rank r, the length-then-lexicographic
// well-ordering, and ball / sphere / initial-segment enumeration.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace fent {

inline constexpr int kMaxRank = 25;

// Index in [0, 2r): generator i is 2i, its inverse 2i+1.
struct Letter {
  std::uint8_t index = 0;

  constexpr int generator() const { return index >> 1; }
  constexpr bool is_inverse() const { return (index & 1) != 0; }
  friend constexpr bool operator==(Letter, Letter) = default;
};

constexpr Letter inverse(Letter x) { return Letter{static_cast<std::uint8_t>(x.index ^ 1)}; }
constexpr Letter generator_letter(int i) { return Letter{static_cast<std::uint8_t>(2 * i)}; }

// 'a','b','c','d','f',... ('e' is reserved for the identity); capitals are inverses.
char letter_char(Letter x);
Letter parse_letter(char c, int rank);

class Word {
 public:
  Word() = default;
  explicit Word(std::vector<std::uint8_t> letters);

  static Word identity() { return Word(); }
  static Word of(Letter x) { return Word({x.index}); }

  std::size_t length() const { return letters_.size(); }
  bool is_identity() const { return letters_.empty(); }
  Letter operator[](std::size_t i) const { return Letter{letters_[i]}; }
  Letter first() const { return Letter{letters_.front()}; }
  Letter last() const { return Letter{letters_.back()}; }
  const std::vector<std::uint8_t>& raw() const { return letters_; }

  // Reduced product with a single letter on either side.
  Word times(Letter x) const;
  Word left_times(Letter x) const;
  Word drop_last() const;
  Word drop_first() const;

  friend bool operator==(const Word&, const Word&) = default;

 private:
  std::vector<std::uint8_t> letters_;
};

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept;
};

Word multiply(const Word& g, const Word& h);
Word inverse(const Word& g);
Word power(const Word& g, long k);

std::string to_string(const Word& g);
// Accepts any letter string (reducing it) or "e" for the identity.
Word parse_word(std::string_view text, int rank);

// A total order on the 2r letters; the default is a < A < b < B < ...
class LetterOrder {
 public:
  explicit LetterOrder(int rank);
  // `sequence` lists all 2r letters, least first, e.g. "AabB".
  static LetterOrder parse(std::string_view sequence, int rank);

  int rank() const { return rank_; }
  int position(Letter x) const { return position_[x.index]; }
  const std::vector<Letter>& letters() const { return letters_; }
  bool is_default() const;
  std::string to_string() const;

  friend bool operator==(const LetterOrder& a, const LetterOrder& b) { return a.letters_ == b.letters_; }

 private:
  int rank_;
  std::vector<Letter> letters_;
  std::vector<int> position_;
};

// Shorter first; equal lengths compared letter by letter.
std::strong_ordering compare(const Word& g, const Word& h, const LetterOrder& order);

inline constexpr std::size_t kDefaultBallCap = 1'000'000;

std::size_t ball_size(int rank, int radius);

class OrderedBall {
 public:
  OrderedBall(int rank, int radius, LetterOrder order, std::size_t cap = kDefaultBallCap);

  int rank() const { return rank_; }
  int radius() const { return radius_; }
  const LetterOrder& order() const { return order_; }
  std::size_t size() const { return elements_.size(); }
  const Word& operator[](std::size_t i) const { return elements_[i]; }
  std::span<const Word> elements() const { return elements_; }

  std::optional<std::size_t> position(const Word& g) const;
  // Words of length exactly n (n <= radius), in order.
  std::span<const Word> sphere(int n) const;
  // Pre(g): everything strictly before g. g must lie in the ball.
  std::span<const Word> predecessors(const Word& g) const;

 private:
  int rank_;
  int radius_;
  LetterOrder order_;
  std::vector<Word> elements_;
  std::vector<std::size_t> sphere_start_;
  std::unordered_map<Word, std::size_t, WordHash> index_;
};

// Memoized per (rank, radius, order).
std::shared_ptr<const OrderedBall> ball(int rank, int radius, const LetterOrder& order,
                                        std::size_t cap = kDefaultBallCap);
std::shared_ptr<const OrderedBall> ball(int rank, int radius);

// g != identity: returns (s, s^-1 g) with s the leftmost letter.
std::pair<Letter, Word> parent(const Word& g);

// Vertices of the reduced path from g to h in the left Cayley graph (edges x -> s x).
std::vector<Word> geodesic(const Word& g, const Word& h);

// Sorted-set helpers used by the entropy code. Sets are kept in default order.
using WordSet = std::vector<Word>;
bool default_less(const Word& g, const Word& h);
WordSet normalize_set(WordSet words);
bool is_prefix_closed(const WordSet& sorted_set);
// Smallest prefix-closed set containing `words` and the identity.
WordSet prefix_hull(const WordSet& words);
WordSet translate(const Word& g, const WordSet& words);
WordSet set_union(const WordSet& a, const WordSet& b);
bool is_subset(const WordSet& small, const WordSet& big);

}  // namespace fent
