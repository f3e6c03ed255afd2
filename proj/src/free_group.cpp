#include "fent/free_group.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <tuple>

#include "fent/errors.hpp"

namespace fent {

namespace {

constexpr std::string_view kLetterNames = "abcdfghijklmnopqrstuvwxyz";

void check_rank(int rank) {
  if (rank < 1 || rank > kMaxRank) {
    throw InvalidArgument("rank must lie in [1, " + std::to_string(kMaxRank) + "], got " +
                          std::to_string(rank));
  }
}

}  // namespace

char letter_char(Letter x) {
  const char c = kLetterNames.at(static_cast<std::size_t>(x.generator()));
  return x.is_inverse() ? static_cast<char>(c - 'a' + 'A') : c;
}

Letter parse_letter(char c, int rank) {
  const bool upper = c >= 'A' && c <= 'Z';
  const char lower = upper ? static_cast<char>(c - 'A' + 'a') : c;
  const auto pos = kLetterNames.find(lower);
  if (pos == std::string_view::npos || static_cast<int>(pos) >= rank) {
    throw InvalidArgument(std::string("'") + c + "' is not a letter of the rank-" +
                          std::to_string(rank) + " free group");
  }
  return Letter{static_cast<std::uint8_t>(2 * pos + (upper ? 1 : 0))};
}

Word::Word(std::vector<std::uint8_t> letters) : letters_(std::move(letters)) {
  for (std::size_t i = 1; i < letters_.size(); ++i) {
    if ((letters_[i] ^ 1) == letters_[i - 1]) throw InvalidArgument("word is not reduced");
  }
}

Word Word::times(Letter x) const {
  Word out = *this;
  if (!out.letters_.empty() && out.letters_.back() == inverse(x).index) {
    out.letters_.pop_back();
  } else {
    out.letters_.push_back(x.index);
  }
  return out;
}

Word Word::left_times(Letter x) const {
  Word out;
  if (!letters_.empty() && letters_.front() == inverse(x).index) {
    out.letters_.assign(letters_.begin() + 1, letters_.end());
  } else {
    out.letters_.reserve(letters_.size() + 1);
    out.letters_.push_back(x.index);
    out.letters_.insert(out.letters_.end(), letters_.begin(), letters_.end());
  }
  return out;
}

Word Word::drop_last() const {
  Word out = *this;
  out.letters_.pop_back();
  return out;
}

Word Word::drop_first() const {
  Word out;
  out.letters_.assign(letters_.begin() + 1, letters_.end());
  return out;
}

std::size_t WordHash::operator()(const Word& w) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (auto c : w.raw()) h = (h ^ c) * 1099511628211ull;
  return h ^ w.length();
}

Word multiply(const Word& g, const Word& h) {
  const auto& a = g.raw();
  const auto& b = h.raw();
  std::size_t cancel = 0;
  while (cancel < a.size() && cancel < b.size() && (a[a.size() - 1 - cancel] ^ 1) == b[cancel]) ++cancel;
  std::vector<std::uint8_t> out(a.begin(), a.end() - static_cast<std::ptrdiff_t>(cancel));
  out.insert(out.end(), b.begin() + static_cast<std::ptrdiff_t>(cancel), b.end());
  return Word(std::move(out));
}

Word inverse(const Word& g) {
  std::vector<std::uint8_t> out(g.raw().rbegin(), g.raw().rend());
  for (auto& c : out) c ^= 1;
  return Word(std::move(out));
}

Word power(const Word& g, long k) {
  const Word base = k < 0 ? inverse(g) : g;
  Word out;
  for (long i = 0; i < (k < 0 ? -k : k); ++i) out = multiply(out, base);
  return out;
}

std::string to_string(const Word& g) {
  if (g.is_identity()) return "e";
  std::string s;
  s.reserve(g.length());
  for (std::size_t i = 0; i < g.length(); ++i) s.push_back(letter_char(g[i]));
  return s;
}

Word parse_word(std::string_view text, int rank) {
  check_rank(rank);
  if (text == "e" || text == "1") return Word();
  if (text.empty()) throw InvalidArgument("empty word (use \"e\" for the identity)");
  Word out;
  for (char c : text) out = out.times(parse_letter(c, rank));
  return out;
}

LetterOrder::LetterOrder(int rank) : rank_(rank), position_(2 * static_cast<std::size_t>(rank)) {
  check_rank(rank);
  for (int i = 0; i < 2 * rank; ++i) {
    letters_.push_back(Letter{static_cast<std::uint8_t>(i)});
    position_[i] = i;
  }
}

LetterOrder LetterOrder::parse(std::string_view sequence, int rank) {
  LetterOrder order(rank);
  if (sequence.size() != 2 * static_cast<std::size_t>(rank)) {
    throw InvalidArgument("letter order must list all " + std::to_string(2 * rank) + " letters");
  }
  std::vector<bool> seen(2 * static_cast<std::size_t>(rank), false);
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    const Letter x = parse_letter(sequence[i], rank);
    if (seen[x.index]) throw InvalidArgument(std::string("letter '") + sequence[i] + "' repeated in order");
    seen[x.index] = true;
    order.letters_[i] = x;
    order.position_[x.index] = static_cast<int>(i);
  }
  return order;
}

bool LetterOrder::is_default() const { return *this == LetterOrder(rank_); }

std::string LetterOrder::to_string() const {
  std::string s;
  for (auto x : letters_) s.push_back(letter_char(x));
  return s;
}

std::strong_ordering compare(const Word& g, const Word& h, const LetterOrder& order) {
  if (auto c = g.length() <=> h.length(); c != 0) return c;
  for (std::size_t i = 0; i < g.length(); ++i) {
    if (auto c = order.position(g[i]) <=> order.position(h[i]); c != 0) return c;
  }
  return std::strong_ordering::equal;
}

std::size_t ball_size(int rank, int radius) {
  if (radius < 0) return 0;
  if (rank == 1) return 2 * static_cast<std::size_t>(radius) + 1;
  std::size_t total = 1;
  std::size_t sphere = 2 * static_cast<std::size_t>(rank);
  for (int n = 1; n <= radius; ++n) {
    total += sphere;
    sphere *= 2 * static_cast<std::size_t>(rank) - 1;
  }
  return total;
}

OrderedBall::OrderedBall(int rank, int radius, LetterOrder order, std::size_t cap)
    : rank_(rank), radius_(radius), order_(std::move(order)) {
  check_rank(rank);
  if (radius < 0) throw InvalidArgument("ball radius must be non-negative");
  if (order_.rank() != rank) throw InvalidArgument("letter order rank does not match ball rank");
  const std::size_t expected = ball_size(rank, radius);
  if (expected > cap) {
    throw CapExceeded("ball of radius " + std::to_string(radius) + " in rank " + std::to_string(rank) +
                      " has " + std::to_string(expected) + " elements, cap is " + std::to_string(cap));
  }
  // Extending each word of S_n on the right by letters in order keeps S_{n+1}
  // sorted, because the order is lexicographic on equal lengths.
  elements_.reserve(expected);
  elements_.push_back(Word());
  sphere_start_.push_back(0);
  std::size_t begin = 0;
  for (int n = 1; n <= radius; ++n) {
    const std::size_t end = elements_.size();
    sphere_start_.push_back(end);
    for (std::size_t i = begin; i < end; ++i) {
      for (Letter x : order_.letters()) {
        const Word& w = elements_[i];
        if (!w.is_identity() && w.last() == inverse(x)) continue;
        elements_.push_back(w.times(x));
      }
    }
    begin = end;
  }
  sphere_start_.push_back(elements_.size());
  index_.reserve(elements_.size());
  for (std::size_t i = 0; i < elements_.size(); ++i) index_.emplace(elements_[i], i);
}

std::optional<std::size_t> OrderedBall::position(const Word& g) const {
  auto it = index_.find(g);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const Word> OrderedBall::sphere(int n) const {
  if (n < 0 || n > radius_) throw InvalidArgument("sphere radius outside the ball");
  return std::span<const Word>(elements_).subspan(sphere_start_[n], sphere_start_[n + 1] - sphere_start_[n]);
}

std::span<const Word> OrderedBall::predecessors(const Word& g) const {
  auto pos = position(g);
  if (!pos) throw InvalidArgument("word " + fent::to_string(g) + " lies outside the ball");
  return std::span<const Word>(elements_).first(*pos);
}

std::shared_ptr<const OrderedBall> ball(int rank, int radius, const LetterOrder& order, std::size_t cap) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, std::string>, std::shared_ptr<const OrderedBall>> cache;
  const auto key = std::make_tuple(rank, radius, order.to_string());
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) {
      if (it->second->size() > cap) {
        throw CapExceeded("ball of radius " + std::to_string(radius) + " exceeds cap " + std::to_string(cap));
      }
      return it->second;
    }
  }
  auto built = std::make_shared<const OrderedBall>(rank, radius, order, cap);
  std::lock_guard lock(mutex);
  return cache.emplace(key, std::move(built)).first->second;
}

std::shared_ptr<const OrderedBall> ball(int rank, int radius) { return ball(rank, radius, LetterOrder(rank)); }

std::pair<Letter, Word> parent(const Word& g) {
  if (g.is_identity()) throw InvalidArgument("the identity has no parent");
  return {g.first(), g.drop_first()};
}

std::vector<Word> geodesic(const Word& g, const Word& h) {
  // h = w g with w reduced; walk w's letters from the right.
  const Word w = multiply(h, inverse(g));
  std::vector<Word> path{g};
  for (std::size_t i = w.length(); i-- > 0;) path.push_back(path.back().left_times(w[i]));
  return path;
}

bool default_less(const Word& g, const Word& h) {
  if (g.length() != h.length()) return g.length() < h.length();
  return g.raw() < h.raw();
}

WordSet normalize_set(WordSet words) {
  std::sort(words.begin(), words.end(), default_less);
  words.erase(std::unique(words.begin(), words.end()), words.end());
  return words;
}

bool is_prefix_closed(const WordSet& sorted_set) {
  if (sorted_set.empty() || !sorted_set.front().is_identity()) return false;
  for (const auto& w : sorted_set) {
    if (w.is_identity()) continue;
    if (!std::binary_search(sorted_set.begin(), sorted_set.end(), w.drop_last(), default_less)) return false;
  }
  return true;
}

WordSet prefix_hull(const WordSet& words) {
  WordSet out{Word()};
  for (const auto& w : words) {
    Word p = w;
    while (!p.is_identity()) {
      out.push_back(p);
      p = p.drop_last();
    }
  }
  return normalize_set(std::move(out));
}

WordSet translate(const Word& g, const WordSet& words) {
  WordSet out;
  out.reserve(words.size());
  for (const auto& w : words) out.push_back(multiply(g, w));
  return normalize_set(std::move(out));
}

WordSet set_union(const WordSet& a, const WordSet& b) {
  WordSet out = a;
  out.insert(out.end(), b.begin(), b.end());
  return normalize_set(std::move(out));
}

bool is_subset(const WordSet& small, const WordSet& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end(), default_less);
}

}  // namespace fent
