#include "fent/system_io.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>

#include "fent/errors.hpp"

namespace fent {

namespace {

struct Token {
  std::string text;
  int column;
};

struct Line {
  int number;
  std::vector<Token> tokens;
};

std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> lines;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view raw = text.substr(pos, end - pos);
    ++number;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    Line line{number, {}};
    std::size_t i = 0;
    while (i < raw.size()) {
      if (raw[i] == ' ' || raw[i] == '\t' || raw[i] == '\r') {
        ++i;
        continue;
      }
      const std::size_t start = i;
      while (i < raw.size() && raw[i] != ' ' && raw[i] != '\t' && raw[i] != '\r') ++i;
      line.tokens.push_back({std::string(raw.substr(start, i - start)), static_cast<int>(start) + 1});
    }
    if (!line.tokens.empty()) lines.push_back(std::move(line));
    pos = end + 1;
  }
  return lines;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : lines_(tokenize(text)), last_line_(count_lines(text)) {}

  System parse() {
    System system;
    const Line& head = next("expected \"rank <r>\"");
    if (head.tokens[0].text != "rank") throw error(head, 0, "expected \"rank <r>\" before the system block");
    expect_arity(head, 2);
    system.rank = parse_int(head, 1);
    if (system.rank < 1 || system.rank > kMaxRank) {
      throw error(head, 1, "rank must lie in [1, " + std::to_string(kMaxRank) + "]");
    }
    rank_ = system.rank;
    system.spec = block();
    if (cursor_ < lines_.size()) throw error(lines_[cursor_], 0, "unexpected text after the system block");
    return system;
  }

 private:
  static int count_lines(std::string_view text) {
    return static_cast<int>(std::count(text.begin(), text.end(), '\n')) + 1;
  }

  ParseError error(const Line& line, std::size_t token, const std::string& what) const {
    const int column = token < line.tokens.size() ? line.tokens[token].column
                                                   : line.tokens.back().column + static_cast<int>(line.tokens.back().text.size());
    return ParseError(line.number, column, what);
  }

  const Line& next(const std::string& expectation) {
    if (cursor_ >= lines_.size()) throw ParseError(last_line_, 1, "unexpected end of input: " + expectation);
    return lines_[cursor_++];
  }

  void expect_arity(const Line& line, std::size_t n) const {
    if (line.tokens.size() < n) throw error(line, line.tokens.size(), "missing value for \"" + line.tokens[0].text + "\"");
    if (line.tokens.size() > n) throw error(line, n, "unexpected extra value");
  }

  int parse_int(const Line& line, std::size_t token) const {
    const auto& t = line.tokens[token].text;
    if (t.empty() || t.size() > 9 || !std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      throw error(line, token, "expected a non-negative integer, got \"" + t + "\"");
    }
    return std::stoi(t);
  }

  Rational parse_number(const Line& line, std::size_t token) const {
    try {
      return parse_rational(line.tokens[token].text);
    } catch (const InvalidArgument& e) {
      throw error(line, token, e.what());
    }
  }

  std::vector<std::string> labels(const Line& line) const {
    if (line.tokens.size() < 2) throw error(line, 1, "missing value for \"" + line.tokens[0].text + "\"");
    std::vector<std::string> out;
    for (std::size_t i = 1; i < line.tokens.size(); ++i) out.push_back(line.tokens[i].text);
    return out;
  }

  std::vector<Rational> numbers(const Line& line, std::size_t from = 1) const {
    if (line.tokens.size() <= from) throw error(line, from, "missing value for \"" + line.tokens[0].text + "\"");
    std::vector<Rational> out;
    for (std::size_t i = from; i < line.tokens.size(); ++i) out.push_back(parse_number(line, i));
    return out;
  }

  Letter letter(const Line& line, std::size_t token) const {
    const auto& t = line.tokens[token].text;
    try {
      if (t.size() != 1) throw InvalidArgument("expected a single generator letter");
      return parse_letter(t[0], rank_);
    } catch (const InvalidArgument& e) {
      throw error(line, token, std::string(e.what()) + ", got \"" + t + "\"");
    }
  }

  int index_of(const Line& line, std::size_t token, const std::vector<std::string>& names, const std::string& what) const {
    const auto it = std::find(names.begin(), names.end(), line.tokens[token].text);
    if (it == names.end()) throw error(line, token, "unknown " + what + " \"" + line.tokens[token].text + "\"");
    return static_cast<int>(it - names.begin());
  }

  template <class T>
  static void once(std::optional<T>& slot, T value, const Line& line, const Parser& p) {
    if (slot) throw p.error(line, 0, "duplicate \"" + line.tokens[0].text + "\"");
    slot = std::move(value);
  }

  void require(bool present, const Line& opener, const std::string& field) const {
    if (!present) throw error(opener, 1, "system block is missing \"" + field + "\"");
  }

  SystemSpec block() {
    const Line& opener = next("expected \"system <kind>\"");
    if (opener.tokens[0].text != "system") throw error(opener, 0, "expected \"system <kind>\"");
    expect_arity(opener, 2);
    const std::string& kind = opener.tokens[1].text;
    if (kind == "bernoulli" || kind == "coset-bernoulli") return bernoulli(opener, kind == "coset-bernoulli");
    if (kind == "markov") return SystemSpec{markov(opener)};
    if (kind == "hidden-markov") return hidden_markov(opener);
    if (kind == "finite-action") return finite_action(opener);
    if (kind == "direct-sum") return direct_sum(opener);
    throw error(opener, 1, "unknown system kind \"" + kind + "\"");
  }

  bool at_end() {
    const Line& line = next("expected \"end\"");
    if (line.tokens[0].text != "end") {
      --cursor_;
      return false;
    }
    expect_arity(line, 1);
    return true;
  }

  SystemSpec bernoulli(const Line& opener, bool coset) {
    std::optional<std::vector<std::string>> alphabet;
    std::optional<std::vector<Rational>> base;
    std::optional<int> marked;
    while (!at_end()) {
      const Line& line = next("");
      const auto& key = line.tokens[0].text;
      if (key == "alphabet") {
        once(alphabet, labels(line), line, *this);
      } else if (key == "base") {
        once(base, numbers(line), line, *this);
      } else if (key == "marked" && coset) {
        expect_arity(line, 2);
        const Letter t = letter(line, 1);
        if (t.is_inverse()) throw error(line, 1, "marked generator must be a generator, not an inverse");
        once(marked, t.generator(), line, *this);
      } else {
        throw error(line, 0, "unknown field \"" + key + "\"");
      }
    }
    require(alphabet.has_value(), opener, "alphabet");
    require(base.has_value(), opener, "base");
    if (base->size() != alphabet->size()) throw error(opener, 1, "base and alphabet differ in length");
    FiniteDistribution d{*alphabet, *base};
    if (!coset) return SystemSpec{BernoulliSpec{std::move(d)}};
    require(marked.has_value(), opener, "marked");
    return SystemSpec{CosetBernoulliSpec{std::move(d), *marked}};
  }

  MarkovSpec markov(const Line& opener) {
    std::optional<std::vector<std::string>> alphabet;
    std::optional<std::vector<Rational>> stationary;
    std::vector<std::optional<Matrix>> transitions(2 * static_cast<std::size_t>(rank_));
    while (!at_end()) {
      const Line& line = next("");
      const auto& key = line.tokens[0].text;
      if (key == "alphabet") {
        once(alphabet, labels(line), line, *this);
      } else if (key == "stationary") {
        once(stationary, numbers(line), line, *this);
      } else if (key == "transition") {
        expect_arity(line, 2);
        if (!alphabet) throw error(line, 0, "\"alphabet\" must precede \"transition\"");
        const std::size_t k = alphabet->size();
        Matrix m;
        for (std::size_t row = 0; row < k; ++row) {
          const Line& values = next("expected " + std::to_string(k) + " matrix rows");
          if (values.tokens.size() != k) {
            throw error(values, std::min(values.tokens.size(), k), "expected " + std::to_string(k) + " entries in the row");
          }
          m.push_back(numbers(values, 0));
        }
        if (line.tokens[1].text == "all") {
          for (auto& t : transitions) {
            if (t) throw error(line, 1, "transition given twice");
            t = m;
          }
        } else {
          auto& slot = transitions[letter(line, 1).index];
          if (slot) throw error(line, 1, "transition given twice");
          slot = std::move(m);
        }
      } else {
        throw error(line, 0, "unknown field \"" + key + "\"");
      }
    }
    require(alphabet.has_value(), opener, "alphabet");
    require(stationary.has_value(), opener, "stationary");
    MarkovSpec spec{*alphabet, *stationary, {}};
    for (std::size_t s = 0; s < transitions.size(); ++s) {
      if (!transitions[s]) {
        throw error(opener, 1, std::string("missing transition for letter ") + letter_char(Letter{static_cast<std::uint8_t>(s)}));
      }
      spec.transitions.push_back(std::move(*transitions[s]));
    }
    return spec;
  }

  SystemSpec hidden_markov(const Line& opener) {
    std::optional<SystemSpec> inner;
    std::optional<std::vector<std::string>> observed;
    std::optional<std::vector<std::string>> map;
    const Line* map_line = nullptr;
    while (!at_end()) {
      const Line& line = lines_[cursor_];
      const auto& key = line.tokens[0].text;
      if (key == "system") {
        if (inner) throw error(line, 0, "hidden-markov takes one inner system");
        inner = block();
        if (!std::holds_alternative<BernoulliSpec>(inner->kind) && !std::holds_alternative<MarkovSpec>(inner->kind)) {
          throw error(line, 1, "inner system must be bernoulli or markov");
        }
        continue;
      }
      ++cursor_;
      if (key == "observed") {
        once(observed, labels(line), line, *this);
      } else if (key == "map") {
        once(map, labels(line), line, *this);
        map_line = &line;
      } else {
        throw error(line, 0, "unknown field \"" + key + "\"");
      }
    }
    require(inner.has_value(), opener, "system (inner)");
    require(observed.has_value(), opener, "observed");
    require(map.has_value(), opener, "map");
    HiddenMarkovSpec h;
    if (auto* b = std::get_if<BernoulliSpec>(&inner->kind)) {
      h.inner = *b;
    } else {
      h.inner = std::get<MarkovSpec>(inner->kind);
    }
    h.observed = *observed;
    for (std::size_t i = 0; i < map->size(); ++i) h.letter_map.push_back(index_of(*map_line, i + 1, *observed, "observed letter"));
    return SystemSpec{std::move(h)};
  }

  SystemSpec finite_action(const Line& opener) {
    std::optional<std::vector<std::string>> points;
    std::optional<std::vector<Rational>> mass;
    std::optional<std::vector<std::string>> partition;
    std::vector<std::optional<std::vector<int>>> maps(static_cast<std::size_t>(rank_));
    while (!at_end()) {
      const Line& line = next("");
      const auto& key = line.tokens[0].text;
      if (key == "points") {
        once(points, labels(line), line, *this);
      } else if (key == "mass") {
        once(mass, numbers(line), line, *this);
      } else if (key == "partition") {
        once(partition, labels(line), line, *this);
      } else if (key == "generator") {
        if (!points) throw error(line, 0, "\"points\" must precede \"generator\"");
        expect_arity(line, points->size() + 2);
        const Letter s = letter(line, 1);
        if (s.is_inverse()) throw error(line, 1, "give the map of a generator, not of an inverse");
        std::vector<int> map;
        for (std::size_t i = 0; i < points->size(); ++i) map.push_back(index_of(line, i + 2, *points, "point"));
        once(maps[s.generator()], std::move(map), line, *this);
      } else {
        throw error(line, 0, "unknown field \"" + key + "\"");
      }
    }
    require(points.has_value(), opener, "points");
    require(mass.has_value(), opener, "mass");
    FiniteActionSpec f{*points, *mass, {}, partition};
    for (int i = 0; i < rank_; ++i) {
      if (!maps[i]) throw error(opener, 1, std::string("missing generator ") + letter_char(generator_letter(i)));
      f.generator_maps.push_back(std::move(*maps[i]));
    }
    return SystemSpec{std::move(f)};
  }

  SystemSpec direct_sum(const Line& opener) {
    DirectSumSpec d;
    while (!at_end()) {
      const Line& line = next("");
      if (line.tokens[0].text != "component") throw error(line, 0, "expected \"component <weight>\"");
      expect_arity(line, 2);
      d.weights.push_back(parse_number(line, 1));
      d.components.push_back(block());
    }
    if (d.components.empty()) throw error(opener, 1, "direct sum has no components");
    return SystemSpec{std::move(d)};
  }

  std::vector<Line> lines_;
  int last_line_;
  std::size_t cursor_ = 0;
  int rank_ = 0;
};

class Printer {
 public:
  explicit Printer(int rank) : rank_(rank) {}

  std::string str() const { return out_.str(); }

  void line(int depth, const std::string& text) { out_ << std::string(2 * static_cast<std::size_t>(depth), ' ') << text << '\n'; }

  static std::string join(const std::vector<std::string>& items) {
    std::string s;
    for (const auto& item : items) s += " " + item;
    return s;
  }
  static std::string join(const std::vector<Rational>& items) {
    std::string s;
    for (const auto& item : items) s += " " + format_rational(item);
    return s;
  }

  void matrix(int depth, const Matrix& m) {
    for (const auto& row : m) line(depth, join(row).substr(1));
  }

  void markov_body(int depth, const MarkovSpec& m) {
    line(depth, "alphabet" + join(m.alphabet));
    line(depth, "stationary" + join(m.stationary));
    const bool uniform = std::all_of(m.transitions.begin(), m.transitions.end(), [&](const Matrix& t) { return t == m.transitions.front(); });
    if (uniform && !m.transitions.empty()) {
      line(depth, "transition all");
      matrix(depth + 1, m.transitions.front());
      return;
    }
    for (std::size_t s = 0; s < m.transitions.size(); ++s) {
      line(depth, std::string("transition ") + letter_char(Letter{static_cast<std::uint8_t>(s)}));
      matrix(depth + 1, m.transitions[s]);
    }
  }

  void block(int depth, const SystemSpec& spec) {
    line(depth, "system " + kind_name(spec));
    const int d = depth + 1;
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, BernoulliSpec>) {
            line(d, "alphabet" + join(s.base.labels));
            line(d, "base" + join(s.base.weights));
          } else if constexpr (std::is_same_v<T, CosetBernoulliSpec>) {
            line(d, "alphabet" + join(s.base.labels));
            line(d, "base" + join(s.base.weights));
            line(d, std::string("marked ") + letter_char(generator_letter(s.marked)));
          } else if constexpr (std::is_same_v<T, MarkovSpec>) {
            markov_body(d, s);
          } else if constexpr (std::is_same_v<T, HiddenMarkovSpec>) {
            std::visit([&](const auto& inner) { block(d, SystemSpec{inner}); }, s.inner);
            line(d, "observed" + join(s.observed));
            std::vector<std::string> images;
            for (int y : s.letter_map) images.push_back(s.observed.at(y));
            line(d, "map" + join(images));
          } else if constexpr (std::is_same_v<T, FiniteActionSpec>) {
            line(d, "points" + join(s.points));
            line(d, "mass" + join(s.mass));
            for (std::size_t i = 0; i < s.generator_maps.size(); ++i) {
              std::vector<std::string> images;
              for (int y : s.generator_maps[i]) images.push_back(s.points.at(y));
              line(d, std::string("generator ") + letter_char(generator_letter(static_cast<int>(i))) + join(images));
            }
            if (s.partition) line(d, "partition" + join(*s.partition));
          } else {
            for (std::size_t i = 0; i < s.components.size(); ++i) {
              line(d, "component " + format_rational(s.weights.at(i)));
              block(d + 1, s.components[i]);
            }
          }
        },
        spec.kind);
    line(depth, "end");
  }

  int rank() const { return rank_; }

 private:
  int rank_;
  std::ostringstream out_;
};

}  // namespace

System parse_system(std::string_view text) { return Parser(text).parse(); }

System load_system(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_system(buffer.str());
}

std::string print_system(const System& system) {
  Printer p(system.rank);
  p.line(0, "rank " + std::to_string(system.rank));
  p.block(0, system.spec);
  return p.str();
}

}  // namespace fent
