#include "fent/block_entropy.hpp"

#include <algorithm>
#include <map>

#include "fent/errors.hpp"

namespace fent {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::string set_key(const WordSet& F) {
  std::string key;
  for (const auto& g : F) {
    key += to_string(g);
    key += ' ';
  }
  return key;
}

WordSet to_identity(const WordSet& sorted) {
  const Word shift = inverse(sorted.front());
  WordSet moved;
  moved.reserve(sorted.size());
  for (const auto& g : sorted) moved.push_back(multiply(shift, g));
  return normalize_set(std::move(moved));
}

}  // namespace

bool is_connected(const WordSet& F) {
  if (F.empty()) return true;
  return is_prefix_closed(to_identity(normalize_set(F)));
}

Nats edge_entropy(const MarkovSpec& m, Letter s) {
  LogCombination c;
  const auto& P = m.transitions[s.index];
  for (std::size_t a = 0; a < m.alphabet.size(); ++a) {
    if (sgn(m.stationary[a]) == 0) continue;
    for (const auto& q : P[a]) c.add_plogp(q, m.stationary[a]);
  }
  return Nats::exactly(std::move(c));
}

EntropyEngine::EntropyEngine(System system, EngineOptions options) : system_(std::move(system)), options_(options) {
  require_valid(system_);
}

Nats EntropyEngine::block(const WordSet& F, Relative relative) {
  if (F.empty()) return Nats();
  const WordSet set = normalize_set(F);
  const int rel = relative == Relative::components && std::holds_alternative<DirectSumSpec>(system_.spec.kind) ? 1 : 0;
  const auto key = std::make_pair(rel, set_key(set));
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  Nats h;
  if (rel == 1) {
    const auto& d = std::get<DirectSumSpec>(system_.spec.kind);
    for (std::size_t i = 0; i < d.components.size(); ++i) h += compute(d.components[i], set) * d.weights[i];
  } else {
    h = compute(system_.spec, set);
  }
  if (options_.mode == Mode::floating) h = h.dropped_exactness();
  cache_.emplace(key, h);
  return h;
}

Nats EntropyEngine::kernel(const MarkovSpec& inner, const std::vector<int>& emit, int observed, const WordSet& F) {
  const TreeModel model = tree_model(inner, emit, observed, F);
  const std::uint64_t patterns = model.pattern_count();
  if (patterns > options_.pattern_cap) {
    throw CapExceeded(std::to_string(observed) + "^" + std::to_string(F.size()) + " patterns exceed the pattern cap of " +
                      std::to_string(options_.pattern_cap));
  }
  if (options_.mode == Mode::rational && patterns <= kRationalPatternLimit) {
    return exact_entropy(materialize_exact(model).probs);
  }
  return Nats::approximate(stream_entropy(model, options_.execution).entropy);
}

Nats EntropyEngine::compute(const SystemSpec& spec, const WordSet& F) {
  const int r = system_.rank;
  return std::visit(
      overloaded{
          [&](const BernoulliSpec& b) { return shannon(b.base) * static_cast<long>(F.size()); },
          [&](const CosetBernoulliSpec& c) {
            WordSet reps;
            for (const auto& g : F) reps.push_back(coset_representative(g, c.marked));
            return shannon(c.base) * static_cast<long>(normalize_set(std::move(reps)).size());
          },
          [&](const MarkovSpec& m) {
            if (!is_connected(F)) return kernel(m, [&] {
              std::vector<int> id(m.alphabet.size());
              for (std::size_t i = 0; i < id.size(); ++i) id[i] = static_cast<int>(i);
              return id;
            }(), static_cast<int>(m.alphabet.size()), F);
            // Joint law of a connected set: pi at one site times one kernel per tree edge.
            Nats h = shannon(std::span<const Rational>(m.stationary));
            std::map<int, long> edges;
            for (const auto& g : to_identity(F)) {
              if (!g.is_identity()) ++edges[g.last().index];
            }
            for (const auto& [s, count] : edges) h += edge_entropy(m, Letter{static_cast<std::uint8_t>(s)}) * count;
            return h;
          },
          [&](const HiddenMarkovSpec& hm) {
            return kernel(inner_markov(hm, r), hm.letter_map, static_cast<int>(hm.observed.size()), F);
          },
          [&](const FiniteActionSpec& f) {
            const auto labels = canonical_partition(System{r, spec}).labels;
            std::vector<int> point_label(f.points.size());
            for (std::size_t x = 0; x < f.points.size(); ++x) {
              const auto& l = f.partition ? (*f.partition)[x] : f.points[x];
              point_label[x] = static_cast<int>(std::find(labels.begin(), labels.end(), l) - labels.begin());
            }
            std::vector<Word> inverses;
            for (const auto& g : F) inverses.push_back(inverse(g));
            std::map<std::vector<int>, Rational> blocks;
            for (std::size_t x = 0; x < f.points.size(); ++x) {
              std::vector<int> y;
              for (const auto& g : inverses) y.push_back(point_label[act(f, g, static_cast<int>(x))]);
              blocks[y] += f.mass[x];
            }
            std::vector<Rational> masses;
            for (auto& [y, m] : blocks) masses.push_back(m);
            return shannon(std::span<const Rational>(masses));
          },
          [&](const DirectSumSpec& d) {
            Nats h = shannon(std::span<const Rational>(d.weights));
            for (std::size_t i = 0; i < d.components.size(); ++i) h += compute(d.components[i], F) * d.weights[i];
            return h;
          },
      },
      spec.kind);
}

}  // namespace fent
