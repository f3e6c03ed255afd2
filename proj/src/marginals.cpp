#include "fent/marginals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>

#include "fent/errors.hpp"

namespace fent {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::uint64_t checked_power(std::uint64_t base, std::size_t exponent, std::uint64_t cap, const std::string& what) {
  std::uint64_t out = 1;
  for (std::size_t i = 0; i < exponent; ++i) {
    if (base != 0 && out > cap / base) {
      throw CapExceeded(what + ": " + std::to_string(base) + "^" + std::to_string(exponent) + " exceeds the cap of " +
                        std::to_string(cap));
    }
    out *= base;
  }
  return out;
}

std::string set_string(const WordSet& set) {
  std::string s = "{";
  for (std::size_t i = 0; i < set.size(); ++i) s += (i ? ", " : "") + to_string(set[i]);
  return s + "}";
}

PatternDistribution from_exact(WordSet support, std::vector<std::string> labels, const std::map<std::uint64_t, Rational>& m,
                               bool exact) {
  PatternDistribution pd;
  pd.support = std::move(support);
  pd.labels = std::move(labels);
  pd.exact = exact;
  for (const auto& [key, p] : m) {
    if (sgn(p) == 0) continue;
    pd.keys.push_back(key);
    pd.probs.push_back(p.get_d());
    if (exact) pd.exact_probs.push_back(p);
  }
  return pd;
}

std::uint64_t encode(const std::vector<int>& y, std::uint64_t base) {
  std::uint64_t key = 0;
  for (int v : y) key = key * base + static_cast<std::uint64_t>(v);
  return key;
}

std::vector<int> decode(std::uint64_t key, std::uint64_t base, std::size_t sites) {
  std::vector<int> y(sites);
  for (std::size_t i = sites; i-- > 0;) {
    y[i] = static_cast<int>(key % base);
    key /= base;
  }
  return y;
}

int label_index(const std::vector<std::string>& labels, const std::string& l) {
  return static_cast<int>(std::find(labels.begin(), labels.end(), l) - labels.begin());
}

std::vector<int> finite_action_labels(const FiniteActionSpec& f, const std::vector<std::string>& labels) {
  std::vector<int> out(f.points.size());
  for (std::size_t x = 0; x < out.size(); ++x) {
    out[x] = label_index(labels, f.partition ? (*f.partition)[x] : f.points[x]);
  }
  return out;
}

std::vector<std::string> spec_labels(const SystemSpec& spec, int rank) {
  return canonical_partition(System{rank, spec}).labels;
}

struct Context {
  int rank;
  const WordSet& F;
  const MarginalOptions& options;
};

PatternDistribution fast(const SystemSpec& spec, const Context& ctx);

PatternDistribution kernel_marginal(const MarkovSpec& inner, const std::vector<int>& emit, std::vector<std::string> labels,
                                    const Context& ctx) {
  const auto model = tree_model(inner, emit, static_cast<int>(labels.size()), ctx.F);
  checked_power(labels.size(), ctx.F.size(), ctx.options.pattern_cap, "pattern count");
  PatternDistribution pd;
  pd.support = ctx.F;
  pd.labels = std::move(labels);
  if (ctx.options.mode == Mode::rational) {
    auto m = materialize_exact(model);
    pd.exact = true;
    pd.keys = std::move(m.keys);
    pd.exact_probs = std::move(m.probs);
    for (const auto& p : pd.exact_probs) pd.probs.push_back(p.get_d());
  } else {
    auto m = materialize_float(model, ctx.options.execution);
    pd.keys = std::move(m.keys);
    pd.probs = std::move(m.probs);
  }
  return pd;
}

// Visible chain on a connected set: pi at the identity times P_s along each
// edge (g, g s), enumerated depth-first over positive-probability labelings
// only. Sites are in default order, so every parent precedes its children and
// the patterns come out in ascending key order.
PatternDistribution sparse_markov_marginal(const MarkovSpec& m, std::vector<std::string> labels, const Context& ctx) {
  const WordSet& F = ctx.F;
  const std::size_t n = F.size();
  const std::size_t k = m.alphabet.size();
  const std::uint64_t cap = ctx.options.pattern_cap;
  std::vector<std::size_t> up(n, 0);
  std::vector<int> letter(n, 0);
  for (std::size_t v = 1; v < n; ++v) {
    up[v] = static_cast<std::size_t>(std::lower_bound(F.begin(), F.end(), F[v].drop_last(), default_less) - F.begin());
    letter[v] = F[v].last().index;
  }
  std::vector<std::vector<std::uint64_t>> count(n, std::vector<std::uint64_t>(k, 1));
  for (std::size_t v = n; v-- > 1;) {
    for (std::size_t a = 0; a < k; ++a) {
      std::uint64_t below = 0;
      for (std::size_t b = 0; b < k; ++b) {
        if (sgn(m.transitions[letter[v]][a][b]) != 0) below = std::min(cap + 1, below + count[v][b]);
      }
      std::uint64_t& c = count[up[v]][a];
      c = below != 0 && c > cap / below ? cap + 1 : c * below;
    }
  }
  std::uint64_t support = 0;
  for (std::size_t a = 0; a < k; ++a) {
    if (sgn(m.stationary[a]) != 0) support = std::min(cap + 1, support + count[0][a]);
  }
  if (support > cap) {
    throw CapExceeded("pattern count: support of " + std::to_string(support) + "+ patterns exceeds the cap of " + std::to_string(cap));
  }

  const bool exact = ctx.options.mode == Mode::rational;
  PatternDistribution pd;
  pd.support = F;
  pd.exact = exact;
  pd.keys.reserve(support);
  pd.probs.reserve(support);
  std::vector<std::vector<double>> P(m.transitions.size());
  std::vector<int> x(n);
  std::vector<Rational> q(n);
  std::vector<double> d(n);
  const std::uint64_t L = labels.size();
  std::function<void(std::size_t, std::uint64_t)> assign = [&](std::size_t v, std::uint64_t key) {
    if (v == n) {
      pd.keys.push_back(key);
      pd.probs.push_back(exact ? q[n - 1].get_d() : d[n - 1]);
      if (exact) pd.exact_probs.push_back(q[n - 1]);
      return;
    }
    for (std::size_t a = 0; a < k; ++a) {
      const Rational& step = v == 0 ? m.stationary[a] : m.transitions[letter[v]][x[up[v]]][a];
      if (sgn(step) == 0) continue;
      x[v] = static_cast<int>(a);
      if (exact) {
        q[v] = v == 0 ? step : Rational(q[v - 1] * step);
      } else {
        d[v] = (v == 0 ? 1.0 : d[v - 1]) * step.get_d();
      }
      assign(v + 1, key * L + a);
    }
  };
  assign(0, 0);
  pd.labels = std::move(labels);
  return pd;
}

std::vector<int> identity_map(std::size_t n) {
  std::vector<int> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<int>(i);
  return v;
}

PatternDistribution coset_marginal(const CosetBernoulliSpec& c, const WordSet& F, std::uint64_t cap, bool exact) {
  std::vector<Word> reps;
  std::vector<std::size_t> site_rep;
  for (const auto& g : F) {
    const Word rep = coset_representative(g, c.marked);
    auto it = std::find(reps.begin(), reps.end(), rep);
    site_rep.push_back(static_cast<std::size_t>(it - reps.begin()));
    if (it == reps.end()) reps.push_back(rep);
  }
  const std::uint64_t L = c.base.size();
  const std::uint64_t count = checked_power(L, reps.size(), cap, "coset assignments");
  std::map<std::uint64_t, Rational> m;
  std::vector<int> y(F.size());
  for (std::uint64_t a = 0; a < count; ++a) {
    const auto assignment = decode(a, L, reps.size());
    Rational p = 1;
    for (int v : assignment) p *= c.base.weights[v];
    if (sgn(p) == 0) continue;
    for (std::size_t i = 0; i < F.size(); ++i) y[i] = assignment[site_rep[i]];
    m[encode(y, L)] += p;
  }
  return from_exact(F, c.base.labels, m, exact);
}

PatternDistribution finite_action_marginal(const FiniteActionSpec& f, const WordSet& F, const std::vector<std::string>& labels,
                                           bool exact) {
  const auto point_label = finite_action_labels(f, labels);
  std::vector<Word> inverses;
  for (const auto& g : F) inverses.push_back(inverse(g));
  std::map<std::uint64_t, Rational> m;
  std::vector<int> y(F.size());
  for (std::size_t x = 0; x < f.points.size(); ++x) {
    if (sgn(f.mass[x]) == 0) continue;
    for (std::size_t i = 0; i < F.size(); ++i) y[i] = point_label[act(f, inverses[i], static_cast<int>(x))];
    m[encode(y, labels.size())] += f.mass[x];
  }
  return from_exact(F, labels, m, exact);
}

// Mixture of component distributions over the concatenated, tagged alphabet.
PatternDistribution mixture(const DirectSumSpec& d, const std::vector<PatternDistribution>& parts, const WordSet& F,
                            std::vector<std::string> labels, bool exact) {
  std::vector<std::pair<std::uint64_t, std::pair<Rational, double>>> entries;
  const std::uint64_t L = labels.size();
  checked_power(L, F.size(), std::numeric_limits<std::uint64_t>::max() / 2, "pattern key");
  int offset = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto& part = parts[i];
    const double w = d.weights[i].get_d();
    for (std::size_t j = 0; j < part.size(); ++j) {
      auto y = part.pattern(j);
      for (int& v : y) v += offset;
      Rational p = exact ? Rational(part.exact_probs[j] * d.weights[i]) : Rational(0);
      entries.push_back({encode(y, L), {std::move(p), part.probs[j] * w}});
    }
    offset += static_cast<int>(part.labels.size());
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  PatternDistribution pd;
  pd.support = F;
  pd.labels = std::move(labels);
  pd.exact = exact;
  for (auto& [key, p] : entries) {
    pd.keys.push_back(key);
    pd.probs.push_back(exact ? p.first.get_d() : p.second);
    if (exact) pd.exact_probs.push_back(std::move(p.first));
  }
  return pd;
}

PatternDistribution fast(const SystemSpec& spec, const Context& ctx) {
  const bool exact = ctx.options.mode == Mode::rational;
  return std::visit(
      overloaded{
          [&](const BernoulliSpec& b) { return sparse_markov_marginal(as_markov(b, ctx.rank), b.base.labels, ctx); },
          [&](const MarkovSpec& m) { return sparse_markov_marginal(m, m.alphabet, ctx); },
          [&](const HiddenMarkovSpec& h) { return kernel_marginal(inner_markov(h, ctx.rank), h.letter_map, h.observed, ctx); },
          [&](const CosetBernoulliSpec& c) { return coset_marginal(c, ctx.F, ctx.options.pattern_cap, exact); },
          [&](const FiniteActionSpec& f) {
            return finite_action_marginal(f, ctx.F, spec_labels(spec, ctx.rank), exact);
          },
          [&](const DirectSumSpec& d) {
            std::vector<PatternDistribution> parts;
            for (const auto& c : d.components) parts.push_back(fast(c, ctx));
            return mixture(d, parts, ctx.F, spec_labels(spec, ctx.rank), exact);
          },
      },
      spec.kind);
}

// Brute force over inner labelings of the ball B_m, m = max |f|, pruning
// zero-probability prefixes.
PatternDistribution markov_oracle(const MarkovSpec& inner, const std::vector<int>& emit, std::vector<std::string> labels,
                                  int rank, const WordSet& F, std::uint64_t cap) {
  int radius = 0;
  for (const auto& g : F) radius = std::max(radius, static_cast<int>(g.length()));
  const auto B = ball(rank, radius);
  const std::size_t n = B->size();
  const std::size_t k = inner.alphabet.size();
  std::vector<std::size_t> up(n, 0);
  std::vector<int> letter(n, 0);
  for (std::size_t v = 1; v < n; ++v) {
    up[v] = *B->position((*B)[v].drop_last());
    letter[v] = (*B)[v].last().index;
  }
  // Exact number of positive-probability inner labelings, counted leaves-up
  // with saturation, so the enumeration below is bounded before it starts.
  std::vector<std::vector<std::uint64_t>> count(n, std::vector<std::uint64_t>(k, 1));
  auto saturating_mul = [cap](std::uint64_t a, std::uint64_t b) { return b != 0 && a > cap / b ? cap + 1 : a * b; };
  for (std::size_t v = n; v-- > 1;) {
    for (std::size_t a = 0; a < k; ++a) {
      std::uint64_t below = 0;
      for (std::size_t b = 0; b < k; ++b) {
        if (sgn(inner.transitions[letter[v]][a][b]) != 0) below = std::min(cap + 1, below + count[v][b]);
      }
      count[up[v]][a] = saturating_mul(count[up[v]][a], below);
    }
  }
  std::uint64_t support = 0;
  for (std::size_t a = 0; a < k; ++a) {
    if (sgn(inner.stationary[a]) != 0) support = std::min(cap + 1, support + count[0][a]);
  }
  if (support > cap) throw CapExceeded("oracle support exceeds the cap of " + std::to_string(cap));
  std::vector<std::size_t> site;
  for (const auto& g : F) site.push_back(*B->position(g));

  std::map<std::uint64_t, Rational> m;
  std::vector<int> x(n);
  std::vector<Rational> prefix(n);
  std::vector<int> y(F.size());
  const std::uint64_t L = labels.size();
  std::function<void(std::size_t)> assign = [&](std::size_t v) {
    if (v == n) {
      for (std::size_t i = 0; i < site.size(); ++i) y[i] = emit[x[site[i]]];
      m[encode(y, L)] += prefix[n - 1];
      return;
    }
    for (std::size_t a = 0; a < k; ++a) {
      const Rational& step = v == 0 ? inner.stationary[a] : inner.transitions[letter[v]][x[up[v]]][a];
      if (sgn(step) == 0) continue;
      x[v] = static_cast<int>(a);
      prefix[v] = v == 0 ? step : Rational(prefix[v - 1] * step);
      assign(v + 1);
    }
  };
  assign(0);
  return from_exact(F, std::move(labels), m, true);
}

PatternDistribution oracle(const SystemSpec& spec, int rank, const WordSet& F, std::uint64_t cap) {
  return std::visit(
      overloaded{
          [&](const BernoulliSpec& b) {
            const std::uint64_t L = b.base.size();
            const std::uint64_t count = checked_power(L, F.size(), cap, "oracle patterns");
            std::map<std::uint64_t, Rational> m;
            for (std::uint64_t key = 0; key < count; ++key) {
              Rational p = 1;
              for (int v : decode(key, L, F.size())) p *= b.base.weights[v];
              m[key] = p;
            }
            return from_exact(F, b.base.labels, m, true);
          },
          [&](const MarkovSpec& mk) { return markov_oracle(mk, identity_map(mk.alphabet.size()), mk.alphabet, rank, F, cap); },
          [&](const HiddenMarkovSpec& h) { return markov_oracle(inner_markov(h, rank), h.letter_map, h.observed, rank, F, cap); },
          [&](const CosetBernoulliSpec& c) {
            // Every labeling of F, kept when sites sharing a coset agree.
            const std::uint64_t L = c.base.size();
            const std::uint64_t count = checked_power(L, F.size(), cap, "oracle patterns");
            std::vector<Word> reps;
            for (const auto& g : F) reps.push_back(coset_representative(g, c.marked));
            std::map<std::uint64_t, Rational> m;
            for (std::uint64_t key = 0; key < count; ++key) {
              const auto y = decode(key, L, F.size());
              Rational p = 1;
              bool consistent = true;
              for (std::size_t i = 0; i < F.size() && consistent; ++i) {
                bool first = true;
                for (std::size_t j = 0; j < i; ++j) {
                  if (reps[j] == reps[i]) {
                    first = false;
                    consistent = y[j] == y[i];
                    break;
                  }
                }
                if (first) p *= c.base.weights[y[i]];
              }
              if (consistent) m[key] = p;
            }
            return from_exact(F, c.base.labels, m, true);
          },
          [&](const FiniteActionSpec& f) {
            const auto labels = spec_labels(spec, rank);
            const auto point_label = finite_action_labels(f, labels);
            // Pushforward of the point masses; g^-1 . x is evaluated letter by
            // letter from the left of g with explicitly inverted maps.
            if (f.points.size() > cap) throw CapExceeded("oracle points exceed the cap of " + std::to_string(cap));
            std::vector<std::vector<int>> inv(f.generator_maps.size(), std::vector<int>(f.points.size()));
            for (std::size_t i = 0; i < f.generator_maps.size(); ++i) {
              for (std::size_t x = 0; x < f.points.size(); ++x) inv[i][f.generator_maps[i][x]] = static_cast<int>(x);
            }
            auto pull = [&](const Word& g, int x) {
              for (std::size_t i = 0; i < g.length(); ++i) {
                const Letter s = g[i];
                x = s.is_inverse() ? f.generator_maps[s.generator()][x] : inv[s.generator()][x];
              }
              return x;
            };
            std::map<std::uint64_t, Rational> m;
            std::vector<int> y(F.size());
            for (std::size_t x = 0; x < f.points.size(); ++x) {
              for (std::size_t i = 0; i < F.size(); ++i) y[i] = point_label[pull(F[i], static_cast<int>(x))];
              Rational& slot = m[encode(y, labels.size())];
              slot += f.mass[x];
            }
            for (auto it = m.begin(); it != m.end();) it = sgn(it->second) == 0 ? m.erase(it) : std::next(it);
            return from_exact(F, labels, m, true);
          },
          [&](const DirectSumSpec& d) {
            std::vector<PatternDistribution> parts;
            for (const auto& c : d.components) parts.push_back(oracle(c, rank, F, cap));
            return mixture(d, parts, F, spec_labels(spec, rank), true);
          },
      },
      spec.kind);
}

}  // namespace

std::uint64_t default_pattern_cap() {
  if (const char* env = std::getenv("FENT_PATTERN_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return kDefaultPatternCap;
}

std::vector<int> PatternDistribution::pattern(std::size_t i) const { return decode(keys[i], labels.size(), support.size()); }

std::string PatternDistribution::pattern_string(std::size_t i) const {
  const bool short_labels = std::all_of(labels.begin(), labels.end(), [](const std::string& l) { return l.size() == 1; });
  std::string s;
  const auto y = pattern(i);
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (!short_labels && j > 0) s += ',';
    s += labels[y[j]];
  }
  return s;
}

std::vector<std::string> site_labels(const System& system) { return canonical_partition(system).labels; }

PatternDistribution marginal(const System& system, const WordSet& F, const MarginalOptions& options) {
  require_valid(system);
  const WordSet set = normalize_set(F);
  if (set.empty() || !set.front().is_identity() || !is_prefix_closed(set)) {
    WordSet with_identity = set;
    with_identity.push_back(Word::identity());
    throw InvalidArgument("support " + set_string(set) +
                          " must contain the identity and be connected (closed under dropping the last letter); hull: " +
                          set_string(prefix_hull(with_identity)));
  }
  const Context ctx{system.rank, set, options};
  return fast(system.spec, ctx);
}

PatternDistribution oracle_marginal(const System& system, const WordSet& F, std::uint64_t cap) {
  require_valid(system);
  const WordSet set = normalize_set(F);
  if (set.empty()) throw InvalidArgument("empty support set");
  return oracle(system.spec, system.rank, set, cap);
}

PatternDistribution restrict_to(const PatternDistribution& pd, const WordSet& subset) {
  const WordSet sub = normalize_set(subset);
  std::vector<std::size_t> where;
  for (const auto& g : sub) {
    auto it = std::find(pd.support.begin(), pd.support.end(), g);
    if (it == pd.support.end()) throw InvalidArgument(to_string(g) + " is not in the support " + set_string(pd.support));
    where.push_back(static_cast<std::size_t>(it - pd.support.begin()));
  }
  const std::uint64_t L = pd.labels.size();
  std::map<std::uint64_t, Rational> exact;
  std::map<std::uint64_t, CompensatedSum> approx;
  std::vector<int> y(sub.size());
  for (std::size_t i = 0; i < pd.size(); ++i) {
    const auto full = pd.pattern(i);
    for (std::size_t j = 0; j < where.size(); ++j) y[j] = full[where[j]];
    const std::uint64_t key = encode(y, L);
    if (pd.exact) {
      exact[key] += pd.exact_probs[i];
    } else {
      approx[key].add(pd.probs[i]);
    }
  }
  if (pd.exact) return from_exact(sub, pd.labels, exact, true);
  PatternDistribution out;
  out.support = sub;
  out.labels = pd.labels;
  for (const auto& [key, s] : approx) {
    out.keys.push_back(key);
    out.probs.push_back(s.value());
  }
  return out;
}

Nats exact_entropy(std::vector<Rational> probs) {
  std::sort(probs.begin(), probs.end());
  std::size_t distinct = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) distinct += (i == 0 || probs[i] != probs[i - 1]) ? 1 : 0;
  if (distinct > kExactDistinctLimit) {
    std::vector<double> d;
    d.reserve(probs.size());
    for (const auto& p : probs) d.push_back(p.get_d());
    return Nats::approximate(float_entropy(d));
  }
  LogCombination c;
  for (std::size_t i = 0; i < probs.size();) {
    std::size_t j = i;
    while (j < probs.size() && probs[j] == probs[i]) ++j;
    c.add_plogp(probs[i], static_cast<long>(j - i));
    i = j;
  }
  return Nats::exactly(std::move(c));
}

double float_entropy(const std::vector<double>& probs) {
  CompensatedSum h;
  for (double p : probs) {
    if (p > 0.0) h.add(-p * std::log(p));
  }
  return h.value();
}

Nats entropy_of(const PatternDistribution& pd) {
  if (pd.exact) return exact_entropy(pd.exact_probs);
  return Nats::approximate(float_entropy(pd.probs));
}

Nats conditional_between(const PatternDistribution& big, const WordSet& subset) {
  return entropy_of(big) - entropy_of(restrict_to(big, subset));
}

bool identical(const PatternDistribution& a, const PatternDistribution& b) {
  return a.exact && b.exact && a.support == b.support && a.labels == b.labels && a.keys == b.keys &&
         a.exact_probs == b.exact_probs;
}

double max_difference(const PatternDistribution& a, const PatternDistribution& b) {
  if (a.support != b.support || a.labels != b.labels) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a.keys[i] < b.keys[j])) {
      worst = std::max(worst, a.probs[i++]);
    } else if (i == a.size() || b.keys[j] < a.keys[i]) {
      worst = std::max(worst, b.probs[j++]);
    } else {
      worst = std::max(worst, std::abs(a.probs[i++] - b.probs[j++]));
    }
  }
  return worst;
}

std::string dump(const PatternDistribution& pd) {
  std::vector<std::pair<std::string, std::string>> rows;
  rows.reserve(pd.size());
  char buffer[64];
  for (std::size_t i = 0; i < pd.size(); ++i) {
    std::string value;
    if (pd.exact) {
      value = format_rational(pd.exact_probs[i]);
    } else {
      std::snprintf(buffer, sizeof buffer, "%.17g", pd.probs[i]);
      value = buffer;
    }
    rows.emplace_back(pd.pattern_string(i), std::move(value));
  }
  std::sort(rows.begin(), rows.end());
  std::string out;
  for (const auto& [pattern, value] : rows) out += pattern + " " + value + "\n";
  return out;
}

}  // namespace fent
