#include "fent/systems.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "fent/errors.hpp"

namespace fent {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

class Checker {
 public:
  explicit Checker(std::string prefix = {}) : prefix_(std::move(prefix)) {}

  void fail(const std::string& code, const std::string& message) {
    report.diagnostics.push_back({code, prefix_ + message});
  }
  void distribution(const FiniteDistribution& d, const std::string& what) {
    for (const auto& p : d.problems()) fail("invalid-distribution", what + ": " + p);
  }
  void unique_labels(const std::vector<std::string>& labels, const std::string& what) {
    if (labels.empty()) fail("shape", what + " is empty");
    std::set<std::string> seen;
    for (const auto& l : labels) {
      if (l.empty()) fail("shape", what + " contains an empty label");
      if (!seen.insert(l).second) fail("shape", what + " repeats \"" + l + "\"");
    }
  }

  void markov(const MarkovSpec& m, int rank) {
    const std::size_t k = m.alphabet.size();
    unique_labels(m.alphabet, "alphabet");
    distribution(FiniteDistribution{m.alphabet, m.stationary}, "stationary distribution");
    if (m.stationary.size() != k) return;
    if (m.transitions.size() != 2 * static_cast<std::size_t>(rank)) {
      fail("shape", "expected " + std::to_string(2 * rank) + " transition matrices, got " +
                        std::to_string(m.transitions.size()));
      return;
    }
    bool shapes_ok = true;
    for (std::size_t s = 0; s < m.transitions.size(); ++s) {
      const std::string name(1, letter_char(Letter{static_cast<std::uint8_t>(s)}));
      const auto& P = m.transitions[s];
      if (P.size() != k || std::any_of(P.begin(), P.end(), [&](const auto& row) { return row.size() != k; })) {
        fail("shape", "transition " + name + " is not " + std::to_string(k) + "x" + std::to_string(k));
        shapes_ok = false;
        continue;
      }
      for (std::size_t a = 0; a < k; ++a) {
        Rational total;
        for (std::size_t b = 0; b < k; ++b) {
          if (P[a][b] < 0) fail("non-stochastic-row", "transition " + name + " has a negative entry in row " + m.alphabet[a]);
          total += P[a][b];
        }
        if (total != 1) {
          fail("non-stochastic-row",
               "transition " + name + " row " + m.alphabet[a] + " sums to " + format_rational(total));
        }
      }
      for (std::size_t b = 0; b < k; ++b) {
        Rational flow;
        for (std::size_t a = 0; a < k; ++a) flow += m.stationary[a] * P[a][b];
        if (flow != m.stationary[b]) {
          fail("stationarity", "stationary distribution is not preserved by transition " + name + " at " +
                                   m.alphabet[b] + " (" + format_rational(flow) + " vs " +
                                   format_rational(m.stationary[b]) + ")");
          break;
        }
      }
    }
    if (!shapes_ok) return;
    for (std::size_t s = 0; s < m.transitions.size(); s += 2) {
      const auto& P = m.transitions[s];
      const auto& Q = m.transitions[s + 1];
      for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) {
          if (m.stationary[a] * P[a][b] != m.stationary[b] * Q[b][a]) {
            const Letter x{static_cast<std::uint8_t>(s)};
            fail("adjointness", std::string("pi(a) P_") + letter_char(x) + "(a,b) != pi(b) P_" +
                                    letter_char(inverse(x)) + "(b,a) at a=" + m.alphabet[a] + ", b=" + m.alphabet[b]);
            a = k;
            break;
          }
        }
      }
    }
  }

  void finite_action(const FiniteActionSpec& f, int rank) {
    const std::size_t n = f.points.size();
    unique_labels(f.points, "points");
    distribution(FiniteDistribution{f.points, f.mass}, "mass");
    if (f.mass.size() != n) return;
    if (f.generator_maps.size() != static_cast<std::size_t>(rank)) {
      fail("shape", "expected " + std::to_string(rank) + " generator maps, got " + std::to_string(f.generator_maps.size()));
      return;
    }
    bool maps_ok = true;
    for (int i = 0; i < rank; ++i) {
      const std::string name(1, letter_char(generator_letter(i)));
      const auto& map = f.generator_maps[i];
      std::vector<bool> hit(n, false);
      bool bijective = map.size() == n;
      for (std::size_t x = 0; bijective && x < n; ++x) {
        if (map[x] < 0 || static_cast<std::size_t>(map[x]) >= n || hit[map[x]]) {
          bijective = false;
        } else {
          hit[map[x]] = true;
        }
      }
      if (!bijective) {
        fail("not-bijection", "generator " + name + " does not act as a bijection of the points");
        maps_ok = false;
        continue;
      }
      for (std::size_t x = 0; x < n; ++x) {
        if (f.mass[map[x]] != f.mass[x]) {
          fail("mass-mismatch", "generator " + name + " sends " + f.points[x] + " (mass " + format_rational(f.mass[x]) +
                                    ") to " + f.points[map[x]] + " (mass " + format_rational(f.mass[map[x]]) + ")");
          maps_ok = false;
        }
      }
    }
    if (f.partition) {
      if (f.partition->size() != n) {
        fail("shape", "partition labels " + std::to_string(f.partition->size()) + " points, expected " + std::to_string(n));
      } else if (maps_ok) {
        const auto refined = orbit_refinement(f, point_labels(f));
        for (std::size_t x = 0; x < n; ++x) {
          for (std::size_t y = x + 1; y < n; ++y) {
            if (refined[x] == refined[y] && f.mass[x] > 0 && f.mass[y] > 0) {
              fail("not-generating", "partition is not generating: translates never separate " + f.points[x] +
                                         " from " + f.points[y]);
              return;
            }
          }
        }
      }
    }
  }

  void system(const SystemSpec& spec, int rank) {
    std::visit(overloaded{
                   [&](const BernoulliSpec& b) {
                     unique_labels(b.base.labels, "alphabet");
                     distribution(b.base, "base");
                   },
                   [&](const CosetBernoulliSpec& c) {
                     unique_labels(c.base.labels, "alphabet");
                     distribution(c.base, "base");
                     if (c.marked < 0 || c.marked >= rank) {
                       fail("bad-marked-generator", "marked generator must be one of the first " +
                                                        std::to_string(rank) + " generators");
                     }
                   },
                   [&](const MarkovSpec& m) { markov(m, rank); },
                   [&](const HiddenMarkovSpec& h) {
                     std::size_t inner_size = 0;
                     std::visit(overloaded{[&](const BernoulliSpec& b) {
                                             unique_labels(b.base.labels, "inner alphabet");
                                             distribution(b.base, "inner base");
                                             inner_size = b.base.size();
                                           },
                                           [&](const MarkovSpec& m) {
                                             markov(m, rank);
                                             inner_size = m.alphabet.size();
                                           }},
                                h.inner);
                     unique_labels(h.observed, "observed alphabet");
                     if (h.letter_map.size() != inner_size) {
                       fail("bad-letter-map", "letter map has " + std::to_string(h.letter_map.size()) +
                                                  " entries for " + std::to_string(inner_size) + " inner letters");
                       return;
                     }
                     std::vector<bool> hit(h.observed.size(), false);
                     for (int y : h.letter_map) {
                       if (y < 0 || static_cast<std::size_t>(y) >= h.observed.size()) {
                         fail("bad-letter-map", "letter map points outside the observed alphabet");
                         return;
                       }
                       hit[y] = true;
                     }
                     for (std::size_t y = 0; y < hit.size(); ++y) {
                       if (!hit[y]) fail("bad-letter-map", "observed letter " + h.observed[y] + " is not hit");
                     }
                   },
                   [&](const FiniteActionSpec& f) { finite_action(f, rank); },
                   [&](const DirectSumSpec& d) {
                     std::vector<std::string> names;
                     for (std::size_t i = 0; i < d.weights.size(); ++i) names.push_back(std::to_string(i));
                     distribution(FiniteDistribution{names, d.weights}, "component weights");
                     for (const auto& w : d.weights) {
                       if (w == 0) fail("invalid-distribution", "component weights must be positive");
                     }
                     if (d.components.size() != d.weights.size()) {
                       fail("shape", "direct sum has " + std::to_string(d.components.size()) + " components but " +
                                         std::to_string(d.weights.size()) + " weights");
                     }
                     for (std::size_t i = 0; i < d.components.size(); ++i) {
                       Checker inner(prefix_ + "component " + std::to_string(i) + ": ");
                       inner.system(d.components[i], rank);
                       for (auto& diag : inner.report.diagnostics) report.diagnostics.push_back(std::move(diag));
                     }
                   },
               },
               spec.kind);
  }

  ValidationReport report;

 private:
  std::string prefix_;
};

std::vector<int> compact(const std::vector<std::vector<int>>& signatures) {
  std::map<std::vector<int>, int> ids;
  std::vector<int> out;
  out.reserve(signatures.size());
  for (const auto& s : signatures) out.push_back(ids.try_emplace(s, static_cast<int>(ids.size())).first->second);
  return out;
}

int count_classes(const std::vector<int>& labels) {
  return static_cast<int>(std::set<int>(labels.begin(), labels.end()).size());
}

}  // namespace

std::string kind_name(const SystemSpec& spec) {
  return std::visit(overloaded{[](const FiniteActionSpec&) { return "finite-action"; },
                               [](const BernoulliSpec&) { return "bernoulli"; },
                               [](const MarkovSpec&) { return "markov"; },
                               [](const HiddenMarkovSpec&) { return "hidden-markov"; },
                               [](const DirectSumSpec&) { return "direct-sum"; },
                               [](const CosetBernoulliSpec&) { return "coset-bernoulli"; }},
                    spec.kind);
}

bool ValidationReport::has(const std::string& code) const {
  return std::any_of(diagnostics.begin(), diagnostics.end(), [&](const auto& d) { return d.code == code; });
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  for (const auto& d : diagnostics) out << d.code << ": " << d.message << '\n';
  return out.str();
}

ValidationReport validate(const System& system) {
  Checker c;
  if (system.rank < 1 || system.rank > kMaxRank) {
    c.fail("shape", "rank must lie in [1, " + std::to_string(kMaxRank) + "]");
    return c.report;
  }
  c.system(system.spec, system.rank);
  return c.report;
}

void require_valid(const System& system) {
  auto report = validate(system);
  if (!report.ok()) {
    throw ValidationError(report.diagnostics.front().code + ": " + report.diagnostics.front().message);
  }
}

CanonicalPartition canonical_partition(const System& system) {
  require_valid(system);
  return std::visit(
      overloaded{
          [](const BernoulliSpec& b) {
            return CanonicalPartition{b.base.labels, "identity coordinate"};
          },
          [](const CosetBernoulliSpec& c) {
            return CanonicalPartition{c.base.labels, "identity-coset coordinate"};
          },
          [](const MarkovSpec& m) { return CanonicalPartition{m.alphabet, "identity coordinate"}; },
          [](const HiddenMarkovSpec& h) { return CanonicalPartition{h.observed, "observed identity coordinate"}; },
          [](const FiniteActionSpec& f) {
            if (!f.partition) return CanonicalPartition{f.points, "point partition"};
            std::vector<std::string> labels;
            for (const auto& l : *f.partition) {
              if (std::find(labels.begin(), labels.end(), l) == labels.end()) labels.push_back(l);
            }
            return CanonicalPartition{labels, "user partition"};
          },
          [&](const DirectSumSpec& d) {
            CanonicalPartition out{{}, "component partition joined with component alphabets"};
            for (std::size_t i = 0; i < d.components.size(); ++i) {
              const auto inner = canonical_partition(System{system.rank, d.components[i]});
              for (const auto& l : inner.labels) out.labels.push_back(std::to_string(i) + ":" + l);
            }
            return out;
          },
      },
      system.spec.kind);
}

bool tail_closes(const SystemSpec& spec) {
  return std::visit(overloaded{[](const HiddenMarkovSpec&) { return false; },
                               [](const DirectSumSpec& d) {
                                 return std::all_of(d.components.begin(), d.components.end(),
                                                    [](const SystemSpec& c) { return tail_closes(c); });
                               },
                               [](const auto&) { return true; }},
                    spec.kind);
}

MarkovSpec as_markov(const BernoulliSpec& b, int rank) {
  MarkovSpec m{b.base.labels, b.base.weights, {}};
  const Matrix P(b.base.size(), b.base.weights);
  m.transitions.assign(2 * static_cast<std::size_t>(rank), P);
  return m;
}

MarkovSpec inner_markov(const HiddenMarkovSpec& h, int rank) {
  return std::visit(overloaded{[&](const BernoulliSpec& b) { return as_markov(b, rank); },
                               [](const MarkovSpec& m) { return m; }},
                    h.inner);
}

int act(const FiniteActionSpec& a, const Word& g, int x) {
  for (std::size_t i = g.length(); i-- > 0;) {
    const Letter s = g[i];
    const auto& map = a.generator_maps[s.generator()];
    if (s.is_inverse()) {
      x = static_cast<int>(std::find(map.begin(), map.end(), x) - map.begin());
    } else {
      x = map[x];
    }
  }
  return x;
}

std::vector<int> point_labels(const FiniteActionSpec& a) {
  std::vector<int> out(a.points.size());
  if (!a.partition) {
    for (std::size_t x = 0; x < out.size(); ++x) out[x] = static_cast<int>(x);
    return out;
  }
  std::map<std::string, int> ids;
  for (std::size_t x = 0; x < out.size(); ++x) {
    out[x] = ids.try_emplace((*a.partition)[x], static_cast<int>(ids.size())).first->second;
  }
  return out;
}

std::vector<int> orbit_refinement(const FiniteActionSpec& a, std::vector<int> labels) {
  const int rank = static_cast<int>(a.generator_maps.size());
  int classes = count_classes(labels);
  for (;;) {
    std::vector<std::vector<int>> signatures(labels.size());
    for (std::size_t x = 0; x < labels.size(); ++x) {
      signatures[x].push_back(labels[x]);
      for (int i = 0; i < rank; ++i) {
        const Letter s = generator_letter(i);
        signatures[x].push_back(labels[act(a, Word::of(s), static_cast<int>(x))]);
        signatures[x].push_back(labels[act(a, Word::of(inverse(s)), static_cast<int>(x))]);
      }
    }
    labels = compact(signatures);
    const int next = count_classes(labels);
    if (next == classes) return labels;
    classes = next;
  }
}

std::vector<int> orbit_partition(const FiniteActionSpec& a) {
  const std::size_t n = a.points.size();
  std::vector<int> block(n, -1);
  int next = 0;
  for (std::size_t start = 0; start < n; ++start) {
    if (block[start] >= 0) continue;
    std::vector<int> stack{static_cast<int>(start)};
    block[start] = next;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      for (const auto& map : a.generator_maps) {
        const int y = map[x];
        if (block[y] < 0) {
          block[y] = next;
          stack.push_back(y);
        }
      }
    }
    ++next;
  }
  return block;
}

Word coset_representative(const Word& g, int marked) {
  Word w = g;
  while (!w.is_identity() && w.last().generator() == marked) w = w.drop_last();
  return w;
}

}  // namespace fent
