#include "fent/corpus.hpp"

#include <cmath>

#include "fent/system_io.hpp"

namespace fent {

namespace {

std::vector<ExpectedValue> every_route(double f) {
  return {{{Route::ball_limit, 1, std::nullopt}, f},
          {{Route::sphere_formula, 1, std::nullopt}, f},
          {{Route::decay_series, 2, std::nullopt}, f}};
}

std::vector<ExpectedValue> with(std::vector<ExpectedValue> base, Route route, double f) {
  base.push_back({{route, 1, std::nullopt}, f});
  return base;
}

std::string describe(const RouteChoice& c) {
  if (c.route == Route::atomic_closed_form) return route_name(c.route);
  return route_name(c.route) + (c.route == Route::decay_series ? " R=" : " n=") + std::to_string(c.radius);
}

const char* kBernoulliHalf = R"(rank 2
system bernoulli
  alphabet 0 1
  base 1/2 1/2
end
)";

const char* kMarkovSymmetric = R"(rank 2
system markov
  alphabet 0 1
  stationary 1/2 1/2
  transition all
    9/10 1/10
    1/10 9/10
end
)";

const char* kMarkovAsymmetric = R"(rank 2
system markov
  alphabet x y z
  stationary 1/2 1/4 1/4
  transition a
    1/2 1/4 1/4
    1/2 0 1/2
    1/2 1/2 0
  transition A
    1/2 1/4 1/4
    1/2 0 1/2
    1/2 1/2 0
  transition b
    1/2 1/2 0
    0 0 1
    1 0 0
  transition B
    1/2 0 1/2
    1 0 0
    0 1 0
end
)";

const char* kCosetBernoulli = R"(rank 2
system coset-bernoulli
  alphabet 0 1
  base 1/2 1/2
  marked a
end
)";

const char* kTwoPoints = R"(rank 2
system finite-action
  points p q
  mass 1/2 1/2
  generator a q p
  generator b p q
end
)";

const char* kThreePoints = R"(rank 2
system finite-action
  points p q s
  mass 1/2 1/4 1/4
  generator a p s q
  generator b p q s
end
)";

const char* kDirectSum = R"(rank 2
system direct-sum
  component 1/2
  system bernoulli
    alphabet 0 1
    base 1/2 1/2
  end
  component 1/2
  system markov
    alphabet 0 1
    stationary 1/2 1/2
    transition all
      9/10 1/10
      1/10 9/10
  end
end
)";

// Observed two-class image of a sparse rotation chain; not lumpable, so the
// observed process is not Markov.
const char* kHiddenMarkov = R"(rank 2
system hidden-markov
  system markov
    alphabet x y z
    stationary 1/3 1/3 1/3
    transition a
      0 1/3 2/3
      2/3 0 1/3
      1/3 2/3 0
    transition A
      0 2/3 1/3
      1/3 0 2/3
      2/3 1/3 0
    transition b
      0 1/3 2/3
      2/3 0 1/3
      1/3 2/3 0
    transition B
      0 2/3 1/3
      1/3 0 2/3
      2/3 1/3 0
  end
  observed 0 1
  map 0 0 1
end
)";

}  // namespace

const std::vector<CorpusEntry>& corpus() {
  static const std::vector<CorpusEntry> entries = [] {
    const double log2 = std::log(2.0);
    const double markov = -0.04298123377704888;
    std::vector<CorpusEntry> e;
    e.push_back({"bernoulli-half", kBernoulliHalf, every_route(log2), true});
    e.push_back({"markov-symmetric", kMarkovSymmetric, every_route(markov), true});
    e.push_back({"markov-asymmetric", kMarkovAsymmetric, every_route(0.25 * log2), true});
    e.push_back({"coset-bernoulli", kCosetBernoulli, every_route(0.0), true});
    e.push_back({"two-points", kTwoPoints, with(every_route(-log2), Route::atomic_closed_form, -log2), false});
    e.push_back({"three-points", kThreePoints, with(every_route(-1.5 * log2), Route::atomic_closed_form, -1.5 * log2), false});
    const double sum = 0.5 * log2 + 0.5 * markov - log2;
    e.push_back({"direct-sum", kDirectSum, with(every_route(sum), Route::direct_sum, sum), false});
    // Truncated values (upper bounds), from brute-force enumeration of inner labelings.
    e.push_back({"hidden-markov",
                 kHiddenMarkov,
                 {{{Route::ball_limit, 1, std::nullopt}, 0.243094263495097},
                  {{Route::sphere_formula, 1, std::nullopt}, 0.232013556644759},
                  {{Route::decay_series, 2, std::nullopt}, 0.232013556644759}},
                 false});
    return e;
  }();
  return entries;
}

System corpus_system(const CorpusEntry& entry) { return parse_system(entry.description); }

bool run_corpus(std::ostream& out, const EngineOptions& options, bool bits) {
  bool all_ok = true;
  for (const auto& entry : corpus()) {
    const System system = corpus_system(entry);
    EntropyEngine engine(system, options);
    out << "[" << entry.name << "] " << kind_name(system.spec) << ", rank " << system.rank << "\n";
    std::vector<RouteChoice> routes = {{Route::ball_limit, 1, std::nullopt},
                                       {Route::sphere_formula, 1, std::nullopt},
                                       {Route::decay_series, 2, std::nullopt}};
    if (std::holds_alternative<FiniteActionSpec>(system.spec.kind)) routes.push_back({Route::atomic_closed_form, 1, std::nullopt});
    if (std::holds_alternative<DirectSumSpec>(system.spec.kind)) routes.push_back({Route::direct_sum, 1, std::nullopt});
    std::vector<Nats> exact_values;
    bool entry_ok = true;
    for (const auto& route : routes) {
      const EntropyReport report = evaluate(engine, route);
      out << "  " << describe(route) << ": " << format_value(report.value.value(), bits)
          << (report.exact ? " exact" : " upper-bound");
      for (const auto& expected : entry.expected) {
        if (expected.route.route != route.route || expected.route.radius != route.radius) continue;
        const bool ok = std::abs(report.value.value() - expected.value) <= kCorpusTolerance;
        out << ", expected " << format_value(expected.value, bits) << (ok ? " ok" : " MISMATCH");
        entry_ok = entry_ok && ok;
      }
      out << "\n";
      if (report.exact) exact_values.push_back(report.value);
    }
    bool agree_all = true;
    for (std::size_t i = 1; i < exact_values.size(); ++i) agree_all = agree_all && agree(exact_values[0], exact_values[i], kCorpusTolerance);
    out << "  exact routes: " << (exact_values.empty() ? "none" : agree_all ? "agree" : "DISAGREE") << "\n";
    entry_ok = entry_ok && agree_all;
    out << "  status: " << (entry_ok ? "ok" : "FAILED") << "\n";
    all_ok = all_ok && entry_ok;
  }
  out << (all_ok ? "corpus: all entries ok\n" : "corpus: FAILURES\n");
  return all_ok;
}

}  // namespace fent
