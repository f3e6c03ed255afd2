#include "fent/f_entropy.hpp"

#include <cmath>
#include <cstdio>

#include "fent/errors.hpp"

namespace fent {

namespace {

WordSet ball_set(int rank, int n) {
  const auto B = ball(rank, n);
  return WordSet(B->elements().begin(), B->elements().end());
}

WordSet initial_segment(const OrderedBall& B, std::size_t count) {
  return WordSet(B.elements().begin(), B.elements().begin() + static_cast<std::ptrdiff_t>(count));
}

void require_radius(int n, int least, const char* what) {
  if (n < least) throw InvalidArgument(std::string(what) + " must be at least " + std::to_string(least));
}

bool labels_separate_points(const FiniteActionSpec& f) {
  if (!f.partition) return true;
  for (std::size_t x = 0; x < f.points.size(); ++x) {
    for (std::size_t y = x + 1; y < f.points.size(); ++y) {
      if ((*f.partition)[x] == (*f.partition)[y]) return false;
    }
  }
  return true;
}

}  // namespace

std::string route_name(Route route) {
  switch (route) {
    case Route::ball_limit:
      return "ball-limit";
    case Route::sphere_formula:
      return "sphere-formula";
    case Route::decay_series:
      return "decay-series";
    case Route::atomic_closed_form:
      return "atomic-closed-form";
    case Route::direct_sum:
      return "direct-sum";
  }
  return "unknown";
}

Nats ball_functional(EntropyEngine& engine, int n, Relative relative) {
  require_radius(n, 0, "radius");
  const int r = engine.rank();
  const WordSet B = ball_set(r, n);
  Nats value = engine.block(B, relative) * Rational(1 - 2 * r);
  for (int i = 0; i < r; ++i) {
    value += engine.block(set_union(B, translate(Word::of(generator_letter(i)), B)), relative);
  }
  return value;
}

Nats sphere_functional(EntropyEngine& engine, int n, Relative relative) {
  require_radius(n, 0, "radius");
  const int r = engine.rank();
  const Nats inner = engine.block(ball_set(r, n), relative);
  const Nats outer = engine.block(ball_set(r, n + 1), relative);
  return inner * Rational(1 - r) + (outer - inner) * Rational(1, 2);
}

Nats step_entropy(EntropyEngine& engine, const Word& g, const LetterOrder& order, Relative relative) {
  const auto B = ball(engine.rank(), static_cast<int>(g.length()), order);
  const auto position = B->position(g);
  if (!position) throw InvalidArgument(to_string(g) + " is not a word of rank " + std::to_string(engine.rank()));
  return engine.block(initial_segment(*B, *position + 1), relative) - engine.block(initial_segment(*B, *position), relative);
}

Nats delta(EntropyEngine& engine, const Word& g, const LetterOrder& order, Relative relative) {
  if (g.is_identity()) throw InvalidArgument("independence decay is undefined at the identity");
  const auto [s, p] = parent(g);
  return step_entropy(engine, p, order, relative) - step_entropy(engine, g, order, relative);
}

bool structurally_exact(const SystemSpec& spec, const RouteChoice& choice) {
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, HiddenMarkovSpec>) {
          return false;
        } else if constexpr (std::is_same_v<T, DirectSumSpec>) {
          for (const auto& c : s.components) {
            if (!structurally_exact(c, choice)) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, FiniteActionSpec>) {
          // A coarse user partition needs enough translates to separate points.
          if (choice.route == Route::atomic_closed_form) return true;
          return labels_separate_points(s) && choice.radius >= (choice.route == Route::decay_series ? 1 : 0);
        } else {
          if (choice.route == Route::decay_series) return choice.radius >= 2;
          return choice.route == Route::ball_limit || choice.route == Route::sphere_formula;
        }
      },
      spec.kind);
}

EntropyReport ball_route(EntropyEngine& engine, int n, Relative relative) {
  EntropyReport report;
  report.route = Route::ball_limit;
  report.truncation = "n=" + std::to_string(n);
  for (int m = 0; m <= n; ++m) {
    report.value = ball_functional(engine, m, relative);
    report.trace.push_back({std::to_string(m), report.value.value(), report.value.value()});
  }
  report.exact = structurally_exact(engine.system().spec, {Route::ball_limit, n, std::nullopt});
  return report;
}

EntropyReport sphere_route(EntropyEngine& engine, int n, Relative relative) {
  EntropyReport report;
  report.route = Route::sphere_formula;
  report.truncation = "n=" + std::to_string(n);
  for (int m = 0; m <= n; ++m) {
    report.value = sphere_functional(engine, m, relative);
    report.trace.push_back({std::to_string(m), report.value.value(), report.value.value()});
  }
  report.exact = structurally_exact(engine.system().spec, {Route::sphere_formula, n, std::nullopt});
  return report;
}

EntropyReport f_decay(EntropyEngine& engine, int R, const LetterOrder& order, Relative relative) {
  require_radius(R, 1, "decay radius");
  if (order.rank() != engine.rank()) throw InvalidArgument("letter order rank differs from the system rank");
  EntropyReport report;
  report.route = Route::decay_series;
  report.truncation = "R=" + std::to_string(R);
  const auto B = ball(engine.rank(), R, order);
  Nats value = engine.block(WordSet{Word::identity()}, relative);
  Nats last_sphere;
  for (std::size_t i = 1; i < B->size(); ++i) {
    const Word& g = (*B)[i];
    const Nats d = delta(engine, g, order, relative);
    value -= d * Rational(1, 2);
    if (static_cast<int>(g.length()) == R) last_sphere += d * Rational(1, 2);
    report.trace.push_back({to_string(g), d.value(), value.value()});
  }
  report.value = value;
  report.tail_indicator = last_sphere.value();
  report.exact = structurally_exact(engine.system().spec, {Route::decay_series, R, order});
  return report;
}

Nats f_atomic(const FiniteActionSpec& spec, int rank) {
  return shannon(std::span<const Rational>(spec.mass)) * Rational(1 - rank);
}

EntropyReport atomic_route(const System& system) {
  const auto* f = std::get_if<FiniteActionSpec>(&system.spec.kind);
  if (f == nullptr) throw InvalidArgument("the atomic closed form applies to finite actions only");
  require_valid(system);
  EntropyReport report;
  report.route = Route::atomic_closed_form;
  report.truncation = "closed form";
  report.value = f_atomic(*f, system.rank);
  report.exact = true;
  return report;
}

EntropyReport evaluate(EntropyEngine& engine, const RouteChoice& choice, Relative relative) {
  switch (choice.route) {
    case Route::ball_limit:
      return ball_route(engine, choice.radius, relative);
    case Route::sphere_formula:
      return sphere_route(engine, choice.radius, relative);
    case Route::decay_series:
      return f_decay(engine, choice.radius, choice.order.value_or(LetterOrder(engine.rank())), relative);
    case Route::atomic_closed_form: {
      auto report = atomic_route(engine.system());
      if (engine.options().mode == Mode::floating) report.value = report.value.dropped_exactness();
      return report;
    }
    case Route::direct_sum:
      return f_direct_sum(engine.system(), {Route::ball_limit, choice.radius, choice.order}, engine.options()).formula;
  }
  throw InvalidArgument("unknown route");
}

DirectSumReport f_direct_sum(const System& system, const RouteChoice& choice, const EngineOptions& options, double tolerance) {
  const auto* d = std::get_if<DirectSumSpec>(&system.spec.kind);
  if (d == nullptr) throw InvalidArgument("the decomposition identity applies to direct sums only");
  require_valid(system);
  RouteChoice shared = choice;
  if (shared.route == Route::atomic_closed_form || shared.route == Route::direct_sum) shared.route = Route::ball_limit;

  DirectSumReport out;
  bool exact = true;
  for (std::size_t i = 0; i < d->components.size(); ++i) {
    const System component{system.rank, d->components[i]};
    EntropyEngine engine(component, options);
    const bool atomic = std::holds_alternative<FiniteActionSpec>(component.spec.kind);
    auto report = evaluate(engine, atomic ? RouteChoice{Route::atomic_closed_form, shared.radius, shared.order} : shared);
    exact = exact && report.exact;
    out.component_sum += report.value * d->weights[i];
    out.components.push_back(std::move(report));
  }
  Nats tau = shannon(std::span<const Rational>(d->weights));
  if (options.mode == Mode::floating) tau = tau.dropped_exactness();

  out.formula.route = Route::direct_sum;
  out.formula.truncation = "components by " + route_name(shared.route) + ", " +
                           (shared.route == Route::decay_series ? "R=" : "n=") + std::to_string(shared.radius);
  out.formula.value = out.component_sum - tau * Rational(system.rank - 1);
  out.formula.exact = exact;
  for (std::size_t i = 0; i < out.components.size(); ++i) {
    out.formula.trace.push_back({std::to_string(i), out.components[i].value.value(), 0.0});
  }
  double running = 0.0;
  for (std::size_t i = 0; i < out.components.size(); ++i) {
    running += d->weights[i].get_d() * out.formula.trace[i].term;
    out.formula.trace[i].cumulative = running;
  }
  out.formula.trace.push_back({"tau", tau.value(), out.formula.value.value()});

  EntropyEngine whole(system, options);
  out.direct = evaluate(whole, shared);
  out.relative = evaluate(whole, shared, Relative::components);
  out.agree = agree(out.direct.value, out.formula.value, tolerance) && agree(out.relative.value, out.component_sum, tolerance);
  return out;
}

std::vector<GrowthRow> growth_profile(EntropyEngine& engine, int N, Relative relative) {
  require_radius(N, 0, "growth depth");
  std::vector<GrowthRow> rows;
  for (int n = 0; n <= N; ++n) {
    GrowthRow row;
    row.n = n;
    row.increment = engine.block(ball_set(engine.rank(), n + 1), relative) - engine.block(ball_set(engine.rank(), n), relative);
    if (n >= 1) row.root = std::pow(std::max(row.increment.value(), 0.0), 1.0 / n);
    rows.push_back(std::move(row));
  }
  return rows;
}

Nats ks_cyclic(EntropyEngine& engine, const Word& g, int n, int k, Relative relative) {
  if (g.is_identity()) throw InvalidArgument("cyclic entropy needs a nontrivial element");
  require_radius(n, 0, "radius");
  require_radius(k, 0, "depth");
  const WordSet B = ball_set(engine.rank(), n);
  WordSet past;
  for (int m = 1; m <= k; ++m) past = set_union(past, translate(power(g, -m), B));
  return engine.block(set_union(past, B), relative) - engine.block(past, relative);
}

RFormulaResult rformula_check(EntropyEngine& engine, int n, Relative relative, int max_depth) {
  require_radius(max_depth, 2, "maximum depth");
  const int r = engine.rank();
  RFormulaResult out;
  out.left = ball_functional(engine, n, relative);
  const Nats base = engine.block(ball_set(r, n), relative) * Rational(1 - r);
  out.right_low = base;
  out.right_high = base;
  out.stabilized = true;
  for (int i = 0; i < r; ++i) {
    const Word s = Word::of(generator_letter(i));
    Nats previous = ks_cyclic(engine, s, n, 1, relative);
    int depth = 1;
    bool settled = false;
    for (int k = 2; k <= max_depth; ++k) {
      Nats current;
      try {
        current = ks_cyclic(engine, s, n, k, relative);
      } catch (const CapExceeded&) {
        break;
      }
      if (std::abs(current.value() - previous.value()) < kStabilizationTolerance) {
        settled = true;
        previous = current;
        break;
      }
      previous = current;
      depth = k;
    }
    out.depths.push_back(depth);
    out.h.push_back(previous);
    out.right_high += previous;
    if (settled) {
      out.right_low += previous;
    } else {
      out.stabilized = false;
    }
  }
  return out;
}

std::string format_value(double nats, bool bits) {
  if (std::isinf(nats)) return nats < 0 ? "-inf" : "inf";
  const double v = bits ? nats / std::log(2.0) : nats;
  if (std::abs(v) < 1e-12) return "0";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.7g", v);
  return buffer;
}

std::string to_text(const EntropyReport& report, bool bits) {
  std::string out;
  out += "route: " + route_name(report.route) + "\n";
  out += "truncation: " + report.truncation + "\n";
  out += "value: " + (report.minus_infinity ? std::string("-inf") : format_value(report.value.value(), bits)) + "\n";
  out += std::string("exact: ") + (report.exact ? "true" : "false") + "\n";
  if (report.tail_indicator) out += "last-sphere share: " + format_value(*report.tail_indicator, bits) + "\n";
  if (!report.trace.empty()) {
    out += "trace:\n";
    for (const auto& row : report.trace) {
      out += "  " + row.index + " " + format_value(row.term, bits) + " " + format_value(row.cumulative, bits) + "\n";
    }
  }
  return out;
}

std::string to_csv(const EntropyReport& report, bool bits) {
  std::string out = "n_or_g,term_value,cumulative\n";
  for (const auto& row : report.trace) {
    out += row.index + "," + format_value(row.term, bits) + "," + format_value(row.cumulative, bits) + "\n";
  }
  return out;
}

}  // namespace fent
