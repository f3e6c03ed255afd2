#pragma once

// f-invariant entropy: the ball functional F_G, the sphere functional, the
// independence decay delta and its series, the atomic closed form, the
// ergodic-decomposition identity, growth diagnostics, truncated cyclic
// Kolmogorov-Sinai entropies and the rank formula built from them.
//
// Finite truncations of the ball and decay routes are upper bounds on f.
// Reports are flagged exact only when the tail provably vanishes.

#include <optional>
#include <string>
#include <vector>

#include "fent/block_entropy.hpp"

namespace fent {

enum class Route { ball_limit, sphere_formula, decay_series, atomic_closed_form, direct_sum };
std::string route_name(Route route);

struct TraceRow {
  std::string index;  // n, or a group element
  double term = 0.0;
  double cumulative = 0.0;
};

struct EntropyReport {
  Route route = Route::ball_limit;
  Nats value;
  bool minus_infinity = false;  // only from closed forms with divergent H(tau)
  std::string truncation;
  bool exact = false;
  std::vector<TraceRow> trace;
  // Decay series: the last sphere's share of the partial sum, a heuristic tail indicator.
  std::optional<double> tail_indicator;
};

// F_G(B_n alpha / Sigma) = (1 - 2r) H(B_n) + sum_{s in S} H(B_n u s B_n).
Nats ball_functional(EntropyEngine& engine, int n, Relative relative = Relative::none);
// (1 - r) H(B_n) + 1/2 H(B_{n+1} / B_n).
Nats sphere_functional(EntropyEngine& engine, int n, Relative relative = Relative::none);
// H(Pre(g) u {g}) - H(Pre(g)) under the given letter order.
Nats step_entropy(EntropyEngine& engine, const Word& g, const LetterOrder& order, Relative relative = Relative::none);
// delta(g) = step(s^-1 g) - step(g) with s the leftmost letter of g.
Nats delta(EntropyEngine& engine, const Word& g, const LetterOrder& order, Relative relative = Relative::none);

EntropyReport ball_route(EntropyEngine& engine, int n, Relative relative = Relative::none);
EntropyReport sphere_route(EntropyEngine& engine, int n, Relative relative = Relative::none);
EntropyReport f_decay(EntropyEngine& engine, int R, const LetterOrder& order, Relative relative = Relative::none);

// -(r - 1) H(mu).
Nats f_atomic(const FiniteActionSpec& spec, int rank);
EntropyReport atomic_route(const System& system);

struct RouteChoice {
  Route route = Route::ball_limit;
  int radius = 1;  // n for ball / sphere, R for decay
  std::optional<LetterOrder> order;
};

EntropyReport evaluate(EntropyEngine& engine, const RouteChoice& choice, Relative relative = Relative::none);

// Whether the truncated route equals f by a structural argument.
bool structurally_exact(const SystemSpec& spec, const RouteChoice& choice);

struct DirectSumReport {
  EntropyReport formula;      // sum p_i f(nu_i) - (r - 1) H(tau)
  EntropyReport direct;       // the route on the sum system itself
  EntropyReport relative;     // the route relative to Sigma
  Nats component_sum;         // sum p_i f(nu_i)
  std::vector<EntropyReport> components;
  bool agree = false;         // direct == formula and relative == component_sum
};

DirectSumReport f_direct_sum(const System& system, const RouteChoice& choice, const EngineOptions& options = {},
                             double tolerance = 1e-9);

struct GrowthRow {
  int n = 0;
  Nats increment;             // H(B_{n+1} / B_n)
  std::optional<double> root;  // increment^(1/n), n >= 1
};
std::vector<GrowthRow> growth_profile(EntropyEngine& engine, int N, Relative relative = Relative::none);

// H(B_n / union_{m=1..k} g^-m B_n), the k-th term of the decreasing limit.
Nats ks_cyclic(EntropyEngine& engine, const Word& g, int n, int k, Relative relative = Relative::none);

inline constexpr double kStabilizationTolerance = 1e-12;

struct RFormulaResult {
  Nats left;          // F_G(n)
  Nats right_low;     // (1 - r) H(B_n) + sum_s (h_s, or 0 when not stabilized)
  Nats right_high;    // (1 - r) H(B_n) + sum_s (last computed term)
  bool stabilized = false;
  std::vector<int> depths;  // per generator, the depth at which the terms settled (or stopped)
  std::vector<Nats> h;      // per generator, last term
};

RFormulaResult rformula_check(EntropyEngine& engine, int n, Relative relative = Relative::none, int max_depth = 6);

// Text record and CSV (n_or_g,term_value,cumulative). `bits` rescales by 1/log 2.
std::string format_value(double nats, bool bits);
std::string to_text(const EntropyReport& report, bool bits = false);
std::string to_csv(const EntropyReport& report, bool bits = false);

}  // namespace fent
