#include "fent/cli.hpp"

#include <cmath>
#include <sstream>

#include "fent/corpus.hpp"
#include "fent/errors.hpp"
#include "fent/f_entropy.hpp"
#include "fent/system_io.hpp"

namespace fent {

namespace {

class Usage : public Error {
 public:
  using Error::Error;
};

class Disagreement : public Error {
 public:
  using Error::Error;
};

struct Session {
  const RunConfig& config;
  std::ostream& out;
  System system;
  EngineOptions options;

  bool csv() const { return config.format == "csv"; }
  std::string value(double v) const { return format_value(v, config.bits); }
  Relative relative() const { return config.relative ? Relative::components : Relative::none; }
  LetterOrder order() const {
    return config.order.empty() ? LetterOrder(system.rank) : LetterOrder::parse(config.order, system.rank);
  }
};

EngineOptions engine_options(const RunConfig& c) {
  EngineOptions o;
  o.mode = c.mode;
  o.pattern_cap = c.cap;
  o.execution = c.serial ? Execution::serial : Execution::parallel;
  return o;
}

System load(const RunConfig& c) {
  if (c.input.empty()) throw Usage("command \"" + c.command + "\" needs an input file");
  System s;
  try {
    s = load_system(c.input);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.column(), c.input + ": " + e.what());
  }
  if (c.rank && *c.rank != s.rank) {
    throw Usage("--rank " + std::to_string(*c.rank) + " disagrees with rank " + std::to_string(s.rank) + " in " + c.input);
  }
  return s;
}

void cmd_validate(Session& s) {
  const auto report = validate(s.system);
  if (!report.ok()) throw ValidationError(report.summary());
  if (s.config.normalize) {
    s.out << print_system(s.system);
    return;
  }
  const auto partition = canonical_partition(s.system);
  s.out << "valid: " << kind_name(s.system.spec) << ", rank " << s.system.rank << "\n";
  s.out << "partition: " << partition.description << " {";
  for (std::size_t i = 0; i < partition.labels.size(); ++i) s.out << (i ? ", " : "") << partition.labels[i];
  s.out << "}\n";
}

void cmd_f(Session& s) {
  const int n = s.config.radius.value_or(1);
  EntropyEngine engine(s.system, s.options);
  std::vector<std::pair<std::string, EntropyReport>> rows;
  rows.emplace_back("ball-limit n=" + std::to_string(n), ball_route(engine, n, s.relative()));
  rows.emplace_back("sphere-formula n=" + std::to_string(n), sphere_route(engine, n, s.relative()));
  rows.emplace_back("decay-series R=" + std::to_string(n + 1), f_decay(engine, n + 1, s.order(), s.relative()));
  if (std::holds_alternative<FiniteActionSpec>(s.system.spec.kind) && !s.config.relative) {
    rows.emplace_back("atomic-closed-form", evaluate(engine, {Route::atomic_closed_form, n, std::nullopt}));
  }
  if (std::holds_alternative<DirectSumSpec>(s.system.spec.kind) && !s.config.relative) {
    rows.emplace_back("direct-sum n=" + std::to_string(n), f_direct_sum(s.system, {Route::ball_limit, n, std::nullopt}, s.options).formula);
  }
  std::vector<const Nats*> exact;
  for (const auto& [name, report] : rows) {
    if (report.exact) exact.push_back(&report.value);
  }
  bool agreement = true;
  for (std::size_t i = 1; i < exact.size(); ++i) agreement = agreement && agree(*exact[0], *exact[i], kCorpusTolerance);

  if (s.csv()) {
    s.out << "n_or_g,term_value,cumulative\n";
    for (const auto& [name, report] : rows) s.out << name << "," << s.value(report.value.value()) << "," << s.value(report.value.value()) << "\n";
  } else {
    s.out << "system: " << kind_name(s.system.spec) << ", rank " << s.system.rank << (s.config.relative ? ", relative to components" : "") << "\n";
    for (const auto& [name, report] : rows) {
      s.out << name << ": " << s.value(report.value.value()) << (report.exact ? " (exact)" : " (upper bound)") << "\n";
    }
    s.out << "agreement: "
          << (exact.empty() ? "no exact route; truncated values are upper bounds" : agreement ? "exact routes agree" : "exact routes DISAGREE")
          << "\n";
  }
  if (!agreement) throw Disagreement("exact routes disagree");
}

void cmd_decay(Session& s) {
  EntropyEngine engine(s.system, s.options);
  const auto report = f_decay(engine, s.config.radius.value_or(2), s.order(), s.relative());
  s.out << (s.csv() ? to_csv(report, s.config.bits) : to_text(report, s.config.bits));
}

void cmd_growth(Session& s) {
  EntropyEngine engine(s.system, s.options);
  const auto rows = growth_profile(engine, s.config.radius.value_or(2), s.relative());
  double cumulative = engine.block(WordSet{Word::identity()}, s.relative()).value();
  s.out << (s.csv() ? "n_or_g,term_value,cumulative\n" : "n increment root\n");
  for (const auto& row : rows) {
    cumulative += row.increment.value();
    if (s.csv()) {
      s.out << row.n << "," << s.value(row.increment.value()) << "," << s.value(cumulative) << "\n";
    } else {
      s.out << row.n << " " << s.value(row.increment.value()) << " " << (row.root ? format_value(*row.root, false) : "-") << "\n";
    }
  }
}

void cmd_ks(Session& s) {
  EntropyEngine engine(s.system, s.options);
  const Word g = parse_word(s.config.word, s.system.rank);
  const int n = s.config.radius.value_or(0);
  const int depth = s.config.depth.value_or(3);
  if (depth < 1) throw Usage("--depth must be at least 1");
  s.out << (s.csv() ? "n_or_g,term_value,cumulative\n" : "g=" + to_string(g) + " n=" + std::to_string(n) + "\nk term\n");
  for (int k = 1; k <= depth; ++k) {
    const double v = ks_cyclic(engine, g, n, k, s.relative()).value();
    if (s.csv()) {
      s.out << k << "," << s.value(v) << "," << s.value(v) << "\n";
    } else {
      s.out << k << " " << s.value(v) << "\n";
    }
  }
}

void cmd_rformula(Session& s) {
  EntropyEngine engine(s.system, s.options);
  const int n = s.config.radius.value_or(0);
  const auto r = rformula_check(engine, n, s.relative(), s.config.depth.value_or(6));
  s.out << "left (F_G, n=" << n << "): " << s.value(r.left.value()) << "\n";
  if (r.stabilized) {
    s.out << "right: " << s.value(r.right_high.value()) << "\n";
  } else {
    s.out << "right: [" << s.value(r.right_low.value()) << ", " << s.value(r.right_high.value()) << "] (not stabilized)\n";
  }
  for (std::size_t i = 0; i < r.h.size(); ++i) {
    s.out << "h_" << letter_char(generator_letter(static_cast<int>(i))) << ": " << s.value(r.h[i].value()) << " (depth " << r.depths[i]
          << ")\n";
  }
  const bool asserted = std::holds_alternative<MarkovSpec>(s.system.spec.kind) || std::holds_alternative<BernoulliSpec>(s.system.spec.kind);
  if (!asserted) {
    s.out << "agreement: not asserted for " << kind_name(s.system.spec) << "\n";
    return;
  }
  const bool ok = r.stabilized && agree(r.left, r.right_high, kCorpusTolerance);
  s.out << "agreement: " << (ok ? "yes" : "NO") << "\n";
  if (!ok) throw Disagreement("rank formula sides disagree");
}

void cmd_decompose(Session& s) {
  RouteChoice choice{Route::ball_limit, s.config.radius.value_or(1), std::nullopt};
  if (s.config.route == "sphere") {
    choice.route = Route::sphere_formula;
  } else if (s.config.route == "decay") {
    choice.route = Route::decay_series;
    choice.radius = s.config.radius.value_or(2);
    choice.order = s.order();
  } else if (s.config.route != "ball") {
    throw Usage("--route must be ball, sphere or decay");
  }
  const auto d = f_direct_sum(s.system, choice, s.options, kCorpusTolerance);
  const auto& spec = std::get<DirectSumSpec>(s.system.spec.kind);
  for (std::size_t i = 0; i < d.components.size(); ++i) {
    s.out << "component " << i << " (" << format_rational(spec.weights[i]) << ", " << kind_name(spec.components[i]) << "): "
          << s.value(d.components[i].value.value()) << (d.components[i].exact ? " (exact)" : " (upper bound)") << "\n";
  }
  s.out << "sum p_i f_i: " << s.value(d.component_sum.value()) << "\n";
  s.out << "formula sum p_i f_i - (r-1) H(tau): " << s.value(d.formula.value.value()) << "\n";
  s.out << "direct " << route_name(d.direct.route) << ": " << s.value(d.direct.value.value()) << "\n";
  s.out << "relative to components: " << s.value(d.relative.value.value()) << "\n";
  s.out << "agreement: " << (d.agree ? "yes" : "NO") << "\n";
  if (!d.agree) throw Disagreement("decomposition identity fails");
}

WordSet parse_support(const std::string& text, int rank) {
  WordSet out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(parse_word(item, rank));
  }
  if (out.empty()) throw Usage("--support lists no words");
  return out;
}

void cmd_marginal(Session& s) {
  WordSet F;
  if (s.config.support.empty()) {
    const auto B = ball(s.system.rank, s.config.radius.value_or(1));
    F.assign(B->elements().begin(), B->elements().end());
  } else {
    F = parse_support(s.config.support, s.system.rank);
  }
  MarginalOptions m;
  m.mode = s.options.mode;
  m.pattern_cap = s.options.pattern_cap;
  m.execution = s.options.execution;
  const auto pd = s.config.oracle ? oracle_marginal(s.system, F, std::min<std::uint64_t>(s.config.cap, kOracleCap)) : marginal(s.system, F, m);
  s.out << "# support";
  for (const auto& g : pd.support) s.out << " " << to_string(g);
  s.out << "\n" << dump(pd);
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.cap == 0) throw Usage("--cap must be positive");
    if (config.format != "text" && config.format != "csv") throw Usage("--format must be text or csv");
    if (config.command == "corpus") {
      return run_corpus(out, engine_options(config), config.bits) ? kExitOk : kExitDisagreement;
    }
    Session s{config, out, load(config), engine_options(config)};
    const std::string& c = config.command;
    if (c == "validate") {
      cmd_validate(s);
    } else if (c == "f") {
      cmd_f(s);
    } else if (c == "decay-profile") {
      cmd_decay(s);
    } else if (c == "growth") {
      cmd_growth(s);
    } else if (c == "ks") {
      cmd_ks(s);
    } else if (c == "rformula") {
      cmd_rformula(s);
    } else if (c == "decompose") {
      cmd_decompose(s);
    } else if (c == "marginal") {
      cmd_marginal(s);
    } else {
      throw Usage("unknown command \"" + c + "\"");
    }
    return kExitOk;
  } catch (const Disagreement& e) {
    err << "disagreement: " << e.what() << "\n";
    return kExitDisagreement;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ValidationError& e) {
    err << "invalid system: " << e.what() << "\n";
    return kExitValidation;
  } catch (const CapExceeded& e) {
    err << "size cap exceeded: " << e.what() << "\n";
    return kExitCap;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace fent
