#include <iostream>

#include "CLI11.hpp"
#include "fent/cli.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

int main(int argc, char** argv) {
  fent::RunConfig config;
  config.cap = fent::default_pattern_cap();
  std::string mode = "rational";
  int threads = 0;

  CLI::App app{"f-invariant entropy of free-group actions"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub, bool needs_input) {
    if (needs_input) sub->add_option("input", config.input, "system-description file")->required();
    sub->add_option("--rank", config.rank, "rank r; must match the file");
    sub->add_option("--radius", config.radius, "radius n (or R, N)");
    sub->add_option("--depth", config.depth, "depth k");
    sub->add_option("--mode", mode, "rational or float")->check(CLI::IsMember({"rational", "float"}));
    sub->add_option("--order", config.order, "letter order, e.g. AabB");
    sub->add_option("--cap", config.cap, "pattern cap");
    sub->add_option("--format", config.format, "text or csv")->check(CLI::IsMember({"text", "csv"}));
    sub->add_flag("--bits", config.bits, "report in bits");
    sub->add_flag("--relative", config.relative, "condition on the component partition");
    sub->add_flag("--serial", config.serial, "single-threaded kernels");
    sub->add_option("--threads", threads, "worker threads (0 = OpenMP default)");
    sub->callback([&config, sub] { config.command = sub->get_name(); });
  };

  common(app.add_subcommand("validate", "check a system description"), true);
  app.get_subcommand("validate")->add_flag("--normalize", config.normalize, "print the normalized description");
  common(app.add_subcommand("f", "all routes to f side by side"), true);
  common(app.add_subcommand("decay-profile", "delta(g) over B_R in order"), true);
  common(app.add_subcommand("growth", "H(B_{n+1} / B_n) and its n-th root"), true);
  common(app.add_subcommand("ks", "truncated entropy of a cyclic subgroup"), true);
  app.get_subcommand("ks")->add_option("--word", config.word, "generator of the cyclic subgroup");
  common(app.add_subcommand("rformula", "F_G against the cyclic-entropy formula"), true);
  common(app.add_subcommand("decompose", "ergodic-decomposition identity for a direct sum"), true);
  app.get_subcommand("decompose")->add_option("--route", config.route, "ball, sphere or decay");
  common(app.add_subcommand("corpus", "run the built-in regression systems"), false);
  common(app.add_subcommand("marginal", "dump a pattern distribution"), true);
  app.get_subcommand("marginal")->add_option("--support", config.support, "comma-separated words (default B_radius)");
  app.get_subcommand("marginal")->add_flag("--oracle", config.oracle, "use brute-force enumeration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fent::kExitUsage;
  }
  config.mode = mode == "float" ? fent::Mode::floating : fent::Mode::rational;
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif
  return fent::run(config, std::cout, std::cerr);
}
