#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "svarwb/workbench.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
  sub->add_option("--seed", f.seed, "random seed, overrides the config");
  sub->add_option("--threads", f.threads, "worker threads, overrides SVARWB_THREADS and the config")
      ->check(CLI::PositiveNumber);
  sub->add_option("--out", f.out, "output directory, overrides the config");
}

// Thread count precedence: --threads, then SVARWB_THREADS, then the config.
int resolve_threads(const Flags& f, int configured) {
  if (f.threads) return *f.threads;
  if (const char* env = std::getenv("SVARWB_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 1) return v;
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring invalid SVARWB_THREADS='" << env << "'\n";
  }
  return configured;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structural VAR workbench with exogenous breaks"};
  app.set_version_flag("--version", std::string(svarwb::version()));
  app.require_subcommand(1);
  Flags flags;
  const char* descriptions[] = {"check local identification of the restrictions",
                                "estimate the reduced form and enumerate structural solutions",
                                "posterior, projection and robust inference on a target",
                                "simulate a dataset from a configured data generating process"};
  int i = 0;
  for (auto c : {svarwb::Command::Identify, svarwb::Command::Estimate, svarwb::Command::Infer,
                 svarwb::Command::Simulate})
    add_flags(app.add_subcommand(svarwb::to_string(c), descriptions[i++]), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const auto command = *svarwb::parse_command(app.get_subcommands().front()->get_name());

  try {
    svarwb::RunConfig cfg = svarwb::load_config(flags.config);
    if (flags.seed) cfg.seed = *flags.seed;
    cfg.threads = resolve_threads(flags, cfg.threads);
    if (flags.out) cfg.output = *flags.out;
    cfg.inference.seed = cfg.seed;
    cfg.inference.threads = cfg.threads;
    svarwb::run_command(command, cfg, std::cout);
  } catch (const svarwb::Error& e) {
    std::cerr << "error [" << svarwb::to_string(e.code()) << "]: " << e.what() << "\n";
    return svarwb::exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
