// mobdisj: experiment driver. One subcommand per experiment; see README.md.

#include <CLI11.hpp>

#include "mobdisj/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Möbius disjointness experiments over finite fields"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mobdisj::kToolVersion));

  std::string config, out = ".", mu_cache;
  unsigned threads = 0;
  mobdisj::u64 limit = 0;

  const char* commands[][2] = {
      {"verify-spectral", "compare map iteration, the linear recurrence and the closed form"},
      {"sum-scan", "twisted, correlation and single character sums along a trajectory"},
      {"weil-check", "ratio table for hybrid sums over random rational functions"},
      {"bsz-report", "prime-block decomposition of a twisted sum"},
      {"mobius-check", "exhaustive sieve-versus-factorization comparison"},
  };
  for (auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "JSON config file");
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--mu-cache", mu_cache, "cached Möbius table file");
    sub->add_option("--threads", threads, "worker threads (overrides the config)");
    if (std::string_view(name) == "mobius-check") sub->add_option("--limit", limit, "largest n to check");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : mobdisj::kExitConfig;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  mobdisj::RunOptions opt;
  opt.out_dir = out;
  if (!mu_cache.empty()) opt.mu_cache = mu_cache;
  if (chosen->count("--threads")) opt.threads = threads;
  std::optional<std::filesystem::path> config_path;
  if (!config.empty()) config_path = config;
  std::optional<mobdisj::u64> limit_override;
  if (chosen->get_name() == "mobius-check" && chosen->count("--limit")) limit_override = limit;
  return mobdisj::run_command(chosen->get_name(), config_path, opt, limit_override);
}
