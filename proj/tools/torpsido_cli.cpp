#include <CLI11.hpp>

#include "torpsido/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Toroidal pseudodifferential operator experiments"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  unsigned threads = 0;
  bool verbose = false;
  auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
  run->add_option("config", config, "Config file")->required();
  run->add_option("--out", out_dir, "Output directory (overridden by $TORPSIDO_OUT_DIR)");
  run->add_option("--threads", threads, "Worker thread cap")->check(CLI::PositiveNumber);
  run->add_flag("--verbose", verbose, "Print timing");

  auto* selftest = app.add_subcommand("selftest", "Exact-identity checks on a small geometry");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : torpsido::cli::usage_error;
  }
  if (threads > 0) torpsido::set_thread_cap(threads);
  if (*selftest) return torpsido::cli::selftest(std::cout);
  return torpsido::cli::run(config, out_dir, verbose, std::cout, std::cerr);
}
