// Command line front end: check / simulate / sweep over experiment spec files.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "noncoh/experiment.hpp"

namespace {

struct CliArgs {
  std::string spec_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<std::string> snr_grid;
  std::optional<std::string> decoder;
  std::optional<int> pilots;
  bool noiseless = false;
  bool force = false;
  bool self_test = false;
  std::optional<std::string> out;
};

void add_common_options(CLI::App* cmd, CliArgs& args) {
  cmd->add_option("--spec", args.spec_path, "experiment spec file")->required();
  cmd->add_option("--seed", args.seed, "master seed (overrides the spec)");
  cmd->add_option("--trials", args.trials, "trials per snr point");
  cmd->add_option("--snr-grid", args.snr_grid, "comma-separated snr grid in dB");
  cmd->add_option("--decoder", args.decoder, "simo|simo-reduced|mimo|baseline");
  cmd->add_option("--pilots", args.pilots, "pilot count (reduced/baseline decoders)");
  cmd->add_flag("--noiseless", args.noiseless, "skip the noise draw");
  cmd->add_flag("--force", args.force, "run even when recovery conditions fail");
  cmd->add_option("--out", args.out, "output path (records or table)");
}

int apply_overrides(const CliArgs& args, noncoh::ExperimentSpec& spec) {
  if (args.seed) spec.seed = *args.seed;
  if (args.trials) spec.dof.trials_per_point = *args.trials;
  if (args.snr_grid) spec.dof.snr_grid = noncoh::parse_snr_grid_db(*args.snr_grid);
  if (args.decoder) {
    const auto id = noncoh::decoder_from_string(*args.decoder);
    if (!id) {
      std::cerr << "unknown decoder: " << *args.decoder << "\n";
      return 2;
    }
    spec.decoder = *id;
  }
  if (args.pilots) spec.pilots = *args.pilots;
  if (args.noiseless) spec.dof.noiseless = true;
  if (args.force) spec.force = true;
  if (args.out) spec.out_path = *args.out;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"noncoherent decoding over correlatively changing fading channels"};
  app.require_subcommand(1);

  CliArgs args;
  CLI::App* check = app.add_subcommand("check", "evaluate the recovery conditions");
  CLI::App* simulate = app.add_subcommand("simulate", "run trials and stream records");
  CLI::App* sweep = app.add_subcommand("sweep", "snr sweep with a scaled constellation");
  add_common_options(check, args);
  add_common_options(simulate, args);
  add_common_options(sweep, args);
  sweep->add_flag("--self-test", args.self_test,
                  "bypass the channel and verify the slope estimator");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage errors exit with 2
  }

  noncoh::ExperimentSpec spec;
  try {
    spec = noncoh::load_spec(args.spec_path);
  } catch (const std::exception& e) {
    std::cerr << "failed to load spec: " << e.what() << "\n";
    return 2;
  }
  if (const int code = apply_overrides(args, spec); code != 0) return code;

  std::ofstream file_out;
  const bool to_file = !spec.out_path.empty();
  if (to_file) {
    file_out.open(spec.out_path, std::ios::binary);
    if (!file_out) {
      std::cerr << "cannot open output file: " << spec.out_path << "\n";
      return 2;
    }
  }

  try {
    if (check->parsed()) {
      return noncoh::cmd_check(spec, std::cout);
    }
    if (simulate->parsed()) {
      // records go to --out when given (summary to stdout), else to stdout
      std::ostream& records = to_file ? static_cast<std::ostream&>(file_out) : std::cout;
      std::ostream& summary = to_file ? std::cout : std::cerr;
      return noncoh::cmd_simulate(spec, records, summary);
    }
    std::ostream& table = to_file ? static_cast<std::ostream&>(file_out) : std::cout;
    std::ostream& summary = to_file ? std::cout : std::cerr;
    return noncoh::cmd_sweep(spec, table, summary, args.self_test);
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid spec: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
