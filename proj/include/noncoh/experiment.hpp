#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "noncoh/dof.hpp"

namespace noncoh {

/**
 * One experiment: a correlation profile, the system shape, a decoder and the
 * sweep configuration. Loadable from a flat key = value text file whose
 * values are JSON literals; matrices are row-major nested lists of [re, im]
 * pairs.
 */
struct ExperimentSpec {
  std::string profile_name = "inline";
  Matrix A;  // Q x T whitening matrix
  int n_t = 1;
  int n_r = 1;
  DecoderId decoder = DecoderId::kSimo;
  int pilots = 0;  // 0 selects the decoder default
  DofConfig dof;
  int probes = 400;            // sigma0 calibration probes
  double error_ceiling = 0.05; // bler ceiling for slope-qualifying points
  std::uint64_t seed = 1;
  std::string out_path;
  bool force = false;

  CorrelationProfile profile() const { return CorrelationProfile(A); }
  SystemShape shape() const { return {n_t, n_r}; }
  // shape and regime errors; empty when the spec is runnable
  std::vector<std::string> validate() const;
};

// base_dir resolves an A_file reference (a JSON matrix in its own file);
// load_spec passes the spec file's parent directory.
ExperimentSpec parse_spec(const std::string& text, const std::string& base_dir = "");
ExperimentSpec load_spec(const std::string& path);

// dB list "30,40,50" -> linear SNR values
std::vector<double> parse_snr_grid_db(const std::string& csv);

std::string report_to_json(const RecoveryReport& report);
std::string record_to_json(const TrialRecord& record);
void write_sweep_csv(std::ostream& os, const SweepTable& table);

// Subcommand drivers. Return process exit codes: 0 success, 1 condition or
// decoder failure, 2 usage/validation failure. Outputs carry no timestamps,
// so a given (spec, seed) pair reproduces every byte.
int cmd_check(const ExperimentSpec& spec, std::ostream& out);
int cmd_simulate(const ExperimentSpec& spec, std::ostream& records, std::ostream& summary);
int cmd_sweep(const ExperimentSpec& spec, std::ostream& table_out, std::ostream& summary,
              bool self_test = false);

}  // namespace noncoh
