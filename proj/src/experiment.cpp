#include "noncoh/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace noncoh {

using json = nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw Error("matrix literal must be a nested list of [re, im] pairs");
  }
  const size_t rows = j.size();
  const size_t cols = j[0].size();
  Matrix M(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    if (j[r].size() != cols) throw Error("ragged matrix literal");
    for (size_t c = 0; c < cols; ++c) {
      const json& cell = j[r][c];
      if (cell.is_number()) {
        M(r, c) = Complex(cell.get<double>(), 0.0);
      } else if (cell.is_array() && cell.size() == 2) {
        M(r, c) = Complex(cell[0].get<double>(), cell[1].get<double>());
      } else {
        throw Error("matrix entries must be [re, im] pairs");
      }
    }
  }
  return M;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// fixed formatting so output bytes do not depend on locale or stream state
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

std::vector<double> parse_snr_grid_db(const std::string& csv) {
  std::vector<double> grid;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    size_t used = 0;
    double db = 0.0;
    try {
      db = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw Error("bad snr grid entry: " + item);
    grid.push_back(db_to_linear(db));
  }
  if (grid.empty()) throw Error("empty snr grid");
  return grid;
}

ExperimentSpec parse_spec(const std::string& text, const std::string& base_dir) {
  ExperimentSpec spec;
  bool saw_profile = false;

  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    // strip comments outside of string literals
    bool in_string = false;
    for (size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_string = !in_string;
      if (line[i] == '#' && !in_string) {
        line.resize(i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error("line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string raw = trim(line.substr(eq + 1));
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::parse_error&) {
      value = raw;  // bare word, treated as a string
    }

    try {
      if (key == "profile_name") {
        spec.profile_name = value.get<std::string>();
      } else if (key == "A") {
        spec.A = matrix_from_json(value);
        saw_profile = true;
      } else if (key == "A_file") {
        std::string path = value.get<std::string>();
        if (!base_dir.empty() && !path.empty() && path[0] != '/') {
          path = base_dir + "/" + path;
        }
        std::ifstream in(path);
        if (!in) throw Error("cannot open profile matrix file: " + path);
        spec.A = matrix_from_json(json::parse(in));
        saw_profile = true;
      } else if (key == "n_t") {
        spec.n_t = value.get<int>();
      } else if (key == "n_r") {
        spec.n_r = value.get<int>();
      } else if (key == "decoder") {
        const auto id = decoder_from_string(value.get<std::string>());
        if (!id) throw Error("unknown decoder: " + value.get<std::string>());
        spec.decoder = *id;
      } else if (key == "pilots") {
        spec.pilots = value.get<int>();
      } else if (key == "delta") {
        spec.dof.delta = value.get<double>();
      } else if (key == "sigma0") {
        spec.dof.sigma0 = value.get<double>();
      } else if (key == "epsilon") {
        spec.dof.epsilon = value.get<double>();
      } else if (key == "snr_grid_db") {
        spec.dof.snr_grid.clear();
        for (const auto& v : value) spec.dof.snr_grid.push_back(db_to_linear(v.get<double>()));
      } else if (key == "trials") {
        spec.dof.trials_per_point = value.get<int>();
      } else if (key == "noiseless") {
        spec.dof.noiseless = value.get<bool>();
      } else if (key == "zero_exclusion_frac") {
        spec.dof.zero_exclusion_frac = value.get<double>();
      } else if (key == "probes") {
        spec.probes = value.get<int>();
      } else if (key == "error_ceiling") {
        spec.error_ceiling = value.get<double>();
      } else if (key == "seed") {
        spec.seed = value.get<std::uint64_t>();
      } else if (key == "out") {
        spec.out_path = value.get<std::string>();
      } else if (key == "force") {
        spec.force = value.get<bool>();
      } else {
        throw Error("unknown key: " + key);
      }
    } catch (const json::exception& e) {
      throw Error("line " + std::to_string(lineno) + ": bad value for " + key + ": " + e.what());
    }
  }
  if (!saw_profile) throw Error("spec does not define the profile matrix A");
  return spec;
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open spec file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const auto slash = path.find_last_of('/');
  return parse_spec(buf.str(), slash == std::string::npos ? "" : path.substr(0, slash));
}

std::vector<std::string> ExperimentSpec::validate() const {
  std::vector<std::string> errors;
  try {
    const CorrelationProfile prof = profile();
    make_layout(decoder, prof, shape(), pilots);  // regime checks
  } catch (const std::exception& e) {
    errors.emplace_back(e.what());
  }
  try {
    if (!dof.snr_grid.empty()) dof.validate();
  } catch (const std::exception& e) {
    errors.emplace_back(e.what());
  }
  return errors;
}

std::string report_to_json(const RecoveryReport& report) {
  json j;
  j["passed"] = report.passed;
  j["failures"] = json::array();
  for (const auto& f : report.failures) {
    json jf;
    jf["condition"] = f.condition;
    if (f.q > 0) jf["q"] = f.q;
    if (f.t > 0) jf["t"] = f.t;
    jf["indices"] = f.indices;
    jf["magnitude"] = f.magnitude;
    jf["det_ratio"] = f.det_ratio;
    j["failures"].push_back(std::move(jf));
  }
  j["notes"] = report.notes;
  return j.dump();
}

std::string record_to_json(const TrialRecord& rec) {
  json j;
  j["seed"] = rec.seed;
  j["profile"] = rec.profile_id;
  j["decoder"] = to_string(rec.decoder);
  j["snr"] = rec.snr;
  j["noiseless"] = rec.noiseless;
  j["tx"] = rec.tx;
  j["rx"] = rec.rx;
  j["success"] = rec.success;
  j["symbol_errors"] = rec.symbol_errors;
  j["guards"] = rec.diag.guard_trips;
  json cond;
  cond["subspace"] = rec.diag.subspace_cond;
  cond["pivot"] = rec.diag.pivot_cond;
  cond["solve"] = rec.diag.solve_cond;
  cond["residual"] = rec.diag.residual;
  j["cond"] = std::move(cond);
  return j.dump();
}

void write_sweep_csv(std::ostream& os, const SweepTable& table) {
  os << "snr,dmin,grid,bler,rate_bits\n";
  for (const SweepRow& row : table.rows) {
    os << fmt(row.snr) << ',' << fmt(row.d_min) << ',' << row.grid << ',' << fmt(row.bler)
       << ',' << fmt(row.rate_bits) << '\n';
  }
}

namespace {

RecoveryReport run_conditions(const ExperimentSpec& spec) {
  const CorrelationProfile prof = spec.profile();
  if (spec.decoder == DecoderId::kMimo) {
    return check_recovery_mimo(prof, spec.n_t);
  }
  return check_recovery_simo(prof);
}

}  // namespace

int cmd_check(const ExperimentSpec& spec, std::ostream& out) {
  const auto errors = spec.validate();
  if (!errors.empty()) {
    for (const auto& e : errors) out << "invalid spec: " << e << "\n";
    return 2;
  }
  RecoveryReport report;
  try {
    report = run_conditions(spec);
  } catch (const Error& e) {
    out << "condition check failed to run: " << e.what() << "\n";
    return 1;
  }
  out << "profile " << spec.profile_name << " (" << spec.profile().id() << "), decoder "
      << to_string(spec.decoder) << "\n";
  for (const auto& f : report.failures) {
    out << "FAIL " << f.condition;
    if (f.condition != "column-subset") {
      out << " (q=" << f.q << ", t=" << f.t << ")";
    } else {
      out << " (columns";
      for (int i : f.indices) out << ' ' << i;
      out << ")";
    }
    out << " |E|=" << fmt(f.magnitude) << " |det ratio|=" << fmt(f.det_ratio) << "\n";
  }
  for (const auto& n : report.notes) out << "note: " << n << "\n";
  out << "result: " << (report.passed ? "pass" : "fail") << "\n";
  out << report_to_json(report) << "\n";
  return report.passed ? 0 : 1;
}

namespace {

int guarded_preflight(const ExperimentSpec& spec, std::ostream& summary) {
  const auto errors = spec.validate();
  if (!errors.empty()) {
    for (const auto& e : errors) summary << "invalid spec: " << e << "\n";
    return 2;
  }
  if (spec.dof.snr_grid.empty()) {
    summary << "invalid spec: snr grid is empty\n";
    return 2;
  }
  const RecoveryReport report = run_conditions(spec);
  if (!report.passed && !spec.force) {
    summary << "recovery conditions failed (" << report.failures.size()
            << " violations); rerun with --force to simulate anyway\n";
    return 1;
  }
  return 0;
}

}  // namespace

int cmd_simulate(const ExperimentSpec& spec, std::ostream& records, std::ostream& summary) {
  const int pre = guarded_preflight(spec, summary);
  if (pre != 0) return pre;

  const CorrelationProfile prof = spec.profile();
  std::vector<TrialRecord> recs;
  SweepTable table;
  try {
    table = run_sweep(spec.dof, prof, spec.decoder, spec.shape(), spec.seed, &recs);
  } catch (const std::exception& e) {
    summary << "simulation failed: " << e.what() << "\n";
    return 1;
  }
  for (const TrialRecord& r : recs) records << record_to_json(r) << "\n";

  long failures = 0;
  for (const TrialRecord& r : recs) failures += r.success ? 0 : 1;
  summary << "decoder " << to_string(spec.decoder) << ", profile " << spec.profile_name
          << ", payload dims " << table.dims << ", sigma0 " << fmt(table.sigma0) << "\n";
  for (const SweepRow& row : table.rows) {
    summary << "snr " << fmt(row.snr) << ": trials " << spec.dof.trials_per_point << ", bler "
            << fmt(row.bler) << ", ser " << fmt(row.ser) << ", rate_bits " << fmt(row.rate_bits)
            << "\n";
  }
  double mean_sub = 0, mean_solve = 0;
  for (const TrialRecord& r : recs) {
    mean_sub += std::isfinite(r.diag.subspace_cond) ? r.diag.subspace_cond : 0;
    mean_solve += std::isfinite(r.diag.solve_cond) ? r.diag.solve_cond : 0;
  }
  if (!recs.empty()) {
    summary << "mean cond: subspace " << fmt(mean_sub / recs.size()) << ", solve "
            << fmt(mean_solve / recs.size()) << "\n";
  }
  summary << "total trials " << recs.size() << ", block failures " << failures << "\n";
  return 0;
}

int cmd_sweep(const ExperimentSpec& spec, std::ostream& table_out, std::ostream& summary,
              bool self_test) {
  if (self_test) {
    // synthetic exactness check of the slope estimator: rate = D log2(snr)
    const auto errors = spec.validate();
    if (!errors.empty()) {
      for (const auto& e : errors) summary << "invalid spec: " << e << "\n";
      return 2;
    }
    const PayloadLayout layout = make_layout(spec.decoder, spec.profile(), spec.shape(), spec.pilots);
    SweepTable table;
    table.dims = layout.dims();
    table.decoder = spec.decoder;
    table.sigma0 = 1.0;
    for (double snr : spec.dof.snr_grid) {
      SweepRow row;
      row.snr = snr;
      row.grid = 2;
      row.rate_bits = layout.dims() * std::log2(snr);
      row.dims = layout.dims();
      table.rows.push_back(row);
    }
    write_sweep_csv(table_out, table);
    summary << "self-test slope (nats per ln snr): " << fmt(estimate_dof(table, 1.0)) << "\n";
    summary << "expected: " << layout.dims() << "\n";
    return 0;
  }

  const int pre = guarded_preflight(spec, summary);
  if (pre != 0) return pre;

  const CorrelationProfile prof = spec.profile();
  DofConfig config = spec.dof;
  if (!(config.sigma0 > 0.0)) {
    // one-to-one premise first: the Jacobians must have full column rank
    const CalibrationResult cal = calibrate_sigma0(prof, spec.decoder, spec.shape(), spec.probes,
                                                   config.epsilon, Rng::derive(spec.seed, 0xca1));
    summary << "jacobian sigma0 quantile " << fmt(cal.sigma0) << " over " << cal.probes
            << " probes, full-rank rate " << fmt(cal.rank_rate()) << "\n";
    if (!cal.premise_ok(config.epsilon)) {
      summary << "violated premise: Jacobian rank deficiency rate exceeds epsilon\n";
      return 1;
    }
    // executable constant for the constellation: measured noise margin
    double log_acc = 0.0;
    for (double s : config.snr_grid) log_acc += std::log(s);
    const NoiseMarginResult margin =
        calibrate_noise_margin(prof, spec.decoder, spec.shape(), spec.probes, config.epsilon,
                               std::exp(log_acc / config.snr_grid.size()),
                               Rng::derive(spec.seed, 0xca11b));
    config.sigma0 = margin.sigma0;
    summary << "noise-margin sigma0 " << fmt(margin.sigma0) << " (amp quantile "
            << fmt(margin.amp_quantile) << ", " << margin.decode_failures
            << " probe failures)\n";
  }

  SweepTable table;
  try {
    table = run_sweep(config, prof, spec.decoder, spec.shape(), spec.seed);
  } catch (const std::exception& e) {
    summary << "sweep failed: " << e.what() << "\n";
    return 1;
  }
  write_sweep_csv(table_out, table);

  const PayloadLayout layout = make_layout(spec.decoder, prof, spec.shape(), spec.pilots);
  const double target = (1.0 - 2.0 * config.delta) * layout.dims();
  summary << "payload dims per block: " << layout.dims() << "\n";
  summary << "theoretical slope target (nats per ln snr): " << fmt(target) << "\n";
  try {
    const double slope = estimate_dof(table, spec.error_ceiling);
    summary << "estimated slope (nats per ln snr): " << fmt(slope) << "\n";
  } catch (const Error& e) {
    summary << "slope unavailable: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace noncoh
