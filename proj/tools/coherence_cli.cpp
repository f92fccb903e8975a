// coherence: evaluate quantifier reports on state files, run the
// verification suites, and emit the off-diagonal sweep / extremal-state
// tables as CSV or JSON.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or parse error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "coherence/families.hpp"
#include "coherence/measures.hpp"
#include "coherence/state.hpp"
#include "coherence/suite_runner.hpp"
#include "coherence/sweep.hpp"
#include "coherence/version.hpp"

namespace {

using nlohmann::json;

struct DimRange {
  int lo = 2;
  int hi = 8;
};

DimRange parse_dim_range(const std::string& text) {
  const auto parse_int = [&](const std::string& s) {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw coherence::Error("bad dimension \"" + text + "\"");
    return v;
  };
  DimRange range;
  try {
    const std::size_t sep = text.find("..");
    if (sep == std::string::npos) {
      range.lo = range.hi = parse_int(text);
    } else {
      range.lo = parse_int(text.substr(0, sep));
      range.hi = parse_int(text.substr(sep + 2));
    }
  } catch (const coherence::Error&) {
    throw;
  } catch (const std::exception&) {
    throw coherence::Error("bad dimension \"" + text + "\" (expected e.g. 3 or 2..8)");
  }
  if (range.lo < 2 || range.hi < range.lo) {
    throw coherence::Error("bad dimension range " + std::to_string(range.lo) +
                           ".." + std::to_string(range.hi));
  }
  return range;
}

std::optional<std::uint64_t> env_seed() {
  const char* text = std::getenv("COHERENCE_SEED");
  if (text == nullptr || *text == '\0') return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(text, &end, 10);
  if (end == text || *end != '\0') {
    throw coherence::Error("COHERENCE_SEED is not an unsigned integer");
  }
  return static_cast<std::uint64_t>(v);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw coherence::Error("cannot open " + path);
  return json::parse(in);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw coherence::Error("cannot open output file " + path);
  out << text;
}

coherence::SweepKind sweep_kind_from_string(const std::string& s) {
  if (s == "count" || s == "count_sweep") return coherence::SweepKind::CountSweep;
  if (s == "magnitude" || s == "magnitude_sweep") {
    return coherence::SweepKind::MagnitudeSweep;
  }
  throw coherence::Error("unknown sweep kind \"" + s +
                         "\" (expected count or magnitude)");
}

// ---- eval -------------------------------------------------------------------

struct EvalOptions {
  std::string state_file;
  double p = 1.0;
  std::string out;
};

int run_eval(const EvalOptions& opt) {
  std::ifstream in(opt.state_file, std::ios::binary);
  if (!in) throw coherence::Error("cannot open " + opt.state_file);
  const coherence::HermitianState rho = coherence::read_state(in);
  const coherence::MeasureReport report = coherence::full_report(rho, opt.p);
  const std::string text = coherence::to_json(report).dump(2) + "\n";
  if (opt.out.empty()) {
    std::cout << text;
  } else {
    write_text_file(opt.out, text);
  }
  return 0;
}

// ---- verify -----------------------------------------------------------------

struct VerifyOptions {
  coherence::VerifyConfig cfg;
  std::string out;
};

int run_verify(const VerifyOptions& opt) {
  std::ofstream jsonl;
  std::ostream* jsonl_ptr = nullptr;
  if (!opt.out.empty()) {
    jsonl.open(opt.out, std::ios::binary);
    if (!jsonl) throw coherence::Error("cannot open output file " + opt.out);
    jsonl_ptr = &jsonl;
  }
  const coherence::VerifyOutcome outcome =
      coherence::run_verify_suites(opt.cfg, jsonl_ptr);
  coherence::print_summary(outcome, std::cout);
  if (!outcome.all_passed) {
    if (const auto* row = outcome.first_failure()) {
      std::cerr << "verification failed: " << row->id << "\n";
    }
    return 1;
  }
  return 0;
}

// ---- sweep ------------------------------------------------------------------

int run_sweep_cmd(const coherence::SweepConfig& cfg) {
  coherence::run_sweep_to_files(cfg);
  std::cout << "wrote " << cfg.output_path << " and " << cfg.output_path
            << ".manifest.json\n";
  return 0;
}

// ---- tetra ------------------------------------------------------------------

struct TetraOptions {
  int d = 3;
  double p = 1.0;
  std::string out;
  bool as_json = false;
};

int run_tetra(const TetraOptions& opt) {
  const std::vector<coherence::TetraRow> rows =
      coherence::tetra_table(opt.d, opt.p);

  std::string text;
  if (opt.as_json) {
    text = coherence::tetra_to_json(rows).dump(2) + "\n";
  } else {
    std::ostringstream os;
    coherence::write_tetra_csv(rows, os);
    text = os.str();
  }
  if (opt.out.empty()) {
    std::cout << text;
  } else {
    write_text_file(opt.out, text);
    write_text_file(opt.out + ".manifest.json",
                    coherence::tetra_manifest(opt.d, opt.p, rows, opt.out,
                                              coherence::utc_timestamp())
                            .dump(2) +
                        "\n");
  }
  bool all_passed = true;
  for (const auto& row : rows) all_passed = all_passed && row.passed;
  if (!all_passed) {
    std::cerr << "extremal-state table has failing rows\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wave-particle-mixedness coherence toolkit"};
  app.set_version_flag("--version", COHERENCE_VERSION);
  app.require_subcommand(1);

  // eval
  EvalOptions eval_opt;
  auto* eval = app.add_subcommand("eval", "full quantifier report for a state file");
  eval->add_option("state_file", eval_opt.state_file, "JSON state file")->required();
  eval->add_option("--p", eval_opt.p, "exponent in [1,2]")->capture_default_str();
  eval->add_option("--out", eval_opt.out, "write the report here instead of stdout");

  // verify
  std::string verify_dim = "2..8";
  std::vector<double> verify_p;
  int verify_trials = 1000;
  std::uint64_t verify_seed = 0;
  std::string verify_out;
  std::string verify_config;
  auto* verify = app.add_subcommand("verify", "run every identity, slack and axiom suite");
  auto* vo_dim = verify->add_option("--dim", verify_dim, "dimension or range, e.g. 3 or 2..8");
  auto* vo_p = verify->add_option("--p", verify_p, "exponent in [1,2] (repeatable)");
  auto* vo_trials = verify->add_option("--trials", verify_trials, "random states per dimension");
  auto* vo_seed = verify->add_option("--seed", verify_seed, "master seed (falls back to COHERENCE_SEED)");
  auto* vo_out = verify->add_option("--out", verify_out, "JSON-lines results file");
  verify->add_option("--config", verify_config, "JSON config file; flags override it");

  // sweep
  int sweep_dim = 3;
  std::vector<double> sweep_p;
  std::string sweep_kind = "count";
  double sweep_fixed = 0.0;
  std::vector<double> sweep_grid;
  std::uint64_t sweep_seed = 0;
  std::string sweep_mode = "formal";
  std::string sweep_out;
  std::string sweep_config;
  auto* sweep = app.add_subcommand("sweep", "off-diagonal sweep to CSV + manifest");
  auto* so_dim = sweep->add_option("--dim", sweep_dim, "dimension");
  auto* so_p = sweep->add_option("--p", sweep_p, "exponent in [1,2] (repeatable)");
  auto* so_kind = sweep->add_option("--kind", sweep_kind, "count or magnitude");
  auto* so_fixed = sweep->add_option("--fixed", sweep_fixed,
                                     "fixed magnitude (count sweep) or pair count (magnitude sweep)");
  auto* so_grid = sweep->add_option("--grid", sweep_grid, "grid values")->expected(-1);
  auto* so_seed = sweep->add_option("--seed", sweep_seed, "seed recorded in the manifest");
  auto* so_mode = sweep->add_option("--mode", sweep_mode, "strict or formal");
  auto* so_out = sweep->add_option("--out", sweep_out, "output CSV path");
  sweep->add_option("--config", sweep_config, "JSON config file; flags override it");

  // tetra
  TetraOptions tetra_opt;
  auto* tetra = app.add_subcommand("tetra", "extremal-state trade-off table");
  tetra->add_option("--dim", tetra_opt.d, "dimension")->capture_default_str();
  tetra->add_option("--p", tetra_opt.p, "exponent in [1,2)")->capture_default_str();
  tetra->add_option("--out", tetra_opt.out, "write the table here instead of stdout");
  tetra->add_flag("--json", tetra_opt.as_json, "emit JSON instead of CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (eval->parsed()) return run_eval(eval_opt);

    if (verify->parsed()) {
      VerifyOptions opt;
      bool config_has_seed = false;
      if (!verify_config.empty()) {
        const json cfg = read_json_file(verify_config);
        if (cfg.contains("dim")) {
          const DimRange r = cfg.at("dim").is_number_integer()
                                 ? DimRange{cfg.at("dim").get<int>(), cfg.at("dim").get<int>()}
                                 : parse_dim_range(cfg.at("dim").get<std::string>());
          opt.cfg.d_min = r.lo;
          opt.cfg.d_max = r.hi;
        }
        if (cfg.contains("p")) opt.cfg.p_values = cfg.at("p").get<std::vector<double>>();
        if (cfg.contains("trials")) opt.cfg.trials = cfg.at("trials").get<int>();
        if (cfg.contains("seed")) {
          opt.cfg.seed = cfg.at("seed").get<std::uint64_t>();
          config_has_seed = true;
        }
        if (cfg.contains("out")) opt.out = cfg.at("out").get<std::string>();
      }
      if (vo_dim->count() > 0 || verify_config.empty()) {
        const DimRange r = parse_dim_range(verify_dim);
        opt.cfg.d_min = r.lo;
        opt.cfg.d_max = r.hi;
      }
      if (vo_p->count() > 0) opt.cfg.p_values = verify_p;
      if (vo_trials->count() > 0) opt.cfg.trials = verify_trials;
      if (vo_seed->count() > 0) {
        opt.cfg.seed = verify_seed;
      } else if (!config_has_seed) {
        opt.cfg.seed = env_seed().value_or(0);
      }
      if (vo_out->count() > 0) opt.out = verify_out;
      return run_verify(opt);
    }

    if (sweep->parsed()) {
      coherence::SweepConfig cfg;
      bool config_has_seed = false;
      if (!sweep_config.empty()) {
        const json file = read_json_file(sweep_config);
        if (file.contains("dim")) cfg.d = file.at("dim").get<int>();
        if (file.contains("p")) cfg.p_values = file.at("p").get<std::vector<double>>();
        if (file.contains("kind")) cfg.kind = sweep_kind_from_string(file.at("kind").get<std::string>());
        if (file.contains("fixed")) cfg.fixed_value = file.at("fixed").get<double>();
        if (file.contains("grid")) cfg.grid = file.at("grid").get<std::vector<double>>();
        if (file.contains("seed")) {
          cfg.seed = file.at("seed").get<std::uint64_t>();
          config_has_seed = true;
        }
        if (file.contains("mode")) cfg.mode = coherence::mode_from_string(file.at("mode").get<std::string>());
        if (file.contains("out")) cfg.output_path = file.at("out").get<std::string>();
      }
      if (so_dim->count() > 0) cfg.d = sweep_dim;
      if (so_p->count() > 0) cfg.p_values = sweep_p;
      if (so_kind->count() > 0) cfg.kind = sweep_kind_from_string(sweep_kind);
      if (so_fixed->count() > 0) cfg.fixed_value = sweep_fixed;
      if (so_grid->count() > 0) cfg.grid = sweep_grid;
      if (so_seed->count() > 0) {
        cfg.seed = sweep_seed;
      } else if (!config_has_seed) {
        cfg.seed = env_seed().value_or(0);
      }
      if (so_mode->count() > 0) cfg.mode = coherence::mode_from_string(sweep_mode);
      if (so_out->count() > 0) cfg.output_path = sweep_out;
      if (cfg.output_path.empty()) {
        throw coherence::Error("sweep requires --out (or \"out\" in the config file)");
      }
      return run_sweep_cmd(cfg);
    }

    if (tetra->parsed()) return run_tetra(tetra_opt);
  } catch (const json::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const coherence::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
