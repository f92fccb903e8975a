#pragma once

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "coherence/families.hpp"
#include "coherence/measures.hpp"
#include "coherence/version.hpp"

namespace coherence {

/// Shortest decimal form that round-trips a double ('.' decimal point,
/// up to 17 significant digits). All numeric CSV cells go through this.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Compact exponent tag for column names: 1 -> "1", 1.25 -> "1.25".
inline std::string format_p_label(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", p);
  return buf;
}

enum class SweepKind { CountSweep, MagnitudeSweep };

inline const char* to_string(SweepKind k) {
  return k == SweepKind::CountSweep ? "count_sweep" : "magnitude_sweep";
}

/// Off-diagonal sweep over uniform-off-diagonal tables at dimension d:
/// CountSweep varies the populated pair count n over `grid` at fixed
/// magnitude m = fixed_value; MagnitudeSweep varies m over `grid` at fixed
/// n = fixed_value. Formal mode keeps non-PSD grid points and flags them;
/// strict mode refuses them.
struct SweepConfig {
  int d = 3;
  std::vector<double> p_values = {1.0};
  SweepKind kind = SweepKind::CountSweep;
  double fixed_value = 0.0;
  std::vector<double> grid;
  std::uint64_t seed = 0;
  std::string output_path;
  Mode mode = Mode::Formal;
};

struct SweepRow {
  double grid_value = 0.0;
  std::vector<double> x;       // parallel to p_values
  std::vector<double> y;
  std::vector<double> clp_sq;
  double cl1_sq_over_d = 0.0;
  bool strict_psd = false;
};

namespace detail {

inline int checked_pair_count(double value, int d) {
  const int n = static_cast<int>(std::lround(value));
  const int max_pairs = d * (d - 1) / 2;
  if (std::abs(value - n) > 1e-9 || n < 1 || n > max_pairs) {
    throw InvalidFamilyParams("pair count must be an integer in [1, " +
                              std::to_string(max_pairs) + "], got " +
                              format_double(value));
  }
  return n;
}

}  // namespace detail

inline std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  if (cfg.grid.empty()) throw InvalidFamilyParams("sweep grid is empty");
  if (cfg.p_values.empty()) throw InvalidP("at least one p value is required");
  for (const double p : cfg.p_values) detail::require_p_in_unit_band(p);

  std::vector<SweepRow> rows;
  rows.reserve(cfg.grid.size());
  for (const double g : cfg.grid) {
    int n = 0;
    double m = 0.0;
    if (cfg.kind == SweepKind::CountSweep) {
      n = detail::checked_pair_count(g, cfg.d);
      m = cfg.fixed_value;
    } else {
      n = detail::checked_pair_count(cfg.fixed_value, cfg.d);
      m = g;
    }
    const HermitianState rho =
        make_family(StateFamilySpec::uniform_off_diag(n, m), cfg.d);
    if (cfg.mode == Mode::Strict && !rho.strict()) {
      throw NotPositiveSemidefinite(
          "sweep row at grid value " + format_double(g) +
          " is not positive semidefinite; rerun in formal mode");
    }

    SweepRow row;
    row.grid_value = g;
    row.strict_psd = rho.strict();
    for (const double p : cfg.p_values) {
      const double clp = c_lp(rho, p);
      row.x.push_back(quantity_x(rho, p));
      row.y.push_back(quantity_y(rho, p));
      row.clp_sq.push_back(clp * clp);
    }
    const double cl1 = c_lp(rho, 1.0);
    row.cl1_sq_over_d = cl1 * cl1 / cfg.d;
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void write_sweep_csv(const SweepConfig& cfg,
                            const std::vector<SweepRow>& rows,
                            std::ostream& os) {
  os << "grid_value";
  for (const double p : cfg.p_values) {
    const std::string tag = format_p_label(p);
    os << ",x_p" << tag << ",y_p" << tag << ",clp2_p" << tag;
  }
  os << ",cl1_sq_over_d,strict_psd\n";
  for (const SweepRow& row : rows) {
    os << format_double(row.grid_value);
    for (std::size_t k = 0; k < cfg.p_values.size(); ++k) {
      os << ',' << format_double(row.x[k]) << ',' << format_double(row.y[k])
         << ',' << format_double(row.clp_sq[k]);
    }
    os << ',' << format_double(row.cl1_sq_over_d) << ','
       << (row.strict_psd ? "true" : "false") << '\n';
  }
}

inline std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline nlohmann::json sweep_config_to_json(const SweepConfig& cfg) {
  return nlohmann::json{{"dim", cfg.d},
                        {"p_values", cfg.p_values},
                        {"kind", to_string(cfg.kind)},
                        {"fixed_value", cfg.fixed_value},
                        {"grid", cfg.grid},
                        {"seed", cfg.seed},
                        {"output_path", cfg.output_path},
                        {"mode", to_string(cfg.mode)}};
}

inline nlohmann::json sweep_manifest(const SweepConfig& cfg,
                                     const std::vector<SweepRow>& rows,
                                     const std::string& timestamp) {
  nlohmann::json row_flags = nlohmann::json::array();
  for (const SweepRow& row : rows) {
    row_flags.push_back(nlohmann::json{{"grid_value", row.grid_value},
                                       {"strict_psd", row.strict_psd}});
  }
  return nlohmann::json{{"tool_version", version},
                        {"command", "sweep"},
                        {"config", sweep_config_to_json(cfg)},
                        {"seed", cfg.seed},
                        {"timestamp", timestamp},
                        {"rows", std::move(row_flags)}};
}

/// cmd_sweep: CSV at cfg.output_path plus its manifest at
/// cfg.output_path + ".manifest.json". Byte-identical CSV for identical
/// (config, seed); only the manifest timestamp varies between runs.
inline std::vector<SweepRow> run_sweep_to_files(const SweepConfig& cfg) {
  if (cfg.output_path.empty()) throw Error("sweep requires an output path");
  const std::vector<SweepRow> rows = run_sweep(cfg);

  std::ofstream csv(cfg.output_path, std::ios::binary);
  if (!csv) throw Error("cannot open output file " + cfg.output_path);
  write_sweep_csv(cfg, rows, csv);

  const std::string manifest_path = cfg.output_path + ".manifest.json";
  std::ofstream manifest(manifest_path, std::ios::binary);
  if (!manifest) throw Error("cannot open output file " + manifest_path);
  manifest << sweep_manifest(cfg, rows, utc_timestamp()).dump(2) << '\n';
  return rows;
}

// --- extremal-state table ------------------------------------------------------

/// One row of the extremal-state table: the four trade-off terms
/// ((d^(p-1)/(d-1))^(2/p) C_lp^2, M_l, P^2, (d/(d-1)) X) on a named state,
/// plus the residual of the identity reduced to the terms that remain
/// structurally nonzero there. `passed` additionally requires the excluded
/// terms to vanish within tolerance.
struct TetraRow {
  std::string label;
  double wave_term = 0.0;
  double mixedness_term = 0.0;
  double particle_term = 0.0;
  double x_term = 0.0;
  double residual = 0.0;
  bool passed = false;
};

namespace detail {

enum : unsigned { kWave = 1, kMixedness = 2, kParticle = 4, kX = 8 };

inline TetraRow tetra_row(const std::string& label, const HermitianState& rho,
                          double p, unsigned active_terms, double tolerance) {
  const int d = rho.dim();
  const double clp = c_lp(rho, p);
  const double coeff = std::pow(std::pow(d, p - 1.0) / (d - 1), 2.0 / p);
  const double particle = particle_p(rho);

  TetraRow row;
  row.label = label;
  row.wave_term = coeff * clp * clp;
  row.mixedness_term = mixedness_linear(rho);
  row.particle_term = particle * particle;
  row.x_term = (static_cast<double>(d) / (d - 1)) * quantity_x(rho, p);

  double sum = 0.0;
  if (active_terms & kWave) sum += row.wave_term;
  if (active_terms & kMixedness) sum += row.mixedness_term;
  if (active_terms & kParticle) sum += row.particle_term;
  if (active_terms & kX) sum += row.x_term;
  row.residual = sum - 1.0;

  bool excluded_vanish = true;
  if (!(active_terms & kWave) && std::abs(row.wave_term) > tolerance)
    excluded_vanish = false;
  if (!(active_terms & kMixedness) && std::abs(row.mixedness_term) > tolerance)
    excluded_vanish = false;
  if (!(active_terms & kParticle) && std::abs(row.particle_term) > tolerance)
    excluded_vanish = false;
  if (!(active_terms & kX) && std::abs(row.x_term) > tolerance)
    excluded_vanish = false;
  row.passed = excluded_vanish && std::abs(row.residual) <= tolerance;
  return row;
}

}  // namespace detail

/// cmd_tetra: evaluates the reduced trade-off identity on the extremal
/// vertices, the incoherent-mixture and equal-off-diagonal edges, and the
/// equal-off-diagonal face, for 1 <= p < 2.
///   vertex_M   completely mixed         -> terms (0, 1, 0, 0)
///   vertex_P   deterministic diagonal   -> terms (0, 0, 1, 0)
///   vertex_C   uniform superposition    -> terms (1, 0, 0, 0)
///   segment_MP incoherent mixtures      -> M_l + P^2 = 1
///   segment_CM equal off-diag, uniform diag (weight family)
///                                       -> wave + M_l = 1
///   face_CPM   equal off-diag, skewed diag
///                                       -> wave + M_l + P^2 = 1
inline std::vector<TetraRow> tetra_table(int d, double p,
                                         double tolerance = 1e-10) {
  if (!(p >= 1.0 && p < 2.0)) {
    throw InvalidP("the extremal-state table requires 1 <= p < 2, got " +
                   std::to_string(p));
  }
  using detail::kMixedness;
  using detail::kParticle;
  using detail::kWave;

  std::vector<TetraRow> rows;
  rows.push_back(detail::tetra_row(
      "vertex_M", make_family(StateFamilySpec::completely_mixed(), d), p,
      kMixedness, tolerance));

  std::vector<double> point(static_cast<std::size_t>(d), 0.0);
  point[0] = 1.0;
  rows.push_back(detail::tetra_row(
      "vertex_P", make_family(StateFamilySpec::incoherent_diagonal(point), d),
      p, kParticle, tolerance));

  rows.push_back(detail::tetra_row(
      "vertex_C", make_family(StateFamilySpec::max_coherent_pure(), d), p,
      kWave, tolerance));

  for (const double lambda : {0.25, 0.5, 0.75}) {
    std::vector<double> probs(static_cast<std::size_t>(d), (1.0 - lambda) / d);
    probs[0] += lambda;
    rows.push_back(detail::tetra_row(
        "segment_MP_l" + format_p_label(lambda),
        make_family(StateFamilySpec::incoherent_diagonal(probs), d), p,
        kMixedness | kParticle, tolerance));
  }

  for (const double a : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    rows.push_back(detail::tetra_row(
        "segment_CM_a" + format_p_label(a),
        make_family(StateFamilySpec::mcms(a), d), p, kWave | kMixedness,
        tolerance));
  }

  // Equal off-diagonals with a skewed diagonal: uniform-superposition
  // projector mixed with a non-uniform incoherent state.
  for (const double a : {0.25, 0.5, 0.75}) {
    const Matrix uniform =
        make_family(StateFamilySpec::max_coherent_pure(), d).entries();
    Matrix diag = Matrix::Zero(d, d);
    const double norm = d * (d + 1) / 2.0;
    for (int i = 0; i < d; ++i) diag(i, i) = (i + 1) / norm;
    const HermitianState rho = HermitianState::validate(
        a * uniform + (1.0 - a) * diag, Mode::Strict);
    rows.push_back(detail::tetra_row("face_CPM_a" + format_p_label(a), rho, p,
                                     kWave | kMixedness | kParticle,
                                     tolerance));
  }
  return rows;
}

inline void write_tetra_csv(const std::vector<TetraRow>& rows,
                            std::ostream& os) {
  os << "row,wave_term,mixedness_term,particle_term,x_term,residual,passed\n";
  for (const TetraRow& row : rows) {
    os << row.label << ',' << format_double(row.wave_term) << ','
       << format_double(row.mixedness_term) << ','
       << format_double(row.particle_term) << ','
       << format_double(row.x_term) << ',' << format_double(row.residual)
       << ',' << (row.passed ? "true" : "false") << '\n';
  }
}

inline nlohmann::json tetra_to_json(const std::vector<TetraRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const TetraRow& row : rows) {
    out.push_back(nlohmann::json{{"row", row.label},
                                 {"wave_term", row.wave_term},
                                 {"mixedness_term", row.mixedness_term},
                                 {"particle_term", row.particle_term},
                                 {"x_term", row.x_term},
                                 {"residual", row.residual},
                                 {"passed", row.passed}});
  }
  return out;
}

inline nlohmann::json tetra_manifest(int d, double p,
                                     const std::vector<TetraRow>& rows,
                                     const std::string& output_path,
                                     const std::string& timestamp) {
  nlohmann::json row_flags = nlohmann::json::array();
  for (const TetraRow& row : rows) {
    row_flags.push_back(
        nlohmann::json{{"row", row.label}, {"passed", row.passed}});
  }
  return nlohmann::json{
      {"tool_version", version},
      {"command", "tetra"},
      {"config", nlohmann::json{{"dim", d}, {"p", p}, {"output_path", output_path}}},
      {"timestamp", timestamp},
      {"rows", std::move(row_flags)}};
}

}  // namespace coherence
