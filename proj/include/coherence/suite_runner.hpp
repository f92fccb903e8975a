#pragma once

#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "coherence/verify.hpp"

namespace coherence {

/// Grid for a full verification run: every residual, slack and axiom suite
/// over RandomMixedHS ensembles and the named families, for each dimension
/// in [d_min, d_max] and each listed exponent.
struct VerifyConfig {
  int d_min = 2;
  int d_max = 8;
  std::vector<double> p_values = {1.0, 1.25, 1.5, 1.75, 2.0};
  int trials = 1000;
  std::uint64_t seed = 0;
};

enum class SuiteStatus { Pass, Fail, Skipped };

inline const char* to_string(SuiteStatus s) {
  switch (s) {
    case SuiteStatus::Pass: return "pass";
    case SuiteStatus::Fail: return "FAIL";
    case SuiteStatus::Skipped: return "skipped";
  }
  return "?";
}

/// One line of the verification summary. `worst` is max |residual| for
/// equalities, min slack for inequalities and the minimum margin for axiom
/// suites; `violations` counts failing evaluations.
struct SuiteSummaryRow {
  std::string id;
  std::string kind;
  long evaluations = 0;
  long violations = 0;
  double worst = 0.0;
  double tolerance = 0.0;
  SuiteStatus status = SuiteStatus::Skipped;
};

struct VerifyOutcome {
  std::vector<SuiteSummaryRow> rows;
  bool all_passed = true;

  const SuiteSummaryRow* first_failure() const {
    for (const auto& row : rows) {
      if (row.status == SuiteStatus::Fail) return &row;
    }
    return nullptr;
  }
};

/// Named family members exercised alongside the random ensemble, split by
/// the mode they land in. The formal entries deliberately leave the PSD
/// cone; they participate in the slack and X/Y checks only.
struct FamilyStates {
  std::vector<HermitianState> strict;
  std::vector<HermitianState> formal;
};

inline FamilyStates named_family_states(int d, std::uint64_t seed) {
  FamilyStates out;
  const auto add = [&](const StateFamilySpec& spec) {
    HermitianState state = make_family(spec, d);
    (state.strict() ? out.strict : out.formal).push_back(std::move(state));
  };

  add(StateFamilySpec::max_coherent_pure());
  add(StateFamilySpec::completely_mixed());
  for (const double a : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    add(StateFamilySpec::mcms(a));
  }
  add(StateFamilySpec::single_pair(0, 1, 0.3 / d));
  add(StateFamilySpec::single_pair(0, 1, 1.0 / d));   // PSD boundary
  add(StateFamilySpec::single_pair(0, d - 1, 1.8 / d));  // formal
  const int max_pairs = d * (d - 1) / 2;
  add(StateFamilySpec::uniform_off_diag(1, 1.0 / (d * d)));
  add(StateFamilySpec::uniform_off_diag(max_pairs, 1.0 / (d * d)));
  if (max_pairs >= 2) {
    add(StateFamilySpec::uniform_off_diag(2, 1.0 / d));
  }

  Rng rng(mix_seed(seed, 0xFA111ED));
  for (int k = 0; k < 2; ++k) {
    std::vector<double> probs(static_cast<std::size_t>(d));
    double sum = 0.0;
    for (double& v : probs) {
      v = rng.uniform_open();
      sum += v;
    }
    for (double& v : probs) v /= sum;
    add(StateFamilySpec::incoherent_diagonal(probs));
  }
  for (int k = 0; k < 3; ++k) {
    add(StateFamilySpec::random_pure_haar(mix_seed(seed, 0xA0 + static_cast<std::uint64_t>(k))));
  }
  return out;
}

namespace detail {

// Aggregates one (identity, d, p) cell and keeps its worst-case result for
// the JSON-lines stream.
struct CellAggregate {
  IdentityResult worst;
  bool has = false;
  long evaluations = 0;
  long violations = 0;

  void add(const IdentityResult& r) {
    ++evaluations;
    if (!r.passed) ++violations;
    const bool more_adverse =
        !has || (r.kind == IdentityKind::Equality
                     ? std::abs(r.value) > std::abs(worst.value)
                     : r.value < worst.value);
    if (more_adverse) worst = r;
    has = true;
  }
};

inline void merge_into_summary(std::map<std::string, SuiteSummaryRow>& summary,
                               const CellAggregate& cell) {
  SuiteSummaryRow& row = summary[cell.worst.identity_id];
  if (row.id.empty()) {
    row.id = cell.worst.identity_id;
    row.kind = to_string(cell.worst.kind);
    row.tolerance = cell.worst.tolerance;
    row.worst = cell.worst.kind == IdentityKind::Equality
                    ? 0.0
                    : std::numeric_limits<double>::infinity();
  }
  row.evaluations += cell.evaluations;
  row.violations += cell.violations;
  if (cell.worst.kind == IdentityKind::Equality) {
    row.worst = std::max(row.worst, std::abs(cell.worst.value));
  } else {
    row.worst = std::min(row.worst, cell.worst.value);
  }
  row.status = row.violations == 0 ? SuiteStatus::Pass : SuiteStatus::Fail;
}

inline void merge_axiom(std::map<std::string, SuiteSummaryRow>& summary,
                        const AxiomSuiteResult& r) {
  SuiteSummaryRow& row = summary["axiom_" + r.axiom_id];
  if (row.id.empty()) {
    row.id = "axiom_" + r.axiom_id;
    row.kind = "axiom";
    row.tolerance = 0.0;
    row.worst = std::numeric_limits<double>::infinity();
  }
  row.evaluations += r.trials;
  row.violations += r.violations;
  row.worst = std::min(row.worst, r.worst_margin);
  row.status = row.violations == 0 ? SuiteStatus::Pass : SuiteStatus::Fail;
}

}  // namespace detail

/// Runs the whole verification grid. Emits one worst-case IdentityResult
/// line per (identity, d, p) cell and one AxiomSuiteResult line per
/// (axiom, d, p) to `jsonl` when given, and returns the merged summary.
/// Identities whose domain is empty on the requested grid (the T-based
/// checks at d = 2, the X trade-off at p = 2) are reported as skipped.
inline VerifyOutcome run_verify_suites(const VerifyConfig& cfg,
                                       std::ostream* jsonl = nullptr) {
  if (cfg.trials < 1) throw InvalidTrials("trials must be >= 1");
  if (cfg.d_min < 2) throw DimensionTooSmall("d range must start at 2 or above");
  if (cfg.d_max < cfg.d_min) throw Error("empty dimension range");
  if (cfg.p_values.empty()) throw InvalidP("at least one p value is required");
  for (const double p : cfg.p_values) detail::require_p_in_unit_band(p);

  std::map<std::string, SuiteSummaryRow> summary;
  // Pre-register every identity so skipped ones still show up.
  const auto reserve = [&summary](const char* id, const char* kind) {
    SuiteSummaryRow& row = summary[id];
    row.id = id;
    row.kind = kind;
    row.status = SuiteStatus::Skipped;
    row.worst = std::numeric_limits<double>::quiet_NaN();
  };
  for (const char* id :
       {"l2_triality", "max_coherence_relation", "durr_triality", "jb_triality",
        "fuluo_triality", "lp_x_tradeoff", "lp_y_tradeoff", "machado_relation",
        "machado_y_equivalence", "xy_sum_relation"}) {
    reserve(id, "equality");
  }
  for (const char* id : {"l2_mixedness_bound", "lp_lower_bound", "holder_bound",
                         "y_upper_bound", "l1_l2_bound"}) {
    reserve(id, "inequality");
  }

  const auto emit_cell = [&](const detail::CellAggregate& cell) {
    if (!cell.has) return;
    detail::merge_into_summary(summary, cell);
    if (jsonl) *jsonl << to_json(cell.worst).dump() << '\n';
  };

  for (int d = cfg.d_min; d <= cfg.d_max; ++d) {
    std::vector<HermitianState> strict_states;
    strict_states.reserve(static_cast<std::size_t>(cfg.trials) + 16);
    for (int k = 0; k < cfg.trials; ++k) {
      strict_states.push_back(make_family(
          StateFamilySpec::random_mixed_hs(
              d, mix_seed(mix_seed(cfg.seed, static_cast<std::uint64_t>(d)),
                          static_cast<std::uint64_t>(k))),
          d));
    }
    FamilyStates families = named_family_states(d, cfg.seed);
    for (auto& s : families.strict) strict_states.push_back(std::move(s));

    std::vector<const HermitianState*> all_states;
    for (const auto& s : strict_states) all_states.push_back(&s);
    for (const auto& s : families.formal) all_states.push_back(&s);

    // p-independent equalities on strict states.
    {
      detail::CellAggregate l2, maxrel, durr, jb, fuluo, machado, machado_y;
      for (const auto& rho : strict_states) {
        l2.add(residual_l2_triality(rho));
        maxrel.add(residual_max_coherence_relation(rho));
        durr.add(residual_durr(rho));
        jb.add(residual_jb(rho));
        fuluo.add(residual_fuluo(rho));
        if (d >= 3) {
          machado.add(residual_machado(rho));
          machado_y.add(machado_y_equivalence(rho));
        }
      }
      emit_cell(l2);
      emit_cell(maxrel);
      emit_cell(durr);
      emit_cell(jb);
      emit_cell(fuluo);
      emit_cell(machado);
      emit_cell(machado_y);
    }

    for (const double p : cfg.p_values) {
      detail::CellAggregate x_tradeoff, y_tradeoff, xy;
      std::map<std::string, detail::CellAggregate> slack_cells;

      for (const auto& rho : strict_states) {
        if (p < 2.0) x_tradeoff.add(residual_lp_x_tradeoff(rho, p));
        y_tradeoff.add(residual_lp_y_tradeoff(rho, p));
      }
      for (const HermitianState* rho : all_states) {
        xy.add(residual_xy_sum(*rho, p));
        for (const auto& slack : slack_inequalities(*rho, p)) {
          slack_cells[slack.identity_id].add(slack);
        }
      }
      emit_cell(x_tradeoff);
      emit_cell(y_tradeoff);
      emit_cell(xy);
      for (const auto& [id, cell] : slack_cells) emit_cell(cell);

      for (const auto& r : axiom_suite_wave(
               d, p, cfg.trials,
               mix_seed(cfg.seed, 0x3A7E0000u + static_cast<std::uint64_t>(d) * 64 +
                                      static_cast<std::uint64_t>(p * 16)))) {
        detail::merge_axiom(summary, r);
        if (jsonl) *jsonl << to_json(r).dump() << '\n';
      }
    }

    for (const auto& r : axiom_suite_particle(
             d, cfg.trials, mix_seed(cfg.seed, 0xB000u + static_cast<std::uint64_t>(d)))) {
      detail::merge_axiom(summary, r);
      if (jsonl) *jsonl << to_json(r).dump() << '\n';
    }
  }

  VerifyOutcome outcome;
  for (auto& [id, row] : summary) {
    if (row.status == SuiteStatus::Fail) outcome.all_passed = false;
    outcome.rows.push_back(row);
  }
  return outcome;
}

/// identity, kind, evaluations, worst value, tolerance, status.
inline void print_summary(const VerifyOutcome& outcome, std::ostream& os) {
  os << std::left << std::setw(26) << "identity" << std::setw(12) << "kind"
     << std::right << std::setw(10) << "evals" << std::setw(14) << "worst"
     << std::setw(12) << "tolerance" << "  status\n";
  for (const auto& row : outcome.rows) {
    os << std::left << std::setw(26) << row.id << std::setw(12) << row.kind
       << std::right << std::setw(10) << row.evaluations;
    if (row.status == SuiteStatus::Skipped) {
      os << std::setw(14) << "-" << std::setw(12) << "-";
    } else {
      os << std::setw(14) << std::scientific << std::setprecision(2) << row.worst;
      if (row.kind == "axiom") {
        os << std::setw(12) << "-";
      } else {
        os << std::setw(12) << std::scientific << std::setprecision(0)
           << row.tolerance;
      }
      os << std::defaultfloat;
    }
    os << "  " << to_string(row.status) << '\n';
  }
  os << (outcome.all_passed ? "all suites passed\n" : "VERIFICATION FAILED\n");
}

}  // namespace coherence
