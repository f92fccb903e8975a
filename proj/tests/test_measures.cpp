#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "coherence/families.hpp"
#include "coherence/measures.hpp"
#include "coherence/random.hpp"

using namespace coherence;
using Catch::Approx;

namespace oracle {

// Independent plain-loop evaluations straight from the definitions, used to
// freeze expected values. Long-double accumulation, no shared code with the
// library path.

double clp(const Matrix& m, double p) {
  long double s = 0.0L;
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (i != j) s += std::pow(std::abs(m(i, j)), p);
    }
  }
  return std::pow(static_cast<double>(s), 1.0 / p);
}

double purity(const Matrix& m) {
  long double s = 0.0L;
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) s += std::norm(m(i, j));
  }
  return static_cast<double>(s);
}

double quantity_y_p1(const Matrix& m) {
  const double c1 = clp(m, 1.0);
  const double c2 = clp(m, 2.0);
  return 0.5 * c1 * c1 - c2 * c2;
}

// Cross-term with the inner sum over UNORDERED pairs (k<l) != (i,j).
double t_unordered(const Matrix& m) {
  const int d = static_cast<int>(m.rows());
  std::vector<double> mags;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) mags.push_back(std::abs(m(i, j)));
  }
  long double s = 0.0L;
  for (std::size_t a = 0; a < mags.size(); ++a) {
    for (std::size_t b = 0; b < mags.size(); ++b) {
      if (a != b) s += static_cast<long double>(mags[a]) * mags[b];
    }
  }
  const double coeff = 4.0 * d / (double(d - 2) * (double(d) * d - 1));
  return coeff * static_cast<double>(s);
}

// Cross-term with the inner sum over ORDERED pairs (k != l) excluding both
// orientations of (i,j); exactly twice t_unordered.
double t_ordered(const Matrix& m) {
  const int d = static_cast<int>(m.rows());
  long double s = 0.0L;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        for (int l = 0; l < d; ++l) {
          if (k == l) continue;
          if ((k == i && l == j) || (k == j && l == i)) continue;
          s += static_cast<long double>(std::abs(m(i, j))) * std::abs(m(k, l));
        }
      }
    }
  }
  const double coeff = 4.0 * d / (double(d - 2) * (double(d) * d - 1));
  return coeff * static_cast<double>(s);
}

}  // namespace oracle

namespace {

HermitianState hs_sample(int d, std::uint64_t seed) {
  return make_family(StateFamilySpec::random_mixed_hs(d, seed), d);
}

HermitianState basis_state(int d, int k) {
  std::vector<double> probs(static_cast<std::size_t>(d), 0.0);
  probs[static_cast<std::size_t>(k)] = 1.0;
  return make_family(StateFamilySpec::incoherent_diagonal(probs), d);
}

std::vector<double> report_fields(const MeasureReport& r) {
  std::vector<double> v{r.c_lp, r.c_l2, r.c_l2_max, r.m_l, r.particle_p,
                        r.v_d,  r.p_d,  r.v_jb,     r.p_jb, r.v_l,
                        r.p_l,  r.x,    r.y};
  if (r.t.has_value()) v.push_back(*r.t);
  return v;
}

}  // namespace

TEST_CASE("c_lp basics") {
  const HermitianState mcp = make_family(StateFamilySpec::max_coherent_pure(), 3);
  REQUIRE(c_lp(mcp, 1.0) == Approx(2.0).margin(1e-14));
  // closed-form maximum ((d-1)/d^(p-1))^(1/p) at the uniform superposition
  for (double p : {1.0, 1.25, 1.5, 1.75, 2.0}) {
    const double closed = std::pow((3.0 - 1.0) / std::pow(3.0, p - 1.0), 1.0 / p);
    REQUIRE(c_lp(mcp, p) == Approx(closed).margin(1e-13));
  }

  const HermitianState diag =
      make_family(StateFamilySpec::incoherent_diagonal({0.2, 0.3, 0.5}), 3);
  for (double p : {1.0, 1.5, 2.0, 3.0}) REQUIRE(c_lp(diag, p) == 0.0);

  const HermitianState pair = make_family(StateFamilySpec::single_pair(0, 1, 0.3), 3);
  REQUIRE(c_lp(pair, 2.0) == Approx(std::sqrt(0.18)).margin(1e-14));

  REQUIRE_THROWS_AS(c_lp(mcp, 0.9), InvalidP);
  REQUIRE_THROWS_AS(c_lp(mcp, 0.0), InvalidP);
}

TEST_CASE("c_l2 agrees with c_lp at p = 2") {
  for (int d : {2, 3, 5, 8}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const HermitianState rho = hs_sample(d, seed);
      REQUIRE(std::abs(c_l2(rho) - c_lp(rho, 2.0)) < 1e-12);
    }
  }
}

TEST_CASE("c_l2_max") {
  const HermitianState mixed = make_family(StateFamilySpec::completely_mixed(), 4);
  REQUIRE(c_l2_max(mixed) == Approx(0.0).margin(1e-14));

  const HermitianState pure = make_family(StateFamilySpec::random_pure_haar(1), 2);
  REQUIRE(c_l2_max(pure) == Approx(std::sqrt(0.5)).margin(1e-12));

  const HermitianState mcms = make_family(StateFamilySpec::mcms(0.5), 2);
  REQUIRE(c_l2_max(mcms) == Approx(std::sqrt(0.125)).margin(1e-14));
}

TEST_CASE("mixedness_linear") {
  REQUIRE(mixedness_linear(make_family(StateFamilySpec::completely_mixed(), 5)) ==
          Approx(1.0).margin(1e-13));
  REQUIRE(mixedness_linear(make_family(StateFamilySpec::random_pure_haar(3), 4)) ==
          Approx(0.0).margin(1e-12));
  REQUIRE(mixedness_linear(make_family(StateFamilySpec::mcms(0.5), 2)) ==
          Approx(0.75).margin(1e-14));
}

TEST_CASE("particle_p") {
  for (int d : {2, 3, 6}) {
    REQUIRE(particle_p(basis_state(d, d - 1)) == Approx(1.0).margin(1e-13));
    REQUIRE(particle_p(make_family(StateFamilySpec::completely_mixed(), d)) ==
            Approx(0.0).margin(1e-13));
  }
  const HermitianState diag =
      make_family(StateFamilySpec::incoherent_diagonal({0.5, 0.3, 0.2}), 3);
  // sqrt(1.5 * (0.38 - 1/3)) = sqrt(0.07)
  REQUIRE(particle_p(diag) == Approx(std::sqrt(0.07)).margin(1e-14));
  // depends only on the diagonal
  const HermitianState mcms = make_family(StateFamilySpec::mcms(0.9), 3);
  REQUIRE(particle_p(mcms) == Approx(0.0).margin(1e-13));
}

TEST_CASE("visibility/predictability pairs") {
  const HermitianState mcp = make_family(StateFamilySpec::max_coherent_pure(), 2);
  const HermitianState point = basis_state(2, 0);
  const HermitianState mixed = make_family(StateFamilySpec::completely_mixed(), 4);
  const HermitianState mcms = make_family(StateFamilySpec::mcms(0.5), 2);

  const WaveParticlePair durr = durr_quantities(mcp);
  REQUIRE(durr.visibility == Approx(1.0).margin(1e-14));
  REQUIRE(durr.predictability == Approx(0.0).margin(1e-14));
  REQUIRE(durr_quantities(point).visibility == Approx(0.0).margin(1e-14));
  REQUIRE(durr_quantities(point).predictability == Approx(1.0).margin(1e-14));
  REQUIRE(durr_quantities(mcms).visibility == Approx(0.5).margin(1e-14));
  REQUIRE(durr_quantities(mcms).predictability == Approx(0.0).margin(1e-14));

  REQUIRE(jb_quantities(mcp).visibility == Approx(1.0).margin(1e-14));
  REQUIRE(jb_quantities(mcp).predictability == Approx(0.0).margin(1e-14));
  REQUIRE(jb_quantities(mixed).visibility == Approx(0.0).margin(1e-14));
  REQUIRE(jb_quantities(mixed).predictability == Approx(0.0).margin(1e-14));
  REQUIRE(jb_quantities(point).predictability == Approx(1.0).margin(1e-14));

  REQUIRE(fuluo_quantities(mcp).visibility == Approx(0.5).margin(1e-14));
  REQUIRE(fuluo_quantities(mcp).predictability == Approx(0.5).margin(1e-14));
  REQUIRE(fuluo_quantities(mixed).visibility == Approx(0.0).margin(1e-14));
  REQUIRE(fuluo_quantities(mixed).predictability == Approx(0.25).margin(1e-14));
  REQUIRE(fuluo_quantities(point).predictability == Approx(1.0).margin(1e-14));
}

TEST_CASE("quantity_x") {
  // single populated pair at p=1, d=3: X = (2 - 2^2/6) m^2 = (4/3) m^2
  for (double m : {0.1, 0.3, 1.0 / 3}) {
    const HermitianState pair = make_family(StateFamilySpec::single_pair(0, 1, m), 3);
    REQUIRE(quantity_x(pair, 1.0) == Approx((4.0 / 3) * m * m).margin(1e-14));
  }
  REQUIRE(quantity_x(make_family(StateFamilySpec::single_pair(0, 1, 1.0 / 3), 3),
                     1.0) == Approx(4.0 / 27).margin(1e-14));

  // all-equal off-diagonal magnitudes give X = 0 for every p
  for (double p : {1.0, 1.25, 1.5, 1.75, 2.0}) {
    for (int d : {2, 3, 5}) {
      const int n_full = d * (d - 1) / 2;
      const HermitianState equal =
          make_family(StateFamilySpec::uniform_off_diag(n_full, 0.4 / d), d);
      REQUIRE(std::abs(quantity_x(equal, p)) < 1e-14);
    }
  }

  // d=3 closed form at m=1/3: X(n) = 2n/9 - 2n^2/27
  const auto x_closed = [](int n) { return 2.0 * n / 9 - 2.0 * n * n / 27; };
  for (int n : {1, 2, 3}) {
    const HermitianState rho =
        make_family(StateFamilySpec::uniform_off_diag(n, 1.0 / 3), 3);
    REQUIRE(quantity_x(rho, 1.0) == Approx(x_closed(n)).margin(1e-14));
  }

  REQUIRE_THROWS_AS(
      quantity_x(make_family(StateFamilySpec::completely_mixed(), 3), 0.5),
      InvalidP);
  REQUIRE_THROWS_AS(
      quantity_x(make_family(StateFamilySpec::completely_mixed(), 3), 2.5),
      InvalidP);
}

TEST_CASE("quantity_y") {
  // at p=1, a single populated pair gives Y = 0 exactly
  for (double m : {0.05, 0.2, 0.4}) {
    const HermitianState pair = make_family(StateFamilySpec::single_pair(0, 2, m), 3);
    REQUIRE(std::abs(quantity_y(pair, 1.0)) < 1e-14);
  }

  // d=3 closed form at m=1/3: Y(n) = 2n^2/9 - 2n/9
  const auto y_closed = [](int n) { return 2.0 * n * n / 9 - 2.0 * n / 9; };
  for (int n : {1, 2, 3}) {
    const HermitianState rho =
        make_family(StateFamilySpec::uniform_off_diag(n, 1.0 / 3), 3);
    REQUIRE(quantity_y(rho, 1.0) == Approx(y_closed(n)).margin(1e-14));
  }
  REQUIRE(quantity_y(make_family(StateFamilySpec::uniform_off_diag(3, 1.0 / 3), 3),
                     1.0) == Approx(4.0 / 3).margin(1e-14));

  const HermitianState diag =
      make_family(StateFamilySpec::incoherent_diagonal({0.6, 0.4}), 2);
  for (double p : {1.0, 1.5, 2.0}) REQUIRE(quantity_y(diag, p) == 0.0);

  REQUIRE_THROWS_AS(
      quantity_y(make_family(StateFamilySpec::completely_mixed(), 3), 2.5),
      InvalidP);
}

TEST_CASE("machado_t") {
  REQUIRE(machado_t(make_family(StateFamilySpec::single_pair(0, 1, 0.25), 3)) ==
          Approx(0.0).margin(1e-15));
  // two equal pairs at d=3: coefficient 12/8, one cross product counted twice
  REQUIRE(machado_t(make_family(StateFamilySpec::uniform_off_diag(2, 1.0 / 3), 3)) ==
          Approx(1.0 / 3).margin(1e-14));
  REQUIRE(machado_t(make_family(
              StateFamilySpec::incoherent_diagonal({0.1, 0.2, 0.7}), 3)) ==
          Approx(0.0).margin(1e-15));
  REQUIRE_THROWS_AS(machado_t(make_family(StateFamilySpec::mcms(0.4), 2)),
                    DimensionTooSmall);
}

TEST_CASE("cross-term convention: unordered inner sum matches Y, ordered does not") {
  for (int d : {3, 4}) {
    const double scale = double(d) / (d - 1);
    const double pm_coeff = double(d - 2) * (d + 1) / 2.0;
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      const HermitianState rho = hs_sample(d, mix_seed(31337, seed));
      const Matrix& m = rho.entries();
      const double y = oracle::quantity_y_p1(m);

      const double unordered = oracle::t_unordered(m);
      const double ordered = oracle::t_ordered(m);

      // library T uses the unordered convention
      REQUIRE(machado_t(rho) == Approx(unordered).margin(1e-12));
      // ((d-2)(d+1)/2) T equals (d/(d-1)) Y only for the unordered sum
      REQUIRE(std::abs(pm_coeff * unordered - scale * y) < 1e-12);
      REQUIRE(std::abs(pm_coeff * ordered - 2.0 * scale * y) < 1e-12);
      if (y > 1e-3) {
        REQUIRE(std::abs(pm_coeff * ordered - scale * y) > 1e-6);
      }
    }
  }
}

TEST_CASE("full_report examples") {
  const MeasureReport mcp = full_report(make_family(StateFamilySpec::max_coherent_pure(), 2), 1.0);
  REQUIRE(mcp.c_lp == Approx(1.0).margin(1e-14));
  REQUIRE(mcp.m_l == Approx(0.0).margin(1e-14));
  REQUIRE(mcp.particle_p == Approx(0.0).margin(1e-14));
  REQUIRE(std::abs(mcp.x) < 1e-14);
  REQUIRE(std::abs(mcp.y) < 1e-14);
  REQUIRE_FALSE(mcp.t.has_value());  // absent at d = 2

  const MeasureReport mixed = full_report(make_family(StateFamilySpec::completely_mixed(), 3), 1.5);
  REQUIRE(mixed.c_lp == 0.0);
  REQUIRE(mixed.c_l2 == 0.0);
  REQUIRE(mixed.particle_p == Approx(0.0).margin(1e-13));
  REQUIRE(mixed.m_l == Approx(1.0).margin(1e-13));
  REQUIRE(mixed.t.has_value());
  REQUIRE(*mixed.t == Approx(0.0).margin(1e-15));

  const MeasureReport mcms = full_report(make_family(StateFamilySpec::mcms(0.5), 2), 2.0);
  REQUIRE(mcms.c_l2 == Approx(std::sqrt(0.125)).margin(1e-14));
  REQUIRE(mcms.m_l == Approx(0.75).margin(1e-14));
  REQUIRE(mcms.particle_p == Approx(0.0).margin(1e-14));
  REQUIRE(std::abs(mcms.x) < 1e-14);

  REQUIRE_THROWS_AS(full_report(make_family(StateFamilySpec::mcms(0.5), 2), 2.5),
                    InvalidP);
  REQUIRE_THROWS_AS(full_report(make_family(StateFamilySpec::mcms(0.5), 2), 0.99),
                    InvalidP);
}

TEST_CASE("report JSON keys") {
  const nlohmann::json j3 =
      to_json(full_report(make_family(StateFamilySpec::mcms(0.3), 3), 1.25));
  for (const char* key : {"d", "p", "c_lp", "c_l2", "c_l2_max", "m_l",
                          "particle_p", "v_d", "p_d", "v_jb", "p_jb", "v_l",
                          "p_l", "x", "y", "t"}) {
    INFO(key);
    REQUIRE(j3.contains(key));
  }
  const nlohmann::json j2 =
      to_json(full_report(make_family(StateFamilySpec::mcms(0.3), 2), 1.25));
  REQUIRE_FALSE(j2.contains("t"));  // omission, not null
}

TEST_CASE("reduction consistency across frameworks") {
  for (int d : {2, 3, 5, 8}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const HermitianState rho = hs_sample(d, mix_seed(17, seed));
      const double cl2 = c_l2(rho);
      REQUIRE(std::abs(c_lp(rho, 2.0) - cl2) < 1e-12);
      REQUIRE(std::abs(std::sqrt(fuluo_quantities(rho).visibility) - cl2) < 1e-12);
      REQUIRE(std::abs(jb_quantities(rho).visibility / std::sqrt(2.0) - cl2) < 1e-12);
      REQUIRE(std::abs(std::sqrt((d - 1.0) / d) * durr_quantities(rho).visibility -
                       cl2) < 1e-12);
      // particle consistency: P^2 = (d/(d-1)) P_JB^2 / 2
      const double pp = particle_p(rho);
      const double pjb = jb_quantities(rho).predictability;
      REQUIRE(std::abs(pp * pp - (d / (d - 1.0)) * pjb * pjb / 2.0) < 1e-12);
    }
  }
}

TEST_CASE("every report field is basis-permutation invariant") {
  for (int d : {3, 5}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const HermitianState rho = hs_sample(d, mix_seed(23, seed));
      Rng rng(mix_seed(29, seed));
      std::vector<int> perm(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i) perm[static_cast<std::size_t>(i)] = i;
      for (int i = d - 1; i > 0; --i) {
        std::swap(perm[static_cast<std::size_t>(i)],
                  perm[static_cast<std::size_t>(rng.below(i + 1))]);
      }
      Matrix permuted(d, d);
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) permuted(perm[i], perm[j]) = rho(i, j);
      }
      const HermitianState sigma = HermitianState::validate(permuted, Mode::Strict);

      const std::vector<double> a = report_fields(full_report(rho, 1.5));
      const std::vector<double> b = report_fields(full_report(sigma, 1.5));
      REQUIRE(a.size() == b.size());
      for (std::size_t k = 0; k < a.size(); ++k) {
        REQUIRE(std::abs(a[k] - b[k]) < 1e-12);
      }
    }
  }
}

TEST_CASE("sampled global maximum of c_lp") {
  for (int d : {2, 4, 8}) {
    for (double p : {1.0, 1.5, 2.0}) {
      const double bound = std::pow((d - 1.0) / std::pow(double(d), p - 1.0), 1.0 / p);
      for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const HermitianState rho = (seed % 2 == 0)
            ? hs_sample(d, mix_seed(41, seed))
            : make_family(StateFamilySpec::random_pure_haar(mix_seed(43, seed)), d);
        REQUIRE(c_lp(rho, p) <= bound + 1e-10);
      }
      // equality at the uniform superposition
      REQUIRE(std::abs(c_lp(make_family(StateFamilySpec::max_coherent_pure(), d), p) -
                       bound) < 1e-12);
    }
  }
}

TEST_CASE("sampled convexity of c_lp and particle_p") {
  for (int d : {2, 3, 6}) {
    for (double p : {1.0, 1.5, 2.0}) {
      for (std::uint64_t k = 0; k < 100; ++k) {
        Rng rng(mix_seed(59, k * 8 + static_cast<std::uint64_t>(d)));
        const HermitianState a = hs_sample(d, rng.next_u64());
        const HermitianState b = hs_sample(d, rng.next_u64());
        const double lambda = rng.uniform();
        const HermitianState mix = HermitianState::validate(
            lambda * a.entries() + (1.0 - lambda) * b.entries(), Mode::Strict);
        REQUIRE(c_lp(mix, p) <=
                lambda * c_lp(a, p) + (1.0 - lambda) * c_lp(b, p) + 1e-10);
        REQUIRE(particle_p(mix) <=
                lambda * particle_p(a) + (1.0 - lambda) * particle_p(b) + 1e-10);
      }
    }
  }
}

TEST_CASE("the equal-off-diagonal weight family pins X = 0 and Y increasing") {
  for (int d : {2, 3, 5}) {
    double previous_y = -1.0;
    for (double a : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
      const HermitianState rho = make_family(StateFamilySpec::mcms(a), d);
      for (double p : {1.0, 1.5, 2.0}) {
        REQUIRE(std::abs(quantity_x(rho, p)) < 1e-13);
      }
      const double y = quantity_y(rho, 1.0);
      if (d > 2) REQUIRE(y > previous_y);
      previous_y = y;
    }
  }
}
