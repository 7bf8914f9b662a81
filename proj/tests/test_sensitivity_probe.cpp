#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dpspectra/sensitivity_probe.hpp"
#include "support/instances.hpp"

using namespace dpspectra;

namespace {
const double kHalfNormalMean = std::sqrt(2.0 / 3.14159265358979323846);
}

TEST_CASE("q = 1 gap is the half-normal mean regardless of M") {
  SECTION("zero matrix") {
    const auto M = SymmetricMatrix(4);
    const auto est = power_gap_estimate(M, 0, 2, 1, 10000, 31);
    CHECK(std::abs(est.mean - kHalfNormalMean) <= 3.0 * est.std_error);
  }
  SECTION("general matrix: (M+E)^1 - M^1 = E") {
    RngStream rng(3);
    const auto M = testsupport::rotated_spectrum(testsupport::gapped_spectrum(6, 4.0, 0.7), rng);
    const auto est = power_gap_estimate(M, 1, 4, 1, 10000, 32);
    CHECK(std::abs(est.mean - kHalfNormalMean) <= 3.0 * est.std_error);
  }
}

TEST_CASE("rank-one closed form at q = 3") {
  const double s1 = 5.0;
  const auto M = SymmetricMatrix::diagonal({s1, 0.0, 0.0});
  const auto est = power_gap_estimate(M, 0, 0, 3, 20000, 33);
  const double expected = (std::pow(s1 + 1.0, 3) - std::pow(s1, 3)) * kHalfNormalMean;
  CHECK(std::abs(est.mean - expected) <= 3.0 * est.std_error);
}

TEST_CASE("probe is deterministic given the seed") {
  const auto M = SymmetricMatrix::diagonal({2.0, 1.0});
  const auto a = power_gap_estimate(M, 0, 1, 2, 500, 77);
  const auto b = power_gap_estimate(M, 0, 1, 2, 500, 77);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
}

TEST_CASE("overflow and argument guards") {
  const auto M = SymmetricMatrix::diagonal({1e30, 1.0});
  CHECK_THROWS_AS(power_gap_estimate(M, 0, 1, 20, 10, 1), NumericError);
  CHECK_THROWS_AS(power_gap_estimate(M, 0, 1, 65, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(power_gap_estimate(M, 0, 5, 2, 10, 1), std::invalid_argument);
}

TEST_CASE("mu_k power bound formula") {
  SECTION("diagonal matrix saturates the min at 1") {
    const auto M = SymmetricMatrix::diagonal({40.0, 10.0, 5.0, 1.0});
    const auto b = mu_k_power_bound(M, 1, 8);
    CHECK(b.mu_k_value == Catch::Approx(4.0));  // basis vectors: mu_k = n
    CHECK(b.bound == Catch::Approx(9.0 * 8.0 * std::pow(40.0, 7)).epsilon(1e-12));
  }
  SECTION("hand-evaluated incoherent case") {
    // mu_1 = 1, n = 64, k = 1 gives min = 1/8; bound = 9 * (1/8) * 8 * 40^7
    // realized with a flat top eigenvector
    const int n = 64;
    Vec flat(n, 1.0 / 8.0);  // unit: 64 * (1/64)
    std::vector<Vec> basis{flat};
    auto A = testsupport::from_spectrum(basis, {40.0});
    const auto b = mu_k_power_bound(A, 1, 8);
    CHECK(b.mu_k_value == Catch::Approx(1.0).epsilon(1e-10));
    // 9 * sqrt(1/64) * 8 * 40^7 = 9 * 40^7
    CHECK(b.bound == Catch::Approx(9.0 * std::pow(40.0, 7)).epsilon(1e-8));
  }
  SECTION("q = 1 removes the power factor") {
    const auto M = SymmetricMatrix::diagonal({7.0, 1.0});
    const auto b = mu_k_power_bound(M, 1, 1);
    CHECK(b.bound == Catch::Approx(9.0 * std::min(1.0, std::sqrt(1.0 * 2.0 / 2.0))).epsilon(1e-12));
  }
}

TEST_CASE("precondition flags") {
  const auto M = SymmetricMatrix::diagonal({40.0, 10.0, 5.0, 1.0});
  const auto ok = mu_k_power_bound(M, 1, 8);
  CHECK(ok.sigma1_large_enough);       // 40 >= 32
  CHECK(ok.tail_small_enough);         // 10 <= 20
  CHECK(ok.q_large_enough);            // 8 >= ln 4 + 1
  CHECK(ok.preconditions_met);
  const auto bad = mu_k_power_bound(M, 1, 11);
  CHECK_FALSE(bad.sigma1_large_enough);  // 40 < 44
  CHECK_FALSE(bad.preconditions_met);
}

TEST_CASE("theorem inequality on precondition-satisfying instances") {
  RngStream rng(59);
  int satisfied = 0;
  for (int rep = 0; rep < 5; ++rep) {
    const int n = 16;
    const int q = 4;  // >= ln 16 + 1 = 3.77
    Vec lam(n);
    lam[0] = 20.0;
    lam[1] = 17.0;
    for (int j = 2; j < n; ++j) lam[static_cast<std::size_t>(j)] = 8.0 * (1.0 - static_cast<double>(j) / n);
    const auto M = testsupport::rotated_spectrum(lam, rng);
    const auto bound = mu_k_power_bound(M, 2, q);
    if (!bound.preconditions_met) continue;
    ++satisfied;
    const auto est = power_gap_estimate(M, 1, 3, q, 200, static_cast<std::uint64_t>(100 + rep));
    CHECK(est.mean <= bound.bound + 3.0 * est.std_error);
  }
  CHECK(satisfied == 5);
}
