#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "dlab/model.hpp"

using namespace dlab;

namespace {

double det_oracle(const Mat3& a) {
  return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
         a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
         a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

}  // namespace

TEST_CASE("multipliers from the unfolding parameters", "[model]") {
  const ResonantBase base{0.5, +1};
  SECTION("resonance point") {
    const SaddleMultipliers m = multipliers_from_unfolding(base, {0, 0, 0});
    REQUIRE(m.lambda1 == 0.5);
    REQUIRE(m.lambda2 == -0.5);
    REQUIRE(m.gamma == 4.0);
    REQUIRE(std::abs(m.lambda1 * m.lambda2 * m.gamma) == Catch::Approx(1.0).epsilon(1e-15));
  }
  SECTION("mu3 controls the multiplier ratio") {
    const SaddleMultipliers m = multipliers_from_unfolding(base, {0, 0, 0.21});
    REQUIRE(m.lambda1 == Catch::Approx(0.55).epsilon(1e-14));
    REQUIRE(m.lambda2 == Catch::Approx(-0.5 / 1.1).epsilon(1e-14));
    REQUIRE(m.lambda1 / std::abs(m.lambda2) == Catch::Approx(1.21).epsilon(1e-14));
  }
  SECTION("mu2 controls the Jacobian") {
    const SaddleMultipliers m = multipliers_from_unfolding(base, {0, 0.1, 0});
    REQUIRE(std::abs(m.lambda1 * m.lambda2 * m.gamma) == Catch::Approx(0.9).epsilon(1e-14));
  }
  SECTION("round-trip identities over random unfoldings") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u2(-0.3, 0.3), u3(-0.2, 0.2);
    for (int trial = 0; trial < 100; ++trial) {
      const Unfolding u{0.0, u2(rng), u3(rng)};
      const SaddleMultipliers m = multipliers_from_unfolding(base, u);
      REQUIRE(std::abs(m.lambda1 * m.lambda2 * m.gamma) ==
              Catch::Approx(1.0 - u.mu2).margin(1e-14));
      REQUIRE(m.lambda1 / std::abs(m.lambda2) == Catch::Approx(1.0 + u.mu3).margin(1e-14));
      REQUIRE(m.lambda1 > 0.0);
      REQUIRE(m.lambda2 < 0.0);
    }
  }
  SECTION("out-of-range multipliers are rejected") {
    REQUIRE_THROWS_AS(multipliers_from_unfolding(base, {0, 0, 3.5}), OutOfRangeError);   // lambda1 >= 1
    REQUIRE_THROWS_AS(multipliers_from_unfolding(base, {0, 0.8, 0}), OutOfRangeError);   // |gamma| <= 1
    REQUIRE_THROWS_AS(multipliers_from_unfolding(base, {0, 1.5, 0}), OutOfRangeError);   // |mu2| >= 1
    REQUIRE_THROWS_AS(multipliers_from_unfolding(base, {0, 0, -1.0}), OutOfRangeError);  // 1 + mu3 <= 0
  }
}

TEST_CASE("local map and its iterates", "[model]") {
  const SaddleMultipliers m{0.5, -0.5, 4.0};
  REQUIRE(local_map(m, {1, 1, 1}) == ModelState{0.5, -0.5, 4.0});
  REQUIRE(local_map(m, {0, 0, 0}) == ModelState{0, 0, 0});

  // invariant manifolds stay straightened
  const ModelState on_stable = local_map(m, {0.3, -0.2, 0.0});
  REQUIRE(on_stable.y == 0.0);
  const ModelState on_unstable = local_map(m, {0.0, 0.0, 0.7});
  REQUIRE(on_unstable.x1 == 0.0);
  REQUIRE(on_unstable.x2 == 0.0);

  REQUIRE(local_map_iterate(m, 0, {1, 2, 3}) == ModelState{1, 2, 3});
  REQUIRE(local_map_iterate(m, 2, {1, 1, 1}) == ModelState{0.25, 0.25, 16.0});

  SECTION("sign alternation and bit-exact composition") {
    ModelState composed{0.3, 0.7, 1e-4};
    const ModelState start = composed;
    for (int k = 1; k <= 12; ++k) {
      composed = local_map(m, composed);
      const ModelState direct = local_map_iterate(m, k, start);
      REQUIRE(direct == composed);
      REQUIRE((direct.x2 > 0) == (k % 2 == 0));
    }
  }
}

TEST_CASE("global map around the outgoing homoclinic point", "[model]") {
  const ModelSpec spec = default_model();
  const GlobalCoeffs& c = spec.coeffs;

  SECTION("the outgoing point maps to the incoming point lifted by mu1") {
    const ModelState img = global_map(c, 0.0, {0, 0, c.ym});
    REQUIRE(img == ModelState{c.x1p, c.x2p, 0.0});
    const ModelState lifted = global_map(c, 0.3, {0, 0, c.ym});
    REQUIRE(lifted.y == 0.3);
  }
  SECTION("direct quadratic substitution") {
    const ModelState img = global_map(c, 0.0, {0, 0, 1.1});
    REQUIRE(img.x1 == Catch::Approx(1.1).epsilon(1e-15));
    REQUIRE(img.x2 == Catch::Approx(1.2).epsilon(1e-15));
    REQUIRE(img.y == Catch::Approx(0.01).epsilon(1e-12));
  }
  SECTION("differential determinant at the tangency height is J1") {
    const Mat3 j = global_map_differential(c, {0.2, -0.1, c.ym});
    REQUIRE(det_oracle(j) == Catch::Approx(global_jacobian_det(c)).margin(1e-12));
    REQUIRE(global_jacobian_det(c) == -3.0);
  }
  SECTION("invertibility radius is enforced") {
    REQUIRE(eta_max(c) == Catch::Approx(1.5));
    REQUIRE_THROWS_AS(global_map(c, 0.0, {0, 0, c.ym + 1.6}), OutsideDomainError);
    REQUIRE_NOTHROW(global_map(c, 0.0, {0, 0, c.ym + 1.4}));
  }
}

TEST_CASE("default model satisfies the coefficient conditions", "[model]") {
  const ModelSpec spec = default_model();
  REQUIRE_NOTHROW(validate(spec));
  REQUIRE(global_jacobian_det(spec.coeffs) == -3.0);
  const GlobalCoeffs& c = spec.coeffs;
  REQUIRE(c.b1 * c.c1 * c.b2 * c.c2 == 2.0);
  const double gamma0 = spec.base.gamma_sign / (spec.base.lambda * spec.base.lambda);
  REQUIRE(std::abs(spec.base.lambda * spec.base.lambda * gamma0) == 1.0);
}

TEST_CASE("first-return map composes the local passes and the excursion", "[model]") {
  const ModelSpec spec = default_model();
  const GlobalCoeffs& c = spec.coeffs;
  const Unfolding u0{};

  SECTION("matches the two-call composition bit for bit") {
    const SaddleMultipliers m = multipliers_from_unfolding(spec.base, u0);
    for (long k : {5L, 8L, 11L}) {
      const ModelState s{1.0, 1.0, powk(1.0 / 4.0, k)};
      const ModelState via_op = first_return_map(spec, u0, k, s);
      const ModelState via_two = global_map(c, u0.mu1, local_map_iterate(m, k, s));
      REQUIRE(via_op == via_two);
    }
  }
  SECTION("third component at the box center follows the closed form") {
    const SaddleMultipliers m = multipliers_from_unfolding(spec.base, u0);
    for (long k : {6L, 9L, 12L}) {
      const ModelState s{c.x1p, c.x2p, powk(1.0 / m.gamma, k) * c.ym};
      const ModelState img = first_return_map(spec, u0, k, s);
      const double expected = u0.mu1 + c.c1 * powk(m.lambda1, k) * c.x1p +
                              c.c2 * powk(m.lambda2, k) * c.x2p;
      REQUIRE(img.y == Catch::Approx(expected).margin(1e-14));
    }
  }
  SECTION("homoclinic accumulation: return height vanishes with k") {
    // the alternating multiplier cancels the height exactly at odd k, so
    // compare within each parity chain
    const SaddleMultipliers m = multipliers_from_unfolding(spec.base, u0);
    auto height = [&](long k) {
      const ModelState s{c.x1p, c.x2p, powk(1.0 / m.gamma, k) * c.ym};
      return std::abs(first_return_map(spec, u0, k, s).y);
    };
    for (long k = 8; k <= 14; ++k) REQUIRE(height(k) <= height(k - 2));
    REQUIRE(height(14) < 1e-3);
    REQUIRE(height(13) < 1e-3);
  }
  SECTION("k below the supported minimum is rejected") {
    REQUIRE_THROWS_AS(first_return_map(spec, u0, 3, ModelState{1, 1, 0.01}), OutOfRangeError);
  }
}

TEST_CASE("quadratic tangency certificate", "[model]") {
  const ModelSpec spec = default_model();
  SECTION("tangency at zero splitting") {
    const TangencyCertificate cert = homoclinic_tangency_certificate(spec);
    REQUIRE(cert.min_height == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(cert.second_derivative == Catch::Approx(2.0).margin(1e-8));
  }
  SECTION("mu1 lifts the minimum") {
    const TangencyCertificate cert = homoclinic_tangency_certificate(spec, 0.3);
    REQUIRE(cert.min_height == Catch::Approx(0.3).margin(1e-12));
  }
  SECTION("negative d flips the tangency side") {
    ModelSpec flipped = default_model();
    flipped.coeffs.d = -1.0;
    const TangencyCertificate cert = homoclinic_tangency_certificate(flipped);
    REQUIRE(cert.min_height == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(cert.second_derivative == Catch::Approx(-2.0).margin(1e-8));
  }
}
