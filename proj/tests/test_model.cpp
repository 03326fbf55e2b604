#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "noncollide/model.hpp"
#include "test_util.hpp"

using namespace noncollide;

namespace {

bool has_rule(const std::vector<Violation>& vs, const std::string& rule) {
    for (const auto& v : vs)
        if (v.rule == rule) return true;
    return false;
}

}  // namespace

TEST_CASE("validate accepts the two-particle Dyson system") {
    const SystemSpec spec = nctest::dyson(2, 1.0, {-1.0, 1.0});
    const ValidationReport rep = validate(spec, false);
    CHECK(rep.ok);
    CHECK(rep.violations.empty());
    CHECK(rep.sigma_sq == doctest::Approx(1.0));
    CHECK(rep.gamma_sup == doctest::Approx(1.0));
    REQUIRE(rep.c.size() == 2);
    CHECK(rep.c[0] == doctest::Approx(1.0));
    CHECK(rep.c[1] == doctest::Approx(std::sqrt(2.0)));
    // sigma^2 = 1 <= 2*gamma_{1,2} = 2 and (c^i)^2 >= (d-1) sup gamma, so
    // strict mode passes as well
    CHECK(validate(spec, true).ok);
}

TEST_CASE("validate flags non-increasing initial positions") {
    SystemSpec spec = nctest::dyson(2, 1.0, {1.0, 1.0});
    const ValidationReport rep = validate(spec, false);
    CHECK(!rep.ok);
    CHECK(has_rule(rep.violations, "x0-ordered"));
}

TEST_CASE("theorem hypothesis on c is a warning unless strict") {
    // d=3, identity sigma: (c^0)^2 = 1 < (d-1) sup gamma = 2
    const SystemSpec spec = nctest::dyson(3, 1.0, {-1.0, 0.0, 1.0});
    const ValidationReport lax = validate(spec, false);
    CHECK(lax.ok);
    CHECK(has_rule(lax.warnings, "c-theorem-bound"));
    const ValidationReport strict = validate(spec, true);
    CHECK(!strict.ok);
    CHECK(has_rule(strict.violations, "c-theorem-bound"));
}

TEST_CASE("validate flags bad gamma matrices") {
    SystemSpec spec = nctest::dyson(3, 1.0, {-1.0, 0.0, 1.0});
    SUBCASE("asymmetric") {
        spec.gamma(0, 1) = 2.0;
        CHECK(has_rule(validate(spec, false).violations, "gamma-symmetric"));
    }
    SUBCASE("negative entry") {
        spec.gamma(0, 2) = spec.gamma(2, 0) = -0.5;
        CHECK(has_rule(validate(spec, false).violations, "gamma-nonnegative"));
    }
    SUBCASE("zero super-diagonal") {
        spec.gamma(1, 2) = spec.gamma(2, 1) = 0.0;
        CHECK(has_rule(validate(spec, false).violations, "gamma-superdiag-positive"));
    }
    SUBCASE("non-positive horizon") {
        spec.horizon = 0.0;
        CHECK(has_rule(validate(spec, false).violations, "horizon-positive"));
    }
}

TEST_CASE("validate flags decreasing affine intercepts") {
    SystemSpec spec = nctest::dyson(2, 1.0, {-1.0, 1.0});
    spec.drift.kind = DriftKind::AffineSharedSlope;
    spec.drift.slope = 0.5;
    spec.drift.intercepts = {1.0, 0.0};
    CHECK(has_rule(validate(spec, false).violations, "drift-ordered"));
    spec.drift.intercepts = {0.0, 1.0};
    CHECK(validate(spec, false).ok);
}

TEST_CASE("validate is pure") {
    const SystemSpec spec = nctest::dyson(3, 1.0, {-1.0, 0.0, 1.0});
    const ValidationReport a = validate(spec, true);
    const ValidationReport b = validate(spec, true);
    CHECK(a.ok == b.ok);
    CHECK(a.violations.size() == b.violations.size());
    CHECK(a.c == b.c);
    CHECK(a.sigma_sq == b.sigma_sq);
}

TEST_CASE("drift_eval basics") {
    SystemSpec spec = nctest::dyson(2, 1.0, {-1.0, 1.0});
    CHECK(drift_eval(spec, 0, 5.0) == 0.0);

    spec.drift.kind = DriftKind::AffineSharedSlope;
    spec.drift.slope = 0.5;
    spec.drift.intercepts = {0.0, 1.0};
    CHECK(drift_eval(spec, 1, 2.0) == doctest::Approx(2.0));  // 1 + 0.5*2
    CHECK_THROWS_AS(drift_eval(spec, 2, 0.0), std::out_of_range);
    CHECK_THROWS_AS(drift_eval(spec, -1, 0.0), std::out_of_range);
}

TEST_CASE("drift_eval is monotone in the particle index") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(-10.0, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int d = 2 + static_cast<int>(rng() % 5);
        SystemSpec spec = nctest::dyson(d, 1.0, nctest::equally_spaced(d));
        spec.drift.kind = DriftKind::AffineSharedSlope;
        spec.drift.slope = unif(rng);
        spec.drift.intercepts.resize(d);
        double a = unif(rng);
        for (int i = 0; i < d; ++i) {
            spec.drift.intercepts[i] = a;
            a += std::abs(unif(rng));
        }
        const double z = unif(rng);
        for (int i = 0; i + 1 < d; ++i)
            CHECK(drift_eval(spec, i, z) <= drift_eval(spec, i + 1, z));
    }
}

TEST_CASE("specs passing strict validation satisfy the c bound they report") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> gdist(0.05, 2.0);
    std::uniform_real_distribution<double> sdist(0.2, 1.5);
    int accepted = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const int d = 2 + static_cast<int>(rng() % 4);
        SystemSpec spec = nctest::dyson(d, 1.0, nctest::equally_spaced(d));
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j)
                spec.gamma(i, j) = spec.gamma(j, i) = gdist(rng);
        for (int i = 0; i < d; ++i) spec.sigma(i, i) = sdist(rng);
        const ValidationReport rep = validate(spec, true);
        if (!rep.ok) continue;
        ++accepted;
        for (double ci : rep.c) CHECK(ci * ci >= (d - 1) * rep.gamma_sup);
    }
    CHECK(accepted > 0);
}
