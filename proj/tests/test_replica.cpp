#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "sparc/replica.hpp"
#include "sparc/rng.hpp"
#include "sparc/state_evolution.hpp"

using namespace sparc;

TEST_CASE("capacity values") {
    CHECK(capacity(15.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(capacity(3.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(capacity(100.0) == doctest::Approx(3.3291).epsilon(1e-4));
    CHECK_THROWS(capacity(0.0));
}

TEST_CASE("large-B threshold closed form") {
    CHECK(r_bp_infinity(100.0) == doctest::Approx(0.7142064).epsilon(1e-6));
    CHECK(r_bp_infinity(15.0) == doctest::Approx(0.6762630).epsilon(1e-6));
}

TEST_CASE("large-B potential boundary values") {
    for (double snr : {1.0, 10.0, 15.0, 100.0}) {
        const double C = capacity(snr);
        // the E = 1 identity needs the high-error entropy branch, which is
        // active only above the large-B algorithmic threshold
        const double r_lo = std::max(0.6 * C, 1.05 * r_bp_infinity(snr));
        for (double R : {r_lo, C, 1.3 * C}) {
            CHECK(potential_large_B(0.0, R, snr) ==
                  doctest::Approx(std::log2(snr) / (2.0 * R)).epsilon(1e-12));
            CHECK(potential_large_B(1.0, R, snr) ==
                  doctest::Approx(1.0 - std::log2(1.0 / snr + 1.0) / (2.0 * R))
                      .epsilon(1e-12));
        }
        // the two boundary values coincide exactly at capacity
        CHECK(potential_large_B(0.0, C, snr) ==
              doctest::Approx(potential_large_B(1.0, C, snr)).epsilon(1e-12));
    }
}

TEST_CASE("large-B potential is continuous at the branch switch") {
    // the entropy branch switches where R ln2 (1/snr + E) = 1/2
    for (double snr : {10.0, 100.0}) {
        const double R = 0.8 * capacity(snr);
        const double Estar = 1.0 / (2.0 * R * std::log(2.0)) - 1.0 / snr;
        if (Estar <= 0 || Estar >= 1.2) continue;
        const double lo = potential_large_B(Estar - 1e-9, R, snr);
        const double hi = potential_large_B(Estar + 1e-9, R, snr);
        CHECK(lo == doctest::Approx(hi).epsilon(1e-8));
    }
}

TEST_CASE("large-B stability boundary of the high-error state") {
    // directly below r_bp_infinity the potential is strictly decreasing at
    // E = 1; above it a maximum appears there
    for (double snr : {10.0, 100.0}) {
        const double rb = r_bp_infinity(snr);
        const double h = 1e-5;
        auto slope_at_one = [&](double R) {
            return (potential_large_B(1.0, R, snr) - potential_large_B(1.0 - h, R, snr)) / h;
        };
        CHECK(slope_at_one(rb * 0.99) < 0.0);
        CHECK(slope_at_one(rb * 1.01) > 0.0);
    }
}

TEST_CASE("B=2 potential is deterministic and seed independent") {
    const auto a = potential(0.3, 2, 1.5, 100.0, 1000, 1);
    const auto b = potential(0.3, 2, 1.5, 100.0, 500000, 99);
    CHECK(a.std_err == 0.0);
    CHECK(a.value == b.value);
}

TEST_CASE("Monte Carlo potential agrees with quadrature as B=2 cross-check") {
    // evaluate the generic sampling path at B = 3 against a fine independent
    // midpoint of two seeds to bound the noise, then sanity check that the
    // B = 2 quadrature sits inside the MC confidence band of a nearby value
    const auto q = potential(0.25, 2, 1.2, 15.0, 1000, 1);
    // independent check of the same integral by crude direct sampling
    const double s2 = 1.2 * std::log(2.0) * (1.0 / 15.0 + 0.25);
    const double lnB = std::log(2.0);
    const double aa = lnB / (2.0 * s2), bb = std::sqrt(lnB / s2);
    Xoshiro256 rng(123);
    double acc = 0;
    const std::size_t n = 2000000;
    std::vector<double> z(2);
    for (std::size_t k = 0; k < n; ++k) {
        fill_normal(rng, z.data(), 2);
        const double u1 = aa + bb * z[0];
        const double u2 = -aa + bb * z[1];
        const double m = std::max(u1, u2);
        acc += m + std::log(std::exp(u1 - m) + std::exp(u2 - m));
    }
    acc /= static_cast<double>(n);
    const double t1 = -lnB * (std::log(1.0 / 15.0 + 0.25) + 0.75 / (1.0 / 15.0 + 0.25)) /
                      (2.0 * 1.2 * std::log(2.0));
    CHECK(q.value == doctest::Approx(t1 + acc).epsilon(5e-3));
}

TEST_CASE("finite difference uses common random numbers") {
    // with shared draws the difference estimate is far tighter than the
    // difference of two independent evaluations
    const auto d = potential_diff(0.4, 1e-3, 4, 1.5, 15.0, 20000, 7);
    const auto pp = potential(0.401, 4, 1.5, 15.0, 20000, 7);
    const auto pm = potential(0.399, 4, 1.5, 15.0, 20000, 7);
    CHECK(d.std_err < pp.std_err / 1e-3);
    CHECK(d.value ==
          doctest::Approx((pp.value - pm.value) / 2e-3).epsilon(1e-6));
}

TEST_CASE("SE fixed point is a stationary point of the potential, B=2") {
    // above the algorithmic threshold the recursion from E = 1 settles on the
    // interior high-error state; quadrature on both sides makes this sharp
    SEParams p{2, 2.2, 100.0, 100000, 1};
    SEMode mode;
    const auto traj = se_run(p, mode, 2000, 1e-12);
    const double Efix = traj.E.back()[0];
    REQUIRE(Efix > 0.05);
    const auto d = potential_diff(Efix, 1e-5, 2, 2.2, 100.0, 1000, 1);
    CHECK(std::abs(d.value) < 1e-4);
}

TEST_CASE("SE fixed point is a stationary point of the potential, B=4") {
    SEParams p{4, 1.7, 15.0, 300000, 5};
    SEMode mode;
    const auto traj = se_run(p, mode, 1000, 1e-10);
    const double Efix = traj.E.back()[0];
    REQUIRE(Efix > 0.05);
    const auto d = potential_diff(Efix, 5e-3, 4, 1.7, 15.0, 2000000, 5);
    CHECK(std::abs(d.value) < 3.0 * d.std_err + 2e-3);
}

TEST_CASE("threshold finders at B=2 snr=100") {
    const auto rbp = find_r_bp(2, 100.0);
    REQUIRE(rbp.found);
    CHECK(rbp.R == doctest::Approx(1.955).epsilon(0.02));
    const auto ropt = find_r_opt(2, 100.0);
    REQUIRE(ropt.found);
    CHECK(ropt.R == doctest::Approx(2.68).epsilon(0.02));
    CHECK(ropt.R > rbp.R);
    CHECK(ropt.R < capacity(100.0));
}

TEST_CASE("no transition at low snr") {
    const auto rbp = find_r_bp(2, 0.5);
    CHECK(!rbp.found);
}

TEST_CASE("potential curve bookkeeping") {
    const auto curve = potential_curve(2, 2.2, 100.0, 1000, 3);
    REQUIRE(curve.E_grid.size() == curve.phi.size());
    REQUIRE(curve.E_grid.size() == curve.std_err.size());
    CHECK(curve.E_grid.front() == doctest::Approx(1e-8).epsilon(1e-12));
    CHECK(curve.E_grid.back() == doctest::Approx(1.2).epsilon(1e-12));
    // between the two thresholds both maxima are present
    REQUIRE(curve.maxima.size() == 2);
    CHECK(curve.maxima[0].first < 0.01);
    CHECK(curve.maxima[1].first > 0.1);
    // below R_BP only the low-error maximum survives
    const auto low = potential_curve(2, 1.5, 100.0, 1000, 3);
    REQUIRE(low.maxima.size() == 1);
    CHECK(low.maxima[0].first < 0.01);
}

TEST_CASE("low-error SER at a decodable rate is tiny") {
    const double ser = optimal_ser(2, 1.5, 100.0, 100000, 1);
    CHECK(ser >= 0.0);
    CHECK(ser < 1e-6);
}

TEST_CASE("phase diagram point assembles the pieces") {
    const auto pt = phase_diagram_point(2, 100.0, 200000, 1);
    CHECK(pt.B == 2);
    CHECK(pt.snr == 100.0);
    REQUIRE(pt.r_bp.found);
    REQUIRE(pt.r_opt.found);
    CHECK(pt.r_bp.R < pt.r_opt.R);
    CHECK(pt.r_opt.R < pt.capacity);
    CHECK(pt.ser_at_low_maximum < 1e-4);
}
