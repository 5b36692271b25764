#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "testutil.hpp"

#include <cmath>
#include <vector>

#include "mechlab/distribution.hpp"
#include "mechlab/mechanisms.hpp"
#include "mechlab/montecarlo.hpp"
#include "mechlab/numerics.hpp"

using namespace mechlab;

namespace {

Distribution uniform() { return Distribution(DistributionSpec::uniform()); }
Distribution power(double k) {
    return Distribution(DistributionSpec::power(k));
}
Distribution tab_convex() {
    return Distribution(DistributionSpec::tabulated(
        {0.0, 0.01, 0.04, 0.09, 0.16, 0.25, 0.36, 0.49, 0.64, 0.81, 1.0}));
}

// uniform-law closed form for the dynamic acceptance threshold
double theta_bar_closed(double delta) {
    return (4.0 + delta -
            std::sqrt((4.0 - delta) * (4.0 - delta) - 8.0 * delta)) /
           (4.0 * delta);
}

std::uint64_t splitmix(std::uint64_t& s) {
    s += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
double unit(std::uint64_t z) { return (z >> 11) * 0x1.0p-53; }

}  // namespace

TEST_CASE("kind names") {
    CHECK(to_string(MechanismKind::Dynamic) == "D");
    CHECK(mechanism_kind_from_string("eafp") == MechanismKind::EAFP);
    CHECK(mechanism_kind_from_string("D") == MechanismKind::Dynamic);
    CHECK_THROWS_AS(mechanism_kind_from_string("nope"), config_error);
}

TEST_CASE("solve_eafp") {
    auto u = uniform();
    auto s = solve_eafp(u, u);
    CHECK(*s.price0 == near(0.75, 1e-9));
    CHECK(s.profit == near(0.0625, 1e-9));

    // cost law concentrated near 0: price approaches 1/2
    Distribution lowg(DistributionSpec::tabulated(
        {0.0, 0.9, 0.95, 0.97, 0.98, 0.99, 0.993, 0.996, 0.998, 0.999, 1.0}));
    // independent trapezoid oracle for E[omega] = 1 - int G
    double gc = 0.0;
    {
        const double grid[] = {0.0,  0.9,   0.95,  0.97,  0.98, 0.99,
                               0.993, 0.996, 0.998, 0.999, 1.0};
        for (int i = 0; i < 10; ++i) gc += 0.05 * (grid[i] + grid[i + 1]);
    }
    double mean = 1.0 - gc;
    auto s2 = solve_eafp(uniform(), lowg);
    CHECK(*s2.price0 == near(0.5 * (1.0 + mean), 1e-8));
    CHECK(*s2.price0 == near(0.5, 0.1));

    // grid oracle for power(2) values: argmax of (1 - p^2)(p - 1/2)
    auto s3 = solve_eafp(power(2), uniform());
    auto [bp, bv] = mc::brute_force_price(power(2), uniform(),
                                          MechanismKind::EAFP, 10000);
    CHECK(*s3.price0 == near(bp, 1e-4));
    CHECK(s3.profit == near(bv, 1e-8));
}

TEST_CASE("solve_epo") {
    auto u = uniform();
    auto s = solve_epo(u, u, 0.6);
    CHECK(*s.theta_star == near(0.5, 1e-9));
    CHECK(s.profit == near(0.05, 1e-9));

    auto rule = ex_post_rule(u, s);
    for (double w : {0.0, 0.2, 0.5, 0.8, 1.0}) {
        auto p = rule.price(w);
        REQUIRE(p.has_value());
        CHECK(*p == near(0.5 * (1.0 + w), 1e-8));
    }
    // p1 increasing on its domain
    double prev = -1.0;
    for (int i = 0; i <= 20; ++i) {
        auto p = rule.price(i / 20.0);
        REQUIRE(p.has_value());
        CHECK(*p > prev);
        prev = *p;
    }

    CHECK(solve_epo(u, u, 0.0).profit == near(0.0));

    // linear in delta
    double base = solve_epo(u, u, 1.0).profit;
    for (double d : {0.1, 0.3, 0.7, 0.9})
        CHECK(solve_epo(u, u, d).profit == near(d * base, 1e-10));
    double base2 = solve_epo(power(2), uniform(), 1.0).profit;
    CHECK(solve_epo(power(2), uniform(), 0.4).profit ==
          near(0.4 * base2, 1e-10));
}

TEST_CASE("solve_eao") {
    auto u = uniform();
    auto s = solve_eao(u, u);
    CHECK(*s.price0 == near(2.0 / 3.0, 1e-8));
    CHECK(s.profit == near(2.0 / 27.0, 1e-9));

    // cost mass near 1 shrinks the option value pointwise, hence the profit
    auto shifted = solve_eao(uniform(), power(8));
    CHECK(shifted.profit < s.profit);
    for (int i = 1; i < 20; ++i) {
        double p = i / 20.0;
        CHECK(power(8).left_integral(p) <= uniform().left_integral(p));
    }

    auto s2 = solve_eao(power(2), uniform());
    auto [bp, bv] =
        mc::brute_force_price(power(2), uniform(), MechanismKind::EAO, 10000);
    CHECK(*s2.price0 == near(bp, 1e-4));
}

TEST_CASE("theta_star_star") {
    auto u = uniform();
    CHECK(theta_star_star(u, 1.0) == near(0.5, 1e-9));
    CHECK(theta_star_star(u, 0.8) == near(0.4, 1e-9));
    CHECK(theta_star_star(u, 0.1) == near(0.05, 1e-9));
    CHECK(u.virtual_valuation(theta_star_star(u, 0.7), 0.7) ==
          near(0.0, 1e-9));
}

TEST_CASE("coasian_p0") {
    auto u = uniform();
    CHECK(coasian_p0(u, u, 0.8, 0.5) == near(0.72, 1e-8));
    CHECK(coasian_p0(u, u, 0.63, 0.0) == near(0.63, 1e-12));
    double tb = 0.929884;
    CHECK(coasian_p0(u, u, tb, 0.9) ==
          near(tb - 0.9 * tb * tb / 4.0, 1e-8));
}

TEST_CASE("dynamic_profit") {
    auto u = uniform();
    auto closed = [](double tb, double d) {
        return (1.0 - tb) * (tb - d * tb * tb / 4.0 - 0.5) +
               d * tb * tb * tb / 12.0;
    };
    CHECK(dynamic_profit(u, u, 0.929884, 0.9) ==
          near(closed(0.929884, 0.9), 1e-8));
    CHECK(dynamic_profit(u, u, 0.929884, 0.9) == near(0.076800, 1e-5));
    // theta_bar = 1 recovers the ex-post-optimal profit
    CHECK(dynamic_profit(u, u, 1.0, 0.7) ==
          near(solve_epo(u, u, 0.7).profit, 1e-9));
    // delta = 0 recovers the fixed-price profit at the same cutoff
    CHECK(dynamic_profit(u, u, 0.8, 0.0) ==
          near(eafp_profit_at(u, u, 0.8), 1e-10));
}

TEST_CASE("solve_dynamic") {
    auto u = uniform();
    auto s = solve_dynamic(u, u, 0.9);
    CHECK(*s.theta_bar == near(theta_bar_closed(0.9), 1e-6));
    CHECK(*s.price0 ==
          near(*s.theta_bar - 0.9 * *s.theta_bar * *s.theta_bar / 4.0, 1e-8));
    CHECK(s.profit == near(0.076800, 1e-5));
    CHECK(s.profit > 2.0 / 27.0);

    CHECK(*solve_dynamic(u, u, 0.999).theta_bar > 0.99);
    CHECK(*solve_dynamic(u, u, 0.0001).theta_bar ==
          near(theta_bar_closed(0.0001), 1e-5));
    CHECK(theta_bar_closed(0.0001) == near(0.75, 1e-3));
}

TEST_CASE("phi_cap decomposition") {
    auto u = uniform();
    // Pi^D(x, delta) = Pi^EAFP(x) + delta * Phi(x)
    CHECK(dynamic_profit(u, u, 0.8, 0.5) -
              eafp_profit_at(u, u, 0.8) - 0.5 * phi_cap(u, u, 0.8) ==
          near(0.0, 1e-8));
    // at x = 1 the identity forces Phi(1) = pi^EPO(1) = 1/12 for uniform laws
    CHECK(phi_cap(u, u, 1.0) == near(1.0 / 12.0, 1e-8));
    CHECK(phi_cap(u, u, 1e-6) == near(0.0, 1e-8));

    std::uint64_t st = 12345;
    for (int trial = 0; trial < 100; ++trial) {
        double x = 0.05 + 0.95 * unit(splitmix(st));
        double d = unit(splitmix(st));
        for (const auto& F : {uniform(), power(2)}) {
            double lhs = dynamic_profit(F, u, x, d);
            double rhs = eafp_profit_at(F, u, x) + d * phi_cap(F, u, x);
            CHECK(lhs == near(rhs, 1e-8));
        }
    }
}

TEST_CASE("regime thresholds uniform") {
    auto u = uniform();
    auto t = regime_thresholds(u, u);
    CHECK(t.delta_star == near(0.75, 1e-8));
    CHECK(t.delta_bar == near(8.0 / 9.0, 1e-8));
    double exact = (260.0 - 8.0 * std::sqrt(10.0)) / 279.0;
    CHECK(t.delta_double_star == near(exact, 1e-5));
    CHECK(t.delta_star < t.delta_bar);
    CHECK(t.delta_double_star < t.delta_bar);
}

TEST_CASE("regime thresholds power(2)") {
    auto F = power(2);
    auto G = uniform();
    auto t = regime_thresholds(F, G);
    CHECK(t.delta_star > 0.0);
    CHECK(t.delta_bar < 1.0);
    CHECK(t.delta_star < t.delta_bar);
    CHECK(t.delta_double_star < t.delta_bar);

    // single crossing of pi^D(delta) - pi^EAO on a delta grid
    double pi_eao = solve_eao(F, G).profit;
    int flips = 0;
    double prev = solve_dynamic(F, G, 0.005).profit - pi_eao;
    for (int i = 1; i < 200; ++i) {
        double d = 0.005 + (0.99 - 0.005) * i / 199.0;
        double cur = solve_dynamic(F, G, d).profit - pi_eao;
        if ((prev > 0.0) != (cur > 0.0)) ++flips;
        prev = cur;
    }
    CHECK(flips == 1);
}

TEST_CASE("compare") {
    auto u = uniform();
    CHECK(compare(u, u, 0.9).best == MechanismKind::Dynamic);
    CHECK(compare(u, u, 0.5).best == MechanismKind::EAO);
    double dss = regime_thresholds(u, u).delta_double_star;
    CHECK(compare(u, u, dss - 1e-6).best == MechanismKind::EAO);
    CHECK(compare(u, u, dss + 1e-6).best == MechanismKind::Dynamic);
}

TEST_CASE("profit and price orderings") {
    std::vector<std::pair<Distribution, Distribution>> cases;
    cases.emplace_back(uniform(), uniform());
    cases.emplace_back(power(2), uniform());
    cases.emplace_back(power(3), uniform());
    cases.emplace_back(tab_convex(), tab_convex());
    for (const auto& [F, G] : cases) {
        auto eafp = solve_eafp(F, G);
        auto eao = solve_eao(F, G);
        CHECK(eao.profit - eafp.profit > 1e-9);
        CHECK(*eafp.price0 - *eao.price0 > 1e-9);
        for (int i = 1; i <= 9; ++i) {
            double d = i / 10.0;
            CHECK(solve_dynamic(F, G, d).profit -
                      solve_epo(F, G, d).profit > 1e-9);
        }
    }
}

TEST_CASE("dynamic threshold behavior (uniform)") {
    auto u = uniform();
    // maximizer increasing in delta, above the EAFP price; p0 strictly below
    double prev_tb = 0.0;
    for (int i = 1; i <= 50; ++i) {
        double d = i / 51.0;
        auto s = solve_dynamic(u, u, d);
        CHECK(*s.theta_bar > prev_tb);
        CHECK(*s.theta_bar > 0.75);
        CHECK(*s.price0 < *s.theta_bar);
        prev_tb = *s.theta_bar;
    }
    // pi^D approaches pi^EPO as delta -> 1
    double gap = solve_dynamic(u, u, 0.9999).profit -
                 solve_epo(u, u, 0.9999).profit;
    CHECK(gap > 0.0);
    CHECK(gap < 1e-3);
}

TEST_CASE("no profitable deviation from time-0 acceptance") {
    auto u = uniform();
    auto s = solve_dynamic(u, u, 0.85);
    auto rule = ex_post_rule(u, s);
    double tb = *s.theta_bar, p0 = *s.price0, delta = 0.85;
    for (int i = 0; i < 20; ++i) {
        double theta = tb + (1.0 - tb) * i / 19.0;
        double wait =
            delta *
            num::integrate(
                [&](double w) {
                    auto p1 = rule.price(w);
                    return p1 ? std::max(theta - *p1, 0.0) : 0.0;
                },
                0.0, tb, 1e-11)
                .value;
        CHECK(theta - p0 >= wait - 1e-8);
        if (i == 0) CHECK(theta - p0 == near(wait, 1e-7));
    }
}
