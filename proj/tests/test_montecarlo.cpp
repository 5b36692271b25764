#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "testutil.hpp"

#include <cmath>

#include "mechlab/buyer.hpp"
#include "mechlab/mechanisms.hpp"
#include "mechlab/montecarlo.hpp"

using namespace mechlab;

namespace {

Distribution uniform() { return Distribution(DistributionSpec::uniform()); }
Distribution power(double k) {
    return Distribution(DistributionSpec::power(k));
}

constexpr long long kN = 1000000;

void check_within_3se(double simulated, double analytic, double se) {
    CHECK(std::abs(simulated - analytic) <= 3.0 * std::max(se, 1e-12));
}

}  // namespace

TEST_CASE("outcome rules") {
    auto u = uniform();
    auto eao = solve_eao(u, u);
    auto rule = mc::build_rule(eao, u, u);
    auto a = rule.eval(0.8, 0.5);
    CHECK(a.traded);
    CHECK(a.stage == mc::Stage::T0);
    CHECK(a.transfer == near(2.0 / 3.0, 1e-6));
    auto b = rule.eval(0.8, 0.9);
    CHECK_FALSE(b.traded);
    CHECK(b.canceled);
    CHECK(b.transfer == 0.0);
    auto c = rule.eval(0.5, 0.1);
    CHECK_FALSE(c.traded);
    CHECK_FALSE(c.canceled);

    // EAFP has specific performance: delivery even at a loss
    auto eafp = solve_eafp(u, u);
    auto frule = mc::build_rule(eafp, u, u);
    auto d = frule.eval(0.8, 0.99);
    CHECK(d.traded);
    CHECK(d.transfer == near(0.75, 1e-6));

    auto dyn = solve_dynamic(u, u, 0.9);
    auto drule = mc::build_rule(dyn, u, u);
    auto e = drule.eval(0.95, 0.8);
    CHECK(e.traded);
    CHECK(e.stage == mc::Stage::T0);
    CHECK(e.transfer == near(*dyn.price0, 1e-6));
    CHECK(e.transfer == near(0.7353, 1e-3));
}

TEST_CASE("simulate basics") {
    auto u = uniform();
    auto eafp = solve_eafp(u, u);
    auto est = mc::simulate(mc::build_rule(eafp, u, u), u, u, 1.0, kN, 42);
    check_within_3se(est.profit_mean, 0.0625, est.profit_se);
    CHECK(est.trade_prob == near(0.25, 0.005));

    auto epo = solve_epo(u, u, 0.6);
    auto est2 = mc::simulate(mc::build_rule(epo, u, u), u, u, 0.6, kN, 42);
    check_within_3se(est2.profit_mean, 0.05, est2.profit_se);

    mc::OutcomeRule never{[](double, double) { return mc::Outcome{}; }};
    auto est3 = mc::simulate(never, u, u, 0.5, 10000, 7);
    CHECK(est3.profit_mean == 0.0);
    CHECK(est3.profit_se == 0.0);
    CHECK(est3.trade_prob == 0.0);
}

TEST_CASE("simulate determinism") {
    auto u = uniform();
    auto rule = mc::build_rule(solve_eao(u, u), u, u);
    auto a = mc::simulate(rule, u, u, 0.5, 50000, 99);
    auto b = mc::simulate(rule, u, u, 0.5, 50000, 99);
    CHECK(a.profit_mean == b.profit_mean);
    CHECK(a.profit_se == b.profit_se);
    CHECK(a.trade_prob == b.trade_prob);
    auto c = mc::simulate(rule, u, u, 0.5, 50000, 100);
    CHECK(a.profit_mean != c.profit_mean);
}

TEST_CASE("all mechanisms agree with analytic profits") {
    for (const auto& F : {uniform(), power(2)}) {
        auto G = uniform();
        for (double d : {0.5, 0.9}) {
            auto eafp = solve_eafp(F, G);
            auto est = mc::simulate(mc::build_rule(eafp, F, G), F, G, d, kN, 42);
            check_within_3se(est.profit_mean, eafp.profit, est.profit_se);

            auto eao = solve_eao(F, G);
            est = mc::simulate(mc::build_rule(eao, F, G), F, G, d, kN, 42);
            check_within_3se(est.profit_mean, eao.profit, est.profit_se);

            auto epo = solve_epo(F, G, d);
            est = mc::simulate(mc::build_rule(epo, F, G), F, G, d, kN, 42);
            check_within_3se(est.profit_mean, epo.profit, est.profit_se);

            auto dyn = solve_dynamic(F, G, d);
            est = mc::simulate(mc::build_rule(dyn, F, G), F, G, d, kN, 42);
            check_within_3se(est.profit_mean, dyn.profit, est.profit_se);
        }
    }
}

TEST_CASE("buyer-side simulation matches utilities") {
    auto u = uniform();
    for (double d : {0.5, 0.9}) {
        for (auto kind : {MechanismKind::EAFP, MechanismKind::EPO,
                          MechanismKind::EAO, MechanismKind::Dynamic}) {
            auto s = buyer::solve_buyer(kind, d);
            auto est =
                mc::simulate(mc::build_buyer_rule(s), u, u, d, kN, 42);
            check_within_3se(est.buyer_surplus_mean, s.utility,
                             est.buyer_surplus_se);
        }
    }
}

TEST_CASE("simulation-level invariants") {
    auto u = uniform();
    auto eao = solve_eao(u, u);
    auto rule = mc::build_rule(eao, u, u);
    double p = *eao.price0;
    // IR at the buyer's acceptance and the at-will clause, draw by draw
    std::uint64_t state = 2024;
    auto next = [&]() {
        state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return ((z ^ (z >> 31)) >> 11) * 0x1.0p-53;
    };
    for (int i = 0; i < 20000; ++i) {
        double theta = next(), omega = next();
        auto out = rule.eval(theta, omega);
        if (out.traded) {
            CHECK(theta - out.transfer >= -1e-12);
            CHECK(omega <= p);
        }
    }
    auto dyn = solve_dynamic(u, u, 0.8);
    auto drule = mc::build_rule(dyn, u, u);
    for (int i = 0; i < 20000; ++i) {
        double theta = next(), omega = next();
        auto out = drule.eval(theta, omega);
        if (out.traded) CHECK(theta - out.transfer >= -1e-12);
    }
}

TEST_CASE("brute-force price oracle") {
    auto u = uniform();
    auto [p1, v1] = mc::brute_force_price(u, u, MechanismKind::EAFP, 10000);
    CHECK(p1 == near(0.75, 1e-4));
    CHECK(v1 == near(0.0625, 1e-6));
    auto [p2, v2] = mc::brute_force_price(u, u, MechanismKind::EAO, 10000);
    CHECK(p2 == near(2.0 / 3.0, 1e-4));
    CHECK(v2 == near(2.0 / 27.0, 1e-6));

    auto s = solve_eao(power(2), u);
    auto [p3, v3] =
        mc::brute_force_price(power(2), u, MechanismKind::EAO, 10000);
    CHECK(p3 == near(*s.price0, 1.0 / 9999.0 + 1e-9));

    CHECK_THROWS_AS(
        mc::brute_force_price(u, u, MechanismKind::EPO, 1000),
        unsupported_error);
    CHECK_THROWS_AS(mc::brute_force_price(u, u, MechanismKind::EAFP, 10),
                    std::domain_error);
}
