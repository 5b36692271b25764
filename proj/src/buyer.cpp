#include "mechlab/buyer.hpp"

#include <cmath>

#include "mechlab/numerics.hpp"

namespace mechlab::buyer {

namespace {

double cube(double x) { return x * x * x; }

}  // namespace

double dynamic_utility(double omega_bar, double delta) {
    double w = omega_bar;
    return w * (0.5 - w - 0.25 * delta * (1.0 - w) * (1.0 - w)) +
           delta * cube(1.0 - w) / 12.0;
}

double omega_bar_closed_form(double delta) {
    return (3.0 * delta - 4.0 +
            std::sqrt(16.0 - 16.0 * delta + delta * delta)) /
           (4.0 * delta);
}

double dynamic_p0(double omega_bar, double delta) {
    return omega_bar + 0.25 * delta * (1.0 - omega_bar) * (1.0 - omega_bar);
}

BuyerSolution solve_buyer(MechanismKind kind, double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::domain_error("solve_buyer: delta outside (0,1)");
    BuyerSolution s;
    s.kind = kind;
    switch (kind) {
        case MechanismKind::EAFP: {
            // committed posted price, sellers with cost below P accept
            auto m = num::maximize_1d([](double p) { return (0.5 - p) * p; },
                                      0.0, 1.0);
            s.price = m.argmax;
            s.utility = m.value;
            break;
        }
        case MechanismKind::EPO: {
            // wait, learn theta, post P(theta) = theta/2
            s.delta = delta;
            s.utility =
                delta *
                num::integrate([](double t) { return 0.25 * t * t; }, 0.0, 1.0,
                               1e-12)
                    .value;
            break;
        }
        case MechanismKind::EAO: {
            auto m = num::maximize_1d(
                [](double p) { return 0.5 * p * (1.0 - p) * (1.0 - p); }, 0.0,
                1.0);
            s.price = m.argmax;
            s.utility = m.value;
            break;
        }
        case MechanismKind::Dynamic: {
            auto m = num::maximize_1d(
                [&](double w) { return dynamic_utility(w, delta); }, 0.0, 1.0);
            s.omega_bar = m.argmax;
            s.price = dynamic_p0(m.argmax, delta);
            s.utility = m.value;
            s.delta = delta;
            break;
        }
    }
    return s;
}

BuyerSolution solve_buyer(const Distribution& F, const Distribution& G,
                          MechanismKind kind, double delta) {
    if (!F.is_uniform() || !G.is_uniform())
        throw unsupported_error(
            "solve_buyer: only uniform distributions are supported");
    return solve_buyer(kind, delta);
}

}  // namespace mechlab::buyer
