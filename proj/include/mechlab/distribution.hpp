#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "mechlab/errors.hpp"

namespace mechlab {

enum class Family { Uniform, Power, Tabulated };

// Specification of a value/cost law on [0,1]:
//   uniform           cdf(x) = x
//   power(k), k > 0   cdf(x) = x^k
//   tabulated         strictly increasing cdf samples on a uniform x-grid
struct DistributionSpec {
    Family family = Family::Uniform;
    double k = 1.0;
    std::vector<double> cdf_grid;

    static DistributionSpec uniform() { return {}; }
    static DistributionSpec power(double k) {
        DistributionSpec s;
        s.family = Family::Power;
        s.k = k;
        return s;
    }
    static DistributionSpec tabulated(std::vector<double> cdf) {
        DistributionSpec s;
        s.family = Family::Tabulated;
        s.cdf_grid = std::move(cdf);
        return s;
    }
};

// Immutable distribution on [0,1] with the derived quantities the solvers
// need: cdf, density, quantile, left integral of the cdf, truncated means,
// virtual valuation and virtual cost.
class Distribution {
public:
    explicit Distribution(DistributionSpec spec);

    double cdf(double x) const;
    double pdf(double x) const;
    double quantile(double u) const;

    // Integral of the cdf from 0 to x; convex, increasing, 0 at 0.
    double left_integral(double x) const;

    double mean() const { return mean_; }

    // E[omega | omega < x] = x - leftIntegral(x)/cdf(x); requires cdf(x) > 0.
    double truncated_mean_below(double x) const;

    // theta - (F(theta_bar) - F(theta)) / f(theta)
    double virtual_valuation(double theta, double theta_bar) const;
    // Non-throwing variant: -inf where the density vanishes below theta_bar.
    double virtual_valuation_safe(double theta, double theta_bar) const;

    // omega + G(omega)/g(omega)
    double virtual_cost(double omega) const;

    struct RegularityReport {
        bool regular = true;
        double violation_lo = std::numeric_limits<double>::quiet_NaN();
        double violation_hi = std::numeric_limits<double>::quiet_NaN();
    };
    // Checks strict increase of the untruncated virtual valuation on an
    // n-point uniform grid (strictness tolerance 1e-12).
    RegularityReport check_regular(int n) const;

    bool is_uniform() const;
    const DistributionSpec& spec() const { return spec_; }

private:
    DistributionSpec spec_;
    double mean_ = 0.5;
    // Tabulated data: knot cdf values, per-segment slopes, prefix integrals.
    std::vector<double> slopes_;
    std::vector<double> gcal_knots_;
};

}  // namespace mechlab
