// mechlab: solvers for delayed-cost bilateral trade mechanisms.
//
// Subcommands: solve, thresholds, compare, figure (alias: sweep), simulate.
// Configuration comes from an optional JSON file plus command-line flags;
// flags win. Exit codes: 0 ok, 2 config error, 3 unsupported combination,
// 4 numeric failure, 5 I/O failure.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mechlab/atwill.hpp"
#include "mechlab/buyer.hpp"
#include "mechlab/distribution.hpp"
#include "mechlab/mechanisms.hpp"
#include "mechlab/montecarlo.hpp"

using nlohmann::json;
using namespace mechlab;

namespace {

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

bool log_enabled() {
    const char* v = std::getenv("MECHLAB_LOG");
    return v != nullptr && *v != '\0' && std::string(v) != "0";
}

void log_info(const std::string& msg) {
    if (log_enabled()) std::cerr << "[mechlab] " << msg << "\n";
}

struct DeltaGrid {
    double min = 0.01;
    double max = 0.99;
    int steps = 99;
};

struct RunConfig {
    DistributionSpec F = DistributionSpec::uniform();
    DistributionSpec G = DistributionSpec::uniform();
    std::optional<double> delta;
    std::optional<DeltaGrid> delta_grid;
    std::string side = "seller";
    std::uint64_t seed = 42;
    long long n_sim = 1000000;
};

DistributionSpec spec_from_json(const json& j) {
    if (!j.is_object() || !j.contains("family"))
        throw config_error("distribution spec needs a \"family\" field");
    std::string fam = j.at("family").get<std::string>();
    if (fam == "uniform") return DistributionSpec::uniform();
    if (fam == "power") {
        if (!j.contains("k")) throw config_error("power family needs \"k\"");
        return DistributionSpec::power(j.at("k").get<double>());
    }
    if (fam == "tabulated") {
        if (!j.contains("cdf"))
            throw config_error("tabulated family needs \"cdf\"");
        return DistributionSpec::tabulated(
            j.at("cdf").get<std::vector<double>>());
    }
    throw config_error("unknown distribution family: " + fam);
}

json spec_to_json(const DistributionSpec& s) {
    switch (s.family) {
        case Family::Uniform: return {{"family", "uniform"}};
        case Family::Power: return {{"family", "power"}, {"k", s.k}};
        case Family::Tabulated:
            return {{"family", "tabulated"}, {"cdf", s.cdf_grid}};
    }
    return {};
}

RunConfig load_config(const std::string& path) {
    RunConfig cfg;
    if (path.empty()) return cfg;
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw config_error(std::string("config parse error: ") + e.what());
    }
    if (j.contains("F")) cfg.F = spec_from_json(j.at("F"));
    if (j.contains("G")) cfg.G = spec_from_json(j.at("G"));
    if (j.contains("delta")) cfg.delta = j.at("delta").get<double>();
    if (j.contains("delta_grid")) {
        const auto& g = j.at("delta_grid");
        DeltaGrid grid;
        grid.min = g.at("min").get<double>();
        grid.max = g.at("max").get<double>();
        grid.steps = g.at("steps").get<int>();
        cfg.delta_grid = grid;
    }
    if (j.contains("side")) cfg.side = j.at("side").get<std::string>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("n_sim")) cfg.n_sim = j.at("n_sim").get<long long>();
    return cfg;
}

json config_to_json(const RunConfig& cfg) {
    json j;
    j["F"] = spec_to_json(cfg.F);
    j["G"] = spec_to_json(cfg.G);
    if (cfg.delta) j["delta"] = *cfg.delta;
    if (cfg.delta_grid)
        j["delta_grid"] = {{"min", cfg.delta_grid->min},
                           {"max", cfg.delta_grid->max},
                           {"steps", cfg.delta_grid->steps}};
    j["side"] = cfg.side;
    j["seed"] = cfg.seed;
    j["n_sim"] = cfg.n_sim;
    return j;
}

void validate(const RunConfig& cfg) {
    if (cfg.side != "seller" && cfg.side != "buyer")
        throw config_error("side must be seller or buyer");
    if (cfg.delta && !(*cfg.delta >= 0.0 && *cfg.delta <= 1.0))
        throw config_error("delta must lie in [0,1]");
    if (cfg.delta_grid) {
        const auto& g = *cfg.delta_grid;
        if (!(g.min < g.max) || !(g.min > 0.0) || !(g.max < 1.0))
            throw config_error("delta grid must satisfy 0 < min < max < 1");
        if (g.steps < 2) throw config_error("delta grid needs >= 2 steps");
    }
}

DeltaGrid parse_grid(const std::string& s) {
    DeltaGrid g;
    char colon1 = 0, colon2 = 0;
    std::istringstream in(s);
    if (!(in >> g.min >> colon1 >> g.max >> colon2 >> g.steps) ||
        colon1 != ':' || colon2 != ':')
        throw config_error("--delta-grid expects min:max:steps");
    return g;
}

double require_delta(const RunConfig& cfg) {
    if (!cfg.delta) throw config_error("this command requires --delta");
    return *cfg.delta;
}

void write_output(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        if (!std::cout) throw io_error("failed writing to stdout");
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw io_error("cannot open output file: " + out_path);
    out << text;
    if (!out) throw io_error("failed writing output file: " + out_path);
}

std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

json solution_to_json(const MechanismSolution& s) {
    json j;
    j["side"] = "seller";
    j["kind"] = to_string(s.kind);
    j["price0"] = s.price0 ? json(*s.price0) : json(nullptr);
    j["theta_bar"] = s.theta_bar ? json(*s.theta_bar) : json(nullptr);
    j["theta_star"] = s.theta_star ? json(*s.theta_star) : json(nullptr);
    j["profit"] = s.profit;
    j["delta"] = s.delta ? json(*s.delta) : json(nullptr);
    return j;
}

json buyer_solution_to_json(const buyer::BuyerSolution& s) {
    json j;
    j["side"] = "buyer";
    j["kind"] = to_string(s.kind);
    j["price0"] = s.price ? json(*s.price) : json(nullptr);
    j["omega_bar"] = s.omega_bar ? json(*s.omega_bar) : json(nullptr);
    j["profit"] = s.utility;
    j["delta"] = s.delta ? json(*s.delta) : json(nullptr);
    return j;
}

int cmd_solve(const RunConfig& cfg, const std::string& mech,
              const std::string& out_path) {
    Distribution F(cfg.F), G(cfg.G);
    json j;
    if (cfg.side == "buyer") {
        if (mech == "d1" || mech == "d2")
            throw unsupported_error("buyer-side D1/D2 are not supported");
        auto kind = mechanism_kind_from_string(mech);
        double delta = (kind == MechanismKind::EAFP || kind == MechanismKind::EAO)
                           ? cfg.delta.value_or(0.5)
                           : require_delta(cfg);
        j = buyer_solution_to_json(buyer::solve_buyer(F, G, kind, delta));
    } else if (mech == "d1") {
        auto s = atwill::solve_d1(F, G, require_delta(cfg));
        j = {{"side", "seller"},          {"kind", "D1"},
             {"price0", s.p0},            {"theta_bar", s.theta_bar},
             {"profit", s.profit},        {"delta", require_delta(cfg)},
             {"epo_equivalent", s.epo_equivalent}};
    } else if (mech == "d2") {
        auto s = atwill::solve_d2(F, G, require_delta(cfg));
        j = {{"side", "seller"},
             {"kind", "D2"},
             {"profit", s.profit},
             {"delta", require_delta(cfg)},
             {"epo_equivalent", s.epo_equivalent}};
        if (!s.epo_equivalent) {
            j["price0"] = s.p0;
            j["theta_bar"] = s.theta_bar;
            j["omega_bar"] = s.omega_bar;
        }
    } else {
        auto kind = mechanism_kind_from_string(mech);
        MechanismSolution s;
        switch (kind) {
            case MechanismKind::EAFP: s = solve_eafp(F, G); break;
            case MechanismKind::EAO: s = solve_eao(F, G); break;
            case MechanismKind::EPO: s = solve_epo(F, G, require_delta(cfg)); break;
            case MechanismKind::Dynamic:
                s = solve_dynamic(F, G, require_delta(cfg));
                break;
        }
        j = solution_to_json(s);
    }
    write_output(out_path, j.dump(2) + "\n");
    return 0;
}

int cmd_thresholds(const RunConfig& cfg, const std::string& out_path) {
    Distribution F(cfg.F), G(cfg.G);
    auto t = regime_thresholds(F, G);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "{\n  \"delta_star\": %.6f,\n  \"delta_bar\": %.6f,\n"
                  "  \"delta_double_star\": %.6f\n}\n",
                  t.delta_star, t.delta_bar, t.delta_double_star);
    write_output(out_path, buf);
    return 0;
}

int cmd_compare(const RunConfig& cfg, const std::string& out_path) {
    Distribution F(cfg.F), G(cfg.G);
    auto r = compare(F, G, require_delta(cfg));
    json j = {{"delta", require_delta(cfg)}, {"pi_eafp", r.pi_eafp},
              {"pi_epo", r.pi_epo},          {"pi_eao", r.pi_eao},
              {"pi_d", r.pi_d},              {"best", to_string(r.best)}};
    write_output(out_path, j.dump(2) + "\n");
    return 0;
}

int cmd_figure(const RunConfig& cfg, const std::string& which,
               const std::string& out_path) {
    if (which != "prices" && which != "profits" && which != "appendix-c")
        throw config_error("figure kind must be prices, profits or appendix-c");
    Distribution F(cfg.F), G(cfg.G);
    if (which == "appendix-c" && (!F.is_uniform() || !G.is_uniform()))
        throw unsupported_error("appendix-c sweep requires uniform F and G");
    DeltaGrid grid = cfg.delta_grid.value_or(DeltaGrid{});

    auto eafp = solve_eafp(F, G);
    auto eao = solve_eao(F, G);
    double epo_base = solve_epo(F, G, 1.0).profit;

    std::ostringstream csv;
    if (which == "prices")
        csv << "delta,p_eafp,p_eao,p0_d,theta_bar_d\n";
    else if (which == "profits")
        csv << "delta,pi_eafp,pi_epo,pi_eao,pi_d\n";
    else
        csv << "delta,pi_eao,pi_epo,pi_d,pi_d1,pi_d2\n";

    for (int i = 0; i < grid.steps; ++i) {
        double delta =
            grid.min + (grid.max - grid.min) * i /
                           static_cast<double>(grid.steps - 1);
        log_info("sweep delta=" + fmt9(delta));
        auto d = solve_dynamic(F, G, delta);
        csv << fmt9(delta) << ',';
        if (which == "prices") {
            csv << fmt9(*eafp.price0) << ',' << fmt9(*eao.price0) << ','
                << fmt9(*d.price0) << ',' << fmt9(*d.theta_bar) << '\n';
        } else if (which == "profits") {
            csv << fmt9(eafp.profit) << ',' << fmt9(delta * epo_base) << ','
                << fmt9(eao.profit) << ',' << fmt9(d.profit) << '\n';
        } else {
            auto d1 = atwill::solve_d1(delta);
            auto d2 = atwill::solve_d2(delta);
            csv << fmt9(eao.profit) << ',' << fmt9(delta * epo_base) << ','
                << fmt9(d.profit) << ',' << fmt9(d1.profit) << ','
                << fmt9(d2.profit) << '\n';
        }
    }
    write_output(out_path, csv.str());
    return 0;
}

int cmd_simulate(const RunConfig& cfg, const std::string& mech,
                 const std::string& out_path) {
    Distribution F(cfg.F), G(cfg.G);
    auto kind = mechanism_kind_from_string(mech);
    bool needs_delta =
        (kind == MechanismKind::EPO || kind == MechanismKind::Dynamic);
    double delta = needs_delta ? require_delta(cfg) : cfg.delta.value_or(1.0);

    mc::OutcomeRule rule;
    double analytic = 0.0, observed = 0.0;
    mc::SimEstimate est;
    if (cfg.side == "buyer") {
        auto s = buyer::solve_buyer(F, G, kind, needs_delta ? delta : 0.5);
        rule = mc::build_buyer_rule(s);
        est = mc::simulate(rule, F, G, delta, cfg.n_sim, cfg.seed);
        analytic = s.utility;
        observed = est.buyer_surplus_mean;
    } else {
        MechanismSolution s;
        switch (kind) {
            case MechanismKind::EAFP: s = solve_eafp(F, G); break;
            case MechanismKind::EAO: s = solve_eao(F, G); break;
            case MechanismKind::EPO: s = solve_epo(F, G, delta); break;
            case MechanismKind::Dynamic: s = solve_dynamic(F, G, delta); break;
        }
        rule = mc::build_rule(s, F, G);
        est = mc::simulate(rule, F, G, delta, cfg.n_sim, cfg.seed);
        analytic = s.profit;
        observed = est.profit_mean;
    }
    double se = (cfg.side == "buyer") ? est.buyer_surplus_se : est.profit_se;
    bool pass = std::abs(observed - analytic) <= 3.0 * se;
    json j = {{"side", cfg.side},
              {"mechanism", to_string(kind)},
              {"n", est.n},
              {"seed", est.seed},
              {"profit_mean", est.profit_mean},
              {"profit_se", est.profit_se},
              {"buyer_surplus_mean", est.buyer_surplus_mean},
              {"buyer_surplus_se", est.buyer_surplus_se},
              {"trade_prob", est.trade_prob},
              {"analytic", analytic},
              {"pass_3sigma", pass}};
    write_output(out_path, j.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Solvers for delayed-cost bilateral trade mechanisms"};
    app.require_subcommand(1);

    std::string config_path, mech, side, grid_str, out_path, which;
    std::optional<double> delta_flag;
    std::optional<long long> n_flag;
    std::optional<std::uint64_t> seed_flag;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON run configuration");
        cmd->add_option("--delta", delta_flag, "discount factor");
        cmd->add_option("--side", side, "seller|buyer");
        cmd->add_option("--out", out_path, "output path (default stdout)");
    };

    auto* solve = app.add_subcommand("solve", "solve one mechanism");
    add_common(solve);
    solve->add_option("--mech", mech, "eafp|epo|eao|d|d1|d2")->required();

    auto* thresholds =
        app.add_subcommand("thresholds", "critical discount factors");
    add_common(thresholds);

    auto* comparec = app.add_subcommand("compare", "profits of all mechanisms");
    add_common(comparec);

    auto* figure = app.add_subcommand("figure", "CSV sweep over delta");
    add_common(figure);
    figure->add_option("which", which, "prices|profits|appendix-c")->required();
    figure->add_option("--delta-grid", grid_str, "min:max:steps");

    auto* sweep = app.add_subcommand("sweep", "alias for figure");
    add_common(sweep);
    sweep->add_option("which", which, "prices|profits|appendix-c")->required();
    sweep->add_option("--delta-grid", grid_str, "min:max:steps");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo check");
    add_common(simulate);
    simulate->add_option("--mech", mech, "eafp|epo|eao|d")->required();
    simulate->add_option("--n", n_flag, "number of draws");
    simulate->add_option("--seed", seed_flag, "RNG seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        RunConfig cfg = load_config(config_path);
        if (delta_flag) cfg.delta = *delta_flag;
        if (!side.empty()) cfg.side = side;
        if (!grid_str.empty()) cfg.delta_grid = parse_grid(grid_str);
        if (n_flag) cfg.n_sim = *n_flag;
        if (seed_flag) cfg.seed = *seed_flag;
        validate(cfg);
        log_info("config: " + config_to_json(cfg).dump());

        if (solve->parsed()) return cmd_solve(cfg, mech, out_path);
        if (thresholds->parsed()) return cmd_thresholds(cfg, out_path);
        if (comparec->parsed()) return cmd_compare(cfg, out_path);
        if (figure->parsed() || sweep->parsed())
            return cmd_figure(cfg, which, out_path);
        if (simulate->parsed()) return cmd_simulate(cfg, mech, out_path);
        return 2;
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const unsupported_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const numeric_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}
