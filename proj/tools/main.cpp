// gridhedge: batch frontend for the grid pricing engine.
//
// Exit codes: 0 success / no arbitrage, 1 input error, 2 numerical failure,
// 3 arbitrage found (or pricing requested on an arbitrageable market).

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "gridhedge/ftap.hpp"
#include "gridhedge/instance_gen.hpp"
#include "gridhedge/io.hpp"
#include "gridhedge/pathwise.hpp"
#include "gridhedge/superrep.hpp"

namespace gh = gridhedge;
using gh::io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitArbitrage = 3;

struct CommonOpts {
    std::string format = "text";
    double tol_feas = 1e-9;
    double tol_gap = 1e-7;
    std::uint64_t max_paths = gh::kDefaultMaxPaths;
    std::uint64_t seed = 20240915;
    std::string config_path;

    gh::lp::LpTolerances tolerances() const {
        gh::lp::LpTolerances tol;
        tol.feas = tol_feas;
        tol.gap = tol_gap;
        return tol;
    }
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--format", opts.format, "Report format: text or json")
        ->check(CLI::IsMember({"text", "json"}));
    cmd->add_option("--tol-feas", opts.tol_feas, "Feasibility tolerance (default 1e-9)");
    cmd->add_option("--tol-gap", opts.tol_gap, "Duality-gap tolerance (default 1e-7)");
    cmd->add_option("--max-paths", opts.max_paths,
                    "Cap on the number of enumerated paths (default 1e7)");
    cmd->add_option("--seed", opts.seed, "Seed for randomized suites");
    cmd->add_option("--config", opts.config_path,
                    "Optional JSON config file; explicit flags override it");
}

/// Config file values fill any option the user did not pass explicitly.
void apply_config(const CLI::App* cmd, CommonOpts& opts) {
    if (opts.config_path.empty()) return;
    std::ifstream in(opts.config_path);
    if (!in) throw gh::InvalidInstance("cannot open config file: " + opts.config_path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw gh::InvalidInstance("config file is not valid JSON: " + std::string(e.what()));
    }
    if (!j.is_object()) throw gh::InvalidInstance("config file must hold a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        if (key == "format") {
            if (cmd->count("--format") == 0) opts.format = it.value().get<std::string>();
        } else if (key == "tol_feas") {
            if (cmd->count("--tol-feas") == 0) opts.tol_feas = it.value().get<double>();
        } else if (key == "tol_gap") {
            if (cmd->count("--tol-gap") == 0) opts.tol_gap = it.value().get<double>();
        } else if (key == "max_paths") {
            if (cmd->count("--max-paths") == 0) opts.max_paths = it.value().get<std::uint64_t>();
        } else if (key == "seed") {
            if (cmd->count("--seed") == 0) opts.seed = it.value().get<std::uint64_t>();
        } else {
            throw gh::InvalidInstance("config file: unknown field '" + key + "'");
        }
    }
    if (opts.tol_feas <= 0.0 || opts.tol_gap <= 0.0) {
        throw gh::InvalidInstance("tolerances must be positive");
    }
}

json payoff_argument(const std::string& arg) {
    std::string text = arg;
    if (!arg.empty() && arg[0] == '@') {
        std::ifstream in(arg.substr(1));
        if (!in) throw gh::InvalidInstance("cannot open payoff file: " + arg.substr(1));
        std::ostringstream os;
        os << in.rdbuf();
        text = os.str();
    }
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw gh::InvalidInstance("payoff is not valid JSON: " + std::string(e.what()));
    }
}

std::vector<double> parse_number_list(const std::string& csv, const char* what) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw gh::InvalidInstance(std::string("cannot parse ") + what + " entry: " + item);
        }
    }
    if (out.empty()) throw gh::InvalidInstance(std::string(what) + " list is empty");
    return out;
}

void emit(const json& report, const CommonOpts& opts, const std::string& text) {
    if (opts.format == "json") {
        std::cout << report.dump(2) << "\n";
    } else {
        std::cout << text;
    }
}

// ---------------------------------------------------------------------------

int cmd_check_arbitrage(const std::string& instance_path, const CommonOpts& opts) {
    const gh::io::Instance instance = gh::io::load_instance(instance_path);
    if (!instance.marginals.empty()) {
        throw gh::InvalidInstance("check-arbitrage expects an instance without marginals");
    }
    const gh::FtapVerdict verdict =
        gh::check(instance.model, instance.instruments, opts.tolerances(), opts.max_paths);
    json report = gh::io::verdict_to_json(verdict, instance.model);

    std::ostringstream text;
    if (verdict.feasible) {
        text << "no arbitrage: admissible martingale measure found\n"
             << "  independent recheck: max violation "
             << verdict.measure_report.max_violation() << "\n";
    } else {
        text << "model-independent arbitrage found\n"
             << "  certified minimal gain over all paths: " << verdict.certificate.min_gain
             << "\n  static positions: " << verdict.certificate.statics.size() << "\n";
    }
    emit(report, opts, text.str());
    return verdict.feasible ? kExitOk : kExitArbitrage;
}

int cmd_price(const std::string& instance_path, const std::string& payoff_arg,
              const std::string& strip_path, int strip_date, const CommonOpts& opts) {
    gh::io::Instance instance = gh::io::load_instance(instance_path);
    const gh::Payoff phi = gh::io::payoff_from_json(payoff_argument(payoff_arg));
    phi.validate(instance.model);

    if (!strip_path.empty()) {
        if (strip_date < 1) {
            throw gh::InvalidInstance("--strip requires --strip-date >= 1");
        }
        const gh::CallStrip strip = gh::io::load_strip_csv(strip_path, strip_date);
        instance.marginals.push_back(gh::calls_to_marginal(strip, instance.model));
    }

    const gh::PriceBounds bounds =
        gh::price_bounds_general(instance.model, instance.instruments, instance.marginals, phi,
                                 opts.tolerances(), opts.max_paths);
    json report = gh::io::bounds_to_json(bounds, instance.model);
    report["payoff"] = gh::io::payoff_to_json(phi);

    std::ostringstream text;
    text << "robust price bounds for " << phi.describe() << "\n"
         << "  upper " << bounds.upper.value << "  (gap " << bounds.upper.gap << ", hedge slack "
         << bounds.upper.hedge.slack_min << ")\n"
         << "  lower " << bounds.lower.value << "  (gap " << bounds.lower.gap << ", hedge slack "
         << bounds.lower.hedge.slack_min << ")\n";
    emit(report, opts, text.str());
    return kExitOk;
}

int cmd_doob(const std::string& levels_csv, int horizon, double entropy_price,
             const CommonOpts& opts) {
    const std::vector<double> levels = parse_number_list(levels_csv, "levels");
    gh::PathGridModel model(horizon, levels, 1.0);
    gh::DoobInstance instance(model, entropy_price);

    const gh::DoobReport pathwise = gh::doob_verify_all(instance, 1e-12, opts.max_paths);
    const gh::InstrumentSet instruments = gh::doob_instruments(model, entropy_price);
    const gh::PriceBounds bounds = gh::price_bounds(model, instruments, gh::Payoff::running_max(),
                                                    opts.tolerances(), opts.max_paths);
    const double analytic = gh::doob_constant() * (entropy_price + 1.0);
    const gh::InducedInequalityReport induced =
        gh::induced_martingale_inequality(model, bounds.upper.witness, 1e-8, opts.max_paths);

    json report;
    report["grid"] = levels;
    report["horizon"] = horizon;
    report["entropy_price"] = entropy_price;
    report["pathwise_min_slack"] = pathwise.min_slack;
    report["pathwise_argmin_path"] = pathwise.argmin_path;
    report["pathwise_pass"] = pathwise.pass;
    report["lp_bound"] = bounds.upper.value;
    report["analytic_bound"] = analytic;
    report["induced_lhs"] = induced.lhs;
    report["induced_rhs"] = induced.rhs;
    report["induced_gains_expectation"] = induced.gains_expectation;
    report["induced_holds"] = induced.holds;

    std::ostringstream text;
    text << "Doob L1 report (G=" << levels.size() << ", T=" << horizon << ", C=" << entropy_price
         << ")\n"
         << "  pathwise min slack   " << pathwise.min_slack << "  (argmin path";
    for (double v : pathwise.argmin_path) text << " " << v;
    text << ")\n"
         << "  lp bound             " << bounds.upper.value << "\n"
         << "  analytic bound       " << analytic << "\n"
         << "  induced inequality   E[max] = " << induced.lhs << "  <=  " << induced.rhs
         << "  (E[gains] = " << induced.gains_expectation << ")\n";
    emit(report, opts, text.str());

    const bool ok = pathwise.pass && bounds.upper.value <= analytic + opts.tol_gap &&
                    induced.holds;
    return ok ? kExitOk : kExitNumerical;
}

int cmd_bl_convert(const std::string& calls_path, int date, const std::string& marginal_path,
                   const std::string& levels_csv, const std::string& strikes_csv,
                   const CommonOpts& opts) {
    const bool from_calls = !calls_path.empty();
    const bool from_marginal = !marginal_path.empty();
    if (from_calls == from_marginal) {
        throw gh::InvalidInstance("bl-convert needs exactly one of --calls or --marginal");
    }
    const std::vector<double> levels = parse_number_list(levels_csv, "levels");

    if (from_calls) {
        if (date < 1) throw gh::InvalidInstance("--calls requires --date >= 1");
        gh::PathGridModel model(date, levels, levels.front());
        const gh::CallStrip strip = gh::io::load_strip_csv(calls_path, date);
        const gh::Marginal nu = gh::calls_to_marginal(strip, model);
        json report = gh::io::marginal_to_json(nu);
        std::ostringstream text;
        text << "recovered marginal at date " << date << ":";
        for (double m : nu.masses) text << " " << m;
        text << "\n";
        emit(report, opts, text.str());
        return kExitOk;
    }

    std::ifstream in(marginal_path);
    if (!in) throw gh::InvalidInstance("cannot open marginal file: " + marginal_path);
    json mj;
    try {
        in >> mj;
    } catch (const json::parse_error& e) {
        throw gh::InvalidInstance("marginal file is not valid JSON: " + std::string(e.what()));
    }
    const gh::Marginal nu = gh::io::marginal_from_json(mj);
    gh::PathGridModel model(std::max(nu.date, 1), levels, levels.front());
    std::vector<double> strikes = levels;
    if (!strikes_csv.empty()) strikes = parse_number_list(strikes_csv, "strikes");
    const gh::CallStrip strip = gh::marginal_to_calls(nu, model, strikes);
    if (opts.format == "json") {
        json report{{"date", strip.date}, {"strikes", strip.strikes}, {"prices", strip.prices}};
        std::cout << report.dump(2) << "\n";
    } else {
        gh::io::write_strip_csv(strip, std::cout);
    }
    return kExitOk;
}

int cmd_selftest(std::uint64_t count, const CommonOpts& opts) {
    gh::Rng rng(opts.seed);
    gh::GenOptions gen;
    gen.max_grid = 6;
    gen.max_horizon = 3;
    std::uint64_t feasible = 0, arbitrage = 0, priced = 0;
    double worst_violation = 0.0, worst_gap = 0.0, worst_slack = 0.0;

    for (std::uint64_t k = 0; k < count; ++k) {
        const gh::RandomInstance inst = gh::random_instance(rng, gen);
        const gh::FtapVerdict verdict =
            gh::check(inst.model, inst.instruments, opts.tolerances(), opts.max_paths);
        if (verdict.feasible) {
            ++feasible;
            worst_violation =
                std::max(worst_violation, verdict.measure_report.max_violation());
            const gh::Payoff phi = gh::random_payoff(rng, inst.model);
            const gh::PriceBounds bounds = gh::price_bounds(
                inst.model, inst.instruments, phi, opts.tolerances(), opts.max_paths);
            ++priced;
            worst_gap = std::max({worst_gap, bounds.upper.gap, bounds.lower.gap});
            worst_slack = std::min({worst_slack, bounds.upper.hedge.slack_min,
                                    bounds.lower.hedge.slack_min});
            if (bounds.lower.value > bounds.upper.value + opts.tol_gap) {
                std::cout << "FAIL: bound ordering violated on instance " << k << "\n";
                return kExitNumerical;
            }
        } else {
            ++arbitrage;
            if (inst.calibrated) {
                std::cout << "FAIL: calibrated instance " << k << " reported arbitrage\n";
                return kExitNumerical;
            }
            if (!(verdict.certificate.min_gain > opts.tol_feas)) {
                std::cout << "FAIL: uncertified arbitrage on instance " << k << "\n";
                return kExitNumerical;
            }
        }
    }
    json report{{"instances", count},
                {"feasible", feasible},
                {"arbitrage", arbitrage},
                {"priced", priced},
                {"worst_measure_violation", worst_violation},
                {"worst_duality_gap", worst_gap},
                {"worst_hedge_slack", worst_slack}};
    std::ostringstream text;
    text << "selftest: " << count << " instances, " << feasible << " feasible, " << arbitrage
         << " arbitrage\n"
         << "  worst measure violation " << worst_violation << "\n"
         << "  worst duality gap       " << worst_gap << "\n"
         << "  worst hedge slack       " << worst_slack << "\n"
         << "  all verdicts certified\n";
    emit(report, opts, text.str());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Model-free pricing and hedging on a finite price grid"};
    app.require_subcommand(1);

    CommonOpts opts;

    auto* check = app.add_subcommand(
        "check-arbitrage", "Decide feasibility vs arbitrage for an instance file");
    std::string check_instance;
    check->add_option("--instance", check_instance, "Instance JSON file")->required();
    add_common(check, opts);

    auto* price = app.add_subcommand("price", "Robust price bounds and hedges for a payoff");
    std::string price_instance, price_payoff, price_strip;
    int price_strip_date = 0;
    price->add_option("--instance", price_instance, "Instance JSON file")->required();
    price->add_option("--payoff", price_payoff, "Payoff JSON (inline or @file)")->required();
    price->add_option("--strip", price_strip,
                      "Call-strip CSV pinning a marginal (needs --strip-date)");
    price->add_option("--strip-date", price_strip_date, "Date of the call strip");
    add_common(price, opts);

    auto* doob = app.add_subcommand("doob-demo", "Pathwise Doob L1 demonstration");
    std::string doob_levels = "0.25,0.5,1,2,4";
    int doob_horizon = 3;
    double doob_price = 0.0;
    doob->add_option("--levels", doob_levels, "Comma-separated grid levels (must contain 1)");
    doob->add_option("--horizon", doob_horizon, "Number of trading dates");
    doob->add_option("--C", doob_price, "Quote of the x log x claim (>= 0)");
    add_common(doob, opts);

    auto* bl = app.add_subcommand("bl-convert",
                                  "Convert between call strips and marginal laws");
    std::string bl_calls, bl_marginal, bl_levels, bl_strikes;
    int bl_date = 0;
    bl->add_option("--calls", bl_calls, "Call-strip CSV to invert");
    bl->add_option("--date", bl_date, "Date of the strip");
    bl->add_option("--marginal", bl_marginal, "Marginal JSON to price into calls");
    bl->add_option("--levels", bl_levels, "Comma-separated grid levels")->required();
    bl->add_option("--strikes", bl_strikes, "Strikes for marginal->calls (default: levels)");
    add_common(bl, opts);

    auto* selftest = app.add_subcommand("selftest", "Randomized certified self-check");
    std::uint64_t selftest_count = 60;
    selftest->add_option("--count", selftest_count, "Number of random instances");
    add_common(selftest, opts);

    CLI11_PARSE(app, argc, argv);

    try {
        const CLI::App* active = app.get_subcommands().front();
        apply_config(active, opts);
        if (opts.tol_feas <= 0.0 || opts.tol_gap <= 0.0) {
            throw gh::InvalidInstance("tolerances must be positive");
        }
        if (check->parsed()) return cmd_check_arbitrage(check_instance, opts);
        if (price->parsed()) {
            return cmd_price(price_instance, price_payoff, price_strip, price_strip_date, opts);
        }
        if (doob->parsed()) return cmd_doob(doob_levels, doob_horizon, doob_price, opts);
        if (bl->parsed()) {
            return cmd_bl_convert(bl_calls, bl_date, bl_marginal, bl_levels, bl_strikes, opts);
        }
        if (selftest->parsed()) return cmd_selftest(selftest_count, opts);
    } catch (const gh::NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const gh::NoAdmissibleMeasure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitArbitrage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
