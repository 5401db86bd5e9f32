#include "gridhedge/io.hpp"

#include <fstream>
#include <sstream>

namespace gridhedge::io {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw InvalidInstance(msg); }

void expect_keys(const json& j, std::initializer_list<const char*> allowed,
                 const char* where) {
    if (!j.is_object()) bad(std::string(where) + ": expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* key : allowed) {
            if (it.key() == key) {
                ok = true;
                break;
            }
        }
        if (!ok) bad(std::string(where) + ": unknown field '" + it.key() + "'");
    }
}

double number(const json& j, const char* key, const char* where) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        bad(std::string(where) + ": missing numeric field '" + key + "'");
    }
    return j.at(key).get<double>();
}

int integer(const json& j, const char* key, const char* where) {
    if (!j.contains(key) || !j.at(key).is_number_integer()) {
        bad(std::string(where) + ": missing integer field '" + key + "'");
    }
    return j.at(key).get<int>();
}

std::vector<double> number_array(const json& j, const char* key, const char* where) {
    if (!j.contains(key) || !j.at(key).is_array()) {
        bad(std::string(where) + ": missing array field '" + key + "'");
    }
    std::vector<double> out;
    for (const auto& v : j.at(key)) {
        if (!v.is_number()) bad(std::string(where) + ": '" + key + "' must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

} // namespace

Payoff payoff_from_json(const json& j) {
    expect_keys(j, {"kind", "params"}, "payoff");
    if (!j.contains("kind") || !j.at("kind").is_string()) bad("payoff: missing 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    const json params = j.contains("params") ? j.at("params") : json::object();

    if (kind == "european_call" || kind == "european_put") {
        expect_keys(params, {"strike", "date"}, "payoff.params");
        const double strike = number(params, "strike", "payoff");
        const int date = integer(params, "date", "payoff");
        return kind == "european_call" ? Payoff::european_call(strike, date)
                                       : Payoff::european_put(strike, date);
    }
    if (kind == "power") {
        expect_keys(params, {"exponent", "date"}, "payoff.params");
        return Payoff::power_option(number(params, "exponent", "payoff"),
                                    integer(params, "date", "payoff"));
    }
    if (kind == "entropy") {
        expect_keys(params, {"date"}, "payoff.params");
        return Payoff::entropy_option(integer(params, "date", "payoff"));
    }
    if (kind == "running_max") {
        expect_keys(params, {}, "payoff.params");
        return Payoff::running_max();
    }
    if (kind == "spread") {
        expect_keys(params, {"date1", "date2"}, "payoff.params");
        return Payoff::spread(integer(params, "date1", "payoff"),
                              integer(params, "date2", "payoff"));
    }
    if (kind == "custom") {
        expect_keys(params, {"values"}, "payoff.params");
        return Payoff::custom(number_array(params, "values", "payoff"));
    }
    bad("payoff: unknown kind '" + kind + "'");
}

json payoff_to_json(const Payoff& payoff) {
    json j;
    json params = json::object();
    switch (payoff.kind) {
        case PayoffKind::EuropeanCall:
            j["kind"] = "european_call";
            params["strike"] = payoff.strike;
            params["date"] = payoff.date;
            break;
        case PayoffKind::EuropeanPut:
            j["kind"] = "european_put";
            params["strike"] = payoff.strike;
            params["date"] = payoff.date;
            break;
        case PayoffKind::Power:
            j["kind"] = "power";
            params["exponent"] = payoff.exponent;
            params["date"] = payoff.date;
            break;
        case PayoffKind::Entropy:
            j["kind"] = "entropy";
            params["date"] = payoff.date;
            break;
        case PayoffKind::RunningMax:
            j["kind"] = "running_max";
            break;
        case PayoffKind::Spread:
            j["kind"] = "spread";
            params["date1"] = payoff.date;
            params["date2"] = payoff.date2;
            break;
        case PayoffKind::Custom:
            j["kind"] = "custom";
            params["values"] = payoff.table;
            break;
    }
    j["params"] = params;
    return j;
}

Marginal marginal_from_json(const json& j) {
    expect_keys(j, {"date", "masses"}, "marginal");
    Marginal nu;
    nu.date = integer(j, "date", "marginal");
    nu.masses = number_array(j, "masses", "marginal");
    return nu;
}

json marginal_to_json(const Marginal& nu) {
    return json{{"date", nu.date}, {"masses", nu.masses}};
}

Instance instance_from_json(const json& j) {
    expect_keys(j, {"horizon", "levels", "s0", "instruments", "marginals"}, "instance");
    const int horizon = integer(j, "horizon", "instance");
    const std::vector<double> levels = number_array(j, "levels", "instance");
    const double s0 = number(j, "s0", "instance");
    Instance instance{PathGridModel(horizon, levels, s0), {}, {}};

    if (j.contains("instruments")) {
        if (!j.at("instruments").is_array()) bad("instance: 'instruments' must be an array");
        for (const auto& ij : j.at("instruments")) {
            expect_keys(ij, {"kind", "params", "price", "side"}, "instrument");
            Instrument inst;
            inst.payoff = payoff_from_json(json{{"kind", ij.at("kind")},
                                                {"params", ij.contains("params")
                                                               ? ij.at("params")
                                                               : json::object()}});
            inst.price = number(ij, "price", "instrument");
            const std::string side =
                ij.contains("side") ? ij.at("side").get<std::string>() : "buy_only";
            if (side == "buy_only") {
                inst.side = Side::BuyOnly;
            } else if (side == "two_sided") {
                inst.side = Side::TwoSided;
            } else {
                bad("instrument: side must be 'buy_only' or 'two_sided'");
            }
            instance.instruments.instruments.push_back(std::move(inst));
        }
    }
    if (j.contains("marginals")) {
        if (!j.at("marginals").is_array()) bad("instance: 'marginals' must be an array");
        for (const auto& mj : j.at("marginals")) {
            instance.marginals.push_back(marginal_from_json(mj));
        }
    }
    instance.instruments.validate(instance.model);
    for (const auto& nu : instance.marginals) nu.validate(instance.model);
    return instance;
}

json instance_to_json(const Instance& instance) {
    json j;
    j["horizon"] = instance.model.horizon();
    j["levels"] = instance.model.levels();
    j["s0"] = instance.model.s0();
    j["instruments"] = json::array();
    for (const auto& inst : instance.instruments.instruments) {
        json ij = payoff_to_json(inst.payoff);
        ij["price"] = inst.price;
        ij["side"] = inst.side == Side::BuyOnly ? "buy_only" : "two_sided";
        j["instruments"].push_back(ij);
    }
    if (!instance.marginals.empty()) {
        j["marginals"] = json::array();
        for (const auto& nu : instance.marginals) {
            j["marginals"].push_back(marginal_to_json(nu));
        }
    }
    return j;
}

Instance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) bad("cannot open instance file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        bad("instance file is not valid JSON: " + std::string(e.what()));
    }
    return instance_from_json(j);
}

json measure_to_json(const PathMeasure& pi, const PathGridModel& model, double threshold) {
    PathIndexer ix(model.grid_size(), model.horizon());
    json atoms = json::array();
    std::vector<int> idx(static_cast<std::size_t>(model.horizon()));
    for (std::uint64_t p = 0; p < pi.weights.size(); ++p) {
        const double w = pi.weights[p];
        if (w <= threshold) continue;
        ix.decode(p, idx);
        json path = json::array();
        for (int t = 0; t < model.horizon(); ++t) {
            path.push_back(model.levels()[static_cast<std::size_t>(idx[static_cast<std::size_t>(t)])]);
        }
        atoms.push_back(json{{"path", path}, {"weight", w}});
    }
    return json{{"atoms", atoms}};
}

namespace {

json dynamic_to_json(const DynamicStrategy& dyn, const PathGridModel& model, double threshold) {
    json entries = json::array();
    if (dyn.empty()) return entries;
    const auto g = static_cast<std::uint64_t>(model.grid_size());
    for (int t = 0; t < dyn.horizon(); ++t) {
        const auto& level = dyn.positions()[static_cast<std::size_t>(t)];
        for (std::uint64_t prefix = 0; prefix < level.size(); ++prefix) {
            const double v = level[prefix];
            if (std::abs(v) <= threshold) continue;
            // decode the prefix coordinates, most significant digit first
            std::vector<double> coords(static_cast<std::size_t>(t));
            std::uint64_t q = prefix;
            for (int s = t - 1; s >= 0; --s) {
                coords[static_cast<std::size_t>(s)] =
                    model.levels()[static_cast<std::size_t>(q % g)];
                q /= g;
            }
            entries.push_back(json{{"prefix", coords}, {"position", v}});
        }
    }
    return entries;
}

} // namespace

json hedge_to_json(const SemiStaticHedge& hedge, const PathGridModel& model, double threshold) {
    json j;
    j["cash"] = hedge.cash;
    j["static"] = json::array();
    for (const auto& pos : hedge.statics) {
        j["static"].push_back(json{{"instrument", pos.instrument},
                                   {"orientation", pos.orientation},
                                   {"weight", pos.weight}});
    }
    if (!hedge.legs.empty()) {
        j["european_legs"] = json::array();
        for (const auto& leg : hedge.legs) {
            j["european_legs"].push_back(json{{"date", leg.date}, {"values", leg.values}});
        }
    }
    j["dynamic"] = dynamic_to_json(hedge.dynamic, model, threshold);
    j["slack_min"] = hedge.slack_min;
    return j;
}

json certificate_to_json(const ArbitrageCertificate& cert, const PathGridModel& model,
                         double threshold) {
    json j;
    j["static"] = json::array();
    for (const auto& pos : cert.statics) {
        j["static"].push_back(json{{"instrument", pos.instrument},
                                   {"orientation", pos.orientation},
                                   {"weight", pos.weight}});
    }
    j["dynamic"] = dynamic_to_json(cert.strategy, model, threshold);
    j["min_gain"] = cert.min_gain;
    return j;
}

json verdict_to_json(const FtapVerdict& verdict, const PathGridModel& model) {
    json j;
    j["verdict"] = verdict.feasible ? "feasible" : "arbitrage";
    j["growth_witness_present"] = verdict.growth_witness_present;
    if (verdict.feasible) {
        j["measure"] = measure_to_json(verdict.measure, model);
        j["max_violation"] = verdict.measure_report.max_violation();
    } else {
        j["certificate"] = certificate_to_json(verdict.certificate, model);
    }
    return j;
}

json bounds_to_json(const PriceBounds& bounds, const PathGridModel& model) {
    auto side = [&](const BoundSide& s) {
        return json{{"value", s.value},
                    {"gap", s.gap},
                    {"witness_measure", measure_to_json(s.witness, model)},
                    {"hedge", hedge_to_json(s.hedge, model)}};
    };
    return json{{"upper", side(bounds.upper)},
                {"lower", side(bounds.lower)},
                // bounds are statements about the truncated grid market only;
                // continuum growth conditions are vacuous here
                {"scope", "truncated-grid"}};
}

CallStrip read_strip_csv(std::istream& in, int date) {
    CallStrip strip;
    strip.date = date;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // trim
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        std::size_t begin = line.find_first_not_of(" \t");
        if (begin == std::string::npos) continue;
        std::string body = line.substr(begin);
        if (body.empty() || body[0] == '#') continue;
        if (lineno == 1 && body.rfind("strike", 0) == 0) continue; // header
        const std::size_t comma = body.find(',');
        if (comma == std::string::npos) {
            bad("strip csv: expected 'strike,price' on line " + std::to_string(lineno));
        }
        try {
            strip.strikes.push_back(std::stod(body.substr(0, comma)));
            strip.prices.push_back(std::stod(body.substr(comma + 1)));
        } catch (const std::exception&) {
            bad("strip csv: cannot parse numbers on line " + std::to_string(lineno));
        }
    }
    if (strip.strikes.empty()) bad("strip csv: no quotes found");
    return strip;
}

CallStrip load_strip_csv(const std::string& path, int date) {
    std::ifstream in(path);
    if (!in) bad("cannot open strip csv: " + path);
    return read_strip_csv(in, date);
}

void write_strip_csv(const CallStrip& strip, std::ostream& out) {
    out << "strike,price\n";
    out.precision(17);
    for (std::size_t j = 0; j < strip.strikes.size(); ++j) {
        out << strip.strikes[j] << "," << strip.prices[j] << "\n";
    }
}

} // namespace gridhedge::io
