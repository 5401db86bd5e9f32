#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridhedge/ftap.hpp"
#include "gridhedge/marginals.hpp"
#include "gridhedge/market_model.hpp"
#include "gridhedge/superrep.hpp"

namespace gridhedge::io {

using json = nlohmann::json;

/// One problem instance as read from disk: the grid market, its quoted
/// instruments and optionally pinned marginals. The JSON schema lives in
/// schemas/instance.schema.json.
struct Instance {
    PathGridModel model;
    InstrumentSet instruments;
    std::vector<Marginal> marginals;
};

Instance instance_from_json(const json& j);
json instance_to_json(const Instance& instance);
Instance load_instance(const std::string& path);

Payoff payoff_from_json(const json& j);
json payoff_to_json(const Payoff& payoff);

Marginal marginal_from_json(const json& j);
json marginal_to_json(const Marginal& nu);

/// Sparse measure serialization: only weights above `threshold` appear, each
/// with its path coordinates.
json measure_to_json(const PathMeasure& pi, const PathGridModel& model,
                     double threshold = 1e-12);

json hedge_to_json(const SemiStaticHedge& hedge, const PathGridModel& model,
                   double threshold = 1e-12);
json certificate_to_json(const ArbitrageCertificate& cert, const PathGridModel& model,
                         double threshold = 1e-12);
json verdict_to_json(const FtapVerdict& verdict, const PathGridModel& model);
json bounds_to_json(const PriceBounds& bounds, const PathGridModel& model);

/// Call strip CSV: one "strike,price" row per quote, optional header line.
CallStrip read_strip_csv(std::istream& in, int date);
CallStrip load_strip_csv(const std::string& path, int date);
void write_strip_csv(const CallStrip& strip, std::ostream& out);

} // namespace gridhedge::io
