// Python bindings for the grid pricing engine. Exposes the model types and
// the main operations: the arbitrage dichotomy, robust price bounds with
// hedge extraction, Breeden-Litzenberger conversions, and the pathwise Doob
// toolkit.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gridhedge/ftap.hpp"
#include "gridhedge/instance_gen.hpp"
#include "gridhedge/io.hpp"
#include "gridhedge/marginals.hpp"
#include "gridhedge/market_model.hpp"
#include "gridhedge/martingale_lp.hpp"
#include "gridhedge/pathwise.hpp"
#include "gridhedge/superrep.hpp"

namespace py = pybind11;
namespace gh = gridhedge;

namespace {

gh::Path make_path(const std::vector<double>& coords) {
    gh::Path p;
    p.coordinates = coords;
    return p;
}

gh::lp::LpTolerances make_tol(double feas, double gap) {
    gh::lp::LpTolerances tol;
    tol.feas = feas;
    tol.gap = gap;
    return tol;
}

} // namespace

PYBIND11_MODULE(_gridhedge, m) {
    m.doc() = "Model-free pricing and hedging on a finite price grid";

    py::register_exception<gh::InvalidInstance>(m, "InvalidInstance", PyExc_ValueError);
    py::register_exception<gh::InvalidPath>(m, "InvalidPath", PyExc_ValueError);
    py::register_exception<gh::NotConvex>(m, "NotConvex", PyExc_ValueError);
    py::register_exception<gh::SizeLimitError>(m, "SizeLimitError", PyExc_RuntimeError);
    py::register_exception<gh::NumericalFailure>(m, "NumericalFailure", PyExc_RuntimeError);
    py::register_exception<gh::NoAdmissibleMeasure>(m, "NoAdmissibleMeasure", PyExc_RuntimeError);
    py::register_exception<gh::StaticArbitrage>(m, "StaticArbitrage", PyExc_RuntimeError);
    py::register_exception<gh::NotAMartingale>(m, "NotAMartingale", PyExc_RuntimeError);

    py::class_<gh::PathGridModel>(m, "PathGridModel")
        .def(py::init<int, std::vector<double>, double>(), py::arg("horizon"), py::arg("levels"),
             py::arg("s0"))
        .def_property_readonly("horizon", &gh::PathGridModel::horizon)
        .def_property_readonly("levels", &gh::PathGridModel::levels)
        .def_property_readonly("s0", &gh::PathGridModel::s0)
        .def_property_readonly("grid_size", &gh::PathGridModel::grid_size)
        .def("path_count", [](const gh::PathGridModel& mdl) { return mdl.path_count_checked(); })
        .def("__repr__", [](const gh::PathGridModel& mdl) {
            return "PathGridModel(T=" + std::to_string(mdl.horizon()) +
                   ", G=" + std::to_string(mdl.grid_size()) + ", s0=" + std::to_string(mdl.s0()) +
                   ")";
        });

    py::class_<gh::Payoff>(m, "Payoff")
        .def_static("european_call", &gh::Payoff::european_call, py::arg("strike"),
                    py::arg("date"))
        .def_static("european_put", &gh::Payoff::european_put, py::arg("strike"), py::arg("date"))
        .def_static("power_option", &gh::Payoff::power_option, py::arg("exponent"),
                    py::arg("date"))
        .def_static("entropy_option", &gh::Payoff::entropy_option, py::arg("date"))
        .def_static("running_max", &gh::Payoff::running_max)
        .def_static("spread", &gh::Payoff::spread, py::arg("date1"), py::arg("date2"))
        .def_static("custom", &gh::Payoff::custom, py::arg("values"))
        .def("describe", &gh::Payoff::describe)
        .def("__repr__", &gh::Payoff::describe);

    py::enum_<gh::Side>(m, "Side")
        .value("BUY_ONLY", gh::Side::BuyOnly)
        .value("TWO_SIDED", gh::Side::TwoSided);

    py::class_<gh::Instrument>(m, "Instrument")
        .def(py::init([](const gh::Payoff& payoff, double price, gh::Side side) {
                 return gh::Instrument{payoff, price, side};
             }),
             py::arg("payoff"), py::arg("price") = 0.0, py::arg("side") = gh::Side::BuyOnly)
        .def_readonly("payoff", &gh::Instrument::payoff)
        .def_readonly("price", &gh::Instrument::price)
        .def_readonly("side", &gh::Instrument::side);

    py::class_<gh::InstrumentSet>(m, "InstrumentSet")
        .def(py::init([](std::vector<gh::Instrument> instruments,
                         std::optional<int> growth_witness) {
                 gh::InstrumentSet set;
                 set.instruments = std::move(instruments);
                 set.growth_witness = growth_witness;
                 return set;
             }),
             py::arg("instruments") = std::vector<gh::Instrument>{},
             py::arg("growth_witness") = std::nullopt)
        .def_readonly("instruments", &gh::InstrumentSet::instruments)
        .def_readonly("growth_witness", &gh::InstrumentSet::growth_witness)
        .def("__len__", &gh::InstrumentSet::size);

    m.def(
        "evaluate",
        [](const gh::Payoff& payoff, const std::vector<double>& path,
           const gh::PathGridModel& model) { return gh::evaluate(payoff, make_path(path), model); },
        py::arg("payoff"), py::arg("path"), py::arg("model"));

    m.def(
        "enumerate_paths",
        [](const gh::PathGridModel& model, std::uint64_t max_paths) {
            std::vector<std::vector<double>> out;
            for (auto& p : gh::enumerate_paths(model, max_paths)) {
                out.push_back(std::move(p.coordinates));
            }
            return out;
        },
        py::arg("model"), py::arg("max_paths") = gh::kDefaultMaxPaths);

    py::class_<gh::PathMeasure>(m, "PathMeasure")
        .def(py::init([](std::vector<double> weights) { return gh::PathMeasure{std::move(weights)}; }),
             py::arg("weights"))
        .def_readonly("weights", &gh::PathMeasure::weights);

    py::class_<gh::MeasureCheckReport>(m, "MeasureCheckReport")
        .def_readonly("negativity", &gh::MeasureCheckReport::negativity)
        .def_readonly("probability", &gh::MeasureCheckReport::probability)
        .def_readonly("martingale", &gh::MeasureCheckReport::martingale)
        .def_readonly("instrument", &gh::MeasureCheckReport::instrument)
        .def_readonly("marginal", &gh::MeasureCheckReport::marginal)
        .def("max_violation", &gh::MeasureCheckReport::max_violation)
        .def("passes", &gh::MeasureCheckReport::pass, py::arg("tol"));

    py::class_<gh::Marginal>(m, "Marginal")
        .def(py::init([](int date, std::vector<double> masses) {
                 return gh::Marginal{date, std::move(masses)};
             }),
             py::arg("date"), py::arg("masses"))
        .def_readonly("date", &gh::Marginal::date)
        .def_readonly("masses", &gh::Marginal::masses)
        .def("barycenter", &gh::Marginal::barycenter, py::arg("model"));

    py::class_<gh::CallStrip>(m, "CallStrip")
        .def(py::init([](int date, std::vector<double> strikes, std::vector<double> prices) {
                 gh::CallStrip s;
                 s.date = date;
                 s.strikes = std::move(strikes);
                 s.prices = std::move(prices);
                 return s;
             }),
             py::arg("date"), py::arg("strikes"), py::arg("prices"))
        .def_readonly("date", &gh::CallStrip::date)
        .def_readonly("strikes", &gh::CallStrip::strikes)
        .def_readonly("prices", &gh::CallStrip::prices);

    py::class_<gh::DynamicStrategy>(m, "DynamicStrategy")
        .def_property_readonly("positions", &gh::DynamicStrategy::positions)
        .def("gain", [](const gh::DynamicStrategy& dyn, const gh::PathGridModel& model,
                        const std::vector<double>& path) {
            return dyn.gain(model, make_path(path));
        });

    py::class_<gh::StaticPosition>(m, "StaticPosition")
        .def_readonly("instrument", &gh::StaticPosition::instrument)
        .def_readonly("orientation", &gh::StaticPosition::orientation)
        .def_readonly("weight", &gh::StaticPosition::weight);

    py::class_<gh::ArbitrageCertificate>(m, "ArbitrageCertificate")
        .def_readonly("statics", &gh::ArbitrageCertificate::statics)
        .def_readonly("strategy", &gh::ArbitrageCertificate::strategy)
        .def_readonly("min_gain", &gh::ArbitrageCertificate::min_gain);

    py::class_<gh::FtapVerdict>(m, "FtapVerdict")
        .def_readonly("feasible", &gh::FtapVerdict::feasible)
        .def_readonly("measure", &gh::FtapVerdict::measure)
        .def_readonly("certificate", &gh::FtapVerdict::certificate)
        .def_readonly("growth_witness_present", &gh::FtapVerdict::growth_witness_present)
        .def_readonly("measure_report", &gh::FtapVerdict::measure_report);

    py::class_<gh::EuropeanLeg>(m, "EuropeanLeg")
        .def_readonly("date", &gh::EuropeanLeg::date)
        .def_readonly("values", &gh::EuropeanLeg::values);

    py::class_<gh::SemiStaticHedge>(m, "SemiStaticHedge")
        .def_readonly("cash", &gh::SemiStaticHedge::cash)
        .def_readonly("statics", &gh::SemiStaticHedge::statics)
        .def_readonly("legs", &gh::SemiStaticHedge::legs)
        .def_readonly("dynamic", &gh::SemiStaticHedge::dynamic)
        .def_readonly("slack_min", &gh::SemiStaticHedge::slack_min);

    py::class_<gh::BoundSide>(m, "BoundSide")
        .def_readonly("value", &gh::BoundSide::value)
        .def_readonly("witness", &gh::BoundSide::witness)
        .def_readonly("hedge", &gh::BoundSide::hedge)
        .def_readonly("gap", &gh::BoundSide::gap);

    py::class_<gh::PriceBounds>(m, "PriceBounds")
        .def_readonly("upper", &gh::PriceBounds::upper)
        .def_readonly("lower", &gh::PriceBounds::lower);

    m.def(
        "check",
        [](const gh::PathGridModel& model, const gh::InstrumentSet& instruments, double tol_feas,
           double tol_gap, std::uint64_t max_paths) {
            return gh::check(model, instruments, make_tol(tol_feas, tol_gap), max_paths);
        },
        py::arg("model"), py::arg("instruments") = gh::InstrumentSet{},
        py::arg("tol_feas") = 1e-9, py::arg("tol_gap") = 1e-7,
        py::arg("max_paths") = gh::kDefaultMaxPaths,
        "Arbitrage dichotomy: a feasible martingale measure or a certified arbitrage");

    m.def(
        "certify_arbitrage",
        [](const gh::ArbitrageCertificate& cert, const gh::PathGridModel& model,
           const gh::InstrumentSet& instruments) {
            return gh::certify_arbitrage(cert, model, instruments);
        },
        py::arg("certificate"), py::arg("model"), py::arg("instruments"));

    m.def(
        "price_bounds",
        [](const gh::PathGridModel& model, const gh::InstrumentSet& instruments,
           const gh::Payoff& phi, double tol_feas, double tol_gap, std::uint64_t max_paths) {
            return gh::price_bounds(model, instruments, phi, make_tol(tol_feas, tol_gap),
                                    max_paths);
        },
        py::arg("model"), py::arg("instruments"), py::arg("payoff"), py::arg("tol_feas") = 1e-9,
        py::arg("tol_gap") = 1e-7, py::arg("max_paths") = gh::kDefaultMaxPaths);

    m.def(
        "bounds_with_marginals",
        [](const gh::PathGridModel& model, const std::vector<gh::Marginal>& marginals,
           const gh::Payoff& phi, double tol_feas, double tol_gap, std::uint64_t max_paths) {
            return gh::bounds_with_marginals(model, marginals, phi, make_tol(tol_feas, tol_gap),
                                             max_paths);
        },
        py::arg("model"), py::arg("marginals"), py::arg("payoff"), py::arg("tol_feas") = 1e-9,
        py::arg("tol_gap") = 1e-7, py::arg("max_paths") = gh::kDefaultMaxPaths);

    m.def(
        "verify_hedge",
        [](const gh::SemiStaticHedge& hedge, const gh::Payoff& phi,
           const gh::PathGridModel& model, const gh::InstrumentSet& instruments,
           bool negate_payoff) {
            return gh::verify_hedge(hedge, phi, model, instruments, negate_payoff);
        },
        py::arg("hedge"), py::arg("payoff"), py::arg("model"), py::arg("instruments"),
        py::arg("negate_payoff") = false);

    m.def(
        "verify_measure",
        [](const gh::PathMeasure& pi, const gh::PathGridModel& model,
           const gh::InstrumentSet& instruments, const std::vector<gh::Marginal>& marginals) {
            return gh::verify_measure(pi, gh::build_constraints(model, instruments, marginals));
        },
        py::arg("measure"), py::arg("model"), py::arg("instruments") = gh::InstrumentSet{},
        py::arg("marginals") = std::vector<gh::Marginal>{});

    m.def(
        "marginal_to_calls",
        [](const gh::Marginal& nu, const gh::PathGridModel& model, std::vector<double> strikes) {
            if (strikes.empty()) strikes = model.levels();
            return gh::marginal_to_calls(nu, model,
                                         std::span<const double>(strikes.data(), strikes.size()));
        },
        py::arg("marginal"), py::arg("model"), py::arg("strikes") = std::vector<double>{});

    m.def("calls_to_marginal", &gh::calls_to_marginal, py::arg("strip"), py::arg("model"),
          py::arg("tol") = 1e-9);

    py::class_<gh::CallStripDecomposition>(m, "CallStripDecomposition")
        .def_readonly("constant", &gh::CallStripDecomposition::constant)
        .def_readonly("slope", &gh::CallStripDecomposition::slope)
        .def_readonly("strikes", &gh::CallStripDecomposition::strikes)
        .def_readonly("weights", &gh::CallStripDecomposition::weights)
        .def("reconstruct", &gh::CallStripDecomposition::reconstruct, py::arg("y"));

    m.def(
        "call_strip_decompose",
        [](const std::vector<double>& g_on_levels, const gh::PathGridModel& model) {
            return gh::call_strip_decompose(
                std::span<const double>(g_on_levels.data(), g_on_levels.size()), model);
        },
        py::arg("g_on_levels"), py::arg("model"));

    m.def("marginal_instruments", &gh::marginal_instruments, py::arg("marginal"),
          py::arg("model"));

    m.def("doob_constant", &gh::doob_constant);
    m.def("doob_hedge", &gh::doob_hedge, py::arg("model"), py::arg("entropy_price") = 0.0);
    m.def("doob_instruments", &gh::doob_instruments, py::arg("model"),
          py::arg("entropy_price") = 0.0);

    py::class_<gh::DoobInstance>(m, "DoobInstance")
        .def(py::init<gh::PathGridModel, double>(), py::arg("model"),
             py::arg("entropy_price") = 0.0)
        .def_readonly("model", &gh::DoobInstance::model)
        .def_readonly("entropy_price", &gh::DoobInstance::entropy_price)
        .def_readwrite("weight", &gh::DoobInstance::weight)
        .def_readwrite("eps", &gh::DoobInstance::eps)
        .def_readwrite("cash_constant", &gh::DoobInstance::cash_constant);

    py::class_<gh::DoobReport>(m, "DoobReport")
        .def_readonly("min_slack", &gh::DoobReport::min_slack)
        .def_readonly("argmin_path", &gh::DoobReport::argmin_path)
        .def_readonly("paths_checked", &gh::DoobReport::paths_checked)
        .def_readonly("tolerance", &gh::DoobReport::tolerance)
        .def_readonly("passes", &gh::DoobReport::pass);

    m.def("doob_verify_all", &gh::doob_verify_all, py::arg("instance"),
          py::arg("tol_rel") = 1e-12, py::arg("max_paths") = gh::kDefaultMaxPaths);

    m.def(
        "doob_lp_bound",
        [](const gh::PathGridModel& model, double entropy_price, double tol_feas, double tol_gap,
           std::uint64_t max_paths) {
            return gh::doob_lp_bound(model, entropy_price, make_tol(tol_feas, tol_gap),
                                     max_paths);
        },
        py::arg("model"), py::arg("entropy_price"), py::arg("tol_feas") = 1e-9,
        py::arg("tol_gap") = 1e-7, py::arg("max_paths") = gh::kDefaultMaxPaths);

    py::class_<gh::InducedInequalityReport>(m, "InducedInequalityReport")
        .def_readonly("lhs", &gh::InducedInequalityReport::lhs)
        .def_readonly("rhs", &gh::InducedInequalityReport::rhs)
        .def_readonly("gains_expectation", &gh::InducedInequalityReport::gains_expectation)
        .def_readonly("holds", &gh::InducedInequalityReport::holds);

    m.def("induced_martingale_inequality", &gh::induced_martingale_inequality, py::arg("model"),
          py::arg("measure"), py::arg("tol") = 1e-8, py::arg("max_paths") = gh::kDefaultMaxPaths);

#ifdef VERSION_INFO
#define GH_STR_INNER(x) #x
#define GH_STR(x) GH_STR_INNER(x)
    m.attr("__version__") = GH_STR(VERSION_INFO);
#else
    m.attr("__version__") = "dev";
#endif
}
