#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cda/equilibrium.hpp"
#include "cda/error.hpp"
#include "cda/market.hpp"
#include "cda/payoff.hpp"
#include "cda/simulator.hpp"
#include "cda/welfare.hpp"

namespace py = pybind11;

namespace {

cda::EquilibriumSolution solve(const cda::Market& mkt, const std::string& method) {
  if (method == "closed_form") return cda::solve_linear_bne(mkt);
  if (method == "shooting") return cda::solve_bne_numeric(mkt);
  if (method == "auto") return mkt.is_linear() ? cda::solve_linear_bne(mkt) : cda::solve_bne_numeric(mkt);
  throw cda::OutOfDomain("method must be auto, closed_form or shooting");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bindings for the cda_lab C++ core.";
  m.attr("__version__") = CDA_LAB_VERSION;
  static py::exception<cda::Error> error(m, "CdaError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const cda::Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<cda::Market>(m, "Market")
      .def_static("linear", &cda::Market::linear, py::arg("s_minus"), py::arg("alpha"),
                  py::arg("d_plus"), py::arg("beta"))
      .def_static("tabulated", &cda::Market::tabulated, py::arg("supply"), py::arg("demand"))
      .def_property_readonly("is_linear", &cda::Market::is_linear)
      .def_property_readonly("s_minus", &cda::Market::s_minus)
      .def_property_readonly("s_plus", &cda::Market::s_plus)
      .def_property_readonly("d_minus", &cda::Market::d_minus)
      .def_property_readonly("d_plus", &cda::Market::d_plus)
      .def("supply", &cda::Market::supply)
      .def("demand", &cda::Market::demand);

  m.def("competitive_equilibrium", [](const cda::Market& mkt) {
    auto ce = cda::competitive_equilibrium(mkt);
    return py::make_tuple(ce.price, ce.quantity);
  });

  py::class_<cda::EquilibriumSolution>(m, "Solution")
      .def_readonly("exists", &cda::EquilibriumSolution::exists)
      .def_readonly("method", &cda::EquilibriumSolution::method)
      .def_readonly("experimental", &cda::EquilibriumSolution::experimental)
      .def_readonly("failure", &cda::EquilibriumSolution::failure)
      .def_readonly("a_minus", &cda::EquilibriumSolution::a_minus)
      .def_readonly("b_plus", &cda::EquilibriumSolution::b_plus)
      .def_readonly("gamma", &cda::EquilibriumSolution::gamma)
      .def("A", [](const cda::EquilibriumSolution& s, double x) { return s.A(x); })
      .def("Bc", [](const cda::EquilibriumSolution& s, double x) { return s.Bc(x); })
      .def("T", [](const cda::EquilibriumSolution& s, double x) { return s.T(x); })
      .def("ask", [](const cda::EquilibriumSolution& s, double v) { return s.ask(v); })
      .def("bid", [](const cda::EquilibriumSolution& s, double v) { return s.bid(v); });

  m.def("solve_bne", &solve, py::arg("market"), py::arg("method") = "auto");

  m.def("buyer_payoff", [](const cda::Market& mkt, const cda::EquilibriumSolution& sol, double x,
                           double M) { return cda::buyer_payoff(sol.context(mkt), x, M); });
  m.def("seller_payoff", [](const cda::Market& mkt, const cda::EquilibriumSolution& sol, double x,
                            double v) { return cda::seller_payoff(sol.context(mkt), x, v); });
  m.def(
      "one_price_payoff",
      [](const cda::Market& mkt, double p, double x, double M) {
        auto op = cda::one_price_profile(mkt, p);
        auto ctx = cda::PayoffContext::make(mkt, op.sellers, op.buyers);
        return py::make_tuple(cda::buyer_payoff(ctx, x, M),
                              cda::buyer_payoff_right_limit(ctx, x, M));
      },
      py::arg("market"), py::arg("p"), py::arg("x"), py::arg("M"),
      "Buyer payoff and its right limit when everyone else plays the one-price profile at p.");

  m.def("welfare", [](const cda::Market& mkt) {
    py::dict d;
    auto c = cda::competitive_profits(mkt);
    d["competitive"] = py::make_tuple(c.P_a, c.P_b, c.P_total);
    auto sol = solve(mkt, "auto");
    if (sol.exists) {
      auto b = cda::bne_profits(mkt, sol);
      d["bne"] = py::make_tuple(b.P_a, b.P_b, b.P_total);
    } else {
      d["bne"] = py::none();
    }
    return d;
  });

  m.def(
      "simulate",
      [](const cda::Market& mkt, const std::string& strategy, std::uint64_t runs,
         std::uint64_t seed, int workers) {
        std::optional<cda::EquilibriumSolution> sol;
        auto sellers = cda::StrategyProfile::zic(cda::Side::Seller);
        auto buyers = cda::StrategyProfile::zic(cda::Side::Buyer);
        if (strategy == "bne") {
          sol = solve(mkt, "auto");
          if (!sol->exists) throw cda::AssumptionViolated("no equilibrium: " + sol->failure);
          sellers = *sol->sellers;
          buyers = *sol->buyers;
        } else if (strategy != "zic") {
          throw cda::OutOfDomain("strategy must be zic or bne");
        }
        cda::MonteCarloOptions o;
        o.runs = runs;
        o.seed = seed;
        o.workers = workers;
        o.analytic = cda::induced_distributions(mkt, sellers, buyers);
        cda::SimSummary s;
        {
          py::gil_scoped_release release;
          s = cda::monte_carlo(mkt, sellers, buyers, o);
        }
        py::dict d;
        d["mean_price"] = s.mean_price;
        d["price_stderr"] = s.price_stderr;
        d["ks"] = s.ks ? py::cast(*s.ks) : py::none();
        d["buyer_maker_fraction"] = s.buyer_maker_fraction;
        d["mean_seller_profit"] = s.mean_seller_profit;
        d["mean_buyer_profit"] = s.mean_buyer_profit;
        d["prices"] = s.prices;
        return d;
      },
      py::arg("market"), py::arg("strategy") = "zic", py::arg("runs") = 10000,
      py::arg("seed") = 1, py::arg("workers") = 1);
}
