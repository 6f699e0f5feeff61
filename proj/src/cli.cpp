#include "cda/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "cda/config.hpp"
#include "cda/equilibrium.hpp"
#include "cda/error.hpp"
#include "cda/payoff.hpp"
#include "cda/simulator.hpp"
#include "cda/welfare.hpp"

#ifndef CDA_LAB_VERSION
#define CDA_LAB_VERSION "0.0.0"
#endif

namespace cda {

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"bne",     "simulate", "price-cdf",
                                              "payoff",  "welfare",  "verify"};
  return names;
}

int log_level() {
  const char* env = std::getenv("CDA_LAB_LOG");
  if (!env) return 0;
  std::string v = env;
  if (v == "debug" || v == "2") return 2;
  if (v == "info" || v == "1") return 1;
  return 0;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

struct Csv {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void set(const std::string& key, const std::string& value) { meta.emplace_back(key, value); }
  void set(const std::string& key, double value) { set(key, format_double(value)); }
  void row(const std::vector<double>& values) {
    std::vector<std::string> r;
    for (double v : values) r.push_back(format_double(v));
    rows.push_back(std::move(r));
  }

  void write(std::ostream& os) const {
    for (const auto& [k, v] : meta) os << "# " << k << '=' << v << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << '\n';
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
      os << '\n';
    }
  }
};

struct Session {
  const RunOptions& opts;
  Config cfg;
  std::ostream& report;
  std::ostream& err;
  Csv csv;

  void log(int level, const std::string& msg) const {
    if (log_level() >= level) err << "[cda_lab] " << msg << '\n';
  }

  MonteCarloOptions mc() const {
    MonteCarloOptions o = simulate_options(cfg);
    if (opts.seed) o.seed = *opts.seed;
    if (opts.runs) {
      if (*opts.runs == 0) throw ConfigError("--runs must be positive");
      o.runs = *opts.runs;
    }
    if (opts.workers) {
      if (*opts.workers < 1) throw ConfigError("--workers must be positive");
      o.workers = *opts.workers;
    }
    return o;
  }

  int grid(const std::string& section, int fallback) const {
    long long n = cfg.get_int(section, "grid", fallback);
    if (n < 2 || n > 10'000'000) throw ConfigError(section + ".grid must be in [2, 1e7]");
    return static_cast<int>(n);
  }
};

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

void describe_solution(Csv& csv, const EquilibriumSolution& sol) {
  csv.set("exists", sol.exists ? "1" : "0");
  csv.set("method", sol.method);
  csv.set("experimental", sol.experimental ? "1" : "0");
  if (!sol.exists) csv.set("failure", sol.failure);
  csv.set("a_minus", sol.a_minus);
  csv.set("b_plus", sol.b_plus);
  csv.set("gamma", sol.gamma);
  csv.set("lambda", sol.lambda);
}

int cmd_bne(Session& s) {
  Market mkt = build_market(s.cfg);
  EquilibriumSolution sol = solve_configured_bne(s.cfg, mkt);
  s.log(1, "solved by " + sol.method + (sol.exists ? "" : ", no equilibrium: " + sol.failure));
  describe_solution(s.csv, sol);
  s.csv.columns = {"x", "A", "B_c", "T"};
  if (sol.exists) {
    Residuals r = equation_residuals(mkt, sol, 1000);
    s.csv.set("residual_foc", r.foc);
    s.csv.set("residual_consistency", r.consistency);
    for (double x : linspace(sol.a_minus, sol.b_plus, s.grid("bne", 201)))
      s.csv.row({x, sol.A(x), sol.Bc(x), sol.T(x)});
    s.report << "bne exists a_minus=" << format_double(sol.a_minus)
             << " b_plus=" << format_double(sol.b_plus) << " method=" << sol.method << '\n';
  } else {
    s.report << "bne does not exist: " << sol.failure << '\n';
  }
  return 0;
}

int cmd_simulate(Session& s) {
  Market mkt = build_market(s.cfg);
  StrategySetup setup = build_strategy(s.cfg, mkt);
  MonteCarloOptions mo = s.mc();
  ShoutDistributions dists = strategy_context(mkt, setup).dists;
  if (dists.continuous()) mo.analytic = dists;
  s.log(1, "simulating " + std::to_string(mo.runs) + " auctions on " +
               std::to_string(mo.workers) + " workers");
  SimSummary sum = monte_carlo(mkt, setup.sellers, setup.buyers, mo);
  double p_star = competitive_equilibrium(mkt).price;

  s.csv.set("strategy", setup.kind);
  s.csv.set("runs", std::to_string(sum.runs));
  s.csv.set("mean_price", sum.mean_price);
  s.csv.set("price_stderr", sum.price_stderr);
  if (sum.ks) s.csv.set("ks", *sum.ks);
  s.csv.set("buyer_maker_fraction", sum.buyer_maker_fraction);
  s.csv.set("mean_tau", sum.mean_tau);
  s.csv.set("mean_seller_profit", sum.mean_seller_profit);
  s.csv.set("mean_buyer_profit", sum.mean_buyer_profit);
  s.csv.set("competitive_price", p_star);
  s.csv.columns = {"price", "ecdf"};
  double n = static_cast<double>(sum.prices.size());
  for (std::size_t i = 0; i < sum.prices.size(); ++i) s.csv.row({sum.prices[i], (i + 1) / n});

  s.report << "mean_price=" << format_double(sum.mean_price)
           << " ks=" << (sum.ks ? format_double(*sum.ks) : std::string("n/a"))
           << " buyer_price_maker=" << format_double(sum.buyer_maker_fraction)
           << " seller_price_maker=" << format_double(1.0 - sum.buyer_maker_fraction)
           << " competitive_price=" << format_double(p_star) << '\n';
  return 0;
}

int cmd_price_cdf(Session& s) {
  Market mkt = build_market(s.cfg);
  StrategySetup setup = build_strategy(s.cfg, mkt);
  PayoffContext ctx = strategy_context(mkt, setup);
  double lo = std::min(ctx.dists.a_minus(), ctx.dists.b_minus());
  double hi = std::max(ctx.dists.a_plus(), ctx.dists.b_plus());
  s.csv.set("strategy", setup.kind);
  double mean = mean_price(ctx);
  s.csv.set("mean_price", mean);
  s.csv.columns = {"t", "T"};
  for (double t : linspace(lo, hi, s.grid("price_cdf", 201))) s.csv.row({t, price_cdf(ctx, t)});
  s.report << "mean_price=" << format_double(mean) << '\n';
  return 0;
}

int cmd_payoff(Session& s) {
  Market mkt = build_market(s.cfg);
  StrategySetup setup = build_strategy(s.cfg, mkt);
  PayoffContext ctx = strategy_context(mkt, setup);
  std::string side = s.cfg.get_string("payoff", "side", "buyer");
  if (side != "buyer" && side != "seller") throw ConfigError("payoff.side must be buyer or seller");
  bool buyer = side == "buyer";
  double type = s.cfg.get_double("payoff", "type", buyer ? mkt.d_plus() : mkt.s_minus());
  double lo = s.cfg.get_double("payoff", "x_min", 0.0);
  double hi = s.cfg.get_double("payoff", "x_max", 1.0);
  if (!(hi > lo)) throw ConfigError("payoff.x_max must exceed payoff.x_min");
  s.csv.set("strategy", setup.kind);
  s.csv.set("side", side);
  s.csv.set("type", type);
  s.csv.columns = {"x", buyer ? "pi_b" : "pi_a"};
  double best_x = lo, best = -1.0;
  for (double x : linspace(lo, hi, s.grid("payoff", 101))) {
    double v = buyer ? buyer_payoff(ctx, x, type) : seller_payoff(ctx, x, type);
    if (v > best) best = v, best_x = x;
    s.csv.row({x, v});
  }
  s.report << side << " type=" << format_double(type) << " best_x=" << format_double(best_x)
           << " payoff=" << format_double(best) << '\n';
  return 0;
}

int cmd_welfare(Session& s) {
  Market mkt = build_market(s.cfg);
  WelfareReport comp = competitive_profits(mkt);
  EquilibriumSolution sol = solve_configured_bne(s.cfg, mkt);
  std::optional<WelfareReport> bne;
  if (sol.exists) bne = bne_profits(mkt, sol);

  auto line = [&](const char* name, const WelfareReport& r) {
    s.report << std::left << std::setw(14) << name << std::setw(22) << format_double(r.P_a)
             << std::setw(22) << format_double(r.P_b) << format_double(r.P_total) << '\n';
  };
  s.report << std::left << std::setw(14) << "regime" << std::setw(22) << "P_a" << std::setw(22)
           << "P_b" << "total\n";
  line("competitive", comp);
  if (bne)
    line("bne", *bne);
  else
    s.report << "bne does not exist: " << sol.failure << '\n';

  s.csv.set("exists", sol.exists ? "1" : "0");
  s.csv.set("competitive_P_a", comp.P_a);
  s.csv.set("competitive_P_b", comp.P_b);
  s.csv.set("competitive_total", comp.P_total);
  if (bne) {
    s.csv.set("bne_P_a", bne->P_a);
    s.csv.set("bne_P_b", bne->P_b);
    s.csv.set("bne_total", bne->P_total);
  }
  s.csv.columns = {"side", "type", "competitive", "bne"};
  std::optional<PayoffContext> ctx;
  if (bne) ctx = sol.context(mkt);
  int n = s.grid("welfare", 101);
  for (Side side : {Side::Seller, Side::Buyer}) {
    double lo = side == Side::Seller ? mkt.s_minus() : mkt.d_minus();
    double hi = side == Side::Seller ? mkt.s_plus() : mkt.d_plus();
    for (double v : linspace(lo, hi, n)) {
      double c = competitive_profit_density(mkt, side, v) * type_density(mkt, side, v);
      double b = ctx ? bne_profit_density(*ctx, sol, side, v) * type_density(mkt, side, v)
                     : std::nan("");
      s.csv.rows.push_back({to_string(side), format_double(v), format_double(c), format_double(b)});
    }
  }
  return 0;
}

int cmd_verify(Session& s) {
  Market mkt = build_market(s.cfg);
  EquilibriumSolution sol = solve_configured_bne(s.cfg, mkt);
  describe_solution(s.csv, sol);
  s.csv.columns = {"check", "passed", "value"};
  bool all = true;
  auto check = [&](const std::string& name, bool ok, double value) {
    all = all && ok;
    s.csv.rows.push_back({name, ok ? "1" : "0", format_double(value)});
    s.report << (ok ? "PASS " : "FAIL ") << name << " " << format_double(value) << '\n';
  };

  if (mkt.is_linear()) {
    EquilibriumSolution cf = sol.method == "closed_form" ? sol : solve_linear_bne(mkt);
    EquilibriumSolution num = sol.method == "shooting" ? sol : solve_bne_numeric(mkt, bne_options(s.cfg));
    check("numeric_existence_agrees", cf.exists == num.exists, num.exists ? 1.0 : 0.0);
    if (cf.exists && num.exists) {
      double e = 0.0;
      for (double x : linspace(cf.a_minus, cf.b_plus, 201))
        e = std::max({e, std::abs(cf.A(x) - num.A(x)), std::abs(cf.Bc(x) - num.Bc(x))});
      check("numeric_curve_error", e < 1e-4, e);
      double eb = std::max(std::abs(cf.a_minus - num.a_minus), std::abs(cf.b_plus - num.b_plus));
      check("numeric_boundary_error", eb < 1e-4, eb);
    }
  }

  if (!sol.exists) {
    s.report << "bne does not exist: " << sol.failure << '\n';
  } else {
    VerificationReport vr = verify_solution(mkt, sol, s.grid("verify", 1000));
    check("foc_residual", vr.residuals.foc < 1e-6, vr.residuals.foc);
    check("consistency_residual", vr.residuals.consistency < 1e-6, vr.residuals.consistency);
    for (const auto& [name, ok] : vr.checks) check(name, ok, ok ? 1.0 : 0.0);

    PayoffContext ctx = sol.context(mkt);
    double ge = 0.0;
    for (int i = 1; i <= 100; ++i) {
      double x = sol.a_minus + (sol.b_plus - sol.a_minus) * i / 101.0;
      GammaPair g = gamma_series_oracle(ctx, x);
      ge = std::max({ge, std::abs(g.g1 - gamma1(ctx, x)), std::abs(g.g2 - gamma2(ctx, x))});
    }
    check("gamma_series", ge < 1e-9, ge);

    WelfareReport w = bne_profits(mkt, sol);
    double gap = w.P_total - competitive_profits(mkt).P_total;
    if (mkt.is_linear())
      check("welfare_equality", std::abs(gap) < 1e-6, gap);
    else
      s.report << "welfare gap (reported only) " << format_double(gap) << '\n';

    MonteCarloOptions mo = s.mc();
    if (!s.opts.runs && !s.cfg.get("simulate", "runs"))
      mo.runs = static_cast<std::uint64_t>(s.cfg.get_int("verify", "runs", 20000));
    mo.analytic = ctx.dists;
    SimSummary sum = monte_carlo(mkt, *sol.sellers, *sol.buyers, mo);
    double crit = 1.95 / std::sqrt(static_cast<double>(mo.runs));
    check("monte_carlo_ks", *sum.ks < crit, *sum.ks);
  }
  s.report << (all ? "verification passed" : "verification FAILED") << '\n';
  return all ? 0 : 1;
}

}  // namespace

int run(const RunOptions& opts, std::ostream& csv, std::ostream& report, std::ostream& err) {
  try {
    if (std::find(commands().begin(), commands().end(), opts.command) == commands().end())
      throw ConfigError("unknown command '" + opts.command + "'");
    if (opts.config_path.empty()) throw ConfigError("--config is required");
    Session s{opts, Config::load(opts.config_path), report, err, {}};
    s.csv.set("command", opts.command);
    s.csv.set("config_hash", s.cfg.hash());
    s.csv.set("seed", std::to_string(s.mc().seed));
    s.csv.set("version", CDA_LAB_VERSION);
    s.log(2, "config hash " + s.cfg.hash());

    int status = 0;
    if (opts.command == "bne") status = cmd_bne(s);
    else if (opts.command == "simulate") status = cmd_simulate(s);
    else if (opts.command == "price-cdf") status = cmd_price_cdf(s);
    else if (opts.command == "payoff") status = cmd_payoff(s);
    else if (opts.command == "welfare") status = cmd_welfare(s);
    else status = cmd_verify(s);

    if (opts.out) {
      std::ofstream f(*opts.out, std::ios::binary);
      if (!f) throw ConfigError("cannot write " + *opts.out);
      s.csv.write(f);
      if (!f) throw ConfigError("write failed for " + *opts.out);
    } else {
      s.csv.write(csv);
    }
    return status;
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return 2;
  } catch (const VerificationFailure& e) {
    err << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return 3;
  }
}

}  // namespace cda
