#include "cda/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>

#include "cda/error.hpp"

namespace cda {

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"market", {"kind", "s_minus", "alpha", "d_plus", "beta", "supply", "demand"}},
      {"strategy", {"kind", "p", "seller_table", "buyer_table"}},
      {"bne", {"method", "grid", "tolerance", "max_bisections", "scan_points"}},
      {"simulate", {"runs", "seed", "workers", "bins", "finite_traders", "step_cap"}},
      {"payoff", {"side", "type", "x_min", "x_max", "grid"}},
      {"price_cdf", {"grid"}},
      {"welfare", {"grid"}},
      {"verify", {"runs", "grid"}},
  };
  return keys;
}

void check_keys(const boost::property_tree::ptree& tree) {
  for (const auto& [section, body] : tree) {
    auto it = known_keys().find(section);
    if (it == known_keys().end()) throw ConfigError("unknown section [" + section + "]");
    if (!body.data().empty()) throw ConfigError("key '" + section + "' outside any section");
    for (const auto& [key, value] : body)
      if (!it->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
  }
}

double to_double(const std::string& s, const std::string& where) {
  std::string t = boost::trim_copy(s);
  try {
    std::size_t used = 0;
    double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(where + ": '" + t + "' is not a number");
  }
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

Config Config::parse(const std::string& text) {
  Config c;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, c.tree_);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(e.message() + " at line " + std::to_string(e.line()));
  }
  check_keys(c.tree_);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
  c.hash_ = buf;
  return c;
}

bool Config::has(const std::string& section) const {
  return tree_.find(section) != tree_.not_found();
}

std::optional<std::string> Config::get(const std::string& section, const std::string& key) const {
  auto s = tree_.get_child_optional(section);
  if (!s) return std::nullopt;
  auto v = s->get_optional<std::string>(key);
  if (!v) return std::nullopt;
  return boost::trim_copy(*v);
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  return get(section, key).value_or(fallback);
}

double Config::get_double(const std::string& section, const std::string& key) const {
  auto v = get(section, key);
  if (!v) throw ConfigError("missing " + section + "." + key);
  return to_double(*v, section + "." + key);
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
  auto v = get(section, key);
  return v ? to_double(*v, section + "." + key) : fallback;
}

long long Config::get_int(const std::string& section, const std::string& key,
                          long long fallback) const {
  auto v = get(section, key);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    long long n = std::stoll(*v, &used);
    if (used != v->size()) throw std::invalid_argument(*v);
    return n;
  } catch (const std::exception&) {
    throw ConfigError(section + "." + key + ": '" + *v + "' is not an integer");
  }
}

std::vector<std::pair<double, double>> parse_pairs(const std::string& text) {
  std::vector<std::string> items;
  boost::split(items, text, boost::is_any_of(","));
  std::vector<std::pair<double, double>> out;
  for (const std::string& item : items) {
    if (boost::trim_copy(item).empty()) continue;
    auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("expected 'a:b', got '" + item + "'");
    out.emplace_back(to_double(item.substr(0, colon), "pair"),
                     to_double(item.substr(colon + 1), "pair"));
  }
  if (out.size() < 2) throw ConfigError("a table needs at least two points");
  return out;
}

Market build_market(const Config& cfg) {
  if (!cfg.has("market")) throw ConfigError("missing [market] section");
  std::string kind = cfg.get_string("market", "kind", "linear");
  try {
    if (kind == "linear")
      return Market::linear(cfg.get_double("market", "s_minus"), cfg.get_double("market", "alpha"),
                            cfg.get_double("market", "d_plus"), cfg.get_double("market", "beta"));
    if (kind == "tabulated") {
      auto s = cfg.get("market", "supply"), d = cfg.get("market", "demand");
      if (!s || !d) throw ConfigError("tabulated market needs supply and demand points");
      return Market::tabulated(parse_pairs(*s), parse_pairs(*d));
    }
  } catch (const InvalidMarket& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("market.kind must be linear or tabulated, got '" + kind + "'");
}

BneOptions bne_options(const Config& cfg) {
  BneOptions o;
  o.max_bisections = static_cast<int>(cfg.get_int("bne", "max_bisections", o.max_bisections));
  o.scan_points = static_cast<int>(cfg.get_int("bne", "scan_points", o.scan_points));
  o.tolerance = cfg.get_double("bne", "tolerance", o.tolerance);
  if (o.max_bisections < 1 || o.scan_points < 3 || !(o.tolerance > 0))
    throw ConfigError("bne options out of range");
  return o;
}

EquilibriumSolution solve_configured_bne(const Config& cfg, const Market& mkt) {
  std::string method = cfg.get_string("bne", "method", "auto");
  if (method == "closed_form") {
    if (!mkt.is_linear()) throw ConfigError("closed_form needs a linear market");
    return solve_linear_bne(mkt);
  }
  if (method == "shooting") return solve_bne_numeric(mkt, bne_options(cfg));
  if (method == "auto")
    return mkt.is_linear() ? solve_linear_bne(mkt) : solve_bne_numeric(mkt, bne_options(cfg));
  throw ConfigError("bne.method must be auto, closed_form or shooting");
}

StrategySetup build_strategy(const Config& cfg, const Market& mkt) {
  std::string kind = cfg.get_string("strategy", "kind", "bne");
  if (kind == "zic")
    return {kind, StrategyProfile::zic(Side::Seller), StrategyProfile::zic(Side::Buyer), {}, {}};
  if (kind == "one_price") {
    auto p_text = cfg.get("strategy", "p");
    double p = (!p_text || *p_text == "competitive") ? competitive_equilibrium(mkt).price
                                                     : cfg.get_double("strategy", "p");
    try {
      auto op = one_price_profile(mkt, p);
      return {kind, op.sellers, op.buyers, {}, p};
    } catch (const NoIntramarginalMass& e) {
      throw ConfigError(e.what());
    }
  }
  if (kind == "table") {
    auto s = cfg.get("strategy", "seller_table"), b = cfg.get("strategy", "buyer_table");
    if (!s || !b) throw ConfigError("table strategy needs seller_table and buyer_table");
    try {
      return {kind, StrategyProfile::from_table(Side::Seller, parse_pairs(*s)),
              StrategyProfile::from_table(Side::Buyer, parse_pairs(*b)), {}, {}};
    } catch (const ProfileMismatch& e) {
      throw ConfigError(e.what());
    }
  }
  if (kind == "bne") {
    EquilibriumSolution sol = solve_configured_bne(cfg, mkt);
    if (!sol.exists) throw AssumptionViolated("the market has no equilibrium: " + sol.failure);
    return {kind, *sol.sellers, *sol.buyers, sol, {}};
  }
  throw ConfigError("strategy.kind must be bne, one_price, zic or table, got '" + kind + "'");
}

PayoffContext strategy_context(const Market& mkt, const StrategySetup& setup) {
  if (setup.solution) return setup.solution->context(mkt);
  return PayoffContext::make(mkt, setup.sellers, setup.buyers);
}

MonteCarloOptions simulate_options(const Config& cfg) {
  MonteCarloOptions o;
  long long runs = cfg.get_int("simulate", "runs", static_cast<long long>(o.runs));
  long long seed = cfg.get_int("simulate", "seed", static_cast<long long>(o.seed));
  long long workers = cfg.get_int("simulate", "workers", o.workers);
  long long bins = cfg.get_int("simulate", "bins", o.bins);
  long long finite = cfg.get_int("simulate", "finite_traders", 0);
  long long cap = cfg.get_int("simulate", "step_cap", static_cast<long long>(o.auction.step_cap));
  if (runs < 1 || seed < 0 || workers < 1 || bins < 1 || finite < 0 || cap < 1)
    throw ConfigError("simulate options out of range");
  o.runs = static_cast<std::uint64_t>(runs);
  o.seed = static_cast<std::uint64_t>(seed);
  o.workers = static_cast<int>(workers);
  o.bins = static_cast<int>(bins);
  o.auction.finite_traders = static_cast<int>(finite);
  o.auction.step_cap = static_cast<std::uint64_t>(cap);
  return o;
}

}  // namespace cda
