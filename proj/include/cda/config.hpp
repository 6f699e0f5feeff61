#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "cda/equilibrium.hpp"
#include "cda/market.hpp"
#include "cda/payoff.hpp"
#include "cda/simulator.hpp"
#include "cda/strategy.hpp"

namespace cda {

std::uint64_t fnv1a64(std::string_view bytes);

/// INI-style run configuration: `[section]` headers and `key = value`
/// lines, `;` or `#` comments. Unknown sections and keys are rejected.
class Config {
 public:
  static Config load(const std::string& path);
  static Config parse(const std::string& text);

  /// FNV-1a 64 of the raw text, 16 hex digits.
  const std::string& hash() const { return hash_; }

  bool has(const std::string& section) const;
  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  long long get_int(const std::string& section, const std::string& key, long long fallback) const;

 private:
  boost::property_tree::ptree tree_;
  std::string hash_;
};

/// Parses "a:b, c:d, ..." into pairs.
std::vector<std::pair<double, double>> parse_pairs(const std::string& text);

Market build_market(const Config& cfg);

BneOptions bne_options(const Config& cfg);
/// [bne] method = auto (closed form for linear markets, shooting otherwise),
/// closed_form or shooting.
EquilibriumSolution solve_configured_bne(const Config& cfg, const Market& mkt);

struct StrategySetup {
  std::string kind;
  StrategyProfile sellers;
  StrategyProfile buyers;
  std::optional<EquilibriumSolution> solution;  // kind = bne
  std::optional<double> price;                  // kind = one_price
};

StrategySetup build_strategy(const Config& cfg, const Market& mkt);
PayoffContext strategy_context(const Market& mkt, const StrategySetup& setup);

MonteCarloOptions simulate_options(const Config& cfg);

}  // namespace cda
