#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pnls/config.hpp"

namespace pnls {

/// One pinned comparison of a measured value against a fixed limit.
struct Check {
  std::string label;
  double value = 0.0;
  std::string relation;  // "<=", "<", ">=", ">", "in"
  double limit = 0.0;    // upper/lower limit, or the lower end for "in"
  double limit_hi = 0.0; // upper end for "in"
  bool pass = false;

  /// Distance to failure: limit/value for upper limits, value/limit for
  /// lower limits, relative distance to the nearer end for intervals.
  double margin() const;
  std::string describe() const;
};

Check at_most(std::string label, double value, double limit);
Check below(std::string label, double value, double limit);
Check at_least(std::string label, double value, double limit);
Check above(std::string label, double value, double limit);
Check within(std::string label, double value, double lo, double hi);

struct CriterionResult {
  int id = 0;
  std::string name;
  std::string title;
  std::vector<Check> checks;
  double seconds = 0.0;
  double budget_seconds = 0.0;
  std::string error;  // set when the scenario threw
  bool pass() const;
  /// Single summary line: verdict, id, name, every check with its margin, timing.
  std::string line() const;
};

struct CatalogContext {
  /// When set, run-based criteria write their scenario artifacts to
  /// <artifacts>/<criterion name>[/<sub-run>].
  std::optional<std::filesystem::path> artifacts;
};

struct CatalogEntry {
  int id;
  std::string name;
  std::string title;
  double budget_seconds;
  std::function<std::vector<Check>(const CatalogContext&)> run;
};

const std::vector<CatalogEntry>& catalog();
/// Looks an entry up by name or by its number; throws InvalidArgument.
const CatalogEntry& catalog_entry(const std::string& name_or_id);
/// Runs one entry, timing it and turning thrown errors into a failed result.
CriterionResult run_criterion(const CatalogEntry& entry, const CatalogContext& ctx = {});

/// The scenario configurations the run-based criteria execute, by name.
std::vector<std::pair<std::string, ScenarioConfig>> catalog_scenarios();

}  // namespace pnls
