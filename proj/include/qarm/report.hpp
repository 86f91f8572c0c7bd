// JSON report serialization shared by the CLI commands and golden-file tests.
#pragma once

#include <cstdio>
#include <string>

#include <json.hpp>

#include "qarm/classical.hpp"
#include "qarm/qminer.hpp"
#include "qarm/tomo.hpp"

namespace qarm {

using json = nlohmann::ordered_json;

// Floats carry 12 significant digits in reports (golden-file stability).
inline double round12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::strtod(buf, nullptr);
}

inline json to_json(const ItemSet& s) {
  json a = json::array();
  for (std::size_t i : s) a.push_back(i);
  return a;
}

inline json to_json(const FrequentSet& f) {
  return json{{"items", to_json(f.itemset)},
              {"support", round12(f.support)},
              {"estimated", f.estimated}};
}

inline json to_json(const AssociationRule& r) {
  return json{{"antecedent", to_json(r.antecedent)},
              {"consequent", to_json(r.consequent)},
              {"support", round12(r.support)},
              {"confidence", round12(r.confidence)}};
}

inline json to_json(const CostLedger& l) {
  return json{{"oracle_calls", l.oracle_calls},
              {"rho_copies", l.rho_copies},
              {"shots", l.shots},
              {"postselect_attempts", l.postselect_attempts},
              {"state_prep_units", l.state_prep_units}};
}

inline json frequent_sets_json(const std::vector<FrequentSet>& v) {
  json a = json::array();
  for (const auto& f : v) a.push_back(to_json(f));
  return a;
}

inline json rules_json(const std::vector<AssociationRule>& v) {
  json a = json::array();
  for (const auto& r : v) a.push_back(to_json(r));
  return a;
}

inline json itemsets_json(const std::vector<ItemSet>& v) {
  json a = json::array();
  for (const auto& s : v) a.push_back(to_json(s));
  return a;
}

inline json mining_report_json(const json& config_echo,
                               const QuantumMiningReport& report) {
  return json{{"config_echo", config_echo},
              {"f1", frequent_sets_json(report.f1)},
              {"f2", frequent_sets_json(report.f2)},
              {"rules", rules_json(report.rules)},
              {"ledger", to_json(report.ledger)},
              {"flags", itemsets_json(report.uncertainty_flags)},
              {"baseline_diff", itemsets_json(report.baseline_diff)},
              {"timings", json::object()}};
}

inline json classical_report_json(const json& config_echo,
                                  const std::vector<FrequentSet>& f1,
                                  const std::vector<FrequentSet>& f2,
                                  const std::vector<AssociationRule>& rules) {
  return json{{"config_echo", config_echo},
              {"f1", frequent_sets_json(f1)},
              {"f2", frequent_sets_json(f2)},
              {"rules", rules_json(rules)},
              {"ledger", to_json(CostLedger{})},
              {"flags", json::array()},
              {"baseline_diff", json::array()},
              {"timings", json::object()}};
}

inline json tomography_result_json(const json& config_echo,
                                   const TomographyResult& res) {
  json elements = json::array();
  for (Eigen::Index i = 0; i < res.elements.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < res.elements.cols(); ++j)
      row.push_back(round12(res.elements(i, j)));
    elements.push_back(row);
  }
  json eig = json::array();
  for (double lam : res.eigenvalue_estimates) eig.push_back(round12(lam));
  return json{{"config_echo", config_echo},
              {"elements", elements},
              {"b_estimate", round12(res.b_estimate)},
              {"eigenvalues", eig},
              {"shots", res.shots_used},
              {"ledger", to_json(res.ledger)}};
}

// Minimal structural check against the shipped schema: every key listed in
// schema["required"] must be present with the declared JSON type.
inline bool validate_against_schema(const json& doc, const json& schema,
                                    std::string* why = nullptr) {
  if (!schema.contains("required") || !schema.contains("properties")) {
    if (why) *why = "schema missing required/properties";
    return false;
  }
  for (const auto& key : schema["required"]) {
    const std::string k = key.get<std::string>();
    if (!doc.contains(k)) {
      if (why) *why = "missing key: " + k;
      return false;
    }
    const auto& prop = schema["properties"][k];
    if (prop.contains("type")) {
      const std::string want = prop["type"].get<std::string>();
      const std::string got = doc[k].type_name();
      if (want != got && !(want == "number" && got == "number")) {
        if (why) *why = "key " + k + " has type " + got + ", expected " + want;
        return false;
      }
    }
  }
  return true;
}

}  // namespace qarm
