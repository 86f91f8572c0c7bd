// Classical Apriori-style F1/F2 mining, the sampling estimator, and rule
// generation.  These are the baselines and the correctness reference for the
// quantum pipeline.
#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qarm/dataset.hpp"

namespace qarm {

enum class ConfidenceDenominator { Consequent, Antecedent };

struct MiningConfig {
  double min_supp = 0.5;
  double min_conf = 0.5;
  double epsilon = 0.1;  // target root-sum-squared support error
  ConfidenceDenominator confidence_denominator = ConfidenceDenominator::Consequent;

  void validate() const {
    if (min_supp < 0 || min_supp > 1) throw std::invalid_argument("min_supp out of [0,1]");
    if (min_conf < 0 || min_conf > 1) throw std::invalid_argument("min_conf out of [0,1]");
    if (epsilon <= 0) throw std::invalid_argument("epsilon must be positive");
  }
};

struct FrequentSet {
  ItemSet itemset;
  double support = 0;
  bool estimated = false;
};

struct AssociationRule {
  ItemSet antecedent;
  ItemSet consequent;
  double support = 0;
  double confidence = 0;
};

// Frequent means support >= min_supp, applied uniformly everywhere.
inline std::vector<FrequentSet> apriori_f1(const TransactionDatabase& db,
                                           const MiningConfig& config) {
  config.validate();
  const SupportMatrix s = support_matrix_bruteforce(db);
  std::vector<FrequentSet> out;
  for (std::size_t i = 0; i < db.num_items(); ++i) {
    const double supp = s.value(i, i);
    if (supp >= config.min_supp)
      out.push_back({ItemSet{i}, supp, false});
  }
  return out;
}

// C2 = F1 |x| F1: all unordered pairs of distinct frequent items.
inline std::vector<ItemSet> candidate_join(const std::vector<ItemSet>& f1) {
  for (const auto& s : f1)
    if (s.size() != 1) throw std::invalid_argument("candidate_join expects 1-itemsets");
  std::vector<std::size_t> items;
  for (const auto& s : f1) items.push_back(s[0]);
  std::sort(items.begin(), items.end());
  std::vector<ItemSet> out;
  for (std::size_t a = 0; a < items.size(); ++a)
    for (std::size_t b = a + 1; b < items.size(); ++b)
      out.push_back(ItemSet{items[a], items[b]});
  return out;
}

inline std::vector<FrequentSet> apriori_f2(const TransactionDatabase& db,
                                           const std::vector<FrequentSet>& f1,
                                           const MiningConfig& config) {
  config.validate();
  std::vector<ItemSet> singles;
  for (const auto& f : f1) singles.push_back(f.itemset);
  const auto c2 = candidate_join(singles);
  const SupportMatrix s = support_matrix_bruteforce(db);
  std::vector<FrequentSet> out;
  for (const auto& pair : c2) {
    const double supp = s.value(pair[0], pair[1]);
    if (supp >= config.min_supp)
      out.push_back({pair, supp, false});
  }
  return out;
}

// Uniform-with-replacement transaction sampling, N_c draws per itemset.
inline std::vector<std::pair<ItemSet, double>> sampling_estimate_supports(
    const TransactionDatabase& db, const std::vector<ItemSet>& itemsets,
    std::size_t shots_per_itemset, std::uint64_t seed) {
  if (shots_per_itemset == 0) throw std::invalid_argument("N_c must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<std::pair<ItemSet, double>> out;
  for (const auto& s : itemsets) {
    validate_itemset(s, db.num_items());
    std::size_t hits = 0;
    for (std::size_t k = 0; k < shots_per_itemset; ++k) {
      const std::size_t row = static_cast<std::size_t>(
          uniform01(rng) * static_cast<double>(db.num_transactions()));
      const std::size_t r = std::min(row, db.num_transactions() - 1);
      bool all = true;
      for (std::size_t j : s)
        if (!db.at(r, j)) { all = false; break; }
      if (all) ++hits;
    }
    out.emplace_back(s, static_cast<double>(hits) /
                            static_cast<double>(shots_per_itemset));
  }
  return out;
}

namespace detail {
inline std::optional<double> support_of(const std::vector<FrequentSet>& sets,
                                        const ItemSet& s) {
  for (const auto& f : sets)
    if (f.itemset == s) return f.support;
  return std::nullopt;
}
}  // namespace detail

// Both orientations per frequent pair; confidence denominator is configurable
// (default divides by the consequent's support).
inline std::vector<AssociationRule> derive_rules(
    const std::vector<FrequentSet>& f1, const std::vector<FrequentSet>& f2,
    const MiningConfig& config) {
  config.validate();
  std::vector<AssociationRule> out;
  for (const auto& pair : f2) {
    if (pair.itemset.size() != 2) throw std::invalid_argument("f2 entry is not a pair");
    for (int dir = 0; dir < 2; ++dir) {
      const std::size_t ante = pair.itemset[dir];
      const std::size_t cons = pair.itemset[1 - dir];
      const std::size_t denom_item =
          config.confidence_denominator == ConfidenceDenominator::Consequent ? cons : ante;
      const auto denom = detail::support_of(f1, ItemSet{denom_item});
      if (!denom || *denom <= 0) continue;  // skipped, cannot occur for min_supp > 0
      const double conf = pair.support / *denom;
      if (conf >= config.min_conf)
        out.push_back({ItemSet{ante}, ItemSet{cons}, pair.support, conf});
    }
  }
  return out;
}

}  // namespace qarm
