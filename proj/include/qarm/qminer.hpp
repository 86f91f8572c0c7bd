// End-to-end quantum mining pipelines: F1 via amplitude amplification plus
// diagonal sampling, F2 via the sigma construction plus pure-state-based
// tomography, support reconstruction, and the ledger scaling report.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qarm/classical.hpp"
#include "qarm/dataset.hpp"
#include "qarm/qsim.hpp"
#include "qarm/tomo.hpp"

namespace qarm {

enum class Phi3Mode { ExactPostselect, Grover };

struct QuantumMiningReport {
  std::vector<FrequentSet> f1;
  std::vector<FrequentSet> f2;
  std::vector<AssociationRule> rules;
  CostLedger ledger;
  std::vector<ItemSet> uncertainty_flags;  // |s_hat - min_supp| < eps
  std::vector<ItemSet> baseline_diff;      // symmetric difference vs Apriori
  std::vector<ItemSet> clipped;            // estimates clipped to 1
};

// |phi3> = sum_ij D_ij |i>|j> / sqrt(W), with ledger accounting for the
// preparation route.  Caller must ensure W > 0.
inline PureState prepare_phi3(const TransactionDatabase& db, Phi3Mode mode,
                              CostLedger* ledger = nullptr,
                              std::optional<double> marked_fraction_hint = std::nullopt) {
  PureState state = prepare_uniform(db.num_transactions(), db.num_items());
  CostLedger local;
  state = apply_oracle(state, db, &local);
  auto marker = [&state](const std::vector<std::size_t>& vals) {
    return vals[2] == 1;  // flag register
  };
  if (mode == Phi3Mode::Grover) {
    const double p0_true = marked_probability(state, marker);
    const double p0 = marked_fraction_hint.value_or(p0_true);
    const long long k = grover_iteration_count(p0);
    state = amplitude_amplify(state, marker, k);
    const double p_succ = marked_probability(state, marker);
    auto [post, p] = postselect(state, "flag", 1, &local);
    // one oracle call per attempt for the preparation, two per Grover
    // iterate (reflection about A|0> recomputes and uncomputes the oracle)
    local.oracle_calls =
        std::max<long long>(1, (2 * k + 1) * expected_repetitions(p_succ));
    local.state_prep_units += 1;
    if (ledger) *ledger += local;
    post.contract("flag", Eigen::Vector2cd(0, 1));
    return post;
  }
  auto [post, p] = postselect(state, "flag", 1, &local);
  local.oracle_calls = std::max<long long>(1, expected_repetitions(p));
  local.state_prep_units += 1;
  if (ledger) *ledger += local;
  post.contract("flag", Eigen::Vector2cd(0, 1));
  return post;
}

struct F1Options {
  Phi3Mode mode = Phi3Mode::ExactPostselect;
  // shots: unset -> default rule ceil(a_hat^2 / eps^2); 0 -> exact
  // (infinite-shot) probabilities
  std::optional<std::size_t> shots;
  bool use_exact_a = false;       // otherwise a_hat from quantum counting
  unsigned counting_bits = 8;
};

inline std::vector<FrequentSet> mine_f1_quantum(const TransactionDatabase& db,
                                                const MiningConfig& config,
                                                const F1Options& opts,
                                                std::uint64_t seed,
                                                CostLedger* ledger = nullptr) {
  config.validate();
  const auto stats = db_stats(db);
  if (stats.total_ones == 0) return {};

  CostLedger local;
  const bool exact = opts.shots.has_value() && *opts.shots == 0;
  double a_hat = stats.avg_items_per_transaction;
  if (!opts.use_exact_a && !exact) {
    const double w_hat = quantum_count_ones(db, opts.counting_bits, seed ^ 0x9e3779b9, &local);
    a_hat = w_hat / static_cast<double>(db.num_transactions());
  }

  PureState phi3 = prepare_phi3(db, opts.mode, &local);
  const DensityOperator rho = reduced_density(phi3, "item");

  std::vector<double> p_hat(db.num_items(), 0.0);
  if (exact) {
    for (std::size_t j = 0; j < db.num_items(); ++j)
      p_hat[j] = rho.matrix()(j, j).real();
  } else {
    const std::size_t n_q = opts.shots.value_or(static_cast<std::size_t>(
        std::ceil(a_hat * a_hat / (config.epsilon * config.epsilon))));
    const auto counts = sample_computational_basis(rho, n_q, seed, &local);
    for (const auto& [j, c] : counts)
      p_hat[j] = static_cast<double>(c) / static_cast<double>(n_q);
  }

  // exact mode reproduces the true supports up to float rounding, so the
  // threshold comparison gets a matching slack to avoid boundary flips
  const double slack = exact ? 1e-12 : 0.0;
  std::vector<FrequentSet> out;
  for (std::size_t j = 0; j < db.num_items(); ++j) {
    double s_hat = a_hat * p_hat[j];
    s_hat = std::min(s_hat, 1.0);
    if (s_hat >= config.min_supp - slack)
      out.push_back({ItemSet{j}, s_hat, !exact});
  }
  if (ledger) *ledger += local;
  return out;
}

// sigma = D_f^T D_f / tr(D_f^T D_f) over the frequent items, built through
// the |phi3> construction on the projected database.
inline std::pair<DensityOperator, DatabaseStats> build_sigma(
    const TransactionDatabase& db, const std::vector<FrequentSet>& f1,
    CostLedger* ledger = nullptr) {
  if (f1.empty()) throw std::invalid_argument("f1 must be nonempty");
  ItemSet keep;
  for (const auto& f : f1) keep.push_back(f.itemset.at(0));
  std::sort(keep.begin(), keep.end());
  const TransactionDatabase dbf = project_columns(db, keep);
  const auto stats_full = db_stats(db);
  const auto stats_f = db_stats(dbf);
  if (stats_f.total_ones == 0)
    throw std::invalid_argument("projected database has no ones");
  if (stats_f.avg_items_per_transaction >
      stats_full.avg_items_per_transaction + 1e-12)
    throw std::logic_error("a_f exceeds a");
  PureState phi3 = prepare_phi3(dbf, Phi3Mode::ExactPostselect, ledger);
  return {reduced_density(phi3, "item"), stats_f};
}

// S_bar_ij = a_f * B * psi_ij (the dimensionally consistent composition of
// sigma_ij = B psi_ij and S_bar = a_f sigma).
inline double support_from_amplitude(double psi_amplitude, double b_estimate,
                                     double a_f) {
  if (psi_amplitude < 0 || b_estimate < 0 || a_f < 0)
    throw std::invalid_argument("inputs must be nonnegative");
  return a_f * b_estimate * psi_amplitude;
}

struct F2Options {
  TomoMode mode = TomoMode::Ideal;
  // shots: unset -> ceil(M1' / eps^2); 0 -> exact probabilities
  std::optional<std::size_t> shots;
  std::optional<std::size_t> m1_prime;  // unset -> count entries >= min_supp/2
  bool exact_b = true;                  // otherwise B from sampled qpca
  std::size_t qpca_shots = 2000;
};

inline std::vector<FrequentSet> mine_f2_quantum(const TransactionDatabase& db,
                                                const std::vector<FrequentSet>& f1,
                                                const MiningConfig& config,
                                                const TomoConfig& tomo_config,
                                                const F2Options& opts,
                                                std::uint64_t seed,
                                                CostLedger* ledger = nullptr,
                                                std::vector<ItemSet>* flags = nullptr,
                                                std::vector<ItemSet>* clipped = nullptr) {
  config.validate();
  std::vector<ItemSet> singles;
  for (const auto& f : f1) singles.push_back(f.itemset);
  const auto c2 = candidate_join(singles);
  if (c2.empty()) return {};

  CostLedger local;
  auto [sigma, stats_f] = build_sigma(db, f1, &local);
  const double a_f = stats_f.avg_items_per_transaction;
  const std::size_t d = sigma.dim();

  // map original item id -> sigma index
  ItemSet keep;
  for (const auto& f : f1) keep.push_back(f.itemset.at(0));
  std::sort(keep.begin(), keep.end());
  auto sigma_index = [&keep](std::size_t item) {
    return static_cast<std::size_t>(
        std::lower_bound(keep.begin(), keep.end(), item) - keep.begin());
  };

  const bool exact = opts.shots.has_value() && *opts.shots == 0;

  PureState psi = prepare_psi_ideal(sigma);
  if (opts.mode == TomoMode::Circuit) {
    auto [circuit_psi, circuit_ledger] = prepare_psi_circuit(sigma, tomo_config);
    local += circuit_ledger;
    psi = std::move(circuit_psi);
  }

  double b_hat = sigma.frobenius_norm();
  if (!opts.exact_b && !exact) {
    const double cutoff = tomo_config.branch == TomoBranch::LowRank
                              ? tomo_config.epsilon_eff
                              : 0.0;
    const auto ests = qpca_eigenvalues(sigma, tomo_config, opts.qpca_shots,
                                       seed ^ 0x7f4a7c15, &local);
    std::vector<double> lams;
    for (const auto& [lam, weight] : ests)
      if (weight > 0) lams.push_back(lam);
    b_hat = estimate_B(lams, cutoff);
  }

  // psi_hat amplitudes for the candidate cells
  Eigen::MatrixXd psi_hat = Eigen::MatrixXd::Zero(d, d);
  std::size_t shots = 0;
  if (exact) {
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        psi_hat(i, j) = std::abs(psi.amplitudes()[i * d + j]);
  } else {
    std::size_t m1p;
    if (opts.m1_prime) {
      m1p = *opts.m1_prime;
    } else {
      // test-mode policy: count true entries of S_bar >= min_supp / 2
      const SupportMatrix s = support_matrix_bruteforce(db);
      m1p = 0;
      for (std::size_t a = 0; a < keep.size(); ++a)
        for (std::size_t b = 0; b < keep.size(); ++b)
          if (s.value(keep[a], keep[b]) >= config.min_supp / 2.0) ++m1p;
      m1p = std::max<std::size_t>(m1p, 1);
    }
    shots = opts.shots.value_or(static_cast<std::size_t>(
        std::ceil(static_cast<double>(m1p) / (config.epsilon * config.epsilon))));
    const auto counts = sample_computational_basis(psi, shots, seed ^ 0x2545f491, &local);
    for (const auto& [flat, c] : counts)
      psi_hat(flat / d, flat % d) =
          std::sqrt(static_cast<double>(c) / static_cast<double>(shots));
  }

  const double slack = exact ? 1e-12 : 0.0;
  std::vector<FrequentSet> out;
  for (const auto& pair : c2) {
    const std::size_t i = sigma_index(pair[0]);
    const std::size_t j = sigma_index(pair[1]);
    double s_hat = support_from_amplitude(psi_hat(i, j), b_hat, a_f);
    if (s_hat > 1.0) {
      s_hat = 1.0;
      if (clipped) clipped->push_back(pair);
    }
    if (flags && std::abs(s_hat - config.min_supp) < config.epsilon)
      flags->push_back(pair);
    if (s_hat >= config.min_supp - slack)
      out.push_back({pair, s_hat, !exact});
  }
  if (ledger) *ledger += local;
  return out;
}

struct FullRunOptions {
  F1Options f1;
  F2Options f2;
};

inline QuantumMiningReport mine_full(const TransactionDatabase& db,
                                     const MiningConfig& config,
                                     const TomoConfig& tomo_config,
                                     const FullRunOptions& opts,
                                     std::uint64_t seed) {
  QuantumMiningReport report;
  const auto stats = db_stats(db);
  if (stats.total_ones == 0) return report;

  report.f1 = mine_f1_quantum(db, config, opts.f1, seed, &report.ledger);
  for (const auto& f : report.f1)
    if (std::abs(f.support - config.min_supp) < config.epsilon)
      report.uncertainty_flags.push_back(f.itemset);
  if (!report.f1.empty())
    report.f2 = mine_f2_quantum(db, report.f1, config, tomo_config, opts.f2,
                                seed + 1, &report.ledger,
                                &report.uncertainty_flags, &report.clipped);
  report.rules = derive_rules(report.f1, report.f2, config);

  // baseline symmetric difference (always computable at desk scale)
  const auto ap1 = apriori_f1(db, config);
  const auto ap2 = apriori_f2(db, ap1, config);
  auto collect = [](const std::vector<FrequentSet>& v) {
    std::vector<ItemSet> s;
    for (const auto& f : v) s.push_back(f.itemset);
    std::sort(s.begin(), s.end());
    return s;
  };
  auto mine1 = collect(report.f1), mine2 = collect(report.f2);
  auto base1 = collect(ap1), base2 = collect(ap2);
  auto sym_diff = [&report](const std::vector<ItemSet>& a, const std::vector<ItemSet>& b) {
    std::vector<ItemSet> d;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                  std::back_inserter(d));
    for (auto& x : d) report.baseline_diff.push_back(std::move(x));
  };
  sym_diff(mine1, base1);
  sym_diff(mine2, base2);
  return report;
}

struct ScalingRow {
  std::size_t num_items = 0;
  long long prep_oracle_calls = 0;
  long long f1_shots = 0;
  double nm_over_w = 0;
  bool counting_within_bound = false;
};

struct ScalingReport {
  std::vector<ScalingRow> rows;
  double oracle_exponent_vs_m = 0;  // expect ~0.5
  double shots_exponent_vs_m = 0;   // expect ~0
  double counting_ok_fraction = 0;
};

inline double fit_loglog_slope(const std::vector<double>& x,
                               const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("need matching sweeps of length >= 2");
  double mx = 0, my = 0;
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    lx[k] = std::log(x[k]);
    ly[k] = std::log(y[k]);
    mx += lx[k];
    my += ly[k];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double num = 0, den = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    num += (lx[k] - mx) * (ly[k] - my);
    den += (lx[k] - mx) * (lx[k] - mx);
  }
  return num / den;
}

inline ScalingReport ledger_scaling_report(const std::vector<std::size_t>& item_counts,
                                           std::size_t num_transactions,
                                           double target_a, double epsilon,
                                           unsigned counting_bits,
                                           std::uint64_t seed) {
  if (item_counts.size() < 3)
    throw std::invalid_argument("scaling sweep needs >= 3 points");
  ScalingReport report;
  std::vector<double> ms, calls, shots;
  std::size_t counting_ok = 0;
  for (std::size_t idx = 0; idx < item_counts.size(); ++idx) {
    const std::size_t m = item_counts[idx];
    const TransactionDatabase db =
        generate_synthetic(num_transactions, m, target_a, seed + idx);
    const auto stats = db_stats(db);
    if (stats.total_ones == 0) throw std::invalid_argument("degenerate sweep point");

    CostLedger prep;
    prepare_phi3(db, Phi3Mode::Grover, &prep);

    const double a = stats.avg_items_per_transaction;
    const long long n_q = static_cast<long long>(
        std::ceil(a * a / (epsilon * epsilon)));

    CostLedger count_ledger;
    const double w_hat =
        quantum_count_ones(db, counting_bits, seed + 100 + idx, &count_ledger);
    const double bound = quantum_count_error_bound(
        stats.total_ones, db.num_transactions() * db.num_items(), counting_bits);
    if (std::abs(w_hat - static_cast<double>(stats.total_ones)) <= bound)
      ++counting_ok;

    ScalingRow row;
    row.num_items = m;
    row.prep_oracle_calls = prep.oracle_calls;
    row.f1_shots = n_q;
    row.nm_over_w = static_cast<double>(db.num_transactions() * m) /
                    static_cast<double>(stats.total_ones);
    row.counting_within_bound =
        std::abs(w_hat - static_cast<double>(stats.total_ones)) <= bound;
    report.rows.push_back(row);

    ms.push_back(static_cast<double>(m));
    calls.push_back(static_cast<double>(prep.oracle_calls));
    shots.push_back(static_cast<double>(n_q));
  }
  report.oracle_exponent_vs_m = fit_loglog_slope(ms, calls);
  report.shots_exponent_vs_m = fit_loglog_slope(ms, shots);
  report.counting_ok_fraction =
      static_cast<double>(counting_ok) / static_cast<double>(item_counts.size());
  return report;
}

}  // namespace qarm
