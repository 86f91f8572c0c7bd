// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure.  Each check is seeded and deterministic.
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qarm/qminer.hpp"

namespace {

using namespace qarm;

constexpr double kPi = std::numbers::pi;

TransactionDatabase random_db(std::size_t n, std::size_t m, double density,
                              std::uint64_t seed) {
  return generate_synthetic(n, m, density * static_cast<double>(m), seed);
}

TransactionDatabase random_nonempty_db(std::size_t n, std::size_t m,
                                       double density, std::uint64_t seed) {
  for (std::uint64_t s = seed;; ++s) {
    auto db = random_db(n, m, density, s * 7919 + 1);
    if (db_stats(db).total_ones > 0) return db;
  }
}

std::vector<ItemSet> itemsets_of(const std::vector<FrequentSet>& v) {
  std::vector<ItemSet> out;
  for (const auto& f : v) out.push_back(f.itemset);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// 1. exact-mode quantum mining equals Apriori, supports within 1e-9

bool criterion_oracle_equivalence() {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto db = random_nonempty_db(16, 8, 0.25, seed);
    const auto s = support_matrix_bruteforce(db);
    for (int ti = 1; ti <= 9; ++ti) {
      MiningConfig cfg;
      cfg.min_supp = 0.1 * ti;
      const auto ap1 = apriori_f1(db, cfg);
      const auto ap2 = apriori_f2(db, ap1, cfg);
      F1Options o1;
      o1.shots = 0;
      const auto q1 = mine_f1_quantum(db, cfg, o1, seed);
      if (itemsets_of(q1) != itemsets_of(ap1)) return false;
      for (const auto& f : q1)
        if (std::abs(f.support - s.value(f.itemset[0], f.itemset[0])) > 1e-9)
          return false;
      if (q1.empty()) continue;
      F2Options o2;
      o2.shots = 0;
      const auto q2 = mine_f2_quantum(db, q1, cfg, {}, o2, seed);
      if (itemsets_of(q2) != itemsets_of(ap2)) return false;
      for (const auto& f : q2)
        if (std::abs(f.support - s.value(f.itemset[0], f.itemset[1])) > 1e-9)
          return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// 2. reduced density of the item register equals D^T D / W within 1e-10

bool criterion_rho_identity() {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto db = random_nonempty_db(16, 8, 0.25, seed);
    const PureState phi3 = prepare_phi3(db, Phi3Mode::ExactPostselect);
    const DensityOperator rho = reduced_density(phi3, "item");
    const auto stats = db_stats(db);
    const std::size_t m = db.num_items();
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t i = 0; i < db.num_transactions(); ++i)
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
          expected(a, b) += static_cast<double>(db.at(i, a) * db.at(i, b));
    expected /= static_cast<double>(stats.total_ones);
    const double err = (rho.matrix().real() - expected).norm();
    if (err > 1e-10) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// 3. amplification closed form within 1e-12

bool criterion_amplification() {
  struct Case { std::size_t total, marked; };
  for (const Case c : {Case{16, 1}, Case{16, 2}, Case{16, 4}, Case{16, 8}}) {
    const double p0 = static_cast<double>(c.marked) / static_cast<double>(c.total);
    const double theta = std::asin(std::sqrt(p0));
    for (long long k = 0; k <= 20; ++k) {
      Eigen::VectorXcd amp = Eigen::VectorXcd::Constant(
          c.total, 1.0 / std::sqrt(static_cast<double>(c.total)));
      PureState state({{"x", c.total}}, std::move(amp));
      auto marker = [&c](const std::vector<std::size_t>& vals) {
        return vals[0] < c.marked;
      };
      const PureState boosted = amplitude_amplify(state, marker, k);
      const double p = marked_probability(boosted, marker);
      const double want = std::pow(std::sin((2.0 * k + 1.0) * theta), 2);
      if (std::abs(p - want) > 1e-12) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// 4. F1 shot budget: sum of squared support errors <= eps^2 in >= 80/100 runs

bool criterion_f1_shot_budget() {
  // N=64, M=8 with W=128 (a=2 exactly) and a skewed column profile
  TransactionDatabase db(64, 8);
  const std::size_t counts[8] = {60, 54, 6, 3, 2, 1, 1, 1};
  for (std::size_t j = 0; j < 8; ++j)
    for (std::size_t i = 0; i < counts[j]; ++i) db.set(i, j, true);
  const auto s = support_matrix_bruteforce(db);
  const double eps = 0.1;

  MiningConfig cfg;
  cfg.min_supp = 0.0;
  cfg.epsilon = eps;
  int ok = 0;
  for (int run = 0; run < 100; ++run) {
    F1Options opts;
    opts.use_exact_a = true;  // N_q = ceil(a^2 / eps^2) with the true a
    const auto f1 = mine_f1_quantum(db, cfg, opts, 40000 + run);
    double sq = 0;
    for (std::size_t j = 0; j < 8; ++j) {
      double est = 0;
      for (const auto& f : f1)
        if (f.itemset[0] == j) est = f.support;
      sq += (est - s.value(j, j)) * (est - s.value(j, j));
    }
    if (sq <= eps * eps) ++ok;
  }
  std::printf("       f1 shot budget: %d/100 runs within eps^2\n", ok);
  return ok >= 80;
}

// ---------------------------------------------------------------------------
// 5. circuit-preparation error guarantee for d=4 full-rank operators with kappa=4

Eigen::MatrixXd random_orthogonal(std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd g(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return qr.householderQ();
}

double circuit_state_error(const DensityOperator& rho, const TomoConfig& cfg) {
  const PureState ideal = prepare_psi_ideal(rho);
  auto [circuit, ledger] = prepare_psi_circuit(rho, cfg);
  // global-phase aligned 2-norm distance
  const double overlap = std::abs(ideal.inner(circuit));
  return std::sqrt(std::max(0.0, 2.0 - 2.0 * std::min(overlap, 1.0)));
}

bool criterion_circuit_error_bound() {
  // a d=4 full-rank operator with lambda_min >= 1/kappa = 1/4 and trace one
  // has the uniform spectrum; the family varies the eigenbasis
  const std::size_t d = 4;
  std::vector<DensityOperator> family;
  for (std::uint64_t seed : {11u, 22u, 33u}) {
    const Eigen::MatrixXd q = random_orthogonal(d, seed);
    Eigen::MatrixXd m = q * (0.25 * Eigen::MatrixXd::Identity(d, d)) * q.transpose();
    family.emplace_back(m.cast<cplx>());
  }

  TomoConfig cfg;
  cfg.epsilon = 0.25;
  cfg.kappa = 4;
  if (cfg.resolved_t0() != 16 || cfg.resolved_t() != 1024 ||
      cfg.resolved_t() > 2048)
    return false;

  std::vector<double> base_errors;
  for (const auto& rho : family) {
    const double err = circuit_state_error(rho, cfg);
    std::printf("       circuit state error (t0=16): %.3e\n", err);
    if (err > 0.25) return false;
    base_errors.push_back(err);
  }

  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  double prev = -1;
  for (std::size_t t0 : {std::size_t{8}, std::size_t{16}, std::size_t{32}}) {
    TomoConfig c = cfg;
    c.t0 = t0;
    std::vector<double> errs;
    for (const auto& rho : family) errs.push_back(circuit_state_error(rho, c));
    const double med = median(errs);
    std::printf("       circuit median error at t0=%zu: %.3e\n", t0, med);
    if (prev >= 0 && med > prev + 1e-12) return false;
    prev = med;
  }
  return true;
}

// ---------------------------------------------------------------------------
// 6. postselection success probability identity plus sampled frequency

bool criterion_postselection() {
  std::vector<DensityOperator> ops;
  {
    Eigen::Matrix2cd sigma;
    sigma << 0.5, 1.0 / 3.0, 1.0 / 3.0, 0.5;
    ops.emplace_back(Eigen::MatrixXcd(sigma));
  }
  for (std::uint64_t seed : {5u, 6u}) {
    std::mt19937_64 rng(seed);
    Eigen::MatrixXd v(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) v(i, j) = uniform01(rng);
    Eigen::MatrixXd m = v * v.transpose();
    m /= m.trace();
    ops.emplace_back(m.cast<cplx>());
  }

  std::mt19937_64 rng(271828);
  for (const auto& rho : ops) {
    TomoConfig cfg;
    cfg.rotation_constant = 0.9;
    const double p = postselect_success_probability(rho, cfg);
    // independent identity: sum_j (C lambda_j)^2 / d = C^2 ||rho||_F^2 / d,
    // with the Frobenius norm taken entrywise rather than spectrally
    double frob_sq = 0;
    for (Eigen::Index i = 0; i < rho.matrix().rows(); ++i)
      for (Eigen::Index j = 0; j < rho.matrix().cols(); ++j)
        frob_sq += std::norm(rho.matrix()(i, j));
    const double expected =
        cfg.rotation_constant * cfg.rotation_constant * frob_sq /
        static_cast<double>(rho.dim());
    if (std::abs(p - expected) > 1e-9) return false;

    const int attempts = 10000;
    int hits = 0;
    for (int k = 0; k < attempts; ++k)
      if (uniform01(rng) < p) ++hits;
    const double freq = static_cast<double>(hits) / attempts;
    const double sigma3 = 3.0 * std::sqrt(p * (1.0 - p) / attempts);
    std::printf("       postselect p=%.6f sampled=%.6f (3s=%.6f)\n", p, freq, sigma3);
    if (std::abs(freq - p) > sigma3) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// 7. tomography shot bound: rank-2 nonnegative sigma, d=8, d'=8, 800 shots

bool criterion_tomography_shots() {
  const std::size_t d = 8;
  Eigen::VectorXd u1 = Eigen::VectorXd::Zero(d), u2 = Eigen::VectorXd::Zero(d);
  u1(0) = u1(1) = 1.0 / std::sqrt(2.0);
  u2(2) = u2(3) = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXd m = 0.6 * u1 * u1.transpose() + 0.4 * u2 * u2.transpose();
  const DensityOperator rho(m.cast<cplx>());
  const PureState psi = prepare_psi_ideal(rho);
  const double eps = 0.1;
  const std::size_t d_prime = significant_element_count(psi, eps);
  if (d_prime != 8) return false;

  int ok = 0;
  for (int run = 0; run < 100; ++run) {
    const auto res = reconstruct_elements(psi, rho.frobenius_norm(), d, d_prime,
                                          eps, 60000 + run);
    if (res.shots_used != 800) return false;
    const double sq = (res.elements - m).squaredNorm();
    if (sq <= eps * eps) ++ok;
  }
  std::printf("       tomography: %d/100 runs within eps^2\n", ok);
  return ok >= 80;
}

// ---------------------------------------------------------------------------
// 8. end-to-end margin soundness with default shots

bool criterion_margin_soundness() {
  // every true support is at least 2 eps = 0.2 away from min_supp = 0.5:
  // items 0,1 identical (supp 0.8), item 2 nested inside them (0.75),
  // item 3 disjoint (0.2); candidate-pair supports are 0.8 and 0.75
  TransactionDatabase db(20, 4);
  for (std::size_t i = 0; i < 16; ++i) {
    db.set(i, 0, true);
    db.set(i, 1, true);
  }
  for (std::size_t i = 0; i < 15; ++i) db.set(i, 2, true);
  for (std::size_t i = 16; i < 20; ++i) db.set(i, 3, true);

  MiningConfig cfg;
  cfg.min_supp = 0.5;
  cfg.epsilon = 0.1;
  const auto ap1 = itemsets_of(apriori_f1(db, cfg));
  const auto ap2 = itemsets_of(apriori_f2(db, apriori_f1(db, cfg), cfg));

  int ok = 0;
  for (int run = 0; run < 200; ++run) {
    FullRunOptions opts;  // ideal mode, default shot rules, counted a
    const auto report = mine_full(db, cfg, {}, opts, 80000 + run);
    if (itemsets_of(report.f1) == ap1 && itemsets_of(report.f2) == ap2) ++ok;
  }
  std::printf("       margin soundness: %d/200 runs match Apriori\n", ok);
  return ok >= 190;
}

// ---------------------------------------------------------------------------
// 9. ledger scaling exponents and the counting error bound

bool criterion_ledger_scaling() {
  const auto rep = ledger_scaling_report({4, 8, 16, 32}, 128, 2.0, 0.1, 8, 6);
  std::printf("       scaling: oracle exp %.3f, shots exp %.3f, counting ok %.2f\n",
              rep.oracle_exponent_vs_m, rep.shots_exponent_vs_m,
              rep.counting_ok_fraction);
  if (rep.oracle_exponent_vs_m < 0.35 || rep.oracle_exponent_vs_m > 0.65)
    return false;
  if (rep.shots_exponent_vs_m < -0.15 || rep.shots_exponent_vs_m > 0.15)
    return false;
  return rep.counting_ok_fraction >= 8.0 / (kPi * kPi);
}

// ---------------------------------------------------------------------------
// 10. S_bar reconstruction identity a_f * B * psi_ij

bool criterion_sbar_identity() {
  // the reference 4x3 database first
  TransactionDatabase ref(4, 3);
  const int bits[4][3] = {{1, 1, 0}, {1, 0, 1}, {1, 1, 1}, {0, 1, 0}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) ref.set(i, j, bits[i][j] == 1);
  {
    std::vector<FrequentSet> f1{{{0}, 0.75, false}, {{1}, 0.75, false}};
    auto [sigma, stats] = build_sigma(ref, f1);
    const double b = sigma.frobenius_norm();
    const double psi01 = std::abs(prepare_psi_ideal(sigma).amplitudes()[1]);
    if (std::abs(stats.avg_items_per_transaction - 1.5) > 1e-12) return false;
    if (std::abs(b - 0.8498) > 1e-3) return false;
    if (std::abs(psi01 - 0.3922) > 1e-3) return false;
    if (std::abs(support_from_amplitude(psi01, b, 1.5) - 0.5) > 1e-9) return false;
  }

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto db = random_nonempty_db(12, 6, 0.4, seed);
    const auto s = support_matrix_bruteforce(db);
    std::vector<FrequentSet> f1;
    ItemSet keep;
    for (std::size_t j = 0; j < db.num_items(); ++j)
      if (s.count(j, j) > 0) {
        f1.push_back({{j}, s.value(j, j), false});
        keep.push_back(j);
      }
    if (f1.empty()) return false;
    auto [sigma, stats] = build_sigma(db, f1);
    const PureState psi = prepare_psi_ideal(sigma);
    const double b = sigma.frobenius_norm();
    const std::size_t dd = keep.size();
    for (std::size_t a = 0; a < dd; ++a)
      for (std::size_t c = 0; c < dd; ++c) {
        const double got = support_from_amplitude(
            std::abs(psi.amplitudes()[a * dd + c]), b,
            stats.avg_items_per_transaction);
        if (std::abs(got - s.value(keep[a], keep[c])) > 1e-9) return false;
      }
  }
  return true;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    bool (*fn)();
  };
  const Criterion criteria[] = {
      {"oracle equivalence of exact-mode quantum mining with Apriori",
       criterion_oracle_equivalence},
      {"reduced density of the item register equals D^T D / W",
       criterion_rho_identity},
      {"amplitude amplification matches the closed form", criterion_amplification},
      {"F1 shot budget meets the squared-error target", criterion_f1_shot_budget},
      {"circuit state preparation meets its error bound",
       criterion_circuit_error_bound},
      {"postselection probability identity and sampled frequency",
       criterion_postselection},
      {"tomography meets the d'/eps^2 shot bound", criterion_tomography_shots},
      {"end-to-end pipeline is sound under a 2-eps margin",
       criterion_margin_soundness},
      {"ledger scaling exponents and counting bound", criterion_ledger_scaling},
      {"S_bar reconstruction identity a_f * B * psi_ij", criterion_sbar_identity},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    bool pass = false;
    try {
      pass = c.fn();
    } catch (const std::exception& e) {
      std::printf("       exception: %s\n", e.what());
    }
    std::printf("%s: %s\n", pass ? "PASS" : "FAIL", c.name);
    if (!pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
