// Command-line orchestration: argument parsing, command dispatch, and JSON
// report emission.
#pragma once

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "qarm/report.hpp"

namespace qarm {

constexpr std::uint64_t kDefaultSeed = 12345;

enum class Command { None, Generate, MineClassical, MineQuantum, TomoBench, Compare, Scaling };

struct RunConfig {
  Command command = Command::None;

  std::string dataset_path;
  std::string output_path;  // empty -> stdout
  std::string format = "item-list";

  MiningConfig mining;
  TomoConfig tomo;

  // generate
  std::size_t gen_n = 100, gen_m = 8;
  double gen_target_a = 2.0;

  // quantum options
  std::string mode = "ideal";        // ideal | circuit
  std::string phi3_mode = "exact";   // exact | grover
  long long shots_f1 = -1;           // -1 default rule, 0 exact
  long long shots_f2 = -1;
  long long m1_prime = -1;
  bool use_exact_a = false;
  bool sampling_baseline = false;
  long long sampling_shots = 1000;

  // scaling
  std::vector<std::size_t> sweep_items;
  std::size_t sweep_n = 48;
  double sweep_target_a = 2.0;
  unsigned counting_bits = 8;

  double compare_tolerance = 1e-9;

  std::uint64_t seed = kDefaultSeed;
};

struct ParseResult {
  RunConfig config;
  int exit_code = 0;
  bool should_run = false;
  std::string message;
};

inline ParseResult parse_args(const std::vector<std::string>& argv) {
  ParseResult result;
  RunConfig& cfg = result.config;
  if (const char* env = std::getenv("QARM_SEED")) cfg.seed = std::strtoull(env, nullptr, 10);

  CLI::App app{"qarm: quantum and classical frequent-itemset mining at desk scale"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub, bool needs_db) {
    if (needs_db)
      sub->add_option("--db", cfg.dataset_path, "transaction database file")->required();
    sub->add_option("--format", cfg.format, "item-list | dense")
        ->check(CLI::IsMember({"item-list", "dense"}));
    sub->add_option("--out", cfg.output_path, "output path (default stdout)");
    sub->add_option("--seed", cfg.seed, "rng seed (QARM_SEED env overrides default)");
  };
  auto add_mining = [&](CLI::App* sub) {
    sub->add_option("--min-supp", cfg.mining.min_supp)->check(CLI::Range(0.0, 1.0));
    sub->add_option("--min-conf", cfg.mining.min_conf)->check(CLI::Range(0.0, 1.0));
    sub->add_option("--eps", cfg.mining.epsilon)->check(CLI::PositiveNumber);
    sub->add_flag_callback("--conf-antecedent", [&cfg] {
      cfg.mining.confidence_denominator = ConfidenceDenominator::Antecedent;
    }, "divide confidence by the antecedent support instead of the consequent");
  };

  auto* gen = app.add_subcommand("generate", "synthesize a random database");
  gen->add_option("--n", cfg.gen_n)->required();
  gen->add_option("--m", cfg.gen_m)->required();
  gen->add_option("--target-a", cfg.gen_target_a)->required();
  add_common(gen, false);

  auto* mc = app.add_subcommand("mine-classical", "Apriori (or sampling) baseline");
  add_common(mc, true);
  add_mining(mc);
  mc->add_flag("--sampling", cfg.sampling_baseline, "sampling estimator instead of exact Apriori");
  mc->add_option("--sampling-shots", cfg.sampling_shots);

  auto* mq = app.add_subcommand("mine-quantum", "full quantum pipeline");
  add_common(mq, true);
  add_mining(mq);
  mq->add_option("--mode", cfg.mode)->check(CLI::IsMember({"ideal", "circuit"}));
  mq->add_option("--phi3", cfg.phi3_mode)->check(CLI::IsMember({"exact", "grover"}));
  mq->add_option("--shots-f1", cfg.shots_f1, "-1 default rule, 0 exact probabilities");
  mq->add_option("--shots-f2", cfg.shots_f2);
  mq->add_option("--m1-prime", cfg.m1_prime);
  mq->add_flag("--exact-a", cfg.use_exact_a);
  mq->add_option("--counting-bits", cfg.counting_bits);
  mq->add_option("--kappa", cfg.tomo.kappa);
  mq->add_option("--eps-eff", cfg.tomo.epsilon_eff);
  mq->add_flag_callback("--low-rank", [&cfg] { cfg.tomo.branch = TomoBranch::LowRank; });

  auto* tb = app.add_subcommand("tomo-bench", "pure-state tomography on a random operator");
  tb->add_option("--dim", cfg.gen_m)->required();
  tb->add_option("--rank", cfg.gen_n)->default_val(2);
  tb->add_option("--eps", cfg.mining.epsilon)->check(CLI::PositiveNumber);
  tb->add_option("--kappa", cfg.tomo.kappa);
  tb->add_option("--eps-eff", cfg.tomo.epsilon_eff);
  tb->add_option("--mode", cfg.mode)->check(CLI::IsMember({"ideal", "circuit"}));
  tb->add_flag_callback("--low-rank", [&cfg] { cfg.tomo.branch = TomoBranch::LowRank; });
  add_common(tb, false);

  auto* cmp = app.add_subcommand("compare", "Apriori vs sampling vs quantum side by side");
  add_common(cmp, true);
  add_mining(cmp);
  cmp->add_option("--tolerance", cfg.compare_tolerance);
  cmp->add_option("--sampling-shots", cfg.sampling_shots);

  auto* sc = app.add_subcommand("scaling", "ledger scaling sweep over item counts");
  sc->add_option("--items", cfg.sweep_items, "sweep of M values (>= 3 points)")->required();
  sc->add_option("--n", cfg.sweep_n);
  sc->add_option("--target-a", cfg.sweep_target_a);
  sc->add_option("--eps", cfg.mining.epsilon)->check(CLI::PositiveNumber);
  sc->add_option("--counting-bits", cfg.counting_bits);
  add_common(sc, false);

  std::vector<std::string> args(argv.rbegin(), argv.rend());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    std::ostringstream oss;
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp") {
      result.message = app.help();
      result.exit_code = 0;
      return result;
    }
    result.message = app.help();
    result.exit_code = 2;
    return result;
  }

  if (gen->parsed()) cfg.command = Command::Generate;
  else if (mc->parsed()) cfg.command = Command::MineClassical;
  else if (mq->parsed()) cfg.command = Command::MineQuantum;
  else if (tb->parsed()) cfg.command = Command::TomoBench;
  else if (cmp->parsed()) cfg.command = Command::Compare;
  else if (sc->parsed()) cfg.command = Command::Scaling;

  if (cfg.tomo.epsilon_eff > 0 && cfg.tomo.branch != TomoBranch::LowRank) {
    result.message = "conflicting branch flags: --eps-eff set without --low-rank";
    result.exit_code = 2;
    return result;
  }
  result.should_run = true;
  return result;
}

namespace detail {

inline int write_output(const RunConfig& cfg, const std::string& text) {
  if (cfg.output_path.empty()) {
    std::cout << text << '\n';
    return 0;
  }
  std::ofstream out(cfg.output_path);
  if (!out) {
    std::cerr << "cannot open output file: " << cfg.output_path << '\n';
    return 3;
  }
  out << text << '\n';
  return out ? 0 : 3;
}

inline TransactionDatabase load_db(const RunConfig& cfg) {
  std::ifstream in(cfg.dataset_path);
  if (!in) throw std::ios_base::failure("cannot open dataset: " + cfg.dataset_path);
  return load_transactions(in, cfg.format == "dense" ? DbFormat::Dense : DbFormat::ItemList);
}

inline json config_echo(const RunConfig& cfg) {
  return json{{"command", static_cast<int>(cfg.command)},
              {"dataset", cfg.dataset_path},
              {"min_supp", round12(cfg.mining.min_supp)},
              {"min_conf", round12(cfg.mining.min_conf)},
              {"epsilon", round12(cfg.mining.epsilon)},
              {"mode", cfg.mode},
              {"phi3", cfg.phi3_mode},
              {"seed", cfg.seed}};
}

inline FullRunOptions quantum_options(const RunConfig& cfg) {
  FullRunOptions opts;
  opts.f1.mode = cfg.phi3_mode == "grover" ? Phi3Mode::Grover : Phi3Mode::ExactPostselect;
  if (cfg.shots_f1 >= 0) opts.f1.shots = static_cast<std::size_t>(cfg.shots_f1);
  opts.f1.use_exact_a = cfg.use_exact_a;
  opts.f1.counting_bits = cfg.counting_bits;
  opts.f2.mode = cfg.mode == "circuit" ? TomoMode::Circuit : TomoMode::Ideal;
  if (cfg.shots_f2 >= 0) opts.f2.shots = static_cast<std::size_t>(cfg.shots_f2);
  if (cfg.m1_prime >= 0) opts.f2.m1_prime = static_cast<std::size_t>(cfg.m1_prime);
  return opts;
}

inline int run_generate(const RunConfig& cfg) {
  const auto db = generate_synthetic(cfg.gen_n, cfg.gen_m, cfg.gen_target_a, cfg.seed);
  std::ostringstream oss;
  save_transactions(db, oss, cfg.format == "dense" ? DbFormat::Dense : DbFormat::ItemList);
  std::string text = oss.str();
  if (!text.empty() && text.back() == '\n') text.pop_back();
  return write_output(cfg, text);
}

inline int run_mine_classical(const RunConfig& cfg) {
  const auto db = load_db(cfg);
  cfg.mining.validate();
  std::vector<FrequentSet> f1, f2;
  if (cfg.sampling_baseline) {
    std::vector<ItemSet> singles;
    for (std::size_t j = 0; j < db.num_items(); ++j) singles.push_back({j});
    const auto est = sampling_estimate_supports(
        db, singles, static_cast<std::size_t>(cfg.sampling_shots), cfg.seed);
    for (const auto& [s, v] : est)
      if (v >= cfg.mining.min_supp) f1.push_back({s, v, true});
    std::vector<ItemSet> f1sets;
    for (const auto& f : f1) f1sets.push_back(f.itemset);
    const auto pairs = candidate_join(f1sets);
    const auto est2 = sampling_estimate_supports(
        db, pairs, static_cast<std::size_t>(cfg.sampling_shots), cfg.seed + 1);
    for (const auto& [s, v] : est2)
      if (v >= cfg.mining.min_supp) f2.push_back({s, v, true});
  } else {
    f1 = apriori_f1(db, cfg.mining);
    f2 = apriori_f2(db, f1, cfg.mining);
  }
  const auto rules = derive_rules(f1, f2, cfg.mining);
  return write_output(cfg,
                      classical_report_json(config_echo(cfg), f1, f2, rules).dump(2));
}

inline int run_mine_quantum(const RunConfig& cfg) {
  const auto db = load_db(cfg);
  cfg.mining.validate();
  const auto report = mine_full(db, cfg.mining, cfg.tomo, quantum_options(cfg), cfg.seed);
  return write_output(cfg, mining_report_json(config_echo(cfg), report).dump(2));
}

inline int run_tomo_bench(const RunConfig& cfg) {
  const std::size_t d = cfg.gen_m;
  const std::size_t rank = std::min<std::size_t>(std::max<std::size_t>(cfg.gen_n, 1), d);
  // random nonnegative rank-r density matrix
  std::mt19937_64 rng(cfg.seed);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(d, rank);
  for (std::size_t r = 0; r < rank; ++r)
    for (std::size_t i = 0; i < d; ++i) v(i, r) = uniform01(rng);
  Eigen::MatrixXd m = v * v.transpose();
  m /= m.trace();
  const DensityOperator rho{m.cast<cplx>()};

  PureState psi = prepare_psi_ideal(rho);
  CostLedger circuit_ledger;
  if (cfg.mode == "circuit") {
    auto [p, l] = prepare_psi_circuit(rho, cfg.tomo);
    psi = std::move(p);
    circuit_ledger = l;
  }
  const double eps = cfg.mining.epsilon;
  const std::size_t d_prime = significant_element_count(psi, eps);
  auto res = reconstruct_elements(psi, rho.frobenius_norm(), d, d_prime, eps, cfg.seed);
  res.ledger += circuit_ledger;
  res.mode = cfg.mode == "circuit" ? TomoMode::Circuit : TomoMode::Ideal;
  for (Eigen::Index k = 0; k < rho.eigenvalues().size(); ++k)
    res.eigenvalue_estimates.push_back(rho.eigenvalues()(k));
  json echo = config_echo(cfg);
  echo["dim"] = d;
  echo["rank"] = rank;
  return write_output(cfg, tomography_result_json(echo, res).dump(2));
}

inline int run_compare(const RunConfig& cfg) {
  const auto db = load_db(cfg);
  cfg.mining.validate();
  const auto ap1 = apriori_f1(db, cfg.mining);
  const auto ap2 = apriori_f2(db, ap1, cfg.mining);

  RunConfig sampling_cfg = cfg;
  sampling_cfg.sampling_baseline = true;
  std::vector<FrequentSet> sm1, sm2;
  {
    std::vector<ItemSet> singles;
    for (std::size_t j = 0; j < db.num_items(); ++j) singles.push_back({j});
    const auto est = sampling_estimate_supports(
        db, singles, static_cast<std::size_t>(cfg.sampling_shots), cfg.seed);
    for (const auto& [s, v] : est)
      if (v >= cfg.mining.min_supp) sm1.push_back({s, v, true});
    std::vector<ItemSet> f1sets;
    for (const auto& f : sm1) f1sets.push_back(f.itemset);
    const auto est2 = sampling_estimate_supports(
        db, candidate_join(f1sets), static_cast<std::size_t>(cfg.sampling_shots),
        cfg.seed + 1);
    for (const auto& [s, v] : est2)
      if (v >= cfg.mining.min_supp) sm2.push_back({s, v, true});
  }

  // quantum side runs in exact (infinite-shot) mode for the comparison gate
  FullRunOptions opts;
  opts.f1.shots = 0;
  opts.f2.shots = 0;
  const auto quantum = mine_full(db, cfg.mining, cfg.tomo, opts, cfg.seed);

  auto sets_of = [](const std::vector<FrequentSet>& v) {
    std::vector<ItemSet> s;
    for (const auto& f : v) s.push_back(f.itemset);
    std::sort(s.begin(), s.end());
    return s;
  };
  bool match = sets_of(ap1) == sets_of(quantum.f1) && sets_of(ap2) == sets_of(quantum.f2);
  // exact-mode supports must agree with brute force within tolerance
  const SupportMatrix s = support_matrix_bruteforce(db);
  for (const auto& f : quantum.f1)
    if (std::abs(f.support - s.value(f.itemset[0], f.itemset[0])) > cfg.compare_tolerance)
      match = false;
  for (const auto& f : quantum.f2)
    if (std::abs(f.support - s.value(f.itemset[0], f.itemset[1])) > cfg.compare_tolerance)
      match = false;

  json doc{{"config_echo", config_echo(cfg)},
           {"apriori", {{"f1", frequent_sets_json(ap1)}, {"f2", frequent_sets_json(ap2)}}},
           {"sampling", {{"f1", frequent_sets_json(sm1)}, {"f2", frequent_sets_json(sm2)}}},
           {"quantum", mining_report_json(config_echo(cfg), quantum)},
           {"match", match}};
  const int io = write_output(cfg, doc.dump(2));
  if (io != 0) return io;
  return match ? 0 : 1;
}

inline int run_scaling(const RunConfig& cfg) {
  const auto rep = ledger_scaling_report(cfg.sweep_items, cfg.sweep_n, cfg.sweep_target_a,
                                         cfg.mining.epsilon, cfg.counting_bits, cfg.seed);
  json rows = json::array();
  for (const auto& r : rep.rows)
    rows.push_back(json{{"m", r.num_items},
                        {"prep_oracle_calls", r.prep_oracle_calls},
                        {"f1_shots", r.f1_shots},
                        {"nm_over_w", round12(r.nm_over_w)},
                        {"counting_within_bound", r.counting_within_bound}});
  json doc{{"config_echo", config_echo(cfg)},
           {"rows", rows},
           {"oracle_exponent_vs_m", round12(rep.oracle_exponent_vs_m)},
           {"shots_exponent_vs_m", round12(rep.shots_exponent_vs_m)},
           {"counting_ok_fraction", round12(rep.counting_ok_fraction)}};
  return write_output(cfg, doc.dump(2));
}

}  // namespace detail

inline int run(const RunConfig& cfg) {
  try {
    switch (cfg.command) {
      case Command::Generate: return detail::run_generate(cfg);
      case Command::MineClassical: return detail::run_mine_classical(cfg);
      case Command::MineQuantum: return detail::run_mine_quantum(cfg);
      case Command::TomoBench: return detail::run_tomo_bench(cfg);
      case Command::Compare: return detail::run_compare(cfg);
      case Command::Scaling: return detail::run_scaling(cfg);
      case Command::None: break;
    }
  } catch (const std::ios_base::failure& e) {
    std::cerr << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

inline int main_entry(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  auto parsed = parse_args(args);
  if (!parsed.should_run) {
    (parsed.exit_code == 0 ? std::cout : std::cerr) << parsed.message << '\n';
    return parsed.exit_code;
  }
  return run(parsed.config);
}

}  // namespace qarm
