// Pure-state-based tomography: prepare |psi> with amplitudes rho_ij / ||rho||_F
// either analytically or by running the phase-estimation + controlled-rotation
// circuit, estimate eigenvalues and B, and reconstruct nonnegative density
// matrix elements from computational-basis frequencies.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qarm/qsim.hpp"

namespace qarm {

enum class TomoBranch { FullRank, LowRank };
enum class TomoMode { Ideal, Circuit };

struct TomoConfig {
  double epsilon = 0.25;           // target state error
  double kappa = 4.0;              // inverse eigenvalue floor (full-rank branch)
  double epsilon_eff = 0.0;        // eigenvalue cutoff (low-rank branch)
  double rotation_constant = 1.0;  // C, valid for any density operator
  std::size_t t0 = 0;              // 0 -> derive from branch defaults
  std::size_t t = 0;               // 0 -> smallest power of two >= t0^2 / eps
  TomoBranch branch = TomoBranch::FullRank;
  EvolutionMode evolution = EvolutionMode::Exact;
  double slice_error_scale = 1.0;

  std::size_t resolved_t0() const {
    if (t0 > 0) return t0;
    if (branch == TomoBranch::FullRank)
      return static_cast<std::size_t>(std::ceil(kappa / epsilon));
    if (epsilon_eff <= 0)
      throw std::invalid_argument("low-rank branch requires epsilon_eff > 0");
    return static_cast<std::size_t>(std::ceil(1.0 / (epsilon_eff * epsilon)));
  }
  std::size_t resolved_t() const {
    if (t > 0) {
      if (t < 2) throw std::invalid_argument("t must be >= 2");
      return t;
    }
    const double want = static_cast<double>(resolved_t0()) *
                        static_cast<double>(resolved_t0()) / epsilon;
    std::size_t p = 2;
    while (static_cast<double>(p) < want) p <<= 1;
    return p;
  }
  void validate() const {
    if (epsilon <= 0) throw std::invalid_argument("epsilon must be positive");
    if (kappa < 1) throw std::invalid_argument("kappa must be >= 1");
    if (rotation_constant <= 0) throw std::invalid_argument("C must be positive");
    (void)resolved_t();
  }
};

struct TomographyResult {
  Eigen::MatrixXd elements;            // entrywise >= 0
  double b_estimate = 0;
  std::vector<double> eigenvalue_estimates;
  long long shots_used = 0;
  CostLedger ledger;
  TomoMode mode = TomoMode::Ideal;
  std::vector<std::pair<std::size_t, std::size_t>> cutoff_flags;  // near eps_eff
};

// |psi_rho> = sum_ik rho_ik |i>|k> / B, B = ||rho||_F.
inline PureState prepare_psi_ideal(const DensityOperator& rho) {
  const std::size_t d = rho.dim();
  const double b = rho.frobenius_norm();
  if (b <= 0) throw std::invalid_argument("zero operator");
  Eigen::VectorXcd amp(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k)
      amp[i * d + k] = rho.matrix()(i, k) / b;
  return PureState({{"sys", d}, {"ref", d}}, std::move(amp));
}

namespace detail {

// lambda estimate encoded in grid point y of a t-point register after
// evolution for total time 2 pi t0: y ~= lambda t0 (wrapped).
inline double grid_eigenvalue(std::size_t y, std::size_t t, std::size_t t0) {
  double ys = static_cast<double>(y);
  if (ys > static_cast<double>(t) / 2.0) ys -= static_cast<double>(t);
  return std::max(0.0, ys / static_cast<double>(t0));
}

}  // namespace detail

// Success probability of the step-6 postselection, from exact eigen-data:
// sum_j (C lambda_j)^2 / d over the retained spectrum.
inline double postselect_success_probability(const DensityOperator& rho,
                                             const TomoConfig& config) {
  const double c = config.rotation_constant;
  const double cutoff =
      config.branch == TomoBranch::LowRank ? config.epsilon_eff : 0.0;
  double p = 0;
  for (Eigen::Index j = 0; j < rho.eigenvalues().size(); ++j) {
    const double lam = rho.eigenvalues()(j);
    if (lam < cutoff) continue;
    p += (c * lam) * (c * lam);
  }
  return p / static_cast<double>(rho.dim());
}

// Runs the six-step preparation on the simulator:
//   sine time register (x) sum_k |k>|k>/sqrt(d); controlled evolution for
//   total time 2 pi t0; Fourier transform to the eigenvalue register;
//   controlled rotation |0> -> sqrt(1-(C lam)^2)|0> + C lam |1>; erasure of
//   the eigenvalue register by uncomputation; postselection on |1>.
inline std::pair<PureState, CostLedger> prepare_psi_circuit(
    const DensityOperator& rho, const TomoConfig& config) {
  config.validate();
  const std::size_t d = rho.dim();
  if (config.branch == TomoBranch::FullRank &&
      rho.min_positive_eigenvalue() < 1.0 / config.kappa - 1e-12)
    throw std::invalid_argument("lambda_min below 1/kappa in full-rank branch");

  const std::size_t t0 = config.resolved_t0();
  const std::size_t t = config.resolved_t();
  CostLedger ledger;

  // step 1
  Eigen::VectorXcd pairs = Eigen::VectorXcd::Zero(d * d);
  for (std::size_t k = 0; k < d; ++k)
    pairs[k * d + k] = 1.0 / std::sqrt(static_cast<double>(d));
  PureState state = PureState::tensor(
      sine_time_register(t), PureState({{"sys", d}, {"ref", d}}, std::move(pairs)));

  // step 2: total simulated time 2 pi t0 so that grid point y reads lambda t0
  const double sim_time = 2.0 * std::numbers::pi * static_cast<double>(t0);
  state = controlled_evolution(state, rho, sim_time, "time", "sys",
                               config.evolution, &ledger,
                               config.slice_error_scale);

  // step 3
  state = fourier_register(state, "time", FourierDirection::Inverse);

  // step 4
  state = PureState::tensor(state, PureState({{"aux", 2}}, Eigen::Vector2cd(1, 0)));
  {
    const std::size_t treg = state.register_index("time");
    const std::size_t areg = state.register_index("aux");
    const std::size_t astride = state.stride(areg);
    auto& amp = state.amplitudes();
    for (std::size_t flat = 0; flat < state.dim(); ++flat) {
      if (state.value_of(flat, areg) != 0) continue;
      const std::size_t y = state.value_of(flat, treg);
      double lam = detail::grid_eigenvalue(y, t, t0);
      lam = std::min(lam, 1.0);
      double a1 = config.rotation_constant * lam;
      if (config.branch == TomoBranch::LowRank && lam < config.epsilon_eff) a1 = 0;
      a1 = std::min(a1, 1.0);
      const double a0 = std::sqrt(std::max(0.0, 1.0 - a1 * a1));
      const cplx v = amp[flat];
      amp[flat] = v * a0;
      amp[flat + astride] = v * a1;
    }
  }

  // step 5: uncompute steps 3 and 2, then project the time register back
  // onto the sine window (plain discarding would decohere the superposition)
  state = fourier_register(state, "time", FourierDirection::Forward);
  state = controlled_evolution(state, rho, -sim_time, "time", "sys",
                               config.evolution, nullptr,
                               config.slice_error_scale);
  const double p_erase = state.contract("time", sine_window(t));
  if (p_erase < 1e-14) throw std::runtime_error("postselection impossible");

  // step 6
  auto [out, p1] = postselect(state, "aux", 1, &ledger,
                              PostselectAccounting::Amplified);
  const double p_total = p_erase * p1;
  if (p_total < 1e-14) throw std::runtime_error("postselection impossible");
  out.contract("aux", Eigen::Vector2cd(0, 1));
  const long long repetitions =
      static_cast<long long>(std::ceil(1.0 / std::sqrt(p_total)));
  ledger.rho_copies *= repetitions;
  ledger.state_prep_units += repetitions;
  return {std::move(out), ledger};
}

// Eigenvalue-register sampling of the phase-estimation state (steps 1-3) with
// rho itself as the analyzed input: outcome lambda_j weighted by lambda_j,
// smeared by the sine-window kernel and quantized to the t-point grid.
inline std::vector<std::pair<double, double>> qpca_eigenvalues(
    const DensityOperator& rho, const TomoConfig& config, std::size_t shots,
    std::uint64_t seed, CostLedger* ledger = nullptr) {
  if (shots == 0) throw std::invalid_argument("shots must be >= 1");
  config.validate();
  const std::size_t t0 = config.resolved_t0();
  const std::size_t t = config.resolved_t();
  const Eigen::VectorXcd chi = sine_window(t);

  // P(y) = sum_j lambda_j |<y| F chi e^{-2 pi i lambda_j tau t0 / t}|^2
  std::vector<double> probs(t, 0.0);
  for (Eigen::Index j = 0; j < rho.eigenvalues().size(); ++j) {
    const double lam = rho.eigenvalues()(j);
    if (lam <= 1e-14) continue;
    Eigen::VectorXcd v(t);
    for (std::size_t tau = 0; tau < t; ++tau)
      v(tau) = chi(tau) * std::exp(cplx(0, -2.0 * std::numbers::pi * lam *
                                              static_cast<double>(tau * t0) /
                                              static_cast<double>(t)));
    if ((t & (t - 1)) != 0)
      throw std::invalid_argument("qpca requires a power-of-two t");
    detail::fft_pow2(v, true);  // inverse: peak at y = lambda t0
    for (std::size_t y = 0; y < t; ++y) probs[y] += lam * std::norm(v(y));
  }
  const auto counts = sample_computational_basis(probs, shots, seed, ledger);
  if (ledger) ledger->rho_copies += static_cast<long long>(shots * t);

  std::map<double, double> merged;
  for (const auto& [y, c] : counts) {
    const double lam = detail::grid_eigenvalue(y, t, t0);
    merged[lam] += static_cast<double>(c) / static_cast<double>(shots);
  }
  std::vector<std::pair<double, double>> out(merged.begin(), merged.end());
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

// B = sqrt(sum lambda^2) over retained estimates (lambda >= cutoff).
inline double estimate_B(const std::vector<double>& eigen_estimates,
                         double cutoff = 0.0) {
  if (eigen_estimates.empty()) throw std::invalid_argument("no eigenvalue estimates");
  double s = 0;
  for (double lam : eigen_estimates) {
    if (lam < 0) throw std::invalid_argument("negative eigenvalue estimate");
    if (lam >= cutoff) s += lam * lam;
  }
  return std::sqrt(s);
}

// rho_ij ~ B sqrt(p_ij) from computational-basis frequencies of psi.
// shots == 0 substitutes exact probabilities (infinite-shot limit).
inline TomographyResult reconstruct_elements(const PureState& psi, double b_estimate,
                                             std::size_t d, std::size_t d_prime_hint,
                                             double epsilon, std::uint64_t seed,
                                             bool entries_nonnegative = true,
                                             std::size_t shots_override = 0,
                                             bool exact_probabilities = false) {
  if (!entries_nonnegative)
    throw std::invalid_argument("estimator undefined for signed elements");
  if (psi.dim() != d * d) throw std::invalid_argument("psi is not a d x d encoding");
  TomographyResult res;
  res.elements = Eigen::MatrixXd::Zero(d, d);
  res.b_estimate = b_estimate;
  if (exact_probabilities) {
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t k = 0; k < d; ++k)
        res.elements(i, k) =
            b_estimate * std::abs(psi.amplitudes()[i * d + k]);
    return res;
  }
  const std::size_t shots =
      shots_override > 0
          ? shots_override
          : static_cast<std::size_t>(std::ceil(
                static_cast<double>(d_prime_hint) / (epsilon * epsilon)));
  const auto counts = sample_computational_basis(psi, shots, seed, &res.ledger);
  res.shots_used = static_cast<long long>(shots);
  for (const auto& [flat, c] : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(shots);
    res.elements(flat / d, flat % d) = b_estimate * std::sqrt(p);
  }
  return res;
}

// d' default in test mode: entries of the exactly known pure state above
// eps / sqrt(2d).
inline std::size_t significant_element_count(const PureState& psi, double epsilon) {
  const double thresh = epsilon / std::sqrt(2.0 * static_cast<double>(psi.dim()));
  std::size_t c = 0;
  for (std::size_t k = 0; k < psi.dim(); ++k)
    if (std::abs(psi.amplitudes()[k]) > thresh) ++c;
  return c;
}

}  // namespace qarm
