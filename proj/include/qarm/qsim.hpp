// Exact dense statevector / density-operator engine with the primitives the
// mining pipelines need: database oracle, amplitude amplification, quantum
// counting, Born sampling, sine-weighted time register, controlled density
// operator evolution and the discrete Fourier transform on qudit registers.
//
// Registers are dimension-d qudits; d need not be a power of two.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qarm/dataset.hpp"

namespace qarm {

using cplx = std::complex<double>;

struct Register {
  std::string name;
  std::size_t dim;
};

// Abstract resource counts standing in for the complexity rows; T_rho is the
// state_prep_units field.
struct CostLedger {
  long long oracle_calls = 0;
  long long rho_copies = 0;
  long long shots = 0;
  long long postselect_attempts = 0;
  long long state_prep_units = 0;

  CostLedger& operator+=(const CostLedger& o) {
    oracle_calls += o.oracle_calls;
    rho_copies += o.rho_copies;
    shots += o.shots;
    postselect_attempts += o.postselect_attempts;
    state_prep_units += o.state_prep_units;
    return *this;
  }
};

// Unit-norm complex amplitude vector over a labeled register layout.
// The first register is the most significant index (row-major).
class PureState {
 public:
  PureState(std::vector<Register> layout, Eigen::VectorXcd amplitudes)
      : layout_(std::move(layout)), amp_(std::move(amplitudes)) {
    std::size_t total = 1;
    for (const auto& r : layout_) {
      if (r.dim == 0) throw std::invalid_argument("zero-dimension register");
      total *= r.dim;
    }
    if (static_cast<std::size_t>(amp_.size()) != total)
      throw std::invalid_argument("amplitude length does not match layout");
  }

  const std::vector<Register>& layout() const { return layout_; }
  const Eigen::VectorXcd& amplitudes() const { return amp_; }
  Eigen::VectorXcd& amplitudes() { return amp_; }
  std::size_t dim() const { return static_cast<std::size_t>(amp_.size()); }

  std::size_t register_index(const std::string& name) const {
    for (std::size_t k = 0; k < layout_.size(); ++k)
      if (layout_[k].name == name) return k;
    throw std::invalid_argument("no register named '" + name + "'");
  }

  // stride of register k: product of dims of the registers after it
  std::size_t stride(std::size_t reg) const {
    std::size_t s = 1;
    for (std::size_t k = reg + 1; k < layout_.size(); ++k) s *= layout_[k].dim;
    return s;
  }

  std::size_t value_of(std::size_t flat, std::size_t reg) const {
    return (flat / stride(reg)) % layout_[reg].dim;
  }

  void decode(std::size_t flat, std::vector<std::size_t>& values) const {
    values.resize(layout_.size());
    for (std::size_t k = layout_.size(); k-- > 0;) {
      values[k] = flat % layout_[k].dim;
      flat /= layout_[k].dim;
    }
  }

  double norm() const { return amp_.norm(); }

  cplx inner(const PureState& other) const {
    if (other.dim() != dim()) throw std::invalid_argument("dimension mismatch");
    return amp_.adjoint() * other.amp_;
  }

  // Apply a dim x dim matrix to one register.
  void apply_matrix(const std::string& reg_name, const Eigen::MatrixXcd& u) {
    const std::size_t reg = register_index(reg_name);
    const std::size_t d = layout_[reg].dim;
    if (static_cast<std::size_t>(u.rows()) != d ||
        static_cast<std::size_t>(u.cols()) != d)
      throw std::invalid_argument("matrix does not match register dimension");
    const std::size_t inner_stride = stride(reg);
    const std::size_t block = inner_stride * d;
    Eigen::VectorXcd col(d), res(d);
    for (std::size_t outer = 0; outer < dim(); outer += block) {
      for (std::size_t s = 0; s < inner_stride; ++s) {
        for (std::size_t v = 0; v < d; ++v) col(v) = amp_[outer + v * inner_stride + s];
        res.noalias() = u * col;
        for (std::size_t v = 0; v < d; ++v) amp_[outer + v * inner_stride + s] = res(v);
      }
    }
  }

  // Apply a different matrix on `target` for each value of the (leading)
  // control register.
  void apply_controlled_matrices(const std::string& control,
                                 const std::string& target,
                                 const std::vector<Eigen::MatrixXcd>& us) {
    const std::size_t creg = register_index(control);
    const std::size_t treg = register_index(target);
    if (creg >= treg) throw std::invalid_argument("control must precede target");
    const std::size_t tdim = layout_[treg].dim;
    if (us.size() != layout_[creg].dim)
      throw std::invalid_argument("one matrix per control value required");
    const std::size_t cstride = stride(creg);
    const std::size_t tstride = stride(treg);
    Eigen::VectorXcd col(tdim), res(tdim);
    for (std::size_t flat = 0; flat < dim(); ++flat) {
      // visit each target-column once: only when the target value is 0
      if ((flat / tstride) % tdim != 0) continue;
      const std::size_t cval = (flat / cstride) % layout_[creg].dim;
      const auto& u = us[cval];
      for (std::size_t v = 0; v < tdim; ++v) col(v) = amp_[flat + v * tstride];
      res.noalias() = u * col;
      for (std::size_t v = 0; v < tdim; ++v) amp_[flat + v * tstride] = res(v);
    }
  }

  // Remove a register by contracting it against a fixed vector chi
  // (projection onto chi up to normalization).  Returns the Born probability
  // of that projection; the remaining state is renormalized.
  double contract(const std::string& reg_name, const Eigen::VectorXcd& chi) {
    const std::size_t reg = register_index(reg_name);
    const std::size_t d = layout_[reg].dim;
    if (static_cast<std::size_t>(chi.size()) != d)
      throw std::invalid_argument("chi does not match register dimension");
    const std::size_t inner_stride = stride(reg);
    const std::size_t block = inner_stride * d;
    Eigen::VectorXcd out(dim() / d);
    std::size_t w = 0;
    for (std::size_t outer = 0; outer < dim(); outer += block) {
      for (std::size_t s = 0; s < inner_stride; ++s) {
        cplx acc = 0;
        for (std::size_t v = 0; v < d; ++v)
          acc += std::conj(chi(v)) * amp_[outer + v * inner_stride + s];
        out(w++) = acc;
      }
    }
    const double p = out.squaredNorm();
    std::vector<Register> new_layout;
    for (std::size_t k = 0; k < layout_.size(); ++k)
      if (k != reg) new_layout.push_back(layout_[k]);
    layout_ = std::move(new_layout);
    if (p > 0) out /= std::sqrt(p);
    amp_ = std::move(out);
    return p;
  }

  static PureState tensor(const PureState& a, const PureState& b) {
    std::vector<Register> layout = a.layout_;
    layout.insert(layout.end(), b.layout_.begin(), b.layout_.end());
    Eigen::VectorXcd amp(a.dim() * b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
      for (std::size_t j = 0; j < b.dim(); ++j)
        amp[i * b.dim() + j] = a.amp_[i] * b.amp_[j];
    return PureState(std::move(layout), std::move(amp));
  }

 private:
  std::vector<Register> layout_;
  Eigen::VectorXcd amp_;
};

// Hermitian, PSD, trace-1 operator with cached spectral decomposition.
class DensityOperator {
 public:
  explicit DensityOperator(Eigen::MatrixXcd m) : mat_(std::move(m)) {
    if (mat_.rows() != mat_.cols()) throw std::invalid_argument("not square");
    if ((mat_ - mat_.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
      throw std::invalid_argument("not Hermitian");
    if (std::abs(mat_.trace().real() - 1.0) > 1e-10 ||
        std::abs(mat_.trace().imag()) > 1e-10)
      throw std::invalid_argument("trace is not 1");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(mat_);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigensolve failed");
    // descending order, tiny negatives clamped to zero
    const auto& ev = es.eigenvalues();
    const auto& vecs = es.eigenvectors();
    const Eigen::Index d = mat_.rows();
    evals_.resize(d);
    evecs_.resize(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
      double lam = ev(d - 1 - k);
      if (lam < -1e-10) throw std::invalid_argument("negative eigenvalue");
      evals_(k) = std::max(lam, 0.0);
      evecs_.col(k) = vecs.col(d - 1 - k);
    }
  }

  std::size_t dim() const { return static_cast<std::size_t>(mat_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return mat_; }
  const Eigen::VectorXd& eigenvalues() const { return evals_; }  // descending
  const Eigen::MatrixXcd& eigenvectors() const { return evecs_; }

  double min_positive_eigenvalue(double tol = 1e-12) const {
    double lo = 0;
    for (Eigen::Index k = 0; k < evals_.size(); ++k)
      if (evals_(k) > tol) lo = evals_(k);
    return lo;
  }

  // 1 / lambda_min over the retained (positive) spectrum
  double condition_bound() const {
    const double lo = min_positive_eigenvalue();
    if (lo == 0) throw std::runtime_error("zero operator");
    return 1.0 / lo;
  }

  double frobenius_norm() const { return mat_.norm(); }

  // exp(-i * rho * time) via the cached decomposition
  Eigen::MatrixXcd evolution(double time) const {
    const Eigen::Index d = mat_.rows();
    Eigen::VectorXcd phases(d);
    for (Eigen::Index k = 0; k < d; ++k)
      phases(k) = std::exp(cplx(0, -evals_(k) * time));
    return evecs_ * phases.asDiagonal() * evecs_.adjoint();
  }

 private:
  Eigen::MatrixXcd mat_;
  Eigen::VectorXd evals_;
  Eigen::MatrixXcd evecs_;
};

// |phi1> = uniform over |i>|j>|0>
inline PureState prepare_uniform(std::size_t n, std::size_t m) {
  if (n == 0 || m == 0) throw std::invalid_argument("N, M must be >= 1");
  std::vector<Register> layout{{"txn", n}, {"item", m}, {"flag", 2}};
  Eigen::VectorXcd amp = Eigen::VectorXcd::Zero(n * m * 2);
  const double a = 1.0 / std::sqrt(static_cast<double>(n * m));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      amp[(i * m + j) * 2] = a;
  return PureState(std::move(layout), std::move(amp));
}

// |i,j,b> -> |i,j,b xor D_ij>
inline PureState apply_oracle(const PureState& state,
                              const TransactionDatabase& db,
                              CostLedger* ledger = nullptr) {
  const std::size_t ti = state.register_index("txn");
  const std::size_t tj = state.register_index("item");
  const std::size_t tf = state.register_index("flag");
  if (state.layout()[ti].dim != db.num_transactions() ||
      state.layout()[tj].dim != db.num_items() ||
      state.layout()[tf].dim != 2)
    throw std::invalid_argument("layout does not match database");
  PureState out = state;
  auto& amp = out.amplitudes();
  const std::size_t fstride = state.stride(tf);
  for (std::size_t flat = 0; flat < state.dim(); ++flat) {
    if (state.value_of(flat, tf) != 0) continue;
    const std::size_t i = state.value_of(flat, ti);
    const std::size_t j = state.value_of(flat, tj);
    if (db.at(i, j)) std::swap(amp[flat], amp[flat + fstride]);
  }
  if (ledger) ledger->oracle_calls += 1;
  return out;
}

// k = round(pi / (4 asin(sqrt(p0))) - 1/2), ties broken downward
inline long long grover_iteration_count(double p0) {
  if (p0 <= 0) throw std::invalid_argument("no marked elements");
  if (p0 > 1) throw std::invalid_argument("marked fraction above 1");
  const double theta = std::asin(std::sqrt(p0));
  const double x = std::numbers::pi / (4.0 * theta) - 0.5;
  const long long k = static_cast<long long>(std::ceil(x - 0.5));
  return std::max<long long>(0, k);
}

inline double grover_success_probability(long long k, double p0) {
  const double theta = std::asin(std::sqrt(p0));
  const double s = std::sin(static_cast<double>(2 * k + 1) * theta);
  return s * s;
}

using BasisMarker = std::function<bool(const std::vector<std::size_t>&)>;

inline double marked_probability(const PureState& state, const BasisMarker& marker) {
  double p = 0;
  std::vector<std::size_t> vals;
  for (std::size_t flat = 0; flat < state.dim(); ++flat) {
    state.decode(flat, vals);
    if (marker(vals)) p += std::norm(state.amplitudes()[flat]);
  }
  return p;
}

// k Grover iterates G = (2|s><s| - I) S_marker, |s> = the input state
// (assumed to be A|0>).
inline PureState amplitude_amplify(const PureState& state, const BasisMarker& marker,
                                   long long k) {
  if (marked_probability(state, marker) <= 0)
    throw std::invalid_argument("marker selects no amplitude");
  PureState out = state;
  const Eigen::VectorXcd s = state.amplitudes();
  std::vector<std::size_t> vals;
  std::vector<char> marked(state.dim(), 0);
  for (std::size_t flat = 0; flat < state.dim(); ++flat) {
    state.decode(flat, vals);
    marked[flat] = marker(vals) ? 1 : 0;
  }
  for (long long it = 0; it < k; ++it) {
    auto& amp = out.amplitudes();
    for (std::size_t flat = 0; flat < state.dim(); ++flat)
      if (marked[flat]) amp[flat] = -amp[flat];
    const cplx overlap = s.adjoint() * amp;
    amp = 2.0 * overlap * s - amp;
  }
  return out;
}

enum class PostselectAccounting { Expected, Amplified };

// round(1/p) with a relative nudge so exact-half boundaries (e.g. p = 2/3,
// 1/p = 1.5) are not pushed below the tie by float rounding
inline long long expected_repetitions(double p) {
  return std::llround((1.0 / p) * (1.0 + 1e-12));
}

// Condition on `outcome` in `reg`; returns the renormalized state and the
// exact Born probability.  Ledger gets expected-repetition accounting:
// round(1/p), or ceil(1/sqrt(p)) for the amplitude-amplified variant.
inline std::pair<PureState, double> postselect(
    const PureState& state, const std::string& reg_name, std::size_t outcome,
    CostLedger* ledger = nullptr,
    PostselectAccounting acc = PostselectAccounting::Expected) {
  const std::size_t reg = state.register_index(reg_name);
  if (outcome >= state.layout()[reg].dim)
    throw std::invalid_argument("outcome exceeds register dimension");
  double p = 0;
  for (std::size_t flat = 0; flat < state.dim(); ++flat)
    if (state.value_of(flat, reg) == outcome)
      p += std::norm(state.amplitudes()[flat]);
  if (p < 1e-14) throw std::runtime_error("postselection impossible");
  PureState out = state;
  auto& amp = out.amplitudes();
  const double scale = 1.0 / std::sqrt(p);
  for (std::size_t flat = 0; flat < state.dim(); ++flat)
    amp[flat] = state.value_of(flat, reg) == outcome ? amp[flat] * scale : cplx(0);
  if (ledger) {
    ledger->postselect_attempts +=
        acc == PostselectAccounting::Expected
            ? expected_repetitions(p)
            : static_cast<long long>(std::ceil(1.0 / std::sqrt(p)));
  }
  return {std::move(out), p};
}

// Partial trace over everything but `reg` (matrix only; wrap in
// DensityOperator at call sites that need the spectrum).
inline Eigen::MatrixXcd reduced_density_matrix(const PureState& state,
                                               const std::string& reg_name) {
  const std::size_t reg = state.register_index(reg_name);
  const std::size_t d = state.layout()[reg].dim;
  const std::size_t inner_stride = state.stride(reg);
  const std::size_t block = inner_stride * d;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
  const auto& amp = state.amplitudes();
  for (std::size_t outer = 0; outer < state.dim(); outer += block)
    for (std::size_t s = 0; s < inner_stride; ++s)
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b)
          rho(a, b) += amp[outer + a * inner_stride + s] *
                       std::conj(amp[outer + b * inner_stride + s]);
  return rho;
}

inline DensityOperator reduced_density(const PureState& state,
                                       const std::string& reg_name) {
  return DensityOperator(reduced_density_matrix(state, reg_name));
}

inline std::size_t sample_from_probs(const std::vector<double>& probs,
                                     std::mt19937_64& rng) {
  const double u = uniform01(rng);
  double acc = 0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    acc += probs[k];
    if (u < acc) return k;
  }
  return probs.size() - 1;
}

inline std::map<std::size_t, long long> sample_computational_basis(
    const std::vector<double>& probs, std::size_t shots, std::uint64_t seed,
    CostLedger* ledger = nullptr) {
  if (shots == 0) throw std::invalid_argument("shots must be >= 1");
  std::mt19937_64 rng(seed);
  std::map<std::size_t, long long> counts;
  for (std::size_t k = 0; k < shots; ++k) ++counts[sample_from_probs(probs, rng)];
  if (ledger) ledger->shots += static_cast<long long>(shots);
  return counts;
}

inline std::map<std::size_t, long long> sample_computational_basis(
    const DensityOperator& rho, std::size_t shots, std::uint64_t seed,
    CostLedger* ledger = nullptr) {
  std::vector<double> probs(rho.dim());
  for (std::size_t k = 0; k < rho.dim(); ++k)
    probs[k] = std::max(0.0, rho.matrix()(k, k).real());
  return sample_computational_basis(probs, shots, seed, ledger);
}

inline std::map<std::size_t, long long> sample_computational_basis(
    const PureState& state, std::size_t shots, std::uint64_t seed,
    CostLedger* ledger = nullptr) {
  std::vector<double> probs(state.dim());
  for (std::size_t k = 0; k < state.dim(); ++k)
    probs[k] = std::norm(state.amplitudes()[k]);
  return sample_computational_basis(probs, shots, seed, ledger);
}

// Phase-estimation measurement distribution for quantum counting: the Grover
// iterate for marker D_ij = 1 has eigenphases +-theta/pi (fractions of a
// turn), each hit with weight 1/2; the 2^p-point register then follows the
// Dirichlet kernel around each.
inline double quantum_count_ones(const TransactionDatabase& db,
                                 unsigned precision_bits, std::uint64_t seed,
                                 CostLedger* ledger = nullptr) {
  if (precision_bits < 3) throw std::invalid_argument("precision_bits must be >= 3");
  const auto stats = db_stats(db);
  const double nm = static_cast<double>(db.num_transactions() * db.num_items());
  const std::size_t t = std::size_t{1} << precision_bits;
  if (ledger) ledger->oracle_calls += static_cast<long long>(t);
  if (stats.total_ones == 0) return 0.0;

  const double theta = std::asin(std::sqrt(static_cast<double>(stats.total_ones) / nm));
  const double phase = theta / std::numbers::pi;  // eigenphase of G as turn fraction
  auto kernel = [&](double delta) {
    // |(1/t) sum_x e^{2 pi i delta x}|^2
    const double d = delta - std::floor(delta);
    const double num = std::sin(std::numbers::pi * d * static_cast<double>(t));
    const double den = static_cast<double>(t) * std::sin(std::numbers::pi * d);
    if (std::abs(den) < 1e-300) return 1.0;
    const double r = num / den;
    return r * r;
  };
  std::vector<double> probs(t);
  for (std::size_t y = 0; y < t; ++y) {
    const double fy = static_cast<double>(y) / static_cast<double>(t);
    probs[y] = 0.5 * kernel(fy - phase) + 0.5 * kernel(fy + phase);
  }
  std::mt19937_64 rng(seed);
  const std::size_t y = sample_from_probs(probs, rng);
  const double s = std::sin(std::numbers::pi * static_cast<double>(y) /
                            static_cast<double>(t));
  return nm * s * s;
}

// The standard error bound that holds with probability >= 8/pi^2.
inline double quantum_count_error_bound(std::size_t w, std::size_t nm,
                                        unsigned precision_bits) {
  const double t = static_cast<double>(std::size_t{1} << precision_bits);
  const double pi = std::numbers::pi;
  return 2.0 * pi * std::sqrt(static_cast<double>(w) * static_cast<double>(nm - w)) / t +
         pi * pi * static_cast<double>(nm) / (t * t);
}

// Amplitudes sqrt(2/t) sin(pi (tau + 1/2) / t).
inline Eigen::VectorXcd sine_window(std::size_t t) {
  if (t < 2) throw std::invalid_argument("sine register needs t >= 2");
  Eigen::VectorXcd chi(t);
  for (std::size_t tau = 0; tau < t; ++tau)
    chi(tau) = std::sqrt(2.0 / static_cast<double>(t)) *
               std::sin(std::numbers::pi * (static_cast<double>(tau) + 0.5) /
                        static_cast<double>(t));
  return chi;
}

inline PureState sine_time_register(std::size_t t) {
  return PureState({{"time", t}}, sine_window(t));
}

enum class FourierDirection { Forward, Inverse };

namespace detail {

inline void fft_pow2(Eigen::VectorXcd& a, bool inverse) {
  const std::size_t n = static_cast<std::size_t>(a.size());
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * std::numbers::pi / static_cast<double>(len) *
                       (inverse ? 1.0 : -1.0);
    const cplx wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cplx w = 1.0;
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cplx u = a[i + k], v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  a /= std::sqrt(static_cast<double>(n));
}

}  // namespace detail

// Exact unitary DFT on one register; forward uses e^{-2 pi i tau y / t}.
inline PureState fourier_register(const PureState& state, const std::string& reg_name,
                                  FourierDirection dir) {
  PureState out = state;
  const std::size_t reg = state.register_index(reg_name);
  const std::size_t t = state.layout()[reg].dim;
  const bool inverse = dir == FourierDirection::Inverse;
  if ((t & (t - 1)) == 0) {
    const std::size_t inner_stride = state.stride(reg);
    const std::size_t block = inner_stride * t;
    auto& amp = out.amplitudes();
    Eigen::VectorXcd col(t);
    for (std::size_t outer = 0; outer < state.dim(); outer += block) {
      for (std::size_t s = 0; s < inner_stride; ++s) {
        for (std::size_t v = 0; v < t; ++v) col(v) = amp[outer + v * inner_stride + s];
        detail::fft_pow2(col, inverse);
        for (std::size_t v = 0; v < t; ++v) amp[outer + v * inner_stride + s] = col(v);
      }
    }
    return out;
  }
  Eigen::MatrixXcd f(t, t);
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t y = 0; y < t; ++y)
    for (std::size_t tau = 0; tau < t; ++tau)
      f(y, tau) = std::exp(cplx(0, sign * 2.0 * std::numbers::pi *
                                      static_cast<double>(y * tau) /
                                      static_cast<double>(t))) /
                  std::sqrt(static_cast<double>(t));
  out.apply_matrix(reg_name, f);
  return out;
}

enum class EvolutionMode { Exact, Sliced };

// sum_tau |tau><tau| (x) exp(-i rho tau t0 / t) on (control, target).
// Sliced mode composes tau one-slice maps, each followed by a deterministic
// seeded Hermitian deviation of spectral norm c (t0/t)^2, emulating the
// density-matrix-exponentiation error term.  Consumes t copies of rho.
inline PureState controlled_evolution(const PureState& state, const DensityOperator& rho,
                                      double t0, const std::string& control,
                                      const std::string& target, EvolutionMode mode,
                                      CostLedger* ledger = nullptr,
                                      double slice_error_scale = 1.0,
                                      std::uint64_t perturbation_seed = 0x51c3d) {
  const std::size_t creg = state.register_index(control);
  const std::size_t t = state.layout()[creg].dim;
  const std::size_t treg = state.register_index(target);
  if (state.layout()[treg].dim != rho.dim())
    throw std::invalid_argument("target register does not match operator dimension");
  if (ledger) ledger->rho_copies += static_cast<long long>(t);

  std::vector<Eigen::MatrixXcd> us(t);
  if (mode == EvolutionMode::Exact) {
    for (std::size_t tau = 0; tau < t; ++tau)
      us[tau] = rho.evolution(t0 * static_cast<double>(tau) / static_cast<double>(t));
  } else {
    const std::size_t d = rho.dim();
    // fixed random Hermitian direction, unit spectral norm
    std::mt19937_64 rng(perturbation_seed);
    Eigen::MatrixXcd h(d, d);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b)
        h(a, b) = cplx(uniform01(rng) - 0.5, uniform01(rng) - 0.5);
    h = (h + h.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    h /= std::max(std::abs(es.eigenvalues().minCoeff()),
                  std::abs(es.eigenvalues().maxCoeff()));
    const double eta =
        slice_error_scale * (t0 / static_cast<double>(t)) * (t0 / static_cast<double>(t));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> esh(h);
    Eigen::VectorXcd ph(d);
    for (std::size_t k = 0; k < d; ++k)
      ph(k) = std::exp(cplx(0, -eta * esh.eigenvalues()(k)));
    const Eigen::MatrixXcd deviation =
        esh.eigenvectors() * ph.asDiagonal() * esh.eigenvectors().adjoint();
    const Eigen::MatrixXcd slice =
        deviation * rho.evolution(t0 / static_cast<double>(t));
    us[0] = Eigen::MatrixXcd::Identity(d, d);
    for (std::size_t tau = 1; tau < t; ++tau) us[tau] = slice * us[tau - 1];
  }
  PureState out = state;
  out.apply_controlled_matrices(control, target, us);
  return out;
}

}  // namespace qarm
