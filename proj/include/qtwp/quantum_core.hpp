#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <string_view>
#include <utility>

namespace qtwp::quantum {

using Rng = std::mt19937_64;
using SlotIndex = std::int64_t;
using DensityMatrix = Eigen::Matrix4cd;

inline constexpr double kTraceTolerance = 1e-12;
inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kPsdTolerance = 1e-10;
inline constexpr double kProbabilitySumTolerance = 1e-10;

/// Uniform double in [0, 1) built from the top 53 bits of one draw.
/// Used instead of std::uniform_real_distribution so streams are identical
/// across standard library implementations.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

enum class Qubit : int { A = 0, B = 1 };

/// Two-qubit state of one EPR pair.
///
/// Basis ordering is |q_A q_B>, index = 2*q_A + q_B. Qubit A is the one the
/// sender keeps (and later encodes and transmits); qubit B is transmitted
/// immediately after generation.
struct PairState {
  DensityMatrix rho = DensityMatrix::Zero();
  SlotIndex generated_at = 0;
  std::array<std::int64_t, 2> noise_accrued{0, 0};

  [[nodiscard]] std::int64_t accrued(Qubit q) const {
    return noise_accrued[static_cast<int>(q)];
  }
};

enum class BellOutcome : int { PhiPlus = 0, PsiPlus = 1, PhiMinus = 2, PsiMinus = 3 };

inline constexpr std::array<BellOutcome, 4> kAllBellOutcomes{
    BellOutcome::PhiPlus, BellOutcome::PsiPlus, BellOutcome::PhiMinus, BellOutcome::PsiMinus};

std::string_view to_string(BellOutcome outcome);

/// Relaxation (t1) and dephasing (t2) times, in slots. Infinity disables the
/// corresponding decay.
struct NoiseParams {
  double t1 = std::numeric_limits<double>::infinity();
  double t2 = std::numeric_limits<double>::infinity();

  /// Throws std::invalid_argument unless both times are positive and t2 <= 2*t1.
  void validate() const;
};

struct CoherenceBudget {
  std::int64_t c = 2;

  void validate() const;
};

/// Normalised Bell vector, ordered as BellOutcome.
Eigen::Vector4cd bell_vector(BellOutcome outcome);

PairState make_epr_pair(SlotIndex slot);

/// Applies Z^b0 X^b1 to qubit A.
PairState encode_superdense(PairState pair, bool b0, bool b1);

/// Phenomenological T1/T2 memory map on one qubit for `slots` slots.
/// Throws std::invalid_argument for negative slots or invalid params.
PairState apply_memory_noise(PairState pair, Qubit qubit, std::int64_t slots,
                             const NoiseParams& params);

/// <B_i|rho|B_i> for the four Bell states, ordered as BellOutcome.
std::array<double, 4> bell_probabilities(const PairState& pair);

BellOutcome bell_measure(const PairState& pair, Rng& rng);

std::pair<bool, bool> decode_superdense(BellOutcome outcome);

/// age = measure_slot - generated_at + 1. Within budget behaves as
/// bell_measure; beyond it the outcome is uniform.
BellOutcome fixed_coherence_measure(const PairState& pair, SlotIndex measure_slot,
                                    const CoherenceBudget& budget, Rng& rng);

inline std::int64_t pair_age(const PairState& pair, SlotIndex measure_slot) {
  return measure_slot - pair.generated_at + 1;
}

double trace_deviation(const PairState& pair);
double hermitian_deviation(const PairState& pair);
double min_eigenvalue(const PairState& pair);

/// Storage-and-measurement behaviour of the users' quantum memories.
class NoiseModel {
 public:
  enum class Kind { None, Cliff, T1T2 };

  static NoiseModel none() { return NoiseModel{}; }
  static NoiseModel cliff(CoherenceBudget budget);
  static NoiseModel t1t2(NoiseParams params);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] const CoherenceBudget& budget() const { return budget_; }
  [[nodiscard]] const NoiseParams& params() const { return params_; }

  /// Memory decoherence of `qubit` held for `slots` slots. Only T1T2 alters the state.
  [[nodiscard]] PairState store(PairState pair, Qubit qubit, std::int64_t slots) const;

  /// Destructive Bell measurement at `slot`.
  BellOutcome measure(const PairState& pair, SlotIndex slot, Rng& rng) const;

 private:
  Kind kind_ = Kind::None;
  CoherenceBudget budget_{};
  NoiseParams params_{};
};

std::string_view to_string(NoiseModel::Kind kind);

}  // namespace qtwp::quantum
