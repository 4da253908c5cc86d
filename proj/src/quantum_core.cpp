#include "qtwp/quantum_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qtwp::quantum {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

int qubit_bit(int index, Qubit qubit) {
  return qubit == Qubit::A ? (index >> 1) & 1 : index & 1;
}

// Index with the target qubit's bit forced to `value`.
int with_bit(int index, Qubit qubit, int value) {
  const int mask = qubit == Qubit::A ? 2 : 1;
  return value ? (index | mask) : (index & ~mask);
}

double decay_factor(double slots, double lifetime) {
  if (std::isinf(lifetime)) {
    return 1.0;
  }
  return std::exp(-slots / lifetime);
}

Eigen::Matrix4cd pauli_on_a(bool z, bool x) {
  Eigen::Matrix2cd pauli = Eigen::Matrix2cd::Identity();
  if (x) {
    Eigen::Matrix2cd px;
    px << 0, 1, 1, 0;
    pauli = px * pauli;
  }
  if (z) {
    Eigen::Matrix2cd pz;
    pz << 1, 0, 0, -1;
    pauli = pz * pauli;
  }
  // Kronecker product pauli (x) I with qubit A as the high bit.
  Eigen::Matrix4cd op = Eigen::Matrix4cd::Zero();
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      op(2 * r, 2 * c) = pauli(r, c);
      op(2 * r + 1, 2 * c + 1) = pauli(r, c);
    }
  }
  return op;
}

}  // namespace

std::string_view to_string(BellOutcome outcome) {
  switch (outcome) {
    case BellOutcome::PhiPlus: return "PhiPlus";
    case BellOutcome::PsiPlus: return "PsiPlus";
    case BellOutcome::PhiMinus: return "PhiMinus";
    case BellOutcome::PsiMinus: return "PsiMinus";
  }
  return "?";
}

void NoiseParams::validate() const {
  if (!(t1 > 0.0) || !(t2 > 0.0)) {
    throw std::invalid_argument("t1 and t2 must be positive");
  }
  if (t2 > 2.0 * t1) {
    throw std::invalid_argument("t2 must not exceed 2*t1");
  }
}

void CoherenceBudget::validate() const {
  if (c < 2) {
    throw std::invalid_argument("c must be at least 2");
  }
}

Eigen::Vector4cd bell_vector(BellOutcome outcome) {
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  switch (outcome) {
    case BellOutcome::PhiPlus: v(0) = kInvSqrt2; v(3) = kInvSqrt2; break;
    case BellOutcome::PhiMinus: v(0) = kInvSqrt2; v(3) = -kInvSqrt2; break;
    case BellOutcome::PsiPlus: v(1) = kInvSqrt2; v(2) = kInvSqrt2; break;
    case BellOutcome::PsiMinus: v(1) = kInvSqrt2; v(2) = -kInvSqrt2; break;
  }
  return v;
}

PairState make_epr_pair(SlotIndex slot) {
  PairState pair;
  const Eigen::Vector4cd phi = bell_vector(BellOutcome::PhiPlus);
  pair.rho = phi * phi.adjoint();
  pair.generated_at = slot;
  return pair;
}

PairState encode_superdense(PairState pair, bool b0, bool b1) {
  const Eigen::Matrix4cd op = pauli_on_a(b0, b1);
  pair.rho = op * pair.rho * op.adjoint();
  return pair;
}

PairState apply_memory_noise(PairState pair, Qubit qubit, std::int64_t slots,
                             const NoiseParams& params) {
  if (slots < 0) {
    throw std::invalid_argument("memory noise duration must be non-negative");
  }
  params.validate();
  const double t = static_cast<double>(slots);
  const double population = decay_factor(t, params.t1);
  const double coherence = decay_factor(t, params.t2);

  const DensityMatrix in = pair.rho;
  DensityMatrix out = in;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      const int a_r = qubit_bit(r, qubit);
      const int a_c = qubit_bit(c, qubit);
      if (a_r != a_c) {
        out(r, c) = in(r, c) * coherence;
      } else if (a_r == 1) {
        out(r, c) = in(r, c) * population;
      } else {
        out(r, c) = in(r, c) +
                    (1.0 - population) * in(with_bit(r, qubit, 1), with_bit(c, qubit, 1));
      }
    }
  }
  pair.rho = out;
  pair.noise_accrued[static_cast<int>(qubit)] += slots;
  return pair;
}

std::array<double, 4> bell_probabilities(const PairState& pair) {
  std::array<double, 4> p{};
  for (BellOutcome outcome : kAllBellOutcomes) {
    const Eigen::Vector4cd v = bell_vector(outcome);
    const std::complex<double> amp = v.dot(pair.rho * v);
    p[static_cast<int>(outcome)] = std::max(0.0, amp.real());
  }
  return p;
}

BellOutcome bell_measure(const PairState& pair, Rng& rng) {
  const auto p = bell_probabilities(pair);
  double total = 0.0;
  for (double v : p) total += v;
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  for (int i = 0; i < 3; ++i) {
    acc += p[i];
    if (u < acc) {
      return static_cast<BellOutcome>(i);
    }
  }
  return BellOutcome::PsiMinus;
}

std::pair<bool, bool> decode_superdense(BellOutcome outcome) {
  const int v = static_cast<int>(outcome);
  return {(v & 2) != 0, (v & 1) != 0};
}

BellOutcome fixed_coherence_measure(const PairState& pair, SlotIndex measure_slot,
                                    const CoherenceBudget& budget, Rng& rng) {
  if (pair_age(pair, measure_slot) <= budget.c) {
    return bell_measure(pair, rng);
  }
  return static_cast<BellOutcome>(rng() >> 62);
}

double trace_deviation(const PairState& pair) {
  return std::abs(pair.rho.trace() - std::complex<double>(1.0, 0.0));
}

double hermitian_deviation(const PairState& pair) {
  return (pair.rho - pair.rho.adjoint()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const PairState& pair) {
  const DensityMatrix h = 0.5 * (pair.rho + pair.rho.adjoint());
  Eigen::SelfAdjointEigenSolver<DensityMatrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

NoiseModel NoiseModel::cliff(CoherenceBudget budget) {
  budget.validate();
  NoiseModel model;
  model.kind_ = Kind::Cliff;
  model.budget_ = budget;
  return model;
}

NoiseModel NoiseModel::t1t2(NoiseParams params) {
  params.validate();
  NoiseModel model;
  model.kind_ = Kind::T1T2;
  model.params_ = params;
  return model;
}

PairState NoiseModel::store(PairState pair, Qubit qubit, std::int64_t slots) const {
  if (kind_ != Kind::T1T2) {
    return pair;
  }
  return apply_memory_noise(std::move(pair), qubit, slots, params_);
}

BellOutcome NoiseModel::measure(const PairState& pair, SlotIndex slot, Rng& rng) const {
  if (kind_ == Kind::Cliff) {
    return fixed_coherence_measure(pair, slot, budget_, rng);
  }
  return bell_measure(pair, rng);
}

std::string_view to_string(NoiseModel::Kind kind) {
  switch (kind) {
    case NoiseModel::Kind::None: return "none";
    case NoiseModel::Kind::Cliff: return "cliff";
    case NoiseModel::Kind::T1T2: return "t1t2";
  }
  return "?";
}

}  // namespace qtwp::quantum
