#pragma once

// Test-only reference computations. Nothing here calls into the library's
// noise or framing code paths; they are rebuilt from first principles so the
// tests compare two independent routes.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace oracle {

using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;

inline Mat4 kron(const Mat2& a, const Mat2& b) {
  Mat4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) out(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
  return out;
}

inline Mat2 identity2() { return Mat2::Identity(); }
inline Mat2 pauli_x() {
  Mat2 m;
  m << 0, 1, 1, 0;
  return m;
}
inline Mat2 pauli_z() {
  Mat2 m;
  m << 1, 0, 0, -1;
  return m;
}

/// Amplitude damping followed by pure dephasing, as Kraus operators.
inline std::vector<Mat2> t1t2_kraus(double t, double t1, double t2) {
  const double gamma = 1.0 - std::exp(-t / t1);
  Mat2 a0, a1;
  a0 << 1, 0, 0, std::sqrt(1.0 - gamma);
  a1 << 0, std::sqrt(gamma), 0, 0;
  // Remaining coherence factor after amplitude damping's exp(-t/(2 t1)).
  const double f = std::exp(-t / t2) / std::exp(-t / (2.0 * t1));
  const Mat2 d0 = std::sqrt((1.0 + f) / 2.0) * identity2();
  const Mat2 d1 = std::sqrt((1.0 - f) / 2.0) * pauli_z();
  return {d0 * a0, d0 * a1, d1 * a0, d1 * a1};
}

/// Applies single-qubit Kraus operators to qubit 0 (A, high bit) or 1 (B).
inline Mat4 apply_kraus(const Mat4& rho, const std::vector<Mat2>& ops, int qubit) {
  Mat4 out = Mat4::Zero();
  for (const auto& k : ops) {
    const Mat4 full = qubit == 0 ? kron(k, identity2()) : kron(identity2(), k);
    out += full * rho * full.adjoint();
  }
  return out;
}

inline std::array<Eigen::Vector4cd, 4> bell_basis() {
  const double s = 1.0 / std::sqrt(2.0);
  std::array<Eigen::Vector4cd, 4> b;
  b[0] << s, 0, 0, s;   // Phi+
  b[1] << 0, s, s, 0;   // Psi+
  b[2] << s, 0, 0, -s;  // Phi-
  b[3] << 0, s, -s, 0;  // Psi-
  return b;
}

inline Mat4 phi_plus() {
  const auto b = bell_basis();
  return b[0] * b[0].adjoint();
}

inline Mat4 encode(const Mat4& rho, int b0, int b1) {
  Mat2 u = identity2();
  if (b1) u = pauli_x() * u;
  if (b0) u = pauli_z() * u;
  const Mat4 full = kron(u, identity2());
  return full * rho * full.adjoint();
}

inline std::array<double, 4> bell_diagonal(const Mat4& rho) {
  const auto b = bell_basis();
  std::array<double, 4> p{};
  for (int i = 0; i < 4; ++i) p[i] = b[i].dot(rho * b[i]).real();
  return p;
}

/// Bits decoded from Bell index i: Phi+ 00, Psi+ 01, Phi- 10, Psi- 11.
inline std::pair<int, int> decoded_bits(int index) { return {index >> 1, index & 1}; }

/// State at measurement for one superdense transfer: A stored `hold_a`
/// slots then encoded, B stored `hold_b` slots.
inline Mat4 noisy_encoded_state(int b0, int b1, double hold_a, double hold_b, double t1,
                                double t2) {
  Mat4 rho = apply_kraus(phi_plus(), t1t2_kraus(hold_a, t1, t2), 0);
  rho = encode(rho, b0, b1);
  return apply_kraus(rho, t1t2_kraus(hold_b, t1, t2), 1);
}

/// Per-bit SD error probability, averaged over the four equiprobable payloads.
inline double sd_bit_error(double hold_a, double hold_b, double t1, double t2) {
  double total = 0.0;
  for (int b0 = 0; b0 < 2; ++b0) {
    for (int b1 = 0; b1 < 2; ++b1) {
      const auto p = bell_diagonal(noisy_encoded_state(b0, b1, hold_a, hold_b, t1, t2));
      for (int i = 0; i < 4; ++i) {
        const auto [d0, d1] = decoded_bits(i);
        total += p[i] * ((d0 != b0) + (d1 != b1)) / 2.0;
      }
    }
  }
  return total / 4.0;
}

struct RoundExpectation {
  double b = 0.0;
  double t = 0.0;
};

/// Brute-force E[B], E[T] of the decoherence variant over the K1 and K2 pmfs.
inline RoundExpectation brute_force_round(std::int64_t c, int k1_terms = 200) {
  const std::int64_t m = c - 2;
  RoundExpectation out;
  for (int k1 = 0; k1 < k1_terms; ++k1) {
    const double p1 = std::pow(0.5, k1 + 1);
    for (std::int64_t k2 = 0; k2 <= m; ++k2) {
      const double p2 = k2 < m ? std::pow(0.5, static_cast<double>(k2 + 1))
                               : std::pow(0.5, static_cast<double>(m));
      const bool stuffed = k2 == m;
      const double bits = stuffed ? k1 + m + 3 : k1 + k2 + 4;
      out.b += p1 * p2 * bits;
      out.t += p1 * p2 * static_cast<double>(k1 + k2 + 2);
    }
  }
  return out;
}

// Frozen values from an independent numpy implementation of the same maps.
inline constexpr double kFidelityT1eq20T2eq18At1 = 0.9607870905785608;
inline constexpr double kSdBitErrorOneSlotT1eq20T2eq18 = 0.04948617402878472;

}  // namespace oracle
