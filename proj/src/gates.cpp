#include "aqsim/gates.hpp"

#include <cmath>

namespace aqsim {

namespace {
constexpr cd kI{0.0, 1.0};
}

Unitary2 equatorial_rotation(double axis_angle) {
  const double c = std::cos(M_PI / 4.0);
  const double s = std::sin(M_PI / 4.0);
  const cd phase{std::cos(axis_angle), std::sin(axis_angle)};
  // cos(pi/4) I - i sin(pi/4) (cos X + sin Y)
  return {c, -kI * s * std::conj(phase), -kI * s * phase, c};
}

Unitary4 fsim(double theta, double phi) {
  const cd c{std::cos(theta), 0.0};
  const cd ms = -kI * std::sin(theta);
  const cd ph{std::cos(phi), -std::sin(phi)};
  return {
      1, 0,  0, 0,   //
      0, c,  ms, 0,  //
      0, ms, c, 0,   //
      0, 0,  0, ph,
  };
}

Unitary4 kron(const Unitary2& a, const Unitary2& b) {
  Unitary4 out{};
  for (int ra = 0; ra < 2; ++ra)
    for (int rb = 0; rb < 2; ++rb)
      for (int ca = 0; ca < 2; ++ca)
        for (int cb = 0; cb < 2; ++cb)
          out[(2 * ra + rb) * 4 + (2 * ca + cb)] = a[ra * 2 + ca] * b[rb * 2 + cb];
  return out;
}

Unitary4 matmul(const Unitary4& a, const Unitary4& b) {
  Unitary4 out{};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      cd acc{0.0, 0.0};
      for (int k = 0; k < 4; ++k) acc += a[r * 4 + k] * b[k * 4 + c];
      out[r * 4 + c] = acc;
    }
  return out;
}

Unitary4 adjoint(const Unitary4& a) {
  Unitary4 out{};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out[r * 4 + c] = std::conj(a[c * 4 + r]);
  return out;
}

Unitary4 transpose_qubits(const Unitary4& u) {
  return matmul(swap_gate(), matmul(u, swap_gate()));
}

Unitary4 dressed_entangler(const Unitary4& core, const Unitary2& pre_a,
                           const Unitary2& pre_b, const Unitary2& post_a,
                           const Unitary2& post_b) {
  return matmul(kron(post_a, post_b), matmul(core, kron(pre_a, pre_b)));
}

Unitary2 identity2() { return {1, 0, 0, 1}; }
Unitary2 pauli_x() { return {0, 1, 1, 0}; }
Unitary2 pauli_y() { return {0, -kI, kI, 0}; }
Unitary2 pauli_z() { return {1, 0, 0, -1}; }

Unitary4 identity4() {
  Unitary4 out{};
  for (int i = 0; i < 4; ++i) out[i * 4 + i] = 1.0;
  return out;
}

Unitary4 swap_gate() {
  return {
      1, 0, 0, 0,  //
      0, 0, 1, 0,  //
      0, 1, 0, 0,  //
      0, 0, 0, 1,
  };
}

double unitarity_error(const Unitary2& u) {
  double worst = 0.0;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      cd acc{0.0, 0.0};
      for (int k = 0; k < 2; ++k) acc += std::conj(u[k * 2 + r]) * u[k * 2 + c];
      if (r == c) acc -= 1.0;
      worst = std::max(worst, std::abs(acc));
    }
  return worst;
}

double unitarity_error(const Unitary4& u) {
  double worst = 0.0;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      cd acc{0.0, 0.0};
      for (int k = 0; k < 4; ++k) acc += std::conj(u[k * 4 + r]) * u[k * 4 + c];
      if (r == c) acc -= 1.0;
      worst = std::max(worst, std::abs(acc));
    }
  return worst;
}

double number_commutator_norm(const Unitary4& u) {
  // N = diag(0, 1, 1, 2) in the pair basis
  const double nvals[4] = {0.0, 1.0, 1.0, 2.0};
  double worst = 0.0;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      const cd comm = u[r * 4 + c] * (nvals[c] - nvals[r]);
      worst = std::max(worst, std::abs(comm));
    }
  return worst;
}

}  // namespace aqsim
