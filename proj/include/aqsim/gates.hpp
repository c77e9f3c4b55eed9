#pragma once

#include <array>
#include <complex>

namespace aqsim {

using cd = std::complex<double>;

// 2x2 unitary, row-major
using Unitary2 = std::array<cd, 4>;

// 4x4 unitary on an ordered qubit pair (a, b), row-major; basis index is
// 2*s_a + s_b over |00>, |01>, |10>, |11>
using Unitary4 = std::array<cd, 16>;

// pi/2 rotation about the equatorial axis (cos phi_ax, sin phi_ax, 0):
// exp(-i (pi/4) (cos(phi_ax) X + sin(phi_ax) Y))
Unitary2 equatorial_rotation(double axis_angle);

// fSim convention: diag(1, [[cos t, -i sin t], [-i sin t, cos t]], e^{-i phi})
Unitary4 fsim(double theta, double phi);

// (post_a (x) post_b) * core * (pre_a (x) pre_b)
Unitary4 dressed_entangler(const Unitary4& core, const Unitary2& pre_a,
                           const Unitary2& pre_b, const Unitary2& post_a,
                           const Unitary2& post_b);

Unitary2 identity2();
Unitary2 pauli_x();
Unitary2 pauli_y();
Unitary2 pauli_z();
Unitary4 identity4();
Unitary4 swap_gate();

Unitary4 kron(const Unitary2& a, const Unitary2& b);
Unitary4 matmul(const Unitary4& a, const Unitary4& b);
Unitary4 adjoint(const Unitary4& a);

// exchange the roles of the two qubits: SWAP * u * SWAP
Unitary4 transpose_qubits(const Unitary4& u);

// max-abs entrywise deviation of U^dagger U from the identity
double unitarity_error(const Unitary2& u);
double unitarity_error(const Unitary4& u);

// entrywise max-abs norm of [U, n_a + n_b]; zero iff U conserves the
// two-qubit excitation number
double number_commutator_norm(const Unitary4& u);

}  // namespace aqsim
