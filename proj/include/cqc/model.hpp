#ifndef CQC_MODEL_HPP
#define CQC_MODEL_HPP

#include <vector>

#include "cqc/tensor.hpp"

namespace cqc {

// H = -J [ sum_j sx_j sx_{j+1} + g sum_j sz_j + h sum_j sx_j ]
struct IsingParams {
  long n_sites = 2;
  double coupling = 1.0;    // J
  double transverse = 0.0;  // g
  double longitudinal = 0.0;  // h
};

enum class TrotterOrder { second, fourth };
enum class TrotterKind { real_time_unitary, imaginary_time_nonunitary };

struct TrotterStep {
  std::vector<std::pair<long, ComplexTensor>> gates;  // (bond j, 4x4 gate), in application order
  double dt = 0.0;
  TrotterOrder order = TrotterOrder::second;
  TrotterKind kind = TrotterKind::real_time_unitary;
};

// Pauli matrices as 2x2 tensors.
ComplexTensor pauli_x();
ComplexTensor pauli_y();
ComplexTensor pauli_z();

// Two-site Hamiltonian term for bond j (1-based, 1 <= j <= N-1), with the
// single-site fields split half/half on interior sites and absorbed fully
// into the boundary bonds, so that sum_j h_j reproduces H exactly.
ComplexTensor bond_hamiltonian(const IsingParams& p, long bond);

// exp(coeff * h) of a 4x4 Hermitian matrix (coeff may be complex).
ComplexTensor hermitian_exp(const ComplexTensor& h, cxd coeff);

// Second order: even/2, odd, even/2. Fourth order: the standard three-fold
// symmetric (Forest-Ruth) composition of second-order steps.
TrotterStep trotter_step(const IsingParams& p, double dt, TrotterOrder order,
                         TrotterKind kind);

// MPO tensors W_1..W_N, each with shape {Dl, Dr, s_out, s_in}; boundary
// tensors have Dl=1 / Dr=1. energy_shift adds shift * identity to H.
std::vector<ComplexTensor> ising_mpo(const IsingParams& p,
                                     double energy_shift = 0.0);

// Upper bound on the largest eigenvalue of H (sum of bond-term norms).
double spectral_bound(const IsingParams& p);

// Dense 2^N x 2^N Hamiltonian; site 1 is the most significant bit.
// Guarded by max_sites to keep accidental blowups out.
Eigen::MatrixXcd dense_hamiltonian(const IsingParams& p, long max_sites = 14);

}  // namespace cqc

#endif
