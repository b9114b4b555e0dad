#ifndef CQC_DILATION_HPP
#define CQC_DILATION_HPP

#include <cstdint>
#include <utility>

#include "cqc/tensor.hpp"

namespace cqc {

// Unitary embedding of a non-unitary operator a: the top-left block of
// `unitary` (ancilla in = ancilla out = 0) is s * a with s = 1/sigma_max(a),
// so post-selecting the ancilla on 0 applies a up to normalization.
struct DilatedGate {
  ComplexTensor unitary;  // 2d x 2d, d = dim(a); ancilla is the leading qubit
  double scale = 1.0;     // s
  std::uint64_t seed = 0;  // seed of the random block completion
};

// Builds V = [[s a, B], [C, D]] with C = U sqrt(1 - s^2 Sigma^2) V^dag from
// the SVD a = U Sigma V^dag; B and D come from a seeded random completion.
DilatedGate dilate(const ComplexTensor& a, std::uint64_t seed = 0);

// s^2 ||a psi||^2: the probability of measuring the ancilla in 0.
double success_probability(const DilatedGate& g, const Eigen::VectorXcd& psi);

// Result of applying the dilated gate and post-selecting the ancilla on 0:
// the normalized image of a, plus the success probability.
std::pair<Eigen::VectorXcd, double> apply_postselected(
    const DilatedGate& g, const Eigen::VectorXcd& psi);

}  // namespace cqc

#endif
