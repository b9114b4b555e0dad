#include "cqc/dilation.hpp"

#include <cmath>
#include <random>

#include "cqc/errors.hpp"

namespace cqc {

DilatedGate dilate(const ComplexTensor& a, std::uint64_t seed) {
  if (a.shape().size() != 2 || a.shape()[0] != a.shape()[1])
    throw DimensionError("dilate expects a square matrix");
  const long d = a.shape()[0];
  Eigen::MatrixXcd am = a.as_matrix(1);
  if (am.norm() == 0.0) throw DomainError("cannot dilate the zero operator");

  Eigen::JacobiSVD<Eigen::MatrixXcd> sv(am,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double sigma_max = sv.singularValues()(0);
  const double s = 1.0 / sigma_max;

  // Sigma-tilde^2 = 1 - s^2 Sigma^2, clamped so rounding near sigma_max
  // cannot produce a negative radicand.
  Eigen::VectorXd tilde(d);
  for (long k = 0; k < d; ++k) {
    const double sig = sv.singularValues()(k);
    tilde(k) = (sig >= sigma_max * (1.0 - 1e-12))
                   ? 0.0
                   : std::sqrt(1.0 - s * s * sig * sig);
  }
  Eigen::MatrixXcd c =
      sv.matrixU() * tilde.asDiagonal() * sv.matrixV().adjoint();

  // [s a; C] has orthonormal columns; fill the rest randomly and re-orthogonalize.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  for (int attempt = 0; attempt < 20; ++attempt) {
    Eigen::MatrixXcd m(2 * d, 2 * d);
    m.block(0, 0, d, d) = s * am;
    m.block(d, 0, d, d) = c;
    for (long col = d; col < 2 * d; ++col)
      for (long row = 0; row < 2 * d; ++row)
        m(row, col) = cxd(dist(rng), dist(rng));
    try {
      DilatedGate g;
      g.unitary = ComplexTensor::from_matrix(qr_complete(m));
      g.scale = s;
      g.seed = seed;
      return g;
    } catch (const NumericalError&) {
      // degenerate fill; draw again
    }
  }
  throw NumericalError("failed to complete the dilation unitary");
}

double success_probability(const DilatedGate& g, const Eigen::VectorXcd& psi) {
  const long d = g.unitary.shape()[0] / 2;
  if (psi.size() != d) throw DimensionError("state size does not match gate");
  return (g.unitary.as_matrix(1).block(0, 0, d, d) * psi).squaredNorm();
}

std::pair<Eigen::VectorXcd, double> apply_postselected(
    const DilatedGate& g, const Eigen::VectorXcd& psi) {
  const long d = g.unitary.shape()[0] / 2;
  if (psi.size() != d) throw DimensionError("state size does not match gate");
  Eigen::VectorXcd out = g.unitary.as_matrix(1).block(0, 0, d, d) * psi;
  const double prob = out.squaredNorm();
  if (prob < 1e-28)
    throw DomainError("post-selection impossible: a psi vanishes");
  return {out / std::sqrt(prob), prob};
}

}  // namespace cqc
