#include "cqc/model.hpp"

#include <cmath>

namespace cqc {

namespace {

Eigen::Matrix2cd sx_m() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}

Eigen::Matrix2cd sz_m() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, -1;
  return m;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// On-site field operator g*sz + h*sx.
Eigen::Matrix2cd field_term(const IsingParams& p) {
  return p.transverse * sz_m() + p.longitudinal * sx_m();
}

Eigen::MatrixXcd bond_matrix(const IsingParams& p, long bond) {
  const long nb = p.n_sites - 1;
  if (bond < 1 || bond > nb) throw DimensionError("bond index out of range");
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  // Field weights: each site's field must appear exactly once across bonds.
  const double w_left = (bond == 1) ? 1.0 : 0.5;
  const double w_right = (bond == nb) ? 1.0 : 0.5;
  Eigen::MatrixXcd h = kron(sx_m(), sx_m());
  h += w_left * kron(field_term(p), id);
  h += w_right * kron(id, field_term(p));
  return -p.coupling * h;
}

}  // namespace

ComplexTensor pauli_x() { return ComplexTensor::from_matrix(sx_m()); }

ComplexTensor pauli_y() {
  Eigen::Matrix2cd m;
  m << 0, cxd(0, -1), cxd(0, 1), 0;
  return ComplexTensor::from_matrix(m);
}

ComplexTensor pauli_z() { return ComplexTensor::from_matrix(sz_m()); }

ComplexTensor bond_hamiltonian(const IsingParams& p, long bond) {
  if (p.n_sites < 2) throw DimensionError("need at least two sites");
  return ComplexTensor::from_matrix(bond_matrix(p, bond));
}

ComplexTensor hermitian_exp(const ComplexTensor& h, cxd coeff) {
  Eigen::MatrixXcd m = h.as_matrix(1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  Eigen::VectorXcd phases(es.eigenvalues().size());
  for (long i = 0; i < phases.size(); ++i)
    phases(i) = std::exp(coeff * es.eigenvalues()(i));
  Eigen::MatrixXcd out = es.eigenvectors() * phases.asDiagonal() *
                         es.eigenvectors().adjoint();
  return ComplexTensor::from_matrix(out);
}

namespace {

// One second-order slice with step dt*scale, appended to gates.
void append_second_order(const IsingParams& p, cxd coeff,
                         std::vector<std::pair<long, ComplexTensor>>& gates) {
  const long nb = p.n_sites - 1;
  auto half_even = [&] {
    for (long j = 2; j <= nb; j += 2)
      gates.emplace_back(j, hermitian_exp(bond_hamiltonian(p, j), coeff * 0.5));
  };
  half_even();
  for (long j = 1; j <= nb; j += 2)
    gates.emplace_back(j, hermitian_exp(bond_hamiltonian(p, j), coeff));
  half_even();
}

}  // namespace

TrotterStep trotter_step(const IsingParams& p, double dt, TrotterOrder order,
                         TrotterKind kind) {
  if (kind == TrotterKind::imaginary_time_nonunitary && dt < 0)
    throw DomainError("imaginary-time step must be non-negative");
  TrotterStep step;
  step.dt = dt;
  step.order = order;
  step.kind = kind;
  const cxd unit = (kind == TrotterKind::real_time_unitary) ? cxd(0, -1)
                                                            : cxd(-1, 0);
  if (order == TrotterOrder::second) {
    append_second_order(p, unit * dt, step.gates);
  } else {
    const double theta = 1.0 / (2.0 - std::cbrt(2.0));
    append_second_order(p, unit * (theta * dt), step.gates);
    append_second_order(p, unit * ((1.0 - 2.0 * theta) * dt), step.gates);
    append_second_order(p, unit * (theta * dt), step.gates);
  }
  return step;
}

std::vector<ComplexTensor> ising_mpo(const IsingParams& p,
                                     double energy_shift) {
  const long n = p.n_sites;
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  const Eigen::Matrix2cd sx = sx_m();
  const Eigen::Matrix2cd onsite =
      -p.coupling * field_term(p) + (energy_shift / static_cast<double>(n)) * id;

  auto make = [&](long dl, long dr) {
    return ComplexTensor({dl, dr, 2, 2});
  };
  auto set_block = [](ComplexTensor& w, long a, long b,
                      const Eigen::Matrix2cd& m) {
    for (long s = 0; s < 2; ++s)
      for (long t = 0; t < 2; ++t) w.at({a, b, s, t}) = m(s, t);
  };

  std::vector<ComplexTensor> mpo;
  for (long k = 1; k <= n; ++k) {
    const long dl = (k == 1) ? 1 : 3;
    const long dr = (k == n) ? 1 : 3;
    ComplexTensor w = make(dl, dr);
    // Row/col channels: 0 = before, 1 = open sx string, 2 = done.
    if (k == 1) {
      set_block(w, 0, 0, id);
      set_block(w, 0, 1, sx);
      set_block(w, 0, 2, onsite);
    } else if (k == n) {
      set_block(w, 0, 0, onsite);
      set_block(w, 1, 0, -p.coupling * sx);
      set_block(w, 2, 0, id);
    } else {
      set_block(w, 0, 0, id);
      set_block(w, 0, 1, sx);
      set_block(w, 0, 2, onsite);
      set_block(w, 1, 2, -p.coupling * sx);
      set_block(w, 2, 2, id);
    }
    mpo.push_back(std::move(w));
  }
  return mpo;
}

double spectral_bound(const IsingParams& p) {
  double bound = 0;
  for (long j = 1; j < p.n_sites; ++j) {
    Eigen::MatrixXcd h = bond_hamiltonian(p, j).as_matrix(1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    bound += es.eigenvalues().cwiseAbs().maxCoeff();
  }
  return bound + 1.0;
}

Eigen::MatrixXcd dense_hamiltonian(const IsingParams& p, long max_sites) {
  if (p.n_sites > max_sites)
    throw ResourceError("dense Hamiltonian requested beyond size cap");
  const long dim = 1L << p.n_sites;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (long j = 1; j < p.n_sites; ++j) {
    Eigen::MatrixXcd term = bond_matrix(p, j);
    Eigen::MatrixXcd left =
        Eigen::MatrixXcd::Identity(1L << (j - 1), 1L << (j - 1));
    Eigen::MatrixXcd right = Eigen::MatrixXcd::Identity(
        1L << (p.n_sites - j - 1), 1L << (p.n_sites - j - 1));
    h += kron(kron(left, term), right);
  }
  return h;
}

}  // namespace cqc
