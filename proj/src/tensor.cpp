#include "cqc/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace cqc {

namespace {

long product(const std::vector<long>& v) {
  long p = 1;
  for (long x : v) p *= x;
  return p;
}

std::vector<long> row_major_strides(const std::vector<long>& shape) {
  std::vector<long> s(shape.size(), 1);
  for (long i = static_cast<long>(shape.size()) - 2; i >= 0; --i)
    s[i] = s[i + 1] * shape[i + 1];
  return s;
}

}  // namespace

ComplexTensor::ComplexTensor(std::vector<long> shape)
    : shape_(std::move(shape)), data_(static_cast<size_t>(product(shape_))) {
  for (long e : shape_)
    if (e <= 0) throw DimensionError("tensor extents must be positive");
}

ComplexTensor::ComplexTensor(std::vector<long> shape, std::vector<cxd> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (product(shape_) != static_cast<long>(data_.size()))
    throw DimensionError("tensor data size does not match shape");
}

ComplexTensor ComplexTensor::identity(long n) {
  ComplexTensor t({n, n});
  for (long i = 0; i < n; ++i) t.data_[static_cast<size_t>(i * n + i)] = 1.0;
  return t;
}

ComplexTensor ComplexTensor::from_matrix(const Eigen::MatrixXcd& m) {
  ComplexTensor t({m.rows(), m.cols()});
  for (long r = 0; r < m.rows(); ++r)
    for (long c = 0; c < m.cols(); ++c)
      t.data_[static_cast<size_t>(r * m.cols() + c)] = m(r, c);
  return t;
}

cxd& ComplexTensor::at(const std::vector<long>& idx) {
  return const_cast<cxd&>(static_cast<const ComplexTensor*>(this)->at(idx));
}

const cxd& ComplexTensor::at(const std::vector<long>& idx) const {
  if (idx.size() != shape_.size()) throw DimensionError("index rank mismatch");
  long off = 0, stride = 1;
  for (long i = static_cast<long>(shape_.size()) - 1; i >= 0; --i) {
    if (idx[static_cast<size_t>(i)] < 0 ||
        idx[static_cast<size_t>(i)] >= shape_[static_cast<size_t>(i)])
      throw DimensionError("index out of range");
    off += idx[static_cast<size_t>(i)] * stride;
    stride *= shape_[static_cast<size_t>(i)];
  }
  return data_[static_cast<size_t>(off)];
}

ComplexTensor ComplexTensor::reshape(std::vector<long> shape) const {
  if (product(shape) != size())
    throw DimensionError("reshape changes total size");
  ComplexTensor t;
  t.shape_ = std::move(shape);
  t.data_ = data_;
  return t;
}

ComplexTensor ComplexTensor::transpose(const std::vector<long>& perm) const {
  if (static_cast<long>(perm.size()) != rank())
    throw DimensionError("permutation rank mismatch");
  std::vector<long> new_shape(perm.size());
  for (size_t k = 0; k < perm.size(); ++k)
    new_shape[k] = shape_[static_cast<size_t>(perm[k])];
  ComplexTensor out(new_shape);
  const auto in_strides = row_major_strides(shape_);
  // stride of output axis k in the input layout
  std::vector<long> strides(perm.size());
  for (size_t k = 0; k < perm.size(); ++k)
    strides[k] = in_strides[static_cast<size_t>(perm[k])];

  const long n = size();
  const long r = rank();
  std::vector<long> idx(perm.size(), 0);
  long src = 0;
  for (long i = 0; i < n; ++i) {
    out.data_[static_cast<size_t>(i)] = data_[static_cast<size_t>(src)];
    for (long k = r - 1; k >= 0; --k) {
      auto ku = static_cast<size_t>(k);
      if (++idx[ku] < new_shape[ku]) {
        src += strides[ku];
        break;
      }
      idx[ku] = 0;
      src -= strides[ku] * (new_shape[ku] - 1);
    }
  }
  return out;
}

ComplexTensor ComplexTensor::conj() const {
  ComplexTensor t(*this);
  for (auto& v : t.data_) v = std::conj(v);
  return t;
}

Eigen::MatrixXcd ComplexTensor::as_matrix(long split) const {
  if (split < 0 || split > rank())
    throw DimensionError("invalid matrix split");
  long rows = 1, cols = 1;
  for (long i = 0; i < split; ++i) rows *= shape_[static_cast<size_t>(i)];
  for (long i = split; i < rank(); ++i) cols *= shape_[static_cast<size_t>(i)];
  Eigen::MatrixXcd m(rows, cols);
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c)
      m(r, c) = data_[static_cast<size_t>(r * cols + c)];
  return m;
}

double ComplexTensor::norm() const {
  double s = 0;
  for (const auto& v : data_) s += std::norm(v);
  return std::sqrt(s);
}

bool ComplexTensor::all_finite() const {
  for (const auto& v : data_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

ComplexTensor& ComplexTensor::operator*=(cxd s) {
  for (auto& v : data_) v *= s;
  return *this;
}

ComplexTensor contract(const ComplexTensor& a, const ComplexTensor& b,
                       const std::vector<std::pair<long, long>>& paired_axes) {
  std::vector<bool> a_paired(static_cast<size_t>(a.rank()), false);
  std::vector<bool> b_paired(static_cast<size_t>(b.rank()), false);
  for (auto [ia, ib] : paired_axes) {
    if (ia < 0 || ia >= a.rank() || ib < 0 || ib >= b.rank())
      throw DimensionError("contraction axis out of range");
    if (a_paired[static_cast<size_t>(ia)] || b_paired[static_cast<size_t>(ib)])
      throw DimensionError("axis paired twice");
    if (a.extent(ia) != b.extent(ib))
      throw DimensionError("contracted extents do not match");
    a_paired[static_cast<size_t>(ia)] = true;
    b_paired[static_cast<size_t>(ib)] = true;
  }

  std::vector<long> a_perm, b_perm, out_shape;
  long free_a = 1, free_b = 1, paired = 1;
  for (long i = 0; i < a.rank(); ++i)
    if (!a_paired[static_cast<size_t>(i)]) {
      a_perm.push_back(i);
      out_shape.push_back(a.extent(i));
      free_a *= a.extent(i);
    }
  for (auto [ia, ib] : paired_axes) {
    a_perm.push_back(ia);
    paired *= a.extent(ia);
  }
  std::vector<long> b_perm_tail;
  for (auto [ia, ib] : paired_axes) b_perm.push_back(ib);
  for (long i = 0; i < b.rank(); ++i)
    if (!b_paired[static_cast<size_t>(i)]) {
      b_perm_tail.push_back(i);
      out_shape.push_back(b.extent(i));
      free_b *= b.extent(i);
    }
  b_perm.insert(b_perm.end(), b_perm_tail.begin(), b_perm_tail.end());

  Eigen::MatrixXcd ma =
      a.transpose(a_perm).as_matrix(a.rank() -
                                    static_cast<long>(paired_axes.size()));
  Eigen::MatrixXcd mb =
      b.transpose(b_perm).as_matrix(static_cast<long>(paired_axes.size()));
  Eigen::MatrixXcd mc = ma * mb;

  if (out_shape.empty()) out_shape.push_back(1);
  ComplexTensor out(out_shape);
  long k = 0;
  for (long r = 0; r < mc.rows(); ++r)
    for (long c = 0; c < mc.cols(); ++c) out.data()[static_cast<size_t>(k++)] = mc(r, c);
  return out;
}

namespace {

// LAPACK divide-and-conquer SVD with a one-shot fallback to zgesvd.
void svd_matrix(const Eigen::MatrixXcd& m, Eigen::MatrixXcd& u,
                Eigen::VectorXd& s, Eigen::MatrixXcd& v) {
  const long rows = m.rows(), cols = m.cols();
  const long k = std::min(rows, cols);
  Eigen::MatrixXcd a = m;
  u.resize(rows, k);
  s.resize(k);
  Eigen::MatrixXcd vt(k, cols);
  lapack_int info = LAPACKE_zgesdd(
      LAPACK_COL_MAJOR, 'S', static_cast<lapack_int>(rows),
      static_cast<lapack_int>(cols), a.data(), static_cast<lapack_int>(rows),
      s.data(), u.data(), static_cast<lapack_int>(rows), vt.data(),
      static_cast<lapack_int>(k));
  if (info != 0) {
    a = m;
    std::vector<double> superb(static_cast<size_t>(std::max<long>(1, k - 1)));
    info = LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'S', 'S',
                          static_cast<lapack_int>(rows),
                          static_cast<lapack_int>(cols), a.data(),
                          static_cast<lapack_int>(rows), s.data(), u.data(),
                          static_cast<lapack_int>(rows), vt.data(),
                          static_cast<lapack_int>(k), superb.data());
    if (info != 0) throw NumericalError("SVD failed to converge");
  }
  v = vt.adjoint();
}

}  // namespace

SvdResult svd(const ComplexTensor& t, long split, std::optional<long> max_rank,
              double cutoff) {
  if (split <= 0 || split >= t.rank())
    throw DimensionError("svd split must leave both groups non-empty");
  Eigen::MatrixXcd m = t.as_matrix(split);
  Eigen::MatrixXcd u, v;
  Eigen::VectorXd s;
  svd_matrix(m, u, s, v);

  const long k = s.size();
  long keep = k;
  const double threshold = cutoff * (k > 0 ? s(0) : 0.0);
  while (keep > 1 && s(keep - 1) <= threshold) --keep;
  if (max_rank && keep > *max_rank) keep = std::max<long>(1, *max_rank);

  SvdResult res;
  res.left_isometry = ComplexTensor::from_matrix(u.leftCols(keep));
  res.right_isometry = ComplexTensor::from_matrix(v.leftCols(keep));
  res.singular_values.assign(s.data(), s.data() + keep);
  for (long i = keep; i < k; ++i) res.discarded_weight += s(i) * s(i);
  return res;
}

ComplexTensor polar_unitary(const ComplexTensor& e) {
  if (e.rank() != 2 || e.extent(0) != e.extent(1))
    throw DimensionError("polar_unitary expects a square matrix");
  Eigen::MatrixXcd m = e.as_matrix(1);
  Eigen::MatrixXcd x, y;
  Eigen::VectorXd s;
  svd_matrix(m, x, s, y);
  return ComplexTensor::from_matrix(y * x.adjoint());
}

Eigen::MatrixXcd qr_complete(const Eigen::MatrixXcd& t) {
  if (t.rows() != t.cols()) throw DimensionError("qr_complete expects square input");
  const long n = t.rows();
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(t);
  Eigen::MatrixXcd q = qr.householderQ();
  Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  const double tol = 1e-12 * std::max(1.0, t.norm());
  for (long i = 0; i < n; ++i) {
    const cxd d = r(i, i);
    if (std::abs(d) < tol)
      throw NumericalError("qr_complete: rank-deficient columns");
    q.col(i) *= d / std::abs(d);
  }
  return q;
}

ComplexTensor qr_complete(const ComplexTensor& t) {
  if (t.rank() != 2) throw DimensionError("qr_complete expects a matrix");
  return ComplexTensor::from_matrix(qr_complete(t.as_matrix(1)));
}

}  // namespace cqc
