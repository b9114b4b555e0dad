#ifndef CQC_TENSOR_HPP
#define CQC_TENSOR_HPP

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cqc/errors.hpp"

namespace cqc {

using cxd = std::complex<double>;

// Dense complex tensor in row-major layout: the last index runs fastest.
// A rank-2 tensor of shape {m, n} is a matrix with entry (r, c) at data[r*n + c].
// Tensors are value types; all exported operations return new tensors.
class ComplexTensor {
 public:
  ComplexTensor() = default;
  explicit ComplexTensor(std::vector<long> shape);
  ComplexTensor(std::vector<long> shape, std::vector<cxd> data);

  static ComplexTensor identity(long n);
  // shape {rows, cols}
  static ComplexTensor from_matrix(const Eigen::MatrixXcd& m);

  long rank() const { return static_cast<long>(shape_.size()); }
  long size() const { return static_cast<long>(data_.size()); }
  const std::vector<long>& shape() const { return shape_; }
  long extent(long axis) const { return shape_.at(static_cast<size_t>(axis)); }

  const std::vector<cxd>& data() const { return data_; }
  std::vector<cxd>& data() { return data_; }

  cxd& at(const std::vector<long>& idx);
  const cxd& at(const std::vector<long>& idx) const;

  // Same data, new shape (sizes must agree).
  ComplexTensor reshape(std::vector<long> shape) const;
  // Axis permutation: result axis k is input axis perm[k].
  ComplexTensor transpose(const std::vector<long>& perm) const;
  ComplexTensor conj() const;

  // View the first `split` axes as the row index, the rest as the column index.
  Eigen::MatrixXcd as_matrix(long split) const;

  double norm() const;
  bool all_finite() const;

  ComplexTensor& operator*=(cxd s);

 private:
  std::vector<long> shape_;
  std::vector<cxd> data_;
};

// Pairwise contraction: sums over paired (axis of a, axis of b); the result
// carries the unpaired axes of a (in order) followed by those of b.
ComplexTensor contract(const ComplexTensor& a, const ComplexTensor& b,
                       const std::vector<std::pair<long, long>>& paired_axes);

struct SvdResult {
  ComplexTensor left_isometry;           // shape {m, r}
  std::vector<double> singular_values;   // descending, non-negative
  ComplexTensor right_isometry;          // shape {n, r}; T = X diag(S) Y^dag
  double discarded_weight = 0.0;         // sum of discarded sigma^2
};

inline constexpr double kSvdCutoff = 1e-14;

// SVD of t viewed as a matrix with the first `split` axes as rows.
// Singular values below cutoff (relative to the largest) and ranks beyond
// max_rank are discarded; at least one value is always kept.
SvdResult svd(const ComplexTensor& t, long split,
              std::optional<long> max_rank = std::nullopt,
              double cutoff = kSvdCutoff);

// For square e = X Sigma Y^dag returns Y X^dag, the unitary W maximizing
// Re Tr[e W].
ComplexTensor polar_unitary(const ComplexTensor& e);

// Given a square matrix whose first k columns are orthonormal (for some k),
// returns a unitary sharing those leading columns. R's diagonal phases are
// fixed real-positive so the shared columns survive unchanged. Throws
// NumericalError when the remaining columns are rank deficient.
Eigen::MatrixXcd qr_complete(const Eigen::MatrixXcd& t);
ComplexTensor qr_complete(const ComplexTensor& t);

}  // namespace cqc

#endif
