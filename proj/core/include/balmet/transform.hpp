#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace balmet {

/// An invertible change of basis: current basis = matrix * reference monomial
/// basis. |det| is rescaled to 1 on construction and kept there by every
/// operation that produces a transform.
class BasisTransform {
 public:
  BasisTransform() = default;  // empty (size 0); placeholder only

  static BasisTransform identity(int n);

  /// Validates invertibility and rescales |det| to 1.
  /// Throws std::invalid_argument for singular or non-finite input.
  static BasisTransform from_matrix(Eigen::MatrixXcd m);

  /// Haar-distributed unitary from a QR-corrected complex Gaussian matrix.
  static BasisTransform random_unitary(int n, std::uint64_t seed);

  const Eigen::MatrixXcd& matrix() const { return mat_; }
  int size() const { return static_cast<int>(mat_.rows()); }
  bool empty() const { return mat_.rows() == 0; }

 private:
  explicit BasisTransform(Eigen::MatrixXcd m) : mat_(std::move(m)) {}
  Eigen::MatrixXcd mat_;
};

}  // namespace balmet
