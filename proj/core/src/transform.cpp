#include "balmet/transform.hpp"

#include <cmath>
#include <stdexcept>

#include "balmet/rng.hpp"

namespace balmet {

BasisTransform BasisTransform::identity(int n) {
  return BasisTransform(Eigen::MatrixXcd::Identity(n, n));
}

BasisTransform BasisTransform::from_matrix(Eigen::MatrixXcd m) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw std::invalid_argument("basis transform must be square and nonempty");
  }
  if (!m.allFinite()) {
    throw std::invalid_argument("basis transform has non-finite entries");
  }
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  // log|det| from the U diagonal; a vanishing pivot means singular input.
  double log_abs_det = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double p = std::abs(lu.matrixLU()(i, i));
    if (!(p > 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("singular basis transform");
    }
    log_abs_det += std::log(p);
  }
  m *= std::exp(-log_abs_det / static_cast<double>(m.rows()));
  return BasisTransform(std::move(m));
}

BasisTransform BasisTransform::random_unitary(int n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXcd g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g(i, j) = rng.complex_normal();
  }
  const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Phase correction makes the distribution Haar.
  for (int j = 0; j < n; ++j) {
    const std::complex<double> d = r(j, j);
    q.col(j) *= d / std::abs(d);
  }
  return BasisTransform(std::move(q));
}

}  // namespace balmet
