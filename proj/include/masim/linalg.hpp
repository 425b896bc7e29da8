#ifndef MASIM_LINALG_HPP
#define MASIM_LINALG_HPP

#include <Eigen/Dense>

namespace masim
{

// log2 det(M) for a Hermitian positive definite M via Cholesky.
// Throws std::runtime_error when the factorization fails.
double log2det_hpd(const Eigen::MatrixXcd &m);

// log2 det(I + M) for Hermitian positive semidefinite M.
double log2det_identity_plus(const Eigen::MatrixXcd &m);

// (M + M^H)/2; cheap guard before Hermitian solvers.
Eigen::MatrixXcd hermitize(const Eigen::MatrixXcd &m);

} // namespace masim

#endif
