#include "masim/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace masim
{

double log2det_hpd(const Eigen::MatrixXcd &m)
{
    Eigen::LLT<Eigen::MatrixXcd> llt(m);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("log2det_hpd: matrix is not positive definite");
    double acc = 0.0;
    const auto &l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < l.rows(); ++i)
        acc += std::log2(l(i, i).real());
    return 2.0 * acc;
}

double log2det_identity_plus(const Eigen::MatrixXcd &m)
{
    Eigen::MatrixXcd a = m;
    a.diagonal().array() += 1.0;
    return log2det_hpd(a);
}

Eigen::MatrixXcd hermitize(const Eigen::MatrixXcd &m)
{
    return 0.5 * (m + m.adjoint());
}

} // namespace masim
