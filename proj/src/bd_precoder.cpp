#include "masim/bd_precoder.hpp"

#include "masim/linalg.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <string>

namespace masim
{

namespace
{
constexpr double kNullSpaceTol = 1e-10; // relative singular value cutoff
}

Eigen::MatrixXcd analog_matrix(const std::vector<Eigen::VectorXcd> &analog)
{
    const int u = static_cast<int>(analog.size());
    const int e = u > 0 ? static_cast<int>(analog[0].size()) : 0;
    Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(u) * e, u);
    for (int i = 0; i < u; ++i)
        f.block(static_cast<Eigen::Index>(i) * e, i, e, 1) = analog[i];
    return f;
}

Eigen::MatrixXcd effective_channel(const ChannelSet &channels,
                                   const std::vector<Eigen::VectorXcd> &analog)
{
    const int u = static_cast<int>(analog.size());
    Eigen::MatrixXcd g(channels.stacked.rows(), u);
    for (int i = 0; i < u; ++i)
        g.col(i).noalias() = channels.block(i) * analog[i];
    return g;
}

bool check_bd_feasible(int k_users, int n_r, int n_s, int c_t)
{
    return c_t - (k_users - 1) * n_r >= n_s;
}

void bd_digital(const ChannelSet &channels, HybridPrecoder &precoder, int n_s)
{
    const int k_users = channels.k_users();
    const int n_r = static_cast<int>(channels.per_user[0].rows());
    const int c_t = static_cast<int>(precoder.analog.size());

    // Effective per-user channels H_k F_RF, kept as row blocks of one matrix.
    Eigen::MatrixXcd h_eff = effective_channel(channels, precoder.analog);

    precoder.digital.assign(k_users, Eigen::MatrixXcd());
    for (int k = 0; k < k_users; ++k)
    {
        Eigen::MatrixXcd v0;
        if (k_users == 1)
        {
            v0 = Eigen::MatrixXcd::Identity(c_t, c_t);
        }
        else
        {
            Eigen::MatrixXcd h_int((static_cast<Eigen::Index>(k_users) - 1) * n_r, c_t);
            Eigen::Index row = 0;
            for (int j = 0; j < k_users; ++j)
            {
                if (j == k)
                    continue;
                h_int.middleRows(row, n_r) = h_eff.middleRows(static_cast<Eigen::Index>(j) * n_r, n_r);
                row += n_r;
            }
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h_int, Eigen::ComputeFullV);
            const auto &sv = svd.singularValues();
            const double cutoff = sv.size() > 0 ? kNullSpaceTol * sv(0) : 0.0;
            int rank = 0;
            for (Eigen::Index i = 0; i < sv.size(); ++i)
                if (sv(i) > cutoff)
                    ++rank;
            const int null_dim = c_t - rank;
            if (null_dim < n_s)
                throw bd_rank_error("bd_digital: interference null space for user " +
                                    std::to_string(k) + " has dimension " +
                                    std::to_string(null_dim) + " < n_s = " + std::to_string(n_s));
            v0 = svd.matrixV().rightCols(null_dim);
        }

        Eigen::MatrixXcd projected = h_eff.middleRows(static_cast<Eigen::Index>(k) * n_r, n_r) * v0;
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd2(projected, Eigen::ComputeFullV);
        precoder.digital[k] = v0 * svd2.matrixV().leftCols(n_s);
    }

    // Single global scale: equal power across all K*n_s streams, constraint
    // met with equality.
    double power = 0.0;
    for (int k = 0; k < k_users; ++k)
    {
        for (Eigen::Index c = 0; c < precoder.digital[k].cols(); ++c)
        {
            Eigen::VectorXcd col = precoder.digital[k].col(c);
            for (int i = 0; i < c_t; ++i)
                power += std::norm(col(i)) * precoder.analog[i].squaredNorm();
        }
    }
    if (power > 0.0)
    {
        const double scale = std::sqrt(precoder.p_max / power);
        for (auto &f : precoder.digital)
            f *= scale;
    }
}

RateReport sum_rate_full(const ChannelSet &channels, const HybridPrecoder &precoder)
{
    const int k_users = channels.k_users();
    const int n_r = static_cast<int>(channels.per_user[0].rows());
    const double sigma2 = channels.sigma2;

    Eigen::MatrixXcd h_eff = effective_channel(channels, precoder.analog);

    RateReport report;
    report.per_user.resize(k_users);
    report.leakage = Eigen::MatrixXd::Zero(k_users, k_users);

    for (int k = 0; k < k_users; ++k)
    {
        auto h_eff_k = h_eff.middleRows(static_cast<Eigen::Index>(k) * n_r, n_r);
        Eigen::MatrixXcd r_k = sigma2 * Eigen::MatrixXcd::Identity(n_r, n_r);
        for (int j = 0; j < k_users; ++j)
        {
            if (j == k)
                continue;
            Eigen::MatrixXcd cross = h_eff_k * precoder.digital[j];
            report.leakage(k, j) = cross.norm();
            const double denom = channels.per_user[k].norm() * precoder.digital[j].norm();
            if (denom > 0.0)
                report.max_rel_leakage = std::max(report.max_rel_leakage, cross.norm() / denom);
            r_k.noalias() += cross * cross.adjoint();
        }
        Eigen::MatrixXcd signal = h_eff_k * precoder.digital[k];

        // R_k must be invertible at working precision relative to the signal
        // scale; a zero sigma2 with nulled interference leaves it singular.
        Eigen::LLT<Eigen::MatrixXcd> llt(hermitize(r_k));
        bool singular = llt.info() != Eigen::Success;
        double log_r = 0.0;
        if (!singular)
        {
            double d_min = 1e300, d_max = 0.0;
            for (int i = 0; i < n_r; ++i)
            {
                const double d = llt.matrixLLT()(i, i).real();
                d_min = std::min(d_min, d);
                d_max = std::max(d_max, d);
                log_r += 2.0 * std::log2(d);
            }
            const double scale = std::max(d_max * d_max, signal.squaredNorm());
            singular = d_min * d_min <= 1e-14 * scale;
        }
        if (singular)
            throw std::runtime_error(
                "sum_rate_full: interference-plus-noise covariance for user " +
                std::to_string(k) + " is numerically singular (sigma2 = " +
                std::to_string(sigma2) + ")");
        Eigen::MatrixXcd total = r_k + signal * signal.adjoint();
        report.per_user(k) = log2det_hpd(hermitize(total)) - log_r;
    }
    report.sum = report.per_user.sum();
    return report;
}

double sum_rate_simplified(const ChannelSet &channels,
                           const std::vector<Eigen::VectorXcd> &analog)
{
    Eigen::MatrixXcd g = effective_channel(channels, analog);
    Eigen::MatrixXcd gram = (g * g.adjoint()) / channels.sigma2;
    return log2det_identity_plus(hermitize(gram));
}

} // namespace masim
