#include "masim/sic_analog.hpp"

#include "masim/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace masim
{

std::vector<Eigen::VectorXcd> initial_analog(const std::vector<PathSet> &paths,
                                             const SubarrayLayout &layout, const ArrayConfig &cfg)
{
    // Strongest path over all (user, cluster, ray).
    double best = -1.0;
    double theta = kPi / 2.0, phi = 0.0;
    for (const PathSet &ps : paths)
        for (int i = 0; i < ps.n_cl(); ++i)
            for (int j = 0; j < ps.n_ray(); ++j)
                if (std::abs(ps.gain(i, j)) > best)
                {
                    best = std::abs(ps.gain(i, j));
                    theta = ps.dep_theta(i, j);
                    phi = ps.dep_phi(i, j);
                }

    const Eigen::VectorXcd a_t = tx_response(theta, phi, layout, cfg);
    const int e = cfg.elems_per_sub();

    std::vector<Eigen::VectorXcd> analog(cfg.u);
    for (int m = 0; m < cfg.u; ++m)
    {
        analog[m].resize(e);
        for (int i = 0; i < e; ++i)
        {
            std::complex<double> v = a_t(static_cast<Eigen::Index>(m) * e + i);
            analog[m](i) = v == std::complex<double>(0.0, 0.0)
                               ? std::complex<double>(1.0, 0.0)
                               : std::polar(1.0, std::arg(v));
        }
    }
    return analog;
}

Eigen::MatrixXcd residual_cov_A(const ChannelSet &channels,
                                const std::vector<Eigen::VectorXcd> &analog, int chain)
{
    const Eigen::Index rows = channels.stacked.rows();
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(rows, rows);
    for (int i = 0; i < static_cast<int>(analog.size()); ++i)
    {
        if (i == chain)
            continue;
        Eigen::VectorXcd g = channels.block(i) * analog[i];
        a.noalias() += g * g.adjoint();
    }
    return a / channels.sigma2;
}

Eigen::MatrixXcd effective_C(const ChannelSet &channels, const Eigen::MatrixXcd &a_m, int chain)
{
    Eigen::MatrixXcd ident_plus = a_m;
    ident_plus.diagonal().array() += 1.0;
    Eigen::MatrixXcd h_m = channels.block(chain);
    Eigen::MatrixXcd solved = Eigen::LLT<Eigen::MatrixXcd>(hermitize(ident_plus)).solve(h_m);
    return hermitize(h_m.adjoint() * solved);
}

Eigen::VectorXcd chain_update(const Eigen::MatrixXcd &c_m, AnalogMode mode)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(c_m);
    Eigen::VectorXcd v = es.eigenvectors().col(c_m.rows() - 1); // largest eigenvalue

    // Pin the global phase (largest entry real positive) so results do not
    // depend on the eigensolver's phase convention.
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (std::abs(v(imax)) > 0.0)
        v *= std::conj(v(imax)) / std::abs(v(imax));

    const double target_norm = std::sqrt(static_cast<double>(v.size()));
    if (mode == AnalogMode::unconstrained)
        return v * (target_norm / v.norm());

    Eigen::VectorXcd f(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i)
        f(i) = v(i) == std::complex<double>(0.0, 0.0) ? std::complex<double>(1.0, 0.0)
                                                      : std::polar(1.0, std::arg(v(i)));
    return f;
}

SicTrace sic_sweep(const ChannelSet &channels, std::vector<Eigen::VectorXcd> &analog,
                   AnalogMode mode, int max_rounds, double tol)
{
    SicTrace trace;
    trace.objective.push_back(sum_rate_simplified(channels, analog));

    for (int round = 0; round < max_rounds; ++round)
    {
        for (int m = 0; m < static_cast<int>(analog.size()); ++m)
        {
            Eigen::MatrixXcd a_m = residual_cov_A(channels, analog, m);
            Eigen::MatrixXcd c_m = effective_C(channels, a_m, m);
            analog[m] = chain_update(c_m, mode);
            ++trace.chain_updates;
        }
        const double obj = sum_rate_simplified(channels, analog);
        const double gain = obj - trace.objective.back();
        trace.objective.push_back(obj);
        if (gain < -1e-9)
            ++trace.nonmonotone_rounds;
        if (gain < tol)
            break;
    }
    return trace;
}

} // namespace masim
