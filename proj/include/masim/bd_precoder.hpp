#ifndef MASIM_BD_PRECODER_HPP
#define MASIM_BD_PRECODER_HPP

#include "masim/channel_model.hpp"

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace masim
{

// Raised when the numerical null space of the interference channel is too
// small to carry n_s streams; the sweep harness counts and excludes these.
struct bd_rank_error : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

// Block-diagonal analog precoder (one vector per RF chain) plus per-user
// digital precoders. Analog entries are exactly unit modulus in constrained
// mode; unconstrained blocks carry free modulus at the same per-chain norm
// sqrt(m_t/u).
struct HybridPrecoder
{
    std::vector<Eigen::VectorXcd> analog;  // u blocks of length m_t/u
    std::vector<Eigen::MatrixXcd> digital; // K matrices, c_t x n_s
    double p_max = 1.0;
};

// Expands the analog blocks into the m_t x u block-diagonal matrix F_RF.
Eigen::MatrixXcd analog_matrix(const std::vector<Eigen::VectorXcd> &analog);

// H * F_RF without forming F_RF: column i is H_i * analog_i.
Eigen::MatrixXcd effective_channel(const ChannelSet &channels,
                                   const std::vector<Eigen::VectorXcd> &analog);

// Null-space headroom: c_t - (K-1) n_r >= n_s.
bool check_bd_feasible(int k_users, int n_r, int n_s, int c_t);

// BD-SVD digital precoder: per user, project onto the null space of the
// other users' effective channels, take the top-n_s directions there, then
// scale all streams jointly so ||F_RF F_BB||_F^2 = p_max.
void bd_digital(const ChannelSet &channels, HybridPrecoder &precoder, int n_s);

struct RateReport
{
    Eigen::VectorXd per_user;    // bits/s/Hz
    double sum = 0.0;
    Eigen::MatrixXd leakage;     // ||H_k F_RF F_BB_j||_F, diagonal zero
    double max_rel_leakage = 0.0;
};

// Sum rate with the actual residual interference in the covariance.
RateReport sum_rate_full(const ChannelSet &channels, const HybridPrecoder &precoder);

// Surrogate objective log2|I + (1/sigma2) H F_RF F_RF^H H^H|; the quantity
// every SIC update maximizes. Digital precoders never enter.
double sum_rate_simplified(const ChannelSet &channels,
                           const std::vector<Eigen::VectorXcd> &analog);

} // namespace masim

#endif
