#ifndef MASIM_SIC_ANALOG_HPP
#define MASIM_SIC_ANALOG_HPP

#include "masim/bd_precoder.hpp"
#include "masim/channel_model.hpp"

#include <Eigen/Dense>
#include <vector>

namespace masim
{

enum class AnalogMode
{
    constrained,  // unit-modulus entries (phase shifters)
    unconstrained // free modulus, per-chain norm sqrt(m_t/u)
};

// Phase-only start: per-subarray phases of the transmit response at the
// departure angle of the strongest path (largest |gain| over all users,
// clusters and rays). Used by both modes.
std::vector<Eigen::VectorXcd> initial_analog(const std::vector<PathSet> &paths,
                                             const SubarrayLayout &layout,
                                             const ArrayConfig &cfg);

// Interference covariance seen by chain m:
// A_m = (1/sigma2) * sum_{i != m} (H_i f_i)(H_i f_i)^H. Hermitian PSD.
Eigen::MatrixXcd residual_cov_A(const ChannelSet &channels,
                                const std::vector<Eigen::VectorXcd> &analog, int chain);

// Effective channel for chain m restricted to its own columns:
// C_m = H_m^H (I + A_m)^{-1} H_m, Hermitian PSD of size (m_t/u)^2.
Eigen::MatrixXcd effective_C(const ChannelSet &channels, const Eigen::MatrixXcd &a_m, int chain);

// Rank-1 update for one chain: dominant eigenvector of C_m, scaled to
// sqrt(m_t/u) (unconstrained) or projected entrywise onto unit modulus
// (constrained; the phase of a zero entry is taken as 0).
Eigen::VectorXcd chain_update(const Eigen::MatrixXcd &c_m, AnalogMode mode);

struct SicTrace
{
    // objective[0] is the starting value of the simplified sum rate; one
    // entry follows per completed round.
    std::vector<double> objective;
    int nonmonotone_rounds = 0; // rounds that decreased by more than 1e-9
    int chain_updates = 0;
};

// Cyclic one-chain-at-a-time sweep; stops when the per-round improvement of
// the simplified sum rate drops below tol or after max_rounds.
SicTrace sic_sweep(const ChannelSet &channels, std::vector<Eigen::VectorXcd> &analog,
                   AnalogMode mode, int max_rounds, double tol);

} // namespace masim

#endif
