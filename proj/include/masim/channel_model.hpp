#ifndef MASIM_CHANNEL_MODEL_HPP
#define MASIM_CHANNEL_MODEL_HPP

#include "masim/array_geometry.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace masim
{

struct ChannelProfile
{
    int n_cl = 2;
    int n_ray = 5;
    double spread = 15.0 * kPi / 180.0; // angular spread, radians
    // Departure angles are one draw shared by all users unless set.
    bool per_user_departures = false;
};

// Cluster/ray parameters for one user. All matrices are n_cl x n_ray. Held
// fixed while subarray positions move.
struct PathSet
{
    Eigen::MatrixXcd gain;      // CN(0,1) complex gains
    Eigen::MatrixXd dep_theta;  // departure elevation
    Eigen::MatrixXd dep_phi;    // departure azimuth
    Eigen::MatrixXd arr_theta;  // arrival elevation
    Eigen::MatrixXd arr_phi;    // arrival azimuth

    int n_cl() const { return static_cast<int>(gain.rows()); }
    int n_ray() const { return static_cast<int>(gain.cols()); }
};

// Per-user channels plus the stacked matrix H = [H_1; ...; H_K].
struct ChannelSet
{
    std::vector<Eigen::MatrixXcd> per_user; // each n_r x m_t
    Eigen::MatrixXcd stacked;               // (K n_r) x m_t
    double sigma2 = 1.0;                    // noise variance, linear
    int block_cols = 0;                     // m_t / u, column block per subarray

    int k_users() const { return static_cast<int>(per_user.size()); }
    // Column block owned by subarray m in the stacked channel.
    auto block(int m) const
    {
        return stacked.middleCols(static_cast<Eigen::Index>(m) * block_cols, block_cols);
    }
};

// Cluster-center elevations are uniform on [pi/4, 3pi/4], azimuths on
// [-pi/2, pi/2]; ray offsets uniform on +-spread/2 per angle; gains CN(0,1).
// Deterministic given seed.
std::vector<PathSet> draw_paths(std::uint64_t seed, int k_users, const ChannelProfile &profile);

// H_k = sqrt(m_t n_r / (n_cl n_ray)) * sum_ij gain * a_r * a_t^H, with a_t
// evaluated at the current layout.
Eigen::MatrixXcd assemble_channel(const PathSet &paths, const SubarrayLayout &layout,
                                  const ArrayConfig &cfg);

ChannelSet build_channel_set(const std::vector<PathSet> &paths, const SubarrayLayout &layout,
                             const ArrayConfig &cfg, double sigma2);

// Recomputes every H_k with identical path parameters at the new positions.
ChannelSet rebuild_on_move(const std::vector<PathSet> &paths, const SubarrayLayout &new_layout,
                           const ArrayConfig &cfg, double sigma2);

// Refreshes only the m_t/u columns owned by subarray m after it moved.
void update_subarray_columns(ChannelSet &channels, const std::vector<PathSet> &paths,
                             const SubarrayLayout &layout, const ArrayConfig &cfg, int m);

// Binary channel dump, one file per trial: dimensions, path parameters and
// H matrices as row-major little-endian float64 (re, im) pairs.
void dump_channels(const std::string &path, const std::vector<PathSet> &paths,
                   const ChannelSet &channels, const ArrayConfig &cfg);

struct ChannelDump
{
    int k_users = 0, n_cl = 0, n_ray = 0, n_r = 0, m_t = 0, u = 0;
    double lambda = 0;
    std::vector<PathSet> paths;
    std::vector<Eigen::MatrixXcd> h;
};

ChannelDump load_channels(const std::string &path);

} // namespace masim

#endif
