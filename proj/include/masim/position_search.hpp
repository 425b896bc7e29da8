#ifndef MASIM_POSITION_SEARCH_HPP
#define MASIM_POSITION_SEARCH_HPP

#include "masim/channel_model.hpp"
#include "masim/rng.hpp"

#include <Eigen/Cholesky>
#include <functional>
#include <vector>

namespace masim
{

// Rate contribution of subarray m as a function of its candidate position,
// with every other subarray held fixed:
//   f(x, z) = log2|I + A' + (1/sigma2) g g^H| - log2|I + A'|,
// where g = H_m(x, z) f_m and A' = (1/sigma2) sum_{i != m} (H_i f_i)(.)^H is
// cached at construction. Only subarray m's columns are rebuilt per call.
class PositionObjective
{
  public:
    PositionObjective(const std::vector<PathSet> &paths, const ChannelSet &channels,
                      const ArrayConfig &cfg, const std::vector<Eigen::VectorXcd> &analog,
                      int chain);

    double operator()(double x, double z) const;

    // log2|I + A'|, the constant dropped from the split-form objective.
    double base_log2det() const { return base_; }
    int evals() const { return evals_; }

  private:
    Eigen::MatrixXcd path_gains_;  // (K n_r) x paths, candidate-independent
    Eigen::VectorXcd elem_proj_;   // per path: a_elem^H f_m
    Eigen::VectorXd wave_x_;       // per path: (2pi/lambda) k_x
    Eigen::VectorXd wave_z_;       // per path: (2pi/lambda) k_z
    Eigen::LLT<Eigen::MatrixXcd> llt_; // factorization of I + A'
    double base_ = 0.0;
    double inv_sigma2_ = 1.0;
    mutable int evals_ = 0;
};

struct NmResult
{
    double x = 0, z = 0;
    double value = 0;
    int evals = 0;
};

// Derivative-free 2-D maximization: reflection (alpha = 1), expansion
// (gamma = 2), contraction (beta = 0.5), shrink toward the best vertex
// (delta = 0.5). The initial simplex is an isosceles right triangle with
// legs of length `leg` at the start point; every trial point is clipped
// into the subregion before evaluation. The returned value is never below
// f(start).
NmResult nelder_mead_2d(const std::function<double(double, double)> &f, const Rect &subregion,
                        double x0, double z0, int iters, double ftol, double leg);

struct PositionSearchParams
{
    int nm_iters = 100;
    double nm_ftol = 1e-5;     // bits/s/Hz spread across simplex vertices
    double simplex_leg = 0.0;  // meters; callers default this to lambda/4
    bool random_order = false; // permute the subarray update order per pass
    bool grid_snap = false;    // search a lattice instead of Nelder-Mead
    int grid_points = 16;      // lattice resolution per axis when snapping
};

struct PositionTrace
{
    std::vector<double> objective; // simplified sum rate after each update
    int objective_evals = 0;
};

// One SIC pass over all subarrays: each is re-optimized inside its shrunk
// subregion and the channel columns it owns are rebuilt on acceptance. The
// simplified sum rate is non-decreasing across updates.
PositionTrace optimize_positions(const std::vector<PathSet> &paths, SubarrayLayout &layout,
                                 ChannelSet &channels, const ArrayConfig &cfg,
                                 const std::vector<Eigen::VectorXcd> &analog,
                                 const PositionSearchParams &params, Rng *order_rng = nullptr);

} // namespace masim

#endif
