#include "masim/position_search.hpp"

#include "masim/bd_precoder.hpp"
#include "masim/linalg.hpp"
#include "masim/sic_analog.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace masim
{

PositionObjective::PositionObjective(const std::vector<PathSet> &paths, const ChannelSet &channels,
                                     const ArrayConfig &cfg,
                                     const std::vector<Eigen::VectorXcd> &analog, int chain)
{
    inv_sigma2_ = 1.0 / channels.sigma2;

    Eigen::MatrixXcd a_prime = residual_cov_A(channels, analog, chain);
    a_prime.diagonal().array() += 1.0;
    llt_.compute(hermitize(a_prime));
    if (llt_.info() != Eigen::Success)
        throw std::runtime_error("PositionObjective: I + A' is not positive definite");
    base_ = 0.0;
    for (Eigen::Index i = 0; i < a_prime.rows(); ++i)
        base_ += 2.0 * std::log2(llt_.matrixLLT()(i, i).real());

    int total_paths = 0;
    for (const PathSet &ps : paths)
        total_paths += ps.n_cl() * ps.n_ray();

    const Eigen::Index rows = channels.stacked.rows();
    const int n_r = cfg.n_r;
    const double two_pi_l = 2.0 * kPi / cfg.lambda;

    path_gains_ = Eigen::MatrixXcd::Zero(rows, total_paths);
    elem_proj_.resize(total_paths);
    wave_x_.resize(total_paths);
    wave_z_.resize(total_paths);

    int p = 0;
    for (std::size_t k = 0; k < paths.size(); ++k)
    {
        const PathSet &ps = paths[k];
        const double scale = std::sqrt(static_cast<double>(cfg.m_t) * n_r /
                                       static_cast<double>(ps.n_cl() * ps.n_ray()));
        for (int i = 0; i < ps.n_cl(); ++i)
            for (int j = 0; j < ps.n_ray(); ++j, ++p)
            {
                const double theta = ps.dep_theta(i, j);
                const double phi = ps.dep_phi(i, j);
                path_gains_.col(p).segment(static_cast<Eigen::Index>(k) * n_r, n_r) =
                    (scale * ps.gain(i, j)) *
                    rx_response(ps.arr_theta(i, j), ps.arr_phi(i, j), cfg);
                elem_proj_(p) = elem_response(theta, phi, cfg).dot(analog[chain]);
                const Eigen::Vector3d kv = wave_vector(theta, phi);
                wave_x_(p) = two_pi_l * kv.x();
                wave_z_(p) = two_pi_l * kv.z();
            }
    }
}

double PositionObjective::operator()(double x, double z) const
{
    ++evals_;
    Eigen::VectorXcd coeff(elem_proj_.size());
    for (Eigen::Index p = 0; p < coeff.size(); ++p)
        coeff(p) = elem_proj_(p) * std::polar(1.0, -(wave_x_(p) * x + wave_z_(p) * z));
    Eigen::VectorXcd g = path_gains_ * coeff;
    const double quad = g.dot(llt_.solve(g)).real();
    return std::log2(1.0 + inv_sigma2_ * quad);
}

namespace
{

struct Vertex
{
    double x, z, value;
};

} // namespace

NmResult nelder_mead_2d(const std::function<double(double, double)> &f, const Rect &subregion,
                        double x0, double z0, int iters, double ftol, double leg)
{
    int evals = 0;
    auto eval_clipped = [&](double x, double z) -> Vertex {
        subregion.clip(x, z);
        ++evals;
        return {x, z, f(x, z)};
    };

    Vertex start = eval_clipped(x0, z0);
    if (iters <= 0)
        return {start.x, start.z, start.value, evals};

    // Legs mirror away from a nearby boundary so the simplex stays proper.
    const double leg_x = (start.x + leg <= subregion.x_hi) ? leg : -leg;
    const double leg_z = (start.z + leg <= subregion.z_hi) ? leg : -leg;

    std::array<Vertex, 3> v = {start, eval_clipped(start.x + leg_x, start.z),
                               eval_clipped(start.x, start.z + leg_z)};

    for (int it = 0; it < iters; ++it)
    {
        // Ascending: v[0] worst, v[2] best.
        std::sort(v.begin(), v.end(),
                  [](const Vertex &a, const Vertex &b) { return a.value < b.value; });
        if (v[2].value - v[0].value < ftol)
            break;

        const double cx = 0.5 * (v[1].x + v[2].x);
        const double cz = 0.5 * (v[1].z + v[2].z);

        Vertex refl = eval_clipped(cx + (cx - v[0].x), cz + (cz - v[0].z));
        if (refl.value > v[2].value)
        {
            // Expansion past the reflected point.
            Vertex exp = eval_clipped(cx + 2.0 * (refl.x - cx), cz + 2.0 * (refl.z - cz));
            v[0] = exp.value > refl.value ? exp : refl;
        }
        else if (refl.value > v[1].value)
        {
            v[0] = refl;
        }
        else
        {
            bool accepted = false;
            if (refl.value > v[0].value)
            {
                // Outside contraction, halfway toward the reflected point.
                Vertex con = eval_clipped(cx + 0.5 * (refl.x - cx), cz + 0.5 * (refl.z - cz));
                if (con.value >= refl.value)
                {
                    v[0] = con;
                    accepted = true;
                }
            }
            else
            {
                // Inside contraction, halfway toward the worst vertex.
                Vertex con = eval_clipped(cx + 0.5 * (v[0].x - cx), cz + 0.5 * (v[0].z - cz));
                if (con.value > v[0].value)
                {
                    v[0] = con;
                    accepted = true;
                }
            }
            if (!accepted)
            {
                // Shrink the two non-best vertices toward the best.
                for (int i = 0; i < 2; ++i)
                    v[i] = eval_clipped(v[2].x + 0.5 * (v[i].x - v[2].x),
                                        v[2].z + 0.5 * (v[i].z - v[2].z));
            }
        }
    }

    const Vertex &best = *std::max_element(
        v.begin(), v.end(), [](const Vertex &a, const Vertex &b) { return a.value < b.value; });
    return {best.x, best.z, best.value, evals};
}

namespace
{

// Lattice search for the optional snap-to-grid mode; the current position is
// always a candidate so the accepted value cannot regress.
NmResult grid_search(const std::function<double(double, double)> &f, const Rect &r, double x0,
                     double z0, int points)
{
    NmResult best{x0, z0, f(x0, z0), 1};
    const int nx = r.width() > 0 ? points : 1;
    const int nz = r.height() > 0 ? points : 1;
    for (int ix = 0; ix < nx; ++ix)
        for (int iz = 0; iz < nz; ++iz)
        {
            const double x = nx > 1 ? r.x_lo + ix * r.width() / (nx - 1) : r.x_lo;
            const double z = nz > 1 ? r.z_lo + iz * r.height() / (nz - 1) : r.z_lo;
            const double val = f(x, z);
            ++best.evals;
            if (val > best.value)
            {
                best.x = x;
                best.z = z;
                best.value = val;
            }
        }
    return best;
}

} // namespace

PositionTrace optimize_positions(const std::vector<PathSet> &paths, SubarrayLayout &layout,
                                 ChannelSet &channels, const ArrayConfig &cfg,
                                 const std::vector<Eigen::VectorXcd> &analog,
                                 const PositionSearchParams &params, Rng *order_rng)
{
    if (layout.subregions.size() != layout.positions.size())
        throw std::invalid_argument("optimize_positions: layout has no assigned subregions");

    std::vector<int> order(layout.positions.size());
    std::iota(order.begin(), order.end(), 0);
    if (params.random_order && order_rng != nullptr)
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[order_rng->next_word() % i]);

    const double leg = params.simplex_leg > 0 ? params.simplex_leg : 0.25 * cfg.lambda;

    PositionTrace trace;
    for (int m : order)
    {
        PositionObjective objective(paths, channels, cfg, analog, m);
        auto f = [&objective](double x, double z) { return objective(x, z); };

        const Rect &region = layout.subregions[m];
        NmResult result =
            params.grid_snap
                ? grid_search(f, region, layout.positions[m].x, layout.positions[m].z,
                              params.grid_points)
                : nelder_mead_2d(f, region, layout.positions[m].x, layout.positions[m].z,
                                 params.nm_iters, params.nm_ftol, leg);

        layout.positions[m] = {result.x, result.z};
        update_subarray_columns(channels, paths, layout, cfg, m);
        trace.objective.push_back(objective.base_log2det() + result.value);
        trace.objective_evals += result.evals;
    }
    return trace;
}

} // namespace masim
