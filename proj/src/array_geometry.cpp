#include "masim/array_geometry.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace masim
{

int ArrayConfig::n() const
{
    int e = m_t / u;
    int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(e))));
    return r;
}

int ArrayConfig::grid_cols() const
{
    return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(u))));
}

int ArrayConfig::grid_rows() const
{
    int cols = grid_cols();
    return (u + cols - 1) / cols;
}

void ArrayConfig::validate() const
{
    if (m_t <= 0 || u <= 0 || n_r <= 0)
        throw std::invalid_argument("ArrayConfig: m_t, u and n_r must be positive");
    if (m_t % u != 0)
        throw std::invalid_argument("ArrayConfig: m_t must be divisible by u");
    int e = m_t / u;
    int side = n();
    if (side * side != e)
        throw std::invalid_argument("ArrayConfig: m_t/u = " + std::to_string(e) +
                                    " is not a perfect square (each subarray is an n x n UPA)");
    if (lambda <= 0 || d_x <= 0 || d_z <= 0)
        throw std::invalid_argument("ArrayConfig: lambda, d_x and d_z must be positive");
    if (l_s < 0)
        throw std::invalid_argument("ArrayConfig: l_s must be non-negative");
    if (region_len <= 0)
        throw std::invalid_argument("ArrayConfig: region_len must be positive");
    if (d_min <= 0)
        throw std::invalid_argument("ArrayConfig: d_min must be positive");
}

Eigen::Vector3d wave_vector(double theta, double phi)
{
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

Eigen::VectorXcd elem_response(double theta, double phi, const ArrayConfig &cfg)
{
    const int n = cfg.n();
    const double two_pi_l = 2.0 * kPi / cfg.lambda;
    const double psi_x = two_pi_l * cfg.d_x * std::sin(theta) * std::cos(phi);
    const double psi_z = two_pi_l * cfg.d_z * std::cos(theta);
    const double scale = 1.0 / static_cast<double>(n); // 1/sqrt(n) per axis

    Eigen::VectorXcd a(n * n);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            a(p * n + q) = scale * std::polar(1.0, p * psi_x + q * psi_z);
    return a;
}

Eigen::VectorXcd sub_response(double theta, double phi, const SubarrayLayout &layout,
                              const ArrayConfig &cfg)
{
    const Eigen::Vector3d k = wave_vector(theta, phi);
    const double two_pi_l = 2.0 * kPi / cfg.lambda;

    Eigen::VectorXcd a(static_cast<Eigen::Index>(layout.positions.size()));
    for (std::size_t i = 0; i < layout.positions.size(); ++i)
    {
        const Position &p = layout.positions[i];
        a(static_cast<Eigen::Index>(i)) = std::polar(1.0, two_pi_l * (k.x() * p.x + k.z() * p.z));
    }
    return a;
}

Eigen::VectorXcd tx_response(double theta, double phi, const SubarrayLayout &layout,
                             const ArrayConfig &cfg)
{
    const Eigen::VectorXcd a_sub = sub_response(theta, phi, layout, cfg);
    const Eigen::VectorXcd a_elem = elem_response(theta, phi, cfg);
    const int e = static_cast<int>(a_elem.size());

    Eigen::VectorXcd a(a_sub.size() * e);
    for (Eigen::Index s = 0; s < a_sub.size(); ++s)
        a.segment(s * e, e) = a_sub(s) * a_elem;
    return a;
}

Eigen::VectorXcd rx_response(double theta, double phi, const ArrayConfig &cfg)
{
    const double psi = kPi * std::sin(theta) * std::cos(phi); // lambda/2 spacing
    const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.n_r));

    Eigen::VectorXcd a(cfg.n_r);
    for (int p = 0; p < cfg.n_r; ++p)
        a(p) = scale * std::polar(1.0, p * psi);
    return a;
}

SubarrayLayout initial_layout(const ArrayConfig &cfg)
{
    cfg.validate();
    const double l = cfg.nominal_spacing();
    const int cols = cfg.grid_cols();

    SubarrayLayout layout;
    layout.positions.resize(cfg.u);
    for (int i = 0; i < cfg.u; ++i)
    {
        int ix = i % cols;
        int iz = i / cols;
        layout.positions[i] = {ix * l, cfg.h_t + iz * l};
    }
    if (!validate_spacing(layout, cfg.d_min))
        throw std::invalid_argument("initial_layout: nominal spacing " + std::to_string(l) +
                                    " m violates d_min = " + std::to_string(cfg.d_min) + " m");
    return layout;
}

std::vector<Rect> partition_regions(const ArrayConfig &cfg)
{
    cfg.validate();
    const double l = cfg.nominal_spacing();
    const int cols = cfg.grid_cols();
    const int rows = cfg.grid_rows();
    const double side = cfg.region_len * cfg.lambda;

    // Square centered on the nominal grid.
    const double cx = 0.5 * (cols - 1) * l;
    const double cz = cfg.h_t + 0.5 * (rows - 1) * l;
    const double x0 = cx - 0.5 * side;
    const double z0 = cz - 0.5 * side;
    const double tile_w = side / cols;
    const double tile_h = side / rows;

    const double margin = 0.5 * cfg.d_min;
    const double eps = 1e-12 * cfg.lambda;
    if (tile_w - cfg.d_min < -eps || tile_h - cfg.d_min < -eps)
        throw std::invalid_argument(
            "partition_regions: movable region " + std::to_string(cfg.region_len) +
            " lambda splits into tiles smaller than d_min; enlarge the region or relax d_min");

    std::vector<Rect> regions(cfg.u);
    for (int i = 0; i < cfg.u; ++i)
    {
        int ix = i % cols;
        int iz = i / cols;
        Rect r;
        r.x_lo = x0 + ix * tile_w + margin;
        r.x_hi = x0 + (ix + 1) * tile_w - margin;
        r.z_lo = z0 + iz * tile_h + margin;
        r.z_hi = z0 + (iz + 1) * tile_h - margin;
        if (r.x_hi < r.x_lo)
            r.x_lo = r.x_hi = 0.5 * (r.x_lo + r.x_hi);
        if (r.z_hi < r.z_lo)
            r.z_lo = r.z_hi = 0.5 * (r.z_lo + r.z_hi);
        regions[i] = r;
    }
    return regions;
}

void assign_subregions(SubarrayLayout &layout, const ArrayConfig &cfg)
{
    layout.subregions = partition_regions(cfg);
    for (int i = 0; i < cfg.u; ++i)
        layout.subregions[i].clip(layout.positions[i].x, layout.positions[i].z);
}

bool validate_spacing(const SubarrayLayout &layout, double d_min)
{
    const double d2 = d_min * d_min;
    for (std::size_t i = 0; i < layout.positions.size(); ++i)
        for (std::size_t j = i + 1; j < layout.positions.size(); ++j)
        {
            double dx = layout.positions[i].x - layout.positions[j].x;
            double dz = layout.positions[i].z - layout.positions[j].z;
            if (dx * dx + dz * dz < d2 * (1.0 - 1e-12))
                return false;
        }
    return true;
}

} // namespace masim
