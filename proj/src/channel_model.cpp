#include "masim/channel_model.hpp"

#include "masim/rng.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace masim
{

namespace
{

struct AngleGrid
{
    Eigen::MatrixXd theta;
    Eigen::MatrixXd phi;
};

// Cluster centers plus per-ray offsets; elevation drawn before azimuth,
// offsets per ray in the same order.
AngleGrid draw_angles(Rng &rng, const ChannelProfile &p)
{
    AngleGrid g;
    g.theta.resize(p.n_cl, p.n_ray);
    g.phi.resize(p.n_cl, p.n_ray);
    for (int i = 0; i < p.n_cl; ++i)
    {
        double theta_c = rng.uniform(kPi / 4.0, 3.0 * kPi / 4.0);
        double phi_c = rng.uniform(-kPi / 2.0, kPi / 2.0);
        for (int j = 0; j < p.n_ray; ++j)
        {
            g.theta(i, j) = theta_c + rng.uniform(-0.5 * p.spread, 0.5 * p.spread);
            g.phi(i, j) = phi_c + rng.uniform(-0.5 * p.spread, 0.5 * p.spread);
        }
    }
    return g;
}

} // namespace

std::vector<PathSet> draw_paths(std::uint64_t seed, int k_users, const ChannelProfile &profile)
{
    if (profile.n_cl < 1 || profile.n_ray < 1)
        throw std::invalid_argument("draw_paths: n_cl and n_ray must be >= 1");
    if (k_users < 1)
        throw std::invalid_argument("draw_paths: k_users must be >= 1");

    Rng rng(seed);
    std::vector<PathSet> out(k_users);

    AngleGrid shared_dep;
    if (!profile.per_user_departures)
        shared_dep = draw_angles(rng, profile);

    for (int k = 0; k < k_users; ++k)
    {
        PathSet &ps = out[k];
        AngleGrid dep = profile.per_user_departures ? draw_angles(rng, profile) : shared_dep;
        AngleGrid arr = draw_angles(rng, profile);
        ps.dep_theta = dep.theta;
        ps.dep_phi = dep.phi;
        ps.arr_theta = arr.theta;
        ps.arr_phi = arr.phi;
        ps.gain.resize(profile.n_cl, profile.n_ray);
        for (int i = 0; i < profile.n_cl; ++i)
            for (int j = 0; j < profile.n_ray; ++j)
                ps.gain(i, j) = rng.cnormal();
    }
    return out;
}

Eigen::MatrixXcd assemble_channel(const PathSet &paths, const SubarrayLayout &layout,
                                  const ArrayConfig &cfg)
{
    const int n_paths = paths.n_cl() * paths.n_ray();
    const double scale =
        std::sqrt(static_cast<double>(cfg.m_t) * cfg.n_r / static_cast<double>(n_paths));

    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(cfg.n_r, cfg.m_t);
    for (int i = 0; i < paths.n_cl(); ++i)
        for (int j = 0; j < paths.n_ray(); ++j)
        {
            Eigen::VectorXcd a_r = rx_response(paths.arr_theta(i, j), paths.arr_phi(i, j), cfg);
            Eigen::VectorXcd a_t =
                tx_response(paths.dep_theta(i, j), paths.dep_phi(i, j), layout, cfg);
            h.noalias() += (scale * paths.gain(i, j)) * (a_r * a_t.adjoint());
        }
    return h;
}

ChannelSet build_channel_set(const std::vector<PathSet> &paths, const SubarrayLayout &layout,
                             const ArrayConfig &cfg, double sigma2)
{
    ChannelSet cs;
    cs.sigma2 = sigma2;
    cs.block_cols = cfg.elems_per_sub();
    cs.per_user.reserve(paths.size());
    cs.stacked.resize(static_cast<Eigen::Index>(paths.size()) * cfg.n_r, cfg.m_t);
    for (std::size_t k = 0; k < paths.size(); ++k)
    {
        cs.per_user.push_back(assemble_channel(paths[k], layout, cfg));
        cs.stacked.middleRows(static_cast<Eigen::Index>(k) * cfg.n_r, cfg.n_r) = cs.per_user[k];
    }
    return cs;
}

ChannelSet rebuild_on_move(const std::vector<PathSet> &paths, const SubarrayLayout &new_layout,
                           const ArrayConfig &cfg, double sigma2)
{
    return build_channel_set(paths, new_layout, cfg, sigma2);
}

void update_subarray_columns(ChannelSet &channels, const std::vector<PathSet> &paths,
                             const SubarrayLayout &layout, const ArrayConfig &cfg, int m)
{
    const int e = cfg.elems_per_sub();
    const double two_pi_l = 2.0 * kPi / cfg.lambda;
    const Position &pos = layout.positions[m];

    for (std::size_t k = 0; k < paths.size(); ++k)
    {
        const PathSet &ps = paths[k];
        const int n_paths = ps.n_cl() * ps.n_ray();
        const double scale =
            std::sqrt(static_cast<double>(cfg.m_t) * cfg.n_r / static_cast<double>(n_paths));

        Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(cfg.n_r, e);
        for (int i = 0; i < ps.n_cl(); ++i)
            for (int j = 0; j < ps.n_ray(); ++j)
            {
                const double theta = ps.dep_theta(i, j);
                const double phi = ps.dep_phi(i, j);
                const Eigen::Vector3d kv = wave_vector(theta, phi);
                const std::complex<double> sub_ph =
                    std::polar(1.0, two_pi_l * (kv.x() * pos.x + kv.z() * pos.z));
                Eigen::VectorXcd a_r = rx_response(ps.arr_theta(i, j), ps.arr_phi(i, j), cfg);
                Eigen::VectorXcd a_tm = sub_ph * elem_response(theta, phi, cfg);
                block.noalias() += (scale * ps.gain(i, j)) * (a_r * a_tm.adjoint());
            }
        channels.per_user[k].middleCols(m * e, e) = block;
        channels.stacked.middleRows(static_cast<Eigen::Index>(k) * cfg.n_r, cfg.n_r)
            .middleCols(m * e, e) = block;
    }
}

namespace
{

void put_u32(std::ofstream &os, std::uint32_t v)
{
    char buf[4];
    std::memcpy(buf, &v, 4);
    os.write(buf, 4);
}

void put_f64(std::ofstream &os, double v)
{
    char buf[8];
    std::memcpy(buf, &v, 8);
    os.write(buf, 8);
}

void put_real_matrix(std::ofstream &os, const Eigen::MatrixXd &m)
{
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            put_f64(os, m(r, c));
}

void put_cplx_matrix(std::ofstream &os, const Eigen::MatrixXcd &m)
{
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
        {
            put_f64(os, m(r, c).real());
            put_f64(os, m(r, c).imag());
        }
}

std::uint32_t get_u32(std::ifstream &is)
{
    char buf[4];
    is.read(buf, 4);
    std::uint32_t v;
    std::memcpy(&v, buf, 4);
    return v;
}

double get_f64(std::ifstream &is)
{
    char buf[8];
    is.read(buf, 8);
    double v;
    std::memcpy(&v, buf, 8);
    return v;
}

void get_real_matrix(std::ifstream &is, Eigen::MatrixXd &m)
{
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            m(r, c) = get_f64(is);
}

void get_cplx_matrix(std::ifstream &is, Eigen::MatrixXcd &m)
{
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
        {
            double re = get_f64(is);
            double im = get_f64(is);
            m(r, c) = {re, im};
        }
}

constexpr char kMagic[4] = {'M', 'A', 'C', 'H'};

} // namespace

void dump_channels(const std::string &path, const std::vector<PathSet> &paths,
                   const ChannelSet &channels, const ArrayConfig &cfg)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("dump_channels: cannot open '" + path + "' for writing");

    os.write(kMagic, 4);
    put_u32(os, 1); // version
    put_u32(os, static_cast<std::uint32_t>(paths.size()));
    put_u32(os, static_cast<std::uint32_t>(paths.empty() ? 0 : paths[0].n_cl()));
    put_u32(os, static_cast<std::uint32_t>(paths.empty() ? 0 : paths[0].n_ray()));
    put_u32(os, static_cast<std::uint32_t>(cfg.n_r));
    put_u32(os, static_cast<std::uint32_t>(cfg.m_t));
    put_u32(os, static_cast<std::uint32_t>(cfg.u));
    put_f64(os, cfg.lambda);

    for (std::size_t k = 0; k < paths.size(); ++k)
    {
        put_real_matrix(os, paths[k].dep_theta);
        put_real_matrix(os, paths[k].dep_phi);
        put_real_matrix(os, paths[k].arr_theta);
        put_real_matrix(os, paths[k].arr_phi);
        put_cplx_matrix(os, paths[k].gain);
        put_cplx_matrix(os, channels.per_user[k]);
    }
    if (!os)
        throw std::runtime_error("dump_channels: write to '" + path + "' failed");
}

ChannelDump load_channels(const std::string &path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("load_channels: cannot open '" + path + "'");

    char magic[4];
    is.read(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("load_channels: '" + path + "' is not a channel dump");
    std::uint32_t version = get_u32(is);
    if (version != 1)
        throw std::runtime_error("load_channels: unsupported version " + std::to_string(version));

    ChannelDump d;
    d.k_users = static_cast<int>(get_u32(is));
    d.n_cl = static_cast<int>(get_u32(is));
    d.n_ray = static_cast<int>(get_u32(is));
    d.n_r = static_cast<int>(get_u32(is));
    d.m_t = static_cast<int>(get_u32(is));
    d.u = static_cast<int>(get_u32(is));
    d.lambda = get_f64(is);

    d.paths.resize(d.k_users);
    d.h.resize(d.k_users);
    for (int k = 0; k < d.k_users; ++k)
    {
        PathSet &ps = d.paths[k];
        ps.dep_theta.resize(d.n_cl, d.n_ray);
        ps.dep_phi.resize(d.n_cl, d.n_ray);
        ps.arr_theta.resize(d.n_cl, d.n_ray);
        ps.arr_phi.resize(d.n_cl, d.n_ray);
        ps.gain.resize(d.n_cl, d.n_ray);
        get_real_matrix(is, ps.dep_theta);
        get_real_matrix(is, ps.dep_phi);
        get_real_matrix(is, ps.arr_theta);
        get_real_matrix(is, ps.arr_phi);
        get_cplx_matrix(is, ps.gain);
        d.h[k].resize(d.n_r, d.m_t);
        get_cplx_matrix(is, d.h[k]);
    }
    if (!is)
        throw std::runtime_error("load_channels: truncated file '" + path + "'");
    return d;
}

} // namespace masim
