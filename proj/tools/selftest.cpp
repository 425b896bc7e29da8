// Built-in sanity battery behind `masim selftest`: quick identity and oracle
// checks that re-derive expected values from scratch instead of trusting the
// library code paths they exercise.

#include "masim/bd_precoder.hpp"
#include "masim/linalg.hpp"
#include "masim/optimizer_driver.hpp"
#include "masim/position_search.hpp"
#include "masim/rng.hpp"
#include "masim/sic_analog.hpp"
#include "masim/sweep.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <string>

namespace
{

using namespace masim;
using cplx = std::complex<double>;

int failures = 0;

void report(const std::string &name, bool ok, const std::string &detail = "")
{
    std::printf("%s %s%s%s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.empty() ? "" : " ",
                detail.c_str());
    if (!ok)
        ++failures;
}

Eigen::MatrixXcd random_matrix(Rng &rng, int rows, int cols)
{
    Eigen::MatrixXcd m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            m(r, c) = rng.cnormal();
    return m;
}

// Literal per-element evaluation of the two-level transmit response.
cplx scalar_tx_entry(double theta, double phi, const SubarrayLayout &layout,
                     const ArrayConfig &cfg, int global_index)
{
    const int n = cfg.n();
    const int e = cfg.elems_per_sub();
    const int sub = global_index / e;
    const int within = global_index % e;
    const int px = within / n;
    const int qz = within % n;

    const double kx = std::sin(theta) * std::cos(phi);
    const double kz = std::cos(theta);
    const double c = 2.0 * kPi / cfg.lambda;
    const double phase = c * (kx * layout.positions[sub].x + kz * layout.positions[sub].z) +
                         c * px * cfg.d_x * kx + c * qz * cfg.d_z * kz;
    return std::polar(1.0 / n, phase);
}

void check_wave_vector()
{
    Eigen::Vector3d a = wave_vector(0.0, 1.3);
    Eigen::Vector3d b = wave_vector(kPi / 3.0, kPi / 4.0);
    bool ok = (a - Eigen::Vector3d(0, 0, 1)).norm() < 1e-15 &&
              std::abs(b.x() - 0.6123724356957945) < 1e-12 &&
              std::abs(b.y() - 0.6123724356957945) < 1e-12 && std::abs(b.z() - 0.5) < 1e-12 &&
              std::abs(b.norm() - 1.0) < 1e-12;
    report("wave_vector axis and trig cases", ok);
}

void check_steering_oracle()
{
    ArrayConfig cfg;
    cfg.m_t = 16;
    cfg.u = 4;
    cfg.l_s = 0.5 * cfg.lambda;
    cfg.d_min = cfg.nominal_spacing();
    SubarrayLayout layout = initial_layout(cfg);

    Rng rng(11);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial)
    {
        double theta = rng.uniform(kPi / 4, 3 * kPi / 4);
        double phi = rng.uniform(-kPi / 2, kPi / 2);
        Eigen::VectorXcd a = tx_response(theta, phi, layout, cfg);
        for (int g = 0; g < cfg.m_t; ++g)
            worst = std::max(worst, std::abs(a(g) - scalar_tx_entry(theta, phi, layout, cfg, g)));
    }
    report("tx_response matches scalar evaluation", worst < 1e-12,
           "max |diff| = " + format_double(worst));
}

void check_channel_oracle()
{
    ArrayConfig cfg;
    cfg.m_t = 16;
    cfg.u = 4;
    cfg.l_s = 0.5 * cfg.lambda;
    cfg.d_min = cfg.nominal_spacing();
    SubarrayLayout layout = initial_layout(cfg);

    ChannelProfile profile;
    profile.n_cl = 2;
    profile.n_ray = 2;
    std::vector<PathSet> paths = draw_paths(99, 1, profile);
    Eigen::MatrixXcd h = assemble_channel(paths[0], layout, cfg);

    // Triple loop over paths, receive and transmit elements.
    const PathSet &ps = paths[0];
    const double scale = std::sqrt(cfg.m_t * cfg.n_r / double(profile.n_cl * profile.n_ray));
    Eigen::MatrixXcd ref = Eigen::MatrixXcd::Zero(cfg.n_r, cfg.m_t);
    for (int i = 0; i < profile.n_cl; ++i)
        for (int j = 0; j < profile.n_ray; ++j)
            for (int r = 0; r < cfg.n_r; ++r)
                for (int g = 0; g < cfg.m_t; ++g)
                {
                    cplx a_r = std::polar(1.0 / std::sqrt(double(cfg.n_r)),
                                          kPi * r * std::sin(ps.arr_theta(i, j)) *
                                              std::cos(ps.arr_phi(i, j)));
                    cplx a_t =
                        scalar_tx_entry(ps.dep_theta(i, j), ps.dep_phi(i, j), layout, cfg, g);
                    ref(r, g) += scale * ps.gain(i, j) * a_r * std::conj(a_t);
                }
    const double err = (h - ref).norm() / ref.norm();
    report("assemble_channel matches triple-loop sum", err < 1e-10,
           "rel err = " + format_double(err));
}

void check_det_lemma()
{
    Rng rng(7);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial)
    {
        const int dim = 3 + static_cast<int>(rng.next_word() % 4);
        Eigen::MatrixXcd x = random_matrix(rng, dim, dim);
        Eigen::MatrixXcd a = x * x.adjoint();
        Eigen::VectorXcd g = random_matrix(rng, dim, 1);
        Eigen::MatrixXcd b = g * g.adjoint();

        double direct = log2det_identity_plus(hermitize(a + b));
        Eigen::MatrixXcd ia = a;
        ia.diagonal().array() += 1.0;
        double split = log2det_hpd(hermitize(ia)) +
                       std::log2(1.0 + g.dot(Eigen::LLT<Eigen::MatrixXcd>(hermitize(ia)).solve(g))
                                           .real());
        worst = std::max(worst, std::abs(direct - split));
    }
    report("determinant lemma split form", worst < 1e-9, "max |diff| = " + format_double(worst));
}

void check_sylvester()
{
    Rng rng(8);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial)
    {
        Eigen::MatrixXcd x = random_matrix(rng, 4, 6);
        double lhs = log2det_identity_plus(hermitize(x * x.adjoint()));
        double rhs = log2det_identity_plus(hermitize(x.adjoint() * x));
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    report("Sylvester determinant identity", worst < 1e-9, "max |diff| = " + format_double(worst));
}

void check_bd_nulling()
{
    SystemProfile system;
    ChannelProfile channel;
    ArrayConfig cfg = to_array_config(system, 12.0);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial)
    {
        std::vector<PathSet> paths = draw_paths(trial_seed(3, trial), system.k_users, channel);
        SubarrayLayout layout = initial_layout(cfg);
        ChannelSet channels = build_channel_set(paths, layout, cfg, 1.0);
        HybridPrecoder precoder;
        precoder.analog = initial_analog(paths, layout, cfg);
        bd_digital(channels, precoder, system.n_s);
        worst = std::max(worst, sum_rate_full(channels, precoder).max_rel_leakage);
    }
    report("BD digital precoder nulls cross-user leakage", worst < 1e-9,
           "max rel leakage = " + format_double(worst));
}

void check_nelder_mead()
{
    Rect region{-1.0, -1.0, 1.0, 1.0};
    auto f = [](double x, double z) {
        return -(x - 0.3) * (x - 0.3) - (z + 0.4) * (z + 0.4);
    };
    NmResult r = nelder_mead_2d(f, region, -0.9, 0.9, 200, 1e-12, 0.25);
    bool ok = std::abs(r.x - 0.3) < 1e-3 && std::abs(r.z + 0.4) < 1e-3;
    report("Nelder-Mead finds interior quadratic maximum", ok);
}

void check_determinism()
{
    SweepSpec spec;
    spec.axis = SweepAxis::snr_db;
    spec.axis_values = {0.0};
    spec.trials = 3;
    spec.schemes = {"SIC-FPA", "SIC-MA"};
    spec.run.outer_max_rounds = 2;
    std::string csv1 = to_csv(run_sweep(spec));
    std::string csv2 = to_csv(run_sweep(spec));
    report("repeated sweep emits identical CSV", csv1 == csv2);
}

} // namespace

namespace masim
{

int run_selftest()
{
    failures = 0;
    check_wave_vector();
    check_steering_oracle();
    check_channel_oracle();
    check_det_lemma();
    check_sylvester();
    check_bd_nulling();
    check_nelder_mead();
    check_determinism();
    std::printf("%s\n", failures == 0 ? "selftest: all checks passed"
                                      : "selftest: FAILURES detected");
    return failures == 0 ? 0 : 1;
}

} // namespace masim
