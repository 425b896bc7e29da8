#include "masim/optimizer_driver.hpp"

#include <chrono>
#include <stdexcept>

namespace masim
{

const std::vector<Scheme> &all_schemes()
{
    static const std::vector<Scheme> schemes = {
        {"SIC-FPA", AnalogMode::constrained, false},
        {"SIC-MA", AnalogMode::constrained, true},
        {"U-SIC-FPA", AnalogMode::unconstrained, false},
        {"U-SIC-MA", AnalogMode::unconstrained, true},
    };
    return schemes;
}

Scheme scheme_from_tag(const std::string &tag)
{
    for (const Scheme &s : all_schemes())
        if (s.tag == tag)
            return s;
    throw std::invalid_argument("unknown scheme '" + tag +
                                "' (expected SIC-FPA, SIC-MA, U-SIC-FPA or U-SIC-MA)");
}

TrialRecord run_scheme(const Scheme &scheme, const std::vector<PathSet> &paths,
                       const ArrayConfig &cfg, const RunParams &params, double sigma2,
                       std::uint64_t seed)
{
    const auto t0 = std::chrono::steady_clock::now();

    SubarrayLayout layout = initial_layout(cfg);
    if (scheme.positions_movable)
        assign_subregions(layout, cfg);

    ChannelSet channels = build_channel_set(paths, layout, cfg, sigma2);

    HybridPrecoder precoder;
    precoder.p_max = params.p_max;
    precoder.analog = initial_analog(paths, layout, cfg);

    PositionSearchParams pos_params = params.position;
    if (pos_params.simplex_leg <= 0)
        pos_params.simplex_leg = 0.25 * cfg.lambda;
    Rng order_rng(hash_words({seed, 0x706F73ULL}));

    TrialRecord rec;
    rec.seed = seed;
    rec.scheme = scheme.tag;
    rec.initial_objective = sum_rate_simplified(channels, precoder.analog);

    double prev = rec.initial_objective;
    for (int round = 0; round < params.outer_max_rounds; ++round)
    {
        const auto r0 = std::chrono::steady_clock::now();

        SicTrace sweep = sic_sweep(channels, precoder.analog, scheme.analog_mode,
                                   params.sic_max_rounds, params.sic_tol);
        rec.nonmonotone_steps += sweep.nonmonotone_rounds;
        rec.chain_updates += sweep.chain_updates;

        if (scheme.positions_movable)
            optimize_positions(paths, layout, channels, cfg, precoder.analog, pos_params,
                               &order_rng);

        const double obj = sum_rate_simplified(channels, precoder.analog);
        rec.outer_trace.push_back(obj);
        ++rec.outer_iterations;
        rec.round_wall_s.push_back(
            std::chrono::duration<double>(std::chrono::steady_clock::now() - r0).count());

        if (obj - prev < params.outer_tol)
            break;
        prev = obj;
    }

    bd_digital(channels, precoder, params.n_s);
    rec.report = sum_rate_full(channels, precoder);
    rec.rate_bd = rec.report.sum;
    rec.rate_simplified = sum_rate_simplified(channels, precoder.analog);
    rec.final_layout = layout;
    rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

} // namespace masim
