#include "masim/sweep.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace masim
{

ArrayConfig to_array_config(const SystemProfile &system, double region_len)
{
    ArrayConfig cfg;
    cfg.m_t = system.m_t;
    cfg.u = system.u;
    cfg.n_r = system.n_r;
    cfg.lambda = kSpeedOfLight / (system.freq_ghz * 1e9);
    cfg.d_x = 0.5 * cfg.lambda;
    cfg.d_z = 0.5 * cfg.lambda;
    cfg.l_s = system.l_s * cfg.lambda;
    cfg.h_t = system.h_t;
    cfg.region_len = region_len;
    cfg.d_min = system.d_min > 0 ? system.d_min * cfg.lambda : 0.0;
    if (cfg.d_min <= 0)
        cfg.d_min = cfg.nominal_spacing(); // keeps the nominal grid feasible
    return cfg;
}

const char *axis_name(SweepAxis axis)
{
    return axis == SweepAxis::snr_db ? "snr_db" : "region_len";
}

void validate(const SweepSpec &spec)
{
    if (spec.trials < 1)
        throw std::invalid_argument("sweep: trials must be >= 1");
    if (spec.axis_values.empty())
        throw std::invalid_argument("sweep: no axis values given");
    if (spec.schemes.empty())
        throw std::invalid_argument("sweep: no schemes selected");
    for (const std::string &tag : spec.schemes)
        scheme_from_tag(tag); // throws on unknown tag

    const SystemProfile &s = spec.system;
    if (!check_bd_feasible(s.k_users, s.n_r, s.n_s, s.u))
        throw std::invalid_argument(
            "sweep: BD-infeasible profile: c_t - (K-1)*n_r = " +
            std::to_string(s.u - (s.k_users - 1) * s.n_r) + " < n_s = " + std::to_string(s.n_s));
    if (s.n_s > s.n_r)
        throw std::invalid_argument("sweep: n_s must not exceed n_r");
    if (spec.channel.n_cl < 1 || spec.channel.n_ray < 1)
        throw std::invalid_argument("sweep: n_cl and n_ray must be >= 1");
    if (spec.channel.spread < 0)
        throw std::invalid_argument("sweep: angular spread must be non-negative");

    // Surface geometry errors (UPA squareness, d_min vs region) up front for
    // every axis point the sweep will touch.
    for (double v : spec.axis_values)
    {
        const double region = spec.axis == SweepAxis::region_len ? v : spec.region_len;
        ArrayConfig cfg = to_array_config(s, region);
        cfg.validate();
        initial_layout(cfg);
        partition_regions(cfg);
    }
}

std::uint64_t trial_seed(std::uint64_t master_seed, int trial)
{
    return hash_words({master_seed, static_cast<std::uint64_t>(trial)});
}

double sigma2_from_snr_db(double snr_db)
{
    return std::pow(10.0, -snr_db / 10.0);
}

namespace
{

void parallel_for(int count, int jobs, const std::function<void(int)> &fn)
{
    if (jobs <= 0)
        jobs = static_cast<int>(std::thread::hardware_concurrency());
    jobs = std::max(1, std::min(jobs, count));
    if (jobs == 1)
    {
        for (int i = 0; i < count; ++i)
            fn(i);
        return;
    }

    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;)
        {
            int i = next.fetch_add(1);
            if (i >= count)
                return;
            try
            {
                fn(i);
            }
            catch (...)
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error)
                    error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int j = 0; j < jobs; ++j)
        pool.emplace_back(worker);
    for (auto &t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

nlohmann::ordered_json spec_to_json(const SweepSpec &spec)
{
    nlohmann::ordered_json j;
    j["axis"] = axis_name(spec.axis);
    j["axis_values"] = spec.axis_values;
    j["trials"] = spec.trials;
    j["master_seed"] = spec.master_seed;
    j["schemes"] = spec.schemes;
    j["system"] = {{"k_users", spec.system.k_users}, {"n_r", spec.system.n_r},
                   {"n_s", spec.system.n_s},         {"u", spec.system.u},
                   {"m_t", spec.system.m_t},         {"freq_ghz", spec.system.freq_ghz},
                   {"l_s", spec.system.l_s},         {"d_min", spec.system.d_min},
                   {"h_t", spec.system.h_t},         {"p_max", spec.system.p_max}};
    j["channel"] = {{"n_cl", spec.channel.n_cl},
                    {"n_ray", spec.channel.n_ray},
                    {"spread", spec.channel.spread},
                    {"per_user_departures", spec.channel.per_user_departures}};
    j["run"] = {{"sic_max_rounds", spec.run.sic_max_rounds},
                {"sic_tol", spec.run.sic_tol},
                {"outer_max_rounds", spec.run.outer_max_rounds},
                {"outer_tol", spec.run.outer_tol},
                {"nm_iters", spec.run.position.nm_iters},
                {"nm_ftol", spec.run.position.nm_ftol},
                {"simplex_leg", spec.run.position.simplex_leg},
                {"random_order", spec.run.position.random_order},
                {"grid_snap", spec.run.position.grid_snap},
                {"grid_points", spec.run.position.grid_points}};
    j["snr_db"] = spec.snr_db;
    j["region_len"] = spec.region_len;
    return j;
}

} // namespace

std::string spec_hash(const SweepSpec &spec)
{
    const std::string canon = spec_to_json(spec).dump();
    std::uint64_t h = 0xCBF29CE484222325ULL; // FNV-1a 64
    for (unsigned char c : canon)
    {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

SweepResult run_sweep(const SweepSpec &spec)
{
    validate(spec);

    const int n_axis = static_cast<int>(spec.axis_values.size());
    const int n_trials = spec.trials;
    const int n_schemes = static_cast<int>(spec.schemes.size());

    std::vector<Scheme> schemes;
    schemes.reserve(n_schemes);
    for (const std::string &tag : spec.schemes)
        schemes.push_back(scheme_from_tag(tag));

    RunParams run = spec.run;
    run.n_s = spec.system.n_s;
    run.p_max = spec.system.p_max;

    std::vector<double> rates(static_cast<std::size_t>(n_axis) * n_trials * n_schemes, 0.0);
    std::vector<char> excluded(static_cast<std::size_t>(n_axis) * n_trials, 0);

    parallel_for(n_axis * n_trials, spec.jobs, [&](int idx) {
        const int a = idx / n_trials;
        const int t = idx % n_trials;
        const std::uint64_t seed = trial_seed(spec.master_seed, t);
        const double region =
            spec.axis == SweepAxis::region_len ? spec.axis_values[a] : spec.region_len;
        const double snr = spec.axis == SweepAxis::snr_db ? spec.axis_values[a] : spec.snr_db;

        const ArrayConfig cfg = to_array_config(spec.system, region);
        const double sigma2 = sigma2_from_snr_db(snr);
        const std::vector<PathSet> paths = draw_paths(seed, spec.system.k_users, spec.channel);

        try
        {
            for (int s = 0; s < n_schemes; ++s)
            {
                TrialRecord rec = run_scheme(schemes[s], paths, cfg, run, sigma2, seed);
                rates[(static_cast<std::size_t>(a) * n_trials + t) * n_schemes + s] = rec.rate_bd;
            }
        }
        catch (const bd_rank_error &)
        {
            excluded[static_cast<std::size_t>(a) * n_trials + t] = 1;
        }
    });

    SweepResult result;
    result.axis = axis_name(spec.axis);
    result.master_seed = spec.master_seed;
    result.config_hash = spec_hash(spec);
    result.version = kVersion;
    result.total_trials = n_axis * n_trials;
    for (char e : excluded)
        result.excluded_trials += e;
    result.exclusion_rate =
        result.total_trials > 0
            ? static_cast<double>(result.excluded_trials) / result.total_trials
            : 0.0;
    if (result.exclusion_rate > 0.05)
        throw std::runtime_error("run_sweep: " + std::to_string(result.excluded_trials) + " of " +
                                 std::to_string(result.total_trials) +
                                 " trials failed BD rank checks (> 5%)");

    for (int a = 0; a < n_axis; ++a)
        for (int s = 0; s < n_schemes; ++s)
        {
            SweepRow row;
            row.axis_value = spec.axis_values[a];
            row.scheme = spec.schemes[s];

            double sum = 0.0;
            int n = 0;
            for (int t = 0; t < n_trials; ++t)
            {
                if (excluded[static_cast<std::size_t>(a) * n_trials + t])
                    continue;
                sum += rates[(static_cast<std::size_t>(a) * n_trials + t) * n_schemes + s];
                ++n;
            }
            row.trials = n;
            row.mean_rate = n > 0 ? sum / n : 0.0;
            double ss = 0.0;
            for (int t = 0; t < n_trials; ++t)
            {
                if (excluded[static_cast<std::size_t>(a) * n_trials + t])
                    continue;
                const double d =
                    rates[(static_cast<std::size_t>(a) * n_trials + t) * n_schemes + s] -
                    row.mean_rate;
                ss += d * d;
            }
            row.std_rate = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
            row.ci95 = n > 0 ? 1.96 * row.std_rate / std::sqrt(static_cast<double>(n)) : 0.0;
            result.rows.push_back(row);
        }
    return result;
}

std::string format_double(double value)
{
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc())
        throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, ptr);
}

std::string to_csv(const SweepResult &result)
{
    std::string out = "axis_name,axis_value,scheme,trials,mean_rate,std_rate,ci95\n";
    for (const SweepRow &row : result.rows)
    {
        out += result.axis;
        out += ',';
        out += format_double(row.axis_value);
        out += ',';
        out += row.scheme;
        out += ',';
        out += std::to_string(row.trials);
        out += ',';
        out += format_double(row.mean_rate);
        out += ',';
        out += format_double(row.std_rate);
        out += ',';
        out += format_double(row.ci95);
        out += '\n';
    }
    return out;
}

std::string to_plotdata(const SweepResult &result)
{
    // One block per scheme, separated by two blank lines (gnuplot `index`).
    std::vector<std::string> seen;
    std::string out;
    for (const SweepRow &probe : result.rows)
    {
        bool new_scheme = true;
        for (const std::string &s : seen)
            if (s == probe.scheme)
                new_scheme = false;
        if (!new_scheme)
            continue;
        seen.push_back(probe.scheme);

        if (!out.empty())
            out += "\n\n";
        out += "# scheme: " + probe.scheme + "\n";
        out += "# " + result.axis + " mean_rate std_rate ci95 trials\n";
        for (const SweepRow &row : result.rows)
        {
            if (row.scheme != probe.scheme)
                continue;
            out += format_double(row.axis_value) + " " + format_double(row.mean_rate) + " " +
                   format_double(row.std_rate) + " " + format_double(row.ci95) + " " +
                   std::to_string(row.trials) + "\n";
        }
    }
    return out;
}

nlohmann::ordered_json to_json(const SweepResult &result)
{
    nlohmann::ordered_json j;
    j["axis"] = result.axis;
    j["provenance"] = {{"config_hash", result.config_hash},
                       {"master_seed", result.master_seed},
                       {"version", result.version}};
    j["exclusions"] = {{"excluded_trials", result.excluded_trials},
                       {"total_trials", result.total_trials},
                       {"rate", result.exclusion_rate}};
    j["results"] = nlohmann::ordered_json::array();
    for (const SweepRow &row : result.rows)
        j["results"].push_back({{"axis_value", row.axis_value},
                                {"scheme", row.scheme},
                                {"trials", row.trials},
                                {"mean_rate", row.mean_rate},
                                {"std_rate", row.std_rate},
                                {"ci95", row.ci95}});
    return j;
}

nlohmann::ordered_json to_json(const TrialRecord &record)
{
    nlohmann::ordered_json j;
    j["seed"] = record.seed;
    j["scheme"] = record.scheme;
    j["rate_bd"] = record.rate_bd;
    j["rate_simplified"] = record.rate_simplified;
    j["initial_objective"] = record.initial_objective;
    j["outer_trace"] = record.outer_trace;
    j["outer_iterations"] = record.outer_iterations;
    j["per_user_rates"] =
        std::vector<double>(record.report.per_user.data(),
                            record.report.per_user.data() + record.report.per_user.size());
    j["max_rel_leakage"] = record.report.max_rel_leakage;
    j["nonmonotone_steps"] = record.nonmonotone_steps;
    j["chain_updates"] = record.chain_updates;
    j["wall_time_s"] = record.wall_time_s;
    j["round_wall_s"] = record.round_wall_s;

    auto positions = nlohmann::ordered_json::array();
    for (const Position &p : record.final_layout.positions)
        positions.push_back({p.x, p.z});
    j["final_layout"] = {{"positions", positions}};
    if (!record.final_layout.subregions.empty())
    {
        auto regions = nlohmann::ordered_json::array();
        for (const Rect &r : record.final_layout.subregions)
            regions.push_back({r.x_lo, r.z_lo, r.x_hi, r.z_hi});
        j["final_layout"]["subregions"] = regions;
    }
    return j;
}

void write_text_file(const std::string &path, const std::string &content)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    os << content;
    if (!os)
        throw std::runtime_error("write to '" + path + "' failed");
}

} // namespace masim
