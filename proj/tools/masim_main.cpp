// masim: movable-subarray hybrid beamforming benchmark driver.
//
// Subcommands:
//   sweep-snr     sum rate vs SNR for the selected schemes
//   sweep-region  sum rate vs movable-region side length
//   single-trial  one seeded trial with full traces and final layout
//   selftest      quick identity / oracle battery

#include "masim/config_io.hpp"
#include "masim/sweep.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

namespace masim
{
int run_selftest();
}

namespace
{

using namespace masim;

struct CommonOpts
{
    std::string profile;
    std::string snr;
    std::string region;
    std::string schemes;
    std::string out;
    std::vector<std::string> formats = {"csv"};
    int trials = -1;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int jobs = -1;
    bool grid_snap = false;
};

void add_common(CLI::App *cmd, CommonOpts &opts)
{
    cmd->add_option("--profile", opts.profile,
                    "Configuration file (default: $MASIM_CONFIG when set)");
    cmd->add_option("--snr", opts.snr, "SNR in dB (comma list for sweep-snr)");
    cmd->add_option("--region", opts.region,
                    "Movable region side in wavelengths (comma list for sweep-region)");
    cmd->add_option("--schemes", opts.schemes, "Comma list of scheme tags");
    cmd->add_option("--trials", opts.trials, "Monte Carlo trials per axis point");
    cmd->add_option("--seed", opts.seed, "Master seed")->each([&opts](const std::string &) {
        opts.seed_set = true;
    });
    cmd->add_option("--out", opts.out, "Output path prefix");
    cmd->add_option("--format", opts.formats, "Output formats: csv, json, plotdata")
        ->delimiter(',');
    cmd->add_option("--jobs", opts.jobs, "Concurrent trials (0 = hardware threads)");
    cmd->add_flag("--grid-snap", opts.grid_snap,
                  "Restrict position search to a lattice of sampling points");
}

SweepSpec build_spec(const CommonOpts &opts, SweepAxis axis)
{
    SweepSpec spec = load_spec(opts.profile);
    spec.axis = axis;

    if (!opts.snr.empty())
    {
        std::vector<double> values = parse_double_list(opts.snr);
        if (axis == SweepAxis::snr_db)
            spec.axis_values = values;
        else if (values.size() == 1)
            spec.snr_db = values[0];
        else
            throw std::invalid_argument("--snr expects a single value here");
    }
    if (!opts.region.empty())
    {
        std::vector<double> values = parse_double_list(opts.region);
        if (axis == SweepAxis::region_len)
            spec.axis_values = values;
        else if (values.size() == 1)
            spec.region_len = values[0];
        else
            throw std::invalid_argument("--region expects a single value here");
    }
    if (spec.axis_values.empty())
        spec.axis_values = axis == SweepAxis::snr_db
                               ? std::vector<double>{-10, -5, 0, 5, 10}
                               : std::vector<double>{4.5, 6, 8, 10, 12};

    if (!opts.schemes.empty())
        spec.schemes = parse_string_list(opts.schemes);
    if (opts.trials >= 0)
        spec.trials = opts.trials;
    if (opts.seed_set)
        spec.master_seed = opts.seed;
    if (opts.jobs >= 0)
        spec.jobs = opts.jobs;
    if (opts.grid_snap)
        spec.run.position.grid_snap = true;
    return spec;
}

void emit_sweep(const SweepResult &result, const CommonOpts &opts, const std::string &default_out)
{
    const std::string prefix = opts.out.empty() ? default_out : opts.out;
    for (const std::string &fmt : opts.formats)
    {
        if (fmt == "csv")
            write_text_file(prefix + ".csv", to_csv(result));
        else if (fmt == "json")
            write_text_file(prefix + ".json", to_json(result).dump(2) + "\n");
        else if (fmt == "plotdata")
            write_text_file(prefix + ".dat", to_plotdata(result));
        else
            throw std::invalid_argument("unknown format '" + fmt +
                                        "' (expected csv, json or plotdata)");
        std::printf("wrote %s.%s\n", prefix.c_str(),
                    fmt == "plotdata" ? "dat" : fmt.c_str());
    }
}

int run_single_trial(const CommonOpts &opts, const std::string &scheme_arg, int trial_index,
                     const std::string &dump_path)
{
    SweepSpec spec = build_spec(opts, SweepAxis::snr_db);
    if (!opts.snr.empty())
    {
        std::vector<double> values = parse_double_list(opts.snr);
        if (values.size() != 1)
            throw std::invalid_argument("single-trial expects a single --snr value");
        spec.snr_db = values[0];
    }
    spec.axis_values = {spec.snr_db};
    validate(spec);

    std::vector<std::string> tags =
        scheme_arg.empty() ? spec.schemes : parse_string_list(scheme_arg);

    const ArrayConfig cfg = to_array_config(spec.system, spec.region_len);
    const double sigma2 = sigma2_from_snr_db(spec.snr_db);
    const std::uint64_t seed = trial_seed(spec.master_seed, trial_index);
    const std::vector<PathSet> paths = draw_paths(seed, spec.system.k_users, spec.channel);

    RunParams run = spec.run;
    run.n_s = spec.system.n_s;
    run.p_max = spec.system.p_max;

    nlohmann::ordered_json out;
    out["master_seed"] = spec.master_seed;
    out["trial_index"] = trial_index;
    out["trial_seed"] = seed;
    out["snr_db"] = spec.snr_db;
    out["region_len"] = spec.region_len;
    out["config_hash"] = spec_hash(spec);
    out["version"] = kVersion;
    out["records"] = nlohmann::ordered_json::array();
    for (const std::string &tag : tags)
    {
        TrialRecord rec = run_scheme(scheme_from_tag(tag), paths, cfg, run, sigma2, seed);
        out["records"].push_back(to_json(rec));
    }

    if (!dump_path.empty())
    {
        SubarrayLayout layout = initial_layout(cfg);
        ChannelSet channels = build_channel_set(paths, layout, cfg, sigma2);
        dump_channels(dump_path, paths, channels, cfg);
    }

    if (opts.out.empty())
        std::cout << out.dump(2) << "\n";
    else
        write_text_file(opts.out, out.dump(2) + "\n");
    return 0;
}

void print_error_json(const std::string &type, const std::string &message)
{
    nlohmann::ordered_json err;
    err["error"] = {{"type", type}, {"message", message}};
    std::cerr << err.dump() << "\n";
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Movable-subarray hybrid beamforming MU-MIMO benchmark"};
    app.require_subcommand(1);

    CommonOpts snr_opts, region_opts, trial_opts;
    std::string trial_scheme, dump_path;
    int trial_index = 0;

    CLI::App *sweep_snr = app.add_subcommand("sweep-snr", "Sum rate versus SNR");
    add_common(sweep_snr, snr_opts);

    CLI::App *sweep_region =
        app.add_subcommand("sweep-region", "Sum rate versus movable-region size");
    add_common(sweep_region, region_opts);

    CLI::App *single = app.add_subcommand("single-trial", "One seeded trial with full traces");
    add_common(single, trial_opts);
    single->add_option("--scheme", trial_scheme, "Scheme tag(s), default: all configured");
    single->add_option("--trial", trial_index, "Trial index for seed derivation");
    single->add_option("--dump-channels", dump_path,
                       "Write the trial's path parameters and channels to a binary file");

    CLI::App *selftest = app.add_subcommand("selftest", "Run the oracle and identity battery");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        print_error_json("cli_parse_error", e.what());
        return e.get_exit_code() == 0 ? 1 : e.get_exit_code();
    }

    try
    {
        if (sweep_snr->parsed())
            emit_sweep(run_sweep(build_spec(snr_opts, SweepAxis::snr_db)), snr_opts, "sweep_snr");
        else if (sweep_region->parsed())
            emit_sweep(run_sweep(build_spec(region_opts, SweepAxis::region_len)), region_opts,
                       "sweep_region");
        else if (single->parsed())
            return run_single_trial(trial_opts, trial_scheme, trial_index, dump_path);
        else if (selftest->parsed())
            return masim::run_selftest();
    }
    catch (const std::exception &e)
    {
        print_error_json("runtime_error", e.what());
        return 1;
    }
    return 0;
}
