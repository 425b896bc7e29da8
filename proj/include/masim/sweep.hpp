#ifndef MASIM_SWEEP_HPP
#define MASIM_SWEEP_HPP

#include "masim/optimizer_driver.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace masim
{

inline constexpr const char *kVersion = "0.1.0";

// Array, user and power description in config units: spacings in
// wavelengths, frequency in GHz. d_min = 0 means "use the nominal spacing".
struct SystemProfile
{
    int k_users = 2;
    int n_r = 2;
    int n_s = 2;
    int u = 8;
    int m_t = 32;
    double freq_ghz = 28.0;
    double l_s = 0.5;   // wavelengths
    double d_min = 0.0; // wavelengths, 0 = nominal spacing
    double h_t = 0.0;   // meters
    double p_max = 1.0;
};

ArrayConfig to_array_config(const SystemProfile &system, double region_len);

enum class SweepAxis
{
    snr_db,
    region_len
};

const char *axis_name(SweepAxis axis);

struct SweepSpec
{
    SweepAxis axis = SweepAxis::snr_db;
    std::vector<double> axis_values;
    int trials = 200;
    std::uint64_t master_seed = 1;
    std::vector<std::string> schemes = {"SIC-FPA", "SIC-MA", "U-SIC-FPA", "U-SIC-MA"};
    SystemProfile system;
    ChannelProfile channel;
    RunParams run;
    double snr_db = 0.0;     // fixed value when the axis is region_len
    double region_len = 12.0; // fixed value when the axis is snr_db
    int jobs = 0;            // concurrent trials, 0 = hardware concurrency
};

// Throws std::invalid_argument when the spec is inconsistent (BD-infeasible
// profile, non-square subarray, unknown scheme, ...).
void validate(const SweepSpec &spec);

// Seed for trial t. The sweep axis never enters: one trial sees identical
// path draws at every axis point, so scheme and axis comparisons are paired.
std::uint64_t trial_seed(std::uint64_t master_seed, int trial);

double sigma2_from_snr_db(double snr_db);

// Canonical fingerprint of a spec, stable across runs.
std::string spec_hash(const SweepSpec &spec);

struct SweepRow
{
    double axis_value = 0;
    std::string scheme;
    int trials = 0;
    double mean_rate = 0, std_rate = 0, ci95 = 0;
};

struct SweepResult
{
    std::string axis;
    std::vector<SweepRow> rows;
    std::uint64_t master_seed = 0;
    std::string config_hash;
    std::string version;
    int excluded_trials = 0;
    int total_trials = 0;
    double exclusion_rate = 0.0;
};

// Runs trials x axis points x schemes with paired path draws and aggregates
// mean / sample std / normal-approximation 95% CI per (axis point, scheme).
// Per-trial BD rank failures are excluded; more than 5% of them fail the
// sweep. Trials may run concurrently; output is order-independent.
SweepResult run_sweep(const SweepSpec &spec);

// Emission. CSV columns: axis_name,axis_value,scheme,trials,mean_rate,
// std_rate,ci95. plotdata writes one gnuplot-style block per scheme. JSON
// mirrors SweepResult losslessly, provenance included.
std::string to_csv(const SweepResult &result);
std::string to_plotdata(const SweepResult &result);
nlohmann::ordered_json to_json(const SweepResult &result);

nlohmann::ordered_json to_json(const TrialRecord &record);

// Shortest round-trip decimal form, locale-independent.
std::string format_double(double value);

void write_text_file(const std::string &path, const std::string &content);

} // namespace masim

#endif
