#ifndef MASIM_OPTIMIZER_DRIVER_HPP
#define MASIM_OPTIMIZER_DRIVER_HPP

#include "masim/bd_precoder.hpp"
#include "masim/position_search.hpp"
#include "masim/sic_analog.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace masim
{

// One benchmark scheme: constrained/unconstrained analog updates, with or
// without subarray position optimization.
struct Scheme
{
    std::string tag;
    AnalogMode analog_mode = AnalogMode::constrained;
    bool positions_movable = false;
};

// SIC-FPA, SIC-MA, U-SIC-FPA, U-SIC-MA.
const std::vector<Scheme> &all_schemes();
Scheme scheme_from_tag(const std::string &tag); // throws on unknown tag

struct RunParams
{
    int sic_max_rounds = 20;
    double sic_tol = 1e-4;      // bits/s/Hz per analog round
    int outer_max_rounds = 10;
    double outer_tol = 1e-3;    // bits/s/Hz per outer round
    PositionSearchParams position;
    int n_s = 2;                // streams per user
    double p_max = 1.0;
};

struct TrialRecord
{
    std::uint64_t seed = 0;
    std::string scheme;
    double initial_objective = 0.0;    // simplified sum rate at the start
    std::vector<double> outer_trace;   // one entry per completed outer round
    int outer_iterations = 0;
    double rate_bd = 0.0;              // sum rate with the BD digital precoder
    double rate_simplified = 0.0;      // final surrogate objective
    RateReport report;
    SubarrayLayout final_layout;
    int nonmonotone_steps = 0;
    int chain_updates = 0;
    double wall_time_s = 0.0;          // excluded from determinism contracts
    std::vector<double> round_wall_s;
};

// Alternates full analog SIC sweeps with (for movable schemes) full position
// SIC passes until the simplified sum rate stalls, then computes the BD
// digital precoder once on the final analog precoder and reports both rates.
TrialRecord run_scheme(const Scheme &scheme, const std::vector<PathSet> &paths,
                       const ArrayConfig &cfg, const RunParams &params, double sigma2,
                       std::uint64_t seed);

} // namespace masim

#endif
