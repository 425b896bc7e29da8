#include "masim/config_io.hpp"
#include "masim/sweep.hpp"

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>

using namespace masim;

namespace
{

SweepSpec tiny_spec()
{
    SweepSpec spec;
    spec.axis = SweepAxis::snr_db;
    spec.axis_values = {0.0};
    spec.trials = 1;
    spec.schemes = {"SIC-FPA", "SIC-MA"};
    spec.run.outer_max_rounds = 2;
    spec.jobs = 1;
    return spec;
}

} // namespace

TEST_CASE("spec validation rejects inconsistent profiles")
{
    SweepSpec spec = tiny_spec();
    validate(spec); // default profile is fine

    SUBCASE("BD-infeasible user load")
    {
        spec.system.k_users = 4;
        spec.system.u = 4;
        spec.system.m_t = 16;
        CHECK_THROWS_AS(validate(spec), std::invalid_argument);
    }

    SUBCASE("non-square subarray")
    {
        spec.system.m_t = 24; // 24/8 = 3 elements
        CHECK_THROWS_AS(validate(spec), std::invalid_argument);
    }

    SUBCASE("unknown scheme tag")
    {
        spec.schemes = {"SIC-FPA", "WRONG"};
        CHECK_THROWS_AS(validate(spec), std::invalid_argument);
    }

    SUBCASE("zero trials")
    {
        spec.trials = 0;
        CHECK_THROWS_AS(validate(spec), std::invalid_argument);
    }

    SUBCASE("region too small for d_min")
    {
        spec.axis = SweepAxis::region_len;
        spec.axis_values = {1.0};
        CHECK_THROWS_AS(validate(spec), std::invalid_argument);
    }
}

TEST_CASE("single-trial sweep emits one row per scheme with zero-width CI")
{
    SweepResult result = run_sweep(tiny_spec());
    REQUIRE(result.rows.size() == 2);
    for (const SweepRow &row : result.rows)
    {
        CHECK(row.trials == 1);
        CHECK(row.std_rate == 0.0);
        CHECK(row.ci95 == 0.0);
        CHECK(row.mean_rate > 0.0);
    }
    CHECK(result.excluded_trials == 0);
}

TEST_CASE("sweep output is deterministic and paired")
{
    SweepSpec spec = tiny_spec();
    spec.trials = 5;
    spec.jobs = 4; // concurrency must not affect bytes

    SweepResult r1 = run_sweep(spec);
    SweepResult r2 = run_sweep(spec);
    CHECK(to_csv(r1) == to_csv(r2));
    CHECK(to_plotdata(r1) == to_plotdata(r2));
    CHECK(to_json(r1).dump(2) == to_json(r2).dump(2));

    SUBCASE("worker count does not change the bytes")
    {
        spec.jobs = 1;
        CHECK(to_csv(run_sweep(spec)) == to_csv(r1));
    }

    SUBCASE("different master seed changes the data")
    {
        spec.master_seed = 2;
        CHECK(to_csv(run_sweep(spec)) != to_csv(r1));
    }

    SUBCASE("means stay inside the per-trial range")
    {
        for (const SweepRow &row : r1.rows)
        {
            CHECK(row.mean_rate >= 0.0);
            CHECK(row.ci95 == doctest::Approx(1.96 * row.std_rate / std::sqrt(5.0)));
        }
    }
}

TEST_CASE("per-trial dominance of the unconstrained analog sweep")
{
    // The constrained initializer is feasible for the unconstrained update;
    // the exact eigenvector ascent should never end below the projected one.
    SystemProfile system;
    ChannelProfile channel;
    ArrayConfig cfg = to_array_config(system, 12.0);
    RunParams params;
    params.n_s = system.n_s;

    int dominated = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t)
    {
        std::uint64_t seed = trial_seed(1, t);
        std::vector<PathSet> paths = draw_paths(seed, system.k_users, channel);
        TrialRecord con = run_scheme(scheme_from_tag("SIC-FPA"), paths, cfg, params, 1.0, seed);
        TrialRecord unc = run_scheme(scheme_from_tag("U-SIC-FPA"), paths, cfg, params, 1.0, seed);
        if (unc.rate_simplified >= con.rate_simplified - 1e-9)
            ++dominated;
    }
    CHECK(dominated == trials);
}

TEST_CASE("emission formats")
{
    SUBCASE("empty result emits a header-only CSV")
    {
        SweepResult empty;
        empty.axis = "snr_db";
        CHECK(to_csv(empty) == "axis_name,axis_value,scheme,trials,mean_rate,std_rate,ci95\n");
        CHECK(to_plotdata(empty).empty());
    }

    SUBCASE("JSON round trip is byte-identical")
    {
        SweepSpec spec = tiny_spec();
        spec.axis_values = {-5.0, 0.0};
        spec.trials = 2;
        SweepResult result = run_sweep(spec);
        std::string once = to_json(result).dump(2);
        std::string again = nlohmann::ordered_json::parse(once).dump(2);
        CHECK(once == again);
    }

    SUBCASE("plotdata has one block per scheme")
    {
        SweepSpec spec = tiny_spec();
        spec.schemes = {"SIC-FPA", "SIC-MA", "U-SIC-FPA"};
        std::string data = to_plotdata(run_sweep(spec));
        int blocks = 0;
        std::size_t pos = 0;
        while ((pos = data.find("# scheme:", pos)) != std::string::npos)
        {
            ++blocks;
            pos += 9;
        }
        CHECK(blocks == 3);
    }

    SUBCASE("CSV writes the exact column set in configured order")
    {
        SweepResult result = run_sweep(tiny_spec());
        std::string csv = to_csv(result);
        CHECK(csv.substr(0, csv.find('\n')) ==
              "axis_name,axis_value,scheme,trials,mean_rate,std_rate,ci95");
        CHECK(csv.find("snr_db,0,SIC-FPA,1,") != std::string::npos);
    }
}

TEST_CASE("trial seeds are stable across runs and platforms")
{
    // Frozen splittable-hash outputs; a change here breaks reproducibility
    // of every published sweep.
    CHECK(trial_seed(1, 0) == 0x892b147f5b2c8d8dULL);
    CHECK(trial_seed(1, 1) == 0xc933e4fc206e16dfULL);
    CHECK(trial_seed(2, 0) == 0xac355166e8768f5eULL);
    CHECK(trial_seed(1, 2) != trial_seed(1, 1));
}

TEST_CASE("config files, overrides and the environment variable")
{
    const std::string path = "masim_test_config.cfg";
    {
        std::ofstream os(path);
        os << "# comment line\n";
        os << "m_t = 16\n";
        os << "u = 4\n";
        os << "trials = 7\n";
        os << "schemes = SIC-FPA , U-SIC-FPA\n";
        os << "spread_deg = 10\n";
        os << "grid_snap = true\n";
    }

    SUBCASE("values land in the right fields")
    {
        SweepSpec spec = load_spec(path);
        CHECK(spec.system.m_t == 16);
        CHECK(spec.system.u == 4);
        CHECK(spec.trials == 7);
        REQUIRE(spec.schemes.size() == 2);
        CHECK(spec.schemes[1] == "U-SIC-FPA");
        CHECK(spec.channel.spread == doctest::Approx(10.0 * kPi / 180.0));
        CHECK(spec.run.position.grid_snap);
    }

    SUBCASE("the environment variable supplies the default path")
    {
        setenv("MASIM_CONFIG", path.c_str(), 1);
        SweepSpec spec = load_spec();
        CHECK(spec.trials == 7);
        unsetenv("MASIM_CONFIG");
    }

    SUBCASE("unknown keys and malformed values are rejected")
    {
        SweepSpec spec;
        CHECK_THROWS_AS(apply_config_entry(spec, "mt", "16"), std::invalid_argument);
        CHECK_THROWS_AS(apply_config_entry(spec, "trials", "many"), std::invalid_argument);
        CHECK_THROWS_AS(apply_config_entry(spec, "grid_snap", "maybe"), std::invalid_argument);
    }

    SUBCASE("missing file is a clear error")
    {
        CHECK_THROWS_AS(load_spec("no_such_file.cfg"), std::runtime_error);
    }

    std::remove(path.c_str());
}

TEST_CASE("file errors surface the target path")
{
    SweepResult empty;
    empty.axis = "snr_db";
    try
    {
        write_text_file("/nonexistent_dir_for_sure/out.csv", to_csv(empty));
        FAIL("expected an exception");
    }
    catch (const std::runtime_error &e)
    {
        CHECK(std::string(e.what()).find("/nonexistent_dir_for_sure/out.csv") !=
              std::string::npos);
    }
}

TEST_CASE("channel dump rejects foreign files")
{
    const std::string path = "masim_not_a_dump.bin";
    {
        std::ofstream os(path, std::ios::binary);
        os << "definitely not a channel dump";
    }
    CHECK_THROWS_AS(load_channels(path), std::runtime_error);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_channels(path), std::runtime_error); // missing file
}

TEST_CASE("format_double is shortest round-trip")
{
    CHECK(format_double(4.5) == "4.5");
    CHECK(format_double(0.0) == "0");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
