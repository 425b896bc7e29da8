#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "masim/bd_precoder.hpp"
#include "masim/config_io.hpp"
#include "masim/optimizer_driver.hpp"
#include "masim/position_search.hpp"
#include "masim/sic_analog.hpp"
#include "masim/sweep.hpp"

namespace py = pybind11;
using namespace masim;

namespace
{

py::list positions_to_py(const SubarrayLayout &layout)
{
    py::list out;
    for (const Position &p : layout.positions)
        out.append(py::make_tuple(p.x, p.z));
    return out;
}

py::list rects_to_py(const std::vector<Rect> &rects)
{
    py::list out;
    for (const Rect &r : rects)
        out.append(py::make_tuple(r.x_lo, r.z_lo, r.x_hi, r.z_hi));
    return out;
}

py::dict record_to_py(const TrialRecord &rec)
{
    py::dict d;
    d["seed"] = rec.seed;
    d["scheme"] = rec.scheme;
    d["initial_objective"] = rec.initial_objective;
    d["outer_trace"] = rec.outer_trace;
    d["outer_iterations"] = rec.outer_iterations;
    d["rate_bd"] = rec.rate_bd;
    d["rate_simplified"] = rec.rate_simplified;
    d["per_user_rates"] = std::vector<double>(
        rec.report.per_user.data(), rec.report.per_user.data() + rec.report.per_user.size());
    d["max_rel_leakage"] = rec.report.max_rel_leakage;
    d["nonmonotone_steps"] = rec.nonmonotone_steps;
    d["chain_updates"] = rec.chain_updates;
    d["wall_time_s"] = rec.wall_time_s;
    d["positions"] = positions_to_py(rec.final_layout);
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Movable-subarray hybrid beamforming MU-MIMO simulator core";
    m.attr("__version__") = kVersion;
    m.attr("SPEED_OF_LIGHT") = kSpeedOfLight;

    py::class_<ArrayConfig>(m, "ArrayConfig")
        .def(py::init<>())
        .def_readwrite("m_t", &ArrayConfig::m_t)
        .def_readwrite("u", &ArrayConfig::u)
        .def_readwrite("n_r", &ArrayConfig::n_r)
        .def_readwrite("lam", &ArrayConfig::lambda)
        .def_readwrite("d_x", &ArrayConfig::d_x)
        .def_readwrite("d_z", &ArrayConfig::d_z)
        .def_readwrite("l_s", &ArrayConfig::l_s)
        .def_readwrite("h_t", &ArrayConfig::h_t)
        .def_readwrite("region_len", &ArrayConfig::region_len)
        .def_readwrite("d_min", &ArrayConfig::d_min)
        .def("n", &ArrayConfig::n)
        .def("elems_per_sub", &ArrayConfig::elems_per_sub)
        .def("nominal_spacing", &ArrayConfig::nominal_spacing)
        .def("validate", &ArrayConfig::validate);

    py::class_<SubarrayLayout>(m, "SubarrayLayout")
        .def(py::init<>())
        .def_property(
            "positions", [](const SubarrayLayout &l) { return positions_to_py(l); },
            [](SubarrayLayout &l, const std::vector<std::pair<double, double>> &ps) {
                l.positions.clear();
                for (auto &[x, z] : ps)
                    l.positions.push_back({x, z});
            })
        .def_property_readonly(
            "subregions", [](const SubarrayLayout &l) { return rects_to_py(l.subregions); });

    py::class_<ChannelProfile>(m, "ChannelProfile")
        .def(py::init<>())
        .def_readwrite("n_cl", &ChannelProfile::n_cl)
        .def_readwrite("n_ray", &ChannelProfile::n_ray)
        .def_readwrite("spread", &ChannelProfile::spread)
        .def_readwrite("per_user_departures", &ChannelProfile::per_user_departures);

    py::class_<PathSet>(m, "PathSet")
        .def_readonly("gain", &PathSet::gain)
        .def_readonly("dep_theta", &PathSet::dep_theta)
        .def_readonly("dep_phi", &PathSet::dep_phi)
        .def_readonly("arr_theta", &PathSet::arr_theta)
        .def_readonly("arr_phi", &PathSet::arr_phi);

    py::class_<ChannelSet>(m, "ChannelSet")
        .def_readonly("per_user", &ChannelSet::per_user)
        .def_readonly("stacked", &ChannelSet::stacked)
        .def_readonly("sigma2", &ChannelSet::sigma2);

    py::class_<SystemProfile>(m, "SystemProfile")
        .def(py::init<>())
        .def_readwrite("k_users", &SystemProfile::k_users)
        .def_readwrite("n_r", &SystemProfile::n_r)
        .def_readwrite("n_s", &SystemProfile::n_s)
        .def_readwrite("u", &SystemProfile::u)
        .def_readwrite("m_t", &SystemProfile::m_t)
        .def_readwrite("freq_ghz", &SystemProfile::freq_ghz)
        .def_readwrite("l_s", &SystemProfile::l_s)
        .def_readwrite("d_min", &SystemProfile::d_min)
        .def_readwrite("h_t", &SystemProfile::h_t)
        .def_readwrite("p_max", &SystemProfile::p_max);

    // Geometry
    m.def("wave_vector", &wave_vector, py::arg("theta"), py::arg("phi"));
    m.def("elem_response", &elem_response, py::arg("theta"), py::arg("phi"), py::arg("cfg"));
    m.def("sub_response", &sub_response, py::arg("theta"), py::arg("phi"), py::arg("layout"),
          py::arg("cfg"));
    m.def("tx_response", &tx_response, py::arg("theta"), py::arg("phi"), py::arg("layout"),
          py::arg("cfg"));
    m.def("rx_response", &rx_response, py::arg("theta"), py::arg("phi"), py::arg("cfg"));
    m.def("initial_layout", &initial_layout, py::arg("cfg"));
    m.def("partition_regions", [](const ArrayConfig &cfg) { return rects_to_py(partition_regions(cfg)); },
          py::arg("cfg"));
    m.def("assign_subregions", &assign_subregions, py::arg("layout"), py::arg("cfg"));
    m.def("validate_spacing", &validate_spacing, py::arg("layout"), py::arg("d_min"));
    m.def("to_array_config", &to_array_config, py::arg("system"), py::arg("region_len"));

    // Channel
    m.def("draw_paths", &draw_paths, py::arg("seed"), py::arg("k_users"), py::arg("profile"));
    m.def("assemble_channel", &assemble_channel, py::arg("paths"), py::arg("layout"),
          py::arg("cfg"));
    m.def("build_channel_set", &build_channel_set, py::arg("paths"), py::arg("layout"),
          py::arg("cfg"), py::arg("sigma2"));
    m.def("rebuild_on_move", &rebuild_on_move, py::arg("paths"), py::arg("new_layout"),
          py::arg("cfg"), py::arg("sigma2"));

    // Precoding and rates
    m.def("check_bd_feasible", &check_bd_feasible, py::arg("k_users"), py::arg("n_r"),
          py::arg("n_s"), py::arg("c_t"));
    m.def("initial_analog", &initial_analog, py::arg("paths"), py::arg("layout"), py::arg("cfg"));
    m.def("sum_rate_simplified",
          [](const ChannelSet &ch, const std::vector<Eigen::VectorXcd> &analog) {
              return sum_rate_simplified(ch, analog);
          },
          py::arg("channels"), py::arg("analog"));
    m.def("bd_rates",
          [](const ChannelSet &channels, const std::vector<Eigen::VectorXcd> &analog, int n_s,
             double p_max) {
              HybridPrecoder precoder;
              precoder.analog = analog;
              precoder.p_max = p_max;
              bd_digital(channels, precoder, n_s);
              RateReport report = sum_rate_full(channels, precoder);
              py::dict d;
              d["sum"] = report.sum;
              d["per_user"] = std::vector<double>(
                  report.per_user.data(), report.per_user.data() + report.per_user.size());
              d["max_rel_leakage"] = report.max_rel_leakage;
              return d;
          },
          py::arg("channels"), py::arg("analog"), py::arg("n_s"), py::arg("p_max") = 1.0,
          "BD-SVD digital precoding on a fixed analog precoder; returns the "
          "resulting rates and leakage diagnostics");
    m.def("sic_sweep",
          [](const ChannelSet &channels, std::vector<Eigen::VectorXcd> analog, bool constrained,
             int max_rounds, double tol) {
              SicTrace trace = sic_sweep(channels, analog,
                                         constrained ? AnalogMode::constrained
                                                     : AnalogMode::unconstrained,
                                         max_rounds, tol);
              return py::make_tuple(analog, trace.objective, trace.nonmonotone_rounds);
          },
          py::arg("channels"), py::arg("analog"), py::arg("constrained") = true,
          py::arg("max_rounds") = 20, py::arg("tol") = 1e-4,
          "Returns (updated analog blocks, objective trace, nonmonotone round count)");

    // Driver
    m.def("run_trial",
          [](const std::string &scheme, const SystemProfile &system,
             const ChannelProfile &channel, double snr_db, double region_len, std::uint64_t seed) {
              ArrayConfig cfg = to_array_config(system, region_len);
              RunParams params;
              params.n_s = system.n_s;
              params.p_max = system.p_max;
              std::vector<PathSet> paths = draw_paths(seed, system.k_users, channel);
              TrialRecord rec = run_scheme(scheme_from_tag(scheme), paths, cfg, params,
                                           sigma2_from_snr_db(snr_db), seed);
              return record_to_py(rec);
          },
          py::arg("scheme"), py::arg("system") = SystemProfile{},
          py::arg("channel") = ChannelProfile{}, py::arg("snr_db") = 0.0,
          py::arg("region_len") = 12.0, py::arg("seed") = 1,
          "One optimization trial; returns rates, traces and the final layout");
    m.def("scheme_tags", []() {
        std::vector<std::string> tags;
        for (const Scheme &s : all_schemes())
            tags.push_back(s.tag);
        return tags;
    });
    m.def("trial_seed", &trial_seed, py::arg("master_seed"), py::arg("trial"));
    m.def("sigma2_from_snr_db", &sigma2_from_snr_db, py::arg("snr_db"));
}
