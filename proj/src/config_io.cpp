#include "masim/config_io.hpp"

#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace masim
{

namespace
{

std::string trim(const std::string &s)
{
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string &key, const std::string &value)
{
    try
    {
        std::size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size())
            throw std::invalid_argument("");
        return v;
    }
    catch (...)
    {
        throw std::invalid_argument("config: key '" + key + "' expects a number, got '" + value +
                                    "'");
    }
}

int to_int(const std::string &key, const std::string &value)
{
    double v = to_double(key, value);
    int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
        throw std::invalid_argument("config: key '" + key + "' expects an integer, got '" + value +
                                    "'");
    return i;
}

std::uint64_t to_u64(const std::string &key, const std::string &value)
{
    try
    {
        std::size_t pos = 0;
        unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size())
            throw std::invalid_argument("");
        return v;
    }
    catch (...)
    {
        throw std::invalid_argument("config: key '" + key +
                                    "' expects an unsigned integer, got '" + value + "'");
    }
}

bool to_bool(const std::string &key, const std::string &value)
{
    if (value == "true" || value == "1" || value == "yes" || value == "on")
        return true;
    if (value == "false" || value == "0" || value == "no" || value == "off")
        return false;
    throw std::invalid_argument("config: key '" + key + "' expects a boolean, got '" + value +
                                "'");
}

} // namespace

std::vector<double> parse_double_list(const std::string &text)
{
    std::vector<double> out;
    std::string token;
    for (char c : text + ",")
    {
        if (c == ',')
        {
            token = trim(token);
            if (!token.empty())
                out.push_back(to_double("list", token));
            token.clear();
        }
        else
        {
            token += c;
        }
    }
    return out;
}

std::vector<std::string> parse_string_list(const std::string &text)
{
    std::vector<std::string> out;
    std::string token;
    for (char c : text + ",")
    {
        if (c == ',')
        {
            token = trim(token);
            if (!token.empty())
                out.push_back(token);
            token.clear();
        }
        else
        {
            token += c;
        }
    }
    return out;
}

void apply_config_entry(SweepSpec &spec, const std::string &key, const std::string &value)
{
    if (key == "freq_ghz")
        spec.system.freq_ghz = to_double(key, value);
    else if (key == "m_t")
        spec.system.m_t = to_int(key, value);
    else if (key == "u")
        spec.system.u = to_int(key, value);
    else if (key == "k_users")
        spec.system.k_users = to_int(key, value);
    else if (key == "n_r")
        spec.system.n_r = to_int(key, value);
    else if (key == "n_s")
        spec.system.n_s = to_int(key, value);
    else if (key == "l_s")
        spec.system.l_s = to_double(key, value);
    else if (key == "d_min")
        spec.system.d_min = to_double(key, value);
    else if (key == "h_t")
        spec.system.h_t = to_double(key, value);
    else if (key == "p_max")
        spec.system.p_max = to_double(key, value);
    else if (key == "region_len")
        spec.region_len = to_double(key, value);
    else if (key == "snr_db")
        spec.snr_db = to_double(key, value);
    else if (key == "n_cl")
        spec.channel.n_cl = to_int(key, value);
    else if (key == "n_ray")
        spec.channel.n_ray = to_int(key, value);
    else if (key == "spread_deg")
        spec.channel.spread = to_double(key, value) * kPi / 180.0;
    else if (key == "per_user_departures")
        spec.channel.per_user_departures = to_bool(key, value);
    else if (key == "trials")
        spec.trials = to_int(key, value);
    else if (key == "seed")
        spec.master_seed = to_u64(key, value);
    else if (key == "schemes")
        spec.schemes = parse_string_list(value);
    else if (key == "jobs")
        spec.jobs = to_int(key, value);
    else if (key == "sic_max_rounds")
        spec.run.sic_max_rounds = to_int(key, value);
    else if (key == "sic_tol")
        spec.run.sic_tol = to_double(key, value);
    else if (key == "outer_max_rounds")
        spec.run.outer_max_rounds = to_int(key, value);
    else if (key == "outer_tol")
        spec.run.outer_tol = to_double(key, value);
    else if (key == "nm_iters")
        spec.run.position.nm_iters = to_int(key, value);
    else if (key == "nm_ftol")
        spec.run.position.nm_ftol = to_double(key, value);
    else if (key == "simplex_leg")
        spec.run.position.simplex_leg = to_double(key, value);
    else if (key == "random_order")
        spec.run.position.random_order = to_bool(key, value);
    else if (key == "grid_snap")
        spec.run.position.grid_snap = to_bool(key, value);
    else if (key == "grid_points")
        spec.run.position.grid_points = to_int(key, value);
    else
        throw std::invalid_argument("config: unknown key '" + key + "'");
}

void apply_config_file(SweepSpec &spec, const std::string &path)
{
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("config: cannot open '" + path + "'");

    std::string line;
    int lineno = 0;
    while (std::getline(is, line))
    {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: " + path + ":" + std::to_string(lineno) +
                                     ": expected 'key = value'");
        try
        {
            apply_config_entry(spec, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
        catch (const std::invalid_argument &e)
        {
            throw std::runtime_error("config: " + path + ":" + std::to_string(lineno) + ": " +
                                     e.what());
        }
    }
}

SweepSpec load_spec(const std::string &profile_path)
{
    SweepSpec spec;
    std::string path = profile_path;
    if (path.empty())
    {
        const char *env = std::getenv("MASIM_CONFIG");
        if (env != nullptr && env[0] != '\0')
            path = env;
    }
    if (!path.empty())
        apply_config_file(spec, path);
    return spec;
}

} // namespace masim
