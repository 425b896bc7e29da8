#ifndef MASIM_CONFIG_IO_HPP
#define MASIM_CONFIG_IO_HPP

#include "masim/sweep.hpp"

#include <string>
#include <vector>

namespace masim
{

// Flat key = value configuration files; '#' starts a comment, blank lines
// are ignored. Unknown keys are an error (typo protection).
void apply_config_file(SweepSpec &spec, const std::string &path);

// Applies one key/value pair; shared by the file parser and CLI overrides.
void apply_config_entry(SweepSpec &spec, const std::string &key, const std::string &value);

// Spec with built-in defaults, optionally overlaid with the file named by
// the MASIM_CONFIG environment variable (when set) or an explicit path.
SweepSpec load_spec(const std::string &profile_path = "");

std::vector<double> parse_double_list(const std::string &text);
std::vector<std::string> parse_string_list(const std::string &text);

} // namespace masim

#endif
