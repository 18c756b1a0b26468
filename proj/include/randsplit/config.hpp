#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "randsplit/harness.hpp"

namespace randsplit {

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// JSON document mirroring ExperimentConfig; absent fields keep their
/// defaults, unknown fields are rejected. Throws ConfigError.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);

/// Desk-scale default: linear problem, uniform_single on 3x1 subdomains,
/// h = 2^-5 .. 2^-8, 20 realizations.
ExperimentConfig default_config();

/// CSV with header strategy,param,h,rel_error,std_err,reps,seconds.
void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const ErrorRecord& rec);
void write_csv(std::ostream& out, const std::vector<ErrorRecord>& records);
/// Two columns "h rel_error", one line per record.
void write_gnuplot(std::ostream& out, const std::vector<ErrorRecord>& records);

}  // namespace randsplit
