#pragma once

// Config documents and CSV result tables.
//
// Config is a flat INI-style text:
//
//   # comment
//   [measured]
//   producer_throughput_per_partition = 10 MB/s
//   leader_election_time = 5 ms
//   [requirements]
//   consumers = 100
//   [sweep]
//   axis = consumers
//   axis_values = 100, 500, 1000
//
// Keys are the field names of MeasuredInputs, Requirements and SweepSpec.
// Rates may carry the suffix "MB/s" and durations "ms"; any other unit is
// rejected rather than converted.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kpp/experiments.hpp"
#include "kpp/model.hpp"

namespace kpp {

/// Malformed document. what() starts with "line N:" when a line is at fault.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, const std::string& msg);
  explicit ConfigError(const std::string& msg);

  std::size_t line() const { return line_; }

 private:
  std::size_t line_ = 0;
};

struct LoadedConfig {
  Requirements requirements;
  MeasuredInputs measured;
  std::optional<SweepSpec> sweep;
  // One entry per field that fell back to its default.
  std::vector<std::string> notices;
};

/// Parses and validates. Absent fields take their value from the defaults
/// passed in. Throws ConfigError or ValidationError.
LoadedConfig load_config(std::string_view text, const Requirements& req_defaults = {},
                         const MeasuredInputs& meas_defaults = {});

/// Reads `path` and calls load_config. Throws ConfigError if unreadable.
LoadedConfig load_config_file(const std::string& path, const Requirements& req_defaults = {},
                              const MeasuredInputs& meas_defaults = {});

/// Inverse of load_config: every field written, doubles in shortest
/// round-trip form.
std::string save_config(const Requirements& req, const MeasuredInputs& meas,
                        const std::optional<SweepSpec>& sweep = std::nullopt);

inline constexpr std::string_view kCsvHeader =
    "axis,axis_value,method,feasible,partitions,brokers,latency_ms,unavailability_ms,"
    "handles_per_broker,partitions_per_broker,latency_violation_rate,"
    "unavail_violation_rate,os_violation_rate";

/// Six significant digits, '.' decimal point, independent of locale.
std::string format_real(double v);

std::string write_csv(const SweepResult& result);

/// One parsed CSV line; empty cells are nullopt.
struct CsvRecord {
  std::string axis;
  Count axis_value = 0;
  std::string method;
  bool feasible = false;
  std::optional<double> partitions;
  std::optional<double> brokers;
  std::optional<double> latency_ms;
  std::optional<double> unavailability_ms;
  std::optional<double> handles_per_broker;
  std::optional<double> partitions_per_broker;
  std::optional<double> latency_violation_rate;
  std::optional<double> unavail_violation_rate;
  std::optional<double> os_violation_rate;
};

/// Parses text produced by write_csv. Throws ConfigError on malformed input.
std::vector<CsvRecord> read_csv(std::string_view text);

}  // namespace kpp
