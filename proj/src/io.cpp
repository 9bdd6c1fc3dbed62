#include "kpp/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <variant>

namespace kpp {

ConfigError::ConfigError(std::size_t line, const std::string& msg)
    : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}

ConfigError::ConfigError(const std::string& msg) : std::runtime_error(msg) {}

namespace {

enum class Unit { kNone, kRate, kDuration };

std::string_view unit_suffix(Unit u) {
  switch (u) {
    case Unit::kRate: return "MB/s";
    case Unit::kDuration: return "ms";
    case Unit::kNone: return "";
  }
  return "";
}

template <class S>
struct FieldSpec {
  std::string_view key;
  std::variant<double S::*, Count S::*> member;
  Unit unit;
};

const std::array<FieldSpec<MeasuredInputs>, 5> kMeasuredFields{{
    {"producer_throughput_per_partition", &MeasuredInputs::producer_throughput_per_partition,
     Unit::kRate},
    {"consumer_throughput_per_partition", &MeasuredInputs::consumer_throughput_per_partition,
     Unit::kRate},
    {"max_open_file_handles", &MeasuredInputs::max_open_file_handles, Unit::kNone},
    {"replication_latency_per_partition", &MeasuredInputs::replication_latency_per_partition,
     Unit::kDuration},
    {"leader_election_time", &MeasuredInputs::leader_election_time, Unit::kDuration},
}};

const std::array<FieldSpec<Requirements>, 6> kRequirementFields{{
    {"target_throughput", &Requirements::target_throughput, Unit::kRate},
    {"consumers", &Requirements::consumers, Unit::kNone},
    {"replication_factor", &Requirements::replication_factor, Unit::kNone},
    {"max_replication_latency", &Requirements::max_replication_latency, Unit::kDuration},
    {"max_unavailability", &Requirements::max_unavailability, Unit::kDuration},
    {"available_brokers", &Requirements::available_brokers, Unit::kNone},
}};

constexpr std::array<std::string_view, 6> kSweepKeys{
    "axis", "axis_values", "methods", "mscnfl_trials", "master_seed",
    "confluent_includes_replicas"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

struct Entry {
  std::size_t line;
  std::string value;
};

using Section = std::map<std::string, Entry, std::less<>>;

double parse_real(const std::string& key, const Entry& e, Unit unit) {
  const std::string_view text = e.value;
  double v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr == text.data())
    throw ConfigError(e.line, key + ": expected a number, got '" + e.value + "'");
  const std::string_view rest = trim(text.substr(ptr - text.data()));
  if (!rest.empty() && rest != unit_suffix(unit)) {
    throw ConfigError(e.line, key + ": unit '" + std::string(rest) + "' not accepted; " +
                                  (unit == Unit::kNone ? std::string("expected a plain number")
                                                       : "expected " +
                                                             std::string(unit_suffix(unit))));
  }
  return v;
}

template <class Int>
Int parse_integer(const std::string& key, std::size_t line, std::string_view text) {
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw ConfigError(line, key + ": expected an integer, got '" + std::string(text) + "'");
  return v;
}

template <class S, std::size_t N>
void apply_fields(S& target, const std::array<FieldSpec<S>, N>& fields, const Section& section,
                  std::string_view section_name, std::vector<std::string>& notices) {
  for (const auto& f : fields) {
    const std::string key(f.key);
    const auto it = section.find(key);
    if (it == section.end()) {
      std::visit(
          [&](auto member) {
            std::ostringstream os;
            os << section_name << '.' << key << " not set; using default " << target.*member;
            notices.push_back(os.str());
          },
          f.member);
      continue;
    }
    std::visit(
        [&](auto member) {
          using T = std::remove_reference_t<decltype(target.*member)>;
          if constexpr (std::is_same_v<T, double>) {
            target.*member = parse_real(key, it->second, f.unit);
          } else {
            target.*member = parse_integer<Count>(key, it->second.line, it->second.value);
          }
        },
        f.member);
  }
}

template <class S, std::size_t N>
bool known_key(const std::array<FieldSpec<S>, N>& fields, std::string_view key) {
  for (const auto& f : fields) {
    if (f.key == key) return true;
  }
  return false;
}

SweepSpec parse_sweep(const Section& s, const Requirements& req, const MeasuredInputs& meas) {
  SweepSpec spec;
  spec.base_requirements = req;
  spec.base_measured = meas;

  const auto axis_it = s.find("axis");
  if (axis_it == s.end()) throw ConfigError("[sweep]: missing key 'axis'");
  const auto axis = parse_axis(axis_it->second.value);
  if (!axis)
    throw ConfigError(axis_it->second.line,
                      "axis: expected consumers, brokers or replication, got '" +
                          axis_it->second.value + "'");
  spec.axis = *axis;

  const auto values_it = s.find("axis_values");
  if (values_it == s.end()) throw ConfigError("[sweep]: missing key 'axis_values'");
  for (auto part : split(values_it->second.value, ',')) {
    spec.axis_values.push_back(parse_integer<Count>("axis_values", values_it->second.line, part));
  }

  if (const auto it = s.find("methods"); it != s.end()) {
    spec.methods.clear();
    for (auto part : split(it->second.value, ',')) {
      const auto m = parse_method(part);
      if (!m) throw ConfigError(it->second.line, "methods: unknown method '" + std::string(part) + "'");
      spec.methods.push_back(*m);
    }
  }
  if (const auto it = s.find("mscnfl_trials"); it != s.end())
    spec.mscnfl_trials = parse_integer<Count>("mscnfl_trials", it->second.line, it->second.value);
  if (const auto it = s.find("master_seed"); it != s.end())
    spec.master_seed =
        parse_integer<std::uint64_t>("master_seed", it->second.line, it->second.value);
  if (const auto it = s.find("confluent_includes_replicas"); it != s.end()) {
    if (it->second.value == "true") {
      spec.mscnfl.confluent_includes_replicas = true;
    } else if (it->second.value != "false") {
      throw ConfigError(it->second.line, "confluent_includes_replicas: expected true or false");
    }
  }
  return spec;
}

std::string shortest(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

template <class S, std::size_t N>
void save_fields(std::ostringstream& os, const S& value,
                 const std::array<FieldSpec<S>, N>& fields) {
  for (const auto& f : fields) {
    std::visit(
        [&](auto member) {
          using T = std::remove_cvref_t<decltype(value.*member)>;
          os << f.key << " = ";
          if constexpr (std::is_same_v<T, double>) {
            os << shortest(value.*member);
          } else {
            os << value.*member;
          }
          if (f.unit != Unit::kNone) os << ' ' << unit_suffix(f.unit);
          os << '\n';
        },
        f.member);
  }
}

}  // namespace

LoadedConfig load_config(std::string_view text, const Requirements& req_defaults,
                         const MeasuredInputs& meas_defaults) {
  std::map<std::string, Section, std::less<>> sections{
      {"measured", {}}, {"requirements", {}}};
  std::set<std::string, std::less<>> present;
  Section* current = nullptr;
  std::string current_name;

  std::size_t line_no = 0;
  for (std::string_view raw : split(text, '\n')) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "unterminated section header");
      const std::string name(trim(line.substr(1, line.size() - 2)));
      if (name != "measured" && name != "requirements" && name != "sweep")
        throw ConfigError(line_no, "unknown section [" + name + "]");
      if (!present.insert(name).second)
        throw ConfigError(line_no, "duplicate section [" + name + "]");
      current = &sections[name];
      current_name = name;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
    if (current == nullptr) throw ConfigError(line_no, "key outside of any section");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));

    const bool known =
        (current_name == "measured" && known_key(kMeasuredFields, key)) ||
        (current_name == "requirements" && known_key(kRequirementFields, key)) ||
        (current_name == "sweep" &&
         std::find(kSweepKeys.begin(), kSweepKeys.end(), key) != kSweepKeys.end());
    if (!known) throw ConfigError(line_no, "unknown key '" + key + "' in [" + current_name + "]");
    if (value.empty()) throw ConfigError(line_no, key + ": missing value");
    if (!current->emplace(key, Entry{line_no, value}).second)
      throw ConfigError(line_no, "duplicate key '" + key + "'");
  }

  LoadedConfig cfg;
  cfg.requirements = req_defaults;
  cfg.measured = meas_defaults;
  apply_fields(cfg.measured, kMeasuredFields, sections["measured"], "measured", cfg.notices);
  apply_fields(cfg.requirements, kRequirementFields, sections["requirements"], "requirements",
               cfg.notices);
  validate(cfg.measured);
  validate(cfg.requirements);
  if (present.contains("sweep")) {
    cfg.sweep = parse_sweep(sections["sweep"], cfg.requirements, cfg.measured);
    validate(*cfg.sweep);
  }
  return cfg;
}

LoadedConfig load_config_file(const std::string& path, const Requirements& req_defaults,
                              const MeasuredInputs& meas_defaults) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_config(buf.str(), req_defaults, meas_defaults);
}

std::string save_config(const Requirements& req, const MeasuredInputs& meas,
                        const std::optional<SweepSpec>& sweep) {
  std::ostringstream os;
  os << "[measured]\n";
  save_fields(os, meas, kMeasuredFields);
  os << "\n[requirements]\n";
  save_fields(os, req, kRequirementFields);
  if (sweep) {
    os << "\n[sweep]\n";
    os << "axis = " << axis_name(sweep->axis) << '\n';
    os << "axis_values = ";
    for (std::size_t i = 0; i < sweep->axis_values.size(); ++i)
      os << (i ? ", " : "") << sweep->axis_values[i];
    os << "\nmethods = ";
    for (std::size_t i = 0; i < sweep->methods.size(); ++i)
      os << (i ? ", " : "") << method_name(sweep->methods[i]);
    os << "\nmscnfl_trials = " << sweep->mscnfl_trials << '\n';
    os << "master_seed = " << sweep->master_seed << '\n';
    os << "confluent_includes_replicas = "
       << (sweep->mscnfl.confluent_includes_replicas ? "true" : "false") << '\n';
  }
  return os.str();
}

std::string format_real(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 6);
  return std::string(buf.data(), ptr);
}

std::string write_csv(const SweepResult& result) {
  std::string out(kCsvHeader);
  out += '\n';
  const auto rate = [](bool passed) { return passed ? std::string("0") : std::string("1"); };

  for (const SweepRow& row : result.rows) {
    out += axis_name(row.axis);
    out += ',' + std::to_string(row.axis_value) + ',';
    out += method_name(row.method);
    out += row.feasible() ? ",true," : ",false,";
    if (row.plan && row.metrics) {
      const PlanMetrics& m = *row.metrics;
      out += std::to_string(row.plan->partitions) + ',' + std::to_string(row.plan->brokers) + ',' +
             format_real(m.replication_latency) + ',' + format_real(m.unavailability) + ',' +
             format_real(m.handles_per_broker) + ',' + format_real(m.partitions_per_broker) + ',' +
             rate(m.pass.latency) + ',' + rate(m.pass.unavailability) + ',' +
             rate(m.pass.os_load);
    } else if (row.mscnfl) {
      const MsCnflAggregate& a = *row.mscnfl;
      out += format_real(a.mean_partitions) + ',' + format_real(a.mean_brokers) + ',' +
             format_real(a.mean_replication_latency) + ',' + format_real(a.mean_unavailability) +
             ',' + format_real(a.mean_handles_per_broker) + ',' +
             format_real(a.mean_partitions_per_broker) + ',' +
             format_real(a.latency_violation_rate) + ',' +
             format_real(a.unavailability_violation_rate) + ',' + format_real(a.os_violation_rate);
    } else {
      out += ",,,,,,,,";
    }
    out += '\n';
  }
  return out;
}

std::vector<CsvRecord> read_csv(std::string_view text) {
  std::vector<CsvRecord> records;
  auto lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines.front() != kCsvHeader) throw ConfigError(1, "missing CSV header");

  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto cells = split(lines[i], ',');
    if (cells.size() != 13) throw ConfigError(line_no, "expected 13 cells");
    CsvRecord rec;
    rec.axis = std::string(cells[0]);
    rec.axis_value = parse_integer<Count>("axis_value", line_no, cells[1]);
    rec.method = std::string(cells[2]);
    if (cells[3] != "true" && cells[3] != "false") throw ConfigError(line_no, "feasible: expected true/false");
    rec.feasible = cells[3] == "true";

    std::optional<double>* numeric[] = {
        &rec.partitions,         &rec.brokers,
        &rec.latency_ms,         &rec.unavailability_ms,
        &rec.handles_per_broker, &rec.partitions_per_broker,
        &rec.latency_violation_rate, &rec.unavail_violation_rate,
        &rec.os_violation_rate};
    for (std::size_t c = 0; c < 9; ++c) {
      const std::string_view cell = cells[4 + c];
      if (cell.empty()) continue;
      *numeric[c] = parse_real("cell", Entry{line_no, std::string(cell)}, Unit::kNone);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace kpp
