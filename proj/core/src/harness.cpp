#include "sketchrec/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "sketchrec/stream.hpp"

namespace sketchrec {

namespace detail {
void add_builtin_experiments(std::vector<Experiment>& registry);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ConfigError("malformed value for '" + key + "': '" + text + "'");
  return v;
}

std::vector<Experiment>& registry() {
  static std::vector<Experiment> r = [] {
    std::vector<Experiment> v;
    detail::add_builtin_experiments(v);
    return v;
  }();
  return r;
}

}  // namespace

std::string ExperimentConfig::get(const std::string& key, const std::string& fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : parse_number<double>(key, it->second);
}

std::size_t ExperimentConfig::get_size(const std::string& key, std::size_t fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : parse_number<std::size_t>(key, it->second);
}

std::uint64_t ExperimentConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : parse_number<std::uint64_t>(key, it->second);
}

bool ExperimentConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  if (it->second == "1" || it->second == "true") return true;
  if (it->second == "0" || it->second == "false") return false;
  throw ConfigError("malformed boolean for '" + key + "': '" + it->second + "'");
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key.empty()) throw ConfigError("empty config key");
  if (key == "algorithm") algorithm = value;
  else if (key == "trials") trials = parse_number<std::size_t>(key, value);
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
  else if (key == "dist") dist = value;
  else if (key == "out") out = value;
  else if (key == "min_success") min_success = parse_number<double>(key, value);
  else params[key] = value;
}

std::string ExperimentConfig::to_text() const {
  std::map<std::string, std::string> all = params;
  all["algorithm"] = algorithm;
  all["trials"] = std::to_string(trials);
  all["seed"] = std::to_string(seed);
  if (!dist.empty()) all["dist"] = dist;
  if (min_success >= 0) all["min_success"] = format_double(min_success);
  std::string s;
  for (const auto& [k, v] : all) s += k + "=" + v + "\n";
  return s;
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(number) + ": expected key=value");
    c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

void register_experiment(Experiment e) {
  auto& r = registry();
  auto it = std::find_if(r.begin(), r.end(), [&](const Experiment& x) { return x.id == e.id; });
  if (it != r.end()) *it = std::move(e);
  else r.push_back(std::move(e));
}

const Experiment* find_experiment(const std::string& id) {
  for (const auto& e : registry()) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

std::vector<std::string> experiment_ids() {
  std::vector<std::string> ids;
  for (const auto& e : registry()) ids.push_back(e.id);
  return ids;
}

double TrialReport::extra(const std::string& name) const {
  for (const auto& [k, v] : extras) {
    if (k == name) return v;
  }
  throw std::out_of_range("trial report has no field '" + name + "'");
}

bool AggregateReport::threshold_met() const {
  if (trials.empty()) return true;
  return success_rate() >= min_success;
}

AggregateReport run(const ExperimentConfig& config) {
  const Experiment* e = find_experiment(config.algorithm);
  if (e == nullptr) throw ConfigError("unknown algorithm '" + config.algorithm + "'");
  AggregateReport rep;
  rep.config = config;
  PreparedExperiment prepared = e->prepare(config);
  rep.notes = std::move(prepared.notes);
  rep.min_success = config.min_success >= 0 ? config.min_success : prepared.default_min_success;
  using clock = std::chrono::steady_clock;
  for (std::size_t t = 0; t < config.trials; ++t) {
    const std::uint64_t s = trial_seed(config.seed, t);
    const auto start = clock::now();
    TrialReport tr = prepared.trial(s);
    tr.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
    tr.trial = t;
    tr.seed = s;
    rep.successes += tr.success;
    rep.total_ms += tr.wall_ms;
    rep.trials.push_back(std::move(tr));
  }
  rep.success_ci = wilson_interval(rep.successes, rep.trials.size(), kZ95TwoSided);
  return rep;
}

void write_csv(std::ostream& out, const AggregateReport& report) {
  std::istringstream cfg(report.config.to_text());
  std::string line;
  while (std::getline(cfg, line)) out << "# " << line << '\n';
  for (const auto& n : report.notes) out << "# " << n << '\n';
  out << "# successes=" << report.successes << '/' << report.trials.size()
      << " wilson95=[" << format_double(report.success_ci.lo) << ',' << format_double(report.success_ci.hi) << "]"
      << " min_success=" << format_double(report.min_success) << '\n';
  out << "trial,seed,success,metric,bound,measurements,rounds";
  if (!report.trials.empty()) {
    for (const auto& [k, v] : report.trials.front().extras) out << ',' << k;
  }
  out << '\n';
  for (const auto& t : report.trials) {
    out << t.trial << ',' << t.seed << ',' << (t.success ? 1 : 0) << ',' << format_double(t.metric) << ','
        << format_double(t.bound) << ',' << t.measurements << ',' << t.rounds;
    for (const auto& [k, v] : t.extras) out << ',' << format_double(v);
    out << '\n';
  }
}

std::string summary_line(const AggregateReport& report) {
  std::ostringstream s;
  s << report.config.algorithm << ": " << report.successes << '/' << report.trials.size() << " succeeded";
  if (!report.trials.empty()) {
    std::size_t max_meas = 0;
    for (const auto& t : report.trials) max_meas = std::max(max_meas, t.measurements);
    s << " rate=" << format_double(report.success_rate()) << " wilson95=[" << format_double(report.success_ci.lo)
      << ", " << format_double(report.success_ci.hi) << "] max_measurements=" << max_meas;
  }
  s << " threshold=" << format_double(report.min_success) << (report.threshold_met() ? " met" : " missed");
  s << " wall=" << static_cast<long long>(report.total_ms) << "ms";
  return s.str();
}

std::vector<SweepPoint> run_sweep(const ExperimentConfig& base, const std::string& key,
                                  const std::vector<std::string>& values) {
  std::vector<SweepPoint> out;
  for (const auto& v : values) {
    ExperimentConfig c = base;
    c.set(key, v);
    out.push_back({v, run(c)});
  }
  return out;
}

void write_gnuplot_table(std::ostream& out, const std::string& key, const std::vector<SweepPoint>& sweep) {
  out << "# " << key << " trials successes rate wilson_lo wilson_hi mean_metric mean_measurements\n";
  for (const auto& p : sweep) {
    const auto& r = p.report;
    double metric = 0, meas = 0;
    for (const auto& t : r.trials) {
      metric += t.metric;
      meas += static_cast<double>(t.measurements);
    }
    const double m = r.trials.empty() ? 1.0 : static_cast<double>(r.trials.size());
    out << p.value << ' ' << r.trials.size() << ' ' << r.successes << ' ' << format_double(r.success_rate()) << ' '
        << format_double(r.success_ci.lo) << ' ' << format_double(r.success_ci.hi) << ' '
        << format_double(metric / m) << ' ' << format_double(meas / m) << '\n';
  }
}

}  // namespace sketchrec
