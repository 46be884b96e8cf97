// Experiment driver: one subcommand per algorithm, flags map onto config keys.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "sketchrec/harness.hpp"

namespace {

using sketchrec::ExperimentConfig;

struct Flags {
  std::map<std::string, std::string> values;  // flag name -> text, only when given
  std::vector<std::string> sets;              // --set key=value
  std::string config;
  std::string sweep;
};

void add_value(CLI::App* sub, Flags& f, const std::string& name, const std::string& key, const std::string& help) {
  sub->add_option_function<std::string>("--" + name, [&f, key](const std::string& v) { f.values[key] = v; }, help);
}

void add_common(CLI::App* sub, Flags& f) {
  add_value(sub, f, "n", "n", "universe size");
  add_value(sub, f, "k", "k", "sparsity");
  add_value(sub, f, "eps", "eps", "accuracy parameter");
  add_value(sub, f, "delta", "delta", "failure probability");
  add_value(sub, f, "trials", "trials", "number of Monte Carlo trials");
  add_value(sub, f, "seed", "seed", "64-bit base seed");
  add_value(sub, f, "dist", "dist", "input family: zipf|planted|spiked|adversarial|powerlaw|sparse");
  add_value(sub, f, "out", "out", "CSV path (or gnuplot table path with --sweep)");
  add_value(sub, f, "min-success", "min_success", "success-rate threshold for the exit code");
  sub->add_option("--config", f.config, "flat key=value config file; flags override it");
  sub->add_option("--set", f.sets, "extra key=value parameter (repeatable)");
  sub->add_option("--sweep", f.sweep, "key=v1,v2,... runs one experiment per value and prints a table");
}

std::pair<std::string, std::string> split_kv(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) throw sketchrec::ConfigError("expected key=value, got '" + s + "'");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int execute(const std::string& id, const Flags& f) {
  ExperimentConfig cfg = f.config.empty() ? ExperimentConfig{} : sketchrec::load_config(f.config);
  if (id == "facts" && !f.values.count("trials") && !cfg.has("trials")) cfg.trials = 1;
  cfg.algorithm = id;
  for (const auto& s : f.sets) {
    auto [k, v] = split_kv(s);
    cfg.set(k, v);
  }
  for (const auto& [k, v] : f.values) cfg.set(k, v);

  if (!f.sweep.empty()) {
    auto [key, list] = split_kv(f.sweep);
    const auto sweep = sketchrec::run_sweep(cfg, key, split_list(list));
    bool met = true;
    for (const auto& p : sweep) {
      std::cout << key << '=' << p.value << ' ' << sketchrec::summary_line(p.report) << '\n';
      met = met && p.report.threshold_met();
    }
    if (cfg.out.empty()) {
      sketchrec::write_gnuplot_table(std::cout, key, sweep);
    } else {
      std::ofstream out(cfg.out);
      sketchrec::write_gnuplot_table(out, key, sweep);
    }
    return met ? 0 : 1;
  }

  const auto report = sketchrec::run(cfg);
  for (const auto& note : report.notes) std::cout << "# " << note << '\n';
  std::cout << sketchrec::summary_line(report) << '\n';
  if (!cfg.out.empty()) {
    std::ofstream out(cfg.out);
    if (!out) throw sketchrec::ConfigError("cannot write '" + cfg.out + "'");
    sketchrec::write_csv(out, report);
  }
  return sketchrec::exit_code(report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sketching and sparse recovery experiments"};
  app.require_subcommand(1);
  Flags flags;
  std::map<CLI::App*, std::string> ids;
  for (const auto& id : sketchrec::experiment_ids()) {
    CLI::App* sub = app.add_subcommand(id, sketchrec::find_experiment(id)->description);
    sub->set_help_flag("--help", "print this help message and exit");
    add_common(sub, flags);
    if (id == "sr-pipeline") add_value(sub, flags, "schedule", "schedule", "quadratic|fast");
    if (id == "sr-adaptive") add_value(sub, flags, "mode", "mode", "full|lowk|one-sparse");
    if (id == "hh-det") {
      for (const char* k : {"q", "a", "c", "h"}) add_value(sub, flags, k, k, std::string("GUV parameter ") + k);
      add_value(sub, flags, "c-list", "c_list", "list-size constant");
    }
    ids[sub] = id;
  }
  CLI11_PARSE(app, argc, argv);
  try {
    for (auto& [sub, id] : ids) {
      if (sub->parsed()) return execute(id, flags);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
