// Command-line front end for simulation, reserve learning and the equilibrium
// experiments. Exit codes: 0 success, 2 invalid configuration, 3 numerical
// failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gspr/errors.hpp"
#include "gspr/harness/config_io.hpp"
#include "gspr/harness/dataset.hpp"
#include "gspr/harness/experiments.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gspr;
using namespace gspr::harness;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
};

ExperimentConfig resolve_config(const CommonOptions& opts) {
  auto config = opts.config_path.empty() ? default_experiment_config() : load_config(opts.config_path);
  if (opts.seed) config.master_seed = *opts.seed;
  config.validate();
  return config;
}

fs::path out_file(const CommonOptions& opts, const std::string& name) {
  fs::create_directories(opts.out_dir);
  return fs::path(opts.out_dir) / name;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "Experiment config (JSON)");
  cmd->add_option("--seed", opts.seed, "Master seed (overrides the config)");
  cmd->add_option("--out", opts.out_dir, "Output directory")->capture_default_str();
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(static_cast<std::size_t>(std::stoull(item)));
    } catch (const std::exception&) {
      throw ConfigError("invalid size list entry '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty size list");
  return out;
}

int cmd_simulate(const CommonOptions& opts) {
  const auto config = resolve_config(opts);
  const auto beta = fit_bid_function(config);
  const auto cfg_json = to_json(config);
  const auto train = simulate_auctions(config, config.n_train, "train", beta);
  const auto test = simulate_auctions(config, config.n_test, "test", beta);
  save_dataset(train.dataset, cfg_json, out_file(opts, "train.csv"));
  save_dataset(test.dataset, cfg_json, out_file(opts, "test.csv"));
  std::cout << "wrote " << train.dataset.size() << " training and " << test.dataset.size()
            << " test auctions to " << opts.out_dir << "\n";
  return 0;
}

int cmd_learn(const CommonOptions& opts, const std::string& method, const std::string& train_path,
              const std::string& test_path) {
  const auto train = load_dataset(train_path);
  const auto config = opts.config_path.empty() ? config_from_json(train.config) : resolve_config(opts);
  const auto test = test_path.empty() ? train : load_dataset(test_path);
  const auto rec = learn(method, train.data.auctions, test.data.auctions, config.auction);
  write_json(out_file(opts, "result_" + rec.method + ".json"), to_json(rec));
  write_json(out_file(opts, "timing_" + rec.method + ".json"),
             json{{"method", rec.method}, {"runtime_seconds", rec.runtime_seconds}});
  std::cout << rec.method << ": reserve=" << rec.reserve << " mean_revenue=" << rec.mean_revenue
            << " +- " << rec.standard_error << "\n";
  if (rec.numerical_warning) {
    std::cerr << "numerical warning: " << rec.note << "\n";
    return kExitNumerical;
  }
  return 0;
}

int cmd_equilibrium(const CommonOptions& opts) {
  const auto config = resolve_config(opts);
  const auto beta = fit_bid_function(config);
  write_text(out_file(opts, "equilibrium.csv"), equilibrium_csv(beta));
  write_json(out_file(opts, "equilibrium_diagnostics.json"),
             json{{"grid_n", beta.grid_values.size()},
                  {"negative_bids", beta.diagnostics.negative_bids},
                  {"monotonicity_violations", beta.diagnostics.monotonicity_violations},
                  {"largest_drop", beta.diagnostics.largest_drop},
                  {"max_increment", beta.diagnostics.max_increment}});
  if (!beta.diagnostics.clean()) std::cerr << "diagnostic: " << beta.diagnostics.describe() << "\n";
  std::cout << "wrote equilibrium.csv (" << beta.grid_values.size() << " points)\n";
  return 0;
}

int cmd_convergence(const CommonOptions& opts, const std::string& sizes, std::size_t reps,
                    std::size_t reference_n) {
  const auto config = resolve_config(opts);
  const auto n_list = parse_sizes(sizes);
  const auto result = run_convergence(config, n_list, reps, reference_n);
  write_text(out_file(opts, "convergence.csv"), convergence_csv(result));
  write_json(out_file(opts, "convergence_summary.json"), convergence_summary_json(result));
  for (const auto& s : result.summary) {
    std::cout << "n=" << s.n << " median_sup_error=" << s.median << " mean=" << s.mean << "\n";
  }
  std::cout << "envelope c/sqrt(n): c=" << result.envelope_constant << "\n";
  return 0;
}

int cmd_table1(const CommonOptions& opts) {
  const auto config = resolve_config(opts);
  const auto result = run_table1(config);
  write_json(out_file(opts, "table1.json"), to_json(result, config));
  write_text(out_file(opts, "table1.csv"), table1_csv(result));
  write_json(out_file(opts, "timing.json"),
             json{{"density", result.density.runtime_seconds},
                  {"sweep", result.discriminative.runtime_seconds}});
  save_dataset(result.train, to_json(config), out_file(opts, "train.csv"));
  save_dataset(result.test, to_json(config), out_file(opts, "test.csv"));
  std::cout << "density:        " << result.density.mean_revenue << " +- "
            << result.density.standard_error << " (reserve " << result.density.reserve << ")\n"
            << "discriminative: " << result.discriminative.mean_revenue << " +- "
            << result.discriminative.standard_error << " (reserve "
            << result.discriminative.reserve << ")\n"
            << "test oracle:    " << result.oracle.mean_revenue << "\n";
  if (result.density.numerical_warning) {
    std::cerr << "numerical warning (density): " << result.density.note << "\n";
    return kExitNumerical;
  }
  return 0;
}

int cmd_histograms(const CommonOptions& opts, std::size_t bins) {
  const auto config = resolve_config(opts);
  const auto h = run_histograms(config, bins);
  write_text(out_file(opts, "histograms.csv"), histograms_csv(h));
  write_json(out_file(opts, "histograms_summary.json"),
             json{{"ks_true_vs_sne", h.ks_sne},
                  {"ks_true_vs_density", h.ks_density},
                  {"density_flagged", h.density_flagged}});
  std::cout << "KS(true, SNE)=" << h.ks_sne << " KS(true, density)=" << h.ks_density << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reserve-price learning for generalized second-price auctions"};
  app.require_subcommand(1);

  CommonOptions opts;

  auto* simulate = app.add_subcommand("simulate", "Simulate training and test datasets");
  add_common(simulate, opts);

  std::string method = "sweep";
  std::string train_path;
  std::string test_path;
  auto* learn_cmd = app.add_subcommand("learn", "Learn a reserve price from a dataset");
  add_common(learn_cmd, opts);
  learn_cmd->add_option("--method", method, "sweep or density")
      ->check(CLI::IsMember({"sweep", "density"}))
      ->capture_default_str();
  learn_cmd->add_option("--train", train_path, "Training dataset CSV")->required();
  learn_cmd->add_option("--test", test_path, "Evaluation dataset CSV (default: training set)");

  auto* equilibrium = app.add_subcommand("equilibrium", "Solve the discrete equilibrium bid grid");
  add_common(equilibrium, opts);

  std::string sizes = "100,200,400,800,1600";
  std::size_t reps = 10;
  std::size_t reference_n = 2000;
  auto* convergence = app.add_subcommand("convergence", "Equilibrium convergence experiment");
  add_common(convergence, opts);
  convergence->add_option("--n-list", sizes, "Comma-separated sample sizes")->capture_default_str();
  convergence->add_option("--reps", reps, "Repetitions per size")->capture_default_str();
  convergence->add_option("--reference-n", reference_n, "Reference sample size")->capture_default_str();

  auto* table1 = app.add_subcommand("table1", "Train and compare both reserve learners");
  add_common(table1, opts);

  std::size_t bins = 40;
  auto* histograms = app.add_subcommand("histograms", "Valuation-recovery histograms");
  add_common(histograms, opts);
  histograms->add_option("--bins", bins, "Number of bins")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(opts);
    if (learn_cmd->parsed()) return cmd_learn(opts, method, train_path, test_path);
    if (equilibrium->parsed()) return cmd_equilibrium(opts);
    if (convergence->parsed()) return cmd_convergence(opts, sizes, reps, reference_n);
    if (table1->parsed()) return cmd_table1(opts);
    if (histograms->parsed()) return cmd_histograms(opts, bins);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
