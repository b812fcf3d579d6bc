// rael: run experiments, check policy fidelity, serve a live advice session,
// and plot learning curves.

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "rael/harness/run.hpp"
#include "rael/harness/service.hpp"

namespace fs = std::filesystem;
using namespace rael::harness;

namespace {

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

int cmd_run(const std::string& config_path, std::string out, int jobs) {
  const auto config = load_config(config_path);
  if (out.empty()) out = config.output_dir;
  const auto result = run_experiment(config, out, jobs);
  int failed = 0;
  for (const auto& r : result.runs) failed += !r.ok;
  std::cout << "wrote " << result.runs.size() - failed << " run(s) to " << out;
  if (failed) std::cout << "; " << failed << " seed(s) failed, see failed_seeds.tsv";
  std::cout << '\n';
  if (!result.summary.empty())
    std::cout << "final mean return " << result.summary.back().mean << " +- " << result.summary.back().std << '\n';
  return failed == static_cast<int>(result.runs.size()) ? 1 : 0;
}

int cmd_fidelity(const std::string& config_path, const std::string& model, std::string rules, std::string out) {
  const auto config = load_config(config_path);
  if (rules.empty()) rules = config.fidelity_rules_path;
  if (rules.empty()) throw ConfigError("no rules file: pass --rules or set fidelity.rules");
  if (!out.empty() && fs::is_directory(out)) out += "/fidelity.json";
  const auto report = fidelity_report(model, rules, config, out);
  for (const auto& r : report.rules)
    std::cout << r.id << '\t' << (r.uncovered ? "uncovered" : r.satisfied ? "pass" : "fail") << '\t' << r.agreed << '/'
              << r.matched << '\n';
  std::cout << "fidelity " << report.fidelity << " (" << report.satisfied << '/' << report.counted << ")\n";
  return 0;
}

int cmd_serve(const std::string& config_path, std::string out, const std::string& host, int port, bool exit_when_done) {
  const auto config = load_config(config_path);
  if (out.empty()) out = config.output_dir;
  Service service(config, out + "/seed-" + std::to_string(config.seeds.front()));
  const int bound = service.bind(host, port);
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  service.start();
  std::cout << "serving on http://" << host << ':' << bound << std::endl;
  while (!g_interrupted && !(exit_when_done && service.training_done()))
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  service.stop();
  std::cout << "artifacts in " << service.result().dir << std::endl;
  return service.result().error.empty() ? 0 : 1;
}

int cmd_plot(const std::vector<std::string>& inputs, const std::string& config_path, std::string out,
             const std::string& title) {
  std::vector<Curve> curves;
  auto add = [&](const std::string& label, const std::string& dir) {
    curves.push_back({label, parse_summary(read_file(dir + "/summary.tsv"))});
  };
  if (!config_path.empty()) {
    const auto config = load_config(config_path);
    add(config.name, config.output_dir);
  }
  for (const auto& in : inputs) {
    const auto eq = in.find('=');
    if (eq == std::string::npos)
      add(fs::path(in).filename().string(), in);
    else
      add(in.substr(0, eq), in.substr(eq + 1));
  }
  if (curves.empty()) throw ConfigError("nothing to plot: pass --config or --input");
  if (out.empty()) out = "curves.svg";
  if (fs::is_directory(out)) out += "/curves.svg";
  write_file(out, plot_svg(curves, title));
  std::cout << "wrote " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relational reinforcement learning with actively elicited expert advice"};
  app.require_subcommand(1);
  std::string config, out, log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off");

  auto* run = app.add_subcommand("run", "Train every configured seed and aggregate the curves");
  int jobs = 1;
  run->add_option("--config", config, "Experiment YAML")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "Output directory (default: the config's output)");
  run->add_option("--jobs", jobs, "Seeds trained in parallel")->check(CLI::PositiveNumber);

  auto* fid = app.add_subcommand("fidelity", "Check a trained model against oracle rules");
  std::string model, rules;
  fid->add_option("--config", config, "Experiment YAML")->required()->check(CLI::ExistingFile);
  fid->add_option("--model", model, "model.txt from a run")->required()->check(CLI::ExistingFile);
  fid->add_option("--rules", rules, "Rules file (default: the config's fidelity rules)");
  fid->add_option("--out", out, "Report path or directory");

  auto* serve = app.add_subcommand("serve", "Train with a live adviser over HTTP");
  int port = 8080;
  std::string host = "127.0.0.1";
  bool exit_when_done = false;
  serve->add_option("--config", config, "Experiment YAML")->required()->check(CLI::ExistingFile);
  serve->add_option("--out", out, "Output directory (default: the config's output)");
  serve->add_option("--port", port, "Port, 0 for any free port")->check(CLI::Range(0, 65535));
  serve->add_option("--host", host, "Address to bind");
  serve->add_flag("--exit-when-done", exit_when_done, "Stop serving once training finishes");

  auto* plot = app.add_subcommand("plot", "Draw summary curves as SVG");
  std::vector<std::string> inputs;
  std::string title = "Mean evaluation return";
  plot->add_option("--config", config, "Plot the run directory named in this config")->check(CLI::ExistingFile);
  plot->add_option("--input", inputs, "label=run_dir (repeatable)");
  plot->add_option("--out", out, "SVG path or directory");
  plot->add_option("--title", title, "Chart title");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*run) return cmd_run(config, out, jobs);
    if (*fid) return cmd_fidelity(config, model, rules, out);
    if (*serve) return cmd_serve(config, out, host, port, exit_when_done);
    if (*plot) return cmd_plot(inputs, config, out, title);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
