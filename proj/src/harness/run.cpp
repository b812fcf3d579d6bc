#include "rael/harness/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "rael/harness/wire.hpp"

namespace rael::harness {

namespace fs = std::filesystem;

namespace {

class FileObserver : public engine::TrainObserver {
 public:
  FileObserver(const std::string& metrics_path, engine::TrainObserver* next) : out_(metrics_path), next_(next) {
    if (!out_) throw std::runtime_error("cannot write " + metrics_path);
    out_ << metrics_header() << std::flush;
  }

  void on_phase(int iteration, std::string_view phase) override {
    if (next_) next_->on_phase(iteration, phase);
  }
  void on_step(int iteration, const env::Transition& t, engine::Branch branch) override {
    if (next_) next_->on_step(iteration, t, branch);
  }
  void on_iteration(const engine::IterationMetrics& m, const learner::BoostedQFunction& q) override {
    out_ << metrics_row(m) << std::flush;
    if (next_) next_->on_iteration(m, q);
  }
  void on_query(const engine::QueryRecord& q) override {
    if (next_) next_->on_query(q);
  }

 private:
  std::ofstream out_;
  engine::TrainObserver* next_;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out.flush()) throw std::runtime_error("write failed for " + path);
}

std::vector<SummaryRow> aggregate(const std::vector<std::vector<engine::IterationMetrics>>& runs) {
  std::size_t longest = 0;
  for (const auto& r : runs) longest = std::max(longest, r.size());
  std::vector<SummaryRow> rows;
  for (std::size_t i = 0; i < longest; ++i) {
    SummaryRow row;
    row.iteration = static_cast<int>(i);
    double sum = 0.0;
    for (const auto& r : runs)
      if (i < r.size()) {
        sum += r[i].mean_return;
        ++row.seeds;
      }
    row.mean = sum / row.seeds;
    double ss = 0.0;
    for (const auto& r : runs)
      if (i < r.size()) ss += (r[i].mean_return - row.mean) * (r[i].mean_return - row.mean);
    row.std = row.seeds > 1 ? std::sqrt(ss / (row.seeds - 1)) : 0.0;
    rows.push_back(row);
  }
  return rows;
}

std::string summary_tsv(const std::vector<SummaryRow>& rows) {
  std::string out = "iteration\tseeds\tmean_return\tstd_return\n";
  for (const auto& r : rows)
    out += std::to_string(r.iteration) + '\t' + std::to_string(r.seeds) + '\t' + fmt(r.mean) + '\t' + fmt(r.std) + '\n';
  return out;
}

std::vector<SummaryRow> parse_summary(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<SummaryRow> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line.rfind("iteration", 0) == 0) continue;
    std::istringstream row(line);
    SummaryRow r;
    if (!(row >> r.iteration >> r.seeds >> r.mean >> r.std)) throw std::runtime_error("malformed summary line: " + line);
    rows.push_back(r);
  }
  return rows;
}

std::unique_ptr<expert::Expert> make_oracle(const ExperimentConfig& config, const env::Environment& env) {
  switch (config.expert) {
    case ExpertMode::None: return nullptr;
    case ExpertMode::OracleActionOnly:
      return std::make_unique<expert::ScriptedOracle>(expert::load_rules(config.rules_path, env.spec()),
                                                      expert::OracleMode::ActionOnly);
    case ExpertMode::OracleWithAbstraction:
      return std::make_unique<expert::ScriptedOracle>(expert::load_rules(config.rules_path, env.spec()),
                                                      expert::OracleMode::WithAbstraction);
    case ExpertMode::Interactive: break;
  }
  throw ConfigError("the interactive expert is only available through serve");
}

SeedRun run_seed(const ExperimentConfig& config, std::uint64_t seed, const std::string& dir, expert::Expert* expert,
                 engine::TrainObserver* observer, const std::atomic<bool>* cancel) {
  SeedRun run;
  run.seed = seed;
  run.dir = dir;
  fs::create_directories(dir);
  write_file(dir + "/config.yaml", config.source);

  json status{{"seed", seed}, {"expert", to_string(config.expert)}};
  try {
    const auto env = make_environment(config.environment);
    auto train = config.train;
    train.seed = seed;
    train.bias = make_bias(config, *env);

    FileObserver files(dir + "/metrics.tsv", observer);
    auto result = engine::rael_train(train, *env, expert, &files, cancel);

    run.metrics = result.metrics;
    run.cancelled = result.cancelled;
    run.advice_spent = result.ledger.spent();
    run.queries = result.ledger.history().size();
    run.margin = result.margin;
    write_file(dir + "/model.txt", result.q.serialize());
    write_file(dir + "/ledger.json", ledger_json(result.ledger, result.memory).dump(2) + "\n");

    if (!config.fidelity_rules_path.empty() && !result.cancelled) {
      const auto rules = expert::load_rules(config.fidelity_rules_path, env->spec());
      auto params = config.fidelity;
      params.seed = seed;
      run.fidelity = expert::policy_fidelity(result.q, *env, rules, params);
      write_file(dir + "/fidelity.json", to_json(*run.fidelity, params.threshold).dump(2) + "\n");
    }
    run.ok = !result.cancelled;
    status["status"] = result.cancelled ? "cancelled" : "complete";
    status["iterations"] = result.metrics.size();
    status["advice_spent"] = run.advice_spent;
    status["queries"] = run.queries;
    status["margin"] = {{"advised", run.margin.advised}, {"violations", run.margin.violations}};
    if (run.fidelity) status["fidelity"] = run.fidelity->fidelity;
  } catch (const std::exception& e) {
    run.ok = false;
    run.error = e.what();
    status["status"] = "crashed";
    status["error"] = run.error;
    spdlog::error("seed {} crashed: {}", seed, run.error);
  }
  write_file(dir + "/run.json", status.dump(2) + "\n");
  return run;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const std::string& out_dir, int jobs) {
  if (config.expert == ExpertMode::Interactive) throw ConfigError("the interactive expert is only available through serve");
  fs::create_directories(out_dir);
  write_file(out_dir + "/config.yaml", config.source);

  ExperimentResult result;
  result.runs.resize(config.seeds.size());
  std::mutex log_mu;
  auto work = [&](std::size_t i) {
    const auto seed = config.seeds[i];
    const auto dir = out_dir + "/seed-" + std::to_string(seed);
    std::unique_ptr<expert::Expert> oracle;
    try {
      const auto env = make_environment(config.environment);
      oracle = make_oracle(config, *env);
    } catch (const std::exception& e) {
      result.runs[i] = SeedRun{seed, dir, false, false, e.what(), {}, 0, 0, {}, std::nullopt};
      return;
    }
    result.runs[i] = run_seed(config, seed, dir, oracle.get());
    std::lock_guard lock(log_mu);
    const auto& r = result.runs[i];
    if (r.ok && !r.metrics.empty())
      spdlog::info("{} seed {}: final return {:.3f}, advice spent {}", config.name, seed, r.metrics.back().mean_return,
                   r.advice_spent);
  };

  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(config.seeds.size())));
  if (jobs == 1) {
    for (std::size_t i = 0; i < config.seeds.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < config.seeds.size();) work(i);
      });
    for (auto& t : pool) t.join();
  }

  std::vector<std::vector<engine::IterationMetrics>> completed;
  std::string failures;
  for (const auto& r : result.runs) {
    if (r.ok)
      completed.push_back(r.metrics);
    else
      failures += std::to_string(r.seed) + '\t' + (r.error.empty() ? "cancelled" : r.error) + '\n';
  }
  result.summary = aggregate(completed);
  write_file(out_dir + "/summary.tsv", summary_tsv(result.summary));
  if (!failures.empty()) write_file(out_dir + "/failed_seeds.tsv", "seed\terror\n" + failures);
  return result;
}

expert::FidelityReport fidelity_report(const std::string& model_path, const std::string& rules_path,
                                       const ExperimentConfig& config, const std::string& out_path) {
  const auto env = make_environment(config.environment);
  const auto q = learner::BoostedQFunction::deserialize(read_file(model_path));
  const auto rules = expert::load_rules(rules_path, env->spec());
  auto params = config.fidelity;
  params.seed = config.seeds.front();
  auto report = expert::policy_fidelity(q, *env, rules, params);
  if (!out_path.empty()) write_file(out_path, to_json(report, params.threshold).dump(2) + "\n");
  return report;
}

std::string plot_svg(const std::vector<Curve>& curves, const std::string& title) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  const double W = 640, H = 400, L = 60, R = 150, T = 40, B = 50;
  double lo = 1e300, hi = -1e300;
  int last = 1;
  for (const auto& c : curves)
    for (const auto& r : c.rows) {
      lo = std::min(lo, r.mean - r.std);
      hi = std::max(hi, r.mean + r.std);
      last = std::max(last, r.iteration);
    }
  if (lo > hi) lo = 0, hi = 1;
  if (hi - lo < 1e-9) lo -= 1, hi += 1;
  auto x = [&](double i) { return L + (W - L - R) * i / last; };
  auto y = [&](double v) { return T + (H - T - B) * (hi - v) / (hi - lo); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n"
      << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = lo + (hi - lo) * k / 4;
    svg << "<text x=\"" << L - 6 << "\" y=\"" << y(v) + 4 << "\" text-anchor=\"end\">" << fmt(std::round(v * 10) / 10)
        << "</text>\n";
  }
  svg << "<text x=\"" << L << "\" y=\"" << H - B + 18 << "\">0</text>\n"
      << "<text x=\"" << W - R << "\" y=\"" << H - B + 18 << "\" text-anchor=\"end\">" << last << "</text>\n"
      << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">iteration</text>\n"
      << "<text transform=\"translate(16," << (T + H - B) / 2
      << ") rotate(-90)\" text-anchor=\"middle\">mean evaluation return</text>\n";

  for (std::size_t c = 0; c < curves.size(); ++c) {
    const auto* color = colors[c % 6];
    const auto& rows = curves[c].rows;
    if (rows.empty()) continue;
    std::ostringstream band, line;
    for (const auto& r : rows) band << x(r.iteration) << ',' << y(r.mean + r.std) << ' ';
    for (auto it = rows.rbegin(); it != rows.rend(); ++it) band << x(it->iteration) << ',' << y(it->mean - it->std) << ' ';
    for (const auto& r : rows) line << x(r.iteration) << ',' << y(r.mean) << ' ';
    svg << "<polygon points=\"" << band.str() << "\" fill=\"" << color << "\" fill-opacity=\"0.15\"/>\n"
        << "<polyline points=\"" << line.str() << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
        << "<rect x=\"" << W - R + 12 << "\" y=\"" << T + 20 * c << "\" width=\"12\" height=\"12\" fill=\"" << color
        << "\"/>\n"
        << "<text x=\"" << W - R + 30 << "\" y=\"" << T + 20 * c + 10 << "\">" << curves[c].label << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace rael::harness
