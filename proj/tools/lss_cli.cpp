// Command-line runner: train, sample, evaluate, task1, report.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lss/config.hpp"
#include "lss/diverse.hpp"
#include "lss/harness.hpp"
#include "lss/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lss;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kNumerical = 3, kSamplerCap = 4 };

/// Bad command-line input that is not part of a config file.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::string> strategy;
  std::optional<std::string> sampler;
  std::optional<double> quantile;
  int jobs = 1;
};

// Appends one timestamped line to <out>/run.log. Timestamps live only here.
void log_line(const std::string& dir, const std::string& msg) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ofstream log(fs::path(dir) / "run.log", std::ios::app);
  log << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << ' ' << msg << '\n';
  std::cerr << msg << '\n';
}

ExperimentConfig resolve(const Common& c) {
  ExperimentConfig cfg = c.config.empty() ? ExperimentConfig{} : load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (!c.out.empty()) cfg.out = c.out;
  if (c.strategy) cfg.learner.strategy = *c.strategy;
  if (c.sampler) cfg.sampler.streams = {*c.sampler};
  if (c.quantile) cfg.sampler.quantile = *c.quantile;
  // Re-validate with the overrides applied.
  return parse_config(to_json(cfg));
}

OutputMeta meta_for(const ExperimentConfig& cfg) { return OutputMeta{config_hash(cfg), cfg.seed, {}}; }

std::string prepare_out(const std::string& dir) {
  fs::create_directories(dir);
  return dir;
}

std::string path_in(const std::string& dir, const char* name) { return (fs::path(dir) / name).string(); }

ActiveLearningResult train_model(const ExperimentConfig& cfg, const SyntheticTask& task) {
  ContextSource contexts = ContextSource::uniform(task.d_alpha);
  return active_learn(task.oracle(), contexts, task.d_theta, cfg.learner.budget, make_learner(cfg));
}

double heldout_f1(const ExperimentConfig& cfg, const SyntheticTask& task, const GpModel& model) {
  Rng rng(Rng::derive(cfg.seed, 9));
  return membership_f1(model, make_membership_test_set(task, 2000, rng));
}

int cmd_train(const Common& c) {
  const ExperimentConfig cfg = resolve(c);
  const std::string out = prepare_out(cfg.out);
  log_line(out, "train: config " + config_hash(cfg) + " seed " + std::to_string(cfg.seed));
  const SyntheticTask task = make_task(cfg);
  const ActiveLearningResult res = train_model(cfg, task);
  const OutputMeta meta = meta_for(cfg);

  write_dataset(path_in(out, "dataset.csv"), res.data, task.d_theta, meta);
  save_model(path_in(out, "model.json"), ModelFile{res.kernel, res.data, task.d_theta, task.d_alpha}, meta);

  std::vector<std::string> cols{"step"};
  for (std::size_t i = 0; i < task.d_theta; ++i) cols.push_back("theta_" + std::to_string(i));
  for (std::size_t i = 0; i < task.d_alpha; ++i) cols.push_back("alpha_" + std::to_string(i));
  for (const char* s : {"y", "acquisition", "refit_lml"}) cols.emplace_back(s);
  std::vector<CsvRow> rows;
  for (std::size_t s = 0; s < res.log.size(); ++s) {
    const StepRecord& r = res.log[s];
    CsvRow row{std::to_string(s + 1)};
    for (Eigen::Index i = 0; i < r.theta.size(); ++i) row.push_back(format_number(r.theta[i]));
    for (Eigen::Index i = 0; i < r.context.size(); ++i) row.push_back(format_number(r.context[i]));
    row.push_back(format_number(r.y));
    row.push_back(format_number(r.acquisition));
    row.push_back(std::isnan(r.log_likelihood) ? "" : format_number(r.log_likelihood));
    rows.push_back(std::move(row));
  }
  write_csv(path_in(out, "train_log.csv"), meta, cols, rows);

  const GpModel model(res.data, res.kernel);
  json summary{{"config_hash", meta.config_hash}, {"seed", cfg.seed},          {"version", kArtifactVersion},
               {"points", res.data.size()},      {"seed_rows", res.seed_rows}, {"heldout_f1", heldout_f1(cfg, task, model)},
               {"config", to_json(cfg)}};
  write_text(path_in(out, "train_summary.json"), summary.dump(2) + "\n");
  log_line(out, "train: wrote " + std::to_string(res.data.size()) + " rows, held-out F1 " +
                    format_number(summary["heldout_f1"].get<double>()));
  return kOk;
}

Vector parse_context(const std::string& text, std::size_t dim) {
  std::vector<double> vals;
  std::stringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    if (cell.empty()) continue;
    try {
      vals.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw UsageError("--context: '" + cell + "' is not a number");
    }
  }
  if (vals.size() != dim)
    throw UsageError("--context has " + std::to_string(vals.size()) + " values but the model expects " +
                     std::to_string(dim));
  return to_vector(vals);
}

std::string fnv_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

struct SampleArgs {
  std::string model;
  std::string context;
  std::size_t count = 50;
};

int cmd_sample(const Common& c, const SampleArgs& a) {
  const ExperimentConfig cfg = resolve(c);
  const std::string out = prepare_out(cfg.out);
  if (cfg.sampler.streams.size() != 1 || cfg.sampler.streams[0] == "oracle")
    throw UsageError("sample needs exactly one of --sampler rejection|adaptive|diverse");
  const std::string sampler = cfg.sampler.streams[0];
  const ModelFile mf = load_model(a.model);
  const Vector context = parse_context(a.context, mf.alpha_dim);
  std::ifstream model_in(a.model, std::ios::binary);
  const std::string model_text((std::istreambuf_iterator<char>(model_in)), std::istreambuf_iterator<char>());
  OutputMeta meta{fnv_hex(model_text + "|" + to_json(cfg).dump() + "|" + a.context + "|" + std::to_string(a.count)),
                  cfg.seed,
                  {{"sampler", sampler}, {"quantile", format_number(cfg.sampler.quantile)}, {"context", a.context}}};
  log_line(out, "sample: " + sampler + " x" + std::to_string(a.count) + " from " + a.model);

  auto model = std::make_shared<const GpModel>(mf.data, mf.kernel);
  Rng rng(Rng::derive(cfg.seed, 21));
  SearchConfig search;
  search.candidates = cfg.learner.candidates;
  auto set = std::make_shared<SuperLevelSet>(build_superlevel_set(model, context, cfg.sampler.quantile, search, rng));
  const std::uint64_t stream_seed = Rng::derive(cfg.seed, 22);
  const DiverseConfig dcfg = make_diverse(cfg);

  std::unique_ptr<SampleStream> stream;
  DiverseStream* diverse = nullptr;
  if (sampler == "rejection") {
    stream = std::make_unique<RejectionStream>(set, stream_seed);
  } else if (sampler == "adaptive") {
    stream = std::make_unique<AdaptiveStream>(set, dcfg.adaptive, stream_seed);
  } else {
    auto d = std::make_unique<DiverseStream>(set, DiversityKernel::unit(mf.theta_dim, cfg.sampler.diversity_noise),
                                             dcfg, stream_seed);
    diverse = d.get();
    stream = std::move(d);
  }

  std::vector<std::string> cols{"yield"};
  for (std::size_t i = 0; i < mf.theta_dim; ++i) cols.push_back("theta_" + std::to_string(i));
  for (const char* s : {"phi", "member", "membership_calls"}) cols.emplace_back(s);
  if (diverse) cols.emplace_back("diversity");
  std::vector<CsvRow> rows;
  std::vector<Vector> yielded;
  int status = kOk;
  try {
    for (std::size_t y = 1; y <= a.count; ++y) {
      const Vector theta = stream->next();
      CsvRow row{std::to_string(y)};
      for (Eigen::Index i = 0; i < theta.size(); ++i) row.push_back(format_number(theta[i]));
      row.push_back(format_number(set->confidence(theta)));
      row.push_back(set->contains(theta) ? "1" : "0");
      row.push_back(std::to_string(stream->stats().membership_calls));
      if (diverse) {
        yielded.push_back(theta);
        row.push_back(format_number(diversity(yielded, diverse->kernel())));
      }
      rows.push_back(std::move(row));
    }
  } catch (const SamplerCapError& e) {
    log_line(out, std::string("sample: ") + e.what());
    status = kSamplerCap;
  }
  if (stream->stats().capped) {
    log_line(out, "sample: a buffer fill hit its round cap and was padded with theta*");
    status = kSamplerCap;
  }
  meta.extra.emplace_back("beta", format_number(set->beta()));
  meta.extra.emplace_back("status", status == kOk ? "complete" : "partial");
  write_csv(path_in(out, "samples.csv"), meta, cols, rows);
  return status;
}

Vector region_anchor(const SyntheticTask& task, const Vector& alpha) {
  if (task.region == RegionKind::Ellipsoid) return task.center(alpha);
  const Box& b = task.boxes.front();
  return 0.5 * (b.lower + b.upper);
}

StreamFactory make_factory(const std::string& method, const ExperimentConfig& cfg, const SyntheticTask& task,
                           std::shared_ptr<const GpModel> model) {
  const DiverseConfig dcfg = make_diverse(cfg);
  SearchConfig search;
  search.candidates = cfg.learner.candidates;
  return [=](std::size_t, std::uint64_t seed) {
    Rng rng(seed);
    SamplerUnit unit;
    unit.context = rng.uniform_vector(task.d_alpha);
    std::shared_ptr<const MembershipSet> set;
    if (method == "oracle") {
      const Vector alpha = unit.context;
      set = std::make_shared<PredicateSet>(
          task.d_theta, [task, alpha](const Vector& t) { return task.member(t, alpha); }, region_anchor(task, alpha));
    } else {
      set = std::make_shared<SuperLevelSet>(build_superlevel_set(model, unit.context, cfg.sampler.quantile, search, rng));
    }
    const std::uint64_t s = rng.next_u64();
    if (method == "rejection" || method == "oracle")
      unit.stream = std::make_unique<RejectionStream>(set, s);
    else if (method == "adaptive")
      unit.stream = std::make_unique<AdaptiveStream>(set, dcfg.adaptive, s);
    else
      unit.stream = std::make_unique<DiverseStream>(set, DiversityKernel::unit(task.d_theta, cfg.sampler.diversity_noise),
                                                    dcfg, s);
    return unit;
  };
}

std::string pm(const Summary& s, int precision) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(precision) << s.mean << " +- " << s.sd;
  return o.str();
}

std::string evaluate_report(const json& summary) {
  std::ostringstream o;
  o << "config_hash: " << summary["config_hash"].get<std::string>() << '\n';
  o << "seed: " << summary["seed"] << '\n';
  o << "seeds:";
  for (const auto& s : summary["seed_list"]) o << ' ' << s.get<std::uint64_t>();
  o << "\n\n";
  o << std::left << std::setw(11) << "method" << std::setw(18) << "FP" << std::setw(22) << "T50 calls"
    << std::setw(18) << "N5" << std::setw(18) << "Diversity" << std::setw(18) << "J" << "flags\n";
  for (const auto& m : summary["methods"]) {
    auto get = [&](const char* k) {
      return Summary{m["metrics"][k]["mean"].get<double>(), m["metrics"][k]["sd"].get<double>(),
                     m["metrics"][k]["count"].get<std::size_t>()};
    };
    o << std::left << std::setw(11) << m["method"].get<std::string>() << std::setw(18) << pm(get("fp_rate"), 3)
      << std::setw(22) << pm(get("t50_calls"), 1) << std::setw(18) << pm(get("n5"), 2) << std::setw(18)
      << pm(get("diversity5"), 3) << std::setw(18) << pm(get("reward"), 3);
    const auto capped = m["capped_runs"].get<std::size_t>(), failed = m["failed_runs"].get<std::size_t>();
    if (capped || failed) o << "capped " << capped << ", failed " << failed;
    o << '\n';
  }
  return o.str();
}

int cmd_evaluate(const Common& c) {
  const ExperimentConfig cfg = resolve(c);
  const std::string out = prepare_out(cfg.out);
  log_line(out, "evaluate: config " + config_hash(cfg) + " seed " + std::to_string(cfg.seed));
  const SyntheticTask task = make_task(cfg);
  const OutputMeta meta = meta_for(cfg);

  std::shared_ptr<const GpModel> model;
  bool needs_model = false;
  for (const auto& s : cfg.sampler.streams) needs_model = needs_model || s != "oracle";
  double f1 = std::numeric_limits<double>::quiet_NaN();
  if (needs_model) {
    const ActiveLearningResult res = train_model(cfg, task);
    model = std::make_shared<const GpModel>(res.data, res.kernel);
    f1 = heldout_f1(cfg, task, *model);
    log_line(out, "evaluate: trained on " + std::to_string(res.data.size()) + " points, held-out F1 " + format_number(f1));
  }

  EvalConfig ec;
  ec.seeds = cfg.harness.seeds;
  ec.root_seed = Rng::derive(cfg.seed, 5);
  ec.yield_cap = cfg.harness.yield_cap;
  ec.gamma = cfg.harness.gamma;
  ec.jobs = c.jobs;

  std::vector<SamplerMetrics> results;
  for (const auto& method : cfg.sampler.streams) {
    results.push_back(evaluate_sampler(method, make_factory(method, cfg, task, model), task, ec));
    log_line(out, "evaluate: " + method + " done");
  }

  std::vector<CsvRow> metric_rows, seed_rows, timing_rows;
  json methods = json::array();
  bool partial = false;
  for (const auto& r : results) {
    json metrics;
    const std::vector<std::pair<const char*, const Summary*>> named{
        {"fp_rate", &r.fp_rate}, {"t50_calls", &r.t50_calls}, {"n5", &r.n5}, {"diversity5", &r.diversity5}, {"reward", &r.reward}};
    for (const auto& [name, s] : named) {
      metric_rows.push_back({r.method, name, format_number(s->mean), format_number(s->sd), std::to_string(s->count)});
      metrics[name] = {{"mean", s->mean}, {"sd", s->sd}, {"count", s->count}};
    }
    for (std::size_t i = 0; i < r.seeds.size(); ++i) {
      const SeedMetrics& s = r.seeds[i];
      seed_rows.push_back({r.method, std::to_string(i), std::to_string(s.seed), format_number(s.fp_rate),
                           std::to_string(s.t50_calls), std::to_string(s.n5), s.n5_capped ? "1" : "0",
                           s.n5_capped ? "" : format_number(s.diversity5), format_number(s.reward), std::to_string(s.yields),
                           std::to_string(s.membership_calls), s.failed ? "1" : "0"});
      timing_rows.push_back({r.method, std::to_string(i), format_number(s.t50_seconds)});
    }
    partial = partial || r.failed_runs > 0 || r.capped_runs > 0;
    methods.push_back({{"method", r.method}, {"metrics", metrics}, {"capped_runs", r.capped_runs}, {"failed_runs", r.failed_runs}});
  }
  write_csv(path_in(out, "metrics.csv"), meta, {"method", "metric", "mean", "sd", "count"}, metric_rows);
  write_csv(path_in(out, "per_seed.csv"), meta,
            {"method", "seed_index", "seed", "fp_rate", "t50_calls", "n5", "n5_capped", "diversity5", "reward", "yields",
             "membership_calls", "failed"},
            seed_rows);
  write_csv(path_in(out, "timings.csv"), meta, {"method", "seed_index", "t50_seconds"}, timing_rows);

  json seed_list = json::array();
  for (std::size_t i = 0; i < ec.seeds; ++i) seed_list.push_back(Rng::derive(ec.root_seed, i));
  json summary{{"kind", "evaluate"},
               {"config_hash", meta.config_hash},
               {"seed", cfg.seed},
               {"version", kArtifactVersion},
               {"seed_list", seed_list},
               {"heldout_f1", std::isnan(f1) ? json(nullptr) : json(f1)},
               {"partial", partial},
               {"methods", methods},
               {"config", to_json(cfg)}};
  write_text(path_in(out, "summary.json"), summary.dump(2) + "\n");
  const std::string report = evaluate_report(summary);
  write_text(path_in(out, "report.txt"), report);
  std::cout << report;
  return kOk;
}

std::string task1_report(const json& summary) {
  std::ostringstream o;
  o << "config_hash: " << summary["config_hash"].get<std::string>() << '\n';
  o << "seed: " << summary["seed"] << "\n";
  o << "optimal J: " << std::fixed << std::setprecision(3) << summary["optimal_reward"].get<double>()
    << " (on the drawn test split: " << summary["empirical_optimal_reward"].get<double>() << ")\n\n";
  o << std::left << std::setw(17) << "method" << std::setw(9) << "trained" << std::setw(18) << "J" << std::setw(18)
    << "samples" << "scales\n";
  for (const auto& p : summary["curve"]) {
    o << std::left << std::setw(17) << p["method"].get<std::string>() << std::setw(9) << p["tasks_trained"].get<std::size_t>()
      << std::setw(18) << pm(Summary{p["reward_mean"].get<double>(), p["reward_sd"].get<double>(), 0}, 3)
      << std::setw(18) << pm(Summary{p["samples_mean"].get<double>(), p["samples_sd"].get<double>(), 0}, 2);
    for (const auto& s : p["scales"]) o << std::setprecision(3) << s.get<double>() << ' ';
    o << '\n';
  }
  return o.str();
}

int cmd_task1(const Common& c) {
  ExperimentConfig cfg = resolve(c);
  const std::string out = prepare_out(cfg.out);
  log_line(out, "task1: config " + config_hash(cfg) + " seed " + std::to_string(cfg.seed));
  Task1Config t = make_task1(cfg);
  t.jobs = c.jobs;
  const Task1Result r = run_task1_experiment(t);
  const OutputMeta meta = meta_for(cfg);

  std::vector<CsvRow> rows;
  json curve = json::array();
  for (const auto& p : r.curve) {
    CsvRow row{p.method,
               std::to_string(p.tasks_trained),
               format_number(p.reward.mean),
               format_number(p.reward.sd),
               format_number(p.samples.mean),
               format_number(p.samples.sd),
               format_number(p.solved_fraction)};
    for (Eigen::Index i = 0; i < 2; ++i) row.push_back(p.scales.size() ? format_number(p.scales[i]) : "");
    rows.push_back(std::move(row));
    curve.push_back({{"method", p.method},
                     {"tasks_trained", p.tasks_trained},
                     {"reward_mean", p.reward.mean},
                     {"reward_sd", p.reward.sd},
                     {"samples_mean", p.samples.mean},
                     {"samples_sd", p.samples.sd},
                     {"solved_fraction", p.solved_fraction},
                     {"scales", to_std(p.scales)}});
  }
  write_csv(path_in(out, "curve.csv"), meta,
            {"method", "tasks_trained", "reward_mean", "reward_sd", "samples_mean", "samples_sd", "solved_fraction",
             "scale_0", "scale_1"},
            rows);
  std::vector<CsvRow> seed_rows;
  json seeds = json::array();
  for (std::size_t i = 0; i < r.seeds.size(); ++i) {
    const auto& s = r.seeds[i];
    seed_rows.push_back({std::to_string(i), std::to_string(s.seed), format_number(s.final_scales[0]),
                         format_number(s.final_scales[1]), std::to_string(s.updates)});
    seeds.push_back(s.seed);
  }
  write_csv(path_in(out, "task1_seeds.csv"), meta, {"seed_index", "seed", "scale_0", "scale_1", "updates"}, seed_rows);
  json summary{{"kind", "task1"},          {"config_hash", meta.config_hash}, {"seed", cfg.seed},
               {"version", kArtifactVersion}, {"seed_list", seeds},           {"optimal_reward", r.optimal_reward},
               {"empirical_optimal_reward", r.empirical_optimal_reward}, {"curve", curve},            {"config", to_json(cfg)}};
  write_text(path_in(out, "task1_summary.json"), summary.dump(2) + "\n");
  const std::string report = task1_report(summary);
  write_text(path_in(out, "task1_report.txt"), report);
  std::cout << report;
  return kOk;
}

int cmd_report(const Common& c) {
  const std::string dir = c.out.empty() ? "out" : c.out;
  bool any = false;
  for (const char* name : {"summary.json", "task1_summary.json"}) {
    const fs::path p = fs::path(dir) / name;
    if (!fs::exists(p)) continue;
    std::ifstream in(p);
    json summary;
    try {
      summary = json::parse(in);
    } catch (const json::exception& e) {
      throw UsageError(p.string() + " is not valid JSON: " + e.what());
    }
    const std::string kind = summary.value("kind", "");
    std::cout << (kind == "task1" ? task1_report(summary) : evaluate_report(summary)) << '\n';
    any = true;
  }
  if (!any) throw UsageError("no summary.json or task1_summary.json in '" + dir + "'");
  return kOk;
}

void add_common(CLI::App* app, Common& c, bool with_strategy, bool with_sampler) {
  app->add_option("--config", c.config, "JSON experiment config")->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "root seed (overrides the config)");
  app->add_option("--out", c.out, "output directory (overrides the config)");
  app->add_option("--quantile", c.quantile, "super-level set quantile q in (0, 1)");
  app->add_option("--jobs", c.jobs, "worker threads for per-seed work")->check(CLI::PositiveNumber);
  if (with_strategy)
    app->add_option("--strategy", c.strategy, "straddle or random")->check(CLI::IsMember({"straddle", "random"}));
  if (with_sampler)
    app->add_option("--sampler", c.sampler, "rejection, adaptive or diverse")
        ->check(CLI::IsMember({"rejection", "adaptive", "diverse", "oracle"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Level-set estimation and super-level set sampling experiments"};
  app.require_subcommand(1);
  Common common;
  SampleArgs sample_args;

  auto* train = app.add_subcommand("train", "active learning on the configured task; writes dataset and model");
  add_common(train, common, true, false);
  auto* sample = app.add_subcommand("sample", "draw from the super-level set of a saved model");
  add_common(sample, common, false, true);
  sample->add_option("--model", sample_args.model, "model.json written by train")->required()->check(CLI::ExistingFile);
  sample->add_option("--context", sample_args.context, "comma-separated context values");
  sample->add_option("--count", sample_args.count, "number of yields")->check(CLI::PositiveNumber);
  auto* evaluate = app.add_subcommand("evaluate", "sampler metrics (FP, T50, N5, diversity, J) over seeds");
  add_common(evaluate, common, true, true);
  auto* task1 = app.add_subcommand("task1", "two-box kernel-learning experiment");
  add_common(task1, common, false, false);
  auto* report = app.add_subcommand("report", "print the tables stored in an output directory");
  report->add_option("--out", common.out, "directory holding summary files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*train) return cmd_train(common);
    if (*sample) return cmd_sample(common, sample_args);
    if (*evaluate) return cmd_evaluate(common);
    if (*task1) return cmd_task1(common);
    if (*report) return cmd_report(common);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const SamplerCapError& e) {
    std::cerr << "sampler cap: " << e.what() << '\n';
    return kSamplerCap;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const OracleError& e) {
    std::cerr << "oracle failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
