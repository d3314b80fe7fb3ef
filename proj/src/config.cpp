#include "lss/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>

namespace lss {

using nlohmann::json;

namespace {

// Typed access to one JSON object that remembers which keys were consumed.
class Section {
 public:
  Section(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
    if (!doc_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return doc_.contains(key); }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = doc_.find(key);
    return it == doc_.end() ? nullptr : &*it;
  }

  void read(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(at(key), "expected a number");
      out = v->get<double>();
    }
  }
  void read(const std::string& key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(at(key), "expected an integer");
      out = v->get<int>();
    }
  }
  void read(const std::string& key, std::size_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer() || v->get<long long>() < 0)
        throw ConfigError(at(key), "expected a non-negative integer");
      out = v->get<std::size_t>();
    }
  }
  void read(const std::string& key, std::uint64_t& out, int) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
        throw ConfigError(at(key), "expected a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }
  void read(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(at(key), "expected true or false");
      out = v->get<bool>();
    }
  }
  void read(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(at(key), "expected a string");
      out = v->get<std::string>();
    }
  }
  void read(const std::string& key, std::vector<std::string>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) throw ConfigError(at(key), "expected an array of strings");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        if (!(*v)[i].is_string()) throw ConfigError(at(key) + "[" + std::to_string(i) + "]", "expected a string");
        out.push_back((*v)[i].get<std::string>());
      }
    }
  }

  void finish() const {
    for (auto it = doc_.begin(); it != doc_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(at(it.key()), "unknown field");
  }

 private:
  const json& doc_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& path, const std::string& message) {
  if (!ok) throw ConfigError(path, message);
}

bool one_of(const std::string& v, std::initializer_list<const char*> options) {
  for (const char* o : options)
    if (v == o) return true;
  return false;
}

void parse_task(Section s, TaskSpec& t) {
  s.read("kind", t.kind);
  s.read("d_theta", t.d_theta);
  s.read("d_alpha", t.d_alpha);
  s.read("volume", t.volume);
  s.read("noise", t.noise);
  s.read("shape", t.shape);
  s.read("tau", t.tau);
  s.read("falloff", t.falloff);
  s.read("drift", t.drift);
  s.finish();
  require(one_of(t.kind, {"pour", "scoop", "push", "piecewise", "two-box"}), s.at("kind"),
          "expected one of pour, scoop, push, piecewise, two-box");
  require(t.d_theta >= 1, s.at("d_theta"), "must be at least 1");
  require(t.volume > 0.0 && t.volume < 1.0, s.at("volume"), "must lie in (0, 1)");
  require(t.noise >= 0.0, s.at("noise"), "must be non-negative");
  require(t.shape.empty() || one_of(t.shape, {"pour", "scoop", "push", "piecewise"}), s.at("shape"),
          "expected one of pour, scoop, push, piecewise");
  require(t.tau > 0.0 && t.tau < 1.0, s.at("tau"), "must lie in (0, 1)");
  require(t.falloff > 0.0, s.at("falloff"), "must be positive");
  require(t.drift >= 0.0 && t.drift <= 1.0, s.at("drift"), "must lie in [0, 1]");
}

void parse_learner(Section s, LearnerSpec& l) {
  s.read("kernel", l.kernel);
  s.read("restarts", l.restarts);
  s.read("budget", l.budget);
  s.read("n_seed", l.n_seed);
  s.read("strategy", l.strategy);
  s.read("refit_every", l.refit_every);
  s.read("max_iterations", l.max_iterations);
  s.read("candidates", l.candidates);
  s.read("scale_max", l.scale_max);
  s.finish();
  require(one_of(l.kernel, {"se", "matern52", "mlp"}), s.at("kernel"), "expected one of se, matern52, mlp");
  require(l.restarts >= 0, s.at("restarts"), "must be non-negative");
  require(l.budget >= 0, s.at("budget"), "must be non-negative");
  require(l.n_seed >= 1, s.at("n_seed"), "must be at least 1");
  require(one_of(l.strategy, {"straddle", "random"}), s.at("strategy"), "expected straddle or random");
  require(l.refit_every >= 1, s.at("refit_every"), "must be at least 1");
  require(l.max_iterations >= 1, s.at("max_iterations"), "must be at least 1");
  require(l.candidates >= 1, s.at("candidates"), "must be at least 1");
  require(l.scale_max > 1e-3, s.at("scale_max"), "must exceed the lower scale bound 1e-3");
}

void parse_sampler(Section s, SamplerSpec& m) {
  s.read("streams", m.streams);
  s.read("batch", m.batch);
  s.read("target", m.target);
  s.read("quantile", m.quantile);
  s.read("pi_scheme", m.pi_scheme);
  s.read("carry_variance", m.carry_variance);
  s.read("anchor_first", m.anchor_first);
  s.read("diversity_noise", m.diversity_noise);
  s.read("round_cap", m.round_cap);
  s.finish();
  require(!m.streams.empty(), s.at("streams"), "must name at least one stream");
  for (std::size_t i = 0; i < m.streams.size(); ++i)
    require(one_of(m.streams[i], {"rejection", "adaptive", "diverse", "oracle"}),
            s.at("streams") + "[" + std::to_string(i) + "]", "expected rejection, adaptive, diverse or oracle");
  require(m.batch >= 2, s.at("batch"), "must be at least 2");
  require(m.target >= 1, s.at("target"), "must be at least 1");
  require(m.quantile > 0.0 && m.quantile < 1.0, s.at("quantile"), "must lie in (0, 1)");
  require(one_of(m.pi_scheme, {"single", "uniform", "infinite"}), s.at("pi_scheme"),
          "expected single, uniform or infinite");
  require(m.diversity_noise > 0.0, s.at("diversity_noise"), "must be positive");
  require(m.round_cap >= 1, s.at("round_cap"), "must be at least 1");
}

void parse_harness(Section s, HarnessSpec& h) {
  s.read("seeds", h.seeds);
  s.read("test_tasks", h.test_tasks);
  s.read("training_tasks", h.training_tasks);
  s.read("eval_every", h.eval_every);
  s.read("attempt_cap", h.attempt_cap);
  s.read("yield_cap", h.yield_cap);
  s.read("epsilon", h.epsilon);
  s.read("gamma", h.gamma);
  s.read("learn_set", h.learn_set);
  s.finish();
  require(h.seeds >= 1, s.at("seeds"), "must be at least 1");
  require(h.test_tasks >= 1, s.at("test_tasks"), "must be at least 1");
  require(h.eval_every >= 1, s.at("eval_every"), "must be at least 1");
  require(h.attempt_cap >= 1, s.at("attempt_cap"), "must be at least 1");
  require(h.yield_cap >= 50, s.at("yield_cap"), "must be at least 50");
  require(h.epsilon >= 0.0 && h.epsilon < 1.0, s.at("epsilon"), "must lie in [0, 1)");
  require(h.gamma > 0.0 && h.gamma < 1.0, s.at("gamma"), "must lie in (0, 1)");
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig cfg;
  Section root(doc, "");
  root.read("seed", cfg.seed, 0);
  root.read("out", cfg.out);
  if (const json* t = root.find("task")) parse_task(Section(*t, "task"), cfg.task);
  if (const json* l = root.find("learner")) parse_learner(Section(*l, "learner"), cfg.learner);
  if (const json* s = root.find("sampler")) parse_sampler(Section(*s, "sampler"), cfg.sampler);
  if (const json* h = root.find("harness")) parse_harness(Section(*h, "harness"), cfg.harness);
  root.finish();
  // Catch geometric problems (e.g. a volume too large for the dimension) early.
  try {
    make_task(cfg);
  } catch (const Error& e) {
    throw ConfigError("task", e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["out"] = c.out;
  j["task"] = {{"kind", c.task.kind},       {"d_theta", c.task.d_theta}, {"d_alpha", c.task.d_alpha},
               {"volume", c.task.volume},   {"noise", c.task.noise},     {"shape", c.task.shape},
               {"tau", c.task.tau},         {"falloff", c.task.falloff}, {"drift", c.task.drift}};
  j["learner"] = {{"kernel", c.learner.kernel},
                  {"restarts", c.learner.restarts},
                  {"budget", c.learner.budget},
                  {"n_seed", c.learner.n_seed},
                  {"strategy", c.learner.strategy},
                  {"refit_every", c.learner.refit_every},
                  {"max_iterations", c.learner.max_iterations},
                  {"candidates", c.learner.candidates},
                  {"scale_max", c.learner.scale_max}};
  j["sampler"] = {{"streams", c.sampler.streams},
                  {"batch", c.sampler.batch},
                  {"target", c.sampler.target},
                  {"quantile", c.sampler.quantile},
                  {"pi_scheme", c.sampler.pi_scheme},
                  {"carry_variance", c.sampler.carry_variance},
                  {"anchor_first", c.sampler.anchor_first},
                  {"diversity_noise", c.sampler.diversity_noise},
                  {"round_cap", c.sampler.round_cap}};
  j["harness"] = {{"seeds", c.harness.seeds},
                  {"test_tasks", c.harness.test_tasks},
                  {"training_tasks", c.harness.training_tasks},
                  {"eval_every", c.harness.eval_every},
                  {"attempt_cap", c.harness.attempt_cap},
                  {"yield_cap", c.harness.yield_cap},
                  {"epsilon", c.harness.epsilon},
                  {"gamma", c.harness.gamma},
                  {"learn_set", c.harness.learn_set}};
  return j;
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = to_json(cfg).dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SyntheticTask make_task(const ExperimentConfig& cfg) {
  const TaskSpec& t = cfg.task;
  const std::uint64_t seed = Rng::derive(cfg.seed, 0x7a5c);
  SyntheticTask task = make_task(t.kind, t.d_theta, t.d_alpha, t.volume, t.noise, seed);
  if (task.region == RegionKind::Ellipsoid) {
    task.falloff = t.falloff;
    task.drift = t.drift;
    if (!t.shape.empty()) {
      task.shape.kind = shape_kind_from_string(t.shape);
      if (task.shape.kind == ShapeKind::Push) task.shape.goal = Vector::Zero(2);
    }
    task.shape.tau = t.tau;
  }
  task.validate();
  return task;
}

ActiveLearningConfig make_learner(const ExperimentConfig& cfg) {
  const LearnerSpec& l = cfg.learner;
  ActiveLearningConfig al;
  al.strategy = strategy_from_string(l.strategy);
  al.fit.kind = kernel_kind_from_string(l.kernel);
  al.fit.restarts = l.restarts;
  al.fit.max_iterations = l.max_iterations;
  al.fit.bounds.scale_max = l.scale_max;
  al.fit.seed = Rng::derive(cfg.seed, 2);
  al.refit_every = l.refit_every;
  al.n_seed = l.n_seed;
  al.search.candidates = l.candidates;
  al.seed = Rng::derive(cfg.seed, 1);
  return al;
}

DiverseConfig make_diverse(const ExperimentConfig& cfg) {
  DiverseConfig d;
  d.adaptive.buffer.batch = cfg.sampler.batch;
  d.adaptive.buffer.target = cfg.sampler.target;
  d.adaptive.buffer.round_cap = cfg.sampler.round_cap;
  d.adaptive.carry_variance = cfg.sampler.carry_variance;
  d.anchor_first = cfg.sampler.anchor_first;
  return d;
}

Task1Config make_task1(const ExperimentConfig& cfg) {
  Task1Config t;
  const HarnessSpec& h = cfg.harness;
  t.seeds = h.seeds;
  t.training_tasks = h.training_tasks;
  t.test_tasks = h.test_tasks;
  t.eval_every = h.eval_every;
  t.attempt_cap = h.attempt_cap;
  t.epsilon = h.epsilon;
  t.gamma = h.gamma;
  t.seed = cfg.seed;
  t.diverse = make_diverse(cfg);
  t.learn_set = h.learn_set;
  t.gp_budget = cfg.learner.budget;
  t.quantile = cfg.sampler.quantile;
  const ActiveLearningConfig al = make_learner(cfg);
  t.fit = al.fit;
  t.search = al.search;
  return t;
}

}  // namespace lss
