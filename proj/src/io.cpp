#include "lss/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace lss {

using nlohmann::json;

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  return out;
}

void write_meta(std::ostream& out, const OutputMeta& meta) {
  out << "# config_hash: " << meta.config_hash << '\n';
  out << "# seed: " << meta.seed << '\n';
  out << "# version: " << kArtifactVersion << '\n';
  for (const auto& [k, v] : meta.extra) out << "# " << k << ": " << v << '\n';
}

std::string join(const std::vector<std::string>& parts) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) s += ',';
    s += parts[i];
  }
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(where + ": '" + s + "' is not a number");
  }
}

std::string meta_value(const CsvTable& t, const std::string& key) {
  for (const auto& [k, v] : t.meta)
    if (k == key) return v;
  return {};
}

}  // namespace

void write_csv(const std::string& path, const OutputMeta& meta, const std::vector<std::string>& columns,
               const std::vector<CsvRow>& rows) {
  std::ofstream out = open_out(path);
  write_meta(out, meta);
  out << "# columns: " << join(columns) << '\n';
  out << join(columns) << '\n';
  for (const auto& r : rows) {
    if (r.size() != columns.size()) throw DimensionError("write_csv: row width differs from the header");
    out << join(r) << '\n';
  }
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read '" + path + "'");
  CsvTable t;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon != std::string::npos) {
        std::string key = line.substr(1, colon - 1);
        std::string value = line.substr(colon + 1);
        key.erase(0, key.find_first_not_of(' '));
        value.erase(0, value.find_first_not_of(' '));
        t.meta.emplace_back(key, value);
      }
      continue;
    }
    if (!header) {
      t.columns = split(line);
      header = true;
      continue;
    }
    auto row = split(line);
    if (row.size() != t.columns.size()) throw Error(path + ": row width differs from the header");
    t.rows.push_back(std::move(row));
  }
  if (!header) throw Error(path + ": no header row");
  return t;
}

void write_dataset(const std::string& path, const Dataset& data, std::size_t theta_dim, const OutputMeta& meta) {
  const std::size_t dim = data.dim();
  if (!data.empty() && dim < theta_dim) throw DimensionError("write_dataset: theta_dim exceeds the input dimension");
  OutputMeta m = meta;
  m.extra.emplace_back("theta_dim", std::to_string(theta_dim));
  m.extra.emplace_back("noise_std", format_number(data.noise_std));
  std::vector<std::string> columns;
  for (std::size_t i = 0; i < theta_dim; ++i) columns.push_back("theta_" + std::to_string(i));
  for (std::size_t i = theta_dim; i < dim; ++i) columns.push_back("alpha_" + std::to_string(i - theta_dim));
  columns.push_back("y");
  std::vector<CsvRow> rows;
  for (std::size_t r = 0; r < data.size(); ++r) {
    CsvRow row;
    for (Eigen::Index i = 0; i < data.points[r].size(); ++i) row.push_back(format_number(data.points[r][i]));
    row.push_back(format_number(data.values[r]));
    rows.push_back(std::move(row));
  }
  write_csv(path, m, columns, rows);
}

Dataset read_dataset(const std::string& path, std::size_t* theta_dim) {
  const CsvTable t = read_csv(path);
  if (t.columns.empty() || t.columns.back() != "y") throw Error(path + ": last column must be y");
  Dataset d;
  const std::string noise = meta_value(t, "noise_std");
  d.noise_std = noise.empty() ? 0.0 : parse_number(noise, path + ": noise_std");
  if (theta_dim) {
    const std::string td = meta_value(t, "theta_dim");
    *theta_dim = td.empty() ? t.columns.size() - 1 : static_cast<std::size_t>(parse_number(td, path));
  }
  for (const auto& row : t.rows) {
    Vector x(static_cast<Eigen::Index>(row.size() - 1));
    for (std::size_t i = 0; i + 1 < row.size(); ++i) x[static_cast<Eigen::Index>(i)] = parse_number(row[i], path);
    d.add(std::move(x), parse_number(row.back(), path));
  }
  d.validate();
  return d;
}

void save_model(const std::string& path, const ModelFile& model, const OutputMeta& meta) {
  json j;
  j["config_hash"] = meta.config_hash;
  j["seed"] = meta.seed;
  j["version"] = kArtifactVersion;
  j["kernel"] = {{"kind", to_string(model.kernel.kind)},
                 {"variance", model.kernel.variance},
                 {"length_scales", to_std(model.kernel.length_scales)}};
  j["noise_std"] = model.data.noise_std;
  j["theta_dim"] = model.theta_dim;
  j["alpha_dim"] = model.alpha_dim;
  json pts = json::array();
  for (const Vector& p : model.data.points) pts.push_back(to_std(p));
  j["inputs"] = pts;
  j["targets"] = model.data.values;
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read model '" + path + "'");
  ModelFile m;
  try {
    const json j = json::parse(in);
    m.kernel.kind = kernel_kind_from_string(j.at("kernel").at("kind").get<std::string>());
    m.kernel.variance = j.at("kernel").at("variance").get<double>();
    m.kernel.length_scales = to_vector(j.at("kernel").at("length_scales").get<std::vector<double>>());
    m.theta_dim = j.at("theta_dim").get<std::size_t>();
    m.alpha_dim = j.at("alpha_dim").get<std::size_t>();
    m.data.noise_std = j.at("noise_std").get<double>();
    const auto targets = j.at("targets").get<std::vector<double>>();
    const auto& inputs = j.at("inputs");
    if (inputs.size() != targets.size()) throw Error("inputs and targets differ in length");
    for (std::size_t i = 0; i < targets.size(); ++i)
      m.data.add(to_vector(inputs[i].get<std::vector<double>>()), targets[i]);
  } catch (const json::exception& e) {
    throw Error("malformed model '" + path + "': " + e.what());
  }
  m.kernel.validate();
  m.data.validate();
  if (m.kernel.input_dim() != m.theta_dim + m.alpha_dim)
    throw DimensionError("model '" + path + "': kernel dimension differs from theta_dim + alpha_dim");
  if (!m.data.empty() && m.data.dim() != m.theta_dim + m.alpha_dim)
    throw DimensionError("model '" + path + "': input width differs from theta_dim + alpha_dim");
  return m;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out = open_out(path);
  out << text;
}

}  // namespace lss
