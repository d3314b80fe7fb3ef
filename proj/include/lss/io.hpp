#ifndef LSS_IO_HPP
#define LSS_IO_HPP

#include <string>
#include <utility>
#include <vector>

#include "lss/gp.hpp"

namespace lss {

inline constexpr const char* kArtifactVersion = "0.1.0";

/// Provenance written as "# key: value" lines at the top of every output file.
struct OutputMeta {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> extra;
};

/// Shortest round-trip decimal for a double (%.17g).
std::string format_number(double v);

using CsvRow = std::vector<std::string>;

/// Writes provenance lines, a "# columns:" schema line, the header row, then rows.
void write_csv(const std::string& path, const OutputMeta& meta, const std::vector<std::string>& columns,
               const std::vector<CsvRow>& rows);

struct CsvTable {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(const std::string& path);

/// Columns theta_0.., alpha_0.., y; noise and dimensions go into the provenance lines.
void write_dataset(const std::string& path, const Dataset& data, std::size_t theta_dim, const OutputMeta& meta);
Dataset read_dataset(const std::string& path, std::size_t* theta_dim = nullptr);

/// A fitted GP with the data it conditions on.
struct ModelFile {
  KernelSpec kernel;
  Dataset data;
  std::size_t theta_dim = 0;
  std::size_t alpha_dim = 0;
};

void save_model(const std::string& path, const ModelFile& model, const OutputMeta& meta);
/// Throws Error with a description when the file is malformed.
ModelFile load_model(const std::string& path);

void write_text(const std::string& path, const std::string& text);

}  // namespace lss

#endif  // LSS_IO_HPP
