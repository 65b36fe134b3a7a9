#pragma once

#include <string>
#include <vector>

#include "vcmc/models.hpp"
#include "vcmc/sample_set.hpp"

namespace vcmc {

enum class SampleFileFormat { Binary, Csv };

std::string sample_file_format_name(SampleFileFormat format);
SampleFileFormat sample_file_format_from_name(const std::string& name);

struct SampleFileHeader {
  ModelKind model = ModelKind::Probit;
  ParamShape shape;
  int num_partitions = 1;  // K
  int partition = 0;       // k
  std::uint64_t draw_count = 0;
  std::uint64_t seed = 0;
  TemperingMode mode;
};

/// One partition's draws: fixed header then one flattened parameter per row,
/// little-endian float64 or full-precision decimal CSV.
void write_sample_file(const std::string& path, const SampleFileHeader& header,
                       const std::vector<Eigen::VectorXd>& draws, SampleFileFormat format);

struct SampleFile {
  SampleFileHeader header;
  std::vector<Eigen::VectorXd> draws;
};
SampleFile read_sample_file(const std::string& path);

/// Per-partition file name within a sample directory.
std::string sample_file_name(int partition, SampleFileFormat format);

/// Write/read a whole sample set as one file per partition under `dir`.
void write_sample_set(const std::string& dir, ModelKind model,
                      const SubposteriorSampleSet& samples, SampleFileFormat format);
SubposteriorSampleSet read_sample_set(const std::string& dir, int num_partitions,
                                      SampleFileFormat format, ModelKind* model_out = nullptr);

// Small file helpers shared by the persistence paths: atomic whole-file write
// (temp file + rename) and whole-file read.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// Numeric CSV with a header row of column names.
struct CsvTable {
  std::vector<std::string> columns;
  Eigen::MatrixXd values;

  int column_index(const std::string& name) const;  // -1 when absent
};
CsvTable load_csv_table(const std::string& path);

}  // namespace vcmc
