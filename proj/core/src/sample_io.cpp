#include "vcmc/sample_io.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vcmc {

namespace {

constexpr char kMagic[8] = {'V', 'C', 'M', 'C', 'S', 'S', '0', '1'};

std::string mode_name(TemperingMode mode) {
  return mode.kind == TemperingMode::Kind::Subposterior ? "subposterior" : "partial";
}

TemperingMode mode_from(const std::string& name, int k) {
  if (name == "subposterior") return TemperingMode::subposterior(k);
  if (name == "partial") return TemperingMode::partial_posterior();
  throw std::invalid_argument("unknown tempering mode: " + name);
}

template <typename T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T take(const std::string& in, std::size_t& offset) {
  if (offset + sizeof(T) > in.size()) {
    throw std::runtime_error("sample file truncated");
  }
  T value;
  std::memcpy(&value, in.data() + offset, sizeof(T));
  offset += sizeof(T);
  return value;
}

}  // namespace

std::string sample_file_format_name(SampleFileFormat format) {
  return format == SampleFileFormat::Binary ? "binary" : "csv";
}

SampleFileFormat sample_file_format_from_name(const std::string& name) {
  if (name == "binary") return SampleFileFormat::Binary;
  if (name == "csv") return SampleFileFormat::Csv;
  throw std::invalid_argument("unknown sample file format: " + name);
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_sample_file(const std::string& path, const SampleFileHeader& header,
                       const std::vector<Eigen::VectorXd>& draws, SampleFileFormat format) {
  const int dim = header.shape.size();
  if (header.draw_count != draws.size()) {
    throw std::invalid_argument("write_sample_file: draw count mismatch");
  }
  for (const auto& v : draws) {
    if (v.size() != dim) throw std::invalid_argument("write_sample_file: draw length mismatch");
  }

  std::string out;
  if (format == SampleFileFormat::Binary) {
    out.reserve(64 + draws.size() * dim * sizeof(double));
    out.append(kMagic, sizeof(kMagic));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(header.model));
    put<std::int32_t>(out, header.shape.rows);
    put<std::int32_t>(out, header.shape.cols);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(header.num_partitions));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(header.partition));
    put<std::uint64_t>(out, header.draw_count);
    put<std::uint64_t>(out, header.seed);
    put<std::uint32_t>(out, header.mode.kind == TemperingMode::Kind::Subposterior ? 0u : 1u);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(header.mode.num_partitions));
    for (const auto& v : draws) {
      for (int j = 0; j < dim; ++j) put<double>(out, v[j]);
    }
  } else {
    std::ostringstream ss;
    ss << "model,rows,cols,K,k,T,seed,mode,mode_K\n"
       << model_kind_name(header.model) << ',' << header.shape.rows << ',' << header.shape.cols
       << ',' << header.num_partitions << ',' << header.partition << ',' << header.draw_count
       << ',' << header.seed << ',' << mode_name(header.mode) << ','
       << header.mode.num_partitions << '\n';
    char buf[32];
    for (const auto& v : draws) {
      for (int j = 0; j < dim; ++j) {
        std::snprintf(buf, sizeof(buf), "%.17g", v[j]);
        ss << buf << (j + 1 == dim ? '\n' : ',');
      }
    }
    out = ss.str();
  }
  write_file_atomic(path, out);
}

SampleFile read_sample_file(const std::string& path) {
  const std::string content = read_file(path);
  SampleFile file;

  if (content.size() >= sizeof(kMagic) &&
      std::memcmp(content.data(), kMagic, sizeof(kMagic)) == 0) {
    std::size_t offset = sizeof(kMagic);
    file.header.model = static_cast<ModelKind>(take<std::uint32_t>(content, offset));
    file.header.shape.rows = take<std::int32_t>(content, offset);
    file.header.shape.cols = take<std::int32_t>(content, offset);
    file.header.num_partitions = static_cast<int>(take<std::uint32_t>(content, offset));
    file.header.partition = static_cast<int>(take<std::uint32_t>(content, offset));
    file.header.draw_count = take<std::uint64_t>(content, offset);
    file.header.seed = take<std::uint64_t>(content, offset);
    const auto mode_tag = take<std::uint32_t>(content, offset);
    const auto mode_k = static_cast<int>(take<std::uint32_t>(content, offset));
    file.header.mode = mode_tag == 0 ? TemperingMode::subposterior(mode_k)
                                     : TemperingMode::partial_posterior();
    const int dim = file.header.shape.size();
    file.draws.resize(file.header.draw_count, Eigen::VectorXd(dim));
    for (auto& v : file.draws) {
      for (int j = 0; j < dim; ++j) v[j] = take<double>(content, offset);
    }
    return file;
  }

  // CSV fallback.
  std::istringstream ss(content);
  std::string line;
  if (!std::getline(ss, line) || line != "model,rows,cols,K,k,T,seed,mode,mode_K") {
    throw std::runtime_error("sample file: unrecognized header in " + path);
  }
  if (!std::getline(ss, line)) throw std::runtime_error("sample file: missing header row");
  std::istringstream hs(line);
  std::string model_name, mode_tag, field;
  auto next_field = [&](std::istringstream& s) {
    std::string f;
    if (!std::getline(s, f, ',')) throw std::runtime_error("sample file: short header row");
    return f;
  };
  model_name = next_field(hs);
  file.header.model = model_kind_from_name(model_name);
  file.header.shape.rows = std::stoi(next_field(hs));
  file.header.shape.cols = std::stoi(next_field(hs));
  file.header.num_partitions = std::stoi(next_field(hs));
  file.header.partition = std::stoi(next_field(hs));
  file.header.draw_count = std::stoull(next_field(hs));
  file.header.seed = std::stoull(next_field(hs));
  mode_tag = next_field(hs);
  const int mode_k = std::stoi(next_field(hs));
  file.header.mode = mode_from(mode_tag, mode_k);

  const int dim = file.header.shape.size();
  file.draws.reserve(file.header.draw_count);
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    Eigen::VectorXd v(dim);
    std::istringstream ls(line);
    for (int j = 0; j < dim; ++j) {
      v[j] = std::stod(next_field(ls));
    }
    file.draws.push_back(std::move(v));
  }
  if (file.draws.size() != file.header.draw_count) {
    throw std::runtime_error("sample file: row count does not match T in " + path);
  }
  return file;
}

std::string sample_file_name(int partition, SampleFileFormat format) {
  return "samples_k" + std::to_string(partition) +
         (format == SampleFileFormat::Binary ? ".bin" : ".csv");
}

void write_sample_set(const std::string& dir, ModelKind model,
                      const SubposteriorSampleSet& samples, SampleFileFormat format) {
  std::filesystem::create_directories(dir);
  for (int k = 0; k < samples.K(); ++k) {
    SampleFileHeader header;
    header.model = model;
    header.shape = samples.shape;
    header.num_partitions = samples.K();
    header.partition = k;
    header.draw_count = samples.draws[k].size();
    header.seed = samples.seeds[k];
    header.mode = samples.mode;
    write_sample_file(dir + "/" + sample_file_name(k, format), header, samples.draws[k],
                      format);
  }
}

SubposteriorSampleSet read_sample_set(const std::string& dir, int num_partitions,
                                      SampleFileFormat format, ModelKind* model_out) {
  SubposteriorSampleSet set;
  for (int k = 0; k < num_partitions; ++k) {
    SampleFile file = read_sample_file(dir + "/" + sample_file_name(k, format));
    if (k == 0) {
      set.shape = file.header.shape;
      set.mode = file.header.mode;
      if (model_out) *model_out = file.header.model;
    } else if (!(file.header.shape == set.shape)) {
      throw std::runtime_error("sample set: inconsistent shapes in " + dir);
    }
    if (file.header.num_partitions != num_partitions || file.header.partition != k) {
      throw std::runtime_error("sample set: partition header mismatch in " + dir);
    }
    set.draws.push_back(std::move(file.draws));
    set.seeds.push_back(file.header.seed);
  }
  set.truncate_to_common_length();
  return set;
}

int CsvTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return static_cast<int>(i);
  }
  return -1;
}

CsvTable load_csv_table(const std::string& path) {
  const std::string content = read_file(path);
  std::istringstream ss(content);
  std::string line;
  if (!std::getline(ss, line)) throw std::runtime_error("csv: empty file " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  CsvTable table;
  {
    std::istringstream hs(line);
    std::string name;
    while (std::getline(hs, name, ',')) table.columns.push_back(name);
  }
  const int cols = static_cast<int>(table.columns.size());
  std::vector<double> data;
  int rows = 0;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    int c = 0;
    while (std::getline(ls, field, ',')) {
      data.push_back(std::stod(field));
      ++c;
    }
    if (c != cols) throw std::runtime_error("csv: ragged row in " + path);
    ++rows;
  }
  table.values = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                          Eigen::RowMajor>>(data.data(), rows, cols);
  return table;
}

}  // namespace vcmc
