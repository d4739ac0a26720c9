#include "calr/core/embedding_io.hpp"

#include "calr/core/error.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>

namespace calr {
namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::map<std::string, std::string> read_header(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open embedding header " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw IoError("embedding header " + path.string() + ": malformed line '" + line + "'");
    }
    kv[trim(line.substr(0, colon))] = trim(line.substr(colon + 1));
  }
  return kv;
}

long long header_int(const std::map<std::string, std::string>& kv, const std::string& key,
                     const fs::path& path) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw IoError("embedding header " + path.string() + ": missing " + key);
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(it->second, &pos);
    if (pos != it->second.size() || v < 0) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw IoError("embedding header " + path.string() + ": bad value for " + key + ": '" +
                  it->second + "'");
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::int64_t parse_i64(const std::string& s, const fs::path& path, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError(path.string() + ":" + std::to_string(line_no) + ": not an integer: '" + s + "'");
  }
}

}  // namespace

EmbeddingFiles EmbeddingFiles::at(const fs::path& prefix) {
  auto with = [&](const char* ext) {
    fs::path p = prefix;
    p += ext;
    return p;
  };
  return {with(".hdr"), with(".bin"), with(".csv")};
}

void write_f32_blob(const fs::path& path, std::span<const double> values) {
  std::vector<char> bytes(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(values[i]));
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
    std::memcpy(bytes.data() + 4 * i, &bits, 4);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

std::vector<double> read_f32_blob(const fs::path& path, std::size_t expected_count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() != expected_count * 4) {
    throw IoError(path.string() + ": expected " + std::to_string(expected_count * 4) +
                  " bytes, found " + std::to_string(bytes.size()));
  }
  std::vector<double> values(expected_count);
  for (std::size_t i = 0; i < expected_count; ++i) {
    std::uint32_t bits;
    std::memcpy(&bits, bytes.data() + 4 * i, 4);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
    values[i] = static_cast<double>(std::bit_cast<float>(bits));
  }
  return values;
}

void save_embeddings(const EmbeddingDataset& dataset, const fs::path& prefix) {
  const auto files = EmbeddingFiles::at(prefix);
  {
    std::ofstream hdr(files.header, std::ios::trunc);
    if (!hdr) throw IoError("cannot write " + files.header.string());
    hdr << "n_samples: " << dataset.size() << "\n"
        << "dim: " << dataset.dim() << "\n"
        << "n_cameras: " << dataset.n_cameras() << "\n";
  }
  const Matrix& f = dataset.features();
  write_f32_blob(files.blob, std::span<const double>(f.data(), static_cast<std::size_t>(f.size())));
  std::ofstream csv(files.metadata, std::ios::trunc);
  if (!csv) throw IoError("cannot write " + files.metadata.string());
  csv << "sample_id,camera_id,gt_id\n";
  for (const auto& s : dataset.samples()) {
    csv << s.sample_id << ',' << s.camera_id << ',';
    if (s.gt_id) csv << *s.gt_id;
    csv << '\n';
  }
}

EmbeddingDataset load_embeddings(const fs::path& prefix) {
  const auto files = EmbeddingFiles::at(prefix);
  const auto kv = read_header(files.header);
  const auto n = static_cast<std::size_t>(header_int(kv, "n_samples", files.header));
  const auto dim = static_cast<std::size_t>(header_int(kv, "dim", files.header));
  const auto n_cameras = static_cast<int>(header_int(kv, "n_cameras", files.header));

  const auto values = read_f32_blob(files.blob, n * dim);
  Matrix features(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  std::copy(values.begin(), values.end(), features.data());

  std::ifstream csv(files.metadata);
  if (!csv) throw IoError("cannot open " + files.metadata.string());
  std::string line;
  std::getline(csv, line);
  if (trim(line) != "sample_id,camera_id,gt_id") {
    throw IoError(files.metadata.string() + ": unexpected header '" + trim(line) + "'");
  }
  std::vector<Sample> samples;
  samples.reserve(n);
  std::size_t line_no = 1;
  while (std::getline(csv, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(trim(line));
    if (cells.size() != 3) {
      throw IoError(files.metadata.string() + ":" + std::to_string(line_no) +
                    ": expected 3 columns");
    }
    Sample s;
    s.sample_id = parse_i64(cells[0], files.metadata, line_no);
    s.camera_id = static_cast<CameraId>(parse_i64(cells[1], files.metadata, line_no));
    if (!cells[2].empty()) s.gt_id = static_cast<int>(parse_i64(cells[2], files.metadata, line_no));
    samples.push_back(s);
  }
  if (samples.size() != n) {
    throw IoError(files.metadata.string() + ": " + std::to_string(samples.size()) +
                  " rows, header says " + std::to_string(n));
  }
  try {
    return EmbeddingDataset(std::move(features), std::move(samples), n_cameras);
  } catch (const InvalidArgument& e) {
    throw IoError(prefix.string() + ": " + e.what());
  }
}

void save_assignment_csv(const EmbeddingDataset& dataset, const ClusterAssignment& assignment,
                         const fs::path& path) {
  assignment.validate_against(dataset);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "sample_id,cluster_id\n";
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    out << dataset.samples()[i].sample_id << ',' << assignment[i] << '\n';
  }
}

ClusterAssignment load_assignment_csv(const EmbeddingDataset& dataset, const fs::path& path,
                                      AssignmentScope scope) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::unordered_map<std::int64_t, std::size_t> row_of;
  for (std::size_t i = 0; i < dataset.size(); ++i) row_of[dataset.samples()[i].sample_id] = i;

  std::vector<int> raw(dataset.size(), kOutlier);
  std::string line;
  std::getline(in, line);
  if (trim(line) != "sample_id,cluster_id") {
    throw IoError(path.string() + ": unexpected header '" + trim(line) + "'");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(trim(line));
    if (cells.size() != 2) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected 2 columns");
    }
    const auto id = parse_i64(cells[0], path, line_no);
    const auto it = row_of.find(id);
    if (it == row_of.end()) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": unknown sample_id " +
                    std::to_string(id));
    }
    raw[it->second] = static_cast<int>(parse_i64(cells[1], path, line_no));
  }
  // Preserve the stored ids when they are already contiguous.
  ClusterAssignment a;
  try {
    a = ClusterAssignment(std::vector<ClusterId>(raw.begin(), raw.end()), scope);
  } catch (const InvalidArgument&) {
    a = ClusterAssignment::from_raw(raw, scope);
  }
  a.validate_against(dataset);
  return a;
}

}  // namespace calr
