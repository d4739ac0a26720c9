#include "calr/synthgen/synthgen.hpp"

#include "calr/core/error.hpp"
#include "calr/core/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace calr::synth {
namespace {

Vector random_direction(Rng& rng, int dim) {
  Vector v(dim);
  double norm = 0.0;
  do {
    for (int i = 0; i < dim; ++i) v[i] = rng.normal();
    norm = v.norm();
  } while (norm == 0.0);
  return v / norm;
}

std::vector<Vector> draw_centers(Rng& rng, int count, int dim, double radius) {
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(radius * random_direction(rng, dim));
  return out;
}

EmbeddingDataset sample_dataset(const SynthConfig& c, const std::vector<Vector>& centers,
                                const std::vector<Vector>& offsets, Rng& rng, int gt_base) {
  std::vector<Vector> rows;
  std::vector<Sample> samples;
  std::vector<int> per_camera(static_cast<std::size_t>(c.n_cameras), 0);
  for (std::size_t id = 0; id < centers.size(); ++id) {
    for (int cam = 0; cam < c.n_cameras; ++cam) {
      // Always consume the same number of draws per pair so that toggling
      // missing_rate does not reshuffle unrelated samples.
      const bool missing = rng.uniform() < c.missing_rate;
      const auto span = static_cast<std::uint64_t>(c.samples_max - c.samples_min + 1);
      const int count = c.samples_min + static_cast<int>(rng.uniform_index(span));
      if (missing) continue;
      for (int s = 0; s < count; ++s) {
        Vector x = centers[id] + offsets[static_cast<std::size_t>(cam)];
        for (int d = 0; d < c.dim; ++d) x[d] += c.noise * rng.normal();
        const double norm = x.norm();
        if (norm == 0.0) {
          throw InvalidArgument("synth: generated a zero vector; increase id_spread or noise");
        }
        rows.push_back(x / norm);
        samples.push_back(Sample{static_cast<std::int64_t>(samples.size()), cam,
                                 gt_base + static_cast<int>(id)});
        ++per_camera[static_cast<std::size_t>(cam)];
      }
    }
  }
  for (int cam = 0; cam < c.n_cameras; ++cam) {
    if (per_camera[static_cast<std::size_t>(cam)] == 0) {
      throw InvalidArgument("synth: camera " + std::to_string(cam) + " received no samples");
    }
  }
  if (rows.size() < 2) throw InvalidArgument("synth: fewer than 2 samples generated");

  Matrix features(static_cast<Eigen::Index>(rows.size()), c.dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    features.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  }
  return EmbeddingDataset(std::move(features), std::move(samples), c.n_cameras);
}

}  // namespace

void SynthConfig::validate() const {
  auto fail = [](const std::string& msg) { throw InvalidArgument("synth config: " + msg); };
  if (n_identities < 1) fail("n_identities must be >= 1");
  if (n_cameras < 1) fail("n_cameras must be >= 1");
  if (samples_min < 1 || samples_max < samples_min) fail("need 1 <= samples_min <= samples_max");
  if (dim < 1) fail("dim must be >= 1");
  if (!(id_spread >= 0.0) || !(noise >= 0.0)) fail("id_spread and noise must be >= 0");
  if (!(cam_shift >= 0.0)) fail("cam_shift must be >= 0");
  if (!(missing_rate >= 0.0 && missing_rate < 1.0)) fail("missing_rate must be in [0, 1)");
  if (n_test_identities < 0) fail("n_test_identities must be >= 0");
}

SynthConfig standard_benchmark() {
  SynthConfig c;
  c.n_identities = 50;
  c.n_cameras = 6;
  c.samples_min = 4;
  c.samples_max = 8;
  c.dim = 32;
  c.id_spread = 1.0;
  c.cam_shift = 3.0;
  c.seed = 7;
  c.n_test_identities = 50;
  return c;
}

EmbeddingDataset generate(const SynthConfig& config) { return generate_bundle(config).train; }

SynthBundle generate_bundle(const SynthConfig& config) {
  config.validate();
  Rng id_rng(config.seed, streams::kSynthIdentities);
  Rng cam_rng(config.seed, streams::kSynthCameras);
  Rng sample_rng(config.seed, streams::kSynthSamples);

  const auto offsets = draw_centers(cam_rng, config.n_cameras, config.dim, config.cam_shift);
  const auto train_centers = draw_centers(id_rng, config.n_identities, config.dim, config.id_spread);
  SynthBundle bundle{sample_dataset(config, train_centers, offsets, sample_rng, 0), std::nullopt};
  if (config.n_test_identities > 0) {
    Rng test_id_rng = id_rng.split(1);
    Rng test_sample_rng = sample_rng.split(1);
    const auto test_centers =
        draw_centers(test_id_rng, config.n_test_identities, config.dim, config.id_spread);
    bundle.test =
        sample_dataset(config, test_centers, offsets, test_sample_rng, config.n_identities);
  }
  return bundle;
}

QueryGallerySplit split_query_gallery(const EmbeddingDataset& dataset, Rng& rng,
                                      double query_fraction) {
  if (!(query_fraction > 0.0 && query_fraction < 1.0)) {
    throw InvalidArgument("split: query_fraction must be in (0, 1)");
  }
  const auto gt = dataset.gt_labels();
  std::map<int, std::vector<std::size_t>> by_id;
  for (std::size_t i = 0; i < gt.size(); ++i) by_id[gt[i]].push_back(i);

  QueryGallerySplit split;
  for (auto& [id, rows] : by_id) {
    std::set<CameraId> cams;
    for (auto r : rows) cams.insert(dataset.samples()[r].camera_id);
    if (cams.size() < 2) {
      split.gallery.insert(split.gallery.end(), rows.begin(), rows.end());
      continue;
    }
    rng.shuffle(std::span<std::size_t>(rows));
    // Pin the first sample and the first sample from another camera to the gallery.
    const CameraId first_cam = dataset.samples()[rows[0]].camera_id;
    const auto other = std::find_if(rows.begin(), rows.end(), [&](std::size_t r) {
      return dataset.samples()[r].camera_id != first_cam;
    });
    std::iter_swap(rows.begin() + 1, other);

    const auto n = static_cast<long>(rows.size());
    const long want = std::lround(query_fraction * static_cast<double>(n));
    const long n_query = std::clamp<long>(want, 1, n - 2);
    for (long i = 0; i < n; ++i) {
      (i >= 2 && i < 2 + n_query ? split.query : split.gallery).push_back(rows[static_cast<std::size_t>(i)]);
    }
  }
  if (split.query.empty()) {
    throw InvalidArgument("split: no identity appears under two or more cameras");
  }
  std::sort(split.query.begin(), split.query.end());
  std::sort(split.gallery.begin(), split.gallery.end());
  return split;
}

void save_split_csv(const EmbeddingDataset& dataset, const QueryGallerySplit& split,
                    const std::filesystem::path& path) {
  std::vector<const char*> role(dataset.size(), nullptr);
  for (auto q : split.query) role.at(q) = "query";
  for (auto g : split.gallery) role.at(g) = "gallery";
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "sample_id,role\n";
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (role[i]) out << dataset.samples()[i].sample_id << ',' << role[i] << '\n';
  }
}

QueryGallerySplit load_split_csv(const EmbeddingDataset& dataset,
                                 const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::unordered_map<std::int64_t, std::size_t> row_of;
  for (std::size_t i = 0; i < dataset.size(); ++i) row_of[dataset.samples()[i].sample_id] = i;
  std::string line;
  std::getline(in, line);
  if (line != "sample_id,role") throw IoError(path.string() + ": unexpected header");
  QueryGallerySplit split;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw IoError(path.string() + ": malformed line '" + line + "'");
    std::int64_t id = 0;
    try {
      id = std::stoll(line.substr(0, comma));
    } catch (const std::exception&) {
      throw IoError(path.string() + ": bad sample_id in '" + line + "'");
    }
    const auto it = row_of.find(id);
    if (it == row_of.end()) throw IoError(path.string() + ": unknown sample_id " + std::to_string(id));
    const std::string role = line.substr(comma + 1);
    if (role == "query") {
      split.query.push_back(it->second);
    } else if (role == "gallery") {
      split.gallery.push_back(it->second);
    } else {
      throw IoError(path.string() + ": unknown role '" + role + "'");
    }
  }
  std::sort(split.query.begin(), split.query.end());
  std::sort(split.gallery.begin(), split.gallery.end());
  return split;
}

std::string to_text(const SynthConfig& c) {
  std::ostringstream out;
  out << "synth.n_identities: " << c.n_identities << "\n"
      << "synth.n_cameras: " << c.n_cameras << "\n"
      << "synth.samples_min: " << c.samples_min << "\n"
      << "synth.samples_max: " << c.samples_max << "\n"
      << "synth.dim: " << c.dim << "\n"
      << "synth.id_spread: " << shortest_repr(c.id_spread) << "\n"
      << "synth.cam_shift: " << shortest_repr(c.cam_shift) << "\n"
      << "synth.noise: " << shortest_repr(c.noise) << "\n"
      << "synth.missing_rate: " << shortest_repr(c.missing_rate) << "\n"
      << "synth.seed: " << c.seed << "\n"
      << "synth.n_test_identities: " << c.n_test_identities << "\n";
  return out.str();
}

SynthConfig synth_config_from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs) {
  SynthConfig c;
  for (const auto& [raw_key, value] : pairs) {
    const std::string key = raw_key.rfind("synth.", 0) == 0 ? raw_key.substr(6) : raw_key;
    auto as_int = [&] {
      std::size_t pos = 0;
      const int v = std::stoi(value, &pos);
      if (pos != value.size()) throw std::invalid_argument(value);
      return v;
    };
    auto as_double = [&] {
      std::size_t pos = 0;
      const double v = std::stod(value, &pos);
      if (pos != value.size()) throw std::invalid_argument(value);
      return v;
    };
    try {
      if (key == "n_identities") c.n_identities = as_int();
      else if (key == "n_cameras") c.n_cameras = as_int();
      else if (key == "samples_min") c.samples_min = as_int();
      else if (key == "samples_max") c.samples_max = as_int();
      else if (key == "dim") c.dim = as_int();
      else if (key == "id_spread") c.id_spread = as_double();
      else if (key == "cam_shift") c.cam_shift = as_double();
      else if (key == "noise") c.noise = as_double();
      else if (key == "missing_rate") c.missing_rate = as_double();
      else if (key == "seed") c.seed = std::stoull(value);
      else if (key == "n_test_identities") c.n_test_identities = as_int();
      else throw InvalidArgument("synth config: unknown key '" + raw_key + "'");
    } catch (const InvalidArgument&) {
      throw;
    } catch (const std::exception&) {
      throw InvalidArgument("synth config: bad value for '" + raw_key + "': '" + value + "'");
    }
  }
  c.validate();
  return c;
}

}  // namespace calr::synth
