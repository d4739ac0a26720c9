#include "calr/model/checkpoint.hpp"

#include "calr/core/embedding_io.hpp"
#include "calr/core/error.hpp"

#include <fstream>
#include <map>
#include <string>

namespace calr::model {
namespace fs = std::filesystem;

void save_checkpoint(const Checkpoint& ck, const fs::path& prefix) {
  const auto files = EmbeddingFiles::at(prefix);
  const auto& ec = ck.encoder.config();
  if (ck.classifier.input_dim() != ec.output_dim) {
    throw InvalidArgument("checkpoint: classifier input dim does not match encoder output dim");
  }
  {
    std::ofstream hdr(files.header, std::ios::trunc);
    if (!hdr) throw IoError("cannot write " + files.header.string());
    hdr << "arch: " << to_string(ec.arch) << "\n"
        << "input_dim: " << ec.input_dim << "\n"
        << "output_dim: " << ec.output_dim << "\n"
        << "hidden_dim: " << ec.hidden_dim << "\n"
        << "n_cameras: " << ck.classifier.n_cameras() << "\n"
        << "encoder_params: " << ck.encoder.params().size() << "\n"
        << "classifier_params: " << ck.classifier.n_params() << "\n";
  }
  std::vector<double> all(ck.encoder.params().begin(), ck.encoder.params().end());
  all.insert(all.end(), ck.classifier.params().begin(), ck.classifier.params().end());
  write_f32_blob(files.blob, all);
}

Checkpoint load_checkpoint(const fs::path& prefix) {
  const auto files = EmbeddingFiles::at(prefix);
  std::ifstream in(files.header);
  if (!in) throw IoError("cannot open checkpoint header " + files.header.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    auto v = line.substr(colon + 1);
    v.erase(0, v.find_first_not_of(' '));
    kv[line.substr(0, colon)] = v;
  }
  auto get = [&](const char* key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw IoError(files.header.string() + ": missing " + key);
    return it->second;
  };
  auto get_int = [&](const char* key) {
    try {
      return std::stoi(get(key));
    } catch (const std::logic_error&) {
      throw IoError(files.header.string() + ": bad value for " + key);
    }
  };
  EncoderConfig ec;
  try {
    ec.arch = parse_arch(get("arch"));
  } catch (const InvalidArgument& e) {
    throw IoError(files.header.string() + ": " + e.what());
  }
  ec.input_dim = get_int("input_dim");
  ec.output_dim = get_int("output_dim");
  ec.hidden_dim = get_int("hidden_dim");
  const int n_cameras = get_int("n_cameras");
  const auto n_enc = static_cast<std::size_t>(get_int("encoder_params"));
  const auto n_cls = static_cast<std::size_t>(get_int("classifier_params"));
  if (n_enc != ec.n_params()) throw IoError(files.header.string() + ": encoder parameter count mismatch");

  auto values = read_f32_blob(files.blob, n_enc + n_cls);
  std::vector<double> enc(values.begin(), values.begin() + static_cast<long>(n_enc));
  std::vector<double> cls(values.begin() + static_cast<long>(n_enc), values.end());
  return Checkpoint{EncoderModel(ec, std::move(enc)),
                    DomainClassifier(ec.output_dim, n_cameras, std::move(cls))};
}

}  // namespace calr::model
