#pragma once

#include "calr/model/domain_classifier.hpp"
#include "calr/model/encoder.hpp"

#include <filesystem>

namespace calr::model {

struct Checkpoint {
  EncoderModel encoder;
  DomainClassifier classifier;
};

/// Writes prefix.hdr (architecture, dims, n_cameras, parameter counts as
/// "key: value" lines) and prefix.bin (little-endian float32: encoder
/// parameters then classifier parameters). Parameters are rounded to float32.
void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& prefix);
[[nodiscard]] Checkpoint load_checkpoint(const std::filesystem::path& prefix);

}  // namespace calr::model
