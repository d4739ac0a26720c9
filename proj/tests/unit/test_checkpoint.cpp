#include "calr/core/error.hpp"
#include "calr/model/checkpoint.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <fstream>

using namespace calr;
using namespace calr::model;

TEST(Checkpoint, RoundTripsAtFloatPrecision) {
  testutil::TempDir dir;
  Rng rng(1, 0);
  for (auto arch : {EncoderArch::Linear, EncoderArch::Tanh}) {
    Checkpoint ck{EncoderModel::random({arch, 6, 4, 5}, rng), DomainClassifier::random(4, 3, rng, 0.3)};
    save_checkpoint(ck, dir / "ck");
    const auto back = load_checkpoint(dir / "ck");
    EXPECT_EQ(back.encoder.config(), ck.encoder.config());
    EXPECT_EQ(back.classifier.n_cameras(), 3);
    ASSERT_EQ(back.encoder.params().size(), ck.encoder.params().size());
    for (std::size_t k = 0; k < ck.encoder.params().size(); ++k) {
      EXPECT_EQ(back.encoder.params()[k], static_cast<double>(static_cast<float>(ck.encoder.params()[k])));
    }
    for (std::size_t k = 0; k < ck.classifier.n_params(); ++k) {
      EXPECT_EQ(back.classifier.params()[k], static_cast<double>(static_cast<float>(ck.classifier.params()[k])));
    }
    // A second save of the loaded model is a fixed point.
    save_checkpoint(back, dir / "ck2");
    EXPECT_EQ(load_checkpoint(dir / "ck2").encoder, back.encoder);
  }
}

TEST(Checkpoint, MissingOrTruncatedFilesFail) {
  testutil::TempDir dir;
  EXPECT_THROW((void)load_checkpoint(dir / "absent"), IoError);
  Rng rng(2, 0);
  save_checkpoint({EncoderModel::random({EncoderArch::Linear, 3, 3, 0}, rng), DomainClassifier::zeros(3, 2)}, dir / "ck");
  std::filesystem::resize_file(dir / "ck.bin", 8);
  EXPECT_THROW((void)load_checkpoint(dir / "ck"), IoError);
}
