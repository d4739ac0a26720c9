#include "calr/core/error.hpp"
#include "calr/pipeline/train_config.hpp"

#include <gtest/gtest.h>

using namespace calr;
using namespace calr::pipeline;

TEST(TrainConfig, DefaultsAreValid) {
  const TrainConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.intra_epochs, 20);
  EXPECT_EQ(c.inter_epochs, 50);
  EXPECT_EQ(c.temperature, 0.1);
  EXPECT_EQ(c.momentum, 0.2);
  EXPECT_EQ(c.schedule, refine::DecaySchedule::Cosine);
}

TEST(TrainConfig, TextRoundTrip) {
  TrainConfig c;
  c.inter_epochs = 7;
  c.beta = 0.1;
  c.schedule = refine::DecaySchedule::Exponential;
  c.use_refinement = false;
  c.arch = model::EncoderArch::Tanh;
  c.adam.lr = 1e-3;
  c.seed = 123456789012345ULL;
  const std::string text = to_text(c);
  EXPECT_NE(text.find("loss.beta: 0.1\n"), std::string::npos);
  const auto back = config_from_pairs(parse_key_values(text));
  EXPECT_EQ(to_text(back), text);
  EXPECT_EQ(back.seed, c.seed);
  EXPECT_EQ(back.beta, 0.1);
}

TEST(TrainConfig, ParsesCommentsAndEquals) {
  const auto kv = parse_key_values("# header\nloss.beta = 0.5  # inline\n\n graph.k: 9\n");
  const auto c = config_from_pairs(kv);
  EXPECT_EQ(c.beta, 0.5);
  EXPECT_EQ(c.knn.k, 9);
}

TEST(TrainConfig, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW((void)config_from_pairs({{"loss.gamma", "1"}}), InvalidArgument);
  EXPECT_THROW((void)config_from_pairs({{"graph.k", "many"}}), InvalidArgument);
  EXPECT_THROW((void)config_from_pairs({{"graph.mutual", "maybe"}}), InvalidArgument);
  EXPECT_THROW((void)config_from_pairs({{"refine.schedule", "step"}}), InvalidArgument);
  EXPECT_THROW((void)parse_key_values("no separator here\n"), InvalidArgument);
}

TEST(TrainConfig, ValidateCatchesRanges) {
  auto bad = [](auto mutate) {
    TrainConfig c;
    mutate(c);
    EXPECT_THROW(c.validate(), InvalidArgument);
  };
  bad([](TrainConfig& c) { c.inter_epochs = 0; });
  bad([](TrainConfig& c) { c.temperature = 0; });
  bad([](TrainConfig& c) { c.momentum = 1.5; });
  bad([](TrainConfig& c) { c.p_end = 0.5, c.p_start = 0.2; });
  bad([](TrainConfig& c) { c.beta = -1; });
  bad([](TrainConfig& c) { c.knn.k = 0; });
}
