#include "calr/core/embedding_io.hpp"
#include "calr/core/error.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <fstream>

using namespace calr;

namespace {

EmbeddingDataset random_dataset(int n, int d, bool with_gt) {
  Rng rng(21, 0);
  Matrix f = testutil::unit_rows(rng, n, d);
  // Round through float so the blob round-trip can be compared bit for bit.
  for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = static_cast<float>(f.data()[i]);
  std::vector<Sample> s;
  for (int i = 0; i < n; ++i) {
    s.push_back({100 + 3 * i, i % 3, with_gt ? std::optional<int>(i / 2) : std::nullopt});
  }
  return EmbeddingDataset(f, s, 3);
}

std::vector<char> bytes_of(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(EmbeddingIo, BitExactRoundTrip) {
  testutil::TempDir dir;
  const auto ds = random_dataset(9, 5, true);
  save_embeddings(ds, dir / "emb");
  const auto back = load_embeddings(dir / "emb");
  EXPECT_EQ(back.samples(), ds.samples());
  EXPECT_EQ(back.n_cameras(), 3);
  EXPECT_EQ(back.features(), ds.features());
  save_embeddings(back, dir / "emb2");
  EXPECT_EQ(bytes_of(dir / "emb.bin"), bytes_of(dir / "emb2.bin"));
  EXPECT_EQ(bytes_of(dir / "emb.csv"), bytes_of(dir / "emb2.csv"));
  EXPECT_EQ(bytes_of(dir / "emb.hdr"), bytes_of(dir / "emb2.hdr"));
}

TEST(EmbeddingIo, LittleEndianFloatLayout) {
  testutil::TempDir dir;
  const std::vector<double> values{1.0, -2.5};
  write_f32_blob(dir / "b.bin", values);
  const auto b = bytes_of(dir / "b.bin");
  ASSERT_EQ(b.size(), 8u);
  // 1.0f = 0x3F800000, -2.5f = 0xC0200000, least significant byte first.
  const unsigned char expect[8] = {0x00, 0x00, 0x80, 0x3F, 0x00, 0x00, 0x20, 0xC0};
  for (int i = 0; i < 8; ++i) EXPECT_EQ(static_cast<unsigned char>(b[i]), expect[i]);
  EXPECT_EQ(read_f32_blob(dir / "b.bin", 2), values);
  EXPECT_THROW((void)read_f32_blob(dir / "b.bin", 3), IoError);
}

TEST(EmbeddingIo, MissingGroundTruthStaysEmpty) {
  testutil::TempDir dir;
  const auto ds = random_dataset(4, 3, false);
  save_embeddings(ds, dir / "e");
  EXPECT_FALSE(load_embeddings(dir / "e").has_ground_truth());
}

TEST(EmbeddingIo, CorruptInputsRejected) {
  testutil::TempDir dir;
  const auto ds = random_dataset(4, 3, true);
  save_embeddings(ds, dir / "e");
  {
    std::ofstream hdr(dir / "e.hdr");
    hdr << "n_samples: 5\ndim: 3\nn_cameras: 3\n";
  }
  EXPECT_THROW((void)load_embeddings(dir / "e"), IoError);
  EXPECT_THROW((void)load_embeddings(dir / "nothing"), IoError);
}

TEST(AssignmentCsv, RoundTrip) {
  testutil::TempDir dir;
  const auto ds = random_dataset(6, 3, true);
  const ClusterAssignment a({0, 1, kOutlier, 1, 2, 0}, AssignmentScope::global());
  save_assignment_csv(ds, a, dir / "a.csv");
  EXPECT_EQ(load_assignment_csv(ds, dir / "a.csv", AssignmentScope::global()), a);
}

TEST(AssignmentCsv, UnknownSampleRejected) {
  testutil::TempDir dir;
  const auto ds = random_dataset(3, 3, true);
  {
    std::ofstream out(dir / "a.csv");
    out << "sample_id,cluster_id\n999,0\n";
  }
  EXPECT_THROW((void)load_assignment_csv(ds, dir / "a.csv", AssignmentScope::global()), IoError);
}
