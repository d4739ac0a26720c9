#include "calr/core/error.hpp"
#include "calr/model/losses.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace calr;
using namespace calr::model;

namespace {

ClusterAssignment labels(std::vector<ClusterId> l) { return ClusterAssignment(std::move(l), AssignmentScope::global()); }

double direct_contrastive(const Matrix& bank, const Vector& q, int pos, double tau) {
  double z = 0;
  for (Eigen::Index k = 0; k < bank.rows(); ++k) z += std::exp(bank.row(k).dot(q) / tau);
  return -std::log(std::exp(bank.row(pos).dot(q) / tau) / z);
}

}  // namespace

TEST(Contrastive, SingleClusterLossIsZero) {
  Rng rng(1, 0);
  const Matrix e = testutil::unit_rows(rng, 3, 4);
  const auto bank = init_memory(labels({0, 0, 0}), e);
  const auto r = contrastive_loss(bank, e.row(1).transpose(), 0);
  EXPECT_NEAR(r.loss, 0.0, 1e-15);
  EXPECT_LT(r.grad_query.norm(), 1e-14);
}

TEST(Contrastive, OrthogonalWorkedExample) {
  Matrix e(2, 2);
  e << 1, 0, 0, 1;
  const auto bank = init_memory(labels({0, 1}), e);
  Vector q(2);
  q << 1, 0;
  EXPECT_NEAR(contrastive_loss(bank, q, 0).loss, 4.5399e-5, 5e-9);
}

TEST(Contrastive, MatchesDirectFormulaAndGradient) {
  Rng rng(2, 0);
  for (int t = 0; t < 20; ++t) {
    const Matrix e = testutil::unit_rows(rng, 6, 5);
    const auto bank = init_memory(labels({0, 1, 2, 3, 4, 5}), e, 0.2, 0.07 + 0.1 * rng.uniform());
    const Vector q = testutil::unit_rows(rng, 1, 5).row(0).transpose();
    const int pos = static_cast<int>(rng.uniform_index(6));
    const double w = 0.5 + rng.uniform();
    const auto r = contrastive_loss(bank, q, pos, w);
    EXPECT_NEAR(r.loss, w * direct_contrastive(bank.entries(), q, pos, bank.temperature()), 1e-10);
    const double h = 1e-6;
    for (int j = 0; j < 5; ++j) {
      Vector qp = q, qm = q;
      qp[j] += h;
      qm[j] -= h;
      const double fd = (contrastive_loss(bank, qp, pos, w).loss - contrastive_loss(bank, qm, pos, w).loss) / (2 * h);
      EXPECT_NEAR(r.grad_query[j], fd, 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST(Contrastive, InvariantToBankRowOrder) {
  Rng rng(3, 0);
  const Matrix e = testutil::unit_rows(rng, 4, 3);
  Matrix rev(4, 3);
  for (int i = 0; i < 4; ++i) rev.row(i) = e.row(3 - i);
  const auto a = init_memory(labels({0, 1, 2, 3}), e);
  const auto b = init_memory(labels({0, 1, 2, 3}), rev);
  const Vector q = testutil::unit_rows(rng, 1, 3).row(0).transpose();
  const auto ra = contrastive_loss(a, q, 1);
  const auto rb = contrastive_loss(b, q, 2);
  EXPECT_NEAR(ra.loss, rb.loss, 1e-12);
  EXPECT_LT((ra.grad_query - rb.grad_query).norm(), 1e-12);
}

TEST(Contrastive, RejectsUnknownPositive) {
  Matrix e(1, 2);
  e << 1, 0;
  const auto bank = init_memory(labels({0}), e);
  EXPECT_THROW((void)contrastive_loss(bank, Vector::Ones(2), 3), InvalidArgument);
  EXPECT_THROW((void)contrastive_loss(bank, Vector::Ones(3), 0), InvalidArgument);
}

TEST(TotalLoss, CombinesAndValidates) {
  EXPECT_DOUBLE_EQ(total_loss(1.5, 2.0, 0.25), 2.0);
  EXPECT_DOUBLE_EQ(total_loss(1.5, 2.0, 0.0), 1.5);
  EXPECT_THROW((void)total_loss(std::numeric_limits<double>::quiet_NaN(), 1, 1), InvalidArgument);
  EXPECT_THROW((void)total_loss(1, std::numeric_limits<double>::infinity(), 1), InvalidArgument);
  EXPECT_THROW((void)total_loss(1, 1, -0.1), InvalidArgument);
}

TEST(ClusterWeights, CameraDiversity) {
  const auto a = labels({0, 0, 0, 1, 1, kOutlier});
  const std::vector<CameraId> cams{0, 1, 1, 2, 2, 3};
  EXPECT_EQ(camera_diversity_weights(a, cams, 4), (std::vector<double>{0.5, 0.25}));
  EXPECT_EQ(uniform_cluster_weights(a, cams, 4), (std::vector<double>{1.0, 1.0}));
}

TEST(BatchObjective, GradientsMatchFiniteDifferences) {
  Rng rng(4, 0);
  const EncoderConfig cfg{EncoderArch::Tanh, 4, 3, 5};
  const auto enc = EncoderModel::random(cfg, rng);
  const auto cls = DomainClassifier::random(3, 3, rng, 0.5);
  const Matrix x = testutil::gaussian(rng, 6, 4);
  const auto bank = init_memory(labels({0, 1, 2, 0, 1, 2}), enc.embed(testutil::gaussian(rng, 6, 4)));
  const std::vector<ClusterId> targets{0, 1, 2, 2, 1, 0};
  const std::vector<double> weights{1.0, 0.5, 0.75, 1.0, 1.0, 0.25};
  const std::vector<CameraId> cams{0, 1, 2, 0, 1, 2};
  const ObjectiveOptions opt{0.7, 0.6, true};
  const auto r = batch_objective(enc, cls, bank, x, targets, weights, cams, opt);
  EXPECT_NEAR(r.total, r.inter + 0.7 * r.domain, 1e-12);

  // Encoder sees inter - lambda * beta * domain; the classifier sees the total.
  auto encoder_view = [&](const EncoderModel& e) {
    const auto b = batch_objective(e, cls, bank, x, targets, weights, cams, opt);
    return b.inter - 0.6 * 0.7 * b.domain;
  };
  const double h = 1e-6;
  for (std::size_t k = 0; k < enc.params().size(); ++k) {
    auto p = enc, m = enc;
    p.params()[k] += h;
    m.params()[k] -= h;
    const double fd = (encoder_view(p) - encoder_view(m)) / (2 * h);
    EXPECT_NEAR(r.grad_encoder[k], fd, 1e-6) << "encoder param " << k;
  }
  for (std::size_t k = 0; k < cls.n_params(); ++k) {
    auto p = cls, m = cls;
    p.params()[k] += h;
    m.params()[k] -= h;
    const double fd = (batch_objective(enc, p, bank, x, targets, weights, cams, opt).total -
                       batch_objective(enc, m, bank, x, targets, weights, cams, opt).total) /
                      (2 * h);
    EXPECT_NEAR(r.grad_classifier[k], fd, 1e-6) << "classifier param " << k;
  }
}

TEST(BatchObjective, DomainOffIgnoresClassifier) {
  Rng rng(5, 0);
  const EncoderConfig cfg{EncoderArch::Linear, 3, 3, 0};
  const auto enc = EncoderModel::random(cfg, rng);
  const Matrix x = testutil::gaussian(rng, 4, 3);
  const auto bank = init_memory(labels({0, 1, 0, 1}), enc.embed(x));
  const std::vector<ClusterId> t{0, 1, 0, 1};
  const std::vector<double> w(4, 1.0);
  const std::vector<CameraId> c{0, 1, 0, 1};
  const ObjectiveOptions off{1.0, 1.0, false};
  const auto a = batch_objective(enc, DomainClassifier::zeros(3, 2), bank, x, t, w, c, off);
  const auto b = batch_objective(enc, DomainClassifier::random(3, 2, rng, 2.0), bank, x, t, w, c, off);
  EXPECT_EQ(a.grad_encoder, b.grad_encoder);
  EXPECT_EQ(a.domain, 0.0);
  EXPECT_EQ(a.total, a.inter);
  for (double g : b.grad_classifier) EXPECT_EQ(g, 0.0);
}
