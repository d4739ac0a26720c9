#include "calr/core/error.hpp"
#include "calr/model/domain_classifier.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace calr;
using namespace calr::model;

TEST(DomainClassifier, ZeroClassifierGivesLogOfCameraCount) {
  Rng rng(1, 0);
  const auto c = DomainClassifier::zeros(5, 4);
  const Matrix e = testutil::unit_rows(rng, 6, 5);
  const std::vector<CameraId> cams{0, 1, 2, 3, 0, 1};
  const auto r = domain_loss(c, GradientReversal{1.0}, e, cams);
  EXPECT_NEAR(r.loss / 6, std::log(4.0), 1e-12);
}

TEST(DomainClassifier, ProbabilitiesAreDistributions) {
  Rng rng(2, 0);
  const auto c = DomainClassifier::random(6, 5, rng, 1.0);
  const Matrix p = c.probabilities(testutil::gaussian(rng, 30, 6));
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    EXPECT_NEAR(p.row(i).sum(), 1.0, 1e-12);
    EXPECT_GE(p.row(i).minCoeff(), 0.0);
  }
}

TEST(DomainClassifier, ReversalNegatesAndScales) {
  Rng rng(3, 0);
  const auto c = DomainClassifier::random(4, 3, rng, 1.0);
  const Matrix e = testutil::unit_rows(rng, 5, 4);
  const std::vector<CameraId> cams{0, 2, 1, 1, 0};
  const auto zero = domain_loss(c, GradientReversal{0.0}, e, cams);
  const auto one = domain_loss(c, GradientReversal{1.0}, e, cams);
  const auto half = domain_loss(c, GradientReversal{0.5}, e, cams);
  EXPECT_LT(zero.grad_embeddings.cwiseAbs().maxCoeff(), 1e-300);
  EXPECT_EQ(zero.grad_classifier, one.grad_classifier);
  EXPECT_NEAR(zero.loss, one.loss, 1e-15);
  // Central differences of the plain loss w.r.t. the embeddings.
  const double h = 1e-6;
  for (Eigen::Index i = 0; i < e.rows(); ++i) {
    for (Eigen::Index j = 0; j < e.cols(); ++j) {
      Matrix ep = e, em = e;
      ep(i, j) += h;
      em(i, j) -= h;
      const double fd = (domain_loss(c, GradientReversal{1.0}, ep, cams).loss -
                         domain_loss(c, GradientReversal{1.0}, em, cams).loss) /
                        (2 * h);
      EXPECT_NEAR(one.grad_embeddings(i, j), -fd, 1e-7);
      EXPECT_NEAR(half.grad_embeddings(i, j), -0.5 * fd, 1e-7);
    }
  }
}

TEST(DomainClassifier, ClassifierGradientMatchesFiniteDifferences) {
  Rng rng(4, 0);
  const auto c = DomainClassifier::random(3, 4, rng, 0.8);
  const Matrix e = testutil::unit_rows(rng, 6, 3);
  const std::vector<CameraId> cams{3, 2, 1, 0, 3, 3};
  const auto r = domain_loss(c, GradientReversal{1.0}, e, cams);
  const double h = 1e-6;
  for (std::size_t k = 0; k < c.n_params(); ++k) {
    auto plus = c, minus = c;
    plus.params()[k] += h;
    minus.params()[k] -= h;
    const double fd = (domain_loss(plus, GradientReversal{1.0}, e, cams).loss -
                       domain_loss(minus, GradientReversal{1.0}, e, cams).loss) /
                      (2 * h);
    EXPECT_NEAR(r.grad_classifier[k], fd, 1e-7);
  }
}

TEST(DomainClassifier, GrlIsIdentityForward) {
  Rng rng(5, 0);
  const Matrix x = testutil::gaussian(rng, 3, 3);
  const GradientReversal grl{0.3};
  EXPECT_EQ(grl.forward(x), x);
  EXPECT_LT((grl.backward(x) + 0.3 * x).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(DomainClassifier, RejectsBadLabelsAndShapes) {
  const auto c = DomainClassifier::zeros(2, 3);
  const Matrix e = Matrix::Ones(2, 2);
  const std::vector<CameraId> bad{0, 3};
  const std::vector<CameraId> neg{-1, 0};
  const std::vector<CameraId> short_labels{0};
  EXPECT_THROW((void)domain_loss(c, {}, e, bad), InvalidArgument);
  EXPECT_THROW((void)domain_loss(c, {}, e, neg), InvalidArgument);
  EXPECT_THROW((void)domain_loss(c, {}, e, short_labels), InvalidArgument);
  EXPECT_THROW(DomainClassifier(2, 3, std::vector<double>(5)), InvalidArgument);
  EXPECT_THROW((void)c.logits(Matrix::Ones(1, 3)), InvalidArgument);
}
