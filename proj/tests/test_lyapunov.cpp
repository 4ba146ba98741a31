#include <gtest/gtest.h>

#include "corpus.hpp"

using namespace pathlyap;

namespace {

Certificate identities(std::size_t nodes, Eigen::Index n) {
  Certificate c;
  c.forms.assign(nodes, Matrix::Identity(n, n));
  return c;
}

}  // namespace

TEST(MatrixSet, ProductAppliesInReadingOrder) {
  const auto s = corpus::example_matrices();
  EXPECT_TRUE(s.product({0, 1}).isApprox(s[1] * s[0]));
  EXPECT_TRUE(s.product({}).isApprox(Matrix::Identity(3, 3)));
}

TEST(Verify, ZeroMatricesPass) {
  const auto g = corpus::misses_121_graph();
  const MatrixSet s(corpus::digits(2), {Matrix::Zero(2, 2), Matrix::Zero(2, 2)});
  const auto rep = verify_certificate(g, s, identities(2, 2), 0.5);
  EXPECT_TRUE(rep.pass);
  for (const auto& e : rep.edges) EXPECT_NEAR(e.margin, 1.0, 1e-15);
}

TEST(Verify, IdentityHasZeroMarginAndFails) {
  const auto g = corpus::cqlf_graph(1);
  const MatrixSet s(corpus::digits(1), {Matrix::Identity(2, 2)});
  const auto rep = verify_certificate(g, s, identities(1, 2), 0.0);
  EXPECT_FALSE(rep.pass);
  EXPECT_EQ(rep.edges[0].margin, 0.0);
  ASSERT_TRUE(rep.worst_edge());
  EXPECT_EQ(rep.worst_edge()->edge, 0u);
}

TEST(Verify, RejectsBadCertificates) {
  const auto g = corpus::cqlf_graph(1);
  const MatrixSet s(corpus::digits(1), {Matrix::Zero(2, 2)});
  Certificate c = identities(1, 2);
  c.forms[0](0, 1) = 0.5;
  try {
    verify_certificate(g, s, c, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::non_symmetric);
  }
  try {
    verify_certificate(g, s, identities(1, 3), 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::dimension_mismatch);
  }
  EXPECT_THROW(verify_certificate(g, s, identities(2, 2), 0.0), Error);
}

TEST(Verify, LabelsComposeChronologically) {
  // Edge labeled "12" checks A2 A1, which is zero here while A1 A2 is not.
  Matrix a1 = Matrix::Zero(2, 2), a2 = Matrix::Zero(2, 2);
  a1(1, 0) = 1.0;  // e1 -> e2
  a2(0, 0) = 1.0;  // keeps e1, kills e2
  const MatrixSet s(corpus::digits(2), {a1 * 5.0, a2 * 5.0});
  const LabeledGraph g(corpus::digits(2), {"P"}, {{0, 0, {0, 1}}});
  EXPECT_TRUE((s[1] * s[0]).isZero());
  EXPECT_FALSE((s[0] * s[1]).isZero());
  EXPECT_TRUE(verify_certificate(g, s, identities(1, 2), 1e-9).pass);
  const LabeledGraph h(corpus::digits(2), {"P"}, {{0, 0, {1, 0}}});
  EXPECT_FALSE(verify_certificate(h, s, identities(1, 2), 1e-9).pass);
}

TEST(Verify, MarginsScaleWithTheCertificate) {
  std::mt19937_64 rng(3);
  const auto g = corpus::complete_pair_graph();
  for (int k = 0; k < 20; ++k) {
    const auto s = corpus::random_scaled_pair(rng, 2, 0.5);
    Certificate c;
    for (int i = 0; i < 2; ++i) {
      Matrix l = corpus::random_gaussian(rng, 2);
      c.forms.push_back(l * l.transpose() + Matrix::Identity(2, 2));
    }
    const double factor = 1.0 + 10.0 * k;
    const auto base = verify_certificate(g, s, c, 0.0);
    const auto scaled = verify_certificate(g, s, c.scaled(factor), 0.0);
    EXPECT_EQ(base.pass, scaled.pass);
    for (std::size_t e = 0; e < base.edges.size(); ++e)
      EXPECT_NEAR(scaled.edges[e].margin, factor * base.edges[e].margin, 1e-9 * factor * (1 + std::abs(base.edges[e].margin)));
  }
}

TEST(Entrywise, DiagonalExamples) {
  Vector p(2), q(2);
  p << 1, 2;
  q << 0.5, 1.5;
  auto r = entrywise_equivalence(Matrix::Identity(2, 2), p, q);
  EXPECT_TRUE(r.lmi_holds);
  EXPECT_TRUE(r.entrywise_holds);
  q << 1, 1;
  r = entrywise_equivalence(Matrix::Identity(2, 2), p, q);
  EXPECT_FALSE(r.lmi_holds);
  EXPECT_FALSE(r.entrywise_holds);
}

TEST(Entrywise, RejectsNonSubpermutations) {
  Vector p = Vector::Ones(2);
  Matrix a = Matrix::Ones(2, 2);
  EXPECT_THROW(entrywise_equivalence(a, p, p), Error);
  Matrix b = Matrix::Identity(2, 2) * 0.5;
  EXPECT_THROW(entrywise_equivalence(b, p, p), Error);
  EXPECT_THROW(entrywise_equivalence(Matrix::Identity(2, 2), -p, p), Error);
}

TEST(Entrywise, AgreesOnRandomInstances) {
  std::mt19937_64 rng(33);
  std::uniform_int_distribution<int> value(1, 6);
  int holds = 0;
  for (int k = 0; k < 1000; ++k) {
    const std::size_t n = 1 + k % 5;
    const Matrix a = corpus::random_subpermutation(rng, n);
    Vector p(static_cast<Eigen::Index>(n)), q(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      p(i) = value(rng);
      q(i) = value(rng);
    }
    const auto r = entrywise_equivalence(a, p, q);
    EXPECT_EQ(r.lmi_holds, r.entrywise_holds) << a << "\n" << p.transpose() << "\n" << q.transpose();
    holds += r.entrywise_holds;
  }
  EXPECT_GT(holds, 50);
  EXPECT_LT(holds, 950);
}

TEST(JsrLowerBound, Scalar) {
  const MatrixSet s(corpus::digits(1), {Matrix::Ones(1, 1)});
  const auto lb = jsr_lower_bound(s, 3);
  EXPECT_EQ(lb.bound, 1.0);
  EXPECT_EQ(lb.witness, (Word{0}));
}

TEST(JsrLowerBound, CycleFamilyHasRadiusOne) {
  const auto s = build_sigma_w({0, 1, 0}, 2).transposed(corpus::digits(2));
  const auto lb = jsr_lower_bound(s, 4);
  EXPECT_EQ(lb.bound, 1.0);
  EXPECT_EQ(lb.witness.size(), 4u);
  EXPECT_EQ(spectral_radius(s.product(lb.witness)), 1.0);
}

TEST(JsrLowerBound, ExampleMatricesAtDepthThree) {
  const auto s = corpus::example_matrices();
  const auto lb = jsr_lower_bound(s, 3);
  EXPECT_GE(lb.bound, 1.005);
  EXPECT_LE(lb.bound, 1.015);
  // "121" and its rotations share a spectrum; the shortlex-least one wins.
  const double rho121 = std::cbrt(corpus::eigen_spectral_radius(s.product({0, 1, 0})));
  EXPECT_NEAR(lb.bound, rho121, 1e-10);
  EXPECT_EQ(lb.witness, (Word{0, 0, 1}));
}

TEST(JsrLowerBound, WitnessAchievesTheBound) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 20; ++k) {
    const auto s = corpus::random_scaled_pair(rng, 3, 1.0);
    const auto lb = jsr_lower_bound(s, 5);
    EXPECT_NEAR(std::pow(spectral_radius(s.product(lb.witness)), 1.0 / lb.witness.size()), lb.bound, 1e-15);
  }
}

TEST(JsrLowerBound, Budget) {
  const auto s = corpus::example_matrices();
  EXPECT_THROW(jsr_lower_bound(s, 10, 100), Error);
  EXPECT_THROW(jsr_lower_bound(s, 0), Error);
}
