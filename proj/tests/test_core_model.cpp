#include "tppca/core_model.hpp"
#include "tppca/random.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace tppca;

namespace {

ModelParams example() {
  ModelParams p;
  p.W = Eigen::Vector2d(2.0, 1.0);
  p.mu = Eigen::Vector2d::Zero();
  p.sigma2 = 0.5;
  p.dof = SingleNu{Nu::fixed(3.0)};
  return p;
}

std::string failing_field(const ModelParams& p) {
  try {
    validate_params(p);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST(RandomStream, SameSeedSameSequence) {
  RandomStream a(99), b(99);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(a.uniform(), b.uniform());
    ASSERT_EQ(a.normal(), b.normal());
  }
}

TEST(RandomStream, SplitDependsOnlyOnSeedAndIndex) {
  RandomStream parent(7);
  const auto s1 = parent.split(3).seed();
  for (int i = 0; i < 100; ++i) parent.uniform();
  EXPECT_EQ(parent.split(3).seed(), s1);
  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 1000; ++i) seeds.insert(parent.split(i).seed());
  EXPECT_EQ(seeds.size(), 1000u);
  EXPECT_NE(RandomStream(8).split(3).seed(), s1);
}

TEST(RandomStream, UniformOpenInterval) {
  RandomStream r(3);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(ValidateParams, AcceptsExample) { EXPECT_NO_THROW(validate_params(example())); }

TEST(ValidateParams, ReportsOffendingField) {
  auto p = example();
  p.sigma2 = 0.0;
  EXPECT_EQ(failing_field(p), "sigma2");
  p = example();
  p.W = Eigen::MatrixXd::Ones(1, 2);
  p.mu = Eigen::VectorXd::Zero(1);
  EXPECT_EQ(failing_field(p), "W");
  p = example();
  p.mu = Eigen::VectorXd::Zero(3);
  EXPECT_EQ(failing_field(p), "mu");
  p = example();
  p.W(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_EQ(failing_field(p), "W");
  p = example();
  p.dof = SingleNu{Nu::fixed(-1.0)};
  EXPECT_EQ(failing_field(p), "dof.nu");
  p = example();
  p.dof = PairNu{Nu::fixed(3.0), Nu::fixed(0.0)};
  EXPECT_EQ(failing_field(p), "dof.nu2");
  p = example();
  p.dof = PairNu{Nu::estimate(5.0, 10.0, 1.0), Nu::fixed(3.0)};
  EXPECT_EQ(failing_field(p), "dof.nu1");
  p = example();
  p.sigma2 = std::numeric_limits<double>::infinity();
  EXPECT_EQ(failing_field(p), "sigma2");
}

TEST(DofSpec, VariantNames) {
  EXPECT_EQ(dof_variant_name(GaussianDof{}), "gaussian");
  EXPECT_EQ(dof_variant_name(SingleNu{}), "single");
  EXPECT_EQ(dof_variant_name(PairNu{}), "pair");
  const Nu e = Nu::estimate();
  EXPECT_TRUE(e.estimated);
  EXPECT_EQ(e.value, 5.0);
  EXPECT_EQ(e.lower, 0.05);
  EXPECT_EQ(e.upper, 500.0);
}

TEST(Dataset, CleanRowsUseMask) {
  Dataset d;
  d.X = Eigen::MatrixXd::Zero(4, 2);
  d.X.col(0) << 1, 2, 3, 4;
  EXPECT_EQ(d.clean_rows().rows(), 4);
  d.outlier_mask = std::vector<bool>{false, true, false, true};
  const auto c = d.clean_rows();
  ASSERT_EQ(c.rows(), 2);
  EXPECT_EQ(c(0, 0), 1);
  EXPECT_EQ(c(1, 0), 3);
}

TEST(Dataset, Validation) {
  Dataset d;
  d.X = Eigen::MatrixXd::Zero(3, 2);
  EXPECT_NO_THROW(validate_dataset(d));
  d.outlier_mask = std::vector<bool>{true};
  EXPECT_THROW(validate_dataset(d), ValidationError);
  d.outlier_mask.reset();
  d.X(1, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(validate_dataset(d), ValidationError);
}
