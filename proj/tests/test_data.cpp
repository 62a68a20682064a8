#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>
#include <sstream>

#include "mvpac/data.hpp"
#include "mvpac/errors.hpp"
#include "mvpac/trainers.hpp"
#include "oracles.hpp"

using namespace mvpac;

namespace {

TwoViewDataset parse(const std::string& text) {
  std::istringstream in(text);
  return parse_two_view(in);
}

std::size_t parse_error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

bool same(const TwoViewDataset& a, const TwoViewDataset& b) {
  return a.d1 == b.d1 && a.d2 == b.d2 && a.x1 == b.x1 && a.x2 == b.x2 && a.y == b.y &&
         a.u1 == b.u1 && a.u2 == b.u2;
}

TwoViewDataset labeled_only(Eigen::Index n) {
  TwoViewDataset ds;
  ds.d1 = ds.d2 = 1;
  ds.x1 = Matrix::Zero(n, 1);
  ds.x2 = Matrix::Zero(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) ds.x1(i, 0) = static_cast<double>(i);
  ds.y = Vector::Ones(n);
  ds.u1.resize(0, 1);
  ds.u2.resize(0, 1);
  return ds;
}

}  // namespace

// ---------------------------------------------------------------------------
// Random numbers

TEST(Rng, DeterministicAndSeedSensitive) {
  Rng a(5), b(5), c(6);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    EXPECT_NE(x, c.next());
  }
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
}

TEST(Rng, UniformAndNormalMoments) {
  Rng r(9);
  double su = 0, sn = 0, sn2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    const double z = r.normal();
    sn += z;
    sn2 += z * z;
  }
  EXPECT_NEAR(su / n, 0.5, 0.005);
  EXPECT_NEAR(sn / n, 0.0, 0.01);
  EXPECT_NEAR(sn2 / n, 1.0, 0.01);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(r.below(7), 7u);
}

// ---------------------------------------------------------------------------
// Synthetic data

TEST(GenSynthetic, SizesAndBalance) {
  const auto ds = gen_synthetic(3);
  EXPECT_EQ(ds.labeled_count(), 2000);
  EXPECT_EQ(ds.x1.cols(), 50);
  EXPECT_EQ(ds.x2.cols(), 50);
  EXPECT_EQ(ds.unlabeled_count(), 0);
  EXPECT_EQ((ds.y.array() > 0).count(), 1000);
  EXPECT_FALSE(ds.augmented);
}

TEST(GenSynthetic, Deterministic) {
  const auto a = gen_synthetic(7, 200, 10, 0.3), b = gen_synthetic(7, 200, 10, 0.3);
  EXPECT_TRUE(same(a, b));
  EXPECT_FALSE(same(a, gen_synthetic(8, 200, 10, 0.3)));
}

TEST(GenSynthetic, NoiselessViewsAgreeOnTheDirections) {
  const std::uint64_t seed = 17;
  const Eigen::Index d = 8;
  const auto ds = gen_synthetic(seed, 100, d, 0.0);
  // The directions are the first two draws of the generator's stream.
  Rng rng(derive_seed(seed, 0));
  const Vector u1 = rng.normal_vector(d).normalized();
  const Vector u2 = rng.normal_vector(d).normalized();
  for (Eigen::Index i = 0; i < 100; ++i) {
    const double p1 = ds.x1.row(i).dot(u1), p2 = ds.x2.row(i).dot(u2);
    EXPECT_NEAR(p1, p2, 1e-12);
    EXPECT_EQ(p1 >= 0 ? 1.0 : -1.0, ds.y(i));
  }
}

TEST(GenSynthetic, NoiselessDataIsSeparablePerView) {
  const auto ds = augment_and_scale(gen_synthetic(4, 200, 10, 0.0));
  for (int view = 0; view < 2; ++view) {
    const Matrix& x = view == 0 ? ds.x1 : ds.x2;
    const auto m = train_svm_linear(x, ds.y, 1e5);
    const auto w = extract_linear_weights(m, x, SvmView::first, x.cols(), 0);
    EXPECT_EQ(error_rate(w, x, Matrix::Zero(x.rows(), 0), ds.y), 0.0);
  }
}

TEST(GenSynthetic, RejectsOddCount) {
  try {
    gen_synthetic(1, 2001);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("even"), std::string::npos);
  }
  EXPECT_THROW(gen_synthetic(1, 10, 0), InputError);
}

// ---------------------------------------------------------------------------
// Text format

TEST(TwoViewFormat, MinimalFile) {
  const auto ds = parse("2 3\n+1 1 0 0 1 0\n");
  EXPECT_EQ(ds.d1, 2);
  EXPECT_EQ(ds.d2, 3);
  ASSERT_EQ(ds.labeled_count(), 1);
  EXPECT_EQ(ds.y(0), 1.0);
  EXPECT_EQ(ds.x1.row(0), (Vector(2) << 1, 0).finished().transpose());
  EXPECT_EQ(ds.x2.row(0), (Vector(3) << 0, 1, 0).finished().transpose());
}

TEST(TwoViewFormat, UnlabeledRowsAndComments) {
  const auto ds = parse("# two views\n1 1\n\n-1 0.5 2\n0 3 4\n# trailing\n1 -1 -2\n");
  EXPECT_EQ(ds.labeled_count(), 2);
  EXPECT_EQ(ds.unlabeled_count(), 1);
  EXPECT_EQ(ds.u1(0, 0), 3.0);
  EXPECT_EQ(ds.u2(0, 0), 4.0);
  EXPECT_EQ(ds.y(1), 1.0);
}

TEST(TwoViewFormat, ErrorsCarryLineNumbers) {
  EXPECT_EQ(parse_error_line("2\n1 0 0\n"), 1u);
  EXPECT_EQ(parse_error_line("# c\nx y\n"), 2u);
  EXPECT_EQ(parse_error_line("1 1\n1 0 0\n1 0\n"), 3u);
  EXPECT_EQ(parse_error_line("1 1\n2 0 0\n"), 2u);
  EXPECT_EQ(parse_error_line("1 1\n1 0 abc\n"), 2u);
  EXPECT_EQ(parse_error_line("1 1\n0.5 0 0\n"), 2u);
}

TEST(TwoViewFormat, RoundTripIsLossless) {
  auto ds = gen_synthetic(21, 40, 3, 0.7);
  ds.u1 = oracle::Gen(1).matrix(5, 3) * 1e-7;
  ds.u2 = oracle::Gen(2).matrix(5, 3) * 1e9;
  std::stringstream buf;
  write_two_view(buf, ds);
  const auto back = parse_two_view(buf);
  EXPECT_TRUE(same(ds, back));
}

TEST(TwoViewFormat, FileRoundTripAndPathInErrors) {
  const auto dir = std::filesystem::temp_directory_path();
  const std::string good = (dir / "mvpac_rt.tv").string();
  const auto ds = gen_synthetic(2, 20, 4, 0.2);
  save_two_view(good, ds);
  EXPECT_TRUE(same(load_two_view(good), ds));
  std::filesystem::remove(good);

  const std::string bad = (dir / "mvpac_bad.tv").string();
  {
    std::ofstream f(bad);
    f << "1 1\n1 0 0\n7 0 0\n";
  }
  try {
    load_two_view(bad);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find(bad), std::string::npos);
  }
  std::filesystem::remove(bad);
  EXPECT_THROW(load_two_view((dir / "mvpac_missing_file.tv").string()), InputError);
}

// ---------------------------------------------------------------------------
// Augmentation and scaling

TEST(AugmentAndScale, SingleZeroExample) {
  const auto ds = augment_and_scale(parse("1 1\n1 0 0\n"));
  EXPECT_NEAR(ds.x1(0, 0), 0.0, 0.0);
  EXPECT_NEAR(ds.x1(0, 1), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(ds.x2(0, 1), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(ds.scale_factor, std::sqrt(2.0), 1e-15);
  EXPECT_TRUE(ds.augmented);
  EXPECT_EQ(ds.width1(), 2);
}

TEST(AugmentAndScale, UnitRadiusOverAllRows) {
  auto raw = gen_synthetic(5, 60, 4, 0.5);
  raw.u1 = 10.0 * Matrix::Ones(2, 4);  // the unlabeled pool holds the longest row
  raw.u2 = Matrix::Zero(2, 4);
  const auto ds = augment_and_scale(raw);
  EXPECT_NEAR(max_concatenated_norm(ds), 1.0, 1e-12);
  double labeled_max = 0.0;
  for (Eigen::Index i = 0; i < ds.labeled_count(); ++i)
    labeled_max = std::max(labeled_max, std::hypot(ds.x1.row(i).norm(), ds.x2.row(i).norm()));
  EXPECT_LT(labeled_max, 1.0);
  EXPECT_THROW(augment_and_scale(ds), UsageError);
}

TEST(AugmentAndScale, PreservesLinearDecisions) {
  oracle::Gen g(71);
  const auto raw = gen_synthetic(6, 80, 5, 0.4);
  const auto ds = augment_and_scale(raw);
  for (int probe = 0; probe < 50; ++probe) {
    const Vector w1 = g.vector(6), w2 = g.vector(6);
    for (Eigen::Index i = 0; i < raw.labeled_count(); ++i) {
      const double before = raw.x1.row(i).dot(w1.head(5)) + w1(5) +
                            raw.x2.row(i).dot(w2.head(5)) + w2(5);
      const double after = ds.x1.row(i).dot(w1) + ds.x2.row(i).dot(w2);
      EXPECT_EQ(before >= 0, after >= 0);
    }
  }
}

// ---------------------------------------------------------------------------
// Splits and folds

TEST(Split, PartSizes) {
  const auto ds = labeled_only(100);
  SplitPlan plan;
  plan.seed = 3;
  const auto s = split(ds, plan, 0);
  EXPECT_EQ(s.unlabeled.size(), 20u);
  EXPECT_EQ(s.train.size(), 16u);
  EXPECT_EQ(s.test.size(), 64u);
  EXPECT_EQ(s.prior_subset.size(), 3u);
  EXPECT_EQ(s.held_in.size(), 13u);
}

TEST(Split, PartitionProperty) {
  const auto ds = labeled_only(257);
  SplitPlan plan;
  plan.seed = 4;
  plan.labeled_fraction = 0.6;
  for (std::size_t p = 0; p < plan.partitions; ++p) {
    const auto s = split(ds, plan, p);
    std::multiset<Eigen::Index> all;
    all.insert(s.unlabeled.begin(), s.unlabeled.end());
    all.insert(s.train.begin(), s.train.end());
    all.insert(s.test.begin(), s.test.end());
    ASSERT_EQ(all.size(), 257u);
    EXPECT_EQ(std::set<Eigen::Index>(all.begin(), all.end()).size(), 257u);
    std::vector<Eigen::Index> joined = s.prior_subset;
    joined.insert(joined.end(), s.held_in.begin(), s.held_in.end());
    EXPECT_EQ(joined, s.train);
  }
}

TEST(Split, DeterministicAndPartitionSpecific) {
  const auto ds = labeled_only(80);
  SplitPlan plan;
  plan.seed = 11;
  const auto a = split(ds, plan, 2), b = split(ds, plan, 2), c = split(ds, plan, 3);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  EXPECT_EQ(a.unlabeled, b.unlabeled);
  EXPECT_NE(a.train, c.train);
}

TEST(Split, RejectsEmptyPartsAndBadIndices) {
  SplitPlan plan;
  EXPECT_THROW(split(labeled_only(4), plan, 0), InputError);
  EXPECT_THROW(split(labeled_only(100), plan, 10), InputError);
  plan.labeled_fraction = 1.0;
  EXPECT_THROW(split(labeled_only(100), plan, 0), InputError);
}

TEST(KFold, SizesAndCoverage) {
  auto sizes = [](std::size_t n, std::size_t k) {
    std::vector<std::size_t> out;
    for (const auto& f : kfold(n, k, 1)) out.push_back(f.validate.size());
    return out;
  };
  EXPECT_EQ(sizes(9, 3), (std::vector<std::size_t>{3, 3, 3}));
  EXPECT_EQ(sizes(10, 3), (std::vector<std::size_t>{4, 3, 3}));
  for (std::size_t n : {5u, 17u, 64u}) {
    std::vector<int> seen(n, 0);
    for (const auto& f : kfold(n, 3, 8)) {
      EXPECT_EQ(f.train.size() + f.validate.size(), n);
      for (auto i : f.validate) ++seen[i];
      std::set<std::size_t> t(f.train.begin(), f.train.end());
      for (auto i : f.validate) EXPECT_FALSE(t.count(i));
    }
    for (int c : seen) EXPECT_EQ(c, 1);
  }
  EXPECT_THROW(kfold(2, 3, 1), InputError);
  EXPECT_THROW(kfold(5, 1, 1), InputError);
}
