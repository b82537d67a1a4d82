#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "geoaug/csv_writer.hpp"
#include "geoaug/dataset_csv.hpp"
#include "geoaug/error.hpp"
#include "geoaug/measures.hpp"
#include "geoaug/rng.hpp"

using namespace geoaug;

namespace {

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a(), b());
  Rng c(42), d(43);
  int equal = 0;
  for (int i = 0; i < 100; ++i) equal += c() == d();
  EXPECT_EQ(equal, 0);
}

TEST(Rng, SplitStreamsAreDistinctAndStable) {
  const Rng base(7);
  Rng s1 = base.split(1), s1b = base.split(1), s2 = base.split(2);
  EXPECT_EQ(s1(), s1b());
  EXPECT_NE(base.split(1).key(), s2.key());
  EXPECT_NE(base.split(1).key(), base.key());
}

TEST(Rng, MomentsOfUniformNormalAndSign) {
  Rng r(3);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0, ss = 0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    const double z = r.normal();
    sn += z;
    sn2 += z * z;
    ss += r.sign();
  }
  EXPECT_NEAR(su / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(sn / n, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(sn2 / n, 1.0, 4.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(ss / n, 0.0, 4.0 / std::sqrt(n));
}

TEST(Rng, BelowStaysInRange) {
  Rng r(9);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 5000; ++i) {
    const auto k = r.below(5);
    ASSERT_LT(k, 5u);
    ++counts[k];
  }
  for (int c : counts) EXPECT_GT(c, 800);
}

TEST(DiscreteMeasure, ValidatesWeights) {
  Matrix x(2, 1);
  x << 0.0, 1.0;
  Vector w(2);
  w << 0.5, 0.6;
  EXPECT_THROW(DiscreteMeasure(x, w), InvalidArgument);
  w << -0.5, 1.5;
  EXPECT_THROW(DiscreteMeasure(x, w), InvalidArgument);
  EXPECT_THROW(DiscreteMeasure::uniform(Matrix(0, 2)), InvalidArgument);
  const auto m = DiscreteMeasure::uniform(x);
  EXPECT_DOUBLE_EQ(m.weights()(1), 0.5);
}

TEST(SampleConditionalGaussian, ZeroMeanCase) {
  const ConditionalGaussianModel model(Vector::Zero(3), 1.0);
  const auto data = sample_conditional_gaussian(model, 1000, 1);
  const Vector mean = data.features().colwise().mean().transpose();
  for (int j = 0; j < 3; ++j) EXPECT_LE(std::abs(mean(j)), 4.0 / std::sqrt(1000.0));
}

TEST(SampleConditionalGaussian, LabelTimesFeatureRecoversMu) {
  const auto model = ConditionalGaussianModel::axis_aligned(4, 1.0, 1.0);
  const auto data = sample_conditional_gaussian(model, 10000, 2);
  Vector m = Vector::Zero(4);
  for (std::size_t i = 0; i < data.size(); ++i) {
    m += data.labels()[i] * data.features().row(static_cast<Eigen::Index>(i)).transpose();
  }
  m /= 10000.0;
  for (int j = 0; j < 4; ++j) EXPECT_LE(std::abs(m(j) - model.mu()(j)), 4.0 / std::sqrt(10000.0));
}

TEST(SampleConditionalGaussian, RejectsZeroAndIsReproducible) {
  const auto model = ConditionalGaussianModel::axis_aligned(2, 1.0, 1.0);
  EXPECT_THROW(sample_conditional_gaussian(model, 0, 1), InvalidArgument);
  const auto a = sample_conditional_gaussian(model, 50, 11);
  const auto b = sample_conditional_gaussian(model, 50, 11);
  EXPECT_EQ(a.features(), b.features());
  EXPECT_EQ(a.labels(), b.labels());
}

TEST(SplitByClass, TwoClassesOfTwo) {
  Matrix x(4, 1);
  x << 1, 2, 3, 4;
  const LabeledDataset data(x, {-1, 1, -1, 1}, LabelMode::binary);
  const auto parts = split_by_class(data);
  ASSERT_EQ(parts.size(), 2u);
  EXPECT_EQ(parts.at(-1).size(), 2u);
  EXPECT_DOUBLE_EQ(parts.at(-1).weights()(0), 0.5);
  EXPECT_DOUBLE_EQ(parts.at(-1).points()(1, 0), 3.0);
  EXPECT_DOUBLE_EQ(parts.at(1).points()(0, 0), 2.0);
}

TEST(SplitByClass, SingleClassAndEmpty) {
  Matrix x(2, 1);
  x << 1, 2;
  EXPECT_EQ(split_by_class(LabeledDataset(x, {1, 1}, LabelMode::binary)).size(), 1u);
  EXPECT_THROW(split_by_class(LabeledDataset()), InvalidArgument);
}

TEST(SplitByClass, RecombinationIsAPermutation) {
  const auto model = ConditionalGaussianModel::axis_aligned(2, 1.0, 1.0);
  const auto data = sample_conditional_gaussian(model, 40, 5);
  std::vector<std::vector<double>> original, recombined;
  for (Eigen::Index i = 0; i < data.features().rows(); ++i) {
    original.push_back({data.features()(i, 0), data.features()(i, 1),
                        static_cast<double>(data.labels()[static_cast<std::size_t>(i)])});
  }
  for (const auto& [label, m] : split_by_class(data)) {
    for (Eigen::Index i = 0; i < m.points().rows(); ++i) {
      recombined.push_back({m.points()(i, 0), m.points()(i, 1), static_cast<double>(label)});
    }
  }
  std::sort(original.begin(), original.end());
  std::sort(recombined.begin(), recombined.end());
  EXPECT_EQ(original, recombined);
}

TEST(LabeledDataset, BinaryLabelValidation) {
  Matrix x(2, 1);
  x << 1, 2;
  EXPECT_THROW(LabeledDataset(x, {0, 1}, LabelMode::binary), InvalidArgument);
  EXPECT_THROW(LabeledDataset(x, {1}, LabelMode::binary), InvalidArgument);
  EXPECT_EQ(LabeledDataset::infer(x, {0, 2}).mode(), LabelMode::multiclass);
}

TEST(SpdMatrix, FormsAndValidation) {
  EXPECT_TRUE(SpdMatrix::isotropic(3, 2.0).is_isotropic());
  EXPECT_DOUBLE_EQ(SpdMatrix::isotropic(3, 2.0).trace(), 6.0);
  EXPECT_THROW(SpdMatrix::isotropic(3, 0.0), InvalidArgument);
  Matrix m(2, 2);
  m << 1.0, 2.0, 0.0, 1.0;
  EXPECT_THROW(SpdMatrix::full(m), InvalidArgument);
  m << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3, -1
  EXPECT_THROW(SpdMatrix::full(m), InvalidArgument);
  EXPECT_THROW(SpdMatrix::full(m.topLeftCorner(1, 1).replicate(1, 2)), InvalidArgument);
}

TEST(DatasetCsv, RoundTrip) {
  Matrix x(3, 2);
  x << 0.1, -2.5, 1e-17, 3.0, 1.0 / 3.0, 7.25;
  const LabeledDataset data(x, {1, -1, 1}, LabelMode::binary);
  const auto path = std::filesystem::temp_directory_path() / "geoaug_roundtrip.csv";
  save_csv(data, path, {"generated"});
  const auto back = load_csv(path);
  std::filesystem::remove(path);
  EXPECT_EQ(back.features(), data.features());
  EXPECT_EQ(back.labels(), data.labels());
}

TEST(DatasetCsv, MissingLabelColumnIsAParseError) {
  std::istringstream in("f0,f1\n1,2\n");
  EXPECT_THROW(read_dataset_csv(in), ParseError);
}

TEST(DatasetCsv, HeaderOnlyGivesAnEmptyDatasetThatDownstreamRejects) {
  std::istringstream in("# comment\nf0,f1,label\n");
  const auto data = read_dataset_csv(in);
  EXPECT_TRUE(data.empty());
  EXPECT_THROW(split_by_class(data), InvalidArgument);
}

TEST(DatasetCsv, ErrorsCarryTheLineNumber) {
  std::istringstream in("f0,label\n1,1\nabc,1\n");
  try {
    read_dataset_csv(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 3u);
  }
}

TEST(DatasetCsv, LabelColumnMayComeFirst) {
  std::istringstream in("label,f0\n-1,2.5\n1,-1\n");
  const auto data = read_dataset_csv(in);
  EXPECT_EQ(data.labels(), (std::vector<int>{-1, 1}));
  EXPECT_DOUBLE_EQ(data.features()(0, 0), 2.5);
}

TEST(CsvWriter, SeventeenDigitsRoundTrip) {
  const double v = 0.1 + 0.2;
  EXPECT_EQ(std::stod(format_double(v)), v);
  CsvWriter w;
  w.comment("note");
  w.header({"a", "b"});
  w.field(1.5).field(3);
  w.end_row();
  EXPECT_EQ(w.str(), "# note\na,b\n1.5,3\n");
}

}  // namespace
