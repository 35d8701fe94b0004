#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "opalg/chain.hpp"
#include "opalg/embedding.hpp"
#include "opalg/errors.hpp"
#include "opalg/norms.hpp"

using namespace opalg;

namespace {

Matrix random_float(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(r, c, Backend::floating);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m.set(i, j, cplx(u(rng), u(rng)));
  return m;
}

Matrix random_rational(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::uniform_int_distribution<long> num(-9, 9), den(1, 6);
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m.set(i, j, QComplex(mpq_class(num(rng), den(rng)), mpq_class(num(rng), den(rng))));
  return m;
}

// Independent oracle: Eigen's two-sided Jacobi SVD.
std::vector<double> eigen_singular_values(const Matrix& m) {
  Eigen::MatrixXcd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m.at(i, j);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(e);
  const auto s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

}  // namespace

TEST(OpNorm, Identity) { EXPECT_NEAR(op_norm(Matrix::identity(3)), 1.0, 1e-14); }

TEST(OpNorm, RankOneTwoByTwo) {
  EXPECT_NEAR(op_norm(Matrix::from_rows({{1, 2}, {0, 0}})), std::sqrt(5.0), 1e-12);
  EXPECT_NEAR(op_norm(Matrix::from_rows({{1, 2}, {0, 0}})), 2.23606798, 1e-8);
}

TEST(OpNorm, Diagonal) {
  const std::vector<QComplex> d{QComplex(1), QComplex(-3)};
  EXPECT_NEAR(op_norm(Matrix::diagonal(d)), 3.0, 1e-14);
}

TEST(OpNorm, EmptyThrows) {
  EXPECT_THROW(op_norm(Matrix()), DimensionError);
  EXPECT_THROW(schatten1_norm(Matrix(0, 3)), DimensionError);
}

TEST(Schatten1, Identity) {
  for (std::size_t n : {1u, 4u, 9u}) EXPECT_NEAR(schatten1_norm(Matrix::identity(n)), double(n), 1e-12);
}

TEST(Schatten1, RankOne) { EXPECT_NEAR(schatten1_norm(Matrix::from_rows({{1, 2}, {0, 0}})), std::sqrt(5.0), 1e-12); }

TEST(Schatten1, RankOneIdempotentOnThreeIndices) {
  const RankOneFamily fam(1);
  EXPECT_NEAR(schatten1_norm(fam.build_E(1)), 3.0, 1e-12);
}

TEST(Idempotent, ChainElement) {
  const Chain c = build_chain(ChainSpec::scalar(2, {QComplex(1)}));
  EXPECT_TRUE(is_idempotent(c.e(2), Tolerance::exact()));
}

TEST(Idempotent, TwiceIdentityIsNot) {
  EXPECT_FALSE(is_idempotent(QComplex(2) * Matrix::identity(3), Tolerance::exact()));
  EXPECT_FALSE(is_idempotent(QComplex(2) * Matrix::identity(3), Tolerance::approx()));
}

TEST(Idempotent, Zero) { EXPECT_TRUE(is_idempotent(Matrix::zeros(4, 4), Tolerance::exact())); }

TEST(Idempotent, NonSquareThrows) { EXPECT_THROW(is_idempotent(Matrix(2, 3), Tolerance::exact()), DimensionError); }

TEST(Idempotent, FloatWithinTolerance) {
  Matrix p = Matrix::from_rows_float({{1.0 + 1e-12, 0.0}, {0.0, 0.0}});
  EXPECT_TRUE(is_idempotent(p, Tolerance::approx(1e-9)));
  EXPECT_FALSE(is_idempotent(p, Tolerance::exact()));
}

TEST(ToleranceType, ApproxMustBePositive) {
  EXPECT_THROW(Tolerance::approx(0.0), std::invalid_argument);
  EXPECT_THROW(Tolerance::approx(-1.0), std::invalid_argument);
  EXPECT_EQ(Tolerance::exact().abs_tol(), 0.0);
  EXPECT_DOUBLE_EQ(Tolerance::approx().abs_tol(), 1e-9);
}

TEST(MatrixArith, ShapeChecks) {
  Matrix a(2, 3), b(3, 2);
  EXPECT_THROW(a += b, DimensionError);
  EXPECT_THROW(a * a, DimensionError);
  EXPECT_NO_THROW(a * b);
}

TEST(MatrixArith, ExactToFloatIsLossless) {
  std::mt19937_64 rng(11);
  const Matrix q = random_rational(5, 4, rng);
  const Matrix f = q.to_float();
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(f.at(i, j), q.q(i, j).to_complex());
}

TEST(MatrixArith, KronAndPower) {
  const Matrix a = Matrix::from_rows({{0, 1}, {0, 0}});
  EXPECT_TRUE(power(a, 2).is_zero());
  EXPECT_TRUE(power(a, 0) == Matrix::identity(2));
  const Matrix k = kron(Matrix::identity(2), a);
  EXPECT_EQ(k.rows(), 4u);
  EXPECT_TRUE(k.q(0, 1) == QComplex(1));
  EXPECT_TRUE(k.q(2, 3) == QComplex(1));
  EXPECT_TRUE(k.q(0, 3) == QComplex(0));
}

TEST(MatrixArith, ExactRank) {
  EXPECT_EQ(exact_rank(Matrix::from_rows({{1, 2}, {2, 4}})), 1u);
  EXPECT_EQ(exact_rank(Matrix::identity(5)), 5u);
  EXPECT_EQ(exact_rank(Matrix::zeros(3, 2)), 0u);
}

TEST(ScalarParse, Forms) {
  EXPECT_TRUE(QComplex::parse("3/4") == QComplex(mpq_class(3, 4)));
  EXPECT_TRUE(QComplex::parse("-2") == QComplex(-2));
  EXPECT_TRUE(QComplex::parse("1/2-5i") == QComplex(mpq_class(1, 2), mpq_class(-5)));
  EXPECT_TRUE(QComplex::parse("0.25") == QComplex(mpq_class(1, 4)));
  const QComplex z(mpq_class(7, 3), mpq_class(-1, 5));
  EXPECT_TRUE(QComplex::parse(z.to_string()) == z);
  EXPECT_TRUE(z * z.inverse() == QComplex(1));
  EXPECT_THROW(QComplex::parse("abc"), std::invalid_argument);
}

// ---- properties ------------------------------------------------------------

TEST(NormProperties, OpBelowSchatten) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 40; ++t) {
    const Matrix m = random_float(1 + t % 7, 1 + (t * 3) % 8, rng);
    EXPECT_LE(op_norm(m), schatten1_norm(m) + 1e-12);
  }
}

TEST(NormProperties, KroneckerMultiplicative) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const Matrix u = random_float(1 + t % 4, 2 + t % 3, rng), v = random_float(3, 1 + t % 5, rng);
    EXPECT_NEAR(op_norm(kron(u, v)), op_norm(u) * op_norm(v), 1e-9);
  }
}

TEST(NormProperties, RankOneOuterProduct) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const Matrix y = random_float(6, 1, rng), x = random_float(6, 1, rng);
    const Matrix r1 = y * x.adjoint();
    const double expected = op_norm(y) * op_norm(x);
    EXPECT_NEAR(op_norm(r1), expected, 1e-9);
    EXPECT_NEAR(schatten1_norm(r1), expected, 1e-9);
  }
}

TEST(NormProperties, ExactArithmeticReproducible) {
  std::mt19937_64 r1(4), r2(4);
  const Matrix a1 = random_rational(6, 6, r1), b1 = random_rational(6, 6, r1);
  const Matrix a2 = random_rational(6, 6, r2), b2 = random_rational(6, 6, r2);
  EXPECT_TRUE(a1 * b1 + a1 == a2 * b2 + a2);
  EXPECT_TRUE(power(a1, 5) == power(a2, 5));
}

TEST(SvdOracle, MatchesEigenRelative) {
  std::mt19937_64 rng(5);
  const std::vector<std::pair<std::size_t, std::size_t>> shapes{{1, 1}, {3, 5}, {7, 7}, {12, 4}, {40, 40}, {90, 70}};
  for (auto [r, c] : shapes) {
    const Matrix m = random_float(r, c, rng);
    const auto ours = singular_values(m);
    const auto ref = eigen_singular_values(m);
    ASSERT_EQ(ours.size(), ref.size());
    for (std::size_t k = 0; k < ref.size(); ++k) EXPECT_LE(std::abs(ours[k] - ref[k]), 1e-10 * ref[0]) << r << "x" << c;
  }
}

TEST(SvdOracle, LargeMatrixRelativeAccuracy) {
  std::mt19937_64 rng(6);
  const Matrix m = random_float(256, 256, rng);
  const double ref = eigen_singular_values(m)[0];
  EXPECT_LE(std::abs(op_norm(m) - ref), 1e-10 * ref);
}

TEST(SvdOracle, IllConditioned) {
  // diag(1, 1e-8) rotated: small singular value must survive
  const double c = std::cos(0.3), s = std::sin(0.3);
  Matrix m = Matrix::from_rows_float({{c, -s}, {s, c}}) * Matrix::from_rows_float({{1.0, 0.0}, {0.0, 1e-8}});
  const auto sv = singular_values(m);
  EXPECT_NEAR(sv[0], 1.0, 1e-14);
  EXPECT_NEAR(sv[1], 1e-8, 1e-20);
}

TEST(SvdParallel, AgreesWithSerial) {
  std::mt19937_64 rng(7);
  for (auto [r, c] : std::vector<std::pair<std::size_t, std::size_t>>{{2, 2}, {5, 9}, {33, 17}, {64, 64}, {100, 80}}) {
    const Matrix m = random_float(r, c, rng);
    const auto a = singular_values_serial(m), b = singular_values_parallel(m);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-12 * a[0]);
  }
}

TEST(SvdParallel, Deterministic) {
  std::mt19937_64 rng(8);
  const Matrix m = random_float(80, 80, rng);
  EXPECT_EQ(singular_values_parallel(m), singular_values_parallel(m));
}

TEST(NumericalRank, Basic) {
  EXPECT_EQ(numerical_rank(Matrix::from_rows_float({{1.0, 2.0}, {2.0, 4.0}})), 1u);
  EXPECT_EQ(numerical_rank(Matrix::identity(4).to_float()), 4u);
  EXPECT_EQ(numerical_rank(Matrix::zeros(3, 3, Backend::floating)), 0u);
}
