#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "opalg/chain.hpp"
#include "opalg/errors.hpp"
#include "opalg/norms.hpp"
#include "opalg/tensor.hpp"

using namespace opalg;

namespace {

Matrix random_rational(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<long> num(-5, 5), den(1, 4);
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m.set(i, j, QComplex(mpq_class(num(rng), den(rng)), mpq_class(num(rng), den(rng))));
  return m;
}

TensorElem random_tensor(std::size_t n, std::size_t terms, std::mt19937_64& rng) {
  TensorElem t(n);
  for (std::size_t k = 0; k < terms; ++k) t.add(random_rational(n, rng), random_rational(n, rng));
  return t;
}

Matrix shift(std::size_t n) {
  Matrix s(n, n);
  for (std::size_t i = 0; i + 1 < n; ++i) s.set(i, i + 1, QComplex(1));
  return s;
}

}  // namespace

TEST(Delta, FirstIsSingleTerm) {
  const Chain c = build_chain(ChainSpec::linear(4));
  const TensorElem d = build_delta(c, 1);
  ASSERT_EQ(d.term_count(), 1u);
  EXPECT_TRUE(d.terms()[0].left == c.e(1));
  EXPECT_TRUE(d.terms()[0].right == c.e(1));
}

TEST(Delta, SecondMatchesFormula) {
  const Chain c = build_chain(ChainSpec::linear(4));
  const Matrix f2 = c.e(2) - c.e(1);
  EXPECT_TRUE(flatten(build_delta(c, 2)) == kron(c.e(1), c.e(1)) + kron(f2, f2));
}

TEST(Delta, TermCountAndFlattenSize) {
  const Chain c = build_chain(ChainSpec::linear(4));
  const TensorElem d = build_delta(c, 3);
  EXPECT_EQ(d.term_count(), 3u);
  EXPECT_EQ(flatten(d).rows(), c.truncation_dim() * c.truncation_dim());
}

TEST(Delta, OutOfRange) {
  const Chain c = build_chain(ChainSpec::linear(4));
  EXPECT_THROW(build_delta(c, 0), ArgumentError);
  EXPECT_THROW(build_delta(c, 5), ArgumentError);
}

TEST(PiMap, SingleTerm) {
  std::mt19937_64 rng(1);
  const Matrix u = random_rational(3, rng), v = random_rational(3, rng);
  TensorElem t(3);
  t.add(u, v);
  EXPECT_TRUE(pi_map(t) == u * v);
}

TEST(PiMap, DeltaGivesChainElement) {
  const Chain c = build_chain(ChainSpec::linear(10));
  for (std::size_t n = 1; n <= 10; ++n) EXPECT_TRUE(pi_map(build_delta(c, n)) == c.e(n)) << n;
}

TEST(PiMap, HandExpansionUnitCoupling) {
  const Chain c = build_chain(ChainSpec::scalar(2, {QComplex(1)}));
  const Matrix& e1 = c.e(1);
  const Matrix& e2 = c.e(2);
  // e1^2 + (e2 - e1)^2 = e1 + e2 - e1 e2 - e2 e1 + e1 = e2
  const Matrix expected = e1 * e1 + (e2 - e1) * (e2 - e1);
  EXPECT_TRUE(expected == e2);
  EXPECT_TRUE(pi_map(build_delta(c, 2)) == expected);
}

TEST(Commutator, ChainElementsCommuteWithDeltas) {
  const Chain c = build_chain(ChainSpec::linear(10));
  for (std::size_t n = 1; n <= 10; ++n) {
    const TensorElem d = build_delta(c, n);
    for (std::size_t m = 1; m <= 10; ++m) EXPECT_TRUE(flatten(bimodule_commutator(c.e(m), d)).is_zero()) << m << "," << n;
  }
}

TEST(Commutator, ZeroElement) {
  const Chain c = build_chain(ChainSpec::linear(4));
  const TensorElem t = bimodule_commutator(Matrix::zeros(5, 5), build_delta(c, 3));
  EXPECT_TRUE(flatten(t).is_zero());
  EXPECT_EQ(t.term_count(), 6u);
}

TEST(Commutator, ShiftIsNotInAlgebra) {
  const Chain c = build_chain(ChainSpec::linear(4));
  EXPECT_FALSE(flatten(bimodule_commutator(shift(5), build_delta(c, 2))).is_zero());
}

TEST(Commutator, DimensionMismatch) {
  const Chain c = build_chain(ChainSpec::linear(4));
  EXPECT_THROW(bimodule_commutator(Matrix::identity(3), build_delta(c, 2)), DimensionError);
  TensorElem t(3);
  EXPECT_THROW(t.add(Matrix::identity(3), Matrix::identity(4)), DimensionError);
}

TEST(Flatten, IdentityTensor) {
  TensorElem t(3);
  t.add(Matrix::identity(3), Matrix::identity(3));
  EXPECT_TRUE(flatten(t) == Matrix::identity(9));
}

TEST(Flatten, SingleTermIsKron) {
  std::mt19937_64 rng(2);
  const Matrix u = random_rational(2, rng), v = random_rational(2, rng);
  TensorElem t(2);
  t.add(u, v);
  EXPECT_TRUE(flatten(t) == kron(u, v));
}

TEST(Flatten, DifferenceIsZero) {
  const Chain c = build_chain(ChainSpec::linear(4));
  const TensorElem d = build_delta(c, 2);
  EXPECT_TRUE(flatten(d - d).is_zero());
}

TEST(Flatten, LegActionsProperty) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + trial % 3;
    const TensorElem t = random_tensor(n, 1 + trial % 4, rng);
    const Matrix a = random_rational(n, rng);
    const Matrix id = Matrix::identity(n);
    EXPECT_TRUE(flatten(t.left_action(a)) == kron(a, id) * flatten(t));
    EXPECT_TRUE(flatten(t.right_action(a)) == flatten(t) * kron(id, a));
  }
}

TEST(Flatten, Linear) {
  std::mt19937_64 rng(4);
  const TensorElem s = random_tensor(3, 2, rng), t = random_tensor(3, 3, rng);
  const QComplex c(mpq_class(2, 3), mpq_class(-1));
  EXPECT_TRUE(flatten(s + c * t) == flatten(s) + c * flatten(t));
}

TEST(NormBoundsTest, RankOneTight) {
  std::mt19937_64 rng(5);
  const Matrix u = random_rational(3, rng), v = random_rational(3, rng);
  TensorElem t(3);
  t.add(u, v);
  const NormBounds nb = tensor_norm_bounds(t);
  const double expected = op_norm(u) * op_norm(v);
  EXPECT_NEAR(nb.lower, expected, 1e-9);
  EXPECT_NEAR(nb.upper, expected, 1e-9);
}

TEST(NormBoundsTest, Zero) {
  const NormBounds nb = tensor_norm_bounds(TensorElem(3));
  EXPECT_EQ(nb.lower, 0.0);
  EXPECT_EQ(nb.upper, 0.0);
  const Chain c = build_chain(ChainSpec::linear(2));
  const NormBounds nz = tensor_norm_bounds(bimodule_commutator(c.e(1), build_delta(c, 2)));
  EXPECT_EQ(nz.lower, 0.0);
  EXPECT_EQ(nz.upper, 0.0);
}

TEST(NormBoundsTest, TwoOrthogonalProjections) {
  TensorElem t(2);
  t.add(Matrix::unit(2, 0, 0), Matrix::unit(2, 0, 0));
  t.add(Matrix::unit(2, 1, 1), Matrix::unit(2, 1, 1));
  const NormBounds nb = tensor_norm_bounds(t);
  EXPECT_NEAR(nb.lower, 1.0, 1e-12);
  EXPECT_NEAR(nb.upper, 2.0, 1e-12);
}

TEST(NormBoundsTest, RegroupingMergesProportionalLegs) {
  TensorElem t(2);
  const Matrix u = Matrix::from_rows({{1, 2}, {0, 1}});
  t.add(u, Matrix::identity(2));
  t.add(QComplex(2) * u, Matrix::unit(2, 0, 1));
  const TensorElem g = regroup(t);
  EXPECT_EQ(g.term_count(), 1u);
  EXPECT_TRUE(flatten(g) == flatten(t));
}

TEST(NormBoundsTest, LowerNeverExceedsUpper) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 25; ++trial) {
    const TensorElem t = random_tensor(2 + trial % 3, 1 + trial % 5, rng);
    const NormBounds nb = tensor_norm_bounds(t);
    EXPECT_LE(nb.lower, nb.upper + 1e-9);
  }
}

TEST(Unitize, OneStepChain) {
  const Chain c = build_chain(ChainSpec::linear(1));
  const TensorElem d = build_delta(c, 1);
  const Matrix one = Matrix::identity(3);
  const TensorElem m = unitize_diagonal(d, c.e(1), one);
  const Matrix co = one - c.e(1);
  EXPECT_TRUE(flatten(m) == kron(c.e(1), c.e(1)) + kron(co, co));
  EXPECT_TRUE(pi_map(m) == one);
}

TEST(Unitize, DefaultChainAllN) {
  const Chain c = build_chain(ChainSpec::linear(10));
  const Matrix one = Matrix::identity(c.truncation_dim());
  for (std::size_t n = 1; n <= 10; ++n) {
    const TensorElem d = build_delta(c, n);
    EXPECT_TRUE(pi_map(unitize_diagonal(d, pi_map(d), one)) == one) << n;
  }
}

TEST(Unitize, IdentityCollapses) {
  TensorElem d(3);
  d.add(Matrix::identity(3), Matrix::identity(3));
  const TensorElem m = unitize_diagonal(d, Matrix::identity(3), Matrix::identity(3));
  EXPECT_TRUE(flatten(m) == Matrix::identity(9));
}

TEST(Unitize, WrongUnitRejected) {
  const Chain c = build_chain(ChainSpec::linear(4));
  const TensorElem d = build_delta(c, 3);
  EXPECT_THROW(unitize_diagonal(d, c.e(2), Matrix::identity(5)), PreconditionError);
  EXPECT_THROW(unitize_diagonal(d, c.e(3), QComplex(2) * Matrix::identity(5)), PreconditionError);
}

TEST(Mbad, ChainSampleHasZeroConstant) {
  const Chain c = build_chain(ChainSpec::linear(6));
  std::vector<TensorElem> deltas;
  for (std::size_t n = 1; n <= 6; ++n) deltas.push_back(build_delta(c, n));
  std::vector<SampleElement> sample;
  for (std::size_t m = 1; m <= 5; ++m) sample.push_back({"e" + std::to_string(m), c.e(m), QComplex()});
  const MbadReport r = certify_mbad(deltas, c, sample);
  EXPECT_TRUE(r.verdict);
  EXPECT_EQ(r.C, 0.0);
  for (std::size_t m = 1; m <= 5; ++m) {
    const MbadRecord& rec = r.records[m - 1];
    EXPECT_TRUE(rec.in_span);
    EXPECT_EQ(rec.commutator_upper, 0.0);
    EXPECT_EQ(rec.approx_identity_residual, 0.0);
    // a pi(Delta_n) = a from n = m on
    EXPECT_EQ(rec.eventual_index, m);
  }
  // K = max ||e_n|| over the deltas used
  EXPECT_NEAR(r.K, std::sqrt(10.0), 1e-9);
}

TEST(Mbad, ZeroSampleTrivial) {
  const Chain c = build_chain(ChainSpec::linear(4));
  const MbadReport r = certify_mbad({build_delta(c, 4)}, c, {{"zero", Matrix::zeros(5, 5), QComplex()}});
  EXPECT_TRUE(r.verdict);
  const MbadRecord& rec = r.records[0];
  EXPECT_EQ(rec.a_norm, 0.0);
  EXPECT_EQ(rec.commutator_upper, 0.0);
  EXPECT_EQ(rec.approx_identity_residual, 0.0);
  EXPECT_EQ(rec.unitized_lower, 0.0);
  EXPECT_EQ(r.C, 0.0);
}

TEST(Mbad, UnitizedEstimateHoldsAndVanishes) {
  const Chain c = build_chain(ChainSpec::linear(6));
  std::vector<TensorElem> deltas;
  for (std::size_t n = 1; n <= 6; ++n) deltas.push_back(build_delta(c, n));
  const Matrix a = c.e(2) + QComplex(mpq_class(-1, 2)) * c.e(4);
  const MbadReport r = certify_mbad(deltas, c, {{"mix", a, QComplex(3)}});
  ASSERT_TRUE(r.verdict);
  const MbadRecord& rec = r.records[0];
  EXPECT_LE(rec.unitized_lower, rec.unitized_step_bound + 1e-9);
  EXPECT_LE(rec.unitized_lower, rec.unitized_uniform_bound + 1e-9);
  // x = a + 3 I against M_n for n >= 4: the commutator is exactly zero
  const Matrix one = Matrix::identity(c.truncation_dim());
  const Matrix x = a + QComplex(3) * one;
  for (std::size_t n = 4; n <= 6; ++n) {
    const TensorElem m = unitize_diagonal(deltas[n - 1], c.e(n), one);
    EXPECT_TRUE(flatten(bimodule_commutator(x, m)).is_zero()) << n;
  }
  const TensorElem m1 = unitize_diagonal(deltas[0], c.e(1), one);
  EXPECT_FALSE(flatten(bimodule_commutator(x, m1)).is_zero());
}

TEST(Mbad, OutOfSpanFlaggedNotFatal) {
  const Chain c = build_chain(ChainSpec::linear(4));
  std::vector<TensorElem> deltas{build_delta(c, 3), build_delta(c, 4)};
  const MbadReport r =
      certify_mbad(deltas, c, {{"e1", c.e(1), QComplex()}, {"shift", shift(5), QComplex()}});
  EXPECT_TRUE(r.records[0].in_span);
  EXPECT_TRUE(r.records[0].pass);
  EXPECT_FALSE(r.records[1].in_span);
  EXPECT_FALSE(r.records[1].pass);
  EXPECT_TRUE(r.verdict);
}

TEST(Expectation, MatrixAlgebraGivesScalar) {
  const FiniteDiagonal d = matrix_algebra_diagonal(2);
  const DiagonalCheck dc = check_diagonal(d);
  EXPECT_TRUE(dc.pi_is_identity_on_algebra);
  EXPECT_TRUE(dc.commutes_with_algebra);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix x = random_rational(2, rng);
    EXPECT_TRUE(expectation_from_diagonal(d, x) == x.q(0, 0) * Matrix::identity(2));
  }
}

TEST(Expectation, MatrixAlgebraThree) {
  const FiniteDiagonal d = matrix_algebra_diagonal(3);
  EXPECT_TRUE(check_diagonal(d).commutes_with_algebra);
  std::mt19937_64 rng(8);
  const Matrix x = random_rational(3, rng);
  const ExpectationReport r = certify_expectation(d, {x}, {Matrix::identity(3)});
  EXPECT_TRUE(r.pass);
}

TEST(Expectation, SkewIdempotentChain) {
  for (long t : {1L, 10L, 100L, -7L}) {
    const FiniteDiagonal d = skew_idempotent_diagonal(QComplex(t));
    const Matrix e = Matrix::from_rows({{1, t}, {0, 0}});
    const Matrix p = Matrix::unit(2, 0, 0);
    EXPECT_TRUE(e * p == p);
    EXPECT_TRUE(p * e == e);
    EXPECT_TRUE(expectation_from_diagonal(d, p) == e);
    for (const auto& step : expectation_chain(d, e, p)) EXPECT_TRUE(step == e);
    EXPECT_NEAR(op_norm(expectation_from_diagonal(d, p)), std::sqrt(1.0 + double(t * t)), 1e-8);
    const Matrix id = Matrix::identity(2);
    EXPECT_TRUE(certify_expectation(d, {p, Matrix::from_rows({{3, 1}, {-2, 5}})}, {id, e, id - e}).pass);
  }
}

TEST(Expectation, IdentityFixed) {
  for (const FiniteDiagonal& d : {matrix_algebra_diagonal(2), skew_idempotent_diagonal(QComplex(4))})
    EXPECT_TRUE(expectation_from_diagonal(d, Matrix::identity(2)) == Matrix::identity(2));
}

TEST(Expectation, DetectsNonCommutantSample) {
  const FiniteDiagonal d = skew_idempotent_diagonal(QComplex(2));
  // p does not commute with e, so E(p) = e != p: the fixing property must fail
  const ExpectationReport r = certify_expectation(d, {Matrix::identity(2)}, {Matrix::unit(2, 0, 0)});
  EXPECT_FALSE(r.fixes_commutant);
  EXPECT_FALSE(r.pass);
}

TEST(Expectation, DimensionMismatch) {
  EXPECT_THROW(expectation_from_diagonal(matrix_algebra_diagonal(2), Matrix::identity(3)), DimensionError);
}
