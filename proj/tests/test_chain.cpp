#include <gtest/gtest.h>

#include <cmath>

#include "opalg/chain.hpp"
#include "opalg/errors.hpp"
#include "opalg/norms.hpp"
#include "opalg/serialize.hpp"

using namespace opalg;

TEST(BuildChain, SingleIdempotentPadded) {
  const Chain c = build_chain(ChainSpec::linear(1));
  EXPECT_EQ(c.truncation_dim(), 3u);
  const std::vector<QComplex> d{QComplex(1), QComplex(0), QComplex(0)};
  EXPECT_TRUE(c.e(1) == Matrix::diagonal(d));
}

TEST(BuildChain, ZeroCouplingGivesProjection) {
  const Chain c = build_chain(ChainSpec::scalar(2, {QComplex(0)}));
  const std::vector<QComplex> d{QComplex(1), QComplex(1), QComplex(0)};
  EXPECT_TRUE(c.e(2) == Matrix::diagonal(d));
}

TEST(BuildChain, UnitCouplingBlockForm) {
  const Chain c = build_chain(ChainSpec::scalar(2, {QComplex(1)}));
  EXPECT_TRUE(c.e(2) == Matrix::from_rows({{1, 0, 0}, {0, 1, 1}, {0, 0, 0}}));
}

TEST(BuildChain, TruncationRule) {
  // smallest odd index >= m_max + 1, dims(k) = k
  EXPECT_EQ(build_chain(ChainSpec::linear(4)).truncation_dim(), 5u);
  EXPECT_EQ(build_chain(ChainSpec::linear(5)).truncation_dim(), 7u);
  EXPECT_EQ(build_chain(ChainSpec::linear(20)).truncation_dim(), 21u);
}

TEST(BuildChain, TooSmallTruncationNamesDimension) {
  ChainSpec s = ChainSpec::linear(4);
  s.truncation_dim = 4;
  try {
    build_chain(s);
    FAIL() << "expected TruncationError";
  } catch (const TruncationError& e) {
    EXPECT_EQ(e.required_dimension(), 5u);
    EXPECT_NE(std::string(e.what()).find('5'), std::string::npos);
  }
}

TEST(BuildChain, InvalidSpecs) {
  ChainSpec s = ChainSpec::linear(4);
  s.dims = {1, 3, 3, 5, 6};
  EXPECT_THROW(build_chain(s), std::invalid_argument);

  ChainSpec few = ChainSpec::linear(4);
  few.couplings.pop_back();
  EXPECT_THROW(build_chain(few), std::invalid_argument);

  // |b_2k| must be nondecreasing
  EXPECT_THROW(build_chain(ChainSpec::scalar(4, {QComplex(3), QComplex(1)})), std::invalid_argument);
}

TEST(BuildChain, CustomDims) {
  ChainSpec s = ChainSpec::scalar(4, {QComplex(2), QComplex(5)});
  s.dims = {2, 3, 5, 6, 9};
  const Chain c = build_chain(s);
  EXPECT_EQ(c.truncation_dim(), 9u);
  EXPECT_TRUE(verify_semilattice(c).all_exact);
  EXPECT_EQ(exact_rank(c.e(1)), 2u);
  EXPECT_EQ(exact_rank(c.e(3)), 5u);
}

TEST(BuildChain, OperatorValuedCoupling) {
  ChainSpec s;
  s.m_max = 4;
  s.dims = {1, 3, 5, 7, 9};
  s.couplings = {Matrix::from_rows({{1, 2}, {0, -1}}), Matrix::from_rows({{3, 0}, {1, 4}})};
  const Chain c = build_chain(s);
  const SemilatticeReport r = verify_semilattice(c);
  EXPECT_TRUE(r.all_exact);
  const NormProfile p = norm_profile(c);
  EXPECT_TRUE(p.all_pass);
  EXPECT_GE(p.entries[1].norm, op_norm(s.couplings[0]) - 1e-12);
}

TEST(BuildChain, WrongCouplingShapeThrows) {
  ChainSpec s;
  s.m_max = 2;
  s.dims = {1, 3, 4};
  s.couplings = {Matrix::from_rows({{1, 2, 3}})};
  EXPECT_THROW(build_chain(s), ArgumentError);
}

TEST(Semilattice, AdjacentProduct) {
  const Chain c = build_chain(ChainSpec::linear(4));
  EXPECT_TRUE(c.e(3) * c.e(4) == c.e(3));
  EXPECT_TRUE(c.e(4) * c.e(3) == c.e(3));
  EXPECT_TRUE(c.e(1) * c.e(1) == c.e(1));
}

TEST(Semilattice, FullTwentyByTwentyTable) {
  const Chain c = build_chain(ChainSpec::linear(20));
  const SemilatticeReport r = verify_semilattice(c);
  EXPECT_EQ(r.pairs_checked, 400u);
  EXPECT_TRUE(r.all_exact);
  EXPECT_FALSE(r.approximate);
  EXPECT_TRUE(r.failures.empty());
}

TEST(Semilattice, IndependentProductOracle) {
  // recompute every product directly rather than through the verifier
  const Chain c = build_chain(ChainSpec::scalar(8, {QComplex(mpq_class(1, 3)), QComplex(2), QComplex(-5), QComplex(7)}));
  for (std::size_t m = 1; m <= 8; ++m)
    for (std::size_t n = 1; n <= 8; ++n) EXPECT_TRUE(c.e(m) * c.e(n) == c.e(std::min(m, n))) << m << "," << n;
}

TEST(Semilattice, ComplexRationalCouplings) {
  const Chain c = build_chain(
      ChainSpec::scalar(6, {QComplex(mpq_class(1, 2), mpq_class(1)), QComplex(2, -1), QComplex(mpq_class(-3), 3)}));
  EXPECT_TRUE(verify_semilattice(c).all_exact);
  for (const auto& e : c.idempotents()) EXPECT_TRUE(is_idempotent(e, Tolerance::exact()));
}

TEST(Semilattice, FloatChainIsFlaggedApproximate) {
  ChainSpec s;
  s.m_max = 4;
  s.couplings = {Matrix::from_rows_float({{std::sqrt(2.0)}}), Matrix::from_rows_float({{std::acos(-1.0)}})};
  const Chain c = build_chain(s);
  EXPECT_FALSE(c.is_exact());
  const SemilatticeReport r = verify_semilattice(c);
  EXPECT_TRUE(r.approximate);
  EXPECT_FALSE(r.all_exact);
  EXPECT_TRUE(r.all_pass);
}

TEST(Semilattice, SerialMatchesParallel) {
  const Chain c = build_chain(ChainSpec::linear(14));
  const auto a = verify_semilattice(c), b = verify_semilattice_serial(c);
  EXPECT_EQ(a.pairs_checked, b.pairs_checked);
  EXPECT_EQ(a.all_exact, b.all_exact);
  EXPECT_EQ(a.failures, b.failures);
}

TEST(Semilattice, DetectsBrokenChain) {
  const Chain good = build_chain(ChainSpec::linear(4));
  std::vector<Matrix> es = good.idempotents();
  es[2].set(0, 1, QComplex(1));
  const Chain bad(good.spec(), es, good.truncation_dim());
  const SemilatticeReport r = verify_semilattice(bad);
  EXPECT_FALSE(r.all_exact);
  EXPECT_FALSE(r.failures.empty());
}

TEST(NormProfileTest, FirstIsOne) {
  EXPECT_NEAR(norm_profile(build_chain(ChainSpec::linear(2))).entries[0].norm, 1.0, 1e-12);
}

TEST(NormProfileTest, ScalarClosedForm) {
  const Chain c = build_chain(ChainSpec::linear(20));
  const NormProfile p = norm_profile(c);
  ASSERT_EQ(p.entries.size(), 20u);
  EXPECT_TRUE(p.all_pass);
  double previous = 0.0;
  for (std::size_t k = 1; k <= 10; ++k) {
    const double nk = p.entries[2 * k - 1].norm;
    EXPECT_NEAR(nk, std::sqrt(1.0 + double(k * k)), 1e-8);
    EXPECT_NEAR(nk * nk - 1.0 - double(k * k), 0.0, 1e-8);
    EXPECT_GE(nk, double(k));
    EXPECT_GT(nk, previous);
    previous = nk;
    EXPECT_NEAR(p.entries[2 * k - 2].norm, 1.0, 1e-9);
  }
}

TEST(NormProfileTest, ComplexScalarClosedForm) {
  const QComplex b(mpq_class(3, 2), mpq_class(-2));
  const Chain c = build_chain(ChainSpec::scalar(2, {b}));
  EXPECT_NEAR(norm_profile(c).entries[1].norm, std::sqrt(1.0 + 2.25 + 4.0), 1e-10);
}

TEST(NormProfileTest, PaddingInvariance) {
  ChainSpec s = ChainSpec::linear(9);
  const NormProfile p0 = norm_profile(build_chain(s));
  for (std::size_t extra : {1u, 4u, 13u}) {
    s.truncation_dim = 11 + extra;
    const Chain padded = build_chain(s);
    const NormProfile p1 = norm_profile(padded);
    for (std::size_t k = 0; k < p0.entries.size(); ++k) EXPECT_NEAR(p0.entries[k].norm, p1.entries[k].norm, 1e-12);
    EXPECT_TRUE(verify_semilattice(padded).all_exact);
  }
}

TEST(ChainJson, RoundTrip) {
  const Chain c = build_chain(ChainSpec::scalar(5, {QComplex(mpq_class(1, 2), 1), QComplex(4)}));
  const json j = chain_to_json(c);
  EXPECT_EQ(j["schema"], "opalg.chain/1");
  const Chain back = chain_from_json(json::parse(j.dump()));
  ASSERT_EQ(back.m_max(), c.m_max());
  for (std::size_t n = 1; n <= c.m_max(); ++n) EXPECT_TRUE(back.e(n) == c.e(n));
}

TEST(ChainJson, TamperedEntriesRejected) {
  json j = chain_to_json(build_chain(ChainSpec::linear(2)));
  j["idempotents"][0]["entries"][0] = "2";
  EXPECT_THROW(chain_from_json(j), ArgumentError);
}
