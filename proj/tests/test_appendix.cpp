#include <gtest/gtest.h>

#include "covol/appendix.hpp"

using namespace covol;
using namespace covol::appendix;

namespace {

const Precision P{30};

Matrix mat(std::initializer_list<std::initializer_list<long>> rows) {
  Matrix m;
  for (auto r : rows) {
    m.emplace_back();
    for (long v : r) m.back().push_back(mpq_class(v));
  }
  return m;
}

Elem elem(std::initializer_list<long> xs) {
  Elem e;
  for (long v : xs) e.push_back(mpq_class(v));
  return e;
}

long binom(long n, long k) {
  long r = 1;
  for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// discriminants and real-root counts computed separately with a CAS
struct CorpusEntry {
  const char* poly;
  long disc;
  int r1;
};
const CorpusEntry kCorpus[] = {
    {"1 0 0 -1 -1", -283, 2},    {"1 -2 1 -1", -23, 1},      {"1 -2 1 1", -31, 1},
    {"1 -2 0 -1", -59, 1},       {"1 -2 -2 -1", -83, 1},     {"1 -2 -1 -1", -87, 1},
    {"1 -1 1 2", -139, 1},       {"1 -1 0 0 1", 229, 0},     {"1 -1 -2 1 2", 257, 0},
    {"1 -2 -2 1 1", -331, 2},    {"1 -2 2 1 -1", -491, 2},   {"1 -1 -1 -1 -1", -563, 2},
    {"1 -2 0 -1 1", -643, 2},    {"1 -2 1 2 -2 1", 1609, 1}, {"1 -1 -1 0 1 1", 1649, 1},
    {"1 -2 -1 2 0 -1", 1777, 1}, {"1 -1 1 -1 0 -1", 2297, 1}, {"1 -1 -2 1 1 -1", 2617, 1},
    {"1 -2 0 1 0 1", 2665, 1},   {"1 0 -4 -1", 229, 3},
};

}  // namespace

TEST(Appendix, LinearAlgebra) {
  EXPECT_EQ(determinant({{2, 1}, {1, 1}}), 1);
  EXPECT_EQ(determinant({{0, 1, 2}, {1, 0, 3}, {4, -3, 8}}), -2);
  EXPECT_EQ(rank(mat({{1, 2}, {2, 4}})), 1);
  auto inv = inverse(mat({{2, 0}, {0, -2}}));
  ASSERT_TRUE(inv);
  EXPECT_EQ((*inv)[1][1], mpq_class(-1, 2));
  EXPECT_FALSE(inverse(mat({{1, 1}, {1, 1}})));
}

TEST(Appendix, PolynomialParsing) {
  auto f = parse_polynomial("1 0 0 -1 -1");
  EXPECT_EQ(degree(f), 4);
  EXPECT_EQ(f[0], -1);
  EXPECT_EQ(format_polynomial(f), "1 0 0 -1 -1");
  EXPECT_THROW(parse_polynomial("2 0 1"), PreconditionError);
  EXPECT_THROW(parse_polynomial("1"), PreconditionError);
  EXPECT_THROW(parse_polynomial("1 x 2"), PreconditionError);
}

TEST(Appendix, Discriminants) {
  EXPECT_EQ(poly_discriminant(parse_polynomial("1 0 1")), -4);
  EXPECT_EQ(poly_discriminant(parse_polynomial("1 -1 -1")), 5);
  EXPECT_EQ(poly_discriminant(parse_polynomial("1 0 0 -2")), -108);
  for (const auto& e : kCorpus) EXPECT_EQ(poly_discriminant(parse_polynomial(e.poly)), e.disc) << e.poly;
}

TEST(Appendix, CorpusFileMatchesFrozenTable) {
  auto corpus = read_corpus(CORPUS_FILE);
  ASSERT_EQ(corpus.size(), std::size(kCorpus));
  for (std::size_t i = 0; i < corpus.size(); ++i) EXPECT_EQ(format_polynomial(corpus[i]), kCorpus[i].poly);
}

TEST(Appendix, Irreducibility) {
  EXPECT_TRUE(is_irreducible(parse_polynomial("1 0 1")));
  EXPECT_FALSE(is_irreducible(parse_polynomial("1 0 -1")));
  EXPECT_FALSE(is_irreducible(parse_polynomial("1 0 0 0 4")));   // (x^2+2x+2)(x^2-2x+2)
  EXPECT_FALSE(is_irreducible(parse_polynomial("1 0 -5 0 6")));  // (x^2-2)(x^2-3)
  EXPECT_FALSE(is_irreducible(parse_polynomial("1 0 2 0 1")));   // (x^2+1)^2
  EXPECT_TRUE(is_irreducible(parse_polynomial("1 0 0 0 -2")));
  for (const auto& e : kCorpus) EXPECT_TRUE(is_irreducible(parse_polynomial(e.poly))) << e.poly;
}

TEST(Appendix, RootEnclosuresAndSignature) {
  auto enc = enclose_roots(parse_polynomial("1 0 -2"), P);
  ASSERT_EQ(enc.real_roots.size(), 2u);
  EXPECT_TRUE(enc.real_roots[1].re.overlaps(sqrt(PrecisionValue(2, P))));
  EXPECT_LT(enc.radii[0], 1e-25);
  for (const auto& e : kCorpus) {
    auto K = FieldByPolynomial::from_polynomial(parse_polynomial(e.poly), P);
    EXPECT_EQ(K.r1, e.r1) << e.poly;
    EXPECT_EQ(K.r1 + 2 * K.r2, K.d);
    EXPECT_TRUE(K.maximal) << e.poly;
  }
  EXPECT_FALSE(FieldByPolynomial::from_polynomial(parse_polynomial("1 0 0 -2"), P).maximal);
  EXPECT_THROW(FieldByPolynomial::from_polynomial(parse_polynomial("1 0 -1"), P), PreconditionError);
}

TEST(Appendix, ElementArithmeticAndTraces) {
  auto K = FieldByPolynomial::from_polynomial(parse_polynomial("1 0 0 -2"), P);
  auto t = K.theta();
  EXPECT_EQ(K.power(t, 3), elem({2, 0, 0}));
  EXPECT_EQ(K.trace(K.one()), 3);
  EXPECT_EQ(K.trace(t), 0);
  EXPECT_EQ(K.trace(K.power(t, 3)), 6);
  auto G = FieldByPolynomial::quadratic(5);  // x^2 - x - 1
  EXPECT_EQ(G.trace(G.theta()), 1);
  EXPECT_EQ(G.mul(G.theta(), G.theta()), elem({1, 1}));
  EXPECT_THROW(FieldByPolynomial::quadratic(8 * 9), PreconditionError);
}

TEST(Appendix, Parameters) {
  auto p200 = parameters(200);
  EXPECT_EQ(p200.s, 2);
  EXPECT_EQ(p200.l, 21);
  EXPECT_EQ(p200.r, 101);
  auto p4 = parameters(4);
  EXPECT_EQ(p4.s, 1);
  EXPECT_EQ(p4.l, 5);
  EXPECT_EQ(p4.r, 3);
  EXPECT_THROW(parameters(2), PreconditionError);
  for (int d = 3; d <= 300; ++d) {
    auto p = parameters(d);
    EXPECT_GT(2 * p.r, d);
    EXPECT_LE(p.r, 3 * d / 4);
    EXPECT_GE(binom(p.l + p.s, p.s), p.r);
  }
}

TEST(Appendix, MonomialSets) {
  auto m = monomial_sets(2, 3);
  EXPECT_EQ(m.S.size(), 10u);
  EXPECT_EQ(m.S[0], (Tuple{0, 0}));
  EXPECT_EQ(m.S[1], (Tuple{1, 0}));
  EXPECT_EQ(m.S[2], (Tuple{0, 1}));
  EXPECT_EQ(m.S2.size(), 28u);
  EXPECT_EQ(m.S2[static_cast<std::size_t>(m.doubling[1][2])], (Tuple{1, 1}));
  for (int s = 1; s <= 12; ++s)
    for (int l = 1; l <= 12; ++l) EXPECT_EQ(static_cast<long>(monomials(s, l).size()), binom(l + s, s)) << s << " " << l;
  EXPECT_THROW(monomial_sets(0, 1), PreconditionError);
}

TEST(Appendix, ReducedBasisGaussianIntegers) {
  auto K = FieldByPolynomial::quadratic(-4);
  auto rb = reduced_basis(K, 2, P);
  ASSERT_EQ(rb.norms.size(), 2u);
  EXPECT_TRUE(rb.norms[0].contains(mpq_class(1)));
  EXPECT_TRUE(rb.norms[1].contains(mpq_class(1)));
  EXPECT_TRUE(rb.product_ratio.contains(mpq_class(1, 2)));
  EXPECT_TRUE(rb.ties.empty());  // both norms are exact points
  EXPECT_TRUE(rb.holds());
}

TEST(Appendix, ReducedBasisGoldenField) {
  auto K = FieldByPolynomial::quadratic(5);
  auto rb = reduced_basis(K, 2, P);
  EXPECT_TRUE(rb.norms[0].contains(mpq_class(1)));
  auto phi = (1 + sqrt(PrecisionValue(5, P))) / 2;
  EXPECT_TRUE(rb.norms[1].overlaps(phi));
  EXPECT_NEAR(rb.norms[1].mid_double(), 1.618, 1e-3);
  EXPECT_TRUE(rb.holds());
}

TEST(Appendix, ReducedBasisCorpus) {
  for (const auto& e : kCorpus) {
    auto K = FieldByPolynomial::from_polynomial(parse_polynomial(e.poly), P);
    auto rb = reduced_basis(K, 2, P);
    EXPECT_TRUE(rb.holds()) << e.poly;
    std::vector<std::vector<mpz_class>> U;
    for (const auto& r : rb.transform) {
      U.emplace_back();
      for (long v : r) U.back().push_back(mpz_class(v));
    }
    EXPECT_EQ(abs(determinant(U)), 1);
  }
  EXPECT_THROW(reduced_basis(FieldByPolynomial::from_polynomial(parse_polynomial("1 0 0 -2"), P)), PreconditionError);
}

TEST(Appendix, TraceMatricesGaussian) {
  auto K = FieldByPolynomial::quadratic(-4);
  std::vector<Elem> z{K.one(), K.theta()};
  auto tc = trace_matrices(K, z, {K.one(), K.theta()});
  EXPECT_EQ(tc.M[0], mat({{2, 0}, {0, -2}}));
  EXPECT_EQ(tc.M[1], mat({{0, -2}, {-2, 0}}));
  EXPECT_EQ(tc.A[1], mat({{0, 1}, {-1, 0}}));
  EXPECT_TRUE(tc.generates);
  EXPECT_TRUE(tc.matches);
  EXPECT_TRUE(tc.multiplicative);
  EXPECT_THROW(trace_matrices(K, {K.one(), K.one()}, {K.one()}), PreconditionError);
  EXPECT_THROW(trace_matrices(K, z, {K.theta()}), PreconditionError);
  auto sub = trace_matrices(K, z, {K.one()});
  EXPECT_FALSE(sub.generates);
}

TEST(Appendix, TraceMatricesNonTrivial) {
  auto K = FieldByPolynomial::from_polynomial(parse_polynomial("1 0 -4 -1"), P);
  auto rb = reduced_basis(K, 2, P);
  auto tc = trace_matrices(K, rb.basis, {K.one(), K.theta(), K.mul(K.theta(), K.theta())});
  EXPECT_TRUE(tc.matches);
  EXPECT_TRUE(tc.multiplicative);
  EXPECT_TRUE(tc.generates);
}

TEST(Appendix, SpanDoubling) {
  auto K = FieldByPolynomial::from_polynomial(parse_polynomial("1 0 0 -1 -1"), P);
  std::vector<Tuple> S{{0}, {1}, {2}};
  auto c = span_doubling_check(K, {K.theta()}, S);
  EXPECT_EQ(c.rank_S, 3);
  EXPECT_EQ(c.rank_doubled, 4);
  EXPECT_TRUE(c.applies && c.holds);
  auto none = span_doubling_check(K, {K.one()}, S);
  EXPECT_FALSE(none.applies);
}

TEST(Appendix, FindYQuartic) {
  auto K = FieldByPolynomial::from_polynomial(parse_polynomial("1 0 0 -1 -1"), P);
  auto p = parameters(4);
  auto rb = reduced_basis(K, 2, P);
  auto ms = monomial_sets(p.s, p.l);
  std::vector<Tuple> S(ms.S.begin(), ms.S.begin() + p.r);
  auto fy = find_y(K, rb, p.s, p.l, p.r, S, P);
  ASSERT_EQ(fy.y.size(), 1u);
  // independent check: 1, y, y^2 span 3 dimensions
  Elem y = fy.y[0];
  EXPECT_EQ(rank(Matrix{K.one(), y, K.mul(y, y)}), 3);
  EXPECT_TRUE(fy.bound_ok);
  EXPECT_TRUE(fy.span.holds);
  EXPECT_EQ(fy.box, 15);
  for (long c : fy.coefficients[0]) EXPECT_LE(std::labs(c), fy.box);
  EXPECT_THROW(find_y(K, rb, 1, 5, 2, {{0}, {1}}, P), PreconditionError);
}

TEST(Appendix, CertifyCorpus) {
  for (const auto& e : kCorpus) {
    auto K = FieldByPolynomial::from_polynomial(parse_polynomial(e.poly), P);
    auto c = certify_field(K, 2, P);
    EXPECT_TRUE(c.ok) << e.poly;
    ASSERT_TRUE(c.y.has_value());
  }
  auto q = certify_field(FieldByPolynomial::quadratic(-4), 2, P);
  EXPECT_TRUE(q.ok);
  EXPECT_FALSE(q.y.has_value());
}

TEST(Appendix, CountBounds) {
  const long exact[][2] = {{10, 6}, {100, 61}, {1000, 607}, {10000, 6086}};
  for (const auto& row : exact) {
    auto c = count_bound_vs_quadratic(row[0], 1, 1, P);
    EXPECT_EQ(c.exact_quadratic, row[1]) << row[0];
    EXPECT_TRUE(c.holds) << row[0];
  }
  // C6 = C7 = 1 at X = 10: log2 10 * exp(sqrt(log2 log2 10))
  const double l = std::log2(10.0);
  EXPECT_NEAR(count_bound_log2(PrecisionValue(10, P), 1, 1).mid_double(), l * std::exp(std::sqrt(std::log2(l))), 1e-12);
  EXPECT_THROW(count_bound_log2(PrecisionValue(1, P), 1, 1), PreconditionError);
  EXPECT_THROW(degree_count_log2(199, PrecisionValue(10, P), 1, 1, 1), PreconditionError);
  const double s = std::sqrt(std::log2(200.0));
  EXPECT_NEAR(degree_count_log2(200, PrecisionValue(1024, P), 1, 1, 1).mid_double(),
              200 * std::exp(s) * std::log2(200.0) + 10 * std::exp(s), 1e-6);
  EXPECT_NEAR(polylog_count_log2(PrecisionValue(1024, P), 3, mpq_class(1, 2)).mid_double(), 3 * std::pow(10.0, 1.5), 1e-9);
}
