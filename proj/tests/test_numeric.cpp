#include <gtest/gtest.h>

#include "covol/arith.hpp"
#include "covol/numeric.hpp"
#include "covol/zeta.hpp"

using namespace covol;

namespace {

// 60-digit reference values (mpmath)
const char* kPi = "3.14159265358979323846264338327950288419716939937510582097494";
const char* kZeta2 = "1.64493406684822643647241516664602518921894990120679843773556";
const char* kZeta3 = "1.20205690315959428539973816151144999076498629234049888179227";
const char* kCatalan = "0.915965594177219015054603514932384110774149374281672134266498";
const char* kPiCubedOver32 = "0.96894614625936938048363484584691860006954026768391";

PrecisionValue ref(const char* s) { return PrecisionValue::from_decimal(s, Precision{80}); }

bool encloses(const PrecisionValue& v, const char* s) {
  // the reference is itself rounded at ~1e-50
  return v.widened(PrecisionValue::from_decimal("1e-48", Precision{80})).overlaps(ref(s));
}

}  // namespace

TEST(Precision, BitsGrowWithDigits) {
  EXPECT_GT(Precision{64}.bits(), Precision{40}.bits());
  EXPECT_EQ(Precision{40}.doubled().digits, 80);
}

TEST(Interval, PiEnclosure) {
  auto p = PrecisionValue::pi(Precision{40});
  EXPECT_TRUE(encloses(p, kPi));
  EXPECT_LT(p.radius_upper(), 1e-40);
}

TEST(Interval, ArithmeticContainsExactRational) {
  Precision prec{30};
  auto third = PrecisionValue::from_rational(mpq_class(1, 3), prec);
  auto seventh = PrecisionValue::from_rational(mpq_class(-1, 7), prec);
  EXPECT_TRUE((third + seventh).contains(mpq_class(4, 21)));
  EXPECT_TRUE((third - seventh).contains(mpq_class(10, 21)));
  EXPECT_TRUE((third * seventh).contains(mpq_class(-1, 21)));
  EXPECT_TRUE((third / seventh).contains(mpq_class(-7, 3)));
  EXPECT_TRUE(pow(seventh, 3).contains(mpq_class(-1, 343)));
  EXPECT_TRUE(pow(seventh, -2).contains(mpq_class(49)));
}

TEST(Interval, SqrtLogExp) {
  Precision prec{30};
  EXPECT_TRUE(sqrt(PrecisionValue(49, prec)).contains(mpq_class(7)));
  EXPECT_TRUE(log2(PrecisionValue(1024, prec)).contains(mpq_class(10)));
  EXPECT_TRUE(log(exp(PrecisionValue(3, prec))).widened(PrecisionValue::from_decimal("1e-25", prec)).contains(mpq_class(3)));
  EXPECT_THROW(log(PrecisionValue(0, prec)), PreconditionError);
  EXPECT_THROW(sqrt(PrecisionValue(-1, prec)), PreconditionError);
}

TEST(Interval, DivisionByZeroEnclosureRejected) {
  Precision prec{20};
  auto z = hull(PrecisionValue(-1, prec), PrecisionValue(1, prec));
  EXPECT_THROW(PrecisionValue(1, prec) / z, PreconditionError);
}

TEST(Interval, MixedSignMultiplication) {
  Precision prec{20};
  auto a = hull(PrecisionValue(-2, prec), PrecisionValue(3, prec));
  auto b = hull(PrecisionValue(-5, prec), PrecisionValue(4, prec));
  auto c = a * b;
  EXPECT_TRUE(c.contains(mpq_class(-15)));
  EXPECT_TRUE(c.contains(mpq_class(12)));
  EXPECT_TRUE(c.contains(mpq_class(10)));
  EXPECT_FALSE(c.contains(mpq_class(16)));
}

TEST(Interval, DecimalBallEnclosesInterval) {
  Precision prec{40};
  auto v = PrecisionValue::pi(prec) / 7;
  auto ball = v.decimal(10);
  auto mid = PrecisionValue::from_decimal(ball.mid, Precision{60});
  auto rad = PrecisionValue::from_decimal(ball.rad, Precision{60});
  EXPECT_TRUE(mid.widened(rad).contains(v));
}

TEST(Interval, CompareAndEscalation) {
  Precision prec{20};
  auto a = PrecisionValue(1, prec);
  auto b = PrecisionValue(2, prec);
  EXPECT_EQ(compare(a, b), -1);
  EXPECT_EQ(compare(b, a), 1);
  EXPECT_EQ(compare(a, a), 0);
  EXPECT_FALSE(compare(hull(a, b), a).has_value());

  int calls = 0;
  // pi < 355/113 by about 2.7e-7; a blur of 10^-digits hides that until 8 digits
  bool r = decide_less_equal(
      [&](Precision p) {
        ++calls;
        auto blur = pow(PrecisionValue(10, Precision{30}), -p.digits);
        return std::pair{PrecisionValue::pi(Precision{30}).widened(blur),
                         PrecisionValue::from_rational(mpq_class(355, 113), Precision{30})};
      },
      Precision{2});
  EXPECT_TRUE(r);
  EXPECT_EQ(calls, 3);

  EXPECT_THROW(decide_less_equal([&](Precision) { return std::pair{hull(a, b), hull(a, b)}; }, prec, 4),
               UndecidableError);
}

TEST(Arith, SmallHelpers) {
  EXPECT_EQ(arith::primes_up_to(30).size(), 10u);
  EXPECT_EQ(arith::prime_power_base(8), 2);
  EXPECT_EQ(arith::prime_power_base(12), 0);
  EXPECT_EQ(arith::prime_power_base(49), 7);
  EXPECT_TRUE(arith::is_squarefree(30));
  EXPECT_FALSE(arith::is_squarefree(-12));
  EXPECT_EQ(arith::kronecker(-4, 5), 1);
  EXPECT_EQ(arith::kronecker(-4, 3), -1);
  EXPECT_EQ(arith::kronecker(5, 2), -1);
  EXPECT_EQ(arith::bernoulli(2), mpq_class(1, 6));
  EXPECT_EQ(arith::bernoulli(12), mpq_class(-691, 2730));
  EXPECT_EQ(arith::bernoulli(3), mpq_class(0));
}

TEST(Zeta, ClosedFormsEnclosed) {
  Precision prec{40};
  auto z2 = zeta::riemann(2, prec);
  EXPECT_TRUE(encloses(z2, kZeta2));
  EXPECT_LT(z2.radius_upper(), 1e-35);
  EXPECT_TRUE(encloses(zeta::riemann(3, prec), kZeta3));
  EXPECT_TRUE(encloses(zeta::dirichlet_l(-4, 2, prec), kCatalan));
  EXPECT_TRUE(encloses(zeta::dirichlet_l(-4, 3, prec), kPiCubedOver32));
  EXPECT_THROW(zeta::riemann(1, prec), PreconditionError);
}

TEST(Zeta, DirectTruncationAgrees) {
  Precision prec{30};
  for (long D : {-3L, -4L, 5L, 8L, -23L}) {
    for (long s : {2L, 3L}) {
      auto fast = zeta::dirichlet_l(D, s, prec);
      auto slow = zeta::dirichlet_l_direct(D, s, 2000, prec);
      EXPECT_TRUE(slow.contains(fast)) << D << " " << s;
    }
  }
}

TEST(Zeta, LAtOneTwoRoutes) {
  Precision prec{30};
  auto series = zeta::l_at_one_series(-4, 100000, prec);
  auto closed = zeta::l_at_one_class_number(-4, 1, prec);
  EXPECT_TRUE(series.contains(closed));
  EXPECT_TRUE(encloses(closed * 4, kPi));
}

TEST(Zeta, PrecisionRefinementNeverWidens) {
  for (long s : {2L, 3L, 5L}) {
    auto lo = zeta::riemann(s, Precision{20});
    auto hi = zeta::riemann(s, Precision{40});
    EXPECT_LE(hi.radius_upper(), lo.radius_upper());
    EXPECT_TRUE(lo.overlaps(hi));
  }
}
