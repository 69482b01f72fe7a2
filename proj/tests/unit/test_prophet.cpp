#include <gtest/gtest.h>

#include <stdexcept>

#include "oppnet/prophet.hpp"
#include "oppnet/rng.hpp"
#include "oppnet/routing.hpp"

namespace oppnet {
namespace {

constexpr double kTol = 1e-12;

double repeated_product(double p, double gamma, int k) {
  for (int i = 0; i < k; ++i) p *= gamma;
  return p;
}

TEST(ProphetFormula, Encounter) {
  EXPECT_NEAR(prophet_encounter(0.0, 0.75), 0.75, kTol);
  EXPECT_NEAR(prophet_encounter(0.75, 0.75), 0.75 + 0.25 * 0.75, kTol);
  EXPECT_NEAR(prophet_encounter(0.75, 0.75), 0.9375, kTol);
  EXPECT_NEAR(prophet_encounter(1.0, 0.75), 1.0, kTol);
  EXPECT_THROW(prophet_encounter(1.5, 0.75), std::domain_error);
  EXPECT_THROW(prophet_encounter(-0.1, 0.75), std::domain_error);
}

TEST(ProphetFormula, Aging) {
  EXPECT_NEAR(prophet_age(0.5, 1, 0.98), 0.49, kTol);
  EXPECT_NEAR(prophet_age(1.0, 10, 0.98), repeated_product(1.0, 0.98, 10), kTol);
  EXPECT_EQ(prophet_age(0.3, 0, 0.98), 0.3);
  EXPECT_EQ(prophet_age(0.0, 100, 0.98), 0.0);
}

TEST(ProphetFormula, Transitive) {
  EXPECT_NEAR(prophet_transitive(0.0, 1.0, 1.0, 0.25), 0.25, kTol);
  EXPECT_NEAR(prophet_transitive(0.4, 0.0, 0.9, 0.25), 0.4, kTol);
  EXPECT_NEAR(prophet_transitive(0.5, 0.8, 0.5, 0.25), 0.55, kTol);
}

TEST(ProphetFormula, AgingIsAdditive) {
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    const double p = rng.uniform01();
    const double a = static_cast<double>(rng.uniform_int(0, 500));
    const double b = static_cast<double>(rng.uniform_int(0, 500));
    EXPECT_NEAR(prophet_age(prophet_age(p, a, 0.98), b, 0.98), prophet_age(p, a + b, 0.98), kTol);
  }
}

TEST(ProphetFormula, RangeInvariantUnderRandomSequences) {
  Rng rng(11);
  for (int seq = 0; seq < 200000; ++seq) {
    double p = rng.uniform01();
    const int len = 1 + static_cast<int>(rng.uniform_int(0, 7));
    for (int k = 0; k < len; ++k) {
      switch (rng.uniform_int(0, 2)) {
        case 0: p = prophet_encounter(p, 0.75); break;
        case 1: p = prophet_age(p, static_cast<double>(rng.uniform_int(0, 1000)), 0.98); break;
        default: p = prophet_transitive(p, rng.uniform01(), rng.uniform01(), 0.25); break;
      }
      ASSERT_GE(p, 0.0);
      ASSERT_LE(p, 1.0);
    }
  }
}

TEST(ProphetDecide, StrictOrder) {
  EXPECT_TRUE(prophet_should_forward(0.3, 0.6, false));
  EXPECT_FALSE(prophet_should_forward(0.6, 0.3, false));
  EXPECT_FALSE(prophet_should_forward(0.5, 0.5, false));
  EXPECT_TRUE(prophet_should_forward(0.9, 0.0, true));
}

TEST(ProphetTable, AgesByWholeUnits) {
  ProphetParams params;
  params.aging_unit = 30.0;
  ProphetTable t(0, 3, params);
  t.encounter(1);
  t.age_to(29.0);
  EXPECT_EQ(t.get(1), 0.75);
  t.age_to(65.0);
  EXPECT_NEAR(t.get(1), 0.75 * 0.98 * 0.98, kTol);
  EXPECT_EQ(t.last_aged(), 60.0);
  t.age_to(90.0);
  EXPECT_NEAR(t.get(1), 0.75 * 0.98 * 0.98 * 0.98, kTol);
}

TEST(ProphetTable, TransitiveSkipsSelfAndPeer) {
  ProphetParams params;
  ProphetTable a(0, 4, params);
  a.encounter(1);
  const std::vector<double> peer{0.9, 0.0, 0.8, 0.4};
  a.transitive(1, peer);
  EXPECT_EQ(a.get(0), 0.0);
  EXPECT_EQ(a.get(1), 0.75);
  EXPECT_NEAR(a.get(2), 0.75 * 0.8 * 0.25, kTol);
  EXPECT_NEAR(a.get(3), 0.75 * 0.4 * 0.25, kTol);
}

TEST(ProphetRouter, ContactUpdatesBothSides) {
  ProphetParams params;
  ProphetRouter r(4, params);
  r.on_contact_up(1, 2, 0.0);
  r.on_contact_up(0, 1, 0.0);
  EXPECT_NEAR(r.table(0).get(1), 0.75, kTol);
  EXPECT_NEAR(r.table(1).get(0), 0.75, kTol);
  EXPECT_NEAR(r.table(1).get(2), 0.75, kTol);
  // 0 learns about 2 through 1.
  EXPECT_NEAR(r.table(0).get(2), 0.75 * 0.75 * 0.25, kTol);

  const Message m{0, 0, 2, 10, 0.0, 100.0};
  EXPECT_TRUE(r.should_replicate(0, 1, m, 0.0));
  EXPECT_FALSE(r.should_replicate(1, 0, Message{1, 1, 2, 10, 0.0, 100.0}, 0.0));
}

TEST(ProphetRouter, RangeHoldsOverRandomContacts) {
  ProphetParams params;
  ProphetRouter r(12, params);
  Rng rng(3);
  double now = 0.0;
  for (int i = 0; i < 5000; ++i) {
    now += static_cast<double>(rng.uniform_int(0, 120));
    const auto a = static_cast<NodeId>(rng.uniform_int(0, 11));
    auto b = static_cast<NodeId>(rng.uniform_int(0, 10));
    if (b >= a) ++b;
    r.on_contact_up(a, b, now);
  }
  for (NodeId n = 0; n < 12; ++n) {
    for (double v : r.table(n).values()) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0);
    }
  }
}

}  // namespace
}  // namespace oppnet
