#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "smde/rng.hpp"

using smde::Philox4x32;
using smde::RandomStream;

// Known-answer vectors of the Random123 reference implementation.
TEST(Philox, KnownAnswerZero) {
  const auto out = Philox4x32::block({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (Philox4x32::Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
}

TEST(Philox, KnownAnswerOnes) {
  const auto out = Philox4x32::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                                     {0xffffffff, 0xffffffff});
  EXPECT_EQ(out, (Philox4x32::Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(Philox, KnownAnswerPi) {
  const auto out = Philox4x32::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                                     {0xa4093822, 0x299f31d0});
  EXPECT_EQ(out, (Philox4x32::Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RandomStream, SameSeedSameStream) {
  RandomStream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(RandomStream, StreamsDiffer) {
  RandomStream a(42, 0), b(42, 1), c(43, 0), d(42, smde::auxiliary_stream(0));
  std::set<std::uint64_t> firsts{a.next_u64(), b.next_u64(), c.next_u64(), d.next_u64()};
  EXPECT_EQ(firsts.size(), 4u);
}

TEST(RandomStream, UniformOpenInterval) {
  RandomStream r(1, 0);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform_open();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(RandomStream, ExponentialMean) {
  RandomStream r(9, 3);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) sum += r.exponential(2.0);
  EXPECT_NEAR(sum / n, 0.5, 4.0 * 0.5 / std::sqrt(n));
}

TEST(RandomStream, PositionCountsBlocks) {
  RandomStream r(5, 0);
  EXPECT_EQ(r.position(), 0u);
  r.next_u64();
  r.next_u64();
  r.next_u64();
  EXPECT_EQ(r.seed(), 5u);
  EXPECT_EQ(r.stream_id(), 0u);
  EXPECT_EQ(r.position(), 2u);
}
