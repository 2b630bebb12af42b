#include <gtest/gtest.h>

#include <cmath>

#include "tentmle/rng.hpp"

using namespace tentmle::rng;

namespace {

void expect_block(const Block& got, const Block& want) {
  for (int i = 0; i < 4; ++i) EXPECT_EQ(got[i], want[i]) << "word " << i;
}

Block bump(Block c) {
  for (auto& w : c) {
    if (++w != 0) break;
  }
  return c;
}

}  // namespace

// Reference blocks for Philox4x64-10, checked against an independent implementation.
TEST(Philox, ZeroCounterZeroKey) {
  const Block ctr{0, 0, 0, 0};
  const Key key{0, 0};
  expect_block(philox4x64(ctr, key), {0x16554d9eca36314cULL, 0xdb20fe9d672d0fdcULL, 0xd7e772cee186176bULL, 0x7e68b68aec7ba23bULL});
  expect_block(philox4x64(bump(ctr), key),
               {0x02f4ba6408e4d89bULL, 0x3dd62b0b9ca8c5b2ULL, 0x1c8667a55d902e79ULL, 0x907d7a052fd5b4dcULL});
}

TEST(Philox, AllOnes) {
  const std::uint64_t m = ~0ULL;
  const Block ctr{m, m, m, m};
  const Key key{m, m};
  expect_block(philox4x64(ctr, key), {0x87b092c3013fe90bULL, 0x438c3c67be8d0224ULL, 0x9cc7d7c69cd777b6ULL, 0xa09caebf594f0ba0ULL});
  expect_block(philox4x64(bump(ctr), key),
               {0x44b7493d1acfc229ULL, 0x6636af8e997921ddULL, 0x3f73e132b5b3780eULL, 0x605644dde03b01b1ULL});
}

TEST(Philox, PiDigits) {
  const Block ctr{0x243f6a8885a308d3ULL, 0x13198a2e03707344ULL, 0xa4093822299f31d0ULL, 0x082efa98ec4e6c89ULL};
  const Key key{0x452821e638d01377ULL, 0xbe5466cf34e90c6cULL};
  expect_block(philox4x64(ctr, key), {0xa528f45403e61d95ULL, 0x38c72dbd566e9788ULL, 0xa5a1610e72fd18b5ULL, 0x57bd43b5e52b7fe6ULL});
  expect_block(philox4x64(bump(ctr), key),
               {0x4c8e672094922aa3ULL, 0x527061cd2884102aULL, 0xf4c265b2d783d553ULL, 0x0556e76cb0298c8dULL});
}

TEST(Stream, SubstreamsAreDeterministicAndDistinct) {
  Stream a = Stream::substream(42, 7, "weights");
  Stream b = Stream::substream(42, 7, "weights");
  Stream c = Stream::substream(42, 8, "weights");
  Stream d = Stream::substream(42, 7, "points");
  int same_c = 0, same_d = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    same_c += x == c.next_u64() ? 1 : 0;
    same_d += x == d.next_u64() ? 1 : 0;
  }
  EXPECT_EQ(same_c, 0);
  EXPECT_EQ(same_d, 0);
}

TEST(Stream, Moments) {
  Stream s = Stream::substream(1, 0, "moments");
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0, se = 0;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    const double z = s.normal();
    sn += z;
    sn2 += z * z;
    se += s.exponential();
  }
  // 5 standard errors of each sample mean.
  EXPECT_NEAR(su / n, 0.5, 5 * std::sqrt(1.0 / 12 / n));
  EXPECT_NEAR(sn / n, 0.0, 5 * std::sqrt(1.0 / n));
  EXPECT_NEAR(sn2 / n, 1.0, 5 * std::sqrt(2.0 / n));
  EXPECT_NEAR(se / n, 1.0, 5 * std::sqrt(1.0 / n));
}
