#include <gtest/gtest.h>

#include <set>
#include <thread>

#include "malthus/rng.hpp"

using malthus::Philox4x64;
using malthus::RngStream;

TEST(Philox, KnownAnswerZero) {
  const auto out = Philox4x64::bijection({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out[0], 0x16554d9eca36314cULL);
  EXPECT_EQ(out[1], 0xdb20fe9d672d0fdcULL);
  EXPECT_EQ(out[2], 0xd7e772cee186176bULL);
  EXPECT_EQ(out[3], 0x7e68b68aec7ba23bULL);
}

TEST(Philox, KnownAnswerPi) {
  const auto out = Philox4x64::bijection(
      {0x243f6a8885a308d3ULL, 0x13198a2e03707344ULL, 0xa4093822299f31d0ULL, 0x082efa98ec4e6c89ULL},
      {0x452821e638d01377ULL, 0xbe5466cf34e90c6cULL});
  EXPECT_EQ(out[0], 0xa528f45403e61d95ULL);
  EXPECT_EQ(out[1], 0x38c72dbd566e9788ULL);
  EXPECT_EQ(out[2], 0xa5a1610e72fd18b5ULL);
  EXPECT_EQ(out[3], 0x57bd43b5e52b7fe6ULL);
}

TEST(Philox, GeneratorWalksBlocks) {
  Philox4x64 gen({42, 3}, 5);
  const auto b0 = Philox4x64::bijection({5, 0, 0, 0}, {42, 3});
  const auto b1 = Philox4x64::bijection({5, 1, 0, 0}, {42, 3});
  for (int i = 0; i < 4; ++i) EXPECT_EQ(gen(), b0[i]);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(gen(), b1[i]);
  EXPECT_EQ(gen.blocks_consumed(), 2u);
}

TEST(Philox, Uniform01Range) {
  Philox4x64 gen({1, 2}, 3);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = gen.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
}

TEST(RngStream, ReproducibleAcrossThreads) {
  const RngStream stream(99, 7);
  std::vector<std::uint64_t> here, there;
  auto fill = [&](std::vector<std::uint64_t>& out) {
    auto gen = stream.substream(1234);
    for (int i = 0; i < 64; ++i) out.push_back(gen());
  };
  fill(here);
  std::thread t([&] { fill(there); });
  t.join();
  EXPECT_EQ(here, there);
}

TEST(RngStream, DistinctStreamsDiffer) {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t s = 0; s < 100; ++s) firsts.insert(RngStream(1, s).engine()());
  for (std::uint64_t k = 0; k < 100; ++k) firsts.insert(RngStream(1, 0).substream(k + 1)());
  EXPECT_EQ(firsts.size(), 200u);
}

TEST(Mix64, IsNotIdentityAndSpreadsBits) {
  EXPECT_NE(malthus::mix64(0), 0u);
  EXPECT_NE(malthus::mix64(1), malthus::mix64(2));
  static_assert(malthus::mix64(5) == malthus::mix64(5));
}
