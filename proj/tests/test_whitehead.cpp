#include <gtest/gtest.h>

#include "oracles.hpp"
#include "whpr/generators.hpp"
#include "whpr/whitehead.hpp"

using namespace whpr;

namespace {
CyclicWord cw(std::string_view s, int rank = 2) { return CyclicWord::parse(s, rank); }
}  // namespace

TEST(ReducingMoves, KnownValues) {
  EXPECT_EQ(reducing_moves(cw("ab")), (std::vector{NielsenMove::AtoBinvA, NielsenMove::BtoAinvB}));
  EXPECT_TRUE(reducing_moves(cw("abAB")).empty());
  EXPECT_TRUE(reducing_moves(cw("a")).empty());
  EXPECT_THROW(reducing_moves(cw("abc", 3)), std::invalid_argument);
}

TEST(ReducingMoves, CommutatorImagesAllHaveLengthFour) {
  for (NielsenMove m : kNielsenMoves) EXPECT_EQ(to_automorphism(m).apply(cw("abAB")).length(), 4u);
}

TEST(IsMinimal, KnownValues) {
  EXPECT_FALSE(is_minimal(cw("abab")));
  EXPECT_TRUE(is_minimal(cw("abAB")));
  EXPECT_TRUE(is_minimal(CyclicWord(2)));
  EXPECT_TRUE(is_minimal(cw("b")));
}

TEST(IsMinimal, NielsenScanAgreesWithFullTypeIIScanInRankTwo) {
  Rng rng(17);
  for (int trial = 0; trial < 2000; ++trial) {
    const CyclicWord w = random_cyclic_word(1 + rng.below(30), 2, rng);
    EXPECT_EQ(reducing_moves(w).empty(), reducing_automorphisms(w).empty()) << w.str();
  }
}

TEST(Minimize, KnownValues) {
  EXPECT_EQ(minimize(cw("abab")).minimal.length(), 2u);
  const auto comm = minimize(cw("abAB"));
  EXPECT_EQ(comm.minimal, cw("abAB"));
  EXPECT_TRUE(comm.chain.steps.empty());
  const auto ab = minimize(cw("ab"));
  EXPECT_EQ(ab.minimal.length(), 1u);
  EXPECT_EQ(ab.chain.steps.size(), 1u);
}

TEST(Minimize, ChainReplaysAndStrictlyShortens) {
  Rng rng(23);
  for (int rank = 2; rank <= 3; ++rank) {
    for (int trial = 0; trial < 300; ++trial) {
      const CyclicWord w = random_cyclic_word(1 + rng.below(40), rank, rng);
      const Minimization m = minimize(w);
      EXPECT_TRUE(is_minimal(m.minimal));
      EXPECT_LE(m.minimal.length(), w.length());
      EXPECT_EQ(m.chain.replay(w), m.minimal);
      EXPECT_LE(m.chain.steps.size(), w.length());
      CyclicWord cur = w;
      for (const auto& t : m.chain.steps) {
        const CyclicWord next = t.apply(cur);
        EXPECT_LT(next.length(), cur.length());
        cur = next;
      }
    }
  }
}

TEST(Minimize, GreedyMatchesOrbitSearchUpToLengthSix) {
  const auto minima = oracle::orbit_minima(2, 6, 2);
  ASSERT_FALSE(minima.empty());
  for (const auto& [text, best] : minima) EXPECT_EQ(minimize(cw(text)).minimal.length(), best) << text;
}

TEST(Minimize, PrimitivesReduceToALetter) {
  Rng rng(31);
  for (int rank = 2; rank <= 3; ++rank) {
    for (int trial = 0; trial < 200; ++trial) {
      const CyclicWord p = random_primitive(rank, rng.below(15), rng);
      EXPECT_EQ(minimize(p).minimal.length(), 1u) << p.str();
    }
  }
}

TEST(Minimize, RankThreeUsesFullScan) {
  // a -> ac is a Whitehead move but not a Nielsen move of rank 2.
  const CyclicWord w = cw("acb", 3);
  EXPECT_FALSE(is_minimal(w));
  EXPECT_EQ(minimize(w).minimal.length(), 1u);
}
