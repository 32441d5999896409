#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fairalloc/error.hpp"
#include "fairalloc/fairdiv.hpp"
#include "oracles.hpp"

namespace fairalloc::fairdiv {
namespace {

LikeProfile profile(const std::vector<std::vector<int>>& u) { return LikeProfile(BinaryMatrix(u)); }

TEST(Step, EmptySingleAndUniform) {
  Rng rng = make_rng(1);
  EXPECT_FALSE(like_mechanism_step({}, rng).has_value());
  const std::vector<int> one{4};
  EXPECT_EQ(like_mechanism_step(one, rng), 4);

  const std::vector<int> three{1, 2, 3};
  std::vector<int> counts(4, 0);
  const int draws = 30000;
  for (int k = 0; k < draws; ++k) ++counts[static_cast<std::size_t>(*like_mechanism_step(three, rng))];
  for (int a = 1; a <= 3; ++a) EXPECT_NEAR(counts[std::size_t(a)] / double(draws), 1.0 / 3.0, 0.02);
}

TEST(Run, SingleLikerAndNobody) {
  // Item 0 liked only by agent 2, item 1 by nobody.
  const LikeProfile p = profile({{0, 0}, {0, 0}, {1, 0}});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const AllocationRecord r = run_like_mechanism(p, seed);
    EXPECT_EQ(r.winner[0], 2);
    EXPECT_FALSE(r.winner[1].has_value());
    EXPECT_EQ(r.seed, seed);
  }
}

TEST(Run, TwoLikersSplitEvenly) {
  const LikeProfile p = profile({{0, 0}, {1, 0}, {1, 0}});
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) wins += run_like_mechanism(p, seed).winner[0] == 1;
  EXPECT_NEAR(wins / 10000.0, 0.5, 0.02);
}

TEST(Run, StepAndBatchAgree) {
  const LikeProfile p = profile({{1, 1, 0, 1}, {1, 0, 1, 1}, {0, 1, 1, 1}});
  LikeMechanism online(77);
  for (std::size_t t = 0; t < p.items(); ++t) online.allocate_next(p.likers(t));
  EXPECT_EQ(online.record().winner, run_like_mechanism(p, 77).winner);
}

TEST(Run, LaterItemsDoNotAffectEarlierDecisions) {
  const std::vector<std::vector<int>> base{{1, 1, 0, 1, 1}, {1, 1, 1, 0, 1}, {1, 0, 1, 1, 1}};
  Rng gen = make_rng(3);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const AllocationRecord ref = run_like_mechanism(profile(base), seed);
    for (std::size_t t = 0; t < 5; ++t) {
      auto mutated = base;
      for (auto& row : mutated) {
        for (std::size_t c = t + 1; c < row.size(); ++c) row[c] = int(uniform_index(gen, 2));
      }
      const AllocationRecord r = run_like_mechanism(profile(mutated), seed);
      for (std::size_t k = 0; k <= t; ++k) ASSERT_EQ(r.winner[k], ref.winner[k]);
    }
  }
}

TEST(ExpectedAllocation, Columns) {
  auto probs = expected_allocation(profile({{1}, {1}}));
  EXPECT_EQ(probs[0][0], 0.5);
  EXPECT_EQ(probs[1][0], 0.5);
  probs = expected_allocation(profile({{1, 1}, {0, 0}}));
  EXPECT_EQ(probs[1], (std::vector<double>{0, 0}));
  probs = expected_allocation(profile({{1}, {1}, {0}}));
  EXPECT_EQ(probs[0][0], 0.5);
  EXPECT_EQ(probs[1][0], 0.5);
  EXPECT_EQ(probs[2][0], 0.0);
}

TEST(ExAnteEnvy, SmallCases) {
  EXPECT_EQ(ex_ante_envy(profile({{1, 0, 1}})), (std::vector<std::vector<double>>{{0}}));
  const auto same = ex_ante_envy(profile({{1, 0, 1}, {1, 0, 1}, {1, 0, 1}}));
  for (const auto& row : same) {
    for (double v : row) EXPECT_EQ(v, 0.0);
  }
  // An insincere agent can be envied: agent 1 likes item 0 but hides it.
  const LikeProfile lying(BinaryMatrix(std::vector<std::vector<int>>{{1}, {1}}), BinaryMatrix(std::vector<std::vector<int>>{{1}, {0}}));
  EXPECT_EQ(ex_ante_envy(lying)[1][0], 1.0);
}

TEST(ExPostEnvy, ForcedRecord) {
  const LikeProfile p = profile({{1, 1, 1}, {1, 1, 1}});
  const AllocationRecord r{{1, 1, 1}, 0};
  const ExPostEnvy e = ex_post_envy(r, p);
  EXPECT_EQ(e.envy[0][1], 3);
  EXPECT_EQ(e.envy[1][0], -3);
  EXPECT_EQ(e.max_envy, 3);

  EXPECT_EQ(ex_post_envy(run_like_mechanism(profile({{1, 1}}), 4), profile({{1, 1}})).max_envy, 0);

  const LikeProfile disjoint = profile({{1, 0, 0}, {0, 1, 1}});
  const ExPostEnvy d = ex_post_envy(run_like_mechanism(disjoint, 9), disjoint);
  for (const auto& row : d.envy) {
    for (int v : row) EXPECT_LE(v, 0);
  }
  EXPECT_EQ(d.max_envy, 0);
}

TEST(ExPostEnvy, RejectsInconsistentRecords) {
  const LikeProfile p = profile({{1, 0}, {0, 0}});
  EXPECT_THROW(ex_post_envy({{1, std::nullopt}, 0}, p), ValidationError);
  EXPECT_THROW(ex_post_envy({{std::nullopt, std::nullopt}, 0}, p), ValidationError);
  EXPECT_THROW(ex_post_envy({{0, 0}, 0}, p), ValidationError);
  EXPECT_THROW(ex_post_envy({{0}, 0}, p), ValidationError);
  EXPECT_THROW(ex_post_envy({{5, std::nullopt}, 0}, p), ValidationError);
}

TEST(ExpectedUtility, ClosedFormMatchesOutcomeEnumeration) {
  Rng gen = make_rng(17);
  for (int k = 0; k < 200; ++k) {
    BinaryMatrix u(3, 4), r(3, 4);
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t t = 0; t < 4; ++t) {
        u.set(a, t, uniform_index(gen, 2));
        r.set(a, t, uniform_index(gen, 2));
      }
    }
    const LikeProfile p(u, r);
    for (std::size_t a = 0; a < 3; ++a) {
      std::uint32_t report = 0;
      for (std::size_t t = 0; t < 4; ++t) report |= r.at(a, t) ? 1u << t : 0u;
      EXPECT_NEAR(expected_utility(p, a, report), oracle::enumerated_expected_utility(p, a), 1e-12);
    }
  }
}

TEST(ExpectedUtility, SamplingAverageWithinThreeSigma) {
  const LikeProfile p = profile({{1, 1, 0, 1, 1}, {1, 0, 1, 1, 0}, {1, 1, 1, 0, 0}});
  const int runs = 20000;
  for (std::size_t a = 0; a < 3; ++a) {
    double sum = 0.0, sumsq = 0.0;
    for (int s = 0; s < runs; ++s) {
      const AllocationRecord r = run_like_mechanism(p, std::uint64_t(s));
      int got = 0;
      for (std::size_t t = 0; t < 5; ++t) got += r.winner[t] == int(a) && p.utilities().at(a, t);
      sum += got;
      sumsq += double(got) * got;
    }
    const double mean = sum / runs;
    const double sd = std::sqrt((sumsq / runs - mean * mean) / runs);
    std::uint32_t truthful = 0;
    for (std::size_t t = 0; t < 5; ++t) truthful |= p.utilities().at(a, t) ? 1u << t : 0u;
    EXPECT_NEAR(mean, expected_utility(p, a, truthful), 3 * sd) << a;
  }
}

TEST(BestResponse, NothingValuedAndDroppingALike) {
  const LikeProfile none = profile({{0, 0, 0}, {1, 0, 1}});
  const BestResponse br = best_response_search(none, 0);
  EXPECT_EQ(br.argmax.size(), 8u);
  EXPECT_TRUE(br.truthful_optimal);
  EXPECT_EQ(br.best_utility, 0.0);

  // Agent 0 values items 0 and 1; item 0 has one other liker.
  const LikeProfile p = profile({{1, 1}, {1, 0}});
  EXPECT_DOUBLE_EQ(expected_utility(p, 0, 0b11), 1.5);
  EXPECT_DOUBLE_EQ(expected_utility(p, 0, 0b10), 1.0);
  const BestResponse b = best_response_search(p, 0);
  EXPECT_TRUE(b.truthful_optimal);
  EXPECT_EQ(b.argmax, (std::vector<std::uint32_t>{0b11}));
}

TEST(BestResponse, RejectsTooManyItems) {
  const LikeProfile wide(BinaryMatrix(2, kMaxEnumeratedItems + 1));
  EXPECT_THROW(best_response_search(wide, 0), CapabilityError);
}

TEST(Profile, JsonLoading) {
  const LikeProfile p = load_profile(R"({"utilities": [[1, 0], [0, 1]]})");
  EXPECT_TRUE(p.sincere());
  EXPECT_EQ(p.agents(), 2u);
  const LikeProfile q = load_profile(R"({"utilities": [[1, 0], [0, 1]], "reports": [[1, 1], [0, 1]]})");
  EXPECT_FALSE(q.sincere());
  EXPECT_THROW(load_profile(R"({"utilities": [[1, 2]]})"), ValidationError);
  EXPECT_THROW(load_profile(R"({"utilities": [[1, 0], [1]]})"), ValidationError);
  EXPECT_THROW(load_profile(R"({"utilities": [[1, 0]], "reports": [[1]]})"), ValidationError);
  EXPECT_THROW(load_profile("[1"), ValidationError);
}

TEST(Csv, RunAndEnvy) {
  std::ostringstream run;
  write_run_csv(run, 0, {{1, std::nullopt}, 3}, true);
  EXPECT_EQ(run.str(), "run,item,winner\n0,0,1\n0,1,\n");
  std::ostringstream envy;
  write_envy_csv(envy, {{0, -0.5}, {0.25, 0}});
  EXPECT_EQ(envy.str(), "i,j,envy\n0,0,0\n0,1,-0.5\n1,0,0.25\n1,1,0\n");
}

}  // namespace
}  // namespace fairalloc::fairdiv
