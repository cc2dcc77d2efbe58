#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <tuple>

#include "dipe/error.hpp"
#include "dipe/selection.hpp"
#include "dipe/synth.hpp"
#include "test_support.hpp"

namespace dipe {
namespace {

// Four-model worked example. Indices are 0-based here (model 1 -> index 0).
const std::vector<double> kD = {0.90, 0.88, 0.86, 0.80};
CorrelationMatrix four_model_matrix() {
  return CorrelationMatrix({"m1", "m2", "m3", "m4"}, {1.00, 0.95, 0.70, 0.60,  //
                                                      0.95, 1.00, 0.75, 0.65,  //
                                                      0.70, 0.75, 1.00, 0.55,  //
                                                      0.60, 0.65, 0.55, 1.00});
}

CorrelationMatrix random_matrix(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n * n, 1.0);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back("m" + std::to_string(i));
    for (std::size_t j = i + 1; j < n; ++j) v[i * n + j] = v[j * n + i] = u(rng);
  }
  return CorrelationMatrix(ids, v);
}

std::vector<double> random_scores(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.5, 1.0);
  std::vector<double> d(n);
  for (auto& x : d) x = u(rng);
  return d;
}

/// Brute-force trace: every step rescores every outsider from scratch and
/// takes the lexicographic minimum of (score, -d, index).
std::vector<std::size_t> oracle_greedy(const CorrelationMatrix& c, const std::vector<double>& d, std::size_t k,
                                       bool with_error, std::vector<std::vector<double>>* step_scores = nullptr) {
  const std::size_t n = d.size();
  std::vector<std::size_t> chosen = {
      static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin())};
  while (chosen.size() < k) {
    std::vector<std::tuple<double, double, std::size_t>> options;
    std::vector<double> scores;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::count(chosen.begin(), chosen.end(), i)) continue;
      double corr = 0.0;
      for (std::size_t j : chosen) corr += c(i, j);
      const double score = (with_error ? 1.0 - d[i] : 0.0) + corr / chosen.size();
      options.emplace_back(score, -d[i], i);
      scores.push_back(score);
    }
    if (step_scores) step_scores->push_back(scores);
    chosen.push_back(std::get<2>(*std::min_element(options.begin(), options.end())));
  }
  return chosen;
}

TEST(AvgScore, Examples) {
  const CorrelationMatrix c({"i", "j"}, {1, 0, 0, 1});
  const std::vector<std::size_t> e = {1};
  EXPECT_EQ(avg_score(0, e, c, std::vector<double>{1.0, 0.5}).value, 0.0);

  const CorrelationMatrix c2({"i", "j"}, {1, 0.8, 0.8, 1});
  EXPECT_NEAR(avg_score(0, e, c2, std::vector<double>{0.9, 0.5}).value, 0.9, 1e-12);

  const CorrelationMatrix c3({"i", "j"}, {1, 0.95, 0.95, 1});
  const auto s = avg_score(0, e, c3, std::vector<double>{0.9051, 0.5});
  EXPECT_EQ(s.candidate, 0u);
  EXPECT_NEAR(s.value, 1.0449, 1e-12);
}

TEST(AvgScore, ContractViolations) {
  const auto c = four_model_matrix();
  const std::vector<std::size_t> e = {0, 2};
  EXPECT_THROW(avg_score(2, e, c, kD), ContractError);
  EXPECT_THROW(avg_score(1, std::vector<std::size_t>{}, c, kD), ContractError);
  EXPECT_THROW(avg_score(1, e, c, std::vector<double>{0.5}), ContractError);
}

TEST(AvgScore, FactoredFormAgrees) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + trial % 9;
    const auto c = random_matrix(rng, n);
    const auto d = random_scores(rng, n);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const std::size_t members = 1 + rng() % (n - 1);
    const std::span<const std::size_t> e(perm.data(), members);
    EXPECT_NEAR(avg_score(perm[members], e, c, d).value, avg_score_factored(perm[members], e, c, d), 1e-12);
  }
}

TEST(SelectDipe, WorkedExampleTrace) {
  const auto c = four_model_matrix();
  const auto sel = select_dipe(c, kD, 3);
  EXPECT_EQ(sel.members, (std::vector<std::size_t>{0, 3, 2}));
  EXPECT_EQ(sel.strategy, Strategy::dipe);
  EXPECT_EQ(sel.k, 3u);

  // Frozen from tests/oracles/dipe_trace.py.
  ASSERT_EQ(sel.trace.size(), 2u);
  ASSERT_EQ(sel.trace[0].candidates.size(), 3u);
  EXPECT_NEAR(sel.trace[0].candidates[0].value, 1.07, 1e-12);
  EXPECT_NEAR(sel.trace[0].candidates[1].value, 0.84, 1e-12);
  EXPECT_NEAR(sel.trace[0].candidates[2].value, 0.80, 1e-12);
  EXPECT_EQ(sel.trace[0].chosen, 3u);
  ASSERT_EQ(sel.trace[1].candidates.size(), 2u);
  EXPECT_EQ(sel.trace[1].candidates[0].candidate, 1u);
  EXPECT_NEAR(sel.trace[1].candidates[0].value, 0.92, 1e-12);
  EXPECT_NEAR(sel.trace[1].candidates[1].value, 0.765, 1e-12);
  EXPECT_EQ(sel.trace[1].chosen, 2u);

  std::vector<std::vector<double>> oracle_scores;
  EXPECT_EQ(oracle_greedy(c, kD, 3, true, &oracle_scores), sel.members);
  for (std::size_t s = 0; s < oracle_scores.size(); ++s)
    for (std::size_t i = 0; i < oracle_scores[s].size(); ++i)
      EXPECT_NEAR(sel.trace[s].candidates[i].value, oracle_scores[s][i], 1e-12);
}

TEST(SelectDipe, BudgetEdges) {
  const auto c = four_model_matrix();
  EXPECT_EQ(select_dipe(c, kD, 1).members, (std::vector<std::size_t>{0}));
  auto all = select_dipe(c, kD, 4).members;
  std::sort(all.begin(), all.end());
  EXPECT_EQ(all, (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_THROW(select_dipe(c, kD, 0), ContractError);
  EXPECT_THROW(select_dipe(c, kD, 5), ContractError);
}

TEST(SelectDipe, ArgmaxTieGoesToLowestIndex) {
  const auto c = four_model_matrix();
  EXPECT_EQ(select_dipe(c, std::vector<double>{0.8, 0.9, 0.9, 0.1}, 1).members.front(), 1u);
}

TEST(SelectDipe, EqualScoreTieGoesToBetterModelThenLowerIndex) {
  // Candidates 1 and 2 score (1-d)+C equal: 0.2+0.5 = 0.1+0.6.
  const CorrelationMatrix c({"a", "b", "c"}, {1, 0.5, 0.6, 0.5, 1, 0.3, 0.6, 0.3, 1});
  const std::vector<double> d = {0.95, 0.8, 0.9};
  const auto sel = select_dipe(c, d, 2);
  ASSERT_EQ(sel.trace[0].candidates[0].value, sel.trace[0].candidates[1].value);
  EXPECT_EQ(sel.members[1], 2u);

  // Fully tied candidates: lowest index wins.
  const CorrelationMatrix flat({"a", "b", "c"}, {1, 0.5, 0.5, 0.5, 1, 0.5, 0.5, 0.5, 1});
  EXPECT_EQ(select_dipe(flat, std::vector<double>{0.9, 0.8, 0.8}, 2).members[1], 1u);
}

TEST(SelectDipeAblated, WorkedExample) {
  const auto c = four_model_matrix();
  const auto sel = select_dipe_ablated(c, kD, 2);
  EXPECT_EQ(sel.members, (std::vector<std::size_t>{0, 3}));
  EXPECT_NEAR(sel.trace[0].candidates[0].value, 0.95, 1e-12);
  EXPECT_NEAR(sel.trace[0].candidates[1].value, 0.70, 1e-12);
  EXPECT_NEAR(sel.trace[0].candidates[2].value, 0.60, 1e-12);
  EXPECT_EQ(select_dipe_ablated(c, kD, 1).members, select_dipe(c, kD, 1).members);
  EXPECT_EQ(oracle_greedy(c, kD, 4, false), select_dipe_ablated(c, kD, 4).members);
}

TEST(SelectDipeAblated, PicksUselessDecorrelatedModel) {
  const CorrelationMatrix c({"best", "good", "junk"}, {1, 0.9, 0.1, 0.9, 1, 0.2, 0.1, 0.2, 1});
  const std::vector<double> d = {0.9, 0.85, 0.0};
  EXPECT_EQ(select_dipe_ablated(c, d, 2).members[1], 2u);
  EXPECT_EQ(select_dipe(c, d, 2).members[1], 1u);
}

TEST(SelectDipe, MatchesOracleAndPrefixOnRandomInstances) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 10;
    const auto c = random_matrix(rng, n);
    const auto d = random_scores(rng, n);
    const auto full = select_dipe(c, d, n);
    ASSERT_EQ(full.members, oracle_greedy(c, d, n, true));
    for (std::size_t k = 1; k < n; ++k) {
      const auto part = select_dipe(c, d, k).members;
      ASSERT_TRUE(std::equal(part.begin(), part.end(), full.members.begin()));
    }
  }
}

TEST(SelectDipe, UniformScoreShiftKeepsOrder) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> delta(-0.3, 0.3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + trial % 8;
    const auto c = random_matrix(rng, n);
    const auto d = random_scores(rng, n);
    const double shift = delta(rng);
    std::vector<double> shifted = d;
    for (auto& x : shifted) x += shift;
    const auto a = select_dipe(c, d, n);
    const auto b = select_dipe(c, shifted, n);
    ASSERT_EQ(a.members, b.members);
    for (std::size_t s = 0; s < a.trace.size(); ++s)
      for (std::size_t i = 0; i < a.trace[s].candidates.size(); ++i)
        ASSERT_NEAR(b.trace[s].candidates[i].value, a.trace[s].candidates[i].value - shift, 1e-12);
  }
}

TEST(SelectTopk, Examples) {
  const std::vector<double> d = {0.9051, 0.9045, 0.9054};
  EXPECT_EQ(select_topk(d, 2).members, (std::vector<std::size_t>{2, 0}));
  EXPECT_EQ(select_topk(d, 3).members.size(), 3u);
  EXPECT_EQ(select_topk(std::vector<double>{0.5, 0.5, 0.5, 0.5}, 2).members, (std::vector<std::size_t>{0, 1}));
  EXPECT_THROW(select_topk(d, 0), ContractError);
  EXPECT_THROW(select_topk(d, 4), ContractError);
}

TEST(SelectTopk, PermutationInvariant) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + trial % 9;
    const auto d = random_scores(rng, n);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> permuted(n);
    for (std::size_t i = 0; i < n; ++i) permuted[i] = d[perm[i]];
    for (std::size_t k = 1; k <= n; ++k) {
      auto direct = select_topk(d, k).members;
      std::vector<std::size_t> mapped;
      for (std::size_t i : select_topk(permuted, k).members) mapped.push_back(perm[i]);
      std::sort(direct.begin(), direct.end());
      std::sort(mapped.begin(), mapped.end());
      ASSERT_EQ(direct, mapped);
    }
  }
}

TEST(SelectAll, EveryModel) {
  const auto sel = select_all(4);
  EXPECT_EQ(sel.members, (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_EQ(sel.k, 4u);
  EXPECT_EQ(select(Strategy::all, four_model_matrix(), kD, 2).members.size(), 4u);
}

// Independent exhaustive search: own subset enumeration, fusion and Dice.
std::vector<std::size_t> oracle_exhaustive(const ValidationSet& set, std::size_t k) {
  const std::size_t n = set.model_count();
  double best = -1.0;
  std::vector<std::size_t> best_members;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) members.push_back(i);
    double total = 0.0;
    for (std::size_t s = 0; s < set.slice_count(); ++s) {
      const Shape shape = set.truth(s).shape();
      double slice_total = 0.0;
      for (std::uint32_t c = 0; c < shape.classes; ++c) {
        double inter = 0, a = 0, b = 0;
        for (std::size_t p = 0; p < shape.plane_size(); ++p) {
          double sum = 0.0;
          for (std::size_t m : members) sum += set.prediction(m, s).plane(c)[p];
          const bool on = static_cast<float>(sum / members.size()) >= 0.5f;
          const bool truth = set.truth(s).plane(c)[p];
          inter += on && truth;
          a += on;
          b += truth;
        }
        slice_total += a + b == 0 ? 1.0 : 2 * inter / (a + b);
      }
      total += slice_total / shape.classes;
    }
    const double score = total / set.slice_count();
    if (score > best + 1e-12 || (std::abs(score - best) <= 1e-12 && members < best_members)) {
      best = score;
      best_members = members;
    }
  }
  return best_members;
}

synth::SynthSpec small_spec(std::uint64_t seed, std::size_t n) {
  synth::SynthSpec spec;
  spec.seed = seed;
  spec.slices = 6;
  spec.dims = Shape{2, 16, 16};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(0.1, 0.45);
  for (std::size_t i = 0; i < n; ++i) {
    spec.models.push_back({"", "", noise(rng), static_cast<std::int64_t>(rng() % 3)});
  }
  return spec;
}

TEST(SelectExhaustive, MatchesIndependentSearch) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto set = synth::generate_in_memory(small_spec(seed, 3));
    for (std::size_t k = 1; k <= 3; ++k) {
      auto got = select_exhaustive(set, k).members;
      EXPECT_EQ(got, oracle_exhaustive(set, k)) << "seed " << seed << " k " << k;
    }
  }
  const auto set = synth::generate_in_memory(small_spec(4, 5));
  EXPECT_EQ(select_exhaustive(set, 5).members, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  EXPECT_EQ(select_exhaustive(set, 3, 0.5, ExecConfig{1}).members,
            select_exhaustive(set, 3, 0.5, ExecConfig{4}).members);
}

TEST(SelectExhaustive, RefusesLargePools) {
  const auto set = synth::generate_in_memory(small_spec(5, 13));
  try {
    select_exhaustive(set, 2);
    FAIL() << "expected refusal";
  } catch (const ContractError& e) {
    EXPECT_NE(std::string(e.what()).find("dipe or topk"), std::string::npos);
  }
}

TEST(SelectExhaustive, DominatesGreedyOnSmallPools) {
  for (std::uint64_t seed = 10; seed < 14; ++seed) {
    const auto set = synth::generate_in_memory(small_spec(seed, 5));
    const auto c = correlation_matrix(set);
    const auto d = metrics::score_models(set);
    for (std::size_t k = 1; k <= 5; ++k) {
      const double best = evaluate_ensemble(select_exhaustive(set, k), set).dice;
      EXPECT_GE(best, evaluate_ensemble(select_dipe(c, d.dice, k), set).dice);
      EXPECT_GE(best, evaluate_ensemble(select_topk(d.dice, k), set).dice);
    }
  }
}

TEST(SelectionJson, RoundTripsMembersAndTrace) {
  const auto c = four_model_matrix();
  const auto sel = select_dipe(c, kD, 3);
  const auto text = selection_to_json(sel, c.model_ids());
  EXPECT_NE(text.find("\"strategy\": \"dipe\""), std::string::npos);
  EXPECT_NE(text.find("\"chosen\": \"m4\""), std::string::npos);
  const auto back = selection_from_json(text, c.model_ids());
  EXPECT_EQ(back.members, sel.members);
  EXPECT_EQ(back.k, 3u);
  EXPECT_THROW(selection_from_json(R"({"members": ["zz"]})", c.model_ids()), Error);
}

TEST(StrategyNames, ParseBothSpellings) {
  EXPECT_EQ(parse_strategy("dipe-ablated"), Strategy::dipe_ablated);
  EXPECT_EQ(parse_strategy("dipe_ablated"), Strategy::dipe_ablated);
  EXPECT_EQ(parse_strategy("topk"), Strategy::topk);
  EXPECT_FALSE(parse_strategy("random").has_value());
  EXPECT_EQ(to_string(Strategy::exhaustive), "exhaustive");
}

}  // namespace
}  // namespace dipe
