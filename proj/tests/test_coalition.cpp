#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "slicemkt/coalition.hpp"

using namespace slicemkt;

namespace {

// All set partitions of the given elements (recursive; B(4) = 15).
void enumerate_partitions(const std::vector<int>& elems, size_t i,
                          std::vector<std::vector<int>>& current,
                          std::vector<std::vector<std::vector<int>>>& out) {
  if (i == elems.size()) {
    out.push_back(current);
    return;
  }
  // index loop: recursion may grow `current`, invalidating references
  for (size_t b = 0, nb = current.size(); b < nb; ++b) {
    current[b].push_back(elems[i]);
    enumerate_partitions(elems, i + 1, current, out);
    current[b].pop_back();
  }
  current.push_back({elems[i]});
  enumerate_partitions(elems, i + 1, current, out);
  current.pop_back();
}

std::vector<std::vector<std::vector<int>>> all_partitions(const std::vector<int>& elems) {
  std::vector<std::vector<std::vector<int>>> out;
  std::vector<std::vector<int>> current;
  enumerate_partitions(elems, 0, current, out);
  return out;
}

bool no_improving_merge(const std::vector<std::vector<int>>& partition,
                        const CoalitionValueFn& v) {
  for (size_t i = 0; i < partition.size(); ++i)
    for (size_t j = i + 1; j < partition.size(); ++j)
      if (merge_gain(partition[i], partition[j], v) > 0.0) return false;
  return true;
}

double set_key_value(const std::vector<int>& members,
                     const std::map<std::set<int>, double>& table, double fallback) {
  auto it = table.find(std::set<int>(members.begin(), members.end()));
  return it == table.end() ? fallback : it->second;
}

}  // namespace

TEST_SUITE_BEGIN("coalition");

TEST_CASE("init partition") {
  auto v = [](const std::vector<int>& z) { return static_cast<double>(z.size()); };
  auto rep = [](int id) { return 0.1 * id; };
  auto p = init_partition({3, 1, 2}, v, rep);
  REQUIRE(p.coalitions.size() == 3);
  CHECK(p.coalitions[0].members == std::vector<int>{1});
  CHECK(p.coalitions[1].members == std::vector<int>{2});
  CHECK(p.coalitions[2].members == std::vector<int>{3});
  CHECK(p.valid({1, 2, 3}, v, rep));
  CHECK(p.describe() == "{1}|{2}|{3}");

  auto single = init_partition({7}, v, rep);
  CHECK(single.coalitions.size() == 1);
  CHECK_THROWS_AS(init_partition({}, v, rep), std::domain_error);
}

TEST_CASE("merge gain") {
  // additive value: gain exactly 0, merge inadmissible under strict >
  auto additive = [](const std::vector<int>& z) {
    double s = 0.0;
    for (int m : z) s += m;
    return s;
  };
  CHECK(merge_gain({1}, {2}, additive) == doctest::Approx(0.0));

  // superadditive bonus per extra member: merging {1} into {2,3} adds one link
  const double bonus = 3.5;
  auto super = [&](const std::vector<int>& z) {
    double s = 0.0;
    for (int m : z) s += m;
    return s + bonus * (z.size() - 1);
  };
  CHECK(merge_gain({1}, {2, 3}, super) == doctest::Approx(bonus));

  // equals the brute-force v-difference on random sets
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> rd(0.0, 1.0);
  auto noisy = [&](const std::vector<int>& z) {
    double s = 0.0;
    for (int m : z) s += std::sin(m * 1.7) + 0.5;
    return s * (1.0 + 0.2 * z.size());
  };
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> z1{1 + trial, 100 + trial};
    std::vector<int> z2{200 + trial};
    std::vector<int> u{1 + trial, 100 + trial, 200 + trial};
    std::sort(u.begin(), u.end());
    CHECK(merge_gain(z1, z2, noisy) ==
          doctest::Approx(noisy(u) - noisy(z1) - noisy(z2)));
  }

  CHECK_THROWS_AS(merge_gain({1, 2}, {2, 3}, additive), std::domain_error);
}

TEST_CASE("form coalitions: subadditive stays singleton") {
  auto sub = [](const std::vector<int>& z) {
    return std::sqrt(static_cast<double>(z.size()));
  };
  auto rep = [](int) { return 0.5; };
  auto p = form_coalitions({1, 2, 3, 4}, sub, rep);
  CHECK(p.coalitions.size() == 4);
  CHECK(p.describe() == "{1}|{2}|{3}|{4}");
}

TEST_CASE("form coalitions: grand coalition when it dominates") {
  auto quad = [](const std::vector<int>& z) {
    return static_cast<double>(z.size() * z.size());
  };
  auto rep = [](int) { return 0.5; };
  auto p = form_coalitions({1, 2, 3, 4, 5}, quad, rep);
  REQUIRE(p.coalitions.size() == 1);
  CHECK(p.coalitions[0].members == std::vector<int>{1, 2, 3, 4, 5});
}

TEST_CASE("form coalitions: 4-buyer fixtures match Bell enumeration") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> rd(0.0, 1.0);
  const std::vector<int> buyers{1, 2, 3, 4};
  auto rep = [](int id) { return 0.2 * id; };
  for (int trial = 0; trial < 50; ++trial) {
    // random characteristic function with a superadditive tilt
    std::map<std::set<int>, double> table;
    auto parts = all_partitions(buyers);
    REQUIRE(parts.size() == 15);  // B(4)
    for (const auto& part : parts)
      for (const auto& block : part) {
        std::set<int> key(block.begin(), block.end());
        if (!table.count(key))
          table[key] = rd(rng) * block.size() * (1.0 + 0.5 * rd(rng) * block.size());
      }
    auto v = [&](const std::vector<int>& z) { return set_key_value(z, table, 0.0); };

    auto p = form_coalitions(buyers, v, rep);
    CHECK(p.valid(buyers, v, rep));
    CHECK(p.coalitions.size() <= 4);

    // output must be one of the merge-stable partitions found exhaustively
    std::vector<std::vector<int>> as_blocks;
    for (const auto& c : p.coalitions) as_blocks.push_back(c.members);
    CHECK(no_improving_merge(as_blocks, v));
    bool found_stable = false;
    for (const auto& part : parts)
      if (no_improving_merge(part, v)) found_stable = true;
    CHECK(found_stable);
  }
}

TEST_CASE("is_stable") {
  auto rep = [](int id) { return 0.1 * id; };
  auto contrib = [](int id) { return static_cast<double>(id); };

  // all singletons under subadditive value: stable with equal contributions
  // (a heterogeneous split could still let a high-contribution buyer grab a
  // majority share of a merged coalition)
  auto sub = [](const std::vector<int>& z) {
    return std::sqrt(static_cast<double>(z.size()));
  };
  auto flat_contrib = [](int) { return 1.0; };
  auto singles = init_partition({1, 2, 3}, sub, rep);
  CHECK(is_stable(singles, sub, rep, flat_contrib));

  // closure property of the formation loop
  auto quad = [](const std::vector<int>& z) {
    return static_cast<double>(z.size() * z.size());
  };
  CHECK(is_stable(form_coalitions({1, 2, 3, 4}, quad, rep), quad, rep, contrib));

  // hand-built 3-buyer partition with one strictly improving move:
  // v({1,2}) small, v({2,3}) large, so buyer 2 wants to join {3}
  std::map<std::set<int>, double> table{
      {{1}, 1.0}, {{2}, 1.0}, {{3}, 1.0},
      {{1, 2}, 2.1}, {{2, 3}, 9.0}, {{1, 3}, 2.0}, {{1, 2, 3}, 3.0}};
  auto v = [&](const std::vector<int>& z) { return set_key_value(z, table, 0.0); };
  CoalitionPartition p;
  p.coalitions.push_back({{1, 2}, v({1, 2}), rep(1) + rep(2)});
  p.coalitions.push_back({{3}, v({3}), rep(3)});
  CHECK_FALSE(is_stable(p, v, rep, contrib));
}

TEST_CASE("select winner") {
  CoalitionPartition p;
  p.coalitions.push_back({{1, 2}, 0.0, 0.9});
  p.coalitions.push_back({{3}, 0.0, 0.4});
  CHECK(select_winner(p) == 0);

  CoalitionPartition one;
  one.coalitions.push_back({{5}, 0.0, 0.2});
  CHECK(select_winner(one) == 0);

  CoalitionPartition tie;
  tie.coalitions.push_back({{1}, 0.0, 0.5});
  tie.coalitions.push_back({{2}, 0.0, 0.5});
  CHECK(select_winner(tie) == 0);  // exact tie goes to the lower index

  // invariant under common positive rescaling of reputations
  CoalitionPartition scaled = p;
  for (auto& c : scaled.coalitions) c.reputation *= 7.3;
  CHECK(select_winner(scaled) == select_winner(p));

  CHECK_THROWS_AS(select_winner(CoalitionPartition{}), std::domain_error);
}

TEST_CASE("split payoff") {
  auto equal_contrib = [](int) { return 2.0; };
  auto out = split_payoff({1, 2, 3}, 9.0, equal_contrib);
  for (double u : out) CHECK(u == doctest::Approx(3.0));

  auto contrib = [](int id) { return id == 1 ? 8.0 : 2.0; };
  out = split_payoff({1, 2}, 10.0, contrib);
  CHECK(out[0] == doctest::Approx(8.0));
  CHECK(out[1] == doctest::Approx(2.0));

  // efficiency on random fixtures, including zero-contribution fallback
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> rd(0.0, 4.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> c(4);
    for (auto& x : c) x = trial % 5 == 0 ? 0.0 : rd(rng);
    auto fn = [&](int id) { return c[id]; };
    const double total = rd(rng) - 1.0;
    auto u = split_payoff({0, 1, 2, 3}, total, fn);
    double sum = 0.0;
    for (double x : u) sum += x;
    CHECK(sum == doctest::Approx(total).epsilon(1e-9));
    if (total >= 0.0)
      for (double x : u) CHECK(x >= -1e-12);  // individually rational vs zero
  }
  CHECK_THROWS_AS(split_payoff({}, 1.0, equal_contrib), std::domain_error);
}

TEST_CASE("formation terminates within N-1 merges and preserves partition") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> rd(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<int> buyers;
    const int n = 2 + trial % 5;
    for (int i = 0; i < n; ++i) buyers.push_back(i + 1);
    const double tilt = rd(rng);
    auto v = [&](const std::vector<int>& z) {
      double s = 0.0;
      for (int m : z) s += 0.3 + 0.1 * m;
      return s + tilt * z.size() * (z.size() - 1) * 0.2 -
             0.05 * z.size() * z.size();
    };
    auto rep = [](int id) { return 0.15 * id; };
    auto contrib = [](int id) { return 0.3 + 0.1 * id; };
    auto p = form_coalitions(buyers, v, rep);
    CHECK(p.valid(buyers, v, rep));
    CHECK(p.coalitions.size() >= 1);
    // every accepted merge had a strictly positive gain, so the result has no
    // improving pair left
    std::vector<std::vector<int>> blocks;
    for (const auto& c : p.coalitions) blocks.push_back(c.members);
    CHECK(no_improving_merge(blocks, v));
  }
}

TEST_SUITE_END();
