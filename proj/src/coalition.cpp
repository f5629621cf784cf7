#include "slicemkt/coalition.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace slicemkt {

namespace {

Coalition make_coalition(std::vector<int> members, const CoalitionValueFn& value_fn,
                         const ReputationFn& rep_fn) {
  std::sort(members.begin(), members.end());
  Coalition c;
  c.value = value_fn(members);
  c.reputation = 0.0;
  for (int m : members) c.reputation += rep_fn(m);
  c.members = std::move(members);
  return c;
}

std::vector<int> merged_members(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> u;
  u.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(u));
  return u;
}

double member_payoff(const std::vector<int>& members, double total,
                     const ContributionFn& contrib_fn, int who) {
  double denom = 0.0, own = 0.0;
  for (int m : members) {
    const double c = contrib_fn(m);
    denom += c;
    if (m == who) own = c;
  }
  if (denom == 0.0) return total / static_cast<double>(members.size());
  return total * own / denom;
}

}  // namespace

bool CoalitionPartition::valid(const std::vector<int>& buyers,
                               const CoalitionValueFn& value_fn,
                               const ReputationFn& rep_fn) const {
  std::set<int> seen;
  for (const auto& c : coalitions) {
    if (c.members.empty()) return false;
    for (int m : c.members)
      if (!seen.insert(m).second) return false;  // overlap
    double rep = 0.0;
    for (int m : c.members) rep += rep_fn(m);
    if (std::abs(rep - c.reputation) > 1e-9) return false;
    if (std::abs(value_fn(c.members) - c.value) > 1e-9) return false;
  }
  return seen == std::set<int>(buyers.begin(), buyers.end());
}

std::string CoalitionPartition::describe() const {
  std::ostringstream os;
  for (size_t i = 0; i < coalitions.size(); ++i) {
    if (i) os << '|';
    os << '{';
    for (size_t j = 0; j < coalitions[i].members.size(); ++j) {
      if (j) os << ',';
      os << coalitions[i].members[j];
    }
    os << '}';
  }
  return os.str();
}

CoalitionPartition init_partition(const std::vector<int>& buyers,
                                  const CoalitionValueFn& value_fn,
                                  const ReputationFn& rep_fn) {
  if (buyers.empty()) throw std::domain_error("init_partition: no buyers");
  std::vector<int> sorted = buyers;
  std::sort(sorted.begin(), sorted.end());
  CoalitionPartition p;
  for (int b : sorted) p.coalitions.push_back(make_coalition({b}, value_fn, rep_fn));
  return p;
}

double merge_gain(const std::vector<int>& z1, const std::vector<int>& z2,
                  const CoalitionValueFn& value_fn) {
  for (int a : z1)
    for (int b : z2)
      if (a == b) throw std::domain_error("merge_gain: coalitions overlap");
  return value_fn(merged_members(z1, z2)) - value_fn(z1) - value_fn(z2);
}

CoalitionPartition form_coalitions(const std::vector<int>& buyers,
                                   const CoalitionValueFn& value_fn,
                                   const ReputationFn& rep_fn) {
  CoalitionPartition p = init_partition(buyers, value_fn, rep_fn);
  while (p.coalitions.size() > 1) {
    // Coalitions stay ordered by lowest member id, so scanning pairs in order
    // and keeping the first strict maximum realizes the declared tie-break.
    double best_gain = 0.0;
    int best_i = -1, best_j = -1;
    for (size_t i = 0; i < p.coalitions.size(); ++i) {
      for (size_t j = i + 1; j < p.coalitions.size(); ++j) {
        const double g =
            merge_gain(p.coalitions[i].members, p.coalitions[j].members, value_fn);
        if (g > best_gain) {
          best_gain = g;
          best_i = static_cast<int>(i);
          best_j = static_cast<int>(j);
        }
      }
    }
    if (best_i < 0) break;  // no strictly positive gain
    auto merged = merged_members(p.coalitions[best_i].members,
                                 p.coalitions[best_j].members);
    p.coalitions.erase(p.coalitions.begin() + best_j);
    p.coalitions[best_i] = make_coalition(std::move(merged), value_fn, rep_fn);
    std::sort(p.coalitions.begin(), p.coalitions.end(),
              [](const Coalition& a, const Coalition& b) {
                return a.members.front() < b.members.front();
              });
  }
  return p;
}

bool is_stable(const CoalitionPartition& partition,
               const CoalitionValueFn& value_fn, const ReputationFn& /*rep_fn*/,
               const ContributionFn& contrib_fn) {
  const auto& cs = partition.coalitions;
  for (size_t i = 0; i < cs.size(); ++i) {
    for (int n : cs[i].members) {
      const double current =
          member_payoff(cs[i].members, value_fn(cs[i].members), contrib_fn, n);
      // Move to a fresh singleton.
      if (cs[i].members.size() > 1 && value_fn({n}) > current + 1e-12) return false;
      // Move to another existing coalition.
      for (size_t j = 0; j < cs.size(); ++j) {
        if (j == i) continue;
        auto target = merged_members(cs[j].members, {n});
        const double moved =
            member_payoff(target, value_fn(target), contrib_fn, n);
        if (moved > current + 1e-12) return false;
      }
    }
  }
  return true;
}

int select_winner(const CoalitionPartition& partition) {
  if (partition.coalitions.empty())
    throw std::domain_error("select_winner: empty partition");
  int best = 0;
  for (size_t i = 1; i < partition.coalitions.size(); ++i)
    if (partition.coalitions[i].reputation > partition.coalitions[best].reputation)
      best = static_cast<int>(i);
  return best;
}

std::vector<double> split_payoff(const std::vector<int>& members,
                                 double total_utility,
                                 const ContributionFn& contrib_fn) {
  if (members.empty()) throw std::domain_error("split_payoff: empty coalition");
  std::vector<double> contrib(members.size());
  double denom = 0.0;
  for (size_t i = 0; i < members.size(); ++i) {
    contrib[i] = contrib_fn(members[i]);
    denom += contrib[i];
  }
  std::vector<double> out(members.size());
  if (denom == 0.0) {
    for (auto& u : out) u = total_utility / static_cast<double>(members.size());
  } else {
    for (size_t i = 0; i < members.size(); ++i)
      out[i] = total_utility * contrib[i] / denom;
  }
  return out;
}

}  // namespace slicemkt
