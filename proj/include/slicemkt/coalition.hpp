#pragma once

#include <functional>
#include <string>
#include <vector>

namespace slicemkt {

// Value of a coalition given its member ids. Characteristic form: the value
// may depend only on the members themselves.
using CoalitionValueFn = std::function<double(const std::vector<int>&)>;
// Per-member contribution measure (Omega_n * w_n) used for payoff splits.
using ContributionFn = std::function<double(int)>;
// Per-member reputation lookup.
using ReputationFn = std::function<double(int)>;

struct Coalition {
  std::vector<int> members;  // sorted buyer ids
  double value = 0.0;        // cached v
  double reputation = 0.0;   // cached summed Omega
};

struct CoalitionPartition {
  std::vector<Coalition> coalitions;

  // Checks the disjoint-cover property against the given buyer set and that
  // cached value/reputation match recomputation within 1e-9.
  bool valid(const std::vector<int>& buyers, const CoalitionValueFn& value_fn,
             const ReputationFn& rep_fn) const;

  std::string describe() const;  // e.g. "{1,2}|{3}"
};

CoalitionPartition init_partition(const std::vector<int>& buyers,
                                  const CoalitionValueFn& value_fn,
                                  const ReputationFn& rep_fn);

// v(z1 u z2) - v(z1) - v(z2); a merge is admissible iff this is > 0.
double merge_gain(const std::vector<int>& z1, const std::vector<int>& z2,
                  const CoalitionValueFn& value_fn);

// Greedy best-positive-gain merging until no pair improves. Ties break on
// the lexicographically smallest (lowest member id) pair. Deterministic.
CoalitionPartition form_coalitions(const std::vector<int>& buyers,
                                   const CoalitionValueFn& value_fn,
                                   const ReputationFn& rep_fn);

// Single-deviation stability: no buyer strictly increases its own payoff
// (proportional split by contribution) by moving to another coalition or to
// a fresh singleton.
bool is_stable(const CoalitionPartition& partition,
               const CoalitionValueFn& value_fn, const ReputationFn& rep_fn,
               const ContributionFn& contrib_fn);

// Index of the coalition with the highest summed reputation; ties break to
// the smaller index.
int select_winner(const CoalitionPartition& partition);

// Proportional split of total_utility by Omega_n * w_n; equal split when all
// contributions are zero. Sums exactly to total_utility.
std::vector<double> split_payoff(const std::vector<int>& members,
                                 double total_utility,
                                 const ContributionFn& contrib_fn);

}  // namespace slicemkt
