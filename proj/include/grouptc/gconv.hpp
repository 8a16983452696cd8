#pragma once

#include <span>
#include <string>
#include <vector>

#include "grouptc/action.hpp"

namespace gtc {

/// K full-support filters over an action's domain, row-major K x |Omega|.
struct FilterBank {
  int channels = 0;
  int domain_size = 0;
  std::vector<double> values;

  FilterBank(int k, int domain, std::vector<double> v);
  std::span<const double> filter(int k) const {
    return {values.data() + static_cast<std::size_t>(k) * domain_size, static_cast<std::size_t>(domain_size)};
  }
};

/// Group-indexed feature map, row-major K x |G|.
struct FeatureMap {
  GroupPtr group;
  int channels = 0;
  std::vector<double> values;

  int order() const { return group->order(); }
  std::span<const double> channel(int k) const {
    return {values.data() + static_cast<std::size_t>(k) * order(), static_cast<std::size_t>(order())};
  }
  std::span<double> channel(int k) {
    return {values.data() + static_cast<std::size_t>(k) * order(), static_cast<std::size_t>(order())};
  }
};

/// Theta_k(g) = sum_u phi_k(L_{g^-1}(u)) f(u), accumulated in ascending u.
FeatureMap g_convolve(const FilterBank& bank, std::span<const double> f, const PermutationAction& action);

/// Per-channel maximum over the group axis.
std::vector<double> max_g_pool(const FeatureMap& theta);

/// Applies the regular-action translate by h to every channel.
FeatureMap translate(const FeatureMap& theta, int h);

/// CSV "channel,element,value" with a "# v1" header.
std::string feature_map_to_csv(const FeatureMap& theta);

}  // namespace gtc
