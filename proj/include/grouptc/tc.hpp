#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "grouptc/gconv.hpp"
#include "grouptc/group.hpp"

namespace gtc {

/// Full triple correlation T(g1, g2) = sum_g theta(g) theta(g g1) theta(g g2),
/// stored row-major |G| x |G|. No normalisation. Works for exact integer types.
template <typename T>
std::vector<T> triple_correlation_full(const FiniteGroup& group, std::span<const T> theta) {
  const int n = group.order();
  if (static_cast<int>(theta.size()) != n)
    throw Error(ErrorKind::LengthMismatch,
                "signal length " + std::to_string(theta.size()) + " != |G| = " + std::to_string(n));
  std::vector<T> out(static_cast<std::size_t>(n) * n, T{});
  for (int g1 = 0; g1 < n; ++g1)
    for (int g2 = 0; g2 < n; ++g2) {
      T acc{};
      for (int g = 0; g < n; ++g) acc += theta[g] * theta[group.mul(g, g1)] * theta[group.mul(g, g2)];
      out[static_cast<std::size_t>(g1) * n + g2] = acc;
    }
  return out;
}

template <typename T>
std::vector<T> triple_correlation_full(const FiniteGroup& group, const std::vector<T>& theta) {
  return triple_correlation_full<T>(group, std::span<const T>(theta));
}

/// Partition of the |G|^2 index pairs into orbits of the TC symmetry relations:
/// the swap (g1,g2)~(g2,g1) always, plus the four inverse relations when G is
/// commutative. Classes are ordered by their lexicographically smallest pair,
/// which is the class representative.
struct SymmetryClasses {
  int order = 0;
  std::vector<std::pair<int, int>> representatives;
  std::vector<int> class_of;  // pair index g1 * |G| + g2 -> class id
  std::vector<int> sizes;

  int count() const { return static_cast<int>(representatives.size()); }
};

SymmetryClasses symmetry_classes(const FiniteGroup& group);

/// TC evaluated only at the class representatives.
template <typename T>
std::vector<T> triple_correlation_reduced(const FiniteGroup& group, const SymmetryClasses& classes,
                                          std::span<const T> theta) {
  const int n = group.order();
  if (static_cast<int>(theta.size()) != n)
    throw Error(ErrorKind::LengthMismatch,
                "signal length " + std::to_string(theta.size()) + " != |G| = " + std::to_string(n));
  std::vector<T> out;
  out.reserve(classes.representatives.size());
  for (const auto& [g1, g2] : classes.representatives) {
    T acc{};
    for (int g = 0; g < n; ++g) acc += theta[g] * theta[group.mul(g, g1)] * theta[group.mul(g, g2)];
    out.push_back(acc);
  }
  return out;
}

template <typename T>
std::vector<T> triple_correlation_reduced(const FiniteGroup& group, const SymmetryClasses& classes,
                                          const std::vector<T>& theta) {
  return triple_correlation_reduced<T>(group, classes, std::span<const T>(theta));
}

/// Expands a representative vector back to the full |G| x |G| table.
template <typename T>
std::vector<T> expand_reduced(const SymmetryClasses& classes, std::span<const T> reduced) {
  std::vector<T> full(classes.class_of.size());
  for (std::size_t p = 0; p < full.size(); ++p) full[p] = reduced[static_cast<std::size_t>(classes.class_of[p])];
  return full;
}

/// Gradient of sum_r w[r] * T(rep_r) with respect to theta.
std::vector<double> triple_correlation_reduced_backward(const FiniteGroup& group, const SymmetryClasses& classes,
                                                        std::span<const double> theta,
                                                        std::span<const double> grad_out);

/// Per-channel reduced TC, concatenated in channel order (K x #classes).
std::vector<double> tc_features(const FeatureMap& theta, const SymmetryClasses& classes);

/// CSV rows "g1,g2,value" (full) with a "# v1" header.
std::string tc_full_to_csv(int order, const std::vector<double>& full);
/// CSV rows "class_rep_g1,class_rep_g2,value" with a "# v1" header.
std::string tc_reduced_to_csv(const SymmetryClasses& classes, const std::vector<double>& reduced);

}  // namespace gtc
