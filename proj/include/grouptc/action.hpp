#pragma once

#include <span>
#include <string>
#include <vector>

#include "grouptc/error.hpp"
#include "grouptc/group.hpp"

namespace gtc {

enum class DomainKind { Group, SquareGrid, CubeGrid };

struct DomainShape {
  DomainKind kind = DomainKind::Group;
  int side = 0;  // n for n x n grids and n x n x n cubes
};

/// A group acting on {0..|Omega|-1} by permutations: perm(g)[u] = L_g(u).
/// Validated at construction (identity, bijectivity, compatibility).
class PermutationAction {
 public:
  PermutationAction(GroupPtr group, std::vector<std::vector<int>> perms, DomainShape shape);

  const FiniteGroup& group() const { return *group_; }
  const GroupPtr& group_ptr() const { return group_; }
  int domain_size() const { return domain_size_; }
  const DomainShape& shape() const { return shape_; }
  const std::vector<int>& perm(int g) const { return perms_[static_cast<std::size_t>(g)]; }

 private:
  GroupPtr group_;
  std::vector<std::vector<int>> perms_;
  int domain_size_ = 0;
  DomainShape shape_;
};

/// Left translation of the group on itself: perm(h)[g] = h g.
PermutationAction regular_action(GroupPtr group);

/// Exact lattice symmetries of an n x n pixel grid. Supported groups are
/// C1, C2, C4, D1, D2, D4 (built from make_group so they carry a spec).
/// Pixel (i, j) has index i * n + j; the generator rotation maps
/// (i, j) -> (j, n-1-i) (scaled by 4/m for C_m, D_m) and s maps (i, j) -> (i, n-1-j).
PermutationAction square_grid_action(GroupPtr group, int n);

/// Octahedral (O) or full octahedral (Oh) symmetries of an n x n x n voxel cube,
/// voxel (i, j, k) at index (i * n + j) * n + k, rotations about the cube center.
PermutationAction cube_grid_action(GroupPtr group, int n);

/// output(u) = f(L_{h^-1}(u)).
template <typename T>
std::vector<T> apply_signal_action(const PermutationAction& action, int h, std::span<const T> f) {
  if (static_cast<int>(f.size()) != action.domain_size())
    throw Error(ErrorKind::LengthMismatch, "signal has " + std::to_string(f.size()) + " values, action domain has " +
                                               std::to_string(action.domain_size()));
  const auto& p = action.perm(action.group().inv(h));
  std::vector<T> out(f.size());
  for (std::size_t u = 0; u < f.size(); ++u) out[u] = f[static_cast<std::size_t>(p[u])];
  return out;
}

template <typename T>
std::vector<T> apply_signal_action(const PermutationAction& action, int h, const std::vector<T>& f) {
  return apply_signal_action<T>(action, h, std::span<const T>(f));
}

/// Translate of a group-indexed signal: out(g) = theta(h^-1 g).
template <typename T>
std::vector<T> translate(const FiniteGroup& group, int h, std::span<const T> theta) {
  if (static_cast<int>(theta.size()) != group.order())
    throw Error(ErrorKind::LengthMismatch,
                "signal length " + std::to_string(theta.size()) + " != |G| = " + std::to_string(group.order()));
  const int hinv = group.inv(h);
  std::vector<T> out(theta.size());
  for (int g = 0; g < group.order(); ++g)
    out[static_cast<std::size_t>(g)] = theta[static_cast<std::size_t>(group.mul(hinv, g))];
  return out;
}

template <typename T>
std::vector<T> translate(const FiniteGroup& group, int h, const std::vector<T>& theta) {
  return translate<T>(group, h, std::span<const T>(theta));
}

/// CSV rows "element,domain_index,image_index" with a "# v1" header line.
std::string action_to_csv(const PermutationAction& action);

}  // namespace gtc
