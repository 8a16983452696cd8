#include "grouptc/action.hpp"

#include <array>
#include <sstream>

namespace gtc {

PermutationAction::PermutationAction(GroupPtr group, std::vector<std::vector<int>> perms, DomainShape shape)
    : group_(std::move(group)), perms_(std::move(perms)), shape_(shape) {
  const FiniteGroup& g = *group_;
  if (static_cast<int>(perms_.size()) != g.order())
    throw Error(ErrorKind::InvalidAction, "need one permutation per group element");
  domain_size_ = static_cast<int>(perms_.front().size());
  if (domain_size_ < 1) throw Error(ErrorKind::InvalidAction, "empty domain");
  for (int e = 0; e < g.order(); ++e) {
    const auto& p = perms_[e];
    if (static_cast<int>(p.size()) != domain_size_) throw Error(ErrorKind::InvalidAction, "permutation lengths differ");
    std::vector<char> seen(static_cast<std::size_t>(domain_size_), 0);
    for (int v : p) {
      if (v < 0 || v >= domain_size_ || seen[v])
        throw Error(ErrorKind::InvalidAction, "element " + std::to_string(e) + " is not a bijection");
      seen[v] = 1;
    }
  }
  for (int u = 0; u < domain_size_; ++u)
    if (perms_[g.identity()][u] != u) throw Error(ErrorKind::InvalidAction, "identity does not act trivially");
  for (int a = 0; a < g.order(); ++a)
    for (int b = 0; b < g.order(); ++b) {
      const auto& pab = perms_[g.mul(a, b)];
      const auto& pa = perms_[a];
      const auto& pb = perms_[b];
      for (int u = 0; u < domain_size_; ++u)
        if (pab[u] != pa[pb[u]])
          throw Error(ErrorKind::InvalidAction,
                      "compatibility fails for (" + std::to_string(a) + "," + std::to_string(b) + ")");
    }
}

PermutationAction regular_action(GroupPtr group) {
  const int n = group->order();
  std::vector<std::vector<int>> perms(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n)));
  for (int h = 0; h < n; ++h)
    for (int g = 0; g < n; ++g) perms[h][g] = group->mul(h, g);
  return PermutationAction(std::move(group), std::move(perms), {DomainKind::Group, 0});
}

namespace {

using Pixel = std::array<int, 2>;

Pixel rotate90(Pixel p, int n) { return {p[1], n - 1 - p[0]}; }
Pixel flip(Pixel p, int n) { return {p[0], n - 1 - p[1]}; }

Pixel rotate(Pixel p, int quarter_turns, int n) {
  for (int t = 0; t < quarter_turns; ++t) p = rotate90(p, n);
  return p;
}

}  // namespace

PermutationAction square_grid_action(GroupPtr group, int n) {
  if (n < 1) throw Error(ErrorKind::InvalidAction, "grid side must be >= 1");
  const auto& spec = group->spec();
  const bool lattice_family = spec && (spec->family == GroupFamily::Cyclic || spec->family == GroupFamily::Dihedral);
  if (!lattice_family || (spec->n != 1 && spec->n != 2 && spec->n != 4))
    throw Error(ErrorKind::UnsupportedGroup, group->name() + " is not an exact symmetry group of the square lattice");
  const int m = spec->n;
  const int step = 4 / m;  // quarter turns per generator rotation
  const bool dihedral = spec->family == GroupFamily::Dihedral;

  std::vector<std::vector<int>> perms;
  for (int g = 0; g < group->order(); ++g) {
    std::vector<int> p(static_cast<std::size_t>(n * n));
    const bool reflect = dihedral && g >= m;
    const int turns = (g % m) * step;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        // s r^b acts as flip after rotation.
        Pixel q = rotate({i, j}, turns, n);
        if (reflect) q = flip(q, n);
        p[static_cast<std::size_t>(i * n + j)] = q[0] * n + q[1];
      }
    perms.push_back(std::move(p));
  }
  return PermutationAction(std::move(group), std::move(perms), {DomainKind::SquareGrid, n});
}

PermutationAction cube_grid_action(GroupPtr group, int n) {
  if (n < 1) throw Error(ErrorKind::InvalidAction, "cube side must be >= 1");
  const auto& spec = group->spec();
  if (!spec || (spec->family != GroupFamily::Octahedral && spec->family != GroupFamily::FullOctahedral))
    throw Error(ErrorKind::UnsupportedGroup, group->name() + " does not act on the voxel cube");

  const auto& rot = octahedral_matrices();
  std::vector<std::vector<int>> perms;
  for (int g = 0; g < group->order(); ++g) {
    const auto& m = rot[static_cast<std::size_t>(g % 24)];
    const int sign = g >= 24 ? -1 : 1;
    std::vector<int> p(static_cast<std::size_t>(n * n * n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          // Doubled coordinates about the center keep everything integral.
          const std::array<int, 3> x{2 * i - (n - 1), 2 * j - (n - 1), 2 * k - (n - 1)};
          std::array<int, 3> y{};
          for (int r = 0; r < 3; ++r) y[r] = sign * (m[r][0] * x[0] + m[r][1] * x[1] + m[r][2] * x[2]);
          const int a = (y[0] + n - 1) / 2, b = (y[1] + n - 1) / 2, c = (y[2] + n - 1) / 2;
          p[static_cast<std::size_t>((i * n + j) * n + k)] = (a * n + b) * n + c;
        }
    perms.push_back(std::move(p));
  }
  return PermutationAction(std::move(group), std::move(perms), {DomainKind::CubeGrid, n});
}

std::string action_to_csv(const PermutationAction& action) {
  std::ostringstream os;
  os << "# v1\nelement,domain_index,image_index\n";
  for (int g = 0; g < action.group().order(); ++g)
    for (int u = 0; u < action.domain_size(); ++u) os << g << ',' << u << ',' << action.perm(g)[u] << '\n';
  return os.str();
}

}  // namespace gtc
