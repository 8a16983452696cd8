#include "grouptc/tc.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "grouptc/io.hpp"

namespace gtc {

namespace {

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

SymmetryClasses symmetry_classes(const FiniteGroup& group) {
  const int n = group.order();
  auto idx = [n](int a, int b) { return a * n + b; };
  DisjointSets sets(n * n);
  for (int g1 = 0; g1 < n; ++g1)
    for (int g2 = 0; g2 < n; ++g2) {
      const int p = idx(g1, g2);
      sets.unite(p, idx(g2, g1));
      if (group.commutative()) {
        const int i1 = group.inv(g1), i2 = group.inv(g2);
        sets.unite(p, idx(i1, group.mul(g2, i1)));
        sets.unite(p, idx(group.mul(g2, i1), i1));
        sets.unite(p, idx(i2, group.mul(g1, i2)));
        sets.unite(p, idx(group.mul(g1, i2), i2));
      }
    }

  // Roots are the smallest member, so scanning pairs in order meets each
  // class first at its representative.
  SymmetryClasses out;
  out.order = n;
  out.class_of.assign(static_cast<std::size_t>(n) * n, -1);
  std::vector<int> root_to_class(static_cast<std::size_t>(n) * n, -1);
  for (int p = 0; p < n * n; ++p) {
    const int r = sets.find(p);
    if (root_to_class[r] < 0) {
      root_to_class[r] = out.count();
      out.representatives.emplace_back(p / n, p % n);
      out.sizes.push_back(0);
    }
    out.class_of[p] = root_to_class[r];
    ++out.sizes[root_to_class[r]];
  }
  return out;
}

std::vector<double> triple_correlation_reduced_backward(const FiniteGroup& group, const SymmetryClasses& classes,
                                                        std::span<const double> theta,
                                                        std::span<const double> grad_out) {
  const int n = group.order();
  if (static_cast<int>(theta.size()) != n || static_cast<int>(grad_out.size()) != classes.count())
    throw Error(ErrorKind::LengthMismatch, "TC backward shape mismatch");
  std::vector<double> grad(static_cast<std::size_t>(n), 0.0);
  for (int r = 0; r < classes.count(); ++r) {
    const double w = grad_out[r];
    if (w == 0.0) continue;
    const auto [g1, g2] = classes.representatives[r];
    for (int g = 0; g < n; ++g) {
      const int a = group.mul(g, g1), b = group.mul(g, g2);
      grad[g] += w * theta[a] * theta[b];
      grad[a] += w * theta[g] * theta[b];
      grad[b] += w * theta[g] * theta[a];
    }
  }
  return grad;
}

std::vector<double> tc_features(const FeatureMap& theta, const SymmetryClasses& classes) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(theta.channels) * classes.count());
  for (int k = 0; k < theta.channels; ++k) {
    const auto r = triple_correlation_reduced<double>(*theta.group, classes, theta.channel(k));
    out.insert(out.end(), r.begin(), r.end());
  }
  return out;
}

std::string tc_full_to_csv(int order, const std::vector<double>& full) {
  std::ostringstream os;
  os << "# v1\ng1,g2,value\n";
  for (int a = 0; a < order; ++a)
    for (int b = 0; b < order; ++b)
      os << a << ',' << b << ',' << format_number(full[static_cast<std::size_t>(a) * order + b]) << '\n';
  return os.str();
}

std::string tc_reduced_to_csv(const SymmetryClasses& classes, const std::vector<double>& reduced) {
  std::ostringstream os;
  os << "# v1\nclass_rep_g1,class_rep_g2,value\n";
  for (int r = 0; r < classes.count(); ++r)
    os << classes.representatives[r].first << ',' << classes.representatives[r].second << ','
       << format_number(reduced[r]) << '\n';
  return os.str();
}

}  // namespace gtc
