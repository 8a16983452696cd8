#pragma once

// Brute-force reference implementations. They avoid the library's fast paths
// (no Cayley-table lookups where a closed form exists, no symmetry reduction)
// and serve as the ground truth for the unit and property tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "grouptc/action.hpp"
#include "grouptc/group.hpp"
#include "grouptc/spectral.hpp"

namespace oracle {

/// Product table of C_n from modular addition.
inline std::vector<std::vector<int>> cyclic_table(int n) {
  std::vector<std::vector<int>> t(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) t[a][b] = (a + b) % n;
  return t;
}

/// Product table of D_n from the permutations of the n-gon vertices:
/// r^a : v -> v + a, s r^b : v -> -(v + b). Product x y applies y first.
inline std::vector<std::vector<int>> dihedral_table(int n) {
  auto perm = [n](int e) {
    std::vector<int> p(n);
    for (int v = 0; v < n; ++v) p[v] = e < n ? (v + e) % n : ((-(v + e - n)) % n + n) % n;
    return p;
  };
  std::vector<std::vector<int>> perms;
  for (int e = 0; e < 2 * n; ++e) perms.push_back(perm(e));
  std::vector<std::vector<int>> t(2 * n, std::vector<int>(2 * n));
  for (int x = 0; x < 2 * n; ++x)
    for (int y = 0; y < 2 * n; ++y) {
      std::vector<int> c(n);
      for (int v = 0; v < n; ++v) c[v] = perms[x][perms[y][v]];
      t[x][y] = static_cast<int>(std::find(perms.begin(), perms.end(), c) - perms.begin());
    }
  return t;
}

/// Klein four-group on two bits, product is xor.
inline std::vector<std::vector<int>> klein_table() {
  std::vector<std::vector<int>> t(4, std::vector<int>(4));
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) t[a][b] = a ^ b;
  return t;
}

/// True iff the table satisfies every group axiom, checked exhaustively.
inline bool is_group(const std::vector<std::vector<int>>& t) {
  const int n = static_cast<int>(t.size());
  for (const auto& row : t) {
    if (static_cast<int>(row.size()) != n) return false;
    for (int v : row)
      if (v < 0 || v >= n) return false;
  }
  int e = -1;
  for (int i = 0; i < n && e < 0; ++i) {
    bool ok = true;
    for (int j = 0; j < n; ++j) ok = ok && t[i][j] == j && t[j][i] == j;
    if (ok) e = i;
  }
  if (e < 0) return false;
  for (int a = 0; a < n; ++a) {
    bool has = false;
    for (int b = 0; b < n; ++b) has = has || (t[a][b] == e && t[b][a] == e);
    if (!has) return false;
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (t[t[a][b]][c] != t[a][t[b][c]]) return false;
  return true;
}

/// Conjugacy classes by orbit enumeration.
inline int conjugacy_class_count(const gtc::FiniteGroup& g) {
  std::vector<int> seen(g.order(), 0);
  int count = 0;
  for (int x = 0; x < g.order(); ++x) {
    if (seen[x]) continue;
    ++count;
    for (int h = 0; h < g.order(); ++h) seen[g.mul(g.mul(h, x), g.inv(h))] = 1;
  }
  return count;
}

/// T(g1, g2) straight from the definition, every product taken from `mul`.
template <typename T, typename Mul>
std::vector<T> triple_correlation(int n, Mul mul, const std::vector<T>& theta) {
  std::vector<T> out(static_cast<std::size_t>(n) * n, T{});
  for (int g1 = 0; g1 < n; ++g1)
    for (int g2 = 0; g2 < n; ++g2)
      for (int g = 0; g < n; ++g) out[g1 * n + g2] += theta[g] * theta[mul(g, g1)] * theta[mul(g, g2)];
  return out;
}

/// out(g) = theta(h^-1 g), with h^-1 found by search.
template <typename T>
std::vector<T> translate(const gtc::FiniteGroup& g, int h, const std::vector<T>& theta) {
  int hinv = 0;
  while (g.mul(h, hinv) != g.identity()) ++hinv;
  std::vector<T> out(theta.size());
  for (int x = 0; x < g.order(); ++x) out[x] = theta[g.mul(hinv, x)];
  return out;
}

/// Every h with theta2 = translate(h, theta1).
template <typename T>
std::vector<int> orbit_elements(const gtc::FiniteGroup& g, const std::vector<T>& theta1, const std::vector<T>& theta2) {
  std::vector<int> out;
  for (int h = 0; h < g.order(); ++h)
    if (oracle::translate(g, h, theta1) == theta2) out.push_back(h);
  return out;
}

/// Theta(g) = <L_g phi, f>, with L_g phi(u) = phi(L_{g^-1} u) written out from the permutations.
inline std::vector<double> g_convolve(const std::vector<double>& phi, const std::vector<double>& f,
                                      const gtc::PermutationAction& a) {
  const auto& g = a.group();
  std::vector<double> out(g.order(), 0.0);
  for (int x = 0; x < g.order(); ++x) {
    std::vector<double> moved(phi.size());
    for (std::size_t u = 0; u < phi.size(); ++u) moved[a.perm(x)[u]] = phi[u];
    for (std::size_t u = 0; u < phi.size(); ++u) out[x] += moved[u] * f[u];
  }
  return out;
}

/// DFT under rho_k(x) = exp(-2 pi i k x / n).
inline std::vector<std::complex<double>> dft(const std::vector<double>& theta) {
  const int n = static_cast<int>(theta.size());
  std::vector<std::complex<double>> out(n);
  for (int k = 0; k < n; ++k)
    for (int x = 0; x < n; ++x) out[k] += theta[x] * std::polar(1.0, -2.0 * M_PI * k * x / n);
  return out;
}

/// Multiplicity of irrep k in rho_i (x) rho_j from the trace of the isotypic projector.
inline double kronecker_multiplicity(const gtc::IrrepTable& t, int i, int j, int k) {
  std::complex<double> s = 0.0;
  for (int g = 0; g < t.group().order(); ++g)
    s += t[i].matrices[g].trace() * t[j].matrices[g].trace() * std::conj(t[k].matrices[g].trace());
  return s.real() / t.group().order();
}

/// D4 Kronecker table, rows and columns A1 A2 B1 B2 E, entries are the
/// multiplicity tuples over the same order.
inline std::vector<std::vector<std::vector<int>>> d4_kronecker() {
  const std::vector<int> A1{1, 0, 0, 0, 0}, A2{0, 1, 0, 0, 0}, B1{0, 0, 1, 0, 0}, B2{0, 0, 0, 1, 0}, E{0, 0, 0, 0, 1},
      EE{1, 1, 1, 1, 0};
  return {{A1, A2, B1, B2, E}, {A2, A1, B2, B1, E}, {B1, B2, A1, A2, E}, {B2, B1, A2, A1, E}, {E, E, E, E, EE}};
}

inline std::vector<double> random_signal(int n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

inline std::vector<long long> random_int_signal(int n, std::mt19937_64& rng, int lo = -3, int hi = 3) {
  std::uniform_int_distribution<int> d(lo, hi);
  std::vector<long long> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace oracle
