#include "grouptc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "grouptc/error.hpp"

namespace gtc {

namespace {

template <typename T>
FourierCoefficients gft_impl(std::span<const T> theta, const IrrepTable& irreps) {
  const int n = irreps.group().order();
  if (static_cast<int>(theta.size()) != n)
    throw Error(ErrorKind::LengthMismatch,
                "signal length " + std::to_string(theta.size()) + " != |G| = " + std::to_string(n));
  FourierCoefficients out;
  out.reserve(static_cast<std::size_t>(irreps.size()));
  for (const auto& rep : irreps.irreps()) {
    CMatrix f = CMatrix::Zero(rep.dim, rep.dim);
    for (int g = 0; g < n; ++g) f += Complex(theta[g]) * rep.matrices[g];
    out.push_back(std::move(f));
  }
  return out;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMatrix block_sum(const ClebschGordan& cg, const std::vector<CMatrix>& per_irrep) {
  const auto size = cg.matrix.rows();
  CMatrix d = CMatrix::Zero(size, size);
  for (const auto& b : cg.blocks) d.block(b.offset, b.offset, b.dim, b.dim) = per_irrep[b.irrep];
  return d;
}

}  // namespace

FourierCoefficients gft(std::span<const double> theta, const IrrepTable& irreps) { return gft_impl(theta, irreps); }
FourierCoefficients gft(std::span<const Complex> theta, const IrrepTable& irreps) { return gft_impl(theta, irreps); }

std::vector<Complex> igft(const FourierCoefficients& f, const IrrepTable& irreps) {
  if (static_cast<int>(f.size()) != irreps.size())
    throw Error(ErrorKind::BlockShapeMismatch, "expected " + std::to_string(irreps.size()) + " Fourier blocks");
  for (int i = 0; i < irreps.size(); ++i)
    if (f[i].rows() != irreps.dim(i) || f[i].cols() != irreps.dim(i))
      throw Error(ErrorKind::BlockShapeMismatch, "block " + irreps[i].name + " has wrong shape");
  const FiniteGroup& group = irreps.group();
  const int n = group.order();
  std::vector<Complex> theta(static_cast<std::size_t>(n));
  for (int g = 0; g < n; ++g) {
    Complex acc = 0.0;
    const int gi = group.inv(g);
    for (int i = 0; i < irreps.size(); ++i)
      acc += static_cast<double>(irreps.dim(i)) * (f[i] * irreps[i].matrices[gi]).trace();
    theta[g] = acc / static_cast<double>(n);
  }
  return theta;
}

std::vector<double> igft_real(const FourierCoefficients& f, const IrrepTable& irreps) {
  const auto c = igft(f, irreps);
  std::vector<double> out;
  out.reserve(c.size());
  for (const auto& v : c) out.push_back(v.real());
  return out;
}

bool fourier_blocks_invertible(const FourierCoefficients& f, double tol) {
  double largest = 0.0;
  std::vector<double> smallest;
  for (const auto& block : f) {
    Eigen::JacobiSVD<CMatrix> svd(block);
    const auto& s = svd.singularValues();
    largest = std::max(largest, s(0));
    smallest.push_back(s(s.size() - 1));
  }
  if (largest == 0.0) return false;
  return std::all_of(smallest.begin(), smallest.end(), [&](double s) { return s > tol * largest; });
}

std::vector<int> KroneckerTable::constituents(int i, int j) const {
  std::vector<int> out;
  for (int k = 0; k < size; ++k)
    if (at(i, j, k) > 0) out.push_back(k);
  return out;
}

KroneckerTable kronecker_table(const IrrepTable& irreps) {
  const int r = irreps.size();
  const int n = irreps.group().order();
  std::vector<std::vector<Complex>> chi;
  for (const auto& rep : irreps.irreps()) chi.push_back(rep.character());

  KroneckerTable out;
  out.size = r;
  out.multiplicity.assign(static_cast<std::size_t>(r) * r * r, 0);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int k = 0; k < r; ++k) {
        Complex acc = 0.0;
        for (int g = 0; g < n; ++g) acc += chi[i][g] * chi[j][g] * std::conj(chi[k][g]);
        acc /= static_cast<double>(n);
        const double rounded = std::round(acc.real());
        if (std::abs(acc - rounded) > 1e-8 || rounded < 0)
          throw Error(ErrorKind::NonIntegerMultiplicity, "multiplicity of " + irreps[k].name + " in " + irreps[i].name +
                                                             "x" + irreps[j].name + " is " +
                                                             std::to_string(acc.real()));
        out.multiplicity[(static_cast<std::size_t>(i) * r + j) * r + k] = static_cast<int>(rounded);
      }
  return out;
}

std::string kronecker_table_to_csv(const KroneckerTable& kron, const IrrepTable& irreps) {
  std::ostringstream os;
  os << "# v1\nx";
  for (const auto& rep : irreps.irreps()) os << ',' << rep.name;
  os << '\n';
  for (int i = 0; i < kron.size; ++i) {
    os << irreps[i].name;
    for (int j = 0; j < kron.size; ++j) {
      os << ",(";
      for (int k = 0; k < kron.size; ++k) os << (k ? " " : "") << kron.at(i, j, k);
      os << ')';
    }
    os << '\n';
  }
  return os.str();
}

double ClebschGordan::residual(const IrrepTable& irreps) const {
  const int n = irreps.group().order();
  std::vector<CMatrix> per_irrep(static_cast<std::size_t>(irreps.size()));
  double worst = 0.0;
  for (int g = 0; g < n; ++g) {
    for (int k = 0; k < irreps.size(); ++k) per_irrep[k] = irreps[k].matrices[g];
    const CMatrix lhs = kron(irreps[left].matrices[g], irreps[right].matrices[g]);
    const CMatrix rhs = matrix.adjoint() * block_sum(*this, per_irrep) * matrix;
    worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  return worst;
}

ClebschGordan clebsch_gordan(int i, int j, const IrrepTable& irreps, const KroneckerTable& kron_table) {
  const int n = irreps.group().order();
  const int size = irreps.dim(i) * irreps.dim(j);
  std::vector<CMatrix> t;
  t.reserve(static_cast<std::size_t>(n));
  for (int g = 0; g < n; ++g) t.push_back(kron(irreps[i].matrices[g], irreps[j].matrices[g]));

  auto projector = [&](int k, int a, int b) {
    CMatrix p = CMatrix::Zero(size, size);
    for (int g = 0; g < n; ++g) p += std::conj(irreps[k].matrices[g](a, b)) * t[g];
    return CMatrix(p * (static_cast<double>(irreps.dim(k)) / n));
  };

  ClebschGordan cg;
  cg.left = i;
  cg.right = j;
  CMatrix u(size, size);
  int offset = 0;
  for (int k = 0; k < irreps.size(); ++k) {
    const int mult = kron_table.at(i, j, k);
    if (mult == 0) continue;
    const int dk = irreps.dim(k);
    const CMatrix p00 = projector(k, 0, 0);

    // Ordered Gram-Schmidt over the columns of the rank-`mult` projector.
    std::vector<Eigen::VectorXcd> seeds;
    for (int c = 0; c < size && static_cast<int>(seeds.size()) < mult; ++c) {
      Eigen::VectorXcd v = p00.col(c);
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& s : seeds) v -= s.dot(v) * s;
      const double norm = v.norm();
      if (norm > 1e-8) seeds.push_back(v / norm);
    }
    if (static_cast<int>(seeds.size()) != mult)
      throw Error(ErrorKind::DecompositionFailure, "projector rank for " + irreps[k].name + " in " + irreps[i].name +
                                                       "x" + irreps[j].name + " below multiplicity");

    std::vector<CMatrix> transfer;
    for (int b = 0; b < dk; ++b) transfer.push_back(b == 0 ? CMatrix::Identity(size, size) : projector(k, b, 0));
    for (int copy = 0; copy < mult; ++copy) {
      for (int b = 0; b < dk; ++b) u.col(offset + b) = transfer[b] * seeds[copy];
      cg.blocks.push_back({k, copy, offset, dk});
      offset += dk;
    }
  }
  if (offset != size)
    throw Error(ErrorKind::DecompositionFailure, "blocks do not fill " + irreps[i].name + "x" + irreps[j].name);

  cg.matrix = u.adjoint();
  const double unitarity = (cg.matrix * cg.matrix.adjoint() - CMatrix::Identity(size, size)).cwiseAbs().maxCoeff();
  const double res = cg.residual(irreps);
  if (unitarity > 1e-10 || res > 1e-8)
    throw Error(ErrorKind::DecompositionFailure, irreps[i].name + "x" + irreps[j].name + ": residual " +
                                                     std::to_string(res) + ", unitarity " + std::to_string(unitarity));
  return cg;
}

SpectralBasis::SpectralBasis(IrrepTable irreps) : irreps_(std::move(irreps)), kron_(kronecker_table(irreps_)) {
  const int r = irreps_.size();
  cg_.reserve(static_cast<std::size_t>(r) * r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) cg_.push_back(clebsch_gordan(i, j, irreps_, kron_));
}

CMatrix bispectrum_coefficient(const FourierCoefficients& f, const SpectralBasis& basis, int i, int j) {
  const ClebschGordan& cg = basis.cg(i, j);
  const CMatrix fij = kron(f[i], f[j]);
  return fij.adjoint() * cg.matrix.adjoint() * block_sum(cg, f) * cg.matrix;
}

Complex commutative_bispectrum_coefficient(const FourierCoefficients& f, const KroneckerTable& kron_table, int i,
                                           int j) {
  const auto parts = kron_table.constituents(i, j);
  if (parts.size() != 1 || f[i].size() != 1 || f[j].size() != 1)
    throw Error(ErrorKind::BlockShapeMismatch, "scalar bispectrum needs one-dimensional irreps");
  return std::conj(f[i](0, 0)) * std::conj(f[j](0, 0)) * f[parts[0]](0, 0);
}

Bispectrum bispectrum(const FourierCoefficients& f, const SpectralBasis& basis, const std::vector<IrrepPair>& pairs) {
  std::vector<IrrepPair> todo = pairs;
  if (todo.empty())
    for (int i = 0; i < basis.irreps().size(); ++i)
      for (int j = 0; j < basis.irreps().size(); ++j) todo.emplace_back(i, j);
  const bool scalar = basis.group().commutative();
  Bispectrum out;
  for (const auto& [i, j] : todo) {
    if (scalar) {
      CMatrix m(1, 1);
      m(0, 0) = commutative_bispectrum_coefficient(f, basis.kronecker(), i, j);
      out[{i, j}] = m;
    } else {
      out[{i, j}] = bispectrum_coefficient(f, basis, i, j);
    }
  }
  return out;
}

double bispectrum_relative_difference(const Bispectrum& a, const Bispectrum& b) {
  double scale = 0.0;
  for (const auto& [key, m] : a) scale = std::max(scale, m.norm());
  double worst = 0.0;
  for (const auto& [key, m] : a) {
    auto it = b.find(key);
    if (it == b.end() || it->second.rows() != m.rows() || it->second.cols() != m.cols())
      throw Error(ErrorKind::BlockShapeMismatch, "bispectra cover different pairs");
    const double denom = std::max({m.norm(), it->second.norm(), 1e-8 * scale});
    if (denom == 0.0) continue;
    worst = std::max(worst, (m - it->second).norm() / denom);
  }
  return worst;
}

RecoveryPlan recovery_plan(const IrrepTable& irreps, const KroneckerTable& kron_table) {
  const int r = irreps.size();
  const bool commutative = irreps.group().commutative();
  RecoveryPlan plan;
  std::vector<bool> known(static_cast<std::size_t>(r), false);
  auto learn = [&](int k) {
    if (!known[k]) {
      known[k] = true;
      plan.visit_order.push_back(k);
    }
  };
  plan.pairs.emplace_back(0, 0);
  learn(0);
  auto add_anchor = [&](int a) {
    plan.anchors.push_back(a);
    plan.pairs.emplace_back(a, 0);
    learn(a);
  };

  int anchor = -1;
  for (int k = 1; k < r; ++k)
    if (anchor < 0 || irreps.dim(k) > irreps.dim(anchor)) anchor = k;
  if (anchor > 0) add_anchor(anchor);

  while (std::find(known.begin(), known.end(), false) != known.end()) {
    bool progressed = false;
    for (int i = 0; i < r && !progressed; ++i) {
      if (!known[i]) continue;
      for (int j = i; j < r && !progressed; ++j) {
        if (!known[j]) continue;
        const auto parts = kron_table.constituents(i, j);
        if (std::none_of(parts.begin(), parts.end(), [&](int k) { return !known[k]; })) continue;
        plan.pairs.emplace_back(i, j);
        for (int k : parts) learn(k);
        progressed = true;
      }
    }
    if (progressed) continue;
    if (!commutative) break;
    add_anchor(static_cast<int>(std::find(known.begin(), known.end(), false) - known.begin()));
  }
  for (int k = 0; k < r; ++k)
    if (!known[k]) plan.unrecovered.push_back(k);
  plan.feasible = plan.unrecovered.empty();
  return plan;
}

}  // namespace gtc
