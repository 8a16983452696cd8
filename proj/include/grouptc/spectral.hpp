#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "grouptc/group.hpp"

namespace gtc {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

struct Irrep {
  std::string name;
  int dim = 1;
  std::vector<CMatrix> matrices;  // one d x d matrix per group element

  std::vector<Complex> character() const;
};

/// Complete list of unitary irreps of a group, trivial representation first.
/// The constructor checks every invariant and throws on the first violation:
/// shapes, rho(e) = I, unitarity, homomorphism, sum of d^2 = |G|, character
/// orthogonality, and one irrep per conjugacy class.
class IrrepTable {
 public:
  IrrepTable(GroupPtr group, std::vector<Irrep> irreps, double tol = 1e-10);

  const FiniteGroup& group() const { return *group_; }
  const GroupPtr& group_ptr() const { return group_; }
  const std::vector<Irrep>& irreps() const { return irreps_; }
  const Irrep& operator[](int i) const { return irreps_[static_cast<std::size_t>(i)]; }
  int size() const { return static_cast<int>(irreps_.size()); }
  int dim(int i) const { return irreps_[static_cast<std::size_t>(i)].dim; }

  /// (1/|G|) sum_h chi_i(h) conj(chi_j(h)).
  Complex character_inner(int i, int j) const;

 private:
  GroupPtr group_;
  std::vector<Irrep> irreps_;
};

/// Closed-form irreps for the built-in families (and direct products of them).
IrrepTable builtin_irreps(GroupPtr group);

/// Irrep file: {"format_version": 1, "group": name, "irreps": [{"name", "dim",
/// "matrices": [element][row][col] -> [re, im]}]}.
nlohmann::json irreps_to_json(const IrrepTable& table);
IrrepTable irreps_from_json(GroupPtr group, const nlohmann::json& j);

using FourierCoefficients = std::vector<CMatrix>;

/// F_rho = sum_g theta(g) rho(g).
FourierCoefficients gft(std::span<const double> theta, const IrrepTable& irreps);
FourierCoefficients gft(std::span<const Complex> theta, const IrrepTable& irreps);

/// theta(g) = (1/|G|) sum_rho d_rho tr(F_rho rho(g^-1)).
std::vector<Complex> igft(const FourierCoefficients& f, const IrrepTable& irreps);
std::vector<double> igft_real(const FourierCoefficients& f, const IrrepTable& irreps);

/// Smallest singular value over all blocks, relative to the largest block norm.
bool fourier_blocks_invertible(const FourierCoefficients& f, double tol = 1e-9);

/// n[i][j][k] = multiplicity of irrep k in rho_i (x) rho_j.
struct KroneckerTable {
  int size = 0;
  std::vector<int> multiplicity;  // row-major size^3

  int at(int i, int j, int k) const { return multiplicity[(static_cast<std::size_t>(i) * size + j) * size + k]; }
  /// Irreps k with n[i][j][k] > 0, ascending.
  std::vector<int> constituents(int i, int j) const;
};

KroneckerTable kronecker_table(const IrrepTable& irreps);

/// CSV with header "x,<names...>", one row per irrep with each cell
/// holding the multiplicity tuple "(m0 m1 ...)".
std::string kronecker_table_to_csv(const KroneckerTable& kron, const IrrepTable& irreps);

struct CGBlock {
  int irrep = 0;
  int copy = 0;
  int offset = 0;
  int dim = 1;
};

/// Unitary C with (rho_i (x) rho_j)(g) = C^dagger [direct sum of blocks rho_k(g)] C.
struct ClebschGordan {
  int left = 0;
  int right = 0;
  CMatrix matrix;
  std::vector<CGBlock> blocks;

  /// max over g of the elementwise residual of the defining equation.
  double residual(const IrrepTable& irreps) const;
};

/// Numeric CG decomposition via the matrix-unit projectors
/// P^k_ab = (d_k/|G|) sum_g conj(rho_k(g)_ab) (rho_i (x) rho_j)(g).
ClebschGordan clebsch_gordan(int i, int j, const IrrepTable& irreps, const KroneckerTable& kron);

/// Irreps, their Kronecker table and every CG matrix, built once.
class SpectralBasis {
 public:
  explicit SpectralBasis(IrrepTable irreps);

  const IrrepTable& irreps() const { return irreps_; }
  const KroneckerTable& kronecker() const { return kron_; }
  const ClebschGordan& cg(int i, int j) const { return cg_[static_cast<std::size_t>(i) * irreps_.size() + j]; }
  const FiniteGroup& group() const { return irreps_.group(); }

 private:
  IrrepTable irreps_;
  KroneckerTable kron_;
  std::vector<ClebschGordan> cg_;
};

using IrrepPair = std::pair<int, int>;
using Bispectrum = std::map<IrrepPair, CMatrix>;

/// beta_{i,j} = (F_i (x) F_j)^dagger C^dagger [sum_k F_k^{(+) n_k}] C.
CMatrix bispectrum_coefficient(const FourierCoefficients& f, const SpectralBasis& basis, int i, int j);

/// Scalar form conj(F_i) conj(F_j) F_{ij} for commutative groups.
Complex commutative_bispectrum_coefficient(const FourierCoefficients& f, const KroneckerTable& kron, int i, int j);

/// All pairs when `pairs` is empty. Uses the scalar form on commutative groups.
Bispectrum bispectrum(const FourierCoefficients& f, const SpectralBasis& basis,
                      const std::vector<IrrepPair>& pairs = {});

/// Largest coefficient-wise relative deviation between two bispectra over the
/// pairs of `a`.
double bispectrum_relative_difference(const Bispectrum& a, const Bispectrum& b);

/// Which bispectral coefficients to compute to recover every Fourier block.
struct RecoveryPlan {
  std::vector<IrrepPair> pairs;  // starts with (0,0), then (anchor,0)
  std::vector<int> anchors;      // irreps recovered from their own (rho, rho0) coefficient
  std::vector<int> visit_order;  // irreps in the order they become known
  std::vector<int> unrecovered;  // non-empty iff infeasible
  bool feasible = false;

  int length() const { return static_cast<int>(pairs.size()); }
};

/// Breadth-first search over the Kronecker table. The anchor is the first
/// non-trivial irrep of largest dimension; afterwards the lexicographically
/// smallest pair (i <= j) of known irreps whose product contains an unknown
/// irrep is added. A stalled search on a commutative group adds the first
/// unknown irrep as a further anchor; on a non-commutative group it stops and
/// the plan is infeasible.
RecoveryPlan recovery_plan(const IrrepTable& irreps, const KroneckerTable& kron);

struct RecoveryOptions {
  std::uint64_t seed = 0;
  int max_restarts = 200;
  double tolerance = 1e-9;
};

struct RecoveryResult {
  std::vector<double> signal;
  FourierCoefficients fourier;
  double residual = 0.0;  // normalised gauge residual at the accepted solution
  int restarts = 0;
};

/// Recovers a real signal from the planned bispectral coefficients: DC block
/// from beta_{0,0}, anchor blocks as Hermitian square roots of
/// beta_{a,0} / conj(F_0), the remaining blocks read off the block-diagonal
/// form C (F_i (x) F_j)^{-dagger} beta_{i,j} C^dagger. The anchors' unitary
/// gauge is then fixed so that every read-off matrix is block diagonal, every
/// repeated block agrees and the inverse transform is real.
RecoveryResult recover_signal(const Bispectrum& beta, const RecoveryPlan& plan, const SpectralBasis& basis,
                              const RecoveryOptions& options = {});

}  // namespace gtc
