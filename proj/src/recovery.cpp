#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "grouptc/error.hpp"
#include "grouptc/spectral.hpp"

namespace gtc {

namespace {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double smallest_singular_value(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues().minCoeff();
}

// d^2 reals -> Hermitian H -> exp(iH).
CMatrix unitary_from_params(const double* p, int d) {
  CMatrix h = CMatrix::Zero(d, d);
  int idx = 0;
  for (int r = 0; r < d; ++r) h(r, r) = p[idx++];
  for (int r = 0; r < d; ++r)
    for (int c = r + 1; c < d; ++c) {
      h(r, c) = Complex(p[idx], p[idx + 1]);
      h(c, r) = std::conj(h(r, c));
      idx += 2;
    }
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
  Eigen::VectorXcd phases(d);
  for (int k = 0; k < d; ++k) phases(k) = std::polar(1.0, eig.eigenvalues()(k));
  return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

CMatrix haar_unitary(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix z(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) z(r, c) = Complex(normal(rng), normal(rng));
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(d, d);
  const CMatrix rmat = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < d; ++k) {
    const Complex diag = rmat(k, k);
    if (std::abs(diag) > 0) q.col(k) *= diag / std::abs(diag);
  }
  return q;
}

// Hermitian square root with clamped eigenvalues and a fixed eigenvector phase.
CMatrix hermitian_sqrt(const CMatrix& m, double& ratio) {
  const CMatrix h = (m + m.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
  CMatrix v = eig.eigenvectors();
  Eigen::VectorXd lambda = eig.eigenvalues();
  const double top = lambda.maxCoeff();
  for (Eigen::Index k = 0; k < lambda.size(); ++k)
    if (lambda(k) < 1e-12 * std::max(top, 0.0)) lambda(k) = 0.0;
  ratio = top <= 0.0 ? 0.0 : std::sqrt(lambda.minCoeff() / top);
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    Eigen::Index arg = 0;
    v.col(c).cwiseAbs().maxCoeff(&arg);
    const Complex lead = v(arg, c);
    if (std::abs(lead) > 0) v.col(c) *= std::conj(lead) / std::abs(lead);
  }
  return v * lambda.cwiseSqrt().cast<Complex>().asDiagonal() * v.adjoint();
}

struct GaugeProblem {
  const Bispectrum& beta;
  const RecoveryPlan& plan;
  const SpectralBasis& basis;
  Complex dc;
  double scale;                 // cube root of the largest bispectral coefficient norm
  std::vector<CMatrix> roots;   // per anchor, Hermitian root
  std::vector<CMatrix> starts;  // per anchor, starting unitary
  std::vector<int> offsets;     // parameter offset per anchor
  int n_params = 0;

  // Fourier blocks and residuals for a parameter vector; nullopt when a
  // propagated product is singular.
  std::optional<std::vector<double>> evaluate(const std::vector<double>& p, FourierCoefficients* out,
                                              bool* singular_pair = nullptr) const {
    const IrrepTable& irreps = basis.irreps();
    FourierCoefficients f(static_cast<std::size_t>(irreps.size()));
    std::vector<bool> known(f.size(), false);
    f[0] = CMatrix::Constant(1, 1, dc);
    known[0] = true;
    for (std::size_t a = 0; a < plan.anchors.size(); ++a) {
      const int k = plan.anchors[a];
      f[k] = starts[a] * unitary_from_params(p.data() + offsets[a], irreps.dim(k)) * roots[a];
      known[k] = true;
    }

    std::vector<double> res;
    for (const auto& pair : plan.pairs) {
      const auto [i, j] = pair;
      if (j == 0 && (i == 0 || std::find(plan.anchors.begin(), plan.anchors.end(), i) != plan.anchors.end())) continue;
      const ClebschGordan& cg = basis.cg(i, j);
      const CMatrix prod = kron(f[i], f[j]);
      // 1x1 products have perfect condition, so singularity is judged against the block scale.
      if (smallest_singular_value(prod) <= 1e-10 * scale * scale) {
        if (singular_pair) *singular_pair = true;
        return std::nullopt;
      }
      const CMatrix x = cg.matrix * prod.adjoint().fullPivLu().solve(beta.at(pair)) * cg.matrix.adjoint();
      const double scale = std::max(x.norm(), 1e-300);
      std::vector<bool> in_block(static_cast<std::size_t>(x.size()), false);
      for (const auto& b : cg.blocks) {
        for (int r = 0; r < b.dim; ++r)
          for (int c = 0; c < b.dim; ++c)
            in_block[static_cast<std::size_t>((b.offset + c) * x.rows() + b.offset + r)] = true;
        const CMatrix block = x.block(b.offset, b.offset, b.dim, b.dim);
        if (!known[b.irrep]) {
          f[b.irrep] = block;
          known[b.irrep] = true;
        } else {
          const CMatrix diff = (block - f[b.irrep]) / scale;
          for (Eigen::Index e = 0; e < diff.size(); ++e) {
            res.push_back(diff(e).real());
            res.push_back(diff(e).imag());
          }
        }
      }
      for (Eigen::Index e = 0; e < x.size(); ++e)
        if (!in_block[static_cast<std::size_t>(e)]) {
          res.push_back(x(e).real() / scale);
          res.push_back(x(e).imag() / scale);
        }
    }

    const auto theta = igft(f, irreps);
    double norm = 0.0;
    for (const auto& v : theta) norm += std::norm(v);
    norm = std::max(std::sqrt(norm), 1e-300);
    for (const auto& v : theta) res.push_back(v.imag() / norm);
    if (out) *out = std::move(f);
    return res;
  }
};

double sq_norm(const std::vector<double>& r) {
  double s = 0.0;
  for (double v : r) s += v * v;
  return s;
}

double max_abs(const std::vector<double>& r) {
  double m = 0.0;
  for (double v : r) m = std::max(m, std::abs(v));
  return m;
}

// Levenberg-Marquardt with a central-difference Jacobian.
std::vector<double> solve_gauge(const GaugeProblem& problem, std::vector<double> p, double& final_residual) {
  auto eval = [&](const std::vector<double>& x) { return problem.evaluate(x, nullptr); };
  auto r = eval(p);
  if (!r) {
    final_residual = INFINITY;
    return p;
  }
  const int np = problem.n_params;
  double cost = sq_norm(*r);
  double lambda = 1e-3;
  const double h = 1e-7;
  for (int iter = 0; iter < 300 && np > 0; ++iter) {
    if (max_abs(*r) < 1e-14) break;
    const auto m = static_cast<Eigen::Index>(r->size());
    Eigen::MatrixXd jac(m, np);
    bool ok = true;
    for (int c = 0; c < np && ok; ++c) {
      auto plus = p, minus = p;
      plus[c] += h;
      minus[c] -= h;
      const auto rp = eval(plus), rm = eval(minus);
      if (!rp || !rm || rp->size() != r->size() || rm->size() != r->size()) {
        ok = false;
        break;
      }
      for (Eigen::Index e = 0; e < m; ++e) jac(e, c) = ((*rp)[e] - (*rm)[e]) / (2 * h);
    }
    if (!ok) break;
    const Eigen::Map<const Eigen::VectorXd> rv(r->data(), m);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * rv;
    bool improved = false;
    while (lambda < 1e12) {
      Eigen::MatrixXd a = jtj;
      a.diagonal().array() += lambda * (1.0 + jtj.diagonal().array());
      const Eigen::VectorXd step = a.ldlt().solve(-jtr);
      auto trial = p;
      for (int c = 0; c < np; ++c) trial[c] += step(c);
      const auto rt = eval(trial);
      if (rt && rt->size() == r->size() && sq_norm(*rt) < cost) {
        p = std::move(trial);
        r = rt;
        cost = sq_norm(*r);
        lambda = std::max(lambda / 3.0, 1e-15);
        improved = true;
        break;
      }
      lambda *= 4.0;
    }
    if (!improved) break;
  }
  final_residual = max_abs(*r);
  return p;
}

}  // namespace

RecoveryResult recover_signal(const Bispectrum& beta, const RecoveryPlan& plan, const SpectralBasis& basis,
                              const RecoveryOptions& options) {
  if (!plan.feasible) throw Error(ErrorKind::InfeasiblePlan, "plan leaves irreps unrecovered");
  for (const auto& pair : plan.pairs)
    if (!beta.count(pair))
      throw Error(ErrorKind::BlockShapeMismatch, "missing bispectral coefficient (" + std::to_string(pair.first) + "," +
                                                     std::to_string(pair.second) + ")");
  const IrrepTable& irreps = basis.irreps();

  double scale = 0.0;
  for (const auto& [key, m] : beta) scale = std::max(scale, m.norm());
  const Complex b00 = beta.at({0, 0})(0, 0);
  if (scale == 0.0 || std::abs(b00) <= 1e-12 * scale) throw Error(ErrorKind::ZeroDCComponent, "beta(0,0) vanishes");

  const Complex dc = std::polar(std::cbrt(std::abs(b00)), -std::arg(b00));
  GaugeProblem problem{beta, plan, basis, dc, std::cbrt(scale), {}, {}, {}, 0};
  for (int a : plan.anchors) {
    double ratio = 0.0;
    problem.roots.push_back(hermitian_sqrt(beta.at({a, 0}) / std::conj(problem.dc), ratio));
    if (ratio <= 1e-10 || smallest_singular_value(problem.roots.back()) <= 1e-8 * problem.scale)
      throw Error(ErrorKind::SingularAnchor, "F^dagger F singular for anchor " + irreps[a].name);
    problem.starts.push_back(CMatrix::Identity(irreps.dim(a), irreps.dim(a)));
    problem.offsets.push_back(problem.n_params);
    problem.n_params += irreps.dim(a) * irreps.dim(a);
  }

  bool singular = false;
  if (!problem.evaluate(std::vector<double>(static_cast<std::size_t>(problem.n_params), 0.0), nullptr, &singular) &&
      singular)
    throw Error(ErrorKind::SingularAnchor, "a propagated Fourier block product is singular");

  std::mt19937_64 rng(options.seed);
  double best = INFINITY;
  RecoveryResult result;
  for (int restart = 0; restart < std::max(1, options.max_restarts); ++restart) {
    if (restart > 0)
      for (std::size_t a = 0; a < plan.anchors.size(); ++a)
        problem.starts[a] = haar_unitary(irreps.dim(plan.anchors[a]), rng);
    double residual = INFINITY;
    const auto p = solve_gauge(problem, std::vector<double>(static_cast<std::size_t>(problem.n_params), 0.0), residual);
    if (residual < best) {
      FourierCoefficients f;
      if (!problem.evaluate(p, &f)) continue;
      best = residual;
      result.fourier = std::move(f);
      result.residual = residual;
      result.restarts = restart;
    }
    if (best <= options.tolerance) break;
  }
  if (!(best <= options.tolerance))
    throw Error(ErrorKind::GaugeResolutionFailure, "best gauge residual " + std::to_string(best) + " after " +
                                                       std::to_string(options.max_restarts) + " restarts");
  result.signal = igft_real(result.fourier, irreps);
  return result;
}

}  // namespace gtc
