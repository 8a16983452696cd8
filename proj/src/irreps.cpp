#include <cmath>
#include <numbers>

#include "grouptc/error.hpp"
#include "grouptc/spectral.hpp"

namespace gtc {

std::vector<Complex> Irrep::character() const {
  std::vector<Complex> chi;
  chi.reserve(matrices.size());
  for (const auto& m : matrices) chi.push_back(m.trace());
  return chi;
}

IrrepTable::IrrepTable(GroupPtr group, std::vector<Irrep> irreps, double tol)
    : group_(std::move(group)), irreps_(std::move(irreps)) {
  const FiniteGroup& g = *group_;
  const int n = g.order();
  if (irreps_.empty()) throw Error(ErrorKind::MissingTrivialRep, "no irreps given");

  for (const auto& rep : irreps_) {
    if (rep.dim < 1 || static_cast<int>(rep.matrices.size()) != n)
      throw Error(ErrorKind::BlockShapeMismatch, rep.name + ": need one matrix per element");
    for (const auto& m : rep.matrices)
      if (m.rows() != rep.dim || m.cols() != rep.dim)
        throw Error(ErrorKind::BlockShapeMismatch, rep.name + ": matrix shape differs from declared dim");
  }

  for (const auto& rep : irreps_) {
    const CMatrix id = CMatrix::Identity(rep.dim, rep.dim);
    if ((rep.matrices[g.identity()] - id).cwiseAbs().maxCoeff() > tol)
      throw Error(ErrorKind::HomomorphismViolation, rep.name + ": rho(e) is not the identity");
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const double err = (rep.matrices[g.mul(a, b)] - rep.matrices[a] * rep.matrices[b]).cwiseAbs().maxCoeff();
        if (err > tol)
          throw Error(ErrorKind::HomomorphismViolation, rep.name + ": rho(g" + std::to_string(a) + " g" +
                                                            std::to_string(b) + ") off by " + std::to_string(err));
      }
    for (int a = 0; a < n; ++a) {
      const double err = (rep.matrices[a] * rep.matrices[a].adjoint() - id).cwiseAbs().maxCoeff();
      if (err > tol) throw Error(ErrorKind::NotUnitary, rep.name + ": rho(g" + std::to_string(a) + ") not unitary");
    }
  }

  int dim_sq = 0;
  for (const auto& rep : irreps_) dim_sq += rep.dim * rep.dim;
  if (dim_sq != n)
    throw Error(ErrorKind::DimensionSumMismatch,
                "sum of squared dimensions is " + std::to_string(dim_sq) + ", |G| = " + std::to_string(n));

  const Irrep& first = irreps_.front();
  bool trivial = first.dim == 1;
  for (int a = 0; a < n && trivial; ++a) trivial = std::abs(first.matrices[a](0, 0) - Complex(1.0)) <= tol;
  if (!trivial) throw Error(ErrorKind::MissingTrivialRep, "first irrep must be the trivial representation");

  for (int i = 0; i < size(); ++i)
    for (int j = 0; j < size(); ++j) {
      const Complex ip = character_inner(i, j);
      const double expect = i == j ? 1.0 : 0.0;
      if (std::abs(ip - expect) > tol)
        throw Error(ErrorKind::NotIrreducible,
                    "<chi_" + irreps_[i].name + ", chi_" + irreps_[j].name + "> = " + std::to_string(ip.real()));
    }

  if (size() != static_cast<int>(g.conjugacy_classes().size()))
    throw Error(ErrorKind::DimensionSumMismatch, "irrep count differs from conjugacy class count");
}

Complex IrrepTable::character_inner(int i, int j) const {
  const auto& a = irreps_[static_cast<std::size_t>(i)].matrices;
  const auto& b = irreps_[static_cast<std::size_t>(j)].matrices;
  Complex acc = 0.0;
  for (std::size_t h = 0; h < a.size(); ++h) acc += a[h].trace() * std::conj(b[h].trace());
  return acc / static_cast<double>(a.size());
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

CMatrix scalar(Complex v) {
  CMatrix m(1, 1);
  m(0, 0) = v;
  return m;
}

Irrep one_dim(std::string name, const std::vector<double>& values) {
  Irrep rep{std::move(name), 1, {}};
  for (double v : values) rep.matrices.push_back(scalar(v));
  return rep;
}

CMatrix rotation(double angle) {
  CMatrix m(2, 2);
  m << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return m;
}

std::vector<Irrep> cyclic_irreps(int n) {
  std::vector<Irrep> out;
  for (int k = 0; k < n; ++k) {
    Irrep rep{"rho" + std::to_string(k), 1, {}};
    for (int x = 0; x < n; ++x) rep.matrices.push_back(scalar(std::polar(1.0, -kTwoPi * k * x / n)));
    out.push_back(std::move(rep));
  }
  return out;
}

std::vector<Irrep> dihedral_irreps(int n) {
  std::vector<double> a1, a2, b1, b2;
  for (int g = 0; g < 2 * n; ++g) {
    const bool refl = g >= n;
    const double parity = (g % n) % 2 == 0 ? 1.0 : -1.0;
    a1.push_back(1.0);
    a2.push_back(refl ? -1.0 : 1.0);
    b1.push_back(parity);
    b2.push_back(refl ? -parity : parity);
  }
  std::vector<Irrep> out{one_dim("A1", a1), one_dim("A2", a2)};
  if (n % 2 == 0) {
    out.push_back(one_dim("B1", b1));
    out.push_back(one_dim("B2", b2));
  }
  CMatrix s(2, 2);
  s << 1, 0, 0, -1;
  for (int k = 1; 2 * k < n; ++k) {
    Irrep rep{n <= 4 ? "E" : "E" + std::to_string(k), 2, {}};
    for (int a = 0; a < n; ++a) rep.matrices.push_back(rotation(kTwoPi * k * a / n));
    for (int b = 0; b < n; ++b) rep.matrices.push_back(s * rotation(kTwoPi * k * b / n));
    out.push_back(std::move(rep));
  }
  return out;
}

std::vector<Irrep> klein_irreps() {
  std::vector<Irrep> out;
  const char* names[] = {"00", "01", "10", "11"};
  for (int c = 0; c < 4; ++c) {
    std::vector<double> v;
    for (int x = 0; x < 4; ++x) v.push_back(__builtin_popcount(static_cast<unsigned>(c & x)) % 2 ? -1.0 : 1.0);
    out.push_back(one_dim(names[c], v));
  }
  return out;
}

std::vector<Irrep> octahedral_irreps() {
  const auto& mats = octahedral_matrices();
  // Standard irrep of S3 on the plane orthogonal to (1,1,1).
  Eigen::MatrixXd basis(3, 2);
  basis << 1 / std::sqrt(2.0), 1 / std::sqrt(6.0), -1 / std::sqrt(2.0), 1 / std::sqrt(6.0), 0, -2 / std::sqrt(6.0);

  Irrep a1{"A1", 1, {}}, a2{"A2", 1, {}}, e{"E", 2, {}}, t1{"T1", 3, {}}, t2{"T2", 3, {}};
  for (const auto& m : mats) {
    Eigen::MatrixXd signed_perm(3, 3), perm(3, 3);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) {
        signed_perm(r, c) = m[r][c];
        perm(r, c) = std::abs(m[r][c]);
      }
    const double sgn = perm.determinant();  // sign of the axis permutation
    a1.matrices.push_back(scalar(1.0));
    a2.matrices.push_back(scalar(sgn));
    e.matrices.push_back((basis.transpose() * perm * basis).cast<Complex>());
    t1.matrices.push_back(signed_perm.cast<Complex>());
    t2.matrices.push_back((sgn * signed_perm).cast<Complex>());
  }
  return {a1, a2, e, t1, t2};
}

std::vector<Irrep> full_octahedral_irreps() {
  const auto base = octahedral_irreps();
  std::vector<Irrep> out;
  for (int parity = 0; parity < 2; ++parity)
    for (const auto& rep : base) {
      Irrep r{rep.name + (parity ? "u" : "g"), rep.dim, rep.matrices};
      for (const auto& m : rep.matrices) r.matrices.push_back(parity ? CMatrix(-m) : m);
      out.push_back(std::move(r));
    }
  return out;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

std::vector<Irrep> irreps_for(const GroupSpec& spec);

std::vector<Irrep> product_irreps(const GroupSpec& a, const GroupSpec& b) {
  const auto ia = irreps_for(a);
  const auto ib = irreps_for(b);
  const int nb = static_cast<int>(ib.front().matrices.size());
  const int na = static_cast<int>(ia.front().matrices.size());
  std::vector<Irrep> out;
  for (const auto& ra : ia)
    for (const auto& rb : ib) {
      Irrep r{ra.name + "*" + rb.name, ra.dim * rb.dim, {}};
      for (int x = 0; x < na * nb; ++x) r.matrices.push_back(kron(ra.matrices[x / nb], rb.matrices[x % nb]));
      out.push_back(std::move(r));
    }
  return out;
}

std::vector<Irrep> irreps_for(const GroupSpec& spec) {
  switch (spec.family) {
    case GroupFamily::Cyclic: return cyclic_irreps(spec.n);
    case GroupFamily::Dihedral: return dihedral_irreps(spec.n);
    case GroupFamily::Klein: return klein_irreps();
    case GroupFamily::Octahedral: return octahedral_irreps();
    case GroupFamily::FullOctahedral: return full_octahedral_irreps();
    case GroupFamily::DirectProduct: return product_irreps(spec.factors.at(0), spec.factors.at(1));
  }
  return {};
}

}  // namespace

IrrepTable builtin_irreps(GroupPtr group) {
  if (!group->spec())
    throw Error(ErrorKind::UnsupportedGroup, group->name() + " has no bundled irreps (not a built-in group)");
  auto reps = irreps_for(*group->spec());
  return IrrepTable(std::move(group), std::move(reps));
}

nlohmann::json irreps_to_json(const IrrepTable& table) {
  nlohmann::json reps = nlohmann::json::array();
  for (const auto& rep : table.irreps()) {
    nlohmann::json mats = nlohmann::json::array();
    for (const auto& m : rep.matrices) {
      nlohmann::json rows = nlohmann::json::array();
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(row);
      }
      mats.push_back(rows);
    }
    reps.push_back({{"name", rep.name}, {"dim", rep.dim}, {"matrices", mats}});
  }
  return {{"format_version", 1}, {"group", table.group().name()}, {"irreps", reps}};
}

IrrepTable irreps_from_json(GroupPtr group, const nlohmann::json& j) {
  std::vector<Irrep> reps;
  try {
    for (const auto& jr : j.at("irreps")) {
      Irrep rep{jr.at("name").get<std::string>(), jr.at("dim").get<int>(), {}};
      for (const auto& jm : jr.at("matrices")) {
        const auto rows = static_cast<Eigen::Index>(jm.size());
        const auto cols = rows == 0 ? 0 : static_cast<Eigen::Index>(jm.at(0).size());
        CMatrix m(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
          if (static_cast<Eigen::Index>(jm.at(r).size()) != cols)
            throw Error(ErrorKind::BlockShapeMismatch, rep.name + ": ragged matrix");
          for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = Complex(jm.at(r).at(c).at(0).get<double>(), jm.at(r).at(c).at(1).get<double>());
        }
        rep.matrices.push_back(std::move(m));
      }
      reps.push_back(std::move(rep));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("bad irrep file: ") + e.what());
  }
  return IrrepTable(std::move(group), std::move(reps));
}

}  // namespace gtc
