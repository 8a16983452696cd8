#include "grouptc/group.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "grouptc/error.hpp"

namespace gtc {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

GroupSpec parse_atom(const std::string& raw) {
  const std::string s = lower(raw);
  if (s == "klein" || s == "v4" || s == "z2xz2") return GroupSpec::klein();
  if (s == "o" || s == "octahedral") return GroupSpec::octahedral();
  if (s == "oh" || s == "full_octahedral") return GroupSpec::full_octahedral();

  auto parse_n = [&](std::size_t prefix) {
    const std::string digits = s.substr(prefix);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit))
      throw Error(ErrorKind::ParseError, "cannot parse group '" + raw + "'");
    return std::stoi(digits);
  };
  if (s.rfind("cyclic", 0) == 0) return GroupSpec::cyclic(parse_n(6));
  if (s.rfind("dihedral", 0) == 0) return GroupSpec::dihedral(parse_n(8));
  if (!s.empty() && s[0] == 'c') return GroupSpec::cyclic(parse_n(1));
  if (!s.empty() && s[0] == 'd') return GroupSpec::dihedral(parse_n(1));
  throw Error(ErrorKind::ParseError, "cannot parse group '" + raw + "'");
}

// Conjugacy classes in order of their smallest element.
std::vector<std::vector<int>> conjugacy_classes_of(const FiniteGroup& g) {
  const int n = g.order();
  std::vector<int> assigned(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<int>> classes;
  for (int x = 0; x < n; ++x) {
    if (assigned[static_cast<std::size_t>(x)] >= 0) continue;
    std::vector<int> cls;
    for (int h = 0; h < n; ++h) {
      const int y = g.mul(g.mul(h, x), g.inv(h));
      if (assigned[static_cast<std::size_t>(y)] < 0) {
        assigned[static_cast<std::size_t>(y)] = static_cast<int>(classes.size());
        cls.push_back(y);
      }
    }
    std::sort(cls.begin(), cls.end());
    classes.push_back(std::move(cls));
  }
  return classes;
}

std::vector<std::vector<int>> cyclic_table(int n) {
  std::vector<std::vector<int>> t(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n)));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) t[a][b] = (a + b) % n;
  return t;
}

std::vector<std::vector<int>> dihedral_table(int n) {
  const int m = 2 * n;
  std::vector<std::vector<int>> t(static_cast<std::size_t>(m), std::vector<int>(static_cast<std::size_t>(m)));
  auto mod = [n](int v) { return ((v % n) + n) % n; };
  for (int x = 0; x < m; ++x) {
    for (int y = 0; y < m; ++y) {
      const bool xs = x >= n, ys = y >= n;
      const int a = x % n, b = y % n;
      if (!xs && !ys)
        t[x][y] = mod(a + b);  // r^a r^b
      else if (!xs && ys)
        t[x][y] = n + mod(b - a);  // r^a s r^b = s r^{b-a}
      else if (xs && !ys)
        t[x][y] = n + mod(a + b);  // s r^a r^b
      else
        t[x][y] = mod(b - a);  // s r^a s r^b = r^{b-a}
    }
  }
  return t;
}

using Mat3 = std::array<std::array<int, 3>, 3>;

Mat3 matmul(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      int s = 0;
      for (int k = 0; k < 3; ++k) s += a[i][k] * b[k][j];
      c[i][j] = s;
    }
  return c;
}

int det3(const Mat3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

std::string matrix_name(const Mat3& m) {
  // Images of the basis axes read row by row, e.g. "+x+y+z" for the identity.
  std::string out;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      if (m[r][c] != 0) {
        out += m[r][c] > 0 ? '+' : '-';
        out += static_cast<char>('x' + c);
      }
  return out;
}

std::vector<std::vector<int>> table_from_matrices(const std::vector<Mat3>& mats) {
  std::map<Mat3, int> index;
  for (std::size_t i = 0; i < mats.size(); ++i) index[mats[i]] = static_cast<int>(i);
  std::vector<std::vector<int>> t(mats.size(), std::vector<int>(mats.size()));
  for (std::size_t a = 0; a < mats.size(); ++a)
    for (std::size_t b = 0; b < mats.size(); ++b) t[a][b] = index.at(matmul(mats[a], mats[b]));
  return t;
}

}  // namespace

std::string GroupSpec::name() const {
  switch (family) {
    case GroupFamily::Cyclic: return "C" + std::to_string(n);
    case GroupFamily::Dihedral: return "D" + std::to_string(n);
    case GroupFamily::Klein: return "klein";
    case GroupFamily::Octahedral: return "O";
    case GroupFamily::FullOctahedral: return "Oh";
    case GroupFamily::DirectProduct: return factors.at(0).name() + "x" + factors.at(1).name();
  }
  return "?";
}

GroupSpec parse_group_spec(const std::string& text) {
  // Split on 'x' only between factors; "oh", "klein" etc. contain no 'x'.
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == 'x' || c == 'X') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  GroupSpec spec = parse_atom(parts[0]);
  for (std::size_t i = 1; i < parts.size(); ++i) spec = GroupSpec::direct_product(spec, parse_atom(parts[i]));
  return spec;
}

std::vector<std::vector<int>> FiniteGroup::table_rows() const {
  std::vector<std::vector<int>> rows(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) rows[i].assign(table_.begin() + i * n_, table_.begin() + (i + 1) * n_);
  return rows;
}

int FiniteGroup::find(const std::string& element_name) const {
  auto it = std::find(names_.begin(), names_.end(), element_name);
  return it == names_.end() ? -1 : static_cast<int>(it - names_.begin());
}

FiniteGroup validate_cayley_table(const std::vector<std::vector<int>>& table,
                                  std::optional<std::vector<std::string>> names, std::string name) {
  const int n = static_cast<int>(table.size());
  if (n == 0) throw Error(ErrorKind::NonSquareTable, "empty table");
  for (int i = 0; i < n; ++i)
    if (static_cast<int>(table[i].size()) != n)
      throw Error(ErrorKind::NonSquareTable, "row " + std::to_string(i) + " has " + std::to_string(table[i].size()) +
                                                 " entries, expected " + std::to_string(n));
  if (names && static_cast<int>(names->size()) != n)
    throw Error(ErrorKind::NonSquareTable, "element name count does not match table size");

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (table[i][j] < 0 || table[i][j] >= n)
        throw Error(ErrorKind::ClosureViolation, "entry (" + std::to_string(i) + "," + std::to_string(j) +
                                                     ") = " + std::to_string(table[i][j]) + " is out of range");

  int identity = -1;
  for (int e = 0; e < n && identity < 0; ++e) {
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) ok = table[e][i] == i && table[i][e] == i;
    if (ok) identity = e;
  }
  if (identity < 0) throw Error(ErrorKind::NoIdentity, "no two-sided identity element");

  std::vector<int> inverse(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      if (table[i][j] == identity && table[j][i] == identity) {
        inverse[i] = j;
        break;
      }
    if (inverse[i] < 0) throw Error(ErrorKind::NoInverse, "element " + std::to_string(i) + " has no inverse");
  }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (table[table[i][j]][k] != table[i][table[j][k]])
          throw Error(ErrorKind::AssociativityViolation, "(g" + std::to_string(i) + " g" + std::to_string(j) + ") g" +
                                                             std::to_string(k) + " != g" + std::to_string(i) + " (g" +
                                                             std::to_string(j) + " g" + std::to_string(k) + ")");

  FiniteGroup g;
  g.n_ = n;
  g.name_ = std::move(name);
  if (names) {
    g.names_ = std::move(*names);
  } else {
    for (int i = 0; i < n; ++i) g.names_.push_back(std::to_string(i));
  }
  g.table_.reserve(static_cast<std::size_t>(n * n));
  for (const auto& row : table) g.table_.insert(g.table_.end(), row.begin(), row.end());
  g.identity_ = identity;
  g.inverse_ = std::move(inverse);
  g.commutative_ = true;
  for (int i = 0; i < n && g.commutative_; ++i)
    for (int j = i + 1; j < n; ++j)
      if (table[i][j] != table[j][i]) {
        g.commutative_ = false;
        break;
      }
  g.classes_ = conjugacy_classes_of(g);
  return g;
}

const std::vector<Mat3>& octahedral_matrices() {
  static const std::vector<Mat3> mats = [] {
    std::vector<Mat3> out;
    std::array<int, 3> perm{0, 1, 2};
    do {
      for (int bits = 0; bits < 8; ++bits) {
        // bit 2 is the sign of row 0, so '+' sorts before '-' lexicographically.
        Mat3 m{};
        for (int r = 0; r < 3; ++r) m[r][perm[r]] = ((bits >> (2 - r)) & 1) ? -1 : 1;
        if (det3(m) == 1) out.push_back(m);
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
  }();
  return mats;
}

FiniteGroup make_group(const GroupSpec& spec) {
  std::vector<std::vector<int>> table;
  std::vector<std::string> names;
  switch (spec.family) {
    case GroupFamily::Cyclic: {
      if (spec.n < 1) throw Error(ErrorKind::InvalidOrder, "cyclic order must be >= 1");
      table = cyclic_table(spec.n);
      for (int k = 0; k < spec.n; ++k) names.push_back(std::to_string(k));
      break;
    }
    case GroupFamily::Dihedral: {
      if (spec.n < 1) throw Error(ErrorKind::InvalidOrder, "dihedral n must be >= 1");
      table = dihedral_table(spec.n);
      for (int a = 0; a < spec.n; ++a) names.push_back("r" + std::to_string(a));
      for (int b = 0; b < spec.n; ++b) names.push_back("s" + std::to_string(b));
      break;
    }
    case GroupFamily::Klein: {
      table.assign(4, std::vector<int>(4));
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) table[a][b] = a ^ b;
      names = {"00", "01", "10", "11"};
      break;
    }
    case GroupFamily::Octahedral: {
      table = table_from_matrices(octahedral_matrices());
      for (const auto& m : octahedral_matrices()) names.push_back(matrix_name(m));
      break;
    }
    case GroupFamily::FullOctahedral: {
      std::vector<Mat3> mats = octahedral_matrices();
      for (const auto& m : octahedral_matrices()) {
        Mat3 neg = m;
        for (auto& row : neg)
          for (int& v : row) v = -v;
        mats.push_back(neg);
      }
      table = table_from_matrices(mats);
      for (const auto& m : mats) names.push_back(matrix_name(m));
      break;
    }
    case GroupFamily::DirectProduct: {
      if (spec.factors.size() != 2) throw Error(ErrorKind::InvalidOrder, "direct product needs two factors");
      const FiniteGroup a = make_group(spec.factors[0]);
      const FiniteGroup b = make_group(spec.factors[1]);
      const int na = a.order(), nb = b.order();
      table.assign(static_cast<std::size_t>(na * nb), std::vector<int>(static_cast<std::size_t>(na * nb)));
      for (int x = 0; x < na * nb; ++x)
        for (int y = 0; y < na * nb; ++y) table[x][y] = a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb);
      for (int x = 0; x < na * nb; ++x)
        names.push_back("(" + a.element_names()[x / nb] + "," + b.element_names()[x % nb] + ")");
      break;
    }
  }
  FiniteGroup g = validate_cayley_table(table, std::move(names), spec.name());
  g.spec_ = spec;
  return g;
}

GroupPtr make_group_ptr(const GroupSpec& spec) { return std::make_shared<const FiniteGroup>(make_group(spec)); }

std::vector<int> full_octahedral_product_bijection() {
  std::vector<int> map(48);
  for (int k = 0; k < 48; ++k) map[k] = (k % 24) * 2 + k / 24;
  return map;
}

bool is_isomorphism(const FiniteGroup& a, const FiniteGroup& b, const std::vector<int>& map) {
  if (a.order() != b.order() || static_cast<int>(map.size()) != a.order()) return false;
  std::vector<char> hit(static_cast<std::size_t>(b.order()), 0);
  for (int v : map) {
    if (v < 0 || v >= b.order() || hit[v]) return false;
    hit[v] = 1;
  }
  for (int x = 0; x < a.order(); ++x)
    for (int y = 0; y < a.order(); ++y)
      if (map[a.mul(x, y)] != b.mul(map[x], map[y])) return false;
  return true;
}

nlohmann::json group_to_json(const FiniteGroup& g) {
  return nlohmann::json{
      {"format_version", 1}, {"name", g.name()}, {"elements", g.element_names()}, {"table", g.table_rows()}};
}

FiniteGroup group_from_json(const nlohmann::json& j) {
  try {
    auto table = j.at("table").get<std::vector<std::vector<int>>>();
    std::optional<std::vector<std::string>> names;
    if (j.contains("elements")) names = j.at("elements").get<std::vector<std::string>>();
    std::string name = j.value("name", std::string("G"));
    FiniteGroup g = validate_cayley_table(table, std::move(names), name);
    // Reattach the built-in spec when the table is exactly a built-in one.
    try {
      GroupSpec spec = parse_group_spec(name);
      FiniteGroup builtin = make_group(spec);
      if (builtin.table() == g.table()) return builtin;
    } catch (const Error&) {
    }
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("bad group file: ") + e.what());
  }
}

}  // namespace gtc
