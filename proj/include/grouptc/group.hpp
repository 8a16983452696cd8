#pragma once

#include <array>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

namespace gtc {

/// Built-in group families. Element indexing per family:
///   Cyclic n      : k is rotation by k (k = 0..n-1), product is addition mod n.
///   Dihedral n    : 0..n-1 are rotations r^a, n..2n-1 are reflections s r^b,
///                   with r s = s r^{-1}.
///   Klein         : "00","01","10","11", product is bitwise xor.
///   Octahedral    : the 24 determinant-one signed permutation matrices of the
///                   cube, ordered by (axis permutation, sign pattern), both
///                   lexicographic with '+' before '-'.
///   FullOctahedral: the 24 rotations followed by the same 24 composed with
///                   the central inversion.
///   DirectProduct : (a, b) has index a * |B| + b.
enum class GroupFamily { Cyclic, Dihedral, Klein, Octahedral, FullOctahedral, DirectProduct };

struct GroupSpec {
  GroupFamily family = GroupFamily::Cyclic;
  int n = 1;
  std::vector<GroupSpec> factors;  // exactly two for DirectProduct

  static GroupSpec cyclic(int n) { return {GroupFamily::Cyclic, n, {}}; }
  static GroupSpec dihedral(int n) { return {GroupFamily::Dihedral, n, {}}; }
  static GroupSpec klein() { return {GroupFamily::Klein, 0, {}}; }
  static GroupSpec octahedral() { return {GroupFamily::Octahedral, 0, {}}; }
  static GroupSpec full_octahedral() { return {GroupFamily::FullOctahedral, 0, {}}; }
  static GroupSpec direct_product(GroupSpec a, GroupSpec b) {
    return {GroupFamily::DirectProduct, 0, {std::move(a), std::move(b)}};
  }

  /// Short name: "C4", "D16", "klein", "O", "Oh", "OxC2".
  std::string name() const;
  bool operator==(const GroupSpec&) const = default;
};

/// Parses "c4", "C8", "d4", "klein", "v4", "o", "octahedral", "oh",
/// "full_octahedral", and products joined by 'x' (left associative).
GroupSpec parse_group_spec(const std::string& text);

/// A finite group given by its Cayley table. Immutable once built; obtain one
/// through validate_cayley_table or make_group.
class FiniteGroup {
 public:
  int order() const { return n_; }
  int identity() const { return identity_; }
  int mul(int a, int b) const { return table_[static_cast<std::size_t>(a * n_ + b)]; }
  int inv(int a) const { return inverse_[static_cast<std::size_t>(a)]; }
  bool commutative() const { return commutative_; }

  const std::string& name() const { return name_; }
  const std::vector<std::string>& element_names() const { return names_; }
  const std::vector<int>& inverses() const { return inverse_; }
  const std::vector<std::vector<int>>& conjugacy_classes() const { return classes_; }
  /// Row-major |G| x |G| table.
  const std::vector<int>& table() const { return table_; }
  std::vector<std::vector<int>> table_rows() const;

  /// Set when the group came from make_group; irreps and grid actions key off it.
  const std::optional<GroupSpec>& spec() const { return spec_; }

  /// Element index by name; -1 if absent.
  int find(const std::string& element_name) const;

 private:
  friend FiniteGroup validate_cayley_table(const std::vector<std::vector<int>>&,
                                           std::optional<std::vector<std::string>>, std::string);
  friend FiniteGroup make_group(const GroupSpec&);

  int n_ = 0;
  std::string name_;
  std::vector<std::string> names_;
  std::vector<int> table_;
  int identity_ = 0;
  std::vector<int> inverse_;
  bool commutative_ = true;
  std::vector<std::vector<int>> classes_;
  std::optional<GroupSpec> spec_;
};

using GroupPtr = std::shared_ptr<const FiniteGroup>;

/// Checks closure, identity, inverses and associativity (in that order) and
/// derives the remaining structure. Throws gtc::Error on the first violated axiom.
FiniteGroup validate_cayley_table(const std::vector<std::vector<int>>& table,
                                  std::optional<std::vector<std::string>> names = std::nullopt, std::string name = "G");

FiniteGroup make_group(const GroupSpec& spec);
GroupPtr make_group_ptr(const GroupSpec& spec);

/// The 24 rotation matrices of the cube, in octahedral element order.
/// Entry [g][r][c] of the signed permutation matrix.
const std::vector<std::array<std::array<int, 3>, 3>>& octahedral_matrices();

/// Stored bijection full_octahedral -> direct_product(octahedral, cyclic 2):
/// element k maps to the product index of (k mod 24, k / 24).
std::vector<int> full_octahedral_product_bijection();

/// Tests whether `map` carries the Cayley table of `a` onto that of `b`.
bool is_isomorphism(const FiniteGroup& a, const FiniteGroup& b, const std::vector<int>& map);

nlohmann::json group_to_json(const FiniteGroup& g);
FiniteGroup group_from_json(const nlohmann::json& j);

}  // namespace gtc
