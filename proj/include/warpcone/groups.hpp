#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace warpcone {

enum class GroupKind {
  FreeAbelian,           // Z^m
  InfiniteDihedral,      // Z/2 * Z/2
  FiniteCyclic,          // Z/q
  FiniteAbelianProduct,  // Z/l_1 x ... x Z/l_k
  AbelianProduct,        // Z^a x Z/l_1 x ... (mixed; order 0 marks a Z factor)
};

// Marked generating sets of the infinite dihedral group.
enum class DihedralMarking {
  Reflections,         // {r, r'}
  RotationReflection,  // {eps, eps^-1, r} with eps = r'r
};

// Group element in normal form.
//  abelian kinds: one coordinate per factor, reduced into [0, l) for finite factors;
//  dihedral: {k, s} standing for (r'r)^k r^s with s in {0, 1}.
struct Word {
  std::vector<std::int64_t> nf;

  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word&, const Word&) = default;
};

struct Generator {
  std::string label;
  Word element;
  std::size_t inverse;  // index of the inverse generator in the marked set
};

class GroupSpec {
 public:
  static GroupSpec free_abelian(std::size_t rank);
  static GroupSpec infinite_dihedral(DihedralMarking marking = DihedralMarking::Reflections);
  static GroupSpec finite_cyclic(std::int64_t order);
  static GroupSpec finite_abelian_product(std::vector<std::int64_t> orders);
  // Mixed product; 0 in `orders` is an infinite cyclic factor.
  static GroupSpec abelian_product(std::vector<std::int64_t> orders);

  GroupKind kind() const noexcept { return kind_; }
  bool is_abelian() const noexcept { return kind_ != GroupKind::InfiniteDihedral; }
  bool is_finite() const noexcept;
  DihedralMarking marking() const noexcept { return marking_; }
  // Abelian factor orders (0 = Z). Empty for the dihedral group.
  const std::vector<std::int64_t>& orders() const noexcept { return orders_; }
  const std::vector<Generator>& generators() const noexcept { return gens_; }
  std::size_t generator_index(const std::string& label) const;

  Word identity() const;
  std::size_t coordinates() const noexcept;

  std::string describe() const;

  friend bool operator==(const GroupSpec& a, const GroupSpec& b) {
    return a.kind_ == b.kind_ && a.orders_ == b.orders_ &&
           (a.kind_ != GroupKind::InfiniteDihedral || a.marking_ == b.marking_);
  }

 private:
  GroupSpec() = default;
  void build_generators();

  GroupKind kind_ = GroupKind::FreeAbelian;
  DihedralMarking marking_ = DihedralMarking::Reflections;
  std::vector<std::int64_t> orders_;
  std::vector<Generator> gens_;
};

inline constexpr std::size_t kDefaultBallCap = 1'000'000;

// Throws ValidationError when `g` is not a normal form of `G`.
void validate(const Word& g, const GroupSpec& G);

// Reduces arbitrary coordinates into normal form.
Word normalize(Word g, const GroupSpec& G);

std::uint64_t word_length(const Word& g, const GroupSpec& G);
Word multiply(const Word& g, const Word& h, const GroupSpec& G);
Word inverse(const Word& g, const GroupSpec& G);

// All elements of word length <= R, lexicographic in normal form.
std::vector<Word> ball(const GroupSpec& G, std::uint64_t R, std::size_t cap = kDefaultBallCap);

// Same set ordered by (word length, normal form); used by pruned minimizations.
std::vector<Word> ball_by_length(const GroupSpec& G, std::uint64_t R,
                                 std::size_t cap = kDefaultBallCap);

std::string to_string(const Word& g, const GroupSpec& G);
Word word_from_json(const nlohmann::json& j, const GroupSpec& G);
nlohmann::json to_json(const Word& g);

nlohmann::json to_json(const GroupSpec& G);
GroupSpec group_from_json(const nlohmann::json& j);

}  // namespace warpcone
