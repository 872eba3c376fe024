#pragma once

#include "omegares/exactla.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace omegares {

using Elem = std::uint32_t;
// image of point i is perm[i]; points are 0-based
using Permutation = std::vector<std::uint32_t>;

struct GroupOptions {
  std::size_t order_cap = 1024;
};

class OrderCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Finite group stored by its multiplication table.
class FinGroup {
 public:
  FinGroup();  // trivial group
  // table[a][b] = a*b; validated on construction
  explicit FinGroup(std::vector<std::vector<Elem>> table);

  std::size_t order() const { return n_; }
  Elem identity() const { return e_; }
  Elem mul(Elem a, Elem b) const { return table_[a * n_ + b]; }
  Elem inv(Elem a) const { return inverse_[a]; }
  Elem pow(Elem a, long long k) const;
  Elem commutator(Elem a, Elem b) const;  // a^-1 b^-1 a b
  Elem conj(Elem g, Elem x) const { return mul(mul(g, x), inv(g)); }
  std::size_t element_order(Elem a) const;
  bool is_abelian() const;
  std::vector<std::vector<Elem>> table() const;

 private:
  std::size_t n_;
  Elem e_;
  std::vector<Elem> table_;
  std::vector<Elem> inverse_;
};

FinGroup from_permutations(const std::vector<Permutation>& generators, GroupOptions opts = {});
// also returns the permutation realizing each element
FinGroup from_permutations(const std::vector<Permutation>& generators, std::vector<Permutation>& elements,
                           GroupOptions opts = {});

FinGroup cyclic_group(std::size_t n);
FinGroup symmetric_group(std::size_t n);
FinGroup alternating_group(std::size_t n);
FinGroup dihedral_group(std::size_t n);  // order 2n
FinGroup quaternion_group();
FinGroup direct_product(const FinGroup& a, const FinGroup& b);

// Sorted element list closed under products and inverses.
class SubgroupHandle {
 public:
  SubgroupHandle() = default;
  SubgroupHandle(const FinGroup& g, std::vector<Elem> elements);  // verifies closure

  const std::vector<Elem>& elements() const { return elems_; }
  std::size_t order() const { return elems_.size(); }
  bool contains(Elem x) const;
  friend bool operator==(const SubgroupHandle& a, const SubgroupHandle& b) { return a.elems_ == b.elems_; }

 private:
  std::vector<Elem> elems_;
};

SubgroupHandle whole_group(const FinGroup& g);
SubgroupHandle trivial_subgroup(const FinGroup& g);
SubgroupHandle generated_subgroup(const FinGroup& g, const std::vector<Elem>& gens);
SubgroupHandle normal_closure(const FinGroup& g, const std::vector<Elem>& gens);
bool is_normal(const FinGroup& g, const SubgroupHandle& n);
SubgroupHandle commutator_subgroup(const FinGroup& g, const SubgroupHandle& h);
std::vector<SubgroupHandle> normal_subgroups(const FinGroup& g);
// subgroup as a group in its own right; position i corresponds to h.elements()[i]
FinGroup as_group(const FinGroup& g, const SubgroupHandle& h);

// Invariant factors of G^ab; 0 stands for an infinite cyclic factor.
std::vector<BigInt> abelianization(const FinGroup& g);
std::vector<BigInt> abelianization(const FinGroup& g, const SubgroupHandle& h);
bool is_R_perfect(const FinGroup& g, std::uint32_t p);
bool is_R_perfect(const FinGroup& g, const SubgroupHandle& h, std::uint32_t p);
bool invariant_factors_p_perfect(const std::vector<BigInt>& factors, std::uint32_t p);

// O^p(G), with the defining checks run on the result.
SubgroupHandle p_residual(const FinGroup& g, std::uint32_t p);

struct Quotient {
  FinGroup group;
  std::vector<Elem> projection;  // element of G -> coset index
};

Quotient quotient(const FinGroup& g, const SubgroupHandle& n);

bool is_homomorphism(const FinGroup& from, const FinGroup& to, const std::vector<Elem>& map);
SubgroupHandle kernel(const FinGroup& from, const FinGroup& to, const std::vector<Elem>& map);
bool is_p_power(std::size_t n, std::uint32_t p);

}  // namespace omegares
