#pragma once

#include "omegares/exactla.hpp"
#include "omegares/groups.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace omegares {

using Obj = std::uint32_t;
using Mor = std::uint32_t;

struct MorphismRecord {
  std::string name;
  Obj src = 0;
  Obj tgt = 0;
};

class CategoryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Finite category with an explicit composition table.
class FinCategory {
 public:
  FinCategory(std::vector<std::string> objects, std::vector<MorphismRecord> morphisms,
              std::vector<Mor> identities, const std::vector<std::array<Mor, 3>>& compositions);

  std::size_t num_objects() const { return objects_.size(); }
  std::size_t num_morphisms() const { return morphisms_.size(); }
  const std::string& object_name(Obj c) const { return objects_[c]; }
  const MorphismRecord& morphism(Mor f) const { return morphisms_[f]; }
  Obj src(Mor f) const { return morphisms_[f].src; }
  Obj tgt(Mor f) const { return morphisms_[f].tgt; }
  Mor identity(Obj c) const { return identities_[c]; }
  bool is_identity(Mor f) const { return identities_[src(f)] == f; }
  // g o f, requires tgt(f) == src(g)
  Mor compose(Mor g, Mor f) const;
  const std::vector<Mor>& hom(Obj c, Obj d) const { return hom_[c * objects_.size() + d]; }
  // position of f within hom(src f, tgt f)
  std::size_t hom_index(Mor f) const { return hom_index_[f]; }
  bool connected() const { return connected_; }
  std::optional<Obj> find_object(const std::string& name) const;
  std::optional<Mor> find_morphism(const std::string& name) const;
  bool is_automorphism(Mor f) const;

  friend bool operator==(const FinCategory& a, const FinCategory& b) {
    return a.num_objects() == b.num_objects() && a.src_tgt_ == b.src_tgt_ && a.table_ == b.table_ &&
           a.identities_ == b.identities_;
  }

 private:
  std::vector<std::string> objects_;
  std::vector<MorphismRecord> morphisms_;
  std::vector<Mor> identities_;
  std::vector<std::pair<Obj, Obj>> src_tgt_;
  std::vector<std::int64_t> table_;  // g * M + f -> g o f or -1
  std::vector<std::vector<Mor>> hom_;
  std::vector<std::size_t> hom_index_;
  bool connected_ = false;
};

using CategoryPtr = std::shared_ptr<const FinCategory>;

CategoryPtr make_category(FinCategory c);
CategoryPtr category_of_group(const FinGroup& g);
// objects 0..n-1 with a unique morphism i -> j for i <= j
CategoryPtr poset_chain(std::size_t n);

// Functor between finite categories, checked on construction.
class CatFunctor {
 public:
  CatFunctor(CategoryPtr source, CategoryPtr target, std::vector<Obj> object_map, std::vector<Mor> morphism_map);

  const CategoryPtr& source() const { return source_; }
  const CategoryPtr& target() const { return target_; }
  Obj on_object(Obj c) const { return object_map_[c]; }
  Mor on_morphism(Mor f) const { return morphism_map_[f]; }
  const std::vector<Obj>& object_map() const { return object_map_; }
  const std::vector<Mor>& morphism_map() const { return morphism_map_; }

 private:
  CategoryPtr source_;
  CategoryPtr target_;
  std::vector<Obj> object_map_;
  std::vector<Mor> morphism_map_;
};

CatFunctor functor_of_homomorphism(CategoryPtr source, CategoryPtr target, const std::vector<Elem>& map);

class ModuleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Covariant functor C -> F_p-mod: a dimension per object, a matrix per morphism.
class CatModule {
 public:
  CatModule() = default;
  CatModule(CategoryPtr cat, std::uint32_t p, std::vector<std::size_t> dims, std::vector<Matrix> action,
            bool verify = true);

  static CatModule zero(CategoryPtr cat, std::uint32_t p);
  static CatModule constant(CategoryPtr cat, std::uint32_t p, std::size_t dim = 1);

  const CategoryPtr& category() const { return cat_; }
  std::uint32_t prime() const { return p_; }
  std::size_t dim(Obj c) const { return dims_[c]; }
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t total_dim() const;
  const Matrix& action(Mor f) const { return action_[f]; }
  const std::vector<Matrix>& actions() const { return action_; }
  bool is_zero() const { return total_dim() == 0; }
  // identities act trivially and composites are products
  bool is_functorial() const;

 private:
  CategoryPtr cat_;
  std::uint32_t p_ = 2;
  std::vector<std::size_t> dims_;
  std::vector<Matrix> action_;
};

using ModulePtr = std::shared_ptr<const CatModule>;
ModulePtr share(CatModule m);

bool same_category(const CategoryPtr& a, const CategoryPtr& b);

// Natural transformation: one matrix per object.
class ModuleMap {
 public:
  ModuleMap() = default;
  ModuleMap(ModulePtr source, ModulePtr target, std::vector<Matrix> components, bool verify = true);

  static ModuleMap identity(ModulePtr m);
  static ModuleMap zero(ModulePtr source, ModulePtr target);

  const ModulePtr& source() const { return source_; }
  const ModulePtr& target() const { return target_; }
  const Matrix& at(Obj c) const { return comp_[c]; }
  const std::vector<Matrix>& components() const { return comp_; }
  bool is_natural() const;
  bool is_zero() const;
  bool is_iso() const;
  bool is_injective() const;
  bool is_surjective() const;

  ModuleMap operator+(const ModuleMap& o) const;
  ModuleMap operator-(const ModuleMap& o) const;
  ModuleMap scaled(Residue c) const;

 private:
  ModulePtr source_;
  ModulePtr target_;
  std::vector<Matrix> comp_;
};

// g o f
ModuleMap compose(const ModuleMap& g, const ModuleMap& f);
bool operator==(const ModuleMap& a, const ModuleMap& b);

// Free modules. F_c(d) has basis hom(c, d); morphisms act by post-composition.
CatModule free_module(CategoryPtr cat, Obj c, std::uint32_t p);

// Direct sum of free modules F_{c_1} + ... + F_{c_k}.
struct FreeModule {
  ModulePtr module;
  std::vector<Obj> generators;
  // offset of generator i's block inside module(d)
  std::vector<std::vector<std::size_t>> offsets;

  std::size_t rank() const { return generators.size(); }
  // coordinate of the basis element (i, f) with f in hom(c_i, d)
  std::size_t basis_index(std::size_t i, Mor f) const;
};

FreeModule free_sum(CategoryPtr cat, std::vector<Obj> generators, std::uint32_t p);
// Yoneda: the map sending generator i to elements[i] in target(c_i)
ModuleMap map_from_free(const FreeModule& f, ModulePtr target, const std::vector<Vec>& elements);
// value at object c_i of the generator i under a map out of a free module
Vec generator_image(const FreeModule& f, const ModuleMap& m, std::size_t i);

// Module calculus.
struct SubmoduleResult {
  ModulePtr module;
  ModuleMap inclusion;
};
struct QuotientResult {
  ModulePtr module;
  ModuleMap projection;
};
struct ImageResult {
  ModulePtr module;
  ModuleMap inclusion;    // Im -> target
  ModuleMap corestriction;  // source -> Im
};

using ObjectSubspaces = std::vector<Subspace>;

SubmoduleResult kernel(const ModuleMap& f);
ImageResult image(const ModuleMap& f);
QuotientResult cokernel(const ModuleMap& f);
// smallest submodule containing the given vectors at each object
ObjectSubspaces submodule_generated(const CatModule& m, const std::vector<std::vector<Vec>>& vectors);
bool is_submodule(const CatModule& m, const ObjectSubspaces& s);
SubmoduleResult submodule(ModulePtr m, const ObjectSubspaces& s);
QuotientResult quotient_module(ModulePtr m, const ObjectSubspaces& s);
struct DirectSum {
  ModulePtr module;
  std::vector<ModuleMap> inclusions;
  std::vector<ModuleMap> projections;
};
DirectSum direct_sum(const std::vector<ModulePtr>& parts);
// preimage under f of a submodule of the target
ObjectSubspaces preimage(const ModuleMap& f, const ObjectSubspaces& s);
ObjectSubspaces image_subspaces(const ModuleMap& f);
// basis of the k-space of natural transformations M -> N
std::vector<ModuleMap> hom_basis(ModulePtr m, ModulePtr n);
// an isomorphism M -> N from the hom space: basis elements first, then seeded random combinations
std::optional<ModuleMap> find_isomorphism(ModulePtr m, ModulePtr n, std::uint64_t seed = 0, int attempts = 64);
// objectwise tensor product over k; basis (i, j) of M(c) (x) N(c) sits at i * dim N(c) + j
CatModule tensor(const CatModule& m, const CatModule& n);

// Greedy choice of generators: echelon basis vectors not already generated.
std::vector<std::pair<Obj, Vec>> choose_generators(const CatModule& m, const ObjectSubspaces& within);
struct FreeCover {
  FreeModule free;
  ModuleMap cover;  // free -> m, surjective
};
FreeCover free_cover(ModulePtr m);
// cover of a submodule of m; the map lands in m
FreeCover free_cover_of(ModulePtr m, const ObjectSubspaces& within);

bool is_projective(ModulePtr m);
// natural s with epi o s = id; seed 0 gives the echelon particular solution, other seeds add a random nonzero
// element of the solution space
std::optional<ModuleMap> right_inverse(const ModuleMap& epi, std::uint64_t seed = 0);
// witness check: the given map from a free module is an isomorphism onto m
bool is_free_on(const FreeModule& f, const ModuleMap& to_m);

// Monodromy of a locally constant module around pi_1 generators based at c0.
class NotLocallyConstant : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};
bool is_locally_constant(const CatModule& m);
std::vector<Matrix> monodromy(const CatModule& m, Obj c0);
bool is_essentially_constant(const CatModule& m);
// pullback of m along a functor into its category
CatModule restrict_along(const CatFunctor& f, const CatModule& m);

// Chain complexes of modules over a finite window of degrees.
struct ChainComplex {
  std::vector<ModulePtr> terms;       // P_0 .. P_N
  std::vector<ModuleMap> boundaries;  // boundaries[n-1] = d_n : P_n -> P_{n-1}
  std::optional<ModuleMap> augmentation;

  std::size_t length() const { return terms.empty() ? 0 : terms.size() - 1; }
  const ModuleMap& d(std::size_t n) const { return boundaries.at(n - 1); }
  bool squares_to_zero() const;
  ChainComplex truncated(std::size_t n) const;
};

struct HomologyModule {
  ModulePtr module;
  SubmoduleResult cycles;
  ObjectSubspaces boundaries;  // inside cycles
  QuotientResult projection;   // cycles -> homology
};
// H_n of the complex (augmentation ignored); requires n <= length
HomologyModule homology(const ChainComplex& c, std::size_t n);

// Nerve chains of a category.
struct NerveComplex {
  std::vector<std::vector<std::vector<Mor>>> chains;  // chains[n] = composable strings f_1..f_n
  std::vector<Matrix> boundaries;                      // boundaries[n-1] : C_n -> C_{n-1}
  std::vector<std::size_t> betti;                      // degrees 0..N
};
NerveComplex nerve_chain_complex(const FinCategory& c, std::uint32_t p, std::size_t n);

// Fundamental group presentation of the nerve.
struct Presentation {
  std::vector<std::string> generators;
  // each relation is a word of (generator, exponent) letters equal to 1
  std::vector<std::vector<std::pair<std::size_t, int>>> relations;
  std::vector<Mor> tree_edges;
  std::vector<BigInt> abelianization() const;
};
Presentation pi1_presentation(const FinCategory& c, Obj c0);

}  // namespace omegares
