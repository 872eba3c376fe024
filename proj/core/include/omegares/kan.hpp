#pragma once

#include "omegares/fincat.hpp"
#include "omegares/groups.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace omegares {

enum class Backend { Group, BijectiveOnObjects };

enum class Hypothesis {
  SourceDisconnected,
  TargetNotGroupCategory,
  Pi1NotSurjective,
  NotBijectiveOnObjects,
  NotSurjectiveOnMorphisms,
  MorphismQuotientFails,
};

std::string to_string(Hypothesis h);

struct Diagnostic {
  Hypothesis failed;
  std::string detail;
};

class OmegaSystemError : public std::invalid_argument {
 public:
  OmegaSystemError(Diagnostic d) : std::invalid_argument(to_string(d.failed) + ": " + d.detail), diag(std::move(d)) {}
  Diagnostic diag;
};

// Over-category theta|pi: objects (c, g), a morphism (phi, g') runs (c, g' theta(phi)) -> (c', g').
struct CommaCategory {
  CategoryPtr category;
  std::size_t group_order = 0;
  Obj object(Obj c, Elem g) const { return static_cast<Obj>(c * group_order + g); }
  Mor morphism(Mor phi, Elem g) const { return static_cast<Mor>(phi * group_order + g); }
  Obj base_object(Obj o) const { return static_cast<Obj>(o / group_order); }
  Elem label(Obj o) const { return static_cast<Elem>(o % group_order); }
};

// Validated pair (C, theta) with the data needed to compute theta_*.
class OmegaSystem {
 public:
  // theta: C -> B(pi); target must be category_of_group(pi) up to equality
  static OmegaSystem over_group(CatFunctor theta, FinGroup pi, std::uint32_t p);
  // theta bijective on objects and surjective on morphism sets, with the quotient condition
  static OmegaSystem bijective(CatFunctor theta, std::uint32_t p);

  Backend backend() const { return backend_; }
  const CatFunctor& theta() const { return theta_; }
  const CategoryPtr& source() const { return theta_.source(); }
  const CategoryPtr& target() const { return theta_.target(); }
  std::uint32_t prime() const { return p_; }
  const FinGroup& group() const { return pi_; }  // group backend
  const CommaCategory& comma() const { return comma_; }  // group backend
  // K_c as morphisms of C (bijective backend)
  const std::vector<std::vector<Mor>>& kernels() const { return kernels_; }
  // object of C over each target object (bijective backend)
  Obj preimage_object(Obj d) const { return preimage_obj_[d]; }
  // some preimage of each target morphism (bijective backend)
  Mor preimage_morphism(Mor f) const { return preimage_mor_[f]; }
  // element of pi attached to a morphism of C (group backend)
  Elem label(Mor f) const { return static_cast<Elem>(theta_.on_morphism(f)); }

 private:
  OmegaSystem(CatFunctor theta, std::uint32_t p) : theta_(std::move(theta)), p_(p) {}
  Backend backend_ = Backend::Group;
  CatFunctor theta_;
  std::uint32_t p_;
  FinGroup pi_;
  CommaCategory comma_;
  std::vector<std::vector<Mor>> kernels_;
  std::vector<Obj> preimage_obj_;
  std::vector<Mor> preimage_mor_;
};

struct Validation {
  std::optional<OmegaSystem> system;
  std::optional<Diagnostic> diagnostic;
  bool ok() const { return system.has_value(); }
};

Validation validate_group_system(const CatFunctor& theta, const FinGroup& pi, std::uint32_t p);
Validation validate_bijective_system(const CatFunctor& theta, std::uint32_t p);

CommaCategory comma_category(const CatFunctor& theta, const FinGroup& pi);
// subgroup of pi generated by theta on loops of the nerve
SubgroupHandle pi1_image(const CatFunctor& theta, const FinGroup& pi);
// one-object category whose morphisms are all invertible, read back as a group
std::optional<FinGroup> group_of_category(const FinCategory& c);
// K_c as a group, position i corresponding to kernels()[c][i]
FinGroup kernel_group(const OmegaSystem& sys, Obj c);

CatModule theta_upper_star(const OmegaSystem& sys, const CatModule& n);
ModuleMap theta_upper_star(const OmegaSystem& sys, const ModuleMap& f, ModulePtr src, ModulePtr tgt);

struct LowerStar {
  ModulePtr module;  // over the target category
  ModulePtr pullback;  // theta^* of module
  ModuleMap unit;    // M -> theta^* theta_* M
  // per target object: ambient space -> quotient, and the coordinate section back
  std::vector<Matrix> projection;
  std::vector<Matrix> section;
};

LowerStar theta_lower_star(const OmegaSystem& sys, ModulePtr m);
// theta_* of a map, given the lower stars of its endpoints
ModuleMap theta_lower_star(const OmegaSystem& sys, const ModuleMap& f, const LowerStar& src, const LowerStar& tgt);
// theta_* theta^* N -> N
ModuleMap counit(const OmegaSystem& sys, ModulePtr n, const LowerStar& pushed);

// Free resolutions with explicit generators.
struct FreeResolution {
  ChainComplex complex;             // augmented to the resolved module
  std::vector<FreeModule> free;     // free structure of each term
  std::vector<std::vector<Vec>> images;  // images[n][i] = d(generator i of P_n) in P_{n-1}; n >= 1
  std::vector<Vec> augmentation_images;   // generator images of P_0 in the resolved module
};

enum class CoverMode { Greedy, FullBasis };
FreeResolution free_resolution(ModulePtr m, std::size_t degree, CoverMode mode = CoverMode::Greedy);

// sparse element of a free module: (generator, morphism, coefficient), sorted and merged
struct FreeTerm {
  std::uint32_t gen;
  Mor mor;
  Residue coeff;
};
using SparseElement = std::vector<FreeTerm>;

// F_c^{+|pi|} -> F_c (x) theta^*(k pi), generator h to id_c (x) e_h; on bases (phi, h) -> (phi, theta(phi) h).
// This is what lets the chain-level resolution below use free modules.
struct Untwisting {
  FreeModule free;
  ModulePtr twisted;
  ModuleMap map;
};
Untwisting untwisting(const OmegaSystem& sys, Obj c);

// Chain-level resolution of theta^*(k pi) from nondegenerate nerve chains.
struct EcResolution {
  FreeResolution resolution;  // dense terms, degrees 0 .. dense degree
  // sparse[n][j] = d(generator j of P_n), n = 1 .. degree + 1
  std::vector<std::vector<SparseElement>> sparse;
  std::vector<std::vector<std::vector<Mor>>> chains;  // chains[n], as in nerve_chain_complex
  bool homotopy_certified = false;  // explicit contracting homotopy checked through the top degree
};
// Sparse boundaries through `degree` + 1; dense modules only up to `dense_degree` (default: degree),
// since a dense free term of rank r over C costs r |Mor C| squared entries per morphism.
EcResolution ec_resolution(const OmegaSystem& sys, std::size_t degree,
                           std::optional<std::size_t> dense_degree = std::nullopt);
// d s + s d = id on every term through `degree`, checked without dense matrices
bool certify_ec_exactness(const OmegaSystem& sys, const EcResolution& ec, std::size_t degree);

// theta_* of a free resolution, as a complex of free target modules in degrees 0..top
ChainComplex push_free_complex(const OmegaSystem& sys, const FreeResolution& r, std::size_t top = SIZE_MAX);
ModulePtr derived_theta_star(const OmegaSystem& sys, const FreeResolution& r, std::size_t i);
ModulePtr derived_theta_star(const OmegaSystem& sys, ModulePtr m, std::size_t i,
                             CoverMode mode = CoverMode::Greedy);

class NotProjective : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

bool omega1_exists(const OmegaSystem& sys, ModulePtr x);

enum class Verdict { Exists, DoesNotExist, Mixed, Unknown };
std::string to_string(Verdict v);

struct ProjectiveVerdict {
  std::string object;  // target object whose free module is examined
  bool pullback_projective = false;
  std::size_t l1_dim = 0;
  Verdict verdict = Verdict::Unknown;
};

struct KernelRow {
  std::string object;
  std::size_t order = 0;
  std::vector<BigInt> abelianization;
  bool perfect = false;
};

struct PerfectnessReport {
  Backend backend = Backend::Group;
  std::uint32_t prime = 2;
  std::vector<KernelRow> kernels;                 // bijective backend
  std::vector<ProjectiveVerdict> projectives;     // bijective backend, one per target object
  std::optional<std::size_t> l1_dim;              // group backend: dim L_1 theta_*(theta^* k pi)
  std::optional<bool> direct_kernel_perfect;      // group backend with C = B(G)
  bool agree = true;
  Verdict verdict = Verdict::Unknown;
};

PerfectnessReport perfectness_certificate(const OmegaSystem& sys);

}  // namespace omegares
