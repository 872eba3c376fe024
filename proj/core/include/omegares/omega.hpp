#pragma once

#include "omegares/fincat.hpp"
#include "omegares/io.hpp"
#include "omegares/kan.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <stop_token>
#include <string>
#include <vector>

namespace omegares {

// ---- axiom checking

enum class Axiom {
  Complex,             // d o d = 0 and eps o d_1 = 0
  Projective,          // each P_i projective
  PushforwardExact,    // theta_* of the augmented complex is exact
  HomologyPulledBack,  // H_i(P) lies in theta^*(B), H_0 = theta^*(X) through eps
  TruncationExact,     // theta_*(Ker d_N) -> theta_* P_N -> theta_* P_{N-1} exact
};
std::string to_string(Axiom a);

struct Witness {
  std::size_t degree = 0;
  std::string object;    // object of the source or target category
  std::string morphism;  // empty when the failure is not about a morphism
  Vec vector;
  std::string detail;
};

struct AxiomVerdict {
  Axiom axiom = Axiom::Complex;
  std::size_t degree = 0;
  bool pass = true;
  std::optional<Witness> witness;  // present iff !pass
};

struct AxiomReport {
  std::size_t length = 0;
  bool complete = false;  // checked as a full resolution with P_{N+1} = 0
  std::vector<AxiomVerdict> verdicts;

  bool all_pass() const;
  bool passes(Axiom a) const;
  const AxiomVerdict* first_failure() const;
};

class DegreeWindowError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Checks the complex (augmented to theta^*X) as an Omega_N-resolution, or as a complete resolution of
// length N when `complete` is set.
AxiomReport check_omega_axioms(const OmegaSystem& sys, const ChainComplex& complex, std::size_t n,
                               bool complete = false);
// membership of a source module in theta^*(B); the witness explains a failure
std::optional<Witness> pulled_back_witness(const OmegaSystem& sys, const CatModule& h);

// ---- builder

struct StepRecord {
  std::size_t degree = 0;         // n: P_{n+1} was added
  std::size_t cycles_dim = 0;     // Ker d_n, summed over objects
  std::size_t pushed_cycles_dim = 0;
  std::size_t splitting_rank = 0;  // dim Im(s) = dim Ker(theta_* d_n)
  std::size_t homology_dim = 0;    // Ker d_n / Im d_{n+1}, augmented, over the source
  std::size_t pushed_homology_dim = 0;  // theta_* of it, computed directly
  bool consistent = true;          // direct count == pushed_cycles_dim - splitting_rank
  bool unit_epimorphism = true;    // a^{[s]} : Z -> theta^* Q surjective
  std::optional<bool> l1_vanishes;  // strict mode: L_1 theta_*(theta^* Q) = 0
  std::size_t new_generators = 0;
};

struct OmegaResolutionState {
  std::vector<Obj> target_generators;  // X is free on these target objects
  ModulePtr target_module;             // X
  FreeResolution resolution;           // P_0 .. P_n, augmented to theta^* X
  std::vector<LowerStar> pushed;       // theta_* P_i
  LowerStar pushed_target;             // theta_* theta^* X
  std::vector<ModulePtr> homology;     // H_i(P), unaugmented, i < n
  std::vector<ModulePtr> pushed_homology;
  std::vector<StepRecord> steps;
  std::optional<AxiomReport> certificate;

  std::size_t length() const { return resolution.complex.length(); }
  const ChainComplex& complex() const { return resolution.complex; }
  // dim theta_* H_i for i < length
  std::vector<std::size_t> betti() const;
};

struct BuildOptions {
  std::uint64_t seed = 0;  // choice of splitting s; 0 is the echelon choice
  bool strict = false;     // compute L_1 theta_*(theta^* Q) at every step
  bool verify = true;      // run check_omega_axioms on the finished complex
  std::stop_token stop;
};

// X has no Omega-resolution (or no Omega_1-resolution)
class OmegaRefusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class ExtensionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class Cancelled : public std::runtime_error {
 public:
  Cancelled() : std::runtime_error("cancelled") {}
};

// P_0 free with theta_*(eps) onto X; generators added when eps would miss part of theta^* X
OmegaResolutionState build_base(const OmegaSystem& sys, const std::vector<Obj>& x_generators);
// adds P_{n+1} and records H_n; at n = 0 refuses when L_1 theta_*(theta^* X) != 0
void extend_step(const OmegaSystem& sys, OmegaResolutionState& state, const BuildOptions& opts = {});
// P_0 .. P_n; Betti numbers of H^Omega in degrees < n
OmegaResolutionState build_omega_resolution(const OmegaSystem& sys, const std::vector<Obj>& x_generators,
                                            std::size_t n, const BuildOptions& opts = {});

// theta: B(G) -> B(G / O^p(G))
OmegaSystem group_loop_system(const FinGroup& g, std::uint32_t p);
// X = k pi: one generator at the single target object
inline std::vector<Obj> group_ring_target() { return {0}; }

// {"prime": p, "source": {"group": G} | {"category": C} | C, "target": {"group": pi} | {"category": D},
//  "functor": {"objects": .., "morphisms": ..} | {"homomorphism": [..]}}
// The functor may be omitted when the target group is trivial. Throws OmegaSystemError when a hypothesis
// fails and ParseError on malformed input.
OmegaSystem system_from_json(const Json& j, std::optional<std::uint32_t> prime = std::nullopt);

// ---- homology

struct HomologyTable {
  std::size_t first = 0;
  std::vector<HomologyModule> modules;  // degrees first ..
  std::vector<std::size_t> dims;        // total dimension over the category
};
// H_i for i in [lo, hi]; needs d_{hi+1}
HomologyTable homology_of(const ChainComplex& complex, std::size_t lo, std::size_t hi);

// ---- chain maps

struct ChainMap {
  ModuleMap base;                     // theta^*X -> theta^*Y
  std::vector<ModuleMap> components;  // f_0 .. f_N
  bool commutes(const ChainComplex& src, const ChainComplex& tgt) const;
};

class LiftFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// f_0 .. f_top over `base`, corrected so that every step lifts; tgt needs d_{top}
ChainMap chain_lift(const FreeResolution& src, const ChainComplex& tgt, const ModuleMap& base, std::size_t top);
// D_0 .. D_{top-1} with f_n - g_n = d D_n + D_{n-1} d for n < top; f and g must cover the same base
std::vector<ModuleMap> chain_homotopy(const FreeResolution& src, const ChainComplex& tgt, const ChainMap& f,
                                      const ChainMap& g, std::size_t top);
bool is_chain_homotopy(const ChainComplex& src, const ChainComplex& tgt, const ChainMap& f, const ChainMap& g,
                       const std::vector<ModuleMap>& d, std::size_t top);
ChainMap identity_chain_map(const ChainComplex& c);
ChainMap compose(const ChainMap& g, const ChainMap& f);

struct Comparison {
  std::size_t window = 0;
  bool forward_commutes = false;
  bool backward_commutes = false;
  bool homotopy_source = false;  // g' g ~ id through window - 1
  bool homotopy_target = false;
  bool induced_isomorphisms = false;  // on H_i, i < window
  std::vector<std::size_t> betti_a, betti_b;
  bool equivalent() const {
    return forward_commutes && backward_commutes && homotopy_source && homotopy_target && induced_isomorphisms &&
           betti_a == betti_b;
  }
};
Comparison compare_resolutions(const OmegaSystem& sys, const OmegaResolutionState& a,
                               const OmegaResolutionState& b, std::size_t n);

// ---- serialization

inline constexpr int kComplexFormatVersion = 1;
Json resolution_to_json(const OmegaSystem& sys, const OmegaResolutionState& state);
Json report_to_json(const AxiomReport& r);
Json complex_to_json(const ChainComplex& c);
// terms, boundaries and augmentation; `free` is filled when the file records generators
ChainComplex complex_from_json(const Json& j, CategoryPtr cat, std::uint32_t p,
                               std::vector<FreeModule>* free = nullptr);

}  // namespace omegares
