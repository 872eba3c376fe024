#pragma once

#include "omegares/exactla.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <stop_token>
#include <string>
#include <vector>

namespace omegares {

// Complexes over the group ring of a discrete p-torus T = (Z/p^inf)^r extended by a finite group H of
// order prime to p. T is modelled through its truncations T_n = (Z/p^n)^r; T_n sits inside T_L as the
// elements divisible by p^(L-n), so kT_n is a subring of kT_L and the generator t_n of each axis
// satisfies t_n^p = t_(n-1).

class TorusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// element of k T_n in the group basis
using RingElem = Vec;

class TruncatedTorusAlgebra {
 public:
  TruncatedTorusAlgebra(std::uint32_t p, std::size_t rank, std::size_t level);

  std::uint32_t prime() const { return p_; }
  std::size_t rank() const { return rank_; }
  std::size_t level() const { return level_; }
  std::uint64_t modulus() const { return modulus_; }  // p^level
  std::size_t dim() const { return dim_; }             // p^(level * rank)

  // group elements are indexed by coordinates in (Z/p^level)^rank, first axis fastest
  std::size_t index(const std::vector<std::uint64_t>& coords) const;
  std::vector<std::uint64_t> coords(std::size_t g) const;
  std::size_t add(std::size_t a, std::size_t b) const;
  // generator of the cyclic factor of T_n along `axis`: p^(level - n) on that axis
  std::size_t generator(std::size_t n, std::size_t axis) const;
  // image of t under the integer matrix A (row-major rank x rank), reduced mod p^level
  std::size_t act(const std::vector<long long>& a, std::size_t g) const;

  RingElem zero() const { return RingElem(dim_, 0); }
  RingElem one() const { return basis(0); }
  RingElem basis(std::size_t g) const;
  RingElem mul(const RingElem& x, const RingElem& y) const;
  RingElem add(const RingElem& x, const RingElem& y) const;
  RingElem sub(const RingElem& x, const RingElem& y) const;
  RingElem scale(const RingElem& x, Residue c) const;
  RingElem pow(const RingElem& x, std::uint64_t e) const;
  // x * g for a group element g
  RingElem shift(const RingElem& x, std::size_t g) const;
  RingElem conjugate(const std::vector<long long>& a, const RingElem& x) const;
  Residue augmentation(const RingElem& x) const;
  bool is_zero(const RingElem& x) const;
  // sum of the elements of T_n
  RingElem sigma(std::size_t n) const;
  // x in k T_lower, lower.level() <= level(), pushed into this algebra
  RingElem embed(const TruncatedTorusAlgebra& lower, const RingElem& x) const;
  // smallest n with x in k T_n
  std::size_t support_level(const RingElem& x) const;

 private:
  std::uint32_t p_;
  std::size_t rank_, level_;
  std::uint64_t modulus_;
  std::size_t dim_;
};

// H acting on T by integer matrices, kept modulo p^level. Elements are enumerated by closure from the
// generators, identity first.
class TorusExtensionGroup {
 public:
  using IntMat = std::vector<long long>;  // row-major rank x rank

  static TorusExtensionGroup from_matrices(std::uint32_t p, std::size_t rank, std::size_t level,
                                           const std::vector<IntMat>& generators);
  // rank 1, H = C_m acting through the Teichmuller lift of a character of order m; m | p - 1
  static TorusExtensionGroup cyclic_character(std::uint32_t p, std::size_t m, std::size_t level);
  static TorusExtensionGroup trivial(std::uint32_t p, std::size_t rank, std::size_t level);

  std::uint32_t prime() const { return p_; }
  std::size_t rank() const { return rank_; }
  std::size_t level() const { return level_; }
  std::size_t order() const { return elements_.size(); }
  const IntMat& matrix(std::size_t h) const { return elements_[h]; }
  const std::vector<std::size_t>& generators() const { return generators_; }
  std::size_t inverse(std::size_t h) const { return inverse_[h]; }
  std::size_t product(std::size_t a, std::size_t b) const;
  // action on V = Omega_1(T) tensored with k: the matrix mod p
  Matrix on_v(std::size_t h) const;
  // rank 1: the scalar by which h acts on V
  Residue character(std::size_t h) const;
  // same generators reduced to a lower level
  TorusExtensionGroup at_level(std::size_t level) const;

 private:
  std::uint32_t p_ = 2;
  std::size_t rank_ = 0, level_ = 0;
  std::vector<IntMat> generator_matrices_;  // as given, unreduced
  std::vector<IntMat> elements_;
  std::vector<std::size_t> generators_;
  std::vector<std::size_t> inverse_;
  std::vector<std::vector<std::size_t>> table_;
};

// finite-dimensional representation of H over k: rho[h] for every element h
struct HRep {
  std::uint32_t p = 2;
  std::size_t dim = 0;
  std::vector<Matrix> rho;

  static HRep trivial(const TorusExtensionGroup& g, std::size_t dim);
  static HRep on_v(const TorusExtensionGroup& g);
  static HRep exterior_power(const TorusExtensionGroup& g, std::size_t m);
  static HRep character_power(const TorusExtensionGroup& g, long long j);  // rank 1: chi^j
  static HRep tensor(const HRep& a, const HRep& b);
  static HRep direct_sum(const HRep& a, const HRep& b);
  bool is_trivial() const;
  std::size_t invariants_dim() const;
};

// kT-linear map between free modules kT (x) U: column j is the image of the generator e_j
struct RingMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<RingElem> entries;

  RingMatrix() = default;
  RingMatrix(const TruncatedTorusAlgebra& a, std::size_t rows, std::size_t cols);
  const RingElem& at(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }
  RingElem& at(std::size_t i, std::size_t j) { return entries[i * cols + j]; }
};

RingMatrix ring_multiply(const TruncatedTorusAlgebra& a, const RingMatrix& x, const RingMatrix& y);
RingMatrix ring_add(const TruncatedTorusAlgebra& a, const RingMatrix& x, const RingMatrix& y,
                    Residue scale_y = 1);
bool ring_is_zero(const TruncatedTorusAlgebra& a, const RingMatrix& x);
// scalar k-matrices on the left and right: left * x * right
RingMatrix ring_sandwich(const TruncatedTorusAlgebra& a, const Matrix& left, const RingMatrix& x,
                         const Matrix& right);
// the k-linear map on kT (x) U with basis index block * dim + g
Matrix flatten(const TruncatedTorusAlgebra& a, const RingMatrix& x);
// k (x)_{kT} -: entries replaced by their augmentation
Matrix augment(const TruncatedTorusAlgebra& a, const RingMatrix& x);
// x rho_src(h) == rho_tgt(h) h(x) for every generator h of H
bool is_equivariant(const TruncatedTorusAlgebra& a, const TorusExtensionGroup& g, const RingMatrix& x,
                    const HRep& src, const HRep& tgt);
// (1/|H|) sum_h rho_tgt(h) h(x) rho_src(h^-1)
RingMatrix average_over_h(const TruncatedTorusAlgebra& a, const TorusExtensionGroup& g, const RingMatrix& x,
                          const HRep& src, const HRep& tgt);

// Terms kT (x) U_d, boundaries[d] : term d+1 -> term d. Generators may carry labels.
struct GradedTorusComplex {
  std::shared_ptr<const TruncatedTorusAlgebra> algebra;
  std::shared_ptr<const TorusExtensionGroup> group;
  std::vector<HRep> terms;
  std::vector<RingMatrix> boundaries;
  std::vector<std::vector<std::string>> labels;

  std::size_t top() const { return terms.empty() ? 0 : terms.size() - 1; }
  std::size_t rank(std::size_t d) const { return d < terms.size() ? terms[d].dim : 0; }
  // k-dimension of the degree-d term
  std::size_t dim(std::size_t d) const { return rank(d) * algebra->dim(); }
  bool squares_to_zero() const;
  bool equivariant() const;
  // boundary out of degree d (d >= 1), or a zero matrix of the right shape
  RingMatrix boundary(std::size_t d) const;
};

// ---- the maps phi_n and psi_n

// phi_n(e_i) for a basis e_i of V, in k T_n. Built as the average over H of t_(n,i) - 1; rank 1 with
// H != 1 uses mu_n = sum_h chi(h)^-1 t_n^chi(h) instead (a nonzero multiple of the average).
std::vector<RingElem> build_phi(const TorusExtensionGroup& g, std::size_t n);
// psi_n as an r x r matrix over k T_(n+1): phi_(n+1)(psi_n(e_j)) = phi_n(e_j), entries in I(kT_(n+1)).
// Rank 1 uses nu_n = mu_(n+1)^(p-1).
RingMatrix build_psi(const TorusExtensionGroup& g, std::size_t n);

struct TorusParameters {
  std::shared_ptr<const TorusExtensionGroup> group;  // at the top level
  std::vector<std::shared_ptr<const TruncatedTorusAlgebra>> algebras;  // algebras[n] = k T_n, n = 1..L
  std::vector<std::vector<RingElem>> phi;  // phi[n], in k T_L
  std::vector<RingMatrix> psi;             // psi[n], n = 1..L-1, in k T_L
  // checks, all at every level
  bool phi_equivariant = true;
  bool phi_image_is_augmentation_ideal = true;  // k T_n . phi_n(V) = I(k T_n)
  bool psi_factorization = true;                // phi_(n+1) psi_n = phi_n
  bool psi_in_augmentation = true;              // psi_n(kT.V) <= I(kT).V
  bool psi_equivariant = true;
  bool sigma_identity = true;                   // det(psi_(n-1)) sigma_(n-1) = sigma_n

  std::size_t level() const { return algebras.size() - 1; }
  const TruncatedTorusAlgebra& top() const { return *algebras.back(); }
  // rank 1 notation
  RingElem mu(std::size_t n) const { return phi[n][0]; }
  RingElem nu(std::size_t n) const;  // nu_0 = sigma_1
  RingElem sigma(std::size_t n) const { return top().sigma(n); }
  bool all_checks() const {
    return phi_equivariant && phi_image_is_augmentation_ideal && psi_factorization && psi_in_augmentation &&
           psi_equivariant && sigma_identity;
  }
};
TorusParameters torus_parameters(const TorusExtensionGroup& g);

// ---- complexes

// D^(n) = (kT (x) Lambda^m V, d^(n)) over k T_level (default: the group's level)
GradedTorusComplex koszul_complex(const TorusParameters& t, std::size_t n);

struct TorusChainMap {
  std::vector<RingMatrix> components;  // f_d : src_d -> tgt_d
};
bool is_chain_map(const GradedTorusComplex& src, const GradedTorusComplex& tgt, const TorusChainMap& f);
// cone_(d+1) = tgt_(d+1) + src_d with boundary [[d', (-1)^d f_d], [0, d]]; throws TorusError when f does
// not commute with the boundaries
GradedTorusComplex mapping_cone(const GradedTorusComplex& src, const GradedTorusComplex& tgt,
                                const TorusChainMap& f);
// cone of Id - (+)Psi^(n) : (+)_{n<L} D^(n) -> (+)_{n<=L} D^(n) over k T_L
GradedTorusComplex torus_telescope(const TorusParameters& t);
// Lambda(psi_(L-1)) : D^(L-1) over k T_(L-1) -> D^(L) over k T_L, written over k T_L
TorusChainMap koszul_transition(const TorusParameters& t);

// ---- homology

// dense homology over k of a complex of flattened terms
struct DenseHomology {
  std::vector<std::size_t> dims;
  // representatives and boundary spaces per degree, when requested
  std::vector<std::vector<Vec>> representatives;
  std::vector<Subspace> boundaries;
};
DenseHomology dense_homology(const GradedTorusComplex& c, std::size_t lo, std::size_t hi,
                             bool keep_representatives = false);

// rank 1 only: homology dimensions through Smith forms over k[X]/(X^(p^L)), X = t_L - 1
std::vector<std::size_t> uniserial_homology(const GradedTorusComplex& c, std::size_t lo, std::size_t hi);

struct DegreeValue {
  std::size_t degree = 0;
  std::size_t value = 0;
  bool stable = false;
};

// ---- reports

struct TorusResolutionReport {
  std::size_t level = 0;
  std::size_t length = 0;                 // r + 1
  std::vector<DegreeValue> homology;      // H_d(D) as the image from level L-1, d = 0..length
  std::vector<DegreeValue> coinvariants;  // H_d(k (x)_{kT} D), same convention
  bool h0_is_k = false;
  bool t_trivial = false;                 // T_L acts trivially on H_*(D^(L))
  bool coinvariants_acyclic = false;      // stable degrees only
  bool squares_to_zero = false;
  bool equivariant = false;
  bool parameters_ok = false;
  bool stable() const;
};
TorusResolutionReport torus_resolution(const TorusExtensionGroup& g);

// C_j for the Sullivan sphere of order m at level L: generators a_n with n <= L, twisted by chi^i in
// degrees 2i - 1 and 2i
GradedTorusComplex sullivan_chain(const TorusParameters& t, std::size_t j);

struct SullivanReport {
  std::uint32_t p = 0;
  std::size_t m = 0, level = 0, pieces = 0;       // pieces = j of C_j
  std::vector<DegreeValue> betti;                 // degrees 0..2j
  std::vector<std::size_t> betti_previous;        // at level L - 1 (empty below level 3)
  std::vector<DegreeValue> gamma_coinvariants;    // H_d(k (x)_{k Gamma} C_j), stable image
  bool squares_to_zero = false;
  bool equivariant = false;
  bool parameters_ok = false;
  bool t_trivial = false;                         // on the stable classes
  std::optional<std::size_t> h_nontrivial_degree; // Omega-3 failure: H moves a stable class
  std::optional<std::size_t> coinvariant_degree;  // Omega-2 failure: stable class of k (x)_{k Gamma}
  bool omega_resolution() const { return !h_nontrivial_degree && !coinvariant_degree && t_trivial; }
  bool stable() const;
};
SullivanReport sullivan_complex(std::uint32_t p, std::size_t m, std::size_t level,
                                std::optional<std::size_t> pieces = std::nullopt);

struct FiltrationPiece {
  std::size_t degree = 0;  // the piece is W (x) Sigma^degree D^(L)
  std::size_t dim = 0;     // dim W
  std::vector<std::size_t> character;  // rank 1 only: exponents j with W = sum chi^j
};

struct FiniteLengthResult {
  std::size_t level = 0, degree_bound = 0;
  std::uint64_t seed = 0;
  GradedTorusComplex complex;
  std::vector<FiltrationPiece> filtration;
  std::vector<DegreeValue> betti;               // degrees 0..degree_bound
  std::vector<std::size_t> betti_previous;      // the same build at level L - 1
  bool squares_to_zero = false;
  bool equivariant = false;
  bool chain_maps_commute = true;
  bool t_trivial = false;                       // on H_d, d <= degree_bound
  bool h_trivial = false;
  bool pieces_coinvariant_free = false;         // every W has W^H = 0, so k (x)_{k Gamma} R ~ k (x)_{k Gamma} D
  bool base_coinvariants_acyclic = false;       // k (x)_{kT} D acyclic in the stable range
  bool omega_certificate() const {
    return squares_to_zero && equivariant && chain_maps_commute && t_trivial && h_trivial &&
           pieces_coinvariant_free && base_coinvariants_acyclic;
  }
  bool stable() const;
};

class LiftObstruction : public TorusError {
 public:
  using TorusError::TorusError;
};
class BuilderCancelled : public TorusError {
 public:
  BuilderCancelled() : TorusError("cancelled") {}
};

// threads > 1 builds levels L and L - 1 concurrently
FiniteLengthResult finite_length_builder(const TorusExtensionGroup& g, std::size_t degree_bound,
                                         std::uint64_t seed = 0, std::stop_token stop = {},
                                         std::size_t threads = 1);

}  // namespace omegares
