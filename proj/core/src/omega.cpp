#include "omegares/omega.hpp"

#include <map>

namespace omegares {

std::string to_string(Axiom a) {
  switch (a) {
    case Axiom::Complex: return "complex";
    case Axiom::Projective: return "projective";
    case Axiom::PushforwardExact: return "pushforward-exact";
    case Axiom::HomologyPulledBack: return "homology-pulled-back";
    case Axiom::TruncationExact: return "truncation-exact";
  }
  return "?";
}

bool AxiomReport::all_pass() const { return first_failure() == nullptr; }

bool AxiomReport::passes(Axiom a) const {
  for (const auto& v : verdicts)
    if (v.axiom == a && !v.pass) return false;
  return true;
}

const AxiomVerdict* AxiomReport::first_failure() const {
  for (const auto& v : verdicts)
    if (!v.pass) return &v;
  return nullptr;
}

namespace {

// d_n with d_0 = eps
const ModuleMap& boundary(const ChainComplex& c, std::size_t n) { return n == 0 ? *c.augmentation : c.d(n); }

Vec unit_vector(std::size_t n, std::size_t j) {
  Vec v(n, 0);
  v[j] = 1;
  return v;
}

bool is_zero_vec(const Vec& v) {
  for (auto x : v)
    if (x) return false;
  return true;
}

// a vector of a[o] outside b[o]
std::optional<std::pair<Obj, Vec>> first_outside(const ObjectSubspaces& a, const ObjectSubspaces& b) {
  for (Obj o = 0; o < a.size(); ++o)
    for (std::size_t i = 0; i < a[o].dim(); ++i) {
      Vec v = a[o].vector(i);
      if (!b[o].contains(v)) return std::make_pair(o, v);
    }
  return std::nullopt;
}

ObjectSubspaces whole_of(const CatModule& m) {
  ObjectSubspaces s;
  for (Obj o = 0; o < m.dims().size(); ++o) s.push_back(Subspace::whole(m.prime(), m.dim(o)));
  return s;
}

ObjectSubspaces zero_of(const CatModule& m) {
  ObjectSubspaces s;
  for (Obj o = 0; o < m.dims().size(); ++o) s.push_back(Subspace(m.prime(), m.dim(o)));
  return s;
}

ObjectSubspaces kernel_subspaces(const ModuleMap& f) {
  ObjectSubspaces s;
  for (const auto& m : f.components()) s.push_back(kernel_basis(m));
  return s;
}

Witness make_witness(std::size_t degree, const std::string& object, Vec v, std::string detail) {
  Witness w;
  w.degree = degree;
  w.object = object;
  w.vector = std::move(v);
  w.detail = std::move(detail);
  return w;
}

// f through a submodule that contains its image
ModuleMap corestrict(const ModuleMap& f, const SubmoduleResult& sub) {
  std::vector<Matrix> comp;
  for (Obj o = 0; o < f.components().size(); ++o) {
    const Matrix& inc = sub.inclusion.at(o);
    const Matrix& fo = f.at(o);
    Matrix r(fo.prime(), inc.cols(), fo.cols());
    if (inc.cols() > 0) {
      LinearSolver ls(inc);
      for (std::size_t j = 0; j < fo.cols(); ++j) {
        auto x = ls.solve(fo.col(j));
        if (!x) throw std::logic_error("corestriction: image leaves the submodule");
        for (std::size_t i = 0; i < x->size(); ++i) r(i, j) = (*x)[i];
      }
    }
    comp.push_back(std::move(r));
  }
  return ModuleMap(f.source(), sub.module, std::move(comp), false);
}

}  // namespace

// ---- membership in theta^*(B)

std::optional<Witness> pulled_back_witness(const OmegaSystem& sys, const CatModule& h) {
  const auto& c = *sys.source();
  const std::uint32_t p = h.prime();
  if (sys.backend() == Backend::BijectiveOnObjects) {
    for (Obj o = 0; o < c.num_objects(); ++o)
      for (Mor a : sys.kernels()[o]) {
        const Matrix& m = h.action(a);
        for (std::size_t j = 0; j < m.cols(); ++j)
          if (!(m.col(j) == unit_vector(m.rows(), j))) {
            Witness w = make_witness(0, c.object_name(o), unit_vector(m.cols(), j),
                                     "an element of K_c moves this vector");
            w.morphism = c.morphism(a).name;
            return w;
          }
      }
    return std::nullopt;
  }
  // group backend: locally constant on C, then trivial monodromy on the over-category
  for (Mor f = 0; f < c.num_morphisms(); ++f) {
    const Matrix& m = h.action(f);
    if (m.rows() == m.cols() && inverse(m)) continue;
    Subspace ker = kernel_basis(m);
    Vec v = ker.dim() ? ker.vector(0) : Vec(m.cols(), 0);
    Witness w = make_witness(0, c.object_name(c.src(f)), v, "morphism acts non-invertibly");
    w.morphism = c.morphism(f).name;
    return w;
  }
  const auto& comma = sys.comma();
  const auto& cc = *comma.category;
  const std::size_t n = comma.group_order;
  std::vector<std::size_t> dims;
  for (Obj o = 0; o < cc.num_objects(); ++o) dims.push_back(h.dim(comma.base_object(o)));
  std::vector<Matrix> act;
  for (Mor m = 0; m < cc.num_morphisms(); ++m) act.push_back(h.action(static_cast<Mor>(m / n)));
  CatModule pulled(comma.category, p, std::move(dims), std::move(act), false);
  auto mono = monodromy(pulled, 0);
  std::size_t k = 0;
  for (Mor m = 0; m < cc.num_morphisms(); ++m) {
    if (cc.is_identity(m)) continue;
    if (k >= mono.size()) break;
    const Matrix& t = mono[k++];
    for (std::size_t j = 0; j < t.cols(); ++j)
      if (!(t.col(j) == unit_vector(t.rows(), j))) {
        Mor phi = static_cast<Mor>(m / n);
        Witness w = make_witness(0, c.object_name(comma.base_object(0)), unit_vector(t.cols(), j),
                                 "monodromy over the over-category is not the identity");
        w.morphism = c.morphism(phi).name + "@" + std::to_string(m % n);
        return w;
      }
  }
  return std::nullopt;
}

// ---- axiom checker

AxiomReport check_omega_axioms(const OmegaSystem& sys, const ChainComplex& cx, std::size_t n, bool complete) {
  if (!cx.augmentation) throw std::invalid_argument("the complex needs an augmentation to theta^*(X)");
  if (n > cx.length())
    throw DegreeWindowError("degree " + std::to_string(n) + " beyond a complex of length " +
                            std::to_string(cx.length()));
  const auto& src = *sys.source();
  const auto& tgt = *sys.target();
  AxiomReport rep;
  rep.length = n;
  rep.complete = complete;
  auto add = [&](Axiom a, std::size_t deg, std::optional<Witness> w) {
    if (w) w->degree = deg;
    rep.verdicts.push_back({a, deg, !w.has_value(), std::move(w)});
  };

  for (std::size_t i = 1; i <= n; ++i) {
    ModuleMap dd = compose(boundary(cx, i - 1), boundary(cx, i));
    std::optional<Witness> w;
    for (Obj o = 0; o < src.num_objects() && !w; ++o) {
      const Matrix& m = dd.at(o);
      for (std::size_t j = 0; j < m.cols() && !w; ++j)
        if (!is_zero_vec(m.col(j)))
          w = make_witness(i, src.object_name(o), unit_vector(m.cols(), j), "d d is nonzero on this basis vector");
    }
    add(Axiom::Complex, i, w);
  }

  for (std::size_t i = 0; i <= n; ++i) {
    std::optional<Witness> w;
    if (!is_projective(cx.terms[i])) w = make_witness(i, "", {}, "the free cover has no natural section");
    add(Axiom::Projective, i, w);
  }

  // theta_* of the augmented complex
  ModulePtr aug_target = cx.augmentation->target();
  std::vector<LowerStar> ls;
  for (std::size_t i = 0; i <= n; ++i) ls.push_back(theta_lower_star(sys, cx.terms[i]));
  LowerStar ls_aug = theta_lower_star(sys, aug_target);
  std::vector<ModuleMap> pd;
  for (std::size_t i = 0; i <= n; ++i)
    pd.push_back(theta_lower_star(sys, boundary(cx, i), ls[i], i == 0 ? ls_aug : ls[i - 1]));
  {
    std::optional<Witness> w;
    if (auto out = first_outside(whole_of(*ls_aug.module), image_subspaces(pd[0])))
      w = make_witness(0, tgt.object_name(out->first), out->second, "theta_*(eps) misses this vector");
    add(Axiom::PushforwardExact, 0, w);
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::optional<Witness> w;
    if (auto out = first_outside(kernel_subspaces(pd[i]), image_subspaces(pd[i + 1])))
      w = make_witness(i, tgt.object_name(out->first), out->second, "a cycle of theta_* P that is not a boundary");
    add(Axiom::PushforwardExact, i, w);
  }
  if (complete) {
    std::optional<Witness> w;
    if (auto out = first_outside(kernel_subspaces(pd[n]), zero_of(*ls[n].module)))
      w = make_witness(n, tgt.object_name(out->first), out->second, "theta_* of the top boundary is not injective");
    add(Axiom::PushforwardExact, n, w);
  }

  // homology
  {
    std::optional<Witness> w;
    if (auto out = first_outside(whole_of(*aug_target), image_subspaces(*cx.augmentation)))
      w = make_witness(0, src.object_name(out->first), out->second, "eps misses this vector");
    else if (n >= 1) {
      if (auto o2 = first_outside(kernel_subspaces(*cx.augmentation), image_subspaces(cx.d(1))))
        w = make_witness(0, src.object_name(o2->first), o2->second, "H_0 is bigger than theta^*(X)");
    } else if (complete) {
      if (auto o2 = first_outside(kernel_subspaces(*cx.augmentation), zero_of(*cx.terms[0])))
        w = make_witness(0, src.object_name(o2->first), o2->second, "eps is not injective");
    }
    add(Axiom::HomologyPulledBack, 0, w);
  }
  for (std::size_t i = 1; i < n; ++i) add(Axiom::HomologyPulledBack, i, pulled_back_witness(sys, *homology(cx, i).module));
  if (complete && n >= 1) add(Axiom::HomologyPulledBack, n, pulled_back_witness(sys, *kernel(cx.d(n)).module));

  if (!complete) {
    SubmoduleResult z = kernel(boundary(cx, n));
    LowerStar lz = theta_lower_star(sys, z.module);
    ModuleMap pinc = theta_lower_star(sys, z.inclusion, lz, ls[n]);
    std::optional<Witness> w;
    if (auto out = first_outside(kernel_subspaces(pd[n]), image_subspaces(pinc)))
      w = make_witness(n, tgt.object_name(out->first), out->second,
                       "Ker theta_*(d_N) is not reached from theta_*(Ker d_N)");
    add(Axiom::TruncationExact, n, w);
  }
  return rep;
}

// ---- builder

std::vector<std::size_t> OmegaResolutionState::betti() const {
  std::vector<std::size_t> b;
  for (const auto& h : pushed_homology) b.push_back(h->total_dim());
  return b;
}

OmegaResolutionState build_base(const OmegaSystem& sys, const std::vector<Obj>& x_generators) {
  const std::uint32_t p = sys.prime();
  const auto& src = sys.source();
  const auto& tgt = *sys.target();
  OmegaResolutionState st;
  st.target_generators = x_generators;
  FreeModule x = free_sum(sys.target(), x_generators, p);
  st.target_module = x.module;
  ModulePtr pulled = share(theta_upper_star(sys, *x.module));
  std::vector<Obj> gens;
  std::vector<Vec> imgs;
  for (std::size_t i = 0; i < x_generators.size(); ++i) {
    Obj d = x_generators[i];
    if (d >= tgt.num_objects()) throw std::invalid_argument("target generator out of range");
    Obj c = sys.backend() == Backend::Group ? 0 : sys.preimage_object(d);
    gens.push_back(c);
    imgs.push_back(unit_vector(pulled->dim(c), x.basis_index(i, tgt.identity(d))));
  }
  // objects eps cannot reach get generators of their own
  for (;;) {
    FreeModule f = free_sum(src, gens, p);
    ModuleMap eps = map_from_free(f, pulled, imgs);
    auto miss = first_outside(whole_of(*pulled), image_subspaces(eps));
    if (!miss) {
      st.resolution.free.push_back(f);
      st.resolution.complex.terms.push_back(f.module);
      st.resolution.complex.augmentation = eps;
      st.resolution.images.emplace_back();
      st.resolution.augmentation_images = imgs;
      break;
    }
    gens.push_back(miss->first);
    imgs.push_back(miss->second);
  }
  st.pushed.push_back(theta_lower_star(sys, st.resolution.complex.terms[0]));
  st.pushed_target = theta_lower_star(sys, pulled);
  return st;
}

void extend_step(const OmegaSystem& sys, OmegaResolutionState& st, const BuildOptions& opts) {
  if (opts.stop.stop_requested()) throw Cancelled();
  const std::size_t n = st.length();
  ChainComplex& cx = st.resolution.complex;
  const ModuleMap& dn = boundary(cx, n);
  StepRecord rec;
  rec.degree = n;

  SubmoduleResult z = kernel(dn);
  rec.cycles_dim = z.module->total_dim();
  LowerStar lz = theta_lower_star(sys, z.module);
  rec.pushed_cycles_dim = lz.module->total_dim();
  const LowerStar& lp = st.pushed[n];
  const LowerStar& lt = n == 0 ? st.pushed_target : st.pushed[n - 1];
  ModuleMap pinc = theta_lower_star(sys, z.inclusion, lz, lp);
  ModuleMap pd = theta_lower_star(sys, dn, lp, lt);
  SubmoduleResult kd = kernel(pd);
  ModuleMap f0 = corestrict(pinc, kd);
  if (!f0.is_surjective())
    throw ExtensionFailure("degree " + std::to_string(n) + ": theta_*(Ker d) does not cover Ker theta_*(d)");
  if (n == 0 && !f0.is_injective()) throw OmegaRefusal("L_1θ_*(θ^*X) ≠ 0");

  auto s = right_inverse(f0, opts.seed);
  if (!s) throw ExtensionFailure("degree " + std::to_string(n) + ": no splitting of f_0");
  ObjectSubspaces im_s = image_subspaces(*s);
  for (const auto& sp : im_s) rec.splitting_rank += sp.dim();
  QuotientResult q = quotient_module(lz.module, im_s);

  // a^{[s]} = theta^*(chi) o a_Z : Z -> theta^* Q
  ModulePtr pulled_q = share(theta_upper_star(sys, *q.module));
  std::vector<Matrix> comp;
  for (Obj o = 0; o < sys.source()->num_objects(); ++o)
    comp.push_back(q.projection.at(sys.theta().on_object(o)) * lz.unit.at(o));
  ModuleMap a(z.module, pulled_q, std::move(comp), false);
  rec.unit_epimorphism = a.is_surjective();
  if (opts.strict)
    rec.l1_vanishes = q.module->is_zero() || derived_theta_star(sys, pulled_q, 1)->is_zero();
  if (!rec.unit_epimorphism)
    throw ExtensionFailure("degree " + std::to_string(n) + ": Z -> theta^*(Q) is not onto");
  if (rec.l1_vanishes && !*rec.l1_vanishes)
    throw ExtensionFailure("degree " + std::to_string(n) + ": L_1 theta_*(theta^* Q) != 0");

  ObjectSubspaces j = kernel_subspaces(a);
  FreeCover fc = free_cover_of(z.module, j);
  ModuleMap d_next = compose(z.inclusion, fc.cover);
  std::vector<Vec> imgs;
  for (std::size_t g = 0; g < fc.free.rank(); ++g) imgs.push_back(generator_image(fc.free, d_next, g));
  rec.new_generators = fc.free.rank();

  QuotientResult h = quotient_module(z.module, j);
  rec.homology_dim = h.module->total_dim();
  rec.pushed_homology_dim = theta_lower_star(sys, h.module).module->total_dim();
  rec.consistent = rec.pushed_homology_dim + rec.splitting_rank == rec.pushed_cycles_dim;
  if (n == 0 && rec.homology_dim != 0) throw OmegaRefusal("L_1θ_*(θ^*X) ≠ 0");

  st.resolution.free.push_back(fc.free);
  cx.terms.push_back(fc.free.module);
  cx.boundaries.push_back(d_next);
  st.resolution.images.push_back(std::move(imgs));
  st.pushed.push_back(theta_lower_star(sys, fc.free.module));
  ModulePtr hn = n == 0 ? cokernel(d_next).module : h.module;
  st.homology.push_back(hn);
  st.pushed_homology.push_back(n == 0 ? theta_lower_star(sys, hn).module : theta_lower_star(sys, h.module).module);
  st.steps.push_back(rec);
}

OmegaResolutionState build_omega_resolution(const OmegaSystem& sys, const std::vector<Obj>& x_generators,
                                            std::size_t n, const BuildOptions& opts) {
  OmegaResolutionState st = build_base(sys, x_generators);
  while (st.length() < n) extend_step(sys, st, opts);
  if (opts.verify) {
    st.certificate = check_omega_axioms(sys, st.complex(), n);
    if (const auto* f = st.certificate->first_failure())
      throw ExtensionFailure("built complex fails " + to_string(f->axiom) + " in degree " + std::to_string(f->degree));
  }
  return st;
}

OmegaSystem group_loop_system(const FinGroup& g, std::uint32_t p) {
  Quotient q = quotient(g, p_residual(g, p));
  CategoryPtr src = category_of_group(g);
  CategoryPtr tgt = category_of_group(q.group);
  return OmegaSystem::over_group(functor_of_homomorphism(src, tgt, q.projection), q.group, p);
}

OmegaSystem system_from_json(const Json& j, std::optional<std::uint32_t> prime) {
  try {
    std::uint32_t p = prime ? *prime : j.at("prime").get<std::uint32_t>();
    const Json& sj = j.at("source");
    CategoryPtr src = sj.contains("group")      ? category_of_group(group_from_json(sj.at("group")))
                      : sj.contains("category") ? category_from_json(sj.at("category"))
                                                : category_from_json(sj);
    const Json& tj = j.at("target");
    if (tj.contains("group")) {
      FinGroup pi = group_from_json(tj.at("group"));
      CategoryPtr tgt = category_of_group(pi);
      std::optional<CatFunctor> theta;
      if (!j.contains("functor")) {
        if (pi.order() != 1) throw ParseError("a functor is needed for a nontrivial target group");
        theta = CatFunctor(src, tgt, std::vector<Obj>(src->num_objects(), 0),
                           std::vector<Mor>(src->num_morphisms(), tgt->identity(0)));
      } else if (j.at("functor").contains("homomorphism")) {
        theta = functor_of_homomorphism(src, tgt, j.at("functor").at("homomorphism").get<std::vector<Elem>>());
      } else {
        theta = functor_from_json(j.at("functor"), src, tgt);
      }
      Validation v = validate_group_system(*theta, pi, p);
      if (!v.ok()) throw OmegaSystemError(*v.diagnostic);
      return *v.system;
    }
    CategoryPtr tgt = category_from_json(tj.at("category"));
    Validation v = validate_bijective_system(functor_from_json(j.at("functor"), src, tgt), p);
    if (!v.ok()) throw OmegaSystemError(*v.diagnostic);
    return *v.system;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("system: ") + e.what());
  } catch (const CategoryError& e) {
    throw ParseError(std::string("system: ") + e.what());
  }
}

// ---- homology

HomologyTable homology_of(const ChainComplex& c, std::size_t lo, std::size_t hi) {
  if (lo > hi) throw std::invalid_argument("empty degree range");
  if (hi + 1 > c.length())
    throw DegreeWindowError("homology up to degree " + std::to_string(hi) + " needs d_" + std::to_string(hi + 1));
  HomologyTable t;
  t.first = lo;
  for (std::size_t i = lo; i <= hi; ++i) {
    t.modules.push_back(homology(c, i));
    t.dims.push_back(t.modules.back().module->total_dim());
  }
  return t;
}

// ---- chain maps

namespace {

// Ker d_n / Im d_{n+1} objectwise, with d_0 = eps when the complex is augmented
class CycleClasses {
 public:
  CycleClasses(const ChainComplex& c, std::size_t n) : term_(c.terms.at(n)) {
    const std::uint32_t p = term_->prime();
    for (Obj o = 0; o < term_->dims().size(); ++o) {
      Subspace z = n == 0 && !c.augmentation ? Subspace::whole(p, term_->dim(o)) : kernel_basis(boundary(c, n).at(o));
      std::vector<Vec> bs;
      if (n + 1 <= c.length()) {
        Subspace im = image_basis(c.d(n + 1).at(o));
        for (std::size_t j = 0; j < im.dim(); ++j) bs.push_back(z.coordinates(im.basis().row(j)));
      }
      Subspace bz = Subspace::span(p, z.dim(), bs);
      comp_.push_back(bz.complement_columns());
      z_.push_back(std::move(z));
      bz_.push_back(std::move(bz));
    }
  }
  std::size_t dim(Obj o) const { return comp_[o].size(); }
  Vec cls(Obj o, std::span<const Residue> v) const { return bz_[o].quotient_coordinates(z_[o].coordinates(v)); }
  Vec lift(Obj o, const Vec& h) const {
    PrimeField k(term_->prime());
    Vec v(term_->dim(o), 0);
    for (std::size_t t = 0; t < h.size(); ++t) {
      if (!h[t]) continue;
      auto row = z_[o].basis().row(comp_[o][t]);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = k.add(v[i], k.mul(h[t], row[i]));
    }
    return v;
  }
  // H(f) on classes
  const Matrix& action(Mor f) {
    auto it = cache_.find(f);
    if (it != cache_.end()) return it->second;
    const auto& c = *term_->category();
    Obj a = c.src(f), b = c.tgt(f);
    Matrix m(term_->prime(), dim(b), dim(a));
    for (std::size_t t = 0; t < dim(a); ++t) {
      Vec x = cls(b, term_->action(f).apply(lift(a, unit_vector(dim(a), t))));
      for (std::size_t i = 0; i < x.size(); ++i) m(i, t) = x[i];
    }
    return cache_.emplace(f, std::move(m)).first->second;
  }

 private:
  ModulePtr term_;
  std::vector<Subspace> z_, bz_;
  std::vector<std::vector<std::size_t>> comp_;
  std::map<Mor, Matrix> cache_;
};

// classes h_i on the generators of `pf` with sum over (i, psi) of coeff * H(psi) h_i = chi_k for each
// generator k of `pk`, where `images[k]` is d(generator k) in pf
std::optional<std::vector<Vec>> solve_factorization(const FreeModule& pf, const std::vector<Vec>& images,
                                                    const FreeModule& pk, CycleClasses& h,
                                                    const std::vector<Vec>& chi) {
  const auto& cat = *pf.module->category();
  const std::uint32_t p = pf.module->prime();
  PrimeField k(p);
  std::vector<std::size_t> col_off(pf.rank() + 1, 0), row_off(pk.rank() + 1, 0);
  for (std::size_t i = 0; i < pf.rank(); ++i) col_off[i + 1] = col_off[i] + h.dim(pf.generators[i]);
  for (std::size_t j = 0; j < pk.rank(); ++j) row_off[j + 1] = row_off[j] + h.dim(pk.generators[j]);
  Matrix sys(p, row_off.back(), col_off.back());
  Vec rhs(row_off.back(), 0);
  for (std::size_t j = 0; j < pk.rank(); ++j) {
    Obj cj = pk.generators[j];
    for (std::size_t t = 0; t < chi[j].size(); ++t) rhs[row_off[j] + t] = chi[j][t];
    if (h.dim(cj) == 0) continue;
    const Vec& v = images[j];
    for (std::size_t i = 0; i < pf.rank(); ++i) {
      Obj ci = pf.generators[i];
      if (h.dim(ci) == 0) continue;
      for (Mor psi : cat.hom(ci, cj)) {
        Residue a = v[pf.basis_index(i, psi)];
        if (!a) continue;
        const Matrix& m = h.action(psi);
        for (std::size_t r = 0; r < m.rows(); ++r)
          for (std::size_t c = 0; c < m.cols(); ++c)
            if (m(r, c)) sys(row_off[j] + r, col_off[i] + c) = k.add(sys(row_off[j] + r, col_off[i] + c), k.mul(a, m(r, c)));
      }
    }
  }
  auto x = solve(sys, rhs);
  if (!x) return std::nullopt;
  std::vector<Vec> out;
  for (std::size_t i = 0; i < pf.rank(); ++i) out.emplace_back(x->begin() + col_off[i], x->begin() + col_off[i + 1]);
  return out;
}

void subtract_into(Vec& v, const Vec& w, std::uint32_t p) {
  PrimeField k(p);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = k.sub(v[i], w[i]);
}

class ObjectSolvers {
 public:
  explicit ObjectSolvers(const ModuleMap& d) : d_(d) {}
  std::optional<Vec> solve(Obj o, std::span<const Residue> b) {
    auto it = cache_.find(o);
    if (it == cache_.end()) it = cache_.emplace(o, LinearSolver(d_.at(o))).first;
    return it->second.solve(b);
  }

 private:
  const ModuleMap& d_;
  std::map<Obj, LinearSolver> cache_;
};

}  // namespace

bool ChainMap::commutes(const ChainComplex& src, const ChainComplex& tgt) const {
  if (components.empty()) return true;
  if (src.augmentation && tgt.augmentation &&
      !(compose(*tgt.augmentation, components[0]) == compose(base, *src.augmentation)))
    return false;
  for (std::size_t n = 1; n < components.size(); ++n)
    if (!(compose(components[n - 1], src.d(n)) == compose(tgt.d(n), components[n]))) return false;
  return true;
}

ChainMap chain_lift(const FreeResolution& src, const ChainComplex& tgt, const ModuleMap& base, std::size_t top) {
  if (top > src.complex.length() || top > tgt.length())
    throw DegreeWindowError("chain lift to degree " + std::to_string(top) + " exceeds a complex");
  if (!tgt.augmentation) throw std::invalid_argument("chain lift needs an augmented target");
  const std::uint32_t p = base.source()->prime();
  ChainMap out;
  out.base = base;
  for (std::size_t n = 0; n <= top; ++n) {
    const FreeModule& f = src.free[n];
    ObjectSolvers solvers(boundary(tgt, n));
    std::vector<Vec> vals(f.rank());
    for (std::size_t j = 0; j < f.rank(); ++j) {
      Obj c = f.generators[j];
      Vec v = n == 0 ? base.at(c).apply(src.augmentation_images[j]) : out.components[n - 1].at(c).apply(src.images[n][j]);
      auto y = solvers.solve(c, v);
      if (!y) throw LiftFailure("degree " + std::to_string(n) + ": image of a generator is not a boundary");
      vals[j] = std::move(*y);
    }
    out.components.push_back(map_from_free(f, tgt.terms[n], vals));
    if (n == top) break;
    // correction by phi~ so that the next degree lifts
    CycleClasses h(tgt, n);
    const FreeModule& g = src.free[n + 1];
    std::vector<Vec> chi;
    bool any = false;
    for (std::size_t k = 0; k < g.rank(); ++k) {
      Obj c = g.generators[k];
      chi.push_back(h.cls(c, out.components[n].at(c).apply(src.images[n + 1][k])));
      any = any || !is_zero_vec(chi.back());
    }
    if (!any) continue;
    auto phi = solve_factorization(f, src.images[n + 1], g, h, chi);
    if (!phi) throw LiftFailure("degree " + std::to_string(n) + ": correction does not factor through d");
    for (std::size_t j = 0; j < f.rank(); ++j) subtract_into(vals[j], h.lift(f.generators[j], (*phi)[j]), p);
    out.components[n] = map_from_free(f, tgt.terms[n], vals);
  }
  return out;
}

std::vector<ModuleMap> chain_homotopy(const FreeResolution& src, const ChainComplex& tgt, const ChainMap& f,
                                      const ChainMap& g, std::size_t top) {
  if (top > src.complex.length() || top > tgt.length() || top >= f.components.size() + 1 ||
      top >= g.components.size() + 1)
    throw DegreeWindowError("homotopy window exceeds the maps");
  if (!(f.base == g.base)) throw std::invalid_argument("homotopy between lifts of different maps");
  std::vector<ModuleMap> d;
  std::vector<std::vector<Vec>> dv;
  for (std::size_t n = 0; n < top; ++n) {
    const FreeModule& fr = src.free[n];
    const std::uint32_t p = fr.module->prime();
    ModuleMap t = f.components[n] - g.components[n];
    auto residual = [&](std::size_t j) {
      Vec u = generator_image(fr, t, j);
      if (n > 0) subtract_into(u, d[n - 1].at(fr.generators[j]).apply(src.images[n][j]), p);
      return u;
    };
    CycleClasses h(tgt, n);
    std::vector<Vec> chi;
    bool any = false;
    for (std::size_t j = 0; j < fr.rank(); ++j) {
      chi.push_back(h.cls(fr.generators[j], residual(j)));
      any = any || !is_zero_vec(chi.back());
    }
    if (any) {
      if (n == 0) throw LiftFailure("target is not exact at degree 0");
      auto phi = solve_factorization(src.free[n - 1], src.images[n], fr, h, chi);
      if (!phi) throw LiftFailure("degree " + std::to_string(n) + ": homotopy correction does not factor");
      const FreeModule& prev = src.free[n - 1];
      PrimeField k(p);
      for (std::size_t i = 0; i < prev.rank(); ++i) {
        Vec add = h.lift(prev.generators[i], (*phi)[i]);
        for (std::size_t t2 = 0; t2 < add.size(); ++t2) dv[n - 1][i][t2] = k.add(dv[n - 1][i][t2], add[t2]);
      }
      d[n - 1] = map_from_free(prev, tgt.terms[n], dv[n - 1]);
    }
    ObjectSolvers solvers(tgt.d(n + 1));
    std::vector<Vec> vals(fr.rank());
    for (std::size_t j = 0; j < fr.rank(); ++j) {
      auto y = solvers.solve(fr.generators[j], residual(j));
      if (!y) throw LiftFailure("degree " + std::to_string(n) + ": homotopy step does not lift");
      vals[j] = std::move(*y);
    }
    d.push_back(map_from_free(fr, tgt.terms[n + 1], vals));
    dv.push_back(std::move(vals));
  }
  return d;
}

bool is_chain_homotopy(const ChainComplex& src, const ChainComplex& tgt, const ChainMap& f, const ChainMap& g,
                       const std::vector<ModuleMap>& d, std::size_t top) {
  if (d.size() < top) return false;
  for (std::size_t n = 0; n < top; ++n) {
    ModuleMap rhs = compose(tgt.d(n + 1), d[n]);
    if (n > 0) rhs = rhs + compose(d[n - 1], src.d(n));
    if (!(f.components[n] - g.components[n] == rhs)) return false;
  }
  return true;
}

ChainMap identity_chain_map(const ChainComplex& c) {
  ChainMap m;
  m.base = ModuleMap::identity(c.augmentation->target());
  for (const auto& t : c.terms) m.components.push_back(ModuleMap::identity(t));
  return m;
}

ChainMap compose(const ChainMap& g, const ChainMap& f) {
  ChainMap m;
  m.base = compose(g.base, f.base);
  for (std::size_t n = 0; n < std::min(f.components.size(), g.components.size()); ++n)
    m.components.push_back(compose(g.components[n], f.components[n]));
  return m;
}

namespace {

// the same module seen from two complexes
ModuleMap identity_between(ModulePtr a, ModulePtr b) {
  std::vector<Matrix> comp;
  for (Obj o = 0; o < a->dims().size(); ++o) comp.push_back(Matrix::identity(a->prime(), a->dim(o)));
  return ModuleMap(std::move(a), std::move(b), std::move(comp));
}

bool induces_isomorphisms(const ChainComplex& a, const ChainComplex& b, const ChainMap& f, std::size_t n) {
  for (std::size_t i = 1; i < n; ++i) {
    CycleClasses ha(a, i), hb(b, i);
    for (Obj o = 0; o < a.terms[i]->dims().size(); ++o) {
      if (ha.dim(o) != hb.dim(o)) return false;
      if (ha.dim(o) == 0) continue;
      Matrix m(a.terms[i]->prime(), hb.dim(o), ha.dim(o));
      for (std::size_t t = 0; t < ha.dim(o); ++t) {
        Vec x = hb.cls(o, f.components[i].at(o).apply(ha.lift(o, unit_vector(ha.dim(o), t))));
        for (std::size_t r = 0; r < x.size(); ++r) m(r, t) = x[r];
      }
      if (rank(m) != ha.dim(o)) return false;
    }
  }
  return true;
}

}  // namespace

Comparison compare_resolutions(const OmegaSystem&, const OmegaResolutionState& a, const OmegaResolutionState& b,
                               std::size_t n) {
  Comparison out;
  out.window = n;
  const ChainComplex& ca = a.complex();
  const ChainComplex& cb = b.complex();
  ModulePtr xa = ca.augmentation->target();
  ModulePtr xb = cb.augmentation->target();
  ChainMap fwd = chain_lift(a.resolution, cb, identity_between(xa, xb), n);
  ChainMap bwd = chain_lift(b.resolution, ca, identity_between(xb, xa), n);
  out.forward_commutes = fwd.commutes(ca, cb);
  out.backward_commutes = bwd.commutes(cb, ca);
  auto truncated_identity = [&](const ChainComplex& c) {
    ChainMap id = identity_chain_map(c);
    id.components.resize(n + 1);
    return id;
  };
  ChainMap ida = truncated_identity(ca), idb = truncated_identity(cb);
  ChainMap ba = compose(bwd, fwd), ab = compose(fwd, bwd);
  out.homotopy_source = is_chain_homotopy(ca, ca, ba, ida, chain_homotopy(a.resolution, ca, ba, ida, n), n);
  out.homotopy_target = is_chain_homotopy(cb, cb, ab, idb, chain_homotopy(b.resolution, cb, ab, idb, n), n);
  out.induced_isomorphisms = induces_isomorphisms(ca, cb, fwd, n) && induces_isomorphisms(cb, ca, bwd, n);
  auto ba_ = a.betti(), bb_ = b.betti();
  out.betti_a.assign(ba_.begin(), ba_.begin() + std::min(n, ba_.size()));
  out.betti_b.assign(bb_.begin(), bb_.begin() + std::min(n, bb_.size()));
  return out;
}

// ---- serialization

namespace {

Json map_to_json(const ModuleMap& f) {
  const auto& c = *f.source()->category();
  Json j = Json::object();
  for (Obj o = 0; o < c.num_objects(); ++o) j[c.object_name(o)] = matrix_to_json(f.at(o));
  return j;
}

ModuleMap map_from_json(const Json& j, ModulePtr src, ModulePtr tgt) {
  const auto& c = *src->category();
  std::vector<Matrix> comp;
  for (Obj o = 0; o < c.num_objects(); ++o) {
    const auto& name = c.object_name(o);
    if (!j.contains(name)) {
      if (src->dim(o) == 0 || tgt->dim(o) == 0) {
        comp.emplace_back(src->prime(), tgt->dim(o), src->dim(o));
        continue;
      }
      throw ParseError("map misses object '" + name + "'");
    }
    comp.push_back(matrix_from_json(j.at(name), src->prime(), tgt->dim(o), src->dim(o)));
  }
  try {
    return ModuleMap(std::move(src), std::move(tgt), std::move(comp));
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("map: ") + e.what());
  }
}

}  // namespace

Json report_to_json(const AxiomReport& r) {
  Json j;
  j["length"] = r.length;
  j["complete"] = r.complete;
  j["all_pass"] = r.all_pass();
  j["verdicts"] = Json::array();
  for (const auto& v : r.verdicts) {
    Json e{{"axiom", to_string(v.axiom)}, {"degree", v.degree}, {"pass", v.pass}};
    if (v.witness)
      e["witness"] = {{"degree", v.witness->degree},
                      {"object", v.witness->object},
                      {"morphism", v.witness->morphism},
                      {"vector", v.witness->vector},
                      {"detail", v.witness->detail}};
    j["verdicts"].push_back(std::move(e));
  }
  return j;
}

Json complex_to_json(const ChainComplex& c) {
  Json j;
  j["terms"] = Json::array();
  for (const auto& t : c.terms) j["terms"].push_back(module_to_json(*t));
  j["boundaries"] = Json::array();
  for (const auto& d : c.boundaries) j["boundaries"].push_back(map_to_json(d));
  if (c.augmentation)
    j["augmentation"] = {{"target", module_to_json(*c.augmentation->target())},
                         {"map", map_to_json(*c.augmentation)}};
  return j;
}

Json resolution_to_json(const OmegaSystem& sys, const OmegaResolutionState& st) {
  const auto& src = *sys.source();
  Json j;
  j["format"] = "omegares.resolution";
  j["version"] = kComplexFormatVersion;
  j["prime"] = sys.prime();
  j["backend"] = sys.backend() == Backend::Group ? "group" : "bijective";
  j["length"] = st.length();
  j["dimensions"] = Json::array();
  for (const auto& t : st.complex().terms) j["dimensions"].push_back(t->total_dim());
  j["generators"] = Json::array();
  for (const auto& f : st.resolution.free) {
    Json g = Json::array();
    for (Obj o : f.generators) g.push_back(src.object_name(o));
    j["generators"].push_back(std::move(g));
  }
  j["betti"] = st.betti();
  j["steps"] = Json::array();
  for (const auto& s : st.steps)
    j["steps"].push_back({{"degree", s.degree},
                          {"cycles", s.cycles_dim},
                          {"pushed_cycles", s.pushed_cycles_dim},
                          {"splitting_rank", s.splitting_rank},
                          {"homology", s.homology_dim},
                          {"pushed_homology", s.pushed_homology_dim},
                          {"consistent", s.consistent},
                          {"new_generators", s.new_generators}});
  j["complex"] = complex_to_json(st.complex());
  if (st.certificate) j["certificate"] = report_to_json(*st.certificate);
  return j;
}

ChainComplex complex_from_json(const Json& doc, CategoryPtr cat, std::uint32_t p, std::vector<FreeModule>* free) {
  try {
    if (doc.contains("version") && doc.at("version").get<int>() != kComplexFormatVersion)
      throw ParseError("unsupported complex format version");
    const Json& j = doc.contains("complex") ? doc.at("complex") : doc;
    ChainComplex c;
    for (const auto& t : j.at("terms")) c.terms.push_back(share(module_from_json(t, cat, p)));
    if (c.terms.empty()) throw ParseError("complex has no terms");
    const auto& bs = j.at("boundaries");
    if (bs.size() + 1 != c.terms.size()) throw ParseError("complex needs one boundary per positive degree");
    for (std::size_t n = 1; n < c.terms.size(); ++n) c.boundaries.push_back(map_from_json(bs[n - 1], c.terms[n], c.terms[n - 1]));
    if (j.contains("augmentation")) {
      auto x = share(module_from_json(j.at("augmentation").at("target"), cat, p));
      c.augmentation = map_from_json(j.at("augmentation").at("map"), c.terms[0], x);
    }
    if (free && doc.contains("generators")) {
      free->clear();
      for (const auto& g : doc.at("generators")) {
        std::vector<Obj> objs;
        for (const auto& name : g) {
          auto o = cat->find_object(name.get<std::string>());
          if (!o) throw ParseError("generator at unknown object");
          objs.push_back(*o);
        }
        if (free->size() >= c.terms.size()) throw ParseError("more generator lists than terms");
        free->push_back(free_sum(cat, objs, p));
        if (free->back().module->dims() != c.terms[free->size() - 1]->dims())
          throw ParseError("generators do not match the term dimensions");
      }
    }
    return c;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("complex: ") + e.what());
  }
}

}  // namespace omegares
