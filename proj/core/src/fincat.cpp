#include "omegares/fincat.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <random>
#include <sstream>

namespace omegares {

namespace {

std::string mor_label(const FinCategory& c, Mor f) { return "'" + c.morphism(f).name + "'"; }

Matrix basis_columns(const Subspace& s) { return s.basis().transpose(); }

// matrix of v -> coordinates of v modulo s, on the complement columns
Matrix quotient_matrix(const Subspace& s) {
  const std::size_t n = s.ambient_dim();
  auto comp = s.complement_columns();
  Matrix q(s.prime(), comp.size(), n);
  Vec e(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1;
    Vec c = s.quotient_coordinates(e);
    for (std::size_t i = 0; i < comp.size(); ++i) q(i, j) = c[i];
    e[j] = 0;
  }
  return q;
}

void require_same(const ModulePtr& a, const ModulePtr& b, const char* what) {
  if (a->prime() != b->prime() || !same_category(a->category(), b->category()) || a->dims() != b->dims())
    throw ModuleError(std::string(what) + ": modules do not match");
}

}  // namespace

// ---- categories

FinCategory::FinCategory(std::vector<std::string> objects, std::vector<MorphismRecord> morphisms,
                         std::vector<Mor> identities, const std::vector<std::array<Mor, 3>>& compositions)
    : objects_(std::move(objects)), morphisms_(std::move(morphisms)), identities_(std::move(identities)) {
  const std::size_t n = objects_.size(), m = morphisms_.size();
  if (n == 0) throw CategoryError("category has no objects");
  if (identities_.size() != n) throw CategoryError("need one identity per object");
  for (auto& r : morphisms_) {
    if (r.src >= n || r.tgt >= n) throw CategoryError("morphism '" + r.name + "' has an unknown endpoint");
    src_tgt_.emplace_back(r.src, r.tgt);
  }
  for (Obj c = 0; c < n; ++c) {
    Mor i = identities_[c];
    if (i >= m || src(i) != c || tgt(i) != c)
      throw CategoryError("identity of object '" + objects_[c] + "' is not an endomorphism of it");
  }
  table_.assign(m * m, -1);
  auto set = [&](Mor g, Mor f, Mor gf) {
    if (g >= m || f >= m || gf >= m) throw CategoryError("composition refers to an unknown morphism");
    if (tgt(f) != src(g)) throw CategoryError("composition of non-composable " + mor_label(*this, g) + " and " +
                                              mor_label(*this, f));
    if (src(gf) != src(f) || tgt(gf) != tgt(g))
      throw CategoryError("composite of " + mor_label(*this, g) + " and " + mor_label(*this, f) +
                          " has the wrong endpoints");
    auto& slot = table_[g * m + f];
    if (slot >= 0 && slot != static_cast<std::int64_t>(gf))
      throw CategoryError("conflicting composites for " + mor_label(*this, g) + " o " + mor_label(*this, f));
    slot = gf;
  };
  for (Mor f = 0; f < m; ++f) {
    set(identities_[tgt(f)], f, f);
    set(f, identities_[src(f)], f);
  }
  for (auto& t : compositions) set(t[0], t[1], t[2]);
  for (Mor g = 0; g < m; ++g)
    for (Mor f = 0; f < m; ++f)
      if (tgt(f) == src(g) && table_[g * m + f] < 0)
        throw CategoryError("missing composite " + mor_label(*this, g) + " o " + mor_label(*this, f));
  for (Mor h = 0; h < m; ++h)
    for (Mor g = 0; g < m; ++g) {
      if (tgt(g) != src(h)) continue;
      Mor hg = compose(h, g);
      for (Mor f = 0; f < m; ++f) {
        if (tgt(f) != src(g)) continue;
        if (compose(hg, f) != compose(h, compose(g, f)))
          throw CategoryError("composition is not associative at " + mor_label(*this, h) + ", " +
                              mor_label(*this, g) + ", " + mor_label(*this, f));
      }
    }
  hom_.assign(n * n, {});
  hom_index_.assign(m, 0);
  for (Mor f = 0; f < m; ++f) {
    auto& list = hom_[src(f) * n + tgt(f)];
    hom_index_[f] = list.size();
    list.push_back(f);
  }
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (Mor f = 0; f < m; ++f) parent[find(src(f))] = find(tgt(f));
  connected_ = true;
  for (Obj c = 0; c < n; ++c) connected_ = connected_ && find(c) == find(0);
}

Mor FinCategory::compose(Mor g, Mor f) const {
  auto v = table_[g * morphisms_.size() + f];
  if (v < 0) throw CategoryError("morphisms " + mor_label(*this, g) + " and " + mor_label(*this, f) +
                                 " are not composable");
  return static_cast<Mor>(v);
}

std::optional<Obj> FinCategory::find_object(const std::string& name) const {
  for (Obj c = 0; c < objects_.size(); ++c)
    if (objects_[c] == name) return c;
  return std::nullopt;
}

std::optional<Mor> FinCategory::find_morphism(const std::string& name) const {
  for (Mor f = 0; f < morphisms_.size(); ++f)
    if (morphisms_[f].name == name) return f;
  return std::nullopt;
}

bool FinCategory::is_automorphism(Mor f) const {
  if (src(f) != tgt(f)) return false;
  for (Mor g : hom(tgt(f), src(f)))
    if (is_identity(compose(g, f)) && is_identity(compose(f, g))) return true;
  return false;
}

CategoryPtr make_category(FinCategory c) { return std::make_shared<const FinCategory>(std::move(c)); }

CategoryPtr category_of_group(const FinGroup& g) {
  const std::size_t n = g.order();
  std::vector<MorphismRecord> mors;
  for (Elem a = 0; a < n; ++a) mors.push_back({"g" + std::to_string(a), 0, 0});
  std::vector<std::array<Mor, 3>> comp;
  comp.reserve(n * n);
  for (Elem a = 0; a < n; ++a)
    for (Elem b = 0; b < n; ++b) comp.push_back({a, b, g.mul(a, b)});
  return make_category(FinCategory({"*"}, std::move(mors), {g.identity()}, comp));
}

CategoryPtr poset_chain(std::size_t n) {
  std::vector<std::string> objs;
  for (std::size_t i = 0; i < n; ++i) objs.push_back(std::to_string(i));
  std::vector<MorphismRecord> mors;
  std::vector<std::vector<Mor>> id(n, std::vector<Mor>(n, 0));
  std::vector<Mor> ids(n);
  for (Obj i = 0; i < n; ++i)
    for (Obj j = i; j < n; ++j) {
      id[i][j] = static_cast<Mor>(mors.size());
      mors.push_back({std::to_string(i) + "<=" + std::to_string(j), i, j});
      if (i == j) ids[i] = id[i][j];
    }
  std::vector<std::array<Mor, 3>> comp;
  for (Obj i = 0; i < n; ++i)
    for (Obj j = i; j < n; ++j)
      for (Obj k = j; k < n; ++k) comp.push_back({id[j][k], id[i][j], id[i][k]});
  return make_category(FinCategory(std::move(objs), std::move(mors), ids, comp));
}

CatFunctor::CatFunctor(CategoryPtr source, CategoryPtr target, std::vector<Obj> object_map,
                       std::vector<Mor> morphism_map)
    : source_(std::move(source)),
      target_(std::move(target)),
      object_map_(std::move(object_map)),
      morphism_map_(std::move(morphism_map)) {
  const auto& s = *source_;
  const auto& t = *target_;
  if (object_map_.size() != s.num_objects() || morphism_map_.size() != s.num_morphisms())
    throw CategoryError("functor maps have the wrong size");
  for (Obj o : object_map_)
    if (o >= t.num_objects()) throw CategoryError("functor sends an object outside the target");
  for (Mor f = 0; f < s.num_morphisms(); ++f) {
    Mor g = morphism_map_[f];
    if (g >= t.num_morphisms() || t.src(g) != object_map_[s.src(f)] || t.tgt(g) != object_map_[s.tgt(f)])
      throw CategoryError("functor is incompatible with the endpoints of " + mor_label(s, f));
  }
  for (Obj c = 0; c < s.num_objects(); ++c)
    if (morphism_map_[s.identity(c)] != t.identity(object_map_[c]))
      throw CategoryError("functor does not preserve the identity of '" + s.object_name(c) + "'");
  for (Mor g = 0; g < s.num_morphisms(); ++g)
    for (Mor f = 0; f < s.num_morphisms(); ++f)
      if (s.tgt(f) == s.src(g) && morphism_map_[s.compose(g, f)] != t.compose(morphism_map_[g], morphism_map_[f]))
        throw CategoryError("functor does not preserve the composite " + mor_label(s, g) + " o " + mor_label(s, f));
}

CatFunctor functor_of_homomorphism(CategoryPtr source, CategoryPtr target, const std::vector<Elem>& map) {
  return CatFunctor(std::move(source), std::move(target), {0}, std::vector<Mor>(map.begin(), map.end()));
}

// ---- modules

CatModule::CatModule(CategoryPtr cat, std::uint32_t p, std::vector<std::size_t> dims, std::vector<Matrix> action,
                     bool verify)
    : cat_(std::move(cat)), p_(p), dims_(std::move(dims)), action_(std::move(action)) {
  if (!cat_) throw ModuleError("module without a category");
  if (!is_prime(p_)) throw ModuleError("coefficient characteristic " + std::to_string(p_) + " is not prime");
  if (dims_.size() != cat_->num_objects() || action_.size() != cat_->num_morphisms())
    throw ModuleError("module data does not match the category");
  for (Mor f = 0; f < action_.size(); ++f) {
    const auto& a = action_[f];
    if (a.prime() != p_ || a.rows() != dims_[cat_->tgt(f)] || a.cols() != dims_[cat_->src(f)])
      throw ModuleError("matrix of " + mor_label(*cat_, f) + " has the wrong shape");
  }
  if (verify && !is_functorial()) throw ModuleError("module assignment is not functorial");
}

CatModule CatModule::zero(CategoryPtr cat, std::uint32_t p) { return constant(std::move(cat), p, 0); }

CatModule CatModule::constant(CategoryPtr cat, std::uint32_t p, std::size_t dim) {
  std::vector<Matrix> act(cat->num_morphisms(), Matrix::identity(p, dim));
  std::vector<std::size_t> dims(cat->num_objects(), dim);
  return CatModule(std::move(cat), p, std::move(dims), std::move(act), false);
}

std::size_t CatModule::total_dim() const { return std::accumulate(dims_.begin(), dims_.end(), std::size_t{0}); }

bool CatModule::is_functorial() const {
  const auto& c = *cat_;
  for (Obj o = 0; o < c.num_objects(); ++o)
    if (!action_[c.identity(o)].is_identity()) return false;
  for (Mor g = 0; g < c.num_morphisms(); ++g)
    for (Mor f = 0; f < c.num_morphisms(); ++f)
      if (c.tgt(f) == c.src(g) && !c.is_identity(f) && !c.is_identity(g) &&
          !(action_[g] * action_[f] == action_[c.compose(g, f)]))
        return false;
  return true;
}

ModulePtr share(CatModule m) { return std::make_shared<const CatModule>(std::move(m)); }

bool same_category(const CategoryPtr& a, const CategoryPtr& b) { return a == b || (a && b && *a == *b); }

ModuleMap::ModuleMap(ModulePtr source, ModulePtr target, std::vector<Matrix> components, bool verify)
    : source_(std::move(source)), target_(std::move(target)), comp_(std::move(components)) {
  if (!source_ || !target_) throw ModuleError("map without endpoints");
  if (!same_category(source_->category(), target_->category()) || source_->prime() != target_->prime())
    throw ModuleError("map between modules over different categories or fields");
  const auto& c = *source_->category();
  if (comp_.size() != c.num_objects()) throw ModuleError("map needs one component per object");
  for (Obj o = 0; o < c.num_objects(); ++o)
    if (comp_[o].rows() != target_->dim(o) || comp_[o].cols() != source_->dim(o))
      throw ModuleError("component at '" + c.object_name(o) + "' has the wrong shape");
  if (verify && !is_natural()) throw ModuleError("map is not natural");
}

ModuleMap ModuleMap::identity(ModulePtr m) {
  std::vector<Matrix> comp;
  for (Obj o = 0; o < m->dims().size(); ++o) comp.push_back(Matrix::identity(m->prime(), m->dim(o)));
  return ModuleMap(m, m, std::move(comp), false);
}

ModuleMap ModuleMap::zero(ModulePtr source, ModulePtr target) {
  std::vector<Matrix> comp;
  for (Obj o = 0; o < source->dims().size(); ++o) comp.emplace_back(source->prime(), target->dim(o), source->dim(o));
  return ModuleMap(std::move(source), std::move(target), std::move(comp), false);
}

bool ModuleMap::is_natural() const {
  const auto& c = *source_->category();
  for (Mor f = 0; f < c.num_morphisms(); ++f) {
    if (c.is_identity(f)) continue;
    if (!(target_->action(f) * comp_[c.src(f)] == comp_[c.tgt(f)] * source_->action(f))) return false;
  }
  return true;
}

bool ModuleMap::is_zero() const {
  return std::all_of(comp_.begin(), comp_.end(), [](const Matrix& m) { return m.is_zero(); });
}

bool ModuleMap::is_injective() const {
  return std::all_of(comp_.begin(), comp_.end(), [](const Matrix& m) { return rank(m) == m.cols(); });
}

bool ModuleMap::is_surjective() const {
  return std::all_of(comp_.begin(), comp_.end(), [](const Matrix& m) { return rank(m) == m.rows(); });
}

bool ModuleMap::is_iso() const {
  return std::all_of(comp_.begin(), comp_.end(),
                     [](const Matrix& m) { return m.is_square() && rank(m) == m.rows(); });
}

ModuleMap ModuleMap::operator+(const ModuleMap& o) const {
  require_same(source_, o.source_, "sum of maps");
  require_same(target_, o.target_, "sum of maps");
  std::vector<Matrix> comp;
  for (std::size_t i = 0; i < comp_.size(); ++i) comp.push_back(comp_[i] + o.comp_[i]);
  return ModuleMap(source_, target_, std::move(comp), false);
}

ModuleMap ModuleMap::operator-(const ModuleMap& o) const {
  require_same(source_, o.source_, "difference of maps");
  require_same(target_, o.target_, "difference of maps");
  std::vector<Matrix> comp;
  for (std::size_t i = 0; i < comp_.size(); ++i) comp.push_back(comp_[i] - o.comp_[i]);
  return ModuleMap(source_, target_, std::move(comp), false);
}

ModuleMap ModuleMap::scaled(Residue c) const {
  std::vector<Matrix> comp;
  for (auto& m : comp_) comp.push_back(m.scaled(c));
  return ModuleMap(source_, target_, std::move(comp), false);
}

ModuleMap compose(const ModuleMap& g, const ModuleMap& f) {
  require_same(f.target(), g.source(), "composition of maps");
  std::vector<Matrix> comp;
  for (std::size_t i = 0; i < f.components().size(); ++i) comp.push_back(g.at(i) * f.at(i));
  return ModuleMap(f.source(), g.target(), std::move(comp), false);
}

bool operator==(const ModuleMap& a, const ModuleMap& b) {
  return a.source()->dims() == b.source()->dims() && a.target()->dims() == b.target()->dims() &&
         a.components() == b.components();
}

// ---- free modules

CatModule free_module(CategoryPtr cat, Obj c, std::uint32_t p) {
  return CatModule(*free_sum(std::move(cat), {c}, p).module);
}

std::size_t FreeModule::basis_index(std::size_t i, Mor f) const {
  const auto& cat = *module->category();
  return offsets[i][cat.tgt(f)] + cat.hom_index(f);
}

FreeModule free_sum(CategoryPtr cat, std::vector<Obj> generators, std::uint32_t p) {
  const auto& c = *cat;
  const std::size_t n = c.num_objects();
  FreeModule out;
  out.generators = std::move(generators);
  std::vector<std::size_t> dims(n, 0);
  out.offsets.assign(out.generators.size(), std::vector<std::size_t>(n, 0));
  for (Obj d = 0; d < n; ++d)
    for (std::size_t i = 0; i < out.generators.size(); ++i) {
      if (out.generators[i] >= n) throw ModuleError("free generator at an unknown object");
      out.offsets[i][d] = dims[d];
      dims[d] += c.hom(out.generators[i], d).size();
    }
  std::vector<Matrix> act;
  act.reserve(c.num_morphisms());
  for (Mor phi = 0; phi < c.num_morphisms(); ++phi) {
    Obj d = c.src(phi), e = c.tgt(phi);
    Matrix a(p, dims[e], dims[d]);
    for (std::size_t i = 0; i < out.generators.size(); ++i)
      for (Mor psi : c.hom(out.generators[i], d)) {
        Mor comp = c.compose(phi, psi);
        a(out.offsets[i][e] + c.hom_index(comp), out.offsets[i][d] + c.hom_index(psi)) = 1;
      }
    act.push_back(std::move(a));
  }
  out.module = share(CatModule(cat, p, std::move(dims), std::move(act), false));
  return out;
}

ModuleMap map_from_free(const FreeModule& f, ModulePtr target, const std::vector<Vec>& elements) {
  const auto& c = *f.module->category();
  if (elements.size() != f.rank()) throw ModuleError("need one image per free generator");
  std::vector<Matrix> comp;
  for (Obj d = 0; d < c.num_objects(); ++d) comp.emplace_back(target->prime(), target->dim(d), f.module->dim(d));
  PrimeField k(target->prime());
  for (std::size_t i = 0; i < f.rank(); ++i) {
    Obj ci = f.generators[i];
    if (elements[i].size() != target->dim(ci)) throw ModuleError("generator image has the wrong length");
    // images of resolutions are sparse, so only walk the nonzero coordinates
    std::vector<std::size_t> nz;
    for (std::size_t j = 0; j < elements[i].size(); ++j)
      if (elements[i][j]) nz.push_back(j);
    for (Obj d = 0; d < c.num_objects(); ++d)
      for (Mor psi : c.hom(ci, d)) {
        const Matrix& a = target->action(psi);
        std::size_t col = f.offsets[i][d] + c.hom_index(psi);
        for (std::size_t r = 0; r < a.rows(); ++r) {
          Residue acc = 0;
          for (std::size_t j : nz) acc = k.add(acc, k.mul(a(r, j), elements[i][j]));
          comp[d](r, col) = acc;
        }
      }
  }
  return ModuleMap(f.module, std::move(target), std::move(comp), false);
}

Vec generator_image(const FreeModule& f, const ModuleMap& m, std::size_t i) {
  const auto& c = *f.module->category();
  Obj ci = f.generators[i];
  return m.at(ci).col(f.basis_index(i, c.identity(ci)));
}

std::optional<ModuleMap> find_isomorphism(ModulePtr m, ModulePtr n, std::uint64_t seed, int attempts) {
  if (m->dims() != n->dims()) return std::nullopt;
  if (m->is_zero()) return ModuleMap::zero(m, n);
  auto basis = hom_basis(m, n);
  for (auto& f : basis)
    if (f.is_iso()) return f;
  if (basis.empty()) return std::nullopt;
  std::mt19937_64 rng(seed);
  const std::uint32_t p = m->prime();
  for (int t = 0; t < attempts; ++t) {
    ModuleMap f = ModuleMap::zero(m, n);
    for (auto& b : basis) f = f + b.scaled(static_cast<Residue>(rng() % p));
    if (f.is_iso()) return f;
  }
  return std::nullopt;
}

CatModule tensor(const CatModule& m, const CatModule& n) {
  if (!same_category(m.category(), n.category())) throw ModuleError("tensor of modules over different categories");
  if (m.prime() != n.prime()) throw ModuleError("tensor of modules over different fields");
  const auto& c = *m.category();
  const std::uint32_t p = m.prime();
  PrimeField k(p);
  std::vector<std::size_t> dims;
  for (Obj o = 0; o < c.num_objects(); ++o) dims.push_back(m.dim(o) * n.dim(o));
  std::vector<Matrix> act;
  for (Mor f = 0; f < c.num_morphisms(); ++f) {
    const Matrix& a = m.action(f);
    const Matrix& b = n.action(f);
    Matrix kr(p, a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j) {
        Residue x = a(i, j);
        if (!x) continue;
        for (std::size_t r = 0; r < b.rows(); ++r)
          for (std::size_t s = 0; s < b.cols(); ++s) kr(i * b.rows() + r, j * b.cols() + s) = k.mul(x, b(r, s));
      }
    act.push_back(std::move(kr));
  }
  return CatModule(m.category(), p, std::move(dims), std::move(act), false);
}

// ---- module calculus

SubmoduleResult submodule(ModulePtr m, const ObjectSubspaces& s) {
  const auto& c = *m->category();
  std::vector<std::size_t> dims;
  std::vector<Matrix> incl;
  for (Obj o = 0; o < c.num_objects(); ++o) {
    dims.push_back(s[o].dim());
    incl.push_back(basis_columns(s[o]));
  }
  std::vector<Matrix> act;
  for (Mor f = 0; f < c.num_morphisms(); ++f) {
    Obj a = c.src(f), b = c.tgt(f);
    Matrix r(m->prime(), dims[b], dims[a]);
    for (std::size_t j = 0; j < dims[a]; ++j) {
      Vec v = m->action(f).apply(s[a].basis().row(j));
      if (!s[b].contains(v)) throw ModuleError("subspaces are not closed under the action");
      Vec co = s[b].coordinates(v);
      for (std::size_t i = 0; i < co.size(); ++i) r(i, j) = co[i];
    }
    act.push_back(std::move(r));
  }
  auto sub = share(CatModule(m->category(), m->prime(), std::move(dims), std::move(act), false));
  return {sub, ModuleMap(sub, m, std::move(incl), false)};
}

QuotientResult quotient_module(ModulePtr m, const ObjectSubspaces& s) {
  const auto& c = *m->category();
  std::vector<std::size_t> dims;
  std::vector<Matrix> proj;
  std::vector<Matrix> section;
  for (Obj o = 0; o < c.num_objects(); ++o) {
    auto comp = s[o].complement_columns();
    dims.push_back(comp.size());
    proj.push_back(quotient_matrix(s[o]));
    Matrix sec(m->prime(), m->dim(o), comp.size());
    for (std::size_t j = 0; j < comp.size(); ++j) sec(comp[j], j) = 1;
    section.push_back(std::move(sec));
  }
  std::vector<Matrix> act;
  for (Mor f = 0; f < c.num_morphisms(); ++f) act.push_back(proj[c.tgt(f)] * m->action(f) * section[c.src(f)]);
  auto q = share(CatModule(m->category(), m->prime(), std::move(dims), std::move(act), false));
  return {q, ModuleMap(m, q, std::move(proj), false)};
}

SubmoduleResult kernel(const ModuleMap& f) {
  ObjectSubspaces s;
  for (auto& m : f.components()) s.push_back(kernel_basis(m));
  return submodule(f.source(), s);
}

ObjectSubspaces image_subspaces(const ModuleMap& f) {
  ObjectSubspaces s;
  for (auto& m : f.components()) s.push_back(image_basis(m));
  return s;
}

ImageResult image(const ModuleMap& f) {
  auto s = image_subspaces(f);
  auto sub = submodule(f.target(), s);
  std::vector<Matrix> co;
  for (Obj o = 0; o < s.size(); ++o) {
    const Matrix& fo = f.at(o);
    Matrix r(fo.prime(), s[o].dim(), fo.cols());
    for (std::size_t j = 0; j < fo.cols(); ++j) {
      Vec c = s[o].coordinates(fo.col(j));
      for (std::size_t i = 0; i < c.size(); ++i) r(i, j) = c[i];
    }
    co.push_back(std::move(r));
  }
  return {sub.module, sub.inclusion, ModuleMap(f.source(), sub.module, std::move(co), false)};
}

QuotientResult cokernel(const ModuleMap& f) { return quotient_module(f.target(), image_subspaces(f)); }

ObjectSubspaces submodule_generated(const CatModule& m, const std::vector<std::vector<Vec>>& vectors) {
  const auto& c = *m.category();
  std::vector<std::vector<Vec>> acc(c.num_objects());
  for (Obj a = 0; a < c.num_objects() && a < vectors.size(); ++a)
    for (const Vec& v : vectors[a])
      for (Obj b = 0; b < c.num_objects(); ++b)
        for (Mor f : c.hom(a, b)) acc[b].push_back(m.action(f).apply(v));
  ObjectSubspaces out;
  for (Obj b = 0; b < c.num_objects(); ++b) out.push_back(Subspace::span(m.prime(), m.dim(b), acc[b]));
  return out;
}

bool is_submodule(const CatModule& m, const ObjectSubspaces& s) {
  const auto& c = *m.category();
  for (Mor f = 0; f < c.num_morphisms(); ++f) {
    const auto& a = s[c.src(f)];
    for (std::size_t j = 0; j < a.dim(); ++j)
      if (!s[c.tgt(f)].contains(m.action(f).apply(a.basis().row(j)))) return false;
  }
  return true;
}

DirectSum direct_sum(const std::vector<ModulePtr>& parts) {
  if (parts.empty()) throw ModuleError("direct sum of nothing");
  const auto& cat = parts[0]->category();
  const std::uint32_t p = parts[0]->prime();
  const std::size_t n = cat->num_objects();
  for (auto& q : parts)
    if (!same_category(q->category(), cat) || q->prime() != p) throw ModuleError("direct sum of mismatched modules");
  std::vector<std::size_t> dims(n, 0);
  std::vector<std::vector<std::size_t>> off(parts.size(), std::vector<std::size_t>(n));
  for (std::size_t k = 0; k < parts.size(); ++k)
    for (Obj o = 0; o < n; ++o) {
      off[k][o] = dims[o];
      dims[o] += parts[k]->dim(o);
    }
  std::vector<Matrix> act;
  for (Mor f = 0; f < cat->num_morphisms(); ++f) {
    Matrix a(p, dims[cat->tgt(f)], dims[cat->src(f)]);
    for (std::size_t k = 0; k < parts.size(); ++k) a.set_block(off[k][cat->tgt(f)], off[k][cat->src(f)], parts[k]->action(f));
    act.push_back(std::move(a));
  }
  DirectSum out;
  out.module = share(CatModule(cat, p, dims, std::move(act), false));
  for (std::size_t k = 0; k < parts.size(); ++k) {
    std::vector<Matrix> in, pr;
    for (Obj o = 0; o < n; ++o) {
      Matrix i(p, dims[o], parts[k]->dim(o));
      i.set_block(off[k][o], 0, Matrix::identity(p, parts[k]->dim(o)));
      pr.push_back(i.transpose());
      in.push_back(std::move(i));
    }
    out.inclusions.emplace_back(parts[k], out.module, std::move(in), false);
    out.projections.emplace_back(out.module, parts[k], std::move(pr), false);
  }
  return out;
}

ObjectSubspaces preimage(const ModuleMap& f, const ObjectSubspaces& s) {
  ObjectSubspaces out;
  for (Obj o = 0; o < s.size(); ++o) out.push_back(kernel_basis(quotient_matrix(s[o]) * f.at(o)));
  return out;
}

std::vector<ModuleMap> hom_basis(ModulePtr m, ModulePtr n) {
  if (!same_category(m->category(), n->category()) || m->prime() != n->prime())
    throw ModuleError("hom between modules over different categories");
  const auto& c = *m->category();
  const std::uint32_t p = m->prime();
  PrimeField k(p);
  const std::size_t no = c.num_objects();
  std::vector<std::size_t> off(no + 1, 0);
  for (Obj o = 0; o < no; ++o) off[o + 1] = off[o] + n->dim(o) * m->dim(o);
  // variable X_o(i, j) lives at off[o] + i * dim m(o) + j
  auto var = [&](Obj o, std::size_t i, std::size_t j) { return off[o] + i * m->dim(o) + j; };
  std::size_t rows = 0;
  for (Mor f = 0; f < c.num_morphisms(); ++f)
    if (!c.is_identity(f)) rows += n->dim(c.tgt(f)) * m->dim(c.src(f));
  Matrix sys(p, rows, off[no]);
  std::size_t r = 0;
  for (Mor f = 0; f < c.num_morphisms(); ++f) {
    if (c.is_identity(f)) continue;
    Obj a = c.src(f), b = c.tgt(f);
    const Matrix& nf = n->action(f);
    const Matrix& mf = m->action(f);
    // (N(f) X_a - X_b M(f))(i, j) = 0
    for (std::size_t i = 0; i < n->dim(b); ++i)
      for (std::size_t j = 0; j < m->dim(a); ++j, ++r) {
        for (std::size_t t = 0; t < n->dim(a); ++t)
          if (nf(i, t)) sys(r, var(a, t, j)) = k.add(sys(r, var(a, t, j)), nf(i, t));
        for (std::size_t t = 0; t < m->dim(b); ++t)
          if (mf(t, j)) sys(r, var(b, i, t)) = k.sub(sys(r, var(b, i, t)), mf(t, j));
      }
  }
  Subspace ker = kernel_basis(sys);
  std::vector<ModuleMap> out;
  for (std::size_t v = 0; v < ker.dim(); ++v) {
    auto x = ker.basis().row(v);
    std::vector<Matrix> comp;
    for (Obj o = 0; o < no; ++o) {
      Matrix xo(p, n->dim(o), m->dim(o));
      for (std::size_t i = 0; i < n->dim(o); ++i)
        for (std::size_t j = 0; j < m->dim(o); ++j) xo(i, j) = x[var(o, i, j)];
      comp.push_back(std::move(xo));
    }
    out.emplace_back(m, n, std::move(comp), false);
  }
  return out;
}

// ---- covers and projectivity

std::vector<std::pair<Obj, Vec>> choose_generators(const CatModule& m, const ObjectSubspaces& within) {
  const auto& c = *m.category();
  const std::size_t no = c.num_objects();
  // radical-like part of `within`: images of non-invertible maps and of (g - 1) for automorphisms
  std::vector<std::vector<Vec>> rad(no);
  PrimeField k(m.prime());
  for (Mor f = 0; f < c.num_morphisms(); ++f) {
    if (c.is_identity(f)) continue;
    const auto& w = within[c.src(f)];
    bool aut = c.is_automorphism(f);
    for (std::size_t j = 0; j < w.dim(); ++j) {
      Vec v = m.action(f).apply(w.basis().row(j));
      if (aut)
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = k.sub(v[i], w.basis()(j, i));
      rad[c.tgt(f)].push_back(std::move(v));
    }
  }
  std::vector<std::pair<Obj, Vec>> gens;
  std::vector<std::vector<Vec>> gen_vecs(no);
  ObjectSubspaces generated;
  for (Obj o = 0; o < no; ++o) generated.emplace_back(m.prime(), m.dim(o));
  auto add = [&](Obj o, const Vec& v) {
    gens.emplace_back(o, v);
    gen_vecs.assign(no, {});
    gen_vecs[o].push_back(v);
    auto extra = submodule_generated(m, gen_vecs);
    for (Obj d = 0; d < no; ++d)
      if (extra[d].dim()) generated[d] = sum(generated[d], extra[d]);
  };
  for (Obj o = 0; o < no; ++o) {
    Subspace r = Subspace::span(m.prime(), m.dim(o), rad[o]);
    for (std::size_t j = 0; j < within[o].dim(); ++j) {
      Vec v = within[o].vector(j);
      if (r.contains(v) || generated[o].contains(v)) continue;
      add(o, v);
    }
  }
  for (Obj o = 0; o < no; ++o)
    for (std::size_t j = 0; j < within[o].dim(); ++j) {
      Vec v = within[o].vector(j);
      if (!generated[o].contains(v)) add(o, v);
    }
  return gens;
}

FreeCover free_cover_of(ModulePtr m, const ObjectSubspaces& within) {
  auto gens = choose_generators(*m, within);
  std::vector<Obj> objs;
  std::vector<Vec> images;
  for (auto& [o, v] : gens) {
    objs.push_back(o);
    images.push_back(v);
  }
  FreeCover out;
  out.free = free_sum(m->category(), objs, m->prime());
  out.cover = map_from_free(out.free, m, images);
  return out;
}

FreeCover free_cover(ModulePtr m) {
  ObjectSubspaces whole;
  for (Obj o = 0; o < m->dims().size(); ++o) whole.push_back(Subspace::whole(m->prime(), m->dim(o)));
  return free_cover_of(std::move(m), whole);
}

bool is_free_on(const FreeModule& f, const ModuleMap& to_m) {
  return to_m.source()->dims() == f.module->dims() && to_m.is_iso();
}

std::optional<ModuleMap> right_inverse(const ModuleMap& epi, std::uint64_t seed) {
  // unknown natural X : N -> M with epi o X = id_N, one block X_o per object
  const ModulePtr& m = epi.source();
  const ModulePtr& n = epi.target();
  const auto& c = *m->category();
  const std::uint32_t p = m->prime();
  PrimeField k(p);
  const std::size_t no = c.num_objects();
  std::vector<std::size_t> off(no + 1, 0);
  for (Obj o = 0; o < no; ++o) off[o + 1] = off[o] + m->dim(o) * n->dim(o);
  auto var = [&](Obj o, std::size_t i, std::size_t j) { return off[o] + i * n->dim(o) + j; };
  std::size_t rows = 0;
  for (Mor f = 0; f < c.num_morphisms(); ++f)
    if (!c.is_identity(f)) rows += m->dim(c.tgt(f)) * n->dim(c.src(f));
  for (Obj o = 0; o < no; ++o) rows += n->dim(o) * n->dim(o);
  Matrix sys(p, rows, off[no]);
  Vec rhs(rows, 0);
  std::size_t r = 0;
  for (Mor f = 0; f < c.num_morphisms(); ++f) {
    if (c.is_identity(f)) continue;
    Obj a = c.src(f), b = c.tgt(f);
    const Matrix& mf = m->action(f);
    const Matrix& nf = n->action(f);
    // M(f) X_a - X_b N(f) = 0
    for (std::size_t i = 0; i < m->dim(b); ++i)
      for (std::size_t j = 0; j < n->dim(a); ++j, ++r) {
        for (std::size_t t = 0; t < m->dim(a); ++t)
          if (mf(i, t)) sys(r, var(a, t, j)) = k.add(sys(r, var(a, t, j)), mf(i, t));
        for (std::size_t t = 0; t < n->dim(b); ++t)
          if (nf(t, j)) sys(r, var(b, i, t)) = k.sub(sys(r, var(b, i, t)), nf(t, j));
      }
  }
  for (Obj o = 0; o < no; ++o) {
    const Matrix& q = epi.at(o);
    for (std::size_t i = 0; i < n->dim(o); ++i)
      for (std::size_t j = 0; j < n->dim(o); ++j, ++r) {
        for (std::size_t t = 0; t < m->dim(o); ++t)
          if (q(i, t)) sys(r, var(o, t, j)) = k.add(sys(r, var(o, t, j)), q(i, t));
        rhs[r] = i == j ? 1 : 0;
      }
  }
  LinearSolver solver(sys);
  auto x = solver.solve(rhs);
  if (!x) return std::nullopt;
  if (seed != 0 && solver.kernel().dim() > 0) {
    std::mt19937_64 rng(seed);
    const auto& ker = solver.kernel();
    std::vector<Residue> coeff(ker.dim());
    bool any = false;
    for (auto& a : coeff) any = (a = static_cast<Residue>(rng() % p)) || any;
    // a nonzero seed never falls back to the echelon solution
    if (!any) coeff[rng() % coeff.size()] = 1;
    for (std::size_t v = 0; v < ker.dim(); ++v) {
      Residue a = coeff[v];
      if (!a) continue;
      auto row = ker.basis().row(v);
      for (std::size_t t = 0; t < x->size(); ++t) (*x)[t] = k.add((*x)[t], k.mul(a, row[t]));
    }
  }
  std::vector<Matrix> comp;
  for (Obj o = 0; o < no; ++o) {
    Matrix xo(p, m->dim(o), n->dim(o));
    for (std::size_t i = 0; i < m->dim(o); ++i)
      for (std::size_t j = 0; j < n->dim(o); ++j) xo(i, j) = (*x)[var(o, i, j)];
    comp.push_back(std::move(xo));
  }
  return ModuleMap(n, m, std::move(comp), false);
}

bool is_projective(ModulePtr m) {
  if (m->is_zero()) return true;
  FreeCover fc = free_cover(m);
  if (fc.cover.is_iso()) return true;
  return right_inverse(fc.cover).has_value();
}

// ---- constancy and monodromy

bool is_locally_constant(const CatModule& m) {
  for (const auto& a : m.actions())
    if (!a.is_square() || rank(a) != a.rows()) return false;
  return true;
}

namespace {

struct Transport {
  std::vector<Obj> root;   // component root of each object
  std::vector<Matrix> to;  // M(root) -> M(o) along the spanning tree
  std::vector<bool> tree;  // per morphism
};

Transport transport(const CatModule& m, Obj first_root) {
  const auto& c = *m.category();
  const std::size_t no = c.num_objects();
  Transport t;
  t.root.assign(no, no);
  t.to.assign(no, Matrix());
  t.tree.assign(c.num_morphisms(), false);
  std::vector<Obj> order(no);
  std::iota(order.begin(), order.end(), 0);
  std::swap(order[0], order[first_root]);
  for (Obj r : order) {
    if (t.root[r] != no) continue;
    t.root[r] = r;
    t.to[r] = Matrix::identity(m.prime(), m.dim(r));
    std::deque<Obj> q{r};
    while (!q.empty()) {
      Obj a = q.front();
      q.pop_front();
      for (Mor f = 0; f < c.num_morphisms(); ++f) {
        if (c.is_identity(f)) continue;
        if (c.src(f) == a && t.root[c.tgt(f)] == no) {
          Obj b = c.tgt(f);
          t.root[b] = r;
          t.to[b] = m.action(f) * t.to[a];
          t.tree[f] = true;
          q.push_back(b);
        } else if (c.tgt(f) == a && t.root[c.src(f)] == no) {
          Obj b = c.src(f);
          t.root[b] = r;
          t.to[b] = *inverse(m.action(f)) * t.to[a];
          t.tree[f] = true;
          q.push_back(b);
        }
      }
    }
  }
  return t;
}

}  // namespace

std::vector<Matrix> monodromy(const CatModule& m, Obj c0) {
  if (!is_locally_constant(m)) throw NotLocallyConstant("module is not locally constant");
  const auto& c = *m.category();
  Transport t = transport(m, c0);
  std::vector<Matrix> out;
  for (Mor f = 0; f < c.num_morphisms(); ++f) {
    if (c.is_identity(f) || t.root[c.src(f)] != c0) continue;
    out.push_back(*inverse(t.to[c.tgt(f)]) * m.action(f) * t.to[c.src(f)]);
  }
  return out;
}

bool is_essentially_constant(const CatModule& m) {
  if (!is_locally_constant(m)) return false;
  const auto& c = *m.category();
  Transport t = transport(m, 0);
  for (Mor f = 0; f < c.num_morphisms(); ++f) {
    if (c.is_identity(f)) continue;
    if (!(m.action(f) * t.to[c.src(f)] == t.to[c.tgt(f)])) return false;
  }
  return true;
}

CatModule restrict_along(const CatFunctor& f, const CatModule& m) {
  if (!same_category(f.target(), m.category())) throw ModuleError("restriction along a functor into another category");
  const auto& s = *f.source();
  std::vector<std::size_t> dims;
  for (Obj o = 0; o < s.num_objects(); ++o) dims.push_back(m.dim(f.on_object(o)));
  std::vector<Matrix> act;
  for (Mor g = 0; g < s.num_morphisms(); ++g) act.push_back(m.action(f.on_morphism(g)));
  return CatModule(f.source(), m.prime(), std::move(dims), std::move(act), false);
}

// ---- chain complexes

bool ChainComplex::squares_to_zero() const {
  for (std::size_t n = 2; n <= boundaries.size(); ++n)
    if (!compose(d(n - 1), d(n)).is_zero()) return false;
  if (augmentation && !boundaries.empty() && !compose(*augmentation, d(1)).is_zero()) return false;
  return true;
}

ChainComplex ChainComplex::truncated(std::size_t n) const {
  ChainComplex out;
  out.augmentation = augmentation;
  for (std::size_t i = 0; i <= n && i < terms.size(); ++i) out.terms.push_back(terms[i]);
  for (std::size_t i = 1; i < out.terms.size(); ++i) out.boundaries.push_back(d(i));
  return out;
}

HomologyModule homology(const ChainComplex& c, std::size_t n) {
  if (n > c.length()) throw ModuleError("homology degree beyond the complex");
  HomologyModule out;
  const auto& pn = c.terms[n];
  ObjectSubspaces z;
  if (n == 0) {
    for (Obj o = 0; o < pn->dims().size(); ++o) z.push_back(Subspace::whole(pn->prime(), pn->dim(o)));
  } else {
    for (auto& m : c.d(n).components()) z.push_back(kernel_basis(m));
  }
  out.cycles = submodule(pn, z);
  for (Obj o = 0; o < z.size(); ++o) {
    std::vector<Vec> bs;
    if (n + 1 <= c.length()) {
      Subspace im = image_basis(c.d(n + 1).at(o));
      for (std::size_t j = 0; j < im.dim(); ++j) bs.push_back(z[o].coordinates(im.basis().row(j)));
    }
    out.boundaries.push_back(Subspace::span(pn->prime(), z[o].dim(), bs));
  }
  out.projection = quotient_module(out.cycles.module, out.boundaries);
  out.module = out.projection.module;
  return out;
}

// ---- nerve

NerveComplex nerve_chain_complex(const FinCategory& c, std::uint32_t p, std::size_t n) {
  PrimeField k(p);
  NerveComplex out;
  std::vector<Mor> nonid;
  for (Mor f = 0; f < c.num_morphisms(); ++f)
    if (!c.is_identity(f)) nonid.push_back(f);
  out.chains.emplace_back();
  for (Obj o = 0; o < c.num_objects(); ++o) out.chains[0].push_back({c.identity(o)});
  for (std::size_t d = 1; d <= n + 1; ++d) {
    std::vector<std::vector<Mor>> next;
    for (auto& ch : out.chains[d - 1]) {
      Obj end = d == 1 ? c.src(ch[0]) : c.tgt(ch.back());
      for (Mor g : nonid) {
        if (c.src(g) != end) continue;
        std::vector<Mor> e = d == 1 ? std::vector<Mor>{} : ch;
        e.push_back(g);
        next.push_back(std::move(e));
      }
    }
    out.chains.push_back(std::move(next));
  }
  std::map<std::vector<Mor>, std::size_t> index;
  for (std::size_t d = 1; d <= n + 1; ++d) {
    Matrix b(p, out.chains[d - 1].size(), out.chains[d].size());
    index.clear();
    for (std::size_t i = 0; i < out.chains[d - 1].size(); ++i) index[out.chains[d - 1][i]] = i;
    for (std::size_t j = 0; j < out.chains[d].size(); ++j) {
      const auto& ch = out.chains[d][j];
      if (d == 1) {
        std::size_t t = c.tgt(ch[0]), s = c.src(ch[0]);
        b(t, j) = k.add(b(t, j), 1);
        b(s, j) = k.sub(b(s, j), 1);
        continue;
      }
      for (std::size_t i = 0; i <= d; ++i) {
        std::vector<Mor> face;
        if (i == 0) {
          face.assign(ch.begin() + 1, ch.end());
        } else if (i == d) {
          face.assign(ch.begin(), ch.end() - 1);
        } else {
          Mor comp = c.compose(ch[i], ch[i - 1]);
          if (c.is_identity(comp)) continue;
          face.assign(ch.begin(), ch.begin() + (i - 1));
          face.push_back(comp);
          face.insert(face.end(), ch.begin() + i + 1, ch.end());
        }
        std::size_t r = index.at(face);
        b(r, j) = i % 2 == 0 ? k.add(b(r, j), 1) : k.sub(b(r, j), 1);
      }
    }
    out.boundaries.push_back(std::move(b));
  }
  std::vector<std::size_t> ranks(n + 2, 0);
  for (std::size_t d = 1; d <= n + 1; ++d) ranks[d] = rank(out.boundaries[d - 1]);
  for (std::size_t d = 0; d <= n; ++d) out.betti.push_back(out.chains[d].size() - ranks[d] - ranks[d + 1]);
  return out;
}

// ---- fundamental group

Presentation pi1_presentation(const FinCategory& c, Obj c0) {
  const std::size_t no = c.num_objects();
  std::vector<bool> seen(no, false);
  seen[c0] = true;
  std::deque<Obj> q{c0};
  std::vector<bool> tree(c.num_morphisms(), false);
  while (!q.empty()) {
    Obj a = q.front();
    q.pop_front();
    for (Mor f = 0; f < c.num_morphisms(); ++f) {
      if (c.is_identity(f)) continue;
      Obj b = c.src(f) == a ? c.tgt(f) : (c.tgt(f) == a ? c.src(f) : a);
      if (b == a || seen[b]) continue;
      seen[b] = true;
      tree[f] = true;
      q.push_back(b);
    }
  }
  Presentation pr;
  std::vector<std::int64_t> gen_of(c.num_morphisms(), -1);
  for (Mor f = 0; f < c.num_morphisms(); ++f) {
    if (c.is_identity(f) || !seen[c.src(f)]) continue;
    gen_of[f] = static_cast<std::int64_t>(pr.generators.size());
    pr.generators.push_back(c.morphism(f).name);
    if (tree[f]) {
      pr.tree_edges.push_back(f);
      pr.relations.push_back({{static_cast<std::size_t>(gen_of[f]), 1}});
    }
  }
  for (Mor g = 0; g < c.num_morphisms(); ++g)
    for (Mor f = 0; f < c.num_morphisms(); ++f) {
      if (gen_of[g] < 0 || gen_of[f] < 0 || c.tgt(f) != c.src(g)) continue;
      Mor gf = c.compose(g, f);
      std::vector<std::pair<std::size_t, int>> w{{static_cast<std::size_t>(gen_of[g]), 1},
                                                 {static_cast<std::size_t>(gen_of[f]), 1}};
      if (!c.is_identity(gf)) w.emplace_back(static_cast<std::size_t>(gen_of[gf]), -1);
      pr.relations.push_back(std::move(w));
    }
  return pr;
}

std::vector<BigInt> Presentation::abelianization() const {
  const std::size_t ng = generators.size();
  IntMatrix m(relations.size(), ng);
  for (std::size_t r = 0; r < relations.size(); ++r)
    for (auto& [g, e] : relations[r]) m(r, g) += e;
  auto diag = invariant_factors(m);
  std::vector<BigInt> out;
  for (auto& d : diag)
    if (d != 1) out.push_back(d);
  for (std::size_t i = diag.size(); i < ng; ++i) out.push_back(0);
  return out;
}

}  // namespace omegares
