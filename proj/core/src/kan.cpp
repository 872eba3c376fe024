#include "omegares/kan.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace omegares {

std::string to_string(Hypothesis h) {
  switch (h) {
    case Hypothesis::SourceDisconnected: return "source category is not connected";
    case Hypothesis::TargetNotGroupCategory: return "target is not the one-object category of the group";
    case Hypothesis::Pi1NotSurjective: return "theta is not surjective on fundamental groups";
    case Hypothesis::NotBijectiveOnObjects: return "theta is not bijective on objects";
    case Hypothesis::NotSurjectiveOnMorphisms: return "theta is not surjective on morphism sets";
    case Hypothesis::MorphismQuotientFails: return "morphisms with equal images are not related by the kernel";
  }
  return "unknown hypothesis";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Exists: return "exists";
    case Verdict::DoesNotExist: return "does not exist";
    case Verdict::Mixed: return "mixed";
    case Verdict::Unknown: return "unknown";
  }
  return "unknown";
}

// ---- systems

SubgroupHandle pi1_image(const CatFunctor& theta, const FinGroup& pi) {
  const auto& c = *theta.source();
  const std::size_t no = c.num_objects();
  std::vector<Elem> t(no, pi.identity());
  std::vector<bool> seen(no, false);
  seen[0] = true;
  std::deque<Obj> q{0};
  while (!q.empty()) {
    Obj a = q.front();
    q.pop_front();
    for (Mor f = 0; f < c.num_morphisms(); ++f) {
      if (c.is_identity(f)) continue;
      Elem lf = static_cast<Elem>(theta.on_morphism(f));
      if (c.src(f) == a && !seen[c.tgt(f)]) {
        seen[c.tgt(f)] = true;
        t[c.tgt(f)] = pi.mul(lf, t[a]);
        q.push_back(c.tgt(f));
      } else if (c.tgt(f) == a && !seen[c.src(f)]) {
        seen[c.src(f)] = true;
        t[c.src(f)] = pi.mul(pi.inv(lf), t[a]);
        q.push_back(c.src(f));
      }
    }
  }
  std::vector<Elem> loops;
  for (Mor f = 0; f < c.num_morphisms(); ++f) {
    if (!seen[c.src(f)]) continue;
    Elem lf = static_cast<Elem>(theta.on_morphism(f));
    loops.push_back(pi.mul(pi.inv(t[c.tgt(f)]), pi.mul(lf, t[c.src(f)])));
  }
  return generated_subgroup(pi, loops);
}

std::optional<FinGroup> group_of_category(const FinCategory& c) {
  if (c.num_objects() != 1) return std::nullopt;
  const std::size_t n = c.num_morphisms();
  for (Mor f = 0; f < n; ++f)
    if (!c.is_automorphism(f)) return std::nullopt;
  std::vector<std::vector<Elem>> table(n, std::vector<Elem>(n));
  for (Mor g = 0; g < n; ++g)
    for (Mor f = 0; f < n; ++f) table[g][f] = c.compose(g, f);
  return FinGroup(std::move(table));
}

CommaCategory comma_category(const CatFunctor& theta, const FinGroup& pi) {
  const auto& c = *theta.source();
  const std::size_t n = pi.order();
  std::vector<std::string> objs;
  for (Obj o = 0; o < c.num_objects(); ++o)
    for (Elem g = 0; g < n; ++g) objs.push_back(c.object_name(o) + "@" + std::to_string(g));
  std::vector<MorphismRecord> mors;
  for (Mor f = 0; f < c.num_morphisms(); ++f)
    for (Elem g = 0; g < n; ++g) {
      Elem lf = static_cast<Elem>(theta.on_morphism(f));
      mors.push_back({c.morphism(f).name + "@" + std::to_string(g), static_cast<Obj>(c.src(f) * n + pi.mul(g, lf)),
                      static_cast<Obj>(c.tgt(f) * n + g)});
    }
  std::vector<Mor> ids;
  for (Obj o = 0; o < c.num_objects(); ++o)
    for (Elem g = 0; g < n; ++g) ids.push_back(static_cast<Mor>(c.identity(o) * n + g));
  std::vector<std::array<Mor, 3>> comp;
  for (Mor psi = 0; psi < c.num_morphisms(); ++psi)
    for (Mor phi = 0; phi < c.num_morphisms(); ++phi) {
      if (c.tgt(phi) != c.src(psi)) continue;
      Mor pp = c.compose(psi, phi);
      for (Elem g2 = 0; g2 < n; ++g2) {
        Elem g1 = pi.mul(g2, static_cast<Elem>(theta.on_morphism(psi)));
        comp.push_back({static_cast<Mor>(psi * n + g2), static_cast<Mor>(phi * n + g1), static_cast<Mor>(pp * n + g2)});
      }
    }
  CommaCategory out;
  out.group_order = n;
  out.category = make_category(FinCategory(std::move(objs), std::move(mors), std::move(ids), comp));
  return out;
}

Validation validate_group_system(const CatFunctor& theta, const FinGroup& pi, std::uint32_t p) {
  Validation v;
  try {
    v.system = OmegaSystem::over_group(theta, pi, p);
  } catch (const OmegaSystemError& e) {
    v.diagnostic = e.diag;
  }
  return v;
}

OmegaSystem OmegaSystem::over_group(CatFunctor theta, FinGroup pi, std::uint32_t p) {
  if (!is_prime(p)) throw std::invalid_argument("coefficient characteristic is not prime");
  const auto& c = *theta.source();
  if (!c.connected()) throw OmegaSystemError({Hypothesis::SourceDisconnected, "the nerve has more than one component"});
  const auto& t = *theta.target();
  if (t.num_objects() != 1 || t.num_morphisms() != pi.order())
    throw OmegaSystemError({Hypothesis::TargetNotGroupCategory, "target size differs from the group order"});
  for (Mor a = 0; a < pi.order(); ++a)
    for (Mor b = 0; b < pi.order(); ++b)
      if (t.compose(a, b) != pi.mul(a, b))
        throw OmegaSystemError({Hypothesis::TargetNotGroupCategory, "morphism table differs from the group table"});
  if (pi1_image(theta, pi).order() != pi.order())
    throw OmegaSystemError({Hypothesis::Pi1NotSurjective, "image of pi_1 is a proper subgroup of order " +
                                                              std::to_string(pi1_image(theta, pi).order())});
  OmegaSystem s(std::move(theta), p);
  s.backend_ = Backend::Group;
  s.pi_ = std::move(pi);
  s.comma_ = comma_category(s.theta_, s.pi_);
  return s;
}

Validation validate_bijective_system(const CatFunctor& theta, std::uint32_t p) {
  Validation v;
  try {
    v.system = OmegaSystem::bijective(theta, p);
  } catch (const OmegaSystemError& e) {
    v.diagnostic = e.diag;
  }
  return v;
}

OmegaSystem OmegaSystem::bijective(CatFunctor theta, std::uint32_t p) {
  if (!is_prime(p)) throw std::invalid_argument("coefficient characteristic is not prime");
  const auto& c = *theta.source();
  const auto& d = *theta.target();
  const std::size_t no = c.num_objects();
  if (d.num_objects() != no)
    throw OmegaSystemError({Hypothesis::NotBijectiveOnObjects, "object counts differ"});
  std::vector<Obj> pre(no, static_cast<Obj>(no));
  for (Obj o = 0; o < no; ++o) {
    Obj t = theta.on_object(o);
    if (pre[t] != no)
      throw OmegaSystemError({Hypothesis::NotBijectiveOnObjects, "objects '" + c.object_name(pre[t]) + "' and '" +
                                                                     c.object_name(o) + "' have the same image"});
    pre[t] = o;
  }
  std::vector<Mor> pre_mor(d.num_morphisms(), static_cast<Mor>(c.num_morphisms()));
  for (Mor f = 0; f < c.num_morphisms(); ++f) {
    Mor g = theta.on_morphism(f);
    if (pre_mor[g] == c.num_morphisms()) pre_mor[g] = f;
  }
  for (Mor g = 0; g < d.num_morphisms(); ++g)
    if (pre_mor[g] == c.num_morphisms())
      throw OmegaSystemError({Hypothesis::NotSurjectiveOnMorphisms, "'" + d.morphism(g).name + "' has no preimage"});
  std::vector<std::vector<Mor>> ker(no);
  for (Obj o = 0; o < no; ++o)
    for (Mor a : c.hom(o, o))
      if (c.is_automorphism(a) && d.is_identity(theta.on_morphism(a))) ker[o].push_back(a);
  for (Obj a = 0; a < no; ++a)
    for (Obj b = 0; b < no; ++b) {
      const auto& h = c.hom(a, b);
      for (Mor f : h)
        for (Mor f2 : h) {
          if (theta.on_morphism(f) != theta.on_morphism(f2)) continue;
          bool found = false;
          for (Mor alpha : ker[b]) found = found || c.compose(alpha, f2) == f;
          if (!found)
            throw OmegaSystemError({Hypothesis::MorphismQuotientFails, "no kernel element carries '" +
                                                                           c.morphism(f2).name + "' to '" +
                                                                           c.morphism(f).name + "'"});
        }
    }
  OmegaSystem s(std::move(theta), p);
  s.backend_ = Backend::BijectiveOnObjects;
  s.kernels_ = std::move(ker);
  s.preimage_obj_ = std::move(pre);
  s.preimage_mor_ = std::move(pre_mor);
  return s;
}

FinGroup kernel_group(const OmegaSystem& sys, Obj c) {
  const auto& k = sys.kernels()[c];
  const auto& cat = *sys.source();
  std::map<Mor, Elem> pos;
  for (Elem i = 0; i < k.size(); ++i) pos[k[i]] = i;
  std::vector<std::vector<Elem>> table(k.size(), std::vector<Elem>(k.size()));
  for (Elem i = 0; i < k.size(); ++i)
    for (Elem j = 0; j < k.size(); ++j) table[i][j] = pos.at(cat.compose(k[i], k[j]));
  return FinGroup(std::move(table));
}

// ---- restriction and left Kan extension

CatModule theta_upper_star(const OmegaSystem& sys, const CatModule& n) { return restrict_along(sys.theta(), n); }

ModuleMap theta_upper_star(const OmegaSystem& sys, const ModuleMap& f, ModulePtr src, ModulePtr tgt) {
  std::vector<Matrix> comp;
  for (Obj o = 0; o < sys.source()->num_objects(); ++o) comp.push_back(f.at(sys.theta().on_object(o)));
  return ModuleMap(std::move(src), std::move(tgt), std::move(comp), false);
}

namespace {

Matrix quotient_projection(const Subspace& s) {
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

Matrix coordinate_section(const Subspace& s) {
  auto comp = s.complement_columns();
  Matrix sec(s.prime(), s.ambient_dim(), comp.size());
  for (std::size_t j = 0; j < comp.size(); ++j) sec(comp[j], j) = 1;
  return sec;
}

struct Layout {
  std::vector<std::size_t> off;  // offset of M(c) inside one pi-block
  std::size_t block = 0;
};

Layout layout(const CatModule& m) {
  Layout l;
  for (Obj o = 0; o < m.dims().size(); ++o) {
    l.off.push_back(l.block);
    l.block += m.dim(o);
  }
  return l;
}

}  // namespace

LowerStar theta_lower_star(const OmegaSystem& sys, ModulePtr m) {
  const auto& c = *sys.source();
  const std::uint32_t p = m->prime();
  PrimeField k(p);
  LowerStar out;
  if (sys.backend() == Backend::Group) {
    const FinGroup& pi = sys.group();
    const std::size_t n = pi.order();
    Layout l = layout(*m);
    const std::size_t amb = n * l.block;
    auto at = [&](Elem g, Obj o, std::size_t i) { return g * l.block + l.off[o] + i; };
    std::vector<Vec> rel;
    for (Mor f = 0; f < c.num_morphisms(); ++f) {
      if (c.is_identity(f)) continue;
      Obj a = c.src(f), b = c.tgt(f);
      const Matrix& mf = m->action(f);
      for (Elem g2 = 0; g2 < n; ++g2) {
        Elem g1 = pi.mul(g2, sys.label(f));
        for (std::size_t i = 0; i < m->dim(a); ++i) {
          Vec r(amb, 0);
          r[at(g1, a, i)] = k.add(r[at(g1, a, i)], 1);
          for (std::size_t j = 0; j < m->dim(b); ++j) r[at(g2, b, j)] = k.sub(r[at(g2, b, j)], mf(j, i));
          rel.push_back(std::move(r));
        }
      }
    }
    Subspace r = Subspace::span(p, amb, rel);
    Matrix proj = quotient_projection(r);
    Matrix sec = coordinate_section(r);
    auto comp = r.complement_columns();
    const std::size_t q = comp.size();
    std::vector<Matrix> act;
    for (Elem h = 0; h < n; ++h) {
      Matrix a(p, q, q);
      for (std::size_t j = 0; j < q; ++j) {
        std::size_t s = comp[j];
        Elem g = static_cast<Elem>(s / l.block);
        std::size_t rest = s % l.block;
        std::size_t shifted = pi.mul(h, g) * l.block + rest;
        for (std::size_t i = 0; i < q; ++i) a(i, j) = proj(i, shifted);
      }
      act.push_back(std::move(a));
    }
    out.module = share(CatModule(sys.target(), p, {q}, std::move(act)));
    out.pullback = share(theta_upper_star(sys, *out.module));
    std::vector<Matrix> unit;
    for (Obj o = 0; o < c.num_objects(); ++o) {
      Matrix u(p, q, m->dim(o));
      for (std::size_t i = 0; i < m->dim(o); ++i)
        for (std::size_t t = 0; t < q; ++t) u(t, i) = proj(t, at(pi.identity(), o, i));
      unit.push_back(std::move(u));
    }
    out.unit = ModuleMap(m, out.pullback, std::move(unit));
    out.projection = {std::move(proj)};
    out.section = {std::move(sec)};
    return out;
  }
  const auto& d = *sys.target();
  std::vector<std::size_t> dims;
  for (Obj t = 0; t < d.num_objects(); ++t) {
    Obj o = sys.preimage_object(t);
    std::vector<Vec> rel;
    for (Mor alpha : sys.kernels()[o]) {
      Matrix a = m->action(alpha) - Matrix::identity(p, m->dim(o));
      for (std::size_t j = 0; j < a.cols(); ++j) rel.push_back(a.col(j));
    }
    Subspace r = Subspace::span(p, m->dim(o), rel);
    out.projection.push_back(quotient_projection(r));
    out.section.push_back(coordinate_section(r));
    dims.push_back(out.projection.back().rows());
  }
  std::vector<Matrix> act;
  for (Mor g = 0; g < d.num_morphisms(); ++g) {
    Mor f = sys.preimage_morphism(g);
    act.push_back(out.projection[d.tgt(g)] * m->action(f) * out.section[d.src(g)]);
  }
  out.module = share(CatModule(sys.target(), p, std::move(dims), std::move(act)));
  out.pullback = share(theta_upper_star(sys, *out.module));
  std::vector<Matrix> unit;
  for (Obj o = 0; o < c.num_objects(); ++o) unit.push_back(out.projection[sys.theta().on_object(o)]);
  out.unit = ModuleMap(m, out.pullback, std::move(unit));
  return out;
}

ModuleMap theta_lower_star(const OmegaSystem& sys, const ModuleMap& f, const LowerStar& src, const LowerStar& tgt) {
  const auto& c = *sys.source();
  const std::uint32_t p = f.source()->prime();
  if (sys.backend() == Backend::Group) {
    const std::size_t n = sys.group().order();
    Layout ls = layout(*f.source()), lt = layout(*f.target());
    Matrix big(p, n * lt.block, n * ls.block);
    for (Elem g = 0; g < n; ++g)
      for (Obj o = 0; o < c.num_objects(); ++o) big.set_block(g * lt.block + lt.off[o], g * ls.block + ls.off[o], f.at(o));
    return ModuleMap(src.module, tgt.module, {tgt.projection[0] * big * src.section[0]});
  }
  std::vector<Matrix> comp;
  for (Obj t = 0; t < sys.target()->num_objects(); ++t)
    comp.push_back(tgt.projection[t] * f.at(sys.preimage_object(t)) * src.section[t]);
  return ModuleMap(src.module, tgt.module, std::move(comp));
}

ModuleMap counit(const OmegaSystem& sys, ModulePtr n, const LowerStar& pushed) {
  const auto& c = *sys.source();
  const std::uint32_t p = n->prime();
  if (sys.backend() == Backend::Group) {
    const std::size_t order = sys.group().order();
    // theta^* N has N(*) at every object, so each pi-block is N(*) repeated per object
    const std::size_t dn = n->dim(0);
    const std::size_t block = dn * c.num_objects();
    Matrix big(p, dn, order * block);
    for (Elem g = 0; g < order; ++g)
      for (Obj o = 0; o < c.num_objects(); ++o) big.set_block(0, g * block + o * dn, n->action(g));
    return ModuleMap(pushed.module, n, {big * pushed.section[0]});
  }
  std::vector<Matrix> comp;
  for (Obj t = 0; t < sys.target()->num_objects(); ++t) comp.push_back(pushed.section[t]);
  return ModuleMap(pushed.module, n, std::move(comp));
}

// ---- free resolutions

namespace {

std::vector<std::pair<Obj, Vec>> full_basis_generators(const ObjectSubspaces& within) {
  std::vector<std::pair<Obj, Vec>> gens;
  for (Obj o = 0; o < within.size(); ++o)
    for (std::size_t j = 0; j < within[o].dim(); ++j) gens.emplace_back(o, within[o].vector(j));
  return gens;
}

}  // namespace

FreeResolution free_resolution(ModulePtr m, std::size_t degree, CoverMode mode) {
  FreeResolution r;
  const auto& cat = m->category();
  const std::uint32_t p = m->prime();
  ObjectSubspaces within;
  for (Obj o = 0; o < m->dims().size(); ++o) within.push_back(Subspace::whole(p, m->dim(o)));
  ModulePtr prev = m;
  for (std::size_t n = 0; n <= degree; ++n) {
    auto gens = mode == CoverMode::Greedy ? choose_generators(*prev, within) : full_basis_generators(within);
    std::vector<Obj> objs;
    std::vector<Vec> imgs;
    for (auto& [o, v] : gens) {
      objs.push_back(o);
      imgs.push_back(v);
    }
    FreeModule f = free_sum(cat, objs, p);
    ModuleMap d = map_from_free(f, prev, imgs);
    r.free.push_back(f);
    r.complex.terms.push_back(f.module);
    if (n == 0) {
      r.complex.augmentation = d;
      r.augmentation_images = imgs;
      r.images.emplace_back();
    } else {
      r.complex.boundaries.push_back(d);
      r.images.push_back(imgs);
    }
    within.clear();
    for (auto& comp : d.components()) within.push_back(kernel_basis(comp));
    prev = f.module;
  }
  return r;
}

Untwisting untwisting(const OmegaSystem& sys, Obj c) {
  if (sys.backend() != Backend::Group) throw std::invalid_argument("untwisting needs the group backend");
  const std::uint32_t p = sys.prime();
  const std::size_t n = sys.group().order();
  const auto& cat = *sys.source();
  Untwisting u;
  u.free = free_sum(sys.source(), std::vector<Obj>(n, c), p);
  auto fc = free_module(sys.source(), c, p);
  auto pulled = theta_upper_star(sys, free_module(sys.target(), 0, p));
  u.twisted = share(tensor(fc, pulled));
  std::vector<Vec> imgs;
  for (Elem h = 0; h < n; ++h) {
    Vec v(u.twisted->dim(c), 0);
    v[cat.hom_index(cat.identity(c)) * n + h] = 1;
    imgs.push_back(std::move(v));
  }
  u.map = map_from_free(u.free, u.twisted, imgs);
  return u;
}

// ---- chain-level resolution of theta^*(k pi)

namespace {

std::vector<std::vector<std::vector<Mor>>> enumerate_chains(const FinCategory& c, std::size_t top) {
  std::vector<std::vector<std::vector<Mor>>> chains(1);
  for (Obj o = 0; o < c.num_objects(); ++o) chains[0].push_back({c.identity(o)});
  for (std::size_t d = 1; d <= top; ++d) {
    std::vector<std::vector<Mor>> next;
    for (auto& ch : chains[d - 1]) {
      Obj end = d == 1 ? c.src(ch[0]) : c.tgt(ch.back());
      for (Mor g = 0; g < c.num_morphisms(); ++g) {
        if (c.is_identity(g) || c.src(g) != end) continue;
        std::vector<Mor> e = d == 1 ? std::vector<Mor>{} : ch;
        e.push_back(g);
        next.push_back(std::move(e));
      }
    }
    chains.push_back(std::move(next));
  }
  return chains;
}

Obj chain_end(const FinCategory& c, const std::vector<Mor>& ch, std::size_t n) {
  return n == 0 ? c.src(ch[0]) : c.tgt(ch.back());
}

void canonicalize(SparseElement& e, const PrimeField& k) {
  std::sort(e.begin(), e.end(), [](const FreeTerm& a, const FreeTerm& b) {
    return a.gen != b.gen ? a.gen < b.gen : a.mor < b.mor;
  });
  SparseElement out;
  for (auto& t : e) {
    if (!out.empty() && out.back().gen == t.gen && out.back().mor == t.mor)
      out.back().coeff = k.add(out.back().coeff, t.coeff);
    else
      out.push_back(t);
    if (out.back().coeff == 0) out.pop_back();
  }
  e = std::move(out);
}

}  // namespace

EcResolution ec_resolution(const OmegaSystem& sys, std::size_t degree, std::optional<std::size_t> dense_degree) {
  if (sys.backend() != Backend::Group) throw std::invalid_argument("ec_resolution needs the group backend");
  const auto& c = *sys.source();
  const FinGroup& pi = sys.group();
  const std::size_t n_pi = pi.order();
  const std::uint32_t p = sys.prime();
  PrimeField k(p);
  EcResolution ec;
  ec.chains = enumerate_chains(c, degree + 1);
  std::vector<std::map<std::vector<Mor>, std::uint32_t>> index(degree + 2);
  for (std::size_t n = 0; n <= degree + 1; ++n)
    for (std::uint32_t i = 0; i < ec.chains[n].size(); ++i) index[n][ec.chains[n][i]] = i;
  auto gen = [&](std::size_t s, Elem h) { return static_cast<std::uint32_t>(s * n_pi + h); };

  ec.sparse.assign(degree + 2, {});
  for (std::size_t n = 1; n <= degree + 1; ++n) {
    const auto& chs = ec.chains[n];
    for (std::size_t s = 0; s < chs.size(); ++s) {
      const auto& ch = chs[s];
      Obj end = chain_end(c, ch, n);
      for (Elem h = 0; h < n_pi; ++h) {
        SparseElement e;
        for (std::size_t i = 0; i <= n; ++i) {
          Residue sign = i % 2 == 0 ? 1 : k.neg(1);
          std::vector<Mor> face;
          if (n == 1) {
            face = {c.identity(i == 0 ? c.tgt(ch[0]) : c.src(ch[0]))};
          } else if (i == 0) {
            face.assign(ch.begin() + 1, ch.end());
          } else if (i == n) {
            face.assign(ch.begin(), ch.end() - 1);
          } else {
            Mor comp = c.compose(ch[i], ch[i - 1]);
            if (c.is_identity(comp)) continue;
            face.assign(ch.begin(), ch.begin() + (i - 1));
            face.push_back(comp);
            face.insert(face.end(), ch.begin() + i + 1, ch.end());
          }
          std::uint32_t fi = index[n - 1].at(face);
          if (i < n) {
            e.push_back({gen(fi, h), c.identity(end), sign});
          } else {
            Mor last = ch.back();
            Elem h2 = pi.mul(pi.inv(sys.label(last)), h);
            e.push_back({gen(fi, h2), last, sign});
          }
        }
        canonicalize(e, k);
        ec.sparse[n].push_back(std::move(e));
      }
    }
  }

  auto bpi = sys.target();
  auto regular = share(free_module(bpi, 0, p));
  auto target = share(theta_upper_star(sys, *regular));
  FreeResolution& r = ec.resolution;
  const std::size_t dense_top = std::min(degree, dense_degree.value_or(degree));
  for (std::size_t n = 0; n <= dense_top; ++n) {
    std::vector<Obj> objs;
    for (auto& ch : ec.chains[n])
      for (Elem h = 0; h < n_pi; ++h) objs.push_back(chain_end(c, ch, n));
    FreeModule f = free_sum(sys.source(), objs, p);
    std::vector<Vec> imgs;
    if (n == 0) {
      for (std::size_t s = 0; s < ec.chains[0].size(); ++s)
        for (Elem h = 0; h < n_pi; ++h) {
          Vec v(n_pi, 0);
          v[h] = 1;
          imgs.push_back(std::move(v));
        }
      r.complex.augmentation = map_from_free(f, target, imgs);
      r.augmentation_images = imgs;
      r.images.emplace_back();
    } else {
      const FreeModule& prev = r.free[n - 1];
      for (std::size_t j = 0; j < f.rank(); ++j) {
        Vec v(prev.module->dim(f.generators[j]), 0);
        for (auto& t : ec.sparse[n][j]) v[prev.basis_index(t.gen, t.mor)] = t.coeff;
        imgs.push_back(std::move(v));
      }
      r.complex.boundaries.push_back(map_from_free(f, prev.module, imgs));
      r.images.push_back(imgs);
    }
    r.free.push_back(f);
    r.complex.terms.push_back(f.module);
  }
  ec.homotopy_certified = certify_ec_exactness(sys, ec, degree);
  return ec;
}

bool certify_ec_exactness(const OmegaSystem& sys, const EcResolution& ec, std::size_t degree) {
  const auto& c = *sys.source();
  const FinGroup& pi = sys.group();
  const std::size_t n_pi = pi.order();
  PrimeField k(sys.prime());
  if (ec.sparse.size() < degree + 2) return false;
  std::vector<std::map<std::vector<Mor>, std::uint32_t>> index(degree + 2);
  for (std::size_t n = 0; n <= degree + 1; ++n)
    for (std::uint32_t i = 0; i < ec.chains[n].size(); ++i) index[n][ec.chains[n][i]] = i;
  auto chain_of = [&](std::uint32_t g) { return g / n_pi; };
  auto label_of = [&](std::uint32_t g) { return static_cast<Elem>(g % n_pi); };
  // boundary of phi . generator j in degree n >= 1
  auto boundary = [&](std::size_t n, std::uint32_t j, Mor phi, SparseElement& out, Residue coeff) {
    for (auto& t : ec.sparse[n][j]) out.push_back({t.gen, c.compose(phi, t.mor), k.mul(coeff, t.coeff)});
  };
  // contracting homotopy in degree n: phi . (sigma, h) -> +-(sigma|phi, theta(phi) h), zero when phi is an identity
  auto homotopy = [&](std::size_t n, std::uint32_t j, Mor phi, SparseElement& out, Residue coeff) {
    if (c.is_identity(phi)) return;
    std::vector<Mor> ext = n == 0 ? std::vector<Mor>{} : ec.chains[n][chain_of(j)];
    ext.push_back(phi);
    std::uint32_t s = index[n + 1].at(ext);
    Elem h2 = pi.mul(sys.label(phi), label_of(j));
    Residue sign = (n + 1) % 2 == 0 ? 1 : k.neg(1);
    out.push_back({static_cast<std::uint32_t>(s * n_pi + h2), c.identity(c.tgt(phi)), k.mul(sign, coeff)});
  };
  for (std::size_t n = 0; n <= degree; ++n) {
    const auto& chs = ec.chains[n];
    for (std::uint32_t s = 0; s < chs.size(); ++s) {
      Obj end = chain_end(c, chs[s], n);
      for (Elem h = 0; h < n_pi; ++h) {
        std::uint32_t j = static_cast<std::uint32_t>(s * n_pi + h);
        for (Obj d = 0; d < c.num_objects(); ++d)
          for (Mor phi : c.hom(end, d)) {
            SparseElement total;
            // d s
            SparseElement sx;
            homotopy(n, j, phi, sx, 1);
            for (auto& t : sx) boundary(n + 1, t.gen, t.mor, total, t.coeff);
            // s d, or eta eps in degree 0
            if (n == 0) {
              Elem g = pi.mul(sys.label(phi), h);
              std::uint32_t dj = static_cast<std::uint32_t>(index[0].at({c.identity(d)}) * n_pi + g);
              total.push_back({dj, c.identity(d), 1});
            } else {
              SparseElement dx;
              boundary(n, j, phi, dx, 1);
              for (auto& t : dx) homotopy(n - 1, t.gen, t.mor, total, t.coeff);
            }
            total.push_back({j, phi, k.neg(1)});
            canonicalize(total, k);
            if (!total.empty()) return false;
          }
      }
    }
  }
  return true;
}

// ---- derived functors

ChainComplex push_free_complex(const OmegaSystem& sys, const FreeResolution& r, std::size_t top) {
  top = std::min(top, r.free.size() - 1);
  const auto& c = *sys.source();
  const auto& theta = sys.theta();
  std::vector<FreeModule> pushed;
  for (std::size_t n = 0; n <= top; ++n) {
    const FreeModule& f = r.free[n];
    std::vector<Obj> objs;
    for (Obj o : f.generators) objs.push_back(theta.on_object(o));
    pushed.push_back(free_sum(sys.target(), objs, sys.prime()));
  }
  ChainComplex out;
  for (auto& f : pushed) out.terms.push_back(f.module);
  for (std::size_t n = 1; n <= top; ++n) {
    const FreeModule& src = r.free[n];
    const FreeModule& prev = r.free[n - 1];
    const FreeModule& tprev = pushed[n - 1];
    std::vector<Vec> imgs;
    for (std::size_t j = 0; j < src.rank(); ++j) {
      Obj cj = src.generators[j];
      const Vec& v = r.images[n][j];
      Vec w(tprev.module->dim(theta.on_object(cj)), 0);
      PrimeField k(sys.prime());
      for (std::size_t i = 0; i < prev.rank(); ++i)
        for (Mor psi : c.hom(prev.generators[i], cj)) {
          Residue a = v[prev.basis_index(i, psi)];
          if (!a) continue;
          std::size_t idx = tprev.basis_index(i, theta.on_morphism(psi));
          w[idx] = k.add(w[idx], a);
        }
      imgs.push_back(std::move(w));
    }
    out.boundaries.push_back(map_from_free(pushed[n], tprev.module, imgs));
  }
  return out;
}

ModulePtr derived_theta_star(const OmegaSystem& sys, const FreeResolution& r, std::size_t i) {
  if (r.free.size() < i + 2) throw std::invalid_argument("resolution too short for this derived functor");
  return homology(push_free_complex(sys, r, i + 1), i).module;
}

ModulePtr derived_theta_star(const OmegaSystem& sys, ModulePtr m, std::size_t i, CoverMode mode) {
  return derived_theta_star(sys, free_resolution(std::move(m), i + 1, mode), i);
}

bool omega1_exists(const OmegaSystem& sys, ModulePtr x) {
  if (!is_projective(x)) throw NotProjective("omega1_exists needs a projective target module");
  auto pulled = share(theta_upper_star(sys, *x));
  return derived_theta_star(sys, pulled, 1)->is_zero();
}

PerfectnessReport perfectness_certificate(const OmegaSystem& sys) {
  PerfectnessReport rep;
  rep.backend = sys.backend();
  rep.prime = sys.prime();
  const std::uint32_t p = sys.prime();
  if (sys.backend() == Backend::Group) {
    EcResolution ec = ec_resolution(sys, 2);
    rep.l1_dim = derived_theta_star(sys, ec.resolution, 1)->total_dim();
    bool l1_zero = *rep.l1_dim == 0;
    if (auto g = group_of_category(*sys.source())) {
      std::vector<Elem> map;
      for (Mor f = 0; f < sys.source()->num_morphisms(); ++f) map.push_back(sys.label(f));
      auto ker = kernel(*g, sys.group(), map);
      rep.direct_kernel_perfect = is_R_perfect(*g, ker, p);
      rep.agree = *rep.direct_kernel_perfect == l1_zero;
    }
    rep.verdict = l1_zero ? Verdict::Exists : Verdict::DoesNotExist;
    return rep;
  }
  const auto& c = *sys.source();
  const auto& d = *sys.target();
  bool all_perfect = true;
  for (Obj o = 0; o < c.num_objects(); ++o) {
    KernelRow row;
    row.object = c.object_name(o);
    FinGroup kg = kernel_group(sys, o);
    row.order = kg.order();
    row.abelianization = abelianization(kg);
    row.perfect = is_R_perfect(kg, p);
    all_perfect = all_perfect && row.perfect;
    rep.kernels.push_back(std::move(row));
  }
  std::size_t exists = 0, fails = 0;
  for (Obj t = 0; t < d.num_objects(); ++t) {
    ProjectiveVerdict pv;
    pv.object = d.object_name(t);
    auto x = share(free_module(sys.target(), t, p));
    auto pulled = share(theta_upper_star(sys, *x));
    pv.pullback_projective = is_projective(pulled);
    pv.l1_dim = derived_theta_star(sys, pulled, 1)->total_dim();
    if (pv.pullback_projective || all_perfect)
      pv.verdict = Verdict::Exists;
    else if (pv.l1_dim != 0)
      pv.verdict = Verdict::DoesNotExist;
    else
      pv.verdict = Verdict::Unknown;
    exists += pv.verdict == Verdict::Exists;
    fails += pv.verdict == Verdict::DoesNotExist;
    rep.projectives.push_back(std::move(pv));
  }
  // not all kernels perfect must show up as some projective without a resolution
  rep.agree = all_perfect == (fails == 0);
  if (all_perfect)
    rep.verdict = Verdict::Exists;
  else if (exists > 0 && fails > 0)
    rep.verdict = Verdict::Mixed;
  else if (fails > 0)
    rep.verdict = Verdict::DoesNotExist;
  else
    rep.verdict = Verdict::Unknown;
  return rep;
}

}  // namespace omegares
