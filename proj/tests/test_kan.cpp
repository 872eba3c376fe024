#include "doctest.h"
#include "omegares/kan.hpp"
#include "test_support.hpp"

#include <random>

using namespace omegares;
using namespace omegares::testing;

namespace {

// G -> G/[G,G] as a functor of one-object categories
OmegaSystem abelianization_system(const FinGroup& g, std::uint32_t p) {
  Quotient q = quotient(g, commutator_subgroup(g, whole_group(g)));
  auto theta = functor_of_homomorphism(category_of_group(g), category_of_group(q.group), q.projection);
  return OmegaSystem::over_group(theta, q.group, p);
}

OmegaSystem sign_system(std::uint32_t p) { return abelianization_system(symmetric_group(3), p); }

CatFunctor to_trivial(const FinGroup& g) {
  std::vector<Elem> map(g.order(), 0);
  return functor_of_homomorphism(category_of_group(g), category_of_group(FinGroup()), map);
}

OmegaSystem cyclic_to_trivial(std::uint32_t p) { return OmegaSystem::over_group(to_trivial(cyclic_group(p)), FinGroup(), p); }

CatFunctor arrow_functor(std::uint32_t p) {
  Json j = fixture("arrow_with_cyclic_loop_p" + std::to_string(p));
  return functor_from_json(j.at("functor"), category_from_json(j.at("source")),
                           category_from_json(j.at("target").at("category")));
}

OmegaSystem arrow_system(std::uint32_t p) { return OmegaSystem::bijective(arrow_functor(p), p); }

// a surjective map of groups seen through both backends
struct TwoBackends {
  OmegaSystem group;
  OmegaSystem bijective;
};

TwoBackends both_backends(const FinGroup& g, std::uint32_t p) {
  Quotient q = quotient(g, commutator_subgroup(g, whole_group(g)));
  auto theta = functor_of_homomorphism(category_of_group(g), category_of_group(q.group), q.projection);
  return {OmegaSystem::over_group(theta, q.group, p), OmegaSystem::bijective(theta, p)};
}

ModulePtr random_rep(std::mt19937_64& rng, CategoryPtr cat, std::uint32_t p) { return random_module(rng, cat, p); }

// H_n of an augmented resolution vanishes for 1 <= n < top and H_0 is the resolved module
void check_acyclic_below(const FreeResolution& r, std::size_t top) {
  const auto& cx = r.complex;
  CHECK(cx.squares_to_zero());
  REQUIRE(cx.augmentation.has_value());
  CHECK(cx.augmentation->is_surjective());
  if (cx.length() >= 1) CHECK(compose(*cx.augmentation, cx.d(1)).is_zero());
  for (std::size_t n = 1; n < top && n <= cx.length(); ++n) CHECK(homology(cx, n).module->is_zero());
  if (top >= 1 && cx.length() >= 1) {
    // H_0 = P_0 / im d_1 has the dimension of the resolved module
    CHECK(homology(cx, 0).module->total_dim() == cx.augmentation->target()->total_dim());
  }
}

}  // namespace

TEST_CASE("validation diagnostics") {
  SUBCASE("sign map of S3 is a group system") {
    auto v = validate_group_system(sign_system(2).theta(), sign_system(2).group(), 2);
    REQUIRE(v.ok());
    CHECK(v.system->backend() == Backend::Group);
    CHECK(v.system->group().order() == 2);
    CHECK(v.system->comma().category->num_objects() == 2);
    CHECK(v.system->comma().category->num_morphisms() == 12);
  }
  SUBCASE("arrow functor is bijective on objects") {
    for (std::uint32_t p : {2u, 3u}) {
      auto v = validate_bijective_system(arrow_functor(p), p);
      REQUIRE(v.ok());
      const auto& sys = *v.system;
      CHECK(sys.backend() == Backend::BijectiveOnObjects);
      Obj x = *sys.source()->find_object("x");
      Obj y = *sys.source()->find_object("y");
      CHECK(sys.kernels()[x].size() == p);
      CHECK(sys.kernels()[y].size() == 1);
      CHECK(kernel_group(sys, x).order() == p);
    }
  }
  SUBCASE("a trivial map to C2 is not surjective on pi_1") {
    std::vector<Elem> map(3, 0);
    auto theta = functor_of_homomorphism(category_of_group(cyclic_group(3)), category_of_group(cyclic_group(2)), map);
    auto v = validate_group_system(theta, cyclic_group(2), 3);
    CHECK_FALSE(v.ok());
    REQUIRE(v.diagnostic.has_value());
    CHECK(v.diagnostic->failed == Hypothesis::Pi1NotSurjective);
    CHECK_THROWS_AS(OmegaSystem::over_group(theta, cyclic_group(2), 3), OmegaSystemError);
  }
  SUBCASE("bijective checks") {
    auto c = poset_chain(2);
    auto one = category_of_group(FinGroup());
    CatFunctor collapse(c, one, {0, 0}, {0, 0, 0});
    auto v = validate_bijective_system(collapse, 2);
    REQUIRE(v.diagnostic.has_value());
    CHECK(v.diagnostic->failed == Hypothesis::NotBijectiveOnObjects);
    // group backend on a poset collapsed to a point is fine
    CHECK(validate_group_system(collapse, FinGroup(), 2).ok());
    // C2 -> C2 by the trivial map misses a morphism
    std::vector<Elem> triv(2, 0);
    auto t2 = functor_of_homomorphism(category_of_group(cyclic_group(2)), category_of_group(cyclic_group(2)), triv);
    auto w = validate_bijective_system(t2, 2);
    REQUIRE(w.diagnostic.has_value());
    CHECK(w.diagnostic->failed == Hypothesis::NotSurjectiveOnMorphisms);
  }
  SUBCASE("non-prime characteristic") { CHECK_THROWS(OmegaSystem::bijective(arrow_functor(2), 4)); }
}

TEST_CASE("pi_1 image and group of category") {
  auto g = group_of_category(*category_of_group(quaternion_group()));
  REQUIRE(g.has_value());
  CHECK(g->order() == 8);
  CHECK_FALSE(group_of_category(*poset_chain(2)).has_value());
  auto sys = sign_system(3);
  CHECK(pi1_image(sys.theta(), sys.group()).order() == 2);
}

TEST_CASE("restriction dims") {
  auto sys = arrow_system(3);
  auto fx = share(free_module(sys.target(), *sys.target()->find_object("x"), 3));
  auto pulled = theta_upper_star(sys, *fx);
  CHECK(pulled.is_functorial());
  for (Obj o = 0; o < 2; ++o) CHECK(pulled.dim(o) == fx->dim(sys.theta().on_object(o)));
  auto s = sign_system(2);
  auto reg = share(free_module(s.target(), 0, 2));
  CHECK(theta_upper_star(s, *reg).dim(0) == 2);
}

TEST_CASE("counit is an isomorphism") {
  std::mt19937_64 rng(11);
  std::vector<OmegaSystem> systems{sign_system(2), sign_system(3), arrow_system(2), arrow_system(3),
                                   cyclic_to_trivial(2), cyclic_to_trivial(3)};
  for (auto& sys : systems)
    for (int t = 0; t < 6; ++t) {
      auto n = random_rep(rng, sys.target(), sys.prime());
      auto pulled = share(theta_upper_star(sys, *n));
      LowerStar ls = theta_lower_star(sys, pulled);
      ModuleMap eps = counit(sys, n, ls);
      CHECK(eps.is_natural());
      CHECK(eps.is_iso());
    }
}

TEST_CASE("triangle identities") {
  std::mt19937_64 rng(12);
  std::vector<OmegaSystem> systems{sign_system(2), sign_system(3), arrow_system(2), arrow_system(3),
                                   cyclic_to_trivial(3)};
  for (auto& sys : systems)
    for (int t = 0; t < 5; ++t) {
      // eps_{theta_* M} o theta_*(eta_M) = id
      auto m = random_rep(rng, sys.source(), sys.prime());
      LowerStar ls = theta_lower_star(sys, m);
      CHECK(ls.unit.is_natural());
      LowerStar ls2 = theta_lower_star(sys, ls.pullback);
      ModuleMap pushed_unit = theta_lower_star(sys, ls.unit, ls, ls2);
      ModuleMap eps = counit(sys, ls.module, ls2);
      CHECK(compose(eps, pushed_unit) == ModuleMap::identity(ls.module));
      // theta^* eps_N o eta_{theta^* N} = id
      auto n = random_rep(rng, sys.target(), sys.prime());
      auto pulled = share(theta_upper_star(sys, *n));
      LowerStar lp = theta_lower_star(sys, pulled);
      ModuleMap e = counit(sys, n, lp);
      ModuleMap pe = theta_upper_star(sys, e, lp.pullback, pulled);
      CHECK(compose(pe, lp.unit) == ModuleMap::identity(pulled));
    }
}

TEST_CASE("lower star of a map is functorial") {
  std::mt19937_64 rng(13);
  for (auto sys : {sign_system(3), arrow_system(3)}) {
    auto m = random_rep(rng, sys.source(), sys.prime());
    FreeCover fc = free_cover(m);
    LowerStar a = theta_lower_star(sys, fc.free.module);
    LowerStar b = theta_lower_star(sys, m);
    ModuleMap f = theta_lower_star(sys, fc.cover, a, b);
    CHECK(f.is_natural());
    // right exactness: a surjection stays surjective
    CHECK(f.is_surjective());
    CHECK(theta_lower_star(sys, ModuleMap::identity(m), b, b) == ModuleMap::identity(b.module));
  }
}

TEST_CASE("backends agree on surjections of groups") {
  std::mt19937_64 rng(14);
  for (auto& [g, p] : std::vector<std::pair<FinGroup, std::uint32_t>>{
           {symmetric_group(3), 2}, {symmetric_group(3), 3}, {dihedral_group(4), 2}, {quaternion_group(), 2}}) {
    auto tb = both_backends(g, p);
    for (int t = 0; t < 4; ++t) {
      auto m = random_rep(rng, tb.group.source(), p);
      LowerStar a = theta_lower_star(tb.group, m);
      LowerStar b = theta_lower_star(tb.bijective, m);
      CHECK(a.module->total_dim() == b.module->total_dim());
      auto iso = find_isomorphism(a.module, b.module, 7);
      REQUIRE(iso.has_value());
      CHECK(iso->is_natural());
      CHECK(iso->is_iso());
    }
    CHECK(derived_theta_star(tb.group, share(free_module(tb.group.source(), 0, p)), 1)->is_zero());
  }
}

TEST_CASE("lower star of a free module is free") {
  for (auto sys : {sign_system(2), arrow_system(2), arrow_system(3), cyclic_to_trivial(3)}) {
    const std::uint32_t p = sys.prime();
    for (Obj c = 0; c < sys.source()->num_objects(); ++c) {
      auto fc = share(free_module(sys.source(), c, p));
      LowerStar ls = theta_lower_star(sys, fc);
      Obj tc = sys.theta().on_object(c);
      FreeModule target = free_sum(sys.target(), {tc}, p);
      Vec gen = ls.unit.at(c).col(sys.source()->hom_index(sys.source()->identity(c)));
      ModuleMap m = map_from_free(target, ls.module, {gen});
      CHECK(is_free_on(target, m));
    }
  }
}

TEST_CASE("constant module along a map to the trivial group") {
  // theta_* of the constant module is H_0 of the source nerve
  for (auto& [cat, p] : std::vector<std::pair<CategoryPtr, std::uint32_t>>{
           {poset_chain(3), 2}, {arrow_source(3), 3}, {idempotent_pair(), 2}}) {
    const std::size_t no = cat->num_objects();
    CatFunctor collapse(cat, category_of_group(FinGroup()), std::vector<Obj>(no, 0),
                        std::vector<Mor>(cat->num_morphisms(), 0));
    auto sys = OmegaSystem::over_group(collapse, FinGroup(), p);
    auto k = share(CatModule::constant(cat, p, 1));
    CHECK(theta_lower_star(sys, k).module->dim(0) == 1);
  }
}

TEST_CASE("free resolutions") {
  std::mt19937_64 rng(15);
  for (auto& [cat, p] : std::vector<std::pair<CategoryPtr, std::uint32_t>>{
           {arrow_source(2), 2}, {arrow_source(3), 3}, {category_of_group(symmetric_group(3)), 3}}) {
    for (int t = 0; t < 3; ++t) {
      auto m = random_rep(rng, cat, p);
      check_acyclic_below(free_resolution(m, 3, CoverMode::Greedy), 3);
      // full-basis covers grow by |hom| per degree, keep them shallow
      check_acyclic_below(free_resolution(m, 2, CoverMode::FullBasis), 2);
    }
  }
  // greedy is minimal on a free module
  auto f = share(free_module(arrow_source(3), 0, 3));
  auto r = free_resolution(f, 2);
  CHECK(r.free[0].rank() == 1);
  CHECK(r.free[1].rank() == 0);
}

TEST_CASE("ec resolution") {
  SUBCASE("trivial group of trivial group") {
    auto sys = OmegaSystem::over_group(to_trivial(FinGroup()), FinGroup(), 2);
    auto ec = ec_resolution(sys, 2);
    CHECK(ec.homotopy_certified);
    CHECK(ec.resolution.free[0].rank() == 1);
    CHECK(ec.resolution.free[1].rank() == 0);
  }
  SUBCASE("C2 to the trivial group is the bar resolution") {
    auto sys = cyclic_to_trivial(2);
    auto ec = ec_resolution(sys, 4);
    CHECK(ec.homotopy_certified);
    for (std::size_t n = 0; n <= 4; ++n) CHECK(ec.resolution.free[n].rank() == 1);
    check_acyclic_below(ec.resolution, 4);
  }
  SUBCASE("sign map of S3, certified through degree four") {
    auto sys = sign_system(2);
    auto ec = ec_resolution(sys, 4, 2);
    CHECK(ec.homotopy_certified);
    REQUIRE(ec.resolution.free.size() == 3);
    std::size_t sparse_rank = 1;
    for (std::size_t n = 1; n <= 5; ++n) {
      sparse_rank *= 5;
      CHECK(ec.sparse[n].size() == 2 * sparse_rank);
    }
    // 5^n nondegenerate chains, each carrying |pi| = 2 generators
    std::size_t chains = 1;
    for (std::size_t n = 0; n <= 2; ++n, chains *= 5) CHECK(ec.resolution.free[n].rank() == 2 * chains);
    CHECK(ec.resolution.complex.truncated(2).squares_to_zero());
  }
  SUBCASE("dense exactness at low degree") {
    for (std::uint32_t p : {2u, 3u}) {
      auto sys = sign_system(p);
      auto ec = ec_resolution(sys, 2);
      CHECK(ec.homotopy_certified);
      check_acyclic_below(ec.resolution, 2);
    }
    auto arrow = OmegaSystem::over_group(
        CatFunctor(arrow_source(3), category_of_group(FinGroup()), {0, 0},
                   std::vector<Mor>(arrow_source(3)->num_morphisms(), 0)),
        FinGroup(), 3);
    auto ec = ec_resolution(arrow, 3);
    CHECK(ec.homotopy_certified);
    check_acyclic_below(ec.resolution, 3);
  }
  SUBCASE("a corrupted boundary is caught by the certificate") {
    auto sys = sign_system(3);
    auto ec = ec_resolution(sys, 2);
    REQUIRE(ec.homotopy_certified);
    ec.sparse[2][3].front().coeff = (ec.sparse[2][3].front().coeff + 1) % 3;
    CHECK_FALSE(certify_ec_exactness(sys, ec, 2));
  }
  SUBCASE("untwisting is a natural isomorphism") {
    for (auto sys : {sign_system(2), sign_system(3), cyclic_to_trivial(3)}) {
      const auto& cat = *sys.source();
      const auto& pi = sys.group();
      Untwisting u = untwisting(sys, 0);
      CHECK(u.map.is_natural());
      CHECK(u.map.is_iso());
      // basis element (phi, h) goes to (phi, theta(phi) h)
      for (Mor phi : cat.hom(0, 0))
        for (Elem h = 0; h < pi.order(); ++h) {
          Vec col = u.map.at(0).col(u.free.basis_index(h, phi));
          Vec want(col.size(), 0);
          want[cat.hom_index(phi) * pi.order() + pi.mul(sys.label(phi), h)] = 1;
          CHECK(col == want);
        }
    }
  }
  SUBCASE("augmentation is natural after untwisting") {
    // (phi, g) acts on generator (c, h) and lands on e_{theta(phi) h}
    auto sys = sign_system(3);
    auto ec = ec_resolution(sys, 1);
    CHECK(ec.resolution.complex.augmentation->is_natural());
    CHECK(compose(*ec.resolution.complex.augmentation, ec.resolution.complex.d(1)).is_zero());
  }
  SUBCASE("bijective backend is refused") { CHECK_THROWS(ec_resolution(arrow_system(2), 1)); }
}

TEST_CASE("derived lower star") {
  SUBCASE("L1 for C_p to the trivial group is one-dimensional") {
    for (std::uint32_t p : {2u, 3u, 5u}) {
      auto sys = cyclic_to_trivial(p);
      auto k = share(CatModule::constant(sys.source(), p, 1));
      CHECK(derived_theta_star(sys, k, 1)->total_dim() == 1);
      CHECK(derived_theta_star(sys, k, 2)->total_dim() == 1);
      auto ec = ec_resolution(sys, 2);
      CHECK(derived_theta_star(sys, ec.resolution, 1)->total_dim() == 1);
    }
  }
  SUBCASE("sign map of S3") {
    auto s2 = sign_system(2);
    auto ec2 = ec_resolution(s2, 2);
    CHECK(derived_theta_star(s2, ec2.resolution, 1)->is_zero());
    auto s3 = sign_system(3);
    auto ec3 = ec_resolution(s3, 2);
    // H_1(A3; k pi) with k pi restricted to A3 trivial of rank 2
    CHECK(derived_theta_star(s3, ec3.resolution, 1)->total_dim() == 2);
  }
  SUBCASE("independent of the resolution") {
    std::mt19937_64 rng(16);
    for (auto sys : {sign_system(3), arrow_system(3), arrow_system(2)}) {
      for (int t = 0; t < 3; ++t) {
        auto m = random_rep(rng, sys.source(), sys.prime());
        std::size_t top = sys.backend() == Backend::Group ? 1 : 2;
        for (std::size_t i = 1; i <= top; ++i) {
          auto a = derived_theta_star(sys, m, i, CoverMode::Greedy);
          auto b = derived_theta_star(sys, m, i, CoverMode::FullBasis);
          CHECK(a->dims() == b->dims());
        }
        // degree zero recovers theta_*
        auto r = free_resolution(m, 1);
        CHECK(derived_theta_star(sys, r, 0)->dims() == theta_lower_star(sys, m).module->dims());
      }
    }
  }
  SUBCASE("ec and greedy agree on theta^* k pi") {
    auto sys = sign_system(3);
    auto reg = share(free_module(sys.target(), 0, 3));
    auto pulled = share(theta_upper_star(sys, *reg));
    auto ec = ec_resolution(sys, 3);
    for (std::size_t i : {1u, 2u})
      CHECK(derived_theta_star(sys, pulled, i)->dims() == derived_theta_star(sys, ec.resolution, i)->dims());
  }
  SUBCASE("too short") {
    auto sys = cyclic_to_trivial(2);
    auto r = free_resolution(share(CatModule::constant(sys.source(), 2, 1)), 1);
    CHECK_THROWS(derived_theta_star(sys, r, 1));
  }
}

TEST_CASE("existence of the first resolution step") {
  for (std::uint32_t p : {2u, 3u}) {
    auto sys = arrow_system(p);
    auto fy = share(free_module(sys.target(), *sys.target()->find_object("y"), p));
    auto fx = share(free_module(sys.target(), *sys.target()->find_object("x"), p));
    CHECK(omega1_exists(sys, fy));
    CHECK_FALSE(omega1_exists(sys, fx));
    auto cyc = cyclic_to_trivial(p);
    CHECK_FALSE(omega1_exists(cyc, share(CatModule::constant(cyc.target(), p, 1))));
  }
  auto s2 = sign_system(2);
  CHECK(omega1_exists(s2, share(free_module(s2.target(), 0, 2))));
  auto s3 = sign_system(3);
  CHECK_FALSE(omega1_exists(s3, share(free_module(s3.target(), 0, 3))));
  // trivial rep of C2 at p = 2 is not projective
  auto triv2 = share(CatModule::constant(s2.target(), 2, 1));
  CHECK_THROWS_AS(omega1_exists(s2, triv2), NotProjective);
}

TEST_CASE("perfectness certificate") {
  auto a = perfectness_certificate(sign_system(2));
  CHECK(a.verdict == Verdict::Exists);
  REQUIRE(a.direct_kernel_perfect.has_value());
  CHECK(*a.direct_kernel_perfect);
  CHECK(a.agree);
  CHECK(*a.l1_dim == 0);

  auto b = perfectness_certificate(sign_system(3));
  CHECK(b.verdict == Verdict::DoesNotExist);
  CHECK(b.agree);

  for (std::uint32_t p : {2u, 3u, 5u}) {
    auto c = perfectness_certificate(cyclic_to_trivial(p));
    CHECK(c.verdict == Verdict::DoesNotExist);
    CHECK(*c.l1_dim == 1);
    CHECK(c.agree);
  }
  // A4 has abelianization C3, so it is 2-perfect
  auto a4 = perfectness_certificate(OmegaSystem::over_group(to_trivial(alternating_group(4)), FinGroup(), 2));
  CHECK(a4.verdict == Verdict::Exists);
  CHECK(a4.agree);

  for (std::uint32_t p : {2u, 3u}) {
    auto d = perfectness_certificate(arrow_system(p));
    CHECK(d.verdict == Verdict::Mixed);
    CHECK(d.agree);
    REQUIRE(d.kernels.size() == 2);
    CHECK(d.projectives.size() == 2);
    for (auto& pv : d.projectives) {
      if (pv.object == "y") CHECK(pv.verdict == Verdict::Exists);
      if (pv.object == "x") CHECK(pv.verdict == Verdict::DoesNotExist);
    }
  }
  // both backends on S3 -> C2 reach the same verdict
  for (std::uint32_t p : {2u, 3u}) {
    auto tb = both_backends(symmetric_group(3), p);
    CHECK(perfectness_certificate(tb.group).verdict == perfectness_certificate(tb.bijective).verdict);
  }
}
