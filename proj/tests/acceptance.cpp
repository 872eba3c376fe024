// Acceptance run: one PASS/FAIL line per criterion. Tolerances are exact equalities; the only
// tolerances are wall-clock budgets, pinned below.
#include "omegares/exactla.hpp"
#include "omegares/groups.hpp"
#include "omegares/kan.hpp"
#include "omegares/omega.hpp"
#include "omegares/torus.hpp"
#include "test_support.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

using namespace omegares;
using namespace omegares::testing;

namespace {

constexpr double kSullivanBudgetSeconds = 60.0;     // per case
constexpr double kTorusExampleBudgetSeconds = 600.0;
constexpr int kRandomMatricesPerPrime = 500;
constexpr int kRandomIntegerMatrices = 200;
constexpr int kRandomTargetModules = 50;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// every complex built along the way is checked for d o d = 0 (criterion 10)
struct ComplexLedger {
  std::size_t checked = 0;
  std::vector<std::string> failures;
  void add(const std::string& what, bool ok) {
    ++checked;
    if (!ok) failures.push_back(what);
  }
} ledger;

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string join(const std::vector<std::size_t>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + ")";
}

std::vector<std::size_t> values(const std::vector<DegreeValue>& v) {
  std::vector<std::size_t> out;
  for (const auto& x : v) out.push_back(x.value);
  return out;
}

bool all_stable(const std::vector<DegreeValue>& v) {
  return std::all_of(v.begin(), v.end(), [](const DegreeValue& x) { return x.stable; });
}

std::vector<std::size_t> concentrated(std::size_t d0, std::size_t n) {
  std::vector<std::size_t> v(n, 0);
  v[0] = d0;
  return v;
}

OmegaResolutionState loop_build(const FinGroup& g, std::uint32_t p, std::size_t n, std::uint64_t seed = 0) {
  BuildOptions opts;
  opts.seed = seed;
  auto st = build_omega_resolution(group_loop_system(g, p), group_ring_target(), n, opts);
  ledger.add("group resolution |G|=" + std::to_string(g.order()), st.complex().squares_to_zero());
  return st;
}

// ---- criteria

Outcome sullivan_spheres() {
  Outcome o;
  for (std::size_t m : {1, 2, 4}) {
    auto t0 = Clock::now();
    auto rep = sullivan_complex(5, m, 3);
    auto next = sullivan_complex(5, m, 4);
    double dt = seconds_since(t0);
    std::vector<std::size_t> want(2 * m, 0);
    want[0] = 1;
    want[2 * m - 1] = 1;
    auto got = values(rep.betti);
    got.resize(2 * m);  // degrees <= 2m - 1
    auto got4 = values(next.betti);
    got4.resize(2 * m);
    bool stable = std::all_of(rep.betti.begin(), rep.betti.begin() + static_cast<long>(2 * m),
                              [](const DegreeValue& x) { return x.stable; });
    o.require(got == want, "m=" + std::to_string(m) + " betti " + join(got));
    o.require(stable, "m=" + std::to_string(m) + " not stable");
    o.require(got4 == got, "m=" + std::to_string(m) + " changes at L=4");
    o.require(dt < kSullivanBudgetSeconds, "m=" + std::to_string(m) + " over budget");
    ledger.add("sullivan m=" + std::to_string(m), rep.squares_to_zero && next.squares_to_zero);
    auto t = torus_parameters(TorusExtensionGroup::cyclic_character(5, m, 3));
    ledger.add("sullivan chain", sullivan_chain(t, m).squares_to_zero());
  }
  return o;
}

Outcome torus_example() {
  Outcome o;
  auto t0 = Clock::now();
  auto g = TorusExtensionGroup::from_matrices(3, 2, 2, {{-1, 0, 0, -1}});
  auto res = finite_length_builder(g, 9);
  double dt = seconds_since(t0);
  auto got = values(res.betti);
  o.require(got == std::vector<std::size_t>{1, 0, 0, 3, 0, 0, 4, 0, 0, 4}, "betti " + join(got));
  o.require(all_stable(res.betti), "unstable degrees");
  o.require(res.omega_certificate(), "certificate flags");
  o.require(dt < kTorusExampleBudgetSeconds, "over budget");
  ledger.add("T2:2 builder output", res.squares_to_zero);
  return o;
}

Outcome p_groups() {
  Outcome o;
  std::vector<std::pair<FinGroup, std::uint32_t>> cases{
      {cyclic_group(2), 2}, {cyclic_group(4), 2}, {direct_product(cyclic_group(2), cyclic_group(2)), 2},
      {quaternion_group(), 2}, {cyclic_group(3), 3}, {cyclic_group(9), 3}};
  for (const auto& [g, p] : cases) {
    auto st = loop_build(g, p, 4);
    o.require(st.betti() == concentrated(g.order(), 4), "|G|=" + std::to_string(g.order()) + " " + join(st.betti()));
    o.require(st.certificate && st.certificate->all_pass(), "certificate");
  }
  return o;
}

Outcome semisimple_kernel() {
  // kC6 = kC2 (x) kC3 and kC3 is semisimple at p = 2, so theta_* is M -> e M with e = 1 + u + u^2;
  // the oracle recomputes dim theta_*(Z_n) and dim theta_*(H_n) from e alone
  Outcome o;
  FinGroup g = cyclic_group(6);
  Elem u = 2;
  auto st = loop_build(g, 2, 4);
  o.require(st.betti() == concentrated(2, 4), "betti " + join(st.betti()));
  const auto& cx = st.complex();
  auto projector = [&](const ModulePtr& m) {
    return Matrix::identity(2, m->dim(0)) + m->action(u) + m->action(g.mul(u, u));
  };
  for (const auto& s : st.steps) {
    const std::size_t n = s.degree;
    const Matrix& out = n == 0 ? cx.augmentation->at(0) : cx.d(n).at(0);
    Subspace z = kernel_basis(out);
    Matrix e = projector(cx.terms[n]);
    Matrix zb = z.basis().transpose();  // columns span Z_n
    const std::size_t pushed_z = z.dim() ? rank(e * zb) : 0;
    o.require(s.cycles_dim == z.dim(), "cycles at " + std::to_string(n));
    o.require(s.pushed_cycles_dim == pushed_z, "theta_* cycles at " + std::to_string(n));
    if (n + 1 <= cx.length()) {
      Matrix b = cx.d(n + 1).at(0);
      const std::size_t pushed_b = b.cols() ? rank(e * b) : 0;
      o.require(s.pushed_homology_dim == pushed_z - pushed_b, "theta_* homology at " + std::to_string(n));
    }
    o.require(s.consistent, "step consistency at " + std::to_string(n));
  }
  return o;
}

Outcome symmetric_p2() {
  Outcome o;
  auto c2 = nerve_chain_complex(*category_of_group(cyclic_group(2)), 2, 4);
  auto s3 = nerve_chain_complex(*category_of_group(symmetric_group(3)), 2, 4);
  for (std::size_t i = 0; i <= 4; ++i) o.require(c2.betti[i] == s3.betti[i], "nerve H_" + std::to_string(i));
  for (std::size_t n = 1; n < s3.boundaries.size(); ++n)
    ledger.add("nerve of S3", (s3.boundaries[n - 1] * s3.boundaries[n]).is_zero());
  auto st = loop_build(symmetric_group(3), 2, 4);
  o.require(st.betti() == concentrated(2, 4), "betti " + join(st.betti()));
  return o;
}

OmegaSystem arrow(std::uint32_t p) {
  Json j = fixture("arrow_with_cyclic_loop_p" + std::to_string(p));
  auto theta = functor_from_json(j.at("functor"), category_from_json(j.at("source")),
                                 category_from_json(j.at("target").at("category")));
  return OmegaSystem::bijective(theta, p);
}

OmegaSystem to_trivial(const FinGroup& g, std::uint32_t p) {
  std::vector<Elem> map(g.order(), 0);
  auto theta = functor_of_homomorphism(category_of_group(g), category_of_group(FinGroup()), map);
  return OmegaSystem::over_group(theta, FinGroup(), p);
}

Outcome existence() {
  Outcome o;
  for (std::uint32_t p : {2u, 3u}) {
    auto sys = to_trivial(cyclic_group(p), p);
    auto k = share(CatModule::constant(sys.target(), p, 1));
    o.require(!omega1_exists(sys, k), "C_p -> 1 at p=" + std::to_string(p));
    auto a = arrow(p);
    auto fx = share(free_module(a.target(), *a.target()->find_object("x"), p));
    auto fy = share(free_module(a.target(), *a.target()->find_object("y"), p));
    o.require(!omega1_exists(a, fx), "F_x at p=" + std::to_string(p));
    o.require(omega1_exists(a, fy), "F_y at p=" + std::to_string(p));
    auto base = build_base(a, {*a.target()->find_object("y")});
    auto rep = check_omega_axioms(a, base.complex(), 0, true);
    o.require(base.complex().length() == 0 && rep.all_pass(), "F_y length-0 resolution");
  }
  return o;
}

Outcome uniqueness() {
  Outcome o;
  std::vector<std::pair<FinGroup, std::uint32_t>> cases{
      {cyclic_group(4), 2}, {cyclic_group(6), 2}, {symmetric_group(3), 2}, {symmetric_group(3), 3}};
  for (const auto& [g, p] : cases) {
    auto sys = group_loop_system(g, p);
    std::vector<OmegaResolutionState> runs;
    for (std::uint64_t seed : {0u, 7u, 1234u}) runs.push_back(loop_build(g, p, 6, seed));
    const std::string tag = "|G|=" + std::to_string(g.order()) + " p=" + std::to_string(p);
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = a + 1; b < 3; ++b) {
        o.require(runs[a].betti() == runs[b].betti(), tag + " betti");
        o.require(compare_resolutions(sys, runs[a], runs[b], 5).equivalent(), tag + " comparison");
      }
  }
  return o;
}

Outcome torus_base() {
  Outcome o;
  struct Case {
    std::uint32_t p;
    std::size_t r, level;
  };
  for (const auto& c : {Case{3, 1, 4}, Case{3, 2, 3}}) {
    auto g = TorusExtensionGroup::trivial(c.p, c.r, c.level);
    auto rep = torus_resolution(g);
    const std::string tag = "r=" + std::to_string(c.r);
    o.require(rep.h0_is_k, tag + " H_0");
    o.require(rep.t_trivial, tag + " T-trivial");
    o.require(rep.coinvariants_acyclic && rep.coinvariants[0].value == 1, tag + " k (x) D");
    o.require(all_stable(rep.coinvariants), tag + " coinvariants unstable");
    auto t = torus_parameters(g);
    const auto& a = t.top();
    for (std::size_t n = 1; n < t.level(); ++n) {
      if (c.r == 1) {
        o.require(a.mul(t.mu(n + 1), t.nu(n)) == t.mu(n), tag + " mu nu at " + std::to_string(n));
        o.require(a.mul(t.nu(n), t.sigma(n)) == t.sigma(n + 1), tag + " nu sigma at " + std::to_string(n));
      }
    }
    if (c.r == 1) o.require(t.nu(0) == t.sigma(1), "nu_0");
    o.require(t.all_checks(), tag + " phi/psi checks");
    for (std::size_t n = 1; n <= t.level(); ++n) ledger.add("Koszul D^(n)", koszul_complex(t, n).squares_to_zero());
    ledger.add("telescope", torus_telescope(t).squares_to_zero());
  }
  return o;
}

Outcome perfectness_bridge() {
  // theta : B(G) -> B(G/N) for a catalog of normal subgroups N
  Outcome o;
  struct Case {
    std::string name;
    FinGroup g;
    std::function<SubgroupHandle(const FinGroup&)> kernel;
    std::uint32_t p;
  };
  auto derived = [](const FinGroup& g) { return commutator_subgroup(g, whole_group(g)); };
  auto all = [](const FinGroup& g) { return whole_group(g); };
  std::vector<Case> cases{
      {"C2 -> 1", cyclic_group(2), all, 2},
      {"C3 -> 1", cyclic_group(3), all, 2},
      {"S3 -> C2", symmetric_group(3), derived, 2},
      {"S3 -> C2", symmetric_group(3), derived, 3},
      {"A4 -> 1", alternating_group(4), all, 2},
      {"A4 -> C3", alternating_group(4), derived, 2},
      {"Q8 -> C2xC2", quaternion_group(), derived, 2},
      {"C6 -> C2", cyclic_group(6), [](const FinGroup& g) { return generated_subgroup(g, {2}); }, 2}};
  std::size_t perfect = 0;
  for (const auto& c : cases) {
    SubgroupHandle n = c.kernel(c.g);
    Quotient q = quotient(c.g, n);
    auto theta = functor_of_homomorphism(category_of_group(c.g), category_of_group(q.group), q.projection);
    auto sys = OmegaSystem::over_group(theta, q.group, c.p);
    const bool direct = is_R_perfect(c.g, n, c.p);
    auto ec = ec_resolution(sys, 2);
    const bool l1_zero = derived_theta_star(sys, ec.resolution, 1)->total_dim() == 0;
    o.require(direct == l1_zero, c.name + " p=" + std::to_string(c.p));
    perfect += direct;
    ledger.add("ec resolution " + c.name, ec.resolution.complex.squares_to_zero());
  }
  o.require(perfect > 0 && perfect < cases.size(), "catalog is one-sided");
  return o;
}

Outcome infrastructure() {
  Outcome o;
  std::mt19937_64 rng(20240611);
  for (std::uint32_t p : {2u, 3u, 5u, 7u}) {
    for (int t = 0; t < kRandomMatricesPerPrime; ++t) {
      std::size_t r = 1 + rng() % 14, c = 1 + rng() % 14;
      Matrix a(p, r, c);
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) a(i, j) = static_cast<Residue>(rng() % p);
      if (kernel_basis(a).dim() + rank(a) != c) {
        o.require(false, "rank-nullity at p=" + std::to_string(p));
        break;
      }
    }
  }
  for (int t = 0; t < kRandomIntegerMatrices; ++t) {
    std::size_t r = 1 + rng() % 6, c = 1 + rng() % 6;
    IntMatrix a(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) a(i, j) = static_cast<long long>(rng() % 41) - 20;
    auto s = smith_normal_form(a);
    bool ok = s.u * a * s.v == s.d && s.d.is_diagonal();
    for (std::size_t i = 1; i < s.diagonal.size(); ++i) ok = ok && s.diagonal[i] % s.diagonal[i - 1] == 0;
    if (!ok) {
      o.require(false, "SNF reconstruction");
      break;
    }
  }
  std::vector<std::pair<std::string, OmegaSystem>> systems{
      {"C2 -> 1", to_trivial(cyclic_group(2), 2)}, {"C3 -> 1", to_trivial(cyclic_group(3), 3)},
      {"arrow p=2", arrow(2)},                      {"arrow p=3", arrow(3)}};
  for (std::uint32_t p : {2u, 3u}) {
    FinGroup g = symmetric_group(3);
    Quotient q = quotient(g, commutator_subgroup(g, whole_group(g)));
    auto theta = functor_of_homomorphism(category_of_group(g), category_of_group(q.group), q.projection);
    systems.emplace_back("S3 -> C2 p=" + std::to_string(p), OmegaSystem::over_group(theta, q.group, p));
  }
  for (const auto& [name, sys] : systems)
    for (int t = 0; t < kRandomTargetModules; ++t) {
      auto n = random_module(rng, sys.target(), sys.prime());
      auto pulled = share(theta_upper_star(sys, *n));
      LowerStar ls = theta_lower_star(sys, pulled);
      ModuleMap eps = counit(sys, n, ls);
      if (!eps.is_natural() || !eps.is_iso()) {
        o.require(false, "counit on " + name);
        break;
      }
    }
  o.require(ledger.failures.empty(), "d o d != 0 on " + std::to_string(ledger.failures.size()) + " complexes");
  o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(ledger.checked) + " complexes checked";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  // criterion 10 last: it reads the complex ledger filled by the others
  std::vector<Criterion> criteria{
      {1, "Sullivan spheres p=5, m in {1,2,4}, L=3 stable at 4", sullivan_spheres},
      {2, "rank 2 torus with H = <-I> at p=3: (1,0,0,3,0,0,4,0,0,4)", torus_example},
      {3, "p-group degeneracy", p_groups},
      {4, "C6 at p=2 against the semisimple projector", semisimple_kernel},
      {5, "S3 at p=2 against B C2", symmetric_p2},
      {6, "existence dichotomy", existence},
      {7, "uniqueness over three seeds", uniqueness},
      {8, "torus base cases and mu/nu/sigma identities", torus_base},
      {9, "perfectness bridge on 8 quotients", perfectness_bridge},
      {10, "infrastructure properties", infrastructure}};
  int failed = 0;
  for (const auto& c : criteria) {
    auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %2d: %s [%.2fs]%s%s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, seconds_since(t0),
                o.detail.empty() ? "" : " -- ", o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
