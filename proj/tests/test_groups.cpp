#include "doctest.h"
#include "omegares/groups.hpp"

using namespace omegares;

namespace {

std::vector<long long> as_ll(const std::vector<BigInt>& v) {
  std::vector<long long> out;
  for (auto& x : v) out.push_back(static_cast<long long>(x));
  return out;
}

// maximal normal subgroup N with H_1(N;F_p)=0, by enumeration of all normal subgroups
SubgroupHandle brute_residual(const FinGroup& g, std::uint32_t p) {
  SubgroupHandle best = trivial_subgroup(g);
  for (auto& n : normal_subgroups(g))
    if (is_R_perfect(g, n, p) && n.order() > best.order()) best = n;
  return best;
}

}  // namespace

TEST_CASE("permutation groups") {
  CHECK(from_permutations({{1, 0}}).order() == 2);
  CHECK(from_permutations({}).order() == 1);
  FinGroup s3 = from_permutations({{1, 0, 2}, {1, 2, 0}});
  CHECK(s3.order() == 6);
  CHECK_FALSE(s3.is_abelian());
  CHECK_THROWS_AS(from_permutations({{1, 0, 2, 3, 4, 5}, {1, 2, 3, 4, 5, 0}}, GroupOptions{100}), OrderCapExceeded);
}

TEST_CASE("abelianization") {
  CHECK(as_ll(abelianization(cyclic_group(6))) == std::vector<long long>{6});
  FinGroup s3 = symmetric_group(3);
  // brute force: commutator subgroup is A3, quotient C2
  SubgroupHandle d = commutator_subgroup(s3, whole_group(s3));
  CHECK(d.order() == 3);
  CHECK(as_ll(abelianization(s3)) == std::vector<long long>{2});
  FinGroup a5 = alternating_group(5);
  CHECK(a5.order() == 60);
  CHECK(commutator_subgroup(a5, whole_group(a5)).order() == 60);
  CHECK(abelianization(a5).empty());
  CHECK(as_ll(abelianization(direct_product(cyclic_group(2), cyclic_group(2)))) == std::vector<long long>{2, 2});
  CHECK(as_ll(abelianization(quaternion_group())) == std::vector<long long>{2, 2});
}

TEST_CASE("R-perfectness") {
  CHECK_FALSE(is_R_perfect(cyclic_group(3), 3));
  CHECK_FALSE(is_R_perfect(cyclic_group(2), 2));
  CHECK(is_R_perfect(cyclic_group(3), 2));
  for (std::uint32_t p : {2u, 3u, 5u, 7u}) CHECK(is_R_perfect(alternating_group(5), p));
}

TEST_CASE("p-residual against enumeration of normal subgroups") {
  FinGroup s3 = symmetric_group(3);
  CHECK(p_residual(s3, 2).order() == 3);
  CHECK(p_residual(s3, 3).order() == 6);
  CHECK(p_residual(cyclic_group(4), 2).order() == 1);
  CHECK(p_residual(quaternion_group(), 2).order() == 1);
  std::vector<FinGroup> cat{cyclic_group(6), symmetric_group(3), symmetric_group(4), alternating_group(4),
                            dihedral_group(6), quaternion_group(), direct_product(cyclic_group(3), symmetric_group(3)),
                            dihedral_group(5), cyclic_group(12)};
  for (auto& g : cat)
    for (std::uint32_t p : {2u, 3u, 5u}) {
      auto r = p_residual(g, p);
      CHECK(r == brute_residual(g, p));
      CHECK(is_p_power(g.order() / r.order(), p));
    }
}

TEST_CASE("quotients") {
  FinGroup s3 = symmetric_group(3);
  CHECK(quotient(s3, whole_group(s3)).group.order() == 1);
  auto q = quotient(s3, p_residual(s3, 2));
  CHECK(q.group.order() == 2);
  FinGroup c6 = cyclic_group(6);
  auto c3 = generated_subgroup(c6, {2});
  CHECK(c3.order() == 3);
  auto q2 = quotient(c6, c3);
  CHECK(q2.group.order() == 2);
  CHECK(is_homomorphism(c6, q2.group, q2.projection));
  auto c2 = generated_subgroup(s3, {1});
  if (c2.order() == 2 && !is_normal(s3, c2)) CHECK_THROWS(quotient(s3, c2));
}

TEST_CASE("table validation") {
  CHECK_THROWS(FinGroup({{0, 1}, {0, 1}}));
  CHECK(FinGroup({{0, 1}, {1, 0}}).order() == 2);
}
