#include "doctest.h"
#include "omegares/exactla.hpp"

#include <random>

using namespace omegares;

namespace {

Matrix random_matrix(std::mt19937_64& rng, std::uint32_t p, std::size_t r, std::size_t c) {
  Matrix m(p, r, c);
  std::uniform_int_distribution<std::uint32_t> d(0, p - 1);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = d(rng);
  return m;
}

// number of x in F_p^cols with A x = 0, by enumeration
std::size_t brute_kernel_size(const Matrix& a) {
  const std::uint32_t p = a.prime();
  std::size_t total = 1;
  for (std::size_t j = 0; j < a.cols(); ++j) total *= p;
  std::size_t count = 0;
  Vec x(a.cols(), 0);
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      x[j] = c % p;
      c /= p;
    }
    Vec y = a.apply(x);
    bool zero = true;
    for (auto v : y) zero = zero && v == 0;
    count += zero;
  }
  return count;
}

std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  while (e--) r *= b;
  return r;
}

}  // namespace

TEST_CASE("rref of identity and zero") {
  auto e = rref(Matrix::identity(5, 3));
  CHECK(e.rank == 3);
  CHECK(e.reduced == Matrix::identity(5, 3));
  CHECK(e.pivots == std::vector<std::size_t>{0, 1, 2});
  auto z = rref(Matrix(2, 2, 4));
  CHECK(z.rank == 0);
  CHECK(z.pivots.empty());
  CHECK(z.reduced.is_zero());
}

TEST_CASE("dependent rows over F_3") {
  Matrix a = Matrix::from_rows(3, {{1, 2}, {2, 1}});
  // row 2 = 2 * row 1 mod 3
  CHECK(a(1, 0) == (2 * a(0, 0)) % 3);
  CHECK(a(1, 1) == (2 * a(0, 1)) % 3);
  CHECK(rref(a).rank == 1);
  CHECK(rank(a) == 1);
}

TEST_CASE("kernel and image trivial cases") {
  CHECK(kernel_basis(Matrix::identity(7, 4)).dim() == 0);
  CHECK(image_basis(Matrix(7, 3, 5)).dim() == 0);
}

TEST_CASE("kernel of [1 1] over F_2 by enumeration") {
  Matrix a = Matrix::from_rows(2, {{1, 1}});
  Subspace k = kernel_basis(a);
  REQUIRE(k.dim() == 1);
  CHECK(k.vector(0) == Vec{1, 1});
  std::vector<Vec> members;
  for (Residue x = 0; x < 2; ++x)
    for (Residue y = 0; y < 2; ++y)
      if ((x + y) % 2 == 0) members.push_back({x, y});
  CHECK(members.size() == 2);
  for (auto& v : members) CHECK(k.contains(v));
}

TEST_CASE("rank-nullity and kernel membership on random matrices") {
  std::mt19937_64 rng(11);
  for (std::uint32_t p : {2u, 3u, 5u}) {
    for (int trial = 0; trial < 60; ++trial) {
      std::size_t r = 1 + rng() % 12, c = 1 + rng() % 12;
      Matrix a = random_matrix(rng, p, r, c);
      Subspace k = kernel_basis(a);
      Subspace im = image_basis(a);
      CHECK(k.dim() + im.dim() == c);
      CHECK(rank(a) == im.dim());
      for (std::size_t i = 0; i < k.dim(); ++i) {
        Vec y = a.apply(k.vector(i));
        for (auto v : y) CHECK(v == 0);
      }
      auto e = rref(a);
      CHECK(rref(e.reduced).reduced == e.reduced);
    }
  }
}

TEST_CASE("kernel size matches enumeration on tiny matrices") {
  std::mt19937_64 rng(5);
  for (std::uint32_t p : {2u, 3u}) {
    for (int trial = 0; trial < 20; ++trial) {
      Matrix a = random_matrix(rng, p, 1 + rng() % 4, 1 + rng() % 5);
      CHECK(brute_kernel_size(a) == ipow(p, kernel_basis(a).dim()));
    }
  }
}

TEST_CASE("solve returns a solution or reports none") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix a = random_matrix(rng, 5, 1 + rng() % 8, 1 + rng() % 8);
    Vec x0 = random_matrix(rng, 5, a.cols(), 1).col(0);
    Vec b = a.apply(x0);
    auto x = solve(a, b);
    REQUIRE(x.has_value());
    CHECK(a.apply(*x) == b);
    LinearSolver s(a);
    auto x2 = s.solve(b);
    REQUIRE(x2.has_value());
    CHECK(a.apply(*x2) == b);
  }
  Matrix z = Matrix::from_rows(3, {{1, 0}, {1, 0}});
  CHECK_FALSE(solve(z, Vec{1, 2}).has_value());
  CHECK_FALSE(LinearSolver(z).solve(Vec{1, 2}).has_value());
  CHECK_THROWS_AS(solve(z, Vec{1}), DimensionError);
}

TEST_CASE("subspace sum, intersection, quotient coordinates") {
  Subspace a = Subspace::span(3, 3, {{1, 0, 0}, {0, 1, 0}});
  Subspace b = Subspace::span(3, 3, {{0, 1, 0}, {0, 0, 1}});
  CHECK(sum(a, b).dim() == 3);
  Subspace i = intersection(a, b);
  CHECK(i.dim() == 1);
  CHECK(i.contains(Vec{0, 2, 0}));
  CHECK(a.quotient_coordinates(Vec{2, 1, 1}) == Vec{1});
}

TEST_CASE("Smith normal form of diag(2,3)") {
  IntMatrix a = IntMatrix::from_rows({{2, 0}, {0, 3}});
  SmithForm s = smith_normal_form(a);
  CHECK(s.d == IntMatrix::from_rows({{1, 0}, {0, 6}}));
  CHECK(s.u * a * s.v == s.d);
  CHECK(abs(s.d.determinant()) == abs(a.determinant()));
  CHECK(abs(s.u.determinant()) == 1);
  CHECK(abs(s.v.determinant()) == 1);
}

TEST_CASE("Smith normal form trivial cases") {
  CHECK(smith_normal_form(IntMatrix(2, 3)).d == IntMatrix(2, 3));
  CHECK(smith_normal_form(IntMatrix::identity(3)).d == IntMatrix::identity(3));
}

TEST_CASE("Smith normal form reconstruction on random matrices") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> e(-9, 9);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t r = 1 + rng() % 5, c = 1 + rng() % 5;
    IntMatrix a(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) a(i, j) = e(rng);
    SmithForm s = smith_normal_form(a);
    CHECK(s.u * a * s.v == s.d);
    CHECK(s.d.is_diagonal());
    CHECK(abs(s.u.determinant()) == 1);
    CHECK(abs(s.v.determinant()) == 1);
    for (std::size_t i = 0; i + 1 < s.diagonal.size(); ++i) CHECK(s.diagonal[i + 1] % s.diagonal[i] == 0);
    CHECK(invariant_factors(a) == s.diagonal);
  }
}
