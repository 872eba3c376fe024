#include "omegares/torus.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <functional>
#include <future>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace omegares {

namespace {

std::uint64_t ipow(std::uint64_t b, std::size_t e) {
  std::uint64_t r = 1;
  while (e--) r *= b;
  return r;
}

long long mod_ll(long long v, long long m) {
  long long r = v % m;
  return r < 0 ? r + m : r;
}

std::vector<std::vector<std::size_t>> subsets(std::size_t r, std::size_t m) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (cur.size() == m) {
      out.push_back(cur);
      return;
    }
    for (std::size_t i = start; i < r; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

std::string subset_label(const std::vector<std::size_t>& s) {
  if (s.empty()) return "1";
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "^e" : "e") + std::to_string(s[i]);
  return out;
}

// sign of a permutation given as a vector
int perm_sign(const std::vector<std::size_t>& perm) {
  int s = 1;
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (seen[i]) continue;
    std::size_t len = 0;
    for (std::size_t j = i; !seen[j]; j = perm[j]) {
      seen[j] = true;
      ++len;
    }
    if (len % 2 == 0) s = -s;
  }
  return s;
}

Residue det_mod_p(const Matrix& a, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
  PrimeField k(a.prime());
  const std::size_t m = rows.size();
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  Residue total = 0;
  do {
    Residue term = perm_sign(perm) > 0 ? 1 % a.prime() : k.neg(1 % a.prime());
    for (std::size_t i = 0; i < m && term; ++i) term = k.mul(term, a(rows[i], cols[perm[i]]));
    total = k.add(total, term);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

// determinant of the (rows, cols) minor of a ring matrix
RingElem ring_minor(const TruncatedTorusAlgebra& alg, const RingMatrix& a, const std::vector<std::size_t>& rows,
                    const std::vector<std::size_t>& cols) {
  const std::size_t m = rows.size();
  if (m == 0) return alg.one();
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  RingElem total = alg.zero();
  PrimeField k(alg.prime());
  do {
    RingElem term = alg.one();
    for (std::size_t i = 0; i < m; ++i) term = alg.mul(term, a.at(rows[i], cols[perm[i]]));
    total = perm_sign(perm) > 0 ? alg.add(total, term) : alg.sub(total, term);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

}  // namespace

// ---------------------------------------------------------------------------
// the algebra

TruncatedTorusAlgebra::TruncatedTorusAlgebra(std::uint32_t p, std::size_t rank, std::size_t level)
    : p_(p), rank_(rank), level_(level) {
  if (!is_prime(p)) throw TorusError("torus algebra needs a prime");
  if (rank == 0 || level == 0) throw TorusError("torus algebra needs rank and level at least 1");
  modulus_ = ipow(p, level);
  long double est = std::pow(static_cast<long double>(modulus_), static_cast<long double>(rank));
  if (est > 2.0e6L) throw TorusError("torus algebra too large: p^(level*rank) exceeds 2e6");
  dim_ = static_cast<std::size_t>(ipow(modulus_, rank));
}

std::size_t TruncatedTorusAlgebra::index(const std::vector<std::uint64_t>& coords) const {
  std::size_t idx = 0;
  for (std::size_t i = rank_; i-- > 0;) idx = idx * modulus_ + coords[i] % modulus_;
  return idx;
}

std::vector<std::uint64_t> TruncatedTorusAlgebra::coords(std::size_t g) const {
  std::vector<std::uint64_t> c(rank_);
  for (std::size_t i = 0; i < rank_; ++i) {
    c[i] = g % modulus_;
    g /= modulus_;
  }
  return c;
}

std::size_t TruncatedTorusAlgebra::add(std::size_t a, std::size_t b) const {
  std::size_t out = 0, mult = 1;
  for (std::size_t i = 0; i < rank_; ++i) {
    std::size_t s = a % modulus_ + b % modulus_;
    if (s >= modulus_) s -= modulus_;
    out += s * mult;
    mult *= modulus_;
    a /= modulus_;
    b /= modulus_;
  }
  return out;
}

std::size_t TruncatedTorusAlgebra::generator(std::size_t n, std::size_t axis) const {
  if (n > level_) throw TorusError("generator above the truncation level");
  std::vector<std::uint64_t> c(rank_, 0);
  c[axis] = ipow(p_, level_ - n) % modulus_;
  return index(c);
}

std::size_t TruncatedTorusAlgebra::act(const std::vector<long long>& a, std::size_t g) const {
  auto c = coords(g);
  std::vector<std::uint64_t> out(rank_, 0);
  const long long m = static_cast<long long>(modulus_);
  for (std::size_t i = 0; i < rank_; ++i) {
    unsigned __int128 acc = 0;
    for (std::size_t j = 0; j < rank_; ++j)
      acc += static_cast<unsigned __int128>(mod_ll(a[i * rank_ + j], m)) * c[j];
    out[i] = static_cast<std::uint64_t>(acc % modulus_);
  }
  return index(out);
}

RingElem TruncatedTorusAlgebra::basis(std::size_t g) const {
  RingElem x(dim_, 0);
  x[g] = 1 % p_;
  return x;
}

RingElem TruncatedTorusAlgebra::mul(const RingElem& x, const RingElem& y) const {
  std::vector<std::size_t> nx, ny;
  for (std::size_t i = 0; i < dim_; ++i)
    if (x[i]) nx.push_back(i);
  for (std::size_t i = 0; i < dim_; ++i)
    if (y[i]) ny.push_back(i);
  RingElem out(dim_, 0);
  if (nx.empty() || ny.empty()) return out;
  if (nx.size() > ny.size()) return mul(y, x);
  std::vector<std::uint64_t> acc(dim_, 0);
  if (rank_ == 1) {
    for (auto a : nx) {
      const std::uint64_t xa = x[a];
      for (auto b : ny) {
        std::size_t s = a + b;
        if (s >= dim_) s -= dim_;
        acc[s] += xa * y[b];
      }
    }
  } else {
    for (auto a : nx) {
      const std::uint64_t xa = x[a];
      for (auto b : ny) acc[add(a, b)] += xa * y[b];
    }
  }
  for (std::size_t i = 0; i < dim_; ++i) out[i] = static_cast<Residue>(acc[i] % p_);
  return out;
}

RingElem TruncatedTorusAlgebra::add(const RingElem& x, const RingElem& y) const {
  PrimeField k(p_);
  RingElem out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) out[i] = k.add(x[i], y[i]);
  return out;
}

RingElem TruncatedTorusAlgebra::sub(const RingElem& x, const RingElem& y) const {
  PrimeField k(p_);
  RingElem out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) out[i] = k.sub(x[i], y[i]);
  return out;
}

RingElem TruncatedTorusAlgebra::scale(const RingElem& x, Residue c) const {
  PrimeField k(p_);
  RingElem out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) out[i] = k.mul(x[i], c);
  return out;
}

RingElem TruncatedTorusAlgebra::pow(const RingElem& x, std::uint64_t e) const {
  RingElem result = one(), base = x;
  while (e) {
    if (e & 1) result = mul(result, base);
    e >>= 1;
    if (e) base = mul(base, base);
  }
  return result;
}

RingElem TruncatedTorusAlgebra::shift(const RingElem& x, std::size_t g) const {
  RingElem out(dim_, 0);
  for (std::size_t i = 0; i < dim_; ++i)
    if (x[i]) out[add(i, g)] = x[i];
  return out;
}

RingElem TruncatedTorusAlgebra::conjugate(const std::vector<long long>& a, const RingElem& x) const {
  RingElem out(dim_, 0);
  for (std::size_t i = 0; i < dim_; ++i)
    if (x[i]) out[act(a, i)] = x[i];  // act is a bijection
  return out;
}

Residue TruncatedTorusAlgebra::augmentation(const RingElem& x) const {
  std::uint64_t s = 0;
  for (auto v : x) s += v;
  return static_cast<Residue>(s % p_);
}

bool TruncatedTorusAlgebra::is_zero(const RingElem& x) const {
  return std::all_of(x.begin(), x.end(), [](Residue v) { return v == 0; });
}

RingElem TruncatedTorusAlgebra::sigma(std::size_t n) const {
  if (n > level_) throw TorusError("sigma above the truncation level");
  const std::uint64_t step = ipow(p_, level_ - n);
  RingElem out(dim_, 0);
  for (std::size_t g = 0; g < dim_; ++g) {
    auto c = coords(g);
    if (std::all_of(c.begin(), c.end(), [&](std::uint64_t v) { return v % step == 0; })) out[g] = 1 % p_;
  }
  return out;
}

RingElem TruncatedTorusAlgebra::embed(const TruncatedTorusAlgebra& lower, const RingElem& x) const {
  if (lower.p_ != p_ || lower.rank_ != rank_ || lower.level_ > level_) throw TorusError("embed: incompatible algebras");
  const std::uint64_t f = ipow(p_, level_ - lower.level_);
  RingElem out(dim_, 0);
  for (std::size_t g = 0; g < lower.dim_; ++g) {
    if (!x[g]) continue;
    auto c = lower.coords(g);
    for (auto& v : c) v *= f;
    out[index(c)] = x[g];
  }
  return out;
}

std::size_t TruncatedTorusAlgebra::support_level(const RingElem& x) const {
  std::size_t need = 0;
  for (std::size_t g = 0; g < dim_; ++g) {
    if (!x[g]) continue;
    for (auto v : coords(g)) {
      std::size_t n = level_;
      while (n > 0 && v % ipow(p_, level_ - n + 1) == 0) --n;
      need = std::max(need, n);
    }
  }
  return need;
}

// ---------------------------------------------------------------------------
// the group H

namespace {

using IntMat = TorusExtensionGroup::IntMat;

IntMat mat_mul(const IntMat& a, const IntMat& b, std::size_t r, long long m) {
  IntMat c(r * r, 0);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      __int128 acc = 0;
      for (std::size_t l = 0; l < r; ++l) acc += static_cast<__int128>(a[i * r + l]) * b[l * r + j];
      c[i * r + j] = static_cast<long long>(((acc % m) + m) % m);
    }
  return c;
}

IntMat mat_identity(std::size_t r) {
  IntMat a(r * r, 0);
  for (std::size_t i = 0; i < r; ++i) a[i * r + i] = 1;
  return a;
}

}  // namespace

TorusExtensionGroup TorusExtensionGroup::from_matrices(std::uint32_t p, std::size_t rank, std::size_t level,
                                                       const std::vector<IntMat>& generators) {
  if (!is_prime(p)) throw TorusError("H action: modulus must be a prime power");
  if (rank == 0 || level == 0) throw TorusError("H action: rank and level must be at least 1");
  TorusExtensionGroup g;
  g.p_ = p;
  g.rank_ = rank;
  g.level_ = level;
  g.generator_matrices_ = generators;
  const long long m = static_cast<long long>(ipow(p, level));
  std::map<IntMat, std::size_t> seen;
  auto id = mat_identity(rank);
  for (auto& v : id) v %= m;
  g.elements_.push_back(id);
  seen[id] = 0;
  std::vector<IntMat> gens;
  for (const auto& a : generators) {
    if (a.size() != rank * rank) throw TorusError("H action: generator is not rank x rank");
    IntMat r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = mod_ll(a[i], m);
    Matrix modp(p, rank, rank);
    for (std::size_t i = 0; i < rank; ++i)
      for (std::size_t j = 0; j < rank; ++j) modp(i, j) = static_cast<Residue>(mod_ll(a[i * rank + j], p));
    if (!omegares::inverse(modp)) throw TorusError("H action: generator is not invertible mod p");
    gens.push_back(r);
  }
  for (std::size_t head = 0; head < g.elements_.size(); ++head) {
    for (const auto& a : gens) {
      IntMat c = mat_mul(a, g.elements_[head], rank, m);
      if (!seen.count(c)) {
        if (g.elements_.size() >= 20000) throw TorusError("H action: group too large");
        seen[c] = g.elements_.size();
        g.elements_.push_back(c);
      }
    }
  }
  const std::size_t n = g.elements_.size();
  if (n % p == 0) throw TorusError("H action: |H| = " + std::to_string(n) + " is divisible by p");
  for (const auto& a : gens) g.generators_.push_back(seen.at(a));
  g.table_.assign(n, std::vector<std::size_t>(n));
  g.inverse_.assign(n, 0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      g.table_[a][b] = seen.at(mat_mul(g.elements_[a], g.elements_[b], rank, m));
      if (g.table_[a][b] == 0) g.inverse_[a] = b;
    }
  return g;
}

TorusExtensionGroup TorusExtensionGroup::cyclic_character(std::uint32_t p, std::size_t m, std::size_t level) {
  if (!is_prime(p)) throw TorusError("character: p must be prime");
  if (m == 0 || (p - 1) % m != 0) throw TorusError("character: m must divide p - 1");
  if (m == 1) return trivial(p, 1, level);
  PrimeField k(p);
  // smallest primitive root
  Residue zeta = 0;
  for (Residue c = 2; c < p && !zeta; ++c) {
    bool prim = true;
    for (std::uint32_t q = 2; q * q <= p - 1 || q == p - 1; ++q) {
      if ((p - 1) % q) continue;
      bool q_prime = true;
      for (std::uint32_t d = 2; d * d <= q; ++d)
        if (q % d == 0) q_prime = false;
      if (q_prime && k.pow(c, (p - 1) / q) == 1) prim = false;
      if (q == p - 1) break;
    }
    if (prim) zeta = c;
  }
  Residue gen = k.pow(zeta, (p - 1) / m);
  // Teichmuller lift: gen^(p^(level-1)) mod p^level
  const std::uint64_t mod = ipow(p, level);
  unsigned __int128 w = 1, b = gen;
  std::uint64_t e = ipow(p, level - 1);
  while (e) {
    if (e & 1) w = (w * b) % mod;
    b = (b * b) % mod;
    e >>= 1;
  }
  return from_matrices(p, 1, level, {IntMat{static_cast<long long>(w)}});
}

TorusExtensionGroup TorusExtensionGroup::trivial(std::uint32_t p, std::size_t rank, std::size_t level) {
  return from_matrices(p, rank, level, {});
}

std::size_t TorusExtensionGroup::product(std::size_t a, std::size_t b) const { return table_[a][b]; }

Matrix TorusExtensionGroup::on_v(std::size_t h) const {
  Matrix out(p_, rank_, rank_);
  for (std::size_t i = 0; i < rank_; ++i)
    for (std::size_t j = 0; j < rank_; ++j) out(i, j) = static_cast<Residue>(mod_ll(elements_[h][i * rank_ + j], p_));
  return out;
}

Residue TorusExtensionGroup::character(std::size_t h) const {
  if (rank_ != 1) throw TorusError("character of a rank > 1 action");
  return static_cast<Residue>(mod_ll(elements_[h][0], p_));
}

TorusExtensionGroup TorusExtensionGroup::at_level(std::size_t level) const {
  if (level == level_) return *this;
  if (level > level_) {
    // the character lift has to be recomputed; plain matrices are reused
    if (rank_ == 1 && generator_matrices_.size() == 1 && order() > 1) {
      const long long w = generator_matrices_[0][0];
      const long long mm = static_cast<long long>(ipow(p_, level_));
      // Teichmuller lifts reduce to each other; detect them by order m | p - 1
      if (order() <= p_ - 1 && (p_ - 1) % order() == 0 && mod_ll(w, mm) == elements_[generators_[0]][0])
        return cyclic_character(p_, order(), level);
    }
  }
  return from_matrices(p_, rank_, level, generator_matrices_);
}

// ---------------------------------------------------------------------------
// representations of H

HRep HRep::trivial(const TorusExtensionGroup& g, std::size_t dim) {
  HRep r;
  r.p = g.prime();
  r.dim = dim;
  r.rho.assign(g.order(), Matrix::identity(g.prime(), dim));
  return r;
}

HRep HRep::on_v(const TorusExtensionGroup& g) {
  HRep r;
  r.p = g.prime();
  r.dim = g.rank();
  for (std::size_t h = 0; h < g.order(); ++h) r.rho.push_back(g.on_v(h));
  return r;
}

HRep HRep::exterior_power(const TorusExtensionGroup& g, std::size_t m) {
  auto sets = subsets(g.rank(), m);
  HRep r;
  r.p = g.prime();
  r.dim = sets.size();
  for (std::size_t h = 0; h < g.order(); ++h) {
    Matrix a = g.on_v(h);
    Matrix out(g.prime(), sets.size(), sets.size());
    for (std::size_t i = 0; i < sets.size(); ++i)
      for (std::size_t j = 0; j < sets.size(); ++j) out(i, j) = m == 0 ? 1 % g.prime() : det_mod_p(a, sets[i], sets[j]);
    r.rho.push_back(out);
  }
  return r;
}

HRep HRep::character_power(const TorusExtensionGroup& g, long long j) {
  PrimeField k(g.prime());
  HRep r;
  r.p = g.prime();
  r.dim = 1;
  const long long e = mod_ll(j, static_cast<long long>(g.prime()) - 1 == 0 ? 1 : g.prime() - 1);
  for (std::size_t h = 0; h < g.order(); ++h) {
    Matrix m(g.prime(), 1, 1);
    m(0, 0) = k.pow(g.character(h), static_cast<std::uint64_t>(e));
    r.rho.push_back(m);
  }
  return r;
}

HRep HRep::tensor(const HRep& a, const HRep& b) {
  HRep r;
  r.p = a.p;
  r.dim = a.dim * b.dim;
  PrimeField k(a.p);
  for (std::size_t h = 0; h < a.rho.size(); ++h) {
    Matrix m(a.p, r.dim, r.dim);
    for (std::size_t i = 0; i < a.dim; ++i)
      for (std::size_t j = 0; j < a.dim; ++j) {
        Residue x = a.rho[h](i, j);
        if (!x) continue;
        for (std::size_t u = 0; u < b.dim; ++u)
          for (std::size_t v = 0; v < b.dim; ++v) m(i * b.dim + u, j * b.dim + v) = k.mul(x, b.rho[h](u, v));
      }
    r.rho.push_back(m);
  }
  return r;
}

HRep HRep::direct_sum(const HRep& a, const HRep& b) {
  if (a.dim == 0) return b;
  if (b.dim == 0) return a;
  HRep r;
  r.p = a.p;
  r.dim = a.dim + b.dim;
  for (std::size_t h = 0; h < a.rho.size(); ++h) r.rho.push_back(Matrix::direct_sum(a.rho[h], b.rho[h]));
  return r;
}

bool HRep::is_trivial() const {
  return std::all_of(rho.begin(), rho.end(), [](const Matrix& m) { return m.is_identity(); });
}

std::size_t HRep::invariants_dim() const {
  if (dim == 0) return 0;
  PrimeField k(p);
  Matrix e(p, dim, dim);
  for (const auto& m : rho) e = e + m;
  return rank(e.scaled(k.inv(static_cast<Residue>(rho.size() % p))));
}

// ---------------------------------------------------------------------------
// ring matrices

RingMatrix::RingMatrix(const TruncatedTorusAlgebra& a, std::size_t r, std::size_t c)
    : rows(r), cols(c), entries(r * c, a.zero()) {}

RingMatrix ring_multiply(const TruncatedTorusAlgebra& a, const RingMatrix& x, const RingMatrix& y) {
  if (x.cols != y.rows) throw DimensionError("ring_multiply: shape mismatch");
  RingMatrix out(a, x.rows, y.cols);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t l = 0; l < x.cols; ++l) {
      const RingElem& xi = x.at(i, l);
      if (a.is_zero(xi)) continue;
      for (std::size_t j = 0; j < y.cols; ++j) {
        const RingElem& yj = y.at(l, j);
        if (a.is_zero(yj)) continue;
        out.at(i, j) = a.add(out.at(i, j), a.mul(xi, yj));
      }
    }
  return out;
}

RingMatrix ring_add(const TruncatedTorusAlgebra& a, const RingMatrix& x, const RingMatrix& y, Residue scale_y) {
  if (x.rows != y.rows || x.cols != y.cols) throw DimensionError("ring_add: shape mismatch");
  RingMatrix out = x;
  for (std::size_t i = 0; i < x.entries.size(); ++i)
    out.entries[i] = a.add(x.entries[i], a.scale(y.entries[i], scale_y));
  return out;
}

bool ring_is_zero(const TruncatedTorusAlgebra& a, const RingMatrix& x) {
  return std::all_of(x.entries.begin(), x.entries.end(), [&](const RingElem& e) { return a.is_zero(e); });
}

RingMatrix ring_sandwich(const TruncatedTorusAlgebra& a, const Matrix& left, const RingMatrix& x,
                         const Matrix& right) {
  if (left.cols() != x.rows || x.cols != right.rows()) throw DimensionError("ring_sandwich: shape mismatch");
  PrimeField k(a.prime());
  // x * right first
  RingMatrix mid(a, x.rows, right.cols());
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t l = 0; l < x.cols; ++l) {
      const RingElem& e = x.at(i, l);
      if (a.is_zero(e)) continue;
      for (std::size_t j = 0; j < right.cols(); ++j) {
        Residue c = right(l, j);
        if (c) mid.at(i, j) = a.add(mid.at(i, j), a.scale(e, c));
      }
    }
  RingMatrix out(a, left.rows(), right.cols());
  for (std::size_t i = 0; i < left.rows(); ++i)
    for (std::size_t l = 0; l < left.cols(); ++l) {
      Residue c = left(i, l);
      if (!c) continue;
      for (std::size_t j = 0; j < right.cols(); ++j) {
        const RingElem& e = mid.at(l, j);
        if (!a.is_zero(e)) out.at(i, j) = a.add(out.at(i, j), a.scale(e, c));
      }
    }
  return out;
}

Matrix flatten(const TruncatedTorusAlgebra& a, const RingMatrix& x) {
  const std::size_t n = a.dim();
  const std::uint32_t p = a.prime();
  Matrix out(p, x.rows * n, x.cols * n);
  std::vector<std::size_t> addt;  // rank-1 fast path uses index arithmetic
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < x.cols; ++j) {
      const RingElem& e = x.at(i, j);
      for (std::size_t u = 0; u < n; ++u) {
        if (!e[u]) continue;
        for (std::size_t s = 0; s < n; ++s) {
          std::size_t t = a.rank() == 1 ? (s + u >= n ? s + u - n : s + u) : a.add(s, u);
          Residue& cell = out(i * n + t, j * n + s);
          cell = (cell + e[u]) % p;
        }
      }
    }
  return out;
}

Matrix augment(const TruncatedTorusAlgebra& a, const RingMatrix& x) {
  Matrix out(a.prime(), x.rows, x.cols);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < x.cols; ++j) out(i, j) = a.augmentation(x.at(i, j));
  return out;
}

namespace {

RingMatrix conjugate_entries(const TruncatedTorusAlgebra& a, const std::vector<long long>& m, const RingMatrix& x) {
  RingMatrix out = x;
  for (auto& e : out.entries) e = a.conjugate(m, e);
  return out;
}

bool ring_equal(const RingMatrix& x, const RingMatrix& y) {
  return x.rows == y.rows && x.cols == y.cols && x.entries == y.entries;
}

}  // namespace

bool is_equivariant(const TruncatedTorusAlgebra& a, const TorusExtensionGroup& g, const RingMatrix& x,
                    const HRep& src, const HRep& tgt) {
  for (auto h : g.generators()) {
    RingMatrix lhs = ring_sandwich(a, Matrix::identity(a.prime(), x.rows), x, src.rho[h]);
    RingMatrix rhs = ring_sandwich(a, tgt.rho[h], conjugate_entries(a, g.matrix(h), x),
                                   Matrix::identity(a.prime(), x.cols));
    if (!ring_equal(lhs, rhs)) return false;
  }
  return true;
}

RingMatrix average_over_h(const TruncatedTorusAlgebra& a, const TorusExtensionGroup& g, const RingMatrix& x,
                          const HRep& src, const HRep& tgt) {
  PrimeField k(a.prime());
  RingMatrix acc(a, x.rows, x.cols);
  for (std::size_t h = 0; h < g.order(); ++h) {
    RingMatrix term = ring_sandwich(a, tgt.rho[h], conjugate_entries(a, g.matrix(h), x), src.rho[g.inverse(h)]);
    acc = ring_add(a, acc, term);
  }
  Residue inv = k.inv(static_cast<Residue>(g.order() % a.prime()));
  for (auto& e : acc.entries) e = a.scale(e, inv);
  return acc;
}

// ---------------------------------------------------------------------------
// complexes

RingMatrix GradedTorusComplex::boundary(std::size_t d) const {
  if (d >= 1 && d - 1 < boundaries.size()) return boundaries[d - 1];
  return RingMatrix(*algebra, d >= 1 ? rank(d - 1) : 0, rank(d));
}

bool GradedTorusComplex::squares_to_zero() const {
  for (std::size_t d = 2; d <= top(); ++d)
    if (!ring_is_zero(*algebra, ring_multiply(*algebra, boundary(d - 1), boundary(d)))) return false;
  return true;
}

bool GradedTorusComplex::equivariant() const {
  for (std::size_t d = 1; d <= top(); ++d)
    if (!is_equivariant(*algebra, *group, boundary(d), terms[d], terms[d - 1])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// phi and psi

namespace {

// phi_n computed in k T_n
std::vector<RingElem> phi_own_level(const TorusExtensionGroup& g, const TruncatedTorusAlgebra& alg) {
  const std::size_t n = alg.level(), r = g.rank();
  PrimeField k(g.prime());
  std::vector<RingElem> phi;
  if (r == 1 && g.order() > 1) {
    // mu_n = sum_h chi(h)^-1 t_n^chi(h), chi(h) read as the lift acting on T
    RingElem mu = alg.zero();
    const std::size_t t = alg.generator(n, 0);
    for (std::size_t h = 0; h < g.order(); ++h) {
      Residue c = k.inv(g.character(h));
      mu = alg.add(mu, alg.scale(alg.basis(alg.act(g.matrix(h), t)), c));
    }
    phi.push_back(mu);
    return phi;
  }
  // lift e_i -> t_(n,i) - 1, averaged: phi(v) = 1/|H| sum_h h^-1 . lift(h v)
  std::vector<RingElem> lift(r);
  for (std::size_t i = 0; i < r; ++i) lift[i] = alg.sub(alg.basis(alg.generator(n, i)), alg.one());
  Residue inv = k.inv(static_cast<Residue>(g.order() % g.prime()));
  for (std::size_t i = 0; i < r; ++i) {
    RingElem acc = alg.zero();
    for (std::size_t h = 0; h < g.order(); ++h) {
      Matrix a = g.on_v(h);
      RingElem lifted = alg.zero();
      for (std::size_t l = 0; l < r; ++l)
        if (a(l, i)) lifted = alg.add(lifted, alg.scale(lift[l], a(l, i)));
      acc = alg.add(acc, alg.conjugate(g.matrix(g.inverse(h)), lifted));
    }
    phi.push_back(alg.scale(acc, inv));
  }
  return phi;
}

bool phi_is_equivariant(const TorusExtensionGroup& g, const TruncatedTorusAlgebra& alg,
                        const std::vector<RingElem>& phi) {
  const std::size_t r = g.rank();
  for (auto h : g.generators()) {
    Matrix a = g.on_v(h);
    for (std::size_t i = 0; i < r; ++i) {
      RingElem lhs = alg.zero();
      for (std::size_t l = 0; l < r; ++l)
        if (a(l, i)) lhs = alg.add(lhs, alg.scale(phi[l], a(l, i)));
      if (lhs != alg.conjugate(g.matrix(h), phi[i])) return false;
    }
  }
  return true;
}

// k T_n phi(V) = I(k T_n): augmentation zero plus invertible linear part (Nakayama), and directly by
// ranks when the algebra is small
bool phi_generates_augmentation_ideal(const TruncatedTorusAlgebra& alg, const std::vector<RingElem>& phi) {
  const std::uint32_t p = alg.prime();
  const std::size_t r = alg.rank();
  for (const auto& x : phi)
    if (alg.augmentation(x) != 0) return false;
  Matrix lin(p, r, r);
  PrimeField k(p);
  for (std::size_t j = 0; j < r; ++j)
    for (std::size_t g = 0; g < alg.dim(); ++g) {
      if (!phi[j][g]) continue;
      auto c = alg.coords(g);
      for (std::size_t i = 0; i < r; ++i) lin(i, j) = k.add(lin(i, j), k.mul(phi[j][g], static_cast<Residue>(c[i] % p)));
    }
  if (rank(lin) != r) return false;
  if (alg.dim() <= 243) {
    Matrix span(p, alg.dim(), r * alg.dim());
    for (std::size_t j = 0; j < r; ++j)
      for (std::size_t g = 0; g < alg.dim(); ++g) {
        RingElem y = alg.shift(phi[j], g);
        for (std::size_t u = 0; u < alg.dim(); ++u) span(u, j * alg.dim() + g) = y[u];
      }
    if (rank(span) != alg.dim() - 1) return false;
  }
  return true;
}

bool on_axis(const TruncatedTorusAlgebra& alg, const RingElem& x, std::size_t axis) {
  for (std::size_t g = 0; g < alg.dim(); ++g) {
    if (!x[g]) continue;
    auto c = alg.coords(g);
    for (std::size_t i = 0; i < c.size(); ++i)
      if (i != axis && c[i] != 0) return false;
  }
  return true;
}

// c with c * a = b inside the span of `support` (group elements), augmentation of c zero
std::optional<RingElem> divide_in(const TruncatedTorusAlgebra& alg, const RingElem& a, const RingElem& b,
                                  const std::vector<std::size_t>& support) {
  const std::uint32_t p = alg.prime();
  std::vector<std::size_t> rows;  // group elements that can appear in c * a
  std::set<std::size_t> rowset;
  for (auto s : support) {
    RingElem y = alg.shift(a, s);
    for (std::size_t u = 0; u < alg.dim(); ++u)
      if (y[u]) rowset.insert(u);
  }
  for (std::size_t u = 0; u < alg.dim(); ++u)
    if (b[u]) rowset.insert(u);
  rows.assign(rowset.begin(), rowset.end());
  std::map<std::size_t, std::size_t> pos;
  for (std::size_t i = 0; i < rows.size(); ++i) pos[rows[i]] = i;
  Matrix m(p, rows.size() + 1, support.size());
  Vec rhs(rows.size() + 1, 0);
  for (std::size_t j = 0; j < support.size(); ++j) {
    RingElem y = alg.shift(a, support[j]);
    for (std::size_t u = 0; u < alg.dim(); ++u)
      if (y[u]) m(pos[u], j) = y[u];
    m(rows.size(), j) = 1 % p;  // augmentation row
  }
  for (std::size_t u = 0; u < alg.dim(); ++u)
    if (b[u]) rhs[pos[u]] = b[u];
  auto x = solve(m, rhs);
  if (!x) return std::nullopt;
  RingElem c = alg.zero();
  for (std::size_t j = 0; j < support.size(); ++j) c[support[j]] = (*x)[j];
  return c;
}

// psi_n in k T_(n+1); phi_next in that algebra, phi_prev embedded into it
RingMatrix psi_own_level(const TorusExtensionGroup& g, const TruncatedTorusAlgebra& alg,
                         const std::vector<RingElem>& phi_prev, const std::vector<RingElem>& phi_next) {
  const std::size_t r = g.rank();
  const std::uint32_t p = g.prime();
  RingMatrix psi(alg, r, r);
  if (r == 1) {
    // nu_n = mu_(n+1)^(p-1); with H = 1 this is (t_(n+1) - 1)^(p-1)
    psi.at(0, 0) = alg.pow(phi_next[0], p - 1);
    return psi;
  }
  bool separable = true;
  for (std::size_t i = 0; i < r; ++i)
    separable = separable && on_axis(alg, phi_prev[i], i) && on_axis(alg, phi_next[i], i);
  if (separable) {
    for (std::size_t i = 0; i < r; ++i) {
      std::vector<std::size_t> support;
      for (std::size_t g2 = 0; g2 < alg.dim(); ++g2) {
        auto c = alg.coords(g2);
        bool ok = true;
        for (std::size_t l = 0; l < r; ++l)
          if (l != i && c[l] != 0) ok = false;
        if (ok) support.push_back(g2);
      }
      auto c = divide_in(alg, phi_next[i], phi_prev[i], support);
      if (!c) throw TorusError("psi: phi_n is not divisible by phi_(n+1) along an axis");
      psi.at(i, i) = *c;
    }
  } else {
    if (static_cast<double>(alg.dim()) * alg.dim() * r > 6.0e7)
      throw TorusError("psi: generic factorization too large at this level");
    for (std::size_t j = 0; j < r; ++j) {
      Matrix m(p, alg.dim() + r, r * alg.dim());
      Vec rhs(alg.dim() + r, 0);
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t s = 0; s < alg.dim(); ++s) {
          RingElem y = alg.shift(phi_next[i], s);
          for (std::size_t u = 0; u < alg.dim(); ++u) m(u, i * alg.dim() + s) = y[u];
          m(alg.dim() + i, i * alg.dim() + s) = 1 % p;
        }
      for (std::size_t u = 0; u < alg.dim(); ++u) rhs[u] = phi_prev[j][u];
      auto x = solve(m, rhs);
      if (!x) throw TorusError("psi: no factorization phi_(n+1) psi_n = phi_n");
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t s = 0; s < alg.dim(); ++s) psi.at(i, j)[s] = (*x)[i * alg.dim() + s];
    }
  }
  HRep v = HRep::on_v(g);
  return average_over_h(alg, g, psi, v, v);
}

}  // namespace

std::vector<RingElem> build_phi(const TorusExtensionGroup& g, std::size_t n) {
  if (n == 0 || n > g.level()) throw TorusError("build_phi: level outside the window");
  TruncatedTorusAlgebra alg(g.prime(), g.rank(), n);
  auto phi = phi_own_level(g, alg);
  if (!phi_is_equivariant(g, alg, phi)) throw TorusError("build_phi: averaged lift is not equivariant");
  if (!phi_generates_augmentation_ideal(alg, phi)) throw TorusError("build_phi: image is not I(kT_n)");
  return phi;
}

RingMatrix build_psi(const TorusExtensionGroup& g, std::size_t n) {
  if (n == 0 || n + 1 > g.level()) throw TorusError("build_psi: level window must cover n and n + 1");
  TruncatedTorusAlgebra lo(g.prime(), g.rank(), n), hi(g.prime(), g.rank(), n + 1);
  auto phi_n = phi_own_level(g, lo);
  for (auto& x : phi_n) x = hi.embed(lo, x);
  auto phi_next = phi_own_level(g, hi);
  RingMatrix psi = psi_own_level(g, hi, phi_n, phi_next);
  for (std::size_t j = 0; j < g.rank(); ++j) {
    RingElem acc = hi.zero();
    for (std::size_t i = 0; i < g.rank(); ++i) acc = hi.add(acc, hi.mul(psi.at(i, j), phi_next[i]));
    if (acc != phi_n[j]) throw TorusError("build_psi: phi_(n+1) psi_n != phi_n");
  }
  return psi;
}

RingElem TorusParameters::nu(std::size_t n) const {
  if (n == 0) return sigma(1);
  return psi[n].at(0, 0);
}

TorusParameters torus_parameters(const TorusExtensionGroup& g) {
  TorusParameters t;
  const std::size_t L = g.level(), r = g.rank();
  t.group = std::make_shared<TorusExtensionGroup>(g);
  t.algebras.resize(L + 1);
  for (std::size_t n = 1; n <= L; ++n)
    t.algebras[n] = std::make_shared<TruncatedTorusAlgebra>(g.prime(), r, n);
  const auto& top = *t.algebras[L];
  std::vector<std::vector<RingElem>> own(L + 1);
  t.phi.resize(L + 1);
  for (std::size_t n = 1; n <= L; ++n) {
    own[n] = phi_own_level(g, *t.algebras[n]);
    t.phi_equivariant = t.phi_equivariant && phi_is_equivariant(g, *t.algebras[n], own[n]);
    t.phi_image_is_augmentation_ideal =
        t.phi_image_is_augmentation_ideal && phi_generates_augmentation_ideal(*t.algebras[n], own[n]);
    for (const auto& x : own[n]) t.phi[n].push_back(top.embed(*t.algebras[n], x));
  }
  t.psi.resize(L);
  HRep v = HRep::on_v(g);
  for (std::size_t n = 1; n < L; ++n) {
    const auto& hi = *t.algebras[n + 1];
    std::vector<RingElem> prev;
    for (const auto& x : own[n]) prev.push_back(hi.embed(*t.algebras[n], x));
    RingMatrix psi = psi_own_level(g, hi, prev, own[n + 1]);
    for (std::size_t j = 0; j < r; ++j) {
      RingElem acc = hi.zero();
      for (std::size_t i = 0; i < r; ++i) {
        acc = hi.add(acc, hi.mul(psi.at(i, j), own[n + 1][i]));
        t.psi_in_augmentation = t.psi_in_augmentation && hi.augmentation(psi.at(i, j)) == 0;
      }
      t.psi_factorization = t.psi_factorization && acc == prev[j];
    }
    t.psi_equivariant = t.psi_equivariant && is_equivariant(hi, g, psi, v, v);
    // det(psi_(n)) sigma_n = sigma_(n+1)
    std::vector<std::size_t> all(r);
    std::iota(all.begin(), all.end(), 0);
    RingElem det = ring_minor(hi, psi, all, all);
    t.sigma_identity = t.sigma_identity && hi.mul(det, hi.sigma(n)) == hi.sigma(n + 1);
    RingMatrix up(top, r, r);
    for (std::size_t i = 0; i < r * r; ++i) up.entries[i] = top.embed(hi, psi.entries[i]);
    t.psi[n] = std::move(up);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Koszul complexes, cones, the telescope

GradedTorusComplex koszul_complex(const TorusParameters& t, std::size_t n) {
  const auto& g = *t.group;
  const std::size_t r = g.rank();
  if (n == 0 || n > t.level()) throw TorusError("koszul_complex: level outside the window");
  GradedTorusComplex c;
  c.algebra = t.algebras.back();
  c.group = t.group;
  const auto& alg = *c.algebra;
  std::vector<std::vector<std::vector<std::size_t>>> sets(r + 1);
  for (std::size_t m = 0; m <= r; ++m) {
    sets[m] = subsets(r, m);
    c.terms.push_back(HRep::exterior_power(g, m));
    std::vector<std::string> lab;
    for (const auto& s : sets[m]) lab.push_back(subset_label(s));
    c.labels.push_back(lab);
  }
  PrimeField k(g.prime());
  for (std::size_t m = 1; m <= r; ++m) {
    RingMatrix d(alg, sets[m - 1].size(), sets[m].size());
    for (std::size_t j = 0; j < sets[m].size(); ++j) {
      const auto& s = sets[m][j];
      for (std::size_t pos = 0; pos < s.size(); ++pos) {
        auto rest = s;
        rest.erase(rest.begin() + static_cast<long>(pos));
        std::size_t i = static_cast<std::size_t>(std::find(sets[m - 1].begin(), sets[m - 1].end(), rest) - sets[m - 1].begin());
        RingElem term = t.phi[n][s[pos]];
        if (pos % 2) term = alg.scale(term, k.neg(1 % g.prime()));
        d.at(i, j) = alg.add(d.at(i, j), term);
      }
    }
    c.boundaries.push_back(std::move(d));
  }
  return c;
}

bool is_chain_map(const GradedTorusComplex& src, const GradedTorusComplex& tgt, const TorusChainMap& f) {
  const auto& a = *tgt.algebra;
  auto comp = [&](std::size_t d) {
    if (d < f.components.size()) return f.components[d];
    return RingMatrix(a, tgt.rank(d), src.rank(d));
  };
  const std::size_t top = std::max(src.top(), tgt.top());
  for (std::size_t d = 0; d <= src.top(); ++d) {
    RingMatrix fd = comp(d);
    if (fd.rows != tgt.rank(d) || fd.cols != src.rank(d)) return false;
  }
  for (std::size_t d = 1; d <= top; ++d) {
    RingMatrix lhs = ring_multiply(a, tgt.boundary(d), comp(d));
    RingMatrix rhs = ring_multiply(a, comp(d - 1), src.boundary(d));
    if (!ring_equal(lhs, rhs)) return false;
  }
  return true;
}

GradedTorusComplex mapping_cone(const GradedTorusComplex& src, const GradedTorusComplex& tgt, const TorusChainMap& f) {
  if (!is_chain_map(src, tgt, f)) throw TorusError("mapping_cone: the map does not commute with the boundaries");
  const auto& a = *tgt.algebra;
  PrimeField k(a.prime());
  GradedTorusComplex c;
  c.algebra = tgt.algebra;
  c.group = tgt.group;
  const std::size_t top = std::max(tgt.top(), src.top() + 1);
  HRep empty;
  empty.p = a.prime();
  empty.rho.assign(tgt.group->order(), Matrix(a.prime(), 0, 0));
  auto term = [&](const GradedTorusComplex& x, std::size_t d) { return d < x.terms.size() ? x.terms[d] : empty; };
  auto lab = [&](const GradedTorusComplex& x, std::size_t d) {
    return d < x.labels.size() ? x.labels[d] : std::vector<std::string>(x.rank(d), "");
  };
  for (std::size_t d = 0; d <= top; ++d) {
    HRep t = term(tgt, d);
    std::vector<std::string> l = lab(tgt, d);
    if (d >= 1) {
      HRep s = term(src, d - 1);
      t = HRep::direct_sum(t, s);
      for (const auto& x : lab(src, d - 1)) l.push_back("s:" + x);
    }
    if (t.rho.empty()) t = empty;
    c.terms.push_back(t);
    c.labels.push_back(l);
  }
  for (std::size_t d = 0; d < top; ++d) {
    // out of degree d+1: tgt_(d+1) + src_d -> tgt_d + src_(d-1)
    const std::size_t rt1 = tgt.rank(d + 1), rs0 = src.rank(d), rt0 = tgt.rank(d), rsm = d >= 1 ? src.rank(d - 1) : 0;
    RingMatrix m(a, rt0 + rsm, rt1 + rs0);
    RingMatrix dt = tgt.boundary(d + 1);
    for (std::size_t i = 0; i < rt0; ++i)
      for (std::size_t j = 0; j < rt1; ++j) m.at(i, j) = dt.at(i, j);
    if (rs0 && d < f.components.size()) {
      const RingMatrix& fd = f.components[d];
      Residue sign = d % 2 ? k.neg(1 % a.prime()) : 1 % a.prime();
      for (std::size_t i = 0; i < rt0; ++i)
        for (std::size_t j = 0; j < rs0; ++j) m.at(i, rt1 + j) = a.scale(fd.at(i, j), sign);
    }
    if (d >= 1 && rs0 && rsm) {
      RingMatrix ds = src.boundary(d);
      for (std::size_t i = 0; i < rsm; ++i)
        for (std::size_t j = 0; j < rs0; ++j) m.at(rt0 + i, rt1 + j) = ds.at(i, j);
    }
    c.boundaries.push_back(std::move(m));
  }
  return c;
}

namespace {

// direct sum of complexes with labels prefixed
GradedTorusComplex direct_sum(const std::vector<GradedTorusComplex>& parts, const std::vector<std::string>& prefix) {
  GradedTorusComplex c;
  c.algebra = parts.front().algebra;
  c.group = parts.front().group;
  const auto& a = *c.algebra;
  std::size_t top = 0;
  for (const auto& p : parts) top = std::max(top, p.top());
  for (std::size_t d = 0; d <= top; ++d) {
    HRep t;
    t.p = a.prime();
    t.rho.assign(c.group->order(), Matrix(a.prime(), 0, 0));
    std::vector<std::string> l;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (d >= parts[i].terms.size()) continue;
      t = HRep::direct_sum(t, parts[i].terms[d]);
      for (const auto& x : parts[i].labels[d]) l.push_back(prefix[i] + x);
    }
    c.terms.push_back(t);
    c.labels.push_back(l);
  }
  for (std::size_t d = 1; d <= top; ++d) {
    RingMatrix m(a, c.rank(d - 1), c.rank(d));
    std::size_t r0 = 0, c0 = 0;
    for (const auto& p : parts) {
      RingMatrix b = p.boundary(d);
      for (std::size_t i = 0; i < b.rows; ++i)
        for (std::size_t j = 0; j < b.cols; ++j) m.at(r0 + i, c0 + j) = b.at(i, j);
      r0 += p.rank(d - 1);
      c0 += p.rank(d);
    }
    c.boundaries.push_back(std::move(m));
  }
  return c;
}

RingMatrix exterior_of(const TruncatedTorusAlgebra& a, const RingMatrix& psi, std::size_t m) {
  auto sets = subsets(psi.rows, m);
  RingMatrix out(a, sets.size(), sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (std::size_t j = 0; j < sets.size(); ++j) out.at(i, j) = ring_minor(a, psi, sets[i], sets[j]);
  return out;
}

}  // namespace

GradedTorusComplex torus_telescope(const TorusParameters& t) {
  const std::size_t L = t.level(), r = t.group->rank();
  if (L == 1) {
    // nothing to glue: the telescope is D^(1)
    auto d1 = koszul_complex(t, 1);
    for (auto& l : d1.labels)
      for (auto& x : l) x = "n1:" + x;
    return d1;
  }
  const auto& a = t.top();
  std::vector<GradedTorusComplex> src_parts, tgt_parts;
  std::vector<std::string> src_pre, tgt_pre;
  for (std::size_t n = 1; n <= L; ++n) {
    auto dn = koszul_complex(t, n);
    tgt_parts.push_back(dn);
    tgt_pre.push_back("n" + std::to_string(n) + ":");
    if (n < L) {
      src_parts.push_back(dn);
      src_pre.push_back("n" + std::to_string(n) + ":");
    }
  }
  auto src = direct_sum(src_parts, src_pre);
  auto tgt = direct_sum(tgt_parts, tgt_pre);
  PrimeField k(a.prime());
  TorusChainMap f;
  for (std::size_t m = 0; m <= r; ++m) {
    const std::size_t b = subsets(r, m).size();
    RingMatrix comp(a, L * b, (L - 1) * b);
    for (std::size_t n = 1; n < L; ++n) {
      RingMatrix lam = exterior_of(a, t.psi[n], m);
      for (std::size_t i = 0; i < b; ++i) {
        comp.at((n - 1) * b + i, (n - 1) * b + i) = a.one();
        for (std::size_t j = 0; j < b; ++j)
          comp.at(n * b + i, (n - 1) * b + j) = a.scale(lam.at(i, j), k.neg(1 % a.prime()));
      }
    }
    f.components.push_back(std::move(comp));
  }
  return mapping_cone(src, tgt, f);
}

TorusChainMap koszul_transition(const TorusParameters& t) {
  const std::size_t L = t.level(), r = t.group->rank();
  if (L < 2) throw TorusError("koszul_transition: level must be at least 2");
  TorusChainMap f;
  for (std::size_t m = 0; m <= r; ++m) f.components.push_back(exterior_of(t.top(), t.psi[L - 1], m));
  return f;
}

// ---------------------------------------------------------------------------
// dense homology

namespace {

struct FlatComplex {
  std::vector<Matrix> d;  // d[k] : degree k -> k-1, d[0] empty
  std::vector<std::size_t> dims;
};

FlatComplex flatten_range(const GradedTorusComplex& c, std::size_t lo, std::size_t hi) {
  FlatComplex f;
  const std::uint32_t p = c.algebra->prime();
  f.dims.resize(hi + 2, 0);
  f.d.resize(hi + 2);
  for (std::size_t d = 0; d <= hi + 1; ++d) f.dims[d] = c.dim(d);
  for (std::size_t d = lo; d <= hi + 1; ++d) {
    if (d == 0) continue;
    if (c.dim(d) == 0 || c.dim(d - 1) == 0)
      f.d[d] = Matrix(p, c.dim(d - 1), c.dim(d));
    else
      f.d[d] = flatten(*c.algebra, c.boundary(d));
  }
  return f;
}

}  // namespace

DenseHomology dense_homology(const GradedTorusComplex& c, std::size_t lo, std::size_t hi, bool keep) {
  DenseHomology out;
  const std::uint32_t p = c.algebra->prime();
  FlatComplex f = flatten_range(c, lo, hi);
  std::vector<std::size_t> rk(hi + 2, 0);
  for (std::size_t d = lo; d <= hi + 1; ++d)
    if (d >= 1) rk[d] = rank(f.d[d]);
  for (std::size_t d = lo; d <= hi; ++d) {
    const std::size_t z = f.dims[d] - (d >= 1 ? rk[d] : 0);
    out.dims.push_back(z - rk[d + 1]);
    if (keep) {
      Subspace b = f.dims[d + 1] ? image_basis(f.d[d + 1]) : Subspace(p, f.dims[d]);
      Subspace zs = d >= 1 && f.dims[d - 1] ? kernel_basis(f.d[d]) : Subspace::whole(p, f.dims[d]);
      std::vector<Vec> reps;
      Subspace acc = b;
      for (std::size_t i = 0; i < zs.dim() && reps.size() < out.dims.back(); ++i) {
        Vec v = zs.vector(i);
        if (acc.contains(v)) continue;
        reps.push_back(v);
        acc = sum(acc, Subspace::span(p, f.dims[d], {v}));
      }
      out.representatives.push_back(std::move(reps));
      out.boundaries.push_back(std::move(b));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// rank 1: Smith forms over k[Y]/(Y^q)

namespace {

using Poly = Vec;

struct Uniserial {
  std::uint32_t p;
  std::size_t q;

  Poly zero() const { return Poly(q, 0); }
  Poly unit() const {
    Poly x(q, 0);
    if (q) x[0] = 1 % p;
    return x;
  }
  std::size_t val(const Poly& a) const {
    for (std::size_t i = 0; i < q; ++i)
      if (a[i]) return i;
    return q;
  }
  Poly mul(const Poly& a, const Poly& b) const {
    std::vector<std::uint64_t> acc(q, 0);
    for (std::size_t i = 0; i < q; ++i) {
      if (!a[i]) continue;
      for (std::size_t j = 0; i + j < q; ++j)
        if (b[j]) acc[i + j] += static_cast<std::uint64_t>(a[i]) * b[j];
      if (i % 64 == 63)
        for (auto& v : acc) v %= p;
    }
    Poly out(q);
    for (std::size_t i = 0; i < q; ++i) out[i] = static_cast<Residue>(acc[i] % p);
    return out;
  }
  Poly sub(const Poly& a, const Poly& b) const {
    Poly out(q);
    for (std::size_t i = 0; i < q; ++i) out[i] = static_cast<Residue>((a[i] + p - b[i]) % p);
    return out;
  }
  Poly inv_unit(const Poly& a) const {
    PrimeField k(p);
    Poly b(q, 0);
    Residue a0 = k.inv(a[0]);
    b[0] = a0;
    for (std::size_t n = 1; n < q; ++n) {
      std::uint64_t s = 0;
      for (std::size_t i = 1; i <= n; ++i)
        if (a[i] && b[n - i]) s = (s + static_cast<std::uint64_t>(a[i]) * b[n - i]) % p;
      b[n] = k.mul(k.neg(static_cast<Residue>(s)), a0);
    }
    return b;
  }
  Poly shift_down(const Poly& a, std::size_t v) const {
    Poly out(q, 0);
    for (std::size_t i = v; i < q; ++i) out[i - v] = a[i];
    return out;
  }
  Poly monomial(std::size_t e) const {
    Poly x(q, 0);
    if (e < q) x[e] = 1 % p;
    return x;
  }
};

struct PolyMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<Poly> e;
  PolyMatrix() = default;
  PolyMatrix(const Uniserial& s, std::size_t r, std::size_t c) : rows(r), cols(c), e(r * c, s.zero()) {}
  Poly& at(std::size_t i, std::size_t j) { return e[i * cols + j]; }
  const Poly& at(std::size_t i, std::size_t j) const { return e[i * cols + j]; }
  static PolyMatrix identity(const Uniserial& s, std::size_t n) {
    PolyMatrix m(s, n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = s.unit();
    return m;
  }
};

struct Smith {
  std::vector<std::size_t> vals;  // valuations of the nonzero diagonal entries
  PolyMatrix u, v;                // u * a * v = diag(Y^vals)
  std::size_t k_rank(std::size_t q) const {
    std::size_t s = 0;
    for (auto x : vals) s += q - x;
    return s;
  }
};

Smith smith(const Uniserial& s, PolyMatrix a, bool track_u, bool track_v) {
  Smith out;
  if (track_u) out.u = PolyMatrix::identity(s, a.rows);
  if (track_v) out.v = PolyMatrix::identity(s, a.cols);
  const std::size_t n = std::min(a.rows, a.cols);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t bi = a.rows, bj = a.cols, bv = s.q;
    for (std::size_t i = k; i < a.rows; ++i)
      for (std::size_t j = k; j < a.cols; ++j) {
        std::size_t v = s.val(a.at(i, j));
        if (v < bv) {
          bv = v;
          bi = i;
          bj = j;
        }
      }
    if (bv == s.q) break;
    if (bi != k) {
      for (std::size_t j = 0; j < a.cols; ++j) std::swap(a.at(bi, j), a.at(k, j));
      if (track_u)
        for (std::size_t j = 0; j < out.u.cols; ++j) std::swap(out.u.at(bi, j), out.u.at(k, j));
    }
    if (bj != k) {
      for (std::size_t i = 0; i < a.rows; ++i) std::swap(a.at(i, bj), a.at(i, k));
      if (track_v)
        for (std::size_t i = 0; i < out.v.rows; ++i) std::swap(out.v.at(i, bj), out.v.at(i, k));
    }
    Poly unit = s.shift_down(a.at(k, k), bv);
    Poly uinv = s.inv_unit(unit);
    for (std::size_t j = 0; j < a.cols; ++j) a.at(k, j) = s.mul(a.at(k, j), uinv);
    if (track_u)
      for (std::size_t j = 0; j < out.u.cols; ++j) out.u.at(k, j) = s.mul(out.u.at(k, j), uinv);
    for (std::size_t i = 0; i < a.rows; ++i) {
      if (i == k || s.val(a.at(i, k)) == s.q) continue;
      Poly f = s.shift_down(a.at(i, k), bv);
      for (std::size_t j = 0; j < a.cols; ++j)
        if (s.val(a.at(k, j)) < s.q) a.at(i, j) = s.sub(a.at(i, j), s.mul(f, a.at(k, j)));
      if (track_u)
        for (std::size_t j = 0; j < out.u.cols; ++j)
          if (s.val(out.u.at(k, j)) < s.q) out.u.at(i, j) = s.sub(out.u.at(i, j), s.mul(f, out.u.at(k, j)));
    }
    for (std::size_t j = 0; j < a.cols; ++j) {
      if (j == k || s.val(a.at(k, j)) == s.q) continue;
      Poly g = s.shift_down(a.at(k, j), bv);
      a.at(k, j) = s.zero();  // only row k is touched: column k is zero elsewhere
      if (track_v)
        for (std::size_t i = 0; i < out.v.rows; ++i)
          if (s.val(out.v.at(i, k)) < s.q) out.v.at(i, j) = s.sub(out.v.at(i, j), s.mul(g, out.v.at(i, k)));
    }
    out.vals.push_back(bv);
  }
  return out;
}

// generators of {x : a x = 0}
std::vector<std::vector<Poly>> kernel_generators(const Uniserial& s, const PolyMatrix& a) {
  Smith sm = smith(s, a, false, true);
  std::vector<std::vector<Poly>> gens;
  for (std::size_t i = 0; i < a.cols; ++i) {
    Poly scale;
    if (i < sm.vals.size()) {
      if (sm.vals[i] == 0) continue;
      scale = s.monomial(s.q - sm.vals[i]);
    } else {
      scale = s.unit();
    }
    std::vector<Poly> x(a.rows == 0 && a.cols == 0 ? 0 : a.cols);
    for (std::size_t r = 0; r < a.cols; ++r) x[r] = s.mul(sm.v.at(r, i), scale);
    gens.push_back(std::move(x));
  }
  return gens;
}

// column span membership through a Smith form with u
bool in_span(const Uniserial& s, const Smith& sm, const std::vector<Poly>& y) {
  for (std::size_t i = 0; i < sm.u.rows; ++i) {
    Poly acc = s.zero();
    for (std::size_t j = 0; j < sm.u.cols; ++j) {
      Poly t = s.mul(sm.u.at(i, j), y[j]);
      for (std::size_t l = 0; l < s.q; ++l) acc[l] = (acc[l] + t[l]) % s.p;
    }
    std::size_t v = s.val(acc);
    if (i < sm.vals.size()) {
      if (v < sm.vals[i]) return false;
    } else if (v < s.q) {
      return false;
    }
  }
  return true;
}

// group basis <-> X basis for k[Z/Q], X = t - 1
struct XBasis {
  std::uint32_t p;
  std::size_t q;
  std::vector<std::uint8_t> to_x_table;  // C(a, i) mod p, row a

  static Residue lucas(std::uint32_t p, std::uint64_t n, std::uint64_t k) {
    PrimeField f(p);
    Residue r = 1 % p;
    while (n || k) {
      std::uint64_t a = n % p, b = k % p;
      if (b > a) return 0;
      // small binomial
      Residue num = 1 % p, den = 1 % p;
      for (std::uint64_t i = 0; i < b; ++i) {
        num = f.mul(num, static_cast<Residue>((a - i) % p));
        den = f.mul(den, static_cast<Residue>((i + 1) % p));
      }
      r = f.mul(r, f.mul(num, f.inv(den)));
      n /= p;
      k /= p;
    }
    return r;
  }
  XBasis(std::uint32_t p_, std::size_t q_) : p(p_), q(q_), to_x_table(q_ * q_, 0) {
    for (std::size_t a = 0; a < q; ++a)
      for (std::size_t i = 0; i <= a; ++i) to_x_table[a * q + i] = static_cast<std::uint8_t>(lucas(p, a, i));
  }
  Poly to_x(const RingElem& x) const {
    std::vector<std::uint64_t> acc(q, 0);
    for (std::size_t a = 0; a < q; ++a) {
      if (!x[a]) continue;
      for (std::size_t i = 0; i <= a; ++i) acc[i] += static_cast<std::uint64_t>(x[a]) * to_x_table[a * q + i];
    }
    Poly out(q);
    for (std::size_t i = 0; i < q; ++i) out[i] = static_cast<Residue>(acc[i] % p);
    return out;
  }
  // X^i = sum_a C(i, a) (-1)^(i-a) t^a
  RingElem to_group(const Poly& y) const {
    std::vector<std::uint64_t> acc(q, 0);
    for (std::size_t i = 0; i < q; ++i) {
      if (!y[i]) continue;
      for (std::size_t a = 0; a <= i; ++a) {
        std::uint64_t c = to_x_table[i * q + a];
        if (!c) continue;
        if ((i - a) % 2) c = (p - c) % p;
        acc[a] += static_cast<std::uint64_t>(y[i]) * c;
      }
    }
    RingElem out(q);
    for (std::size_t a = 0; a < q; ++a) out[a] = static_cast<Residue>(acc[a] % p);
    return out;
  }
};

PolyMatrix to_poly_matrix(const Uniserial& s, const XBasis& xb, const RingMatrix& m) {
  PolyMatrix out(s, m.rows, m.cols);
  for (std::size_t i = 0; i < m.entries.size(); ++i) out.e[i] = xb.to_x(m.entries[i]);
  return out;
}

// a k[X]/(X^Q)-matrix read over k[Y]/(Y^(Q/p)), Y = X^p: generator j becomes X^c e_j, c < p
PolyMatrix restrict_to_frobenius(const Uniserial& sub, std::uint32_t p, const PolyMatrix& m) {
  const std::size_t Q = sub.q * p;
  PolyMatrix out(sub, m.rows * p, m.cols * p);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) {
      const Poly& e = m.at(i, j);
      for (std::size_t cp = 0; cp < p; ++cp)
        for (std::size_t l = 0; l + cp < Q; ++l) {
          if (!e[l]) continue;
          std::size_t deg = l + cp;
          out.at(i * p + deg % p, j * p + cp)[deg / p] = e[l];
        }
    }
  return out;
}

}  // namespace

std::vector<std::size_t> uniserial_homology(const GradedTorusComplex& c, std::size_t lo, std::size_t hi) {
  const auto& a = *c.algebra;
  if (a.rank() != 1) throw TorusError("uniserial_homology: rank 1 only");
  Uniserial s{a.prime(), a.dim()};
  XBasis xb(a.prime(), a.dim());
  auto krank = [&](std::size_t d) -> std::size_t {
    if (d == 0 || c.rank(d) == 0 || c.rank(d - 1) == 0) return 0;
    return smith(s, to_poly_matrix(s, xb, c.boundary(d)), false, false).k_rank(s.q);
  };
  std::vector<std::size_t> out;
  for (std::size_t d = lo; d <= hi; ++d) out.push_back(c.dim(d) - krank(d) - krank(d + 1));
  return out;
}

// ---------------------------------------------------------------------------
// stable images

namespace {

// dim of the image of H_d(prev) in H_d(cur) for small dense complexes; incl maps prev_d into cur_d
std::size_t dense_image_rank(const Matrix& prev_out, const Matrix& cur_in, const Matrix& incl, std::uint32_t p,
                             std::size_t prev_dim, std::size_t cur_dim) {
  if (prev_dim == 0 || cur_dim == 0) return 0;
  Subspace z = prev_out.rows() ? kernel_basis(prev_out) : Subspace::whole(p, prev_dim);
  Subspace b = cur_in.cols() ? image_basis(cur_in) : Subspace(p, cur_dim);
  std::vector<Vec> imgs;
  for (std::size_t i = 0; i < z.dim(); ++i) imgs.push_back(incl.apply(z.vector(i)));
  Subspace both = imgs.empty() ? b : sum(b, Subspace::span(p, cur_dim, imgs));
  return both.dim() - b.dim();
}

Matrix label_inclusion(std::uint32_t p, const std::vector<std::string>& prev, const std::vector<std::string>& cur) {
  Matrix m(p, cur.size(), prev.size());
  for (std::size_t j = 0; j < prev.size(); ++j) {
    auto it = std::find(cur.begin(), cur.end(), prev[j]);
    if (it == cur.end()) throw TorusError("stable image: generator " + prev[j] + " missing at the next level");
    m(static_cast<std::size_t>(it - cur.begin()), j) = 1 % p;
  }
  return m;
}

std::vector<std::string> labels_at(const GradedTorusComplex& c, std::size_t d) {
  return d < c.labels.size() ? c.labels[d] : std::vector<std::string>{};
}

// H_d(k (x) prev) -> H_d(k (x) cur) for the coinvariant complexes selected by `keep` (generator filter)
std::vector<std::size_t> coinvariant_image(const GradedTorusComplex& prev, const GradedTorusComplex& cur,
                                           std::size_t lo, std::size_t hi,
                                           const std::function<bool(const GradedTorusComplex&, std::size_t, std::size_t)>& keep) {
  const std::uint32_t p = cur.algebra->prime();
  auto select = [&](const GradedTorusComplex& c, std::size_t d) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < c.rank(d); ++i)
      if (keep(c, d, i)) idx.push_back(i);
    return idx;
  };
  auto reduced = [&](const GradedTorusComplex& c, std::size_t d) -> Matrix {
    // k (x) boundary out of degree d, restricted to kept generators
    auto rows = d >= 1 ? select(c, d - 1) : std::vector<std::size_t>{};
    auto cols = select(c, d);
    if (d == 0) return Matrix(p, 0, cols.size());
    Matrix full = augment(*c.algebra, c.boundary(d));
    return full.select_rows(rows).select_cols(cols);
  };
  std::vector<std::size_t> out;
  for (std::size_t d = lo; d <= hi; ++d) {
    auto pc = select(prev, d), cc = select(cur, d);
    std::vector<std::string> pl, cl;
    auto plab = labels_at(prev, d), clab = labels_at(cur, d);
    for (auto i : pc) pl.push_back(plab[i]);
    for (auto i : cc) cl.push_back(clab[i]);
    Matrix incl = label_inclusion(p, pl, cl);
    Matrix pout = reduced(prev, d);
    Matrix cin = reduced(cur, d + 1);
    out.push_back(dense_image_rank(pout, cin, incl, p, pc.size(), cc.size()));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// torus_resolution

bool TorusResolutionReport::stable() const {
  return std::all_of(homology.begin(), homology.end(), [](const DegreeValue& v) { return v.stable; }) &&
         std::all_of(coinvariants.begin(), coinvariants.end(), [](const DegreeValue& v) { return v.stable; });
}

namespace {

// image of H_d(D^(L-1) over kT_(L-1)) in H_d(D^(L) over kT_L), d = 0..r
std::vector<std::size_t> koszul_stable_image(const TorusParameters& prev, const TorusParameters& cur) {
  const std::uint32_t p = cur.group->prime();
  const std::size_t r = cur.group->rank();
  auto kp = koszul_complex(prev, prev.level());
  auto kc = koszul_complex(cur, cur.level());
  auto tr = koszul_transition(cur);
  const auto& pa = prev.top();
  const auto& ca = cur.top();
  std::vector<std::size_t> out;
  for (std::size_t d = 0; d <= r; ++d) {
    Matrix pout = d >= 1 ? flatten(pa, kp.boundary(d)) : Matrix(p, 0, kp.dim(d));
    Matrix cin = d + 1 <= r ? flatten(ca, kc.boundary(d + 1)) : Matrix(p, kc.dim(d), 0);
    // inclusion kT_(L-1) (x) Lambda^d -> kT_L (x) Lambda^d followed by Lambda^d psi_(L-1)
    const RingMatrix& lam = tr.components[d];
    Matrix incl(p, kc.dim(d), kp.dim(d));
    for (std::size_t j = 0; j < kp.rank(d); ++j)
      for (std::size_t g = 0; g < pa.dim(); ++g) {
        RingElem x = ca.embed(pa, pa.basis(g));
        for (std::size_t i = 0; i < kc.rank(d); ++i) {
          RingElem y = ca.mul(x, lam.at(i, j));
          for (std::size_t u = 0; u < ca.dim(); ++u) incl(i * ca.dim() + u, j * pa.dim() + g) = y[u];
        }
      }
    out.push_back(dense_image_rank(pout, cin, incl, p, kp.dim(d), kc.dim(d)));
  }
  return out;
}

std::vector<std::size_t> telescope_coinvariant_image(const TorusParameters& prev, const TorusParameters& cur) {
  auto tp = torus_telescope(prev);
  auto tc = torus_telescope(cur);
  return coinvariant_image(tp, tc, 0, tc.top(), [](const GradedTorusComplex&, std::size_t, std::size_t) { return true; });
}

}  // namespace

TorusResolutionReport torus_resolution(const TorusExtensionGroup& g) {
  const std::size_t L = g.level(), r = g.rank();
  if (L < 2) throw TorusError("torus_resolution: level must be at least 2");
  TorusResolutionReport rep;
  rep.level = L;
  rep.length = r + 1;
  auto cur = torus_parameters(g);
  auto prev = torus_parameters(g.at_level(L - 1));
  rep.parameters_ok = cur.all_checks() && prev.all_checks();
  auto kc = koszul_complex(cur, L);
  auto tel = torus_telescope(cur);
  rep.squares_to_zero = kc.squares_to_zero() && tel.squares_to_zero();
  rep.equivariant = kc.equivariant() && tel.equivariant();
  auto h = koszul_stable_image(prev, cur);
  auto co = telescope_coinvariant_image(prev, cur);
  std::vector<std::size_t> h_old, co_old;
  if (L >= 3) {
    auto older = torus_parameters(g.at_level(L - 2));
    h_old = koszul_stable_image(older, prev);
    co_old = telescope_coinvariant_image(older, prev);
  }
  for (std::size_t d = 0; d <= r + 1; ++d) {
    DegreeValue v{d, d < h.size() ? h[d] : 0, false};
    if (!h_old.empty()) v.stable = v.value == (d < h_old.size() ? h_old[d] : 0);
    rep.homology.push_back(v);
    DegreeValue w{d, d < co.size() ? co[d] : 0, false};
    if (!co_old.empty()) w.stable = w.value == (d < co_old.size() ? co_old[d] : 0);
    rep.coinvariants.push_back(w);
  }
  rep.h0_is_k = rep.homology[0].value == 1;
  rep.coinvariants_acyclic = true;
  for (const auto& w : rep.coinvariants) {
    if (!w.stable && L >= 3) continue;
    if (w.value != (w.degree == 0 ? 1u : 0u)) rep.coinvariants_acyclic = false;
  }
  // T_L acts trivially on H_*(D^(L))
  auto dh = dense_homology(kc, 0, r, true);
  const auto& a = *kc.algebra;
  rep.t_trivial = true;
  for (std::size_t d = 0; d <= r; ++d)
    for (const auto& z : dh.representatives[d])
      for (std::size_t axis = 0; axis < r; ++axis) {
        const std::size_t t = a.generator(L, axis);
        Vec moved(z.size(), 0);
        PrimeField k(a.prime());
        for (std::size_t blk = 0; blk < kc.rank(d); ++blk)
          for (std::size_t u = 0; u < a.dim(); ++u) {
            Residue x = z[blk * a.dim() + u];
            if (!x) continue;
            moved[blk * a.dim() + a.add(u, t)] = k.add(moved[blk * a.dim() + a.add(u, t)], x);
            moved[blk * a.dim() + u] = k.sub(moved[blk * a.dim() + u], x);
          }
        if (!dh.boundaries[d].contains(moved)) rep.t_trivial = false;
      }
  return rep;
}

// ---------------------------------------------------------------------------
// Sullivan spheres

GradedTorusComplex sullivan_chain(const TorusParameters& t, std::size_t j) {
  const auto& g = *t.group;
  if (g.rank() != 1) throw TorusError("sullivan_chain: rank 1 only");
  if (j == 0) throw TorusError("sullivan_chain: at least one piece");
  const std::size_t L = t.level();
  GradedTorusComplex c;
  c.algebra = t.algebras.back();
  c.group = t.group;
  const auto& a = *c.algebra;
  PrimeField k(a.prime());
  // generator lists per degree
  std::vector<std::vector<std::size_t>> gens(2 * j + 1);
  gens[0] = {0};
  for (std::size_t i = 1; i <= j; ++i) {
    for (std::size_t n = 1; n <= L; ++n) gens[2 * i - 1].push_back(n);
    for (std::size_t n = (i == j ? 1 : 0); n + 1 <= L; ++n) gens[2 * i].push_back(n);
  }
  for (std::size_t d = 0; d <= 2 * j; ++d) {
    const long long twist = static_cast<long long>((d + 1) / 2);
    HRep one = HRep::character_power(g, twist);
    HRep term;
    term.p = a.prime();
    term.rho.assign(g.order(), Matrix(a.prime(), 0, 0));
    std::vector<std::string> lab;
    for (auto n : gens[d]) {
      term = HRep::direct_sum(term, one);
      lab.push_back("a" + std::to_string(n));
    }
    c.terms.push_back(term);
    c.labels.push_back(lab);
  }
  auto pos = [&](std::size_t d, std::size_t n) -> std::optional<std::size_t> {
    auto it = std::find(gens[d].begin(), gens[d].end(), n);
    if (it == gens[d].end()) return std::nullopt;
    return static_cast<std::size_t>(it - gens[d].begin());
  };
  const Residue minus_one = k.neg(1 % a.prime());
  for (std::size_t d = 1; d <= 2 * j; ++d) {
    RingMatrix m(a, gens[d - 1].size(), gens[d].size());
    for (std::size_t col = 0; col < gens[d].size(); ++col) {
      const std::size_t n = gens[d][col];
      if (d == 1) {
        m.at(0, col) = t.mu(n);
      } else if (d % 2 == 0) {
        // a_n - nu_n a_(n+1); a_0 is absent in odd degrees
        if (auto i = pos(d - 1, n)) m.at(*i, col) = a.add(m.at(*i, col), a.one());
        if (auto i = pos(d - 1, n + 1)) m.at(*i, col) = a.add(m.at(*i, col), a.scale(t.nu(n), minus_one));
      } else {
        // mu_n (a_0 + sigma_1 a_1 + ... + sigma_(n-1) a_(n-1))
        for (std::size_t l = 0; l < n; ++l) {
          auto i = pos(d - 1, l);
          if (!i) continue;
          RingElem coef = l == 0 ? t.mu(n) : a.mul(t.mu(n), t.sigma(l));
          m.at(*i, col) = a.add(m.at(*i, col), coef);
        }
      }
    }
    c.boundaries.push_back(std::move(m));
  }
  return c;
}

bool SullivanReport::stable() const {
  return std::all_of(betti.begin(), betti.end(), [](const DegreeValue& v) { return v.stable; });
}

namespace {

struct SullivanLevel {
  TorusParameters params;
  GradedTorusComplex chain;
};

struct StableClasses {
  std::vector<std::size_t> ranks;     // per degree
  bool t_trivial = true;
  std::optional<std::size_t> h_moves;  // first degree where H moves a stable class
};

// image of H(prev) in H(cur) through the Frobenius-restricted Smith forms; optionally tests the T and H
// actions on the image classes
StableClasses sullivan_stable(const SullivanLevel& prev, const SullivanLevel& cur, bool test_actions) {
  const auto& pa = *prev.chain.algebra;
  const auto& ca = *cur.chain.algebra;
  const std::uint32_t p = ca.prime();
  Uniserial sp{p, pa.dim()};  // k[X']/(X'^(Q/p)), X' = t_(L-1) - 1
  Uniserial sc{p, ca.dim()};
  XBasis xp(p, pa.dim()), xc(p, ca.dim());
  const auto& g = *cur.chain.group;
  StableClasses out;
  const std::size_t top = cur.chain.top();
  for (std::size_t d = 0; d <= top; ++d) {
    const std::size_t np = prev.chain.rank(d), nc = cur.chain.rank(d);
    if (np == 0 || nc == 0) {
      out.ranks.push_back(0);
      continue;
    }
    // cycles at the previous level over k[X']
    std::vector<std::vector<Poly>> z;
    if (d == 0 || prev.chain.rank(d - 1) == 0) {
      for (std::size_t i = 0; i < np; ++i) {
        std::vector<Poly> e(np, sp.zero());
        e[i] = sp.unit();
        z.push_back(e);
      }
    } else {
      z = kernel_generators(sp, to_poly_matrix(sp, xp, prev.chain.boundary(d)));
    }
    // boundaries at the current level, over k[Y] with Y = X^p
    PolyMatrix b(sp, nc * p, 0);
    if (d + 1 <= top && cur.chain.rank(d + 1))
      b = restrict_to_frobenius(sp, p, to_poly_matrix(sc, xc, cur.chain.boundary(d + 1)));
    auto labp = labels_at(prev.chain, d), labc = labels_at(cur.chain, d);
    Matrix incl = label_inclusion(p, labp, labc);
    std::vector<std::size_t> target(np);
    for (std::size_t j = 0; j < np; ++j)
      for (std::size_t i = 0; i < nc; ++i)
        if (incl(i, j)) target[j] = i;
    // iota(z): component 0 of the target generator, same polynomial in Y
    PolyMatrix both(sp, nc * p, b.cols + z.size());
    for (std::size_t i = 0; i < b.rows; ++i)
      for (std::size_t j = 0; j < b.cols; ++j) both.at(i, j) = b.at(i, j);
    for (std::size_t l = 0; l < z.size(); ++l)
      for (std::size_t j = 0; j < np; ++j) both.at(target[j] * p, b.cols + l) = z[l][j];
    Smith sb = smith(sp, b, test_actions, false);
    const std::size_t rb = sb.k_rank(sp.q);
    const std::size_t rboth = smith(sp, both, false, false).k_rank(sp.q);
    out.ranks.push_back(rboth - rb);
    if (!test_actions || rboth == rb) continue;
    for (const auto& zl : z) {
      // X * iota(z): component 1
      std::vector<Poly> y(nc * p, sp.zero());
      for (std::size_t j = 0; j < np; ++j) y[target[j] * p + (p > 1 ? 1 : 0)] = zl[j];
      if (!in_span(sp, sb, y)) out.t_trivial = false;
      // h . iota(z) - iota(z), through the group basis at the current level
      const long long twist = static_cast<long long>((d + 1) / 2);
      HRep tw = HRep::character_power(g, twist);
      for (auto h : g.generators()) {
        std::vector<Poly> moved(nc * p, sp.zero());
        for (std::size_t j = 0; j < np; ++j) {
          Poly xpoly = sc.zero();
          for (std::size_t e = 0; e < sp.q; ++e) xpoly[e * p] = zl[j][e];
          RingElem grp = xc.to_group(xpoly);
          RingElem hg = ca.scale(ca.conjugate(g.matrix(h), grp), tw.rho[h](0, 0));
          RingElem diff = ca.sub(hg, grp);
          Poly dx = xc.to_x(diff);
          for (std::size_t l = 0; l < ca.dim(); ++l)
            if (dx[l]) moved[target[j] * p + l % p][l / p] = dx[l];
        }
        if (!in_span(sp, sb, moved) && !out.h_moves) out.h_moves = d;
      }
    }
  }
  return out;
}

SullivanLevel sullivan_level(std::uint32_t p, std::size_t m, std::size_t level, std::size_t pieces) {
  auto g = TorusExtensionGroup::cyclic_character(p, m, level);
  SullivanLevel s{torus_parameters(g), {}};
  s.chain = sullivan_chain(s.params, pieces);
  return s;
}

}  // namespace

SullivanReport sullivan_complex(std::uint32_t p, std::size_t m, std::size_t level, std::optional<std::size_t> pieces) {
  if (p == 2 || !is_prime(p)) throw TorusError("sullivan: p must be an odd prime");
  if (m == 0 || (p - 1) % m) throw TorusError("sullivan: m must divide p - 1");
  if (level < 2) throw TorusError("sullivan: level must be at least 2");
  const std::size_t j = pieces.value_or(m);
  SullivanReport rep;
  rep.p = p;
  rep.m = m;
  rep.level = level;
  rep.pieces = j;
  auto cur = sullivan_level(p, m, level, j);
  auto prev = sullivan_level(p, m, level - 1, j);
  rep.squares_to_zero = cur.chain.squares_to_zero();
  rep.equivariant = cur.chain.equivariant();
  rep.parameters_ok = cur.params.all_checks();
  StableClasses now = sullivan_stable(prev, cur, true);
  rep.t_trivial = now.t_trivial;
  rep.h_nontrivial_degree = now.h_moves;
  std::optional<StableClasses> before;
  std::optional<SullivanLevel> older;
  if (level >= 3) {
    older = sullivan_level(p, m, level - 2, j);
    before = sullivan_stable(*older, prev, false);
    rep.betti_previous = before->ranks;
  }
  for (std::size_t d = 0; d < now.ranks.size(); ++d)
    rep.betti.push_back({d, now.ranks[d], before && before->ranks[d] == now.ranks[d]});
  // k (x)_{k Gamma}: generators whose twist is trivial
  auto keep = [m](const GradedTorusComplex&, std::size_t d, std::size_t) { return ((d + 1) / 2) % m == 0; };
  auto co = coinvariant_image(prev.chain, cur.chain, 0, cur.chain.top(), keep);
  std::vector<std::size_t> co_old;
  if (older) co_old = coinvariant_image(older->chain, prev.chain, 0, prev.chain.top(), keep);
  for (std::size_t d = 0; d < co.size(); ++d) {
    rep.gamma_coinvariants.push_back({d, co[d], !co_old.empty() && co_old[d] == co[d]});
    if (!rep.coinvariant_degree && co[d] != (d == 0 ? 1u : 0u)) rep.coinvariant_degree = d;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// finite-length builder: cone off H-nontrivial homology with copies of W (x) Sigma^t D^(L)

bool FiniteLengthResult::stable() const {
  return std::all_of(betti.begin(), betti.end(), [](const DegreeValue& v) { return v.stable; });
}

namespace {

// h acting on the flattened degree-d term: t (x) u -> A_h t (x) rho(h) u
Matrix flat_h_action(const GradedTorusComplex& c, std::size_t d, std::size_t h) {
  const auto& a = *c.algebra;
  const std::size_t n = a.dim(), r = c.rank(d);
  Matrix out(a.prime(), r * n, r * n);
  const auto& rho = c.terms[d].rho[h];
  const auto& mat = c.group->matrix(h);
  std::vector<std::size_t> moved(n);
  for (std::size_t g = 0; g < n; ++g) moved[g] = a.act(mat, g);
  for (std::size_t u = 0; u < r; ++u)
    for (std::size_t v = 0; v < r; ++v) {
      Residue x = rho(v, u);
      if (!x) continue;
      for (std::size_t g = 0; g < n; ++g) out(v * n + moved[g], u * n + g) = x;
    }
  return out;
}

// x with a x = b_k for every k; also a random kernel combination when rng is given
std::optional<std::vector<Vec>> solve_many(const Matrix& a, const std::vector<Vec>& rhs, std::mt19937_64* rng) {
  const std::uint32_t p = a.prime();
  Matrix aug(p, a.rows(), a.cols() + rhs.size());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
    for (std::size_t k = 0; k < rhs.size(); ++k) aug(i, a.cols() + k) = rhs[k][i];
  }
  Echelon e = rref(aug);
  std::vector<std::size_t> piv;
  for (auto c : e.pivots) {
    if (c >= a.cols()) return std::nullopt;
    piv.push_back(c);
  }
  std::vector<bool> is_pivot(a.cols(), false);
  for (auto c : piv) is_pivot[c] = true;
  PrimeField k(p);
  std::vector<Vec> out;
  for (std::size_t col = 0; col < rhs.size(); ++col) {
    Vec x(a.cols(), 0);
    if (rng) {
      for (std::size_t f = 0; f < a.cols(); ++f)
        if (!is_pivot[f]) x[f] = static_cast<Residue>((*rng)() % p);
    }
    for (std::size_t i = 0; i < piv.size(); ++i) {
      Residue v = e.reduced(i, a.cols() + col);
      for (std::size_t f = 0; f < a.cols(); ++f)
        if (!is_pivot[f] && x[f] && e.reduced(i, f)) v = k.sub(v, k.mul(e.reduced(i, f), x[f]));
      x[piv[i]] = v;
    }
    out.push_back(std::move(x));
  }
  return out;
}

// H acting on H_t(R) in the basis of the representatives
std::vector<Matrix> homology_action(const GradedTorusComplex& c, std::size_t d, const std::vector<Vec>& reps,
                                    const Subspace& b) {
  const std::uint32_t p = c.algebra->prime();
  const std::size_t k = reps.size();
  Matrix cols(p, c.dim(d), k);
  for (std::size_t j = 0; j < k; ++j) {
    Vec r = b.reduce(reps[j]);
    for (std::size_t i = 0; i < r.size(); ++i) cols(i, j) = r[i];
  }
  std::vector<Vec> targets;
  std::vector<Matrix> mats(c.group->order());
  std::vector<Matrix> flat(c.group->order());
  for (std::size_t h = 0; h < c.group->order(); ++h) {
    flat[h] = flat_h_action(c, d, h);
    for (const auto& z : reps) targets.push_back(b.reduce(flat[h].apply(z)));
  }
  auto sol = solve_many(cols, targets, nullptr);
  if (!sol) throw TorusError("builder: H does not preserve the homology classes");
  for (std::size_t h = 0; h < c.group->order(); ++h) {
    mats[h] = Matrix(p, k, k);
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < k; ++i) mats[h](i, j) = (*sol)[h * k + j][i];
  }
  return mats;
}

Vec ring_column(const TruncatedTorusAlgebra& a, const RingMatrix& m, std::size_t col) {
  Vec out(m.rows * a.dim(), 0);
  for (std::size_t i = 0; i < m.rows; ++i)
    std::copy(m.at(i, col).begin(), m.at(i, col).end(), out.begin() + static_cast<long>(i * a.dim()));
  return out;
}

void set_ring_column(const TruncatedTorusAlgebra& a, RingMatrix& m, std::size_t col, const Vec& v) {
  for (std::size_t i = 0; i < m.rows; ++i)
    std::copy(v.begin() + static_cast<long>(i * a.dim()), v.begin() + static_cast<long>((i + 1) * a.dim()),
              m.at(i, col).begin());
}

// W (x) Sigma^t K, generators indexed w * dim(Lambda^m) + J
GradedTorusComplex shifted_copies(const GradedTorusComplex& k, const HRep& w, std::size_t t) {
  GradedTorusComplex a;
  a.algebra = k.algebra;
  a.group = k.group;
  const auto& alg = *k.algebra;
  HRep empty;
  empty.p = alg.prime();
  empty.rho.assign(k.group->order(), Matrix(alg.prime(), 0, 0));
  for (std::size_t d = 0; d < t; ++d) {
    a.terms.push_back(empty);
    a.labels.emplace_back();
  }
  for (std::size_t m = 0; m <= k.top(); ++m) {
    a.terms.push_back(HRep::tensor(w, k.terms[m]));
    std::vector<std::string> lab;
    for (std::size_t i = 0; i < w.dim; ++i)
      for (const auto& x : k.labels[m]) lab.push_back("w" + std::to_string(i) + ":" + x);
    a.labels.push_back(lab);
  }
  for (std::size_t d = 1; d <= a.top(); ++d) {
    RingMatrix m(alg, a.rank(d - 1), a.rank(d));
    if (d > t) {
      RingMatrix kb = k.boundary(d - t);
      for (std::size_t i = 0; i < w.dim; ++i)
        for (std::size_t r = 0; r < kb.rows; ++r)
          for (std::size_t c = 0; c < kb.cols; ++c) m.at(i * kb.rows + r, i * kb.cols + c) = kb.at(r, c);
    }
    a.boundaries.push_back(std::move(m));
  }
  return a;
}

struct BuildOutcome {
  GradedTorusComplex complex;
  std::vector<FiltrationPiece> filtration;
  std::vector<std::size_t> betti;
  bool chain_maps_commute = true;
  bool t_trivial = true;
  bool h_trivial = true;
  bool coinvariant_free = true;
};

bool h_acts_trivially(const std::vector<Matrix>& mats) {
  return std::all_of(mats.begin(), mats.end(), [](const Matrix& m) { return m.is_identity(); });
}

BuildOutcome build_at_level(const TorusExtensionGroup& g, std::size_t bound, std::uint64_t seed,
                            const std::stop_token& stop) {
  const std::uint32_t p = g.prime();
  auto params = torus_parameters(g);
  if (!params.all_checks()) throw TorusError("builder: the maps phi and psi fail their checks");
  const GradedTorusComplex base = koszul_complex(params, params.level());
  const auto& alg = *base.algebra;
  std::mt19937_64 rng(seed);
  std::mt19937_64* rp = seed ? &rng : nullptr;
  BuildOutcome out;
  out.complex = base;
  FiltrationPiece first{0, 1, {}};
  if (g.rank() == 1) first.character = {0};
  out.filtration.push_back(first);
  PrimeField k(p);
  std::size_t from = 0;
  std::size_t guard = 0;
  for (;;) {
    if (stop.stop_requested()) throw BuilderCancelled();
    GradedTorusComplex& r = out.complex;
    std::optional<std::size_t> found;
    DenseHomology hom;
    std::vector<Matrix> mats;
    for (std::size_t d = from; d <= bound && d <= r.top(); ++d) {
      if (stop.stop_requested()) throw BuilderCancelled();
      hom = dense_homology(r, d, d, true);
      if (hom.representatives[0].empty()) continue;
      mats = homology_action(r, d, hom.representatives[0], hom.boundaries[0]);
      if (!h_acts_trivially(mats)) {
        found = d;
        break;
      }
    }
    if (!found) break;
    if (++guard > 4 * (bound + 2)) throw TorusError("builder: no progress killing H-nontrivial homology");
    const std::size_t t = *found;
    const auto& reps = hom.representatives[0];
    const std::size_t nh = reps.size();
    // W = image(1 - e) inside H_t
    Matrix e(p, nh, nh);
    for (const auto& m : mats) e = e + m;
    e = e.scaled(k.inv(static_cast<Residue>(g.order() % p)));
    Subspace w = image_basis(Matrix::identity(p, nh) - e);
    HRep wrep;
    wrep.p = p;
    wrep.dim = w.dim();
    for (const auto& m : mats) {
      Matrix rho(p, w.dim(), w.dim());
      for (std::size_t j = 0; j < w.dim(); ++j) {
        Vec c = w.coordinates(m.apply(w.vector(j)));
        for (std::size_t i = 0; i < w.dim(); ++i) rho(i, j) = c[i];
      }
      wrep.rho.push_back(rho);
    }
    if (wrep.invariants_dim() != 0) out.coinvariant_free = false;
    FiltrationPiece piece{t + 1, w.dim(), {}};
    if (g.rank() == 1)
      for (std::size_t j = 0; j < g.order(); ++j) {
        std::size_t mult = HRep::tensor(wrep, HRep::character_power(g, -static_cast<long long>(j))).invariants_dim();
        for (std::size_t c = 0; c < mult; ++c) piece.character.push_back(j);
      }
    // the chain map A = W (x) Sigma^t D^(L) -> R
    GradedTorusComplex a = shifted_copies(base, wrep, t);
    TorusChainMap f;
    for (std::size_t d = 0; d <= a.top(); ++d) f.components.emplace_back(alg, r.rank(d), a.rank(d));
    Matrix dt1 = r.rank(t + 1) ? flatten(alg, r.boundary(t + 1)) : Matrix(p, r.dim(t), 0);
    for (std::size_t j = 0; j < w.dim(); ++j) {
      Vec z(r.dim(t), 0);
      Vec coeff = w.vector(j);
      for (std::size_t i = 0; i < nh; ++i)
        for (std::size_t u = 0; u < z.size() && coeff[i]; ++u) z[u] = k.add(z[u], k.mul(coeff[i], reps[i][u]));
      if (rp && dt1.cols()) {
        Vec x(dt1.cols());
        for (auto& v : x) v = static_cast<Residue>(rng() % p);
        Vec bz = dt1.apply(x);
        for (std::size_t u = 0; u < z.size(); ++u) z[u] = k.add(z[u], bz[u]);
      }
      set_ring_column(alg, f.components[t], j, z);
    }
    for (std::size_t d = t + 1; d <= a.top(); ++d) {
      if (stop.stop_requested()) throw BuilderCancelled();
      RingMatrix rhs_ring = ring_multiply(alg, f.components[d - 1], a.boundary(d));
      std::vector<Vec> rhs;
      for (std::size_t c = 0; c < a.rank(d); ++c) rhs.push_back(ring_column(alg, rhs_ring, c));
      if (r.rank(d) == 0) {
        bool zero = std::all_of(rhs.begin(), rhs.end(), [](const Vec& v) {
          return std::all_of(v.begin(), v.end(), [](Residue x) { return x == 0; });
        });
        if (!zero) throw LiftObstruction("builder: no room to lift in degree " + std::to_string(d));
        continue;
      }
      auto sol = solve_many(flatten(alg, r.boundary(d)), rhs, rp);
      if (!sol) throw LiftObstruction("builder: the lift to degree " + std::to_string(d) + " is obstructed");
      for (std::size_t c = 0; c < a.rank(d); ++c) set_ring_column(alg, f.components[d], c, (*sol)[c]);
    }
    HRep none;
    none.p = p;
    none.rho.assign(g.order(), Matrix(p, 0, 0));
    for (std::size_t d = t; d <= a.top(); ++d)
      f.components[d] = average_over_h(alg, g, f.components[d], a.terms[d], d < r.terms.size() ? r.terms[d] : none);
    if (!is_chain_map(a, r, f)) {
      out.chain_maps_commute = false;
      throw LiftObstruction("builder: the averaged map is not a chain map");
    }
    GradedTorusComplex next = mapping_cone(a, r, f);
    out.complex = std::move(next);
    out.filtration.push_back(piece);
    from = t;
  }
  // final homology and the T and H actions
  GradedTorusComplex& r = out.complex;
  for (std::size_t d = 0; d <= bound; ++d) {
    if (stop.stop_requested()) throw BuilderCancelled();
    if (d > r.top()) {
      out.betti.push_back(0);
      continue;
    }
    DenseHomology hom = dense_homology(r, d, d, true);
    out.betti.push_back(hom.dims[0]);
    const auto& reps = hom.representatives[0];
    if (reps.empty()) continue;
    if (!h_acts_trivially(homology_action(r, d, reps, hom.boundaries[0]))) out.h_trivial = false;
    for (std::size_t axis = 0; axis < g.rank(); ++axis) {
      const std::size_t tg = alg.generator(alg.level(), axis);
      for (const auto& z : reps) {
        Vec moved(z.size(), 0);
        for (std::size_t blk = 0; blk < r.rank(d); ++blk)
          for (std::size_t u = 0; u < alg.dim(); ++u) {
            Residue x = z[blk * alg.dim() + u];
            if (!x) continue;
            std::size_t to = blk * alg.dim() + alg.add(u, tg);
            moved[to] = k.add(moved[to], x);
            moved[blk * alg.dim() + u] = k.sub(moved[blk * alg.dim() + u], x);
          }
        if (!hom.boundaries[0].contains(moved)) out.t_trivial = false;
      }
    }
  }
  return out;
}

}  // namespace

FiniteLengthResult finite_length_builder(const TorusExtensionGroup& g, std::size_t degree_bound, std::uint64_t seed,
                                         std::stop_token stop, std::size_t threads) {
  if (g.level() < 2) throw TorusError("builder: level must be at least 2");
  FiniteLengthResult res;
  res.level = g.level();
  res.degree_bound = degree_bound;
  res.seed = seed;
  auto lower = g.at_level(g.level() - 1);
  BuildOutcome cur, prev;
  if (threads > 1) {
    auto below = std::async(std::launch::async, [&] { return build_at_level(lower, degree_bound, seed, stop); });
    cur = build_at_level(g, degree_bound, seed, stop);
    prev = below.get();
  } else {
    cur = build_at_level(g, degree_bound, seed, stop);
    prev = build_at_level(lower, degree_bound, seed, stop);
  }
  res.complex = std::move(cur.complex);
  res.filtration = std::move(cur.filtration);
  res.betti_previous = prev.betti;
  for (std::size_t d = 0; d <= degree_bound; ++d) res.betti.push_back({d, cur.betti[d], cur.betti[d] == prev.betti[d]});
  res.squares_to_zero = res.complex.squares_to_zero();
  res.equivariant = res.complex.equivariant();
  res.chain_maps_commute = cur.chain_maps_commute && prev.chain_maps_commute;
  res.t_trivial = cur.t_trivial;
  res.h_trivial = cur.h_trivial;
  res.pieces_coinvariant_free = cur.coinvariant_free;
  auto pc = torus_parameters(g), pp = torus_parameters(lower);
  auto co = telescope_coinvariant_image(pp, pc);
  res.base_coinvariants_acyclic = true;
  for (std::size_t d = 0; d < co.size(); ++d)
    if (co[d] != (d == 0 ? 1u : 0u)) res.base_coinvariants_acyclic = false;
  return res;
}

}  // namespace omegares
