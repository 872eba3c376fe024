#include "omegares/groups.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

namespace omegares {

FinGroup::FinGroup() : n_(1), e_(0), table_{0}, inverse_{0} {}

FinGroup::FinGroup(std::vector<std::vector<Elem>> table) : n_(table.size()), e_(0) {
  if (n_ == 0) throw std::invalid_argument("group table is empty");
  table_.resize(n_ * n_);
  for (std::size_t a = 0; a < n_; ++a) {
    if (table[a].size() != n_) throw std::invalid_argument("group table is not square");
    for (std::size_t b = 0; b < n_; ++b) {
      if (table[a][b] >= n_) throw std::invalid_argument("group table entry out of range");
      table_[a * n_ + b] = table[a][b];
    }
  }
  bool found = false;
  for (Elem c = 0; c < n_ && !found; ++c) {
    bool ok = true;
    for (Elem x = 0; x < n_ && ok; ++x) ok = mul(c, x) == x && mul(x, c) == x;
    if (ok) {
      e_ = c;
      found = true;
    }
  }
  if (!found) throw std::invalid_argument("group table has no identity");
  inverse_.assign(n_, 0);
  for (Elem a = 0; a < n_; ++a) {
    bool ok = false;
    for (Elem b = 0; b < n_; ++b)
      if (mul(a, b) == e_ && mul(b, a) == e_) {
        inverse_[a] = b;
        ok = true;
        break;
      }
    if (!ok) throw std::invalid_argument("group table element without inverse");
  }
  auto assoc = [&](Elem a, Elem b, Elem c) { return mul(mul(a, b), c) == mul(a, mul(b, c)); };
  if (n_ <= 256) {
    for (Elem a = 0; a < n_; ++a)
      for (Elem b = 0; b < n_; ++b)
        for (Elem c = 0; c < n_; ++c)
          if (!assoc(a, b, c)) throw std::invalid_argument("group table is not associative");
  } else {
    std::mt19937_64 rng(n_);
    for (int i = 0; i < 200000; ++i) {
      Elem a = rng() % n_, b = rng() % n_, c = rng() % n_;
      if (!assoc(a, b, c)) throw std::invalid_argument("group table is not associative");
    }
  }
}

Elem FinGroup::pow(Elem a, long long k) const {
  if (k < 0) {
    a = inv(a);
    k = -k;
  }
  Elem r = e_;
  while (k) {
    if (k & 1) r = mul(r, a);
    a = mul(a, a);
    k >>= 1;
  }
  return r;
}

Elem FinGroup::commutator(Elem a, Elem b) const { return mul(mul(inv(a), inv(b)), mul(a, b)); }

std::size_t FinGroup::element_order(Elem a) const {
  std::size_t k = 1;
  for (Elem x = a; x != e_; x = mul(x, a)) ++k;
  return k;
}

bool FinGroup::is_abelian() const {
  for (Elem a = 0; a < n_; ++a)
    for (Elem b = a + 1; b < n_; ++b)
      if (mul(a, b) != mul(b, a)) return false;
  return true;
}

std::vector<std::vector<Elem>> FinGroup::table() const {
  std::vector<std::vector<Elem>> t(n_, std::vector<Elem>(n_));
  for (Elem a = 0; a < n_; ++a)
    for (Elem b = 0; b < n_; ++b) t[a][b] = mul(a, b);
  return t;
}

namespace {

Permutation compose(const Permutation& a, const Permutation& b) {
  // (a*b)(x) = a(b(x))
  Permutation c(a.size());
  for (std::size_t x = 0; x < a.size(); ++x) c[x] = a[b[x]];
  return c;
}

void validate_permutation(const Permutation& p, std::size_t degree) {
  if (p.size() != degree) throw std::invalid_argument("permutations of different degrees");
  std::vector<bool> seen(degree, false);
  for (auto x : p) {
    if (x >= degree || seen[x]) throw std::invalid_argument("not a permutation");
    seen[x] = true;
  }
}

}  // namespace

FinGroup from_permutations(const std::vector<Permutation>& generators, std::vector<Permutation>& elements,
                           GroupOptions opts) {
  std::size_t degree = generators.empty() ? 0 : generators.front().size();
  for (auto& g : generators) validate_permutation(g, degree);
  Permutation id(degree);
  std::iota(id.begin(), id.end(), 0u);
  std::map<Permutation, Elem> index{{id, 0}};
  elements = {id};
  for (std::size_t head = 0; head < elements.size(); ++head) {
    for (auto& g : generators) {
      Permutation next = compose(elements[head], g);
      if (index.count(next)) continue;
      if (elements.size() >= opts.order_cap)
        throw OrderCapExceeded("group order exceeds cap " + std::to_string(opts.order_cap));
      index.emplace(next, static_cast<Elem>(elements.size()));
      elements.push_back(std::move(next));
    }
  }
  const std::size_t n = elements.size();
  std::vector<std::vector<Elem>> table(n, std::vector<Elem>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) table[a][b] = index.at(compose(elements[a], elements[b]));
  return FinGroup(std::move(table));
}

FinGroup from_permutations(const std::vector<Permutation>& generators, GroupOptions opts) {
  std::vector<Permutation> elements;
  return from_permutations(generators, elements, opts);
}

FinGroup cyclic_group(std::size_t n) {
  std::vector<std::vector<Elem>> t(n, std::vector<Elem>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) t[a][b] = static_cast<Elem>((a + b) % n);
  return FinGroup(std::move(t));
}

FinGroup symmetric_group(std::size_t n) {
  if (n <= 1) return FinGroup();
  Permutation swap(n), cycle(n);
  std::iota(swap.begin(), swap.end(), 0u);
  std::swap(swap[0], swap[1]);
  for (std::size_t i = 0; i < n; ++i) cycle[i] = static_cast<std::uint32_t>((i + 1) % n);
  return from_permutations({swap, cycle}, GroupOptions{1u << 20});
}

FinGroup alternating_group(std::size_t n) {
  if (n <= 2) return FinGroup();
  std::vector<Permutation> gens;
  for (std::size_t k = 2; k < n; ++k) {
    Permutation c(n);
    std::iota(c.begin(), c.end(), 0u);
    c[0] = 1;
    c[1] = static_cast<std::uint32_t>(k);
    c[k] = 0;
    gens.push_back(c);
  }
  return from_permutations(gens, GroupOptions{1u << 20});
}

FinGroup dihedral_group(std::size_t n) {
  Permutation r(n), s(n);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = static_cast<std::uint32_t>((i + 1) % n);
    s[i] = static_cast<std::uint32_t>((n - i) % n);
  }
  return from_permutations({r, s});
}

FinGroup quaternion_group() {
  // regular representation on {1,i,j,k,-1,-i,-j,-k} indexed 0..7
  auto perm_of = [](int unit) {
    static const int mult[4][4] = {{0, 1, 2, 3}, {1, 4, 3, 6}, {2, 7, 4, 1}, {3, 2, 5, 4}};
    // left multiplication by unit on signed basis
    Permutation p(8);
    for (int x = 0; x < 8; ++x) {
      int sx = x / 4, bx = x % 4;
      int r = mult[unit][bx];
      int sr = (r / 4 + sx) % 2, br = r % 4;
      p[x] = static_cast<std::uint32_t>(sr * 4 + br);
    }
    return p;
  };
  return from_permutations({perm_of(1), perm_of(2)});
}

FinGroup direct_product(const FinGroup& a, const FinGroup& b) {
  const std::size_t n = a.order() * b.order();
  std::vector<std::vector<Elem>> t(n, std::vector<Elem>(n));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      Elem ax = x / b.order(), bx = x % b.order(), ay = y / b.order(), by = y % b.order();
      t[x][y] = static_cast<Elem>(a.mul(ax, ay) * b.order() + b.mul(bx, by));
    }
  return FinGroup(std::move(t));
}

SubgroupHandle::SubgroupHandle(const FinGroup& g, std::vector<Elem> elements) : elems_(std::move(elements)) {
  std::sort(elems_.begin(), elems_.end());
  elems_.erase(std::unique(elems_.begin(), elems_.end()), elems_.end());
  if (!contains(g.identity())) throw std::invalid_argument("subgroup lacks the identity");
  for (Elem a : elems_) {
    if (a >= g.order()) throw std::invalid_argument("subgroup element out of range");
    if (!contains(g.inv(a))) throw std::invalid_argument("subgroup not closed under inverses");
    for (Elem b : elems_)
      if (!contains(g.mul(a, b))) throw std::invalid_argument("subgroup not closed under products");
  }
}

bool SubgroupHandle::contains(Elem x) const { return std::binary_search(elems_.begin(), elems_.end(), x); }

SubgroupHandle whole_group(const FinGroup& g) {
  std::vector<Elem> all(g.order());
  std::iota(all.begin(), all.end(), 0u);
  return SubgroupHandle(g, std::move(all));
}

SubgroupHandle trivial_subgroup(const FinGroup& g) { return SubgroupHandle(g, {g.identity()}); }

SubgroupHandle generated_subgroup(const FinGroup& g, const std::vector<Elem>& gens) {
  std::vector<bool> in(g.order(), false);
  std::vector<Elem> list{g.identity()};
  in[g.identity()] = true;
  for (std::size_t head = 0; head < list.size(); ++head)
    for (Elem s : gens) {
      Elem x = g.mul(list[head], s);
      if (!in[x]) {
        in[x] = true;
        list.push_back(x);
      }
    }
  return SubgroupHandle(g, std::move(list));
}

SubgroupHandle normal_closure(const FinGroup& g, const std::vector<Elem>& gens) {
  std::vector<Elem> conjugates;
  for (Elem s : gens)
    for (Elem x = 0; x < g.order(); ++x) conjugates.push_back(g.conj(x, s));
  return generated_subgroup(g, conjugates);
}

bool is_normal(const FinGroup& g, const SubgroupHandle& n) {
  for (Elem x = 0; x < g.order(); ++x)
    for (Elem a : n.elements())
      if (!n.contains(g.conj(x, a))) return false;
  return true;
}

SubgroupHandle commutator_subgroup(const FinGroup& g, const SubgroupHandle& h) {
  std::vector<Elem> comms;
  for (Elem a : h.elements())
    for (Elem b : h.elements()) comms.push_back(g.commutator(a, b));
  std::sort(comms.begin(), comms.end());
  comms.erase(std::unique(comms.begin(), comms.end()), comms.end());
  return generated_subgroup(g, comms);
}

std::vector<SubgroupHandle> normal_subgroups(const FinGroup& g) {
  std::set<std::vector<Elem>> found;
  std::vector<SubgroupHandle> list;
  auto add = [&](const SubgroupHandle& s) {
    if (found.insert(s.elements()).second) list.push_back(s);
  };
  add(trivial_subgroup(g));
  std::vector<SubgroupHandle> closures;
  for (Elem x = 0; x < g.order(); ++x) {
    auto c = normal_closure(g, {x});
    if (found.insert(c.elements()).second) {
      list.push_back(c);
      closures.push_back(c);
    }
  }
  // joins of normal closures generate every normal subgroup
  for (std::size_t i = 0; i < list.size(); ++i)
    for (const auto& c : closures) {
      std::vector<Elem> gens = list[i].elements();
      gens.insert(gens.end(), c.elements().begin(), c.elements().end());
      add(generated_subgroup(g, gens));
    }
  std::sort(list.begin(), list.end(), [](const SubgroupHandle& a, const SubgroupHandle& b) {
    return a.order() != b.order() ? a.order() < b.order() : a.elements() < b.elements();
  });
  return list;
}

FinGroup as_group(const FinGroup& g, const SubgroupHandle& h) {
  const auto& el = h.elements();
  std::map<Elem, Elem> pos;
  for (std::size_t i = 0; i < el.size(); ++i) pos[el[i]] = static_cast<Elem>(i);
  std::vector<std::vector<Elem>> t(el.size(), std::vector<Elem>(el.size()));
  for (std::size_t a = 0; a < el.size(); ++a)
    for (std::size_t b = 0; b < el.size(); ++b) t[a][b] = pos.at(g.mul(el[a], el[b]));
  return FinGroup(std::move(t));
}

std::vector<BigInt> abelianization(const FinGroup& g) {
  const std::size_t n = g.order();
  // generators: all elements; relations: [a] + [b] - [ab] = 0
  IntMatrix rel(n * n, n);
  for (Elem a = 0; a < n; ++a)
    for (Elem b = 0; b < n; ++b) {
      std::size_t r = a * n + b;
      rel(r, a) += 1;
      rel(r, b) += 1;
      rel(r, g.mul(a, b)) -= 1;
    }
  auto d = invariant_factors(rel);
  std::vector<BigInt> out;
  for (auto& x : d)
    if (x != 1) out.push_back(x);
  for (std::size_t free = d.size(); free < n; ++free) out.push_back(0);
  return out;
}

std::vector<BigInt> abelianization(const FinGroup& g, const SubgroupHandle& h) {
  return abelianization(as_group(g, h));
}

bool invariant_factors_p_perfect(const std::vector<BigInt>& factors, std::uint32_t p) {
  for (auto& d : factors)
    if (d % p == 0) return false;
  return true;
}

bool is_R_perfect(const FinGroup& g, std::uint32_t p) {
  return invariant_factors_p_perfect(abelianization(g), p);
}

bool is_R_perfect(const FinGroup& g, const SubgroupHandle& h, std::uint32_t p) {
  return invariant_factors_p_perfect(abelianization(g, h), p);
}

bool is_p_power(std::size_t n, std::uint32_t p) {
  while (n > 1 && n % p == 0) n /= p;
  return n == 1;
}

SubgroupHandle p_residual(const FinGroup& g, std::uint32_t p) {
  SubgroupHandle cur = whole_group(g);
  for (;;) {
    std::vector<Elem> gens;
    for (Elem a : cur.elements()) {
      gens.push_back(g.pow(a, p));
      for (Elem b : cur.elements()) gens.push_back(g.commutator(a, b));
    }
    std::sort(gens.begin(), gens.end());
    gens.erase(std::unique(gens.begin(), gens.end()), gens.end());
    SubgroupHandle next = generated_subgroup(g, gens);
    if (next == cur) break;
    cur = std::move(next);
  }
  if (!is_normal(g, cur)) throw std::logic_error("p_residual: result is not normal");
  if (!is_R_perfect(g, cur, p)) throw std::logic_error("p_residual: result is not p-perfect");
  if (!is_p_power(g.order() / cur.order(), p)) throw std::logic_error("p_residual: quotient is not a p-group");
  return cur;
}

Quotient quotient(const FinGroup& g, const SubgroupHandle& n) {
  if (!is_normal(g, n)) throw std::invalid_argument("quotient by a subgroup that is not normal");
  const std::size_t order = g.order();
  std::vector<Elem> rep_of(order);
  std::vector<Elem> reps;
  std::map<Elem, Elem> coset_index;
  for (Elem x = 0; x < order; ++x) {
    Elem rep = x;
    for (Elem a : n.elements()) rep = std::min(rep, g.mul(x, a));
    rep_of[x] = rep;
    if (!coset_index.count(rep)) {
      coset_index[rep] = static_cast<Elem>(reps.size());
      reps.push_back(rep);
    }
  }
  Quotient q;
  q.projection.resize(order);
  for (Elem x = 0; x < order; ++x) q.projection[x] = coset_index.at(rep_of[x]);
  const std::size_t m = reps.size();
  std::vector<std::vector<Elem>> t(m, std::vector<Elem>(m));
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) t[a][b] = q.projection[g.mul(reps[a], reps[b])];
  q.group = FinGroup(std::move(t));
  if (!is_homomorphism(g, q.group, q.projection)) throw std::logic_error("quotient projection is not a homomorphism");
  return q;
}

bool is_homomorphism(const FinGroup& from, const FinGroup& to, const std::vector<Elem>& map) {
  if (map.size() != from.order()) return false;
  for (Elem x : map)
    if (x >= to.order()) return false;
  for (Elem a = 0; a < from.order(); ++a)
    for (Elem b = 0; b < from.order(); ++b)
      if (map[from.mul(a, b)] != to.mul(map[a], map[b])) return false;
  return true;
}

SubgroupHandle kernel(const FinGroup& from, const FinGroup& to, const std::vector<Elem>& map) {
  std::vector<Elem> k;
  for (Elem a = 0; a < from.order(); ++a)
    if (map[a] == to.identity()) k.push_back(a);
  return SubgroupHandle(from, std::move(k));
}

}  // namespace omegares
