#include "omegares/exactla.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

namespace omegares {

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

PrimeField::PrimeField(std::uint32_t p) : p_(p) {
  if (!is_prime(p)) throw std::invalid_argument("modulus " + std::to_string(p) + " is not prime");
}

Residue PrimeField::inv(Residue a) const {
  if (a % p_ == 0) throw std::domain_error("inverse of zero in F_p");
  long long t = 0, nt = 1, r = p_, nr = a % p_;
  while (nr != 0) {
    long long q = r / nr;
    std::tie(t, nt) = std::make_pair(nt, t - q * nt);
    std::tie(r, nr) = std::make_pair(nr, r - q * nr);
  }
  return from_int(t);
}

Residue PrimeField::pow(Residue a, std::uint64_t e) const {
  Residue result = 1 % p_, base = a % p_;
  while (e) {
    if (e & 1) result = mul(result, base);
    base = mul(base, base);
    e >>= 1;
  }
  return result;
}

Residue PrimeField::from_int(long long v) const {
  long long r = v % static_cast<long long>(p_);
  if (r < 0) r += p_;
  return static_cast<Residue>(r);
}

namespace {

// dst[j] = dst[j] + f * src[j] mod p over n entries
void axpy(Residue* dst, const Residue* src, Residue f, std::size_t n, std::uint32_t p) {
  if (f == 0) return;
  if (p == 2) {
    for (std::size_t j = 0; j < n; ++j) dst[j] ^= src[j];
    return;
  }
  if (p <= 256) {
    Residue table[256];
    for (Residue s = 0; s < p; ++s) table[s] = (f * s) % p;
    for (std::size_t j = 0; j < n; ++j) {
      Residue x = dst[j] + table[src[j]];
      dst[j] = x >= p ? x - p : x;
    }
    return;
  }
  for (std::size_t j = 0; j < n; ++j)
    dst[j] = static_cast<Residue>((dst[j] + static_cast<std::uint64_t>(f) * src[j]) % p);
}

void scale_row(Residue* row, Residue f, std::size_t n, const PrimeField& k) {
  for (std::size_t j = 0; j < n; ++j) row[j] = k.mul(row[j], f);
}

void check_same_prime(const Matrix& a, const Matrix& b) {
  if (a.prime() != b.prime()) throw DimensionError("matrices over different primes");
}

}  // namespace

Matrix::Matrix(std::uint32_t p, std::size_t rows, std::size_t cols)
    : p_(p), rows_(rows), cols_(cols), data_(rows * cols, 0) {}

Matrix Matrix::identity(std::uint32_t p, std::size_t n) {
  Matrix m(p, n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1 % p;
  return m;
}

Matrix Matrix::from_rows(std::uint32_t p, const std::vector<std::vector<long long>>& rows) {
  PrimeField k(p);
  std::size_t c = rows.empty() ? 0 : rows.front().size();
  Matrix m(p, rows.size(), c);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != c) throw DimensionError("ragged rows");
    for (std::size_t j = 0; j < c; ++j) m(i, j) = k.from_int(rows[i][j]);
  }
  return m;
}

Matrix Matrix::from_entries(std::uint32_t p, std::size_t rows, std::size_t cols,
                            std::span<const long long> entries) {
  if (entries.size() != rows * cols) throw DimensionError("entry count does not match shape");
  PrimeField k(p);
  Matrix m(p, rows, cols);
  for (std::size_t i = 0; i < entries.size(); ++i) m.data_[i] = k.from_int(entries[i]);
  return m;
}

Matrix Matrix::column(std::uint32_t p, std::span<const Residue> v) {
  Matrix m(p, v.size(), 1);
  std::copy(v.begin(), v.end(), m.data_.begin());
  return m;
}

Vec Matrix::col(std::size_t j) const {
  Vec v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

bool Matrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](Residue x) { return x == 0; });
}

bool Matrix::is_identity() const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if ((*this)(i, j) != (i == j ? 1u : 0u)) return false;
  return true;
}

Matrix Matrix::transpose() const {
  Matrix t(p_, cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
  check_same_prime(*this, rhs);
  if (cols_ != rhs.rows_) throw DimensionError("product shape mismatch");
  Matrix out(p_, rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    Residue* dst = out.data_.data() + i * rhs.cols_;
    for (std::size_t l = 0; l < cols_; ++l) {
      Residue f = (*this)(i, l);
      if (f) axpy(dst, rhs.data_.data() + l * rhs.cols_, f, rhs.cols_, p_);
    }
  }
  return out;
}

Matrix Matrix::operator+(const Matrix& rhs) const {
  check_same_prime(*this, rhs);
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw DimensionError("sum shape mismatch");
  Matrix out = *this;
  axpy(out.data_.data(), rhs.data_.data(), 1 % p_, data_.size(), p_);
  return out;
}

Matrix Matrix::operator-(const Matrix& rhs) const {
  check_same_prime(*this, rhs);
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw DimensionError("difference shape mismatch");
  Matrix out = *this;
  axpy(out.data_.data(), rhs.data_.data(), p_ - 1, data_.size(), p_);
  return out;
}

Matrix Matrix::scaled(Residue c) const {
  Matrix out(p_, rows_, cols_);
  axpy(out.data_.data(), data_.data(), c % p_, data_.size(), p_);
  return out;
}

Vec Matrix::apply(std::span<const Residue> x) const {
  if (x.size() != cols_) throw DimensionError("apply: vector length mismatch");
  Vec y(rows_, 0);
  for (std::size_t i = 0; i < rows_; ++i) {
    std::uint64_t acc = 0;
    const Residue* r = data_.data() + i * cols_;
    for (std::size_t j = 0; j < cols_; ++j) {
      acc += static_cast<std::uint64_t>(r[j]) * x[j];
      if (acc >= (1ull << 62)) acc %= p_;
    }
    y[i] = static_cast<Residue>(acc % p_);
  }
  return y;
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) throw DimensionError("block out of range");
  Matrix b(p_, nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    std::copy_n(data_.data() + (r0 + i) * cols_ + c0, nc, b.data_.data() + i * nc);
  return b;
}

void Matrix::set_block(std::size_t r0, std::size_t c0, const Matrix& b) {
  if (r0 + b.rows_ > rows_ || c0 + b.cols_ > cols_) throw DimensionError("set_block out of range");
  for (std::size_t i = 0; i < b.rows_; ++i)
    std::copy_n(b.data_.data() + i * b.cols_, b.cols_, data_.data() + (r0 + i) * cols_ + c0);
}

void Matrix::add_block(std::size_t r0, std::size_t c0, const Matrix& b) {
  if (r0 + b.rows_ > rows_ || c0 + b.cols_ > cols_) throw DimensionError("add_block out of range");
  for (std::size_t i = 0; i < b.rows_; ++i)
    axpy(data_.data() + (r0 + i) * cols_ + c0, b.data_.data() + i * b.cols_, 1 % p_, b.cols_, p_);
}

Matrix Matrix::select_rows(std::span<const std::size_t> idx) const {
  Matrix out(p_, idx.size(), cols_);
  for (std::size_t i = 0; i < idx.size(); ++i)
    std::copy_n(data_.data() + idx[i] * cols_, cols_, out.data_.data() + i * cols_);
  return out;
}

Matrix Matrix::select_cols(std::span<const std::size_t> idx) const {
  Matrix out(p_, rows_, idx.size());
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) out(i, j) = (*this)(i, idx[j]);
  return out;
}

Matrix Matrix::hstack(const Matrix& a, const Matrix& b) {
  check_same_prime(a, b);
  if (a.rows_ != b.rows_) throw DimensionError("hstack row mismatch");
  Matrix out(a.p_, a.rows_, a.cols_ + b.cols_);
  out.set_block(0, 0, a);
  out.set_block(0, a.cols_, b);
  return out;
}

Matrix Matrix::vstack(const Matrix& a, const Matrix& b) {
  check_same_prime(a, b);
  if (a.cols_ != b.cols_) throw DimensionError("vstack column mismatch");
  Matrix out(a.p_, a.rows_ + b.rows_, a.cols_);
  out.set_block(0, 0, a);
  out.set_block(a.rows_, 0, b);
  return out;
}

Matrix Matrix::direct_sum(const Matrix& a, const Matrix& b) {
  check_same_prime(a, b);
  Matrix out(a.p_, a.rows_ + b.rows_, a.cols_ + b.cols_);
  out.set_block(0, 0, a);
  out.set_block(a.rows_, a.cols_, b);
  return out;
}

std::string to_string(const Matrix& m) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    os << (i ? ",[" : "[");
    for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? "," : "") << m(i, j);
    os << "]";
  }
  os << "]";
  return os.str();
}

namespace {

// In-place elimination. With reduce=false only rows below each pivot are cleared.
std::vector<std::size_t> eliminate(Matrix& m, bool reduce) {
  const std::uint32_t p = m.prime();
  PrimeField k(p);
  const std::size_t rows = m.rows(), cols = m.cols();
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t sel = rows;
    for (std::size_t i = r; i < rows; ++i)
      if (m(i, c) != 0) {
        sel = i;
        break;
      }
    if (sel == rows) continue;
    if (sel != r) std::swap_ranges(m.row(sel).begin(), m.row(sel).end(), m.row(r).begin());
    Residue* prow = m.row(r).data();
    scale_row(prow + c, k.inv(prow[c]), cols - c, k);
    for (std::size_t i = reduce ? 0 : r + 1; i < rows; ++i) {
      if (i == r) continue;
      Residue f = m(i, c);
      if (f) axpy(m.row(i).data() + c, prow + c, k.neg(f), cols - c, p);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace

Echelon rref(const Matrix& a) {
  Echelon e;
  e.reduced = a;
  e.pivots = eliminate(e.reduced, true);
  e.rank = e.pivots.size();
  return e;
}

std::size_t rank(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  Matrix m = a.rows() > a.cols() ? a.transpose() : a;
  return eliminate(m, false).size();
}

std::optional<Matrix> inverse(const Matrix& a) {
  if (!a.is_square()) throw DimensionError("inverse of a non-square matrix");
  const std::size_t n = a.rows();
  auto e = rref(Matrix::hstack(a, Matrix::identity(a.prime(), n)));
  if (n > 0 && (e.pivots.size() < n || e.pivots[n - 1] != n - 1)) return std::nullopt;
  return e.reduced.block(0, n, n, n);
}

Subspace::Subspace(std::uint32_t p, std::size_t ambient_dim) : basis_(p, 0, ambient_dim) {}

Subspace Subspace::span(const Matrix& rows) {
  Echelon e = rref(rows);
  Subspace s;
  s.basis_ = e.reduced.block(0, 0, e.rank, rows.cols());
  s.pivots_ = std::move(e.pivots);
  return s;
}

Subspace Subspace::span(std::uint32_t p, std::size_t ambient_dim, const std::vector<Vec>& vectors) {
  Matrix m(p, vectors.size(), ambient_dim);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != ambient_dim) throw DimensionError("span: vector length mismatch");
    std::copy(vectors[i].begin(), vectors[i].end(), m.row(i).begin());
  }
  return span(m);
}

Subspace Subspace::whole(std::uint32_t p, std::size_t ambient_dim) {
  return span(Matrix::identity(p, ambient_dim));
}

Vec Subspace::vector(std::size_t i) const {
  auto r = basis_.row(i);
  return Vec(r.begin(), r.end());
}

Vec Subspace::reduce(std::span<const Residue> v) const {
  if (v.size() != ambient_dim()) throw DimensionError("reduce: vector length mismatch");
  Vec out(v.begin(), v.end());
  const std::uint32_t p = prime();
  PrimeField k(p);
  for (std::size_t i = 0; i < pivots_.size(); ++i) {
    Residue f = out[pivots_[i]];
    if (f) axpy(out.data(), basis_.row(i).data(), k.neg(f), out.size(), p);
  }
  return out;
}

bool Subspace::contains(std::span<const Residue> v) const {
  Vec r = reduce(v);
  return std::all_of(r.begin(), r.end(), [](Residue x) { return x == 0; });
}

bool Subspace::contains(const Subspace& other) const {
  for (std::size_t i = 0; i < other.dim(); ++i)
    if (!contains(other.basis_.row(i))) return false;
  return true;
}

Vec Subspace::coordinates(std::span<const Residue> v) const {
  if (!contains(v)) throw std::domain_error("coordinates: vector not in subspace");
  Vec c(pivots_.size());
  for (std::size_t i = 0; i < pivots_.size(); ++i) c[i] = v[pivots_[i]];
  return c;
}

std::vector<std::size_t> Subspace::complement_columns() const {
  std::vector<std::size_t> out;
  std::size_t next = 0;
  for (std::size_t j = 0; j < ambient_dim(); ++j) {
    if (next < pivots_.size() && pivots_[next] == j) {
      ++next;
      continue;
    }
    out.push_back(j);
  }
  return out;
}

Vec Subspace::quotient_coordinates(std::span<const Residue> v) const {
  Vec r = reduce(v);
  auto cols = complement_columns();
  Vec out(cols.size());
  for (std::size_t i = 0; i < cols.size(); ++i) out[i] = r[cols[i]];
  return out;
}

Subspace sum(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw DimensionError("sum: ambient mismatch");
  return Subspace::span(Matrix::vstack(a.basis(), b.basis()));
}

Subspace intersection(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw DimensionError("intersection: ambient mismatch");
  const std::uint32_t p = a.prime();
  if (a.dim() == 0 || b.dim() == 0) return Subspace(p, a.ambient_dim());
  // x A + y B = 0  =>  x A lies in both
  Matrix stacked = Matrix::vstack(a.basis(), b.basis());
  Subspace rel = kernel_basis(stacked.transpose());
  Matrix coeffs = rel.basis().block(0, 0, rel.dim(), a.dim());
  return Subspace::span(coeffs * a.basis());
}

Subspace kernel_basis(const Matrix& a) {
  const std::uint32_t p = a.prime();
  PrimeField k(p);
  Echelon e = rref(a);
  std::vector<bool> is_pivot(a.cols(), false);
  for (auto c : e.pivots) is_pivot[c] = true;
  std::vector<Vec> vecs;
  for (std::size_t f = 0; f < a.cols(); ++f) {
    if (is_pivot[f]) continue;
    Vec v(a.cols(), 0);
    v[f] = 1;
    for (std::size_t i = 0; i < e.rank; ++i) v[e.pivots[i]] = k.neg(e.reduced(i, f));
    vecs.push_back(std::move(v));
  }
  return Subspace::span(p, a.cols(), vecs);
}

Subspace image_basis(const Matrix& a) { return Subspace::span(a.transpose()); }

std::optional<Vec> solve(const Matrix& a, std::span<const Residue> b) {
  if (b.size() != a.rows()) throw DimensionError("solve: right-hand side length mismatch");
  Matrix aug = Matrix::hstack(a, Matrix::column(a.prime(), b));
  Echelon e = rref(aug);
  if (!e.pivots.empty() && e.pivots.back() == a.cols()) return std::nullopt;
  Vec x(a.cols(), 0);
  for (std::size_t i = 0; i < e.rank; ++i) x[e.pivots[i]] = e.reduced(i, a.cols());
  return x;
}

LinearSolver::LinearSolver(const Matrix& a)
    : p_(a.prime()), rows_(a.rows()), cols_(a.cols()), rank_(0) {
  Matrix aug = Matrix::hstack(a, Matrix::identity(p_, rows_));
  Echelon e = rref(aug);
  std::vector<std::size_t> piv;
  for (auto c : e.pivots)
    if (c < cols_) piv.push_back(c);
  rank_ = piv.size();
  pivots_ = std::move(piv);
  transform_ = e.reduced.block(0, cols_, rows_, rows_);
  kernel_ = kernel_basis(a);
}

std::optional<Vec> LinearSolver::solve(std::span<const Residue> b) const {
  if (b.size() != rows_) throw DimensionError("solve: right-hand side length mismatch");
  Vec y = transform_.apply(b);
  for (std::size_t i = rank_; i < rows_; ++i)
    if (y[i] != 0) return std::nullopt;
  Vec x(cols_, 0);
  for (std::size_t i = 0; i < rank_; ++i) x[pivots_[i]] = y[i];
  return x;
}

// ---------------------------------------------------------------------------
// Integer matrices

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, BigInt(0)) {}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<long long>>& rows) {
  std::size_t c = rows.empty() ? 0 : rows.front().size();
  IntMatrix m(rows.size(), c);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != c) throw DimensionError("ragged rows");
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

IntMatrix IntMatrix::operator*(const IntMatrix& rhs) const {
  if (cols_ != rhs.rows_) throw DimensionError("integer product shape mismatch");
  IntMatrix out(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t l = 0; l < cols_; ++l) {
      const BigInt& f = (*this)(i, l);
      if (f == 0) continue;
      for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += f * rhs(l, j);
    }
  return out;
}

bool IntMatrix::is_diagonal() const {
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if (i != j && (*this)(i, j) != 0) return false;
  return true;
}

BigInt IntMatrix::determinant() const {
  if (rows_ != cols_) throw DimensionError("determinant of non-square matrix");
  const std::size_t n = rows_;
  if (n == 0) return 1;
  IntMatrix m = *this;
  BigInt prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t s = k + 1;
      while (s < n && m(s, k) == 0) ++s;
      if (s == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(s, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

namespace {

struct SmithWork {
  IntMatrix a;
  IntMatrix u;
  IntMatrix v;
  bool track;

  void swap_rows(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t c = 0; c < a.cols(); ++c) std::swap(a(i, c), a(j, c));
    if (track)
      for (std::size_t c = 0; c < u.cols(); ++c) std::swap(u(i, c), u(j, c));
  }
  void swap_cols(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t r = 0; r < a.rows(); ++r) std::swap(a(r, i), a(r, j));
    if (track)
      for (std::size_t r = 0; r < v.rows(); ++r) std::swap(v(r, i), v(r, j));
  }
  // row i += f * row j
  void add_row(std::size_t i, std::size_t j, const BigInt& f) {
    if (f == 0) return;
    for (std::size_t c = 0; c < a.cols(); ++c)
      if (a(j, c) != 0) a(i, c) += f * a(j, c);
    if (track)
      for (std::size_t c = 0; c < u.cols(); ++c)
        if (u(j, c) != 0) u(i, c) += f * u(j, c);
  }
  // col i += f * col j
  void add_col(std::size_t i, std::size_t j, const BigInt& f) {
    if (f == 0) return;
    for (std::size_t r = 0; r < a.rows(); ++r)
      if (a(r, j) != 0) a(r, i) += f * a(r, j);
    if (track)
      for (std::size_t r = 0; r < v.rows(); ++r)
        if (v(r, j) != 0) v(r, i) += f * v(r, j);
  }
  void negate_row(std::size_t i) {
    for (std::size_t c = 0; c < a.cols(); ++c) a(i, c) = -a(i, c);
    if (track)
      for (std::size_t c = 0; c < u.cols(); ++c) u(i, c) = -u(i, c);
  }

  void run() {
    const std::size_t rows = a.rows(), cols = a.cols();
    for (std::size_t t = 0; t < std::min(rows, cols); ++t) {
      for (;;) {
        // smallest nonzero entry of the trailing block becomes the pivot
        std::size_t bi = rows, bj = cols;
        BigInt best = 0;
        for (std::size_t i = t; i < rows && !(bi < rows && best == 1); ++i)
          for (std::size_t j = t; j < cols; ++j) {
            const BigInt& x = a(i, j);
            if (x == 0) continue;
            BigInt ax = abs(x);
            if (bi == rows || ax < best) {
              best = ax;
              bi = i;
              bj = j;
            }
            if (best == 1) break;
          }
        if (bi == rows) return;
        swap_rows(t, bi);
        swap_cols(t, bj);
        bool clean = true;
        for (std::size_t i = t + 1; i < rows; ++i) {
          if (a(i, t) == 0) continue;
          BigInt q = a(i, t) / a(t, t);
          add_row(i, t, -q);
          if (a(i, t) != 0) clean = false;
        }
        for (std::size_t j = t + 1; j < cols; ++j) {
          if (a(t, j) == 0) continue;
          BigInt q = a(t, j) / a(t, t);
          add_col(j, t, -q);
          if (a(t, j) != 0) clean = false;
        }
        if (!clean) continue;
        // enforce divisibility of the remaining block
        bool divides = true;
        for (std::size_t i = t + 1; i < rows && divides; ++i)
          for (std::size_t j = t + 1; j < cols; ++j)
            if (a(i, j) % a(t, t) != 0) {
              add_row(t, i, 1);
              divides = false;
              break;
            }
        if (divides) break;
      }
      if (a(t, t) < 0) negate_row(t);
    }
  }
};

}  // namespace

SmithForm smith_normal_form(const IntMatrix& a) {
  SmithWork w{a, IntMatrix::identity(a.rows()), IntMatrix::identity(a.cols()), true};
  w.run();
  SmithForm out{w.a, w.u, w.v, {}};
  for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i)
    if (out.d(i, i) != 0) out.diagonal.push_back(out.d(i, i));
  return out;
}

std::vector<BigInt> invariant_factors(const IntMatrix& a) {
  SmithWork w{a, IntMatrix(), IntMatrix(), false};
  w.run();
  std::vector<BigInt> out;
  for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i)
    if (w.a(i, i) != 0) out.push_back(w.a(i, i));
  return out;
}

}  // namespace omegares
