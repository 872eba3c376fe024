#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace omegares {

using Residue = std::uint32_t;
using Vec = std::vector<Residue>;
using BigInt = boost::multiprecision::cpp_int;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

bool is_prime(std::uint64_t n);

// Arithmetic in F_p for a fixed prime p.
class PrimeField {
 public:
  explicit PrimeField(std::uint32_t p);

  std::uint32_t p() const { return p_; }
  Residue add(Residue a, Residue b) const {
    Residue s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  Residue sub(Residue a, Residue b) const { return a >= b ? a - b : a + p_ - b; }
  Residue neg(Residue a) const { return a == 0 ? 0 : p_ - a; }
  Residue mul(Residue a, Residue b) const {
    return static_cast<Residue>((static_cast<std::uint64_t>(a) * b) % p_);
  }
  Residue inv(Residue a) const;
  Residue pow(Residue a, std::uint64_t e) const;
  Residue from_int(long long v) const;

 private:
  std::uint32_t p_;
};

// Dense row-major matrix over F_p.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::uint32_t p, std::size_t rows, std::size_t cols);

  static Matrix identity(std::uint32_t p, std::size_t n);
  static Matrix from_rows(std::uint32_t p, const std::vector<std::vector<long long>>& rows);
  // rows x cols with entries given row-major, each reduced mod p
  static Matrix from_entries(std::uint32_t p, std::size_t rows, std::size_t cols,
                             std::span<const long long> entries);
  static Matrix column(std::uint32_t p, std::span<const Residue> v);

  std::uint32_t prime() const { return p_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  PrimeField field() const { return PrimeField(p_); }

  Residue operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  Residue& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  std::span<const Residue> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<Residue> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  Vec col(std::size_t j) const;
  const std::vector<Residue>& entries() const { return data_; }

  bool is_zero() const;
  bool is_identity() const;
  bool is_square() const { return rows_ == cols_; }

  Matrix transpose() const;
  Matrix operator*(const Matrix& rhs) const;
  Matrix operator+(const Matrix& rhs) const;
  Matrix operator-(const Matrix& rhs) const;
  Matrix scaled(Residue c) const;
  Vec apply(std::span<const Residue> x) const;

  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const Matrix& b);
  void add_block(std::size_t r0, std::size_t c0, const Matrix& b);
  Matrix select_rows(std::span<const std::size_t> idx) const;
  Matrix select_cols(std::span<const std::size_t> idx) const;

  static Matrix hstack(const Matrix& a, const Matrix& b);
  static Matrix vstack(const Matrix& a, const Matrix& b);
  static Matrix direct_sum(const Matrix& a, const Matrix& b);

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.p_ == b.p_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::uint32_t p_ = 2;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Residue> data_;
};

std::string to_string(const Matrix& m);

struct Echelon {
  Matrix reduced;
  std::size_t rank = 0;
  std::vector<std::size_t> pivots;
};

Echelon rref(const Matrix& a);
std::size_t rank(const Matrix& a);
// inverse of a square matrix, or nothing when singular
std::optional<Matrix> inverse(const Matrix& a);

// Row space of a matrix, stored as a reduced row-echelon basis.
class Subspace {
 public:
  Subspace() = default;
  Subspace(std::uint32_t p, std::size_t ambient_dim);

  static Subspace span(const Matrix& rows);
  static Subspace span(std::uint32_t p, std::size_t ambient_dim, const std::vector<Vec>& vectors);
  static Subspace whole(std::uint32_t p, std::size_t ambient_dim);

  std::uint32_t prime() const { return basis_.prime(); }
  std::size_t ambient_dim() const { return basis_.cols(); }
  std::size_t dim() const { return basis_.rows(); }
  const Matrix& basis() const { return basis_; }
  const std::vector<std::size_t>& pivots() const { return pivots_; }
  Vec vector(std::size_t i) const;

  bool contains(std::span<const Residue> v) const;
  bool contains(const Subspace& other) const;
  // v minus its component along the basis; zero at every pivot column
  Vec reduce(std::span<const Residue> v) const;
  // coordinates of a member vector in the echelon basis
  Vec coordinates(std::span<const Residue> v) const;
  // non-pivot columns, a coordinate system on the quotient ambient / this
  std::vector<std::size_t> complement_columns() const;
  Vec quotient_coordinates(std::span<const Residue> v) const;

  friend bool operator==(const Subspace& a, const Subspace& b) { return a.basis_ == b.basis_; }

 private:
  Matrix basis_;
  std::vector<std::size_t> pivots_;
};

Subspace sum(const Subspace& a, const Subspace& b);
Subspace intersection(const Subspace& a, const Subspace& b);

// {x : A x = 0}
Subspace kernel_basis(const Matrix& a);
// column space of A
Subspace image_basis(const Matrix& a);
// some x with A x = b, or nothing
std::optional<Vec> solve(const Matrix& a, std::span<const Residue> b);

// Factorization reused across many right-hand sides.
class LinearSolver {
 public:
  explicit LinearSolver(const Matrix& a);
  std::optional<Vec> solve(std::span<const Residue> b) const;
  std::size_t rank() const { return rank_; }
  const Subspace& kernel() const { return kernel_; }

 private:
  std::uint32_t p_;
  std::size_t rows_, cols_, rank_;
  Matrix transform_;  // transform_ * A = rref(A)
  std::vector<std::size_t> pivots_;
  Subspace kernel_;
};

// Integer matrices and Smith normal form.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols);
  static IntMatrix identity(std::size_t n);
  static IntMatrix from_rows(const std::vector<std::vector<long long>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const BigInt& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  BigInt& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  IntMatrix operator*(const IntMatrix& rhs) const;
  bool is_diagonal() const;
  BigInt determinant() const;  // Bareiss, square only

  friend bool operator==(const IntMatrix& a, const IntMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<BigInt> data_;
};

struct SmithForm {
  IntMatrix d;  // U * A * V
  IntMatrix u;
  IntMatrix v;
  std::vector<BigInt> diagonal;  // nonzero diagonal entries, each dividing the next
};

SmithForm smith_normal_form(const IntMatrix& a);
// diagonal of the Smith form without tracking U and V
std::vector<BigInt> invariant_factors(const IntMatrix& a);

}  // namespace omegares
