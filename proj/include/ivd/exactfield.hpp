#pragma once

// Dense linear algebra over prime fields GF(p), p < 2^16.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ivd {

using Residue = std::uint32_t;
using FieldVector = std::vector<Residue>;

inline constexpr std::uint32_t kDefaultCharacteristic = 2;

bool is_prime(std::uint32_t n);

/// Arithmetic in GF(p). All operands are assumed already reduced.
class PrimeField {
  public:
    explicit PrimeField(std::uint32_t p = kDefaultCharacteristic);

    std::uint32_t characteristic() const { return p_; }

    Residue add(Residue a, Residue b) const {
        Residue s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    Residue sub(Residue a, Residue b) const { return a >= b ? a - b : a + p_ - b; }
    Residue neg(Residue a) const { return a == 0 ? 0 : p_ - a; }
    Residue mul(Residue a, Residue b) const { return (a * b) % p_; }
    Residue inv(Residue a) const;
    Residue reduce(long long v) const {
        long long r = v % static_cast<long long>(p_);
        return static_cast<Residue>(r < 0 ? r + p_ : r);
    }

    bool operator==(const PrimeField&) const = default;

  private:
    std::uint32_t p_;
};

class FieldMatrix {
  public:
    FieldMatrix() = default;
    FieldMatrix(std::size_t rows, std::size_t cols, std::uint32_t p = kDefaultCharacteristic);

    static FieldMatrix identity(std::size_t n, std::uint32_t p = kDefaultCharacteristic);
    /// Integer entries are reduced mod p. All rows must have equal length.
    static FieldMatrix from_rows(std::initializer_list<std::initializer_list<long long>> rows,
                                 std::uint32_t p = kDefaultCharacteristic);
    /// Row-major residues; throws if the size is wrong or an entry is >= p.
    static FieldMatrix from_entries(std::size_t rows, std::size_t cols, std::vector<Residue> entries,
                                    std::uint32_t p = kDefaultCharacteristic);
    static FieldMatrix from_columns(std::size_t rows, const std::vector<FieldVector>& columns,
                                    std::uint32_t p = kDefaultCharacteristic);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::uint32_t characteristic() const { return field_.characteristic(); }
    const PrimeField& field() const { return field_; }

    Residue operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    Residue& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    void set(std::size_t i, std::size_t j, long long v) { data_[i * cols_ + j] = field_.reduce(v); }

    std::span<const Residue> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    std::span<Residue> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    const std::vector<Residue>& entries() const { return data_; }
    FieldVector column(std::size_t j) const;

    bool is_zero() const;
    bool is_identity() const;
    FieldMatrix transpose() const;
    FieldMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
    FieldMatrix select_columns(std::span<const std::size_t> idx) const;
    FieldVector apply(std::span<const Residue> x) const;
    FieldMatrix scaled(Residue c) const;

    static FieldMatrix hconcat(const FieldMatrix& a, const FieldMatrix& b);
    static FieldMatrix vconcat(const FieldMatrix& a, const FieldMatrix& b);

    friend FieldMatrix operator*(const FieldMatrix& a, const FieldMatrix& b);
    friend FieldMatrix operator+(const FieldMatrix& a, const FieldMatrix& b);
    friend FieldMatrix operator-(const FieldMatrix& a, const FieldMatrix& b);
    FieldMatrix& operator+=(const FieldMatrix& b);
    friend bool operator==(const FieldMatrix& a, const FieldMatrix& b);

    std::string to_string() const;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    PrimeField field_{};
    std::vector<Residue> data_;
};

/// Reduced row echelon form together with its pivot columns.
struct Echelon {
    FieldMatrix reduced;
    std::vector<std::size_t> pivots;
};

Echelon row_reduce(FieldMatrix m);

std::size_t rank(const FieldMatrix& m);

/// Some x with A x = b, or nullopt when the system is inconsistent.
/// Throws std::invalid_argument when b.size() != A.rows().
std::optional<FieldVector> solve(const FieldMatrix& a, std::span<const Residue> b);

/// Basis of {x : A x = 0}; has exactly cols - rank vectors.
std::vector<FieldVector> kernel_basis(const FieldMatrix& a);

/// Kernel basis stacked as columns (cols x nullity).
FieldMatrix kernel_matrix(const FieldMatrix& a);

/// Columns of A forming a basis for its column space.
FieldMatrix column_space(const FieldMatrix& a);

std::optional<FieldMatrix> inverse(const FieldMatrix& a);

bool is_invertible(const FieldMatrix& a);

} // namespace ivd
