#include "ivd/exactfield.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace ivd {

bool is_prime(std::uint32_t n) {
    if (n < 2) return false;
    for (std::uint32_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

PrimeField::PrimeField(std::uint32_t p) : p_(p) {
    if (p >= (1u << 16) || !is_prime(p))
        throw std::invalid_argument("field characteristic must be a prime below 65536, got " +
                                    std::to_string(p));
}

Residue PrimeField::inv(Residue a) const {
    if (a == 0) throw std::domain_error("inverse of zero in GF(p)");
    // extended Euclid on (a, p)
    long long t = 0, new_t = 1, r = p_, new_r = a;
    while (new_r != 0) {
        long long q = r / new_r;
        t -= q * new_t;
        std::swap(t, new_t);
        r -= q * new_r;
        std::swap(r, new_r);
    }
    return reduce(t);
}

FieldMatrix::FieldMatrix(std::size_t rows, std::size_t cols, std::uint32_t p)
    : rows_(rows), cols_(cols), field_(p), data_(rows * cols, 0) {}

FieldMatrix FieldMatrix::identity(std::size_t n, std::uint32_t p) {
    FieldMatrix m(n, n, p);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

FieldMatrix FieldMatrix::from_rows(std::initializer_list<std::initializer_list<long long>> rows,
                                   std::uint32_t p) {
    const std::size_t nr = rows.size();
    const std::size_t nc = nr == 0 ? 0 : rows.begin()->size();
    FieldMatrix m(nr, nc, p);
    std::size_t i = 0;
    for (const auto& r : rows) {
        if (r.size() != nc) throw std::invalid_argument("ragged rows in FieldMatrix::from_rows");
        std::size_t j = 0;
        for (long long v : r) m.set(i, j++, v);
        ++i;
    }
    return m;
}

FieldMatrix FieldMatrix::from_entries(std::size_t rows, std::size_t cols, std::vector<Residue> entries,
                                      std::uint32_t p) {
    if (entries.size() != rows * cols)
        throw std::invalid_argument("entry count does not match matrix shape");
    FieldMatrix m(0, 0, p);
    for (Residue e : entries)
        if (e >= p) throw std::invalid_argument("matrix entry out of range for GF(p)");
    m.rows_ = rows;
    m.cols_ = cols;
    m.data_ = std::move(entries);
    return m;
}

FieldMatrix FieldMatrix::from_columns(std::size_t rows, const std::vector<FieldVector>& columns,
                                      std::uint32_t p) {
    FieldMatrix m(rows, columns.size(), p);
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j].size() != rows) throw std::invalid_argument("column length mismatch");
        for (std::size_t i = 0; i < rows; ++i) m.at(i, j) = columns[j][i];
    }
    return m;
}

FieldVector FieldMatrix::column(std::size_t j) const {
    FieldVector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

bool FieldMatrix::is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](Residue v) { return v == 0; });
}

bool FieldMatrix::is_identity() const {
    if (rows_ != cols_) return false;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            if ((*this)(i, j) != (i == j ? 1u : 0u)) return false;
    return true;
}

FieldMatrix FieldMatrix::transpose() const {
    FieldMatrix t(cols_, rows_, characteristic());
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = (*this)(i, j);
    return t;
}

FieldMatrix FieldMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) throw std::out_of_range("FieldMatrix::block");
    FieldMatrix b(nr, nc, characteristic());
    for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t j = 0; j < nc; ++j) b.at(i, j) = (*this)(r0 + i, c0 + j);
    return b;
}

FieldMatrix FieldMatrix::select_columns(std::span<const std::size_t> idx) const {
    FieldMatrix b(rows_, idx.size(), characteristic());
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < idx.size(); ++j) b.at(i, j) = (*this)(i, idx[j]);
    return b;
}

FieldVector FieldMatrix::apply(std::span<const Residue> x) const {
    if (x.size() != cols_) throw std::invalid_argument("FieldMatrix::apply dimension mismatch");
    FieldVector y(rows_, 0);
    const std::uint64_t p = characteristic();
    for (std::size_t i = 0; i < rows_; ++i) {
        std::uint64_t acc = 0;
        for (std::size_t j = 0; j < cols_; ++j) {
            acc += static_cast<std::uint64_t>((*this)(i, j)) * x[j];
            if ((j & 0xff) == 0xff) acc %= p;
        }
        y[i] = static_cast<Residue>(acc % p);
    }
    return y;
}

FieldMatrix FieldMatrix::scaled(Residue c) const {
    FieldMatrix m = *this;
    for (auto& v : m.data_) v = field_.mul(v, c);
    return m;
}

FieldMatrix FieldMatrix::hconcat(const FieldMatrix& a, const FieldMatrix& b) {
    if (a.rows_ != b.rows_ || a.characteristic() != b.characteristic())
        throw std::invalid_argument("hconcat shape mismatch");
    FieldMatrix m(a.rows_, a.cols_ + b.cols_, a.characteristic());
    for (std::size_t i = 0; i < a.rows_; ++i) {
        std::copy(a.row(i).begin(), a.row(i).end(), m.row(i).begin());
        std::copy(b.row(i).begin(), b.row(i).end(), m.row(i).begin() + static_cast<std::ptrdiff_t>(a.cols_));
    }
    return m;
}

FieldMatrix FieldMatrix::vconcat(const FieldMatrix& a, const FieldMatrix& b) {
    if (a.cols_ != b.cols_ || a.characteristic() != b.characteristic())
        throw std::invalid_argument("vconcat shape mismatch");
    FieldMatrix m(a.rows_ + b.rows_, a.cols_, a.characteristic());
    std::copy(a.data_.begin(), a.data_.end(), m.data_.begin());
    std::copy(b.data_.begin(), b.data_.end(), m.data_.begin() + static_cast<std::ptrdiff_t>(a.data_.size()));
    return m;
}

FieldMatrix operator*(const FieldMatrix& a, const FieldMatrix& b) {
    if (a.cols_ != b.rows_ || a.characteristic() != b.characteristic())
        throw std::invalid_argument("matrix product shape mismatch");
    const std::uint32_t p = a.characteristic();
    FieldMatrix c(a.rows_, b.cols_, p);
    if (p == 2) {
        for (std::size_t i = 0; i < a.rows_; ++i) {
            auto ci = c.row(i);
            for (std::size_t k = 0; k < a.cols_; ++k) {
                if (a(i, k) == 0) continue;
                auto bk = b.row(k);
                for (std::size_t j = 0; j < b.cols_; ++j) ci[j] ^= bk[j];
            }
        }
        return c;
    }
    std::vector<std::uint64_t> acc(b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
        std::fill(acc.begin(), acc.end(), 0);
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const std::uint64_t aik = a(i, k);
            if (aik == 0) continue;
            auto bk = b.row(k);
            for (std::size_t j = 0; j < b.cols_; ++j) acc[j] += aik * bk[j];
            if ((k & 0xff) == 0xff)
                for (auto& v : acc) v %= p;
        }
        for (std::size_t j = 0; j < b.cols_; ++j) c.at(i, j) = static_cast<Residue>(acc[j] % p);
    }
    return c;
}

FieldMatrix operator+(const FieldMatrix& a, const FieldMatrix& b) {
    FieldMatrix c = a;
    c += b;
    return c;
}

FieldMatrix& FieldMatrix::operator+=(const FieldMatrix& b) {
    if (rows_ != b.rows_ || cols_ != b.cols_ || characteristic() != b.characteristic())
        throw std::invalid_argument("matrix sum shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] = field_.add(data_[i], b.data_[i]);
    return *this;
}

FieldMatrix operator-(const FieldMatrix& a, const FieldMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_ || a.characteristic() != b.characteristic())
        throw std::invalid_argument("matrix difference shape mismatch");
    FieldMatrix c = a;
    for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] = a.field_.sub(a.data_[i], b.data_[i]);
    return c;
}

bool operator==(const FieldMatrix& a, const FieldMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.characteristic() == b.characteristic() &&
           a.data_ == b.data_;
}

std::string FieldMatrix::to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) os << (j ? " " : "") << (*this)(i, j);
        os << '\n';
    }
    return os.str();
}

namespace {

// Bit-packed Gauss-Jordan elimination for GF(2).
Echelon row_reduce_gf2(const FieldMatrix& m) {
    const std::size_t nr = m.rows(), nc = m.cols();
    const std::size_t words = (nc + 63) / 64;
    std::vector<std::uint64_t> bits(nr * words, 0);
    for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t j = 0; j < nc; ++j)
            if (m(i, j)) bits[i * words + j / 64] |= std::uint64_t{1} << (j % 64);

    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < nc && r < nr; ++c) {
        const std::size_t w = c / 64;
        const std::uint64_t mask = std::uint64_t{1} << (c % 64);
        std::size_t piv = r;
        while (piv < nr && !(bits[piv * words + w] & mask)) ++piv;
        if (piv == nr) continue;
        if (piv != r)
            std::swap_ranges(bits.begin() + static_cast<std::ptrdiff_t>(piv * words),
                             bits.begin() + static_cast<std::ptrdiff_t>((piv + 1) * words),
                             bits.begin() + static_cast<std::ptrdiff_t>(r * words));
        const std::uint64_t* prow = &bits[r * words];
        for (std::size_t i = 0; i < nr; ++i) {
            if (i == r || !(bits[i * words + w] & mask)) continue;
            std::uint64_t* row = &bits[i * words];
            for (std::size_t k = w; k < words; ++k) row[k] ^= prow[k];
        }
        pivots.push_back(c);
        ++r;
    }
    FieldMatrix out(nr, nc, 2);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = pivots[i]; j < nc; ++j)
            if (bits[i * words + j / 64] >> (j % 64) & 1u) out.at(i, j) = 1;
    return {std::move(out), std::move(pivots)};
}

} // namespace

Echelon row_reduce(FieldMatrix m) {
    if (m.characteristic() == 2) return row_reduce_gf2(m);
    const PrimeField& f = m.field();
    const std::size_t nr = m.rows(), nc = m.cols();
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < nc && r < nr; ++c) {
        std::size_t piv = r;
        while (piv < nr && m(piv, c) == 0) ++piv;
        if (piv == nr) continue;
        if (piv != r) std::swap_ranges(m.row(piv).begin(), m.row(piv).end(), m.row(r).begin());
        auto prow = m.row(r);
        const Residue s = f.inv(prow[c]);
        for (std::size_t j = c; j < nc; ++j) prow[j] = f.mul(prow[j], s);
        for (std::size_t i = 0; i < nr; ++i) {
            if (i == r) continue;
            auto row = m.row(i);
            const Residue a = row[c];
            if (a == 0) continue;
            for (std::size_t j = c; j < nc; ++j)
                if (prow[j]) row[j] = f.sub(row[j], f.mul(a, prow[j]));
        }
        pivots.push_back(c);
        ++r;
    }
    return {std::move(m), std::move(pivots)};
}

std::size_t rank(const FieldMatrix& m) { return row_reduce(m).pivots.size(); }

std::optional<FieldVector> solve(const FieldMatrix& a, std::span<const Residue> b) {
    if (b.size() != a.rows())
        throw std::invalid_argument("solve: right-hand side length " + std::to_string(b.size()) +
                                    " does not match " + std::to_string(a.rows()) + " rows");
    FieldMatrix aug(a.rows(), a.cols() + 1, a.characteristic());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) aug.at(i, j) = a(i, j);
        if (b[i] >= a.characteristic()) throw std::invalid_argument("solve: entry out of range");
        aug.at(i, a.cols()) = b[i];
    }
    Echelon e = row_reduce(std::move(aug));
    if (!e.pivots.empty() && e.pivots.back() == a.cols()) return std::nullopt;
    FieldVector x(a.cols(), 0);
    for (std::size_t i = 0; i < e.pivots.size(); ++i) x[e.pivots[i]] = e.reduced(i, a.cols());
    return x;
}

std::vector<FieldVector> kernel_basis(const FieldMatrix& a) {
    Echelon e = row_reduce(a);
    const PrimeField& f = a.field();
    std::vector<bool> is_pivot(a.cols(), false);
    for (std::size_t c : e.pivots) is_pivot[c] = true;
    std::vector<FieldVector> basis;
    for (std::size_t free = 0; free < a.cols(); ++free) {
        if (is_pivot[free]) continue;
        FieldVector v(a.cols(), 0);
        v[free] = 1;
        for (std::size_t i = 0; i < e.pivots.size(); ++i) v[e.pivots[i]] = f.neg(e.reduced(i, free));
        basis.push_back(std::move(v));
    }
    return basis;
}

FieldMatrix kernel_matrix(const FieldMatrix& a) {
    return FieldMatrix::from_columns(a.cols(), kernel_basis(a), a.characteristic());
}

FieldMatrix column_space(const FieldMatrix& a) {
    Echelon e = row_reduce(a);
    return a.select_columns(e.pivots);
}

std::optional<FieldMatrix> inverse(const FieldMatrix& a) {
    if (a.rows() != a.cols()) return std::nullopt;
    const std::size_t n = a.rows();
    Echelon e = row_reduce(FieldMatrix::hconcat(a, FieldMatrix::identity(n, a.characteristic())));
    if (e.pivots.size() < n || (n > 0 && e.pivots[n - 1] != n - 1)) return std::nullopt;
    return e.reduced.block(0, n, n, n);
}

bool is_invertible(const FieldMatrix& a) { return a.rows() == a.cols() && rank(a) == a.rows(); }

} // namespace ivd
