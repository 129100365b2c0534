#ifndef PCENS_GF_HPP
#define PCENS_GF_HPP

// Dense matrices over a prime field F_p, sized for exhaustive and
// Monte Carlo experiments (tens of rows/columns, not thousands).
//
// Rank computations pick their elimination backend by field: for p = 2 with
// at most 64 columns the rows live in single machine words and elimination
// is word-parallel XOR; everything else goes through the generic residue
// path. Both backends are exposed under detail:: so tests can cross-check
// them on the same inputs.

#include <pcens/rng.hpp>

#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcens {

struct enumeration_cap_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FieldParam {
    std::uint32_t p;

    explicit FieldParam(std::uint32_t prime) : p(prime) {
        if (!is_prime(prime))
            throw std::invalid_argument("field order " + std::to_string(prime) + " is not prime");
    }

    static bool is_prime(std::uint32_t v) {
        if (v < 2) return false;
        for (std::uint64_t d = 2; d * d <= v; ++d)
            if (v % d == 0) return false;
        return true;
    }

    friend bool operator==(const FieldParam&, const FieldParam&) = default;
};

class GFMatrix {
  public:
    GFMatrix(std::size_t rows, std::size_t cols, FieldParam field)
        : rows_(rows), cols_(cols), field_(field), data_(rows * cols, 0) {
        if (rows == 0 || cols == 0) throw std::invalid_argument("matrix dimensions must be positive");
    }

    static GFMatrix identity(std::size_t n, FieldParam field) {
        GFMatrix m(n, n, field);
        for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const FieldParam& field() const { return field_; }

    std::uint32_t at(std::size_t r, std::size_t c) const {
        check_index(r, c);
        return data_[r * cols_ + c];
    }

    void set(std::size_t r, std::size_t c, std::uint32_t value) {
        check_index(r, c);
        if (value >= field_.p) throw std::invalid_argument("entry not reduced mod p");
        data_[r * cols_ + c] = value;
    }

    // Column c of a binary matrix packed into one word, bit r = entry (r, c).
    std::uint64_t column_mask(std::size_t c) const {
        if (field_.p != 2 || rows_ > 64) throw std::logic_error("column_mask needs p=2, rows<=64");
        std::uint64_t mask = 0;
        for (std::size_t r = 0; r < rows_; ++r) mask |= static_cast<std::uint64_t>(at(r, c)) << r;
        return mask;
    }

    friend bool operator==(const GFMatrix&, const GFMatrix&) = default;

  private:
    void check_index(std::size_t r, std::size_t c) const {
        if (r >= rows_ || c >= cols_) throw std::out_of_range("matrix index out of range");
    }

    std::size_t rows_;
    std::size_t cols_;
    FieldParam field_;
    std::vector<std::uint32_t> data_;
};

// Strictly increasing, in-range column indices.
using ColumnSet = std::vector<std::size_t>;

inline void validate_column_set(const ColumnSet& cols, std::size_t ncols) {
    for (std::size_t k = 0; k < cols.size(); ++k) {
        if (cols[k] >= ncols) throw std::invalid_argument("column index out of range");
        if (k > 0 && cols[k] <= cols[k - 1])
            throw std::invalid_argument("column set must be strictly increasing");
    }
}

namespace detail {

// Word-parallel elimination for p = 2, n <= 64: rows restricted to col_mask.
inline std::size_t rank_bitpacked(const GFMatrix& m, std::uint64_t col_mask) {
    std::vector<std::uint64_t> rows;
    rows.reserve(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        std::uint64_t w = 0;
        for (std::size_t c = 0; c < m.cols(); ++c)
            w |= static_cast<std::uint64_t>(m.at(r, c)) << c;
        w &= col_mask;
        if (w) rows.push_back(w);
    }
    std::size_t rank = 0;
    std::vector<std::uint64_t> basis;  // each with a distinct leading bit
    for (std::uint64_t w : rows) {
        for (std::uint64_t b : basis) {
            const std::uint64_t lead = b & ~(b - 1);
            if (w & lead) w ^= b;
        }
        if (w) {
            basis.push_back(w);
            ++rank;
        }
    }
    return rank;
}

// Generic residue elimination over the selected columns.
inline std::size_t rank_generic(const GFMatrix& m, const ColumnSet& cols) {
    const std::uint64_t p = m.field().p;
    const std::size_t nr = m.rows(), nc = cols.size();
    std::vector<std::uint64_t> a(nr * nc);
    for (std::size_t r = 0; r < nr; ++r)
        for (std::size_t k = 0; k < nc; ++k) a[r * nc + k] = m.at(r, cols[k]);

    auto powmod = [&](std::uint64_t b, std::uint64_t e) {
        std::uint64_t acc = 1;
        while (e) {
            if (e & 1) acc = acc * b % p;
            b = b * b % p;
            e >>= 1;
        }
        return acc;
    };

    std::size_t rank = 0;
    for (std::size_t c = 0; c < nc && rank < nr; ++c) {
        std::size_t pivot = rank;
        while (pivot < nr && a[pivot * nc + c] == 0) ++pivot;
        if (pivot == nr) continue;
        for (std::size_t k = c; k < nc; ++k) std::swap(a[rank * nc + k], a[pivot * nc + k]);
        const std::uint64_t inv = powmod(a[rank * nc + c], p - 2);
        for (std::size_t k = c; k < nc; ++k) a[rank * nc + k] = a[rank * nc + k] * inv % p;
        for (std::size_t r = 0; r < nr; ++r) {
            if (r == rank) continue;
            const std::uint64_t f = a[r * nc + c];
            if (f == 0) continue;
            for (std::size_t k = c; k < nc; ++k)
                a[r * nc + k] = (a[r * nc + k] + (p - f) * a[rank * nc + k]) % p;
        }
        ++rank;
    }
    return rank;
}

inline ColumnSet all_columns(std::size_t n) {
    ColumnSet cols(n);
    for (std::size_t i = 0; i < n; ++i) cols[i] = i;
    return cols;
}

}  // namespace detail

inline std::size_t submatrix_rank(const GFMatrix& m, const ColumnSet& cols) {
    validate_column_set(cols, m.cols());
    if (cols.empty()) return 0;
    if (m.field().p == 2 && m.cols() <= 64) {
        std::uint64_t mask = 0;
        for (std::size_t c : cols) mask |= 1ULL << c;
        return detail::rank_bitpacked(m, mask);
    }
    return detail::rank_generic(m, cols);
}

inline std::size_t rank(const GFMatrix& m) {
    if (m.field().p == 2 && m.cols() <= 64) return detail::rank_bitpacked(m, ~0ULL);
    return detail::rank_generic(m, detail::all_columns(m.cols()));
}

inline GFMatrix transpose(const GFMatrix& m) {
    GFMatrix t(m.cols(), m.rows(), m.field());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) t.set(c, r, m.at(r, c));
    return t;
}

// Entries independently uniform over F_p, row-major draw order.
inline GFMatrix sample_uniform(std::size_t rows, std::size_t cols, FieldParam field,
                               SplitMix64& stream) {
    GFMatrix m(rows, cols, field);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m.set(r, c, stream.below(field.p));
    return m;
}

inline constexpr std::uint64_t kDefaultEnumerationCap = 1ULL << 24;

// All m x n matrices over F_p in odometer order: matrix index written in
// base p, entry (m-1, n-1) spinning fastest.
class MatrixEnumeration {
  public:
    MatrixEnumeration(std::size_t rows, std::size_t cols, FieldParam field,
                      std::uint64_t cap = kDefaultEnumerationCap)
        : rows_(rows), cols_(cols), field_(field) {
        if (rows == 0 || cols == 0) throw std::invalid_argument("matrix dimensions must be positive");
        std::uint64_t total = 1;
        for (std::size_t e = 0; e < rows * cols; ++e) {
            if (total > cap / field.p) {
                throw enumeration_cap_error(
                    "p^(m*n) = " + std::to_string(field.p) + "^" + std::to_string(rows * cols) +
                    " exceeds the enumeration cap " + std::to_string(cap));
            }
            total *= field.p;
        }
        size_ = total;
    }

    std::uint64_t size() const { return size_; }

    GFMatrix at(std::uint64_t index) const {
        if (index >= size_) throw std::out_of_range("enumeration index out of range");
        GFMatrix m(rows_, cols_, field_);
        std::uint64_t rem = index;
        for (std::size_t e = rows_ * cols_; e-- > 0;) {
            const auto digit = static_cast<std::uint32_t>(rem % field_.p);
            rem /= field_.p;
            m.set(e / cols_, e % cols_, digit);
        }
        return m;
    }

    class iterator {
      public:
        using value_type = GFMatrix;
        using difference_type = std::ptrdiff_t;

        iterator(const MatrixEnumeration* owner, std::uint64_t index) : owner_(owner), index_(index) {}
        GFMatrix operator*() const { return owner_->at(index_); }
        iterator& operator++() {
            ++index_;
            return *this;
        }
        bool operator!=(const iterator& other) const { return index_ != other.index_; }

      private:
        const MatrixEnumeration* owner_;
        std::uint64_t index_;
    };

    iterator begin() const { return {this, 0}; }
    iterator end() const { return {this, size_}; }

  private:
    std::size_t rows_;
    std::size_t cols_;
    FieldParam field_;
    std::uint64_t size_;
};

// Plain-text dump: header "gfmat p m n", then one line per row of
// space-separated entries. Round-trips through read_matrix.
inline void write_matrix(std::ostream& os, const GFMatrix& m) {
    os << "gfmat " << m.field().p << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c) os << ' ';
            os << m.at(r, c);
        }
        os << '\n';
    }
}

inline GFMatrix read_matrix(std::istream& is) {
    std::string magic;
    std::uint32_t p = 0;
    std::size_t rows = 0, cols = 0;
    if (!(is >> magic >> p >> rows >> cols) || magic != "gfmat")
        throw std::invalid_argument("not a gfmat dump");
    GFMatrix m(rows, cols, FieldParam(p));
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            std::uint32_t v;
            if (!(is >> v)) throw std::invalid_argument("truncated gfmat dump");
            m.set(r, c, v);  // rejects entries >= p
        }
    return m;
}

}  // namespace pcens

#endif
