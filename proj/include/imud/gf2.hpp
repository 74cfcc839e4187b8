#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace imud {

/// Dense binary matrix over GF(2). Small codes only, so entries are kept
/// unpacked for simplicity.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("BitMatrix: negative dimensions");
    }

    static BitMatrix identity(int n) {
        BitMatrix m(n, n);
        for (int i = 0; i < n; ++i) m.set(i, i, 1);
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    std::uint8_t at(int r, int c) const { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
    void set(int r, int c, std::uint8_t v) { a_[static_cast<std::size_t>(r) * cols_ + c] = v & 1; }
    void flip(int r, int c) { a_[static_cast<std::size_t>(r) * cols_ + c] ^= 1; }

    void xor_row_into(int src, int dst) {
        auto* s = &a_[static_cast<std::size_t>(src) * cols_];
        auto* d = &a_[static_cast<std::size_t>(dst) * cols_];
        for (int c = 0; c < cols_; ++c) d[c] ^= s[c];
    }

    void swap_rows(int i, int j) {
        if (i == j) return;
        for (int c = 0; c < cols_; ++c) {
            std::swap(a_[static_cast<std::size_t>(i) * cols_ + c], a_[static_cast<std::size_t>(j) * cols_ + c]);
        }
    }

    void swap_cols(int i, int j) {
        if (i == j) return;
        for (int r = 0; r < rows_; ++r) {
            std::swap(a_[static_cast<std::size_t>(r) * cols_ + i], a_[static_cast<std::size_t>(r) * cols_ + j]);
        }
    }

    int row_weight(int r) const {
        int w = 0;
        for (int c = 0; c < cols_; ++c) w += at(r, c);
        return w;
    }

    int col_weight(int c) const {
        int w = 0;
        for (int r = 0; r < rows_; ++r) w += at(r, c);
        return w;
    }

    /// Product over GF(2).
    BitMatrix multiplied(const BitMatrix& other) const {
        if (cols_ != other.rows_) throw std::invalid_argument("BitMatrix: dimension mismatch in product");
        BitMatrix out(rows_, other.cols_);
        for (int i = 0; i < rows_; ++i)
            for (int k = 0; k < cols_; ++k)
                if (at(i, k))
                    for (int j = 0; j < other.cols_; ++j)
                        if (other.at(k, j)) out.flip(i, j);
        return out;
    }

    BitMatrix transposed() const {
        BitMatrix out(cols_, rows_);
        for (int r = 0; r < rows_; ++r)
            for (int c = 0; c < cols_; ++c) out.set(c, r, at(r, c));
        return out;
    }

    bool is_zero() const {
        for (auto v : a_)
            if (v) return false;
        return true;
    }

    friend bool operator==(const BitMatrix& x, const BitMatrix& y) {
        return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.a_ == y.a_;
    }

private:
    int rows_ = 0, cols_ = 0;
    std::vector<std::uint8_t> a_;
};

inline int gf2_rank(BitMatrix m) {
    int rank = 0;
    for (int c = 0; c < m.cols() && rank < m.rows(); ++c) {
        int pivot = -1;
        for (int r = rank; r < m.rows(); ++r)
            if (m.at(r, c)) { pivot = r; break; }
        if (pivot < 0) continue;
        m.swap_rows(rank, pivot);
        for (int r = 0; r < m.rows(); ++r)
            if (r != rank && m.at(r, c)) m.xor_row_into(rank, r);
        ++rank;
    }
    return rank;
}

/// Indices of a maximal set of linearly independent rows, scanning in order.
inline std::vector<int> gf2_independent_rows(const BitMatrix& m) {
    std::vector<int> kept;
    std::vector<std::vector<std::uint8_t>> basis_by_lead(static_cast<std::size_t>(m.cols()));
    for (int r = 0; r < m.rows(); ++r) {
        std::vector<std::uint8_t> row(static_cast<std::size_t>(m.cols()));
        for (int c = 0; c < m.cols(); ++c) row[c] = m.at(r, c);
        for (int l = 0; l < m.cols(); ++l) {
            if (!row[l]) continue;
            if (basis_by_lead[l].empty()) {
                basis_by_lead[l] = row;
                kept.push_back(r);
                break;
            }
            // cancel the lead; only columns > l can remain set afterwards
            for (int c = l; c < m.cols(); ++c) row[c] ^= basis_by_lead[l][c];
        }
    }
    return kept;
}

} // namespace imud
