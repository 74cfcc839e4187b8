#pragma once

#include <cstdint>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "imud/gf2.hpp"

namespace imud {

/// Binary linear code given by its parity-check matrix. H always has full
/// row rank: dependent rows handed to make_code() are dropped and k adjusted
/// upward instead of failing.
struct LinearCode {
    BitMatrix h; // (n - k) x n
    int n = 0;
    int k = 0;
    std::string id;

    /// True iff the code is the length-n repetition code (k = 1, codewords
    /// all-zero and all-one).
    bool is_repetition() const {
        if (k != 1) return false;
        for (int i = 0; i < h.rows(); ++i) {
            int w = 0;
            for (int c = 0; c < n; ++c) w += h.at(i, c);
            if (w % 2 != 0) return false; // all-one word must satisfy every check
        }
        return true;
    }
};

inline LinearCode make_code(BitMatrix h, std::string id) {
    if (h.cols() < 1) throw std::invalid_argument("make_code: empty code length");
    const std::vector<int> kept = gf2_independent_rows(h);
    BitMatrix reduced(static_cast<int>(kept.size()), h.cols());
    for (std::size_t i = 0; i < kept.size(); ++i)
        for (int c = 0; c < h.cols(); ++c) reduced.set(static_cast<int>(i), c, h.at(kept[i], c));
    LinearCode code;
    code.n = h.cols();
    code.k = h.cols() - static_cast<int>(kept.size());
    code.h = std::move(reduced);
    code.id = std::move(id);
    if (code.k < 1) throw std::invalid_argument("make_code: parity-check matrix leaves no information bits");
    return code;
}

/// Rate-1/nf repetition code with H rows (e_i | 1).
inline LinearCode repetition_code(int nf) {
    if (nf < 2) throw std::invalid_argument("repetition_code: need nf >= 2");
    BitMatrix h(nf - 1, nf);
    for (int i = 0; i < nf - 1; ++i) {
        h.set(i, i, 1);
        h.set(i, nf - 1, 1);
    }
    return make_code(std::move(h), "rep" + std::to_string(nf));
}

/// The k = n = 1 code with no parity checks; stands in for uncoded
/// single-frame transmission.
inline LinearCode trivial_code() {
    LinearCode code;
    code.h = BitMatrix(0, 1);
    code.n = 1;
    code.k = 1;
    code.id = "rep1";
    return code;
}

namespace detail {

struct AlistLines {
    std::vector<std::vector<long long>> lines; // token lists per line
    std::vector<int> numbers;                  // original 1-based line numbers
    std::size_t cursor = 0;

    explicit AlistLines(const std::string& text) {
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::istringstream ls(line);
            std::vector<long long> vals;
            long long v;
            bool bad = false;
            while (ls >> v) vals.push_back(v);
            std::string junk;
            if (ls.clear(), ls >> junk) bad = true;
            if (bad)
                throw std::runtime_error("alist parse error: non-numeric token on line " + std::to_string(lineno));
            if (vals.empty()) continue; // blank lines carry no information
            lines.push_back(std::move(vals));
            numbers.push_back(lineno);
        }
    }

    const std::vector<long long>& next_line(const char* what) {
        if (cursor >= lines.size())
            throw std::runtime_error("alist parse error: file ends before the " + std::string(what));
        return lines[cursor++];
    }

    int current_line_number() const {
        return cursor == 0 ? 1 : numbers[cursor - 1];
    }

    /// Reads `count` values, allowing the list to continue across lines.
    std::vector<long long> next_values(std::size_t count, const char* what) {
        std::vector<long long> out;
        while (out.size() < count) {
            const auto& line = next_line(what);
            out.insert(out.end(), line.begin(), line.end());
        }
        if (out.size() != count)
            throw std::runtime_error("alist parse error: " + std::string(what) + " has " +
                                     std::to_string(out.size()) + " entries, expected " + std::to_string(count) +
                                     " (line " + std::to_string(current_line_number()) + ")");
        return out;
    }
};

} // namespace detail

/// Parses the standard alist sparse-matrix format: header `n m`, the
/// maximum column/row degrees, per-column and per-row degree lists, then
/// one line of 1-based indices per column and per row (zero padding
/// permitted). k is derived as n - rank(H).
inline LinearCode load_alist(const std::string& text, std::string id = "alist") {
    detail::AlistLines in(text);
    const auto header = in.next_line("header");
    if (header.size() != 2)
        throw std::runtime_error("alist parse error: header must hold exactly n and m (line " +
                                 std::to_string(in.current_line_number()) + ")");
    const long long n = header[0], m = header[1];
    if (n < 1 || m < 0 || n > 1'000'000 || m > 1'000'000)
        throw std::runtime_error("alist parse error: implausible header dimensions n=" + std::to_string(n) +
                                 " m=" + std::to_string(m));
    const auto degs = in.next_line("degree bounds");
    if (degs.size() != 2) throw std::runtime_error("alist parse error: expected max column/row degrees on line " +
                                                   std::to_string(in.current_line_number()));
    const long long max_col = degs[0], max_row = degs[1];
    if (max_col < 0 || max_col > m || max_row < 0 || max_row > n)
        throw std::runtime_error("alist parse error: degree bounds out of range");

    const auto col_deg = in.next_values(static_cast<std::size_t>(n), "column degree list");
    for (long long c = 0; c < n; ++c)
        if (col_deg[static_cast<std::size_t>(c)] < 0 || col_deg[static_cast<std::size_t>(c)] > max_col)
            throw std::runtime_error("alist parse error: column degree " +
                                     std::to_string(col_deg[static_cast<std::size_t>(c)]) + " out of range");
    std::vector<long long> row_deg;
    if (m > 0) {
        row_deg = in.next_values(static_cast<std::size_t>(m), "row degree list");
        for (long long r = 0; r < m; ++r)
            if (row_deg[static_cast<std::size_t>(r)] < 0 || row_deg[static_cast<std::size_t>(r)] > max_row)
                throw std::runtime_error("alist parse error: row degree " +
                                         std::to_string(row_deg[static_cast<std::size_t>(r)]) + " out of range");
    }

    // a zero-degree list is either absent or a line of padding zeros
    auto skip_padding_line = [&in]() {
        if (in.cursor >= in.lines.size()) return;
        for (long long v : in.lines[in.cursor])
            if (v != 0) return;
        ++in.cursor;
    };

    BitMatrix h(static_cast<int>(m), static_cast<int>(n));
    for (long long c = 0; c < n; ++c) {
        if (col_deg[static_cast<std::size_t>(c)] == 0) {
            skip_padding_line();
            continue;
        }
        const auto& vals = in.next_line("column index list");
        int seen = 0;
        for (long long v : vals) {
            if (v == 0) continue; // padding
            if (v < 1 || v > m)
                throw std::runtime_error("alist parse error: row index " + std::to_string(v) +
                                         " out of range in column " + std::to_string(c + 1) + " (line " +
                                         std::to_string(in.current_line_number()) + ")");
            h.set(static_cast<int>(v - 1), static_cast<int>(c), 1);
            ++seen;
        }
        if (seen != col_deg[static_cast<std::size_t>(c)])
            throw std::runtime_error("alist parse error: column " + std::to_string(c + 1) + " lists " +
                                     std::to_string(seen) + " entries, degree says " +
                                     std::to_string(col_deg[static_cast<std::size_t>(c)]) + " (line " +
                                     std::to_string(in.current_line_number()) + ")");
    }
    for (long long r = 0; r < m; ++r) {
        if (row_deg[static_cast<std::size_t>(r)] == 0) {
            skip_padding_line();
            continue;
        }
        const auto& vals = in.next_line("row index list");
        int seen = 0;
        for (long long v : vals) {
            if (v == 0) continue;
            if (v < 1 || v > n)
                throw std::runtime_error("alist parse error: column index " + std::to_string(v) +
                                         " out of range in row " + std::to_string(r + 1) + " (line " +
                                         std::to_string(in.current_line_number()) + ")");
            if (!h.at(static_cast<int>(r), static_cast<int>(v - 1)))
                throw std::runtime_error("alist parse error: row " + std::to_string(r + 1) + " lists column " +
                                         std::to_string(v) + " absent from the column lists");
            ++seen;
        }
        if (seen != row_deg[static_cast<std::size_t>(r)])
            throw std::runtime_error("alist parse error: row " + std::to_string(r + 1) + " lists " +
                                     std::to_string(seen) + " entries, degree says " +
                                     std::to_string(row_deg[static_cast<std::size_t>(r)]) + " (line " +
                                     std::to_string(in.current_line_number()) + ")");
    }
    return make_code(std::move(h), std::move(id));
}

/// Writes the alist form of H (no zero padding, one list per line).
inline std::string emit_alist(const LinearCode& code) {
    const BitMatrix& h = code.h;
    std::ostringstream out;
    int max_col = 0, max_row = 0;
    for (int c = 0; c < h.cols(); ++c) max_col = std::max(max_col, h.col_weight(c));
    for (int r = 0; r < h.rows(); ++r) max_row = std::max(max_row, h.row_weight(r));
    out << h.cols() << ' ' << h.rows() << '\n';
    out << max_col << ' ' << max_row << '\n';
    for (int c = 0; c < h.cols(); ++c) out << h.col_weight(c) << (c + 1 < h.cols() ? ' ' : '\n');
    for (int r = 0; r < h.rows(); ++r) out << h.row_weight(r) << (r + 1 < h.rows() ? ' ' : '\n');
    for (int c = 0; c < h.cols(); ++c) {
        bool first = true;
        for (int r = 0; r < h.rows(); ++r)
            if (h.at(r, c)) {
                if (!first) out << ' ';
                out << (r + 1);
                first = false;
            }
        out << '\n';
    }
    for (int r = 0; r < h.rows(); ++r) {
        bool first = true;
        for (int c = 0; c < h.cols(); ++c)
            if (h.at(r, c)) {
                if (!first) out << ' ';
                out << (c + 1);
                first = false;
            }
        out << '\n';
    }
    return out.str();
}

/// Systematic encoder: G with G * H^T = 0 and the column positions where
/// the information bits appear verbatim in the codeword.
struct Encoder {
    BitMatrix g; // k x n
    std::vector<int> info_positions; // size k
    int n = 0;
    int k = 0;
};

/// Builds the systematic generator by Gaussian elimination with column
/// pivoting: H ~ [P | I] up to a column permutation, G = [I | P^T] permuted
/// back.
inline Encoder systematic_generator(const LinearCode& code) {
    const int n = code.n;
    // tolerate hand-built codes with dependent rows: reduce, never fail
    BitMatrix work = code.h;
    {
        const std::vector<int> kept = gf2_independent_rows(work);
        if (static_cast<int>(kept.size()) != work.rows()) {
            BitMatrix reduced(static_cast<int>(kept.size()), n);
            for (std::size_t i = 0; i < kept.size(); ++i)
                for (int c = 0; c < n; ++c) reduced.set(static_cast<int>(i), c, work.at(kept[i], c));
            work = std::move(reduced);
        }
    }
    const int m = work.rows();
    std::vector<int> colperm(static_cast<std::size_t>(n));
    for (int c = 0; c < n; ++c) colperm[static_cast<std::size_t>(c)] = c;

    // eliminate so that working columns n-m..n-1 become the identity
    for (int r = 0; r < m; ++r) {
        const int target_col = n - m + r;
        int pr = -1, pc = -1;
        for (int c = target_col; c >= 0 && pr < 0; --c)
            for (int rr = r; rr < m; ++rr)
                if (work.at(rr, c)) { pr = rr; pc = c; break; }
        if (pr < 0) throw std::runtime_error("systematic_generator: no pivot found for independent rows");
        work.swap_rows(r, pr);
        work.swap_cols(target_col, pc);
        std::swap(colperm[static_cast<std::size_t>(target_col)], colperm[static_cast<std::size_t>(pc)]);
        for (int rr = 0; rr < m; ++rr)
            if (rr != r && work.at(rr, target_col)) work.xor_row_into(r, rr);
    }

    // work = [P | I_m] in permuted coordinates; codeword = [u | u P^T]
    const int k = n - m;
    BitMatrix g_perm(k, n);
    for (int i = 0; i < k; ++i) {
        g_perm.set(i, i, 1);
        for (int r = 0; r < m; ++r) g_perm.set(i, k + r, work.at(r, i));
    }
    Encoder enc;
    enc.n = n;
    enc.k = k;
    enc.g = BitMatrix(k, n);
    enc.info_positions.resize(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        for (int c = 0; c < n; ++c)
            enc.g.set(i, colperm[static_cast<std::size_t>(c)], g_perm.at(i, c));
        enc.info_positions[static_cast<std::size_t>(i)] = colperm[static_cast<std::size_t>(i)];
    }
    return enc;
}

inline std::vector<std::uint8_t> encode(const Encoder& enc, const std::vector<std::uint8_t>& info) {
    if (static_cast<int>(info.size()) != enc.k)
        throw std::invalid_argument("encode: info length must equal k");
    std::vector<std::uint8_t> word(static_cast<std::size_t>(enc.n), 0);
    for (int i = 0; i < enc.k; ++i)
        if (info[static_cast<std::size_t>(i)] & 1)
            for (int c = 0; c < enc.n; ++c) word[static_cast<std::size_t>(c)] ^= enc.g.at(i, c);
    return word;
}

/// True iff every parity check is satisfied (GF(2) sum of participating
/// bits equals zero).
inline bool is_codeword(const LinearCode& code, const std::vector<std::uint8_t>& bits) {
    if (static_cast<int>(bits.size()) != code.n)
        throw std::invalid_argument("is_codeword: word length must equal n");
    for (int r = 0; r < code.h.rows(); ++r) {
        int sum = 0;
        for (int c = 0; c < code.n; ++c) sum ^= (code.h.at(r, c) & bits[static_cast<std::size_t>(c)]);
        if (sum) return false;
    }
    return true;
}

} // namespace imud
