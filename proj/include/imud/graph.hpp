#pragma once

#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "imud/channel.hpp"
#include "imud/code.hpp"

namespace imud {

/// One edge of the bipartite system graph, joining the input (P function)
/// node of a slot with user k's frame-f pulse on the user side.
struct GraphEdge {
    int input;  // index into the graph's input node list
    int user;
    int frame;
    double amp; // gain of this pulse as seen by the input node
};

/// Bipartite detection graph over the used slots. The user side is either a
/// single equality node per user (repetition semantics) or, when a code is
/// attached, n bit-variable nodes plus the code's parity-check nodes per
/// user. Edges are indexed canonically as user*Nf + frame.
class DetectorGraph {
public:
    /// Repetition / uncoded user side.
    DetectorGraph(const SlotMatrix& slot, const SystemParams& params) { build(slot, params, nullptr); }

    /// Coded user side wired by the code's parity-check matrix; requires
    /// code.n == Nf.
    DetectorGraph(const SlotMatrix& slot, const SystemParams& params, const LinearCode& code) {
        if (code.n != slot.frames())
            throw std::invalid_argument("DetectorGraph: code length must equal the frame count");
        build(slot, params, &code);
    }

    int users() const { return users_; }
    int frames() const { return nf_; }
    int rows() const { return rows_; }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int num_inputs() const { return static_cast<int>(input_rows_.size()); }

    const GraphEdge& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }
    int edge_id(int user, int frame) const { return user * nf_ + frame; }

    /// Slot row (sample index) observed by an input node.
    int input_row(int input) const { return input_rows_[static_cast<std::size_t>(input)]; }
    const std::vector<int>& input_edges(int input) const { return input_edges_[static_cast<std::size_t>(input)]; }

    bool coded() const { return code_.has_value(); }
    const LinearCode& code() const { return *code_; }

    /// Parity-check wiring shared by every user: H edge list in row-major
    /// order, plus per-check and per-variable incidence.
    int num_check_edges() const { return static_cast<int>(check_edge_var_.size()); }
    int check_edge_var(int he) const { return check_edge_var_[static_cast<std::size_t>(he)]; }
    const std::vector<int>& check_edges_of_check(int check) const { return check_rows_[static_cast<std::size_t>(check)]; }
    const std::vector<int>& check_edges_of_var(int var) const { return var_cols_[static_cast<std::size_t>(var)]; }

    /// True iff the factor graph (including the per-user code wiring when
    /// present) is cycle-free.
    bool is_tree() const {
        // union-find over all nodes; tree iff no union joins two joined nodes
        int node_count = num_inputs();
        std::vector<std::pair<int, int>> links;
        if (!coded()) {
            const int user_base = node_count;
            node_count += users_;
            for (const auto& e : edges_) links.emplace_back(e.input, user_base + e.user);
        } else {
            const int var_base = node_count;
            const int check_base = var_base + users_ * nf_;
            const int checks = code_->h.rows();
            node_count = check_base + users_ * checks;
            for (const auto& e : edges_) links.emplace_back(e.input, var_base + e.user * nf_ + e.frame);
            for (int k = 0; k < users_; ++k)
                for (int i = 0; i < checks; ++i)
                    for (int he : check_rows_[static_cast<std::size_t>(i)])
                        links.emplace_back(check_base + k * checks + i,
                                           var_base + k * nf_ + check_edge_var_[static_cast<std::size_t>(he)]);
        }
        std::vector<int> parent(static_cast<std::size_t>(node_count));
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](int x) {
            while (parent[static_cast<std::size_t>(x)] != x) {
                parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
                x = parent[static_cast<std::size_t>(x)];
            }
            return x;
        };
        for (const auto& [a, b] : links) {
            const int ra = find(a), rb = find(b);
            if (ra == rb) return false;
            parent[static_cast<std::size_t>(ra)] = rb;
        }
        return true;
    }

private:
    void build(const SlotMatrix& slot, const SystemParams& params, const LinearCode* code) {
        params.validate();
        if (slot.users() != params.users)
            throw std::invalid_argument("DetectorGraph: slot/params user count mismatch");
        users_ = params.users;
        nf_ = slot.frames();
        rows_ = slot.rows();

        std::vector<int> input_of_row(static_cast<std::size_t>(slot.rows()), -1);
        for (int row = 0; row < slot.rows(); ++row) {
            if (slot.row_weight(row) == 0) continue;
            input_of_row[static_cast<std::size_t>(row)] = static_cast<int>(input_rows_.size());
            input_rows_.push_back(row);
        }
        input_edges_.resize(input_rows_.size());

        edges_.resize(static_cast<std::size_t>(users_) * nf_);
        for (int k = 0; k < users_; ++k) {
            for (int f = 0; f < nf_; ++f) {
                const int row = slot.pulse_row(k, f);
                const int input = input_of_row[static_cast<std::size_t>(row)];
                const int e = edge_id(k, f);
                edges_[static_cast<std::size_t>(e)] = GraphEdge{input, k, f, params.amplitudes[static_cast<std::size_t>(k)]};
                input_edges_[static_cast<std::size_t>(input)].push_back(e);
            }
        }

        if (code) {
            code_ = *code;
            const int checks = code_->h.rows();
            check_rows_.resize(static_cast<std::size_t>(checks));
            var_cols_.resize(static_cast<std::size_t>(nf_));
            for (int i = 0; i < checks; ++i)
                for (int j = 0; j < nf_; ++j)
                    if (code_->h.at(i, j)) {
                        const int he = static_cast<int>(check_edge_var_.size());
                        check_edge_var_.push_back(j);
                        check_rows_[static_cast<std::size_t>(i)].push_back(he);
                        var_cols_[static_cast<std::size_t>(j)].push_back(he);
                    }
        }
    }

    int users_ = 0;
    int nf_ = 0;
    int rows_ = 0;
    std::vector<GraphEdge> edges_;
    std::vector<int> input_rows_;
    std::vector<std::vector<int>> input_edges_;
    std::optional<LinearCode> code_;
    std::vector<int> check_edge_var_;
    std::vector<std::vector<int>> check_rows_;
    std::vector<std::vector<int>> var_cols_;
};

} // namespace imud
