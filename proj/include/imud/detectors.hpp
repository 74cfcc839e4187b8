#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "imud/graph.hpp"

namespace imud {

/// Messages are clamped to this magnitude before storage and before any
/// tanh/atanh, keeping every LLR finite.
inline constexpr double kLlrClamp = 50.0;

/// Hard cap on colliding users enumerated at one input node (2^J terms).
inline constexpr int kMaxCollisionsPerSlot = 20;

inline double clamp_llr(double l) {
    if (l > kLlrClamp) return kLlrClamp;
    if (l < -kLlrClamp) return -kLlrClamp;
    return l;
}

/// sgn with the deterministic tie rule sgn(0) = +1.
inline int sign_pm(double x) { return x < 0.0 ? -1 : 1; }

/// An interfering pulse as seen from an input node: its gain and the
/// current LLR of its symbol.
struct InterfererMsg {
    double amp;
    double llr;
};

namespace detail {

/// Streaming log-sum-exp.
struct LogSumExp {
    double max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;

    void add(double e) {
        if (e <= max) {
            sum += std::exp(e - max);
        } else {
            sum = sum * std::exp(max - e) + 1.0;
            max = e;
        }
    }

    double value() const { return max + std::log(sum); }
};

} // namespace detail

/// Input (P function) node message: LLR of the target pulse's symbol given
/// the sample and the incoming LLRs of the interfering pulses. Enumerates
/// the 2^J interferer hypotheses in the log domain.
inline double p_node_llr(double y, double own_amp, std::span<const InterfererMsg> others, double noise_std) {
    if (!(noise_std > 0.0)) throw std::invalid_argument("p_node_llr: noise_std must be positive");
    const int j = static_cast<int>(others.size());
    if (j > kMaxCollisionsPerSlot)
        throw std::runtime_error("p_node_llr: " + std::to_string(j) + " colliding users exceed the enumeration cap of " +
                                 std::to_string(kMaxCollisionsPerSlot));
    const double inv2var = 1.0 / (2.0 * noise_std * noise_std);
    detail::LogSumExp num, den;
    for (std::uint32_t mask = 0; mask < (1u << j); ++mask) {
        double interference = 0.0;
        double prior = 0.0;
        for (int b = 0; b < j; ++b) {
            if (mask & (1u << b)) {
                interference += others[static_cast<std::size_t>(b)].amp;
                prior += others[static_cast<std::size_t>(b)].llr;
            } else {
                interference -= others[static_cast<std::size_t>(b)].amp;
            }
        }
        const double base = y - interference;
        num.add(-(base - own_amp) * (base - own_amp) * inv2var + prior);
        den.add(-(base + own_amp) * (base + own_amp) * inv2var + prior);
    }
    return num.value() - den.value();
}

/// Equality (E function) node: the LLR is the plain sum of the incoming
/// LLRs. Extrinsic selection is the caller's job.
inline double e_node_llr(std::span<const double> incoming) {
    double s = 0.0;
    for (double l : incoming) s += l;
    return s;
}

/// Parity-check node: the standard LDPC check update
/// 2 atanh(prod tanh(l_j / 2)), clamped.
inline double pc_node_llr(std::span<const double> incoming) {
    double prod = 1.0;
    for (double l : incoming) prod *= std::tanh(0.5 * clamp_llr(l));
    return clamp_llr(2.0 * std::atanh(prod));
}

/// Bit-variable node: sum of the incoming LLRs (the caller excludes the
/// destination edge for extrinsic messages, or passes all edges for the
/// final marginal).
inline double b_variable_llr(std::span<const double> incoming) {
    double s = 0.0;
    for (double l : incoming) s += l;
    return s;
}

/// Output of a detector run. decisions holds hard information bits per
/// user; llrs holds final per-bit marginals where the detector produces
/// them (one per user for repetition detectors, one per coded bit for the
/// coded detector and the exhaustive oracle).
struct DetectionResult {
    std::vector<std::vector<std::uint8_t>> decisions;
    std::vector<std::vector<double>> llrs;
    int iterations_run = 0;
};

inline std::uint8_t bit_from_llr(double llr) { return llr >= 0.0 ? 0 : 1; }

// ---------------------------------------------------------------------------
// FG3: three-stage factor-graph detector for repetition transmissions
// ---------------------------------------------------------------------------

/// Edge messages of the FG3 detector: to_user is the input-side (P node)
/// output, to_input the user-side extrinsic reply. Iteration 0 starts with
/// all to_input at zero.
struct FgState {
    std::vector<double> to_user;
    std::vector<double> to_input;
};

inline FgState make_fg_state(const DetectorGraph& g) {
    return FgState{std::vector<double>(static_cast<std::size_t>(g.num_edges()), 0.0),
                   std::vector<double>(static_cast<std::size_t>(g.num_edges()), 0.0)};
}

namespace detail {

inline void check_samples(const DetectorGraph& g, const ReceivedSamples& r) {
    if (static_cast<int>(r.samples.size()) != g.rows())
        throw std::invalid_argument("detector: sample vector length does not match the slot count");
    if (!(r.noise_std > 0.0))
        throw std::invalid_argument("detector: received samples must carry a positive noise_std");
}

/// Fires every input node: writes p messages into `out` from the user-side
/// messages in `in`.
inline void input_stage(const DetectorGraph& g, const ReceivedSamples& r, const std::vector<double>& in,
                        std::vector<double>& out) {
    std::vector<InterfererMsg> others;
    for (int i = 0; i < g.num_inputs(); ++i) {
        const double y = r.samples[static_cast<std::size_t>(g.input_row(i))];
        const auto& es = g.input_edges(i);
        for (int target : es) {
            others.clear();
            for (int e : es)
                if (e != target) others.push_back({g.edge(e).amp, in[static_cast<std::size_t>(e)]});
            out[static_cast<std::size_t>(target)] =
                clamp_llr(p_node_llr(y, g.edge(target).amp, others, r.noise_std));
        }
    }
}

} // namespace detail

inline void fg3_input_stage(const DetectorGraph& g, const ReceivedSamples& r, FgState& st) {
    detail::input_stage(g, r, st.to_input, st.to_user);
}

inline void fg3_user_stage(const DetectorGraph& g, FgState& st) {
    for (int k = 0; k < g.users(); ++k) {
        for (int f = 0; f < g.frames(); ++f) {
            double s = 0.0;
            for (int f2 = 0; f2 < g.frames(); ++f2)
                if (f2 != f) s += st.to_user[static_cast<std::size_t>(g.edge_id(k, f2))];
            st.to_input[static_cast<std::size_t>(g.edge_id(k, f))] = clamp_llr(s);
        }
    }
}

/// Per-user symbol marginal: the E node output over all Nf edges.
inline double fg3_marginal(const DetectorGraph& g, const FgState& st, int user) {
    double s = 0.0;
    for (int f = 0; f < g.frames(); ++f) s += st.to_user[static_cast<std::size_t>(g.edge_id(user, f))];
    return s;
}

inline DetectionResult detect_fg3(const DetectorGraph& g, const ReceivedSamples& r, int iterations) {
    if (g.coded()) throw std::invalid_argument("detect_fg3: graph must use repetition semantics");
    if (iterations < 1) throw std::invalid_argument("detect_fg3: need at least one iteration");
    detail::check_samples(g, r);
    FgState st = make_fg_state(g);
    for (int it = 0; it < iterations; ++it) {
        fg3_input_stage(g, r, st);
        fg3_user_stage(g, st);
    }
    DetectionResult res;
    res.iterations_run = iterations;
    res.decisions.resize(static_cast<std::size_t>(g.users()));
    res.llrs.resize(static_cast<std::size_t>(g.users()));
    for (int k = 0; k < g.users(); ++k) {
        const double m = fg3_marginal(g, st, k);
        res.llrs[static_cast<std::size_t>(k)] = {m};
        res.decisions[static_cast<std::size_t>(k)] = {bit_from_llr(m)};
    }
    return res;
}

// ---------------------------------------------------------------------------
// CFG3: coded detector with parity-check nodes on the user side
// ---------------------------------------------------------------------------

/// Edge messages of the CFG3 detector. The per-user code wiring is shared,
/// so check-side messages are indexed as user * num_check_edges + h_edge.
struct Cfg3State {
    std::vector<double> to_var;        // P -> b, per system edge
    std::vector<double> to_input;      // b -> P, per system edge
    std::vector<double> var_to_check;  // per (user, h edge)
    std::vector<double> check_to_var;  // per (user, h edge)
};

inline Cfg3State make_cfg3_state(const DetectorGraph& g) {
    Cfg3State st;
    st.to_var.assign(static_cast<std::size_t>(g.num_edges()), 0.0);
    st.to_input.assign(static_cast<std::size_t>(g.num_edges()), 0.0);
    st.var_to_check.assign(static_cast<std::size_t>(g.users()) * g.num_check_edges(), 0.0);
    st.check_to_var.assign(static_cast<std::size_t>(g.users()) * g.num_check_edges(), 0.0);
    return st;
}

inline void cfg3_input_stage(const DetectorGraph& g, const ReceivedSamples& r, Cfg3State& st) {
    detail::input_stage(g, r, st.to_input, st.to_var);
}

inline void cfg3_var_to_check_stage(const DetectorGraph& g, Cfg3State& st) {
    const std::size_t he_count = static_cast<std::size_t>(g.num_check_edges());
    for (int k = 0; k < g.users(); ++k) {
        const std::size_t base = static_cast<std::size_t>(k) * he_count;
        for (int j = 0; j < g.frames(); ++j) {
            const double channel = st.to_var[static_cast<std::size_t>(g.edge_id(k, j))];
            const auto& hes = g.check_edges_of_var(j);
            for (int he : hes) {
                double s = channel;
                for (int he2 : hes)
                    if (he2 != he) s += st.check_to_var[base + static_cast<std::size_t>(he2)];
                st.var_to_check[base + static_cast<std::size_t>(he)] = clamp_llr(s);
            }
        }
    }
}

inline void cfg3_check_stage(const DetectorGraph& g, Cfg3State& st) {
    const std::size_t he_count = static_cast<std::size_t>(g.num_check_edges());
    const int checks = g.code().h.rows();
    for (int k = 0; k < g.users(); ++k) {
        const std::size_t base = static_cast<std::size_t>(k) * he_count;
        for (int i = 0; i < checks; ++i) {
            const auto& hes = g.check_edges_of_check(i);
            for (int he : hes) {
                double prod = 1.0;
                for (int he2 : hes)
                    if (he2 != he) prod *= std::tanh(0.5 * st.var_to_check[base + static_cast<std::size_t>(he2)]);
                st.check_to_var[base + static_cast<std::size_t>(he)] = clamp_llr(2.0 * std::atanh(prod));
            }
        }
    }
}

inline void cfg3_var_to_input_stage(const DetectorGraph& g, Cfg3State& st) {
    const std::size_t he_count = static_cast<std::size_t>(g.num_check_edges());
    for (int k = 0; k < g.users(); ++k) {
        const std::size_t base = static_cast<std::size_t>(k) * he_count;
        for (int j = 0; j < g.frames(); ++j) {
            double s = 0.0;
            for (int he : g.check_edges_of_var(j)) s += st.check_to_var[base + static_cast<std::size_t>(he)];
            st.to_input[static_cast<std::size_t>(g.edge_id(k, j))] = clamp_llr(s);
        }
    }
}

/// Final marginal of coded bit j of user k: channel message plus all check
/// messages at its variable node.
inline double cfg3_marginal(const DetectorGraph& g, const Cfg3State& st, int user, int j) {
    const std::size_t base = static_cast<std::size_t>(user) * g.num_check_edges();
    double s = st.to_var[static_cast<std::size_t>(g.edge_id(user, j))];
    for (int he : g.check_edges_of_var(j)) s += st.check_to_var[base + static_cast<std::size_t>(he)];
    return s;
}

inline DetectionResult detect_cfg3(const DetectorGraph& g, const ReceivedSamples& r, const Encoder& enc,
                                   int iterations) {
    if (!g.coded()) throw std::invalid_argument("detect_cfg3: graph must carry a code");
    if (enc.n != g.code().n || enc.k != g.code().k)
        throw std::invalid_argument("detect_cfg3: encoder does not match the graph's code");
    if (iterations < 1) throw std::invalid_argument("detect_cfg3: need at least one iteration");
    detail::check_samples(g, r);
    Cfg3State st = make_cfg3_state(g);
    for (int it = 0; it < iterations; ++it) {
        cfg3_input_stage(g, r, st);
        cfg3_var_to_check_stage(g, st);
        cfg3_check_stage(g, st);
        cfg3_var_to_input_stage(g, st);
    }
    DetectionResult res;
    res.iterations_run = iterations;
    res.decisions.resize(static_cast<std::size_t>(g.users()));
    res.llrs.resize(static_cast<std::size_t>(g.users()));
    for (int k = 0; k < g.users(); ++k) {
        auto& llrs = res.llrs[static_cast<std::size_t>(k)];
        llrs.resize(static_cast<std::size_t>(g.frames()));
        for (int j = 0; j < g.frames(); ++j) llrs[static_cast<std::size_t>(j)] = cfg3_marginal(g, st, k, j);
        auto& bits = res.decisions[static_cast<std::size_t>(k)];
        bits.resize(static_cast<std::size_t>(enc.k));
        for (int t = 0; t < enc.k; ++t)
            bits[static_cast<std::size_t>(t)] = bit_from_llr(llrs[static_cast<std::size_t>(enc.info_positions[static_cast<std::size_t>(t)])]);
    }
    return res;
}

// ---------------------------------------------------------------------------
// ID: hard-message interference-cancellation detector
// ---------------------------------------------------------------------------

/// The ID detector passes hard messages. Users update one after another
/// within an iteration (each input node uses the other users' most recent
/// hard messages); check outputs start at zero.
inline DetectionResult detect_id(const DetectorGraph& g, const ReceivedSamples& r, int iterations) {
    if (g.coded()) throw std::invalid_argument("detect_id: graph must use repetition semantics");
    if (iterations < 0) throw std::invalid_argument("detect_id: iterations must be >= 0");
    detail::check_samples(g, r);
    const std::size_t ecount = static_cast<std::size_t>(g.num_edges());
    std::vector<double> residual(ecount, 0.0);
    std::vector<double> hard(ecount, 0.0);

    auto compute_residual = [&](int e) {
        const GraphEdge& edge = g.edge(e);
        double v = r.samples[static_cast<std::size_t>(g.input_row(edge.input))];
        for (int e2 : g.input_edges(edge.input))
            if (e2 != e) v -= g.edge(e2).amp * hard[static_cast<std::size_t>(e2)];
        return v;
    };

    for (int it = 0; it < iterations; ++it) {
        for (int k = 0; k < g.users(); ++k) {
            for (int f = 0; f < g.frames(); ++f) {
                const int e = g.edge_id(k, f);
                residual[static_cast<std::size_t>(e)] = compute_residual(e);
            }
            for (int f = 0; f < g.frames(); ++f) {
                double s = 0.0;
                for (int f2 = 0; f2 < g.frames(); ++f2)
                    if (f2 != f) s += residual[static_cast<std::size_t>(g.edge_id(k, f2))];
                hard[static_cast<std::size_t>(g.edge_id(k, f))] = sign_pm(s);
            }
        }
    }

    DetectionResult res;
    res.iterations_run = iterations;
    res.decisions.resize(static_cast<std::size_t>(g.users()));
    for (int k = 0; k < g.users(); ++k) {
        double s = 0.0;
        for (int f = 0; f < g.frames(); ++f) s += compute_residual(g.edge_id(k, f));
        res.decisions[static_cast<std::size_t>(k)] = {static_cast<std::uint8_t>(sign_pm(s) > 0 ? 0 : 1)};
    }
    return res;
}

// ---------------------------------------------------------------------------
// FP: two-stage turbo detector (pulse detection / symbol detection)
// ---------------------------------------------------------------------------

/// Per-pulse messages of the FP detector: lambda1 is the pulse-stage
/// extrinsic, lambda2 the symbol-stage extrinsic used as the next prior.
struct FpState {
    std::vector<double> lambda1;
    std::vector<double> lambda2;
};

inline FpState make_fp_state(const DetectorGraph& g) {
    return FpState{std::vector<double>(static_cast<std::size_t>(g.num_edges()), 0.0),
                   std::vector<double>(static_cast<std::size_t>(g.num_edges()), 0.0)};
}

namespace detail {

// log sigmoid, stable for large |z|
inline double log_sigmoid(double z) {
    if (z > 0.0) return -std::log1p(std::exp(-z));
    return z - std::log1p(std::exp(z));
}

} // namespace detail

/// Pulse-detection stage: a posteriori pulse LLR given the sample and the
/// interferers' priors p(b) taken from the previous symbol stage.
inline void fp_pulse_stage(const DetectorGraph& g, const ReceivedSamples& r, FpState& st) {
    const double inv2var = 1.0 / (2.0 * r.noise_std * r.noise_std);
    std::vector<int> others;
    std::vector<double> logp_plus, logp_minus;
    for (int i = 0; i < g.num_inputs(); ++i) {
        const double y = r.samples[static_cast<std::size_t>(g.input_row(i))];
        const auto& es = g.input_edges(i);
        for (int target : es) {
            others.clear();
            logp_plus.clear();
            logp_minus.clear();
            for (int e : es) {
                if (e == target) continue;
                others.push_back(e);
                logp_plus.push_back(detail::log_sigmoid(st.lambda2[static_cast<std::size_t>(e)]));
                logp_minus.push_back(detail::log_sigmoid(-st.lambda2[static_cast<std::size_t>(e)]));
            }
            const int j = static_cast<int>(others.size());
            if (j > kMaxCollisionsPerSlot)
                throw std::runtime_error("fp_pulse_stage: colliding users exceed the enumeration cap");
            const double a0 = g.edge(target).amp;
            detail::LogSumExp num, den;
            for (std::uint32_t mask = 0; mask < (1u << j); ++mask) {
                double interference = 0.0;
                double logprior = 0.0;
                for (int b = 0; b < j; ++b) {
                    if (mask & (1u << b)) {
                        interference += g.edge(others[static_cast<std::size_t>(b)]).amp;
                        logprior += logp_plus[static_cast<std::size_t>(b)];
                    } else {
                        interference -= g.edge(others[static_cast<std::size_t>(b)]).amp;
                        logprior += logp_minus[static_cast<std::size_t>(b)];
                    }
                }
                const double base = y - interference;
                num.add(-(base - a0) * (base - a0) * inv2var + logprior);
                den.add(-(base + a0) * (base + a0) * inv2var + logprior);
            }
            st.lambda1[static_cast<std::size_t>(target)] = clamp_llr(num.value() - den.value());
        }
    }
}

/// Symbol-detection stage: the extrinsic sum of the other pulses' stage-one
/// LLRs.
inline void fp_symbol_stage(const DetectorGraph& g, FpState& st) {
    for (int k = 0; k < g.users(); ++k) {
        for (int f = 0; f < g.frames(); ++f) {
            double s = 0.0;
            for (int f2 = 0; f2 < g.frames(); ++f2)
                if (f2 != f) s += st.lambda1[static_cast<std::size_t>(g.edge_id(k, f2))];
            st.lambda2[static_cast<std::size_t>(g.edge_id(k, f))] = clamp_llr(s);
        }
    }
}

inline DetectionResult detect_fp(const DetectorGraph& g, const ReceivedSamples& r, int iterations) {
    if (g.coded()) throw std::invalid_argument("detect_fp: graph must use repetition semantics");
    if (iterations < 1) throw std::invalid_argument("detect_fp: need at least one iteration");
    detail::check_samples(g, r);
    FpState st = make_fp_state(g);
    for (int it = 0; it < iterations; ++it) {
        fp_pulse_stage(g, r, st);
        fp_symbol_stage(g, st);
    }
    DetectionResult res;
    res.iterations_run = iterations;
    res.decisions.resize(static_cast<std::size_t>(g.users()));
    res.llrs.resize(static_cast<std::size_t>(g.users()));
    for (int k = 0; k < g.users(); ++k) {
        double l2 = 0.0;
        for (int f = 0; f < g.frames(); ++f) l2 += st.lambda1[static_cast<std::size_t>(g.edge_id(k, f))];
        res.llrs[static_cast<std::size_t>(k)] = {l2};
        res.decisions[static_cast<std::size_t>(k)] = {static_cast<std::uint8_t>(sign_pm(l2) > 0 ? 0 : 1)};
    }
    return res;
}

// ---------------------------------------------------------------------------
// Blinking receiver
// ---------------------------------------------------------------------------

struct BlinkingDecision {
    int symbol;        // +1 or -1; +1 when every frame collided (tie rule)
    bool all_collided; // true marks the erasure event
};

/// Sums the user's matched-filter outputs over collision-free frames only
/// and decides by sign.
inline BlinkingDecision detect_blinking(const ReceivedSamples& r, const SlotMatrix& slot, const SystemParams& params,
                                        int user) {
    if (user < 0 || user >= slot.users()) throw std::out_of_range("detect_blinking: user index out of range");
    if (static_cast<int>(r.samples.size()) != slot.rows())
        throw std::invalid_argument("detect_blinking: sample vector length does not match the slot count");
    (void)params;
    const std::vector<std::uint8_t> w = collision_vector(slot, user);
    double sum = 0.0;
    bool any = false;
    for (int f = 0; f < slot.frames(); ++f) {
        if (w[static_cast<std::size_t>(f)]) continue;
        sum += r.samples[static_cast<std::size_t>(slot.pulse_row(user, f))];
        any = true;
    }
    return BlinkingDecision{sign_pm(sum), !any};
}

// ---------------------------------------------------------------------------
// Exhaustive MAP oracle
// ---------------------------------------------------------------------------

/// Exhaustive per-bit MAP detector. Enumerates every combination of all
/// users' information words (Gray-coded, incrementally updated slot sums),
/// marginalizes the memoryless channel likelihood over the codeword
/// constraint, and returns exact log-posterior ratios per coded bit plus
/// the per-bit MAP decisions. Hypothesis count users * k is capped at 2^20.
inline DetectionResult detect_map_oracle(const ReceivedSamples& r, const SlotMatrix& slot, const SystemParams& params,
                                         const LinearCode& code, double noise_std) {
    params.validate();
    if (!(noise_std > 0.0)) throw std::invalid_argument("detect_map_oracle: noise_std must be positive");
    if (code.n != slot.frames())
        throw std::invalid_argument("detect_map_oracle: code length must equal the frame count");
    if (static_cast<int>(r.samples.size()) != slot.rows())
        throw std::invalid_argument("detect_map_oracle: sample vector length does not match the slot count");
    const int users = params.users;
    const int n = code.n;
    const int total_bits = users * code.k;
    if (total_bits > 20)
        throw std::invalid_argument("detect_map_oracle: hypothesis count 2^" + std::to_string(total_bits) +
                                    " exceeds the 2^20 cap");
    const Encoder enc = systematic_generator(code);

    const std::uint64_t hyp_count = std::uint64_t{1} << total_bits;
    const double inv2var = 1.0 / (2.0 * noise_std * noise_std);

    // current hypothesis state: all info bits zero -> all-plus symbols
    std::vector<std::int8_t> symbol(static_cast<std::size_t>(users) * n, 1);
    std::vector<double> slot_sum(static_cast<std::size_t>(slot.rows()), 0.0);
    for (int k = 0; k < users; ++k)
        for (int f = 0; f < n; ++f)
            slot_sum[static_cast<std::size_t>(slot.pulse_row(k, f))] += params.amplitudes[static_cast<std::size_t>(k)];

    // unused slots contribute the same factor to every hypothesis
    double ll = 0.0;
    for (int row = 0; row < slot.rows(); ++row) {
        if (slot.row_weight(row) == 0) continue;
        const double d = r.samples[static_cast<std::size_t>(row)] - slot_sum[static_cast<std::size_t>(row)];
        ll -= d * d * inv2var;
    }

    auto flip_info_bit = [&](int global_bit) {
        const int k = global_bit / code.k;
        const int t = global_bit % code.k;
        const double amp = params.amplitudes[static_cast<std::size_t>(k)];
        for (int jj = 0; jj < n; ++jj) {
            if (!enc.g.at(t, jj)) continue;
            const int row = slot.pulse_row(k, jj);
            const double y = r.samples[static_cast<std::size_t>(row)];
            auto& m = slot_sum[static_cast<std::size_t>(row)];
            auto& s = symbol[static_cast<std::size_t>(k) * n + jj];
            const double d_old = y - m;
            m -= 2.0 * amp * s;
            s = static_cast<std::int8_t>(-s);
            const double d_new = y - m;
            ll += (d_old * d_old - d_new * d_new) * inv2var;
        }
    };

    // pass 1: log-likelihood of every hypothesis along the Gray walk
    std::vector<double> ll_of(static_cast<std::size_t>(hyp_count));
    double ll_max = -std::numeric_limits<double>::infinity();
    for (std::uint64_t h = 0;; ++h) {
        ll_of[static_cast<std::size_t>(h)] = ll;
        if (ll > ll_max) ll_max = ll;
        if (h + 1 == hyp_count) break;
        flip_info_bit(static_cast<int>(std::countr_zero(h + 1)));
    }

    // pass 2: rebuild the walk state and accumulate per-coded-bit posterior mass
    std::fill(symbol.begin(), symbol.end(), std::int8_t{1});
    std::fill(slot_sum.begin(), slot_sum.end(), 0.0);
    for (int k = 0; k < users; ++k)
        for (int f = 0; f < n; ++f)
            slot_sum[static_cast<std::size_t>(slot.pulse_row(k, f))] += params.amplitudes[static_cast<std::size_t>(k)];
    ll = ll_of[0];

    std::vector<double> mass_plus(static_cast<std::size_t>(users) * n, 0.0);
    std::vector<double> mass_minus(static_cast<std::size_t>(users) * n, 0.0);
    for (std::uint64_t h = 0;; ++h) {
        const double w = std::exp(ll_of[static_cast<std::size_t>(h)] - ll_max);
        for (int k = 0; k < users; ++k) {
            const std::size_t base = static_cast<std::size_t>(k) * n;
            for (int jj = 0; jj < n; ++jj) {
                if (symbol[base + jj] > 0)
                    mass_plus[base + jj] += w;
                else
                    mass_minus[base + jj] += w;
            }
        }
        if (h + 1 == hyp_count) break;
        flip_info_bit(static_cast<int>(std::countr_zero(h + 1)));
    }

    DetectionResult res;
    res.iterations_run = 0;
    res.decisions.resize(static_cast<std::size_t>(users));
    res.llrs.resize(static_cast<std::size_t>(users));
    for (int k = 0; k < users; ++k) {
        auto& llrs = res.llrs[static_cast<std::size_t>(k)];
        llrs.resize(static_cast<std::size_t>(n));
        for (int jj = 0; jj < n; ++jj) {
            const std::size_t at = static_cast<std::size_t>(k) * n + jj;
            llrs[static_cast<std::size_t>(jj)] = std::log(mass_plus[at]) - std::log(mass_minus[at]);
        }
        auto& bits = res.decisions[static_cast<std::size_t>(k)];
        bits.resize(static_cast<std::size_t>(code.k));
        for (int t = 0; t < code.k; ++t) {
            const std::size_t at =
                static_cast<std::size_t>(k) * n + enc.info_positions[static_cast<std::size_t>(t)];
            bits[static_cast<std::size_t>(t)] = (mass_plus[at] >= mass_minus[at]) ? 0 : 1;
        }
    }
    return res;
}

} // namespace imud
