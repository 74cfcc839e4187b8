#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "imud/rng.hpp"

namespace imud {

/// Global system parameters of the multiuser time-hopping link.
struct SystemParams {
    int users = 1;           // K
    int chips_per_frame = 1; // Nc
    int frames = 1;          // Nf; equals the code length n when coding is used
    std::vector<double> amplitudes; // matched-filter output scale per user, all > 0

    void validate() const {
        if (users < 1) throw std::invalid_argument("SystemParams: users must be >= 1");
        if (chips_per_frame < 1) throw std::invalid_argument("SystemParams: chips_per_frame must be >= 1");
        if (frames < 1) throw std::invalid_argument("SystemParams: frames must be >= 1");
        if (static_cast<int>(amplitudes.size()) != users)
            throw std::invalid_argument("SystemParams: amplitudes size must equal users");
        for (double a : amplitudes)
            if (!(a > 0.0)) throw std::invalid_argument("SystemParams: amplitudes must be positive");
    }

    static SystemParams uniform(int users, int chips_per_frame, int frames, double amplitude = 1.0) {
        SystemParams p;
        p.users = users;
        p.chips_per_frame = chips_per_frame;
        p.frames = frames;
        p.amplitudes.assign(static_cast<std::size_t>(users), amplitude);
        p.validate();
        return p;
    }
};

/// Per-user chip choices, one chip index in [0, Nc) per frame.
struct HoppingPattern {
    int users = 0;
    int frames = 0;
    std::vector<int> chips; // row-major users x frames

    int chip(int user, int frame) const { return chips[static_cast<std::size_t>(user) * frames + frame]; }
    int& chip(int user, int frame) { return chips[static_cast<std::size_t>(user) * frames + frame]; }
};

/// Draws every chip independently and uniformly from {0, ..., Nc-1}.
inline HoppingPattern generate_hopping(const SystemParams& params, Rng& rng) {
    params.validate();
    HoppingPattern p;
    p.users = params.users;
    p.frames = params.frames;
    p.chips.resize(static_cast<std::size_t>(params.users) * params.frames);
    for (auto& c : p.chips)
        c = static_cast<int>(rng.uniform_below(static_cast<std::uint32_t>(params.chips_per_frame)));
    return p;
}

/// The (Nc*Nf) x K slot incidence matrix S. Column k has a single one per
/// frame block, at row f*Nc + c_f^k. Stored sparsely; entry() exposes the
/// dense view.
class SlotMatrix {
public:
    SlotMatrix(const HoppingPattern& pattern, const SystemParams& params)
        : nc_(params.chips_per_frame), nf_(params.frames), users_(params.users) {
        params.validate();
        if (pattern.users != params.users || pattern.frames != params.frames)
            throw std::invalid_argument("SlotMatrix: pattern dimensions do not match params");
        pulse_row_.resize(static_cast<std::size_t>(users_) * nf_);
        occupants_.resize(static_cast<std::size_t>(nc_) * nf_);
        for (int k = 0; k < users_; ++k) {
            for (int f = 0; f < nf_; ++f) {
                const int c = pattern.chip(k, f);
                if (c < 0 || c >= nc_)
                    throw std::invalid_argument("SlotMatrix: chip index out of range");
                const int row = f * nc_ + c;
                pulse_row_[static_cast<std::size_t>(k) * nf_ + f] = row;
                occupants_[row].push_back(k);
            }
        }
    }

    int rows() const { return nc_ * nf_; }
    int users() const { return users_; }
    int frames() const { return nf_; }
    int chips_per_frame() const { return nc_; }

    /// Row of user k's frame-f pulse.
    int pulse_row(int user, int frame) const {
        return pulse_row_[static_cast<std::size_t>(user) * nf_ + frame];
    }

    /// Users transmitting in the given row (S column indices with a one).
    const std::vector<int>& users_in_row(int row) const { return occupants_[row]; }

    int row_weight(int row) const { return static_cast<int>(occupants_[row].size()); }

    /// Dense S_{l,k}.
    bool entry(int row, int user) const {
        const int f = row / nc_;
        return f < nf_ && pulse_row(user, f) == row;
    }

private:
    int nc_, nf_, users_;
    std::vector<int> pulse_row_;            // (user, frame) -> row
    std::vector<std::vector<int>> occupants_; // row -> users
};

/// Per-frame channel symbols, entries in {+1, -1}. The uncoded case is the
/// constant row; the coded case carries one modulated codeword bit per frame.
struct Symbols {
    int users = 0;
    int frames = 0;
    std::vector<std::int8_t> s; // row-major users x frames

    static Symbols uncoded(const std::vector<std::int8_t>& per_user, int frames) {
        Symbols sym;
        sym.users = static_cast<int>(per_user.size());
        sym.frames = frames;
        sym.s.resize(per_user.size() * static_cast<std::size_t>(frames));
        for (std::size_t k = 0; k < per_user.size(); ++k)
            for (int f = 0; f < frames; ++f) sym.s[k * frames + f] = per_user[k];
        return sym;
    }

    static Symbols zeros(int users, int frames) {
        Symbols sym;
        sym.users = users;
        sym.frames = frames;
        sym.s.assign(static_cast<std::size_t>(users) * frames, std::int8_t{1});
        return sym;
    }

    std::int8_t at(int user, int frame) const { return s[static_cast<std::size_t>(user) * frames + frame]; }
    std::int8_t& at(int user, int frame) { return s[static_cast<std::size_t>(user) * frames + frame]; }
};

/// Noiseless matched-filter output S*A*b, one sample per slot.
inline std::vector<double> transmit(const SlotMatrix& slot, const SystemParams& params, const Symbols& symbols) {
    if (slot.users() != params.users || static_cast<int>(params.amplitudes.size()) != params.users)
        throw std::invalid_argument("transmit: slot/params mismatch");
    if (symbols.users != params.users || symbols.frames != slot.frames())
        throw std::invalid_argument("transmit: symbols dimensions do not match system");
    std::vector<double> out(static_cast<std::size_t>(slot.rows()), 0.0);
    for (int k = 0; k < params.users; ++k)
        for (int f = 0; f < slot.frames(); ++f)
            out[slot.pulse_row(k, f)] += params.amplitudes[k] * symbols.at(k, f);
    return out;
}

/// Matched-filter samples with their known noise level.
struct ReceivedSamples {
    std::vector<double> samples;
    double noise_std = 0.0;
};

inline ReceivedSamples add_awgn(const std::vector<double>& clean, double noise_std, Rng& rng) {
    if (noise_std < 0.0) throw std::invalid_argument("add_awgn: noise_std must be >= 0");
    ReceivedSamples r;
    r.noise_std = noise_std;
    r.samples.resize(clean.size());
    for (std::size_t i = 0; i < clean.size(); ++i)
        r.samples[i] = clean[i] + noise_std * rng.gaussian();
    return r;
}

/// Collision designating vector w_k: flags[f] = 1 iff another user shares
/// user k's slot in frame f.
inline std::vector<std::uint8_t> collision_vector(const SlotMatrix& slot, int user) {
    if (user < 0 || user >= slot.users())
        throw std::out_of_range("collision_vector: user index out of range");
    std::vector<std::uint8_t> flags(static_cast<std::size_t>(slot.frames()));
    for (int f = 0; f < slot.frames(); ++f)
        flags[f] = slot.row_weight(slot.pulse_row(user, f)) >= 2 ? 1 : 0;
    return flags;
}

/// Noise standard deviation for a target Eb/N0 in dB. Each info bit spends
/// n/k unit-energy pulses of the given amplitude, so Eb = A^2 * n / k, and
/// sigma^2 = N0/2.
inline double noise_std_from_ebn0(double ebn0_db, double amplitude, int n, int k) {
    if (k < 1 || n < k) throw std::invalid_argument("noise_std_from_ebn0: need n >= k >= 1");
    if (!(amplitude > 0.0)) throw std::invalid_argument("noise_std_from_ebn0: amplitude must be positive");
    const double ebn0 = std::pow(10.0, ebn0_db / 10.0);
    return amplitude * std::sqrt(static_cast<double>(n) / k / (2.0 * ebn0));
}

} // namespace imud
