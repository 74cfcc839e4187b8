#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "imud/channel.hpp"
#include "imud/code.hpp"
#include "imud/detectors.hpp"
#include "imud/rng.hpp"

namespace imud {

enum class DetectorKind { Id, Fg3, Cfg3, Fp, Br, Map };

inline const char* detector_name(DetectorKind d) {
    switch (d) {
        case DetectorKind::Id: return "id";
        case DetectorKind::Fg3: return "fg3";
        case DetectorKind::Cfg3: return "cfg3";
        case DetectorKind::Fp: return "fp";
        case DetectorKind::Br: return "br";
        case DetectorKind::Map: return "map";
    }
    return "?";
}

struct StopRule {
    long long min_errors = 100;
    long long max_trials = 10'000'000;
};

/// Full description of one Monte Carlo experiment. A point of the sweep is
/// a (users, iterations, ebn0_db) combination; absent grids fall back to
/// the scalar fields.
struct ExperimentConfig {
    SystemParams params;
    DetectorKind detector = DetectorKind::Fg3;
    LinearCode code;
    Encoder encoder;
    std::vector<double> ebn0_db_grid;
    std::vector<int> users_grid;      // optional
    std::vector<int> iterations_grid; // optional
    int iterations = 8;
    StopRule stop;
    std::uint64_t master_seed = 1;
    int threads = 0; // 0 = hardware concurrency

    void validate() const {
        params.validate();
        if (code.n != params.frames)
            throw std::invalid_argument("ExperimentConfig: code length must equal the frame count");
        if (encoder.n != code.n || encoder.k != code.k)
            throw std::invalid_argument("ExperimentConfig: encoder does not match the code");
        if (ebn0_db_grid.empty()) throw std::invalid_argument("ExperimentConfig: empty Eb/N0 grid");
        if (stop.min_errors < 1 || stop.max_trials < 1)
            throw std::invalid_argument("ExperimentConfig: stop rule bounds must be >= 1");
        if (iterations < 1) throw std::invalid_argument("ExperimentConfig: iterations must be >= 1");
        for (int it : iterations_grid)
            if (it < 1) throw std::invalid_argument("ExperimentConfig: iterations grid entries must be >= 1");
        int max_users = params.users;
        for (int u : users_grid) {
            if (u < 1) throw std::invalid_argument("ExperimentConfig: users grid entries must be >= 1");
            max_users = std::max(max_users, u);
        }
        if (!users_grid.empty()) {
            for (double a : params.amplitudes)
                if (a != params.amplitudes.front())
                    throw std::invalid_argument("ExperimentConfig: a users sweep requires equal amplitudes");
        }
        const bool repetition_only = detector == DetectorKind::Id || detector == DetectorKind::Fg3 ||
                                     detector == DetectorKind::Fp || detector == DetectorKind::Br;
        if (repetition_only && !code.is_repetition())
            throw std::invalid_argument(std::string("ExperimentConfig: the ") + detector_name(detector) +
                                        " detector requires repetition transmission, not code '" + code.id + "'");
        if (detector == DetectorKind::Map && max_users * code.k > 20)
            throw std::invalid_argument("ExperimentConfig: MAP oracle hypothesis count exceeds the 2^20 cap");
    }
};

/// One measured sweep point.
struct BerRecord {
    std::string detector;
    std::string code_id;
    int users = 0;
    int nc = 0;
    int n = 0;
    int k = 0;
    double ebn0_db = 0.0;
    int iterations = 0;
    long long trials = 0;
    long long bit_errors = 0;
    double ber = 0.0;
    long long frame_errors = 0;
    std::uint64_t seed = 0;
    double wall_time_s = 0.0;
};

struct GridPoint {
    int index = 0;
    int users = 0;
    int iterations = 0;
    double ebn0_db = 0.0;
};

inline std::vector<GridPoint> enumerate_grid(const ExperimentConfig& cfg) {
    const std::vector<int> users = cfg.users_grid.empty() ? std::vector<int>{cfg.params.users} : cfg.users_grid;
    const std::vector<int> iters = cfg.iterations_grid.empty() ? std::vector<int>{cfg.iterations} : cfg.iterations_grid;
    std::vector<GridPoint> points;
    int index = 0;
    for (int u : users)
        for (int it : iters)
            for (double e : cfg.ebn0_db_grid) points.push_back(GridPoint{index++, u, it, e});
    return points;
}

namespace detail {

struct TrialOutcome {
    int bit_errors = 0;
    int frame_errors = 0;
};

inline SystemParams params_for_users(const SystemParams& base, int users) {
    if (users == base.users) return base;
    return SystemParams::uniform(users, base.chips_per_frame, base.frames, base.amplitudes.front());
}

/// One independent trial: fresh hopping pattern, fresh information bits,
/// transmit, add noise, detect, count information-bit errors.
inline TrialOutcome run_trial(const ExperimentConfig& cfg, const SystemParams& params, const GridPoint& point,
                              std::uint64_t stream_seed) {
    Rng rng(stream_seed);
    const LinearCode& code = cfg.code;
    const int users = params.users;
    const int nf = params.frames;

    const HoppingPattern pattern = generate_hopping(params, rng);
    const SlotMatrix slot(pattern, params);

    std::vector<std::vector<std::uint8_t>> info(static_cast<std::size_t>(users));
    Symbols sym = Symbols::zeros(users, nf);
    for (int k = 0; k < users; ++k) {
        auto& word = info[static_cast<std::size_t>(k)];
        word.resize(static_cast<std::size_t>(code.k));
        for (auto& b : word) b = rng.coin() ? 1 : 0;
        const std::vector<std::uint8_t> coded = encode(cfg.encoder, word);
        for (int j = 0; j < nf; ++j) sym.at(k, j) = coded[static_cast<std::size_t>(j)] ? -1 : 1;
    }

    const std::vector<double> clean = transmit(slot, params, sym);
    const double sigma = noise_std_from_ebn0(point.ebn0_db, params.amplitudes.front(), code.n, code.k);
    const ReceivedSamples received = add_awgn(clean, sigma, rng);

    DetectionResult det;
    switch (cfg.detector) {
        case DetectorKind::Fg3:
            det = detect_fg3(DetectorGraph(slot, params), received, point.iterations);
            break;
        case DetectorKind::Id:
            det = detect_id(DetectorGraph(slot, params), received, point.iterations);
            break;
        case DetectorKind::Fp:
            det = detect_fp(DetectorGraph(slot, params), received, point.iterations);
            break;
        case DetectorKind::Cfg3:
            det = detect_cfg3(DetectorGraph(slot, params, code), received, cfg.encoder, point.iterations);
            break;
        case DetectorKind::Map:
            det = detect_map_oracle(received, slot, params, code, sigma);
            break;
        case DetectorKind::Br: {
            det.decisions.resize(static_cast<std::size_t>(users));
            for (int k = 0; k < users; ++k) {
                const BlinkingDecision d = detect_blinking(received, slot, params, k);
                det.decisions[static_cast<std::size_t>(k)] = {static_cast<std::uint8_t>(d.symbol > 0 ? 0 : 1)};
            }
            break;
        }
    }

    TrialOutcome out;
    for (int k = 0; k < users; ++k) {
        const auto& truth = info[static_cast<std::size_t>(k)];
        const auto& got = det.decisions[static_cast<std::size_t>(k)];
        int errs = 0;
        for (std::size_t t = 0; t < truth.size(); ++t) errs += truth[t] != got[t];
        out.bit_errors += errs;
        out.frame_errors += errs > 0;
    }
    return out;
}

} // namespace detail

/// Runs one grid point until the stop rule is met. Trials are evaluated in
/// fixed-size batches that may execute on several threads; the stop
/// decision scans outcomes in trial order, so the record is identical for
/// any thread count.
inline BerRecord run_point(const ExperimentConfig& cfg, const GridPoint& point) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const SystemParams params = detail::params_for_users(cfg.params, point.users);

    int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    constexpr long long kBatch = 1024;

    long long trials = 0, bit_errors = 0, frame_errors = 0;
    bool done = false;
    std::vector<detail::TrialOutcome> outcomes;
    for (long long base = 0; base < cfg.stop.max_trials && !done; base += kBatch) {
        const long long count = std::min(kBatch, cfg.stop.max_trials - base);
        outcomes.assign(static_cast<std::size_t>(count), {});
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto worker = [&](int tid) {
            try {
                for (long long i = tid; i < count; i += threads)
                    outcomes[static_cast<std::size_t>(i)] = detail::run_trial(
                        cfg, params, point,
                        derive_seed(cfg.master_seed, static_cast<std::uint64_t>(point.index),
                                    static_cast<std::uint64_t>(base + i)));
            } catch (...) {
                const std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        };
        if (threads == 1 || count == 1) {
            worker(0);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(threads));
            for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
            for (auto& th : pool) th.join();
        }
        if (failure) {
            try {
                std::rethrow_exception(failure);
            } catch (const std::exception& e) {
                throw std::runtime_error("point " + std::to_string(point.index) + " (K=" +
                                         std::to_string(point.users) + ", Eb/N0=" + std::to_string(point.ebn0_db) +
                                         " dB): " + e.what());
            }
        }
        for (const auto& o : outcomes) {
            ++trials;
            bit_errors += o.bit_errors;
            frame_errors += o.frame_errors;
            if (bit_errors >= cfg.stop.min_errors || trials >= cfg.stop.max_trials) {
                done = true;
                break;
            }
        }
    }

    BerRecord rec;
    rec.detector = detector_name(cfg.detector);
    rec.code_id = cfg.code.id;
    rec.users = params.users;
    rec.nc = params.chips_per_frame;
    rec.n = cfg.code.n;
    rec.k = cfg.code.k;
    rec.ebn0_db = point.ebn0_db;
    rec.iterations = point.iterations;
    rec.trials = trials;
    rec.bit_errors = bit_errors;
    rec.ber = static_cast<double>(bit_errors) / (static_cast<double>(trials) * params.users * cfg.code.k);
    rec.frame_errors = frame_errors;
    rec.seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(point.index));
    rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

/// Runs every grid point in grid order.
inline std::vector<BerRecord> run_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<BerRecord> records;
    for (const GridPoint& p : enumerate_grid(cfg)) records.push_back(run_point(cfg, p));
    return records;
}

inline const char* csv_header() {
    return "detector,code,K,Nc,n,k,ebn0_db,iterations,trials,bit_errors,ber,frame_errors,seed,wall_time_s";
}

inline std::string write_csv(const std::vector<BerRecord>& records) {
    std::ostringstream out;
    out << csv_header() << '\n';
    char buf[160];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%g,%d,%lld,%lld,%.6g,%lld,%llu,%.3f", r.ebn0_db, r.iterations, r.trials,
                      r.bit_errors, r.ber, r.frame_errors, static_cast<unsigned long long>(r.seed), r.wall_time_s);
        out << r.detector << ',' << r.code_id << ',' << r.users << ',' << r.nc << ',' << r.n << ',' << r.k << ','
            << buf << '\n';
    }
    return out.str();
}

} // namespace imud
