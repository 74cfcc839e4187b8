#pragma once

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "imud/capacity.hpp"
#include "imud/sim.hpp"

namespace imud {

/// Configuration or usage error: the CLI maps this to exit status 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct KeySpec {
    const char* key;
    const char* value_form;
    const char* help;
};

/// Every accepted configuration key. --help prints this table and the
/// parser rejects anything not in it.
inline const std::vector<KeySpec>& config_keys() {
    static const std::vector<KeySpec> keys = {
        {"system.users", "int", "number of users K (default 1)"},
        {"system.chips_per_frame", "int", "chips per frame Nc (default 20)"},
        {"system.frames", "int", "frames per symbol Nf; must equal the code length (default: from code)"},
        {"system.amplitude", "real", "per-pulse amplitude, same for all users (default 1.0)"},
        {"detector.kind", "id|fg3|cfg3|fp|br|map", "detector to simulate (required for sweeps)"},
        {"code.repetition", "int", "repetition order; 1 means uncoded single-frame (default: system.frames)"},
        {"code.alist", "path", "parity-check matrix in alist format (cfg3/map); excludes code.repetition"},
        {"sweep.ebn0_db", "list", "Eb/N0 grid in dB, e.g. 0:2:8 or 0,4,6 (required for sweeps)"},
        {"sweep.users", "list", "user-count grid (required for sweep-users)"},
        {"sweep.iterations", "list", "iteration-count grid (required for sweep-iterations)"},
        {"run.iterations", "int", "message-passing iterations per detection (default 8)"},
        {"run.min_errors", "int", "stop a point after this many bit errors (default 100)"},
        {"run.max_trials", "int", "hard trial cap per point (default 10000000)"},
        {"run.master_seed", "uint64", "master seed; every random draw derives from it (default 1)"},
        {"run.threads", "int", "worker threads, 0 = auto; falls back to IMPULSE_MUD_THREADS (default 0)"},
        {"capacity.nc", "list", "chips-per-frame grid for the capacity table (default 20)"},
        {"capacity.users", "list", "user-count grid for the capacity table (default 3)"},
        {"capacity.snr_db", "list", "per-pulse SNR grid in dB for the capacity table (default 0:2:20)"},
    };
    return keys;
}

inline bool is_known_key(const std::string& key) {
    for (const auto& k : config_keys())
        if (key == k.key) return true;
    return false;
}

/// Parses "start:step:stop" (inclusive within 1e-9 of the endpoint) or a
/// comma list or a single value.
inline std::vector<double> parse_range(const std::string& text, const std::string& key) {
    auto parse_num = [&](const std::string& s) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception&) {
            throw ConfigError("config: cannot parse number '" + s + "' in " + key);
        }
        if (pos != s.size()) throw ConfigError("config: trailing junk in number '" + s + "' in " + key);
        return v;
    };
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::istringstream in(text);
        std::string tok;
        while (std::getline(in, tok, ':')) parts.push_back(tok);
        if (parts.size() != 3) throw ConfigError("config: range '" + text + "' in " + key + " must be start:step:stop");
        const double start = parse_num(parts[0]);
        const double step = parse_num(parts[1]);
        const double stop = parse_num(parts[2]);
        if (step == 0.0) throw ConfigError("config: zero step in range for " + key);
        if ((stop - start) * step < 0.0) throw ConfigError("config: empty range for " + key);
        for (double v = start; (step > 0.0) ? (v <= stop + 1e-9) : (v >= stop - 1e-9); v += step) out.push_back(v);
        return out;
    }
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) out.push_back(parse_num(tok));
    if (out.empty()) throw ConfigError("config: empty value for " + key);
    return out;
}

inline std::vector<int> parse_int_list(const std::string& text, const std::string& key) {
    std::vector<int> out;
    for (double v : parse_range(text, key)) {
        const double r = std::round(v);
        if (std::abs(v - r) > 1e-9) throw ConfigError("config: " + key + " entries must be integers");
        out.push_back(static_cast<int>(r));
    }
    return out;
}

/// Flat key=value store with '#' comments. Unknown keys are rejected at
/// insertion, naming the source line.
class Config {
public:
    static Config from_text(const std::string& text, const std::string& source) {
        Config cfg;
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string trimmed = trim(line);
            if (trimmed.empty()) continue;
            const std::size_t eq = trimmed.find('=');
            if (eq == std::string::npos)
                throw ConfigError(source + ":" + std::to_string(lineno) + ": expected key=value, got '" + trimmed + "'");
            cfg.set(trim(trimmed.substr(0, eq)), trim(trimmed.substr(eq + 1)),
                    source + ":" + std::to_string(lineno));
        }
        return cfg;
    }

    static Config from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("config: cannot open file '" + path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        return from_text(buf.str(), path);
    }

    void set(const std::string& key, const std::string& value, const std::string& where = "override") {
        if (!is_known_key(key)) throw ConfigError(where + ": unknown config key '" + key + "'");
        if (value.empty()) throw ConfigError(where + ": empty value for '" + key + "'");
        values_[key] = value;
    }

    /// Applies a "key=value" override string.
    void apply_override(const std::string& kv) {
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("override '" + kv + "' must look like key=value");
        set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get_string(const std::string& key) const { return values_.at(key); }

    long long get_int(const std::string& key, long long fallback, long long min_value, long long max_value) const {
        if (!has(key)) return fallback;
        const std::string& s = values_.at(key);
        long long v = 0;
        std::size_t pos = 0;
        try {
            v = std::stoll(s, &pos);
        } catch (const std::exception&) {
            throw ConfigError("config: cannot parse integer '" + s + "' for " + key);
        }
        if (pos != s.size()) throw ConfigError("config: trailing junk in integer '" + s + "' for " + key);
        if (v < min_value || v > max_value)
            throw ConfigError("config: " + key + "=" + s + " outside [" + std::to_string(min_value) + ", " +
                              std::to_string(max_value) + "]");
        return v;
    }

    double get_double(const std::string& key, double fallback) const {
        if (!has(key)) return fallback;
        const auto list = parse_range(values_.at(key), key);
        if (list.size() != 1) throw ConfigError("config: " + key + " must be a single value");
        return list.front();
    }

    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
        if (!has(key)) return fallback;
        const std::string& s = values_.at(key);
        try {
            std::size_t pos = 0;
            const std::uint64_t v = std::stoull(s, &pos);
            if (pos != s.size()) throw std::invalid_argument("junk");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("config: cannot parse unsigned integer '" + s + "' for " + key);
        }
    }

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return "";
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    std::map<std::string, std::string> values_;
};

inline DetectorKind parse_detector(const std::string& name) {
    if (name == "id") return DetectorKind::Id;
    if (name == "fg3") return DetectorKind::Fg3;
    if (name == "cfg3") return DetectorKind::Cfg3;
    if (name == "fp") return DetectorKind::Fp;
    if (name == "br") return DetectorKind::Br;
    if (name == "map") return DetectorKind::Map;
    throw ConfigError("config: unknown detector.kind '" + name + "' (expected id, fg3, cfg3, fp, br or map)");
}

inline std::string file_stem(const std::string& path) {
    std::size_t slash = path.find_last_of("/\\");
    std::string name = (slash == std::string::npos) ? path : path.substr(slash + 1);
    const std::size_t dot = name.find_last_of('.');
    if (dot != std::string::npos && dot > 0) name.erase(dot);
    return name;
}

inline LinearCode load_alist_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: missing alist file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return load_alist(buf.str(), file_stem(path));
    } catch (const std::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

/// Grid a sweep subcommand must provide.
enum class SweepAxis { Ebn0, Users, Iterations };

/// Builds a validated experiment from the parsed configuration.
inline ExperimentConfig build_experiment(const Config& cfg, SweepAxis axis) {
    if (cfg.has("code.repetition") && cfg.has("code.alist"))
        throw ConfigError("config: code.repetition and code.alist are mutually exclusive");

    LinearCode code;
    if (cfg.has("code.alist")) {
        code = load_alist_file(cfg.get_string("code.alist"));
    } else {
        long long rep = cfg.get_int("code.repetition", 0, 1, 1'000'000);
        if (rep == 0) rep = cfg.get_int("system.frames", 3, 1, 1'000'000);
        code = rep == 1 ? trivial_code() : repetition_code(static_cast<int>(rep));
    }
    const long long frames = cfg.get_int("system.frames", code.n, 1, 1'000'000);
    if (frames != code.n)
        throw ConfigError("config: system.frames=" + std::to_string(frames) + " does not match the code length n=" +
                          std::to_string(code.n));

    ExperimentConfig exp;
    exp.code = std::move(code);
    exp.encoder = systematic_generator(exp.code);
    exp.params = SystemParams::uniform(static_cast<int>(cfg.get_int("system.users", 1, 1, 100'000)),
                                       static_cast<int>(cfg.get_int("system.chips_per_frame", 20, 1, 1'000'000)),
                                       exp.code.n, cfg.get_double("system.amplitude", 1.0));
    if (!cfg.has("detector.kind")) throw ConfigError("config: detector.kind is required for sweeps");
    exp.detector = parse_detector(cfg.get_string("detector.kind"));

    if (!cfg.has("sweep.ebn0_db")) throw ConfigError("config: sweep.ebn0_db is required");
    exp.ebn0_db_grid = parse_range(cfg.get_string("sweep.ebn0_db"), "sweep.ebn0_db");
    if (cfg.has("sweep.users")) exp.users_grid = parse_int_list(cfg.get_string("sweep.users"), "sweep.users");
    if (cfg.has("sweep.iterations"))
        exp.iterations_grid = parse_int_list(cfg.get_string("sweep.iterations"), "sweep.iterations");
    if (axis == SweepAxis::Users && exp.users_grid.empty())
        throw ConfigError("config: sweep.users is required for sweep-users");
    if (axis == SweepAxis::Iterations && exp.iterations_grid.empty())
        throw ConfigError("config: sweep.iterations is required for sweep-iterations");

    exp.iterations = static_cast<int>(cfg.get_int("run.iterations", 8, 1, 100'000));
    exp.stop.min_errors = cfg.get_int("run.min_errors", 100, 1, 1'000'000'000);
    exp.stop.max_trials = cfg.get_int("run.max_trials", 10'000'000, 1, 1'000'000'000'000LL);
    exp.master_seed = cfg.get_u64("run.master_seed", 1);

    if (cfg.has("run.threads")) {
        exp.threads = static_cast<int>(cfg.get_int("run.threads", 0, 0, 4096));
    } else if (const char* env = std::getenv("IMPULSE_MUD_THREADS")) {
        try {
            exp.threads = std::stoi(env);
        } catch (const std::exception&) {
            throw ConfigError("IMPULSE_MUD_THREADS: cannot parse '" + std::string(env) + "'");
        }
        if (exp.threads < 0) throw ConfigError("IMPULSE_MUD_THREADS must be >= 0");
    }

    try {
        exp.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return exp;
}

/// Capacity table, one row per (nc, users, snr) combination. Columns:
/// nc,k_users,snr_db,e,c_hard,c_soft,c_high_snr.
inline std::string capacity_csv(const std::vector<int>& ncs, const std::vector<int>& users,
                                const std::vector<double>& snr_dbs) {
    std::ostringstream out;
    out << "nc,k_users,snr_db,e,c_hard,c_soft,c_high_snr\n";
    char buf[200];
    for (int nc : ncs) {
        for (int u : users) {
            const double e = erasure_probability(nc, u);
            const double high = capacity_high_snr(nc, u);
            for (double snr_db : snr_dbs) {
                const double snr = std::pow(10.0, snr_db / 10.0);
                const double mu = q_function(std::sqrt(snr));
                const double chard = capacity_hard(mu, e);
                const double csoft = capacity_soft(e, snr);
                std::snprintf(buf, sizeof buf, "%d,%d,%g,%.6g,%.6g,%.6g,%.6g\n", nc, u, snr_db, e, chard, csoft, high);
                out << buf;
            }
        }
    }
    return out.str();
}

inline std::string capacity_csv_from_config(const Config& cfg) {
    const std::vector<int> ncs =
        cfg.has("capacity.nc") ? parse_int_list(cfg.get_string("capacity.nc"), "capacity.nc") : std::vector<int>{20};
    const std::vector<int> users = cfg.has("capacity.users")
                                       ? parse_int_list(cfg.get_string("capacity.users"), "capacity.users")
                                       : std::vector<int>{3};
    std::vector<double> snrs{0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
    if (cfg.has("capacity.snr_db")) snrs = parse_range(cfg.get_string("capacity.snr_db"), "capacity.snr_db");
    for (int nc : ncs)
        if (nc < 1) throw ConfigError("config: capacity.nc entries must be >= 1");
    for (int u : users)
        if (u < 1) throw ConfigError("config: capacity.users entries must be >= 1");
    return capacity_csv(ncs, users, snrs);
}

/// Human-readable summary of a parity-check code, used by `code-info`.
inline std::string code_info_text(const LinearCode& code) {
    std::ostringstream out;
    int min_row = code.n, max_row = 0, edges = 0;
    for (int r = 0; r < code.h.rows(); ++r) {
        const int w = code.h.row_weight(r);
        min_row = std::min(min_row, w);
        max_row = std::max(max_row, w);
        edges += w;
    }
    int min_col = code.h.rows(), max_col = 0;
    for (int c = 0; c < code.n; ++c) {
        const int w = code.h.col_weight(c);
        min_col = std::min(min_col, w);
        max_col = std::max(max_col, w);
    }
    out << "id: " << code.id << '\n';
    out << "n: " << code.n << '\n';
    out << "k: " << code.k << '\n';
    char rate[32];
    std::snprintf(rate, sizeof rate, "%.4f", static_cast<double>(code.k) / code.n);
    out << "rate: " << rate << '\n';
    out << "checks: " << code.h.rows() << '\n';
    out << "ones: " << edges << '\n';
    if (code.h.rows() > 0) {
        out << "row_weight: " << min_row << ".." << max_row << '\n';
        out << "col_weight: " << min_col << ".." << max_col << '\n';
    }
    out << "repetition: " << (code.is_repetition() ? "yes" : "no") << '\n';
    return out.str();
}

} // namespace imud
