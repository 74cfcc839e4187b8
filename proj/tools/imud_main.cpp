// impulse-mud command line front end: Monte Carlo BER sweeps, capacity
// tables and alist utilities. Data goes to --output (default stdout),
// diagnostics to stderr. Exit status: 0 ok, 1 configuration error,
// 2 runtime error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "imud/imud.hpp"

namespace {

std::string key_reference() {
    std::ostringstream out;
    out << "Configuration keys (config file lines and --set overrides):\n";
    for (const auto& k : imud::config_keys()) {
        out << "  " << k.key;
        for (std::size_t i = std::string(k.key).size(); i < 26; ++i) out << ' ';
        out << "<" << k.value_form << ">  " << k.help << '\n';
    }
    out << "Config files are flat key=value lines; '#' starts a comment.";
    return out.str();
}

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string output_path;
};

void add_common(CLI::App* sub, CommonOpts& opts) {
    sub->add_option("-c,--config", opts.config_path, "config file (key=value lines)");
    sub->add_option("-s,--set", opts.overrides, "override a config key, e.g. --set run.master_seed=7");
    sub->add_option("-o,--output", opts.output_path, "write data to this file instead of stdout");
    sub->footer(key_reference());
}

imud::Config gather_config(const CommonOpts& opts) {
    imud::Config cfg;
    if (!opts.config_path.empty()) cfg = imud::Config::from_file(opts.config_path);
    for (const auto& kv : opts.overrides) cfg.apply_override(kv);
    return cfg;
}

void emit(const CommonOpts& opts, const std::string& data) {
    if (opts.output_path.empty()) {
        std::cout << data;
        return;
    }
    std::ofstream out(opts.output_path);
    if (!out) throw imud::ConfigError("cannot open output file '" + opts.output_path + "'");
    out << data;
}

int run_sweep_command(const CommonOpts& opts, imud::SweepAxis axis) {
    const imud::Config cfg = gather_config(opts);
    const imud::ExperimentConfig exp = imud::build_experiment(cfg, axis);
    const std::vector<imud::BerRecord> records = imud::run_sweep(exp);
    emit(opts, imud::write_csv(records));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"impulse-mud: multiuser time-hopping impulse-radio simulation"};
    app.require_subcommand(1);

    CommonOpts sweep_ebn0_opts, sweep_users_opts, sweep_iter_opts, capacity_opts, code_info_opts;

    auto* sweep_ebn0 = app.add_subcommand("sweep-ebn0", "BER versus Eb/N0 for one detector");
    add_common(sweep_ebn0, sweep_ebn0_opts);

    auto* sweep_users = app.add_subcommand("sweep-users", "BER versus number of users");
    add_common(sweep_users, sweep_users_opts);

    auto* sweep_iter = app.add_subcommand("sweep-iterations", "BER versus iteration count");
    add_common(sweep_iter, sweep_iter_opts);

    auto* capacity = app.add_subcommand("capacity", "analytic capacity table as CSV");
    add_common(capacity, capacity_opts);
    std::string cap_nc, cap_users, cap_snr;
    capacity->add_option("--nc", cap_nc, "shorthand for capacity.nc");
    capacity->add_option("--users", cap_users, "shorthand for capacity.users");
    capacity->add_option("--snr-db", cap_snr, "shorthand for capacity.snr_db");

    auto* code_info = app.add_subcommand("code-info", "print parameters of an alist code file");
    add_common(code_info, code_info_opts);
    std::string code_path;
    code_info->add_option("alist", code_path, "alist file to inspect");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1; // --help and --version are successes, usage errors are config errors
    }

    try {
        if (sweep_ebn0->parsed()) return run_sweep_command(sweep_ebn0_opts, imud::SweepAxis::Ebn0);
        if (sweep_users->parsed()) return run_sweep_command(sweep_users_opts, imud::SweepAxis::Users);
        if (sweep_iter->parsed()) return run_sweep_command(sweep_iter_opts, imud::SweepAxis::Iterations);
        if (capacity->parsed()) {
            imud::Config cfg = gather_config(capacity_opts);
            if (!cap_nc.empty()) cfg.set("capacity.nc", cap_nc);
            if (!cap_users.empty()) cfg.set("capacity.users", cap_users);
            if (!cap_snr.empty()) cfg.set("capacity.snr_db", cap_snr);
            emit(capacity_opts, imud::capacity_csv_from_config(cfg));
            return 0;
        }
        if (code_info->parsed()) {
            imud::Config cfg = gather_config(code_info_opts);
            if (!code_path.empty()) cfg.set("code.alist", code_path);
            if (!cfg.has("code.alist"))
                throw imud::ConfigError("code-info: give an alist path as argument or via code.alist");
            const imud::LinearCode code = imud::load_alist_file(cfg.get_string("code.alist"));
            emit(code_info_opts, imud::code_info_text(code));
            return 0;
        }
    } catch (const imud::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
