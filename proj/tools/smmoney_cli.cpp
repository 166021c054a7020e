// Copyright 2026 The smmoney Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line driver. Exit codes: 0 ok/accepted, 1 rejected or failing
// table row, 2 usage error, 3 I/O error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "smmoney/harness.hpp"

namespace {

using namespace smmoney;

constexpr int kExitOk = 0;
constexpr int kExitRejected = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

/// Flags shared by every subcommand. Unset flags leave the config untouched,
/// so flags override a --config file.
struct CommonFlags {
    std::string config_path;
    std::optional<int> n;
    std::optional<std::size_t> q, l_size, t_max, trials;
    std::optional<double> epsilon, delta;
    std::optional<std::string> scheme, strategy, out, format, click_rule;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;

    void attach(CLI::App* app) {
        app->add_option("--config", config_path, "JSON config file; flags override its keys");
        app->add_option("--n", n, "number of modes");
        app->add_option("--q", q, "copies per note");
        app->add_option("--l-size", l_size, "copies tested per verification |L|");
        app->add_option("--t-max", t_max, "copies consumable over the note lifetime T");
        app->add_option("--epsilon", epsilon, "verifier security factor");
        app->add_option("--delta", delta, "Bank cut-off");
        app->add_option("--scheme", scheme, "single_photon or coherent");
        app->add_option("--strategy", strategy, "forging strategy");
        app->add_option("--trials", trials, "Monte Carlo trials");
        app->add_option("--seed", seed, "master seed");
        app->add_option("--workers", workers, "worker threads");
        app->add_option("--out", out, "output path (stdout when omitted)");
        app->add_option("--format", format, "json or csv");
        app->add_option("--click-rule", click_rule, "coherent conclusive rule: at_least_two or exactly_two");
    }

    ExperimentConfig resolve() const {
        ExperimentConfig cfg;
        if (!config_path.empty()) {
            apply_config_json(cfg, parse_json(read_text_file(config_path), config_path));
        }
        if (n) cfg.params.n = *n;
        if (q) cfg.params.q = *q;
        if (l_size) cfg.params.l_size = *l_size;
        if (t_max) cfg.params.t_max = *t_max;
        if (epsilon) cfg.params.epsilon = *epsilon;
        if (delta) cfg.params.delta = *delta;
        if (scheme) cfg.scheme = *scheme;
        if (strategy) cfg.strategy = *strategy;
        if (trials) cfg.trials = *trials;
        if (seed) cfg.seed = *seed;
        if (workers) cfg.workers = *workers;
        if (out) cfg.out = *out;
        if (format) cfg.format = *format;
        if (click_rule) cfg.click_rule = parse_click_rule(*click_rule);
        return cfg;
    }
};

void emit(const ExperimentConfig& cfg, const std::string& text) {
    if (cfg.out.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
    } else {
        write_text_file(cfg.out, text);
    }
}

int cmd_prepare(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.out.empty()) throw ConfigError("prepare needs --out PREFIX");
    Rng rng(cfg.seed);
    const std::string note_path = cfg.out + ".note.json";
    const std::string secret_path = cfg.out + ".secret.json";
    if (cfg.scheme == "coherent") {
        auto prepared = prepare_note(cfg.params, CoherentBackend{cfg.click_rule}, rng);
        write_text_file(note_path, note_to_json(prepared.note, CoherentBackend::kName).dump(1) + "\n");
        write_text_file(secret_path, secret_to_json(prepared.secret, cfg.params, CoherentBackend::kName).dump(1) + "\n");
    } else {
        auto prepared = prepare_note(cfg.params, rng);
        write_text_file(note_path, note_to_json(prepared.note, SinglePhotonBackend::kName).dump(1) + "\n");
        write_text_file(secret_path,
                        secret_to_json(prepared.secret, cfg.params, SinglePhotonBackend::kName).dump(1) + "\n");
    }
    std::cout << note_path << '\n' << secret_path << '\n';
    return kExitOk;
}

struct VerifyFiles {
    std::string note;
    std::string secret;
    std::string report_in;
};

template <class Backend, class Note>
int verify_with(Backend backend, Note note, SecretFile secret, const VerifyFiles& files, const ExperimentConfig& cfg) {
    const SchemeParams& params = secret.params;
    Rng rng(derive_seed(cfg.seed, secret.secret.count));
    SessionResult session;
    if (!files.report_in.empty()) {
        // A report supplied from outside goes straight to the Bank.
        const std::string text = read_text_file(files.report_in);
        const auto line = text.substr(0, text.find('\n'));
        session.report = report_from_json(parse_json(line, files.report_in));
        session.reached_bank = true;
        try {
            session.verdict = bank_validate(secret.secret, session.report, params,
                                            backend.conclusive_probability(params.n));
        } catch (const ProtocolError& e) {
            std::cout << "bit 0 (malformed-report: " << e.what() << ")\n";
            return kExitRejected;
        }
    } else {
        session = verify_note(note, secret.secret, params, backend, rng);
        session.report.session_id = secret.secret.count;
        write_text_file(files.note, note_to_json(note, Backend::kName).dump(1) + "\n");
    }
    write_text_file(files.secret, secret_to_json(secret.secret, params, Backend::kName).dump(1) + "\n");
    if (!cfg.out.empty()) {
        std::string existing;
        try {
            existing = read_text_file(cfg.out);
        } catch (const IoError&) {
        }
        write_text_file(cfg.out, existing + report_to_json(session.report).dump() + "\n");
    }
    std::cout << "bit " << session.verdict.bit() << " (" << reason_name(session.verdict.reason) << ")\n";
    return session.verdict.accepted() ? kExitOk : kExitRejected;
}

int cmd_verify(const ExperimentConfig& cfg, const VerifyFiles& files) {
    if (files.note.empty() || files.secret.empty()) throw ConfigError("verify needs --note and --secret");
    SecretFile secret = secret_from_json(parse_json(read_text_file(files.secret), files.secret));
    const Json note_json = parse_json(read_text_file(files.note), files.note);
    if (secret.scheme == CoherentBackend::kName) {
        return verify_with(CoherentBackend{cfg.click_rule}, coherent_note_from_json(note_json), std::move(secret),
                           files, cfg);
    }
    return verify_with(SinglePhotonBackend{}, photon_note_from_json(note_json), std::move(secret), files, cfg);
}

int cmd_attack(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto strategy = make_strategy(cfg.strategy, cfg.params.n);
    const auto stats = simulate_forgery(strategy, cfg.params, cfg.trials, cfg.seed, cfg.workers);
    if (cfg.format == "csv") {
        emit(cfg, forgery_trials_csv(stats));
    } else {
        emit(cfg, forgery_to_json(stats, cfg.params, cfg.seed).dump(2));
    }
    return kExitOk;
}

int cmd_table(const ExperimentConfig& cfg, std::size_t attack_trials) {
    if (cfg.trials == 0) throw ConfigError("trials must be >= 1");
    TableOptions opt;
    opt.sm_runs = cfg.trials;
    opt.attack_trials = attack_trials;
    opt.seed = cfg.seed;
    opt.workers = cfg.workers;
    const auto rows = reproduction_table(opt);
    emit(cfg, cfg.format == "csv" ? rows_to_csv(rows) : rows_to_json(rows).dump(2));
    for (const auto& r : rows) {
        if (!r.pass()) return kExitRejected;
    }
    return kExitOk;
}

int cmd_fidelity(const ExperimentConfig& cfg, std::optional<int> n_max, int restarts) {
    const int lo = cfg.params.n;
    const int hi = n_max.value_or(lo);
    if (lo < 2 || hi < lo || hi > kMaxSolverModes) throw ConfigError("need 2 <= n <= n-max <= 20");
    SolverOptions opt;
    opt.restarts = restarts;
    opt.seed = cfg.seed;
    opt.max_choi_modes = 0;
    std::vector<FidelityResult> results;
    for (int n = lo; n <= hi; ++n) results.push_back(maximize_fidelity(n, opt));
    if (cfg.format == "csv") {
        std::ostringstream s;
        s << std::setprecision(12) << "n,F_bar_star,bound,dual_bound,gap,iterations,converged\n";
        for (const auto& r : results) {
            s << r.n << ',' << r.f_bar_star << ',' << r.bound() << ',' << r.dual_bound << ',' << r.gap << ','
              << r.iterations << ',' << (r.converged ? "true" : "false") << '\n';
        }
        emit(cfg, s.str());
    } else {
        Json arr = Json::array();
        for (const auto& r : results) arr.push_back(fidelity_to_json(r));
        emit(cfg, (results.size() == 1 ? arr[0] : arr).dump(2));
    }
    return kExitOk;
}

int cmd_sweep(const ExperimentConfig& cfg) {
    if (cfg.trials == 0) throw ConfigError("trials must be >= 1");
    const int hi = cfg.params.n;
    if (hi < 3 || hi > kMaxSolverModes) throw ConfigError("sweep runs n = 3..--n with --n in [3, 20]");
    const auto pts = sweep(3, hi, cfg.trials, cfg.seed, cfg.workers);
    emit(cfg, cfg.format == "csv" ? sweep_to_csv(pts) : sweep_to_json(pts).dump(2));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sampling-matching quantum money simulator"};
    app.require_subcommand(1);

    CommonFlags common;
    VerifyFiles files;
    std::size_t attack_trials = 200;
    std::optional<int> n_max;
    int restarts = 0;

    auto* prepare = app.add_subcommand("prepare", "mint a note and its Bank record");
    auto* verify = app.add_subcommand("verify", "run one verification session");
    auto* attack = app.add_subcommand("attack", "simulate a forging strategy");
    auto* table = app.add_subcommand("table", "reproduction table for n in {4, 8, 14}");
    auto* fidelity = app.add_subcommand("fidelity", "optimal cloning fidelity by semidefinite optimization");
    auto* sweep_cmd = app.add_subcommand("sweep", "plot-ready figures for n = 3..--n");
    for (auto* sub : {prepare, verify, attack, table, fidelity, sweep_cmd}) common.attach(sub);
    verify->add_option("--note", files.note, "note file")->required();
    verify->add_option("--secret", files.secret, "Bank record file")->required();
    verify->add_option("--report-in", files.report_in, "send this report to the Bank instead of measuring");
    table->add_option("--attack-trials", attack_trials, "forgery trials for the measure-and-resend rows");
    fidelity->add_option("--n-max", n_max, "solve every n from --n to --n-max");
    fidelity->add_option("--restarts", restarts, "extra runs from random feasible points");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        ExperimentConfig cfg = common.resolve();
        if (*prepare) return cmd_prepare(cfg);
        if (*verify) return cmd_verify(cfg, files);
        if (*attack) return cmd_attack(cfg);
        if (*table) return cmd_table(cfg, attack_trials);
        if (*fidelity) return cmd_fidelity(cfg, n_max, restarts);
        if (*sweep_cmd) return cmd_sweep(cfg);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const ProtocolError& e) {
        std::cerr << "rejected: " << e.what() << '\n';
        return kExitRejected;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
