// Command-line front end: profile diagnostics, exact return-probability
// tables, reproducible replica batches, and the claim verification report.
//
// Exit codes: 0 all pass/trend, 1 at least one claim failed, 2 usage or
// configuration error.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aniwalk/aniwalk.hpp"

namespace fs = std::filesystem;
using namespace aniwalk;

namespace {

struct Options {
    std::string profile_path;
    std::string n_grid;
    long long replicas = 2000;
    std::uint64_t seed = 1;
    std::string level_cap = "AUTO";
    std::string sites;
    std::string engine = "direct";
    std::string out_dir = ".";
    std::string format = "json";
};

std::vector<long long> parse_grid(const std::string& s) {
    std::vector<long long> grid;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        grid.push_back(std::stoll(tok));
    }
    if (grid.empty()) throw std::invalid_argument("empty --n-grid");
    return grid;
}

// "(0,0);(0,1)" -> sites
std::vector<Site> parse_sites(const std::string& s) {
    std::vector<Site> sites;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ';')) {
        long long x = 0, y = 0;
        if (std::sscanf(tok.c_str(), " ( %lld , %lld )", &x, &y) != 2)
            throw std::invalid_argument("bad site syntax: '" + tok + "' (want \"(x,y)\")");
        sites.push_back({x, y});
    }
    return sites;
}

std::optional<int> parse_level_cap(const std::string& s) {
    if (s == "AUTO" || s == "auto") return std::nullopt;
    const int cap = std::stoi(s);
    if (cap < 1) throw std::invalid_argument("--level-cap must be AUTO or >= 1");
    return cap;
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string join_args(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

void print_diagnostics(const StepProfile& prof, const ProfileDiagnostics& d,
                       const std::string& format) {
    if (format == "json") {
        nlohmann::json j;
        j["profile"] = profile_to_json(prof);
        j["gamma"] = d.gamma;
        j["gamma_star"] = d.gamma_star;
        j["sigma"] = d.sigma;
        j["mu_local_limit"] = d.mu_local_limit;
        j["omega"] = d.omega;
        j["eta_estimate"] = d.eta_estimate;
        j["kappa"] = d.kappa_seq;
        j["beta"] = d.beta_seq;
        j["warnings"] = d.warnings;
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::cout << "gamma       = " << fmt_double(d.gamma) << '\n'
              << "gamma_star  = " << fmt_double(d.gamma_star) << '\n'
              << "sigma       = " << fmt_double(d.sigma) << '\n'
              << "mu          = " << fmt_double(d.mu_local_limit) << '\n'
              << "omega       = " << fmt_double(d.omega) << '\n'
              << "eta_hat     = " << fmt_double(d.eta_estimate) << '\n';
    std::cout << "kappa[1..8] =";
    for (std::size_t i = 0; i < d.kappa_seq.size() && i < 8; ++i)
        std::cout << ' ' << fmt_double(d.kappa_seq[i]);
    std::cout << "\nbeta[1..8]  =";
    for (std::size_t i = 0; i < d.beta_seq.size() && i < 8; ++i)
        std::cout << ' ' << fmt_double(d.beta_seq[i]);
    std::cout << '\n';
    for (const auto& w : d.warnings) std::cout << "warning: " << w << '\n';
}

int cmd_profile_info(const Options& opt) {
    const StepProfile prof = load_profile(opt.profile_path);
    print_diagnostics(prof, diagnostics(prof), opt.format);
    return 0;
}

// The N column of exact_returns.csv is the raw step count: odd rows carry
// probability 0 by parity. The half-step grids of the analysis checks are
// derived from the even entries.
int cmd_exact(const Options& opt, const std::string& command) {
    const StepProfile prof = load_profile(opt.profile_path);
    if (opt.n_grid.empty()) throw std::invalid_argument("exact needs --n-grid");
    std::vector<long long> grid = parse_grid(opt.n_grid);
    long long n_max = 0;
    for (long long n : grid) {
        if (n < 0) throw std::invalid_argument("--n-grid entries must be >= 0");
        n_max = std::max(n_max, n);
    }
    const auto cap = parse_level_cap(opt.level_cap);
    const double gamma = gamma_of(prof);
    const double p0 = prof.p_at(0);
    const double scale = 4.0 * p0 * std::numbers::pi * std::sqrt(gamma - 1.0);  // NaN if gamma < 1

    const ReturnSequence seq = return_prob_sequence(prof, n_max + (n_max & 1), cap);
    std::vector<ExactReturnRow> rows;
    rows.reserve(grid.size());
    for (long long n : grid) {
        ExactReturnRow row;
        row.n = n;
        row.prob = (n & 1) ? 0.0 : seq.prob[static_cast<std::size_t>(n / 2)];
        row.ratio_to_theory = gamma > 1.0 && n >= 2 && !(n & 1)
                                  ? row.prob * scale * double(n) / 2.0
                                  : std::numeric_limits<double>::quiet_NaN();
        row.trunc_loss = seq.loss[static_cast<std::size_t>(n / 2)];
        rows.push_back(row);
    }

    fs::create_directories(opt.out_dir);
    const fs::path dir(opt.out_dir);
    write_exact_returns_csv((dir / "exact_returns.csv").string(), rows);
    write_green_csv((dir / "green_function.csv").string(), green_from_returns(seq.prob, p0, gamma));

    std::vector<VerificationReport> reports;
    if (gamma > 1.0) {
        std::vector<long long> half_grid;
        for (long long n : grid)
            if (n >= 2 && !(n & 1)) half_grid.push_back(n / 2);
        std::sort(half_grid.begin(), half_grid.end());
        half_grid.erase(std::unique(half_grid.begin(), half_grid.end()), half_grid.end());
        if (!half_grid.empty()) reports.push_back(return_asymptotics_ratio(prof, half_grid, seq));
    }
    if (opt.format == "csv")
        write_reports_csv((dir / "report.csv").string(), reports);
    write_reports_json((dir / "report.json").string(), reports);

    nlohmann::json manifest;
    manifest["profile"] = profile_to_json(prof);
    manifest["n_grid"] = grid;
    manifest["level_cap"] = opt.level_cap;
    manifest["code_version"] = std::string(kVersion);
    manifest["command"] = command;
    manifest["outputs"] = {"exact_returns.csv", "green_function.csv", "report.json"};
    manifest["created_utc"] = utc_now();
    write_json((dir / "manifest.json").string(), manifest);

    std::cout << "wrote " << (dir / "exact_returns.csv").string() << " (" << rows.size()
              << " rows), green_function.csv, report.json\n";
    return 0;
}

int cmd_simulate(const Options& opt, const std::string& command) {
    const StepProfile prof = load_profile(opt.profile_path);
    if (opt.n_grid.empty()) throw std::invalid_argument("simulate needs --n-grid (step count)");
    const std::vector<long long> grid = parse_grid(opt.n_grid);
    const long long n_steps = *std::max_element(grid.begin(), grid.end());
    if (n_steps < 0) throw std::invalid_argument("step count must be >= 0");
    if (opt.replicas < 1) throw std::invalid_argument("--replicas must be >= 1");

    SimOptions sim_opts;
    if (!opt.sites.empty()) {
        sim_opts.mode = LocalTimeMode::Filtered;
        sim_opts.sites = parse_sites(opt.sites);
    } else {
        sim_opts.mode = LocalTimeMode::OriginOnly;
    }
    Engine engine;
    if (opt.engine == "direct")
        engine = Engine::Direct;
    else if (opt.engine == "embedding")
        engine = Engine::Embedding;
    else
        throw std::invalid_argument("--engine must be direct or embedding");

    const ReplicaBatch batch = run_replicas(prof, n_steps, opt.replicas, opt.seed, sim_opts, engine);

    fs::create_directories(opt.out_dir);
    const fs::path dir(opt.out_dir);
    write_replicas_csv((dir / "replicas.csv").string(), batch);
    write_json((dir / "manifest.json").string(),
               batch_manifest(batch, command, {"replicas.csv"}, utc_now()));
    std::cout << "wrote " << (dir / "replicas.csv").string() << " (" << batch.records.size()
              << " replicas)\n";
    return 0;
}

int cmd_verify(const Options& opt, const std::string& command) {
    const StepProfile prof = load_profile(opt.profile_path);
    const auto cap = parse_level_cap(opt.level_cap);
    const double gamma = gamma_of(prof);
    const long long replicas = std::max<long long>(2, opt.replicas);
    std::vector<VerificationReport> reports;
    std::vector<std::string> skipped;

    // Exact-sequence checks. The ratio checks normalize by constants that
    // only exist for gamma > 1; on degenerate profiles they are skipped, not
    // failed.
    std::vector<long long> t11_grid = {50, 100, 200, 400};
    if (!opt.n_grid.empty()) t11_grid = parse_grid(opt.n_grid);
    if (gamma > 1.0) {
        reports.push_back(return_asymptotics_ratio(prof, t11_grid, 0.05, cap));
        reports.push_back(vertical_local_limit_ratio(prof, {1000, 10000}, 0.05, cap));
    } else {
        skipped.push_back("return_probability_asymptotics: gamma <= 1 (GammaNotAboveOne)");
        skipped.push_back("vertical_origin_local_limit: gamma <= 1, ratio target undefined");
    }
    {
        const VerticalPmf vm = vertical_evolve(prof, 20000, cap);
        reports.push_back(parity_tail_sum_check(vm.origin_seq));
    }
    reports.push_back(uniform_decay_check(prof, {100, 1000, 10000}, cap));
    reports.push_back(clt_check(prof, {100, 1000, 10000}, 0.02, cap));

    // Monte Carlo checks.
    {
        std::vector<Site> sites = {{0, 1}};
        if (!opt.sites.empty()) {
            sites.clear();
            for (const Site& s : parse_sites(opt.sites))
                if (!(s.x == 0 && s.y == 0)) sites.push_back(s);
        }
        SimOptions sim_opts{LocalTimeMode::Filtered, sites};
        const ReplicaBatch batch =
            run_replicas(prof, 100000, replicas, opt.seed, sim_opts, Engine::Direct);
        reports.push_back(invariant_ratio_law(batch, sites));
    }
    if (gamma <= 1.0) {
        skipped.push_back("darling_kac_exponential_law: gamma <= 1, no log-growth Green function");
    } else {
        // Darling-Kac needs the exact Green function: closed form for the
        // isotropic walk, DP horizon otherwise (log-speed, trend only).
        const bool isotropic = prof.kind() == ProfileKind::Uniform && prof.values()[0] == 0.25;
        const std::vector<long long> n_grid =
            isotropic ? std::vector<long long>{10000, 1000000} : std::vector<long long>{400, 4000};
        const GreenFunction gf = isotropic ? green_function_isotropic(n_grid.back())
                                           : green_function(prof, n_grid.back(), cap);
        std::vector<DarlingKacSample> samples;
        for (long long n : n_grid) {
            DarlingKacSample s;
            s.n = n;
            s.g_n = gf.g[static_cast<std::size_t>(n / 2)];
            const ReplicaBatch batch = run_replicas(prof, n, replicas, opt.seed + 1,
                                                    {LocalTimeMode::OriginOnly, {}}, Engine::Direct);
            s.origin_lt.reserve(batch.records.size());
            for (const SimRecord& rec : batch.records)
                s.origin_lt.push_back(double(rec.origin_local_time));
            samples.push_back(std::move(s));
        }
        reports.push_back(darling_kac_check(prof, samples));
    }

    fs::create_directories(opt.out_dir);
    const fs::path dir(opt.out_dir);
    write_reports_json((dir / "report.json").string(), reports);
    if (opt.format == "csv") write_reports_csv((dir / "report.csv").string(), reports);

    nlohmann::json manifest;
    manifest["profile"] = profile_to_json(prof);
    manifest["replicas"] = replicas;
    manifest["base_seed"] = opt.seed;
    manifest["code_version"] = std::string(kVersion);
    manifest["command"] = command;
    manifest["created_utc"] = utc_now();
    write_json((dir / "manifest.json").string(), manifest);

    bool any_fail = false;
    for (const auto& rep : reports) {
        std::cout << rep.claim << ": " << verdict_name(rep.verdict);
        if (!rep.ratios.empty()) std::cout << " (last ratio " << fmt_double(rep.ratios.back()) << ")";
        else if (!rep.values.empty()) std::cout << " (last value " << fmt_double(rep.values.back()) << ")";
        std::cout << '\n';
        if (rep.verdict == Verdict::Fail) any_fail = true;
    }
    for (const auto& s : skipped) std::cout << "skipped " << s << '\n';
    std::cout << "report: " << (dir / "report.json").string() << '\n';
    return any_fail ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anisotropic lattice walk: exact distributions, Monte Carlo, claim verification"};
    app.require_subcommand(1);

    Options opt;
    const std::string command = join_args(argc, argv);

    auto add_common = [&](CLI::App* sub, bool needs_profile = true) {
        auto* p = sub->add_option("--profile", opt.profile_path, "profile config JSON");
        if (needs_profile) p->required();
        sub->add_option("--n-grid", opt.n_grid, "comma-separated step/N grid");
        sub->add_option("--replicas", opt.replicas, "Monte Carlo replica count");
        sub->add_option("--seed", opt.seed, "base seed");
        sub->add_option("--level-cap", opt.level_cap, "level truncation cap: AUTO or integer");
        sub->add_option("--sites", opt.sites, "local-time site filter, e.g. \"(0,0);(0,1)\"");
        sub->add_option("--engine", opt.engine, "direct|embedding");
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option("--format", opt.format, "csv|json");
    };

    auto* info = app.add_subcommand("profile-info", "validate a profile and print diagnostics");
    add_common(info);
    auto* exact = app.add_subcommand("exact", "exact return probabilities over an N grid");
    add_common(exact);
    auto* simulate = app.add_subcommand("simulate", "run a replica batch");
    add_common(simulate);
    auto* verify = app.add_subcommand("verify", "run all claim checks and write report.json");
    add_common(verify);

    try {
        app.parse(argc, argv);
        if (info->parsed()) return cmd_profile_info(opt);
        if (exact->parsed()) return cmd_exact(opt, command);
        if (simulate->parsed()) return cmd_simulate(opt, command);
        if (verify->parsed()) return cmd_verify(opt, command);
        return 2;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const CapTooSmall& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
