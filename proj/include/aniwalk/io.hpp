#pragma once

// File formats: profile configs (JSON), verification reports (JSON or
// flattened CSV), bulk numeric tables (CSV), and the batch manifest that
// makes every simulation output reproducible. All floats are written in
// shortest round-trip decimal form.

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "aniwalk/analysis.hpp"
#include "aniwalk/exact.hpp"
#include "aniwalk/profile.hpp"
#include "aniwalk/simulate.hpp"

namespace aniwalk {

inline constexpr std::string_view kVersion = "0.1.0";

inline std::string fmt_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// ---- profile config (JSON) ----

inline nlohmann::json profile_to_json(const StepProfile& prof) {
    nlohmann::json j;
    switch (prof.kind()) {
        case ProfileKind::Uniform:
            j["kind"] = "uniform";
            j["p"] = prof.values()[0];
            break;
        case ProfileKind::Periodic:
            j["kind"] = "periodic";
            j["p"] = prof.values();
            break;
        case ProfileKind::Table:
        default:
            j["kind"] = "table";
            j["window_min"] = prof.window_min();
            j["values"] = prof.values();
            j["tail_pos"] = prof.tail_pos();
            j["tail_neg"] = prof.tail_neg();
            break;
    }
    j["omega"] = prof.omega();
    return j;
}

inline StepProfile profile_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw ProfileError("profile config must be an object with a \"kind\" field");
    const std::string kind = j.at("kind").get<std::string>();
    std::optional<double> omega;
    if (j.contains("omega")) omega = j.at("omega").get<double>();
    if (kind == "uniform") return StepProfile::uniform(j.at("p").get<double>(), omega);
    if (kind == "periodic")
        return StepProfile::periodic(j.at("p").get<std::vector<double>>(), omega);
    if (kind == "table")
        return StepProfile::table(j.at("window_min").get<long long>(),
                                  j.at("values").get<std::vector<double>>(),
                                  j.at("tail_pos").get<double>(), j.at("tail_neg").get<double>(),
                                  omega);
    throw ProfileError("unknown profile kind: " + kind);
}

inline StepProfile load_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open profile file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ProfileError("malformed profile JSON in " + path + ": " + e.what());
    }
    return profile_from_json(j);
}

// ---- verification reports ----

inline nlohmann::json report_to_json(const VerificationReport& rep) {
    nlohmann::json j;
    j["claim"] = rep.claim;
    j["constant"] = rep.constant;
    j["grid"] = rep.grid;
    j["values"] = rep.values;
    j["ratios"] = rep.ratios;
    j["tolerance"] = rep.tolerance;
    j["verdict"] = verdict_name(rep.verdict);
    j["provenance"] = rep.provenance;
    if (!rep.ci_lo.empty()) {
        j["ci_lo"] = rep.ci_lo;
        j["ci_hi"] = rep.ci_hi;
    }
    if (!rep.notes.empty()) j["notes"] = rep.notes;
    return j;
}

inline void write_reports_json(const std::string& path, const std::vector<VerificationReport>& reps) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& rep : reps) arr.push_back(report_to_json(rep));
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << arr.dump(2) << '\n';
}

// One row per grid point; list fields that are shorter than the grid leave
// their cells empty.
inline void write_reports_csv(const std::string& path, const std::vector<VerificationReport>& reps) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "claim,constant,grid,value,ratio,ci_lo,ci_hi,tolerance,verdict,provenance\n";
    for (const auto& rep : reps) {
        for (std::size_t i = 0; i < rep.grid.size(); ++i) {
            const auto cell = [&](const std::vector<double>& v) {
                return i < v.size() ? fmt_double(v[i]) : std::string();
            };
            out << rep.claim << ',' << fmt_double(rep.constant) << ',' << cell(rep.grid) << ','
                << cell(rep.values) << ',' << cell(rep.ratios) << ',' << cell(rep.ci_lo) << ','
                << cell(rep.ci_hi) << ',' << fmt_double(rep.tolerance) << ','
                << verdict_name(rep.verdict) << ',' << rep.provenance << '\n';
        }
    }
}

// ---- bulk numeric tables (CSV) ----

struct ExactReturnRow {
    long long n = 0;  // N, i.e. half the step count
    double prob = 0.0;
    double ratio_to_theory = 0.0;
    double trunc_loss = 0.0;
};

inline void write_exact_returns_csv(const std::string& path,
                                    const std::vector<ExactReturnRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "N,prob,ratio_to_theory,trunc_loss\n";
    for (const auto& r : rows)
        out << r.n << ',' << fmt_double(r.prob) << ',' << fmt_double(r.ratio_to_theory) << ','
            << fmt_double(r.trunc_loss) << '\n';
}

inline void write_green_csv(const std::string& path, const GreenFunction& gf) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "N,g,normalized\n";
    for (std::size_t r = 0; r < gf.g.size(); ++r)
        out << 2 * r << ',' << fmt_double(gf.g[r]) << ',' << fmt_double(gf.normalized[r]) << '\n';
}

inline void write_replicas_csv(const std::string& path, const ReplicaBatch& batch) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "replica,seed,final_x,final_y,h_n,v_n,lt_origin";
    const std::size_t n_sites =
        batch.options.mode == LocalTimeMode::Filtered ? batch.options.sites.size() : 0;
    for (std::size_t i = 0; i < n_sites; ++i) out << ",lt_site_" << i;
    out << '\n';
    for (std::size_t r = 0; r < batch.records.size(); ++r) {
        const SimRecord& rec = batch.records[r];
        out << r << ',' << rec.seed << ',' << rec.final.x << ',' << rec.final.y << ',' << rec.h_n
            << ',' << rec.v_n << ',' << rec.origin_local_time;
        for (std::size_t i = 0; i < n_sites; ++i) out << ',' << rec.local_time[i].second;
        out << '\n';
    }
}

// The manifest carries everything needed to regenerate the batch outputs
// byte for byte; the timestamp lives here and only here.
inline nlohmann::json batch_manifest(const ReplicaBatch& batch, const std::string& command,
                                     const std::vector<std::string>& outputs,
                                     const std::string& timestamp_utc) {
    nlohmann::json j;
    j["profile"] = profile_to_json(batch.profile);
    j["n_steps"] = batch.n_steps;
    j["replicas"] = batch.replicas;
    j["base_seed"] = batch.base_seed;
    j["engine"] = engine_name(batch.engine);
    nlohmann::json sites = nlohmann::json::array();
    if (batch.options.mode == LocalTimeMode::Filtered)
        for (const Site& s : batch.options.sites) sites.push_back({s.x, s.y});
    j["site_filter"] = sites;
    j["code_version"] = std::string(kVersion);
    j["command"] = command;
    j["outputs"] = outputs;
    j["created_utc"] = timestamp_utc;
    return j;
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

}  // namespace aniwalk
