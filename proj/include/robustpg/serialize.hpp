#pragma once

// JSON and CSV documents. Requires nlohmann/json (robustpg_io target).

#include <charconv>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "robustpg/errors.hpp"
#include "robustpg/params.hpp"
#include "robustpg/regions.hpp"
#include "robustpg/verify.hpp"

namespace robustpg {

inline constexpr int kSchemaVersion = 1;

/// Shortest-round-trip style text with 17 significant digits, locale independent.
inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

inline nlohmann::ordered_json params_to_json(const SolvedParams& p) {
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["mode"] = std::string(to_string(p.mode));
    j["case"] = case_name(p);
    j["on_boundary"] = p.mode == Mode::Randomized ? std::string(to_string(p.label.on_boundary)) : std::string();
    j["means"] = caller_means(p);
    j["order"] = p.order;
    auto& c = j["constants"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : named_constants(p)) c[k] = v;
    auto& r = j["residuals"] = nlohmann::ordered_json::object();
    for (const auto& x : p.residuals) r[x.name] = x.value;
    j["notes"] = p.notes;
    j["guarantee"] = revenue_guarantee(p);
    return j;
}

inline SolvedParams params_from_json(const nlohmann::json& j) {
    try {
        if (j.at("schema_version").get<int>() != kSchemaVersion) throw IoError("params document: unsupported schema_version");
        SolvedParams p;
        p.mode = parse_mode(j.at("mode").get<std::string>());
        if (p.mode == Mode::Randomized) {
            p.label.tag = parse_case_tag(j.at("case").get<std::string>());
            p.label.on_boundary = parse_boundary_tag(j.value("on_boundary", std::string()));
        }
        const auto means = j.at("means").get<std::vector<double>>();
        p.order = j.at("order").get<std::vector<std::size_t>>();
        if (p.order.size() != means.size()) throw IoError("params document: order and means differ in length");
        for (std::size_t k = 0; k < p.order.size(); ++k) {
            if (p.order[k] >= means.size()) throw IoError("params document: order entry out of range");
            p.means.push_back(means[p.order[k]]);
        }
        const auto& c = j.at("constants");
        p.constants = constants_from_named(
            p.mode, p.label.tag,
            [&](const std::string& k) {
                if (!c.contains(k)) throw IoError("params document: missing constant " + k);
                return c.at(k).get<double>();
            },
            p.means.size());
        if (j.contains("residuals")) {
            for (const auto& [k, v] : j.at("residuals").items()) p.residuals.push_back({k, v.get<double>()});
        }
        if (j.contains("notes")) p.notes = j.at("notes").get<std::vector<std::string>>();
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("params document: ") + e.what());
    }
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out) throw IoError("write failed for " + path);
}

inline SolvedParams load_params(const std::string& path) {
    const std::string text = read_text_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path + ": " + e.what());
    }
    return params_from_json(j);
}

inline void save_params(const std::string& path, const SolvedParams& p) {
    write_text_file(path, params_to_json(p).dump(2) + "\n");
}

inline nlohmann::ordered_json report_to_json(const VerificationReport& r) {
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["case"] = r.case_name;
    j["means"] = r.means;
    j["guarantee"] = r.guarantee;
    if (r.certificate) {
        j["certificate"] = {{"lambdas", r.certificate->lambdas}, {"mu", r.certificate->mu}, {"value", r.certificate->value}};
        if (r.certificate->anchor_mu) j["certificate"]["anchor_mu"] = *r.certificate->anchor_mu;
    }
    auto num = [](double x) { return std::isfinite(x) ? nlohmann::ordered_json(x) : nlohmann::ordered_json(nullptr); };
    j["feasibility_margin"] = num(r.feasibility_margin);
    j["slackness_residual"] = num(r.slackness_residual);
    if (r.lp) {
        nlohmann::ordered_json support = nlohmann::ordered_json::array();
        for (const auto& s : r.lp->support) support.push_back({{"profile", s.profile}, {"probability", s.probability}});
        j["lp"] = {{"value", r.lp->value}, {"lipschitz", r.lp->lipschitz}, {"spacing", r.lp->spacing},
                   {"columns", r.lp->columns}, {"support", support}};
    }
    if (r.mc) {
        j["monte_carlo"] = {{"draws", r.mc->draws},        {"revenue", r.mc->revenue},   {"revenue_se", r.mc->revenue_se},
                            {"means", r.mc->means},        {"means_se", r.mc->means_se}, {"top_frequency", r.mc->top_frequency},
                            {"top_se", r.mc->top_se}};
    }
    if (r.audit) j["incentives"] = {{"dsic", r.audit->dsic}, {"epir", r.audit->epir}};
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const auto& c : r.checks) {
        nlohmann::ordered_json e{{"name", c.name}, {"value", num(c.value)}, {"tolerance", c.tolerance}};
        e["status"] = c.skipped ? "skipped" : (c.passed ? "pass" : "fail");
        if (!c.detail.empty()) e["detail"] = c.detail;
        checks.push_back(e);
    }
    j["checks"] = checks;
    j["notes"] = r.notes;
    j["all_pass"] = r.all_pass();
    return j;
}

/// One line per check.
inline std::string report_summary(const VerificationReport& r) {
    std::ostringstream out;
    out << r.case_name << " guarantee " << format_number(r.guarantee) << "\n";
    for (const auto& c : r.checks) {
        out << "  " << (c.skipped ? "SKIP" : (c.passed ? "PASS" : "FAIL")) << "  " << c.name << "  value "
            << format_number(c.value) << "  tol " << format_number(c.tolerance);
        if (!c.detail.empty()) out << "  (" << c.detail << ")";
        out << "\n";
    }
    out << (r.all_pass() ? "ALL PASS" : "FAILED") << "\n";
    return out.str();
}

/// Header v1..vN followed by one row per draw.
inline void write_samples_csv(std::ostream& out, std::span<const double> draws, std::size_t agents) {
    for (std::size_t i = 0; i < agents; ++i) out << (i ? "," : "") << "v" << i + 1;
    out << "\n";
    for (std::size_t k = 0; k + agents <= draws.size(); k += agents) {
        for (std::size_t i = 0; i < agents; ++i) out << (i ? "," : "") << format_number(draws[k + i]);
        out << "\n";
    }
}

}  // namespace robustpg
