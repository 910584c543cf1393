// robustpg command-line front end.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "robustpg/robustpg.hpp"
#include "robustpg/serialize.hpp"

namespace {

using namespace robustpg;

enum ExitCode : int { kPass = 0, kVerifyFailed = 1, kDomain = 2, kNoSolution = 3, kIo = 4 };

struct Range {
    double lo = 0, hi = 1;
    std::size_t count = 1;

    [[nodiscard]] double at(std::size_t k) const {
        return count == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
    }
};

Range parse_range(const std::string& s) {
    Range r;
    char c1 = 0, c2 = 0;
    std::istringstream in(s);
    in.imbue(std::locale::classic());
    if (!(in >> r.lo >> c1 >> r.hi >> c2 >> r.count) || c1 != ':' || c2 != ':' || r.count < 1) {
        throw DomainError("range must look like a:b:k with k >= 1, got " + s);
    }
    return r;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
    } else {
        write_text_file(path, text);
    }
}

SolveOptions solve_options(const std::string& mode, int agents) {
    SolveOptions o;
    o.mode = parse_mode(mode);
    o.agents = agents;
    return o;
}

DeterministicVariant parse_variant(const std::string& s) {
    if (s == "linear") return DeterministicVariant::Linear;
    if (s == "posted") return DeterministicVariant::Posted;
    throw DomainError("variant must be linear or posted");
}

std::string to_lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Maxmin public-good mechanisms: solve, evaluate, sample and verify"};
    app.require_subcommand(1);

    // classify
    double c_m1 = 0, c_m2 = 0;
    bool c_json = false;
    auto* classify_cmd = app.add_subcommand("classify", "Case of a two-agent mean pair");
    classify_cmd->add_option("--m1", c_m1, "mean of agent 1")->required();
    classify_cmd->add_option("--m2", c_m2, "mean of agent 2")->required();
    classify_cmd->add_flag("--json", c_json, "print a JSON document");

    // solve
    std::vector<double> s_means;
    std::string s_mode = "randomized", s_out;
    int s_agents = 0;
    auto* solve_cmd = app.add_subcommand("solve", "Solve the constants for a mean vector");
    solve_cmd->add_option("--m", s_means, "means, one flag per agent")->required();
    solve_cmd->add_option("--mode", s_mode, "randomized|deterministic|excludable|nagent")->transform(to_lower);
    solve_cmd->add_option("--n", s_agents, "number of agents for nagent mode with a single --m");
    solve_cmd->add_option("--out", s_out, "output file (default standard output)");

    // eval
    std::string e_params;
    std::vector<double> e_values;
    std::string e_variant = "linear";
    auto* eval_cmd = app.add_subcommand("eval", "Provision and payments at a value profile");
    eval_cmd->add_option("--params", e_params, "params JSON document")->required();
    eval_cmd->add_option("--v", e_values, "values, one flag per agent")->required();
    eval_cmd->add_option("--variant", e_variant, "deterministic mechanism: linear|posted");

    // sample
    std::string sa_params, sa_out;
    std::size_t sa_n = 1000;
    std::uint64_t sa_seed = SamplerState{}.seed, sa_stream = 0;
    auto* sample_cmd = app.add_subcommand("sample", "Draw from the worst-case distribution as CSV");
    sample_cmd->add_option("--params", sa_params, "params JSON document")->required();
    sample_cmd->add_option("--n", sa_n, "number of draws")->check(CLI::PositiveNumber);
    sample_cmd->add_option("--seed", sa_seed, "random seed");
    sample_cmd->add_option("--stream", sa_stream, "stream id");
    sample_cmd->add_option("--out", sa_out, "output file (default standard output)");

    // verify
    std::vector<double> v_means;
    std::string v_params, v_mode = "randomized", v_variant = "linear", v_json;
    int v_agents = 0;
    std::size_t v_grid = 201, v_cert_grid = 101, v_audit_grid = 51, v_mc = 1000000;
    std::uint64_t v_seed = SamplerState{}.seed;
    unsigned v_workers = 1;
    auto* verify_cmd = app.add_subcommand("verify", "Certify the saddle point of a case");
    auto* vm = verify_cmd->add_option("--m", v_means, "means, one flag per agent");
    auto* vp = verify_cmd->add_option("--params", v_params, "params JSON document instead of means");
    vm->excludes(vp);
    verify_cmd->add_option("--mode", v_mode, "randomized|deterministic|excludable|nagent")->transform(to_lower);
    verify_cmd->add_option("--n", v_agents, "number of agents for nagent mode with a single --m");
    verify_cmd->add_option("--grid", v_grid, "nature LP points per axis")->check(CLI::Range(2, 100000));
    verify_cmd->add_option("--cert-grid", v_cert_grid, "certificate grid points per axis")->check(CLI::Range(2, 100000));
    verify_cmd->add_option("--audit-grid", v_audit_grid, "incentive audit points per axis")->check(CLI::Range(2, 100000));
    verify_cmd->add_option("--mc", v_mc, "Monte Carlo draws (0 skips)");
    verify_cmd->add_option("--seed", v_seed, "random seed");
    verify_cmd->add_option("--workers", v_workers, "worker threads")->check(CLI::PositiveNumber);
    verify_cmd->add_option("--variant", v_variant, "deterministic mechanism: linear|posted");
    verify_cmd->add_option("--json", v_json, "write the JSON report here (default standard output)");

    // sweep
    std::string w_m1 = "0.05:1:20", w_m2 = "0.05:1:20", w_diag, w_out, w_mode = "randomized";
    unsigned w_workers = 1;
    auto* sweep_cmd = app.add_subcommand("sweep", "Case and guarantee over a grid of mean pairs as CSV");
    sweep_cmd->add_option("--m1-range", w_m1, "a:b:k for agent 1");
    sweep_cmd->add_option("--m2-range", w_m2, "a:b:k for agent 2");
    sweep_cmd->add_option("--diagonal", w_diag, "a:b:k along m1 = m2 instead of a product grid");
    sweep_cmd->add_option("--mode", w_mode, "randomized|deterministic|excludable")->transform(to_lower);
    sweep_cmd->add_option("--out", w_out, "output file (default standard output)");
    sweep_cmd->add_option("--workers", w_workers, "worker threads")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kDomain;
    }

    try {
        if (*classify_cmd) {
            const Classification c = classify(MeanVector{c_m1, c_m2});
            if (c_json) {
                nlohmann::ordered_json j;
                j["schema_version"] = kSchemaVersion;
                j["case"] = std::string(to_string(c.label.tag));
                j["on_boundary"] = std::string(to_string(c.label.on_boundary));
                j["order"] = c.means.order;
                j["reordered"] = c.means.swapped();
                std::cout << j.dump(2) << "\n";
            } else {
                std::cout << to_string(c.label.tag);
                if (c.label.on_boundary != BoundaryTag::None) std::cout << " on " << to_string(c.label.on_boundary);
                if (c.means.swapped()) std::cout << " (reordered: agent 2 has the higher mean)";
                std::cout << "\n";
            }
        } else if (*solve_cmd) {
            const SolvedParams p = solve(MeanVector(s_means), solve_options(s_mode, s_agents));
            emit(params_to_json(p).dump(2) + "\n", s_out);
            std::cerr << case_name(p) << " guarantee " << format_number(revenue_guarantee(p)) << "\n";
        } else if (*eval_cmd) {
            const Mechanism mech(load_params(e_params), parse_variant(e_variant));
            nlohmann::ordered_json j;
            j["v"] = e_values;
            std::vector<double> q, t;
            for (std::size_t i = 0; i < mech.agents(); ++i) {
                q.push_back(mech.provision(e_values, i));
                t.push_back(mech.payment(e_values, i));
            }
            if (mech.kind() == MechanismKind::Excludable) j["q"] = q;
            else j["q"] = q.at(0);
            j["t"] = t;
            j["total"] = mech.total_payment(e_values);
            std::cout << j.dump(2) << "\n";
        } else if (*sample_cmd) {
            const WorstCaseDistribution d(load_params(sa_params));
            const auto draws = d.sample(SamplerState{sa_seed, sa_stream}, sa_n);
            std::ostringstream out;
            write_samples_csv(out, draws, d.agents());
            emit(out.str(), sa_out);
            std::cerr << "seed " << sa_seed << " stream " << sa_stream << "\n";
        } else if (*verify_cmd) {
            SolvedParams p;
            if (!v_params.empty()) {
                p = load_params(v_params);
            } else if (!v_means.empty()) {
                p = solve(MeanVector(v_means), solve_options(v_mode, v_agents));
            } else {
                throw DomainError("verify needs --m or --params");
            }
            VerifyOptions o;
            o.lp_grid.points = v_grid;
            o.certificate_grid.points = v_cert_grid;
            o.audit_grid.points = v_audit_grid;
            o.mc_draws = v_mc;
            o.sampler.seed = v_seed;
            o.workers = v_workers;
            o.variant = parse_variant(v_variant);
            const VerificationReport r = verify_params(p, o);
            std::cerr << report_summary(r) << "seed " << v_seed << "\n";
            emit(report_to_json(r).dump(2) + "\n", v_json);
            return r.all_pass() ? kPass : kVerifyFailed;
        } else if (*sweep_cmd) {
            std::vector<std::pair<double, double>> cells;
            if (!w_diag.empty()) {
                const Range d = parse_range(w_diag);
                for (std::size_t k = 0; k < d.count; ++k) cells.emplace_back(d.at(k), d.at(k));
            } else {
                const Range a = parse_range(w_m1), b = parse_range(w_m2);
                for (std::size_t i = 0; i < a.count; ++i) {
                    for (std::size_t k = 0; k < b.count; ++k) cells.emplace_back(a.at(i), b.at(k));
                }
            }
            const SolveOptions so = solve_options(w_mode, 0);
            std::vector<std::string> rows(cells.size());
            parallel_for(cells.size(), w_workers, [&](std::size_t k) {
                const auto [m1, m2] = cells[k];
                std::string name = "ERROR";
                double g = std::numeric_limits<double>::quiet_NaN();
                try {
                    const SolvedParams p = solve(MeanVector{m1, m2}, so);
                    name = case_name(p);
                    g = revenue_guarantee(p);
                } catch (const Error&) {
                }
                rows[k] = format_number(m1) + "," + format_number(m2) + "," + name + "," + format_number(g) + "\n";
            });
            std::string text = "m1,m2,case,guarantee\n";
            for (const auto& r : rows) text += r;
            emit(text, w_out);
        }
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kIo;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kDomain;
    } catch (const UnsupportedError& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return kDomain;
    } catch (const NoSolutionError& e) {
        std::cerr << "no solution: " << e.what() << "\n";
        return kNoSolution;
    } catch (const BracketError& e) {
        std::cerr << "no solution: " << e.what() << "\n";
        return kNoSolution;
    } catch (const ConvergenceError& e) {
        std::cerr << "no solution: " << e.what() << "\n";
        return kNoSolution;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDomain;
    }
    return kPass;
}
