// fceval command-line driver. Everything goes through the C API; this file
// only handles arguments, files and exit codes.
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fceval/fceval.h"

namespace fs = std::filesystem;

namespace {

// 0 ok, 1 internal, 2 usage/config/domain/io, 3 validation/leakage/undefined.
constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;

int exit_code(fce_status s) {
    switch (s) {
        case FCE_OK: return kExitOk;
        case FCE_VALIDATION:
        case FCE_UNDEFINED: return kExitValidation;
        case FCE_INTERNAL: return kExitInternal;
        default: return kExitUsage;
    }
}

struct Failure {
    int code;
    std::string message;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure{kExitUsage, "cannot open '" + path + "'"};
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void spill(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Failure{kExitUsage, "cannot write '" + path.string() + "'"};
    out << content;
}

void check(fce_status s) {
    if (s != FCE_OK) throw Failure{exit_code(s), std::string(fce_status_name(s)) + ": " + fce_last_error()};
}

/// Owns a report handle.
class Report {
public:
    Report() = default;
    Report(const Report&) = delete;
    Report& operator=(const Report&) = delete;
    ~Report() { fce_report_free(h_); }
    fce_report** out() { return &h_; }
    [[nodiscard]] std::string json() const { return fce_report_json(h_); }
    [[nodiscard]] bool passed() const { return fce_report_passed(h_) != 0; }
    void write_artifacts(const fs::path& dir) const {
        for (size_t i = 0; i < fce_report_artifact_count(h_); ++i)
            spill(dir / fce_report_artifact_name(h_, i), fce_report_artifact_content(h_, i));
    }
    [[nodiscard]] std::optional<std::string> artifact(const std::string& name) const {
        for (size_t i = 0; i < fce_report_artifact_count(h_); ++i)
            if (name == fce_report_artifact_name(h_, i)) return std::string(fce_report_artifact_content(h_, i));
        return std::nullopt;
    }

private:
    fce_report* h_ = nullptr;
};

struct Input {
    std::string role;
    std::string path;
    std::string content;
};

void write_manifest(const fs::path& file, const std::string& command, const std::vector<Input>& inputs,
                    const std::string& config, std::uint64_t seed, const std::string& policy) {
    std::vector<const char*> roles, paths, contents;
    for (const auto& i : inputs) {
        roles.push_back(i.role.c_str());
        paths.push_back(i.path.c_str());
        contents.push_back(i.content.c_str());
    }
    Report m;
    check(fce_manifest(command.c_str(), roles.data(), paths.data(), contents.data(), inputs.size(), config.c_str(),
                       seed, policy.c_str(), m.out()));
    spill(file, m.json());
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("FCEVAL_SEED")) {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(env, &used);
            if (used == std::string(env).size()) return v;
        } catch (const std::exception&) {
        }
        throw Failure{kExitUsage, std::string("FCEVAL_SEED is not an unsigned integer: '") + env + "'"};
    }
    return fce_default_seed();
}

fce_policy policy_flag(const std::string& token) {
    if (token.empty()) return FCE_POLICY_DEFAULT;
    if (token == "propagate") return FCE_POLICY_PROPAGATE;
    if (token == "skip") return FCE_POLICY_SKIP;
    if (token == "error") return FCE_POLICY_ERROR;
    throw Failure{kExitUsage, "--policy must be propagate, skip or error"};
}

/// Policy recorded in the evaluate report (the effective one).
std::string report_policy(const std::string& report_json) {
    const auto j = nlohmann::json::parse(report_json, nullptr, false);
    if (j.is_object() && j.contains("policy") && j["policy"].is_string()) return j["policy"].get<std::string>();
    return "propagate";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fceval: forecast evaluation toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(fce_version()));
    std::optional<std::uint64_t> seed_flag;
    app.add_option("--seed", seed_flag, "master seed (default: FCEVAL_SEED or built-in)");

    // evaluate
    std::string ev_series, ev_forecasts, ev_suite, ev_out = "out", ev_policy;
    auto* ev = app.add_subcommand("evaluate", "compute a measure suite over aligned forecasts");
    ev->add_option("--series", ev_series, "series CSV")->required();
    ev->add_option("--forecasts", ev_forecasts, "forecasts CSV")->required();
    ev->add_option("--suite", ev_suite, "measure suite JSON")->required();
    ev->add_option("--out", ev_out, "output directory");
    ev->add_option("--policy", ev_policy, "undefined-value policy: propagate, skip or error");

    // backtest
    std::string bt_series, bt_split, bt_out = "out";
    std::vector<std::string> bt_bench;
    auto* bt = app.add_subcommand("backtest", "partition series and score benchmark forecasters per fold");
    bt->add_option("--series", bt_series, "series CSV")->required();
    bt->add_option("--split", bt_split, "split spec JSON")->required();
    bt->add_option("--benchmark", bt_bench, "naive, seasonal-naive or mean (repeatable)");
    bt->add_option("--out", bt_out, "output directory");

    // compare
    std::vector<std::string> cmp_reports;
    std::string cmp_tests, cmp_out = "out";
    std::optional<double> cmp_alpha;
    auto* cmp = app.add_subcommand("compare", "Friedman, post-hoc tests and CD diagram over evaluate reports");
    cmp->add_option("--report", cmp_reports, "evaluate report.json (repeatable)")->required();
    cmp->add_option("--tests", cmp_tests, "test config JSON")->required();
    cmp->add_option("--alpha", cmp_alpha, "significance level, overrides the config");
    cmp->add_option("--out", cmp_out, "output directory");

    // advise
    std::string adv_profile, adv_out;
    auto* adv = app.add_subcommand("advise", "recommend measures and a partitioning scheme from a profile");
    adv->add_option("--profile", adv_profile, "characteristic profile JSON")->required();
    adv->add_option("--out", adv_out, "output directory (text goes to stdout)");

    // simulate
    std::string sim_dgp, sim_out;
    auto* sim = app.add_subcommand("simulate", "generate synthetic series");
    sim->add_option("--dgp", sim_dgp, "DGP spec JSON")->required();
    sim->add_option("--out", sim_out, "output series CSV")->required();

    // pitfalls
    std::vector<std::string> pit_names;
    bool pit_all = false, pit_list = false, pit_plots = false;
    std::string pit_out;
    auto* pit = app.add_subcommand("pitfalls", "run measure pitfall scenarios");
    pit->add_option("names", pit_names, "scenario names");
    pit->add_flag("--all", pit_all, "run every scenario");
    pit->add_flag("--list", pit_list, "print the catalogue");
    pit->add_flag("--plots", pit_plots, "write plot CSVs next to the evidence");
    pit->add_option("--out", pit_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        const std::uint64_t seed = seed_flag ? *seed_flag : default_seed();

        if (*ev) {
            const fce_policy policy = policy_flag(ev_policy);
            const Input s{"series", ev_series, slurp(ev_series)};
            const Input f{"forecasts", ev_forecasts, slurp(ev_forecasts)};
            const Input c{"suite", ev_suite, slurp(ev_suite)};
            Report r;
            check(fce_run_evaluate(s.content.c_str(), f.content.c_str(), c.content.c_str(), policy, r.out()));
            r.write_artifacts(ev_out);
            write_manifest(fs::path(ev_out) / "manifest.json", "evaluate", {s, f, c}, c.content, seed,
                           report_policy(r.json()));
            std::cout << "wrote " << (fs::path(ev_out) / "report.json").string() << '\n';
            return kExitOk;
        }

        if (*bt) {
            const Input s{"series", bt_series, slurp(bt_series)};
            const Input c{"split", bt_split, slurp(bt_split)};
            std::vector<const char*> names;
            for (const auto& b : bt_bench) names.push_back(b.c_str());
            Report r;
            check(fce_run_backtest(s.content.c_str(), c.content.c_str(), names.data(), names.size(), seed, r.out()));
            r.write_artifacts(bt_out);
            write_manifest(fs::path(bt_out) / "manifest.json", "backtest", {s, c}, c.content, seed, "");
            if (!r.passed()) {
                std::cerr << "leakage detected: see " << (fs::path(bt_out) / "report.json").string() << '\n';
                return kExitValidation;
            }
            std::cout << "wrote " << (fs::path(bt_out) / "folds.csv").string() << '\n';
            return kExitOk;
        }

        if (*cmp) {
            std::vector<Input> inputs;
            std::vector<const char*> texts;
            for (const auto& p : cmp_reports) inputs.push_back({"report", p, slurp(p)});
            for (const auto& i : inputs) texts.push_back(i.content.c_str());
            const Input c{"tests", cmp_tests, slurp(cmp_tests)};
            Report r;
            check(fce_run_compare(texts.data(), texts.size(), c.content.c_str(), cmp_alpha ? &*cmp_alpha : nullptr,
                                  r.out()));
            r.write_artifacts(cmp_out);
            inputs.push_back(c);
            write_manifest(fs::path(cmp_out) / "manifest.json", "compare", inputs, c.content, seed, "");
            if (auto txt = r.artifact("cd.txt")) std::cout << *txt;
            return kExitOk;
        }

        if (*adv) {
            const Input p{"profile", adv_profile, slurp(adv_profile)};
            Report r;
            check(fce_run_advise(p.content.c_str(), r.out()));
            if (!adv_out.empty()) {
                r.write_artifacts(adv_out);
                write_manifest(fs::path(adv_out) / "manifest.json", "advise", {p}, p.content, seed, "");
            }
            if (auto txt = r.artifact("recommendation.txt")) std::cout << *txt;
            return kExitOk;
        }

        if (*sim) {
            const Input d{"dgp", sim_dgp, slurp(sim_dgp)};
            Report r;
            check(fce_run_simulate(d.content.c_str(), seed, r.out()));
            spill(sim_out, *r.artifact("series.csv"));
            write_manifest(sim_out + ".manifest.json", "simulate", {d}, d.content, seed, "");
            std::cout << "wrote " << sim_out << '\n';
            return kExitOk;
        }

        if (*pit) {
            if (pit_list) {
                Report r;
                check(fce_list_scenarios(r.out()));
                std::cout << r.json();
                return kExitOk;
            }
            if (!pit_all && pit_names.empty()) throw Failure{kExitUsage, "pitfalls: name a scenario or pass --all"};
            if (pit_all && !pit_names.empty()) throw Failure{kExitUsage, "pitfalls: --all takes no scenario names"};
            std::vector<const char*> names;
            for (const auto& n : pit_names) names.push_back(n.c_str());
            Report r;
            check(fce_run_pitfalls(names.data(), names.size(), seed, pit_plots ? 1 : 0, r.out()));
            const auto evidence = nlohmann::json::parse(r.json());
            for (const auto& s : evidence["scenarios"])
                std::cout << (s["passed"].get<bool>() ? "PASS " : "FAIL ") << s["name"].get<std::string>() << '\n';
            if (!pit_out.empty()) {
                r.write_artifacts(pit_out);
                std::string config = "{\"scenarios\":" + nlohmann::json(pit_names).dump() + "}";
                write_manifest(fs::path(pit_out) / "manifest.json", "pitfalls", {}, config, seed, "");
            } else {
                std::cout << r.json();
            }
            return r.passed() ? kExitOk : kExitValidation;
        }
    } catch (const Failure& f) {
        std::cerr << "fceval: " << f.message << '\n';
        return f.code;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "fceval: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "fceval: internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitUsage;
}
