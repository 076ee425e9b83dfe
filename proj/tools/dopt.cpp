// dopt: parameter enumeration, design verification, matrix building and
// orbit search for two-block difference families over Z_v.
//
// Exit codes: 0 success, 1 verification failure, 2 usage error,
// 3 budget exhaustion.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dopt/dopt.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;

using dopt::Int;
using nlohmann::json;

std::vector<Int> parse_int_list(const std::string& text) {
    std::vector<Int> out;
    std::string tok;
    for (size_t i = 0; i <= text.size(); ++i) {
        const char c = i < text.size() ? text[i] : ',';
        if (c == ',' || c == ' ') {
            if (!tok.empty()) out.push_back(std::stoll(tok));
            tok.clear();
        } else {
            tok += c;
        }
    }
    return out;
}

std::string xy_suffix(const dopt::ParameterSet& ps) {
    const dopt::XYPair p = xy_from_ps(ps);
    return "x=" + std::to_string(p.x) + " y=" + std::to_string(p.y);
}

json ps_to_json(const dopt::ParameterSet& ps) {
    const dopt::XYPair p = xy_from_ps(ps);
    return json{{"v", ps.v},      {"r", ps.r}, {"s", ps.s},
                {"lambda", ps.lambda}, {"x", p.x},  {"y", p.y}};
}

// ---- params ----------------------------------------------------------------

struct ParamsArgs {
    std::optional<Int> v;
    std::vector<Int> range;
    std::string series;
    Int x_max = 15;
    bool as_json = false;
};

int cmd_params(const ParamsArgs& a) {
    std::vector<dopt::ParameterSet> rows;
    try {
        if (a.v) {
            rows = dopt::ps_list_for_v(*a.v);
        } else if (!a.range.empty()) {
            rows = dopt::enumerate_ps(a.range.at(0), a.range.at(1));
        } else if (a.series == "lambda-eq-s") {
            for (Int x = 1; x <= a.x_max; ++x) rows.push_back(dopt::series_lambda_eq_s(x));
        } else if (a.series == "r-eq-s") {
            for (Int x = 1; x <= a.x_max; ++x) rows.push_back(dopt::series_r_eq_s(x));
        } else {
            std::cerr << "params: one of --v, --range, --series is required\n";
            return kExitUsage;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "params: " << e.what() << "\n";
        return kExitUsage;
    }
    if (a.as_json) {
        json out = json::array();
        for (const auto& ps : rows) out.push_back(ps_to_json(ps));
        std::cout << out.dump(2) << "\n";
    } else {
        for (const auto& ps : rows) std::cout << dopt::to_string(ps) << "  " << xy_suffix(ps) << "\n";
    }
    return kExitOk;
}

// ---- entry selection shared by verify/build ---------------------------------

std::vector<dopt::CatalogEntry> select_entries(bool use_catalog, const std::string& file,
                                               const std::string& label) {
    dopt::CatalogFile cf;
    if (!file.empty()) {
        cf = dopt::load_catalog(file, /*verify_entries=*/false);
    } else if (use_catalog || !label.empty()) {
        cf = dopt::builtin_catalog();
    } else {
        throw std::invalid_argument("select --catalog, --file or --label");
    }
    if (label.empty()) return cf.entries;
    for (const auto& e : cf.entries)
        if (e.label == label) return {e};
    throw std::invalid_argument("unknown label '" + label + "'");
}

const char* level_name(dopt::CheckLevel lvl) {
    switch (lvl) {
        case dopt::CheckLevel::pass: return "pass";
        case dopt::CheckLevel::fail: return "fail";
        default: return "skipped";
    }
}

// ---- verify -----------------------------------------------------------------

struct VerifyArgs {
    bool use_catalog = false;
    std::string file;
    std::string label;
    bool with_det = false;
    double det_budget = 600.0;
    bool as_json = false;
};

int cmd_verify(const VerifyArgs& a) {
    std::vector<dopt::CatalogEntry> entries;
    try {
        entries = select_entries(a.use_catalog, a.file, a.label);
    } catch (const std::exception& e) {
        std::cerr << "verify: " << e.what() << "\n";
        return kExitUsage;
    }
    dopt::CertifyOptions opts;
    if (a.with_det) opts.run_determinant = true;
    opts.det_budget_seconds = a.det_budget;
    size_t passed = 0;
    bool budget_hit = false;
    json out = json::array();
    for (const auto& e : entries) {
        dopt::Certificate cert;
        std::string error;
        try {
            const dopt::DifferenceFamily df = dopt::family_from_entry(e);
            cert = dopt::certify_d_optimal(df, e.ps, opts);
        } catch (const std::exception& ex) {
            error = ex.what();
            cert.family_level = dopt::CheckLevel::fail;
        }
        const bool ok = error.empty() && cert.ok();
        if (ok) ++passed;
        budget_hit = budget_hit || cert.det_budget_exceeded;
        if (a.as_json) {
            json row{{"label", e.label},
                     {"ps", {{"v", e.ps.v}, {"r", e.ps.r}, {"s", e.ps.s}, {"lambda", e.ps.lambda}}},
                     {"coverage", level_name(cert.family_level)},
                     {"gram", level_name(cert.gram_level)},
                     {"det", level_name(cert.det_level)},
                     {"pass", ok}};
            if (!error.empty()) row["error"] = error;
            if (cert.det) row["det_value"] = cert.det->get_str();
            if (cert.bound) row["bound_value"] = cert.bound->get_str();
            out.push_back(row);
        } else {
            std::cout << e.label << "  " << dopt::to_string(e.ps) << "  coverage="
                      << level_name(cert.family_level) << " gram=" << level_name(cert.gram_level)
                      << " det=" << level_name(cert.det_level) << "  " << (ok ? "PASS" : "FAIL");
            if (!error.empty()) std::cout << "  (" << error << ")";
            std::cout << "\n";
            if (cert.det && cert.bound)
                std::cout << "  det   = " << cert.det->get_str() << "\n  bound = "
                          << cert.bound->get_str() << "\n";
        }
    }
    if (a.as_json) {
        std::cout << json{{"results", out}, {"passed", passed}, {"total", entries.size()}}.dump(2)
                  << "\n";
    } else {
        std::cout << passed << "/" << entries.size() << " pass\n";
    }
    if (passed != entries.size()) return kExitVerifyFail;
    if (budget_hit) return kExitBudget;
    return kExitOk;
}

// ---- build ------------------------------------------------------------------

struct BuildArgs {
    std::string label;
    std::string file;
    std::string out_path;
    bool with_det = false;
    double det_budget = 600.0;
    bool as_json = false;
};

int cmd_build(const BuildArgs& a) {
    std::vector<dopt::CatalogEntry> entries;
    try {
        entries = select_entries(false, a.file, a.label);
        if (entries.size() != 1)
            throw std::invalid_argument("--label must select exactly one entry (got " +
                                        std::to_string(entries.size()) + ")");
    } catch (const std::exception& e) {
        std::cerr << "build: " << e.what() << "\n";
        return kExitUsage;
    }
    const dopt::CatalogEntry& entry = entries.front();
    dopt::DifferenceFamily df = dopt::family_from_entry(entry);
    const dopt::CirculantMatrix A = dopt::circulant_from_block(df.X);
    const dopt::CirculantMatrix B = dopt::circulant_from_block(df.Y);
    const dopt::BlockMatrix M = dopt::assemble(A, B);

    std::ofstream out(a.out_path, std::ios::binary);
    if (!out) {
        std::cerr << "build: cannot open for writing: " << a.out_path << "\n";
        return kExitUsage;
    }
    out << "order " << M.order << "\n";
    for (const auto& row : M.rows) {
        std::string line(row.size(), '+');
        for (size_t j = 0; j < row.size(); ++j)
            if (row[j] < 0) line[j] = '-';
        out << line << "\n";
    }
    out.flush();
    if (!out) {
        std::cerr << "build: write failed: " << a.out_path << "\n";
        return kExitUsage;
    }

    json payload{{"label", entry.label}, {"order", M.order}, {"path", a.out_path}};
    int code = kExitOk;
    if (a.with_det) {
        const mpz_class bound = dopt::alpha_bound(entry.ps.v).value;
        try {
            const mpz_class det = dopt::det_exact(M, a.det_budget);
            payload["det"] = det.get_str();
            payload["bound"] = bound.get_str();
            payload["equal"] = det == bound;
            if (!a.as_json) {
                std::cout << "det   = " << det.get_str() << "\n";
                std::cout << "bound = " << bound.get_str() << "\n";
                std::cout << (det == bound ? "det == bound\n" : "det != bound\n");
            }
            if (det != bound) code = kExitVerifyFail;
        } catch (const dopt::DetBudgetExceeded&) {
            payload["det"] = nullptr;
            payload["budget_exceeded"] = true;
            if (!a.as_json) std::cerr << "build: determinant time budget exceeded\n";
            code = kExitBudget;
        }
    }
    if (a.as_json)
        std::cout << payload.dump(2) << "\n";
    else
        std::cout << "wrote " << a.out_path << " (order " << M.order << ")\n";
    return code;
}

// ---- search -----------------------------------------------------------------

struct SearchArgs {
    std::vector<Int> ps;
    std::string subgroup;
    bool generated = false;
    std::optional<std::uint64_t> budget_nodes;
    std::optional<double> budget_seconds;
    std::string resume;
    int jobs = 1;
    bool raw = false;
    bool first = false;
    bool symmetry_reduce = false;
    std::string seed_x;
    bool as_json = false;
};

int cmd_search(const SearchArgs& a) {
    dopt::SearchProblem problem;
    dopt::SearchStats prev;
    try {
        problem.ps = dopt::ParameterSet{a.ps.at(0), a.ps.at(1), a.ps.at(2), a.ps.at(3)};
        if (!dopt::is_consistent(problem.ps))
            throw std::invalid_argument("inconsistent parameter set " + dopt::to_string(problem.ps));
        const std::vector<Int> hs = parse_int_list(a.subgroup);
        problem.H = a.generated ? dopt::subgroup_generated(problem.ps.v, hs)
                                : dopt::subgroup_from_elements(problem.ps.v, hs);
        if (!a.seed_x.empty()) problem.seed_x = parse_int_list(a.seed_x);
    } catch (const std::exception& e) {
        std::cerr << "search: " << e.what() << "\n";
        return kExitUsage;
    }
    problem.budget.max_nodes = a.budget_nodes;
    problem.budget.max_seconds = a.budget_seconds;
    problem.mode = a.first ? dopt::SearchMode::first_solution : dopt::SearchMode::all_solutions;
    problem.symmetry_reduce = a.symmetry_reduce;
    problem.jobs = a.jobs;

    const std::string ckpt_path = a.resume.empty() ? "dopt-search.ckpt" : a.resume;
    if (!a.resume.empty() && std::filesystem::exists(a.resume)) {
        try {
            std::ifstream in(a.resume, std::ios::binary);
            std::ostringstream buf;
            buf << in.rdbuf();
            const dopt::Checkpoint cp = dopt::checkpoint_from_text(buf.str());
            if (cp.ps != problem.ps || cp.subgroup != problem.H.elements)
                throw std::runtime_error("checkpoint does not match this search");
            problem.resume_cursor = cp.cursor;
            prev = cp.stats;
            std::cerr << "resuming at cursor " << cp.cursor << "\n";
        } catch (const std::exception& e) {
            std::cerr << "search: cannot resume: " << e.what() << "\n";
            return kExitUsage;
        }
    }

    dopt::Deduper dedup;
    std::uint64_t printed = 0;
    json solutions = json::array();
    if (!a.as_json) std::cout << "format 1\n";
    auto sink = [&](const dopt::DifferenceFamily& df) {
        if (!a.raw && !dedup.accept(df)) return true;
        ++printed;
        dopt::CatalogEntry e;
        e.ps = problem.ps;
        e.H = problem.H.elements;
        e.I = df.orbit_spec->I;
        e.J = df.orbit_spec->J;
        e.label = "search-" + std::to_string(printed);
        e.source = "search";
        if (a.as_json) {
            solutions.push_back(dopt::entry_to_json(e));
        } else {
            dopt::CatalogFile one;
            one.entries.push_back(std::move(e));
            // stanza body only: drop the header line, keep the blank separator
            const std::string text = dopt::catalog_to_text(one);
            std::cout << text.substr(text.find('\n') + 1);
        }
        return true;
    };

    dopt::SearchStats stats = dopt::run_search(problem, sink);

    dopt::SearchStats total = stats;
    total.nodes += prev.nodes;
    total.solutions += prev.solutions;
    total.pruned_size += prev.pruned_size;
    total.pruned_lambda += prev.pruned_lambda;
    total.wall_seconds += prev.wall_seconds;

    if (a.as_json) {
        std::cout << json{{"solutions", solutions},
                          {"stats",
                           {{"nodes", total.nodes},
                            {"solutions", total.solutions},
                            {"pruned_size", total.pruned_size},
                            {"pruned_lambda", total.pruned_lambda},
                            {"wall_seconds", total.wall_seconds},
                            {"budget_exhausted", stats.budget_exhausted},
                            {"cursor", stats.cursor}}}}
                         .dump(2)
                  << "\n";
    } else {
        std::cerr << "nodes " << total.nodes << ", solutions " << total.solutions
                  << ", pruned-size " << total.pruned_size << ", pruned-lambda "
                  << total.pruned_lambda << ", cursor " << stats.cursor << "\n";
    }

    if (stats.budget_exhausted) {
        dopt::Checkpoint cp;
        cp.ps = problem.ps;
        cp.subgroup = problem.H.elements;
        cp.cursor = stats.cursor;
        cp.stats = total;
        cp.stats.budget_exhausted = true;
        cp.stats.cursor = stats.cursor;
        std::ofstream out(ckpt_path, std::ios::binary);
        out << dopt::checkpoint_to_text(cp);
        std::cerr << "budget exhausted, checkpoint written to " << ckpt_path << "\n";
        return kExitBudget;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"D-optimal difference family toolkit"};
    app.require_subcommand(1);

    ParamsArgs pa;
    CLI::App* params = app.add_subcommand("params", "enumerate parameter sets");
    auto* ov = params->add_option("--v", pa.v, "one group order");
    auto* orange = params->add_option("--range", pa.range, "orders v_min <= v < v_max")->expected(2);
    auto* oseries = params->add_option("--series", pa.series, "borderline series")
                        ->check(CLI::IsMember({"lambda-eq-s", "r-eq-s"}));
    params->add_option("--x-max", pa.x_max, "last series index");
    params->add_flag("--json", pa.as_json, "machine readable output");
    ov->excludes(orange)->excludes(oseries);
    orange->excludes(oseries);

    VerifyArgs va;
    CLI::App* verify = app.add_subcommand("verify", "certify designs");
    verify->add_flag("--catalog", va.use_catalog, "verify the builtin catalog");
    verify->add_option("--file", va.file, "verify a catalog file");
    verify->add_option("--label", va.label, "single entry by label");
    verify->add_flag("--det", va.with_det, "also certify the exact determinant");
    verify->add_option("--det-budget", va.det_budget, "determinant time budget, seconds");
    verify->add_flag("--json", va.as_json, "machine readable output");

    BuildArgs ba;
    CLI::App* build = app.add_subcommand("build", "write the order-2v sign matrix");
    build->add_option("--label", ba.label, "entry label");
    build->add_option("--file", ba.file, "take the entry from a catalog file");
    build->add_option("--out", ba.out_path, "output path")->required();
    build->add_flag("--det", ba.with_det, "compute the exact determinant and the bound");
    build->add_option("--det-budget", ba.det_budget, "determinant time budget, seconds");
    build->add_flag("--json", ba.as_json, "machine readable output");

    SearchArgs sa;
    CLI::App* search = app.add_subcommand("search", "orbit search for difference families");
    search->add_option("--ps", sa.ps, "v r s lambda")->expected(4)->required();
    search->add_option("--H", sa.subgroup, "subgroup elements, comma separated")->required();
    search->add_flag("--generated", sa.generated, "treat --H as generators");
    search->add_option("--budget-nodes", sa.budget_nodes, "node budget");
    search->add_option("--budget-seconds", sa.budget_seconds, "wall clock budget");
    search->add_option("--resume", sa.resume, "checkpoint file to resume from and write to");
    search->add_option("--jobs", sa.jobs, "parallel workers")->check(CLI::PositiveNumber);
    search->add_flag("--raw", sa.raw, "do not dedupe equivalent solutions");
    search->add_flag("--first", sa.first, "stop after the first solution");
    search->add_flag("--symmetry-reduce", sa.symmetry_reduce,
                     "skip unit-coset duplicates of X selections");
    search->add_option("--seed-x", sa.seed_x, "fix X to these orbit representatives");
    search->add_flag("--json", sa.as_json, "machine readable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (params->parsed()) return cmd_params(pa);
        if (verify->parsed()) return cmd_verify(va);
        if (build->parsed()) return cmd_build(ba);
        if (search->parsed()) return cmd_search(sa);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
