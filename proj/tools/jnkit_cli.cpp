// jnkit: corpus generation, single-operation evaluation, verification runs
// and report summaries.
//
// Exit codes: 0 success, 1 budget violation, 2 config error, 3 I/O error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>

#include "eval_ops.hpp"
#include "jnkit/harness.hpp"
#include "jnkit/text.hpp"

namespace fs = std::filesystem;
using namespace jnkit;

namespace {

constexpr int kExitBudget = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

std::string grid_dir(const GridConfig& g) { return "n" + std::to_string(g.dim) + "J" + std::to_string(g.depth); }

int cmd_gen(const std::string& config_path, const std::string& out_override) {
    const ExperimentConfig cfg = ExperimentConfig::load(config_path);
    const fs::path out = out_override.empty() ? fs::path(cfg.output_dir) : fs::path(out_override);
    for (const auto& g : cfg.grids) {
        const fs::path dir = out / "corpus" / grid_dir(g);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
        auto emit = [&](const CorpusEntry& e) {
            if (e.dim && *e.dim != g.dim) return;
            write_text_file((dir / (e.id + ".csv")).string(), to_csv(build_function(g, e.spec)));
        };
        for (const auto& e : cfg.functions) emit(e);
        for (const auto& e : cfg.weights) emit(e);
    }
    write_text_file((out / "config.cfg").string(), cfg.to_text());
    std::cout << "wrote corpus under " << (out / "corpus").string() << "\n";
    return 0;
}

int cmd_eval(const std::string& op, const std::vector<std::string>& args, bool json) {
    const cli::Json value = cli::evaluate(op, args);
    std::cout << (json ? value.dump() : cli::render_plain(value)) << "\n";
    return 0;
}

int cmd_verify(const std::string& config_path, const std::string& out_override, const std::string& theorems,
               const std::optional<std::uint64_t>& seed, const std::string& scope, bool json) {
    const ExperimentConfig cfg = ExperimentConfig::load(config_path);
    const Budgets budgets = Budgets::load(cfg.budget_file);
    RunOptions opt;
    if (!theorems.empty())
        for (const auto& t : split(theorems, ',')) opt.theorems.insert(trim(t));
    opt.seed_override = seed;
    if (!scope.empty()) {
        try {
            opt.scope = parse_scope(scope);
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
    }
    const RunResult result = run_experiment(cfg, budgets, opt);
    write_outputs(result, out_override.empty() ? cfg.output_dir : out_override);

    if (json) {
        std::cout << report_jsonl(result.records);
    } else {
        std::size_t failed = 0;
        for (const auto& r : result.records) {
            if (r.pass) continue;
            ++failed;
            std::cout << "FAIL " << r.theorem << ' ' << r.case_id << " constant=" << format_double(r.constant)
                      << " budget=" << format_double(r.budget) << (r.note.empty() ? "" : " (" + r.note + ")")
                      << "\n";
        }
        std::cout << result.records.size() << " records, " << failed << " failed\n";
    }
    return result.all_pass ? 0 : kExitBudget;
}

int cmd_report(const std::string& report_path, const std::string& out_dir) {
    const auto records = parse_report(read_text_file(report_path));
    const fs::path out = out_dir.empty() ? fs::path(report_path).parent_path() : fs::path(out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw IoError("cannot create '" + out.string() + "': " + ec.message());
    write_text_file((out / "summary.csv").string(), summary_csv(records));
    std::string plot = "theorem,n,J,scope,case_id,constant,budget\n";
    for (const auto& r : records)
        plot += r.theorem + "," + std::to_string(r.n) + "," + std::to_string(r.J) + "," + r.scope + "," + r.case_id +
                "," + format_double(r.constant) + "," + format_double(r.budget) + "\n";
    write_text_file((out / "plot_data.csv").string(), plot);
    std::cout << summary_csv(records);
    bool all = true;
    for (const auto& r : records) all = all && r.pass;
    return all ? 0 : kExitBudget;
}

// Budget = margin x the largest finite constant per (theorem, n, J, scope).
int cmd_pin(const std::string& report_path, double margin, const std::string& out_path) {
    const auto records = parse_report(read_text_file(report_path));
    std::map<std::tuple<std::string, int, int, std::string>, double> worst;
    for (const auto& r : records) {
        double& w = worst[{r.theorem, r.n, r.J, r.scope}];
        if (std::isfinite(r.constant)) w = std::max(w, r.constant);
    }
    Budgets b;
    for (const auto& [key, v] : worst) {
        const auto& [theorem, n, J, scope] = key;
        // Two significant digits, rounded up.
        double pinned = v * margin;
        if (pinned > 0.0) {
            const double scale = std::pow(10.0, std::floor(std::log10(pinned)) - 1.0);
            pinned = std::ceil(pinned / scale) * scale;
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.2g", pinned);
            pinned = parse_double(buf);
        }
        b.set(theorem, n, J, scope, pinned);
    }
    write_text_file(out_path, b.to_text());
    std::cout << "pinned " << worst.size() << " budgets to " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"jnkit: John-Nirenberg inequalities on dyadic grids"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    std::string config, out, theorems, scope, op, report, pin_out;
    std::vector<std::string> op_args;
    std::optional<std::uint64_t> seed;
    bool json = false;
    double margin = 1.5;

    auto* gen = app.add_subcommand("gen", "write the configured corpus as CSV files");
    gen->add_option("--config", config, "experiment config")->required();
    gen->add_option("--out", out, "output directory");

    auto* eval = app.add_subcommand("eval", "evaluate one operation: eval OP key=value ...");
    eval->add_option("op", op, "operation name (--list shows all)");
    eval->add_option("args", op_args, "key=value arguments");
    eval->add_flag("--json", json, "print JSON");
    bool list = false;
    eval->add_flag("--list", list, "list operations");

    auto* verify = app.add_subcommand("verify", "run the configured checks against pinned budgets");
    verify->add_option("--config", config, "experiment config")->required();
    verify->add_option("--out", out, "output directory");
    verify->add_option("--theorems", theorems, "comma-separated subset of [theorems]");
    verify->add_option("--seed-override", seed, "replace martingale seeds by N, N+1, ...");
    verify->add_option("--scope", scope, "restrict scope-dependent checks")->check(CLI::IsMember({"dyadic", "shifted"}));
    verify->add_flag("--json", json, "print the JSON-lines report");

    auto* rep = app.add_subcommand("report", "summarize a JSON-lines report");
    rep->add_option("report", report, "report.jsonl")->required();
    rep->add_option("--out", out, "output directory (default: next to the report)");

    auto* pin = app.add_subcommand("pin", "write budgets from a report");
    pin->add_option("report", report, "report.jsonl")->required();
    pin->add_option("--margin", margin, "multiplier on the worst constant")->check(CLI::PositiveNumber);
    pin->add_option("--out", pin_out, "budget file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*gen) return cmd_gen(config, out);
        if (*eval) {
            if (list || op.empty()) {
                for (const auto& [name, o] : cli::eval_ops()) std::cout << name << "  " << o.summary << "\n";
                return op.empty() && !list ? kExitConfig : 0;
            }
            return cmd_eval(op, op_args, json);
        }
        if (*verify) return cmd_verify(config, out, theorems, seed, scope, json);
        if (*rep) return cmd_report(report, out);
        if (*pin) return cmd_pin(report, margin, pin_out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return 0;
}
