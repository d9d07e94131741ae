#include "jnkit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "jnkit/functionals.hpp"
#include "jnkit/text.hpp"
#include "jnkit/verify.hpp"
#include "jnkit/weights.hpp"

namespace jnkit {

// ---------------------------------------------------------------------------
// Config

const std::map<std::string, std::set<std::string>>& theorem_catalog() {
    static const std::map<std::string, std::set<std::string>> catalog = {
        {"jn_ratio", {"p", "r", "scope"}},
        {"exponential_tail", {"lambda", "gamma", "scope"}},
        {"weighted_bmo", {"p", "r"}},
        {"poincare", {"r"}},
        {"sharp_norm", {"p", "q"}},
        {"nondyadic", {"lambda", "gamma"}},
        {"polynomial", {"k", "p", "r"}},
        {"power_ratio", {"alpha"}},
        {"bmo_lp", {"p"}},
    };
    return catalog;
}

std::vector<double> TheoremEntry::doubles(const std::string& key, std::vector<double> fallback) const {
    for (const auto& [k, v] : params)
        if (k == key) return parse_doubles(v);
    return fallback;
}

std::vector<std::string> TheoremEntry::strings(const std::string& key, std::vector<std::string> fallback) const {
    for (const auto& [k, v] : params)
        if (k == key) return split(v, ',');
    return fallback;
}

namespace {

[[noreturn]] void config_error(std::size_t line, const std::string& what) {
    throw ConfigError("config line " + std::to_string(line) + ": " + what);
}

CorpusEntry parse_corpus_line(const std::string& line, bool weight) {
    Entry e = parse_key_values(line);
    CorpusEntry c;
    std::ostringstream rest;
    rest << e.kind;
    for (const auto& [k, v] : e.params) {
        if (k == "id") {
            c.id = v;
        } else if (k == "n") {
            c.dim = static_cast<int>(parse_uint(v));
        } else {
            rest << ' ' << k << '=' << v;
        }
    }
    if (c.id.empty()) throw DomainError("corpus entries need id=");
    c.spec = FunctionSpec::parse_entry(rest.str());
    if (weight) c.spec.weight = true;
    return c;
}

std::string corpus_line(const CorpusEntry& c) {
    const std::string entry = c.spec.to_entry();
    const auto space = entry.find(' ');
    std::string out = entry.substr(0, space) + " id=" + c.id;
    if (c.dim) out += " n=" + std::to_string(*c.dim);
    if (space != std::string::npos) out += entry.substr(space);
    return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string raw, section;
    std::size_t line_no = 0;
    std::set<std::string> ids;
    bool saw_budgets = false;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') config_error(line_no, "malformed section header");
            section = line.substr(1, line.size() - 2);
            static const std::set<std::string> known = {"grids", "functions", "weights", "theorems", "paths", "run"};
            if (!known.count(section)) config_error(line_no, "unknown section [" + section + "]");
            continue;
        }
        try {
            if (section.empty()) config_error(line_no, "entry outside a section");
            if (section == "grids") {
                const Entry e = parse_key_values(line);
                if (e.kind != "grid") config_error(line_no, "expected 'grid n=.. J=..'");
                int n = -1, J = -1;
                for (const auto& [k, v] : e.params) {
                    if (k == "n") n = static_cast<int>(parse_uint(v));
                    else if (k == "J") J = static_cast<int>(parse_uint(v));
                    else config_error(line_no, "unknown key '" + k + "'");
                }
                if (n < 0 || J < 0) config_error(line_no, "grid needs n= and J=");
                cfg.grids.push_back(GridConfig::make(n, J));
            } else if (section == "functions" || section == "weights") {
                CorpusEntry c = parse_corpus_line(line, section == "weights");
                if (!ids.insert(c.id).second) config_error(line_no, "duplicate id '" + c.id + "'");
                if (c.id == "unit") config_error(line_no, "id 'unit' is reserved for w = 1");
                (section == "functions" ? cfg.functions : cfg.weights).push_back(std::move(c));
            } else if (section == "theorems") {
                const Entry e = parse_key_values(line);
                const auto it = theorem_catalog().find(e.kind);
                if (it == theorem_catalog().end()) config_error(line_no, "unknown theorem '" + e.kind + "'");
                TheoremEntry t{e.kind, e.params};
                for (const auto& [k, v] : e.params) {
                    if (!it->second.count(k)) config_error(line_no, "unknown key '" + k + "' for " + e.kind);
                    if (k == "scope") {
                        for (const auto& s : split(v, ',')) parse_scope(s);
                    } else {
                        parse_doubles(v);
                    }
                }
                cfg.theorems.push_back(std::move(t));
            } else if (section == "paths") {
                const Entry e = parse_key_values(line);
                if (e.params.size() != 1) config_error(line_no, "path entries take one key");
                const auto& [k, v] = e.params.front();
                if (e.kind == "budgets" && k == "file") {
                    cfg.budget_file = v;
                    saw_budgets = true;
                } else if (e.kind == "output" && k == "dir") {
                    cfg.output_dir = v;
                } else {
                    config_error(line_no, "unknown path entry '" + e.kind + " " + k + "'");
                }
            } else if (section == "run") {
                const Entry e = parse_key_values(line);
                if (e.kind != "threads" || e.params.size() != 1 || e.params.front().first != "n")
                    config_error(line_no, "expected 'threads n=..'");
                cfg.threads = static_cast<int>(parse_uint(e.params.front().second));
                if (cfg.threads < 1) config_error(line_no, "threads must be >= 1");
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& ex) {
            config_error(line_no, ex.what());
        }
    }
    if (cfg.grids.empty()) throw ConfigError("config has no [grids] entries");
    if (cfg.theorems.empty()) throw ConfigError("config has no [theorems] entries");
    if (!saw_budgets) throw ConfigError("config needs 'budgets file=...' under [paths]");
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    ExperimentConfig cfg = parse(read_text_file(path));
    // Relative paths inside the config resolve against its directory.
    const auto base = std::filesystem::path(path).parent_path();
    if (!cfg.budget_file.empty() && std::filesystem::path(cfg.budget_file).is_relative())
        cfg.budget_file = (base / cfg.budget_file).lexically_normal().string();
    return cfg;
}

std::string ExperimentConfig::to_text() const {
    std::ostringstream os;
    os << "[grids]\n";
    for (const auto& g : grids) os << "grid n=" << g.dim << " J=" << g.depth << "\n";
    os << "\n[functions]\n";
    for (const auto& f : functions) os << corpus_line(f) << "\n";
    os << "\n[weights]\n";
    for (const auto& w : weights) os << corpus_line(w) << "\n";
    os << "\n[theorems]\n";
    for (const auto& t : theorems) {
        os << t.name;
        for (const auto& [k, v] : t.params) os << ' ' << k << '=' << v;
        os << "\n";
    }
    os << "\n[paths]\nbudgets file=" << budget_file << "\noutput dir=" << output_dir << "\n";
    os << "\n[run]\nthreads n=" << threads << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Budgets

Budgets Budgets::parse(const std::string& text) {
    Budgets b;
    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        try {
            const Entry e = parse_key_values(line);
            if (e.kind != "budget") throw DomainError("expected 'budget ...'");
            std::string theorem, scope = "any";
            int n = -1, J = -1;
            std::optional<double> value;
            for (const auto& [k, v] : e.params) {
                if (k == "theorem") theorem = v;
                else if (k == "n") n = static_cast<int>(parse_uint(v));
                else if (k == "J") J = static_cast<int>(parse_uint(v));
                else if (k == "scope") scope = v;
                else if (k == "value") value = parse_double(v);
                else throw DomainError("unknown key '" + k + "'");
            }
            if (theorem.empty() || n < 0 || J < 0 || !value) throw DomainError("budget needs theorem, n, J, value");
            b.set(theorem, n, J, scope, *value);
        } catch (const std::exception& ex) {
            throw ConfigError("budget line " + std::to_string(line_no) + ": " + ex.what());
        }
    }
    return b;
}

Budgets Budgets::load(const std::string& path) {
    return parse(read_text_file(path));
}

std::optional<double> Budgets::find(const std::string& theorem, int n, int J, const std::string& scope) const {
    auto it = entries_.find({theorem, n, J, scope});
    if (it != entries_.end()) return it->second;
    it = entries_.find({theorem, n, J, "any"});
    if (it != entries_.end()) return it->second;
    return std::nullopt;
}

void Budgets::set(const std::string& theorem, int n, int J, const std::string& scope, double value) {
    entries_[{theorem, n, J, scope}] = value;
}

std::string Budgets::to_text() const {
    std::ostringstream os;
    for (const auto& [key, v] : entries_) {
        const auto& [theorem, n, J, scope] = key;
        os << "budget theorem=" << theorem << " n=" << n << " J=" << J << " scope=" << scope
           << " value=" << format_double(v) << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Run

namespace {

struct CaseOutput {
    std::vector<VerificationRecord> records;
    std::vector<SurvivalExport> survivals;
};

struct Case {
    std::string id;
    std::function<void(CaseOutput&)> run;
};

std::string grid_tag(const GridConfig& g) { return "n" + std::to_string(g.dim) + "J" + std::to_string(g.depth); }

// Runs fn and turns a domain failure into an error record.
void guarded(CaseOutput& out, const std::string& theorem, const std::function<void()>& fn) {
    try {
        fn();
    } catch (const std::exception& ex) {
        VerificationRecord rec;
        rec.theorem = theorem;
        rec.status = RecordStatus::error;
        rec.note = ex.what();
        rec.finalize(INFINITY);
        out.records.push_back(rec);
    }
}

struct Weight {
    std::string id;
    GridFunction w;
    bool step = false;
};

const TheoremEntry* selected(const ExperimentConfig& cfg, const RunOptions& opt, const std::string& name) {
    if (!opt.theorems.empty() && !opt.theorems.count(name)) return nullptr;
    for (const auto& t : cfg.theorems)
        if (t.name == name) return &t;
    return nullptr;
}

std::vector<Scope> scopes_of(const TheoremEntry& t, const RunOptions& opt) {
    std::vector<Scope> out;
    for (const auto& s : t.strings("scope", {"dyadic"})) {
        const Scope sc = parse_scope(s);
        if (!opt.scope || *opt.scope == sc) out.push_back(sc);
    }
    return out;
}

void function_case(const ExperimentConfig& cfg, const RunOptions& opt, const GridConfig& grid,
                   const std::string& fid, const GridFunction& f, const std::vector<Weight>& weights,
                   CaseOutput& out) {
    const DyadicCube root = DyadicCube::root();
    const std::string base = grid_tag(grid) + "/" + fid;
    auto tag = [&](std::vector<VerificationRecord> recs, const std::string& wid) {
        for (auto& r : recs) {
            r.case_id = base + "/" + wid;
            out.records.push_back(std::move(r));
        }
    };

    if (const auto* t = selected(cfg, opt, "jn_ratio")) {
        const auto ps = t->doubles("p", {1, 2, 4, 8});
        const double r = t->doubles("r", {2}).front();
        for (Scope sc : scopes_of(*t, opt)) {
            guarded(out, "jn_ratio", [&] {
                const RatioField F = ratio_field(f, root, 0, sc);
                for (const auto& w : weights) tag(check_jn_ratio(F, w.w, ps, r, root), w.id);
            });
        }
    }
    if (const auto* t = selected(cfg, opt, "exponential_tail")) {
        const auto lambdas = t->doubles("lambda", {1, 2, 4});
        const auto gammas = t->doubles("gamma", {0.05, 0.1, 0.2, 0.4, 0.8});
        for (Scope sc : scopes_of(*t, opt)) {
            guarded(out, "exponential_tail", [&] {
                const RatioField F = ratio_field(f, root, 0, sc);
                for (const auto& w : weights) {
                    TailReport rep = check_exponential_tails(F, w.w, root, lambdas, gammas);
                    if (w.id == "unit")
                        out.survivals.push_back({base + "/" + w.id + "/" + to_string(sc), rep.fit.points});
                    tag(std::move(rep.records), w.id);
                }
            });
        }
    }
    if (const auto* t = selected(cfg, opt, "weighted_bmo")) {
        const auto ps = t->doubles("p", {2, 3});
        const auto rs = t->doubles("r", {1.5, 2});
        for (const auto& w : weights) {
            guarded(out, "weighted_bmo", [&] {
                std::vector<VerificationRecord> recs;
                for (double p : ps) {
                    for (double r : rs) recs.push_back(check_weighted_bmo(f, w.w, p, r, root));
                    recs.push_back(check_weighted_bmo_ap(f, w.w, p, root));
                }
                recs.push_back(check_weighted_bmo_exponential(f, w.w, root));
                tag(std::move(recs), w.id);
            });
        }
    }
    if (const auto* t = selected(cfg, opt, "poincare")) {
        const double r = t->doubles("r", {2}).front();
        for (const auto& w : weights) {
            if (!w.step) continue;
            guarded(out, "poincare", [&] {
                const GridFunction mu = gradient_density(f);
                const Functional raw = Functional::measure_quotient(grid, &mu, &w.w, r);
                const double scale = poincare_hypothesis_ratio(f, raw, root);
                const Functional a = raw.scaled(scale > 0.0 ? scale : 1.0);
                VerificationRecord rec = verify_poincare(f, a, w.w, r, root);
                rec.add_input("mu", "gradient");
                rec.finalize(INFINITY);
                tag({rec}, w.id);
            });
        }
    }
    if (const auto* t = selected(cfg, opt, "sharp_norm")) {
        const auto ps = t->doubles("p", {2});
        const double q = t->doubles("q", {3}).front();
        for (const auto& w : weights) {
            guarded(out, "sharp_norm", [&] {
                std::vector<VerificationRecord> recs;
                for (double p : ps) recs.push_back(check_sharp_norm_inequality(f, w.w, p, q));
                tag(std::move(recs), w.id);
            });
        }
    }
    if (const auto* t = selected(cfg, opt, "nondyadic")) {
        if (!opt.scope || *opt.scope == Scope::shifted) {
            const auto lm = t->doubles("lambda", {1.5, 3, 6});
            const auto gammas = t->doubles("gamma", {0.05, 0.1, 0.2, 0.4, 0.8});
            guarded(out, "nondyadic", [&] {
                double mean_abs = 0.0;
                for (double v : f.values()) mean_abs += std::abs(v);
                mean_abs /= static_cast<double>(f.size());
                std::vector<double> lambdas;
                for (double m : lm) lambdas.push_back(m * mean_abs);
                tag(check_nondyadic_jn(f, lambdas, gammas).records, "unit");
            });
        }
    }
    if (const auto* t = selected(cfg, opt, "polynomial")) {
        const auto ks = t->doubles("k", {1, 2});
        const auto ps = t->doubles("p", {1, 2, 4});
        const double r = t->doubles("r", {2}).front();
        for (double kd : ks) {
            const int k = static_cast<int>(kd);
            guarded(out, "polynomial", [&] {
                const RatioField F = ratio_field(f, root, k, Scope::dyadic);
                for (const auto& w : weights) {
                    if (!(w.step || w.id == "unit")) continue;
                    auto recs = check_polynomial_jn(F, w.w, ps, r, root);
                    for (double p : ps)
                        if (p > 1.0) recs.push_back(check_polynomial_weighted_bmo(f, w.w, p, r, k, root));
                    tag(std::move(recs), w.id);
                }
            });
        }
    }
    if (const auto* t = selected(cfg, opt, "bmo_lp")) {
        const auto ps = t->doubles("p", {1, 2, 4, 8});
        guarded(out, "bmo_lp", [&] {
            std::vector<VerificationRecord> recs;
            for (double p : ps) recs.push_back(check_bmo_lp(f, p, root));
            recs.push_back(check_bmo_tail(f, root));
            tag(std::move(recs), "unit");
        });
    }
    for (auto& r : out.records) {
        if (r.case_id.empty()) r.case_id = base;
        r.n = grid.dim;
        r.J = grid.depth;
        for (const auto& [k, v] : r.inputs)
            if (k == "scope") r.scope = v;
    }
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, const Budgets& budgets, const RunOptions& opt) {
    for (const auto& name : opt.theorems)
        if (!theorem_catalog().count(name)) throw ConfigError("unknown theorem '" + name + "'");

    std::vector<Case> cases;
    for (const auto& grid : cfg.grids) {
        std::vector<Weight> weights;
        weights.push_back({"unit", GridFunction(grid, std::vector<double>(grid.cells(), 1.0), Interpretation::weight),
                           false});
        for (const auto& w : cfg.weights) {
            if (w.dim && *w.dim != grid.dim) continue;
            weights.push_back({w.id, build_function(grid, w.spec), w.spec.kind == FunctionKind::step});
        }
        std::uint64_t martingale_index = 0;
        for (const auto& fe : cfg.functions) {
            if (fe.dim && *fe.dim != grid.dim) continue;
            FunctionSpec spec = fe.spec;
            if (spec.kind == FunctionKind::martingale && opt.seed_override)
                spec.seed = *opt.seed_override + martingale_index;
            if (spec.kind == FunctionKind::martingale) ++martingale_index;
            const std::string id = grid_tag(grid) + "/" + fe.id;
            cases.push_back({id, [&cfg, &opt, grid, fid = fe.id, spec, weights](CaseOutput& out) {
                                 const GridFunction f = build_function(grid, spec);
                                 function_case(cfg, opt, grid, fid, f, weights, out);
                             }});
        }
    }
    if (const auto* t = selected(cfg, opt, "power_ratio")) {
        const auto alphas = t->doubles("alpha", {0.1, 0.5, 1, 2, 10});
        cases.push_back({"power_ratio", [alphas](CaseOutput& out) {
                             for (double a : alphas) {
                                 const PowerRatioMinimum m = minimize_power_ratio(a);
                                 VerificationRecord rec;
                                 rec.theorem = "power_ratio_minimum";
                                 rec.case_id = "alpha=" + format_double(a);
                                 rec.add_input("alpha", a);
                                 rec.add_input("t_star", m.t_star);
                                 rec.add_input("search_min", m.search_min);
                                 rec.lhs = m.min;
                                 rec.factors = {{"e(1+1/alpha)", m.bound}};
                                 if (!m.pass) {
                                     rec.status = RecordStatus::error;
                                     rec.note = "closed form and search disagree";
                                 }
                                 rec.finalize(INFINITY);
                                 out.records.push_back(rec);
                             }
                         }});
    }

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<CaseOutput> outputs(cases.size());
    std::vector<double> runtimes(cases.size(), 0.0);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cases.size(); i = next++) {
            const auto start = std::chrono::steady_clock::now();
            guarded(outputs[i], "case", [&] { cases[i].run(outputs[i]); });
            runtimes[i] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        }
    };
    const int threads = std::max(1, opt.threads.value_or(cfg.threads));
    std::vector<std::thread> pool;
    for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    RunResult result;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        for (auto& r : outputs[i].records) {
            if (r.case_id.empty()) r.case_id = cases[i].id;
            const auto b = budgets.find(r.theorem, r.n, r.J, r.scope);
            r.finalize(b.value_or(INFINITY));
            if (!b) {
                r.pass = false;
                r.note += r.note.empty() ? "no budget pinned" : "; no budget pinned";
            }
            result.all_pass = result.all_pass && r.pass;
            result.records.push_back(std::move(r));
        }
        for (auto& s : outputs[i].survivals) result.survivals.push_back(std::move(s));
        result.case_runtimes_ms.emplace_back(cases[i].id, runtimes[i]);
    }
    std::stable_sort(result.records.begin(), result.records.end(), [](const auto& a, const auto& b) {
        return std::tie(a.case_id, a.theorem) < std::tie(b.case_id, b.theorem);
    });
    result.total_runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

// ---------------------------------------------------------------------------
// Output

std::string report_jsonl(const std::vector<VerificationRecord>& records) {
    std::string out = "{\"report\":\"jnkit-verify\",\"schema\":1,\"records\":" + std::to_string(records.size()) + "}\n";
    for (const auto& r : records) out += to_json_line(r) + "\n";
    return out;
}

namespace {

std::string csv_number(double v) { return format_double(v); }

}  // namespace

std::string summary_csv(const std::vector<VerificationRecord>& records) {
    struct Row {
        std::size_t count = 0;
        double max_constant = 0.0;
        double budget = 0.0;
        bool pass = true;
    };
    std::map<std::tuple<std::string, int, int, std::string>, Row> rows;
    for (const auto& r : records) {
        Row& row = rows[{r.theorem, r.n, r.J, r.scope}];
        ++row.count;
        row.max_constant = std::max(row.max_constant, r.constant);
        row.budget = r.budget;
        row.pass = row.pass && r.pass;
    }
    std::ostringstream os;
    os << "theorem,n,J,scope,records,max_constant,budget,pass\n";
    for (const auto& [key, row] : rows) {
        const auto& [theorem, n, J, scope] = key;
        os << theorem << ',' << n << ',' << J << ',' << scope << ',' << row.count << ','
           << csv_number(row.max_constant) << ',' << csv_number(row.budget) << ',' << (row.pass ? "pass" : "fail")
           << "\n";
    }
    return os.str();
}

std::string records_csv(const std::vector<VerificationRecord>& records) {
    std::ostringstream os;
    os << "theorem,case_id,lhs,factors,constant,budget,pass\n";
    for (const auto& r : records) {
        std::string factors;
        for (const auto& f : r.factors) {
            if (!factors.empty()) factors += ';';
            factors += f.name + "=" + csv_number(f.value);
        }
        os << r.theorem << ',' << r.case_id << ',' << csv_number(r.lhs) << ",\"" << factors << "\","
           << csv_number(r.constant) << ',' << csv_number(r.budget) << ',' << (r.pass ? "pass" : "fail") << "\n";
    }
    return os.str();
}

std::vector<VerificationRecord> parse_report(const std::string& text) {
    std::vector<VerificationRecord> out;
    std::istringstream in(text);
    std::string line;
    auto number = [](const nlohmann::ordered_json& j) {
        return j.is_string() ? parse_double(j.get<std::string>()) : j.get<double>();
    };
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        nlohmann::ordered_json j;
        try {
            j = nlohmann::ordered_json::parse(line);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("malformed report line: ") + e.what());
        }
        if (!j.contains("theorem")) continue;  // header
        VerificationRecord r;
        r.theorem = j.at("theorem");
        r.case_id = j.at("case_id");
        r.n = j.value("n", 0);
        r.J = j.value("J", 0);
        r.scope = j.value("scope", "any");
        const std::string status = j.value("status", "ok");
        r.status = status == "error" ? RecordStatus::error : status == "skipped" ? RecordStatus::skipped : RecordStatus::ok;
        for (auto& [k, v] : j.at("inputs").items()) r.inputs.emplace_back(k, v.get<std::string>());
        r.lhs = number(j.at("lhs"));
        for (const auto& f : j.at("factors")) r.factors.push_back({f.at("name"), number(f.at("value"))});
        r.constant = number(j.at("constant"));
        r.budget = number(j.at("budget"));
        r.pass = j.at("pass");
        r.note = j.value("note", "");
        out.push_back(std::move(r));
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    os << text;
    if (!os) throw IoError("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_outputs(const RunResult& result, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(fs::path(dir) / "survival", ec);
    if (ec) throw IoError("cannot create '" + dir + "': " + ec.message());
    write_text_file((fs::path(dir) / "report.jsonl").string(), report_jsonl(result.records));
    write_text_file((fs::path(dir) / "summary.csv").string(), summary_csv(result.records));
    write_text_file((fs::path(dir) / "records.csv").string(), records_csv(result.records));
    for (const auto& s : result.survivals) {
        std::string name = s.name;
        std::replace(name.begin(), name.end(), '/', '_');
        write_text_file((fs::path(dir) / "survival" / (name + ".csv")).string(), survival_csv(s.points));
    }
    std::ostringstream rt;
    rt << "case_id,runtime_ms\n";
    for (const auto& [id, ms] : result.case_runtimes_ms) rt << id << ',' << format_double(ms) << "\n";
    rt << "total," << format_double(result.total_runtime_ms) << "\n";
    write_text_file((fs::path(dir) / "runtimes.csv").string(), rt.str());
}

}  // namespace jnkit
