#pragma once

// Experiment configuration, budgets and the parallel verification run.
//
// Config files are plain text with [sections]; every other non-blank,
// non-comment line is `kind key=value ...`:
//
//   [grids]      grid n=1 J=10
//   [functions]  martingale id=m00 seed=17 amplitude=1      (any FunctionSpec kind; optional n=)
//   [weights]    step id=w1 n=1 values=1,1,1,4             (weights; w = 1 is always included)
//   [theorems]   jn_ratio p=1,2,4,8 r=2 scope=dyadic,shifted
//   [paths]      budgets file=data/budgets.txt
//   [run]        threads n=1

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "jnkit/grid.hpp"
#include "jnkit/maximal.hpp"
#include "jnkit/record.hpp"

namespace jnkit {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CorpusEntry {
    std::string id;
    std::optional<int> dim;  ///< restricts the entry to one dimension
    FunctionSpec spec;
};

struct TheoremEntry {
    std::string name;
    std::vector<std::pair<std::string, std::string>> params;

    std::vector<double> doubles(const std::string& key, std::vector<double> fallback) const;
    std::vector<std::string> strings(const std::string& key, std::vector<std::string> fallback) const;
};

/// Names accepted in [theorems] with their allowed keys.
const std::map<std::string, std::set<std::string>>& theorem_catalog();

struct ExperimentConfig {
    std::vector<GridConfig> grids;
    std::vector<CorpusEntry> functions;
    std::vector<CorpusEntry> weights;
    std::vector<TheoremEntry> theorems;
    std::string budget_file;
    std::string output_dir = "out";
    int threads = 1;

    /// Throws ConfigError with the offending line number.
    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig load(const std::string& path);
    /// Canonical text; parse(to_text()) reproduces the config.
    std::string to_text() const;
};

/// Pinned upper bounds for empirical constants, keyed by (theorem, n, J, scope).
/// Lines: `budget theorem=NAME n=1 J=10 scope=dyadic value=2.5`; scope=any
/// matches every scope.
class Budgets {
public:
    static Budgets parse(const std::string& text);
    static Budgets load(const std::string& path);

    std::optional<double> find(const std::string& theorem, int n, int J, const std::string& scope) const;
    void set(const std::string& theorem, int n, int J, const std::string& scope, double value);
    std::string to_text() const;

private:
    std::map<std::tuple<std::string, int, int, std::string>, double> entries_;
};

struct RunOptions {
    std::set<std::string> theorems;          ///< empty means every configured theorem
    std::optional<std::uint64_t> seed_override;
    std::optional<Scope> scope;              ///< restricts scope-dependent checks
    std::optional<int> threads;
};

struct SurvivalExport {
    std::string name;
    std::vector<SurvivalPoint> points;
};

struct RunResult {
    std::vector<VerificationRecord> records;  ///< sorted by (case_id, theorem)
    std::vector<SurvivalExport> survivals;
    std::vector<std::pair<std::string, double>> case_runtimes_ms;
    double total_runtime_ms = 0.0;
    bool all_pass = true;
};

RunResult run_experiment(const ExperimentConfig& cfg, const Budgets& budgets, const RunOptions& opt = {});

/// Header line plus one JSON object per record.
std::string report_jsonl(const std::vector<VerificationRecord>& records);
/// theorem,n,J,scope,records,max_constant,budget,pass
std::string summary_csv(const std::vector<VerificationRecord>& records);
/// theorem,case_id,lhs,factors,constant,budget,pass
std::string records_csv(const std::vector<VerificationRecord>& records);

/// Re-reads a JSON-lines report (for the report subcommand).
std::vector<VerificationRecord> parse_report(const std::string& text);

/// Writes report.jsonl, summary.csv, records.csv, survival/*.csv and
/// runtimes.csv under dir. Throws IoError.
void write_outputs(const RunResult& result, const std::string& dir);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace jnkit
