#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace bpb::cli {

enum ExitCode : int {
    kPass = 0,
    kAssertionFailed = 1,
    kUsage = 2,
    kUncertifiable = 3,
};

/// Rows of strings under a fixed header.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row);
    /// Header plus rows, fields quoted when they hold a comma, quote or newline.
    std::string to_csv() const;
    /// One object per row; numeric-looking cells become numbers, empty cells null.
    nlohmann::json to_json() const;
};

struct Assertion {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ExperimentResult {
    std::string name;
    nlohmann::json params;
    Table table;
    std::vector<Assertion> assertions;
    nlohmann::json notes = nlohmann::json::object();

    bool pass() const;
    nlohmann::json summary() const;
};

/// Overrides accepted by `reproduce`; each experiment reads the ones it needs.
struct ExperimentConfig {
    std::vector<double> eps;
    std::vector<double> rho;
    std::vector<std::string> codomains;
    std::string domain;
    std::optional<double> eps0;
    std::optional<double> delta;
    std::optional<double> alpha0;
    std::optional<int> n;
    std::optional<int> instances;
    std::optional<int> spaces;
    std::optional<double> outer_mesh;
    std::optional<double> target_width;
    bool bounds_only = false;
    std::uint64_t seed = 1;
    int jobs = 1;
};

const std::vector<std::string>& experiment_names();

/// Throws InputError for unknown names or parameters outside the experiment's domain.
ExperimentResult run_experiment(const std::string& name, const ExperimentConfig& cfg);

/// Full command line without the program name. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Fixed-format number used in every CSV cell.
std::string fmt(double v);

}  // namespace bpb::cli
