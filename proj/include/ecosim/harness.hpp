#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ecosim/diversity.hpp"
#include "ecosim/evolution.hpp"
#include "ecosim/habitat.hpp"

namespace ecosim {

/// Invalid experiment configuration; `field` names the offending key.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& what);
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

enum class ExperimentKind {
    Evolve,
    Complexity,
    Clustering,
    Stability,
    Sweep,
    DiversityLength,
    DiversityModularity,
    Habitat,
};

std::string to_string(ExperimentKind kind);
ExperimentKind parse_kind(const std::string& name);
const std::vector<ExperimentKind>& all_kinds();

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Evolve;
    EvolutionConfig evolution{};
    std::size_t replicates = 1;
    std::size_t horizon = 300;  // stability and sweep
    RngSeed seed{1};
    RngSeed scenario_seed{1};
    std::size_t services = 8;  // single-optimum scenario
    std::filesystem::path out_dir = "out";
    unsigned workers = 0;

    double half_tolerance = 0.01;
    std::size_t window = 50;
    double epsilon = 0.01;

    Law law = Law::Uniform;
    int lo = 0;  // 0 picks the kind default: [2, 18] for length, [2, 12] for modularity
    int hi = 0;
    int fixed_length = 4;
    int fixed_modularity = 3;
    std::size_t pool_size = 20;
    double percentile = 0.95;

    SharingConfig sharing{};

    /// Throws ConfigError naming the first invalid field.
    void validate() const;
    RequestDistribution length_law() const;
    RequestDistribution modularity_law() const;
};

/// Sectioned key = value text ([experiment], [evolution], [stability],
/// [diversity], [habitat]). Unknown sections or keys are errors.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

struct SeriesStats {
    std::vector<double> mean;
    std::vector<double> stddev;  // population standard deviation
};

/// Column-wise mean and stddev over equal-length series. NaN entries are
/// skipped; a column with no finite entry yields NaN. The result does not
/// depend on series order.
SeriesStats aggregate(const std::vector<std::vector<double>>& series);

struct TraceAggregate {
    std::vector<std::size_t> generation;
    SeriesStats max_fitness;
    SeriesStats mean_fitness;
    SeriesStats mean_length;
    SeriesStats population_size;
    SeriesStats complexity;
    SeriesStats efficiency;
};

TraceAggregate aggregate(const std::vector<std::vector<GenerationTrace>>& traces);

void write_trace_csv(std::ostream& out, const std::vector<GenerationTrace>& traces);
void write_aggregate_csv(std::ostream& out, const TraceAggregate& agg);

/// Runs the experiment, writes its artifacts under cfg.out_dir and returns the
/// summary (also written as summary.json).
nlohmann::json run_experiment(const ExperimentConfig& cfg);

}  // namespace ecosim
