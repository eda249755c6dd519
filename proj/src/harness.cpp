#include "ecosim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "ecosim/complexity.hpp"
#include "ecosim/parallel.hpp"
#include "ecosim/scenario.hpp"
#include "ecosim/snapshot.hpp"
#include "ecosim/stability.hpp"

namespace ecosim {

namespace fs = std::filesystem;
using nlohmann::json;

ConfigError::ConfigError(std::string field, const std::string& what)
    : Error(fmt::format("{}: {}", field, what)), field_(std::move(field)) {}

namespace {

const std::vector<std::pair<ExperimentKind, std::string>>& kind_names() {
    static const std::vector<std::pair<ExperimentKind, std::string>> names{
        {ExperimentKind::Evolve, "evolve"},
        {ExperimentKind::Complexity, "complexity"},
        {ExperimentKind::Clustering, "clustering"},
        {ExperimentKind::Stability, "stability"},
        {ExperimentKind::Sweep, "sweep"},
        {ExperimentKind::DiversityLength, "diversity-length"},
        {ExperimentKind::DiversityModularity, "diversity-modularity"},
        {ExperimentKind::Habitat, "habitat"},
    };
    return names;
}

template <typename T>
T parse_number(const std::string& field, const std::string& text) {
    try {
        std::size_t used = 0;
        T value{};
        if constexpr (std::is_floating_point_v<T>) {
            value = static_cast<T>(std::stod(text, &used));
        } else if constexpr (std::is_signed_v<T>) {
            value = static_cast<T>(std::stoll(text, &used));
        } else {
            if (!text.empty() && text.front() == '-') {
                throw std::invalid_argument("negative");
            }
            value = static_cast<T>(std::stoull(text, &used));
        }
        if (used != text.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return value;
    } catch (const std::exception&) {
        throw ConfigError(field, fmt::format("'{}' is not a valid number", text));
    }
}

std::string fmt_double(double v) {
    if (!std::isfinite(v)) {
        return "";
    }
    return fmt::format("{}", v);
}

double json_number(double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN(); }

std::ofstream open_out(const fs::path& path) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(fmt::format("cannot write {}", path.string()));
    }
    return out;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

EvolutionConfig replicate_config(const ExperimentConfig& cfg, std::size_t r) {
    EvolutionConfig evo = cfg.evolution;
    evo.seed = derive_seed(cfg.seed, r);
    return evo;
}

json run_evolve(const ExperimentConfig& cfg, bool complexity_view) {
    const auto sc = single_optimum_scenario(cfg.scenario_seed, cfg.services, cfg.pool_size);
    std::vector<std::optional<RunResult>> slots(cfg.replicates);
    parallel_for(cfg.replicates, [&](std::size_t r) {
        slots[r].emplace(run(replicate_config(cfg, r), sc.request, sc.pool));
    }, cfg.workers);
    std::vector<RunResult> results;
    for (auto& s : slots) {
        results.push_back(std::move(*s));
    }

    std::vector<std::vector<GenerationTrace>> traces;
    for (const auto& res : results) {
        traces.push_back(res.traces);
    }
    const auto agg = aggregate(traces);
    json summary;
    summary["services"] = cfg.services;

    if (!complexity_view) {
        for (std::size_t r = 0; r < results.size(); ++r) {
            auto out = open_out(cfg.out_dir / "traces" / fmt::format("replicate_{}.csv", r));
            write_trace_csv(out, results[r].traces);
        }
        auto out = open_out(cfg.out_dir / "aggregate.csv");
        write_aggregate_csv(out, agg);
        std::vector<double> finals;
        for (const auto& res : results) {
            finals.push_back(res.traces.back().max_fitness);
        }
        summary["final_max_fitness"] = finals;
        summary["best_length"] = results.front().best.size();
        return summary;
    }

    {
        auto out = open_out(cfg.out_dir / "phycom.csv");
        out << "generation,max_fitness,complexity\n";
        for (std::size_t t = 0; t < agg.generation.size(); ++t) {
            out << fmt::format("{},{},{}\n", agg.generation[t], fmt_double(agg.max_fitness.mean[t]),
                               fmt_double(agg.complexity.mean[t]));
        }
    }
    {
        auto out = open_out(cfg.out_dir / "efficiency.csv");
        out << "generation,efficiency\n";
        for (std::size_t t = 0; t < agg.generation.size(); ++t) {
            out << fmt::format("{},{}\n", agg.generation[t], fmt_double(agg.efficiency.mean[t]));
        }
    }
    const auto& final_pop = results.front().final_population;
    {
        auto out = open_out(cfg.out_dir / "final_population.txt");
        write_snapshot(out, final_pop);
    }
    try {
        const auto rep = analyze(final_pop);
        summary["effective_length"] = rep.effective_length;
        summary["complexity"] = rep.complexity;
        summary["efficiency"] = rep.efficiency;
        summary["site_entropies"] = rep.site_entropies;
        summary["sample_sizes"] = rep.sample_sizes;
    } catch (const PopulationTooSmall& e) {
        summary["complexity_error"] = e.what();
    }
    return summary;
}

json run_clustering(const ExperimentConfig& cfg) {
    struct Outcome {
        std::vector<GenerationTrace> traces;
        Population final_population;
        double tail_efficiency = 0.0;
        ClusterSet clusters;
        double clustered_efficiency = 0.0;
    };
    const std::size_t tail = std::min<std::size_t>(100, cfg.evolution.max_generations + 1);
    std::vector<Outcome> outcomes(cfg.replicates);
    parallel_for(cfg.replicates, [&](std::size_t r) {
        const auto sc = two_optima_scenario(derive_seed(cfg.scenario_seed, r));
        auto evo = replicate_config(cfg, r);
        evo.track_complexity = true;
        Rng init(derive_seed(evo.seed, 0));
        auto pop = initial_population(sc.pool, evo.base_population_size, init);
        auto res = run(evo, {sc.first, sc.second}, std::move(pop));
        auto& o = outcomes[r];
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t t = res.traces.size() - tail; t < res.traces.size(); ++t) {
            if (res.traces[t].efficiency) {
                sum += *res.traces[t].efficiency;
                ++n;
            }
        }
        o.tail_efficiency = n ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
        o.clusters = detect_clusters(res.final_population);
        o.clustered_efficiency = efficiency_clustered(res.final_population, o.clusters);
        o.traces = std::move(res.traces);
        o.final_population = std::move(res.final_population);
    }, cfg.workers);

    const double limit = expected_cluster_efficiency(15, 2);
    std::vector<std::vector<GenerationTrace>> traces;
    for (const auto& o : outcomes) {
        traces.push_back(o.traces);
    }
    const auto agg = aggregate(traces);
    {
        auto out = open_out(cfg.out_dir / "coefficient.csv");
        out << "generation,efficiency_mean,efficiency_stddev,expected_limit\n";
        for (std::size_t t = 0; t < agg.generation.size(); ++t) {
            out << fmt::format("{},{},{},{}\n", agg.generation[t], fmt_double(agg.efficiency.mean[t]),
                               fmt_double(agg.efficiency.stddev[t]), limit);
        }
    }
    {
        auto out = open_out(cfg.out_dir / "final_population.txt");
        write_snapshot(out, outcomes.front().final_population);
    }
    json reps = json::array();
    std::size_t passing = 0;
    for (const auto& o : outcomes) {
        json c = json::array();
        bool pure_pair = o.clusters.count() == 2 && !o.clusters.inconclusive;
        for (const auto& cl : o.clusters.clusters) {
            c.push_back({{"size", cl.members.size()}, {"efficiency", cl.report.efficiency},
                         {"effective_length", cl.report.effective_length}});
            pure_pair = pure_pair && cl.report.efficiency >= 0.9;
        }
        const bool pass = std::abs(o.tail_efficiency - limit) <= 0.05 && pure_pair;
        passing += pass;
        reps.push_back({{"tail_efficiency", json_number(o.tail_efficiency)},
                        {"cluster_count", o.clusters.count()},
                        {"inconclusive", o.clusters.inconclusive},
                        {"clusters", c},
                        {"clustered_efficiency", o.clustered_efficiency},
                        {"pass", pass}});
    }
    return json{{"expected_limit", limit},
                {"implied_cluster_count_of_limit", invert_cluster_count(limit, 15)},
                {"tail_generations", tail},
                {"replicate_results", reps},
                {"passing_replicates", passing},
                {"majority_pass", 2 * passing > cfg.replicates}};
}

OccupationOptions occupation_options(const ExperimentConfig& cfg) {
    OccupationOptions o;
    o.replicates = cfg.replicates;
    o.horizon = cfg.horizon;
    o.half_tolerance = cfg.half_tolerance;
    o.master_seed = cfg.seed;
    o.workers = cfg.workers;
    return o;
}

json run_stability(const ExperimentConfig& cfg) {
    const auto sc = single_optimum_scenario(cfg.scenario_seed, cfg.services, cfg.pool_size);
    const auto curves = estimate_occupation(cfg.evolution, sc.request, sc.pool, occupation_options(cfg));
    const StabilityCriteria criteria{cfg.window, cfg.epsilon};
    const auto rep = instability_report(curves, criteria);
    {
        auto out = open_out(cfg.out_dir / "macrostates.csv");
        out << "generation,p_Mmax,p_Mhalf";
        for (std::size_t d = 0; d < kOtherBuckets; ++d) {
            out << ",p_other" << d;
        }
        out << "\n";
        for (const auto& c : curves) {
            out << fmt::format("{},{},{}", c.generation, c.probability(kMaxBucket), c.probability(kHalfBucket));
            for (std::size_t d = 0; d < kOtherBuckets; ++d) {
                out << "," << fmt_double(c.probability(d));
            }
            out << "\n";
        }
    }
    double peak = 0.0;
    std::size_t peak_at = 0;
    for (const auto& c : curves) {
        if (c.probability(kHalfBucket) > peak) {
            peak = c.probability(kHalfBucket);
            peak_at = c.generation;
        }
    }
    json first_all_max = nullptr;
    for (const auto& c : curves) {
        if (c.counts[kMaxBucket] == c.replicates) {
            first_all_max = c.generation;
            break;
        }
    }
    return json{{"d_ins", rep.d_ins},
                {"stable", rep.stable},
                {"buckets", rep.buckets},
                {"limit_distribution", rep.limit},
                {"p_Mmax_final", rep.limit[kMaxBucket]},
                {"p_Mhalf_final", rep.limit[kHalfBucket]},
                {"p_Mhalf_peak", peak},
                {"p_Mhalf_peak_generation", peak_at},
                {"first_generation_all_Mmax", first_all_max},
                {"horizon", cfg.horizon},
                {"replicates", cfg.replicates}};
}

json run_sweep(const ExperimentConfig& cfg) {
    const auto sc = single_optimum_scenario(cfg.scenario_seed, cfg.services, cfg.pool_size);
    const auto grid = percent_grid();
    const auto cells = stability_sweep(cfg.evolution, sc.request, sc.pool, occupation_options(cfg), grid, grid,
                                       StabilityCriteria{cfg.window, cfg.epsilon});
    json rows = json::array();
    auto out = open_out(cfg.out_dir / "sweep.csv");
    out << "mutation_pct,crossover_pct,d_ins\n";
    for (const auto& c : cells) {
        out << fmt::format("{},{},{}\n", c.mutation_pct, c.crossover_pct, c.report.d_ins);
        rows.push_back({{"mutation_pct", c.mutation_pct},
                        {"crossover_pct", c.crossover_pct},
                        {"d_ins", c.report.d_ins},
                        {"stable", c.report.stable},
                        {"p_Mmax", c.report.limit[kMaxBucket]}});
    }
    return json{{"cells", rows}, {"replicates", cfg.replicates}, {"horizon", cfg.horizon}};
}

json run_diversity(const ExperimentConfig& cfg, bool length) {
    DiversityConfig dc;
    dc.replicates = cfg.replicates;
    dc.pool_size = cfg.pool_size;
    dc.evolution = cfg.evolution;
    dc.master_seed = cfg.seed;
    dc.percentile = cfg.percentile;
    dc.workers = cfg.workers;
    const auto len_law = length ? cfg.length_law() : RequestDistribution::make(Law::Uniform, cfg.fixed_length, cfg.fixed_length);
    const auto mod_law = length ? RequestDistribution::make(Law::Uniform, cfg.fixed_modularity, cfg.fixed_modularity)
                                : cfg.modularity_law();
    const auto [by_length, by_modularity] = run_diversity_experiment(len_law, mod_law, dc);
    const auto& res = length ? by_length : by_modularity;
    {
        auto out = open_out(cfg.out_dir / "diversity.csv");
        out << "bin,observed,expected\n";
        for (std::size_t i = 0; i < res.values.size(); ++i) {
            out << fmt::format("{},{},{}\n", res.values[i], res.observed[i], res.expected[i]);
        }
    }
    return json{{"property", res.property},
                {"law", to_string(res.law.law)},
                {"support", {res.law.lo, res.law.hi}},
                {"statistic", res.statistic},
                {"dof", res.dof},
                {"merged_bins", res.merged_bins},
                {"critical_lower", res.critical_lower},
                {"critical_upper", res.critical_upper},
                {"pass_lower", res.pass_lower},
                {"pass_upper", res.pass_upper},
                {"observed_mean", res.observed_mean},
                {"expected_mean", res.expected_mean},
                {"rank_correlation", res.rank_correlation},
                {"replicates", cfg.replicates}};
}

json run_habitat(const ExperimentConfig& cfg) {
    SharingConfig sc = cfg.sharing;
    sc.evolution = cfg.evolution;
    std::vector<SharingTrial> trials(cfg.replicates);
    parallel_for(cfg.replicates, [&](std::size_t r) {
        trials[r] = sharing_trial(sc, derive_seed(cfg.seed, r));
    }, cfg.workers);

    const double never = static_cast<double>(cfg.evolution.max_generations + 1);
    std::vector<double> shared;
    std::vector<double> isolated;
    std::size_t migrated = 0;
    {
        auto out = open_out(cfg.out_dir / "sharing.csv");
        out << "replicate,migrated,generations_shared,generations_isolated\n";
        for (std::size_t r = 0; r < trials.size(); ++r) {
            const auto& t = trials[r];
            shared.push_back(t.shared ? static_cast<double>(*t.shared) : never);
            isolated.push_back(t.isolated ? static_cast<double>(*t.isolated) : never);
            migrated += t.migrated;
            out << fmt::format("{},{},{},{}\n", r, t.migrated ? 1 : 0,
                               t.shared ? std::to_string(*t.shared) : "", t.isolated ? std::to_string(*t.isolated) : "");
        }
    }
    {
        auto out = open_out(cfg.out_dir / "migrations.csv");
        out << "step,from,to,success,p_after\n";
        for (std::size_t r = 0; r < trials.size(); ++r) {
            for (const auto& e : trials[r].migrations) {
                out << fmt::format("{},{},{},{},{}\n", r, e.from, e.to, e.success ? 1 : 0, e.p_after);
            }
        }
    }
    {
        auto out = open_out(cfg.out_dir / "topology.csv");
        out << "a,b,p_ab,p_ba\n";
        for (const auto& c : trials.front().topology) {
            out << fmt::format("{},{},{},{}\n", c.a, c.b, c.p_ab, c.p_ba);
        }
    }
    const double med_shared = median(shared);
    const double med_isolated = median(isolated);
    return json{{"median_generations_shared", med_shared},
                {"median_generations_isolated", med_isolated},
                {"accelerated", med_shared < med_isolated},
                {"migrated_trials", migrated},
                {"replicates", cfg.replicates}};
}

}  // namespace

std::string to_string(ExperimentKind kind) {
    for (const auto& [k, name] : kind_names()) {
        if (k == kind) {
            return name;
        }
    }
    return "?";
}

ExperimentKind parse_kind(const std::string& name) {
    for (const auto& [k, n] : kind_names()) {
        if (n == name) {
            return k;
        }
    }
    throw ConfigError("experiment.kind", fmt::format("unknown experiment kind '{}'", name));
}

const std::vector<ExperimentKind>& all_kinds() {
    static const std::vector<ExperimentKind> kinds = [] {
        std::vector<ExperimentKind> out;
        for (const auto& [k, name] : kind_names()) {
            out.push_back(k);
        }
        return out;
    }();
    return kinds;
}

RequestDistribution ExperimentConfig::length_law() const {
    return RequestDistribution::make(law, lo ? lo : 2, hi ? hi : 18);
}

RequestDistribution ExperimentConfig::modularity_law() const {
    return RequestDistribution::make(law, lo ? lo : 2, hi ? hi : 12);
}

void ExperimentConfig::validate() const {
    auto check = [](bool ok, const char* field, const std::string& what) {
        if (!ok) {
            throw ConfigError(field, what);
        }
    };
    try {
        evolution.validate();
    } catch (const ValidationError& e) {
        throw ConfigError("evolution", e.what());
    }
    check(evolution.max_generations >= 1, "evolution.max_generations", "must be >= 1");
    check(replicates >= 1, "experiment.replicates", "must be >= 1");
    check(horizon >= 1, "experiment.horizon", "must be >= 1");
    check(services >= 4 && services <= 24, "experiment.services", "must lie in [4, 24]");
    check(pool_size >= 1, "diversity.pool_size", "must be >= 1");
    check(half_tolerance >= 0.0, "stability.half_tolerance", "must be >= 0");
    check(window >= 1, "stability.window", "must be >= 1");
    check(epsilon > 0.0, "stability.epsilon", "must be > 0");
    check(percentile > 0.0 && percentile < 1.0, "diversity.percentile", "must lie in (0, 1)");
    check(fixed_length >= 1, "diversity.fixed_length", "must be >= 1");
    check(fixed_modularity >= 1, "diversity.fixed_modularity", "must be >= 1");
    check(lo >= 0 && hi >= 0, "diversity.lo", "support bounds must be positive");
    if (lo || hi) {
        check(lo >= 1 && hi >= lo, "diversity.hi", fmt::format("support [{}, {}] invalid", lo, hi));
    }
    check(sharing.services >= 2, "habitat.services", "must be >= 2");
    check(sharing.modularity >= 1, "habitat.modularity", "must be >= 1");
    check(sharing.pool_size >= 1, "habitat.pool_size", "must be >= 1");
    check(sharing.connection_probability >= 0.0 && sharing.connection_probability <= 1.0,
          "habitat.connection_probability", "must lie in [0, 1]");
    check(sharing.target_fraction > 0.0 && sharing.target_fraction <= 1.0, "habitat.target_fraction",
          "must lie in (0, 1]");
    try {
        sharing.network.validate();
    } catch (const ValidationError& e) {
        throw ConfigError("habitat", e.what());
    }
}

ExperimentConfig parse_config(std::istream& in) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("config", fmt::format("line {}: {}", e.line(), e.message()));
    }

    ExperimentConfig cfg;
    using Setter = std::function<void(const std::string& field, const std::string& value)>;
    auto u64 = [](std::size_t& dst) {
        return Setter([&dst](const auto& f, const auto& v) { dst = parse_number<std::size_t>(f, v); });
    };
    auto real = [](double& dst) {
        return Setter([&dst](const auto& f, const auto& v) { dst = parse_number<double>(f, v); });
    };
    auto integer = [](int& dst) {
        return Setter([&dst](const auto& f, const auto& v) { dst = parse_number<int>(f, v); });
    };
    auto seed = [](RngSeed& dst) {
        return Setter([&dst](const auto& f, const auto& v) { dst.value = parse_number<std::uint64_t>(f, v); });
    };
    auto& sh = cfg.sharing;
    auto& net = sh.network;
    const std::map<std::string, std::map<std::string, Setter>> schema{
        {"experiment",
         {{"kind", [&](const auto&, const auto& v) { cfg.kind = parse_kind(v); }},
          {"replicates", u64(cfg.replicates)},
          {"horizon", u64(cfg.horizon)},
          {"seed", seed(cfg.seed)},
          {"scenario_seed", seed(cfg.scenario_seed)},
          {"services", u64(cfg.services)},
          {"out", [&](const auto&, const auto& v) { cfg.out_dir = v; }},
          {"workers", [&](const auto& f, const auto& v) { cfg.workers = parse_number<unsigned>(f, v); }}}},
        {"evolution",
         {{"mutation_rate", real(cfg.evolution.mutation_rate)},
          {"crossover_rate", real(cfg.evolution.crossover_rate)},
          {"base_population_size", u64(cfg.evolution.base_population_size)},
          {"parsimony_coefficient", real(cfg.evolution.parsimony_coefficient)},
          {"max_generations", u64(cfg.evolution.max_generations)}}},
        {"stability",
         {{"half_tolerance", real(cfg.half_tolerance)}, {"window", u64(cfg.window)}, {"epsilon", real(cfg.epsilon)}}},
        {"diversity",
         {{"law", [&](const auto& f, const auto& v) {
               try {
                   cfg.law = parse_law(v);
               } catch (const ValidationError& e) {
                   throw ConfigError(f, e.what());
               }
           }},
          {"lo", integer(cfg.lo)},
          {"hi", integer(cfg.hi)},
          {"fixed_length", integer(cfg.fixed_length)},
          {"fixed_modularity", integer(cfg.fixed_modularity)},
          {"pool_size", u64(cfg.pool_size)},
          {"percentile", real(cfg.percentile)}}},
        {"habitat",
         {{"services", u64(sh.services)},
          {"modularity", u64(sh.modularity)},
          {"pool_size", u64(sh.pool_size)},
          {"connection_probability", real(sh.connection_probability)},
          {"target_fraction", real(sh.target_fraction)},
          {"reinforce", real(net.hebbian.reinforce)},
          {"decay", real(net.hebbian.decay)},
          {"floor", real(net.hebbian.floor)},
          {"ceiling", real(net.hebbian.ceiling)},
          {"usefulness_threshold", real(net.usefulness_threshold)},
          {"reuse_threshold", real(net.reuse_threshold)},
          {"request_window", u64(net.request_window)},
          {"new_agent_rate", real(net.new_agent_rate)}}},
    };

    for (const auto& [section, body] : tree) {
        auto sit = schema.find(section);
        if (sit == schema.end()) {
            throw ConfigError(section, "unknown section");
        }
        if (!body.data().empty()) {
            throw ConfigError(section, "expected a [section] header");
        }
        for (const auto& [key, value] : body) {
            const std::string field = section + "." + key;
            auto kit = sit->second.find(key);
            if (kit == sit->second.end()) {
                throw ConfigError(field, "unknown key");
            }
            kit->second(field, value.data());
        }
    }
    return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config", fmt::format("cannot read {}", path.string()));
    }
    return parse_config(in);
}

SeriesStats aggregate(const std::vector<std::vector<double>>& series) {
    SeriesStats out;
    if (series.empty()) {
        return out;
    }
    const std::size_t len = series.front().size();
    for (const auto& s : series) {
        if (s.size() != len) {
            throw ValidationError(fmt::format("ragged traces: lengths {} and {}", len, s.size()));
        }
    }
    out.mean.resize(len);
    out.stddev.resize(len);
    std::vector<double> column;
    for (std::size_t t = 0; t < len; ++t) {
        column.clear();
        for (const auto& s : series) {
            if (std::isfinite(s[t])) {
                column.push_back(s[t]);
            }
        }
        if (column.empty()) {
            out.mean[t] = out.stddev[t] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        std::sort(column.begin(), column.end());
        double sum = 0.0;
        for (double v : column) {
            sum += v;
        }
        const double mean = sum / static_cast<double>(column.size());
        double ss = 0.0;
        for (double v : column) {
            ss += (v - mean) * (v - mean);
        }
        out.mean[t] = mean;
        out.stddev[t] = std::sqrt(ss / static_cast<double>(column.size()));
    }
    return out;
}

TraceAggregate aggregate(const std::vector<std::vector<GenerationTrace>>& traces) {
    TraceAggregate agg;
    if (traces.empty()) {
        return agg;
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto column = [&](auto get) {
        std::vector<std::vector<double>> series;
        for (const auto& tr : traces) {
            std::vector<double> s;
            s.reserve(tr.size());
            for (const auto& row : tr) {
                s.push_back(get(row));
            }
            series.push_back(std::move(s));
        }
        return aggregate(series);
    };
    agg.max_fitness = column([](const GenerationTrace& g) { return g.max_fitness; });
    agg.mean_fitness = column([](const GenerationTrace& g) { return g.mean_fitness; });
    agg.mean_length = column([](const GenerationTrace& g) { return g.mean_length; });
    agg.population_size = column([](const GenerationTrace& g) { return static_cast<double>(g.population_size); });
    agg.complexity = column([&](const GenerationTrace& g) { return g.complexity.value_or(nan); });
    agg.efficiency = column([&](const GenerationTrace& g) { return g.efficiency.value_or(nan); });
    for (const auto& row : traces.front()) {
        agg.generation.push_back(row.generation);
    }
    return agg;
}

void write_trace_csv(std::ostream& out, const std::vector<GenerationTrace>& traces) {
    out << "generation,max_fitness,mean_fitness,mean_len,complexity,efficiency,population_size\n";
    for (const auto& t : traces) {
        out << fmt::format("{},{},{},{},{},{},{}\n", t.generation, t.max_fitness, t.mean_fitness, t.mean_length,
                           t.complexity ? fmt_double(*t.complexity) : "", t.efficiency ? fmt_double(*t.efficiency) : "",
                           t.population_size);
    }
}

void write_aggregate_csv(std::ostream& out, const TraceAggregate& agg) {
    out << "generation,max_fitness_mean,max_fitness_std,mean_fitness_mean,mean_fitness_std,"
           "mean_len_mean,mean_len_std,population_size_mean,population_size_std,"
           "complexity_mean,complexity_std,efficiency_mean,efficiency_std\n";
    for (std::size_t t = 0; t < agg.generation.size(); ++t) {
        out << agg.generation[t];
        for (const auto* s : {&agg.max_fitness, &agg.mean_fitness, &agg.mean_length, &agg.population_size,
                              &agg.complexity, &agg.efficiency}) {
            out << "," << fmt_double(s->mean[t]) << "," << fmt_double(s->stddev[t]);
        }
        out << "\n";
    }
}

json run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    fs::create_directories(cfg.out_dir);
    json summary;
    switch (cfg.kind) {
        case ExperimentKind::Evolve:
            summary = run_evolve(cfg, false);
            break;
        case ExperimentKind::Complexity:
            summary = run_evolve(cfg, true);
            break;
        case ExperimentKind::Clustering:
            summary = run_clustering(cfg);
            break;
        case ExperimentKind::Stability:
            summary = run_stability(cfg);
            break;
        case ExperimentKind::Sweep:
            summary = run_sweep(cfg);
            break;
        case ExperimentKind::DiversityLength:
            summary = run_diversity(cfg, true);
            break;
        case ExperimentKind::DiversityModularity:
            summary = run_diversity(cfg, false);
            break;
        case ExperimentKind::Habitat:
            summary = run_habitat(cfg);
            break;
    }
    summary["kind"] = to_string(cfg.kind);
    summary["seed"] = cfg.seed.value;
    summary["scenario_seed"] = cfg.scenario_seed.value;
    auto out = open_out(cfg.out_dir / "summary.json");
    out << summary.dump(2) << "\n";
    return summary;
}

}  // namespace ecosim
