#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "ecosim/harness.hpp"

using namespace ecosim;
namespace fs = std::filesystem;

namespace {

const fs::path kGolden = fs::path(ECOSIM_SOURCE_DIR) / "tests" / "golden";

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / "ecosim-tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) {
            out[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
        }
    }
    return out;
}

ExperimentConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

std::string last_line(const std::string& s) {
    const auto end = s.find_last_not_of('\n');
    const auto start = s.rfind('\n', end);
    return s.substr(start + 1, end - start);
}

}  // namespace

TEST_CASE("config file sets every section") {
    const auto cfg = parse(
        "[experiment]\nkind = sweep\nreplicates = 7\nhorizon = 90\nseed = 11\nout = here\n"
        "[evolution]\nmutation_rate = 0.3\nmax_generations = 12\n"
        "[stability]\nwindow = 20\nepsilon = 0.02\n"
        "[diversity]\nlaw = powerlaw\nlo = 3\nhi = 9\n"
        "[habitat]\nreinforce = 0.2\nrequest_window = 9\n");
    CHECK(cfg.kind == ExperimentKind::Sweep);
    CHECK(cfg.replicates == 7);
    CHECK(cfg.horizon == 90);
    CHECK(cfg.seed == RngSeed{11});
    CHECK(cfg.out_dir == fs::path("here"));
    CHECK(cfg.evolution.mutation_rate == 0.3);
    CHECK(cfg.evolution.max_generations == 12);
    CHECK(cfg.window == 20);
    CHECK(cfg.epsilon == 0.02);
    CHECK(cfg.law == Law::PowerLaw);
    CHECK(cfg.length_law().lo == 3);
    CHECK(cfg.sharing.network.hebbian.reinforce == 0.2);
    CHECK(cfg.sharing.network.request_window == 9);
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("kind defaults for distribution supports") {
    ExperimentConfig cfg;
    CHECK(cfg.length_law().lo == 2);
    CHECK(cfg.length_law().hi == 18);
    CHECK(cfg.modularity_law().hi == 12);
}

TEST_CASE("config errors name the field") {
    auto field_of = [](const std::string& text) {
        try {
            parse(text).validate();
        } catch (const ConfigError& e) {
            return e.field();
        }
        return std::string("none");
    };
    CHECK(field_of("[bogus]\nx = 1\n") == "bogus");
    CHECK(field_of("[experiment]\ncolour = red\n") == "experiment.colour");
    CHECK(field_of("[experiment]\nkind = painting\n") == "experiment.kind");
    CHECK(field_of("[experiment]\nreplicates = many\n") == "experiment.replicates");
    CHECK(field_of("[experiment]\nreplicates = -3\n") == "experiment.replicates");
    CHECK(field_of("[experiment]\nreplicates = 0\n") == "experiment.replicates");
    CHECK(field_of("[evolution]\nmutation_rate = 2\n") == "evolution");
    CHECK(field_of("[stability]\nepsilon = 0\n") == "stability.epsilon");
    CHECK(field_of("[diversity]\nlaw = cauchy\n") == "diversity.law");
    CHECK(field_of("[diversity]\npercentile = 1.5\n") == "diversity.percentile");
    CHECK(field_of("[habitat]\nconnection_probability = 3\n") == "habitat.connection_probability");
    CHECK(field_of("[habitat]\nfloor = 0.9\nceiling = 0.1\n") == "habitat");
    CHECK(field_of("[experiment]\nseed = 4\n") == "none");
}

TEST_CASE("every kind name parses") {
    for (auto k : all_kinds()) {
        CHECK(parse_kind(to_string(k)) == k);
    }
    CHECK(all_kinds().size() == 8);
}

TEST_CASE("aggregate of a single series") {
    const auto s = aggregate(std::vector<std::vector<double>>{{1.0, 4.0, 2.5}});
    CHECK(s.mean == std::vector<double>{1.0, 4.0, 2.5});
    CHECK(s.stddev == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("aggregate of two constant series") {
    const auto s = aggregate(std::vector<std::vector<double>>{{1, 1}, {3, 3}});
    CHECK(s.mean == std::vector<double>{2, 2});
    CHECK(s.stddev == std::vector<double>{1, 1});
}

TEST_CASE("aggregate ignores replicate order") {
    Rng rng(RngSeed{2});
    std::vector<std::vector<double>> series(9, std::vector<double>(6));
    for (auto& s : series) {
        for (auto& x : s) {
            x = rng.uniform01() * 1e3;
        }
    }
    auto shuffled = series;
    std::reverse(shuffled.begin(), shuffled.end());
    std::swap(shuffled[1], shuffled[4]);
    const auto a = aggregate(series);
    const auto b = aggregate(shuffled);
    CHECK(a.mean == b.mean);
    CHECK(a.stddev == b.stddev);
}

TEST_CASE("ragged traces are an error") {
    CHECK_THROWS_AS(aggregate(std::vector<std::vector<double>>{{1, 2}, {1}}), ValidationError);
}

TEST_CASE("evolve with one replicate writes one trace") {
    auto cfg = parse("[experiment]\nkind = evolve\n[evolution]\nmax_generations = 30\n");
    cfg.out_dir = scratch("evolve-one");
    run_experiment(cfg);
    REQUIRE(fs::exists(cfg.out_dir / "traces" / "replicate_0.csv"));
    CHECK_FALSE(fs::exists(cfg.out_dir / "traces" / "replicate_1.csv"));
    const auto csv = slurp(cfg.out_dir / "traces" / "replicate_0.csv");
    CHECK(csv.rfind("generation,max_fitness,mean_fitness,mean_len,complexity,efficiency", 0) == 0);
    CHECK(line_count(csv) == 32);
    CHECK(fs::exists(cfg.out_dir / "summary.json"));
}

TEST_CASE("sweep writes a 121-row grid") {
    auto cfg = parse("[experiment]\nkind = sweep\nreplicates = 1\nhorizon = 5\n");
    cfg.out_dir = scratch("sweep-grid");
    run_experiment(cfg);
    const auto csv = slurp(cfg.out_dir / "sweep.csv");
    CHECK(csv.rfind("mutation_pct,crossover_pct,d_ins\n", 0) == 0);
    CHECK(line_count(csv) == 122);
}

TEST_CASE("stability desk preset ends in M_max") {
    auto cfg = load_config(fs::path(ECOSIM_SOURCE_DIR) / "configs" / "desk" / "stability.ini");
    cfg.out_dir = scratch("stability-desk");
    const auto summary = run_experiment(cfg);
    const auto csv = slurp(cfg.out_dir / "macrostates.csv");
    CHECK(csv.rfind("generation,p_Mmax,p_Mhalf,p_other0", 0) == 0);
    CHECK(line_count(csv) == cfg.horizon + 2);
    CHECK(last_line(csv).rfind("300,1,0,", 0) == 0);
    CHECK(summary["p_Mmax_final"].get<double>() == 1.0);
}

TEST_CASE("golden fixtures for every experiment kind") {
    const bool update = std::getenv("ECOSIM_UPDATE_GOLDEN") != nullptr;
    for (auto kind : all_kinds()) {
        const auto name = to_string(kind);
        CAPTURE(name);
        auto cfg = load_config(kGolden / name / "config.ini");
        REQUIRE(cfg.kind == kind);
        cfg.out_dir = scratch("golden-" + name);
        run_experiment(cfg);
        const auto expected_dir = kGolden / name / "expected";
        if (update) {
            fs::remove_all(expected_dir);
            fs::create_directories(expected_dir);
            fs::copy(cfg.out_dir, expected_dir, fs::copy_options::recursive);
        }
        const auto got = tree(cfg.out_dir);
        const auto want = tree(expected_dir);
        REQUIRE(got.size() == want.size());
        for (const auto& [file, content] : want) {
            CAPTURE(file);
            REQUIRE(got.count(file) == 1);
            CHECK(got.at(file) == content);
        }
    }
}

TEST_CASE("same config and seed give byte-identical artifacts") {
    for (auto kind : all_kinds()) {
        const auto name = to_string(kind);
        CAPTURE(name);
        auto cfg = load_config(kGolden / name / "config.ini");
        cfg.out_dir = scratch("repeat-a-" + name);
        run_experiment(cfg);
        auto again = cfg;
        again.out_dir = scratch("repeat-b-" + name);
        again.workers = 3;
        run_experiment(again);
        CHECK(tree(cfg.out_dir) == tree(again.out_dir));
    }
}

TEST_CASE("a different seed changes the artifacts") {
    auto cfg = load_config(kGolden / "evolve" / "config.ini");
    cfg.out_dir = scratch("seed-a");
    run_experiment(cfg);
    auto other = cfg;
    other.seed = RngSeed{cfg.seed.value + 1};
    other.out_dir = scratch("seed-b");
    run_experiment(other);
    CHECK(tree(cfg.out_dir) != tree(other.out_dir));
}
