#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "trustlens/config.hpp"

using namespace trustlens;
namespace fs = std::filesystem;

namespace {

std::optional<std::string> no_env(const std::string&) { return std::nullopt; }

RunConfig resolve(const std::string& text, std::vector<std::string>& violations, const EnvLookup& env = no_env) {
    std::istringstream in(text);
    auto values = parse_config(in, violations);
    return resolve_config(values, "/data", violations, env, false);
}

} // namespace

TEST(Config, Defaults) {
    std::vector<std::string> v;
    const RunConfig cfg = resolve("dataset.path = u.data\n", v);
    EXPECT_TRUE(v.empty());
    EXPECT_EQ(cfg.dataset_path, fs::path("/data/u.data"));
    EXPECT_EQ(cfg.dataset_format, RatingFormat::tab);
    EXPECT_EQ(cfg.experiment.windows, 5u);
    EXPECT_FALSE(cfg.experiment.cumulative);
    EXPECT_EQ(cfg.experiment.user_cap, 0u);
    EXPECT_EQ(cfg.experiment.seed, 42u);
    EXPECT_EQ(cfg.experiment.eval.min_overlap, 10u);
    EXPECT_EQ(cfg.experiment.eval.evidence.k, 1);
    EXPECT_TRUE(cfg.experiment.eval.normalize);
    EXPECT_FALSE(cfg.experiment.eval.fast_mode);
    EXPECT_EQ(cfg.output_csv, "report.csv");
}

TEST(Config, FormattedSettingsReadBackUnchanged) {
    std::vector<std::string> v;
    const RunConfig cfg = resolve("dataset.path = /x/u.data  # comment\n", v);
    const std::string once = format_config(cfg);
    std::vector<std::string> v2;
    const RunConfig again = resolve(once, v2);
    EXPECT_TRUE(v2.empty());
    EXPECT_EQ(format_config(again), once);
}

TEST(Config, ParsesEveryKey) {
    std::vector<std::string> v;
    const RunConfig cfg = resolve(R"(
# full file
dataset.path = /abs/ratings.dat
dataset.format = double-colon
experiment.windows = 3
experiment.cumulative = true
experiment.user_cap = 100
experiment.seed = 7
similarity.min_overlap = 5
trust.k_exponent = 3
predictor.normalize = false
eval.fast_mode = yes
eval.min_user_ratings = 4
output.dir = out
output.csv = a.csv
output.json = a.json
output.graph = g.txt
)",
                                  v);
    EXPECT_TRUE(v.empty());
    EXPECT_EQ(cfg.dataset_path, fs::path("/abs/ratings.dat"));
    EXPECT_EQ(cfg.dataset_format, RatingFormat::double_colon);
    EXPECT_EQ(cfg.experiment.windows, 3u);
    EXPECT_TRUE(cfg.experiment.cumulative);
    EXPECT_EQ(cfg.experiment.user_cap, 100u);
    EXPECT_EQ(cfg.experiment.seed, 7u);
    EXPECT_EQ(cfg.experiment.eval.min_overlap, 5u);
    EXPECT_EQ(cfg.experiment.eval.evidence.k, 3);
    EXPECT_FALSE(cfg.experiment.eval.normalize);
    EXPECT_TRUE(cfg.experiment.eval.fast_mode);
    EXPECT_EQ(cfg.experiment.eval.min_user_ratings, 4u);
    EXPECT_EQ(cfg.output_dir, fs::path("out"));
    EXPECT_EQ(cfg.output_graph, "g.txt");
}

TEST(Config, EvenExponentIsRejected) {
    std::vector<std::string> v;
    resolve("dataset.path = a\ntrust.k_exponent = 2\n", v);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_NE(v[0].find("trust.k_exponent"), std::string::npos);
}

TEST(Config, ZeroWindowsIsRejected) {
    std::vector<std::string> v;
    resolve("dataset.path = a\nexperiment.windows = 0\n", v);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_NE(v[0].find("experiment.windows"), std::string::npos);
}

TEST(Config, AllViolationsAreCollected) {
    std::vector<std::string> v;
    resolve("bogus.key = 1\nexperiment.windows = -2\ntrust.k_exponent = 4\neval.fast_mode = maybe\nno equals sign\n",
            v);
    // unknown key, malformed line, windows, k, fast_mode, missing path
    EXPECT_EQ(v.size(), 6u);
    try {
        throw_violations(v);
        FAIL();
    } catch (const config_error& e) {
        const std::string msg = e.what();
        EXPECT_EQ(msg.find('\n'), std::string::npos);
        EXPECT_NE(msg.find("bogus.key"), std::string::npos);
        EXPECT_NE(msg.find("dataset.path"), std::string::npos);
    }
}

TEST(Config, EnvironmentOverridesTheFile) {
    EXPECT_EQ(env_name("similarity.min_overlap"), "TRUSTLENS_SIMILARITY_MIN_OVERLAP");
    std::vector<std::string> v;
    auto env = [](const std::string& name) -> std::optional<std::string> {
        if (name == "TRUSTLENS_EXPERIMENT_WINDOWS")
            return "9";
        return std::nullopt;
    };
    const RunConfig cfg = resolve("dataset.path = a\nexperiment.windows = 2\n", v, env);
    EXPECT_TRUE(v.empty());
    EXPECT_EQ(cfg.experiment.windows, 9u);
}

TEST(Config, LoadChecksThatTheDatasetExists) {
    const fs::path dir = fs::temp_directory_path() / "trustlens_config_test";
    fs::create_directories(dir);
    const fs::path conf = dir / "c.conf";
    std::ofstream(conf) << "dataset.path = missing.tsv\n";
    try {
        load_config(conf, no_env);
        FAIL();
    } catch (const config_error& e) {
        EXPECT_NE(std::string(e.what()).find((dir / "missing.tsv").string()), std::string::npos) << e.what();
    }
    std::ofstream(dir / "missing.tsv") << "1\t1\t3\t5\n";
    EXPECT_NO_THROW(load_config(conf, no_env));
    EXPECT_THROW(load_config(dir / "nope.conf", no_env), config_error);
    fs::remove_all(dir);
}
