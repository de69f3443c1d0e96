#include <gtest/gtest.h>

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "support.hpp"

using json = nlohmann::json;
using testsupport::TempDir;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(CTDNE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> fields;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                fields.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        fields.push_back(cur);
        rows.push_back(fields);
    }
    return rows;
}

std::string write_random_stream(const TempDir& dir, const std::string& name, int n_nodes,
                                int n_edges, unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_int_distribution<int> node(1, n_nodes);
    std::ostringstream out;
    for (int t = 1; t <= n_edges; ++t) {
        int u = node(gen), v = node(gen);
        while (v == u) v = node(gen);
        out << u << " " << v << " " << t << "\n";
    }
    return dir.write(name, out.str());
}

} // namespace

TEST(CliTrain, ExampleStreamSmoke) {
    TempDir dir("cli_train");
    const auto input = dir.write("g.edges", testsupport::example_stream_file_contents());
    const auto out = dir.file("out").string();
    ASSERT_EQ(run_cli("train " + input + " --omega 2 --beta 10 --D 8 --seed 1 --out " + out), 0);

    std::ifstream emb(dir.file("out/embeddings.txt"));
    std::string header;
    std::getline(emb, header);
    EXPECT_EQ(header, "6 8");
    int rows = 0;
    std::string line;
    while (std::getline(emb, line))
        if (!line.empty()) ++rows;
    EXPECT_EQ(rows, 6);

    EXPECT_TRUE(std::filesystem::exists(dir.file("out/manifest.json")));
    EXPECT_TRUE(std::filesystem::exists(dir.file("out/stats_length.csv")));
    EXPECT_TRUE(std::filesystem::exists(dir.file("out/stats_occurrences.csv")));
    EXPECT_TRUE(std::filesystem::exists(dir.file("out/stats_starts.csv")));
}

TEST(CliTrain, ManifestResolvesBudgetFromWalksPerNode) {
    TempDir dir("cli_manifest");
    const auto input = write_random_stream(dir, "g.edges", 100, 800, 3);
    const auto out = dir.file("out").string();
    ASSERT_EQ(run_cli("train " + input + " --R 10 --L 80 --omega 10 --D 8 --seed 1 --out " + out),
              0);
    json manifest = json::parse(slurp(dir.file("out/manifest.json")));
    EXPECT_EQ(manifest["parameters"]["beta"].get<std::uint64_t>(), 71000u);
    EXPECT_TRUE(manifest.contains("timings_ms"));
    for (const auto& key : {"fs", "fg", "omega", "max_len", "dim", "negatives", "lr", "lr_min",
                            "epochs", "seed", "threads"})
        EXPECT_TRUE(manifest["parameters"].contains(key)) << key;
}

TEST(CliTrain, OmegaOneIsUsageError) {
    TempDir dir("cli_usage");
    const auto input = dir.write("g.edges", testsupport::example_stream_file_contents());
    EXPECT_EQ(run_cli("train " + input + " --omega 1 --beta 10"), 1);
}

TEST(CliTrain, MissingFileIsDataError) {
    EXPECT_EQ(run_cli("train /nonexistent/file.edges --beta 10 --omega 2"), 2);
}

TEST(CliTrain, BetaAndRMutuallyExclusive) {
    TempDir dir("cli_excl");
    const auto input = dir.write("g.edges", testsupport::example_stream_file_contents());
    EXPECT_EQ(run_cli("train " + input + " --beta 10 --R 5"), 1);
}

TEST(CliTrain, ConfigFileOverriddenByFlags) {
    TempDir dir("cli_config");
    const auto input = dir.write("g.edges", testsupport::example_stream_file_contents());
    const auto cfg = dir.write("run.cfg", "omega=2\nbeta=10\nD=4\n");
    const auto out = dir.file("out").string();
    ASSERT_EQ(run_cli("train " + input + " --config " + cfg + " --D 8 --seed 1 --out " + out), 0);
    json manifest = json::parse(slurp(dir.file("out/manifest.json")));
    EXPECT_EQ(manifest["parameters"]["omega"].get<int>(), 2);     // from config
    EXPECT_EQ(manifest["parameters"]["dim"].get<int>(), 8);       // flag wins
}

TEST(CliStats, ConservationAcrossTables) {
    TempDir dir("cli_stats");
    const auto input = write_random_stream(dir, "g.edges", 30, 300, 9);
    const auto out = dir.file("out").string();
    ASSERT_EQ(
        run_cli("stats " + input + " --omega 3 --beta 500 --L 10 --seed 2 --out " + out), 0);

    auto length_rows = read_csv(dir.file("out/stats_length.csv"));
    auto occ_rows = read_csv(dir.file("out/stats_occurrences.csv"));
    auto start_rows = read_csv(dir.file("out/stats_starts.csv"));
    ASSERT_EQ(length_rows.front(), (std::vector<std::string>{"length", "count"}));

    std::uint64_t n_walks = 0, weighted_len = 0, occurrences = 0, starts = 0;
    for (std::size_t i = 1; i < length_rows.size(); ++i) {
        n_walks += std::stoull(length_rows[i][1]);
        weighted_len += std::stoull(length_rows[i][0]) * std::stoull(length_rows[i][1]);
    }
    for (std::size_t i = 1; i < occ_rows.size(); ++i) occurrences += std::stoull(occ_rows[i][1]);
    for (std::size_t i = 1; i < start_rows.size(); ++i) starts += std::stoull(start_rows[i][1]);
    EXPECT_EQ(occurrences, weighted_len);
    EXPECT_EQ(starts, n_walks);
}

TEST(CliEval, AllVariantsEmitNineRowsPerSeedSet) {
    TempDir dir("cli_eval");
    const auto input = write_random_stream(dir, "g.edges", 20, 120, 5);
    const auto out = dir.file("out").string();
    ASSERT_EQ(run_cli("eval " + input +
                      " --all-variants --seeds 2 --omega 2 --L 6 --beta 300 --D 8 "
                      "--negatives 3 --seed 4 --out " + out),
              0);

    auto rows = read_csv(dir.file("out/results.csv"));
    ASSERT_EQ(rows.front(),
              (std::vector<std::string>{"dataset", "variant", "operator", "seed", "auc"}));
    EXPECT_EQ(rows.size(), 1u + 9u * 2u);

    json summary = json::parse(slurp(dir.file("out/summary.json")));
    EXPECT_EQ(summary["results"].size(), 9u);
    EXPECT_TRUE(summary.contains("best_variant"));
}

TEST(CliEval, CsvRecomputesToSummary) {
    TempDir dir("cli_eval_rt");
    const auto input = write_random_stream(dir, "g.edges", 20, 120, 6);
    const auto out = dir.file("out").string();
    ASSERT_EQ(run_cli("eval " + input +
                      " --seeds 3 --omega 2 --L 6 --beta 300 --D 8 --negatives 3 "
                      "--seed 7 --out " + out),
              0);

    auto rows = read_csv(dir.file("out/results.csv"));
    json summary = json::parse(slurp(dir.file("out/summary.json")));
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        sum += std::stod(rows[i][4]);
        ++n;
    }
    ASSERT_EQ(n, 3u);
    EXPECT_EQ(sum / static_cast<double>(n), summary["results"][0]["mean_auc"].get<double>());
}

TEST(CliEval, StaticBaselineFlag) {
    TempDir dir("cli_eval_static");
    const auto input = write_random_stream(dir, "g.edges", 20, 120, 7);
    const auto out = dir.file("out").string();
    ASSERT_EQ(run_cli("eval " + input +
                      " --static --seeds 2 --omega 2 --L 6 --beta 300 --D 8 "
                      "--negatives 3 --seed 4 --out " + out),
              0);
    json manifest = json::parse(slurp(dir.file("out/manifest.json")));
    EXPECT_TRUE(manifest["parameters"]["static"].get<bool>());
    auto rows = read_csv(dir.file("out/results.csv"));
    EXPECT_EQ(rows.size(), 3u);   // header + 2 seeds
}

TEST(CliSnapshots, DimensionDivisibilityUsageError) {
    TempDir dir("cli_snap_err");
    const auto input = dir.write("g.edges", testsupport::example_stream_file_contents());
    EXPECT_EQ(run_cli("snapshots " + input + " --snapshots 3 --D 128"), 1);
}

TEST(CliSnapshots, PairedRowWithGainColumn) {
    TempDir dir("cli_snap");
    const auto input = write_random_stream(dir, "g.edges", 20, 160, 8);
    const auto out = dir.file("out").string();
    ASSERT_EQ(run_cli("snapshots " + input +
                      " --snapshots 2 --seeds 2 --omega 2 --L 6 --beta 300 --D 8 "
                      "--negatives 3 --seed 9 --out " + out),
              0);
    auto rows = read_csv(dir.file("out/results.csv"));
    ASSERT_EQ(rows.size(), 2u);
    ASSERT_EQ(rows.front(), (std::vector<std::string>{"dataset", "snapshots", "dim",
                                                      "dtdne_auc", "ctdne_auc", "gain_pct"}));
    const double dtdne = std::stod(rows[1][3]);
    const double ctdne = std::stod(rows[1][4]);
    const double gain = std::stod(rows[1][5]);
    EXPECT_NEAR(gain, (ctdne - dtdne) / dtdne * 100.0, 1e-6);
}

TEST(CliStream, WarmupOneStreamsNothing) {
    TempDir dir("cli_stream_warm");
    const auto input = dir.write("g.edges", testsupport::example_stream_file_contents());
    const auto out = dir.file("out").string();
    ASSERT_EQ(run_cli("stream " + input +
                      " --warmup 1.0 --omega 2 --D 8 --seed 3 --out " + out),
              0);
    json summary = json::parse(slurp(dir.file("out/summary.json")));
    EXPECT_EQ(summary["edges_streamed"].get<int>(), 0);
    EXPECT_TRUE(summary["latency_ms"].is_null());

    std::ifstream emb(dir.file("out/embeddings.txt"));
    std::string header;
    std::getline(emb, header);
    EXPECT_EQ(header, "6 8");
}

TEST(CliStream, ReportsLatencyAndFinalEmbeddings) {
    TempDir dir("cli_stream");
    const auto input = write_random_stream(dir, "g.edges", 20, 200, 10);
    const auto out = dir.file("out").string();
    ASSERT_EQ(run_cli("stream " + input +
                      " --walks-per-edge 3 --omega 2 --L 10 --D 8 --seed 3 --out " + out),
              0);
    json summary = json::parse(slurp(dir.file("out/summary.json")));
    EXPECT_EQ(summary["edges_streamed"].get<int>(), 200);
    EXPECT_GT(summary["latency_ms"]["mean"].get<double>(), 0.0);
    EXPECT_GE(summary["latency_ms"]["p99"].get<double>(),
              summary["latency_ms"]["median"].get<double>());

    std::ifstream emb(dir.file("out/embeddings.txt"));
    std::string header;
    std::getline(emb, header);
    EXPECT_EQ(header, "20 8");
}

TEST(CliDeterminism, FixedSeedReproducesOutputsByteForByte) {
    TempDir dir("cli_det");
    const auto input = write_random_stream(dir, "g.edges", 20, 150, 11);
    const auto a = dir.file("a").string();
    const auto b = dir.file("b").string();
    const std::string args =
        " --omega 2 --L 6 --beta 200 --D 8 --negatives 3 --seed 5 --threads 1 --out ";
    ASSERT_EQ(run_cli("train " + input + args + a), 0);
    ASSERT_EQ(run_cli("train " + input + args + b), 0);
    EXPECT_EQ(slurp(dir.file("a/embeddings.txt")), slurp(dir.file("b/embeddings.txt")));
    EXPECT_EQ(slurp(dir.file("a/stats_length.csv")), slurp(dir.file("b/stats_length.csv")));
    EXPECT_EQ(slurp(dir.file("a/stats_occurrences.csv")),
              slurp(dir.file("b/stats_occurrences.csv")));
    EXPECT_EQ(slurp(dir.file("a/stats_starts.csv")), slurp(dir.file("b/stats_starts.csv")));
}

TEST(CliStream, EmbeddingsDeterministicForFixedSeed) {
    TempDir dir("cli_stream_det");
    const auto input = write_random_stream(dir, "g.edges", 15, 120, 12);
    const auto a = dir.file("a").string();
    const auto b = dir.file("b").string();
    const std::string args = " --walks-per-edge 2 --omega 2 --L 8 --D 8 --seed 6 --out ";
    ASSERT_EQ(run_cli("stream " + input + args + a), 0);
    ASSERT_EQ(run_cli("stream " + input + args + b), 0);
    EXPECT_EQ(slurp(dir.file("a/embeddings.txt")), slurp(dir.file("b/embeddings.txt")));
}

TEST(CliSeedEnvVar, UsedAsDefault) {
    TempDir dir("cli_env");
    const auto input = dir.write("g.edges", testsupport::example_stream_file_contents());
    const auto a = dir.file("a").string();
    const auto b = dir.file("b").string();
    const std::string base = std::string(CTDNE_CLI_PATH) + " train " + input +
                             " --omega 2 --beta 20 --D 4 --out ";
    ASSERT_EQ(WEXITSTATUS(std::system(
                  ("CTDNE_SEED=123 " + base + a + " >/dev/null 2>&1").c_str())), 0);
    ASSERT_EQ(WEXITSTATUS(std::system(
                  (base + b + " --seed 123 >/dev/null 2>&1").c_str())), 0);
    EXPECT_EQ(slurp(dir.file("a/embeddings.txt")), slurp(dir.file("b/embeddings.txt")));
}
