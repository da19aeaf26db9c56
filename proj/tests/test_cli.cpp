#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "critgraph/cli.hpp"

using namespace critgraph;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::initializer_list<const char*> args) {
    std::vector<const char*> argv{"critgraph"};
    argv.insert(argv.end(), args.begin(), args.end());
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream fields(line);
        while (std::getline(fields, cell, ',')) {
            cells.push_back(cell);
        }
        if (!line.empty() && line.back() == ',') {
            cells.emplace_back();
        }
        rows.push_back(cells);
    }
    return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return i;
        }
    }
    ADD_FAILURE() << "missing column " << name;
    return 0;
}

} // namespace

TEST(Cli, KernelsEnumerate) {
    const Result r = run({"kernels", "enumerate", "--k", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = csv(r.out);
    ASSERT_EQ(rows.size(), 3u);
    const std::size_t p = column(rows[0], "probability");
    EXPECT_NEAR(std::stod(rows[1][p]), 0.4, 1e-11);
    EXPECT_NEAR(std::stod(rows[2][p]), 0.6, 1e-11);

    const Result j = run({"kernels", "enumerate", "--k", "3", "--format", "json"});
    ASSERT_EQ(j.code, 0);
    const auto doc = nlohmann::json::parse(j.out);
    ASSERT_EQ(doc.size(), 5u);
    double total = 0.0;
    for (const auto& row : doc) {
        total += row["probability"].get<double>();
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Cli, CsvRowsMatchHeaderWidth) {
    const std::vector<Result> outputs{
        run({"crt", "--segments", "4", "--trials", "5", "--seed", "1"}),
        run({"component", "--procedure", "1", "--k", "3", "--segments", "2", "--trials", "5", "--seed", "1"}),
        run({"component", "--procedure", "2", "--k", "2", "--segments", "2", "--trials", "5", "--seed", "1"}),
        run({"kernels", "enumerate", "--k", "4"}),
        run({"kernels", "sample", "--k", "4", "--trials", "5", "--seed", "1"}),
        run({"core-lengths", "--k", "3", "--trials", "5", "--seed", "1"}),
        run({"urn", "continuous", "--k", "3", "--steps", "20", "--stride", "5", "--trials", "2", "--seed", "1"}),
        run({"urn", "polya", "--m", "3", "--steps", "20", "--stride", "5", "--trials", "2", "--seed", "1"}),
        run({"gnp", "sample", "--n", "3000", "--min-size", "10", "--seed", "1"}),
    };
    for (const auto& r : outputs) {
        ASSERT_EQ(r.code, 0) << r.err;
        const auto rows = csv(r.out);
        ASSERT_GE(rows.size(), 2u) << r.out;
        for (const auto& row : rows) {
            EXPECT_EQ(row.size(), rows[0].size()) << r.out;
        }
    }
}

TEST(Cli, UnicyclicCycleMean) {
    const Result r = run({"component", "--procedure", "2", "--k", "1", "--segments", "0", "--trials", "100000",
                          "--seed", "7"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = csv(r.out);
    ASSERT_EQ(rows.size(), 100'001u);
    const std::size_t c = column(rows[0], "core_lengths");
    double sum = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        sum += std::stod(rows[i][c]);
    }
    const double mean = sum / 100'000.0;
    EXPECT_NEAR(std::sqrt(2.0 / M_PI), 0.7979, 1e-4);
    EXPECT_GE(mean, 0.78);
    EXPECT_LE(mean, 0.82);
}

TEST(Cli, SameSeedSameBytes) {
    const auto a = run({"component", "--procedure", "1", "--k", "3", "--segments", "4", "--trials", "3000", "--seed", "11"});
    const auto b = run({"component", "--procedure", "1", "--k", "3", "--segments", "4", "--trials", "3000", "--seed", "11",
                        "--jobs", "4"});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    const auto c = run({"component", "--procedure", "1", "--k", "3", "--segments", "4", "--trials", "3000", "--seed", "12"});
    EXPECT_NE(a.out, c.out);

    const auto u1 = run({"urn", "continuous", "--k", "2", "--steps", "50", "--stride", "10", "--trials", "20", "--seed", "3"});
    const auto u2 = run({"urn", "continuous", "--k", "2", "--steps", "50", "--stride", "10", "--trials", "20", "--seed", "3"});
    ASSERT_EQ(u1.code, 0) << u1.err;
    EXPECT_EQ(u1.out, u2.out);
}

TEST(Cli, OutputFile) {
    const auto path = std::filesystem::temp_directory_path() / "critgraph_cli_test.csv";
    const std::string p = path.string();
    const auto r = run({"crt", "--segments", "5", "--trials", "10", "--seed", "1", "--output", p.c_str()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(path);
    std::stringstream text;
    text << in.rdbuf();
    EXPECT_EQ(csv(text.str()).size(), 11u);
    std::filesystem::remove(path);
}

TEST(Cli, UrnColumns) {
    const auto r = run({"urn", "continuous", "--k", "2", "--steps", "10", "--seed", "5"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = csv(r.out);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"trial", "n", "L_1", "L_2", "L_3", "N_1", "N_2", "N_3", "C"}));
    const auto last = rows.back();
    EXPECT_EQ(last[1], "10");
    EXPECT_EQ(std::stoi(last[5]) + std::stoi(last[6]) + std::stoi(last[7]), 3 + 2 * 10);

    const auto pr = run({"urn", "polya", "--m", "2", "--steps", "4", "--stride", "2", "--seed", "5"});
    ASSERT_EQ(pr.code, 0) << pr.err;
    EXPECT_EQ(csv(pr.out).size(), 4u); // header, n = 0, 2, 4
}

TEST(Cli, GnpAndHarvest) {
    const auto g = run({"gnp", "sample", "--n", "2000", "--min-size", "20", "--seed", "9"});
    ASSERT_EQ(g.code, 0) << g.err;
    const auto rows = csv(g.out);
    ASSERT_GE(rows.size(), 2u);
    const std::size_t size = column(rows[0], "size");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_GE(std::stoi(rows[i][size]), 20);
    }

    const auto h = run({"gnp", "harvest", "--n", "2000", "--k", "1", "--count", "3", "--window-lo", "0.3", "--window-hi",
                        "3", "--seed", "9"});
    ASSERT_EQ(h.code, 0) << h.err;
    EXPECT_EQ(csv(h.out).size(), 4u);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run({"crt", "--segments", "3"}).code, 1);                    // missing seed
    EXPECT_EQ(run({"crt", "--seed", "1", "--bogus"}).code, 1);             // unknown flag
    EXPECT_EQ(run({"kernels", "enumerate", "--k", "7"}).code, 1);          // unsupported k
    EXPECT_EQ(run({"core-lengths", "--k", "0", "--seed", "1"}).code, 1);   // no core
    EXPECT_EQ(run({"nonsense"}).code, 1);
    const auto partial = run({"gnp", "harvest", "--n", "500", "--k", "8", "--count", "2", "--max-graphs", "2", "--seed", "1"});
    EXPECT_EQ(partial.code, 3);
    EXPECT_NE(partial.err.find("budget"), std::string::npos);
    const auto bad = run({"crt", "--seed", "1", "--bogus"});
    EXPECT_FALSE(bad.err.empty());
}

TEST(Cli, VerifyReport) {
    const auto r = run({"verify", "--suite", "14", "--seed", "42"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = nlohmann::json::parse(r.out);
    ASSERT_FALSE(doc.empty());
    for (const auto& row : doc) {
        for (const char* key : {"test", "n", "statistic", "threshold", "pass", "seed"}) {
            EXPECT_TRUE(row.contains(key)) << key;
        }
        EXPECT_TRUE(row["pass"].get<bool>());
        EXPECT_EQ(row["seed"].get<std::uint64_t>(), 42u);
    }
    EXPECT_EQ(run({"verify", "--suite", "nope", "--seed", "1"}).code, 1);
}

TEST(Cli, BinaryHelpAndUsage) {
    const std::string exe = CRITGRAPH_CLI_PATH;
    EXPECT_EQ(std::system((exe + " --help > /dev/null").c_str()), 0);
    const int status = std::system((exe + " crt --seed 1 --nope > /dev/null 2>&1").c_str());
    ASSERT_TRUE(WIFEXITED(status));
    EXPECT_EQ(WEXITSTATUS(status), 1);
    const int ok = std::system((exe + " core-lengths --k 2 --trials 5 --seed 3 > /dev/null").c_str());
    ASSERT_TRUE(WIFEXITED(ok));
    EXPECT_EQ(WEXITSTATUS(ok), 0);
}
