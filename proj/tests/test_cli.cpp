#include "doctest.h"

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

#ifndef TVOR_CLI_PATH
#error "TVOR_CLI_PATH must point at the tvor binary"
#endif

struct RunResult {
    int exit_code = -1;
    std::string output; // stdout only
};

RunResult run_cli(const std::string& args) {
    const std::string command =
        std::string(TVOR_CLI_PATH) + " " + args + " 2>/dev/null";
    RunResult result;
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
        result.output.append(buf.data(), got);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("tvor-cli-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path file(const std::string& name, const std::string& content) const {
        fs::path p = path / name;
        std::ofstream out(p);
        out << content;
        return p;
    }
    static inline int counter = 0;
};

} // namespace

TEST_CASE("dtv subcommand prints the value") {
    TempDir dir;
    fs::path h = dir.file("h.csv", "bin,count\n0,3\n1,1\n2,4\n");
    auto result = run_cli("dtv " + h.string());
    CHECK(result.exit_code == 0);
    CHECK(result.output == "5\n");
    auto circular = run_cli("dtv --circular " + h.string());
    CHECK(circular.output == "6\n");
}

TEST_CASE("expected subcommand hits the published value") {
    auto result = run_cli("expected --n 4 --N 100 --method exact");
    CHECK(result.exit_code == 0);
    CHECK(result.output == "16.9045\n");
    auto asym = run_cli("expected --n 2 --N 100 --method asymptotic");
    CHECK(asym.output == "7.97885\n");
}

TEST_CASE("score on two identical histograms gives equal scores, ranks 0 and 1") {
    TempDir dir;
    dir.file("a.csv", "bin,count\n0,10\n1,20\n2,30\n");
    dir.file("b.csv", "bin,count\n0,10\n1,20\n2,30\n");
    auto result =
        run_cli("--format json score " + (dir.path / "a.csv").string() + " " +
                (dir.path / "b.csv").string());
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("\"rank\": 0") != std::string::npos);
    CHECK(result.output.find("\"rank\": 1") != std::string::npos);
    CHECK(result.output.find("\"score\": 0.0") != std::string::npos);
}

TEST_CASE("usage, validation, and guard errors use distinct exit codes") {
    TempDir dir;
    SUBCASE("unknown flag is a usage error") {
        auto result = run_cli("dtv --no-such-flag x.csv");
        CHECK(result.exit_code == 2);
    }
    SUBCASE("unknown subcommand is a usage error") {
        auto result = run_cli("frobnicate");
        CHECK(result.exit_code == 2);
    }
    SUBCASE("malformed csv is a validation error") {
        fs::path bad = dir.file("bad.csv", "bin,count\n0,-3\n");
        auto result = run_cli("dtv " + bad.string());
        CHECK(result.exit_code == 3);
    }
    SUBCASE("missing file is a validation error") {
        auto result = run_cli("dtv /nonexistent/file.csv");
        CHECK(result.exit_code == 3);
    }
    SUBCASE("oracle explosion is a numerical guard") {
        auto result = run_cli("oracle --n 20 --N 100");
        CHECK(result.exit_code == 4);
    }
}

TEST_CASE("baseline and indices subcommands produce csv") {
    TempDir dir;
    dir.file("a.csv", "bin,count\n0,10\n1,0\n");
    dir.file("b.csv", "bin,count\n0,0\n1,10\n");
    auto result = run_cli("baseline " + dir.path.string());
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("label,N,dtv,predicted,score,rank,method") !=
          std::string::npos);
    CHECK(result.output.find("chi2") != std::string::npos);

    TempDir vals;
    vals.file("list.txt", "1900\n1905\n1910\n1915\n1920\n1925\n1930\n1935\n"
                          "1940\n1945\n");
    auto indices = run_cli("indices " + vals.path.string());
    CHECK(indices.exit_code == 0);
    CHECK(indices.output.find("label,whipple,myers") != std::string::npos);
    CHECK(indices.output.find("list,500,90") != std::string::npos);
}

TEST_CASE("mc-table and census subcommands run end to end") {
    TempDir dir;
    auto expand = [&](const std::string& name, int start, int step, int n) {
        std::string body;
        for (int y = 0; y < n; ++y)
            for (int k = 0; k < start + step * (y % 3); ++k)
                body += std::to_string(1900 + y) + "\n";
        dir.file(name, body);
    };
    expand("l0.txt", 2, 1, 30);
    expand("l1.txt", 3, 2, 30);
    expand("l2.txt", 5, 1, 30);
    expand("l3.txt", 8, 3, 30);
    auto census = run_cli("census " + dir.path.string());
    CHECK(census.exit_code == 0);
    CHECK(census.output.find("label,N,dtv,predicted,score,rank,method") !=
          std::string::npos);
    CHECK(census.output.find("label,N,dtv,predicted\n") != std::string::npos);

    auto table = run_cli("--seed 7 mc-table --kind uniform --bins 4 "
                         "--sizes 50,100 --trials 200");
    CHECK(table.exit_code == 0);
    CHECK(table.output.find("N,mean,std,trials") != std::string::npos);
    CHECK(table.output.find("50,") != std::string::npos);
    CHECK(table.output.find("100,") != std::string::npos);
}

TEST_CASE("simulate subcommand consumes a config file") {
    TempDir dir;
    fs::path cfg = dir.file("exp.conf",
                            "experiment=heaping\n"
                            "n=40\n"
                            "inlier.kind=beta\ninlier.alpha=2\ninlier.beta=3\n"
                            "outlier.kind=beta\noutlier.alpha=2\noutlier.beta=3\n"
                            "inliers=10\noutliers=2\n"
                            "size.min=200\nsize.max=400\n"
                            "heap.fraction=0.4\nheap.period=5\n"
                            "trials=5\nseed=3\nmethods=tvor,chi2\n");
    auto result = run_cli("simulate --config " + cfg.string());
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("method,mean_rank,ideal,trials,total_histograms") !=
          std::string::npos);
    CHECK(result.output.find("tvor,") != std::string::npos);
    CHECK(result.output.find("chi2,") != std::string::npos);
}

TEST_CASE("output-dir writes files with manifests") {
    TempDir dir;
    dir.file("a.csv", "bin,count\n0,10\n1,20\n");
    dir.file("b.csv", "bin,count\n0,12\n1,24\n2,1\n");
    // inconsistent bins must fail cleanly even with an output dir
    auto bad = run_cli("--output-dir " + (dir.path / "out").string() + " score " +
                       dir.path.string());
    CHECK(bad.exit_code == 3);

    TempDir good;
    good.file("a.csv", "bin,count\n0,10\n1,20\n");
    good.file("b.csv", "bin,count\n0,30\n1,24\n");
    good.file("c.csv", "bin,count\n0,1\n1,44\n");
    const fs::path out = good.path / "out";
    auto result =
        run_cli("--output-dir " + out.string() + " score " + good.path.string());
    CHECK(result.exit_code == 0);
    CHECK(fs::exists(out / "scores.csv"));
    CHECK(fs::exists(out / "scores.csv.manifest.json"));
    std::ifstream manifest(out / "scores.csv.manifest.json");
    std::string text((std::istreambuf_iterator<char>(manifest)),
                     std::istreambuf_iterator<char>());
    CHECK(text.find("\"version\"") != std::string::npos);
    CHECK(text.find("a.csv") != std::string::npos);
}

TEST_CASE("fit emits a model json that score can consume") {
    TempDir dir;
    // four sampled-looking histograms with distinct sizes
    dir.file("a.csv", "bin,count\n0,10\n1,12\n2,9\n3,11\n");
    dir.file("b.csv", "bin,count\n0,20\n1,22\n2,19\n3,25\n");
    dir.file("c.csv", "bin,count\n0,30\n1,36\n2,29\n3,31\n");
    dir.file("d.csv", "bin,count\n0,44\n1,42\n2,39\n3,45\n");
    const fs::path out = dir.path / "out";
    auto fit = run_cli("--output-dir " + out.string() + " fit " + dir.path.string());
    CHECK(fit.exit_code == 0);
    REQUIRE(fs::exists(out / "model.json"));
    auto score = run_cli("score --model " + (out / "model.json").string() + " " +
                         dir.path.string());
    CHECK(score.exit_code == 0);
    CHECK(score.output.find("tvor-d1") != std::string::npos);
}
