#include <doctest.h>

#include <stdexcept>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "omerg_cli.hpp"
#include "support.hpp"

#include "omerg/checkpoint_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace omerg::cli;

namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result cli(std::vector<std::string> args) {
    args.insert(args.begin(), "omerg");
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string trim(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == ' '))
        s.pop_back();
    return s;
}

std::map<std::string, std::string> snapshot_dir(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::directory_iterator(dir))
        files[e.path().filename().string()] = omerg::read_text(e.path());
    return files;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("count and grid parsing") {
    CHECK(parse_count("1e6") == 1000000);
    CHECK(parse_count("123") == 123);
    CHECK(parse_count("2.5e3") == 2500);
    CHECK_THROWS(parse_count("1.5"));
    CHECK_THROWS(parse_count("-3"));
    CHECK_THROWS(parse_count("ten"));

    CHECK(parse_grid("list:10,100,50,100", 1000) == std::vector<std::uint64_t>{50, 100, 1000});
    CHECK(parse_grid("lacunary:2", 1000000) == std::vector<std::uint64_t>{16, 65536, 1000000});
    const auto both = parse_grid("geometric+lacunary:2", 100000);
    CHECK(both.front() == 16);
    CHECK(both.back() == 100000);
    CHECK(std::is_sorted(both.begin(), both.end()));
    CHECK(std::adjacent_find(both.begin(), both.end()) == both.end());
    CHECK_THROWS(parse_grid("fibonacci", 1000));
}

TEST_CASE("usage errors exit 2") {
    CHECK(cli({}).code == kExitUsage);
    CHECK(cli({"frobnicate"}).code == kExitUsage);
    const auto small = cli({"sieve", "--n-max", "10", "--out", "/nonexistent"});
    CHECK(small.code == kExitUsage);
    CHECK(small.err.find("16") != std::string::npos);
    CHECK(cli({"sieve", "--n-max", "1e5", "--checkpoints", "bogus"}).code == kExitUsage);
    CHECK(cli({"average", "--n-max", "1000", "--scheme", "harmonic"}).code == kExitUsage);
}

TEST_CASE("sieve writes deterministic files and verify passes") {
    testing::TempDir tmp("cli");
    const auto first = cli({"sieve", "--n-max", "1e5", "--out", (tmp.path() / "a").string(), "--threads", "1"});
    REQUIRE(first.code == kExitOk);
    const fs::path dir_a = trim(first.out);
    const auto second = cli({"sieve", "--n-max", "1e5", "--out", (tmp.path() / "b").string(), "--threads", "3",
                             "--block-size", "9999"});
    REQUIRE(second.code == kExitOk);
    const fs::path dir_b = trim(second.out);
    CHECK(dir_a.filename() == dir_b.filename());
    const auto files_a = snapshot_dir(dir_a);
    CHECK(files_a == snapshot_dir(dir_b));
    CHECK(files_a.count("manifest.json") == 1);
    CHECK(files_a.count("checkpoint_100000.csv") == 1);
    CHECK(files_a.count("histogram_100000.csv") == 1);
    CHECK(files_a.count("checkpoint_100.csv") == 1);

    const auto manifest = json::parse(files_a.at("manifest.json"));
    CHECK(manifest["n_max"] == 100000);

    // rerun into the same directory: byte-identical
    const auto again = cli({"sieve", "--n-max", "1e5", "--out", (tmp.path() / "a").string()});
    REQUIRE(again.code == kExitOk);
    CHECK(snapshot_dir(dir_a) == files_a);

    const auto verify = cli({"verify", "--dir", dir_a.string()});
    CHECK(verify.code == kExitOk);
    const auto report = json::parse(verify.out);
    CHECK(report["pass"] == true);
    for (const auto& [name, suite] : report["suites"].items())
        CHECK_MESSAGE(suite["pass"] == true, name);

    // a flipped digit in one xi entry breaks the partition identity
    const auto csv = dir_a / "checkpoint_1000.csv";
    std::string text = omerg::read_text(csv);
    const auto line = text.find("\n1000,2,");
    REQUIRE(line != std::string::npos);
    auto pos = text.find(',', line + 8);  // after pi
    pos += 3;
    text[pos] = text[pos] == '9' ? '1' : '9';
    omerg::write_text(csv, text);
    const auto tampered = cli({"verify", "--dir", dir_a.string()});
    CHECK(tampered.code == kExitVerifyFailed);
    const auto bad = json::parse(tampered.out);
    CHECK(bad["pass"] == false);
    CHECK(bad["suites"]["partition_xi"]["pass"] == false);
}

TEST_CASE("verify on an empty directory") {
    testing::TempDir tmp("empty");
    const auto r = cli({"verify", "--dir", tmp.path().string()});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("no checkpoints found") != std::string::npos);
}

TEST_CASE("output directory from the environment") {
    testing::TempDir tmp("env");
    ::setenv(kOutDirEnv, tmp.path().c_str(), 1);
    const auto r = cli({"sieve", "--n-max", "2000", "--checkpoints", "list:100"});
    ::unsetenv(kOutDirEnv);
    REQUIRE(r.code == kExitOk);
    CHECK(fs::path(trim(r.out)).parent_path() == tmp.path());
}

TEST_CASE("average emits CSV and is idempotent") {
    const auto r = cli({"average", "--scheme", "loglog", "--system", "periodic:2", "--n-max", "1e5"});
    REQUIRE(r.code == kExitOk);
    std::istringstream in(r.out);
    std::string header;
    std::getline(in, header);
    CHECK(header == "scheme,N,value,normalizer");
    std::string row;
    int rows = 0;
    while (std::getline(in, row)) {
        CHECK(row.rfind("loglog,", 0) == 0);
        ++rows;
    }
    CHECK(rows == static_cast<int>(parse_grid("geometric", 100000).size()));
    CHECK(cli({"average", "--scheme", "loglog", "--system", "periodic:2", "--n-max", "1e5"}).out == r.out);

    const auto all = cli({"average", "--n-max", "5000", "--system", "rotation"});
    CHECK(all.code == kExitOk);
    CHECK(all.out.find("cesaro,") != std::string::npos);
    CHECK(all.out.find("loglog-exact,") != std::string::npos);
}

TEST_CASE("sweepout") {
    const auto ok = cli({"sweepout", "--seq", "floor_log2", "--C", "5", "--eps", "0.1"});
    REQUIRE(ok.code == kExitOk);
    const auto cert = json::parse(ok.out);
    CHECK(cert["verdict"] == true);
    CHECK(cli({"sweepout", "--seq", "floor_log2", "--C", "5", "--eps", "0.1"}).out == ok.out);

    const auto linear = cli({"sweepout", "--seq", "linear"});
    CHECK(linear.code == kExitVerifyFailed);
    CHECK(json::parse(linear.out)["verdict"] == false);
    CHECK(linear.out.find("growth") != std::string::npos);

    const auto jw = cli({"sweepout", "--seq", "floor_log2", "--jw", "--jw-u", "8", "--C", "5", "--eps", "0.5"});
    CHECK(jw.code == kExitOk);
    CHECK(json::parse(jw.out).contains("jw"));
}

TEST_CASE("maximal") {
    testing::TempDir tmp("phi");
    const auto phi = tmp.path() / "spike.txt";
    omerg::write_text(phi, "# unit spike\n0 1\n");
    const auto r = cli({"maximal", "--phi", phi.string(), "--n-max", "1e5"});
    REQUIRE(r.code == kExitOk);
    const auto j = json::parse(r.out);
    CHECK(j["pass"] == true);
    CHECK(j["exceedance"].size() <= 3);
    CHECK(cli({"maximal", "--phi", (tmp.path() / "missing.txt").string(), "--n-max", "1e5"}).code == kExitUsage);
}

TEST_CASE("report") {
    const auto r = cli({"report", "--n-max", "1e5", "--glw-lo", "3", "--glw-hi", "6"});
    REQUIRE(r.code == kExitOk);
    const auto j = json::parse(r.out);
    CHECK(j.is_object());
}

}  // TEST_SUITE
