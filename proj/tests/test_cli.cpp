#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "dynheight/report.hpp"

using namespace dynheight;

namespace {

struct CliRun {
    int code;
    std::string out, err;
};

CliRun run(std::vector<std::string> args) {
    args.insert(args.begin(), "dynheight");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream is(s);
    for (std::string line; std::getline(is, line);) v.push_back(line);
    return v;
}

}  // namespace

TEST(Cli, ModelTable) {
    CliRun r = run({"model", "--p", "2", "--n", "2", "--format", "table"});
    EXPECT_EQ(r.code, cli::kExitOk);
    EXPECT_EQ(r.out, "[-8, 2, -1, -2, 1]\n");
}

TEST(Cli, ModelJsonEncoding) {
    CliRun small = run({"model", "--p", "3", "--n", "1"});
    ASSERT_EQ(small.code, 0);
    Json j = Json::parse(small.out);
    EXPECT_EQ(j["coefficient_encoding"], "integer");
    EXPECT_EQ(j["coefficients"], Json::parse("[-3, -1, 0, 1]"));

    CliRun big = run({"model", "--p", "2", "--n", "7"});
    ASSERT_EQ(big.code, 0);
    Json k = Json::parse(big.out);
    EXPECT_EQ(k["coefficient_encoding"], "decimal-string");
    EXPECT_EQ(k["coefficients"][0], "-" + ipow(2, 127).get_str());
}

TEST(Cli, HeightsCsv) {
    CliRun r = run({"heights", "--p", "2", "--n-max", "10", "--format", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto rows = lines(r.out);
    ASSERT_EQ(rows.size(), 11u);
    EXPECT_EQ(rows[0], "n,avg_height,bound,limit,abs_error");
    double last = std::stod(rows[10].substr(rows[10].find(',') + 1));
    EXPECT_NEAR(last, std::log(2.0), 1e-3);
    EXPECT_EQ(rows[10].substr(0, 3), "10,");
}

TEST(Cli, HeightsJsonValidates) {
    CliRun r = run({"heights", "--p", "3", "--n-max", "3"});
    ASSERT_EQ(r.code, 0);
    Json j = Json::parse(r.out);
    ASSERT_EQ(j["reports"].size(), 3u);
    for (const auto& rep : j["reports"]) EXPECT_TRUE(validate_height_report(rep));
    Json broken = j["reports"][0];
    broken.erase("bound");
    EXPECT_FALSE(validate_height_report(broken));
    EXPECT_EQ(j["config"]["n_max"], 3);
}

TEST(Cli, PairingJsonValidates) {
    CliRun d = run({"pairing", "--p", "2", "--method", "decomposition", "--samples", "16"});
    ASSERT_EQ(d.code, 0) << d.err;
    Json jd = Json::parse(d.out);
    EXPECT_TRUE(validate_pairing_report(jd));
    EXPECT_LT(jd["abs_error"].get<double>(), 1e-12);

    CliRun p = run({"pairing", "--p", "2", "--method", "pullback", "--n", "6"});
    ASSERT_EQ(p.code, 0) << p.err;
    Json jp = Json::parse(p.out);
    EXPECT_TRUE(validate_pairing_report(jp));
    EXPECT_EQ(jp["parameters"]["depth"], 6);
    EXPECT_EQ(jp["parameters"]["base_re"], "41/100");
}

TEST(Cli, PadicJson) {
    CliRun r = run({"padic", "--p", "2", "--n", "8", "--digits", "64"});
    ASSERT_EQ(r.code, 0) << r.err;
    Json j = Json::parse(r.out);
    EXPECT_EQ(j["count"], 256);
    EXPECT_EQ(j["success"], true);
    EXPECT_EQ(j["digits"], 64);
}

TEST(Cli, PadicCsv) {
    CliRun r = run({"padic", "--p", "3", "--n", "2", "--digits", "20", "--format", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto rows = lines(r.out);
    ASSERT_EQ(rows.size(), 10u);
    EXPECT_EQ(rows[0], "address,mantissa_base_p,effective_precision");
    EXPECT_EQ(rows[1].substr(0, 3), "00,");
}

TEST(Cli, OrbitCsv) {
    CliRun r = run({"orbit", "--p", "2", "--n", "1", "--format", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto rows = lines(r.out);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0], "address,re,im,residual");
    EXPECT_EQ(std::stod(rows[1].substr(rows[1].find(',') + 1)), -1.0);
    EXPECT_EQ(std::stod(rows[2].substr(rows[2].find(',') + 1)), 2.0);
}

TEST(Cli, GreenJson) {
    CliRun inside = run({"green", "--p", "2", "--re", "1/2"});
    ASSERT_EQ(inside.code, 0);
    EXPECT_EQ(Json::parse(inside.out)["in_filled_julia"], true);
    CliRun outside = run({"green", "--p", "2", "--re", "100000000"});
    ASSERT_EQ(outside.code, 0);
    Json j = Json::parse(outside.out);
    EXPECT_EQ(j["status"], "escaped-certified");
    EXPECT_NEAR(j["value"].get<double>(), std::log(1e8) - std::log(2.0), 1e-6);
}

TEST(Cli, NoTimingIsDeterministic) {
    std::vector<std::string> args{"heights", "--p", "2", "--n-max", "6", "--no-timing"};
    CliRun a = run(args), b = run(args);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(Json::parse(a.out)["reports"][5]["elapsed_ms"], 0);
}

TEST(Cli, InvalidParametersExitTwo) {
    EXPECT_EQ(run({"heights", "--p", "4", "--n-max", "3"}).code, cli::kExitInvalid);
    EXPECT_EQ(run({"heights", "--p", "2", "--n-max", "0"}).code, cli::kExitInvalid);
    EXPECT_EQ(run({"heights", "--p", "2"}).code, cli::kExitInvalid);
    EXPECT_EQ(run({"heights", "--p", "2", "--n-max", "30"}).code, cli::kExitInvalid);  // orbit cap
    EXPECT_EQ(run({"green", "--re", "1/0"}).code, cli::kExitInvalid);
    EXPECT_EQ(run({"model", "--n", "12", "--degree-cap", "64"}).code, cli::kExitInvalid);
    EXPECT_EQ(run({"bogus"}).code, cli::kExitInvalid);
    CliRun r = run({"heights", "--p", "9", "--n-max", "2"});
    EXPECT_NE(r.err.find("error:"), std::string::npos);
}

TEST(Cli, PrecisionFailureExitsThree) {
    CliRun r = run({"padic", "--p", "2", "--n", "10", "--digits", "20"});
    EXPECT_EQ(r.code, cli::kExitNumerical);
    EXPECT_NE(r.err.find("precision"), std::string::npos);
}

TEST(Cli, OutputFile) {
    auto path = std::filesystem::temp_directory_path() / "dynheight_cli_output.json";
    std::filesystem::remove(path);
    CliRun r = run({"model", "--p", "2", "--n", "1", "--output", path.string()});
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(path);
    Json j = Json::parse(in);
    EXPECT_EQ(j["degree"], 2);
    std::filesystem::remove(path);
}

TEST(Cli, BinaryRuns) {
    const std::string exe = DYNHEIGHT_CLI_PATH;
    const std::string cmd = "\"" + exe + "\" model --p 2 --n 2 --format table";
    FILE* pipe = popen(cmd.c_str(), "r");
    ASSERT_NE(pipe, nullptr);
    std::string out;
    char buf[256];
    while (std::fgets(buf, sizeof buf, pipe)) out += buf;
    int status = pclose(pipe);
    EXPECT_EQ(status, 0);
    EXPECT_EQ(out, "[-8, 2, -1, -2, 1]\n");
    EXPECT_NE(std::system(("\"" + exe + "\" heights --p 4 --n-max 2 2>/dev/null").c_str()), 0);
}
