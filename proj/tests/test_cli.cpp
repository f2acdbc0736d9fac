#include <gtest/gtest.h>
#include <packsdp/cli.hpp>

#include <filesystem>
#include <sstream>

using namespace packsdp;
namespace fs = std::filesystem;

namespace {
class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() / ("packsdp_cli_" + std::to_string(::getpid()) + "_" +
                                           ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }
    std::string path(const std::string& name) const { return (dir / name).string(); }
    std::string config(const std::string& name, const json& j) const {
        write_file(path(name), j.dump());
        return path(name);
    }
    int run(const std::string& cmd, const CommandOptions& o) {
        log.str("");
        return run_command(cmd, o, log);
    }
    fs::path dir;
    std::ostringstream log;
};
}  // namespace

TEST_F(CliTest, CertifyBallCaseOne) {
    CommandOptions o;
    o.ball_case = "i";
    o.n = 5;
    o.out = path("cert.json");
    EXPECT_EQ(run("certify-ball", o), 0);
    json j = json::parse(read_file(o.out));
    EXPECT_EQ(j["M"], "2");
    EXPECT_TRUE(fs::exists(path("cert.json.manifest.json")));
}

TEST_F(CliTest, CertifyBallUnsupportedCase) {
    CommandOptions o;
    o.ball_case = "iv";
    o.n = 3;
    o.out = path("cert.json");
    EXPECT_EQ(run("certify-ball", o), 3);
    EXPECT_NE(log.str().find("CaseUnsupported"), std::string::npos);
}

TEST_F(CliTest, GenerateIsDeterministic) {
    CommandOptions o;
    o.config = config("ball.json", {{"problem", "ball"}, {"n", 2}, {"r", "1"}, {"R", "3"}, {"d", 4}});
    o.out = path("a.json");
    ASSERT_EQ(run("generate", o), 0);
    o.out = path("b.json");
    ASSERT_EQ(run("generate", o), 0);
    EXPECT_EQ(read_file(path("a.json")), read_file(path("b.json")));
    auto p = problem_from_json(json::parse(read_file(path("a.json"))));
    EXPECT_EQ(p.blocks, generate_ball_program(2, Scalar(1), Scalar(3), 4).blocks);
}

TEST_F(CliTest, GenerateThreePointWithSdpa) {
    CommandOptions o;
    o.config = config("pet.json", {{"problem", "threept"}, {"n", 4}, {"cos_theta", "1/6"}, {"d", 2}});
    o.out = path("pet.problem.json");
    o.sdpa = path("pet.dat-s");
    ASSERT_EQ(run("generate", o), 0);
    auto p = read_sdpa(read_file(o.sdpa));
    EXPECT_EQ(p.blocks, generate_threept_program(4, Scalar(Rational(1, 6)), 2).blocks);
}

TEST_F(CliTest, DegreeTooSmall) {
    CommandOptions o;
    o.config = config("bad.json", {{"problem", "ball"}, {"n", 2}, {"r", "1"}, {"R", "2"}, {"d", 0}});
    o.out = path("p.json");
    EXPECT_EQ(run("generate", o), 3);
    EXPECT_NE(log.str().find("DegreeTooSmall"), std::string::npos);
}

TEST_F(CliTest, BadConfigs) {
    CommandOptions o;
    o.out = path("p.json");
    o.config = config("c1.json", {{"problem", "ball"}, {"n", 2}, {"d", 1}});
    EXPECT_EQ(run("generate", o), 2);
    o.config = config("c2.json", {{"problem", "ball"}, {"n", 2}, {"d", 1}, {"r", 0.5}, {"R", "2"}});
    EXPECT_EQ(run("generate", o), 2);
    write_file(path("c3.json"), "{ not json");
    o.config = path("c3.json");
    EXPECT_EQ(run("generate", o), 2);
    o.config = path("missing.json");
    EXPECT_EQ(run("generate", o), 2);
    EXPECT_EQ(run("frobnicate", o), 2);
}

TEST_F(CliTest, PipelineAndTamperedVerify) {
    CommandOptions g;
    g.config = config("b.json", {{"problem", "ball"}, {"n", 3}, {"r", "1"}, {"R", "2"}, {"d", 1}, {"pin_value", "2"}});
    g.out = path("b.problem.json");
    ASSERT_EQ(run("generate", g), 0);

    CommandOptions s;
    s.problem = g.out;
    s.out = path("b.numeric.json");
    s.precision = 256;
    ASSERT_EQ(run("solve", s), 0);

    CommandOptions r;
    r.problem = g.out;
    r.solution = s.out;
    r.out = path("b.exact.json");
    r.certificate = path("b.cert.json");
    r.precision = 256;
    ASSERT_EQ(run("round", r), 0) << log.str();

    CommandOptions v;
    v.problem = g.out;
    v.solution = r.out;
    v.out = path("b.verify.json");
    EXPECT_EQ(run("verify", v), 0);
    v.pin = "3";
    EXPECT_EQ(run("verify", v), 1);
    v.pin.clear();

    // tamper: make one diagonal entry negative
    json x = json::parse(read_file(r.out));
    x["entries"][0][0] = "-1";
    write_file(path("tampered.json"), x.dump());
    v.solution = path("tampered.json");
    EXPECT_NE(run("verify", v), 0);
    json cert = json::parse(read_file(v.out));
    bool any_bad = false;
    for (auto& b : cert["blocks"])
        if (!b["psd_ok"].get<bool>()) any_bad = true;
    EXPECT_TRUE(any_bad || !cert["linear_ok"].get<bool>());

    CommandOptions a;
    a.problem = g.out;
    a.solution = r.out;
    a.out = path("b.report.json");
    ASSERT_EQ(run("analyze", a), 0);
    json rep = json::parse(read_file(a.out));
    EXPECT_EQ(rep["diagonal_roots"], json::array({"1"}));
}

TEST_F(CliTest, ImportSdpaResult) {
    CommandOptions g;
    g.config = config("b.json", {{"problem", "ball"}, {"n", 2}, {"r", "1"}, {"R", "2"}, {"d", 1}});
    g.out = path("b.problem.json");
    ASSERT_EQ(run("generate", g), 0);
    auto p = problem_from_json(json::parse(read_file(g.out)));
    std::ostringstream os;
    os << "yMat =\n{\n";
    for (int n : p.blocks) {
        os << "{";
        for (int i = 0; i < n; ++i) {
            os << (i ? "," : "") << "{";
            for (int j = 0; j < n; ++j) os << (j ? "," : "") << (i == j ? "1" : "0");
            os << "}";
        }
        os << "}\n";
    }
    os << "}\n";
    write_file(path("res.out"), os.str());
    CommandOptions im;
    im.problem = g.out;
    im.solution = path("res.out");
    im.out = path("imported.json");
    EXPECT_EQ(run("import", im), 0) << log.str();
    auto X = numeric_solution_from_json(json::parse(read_file(im.out)));
    EXPECT_EQ(static_cast<int>(X.blocks.size()), p.num_blocks());
    write_file(path("short.out"), "yMat = { {1} }");
    im.solution = path("short.out");
    EXPECT_EQ(run("import", im), 2);
}

TEST(Manifest, HashIgnoresTimestamps) {
    RunManifest a, b;
    a.command = b.command = "generate";
    a.parameters["n"] = b.parameters["n"] = 3;
    a.started = "2020-01-01T00:00:00Z";
    b.started = "2030-01-01T00:00:00Z";
    EXPECT_EQ(a.hash(), b.hash());
    b.parameters["n"] = 4;
    EXPECT_NE(a.hash(), b.hash());
    EXPECT_EQ(fnv1a64(""), "cbf29ce484222325");
    EXPECT_EQ(fnv1a64("a"), "af63dc4c8601ec8c");
}
