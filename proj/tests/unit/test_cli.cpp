#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gasket/cli/config.hpp"
#include "gasket/cli/run.hpp"
#include "gasket/cli/verify.hpp"
#include "gasket/errors.hpp"

namespace gasket::cli {
namespace {

namespace fs = std::filesystem;

const Artifact& artifact(const Outcome& o, const std::string& path) {
  const auto it = std::find_if(o.artifacts.begin(), o.artifacts.end(), [&](const Artifact& a) { return a.path == path; });
  if (it == o.artifacts.end()) throw std::runtime_error("missing artifact " + path);
  return *it;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

RunConfig config(Command c, int level) {
  RunConfig cfg;
  cfg.command = c;
  cfg.level = level;
  return cfg;
}

int run_args(std::vector<std::string> args) {
  args.insert(args.begin(), "gasket_fgf");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return main_entry(static_cast<int>(argv.size()), argv.data());
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "gasket_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

TEST(CliConfig, CommandNames) {
  for (Command c : {Command::Build, Command::Eigs, Command::Kernel, Command::Sample, Command::Verify})
    EXPECT_EQ(parse_command(to_string(c)), c);
  EXPECT_THROW((void)parse_command("plot"), ParameterError);
}

TEST(CliConfig, OrderAndHurstResolution) {
  RunConfig cfg = config(Command::Sample, 4);
  cfg.hurst = 0.3;
  cfg.resolve();
  ASSERT_TRUE(cfg.s);
  EXPECT_NEAR(*cfg.s, 0.47051, 5e-6);

  RunConfig both = config(Command::Sample, 4);
  both.s = 0.5;
  both.hurst = 0.3;
  EXPECT_THROW(both.resolve(), ParameterError);

  RunConfig missing = config(Command::Sample, 4);
  EXPECT_THROW(missing.resolve(), ParameterError);

  RunConfig verify = config(Command::Verify, 6);
  verify.resolve();
  EXPECT_EQ(*verify.s, 0.5);
}

TEST(CliConfig, InadmissibleOrderNamesInterval) {
  RunConfig cfg = config(Command::Sample, 4);
  cfg.s = 0.3;
  try {
    cfg.resolve();
    FAIL() << "expected ParameterError";
  } catch (const ParameterError& e) {
    EXPECT_NE(std::string(e.what()).find("(0.34131, 0.65869)"), std::string::npos) << e.what();
  }
  // Kernels accept any positive order.
  RunConfig kernel = config(Command::Kernel, 4);
  kernel.s = 0.3;
  EXPECT_NO_THROW(kernel.resolve());
  kernel.s = 0.0;
  EXPECT_THROW(kernel.resolve(), ParameterError);
}

TEST(CliConfig, RangeChecks) {
  RunConfig cfg = config(Command::Build, -1);
  EXPECT_THROW(cfg.resolve(), ParameterError);
  cfg = config(Command::Sample, 4);
  cfg.s = 0.5;
  cfg.tail_budget = 1.5;
  EXPECT_THROW(cfg.resolve(), ParameterError);
  cfg = config(Command::Kernel, 4);
  cfg.s = 0.5;
  cfg.kernel = "poisson";
  EXPECT_THROW(cfg.resolve(), ParameterError);
  cfg = config(Command::Verify, 6);
  cfg.replications = 10;
  EXPECT_THROW(cfg.resolve(), ParameterError);
}

TEST(CliConfig, JsonKeys) {
  RunConfig cfg;
  apply_json(cfg, nlohmann::json::parse(R"({"level": 3, "s": 0.45, "seed": 9, "kernel": "heat"})"));
  EXPECT_EQ(cfg.level, 3);
  EXPECT_EQ(*cfg.s, 0.45);
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ(cfg.kernel, "heat");
  EXPECT_THROW(apply_json(cfg, nlohmann::json::parse(R"({"levle": 3})")), ParameterError);
}

TEST(CliConfig, ThreadsFromEnvironment) {
  ::setenv("GASKET_FGF_THREADS", "3", 1);
  EXPECT_EQ(threads_from_env(), 3u);
  ::setenv("GASKET_FGF_THREADS", "many", 1);
  EXPECT_THROW((void)threads_from_env(), ParameterError);
  ::unsetenv("GASKET_FGF_THREADS");
  EXPECT_FALSE(threads_from_env());
}

TEST(CliConfig, EchoOmitsPaths) {
  RunConfig cfg = config(Command::Sample, 4);
  cfg.s = 0.5;
  cfg.out = "/tmp/somewhere.csv";
  cfg.threads = 2;
  cfg.resolve();
  const auto e = cfg.echo();
  EXPECT_FALSE(e.contains("out"));
  EXPECT_FALSE(e.contains("threads"));
  EXPECT_EQ(e.at("command"), "sample");
}

TEST(CliRun, ExitCodeForInvalidConfiguration) {
  RunConfig cfg = config(Command::Sample, 4);
  cfg.s = 0.9;
  std::ostringstream out, err;
  EXPECT_EQ(run(cfg, out, err), 2);
  EXPECT_NE(err.str().find("(0.34131, 0.65869)"), std::string::npos);
  EXPECT_TRUE(out.str().empty());

  RunConfig modes = config(Command::Sample, 3);
  modes.s = 0.5;
  modes.modes = 1000;
  std::ostringstream out2, err2;
  EXPECT_EQ(run(modes, out2, err2), 2);
}

TEST(CliRun, ExitCodesFromArgv) {
  EXPECT_EQ(run_args({"sample", "--level", "3", "--s", "0.5", "--H", "0.3"}), 2);
  EXPECT_EQ(run_args({"sample", "--level", "3", "--s", "0.2"}), 2);
  EXPECT_EQ(run_args({"frobnicate"}), 2);
  EXPECT_EQ(run_args({"build", "--level", "2"}), 0);
}

TEST(CliRun, ConfigFileWithFlagOverride) {
  const fs::path cfg_path = scratch("eigs.json");
  const fs::path out_path = scratch("eigs_out.json");
  std::ofstream(cfg_path) << R"({"level": 2, "count": 4, "tolerance": 1e-9})";
  ASSERT_EQ(run_args({"eigs", "--config", cfg_path.string(), "--level", "3", "--out", out_path.string()}), 0);
  std::ifstream in(out_path);
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j.at("level"), 3);
  EXPECT_EQ(j.at("count"), 4);
  EXPECT_EQ(j.at("config").at("tolerance"), 1e-9);

  std::ofstream(cfg_path) << R"({"level": 2, "colour": "red"})";
  EXPECT_EQ(run_args({"eigs", "--config", cfg_path.string()}), 2);
}

TEST(CliRun, BuildArtifacts) {
  RunConfig cfg = config(Command::Build, 2);
  cfg.out = "g.json";
  cfg.matrix = "m.txt";
  cfg.resolve();
  const Outcome o = execute(cfg);
  const auto g = nlohmann::json::parse(artifact(o, "g.json").content).at("graph");
  EXPECT_EQ(g.at("vertices").size(), 15u);
  EXPECT_EQ(g.at("edges").size(), 27u);
  EXPECT_EQ(g.at("cells").size(), 9u);
  const auto coo = lines(artifact(o, "m.txt").content);
  const auto header = nlohmann::json::parse(coo.front());
  EXPECT_EQ(header.at("dim"), 15);
  EXPECT_EQ(header.at("nnz").get<std::size_t>(), coo.size() - 1);
  EXPECT_EQ(header.at("nnz"), 15 + 2 * 27);
}

TEST(CliRun, EigsReport) {
  RunConfig cfg = config(Command::Eigs, 6);
  cfg.count = 300;
  cfg.out = "e.json";
  cfg.vectors = "v.csv";
  cfg.resolve();
  const Outcome o = execute(cfg);
  const auto j = nlohmann::json::parse(artifact(o, "e.json").content);
  const auto lambdas = j.at("lambdas").get<std::vector<double>>();
  ASSERT_EQ(lambdas.size(), 300u);
  EXPECT_TRUE(std::is_sorted(lambdas.begin(), lambdas.end()));
  EXPECT_NEAR(lambdas.front(), 27.11286, 5e-5);
  EXPECT_LE(j.at("residual").get<double>(), 1e-8);
  EXPECT_FALSE(artifact(o, "v.csv").content.empty());
}

TEST(CliRun, SampleFromHurst) {
  RunConfig cfg = config(Command::Sample, 6);
  cfg.hurst = 0.3;
  cfg.seed = 42;
  cfg.out = "f.csv";
  cfg.report = "r.json";
  cfg.resolve();
  const Outcome o = execute(cfg);
  const auto rows = lines(artifact(o, "f.csv").content);
  ASSERT_GE(rows.size(), 3u);
  EXPECT_EQ(rows[0].rfind("# field: ", 0), 0u);
  EXPECT_EQ(rows[1].rfind("# config: ", 0), 0u);
  EXPECT_EQ(rows[2], "vertex_id,x,y,value");
  EXPECT_EQ(rows.size() - 3, 1095u);
  const auto meta = nlohmann::json::parse(rows[0].substr(9));
  EXPECT_NEAR(meta.at("H").get<double>(), 0.3, 1e-15);
  const auto report = nlohmann::json::parse(artifact(o, "r.json").content);
  EXPECT_NEAR(report.at("config").at("s").get<double>(), 0.47051, 5e-6);
  EXPECT_LE(std::abs(report.at("mean").get<double>()), 1e-12);
}

TEST(CliRun, PgmRaster) {
  RunConfig cfg = config(Command::Sample, 4);
  cfg.s = 0.5;
  cfg.pgm = "f.pgm";
  cfg.resolve();
  const std::string pgm = artifact(execute(cfg), "f.pgm").content;
  const auto ls = lines(pgm.substr(0, 4096));
  EXPECT_EQ(ls[0], "P5");
  EXPECT_EQ(ls[1].front(), '#');
  EXPECT_EQ(ls[2], "512 512");
  EXPECT_EQ(ls[3], "255");
  const std::size_t header = ls[0].size() + ls[1].size() + ls[2].size() + ls[3].size() + 4;
  EXPECT_EQ(pgm.size(), header + 512u * 512u);
}

TEST(CliRun, KernelArtifactsAreReproducible) {
  RunConfig cfg = config(Command::Kernel, 4);
  cfg.s = 0.5;
  cfg.out = "k.csv";
  cfg.report = "k.json";
  cfg.resolve();
  const Outcome a = execute(cfg);
  const Outcome b = execute(cfg);
  ASSERT_EQ(a.artifacts.size(), b.artifacts.size());
  for (std::size_t i = 0; i < a.artifacts.size(); ++i) EXPECT_EQ(a.artifacts[i].content, b.artifacts[i].content);
  const auto rows = lines(artifact(a, "k.csv").content);
  EXPECT_EQ(rows[1], "i,j,value");
  EXPECT_EQ(rows.size() - 2, 123u * 124u / 2u);

  RunConfig heat = config(Command::Kernel, 4);
  heat.kernel = "heat";
  heat.time = 0.05;
  heat.report = "k.json";
  heat.resolve();
  const auto report = nlohmann::json::parse(artifact(execute(heat), "k.json").content);
  EXPECT_TRUE(report.at("report").contains("slope"));
  EXPECT_FALSE(report.at("config").contains("s"));
}

TEST(CliVerify, SuiteNamesAndLineFormat) {
  const auto names = suite_names();
  ASSERT_EQ(names.size(), 9u);
  EXPECT_EQ(names.front(), "structure");
  CheckResult r;
  r.criterion = 3;
  r.name = "weyl";
  r.pass = true;
  r.summary = "ok";
  EXPECT_EQ(format_line(r), "PASS [3] weyl: ok");
  r.pass = false;
  EXPECT_EQ(format_line(r).rfind("FAIL [3] weyl", 0), 0u);
}

}  // namespace
}  // namespace gasket::cli
