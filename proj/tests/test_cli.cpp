#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "subfrac/run.hpp"

using namespace subfrac;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

ExperimentConfig smallMs(const std::string& out) {
    ExperimentConfig cfg;
    cfg.experiment = "ms";
    cfg.group = "r1";
    cfg.gauge = "euclidean";
    cfg.orlicz = "power:2";
    cfg.field = "bump:1";
    cfg.quad.samples = 20000;
    cfg.quad.seed = 5;
    cfg.outputDir = out;
    return cfg;
}

}  // namespace

TEST_CASE("config validation") {
    ExperimentConfig cfg = smallMs("cli_out/validate");
    CHECK_NOTHROW(cfg.validate());

    ExperimentConfig bad = cfg;
    bad.group = "r9";
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.gauge = "euclidean";
    bad.group = "h1";
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.orlicz = "power";
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.field = "noise:1";
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.quad.samples = 100;  // below the configuration floor
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.sGrid = {0.5, 1.5};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.experiment = "plot";
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    CHECK(cfg.effectiveGrid() == std::vector<double>{0.01, 0.02, 0.05, 0.10});
    ExperimentConfig bbm = cfg;
    bbm.experiment = "bbm";
    CHECK(bbm.effectiveGrid() == std::vector<double>{0.90, 0.95, 0.975, 0.99});
}

TEST_CASE("run writes the artifact set") {
    const ExperimentConfig cfg = smallMs("cli_out/run1");
    CHECK(runExperiment(cfg) == 0);
    CHECK(fs::exists("cli_out/run1/sweep.csv"));
    CHECK(fs::exists("cli_out/run1/verdicts.json"));
    CHECK(fs::exists("cli_out/run1/manifest.json"));

    const std::string csv = slurp("cli_out/run1/sweep.csv");
    CHECK(csv.rfind("s,raw_energy,scaled_energy,stderr,near_field,far_field,"
                    "tail_analytic\r\n", 0) == 0);
    // header + 4 rows, CRLF separated
    int rows = 0;
    for (std::size_t pos = 0; (pos = csv.find("\r\n", pos)) != std::string::npos;
         pos += 2)
        ++rows;
    CHECK(rows == 5);

    const auto manifest = nlohmann::json::parse(slurp("cli_out/run1/manifest.json"));
    CHECK(manifest["config"]["group"] == "r1");
    CHECK(manifest["constants"]["q"] == 1);
    CHECK(manifest["constants"]["c_b"].get<double>() == doctest::Approx(2.0));
    CHECK(manifest["verdict_summary"].contains("fail"));

    const auto verdicts = nlohmann::json::parse(slurp("cli_out/run1/verdicts.json"));
    CHECK(verdicts["verdicts"].is_array());
    CHECK(verdicts["sweep"]["points"].size() == 4);
}

TEST_CASE("identical config reproduces sweep.csv bit-identically across workers") {
    for (const char* workers : {"1", "4", "8"}) {
        setenv("SUBFRAC_THREADS", workers, 1);
        ExperimentConfig cfg = smallMs(std::string("cli_out/det") + workers);
        CHECK(runExperiment(cfg) == 0);
    }
    unsetenv("SUBFRAC_THREADS");
    const std::string a = slurp("cli_out/det1/sweep.csv");
    const std::string b = slurp("cli_out/det4/sweep.csv");
    const std::string c = slurp("cli_out/det8/sweep.csv");
    CHECK(a == b);
    CHECK(a == c);
    CHECK(a.size() > 100);
}

TEST_CASE("constants experiment") {
    ExperimentConfig cfg = smallMs("cli_out/constants");
    cfg.experiment = "constants";
    cfg.group = "h1";
    cfg.gauge = "koranyi";
    CHECK(runExperiment(cfg) == 0);
    const auto manifest = nlohmann::json::parse(slurp("cli_out/constants/manifest.json"));
    CHECK(manifest["constants"]["q"] == 4);
    const double cb = manifest["constants"]["c_b"].get<double>();
    CHECK(cb == doctest::Approx(1.2337).epsilon(0.01));
}

TEST_CASE("config file application and override semantics") {
    fs::create_directories("cli_out");
    {
        std::ofstream f("cli_out/apply.toml");
        f << "# comment\n"
          << "group = \"r2\"\n"
          << "samples = 50000\n"
          << "s_grid = [0.01, 0.05]\n"
          << "r_min = 1e-3\n";
    }
    ExperimentConfig cfg = smallMs("cli_out/apply");
    applyConfigFile(cfg, "cli_out/apply.toml", {"group"});
    CHECK(cfg.group == "r1");  // CLI-provided key wins
    CHECK(cfg.quad.samples == 50000);
    CHECK(cfg.quad.r_min == doctest::Approx(1e-3));
    CHECK(cfg.sGrid == std::vector<double>{0.01, 0.05});

    // dotted key forms from the documented interface
    {
        std::ofstream f("cli_out/dotted.toml");
        f << "orlicz.family = \"power_log\"\n"
          << "orlicz.p = 2.5\n"
          << "field.name = \"gauss\"\n"
          << "field.radius = 4\n"
          << "quad.samples = 30000\n"
          << "quad.r_min = 0.01\n"
          << "output_dir = \"cli_out/dotted\"\n";
    }
    ExperimentConfig dotted = smallMs("cli_out/unused");
    applyConfigFile(dotted, "cli_out/dotted.toml", {});
    CHECK(dotted.orlicz == "power_log:2.5");
    CHECK(dotted.field == "gauss:4");
    CHECK(dotted.quad.samples == 30000);
    CHECK(dotted.quad.r_min == doctest::Approx(0.01));
    CHECK(dotted.outputDir == "cli_out/dotted");
    CHECK_NOTHROW(dotted.validate());

    {
        std::ofstream f("cli_out/broken.toml");
        f << "unknown_key = 1\n";
    }
    ExperimentConfig cfg2 = smallMs("cli_out/apply");
    CHECK_THROWS_AS(applyConfigFile(cfg2, "cli_out/broken.toml", {}), ConfigError);
    CHECK_THROWS_AS(applyConfigFile(cfg2, "cli_out/missing.toml", {}), ConfigError);
}

#ifdef SUBFRAC_BIN
TEST_CASE("command line binary exit codes") {
    const std::string bin = SUBFRAC_BIN;
    auto runCmd = [&](const std::string& args) {
        const std::string cmd = bin + " " + args + " >/dev/null 2>&1";
        const int rc = std::system(cmd.c_str());
        return WEXITSTATUS(rc);
    };
    CHECK(runCmd("run --experiment ms --group r1 --orlicz power:2 --field bump:1 "
                 "--samples 20000 --output cli_out/bin_ms") == 0);
    CHECK(runCmd("run --group nope --output cli_out/bin_bad") == 1);
    CHECK(runCmd("transmogrify") == 1);
    CHECK(runCmd("constants --group r1 --samples 20000 --output cli_out/bin_const") == 0);
    CHECK(fs::exists("cli_out/bin_ms/sweep.csv"));
    CHECK(!fs::exists("cli_out/bin_bad/sweep.csv"));
}

TEST_CASE("config file with flag overrides") {
    fs::create_directories("cli_out");
    {
        std::ofstream f("cli_out/ms.toml");
        f << "group = \"r1\"\n"
          << "orlicz = \"power:2\"\n"
          << "field = \"bump:1\"\n"
          << "samples = 20000\n"
          << "output = \"cli_out/toml_run\"\n";
    }
    const std::string bin = SUBFRAC_BIN;
    const std::string cmd = bin +
                            " run --experiment ms --config cli_out/ms.toml"
                            " --seed 9 >/dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(fs::exists("cli_out/toml_run/sweep.csv"));
}
#endif
