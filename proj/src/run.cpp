#include "subfrac/run.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "subfrac/checks.hpp"
#include "subfrac/fields.hpp"

namespace subfrac {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::pair<std::string, double> parseNameValue(const std::string& s, const char* what) {
    const std::size_t colon = s.find(':');
    if (colon == std::string::npos)
        throw ConfigError(std::string(what) + ": expected name:value, got '" + s + "'");
    try {
        return {s.substr(0, colon), std::stod(s.substr(colon + 1))};
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        throw ConfigError(std::string(what) + ": bad numeric value in '" + s + "'");
    }
}

ordered_json verdictJson(const Verdict& v) {
    ordered_json j;
    j["name"] = v.name;
    j["lhs"] = v.lhs;
    j["rhs"] = v.rhs;
    j["error_bar"] = v.errorBar;
    j["status"] = statusName(v.status);
    if (!v.note.empty()) j["note"] = v.note;
    return j;
}

struct StageClock {
    using clock = std::chrono::steady_clock;
    clock::time_point last = clock::now();
    ordered_json stages;
    void mark(const std::string& name) {
        const auto now = clock::now();
        stages[name] =
            std::chrono::duration_cast<std::chrono::milliseconds>(now - last).count();
        last = now;
    }
};

void writeSweepCsv(const std::filesystem::path& path, const SweepResult& res) {
    std::ofstream csv(path, std::ios::binary);
    csv << "s,raw_energy,scaled_energy,stderr,near_field,far_field,tail_analytic\r\n";
    for (const auto& p : res.points) {
        csv << fmt(p.s) << ',' << fmt(p.raw) << ',' << fmt(p.scaled) << ','
            << fmt(p.err) << ',' << fmt(p.parts.nearField) << ','
            << fmt(p.parts.farField) << ',' << fmt(p.parts.tailAnalytic) << "\r\n";
    }
}

ordered_json sweepJson(const SweepResult& res) {
    ordered_json j;
    j["regime"] = res.regime == SweepRegime::bbm_s_to_1 ? "bbm_s_to_1" : "ms_s_to_0";
    ordered_json pts = ordered_json::array();
    for (const auto& p : res.points) {
        ordered_json pj;
        pj["s"] = p.s;
        pj["raw_energy"] = p.raw;
        pj["scaled_energy"] = p.scaled;
        pj["stderr"] = p.err;
        pts.push_back(pj);
    }
    j["points"] = pts;
    j["extrapolated"] = res.extrapolated;
    j["extrapolation_residual"] = res.residual;
    ordered_json targets;
    for (const auto& [k, v] : res.targets) targets[k] = v;
    j["targets"] = targets;
    return j;
}

}  // namespace

void applyConfigFile(ExperimentConfig& cfg, const std::string& path,
                     const std::vector<std::string>& cliProvided) {
    std::ifstream file(path);
    if (!file) throw ConfigError("cannot read config file: " + path);
    auto provided = [&](const std::string& key) {
        for (const auto& k : cliProvided)
            if (k == key) return true;
        return false;
    };
    auto strip = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    auto unquote = [&](const std::string& v) {
        if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
            return v.substr(1, v.size() - 2);
        throw ConfigError("config: expected a quoted string, got " + v);
    };
    auto toDouble = [&](const std::string& v) {
        try {
            std::size_t used = 0;
            const double d = std::stod(v, &used);
            if (used != v.size()) throw ConfigError("");
            return d;
        } catch (...) {
            throw ConfigError("config: expected a number, got " + v);
        }
    };
    // dotted forms split name:value pairs into their parts
    std::string orliczFamily, fieldName;
    bool haveOrliczP = false, haveFieldRadius = false;
    double orliczP = 0.0, fieldRadius = 0.0;

    std::string line;
    int lineno = 0;
    while (std::getline(file, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = strip(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected key = value");
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (provided(key)) continue;
        if (key == "experiment") cfg.experiment = unquote(value);
        else if (key == "group") cfg.group = unquote(value);
        else if (key == "gauge") cfg.gauge = unquote(value);
        else if (key == "orlicz") cfg.orlicz = unquote(value);
        else if (key == "field") cfg.field = unquote(value);
        else if (key == "output" || key == "output_dir") cfg.outputDir = unquote(value);
        else if (key == "orlicz.family") orliczFamily = unquote(value);
        else if (key == "orlicz.p") { orliczP = toDouble(value); haveOrliczP = true; }
        else if (key == "field.name") fieldName = unquote(value);
        else if (key == "field.radius") { fieldRadius = toDouble(value); haveFieldRadius = true; }
        else if (key == "samples" || key == "quad.samples")
            cfg.quad.samples = static_cast<std::size_t>(toDouble(value));
        else if (key == "seed" || key == "quad.seed")
            cfg.quad.seed = static_cast<std::uint64_t>(toDouble(value));
        else if (key == "annuli" || key == "quad.annuli")
            cfg.quad.annuli = static_cast<int>(toDouble(value));
        else if (key == "r_min" || key == "quad.r_min")
            cfg.quad.r_min = toDouble(value);
        else if (key == "s_grid") {
            if (value.size() < 2 || value.front() != '[' || value.back() != ']')
                throw ConfigError("config: s_grid expects [a, b, ...]");
            cfg.sGrid.clear();
            std::string body = value.substr(1, value.size() - 2);
            std::size_t pos = 0;
            while (pos < body.size()) {
                auto comma = body.find(',', pos);
                if (comma == std::string::npos) comma = body.size();
                const std::string item = strip(body.substr(pos, comma - pos));
                if (!item.empty()) cfg.sGrid.push_back(toDouble(item));
                pos = comma + 1;
            }
        } else {
            throw ConfigError("config: unknown key '" + key + "'");
        }
    }

    auto trimNumber = [](double v) {
        std::string s = std::to_string(v);
        s.erase(s.find_last_not_of('0') + 1);
        if (!s.empty() && s.back() == '.') s.pop_back();
        return s;
    };
    if (!orliczFamily.empty() || haveOrliczP) {
        if (!provided("orlicz")) {
            const auto colon = cfg.orlicz.find(':');
            const std::string fam =
                orliczFamily.empty() ? cfg.orlicz.substr(0, colon) : orliczFamily;
            const std::string p = haveOrliczP ? trimNumber(orliczP)
                                              : cfg.orlicz.substr(colon + 1);
            cfg.orlicz = fam + ":" + p;
        }
    }
    if (!fieldName.empty() || haveFieldRadius) {
        if (!provided("field")) {
            const auto colon = cfg.field.find(':');
            const std::string name =
                fieldName.empty() ? cfg.field.substr(0, colon) : fieldName;
            const std::string r = haveFieldRadius ? trimNumber(fieldRadius)
                                                  : cfg.field.substr(colon + 1);
            cfg.field = name + ":" + r;
        }
    }
}

void ExperimentConfig::validate() const {
    if (experiment != "bbm" && experiment != "ms" && experiment != "props" &&
        experiment != "constants")
        throw ConfigError("unknown experiment: " + experiment);
    try {
        const CarnotGroup g = CarnotGroup::fromId(group);
        HomogeneousGauge::fromId(gauge, g);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    try {
        OrliczFunction::fromId(orlicz);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    const auto [fieldName, radius] = parseNameValue(field, "field");
    if (fieldName != "bump" && fieldName != "gauss" && fieldName != "indicator")
        throw ConfigError("unknown field: " + fieldName);
    if (!(radius > 0.0)) throw ConfigError("field radius must be positive");
    if (quad.samples < 1000) throw ConfigError("quad.samples must be >= 1000");
    try {
        quad.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    for (double s : sGrid)
        if (!(s > 0.0 && s < 1.0)) throw ConfigError("s grid values must lie in (0,1)");
    if (outputDir.empty()) throw ConfigError("output dir must not be empty");
}

std::vector<double> ExperimentConfig::effectiveGrid() const {
    if (!sGrid.empty()) return sGrid;
    if (experiment == "bbm") return {0.90, 0.95, 0.975, 0.99};
    return {0.01, 0.02, 0.05, 0.10};
}

int runExperiment(const ExperimentConfig& cfg) {
    cfg.validate();
    StageClock clock;

    const CarnotGroup g = CarnotGroup::fromId(cfg.group);
    HomogeneousGauge ng = HomogeneousGauge::fromId(cfg.gauge, g);
    const OrliczFunction phi = OrliczFunction::fromId(cfg.orlicz);
    const auto [fieldName, radius] = parseNameValue(cfg.field, "field");
    const ScalarField u = makeField(fieldName, radius, g, ng);
    clock.mark("setup_ms");

    std::filesystem::create_directories(cfg.outputDir);
    const std::filesystem::path dir(cfg.outputDir);

    auto gc = gaugeConstants(g, ng, cfg.quad.seed);
    clock.mark("constants_ms");

    std::vector<Verdict> verdicts;
    ordered_json extra;

    if (cfg.experiment == "bbm" || cfg.experiment == "ms") {
        const SweepResult res =
            cfg.experiment == "bbm"
                ? bbmSweep(u, phi, g, ng, cfg.effectiveGrid(), cfg.quad)
                : msSweep(u, phi, g, ng, cfg.effectiveGrid(), cfg.quad);
        writeSweepCsv(dir / "sweep.csv", res);
        verdicts = res.verdicts;
        extra["sweep"] = sweepJson(res);
        std::cout << (cfg.experiment == "bbm" ? "bbm" : "ms") << " extrapolated = "
                  << res.extrapolated << " (residual " << res.residual << ")\n";
        clock.mark("sweep_ms");
    } else if (cfg.experiment == "props") {
        auto geo = geometrySuite(g, ng, 100000, cfg.quad.seed);
        verdicts.insert(verdicts.end(), geo.begin(), geo.end());
        auto meas = measureSuite(g, ng, cfg.quad);
        verdicts.insert(verdicts.end(), meas.begin(), meas.end());
        auto orl = orliczSuite(phi, 10000, cfg.quad.seed);
        verdicts.insert(verdicts.end(), orl.begin(), orl.end());
        auto fun = verifyInequalities(u, phi, g, ng, {0.3, 0.5, 0.7, 0.9}, cfg.quad);
        verdicts.insert(verdicts.end(), fun.begin(), fun.end());
        clock.mark("props_ms");
    } else {  // constants
        const IntegralValue sigma = sphereIntegral(
            [](const Coords&) { return 1.0; }, g, ng, cfg.quad);
        std::cout << "group " << g.name() << "  Q = " << g.homogeneousDim() << "\n"
                  << "C_b    = " << gc->cb << " +/- " << gc->cbErr << "\n"
                  << "Q C_b  = " << gc->qcb << " +/- " << g.homogeneousDim() * gc->cbErr
                  << "\n"
                  << "sigma(S) = " << sigma.value << " +/- " << sigma.err << "\n";
        extra["constants"]["sigma_s"] = sigma.value;
        extra["constants"]["sigma_s_stderr"] = sigma.err;
        clock.mark("constants_query_ms");
    }

    int pass = 0, fail = 0, inconclusive = 0;
    ordered_json vj = ordered_json::array();
    for (const auto& v : verdicts) {
        vj.push_back(verdictJson(v));
        switch (v.status) {
            case VerdictStatus::pass: ++pass; break;
            case VerdictStatus::fail: ++fail; break;
            case VerdictStatus::inconclusive: ++inconclusive; break;
        }
    }
    ordered_json verdictsDoc;
    verdictsDoc["verdicts"] = vj;
    if (!extra.is_null())
        for (auto& [k, v] : extra.items()) verdictsDoc[k] = v;
    {
        std::ofstream f(dir / "verdicts.json", std::ios::binary);
        f << verdictsDoc.dump(2) << "\n";
    }

    ordered_json manifest;
    manifest["tool"] = "subfrac";
    manifest["version"] = kToolVersion;
    ordered_json cj;
    cj["experiment"] = cfg.experiment;
    cj["group"] = cfg.group;
    cj["gauge"] = cfg.gauge;
    cj["orlicz"] = cfg.orlicz;
    cj["field"] = cfg.field;
    cj["quad"] = {{"method", cfg.quad.method == QuadratureSpec::Method::qmc ? "qmc" : "grid"},
                  {"samples", cfg.quad.samples},
                  {"seed", cfg.quad.seed},
                  {"annuli", cfg.quad.annuli},
                  {"r_min", cfg.quad.r_min}};
    cj["s_grid"] = cfg.effectiveGrid();
    cj["output_dir"] = cfg.outputDir;
    manifest["config"] = cj;
    manifest["constants"] = {{"c_b", gc->cb},
                             {"c_b_stderr", gc->cbErr},
                             {"c_b_seed", gc->seed},
                             {"c_b_samples", gc->cbSamples},
                             {"q", gc->q},
                             {"q_c_b", gc->qcb}};
    manifest["stage_wallclock_ms"] = clock.stages;
    manifest["verdict_summary"] = {
        {"pass", pass}, {"fail", fail}, {"inconclusive", inconclusive}};
    {
        std::ofstream f(dir / "manifest.json", std::ios::binary);
        f << manifest.dump(2) << "\n";
    }

    for (const auto& v : verdicts)
        if (v.status == VerdictStatus::fail)
            std::cout << "FAIL " << v.name << " lhs=" << v.lhs << " rhs=" << v.rhs
                      << "\n";
    if (!verdicts.empty())
        std::cout << "verdicts: " << pass << " pass, " << inconclusive
                  << " inconclusive, " << fail << " fail -> " << cfg.outputDir << "\n";
    return fail > 0 ? 2 : 0;
}

}  // namespace subfrac
