// virial-lab: runs one experiment per invocation from a JSON config and
// emits a machine-readable report.
//
//   virial-lab classical-virial --config run.json --set integrator.step=5e-4
//   virial-lab ktrig-check --format pretty
//
// Exit codes: 0 all tolerance checks passed, 1 a check failed, 2 bad
// config, 3 convergence failure, 4 domain error.
#include "vlab/errors.hpp"
#include "vlab/report.hpp"
#include "vlab/runner.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

struct Options {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string format = "json";
    std::string out_path;
    bool quiet = false;
};

int run_experiment(const std::string& name, const Options& opt) {
    using vlab::Json;
    Json cfg = Json::object();
    if (!opt.config_path.empty()) {
        std::ifstream in(opt.config_path);
        if (!in)
            throw vlab::ConfigError("cannot open config file " + opt.config_path);
        try {
            in >> cfg;
        } catch (const std::exception& e) {
            throw vlab::ConfigError(std::string("config is not valid JSON: ") +
                                    e.what());
        }
    }
    if (cfg.contains("experiment")) {
        if (cfg["experiment"] != name)
            throw vlab::ConfigError("config experiment \"" +
                                    cfg["experiment"].get<std::string>() +
                                    "\" does not match subcommand \"" + name +
                                    "\"");
    } else {
        cfg["experiment"] = name;
    }
    for (const auto& assignment : opt.overrides)
        vlab::apply_override(cfg, assignment);

    const auto parsed = vlab::parse_config(cfg);
    const vlab::RunReport report = vlab::run(parsed);

    std::string out_path = opt.out_path;
    std::string format = opt.format;
    if (cfg.contains("output")) {
        if (out_path.empty() && cfg["output"].contains("path"))
            out_path = cfg["output"]["path"].get<std::string>();
        if (format == "json" && cfg["output"].contains("format"))
            format = cfg["output"]["format"].get<std::string>();
    }
    const std::string text = vlab::emit(report, vlab::parse_format(format));
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out)
            throw vlab::Error("cannot write report to " + out_path);
        out << text;
        if (!opt.quiet)
            std::cerr << "report written to " << out_path << "\n";
    } else if (!opt.quiet) {
        std::cout << text;
    }
    if (!report.pass && !opt.quiet)
        for (const auto& f : report.failures)
            std::cerr << "FAIL: " << f << "\n";
    return report.pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"virial-lab: virial and hypervirial identity checks"};
    app.require_subcommand(1);

    Options opt;
    std::string chosen;
    for (const auto& name : vlab::experiment_names()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", opt.config_path, "JSON config file");
        sub->add_option("--set", opt.overrides,
                        "override a config key (key.path=value), repeatable");
        sub->add_option("--format", opt.format, "json|csv|pretty");
        sub->add_option("--out", opt.out_path, "write the report to a file");
        sub->add_flag("--quiet", opt.quiet, "suppress stdout");
        sub->callback([&chosen, name] { chosen = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        return run_experiment(chosen, opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return vlab::exit_code_for(e);
    }
}
