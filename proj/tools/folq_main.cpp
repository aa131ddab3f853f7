// SPDX-License-Identifier: MIT
//
// Command line front end: configuration validation, quantization of a
// configured symbol/function pair, and the verification registry.
//
// Exit codes across all commands:
//   0  success (valid configuration / value computed / all suites pass)
//   1  semantic failure (validation violations, rejected shapes, failing
//      suites, evaluation errors)
//   2  usage or parse errors (malformed flags, malformed configuration with
//      byte offset, unknown suite names)
//
// The JSON report goes to stdout, or to the --json path with stdout left
// empty; diagnostics go to stderr.  Reports are deterministic: identical
// configuration, seed, and flags produce byte-identical JSON.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "folq/checks.hpp"
#include "folq/config.hpp"
#include "folq/quantize.hpp"

namespace {

using nlohmann::ordered_json;

int emit(const ordered_json& report, const std::string& json_path) {
    const std::string text = report.dump(2) + "\n";
    if (json_path.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream out(json_path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write JSON report to '" << json_path << "'\n";
        return 2;
    }
    out << text;
    return 0;
}

std::string multi_index_key(const folq::MultiIndex& g) {
    std::string s;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(g[i]);
    }
    return s;
}

/// Loads the configuration; IO failures are usage errors (exit 2), reported
/// by rethrowing them as the parse-class exception.
folq::ProblemConfig load_or_usage(const std::string& path) {
    try {
        return folq::load_config(path);
    } catch (const folq::ParseError&) {
        throw;
    } catch (const folq::EvalError& e) {
        throw folq::ParseError(0, e.what());
    }
}

int cmd_validate(const std::string& config_path, const std::string& json_path) {
    const auto cfg = load_or_usage(config_path);
    const auto rep = folq::validate_adapted(cfg.connection(), 20, 1);

    ordered_json j;
    j["schema"] = 1;
    j["command"] = "validate";
    j["ok"] = rep.ok;
    j["worst"] = rep.worst;
    j["violations"] = ordered_json::array();
    for (const auto& item : rep.items)
        j["violations"].push_back({{"what", item.what}, {"magnitude", item.magnitude}});
    const int io = emit(j, json_path);
    if (io != 0) return io;
    if (!rep.ok) {
        for (const auto& item : rep.items)
            std::cerr << "violated: " << item.what << " (magnitude " << item.magnitude
                      << ")\n";
        return 1;
    }
    return 0;
}

int cmd_quantize(const std::string& config_path, const std::string& mode, int point_index,
                 bool emit_operator, const std::string& json_path) {
    const auto cfg = load_or_usage(config_path);
    if (cfg.q < 2) {
        std::cerr << "error: quantization requires transverse codimension different "
                     "from 1 (q >= 2); this configuration has q = "
                  << cfg.q << "\n";
        return 1;
    }
    if (!cfg.has_function()) {
        std::cerr << "error: the configuration declares no [function] to quantize\n";
        return 1;
    }
    if (point_index < 0 || point_index >= static_cast<int>(cfg.points.size())) {
        std::cerr << "error: --point " << point_index << " is out of range; the "
                  << "configuration lists " << cfg.points.size() << " point(s)\n";
        return 1;
    }

    const auto chart = cfg.chart();
    const auto conn = cfg.connection();
    const auto symbol = cfg.symbol();
    const auto f = cfg.function();
    const auto& m = cfg.points[point_index];

    auto quantize_one = [&](const folq::ScalarField& g) {
        return mode == "adapted" ? folq::quantize_adapted(conn, symbol, g, m)
                                 : folq::quantize_foliated(conn, symbol, g, m);
    };
    const double value = quantize_one(f);

    ordered_json j;
    j["schema"] = 1;
    j["command"] = "quantize";
    j["mode"] = mode;
    j["point_index"] = point_index;
    j["point"] = m;
    j["k"] = cfg.degree;
    j["q"] = cfg.q;
    j["value"] = value;
    if (emit_operator) {
        const auto table = folq::extract_operator(quantize_one, chart, m, cfg.degree);
        ordered_json op;
        op["k"] = table.degree;
        op["q"] = cfg.q;
        op["base"] = table.base;
        ordered_json cs;
        for (int l = 0; l <= table.degree; ++l) {
            std::ostringstream key;
            key << "C[" << table.degree << "," << l << "]";
            cs[key.str()] = folq::coeff(table.degree, l, cfg.q);
        }
        op["coefficients"] = cs;
        ordered_json entries;
        for (int d = 0; d <= table.degree; ++d) {
            const auto gs = folq::multi_indices(table.dim, d);
            for (std::size_t r = 0; r < gs.size(); ++r)
                entries[multi_index_key(gs[r])] = table.by_degree[d][r];
        }
        op["entries"] = entries;
        j["operator"] = op;
    }
    return emit(j, json_path);
}

int cmd_verify(const std::string& suite, std::uint64_t seed, const std::string& json_path) {
    std::vector<folq::CheckReport> reports;
    if (suite == "all") {
        reports = folq::run_all(seed);
    } else {
        bool known = false;
        for (const auto& s : folq::default_specs(seed))
            if (s.name == suite) {
                reports.push_back(folq::run_suite(s));
                known = true;
                break;
            }
        if (!known) {
            std::cerr << "error: unknown suite '" << suite << "'; valid names are:\n";
            for (const auto& name : folq::check_names()) std::cerr << "  " << name << "\n";
            std::cerr << "  all\n";
            return 2;
        }
    }

    bool all_pass = true;
    ordered_json j;
    j["schema"] = 1;
    j["command"] = "verify";
    j["seed"] = seed;
    j["reports"] = ordered_json::array();
    for (const auto& rep : reports) {
        all_pass = all_pass && rep.pass;
        j["reports"].push_back({{"name", rep.name},
                                {"pass", rep.pass},
                                {"worst", rep.worst},
                                {"tolerance", rep.tolerance},
                                {"worst_case", rep.worst_case}});
    }
    j["all_pass"] = all_pass;
    const int io = emit(j, json_path);
    if (io != 0) return io;
    if (!all_pass) {
        for (const auto& rep : reports)
            if (!rep.pass)
                std::cerr << "failed: " << rep.name << " worst " << rep.worst
                          << " > tolerance " << rep.tolerance << " at " << rep.worst_case
                          << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"projectively invariant quantization on foliated charts"};
    app.require_subcommand(1);

    std::string config_path, json_path;
    std::string mode = "adapted";
    std::string suite = "all";
    int point_index = 0;
    bool emit_operator = false;
    std::uint64_t seed = 20260814;

    auto* validate = app.add_subcommand("validate", "check a configuration's connection");
    validate->add_option("config", config_path, "configuration file")->required();
    validate->add_option("--json", json_path, "write the JSON report to this path");

    auto* quantize = app.add_subcommand("quantize", "evaluate the quantized operator");
    quantize->add_option("config", config_path, "configuration file")->required();
    quantize->add_option("--mode", mode, "adapted or foliated")
        ->check(CLI::IsMember({"adapted", "foliated"}));
    quantize->add_option("--point", point_index, "index into [points]");
    quantize->add_flag("--emit-operator", emit_operator,
                       "also print the operator coefficient table");
    quantize->add_option("--json", json_path, "write the JSON report to this path");

    auto* verify = app.add_subcommand("verify", "run property suites");
    verify->add_option("--suite", suite, "suite name or 'all'");
    verify->add_option("--seed", seed, "master seed for the generators");
    verify->add_option("--json", json_path, "write the JSON report to this path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (validate->parsed()) return cmd_validate(config_path, json_path);
        if (quantize->parsed())
            return cmd_quantize(config_path, mode, point_index, emit_operator, json_path);
        return cmd_verify(suite, seed, json_path);
    } catch (const folq::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const folq::EvalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const folq::AlgebraError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
