#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "graspctl/closure.hpp"
#include "graspctl/errors.hpp"
#include "graspctl/harness.hpp"
#include "graspctl/sensor.hpp"

namespace graspctl::cli {
namespace {

using nlohmann::json;

std::vector<Contact> read_contacts(const std::string& path, int& sides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read contact file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": not valid JSON: " + e.what());
    }
    if (!doc.is_object() || !doc.contains("contacts") || !doc["contacts"].is_array())
        throw ConfigError(path + ": expected an object with a \"contacts\" array");
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (it.key() != "contacts" && it.key() != "sides") throw ConfigError(path + ": unknown key: " + it.key());
    if (doc.contains("sides")) sides = doc["sides"].get<int>();

    std::vector<Contact> cs;
    for (std::size_t i = 0; i < doc["contacts"].size(); ++i) {
        const json& c = doc["contacts"][i];
        const std::string where = path + ": contacts." + std::to_string(i);
        try {
            for (auto it = c.begin(); it != c.end(); ++it) {
                const std::string& k = it.key();
                if (k != "position" && k != "normal" && k != "rotation" && k != "mu" && k != "mu_tau")
                    throw ConfigError(where + ": unknown key: " + k);
            }
            Contact ct;
            const auto p = c.at("position").get<std::array<double, 3>>();
            ct.position = {p[0], p[1], p[2]};
            if (c.contains("rotation") == c.contains("normal"))
                throw ConfigError(where + ": give exactly one of \"normal\" or \"rotation\"");
            if (c.contains("normal")) {
                const auto n = c.at("normal").get<std::array<double, 3>>();
                ct.rotation = Rotation3::from_normal({n[0], n[1], n[2]});
            } else {
                const auto rows = c.at("rotation").get<std::array<std::array<double, 3>, 3>>();
                Mat3 m;
                for (int r = 0; r < 3; ++r)
                    for (int k = 0; k < 3; ++k) m(r, k) = rows[r][k];
                ct.rotation = Rotation3(m);
            }
            ct.mu = c.value("mu", ct.mu);
            ct.mu_tau = c.value("mu_tau", ct.mu_tau);
            if (!(std::isfinite(ct.mu) && ct.mu >= 0.0 && std::isfinite(ct.mu_tau) && ct.mu_tau >= 0.0))
                throw ConfigError(where + ": mu and mu_tau must be finite and >= 0");
            cs.push_back(ct);
        } catch (const json::exception& e) {
            throw ConfigError(where + ": " + e.what());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(where + ": " + e.what());
        }
    }
    if (cs.empty()) throw ConfigError(path + ": contact list is empty");
    return cs;
}

void print_trial(std::ostream& out, const TrialResult& r) {
    out << std::setprecision(6) << "trial " << r.name << "\n"
        << "  displacement (truth)  " << 1e3 * r.displacement_truth << " mm\n"
        << "  displacement (proxy)  " << 1e3 * r.displacement_proxy << " mm\n"
        << "  max total force       " << r.max_total_force << " N\n"
        << "  holding since         " << r.holding_time << " s\n"
        << "  settle time           " << r.settle_time << " s\n"
        << "  overshoot             " << r.overshoot << " N\n"
        << "  final drift rate      " << 1e3 * r.final_drift_rate << " mm/s\n"
        << "  finished at goal      " << (r.finished ? "yes" : "no") << "\n";
}

std::string trial_summary_json(const TrialResult& r) {
    json j = {{"name", r.name},
              {"displacement_truth", r.displacement_truth},
              {"displacement_proxy", r.displacement_proxy},
              {"max_total_force", r.max_total_force},
              {"holding_time", r.holding_time},
              {"settle_time", r.settle_time},
              {"overshoot", r.overshoot},
              {"final_drift_rate", r.final_drift_rate},
              {"finished", r.finished},
              {"fault", r.fault},
              {"fault_message", r.fault_message}};
    return j.dump(2) + "\n";
}

int cmd_calibrate(std::ostream& out, std::uint64_t seed, int samples, double sigma) {
    const SensorConfig defaults;
    out << std::setprecision(6);
    for (int i = 0; i < 2; ++i) {
        Sensor s({defaults.gamma[i], defaults.bias[i], sigma, seed * 2 + static_cast<std::uint64_t>(i)});
        const double b = s.estimate_bias(samples);
        // Reference loads against the raw offset; least-squares gain through the origin.
        double num = 0.0, den = 0.0;
        for (double f : {0.5, 1.0, 2.0, 5.0}) {
            for (int k = 0; k < 100; ++k) {
                const double r = s.sample_raw(f) - b;
                num += f * r;
                den += r * r;
            }
        }
        const double gamma = num / den;
        s.set_calibration(gamma, b);
        double max_abs = 0.0;
        for (int k = 0; k < samples; ++k) max_abs = std::max(max_abs, std::abs(s.read(0.0, 0.0).calibrated));
        out << "finger " << i + 1 << ": bias " << b << " (true " << defaults.bias[i] << "), gamma " << gamma << " N/unit (true "
            << defaults.gamma[i] << "), unloaded max |f| " << max_abs << " N, suggested threshold " << 2.0 * max_abs << " N\n";
    }
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Tactile three-phase grasp controller: simulation, experiments and force-closure analysis"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir = ".", contacts_path;
    std::vector<std::string> overrides;
    std::uint64_t seed = 1;
    bool seed_given = false;
    int threads = 0, verbosity = 0, sides = kDefaultConeSides, samples = kBiasSamples;
    double sigma = kDefaultNoiseSigma;

    auto* run_cmd = app.add_subcommand("run", "Simulate one scenario file; writes <name>.csv and <name>_result.json");
    run_cmd->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    run_cmd->add_option("-o,--out", out_dir, "Output directory")->capture_default_str();
    run_cmd->add_option("--set", overrides, "Override a scenario value, e.g. controller.f_goal=2.5 (repeatable)");
    run_cmd->add_option("--seed", seed, "Sensor noise seed (replaces the file's seed)")->each([&](const std::string&) { seed_given = true; });
    run_cmd->add_flag("-v,--verbose", verbosity, "Print the resolved scenario");

    auto* exp_a = app.add_subcommand("exp-a", "Displacement experiment: 3 objects x 5 offsets x 3 repetitions x 2 controllers");
    exp_a->add_option("-o,--out", out_dir, "Output directory")->capture_default_str();
    exp_a->add_option("--set", overrides, "Override applied to every trial scenario (repeatable)");
    exp_a->add_option("--seed", seed, "Base seed")->capture_default_str();
    exp_a->add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();

    auto* exp_b = app.add_subcommand("exp-b", "Ablation experiment: push and wrist-rotation scenarios x 4 variants");
    exp_b->add_option("-o,--out", out_dir, "Output directory")->capture_default_str();
    exp_b->add_option("--set", overrides, "Override applied to every scenario (repeatable)");
    exp_b->add_option("--seed", seed, "Sensor noise seed")->capture_default_str();
    exp_b->add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();

    auto* closure_cmd = app.add_subcommand("closure", "Force-closure test for a contact list; exit 0 if closure, 3 if not");
    closure_cmd->add_option("contacts", contacts_path, "Contact JSON file")->required();
    closure_cmd->add_option("--sides", sides, "Friction-cone polygon sides (overrides the file)");

    auto* cal = app.add_subcommand("calibrate", "Simulated bias and gain calibration of both load cells");
    cal->add_option("--seed", seed, "Noise seed")->capture_default_str();
    cal->add_option("--samples", samples, "Unloaded samples for the bias estimate")->capture_default_str();
    cal->add_option("--noise-sigma", sigma, "Raw noise standard deviation")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*run_cmd) {
            ScenarioSpec spec = load_scenario_file(scenario_path, overrides);
            if (seed_given) spec.seed = seed;
            if (verbosity > 0) out << to_json_text(spec);
            const TrialResult r = run_trial(spec);
            std::filesystem::create_directories(out_dir);
            const std::string csv = out_dir + "/" + spec.name + ".csv";
            write_csv(csv, r.series);
            std::ofstream(out_dir + "/" + spec.name + "_result.json") << trial_summary_json(r);
            print_trial(out, r);
            out << "  series                " << csv << "\n";
            if (r.fault) {
                err << "runtime fault: " << r.fault_message << "\n";
                return kRuntimeFault;
            }
            return kOk;
        }
        if (*exp_a) {
            ExperimentAConfig cfg;
            cfg.seed = seed;
            cfg.overrides = overrides;
            cfg.threads = threads;
            const ExperimentAResult r = run_experiment_a(cfg);
            write_experiment_a(r, out_dir);
            out << format_table(r) << r.trials.size() << " trials in " << std::setprecision(3) << r.wall_seconds << " s, written to "
                << out_dir << "\n";
            for (const auto& t : r.trials) {
                if (t.result.fault) {
                    err << "runtime fault in " << t.object << " trial: " << t.result.fault_message << "\n";
                    return kRuntimeFault;
                }
            }
            return kOk;
        }
        if (*exp_b) {
            ExperimentBConfig cfg;
            cfg.seed = seed;
            cfg.overrides = overrides;
            cfg.threads = threads;
            const ExperimentBResult r = run_experiment_b(cfg);
            write_experiment_b(r, out_dir);
            out << format_experiment_b(r) << r.runs.size() << " runs written to " << out_dir << "\n";
            for (const auto& run : r.runs) {
                if (run.result.fault) {
                    err << "runtime fault in " << run.spec.name << ": " << run.result.fault_message << "\n";
                    return kRuntimeFault;
                }
            }
            return kOk;
        }
        if (*closure_cmd) {
            int file_sides = kDefaultConeSides;
            const auto contacts = read_contacts(contacts_path, file_sides);
            const int use_sides = closure_cmd->count("--sides") ? sides : file_sides;
            if (use_sides < 3) throw ConfigError("sides must be >= 3");
            const ClosureReport rep = is_force_closure(contacts, use_sides);
            out << std::setprecision(6) << "contacts: " << contacts.size() << "\n"
                << "surjective: " << (rep.surjective ? "yes" : "no") << " (sigma_min/sigma_max = "
                << (rep.singular_values[0] > 0 ? rep.singular_values[5] / rep.singular_values[0] : 0.0) << ")\n"
                << "strict internal forces: " << (rep.has_strict_internal ? "yes" : "no") << "\n"
                << "margin: " << rep.margin << " N\n"
                << "force-closure: " << (rep.is_force_closure ? "yes" : "no") << "\n";
            return rep.is_force_closure ? kOk : kNoClosure;
        }
        if (*cal) {
            if (samples < 1) throw ConfigError("--samples must be >= 1");
            if (!(sigma >= 0.0)) throw ConfigError("--noise-sigma must be >= 0");
            return cmd_calibrate(out, seed, samples, sigma);
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        err << "runtime fault: " << e.what() << "\n";
        return kRuntimeFault;
    }
    return kConfigError;
}

}  // namespace graspctl::cli
