#include "graspctl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "graspctl/closure.hpp"
#include "graspctl/errors.hpp"

namespace graspctl {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::vector<Contact> probe_contacts(const ScenarioSpec& spec, const std::array<bool, 2>& touching) {
    std::vector<Contact> cs;
    const double hw = 0.5 * spec.object.width;
    if (touching[0]) cs.push_back({{-hw, 0.0, 0.0}, Rotation3::from_normal({1.0, 0.0, 0.0}), spec.closure.mu, spec.closure.mu_tau});
    if (touching[1]) cs.push_back({{hw, 0.0, 0.0}, Rotation3::from_normal({-1.0, 0.0, 0.0}), spec.closure.mu, spec.closure.mu_tau});
    return cs;
}

template <class Fn>
void parallel_for(int n, int threads, Fn&& fn) {
    if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min(threads, n);
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
    auto worker = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::string fmt9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
    out.close();
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

double displacement_proxy(double q1_end, double q2_end, double offset) { return std::abs(offset - object_position(q1_end, q2_end)); }

TrialResult run_trial(const ScenarioSpec& spec_in) {
    spec_in.validate();
    ScenarioSpec spec = spec_in;
    spec.object.initial_offset = spec.offset;
    const ControllerConfig cfg = spec.effective_control();
    const double dt = cfg.dt();
    const double q0 = 0.5 * spec.start_aperture;

    Plant plant(spec.object, spec.disturbances, spec.plant, q0, q0);

    std::array<Sensor, 2> sensors{
        Sensor({spec.sensor.gamma[0] * (1.0 + spec.sensor.miscalibration[0]), spec.sensor.bias[0], spec.sensor.noise_sigma,
                splitmix64(spec.seed * 2 + 0)}),
        Sensor({spec.sensor.gamma[1] * (1.0 + spec.sensor.miscalibration[1]), spec.sensor.bias[1], spec.sensor.noise_sigma,
                splitmix64(spec.seed * 2 + 1)})};
    for (int i = 0; i < 2; ++i) sensors[i].set_calibration(spec.sensor.gamma[i], sensors[i].estimate_bias(spec.sensor.bias_samples));

    const bool force = spec.controller == ControllerKind::Force;
    GraspController ctl(cfg, q0, q0);
    const double jtc_end = spec.object.width - spec.jtc_penetration;
    const double jtc_time = (spec.start_aperture - jtc_end) / cfg.closing_speed;
    const TrajectoryController jtc(spec.start_aperture, jtc_end, std::max(jtc_time, dt));
    const double duration = force ? spec.duration : std::min(spec.duration, jtc_time + spec.jtc_dwell);

    const ClosureProbe probe = [&] {
        const auto cs = probe_contacts(spec, ctl.state().frozen);
        return !cs.empty() && is_force_closure(cs, spec.closure.sides).is_force_closure;
    };

    TrialResult r;
    r.name = spec.name;
    const long steps = std::lround(duration / dt);
    r.series.reserve(static_cast<std::size_t>(steps + 1));
    const double x_start = plant.state().x_obj;

    for (long k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        const PlantState& ps = plant.state();
        const double f1 = sensors[0].read(ps.load1, t).calibrated;
        const double f2 = sensors[1].read(ps.load2, t).calibrated;

        TimeSeriesRow row;
        row.t = t;
        row.q1 = ps.q1;
        row.q2 = ps.q2;
        row.f1 = f1;
        row.f2 = f2;
        row.x_obj = ps.x_obj;
        row.true_f1 = ps.true_f1;
        row.true_f2 = ps.true_f2;
        row.push1 = ps.push1;
        row.push2 = ps.push2;
        row.wrist_angle = ps.wrist_angle;

        ControlCommand cmd;
        if (force) {
            const Phase before = ctl.state().phase;
            cmd = ctl.tick({f1, f2, ps.q1, ps.q2, ps.g_dot_n(spec.plant.gravity)}, probe);
            const ControllerState& cs = ctl.state();
            row.phase = cs.phase;
            row.f_int = cs.f_int;
            row.f_ext = cs.f_ext;
            row.u_int = cs.phase == Phase::Holding && before == Phase::Holding ? cs.u_int : 0.0;
            row.u_ext = cs.phase == Phase::Holding && before == Phase::Holding ? cs.u_ext : 0.0;
            if (cs.phase == Phase::Holding && r.holding_time < 0.0) r.holding_time = t;
        } else {
            cmd = jtc.tick(ps.q1, ps.q2, t);
            row.phase = t < jtc_time ? Phase::Closing : Phase::Holding;
            row.f_int = f1 + f2;
            row.f_ext = compute_external_force(f1, f2, cfg.mass, ps.g_dot_n(spec.plant.gravity), cfg.gravity_comp_enabled);
        }
        r.series.push_back(row);

        if (force && ctl.state().fault) {
            r.fault = true;
            r.fault_message = "t=" + fmt9(t) + " s: " + ctl.state().fault_message;
            break;
        }
        if (force && ctl.state().finished) {
            r.finished = true;
            break;
        }
        if (k == steps) break;
        plant.advance(cmd, dt);
        const PlantState& after = plant.state();
        if (!std::isfinite(after.x_obj) || !std::isfinite(after.q1) || !std::isfinite(after.q2) ||
            !std::isfinite(after.true_f1) || !std::isfinite(after.true_f2)) {
            r.fault = true;
            r.fault_message = "t=" + fmt9(t + dt) + " s: plant state became non-finite";
            break;
        }
    }

    const TimeSeriesRow& last = r.series.back();
    r.displacement_truth = std::abs(last.x_obj - x_start);
    r.displacement_proxy = displacement_proxy(last.q1, last.q2, spec.offset);
    r.overshoot = -cfg.f_goal;
    bool any_hold = false;
    for (const TimeSeriesRow& row : r.series) {
        const bool hold = row.phase == Phase::Holding;
        if (!hold && force) continue;
        any_hold = any_hold || hold;
        r.max_total_force = std::max(r.max_total_force, row.true_f1 + row.true_f2);
        if (force) {
            r.overshoot = std::max(r.overshoot, row.f_int - cfg.f_goal);
            if (r.settle_time < 0.0 && std::abs(row.f_int - cfg.f_goal) <= 0.05 * cfg.f_goal) r.settle_time = row.t - r.holding_time;
        }
    }
    if (!force || !any_hold) r.overshoot = 0.0;
    const double t_ref = std::max(0.0, last.t - 1.0);
    const auto ref = std::lower_bound(r.series.begin(), r.series.end(), t_ref - 1e-9,
                                      [](const TimeSeriesRow& row, double tt) { return row.t < tt; });
    if (last.t > ref->t) r.final_drift_rate = std::abs(last.x_obj - ref->x_obj) / (last.t - ref->t);
    return r;
}

double max_object_excursion(const std::vector<TimeSeriesRow>& s, double t0, double t1) {
    double x0 = 0.0, best = 0.0;
    bool have = false;
    for (const auto& row : s) {
        if (row.t < t0 - 1e-9 || row.t > t1 + 1e-9) continue;
        if (!have) {
            x0 = row.x_obj;
            have = true;
        }
        best = std::max(best, std::abs(row.x_obj - x0));
    }
    return best;
}

double max_true_total_force(const std::vector<TimeSeriesRow>& s, double t0, double t1) {
    double best = 0.0;
    for (const auto& row : s)
        if (row.t >= t0 - 1e-9 && row.t <= t1 + 1e-9) best = std::max(best, row.true_f1 + row.true_f2);
    return best;
}

double sustained_drift_duration(const std::vector<TimeSeriesRow>& s, double t0, double t1, double rate, double window) {
    if (s.size() < 2) return 0.0;
    const double dt = s[1].t - s[0].t;
    const std::size_t lag = static_cast<std::size_t>(std::max(1L, std::lround(window / dt)));
    double best = 0.0, run = 0.0;
    for (std::size_t i = 0; i + lag < s.size(); ++i) {
        if (s[i].t < t0 - 1e-9 || s[i + lag].t > t1 + 1e-9) continue;
        const double v = std::abs(s[i + lag].x_obj - s[i].x_obj) / (s[i + lag].t - s[i].t);
        run = v > rate ? run + dt : 0.0;
        best = std::max(best, run);
    }
    // A run of m windows spans the window length plus (m - 1) steps.
    return best > 0.0 ? best - dt + window : 0.0;
}

int ticks_until_still(const std::vector<TimeSeriesRow>& s, double t0, double t1, double rate, double window) {
    if (s.size() < 2) return 0;
    const double dt = s[1].t - s[0].t;
    const std::size_t lag = static_cast<std::size_t>(std::max(1L, std::lround(window / dt)));
    int count = 0;
    for (std::size_t i = 0; i + lag < s.size(); ++i) {
        if (s[i].t < t0 - 1e-9) continue;
        if (s[i + lag].t > t1 + 1e-9) break;
        const double shift = object_position(s[i + lag].q1, s[i + lag].q2) - object_position(s[i].q1, s[i].q2);
        if (std::abs(shift) / (s[i + lag].t - s[i].t) <= rate) return count;
        ++count;
    }
    return count;
}

Phase parse_phase(const std::string& name) {
    for (Phase p : {Phase::Closing, Phase::EstablishContact, Phase::Holding})
        if (name == phase_name(p)) return p;
    throw std::invalid_argument("unknown phase name: " + name);
}

std::string format_csv(const std::vector<TimeSeriesRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("time series is empty");
    std::string out = std::string(kCsvHeader) + "\n";
    for (const auto& r : rows) {
        out += fmt9(r.t) + ',' + fmt9(r.q1) + ',' + fmt9(r.q2) + ',' + fmt9(r.f1) + ',' + fmt9(r.f2) + ',' + fmt9(r.f_int) + ',' +
               fmt9(r.f_ext) + ',' + fmt9(r.x_obj) + ',' + phase_name(r.phase) + ',' + fmt9(r.u_int) + ',' + fmt9(r.u_ext) + '\n';
    }
    return out;
}

void write_csv(const std::string& path, const std::vector<TimeSeriesRow>& rows) { write_text(path, format_csv(rows)); }

std::vector<TimeSeriesRow> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw std::runtime_error("unexpected CSV header in " + path);
    std::vector<TimeSeriesRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell[11];
        for (auto& c : cell)
            if (!std::getline(ss, c, ',')) throw std::runtime_error("short CSV row in " + path);
        TimeSeriesRow r;
        double* num[] = {&r.t, &r.q1, &r.q2, &r.f1, &r.f2, &r.f_int, &r.f_ext, &r.x_obj};
        for (int i = 0; i < 8; ++i) *num[i] = std::stod(cell[i]);
        r.phase = parse_phase(cell[8]);
        r.u_int = std::stod(cell[9]);
        r.u_ext = std::stod(cell[10]);
        rows.push_back(r);
    }
    return rows;
}

// --- experiment A ---

const SummaryRow& ExperimentAResult::row(const std::string& object, ControllerKind c) const {
    for (const auto& r : summary)
        if (r.object == object && r.controller == c) return r;
    throw std::out_of_range("no summary row for " + object);
}

ExperimentAResult run_experiment_a(const ExperimentAConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentAResult res;
    for (const auto& obj : config.objects)
        for (ControllerKind c : {ControllerKind::Force, ControllerKind::Trajectory})
            for (double off : config.offsets)
                for (int rep = 0; rep < config.repetitions; ++rep)
                    res.trials.push_back({obj.name, c, off, rep, splitmix64(config.seed * 1000003ULL + static_cast<std::uint64_t>(rep)), {}});

    // Build every scenario first so configuration errors surface before any simulation.
    std::vector<ScenarioSpec> specs;
    specs.reserve(res.trials.size());
    for (const auto& tr : res.trials) {
        const ObjectSpec* obj = nullptr;
        for (const auto& o : config.objects)
            if (o.name == tr.object) obj = &o;
        ScenarioSpec s = apply_overrides(experiment_a_scenario(*obj, tr.offset, tr.controller), config.overrides);
        s.offset = tr.offset;
        s.controller = tr.controller;
        s.seed = tr.seed;
        s.name = tr.object + "_" + controller_name(tr.controller);
        s.validate();
        specs.push_back(s);
    }

    parallel_for(static_cast<int>(specs.size()), config.threads, [&](int i) {
        TrialResult r = run_trial(specs[static_cast<std::size_t>(i)]);
        r.series.clear();
        r.series.shrink_to_fit();
        res.trials[static_cast<std::size_t>(i)].result = std::move(r);
    });

    for (const auto& obj : config.objects) {
        for (ControllerKind c : {ControllerKind::Force, ControllerKind::Trajectory}) {
            SummaryRow row{obj.name, c};
            std::vector<double> truth, proxy;
            for (const auto& tr : res.trials) {
                if (tr.object != obj.name || tr.controller != c) continue;
                truth.push_back(tr.result.displacement_truth);
                proxy.push_back(tr.result.displacement_proxy);
            }
            auto stats = [](const std::vector<double>& v, double& mean, double& sd) {
                mean = sd = 0.0;
                if (v.empty()) return;
                for (double x : v) mean += x;
                mean /= static_cast<double>(v.size());
                if (v.size() > 1) {
                    for (double x : v) sd += (x - mean) * (x - mean);
                    sd = std::sqrt(sd / static_cast<double>(v.size() - 1));
                }
            };
            row.n = static_cast<int>(truth.size());
            stats(truth, row.mean_truth, row.std_truth);
            stats(proxy, row.mean_proxy, row.std_proxy);
            res.summary.push_back(row);
            for (double off : config.offsets) {
                OffsetRow o{obj.name, c, off};
                int n = 0;
                for (const auto& tr : res.trials) {
                    if (tr.object != obj.name || tr.controller != c || tr.offset != off) continue;
                    o.mean_truth += tr.result.displacement_truth;
                    o.mean_proxy += tr.result.displacement_proxy;
                    ++n;
                }
                if (n > 0) {
                    o.mean_truth /= n;
                    o.mean_proxy /= n;
                }
                res.per_offset.push_back(o);
            }
        }
    }
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

std::string format_table(const ExperimentAResult& r) {
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-12s | %-22s | %-22s\n", "object", "trajectory (mm)", "force (mm)");
    os << buf << std::string(62, '-') << '\n';
    std::vector<std::string> names;
    for (const auto& s : r.summary)
        if (std::find(names.begin(), names.end(), s.object) == names.end()) names.push_back(s.object);
    for (const auto& n : names) {
        const auto& j = r.row(n, ControllerKind::Trajectory);
        const auto& f = r.row(n, ControllerKind::Force);
        std::snprintf(buf, sizeof buf, "%-12s | %8.2f +- %-10.2f | %8.2f +- %-10.2f\n", n.c_str(), 1e3 * j.mean_truth,
                      1e3 * j.std_truth, 1e3 * f.mean_truth, 1e3 * f.std_truth);
        os << buf;
    }
    os << "(ground-truth object displacement, mean +- sample std over offsets x repetitions)\n";
    return os.str();
}

void write_experiment_a(const ExperimentAResult& r, const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::string trials = "object,controller,offset,repetition,seed,displacement_truth,displacement_proxy,max_total_force,"
                         "settle_time,overshoot,final_drift_rate,finished,fault\n";
    for (const auto& t : r.trials) {
        const TrialResult& x = t.result;
        trials += t.object + ',' + controller_name(t.controller) + ',' + fmt9(t.offset) + ',' + std::to_string(t.repetition) + ',' +
                  std::to_string(t.seed) + ',' + fmt9(x.displacement_truth) + ',' + fmt9(x.displacement_proxy) + ',' +
                  fmt9(x.max_total_force) + ',' + fmt9(x.settle_time) + ',' + fmt9(x.overshoot) + ',' + fmt9(x.final_drift_rate) +
                  ',' + (x.finished ? "1" : "0") + ',' + (x.fault ? "1" : "0") + '\n';
    }
    write_text(dir + "/trials.csv", trials);

    std::string summary = "object,controller,n,mean_truth,std_truth,mean_proxy,std_proxy\n";
    for (const auto& s : r.summary)
        summary += s.object + ',' + controller_name(s.controller) + ',' + std::to_string(s.n) + ',' + fmt9(s.mean_truth) + ',' +
                   fmt9(s.std_truth) + ',' + fmt9(s.mean_proxy) + ',' + fmt9(s.std_proxy) + '\n';
    write_text(dir + "/summary.csv", summary);

    std::string per = "object,controller,offset,mean_truth,mean_proxy\n";
    for (const auto& o : r.per_offset)
        per += o.object + ',' + controller_name(o.controller) + ',' + fmt9(o.offset) + ',' + fmt9(o.mean_truth) + ',' +
               fmt9(o.mean_proxy) + '\n';
    write_text(dir + "/per_offset.csv", per);
    write_text(dir + "/summary.txt", format_table(r));
}

// --- experiment B ---

const ExperimentBRun& ExperimentBResult::run(const std::string& scenario, Ablation a) const {
    for (const auto& r : runs)
        if (r.scenario == scenario && r.ablation == a) return r;
    throw std::out_of_range("no experiment B run " + scenario);
}

ExperimentBResult run_experiment_b(const ExperimentBConfig& config) {
    ExperimentBResult res;
    const Ablation all[] = {Ablation::None, Ablation::NoCompliance, Ablation::NoDeadband, Ablation::NoGravityComp};
    for (const char* sc : {"push", "rotation"}) {
        for (Ablation a : all) {
            ExperimentBRun run;
            run.scenario = sc;
            run.ablation = a;
            run.spec = apply_overrides(std::string(sc) == "push" ? push_scenario(a) : rotation_scenario(a), config.overrides);
            run.spec.ablation = a;
            run.spec.seed = config.seed;
            run.spec.validate();
            res.runs.push_back(std::move(run));
        }
    }
    parallel_for(static_cast<int>(res.runs.size()), config.threads, [&](int i) {
        ExperimentBRun& run = res.runs[static_cast<std::size_t>(i)];
        run.result = run_trial(run.spec);
        const auto& s = run.result.series;
        const double dt = run.spec.effective_control().dt();
        for (const Push& p : run.spec.disturbances.pushes) {
            if (p.target == PushTarget::Object) continue;
            const double tr = p.t_end + 3.0 * dt;
            const double ramp = std::min(p.ramp, 0.5 * (p.t_end - p.t_start));
            run.push_max_total_force.push_back(max_true_total_force(s, p.t_start + ramp + kPushSettle, p.t_end - ramp));
            run.push_peak_total_force.push_back(max_true_total_force(s, p.t_start, p.t_end + 1.0));
            run.post_push_drift.push_back(max_object_excursion(s, tr, tr + kPostPushWindow));
            run.post_push_sustained.push_back(sustained_drift_duration(s, p.t_end, p.t_end + kPostPushWindow, kDriftRateThreshold));
            run.stop_ticks.push_back(ticks_until_still(s, p.t_end, p.t_end + kPostPushWindow, kDriftRateThreshold));
        }
        const WristProfile& w = run.spec.disturbances.wrist;
        if (w.t_end > w.t_start) run.rotation_drift = max_object_excursion(s, w.t_start, run.spec.duration);
    });
    return res;
}

std::string format_experiment_b(const ExperimentBResult& r) {
    std::ostringstream os;
    char buf[200];
    for (const auto& run : r.runs) {
        const double f_goal = run.spec.control.f_goal;
        if (run.scenario == "push") {
            for (std::size_t i = 0; i < run.push_max_total_force.size(); ++i) {
                std::snprintf(buf, sizeof buf,
                              "push     %-16s push %zu: max(f1+f2) %.3f N settled, %.3f N peak (f_goal %.2f), post-push drift %.4f mm, "
                              "drift>0.1mm/s for %.2f s, still after %d ticks\n",
                              ablation_name(run.ablation), i + 1, run.push_max_total_force[i], run.push_peak_total_force[i], f_goal, 1e3 * run.post_push_drift[i],
                              run.post_push_sustained[i], run.stop_ticks[i]);
                os << buf;
            }
        } else {
            std::snprintf(buf, sizeof buf, "rotation %-16s object drift %.3f mm\n", ablation_name(run.ablation), 1e3 * run.rotation_drift);
            os << buf;
        }
    }
    return os.str();
}

void write_experiment_b(const ExperimentBResult& r, const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::string metrics = "scenario,variant,push,max_total_force,peak_total_force,post_push_drift,post_push_sustained,stop_ticks,rotation_drift\n";
    for (const auto& run : r.runs) {
        write_csv(dir + "/" + run.scenario + "_" + ablation_name(run.ablation) + ".csv", run.result.series);
        if (run.scenario == "push") {
            for (std::size_t i = 0; i < run.push_max_total_force.size(); ++i)
                metrics += run.scenario + ',' + ablation_name(run.ablation) + ',' + std::to_string(i + 1) + ',' +
                           fmt9(run.push_max_total_force[i]) + ',' + fmt9(run.push_peak_total_force[i]) + ',' +
                           fmt9(run.post_push_drift[i]) + ',' +
                           fmt9(run.post_push_sustained[i]) + ',' + std::to_string(run.stop_ticks[i]) + ",\n";
        } else {
            metrics += run.scenario + ',' + ablation_name(run.ablation) + ",,,,,,," + fmt9(run.rotation_drift) + '\n';
        }
    }
    write_text(dir + "/metrics.csv", metrics);
}

}  // namespace graspctl
