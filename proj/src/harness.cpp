#include "anchor/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace anchor {

namespace fs = std::filesystem;

std::vector<ScenarioEntry> discover_scenarios(const std::string& path) {
    std::vector<std::string> files;
    if (fs::is_directory(path)) {
        for (const auto& e : fs::recursive_directory_iterator(path)) {
            if (e.is_regular_file() && e.path().extension() == ".scn") {
                files.push_back(e.path().string());
            }
        }
        std::sort(files.begin(), files.end());
    } else if (fs::is_regular_file(path)) {
        files.push_back(path);
    } else {
        throw std::runtime_error("no such scenario file or directory: " + path);
    }
    std::vector<ScenarioEntry> out;
    for (const std::string& f : files) {
        out.push_back({f, load_scenario(f)});
    }
    return out;
}

void CellStats::add(const TrialTrace& t) {
    ++trials;
    successes += t.success ? 1 : 0;
    for (const auto& [a, s] : t.stages) {
        stages[a].attempts += s.attempts;
        stages[a].successes += s.successes;
    }
    for (const AnomalyEvent& e : t.events) {
        if (e.layer == Layer::L1) {
            ++l1_detected;
            l1_recovered += e.recovered ? 1 : 0;
        } else {
            ++l2_detected;
            l2_recovered += e.recovered ? 1 : 0;
        }
    }
    total_steps += t.steps;
}

void CellStats::merge(const CellStats& o) {
    trials += o.trials;
    successes += o.successes;
    for (const auto& [a, s] : o.stages) {
        stages[a].attempts += s.attempts;
        stages[a].successes += s.successes;
    }
    l1_detected += o.l1_detected;
    l1_recovered += o.l1_recovered;
    l2_detected += o.l2_detected;
    l2_recovered += o.l2_recovered;
    total_steps += o.total_steps;
    wall_seconds += o.wall_seconds;
}

bool BatchReport::any_cell_failed() const {
    return std::any_of(cells.begin(), cells.end(), [](const CellStats& c) { return !c.error.empty(); });
}

BatchReport run_batch(const BatchConfig& cfg) {
    if (cfg.trials < 1) {
        throw std::invalid_argument("trials must be >= 1");
    }
    if (!cfg.trace_dir.empty()) {
        fs::create_directories(cfg.trace_dir);
    }
    BatchReport report;
    for (int level : cfg.levels) {
        std::vector<const ScenarioEntry*> pool;
        for (const ScenarioEntry& e : cfg.scenarios) {
            if (e.scenario.level == level) {
                pool.push_back(&e);
            }
        }
        for (Ablation ab : cfg.ablations) {
            CellStats cell;
            cell.level = level;
            cell.ablation = ab;
            if (pool.empty()) {
                cell.error = "no scenarios for level " + std::to_string(level);
                report.cells.push_back(cell);
                continue;
            }
            const auto start = std::chrono::steady_clock::now();
            std::vector<TrialTrace> traces(static_cast<std::size_t>(cfg.trials));
            std::vector<std::string> errors(traces.size());
            auto run_one = [&](std::size_t i) {
                TrialConfig tc;
                tc.scenario = pool[i % pool.size()]->scenario;
                tc.seed = RngSeed{cfg.base_seed + i};
                tc.ablation = ab;
                tc.sim = cfg.sim;
                tc.recovery = cfg.recovery;
                try {
                    traces[i] = run_trial(tc, cfg.shell);
                } catch (const std::exception& e) {
                    errors[i] = pool[i % pool.size()]->path + ": " + e.what();
                }
            };
            unsigned n = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
            n = std::min<unsigned>(n, static_cast<unsigned>(traces.size()));
            std::vector<std::thread> workers;
            for (unsigned w = 0; w < n; ++w) {
                workers.emplace_back([&, w] {
                    for (std::size_t i = w; i < traces.size(); i += n) {
                        run_one(i);
                    }
                });
            }
            for (std::thread& t : workers) {
                t.join();
            }
            for (std::size_t i = 0; i < traces.size(); ++i) {
                if (!errors[i].empty()) {
                    cell.error = errors[i];
                    break;
                }
                cell.add(traces[i]);
                if (!cfg.trace_dir.empty()) {
                    char name[96];
                    std::snprintf(name, sizeof(name), "L%d_%s_%04zu.trace", level, ablation_name(ab), i);
                    std::ofstream out(fs::path(cfg.trace_dir) / name);
                    if (!out) {
                        throw std::runtime_error("cannot write trace in " + cfg.trace_dir);
                    }
                    out << traces[i].text;
                }
            }
            if (!cell.error.empty()) {
                CellStats failed;
                failed.level = level;
                failed.ablation = ab;
                failed.error = cell.error;
                cell = failed;
            }
            cell.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            report.cells.push_back(cell);
        }
    }
    return report;
}

namespace {

constexpr ActionName kStages[] = {ActionName::ObjFind, ActionName::Align, ActionName::Grasp, ActionName::Place};
const char* const kDash = "\xe2\x80\x94";

std::string ratio(int num, int den) { return den > 0 ? format_double(static_cast<double>(num) / den) : kDash; }

std::string percent(int num, int den) {
    if (den <= 0) {
        return kDash;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f%%", 100.0 * num / den);
    return buf;
}

std::string fixed(double v, int digits) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

// Pads by displayed characters; the dash is one column but three bytes.
std::string pad(const std::string& s, std::size_t width) {
    std::size_t cols = 0;
    for (unsigned char c : s) {
        cols += (c & 0xC0) != 0x80 ? 1 : 0;
    }
    return s + std::string(width > cols ? width - cols : 1, ' ');
}

}  // namespace

void write_csv(std::ostream& out, const BatchReport& report) {
    out << "level,ablation,trials,successes,sr";
    for (ActionName a : kStages) {
        out << ',' << action_name(a) << "_attempts," << action_name(a) << "_successes";
    }
    out << ",l1_detected,l1_recovered,l2_detected,l2_recovered,rr,mean_steps,error\n";
    for (const CellStats& c : report.cells) {
        out << c.level << ',' << ablation_name(c.ablation) << ',' << c.trials << ',' << c.successes << ','
            << ratio(c.successes, c.trials);
        for (ActionName a : kStages) {
            auto it = c.stages.find(a);
            const StageStats s = it == c.stages.end() ? StageStats{} : it->second;
            out << ',' << s.attempts << ',' << s.successes;
        }
        out << ',' << c.l1_detected << ',' << c.l1_recovered << ',' << c.l2_detected << ',' << c.l2_recovered << ','
            << ratio(c.recovered(), c.detected()) << ','
            << (c.trials > 0 ? format_double(static_cast<double>(c.total_steps) / c.trials) : kDash) << ','
            << (c.error.empty() ? "" : "\"" + c.error + "\"") << '\n';
    }
}

void write_table(std::ostream& out, const BatchReport& report) {
    std::vector<Ablation> abls;
    std::vector<int> levels;
    for (const CellStats& c : report.cells) {
        if (std::find(abls.begin(), abls.end(), c.ablation) == abls.end()) {
            abls.push_back(c.ablation);
        }
        if (std::find(levels.begin(), levels.end(), c.level) == levels.end()) {
            levels.push_back(c.level);
        }
    }
    std::sort(levels.begin(), levels.end());
    auto overall = [&](Ablation a) {
        CellStats all;
        all.ablation = a;
        for (const CellStats& c : report.cells) {
            if (c.ablation == a) {
                all.merge(c);
            }
        }
        return all;
    };
    auto cell = [&](int level, Ablation a) -> const CellStats* {
        for (const CellStats& c : report.cells) {
            if (c.level == level && c.ablation == a) {
                return &c;
            }
        }
        return nullptr;
    };

    out << "Success rate by level\n";
    out << pad("ablation", 14);
    for (int l : levels) {
        out << pad("Level " + std::to_string(l), 10);
    }
    out << "Overall\n";
    for (Ablation a : abls) {
        out << pad(ablation_name(a), 14);
        for (int l : levels) {
            const CellStats* c = cell(l, a);
            out << pad(c && c->error.empty() ? percent(c->successes, c->trials) : "error", 10);
        }
        const CellStats all = overall(a);
        out << percent(all.successes, all.trials) << '\n';
    }

    out << "\nOverall SR / RR / Steps / Time\n";
    out << pad("ablation", 14) << pad("SR", 8) << pad("RR", 8) << pad("Steps", 8) << "Time (s)\n";
    for (Ablation a : abls) {
        const CellStats all = overall(a);
        out << pad(ablation_name(a), 14) << pad(percent(all.successes, all.trials), 8)
            << pad(percent(all.recovered(), all.detected()), 8)
            << pad(all.trials ? fixed(static_cast<double>(all.total_steps) / all.trials, 1) : kDash, 8)
            << fixed(all.wall_seconds, 2) << '\n';
    }

    out << "\nStage success rate (SSR)\n";
    out << pad("ablation", 14);
    for (ActionName s : kStages) {
        out << pad(action_name(s), 10);
    }
    out << '\n';
    for (Ablation a : abls) {
        const CellStats all = overall(a);
        out << pad(ablation_name(a), 14);
        for (ActionName s : kStages) {
            auto it = all.stages.find(s);
            out << pad(it == all.stages.end() ? kDash : percent(it->second.successes, it->second.attempts), 10);
        }
        out << '\n';
    }

    out << "\nRecovery (recovered/detected)\n";
    out << pad("ablation", 14) << pad("L1", 10) << pad("L2", 10) << "Total\n";
    for (Ablation a : abls) {
        const CellStats all = overall(a);
        out << pad(ablation_name(a), 14)
            << pad(std::to_string(all.l1_recovered) + "/" + std::to_string(all.l1_detected), 10)
            << pad(std::to_string(all.l2_recovered) + "/" + std::to_string(all.l2_detected), 10)
            << std::to_string(all.recovered()) + "/" + std::to_string(all.detected()) << '\n';
    }
}

}  // namespace anchor
