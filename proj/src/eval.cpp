#include "doorcount/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "doorcount/error.hpp"

namespace doorcount {

namespace {

template <typename Seq>
void require_sorted(const Seq& events, const char* what) {
    const bool sorted = std::is_sorted(events.begin(), events.end(), [](const auto& a, const auto& b) {
        return a.frame_index < b.frame_index;
    });
    if (!sorted) throw ValidationError(std::string(what) + " events are not sorted by frame");
}

}  // namespace

DirectionalCounts match_events(const std::vector<CrossingEvent>& predicted,
                               const std::vector<GroundTruthEvent>& truth, std::int64_t tolerance) {
    if (tolerance < 0) throw ValidationError("eval.tolerance_frames: must be >= 0");
    require_sorted(predicted, "predicted");
    require_sorted(truth, "ground-truth");

    DirectionalCounts out;
    for (const Direction dir : {Direction::Enter, Direction::Exit}) {
        std::vector<std::int64_t> preds;
        std::vector<std::int64_t> truths;
        for (const auto& e : predicted) {
            if (e.direction == dir) preds.push_back(e.frame_index);
        }
        for (const auto& e : truth) {
            if (e.direction == dir) truths.push_back(e.frame_index);
        }

        // Matches always consume the earliest usable truth, so unmatched
        // truths ahead of the cursor stay contiguous and a single cursor
        // suffices.
        ConfusionCounts& c = out[dir];
        std::size_t next = 0;
        for (const std::int64_t p : preds) {
            while (next < truths.size() && truths[next] < p - tolerance) {
                ++c.fn;
                ++next;
            }
            if (next < truths.size() && truths[next] <= p + tolerance) {
                ++c.tp;
                ++next;
            } else {
                ++c.fp;
            }
        }
        c.fn += static_cast<std::int64_t>(truths.size() - next);
    }
    return out;
}

double precision(const ConfusionCounts& c) {
    const std::int64_t denom = c.tp + c.fp;
    return denom == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(denom);
}

double recall(const ConfusionCounts& c) {
    const std::int64_t denom = c.tp + c.fn;
    return denom == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(denom);
}

double f1(const ConfusionCounts& c) {
    const double p = precision(c);
    const double r = recall(c);
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

double average_f1(double f1_enter, double f1_exit) {
    if (!(f1_enter >= 0.0 && f1_enter <= 1.0 && f1_exit >= 0.0 && f1_exit <= 1.0)) {
        throw ValidationError("average_f1: inputs must lie in [0, 1]");
    }
    return (f1_enter + f1_exit) / 2.0;
}

double significance_test(std::int64_t errors, std::int64_t events, double p0) {
    if (events < 0 || errors < 0 || errors > events) {
        throw ValidationError("significance_test: need 0 <= errors <= events");
    }
    if (!(p0 > 0.0 && p0 < 1.0)) throw ValidationError("eval.p0: must be in (0, 1)");

    const double n = static_cast<double>(events);
    const double log_p = std::log(p0);
    const double log_q = std::log1p(-p0);
    auto log_pmf = [&](std::int64_t k) {
        const double kk = static_cast<double>(k);
        return std::lgamma(n + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(n - kk + 1.0) +
               kk * log_p + (n - kk) * log_q;
    };

    // Relative slack so outcomes tied with the observed one in exact
    // arithmetic are not lost to rounding.
    constexpr double kRelativeSlack = 1e-7;
    const double observed = log_pmf(errors);
    const double cutoff = observed + std::log1p(kRelativeSlack);
    double p_value = 0.0;
    for (std::int64_t k = 0; k <= events; ++k) {
        const double lp = log_pmf(k);
        if (lp <= cutoff) p_value += std::exp(lp);
    }
    return std::min(1.0, p_value);
}

DirectionMetrics compute_metrics(const ConfusionCounts& c) {
    return DirectionMetrics{c, precision(c), recall(c), f1(c)};
}

MetricsReport build_report(const DirectionalCounts& counts, double p0) {
    MetricsReport r;
    r.enter = compute_metrics(counts.enter);
    r.exit = compute_metrics(counts.exit);
    const ConfusionCounts pooled = counts.pooled();
    r.overall = compute_metrics(pooled);
    r.average_f1 = average_f1(r.enter.f1, r.exit.f1);
    r.significance.errors = pooled.fp + pooled.fn;
    r.significance.events = pooled.tp + pooled.fp + pooled.fn;
    r.significance.p0 = p0;
    r.significance.p_value = significance_test(r.significance.errors, r.significance.events, p0);
    return r;
}

namespace {

nlohmann::ordered_json direction_json(const DirectionMetrics& m) {
    nlohmann::ordered_json j;
    j["tp"] = m.counts.tp;
    j["fp"] = m.counts.fp;
    j["fn"] = m.counts.fn;
    j["precision"] = m.precision;
    j["recall"] = m.recall;
    j["f1"] = m.f1;
    return j;
}

}  // namespace

nlohmann::ordered_json render_report(const MetricsReport& report) {
    nlohmann::ordered_json j;
    j["enter"] = direction_json(report.enter);
    j["exit"] = direction_json(report.exit);
    j["overall"] = direction_json(report.overall);
    j["average_f1"] = report.average_f1;
    // Percentages are F1 values, labelled "accuracy" like the usual summary table.
    j["accuracy_table"] = {
        {"people_enter_percent", 100.0 * report.enter.f1},
        {"people_exit_percent", 100.0 * report.exit.f1},
        {"overall_counting_average_percent", 100.0 * report.average_f1},
    };
    j["significance"] = {
        {"errors", report.significance.errors},
        {"events", report.significance.events},
        {"p0", report.significance.p0},
        {"p_value", report.significance.p_value},
    };
    return j;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

[[noreturn]] void bad_row(const std::filesystem::path& path, int line_no, const std::string& why) {
    throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + why);
}

std::int64_t parse_int(const std::string& s, const std::filesystem::path& path, int line_no) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        bad_row(path, line_no, "expected an integer, got '" + s + "'");
    }
    if (used != s.size()) bad_row(path, line_no, "expected an integer, got '" + s + "'");
    return v;
}

double parse_double(const std::string& s, const std::filesystem::path& path, int line_no) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        bad_row(path, line_no, "expected a number, got '" + s + "'");
    }
    if (used != s.size()) bad_row(path, line_no, "expected a number, got '" + s + "'");
    return v;
}

Direction parse_dir(const std::string& s, const std::filesystem::path& path, int line_no) {
    if (s == "enter") return Direction::Enter;
    if (s == "exit") return Direction::Exit;
    bad_row(path, line_no, "direction must be 'enter' or 'exit', got '" + s + "'");
}

template <typename Fn>
void for_each_row(const std::filesystem::path& path, const std::string& header, std::size_t columns,
                  Fn&& fn) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    int line_no = 0;
    bool seen_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        if (!seen_header) {
            if (trim(line) != header) bad_row(path, line_no, "expected header '" + header + "'");
            seen_header = true;
            continue;
        }
        std::vector<std::string> cells = split_csv(line);
        if (cells.size() != columns) {
            bad_row(path, line_no, "expected " + std::to_string(columns) + " fields, got " +
                                       std::to_string(cells.size()));
        }
        for (auto& c : cells) c = trim(c);
        fn(cells, line_no);
    }
    if (!seen_header) bad_row(path, 1, "missing header '" + header + "'");
}

}  // namespace

std::vector<GroundTruthEvent> read_ground_truth_csv(const std::filesystem::path& path) {
    std::vector<GroundTruthEvent> out;
    for_each_row(path, "frame,direction", 2, [&](const std::vector<std::string>& cells, int line_no) {
        out.push_back({parse_int(cells[0], path, line_no), parse_dir(cells[1], path, line_no)});
        if (out.size() > 1 && out[out.size() - 2].frame_index > out.back().frame_index) {
            bad_row(path, line_no, "rows must be sorted by frame");
        }
    });
    return out;
}

void write_ground_truth_csv(const std::vector<GroundTruthEvent>& events,
                            const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << "frame,direction\n";
    for (const auto& e : events) out << e.frame_index << "," << to_string(e.direction) << "\n";
    if (!out) throw IoError("write failed for " + path.string());
}

std::vector<CrossingEvent> read_events_csv(const std::filesystem::path& path) {
    std::vector<CrossingEvent> out;
    for_each_row(path, "frame,track_id,direction,x,y", 5,
                 [&](const std::vector<std::string>& cells, int line_no) {
                     CrossingEvent e;
                     e.frame_index = parse_int(cells[0], path, line_no);
                     e.track_id = parse_int(cells[1], path, line_no);
                     e.direction = parse_dir(cells[2], path, line_no);
                     e.position = {parse_double(cells[3], path, line_no),
                                   parse_double(cells[4], path, line_no)};
                     if (!out.empty() && out.back().frame_index > e.frame_index) {
                         bad_row(path, line_no, "rows must be sorted by frame");
                     }
                     out.push_back(e);
                 });
    return out;
}

}  // namespace doorcount
