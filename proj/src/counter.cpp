#include "doorcount/counter.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <unordered_set>

#include "doorcount/error.hpp"

namespace doorcount {

const char* to_string(Direction d) { return d == Direction::Enter ? "enter" : "exit"; }

Direction parse_direction(std::string_view s) {
    if (s == "enter") return Direction::Enter;
    if (s == "exit") return Direction::Exit;
    throw ValidationError("unknown direction '" + std::string(s) + "', expected enter or exit");
}

void CountingLine::validate() const {
    if (p1.x == p2.x && p1.y == p2.y) throw ValidationError("counter.line: endpoints coincide");
    if (enter_sign != 1 && enter_sign != -1) throw ValidationError("counter.enter_sign: must be +1 or -1");
    if (!(hysteresis >= 0.0)) throw ValidationError("counter.hysteresis: must be >= 0");
    if (debounce < 0) throw ValidationError("counter.debounce: must be >= 0");
}

int CountingLine::side_of(const Point2& point) const {
    const double cross = (p2.x - p1.x) * (point.y - p1.y) - (p2.y - p1.y) * (point.x - p1.x);
    return (cross > 0.0) - (cross < 0.0);
}

double CountingLine::distance(const Point2& point) const {
    const double cross = (p2.x - p1.x) * (point.y - p1.y) - (p2.y - p1.y) * (point.x - p1.x);
    return std::abs(cross) / std::hypot(p2.x - p1.x, p2.y - p1.y);
}

int side_of_line(const Point2& point, const CountingLine& line) { return line.side_of(point); }

LineCounter::LineCounter(const CountingLine& line) : line_(line) { line_.validate(); }

std::optional<CrossingEvent> LineCounter::observe(std::int64_t track_id, const Point2& position,
                                                  std::int64_t frame_index) {
    const int side = line_.side_of(position);
    if (side == 0 || line_.distance(position) < line_.hysteresis) return std::nullopt;

    Memory& m = memory_[track_id];
    if (m.armed_side == 0) {
        m.armed_side = side;
        return std::nullopt;
    }
    if (side == m.armed_side) return std::nullopt;
    if (m.last_counted && frame_index - *m.last_counted < line_.debounce) return std::nullopt;

    const Direction dir = m.armed_side == line_.enter_sign ? Direction::Enter : Direction::Exit;
    m.armed_side = side;
    m.last_counted = frame_index;
    (dir == Direction::Enter ? enter_total_ : exit_total_) += 1;
    return CrossingEvent{frame_index, track_id, dir, position};
}

std::vector<CrossingEvent> LineCounter::update(const std::vector<Track>& tracks,
                                               std::int64_t frame_index) {
    if (last_frame_ && frame_index <= *last_frame_) {
        throw ValidationError("counter: frame index " + std::to_string(frame_index) +
                              " does not follow " + std::to_string(*last_frame_));
    }
    last_frame_ = frame_index;

    std::vector<CrossingEvent> events;
    std::unordered_set<std::int64_t> present;
    for (const Track& t : tracks) {
        present.insert(t.id);
        if (t.state != TrackState::Confirmed || t.history.empty()) continue;
        if (auto e = observe(t.id, t.position(), frame_index)) events.push_back(*e);
    }
    std::erase_if(memory_, [&](const auto& kv) { return !present.contains(kv.first); });
    return events;
}

void write_events_header(std::ostream& out) { out << "frame,track_id,direction,x,y\n"; }

void write_event_row(std::ostream& out, const CrossingEvent& e) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%lld,%lld,%s,%.3f,%.3f\n", static_cast<long long>(e.frame_index),
                  static_cast<long long>(e.track_id), to_string(e.direction), e.position.x,
                  e.position.y);
    out << buf;
}

}  // namespace doorcount
