#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "doorcount/blob.hpp"
#include "doorcount/tracker.hpp"

namespace doorcount {

enum class Direction { Enter, Exit };

const char* to_string(Direction d);
Direction parse_direction(std::string_view s);

/// Virtual counting line. A track moving from the enter_sign side to the
/// opposite side is an entry; the reverse move is an exit.
struct CountingLine {
    Point2 p1;
    Point2 p2{1.0, 0.0};
    int enter_sign = -1;
    double hysteresis = 8.0;
    int debounce = 15;

    void validate() const;

    /// Sign of the z-component of (p2 - p1) x (point - p1).
    int side_of(const Point2& point) const;

    /// Unsigned perpendicular distance from the (infinite) line.
    double distance(const Point2& point) const;
};

int side_of_line(const Point2& point, const CountingLine& line);

struct CrossingEvent {
    std::int64_t frame_index = 0;
    std::int64_t track_id = 0;
    Direction direction = Direction::Enter;
    Point2 position;
};

/// Turns confirmed trajectories into enter/exit events with an arming
/// automaton per track: a track arms on side s once it is at least
/// `hysteresis` away from the line on that side, and fires when it later
/// reaches the same distance on the other side. After firing the track is
/// re-armed there and ignored for `debounce` frames.
class LineCounter {
public:
    explicit LineCounter(const CountingLine& line);

    /// Tentative tracks are skipped. Memory for tracks absent from the list
    /// is released.
    std::vector<CrossingEvent> update(const std::vector<Track>& tracks, std::int64_t frame_index);

    /// Low-level step for one confirmed track; returns the event if one fired.
    std::optional<CrossingEvent> observe(std::int64_t track_id, const Point2& position,
                                         std::int64_t frame_index);

    std::int64_t enter_total() const { return enter_total_; }
    std::int64_t exit_total() const { return exit_total_; }
    std::int64_t occupancy() const { return enter_total_ - exit_total_; }
    const CountingLine& line() const { return line_; }

private:
    struct Memory {
        int armed_side = 0;
        std::optional<std::int64_t> last_counted;
    };

    CountingLine line_;
    std::unordered_map<std::int64_t, Memory> memory_;
    std::int64_t enter_total_ = 0;
    std::int64_t exit_total_ = 0;
    std::optional<std::int64_t> last_frame_;
};

/// CSV with header "frame,track_id,direction,x,y".
void write_events_header(std::ostream& out);
void write_event_row(std::ostream& out, const CrossingEvent& e);

}  // namespace doorcount
