#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "counter_reference.hpp"
#include "doorcount/counter.hpp"
#include "doorcount/error.hpp"

namespace doorcount {
namespace {

// Horizontal line y = 0 from (0,0) to (10,0). Points with y > 0 are on side +1.
CountingLine horizontal(double hysteresis, int debounce, int enter_sign = -1) {
    CountingLine l;
    l.p1 = {0.0, 0.0};
    l.p2 = {10.0, 0.0};
    l.enter_sign = enter_sign;
    l.hysteresis = hysteresis;
    l.debounce = debounce;
    return l;
}

Track confirmed(std::int64_t id, double x, double y, std::int64_t frame) {
    Track t;
    t.id = id;
    t.state = TrackState::Confirmed;
    t.hits = 3;
    t.history.push_back({frame, {x, y}});
    return t;
}

TEST(SideOfLine, Antisymmetry) {
    const CountingLine l = horizontal(0, 0);
    const int s = side_of_line({5, 3}, l);
    EXPECT_NE(s, 0);
    EXPECT_EQ(side_of_line({5, -3}, l), -s);
    EXPECT_EQ(side_of_line({5, 0}, l), 0);

    CountingLine swapped = l;
    std::swap(swapped.p1, swapped.p2);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-50, 50);
    for (int i = 0; i < 100; ++i) {
        const Point2 p{u(rng), u(rng)};
        EXPECT_EQ(side_of_line(p, swapped), -side_of_line(p, l));
    }
    EXPECT_DOUBLE_EQ(l.distance({3, -7}), 7.0);
}

TEST(CountingLine, Validation) {
    CountingLine l = horizontal(5, 5);
    l.p2 = l.p1;
    EXPECT_THROW(l.validate(), ValidationError);
    l = horizontal(-1, 5);
    EXPECT_THROW(l.validate(), ValidationError);
    l = horizontal(1, -5);
    EXPECT_THROW(l.validate(), ValidationError);
    l = horizontal(1, 5, 0);
    EXPECT_THROW(l.validate(), ValidationError);
}

TEST(LineCounter, SingleCrossingIsOneEnter) {
    const CountingLine line = horizontal(5, 15, side_of_line({0, -20}, horizontal(0, 0)));
    LineCounter c(line);
    int events = 0;
    for (int f = 0; f <= 40; ++f) {
        const double y = -20.0 + f;
        for (const CrossingEvent& e : c.update({confirmed(1, 5, y, f)}, f)) {
            EXPECT_EQ(e.direction, Direction::Enter);
            EXPECT_EQ(e.frame_index, 25);  // first frame at distance 5 on the far side
            ++events;
        }
    }
    EXPECT_EQ(events, 1);
    EXPECT_EQ(c.enter_total(), 1);
    EXPECT_EQ(c.exit_total(), 0);
}

TEST(LineCounter, TouchAndRetreatIsNoEvent) {
    LineCounter c(horizontal(5, 15));
    const double ys[] = {-20, -15, -10, -5, -2, 0, -2, -5, -10, -20};
    int f = 0;
    for (double y : ys) {
        EXPECT_TRUE(c.update({confirmed(1, 5, y, f)}, f).empty());
        ++f;
    }
    EXPECT_EQ(c.enter_total() + c.exit_total(), 0);
}

TEST(LineCounter, OutAndBackAfterDebounce) {
    LineCounter c(horizontal(5, 15));
    int f = 0;
    std::vector<CrossingEvent> all;
    auto step = [&](double y) {
        for (const auto& e : c.update({confirmed(1, 5, y, f)}, f)) all.push_back(e);
        ++f;
    };
    for (int i = 0; i <= 40; ++i) step(-20.0 + i);
    for (int i = 0; i < 20; ++i) step(20.0);
    for (int i = 0; i <= 40; ++i) step(20.0 - i);
    ASSERT_EQ(all.size(), 2u);
    EXPECT_EQ(all[0].direction, Direction::Enter);
    EXPECT_EQ(all[1].direction, Direction::Exit);
    EXPECT_EQ(c.enter_total(), 1);
    EXPECT_EQ(c.exit_total(), 1);
    EXPECT_EQ(c.occupancy(), 0);
}

TEST(LineCounter, DebounceSuppressesQuickReturn) {
    LineCounter c(horizontal(5, 15));
    const double ys[] = {-10, 10, -10, -10, -10};
    std::int64_t n = 0;
    for (int f = 0; f < 5; ++f) n += static_cast<std::int64_t>(c.update({confirmed(1, 0, ys[f], f)}, f).size());
    EXPECT_EQ(n, 1);
    // Once the window has passed the track is still armed on the far side.
    EXPECT_FALSE(c.observe(1, {0, 10}, 30).has_value());
    EXPECT_TRUE(c.observe(1, {0, -10}, 31).has_value());
}

TEST(LineCounter, Occupancy) {
    LineCounter c(horizontal(0, 0));
    std::int64_t f = 0;
    // Ten tracks enter, nine of them leave again.
    for (int id = 1; id <= 10; ++id) {
        c.observe(id, {0, -5}, f++);
        c.observe(id, {0, 5}, f++);
    }
    for (int id = 1; id <= 9; ++id) c.observe(id, {0, -5}, f++);
    EXPECT_EQ(c.enter_total(), 10);
    EXPECT_EQ(c.exit_total(), 9);
    EXPECT_EQ(c.occupancy(), 1);

    LineCounter d(horizontal(0, 0));
    f = 0;
    for (int id = 1; id <= 3; ++id) {
        d.observe(id, {0, 5}, f++);
        d.observe(id, {0, -5}, f++);
    }
    for (int id = 4; id <= 5; ++id) {
        d.observe(id, {0, -5}, f++);
        d.observe(id, {0, 5}, f++);
    }
    EXPECT_EQ(d.enter_total(), 2);
    EXPECT_EQ(d.exit_total(), 3);
    EXPECT_EQ(d.occupancy(), -1);
    EXPECT_EQ(LineCounter(horizontal(0, 0)).occupancy(), 0);
}

TEST(LineCounter, TentativeTracksNeverCount) {
    LineCounter c(horizontal(0, 0));
    Track t = confirmed(1, 0, -5, 0);
    t.state = TrackState::Tentative;
    c.update({t}, 0);
    t.history.back() = {1, {0, 5}};
    EXPECT_TRUE(c.update({t}, 1).empty());
}

TEST(LineCounter, NonMonotonicFrameIsAnError) {
    LineCounter c(horizontal(0, 0));
    c.update({}, 3);
    EXPECT_THROW(c.update({}, 3), ValidationError);
}

TEST(LineCounter, EventCsv) {
    std::ostringstream out;
    write_events_header(out);
    write_event_row(out, {12, 4, Direction::Exit, {1.5, 2.25}});
    EXPECT_EQ(out.str(), "frame,track_id,direction,x,y\n12,4,exit,1.500,2.250\n");
    EXPECT_EQ(parse_direction("enter"), Direction::Enter);
    EXPECT_THROW(parse_direction("sideways"), ValidationError);
}

TEST(CounterProperty, MatchesSignChangeCountWithoutHysteresis) {
    std::mt19937_64 rng(77);
    for (int walk = 0; walk < 200; ++walk) {
        const auto path = testing::random_walk(rng, 120);
        const CountingLine line = horizontal(0, 0, walk % 2 ? 1 : -1);
        LineCounter c(line);
        std::int64_t emitted = 0;
        std::int64_t f = 0;
        Direction last = Direction::Enter;
        for (const Point2& p : path) {
            if (auto e = c.observe(1, p, f++)) {
                if (emitted > 0) {
                    EXPECT_NE(e->direction, last);  // alternation
                }
                last = e->direction;
                ++emitted;
            }
        }
        EXPECT_EQ(emitted, testing::sign_changes(path, line));
        EXPECT_EQ(emitted, c.enter_total() + c.exit_total());
    }
}

TEST(CounterProperty, AlternatesWithHysteresis) {
    std::mt19937_64 rng(78);
    for (int walk = 0; walk < 100; ++walk) {
        const auto path = testing::random_walk(rng, 200);
        LineCounter c(horizontal(3, 4));
        std::optional<Direction> last;
        std::int64_t last_frame = -1;
        std::int64_t f = 0;
        for (const Point2& p : path) {
            if (auto e = c.observe(1, p, f)) {
                if (last) {
                    EXPECT_NE(e->direction, *last);
                }
                EXPECT_GE(e->frame_index, last_frame);
                last = e->direction;
                last_frame = e->frame_index;
            }
            ++f;
        }
    }
}

}  // namespace
}  // namespace doorcount
