#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "doorcount/blob.hpp"

namespace doorcount {

/// Keys of the [tracker] section. An unset max_match_distance resolves to 10%
/// of the frame diagonal.
struct TrackerParams {
    double max_match_distance = 0.0;
    int min_hits = 3;
    int max_missed = 10;

    void validate() const;
};

double default_max_match_distance(int width, int height);

enum class TrackState { Tentative, Confirmed, Lost };

const char* to_string(TrackState s);

struct TrackPoint {
    std::int64_t frame_index = 0;
    Point2 position;
};

struct Track {
    std::int64_t id = 0;
    std::vector<TrackPoint> history;
    TrackState state = TrackState::Tentative;
    int hits = 0;
    int missed = 0;

    const Point2& position() const { return history.back().position; }
};

/// Greedy nearest-centroid tracker without motion prediction.
///
/// Each frame, every (track, blob) pair within max_match_distance is ranked
/// by distance (ties: lower track id, then lower blob index) and accepted
/// while both sides are unclaimed. Unmatched blobs start tentative tracks;
/// tracks missing for more than max_missed frames are dropped.
class CentroidTracker {
public:
    explicit CentroidTracker(const TrackerParams& params);

    /// Returns the active (tentative and confirmed) tracks ordered by id.
    const std::vector<Track>& update(const std::vector<Blob>& blobs, std::int64_t frame_index);

    const std::vector<Track>& active() const { return tracks_; }

    /// Tracks removed by the most recent update, in the Lost state.
    const std::vector<Track>& dropped() const { return dropped_; }

    std::int64_t next_id() const { return next_id_; }
    const TrackerParams& params() const { return params_; }

private:
    TrackerParams params_;
    std::vector<Track> tracks_;
    std::vector<Track> dropped_;
    std::int64_t next_id_ = 1;
    std::optional<std::int64_t> last_frame_;
};

}  // namespace doorcount
