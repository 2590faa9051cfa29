#include "doorcount/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "doorcount/error.hpp"

namespace doorcount {

void TrackerParams::validate() const {
    if (!(max_match_distance > 0.0)) throw ValidationError("tracker.max_match_distance: must be > 0");
    if (min_hits < 1) throw ValidationError("tracker.min_hits: must be >= 1");
    if (max_missed < 0) throw ValidationError("tracker.max_missed: must be >= 0");
}

double default_max_match_distance(int width, int height) {
    return 0.1 * std::hypot(static_cast<double>(width), static_cast<double>(height));
}

const char* to_string(TrackState s) {
    switch (s) {
    case TrackState::Tentative: return "tentative";
    case TrackState::Confirmed: return "confirmed";
    case TrackState::Lost: return "lost";
    }
    return "?";
}

CentroidTracker::CentroidTracker(const TrackerParams& params) : params_(params) {
    params_.validate();
}

const std::vector<Track>& CentroidTracker::update(const std::vector<Blob>& blobs,
                                                  std::int64_t frame_index) {
    if (last_frame_ && frame_index <= *last_frame_) {
        throw ValidationError("tracker: frame index " + std::to_string(frame_index) +
                              " does not follow " + std::to_string(*last_frame_));
    }
    last_frame_ = frame_index;
    dropped_.clear();

    struct Candidate {
        double distance;
        std::int64_t track_id;
        std::size_t track;
        std::size_t blob;
    };
    std::vector<Candidate> candidates;
    for (std::size_t t = 0; t < tracks_.size(); ++t) {
        const Point2& p = tracks_[t].position();
        for (std::size_t b = 0; b < blobs.size(); ++b) {
            const double d = std::hypot(blobs[b].centroid.x - p.x, blobs[b].centroid.y - p.y);
            if (d <= params_.max_match_distance) candidates.push_back({d, tracks_[t].id, t, b});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        return std::tie(a.distance, a.track_id, a.blob) < std::tie(b.distance, b.track_id, b.blob);
    });

    std::vector<bool> track_taken(tracks_.size(), false);
    std::vector<bool> blob_taken(blobs.size(), false);
    for (const Candidate& c : candidates) {
        if (track_taken[c.track] || blob_taken[c.blob]) continue;
        track_taken[c.track] = true;
        blob_taken[c.blob] = true;
        Track& tr = tracks_[c.track];
        tr.history.push_back({frame_index, blobs[c.blob].centroid});
        ++tr.hits;
        tr.missed = 0;
        if (tr.hits >= params_.min_hits) tr.state = TrackState::Confirmed;
    }

    std::vector<Track> survivors;
    survivors.reserve(tracks_.size() + blobs.size());
    for (std::size_t t = 0; t < tracks_.size(); ++t) {
        Track& tr = tracks_[t];
        if (!track_taken[t] && ++tr.missed > params_.max_missed) {
            tr.state = TrackState::Lost;
            dropped_.push_back(std::move(tr));
            continue;
        }
        survivors.push_back(std::move(tr));
    }
    for (std::size_t b = 0; b < blobs.size(); ++b) {
        if (blob_taken[b]) continue;
        Track tr;
        tr.id = next_id_++;
        tr.history.push_back({frame_index, blobs[b].centroid});
        tr.hits = 1;
        tr.state = tr.hits >= params_.min_hits ? TrackState::Confirmed : TrackState::Tentative;
        survivors.push_back(std::move(tr));
    }
    tracks_ = std::move(survivors);
    return tracks_;
}

}  // namespace doorcount
