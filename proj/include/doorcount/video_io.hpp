#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "doorcount/frame.hpp"

namespace doorcount {

/// Smallest frame a stream will deliver.
inline constexpr int kMinFrameSide = 16;

/// Sequential, single-consumer source of equally sized frames with
/// consecutive indices starting at 0.
class FrameStream {
public:
    virtual ~FrameStream() = default;

    /// Next frame, or nullopt at end of stream. Throws IoError on bad input.
    virtual std::optional<Frame> next() = 0;

    virtual std::string describe() const = 0;

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    std::int64_t delivered() const { return delivered_; }

protected:
    /// Stamps the index and checks the frame against the declared geometry.
    Frame deliver(Frame f);

    int width_ = 0;
    int height_ = 0;
    int channels_ = 1;
    std::int64_t delivered_ = 0;
};

/// Frames already held in memory (synthetic scenes, benchmarks).
class MemoryFrameStream final : public FrameStream {
public:
    explicit MemoryFrameStream(std::vector<Frame> frames);
    std::optional<Frame> next() override;
    std::string describe() const override { return "memory"; }

private:
    std::vector<Frame> frames_;
    std::size_t pos_ = 0;
};

/// Reads a directory of binary PGM (P5) or PPM (P6) files. Lexicographic
/// filename order defines time, so names must be zero-padded.
class PnmSequenceStream final : public FrameStream {
public:
    PnmSequenceStream(const std::filesystem::path& dir, const std::string& pattern);
    std::optional<Frame> next() override;
    std::string describe() const override;

    const std::vector<std::filesystem::path>& files() const { return files_; }

private:
    std::filesystem::path dir_;
    std::vector<std::filesystem::path> files_;
    std::size_t pos_ = 0;
};

/// YUV4MPEG2 reader. Only the luma plane is kept; chroma is skipped.
class Y4mStream final : public FrameStream {
public:
    explicit Y4mStream(const std::filesystem::path& path);
    std::optional<Frame> next() override;
    std::string describe() const override { return path_.string(); }

    /// Bytes read from the file so far, header included.
    std::uint64_t bytes_consumed() const { return consumed_; }
    std::size_t chroma_bytes_per_frame() const { return chroma_bytes_; }

private:
    std::filesystem::path path_;
    std::ifstream in_;
    std::size_t chroma_bytes_ = 0;
    std::uint64_t consumed_ = 0;
};

std::unique_ptr<FrameStream> open_pgm_sequence(const std::filesystem::path& dir,
                                               const std::string& pattern = "*.pgm");
std::unique_ptr<FrameStream> open_y4m(const std::filesystem::path& path);

/// Parses one binary PNM image (P5 or P6, maxval 255).
Frame read_pnm(const std::filesystem::path& path);

/// Writes a single-channel raster as binary PGM, maxval 255.
void write_pgm(const Frame& frame, const std::filesystem::path& path);
void write_pgm(const MaskFrame& mask, const std::filesystem::path& path);

/// Writes a YUV4MPEG2 file with mid-grey 4:2:0 chroma. Used to export scenes.
void write_y4m(const std::vector<Frame>& frames, const std::filesystem::path& path,
               int fps_num = 30, int fps_den = 1);

}  // namespace doorcount
