#include "doorcount/video_io.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <cctype>
#include <iterator>
#include <sstream>

#include "doorcount/error.hpp"

namespace doorcount {

namespace fs = std::filesystem;

Frame FrameStream::deliver(Frame f) {
    if (f.width != width_ || f.height != height_ || f.channels != channels_) {
        std::ostringstream msg;
        msg << describe() << ": frame " << delivered_ << " is " << f.width << "x" << f.height
            << "x" << f.channels << ", expected " << width_ << "x" << height_ << "x"
            << channels_;
        throw IoError(msg.str());
    }
    f.index = delivered_++;
    return f;
}

// ---------------------------------------------------------------------------
// PNM

namespace {

class PnmHeaderParser {
public:
    PnmHeaderParser(const std::string& data, const fs::path& path) : data_(data), path_(path) {}

    void skip_space_and_comments() {
        while (pos_ < data_.size()) {
            const unsigned char c = data_[pos_];
            if (c == '#') {
                while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
            } else if (std::isspace(c)) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    int read_uint(const char* what) {
        skip_space_and_comments();
        const std::size_t start = pos_;
        long value = 0;
        while (pos_ < data_.size() && std::isdigit(static_cast<unsigned char>(data_[pos_]))) {
            value = value * 10 + (data_[pos_] - '0');
            if (value > 1'000'000) fail(std::string(what) + " out of range");
            ++pos_;
        }
        if (pos_ == start) fail(std::string("missing ") + what);
        return static_cast<int>(value);
    }

    [[noreturn]] void fail(const std::string& why) const {
        throw IoError(path_.string() + ": malformed PNM header: " + why);
    }

    std::size_t pos_ = 0;

private:
    const std::string& data_;
    const fs::path& path_;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

Frame read_pnm(const fs::path& path) {
    const std::string data = slurp(path);
    PnmHeaderParser p(data, path);
    if (data.size() < 2 || data[0] != 'P' || (data[1] != '5' && data[1] != '6')) {
        p.fail("expected magic P5 or P6");
    }
    const int channels = data[1] == '5' ? 1 : 3;
    p.pos_ = 2;
    const int width = p.read_uint("width");
    const int height = p.read_uint("height");
    const int maxval = p.read_uint("maxval");
    if (width <= 0 || height <= 0) p.fail("zero dimension");
    if (maxval != 255) p.fail("maxval must be 255, got " + std::to_string(maxval));
    if (p.pos_ >= data.size() || !std::isspace(static_cast<unsigned char>(data[p.pos_]))) {
        p.fail("missing whitespace after maxval");
    }
    ++p.pos_;

    Frame frame(width, height, channels);
    const std::size_t need = frame.pixels.size();
    if (data.size() - p.pos_ < need) {
        throw IoError(path.string() + ": truncated pixel data (" +
                      std::to_string(data.size() - p.pos_) + " of " + std::to_string(need) +
                      " bytes)");
    }
    std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(p.pos_), need, frame.pixels.begin());
    return frame;
}

namespace {

void write_p5(int width, int height, const std::vector<std::uint8_t>& bytes, const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << "P5\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

void write_pgm(const Frame& frame, const fs::path& path) {
    if (frame.channels != 1) {
        throw ValidationError("write_pgm needs a single-channel frame, got " +
                              std::to_string(frame.channels) + " channels");
    }
    write_p5(frame.width, frame.height, frame.pixels, path);
}

void write_pgm(const MaskFrame& mask, const fs::path& path) {
    write_p5(mask.width, mask.height, mask.labels, path);
}

// ---------------------------------------------------------------------------
// PNM sequence

PnmSequenceStream::PnmSequenceStream(const fs::path& dir, const std::string& pattern) : dir_(dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw IoError("not a directory: " + dir.string());
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (::fnmatch(pattern.c_str(), name.c_str(), 0) == 0) files_.push_back(entry.path());
    }
    if (files_.empty()) {
        throw IoError("no files matching '" + pattern + "' in " + dir.string());
    }
    std::sort(files_.begin(), files_.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

    // Geometry comes from the first file; every later file must agree.
    const Frame first = read_pnm(files_.front());
    width_ = first.width;
    height_ = first.height;
    channels_ = first.channels;
    if (width_ < kMinFrameSide || height_ < kMinFrameSide) {
        throw IoError(files_.front().string() + ": frames must be at least 16x16");
    }
}

std::optional<Frame> PnmSequenceStream::next() {
    if (pos_ >= files_.size()) return std::nullopt;
    const fs::path& path = files_[pos_++];
    Frame f = read_pnm(path);
    if (f.width != width_ || f.height != height_ || f.channels != channels_) {
        throw IoError(path.string() + ": dimension mismatch, " + std::to_string(f.width) + "x" +
                      std::to_string(f.height) + " vs " + std::to_string(width_) + "x" +
                      std::to_string(height_));
    }
    return deliver(std::move(f));
}

std::string PnmSequenceStream::describe() const { return dir_.string(); }

std::unique_ptr<FrameStream> open_pgm_sequence(const fs::path& dir, const std::string& pattern) {
    return std::make_unique<PnmSequenceStream>(dir, pattern);
}

// ---------------------------------------------------------------------------
// Memory

MemoryFrameStream::MemoryFrameStream(std::vector<Frame> frames) : frames_(std::move(frames)) {
    if (!frames_.empty()) {
        width_ = frames_.front().width;
        height_ = frames_.front().height;
        channels_ = frames_.front().channels;
    }
}

std::optional<Frame> MemoryFrameStream::next() {
    if (pos_ >= frames_.size()) return std::nullopt;
    return deliver(frames_[pos_++]);
}

// ---------------------------------------------------------------------------
// YUV4MPEG2

namespace {

constexpr std::string_view kY4mMagic = "YUV4MPEG2";

bool chroma_is_420(const std::string& tag) {
    return tag.rfind("420", 0) == 0;  // 420, 420jpeg, 420paldv, 420mpeg2
}

}  // namespace

Y4mStream::Y4mStream(const fs::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open " + path.string());
    std::string header;
    if (!std::getline(in_, header)) throw IoError(path.string() + ": empty file");
    consumed_ = header.size() + 1;

    std::istringstream tags(header);
    std::string magic;
    tags >> magic;
    if (magic != kY4mMagic) throw IoError(path.string() + ": bad signature, expected YUV4MPEG2");

    std::string tag;
    while (tags >> tag) {
        const char key = tag[0];
        const std::string value = tag.substr(1);
        switch (key) {
        case 'W': width_ = std::stoi(value); break;
        case 'H': height_ = std::stoi(value); break;
        case 'C':
            if (!chroma_is_420(value)) {
                throw IoError(path.string() + ": unsupported chroma subsampling C" + value);
            }
            break;
        default: break;  // F, I, A, X carry nothing we need
        }
    }
    if (width_ <= 0 || height_ <= 0) throw IoError(path.string() + ": missing W or H tag");
    if (width_ < kMinFrameSide || height_ < kMinFrameSide) {
        throw IoError(path.string() + ": frames must be at least 16x16");
    }
    channels_ = 1;
    const std::size_t cw = (static_cast<std::size_t>(width_) + 1) / 2;
    const std::size_t ch = (static_cast<std::size_t>(height_) + 1) / 2;
    chroma_bytes_ = 2 * cw * ch;
}

std::optional<Frame> Y4mStream::next() {
    std::string marker;
    if (!std::getline(in_, marker)) {
        if (in_.eof() && marker.empty()) return std::nullopt;
        throw IoError(path_.string() + ": read error before frame " + std::to_string(delivered_));
    }
    if (in_.eof()) {
        // getline hit EOF without a newline: a partial marker.
        throw IoError(path_.string() + ": truncated frame " + std::to_string(delivered_));
    }
    if (marker.rfind("FRAME", 0) != 0) {
        throw IoError(path_.string() + ": expected FRAME marker for frame " +
                      std::to_string(delivered_));
    }
    consumed_ += marker.size() + 1;

    Frame f(width_, height_, 1);
    in_.read(reinterpret_cast<char*>(f.pixels.data()), static_cast<std::streamsize>(f.pixels.size()));
    consumed_ += static_cast<std::uint64_t>(in_.gcount());
    if (static_cast<std::size_t>(in_.gcount()) != f.pixels.size()) {
        throw IoError(path_.string() + ": truncated frame " + std::to_string(delivered_) +
                      " (luma plane)");
    }
    in_.ignore(static_cast<std::streamsize>(chroma_bytes_));
    consumed_ += static_cast<std::uint64_t>(in_.gcount());
    if (static_cast<std::size_t>(in_.gcount()) != chroma_bytes_) {
        throw IoError(path_.string() + ": truncated frame " + std::to_string(delivered_) +
                      " (chroma planes)");
    }
    return deliver(std::move(f));
}

std::unique_ptr<FrameStream> open_y4m(const fs::path& path) {
    return std::make_unique<Y4mStream>(path);
}

void write_y4m(const std::vector<Frame>& frames, const fs::path& path, int fps_num, int fps_den) {
    if (frames.empty()) throw ValidationError("write_y4m: no frames");
    const int w = frames.front().width;
    const int h = frames.front().height;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << kY4mMagic << " W" << w << " H" << h << " F" << fps_num << ":" << fps_den
        << " Ip A1:1 C420jpeg\n";
    const std::vector<char> chroma(2 * ((w + 1) / 2) * ((h + 1) / 2), static_cast<char>(128));
    for (const Frame& f : frames) {
        if (f.channels != 1 || f.width != w || f.height != h) {
            throw ValidationError("write_y4m: frames must be single-channel and equally sized");
        }
        out << "FRAME\n";
        out.write(reinterpret_cast<const char*>(f.pixels.data()),
                  static_cast<std::streamsize>(f.pixels.size()));
        out.write(chroma.data(), static_cast<std::streamsize>(chroma.size()));
    }
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace doorcount
