#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "doorcount/error.hpp"
#include "doorcount/video_io.hpp"

namespace fs = std::filesystem;

namespace doorcount {
namespace {

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = fs::temp_directory_path() /
                ("doorcount_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

Frame ramp_frame(int w, int h, int seed) {
    Frame f(w, h, 1);
    for (std::size_t i = 0; i < f.pixels.size(); ++i) {
        f.pixels[i] = static_cast<std::uint8_t>((i * 7 + seed * 13) % 256);
    }
    return f;
}

std::string read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_y4m_raw(const fs::path& p, int w, int h, int frames, std::uint8_t luma,
                   std::size_t truncate_last_by = 0) {
    std::ofstream out(p, std::ios::binary);
    out << "YUV4MPEG2 W" << w << " H" << h << " F30:1\n";
    const std::size_t chroma = 2 * static_cast<std::size_t>((w + 1) / 2) * ((h + 1) / 2);
    for (int f = 0; f < frames; ++f) {
        out << "FRAME\n";
        std::string payload(static_cast<std::size_t>(w) * h, static_cast<char>(luma));
        payload.append(chroma, static_cast<char>(128));
        if (f == frames - 1 && truncate_last_by > 0) payload.resize(payload.size() - truncate_last_by);
        out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    }
}

TEST(PgmSequence, ReadsDirectoryInOrder) {
    TempDir dir;
    for (int i = 0; i < 10; ++i) {
        char name[16];
        std::snprintf(name, sizeof name, "%03d.pgm", i);
        write_pgm(ramp_frame(64, 48, i), dir.path() / name);
    }
    auto stream = open_pgm_sequence(dir.path());
    int n = 0;
    while (auto f = stream->next()) {
        EXPECT_EQ(f->width, 64);
        EXPECT_EQ(f->height, 48);
        EXPECT_EQ(f->channels, 1);
        EXPECT_EQ(f->index, n);
        EXPECT_EQ(f->pixels, ramp_frame(64, 48, n).pixels);
        ++n;
    }
    EXPECT_EQ(n, 10);
    EXPECT_EQ(stream->delivered(), 10);
}

TEST(PgmSequence, MinimumSizeSingleFrame) {
    TempDir dir;
    write_pgm(ramp_frame(16, 16, 0), dir.path() / "a.pgm");
    auto stream = open_pgm_sequence(dir.path());
    ASSERT_TRUE(stream->next().has_value());
    EXPECT_FALSE(stream->next().has_value());
}

TEST(PgmSequence, RejectsTooSmallFrames) {
    TempDir dir;
    write_pgm(ramp_frame(15, 16, 0), dir.path() / "a.pgm");
    EXPECT_THROW(
        {
            auto s = open_pgm_sequence(dir.path());
            s->next();
        },
        IoError);
}

TEST(PgmSequence, DimensionMismatchOnSecondFrame) {
    TempDir dir;
    write_pgm(ramp_frame(64, 48, 0), dir.path() / "000.pgm");
    write_pgm(ramp_frame(32, 32, 1), dir.path() / "001.pgm");
    auto stream = open_pgm_sequence(dir.path());
    ASSERT_TRUE(stream->next().has_value());
    EXPECT_THROW(stream->next(), IoError);
}

TEST(PgmSequence, MissingOrEmptyDirectory) {
    TempDir dir;
    EXPECT_THROW(open_pgm_sequence(dir.path() / "nope"), IoError);
    EXPECT_THROW(open_pgm_sequence(dir.path()), IoError);
}

TEST(PgmSequence, ReadsColourPpm) {
    TempDir dir;
    {
        std::ofstream out(dir.path() / "000.ppm", std::ios::binary);
        out << "P6\n# comment\n16 16\n255\n";
        for (int i = 0; i < 16 * 16; ++i) out.put(10).put(20).put(30);
    }
    auto stream = open_pgm_sequence(dir.path(), "*.ppm");
    auto f = stream->next();
    ASSERT_TRUE(f.has_value());
    EXPECT_EQ(f->channels, 3);
    EXPECT_EQ(f->at(5, 5, 2), 30);
}

TEST(Y4m, ReadsLumaPlane) {
    TempDir dir;
    const fs::path p = dir.path() / "clip.y4m";
    write_y4m_raw(p, 64, 48, 5, 128);
    Y4mStream stream(p);
    int n = 0;
    while (auto f = stream.next()) {
        EXPECT_EQ(f->width, 64);
        EXPECT_EQ(f->height, 48);
        EXPECT_EQ(f->channels, 1);
        for (auto v : f->pixels) ASSERT_EQ(v, 128);
        ++n;
    }
    EXPECT_EQ(n, 5);
    EXPECT_EQ(stream.bytes_consumed(), fs::file_size(p));
    EXPECT_EQ(stream.chroma_bytes_per_frame(), 2u * 32 * 24);
}

TEST(Y4m, TruncationNamesFrame) {
    TempDir dir;
    const fs::path p = dir.path() / "clip.y4m";
    write_y4m_raw(p, 64, 48, 3, 50, 100);
    Y4mStream stream(p);
    ASSERT_TRUE(stream.next());
    ASSERT_TRUE(stream.next());
    try {
        stream.next();
        FAIL() << "expected IoError";
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("frame 2"), std::string::npos) << e.what();
    }
}

TEST(Y4m, RejectsBadHeader) {
    TempDir dir;
    const fs::path p = dir.path() / "bad.y4m";
    {
        std::ofstream out(p, std::ios::binary);
        out << "NOTY4M W64 H48\n";
    }
    EXPECT_THROW(Y4mStream{p}, IoError);
    EXPECT_THROW(Y4mStream{dir.path() / "missing.y4m"}, IoError);
}

TEST(Y4m, WriterRoundTrip) {
    TempDir dir;
    std::vector<Frame> frames;
    for (int i = 0; i < 4; ++i) frames.push_back(ramp_frame(32, 24, i));
    write_y4m(frames, dir.path() / "rt.y4m");
    auto stream = open_y4m(dir.path() / "rt.y4m");
    for (int i = 0; i < 4; ++i) {
        auto f = stream->next();
        ASSERT_TRUE(f);
        EXPECT_EQ(f->pixels, frames[i].pixels);
    }
    EXPECT_FALSE(stream->next());
}

TEST(WritePgm, ExactBytes) {
    TempDir dir;
    Frame f(2, 2, 1);
    f.pixels = {0, 255, 127, 64};
    write_pgm(f, dir.path() / "tiny.pgm");
    const std::string bytes = read_bytes(dir.path() / "tiny.pgm");
    const std::string header = "P5\n2 2\n255\n";
    ASSERT_EQ(bytes.size(), header.size() + 4);
    EXPECT_EQ(bytes.substr(0, header.size()), header);
    EXPECT_EQ(static_cast<unsigned char>(bytes[header.size() + 0]), 0);
    EXPECT_EQ(static_cast<unsigned char>(bytes[header.size() + 1]), 255);
    EXPECT_EQ(static_cast<unsigned char>(bytes[header.size() + 2]), 127);
    EXPECT_EQ(static_cast<unsigned char>(bytes[header.size() + 3]), 64);
}

TEST(WritePgm, RejectsColour) {
    TempDir dir;
    EXPECT_THROW(write_pgm(Frame(16, 16, 3), dir.path() / "rgb.pgm"), ValidationError);
}

TEST(WritePgm, RandomRoundTrip) {
    TempDir dir;
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        const int w = 16 + static_cast<int>(rng() % 50);
        const int h = 16 + static_cast<int>(rng() % 50);
        Frame f(w, h, 1);
        for (auto& v : f.pixels) v = static_cast<std::uint8_t>(rng());
        const fs::path sub = dir.path() / std::to_string(trial);
        fs::create_directories(sub);
        write_pgm(f, sub / "000000.pgm");
        auto stream = open_pgm_sequence(sub);
        auto back = stream->next();
        ASSERT_TRUE(back);
        EXPECT_EQ(back->width, w);
        EXPECT_EQ(back->height, h);
        EXPECT_EQ(back->pixels, f.pixels);
    }
}

TEST(MemoryStream, StampsConsecutiveIndices) {
    std::vector<Frame> frames(3, Frame(16, 16, 1, 99));
    MemoryFrameStream stream(frames);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(stream.next()->index, i);
    EXPECT_FALSE(stream.next());
}

}  // namespace
}  // namespace doorcount
