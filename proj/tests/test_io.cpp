#include <gtest/gtest.h>

#include <png.h>

#include <cmath>
#include <functional>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <unistd.h>

#include "plidar/errors.hpp"
#include "plidar/io.hpp"

using namespace plidar;
namespace fs = std::filesystem;

namespace {

class IoTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("plidar_io_" + std::to_string(::getpid()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    fs::path path(const std::string& name) const { return dir_ / name; }

    fs::path dir_;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spill(const fs::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary);
    out << bytes;
}

// Writes raw 16-bit gray samples with libpng's simplified API, independently
// of the library's writer.
void write_raw_png16(const fs::path& p, int w, int h, const std::vector<std::uint16_t>& samples) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(w);
    image.height = static_cast<png_uint_32>(h);
    image.format = PNG_FORMAT_LINEAR_Y;
    ASSERT_TRUE(png_image_write_to_file(&image, p.c_str(), 0, samples.data(), 0, nullptr));
}

void write_raw_png8(const fs::path& p, int w, int h, png_uint_32 format) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(w);
    image.height = static_cast<png_uint_32>(h);
    image.format = format;
    std::vector<std::uint8_t> px(PNG_IMAGE_SIZE(image), 7);
    ASSERT_TRUE(png_image_write_to_file(&image, p.c_str(), 0, px.data(), 0, nullptr));
}

std::string le32(float f) {
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    std::string s(4, '\0');
    for (int i = 0; i < 4; ++i) s[i] = static_cast<char>((u >> (8 * i)) & 0xff);
    return s;
}

std::string le64(std::uint64_t u) {
    std::string s(8, '\0');
    for (int i = 0; i < 8; ++i) s[i] = static_cast<char>((u >> (8 * i)) & 0xff);
    return s;
}

std::int64_t offset_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const FormatError& e) {
        return e.offset();
    }
    ADD_FAILURE() << "expected a FormatError";
    return -2;
}

// Minimal ASCII PLY parser for checking the writer's output.
struct ParsedPly {
    std::size_t declared = 0;
    std::vector<std::string> properties;
    std::vector<std::vector<double>> rows;
};

ParsedPly parse_ply(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    ParsedPly out;
    std::getline(in, line);
    EXPECT_EQ(line, "ply");
    std::getline(in, line);
    EXPECT_EQ(line, "format ascii 1.0");
    while (std::getline(in, line) && line != "end_header") {
        std::istringstream ss(line);
        std::string word;
        ss >> word;
        if (word == "element") {
            std::string name;
            ss >> name >> out.declared;
            EXPECT_EQ(name, "vertex");
        } else if (word == "property") {
            std::string type;
            std::string name;
            ss >> type >> name;
            EXPECT_EQ(type, "double");
            out.properties.push_back(name);
        }
    }
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::vector<double> row;
        double v;
        while (ss >> v) row.push_back(v);
        out.rows.push_back(row);
    }
    return out;
}

}  // namespace

TEST_F(IoTest, DepthPngStoredValuesScaleBy256) {
    write_raw_png16(path("raw.png"), 3, 1, {256, 0, 513});
    const DepthMap d = io::read_depth_png(path("raw.png"));
    ASSERT_EQ(d.width(), 3);
    EXPECT_EQ(d.at(0, 0), 1.0);
    EXPECT_EQ(d.at(1, 0), 0.0);
    EXPECT_FALSE(d.valid(1, 0));
    EXPECT_EQ(d.at(2, 0), 513.0 / 256.0);
}

TEST_F(IoTest, DepthPngRawFileRoundTripsBytePayload) {
    std::mt19937_64 rng(70);
    std::uniform_int_distribution<int> stored(0, 51200);
    std::vector<std::uint16_t> samples(37 * 11);
    for (auto& s : samples) s = static_cast<std::uint16_t>(stored(rng));
    write_raw_png16(path("raw.png"), 37, 11, samples);
    const DepthMap d = io::read_depth_png(path("raw.png"));
    io::write_depth_png(d, path("again.png"));
    const DepthMap again = io::read_depth_png(path("again.png"));
    EXPECT_EQ(again, d);
    for (std::size_t i = 0; i < samples.size(); ++i) ASSERT_EQ(d.depths()[i] * 256.0, samples[i]);
    io::write_depth_png(again, path("third.png"));
    EXPECT_EQ(slurp(path("again.png")), slurp(path("third.png")));
}

TEST_F(IoTest, DepthPngWriterRoundsAndRejectsOverflow) {
    io::write_depth_png(DepthMap(2, 1, {1.0 + 0.5 / 256.0, 2.0 + 0.49 / 256.0}), path("r.png"));
    const DepthMap d = io::read_depth_png(path("r.png"));
    EXPECT_EQ(d.at(0, 0), 257.0 / 256.0);
    EXPECT_EQ(d.at(1, 0), 2.0);
    EXPECT_THROW(io::write_depth_png(DepthMap(1, 1, {256.0}), path("x.png")), InvalidArgumentError);
    EXPECT_THROW(io::write_depth_png(DepthMap(0, 0), path("x.png")), DimensionError);
}

TEST_F(IoTest, DepthPngRejectsMalformedInput) {
    write_raw_png16(path("far.png"), 1, 1, {60000});
    EXPECT_THROW(io::read_depth_png(path("far.png")), FormatError);
    write_raw_png8(path("gray8.png"), 2, 2, PNG_FORMAT_GRAY);
    EXPECT_THROW(io::read_depth_png(path("gray8.png")), FormatError);
    write_raw_png8(path("rgb.png"), 2, 2, PNG_FORMAT_RGB);
    EXPECT_THROW(io::read_depth_png(path("rgb.png")), FormatError);
    spill(path("text.png"), "definitely not a png");
    EXPECT_EQ(offset_of([&] { io::read_depth_png(path("text.png")); }), 0);
    std::string truncated = slurp(path("far.png"));
    truncated.resize(truncated.size() / 2);
    spill(path("cut.png"), truncated);
    EXPECT_THROW(io::read_depth_png(path("cut.png")), FormatError);
    EXPECT_THROW(io::read_depth_png(path("missing.png")), IoError);
}

TEST_F(IoTest, CloudBinLayout) {
    spill(path("one.bin"), le32(1) + le32(2) + le32(3) + le32(0.5f));
    const PointCloud pc = io::read_cloud_bin(path("one.bin"));
    ASSERT_EQ(pc.size(), 1u);
    EXPECT_EQ(pc.points[0], (Point3{1, 2, 3}));
    ASSERT_EQ(pc.attribute_dim, 1u);
    EXPECT_EQ(pc.attribute(0)[0], 0.5);

    io::write_cloud_bin(pc, path("copy.bin"));
    EXPECT_EQ(slurp(path("copy.bin")), slurp(path("one.bin")));

    spill(path("empty.bin"), "");
    EXPECT_TRUE(io::read_cloud_bin(path("empty.bin")).empty());
}

TEST_F(IoTest, CloudBinWritesZeroAttributeWhenAbsent) {
    io::write_cloud_bin(PointCloud::from_points({{1, 2, 3}}), path("p.bin"));
    EXPECT_EQ(slurp(path("p.bin")), le32(1) + le32(2) + le32(3) + le32(0));
    PointCloud two;
    two.points = {{0, 0, 0}};
    two.attribute_dim = 2;
    two.attributes = {1, 2};
    EXPECT_THROW(io::write_cloud_bin(two, path("q.bin")), InvalidArgumentError);
}

TEST_F(IoTest, CloudBinRejection) {
    spill(path("cut.bin"), le32(1) + le32(2) + le32(3) + le32(4) + le32(5) + "ab");
    EXPECT_EQ(offset_of([&] { io::read_cloud_bin(path("cut.bin")); }), 16);
    spill(path("nan.bin"), le32(1) + le32(2) + le32(3) + le32(4) + le32(1) + le32(NAN) + le32(3) + le32(4));
    EXPECT_EQ(offset_of([&] { io::read_cloud_bin(path("nan.bin")); }), 20);
}

TEST_F(IoTest, SceneFlowLayout) {
    io::write_scene_flow(SceneFlow{}, path("empty.sf"));
    EXPECT_EQ(slurp(path("empty.sf")), std::string("PLSF0001") + le64(0));
    EXPECT_EQ(slurp(path("empty.sf")).size(), 16u);
    EXPECT_EQ(io::read_scene_flow(path("empty.sf")).size(), 0u);

    spill(path("one.sf"), std::string("PLSF0001") + le64(1) + le32(0.1f) + le32(0) + le32(-0.2f));
    const SceneFlow sf = io::read_scene_flow(path("one.sf"));
    ASSERT_EQ(sf.size(), 1u);
    EXPECT_EQ(sf.vectors[0], (Point3{double(0.1f), 0.0, double(-0.2f)}));
    io::write_scene_flow(sf, path("copy.sf"));
    EXPECT_EQ(slurp(path("copy.sf")), slurp(path("one.sf")));
}

TEST_F(IoTest, SceneFlowRejection) {
    spill(path("magic.sf"), std::string("PLSF0002") + le64(0));
    EXPECT_EQ(offset_of([&] { io::read_scene_flow(path("magic.sf")); }), 0);
    spill(path("count.sf"), std::string("PLSF0001") + le64(2) + le32(0) + le32(0) + le32(0));
    EXPECT_EQ(offset_of([&] { io::read_scene_flow(path("count.sf")); }), 8);
    spill(path("stub.sf"), "PLSF00");
    EXPECT_EQ(offset_of([&] { io::read_scene_flow(path("stub.sf")); }), 0);
    spill(path("short.sf"), std::string("PLSF0001\x01\x00", 10));
    EXPECT_EQ(offset_of([&] { io::read_scene_flow(path("short.sf")); }), 10);
    spill(path("inf.sf"), std::string("PLSF0001") + le64(1) + le32(0) + le32(INFINITY) + le32(0));
    EXPECT_EQ(offset_of([&] { io::read_scene_flow(path("inf.sf")); }), 20);
    EXPECT_THROW(io::write_scene_flow(SceneFlow{{{NAN, 0, 0}}}, path("bad.sf")), InvalidArgumentError);
}

TEST_F(IoTest, OpticalFlowRoundTrip) {
    OpticalFlow of(3, 2);
    of.set(2, 1, {1.5f, -0.25f});
    io::write_optical_flow(of, path("a.of"));
    const std::string bytes = slurp(path("a.of"));
    EXPECT_EQ(bytes.size(), 8u + 8u + 3u * 2u * 8u);
    EXPECT_EQ(bytes.substr(0, 8), "PLOF0001");
    EXPECT_EQ(io::read_optical_flow(path("a.of")), of);
    spill(path("bad.of"), bytes.substr(0, bytes.size() - 4));
    EXPECT_EQ(offset_of([&] { io::read_optical_flow(path("bad.of")); }), 8);
    spill(path("magic.of"), "PLSF0001" + bytes.substr(8));
    EXPECT_EQ(offset_of([&] { io::read_optical_flow(path("magic.of")); }), 0);
}

TEST_F(IoTest, PlyOutput) {
    io::write_ply(PointCloud{}, path("empty.ply"));
    const ParsedPly empty = parse_ply(path("empty.ply"));
    EXPECT_EQ(empty.declared, 0u);
    EXPECT_TRUE(empty.rows.empty());

    io::write_ply(PointCloud::from_points({{1.25, -2, 3}}), path("one.ply"));
    const ParsedPly one = parse_ply(path("one.ply"));
    ASSERT_EQ(one.rows.size(), 1u);
    EXPECT_EQ(one.rows[0], (std::vector<double>{1.25, -2, 3}));

    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> c(-80.0, 80.0);
    PointCloud pc;
    pc.attribute_dim = 1;
    for (int i = 0; i < 500; ++i) {
        pc.points.push_back({c(rng), c(rng), c(rng)});
        pc.attributes.push_back(c(rng));
    }
    io::write_ply(pc, path("many.ply"));
    const ParsedPly many = parse_ply(path("many.ply"));
    EXPECT_EQ(many.properties, (std::vector<std::string>{"x", "y", "z", "scalar"}));
    ASSERT_EQ(many.rows.size(), pc.size());
    for (std::size_t i = 0; i < pc.size(); ++i) {
        ASSERT_EQ(many.rows[i].size(), 4u);
        EXPECT_NEAR(many.rows[i][0], pc.points[i].x, 1e-6);
        EXPECT_NEAR(many.rows[i][1], pc.points[i].y, 1e-6);
        EXPECT_NEAR(many.rows[i][2], pc.points[i].z, 1e-6);
        EXPECT_NEAR(many.rows[i][3], pc.attributes[i], 1e-6);
    }
}

TEST_F(IoTest, IntrinsicsParse) {
    spill(path("k.txt"), "# KITTI camera\nfu 721.5377\nfv 721.5377  # same\n\ncu 609.5593\ncv 172.854\n");
    const CameraIntrinsics k = io::read_intrinsics(path("k.txt"));
    EXPECT_EQ(k.fu(), 721.5377);
    EXPECT_EQ(k.fv(), 721.5377);
    EXPECT_EQ(k.cu(), 609.5593);
    EXPECT_EQ(k.cv(), 172.854);

    io::write_intrinsics(CameraIntrinsics(1.0 / 3.0, 2.0, -1.5, 0.1), path("w.txt"));
    const CameraIntrinsics back = io::read_intrinsics(path("w.txt"));
    EXPECT_EQ(back.fu(), 1.0 / 3.0);
    EXPECT_EQ(back.cv(), 0.1);
}

TEST_F(IoTest, IntrinsicsRejection) {
    spill(path("missing.txt"), "fu 1\ncu 1\ncv 1\n");
    EXPECT_THROW(io::read_intrinsics(path("missing.txt")), FormatError);
    spill(path("dup.txt"), "fu 1\nfv 1\ncu 1\ncv 1\nfu 2\n");
    EXPECT_EQ(offset_of([&] { io::read_intrinsics(path("dup.txt")); }), 20);
    spill(path("unknown.txt"), "fu 1\nfx 1\n");
    EXPECT_EQ(offset_of([&] { io::read_intrinsics(path("unknown.txt")); }), 5);
    spill(path("junk.txt"), "fu one\n");
    EXPECT_EQ(offset_of([&] { io::read_intrinsics(path("junk.txt")); }), 0);
    spill(path("neg.txt"), "fu -1\nfv 1\ncu 1\ncv 1\n");
    EXPECT_THROW(io::read_intrinsics(path("neg.txt")), FormatError);
    EXPECT_THROW(io::read_intrinsics(path("nope.txt")), IoError);
}

TEST_F(IoTest, FileFlowProvider) {
    const PointCloud pc = PointCloud::from_points({{0, 0, 1}, {1, 1, 2}});
    io::write_scene_flow(SceneFlow{{{0, 0, 1}, {0, 0, 1}}}, path("f.sf"));
    const io::FileFlowProvider provider(path("f.sf"), "");
    EXPECT_EQ(provider.flow(FlowDirection::Forward, pc, pc).vectors[1], (Point3{0, 0, 1}));
    EXPECT_THROW(provider.flow(FlowDirection::Backward, pc, pc), InvalidArgumentError);
    EXPECT_THROW(provider.flow(FlowDirection::Forward, PointCloud::from_points({{0, 0, 1}}), pc), SizeMismatchError);
}

TEST_F(IoTest, RandomBinaryRoundTripsAreByteIdentical) {
    std::mt19937_64 rng(72);
    std::uniform_int_distribution<int> dim(1, 64);
    std::uniform_int_distribution<int> stored(0, 51200);
    std::uniform_int_distribution<std::uint32_t> bits;
    for (int i = 0; i < 30; ++i) {
        const int w = dim(rng);
        const int h = dim(rng);
        std::vector<std::uint16_t> samples(static_cast<std::size_t>(w * h));
        for (auto& s : samples) s = static_cast<std::uint16_t>(stored(rng));
        write_raw_png16(path("raw.png"), w, h, samples);
        io::write_depth_png(io::read_depth_png(path("raw.png")), path("a.png"));
        io::write_depth_png(io::read_depth_png(path("a.png")), path("b.png"));
        EXPECT_EQ(slurp(path("a.png")), slurp(path("b.png")));

        // Arbitrary finite float bit patterns, including subnormals and -0.
        std::string records;
        const int floats = 4 * dim(rng);
        for (int r = 0; r < floats; ++r) {
            std::uint32_t u;
            do {
                u = bits(rng);
            } while (((u >> 23) & 0xff) == 0xff);
            float f;
            std::memcpy(&f, &u, 4);
            records += le32(f);
        }
        spill(path("raw.bin"), records);
        io::write_cloud_bin(io::read_cloud_bin(path("raw.bin")), path("a.bin"));
        EXPECT_EQ(slurp(path("a.bin")), records);

        std::string flow = std::string("PLSF0001") + le64(records.size() / 16 * 4 / 3);
        flow += records.substr(0, records.size() / 16 * 4 / 3 * 12);
        spill(path("raw.sf"), flow);
        io::write_scene_flow(io::read_scene_flow(path("raw.sf")), path("a.sf"));
        EXPECT_EQ(slurp(path("a.sf")), flow);
    }
}
