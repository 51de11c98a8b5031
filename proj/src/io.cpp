#include "plidar/io.hpp"

#include <png.h>

#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <vector>

#include "plidar/errors.hpp"

namespace plidar::io {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IoError("read failed: " + path.string());
    }
    return bytes;
}

void write_file(const std::filesystem::path& path, const std::vector<unsigned char>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

template <typename T>
void put_le(std::vector<unsigned char>& buf, T value) {
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    const U bits = std::bit_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        buf.push_back(static_cast<unsigned char>(bits >> (8 * i)));
    }
}

template <typename T>
T get_le(const std::vector<unsigned char>& buf, std::size_t offset) {
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        bits |= static_cast<U>(buf[offset + i]) << (8 * i);
    }
    return std::bit_cast<T>(bits);
}

float checked_float(const std::vector<unsigned char>& buf, std::size_t offset, const std::filesystem::path& path) {
    const float f = get_le<float>(buf, offset);
    if (!std::isfinite(f)) {
        throw FormatError(path.string(), static_cast<std::int64_t>(offset), "non-finite value");
    }
    return f;
}

void check_magic(const std::vector<unsigned char>& bytes, std::string_view magic, const std::filesystem::path& path) {
    if (bytes.size() < magic.size() || std::memcmp(bytes.data(), magic.data(), magic.size()) != 0) {
        throw FormatError(path.string(), 0, "bad magic, expected " + std::string(magic));
    }
}

// libpng reports errors by longjmp; no object with a destructor may live in
// the frames between setjmp and the error callback.
struct PngReadState {
    const char* error = nullptr;
    png_uint_32 width = 0;
    png_uint_32 height = 0;
    int bit_depth = 0;
    int color_type = 0;
};

void png_error_fn(png_structp png, png_const_charp msg) {
    auto* state = static_cast<const char**>(png_get_error_ptr(png));
    *state = msg;
    png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

bool png_read_header(png_structp png, png_infop info, PngReadState& st) {
    if (setjmp(png_jmpbuf(png))) {
        return false;
    }
    png_read_info(png, info);
    png_get_IHDR(png, info, &st.width, &st.height, &st.bit_depth, &st.color_type, nullptr, nullptr, nullptr);
    return true;
}

bool png_read_rows(png_structp png, png_infop info, png_bytepp rows) {
    if (setjmp(png_jmpbuf(png))) {
        return false;
    }
    png_set_interlace_handling(png);
    png_read_update_info(png, info);
    png_read_image(png, rows);
    png_read_end(png, nullptr);
    return true;
}

bool png_write_all(png_structp png, png_infop info, png_uint_32 width, png_uint_32 height, png_bytepp rows) {
    if (setjmp(png_jmpbuf(png))) {
        return false;
    }
    png_set_IHDR(png, info, width, height, 16, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows);
    png_write_end(png, nullptr);
    return true;
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

DepthMap read_depth_png(const std::filesystem::path& path) {
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file) {
        throw IoError("cannot open " + path.string());
    }
    unsigned char sig[8] = {};
    if (std::fread(sig, 1, sizeof sig, file.get()) != sizeof sig || png_sig_cmp(sig, 0, sizeof sig) != 0) {
        throw FormatError(path.string(), 0, "not a PNG file");
    }
    PngReadState st;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &st.error, png_error_fn, png_warning_fn);
    if (!png) {
        throw Error("png_create_read_struct failed");
    }
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw Error("png_create_info_struct failed");
    }
    png_init_io(png, file.get());
    png_set_sig_bytes(png, sizeof sig);

    if (!png_read_header(png, info, st)) {
        const std::string msg = st.error ? st.error : "unknown libpng error";
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError(path.string(), -1, msg);
    }
    if (st.bit_depth != 16 || st.color_type != PNG_COLOR_TYPE_GRAY) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError(path.string(), -1, "expected a 16-bit single-channel image (bit depth " +
                                                 std::to_string(st.bit_depth) + ", color type " +
                                                 std::to_string(st.color_type) + ")");
    }
    const std::size_t row_bytes = static_cast<std::size_t>(st.width) * 2;
    std::vector<unsigned char> pixels(row_bytes * st.height);
    std::vector<png_bytep> rows(st.height);
    for (png_uint_32 r = 0; r < st.height; ++r) {
        rows[r] = pixels.data() + r * row_bytes;
    }
    if (!png_read_rows(png, info, rows.data())) {
        const std::string msg = st.error ? st.error : "unknown libpng error";
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError(path.string(), -1, msg);
    }
    png_destroy_read_struct(&png, &info, nullptr);

    const int width = static_cast<int>(st.width);
    const int height = static_cast<int>(st.height);
    std::vector<double> depths(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
    for (std::size_t i = 0; i < depths.size(); ++i) {
        // PNG samples are big-endian.
        const unsigned stored = (static_cast<unsigned>(pixels[2 * i]) << 8) | pixels[2 * i + 1];
        const double d = stored / kDepthScale;
        if (d > kMaxDepth) {
            throw FormatError(path.string(), -1,
                              "depth " + std::to_string(d) + " m at pixel (" + std::to_string(i % st.width) + ", " +
                                  std::to_string(i / st.width) + ") exceeds " + std::to_string(kMaxDepth) + " m");
        }
        depths[i] = d;
    }
    return DepthMap(width, height, std::move(depths));
}

void write_depth_png(const DepthMap& depth, const std::filesystem::path& path) {
    if (depth.width() <= 0 || depth.height() <= 0) {
        throw DimensionError("cannot write an empty depth image");
    }
    const std::size_t row_bytes = static_cast<std::size_t>(depth.width()) * 2;
    std::vector<unsigned char> pixels(row_bytes * static_cast<std::size_t>(depth.height()));
    const auto d = depth.depths();
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double stored = std::floor(d[i] * kDepthScale + 0.5);
        if (stored > 65535.0) {
            throw InvalidArgumentError("depth " + std::to_string(d[i]) + " m exceeds the 16-bit range");
        }
        const auto s = static_cast<unsigned>(stored);
        pixels[2 * i] = static_cast<unsigned char>(s >> 8);
        pixels[2 * i + 1] = static_cast<unsigned char>(s & 0xFF);
    }
    std::vector<png_bytep> rows(static_cast<std::size_t>(depth.height()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        rows[r] = pixels.data() + r * row_bytes;
    }

    FilePtr file(std::fopen(path.c_str(), "wb"));
    if (!file) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    const char* error = nullptr;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, png_error_fn, png_warning_fn);
    if (!png) {
        throw Error("png_create_write_struct failed");
    }
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error("png_create_info_struct failed");
    }
    png_init_io(png, file.get());
    const bool ok = png_write_all(png, info, static_cast<png_uint_32>(depth.width()),
                                  static_cast<png_uint_32>(depth.height()), rows.data());
    png_destroy_write_struct(&png, &info);
    if (!ok) {
        throw IoError(path.string() + ": " + (error ? error : "unknown libpng error"));
    }
    if (std::fflush(file.get()) != 0) {
        throw IoError("write failed: " + path.string());
    }
}

PointCloud read_cloud_bin(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    constexpr std::size_t kRecord = 16;
    if (bytes.size() % kRecord != 0) {
        throw FormatError(path.string(), static_cast<std::int64_t>(bytes.size() - bytes.size() % kRecord),
                          "truncated record (file length " + std::to_string(bytes.size()) +
                              " is not a multiple of 16)");
    }
    const std::size_t n = bytes.size() / kRecord;
    PointCloud pc;
    pc.attribute_dim = 1;
    pc.points.reserve(n);
    pc.attributes.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t off = i * kRecord;
        pc.points.push_back({checked_float(bytes, off, path), checked_float(bytes, off + 4, path),
                             checked_float(bytes, off + 8, path)});
        pc.attributes.push_back(checked_float(bytes, off + 12, path));
    }
    return pc;
}

void write_cloud_bin(const PointCloud& pc, const std::filesystem::path& path) {
    pc.validate();
    if (pc.attribute_dim > 1) {
        throw InvalidArgumentError("binary clouds carry at most one attribute per point");
    }
    std::vector<unsigned char> buf;
    buf.reserve(pc.size() * 16);
    for (std::size_t i = 0; i < pc.size(); ++i) {
        const Point3& p = pc.points[i];
        put_le(buf, static_cast<float>(p.x));
        put_le(buf, static_cast<float>(p.y));
        put_le(buf, static_cast<float>(p.z));
        put_le(buf, pc.has_attributes() ? static_cast<float>(pc.attributes[i]) : 0.0f);
    }
    write_file(path, buf);
}

SceneFlow read_scene_flow(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    check_magic(bytes, kSceneFlowMagic, path);
    constexpr std::size_t kHeader = 16;
    if (bytes.size() < kHeader) {
        throw FormatError(path.string(), static_cast<std::int64_t>(bytes.size()), "truncated header");
    }
    const auto n = get_le<std::uint64_t>(bytes, 8);
    const std::uint64_t payload = bytes.size() - kHeader;
    if (n > payload / 12 || payload != n * 12) {
        throw FormatError(path.string(), 8,
                          "count " + std::to_string(n) + " does not match " + std::to_string(payload) +
                              " payload bytes");
    }
    SceneFlow sf;
    sf.vectors.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const std::size_t off = kHeader + i * 12;
        sf.vectors.push_back({checked_float(bytes, off, path), checked_float(bytes, off + 4, path),
                              checked_float(bytes, off + 8, path)});
    }
    return sf;
}

void write_scene_flow(const SceneFlow& sf, const std::filesystem::path& path) {
    std::vector<unsigned char> buf(kSceneFlowMagic.begin(), kSceneFlowMagic.end());
    buf.reserve(16 + sf.size() * 12);
    put_le(buf, static_cast<std::uint64_t>(sf.size()));
    for (const auto& v : sf.vectors) {
        if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z)) {
            throw InvalidArgumentError("scene flow components must be finite");
        }
        put_le(buf, static_cast<float>(v.x));
        put_le(buf, static_cast<float>(v.y));
        put_le(buf, static_cast<float>(v.z));
    }
    write_file(path, buf);
}

OpticalFlow read_optical_flow(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    check_magic(bytes, kOpticalFlowMagic, path);
    constexpr std::size_t kHeader = 16;
    if (bytes.size() < kHeader) {
        throw FormatError(path.string(), static_cast<std::int64_t>(bytes.size()), "truncated header");
    }
    const auto w = get_le<std::uint32_t>(bytes, 8);
    const auto h = get_le<std::uint32_t>(bytes, 12);
    const std::uint64_t expected = static_cast<std::uint64_t>(w) * h * 8;
    if (w > static_cast<std::uint32_t>(std::numeric_limits<int>::max()) ||
        h > static_cast<std::uint32_t>(std::numeric_limits<int>::max()) || bytes.size() - kHeader != expected) {
        throw FormatError(path.string(), 8,
                          std::to_string(w) + "x" + std::to_string(h) + " flow does not match " +
                              std::to_string(bytes.size() - kHeader) + " payload bytes");
    }
    std::vector<PixelFlow> vectors;
    vectors.reserve(static_cast<std::size_t>(w) * h);
    for (std::size_t i = 0; i < static_cast<std::size_t>(w) * h; ++i) {
        const std::size_t off = kHeader + i * 8;
        vectors.push_back({checked_float(bytes, off, path), checked_float(bytes, off + 4, path)});
    }
    return OpticalFlow(static_cast<int>(w), static_cast<int>(h), std::move(vectors));
}

void write_optical_flow(const OpticalFlow& of, const std::filesystem::path& path) {
    std::vector<unsigned char> buf(kOpticalFlowMagic.begin(), kOpticalFlowMagic.end());
    buf.reserve(16 + of.vectors().size() * 8);
    put_le(buf, static_cast<std::uint32_t>(of.width()));
    put_le(buf, static_cast<std::uint32_t>(of.height()));
    for (const auto& f : of.vectors()) {
        put_le(buf, static_cast<float>(f.du));
        put_le(buf, static_cast<float>(f.dv));
    }
    write_file(path, buf);
}

void write_ply(const PointCloud& pc, const std::filesystem::path& path) {
    pc.validate();
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << "ply\nformat ascii 1.0\ncomment pseudo-LiDAR point cloud\n";
    out << "element vertex " << pc.size() << "\n";
    out << "property double x\nproperty double y\nproperty double z\n";
    if (pc.attribute_dim == 1) {
        out << "property double scalar\n";
    } else {
        for (std::size_t a = 0; a < pc.attribute_dim; ++a) {
            out << "property double scalar_" << a << "\n";
        }
    }
    out << "end_header\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < pc.size(); ++i) {
        const Point3& p = pc.points[i];
        out << p.x << ' ' << p.y << ' ' << p.z;
        for (double v : pc.attribute(i)) {
            out << ' ' << v;
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

CameraIntrinsics read_intrinsics(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::map<std::string, double> values;
    std::string line;
    std::int64_t offset = 0;
    while (std::getline(in, line)) {
        const std::int64_t line_offset = offset;
        offset += static_cast<std::int64_t>(line.size()) + 1;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream ss(line);
        std::string key;
        if (!(ss >> key)) {
            continue;
        }
        double v = 0.0;
        std::string rest;
        if (!(ss >> v) || (ss >> rest)) {
            throw FormatError(path.string(), line_offset, "expected '<key> <number>'");
        }
        if (key != "fu" && key != "fv" && key != "cu" && key != "cv") {
            throw FormatError(path.string(), line_offset, "unknown key '" + key + "'");
        }
        if (!values.emplace(key, v).second) {
            throw FormatError(path.string(), line_offset, "duplicate key '" + key + "'");
        }
    }
    for (const char* key : {"fu", "fv", "cu", "cv"}) {
        if (!values.contains(key)) {
            throw FormatError(path.string(), -1, std::string("missing key '") + key + "'");
        }
    }
    if (!(values["fu"] > 0.0) || !(values["fv"] > 0.0)) {
        throw FormatError(path.string(), -1, "focal lengths must be positive");
    }
    return {values["fu"], values["fv"], values["cu"], values["cv"]};
}

void write_intrinsics(const CameraIntrinsics& k, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << std::setprecision(17) << "fu " << k.fu() << "\nfv " << k.fv() << "\ncu " << k.cu() << "\ncv " << k.cv()
        << "\n";
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

SceneFlow FileFlowProvider::flow(FlowDirection direction, const PointCloud& source, const PointCloud&) const {
    const auto& path = direction == FlowDirection::Forward ? forward_ : backward_;
    if (path.empty()) {
        throw InvalidArgumentError(std::string("no ") + (direction == FlowDirection::Forward ? "forward" : "backward") +
                                   " flow file configured");
    }
    SceneFlow sf = read_scene_flow(path);
    sf.validate_for(source);
    return sf;
}

}  // namespace plidar::io
