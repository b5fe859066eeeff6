#ifndef VOLCUT_IO_HPP
#define VOLCUT_IO_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "volcut/common.hpp"
#include "volcut/models.hpp"

namespace volcut {

using Json = nlohmann::ordered_json;

struct Image {
    int width = 0, height = 0;
    int channels = 1;                 // 1 = PGM, 3 = PPM
    std::vector<std::uint8_t> data;  // row-major, interleaved

    std::size_t pixels() const { return std::size_t(width) * std::size_t(height); }
};

namespace detail {

class PnmReader {
  public:
    PnmReader(std::string bytes, std::string path)
        : bytes_(std::move(bytes)), path_(std::move(path)) {}

    [[noreturn]] void fail(const std::string& what) const {
        throw Error(Errc::BadInput,
                    path_ + ": " + what + " at byte " + std::to_string(pos_));
    }

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            char c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                ++pos_;
            } else {
                break;
            }
        }
    }

    int read_int() {
        skip_space_and_comments();
        if (pos_ >= bytes_.size() || bytes_[pos_] < '0' || bytes_[pos_] > '9')
            fail("expected an unsigned integer");
        long v = 0;
        while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
            v = v * 10 + (bytes_[pos_] - '0');
            if (v > 1 << 30) fail("integer out of range");
            ++pos_;
        }
        return int(v);
    }

    std::string_view take(std::size_t n) {
        if (pos_ + n > bytes_.size()) fail("unexpected end of file");
        std::string_view s(bytes_.data() + pos_, n);
        pos_ += n;
        return s;
    }

    char peek() const { return pos_ < bytes_.size() ? bytes_[pos_] : '\0'; }
    void advance() { ++pos_; }
    std::size_t pos() const { return pos_; }

  private:
    std::string bytes_;
    std::string path_;
    std::size_t pos_ = 0;
};

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::BadInput, path + ": cannot open for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace detail

/// Binary PGM (P5) and PPM (P6), maxval up to 255. Malformed input reports
/// the byte offset of the problem.
inline Image read_pnm(const std::string& path) {
    detail::PnmReader r(detail::slurp(path), path);
    auto magic = r.take(2);
    int channels;
    if (magic == "P5") channels = 1;
    else if (magic == "P6") channels = 3;
    else r.fail("not a binary PGM/PPM (expected P5 or P6)");

    Image img;
    img.channels = channels;
    img.width = r.read_int();
    img.height = r.read_int();
    int maxval = r.read_int();
    if (img.width < 1 || img.height < 1) r.fail("bad dimensions");
    if (maxval < 1 || maxval > 255) r.fail("unsupported maxval (must be 1..255)");
    if (r.peek() != '\n' && r.peek() != ' ' && r.peek() != '\t' && r.peek() != '\r')
        r.fail("missing whitespace after maxval");
    r.advance();

    std::size_t n = img.pixels() * std::size_t(channels);
    auto raster = r.take(n);
    img.data.assign(raster.begin(), raster.end());
    return img;
}

inline void write_pnm(const std::string& path, const Image& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::BadInput, path + ": cannot open for writing");
    out << (img.channels == 1 ? "P5" : "P6") << "\n"
        << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data.data()), std::streamsize(img.data.size()));
}

inline Image mask_to_image(int width, int height, std::span<const int> labels) {
    Image img;
    img.width = width;
    img.height = height;
    img.channels = 1;
    img.data.resize(std::size_t(width) * std::size_t(height));
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        int l = labels[i];
        img.data[i] = l == kOutlier ? 255 : std::uint8_t(l);
    }
    return img;
}

// ---------------------------------------------------------------------------
// CSV points and matches

namespace detail {

inline std::vector<std::vector<double>> read_csv_rows(const std::string& path, int columns) {
    std::string bytes = slurp(path);
    std::vector<std::vector<double>> rows;
    std::size_t pos = 0, line_no = 0;
    while (pos < bytes.size()) {
        std::size_t eol = bytes.find('\n', pos);
        if (eol == std::string::npos) eol = bytes.size();
        std::string line = bytes.substr(pos, eol - pos);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        ++line_no;
        std::size_t line_start = pos;
        pos = eol + 1;
        if (line.empty()) continue;

        std::vector<double> vals;
        std::size_t field_start = 0;
        bool ok = true;
        for (std::size_t i = 0; i <= line.size() && ok; ++i) {
            if (i == line.size() || line[i] == ',') {
                std::string field = line.substr(field_start, i - field_start);
                try {
                    std::size_t used = 0;
                    double v = std::stod(field, &used);
                    while (used < field.size() &&
                           (field[used] == ' ' || field[used] == '\t'))
                        ++used;
                    if (used != field.size()) ok = false;
                    else vals.push_back(v);
                } catch (...) {
                    ok = false;
                }
                field_start = i + 1;
            }
        }
        if (!ok) {
            if (line_no == 1 && rows.empty()) continue;  // header line
            throw Error(Errc::BadInput, path + ": malformed CSV at line " +
                                            std::to_string(line_no) + " (byte " +
                                            std::to_string(line_start) + ")");
        }
        if (int(vals.size()) != columns)
            throw Error(Errc::BadInput, path + ": expected " + std::to_string(columns) +
                                            " columns at line " + std::to_string(line_no) +
                                            " (byte " + std::to_string(line_start) + ")");
        rows.push_back(std::move(vals));
    }
    return rows;
}

}  // namespace detail

inline std::vector<Point2> read_points_csv(const std::string& path) {
    std::vector<Point2> pts;
    for (const auto& row : detail::read_csv_rows(path, 2)) pts.push_back({row[0], row[1]});
    if (pts.empty()) throw Error(Errc::BadInput, path + ": no points");
    return pts;
}

inline std::vector<MatchPair> read_matches_csv(const std::string& path) {
    std::vector<MatchPair> ms;
    for (const auto& row : detail::read_csv_rows(path, 4))
        ms.push_back({{row[0], row[1]}, {row[2], row[3]}});
    if (ms.empty()) throw Error(Errc::BadInput, path + ": no matches");
    return ms;
}

inline void write_points_csv(const std::string& path, std::span<const Point2> pts,
                             std::span<const int> labels = {}) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::BadInput, path + ": cannot open for writing");
    char buf[128];
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (labels.empty()) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", pts[i].x, pts[i].y);
        } else {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", pts[i].x, pts[i].y, labels[i]);
        }
        out << buf;
    }
}

struct BoxPair {
    // half-open pixel boxes [x0, x1) x [y0, y1)
    int outer_x0 = 0, outer_y0 = 0, outer_x1 = 0, outer_y1 = 0;
    int inner_x0 = 0, inner_y0 = 0, inner_x1 = 0, inner_y1 = 0;
};

/// Text format, one box per line: `outer x0 y0 x1 y1` / `inner x0 y0 x1 y1`.
inline BoxPair read_boxes(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::BadInput, path + ": cannot open for reading");
    BoxPair boxes;
    bool have_outer = false, have_inner = false;
    std::string kind;
    while (in >> kind) {
        int x0, y0, x1, y1;
        if (!(in >> x0 >> y0 >> x1 >> y1))
            throw Error(Errc::BadInput, path + ": malformed box line '" + kind + "'");
        if (kind == "outer") {
            boxes.outer_x0 = x0;
            boxes.outer_y0 = y0;
            boxes.outer_x1 = x1;
            boxes.outer_y1 = y1;
            have_outer = true;
        } else if (kind == "inner") {
            boxes.inner_x0 = x0;
            boxes.inner_y0 = y0;
            boxes.inner_x1 = x1;
            boxes.inner_y1 = y1;
            have_inner = true;
        } else {
            throw Error(Errc::BadInput, path + ": unknown box kind '" + kind + "'");
        }
    }
    if (!have_outer || !have_inner)
        throw Error(Errc::BadInput, path + ": need both 'outer' and 'inner' boxes");
    return boxes;
}

// ---------------------------------------------------------------------------
// SVG emission (deterministic element order)

inline const char* svg_palette(int label) {
    static const char* colors[] = {"#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00",
                                   "#a65628", "#f781bf", "#17becf", "#bcbd22", "#999999"};
    if (label == kOutlier) return "#000000";
    return colors[label % 10];
}

inline void write_scatter_svg(const std::string& path, std::span<const Point2> pts,
                              std::span<const int> labels, double world = 1.0) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::BadInput, path + ": cannot open for writing");
    const int size = 640;
    double s = size / world;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << size
        << "\" height=\"" << size << "\">\n";
    out << "<rect width=\"" << size << "\" height=\"" << size << "\" fill=\"white\"/>\n";
    char buf[160];
    for (std::size_t i = 0; i < pts.size(); ++i) {
        std::snprintf(buf, sizeof buf,
                      "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n",
                      pts[i].x * s, size - pts[i].y * s, svg_palette(labels[i]));
        out << buf;
    }
    out << "</svg>\n";
}

inline void write_histogram_svg(const std::string& path,
                                const std::vector<std::pair<std::string, long long>>& bars) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::BadInput, path + ": cannot open for writing");
    const int w = 640, h = 360, margin = 40;
    long long peak = 1;
    for (const auto& b : bars) peak = std::max(peak, b.second);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << w
        << "\" height=\"" << h << "\">\n";
    out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
    double bw = bars.empty() ? 0 : double(w - 2 * margin) / double(bars.size());
    char buf[256];
    for (std::size_t i = 0; i < bars.size(); ++i) {
        double bh = double(bars[i].second) / double(peak) * (h - 2 * margin);
        std::snprintf(buf, sizeof buf,
                      "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
                      "fill=\"#377eb8\"/>\n",
                      margin + double(i) * bw + 1.0, h - margin - bh, bw - 2.0, bh);
        out << buf;
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.2f\" y=\"%d\" font-size=\"12\" text-anchor=\"middle\">%s"
                      "</text>\n",
                      margin + (double(i) + 0.5) * bw, h - margin + 16, bars[i].first.c_str());
        out << buf;
    }
    out << "</svg>\n";
}

// ---------------------------------------------------------------------------
// Reports

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::BadInput, path + ": cannot open for writing");
    out << content;
}

inline void write_json_report(const std::string& path, const Json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

/// key=value lines, one per entry, in insertion order.
inline std::string to_key_value_lines(const Json& j) {
    std::string out;
    for (auto it = j.begin(); it != j.end(); ++it) {
        out += it.key();
        out += "=";
        if (it.value().is_string()) out += it.value().get<std::string>();
        else out += it.value().dump();
        out += "\n";
    }
    return out;
}

}  // namespace volcut

#endif  // VOLCUT_IO_HPP
