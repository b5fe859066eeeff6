#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "volcut/commands.hpp"
#include "volcut/geometry.hpp"
#include "volcut/io.hpp"
#include "volcut/metrics.hpp"
#include "volcut/synthetic.hpp"

using namespace volcut;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str(const std::string& child = "") const {
        return (child.empty() ? path : path / child).string();
    }
};

std::string slurp_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("pnm images round-trip bit-exactly") {
    TempDir dir("volcut_pnm");
    Image img;
    img.width = 7;
    img.height = 5;
    img.channels = 1;
    Rng rng(1);
    for (int i = 0; i < 35; ++i) img.data.push_back(std::uint8_t(rng.uniform_int(256)));
    write_pnm(dir.str("a.pgm"), img);
    auto back = read_pnm(dir.str("a.pgm"));
    CHECK(back.width == img.width);
    CHECK(back.height == img.height);
    CHECK(back.data == img.data);

    Image color = img;
    color.channels = 3;
    color.data.clear();
    for (int i = 0; i < 35 * 3; ++i) color.data.push_back(std::uint8_t(rng.uniform_int(256)));
    write_pnm(dir.str("a.ppm"), color);
    auto cback = read_pnm(dir.str("a.ppm"));
    CHECK(cback.channels == 3);
    CHECK(cback.data == color.data);
}

TEST_CASE("pnm parser reports the byte offset of damage") {
    TempDir dir("volcut_pnm_bad");
    write_text_file(dir.str("bad.pgm"), "P5\n4 x\n255\n");
    try {
        read_pnm(dir.str("bad.pgm"));
        FAIL("expected parse error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("at byte 5") != std::string::npos);
    }
    write_text_file(dir.str("trunc.pgm"), "P5\n4 4\n255\nabc");
    CHECK_THROWS_AS(read_pnm(dir.str("trunc.pgm")), Error);
    write_text_file(dir.str("magic.pgm"), "P2\n1 1\n255\n0");
    CHECK_THROWS_AS(read_pnm(dir.str("magic.pgm")), Error);
}

TEST_CASE("pnm parser accepts comments") {
    TempDir dir("volcut_pnm_comment");
    std::string content = "P5\n# a comment\n2 1\n# another\n255\nab";
    write_text_file(dir.str("c.pgm"), content);
    auto img = read_pnm(dir.str("c.pgm"));
    CHECK(img.width == 2);
    CHECK(img.data == std::vector<std::uint8_t>{'a', 'b'});
}

TEST_CASE("points csv round-trips, header optional") {
    TempDir dir("volcut_csv");
    std::vector<Point2> pts = {{0.125, 0.5}, {1.0 / 3.0, 0.7071067811865476}};
    write_points_csv(dir.str("p.csv"), pts);
    auto back = read_points_csv(dir.str("p.csv"));
    REQUIRE(back.size() == 2);
    CHECK(back[0].x == pts[0].x);
    CHECK(back[1].y == pts[1].y);  // %.17g is lossless for doubles

    write_text_file(dir.str("h.csv"), "x,y\n1.5,2.5\n");
    auto with_header = read_points_csv(dir.str("h.csv"));
    REQUIRE(with_header.size() == 1);
    CHECK(with_header[0].x == 1.5);

    write_text_file(dir.str("bad.csv"), "1.5,2.5\n3.0,oops\n");
    try {
        read_points_csv(dir.str("bad.csv"));
        FAIL("expected parse error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("matches csv and boxes files parse") {
    TempDir dir("volcut_matches");
    write_text_file(dir.str("m.csv"), "1,2,3,4\n5,6,7,8\n");
    auto ms = read_matches_csv(dir.str("m.csv"));
    REQUIRE(ms.size() == 2);
    CHECK(ms[1].q.y == 8.0);

    write_text_file(dir.str("b.txt"), "outer 0 0 10 10\ninner 2 3 5 6\n");
    auto boxes = read_boxes(dir.str("b.txt"));
    CHECK(boxes.inner_x0 == 2);
    CHECK(boxes.inner_y1 == 6);
    write_text_file(dir.str("b2.txt"), "outer 0 0 10 10\n");
    CHECK_THROWS_AS(read_boxes(dir.str("b2.txt")), Error);
}

TEST_CASE("delaunay edges match a brute-force circumcircle check") {
    Rng rng(12);
    std::vector<Point2> pts;
    for (int i = 0; i < 40; ++i) pts.push_back({rng.uniform(), rng.uniform()});
    auto edges = delaunay_edges(pts);
    CHECK(edges.size() >= pts.size() - 1);
    // every Delaunay edge appears in some triangle whose circumcircle is
    // empty; verify a necessary condition instead: each point's nearest
    // neighbor must be connected to it (a classical Delaunay property)
    for (int i = 0; i < int(pts.size()); ++i) {
        int nearest = -1;
        double best = kInf;
        for (int j = 0; j < int(pts.size()); ++j) {
            if (j == i) continue;
            double d = std::hypot(pts[std::size_t(i)].x - pts[std::size_t(j)].x,
                                  pts[std::size_t(i)].y - pts[std::size_t(j)].y);
            if (d < best) {
                best = d;
                nearest = j;
            }
        }
        auto e = std::make_pair(std::min(i, nearest), std::max(i, nearest));
        CHECK(std::find(edges.begin(), edges.end(), e) != edges.end());
    }
}

TEST_CASE("collinear points fall back to the k-nearest graph") {
    std::vector<Point2> pts;
    for (int i = 0; i < 12; ++i) pts.push_back({double(i), 2.0 * i});
    CHECK_THROWS_AS(delaunay_edges(pts), Error);
    bool fallback = false;
    auto g = point_graph(pts, 5.0, &fallback);
    CHECK(fallback);
    CHECK(!g.edges.empty());
}

TEST_CASE("hungarian assignment on a known instance") {
    std::vector<std::vector<double>> cost = {{4, 1, 3}, {2, 0, 5}, {3, 2, 2}};
    auto a = hungarian(cost);
    // optimal: row0 -> col1 (1), row1 -> col0 (2), row2 -> col2 (2) = 5
    CHECK(a == std::vector<int>{1, 0, 2});
}

TEST_CASE("misclassification uses optimal label matching for K > 2") {
    Labeling s;
    s.num_labels = 3;
    s.assignments = {2, 2, 0, 0, 1, 1};
    std::vector<int> gt = {0, 0, 1, 1, 2, 2};  // a pure permutation
    CHECK(misclassification_error(s, gt) == Catch::Approx(0.0));
    gt[0] = 1;  // now one genuine mistake
    CHECK(misclassification_error(s, gt) == Catch::Approx(1.0 / 6.0));
}

TEST_CASE("synthetic generators are reproducible bit-exactly per seed") {
    auto a = make_line_dataset(7);
    auto b = make_line_dataset(7);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].x == b.points[i].x);
        CHECK(a.points[i].y == b.points[i].y);
    }
    auto c = make_line_dataset(8);
    CHECK(a.points[0].x != c.points[0].x);

    auto i1 = make_bias_image(3);
    auto i2 = make_bias_image(3);
    CHECK(i1.gray == i2.gray);
}

TEST_CASE("segment command echoes target weights and writes a reparsable mask") {
    TempDir dir("volcut_cmd_seg");
    SynthArgs synth{"bias", dir.str("in"), 11};
    cmd_synth(synth);

    SegmentArgs args;
    args.image = dir.str("in") + "/image.pgm";
    args.boxes = dir.str("in") + "/boxes.txt";
    args.gt = dir.str("in") + "/gt.pgm";
    args.out = dir.str("run");
    args.variant = "fixed-w";
    args.w = {0.96, 0.04};
    args.model = "gaussian";
    args.lambda = 0.0;
    CHECK(cmd_segment(args) == 0);

    auto report = Json::parse(slurp_file(dir.str("run") + "/report.json"));
    REQUIRE(report.contains("w"));
    CHECK(report["w"][0].get<double>() == 0.96);
    REQUIRE(report.contains("kl_target"));
    REQUIRE(report.contains("kl_uniform"));
    REQUIRE(report.contains("volumes"));
    REQUIRE(report.contains("terms"));
    REQUIRE(report.contains("iterations"));
    CHECK(report.contains("error"));

    auto mask = read_pnm(dir.str("run") + "/mask.pgm");
    CHECK(mask.width == 100);
    for (auto v : mask.data) CHECK((v == 0 || v == 1));
}

TEST_CASE("two-tone image segments with zero error") {
    TempDir dir("volcut_twotone");
    Image img;
    img.width = 20;
    img.height = 10;
    img.channels = 1;
    img.data.resize(200);
    std::vector<int> gt(200);
    for (int y = 0; y < 10; ++y)
        for (int x = 0; x < 20; ++x) {
            bool fg = x < 8;
            img.data[std::size_t(y * 20 + x)] = fg ? 40 : 200;
            gt[std::size_t(y * 20 + x)] = fg ? 1 : 0;
        }
    fs::create_directories(dir.str("in"));
    write_pnm(dir.str("in") + "/img.pgm", img);
    write_pnm(dir.str("in") + "/gt.pgm", mask_to_image(20, 10, gt));
    write_text_file(dir.str("in") + "/boxes.txt", "outer 0 0 20 10\ninner 0 0 10 10\n");

    SegmentArgs args;
    args.image = dir.str("in") + "/img.pgm";
    args.boxes = dir.str("in") + "/boxes.txt";
    args.gt = dir.str("in") + "/gt.pgm";
    args.out = dir.str("run");
    args.variant = "standard";
    args.model = "gaussian";
    args.sigma = 0.1;
    args.lambda = 1.0;
    CHECK(cmd_segment(args) == 0);
    auto report = Json::parse(slurp_file(dir.str("run") + "/report.json"));
    CHECK(report["error"].get<double>() == Catch::Approx(0.0));
}

TEST_CASE("lambda sweep reports the best value") {
    TempDir dir("volcut_sweep");
    SynthArgs synth{"bias", dir.str("in"), 5};
    cmd_synth(synth);
    SegmentArgs args;
    args.image = dir.str("in") + "/image.pgm";
    args.boxes = dir.str("in") + "/boxes.txt";
    args.gt = dir.str("in") + "/gt.pgm";
    args.out = dir.str("run");
    args.variant = "standard";
    args.model = "gaussian";
    args.lambda_sweep = {1.0, 8.0, 30.0};
    CHECK(cmd_segment(args) == 0);
    auto report = Json::parse(slurp_file(dir.str("run") + "/report.json"));
    REQUIRE(report.contains("lambda_sweep"));
    CHECK(report["lambda_sweep"].size() == 3);
    REQUIRE(report.contains("best_lambda"));
    double best_err = report["best_error"].get<double>();
    for (const auto& row : report["lambda_sweep"])
        CHECK(best_err <= row["error"].get<double>() + 1e-12);
}

TEST_CASE("fitlines on a perfect line finds one label at full accuracy") {
    TempDir dir("volcut_lines1");
    fs::create_directories(dir.str("in"));
    std::vector<Point2> pts;
    std::vector<int> gt;
    for (int i = 0; i < 40; ++i) {
        double x = 0.02 + 0.96 * i / 39.0;
        pts.push_back({x, 0.25 * x + 0.3});
        gt.push_back(0);
    }
    write_points_csv(dir.str("in") + "/p.csv", pts);

    FitLinesArgs args;
    args.points = dir.str("in") + "/p.csv";
    args.out = dir.str("run");
    args.variant = "high-order";
    args.proposals = 5;
    args.label_cost = 1.0;
    args.seed = 2;
    CHECK(cmd_fitlines(args) == 0);
    auto report = Json::parse(slurp_file(dir.str("run") + "/report.json"));
    CHECK(report["active_labels"].get<int>() == 1);
    CHECK(report["outliers"].get<int>() == 0);
    CHECK(fs::exists(dir.str("run") + "/points.svg"));
    CHECK(fs::exists(dir.str("run") + "/label_histogram.svg"));
    CHECK(fs::exists(dir.str("run") + "/label_histogram.txt"));

    // emitted assignments re-parse to the same labels
    auto rows = detail::read_csv_rows(dir.str("run") + "/assignments.csv", 3);
    REQUIRE(rows.size() == pts.size());
    for (const auto& r : rows) CHECK(int(r[2]) == rows[0][2]);
}

TEST_CASE("commands are deterministic given identical flags and seed") {
    TempDir dir("volcut_det");
    FitLinesArgs args;
    args.synthesize = true;
    args.inliers = 120;
    args.outliers = 30;
    args.proposals = 40;
    args.seed = 9;
    args.variant = "high-order";
    args.out = dir.str("run1");
    CHECK(cmd_fitlines(args) == 0);
    args.out = dir.str("run2");
    CHECK(cmd_fitlines(args) == 0);
    CHECK(slurp_file(dir.str("run1") + "/report.json") ==
          slurp_file(dir.str("run2") + "/report.json"));
    CHECK(slurp_file(dir.str("run1") + "/points.svg") ==
          slurp_file(dir.str("run2") + "/points.svg"));
}

TEST_CASE("homography fitting: identity matches give one zero-residual model") {
    TempDir dir("volcut_hom_id");
    fs::create_directories(dir.str("in"));
    Rng rng(5);
    std::string csv;
    for (int i = 0; i < 30; ++i) {
        double x = rng.uniform(0.0, 500.0), y = rng.uniform(0.0, 500.0);
        char buf[120];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", x, y, x, y);
        csv += buf;
    }
    write_text_file(dir.str("in") + "/m.csv", csv);

    FitHomographyArgs args;
    args.matches = dir.str("in") + "/m.csv";
    args.out = dir.str("run");
    args.proposals = 10;
    args.label_cost = 1.0;
    args.seed = 3;
    CHECK(cmd_fithomography(args) == 0);
    auto report = Json::parse(slurp_file(dir.str("run") + "/report.json"));
    CHECK(report["active_labels"].get<int>() == 1);
    CHECK(report["outliers"].get<int>() == 0);
}

TEST_CASE("homography volume bias: fixed W over-claims for the small plane") {
    for (std::uint64_t seed : {1ull, 2ull}) {
        TempDir dir("volcut_hom_bias" + std::to_string(seed));
        FitHomographyArgs args;
        args.synthesize = true;
        args.seed = seed;
        args.label_cost = 5.0;
        args.variant = "high-order";
        args.out = dir.str("vw");
        CHECK(cmd_fithomography(args) == 0);
        auto vw = Json::parse(slurp_file(dir.str("vw") + "/report.json"));

        args.variant = "fixed-w";
        args.label_cost = 100.0;
        args.out = dir.str("fw");
        CHECK(cmd_fithomography(args) == 0);
        auto fw = Json::parse(slurp_file(dir.str("fw") + "/report.json"));

        auto small_share = [](const Json& r) {
            auto sizes = r["top_model_sizes"];
            REQUIRE(sizes.size() >= 2);
            double a = sizes[0].get<double>(), b = sizes[1].get<double>();
            return b / (a + b);
        };
        double v_small = small_share(vw), f_small = small_share(fw);
        // variable W stays within 5 points of the true 70/30 split
        CHECK(std::abs(v_small - 0.3) < 0.05);
        // the standard (fixed W) energy shifts volume toward equality
        CHECK(f_small >= v_small);
    }
}

TEST_CASE("gamma sweep outputs per-gamma masks and a label-count table") {
    TempDir dir("volcut_gamma");
    SynthArgs synth{"regions3", dir.str("in"), 4};
    cmd_synth(synth);
    GammaSweepArgs args;
    args.image = dir.str("in") + "/image.pgm";
    args.out = dir.str("run");
    args.gammas = {0.0, 1.0};
    args.lambda = 2.0;
    CHECK(cmd_gamma_sweep(args) == 0);
    auto report = Json::parse(slurp_file(dir.str("run") + "/report.json"));
    REQUIRE(report["sweep"].size() == 2);
    CHECK(fs::exists(dir.str("run") + "/mask_gamma_0.pgm"));
    CHECK(fs::exists(dir.str("run") + "/mask_gamma_1.pgm"));
    CHECK(fs::exists(dir.str("run") + "/label_counts.txt"));
    // gamma=1 with default config is the plain high-order pipeline
    CHECK(report["sweep"][1]["gamma"].get<double>() == 1.0);
}

TEST_CASE("malformed image input exits nonzero through the command layer") {
    TempDir dir("volcut_badcmd");
    write_text_file(dir.str("bad.pgm"), "P5\nnope\n");
    SegmentArgs args;
    args.image = dir.str("bad.pgm");
    args.boxes = dir.str("missing.txt");
    CHECK_THROWS_AS(cmd_segment(args), Error);
}
