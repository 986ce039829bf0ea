#include "wikinli/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "wikinli/errors.hpp"

namespace wikinli {

namespace {

std::string fmt(double v, const char* spec = "%.6f") {
    char buf[40];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

}  // namespace

std::string learning_curve_csv(const std::vector<CurveRow>& rows) {
    std::string csv = "fraction,train_acc,dev_acc,test_acc\n";
    for (const CurveRow& r : rows) {
        csv += fmt(r.fraction) + "," + fmt(r.train_acc) + "," + fmt(r.dev_acc) + "," +
               fmt(r.test_acc) + "\n";
    }
    return csv;
}

std::vector<CurveRow> parse_learning_curve_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw DataError("cannot open learning curve csv: " + file.string());
    std::vector<CurveRow> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (first) {
            first = false;
            continue;  // header
        }
        if (line.empty()) continue;
        CurveRow r;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &r.fraction, &r.train_acc, &r.dev_acc,
                        &r.test_acc) != 4) {
            throw DataError("malformed curve row in " + file.string() + ": " + line);
        }
        rows.push_back(r);
    }
    return rows;
}

std::string learning_curve_svg(const std::vector<CurveRow>& rows) {
    constexpr double kW = 640, kH = 440;
    constexpr double kLeft = 64, kRight = 24, kTop = 32, kBottom = 56;
    const double plot_w = kW - kLeft - kRight;
    const double plot_h = kH - kTop - kBottom;

    auto sx = [&](double fraction) { return kLeft + fraction * plot_w; };
    auto sy = [&](double acc) { return kTop + (1.0 - acc) * plot_h; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
        << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
    svg << "  <rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";

    // axes and gridlines at 0.0 .. 1.0 step 0.2
    for (int i = 0; i <= 5; ++i) {
        const double v = i / 5.0;
        svg << "  <line x1=\"" << fmt(sx(0), "%.1f") << "\" y1=\"" << fmt(sy(v), "%.1f")
            << "\" x2=\"" << fmt(sx(1), "%.1f") << "\" y2=\"" << fmt(sy(v), "%.1f")
            << "\" stroke=\"#dddddd\"/>\n";
        svg << "  <text x=\"" << fmt(sx(0) - 10, "%.1f") << "\" y=\"" << fmt(sy(v) + 4, "%.1f")
            << "\" font-size=\"12\" text-anchor=\"end\">" << fmt(v, "%.1f") << "</text>\n";
        svg << "  <text x=\"" << fmt(sx(v), "%.1f") << "\" y=\"" << fmt(sy(0) + 20, "%.1f")
            << "\" font-size=\"12\" text-anchor=\"middle\">" << fmt(v, "%.1f") << "</text>\n";
    }
    svg << "  <line x1=\"" << fmt(sx(0), "%.1f") << "\" y1=\"" << fmt(sy(0), "%.1f") << "\" x2=\""
        << fmt(sx(1), "%.1f") << "\" y2=\"" << fmt(sy(0), "%.1f") << "\" stroke=\"black\"/>\n";
    svg << "  <line x1=\"" << fmt(sx(0), "%.1f") << "\" y1=\"" << fmt(sy(0), "%.1f") << "\" x2=\""
        << fmt(sx(0), "%.1f") << "\" y2=\"" << fmt(sy(1), "%.1f") << "\" stroke=\"black\"/>\n";
    svg << "  <text x=\"" << fmt(kLeft + plot_w / 2, "%.1f") << "\" y=\"" << fmt(kH - 12, "%.1f")
        << "\" font-size=\"14\" text-anchor=\"middle\">training fraction</text>\n";
    svg << "  <text x=\"16\" y=\"" << fmt(kTop + plot_h / 2, "%.1f")
        << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << fmt(kTop + plot_h / 2, "%.1f") << ")\">accuracy</text>\n";

    struct Series {
        const char* name;
        const char* color;
        double CurveRow::*field;
    };
    const Series series[] = {
        {"train", "#d62728", &CurveRow::train_acc},
        {"dev", "#2ca02c", &CurveRow::dev_acc},
        {"test", "#1f77b4", &CurveRow::test_acc},
    };

    for (const Series& s : series) {
        if (rows.size() > 1) {
            svg << "  <polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
            for (size_t i = 0; i < rows.size(); ++i) {
                if (i) svg << ' ';
                svg << fmt(sx(rows[i].fraction), "%.2f") << ',' << fmt(sy(rows[i].*(s.field)), "%.2f");
            }
            svg << "\"/>\n";
        }
        for (const CurveRow& r : rows) {
            svg << "  <circle cx=\"" << fmt(sx(r.fraction), "%.2f") << "\" cy=\""
                << fmt(sy(r.*(s.field)), "%.2f") << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
        }
    }

    double legend_y = kTop + 8;
    for (const Series& s : series) {
        svg << "  <rect x=\"" << fmt(kLeft + 12, "%.1f") << "\" y=\"" << fmt(legend_y - 8, "%.1f")
            << "\" width=\"12\" height=\"12\" fill=\"" << s.color << "\"/>\n";
        svg << "  <text x=\"" << fmt(kLeft + 30, "%.1f") << "\" y=\"" << fmt(legend_y + 2, "%.1f")
            << "\" font-size=\"12\">" << s.name << "</text>\n";
        legend_y += 18;
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_text_file(const std::filesystem::path& file, const std::string& content) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw DataError("cannot write " + file.string());
    out << content;
}

}  // namespace wikinli
