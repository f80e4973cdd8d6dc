#include "subres/cli/output.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace subres::cli {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 60.0;

std::string color_for(double t)
{
    // Five-stop approximation of viridis.
    static const std::array<std::array<double, 3>, 5> stops{{{68, 1, 84},
                                                              {59, 82, 139},
                                                              {33, 145, 140},
                                                              {94, 201, 98},
                                                              {253, 231, 37}}};
    t = std::clamp(t, 0.0, 1.0) * 4.0;
    const int i = std::min(3, static_cast<int>(t));
    const double f = t - i;
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                  static_cast<int>(std::lround(stops[i][0] + f * (stops[i + 1][0] - stops[i][0]))),
                  static_cast<int>(std::lround(stops[i][1] + f * (stops[i + 1][1] - stops[i][1]))),
                  static_cast<int>(std::lround(stops[i][2] + f * (stops[i + 1][2] - stops[i][2]))));
    return buf;
}

struct Mapper {
    PlotFrame f;
    double x(double re) const { return kMargin + (re - f.re_min) / (f.re_max - f.re_min) * kWidth; }
    double y(double im) const { return kMargin + (f.im_max - im) / (f.im_max - f.im_min) * kHeight; }
};

std::string comment(const json& meta)
{
    std::string text = meta.dump();
    // "--" is not allowed inside XML comments.
    for (std::size_t pos; (pos = text.find("--")) != std::string::npos;) text.replace(pos, 2, "- -");
    return "<!-- " + text + " -->\n";
}

std::string svg_open(const json& meta)
{
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt(kWidth + 2 * kMargin + 80)
       << "\" height=\"" << fmt(kHeight + 2 * kMargin) << "\">\n"
       << comment(meta)
       << "<defs><clipPath id=\"plot\"><rect x=\"" << fmt(kMargin) << "\" y=\"" << fmt(kMargin)
       << "\" width=\"" << fmt(kWidth) << "\" height=\"" << fmt(kHeight) << "\"/></clipPath></defs>\n"
       << "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return os.str();
}

std::string axes(const Mapper& m)
{
    std::ostringstream os;
    os << "<rect x=\"" << fmt(kMargin) << "\" y=\"" << fmt(kMargin) << "\" width=\"" << fmt(kWidth)
       << "\" height=\"" << fmt(kHeight) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double re = m.f.re_min + (m.f.re_max - m.f.re_min) * i / 4.0;
        const double im = m.f.im_min + (m.f.im_max - m.f.im_min) * i / 4.0;
        os << "<text x=\"" << fmt(m.x(re)) << "\" y=\"" << fmt(kMargin + kHeight + 18)
           << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt(std::round(re * 1000) / 1000) << "</text>\n";
        os << "<text x=\"" << fmt(kMargin - 6) << "\" y=\"" << fmt(m.y(im) + 4)
           << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(std::round(im * 1000) / 1000) << "</text>\n";
    }
    os << "<text x=\"" << fmt(kMargin + kWidth / 2) << "\" y=\"" << fmt(kMargin + kHeight + 40)
       << "\" font-size=\"13\" text-anchor=\"middle\">Re z</text>\n";
    os << "<text x=\"16\" y=\"" << fmt(kMargin + kHeight / 2)
       << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << fmt(kMargin + kHeight / 2)
       << ")\">Im z</text>\n";
    return os.str();
}

std::string polyline(const std::vector<cplx>& pts, const Mapper& m, const char* stroke)
{
    if (pts.empty()) return {};
    std::ostringstream os;
    os << "<polyline clip-path=\"url(#plot)\" fill=\"none\" stroke=\"" << stroke
       << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) os << ' ';
        os << fmt(m.x(pts[i].real())) << ',' << fmt(m.y(pts[i].imag()));
    }
    os << "\"/>\n";
    return os.str();
}

}  // namespace

std::string fmt(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

json metadata(const std::string& command, const RunConfig& config)
{
    return json{{"command", command},
                {"config_hash", config_hash(config)},
                {"version", SUBRES_VERSION},
                {"seed", config.seed}};
}

void write_text(const std::string& path, const std::string& text)
{
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << text;
    if (!out) throw Error("write to " + path + " failed");
}

void write_json(const std::string& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

void write_csv(const std::string& path, const json& meta, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows)
{
    std::ostringstream os;
    os << "# subres " << meta.value("version", "") << " command=" << meta.value("command", "")
       << " config_hash=" << meta.value("config_hash", "") << "\n";
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << "\n";
    }
    write_text(path, os.str());
}

const std::vector<std::string> kSweepHeader{"re_z",           "im_z",      "h",        "sigma_min",
                                            "resolvent_norm", "in_region", "converged"};

std::vector<std::vector<std::string>> sweep_rows(const std::vector<Probe>& probes)
{
    std::vector<std::vector<std::string>> rows;
    for (const Probe& p : probes)
        rows.push_back({fmt(p.z.real()), fmt(p.z.imag()), fmt(p.h), fmt(p.sigma_min),
                        fmt(p.resolvent_norm), p.in_region ? "1" : "0", p.converged ? "1" : "0"});
    return rows;
}

std::string sweep_svg(const std::vector<Probe>& probes, const RegionBoundary& boundary,
                      const PlotFrame& frame, int cells_re, int cells_im, const json& meta)
{
    const Mapper m{frame};
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const Probe& p : probes)
        if (std::isfinite(p.resolvent_norm) && p.resolvent_norm > 0.0) {
            lo = std::min(lo, std::log10(p.resolvent_norm));
            hi = std::max(hi, std::log10(p.resolvent_norm));
        }
    if (!(hi > lo)) hi = lo + 1.0;

    std::ostringstream os;
    os << svg_open(meta);
    const bool cells = cells_re > 0 && cells_im > 0;
    const double cw = cells ? kWidth / cells_re : 0.0;
    const double ch = cells ? kHeight / cells_im : 0.0;
    for (const Probe& p : probes) {
        std::string fill = "#bbbbbb";
        if (std::isfinite(p.resolvent_norm) && p.resolvent_norm > 0.0)
            fill = color_for((std::log10(p.resolvent_norm) - lo) / (hi - lo));
        else if (std::isinf(p.resolvent_norm))
            fill = color_for(1.0);
        const double x = m.x(p.z.real());
        const double y = m.y(p.z.imag());
        if (cells)
            os << "<rect clip-path=\"url(#plot)\" x=\"" << fmt(x - cw / 2) << "\" y=\"" << fmt(y - ch / 2)
               << "\" width=\"" << fmt(cw) << "\" height=\"" << fmt(ch) << "\" fill=\"" << fill << "\"/>\n";
        else
            os << "<circle clip-path=\"url(#plot)\" cx=\"" << fmt(x) << "\" cy=\"" << fmt(y)
               << "\" r=\"4\" fill=\"" << fill << "\"/>\n";
    }
    os << polyline(boundary.upper, m, "white") << polyline(boundary.lower, m, "white");
    os << axes(m);

    // Color bar.
    const double bx = kMargin + kWidth + 20;
    for (int i = 0; i < 50; ++i) {
        const double t = i / 49.0;
        os << "<rect x=\"" << fmt(bx) << "\" y=\"" << fmt(kMargin + kHeight * (1 - t) - kHeight / 50)
           << "\" width=\"16\" height=\"" << fmt(kHeight / 50 + 0.5) << "\" fill=\"" << color_for(t) << "\"/>\n";
    }
    os << "<text x=\"" << fmt(bx + 20) << "\" y=\"" << fmt(kMargin + 4) << "\" font-size=\"11\">"
       << fmt(std::round(hi * 100) / 100) << "</text>\n";
    os << "<text x=\"" << fmt(bx + 20) << "\" y=\"" << fmt(kMargin + kHeight) << "\" font-size=\"11\">"
       << fmt(std::round(lo * 100) / 100) << "</text>\n";
    os << "<text x=\"" << fmt(bx) << "\" y=\"" << fmt(kMargin - 10)
       << "\" font-size=\"11\">log10 |(P-z)^-1|</text>\n";
    os << "</svg>\n";
    return os.str();
}

std::string region_svg(const RegionBoundary& boundary, const PlotFrame& frame, const json& meta)
{
    const Mapper m{frame};
    std::ostringstream os;
    os << svg_open(meta);
    // Shade the region: left of the upper and lower boundary curves.
    if (!boundary.upper.empty()) {
        os << "<polygon clip-path=\"url(#plot)\" fill=\"#9ecae1\" stroke=\"none\" points=\"";
        os << fmt(m.x(frame.re_min)) << ',' << fmt(m.y(boundary.upper.back().imag()));
        for (auto it = boundary.upper.rbegin(); it != boundary.upper.rend(); ++it)
            os << ' ' << fmt(m.x(it->real())) << ',' << fmt(m.y(it->imag()));
        for (const cplx& z : boundary.lower) os << ' ' << fmt(m.x(z.real())) << ',' << fmt(m.y(z.imag()));
        os << ' ' << fmt(m.x(frame.re_min)) << ',' << fmt(m.y(boundary.lower.back().imag()));
        os << "\"/>\n";
        // Remove the disc |z| < K T + M h.
        const double r0 = std::abs(boundary.upper.front());
        os << "<ellipse clip-path=\"url(#plot)\" cx=\"" << fmt(m.x(0.0)) << "\" cy=\"" << fmt(m.y(0.0))
           << "\" rx=\"" << fmt(m.x(r0) - m.x(0.0)) << "\" ry=\"" << fmt(m.y(0.0) - m.y(r0))
           << "\" fill=\"white\"/>\n";
    }
    os << polyline(boundary.upper, m, "#08519c") << polyline(boundary.lower, m, "#08519c");
    os << axes(m);
    os << "</svg>\n";
    return os.str();
}

}  // namespace subres::cli
