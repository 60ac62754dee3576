#include "mfs/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mfs/errors.hpp"

namespace mfs {

std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", x == 0 ? 0.0 : x);
    return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add(std::vector<std::string> row) {
    if (row.size() != header_.size()) throw Error("csv row has " + std::to_string(row.size()) + " fields, expected " +
                                                  std::to_string(header_.size()));
    rows_.push_back(std::move(row));
}

namespace {

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// Round step 1, 2 or 5 times a power of ten giving about `n` ticks.
double nice_step(double span, int n) {
    const double raw = span / n;
    const double p = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0}) {
        if (m * p >= raw) return m * p;
    }
    return 10 * p;
}

}  // namespace

std::string CsvTable::str() const {
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& r) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << quote(r[i]);
        os << "\n";
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return os.str();
}

void CsvTable::write(const std::string& path) const { write_text(path, str()); }

std::string SvgPlot::str() const {
    const double W = 640, H = 420, L = 70, R = 150, T = 40, B = 50;
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
    const double pw = W - L - R, ph = H - T - B;
    auto X = [&](double x) { return L + (x - x0) / (x1 - x0) * pw; };
    auto Y = [&](double y) { return T + ph - (y - y0) / (y1 - y0) * ph; };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape_xml(title)
       << "</text>\n";
    os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    const double sx = nice_step(x1 - x0, 6), sy = nice_step(y1 - y0, 6);
    for (double t = std::ceil(x0 / sx) * sx; t <= x1 + 1e-9 * sx; t += sx) {
        os << "<line x1=\"" << fmt(X(t)) << "\" y1=\"" << T + ph << "\" x2=\"" << fmt(X(t)) << "\" y2=\"" << T + ph + 5
           << "\" stroke=\"black\"/><text x=\"" << fmt(X(t)) << "\" y=\"" << T + ph + 18
           << "\" text-anchor=\"middle\">" << fmt(std::fabs(t) < 1e-12 * sx ? 0 : t) << "</text>\n";
    }
    for (double t = std::ceil(y0 / sy) * sy; t <= y1 + 1e-9 * sy; t += sy) {
        os << "<line x1=\"" << L - 5 << "\" y1=\"" << fmt(Y(t)) << "\" x2=\"" << L << "\" y2=\"" << fmt(Y(t))
           << "\" stroke=\"black\"/><text x=\"" << L - 8 << "\" y=\"" << fmt(Y(t) + 4)
           << "\" text-anchor=\"end\">" << fmt(std::fabs(t) < 1e-12 * sy ? 0 : t) << "</text>\n";
    }
    os << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">" << escape_xml(xlabel)
       << "</text>\n";
    os << "<text x=\"16\" y=\"" << T + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << T + ph / 2
       << ")\">" << escape_xml(ylabel) << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* c = colors[k % 6];
        os << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            os << (first ? "" : " ") << fmt(X(s.x[i])) << "," << fmt(Y(s.y[i]));
            first = false;
        }
        os << "\"/>\n";
        const double ly = T + 14 + 18 * static_cast<double>(k);
        os << "<line x1=\"" << L + pw + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << L + pw + 30 << "\" y2=\"" << ly - 4
           << "\" stroke=\"" << c << "\" stroke-width=\"2\"/><text x=\"" << L + pw + 35 << "\" y=\"" << ly << "\">"
           << escape_xml(s.name) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void SvgPlot::write(const std::string& path) const { write_text(path, str()); }

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
    if (!out) throw Error("write failed for '" + path + "'");
}

void ensure_dir(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) throw Error("cannot create directory '" + path + "': " + ec.message());
}

}  // namespace mfs
