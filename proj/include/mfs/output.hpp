#pragma once

#include <string>
#include <vector>

namespace mfs {

// 15 significant digits; "inf", "-inf" and "nan" for non-finite values.
std::string fmt(double x);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);
    void add(std::vector<std::string> row);
    std::size_t rows() const { return rows_.size(); }
    std::string str() const;
    void write(const std::string& path) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

struct PlotSeries {
    std::string name;
    std::vector<double> x, y;
};

// Line plot with axes, ticks, labels and a legend. Non-finite points are skipped.
struct SvgPlot {
    std::string title, xlabel, ylabel;
    std::vector<PlotSeries> series;

    std::string str() const;
    void write(const std::string& path) const;
};

void write_text(const std::string& path, const std::string& text);
// Creates the directory and its parents.
void ensure_dir(const std::string& path);

}  // namespace mfs
