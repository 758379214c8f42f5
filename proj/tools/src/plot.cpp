// Copyright 2026 The dgten Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dgten_cli/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "dgten/errors.hpp"

namespace dgten::cli {
namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::vector<Series>& series) {
    constexpr double width = 640, height = 400, left = 60, right = 150, top = 40, bottom = 50;
    double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
    double y_min = x_min, y_max = -x_min;
    for (const auto& s : series) {
        for (double v : s.x) {
            x_min = std::min(x_min, v);
            x_max = std::max(x_max, v);
        }
        for (double v : s.y) {
            y_min = std::min(y_min, v);
            y_max = std::max(y_max, v);
        }
    }
    if (!std::isfinite(x_min)) x_min = 0, x_max = 1, y_min = 0, y_max = 1;
    if (x_max == x_min) x_max = x_min + 1;
    y_min = std::min(y_min, 0.0);
    y_max = std::max(y_max, 1.0);
    const double pw = width - left - right, ph = height - top - bottom;
    auto px = [&](double x) { return left + (x - x_min) / (x_max - x_min) * pw; };
    auto py = [&](double y) { return top + (1.0 - (y - y_min) / (y_max - y_min)) * ph; };

    std::ostringstream o;
    o << std::fixed << std::setprecision(2);
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
      << escape(title) << "</text>\n";
    o << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
      << "\" stroke=\"black\"/>\n";
    o << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
      << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double y = y_min + (y_max - y_min) * i / 4.0;
        o << "<text x=\"" << left - 6 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
          << "font-size=\"11\">" << y << "</text>\n";
    }
    o << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << escape(x_label) << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = kPalette[k % std::size(kPalette)];
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) o << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        o << "\"/>\n";
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            o << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        const double ly = top + 16.0 * static_cast<double>(k);
        o << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 32 << "\" y2=\"" << ly
          << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << left + pw + 38 << "\" y=\"" << ly + 4 << "\" font-family=\"sans-serif\" font-size=\"12\">"
          << escape(s.name) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

std::vector<std::filesystem::path> write_report_plots(const EvalReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto dat = dir / "metrics.dat";
    const auto gp = dir / "metrics.gp";
    const auto svg = dir / "metrics.svg";

    {
        std::ofstream out(dat);
        if (!out) throw ConfigError("cannot write " + dat.string());
        out << "# t_end seed mcc auc ba ap f1_micro f1_macro\n" << std::setprecision(10);
        for (const auto& r : report.rounds) {
            const auto& m = r.metrics;
            out << r.t_end << ' ' << r.seed << ' ' << m.mcc << ' ' << m.auc << ' ' << m.ba << ' ' << m.ap << ' '
                << m.f1_micro << ' ' << m.f1_macro << '\n';
        }
    }
    {
        std::ofstream out(gp);
        if (!out) throw ConfigError("cannot write " + gp.string());
        out << "set terminal pngcairo size 800,500\n"
            << "set output 'metrics.png'\n"
            << "set title 'Task " << report.task << " metrics per round'\n"
            << "set xlabel 'training window end (slot)'\n"
            << "set yrange [-0.1:1.05]\n"
            << "set key outside right\n"
            << "plot 'metrics.dat' using 1:3 with linespoints title 'MCC', \\\n"
            << "     '' using 1:4 with linespoints title 'AUC', \\\n"
            << "     '' using 1:5 with linespoints title 'BA', \\\n"
            << "     '' using 1:6 with linespoints title 'AP', \\\n"
            << "     '' using 1:7 with linespoints title 'F1-micro', \\\n"
            << "     '' using 1:8 with linespoints title 'F1-macro'\n";
    }

    // Seeds are averaged per window end for the chart.
    std::map<std::size_t, std::vector<MetricSet>> by_t;
    for (const auto& r : report.rounds) by_t[r.t_end].push_back(r.metrics);
    const char* names[] = {"MCC", "AUC", "BA", "AP", "F1-micro", "F1-macro"};
    std::vector<Series> series;
    for (std::size_t k = 0; k < std::size(names); ++k) {
        Series s{names[k], {}, {}};
        for (const auto& [t, ms] : by_t) {
            double sum = 0;
            for (const auto& m : ms) {
                const double v[] = {m.mcc, m.auc, m.ba, m.ap, m.f1_micro, m.f1_macro};
                sum += v[k];
            }
            s.x.push_back(static_cast<double>(t));
            s.y.push_back(sum / static_cast<double>(ms.size()));
        }
        series.push_back(std::move(s));
    }
    {
        std::ofstream out(svg);
        if (!out) throw ConfigError("cannot write " + svg.string());
        out << svg_line_chart("Task " + std::to_string(report.task) + " metrics per round", "training window end (slot)",
                              series);
    }
    return {dat, gp, svg};
}

}  // namespace dgten::cli
