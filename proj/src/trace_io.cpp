#include "droneplan/trace_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include "droneplan/errors.hpp"
#include "droneplan/geometry.hpp"
#include "vendor/json.hpp"

namespace droneplan {

namespace {

// Fixed-precision helper for SVG coordinates; shortest form elsewhere.
std::string format_fixed(double x, int precision) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::fixed, precision);
    return std::string(buf, res.ptr);
}

bool sample_merged(const Trace& trace, std::size_t sample_index) {
    for (const MergeEvent& ev : trace.merge_events) {
        if (ev.sample <= sample_index) return true;
    }
    return false;
}

struct PlotSeries {
    std::vector<Point2> points;
    std::string x_label;
    std::string y_label;
    std::string title;
};

// A spartan but valid SVG line plot: frame, polyline, corner tick labels.
std::string line_plot_svg(const PlotSeries& series) {
    const double width = 640.0;
    const double height = 480.0;
    const double ml = 70.0, mr = 20.0, mt = 40.0, mb = 50.0;

    double x_min = std::numeric_limits<double>::infinity();
    double x_max = -std::numeric_limits<double>::infinity();
    double y_min = x_min, y_max = x_max;
    for (const Point2& pt : series.points) {
        x_min = std::min(x_min, pt.x);
        x_max = std::max(x_max, pt.x);
        y_min = std::min(y_min, pt.y);
        y_max = std::max(y_max, pt.y);
    }
    if (series.points.empty()) {
        x_min = y_min = 0.0;
        x_max = y_max = 1.0;
    }
    if (x_max - x_min < 1e-12) x_max = x_min + 1.0;
    if (y_max - y_min < 1e-12) y_max = y_min + 1.0;

    auto sx = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * (width - ml - mr); };
    auto sy = [&](double y) { return height - mb - (y - y_min) / (y_max - y_min) * (height - mt - mb); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_fixed(width, 0)
        << "\" height=\"" << format_fixed(height, 0) << "\" viewBox=\"0 0 "
        << format_fixed(width, 0) << ' ' << format_fixed(height, 0) << "\">\n";
    out << "  <rect x=\"0\" y=\"0\" width=\"" << format_fixed(width, 0) << "\" height=\""
        << format_fixed(height, 0) << "\" fill=\"white\"/>\n";
    out << "  <text x=\"" << format_fixed(width / 2, 2) << "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"monospace\" font-size=\"16\">"
        << series.title << "</text>\n";
    out << "  <rect x=\"" << format_fixed(ml, 2) << "\" y=\"" << format_fixed(mt, 2)
        << "\" width=\"" << format_fixed(width - ml - mr, 2) << "\" height=\""
        << format_fixed(height - mt - mb, 2) << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "  <text x=\"" << format_fixed(width / 2, 2) << "\" y=\""
        << format_fixed(height - 12, 2)
        << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\">"
        << series.x_label << "</text>\n";
    out << "  <text x=\"18\" y=\"" << format_fixed(height / 2, 2)
        << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\" "
           "transform=\"rotate(-90 18 "
        << format_fixed(height / 2, 2) << ")\">" << series.y_label << "</text>\n";
    out << "  <text x=\"" << format_fixed(ml, 2) << "\" y=\"" << format_fixed(height - mb + 18, 2)
        << "\" font-family=\"monospace\" font-size=\"11\">" << format_double(x_min) << "</text>\n";
    out << "  <text x=\"" << format_fixed(width - mr, 2) << "\" y=\""
        << format_fixed(height - mb + 18, 2)
        << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">"
        << format_double(x_max) << "</text>\n";
    out << "  <text x=\"" << format_fixed(ml - 6, 2) << "\" y=\"" << format_fixed(height - mb, 2)
        << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">"
        << format_double(y_min) << "</text>\n";
    out << "  <text x=\"" << format_fixed(ml - 6, 2) << "\" y=\"" << format_fixed(mt + 10, 2)
        << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">"
        << format_double(y_max) << "</text>\n";
    if (!series.points.empty()) {
        out << "  <polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < series.points.size(); ++i) {
            if (i != 0) out << ' ';
            out << format_fixed(sx(series.points[i].x), 2) << ','
                << format_fixed(sy(series.points[i].y), 2);
        }
        out << "\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::vector<double> csv_cells(const std::string& line, std::size_t line_no,
                              std::size_t expected) {
    std::vector<double> cells;
    std::size_t begin = 0;
    while (true) {
        std::size_t comma = line.find(',', begin);
        std::string cell = line.substr(begin, comma == std::string::npos ? std::string::npos
                                                                         : comma - begin);
        double value = 0.0;
        auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
        if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
            throw ValidationError("csv line " + std::to_string(line_no) +
                                  ": cell '" + cell + "' is not a number");
        }
        cells.push_back(value);
        if (comma == std::string::npos) break;
        begin = comma + 1;
    }
    if (expected != 0 && cells.size() != expected) {
        throw ValidationError("csv line " + std::to_string(line_no) + ": expected " +
                              std::to_string(expected) + " cells, found " +
                              std::to_string(cells.size()));
    }
    return cells;
}

}  // namespace

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw IoError("short write to '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename temp file onto '" + path + "'");
    }
}

std::string trace_csv(const Trace& trace) {
    const std::size_t heads = trace.ordered.size();
    std::ostringstream out;
    out << "step,s,length,energy,lambda,residual,merge_flag";
    for (std::size_t j = 1; j <= heads; ++j) {
        out << ",u_" << j << ",v_" << j;
    }
    out << '\n';
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        const TraceSample& sample = trace.samples[i];
        out << i << ',' << format_double(sample.state.s) << ','
            << format_double(sample.length) << ',' << format_double(sample.energy) << ','
            << format_double(sample.state.lambda) << ',' << format_double(sample.residual)
            << ',' << (sample_merged(trace, i) ? 1 : 0);
        for (std::size_t j = 0; j < heads; ++j) {
            out << ',' << format_double(sample.state.u[j]) << ','
                << format_double(sample.state.v[j]);
        }
        out << '\n';
    }
    return out.str();
}

std::string sweep_csv(const Trace& trace, const std::vector<double>& targets) {
    const double inv_p = 1.0 / trace.model.p;
    std::ostringstream out;
    out << "s,length,path_defect,energy,energy^{1/p},lambda,merged\n";
    auto emit = [&](double s, double length, double energy, double lambda, bool merged) {
        out << format_double(s) << ',' << format_double(length) << ','
            << format_double(trace.tour_length - length) << ',' << format_double(energy) << ','
            << format_double(energy <= 0.0 ? 0.0 : std::pow(energy, inv_p)) << ','
            << format_double(lambda) << ',' << (merged ? 1 : 0) << '\n';
    };
    if (targets.empty()) {
        for (std::size_t i = 0; i < trace.samples.size(); ++i) {
            const TraceSample& sample = trace.samples[i];
            emit(sample.state.s, sample.length, sample.energy, sample.state.lambda,
                 sample_merged(trace, i));
        }
        return out.str();
    }
    std::vector<double> ordered_targets = targets;
    std::sort(ordered_targets.begin(), ordered_targets.end(), std::greater<double>());
    for (double target : ordered_targets) {
        const HomotopyState st = state_at_length(trace, target);
        const DronePath path = state_to_path(st, trace.start, trace.end);
        const double length = path_length(path);
        const double e = energy(path, trace.ordered, trace.model);
        bool merged = false;
        for (const MergeEvent& ev : trace.merge_events) {
            if (trace.samples[ev.sample].length >= target) merged = true;
        }
        emit(st.s, length, e, st.lambda, merged);
    }
    return out.str();
}

std::string plan_json(const Trace& trace, double target_length) {
    if (trace.samples.empty()) throw ValidationError("plan requires a non-empty trace");
    const TraceSample& final_sample = trace.samples.back();
    DronePath path = state_to_path(final_sample.state, trace.start, trace.end);

    nlohmann::ordered_json doc;
    doc["start"] = {trace.start.x, trace.start.y};
    doc["end"] = {trace.end.x, trace.end.y};
    doc["p"] = trace.model.p;
    nlohmann::ordered_json heads = nlohmann::ordered_json::array();
    for (const Point2& head : trace.ordered.heads) heads.push_back({head.x, head.y});
    doc["heads"] = heads;
    nlohmann::ordered_json order = nlohmann::ordered_json::array();
    for (std::size_t idx : trace.order) order.push_back(idx + 1);
    doc["order"] = order;
    doc["tour_length"] = trace.tour_length;
    doc["target_length"] = target_length;
    nlohmann::ordered_json vertices = nlohmann::ordered_json::array();
    for (const Point2& vertex : path.vertices) vertices.push_back({vertex.x, vertex.y});
    doc["vertices"] = vertices;
    doc["length"] = final_sample.length;
    doc["energy"] = final_sample.energy;
    doc["lambda"] = final_sample.state.lambda;
    doc["steps"] = trace.samples.size() - 1;
    doc["terminated"] = to_string(trace.terminated_reason);
    return doc.dump(2) + "\n";
}

std::string path_svg(const Trace& trace) {
    if (trace.samples.empty()) throw ValidationError("path plot requires a non-empty trace");
    const double width = 640.0, height = 480.0, margin = 50.0;

    DronePath path = state_to_path(trace.samples.back().state, trace.start, trace.end);
    std::vector<Point2> pts = path_points(path);

    double x_min = pts.front().x, x_max = pts.front().x;
    double y_min = pts.front().y, y_max = pts.front().y;
    auto grow = [&](const Point2& pt) {
        x_min = std::min(x_min, pt.x);
        x_max = std::max(x_max, pt.x);
        y_min = std::min(y_min, pt.y);
        y_max = std::max(y_max, pt.y);
    };
    for (const Point2& pt : pts) grow(pt);
    for (const Point2& head : trace.ordered.heads) grow(head);
    if (x_max - x_min < 1e-12) x_max = x_min + 1.0;
    if (y_max - y_min < 1e-12) y_max = y_min + 1.0;
    const double scale = std::min((width - 2 * margin) / (x_max - x_min),
                                  (height - 2 * margin) / (y_max - y_min));
    auto sx = [&](double x) { return margin + (x - x_min) * scale; };
    auto sy = [&](double y) { return height - margin - (y - y_min) * scale; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
           "viewBox=\"0 0 640 480\">\n";
    out << "  <rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"white\"/>\n";
    out << "  <polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i != 0) out << ' ';
        out << format_fixed(sx(pts[i].x), 2) << ',' << format_fixed(sy(pts[i].y), 2);
    }
    out << "\"/>\n";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const bool terminal = (i == 0 || i + 1 == pts.size());
        out << "  <circle cx=\"" << format_fixed(sx(pts[i].x), 2) << "\" cy=\""
            << format_fixed(sy(pts[i].y), 2) << "\" r=\"4\" fill=\""
            << (terminal ? "#2ca02c" : "#1f77b4") << "\"/>\n";
    }
    for (std::size_t j = 0; j < trace.ordered.size(); ++j) {
        const Point2& head = trace.ordered.heads[j];
        out << "  <circle cx=\"" << format_fixed(sx(head.x), 2) << "\" cy=\""
            << format_fixed(sy(head.y), 2)
            << "\" r=\"5\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
        out << "  <text x=\"" << format_fixed(sx(head.x) + 8, 2) << "\" y=\""
            << format_fixed(sy(head.y) - 8, 2)
            << "\" font-family=\"monospace\" font-size=\"12\">" << (j + 1) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string defect_vs_energy_svg(const Trace& trace) {
    PlotSeries series;
    series.x_label = "path defect";
    series.y_label = "energy^{1/p}";
    series.title = "harvest cost vs. path defect";
    const double inv_p = 1.0 / trace.model.p;
    for (const TraceSample& sample : trace.samples) {
        double e = sample.energy <= 0.0 ? 0.0 : std::pow(sample.energy, inv_p);
        series.points.push_back({trace.tour_length - sample.length, e});
    }
    return line_plot_svg(series);
}

std::string length_vs_step_svg(const Trace& trace) {
    PlotSeries series;
    series.x_label = "step";
    series.y_label = "path length";
    series.title = "path length vs. integration step";
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        series.points.push_back({static_cast<double>(i), trace.samples[i].length});
    }
    return line_plot_svg(series);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1) {
            std::size_t begin = 0;
            while (true) {
                std::size_t comma = line.find(',', begin);
                table.header.push_back(line.substr(
                    begin, comma == std::string::npos ? std::string::npos : comma - begin));
                if (comma == std::string::npos) break;
                begin = comma + 1;
            }
            continue;
        }
        table.rows.push_back(csv_cells(line, line_no, table.header.size()));
    }
    if (table.header.empty()) throw ValidationError("csv file '" + path + "' is empty");
    return table;
}

}  // namespace droneplan
