#include "adavaw/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "adavaw/errors.hpp"

namespace adavaw::io {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

SeriesCsv read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open series file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw config_error("empty series file: " + path);
    const auto header = split_csv_line(line);
    int col_t = -1, col_y = -1, col_theta = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "t") col_t = static_cast<int>(i);
        else if (header[i] == "y") col_y = static_cast<int>(i);
        else if (header[i] == "theta") col_theta = static_cast<int>(i);
    }
    if (col_t < 0 || (col_y < 0 && col_theta < 0))
        throw config_error("series file must have columns t and y and/or theta: " + path);

    SeriesCsv out;
    std::vector<double> ys, thetas;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() < header.size())
            throw config_error("short row in series file: " + path);
        out.t.push_back(std::stod(cells[col_t]));
        if (col_y >= 0) {
            if (cells[col_y].empty())
                throw config_error("blank y value in series file: " + path);
            ys.push_back(std::stod(cells[col_y]));
        }
        if (col_theta >= 0 && !cells[col_theta].empty())
            thetas.push_back(std::stod(cells[col_theta]));
    }
    if (col_y >= 0) out.y = std::move(ys);
    if (col_theta >= 0 && thetas.size() == out.t.size()) out.theta = std::move(thetas);
    return out;
}

void write_series_csv(const std::string& path, const std::vector<double>& theta,
                      const std::vector<double>* y) {
    std::ostringstream out;
    out << (y ? "t,theta,y\n" : "t,theta\n");
    char buf[64];
    for (std::size_t i = 0; i < theta.size(); ++i) {
        out << (i + 1) << ',';
        std::snprintf(buf, sizeof buf, "%.17g", theta[i]);
        out << buf;
        if (y) {
            std::snprintf(buf, sizeof buf, "%.17g", (*y)[i]);
            out << ',' << buf;
        }
        out << '\n';
    }
    atomic_write(path, out.str());
}

void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace adavaw::io
