#pragma once

#include <optional>
#include <string>
#include <vector>

namespace adavaw::io {

// Column-labelled series file. Header names decide the mapping, so both
// generator output (t,theta[,y]) and run input (t,y[,theta]) parse.
struct SeriesCsv {
    std::vector<double> t;
    std::optional<std::vector<double>> y;
    std::optional<std::vector<double>> theta;
};

SeriesCsv read_series_csv(const std::string& path);

void write_series_csv(const std::string& path, const std::vector<double>& theta,
                      const std::vector<double>* y);

// Writes through a temp file and renames, so partial cells never appear.
void atomic_write(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

} // namespace adavaw::io
