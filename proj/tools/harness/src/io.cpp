#include "hierlag/harness/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "hierlag/errors.hpp"

namespace hierlag::harness {

namespace {

std::string_view trim(std::string_view s) {
    const auto blank = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
    while (!s.empty() && blank(s.front())) s.remove_prefix(1);
    while (!s.empty() && blank(s.back())) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::InvalidArgument, "cannot open " + path);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(std::move(line));
    return lines;
}

DataFormat detect(const std::string& path, const std::vector<std::string>& lines) {
    if (lines.empty()) throw ParseError(path, 1, "missing header");
    const auto cols = split_commas(trim(lines[0]));
    if (cols.size() == 1 && cols[0] == "value") return DataFormat::Wide;
    if (cols.size() == 3 && cols[0] == "series_id" && cols[1] == "t" && cols[2] == "value") return DataFormat::Long;
    throw ParseError(path, 1, "header must be `value` or `series_id,t,value`");
}

double value_at(const std::string& path, std::size_t line, std::string_view text) {
    try {
        return parse_double(text);
    } catch (const Error&) {
        throw ParseError(path, line, "not a finite number: '" + std::string(text) + "'");
    }
}

struct LongSeries {
    std::vector<double> values;
    long long last_t = 0;
};

void load_wide(const std::string& path, const std::vector<std::string>& lines, MultiSeriesDataset& out) {
    std::vector<double> values;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto text = trim(lines[i]);
        if (text.empty()) continue;
        if (text.find(',') != std::string_view::npos) throw ParseError(path, i + 1, "expected one column");
        values.push_back(value_at(path, i + 1, text));
    }
    std::string label = std::filesystem::path(path).stem().string();
    if (values.empty()) throw Error(Errc::EmptySeries, label);
    out.series.push_back(std::move(values));
    out.labels.push_back(std::move(label));
}

void load_long(const std::string& path, const std::vector<std::string>& lines, MultiSeriesDataset& out) {
    std::map<std::string, LongSeries> by_id;
    std::vector<std::string> order;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto text = trim(lines[i]);
        if (text.empty()) continue;
        const auto cols = split_commas(text);
        if (cols.size() != 3) throw ParseError(path, i + 1, "expected 3 columns");
        if (cols[0].empty()) throw ParseError(path, i + 1, "empty series_id");
        long long t = 0;
        const auto [end, ec] = std::from_chars(cols[1].data(), cols[1].data() + cols[1].size(), t);
        if (ec != std::errc() || end != cols[1].data() + cols[1].size()) {
            throw ParseError(path, i + 1, "t is not an integer: '" + std::string(cols[1]) + "'");
        }
        const double v = value_at(path, i + 1, cols[2]);
        const std::string id(cols[0]);
        auto [it, fresh] = by_id.try_emplace(id);
        if (fresh) {
            order.push_back(id);
        } else if (t <= it->second.last_t) {
            throw ParseError(path, i + 1, "t not increasing within series " + id);
        }
        it->second.last_t = t;
        it->second.values.push_back(v);
    }
    if (order.empty()) throw Error(Errc::EmptySeries, path);
    for (const auto& id : order) {
        out.series.push_back(std::move(by_id[id].values));
        out.labels.push_back(id);
    }
}

} // namespace

DataFormat data_format_from_string(const std::string& s) {
    if (s == "auto") return DataFormat::Auto;
    if (s == "wide") return DataFormat::Wide;
    if (s == "long") return DataFormat::Long;
    throw Error(Errc::InvalidArgument, "unknown data format '" + s + "'");
}

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || end != text.data() + text.size() || !std::isfinite(v)) {
        throw Error(Errc::InvalidArgument, "not a finite number: '" + std::string(text) + "'");
    }
    return v;
}

MultiSeriesDataset load_dataset(const std::vector<std::string>& paths, DataFormat format) {
    if (paths.empty()) throw Error(Errc::InvalidArgument, "no input files");
    MultiSeriesDataset out;
    for (const auto& path : paths) {
        const auto lines = read_lines(path);
        const DataFormat found = detect(path, lines);
        if (format != DataFormat::Auto && format != found) {
            throw ParseError(path, 1, "header does not match the requested format");
        }
        if (found == DataFormat::Wide) {
            load_wide(path, lines, out);
        } else {
            load_long(path, lines, out);
        }
    }
    out.validate();
    return out;
}

void save_dataset_long(const MultiSeriesDataset& dataset, const std::string& path) {
    dataset.validate();
    std::ofstream out(path);
    if (!out) throw Error(Errc::InvalidArgument, "cannot write " + path);
    out << "series_id,t,value\n";
    for (std::size_t m = 0; m < dataset.num_series(); ++m) {
        const std::string& id = dataset.labels.empty() ? "s" + std::to_string(m) : dataset.labels[m];
        for (std::size_t t = 0; t < dataset.series[m].size(); ++t) {
            out << id << ',' << t << ',' << format_double(dataset.series[m][t]) << '\n';
        }
    }
    if (!out) throw Error(Errc::InvalidArgument, "write failed for " + path);
}

void save_series_wide(const std::vector<double>& values, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::InvalidArgument, "cannot write " + path);
    out << "value\n";
    for (double v : values) out << format_double(v) << '\n';
    if (!out) throw Error(Errc::InvalidArgument, "write failed for " + path);
}

} // namespace hierlag::harness
