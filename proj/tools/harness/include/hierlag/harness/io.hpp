#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hierlag/design.hpp"

namespace hierlag::harness {

/// Wide: one file per series, a single column under the header `value`.
/// Long: columns `series_id,t,value`, t strictly increasing within a series.
enum class DataFormat { Auto, Wide, Long };

DataFormat data_format_from_string(const std::string& s);

/// Shortest decimal text that parses back to exactly `x`.
std::string format_double(double x);

/// Whole-string decimal parse; throws InvalidArgument on junk or non-finite
/// values.
double parse_double(std::string_view text);

/// Loads one or more files. Auto picks the format from each file's header.
/// Wide files are labelled by file stem, long series by their series_id.
/// Throws ParseError (1-based line) on malformed content and EmptySeries
/// for a series without observations.
MultiSeriesDataset load_dataset(const std::vector<std::string>& paths, DataFormat format = DataFormat::Auto);

/// Long-format writer; t runs 0, 1, ... within each series.
void save_dataset_long(const MultiSeriesDataset& dataset, const std::string& path);

/// Wide-format writer for a single series.
void save_series_wide(const std::vector<double>& values, const std::string& path);

} // namespace hierlag::harness
