#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fceval/core.hpp"

namespace fceval::io {

/// Long-form series CSV: series_id,timestamp,value with an optional
/// frequency column. Rows may come in any order; each series is sorted by
/// timestamp. Missing or non-numeric values are rejected.
core::Dataset parse_series_csv(const std::string& text, const std::string& source = "series.csv");
core::Dataset read_series_csv(const std::string& path);

/// Forecast CSV: series_id,origin,step,model,forecast.
std::vector<core::ForecastRecord> parse_forecast_csv(const std::string& text,
                                                     const std::string& source = "forecasts.csv");
std::vector<core::ForecastRecord> read_forecast_csv(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// Lower-case hex SHA-256.
std::string sha256_hex(const std::string& data);

/// Splits one CSV line, honouring double-quoted fields.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace fceval::io
