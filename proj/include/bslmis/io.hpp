#pragma once

#include "bslmis/common.hpp"
#include "bslmis/models.hpp"
#include "bslmis/posterior.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace bslmis {

// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

// In-memory CSV table. Cells are stored as text; number() formats with
// format_double so identical values always give identical bytes.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  static std::string number(double x) { return format_double(x); }
  static std::string number(std::size_t x) { return std::to_string(x); }

  void add_row(std::vector<std::string> row);
  std::string to_string() const;
};

// Writes with LF endings, creating parent directories as needed.
void write_text(const std::filesystem::path& path, std::string_view text);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

// Parses comma-separated text with a mandatory header. Fields are not
// quoted. Throws ParseError with the 1-based line number on a ragged row or
// an empty input.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

// theta,density,log_unnorm
CsvTable grid_posterior_table(const GridPosterior& post);

// iter,<theta names>,<gamma names>,loglik,accepted
CsvTable chain_table(const Chain& chain);

// experiment,method,n,metric,value
struct LongTable {
  CsvTable table{{"experiment", "method", "n", "metric", "value"}, {}};

  void add(const std::string& experiment, const std::string& method, std::size_t n,
           const std::string& metric, double value);
};

// Reads one numeric column of a CSV with a header. With log_returns the
// series is diff(log(x)), of length rows - 1. min_rows applies to the
// returned series. Errors name the column, or the 1-based data row of a bad
// cell.
TimeSeries ingest_returns(const std::filesystem::path& path, const std::string& column,
                          bool log_returns = false, std::size_t min_rows = 0);
TimeSeries ingest_returns_text(std::string_view text, const std::string& column,
                               bool log_returns = false, std::size_t min_rows = 0);

}  // namespace bslmis
