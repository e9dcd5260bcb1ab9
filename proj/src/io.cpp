#include "bslmis/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace bslmis {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header.size()) {
    throw DomainError("CSV row has " + std::to_string(row.size()) + " cells, header has " +
                      std::to_string(header.size()));
  }
  rows.push_back(std::move(row));
}

std::string CsvTable::to_string() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DomainError("cannot open " + path.string() + " for writing");
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw DomainError("write failed for " + path.string());
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  write_text(path, table.to_string());
}

namespace {

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view f = line.substr(start, comma == std::string_view::npos
                                                ? std::string_view::npos
                                                : comma - start);
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t')) f.remove_suffix(1);
    out.emplace_back(f);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last && std::isfinite(out);
}

}  // namespace

CsvTable parse_csv(std::string_view text) {
  CsvTable t;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      if (!have_header) throw ParseError("missing CSV header on line 1", 1);
      continue;
    }
    std::vector<std::string> fields = split_fields(line);
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw ParseError("line " + std::to_string(line_no) + " has " +
                           std::to_string(fields.size()) + " fields, header has " +
                           std::to_string(t.header.size()),
                       line_no);
    }
    t.rows.push_back(std::move(fields));
  }
  if (!have_header) throw ParseError("missing CSV header on line 1", 1);
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(slurp(path)); }

CsvTable grid_posterior_table(const GridPosterior& post) {
  CsvTable t{{"theta", "density", "log_unnorm"}, {}};
  t.rows.reserve(post.grid.size());
  for (std::size_t i = 0; i < post.grid.size(); ++i) {
    t.rows.push_back({format_double(post.grid[i]), format_double(post.density[i]),
                      format_double(post.log_unnorm[i])});
  }
  return t;
}

CsvTable chain_table(const Chain& chain) {
  CsvTable t;
  t.header.push_back("iter");
  for (const auto& s : chain.param_names) t.header.push_back(s);
  for (const auto& s : chain.gamma_names) t.header.push_back(s);
  t.header.push_back("loglik");
  t.header.push_back("accepted");
  const auto p = chain.theta.cols();
  const auto g = chain.gamma.cols();
  t.rows.reserve(chain.size());
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    std::vector<std::string> row;
    row.reserve(t.header.size());
    row.push_back(std::to_string(i));
    for (Eigen::Index j = 0; j < p; ++j) row.push_back(format_double(chain.theta(r, j)));
    for (Eigen::Index j = 0; j < g; ++j) row.push_back(format_double(chain.gamma(r, j)));
    row.push_back(format_double(chain.loglik[i]));
    row.push_back(chain.accepted[i] ? "1" : "0");
    t.rows.push_back(std::move(row));
  }
  return t;
}

void LongTable::add(const std::string& experiment, const std::string& method,
                    std::size_t n, const std::string& metric, double value) {
  table.rows.push_back(
      {experiment, method, std::to_string(n), metric, format_double(value)});
}

TimeSeries ingest_returns_text(std::string_view text, const std::string& column,
                               bool log_returns, std::size_t min_rows) {
  const CsvTable t = parse_csv(text);
  std::size_t col = t.header.size();
  for (std::size_t j = 0; j < t.header.size(); ++j) {
    if (t.header[j] == column) col = j;
  }
  if (col == t.header.size()) {
    throw ParseError("line 1: column '" + column + "' not found in header", 1);
  }
  std::vector<double> x;
  x.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    double v = 0.0;
    if (!parse_number(t.rows[i][col], v)) {
      throw ParseError("non-numeric cell '" + t.rows[i][col] + "' in column '" + column +
                           "' at data row " + std::to_string(i + 1),
                       i + 1);
    }
    x.push_back(v);
  }
  if (log_returns) {
    std::vector<double> r;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!(x[i] > 0.0)) {
        throw ParseError("log returns need positive prices; data row " +
                             std::to_string(i + 1) + " is not",
                         i + 1);
      }
      if (i > 0) r.push_back(std::log(x[i]) - std::log(x[i - 1]));
    }
    x = std::move(r);
  }
  if (x.size() < min_rows) {
    throw DomainError("series has " + std::to_string(x.size()) + " rows, at least " +
                      std::to_string(min_rows) + " are required");
  }
  return TimeSeries(std::move(x));
}

TimeSeries ingest_returns(const std::filesystem::path& path, const std::string& column,
                          bool log_returns, std::size_t min_rows) {
  return ingest_returns_text(slurp(path), column, log_returns, min_rows);
}

}  // namespace bslmis
