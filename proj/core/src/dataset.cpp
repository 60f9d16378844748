#include "stochcat/dataset.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "stochcat/errors.hpp"

namespace stochcat {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& cell, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size())
    throw ParseError("line " + std::to_string(line_no) + ": cannot parse \"" + cell + "\" as a number");
  return v;
}

}  // namespace

Dataset::Dataset(Mat in, Mat tg) : inputs(std::move(in)), targets(std::move(tg)) {
  if (inputs.rows() != targets.rows()) throw DimensionError("Dataset: input and target row counts differ");
  if (inputs.rows() < 1) throw DimensionError("Dataset: needs at least one row");
}

Dataset repeat(const Dataset& data, int times) {
  const Eigen::Index n = data.size();
  Mat in(n * times, data.in_dim()), tg(n * times, data.out_dim());
  for (int t = 0; t < times; ++t) {
    in.middleRows(t * n, n) = data.inputs;
    tg.middleRows(t * n, n) = data.targets;
  }
  return {std::move(in), std::move(tg)};
}

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("dataset CSV is empty");
  const auto header = split_csv_line(line);
  int a = 0, b = 0;
  for (const auto& h : header) {
    if (h.size() < 2 || (h[0] != 'x' && h[0] != 'y')) throw ParseError("unexpected CSV column \"" + h + "\"");
    const int expected = h[0] == 'x' ? a : b;
    if (h.substr(1) != std::to_string(expected) || (h[0] == 'x' && b > 0))
      throw ParseError("CSV header must be x0..x{a-1},y0..y{b-1}; got \"" + h + "\"");
    (h[0] == 'x' ? a : b) += 1;
  }
  if (b == 0) throw ParseError("CSV header has no y columns");
  std::vector<double> values;
  std::size_t line_no = 1, rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) + " columns");
    for (const auto& c : cells) values.push_back(parse_double(c, line_no));
    ++rows;
  }
  if (rows == 0) throw ParseError("dataset CSV has no rows");
  const auto n = static_cast<Eigen::Index>(rows);
  Mat inputs(n, a), targets(n, b);
  for (Eigen::Index r = 0; r < n; ++r) {
    const std::size_t base = static_cast<std::size_t>(r) * header.size();
    for (int c = 0; c < a; ++c) inputs(r, c) = values[base + static_cast<std::size_t>(c)];
    for (int c = 0; c < b; ++c) targets(r, c) = values[base + static_cast<std::size_t>(a + c)];
  }
  return {std::move(inputs), std::move(targets)};
}

Dataset load_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dataset \"" + path + "\"");
  return read_dataset_csv(in);
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  std::vector<std::string> header;
  for (int c = 0; c < data.in_dim(); ++c) header.push_back("x" + std::to_string(c));
  for (int c = 0; c < data.out_dim(); ++c) header.push_back("y" + std::to_string(c));
  Mat all(data.size(), data.in_dim() + data.out_dim());
  all << data.inputs, data.targets;
  write_samples_csv(out, all, header);
}

void write_samples_csv(std::ostream& out, const MatRef& draws, const std::vector<std::string>& header) {
  if (static_cast<Eigen::Index>(header.size()) != draws.cols()) throw DimensionError("CSV header width mismatch");
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (Eigen::Index r = 0; r < draws.rows(); ++r) {
    for (Eigen::Index c = 0; c < draws.cols(); ++c) out << (c ? "," : "") << format_double(draws(r, c));
    out << '\n';
  }
}

}  // namespace stochcat
