#include "netgame/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace netgame {

namespace {

std::vector<std::string> split_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

int parse_int(const std::string& field, const std::string& path, int line) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw CsvError(path, line, "expected an integer, got '" + field + "'");
  return value;
}

double parse_double(const std::string& field, const std::string& path, int line) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw CsvError(path, line, "expected a number, got '" + field + "'");
  return value;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError(path, 0, "cannot open for reading");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CsvError(path, 0, "cannot open for writing");
  return out;
}

void expect_header(const std::vector<std::string>& fields, const std::vector<std::string>& want,
                   const std::string& path) {
  if (fields != want) {
    std::string expected;
    for (size_t i = 0; i < want.size(); ++i) expected += (i ? "," : "") + want[i];
    throw CsvError(path, 1, "expected header '" + expected + "'");
  }
}

}  // namespace

DirectedNetwork load_edges(const std::string& path, int num_players) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw CsvError(path, 1, "missing header");
  expect_header(split_line(line), {"src", "dst"}, path);

  std::vector<std::pair<int, int>> edges;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split_line(line);
    if (fields.size() != 2) throw CsvError(path, lineno, "expected two fields");
    const int src = parse_int(fields[0], path, lineno);
    const int dst = parse_int(fields[1], path, lineno);
    if (src < 1 || src > num_players || dst < 1 || dst > num_players)
      throw CsvError(path, lineno, "player id outside 1.." + std::to_string(num_players));
    edges.emplace_back(src - 1, dst - 1);
  }
  try {
    return DirectedNetwork(num_players, edges);
  } catch (const std::invalid_argument& err) {
    throw CsvError(path, 0, err.what());
  }
}

void save_edges(const std::string& path, const DirectedNetwork& net) {
  std::ofstream out = open_output(path);
  out << "src,dst\n";
  for (int i = 0; i < net.num_players(); ++i)
    for (int j : net.friends(i)) out << (i + 1) << ',' << (j + 1) << '\n';
  if (!out) throw CsvError(path, 0, "write failed");
}

CovariateTable load_covariates(const std::string& path, MissingPolicy missing) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw CsvError(path, 1, "missing header");
  auto header = split_line(line);
  if (header.size() < 2 || header[0] != "id")
    throw CsvError(path, 1, "expected header 'id,<name>,...'");

  CovariateTable table;
  table.names.assign(header.begin() + 1, header.end());
  const int d = static_cast<int>(table.names.size());

  std::vector<std::pair<int, std::vector<double>>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split_line(line);
    if (static_cast<int>(fields.size()) != d + 1)
      throw CsvError(path, lineno, "expected " + std::to_string(d + 1) + " fields");
    std::vector<double> values(d);
    for (int c = 0; c < d; ++c) {
      if (fields[c + 1].empty()) {
        if (missing == MissingPolicy::Error)
          throw CsvError(path, lineno, "missing value in column '" + table.names[c] + "'");
        values[c] = 0.0;
      } else {
        values[c] = parse_double(fields[c + 1], path, lineno);
      }
    }
    rows.emplace_back(parse_int(fields[0], path, lineno), std::move(values));
  }

  const int n = static_cast<int>(rows.size());
  if (n < 1) throw CsvError(path, 0, "no data rows");
  table.x.resize(n, d);
  std::vector<char> seen(n, 0);
  for (const auto& [id, values] : rows) {
    if (id < 1 || id > n) throw CsvError(path, 0, "ids must form 1.." + std::to_string(n));
    if (seen[id - 1]) throw CsvError(path, 0, "duplicate id " + std::to_string(id));
    seen[id - 1] = 1;
    for (int c = 0; c < d; ++c) table.x(id - 1, c) = values[c];
  }
  return table;
}

void save_covariates(const std::string& path, const Eigen::MatrixXd& x,
                     const std::vector<std::string>& names) {
  if (static_cast<int>(names.size()) != x.cols())
    throw std::invalid_argument("save_covariates: one name per column required");
  std::ofstream out = open_output(path);
  out << "id";
  for (const auto& name : names) out << ',' << name;
  out << '\n';
  for (int i = 0; i < x.rows(); ++i) {
    out << (i + 1);
    for (int c = 0; c < x.cols(); ++c) out << ',' << format_double(x(i, c));
    out << '\n';
  }
  if (!out) throw CsvError(path, 0, "write failed");
}

std::vector<int> load_outcomes(const std::string& path, int num_players) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw CsvError(path, 1, "missing header");
  expect_header(split_line(line), {"id", "y"}, path);

  std::vector<int> y(num_players, -1);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split_line(line);
    if (fields.size() != 2) throw CsvError(path, lineno, "expected two fields");
    const int id = parse_int(fields[0], path, lineno);
    if (id < 1 || id > num_players)
      throw CsvError(path, lineno, "player id outside 1.." + std::to_string(num_players));
    if (y[id - 1] != -1) throw CsvError(path, lineno, "duplicate id " + std::to_string(id));
    const int action = parse_int(fields[1], path, lineno);
    if (action < 0) throw CsvError(path, lineno, "negative action");
    y[id - 1] = action;
  }
  for (int i = 0; i < num_players; ++i)
    if (y[i] == -1)
      throw CsvError(path, 0, "no outcome for player " + std::to_string(i + 1));
  return y;
}

void save_outcomes(const std::string& path, const std::vector<int>& y) {
  std::ofstream out = open_output(path);
  out << "id,y\n";
  for (size_t i = 0; i < y.size(); ++i) out << (i + 1) << ',' << y[i] << '\n';
  if (!out) throw CsvError(path, 0, "write failed");
}

ChoiceProfile load_profile(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw CsvError(path, 1, "missing header");
  auto header = split_line(line);
  if (header.size() < 3 || header[0] != "id")
    throw CsvError(path, 1, "expected header 'id,p0,p1,...'");
  const int cols = static_cast<int>(header.size()) - 1;
  for (int k = 0; k < cols; ++k)
    if (header[k + 1] != "p" + std::to_string(k))
      throw CsvError(path, 1, "expected header 'id,p0,p1,...'");

  std::vector<std::pair<int, std::vector<double>>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split_line(line);
    if (static_cast<int>(fields.size()) != cols + 1)
      throw CsvError(path, lineno, "expected " + std::to_string(cols + 1) + " fields");
    std::vector<double> values(cols);
    for (int k = 0; k < cols; ++k) values[k] = parse_double(fields[k + 1], path, lineno);
    rows.emplace_back(parse_int(fields[0], path, lineno), std::move(values));
  }

  const int n = static_cast<int>(rows.size());
  if (n < 1) throw CsvError(path, 0, "no data rows");
  ChoiceProfile profile;
  profile.probs.resize(n, cols);
  std::vector<char> seen(n, 0);
  for (const auto& [id, values] : rows) {
    if (id < 1 || id > n) throw CsvError(path, 0, "ids must form 1.." + std::to_string(n));
    if (seen[id - 1]) throw CsvError(path, 0, "duplicate id " + std::to_string(id));
    seen[id - 1] = 1;
    for (int k = 0; k < cols; ++k) profile.probs(id - 1, k) = values[k];
  }
  try {
    profile.validate();
  } catch (const std::invalid_argument& err) {
    throw CsvError(path, 0, err.what());
  }
  return profile;
}

void save_profile(const std::string& path, const ChoiceProfile& profile) {
  std::ofstream out = open_output(path);
  out << "id";
  for (int k = 0; k < profile.probs.cols(); ++k) out << ",p" << k;
  out << '\n';
  for (int i = 0; i < profile.probs.rows(); ++i) {
    out << (i + 1);
    for (int k = 0; k < profile.probs.cols(); ++k) out << ',' << format_double(profile.probs(i, k));
    out << '\n';
  }
  if (!out) throw CsvError(path, 0, "write failed");
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::vector<std::string> param_names(int num_actions,
                                     const std::vector<std::string>& covariates) {
  std::vector<std::string> names;
  for (int k = 1; k <= num_actions; ++k) {
    for (const auto& cov : covariates) names.push_back("beta_" + std::to_string(k) + "_" + cov);
    for (int l = 1; l <= num_actions; ++l)
      names.push_back("alpha_" + std::to_string(k) + "_" + std::to_string(l));
  }
  return names;
}

}  // namespace netgame
