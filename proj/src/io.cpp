#include "pulearn/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pulearn/errors.hpp"

namespace pulearn {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && s[b] == ' ') ++b;
  return s.substr(b);
}

double parse_real(const std::string& cell, std::size_t line) {
  const std::string t = trim(cell);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v)) {
    throw InputError("sample line " + std::to_string(line) +
                     ": not a finite real: '" + t + "'");
  }
  return v;
}

// Number of leading columns named prefix0, prefix1, ... starting at `from`.
Index count_prefixed(const std::vector<std::string>& header, std::size_t from,
                     char prefix) {
  Index count = 0;
  for (std::size_t i = from; i < header.size(); ++i, ++count) {
    if (trim(header[i]) != std::string(1, prefix) + std::to_string(count)) break;
  }
  return count;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  return os;
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

json matrix_json(const Matrix& u) {
  json rows = json::array();
  for (Index j = 0; j < u.rows(); ++j) {
    json row = json::array();
    for (Index k = 0; k < u.cols(); ++k) row.push_back(u(j, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& rows) {
  if (!rows.is_array() || rows.empty() || !rows[0].is_array()) {
    throw InputError("matrix: expected a non-empty array of rows");
  }
  const Index d = static_cast<Index>(rows.size());
  const Index n = static_cast<Index>(rows[0].size());
  Matrix u(d, n);
  for (Index j = 0; j < d; ++j) {
    const json& row = rows[static_cast<std::size_t>(j)];
    if (!row.is_array() || static_cast<Index>(row.size()) != n) {
      throw InputError("matrix: rows have unequal length");
    }
    for (Index k = 0; k < n; ++k) u(j, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
  return u;
}

}  // namespace

void write_sample(std::ostream& os, const ObservationSample& sample) {
  sample.validate();
  os << "weight";
  for (Index k = 0; k < sample.n(); ++k) os << ",x" << k;
  for (Index j = 0; j < sample.d(); ++j) os << ",f" << j;
  os << '\n';
  for (Index l = 0; l < sample.size(); ++l) {
    os << format_double(sample.weights(l));
    for (Index k = 0; k < sample.n(); ++k) os << ',' << format_double(sample.x(l, k));
    for (Index j = 0; j < sample.d(); ++j) os << ',' << format_double(sample.f(l, j));
    os << '\n';
  }
}

void write_sample_file(const std::string& path, const ObservationSample& sample) {
  std::ofstream os = open_out(path);
  write_sample(os, sample);
  if (!os) throw Error("write to '" + path + "' failed");
}

ObservationSample read_sample(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || trim(line).empty()) {
    throw InputError("sample: missing header");
  }
  const std::vector<std::string> header = split(trim(line), ',');
  if (header.empty() || trim(header[0]) != "weight") {
    throw InputError("sample: header must start with 'weight'");
  }
  const Index n = count_prefixed(header, 1, 'x');
  const Index d = count_prefixed(header, 1 + static_cast<std::size_t>(n), 'f');
  if (n == 0 || d == 0 ||
      static_cast<Index>(header.size()) != 1 + n + d) {
    throw InputError("sample: header must be weight,x0..x{n-1},f0..f{D-1}");
  }

  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split(trim(line), ',');
    if (static_cast<Index>(cells.size()) != 1 + n + d) {
      throw InputError("sample line " + std::to_string(lineno) +
                       ": expected " + std::to_string(1 + n + d) + " columns");
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const std::string& c : cells) row.push_back(parse_real(c, lineno));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("sample: no records");

  const Index m = static_cast<Index>(rows.size());
  ObservationSample out;
  out.weights.resize(m);
  out.x.resize(m, n);
  out.f.resize(m, d);
  for (Index l = 0; l < m; ++l) {
    const auto& r = rows[static_cast<std::size_t>(l)];
    out.weights(l) = r[0];
    for (Index k = 0; k < n; ++k) out.x(l, k) = r[static_cast<std::size_t>(1 + k)];
    for (Index j = 0; j < d; ++j) out.f(l, j) = r[static_cast<std::size_t>(1 + n + j)];
  }
  if ((out.weights.array() <= 0.0).any()) {
    throw InputError("sample: weights must be positive");
  }
  return out;
}

ObservationSample read_sample_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot open '" + path + "'");
  return read_sample(is);
}

std::string model_to_json(const ModelFile& model) {
  json j;
  j["D"] = model.d;
  j["n"] = model.n;
  j["channel"] = to_string(model.channel);
  j["u"] = matrix_json(model.u);
  j["fidelity"] = model.fidelity;
  j["converged"] = model.converged;
  j["iterations"] = model.iterations;
  j["seed"] = model.seed;
  json hist = json::array();
  for (const IterationRecord& r : model.history) {
    hist.push_back({{"iter", r.iteration},
                    {"mu", r.mu},
                    {"F", r.fidelity},
                    {"penalty", r.penalty}});
  }
  j["history"] = std::move(hist);
  return j.dump(2) + "\n";
}

ModelFile model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("model: invalid JSON: ") + e.what());
  }
  try {
    ModelFile m;
    m.d = j.at("D").get<Index>();
    m.n = j.at("n").get<Index>();
    m.channel = channel_from_string(j.at("channel").get<std::string>());
    m.u = matrix_from_json(j.at("u"));
    if (m.u.rows() != m.d || m.u.cols() != m.n) {
      throw InputError("model: u shape does not match D and n");
    }
    m.fidelity = j.at("fidelity").get<double>();
    m.converged = j.at("converged").get<bool>();
    m.iterations = j.at("iterations").get<int>();
    m.seed = j.at("seed").get<std::uint64_t>();
    for (const json& r : j.at("history")) {
      IterationRecord rec;
      rec.iteration = r.at("iter").get<int>();
      rec.mu = r.at("mu").get<double>();
      rec.fidelity = r.at("F").get<double>();
      rec.penalty = r.at("penalty").get<double>();
      m.history.push_back(rec);
    }
    return m;
  } catch (const json::exception& e) {
    throw InputError(std::string("model: ") + e.what());
  }
}

void write_model_file(const std::string& path, const ModelFile& model) {
  std::ofstream os = open_out(path);
  os << model_to_json(model);
  if (!os) throw Error("write to '" + path + "' failed");
}

ModelFile read_model_file(const std::string& path) {
  return model_from_json(slurp(path));
}

std::string matrix_to_json(const Matrix& u) {
  json j;
  j["u"] = matrix_json(u);
  return j.dump(2) + "\n";
}

Matrix read_matrix_file(const std::string& path) {
  json j;
  try {
    j = json::parse(slurp(path));
    return matrix_from_json(j.at("u"));
  } catch (const json::exception& e) {
    throw InputError("matrix file '" + path + "': " + e.what());
  }
}

}  // namespace pulearn
