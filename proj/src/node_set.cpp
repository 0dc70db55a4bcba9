#include "anovacheb/node_set.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "anovacheb/errors.hpp"

namespace anovacheb {

void validate_node_set(const NodeSet& nodes) {
  if (nodes.d < 1) throw DataError("node set: dimension must be >= 1");
  if (nodes.coords.size() % static_cast<std::size_t>(nodes.d) != 0)
    throw DataError("node set: coordinate count not a multiple of d");
  if (nodes.theta < 0.0 || nodes.theta >= 1.0)
    throw DataError("node set: theta must lie in [0,1)");
  const double bound = 1.0 - nodes.theta;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double* x = nodes.node(j);
    for (int s = 0; s < nodes.d; ++s) {
      if (!std::isfinite(x[s]) || x[s] < -bound || x[s] > bound)
        throw DataError("node set: coordinate " + std::to_string(s + 1) +
                        " of node " + std::to_string(j + 1) +
                        " outside [" + std::to_string(-bound) + ", " +
                        std::to_string(bound) + "]");
    }
  }
}

void validate_dataset(const Dataset& data) {
  validate_node_set(data.nodes);
  if (data.values.size() != data.nodes.size())
    throw DataError("dataset: value count does not match node count");
  for (std::size_t j = 0; j < data.values.size(); ++j)
    if (!std::isfinite(data.values[j]))
      throw DataError("dataset: non-finite value at row " +
                      std::to_string(j + 1));
}

namespace {

bool parse_fields(const std::string& line, std::vector<double>& fields) {
  fields.clear();
  const char* p = line.c_str();
  const char* end = p + line.size();
  while (p < end) {
    while (p < end && (*p == ' ' || *p == '\t' || *p == ',' || *p == '\r'))
      ++p;
    if (p >= end) break;
    char* next = nullptr;
    double v = std::strtod(p, &next);
    if (next == p) return false;
    fields.push_back(v);
    p = next;
  }
  return true;
}

}  // namespace

Dataset read_dataset(std::istream& in, int d, NodeDensity density,
                     const std::string& source) {
  if (d < 1) throw DataError("read dataset: d must be >= 1");
  Dataset data;
  data.nodes.d = d;
  data.nodes.density = density;
  std::string line;
  std::vector<double> fields;
  std::size_t lineno = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!parse_fields(line, fields)) {
      // One header line of column names is allowed before any data.
      if (!seen_data) continue;
      throw DataError(source + ":" + std::to_string(lineno) +
                      ": unparsable field");
    }
    if (fields.empty()) continue;
    if (fields.size() != static_cast<std::size_t>(d) + 1)
      throw DataError(source + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(d + 1) + " columns, found " +
                      std::to_string(fields.size()));
    for (int s = 0; s < d; ++s) {
      if (!(fields[s] >= -1.0 && fields[s] <= 1.0))
        throw DataError(source + ":" + std::to_string(lineno) +
                        ": coordinate " + std::to_string(s + 1) + " = " +
                        std::to_string(fields[s]) + " outside [-1,1]");
      data.nodes.coords.push_back(fields[s]);
    }
    if (!std::isfinite(fields[d]))
      throw DataError(source + ":" + std::to_string(lineno) +
                      ": non-finite value");
    data.values.push_back(fields[d]);
    seen_data = true;
  }
  if (!seen_data) throw DataError(source + ": no data rows");
  return data;
}

Dataset read_dataset_file(const std::string& path, int d,
                          NodeDensity density) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file: " + path);
  return read_dataset(in, d, density, path);
}

void write_dataset(std::ostream& out, const Dataset& data) {
  char buf[32];
  for (std::size_t j = 0; j < data.size(); ++j) {
    const double* x = data.nodes.node(j);
    for (int s = 0; s < data.nodes.d; ++s) {
      std::snprintf(buf, sizeof buf, "%.17g", x[s]);
      out << buf << '\t';
    }
    std::snprintf(buf, sizeof buf, "%.17g", data.values[j]);
    out << buf << '\n';
  }
}

}  // namespace anovacheb
