#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace anovacheb {

/// Sampling law the nodes were drawn from.  The Chebyshev product density
/// is the natural one for the basis; uniform nodes need the padded
/// rescaling and row weighting downstream.
enum class NodeDensity { ChebyshevProduct, Uniform };

/// Scattered nodes in [-1,1]^d, row-major (node index slowest).  For
/// uniform nodes, `theta` records the padding of an already applied
/// rescaling x -> (1-theta)x; theta = 0 means raw, unscaled data.
struct NodeSet {
  int d = 0;
  NodeDensity density = NodeDensity::ChebyshevProduct;
  double theta = 0.0;
  std::vector<double> coords;

  std::size_t size() const {
    return d > 0 ? coords.size() / static_cast<std::size_t>(d) : 0;
  }
  const double* node(std::size_t j) const {
    return coords.data() + j * static_cast<std::size_t>(d);
  }
};

/// Checks shape and that every coordinate lies in the admissible range:
/// [-1,1] for raw sets, [-1+theta, 1-theta] for scaled uniform sets.
/// Throws DataError naming the offending node.
void validate_node_set(const NodeSet& nodes);

struct Dataset {
  NodeSet nodes;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

void validate_dataset(const Dataset& data);

/// Reads delimiter-separated text: d coordinate columns then one value
/// column per line.  Commas, spaces and tabs all separate fields; blank
/// lines and lines starting with '#' are skipped; one leading non-numeric
/// header line is tolerated.  Coordinates are validated against [-1,1];
/// errors carry the 1-based line number.  `source` names the stream in
/// error messages.
Dataset read_dataset(std::istream& in, int d, NodeDensity density,
                     const std::string& source = "<input>");

Dataset read_dataset_file(const std::string& path, int d, NodeDensity density);

/// Writes the same format back (17 significant digits, tab separated).
void write_dataset(std::ostream& out, const Dataset& data);

}  // namespace anovacheb
