#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ibprof/graph.hpp"
#include "ibprof/stratify.hpp"

namespace ibprof::cli {

// Edge list: "tail<TAB>head[<TAB>weight]" per line, '#' comments, blank lines
// ignored. Header directives: %directed, %undirected, %n=<N>.
Graph parse_edge_list_text(std::string_view text);
Graph parse_edge_list(const std::string& path);

struct LabeledPartition {
  Partition partition;
  std::vector<std::string> names;  // names[b] = label text of block b
};

// "node<TAB>label"; labels map to block ids in first-appearance order.
LabeledPartition parse_partition_text(std::string_view text, std::size_t n);
LabeledPartition parse_partition(const std::string& path, std::size_t n);

// "node<TAB>value"; nodes may be omitted only under a %default=<v> directive.
std::vector<double> parse_scalar_attribute_text(std::string_view text, std::size_t n);
std::vector<double> parse_scalar_attribute(const std::string& path, std::size_t n);

struct CategoricalAttribute {
  std::vector<BlockId> labels;
  std::vector<std::string> names;
};

CategoricalAttribute parse_categorical_attribute_text(std::string_view text, std::size_t n);
CategoricalAttribute parse_categorical_attribute(const std::string& path, std::size_t n);

std::string write_edge_list(const Graph& g);
std::string write_partition(const Partition& p);
std::string write_attribute(std::span<const double> x);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

// "%.17g".
std::string format_real(double v);

}  // namespace ibprof::cli
