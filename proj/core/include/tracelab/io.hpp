#pragma once

// Text round trips for the core types and JSON export helpers.
//
// Martingales and measures share one flat text format: a header line
// "m depth leaf_count ell" followed by one line per leaf in lexicographic
// order, holding the 1-based digit string and then the values (a measure is
// the ell = 1 case, storing leaf masses).  Subspaces and transforms use a
// "m ell k" header followed by k rows of m*ell floats.  Kernels and symbols
// use a "mu d l" header followed by one line per group element or frequency
// with the coordinates and then interleaved real/imaginary component pairs.

#include <string>

#include "tracelab/groupfourier.hpp"
#include "tracelab/madic.hpp"
#include "tracelab/subspace.hpp"
#include "tracelab/transform.hpp"

namespace tracelab {

void save_martingale(const SimpleMartingale& F, const std::string& path);
SimpleMartingale load_martingale(const std::string& path);

void save_measure(const TreeMeasure& nu, const std::string& path);
TreeMeasure load_measure(const std::string& path);

void save_subspace(const Subspace& W, const std::string& path);
Subspace load_subspace(const std::string& path);

void save_transform(const TransformOp& phi, const std::string& path);
TransformOp load_transform(const std::string& path);

void save_kernel(const ConvKernel& K, const std::string& path);
ConvKernel load_kernel(const std::string& path);

void save_symbol(const GroupIndex& g, const Eigen::MatrixXcd& M,
                 const std::string& path);
std::pair<GroupIndex, Eigen::MatrixXcd> load_symbol(const std::string& path);

std::string martingale_json(const SimpleMartingale& F);
std::string measure_json(const TreeMeasure& nu);

}  // namespace tracelab
