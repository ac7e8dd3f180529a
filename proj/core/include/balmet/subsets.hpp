#pragma once

#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace balmet {

/// Binomial coefficient, exact.
boost::multiprecision::cpp_int binomial(int n, int k);

/// All r-element subsets of {0, ..., n-1} in colexicographic order (compare by
/// largest element, then the next, ...). This is the shared column/coordinate
/// order for wedge maps and Pluecker vectors.
std::vector<std::vector<int>> subsets_colex(int n, int r);

}  // namespace balmet
