#pragma once

#include <stdexcept>
#include <string>

namespace balmet {

/// A numerical evaluation left the representable domain (non-finite values).
struct numerical_domain_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Section evaluation lost full rank at a point.
struct degenerate_point_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The Gram matrix dropped below the degeneration floor during balancing.
struct degeneration_error : std::runtime_error {
  degeneration_error(const std::string& what, double min_eigenvalue)
      : std::runtime_error(what), min_eigenvalue(min_eigenvalue) {}
  double min_eigenvalue;
};

/// A configured resource cap (e.g. wedge-column budget) was exceeded.
struct resource_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bundle grammar violation; carries the byte offset of the offending token.
struct parse_error : std::invalid_argument {
  parse_error(const std::string& what, std::size_t offset)
      : std::invalid_argument(what), offset(offset) {}
  std::size_t offset;
};

}  // namespace balmet
