#pragma once

#include <stdexcept>
#include <string>

namespace lorgh {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MalformedInput : Error {
  using Error::Error;
};

// A search or enumeration exceeded its configured bound.
struct BoundExceeded : Error {
  using Error::Error;
};

struct InvalidArgument : Error {
  using Error::Error;
};

// Too few sample points to carry out the requested construction.
struct ResolutionError : Error {
  using Error::Error;
};

}  // namespace lorgh
