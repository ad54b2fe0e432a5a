#pragma once

#include <stdexcept>
#include <string>

namespace gwbridge {

/// A configured node, path or enumeration budget would be exceeded.
class CapacityExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gwbridge
