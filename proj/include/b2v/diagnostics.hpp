#pragma once

#include <string>
#include <vector>

namespace b2v {

/// Non-fatal problems collected during lenient-mode processing.
struct Diagnostics {
  std::vector<std::string> messages;

  void add(std::string message) { messages.push_back(std::move(message)); }
  bool empty() const { return messages.empty(); }
  std::size_t size() const { return messages.size(); }
};

}  // namespace b2v
