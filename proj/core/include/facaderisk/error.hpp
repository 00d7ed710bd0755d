#pragma once

#include <stdexcept>
#include <string>

namespace facaderisk {

/// Thrown for hard failures: unreadable files, contract violations,
/// non-finite losses. Per-record problems are reported through rejection
/// logs and diagnostics instead.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace facaderisk
