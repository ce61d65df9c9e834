#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tilepress {

/// A requested computation would exceed the configured enumeration cap.
/// `needed` carries the estimated object count so callers can suggest a
/// smaller level.
class capacity_error : public std::runtime_error {
public:
    capacity_error(std::string what, long long needed, long long cap)
        : std::runtime_error(std::move(what)), needed(needed), cap(cap) {}
    long long needed;
    long long cap;
};

/// Operator iteration failed to reach the residual tolerance. Keeps the
/// residual history for diagnostics.
class convergence_error : public std::runtime_error {
public:
    convergence_error(std::string what, std::vector<double> residuals)
        : std::runtime_error(std::move(what)), residual_history(std::move(residuals)) {}
    std::vector<double> residual_history;
};

/// Malformed or out-of-range run configuration. `where` is a JSON-pointer
/// style path to the offending key.
class config_error : public std::runtime_error {
public:
    config_error(const std::string& where, const std::string& what)
        : std::runtime_error("config error at " + where + ": " + what), where(where) {}
    std::string where;
};

} // namespace tilepress
