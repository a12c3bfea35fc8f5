#pragma once
#include <stdexcept>
#include <string>

namespace pecr {

// kind is a stable identifier (e.g. "ParseError", "NotAnOption") that the CLI
// and the service map to exit codes / HTTP statuses.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)), detail_(what) {}
    const std::string& kind() const { return kind_; }
    const std::string& detail() const { return detail_; }

private:
    std::string kind_;
    std::string detail_;
};

inline Error parse_error(const std::string& what) { return Error("ParseError", what); }

} // namespace pecr
