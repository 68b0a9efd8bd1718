#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace motionfit {

// All library failures surface as this type; the message is the contract.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-fatal conditions collected while loading or extracting.
struct Diagnostics {
    std::vector<std::string> warnings;

    void warn(std::string message) { warnings.push_back(std::move(message)); }
    bool empty() const { return warnings.empty(); }
};

}  // namespace motionfit
